"""Cone-level analysis over a link mesh.

A metric cone of real dimension l over a link carries, for each form degree
p, the weight m = 1 + p - l/2 and a self-adjoint block operator on
(p-1, p)-cochain pairs,

    E = [[Lap + 2l - 4p, -2 delta], [-2 d, Lap]],

whose eigenvalues lambda_j determine the exponents of homogeneous harmonic
p-forms through the roots of xi^2 - 2m xi - lambda_j.  This module assembles
E as a sparse symmetric pencil, computes indicial roots and exceptional
homogeneity orders, checks the no-log spectral gap and the vanishing-window
predictions, and reports Fredholm weight windows (maximal intervals free of
exceptional orders, on which weighted-Laplacian kernels are stable).

Homogeneous p-forms are represented by their link components
(phi_prime, phi_double_prime) at a radial exponent beta; the cone operators
act componentwise:

    d:    (p, beta)   -> (p+1, beta):   (beta*phi'' - d phi', d phi'')
    d*:   (p, beta)   -> (p-1, beta-2): (-delta phi', delta phi'' - (beta + l - 2p) phi')
    Lap:  (p, beta)   -> (p, beta-2):
          (Lap phi' - (beta-2)(beta+l-2p) phi' - 2 delta phi'',
           Lap phi'' - beta(beta+l-2-2p) phi'' - 2 d phi')

and d* d + d d* reproduces Lap exactly as an operator identity, which is the
arbiter for the sign conventions of the discrete codifferential.

Reports are pure functions of (geometry, degree, mode count); batch
analysis over (mesh, degree) pairs shares no mutable state.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .dec import DiscreteHodge, SpectrumSlice, SymmetricPencil, eigensolve
from .mesh import BettiVector, betti

ROOT_ALGEBRA_RTOL = 1e-12
CLUSTER_RTOL = 1e-6
DEFAULT_ZERO_TOL = 1e-8


class ConeError(ValueError):
    """Invalid cone-analysis request."""


@dataclass(frozen=True)
class ConeGeometry:
    """A Riemannian l-cone presented by its (l-1)-dimensional link mesh."""

    l: int
    link: DiscreteHodge

    def __post_init__(self):
        if self.l < 2:
            raise ConeError("cone dimension l must be >= 2")
        if self.link.dim != self.l - 1:
            raise ConeError(
                f"link dimension {self.link.dim} inconsistent with cone dimension {self.l}"
            )

    def weight(self, p: int) -> float:
        return 1.0 + p - self.l / 2.0


@dataclass
class HomogeneousForm:
    """Degree-p form r^beta (dlog r ^ phi' + phi'') with link cochain components."""

    p: int
    beta: float
    phi_prime: np.ndarray
    phi_double_prime: np.ndarray

    @property
    def order(self) -> float:
        return self.beta - self.p

    def check_shapes(self, g: ConeGeometry) -> None:
        if self.phi_prime.shape[0] != g.link.n_cochains(self.p - 1):
            raise ConeError(f"phi' has size {self.phi_prime.shape[0]}, "
                            f"expected {g.link.n_cochains(self.p - 1)}")
        if self.phi_double_prime.shape[0] != g.link.n_cochains(self.p):
            raise ConeError(f"phi'' has size {self.phi_double_prime.shape[0]}, "
                            f"expected {g.link.n_cochains(self.p)}")


def random_form(g: ConeGeometry, p: int, beta: float, rng) -> HomogeneousForm:
    return HomogeneousForm(
        p=p, beta=beta,
        phi_prime=rng.standard_normal(g.link.n_cochains(p - 1)),
        phi_double_prime=rng.standard_normal(g.link.n_cochains(p)),
    )


def cone_d(f: HomogeneousForm, g: ConeGeometry) -> HomogeneousForm:
    """Exterior derivative; degree p+1 at the same exponent."""
    f.check_shapes(g)
    lk = g.link
    return HomogeneousForm(
        p=f.p + 1, beta=f.beta,
        phi_prime=f.beta * f.phi_double_prime - lk.apply_d(f.p - 1, f.phi_prime),
        phi_double_prime=lk.apply_d(f.p, f.phi_double_prime),
    )


def cone_dstar(f: HomogeneousForm, g: ConeGeometry) -> HomogeneousForm:
    """Codifferential; degree p-1 at exponent beta-2."""
    f.check_shapes(g)
    lk = g.link
    coeff = f.beta + g.l - 2 * f.p
    return HomogeneousForm(
        p=f.p - 1, beta=f.beta - 2,
        phi_prime=-lk.apply_delta(f.p - 1, f.phi_prime),
        phi_double_prime=lk.apply_delta(f.p, f.phi_double_prime) - coeff * f.phi_prime,
    )


def cone_laplacian(f: HomogeneousForm, g: ConeGeometry) -> HomogeneousForm:
    """Hodge Laplacian; same degree at exponent beta-2."""
    f.check_shapes(g)
    lk = g.link
    b, l, p = f.beta, g.l, f.p
    return HomogeneousForm(
        p=p, beta=b - 2,
        phi_prime=(lk.apply_laplacian(p - 1, f.phi_prime)
                   - (b - 2) * (b + l - 2 * p) * f.phi_prime
                   - 2 * lk.apply_delta(p, f.phi_double_prime)),
        phi_double_prime=(lk.apply_laplacian(p, f.phi_double_prime)
                          - b * (b + l - 2 - 2 * p) * f.phi_double_prime
                          - 2 * lk.apply_d(p - 1, f.phi_prime)),
    )


# -- the block operator E ----------------------------------------------------


def assemble_E(g: ConeGeometry, p: int) -> SymmetricPencil:
    """E = [[Lap + 2l-4p, -2 delta], [-2 d, Lap]] on (p-1, p) link cochains.

    Returned as a sparse symmetric pencil; down-Laplacian parts enter through
    auxiliary variables sigma' = delta phi', sigma'' = delta phi''.  For p = 0
    the phi' block is empty and E degenerates to the 0-form Laplacian.
    """
    h = g.link
    dim = h.dim
    if not 0 <= p <= g.l - 1:
        raise ConeError(f"degree {p} out of range 0..{g.l - 1}")
    c = 2.0 * g.l - 4.0 * p
    n_q = h.n_cochains(p - 1)
    n_p = h.n_cochains(p)

    Kq = (h.d[p - 1].T @ h.mass[p] @ h.d[p - 1]) if 1 <= p else None
    Kp = (h.d[p].T @ h.mass[p + 1] @ h.d[p]) if p < dim else sp.csr_matrix((n_p, n_p))

    def apply_reduced(x: np.ndarray) -> np.ndarray:
        xq, xp = x[:n_q], x[n_q:]
        yq = (h.apply_laplacian(p - 1, xq) + c * xq - 2 * h.apply_delta(p, xp)
              if n_q else np.zeros(0))
        yp = h.apply_laplacian(p, xp) - 2 * h.apply_d(p - 1, xq)
        out = np.concatenate([h.mass[p - 1] @ yq if n_q else yq, h.mass[p] @ yp])
        return out

    m = g.weight(p)
    floor = -(m * m)
    if p == 0:
        return SymmetricPencil(
            A=Kp.tocsc(), B=h.mass[0].tocsc(), n_aux=0, blocks=[(0, n_p)],
            hodge=h, kind="cone-block", degree=p, floor_hint=floor,
            apply_reduced=lambda x: h.mass[0] @ h.apply_laplacian(0, x),
            meta={"l": g.l, "p": p, "m": m},
        )

    C2 = (h.d[p - 1].T @ h.mass[p]).tocsr()      # sigma'' constraint vs phi''
    coupling = -2.0 * C2                          # phi' row vs phi''
    diag_q = Kq + c * h.mass[p - 1]
    if p >= 2:
        n_s1 = h.n_cochains(p - 2)
        C1 = (h.d[p - 2].T @ h.mass[p - 1]).tocsr()
        A = sp.bmat([
            [-h.mass[p - 2], None, C1, None],
            [None, -h.mass[p - 1], None, C2],
            [C1.T, None, diag_q, coupling],
            [None, C2.T, coupling.T, Kp],
        ]).tocsc()
        n_aux = n_s1 + n_q
    else:
        A = sp.bmat([
            [-h.mass[p - 1], None, C2],
            [None, diag_q, coupling],
            [C2.T, coupling.T, Kp],
        ]).tocsc()
        n_aux = n_q
    zeros = sp.csr_matrix((n_aux, n_aux))
    B = sp.block_diag([zeros, h.mass[p - 1], h.mass[p]]).tocsc()
    return SymmetricPencil(
        A=A, B=B, n_aux=n_aux, blocks=[(p - 1, n_q), (p, n_p)],
        hodge=h, kind="cone-block", degree=p, floor_hint=floor,
        apply_reduced=apply_reduced, meta={"l": g.l, "p": p, "m": m},
    )


# -- indicial machinery ------------------------------------------------------


def indicial_roots(m: float, lam: float) -> tuple[float, float] | None:
    """Real roots m +- sqrt(m^2 + lam) of xi^2 - 2 m xi - lam, or None if complex.

    At lam = 0 the roots are {2m, 0}, giving homogeneity orders
    {2m - p, -p} = {2 + p - l, -p}; at m = 0 and lam = c^2 they are +-c.
    """
    disc = m * m + lam
    if disc < 0:
        return None
    root = math.sqrt(disc)
    return (m + root, m - root)


@dataclass(frozen=True)
class IndicialDatum:
    """Roots of xi^2 - 2 m xi - lambda for one link eigenvalue."""

    j: int
    lam: float
    alpha_root: float | None   # m + sqrt(m^2 + lam), None when lam < -m^2
    beta_root: float | None
    orders: tuple[float, ...]
    below_floor: bool = False

    def root_residuals(self, m: float) -> tuple[float, float]:
        if self.alpha_root is None:
            return (0.0, 0.0)
        scale = 1.0 + abs(self.lam) + m * m
        return (
            abs(self.alpha_root + self.beta_root - 2 * m) / scale,
            abs(self.alpha_root * self.beta_root + self.lam) / scale,
        )


@dataclass(frozen=True)
class WindowVerdict:
    name: str
    claim: str
    applicable: bool
    passed: bool | None
    detail: str


@dataclass(frozen=True)
class FredholmWindow:
    lo: float
    hi: float
    note: str = "kernel of the weighted Laplacian is constant across this window"


@dataclass
class ConeReport:
    """Indicial analysis of one (cone dimension, form degree) pair."""

    l: int
    p: int
    m: float
    spectrum: SpectrumSlice
    indicial: list[IndicialDatum]
    exceptional_orders: list[tuple[float, int]]     # (order, multiplicity)
    no_log_gap: float
    boundary_modes: list[int]                       # certified lambda = -m^2 modes
    resolved_interval: tuple[float, float]          # orders certified complete
    warnings: list[str] = field(default_factory=list)
    window_verdicts: list[WindowVerdict] = field(default_factory=list)
    fredholm: list["FredholmWindow"] = field(default_factory=list)
    betti: BettiVector | None = None

    def to_json(self) -> dict:
        return {
            "l": self.l,
            "p": self.p,
            "m": self.m,
            "eigenvalues": [float(v) for v in self.spectrum.eigenvalues],
            "residuals": [float(r) for r in self.spectrum.residuals],
            "indicial": [
                {
                    "j": d.j, "lambda": d.lam,
                    "alpha_root": d.alpha_root, "beta_root": d.beta_root,
                    "orders": list(d.orders), "below_floor": d.below_floor,
                }
                for d in self.indicial
            ],
            "exceptional_orders": [
                {"order": o, "multiplicity": mult} for o, mult in self.exceptional_orders
            ],
            "no_log_gap": self.no_log_gap,
            "boundary_modes": self.boundary_modes,
            "resolved_interval": list(self.resolved_interval),
            "fredholm_windows": [
                {"lo": w.lo, "hi": w.hi, "note": w.note} for w in self.fredholm
            ],
            "warnings": self.warnings,
            "window_verdicts": [
                {
                    "name": w.name, "claim": w.claim, "applicable": w.applicable,
                    "passed": w.passed, "detail": w.detail,
                }
                for w in self.window_verdicts
            ],
            "betti": list(self.betti) if self.betti is not None else None,
            "solver": dict(self.spectrum.meta),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["j", "lambda", "alpha_root", "beta_root", "order_alpha", "order_beta"])
        for d in self.indicial:
            orders = list(d.orders) + [None] * (2 - len(d.orders))
            w.writerow([d.j, d.lam, d.alpha_root, d.beta_root, orders[0], orders[1]])
        return buf.getvalue()


def indicial_analysis(
    g: ConeGeometry,
    p: int,
    K: int,
    tol: float = 1e-8,
    zero_tol: float = DEFAULT_ZERO_TOL,
    saturation_tol: float = 0.02,
    certificate_tol: float = 0.05,
    with_windows: bool = True,
) -> ConeReport:
    """Spectrum of E, indicial roots, exceptional orders and windows.

    Modes saturating the lower bound (lambda = -m^2, the double indicial
    root) are log-bearing boundary cases: they occur on genuine links, e.g.
    through harmonic (l/2)-forms at p = l/2 + 1 (eigenvectors (h, 0) with
    eigenvalue 2l - 4p = -m^2 exactly) and through spectral coincidences in
    the coupled pairs (s - 2 sqrt(s) = -m^2).  Every such mode satisfies the
    double-root relation d phi' = m phi''; modes within `saturation_tol` of
    -m^2 that carry this certificate are flagged as boundary cases and
    excluded from the no-log gap, never silently passed.  Near-saturated
    modes *without* the certificate are left in the gap pool, so genuine
    solver or mesh pathology still fails.
    """
    if K < 1:
        raise ConeError("need at least one mode")
    m = g.weight(p)
    pencil = assemble_E(g, p)
    slice_ = eigensolve(pencil, K, tol=tol)
    lam = slice_.eigenvalues
    floor = -(m * m)

    indicial: list[IndicialDatum] = []
    warnings: list[str] = []
    orders_all: list[tuple[float, int]] = []
    for j, lj in enumerate(lam):
        disc = m * m + lj
        if disc < -zero_tol * (1 + abs(lj) + m * m):
            indicial.append(IndicialDatum(j, float(lj), None, None, (), below_floor=True))
            warnings.append(
                f"eigenvalue-floor: lambda_{j} = {lj:.6g} lies below -m^2 = {floor:.6g}; "
                "mode quarantined as a discretization artifact"
            )
            continue
        a, b = indicial_roots(m, max(lj, floor))
        indicial.append(IndicialDatum(j, float(lj), a, b, (a - p, b - p)))
        orders_all.append((a - p, j))
        orders_all.append((b - p, j))

    scale = max(1.0, float(abs(lam).max()) if len(lam) else 1.0)
    exceptional = _cluster_orders([o for o, _ in orders_all], CLUSTER_RTOL * scale)

    boundary = _saturation_boundary_modes(
        g, p, m, slice_, saturation_tol=saturation_tol, certificate_tol=certificate_tol
    )
    gap_pool = [
        abs(lj + m * m) for j, lj in enumerate(lam)
        if j not in boundary and not indicial[j].below_floor
    ]
    no_log_gap = float(min(gap_pool)) if gap_pool else math.inf
    if boundary:
        warnings.append(
            f"log-boundary: {len(boundary)} mode(s) saturate lambda = -m^2 (double "
            "indicial root, certified by d phi' = m phi''); flagged as boundary "
            "cases, excluded from the no-log gap, never silently passed"
        )

    lam_max = float(lam.max()) if len(lam) else 0.0
    root_max = math.sqrt(max(m * m + lam_max, 0.0))
    resolved = (m - root_max - p, m + root_max - p)

    report = ConeReport(
        l=g.l, p=p, m=m, spectrum=slice_, indicial=indicial,
        exceptional_orders=exceptional, no_log_gap=no_log_gap,
        boundary_modes=boundary, resolved_interval=resolved, warnings=warnings,
    )
    if resolved[1] > resolved[0] + 1e-12:
        report.fredholm = fredholm_windows(report, resolved)
    if with_windows:
        report.betti = betti(g.link.complex)
        report.window_verdicts = classify_windows(report, g)
    return report


def _saturation_boundary_modes(
    g: ConeGeometry,
    p: int,
    m: float,
    slice_: SpectrumSlice,
    saturation_tol: float,
    certificate_tol: float,
) -> list[int]:
    """Indices of modes at lambda = -m^2 carrying the double-root certificate."""
    h = g.link
    n_q = h.n_cochains(p - 1)
    out = []
    for j, lj in enumerate(slice_.eigenvalues):
        if abs(lj + m * m) > saturation_tol * (1 + m * m):
            continue
        v = slice_.vectors[:, j]
        phi_p, phi_pp = v[:n_q], v[n_q:]
        resid = h.apply_d(p - 1, phi_p) - m * phi_pp
        size = math.hypot(h.norm(p - 1, phi_p), h.norm(p, phi_pp))
        if h.norm(p, resid) <= certificate_tol * max(size, 1e-300):
            out.append(j)
    return out


def _cluster_orders(orders: list[float], tol: float) -> list[tuple[float, int]]:
    if not orders:
        return []
    vals = sorted(orders)
    out: list[tuple[float, int]] = []
    cur, count = vals[0], 1
    for v in vals[1:]:
        if abs(v - cur) <= tol:
            cur = (cur * count + v) / (count + 1)
            count += 1
        else:
            out.append((cur, count))
            cur, count = v, 1
    out.append((cur, count))
    return out


@dataclass(frozen=True)
class NoLogVerdict:
    passed: bool
    gap: float
    boundary_flagged: bool
    detail: str

    @property
    def claim(self) -> str:
        return "no-log-gap"


def nolog_verdict(report: ConeReport, gap_tol: float = 0.1) -> NoLogVerdict:
    """PASS iff the non-boundary spectrum of E stays clear of -m^2 by gap_tol.

    Certified saturation modes (lambda = -m^2 with the double-root structure,
    e.g. lambda = 0 at m = 0, or harmonic mid-degree forms at p = l/2 + 1)
    are log-bearing boundary cases: flagged in the verdict and excluded from
    the gap, never silently passed.  An uncertified near-saturation mode
    still fails, indicating mesh or solver pathology.
    """
    flagged = bool(report.boundary_modes)
    if report.no_log_gap > gap_tol:
        detail = f"min_j |lambda_j + m^2| = {report.no_log_gap:.6g} > {gap_tol}"
        if flagged:
            detail += (
                f"; {len(report.boundary_modes)} certified log-boundary mode(s) "
                f"at lambda = -m^2 flagged"
            )
        return NoLogVerdict(True, report.no_log_gap, flagged, detail)
    return NoLogVerdict(
        False, report.no_log_gap, flagged,
        f"no-log-gap violated: min_j |lambda_j + m^2| = {report.no_log_gap:.6g} "
        f"<= {gap_tol} (mesh/solver pathology)",
    )


# -- vanishing windows -------------------------------------------------------


def classify_windows(
    report: ConeReport,
    g: ConeGeometry,
    vec_tol: float = 1e-4,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> list[WindowVerdict]:
    """Check the vanishing-window and eigenvector-structure predictions.

    Open-window claims assert the absence of exceptional orders strictly
    inside the window (within the resolved interval); eigenvector claims are
    checked on the computed E-eigenvectors in mass norms.
    """
    l, p, m = report.l, report.p, report.m
    b = report.betti if report.betti is not None else betti(g.link.complex)
    out = []
    out.append(_open_window_verdict(
        report, "upper-degree-window", (2 - p, p - l), applicable=(2 * p > l + 2),
    ))
    out.append(_open_window_verdict(
        report, "lower-degree-window", (2 + p - l, -p), applicable=(2 * p < l - 2),
    ))
    out.append(_gradient_relation_verdict(report, g, (-p, p - l), applicable=(2 * p > l)))
    out.append(_zero_mode_structure_verdict(report, g, vec_tol, zero_tol,
                                            applicable=(2 * p <= l - 2)))
    bp = b[p] if p <= g.link.dim else 0
    out.append(_dual_order_verdict(report, bp, zero_tol, applicable=(2 * p <= l - 2)))
    return out


def _window_contains(report: ConeReport, window: tuple[float, float]) -> list[float]:
    lo, hi = window
    eps = 1e-9 * (1 + abs(lo) + abs(hi))
    return [o for o, _ in report.exceptional_orders if lo + eps < o < hi - eps]


def _open_window_verdict(report, name, window, applicable) -> WindowVerdict:
    lo, hi = window
    claim = f"no exceptional orders in the open interval ({lo}, {hi})"
    if not applicable or lo >= hi:
        return WindowVerdict(name, claim, False, None, "hypothesis fails; skipped")
    rl, rh = report.resolved_interval
    if rl > lo or rh < hi:
        return WindowVerdict(
            name, claim, True, None,
            f"resolved interval [{rl:.3g}, {rh:.3g}] does not cover the window; "
            "increase the mode count",
        )
    inside = _window_contains(report, window)
    if inside:
        return WindowVerdict(name, claim, True, False,
                             f"exceptional orders found inside: {inside}")
    return WindowVerdict(name, claim, True, True, "window empty as predicted")


def _gradient_relation_verdict(report, g, window, applicable) -> WindowVerdict:
    """For orders alpha in (-p, p-l), p > l/2: d phi' = (2 + p - l - alpha) phi''."""
    name = "interior-gradient-relation"
    claim = "d phi' = (2+p-l-alpha) phi'' for harmonic orders inside (-p, p-l)"
    lo, hi = window
    if not applicable or lo >= hi:
        return WindowVerdict(name, claim, False, None, "hypothesis fails; skipped")
    h = g.link
    p = report.p
    n_q = h.n_cochains(p - 1)
    checked = 0
    worst = 0.0
    for d in report.indicial:
        if d.alpha_root is None:
            continue
        for root, order in ((d.alpha_root, d.orders[0]), (d.beta_root, d.orders[1])):
            if not (lo + 1e-9 < order < hi - 1e-9):
                continue
            v = report.spectrum.vectors[:, d.j]
            phi_p, phi_pp = v[:n_q], v[n_q:]
            lhs = h.apply_d(p - 1, phi_p)
            rhs = (2 + p - report.l - order) * phi_pp
            err = h.norm(p, lhs - rhs) / max(h.norm(p, rhs), h.norm(p - 1, phi_p), 1e-15)
            worst = max(worst, err)
            checked += 1
    if checked == 0:
        return WindowVerdict(name, claim, True, None, "no resolved orders in the window")
    passed = worst < 1e-6
    return WindowVerdict(name, claim, True, passed,
                         f"{checked} mode(s) checked, worst relative error {worst:.2e}")


def _zero_mode_structure_verdict(report, g, vec_tol, zero_tol, applicable) -> WindowVerdict:
    """For p <= l/2 - 1, lambda = 0 eigenvectors have phi' = 0, d phi'' = delta phi'' = 0."""
    name = "order-minus-p-structure"
    claim = "lambda = 0 eigenvectors: phi' = 0 and phi'' is a harmonic link form"
    if not applicable:
        return WindowVerdict(name, claim, False, None, "hypothesis fails; skipped")
    h = g.link
    p = report.p
    n_q = h.n_cochains(p - 1)
    lam = report.spectrum.eigenvalues
    scale = max(1.0, float(abs(lam).max()) if len(lam) else 1.0)
    zero_idx = [j for j, lj in enumerate(lam) if abs(lj) < zero_tol * scale]
    if not zero_idx:
        return WindowVerdict(name, claim, True, None, "no lambda = 0 modes resolved")
    worst = 0.0
    for j in zero_idx:
        v = report.spectrum.vectors[:, j]
        phi_p, phi_pp = v[:n_q], v[n_q:]
        npp = max(h.norm(p, phi_pp), 1e-15)
        rel_prime = h.norm(p - 1, phi_p) / npp
        rel_d = h.norm(p + 1, h.apply_d(p, phi_pp)) / npp
        rel_delta = h.norm(p - 1, h.apply_delta(p, phi_pp)) / npp
        worst = max(worst, rel_prime, rel_d, rel_delta)
    passed = worst < vec_tol
    return WindowVerdict(name, claim, True, passed,
                         f"{len(zero_idx)} zero mode(s), worst relative norm {worst:.2e}")


def _dual_order_verdict(report, b_p, zero_tol, applicable) -> WindowVerdict:
    """For p <= l/2 - 1 with b_p = 0, order 2+p-l admits no harmonic form (no lambda = 0)."""
    name = "dual-order-vanishing"
    claim = "b_p = 0 forbids exceptional order 2+p-l (no lambda = 0 modes)"
    if not applicable:
        return WindowVerdict(name, claim, False, None, "hypothesis fails; skipped")
    if b_p != 0:
        return WindowVerdict(name, claim, False, None,
                             f"b_p = {b_p} != 0; hypothesis fails; skipped")
    lam = report.spectrum.eigenvalues
    scale = max(1.0, float(abs(lam).max()) if len(lam) else 1.0)
    zeros = int(np.sum(np.abs(lam) < zero_tol * scale))
    return WindowVerdict(
        name, claim, True, zeros == 0,
        f"{zeros} lambda = 0 mode(s) found" if zeros else "no lambda = 0 modes, as predicted",
    )


# -- diagonalization check ---------------------------------------------------


def diagonalization_matrices(beta: float, l: float, p: float):
    """The 2x2 matrices (M, P, D) coupling (phi'', d phi') for exponent beta."""
    u = beta * (beta + l - 2 - 2 * p)
    M = np.array([[u, 2 * beta * (beta + l - 2 - 2 * p)],
                  [2.0, (beta - 2) * (beta + l - 2 * p) + 4]])
    P = np.array([[beta + l - 2 - 2 * p, beta], [1.0, -1.0]])
    D = np.array([[beta * (beta + l - 2 * p), 0.0],
                  [0.0, (beta - 2) * (beta + l - 2 - 2 * p)]])
    return M, P, D


def check_diagonalization(beta: float, l: float, p: float) -> float:
    """Residual ||P^{-1} M P - D||_inf; raises on the singular line 2 beta = 2+2p-l."""
    M, P, D = diagonalization_matrices(beta, l, p)
    det = -(2 * beta + l - 2 - 2 * p)
    scale = 1 + abs(beta) + abs(l) + abs(p)
    if abs(det) < 1e-12 * scale:
        raise ConeError(
            f"singular change of basis at 2*beta = 2+2p-l (beta = {beta}, l = {l}, p = {p})"
        )
    R = np.linalg.solve(P, M @ P) - D
    return float(abs(R).max())


# -- Fredholm windows --------------------------------------------------------


def fredholm_windows(report: ConeReport, interval: tuple[float, float]) -> list[FredholmWindow]:
    """Maximal open subintervals of `interval` free of exceptional orders.

    Requires the resolved interval to cover the request; each window carries
    the kernel-stability annotation (weighted-Laplacian kernels agree at any
    two weights inside one window).
    """
    a, b = float(interval[0]), float(interval[1])
    if a >= b:
        raise ConeError("empty weight interval")
    rl, rh = report.resolved_interval
    if rl > a or rh < b:
        raise ConeError(
            f"resolved order interval [{rl:.4g}, {rh:.4g}] does not cover "
            f"[{a:.4g}, {b:.4g}]; increase the mode count K"
        )
    cuts = sorted(o for o, _ in report.exceptional_orders if a < o < b)
    points = [a] + cuts + [b]
    return [
        FredholmWindow(lo, hi) for lo, hi in zip(points[:-1], points[1:]) if hi > lo
    ]
