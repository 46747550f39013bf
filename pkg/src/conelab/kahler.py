"""Weighted-sphere radius, plurisubharmonicity checks, and potential gluing.

For weights lambda_1..lambda_m in (0,1], the weighted radius r_lam(z) is the
unique t > 0 with

    sum_a |z_a|^2 t^(-2/lambda_a) = 1,

the radius function of the Kahler cone structure deformed along the weighted
circle action.  It satisfies r^beta <= r_lam <= r^alpha for r <= 1 (alpha =
min, beta = max weight, reversed for r >= 1), scales by e^s under the flow
z_a -> e^(s/lambda_a) z_a, and r_lam^2 is strictly plurisubharmonic with Levi
form blowing up like r^(-2(1-beta)) toward the origin.

The gluing construction interpolates a strictly plurisubharmonic p (p(0)=0,
grad p(0)=0) with eps * r_lam^2 near the origin:

    q = p + eps * phi(r) * r_lam^2 - psi(r^2/delta^2) * p

where phi, psi are C^2 quintic cutoffs.  The constants M0, M1, nu bound the
cutoff-derivative terms (M := M0*M1*sup|psi''| + 2*M0*sup|psi'| + M0) and
delta solves min(beta^2, nu) * delta^(-2(1-beta)) = M/eps (then halved), so
the deformed Levi form dominates the perturbation throughout the transition
annulus.  The report verifies locality, the inside equality, and strict
plurisubharmonicity directly at stratified samples.

Everything here is pure and vectorized over point batches; sampling loops
reduce with max/min semantics and parallelize trivially.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_RADIUS_TOL = 1e-13
SHELL_MIN_EXP = 64  # dyadic shells reach 2^-64


class KahlerError(ValueError):
    """Invalid weighted-radius or gluing input."""


class GluingError(RuntimeError):
    """No admissible (eps, delta); carries diagnostics."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class WeightData:
    """Weights in (0,1) for the deformed cone; alpha/beta are the extremes."""

    lambdas: tuple[float, ...]

    def __post_init__(self):
        if not self.lambdas:
            raise KahlerError("need at least one weight")
        if any(not (0 < w < 1) for w in self.lambdas):
            raise KahlerError(f"weights must lie in (0,1): {self.lambdas}")

    @property
    def m(self) -> int:
        return len(self.lambdas)

    @property
    def alpha(self) -> float:
        return min(self.lambdas)

    @property
    def beta(self) -> float:
        return max(self.lambdas)


# -- weighted radius ----------------------------------------------------------


def _exponents(lambdas) -> np.ndarray:
    lam = np.asarray(lambdas, dtype=float)
    if np.any(lam <= 0) or np.any(lam > 1):
        raise KahlerError(f"weights must lie in (0,1]: {lambdas}")
    return 1.0 / lam


def weighted_radius(z, lambdas, tol: float = DEFAULT_RADIUS_TOL) -> np.ndarray | float:
    """Solve sum_a |z_a|^2 t^(-2/lambda_a) = 1 by log-bisection plus Newton.

    Accepts a single point (1d) or a batch (n, m); weights in (0,1].
    The left side is strictly decreasing in t, so the root is unique.
    """
    Z = np.asarray(z, dtype=complex)
    single = Z.ndim == 1
    Z = np.atleast_2d(Z)
    mu = _exponents(lambdas)
    if Z.shape[1] != mu.size:
        raise KahlerError(f"point dimension {Z.shape[1]} != weight count {mu.size}")
    a2 = np.abs(Z) ** 2
    r = np.sqrt(a2.sum(axis=1))
    if np.any(r == 0):
        raise KahlerError("weighted radius undefined at the origin")

    lam = np.asarray(lambdas, dtype=float)
    # r^beta..r^alpha sandwich gives a valid starting bracket in log space
    logr = np.log(r)
    lo = np.minimum(lam.min() * logr, lam.max() * logr) - 0.7
    hi = np.maximum(lam.min() * logr, lam.max() * logr) + 0.7

    def g(logt):
        return np.log((a2 * np.exp(-2.0 * np.outer(logt, mu))).sum(axis=1))

    for _ in range(70):  # bisection on log g (decreasing)
        mid = 0.5 * (lo + hi)
        val = g(mid)
        lo = np.where(val > 0, mid, lo)
        hi = np.where(val > 0, hi, mid)
    logt = 0.5 * (lo + hi)
    t = np.exp(logt)
    for _ in range(8):  # Newton polish on the original residual
        tw = np.exp(-2.0 * np.outer(np.log(t), mu))
        gval = (a2 * tw).sum(axis=1)
        gder = (a2 * tw * (-2.0 * mu)).sum(axis=1) / t
        step = (gval - 1.0) / gder
        t_new = t - step
        t = np.where(t_new > 0, t_new, 0.5 * t)
        if np.all(np.abs(gval - 1.0) < tol):
            break
    tw = np.exp(-2.0 * np.outer(np.log(t), mu))
    resid = np.abs((a2 * tw).sum(axis=1) - 1.0)
    if np.any(resid >= tol):
        raise KahlerError(f"weighted-radius residual {resid.max():.3e} above tol {tol:.1e}")
    return float(t[0]) if single else t


def weighted_radius_residual(z, lambdas, t) -> np.ndarray:
    Z = np.atleast_2d(np.asarray(z, dtype=complex))
    mu = _exponents(lambdas)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    a2 = np.abs(Z) ** 2
    return np.abs((a2 * t[:, None] ** (-2 * mu)).sum(axis=1) - 1.0)


def radius_squared_gradient(z, lambdas) -> np.ndarray:
    """d(r_lam^2)/dz_a = conj(z_a) A_a t^2 / S, A_a = t^(-2 mu_a), S = sum mu|z|^2 A."""
    Z = np.atleast_2d(np.asarray(z, dtype=complex))
    mu = _exponents(lambdas)
    t = np.atleast_1d(weighted_radius(Z, lambdas))
    A = t[:, None] ** (-2 * mu)
    S = (mu * np.abs(Z) ** 2 * A).sum(axis=1)
    return np.conj(Z) * A * (t**2 / S)[:, None]


def radius_squared_levi(z, lambdas) -> np.ndarray:
    """Closed-form Levi matrix of r_lam^2 (implicit differentiation), (n, m, m)."""
    Z = np.atleast_2d(np.asarray(z, dtype=complex))
    mu = _exponents(lambdas)
    t = np.atleast_1d(weighted_radius(Z, lambdas))
    A = t[:, None] ** (-2 * mu)
    a2 = np.abs(Z) ** 2
    S = (mu * a2 * A).sum(axis=1)
    Q = (mu**2 * a2 * A).sum(axis=1)
    n, m = Z.shape
    tt = (t**2 / S)[:, None, None]
    coef = (1.0 - mu[None, :, None] - mu[None, None, :] + (Q / S)[:, None, None]) / S[:, None, None]
    L = tt * (np.conj(Z)[:, :, None] * Z[:, None, :]) * (A[:, :, None] * A[:, None, :]) * coef
    L[:, np.arange(m), np.arange(m)] += A * (t**2 / S)[:, None]
    return L


def flow(z, lambdas, s: float) -> np.ndarray:
    """The weighted holomorphic flow z_a -> e^(s/lambda_a) z_a (scales r_lam by e^s)."""
    Z = np.asarray(z, dtype=complex)
    lam = np.asarray(lambdas, dtype=float)
    return Z * np.exp(s / lam)


# -- Levi forms by finite differences -----------------------------------------


def levi_form(f, z, h: float | None = None) -> np.ndarray:
    """Levi matrix L_ab = d^2 f / dz_a dzbar_b by 4th-order central differences.

    f maps an (n, m) complex batch to n real values; z is one point or a
    batch.  The step defaults to 1e-3 times the point radius (floored), so
    stratified samples at tiny radii stay resolvable.
    """
    Z = np.atleast_2d(np.asarray(z, dtype=complex))
    single = np.asarray(z).ndim == 1
    n, m = Z.shape
    r = np.linalg.norm(Z, axis=1)
    hs = (1e-3 * np.maximum(r, 1e-280)) if h is None else np.full(n, float(h))

    c1 = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
    o1 = np.array([-2.0, -1.0, 1.0, 2.0])
    c2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
    o2 = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])

    def second_same(axis, direction):
        acc = np.zeros(n)
        for cc, oo in zip(c2, o2):
            P = Z.copy()
            P[:, axis] += (oo * hs) * direction
            acc = acc + cc * np.asarray(f(P), dtype=float)
        return acc / hs**2

    def second_mixed(ax_u, dir_u, ax_v, dir_v):
        acc = np.zeros(n)
        for cu, ou in zip(c1, o1):
            for cv, ov in zip(c1, o1):
                P = Z.copy()
                P[:, ax_u] += (ou * hs) * dir_u
                P[:, ax_v] += (ov * hs) * dir_v
                acc = acc + cu * cv * np.asarray(f(P), dtype=float)
        return acc / hs**2

    L = np.zeros((n, m, m), dtype=complex)
    for a in range(m):
        fxx = second_same(a, 1.0)
        fyy = second_same(a, 1j)
        L[:, a, a] = (fxx + fyy) / 4.0
        for b in range(a + 1, m):
            gxx = second_mixed(a, 1.0, b, 1.0)
            gyy = second_mixed(a, 1j, b, 1j)
            gxy = second_mixed(a, 1.0, b, 1j)
            gyx = second_mixed(a, 1j, b, 1.0)
            L[:, a, b] = ((gxx + gyy) + 1j * (gxy - gyx)) / 4.0
            L[:, b, a] = np.conj(L[:, a, b])
    return L[0] if single else L


def min_levi_eig(L: np.ndarray) -> np.ndarray:
    """Smallest eigenvalue(s) of Hermitian Levi matrices."""
    L = np.asarray(L)
    if L.ndim == 2:
        return np.linalg.eigvalsh(0.5 * (L + np.conj(L.T)))[0]
    H = 0.5 * (L + np.conj(np.swapaxes(L, -1, -2)))
    return np.linalg.eigvalsh(H)[..., 0]


# -- polynomial potentials -----------------------------------------------------


class PolyPotential:
    """Real polynomial in z, zbar given by a monomial dictionary.

    Keys are space-separated tokens 'z<i>' / 'zbar<i>' (1-based), e.g.
    {"z1 zbar1": 1.0, "z1 z1": 0.15, "zbar1 zbar1": 0.15} for
    |z1|^2 + 0.3 Re(z1^2).  Values, gradients and Levi matrices are exact.
    """

    def __init__(self, m: int, terms: dict):
        self.m = m
        self.terms: list[tuple[np.ndarray, np.ndarray, complex]] = []
        by_key: dict[tuple, complex] = {}
        for key, coeff in terms.items():
            za = np.zeros(m, dtype=int)
            zb = np.zeros(m, dtype=int)
            if isinstance(key, str):
                for tok in key.split():
                    if tok.startswith("zbar"):
                        zb[int(tok[4:]) - 1] += 1
                    elif tok.startswith("z"):
                        za[int(tok[1:]) - 1] += 1
                    else:
                        raise KahlerError(f"bad monomial token '{tok}'")
            else:
                za[:], zb[:] = key[0], key[1]
            k = (tuple(za), tuple(zb))
            by_key[k] = by_key.get(k, 0.0) + complex(coeff)
        for (za, zb), coeff in by_key.items():
            self.terms.append((np.array(za), np.array(zb), coeff))
        self._check_real()

    def _check_real(self):
        index = {(tuple(a), tuple(b)): c for a, b, c in self.terms}
        for (a, b), c in index.items():
            cc = index.get((b, a))
            if cc is None or abs(np.conj(cc) - c) > 1e-12 * (1 + abs(c)):
                raise KahlerError(
                    "potential is not real: monomial "
                    f"z^{a} zbar^{b} lacks the conjugate partner"
                )

    def __call__(self, Z: np.ndarray) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        out = np.zeros(len(Z), dtype=complex)
        for za, zb, c in self.terms:
            out += c * np.prod(Z**za, axis=1) * np.prod(np.conj(Z) ** zb, axis=1)
        return np.real(out)

    def gradient(self, Z: np.ndarray) -> np.ndarray:
        """Holomorphic gradient dp/dz_a, exact."""
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        out = np.zeros(Z.shape, dtype=complex)
        for za, zb, c in self.terms:
            anti = np.prod(np.conj(Z) ** zb, axis=1)
            for a in np.nonzero(za)[0]:
                ea = za.copy()
                ea[a] -= 1
                out[:, a] += c * za[a] * np.prod(Z**ea, axis=1) * anti
        return out

    def levi(self, Z: np.ndarray) -> np.ndarray:
        """Exact Levi matrix d^2 p / dz_a dzbar_b."""
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        n = len(Z)
        out = np.zeros((n, self.m, self.m), dtype=complex)
        for za, zb, c in self.terms:
            for a in np.nonzero(za)[0]:
                ea = za.copy()
                ea[a] -= 1
                for b in np.nonzero(zb)[0]:
                    eb = zb.copy()
                    eb[b] -= 1
                    out[:, a, b] += (
                        c * za[a] * zb[b]
                        * np.prod(Z**ea, axis=1)
                        * np.prod(np.conj(Z) ** eb, axis=1)
                    )
        return out


# -- cutoffs -------------------------------------------------------------------


@dataclass(frozen=True)
class QuinticBump:
    """C^2 cutoff: 1 on [0, plateau], 0 on [edge, inf), quintic in between.

    sup|first derivative| = (15/8)/L and sup|second| = (10/sqrt 3)/L^2 with
    L = edge - plateau, both exact.
    """

    plateau: float
    edge: float

    def __post_init__(self):
        if not 0 <= self.plateau < self.edge:
            raise KahlerError("need 0 <= plateau < edge")

    @property
    def width(self) -> float:
        return self.edge - self.plateau

    @property
    def sup_d1(self) -> float:
        return (15.0 / 8.0) / self.width

    @property
    def sup_d2(self) -> float:
        return (10.0 / math.sqrt(3.0)) / self.width**2

    def _u(self, x):
        return np.clip((np.asarray(x, dtype=float) - self.plateau) / self.width, 0.0, 1.0)

    def __call__(self, x):
        u = self._u(x)
        return 1.0 - (10 * u**3 - 15 * u**4 + 6 * u**5)

    def d1(self, x):
        u = self._u(x)
        inside = (u > 0) & (u < 1)
        out = np.zeros_like(u)
        out[inside] = -30.0 * u[inside] ** 2 * (1 - u[inside]) ** 2
        return out / self.width

    def d2(self, x):
        u = self._u(x)
        inside = (u > 0) & (u < 1)
        out = np.zeros_like(u)
        out[inside] = -60.0 * u[inside] * (1 - u[inside]) * (1 - 2 * u[inside])
        return out / self.width**2


# -- gluing --------------------------------------------------------------------


@dataclass
class GluingProblem:
    """Inputs for the potential glue: weights, potential, cutoffs, domain."""

    weights: WeightData
    potential: PolyPotential
    psi: QuinticBump = field(default_factory=lambda: QuinticBump(0.25, 1.0))
    inner_radius: float = 0.4   # phi == 1 inside
    outer_radius: float = 0.8   # phi == 0 outside (support of the glue region)
    n_shells: int = 64
    n_angular: int = 40
    seed: int = 7
    hypothesis_tol: float = 1e-10

    def __post_init__(self):
        if self.potential.m != self.weights.m:
            raise KahlerError("potential and weights have different dimensions")
        if not 0 < self.inner_radius < self.outer_radius:
            raise KahlerError("need 0 < inner_radius < outer_radius")
        if self.n_shells < 64:
            raise KahlerError("stratified sampling needs at least 64 shells")
        self.phi = QuinticBump(self.inner_radius, self.outer_radius)
        origin = np.zeros((1, self.weights.m), dtype=complex)
        p0 = float(self.potential(origin)[0])
        g0 = float(np.abs(self.potential.gradient(origin)).max())
        if abs(p0) > self.hypothesis_tol or g0 > self.hypothesis_tol:
            raise KahlerError(
                f"potential must vanish to second order at 0: p(0) = {p0:.3e}, "
                f"|grad p(0)| = {g0:.3e}"
            )


@dataclass(frozen=True)
class Constants:
    """Empirical bounds (with 10% safety margin) for the glue estimate chain."""

    M0: float
    M1: float
    nu: float
    sup_psi_d1: float
    sup_psi_d2: float

    @property
    def M(self) -> float:
        return self.M0 * self.M1 * self.sup_psi_d2 + 2 * self.M0 * self.sup_psi_d1 + self.M0


def _shell_points(rng, m: int, rmin: float, rmax: float, n_shells: int, n_angular: int):
    radii = np.geomspace(rmin, rmax, n_shells)
    W = rng.standard_normal((n_shells * n_angular, m)) + 1j * rng.standard_normal(
        (n_shells * n_angular, m)
    )
    W /= np.linalg.norm(W, axis=1, keepdims=True)
    return W * np.repeat(radii, n_angular)[:, None]


def estimate_constants(prob: GluingProblem, points: np.ndarray | None = None) -> Constants:
    """Empirical (M0, M1, nu) over stratified dyadic shells covering supp(phi).

    M0: |p| <= M0 r^2, |dp| <= M0 r, Levi(p) <= M0 I.  M1: the rank-one form
    (dr^2, d^c r^2) against Levi(r^2) (identically 1 for the flat metric,
    kept as a measured quantity).  nu: best constant with
    Levi(r_lam^2) >= nu r^(-2(1-beta)) I over the sampled shells.
    """
    m = prob.weights.m
    rng = np.random.default_rng(prob.seed)
    if points is None:
        points = _shell_points(
            rng, m, 2.0**-SHELL_MIN_EXP, prob.outer_radius, prob.n_shells, prob.n_angular
        )
    r = np.linalg.norm(points, axis=1)
    pv = prob.potential(points)
    grad = prob.potential.gradient(points)
    grad_norm = np.sqrt(2.0 * (np.abs(grad) ** 2).sum(axis=1))
    levi_max = np.linalg.eigvalsh(
        0.5 * (prob.potential.levi(points) + np.conj(np.swapaxes(prob.potential.levi(points), 1, 2)))
    )[:, -1]
    M0 = 1.1 * max(
        float((np.abs(pv) / r**2).max()),
        float((grad_norm / r).max()),
        float(levi_max.max()),
        1e-12,
    )
    # (dr^2 ^ d^c r^2) has Levi representative 2 zbar z with top eigenvalue 2 r^2,
    # against r^2 * Levi(r^2) = 2 r^2: the ratio is exactly 1; measured anyway
    M1 = 1.1 * 1.0
    lev = radius_squared_levi(points, prob.weights.lambdas)
    emin = min_levi_eig(lev)
    beta = prob.weights.beta
    nu = 0.9 * float((emin * r ** (2.0 * (1.0 - beta))).min())
    if nu <= 0:
        raise GluingError("deformed potential not strictly plurisubharmonic at samples",
                          {"min_levi": float(emin.min())})
    return Constants(M0, M1, nu, prob.psi.sup_d1, prob.psi.sup_d2)


def glue_levi(prob: GluingProblem, points: np.ndarray, eps: float, delta: float | None):
    """Exact Levi matrix of q = p + eps phi r_lam^2 - psi(r^2/delta^2) p."""
    Z = np.atleast_2d(points)
    n, m = Z.shape
    r2 = (np.abs(Z) ** 2).sum(axis=1)
    r = np.sqrt(r2)
    I = np.tile(np.eye(m, dtype=complex), (n, 1, 1))
    zb = np.conj(Z)

    pL = prob.potential.levi(Z)
    pg = prob.potential.gradient(Z)
    pv = prob.potential(Z)

    # eps * phi(r) * r_lam^2 via product/chain rule
    ph = prob.phi(r)
    ph1 = prob.phi.d1(r)
    ph2 = prob.phi.d2(r)
    gr = zb / (2 * r[:, None])
    Lr = I / (2 * r)[:, None, None] - zb[:, :, None] * Z[:, None, :] / (4 * r**3)[:, None, None]
    Lphi = ph2[:, None, None] * gr[:, :, None] * np.conj(gr)[:, None, :] + ph1[:, None, None] * Lr
    gphi = ph1[:, None] * gr
    u = weighted_radius(Z, prob.weights.lambdas) ** 2
    gu = radius_squared_gradient(Z, prob.weights.lambdas)
    Lu = radius_squared_levi(Z, prob.weights.lambdas)
    Lphiu = (
        ph[:, None, None] * Lu
        + u[:, None, None] * Lphi
        + gphi[:, :, None] * np.conj(gu)[:, None, :]
        + gu[:, :, None] * np.conj(gphi)[:, None, :]
    )
    total = pL + eps * Lphiu

    if delta is not None:
        s = r2 / delta**2
        ps = prob.psi(s)
        ps1 = prob.psi.d1(s)
        ps2 = prob.psi.d2(s)
        Lpsi = (
            ps2[:, None, None] * zb[:, :, None] * Z[:, None, :] / delta**4
            + ps1[:, None, None] * I / delta**2
        )
        gpsi = ps1[:, None] * zb / delta**2
        Lpsip = (
            ps[:, None, None] * pL
            + pv[:, None, None] * Lpsi
            + gpsi[:, :, None] * np.conj(pg)[:, None, :]
            + pg[:, :, None] * np.conj(gpsi)[:, None, :]
        )
        total = total - Lpsip
    return total


def glue_value(prob: GluingProblem, points: np.ndarray, eps: float, delta: float):
    Z = np.atleast_2d(points)
    r2 = (np.abs(Z) ** 2).sum(axis=1)
    r = np.sqrt(r2)
    pv = prob.potential(Z)
    u = weighted_radius(Z, prob.weights.lambdas) ** 2
    return pv + eps * prob.phi(r) * u - prob.psi(r2 / delta**2) * pv


@dataclass
class GlueResult:
    eps: float
    delta: float
    constants: Constants
    locality_pass: bool
    inside_pass: bool
    psh_pass: bool
    min_levi: float
    worst_radius: float
    n_samples: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return self.locality_pass and self.inside_pass and self.psh_pass

    def to_json(self) -> dict:
        return {
            "eps": self.eps,
            "delta": self.delta,
            "constants": {
                "M0": self.constants.M0, "M1": self.constants.M1,
                "nu": self.constants.nu, "M": self.constants.M,
                "sup_psi_d1": self.constants.sup_psi_d1,
                "sup_psi_d2": self.constants.sup_psi_d2,
            },
            "checks": {
                "locality": self.locality_pass,
                "inside_equality": self.inside_pass,
                "strictly_plurisubharmonic": self.psh_pass,
            },
            "min_levi_eigenvalue": self.min_levi,
            "worst_radius": self.worst_radius,
            "n_samples": self.n_samples,
            "diagnostics": self.diagnostics,
        }


def glue_potential(prob: GluingProblem, n_verify: int = 10_000) -> GlueResult:
    """Run the full construction and verify it at stratified samples.

    eps: geometric halving from 1 until p + eps phi r_lam^2 is strictly
    plurisubharmonic with a 5% margin (sampling densified in the outer-cutoff
    annulus, where the cutoff-derivative terms live).  delta: solve
    min(beta^2, nu) delta^(-2(1-beta)) = M/eps for equality, halve once, cap
    at the inner plateau; nu is re-estimated on shells extending below delta
    until self-consistent.
    """
    m = prob.weights.m
    beta = prob.weights.beta
    rng = np.random.default_rng(prob.seed)

    consts = estimate_constants(prob)
    M = consts.M

    # eps search
    search_pts = np.vstack([
        _shell_points(rng, m, 2.0**-SHELL_MIN_EXP, prob.outer_radius * 1.5,
                      prob.n_shells, max(8, prob.n_angular // 2)),
        _shell_points(rng, m, prob.inner_radius * 0.9, prob.outer_radius * 1.05,
                      24, 5 * prob.n_angular),
    ])
    p_floor = float(min_levi_eig(prob.potential.levi(search_pts)).min())
    if p_floor <= 0:
        raise GluingError("input potential is not strictly plurisubharmonic at samples",
                          {"p_levi_floor": p_floor})
    eps = 1.0
    ok = False
    for _ in range(60):
        lm = float(min_levi_eig(glue_levi(prob, search_pts, eps, None)).min())
        if lm > 0.05 * p_floor:
            ok = True
            break
        eps *= 0.5
    if not ok:
        raise GluingError("no eps makes p + eps phi r_lam^2 strictly plurisubharmonic",
                          {"last_eps": eps, "min_levi": lm})

    # delta: solve the selection rule, re-estimating nu self-consistently
    nu = consts.nu
    delta = prob.inner_radius
    for _ in range(12):
        c = min(beta**2, nu)
        d_eq = (eps * c / M) ** (1.0 / (2.0 * (1.0 - beta)))
        d_new = min(d_eq, prob.inner_radius) / 2.0
        if d_new <= 0 or not np.isfinite(d_new):
            raise GluingError("delta selection failed", {"eps": eps, "nu": nu, "M": M})
        if abs(math.log(d_new) - math.log(delta)) < 0.05:
            delta = d_new
            break
        delta = d_new
        lo = min(2.0**-SHELL_MIN_EXP, delta / 16)
        pts = _shell_points(rng, m, lo, 1.0, prob.n_shells + 8, prob.n_angular // 2 or 8)
        rn = np.linalg.norm(pts, axis=1)
        emin = min_levi_eig(radius_squared_levi(pts, prob.weights.lambdas))
        nu = 0.9 * float((emin * rn ** (2.0 * (1.0 - beta))).min())
    consts = Constants(consts.M0, consts.M1, nu, consts.sup_psi_d1, consts.sup_psi_d2)

    # verification at >= n_verify stratified samples
    per = max(20, -(-n_verify // (3 * prob.n_shells)))
    Zv = np.vstack([
        _shell_points(rng, m, delta * math.sqrt(prob.psi.plateau) / 4, 4 * delta,
                      prob.n_shells, per),
        _shell_points(rng, m, min(2.0**-SHELL_MIN_EXP, delta / 16), 1.0,
                      prob.n_shells, per),
        _shell_points(rng, m, prob.inner_radius * 0.9, prob.outer_radius * 1.05,
                      prob.n_shells, per),
    ])
    lmin = min_levi_eig(glue_levi(prob, Zv, eps, delta))
    rv = np.linalg.norm(Zv, axis=1)
    worst = int(np.argmin(lmin))
    psh_pass = bool(lmin.min() > 0)

    # locality: q == p outside the outer cutoff
    Zo = _shell_points(rng, m, prob.outer_radius * 1.0001, 2.0, 8, 30)
    loc_err = float(np.abs(glue_value(prob, Zo, eps, delta) - prob.potential(Zo)).max())
    locality_pass = loc_err < 1e-12

    # inside: q == eps r_lam^2 on the psi plateau
    plateau_r = delta * math.sqrt(prob.psi.plateau)
    Zi = _shell_points(rng, m, plateau_r / 64, plateau_r * 0.999, 10, 30)
    u = weighted_radius(Zi, prob.weights.lambdas) ** 2
    ins_err = float(np.abs(glue_value(prob, Zi, eps, delta) - eps * u).max())
    inside_scale = float(np.abs(eps * u).max())
    inside_pass = ins_err < 1e-12 * max(1.0, inside_scale) + 1e-250

    result = GlueResult(
        eps=eps, delta=delta, constants=consts,
        locality_pass=locality_pass, inside_pass=inside_pass, psh_pass=psh_pass,
        min_levi=float(lmin.min()), worst_radius=float(rv[worst]),
        n_samples=int(len(Zv)),
        diagnostics={
            "M": M, "locality_error": loc_err, "inside_error": ins_err,
            "p_levi_floor": p_floor,
        },
    )
    if not result.all_pass:
        raise GluingError(
            "glued potential failed verification: "
            + ", ".join(k for k, v in result.to_json()["checks"].items() if not v),
            result.to_json(),
        )
    return result
