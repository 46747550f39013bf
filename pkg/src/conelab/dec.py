"""Discrete exterior calculus on a link mesh.

Cochain spaces carry the Galerkin (Whitney lowest-order) inner products M_k;
the coboundary d_k is the transpose of the integer boundary map, so d.d = 0
exactly, and the codifferential delta_k = M_{k-1}^{-1} d_{k-1}^T M_k is the
exact mass adjoint of d_{k-1}.  The p-form Hodge Laplacian dd* + d*d and the
link block operator used by the cone analysis are exposed as sparse symmetric
generalized pencils; the down-parts (which would need dense mass inverses)
are handled by auxiliary variables sigma = delta(phi), giving an equivalent
saddle pencil with positive-semidefinite right-hand block.

A DiscreteHodge is immutable and shareable once built (mass factorizations
are cached per degree); each pencil solve runs on a single logical thread,
and independent (mesh, degree) solves parallelize embarrassingly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import _whitney
from .mesh import SimplicialComplex

DEGENERACY_RTOL = 1e-14
DENSE_EIG_CAP = 2000
SPD_DENSE_CAP = 1500


class HodgeError(ValueError):
    """Invalid discrete-Hodge construction or solve request."""


class SolverError(RuntimeError):
    """Eigensolver failure; carries any partial results."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class DiscreteHodge:
    """Mass matrices, coboundaries and codifferentials of a link mesh.

    star='whitney' (default) uses the consistent Galerkin inner products,
    positive definite on any mesh with nondegenerate simplices and the basis
    of every spectral claim in this package.  star='lumped' keeps only the
    diagonal of each local block: faster solves, guaranteed SPD, but
    noticeably less accurate eigenvalues; use it for rough surveys only.
    """

    def __init__(self, complex: SimplicialComplex, star: str = "whitney"):
        if star not in ("whitney", "lumped"):
            raise HodgeError(f"unknown star '{star}'")
        self.complex = complex
        self.star = star
        dim = complex.dim
        top = complex.top_coords()
        vols = _whitney.simplex_volumes(top)
        scale = float(vols.max())
        bad = np.nonzero(vols < DEGENERACY_RTOL * scale)[0]
        if bad.size:
            t = complex.simplices[dim][bad[0]]
            raise HodgeError(f"degenerate simplex {t} (volume {vols[bad[0]]:.3e})")
        self.volumes = vols

        self.mass: list[sp.csr_matrix] = []
        for p in range(dim + 1):
            blocks, faces = _whitney.local_mass(top, p)
            # local Gram blocks of independent Whitney forms are positive
            # semidefinite; with nondegenerate simplices the assembled sum is
            # positive definite
            local_min = np.linalg.eigvalsh(0.5 * (blocks + blocks.transpose(0, 2, 1)))[:, 0]
            if np.any(local_min < -1e-12 * max(abs(blocks).max(), 1e-300)):
                raise HodgeError(f"indefinite local mass block at degree {p}")
            if star == "lumped":
                # diagonal part only: SPD by construction, documented accuracy loss
                diag_only = np.zeros_like(blocks)
                idx = np.arange(blocks.shape[1])
                diag_only[:, idx, idx] = blocks[:, idx, idx]
                blocks = diag_only
            self.mass.append(self._scatter(complex, p, blocks, faces))

        self.d: list[sp.csr_matrix] = [
            complex.boundary_matrix(k + 1).T.astype(float).tocsr() for k in range(dim)
        ]
        self._mass_lu: dict[int, spla.SuperLU] = {}
        for p in range(dim + 1):
            _assert_spd(self.mass[p], p)

    @staticmethod
    def _scatter(cx: SimplicialComplex, p: int, blocks: np.ndarray, faces: np.ndarray):
        dim = cx.dim
        n = cx.n_simplices(p)
        tops = cx.simplices[dim]
        F = faces.shape[0]
        gidx = np.empty((len(tops), F), dtype=np.int64)
        index = cx._index[p]
        for ti, t in enumerate(tops):
            for fi in range(F):
                gidx[ti, fi] = index[tuple(t[v] for v in faces[fi])]
        rows = np.repeat(gidx[:, :, None], F, axis=2).ravel()
        cols = np.repeat(gidx[:, None, :], F, axis=1).ravel()
        M = sp.coo_matrix((blocks.ravel(), (rows, cols)), shape=(n, n)).tocsr()
        M.eliminate_zeros()
        return M

    # -- operator application ------------------------------------------------

    @property
    def dim(self) -> int:
        return self.complex.dim

    def n_cochains(self, k: int) -> int:
        if k < 0 or k > self.dim:
            return 0
        return self.complex.n_simplices(k)

    def zero_cochain(self, k: int) -> np.ndarray:
        return np.zeros(self.n_cochains(k))

    def mass_solve(self, k: int, rhs: np.ndarray) -> np.ndarray:
        if k not in self._mass_lu:
            self._mass_lu[k] = spla.splu(self.mass[k].tocsc())
        return self._mass_lu[k].solve(rhs)

    def apply_d(self, k: int, x: np.ndarray) -> np.ndarray:
        """Coboundary C^k -> C^{k+1}; zero map off the complex's degree range."""
        if k < 0 or k >= self.dim:
            return self.zero_cochain(k + 1)
        return self.d[k] @ x

    def apply_delta(self, k: int, x: np.ndarray) -> np.ndarray:
        """Codifferential C^k -> C^{k-1}, the mass adjoint of d_{k-1}."""
        if k <= 0 or k > self.dim:
            return self.zero_cochain(k - 1)
        return self.mass_solve(k - 1, self.d[k - 1].T @ (self.mass[k] @ x))

    def apply_laplacian(self, k: int, x: np.ndarray) -> np.ndarray:
        up = self.apply_delta(k + 1, self.apply_d(k, x)) if k < self.dim else 0.0
        down = self.apply_d(k - 1, self.apply_delta(k, x)) if k > 0 else 0.0
        return up + down

    def inner(self, k: int, x: np.ndarray, y: np.ndarray) -> float:
        if k < 0 or k > self.dim or x.size == 0:
            return 0.0
        return float(np.real(np.conj(x) @ (self.mass[k] @ y)))

    def norm(self, k: int, x: np.ndarray) -> float:
        if k < 0 or k > self.dim or x.size == 0:
            return 0.0
        return float(np.sqrt(max(self.inner(k, x, x), 0.0)))


def _assert_spd(M: sp.csr_matrix, degree: int) -> None:
    """Symmetry always; Cholesky positivity up to the dense cap.

    Above the cap the local-block positivity certificate from assembly (each
    per-simplex Gram block is positive semidefinite, simplices nondegenerate)
    stands in for a factorization, whose fill-in dominates build time on
    large 3d meshes.
    """
    n = M.shape[0]
    asym = abs(M - M.T).max()
    if asym > 1e-12 * max(abs(M).max(), 1e-300):
        raise HodgeError(f"mass[{degree}] not symmetric (deviation {asym:.2e})")
    if n <= SPD_DENSE_CAP:
        try:
            np.linalg.cholesky(M.toarray())
        except np.linalg.LinAlgError:
            raise HodgeError(f"mass[{degree}] not positive definite") from None


def build_hodge(complex: SimplicialComplex, star: str = "whitney") -> DiscreteHodge:
    """Assemble the discrete Hodge structure; requires embedded coordinates."""
    return DiscreteHodge(complex, star=star)


# -- symmetric pencils -------------------------------------------------------


@dataclass
class SymmetricPencil:
    """Generalized symmetric pencil A x = lambda B x with optional aux block.

    Variables are ordered (aux..., phi...); B vanishes on the aux block, and
    eliminating the aux rows reproduces the intended operator on the phi
    variables exactly.  `blocks` lists (cochain degree, size) of the phi part.
    """

    A: sp.spmatrix
    B: sp.spmatrix
    n_aux: int
    blocks: list[tuple[int, int]]
    hodge: DiscreteHodge
    kind: str
    degree: int
    floor_hint: float = 0.0
    apply_reduced: "callable" = None
    meta: dict = field(default_factory=dict)

    @property
    def reduced_dim(self) -> int:
        return sum(n for _, n in self.blocks)

    def phi_mass(self) -> sp.spmatrix:
        return sp.block_diag([self.hodge.mass[d] for d, _ in self.blocks]).tocsr()

    def split_phi(self, x: np.ndarray) -> list[np.ndarray]:
        out, pos = [], 0
        for _, n in self.blocks:
            out.append(x[pos : pos + n])
            pos += n
        return out

    def phi_mass_solve(self, x: np.ndarray) -> np.ndarray:
        parts, pos = [], 0
        for d, n in self.blocks:
            parts.append(self.hodge.mass_solve(d, x[pos : pos + n]))
            pos += n
        return np.concatenate(parts)


def laplacian(h: DiscreteHodge, p: int) -> SymmetricPencil:
    """The p-form Hodge Laplacian as a symmetric pencil (mixed form for p >= 1)."""
    dim = h.dim
    if not 0 <= p <= dim:
        raise HodgeError(f"degree {p} out of range 0..{dim}")
    n_p = h.n_cochains(p)
    K = (h.d[p].T @ h.mass[p + 1] @ h.d[p]) if p < dim else sp.csr_matrix((n_p, n_p))

    def apply_reduced(x: np.ndarray) -> np.ndarray:
        return h.mass[p] @ h.apply_laplacian(p, x)

    if p == 0:
        return SymmetricPencil(
            A=K.tocsc(), B=h.mass[0].tocsc(), n_aux=0, blocks=[(0, n_p)],
            hodge=h, kind="laplacian", degree=p, apply_reduced=apply_reduced,
        )
    C = (h.d[p - 1].T @ h.mass[p]).tocsr()  # sigma rows couple to phi
    n_s = h.n_cochains(p - 1)
    A = sp.bmat([[-h.mass[p - 1], C], [C.T, K]]).tocsc()
    B = sp.block_diag([sp.csr_matrix((n_s, n_s)), h.mass[p]]).tocsc()
    return SymmetricPencil(
        A=A, B=B, n_aux=n_s, blocks=[(p, n_p)], hodge=h,
        kind="laplacian", degree=p, apply_reduced=apply_reduced,
    )


@dataclass
class SpectrumSlice:
    """Lowest part of a pencil's spectrum with residual certificates.

    `vectors` holds B-orthonormal eigenvectors of the reduced problem (phi
    variables only) as columns; residuals are ||A x - lambda M x|| in the
    M^{-1} norm, divided by (1 + |lambda|).
    """

    blocks: list[tuple[int, int]]
    eigenvalues: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    meta: dict

    def __len__(self) -> int:
        return len(self.eigenvalues)


def eigensolve(
    pencil: SymmetricPencil,
    K: int,
    tol: float = 1e-8,
    dense_cap: int = DENSE_EIG_CAP,
) -> SpectrumSlice:
    """K lowest eigenpairs of the pencil.

    Dense (Schur-reduced eigh) below `dense_cap` phi-dimension; sparse ARPACK
    shift-invert on the mixed pencil above it, with a dense retry on failure.
    Residual contract: ||A x - lambda M x||_{M^{-1}} <= tol * (1 + |lambda|).
    """
    if K < 0:
        raise HodgeError("mode count must be >= 0")
    n_red = pencil.reduced_dim
    if K > n_red:
        raise HodgeError(f"requested {K} modes from a dimension-{n_red} pencil")
    if K == 0:
        return SpectrumSlice(pencil.blocks, np.empty(0), np.empty((n_red, 0)),
                             np.empty(0), {"solver": "none", "tol": tol})

    if n_red <= dense_cap:
        vals, vecs, meta = _dense_path(pencil, K)
    else:
        try:
            vals, vecs, meta = _sparse_path(pencil, K, tol)
        except MemoryError as exc:  # pragma: no cover - memory-bound fallback
            if pencil.n_aux:
                raise SolverError(f"factorization exceeded memory: {exc}") from exc
            vals, vecs, meta = _lobpcg_path(pencil, K, tol)
        except (RuntimeError, spla.ArpackError) as exc:  # pragma: no cover - fallback
            if n_red <= 4 * dense_cap:
                vals, vecs, meta = _dense_path(pencil, K)
                meta["fallback_from"] = str(exc)
            else:
                raise SolverError(f"sparse eigensolver failed: {exc}") from exc

    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    M = pencil.phi_mass()
    # B-normalize
    for j in range(vecs.shape[1]):
        nrm = np.sqrt(max(vecs[:, j] @ (M @ vecs[:, j]), 1e-300))
        vecs[:, j] /= nrm
    res = np.empty(len(vals))
    for j in range(len(vals)):
        r = pencil.apply_reduced(vecs[:, j]) - vals[j] * (M @ vecs[:, j])
        res[j] = np.sqrt(max(r @ pencil.phi_mass_solve(r), 0.0)) / (1 + abs(vals[j]))
    meta.update({"tol": tol, "modes": K})
    slice_ = SpectrumSlice(pencil.blocks, vals, vecs, res, meta)
    if np.any(res > tol):
        if meta.get("solver") != "dense" and n_red <= 4 * dense_cap:
            return eigensolve(pencil, K, tol=tol, dense_cap=max(dense_cap, n_red))
        raise SolverError(
            f"residuals up to {res.max():.2e} exceed tol {tol:.2e}", partial=slice_
        )
    return slice_


def _dense_path(pencil: SymmetricPencil, K: int):
    A = pencil.A.toarray()
    na = pencil.n_aux
    n = pencil.reduced_dim
    if na:
        Maux = A[:na, :na]  # equals -blockdiag(aux masses)
        C = A[:na, na:]
        Ared = A[na:, na:] + C.T @ np.linalg.solve(-Maux, C)
    else:
        Ared = A
    Ared = 0.5 * (Ared + Ared.T)
    Bred = pencil.phi_mass().toarray()
    vals, vecs = sla.eigh(Ared, Bred, subset_by_index=[0, K - 1])
    return vals, vecs, {"solver": "dense", "dim": n, "aux": na}


def _sparse_path(pencil: SymmetricPencil, K: int, tol: float):
    A, B = pencil.A, pencil.B
    # shift just below the spectral floor: keeps the lowest modes well separated
    sigma = pencil.floor_hint - 0.05 * (1.0 + abs(pencil.floor_hint))
    kk = min(K + 2, pencil.reduced_dim)  # guard clusters at the cut
    # deterministic start vector: byte-identical reports for identical inputs;
    # machine-precision ARPACK tolerance: looser settings can drop members of
    # high-multiplicity clusters
    v0 = np.random.default_rng(0).standard_normal(A.shape[0])
    ncv = min(A.shape[0], max(2 * kk + 1, 24))
    vals, vecs = spla.eigsh(A, k=kk, M=B, sigma=sigma, which="LM", tol=0, v0=v0, ncv=ncv)
    phi = vecs[pencil.n_aux :, :]
    order = np.argsort(vals)[:K]
    return vals[order], phi[:, order], {
        "solver": "arpack-shift-invert", "sigma": sigma, "dim": pencil.reduced_dim,
    }


def _lobpcg_path(pencil: SymmetricPencil, K: int, tol: float):
    """Factorization-free fallback for definite pencils (no aux block)."""
    n = pencil.reduced_dim
    X = np.random.default_rng(0).standard_normal((n, K))
    vals, vecs = spla.lobpcg(
        pencil.A, X, B=pencil.B, largest=False, tol=tol, maxiter=400
    )
    return vals, vecs, {"solver": "lobpcg", "dim": n}


@dataclass(frozen=True)
class NearZeroCount:
    """Number of near-zero modes with an explicit spectral-gap certificate."""

    count: int
    threshold: float
    gap_ratio: float
    warning: bool

    def __int__(self) -> int:
        return self.count


def count_near_zero(
    slice_: SpectrumSlice, threshold: float | None = None, gap_factor: float = 10.0
) -> NearZeroCount:
    """Count eigenvalues below threshold (default 1e-6 * median of the slice).

    If the ratio across the candidate cut is below `gap_factor`, the count is
    flagged with warning=True rather than failing silently.
    """
    vals = np.sort(np.abs(slice_.eigenvalues))
    if vals.size == 0:
        return NearZeroCount(0, 0.0, np.inf, True)
    if threshold is None:
        med = float(np.median(vals))
        threshold = 1e-6 * med if med > 0 else 1e-12
    count = int(np.sum(vals < threshold))
    if count == len(vals):
        return NearZeroCount(count, threshold, 1.0, True)
    denom = vals[count - 1] if count >= 1 else threshold
    gap_ratio = float(vals[count] / max(denom, 1e-300))
    return NearZeroCount(count, threshold, gap_ratio, gap_ratio < gap_factor)


def spectrum_report(slice_: SpectrumSlice, near_zero: NearZeroCount | None = None) -> dict:
    """JSON-ready spectrum report."""
    if near_zero is None:
        near_zero = count_near_zero(slice_)
    return {
        "degree": slice_.blocks[-1][0] if slice_.blocks else None,
        "blocks": [{"degree": d, "size": n} for d, n in slice_.blocks],
        "eigenvalues": [float(v) for v in slice_.eigenvalues],
        "residuals": [float(r) for r in slice_.residuals],
        "near_zero_count": near_zero.count,
        "near_zero": {
            "threshold": near_zero.threshold,
            "gap_ratio": near_zero.gap_ratio,
            "warning": near_zero.warning,
        },
        "solver": dict(slice_.meta),
    }
