"""Simplicial complexes for cone links: boundary operators, validation, Betti numbers.

A complex is stored combinatorially as sorted vertex tuples per degree, with
optional embedded vertex coordinates (required by the discrete exterior
calculus, not by homology). Orientation is fixed by sorted vertex order;
boundary matrices carry the usual alternating signs, so d(d(.)) = 0 holds as
an exact integer identity.

Complexes are immutable after construction and safe to share across
threads; every operation here is a pure function of its inputs.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

EXACT_RANK_MAX_ENTRIES = 20_000_000
FLOAT_RANK_RTOL = 1e-9


class MeshError(ValueError):
    """Invalid mesh input."""


class NonManifoldError(MeshError):
    """A codimension-one simplex with coface count != 2."""

    def __init__(self, simplex: tuple[int, ...], count: int):
        self.simplex = simplex
        self.count = count
        super().__init__(
            f"facet {simplex} has {count} coface(s); a closed manifold needs exactly 2"
        )


@dataclass(frozen=True)
class BettiVector:
    """Real-coefficient Betti numbers b[0..dim] with rank-method provenance."""

    values: tuple[int, ...]
    method: str = "exact"
    float_flagged: bool = False

    def __getitem__(self, k: int) -> int:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __eq__(self, other) -> bool:
        if isinstance(other, BettiVector):
            return self.values == other.values
        return tuple(self.values) == tuple(other)


@dataclass(frozen=True)
class BettiHypothesisVerdict:
    """Outcome of the b_{n-2} / b_{n-1} vanishing test for an n-dimensional cone."""

    holds_via: str  # 'n-2' | 'n-1' | 'both' | 'fails'
    n: int
    b_nm2: int
    b_nm1: int

    @property
    def holds(self) -> bool:
        return self.holds_via != "fails"


class SimplicialComplex:
    """Oriented triangulated closed manifold given by its top-dimensional simplices.

    Parameters
    ----------
    top_simplices:
        Iterable of vertex tuples, all of length dim+1. Vertices are 0-based
        integers. Lower faces are generated automatically.
    coords:
        Optional (n_vertices, D) float array of embedded coordinates.
    simplex_coords:
        Optional (n_top, dim+1, D) array of per-top-simplex vertex coordinates
        (local charts). Used for flat periodic meshes whose metric cannot be
        realized by a single global embedding. Rows must be aligned with the
        *sorted* vertex tuple of each top simplex.
    """

    def __init__(self, top_simplices, coords=None, simplex_coords=None, check: bool = True):
        tops = []
        for s in top_simplices:
            t = tuple(int(v) for v in s)
            if len(set(t)) != len(t):
                raise MeshError(f"simplex {t} has a repeated vertex")
            tops.append(tuple(sorted(t)))
        if not tops:
            raise MeshError("empty complex")
        dims = {len(t) - 1 for t in tops}
        if len(dims) != 1:
            raise MeshError(f"mixed top-simplex dimensions: {sorted(dims)}")
        self.dim: int = dims.pop()
        if self.dim < 1:
            raise MeshError("dim must be >= 1")
        if len(set(tops)) != len(tops):
            seen, dup = set(), None
            for t in tops:
                if t in seen:
                    dup = t
                    break
                seen.add(t)
            raise MeshError(f"duplicate simplex {dup}")

        self.n_vertices: int = 1 + max(max(t) for t in tops)
        self.simplices: list[list[tuple[int, ...]]] = []
        for k in range(self.dim + 1):
            faces = set()
            for t in tops:
                faces.update(itertools.combinations(t, k + 1))
            self.simplices.append(sorted(faces))
        self._index: list[dict[tuple[int, ...], int]] = [
            {s: i for i, s in enumerate(level)} for level in self.simplices
        ]

        self.coords = None if coords is None else np.asarray(coords, dtype=float)
        if self.coords is not None and self.coords.shape[0] != self.n_vertices:
            raise MeshError(
                f"coords rows ({self.coords.shape[0]}) != vertex count ({self.n_vertices})"
            )
        if simplex_coords is not None:
            sc = np.asarray(simplex_coords, dtype=float)
            if sc.shape[:2] != (len(tops), self.dim + 1):
                raise MeshError("simplex_coords shape mismatch")
            order = {t: i for i, t in enumerate(tops)}
            perm = [order[t] for t in self.simplices[self.dim]]
            self.simplex_coords = sc[perm]
        else:
            self.simplex_coords = None

        self._boundary_cache: dict[int, sp.csr_matrix] = {}
        if check:
            self.validate()

    # -- structure ---------------------------------------------------------

    def n_simplices(self, k: int) -> int:
        return len(self.simplices[k])

    def face_counts(self) -> list[int]:
        return [len(level) for level in self.simplices]

    def index_of(self, k: int, simplex: tuple[int, ...]) -> int:
        return self._index[k][tuple(sorted(simplex))]

    def boundary_matrix(self, k: int) -> sp.csr_matrix:
        """Sparse integer boundary map C_k -> C_{k-1}, entries in {-1,0,+1}."""
        if not 1 <= k <= self.dim:
            raise MeshError(f"boundary degree {k} out of range 1..{self.dim}")
        if k not in self._boundary_cache:
            idx = self._index[k - 1]
            nk = self.n_simplices(k)
            rows = np.empty(nk * (k + 1), dtype=np.int64)
            cols = np.empty_like(rows)
            vals = np.empty_like(rows)
            pos = 0
            for j, s in enumerate(self.simplices[k]):
                for i in range(k + 1):
                    rows[pos] = idx[s[:i] + s[i + 1 :]]
                    cols[pos] = j
                    vals[pos] = -1 if i % 2 else 1
                    pos += 1
            mat = sp.coo_matrix(
                (vals, (rows, cols)), shape=(self.n_simplices(k - 1), nk), dtype=np.int64
            )
            self._boundary_cache[k] = mat.tocsr()
        return self._boundary_cache[k]

    def top_coords(self) -> np.ndarray:
        """Per-top-simplex vertex coordinates, (n_top, dim+1, D)."""
        if self.simplex_coords is not None:
            return self.simplex_coords
        if self.coords is None:
            raise MeshError("complex has no vertex coordinates")
        tops = np.array(self.simplices[self.dim], dtype=np.int64)
        return self.coords[tops]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.face_counts()))

    def validate(self) -> None:
        """Pseudomanifold check and exact d(d(.)) = 0."""
        d = self.dim
        counts: dict[tuple[int, ...], int] = {}
        for t in self.simplices[d]:
            for i in range(d + 1):
                f = t[:i] + t[i + 1 :]
                counts[f] = counts.get(f, 0) + 1
        for f, c in counts.items():
            if c != 2:
                raise NonManifoldError(f, c)
        for k in range(2, d + 1):
            prod = self.boundary_matrix(k - 1) @ self.boundary_matrix(k)
            if prod.nnz and np.any(prod.data != 0):
                raise MeshError(f"boundary-of-boundary nonzero at degree {k}")

    def relabeled(self, perm: np.ndarray) -> "SimplicialComplex":
        """Same complex with vertices renamed by permutation perm[v]."""
        perm = np.asarray(perm, dtype=int)
        tops = [tuple(int(perm[v]) for v in t) for t in self.simplices[self.dim]]
        coords = None
        if self.coords is not None:
            coords = np.empty_like(self.coords)
            coords[perm] = self.coords
        sc = None
        if self.simplex_coords is not None:
            # rows of each chart must follow the new sorted vertex order
            sc = []
            for t, chart in zip(self.simplices[self.dim], self.simplex_coords):
                relabeled = [int(perm[v]) for v in t]
                order = np.argsort(relabeled)
                sc.append(chart[order])
            sc = np.array(sc)
        return SimplicialComplex(tops, coords=coords, simplex_coords=sc)


# -- I/O ------------------------------------------------------------------


def load_mesh(source) -> SimplicialComplex:
    """Load a complex from a JSON document (path, file object, or dict).

    Schema: {"dim": d, "vertices": [[x...], ...] or "num_vertices": n,
             "simplices": [[v0..vd], ...], "simplex_coords": optional charts}.
    """
    if isinstance(source, dict):
        doc = source
    elif hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source) as fh:
            doc = json.load(fh)
    if "simplices" not in doc:
        raise MeshError("mesh document missing 'simplices'")
    coords = doc.get("vertices")
    if coords is not None and not isinstance(coords, int):
        coords = np.asarray(coords, dtype=float)
    else:
        coords = None
    sc = doc.get("simplex_coords")
    cx = SimplicialComplex(doc["simplices"], coords=coords, simplex_coords=sc)
    if "dim" in doc and int(doc["dim"]) != cx.dim:
        raise MeshError(f"declared dim {doc['dim']} != simplex dim {cx.dim}")
    return cx


def save_mesh(cx: SimplicialComplex, path) -> None:
    doc: dict = {
        "dim": cx.dim,
        "simplices": [list(t) for t in cx.simplices[cx.dim]],
    }
    if cx.coords is not None:
        doc["vertices"] = cx.coords.tolist()
    else:
        doc["num_vertices"] = cx.n_vertices
    if cx.simplex_coords is not None:
        doc["simplex_coords"] = cx.simplex_coords.tolist()
    with open(path, "w") as fh:
        json.dump(doc, fh)


# -- exact / floating rank --------------------------------------------------


def _rank_object_exact(A: np.ndarray) -> int:
    """Row echelon rank with exact Python integers (slow, overflow-proof)."""
    A = A.astype(object).copy()
    nr, nc = A.shape
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if A[i, c] != 0:
                if piv is None or (abs(A[i, c]) == 1 and abs(A[piv, c]) != 1):
                    piv = i
                if abs(A[i, c]) == 1:
                    break
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        p = A[r, c]
        for i in range(r + 1, nr):
            if A[i, c] != 0:
                A[i] = A[i] * p - A[r] * A[i, c]
        r += 1
        if r == nr:
            break
    return r


def _rank_int64_exact(A: np.ndarray) -> int:
    """Vectorized integer elimination; falls back to exact object dtype on growth."""
    A = A.astype(np.int64).copy()
    nr, nc = A.shape
    r = 0
    for c in range(nc):
        col = A[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        units = nz[np.abs(col[nz]) == 1]
        piv = r + (units[0] if units.size else nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        p = int(A[r, c])
        rows = r + 1 + np.nonzero(A[r + 1 :, c])[0]
        if rows.size:
            # preemptive overflow guard: int64 wraps silently
            m_block = int(np.abs(A[rows]).max(initial=0))
            m_pivrow = int(np.abs(A[r]).max(initial=0))
            m_col = int(np.abs(A[rows, c]).max(initial=0))
            if m_block * abs(p) + m_col * m_pivrow > 2**61:
                raise OverflowError
            if abs(p) == 1:
                A[rows] -= np.outer(A[rows, c] * p, A[r])
            else:
                A[rows] = A[rows] * p - np.outer(A[rows, c], A[r])
        r += 1
        if r == nr:
            break
    return r


def rank(matrix, exact: bool | None = None) -> tuple[int, str]:
    """Rank of an integer matrix; returns (rank, method).

    method is 'exact' (integer elimination) or 'float-svd' (flagged, tolerance
    1e-9 * sigma_max) when the matrix exceeds the exact-arithmetic size cap.
    """
    if sp.issparse(matrix):
        if matrix.shape[0] == 0 or matrix.shape[1] == 0:
            return 0, "exact"
        dense = np.asarray(matrix.todense())
    else:
        dense = np.asarray(matrix)
        if dense.size == 0:
            return 0, "exact"
    use_exact = exact if exact is not None else dense.size <= EXACT_RANK_MAX_ENTRIES
    if use_exact:
        try:
            return _rank_int64_exact(dense), "exact"
        except OverflowError:
            return _rank_object_exact(dense), "exact"
    sv = np.linalg.svd(dense.astype(float), compute_uv=False)
    if sv.size == 0:
        return 0, "float-svd"
    return int(np.sum(sv > FLOAT_RANK_RTOL * sv[0])), "float-svd"


def betti(cx: SimplicialComplex) -> BettiVector:
    """Real Betti numbers b_k = dim ker(boundary_k) - rank(boundary_{k+1})."""
    ranks = [0] * (cx.dim + 2)
    methods = []
    for k in range(1, cx.dim + 1):
        ranks[k], meth = rank(cx.boundary_matrix(k))
        methods.append(meth)
    vals = []
    for k in range(cx.dim + 1):
        vals.append(cx.n_simplices(k) - ranks[k] - ranks[k + 1])
    flagged = any(m == "float-svd" for m in methods)
    return BettiVector(tuple(vals), method="float-svd" if flagged else "exact", float_flagged=flagged)


def check_betti_hypothesis(b, n: int) -> BettiHypothesisVerdict:
    """Does b_{n-2} = 0 or b_{n-1} = 0 hold for the regular part of an n-dimensional cone?

    b is the Betti vector of the link (equivalently of the punctured cone,
    which deformation-retracts onto it); n is the complex dimension, so the
    cone has real dimension 2n and the link dimension 2n-1.
    """
    if n < 2:
        raise ValueError("hypothesis needs complex dimension n >= 2")
    vals = tuple(b)
    if len(vals) < n:
        raise ValueError(f"Betti vector of length {len(vals)} cannot provide b_{n-1}")
    b_nm2, b_nm1 = vals[n - 2], vals[n - 1]
    if b_nm2 == 0 and b_nm1 == 0:
        via = "both"
    elif b_nm2 == 0:
        via = "n-2"
    elif b_nm1 == 0:
        via = "n-1"
    else:
        via = "fails"
    return BettiHypothesisVerdict(via, n, b_nm2, b_nm1)
