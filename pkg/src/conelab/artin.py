"""Artin local algebras over R and C with exact arithmetic.

Algebras are given by structure constants on a basis e_0 = 1, e_1, ..,
e_{dim-1} whose span past e_0 is the maximal ideal; all identities
(commutativity, associativity, nilpotency, small-extension and fiber-product
constructions, the truncated-polynomial lift maps, module duality and
reflexivity) are verified in exact Gaussian-rational arithmetic, never
floating point.  Values are immutable in practice (nothing mutates a
validated algebra), so everything is trivially parallel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._exact import GaussRat, ONE, ZERO, gmat, gzeros, geye, matmul, nullspace, rank, solve


class ArtinError(ValueError):
    """Invalid algebra, homomorphism, or module data."""


class ArtinAlgebra:
    """Commutative Artin local algebra by structure constants.

    mult[i][j][k] is the e_k coefficient of e_i * e_j.  The basis must start
    with the unit, and e_1.. must span a nilpotent ideal; `validate`
    re-derives all of it instead of trusting the input.
    """

    def __init__(self, base: str, mult, names: list[str] | None = None, check: bool = True):
        if base not in ("R", "C"):
            raise ArtinError("base must be 'R' or 'C'")
        self.base = base
        self.dim = len(mult)
        self.mult = np.empty((self.dim, self.dim, self.dim), dtype=object)
        for i in range(self.dim):
            for j in range(self.dim):
                for k in range(self.dim):
                    self.mult[i, j, k] = GaussRat.of(mult[i][j][k])
        self.names = names or [f"e{i}" for i in range(self.dim)]
        self.nilpotency_index: int | None = None
        if check:
            self.validate()

    # -- element helpers -----------------------------------------------------

    def zero(self) -> np.ndarray:
        v = np.empty(self.dim, dtype=object)
        v[:] = ZERO
        return v

    def unit(self) -> np.ndarray:
        v = self.zero()
        v[0] = ONE
        return v

    def basis_vector(self, i: int) -> np.ndarray:
        v = self.zero()
        v[i] = ONE
        return v

    def element(self, coeffs) -> np.ndarray:
        v = self.zero()
        for i, c in enumerate(coeffs):
            v[i] = GaussRat.of(c)
        return v

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        out = self.zero()
        for i in range(self.dim):
            if not x[i]:
                continue
            for j in range(self.dim):
                if not y[j]:
                    continue
                c = x[i] * y[j]
                for k in range(self.dim):
                    if self.mult[i, j, k]:
                        out[k] = out[k] + c * self.mult[i, j, k]
        return out

    def mult_matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix of multiplication by x in the basis (columns = x * e_j)."""
        M = gzeros(self.dim, self.dim)
        for j in range(self.dim):
            col = self.multiply(x, self.basis_vector(j))
            for k in range(self.dim):
                M[k, j] = col[k]
        return M

    # -- structure -----------------------------------------------------------

    def validate(self) -> None:
        d = self.dim
        for i in range(d):
            for j in range(i, d):
                if any(self.mult[i, j, k] != self.mult[j, i, k] for k in range(d)):
                    raise ArtinError(f"not commutative at basis pair ({i},{j})")
        for j in range(d):
            img = self.multiply(self.unit(), self.basis_vector(j))
            if any(img[k] != (ONE if k == j else ZERO) for k in range(d)):
                raise ArtinError("e0 is not a unit")
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    lhs = self.multiply(self.multiply(self.basis_vector(i), self.basis_vector(j)),
                                        self.basis_vector(k))
                    rhs = self.multiply(self.basis_vector(i),
                                        self.multiply(self.basis_vector(j), self.basis_vector(k)))
                    if any(lhs[s] != rhs[s] for s in range(d)):
                        raise ArtinError(f"not associative at ({i},{j},{k})")
        # the span of e_1.. must be an ideal: products of ideal elements stay there
        for i in range(1, d):
            for j in range(d):
                if self.mult[i, j, 0]:
                    raise ArtinError(
                        f"e{i} * e{j} has a unit component; e1.. is not an ideal"
                    )
        self.nilpotency_index = self._nilpotency()

    def _nilpotency(self) -> int:
        """Least N with (maximal ideal)^N = 0; raises if not nilpotent."""
        span = [self.basis_vector(i) for i in range(1, self.dim)]
        power = 1
        while span:
            if power > self.dim:
                raise ArtinError("maximal ideal is not nilpotent")
            nxt = []
            for v in span:
                for i in range(1, self.dim):
                    nxt.append(self.multiply(v, self.basis_vector(i)))
            span = _independent(nxt)
            power += 1
        return power

    def maximal_ideal_power(self, n: int) -> list[np.ndarray]:
        span = [self.basis_vector(i) for i in range(1, self.dim)]
        cur = _independent(span)
        for _ in range(n - 1):
            nxt = []
            for v in cur:
                for i in range(1, self.dim):
                    nxt.append(self.multiply(v, self.basis_vector(i)))
            cur = _independent(nxt)
        return cur

    def socle(self) -> list[np.ndarray]:
        """Basis of {x in maximal ideal : x * maximal ideal = 0}, full coordinates."""
        rows = []
        for i in range(1, self.dim):
            Mi = self.mult[i, :, :]  # multiplication by e_i: rows j, cols k
            rows.append(np.array([[Mi[j, k] for j in range(1, self.dim)]
                                  for k in range(self.dim)], dtype=object))
        # unknowns: coefficients x_1..x_{dim-1}; constraints over all i, k
        big = np.vstack(rows) if rows else gzeros(0, self.dim - 1)
        out = []
        for v in nullspace(big):
            full = self.zero()
            full[1:] = v
            out.append(full)
        return out

    def is_unit(self, x: np.ndarray) -> tuple[bool, np.ndarray | None]:
        """Unit test and exact inverse by the finite geometric series."""
        a = x[0]
        if not a:
            return False, None
        n = self.zero()
        for i in range(1, self.dim):
            n[i] = x[i] / a
        inv = self.unit()
        term = self.unit()
        sign = -1
        for _ in range(1, self.dim + 1):
            term = self.multiply(term, n)
            if not any(bool(v) for v in term):
                break
            inv = inv + term * GaussRat.of(sign)
            sign = -sign
        return True, inv * (ONE / a)

    def to_json(self) -> dict:
        return {
            "base": self.base,
            "dim": self.dim,
            "names": self.names,
            "mult": [[[self.mult[i, j, k].to_json() for k in range(self.dim)]
                      for j in range(self.dim)] for i in range(self.dim)],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ArtinAlgebra":
        return cls(doc["base"], doc["mult"], names=doc.get("names"))


def _independent(vectors: list[np.ndarray]) -> list[np.ndarray]:
    """A maximal independent subset (exact)."""
    out: list[np.ndarray] = []
    for v in vectors:
        if not any(bool(x) for x in v):
            continue
        if not out:
            out.append(v)
            continue
        M = np.vstack(out + [v])
        if rank(M) > len(out):
            out.append(v)
    return out


# -- constructions ------------------------------------------------------------


def truncated_poly(k: int, base: str = "C") -> ArtinAlgebra:
    """K[t]/(t^{k+1}) with basis 1, t, .., t^k."""
    if k < 0:
        raise ArtinError("k must be >= 0")
    d = k + 1
    mult = [[[0] * d for _ in range(d)] for _ in range(d)]
    for i in range(d):
        for j in range(d):
            if i + j < d:
                mult[i][j][i + j] = 1
    names = ["1"] + [f"t^{i}" if i > 1 else "t" for i in range(1, d)]
    return ArtinAlgebra(base, mult, names=names)


def poly_with_eps(k: int, base: str = "C") -> ArtinAlgebra:
    """K[t, eps]/(t^{k+1}, eps^2): basis t^0..t^k, eps t^0..eps t^k."""
    if k < 0:
        raise ArtinError("k must be >= 0")
    d = 2 * (k + 1)

    def idx(i: int, e: int) -> int:
        return i + (k + 1) * e

    mult = [[[0] * d for _ in range(d)] for _ in range(d)]
    for i in range(k + 1):
        for ei in range(2):
            for j in range(k + 1):
                for ej in range(2):
                    if i + j <= k and ei + ej <= 1:
                        mult[idx(i, ei)][idx(j, ej)][idx(i + j, ei + ej)] = 1
    names = [f"t^{i}" for i in range(k + 1)] + [f"eps*t^{i}" for i in range(k + 1)]
    names[0] = "1"
    if k >= 1:
        names[1] = "t"
    names[k + 1] = "eps"
    return ArtinAlgebra(base, mult, names=names)


def complexify(A: ArtinAlgebra) -> ArtinAlgebra:
    """Base change R -> C; same structure constants, invariants re-verified."""
    if A.base != "R":
        raise ArtinError("complexify expects a real algebra")
    return ArtinAlgebra("C", A.mult, names=list(A.names))


@dataclass
class AlgebraHom:
    """Unital algebra homomorphism given by basis images (columns)."""

    source: ArtinAlgebra
    target: ArtinAlgebra
    matrix: np.ndarray  # (target.dim, source.dim) object array

    def apply(self, x: np.ndarray) -> np.ndarray:
        out = self.target.zero()
        for j in range(self.source.dim):
            if x[j]:
                for i in range(self.target.dim):
                    if self.matrix[i, j]:
                        out[i] = out[i] + x[j] * self.matrix[i, j]
        return out

    def compose(self, inner: "AlgebraHom") -> "AlgebraHom":
        if inner.target.dim != self.source.dim:
            raise ArtinError("composition mismatch")
        return AlgebraHom(inner.source, self.target, matmul(self.matrix, inner.matrix))

    def is_homomorphism(self) -> bool:
        A, B = self.source, self.target
        img_unit = self.apply(A.unit())
        if any(img_unit[i] != (ONE if i == 0 else ZERO) for i in range(B.dim)):
            return False
        for i in range(A.dim):
            for j in range(i, A.dim):
                lhs = self.apply(A.multiply(A.basis_vector(i), A.basis_vector(j)))
                rhs = B.multiply(self.apply(A.basis_vector(i)), self.apply(A.basis_vector(j)))
                if any(lhs[s] != rhs[s] for s in range(B.dim)):
                    return False
        return True

    def is_surjective(self) -> bool:
        return rank(self.matrix) == self.target.dim


def hom_from_images(source: ArtinAlgebra, target: ArtinAlgebra, images) -> AlgebraHom:
    M = gzeros(target.dim, source.dim)
    for j, img in enumerate(images):
        for i in range(target.dim):
            M[i, j] = GaussRat.of(img[i])
    h = AlgebraHom(source, target, M)
    if not h.is_homomorphism():
        raise ArtinError("images do not define an algebra homomorphism")
    return h


@dataclass
class SmallExtension:
    """0 -> (eps) -> A -> B -> 0 with (eps) * maximal_ideal = 0."""

    algebra: ArtinAlgebra
    eps: np.ndarray
    quotient: ArtinAlgebra
    projection: AlgebraHom


def small_extension(A: ArtinAlgebra, eps) -> SmallExtension:
    """Quotient by a principal socle ideal; errors when eps is not in the socle."""
    eps_v = A.element(eps) if not isinstance(eps, np.ndarray) else eps
    if not any(bool(v) for v in eps_v):
        raise ArtinError("eps must be nonzero")
    if eps_v[0]:
        raise ArtinError("eps must lie in the maximal ideal")
    for i in range(1, A.dim):
        prod = A.multiply(eps_v, A.basis_vector(i))
        if any(bool(v) for v in prod):
            raise ArtinError(
                f"eps is not in the socle: eps * {A.names[i]} != 0"
            )
    # basis of A/(eps): unit + complement of eps inside the ideal
    ideal = [A.basis_vector(i) for i in range(1, A.dim)]
    comp = []
    cur = [eps_v]
    for v in ideal:
        M = np.vstack(cur + [v])
        if rank(M) > len(cur):
            cur.append(v)
            comp.append(v)
    new_basis = [A.unit()] + comp
    T = np.vstack(new_basis + [eps_v]).T  # old coords of (new basis, eps)
    d_new = len(new_basis)

    def project(x: np.ndarray) -> np.ndarray:
        coords = solve(T, x)
        if coords is None:
            raise ArtinError("projection failed (basis inconsistency)")
        return coords[:d_new]

    mult = [[[ZERO] * d_new for _ in range(d_new)] for _ in range(d_new)]
    for i in range(d_new):
        for j in range(d_new):
            pr = project(A.multiply(new_basis[i], new_basis[j]))
            for k in range(d_new):
                mult[i][j][k] = pr[k]
    B = ArtinAlgebra(A.base, mult, names=["1"] + [f"q{i}" for i in range(1, d_new)])
    P = gzeros(d_new, A.dim)
    for j in range(A.dim):
        pr = project(A.basis_vector(j))
        for i in range(d_new):
            P[i, j] = pr[i]
    proj = AlgebraHom(A, B, P)
    if not proj.is_homomorphism():
        raise ArtinError("quotient projection is not a homomorphism")
    return SmallExtension(A, eps_v, B, proj)


@dataclass
class FiberProduct:
    algebra: ArtinAlgebra
    embed: np.ndarray       # (dim A + dim B, dim D): basis of the subalgebra
    proj_a: AlgebraHom
    proj_b: AlgebraHom


def fiber_product(f: AlgebraHom, g: AlgebraHom) -> FiberProduct:
    """A x_C B = {(a, b) : f(a) = g(b)} as an Artin local algebra."""
    if f.target.dim != g.target.dim:
        raise ArtinError("homomorphisms must share the target")
    if not f.is_homomorphism() or not g.is_homomorphism():
        raise ArtinError("fiber product needs algebra homomorphisms")
    A, B, C = f.source, g.source, f.target
    cons = gzeros(C.dim, A.dim + B.dim)
    cons[:, : A.dim] = f.matrix
    cons[:, A.dim :] = -1 * g.matrix
    basis = nullspace(cons)
    d = len(basis)
    if d == 0:
        raise ArtinError("empty fiber product")
    # reorder so the first basis vector is the unit (1_A, 1_B)
    unit = np.concatenate([A.unit(), B.unit()])
    T = np.vstack(basis).T
    if solve(T, unit) is None:
        raise ArtinError("unit is missing from the fiber product (maps not unital?)")
    basis = _basis_with_unit_first(basis, unit)
    T = np.vstack(basis).T

    def mult_pair(x, y):
        xa, xb = x[: A.dim], x[A.dim :]
        ya, yb = y[: A.dim], y[A.dim :]
        return np.concatenate([A.multiply(xa, ya), B.multiply(xb, yb)])

    mult = [[[ZERO] * d for _ in range(d)] for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            prod = mult_pair(basis[i], basis[j])
            coords = solve(T, prod)
            if coords is None:
                raise ArtinError("fiber product not closed under multiplication")
            for k in range(d):
                mult[i][j][k] = coords[k]
                mult[j][i][k] = coords[k]
    D = ArtinAlgebra(A.base, mult, names=[f"u{i}" if i else "1" for i in range(d)])
    PA = gzeros(A.dim, d)
    PB = gzeros(B.dim, d)
    for j, b in enumerate(basis):
        for i in range(A.dim):
            PA[i, j] = b[i]
        for i in range(B.dim):
            PB[i, j] = b[A.dim + i]
    return FiberProduct(D, np.vstack(basis).T, AlgebraHom(D, A, PA), AlgebraHom(D, B, PB))


def _basis_with_unit_first(basis: list[np.ndarray], unit: np.ndarray) -> list[np.ndarray]:
    """Change basis so the unit is the first vector and the rest lie in the ideal.

    Subtracting each vector's unit-coordinate multiple of the unit puts the
    remaining vectors inside the kernel of the two unit-component functionals.
    """
    T = np.vstack(basis).T
    coords = solve(T, unit)
    out = [unit]
    # pick basis vectors independent from the unit, shifted into the ideal
    pivot = next(i for i, c in enumerate(coords) if c)
    for i, b in enumerate(basis):
        if i == pivot:
            continue
        shift = b - unit * b[0]  # kill the A-side unit component
        out.append(shift)
    # re-check independence; fall back to raw complement when degenerate
    if rank(np.vstack(out)) != len(basis):
        out = [unit] + [b for i, b in enumerate(basis) if i != pivot]
    return out


# -- truncated-polynomial lift maps --------------------------------------------


@dataclass(frozen=True)
class LiftMaps:
    """pi_k: A_k -> A_{k-1}; theta_k: A_k -> A_{k-1}[eps] (t -> t + eps);
    varpi_k: A_k[eps] -> A_{k-1}[eps] (natural projection)."""

    k: int
    a_k: ArtinAlgebra
    a_km1: ArtinAlgebra
    a_k_eps: ArtinAlgebra
    a_km1_eps: ArtinAlgebra
    pi: AlgebraHom
    theta: AlgebraHom
    varpi: AlgebraHom


def t1_lift_maps(k: int) -> LiftMaps:
    if k < 1:
        raise ArtinError("k must be >= 1")
    a_k = truncated_poly(k)
    a_km1 = truncated_poly(k - 1)
    a_k_eps = poly_with_eps(k)
    a_km1_eps = poly_with_eps(k - 1)

    # pi_k: t^j -> t^j (j < k), t^k -> 0
    P = gzeros(k, k + 1)
    for j in range(k):
        P[j, j] = ONE
    pi = AlgebraHom(a_k, a_km1, P)

    # theta_k: t^j -> t^j + j t^{j-1} eps, truncated at t^k = 0 in A_{k-1}[eps]
    TH = gzeros(2 * k, k + 1)
    for j in range(k + 1):
        if j < k:
            TH[j, j] = ONE
        if 1 <= j and j - 1 < k:
            TH[k + (j - 1), j] = GaussRat.of(j)
    theta = AlgebraHom(a_k, a_km1_eps, TH)

    # varpi_k: t^i eps^e -> same monomial, dropping t^k
    V = gzeros(2 * k, 2 * (k + 1))
    for i in range(k):
        V[i, i] = ONE
        V[k + i, (k + 1) + i] = ONE
    varpi = AlgebraHom(a_k_eps, a_km1_eps, V)

    for name, h in (("pi", pi), ("theta", theta), ("varpi", varpi)):
        if not h.is_homomorphism():
            raise ArtinError(f"{name}_{k} failed the homomorphism check")
    return LiftMaps(k, a_k, a_km1, a_k_eps, a_km1_eps, pi, theta, varpi)


# -- finite modules over K[t]/(t^{k+1}) -----------------------------------------


class FiniteModule:
    """Finitely generated module over K[t]/(t^{k+1}) by its t-action matrix."""

    def __init__(self, k: int, t_action, check: bool = True):
        self.k = k
        T = np.asarray(t_action, dtype=object)
        self.rank = T.shape[0]
        self.T = gmat([[T[i, j] for j in range(self.rank)] for i in range(self.rank)])
        if check:
            power = geye(self.rank)
            for _ in range(k + 1):
                power = matmul(power, self.T)
            if any(bool(v) for v in power.ravel()):
                raise ArtinError(f"t^{k+1} does not annihilate the module")

    def action_of_power(self, j: int) -> np.ndarray:
        out = geye(self.rank)
        for _ in range(j):
            out = matmul(out, self.T)
        return out


def _shift_matrix(k: int) -> np.ndarray:
    S = gzeros(k + 1, k + 1)
    for i in range(k):
        S[i + 1, i] = ONE
    return S


def module_dual(M: FiniteModule) -> tuple[FiniteModule, list[np.ndarray]]:
    """Hom over K[t]/(t^{k+1}) into the algebra, with its t-action.

    A homomorphism is a (k+1) x rank matrix F (columns: images in the algebra
    basis 1..t^k) with F T = S F, S the t-shift.  Returns the dual module and
    the hom basis used as its coordinates.
    """
    k, r = M.k, M.rank
    S = _shift_matrix(k)
    n = (k + 1) * r
    cons = gzeros(n, n)
    # vec(F) row-major: F[a, b] at a*r + b;  (F T - S F)[a, b] = 0
    for a in range(k + 1):
        for b in range(r):
            row = a * r + b
            for c in range(r):
                if M.T[c, b]:
                    cons[row, a * r + c] = cons[row, a * r + c] + M.T[c, b]
            for c in range(k + 1):
                if S[a, c]:
                    cons[row, c * r + b] = cons[row, c * r + b] - S[a, c]
    basis_vecs = nullspace(cons)
    s = len(basis_vecs)
    homs = [v.reshape(k + 1, r) for v in basis_vecs]
    if s == 0:
        return FiniteModule(k, gzeros(0, 0), check=False), homs
    # t-action on Hom: (t f)(v) = t f(v) = S F
    B = np.vstack(basis_vecs).T
    Tdual = gzeros(s, s)
    for j, F in enumerate(homs):
        SF = matmul(S, F).reshape(-1)
        coords = solve(B, SF)
        if coords is None:
            raise ArtinError("dual t-action left the hom space")
        for i in range(s):
            Tdual[i, j] = coords[i]
    return FiniteModule(k, Tdual), homs


@dataclass(frozen=True)
class ReflexivityVerdict:
    reflexive: bool
    rank: int
    dual_rank: int
    double_dual_rank: int
    detail: str


def reflexivity_check(M: FiniteModule) -> ReflexivityVerdict:
    """Is the natural map into the double dual a module isomorphism?"""
    k, r = M.k, M.rank
    dual, homs = module_dual(M)
    ddual, dhoms = module_dual(dual)
    s, ss = dual.rank, ddual.rank
    if r == 0:
        return ReflexivityVerdict(s == 0 and ss == 0, r, s, ss, "zero module")
    # evaluation: v -> (f -> f(v)); in dual coordinates f = sum x_i homs[i],
    # ev_v takes x to sum x_i homs[i] v -- a hom from dual to the algebra.
    if ss != r:
        return ReflexivityVerdict(False, r, s, ss, "double dual has different rank")
    B = np.vstack([h.reshape(-1) for h in dhoms]).T if dhoms else gzeros(0, 0)
    ev = gzeros(ss, r)
    for b in range(r):
        # F_ev[a, i] = (homs[i] @ e_b)[a] = homs[i][a, b]
        F = gzeros(k + 1, s)
        for i, H in enumerate(homs):
            for a in range(k + 1):
                F[a, i] = H[a, b]
        coords = solve(B, F.reshape(-1))
        if coords is None:
            return ReflexivityVerdict(False, r, s, ss, "evaluation map not in double dual")
        for i in range(ss):
            ev[i, b] = coords[i]
    # module map: ev T = T** ev
    lhs = matmul(ev, M.T)
    rhs = matmul(ddual.T, ev)
    if any((lhs[i, j] != rhs[i, j]) for i in range(ss) for j in range(r)):
        return ReflexivityVerdict(False, r, s, ss, "evaluation does not commute with t")
    bij = rank(ev) == r
    return ReflexivityVerdict(bij, r, s, ss,
                              "bijective evaluation" if bij else "evaluation not bijective")


def _unit_col(n: int, i: int) -> np.ndarray:
    v = gzeros(n, 1)
    v[i, 0] = ONE
    return v


def random_nilpotent(rng, r: int, k: int) -> np.ndarray:
    """Integer matrix with T^(k+1) = 0: unimodular conjugate of Jordan-like blocks.

    The conjugating matrix and its inverse are tracked exactly (Python ints),
    so the result is exact and the nilpotency order is at most k+1.
    """
    T = np.zeros((r, r), dtype=object)
    pos = 0
    while pos < r:
        size = int(rng.integers(1, min(k + 1, r - pos) + 1))
        for i in range(size - 1):
            T[pos + i, pos + i + 1] = int(rng.integers(-2, 3))
        pos += size
    U = np.eye(r, dtype=object)
    Uinv = np.eye(r, dtype=object)
    for _ in range(2 * r):
        i, j = (int(x) for x in rng.integers(0, r, size=2))
        if i == j:
            continue
        c = int(rng.integers(-2, 3))
        E = np.eye(r, dtype=object)
        E[i, j] = c
        Einv = np.eye(r, dtype=object)
        Einv[i, j] = -c
        U = U @ E
        Uinv = Einv @ Uinv
    return U @ T @ Uinv


def module_hom_dual(M: FiniteModule, N: FiniteModule, phi: np.ndarray):
    """Transpose of a module map under duality: phi*: N* -> M*, f -> f . phi."""
    dual_M, homs_M = module_dual(M)
    dual_N, homs_N = module_dual(N)
    BM = np.vstack([h.reshape(-1) for h in homs_M]).T if homs_M else gzeros(0, 0)
    out = gzeros(dual_M.rank, dual_N.rank)
    for j, F in enumerate(homs_N):
        comp = matmul(F, phi)  # (k+1) x rank(M)
        coords = solve(BM, comp.reshape(-1))
        if coords is None:
            raise ArtinError("dualized map left the hom space")
        for i in range(dual_M.rank):
            out[i, j] = coords[i]
    return out


# -- JSON schemas ----------------------------------------------------------------


def algebra_to_json(A: ArtinAlgebra) -> dict:
    return A.to_json()


def module_to_json(M: FiniteModule) -> dict:
    return {
        "k": M.k,
        "rank": M.rank,
        "t_action": [[M.T[i, j].to_json() for j in range(M.rank)] for i in range(M.rank)],
    }


def module_from_json(doc: dict) -> FiniteModule:
    T = [[GaussRat.of(v) for v in row] for row in doc["t_action"]]
    return FiniteModule(int(doc["k"]), np.array(T, dtype=object) if T else np.empty((0, 0), dtype=object))
