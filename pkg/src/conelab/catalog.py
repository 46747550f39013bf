"""Singularity records and hypothesis checkers.

Covers the computable hypothesis layer for isolated quasi-homogeneous
singularities: the minimal exponent of a weighted-homogeneous hypersurface
(alpha = sum(weights)/degree, exact rational), the k-Du-Bois ladder
(alpha >= k+1), the projective-space twisted-form vanishing predicate, and
the two topology-flavoured theorem hypotheses (Betti vanishing for the link,
and the local second-cohomology condition settled only for toric Fano cones
and ordinary double points).
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

from .mesh import BettiHypothesisVerdict, BettiVector, betti, check_betti_hypothesis


class CatalogError(ValueError):
    """Invalid record or query."""


# -- minimal exponent and Du Bois ladder --------------------------------------


def minimal_exponent(weights, degree: int) -> Fraction:
    """alpha = (w_1 + ... + w_{n+1}) / d for reduced integer weight data."""
    w = [int(x) for x in weights]
    d = int(degree)
    if not w or any(x < 1 for x in w) or d < 1:
        raise CatalogError("weights and degree must be positive integers")
    if math.gcd(*w) != 1:
        raise CatalogError(f"weights {w} not reduced (gcd != 1)")
    return Fraction(sum(w), d)


def du_bois_level(alpha) -> int | None:
    """Largest k with alpha >= k+1, or None when alpha < 1."""
    a = Fraction(alpha) if not isinstance(alpha, Fraction) else alpha
    if a <= 0:
        raise CatalogError("minimal exponent must be positive")
    if a < 1:
        return None
    return int(math.floor(a - 1))


# -- projective-space vanishing -----------------------------------------------


@dataclass(frozen=True)
class BottQuery:
    """H^q of the twisted p-form sheaf on n-dimensional projective space."""

    n: int
    p: int
    q: int
    k: int

    def __post_init__(self):
        if not (0 <= self.p <= self.n and 0 <= self.q <= self.n):
            raise CatalogError("need 0 <= p, q <= n")


def bott_vanishes(query: BottQuery) -> bool:
    """True when H^q(P^n, Omega^p(k)) = 0 is guaranteed.

    Nonvanishing happens in exactly three cases: (i) k = 0 and p = q,
    (ii) q = 0 and k > p, (iii) q = n and k < p - n.
    """
    n, p, q, k = query.n, query.p, query.q, query.k
    case_i = k == 0 and p == q
    case_ii = q == 0 and k > p
    case_iii = q == n and k < p - n
    return not (case_i or case_ii or case_iii)


def twisted_form_euler_characteristic(n: int, p: int, k: int) -> int:
    """chi(Omega^p_{P^n}(k)), exact, via the twisted exterior-power recursion.

    chi(Omega^p(k)) = C(n+1, p) chi(O(k-p)) - chi(Omega^{p-1}(k)) with
    chi(O(j)) = prod_{i=1..n} (j+i) / n!.  Independent of the case predicate;
    used as a consistency oracle.
    """
    def chi_line(j: int) -> int:
        num = 1
        for i in range(1, n + 1):
            num *= j + i
        return num // math.factorial(n)

    if p < 0:
        return 0
    if p == 0:
        return chi_line(k)
    return math.comb(n + 1, p) * chi_line(k - p) - twisted_form_euler_characteristic(n, p - 1, k)


# -- singularity records --------------------------------------------------------


def odp_link_betti(n: int) -> BettiVector:
    """Betti numbers of the ordinary-double-point link (unit tangent bundle of S^n).

    Real coefficients: ones at degrees {0, 2n-1}, plus {n-1, n} when n is odd
    (trivial real Euler class).  In particular b_{n-2} = 0 for n >= 3.
    """
    if n < 2:
        raise CatalogError("ordinary double point needs n >= 2")
    dim = 2 * n - 1
    vals = [0] * (dim + 1)
    vals[0] = vals[dim] = 1
    if n % 2 == 1:
        vals[n - 1] += 1
        vals[n] += 1
    return BettiVector(tuple(vals), method="closed-form")


@dataclass
class SingularityRecord:
    """A named isolated singularity with optional weight and link data."""

    name: str
    kind: str  # 'weighted-homogeneous-hypersurface' | 'toric-fano-cone' | 'odp' | 'custom-link'
    n: int
    weights: tuple[int, ...] | None = None
    degree: int | None = None
    link_mesh: str | None = None
    betti: BettiVector | None = None
    provenance: str = ""

    KINDS = ("weighted-homogeneous-hypersurface", "toric-fano-cone", "odp", "custom-link")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise CatalogError(f"unknown kind '{self.kind}'")
        if self.kind == "weighted-homogeneous-hypersurface":
            if self.weights is None or self.degree is None:
                raise CatalogError("hypersurface records need weights and degree")
            minimal_exponent(self.weights, self.degree)  # validates gcd = 1
        if self.kind == "odp" and self.betti is None:
            self.betti = odp_link_betti(self.n)

    def minimal_exponent(self) -> Fraction:
        if self.kind == "odp":
            return Fraction(self.n + 1, 2)
        if self.weights is None or self.degree is None:
            raise CatalogError(f"record '{self.name}' has no weight data")
        return minimal_exponent(self.weights, self.degree)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "n": self.n,
            "weights": list(self.weights) if self.weights else None,
            "degree": self.degree,
            "link_mesh": self.link_mesh,
            "betti": list(self.betti) if self.betti is not None else None,
            "betti_method": self.betti.method if self.betti is not None else None,
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SingularityRecord":
        b = doc.get("betti")
        return cls(
            name=doc["name"], kind=doc["kind"], n=int(doc["n"]),
            weights=tuple(doc["weights"]) if doc.get("weights") else None,
            degree=doc.get("degree"), link_mesh=doc.get("link_mesh"),
            betti=BettiVector(tuple(b), method=doc.get("betti_method") or "stored")
            if b is not None else None,
            provenance=doc.get("provenance", ""),
        )


def link_betti_hypothesis(rec: SingularityRecord) -> BettiHypothesisVerdict:
    """Betti-vanishing hypothesis (b_{n-2} = 0 or b_{n-1} = 0) for the record's link."""
    if rec.betti is None:
        if rec.link_mesh:
            from .mesh import load_mesh

            rec.betti = betti(load_mesh(rec.link_mesh))
        else:
            raise CatalogError(
                f"record '{rec.name}' has no Betti data; provide a link mesh"
            )
    return check_betti_hypothesis(rec.betti, rec.n)


@dataclass(frozen=True)
class LocalCohomologyFlag:
    status: str  # 'satisfied' | 'violated' | 'unknown'
    reason: str
    evidence: list[dict] = field(default_factory=list)


def local_cohomology_flag_for(rec: SingularityRecord) -> LocalCohomologyFlag:
    """Local second-cohomology condition: settled families only, never extrapolated.

    Toric Fano cones with n >= 5 satisfy it; ordinary double points with
    n >= 3 violate it.  Everything else reports unknown.  The evidence field
    carries the projective-space vanishing instances supporting the settled
    cases for the record's dimension.
    """
    n = rec.n
    if rec.kind == "toric-fano-cone" and n >= 5:
        return LocalCohomologyFlag(
            "satisfied",
            "toric Fano cone with n >= 5: local cohomology vanishes",
            [],
        )
    if rec.kind == "odp" and n >= 3:
        evidence = []
        if n >= 4:
            evidence = [
                {
                    "query": {"n": n, "p": n - 1, "q": 1, "k": n - 3},
                    "vanishes": bott_vanishes(BottQuery(n, n - 1, 1, n - 3)),
                },
                {
                    "query": {"n": n, "p": n - 1, "q": 0, "k": n - 1},
                    "vanishes": bott_vanishes(BottQuery(n, n - 1, 0, n - 1)),
                },
            ]
        return LocalCohomologyFlag(
            "violated",
            "ordinary double point with n >= 3: the local first cohomology of the "
            "punctured neighbourhood in degree n-2 is nonzero",
            evidence,
        )
    return LocalCohomologyFlag("unknown", "no settled family covers this record", [])


# -- registry -------------------------------------------------------------------


def builtin_records() -> list[SingularityRecord]:
    recs = [
        SingularityRecord(
            name=f"odp-{n}fold", kind="odp", n=n,
            weights=tuple([1] * (n + 1)), degree=2,
            provenance="closed-form link topology (unit tangent bundle of the sphere)",
        )
        for n in range(2, 9)
    ]
    recs += [
        SingularityRecord(
            name="quartic-cone", kind="weighted-homogeneous-hypersurface", n=3,
            weights=(1, 1, 1, 1), degree=4,
            provenance="cone over a quartic surface",
        ),
        SingularityRecord(
            name="w123-d6", kind="weighted-homogeneous-hypersurface", n=2,
            weights=(1, 2, 3), degree=6,
            provenance="weighted-homogeneous surface singularity",
        ),
        SingularityRecord(
            name="toric-fano-cone-5", kind="toric-fano-cone", n=5,
            provenance="cone over a 4-dimensional toric Fano manifold",
        ),
        SingularityRecord(
            name="t5-link", kind="custom-link", n=3,
            betti=BettiVector((1, 5, 10, 10, 5, 1), method="closed-form"),
            provenance="5-torus link (binomial Betti numbers)",
        ),
        SingularityRecord(
            name="s2xs3-link", kind="custom-link", n=3,
            betti=BettiVector((1, 0, 1, 1, 0, 1), method="closed-form"),
            provenance="product of spheres (Kunneth)",
        ),
        SingularityRecord(
            name="s5-link", kind="custom-link", n=3,
            betti=BettiVector((1, 0, 0, 0, 0, 1), method="closed-form"),
            provenance="round five-sphere link",
        ),
    ]
    return recs


class Registry:
    """JSON-backed record store with atomic whole-file replace on write."""

    def __init__(self, path: str | None = None):
        self.path = path
        self.records: dict[str, SingularityRecord] = {
            r.name: r for r in builtin_records()
        }
        if path and os.path.exists(path):
            with open(path) as fh:
                for doc in json.load(fh)["records"]:
                    rec = SingularityRecord.from_json(doc)
                    self.records[rec.name] = rec

    def get(self, name: str) -> SingularityRecord:
        if name not in self.records:
            raise CatalogError(f"unknown record '{name}'")
        return self.records[name]

    def add(self, rec: SingularityRecord) -> None:
        self.records[rec.name] = rec

    def save(self, path: str | None = None) -> None:
        path = path or self.path
        if not path:
            raise CatalogError("registry has no backing path")
        doc = {"records": [r.to_json() for r in sorted(self.records.values(), key=lambda r: r.name)]}
        dir_ = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(dir=dir_, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
        os.replace(tmp, path)
