"""Built-in link meshes with known spectra and homology.

Round spheres come from boundary simplices or icosahedral subdivision; flat
tori use the Freudenthal (Kuhn) cube triangulation with per-simplex unwrapped
charts, so the metric is exactly flat with circumference 2*pi per factor and
the continuum eigenvalues are integer lattice norms |k|^2. Products are
staircase (shuffle) triangulations, metrically the Riemannian product.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .mesh import MeshError, SimplicialComplex


def simplex_sphere(d: int) -> SimplicialComplex:
    """S^d as the boundary of a regular (d+1)-simplex inscribed in the unit sphere."""
    if d < 1:
        raise MeshError("sphere dimension must be >= 1")
    n = d + 2  # vertices
    # regular simplex: e_i in R^n projected to the sum-zero hyperplane, normalized
    pts = np.eye(n) - 1.0 / n
    q, _ = np.linalg.qr(pts.T[:, : n - 1])  # orthonormal basis of the hyperplane
    coords = pts @ q
    coords /= np.linalg.norm(coords, axis=1, keepdims=True)
    tops = list(itertools.combinations(range(n), n - 1))
    return SimplicialComplex(tops, coords=coords)


def icosphere(subdivisions: int = 2) -> SimplicialComplex:
    """S^2 by repeated midpoint subdivision of the icosahedron, projected to the sphere."""
    t = (1 + math.sqrt(5)) / 2
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    verts = [np.array(v, dtype=float) / np.linalg.norm(v) for v in verts]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    for _ in range(subdivisions):
        midpoint: dict[tuple[int, int], int] = {}

        def mid(i: int, j: int) -> int:
            key = (i, j) if i < j else (j, i)
            if key not in midpoint:
                v = verts[i] + verts[j]
                verts.append(v / np.linalg.norm(v))
                midpoint[key] = len(verts) - 1
            return midpoint[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    return SimplicialComplex(faces, coords=np.array(verts))


def circle(n: int = 8) -> SimplicialComplex:
    """S^1 as a regular n-gon of unit circumradius (PL circumference -> 2*pi)."""
    if n < 3:
        raise MeshError("circle needs at least 3 vertices")
    ang = 2 * math.pi * np.arange(n) / n
    coords = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    tops = [(i, (i + 1) % n) for i in range(n)]
    return SimplicialComplex(tops, coords=coords)


def freudenthal_torus(d: int, n: int) -> SimplicialComplex:
    """Flat torus T^d = R^d / (2*pi*Z)^d on an n^d grid, d <= 4.

    Each grid cube splits into d! simplices along vertex-order chains; the
    per-simplex charts carry the unwrapped (exactly flat) coordinates.
    """
    if not 1 <= d <= 4:
        raise MeshError("torus dimension must be 1..4")
    if n < 2 or (d >= 2 and n < 3):
        raise MeshError("grid too coarse for a simplicial torus")
    h = 2 * math.pi / n
    strides = np.array([n ** (d - 1 - i) for i in range(d)], dtype=np.int64)

    def vid(pt: np.ndarray) -> int:
        return int(((pt % n) * strides).sum())

    tops = []
    charts = []
    for base in itertools.product(range(n), repeat=d):
        base = np.array(base, dtype=np.int64)
        for perm in itertools.permutations(range(d)):
            pts = [base]
            cur = base
            for axis in perm:
                cur = cur.copy()
                cur[axis] += 1
                pts.append(cur)
            ids = np.array([vid(p) for p in pts])
            order = np.argsort(ids)
            tops.append(tuple(ids[order]))
            charts.append(h * np.array(pts, dtype=float)[order])
    coords = np.zeros((n**d, d))
    for base in itertools.product(range(n), repeat=d):
        coords[vid(np.array(base))] = h * np.array(base)
    return SimplicialComplex(tops, coords=coords, simplex_coords=np.array(charts))


def minimal_torus() -> SimplicialComplex:
    """The 7-vertex triangulation of T^2 (14 triangles, Euler characteristic 0)."""
    tops = []
    for i in range(7):
        tops.append(tuple(sorted(((i) % 7, (i + 1) % 7, (i + 3) % 7))))
        tops.append(tuple(sorted(((i) % 7, (i + 2) % 7, (i + 3) % 7))))
    # flat rhombic embedding is not isometric; homology-only mesh
    return SimplicialComplex(tops)


def simplicial_product(a: SimplicialComplex, b: SimplicialComplex) -> SimplicialComplex:
    """Staircase triangulation of |A| x |B| with the product metric.

    Vertices are pairs (u, v) indexed u * n_b + v; each pair of top simplices
    contributes one top simplex per monotone lattice path. Charts are carried
    through so periodic factors stay exactly flat.
    """
    da, db = a.dim, b.dim
    try:
        ca = a.top_coords()
        cb = b.top_coords()
    except MeshError:
        raise MeshError("simplicial_product needs coordinates on both factors")
    nb = b.n_vertices
    paths = list(_unique_paths(da, db))
    tops = []
    charts = []
    for ia, sa in enumerate(a.simplices[da]):
        for ib, sb in enumerate(b.simplices[db]):
            for path in paths:
                ids = np.array([sa[i] * nb + sb[j] for i, j in path])
                chart = np.array([np.concatenate([ca[ia][i], cb[ib][j]]) for i, j in path])
                order = np.argsort(ids)
                tops.append(tuple(ids[order]))
                charts.append(chart[order])
    coords = None
    if a.coords is not None and b.coords is not None:
        coords = np.zeros((a.n_vertices * nb, a.coords.shape[1] + b.coords.shape[1]))
        for u in range(a.n_vertices):
            for v in range(nb):
                coords[u * nb + v] = np.concatenate([a.coords[u], b.coords[v]])
    return SimplicialComplex(tops, coords=coords, simplex_coords=np.array(charts))


def _unique_paths(da: int, db: int):
    """Monotone lattice paths (0,0) -> (da,db); each gives one product simplex."""
    seen = set()
    for steps in itertools.permutations([0] * da + [1] * db):
        if steps in seen:
            continue
        seen.add(steps)
        path = [(0, 0)]
        i = j = 0
        for s in steps:
            if s == 0:
                i += 1
            else:
                j += 1
            path.append((i, j))
        yield path


def catalog_mesh(name: str, **kw) -> SimplicialComplex:
    """Named link meshes used throughout the test catalog."""
    if name == "t3":
        return freudenthal_torus(3, kw.get("n", 4))
    if name == "t2":
        return freudenthal_torus(2, kw.get("n", 6))
    if name == "s2":
        return icosphere(kw.get("subdivisions", 2))
    if name == "s3":
        return simplex_sphere(3)
    if name == "s5":
        return simplex_sphere(5)
    if name == "s2xs1":
        return simplicial_product(
            icosphere(kw.get("subdivisions", 1)), circle(kw.get("n", 8))
        )
    if name == "t2-minimal":
        return minimal_torus()
    raise MeshError(f"unknown catalog mesh '{name}'")
