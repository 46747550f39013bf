"""Whitney-form local mass matrices: compiled kernel with numpy fallback.

For a d-simplex with barycentric functions lambda_i, the Whitney form of a
p-face (i_0..i_p) is p! * sum_k (-1)^k lambda_{i_k} d lambda_{i_0} ^ ... ^
(omit k) ... ^ d lambda_{i_p}.  Its L2 pairing over the simplex reduces to
barycentric moment integrals times Gram minors of the gradient inner products:

    <W_a, W_b> = (p!)^2 sum_{k,l} (-1)^{k+l} I[a_k, b_l] * det G[a-hat-k, b-hat-l]

with I[x, y] = vol * (1 + delta_xy) / ((d+1)(d+2)) and G[i, j] = grad_i . grad_j.

The Cython implementation (conelab._whitney_cy) is preferred when importable;
set CONELAB_PURE=1 to force the numpy path. Both produce identical output.
"""
from __future__ import annotations

import itertools
import math
import os

import numpy as np

try:
    from . import _whitney_cy as _compiled
except ImportError:  # extension not built
    _compiled = None

HAVE_COMPILED = _compiled is not None


def active_backend() -> str:
    if HAVE_COMPILED and os.environ.get("CONELAB_PURE", "") != "1":
        return "compiled"
    return "numpy"


def simplex_volumes(coords: np.ndarray) -> np.ndarray:
    """Unsigned volumes of a batch of simplices, coords (T, d+1, D), D >= d."""
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    d = coords.shape[1] - 1
    E = coords[:, 1:, :] - coords[:, :1, :]
    det = np.linalg.det(np.einsum("tid,tjd->tij", E, E))
    return np.sqrt(np.abs(det)) / math.factorial(d)


def simplex_geometry(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Volumes and barycentric gradients for a batch of simplices.

    coords: (T, d+1, D) with D >= d. Returns (vol (T,), grads (T, d+1, D)).
    Degenerate simplices make the edge Gram singular; callers are expected to
    screen volumes first.
    """
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    T, V, D = coords.shape
    d = V - 1
    E = coords[:, 1:, :] - coords[:, :1, :]  # (T, d, D)
    G0 = np.einsum("tid,tjd->tij", E, E)  # edge Gram
    det = np.linalg.det(G0)
    vol = np.sqrt(np.abs(det)) / math.factorial(d)
    Gi = np.linalg.solve(G0, E)  # (T, d, D): gradients of lambda_1..lambda_d
    grads = np.concatenate([-Gi.sum(axis=1, keepdims=True), Gi], axis=1)
    return vol, grads


def face_index_table(d: int, p: int) -> np.ndarray:
    """Local p-faces of a d-simplex as an (F, p+1) int32 array, lexicographic."""
    return np.array(list(itertools.combinations(range(d + 1), p + 1)), dtype=np.int32)


def local_mass(coords: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-simplex Whitney mass blocks.

    coords: (T, d+1, D). Returns (blocks (T, F, F), faces (F, p+1)) where F is
    the number of local p-faces in lexicographic order.
    """
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    d = coords.shape[1] - 1
    if not 0 <= p <= d:
        raise ValueError(f"degree {p} out of range 0..{d}")
    faces = face_index_table(d, p)
    if HAVE_COMPILED and os.environ.get("CONELAB_PURE", "") != "1":
        return np.asarray(_compiled.local_mass(coords, faces, p)), faces
    return _local_mass_numpy(coords, faces, p), faces


def _local_mass_numpy(coords: np.ndarray, faces: np.ndarray, p: int) -> np.ndarray:
    T, V, _ = coords.shape
    d = V - 1
    F = faces.shape[0]
    vol, grads = simplex_geometry(coords)
    G = np.einsum("tid,tjd->tij", grads, grads)  # (T, V, V)
    moment = (np.ones((V, V)) + np.eye(V)) / ((d + 1) * (d + 2))
    out = np.zeros((T, F, F))
    pf2 = float(math.factorial(p)) ** 2
    for a in range(F):
        fa = faces[a]
        for b in range(a, F):
            fb = faces[b]
            acc = np.zeros(T)
            for k in range(p + 1):
                ra = np.delete(fa, k)
                for l in range(p + 1):
                    rb = np.delete(fb, l)
                    if p == 0:
                        minor = np.ones(T)
                    else:
                        minor = np.linalg.det(G[:, ra[:, None], rb[None, :]])
                    acc += ((-1) ** (k + l)) * moment[fa[k], fb[l]] * minor
            val = pf2 * acc * vol
            out[:, a, b] = val
            out[:, b, a] = val
    return out
