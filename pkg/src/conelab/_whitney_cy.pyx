# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Whitney mass kernel: per-simplex loop over face pairs and Gram minors."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

DEF MAXV = 8    # vertices per simplex (d <= 7)
DEF MAXD = 16   # ambient dimension


cdef double det_ge(double* a, int n) nogil:
    # determinant by Gaussian elimination with partial pivoting; a is destroyed
    cdef int i, j, k, piv
    cdef double best, factor, tmp, det
    if n == 0:
        return 1.0
    if n == 1:
        return a[0]
    if n == 2:
        return a[0] * a[3] - a[1] * a[2]
    det = 1.0
    for k in range(n):
        piv = k
        best = fabs(a[k * n + k])
        for i in range(k + 1, n):
            if fabs(a[i * n + k]) > best:
                best = fabs(a[i * n + k])
                piv = i
        if best == 0.0:
            return 0.0
        if piv != k:
            det = -det
            for j in range(n):
                tmp = a[k * n + j]; a[k * n + j] = a[piv * n + j]; a[piv * n + j] = tmp
        det *= a[k * n + k]
        for i in range(k + 1, n):
            factor = a[i * n + k] / a[k * n + k]
            for j in range(k, n):
                a[i * n + j] -= factor * a[k * n + j]
    return det


cdef int solve_ge(double* A, double* B, int n, int m) nogil:
    # A (n x n) X = B (n x m), result in B; A is destroyed
    cdef int i, j, k, piv
    cdef double best, factor, tmp
    for k in range(n):
        piv = k
        best = fabs(A[k * n + k])
        for i in range(k + 1, n):
            if fabs(A[i * n + k]) > best:
                best = fabs(A[i * n + k])
                piv = i
        if best == 0.0:
            return -1
        if piv != k:
            for j in range(n):
                tmp = A[k * n + j]; A[k * n + j] = A[piv * n + j]; A[piv * n + j] = tmp
            for j in range(m):
                tmp = B[k * m + j]; B[k * m + j] = B[piv * m + j]; B[piv * m + j] = tmp
        for i in range(k + 1, n):
            factor = A[i * n + k] / A[k * n + k]
            for j in range(k, n):
                A[i * n + j] -= factor * A[k * n + j]
            for j in range(m):
                B[i * m + j] -= factor * B[k * m + j]
    for k in range(n - 1, -1, -1):
        for j in range(m):
            tmp = B[k * m + j]
            for i in range(k + 1, n):
                tmp -= A[k * n + i] * B[i * m + j]
            B[k * m + j] = tmp / A[k * n + k]
    return 0


def local_mass(double[:, :, ::1] coords, int[:, ::1] faces, int p):
    """Whitney mass blocks (T, F, F) for p-cochains; mirrors the numpy fallback."""
    cdef int T = coords.shape[0]
    cdef int V = coords.shape[1]
    cdef int D = coords.shape[2]
    cdef int d = V - 1
    cdef int F = faces.shape[0]
    cdef int q = p + 1
    if D > MAXD or V > MAXV:
        raise ValueError("simplex too large for the compiled kernel")

    cdef cnp.ndarray[cnp.float64_t, ndim=3] out_arr = np.zeros((T, F, F))
    cdef double[:, :, ::1] out = out_arr

    cdef double E[MAXV * MAXD]
    cdef double G0[MAXV * MAXV]
    cdef double work[MAXV * MAXV]
    cdef double Gi[MAXV * MAXD]
    cdef double g[MAXV * MAXD]
    cdef double G[MAXV * MAXV]
    cdef double minor_buf[MAXV * MAXV]
    cdef int ra[MAXV]
    cdef int rb[MAXV]
    cdef double vol, det, acc, sign, val, fact, mom, pf2, mom_base
    cdef int t, i, j, k, l, a, b, x, y, ii, jj
    cdef int bad = -1

    fact = 1.0
    for i in range(2, d + 1):
        fact *= i
    pf2 = 1.0
    for i in range(2, p + 1):
        pf2 *= i
    pf2 *= pf2
    mom_base = 1.0 / ((d + 1) * (d + 2))

    with nogil:
        for t in range(T):
            for i in range(d):
                for j in range(D):
                    E[i * D + j] = coords[t, i + 1, j] - coords[t, 0, j]
            for i in range(d):
                for j in range(d):
                    acc = 0.0
                    for k in range(D):
                        acc += E[i * D + k] * E[j * D + k]
                    G0[i * d + j] = acc
                    work[i * d + j] = acc
            det = det_ge(work, d)
            vol = sqrt(fabs(det)) / fact
            for i in range(d):
                for j in range(D):
                    Gi[i * D + j] = E[i * D + j]
            if solve_ge(G0, Gi, d, D) != 0:
                bad = t
                break
            for j in range(D):
                acc = 0.0
                for i in range(d):
                    acc += Gi[i * D + j]
                g[j] = -acc
            for i in range(d):
                for j in range(D):
                    g[(i + 1) * D + j] = Gi[i * D + j]
            for i in range(V):
                for j in range(V):
                    acc = 0.0
                    for k in range(D):
                        acc += g[i * D + k] * g[j * D + k]
                    G[i * V + j] = acc
            for a in range(F):
                for b in range(a, F):
                    val = 0.0
                    for k in range(q):
                        ii = 0
                        for x in range(q):
                            if x != k:
                                ra[ii] = faces[a, x]
                                ii += 1
                        for l in range(q):
                            jj = 0
                            for y in range(q):
                                if y != l:
                                    rb[jj] = faces[b, y]
                                    jj += 1
                            if p == 0:
                                acc = 1.0
                            else:
                                for x in range(p):
                                    for y in range(p):
                                        minor_buf[x * p + y] = G[ra[x] * V + rb[y]]
                                acc = det_ge(minor_buf, p)
                            sign = 1.0 if ((k + l) % 2 == 0) else -1.0
                            mom = vol * mom_base * (2.0 if faces[a, k] == faces[b, l] else 1.0)
                            val += sign * mom * acc
                    val *= pf2
                    out[t, a, b] = val
                    out[t, b, a] = val
    if bad >= 0:
        raise ValueError(f"degenerate simplex at index {bad}")
    return out_arr
