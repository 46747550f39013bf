import os

import numpy as np
import pytest

from conelab import _whitney, dec, generators, mesh
from oracles import sphere_scalar_eigenvalues, torus_pform_eigenvalues, torus_scalar_eigenvalues


class TestAssembly:
    def test_mass_spd(self, hodge_s2):
        for M in hodge_s2.mass:
            np.linalg.cholesky(M.toarray())

    def test_dd_zero_exact(self, hodge_t3):
        h = hodge_t3
        for k in range(h.dim - 1):
            prod = h.d[k + 1] @ h.d[k]
            assert prod.nnz == 0 or np.abs(prod.data).max() == 0

    def test_adjointness(self, hodge_t3, hodge_s2, hodge_s2xs1):
        rng = np.random.default_rng(11)
        for h in (hodge_t3, hodge_s2, hodge_s2xs1):
            for k in range(h.dim):
                phi = rng.standard_normal(h.n_cochains(k))
                psi = rng.standard_normal(h.n_cochains(k + 1))
                lhs = h.inner(k + 1, h.apply_d(k, phi), psi)
                rhs = h.inner(k, phi, h.apply_delta(k + 1, psi))
                scale = h.norm(k, phi) * h.norm(k + 1, psi)
                assert abs(lhs - rhs) <= 1e-10 * scale

    def test_degenerate_simplex_rejected(self):
        # move one vertex of the tetrahedron onto an edge: face (0,1,3) flattens
        coords = np.array([
            [0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.5, 0.0, 0.0],
        ])
        cx = mesh.SimplicialComplex(
            [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)], coords=coords
        )
        with pytest.raises(dec.HodgeError, match="degenerate"):
            dec.build_hodge(cx)

    def test_lumped_star_spd(self, s2_sub2):
        h = dec.build_hodge(s2_sub2, star="lumped")
        for M in h.mass:
            d = M.diagonal()
            assert np.all(d > 0)
            assert M.nnz == len(d)

    def test_backend_parity(self, s2_sub2, t3_n4):
        if not _whitney.HAVE_COMPILED:
            pytest.skip("compiled kernel not built")
        for cx in (s2_sub2, t3_n4):
            tc = cx.top_coords()
            for p in range(cx.dim + 1):
                fast, faces = _whitney.local_mass(tc, p)
                os.environ["CONELAB_PURE"] = "1"
                try:
                    pure, _ = _whitney.local_mass(tc, p)
                finally:
                    del os.environ["CONELAB_PURE"]
                rel = np.abs(fast - pure).max() / max(np.abs(pure).max(), 1e-300)
                assert rel < 1e-11


class TestSpectra:
    def test_torus_scalar_oracle(self, hodge_t3):
        slice_ = dec.eigensolve(dec.laplacian(hodge_t3, 0), 8)
        want = torus_scalar_eigenvalues(3, 8)
        assert slice_.eigenvalues[0] < 1e-8
        # N=4 grid: generous first-order window around the |k|^2 = 1 shell
        assert np.all(np.abs(slice_.eigenvalues[1:7] - want[1:7]) < 0.35)

    def test_sphere_scalar_oracle(self):
        h = dec.build_hodge(generators.icosphere(3))
        slice_ = dec.eigensolve(dec.laplacian(h, 0), 4)
        want = sphere_scalar_eigenvalues(4)
        assert abs(slice_.eigenvalues[0]) < 1e-9
        assert np.all(np.abs(slice_.eigenvalues[1:] - 2.0) < 0.05 * 2.0)
        assert np.allclose(want[1:4], 2.0)

    def test_torus_one_forms_zero_modes(self, hodge_t3):
        slice_ = dec.eigensolve(dec.laplacian(hodge_t3, 1), 6)
        nz = dec.count_near_zero(slice_)
        assert nz.count == 3
        assert not nz.warning

    def test_top_degree_matches_continuum(self, hodge_t3):
        # p = dim and p = 0 discretize the same continuum spectrum
        want = torus_pform_eigenvalues(3, 0, 8)
        for p in (0, 3):
            slice_ = dec.eigensolve(dec.laplacian(hodge_t3, p), 8)
            assert abs(slice_.eigenvalues[0]) < 1e-8
            assert np.all(np.abs(slice_.eigenvalues[1:7] - want[1:7]) < 0.35)

    def test_empty_slice(self, hodge_s2):
        slice_ = dec.eigensolve(dec.laplacian(hodge_s2, 0), 0)
        assert len(slice_) == 0

    def test_too_many_modes(self, hodge_s3):
        with pytest.raises(dec.HodgeError, match="modes"):
            dec.eigensolve(dec.laplacian(hodge_s3, 0), 99)

    def test_degree_out_of_range(self, hodge_s2):
        with pytest.raises(dec.HodgeError):
            dec.laplacian(hodge_s2, 3)

    def test_residual_contract(self, hodge_s2xs1):
        slice_ = dec.eigensolve(dec.laplacian(hodge_s2xs1, 1), 6, tol=1e-8)
        assert np.all(slice_.residuals <= 1e-8)

    def test_unreachable_tolerance_carries_partial(self, hodge_s2):
        with pytest.raises(dec.SolverError) as err:
            dec.eigensolve(dec.laplacian(hodge_s2, 1), 4, tol=1e-16)
        partial = err.value.partial
        assert partial is not None and len(partial) == 4

    def test_sparse_dense_agree(self, hodge_s2xs1):
        pencil = dec.laplacian(hodge_s2xs1, 1)
        sparse = dec.eigensolve(pencil, 5, dense_cap=100)
        dense = dec.eigensolve(pencil, 5, dense_cap=10_000)
        assert sparse.meta["solver"] != dense.meta["solver"]
        assert np.allclose(sparse.eigenvalues, dense.eigenvalues, atol=1e-7)


class TestHodgeConsistency:
    def test_near_zero_equals_betti(self, hodge_t3, hodge_s2, hodge_s2xs1):
        cases = [
            (hodge_t3, [1, 3, 3, 1]),
            (hodge_s2, [1, 0, 1]),
            (hodge_s2xs1, [1, 1, 1, 1]),
        ]
        for h, betti in cases:
            for p, b in enumerate(betti):
                K = min(b + 5, h.n_cochains(p))
                slice_ = dec.eigensolve(dec.laplacian(h, p), K)
                assert slice_.eigenvalues.min() >= -1e-8  # Laplacians are PSD
                nz = dec.count_near_zero(slice_)
                assert nz.count == b, (p, nz)

    def test_gap_warning_not_silent(self):
        # an artificial spectrum without a visible gap must warn
        slice_ = dec.SpectrumSlice(
            blocks=[(0, 4)],
            eigenvalues=np.array([1e-9, 3e-9, 8e-9, 1.6e-8]),
            vectors=np.zeros((4, 4)),
            residuals=np.zeros(4),
            meta={},
        )
        nz = dec.count_near_zero(slice_, threshold=5e-9)
        assert nz.warning


class TestConvergence:
    def test_torus_refinement_first_order(self):
        errors = []
        for n in (4, 8, 16):
            h = dec.build_hodge(generators.freudenthal_torus(3, n))
            slice_ = dec.eigensolve(dec.laplacian(h, 0), 8)
            errors.append(abs(slice_.eigenvalues[1] - 1.0))
        assert errors[0] > errors[1] > errors[2]
        assert errors[0] / errors[1] >= 2.0
        assert errors[1] / errors[2] >= 2.0


def test_spectrum_report_shape(hodge_s2):
    slice_ = dec.eigensolve(dec.laplacian(hodge_s2, 1), 5)
    doc = dec.spectrum_report(slice_)
    assert doc["degree"] == 1
    assert len(doc["eigenvalues"]) == 5
    assert doc["near_zero_count"] == 0
    assert "solver" in doc
