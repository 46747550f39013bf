import numpy as np
import pytest
import scipy.sparse as sp

from conelab import cone, dec
from oracles import torus3_block_eigenvalues


@pytest.fixture(scope="module")
def g_t3(hodge_t3):
    return cone.ConeGeometry(4, hodge_t3)


@pytest.fixture(scope="module")
def g_s3(hodge_s3):
    return cone.ConeGeometry(4, hodge_s3)


def form_norm(g, f):
    return np.hypot(g.link.norm(f.p - 1, f.phi_prime), g.link.norm(f.p, f.phi_double_prime))


def form_diff(g, a, b):
    assert a.p == b.p
    return np.hypot(
        g.link.norm(a.p - 1, a.phi_prime - b.phi_prime),
        g.link.norm(a.p, a.phi_double_prime - b.phi_double_prime),
    )


class TestConeOperators:
    def test_dimension_consistency(self, hodge_t3):
        with pytest.raises(cone.ConeError):
            cone.ConeGeometry(5, hodge_t3)

    def test_closed_form_derivative_vanishes(self, g_t3):
        # phi' = 0, phi'' closed, beta = 0 -> d phi = 0
        h = g_t3.link
        rng = np.random.default_rng(0)
        closed = h.apply_d(0, rng.standard_normal(h.n_cochains(0)))  # exact, hence closed
        f = cone.HomogeneousForm(1, 0.0, np.zeros(h.n_cochains(0)), closed)
        df = cone.cone_d(f, g_t3)
        assert form_norm(g_t3, df) < 1e-12 * (1 + np.linalg.norm(closed))

    def test_beta_one_components(self, g_t3):
        rng = np.random.default_rng(1)
        h = g_t3.link
        f = cone.HomogeneousForm(1, 1.0, np.zeros(h.n_cochains(0)),
                                 rng.standard_normal(h.n_cochains(1)))
        df = cone.cone_d(f, g_t3)
        assert np.allclose(df.phi_prime, f.phi_double_prime)
        assert np.allclose(df.phi_double_prime, h.apply_d(1, f.phi_double_prime))

    def test_block_matrix_oracle(self, g_t3):
        # cone_d agrees with the block matrix [[-d, beta], [0, d]]
        h = g_t3.link
        rng = np.random.default_rng(2)
        for p in (1, 2):
            beta = float(rng.uniform(-2, 2))
            n_q, n_p = h.n_cochains(p - 1), h.n_cochains(p)
            dq = h.d[p - 1]
            dp = h.d[p] if p < h.dim else sp.csr_matrix((h.n_cochains(p + 1), n_p))
            top = sp.hstack([-dq, beta * sp.eye(n_p)])
            bot = sp.hstack([sp.csr_matrix((dp.shape[0], n_q)), dp])
            f = cone.random_form(g_t3, p, beta, rng)
            df = cone.cone_d(f, g_t3)
            x = np.concatenate([f.phi_prime, f.phi_double_prime])
            assert np.allclose(np.concatenate([df.phi_prime, df.phi_double_prime]),
                               sp.vstack([top, bot]) @ x)

    def test_codifferential_middle_coefficient(self, g_t3):
        # beta = 2p - l kills the phi' transport term
        h = g_t3.link
        rng = np.random.default_rng(3)
        p = 2
        beta = float(2 * p - g_t3.l)
        f = cone.HomogeneousForm(p, beta, rng.standard_normal(h.n_cochains(p - 1)),
                                 np.zeros(h.n_cochains(p)))
        ds = cone.cone_dstar(f, g_t3)
        assert np.allclose(ds.phi_prime, -h.apply_delta(p - 1, f.phi_prime))
        assert np.allclose(ds.phi_double_prime, 0.0)

    def test_coclosed_annihilation(self, g_t3):
        # phi' = 0, phi'' co-closed, coefficient beta + l - 2p = 0 -> d* phi = 0
        h = g_t3.link
        rng = np.random.default_rng(4)
        p = 1
        coclosed = h.apply_delta(2, rng.standard_normal(h.n_cochains(2)))
        # delta^2 = 0 makes delta(coclosed cochain) = 0
        f = cone.HomogeneousForm(p, float(2 * p - g_t3.l),
                                 np.zeros(h.n_cochains(0)), coclosed)
        ds = cone.cone_dstar(f, g_t3)
        assert form_norm(g_t3, ds) < 1e-10 * (1 + np.linalg.norm(coclosed))

    def test_composition_identity(self, g_t3, g_s3, hodge_s2xs1):
        geoms = [g_t3, g_s3, cone.ConeGeometry(4, hodge_s2xs1)]
        rng = np.random.default_rng(5)
        for g in geoms:
            for _ in range(10):
                p = int(rng.integers(0, g.l + 1))
                beta = float(rng.uniform(-3, 3))
                f = cone.random_form(g, p, beta, rng)
                lhs = cone.cone_laplacian(f, g)
                rhs_a = cone.cone_dstar(cone.cone_d(f, g), g)
                rhs_b = cone.cone_d(cone.cone_dstar(f, g), g)
                rhs = cone.HomogeneousForm(
                    lhs.p, lhs.beta,
                    rhs_a.phi_prime + rhs_b.phi_prime,
                    rhs_a.phi_double_prime + rhs_b.phi_double_prime,
                )
                assert form_diff(g, lhs, rhs) <= 1e-10 * (1 + form_norm(g, lhs))

    def test_d_squared_zero(self, g_t3):
        rng = np.random.default_rng(6)
        for p in range(4):
            f = cone.random_form(g_t3, p, float(rng.uniform(-2, 2)), rng)
            dd = cone.cone_d(cone.cone_d(f, g_t3), g_t3)
            assert form_norm(g_t3, dd) < 1e-10 * (1 + form_norm(g_t3, f))

    def test_adjoint_at_conjugate_exponent(self, g_t3):
        # <d_beta f, psi> = <f, d*_(2+2p-l-beta) psi> in the link mass pairing
        h = g_t3.link
        rng = np.random.default_rng(7)
        for p in (0, 1, 2):
            beta = float(rng.uniform(-2, 2))
            f = cone.random_form(g_t3, p, beta, rng)
            psi = cone.random_form(g_t3, p + 1, 2 + 2 * p - g_t3.l - beta, rng)
            df = cone.cone_d(f, g_t3)
            lhs = (h.inner(p, df.phi_prime, psi.phi_prime)
                   + h.inner(p + 1, df.phi_double_prime, psi.phi_double_prime))
            dpsi = cone.cone_dstar(psi, g_t3)
            rhs = (h.inner(p - 1, f.phi_prime, dpsi.phi_prime)
                   + h.inner(p, f.phi_double_prime, dpsi.phi_double_prime))
            assert abs(lhs - rhs) <= 1e-9 * (1 + form_norm(g_t3, f) * form_norm(g_t3, psi))

    def test_constants_harmonic(self, g_t3):
        h = g_t3.link
        f = cone.HomogeneousForm(0, 0.0, np.zeros(0), np.ones(h.n_cochains(0)))
        lap = cone.cone_laplacian(f, g_t3)
        assert form_norm(g_t3, lap) < 1e-10

    def test_eigenvector_at_root_is_harmonic(self, g_t3):
        rep = cone.indicial_analysis(g_t3, 1, 8, with_windows=False)
        h = g_t3.link
        n_q = h.n_cochains(0)
        for datum in rep.indicial[:6]:
            if datum.alpha_root is None:
                continue
            v = rep.spectrum.vectors[:, datum.j]
            f = cone.HomogeneousForm(1, datum.alpha_root, v[:n_q], v[n_q:])
            lap = cone.cone_laplacian(f, g_t3)
            assert form_norm(g_t3, lap) < 1e-6 * (1 + form_norm(g_t3, f))


class TestBlockOperator:
    def test_symmetry(self, g_t3, g_s3):
        for g in (g_t3, g_s3):
            for p in range(g.l):
                pencil = cone.assemble_E(g, p)
                asym = abs(pencil.A - pencil.A.T).max()
                assert asym <= 1e-12 * max(abs(pencil.A).max(), 1.0)

    def test_p0_reduces_to_scalar_laplacian(self, g_t3, hodge_t3):
        pencil = cone.assemble_E(g_t3, 0)
        plain = dec.laplacian(hodge_t3, 0)
        assert abs(pencil.A - plain.A).max() < 1e-14

    def test_out_of_range(self, g_t3):
        with pytest.raises(cone.ConeError):
            cone.assemble_E(g_t3, 4)

    def test_torus_block_oracle(self, g_t3):
        rep = cone.indicial_analysis(g_t3, 1, 10, with_windows=False)
        want = torus3_block_eigenvalues(4, 1, 10)
        got = rep.spectrum.eigenvalues
        assert np.abs(got[:3]).max() < 1e-9          # ker E = b_1 = 3, exactly
        assert abs(got[3] - want[3]) < 0.35 * (1 + want[3])

    def test_torus_block_oracle_p3(self, g_t3):
        # harmonic 2-forms give eigenvalue 2l - 4p = -4 exactly
        rep = cone.indicial_analysis(g_t3, 3, 6, with_windows=False)
        got = rep.spectrum.eigenvalues
        want = torus3_block_eigenvalues(4, 3, 6)
        assert np.abs(got[:3] - want[:3]).max() < 1e-8  # the three -4 modes
        assert rep.boundary_modes == [0, 1, 2]

    def test_eigenvalue_floor(self, g_t3, g_s3, hodge_s5):
        # full catalog sweep lives in the acceptance suite
        geoms = [g_t3, g_s3, cone.ConeGeometry(6, hodge_s5)]
        for g in geoms:
            for p in range(1, g.l):
                n = g.link.n_cochains(p - 1) + g.link.n_cochains(p)
                rep = cone.indicial_analysis(g, p, min(8, n), with_windows=False)
                m = g.weight(p)
                floor = -(m * m) - 0.05 * (1 + m * m)
                assert rep.spectrum.eigenvalues.min() >= floor


class TestIndicial:
    def test_root_algebra(self, g_t3):
        rep = cone.indicial_analysis(g_t3, 2, 10, with_windows=False)
        for d in rep.indicial:
            r1, r2 = d.root_residuals(rep.m)
            assert r1 < 1e-12 and r2 < 1e-12

    def test_root_formula(self):
        # lambda = 0: roots {2m, 0}; m = 0, lambda = 4: roots +-2; complex branch
        for m in (-1.5, 0.0, 0.5, 2.0):
            roots = cone.indicial_roots(m, 0.0)
            assert roots == (max(2 * m, 0.0), min(2 * m, 0.0)) or roots == (2 * m, 0.0)
        assert cone.indicial_roots(0.0, 4.0) == (2.0, -2.0)
        assert cone.indicial_roots(1.0, -2.0) is None

    def test_zero_mode_orders_on_mesh(self, g_t3):
        # exact kernel at p = 1 (m = 0): double root 0, both orders equal -p
        rep = cone.indicial_analysis(g_t3, 1, 6, with_windows=False)
        zero = [d for d in rep.indicial if abs(d.lam) < 1e-9]
        assert len(zero) == 3
        for d in zero:
            assert abs(d.orders[0] + 1) < 1e-6 and abs(d.orders[1] + 1) < 1e-6

    def test_exceptional_orders_torus_p1(self, g_t3):
        rep = cone.indicial_analysis(g_t3, 1, 16, with_windows=False)
        orders = [o for o, _ in rep.exceptional_orders]
        assert min(abs(o - (-1.0)) for o in orders) < 1e-9
        assert min(abs(o - 0.0) for o in orders) < 0.1     # from lambda ~ 1 modes

    def test_resolved_interval(self, g_t3):
        rep = cone.indicial_analysis(g_t3, 1, 12, with_windows=False)
        lo, hi = rep.resolved_interval
        for o, _ in rep.exceptional_orders:
            assert lo - 1e-9 <= o <= hi + 1e-9

    def test_nolog_catalog(self, g_t3, g_s3, hodge_s2):
        # full catalog sweep lives in the acceptance suite
        geoms = [g_t3, g_s3, cone.ConeGeometry(3, hodge_s2)]
        for g in geoms:
            for p in range(g.l):
                n = g.link.n_cochains(p - 1) + g.link.n_cochains(p)
                rep = cone.indicial_analysis(g, p, min(10, n), with_windows=False)
                v = cone.nolog_verdict(rep, gap_tol=0.1)
                assert v.passed, (g.l, p, v)
                if abs(rep.m) < 1e-9 and any(
                    abs(l) < 1e-6 for l in rep.spectrum.eigenvalues
                ):
                    assert v.boundary_flagged

    def test_nolog_fails_on_uncertified_gap(self, g_t3):
        rep = cone.indicial_analysis(g_t3, 1, 8, with_windows=False)
        # shrink the tolerance so the genuine spectrum sits inside the gap window
        v = cone.nolog_verdict(rep, gap_tol=10.0)
        assert not v.passed

    def test_below_floor_quarantine(self, g_t3, hodge_t3):
        # inject a fabricated below-floor eigenvalue via a copied slice
        rep = cone.indicial_analysis(g_t3, 2, 6, with_windows=False)
        bad = [d for d in rep.indicial if d.below_floor]
        assert not bad  # clean mesh has none; floor handling is covered in unit form
        datum = cone.IndicialDatum(0, -99.0, None, None, (), below_floor=True)
        assert datum.root_residuals(rep.m) == (0.0, 0.0)


class TestWindows:
    def test_lower_degree_window_torus_p0(self, g_t3):
        rep = cone.indicial_analysis(g_t3, 0, 12)
        verdict = {w.name: w for w in rep.window_verdicts}["lower-degree-window"]
        assert verdict.applicable
        assert verdict.passed is True

    def test_zero_mode_structure_t3_p1(self, g_t3):
        rep = cone.indicial_analysis(g_t3, 1, 8)
        verdict = {w.name: w for w in rep.window_verdicts}["order-minus-p-structure"]
        assert verdict.applicable and verdict.passed

    def test_dual_order_skipped_when_betti_nonzero(self, g_t3):
        rep = cone.indicial_analysis(g_t3, 1, 8)
        verdict = {w.name: w for w in rep.window_verdicts}["dual-order-vanishing"]
        assert not verdict.applicable

    def test_dual_order_on_sphere(self, g_s3):
        rep = cone.indicial_analysis(g_s3, 1, 8)
        verdict = {w.name: w for w in rep.window_verdicts}["dual-order-vanishing"]
        assert verdict.applicable and verdict.passed

    def test_gradient_relation_checked_on_torus_p3(self, g_t3):
        # orders inside (-p, p-l) exist at p = 3 and satisfy d phi' = (2+p-l-a) phi''
        rep = cone.indicial_analysis(g_t3, 3, 12)
        verdict = {w.name: w for w in rep.window_verdicts}["interior-gradient-relation"]
        assert verdict.applicable
        assert verdict.passed is True
        assert "0 mode" not in verdict.detail

    def test_upper_degree_window_s5(self, hodge_s5):
        g = cone.ConeGeometry(6, hodge_s5)
        rep = cone.indicial_analysis(g, 5, 12)
        verdict = {w.name: w for w in rep.window_verdicts}["upper-degree-window"]
        assert verdict.applicable
        assert verdict.passed is True


class TestDiagonalization:
    def test_reference_case(self):
        assert cone.check_diagonalization(1, 6, 2) < 1e-10

    def test_random_samples(self):
        rng = np.random.default_rng(1)
        worst = 0.0
        n = 0
        while n < 1000:
            beta = float(rng.uniform(-4, 4))
            l = int(rng.integers(2, 9))
            p = int(rng.integers(0, l + 1))
            if abs(2 * beta + l - 2 - 2 * p) < 0.05:
                continue
            worst = max(worst, cone.check_diagonalization(beta, l, p))
            n += 1
        assert worst < 1e-10

    def test_singular_line(self):
        with pytest.raises(cone.ConeError, match="singular"):
            cone.check_diagonalization((2 + 2 * 2 - 6) / 2, 6, 2)

    def test_symbolic_identity(self):
        sympy = pytest.importorskip("sympy")
        b, l, p = sympy.symbols("b l p")
        M, P, D = cone.diagonalization_matrices(b, l, p)
        Ms = sympy.Matrix(2, 2, lambda i, j: M[i, j])
        Ps = sympy.Matrix(2, 2, lambda i, j: P[i, j])
        Ds = sympy.Matrix(2, 2, lambda i, j: D[i, j])
        assert sympy.simplify(Ps.inv() * Ms * Ps - Ds) == sympy.zeros(2, 2)


class TestFredholm:
    def test_windows_partition(self, g_t3):
        rep = cone.indicial_analysis(g_t3, 1, 16, with_windows=False)
        wins = cone.fredholm_windows(rep, (-1.5, -0.5))
        assert wins[0].lo == -1.5 and wins[-1].hi == -0.5
        cuts = [w.hi for w in wins[:-1]]
        orders = [o for o, _ in rep.exceptional_orders]
        for c in cuts:
            assert min(abs(c - o) for o in orders) < 1e-9
        for w in wins:
            for o in orders:
                assert not (w.lo + 1e-12 < o < w.hi - 1e-12)

    def test_single_window_when_empty(self, g_s3):
        rep = cone.indicial_analysis(g_s3, 0, 5, with_windows=False)
        wins = cone.fredholm_windows(rep, (-1.9, -0.1))
        assert len(wins) == 1
        assert "kernel" in wins[0].note

    def test_coverage_error(self, g_t3):
        rep = cone.indicial_analysis(g_t3, 1, 4, with_windows=False)
        with pytest.raises(cone.ConeError, match="mode count"):
            cone.fredholm_windows(rep, (-4.0, 4.0))


def test_report_serialization(g_t3):
    rep = cone.indicial_analysis(g_t3, 1, 8)
    doc = rep.to_json()
    assert doc["l"] == 4 and doc["p"] == 1
    assert len(doc["eigenvalues"]) == 8
    assert doc["window_verdicts"]
    csv_text = rep.to_csv()
    assert csv_text.splitlines()[0].startswith("j,lambda")
    assert len(csv_text.splitlines()) == 9
