import numpy as np
import pytest

from conelab import kahler


LAM = (0.7, 0.9)


def sample_points(n, m=2, scale=0.4, seed=0):
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
    return Z * scale


class TestWeightedRadius:
    def test_residual_contract(self):
        Z = sample_points(10_000)
        t = kahler.weighted_radius(Z, LAM)
        assert kahler.weighted_radius_residual(Z, LAM, t).max() < 1e-12

    def test_unit_weights_euclidean(self):
        Z = sample_points(200)
        t = kahler.weighted_radius(Z, (1.0, 1.0))
        assert np.abs(t - np.linalg.norm(Z, axis=1)).max() < 1e-12

    def test_axis_power(self):
        z = np.zeros((4, 2), dtype=complex)
        z[:, 0] = [0.1, 0.4, 0.9, 1.7]
        t = kahler.weighted_radius(z, LAM)
        assert np.abs(t - np.abs(z[:, 0]) ** LAM[0]).max() < 1e-12

    def test_sandwich_bounds(self):
        alpha, beta = min(LAM), max(LAM)
        Z = sample_points(5000, scale=0.3)
        r = np.linalg.norm(Z, axis=1)
        t = kahler.weighted_radius(Z, LAM)
        inside = r <= 1
        assert np.all(r[inside] ** beta <= t[inside] * (1 + 1e-12))
        assert np.all(t[inside] <= r[inside] ** alpha * (1 + 1e-12))
        Zb = Z * 8
        rb, tb = np.linalg.norm(Zb, axis=1), kahler.weighted_radius(Zb, LAM)
        out = rb >= 1
        assert np.all(rb[out] ** alpha <= tb[out] * (1 + 1e-12))
        assert np.all(tb[out] <= rb[out] ** beta * (1 + 1e-12))

    def test_flow_homogeneity(self):
        Z = sample_points(300)
        t = kahler.weighted_radius(Z, LAM)
        for s in (-0.9, 0.35, 2.0):
            Zf = kahler.flow(Z, LAM, s)
            tf = kahler.weighted_radius(Zf, LAM)
            assert np.abs(tf - np.exp(s) * t).max() < 1e-10 * np.exp(s)

    def test_origin_rejected(self):
        with pytest.raises(kahler.KahlerError):
            kahler.weighted_radius(np.zeros(2, dtype=complex), LAM)

    def test_bad_weights_rejected(self):
        with pytest.raises(kahler.KahlerError):
            kahler.weighted_radius(np.ones(2, dtype=complex), (0.5, 1.3))

    def test_deep_shell_accuracy(self):
        Z = sample_points(100, scale=1.0)
        Z = Z / np.linalg.norm(Z, axis=1, keepdims=True) * 2.0**-60
        t = kahler.weighted_radius(Z, LAM)
        assert kahler.weighted_radius_residual(Z, LAM, t).max() < 1e-12


class TestLeviForm:
    def test_flat_potential(self):
        Z = sample_points(10)
        L = kahler.levi_form(lambda P: (np.abs(P) ** 2).sum(axis=1), Z)
        assert np.abs(L - np.eye(2)).max() < 1e-7

    def test_pluriharmonic_vanishes(self):
        Z = sample_points(10)
        L = kahler.levi_form(lambda P: np.real(P[:, 0] ** 2), Z)
        assert np.abs(L).max() < 1e-7

    def test_exact_matches_fd(self):
        Z = sample_points(20)
        exact = kahler.radius_squared_levi(Z, LAM)
        fd = kahler.levi_form(lambda P: kahler.weighted_radius(P, LAM) ** 2, Z)
        assert np.abs(exact - fd).max() < 1e-6

    def test_deformed_radius_strictly_psh(self):
        # Levi(r_lam^2) >= (1 - margin) nu r^(-2(1-beta)) at fresh samples
        pot = kahler.PolyPotential(2, {"z1 zbar1": 1.0, "z2 zbar2": 1.0})
        prob = kahler.GluingProblem(weights=kahler.WeightData(LAM), potential=pot)
        consts = kahler.estimate_constants(prob)
        beta = max(LAM)
        Z = sample_points(4000, scale=0.2, seed=99)
        r = np.linalg.norm(Z, axis=1)
        emin = kahler.min_levi_eig(kahler.radius_squared_levi(Z, LAM))
        bound = consts.nu * r ** (-2 * (1 - beta))
        assert np.all(emin >= (1 - 0.2) * bound)

    def test_half_weights_positive(self):
        Z = sample_points(500, scale=0.3, seed=4)
        keep = np.linalg.norm(Z, axis=1) <= 1
        emin = kahler.min_levi_eig(kahler.radius_squared_levi(Z[keep], (0.5, 0.5)))
        assert np.all(emin > 0)


class TestPolyPotential:
    def test_value_gradient_levi(self):
        pot = kahler.PolyPotential(
            2, {"z1 zbar1": 1.0, "z2 zbar2": 1.0, "z1 z1": 0.15, "zbar1 zbar1": 0.15}
        )
        Z = sample_points(40)
        want = (np.abs(Z) ** 2).sum(axis=1) + 0.3 * np.real(Z[:, 0] ** 2)
        assert np.abs(pot(Z) - want).max() < 1e-12
        fd = kahler.levi_form(lambda P: pot(P), Z[:8])
        assert np.abs(pot.levi(Z[:8]) - fd).max() < 1e-6
        # gradient against the flow derivative of the value
        h = 1e-6
        for a in range(2):
            probe = Z[:8].copy()
            probe[:, a] += h
            num = (pot(probe) - pot(Z[:8])) / h
            want_g = 2 * np.real(pot.gradient(Z[:8])[:, a])
            assert np.abs(num - want_g).max() < 1e-4

    def test_non_real_rejected(self):
        with pytest.raises(kahler.KahlerError, match="real"):
            kahler.PolyPotential(2, {"z1 z1": 1.0})

    def test_nonzero_at_origin_rejected(self):
        pot = kahler.PolyPotential(1, {"": 1.0, "z1 zbar1": 1.0})
        with pytest.raises(kahler.KahlerError, match="second order"):
            kahler.GluingProblem(weights=kahler.WeightData((0.5,)), potential=pot)

    def test_nonzero_gradient_rejected(self):
        pot = kahler.PolyPotential(1, {"z1": 0.5, "zbar1": 0.5, "z1 zbar1": 1.0})
        with pytest.raises(kahler.KahlerError, match="second order"):
            kahler.GluingProblem(weights=kahler.WeightData((0.5,)), potential=pot)


class TestCutoffs:
    def test_quintic_bump_profile(self):
        b = kahler.QuinticBump(0.25, 1.0)
        x = np.linspace(0, 1.4, 200)
        y = b(x)
        assert np.all((0 <= y) & (y <= 1))
        assert np.all(y[x <= 0.25] == 1.0)
        assert np.all(y[x >= 1.0] == 0.0)

    def test_exact_derivative_bounds(self):
        b = kahler.QuinticBump(0.25, 1.0)
        x = np.linspace(0.25, 1.0, 20001)
        assert abs(np.abs(b.d1(x)).max() - b.sup_d1) < 1e-3 * b.sup_d1
        assert abs(np.abs(b.d2(x)).max() - b.sup_d2) < 1e-3 * b.sup_d2

    def test_fd_consistency(self):
        b = kahler.QuinticBump(0.25, 1.0)
        x = np.linspace(0.3, 0.95, 50)
        h = 1e-6
        fd1 = (b(x + h) - b(x - h)) / (2 * h)
        assert np.abs(fd1 - b.d1(x)).max() < 1e-6


class TestConstants:
    def test_quartic_potential_constants(self):
        pot = kahler.PolyPotential(
            2, {"z1 zbar1 z1 zbar1": 1.0, "z1 zbar1 z2 zbar2": 2.0, "z2 zbar2 z2 zbar2": 1.0}
        )  # |z|^4: all three ratios stay bounded on the glue region
        prob = kahler.GluingProblem(weights=kahler.WeightData(LAM), potential=pot)
        consts = kahler.estimate_constants(prob)
        # Levi(|z|^4) tops at 4 r^2; sup over r <= 0.8 with the 1.1 margin
        assert abs(consts.M0 - 1.1 * 4 * 0.8**2) < 0.05

    def test_levi_scale_bound(self):
        # p = Re(z1^2) + 2|z|^2 has Levi = 2I, so M0 >= 2
        pot = kahler.PolyPotential(
            2, {"z1 z1": 0.5, "zbar1 zbar1": 0.5, "z1 zbar1": 2.0, "z2 zbar2": 2.0}
        )
        prob = kahler.GluingProblem(weights=kahler.WeightData(LAM), potential=pot)
        consts = kahler.estimate_constants(prob)
        assert consts.M0 >= 2.0
        assert consts.M == (consts.M0 * consts.M1 * consts.sup_psi_d2
                            + 2 * consts.M0 * consts.sup_psi_d1 + consts.M0)


@pytest.fixture(scope="module")
def result():
    pot = kahler.PolyPotential(
        2, {"z1 zbar1": 1.0, "z2 zbar2": 1.0, "z1 z1": 0.15, "zbar1 zbar1": 0.15}
    )
    prob = kahler.GluingProblem(weights=kahler.WeightData(LAM), potential=pot)
    return prob, kahler.glue_potential(prob, n_verify=4000)


class TestGlue:
    def test_three_checks_pass(self, result):
        _, res = result
        assert res.locality_pass and res.inside_pass and res.psh_pass
        assert res.min_levi > 0
        assert res.n_samples >= 4000

    def test_boundary_continuity(self, result):
        # at r = delta exactly, q agrees with the formula with psi(1) = 0
        prob, res = result
        rng = np.random.default_rng(5)
        W = rng.standard_normal((50, 2)) + 1j * rng.standard_normal((50, 2))
        W = W / np.linalg.norm(W, axis=1, keepdims=True) * res.delta
        q = kahler.glue_value(prob, W, res.eps, res.delta)
        r = np.linalg.norm(W, axis=1)
        direct = prob.potential(W) + res.eps * prob.phi(r) * kahler.weighted_radius(
            W, LAM
        ) ** 2
        scale = np.abs(direct).max()
        assert np.abs(q - direct).max() < 1e-12 * max(scale, 1e-30)

    def test_locality_radius(self, result):
        prob, res = result
        rng = np.random.default_rng(6)
        W = rng.standard_normal((50, 2)) + 1j * rng.standard_normal((50, 2))
        W = W / np.linalg.norm(W, axis=1, keepdims=True) * (prob.outer_radius + 0.05)
        q = kahler.glue_value(prob, W, res.eps, res.delta)
        assert np.abs(q - prob.potential(W)).max() == 0.0

    def test_pluriharmonic_perturbation(self):
        pot = kahler.PolyPotential(
            2, {"z1 zbar1": 1.0, "z2 zbar2": 1.0, "z1 z2": 0.45, "zbar1 zbar2": 0.45}
        )
        prob = kahler.GluingProblem(weights=kahler.WeightData(LAM), potential=pot)
        res = kahler.glue_potential(prob, n_verify=2000)
        assert res.all_pass

    def test_report_shape(self, result):
        _, res = result
        doc = res.to_json()
        assert set(doc["checks"]) == {
            "locality", "inside_equality", "strictly_plurisubharmonic",
        }
        assert doc["constants"]["M"] > 0
        assert 0 < doc["delta"] < 1
