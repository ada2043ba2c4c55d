import numpy as np
import pytest

from sofa_opt.dvm import (
    Infeasible,
    StageRates,
    characteristic_residual,
    characteristic_rhs,
    dominant_eigenvalue,
)


def scan_bisect_oracle(rates, lo=-10.0, hi=10.0, n=1_000_000):
    """Independent dense-scan + bisection root finder for the residual."""
    grid = np.linspace(lo, hi, n)
    with np.errstate(over="ignore", invalid="ignore"):
        g = characteristic_residual(grid, rates)
    finite = np.isfinite(g)
    change = finite[:-1] & finite[1:] & (np.sign(g[:-1]) * np.sign(g[1:]) <= 0.0)
    idx = np.nonzero(change)[0]
    if idx.size == 0:
        return None
    a, b = float(grid[idx[-1]]), float(grid[idx[-1] + 1])
    fa = characteristic_residual(a, rates)
    for _ in range(100):
        mid = 0.5 * (a + b)
        fm = characteristic_residual(mid, rates)
        if fa * fm <= 0.0:
            b = mid
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def random_rates(rng):
    a_y, a_j, a_a = rng.uniform(0.0, 0.6, size=3)
    tau_y = rng.uniform(1.0, 8.0)
    tau_j = tau_y + rng.uniform(2.0, 15.0)
    tau_a = tau_j + rng.uniform(5.0, 40.0)
    b = rng.uniform(0.1, 20.0)
    return StageRates(a_y=a_y, a_j=a_j, a_a=a_a, tau_y=tau_y, tau_j=tau_j,
                      tau_a=tau_a, b=b)


class TestStageRatesType:
    def test_valid(self):
        r = StageRates(a_y=0.1, a_j=0.1, a_a=0.1, tau_y=2, tau_j=5, tau_a=30, b=3)
        assert r.tau_y < r.tau_j < r.tau_a

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            StageRates(a_y=-0.1, a_j=0.1, a_a=0.1, tau_y=2, tau_j=5, tau_a=30, b=3)

    def test_rejects_bad_tau_order(self):
        with pytest.raises(ValueError):
            StageRates(a_y=0.1, a_j=0.1, a_a=0.1, tau_y=5, tau_j=2, tau_a=30, b=3)


class TestDominantEigenvalue:
    def test_b_zero_exact(self):
        r = StageRates(a_y=0.2, a_j=0.1, a_a=0.37, tau_y=2, tau_j=6, tau_a=30, b=0.0)
        assert dominant_eigenvalue(r) == -0.37

    def test_zero_mortality_case(self):
        # With all a_i = 0 the equation reduces to
        # lambda = b (exp(-tau_j lambda) - exp(-tau_a lambda)).
        r = StageRates(a_y=0, a_j=0, a_a=0, tau_y=2, tau_j=5, tau_a=20, b=2.0)
        lam = dominant_eigenvalue(r)
        oracle = scan_bisect_oracle(r)
        assert lam == pytest.approx(oracle, abs=1e-8)
        simplified = r.b * (np.exp(-r.tau_j * lam) - np.exp(-r.tau_a * lam))
        assert simplified == pytest.approx(lam, abs=1e-10)

    def test_residual_tolerance_and_oracle_agreement(self):
        rng = np.random.default_rng(7)
        checked = 0
        for _ in range(40):
            r = random_rates(rng)
            lam = dominant_eigenvalue(r)
            oracle = scan_bisect_oracle(r)
            if isinstance(lam, Infeasible):
                assert oracle is None
                continue
            checked += 1
            assert abs(characteristic_residual(lam, r)) < 1e-10
            assert lam == pytest.approx(oracle, abs=1e-8)
        assert checked >= 25

    def test_increasing_in_b(self):
        # Growth-dominated regime: the dominant root rises with fecundity.
        rng = np.random.default_rng(11)
        compared = 0
        for _ in range(60):
            r = random_rates(rng)
            lam1 = dominant_eigenvalue(r)
            if isinstance(lam1, Infeasible) or lam1 < -r.a_j:
                continue
            r2 = StageRates(a_y=r.a_y, a_j=r.a_j, a_a=r.a_a, tau_y=r.tau_y,
                            tau_j=r.tau_j, tau_a=r.tau_a, b=1.01 * r.b)
            lam2 = dominant_eigenvalue(r2)
            assert not isinstance(lam2, Infeasible)
            assert lam2 > lam1
            compared += 1
        assert compared >= 20

    def test_no_root_is_infeasible(self):
        # Tiny b with large adult mortality: g < 0 on the whole bracket.
        r = StageRates(a_y=0.0, a_j=0.0, a_a=1.0, tau_y=1, tau_j=2, tau_a=3, b=0.01)
        out = dominant_eigenvalue(r)
        assert isinstance(out, Infeasible)

    def test_rhs_matches_direct_form(self):
        # Factored evaluation must agree with the literal two-exponential form.
        rng = np.random.default_rng(3)
        for _ in range(50):
            r = random_rates(rng)
            lam = rng.uniform(-2, 2)
            direct = (
                r.b
                * np.exp(-r.a_y * r.tau_y - r.a_j * (r.tau_j - r.tau_y))
                * (
                    np.exp(-r.tau_j * lam)
                    - np.exp(-r.tau_a * lam - r.a_j * (r.tau_a - r.tau_j))
                )
                - r.a_a
            )
            assert characteristic_rhs(lam, r) == pytest.approx(direct, rel=1e-12, abs=1e-12)
