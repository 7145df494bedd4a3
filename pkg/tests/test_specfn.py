import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisecap.errors import HermiteOverflowError
from noisecap.specfn import (erf, hermite, hermite_function, hermite_table, log_factorial,
                             poisson_weights)


def taylor_erf(x, terms=200):
    """Alternating Maclaurin series, summed in extended precision."""
    with mp.workdps(50):
        x = mp.mpf(x)
        s = mp.fsum((-1) ** n * x ** (2 * n + 1) / (mp.factorial(n) * (2 * n + 1))
                    for n in range(terms))
        return float(2 / mp.sqrt(mp.pi) * s)


class TestHermite:
    @pytest.mark.parametrize("n, x, expected", [(0, 3.7, 1.0), (1, 2.0, 4.0), (3, 1.0, -4.0)])
    def test_low_orders(self, n, x, expected):
        assert hermite(n, x) == expected

    def test_matches_mpmath(self):
        for n in (2, 7, 15, 30):
            for x in (-3.1, 0.4, 2.2):
                assert hermite(n, x) == pytest.approx(float(mp.hermite(n, x)), rel=1e-10)

    def test_vectorized(self):
        x = np.array([0.0, 1.0])
        np.testing.assert_allclose(hermite(2, x), 4 * x**2 - 2)

    def test_overflow_signalled(self):
        with pytest.raises(HermiteOverflowError):
            hermite(400, 30.0)

    def test_negative_degree(self):
        with pytest.raises(ValueError):
            hermite(-1, 0.0)


class TestHermiteFunction:
    def test_ground_state_peak(self):
        assert hermite_function(0, 0.0) == pytest.approx(math.pi ** -0.25, abs=1e-15)
        assert hermite_function(0, 0.0) == pytest.approx(0.7511255444, abs=1e-10)

    def test_odd_node(self):
        assert hermite_function(1, 0.0) == 0.0

    def test_high_order_against_log_space(self):
        # mpmath log-space evaluation at 50 digits
        with mp.workdps(50):
            n, x = 40, mp.mpf("2.5")
            log_abs = (mp.log(abs(mp.hermite(n, x))) - x**2 / 2
                       - mp.log(2**n * mp.factorial(n) * mp.sqrt(mp.pi)) / 2)
            ref = float(mp.sign(mp.hermite(n, x)) * mp.exp(log_abs))
        assert ref == pytest.approx(-0.26498308850855747, rel=1e-15)
        assert hermite_function(40, 2.5) == pytest.approx(ref, rel=1e-10)

    def test_underflows_gracefully(self):
        assert hermite_function(10, 60.0) == 0.0

    def test_agrees_with_raw_polynomial(self):
        for n in range(31):
            for x in np.linspace(-8, 8, 17):
                h = hermite(n, x)
                if h == 0.0:
                    continue
                lhs = hermite_function(n, x) ** 2 * math.sqrt(math.pi) * 2.0**n \
                    * math.factorial(n) * math.exp(x * x)
                assert lhs == pytest.approx(h * h, rel=1e-8)

    @pytest.mark.parametrize("n", [0, 1, 5, 20, 40])
    def test_normalized(self, n):
        x = np.linspace(-14, 14, 28001)
        dens = hermite_function(n, x) ** 2
        assert np.trapezoid(dens, x) == pytest.approx(1.0, abs=1e-8)

    def test_table_without_gaussian(self):
        x = np.array([0.3, 12.0])
        np.testing.assert_allclose(hermite_table(6, x)[6],
                                   hermite_table(6, x, gaussian=False)[6] * np.exp(-x * x / 2))


class TestErf:
    def test_zero(self):
        assert erf(0.0) == 0.0

    def test_one(self):
        ref = taylor_erf(1.0)
        assert ref == pytest.approx(0.8427007929497149, abs=1e-15)
        assert erf(1.0) == pytest.approx(ref, abs=1e-12)

    @pytest.mark.parametrize("x", [6.0, 8.0, 30.0])
    def test_asymptote(self, x):
        assert abs(erf(x) - 1.0) <= 1e-12

    def test_against_taylor_grid(self):
        for x in np.linspace(0.0, 4.0, 41):
            assert erf(x) == pytest.approx(taylor_erf(x), abs=1e-12)

    def test_against_libm_across_split(self):
        for x in np.linspace(-7.0, 7.0, 2801):
            assert abs(erf(x) - math.erf(x)) <= 1e-12

    @given(st.floats(-20, 20))
    def test_odd_and_bounded(self, x):
        assert erf(-x) == -erf(x)
        assert abs(erf(x)) <= 1.0


class TestLogFactorial:
    @pytest.mark.parametrize("n, expected", [(0, 0.0), (1, 0.0)])
    def test_trivial(self, n, expected):
        assert log_factorial(n) == expected

    def test_against_product(self):
        for n in range(2, 60):
            ref = math.log(math.prod(range(1, n + 1)))
            assert log_factorial(n) == pytest.approx(ref, rel=1e-10)
        assert log_factorial(5) == pytest.approx(4.7874917427820460, rel=1e-12)


class TestPoissonWeights:
    def test_vacuum(self):
        pw = poisson_weights(0.0, 1e-12)
        assert pw.n_max == 0
        assert list(pw.weights) == [1.0]

    def test_first_weight(self):
        pw = poisson_weights(1.0, 1e-12)
        assert pw.weights[0] == pytest.approx(math.exp(-1.0), rel=1e-14)
        assert pw.weights[0] == pytest.approx(0.3678794412, abs=1e-10)

    @pytest.mark.parametrize("lam", [0.0, 0.5, 9.197, 25.0])
    @pytest.mark.parametrize("tol", [1e-3, 1e-8, 1e-12])
    def test_mass_bound(self, lam, tol):
        pw = poisson_weights(lam, tol)
        assert 1.0 - tol <= pw.mass <= 1.0 + 1e-15
        assert np.all((pw.weights >= 0) & (pw.weights <= 1))

    def test_direct_formula(self):
        pw = poisson_weights(9.197, 1e-12)
        for n, w in enumerate(pw.weights):
            assert w == pytest.approx(math.exp(-9.197) * 9.197**n / math.factorial(n), rel=1e-12)

    def test_smallest_truncation(self):
        lam, tol = 9.197, 1e-12
        pw = poisson_weights(lam, tol)
        short = math.fsum(pw.weights[:-1])
        assert short < 1.0 - tol

    def test_truncation_growth(self):
        assert poisson_weights(100.0, 1e-12).n_max < 100 + 12 * math.sqrt(100)

    @settings(max_examples=50)
    @given(st.floats(0.0, 60.0), st.floats(1e-14, 0.5))
    def test_mass_property(self, lam, tol):
        pw = poisson_weights(lam, tol)
        assert pw.mass >= 1.0 - tol - 1e-14
        assert pw.mass <= 1.0 + 1e-14

    @pytest.mark.parametrize("bad", [(-1.0, 1e-12), (1.0, 0.0), (1.0, 1.0)])
    def test_rejects_bad_input(self, bad):
        with pytest.raises(ValueError):
            poisson_weights(*bad)
