import math

import numpy as np
import pytest

from noisecap.capacity import channel_capacity
from noisecap.channel import (ChannelParams, TransitionMatrix, damp, encode, p01_series,
                              transition_matrix, vacuum_inside)
from noisecap.errors import SeriesConvergenceError
from noisecap.oracle_mc import estimate_transition, z_score
from noisecap.quadist import NumericsConfig, SignalDensity, interval_probability
from noisecap.specfn import erf

CFG = NumericsConfig()


class TestEncodeDamp:
    @pytest.mark.parametrize("bit, r, lam", [(0, 5.0, 0.0), (1, 5.0, 25.0), (1, 1.0, 1.0)])
    def test_encode(self, bit, r, lam):
        assert encode(bit, r) == lam

    @pytest.mark.parametrize("bad", [(2, 1.0), (1, 0.0), (0, -1.0)])
    def test_encode_rejects(self, bad):
        with pytest.raises(ValueError):
            encode(*bad)

    def test_damp(self):
        assert damp(25.0, 0.5) == pytest.approx(25.0 * math.exp(-1.0), rel=1e-15)
        assert damp(25.0, 0.5) == pytest.approx(9.1970, abs=1e-4)
        assert damp(3.3, 0.0) == 3.3
        assert damp(0.0, 2.0) == 0.0

    def test_params_lambda(self):
        assert ChannelParams(5, 0.5, 4.2, 0).lam == pytest.approx(9.196986029286058)

    @pytest.mark.parametrize("kw", [{"r": 0.0}, {"tau": -1.0}, {"theta": -0.1},
                                    {"sigma": float("nan")}])
    def test_params_reject(self, kw):
        with pytest.raises(ValueError):
            ChannelParams(**kw)


class TestTransitionMatrix:
    def test_row_sums(self):
        for p00, p01 in [(0.1, 0.7), (0.999999, 1e-9), (0.3, 0.3), (1.0, 0.0)]:
            t = TransitionMatrix(p00, p01)
            assert t.p00 + t.p10 == 1.0
            assert t.p01 + t.p11 == 1.0

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            TransitionMatrix(1.2, 0.5)

    def test_huge_threshold(self):
        p = ChannelParams(5, 0.5, 40.0, 0.5)
        t = transition_matrix(p)
        assert (t.p00, t.p01, t.p11) == (1.0, 1.0, 0.0)
        assert channel_capacity(t).capacity_bits == 0.0

    def test_zero_threshold(self):
        t = transition_matrix(ChannelParams(5, 0.5, 0.0, 1.0))
        assert t.p00 == 0.0 and t.p10 == 1.0

    def test_p00_closed_form_vs_quadrature(self):
        for theta in (0.5, 2.0, 4.0):
            for sigma in (0.0, 0.5, 1.0, 2.0):
                sd = SignalDensity.build(0.0, sigma, CFG)
                quad = interval_probability(sd, -theta, theta, CFG)
                assert abs(vacuum_inside(theta, sigma) - quad) <= 1e-9

    def test_p01_matches_interval_probability(self):
        p = ChannelParams(2.0, 0.25, 2.0, 0.5)
        sd = SignalDensity.build(p.lam, p.sigma, CFG)
        assert transition_matrix(p).p01 == interval_probability(sd, -2.0, 2.0, CFG)

    def test_vacuum_consistency(self):
        t = transition_matrix(ChannelParams(1e-4, 0.5, 3.0, 0.7))
        assert abs(t.p01 - t.p00) <= 1e-6

    def test_monotone_in_theta(self):
        thetas = np.linspace(0.0, 7.0, 36)
        rows = [transition_matrix(ChannelParams(5, 0.5, th, 0.6)) for th in thetas]
        assert np.all(np.diff([t.p00 for t in rows]) >= 0)
        assert np.all(np.diff([t.p01 for t in rows]) >= 0)

    def test_reference_point_pinned_by_monte_carlo(self):
        # 10^7 events; the quadrature value has to sit within 3 standard errors
        p = ChannelParams(5, 0.5, 4.2, 0.0)
        t = transition_matrix(p)
        _, e01 = estimate_transition(p, 10**7, seed=2024, threads=4)
        assert abs(z_score(e01, t.p01)) <= 3.0
        assert t.p01 == pytest.approx(0.8266752373057, abs=1e-12)


class TestSeries:
    def test_vacuum_reduces_to_erf(self):
        p = ChannelParams(1e-200, 0.0, 1.7, 0.9)
        assert p01_series(p) == pytest.approx(erf(1.7 / math.sqrt(1 + 0.81)), abs=1e-15)

    def test_small_amplitude(self):
        p = ChannelParams(1.0, 0.0, 1.0, 0.0)
        assert abs(p01_series(p) - transition_matrix(p).p01) <= 1e-8

    def test_reference_point(self):
        p = ChannelParams(5.0, 0.5, 3.6, 0.5)
        assert abs(p01_series(p) - transition_matrix(p).p01) <= 1e-6

    @pytest.mark.parametrize("r, tau, theta, sigma", [
        (1.5, 0.0, 1.2, 0.0), (3.0, 0.0, 2.5, 0.3), (3.16, 0.0, 3.0, 1.5),
        (4.0, 0.3, 3.8, 0.0), (5.0, 0.5, 4.2, 2.0),
    ])
    def test_agrees_with_quadrature(self, r, tau, theta, sigma):
        p = ChannelParams(r, tau, theta, sigma)
        assert p.lam <= 10
        assert abs(p01_series(p) - transition_matrix(p).p01) <= 1e-6

    def test_truncated_sum_flags_nonconvergence(self):
        with pytest.raises(SeriesConvergenceError):
            p01_series(ChannelParams(5, 0.5, 3.6, 0.5), n_terms=5)

    def test_explicit_terms_converged(self):
        p = ChannelParams(5, 0.5, 3.6, 0.5)
        assert p01_series(p, n_terms=90) == pytest.approx(p01_series(p), abs=1e-13)

    def test_cancellation_flagged(self):
        with pytest.raises(SeriesConvergenceError):
            p01_series(ChannelParams(5, 0.0, 4.2, 0.0))
