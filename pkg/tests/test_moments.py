import math

import numpy as np
import pytest

from seqgraph import (
    Normalization,
    PatternParams,
    TransformConfig,
    closed_form_terms,
    delta_separation,
    expected_psi,
    monte_carlo_psi,
    simulate_pattern_sequence,
    transform,
    variance_psi,
)
from seqgraph.moments import PATTERN_SOURCE, PATTERN_TARGET


def params(**overrides):
    base = dict(
        mu_short=1.0, sigma_short=0.0, mu_long=8.0, sigma_long=1.5,
        pair_density=0.1, length=500, kappa=1.0,
    )
    base.update(overrides)
    return PatternParams(**base)


class TestClosedForms:
    def test_exponent_transforms(self):
        terms = closed_form_terms(params(kappa=2.0, mu_short=1.5, sigma_short=0.5, mu_long=6.0, sigma_long=1.0))
        assert terms.mean_exponent_short == pytest.approx(2 * 1.5 - 0.5 * 4 * 0.25)
        assert terms.mean_exponent_long == pytest.approx(2 * 6.0 - 0.5 * 4 * 1.0)
        assert terms.second_moment_exponent_short == pytest.approx(2 * 1.5 - 4 * 0.25)
        assert terms.second_moment_exponent_long == pytest.approx(2 * 6.0 - 4 * 1.0)
        assert terms.expected_pairs == pytest.approx(50.0)

    def test_large_kappa_collapses_to_short_term(self):
        # with degenerate gaps and a large decay rate, the long-gap bracket
        # vanishes and only the first-neighbour term survives
        p = params(kappa=20.0, sigma_long=0.0, mu_long=3.0)
        got = expected_psi(p, Normalization.LENGTH_SENSITIVE)
        m = p.expected_pairs
        assert got == pytest.approx(2.0 / (m + 1.0) * math.exp(-20.0), rel=1e-12)

    def test_length_insensitive_limit(self):
        p = params(length=10_000)
        got = expected_psi(p, Normalization.LENGTH_INSENSITIVE)
        e_short = p.kappa * p.mu_short - 0.5 * p.kappa**2 * p.sigma_short**2
        e_long = p.kappa * p.mu_long - 0.5 * p.kappa**2 * p.sigma_long**2
        limit = 2.0 / p.pair_density * abs(math.exp(-e_short) / (1.0 - math.exp(-e_long)))
        assert got == pytest.approx(limit, rel=0.01)

    def test_mean_grows_when_either_gap_shrinks(self):
        base = expected_psi(params(), Normalization.LENGTH_SENSITIVE)
        assert expected_psi(params(mu_short=0.5), Normalization.LENGTH_SENSITIVE) > base
        assert expected_psi(params(mu_long=6.0), Normalization.LENGTH_SENSITIVE) > base

    def test_singular_long_exponent_raises(self):
        # kappa*mu = kappa^2 sigma^2 / 2 makes the geometric denominator vanish
        with pytest.raises(ValueError):
            expected_psi(params(kappa=1.0, mu_long=2.0, sigma_long=2.0), Normalization.LENGTH_SENSITIVE)

    def test_variance_positive_with_noise(self):
        assert variance_psi(params(), Normalization.LENGTH_SENSITIVE) > 0
        assert variance_psi(params(), Normalization.LENGTH_INSENSITIVE) > 0

    def test_variance_decays_with_length(self):
        v_short = variance_psi(params(length=200), Normalization.LENGTH_INSENSITIVE)
        v_long = variance_psi(params(length=2000), Normalization.LENGTH_INSENSITIVE)
        assert v_long < v_short

    def test_singular_variance_exponent_raises(self):
        # kappa*mu = kappa^2 sigma^2 zeroes the second-moment exponent
        with pytest.raises(ValueError):
            variance_psi(params(kappa=1.0, mu_long=4.0, sigma_long=2.0), Normalization.LENGTH_SENSITIVE)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            params(mu_short=9.0)  # short must stay below long
        with pytest.raises(ValueError):
            params(pair_density=0.0)
        with pytest.raises(ValueError):
            params(kappa=0.0)
        with pytest.raises(ValueError):
            params(sigma_short=-0.1)


class TestSimulator:
    def test_zero_variance_is_periodic(self):
        p = PatternParams(2.0, 0.0, 4.0, 0.0, 0.25, 60, 1.0)
        seq, alphabet = simulate_pattern_sequence(p, 0)
        u = np.flatnonzero(seq.events == alphabet.id_of(PATTERN_SOURCE))
        v = np.flatnonzero(seq.events == alphabet.id_of(PATTERN_TARGET))
        np.testing.assert_array_equal(v - u, np.full(u.size, 2))
        np.testing.assert_array_equal(np.diff(u), np.full(u.size - 1, 4))

    def test_seed_determinism(self):
        p = params()
        a, _ = simulate_pattern_sequence(p, 42)
        b, _ = simulate_pattern_sequence(p, 42)
        c, _ = simulate_pattern_sequence(p, 43)
        np.testing.assert_array_equal(a.events, b.events)
        assert not np.array_equal(a.events, c.events)

    def test_realized_short_gaps_match_mean(self):
        p = PatternParams(4.0, 0.8, 20.0, 1.0, 0.02, 60_000, 1.0)
        seq, alphabet = simulate_pattern_sequence(p, 7)
        u = np.flatnonzero(seq.events == alphabet.id_of(PATTERN_SOURCE))
        v = np.flatnonzero(seq.events == alphabet.id_of(PATTERN_TARGET))
        gaps = (v - u).astype(float)
        assert gaps.size > 1000
        std_err = gaps.std(ddof=1) / math.sqrt(gaps.size)
        assert abs(gaps.mean() - 4.0) <= 3 * std_err + 0.05  # 0.05 covers integer rounding drift

    def test_fillers_never_form_pattern_pairs(self):
        p = params()
        seq, alphabet = simulate_pattern_sequence(p, 3)
        n_u = int(np.sum(seq.events == alphabet.id_of(PATTERN_SOURCE)))
        n_v = int(np.sum(seq.events == alphabet.id_of(PATTERN_TARGET)))
        assert n_u == n_v == round(p.expected_pairs)


class TestMonteCarlo:
    def test_zero_variance_replicates_identical(self):
        p = PatternParams(1.0, 0.0, 4.0, 0.0, 0.1, 200, 2.0)
        est = monte_carlo_psi(p, Normalization.LENGTH_SENSITIVE, 10, seed=0)
        assert est.variance == 0.0
        assert est.std_error == 0.0
        assert np.all(est.samples == est.samples[0])

    def test_standard_error_shrinks_with_replicates(self):
        p = params(length=200)
        small = monte_carlo_psi(p, Normalization.LENGTH_INSENSITIVE, 60, seed=1)
        large = monte_carlo_psi(p, Normalization.LENGTH_INSENSITIVE, 600, seed=1)
        assert large.std_error < small.std_error

    def test_agrees_with_closed_form_in_smooth_regime(self):
        p = params()
        est = monte_carlo_psi(p, Normalization.LENGTH_INSENSITIVE, 600, seed=5)
        closed = expected_psi(p, Normalization.LENGTH_INSENSITIVE)
        assert abs(closed - est.mean) <= 4 * est.std_error

    def test_rejects_single_replicate(self):
        with pytest.raises(ValueError):
            monte_carlo_psi(params(), Normalization.LENGTH_SENSITIVE, 1)

    @pytest.mark.xfail(
        strict=True,
        reason=(
            "unreachable tolerance at this parameter point: integer positions "
            "collapse the short-gap noise (sigma=0.1 rounds to a constant gap), "
            "shifting the realized mean ~0.5% below the continuous closed form "
            "while the Monte Carlo standard error is ~0.005%; see the decisions "
            "ledger for the full analysis"
        ),
    )
    def test_reference_point_with_narrow_gap_noise(self):
        p = PatternParams(1.0, 0.1, 5.0, 0.5, 0.1, 500, 1.0)
        est = monte_carlo_psi(p, Normalization.LENGTH_INSENSITIVE, 2000, seed=0)
        closed = expected_psi(p, Normalization.LENGTH_INSENSITIVE)
        assert abs(closed - est.mean) <= 3 * est.std_error


class TestSeparation:
    def test_equal_gap_distributions_give_near_zero_delta(self):
        near = PatternParams(4.0, 0.8, 99.0, 0.0, 0.05, 400, 1.0)
        far = PatternParams(4.0, 0.8, 99.0, 0.0, 0.05, 400, 1.0)
        curve = delta_separation(near, far, [1.0], replicates=50, seed=3)
        scale = math.exp(-1.0 * 4.0)
        assert abs(curve.feature_deltas[0]) <= 0.25 * scale

    def test_raw_deltas_shrink_while_features_grow(self):
        near = PatternParams(2.0, 0.0, 99.0, 0.0, 0.05, 400, 1.0)
        far = PatternParams(5.0, 0.0, 99.0, 0.0, 0.05, 400, 1.0)
        curve = delta_separation(near, far, [1.0, 2.0, 3.0], replicates=5, seed=0)
        # raw effect gap: exp(-2k) - exp(-5k), strictly decreasing on this grid
        for kappa, raw in zip(curve.kappas, curve.raw_deltas):
            assert raw == pytest.approx(math.exp(-2 * kappa) - math.exp(-5 * kappa), abs=1e-9)
        assert curve.raw_deltas[0] > curve.raw_deltas[1] > curve.raw_deltas[2]
        assert curve.feature_deltas[0] < curve.feature_deltas[1] < curve.feature_deltas[2]

    def test_feature_delta_grows_with_kappa_under_unit_threshold(self):
        near = PatternParams(3.0, 0.25, 99.0, 0.0, 0.05, 400, 1.0)
        far = PatternParams(6.0, 0.4, 99.0, 0.0, 0.05, 400, 1.0)
        wins = 0
        for seed in range(10):
            curve = delta_separation(near, far, [1.0, 2.0, 3.0], replicates=10, seed=seed * 1000)
            assert all(curve.unit_threshold_ok)
            wins += all(b > a for a, b in zip(curve.feature_deltas, curve.feature_deltas[1:]))
        assert wins >= 8

    def test_near_mean_must_not_exceed_far_mean(self):
        near = PatternParams(6.0, 0.0, 99.0, 0.0, 0.05, 400, 1.0)
        far = PatternParams(3.0, 0.0, 99.0, 0.0, 0.05, 400, 1.0)
        with pytest.raises(ValueError):
            delta_separation(near, far, [1.0])


class TestPreRootScale:
    def test_monte_carlo_uses_pre_root_ratios(self):
        # at kappa=2 the rooted feature is the square root of the analysed one
        p = PatternParams(1.0, 0.0, 4.0, 0.0, 0.1, 200, 2.0)
        seq, alphabet = simulate_pattern_sequence(p, 0)
        cfg = TransformConfig(kappa=2.0, normalization=Normalization.LENGTH_SENSITIVE)
        matrix = transform(seq, alphabet, cfg)
        u, v = alphabet.id_of(PATTERN_SOURCE), alphabet.id_of(PATTERN_TARGET)
        est = monte_carlo_psi(p, Normalization.LENGTH_SENSITIVE, 2, seed=0)
        assert est.samples[0] == pytest.approx(matrix.effect_ratios[u, v], abs=1e-15)
        assert matrix.values[u, v] == pytest.approx(math.sqrt(est.samples[0]), abs=1e-15)
