import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from mwrn import analytics as an
from mwrn.experiment import af_markov_oracle, df_enumeration_oracle

# Frozen reference values. DF/AF two-way rates come from adaptive quadrature
# of the Gaussian decision regions (thresholds re-derived in 40-digit
# arithmetic); fading bound terms from a 40-digit re-evaluation.
DF_QUAD = {
    0: 0.17062360470999186,
    2: 0.08591343173594339,
    4: 0.02957805524883482,
    6: 0.005728588251918475,
    8: 0.00045965789600490236,
    10: 9.332969731920662e-06,
}
DF_LITERAL = {
    0: 0.1796143727197148,
    2: 0.09107416405304808,
    4: 0.03157776009455838,
    6: 0.00614986676652515,
    8: 0.0004953599483027816,
    10: 1.0083898772484175e-05,
}
AF_QUAD = {
    0: (0.2248458989844455, 0.393412601011),
    2: (0.16409116653526365, 0.418792744549327),
    4: (0.10507494070948566, 0.44750509973047947),
    6: (0.05523791251677393, 0.4723814645052946),
    8: (0.02146532758659058, 0.4892673365202638),
    10: (0.005222510692482115, 0.4973887446537628),
}
THRESHOLDS = {0: (1.1732658260877076, 0.01205057497377549), 6: (1.043527674947191, 3.066633568475708e-05)}
# (phi1, phi2, phi3, xi, bound) at gamma_bar = 10
BOUND_10 = {
    "quarter_pi": (0.02326870537720384, 0.00440551017427758, 0.008187595997147062, 0.019947526847854693, 0.05651117417833503),
    "verbatim": (0.02326870537720384, 0.00440551017427758, -0.03995344591074029, 0.1117488917808044, 0.10241185664480988),
}

RHO_GRID = np.logspace(-3, 6, 100)


def test_link_parameters_l2_unit_noise():
    lp = an.link_parameters(2, 1.0)
    assert lp.rho == 1.0
    assert lp.noise_variance == 0.5
    assert lp.alpha == pytest.approx(math.sqrt(1 / 2.5))


def test_link_parameters_l10():
    assert an.link_parameters(10, 1.0).rho == pytest.approx(0.5555555555555556, rel=1e-15)


def test_alpha_noiseless_limit():
    assert an.link_parameters(2, 1e-12).alpha == pytest.approx(math.sqrt(0.5), rel=1e-9)
    assert an.link_parameters_at_snr(5, math.inf).alpha == math.sqrt(0.5)


@pytest.mark.parametrize("L, n0", [(1, 1.0), (2, 0.0), (3, -1.0)])
def test_link_parameters_domain(L, n0):
    with pytest.raises(ValueError):
        an.link_parameters(L, n0)


@pytest.mark.parametrize("db", sorted(THRESHOLDS))
def test_thresholds_frozen(db):
    lp = an.link_parameters_at_snr(2, an.db_to_linear(db))
    gr, g = THRESHOLDS[db]
    assert lp.gamma_r == pytest.approx(gr, rel=1e-13)
    assert lp.gamma == pytest.approx(g, rel=1e-9)


def test_thresholds_high_snr():
    assert an.relay_threshold(1e6) == pytest.approx(1 + math.log(2) / 4e6, rel=1e-15)
    assert an.relay_threshold(1e6) > 1.0
    assert abs(an.user_threshold(1e4)) < 1e-12
    lp = an.link_parameters_at_snr(3, math.inf)
    assert (lp.gamma_r, lp.gamma, lp.noise_variance) == (1.0, 0.0, 0.0)


def test_threshold_range_invariant():
    gr = an.relay_threshold(RHO_GRID)
    assert np.all(gr > 1.0)
    assert np.all(gr <= 1 + math.log(2) / (4 * RHO_GRID) + 1e-15)


@pytest.mark.parametrize("db", sorted(DF_QUAD))
def test_p_df_matches_quadrature(db):
    assert an.p_df_twrn(an.db_to_linear(db)) == pytest.approx(DF_QUAD[db], rel=1e-11)


@pytest.mark.parametrize("db", sorted(DF_LITERAL))
def test_p_df_literal_grouping_frozen(db):
    rho = an.db_to_linear(db)
    assert an.p_df_twrn(rho, verbatim=True) == pytest.approx(DF_LITERAL[db], rel=1e-12)
    assert an.p_df_twrn(rho, verbatim=True) > an.p_df_twrn(rho)


@pytest.mark.parametrize("db", sorted(AF_QUAD))
def test_p_af_matches_quadrature(db):
    rho = an.db_to_linear(db)
    p, pp = AF_QUAD[db]
    assert an.p_af_twrn(rho) == pytest.approx(p, rel=1e-12)
    assert an.p_af_prime_twrn(rho) == pytest.approx(pp, rel=1e-12)


def test_live_quadrature_at_unit_snr():
    # independent check of the AF rate with the noise integral done numerically
    rho = 1.0
    s2 = 1 / (2 * rho)
    a = math.sqrt(1 / (2 + s2))
    s = math.sqrt(s2 * (a * a + 1))
    val = quad(lambda x: math.exp(-x * x / (2 * s * s)) / (s * math.sqrt(2 * math.pi)), a, np.inf)[0]
    assert an.p_af_twrn(rho) == pytest.approx(val, rel=1e-10)
    b = an.twrn_baselines(an.link_parameters(2, 1.0))
    assert 0 < b.p_df < 0.5 and 0 < b.p_af < 0.5


def test_df_high_snr_limit():
    # the thresholds drift as ln(2)/(4 rho), which scales two of the erfc
    # terms by sqrt(2) and 1/sqrt(2): the ratio to erfc(sqrt(rho)) settles
    # at (1 + sqrt(2))/2
    for rho in (200.0, 400.0):
        ratio = an.p_df_twrn(rho) / an.high_snr_asymptotics(rho).p_df_inf
        assert ratio == pytest.approx((1 + math.sqrt(2)) / 2, rel=1e-3)
        assert an.p_df_twrn(rho, verbatim=True) > an.p_df_twrn(rho)


def test_p_af_prime_limit():
    assert an.p_af_prime_twrn(1e6) == pytest.approx(0.5, abs=1e-12)
    assert an.p_af_prime_twrn(math.inf) == 0.5
    assert an.p_af_twrn(math.inf) == 0.0


def test_baselines_in_unit_interval_and_ordered():
    for f in (an.p_df_twrn, an.p_af_twrn, an.p_af_prime_twrn):
        v = f(RHO_GRID)
        assert np.all(np.isfinite(v))
        assert np.all((v >= 0) & (v <= 1))
    assert np.all(an.p_af_prime_twrn(RHO_GRID) >= an.p_af_twrn(RHO_GRID))


@pytest.mark.parametrize("fn", [an.p_df_twrn, an.p_af_twrn])
def test_baselines_monotone(fn):
    assert np.all(np.diff(fn(RHO_GRID)) <= 0)


@pytest.mark.parametrize("protocol", ["df", "af"])
@pytest.mark.parametrize("L", [2, 10, 100])
def test_average_ber_monotone_and_bounded(protocol, L):
    v = an.average_ber(L, RHO_GRID, protocol)
    assert np.all(np.diff(v) <= 0)
    assert np.all((v >= 0) & (v <= 1))


def test_average_ber_l2_is_twrn():
    for rho in (0.3, 1.0, 7.0):
        assert an.average_ber(2, rho, "df") == an.p_df_twrn(rho)
        assert an.average_ber(2, rho, "af") == an.p_af_twrn(rho)


def test_af_coefficient_exact_rational():
    c = an.af_average_coefficient(10)
    assert c * 9 == Fraction(1638800, 102400)
    assert float(c * 9) == 16.00390625
    assert float(c) == pytest.approx(1.778212, abs=1e-6)


def test_af_literal_coefficient_discrepancy():
    literal = an.af_average_coefficient_verbatim(10)
    assert literal == pytest.approx(1.856337, abs=1e-6)
    assert literal / float(an.af_average_coefficient(10)) - 1 == pytest.approx(0.044, abs=0.001)


def test_df_k1_end_user_form():
    p = 0.02
    a = (1 - p) ** 7 * p * p
    b = (1 - p) ** 8 * p
    assert an.df_k_event(10, p, 1, 1).value == pytest.approx(8 * a + b, rel=1e-14)
    assert an.df_k_event(10, p, 10, 1).value == pytest.approx(8 * a + b, rel=1e-14)
    assert an.df_k_event(10, p, 4, 1).value == pytest.approx(7 * a + 2 * b, rel=1e-14)


@pytest.mark.parametrize("k", [1, 2])
def test_df_l5_matches_enumeration(k):
    d = df_enumeration_oracle(5, 0.3, 1)
    assert an.df_k_event(5, 0.3, 1, k).value == pytest.approx(d[k], abs=1e-12)


def test_af_l8_matches_markov():
    d = af_markov_oracle(8, 0.1, 0.4, 3)
    for k in (1, 2):
        assert an.af_k_event(8, 0.1, 0.4, 3, k).value == pytest.approx(d[k], abs=1e-12)


def test_k2_small_cases_by_hand():
    # L=4, i=2: one end user plus its far neighbour, or two chain flips
    p = 0.2
    c = an.df_error_cases(4, p)
    assert an.df_k_event(4, p, 2, 2).value == pytest.approx(c["D1"] + c["F1"] + c["C1"], rel=1e-14)
    c = an.df_error_cases(5, p)
    expected = c["C1"] + 2 * c["D1"] + c["E1"] + 2 * c["F1"]
    assert an.df_k_event(5, p, 3, 2).value == pytest.approx(expected, rel=1e-14)


def test_literal_k2_branches_drop_one_term():
    p = 0.1
    for L in (6, 9):
        c = an.df_error_cases(L, p)
        assert an.df_k_event(L, p, 2, 2).value - an.df_k_event(L, p, 2, 2, verbatim=True).value == pytest.approx(c["F1"])
        assert an.df_k_event(L, p, 3, 2).value - an.df_k_event(L, p, 3, 2, verbatim=True).value == pytest.approx(c["E1"])
        assert an.df_k_event(L, p, 1, 2).value == an.df_k_event(L, p, 1, 2, verbatim=True).value


def test_k2_requires_four_users():
    with pytest.raises(ValueError):
        an.df_k_event(3, 0.1, 1, 2)


@pytest.mark.parametrize("i, k", [(0, 1), (11, 1), (1, 0), (1, 10)])
def test_event_domain(i, k):
    with pytest.raises(ValueError):
        an.df_event_probability(10, 1.0, i, k)
    with pytest.raises(ValueError):
        an.af_event_probability(10, 1.0, i, k)


def test_event_flags():
    assert an.df_event_probability(10, 3.0, 1, 2).exact
    assert not an.df_event_probability(10, 3.0, 1, 3).exact
    assert an.af_event_probability(10, 3.0, 5, 1).exact
    assert not an.af_event_probability(10, 3.0, 5, 4).exact


def test_zero_pair_error_gives_zero_events():
    for i in range(1, 9):
        for k in range(1, 8):
            assert an.df_k_event(8, 0.0, i, k).value == 0.0
            assert an.af_k_event(8, 0.0, 0.5, i, k).value == 0.0


def test_reduced_af_examples():
    assert an.af_reduced_event(10, 0.01, 1) == pytest.approx(5 * 0.01)
    assert an.af_reduced_event(10, 0.01, 7) == pytest.approx(0.03125 * 0.01)


def test_af_consecutive_form_reduces():
    # with P'_AF = 1/2 and P_AF -> 0 the run form approaches the reduced one
    p = 1e-9
    for k in range(1, 10):
        assert an.af_consecutive_event(10, p, 0.5, k) == pytest.approx(an.af_reduced_event(10, p, k), rel=1e-6)


def test_event_table():
    t = an.event_probability_table(6, 4.0, "af")
    assert len(t.entries) == 6 * 5
    assert t[(1, 1)].value == an.af_event_probability(6, 4.0, 1, 1).value
    assert all(0 <= e.value <= 1 for e in t.entries.values())
    small = an.event_probability_table(3, 4.0, "df")
    assert (1, 2) not in small.entries


def test_exact_average_ber_l2():
    assert an.exact_average_ber(2, 2.0, "df") == pytest.approx(an.p_df_twrn(2.0), rel=1e-14)
    assert an.exact_average_ber(2, 2.0, "af") == pytest.approx(an.p_af_twrn(2.0), rel=1e-14)


@pytest.mark.parametrize("protocol", ["df", "af"])
def test_exact_average_ber_matches_oracle(protocol):
    L, i, rho = 9, 4, 2.5
    if protocol == "df":
        d = df_enumeration_oracle(L, an.p_df_twrn(rho), i)
    else:
        d = af_markov_oracle(L, an.p_af_twrn(rho), an.p_af_prime_twrn(rho), i)
    expected = sum(k * d[k] for k in range(L)) / (L - 1)
    assert an.exact_average_ber(L, rho, protocol, i) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("variant", sorted(BOUND_10))
def test_fading_bound_terms_frozen(variant):
    t = an.fading_df_bound_terms(10.0, variant)
    got = (t.phi1, t.phi2, t.phi3, t.xi, t.value)
    for g, e in zip(got, BOUND_10[variant]):
        assert g == pytest.approx(e, rel=1e-12)
    assert t.gamma_bar == 10.0


def test_fading_bound_at_10():
    assert 0 < an.fading_df_bound(10.0) < 0.1
    # the literal cotangent argument leaves the bound outside that range
    assert an.fading_df_bound(10.0, "verbatim") > 0.1


def test_fading_bound_limits():
    assert an.fading_df_bound_terms(1e-12).phi1 == pytest.approx(0.5, abs=1e-6)
    assert an.fading_df_bound(1e12) < 1e-10
    # the literal variant plateaus instead of vanishing
    assert an.fading_df_bound(1e6, "verbatim") > 0.05


def test_fading_bound_decreasing_and_valid():
    vals = [an.fading_df_bound_terms(r) for r in np.logspace(-3, 6, 60)]
    assert all(0 < t.phi1 <= 0.5 for t in vals)
    assert all(0 <= t.value <= 1 and not t.clamped for t in vals)
    assert all(a.value >= b.value for a, b in zip(vals, vals[1:]))


def test_fading_af_conditional_examples():
    p, pp = an.fading_af_conditional(0.0, 1.3, 0.7, 5.0)
    assert p == 0.5 and pp == 0.5
    p, pp = an.fading_af_conditional(1.0, 1.0, 1.0, math.inf)
    assert p == 0.0
    assert pp == pytest.approx(0.3085375387259869, rel=1e-14)
    p, pp = an.fading_af_conditional(1.0, 1.0, 1.0, 1e9)
    assert pp == pytest.approx(0.3085375387259869, rel=1e-6)


def test_fading_average_l2_df():
    assert an.fading_average_ber(2, 30.0, "df") == an.fading_df_bound(30.0)


def test_fading_average_pinned_gains():
    rho = 100.0
    gains = np.ones((3, 1))
    p, pp = an.fading_af_conditional(1.0, 1.0, 1.0, rho)
    expected = sum(k * an.af_consecutive_event(10, p, pp, k) for k in range(1, 10)) / 9
    assert an.fading_average_ber(10, rho, "af", 1, gains=gains) == pytest.approx(expected, rel=1e-14)
    assert an.fading_average_ber(10, rho, "af", 1, gains=gains, mode="per_draw") == pytest.approx(expected, rel=1e-14)


def test_fading_average_seed_stability():
    rho = an.db_to_linear(25)
    vals = np.array([an.fading_average_ber(10, rho, "af", 100_000, seed) for seed in range(10)])
    assert (vals.max() - vals.min()) / vals.mean() < 0.02
    assert an.fading_average_ber(10, rho, "af", 1000, 3) == an.fading_average_ber(10, rho, "af", 1000, 3)


def test_high_snr_asymptotics():
    h = an.high_snr_asymptotics(9.0)
    assert h.penalty_db == 10 * math.log10(3)
    assert h.p_df_inf == pytest.approx(2.209049699858544e-05, rel=1e-14)
    assert h.p_af_inf == pytest.approx(0.01430587843542964, rel=1e-14)
    for rho in (0.5, 3.0, 40.0):
        assert an.high_snr_asymptotics(rho).p_af_inf == pytest.approx(an.high_snr_asymptotics(rho / 3).p_df_inf, rel=1e-15)


def test_snr_gap_at_1e5():
    gap = an.snr_gap(1e-5)
    assert an.p_df_twrn(an.db_to_linear(gap.df_snr_db)) == pytest.approx(1e-5, rel=1e-8)
    assert 4.2 <= gap.gap_db <= 5.3


# -- properties ------------------------------------------------------------------------

rho_st = st.floats(min_value=1e-3, max_value=1e6)
p_st = st.floats(min_value=0.0, max_value=0.5)


@settings(max_examples=60, deadline=None)
@given(L=st.integers(2, 60), rho=rho_st, protocol=st.sampled_from(["df", "af"]))
def test_probabilities_in_unit_interval(L, rho, protocol):
    assert 0 <= an.average_ber(L, rho, protocol) <= 1
    assert 0 <= an.exact_average_ber(L, rho, protocol) <= 1
    fn = an.df_event_probability if protocol == "df" else an.af_event_probability
    for k in range(1, L):
        if k == 2 and L < 4:
            continue
        for i in {1, 2, L // 2 + 1, L}:
            assert 0 <= fn(L, rho, i, k).value <= 1


@settings(max_examples=60, deadline=None)
@given(L=st.integers(5, 40), rho=rho_st, data=st.data())
def test_df_high_order_independent_of_i_and_k(L, rho, data):
    i1, i2 = data.draw(st.integers(1, L)), data.draw(st.integers(1, L))
    k1, k2 = data.draw(st.integers(3, L - 1)), data.draw(st.integers(3, L - 1))
    assert an.df_event_probability(L, rho, i1, k1).value == an.df_event_probability(L, rho, i2, k2).value


@settings(max_examples=60, deadline=None)
@given(L=st.integers(3, 60), p=st.floats(1e-12, 0.5), data=st.data())
def test_af_reduced_ratio(L, p, data):
    k = data.draw(st.integers(1, L - 2))
    ratio = an.af_reduced_event(L, p, k + 1) / an.af_reduced_event(L, p, k)
    assert ratio == pytest.approx((L - k) / (2 * (L - k + 1)), rel=1e-14)
    assert an.af_reduced_event(L, p, k + 1) < an.af_reduced_event(L, p, k)


@settings(max_examples=40, deadline=None)
@given(L=st.integers(4, 12), p=st.floats(0.0, 1.0), data=st.data())
def test_df_matches_enumeration(L, p, data):
    i = data.draw(st.integers(1, L))
    d = df_enumeration_oracle(L, p, i)
    assert an.df_k_event(L, p, i, 1).value == pytest.approx(d[1], abs=1e-12)
    assert an.df_k_event(L, p, i, 2).value == pytest.approx(d[2], abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(L=st.integers(4, 30), p=st.floats(0.0, 0.999), pp=st.floats(0.0, 1.0), data=st.data())
def test_af_matches_markov(L, p, pp, data):
    i = data.draw(st.integers(1, L))
    d = af_markov_oracle(L, p, pp, i)
    assert an.af_k_event(L, p, pp, i, 1).value == pytest.approx(d[1], abs=1e-12)
    assert an.af_k_event(L, p, pp, i, 2).value == pytest.approx(d[2], abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(rho=st.floats(1e-3, 1e6), g=st.lists(st.floats(0.0, 50.0), min_size=3, max_size=3))
def test_fading_conditional_in_range(rho, g):
    p, pp = an.fading_af_conditional(*g, rho)
    assert 0 <= p <= 0.5 and 0 <= pp <= 0.5
