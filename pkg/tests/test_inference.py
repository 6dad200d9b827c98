import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from worldfrac.inference import (A_DOWN, A_UP, DOWN, UP, Hypothesis, Model,
                                 NoConsistentWorldsError, alice_bob_hypotheses,
                                 first_down_certainty, half_life_report, misled_fraction,
                                 model_compare, observation_accounting, parse_observed,
                                 update_credence)
from worldfrac.worlds import build_branch_tree


def test_parse_observed_forms():
    assert parse_observed("↑↑↓") == [UP, UP, DOWN]
    assert parse_observed("u,d,up") == [UP, DOWN, UP]
    assert parse_observed("uud") == [UP, UP, DOWN]
    assert parse_observed([UP]) == [UP]
    assert parse_observed("") == []


def test_no_observation_returns_prior():
    c = update_credence(alice_bob_hypotheses(0.3), "")
    assert c[A_UP] == pytest.approx(0.3, abs=1e-15)


@pytest.mark.parametrize("n, want", [(1, Fraction(2, 3)), (2, Fraction(4, 5)), (10, Fraction(1024, 1025))])
def test_alice_bob_values(n, want):
    assert update_credence(alice_bob_hypotheses(), UP * n)[A_UP] == pytest.approx(float(want), abs=1e-12)


def test_closed_form_up_to_fifty():
    for n in range(51):
        c = update_credence(alice_bob_hypotheses(), [UP] * n)
        want = Fraction(2 ** n, 2 ** n + 1)
        assert abs(c[A_UP] - float(want)) < 1e-12
        assert abs(c[A_UP] + c[A_DOWN] - 1.0) < 1e-12


@pytest.mark.parametrize("n", range(0, 13))
def test_credence_matches_explicit_tree(n):
    # enumerate every branch: Alice's choice, then n spins for Bob
    hyps = {h.name: h for h in alice_bob_hypotheses()}
    steps = [{A_UP: 0.5, A_DOWN: 0.5}] + [lambda seq: hyps[seq[0]].per_trial_fractions] * n
    tree = build_branch_tree(steps)
    consistent = {seq: f for seq, f in tree.leaves.items() if all(s == UP for s in seq[1:])}
    total = math.fsum(consistent.values())
    from_tree = math.fsum(f for seq, f in consistent.items() if seq[0] == A_UP) / total
    assert abs(update_credence(list(hyps.values()), [UP] * n)[A_UP] - from_tree) < 1e-12


def test_misled_fraction_ten_ups():
    assert misled_fraction(alice_bob_hypotheses(), UP * 10, A_UP) == pytest.approx(1 / 2048, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 30), st.integers(0, 5), st.floats(0.05, 0.95))
def test_accounting_partitions_all_worlds(ups, downs, prior):
    obs = [UP] * ups + [DOWN] * downs
    acct = observation_accounting(alice_bob_hypotheses(prior), obs, A_DOWN)
    assert abs(math.fsum(acct.values()) - 1.0) < 1e-12
    assert all(v >= 0 for v in acct.values())


def test_accounting_explicit():
    acct = observation_accounting(alice_bob_hypotheses(), UP * 3, A_UP)
    assert acct == pytest.approx({"misled": 1 / 16, "correct": 0.5, "non_observing": 7 / 16}, abs=1e-15)


def test_rescaling_invariance():
    # multiplying every prior by the same constant leaves credences unchanged
    a = [Hypothesis("x", 0.2, {"↑": 0.9, "↓": 0.1}), Hypothesis("y", 0.8, {"↑": 0.4, "↓": 0.6})]
    obs = "↑↓↑↑"
    base = update_credence(a, obs)
    w = {h.name: h.prior_fraction * math.prod(h.per_trial_fractions[o] for o in obs) for h in a}
    for name in w:
        assert base[name] == pytest.approx(w[name] / sum(w.values()), abs=1e-14)


def test_first_down_certainty():
    rep = first_down_certainty(UP * 5 + DOWN)
    assert rep.certain and rep.hypothesis == A_DOWN
    assert rep.credence[A_DOWN] == 1.0 and rep.credence[A_UP] == 0.0
    assert not first_down_certainty(UP * 5).certain


def test_no_consistent_worlds():
    hyps = [Hypothesis("a", 0.5, {"↑": 1.0, "↓": 0.0}), Hypothesis("b", 0.5, {"↑": 1.0, "↓": 0.0})]
    with pytest.raises(NoConsistentWorldsError):
        update_credence(hyps, DOWN)


@pytest.mark.parametrize("hyps", [
    [Hypothesis("a", 1.0, {"↑": 1.0})],
    [Hypothesis("a", 0.6, {"↑": 1.0}), Hypothesis("b", 0.6, {"↑": 1.0})],
    [Hypothesis("a", 0.5, {"↑": 1.0}), Hypothesis("a", 0.5, {"↑": 1.0})],
])
def test_bad_hypotheses(hyps):
    with pytest.raises(ValueError):
        update_credence(hyps, UP)


def test_unknown_outcome():
    with pytest.raises(ValueError):
        update_credence(alice_bob_hypotheses(), "x")


# -- model comparison -----------------------------------------------------------------

def exact_window(p: Fraction, N: int, lo: int, hi: int) -> Fraction:
    return sum((math.comb(N, n) * p ** n * (1 - p) ** (N - n) for n in range(lo, hi + 1)), Fraction(0))


def test_compare_directionality():
    rep = model_compare([0.75, 0.5, 0.0], 100, window=0.05)
    assert rep.support(0.75, "EQM") > rep.support(0.75, "NBC")
    assert rep.support(0.5, "NBC") > rep.support(0.5, "EQM")
    assert rep.support(0.0, "EQM") < 1e-10 and rep.support(0.0, "NBC") < 1e-10
    assert rep.support(0.75, "EQM") == rep.support(0.75, "CQM")


def test_compare_supports_match_rationals():
    rep = model_compare([0.75, 0.5], 100, window=0.05)
    # window 0.05 at N=100 covers counts center +- 5
    assert rep.support(0.75, "EQM") == pytest.approx(float(exact_window(Fraction(3, 4), 100, 70, 80)), abs=1e-13)
    assert rep.support(0.5, "NBC") == pytest.approx(float(exact_window(Fraction(1, 2), 100, 45, 55)), abs=1e-13)
    assert rep.support(0.5, "EQM") == pytest.approx(float(exact_window(Fraction(3, 4), 100, 45, 55)), abs=1e-18)


def test_compare_default_window_is_two_sigma():
    rep = model_compare([0.75], 400)
    assert rep.rows[0]["windows"]["EQM"] == pytest.approx(2 * math.sqrt(0.75 * 0.25 / 400))
    assert rep.rows[0]["windows"]["NBC"] == pytest.approx(2 * math.sqrt(0.25 / 400))
    assert rep.rows[0]["ranking"][-1] == "NBC"


def test_compare_output_formats():
    rep = model_compare([0.75], 10, models=(Model("A", 0.75, "world fraction"),
                                            Model("B", 0.5, "world fraction")))
    rows = rep.csv_rows()
    assert rows[0] == ["scenario", "model", "kind", "window", "support", "rank"]
    assert len(rows) == 3
    assert rep.to_json()["N"] == 10


@pytest.mark.parametrize("args", [([0.5], 0), ([1.5], 10)])
def test_compare_rejects(args):
    with pytest.raises(ValueError):
        model_compare(*args)


def test_half_life():
    rep = half_life_report(0.5, 100)
    assert rep["all_decayed"] == 2.0 ** -100 and rep["none_decayed"] == 2.0 ** -100
    want = exact_window(Fraction(1, 2), 100, 35, 65)
    assert rep["within_window"] == pytest.approx(float(want), abs=1e-13)
    assert rep["sigma"] == pytest.approx(0.05)


@pytest.mark.parametrize("p, n", [(0.0, 10), (1.0, 10), (0.5, 0)])
def test_half_life_rejects(p, n):
    with pytest.raises(ValueError):
        half_life_report(p, n)
