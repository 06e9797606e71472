import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlgames.boxes import Box, deterministic_box, pr_d_mixture, random_ns_box, uniform_box
from nlgames.game import (
    PURE_STRATEGIES,
    Fairness,
    GameParams,
    PayoffPair,
    PureStrategy,
    UtilityTable,
    average_payoffs,
    classify_fairness,
    find_pure_nash,
    is_advice_equilibrium,
    pure_payoff_table,
    pure_strategy_box,
    utility_from_params,
)
from oracles import brute_nash, brute_payoffs, table2

G1, G2, G3, G4 = PURE_STRATEGIES
positive = st.floats(min_value=0.01, max_value=2.0, allow_nan=False)


def test_rejects_nonpositive_params():
    for k, t in [(0, 1), (1, 0), (-0.5, 1), (1, -2)]:
        with pytest.raises(ValueError):
            GameParams(k, t)


def test_utility_table_entries():
    u = utility_from_params(GameParams(0.5, 1.0))
    assert u.u_B[0, 0, 1, 1] == 1.0
    assert u.u_A[0, 1, 1, 1] == 0.5
    for k, t in [(0.5, 1), (2, 3), (1, 0.5)]:
        u = utility_from_params(GameParams(k, t))
        assert u.u_A[1, 1, 0, 0] == 0
        assert u.u_A[1, 1, 1, 0] == 0.75
        assert u.u_B[1, 1, 0, 1] == 0.75
        assert u.u_A[1, 0, 0, 0] == 1 and u.u_B[1, 0, 0, 0] == k
    np.testing.assert_array_equal(u.prior, np.full((2, 2), 0.25))


def test_prior_must_be_distribution():
    u = utility_from_params(GameParams(1, 1))
    with pytest.raises(ValueError):
        UtilityTable(u.u_A, u.u_B, np.array([0.5, 0.5, 0.5, -0.5]))
    with pytest.raises(ValueError):
        UtilityTable(u.u_A, u.u_B, np.array([0.3, 0.3, 0.3, 0.3]))


@pytest.mark.parametrize("g", PURE_STRATEGIES)
def test_pure_strategy_maps(g):
    expected = {G1: (0, 0), G2: (1, 1), G3: (0, 1), G4: (1, 0)}[g]
    assert (g(0), g(1)) == expected


def test_pure_strategy_box_examples():
    b = pure_strategy_box(G1, G3)
    assert b.p[1, 1, 0, 1] == 1.0 and b.p[0, 0, 0, 0] == 1.0
    b = pure_strategy_box(G1, G1)
    assert all(b.p[i, j, 0, 0] == 1.0 for i, j in itertools.product((0, 1), repeat=2))
    b = pure_strategy_box(G3, G4)
    assert b.p[1, 1, 1, 0] == 1.0


def test_average_payoffs_examples(table):
    assert average_payoffs(table, pure_strategy_box(G1, G3)) == PayoffPair(11 / 16, 7 / 16)
    pay = average_payoffs(table, pr_d_mixture(0.5))
    assert pay.alice == pytest.approx(0.71875, abs=1e-12)
    assert pay.bob == pytest.approx(0.59375, abs=1e-12)


def test_deterministic_00_advice_is_prior_average(table):
    pay = average_payoffs(table, deterministic_box((0, 0), (0, 0)))
    assert pay.alice == pytest.approx(np.sum(table.prior * table.u_A[:, :, 0, 0]), abs=1e-15)
    assert pay.bob == pytest.approx(np.sum(table.prior * table.u_B[:, :, 0, 0]), abs=1e-15)


def test_average_payoffs_with_custom_prior():
    base = utility_from_params(GameParams(0.5, 1.0))
    prior = np.array([[0.1, 0.2], [0.3, 0.4]])
    t = UtilityTable(base.u_A, base.u_B, prior)
    b = uniform_box()
    expect = sum(
        prior[xa, xb] * 0.25 * base.u_A[xa, xb, ya, yb]
        for xa, xb, ya, yb in itertools.product((0, 1), repeat=4)
    )
    assert average_payoffs(t, b).alice == pytest.approx(expect, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(positive, positive)
def test_pure_payoff_table_matches_symbolic(k, t):
    grid = pure_payoff_table(GameParams(k, t))
    sym = table2(k, t)
    for a, b in itertools.product(range(4), repeat=2):
        fa, fb = sym[a + 1, b + 1]
        assert abs(grid[a][b].alice - fa) <= 1e-12
        assert abs(grid[a][b].bob - fb) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(positive, positive)
def test_find_pure_nash_matches_brute_force(k, t):
    got = {(PURE_STRATEGIES.index(e.alice) + 1, PURE_STRATEGIES.index(e.bob) + 1)
           for e in find_pure_nash(GameParams(k, t))}
    expected, _ = brute_nash(k, t)
    assert got == expected


def test_find_pure_nash_pklszdk():
    report = find_pure_nash(GameParams(0.5, 1.0))
    got = {(e.alice, e.bob): (e.payoffs.alice, e.payoffs.bob, e.fairness) for e in report}
    assert got == {
        (G1, G3): (11 / 16, 7 / 16, Fairness.UNFAIR_TO_B),
        (G3, G4): (9 / 16, 9 / 16, Fairness.FAIR),
        (G4, G2): (7 / 16, 11 / 16, Fairness.UNFAIR_TO_A),
    }


def test_find_pure_nash_all_unfair():
    report = find_pure_nash(GameParams(2, 3))
    assert len(report) == 3
    assert all(e.payoffs.bob > e.payoffs.alice for e in report)
    assert all(e.fairness is Fairness.UNFAIR_TO_A for e in report)


def test_find_pure_nash_single_equilibrium():
    report = find_pure_nash(GameParams(1, 0.5))
    assert report.pairs() == {(G1, G1)}
    assert list(report)[0].payoffs == PayoffPair(0.75, 0.75)


def test_find_pure_nash_boundary_reports_ties():
    report = find_pure_nash(GameParams(0.75, 1.0))
    assert {(G1, G3), (G1, G1)} <= report.pairs()


@pytest.mark.parametrize("seed", range(4))
def test_equilibrium_region_law(seed):
    rng = np.random.default_rng(seed)
    low = {(G1, G3), (G3, G4), (G4, G2)}
    high = {(G1, G1), (G3, G4), (G4, G2)}
    for _ in range(50):
        k = rng.uniform(0.01, 1.5)
        if abs(k - 0.75) < 1e-6:
            continue
        t = k + rng.uniform(0.01, 2.0)
        assert find_pure_nash(GameParams(k, t)).pairs() == (low if k < 0.75 else high)


def test_classify_fairness():
    assert classify_fairness(PayoffPair(9 / 16, 9 / 16)) is Fairness.FAIR
    assert classify_fairness(PayoffPair(11 / 16, 7 / 16)) is Fairness.UNFAIR_TO_B
    assert classify_fairness(PayoffPair(7 / 16, 11 / 16)) is Fairness.UNFAIR_TO_A
    assert classify_fairness(PayoffPair(0.5, 0.5 + 1e-12), tol=1e-9) is Fairness.FAIR


@settings(max_examples=50, deadline=None)
@given(positive, positive, st.integers(0, 2**32 - 1), st.floats(0, 1))
def test_payoffs_linear_in_advice(k, t, seed, w):
    rng = np.random.default_rng(seed)
    table = utility_from_params(GameParams(k, t))
    b1, b2 = random_ns_box(rng), random_ns_box(rng)
    mixed = average_payoffs(table, b1.mix(b2, w))
    p1, p2 = average_payoffs(table, b1), average_payoffs(table, b2)
    assert mixed.alice == pytest.approx(w * p1.alice + (1 - w) * p2.alice, abs=1e-12)
    assert mixed.bob == pytest.approx(w * p1.bob + (1 - w) * p2.bob, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(positive, positive, st.integers(0, 2**32 - 1))
def test_average_payoffs_matches_brute_sum(k, t, seed):
    b = random_ns_box(np.random.default_rng(seed))
    pay = average_payoffs(utility_from_params(GameParams(k, t)), b)
    fa, fb = brute_payoffs(k, t, lambda *idx: b.p[idx])
    assert pay.alice == pytest.approx(fa, abs=1e-12)
    assert pay.bob == pytest.approx(fb, abs=1e-12)


def test_payoffs_within_utility_range(rng):
    table = utility_from_params(GameParams(2, 3))
    for _ in range(100):
        pay = average_payoffs(table, random_ns_box(rng))
        assert 0 <= pay.alice <= table.max_utility()
        assert 0 <= pay.bob <= table.max_utility()


def test_invalid_advice_rejected():
    p = np.full((2, 2, 2, 2), 0.25)
    p[0, 0, 0, 0] = -0.1
    with pytest.raises(ValueError):
        Box(p)
    with pytest.raises(ValueError):
        Box(np.full(16, 0.3))


class TestAdviceEquilibrium:
    def test_nash_box_is_equilibrium(self, table):
        ok, dev = is_advice_equilibrium(table, pure_strategy_box(G1, G3))
        assert ok
        assert dev.gain <= 1e-12

    def test_non_nash_box_has_profitable_deviation(self, table):
        ok, dev = is_advice_equilibrium(table, pure_strategy_box(G1, G1))
        assert not ok
        assert dev.player == "B"
        assert dev.gain == pytest.approx(7 / 16 - 3 / 8, abs=1e-12)

    def test_single_point_mixture(self, table):
        b = pure_strategy_box(G3, G4)
        assert is_advice_equilibrium(table, b.mix(b, 0.3))[0]

    @pytest.mark.parametrize("a,b", list(itertools.product(range(4), repeat=2)))
    def test_deterministic_advice_matches_pure_nash(self, table, a, b):
        ga, gb = PURE_STRATEGIES[a], PURE_STRATEGIES[b]
        nash = (ga, gb) in find_pure_nash(GameParams(0.5, 1.0)).pairs()
        assert is_advice_equilibrium(table, pure_strategy_box(ga, gb))[0] == nash


def test_local_advice_never_beats_every_equilibrium(rng):
    # Sampled check that local advice cannot improve both players over an
    # unfair equilibrium of G(1/2, 1).
    from nlgames.boxes import deterministic_boxes

    table = utility_from_params(GameParams(0.5, 1.0))
    verts = np.array([d.p for d in deterministic_boxes()])
    for _ in range(2000):
        w = rng.dirichlet(np.full(16, 0.2))
        pay = average_payoffs(table, Box(np.tensordot(w, verts, axes=1)))
        assert not (pay.alice > 11 / 16 and pay.bob > 7 / 16)
        assert not (pay.alice > 7 / 16 and pay.bob > 11 / 16)
        assert not (pay.alice > 9 / 16 and pay.bob > 9 / 16)


@pytest.mark.parametrize("ref", [(11 / 16, 7 / 16), (9 / 16, 9 / 16), (7 / 16, 11 / 16)])
def test_local_advice_best_margin_is_zero(ref):
    # LP: max t with F_A - ref_A >= t, F_B - ref_B >= t over mixtures of the 16 vertices.
    from scipy.optimize import linprog

    from nlgames.boxes import deterministic_boxes

    table = utility_from_params(GameParams(0.5, 1.0))
    pay = np.array([tuple(average_payoffs(table, d)) for d in deterministic_boxes()])
    a_ub = np.hstack([-pay.T, np.ones((2, 1))])
    res = linprog(
        np.r_[np.zeros(16), -1.0], A_ub=a_ub, b_ub=[-ref[0], -ref[1]],
        A_eq=[np.r_[np.ones(16), 0.0]], b_eq=[1.0],
        bounds=[(0, None)] * 16 + [(None, None)], method="highs",
    )
    assert res.status == 0
    assert -res.fun == pytest.approx(0.0, abs=1e-12)


def test_pure_strategy_labels():
    assert [g.label for g in PURE_STRATEGIES] == ["g1", "g2", "g3", "g4"]
    assert PureStrategy.IDENTITY.label == "g3"
