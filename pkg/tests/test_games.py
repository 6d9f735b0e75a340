import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from conftest import rand_binary_game
from pargame.errors import BudgetExceeded, SchemaMismatch, ValidationError, ZeroProbabilityError
from pargame.games import (DeterministicStrategy, Game, SharedRandomnessStrategy, WinEventSpec, builtin,
                           chsh, classical_value, conditional_win_probabilities, conditioning_probability,
                           cross_strategy, derandomize, fortnow, iter_strategies, joint_distribution,
                           conditioned_value_check, mixture_win_probability, product_strategy, repeat,
                           strategy_count, win_probability)
from pargame.prob import marginal

BITS = (0, 1)


def brute_value(g: Game) -> F:
    """Independent oracle: every (h_a, h_b) pair, predicate evaluated directly."""
    best = F(-1)
    for ha in itertools.product(g.a_alphabet, repeat=len(g.x_alphabet)):
        for hb in itertools.product(g.b_alphabet, repeat=len(g.y_alphabet)):
            fa, fb = dict(zip(g.x_alphabet, ha)), dict(zip(g.y_alphabet, hb))
            w = sum((p for (x, y), p in g.query.items() if g.predicate(x, y, fa[x], fb[y])), F(0))
            best = max(best, w)
    return best


def constant_game(win: bool) -> Game:
    wins = [(x, y, a, b) for x, y, a, b in itertools.product(BITS, repeat=4)] if win else []
    return Game.from_table(BITS, BITS, BITS, BITS, {(0, 0): F(1, 2), (1, 1): F(1, 2)}, wins)


def test_fortnow_predicate_table():
    g = fortnow()
    # x OR a must differ from y OR b
    assert g.win(0, 0, 1, 0) and g.win(0, 1, 0, 0) and not g.win(0, 0, 0, 0)
    assert not g.win(1, 0, 0, 1) and g.win(1, 0, 0, 0)
    assert len(g.queries()) == 3


def test_win_probability_examples():
    zero = DeterministicStrategy({0: 0, 1: 0}, {0: 0, 1: 0})
    assert win_probability(fortnow(), zero) == F(2, 3)
    assert win_probability(chsh(), zero) == F(3, 4)
    assert win_probability(constant_game(True), zero) == 1


def test_classical_values():
    assert classical_value(fortnow())[0] == F(2, 3)
    assert classical_value(chsh())[0] == F(3, 4)
    assert classical_value(constant_game(False))[0] == 0
    assert classical_value(constant_game(True))[0] == 1
    v, s = classical_value(chsh())
    assert win_probability(chsh(), s) == v


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_classical_value_matches_brute_force(seed):
    g = rand_binary_game(random.Random(seed))
    v, s = classical_value(g)
    assert v == brute_value(g)
    assert win_probability(g, s) == v


def test_strategy_checks():
    with pytest.raises(SchemaMismatch):
        win_probability(fortnow(), DeterministicStrategy({0: 0}, {0: 0, 1: 0}))
    with pytest.raises(SchemaMismatch):
        win_probability(fortnow(), DeterministicStrategy({0: 5, 1: 0}, {0: 0, 1: 0}))
    assert strategy_count(fortnow()) == 16
    assert len(list(iter_strategies(fortnow()))) == 16


def test_derandomize():
    g = fortnow()
    zero = DeterministicStrategy.constant(g, 0, 0)
    # both always answer 1: x OR 1 = y OR 1 on every query, so they never win
    ones = DeterministicStrategy.constant(g, 1, 1)
    assert win_probability(g, ones) == 0
    mix = SharedRandomnessStrategy(((F(1, 2), ones), (F(1, 2), zero)))
    assert mixture_win_probability(g, mix) == F(1, 3)
    assert derandomize(g, mix) == zero
    assert derandomize(g, SharedRandomnessStrategy(((1, zero),))) == zero
    everything = list(iter_strategies(g))
    uniform = SharedRandomnessStrategy(tuple((F(1, 16), s) for s in everything))
    best = derandomize(g, uniform)
    assert win_probability(g, best) == F(2, 3)
    assert win_probability(g, best) >= mixture_win_probability(g, uniform)
    with pytest.raises(ValidationError):
        SharedRandomnessStrategy(((F(1, 2), zero),))


def test_repeat_fortnow():
    g2 = repeat(fortnow(), 2)
    assert len(g2.queries()) == 9
    assert {p for _, p in g2.queries()} == {F(1, 9)}
    assert g2.n == 2 and g2.base is not None
    g1 = repeat(fortnow(), 1)
    assert [((x[0], y[0]), p) for (x, y), p in g1.queries()] == fortnow().queries()
    assert classical_value(g1)[0] == F(2, 3)
    t3 = repeat(constant_game(True), 3)
    assert all(t3.win(x, y, a, b) for (x, y), _ in t3.queries() for a in t3.a_alphabet[:3]
               for b in t3.b_alphabet[:3])


def test_repeat_budget(monkeypatch):
    monkeypatch.setenv("GAMELAB_BUDGET", "1000")
    with pytest.raises(BudgetExceeded, match="GAMELAB_BUDGET"):
        repeat(fortnow(), 3)
    with pytest.raises(BudgetExceeded):
        classical_value(repeat(fortnow(), 1), limit=4)


def test_joint_distribution():
    g = fortnow()
    s = DeterministicStrategy.constant(g, 0, 0)
    J = joint_distribution(g, s)
    assert len(J) == 3
    assert marginal(J, ["x", "y"]) == g.query
    det = Game.from_table(BITS, BITS, BITS, BITS, {(1, 0): 1}, [])
    assert len(joint_distribution(det, DeterministicStrategy.constant(det, 1, 0))) == 1


def test_fortnow_squared_value_and_cross_strategy():
    g2 = repeat(fortnow(), 2)
    s = cross_strategy(g2)
    assert win_probability(g2, s) == F(2, 3)
    cw = conditional_win_probabilities(g2, s, WinEventSpec((2,)))
    assert cw == {1: F(1)}
    assert conditioning_probability(g2, s, (2,)) == F(2, 3)


def test_independent_strategy_conditionals():
    g = fortnow()
    v, opt = classical_value(g)
    g2 = repeat(g, 2)
    s = product_strategy([opt, opt])
    assert conditional_win_probabilities(g2, s, (2,)) == {1: v}
    assert win_probability(g2, s) == v * v


def _oracle_conditionals(g, n, s, cond):
    pr, joint = F(0), {j: F(0) for j in range(1, n + 1) if j not in cond}
    for xs in itertools.product(g.x_alphabet, repeat=n):
        for ys in itertools.product(g.y_alphabet, repeat=n):
            p = F(1)
            for x, y in zip(xs, ys):
                p *= g.query[(x, y)]
            if not p:
                continue
            a, b = s.alice[xs], s.bob[ys]
            w = [g.predicate(xs[i], ys[i], a[i], b[i]) for i in range(n)]
            if all(w[i - 1] for i in cond):
                pr += p
                for j in joint:
                    joint[j] += p if w[j - 1] else 0
    return {j: v / pr for j, v in joint.items()} if pr else None


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_conditional_wins_match_enumeration(seed):
    rng = random.Random(seed)
    g = rand_binary_game(rng)
    g2 = repeat(g, 2)
    s = DeterministicStrategy({x: rng.choice(g2.a_alphabet) for x in g2.x_alphabet},
                              {y: rng.choice(g2.b_alphabet) for y in g2.y_alphabet})
    want = _oracle_conditionals(g, 2, s, (2,))
    if want is None:
        with pytest.raises(ZeroProbabilityError):
            conditional_win_probabilities(g2, s, (2,))
    else:
        assert conditional_win_probabilities(g2, s, (2,)) == want


def test_conditioned_value_examples():
    g = fortnow()
    g2 = repeat(g, 2)
    r = conditioned_value_check(g, 2, cross_strategy(g2), (2,))
    assert r.min_conditional == 1 and r.holds and r.bound_rhs > 1
    v, opt = classical_value(g)
    r0 = conditioned_value_check(g, 2, product_strategy([opt, opt]), ())
    assert r0.bound_rhs == pytest.approx(float(v))
    assert r0.min_conditional <= v and r0.holds
    with pytest.raises(ValidationError):
        conditioned_value_check(g, 2, cross_strategy(g2), (1, 2))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([2, 3]))
def test_conditioned_value_holds_on_random_games(seed, n):
    rng = random.Random(seed)
    g = rand_binary_game(rng)
    g_n = repeat(g, n)
    s = DeterministicStrategy({x: rng.choice(g_n.a_alphabet) for x in g_n.x_alphabet},
                              {y: rng.choice(g_n.b_alphabet) for y in g_n.y_alphabet})
    cond = tuple(sorted(rng.sample(range(1, n + 1), rng.randint(0, n - 1))))
    try:
        r = conditioned_value_check(g, n, s, cond)
    except ZeroProbabilityError:
        return
    assert r.holds


def test_win_event_spec():
    with pytest.raises(ValidationError):
        WinEventSpec((1, 1))
    with pytest.raises(ValidationError):
        WinEventSpec((3,)).check(2)


def test_builtin_lookup():
    assert builtin("chsh").name == "chsh"
    with pytest.raises(ValidationError):
        builtin("nope")
