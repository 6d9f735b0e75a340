import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from conftest import distributions, rand_dist
from pargame.errors import SchemaMismatch, ValidationError, ZeroProbabilityError
from pargame.games import fortnow
from pargame.prob import (ConditionalDistribution, Distribution, compose, condition, condition_on,
                          conditional, conditioning_bound_report, disjointreps_report, is_product,
                          marginal, markov_deficiency, product, product_power, pushforward,
                          relative_entropy, statistical_distance)

BIT = ("b", (0, 1))


def bern(p, name="b"):
    return Distribution.from_probs(name, (0, 1), [1 - F(p), F(p)])


# --- construction ---------------------------------------------------------

def test_rejects_floats_and_bad_mass():
    with pytest.raises(TypeError):
        Distribution((BIT,), {(0,): 0.5, (1,): 0.5})
    with pytest.raises(ValidationError, match="deficit 1/18"):
        Distribution((BIT,), {(0,): F(1, 2), (1,): F(4, 9)})
    with pytest.raises(ValidationError):
        Distribution((BIT,), {(0,): F(3, 2), (1,): F(-1, 2)})
    with pytest.raises(ValidationError):
        Distribution((BIT,), {(2,): F(1)})


def test_string_masses_accepted():
    d = Distribution((BIT,), {(0,): "1/3", (1,): "2/3"})
    assert d[(1,)] == F(2, 3)


# --- statistical distance -------------------------------------------------

def test_statistical_distance_examples():
    P = bern(F(1, 2))
    assert statistical_distance(P, P) == 0
    assert statistical_distance(Distribution.point((BIT,), (0,)), Distribution.point((BIT,), (1,))) == 1
    assert statistical_distance(bern(F(1, 2)), bern(F(1, 4))) == F(1, 4)


def test_statistical_distance_schema_mismatch():
    with pytest.raises(SchemaMismatch):
        statistical_distance(bern(F(1, 2)), bern(F(1, 2), "c"))


# --- marginal / condition / compose ---------------------------------------

def test_fortnow_marginal_and_condition():
    q = fortnow().query
    px = marginal(q, ["x"])
    assert px[(0,)] == F(2, 3) and px[(1,)] == F(1, 3)
    cond = condition_on(q, x=0)
    py = marginal(cond, ["y"])
    assert py[(0,)] == F(1, 2) and py[(1,)] == F(1, 2)
    assert marginal(q, ["x", "y"]) == q


def test_condition_uniform_pairs():
    U = Distribution.uniform((("u", (0, 1)), ("v", (0, 1))))
    c = condition(U, lambda o: o["u"] == 0)
    assert c == Distribution((("u", (0, 1)), ("v", (0, 1))), {(0, 0): F(1, 2), (0, 1): F(1, 2)})
    assert condition(U, lambda o: True) == U
    with pytest.raises(ZeroProbabilityError):
        condition(U, lambda o: False)


def test_compose_constant_channel_is_product():
    P = bern(F(1, 3), "x")
    Q = bern(F(2, 5), "s")
    K = ConditionalDistribution((("x", (0, 1)),), Q.schema, {(0,): Q, (1,): Q})
    assert compose(P, K) == product(P, Q)


def test_compose_copy_channel_on_fortnow():
    q = fortnow().query
    schema = (("s", (0, 1)),)
    K = ConditionalDistribution((("x", (0, 1)),), schema,
                                {(x,): Distribution.point(schema, (x,)) for x in (0, 1)})
    joint = compose(q, K)
    assert all(o[0] == o[2] for o, _ in joint.items())
    assert marginal(joint, ["x", "y"]) == q


@settings(max_examples=50, deadline=None)
@given(distributions((("a", (0, 1, 2)), ("b", (0, 1)), ("c", (0, 1)))))
def test_chain_rule(P):
    K = conditional(P, ["a"], ["b", "c"])
    assert compose(marginal(P, ["a"]), K) == P


def test_product_power_fortnow():
    P2 = product_power(fortnow().query, 2)
    assert len(P2) == 9 and set(m for _, m in P2.items()) == {F(1, 9)}
    pt = Distribution.point((BIT,), (1,))
    assert len(product_power(pt, 3)) == 1
    P = bern(F(1, 3))
    assert len(product_power(P, 1)) == len(P)


def test_pushforward_xor():
    U = Distribution.uniform((("u", (0, 1)), ("v", (0, 1))))
    X = pushforward(U, lambda o: (o[0] ^ o[1],), (("x", (0, 1)),))
    assert X == Distribution.uniform((("x", (0, 1)),))


# --- relative entropy -----------------------------------------------------

def test_relative_entropy_examples():
    assert relative_entropy(bern(F(1, 2)), bern(F(1, 2))) == 0
    # independently: 1/2 log2(1/2 / 3/4) + 1/2 log2(1/2 / 1/4)
    expected = 0.5 * math.log2(2 / 3) + 0.5 * math.log2(2)
    assert relative_entropy(bern(F(1, 2)), bern(F(1, 4))) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.2075, abs=1e-4)
    assert relative_entropy(Distribution.point((BIT,), (0,)), bern(F(1, 2))) == pytest.approx(1.0)
    assert relative_entropy(bern(F(1, 2)), Distribution.point((BIT,), (0,))) == math.inf


@settings(max_examples=100, deadline=None)
@given(distributions((("s", (0, 1, 2)),)), distributions((("s", (0, 1, 2)),)))
def test_pinsker_form(P, Q):
    if all(Q[o] > 0 for o, _ in P.items()):
        d = float(statistical_distance(P, Q))
        assert relative_entropy(P, Q) >= d * d - 1e-9


# --- Markov deficiency ----------------------------------------------------

def test_markov_deficiency_examples():
    T, U, V = bern(F(1, 3), "t"), bern(F(1, 4), "u"), bern(F(2, 5), "v")
    assert markov_deficiency(product(T, U, V), ["t"], ["u"], ["v"]) == 0
    schema = (("t", (0, 1)), ("u", (0, 1)), ("v", (0, 1)))
    copies = Distribution(schema, {(0, 0, 0): F(1, 2), (1, 1, 1): F(1, 2)})
    assert markov_deficiency(copies, ["t"], ["u"], ["v"]) == 0
    # T = V uniform, U constant: P_TUV vs P_U P_T|U P_V|U differ by 1/2
    tv = Distribution(schema, {(0, 0, 0): F(1, 2), (1, 0, 1): F(1, 2)})
    assert markov_deficiency(tv, ["t"], ["u"], ["v"]) == F(1, 2)


def test_is_product():
    assert is_product(product(bern(F(1, 3), "x"), bern(F(1, 5), "y")))
    assert not is_product(fortnow().query)


# --- conditioning inequalities --------------------------------------------

def test_conditioning_report_two_bits():
    P = product(bern(F(1, 2), "u1"), bern(F(1, 2), "u2"))
    r = conditioning_bound_report(P, lambda o: o["u1"] == 1 and o["u2"] == 1)
    assert r.lhs == F(1, 4)
    assert r.distances == (F(1, 2), F(1, 2))
    assert r.sum_sq == F(1, 2)
    assert r.rhs_product_bound == pytest.approx(2 ** -0.5)
    assert r.rhs_distance_sum == pytest.approx(2.0)
    assert r.holds()
    t = conditioning_bound_report(P, lambda o: True)
    assert t.lhs == 1 and t.rhs_product_bound == 1 and t.sum_distances == 0


def test_conditioning_report_majority_event():
    k = 5
    P = product(*(bern(F(1, 2), f"u{i}") for i in range(k)))
    r = conditioning_bound_report(P, lambda o: sum(o.values()) >= 4)
    assert r.lhs == F(6, 32)
    eps = F(4, k) - F(1, 2)  # W = "at least k(1/2 + eps) ones"
    # Pr[u_i = 1 | W] = 5/6 by counting the six outcomes of W
    assert r.distances == (F(1, 3),) * k
    assert all(d >= eps for d in r.distances)
    assert float(r.lhs) <= 2 ** (-k * float(eps) ** 2) + 1e-12
    assert r.holds()


def test_conditioning_report_rejects_non_product():
    with pytest.raises(ValidationError):
        conditioning_bound_report(fortnow().query, lambda o: True)


def test_disjointreps_two_bits():
    schema = (("t", (0,)), ("u1", (0, 1)), ("u2", (0, 1)), ("v", (0,)))
    P = Distribution.uniform(schema)
    r = disjointreps_report(P, ["t"], ["u1", "u2"], ["v"], lambda o: o["u1"] == 1 and o["u2"] == 1)
    assert r.lhs_sum == 1
    assert r.rhs == pytest.approx(2.0)  # sqrt(2) * sqrt(log2 1 + log2 4)
    assert r.holds()
    triv = disjointreps_report(Distribution.uniform((("t", (0,)), ("u1", (0,)), ("v", (0,)))),
                               ["t"], ["u1"], ["v"], lambda o: True)
    assert triv.lhs_sum == 0 and triv.rhs == 0


def test_disjointreps_requires_conditional_independence():
    schema = (("t", (0,)), ("u1", (0, 1)), ("u2", (0, 1)), ("v", (0,)))
    P = Distribution(schema, {(0, 0, 0, 0): F(1, 2), (0, 1, 1, 0): F(1, 2)})
    with pytest.raises(ValidationError):
        disjointreps_report(P, ["t"], ["u1", "u2"], ["v"], lambda o: True)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_conditioning_inequalities_random(seed):
    rng = random.Random(seed)
    k = rng.randint(1, 4)
    from conftest import product_of_marginals
    schema = tuple((f"u{i}", tuple(range(rng.randint(2, 3)))) for i in range(k))
    P = product_of_marginals(schema, rng)
    outcomes = [o for o, _ in P.items()]
    chosen = set(rng.sample(outcomes, rng.randint(1, len(outcomes))))
    r = conditioning_bound_report(P, lambda o: tuple(o.values()) in chosen)
    assert r.holds()
