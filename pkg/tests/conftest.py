"""Shared generators for random small instances."""

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from pargame.games import Game
from pargame.prob import Distribution


def rand_probs(rng: random.Random, k: int, denom: int = 12, zeros: bool = True) -> list:
    """``k`` rational probabilities with denominators dividing the weight total."""
    while True:
        w = [rng.randint(0 if zeros else 1, denom) for _ in range(k)]
        if sum(w):
            total = sum(w)
            return [Fraction(x, total) for x in w]


def rand_dist(rng: random.Random, schema, denom: int = 12, zeros: bool = True) -> Distribution:
    outcomes = list(itertools.product(*(a for _, a in schema)))
    probs = rand_probs(rng, len(outcomes), denom, zeros)
    return Distribution(schema, dict(zip(outcomes, probs)))


def rand_binary_game(rng: random.Random, name: str = "random") -> Game:
    """Binary questions and answers, random rational query law, random predicate."""
    bits = (0, 1)
    pairs = [(x, y) for x in bits for y in bits]
    query = dict(zip(pairs, rand_probs(rng, 4, 6)))
    wins = [(x, y, a, b) for x, y, a, b in itertools.product(bits, repeat=4) if rng.random() < 0.5]
    return Game.from_table(bits, bits, bits, bits, {k: v for k, v in query.items() if v}, wins, name=name)


def product_of_marginals(schema, rng, denom=8) -> Distribution:
    out = None
    from pargame.prob import product
    for name, al in schema:
        d = rand_dist(rng, ((name, al),), denom)
        out = d if out is None else product(out, d)
    return out


@st.composite
def distributions(draw, schema, max_weight: int = 10):
    """Hypothesis strategy for exact distributions over ``schema``."""
    outcomes = list(itertools.product(*(a for _, a in schema)))
    w = draw(st.lists(st.integers(0, max_weight), min_size=len(outcomes), max_size=len(outcomes))
             .filter(lambda ws: sum(ws) > 0))
    total = sum(w)
    return Distribution(schema, {o: Fraction(x, total) for o, x in zip(outcomes, w)})


@st.composite
def binary_games(draw):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return rand_binary_game(random.Random(seed))


@pytest.fixture
def rng():
    return random.Random(20240611)


def planted_channel(rng: random.Random, max_size: int = 5):
    """A product-form channel: z = (row block, column block, z1, z2) with z1 drawn from a and z2 from b.

    Returns ``(A, B, Z, f, g)`` with ``P(z | a, b) = f(a, z) g(b, z)``.
    """
    A = tuple(range(rng.randint(1, max_size)))
    B = tuple(range(rng.randint(1, max_size)))
    ka, kb = rng.randint(1, len(A)), rng.randint(1, len(B))
    block_a = {a: rng.randrange(ka) for a in A}
    block_b = {b: rng.randrange(kb) for b in B}
    n1, n2 = rng.randint(1, 2), rng.randint(1, 2)
    Z = tuple((i, j, z1, z2) for i in range(ka) for j in range(kb) for z1 in range(n1) for z2 in range(n2))
    p1 = {a: rand_probs(rng, n1, 4) for a in A}
    p2 = {b: rand_probs(rng, n2, 4) for b in B}
    f = {(a, z): (p1[a][z[2]] if block_a[a] == z[0] else Fraction(0)) for a in A for z in Z}
    g = {(b, z): (p2[b][z[3]] if block_b[b] == z[1] else Fraction(0)) for b in B for z in Z}
    return A, B, Z, f, g
