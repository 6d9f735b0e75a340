"""Exact fractional product covers and product factorizations of channels.

A fractional product cover of a 0/1 matrix ``Q`` over ``A x B`` is a pair of
tables ``f(a, i)``, ``g(b, i)`` with entries in ``[0, 1]`` such that
``Q(a, b) = sum_i f(a, i) g(b, i)``.  A channel ``P_{Z|AB}`` is of product
form if ``P(z | a, b) = f(a, z) g(b, z)``; :func:`factorize` finds such tables
whenever they exist.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import CrossRatioError, SchemaMismatch, ValidationError
from .games import Game
from .prob import ConditionalDistribution, Distribution, compose, markov_deficiency, product

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class FractionalCover:
    a_alphabet: tuple
    b_alphabet: tuple
    alpha: int
    f: Mapping  # (a, i) -> Fraction, i in 1..alpha
    g: Mapping  # (b, i) -> Fraction

    def __post_init__(self):
        object.__setattr__(self, "a_alphabet", tuple(self.a_alphabet))
        object.__setattr__(self, "b_alphabet", tuple(self.b_alphabet))
        if self.alpha < 1:
            raise ValidationError("cover size must be at least 1")
        f = {(a, i): Fraction(self.f.get((a, i), 0)) for a in self.a_alphabet for i in range(1, self.alpha + 1)}
        g = {(b, i): Fraction(self.g.get((b, i), 0)) for b in self.b_alphabet for i in range(1, self.alpha + 1)}
        for key in set(self.f) - set(f):
            raise ValidationError(f"f entry {key!r} outside the alphabet or index range")
        for key in set(self.g) - set(g):
            raise ValidationError(f"g entry {key!r} outside the alphabet or index range")
        for table in (f, g):
            for key, v in table.items():
                if not 0 <= v <= 1:
                    raise ValidationError(f"cover entry {key!r} = {v} is outside [0, 1]")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)

    def value(self, a, b) -> Fraction:
        return sum((self.f[(a, i)] * self.g[(b, i)] for i in range(1, self.alpha + 1)), ZERO)


def verify_cover(Q: Mapping, cover: FractionalCover) -> bool:
    """Exact check of ``Q(a, b) = sum_i f(a, i) g(b, i)`` for every cell.

    ``Q`` maps ``(a, b)`` to 0/1 for every pair of the cover's alphabets.
    """
    expected = {(a, b) for a in cover.a_alphabet for b in cover.b_alphabet}
    if set(Q) != expected:
        raise SchemaMismatch("predicate cells do not match the cover's alphabets")
    return all(cover.value(a, b) == int(bool(Q[(a, b)])) for a, b in expected)


def predicate_slice(g: Game, x, y) -> dict:
    """``Q(x, y, ., .)`` as a 0/1 matrix."""
    return {(a, b): int(g.win(x, y, a, b)) for a in g.a_alphabet for b in g.b_alphabet}


@dataclass(frozen=True)
class RectanglePartition:
    rects: tuple  # ((a_subset, b_subset), ...)

    def __post_init__(self):
        object.__setattr__(self, "rects", tuple((tuple(r[0]), tuple(r[1])) for r in self.rects))

    def cells(self) -> list:
        return [set(itertools.product(as_, bs)) for as_, bs in self.rects]


def cover_from_partition(p: RectanglePartition, a_alphabet: Sequence, b_alphabet: Sequence,
                         Q: Mapping | None = None) -> FractionalCover:
    """Indicator cover with one index per rectangle.

    Rectangles must be pairwise disjoint; if ``Q`` is given their union must
    be exactly its 1-set.  The empty partition gives the all-zero cover of
    size one.
    """
    cells = p.cells()
    seen: set = set()
    for k, c in enumerate(cells):
        for a, b in c:
            if a not in a_alphabet or b not in b_alphabet:
                raise ValidationError(f"rectangle {k} contains {(a, b)!r} outside the alphabets")
        overlap = seen & c
        if overlap:
            raise ValidationError(f"rectangle {k} overlaps earlier rectangles at {sorted(overlap, key=repr)[:3]}")
        seen |= c
    if Q is not None:
        ones = {ab for ab, v in Q.items() if v}
        if ones != seen:
            raise ValidationError(f"rectangles cover {len(seen)} cells but the predicate has {len(ones)} ones "
                                  f"(symmetric difference {sorted(ones ^ seen, key=repr)[:3]})")
    if not p.rects:
        return FractionalCover(a_alphabet, b_alphabet, 1, {}, {})
    f = {(a, i): ONE for i, (as_, _) in enumerate(p.rects, 1) for a in as_}
    g = {(b, i): ONE for i, (_, bs) in enumerate(p.rects, 1) for b in bs}
    return FractionalCover(a_alphabet, b_alphabet, len(p.rects), f, g)


def singleton_partition(Q: Mapping) -> RectanglePartition:
    """One rectangle per winning cell, in cell order."""
    return RectanglePartition(tuple(((a,), (b,)) for (a, b), v in Q.items() if v))


# --- channels of product form -------------------------------------------------

def _check_channel(PZ: ConditionalDistribution):
    if PZ.given_names != ("a", "b") or PZ.output_names != ("z",):
        raise SchemaMismatch("channel must map (a, b) to z")


def markov_under_product(PZ: ConditionalDistribution, P_A: Distribution, P_B: Distribution) -> Fraction:
    """Deficiency of ``A <-> Z <-> B`` for ``P_A P_B P_{Z|AB}``."""
    _check_channel(PZ)
    if P_A.schema != (PZ.given_schema[0],) or P_B.schema != (PZ.given_schema[1],):
        raise SchemaMismatch("priors do not match the channel's input alphabets")
    joint = compose(product(P_A, P_B), PZ)
    return markov_deficiency(joint, ["a"], ["z"], ["b"])


def _table(PZ: ConditionalDistribution, z) -> dict:
    A, B = PZ.given_schema[0][1], PZ.given_schema[1][1]
    return {(a, b): PZ.row((a, b))[(z,)] for a in A for b in B}


def cross_ratio_witness(PZ: ConditionalDistribution):
    """First ``(z, a, a', b, b')`` with ``P(z|a,b) P(z|a',b') != P(z|a,b') P(z|a',b)``, else ``None``."""
    _check_channel(PZ)
    A, B = PZ.given_schema[0][1], PZ.given_schema[1][1]
    for z in PZ.output_schema[0][1]:
        t = _table(PZ, z)
        for a, a2 in itertools.combinations(A, 2):
            for b, b2 in itertools.combinations(B, 2):
                if t[(a, b)] * t[(a2, b2)] != t[(a, b2)] * t[(a2, b)]:
                    return (z, a, a2, b, b2)
    return None


@dataclass(frozen=True)
class Factorization:
    f: dict  # (a, z) -> Fraction
    g: dict  # (b, z) -> Fraction
    steps: dict  # z -> number of tightening steps

    def value(self, a, b, z) -> Fraction:
        return self.f[(a, z)] * self.g[(b, z)]


def _factor_slice(t: dict, A: Sequence, B: Sequence):
    """Tables with ``f(a) g(b) = t(a, b)`` for one output symbol, starting from ``f = g = 1``.

    Invariant: ``f(a) g(b) >= t(a, b)`` everywhere.  Each step picks the
    strict pair with the *largest* ratio ``t / (f g)`` (first in order on
    ties) and lowers ``f(a1)`` or, failing that, ``g(b1)`` until the pair is
    tight.  With the largest ratio one of the two updates always keeps the
    invariant when the cross-ratio condition holds; the smallest ratio does
    not (counterexample ``t = [[1/3, 1/2], [2/3, 1]]``).
    """
    f = {a: ONE for a in A}
    g = {b: ONE for b in B}
    steps = 0
    while True:
        best = None
        for a in A:
            for b in B:
                prod = f[a] * g[b]
                if prod > t[(a, b)]:
                    q = t[(a, b)] / prod
                    if best is None or q > best[0]:
                        best = (q, a, b)
        if best is None:
            return f, g, steps
        _, a1, b1 = best
        f_new = dict(f)
        f_new[a1] = t[(a1, b1)] / g[b1]
        if all(f_new[a1] * g[b] >= t[(a1, b)] for b in B):
            f = f_new
        else:
            g_new = dict(g)
            g_new[b1] = t[(a1, b1)] / f[a1]
            if not all(f[a] * g_new[b1] >= t[(a, b1)] for a in A):
                raise AssertionError("neither update preserves the domination invariant")
            g = g_new
        steps += 1
        if steps > len(A) * len(B):
            raise AssertionError("factorization did not terminate within |A||B| steps")


def factorize(PZ: ConditionalDistribution) -> Factorization:
    """Find ``f, g`` with values in ``[0, 1]`` and ``P(z | a, b) = f(a, z) g(b, z)``.

    Raises :class:`CrossRatioError` with a witness when no such tables exist.
    """
    w = cross_ratio_witness(PZ)
    if w is not None:
        raise CrossRatioError(*w)
    A, B = PZ.given_schema[0][1], PZ.given_schema[1][1]
    f, g, steps = {}, {}, {}
    for z in PZ.output_schema[0][1]:
        t = _table(PZ, z)
        if not any(t.values()):
            for a in A:
                f[(a, z)] = ZERO
            for b in B:
                g[(b, z)] = ZERO
            steps[z] = 0
            continue
        fz, gz, k = _factor_slice(t, A, B)
        for a in A:
            f[(a, z)] = fz[a]
        for b in B:
            g[(b, z)] = gz[b]
        steps[z] = k
    return Factorization(f, g, steps)


def channel_from_tables(A: Sequence, B: Sequence, Z: Sequence, f: Mapping, g: Mapping) -> ConditionalDistribution:
    """``P(z | a, b) = f(a, z) g(b, z)``; rows must sum to one."""
    schema_out = (("z", tuple(Z)),)
    rows = {}
    for a in A:
        for b in B:
            rows[(a, b)] = Distribution(schema_out, {(z,): Fraction(f[(a, z)]) * Fraction(g[(b, z)]) for z in Z})
    return ConditionalDistribution((("a", tuple(A)), ("b", tuple(B))), schema_out, rows)


def recompose(PZ: ConditionalDistribution, fac: Factorization) -> bool:
    """Exact entry-wise check of ``f * g`` against the channel."""
    A, B = PZ.given_schema[0][1], PZ.given_schema[1][1]
    return all(fac.value(a, b, z) == PZ.row((a, b))[(z,)]
               for a in A for b in B for z in PZ.output_schema[0][1])


# --- channels derived from covers -------------------------------------------

def z_channel_from_cover(g: Game, covers: Mapping) -> ConditionalDistribution:
    """Channel ``(x, y, a, b) -> z`` built from one cover per question pair.

    On winning tuples ``z = ("win", i)`` with probability ``f(a, i) g(b, i)``;
    on losing tuples ``z = ("lose", a, b)``.  Question pairs without a
    supplied cover use the one-rectangle-per-cell cover.
    """
    slices = {}
    for x in g.x_alphabet:
        for y in g.y_alphabet:
            Q = predicate_slice(g, x, y)
            c = covers.get((x, y))
            if c is None:
                if g.query[(x, y)] > 0:
                    raise ValidationError(f"no cover supplied for question pair {(x, y)!r}")
                c = cover_from_partition(singleton_partition(Q), g.a_alphabet, g.b_alphabet)
            if not verify_cover(Q, c):
                raise ValidationError(f"cover for {(x, y)!r} does not reproduce the predicate")
            slices[(x, y)] = c
    alpha = max(c.alpha for c in slices.values())
    z_alph = tuple(("win", i) for i in range(1, alpha + 1)) + \
        tuple(("lose", a, b) for a in g.a_alphabet for b in g.b_alphabet)
    out_schema = (("z", z_alph),)
    rows = {}
    for (x, y), c in slices.items():
        for a in g.a_alphabet:
            for b in g.b_alphabet:
                if g.win(x, y, a, b):
                    mass = {(("win", i),): c.f[(a, i)] * c.g[(b, i)] for i in range(1, c.alpha + 1)}
                else:
                    mass = {(("lose", a, b),): ONE}
                rows[(x, y, a, b)] = Distribution(out_schema, mass)
    given = (("x", g.x_alphabet), ("y", g.y_alphabet), ("a", g.a_alphabet), ("b", g.b_alphabet))
    return ConditionalDistribution(given, out_schema, rows)


def channel_slice(Z: ConditionalDistribution, x, y) -> ConditionalDistribution:
    """The ``(a, b) -> z`` channel of a question pair."""
    A = Z.given_schema[2][1]
    B = Z.given_schema[3][1]
    rows = {(a, b): Z.row((x, y, a, b)) for a in A for b in B}
    return ConditionalDistribution((("a", A), ("b", B)), Z.output_schema, rows)


def cover_size(covers: Mapping) -> int:
    return max(c.alpha for c in covers.values())
