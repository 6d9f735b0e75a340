"""Two-prover games: strategies, exact classical value, parallel repetition."""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import BudgetExceeded, SchemaMismatch, ValidationError, ZeroProbabilityError
from .prob import Distribution, product_power, _log2_inv

DEFAULT_BUDGET = 2 ** 24


def budget() -> int:
    """Enumeration budget, overridable through ``GAMELAB_BUDGET``."""
    raw = os.environ.get("GAMELAB_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


class TablePredicate:
    """Predicate given by the set of winning ``(x, y, a, b)`` tuples."""

    def __init__(self, wins):
        self.wins = frozenset(tuple(w) for w in wins)

    def __call__(self, x, y, a, b) -> bool:
        return (x, y, a, b) in self.wins


class AndPredicate:
    """Coordinatewise conjunction of a base predicate over n-tuples."""

    def __init__(self, base: Callable, n: int):
        self.base = base
        self.n = n

    def coordinates(self, x, y, a, b) -> tuple:
        q = self.base
        return tuple(bool(q(x[i], y[i], a[i], b[i])) for i in range(self.n))

    def __call__(self, x, y, a, b) -> bool:
        q = self.base
        return all(q(x[i], y[i], a[i], b[i]) for i in range(self.n))


@dataclass(frozen=True, eq=False)
class Game:
    """A query distribution over ``X x Y`` and a winning predicate over ``X x Y x A x B``.

    ``query`` has coordinates ``("x", "y")``.  For a repeated game ``base`` is
    the single-round game and ``n`` the number of rounds; symbols are then
    n-tuples of base symbols.
    """

    x_alphabet: tuple
    y_alphabet: tuple
    a_alphabet: tuple
    b_alphabet: tuple
    query: Distribution
    predicate: Callable
    base: "Game | None" = None
    n: int = 1
    name: str = ""

    def __post_init__(self):
        for f in ("x_alphabet", "y_alphabet", "a_alphabet", "b_alphabet"):
            object.__setattr__(self, f, tuple(getattr(self, f)))
        if self.query.schema != (("x", self.x_alphabet), ("y", self.y_alphabet)):
            raise SchemaMismatch("query schema must be (('x', X), ('y', Y)) matching the game alphabets")

    @classmethod
    def from_table(cls, x_alphabet, y_alphabet, a_alphabet, b_alphabet, query: Mapping, wins,
                   name: str = "") -> "Game":
        """Build from ``{(x, y): p}`` and an iterable of winning ``(x, y, a, b)``."""
        q = Distribution((("x", x_alphabet), ("y", y_alphabet)), dict(query))
        wins = list(wins)
        for w in wins:
            x, y, a, b = w
            if x not in x_alphabet or y not in y_alphabet or a not in a_alphabet or b not in b_alphabet:
                raise ValidationError(f"predicate entry {w!r} outside the alphabets")
        return cls(x_alphabet, y_alphabet, a_alphabet, b_alphabet, q, TablePredicate(wins), name=name)

    def win(self, x, y, a, b) -> bool:
        return bool(self.predicate(x, y, a, b))

    def coordinate_wins(self, x, y, a, b) -> tuple:
        """Per-round win flags ``(W_1, ..., W_n)``."""
        if self.base is None:
            return (self.win(x, y, a, b),)
        return AndPredicate(self.base.predicate, self.n).coordinates(x, y, a, b)

    @property
    def sizes(self) -> tuple:
        return len(self.x_alphabet), len(self.y_alphabet), len(self.a_alphabet), len(self.b_alphabet)

    def queries(self):
        """Positive-mass ``((x, y), p)`` pairs in alphabet order."""
        return [((x, y), p) for (x, y), p in self.query.items()]

    def win_table(self):
        """Winning ``(x, y, a, b)`` tuples over positive-mass queries."""
        out = []
        for (x, y), _ in self.queries():
            for a in self.a_alphabet:
                for b in self.b_alphabet:
                    if self.win(x, y, a, b):
                        out.append((x, y, a, b))
        return out


@dataclass(frozen=True)
class DeterministicStrategy:
    alice: Mapping  # x -> a
    bob: Mapping  # y -> b

    def check(self, g: Game):
        if set(self.alice) != set(g.x_alphabet) or set(self.bob) != set(g.y_alphabet):
            raise SchemaMismatch("strategy domain does not match the game's question alphabets")
        if not set(self.alice.values()) <= set(g.a_alphabet) or not set(self.bob.values()) <= set(g.b_alphabet):
            raise SchemaMismatch("strategy answers outside the game's answer alphabets")

    @classmethod
    def constant(cls, g: Game, a, b) -> "DeterministicStrategy":
        return cls({x: a for x in g.x_alphabet}, {y: b for y in g.y_alphabet})


@dataclass(frozen=True)
class SharedRandomnessStrategy:
    """A finite mixture of deterministic strategies driven by shared randomness."""

    components: tuple  # ((weight, DeterministicStrategy), ...)

    def __post_init__(self):
        comps = tuple((Fraction(w), s) for w, s in self.components)
        if not comps:
            raise ValidationError("empty mixture")
        if any(w < 0 for w, _ in comps) or sum(w for w, _ in comps) != 1:
            raise ValidationError("mixture weights must be nonnegative and sum to 1")
        object.__setattr__(self, "components", comps)


@dataclass(frozen=True)
class WinEventSpec:
    """Indices (1-based) of the rounds whose wins are conditioned on."""

    indices: tuple = ()

    def __post_init__(self):
        idx = tuple(sorted(set(int(i) for i in self.indices)))
        if len(idx) != len(tuple(self.indices)):
            raise ValidationError("duplicate indices in win event")
        object.__setattr__(self, "indices", idx)

    def check(self, n: int):
        if any(i < 1 or i > n for i in self.indices):
            raise ValidationError(f"win indices {self.indices} invalid for n={n}")


def _as_spec(cond) -> WinEventSpec:
    return cond if isinstance(cond, WinEventSpec) else WinEventSpec(tuple(cond))


def win_probability(g: Game, s: DeterministicStrategy) -> Fraction:
    s.check(g)
    return sum((p for (x, y), p in g.queries() if g.win(x, y, s.alice[x], s.bob[y])), Fraction(0))


def strategy_count(g: Game) -> int:
    nx, ny, na, nb = g.sizes
    return na ** nx * nb ** ny


def iter_strategies(g: Game):
    """All deterministic strategies in lexicographic order of their tables."""
    for ha in itertools.product(g.a_alphabet, repeat=len(g.x_alphabet)):
        alice = dict(zip(g.x_alphabet, ha))
        for hb in itertools.product(g.b_alphabet, repeat=len(g.y_alphabet)):
            yield DeterministicStrategy(alice, dict(zip(g.y_alphabet, hb)))


def classical_value(g: Game, limit: int | None = None) -> tuple:
    """Exact value over deterministic strategies and the lexicographically first optimal witness.

    Alice's table is enumerated; Bob's best response is computed per
    question, which equals brute force over all pairs.
    """
    limit = budget() if limit is None else limit
    required = strategy_count(g)
    if required > limit:
        raise BudgetExceeded("classical value enumeration", required, limit)
    by_y: dict = {}
    for (x, y), p in g.queries():
        by_y.setdefault(y, []).append((x, p))
    win_sets = {}
    for (x, y), _ in g.queries():
        for b in g.b_alphabet:
            win_sets[(x, y, b)] = frozenset(a for a in g.a_alphabet if g.win(x, y, a, b))
    best_val = None
    best = None
    for ha in itertools.product(g.a_alphabet, repeat=len(g.x_alphabet)):
        alice = dict(zip(g.x_alphabet, ha))
        total = Fraction(0)
        bob = {}
        for y in g.y_alphabet:
            best_b, best_w = g.b_alphabet[0], Fraction(-1)
            for b in g.b_alphabet:
                w = sum((p for x, p in by_y.get(y, ()) if alice[x] in win_sets[(x, y, b)]), Fraction(0))
                if w > best_w:
                    best_b, best_w = b, w
            bob[y] = best_b
            total += best_w
        if best_val is None or total > best_val:
            best_val, best = total, DeterministicStrategy(alice, bob)
    return best_val, best


def derandomize(g: Game, s: SharedRandomnessStrategy) -> DeterministicStrategy:
    """A component of the mixture doing at least as well as the mixture itself."""
    best, best_val = None, None
    for w, comp in s.components:
        if w == 0:
            continue
        val = win_probability(g, comp)
        if best_val is None or val > best_val:
            best, best_val = comp, val
    return best


def mixture_win_probability(g: Game, s: SharedRandomnessStrategy) -> Fraction:
    return sum((w * win_probability(g, c) for w, c in s.components), Fraction(0))


def repeat(g: Game, n: int, limit: int | None = None) -> Game:
    """n-fold parallel repetition.  The AND predicate is evaluated lazily."""
    if n < 1:
        raise ValueError("n must be positive")
    limit = budget() if limit is None else limit
    size = math.prod(k ** n for k in g.sizes)
    if size > limit:
        raise BudgetExceeded(f"repetition {n} alphabets", size, limit)
    query = product_power(g.query, n)
    xs = tuple(itertools.product(g.x_alphabet, repeat=n))
    ys = tuple(itertools.product(g.y_alphabet, repeat=n))
    as_ = tuple(itertools.product(g.a_alphabet, repeat=n))
    bs = tuple(itertools.product(g.b_alphabet, repeat=n))
    return Game(xs, ys, as_, bs, query, AndPredicate(g.predicate, n), base=g, n=n,
                name=f"{g.name}^{n}" if g.name else "")


def joint_distribution(g: Game, s: DeterministicStrategy) -> Distribution:
    """Law of ``(x, y, a, b)`` when the players follow ``s``."""
    s.check(g)
    schema = (("x", g.x_alphabet), ("y", g.y_alphabet), ("a", g.a_alphabet), ("b", g.b_alphabet))
    return Distribution(schema, {(x, y, s.alice[x], s.bob[y]): p for (x, y), p in g.queries()})


def product_strategy(strategies: Sequence[DeterministicStrategy]) -> DeterministicStrategy:
    """Play the i-th strategy in round i."""
    n = len(strategies)
    xs = itertools.product(*(tuple(s.alice) for s in strategies))
    alice = {x: tuple(strategies[i].alice[x[i]] for i in range(n)) for x in xs}
    ys = itertools.product(*(tuple(s.bob) for s in strategies))
    bob = {y: tuple(strategies[i].bob[y[i]] for i in range(n)) for y in ys}
    return DeterministicStrategy(alice, bob)


def cross_strategy(g2: Game) -> DeterministicStrategy:
    """For a two-fold repetition: each player answers round i with its question of round 3-i."""
    if g2.n != 2:
        raise ValidationError("cross strategy needs a two-fold repetition")
    base = g2.base
    if set(base.x_alphabet) - set(base.a_alphabet) or set(base.y_alphabet) - set(base.b_alphabet):
        raise ValidationError("cross strategy needs question symbols usable as answers")
    return DeterministicStrategy({x: (x[1], x[0]) for x in g2.x_alphabet},
                                 {y: (y[1], y[0]) for y in g2.y_alphabet})


def _wins_under(g_n: Game, s: DeterministicStrategy):
    s.check(g_n)
    for (x, y), p in g_n.queries():
        yield g_n.coordinate_wins(x, y, s.alice[x], s.bob[y]), p


def conditional_win_probabilities(g_n: Game, s: DeterministicStrategy, cond) -> dict:
    """``Pr[W_j | all W_i, i in cond]`` for every round ``j`` outside ``cond``."""
    cond = _as_spec(cond)
    cond.check(g_n.n)
    return _conditional_wins(list(_wins_under(g_n, s)), g_n.n, cond.indices)


def _conditional_wins(weighted_wins, n: int, cond: tuple) -> dict:
    pr = Fraction(0)
    joint = [Fraction(0)] * n
    for wins, p in weighted_wins:
        if all(wins[i - 1] for i in cond):
            pr += p
            for j in range(n):
                if wins[j]:
                    joint[j] += p
    if pr == 0:
        raise ZeroProbabilityError(f"Pr[W_i for i in {cond}] = 0")
    return {j: joint[j - 1] / pr for j in range(1, n + 1) if j not in cond}


def conditioning_probability(g_n: Game, s: DeterministicStrategy, cond) -> Fraction:
    cond = _as_spec(cond)
    return sum((p for w, p in _wins_under(g_n, s) if all(w[i - 1] for i in cond.indices)), Fraction(0))


@dataclass(frozen=True)
class ConditionedValueCheck:
    min_conditional: Fraction
    argmin: int
    value: Fraction
    pr_condition: Fraction
    bound_rhs: float
    holds: bool
    conditionals: dict = field(default_factory=dict)


def conditioned_value_check(g: Game, n: int, s: DeterministicStrategy, cond, constant: float = 15.0,
                  log_size: float | None = None) -> ConditionedValueCheck:
    """Check ``min_j Pr[W_j | W_cond] <= v + c sqrt((m log|A||B| + log 1/Pr[W_cond]) / (n - m))``."""
    cond = _as_spec(cond)
    g_n = repeat(g, n)
    m = len(cond.indices)
    if m >= n:
        raise ValidationError("conditioning on every round leaves no round to bound")
    cw = conditional_win_probabilities(g_n, s, cond)
    pr = conditioning_probability(g_n, s, cond)
    v, _ = classical_value(g)
    if log_size is None:
        log_size = math.log2(len(g.a_alphabet) * len(g.b_alphabet))
    rhs = float(v) + constant * math.sqrt(1.0 / (n - m)) * math.sqrt(m * log_size + _log2_inv(pr))
    j = min(cw, key=lambda k: (cw[k], k))
    return ConditionedValueCheck(cw[j], j, v, pr, rhs, float(cw[j]) <= rhs, cw)


def fortnow() -> Game:
    """Fortnow's counterexample, variant with queries 00, 01, 10 uniform."""
    third = Fraction(1, 3)
    query = {(0, 0): third, (0, 1): third, (1, 0): third}
    wins = [(x, y, a, b) for x in (0, 1) for y in (0, 1) for a in (0, 1) for b in (0, 1)
            if (x | a) != (y | b)]
    return Game.from_table((0, 1), (0, 1), (0, 1), (0, 1), query, wins, name="fortnow")


def chsh() -> Game:
    query = {(x, y): Fraction(1, 4) for x in (0, 1) for y in (0, 1)}
    wins = [(x, y, a, b) for x in (0, 1) for y in (0, 1) for a in (0, 1) for b in (0, 1)
            if (a ^ b) == (x & y)]
    return Game.from_table((0, 1), (0, 1), (0, 1), (0, 1), query, wins, name="chsh")


BUILTINS = {"fortnow": fortnow, "chsh": chsh}


def builtin(name: str) -> Game:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ValidationError(f"unknown builtin game {name!r}; choose from {sorted(BUILTINS)}") from None
