"""No-signaling boxes, the exact no-signaling value, and the projection onto no-signaling channels."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import lp as _lp
from .errors import BudgetExceeded, SchemaMismatch, ValidationError
from .games import (ConditionedValueCheck, DeterministicStrategy, Game, _as_spec, _conditional_wins, budget,
                    repeat)
from .prob import (ConditionalDistribution, Distribution, _log2_inv, compose, conditional, marginal,
                   statistical_distance)

ZERO = Fraction(0)


class Box:
    """A conditional distribution ``p(a, b | x, y)`` for every question pair.

    ``table`` maps ``(x, y)`` to a :class:`Distribution` with coordinates
    ``("a", "b")``.  Construction does not require the no-signaling
    equalities; use :func:`is_no_signaling` to test them.
    """

    def __init__(self, x_alphabet, y_alphabet, a_alphabet, b_alphabet, table: Mapping):
        self.x_alphabet = tuple(x_alphabet)
        self.y_alphabet = tuple(y_alphabet)
        self.a_alphabet = tuple(a_alphabet)
        self.b_alphabet = tuple(b_alphabet)
        self.schema = (("a", self.a_alphabet), ("b", self.b_alphabet))
        table = dict(table)
        for x in self.x_alphabet:
            for y in self.y_alphabet:
                if (x, y) not in table:
                    raise ValidationError(f"box has no row for question pair {(x, y)!r}")
                if table[(x, y)].schema != self.schema:
                    raise SchemaMismatch(f"row {(x, y)!r} is not a distribution over (a, b)")
        self.table = {(x, y): table[(x, y)] for x in self.x_alphabet for y in self.y_alphabet}

    def __getitem__(self, xy) -> Distribution:
        return self.table[tuple(xy)]

    def p(self, a, b, x, y) -> Fraction:
        return self.table[(x, y)][(a, b)]

    def alice_marginal(self, x, y) -> Distribution:
        return marginal(self.table[(x, y)], ["a"])

    def bob_marginal(self, x, y) -> Distribution:
        return marginal(self.table[(x, y)], ["b"])

    def __eq__(self, other):
        if not isinstance(other, Box):
            return NotImplemented
        return (self.x_alphabet, self.y_alphabet, self.schema, self.table) == \
            (other.x_alphabet, other.y_alphabet, other.schema, other.table)

    __hash__ = None

    @classmethod
    def for_game(cls, g: Game, table: Mapping) -> "Box":
        return cls(g.x_alphabet, g.y_alphabet, g.a_alphabet, g.b_alphabet, table)

    @classmethod
    def from_strategy(cls, g: Game, s: DeterministicStrategy) -> "Box":
        s.check(g)
        schema = (("a", g.a_alphabet), ("b", g.b_alphabet))
        table = {(x, y): Distribution.point(schema, (s.alice[x], s.bob[y]))
                 for x in g.x_alphabet for y in g.y_alphabet}
        return cls.for_game(g, table)

    @classmethod
    def uniform(cls, g: Game) -> "Box":
        schema = (("a", g.a_alphabet), ("b", g.b_alphabet))
        u = Distribution.uniform(schema)
        return cls.for_game(g, {(x, y): u for x in g.x_alphabet for y in g.y_alphabet})

    def check_game(self, g: Game):
        if (self.x_alphabet, self.y_alphabet, self.a_alphabet, self.b_alphabet) != \
                (g.x_alphabet, g.y_alphabet, g.a_alphabet, g.b_alphabet):
            raise SchemaMismatch("box alphabets do not match the game")


def is_no_signaling(box: Box) -> bool:
    """Exact check that Alice's marginal ignores ``y`` and Bob's ignores ``x``."""
    for x in box.x_alphabet:
        ref = box.alice_marginal(x, box.y_alphabet[0])
        if any(box.alice_marginal(x, y) != ref for y in box.y_alphabet[1:]):
            return False
    for y in box.y_alphabet:
        ref = box.bob_marginal(box.x_alphabet[0], y)
        if any(box.bob_marginal(x, y) != ref for x in box.x_alphabet[1:]):
            return False
    return True


def box_win_probability(g: Game, box: Box) -> Fraction:
    box.check_game(g)
    total = ZERO
    for (x, y), p in g.queries():
        for (a, b), w in box[(x, y)].items():
            if g.win(x, y, a, b):
                total += p * w
    return total


def pr_box() -> Box:
    """The box with ``a xor b = x and y`` and uniform marginals."""
    schema = (("a", (0, 1)), ("b", (0, 1)))
    half = Fraction(1, 2)
    table = {}
    for x in (0, 1):
        for y in (0, 1):
            table[(x, y)] = Distribution(schema, {(a, a ^ (x & y)): half for a in (0, 1)})
    return Box((0, 1), (0, 1), (0, 1), (0, 1), table)


def tensor_boxes(boxes: Sequence[Box]) -> Box:
    """Play the i-th box independently in round i; symbols become tuples."""
    xs = tuple(itertools.product(*(b.x_alphabet for b in boxes)))
    ys = tuple(itertools.product(*(b.y_alphabet for b in boxes)))
    as_ = tuple(itertools.product(*(b.a_alphabet for b in boxes)))
    bs = tuple(itertools.product(*(b.b_alphabet for b in boxes)))
    schema = (("a", as_), ("b", bs))
    table = {}
    for x in xs:
        for y in ys:
            rows = [boxes[i][(x[i], y[i])].items() for i in range(len(boxes))]
            mass = {}
            for combo in itertools.product(*rows):
                w = Fraction(1)
                for _, m in combo:
                    w *= m
                mass[(tuple(o[0] for o, _ in combo), tuple(o[1] for o, _ in combo))] = w
            table[(x, y)] = Distribution(schema, mass, validate=False)
    return Box(xs, ys, as_, bs, table)


# --- linear program --------------------------------------------------------

def ns_polytope(g: Game, support_only: bool = True) -> _lp.LinearProgram:
    """The no-signaling polytope of ``g`` with the winning probability as objective.

    With ``support_only`` the variables are restricted to question pairs of
    positive probability.  The optimum is unchanged: any feasible point
    extends to the remaining pairs by the product of its marginals (see
    :func:`_extend_to_box`).
    """
    if support_only:
        pairs = [xy for xy, _ in g.queries()]
    else:
        pairs = [(x, y) for x in g.x_alphabet for y in g.y_alphabet]
    answers = [(a, b) for a in g.a_alphabet for b in g.b_alphabet]
    variables = tuple((a, b, x, y) for (x, y) in pairs for (a, b) in answers)
    required = len(variables)
    if required > budget():
        raise BudgetExceeded("no-signaling LP variables", required, budget())
    index = {v: i for i, v in enumerate(variables)}
    nv = len(variables)
    objective = [ZERO] * nv
    for (x, y) in pairs:
        p = g.query[(x, y)]
        for (a, b) in answers:
            if p and g.win(x, y, a, b):
                objective[index[(a, b, x, y)]] = p
    rows, rhs = [], []
    for (x, y) in pairs:
        row = [ZERO] * nv
        for (a, b) in answers:
            row[index[(a, b, x, y)]] = Fraction(1)
        rows.append(tuple(row))
        rhs.append(Fraction(1))
    by_x: dict = {}
    by_y: dict = {}
    for (x, y) in pairs:
        by_x.setdefault(x, []).append(y)
        by_y.setdefault(y, []).append(x)
    # Alice's marginal at (x, y) equals the one at (x, y0) for the first y0 paired with x
    for x, ys in by_x.items():
        for y in ys[1:]:
            for a in g.a_alphabet:
                row = [ZERO] * nv
                for b in g.b_alphabet:
                    row[index[(a, b, x, ys[0])]] += 1
                    row[index[(a, b, x, y)]] -= 1
                rows.append(tuple(row))
                rhs.append(ZERO)
    for y, xs in by_y.items():
        for x in xs[1:]:
            for b in g.b_alphabet:
                row = [ZERO] * nv
                for a in g.a_alphabet:
                    row[index[(a, b, xs[0], y)]] += 1
                    row[index[(a, b, x, y)]] -= 1
                rows.append(tuple(row))
                rhs.append(ZERO)
    return _lp.LinearProgram(variables, tuple(objective), tuple(rows), tuple(rhs))


def _extend_to_box(g: Game, values: Mapping) -> Box:
    """Complete an assignment on some question pairs to a full no-signaling box."""
    schema = (("a", g.a_alphabet), ("b", g.b_alphabet))
    rows = {}
    for (a, b, x, y), v in values.items():
        rows.setdefault((x, y), {})[(a, b)] = v
    alice, bob = {}, {}
    for (x, y), mass in rows.items():
        d = Distribution(schema, mass)
        rows[(x, y)] = d
        alice.setdefault(x, marginal(d, ["a"]))
        bob.setdefault(y, marginal(d, ["b"]))
    ua = Distribution.uniform((("a", g.a_alphabet),))
    ub = Distribution.uniform((("b", g.b_alphabet),))
    table = {}
    for x in g.x_alphabet:
        for y in g.y_alphabet:
            if (x, y) in rows:
                table[(x, y)] = rows[(x, y)]
                continue
            pa, pb = alice.get(x, ua), bob.get(y, ub)
            table[(x, y)] = Distribution(schema, {(a, b): ma * mb for (a,), ma in pa.items()
                                                  for (b,), mb in pb.items()}, validate=False)
    return Box.for_game(g, table)


@dataclass(frozen=True)
class NSValueResult:
    value: Fraction
    box: Box
    solution: _lp.LPSolution
    program: _lp.LinearProgram


def ns_solve(g: Game) -> NSValueResult:
    prog = ns_polytope(g)
    sol = _lp.solve(prog)
    values = {v: x for v, x in zip(prog.variables, sol.x)}
    box = _extend_to_box(g, values)
    return NSValueResult(sol.value, box, sol, prog)


def ns_value(g: Game) -> tuple:
    """Exact no-signaling value and an optimal box."""
    res = ns_solve(g)
    return res.value, res.box


# --- conditioned win probabilities under a box -----------------------------

def _box_weighted_wins(g_n: Game, box: Box):
    box.check_game(g_n)
    for (x, y), p in g_n.queries():
        for (a, b), w in box[(x, y)].items():
            yield g_n.coordinate_wins(x, y, a, b), p * w


def box_conditional_win_probabilities(g_n: Game, box: Box, cond) -> dict:
    cond = _as_spec(cond)
    cond.check(g_n.n)
    return _conditional_wins(list(_box_weighted_wins(g_n, box)), g_n.n, cond.indices)


def ns_conditioned_value_check(g: Game, n: int, box: Box, cond, constant: float = 10.0,
                   v_ns: Fraction | None = None) -> ConditionedValueCheck:
    """Check ``min_j Pr[W_j | W_cond] <= v_ns + c sqrt(log(1/Pr[W_cond]) / (n - m))`` for a box on ``g^n``."""
    cond = _as_spec(cond)
    g_n = g if g.n == n and g.base is not None else repeat(g, n)
    base = g_n.base if g_n.base is not None else g
    m = len(cond.indices)
    if m >= n:
        raise ValidationError("conditioning on every round leaves no round to bound")
    weighted = list(_box_weighted_wins(g_n, box))
    cw = _conditional_wins(weighted, n, cond.indices)
    pr = sum((p for w, p in weighted if all(w[i - 1] for i in cond.indices)), ZERO)
    if v_ns is None:
        v_ns, _ = ns_value(base)
    rhs = float(v_ns) + constant * math.sqrt(1.0 / (n - m)) * math.sqrt(_log2_inv(pr))
    j = min(cw, key=lambda k: (cw[k], k))
    return ConditionedValueCheck(cw[j], j, v_ns, pr, rhs, float(cw[j]) <= rhs, cw)


# --- marginal retargeting and projection -----------------------------------

def retarget_marginal(P_ST: Distribution, P_Sprime: Distribution, s_names: Sequence[str] | None = None) -> Distribution:
    """Move mass inside ``P_ST`` so its S-marginal becomes ``P_Sprime``.

    The T-marginal is untouched and the total moved mass is exactly
    ``||P_S - P_Sprime||``.  Pairs are processed in a fixed order:
    smallest deficient ``s0``, smallest excess ``s1``, smallest ``t`` with
    mass at ``(s1, t)``.
    """
    s_names = list(P_Sprime.names if s_names is None else s_names)
    spos = [P_ST.position(n) for n in s_names]
    if tuple(P_ST.schema[i] for i in spos) != P_Sprime.schema:
        raise SchemaMismatch("S coordinates of the joint and the target marginal differ")
    tpos = [i for i in range(len(P_ST.schema)) if i not in spos]

    def split(o):
        return tuple(o[i] for i in spos), tuple(o[i] for i in tpos)

    def join(s, t):
        out = [None] * len(P_ST.schema)
        for i, v in zip(spos, s):
            out[i] = v
        for i, v in zip(tpos, t):
            out[i] = v
        return tuple(out)

    mass = {split(o): m for o, m in P_ST.items()}
    cur: dict = {}
    for (s, _), m in mass.items():
        cur[s] = cur.get(s, 0) + m
    target = P_Sprime.as_dict()
    order = sorted(set(cur) | set(target), key=P_Sprime.sort_key)
    t_dist = marginal(P_ST, [P_ST.names[i] for i in tpos]) if tpos else None
    t_rank = {t: k for k, t in enumerate(t_dist.support())} if t_dist is not None else {(): 0}
    while True:
        s0 = next((s for s in order if cur.get(s, 0) < target.get(s, 0)), None)
        if s0 is None:
            break
        s1 = next(s for s in order if cur.get(s, 0) > target.get(s, 0))
        t = min((t for (s, t), m in mass.items() if s == s1 and m > 0), key=t_rank.__getitem__)
        eps = min(mass[(s1, t)], target.get(s0, 0) - cur.get(s0, 0), cur[s1] - target.get(s1, 0))
        mass[(s1, t)] -= eps
        if mass[(s1, t)] == 0:
            del mass[(s1, t)]
        mass[(s0, t)] = mass.get((s0, t), 0) + eps
        cur[s1] -= eps
        cur[s0] = cur.get(s0, 0) + eps
    return Distribution(P_ST.schema, {join(s, t): m for (s, t), m in mass.items()}, validate=False)


@dataclass(frozen=True)
class ProjectionReport:
    channel: ConditionalDistribution
    eps1: Fraction
    eps2: Fraction
    distance: Fraction

    @property
    def bound(self) -> Fraction:
        return 3 * self.eps1 + 2 * self.eps2

    @property
    def holds(self) -> bool:
        return self.distance <= self.bound


def _names(P: Distribution, names):
    return [names] if isinstance(names, str) else list(names)


def ns_project_report(P_XYST: Distribution, P_X0Y0: Distribution, x="x", y="y", s="s", t="t") -> ProjectionReport:
    """:func:`ns_project` plus the distances that bound its error."""
    xs, ys, ss, ts = (_names(P_XYST, v) for v in (x, y, s, t))
    xy = xs + ys
    P_XY = marginal(P_XYST, xy)
    if P_X0Y0.schema != P_XY.schema:
        raise SchemaMismatch("reference question distribution must share the (x, y) schema of the joint")
    P_XYS = marginal(P_XYST, xy + ss)
    P_XYT = marginal(P_XYST, xy + ts)
    S_X = conditional(P_XYST, xs, ss)
    T_Y = conditional(P_XYST, ys, ts)
    eps1 = statistical_distance(marginal(compose(P_X0Y0, S_X), xy + ss), P_XYS)
    eps2 = statistical_distance(marginal(compose(P_X0Y0, T_Y), xy + ts), P_XYT)

    ST_XY = conditional(P_XYST, xy, ss + ts)
    stage1 = {}
    for (qxy, _) in P_XY.items():
        stage1[qxy] = retarget_marginal(ST_XY.row(qxy), S_X.row(qxy[:len(xs)]), ss)
    # the T-marginal of each stage-one row equals that of the original row, so
    # the Y-conditional of T0 is the Y-conditional of T
    out_schema = ST_XY.output_schema
    rows = {}
    for qxy, row in stage1.items():
        rows[qxy] = retarget_marginal(row, T_Y.row(qxy[len(xs):]), ts)
    alph = [a for _, a in P_XY.schema]
    for qxy in itertools.product(*alph):
        if qxy in rows:
            continue
        sx = S_X.row(qxy[:len(xs)])
        ty = T_Y.row(qxy[len(xs):])
        rows[qxy] = Distribution(out_schema, {so + to: ms * mt for so, ms in sx.items() for to, mt in ty.items()},
                                 validate=False)
    channel = ConditionalDistribution(P_XY.schema, out_schema, rows)
    projected = compose(P_X0Y0, channel)
    distance = statistical_distance(projected, marginal(P_XYST, xy + ss + ts))
    return ProjectionReport(channel, eps1, eps2, distance)


def ns_project(P_XYST: Distribution, P_X0Y0: Distribution, x="x", y="y", s="s", t="t") -> ConditionalDistribution:
    """A no-signaling channel ``(x, y) -> (s, t)`` close to the one inside ``P_XYST``.

    The S-part of each row depends only on ``x`` and the T-part only on
    ``y``.  Composed with ``P_X0Y0`` it is within ``3 eps1 + 2 eps2`` of
    ``P_XYST`` where ``eps1``/``eps2`` measure how far S (T) is from being
    generated from ``x`` (``y``) alone.
    """
    return ns_project_report(P_XYST, P_X0Y0, x, y, s, t).channel


def channel_is_no_signaling(K: ConditionalDistribution, x: Sequence[str], y: Sequence[str],
                            s: Sequence[str], t: Sequence[str]) -> bool:
    """Exact test of ``P_{S|XY} = P_{S|X}`` and ``P_{T|XY} = P_{T|Y}`` on every row."""
    gnames = K.given_names
    xpos = [gnames.index(n) for n in x]
    ypos = [gnames.index(n) for n in y]
    alph = [a for _, a in K.given_schema]
    s_ref, t_ref = {}, {}
    for g in itertools.product(*alph):
        row = K.row(g)
        kx = tuple(g[i] for i in xpos)
        ky = tuple(g[i] for i in ypos)
        ms, mt = marginal(row, list(s)), marginal(row, list(t))
        if s_ref.setdefault(kx, ms) != ms or t_ref.setdefault(ky, mt) != mt:
            return False
    return True
