"""Exact finite probability distributions over named coordinates.

Masses are :class:`fractions.Fraction` and are stored sparsely (zero-mass
outcomes are dropped).  An outcome is a tuple with one symbol per coordinate
of the schema.  Entropies are the only floating point quantities; they use
base-2 logarithms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .errors import SchemaMismatch, ValidationError, ZeroProbabilityError

Symbol = Hashable
Outcome = tuple
Schema = tuple  # tuple[tuple[str, tuple[Symbol, ...]], ...]

ENTROPY_TOL = 1e-9


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("float masses are not accepted; pass Fraction, int or 'num/den'")
    return Fraction(value)


def _normalize_schema(schema) -> Schema:
    out = []
    seen = set()
    for name, alphabet in schema:
        if name in seen:
            raise SchemaMismatch(f"duplicate coordinate name {name!r}")
        seen.add(name)
        alphabet = tuple(alphabet)
        if len(set(alphabet)) != len(alphabet):
            raise SchemaMismatch(f"alphabet of {name!r} has repeated symbols")
        out.append((name, alphabet))
    return tuple(out)


class Distribution:
    """A probability distribution with exact rational masses.

    Parameters
    ----------
    schema :
        Sequence of ``(name, alphabet)`` pairs.
    mass :
        Mapping from outcome tuples to masses.  Masses must be nonnegative and
        sum to exactly one.
    """

    __slots__ = ("_schema", "_mass", "_index")

    def __init__(self, schema, mass: Mapping[Outcome, object], *, validate: bool = True):
        self._schema = _normalize_schema(schema)
        self._index = tuple({s: i for i, s in enumerate(alph)} for _, alph in self._schema)
        clean = {}
        for outcome, m in mass.items():
            m = as_fraction(m)
            if m == 0:
                continue
            clean[tuple(outcome)] = clean.get(tuple(outcome), 0) + m
        self._mass = clean
        if validate:
            self._validate()

    def _validate(self):
        arity = len(self._schema)
        total = Fraction(0)
        for outcome, m in self._mass.items():
            if len(outcome) != arity:
                raise ValidationError(f"outcome {outcome!r} has arity {len(outcome)}, expected {arity}")
            for sym, idx, (name, _) in zip(outcome, self._index, self._schema):
                if sym not in idx:
                    raise ValidationError(f"symbol {sym!r} not in alphabet of {name!r}")
            if m < 0:
                raise ValidationError(f"negative mass {m} at {outcome!r}")
            total += m
        if total != 1:
            raise ValidationError(f"masses sum to {total}, not 1 (deficit {1 - total})")

    # construction helpers

    @classmethod
    def point(cls, schema, outcome) -> "Distribution":
        return cls(schema, {tuple(outcome): 1})

    @classmethod
    def uniform(cls, schema, support: Iterable[Outcome] | None = None) -> "Distribution":
        schema = _normalize_schema(schema)
        if support is None:
            support = itertools.product(*(alph for _, alph in schema))
        support = [tuple(o) for o in support]
        if not support:
            raise ValidationError("uniform distribution over an empty set")
        w = Fraction(1, len(support))
        return cls(schema, {o: w for o in support})

    @classmethod
    def from_probs(cls, name: str, alphabet: Sequence, probs: Sequence) -> "Distribution":
        """Single-coordinate distribution with ``probs[i]`` on ``alphabet[i]``."""
        if len(alphabet) != len(probs):
            raise SchemaMismatch("alphabet and probability vector differ in length")
        return cls(((name, alphabet),), {(s,): p for s, p in zip(alphabet, probs)})

    # accessors

    @property
    def schema(self) -> Schema:
        return self._schema

    @property
    def names(self) -> tuple:
        return tuple(n for n, _ in self._schema)

    def alphabet(self, name: str) -> tuple:
        return self._schema[self.position(name)][1]

    def position(self, name: str) -> int:
        for i, (n, _) in enumerate(self._schema):
            if n == name:
                return i
        raise SchemaMismatch(f"unknown coordinate {name!r}; have {self.names}")

    def sort_key(self, outcome: Outcome) -> tuple:
        return tuple(idx[s] for idx, s in zip(self._index, outcome))

    def __getitem__(self, outcome) -> Fraction:
        return self._mass.get(tuple(outcome), Fraction(0))

    def __len__(self):
        return len(self._mass)

    def __iter__(self):
        return iter(self.support())

    def items(self):
        """Outcome/mass pairs in alphabet order."""
        return [(o, self._mass[o]) for o in self.support()]

    def support(self) -> list:
        return sorted(self._mass, key=self.sort_key)

    def as_dict(self) -> dict:
        return dict(self._mass)

    def prob(self, event: Callable[[dict], bool]) -> Fraction:
        names = self.names
        return sum((m for o, m in self._mass.items() if event(dict(zip(names, o)))), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return self._schema == other._schema and self._mass == other._mass

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"{o!r}: {m}" for o, m in self.items()[:8])
        more = "" if len(self._mass) <= 8 else f", ... ({len(self._mass)} outcomes)"
        return f"Distribution({list(self.names)}, {{{body}{more}}})"


@dataclass(frozen=True)
class ConditionalDistribution:
    """A channel from ``given_schema`` outcomes to distributions over ``output_schema``.

    Rows absent from ``rows`` are supplied by ``fill`` (uniform over the
    output alphabets unless another filler is given).
    """

    given_schema: Schema
    output_schema: Schema
    rows: Mapping
    fill: Callable | None = None

    def __post_init__(self):
        object.__setattr__(self, "given_schema", _normalize_schema(self.given_schema))
        object.__setattr__(self, "output_schema", _normalize_schema(self.output_schema))
        for g, row in self.rows.items():
            if row.schema != self.output_schema:
                raise SchemaMismatch(f"row {g!r} has schema {row.names}, expected output schema")

    @property
    def given_names(self) -> tuple:
        return tuple(n for n, _ in self.given_schema)

    @property
    def output_names(self) -> tuple:
        return tuple(n for n, _ in self.output_schema)

    def row(self, given) -> Distribution:
        given = tuple(given)
        r = self.rows.get(given)
        if r is not None:
            return r
        if self.fill is not None:
            return self.fill(given)
        return Distribution.uniform(self.output_schema)


def _positions(P: Distribution, names: Sequence[str]) -> list:
    return [P.position(n) for n in names]


def _check_same_schema(P: Distribution, Q: Distribution):
    if P.schema != Q.schema:
        raise SchemaMismatch(f"schemas differ: {P.names} vs {Q.names}")


def statistical_distance(P: Distribution, Q: Distribution) -> Fraction:
    """Half the l1 distance between two distributions on the same schema."""
    _check_same_schema(P, Q)
    p, q = P._mass, Q._mass
    total = Fraction(0)
    for o in p.keys() | q.keys():
        total += abs(p.get(o, 0) - q.get(o, 0))
    return total / 2


def marginal(P: Distribution, names: Sequence[str]) -> Distribution:
    """Marginal on ``names``, in the order given."""
    if isinstance(names, str):
        names = [names]
    pos = _positions(P, names)
    out: dict = {}
    for o, m in P._mass.items():
        key = tuple(o[i] for i in pos)
        out[key] = out.get(key, 0) + m
    return Distribution([P.schema[i] for i in pos], out, validate=False)


def condition(P: Distribution, event: Callable[[dict], bool]) -> Distribution:
    """Restriction of ``P`` to ``event``, renormalized.

    ``event`` receives each outcome as a ``{name: symbol}`` dict.
    """
    names = P.names
    kept = {o: m for o, m in P._mass.items() if event(dict(zip(names, o)))}
    pr = sum(kept.values(), Fraction(0))
    if pr == 0:
        raise ZeroProbabilityError("conditioning on an event of probability zero")
    return Distribution(P.schema, {o: m / pr for o, m in kept.items()}, validate=False)


def condition_on(P: Distribution, **fixed) -> Distribution:
    """Condition on coordinates taking fixed values."""
    return condition(P, lambda o: all(o[k] == v for k, v in fixed.items()))


def conditional(P: Distribution, given: Sequence[str], output: Sequence[str], fill=None) -> ConditionalDistribution:
    """Extract ``P_{output | given}``; zero-probability rows are left to ``fill``."""
    gpos = _positions(P, given)
    opos = _positions(P, output)
    joint: dict = {}
    for o, m in P._mass.items():
        g = tuple(o[i] for i in gpos)
        v = tuple(o[i] for i in opos)
        row = joint.setdefault(g, {})
        row[v] = row.get(v, 0) + m
    out_schema = [P.schema[i] for i in opos]
    rows = {}
    for g, row in joint.items():
        tot = sum(row.values(), Fraction(0))
        rows[g] = Distribution(out_schema, {v: m / tot for v, m in row.items()}, validate=False)
    return ConditionalDistribution([P.schema[i] for i in gpos], out_schema, rows, fill)


def compose(P: Distribution, K: ConditionalDistribution) -> Distribution:
    """Joint law ``P(o) * K(out | o[given])``; the output coordinates are appended."""
    gpos = _positions(P, K.given_names)
    for name in K.output_names:
        if name in P.names:
            raise SchemaMismatch(f"output coordinate {name!r} already present")
    for (gn, galph), i in zip(K.given_schema, gpos):
        if P.schema[i][1] != galph:
            raise SchemaMismatch(f"alphabet of {gn!r} differs between distribution and channel")
    out: dict = {}
    for o, m in P._mass.items():
        row = K.row(tuple(o[i] for i in gpos))
        for v, k in row._mass.items():
            key = o + v
            out[key] = out.get(key, 0) + m * k
    return Distribution(P.schema + K.output_schema, out, validate=False)


def product(*dists: Distribution) -> Distribution:
    """Independent product; coordinates are concatenated."""
    schema = tuple(itertools.chain.from_iterable(d.schema for d in dists))
    out = {}
    for combo in itertools.product(*(d._mass.items() for d in dists)):
        o = tuple(itertools.chain.from_iterable(c[0] for c in combo))
        m = Fraction(1)
        for c in combo:
            m *= c[1]
        out[o] = m
    return Distribution(schema, out, validate=False)


def product_power(P: Distribution, n: int) -> Distribution:
    """n-fold independent product with each coordinate grouped into an n-tuple.

    A coordinate ``X`` with alphabet ``A`` becomes a coordinate ``X`` with
    alphabet ``A^n`` (tuples in lexicographic alphabet order).
    """
    if n < 1:
        raise ValueError("n must be positive")
    schema = [(name, tuple(itertools.product(alph, repeat=n))) for name, alph in P.schema]
    arity = len(P.schema)
    out = {}
    for combo in itertools.product(P._mass.items(), repeat=n):
        m = Fraction(1)
        for _, w in combo:
            m *= w
        o = tuple(tuple(c[0][k] for c in combo) for k in range(arity))
        out[o] = m
    return Distribution(schema, out, validate=False)


def pushforward(P: Distribution, fn: Callable[[Outcome], Outcome], schema) -> Distribution:
    """Law of ``fn(outcome)`` under ``P``; ``fn`` acts on outcome tuples."""
    out: dict = {}
    for o, m in P._mass.items():
        key = tuple(fn(o))
        out[key] = out.get(key, 0) + m
    return Distribution(schema, out)


def relative_entropy(P: Distribution, Q: Distribution) -> float:
    """Kullback-Leibler divergence in bits; ``inf`` if P is not dominated by Q."""
    _check_same_schema(P, Q)
    total = 0.0
    for o, p in P._mass.items():
        q = Q._mass.get(o, 0)
        if q == 0:
            return math.inf
        # log of the exact ratio avoids cancellation between log p and log q
        r = p / q
        total += float(p) * (math.log2(r.numerator) - math.log2(r.denominator))
    return max(total, 0.0) if abs(total) < ENTROPY_TOL else total


def _group_key(o: Outcome, pos: Sequence[int]) -> tuple:
    return tuple(o[i] for i in pos)


def markov_deficiency(P: Distribution, t: Sequence[str], u: Sequence[str], v: Sequence[str]) -> Fraction:
    """Distance of ``P_TUV`` from ``P_U P_{T|U} P_{V|U}``.

    Zero exactly when ``T <-> U <-> V`` is a Markov chain.  Groups may share
    coordinates.
    """
    tp, up, vp = _positions(P, t), _positions(P, u), _positions(P, v)
    joint: dict = {}
    pu: dict = {}
    ptu: dict = {}
    puv: dict = {}
    for o, m in P._mass.items():
        tk, uk, vk = _group_key(o, tp), _group_key(o, up), _group_key(o, vp)
        joint[(tk, uk, vk)] = joint.get((tk, uk, vk), 0) + m
        pu[uk] = pu.get(uk, 0) + m
        ptu.setdefault(uk, {})
        ptu[uk][tk] = ptu[uk].get(tk, 0) + m
        puv.setdefault(uk, {})
        puv[uk][vk] = puv[uk].get(vk, 0) + m
    total = Fraction(0)
    for uk, mu in pu.items():
        for tk, mt in ptu[uk].items():
            for vk, mv in puv[uk].items():
                total += abs(joint.get((tk, uk, vk), 0) - mt * mv / mu)
    return total / 2


def is_product(P: Distribution, groups: Sequence[Sequence[str]] | None = None) -> bool:
    """Whether ``P`` equals the product of its marginals on ``groups``."""
    if groups is None:
        groups = [[n] for n in P.names]
    flat = [n for g in groups for n in g]
    if sorted(flat) != sorted(P.names):
        raise SchemaMismatch("groups must partition the coordinates")
    prod = product(*(marginal(P, g) for g in groups))
    return marginal(P, flat) == prod


@dataclass(frozen=True)
class ConditioningReport:
    pr_event: Fraction
    distances: tuple  # per-coordinate ||P_{U_j|W} - P_{U_j}||
    sum_sq: Fraction
    rhs_product_bound: float  # 2^(-sum of squared distances)
    sum_distances: Fraction
    rhs_distance_sum: float  # sqrt(k log(1/Pr[W]))

    @property
    def lhs(self) -> Fraction:
        return self.pr_event

    def holds(self, tol: float = ENTROPY_TOL) -> bool:
        return (float(self.pr_event) <= self.rhs_product_bound + tol
                and float(self.sum_distances) <= self.rhs_distance_sum + tol)


def conditioning_bound_report(P: Distribution, event: Callable[[dict], bool]) -> ConditioningReport:
    """Both sides of the product-conditioning inequalities for ``P`` and ``event``.

    ``P`` must factor exactly over its coordinates.
    """
    if not is_product(P):
        raise ValidationError("distribution is not a product over its coordinates")
    PW = condition(P, event)
    pr = P.prob(event)
    dists = tuple(statistical_distance(marginal(PW, [n]), marginal(P, [n])) for n in P.names)
    sum_sq = sum((d * d for d in dists), Fraction(0))
    k = len(P.names)
    return ConditioningReport(
        pr_event=pr,
        distances=dists,
        sum_sq=sum_sq,
        rhs_product_bound=2.0 ** (-float(sum_sq)),
        sum_distances=sum(dists, Fraction(0)),
        rhs_distance_sum=math.sqrt(k * _log2_inv(pr)),
    )


def _log2_inv(p: Fraction) -> float:
    """log2(1/p) for a positive rational, without float underflow."""
    p = as_fraction(p)
    return math.log2(p.denominator) - math.log2(p.numerator)


@dataclass(frozen=True)
class DisjointRepsReport:
    terms: tuple
    lhs_sum: Fraction
    rhs: float
    v_star: int
    pr_event: Fraction

    def holds(self, tol: float = ENTROPY_TOL) -> bool:
        return float(self.lhs_sum) <= self.rhs + tol


def disjointreps_report(P: Distribution, t: Sequence[str], us: Sequence[str], v: Sequence[str],
                        event: Callable[[dict], bool]) -> DisjointRepsReport:
    """Side information version of the conditioning inequality.

    Requires the ``us`` coordinates to be independent given ``t``; checked
    exactly.  Returns ``sum_j ||P_{T U_j V|W} - P_{TV|W} P_{U_j|T}||`` and
    ``sqrt(k) sqrt(log|V*| + log(1/Pr[W]))``.
    """
    t, v = list(t), list(v)
    for j in range(1, len(us)):
        if markov_deficiency(P, list(us[:j]), t, [us[j]]) != 0:
            raise ValidationError(f"{us[j]!r} is not independent of {list(us[:j])} given {t}")
    PW = condition(P, event)
    pr = P.prob(event)
    terms = []
    for uj in us:
        lhs = marginal(PW, t + [uj] + v)
        rhs = compose(marginal(PW, t + v), conditional(P, t, [uj]))
        rhs = marginal(rhs, t + [uj] + v)
        terms.append(statistical_distance(lhs, rhs))
    v_star = len(marginal(PW, v)) if v else 1
    k = len(us)
    rhs_val = math.sqrt(k) * math.sqrt(math.log2(v_star) + _log2_inv(pr))
    return DisjointRepsReport(tuple(terms), sum(terms, Fraction(0)), rhs_val, v_star, pr)
