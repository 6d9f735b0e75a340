"""Correlated sampling from shared randomness and the local embedding of a game into its conditioned repetition.

Randomness model
----------------
A shared stream is a sequence of rounds ``(s_i, rho_i)`` with ``s_i``
uniform over a public alphabet and ``rho_i`` uniform in ``[0, 1)``.  A party
holding a distribution ``p`` outputs ``s_i`` for the first round with
``p(s_i) > rho_i``.  ``rho`` is a 53-bit dyadic rational, so the comparison is
an exact integer test ``R < ceil(p * 2**53)``; this is the only place the
sampler departs from real-valued uniforms.

Streams are keyed by ``(seed, label, counter, chunk)``; trials are processed in
chunks of ``CHUNK`` so results do not depend on how the work is split.
"""

from __future__ import annotations

import itertools
import math
import zlib
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, SamplingError, SchemaMismatch, ValidationError, ZeroProbabilityError
from .games import DeterministicStrategy, Game, _as_spec, budget, repeat
from .prob import (ConditionalDistribution, Distribution, _log2_inv, compose, conditional, marginal,
                   pushforward, statistical_distance)

PRECISION_BITS = 53
SCALE = 1 << PRECISION_BITS
CHUNK = 1 << 16
BLOCK = 16
ROUND_CAP = 10 ** 6
ZERO = Fraction(0)


@dataclass(frozen=True)
class RandomStream:
    """Deterministic source of randomness identified by ``(seed, label, counter)``."""

    seed: int
    counter: int = 0
    label: str = "shared"

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValidationError("seed must be a 64-bit unsigned integer")

    def generator(self, chunk: int = 0) -> np.random.Generator:
        key = (zlib.crc32(self.label.encode()), self.counter, chunk)
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(self.seed), spawn_key=key)))

    def child(self, label: str) -> "RandomStream":
        return replace(self, label=f"{self.label}/{label}")

    def advance(self, k: int = 1) -> "RandomStream":
        return replace(self, counter=self.counter + k)


def threshold(p: Fraction) -> int:
    """``ceil(p * 2**53)``: ``p > R / 2**53`` iff ``R < threshold(p)`` for integer ``R``."""
    p = Fraction(p)
    return -((-p.numerator * SCALE) // p.denominator)


def _thresholds(dist: Distribution, alphabet: Sequence) -> np.ndarray:
    if len(dist.schema) == 1:
        return np.array([threshold(dist[(s,)]) for s in alphabet], dtype=np.uint64)
    return np.array([threshold(dist[s]) for s in alphabet], dtype=np.uint64)


def _first_accept_chunk(tables, rows, trials: int, gen: np.random.Generator):
    """Run the rejection process for ``trials`` independent shared sequences.

    ``tables[k]`` is a ``(R_k, N)`` array of thresholds and ``rows[k]`` selects
    a row per trial, so each party may hold a trial-dependent distribution.
    Returns symbol indices and acceptance rounds, both of shape ``(K, trials)``.
    """
    k = len(tables)
    nsym = tables[0].shape[1]
    idx = np.full((k, trials), -1, dtype=np.int64)
    rnd = np.full((k, trials), -1, dtype=np.int64)
    active = np.arange(trials)
    offset = 0
    while active.size:
        if offset >= ROUND_CAP:
            raise SamplingError(f"no acceptance within {ROUND_CAP} rounds; is a distribution all zero?")
        # every trial consumes its own rows of the block whether or not it is still
        # active, so a trial's shared randomness never depends on other trials
        s = gen.integers(0, nsym, size=(trials, BLOCK))[active]
        r = gen.integers(0, SCALE, size=(trials, BLOCK), dtype=np.uint64)[active]
        for p in range(k):
            todo = idx[p, active] < 0
            if not todo.any():
                continue
            sel = active[todo]
            thr = tables[p][rows[p][sel]]
            t = np.take_along_axis(thr, s[todo], axis=1)
            acc = r[todo] < t
            hit = acc.any(axis=1)
            first = acc.argmax(axis=1)
            got = sel[hit]
            idx[p, got] = s[todo][hit, first[hit]]
            rnd[p, got] = offset + first[hit]
        active = active[(idx[:, active] < 0).any(axis=0)]
        offset += BLOCK
    return idx, rnd


def first_acceptance(dists: Sequence[Distribution], trials: int, stream: RandomStream, rows=None,
                     alphabet: Sequence | None = None):
    """Vectorized rejection sampling for several parties sharing one stream.

    ``dists[k]`` is either a single distribution or, when ``rows`` is given,
    a list of candidate distributions of which ``rows[k][t]`` is used in
    trial ``t``.  Returns ``(indices, rounds)`` into ``alphabet``.
    """
    if alphabet is None:
        first = dists[0] if rows is None else dists[0][0]
        alphabet = first.schema[0][1] if len(first.schema) == 1 else first.support()
    alphabet = list(alphabet)
    if rows is None:
        tables = [_thresholds(d, alphabet)[None, :] for d in dists]
        rows = [np.zeros(trials, dtype=np.int64) for _ in dists]
    else:
        tables = [np.stack([_thresholds(d, alphabet) for d in group]) for group in dists]
        rows = [np.asarray(r, dtype=np.int64) for r in rows]
    idx = np.empty((len(tables), trials), dtype=np.int64)
    rnd = np.empty((len(tables), trials), dtype=np.int64)
    for c, start in enumerate(range(0, trials, CHUNK)):
        stop = min(trials, start + CHUNK)
        a, b = _first_accept_chunk(tables, [r[start:stop] for r in rows], stop - start, stream.generator(c))
        idx[:, start:stop] = a
        rnd[:, start:stop] = b
    return idx, rnd


def _check_pair(p: Distribution, q: Distribution):
    if p.schema != q.schema:
        raise SchemaMismatch("correlated sampling needs distributions over the same alphabet")


def correlated_sample(p: Distribution, q: Distribution, r: RandomStream) -> tuple:
    """One draw ``(s_p, s_q)``; ``s_p ~ p`` and ``s_q ~ q`` from the same shared stream."""
    _check_pair(p, q)
    alphabet = _outcomes(p)
    idx, _ = first_acceptance([p, q], 1, r, alphabet=alphabet)
    return alphabet[idx[0, 0]], alphabet[idx[1, 0]]


def _outcomes(p: Distribution) -> list:
    """All outcomes of ``p``'s schema, as symbols for one coordinate or tuples otherwise."""
    if len(p.schema) == 1:
        return list(p.schema[0][1])
    return list(itertools.product(*(a for _, a in p.schema)))


def pairwise_agreement_exact(p: Distribution, q: Distribution) -> Fraction:
    """``(1 - d) / (1 + d)``: probability that both parties accept in the same first round."""
    d = statistical_distance(p, q)
    return (1 - d) / (1 + d)


def coupling_distribution_exact(p: Distribution, q: Distribution) -> Distribution:
    """Exact joint law of the two outputs of :func:`correlated_sample`.

    In the first round where anyone accepts, both accept (mass ``min(p, q)``)
    or only one does (mass ``(p - q)+`` or ``(q - p)+``); the other party then
    restarts on fresh rounds, so its output is an independent draw.  All
    terms are divided by ``1 + d``.
    """
    _check_pair(p, q)
    name_p = tuple(f"{n}_p" for n in p.names)
    name_q = tuple(f"{n}_q" for n in q.names)
    schema = tuple(zip(name_p, (a for _, a in p.schema))) + tuple(zip(name_q, (a for _, a in q.schema)))
    support = sorted(set(p.support()) | set(q.support()), key=p.sort_key)
    m = 1 + statistical_distance(p, q)
    mass: dict = {}
    for s in support:
        ps, qs = p[s], q[s]
        if min(ps, qs):
            mass[s + s] = mass.get(s + s, 0) + min(ps, qs) / m
        if ps > qs:
            for s2, q2 in q.items():
                mass[s + s2] = mass.get(s + s2, 0) + (ps - qs) * q2 / m
        elif qs > ps:
            for s2, p2 in p.items():
                mass[s2 + s] = mass.get(s2 + s, 0) + p2 * (qs - ps) / m
    return Distribution(schema, mass)


def coupling_agreement_exact(p: Distribution, q: Distribution) -> Fraction:
    """Exact ``Pr[s_p = s_q]`` (includes coincidences after one-sided acceptance)."""
    c = coupling_distribution_exact(p, q)
    k = len(p.schema)
    return sum((m for o, m in c.items() if o[:k] == o[k:]), ZERO)


@dataclass(frozen=True)
class CouplingReport:
    exact_pairwise_agreement: Fraction  # (1-d)/(1+d)
    exact_agreement: Fraction  # Pr[s_p = s_q] from the closed-form coupling
    joint_estimate: float  # empirical Pr[s_p = s_q]
    first_round_estimate: float  # empirical Pr[both accept in the same first round]
    trials: int
    confidence_halfwidth: float  # 3 sigma for joint_estimate
    seed: int

    def as_dict(self) -> dict:
        return {
            "exact_pairwise_agreement": str(self.exact_pairwise_agreement),
            "exact_agreement": str(self.exact_agreement),
            "joint_estimate": self.joint_estimate,
            "first_round_estimate": self.first_round_estimate,
            "trials": self.trials,
            "confidence_halfwidth": self.confidence_halfwidth,
            "seed": self.seed,
        }


def coupling_report(p: Distribution, q: Distribution, trials: int, seed: int = 0) -> CouplingReport:
    _check_pair(p, q)
    if trials <= 0:
        raise ValidationError("trials must be positive")
    idx, rnd = first_acceptance([p, q], trials, RandomStream(seed), alphabet=_outcomes(p))
    agree = float(np.mean(idx[0] == idx[1]))
    same_round = float(np.mean(rnd[0] == rnd[1]))
    exact = coupling_agreement_exact(p, q)
    sigma = math.sqrt(max(float(exact) * (1 - float(exact)), 1e-300) / trials)
    return CouplingReport(pairwise_agreement_exact(p, q), exact, agree, same_round, trials, 3 * sigma, seed)


# --- local extension ------------------------------------------------------

def local_extension(P: Distribution, x: Sequence[str], y: Sequence[str], s: Sequence[str],
                    t: Sequence[str]) -> Distribution:
    """Law of ``(x, y, s, t)`` when Alice draws ``s`` from ``P_{S|X}`` and Bob ``t`` from ``P_{T|Y}`` privately.

    Equals ``P`` (on these coordinates) exactly when ``S <-> X <-> YT`` and
    ``XS <-> Y <-> T``.
    """
    x, y, s, t = (list(v) for v in (x, y, s, t))
    base = marginal(P, x + y)
    return compose(compose(base, conditional(P, x, s)), conditional(P, y, t))


# --- embedding ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EmbeddingPlan:
    """Exact tables for embedding one round of ``game`` into its conditioned repetition.

    The shared part ``S`` of round ``j`` consists of the questions and answers
    of the conditioned rounds, one uniform direction bit ``d_i`` for every
    other free round, and the question ``ubar_i`` picked by that bit (``y_i``
    if ``d_i = 0``, else ``x_i``).  Symbols of ``S`` are tuples
    ``(x_cond, y_cond, d, ubar, a_cond, b_cond)``.
    """

    game: Game
    repeated: Game
    strategy: DeterministicStrategy
    n: int
    cond: tuple
    j: int
    free: tuple
    s_alphabet: tuple
    joint: Distribution  # over ("s", "xn", "yn"), conditioned on the wins in ``cond``
    pr_condition: Fraction
    target: Distribution  # over ("xn", "yn")
    s_xy: Distribution  # over ("s", "x", "y") with x, y the round-j questions
    s_given_x: ConditionalDistribution
    s_given_y: ConditionalDistribution
    ext_alice: ConditionalDistribution  # (x, s) -> xn
    ext_bob: ConditionalDistribution  # (y, s) -> yn
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def eps_alice(self) -> Fraction:
        """``||P_{S X_j Y_j} - P_XY P_{S | X_j}||``."""
        return self._eps("x")

    @property
    def eps_bob(self) -> Fraction:
        """``||P_{S X_j Y_j} - P_XY P_{S | Y_j}||``."""
        return self._eps("y")

    def _eps(self, side: str) -> Fraction:
        key = ("eps", side)
        if key not in self._cache:
            q = self.game.query
            kern = self.s_given_x if side == "x" else self.s_given_y
            approx = marginal(compose(q, kern), ["s", "x", "y"])
            self._cache[key] = statistical_distance(approx, self.s_xy)
        return self._cache[key]

    @property
    def distance_bound(self) -> Fraction:
        return 3 * self.eps_alice + 2 * self.eps_bob


def _fill_extension(joint: Distribution, side: str, j: int, out_alphabet):
    """Row used when ``(x, s)`` has probability zero: keep ``s``'s law, force round j."""
    own = "xn" if side == "x" else "yn"
    by_s = conditional(joint, ["s"], [own])
    fallback = marginal(joint, [own])
    schema = ((own, out_alphabet),)

    def fill(given):
        sym, s = given
        row = by_s.rows.get((s,), fallback)
        return pushforward(row, lambda o: (o[0][:j - 1] + (sym,) + o[0][j:],), schema)

    return fill


def embed_plan(g: Game, n: int, s: DeterministicStrategy, cond, j: int) -> EmbeddingPlan:
    """Tabulate the exact conditional laws needed to embed round ``j``."""
    cond = _as_spec(cond)
    cond.check(n)
    if not 1 <= j <= n or j in cond.indices:
        raise ValidationError(f"target round {j} must lie in 1..{n} outside the conditioned rounds")
    g_n = repeat(g, n)
    s.check(g_n)
    C = cond.indices
    free = tuple(i for i in range(1, n + 1) if i not in C and i != j)
    required = len(g_n.query) * 2 ** len(free)
    if required > budget():
        raise BudgetExceeded("embedding plan outcomes", required, budget())
    raw: dict = {}
    s_order: dict = {}
    dirs = list(itertools.product((0, 1), repeat=len(free)))
    w_d = Fraction(1, len(dirs))
    for (xn, yn), p in g_n.queries():
        an, bn = s.alice[xn], s.bob[yn]
        wins = g_n.coordinate_wins(xn, yn, an, bn)
        if not all(wins[i - 1] for i in C):
            continue
        head = (tuple(xn[i - 1] for i in C), tuple(yn[i - 1] for i in C))
        tail = (tuple(an[i - 1] for i in C), tuple(bn[i - 1] for i in C))
        for d in dirs:
            ubar = tuple(yn[i - 1] if di == 0 else xn[i - 1] for i, di in zip(free, d))
            sym = head + (d, ubar) + tail
            s_order.setdefault(sym, len(s_order))
            raw[(sym, xn, yn)] = raw.get((sym, xn, yn), 0) + p * w_d
    pr = sum(raw.values(), ZERO)
    if pr == 0:
        raise ZeroProbabilityError(f"the strategy never wins rounds {C}")
    s_alph = tuple(s_order)
    schema = (("s", s_alph), ("xn", g_n.x_alphabet), ("yn", g_n.y_alphabet))
    joint = Distribution(schema, {k: v / pr for k, v in raw.items()})
    target = marginal(joint, ["xn", "yn"])
    ext_schema = (("s", s_alph), ("x", g.x_alphabet), ("y", g.y_alphabet), ("xn", g_n.x_alphabet),
                  ("yn", g_n.y_alphabet))
    full = pushforward(joint, lambda o: (o[0], o[1][j - 1], o[2][j - 1], o[1], o[2]), ext_schema)
    s_xy = marginal(full, ["s", "x", "y"])
    p_s = marginal(joint, ["s"])
    s_given_x = conditional(full, ["x"], ["s"], fill=lambda _: p_s)
    s_given_y = conditional(full, ["y"], ["s"], fill=lambda _: p_s)
    ext_alice = conditional(full, ["x", "s"], ["xn"], fill=_fill_extension(joint, "x", j, g_n.x_alphabet))
    ext_bob = conditional(full, ["y", "s"], ["yn"], fill=_fill_extension(joint, "y", j, g_n.y_alphabet))
    return EmbeddingPlan(g, g_n, s, n, C, j, free, s_alph, joint, pr, target, s_xy, s_given_x, s_given_y,
                         ext_alice, ext_bob)


def embedded_law(plan: EmbeddingPlan) -> Distribution:
    """Exact law of ``(xbar^n, ybar^n)`` produced by the embedding on inputs drawn from the base query law."""
    if "law" in plan._cache:
        return plan._cache["law"]
    g_n = plan.repeated
    out: dict = {}
    for (x, y), pxy in plan.game.queries():
        coupling = coupling_distribution_exact(plan.s_given_x.row((x,)), plan.s_given_y.row((y,)))
        alice_part: dict = {}
        for (sa, sb), m in coupling.items():
            alice_part.setdefault(sa, {})[sb] = m
        for sa, partners in alice_part.items():
            ea = plan.ext_alice.row((x, sa)).items()
            for sb, m in partners.items():
                eb = plan.ext_bob.row((y, sb)).items()
                w = pxy * m
                for (xn,), ma in ea:
                    wa = w * ma
                    for (yn,), mb in eb:
                        key = (xn, yn)
                        out[key] = out.get(key, 0) + wa * mb
    law = Distribution((("xn", g_n.x_alphabet), ("yn", g_n.y_alphabet)), out)
    plan._cache["law"] = law
    return law


def embedding_distance_exact(plan: EmbeddingPlan) -> Fraction:
    """``||P_{Xbar^n Ybar^n} - P_{Xtilde^n Ytilde^n}||`` computed exactly."""
    return statistical_distance(embedded_law(plan), plan.target)


def embedded_win_exact(plan: EmbeddingPlan) -> Fraction:
    """Single-game winning probability when round ``j`` of the strategy is played on the embedded tuples."""
    j = plan.j
    g, s = plan.game, plan.strategy
    total = ZERO
    for (xn, yn), m in embedded_law(plan).items():
        if g.win(xn[j - 1], yn[j - 1], s.alice[xn][j - 1], s.bob[yn][j - 1]):
            total += m
    return total


def conditioned_win_exact(plan: EmbeddingPlan) -> Fraction:
    """``Pr[W_j | wins in cond]`` for the repeated strategy."""
    j = plan.j
    g, s = plan.game, plan.strategy
    return sum((m for (xn, yn), m in plan.target.items()
                if g.win(xn[j - 1], yn[j - 1], s.alice[xn][j - 1], s.bob[yn][j - 1])), ZERO)


def _sample_rows(dists: list, keys: np.ndarray, stream: RandomStream, outcomes_of) -> np.ndarray:
    """Draw one outcome index per trial from ``dists[keys[t]]`` by inverse CDF on 53-bit integers."""
    trials = keys.size
    out = np.empty(trials, dtype=np.int64)
    for c, start in enumerate(range(0, trials, CHUNK)):
        stop = min(trials, start + CHUNK)
        r = stream.generator(c).integers(0, SCALE, size=stop - start, dtype=np.uint64)
        ks = keys[start:stop]
        for key in np.unique(ks):
            sel = np.nonzero(ks == key)[0]
            support, cum = outcomes_of(dists[key])
            pos = np.searchsorted(cum, r[sel], side="right")
            out[start + sel] = support[np.minimum(pos, len(support) - 1)]
    return out


def _cdf_table(alphabet_index: dict):
    cache = {}

    def outcomes_of(dist: Distribution):
        key = id(dist)
        if key not in cache:
            items = dist.items()
            support = np.array([alphabet_index[o[0] if len(o) == 1 else o] for o, _ in items], dtype=np.int64)
            acc, cum = ZERO, []
            for _, m in items:
                acc += m
                cum.append((acc.numerator * SCALE) // acc.denominator)
            cache[key] = (support, np.array(cum, dtype=np.uint64))
        return cache[key]

    return outcomes_of


@dataclass(frozen=True)
class EmbeddingSample:
    x: np.ndarray  # indices into the base alphabets
    y: np.ndarray
    s_alice: np.ndarray  # indices into plan.s_alphabet
    s_bob: np.ndarray
    xn: np.ndarray  # indices into the repeated-game alphabets
    yn: np.ndarray


def embed_sample_batch(plan: EmbeddingPlan, trials: int, seed: int = 0, x=None, y=None) -> EmbeddingSample:
    """Run the embedding ``trials`` times.

    Inputs are drawn from the base query law (referee stream) unless fixed
    ``x``/``y`` symbols are given.  Alice uses only ``x``, the shared stream
    and her private stream; Bob likewise with ``y``.
    """
    g, g_n = plan.game, plan.repeated
    root = RandomStream(seed)
    xs, ys = g.x_alphabet, g.y_alphabet
    if x is None or y is None:
        qd = [g.query]
        pairs = {o: i for i, o in enumerate(itertools.product(xs, ys))}
        picks = _sample_rows(qd, np.zeros(trials, dtype=np.int64), root.child("referee"),
                             _cdf_table(pairs))
        x_idx, y_idx = picks // len(ys), picks % len(ys)
    else:
        x_idx = np.full(trials, xs.index(x), dtype=np.int64)
        y_idx = np.full(trials, ys.index(y), dtype=np.int64)
    alice_rows = [plan.s_given_x.row((sym,)) for sym in xs]
    bob_rows = [plan.s_given_y.row((sym,)) for sym in ys]
    idx, _ = first_acceptance([alice_rows, bob_rows], trials, root.child("shared"), rows=[x_idx, y_idx],
                              alphabet=list(plan.s_alphabet))
    ns = len(plan.s_alphabet)
    xn_index = {o: i for i, o in enumerate(g_n.x_alphabet)}
    yn_index = {o: i for i, o in enumerate(g_n.y_alphabet)}
    ext_a = {}
    ext_b = {}
    ka = x_idx * ns + idx[0]
    kb = y_idx * ns + idx[1]
    for key in np.unique(ka):
        ext_a[int(key)] = plan.ext_alice.row((xs[key // ns], plan.s_alphabet[key % ns]))
    for key in np.unique(kb):
        ext_b[int(key)] = plan.ext_bob.row((ys[key // ns], plan.s_alphabet[key % ns]))
    xn = _sample_rows(ext_a, ka, root.child("alice"), _cdf_table(xn_index))
    yn = _sample_rows(ext_b, kb, root.child("bob"), _cdf_table(yn_index))
    return EmbeddingSample(x_idx, y_idx, idx[0], idx[1], xn, yn)


def embed_sample(plan: EmbeddingPlan, x, y, r: RandomStream) -> tuple:
    """One embedded pair ``(xbar^n, ybar^n)`` for the inputs ``(x, y)``; ``r.seed`` drives all streams."""
    out = embed_sample_batch(plan, 1, seed=r.seed if r.counter == 0 else _mix(r), x=x, y=y)
    g_n = plan.repeated
    return g_n.x_alphabet[out.xn[0]], g_n.y_alphabet[out.yn[0]]


def _mix(r: RandomStream) -> int:
    return int(np.random.SeedSequence(int(r.seed), spawn_key=(r.counter,)).generate_state(2, np.uint32)
               .view(np.uint64)[0])


@dataclass(frozen=True)
class PlayReport:
    exact_win: Fraction
    empirical_win: float
    trials: int
    sigma: float
    conditioned_win: Fraction
    distance: Fraction

    @property
    def within(self) -> bool:
        return abs(self.empirical_win - float(self.exact_win)) <= 3 * self.sigma + 1e-12

    @property
    def guarantee_holds(self) -> bool:
        return self.exact_win >= self.conditioned_win - self.distance


def play_embedded(plan: EmbeddingPlan, trials: int, seed: int = 0) -> PlayReport:
    """Play round ``j`` of the repeated strategy on embedded tuples, exactly and by simulation."""
    exact = embedded_win_exact(plan)
    sample = embed_sample_batch(plan, trials, seed)
    g, g_n, s, j = plan.game, plan.repeated, plan.strategy, plan.j
    wins = np.zeros(trials, dtype=bool)
    keys = sample.xn * len(g_n.y_alphabet) + sample.yn
    for key in np.unique(keys):
        xn = g_n.x_alphabet[key // len(g_n.y_alphabet)]
        yn = g_n.y_alphabet[key % len(g_n.y_alphabet)]
        wins[keys == key] = g.win(xn[j - 1], yn[j - 1], s.alice[xn][j - 1], s.bob[yn][j - 1])
    emp = float(wins.mean()) if trials else 0.0
    sigma = math.sqrt(float(exact) * (1 - float(exact)) / trials) if trials else 0.0
    return PlayReport(exact, emp, trials, sigma, conditioned_win_exact(plan), embedding_distance_exact(plan))


@dataclass(frozen=True)
class EmbeddingSummary:
    """Per-round embedding errors for all rounds outside ``cond``."""

    eps: dict  # j -> exact embedding distance
    aggregate_rhs: float
    pr_condition: Fraction

    @property
    def total(self) -> Fraction:
        return sum(self.eps.values(), ZERO)

    @property
    def holds(self) -> bool:
        return float(self.total) <= self.aggregate_rhs + 1e-12


def embedding_summary(g: Game, n: int, s: DeterministicStrategy, cond, constant: float = 15.0) -> EmbeddingSummary:
    """Sum of per-round embedding distances against ``c sqrt(k) sqrt(m log|A||B| + log 1/Pr[W])``."""
    cond = _as_spec(cond)
    eps = {}
    pr = None
    for j in range(1, n + 1):
        if j in cond.indices:
            continue
        plan = embed_plan(g, n, s, cond, j)
        pr = plan.pr_condition
        eps[j] = embedding_distance_exact(plan)
    if pr is None:
        raise ValidationError("conditioning on every round leaves nothing to embed")
    k, m = len(eps), len(cond.indices)
    log_ab = math.log2(len(g.a_alphabet) * len(g.b_alphabet))
    rhs = constant * math.sqrt(k) * math.sqrt(m * log_ab + _log2_inv(pr))
    return EmbeddingSummary(eps, rhs, pr)
