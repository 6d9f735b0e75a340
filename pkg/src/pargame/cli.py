"""Command-line entry point: ``pargame <command> ...``.

Every command accepts ``--json`` to print a machine-readable run report
instead of the human-readable summary.  Errors map to distinct exit codes
(see :mod:`pargame.errors`).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import bounds, covers, games, io, nosignaling, sampling
from .errors import GameLabError, ValidationError
from .prob import Distribution


def _read_input(ref: str) -> tuple:
    """Resolve a game reference: a builtin name or a JSON file.  Returns (document, raw bytes)."""
    path = Path(ref)
    if path.exists():
        raw = path.read_bytes()
        return io.loads(raw.decode(), str(path)), raw
    if ref in games.BUILTINS:
        doc = io.game_to_json(games.builtin(ref))
        return doc, json.dumps(doc, sort_keys=True).encode()
    raise ValidationError(f"{ref!r} is neither a file nor a builtin game ({', '.join(games.BUILTINS)})")


def _load_game(ref: str, digest) -> games.Game:
    doc, raw = _read_input(ref)
    digest.update(raw)
    return io.game_from_json(doc, ref)


def _load_json(path: str, digest):
    raw = Path(path).read_bytes()
    digest.update(raw)
    return io.loads(raw.decode(), path)


def _strategy_text(s: games.DeterministicStrategy) -> str:
    enc = io.encode_symbol
    alice = " ".join(f"{enc(x)}->{enc(a)}" for x, a in s.alice.items())
    bob = " ".join(f"{enc(y)}->{enc(b)}" for y, b in s.bob.items())
    return f"alice: {alice}\nbob:   {bob}"


def _parse_v(raw: str) -> Fraction:
    v = io.parse_rational(raw, "--v")
    if not 0 <= v <= 1:
        raise ValidationError(f"--v must lie in [0, 1], got {v}")
    return v


# --- commands -------------------------------------------------------------
# Each returns (results dict, human-readable text).

def cmd_value(args, digest):
    g = _load_game(args.game, digest)
    v, s = games.classical_value(g)
    return ({"value": io.encode_rational(v), "strategy": io.strategy_to_json(s)},
            f"{v.numerator}/{v.denominator}\n{_strategy_text(s)}")


def cmd_ns_value(args, digest):
    g = _load_game(args.game, digest)
    v, box = nosignaling.ns_value(g)
    res = {"value": io.encode_rational(v), "no_signaling": nosignaling.is_no_signaling(box)}
    text = f"{v.numerator}/{v.denominator}"
    if args.box_out:
        io.dump_json(io.box_to_json(box), args.box_out)
        res["box_file"] = args.box_out
        text += f"\nwitness box written to {args.box_out}"
    else:
        res["box"] = io.box_to_json(box)
    return res, text


def cmd_repeat(args, digest):
    g = _load_game(args.game, digest)
    g_n = games.repeat(g, args.n)
    doc = io.game_to_json(g_n)
    io.dump_json(doc, args.out)
    io.game_from_json(io.load_json(args.out), args.out)  # the written file must load
    res = {"n": args.n, "queries": len(doc["query"]), "out": args.out,
           "sizes": [len(doc[k]) for k in ("x_alphabet", "y_alphabet", "a_alphabet", "b_alphabet")]}
    return res, f"wrote {args.out}: {res['queries']} queries, alphabets {res['sizes']}"


def cmd_bound(args, digest):
    if (args.v is None) == (args.game is None):
        raise ValidationError("give exactly one of --v and --game")
    if args.alpha is not None and args.theorem != "cover":
        raise ValidationError("--alpha only applies to --theorem cover")
    if args.theorem == "cover" and args.alpha is None:
        raise ValidationError("--theorem cover needs --alpha")
    if args.ab is not None and args.theorem != "local":
        raise ValidationError("--ab only applies to --theorem local")
    ab = args.ab
    if args.game is not None:
        g = _load_game(args.game, digest)
        v = nosignaling.ns_value(g)[0] if args.theorem == "ns" else games.classical_value(g)[0]
        ab = len(g.a_alphabet) * len(g.b_alphabet) if ab is None else ab
    else:
        v = _parse_v(args.v)
        digest.update(str(v).encode())
    if args.theorem == "local" and ab is None:
        raise ValidationError("--theorem local with --v needs --ab (|A||B|)")
    value = bounds.theorem_bound(args.theorem, v, args.n, ab_product_size=ab, alpha=args.alpha)
    res = {"v": str(v), "n": args.n, "theorem": args.theorem, "bound": value}
    text = f"v = {v}, n = {args.n}, theorem {args.theorem}: bound {value!r}"
    if args.recurrence:
        if args.theorem == "local":
            log_s = math.log2(ab)
        elif args.theorem == "cover":
            log_s = math.log2(args.alpha)
        else:
            log_s = 0.0
        trace = bounds.recurrence_bound(bounds.BoundQuery(v, args.n, log_s, args.theorem))
        res["recurrence"] = {"m_star": trace.m_star, "bound": trace.bound, "trace": trace.as_json()}
        text += f"\nrecurrence: min p_m = {trace.bound!r} at m = {trace.m_star}"
    return res, text


def cmd_sample(args, digest):
    p = io.distribution_from_json(_load_json(args.p, digest), args.p)
    q = io.distribution_from_json(_load_json(args.q, digest), args.q)
    if p.schema[0][1] != q.schema[0][1]:
        raise ValidationError("p and q must share one alphabet (same symbols, same order)")
    q = Distribution(p.schema, {o: m for o, m in q.items()})
    rep = sampling.coupling_report(p, q, args.trials, args.seed)
    d = rep.as_dict()
    text = (f"exact (1-d)/(1+d) = {rep.exact_pairwise_agreement}\n"
            f"exact Pr[agree]   = {rep.exact_agreement}\n"
            f"empirical agree   = {rep.joint_estimate:.6f} +- {rep.confidence_halfwidth:.6f} (3 sigma)\n"
            f"first-round joint acceptance = {rep.first_round_estimate:.6f}")
    return d, text


def cmd_embed(args, digest):
    g = _load_game(args.game, digest)
    cond = tuple(args.cond)
    if len(set(cond)) >= args.n:
        raise ValidationError("--cond must leave at least one round free")
    g_n = games.repeat(g, args.n)
    if args.strategy == "cross":
        s = games.cross_strategy(g_n)
    elif args.strategy == "optimal":
        s = games.classical_value(g_n)[1]
    else:
        s = io.strategy_from_json(_load_json(args.strategy, digest), g_n, args.strategy)
    j = args.target_j
    if j is None:
        j = next(i for i in range(1, args.n + 1) if i not in cond)
    plan = sampling.embed_plan(g, args.n, s, cond, j)
    play = sampling.play_embedded(plan, args.trials, args.seed)
    summary = sampling.embedding_summary(g, args.n, s, cond)
    res = {
        "j": j, "cond": list(cond),
        "pr_condition": str(plan.pr_condition),
        "eps_alice": str(plan.eps_alice), "eps_bob": str(plan.eps_bob),
        "embedding_distance_exact": str(play.distance),
        "distance_bound_3e1_2e2": str(plan.distance_bound),
        "eps_by_round": {str(k): str(v) for k, v in summary.eps.items()},
        "aggregate_rhs": summary.aggregate_rhs,
        "exact_win": str(play.exact_win), "conditioned_win": str(play.conditioned_win),
        "empirical_win": play.empirical_win, "trials": play.trials, "sigma": play.sigma,
        "guarantee_holds": play.guarantee_holds,
    }
    text = (f"round {j} embedded given wins in {list(cond)} (Pr = {plan.pr_condition})\n"
            f"eps_alice = {plan.eps_alice}, eps_bob = {plan.eps_bob}, 3e1+2e2 = {plan.distance_bound}\n"
            f"embedding distance = {play.distance}\n"
            f"win: exact {play.exact_win}, conditioned {play.conditioned_win}, "
            f"empirical {play.empirical_win:.5f} over {play.trials} trials\n"
            f"win >= conditioned - distance: {play.guarantee_holds}")
    return res, text


def cmd_factorize(args, digest):
    K = io.channel_from_json(_load_json(args.channel, digest), args.channel)
    try:
        fac = covers.factorize(K)
    except GameLabError as e:
        witness = getattr(e, "witness", None)
        if witness is None:
            raise
        e.report = {"factorizable": False, "witness": [io.encode_symbol(w) for w in witness]}
        raise
    enc, rat = io.encode_symbol, io.encode_rational
    res = {"factorizable": True,
           "f": [{"a": enc(a), "z": enc(z), "v": rat(v)} for (a, z), v in fac.f.items()],
           "g": [{"b": enc(b), "z": enc(z), "v": rat(v)} for (b, z), v in fac.g.items()]}
    lines = ["factorizable: P(z|a,b) = f(a,z) g(b,z)"]
    lines += [f"f({enc(a)},{enc(z)}) = {v}" for (a, z), v in fac.f.items()]
    lines += [f"g({enc(b)},{enc(z)}) = {v}" for (b, z), v in fac.g.items()]
    return res, "\n".join(lines)


COMMANDS = {
    "value": cmd_value, "ns-value": cmd_ns_value, "repeat": cmd_repeat, "bound": cmd_bound,
    "sample": cmd_sample, "embed": cmd_embed, "factorize": cmd_factorize,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON run report")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")

    p = argparse.ArgumentParser(prog="pargame", description="Two-prover games and parallel repetition.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("value", parents=[common], help="exact classical value")
    s.add_argument("game", help="game JSON file or builtin name (fortnow, chsh)")

    s = sub.add_parser("ns-value", parents=[common], help="exact no-signaling value")
    s.add_argument("game")
    s.add_argument("--box-out", help="write the witness box to this JSON file")

    s = sub.add_parser("repeat", parents=[common], help="write the n-fold repetition")
    s.add_argument("game")
    s.add_argument("n", type=int)
    s.add_argument("out")

    s = sub.add_parser("bound", parents=[common], help="evaluate a repetition bound")
    s.add_argument("--v", help="value as a rational, e.g. 2/3")
    s.add_argument("--game", help="compute v from this game instead")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--theorem", choices=bounds.THEOREMS, default="local")
    s.add_argument("--alpha", type=int, help="fractional cover size (cover theorem)")
    s.add_argument("--ab", type=int, help="|A||B| when --v is given (local theorem)")
    s.add_argument("--recurrence", action="store_true", help="also iterate the recurrence")

    s = sub.add_parser("sample", parents=[common], help="correlated sampling experiment")
    s.add_argument("p")
    s.add_argument("q")
    s.add_argument("--trials", type=int, default=100_000)

    s = sub.add_parser("embed", parents=[common], help="embed one round into a conditioned repetition")
    s.add_argument("game")
    s.add_argument("n", type=int)
    s.add_argument("strategy", nargs="?", default="optimal",
                   help="strategy JSON file for the repeated game, 'cross' or 'optimal' (default)")
    s.add_argument("--cond", type=int, nargs="*", default=[], help="1-based rounds conditioned on winning")
    s.add_argument("--target-j", type=int, help="round to embed (default: first free round)")
    s.add_argument("--trials", type=int, default=100_000)

    s = sub.add_parser("factorize", parents=[common], help="product factorization of a channel")
    s.add_argument("channel")
    return p


def _argv_inputs(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("json",)}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    digest = hashlib.sha256(json.dumps(_argv_inputs(args), sort_keys=True, default=str).encode())
    start = time.perf_counter()
    report = {"command": ["pargame"] + argv, "seed": args.seed}
    try:
        results, text = COMMANDS[args.command](args, digest)
        code = 0
    except GameLabError as e:
        results = getattr(e, "report", {})
        results = dict(results, error=type(e).__name__, message=str(e))
        text = f"error: {e}"
        code = e.exit_code
    except FileNotFoundError as e:
        results, text, code = {"error": "FileNotFoundError", "message": str(e)}, f"error: {e}", 2
    report["inputs_digest"] = digest.hexdigest()
    report["results"] = results
    report["wall_clock_s"] = time.perf_counter() - start
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(text, file=sys.stdout if code == 0 else sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
