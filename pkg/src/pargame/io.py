"""JSON file formats for games, boxes, covers, partitions, channels and strategies.

Probabilities are stored as strings ``"num/den"`` so that no float ever
touches a stored mass.  Symbols are stored as strings; tuple symbols of a
repeated game are written as their components joined by commas.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .covers import FractionalCover, RectanglePartition
from .errors import BudgetExceeded, GameLabError, ValidationError
from .games import DeterministicStrategy, Game, budget
from .nosignaling import Box
from .prob import ConditionalDistribution, Distribution


def encode_symbol(s) -> str:
    if isinstance(s, tuple):
        return ",".join(encode_symbol(c) for c in s)
    return str(s)


def encode_rational(p) -> str:
    p = Fraction(p)
    return f"{p.numerator}/{p.denominator}"


def parse_rational(raw, where: str) -> Fraction:
    if isinstance(raw, bool) or isinstance(raw, float):
        raise ValidationError(f"{where}: probabilities must be strings 'num/den', got {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if not isinstance(raw, str):
        raise ValidationError(f"{where}: expected a rational string, got {raw!r}")
    try:
        return Fraction(raw.strip())
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"{where}: cannot parse {raw!r} as a rational") from None


def _alphabet(doc: dict, key: str, where: str) -> tuple:
    raw = doc.get(key)
    if not isinstance(raw, list) or not raw:
        raise ValidationError(f"{where}: '{key}' must be a nonempty array of strings")
    out = tuple(str(s) for s in raw)
    if len(set(out)) != len(out):
        raise ValidationError(f"{where}: '{key}' has repeated symbols")
    return out


def _symbol(entry: dict, key: str, alphabet: tuple, where: str) -> str:
    if key not in entry:
        raise ValidationError(f"{where}: missing field '{key}'")
    s = str(entry[key])
    if s not in alphabet:
        raise ValidationError(f"{where}: symbol {s!r} for '{key}' is not in the alphabet")
    return s


def _entries(doc, key: str, where: str) -> list:
    raw = doc.get(key) if isinstance(doc, dict) else None
    if not isinstance(raw, list):
        raise ValidationError(f"{where}: '{key}' must be an array")
    for i, e in enumerate(raw):
        if not isinstance(e, dict):
            raise ValidationError(f"{where}: {key}[{i}] must be an object")
    return raw


def loads(text: str, source: str = "<string>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None


def load_json(path) -> Any:
    path = Path(path)
    return loads(path.read_text(), str(path))


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=False) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


# --- games ----------------------------------------------------------------

def game_to_json(g: Game, limit: int | None = None) -> dict:
    """Serialize ``g``; the predicate is listed over every question pair, winning entries only."""
    nx, ny, na, nb = g.sizes
    limit = budget() if limit is None else limit
    if nx * ny * na * nb > limit:
        raise BudgetExceeded("predicate table", nx * ny * na * nb, limit)
    enc = encode_symbol
    doc = {
        "name": g.name,
        "x_alphabet": [enc(s) for s in g.x_alphabet],
        "y_alphabet": [enc(s) for s in g.y_alphabet],
        "a_alphabet": [enc(s) for s in g.a_alphabet],
        "b_alphabet": [enc(s) for s in g.b_alphabet],
        "query": [{"x": enc(x), "y": enc(y), "p": encode_rational(p)} for (x, y), p in g.queries()],
        "predicate": [
            {"x": enc(x), "y": enc(y), "a": enc(a), "b": enc(b), "win": 1}
            for x in g.x_alphabet for y in g.y_alphabet
            for a in g.a_alphabet for b in g.b_alphabet if g.win(x, y, a, b)
        ],
    }
    for key in ("x_alphabet", "y_alphabet", "a_alphabet", "b_alphabet"):
        if len(set(doc[key])) != len(doc[key]):
            raise ValidationError(f"symbols of {key} collide after encoding as strings")
    return doc


def game_from_json(doc, source: str = "game") -> Game:
    if not isinstance(doc, dict):
        raise ValidationError(f"{source}: a game must be a JSON object")
    X, Y, A, B = (_alphabet(doc, k, source) for k in ("x_alphabet", "y_alphabet", "a_alphabet", "b_alphabet"))
    query: dict = {}
    for i, e in enumerate(_entries(doc, "query", source)):
        where = f"{source}: query[{i}]"
        x, y = _symbol(e, "x", X, where), _symbol(e, "y", Y, where)
        if (x, y) in query:
            raise ValidationError(f"{where}: duplicate question pair {(x, y)!r}")
        p = parse_rational(e.get("p"), where)
        if p < 0:
            raise ValidationError(f"{where}: negative mass {p}")
        query[(x, y)] = p
    total = sum(query.values(), Fraction(0))
    if total != 1:
        raise ValidationError(f"{source}: query masses sum to {total}, not 1 (deficit {1 - total})")
    wins = []
    for i, e in enumerate(_entries(doc, "predicate", source) if "predicate" in doc else []):
        where = f"{source}: predicate[{i}]"
        entry = tuple(_symbol(e, k, al, where) for k, al in (("x", X), ("y", Y), ("a", A), ("b", B)))
        w = e.get("win", 0)
        if w not in (0, 1) or isinstance(w, bool):
            raise ValidationError(f"{where}: 'win' must be 0 or 1")
        if w:
            wins.append(entry)
    return Game.from_table(X, Y, A, B, {k: v for k, v in query.items() if v}, wins, name=str(doc.get("name", "")))


def normalize_game(g: Game) -> Game:
    """The game as it reads back from its own file (string symbols, table predicate)."""
    return game_from_json(game_to_json(g))


# --- strategies -------------------------------------------------------------

def strategy_to_json(s: DeterministicStrategy) -> dict:
    enc = encode_symbol
    return {"alice": [{"x": enc(x), "a": enc(a)} for x, a in s.alice.items()],
            "bob": [{"y": enc(y), "b": enc(b)} for y, b in s.bob.items()]}


def strategy_from_json(doc, g: Game, source: str = "strategy") -> DeterministicStrategy:
    """Read a strategy for ``g``; symbols are matched by their string encoding."""
    def side(key, qk, ak, Q, Aal):
        lookup_q = {encode_symbol(s): s for s in Q}
        lookup_a = {encode_symbol(s): s for s in Aal}
        out = {}
        for i, e in enumerate(_entries(doc, key, source)):
            where = f"{source}: {key}[{i}]"
            q = _symbol(e, qk, tuple(lookup_q), where)
            a = _symbol(e, ak, tuple(lookup_a), where)
            out[lookup_q[q]] = lookup_a[a]
        return out

    s = DeterministicStrategy(side("alice", "x", "a", g.x_alphabet, g.a_alphabet),
                              side("bob", "y", "b", g.y_alphabet, g.b_alphabet))
    try:
        s.check(g)
    except GameLabError as e:
        raise ValidationError(f"{source}: {e}") from None
    return s


# --- boxes ----------------------------------------------------------------

def box_to_json(box: Box) -> list:
    enc = encode_symbol
    return [{"x": enc(x), "y": enc(y),
             "table": [{"a": enc(a), "b": enc(b), "p": encode_rational(p)} for (a, b), p in d.items()]}
            for (x, y), d in box.table.items()]


def box_from_json(doc, g: Game, source: str = "box") -> Box:
    if not isinstance(doc, list):
        raise ValidationError(f"{source}: a box must be an array of rows")
    lx = {encode_symbol(s): s for s in g.x_alphabet}
    ly = {encode_symbol(s): s for s in g.y_alphabet}
    la = {encode_symbol(s): s for s in g.a_alphabet}
    lb = {encode_symbol(s): s for s in g.b_alphabet}
    schema = (("a", g.a_alphabet), ("b", g.b_alphabet))
    table = {}
    for i, row in enumerate(doc):
        where = f"{source}[{i}]"
        if not isinstance(row, dict):
            raise ValidationError(f"{where}: rows must be objects")
        key = (lx[_symbol(row, "x", tuple(lx), where)], ly[_symbol(row, "y", tuple(ly), where)])
        mass = {}
        for k, e in enumerate(_entries(row, "table", where)):
            w = f"{where}.table[{k}]"
            ab = (la[_symbol(e, "a", tuple(la), w)], lb[_symbol(e, "b", tuple(lb), w)])
            mass[ab] = mass.get(ab, Fraction(0)) + parse_rational(e.get("p"), w)
        try:
            table[key] = Distribution(schema, mass)
        except GameLabError as e:
            raise ValidationError(f"{where}: {e}") from None
    return Box.for_game(g, table)


# --- covers and partitions --------------------------------------------------

def cover_to_json(c: FractionalCover) -> dict:
    enc = encode_symbol
    return {"alpha": c.alpha,
            "f": [{"a": enc(a), "i": i, "v": encode_rational(v)} for (a, i), v in c.f.items() if v],
            "g": [{"b": enc(b), "i": i, "v": encode_rational(v)} for (b, i), v in c.g.items() if v]}


def cover_from_json(doc, a_alphabet, b_alphabet, source: str = "cover") -> FractionalCover:
    if not isinstance(doc, dict) or not isinstance(doc.get("alpha"), int):
        raise ValidationError(f"{source}: expected an object with integer 'alpha'")
    la = {encode_symbol(s): s for s in a_alphabet}
    lb = {encode_symbol(s): s for s in b_alphabet}
    f, g = {}, {}
    for key, sym, lookup, out in (("f", "a", la, f), ("g", "b", lb, g)):
        for k, e in enumerate(_entries(doc, key, source)):
            where = f"{source}: {key}[{k}]"
            out[(lookup[_symbol(e, sym, tuple(lookup), where)], e.get("i"))] = parse_rational(e.get("v"), where)
    return FractionalCover(a_alphabet, b_alphabet, doc["alpha"], f, g)


def partition_to_json(p: RectanglePartition) -> dict:
    return {"rects": [{"as": [encode_symbol(a) for a in as_], "bs": [encode_symbol(b) for b in bs]}
                      for as_, bs in p.rects]}


def partition_from_json(doc, source: str = "partition") -> RectanglePartition:
    rects = []
    for k, e in enumerate(_entries(doc, "rects", source)):
        if not isinstance(e.get("as"), list) or not isinstance(e.get("bs"), list):
            raise ValidationError(f"{source}: rects[{k}] needs arrays 'as' and 'bs'")
        rects.append((tuple(str(a) for a in e["as"]), tuple(str(b) for b in e["bs"])))
    return RectanglePartition(tuple(rects))


# --- distributions and channels -----------------------------------------------

def distribution_to_json(P: Distribution) -> dict:
    """Single-coordinate distributions: ``{"alphabet": [...], "p": [...]}``."""
    if len(P.schema) != 1:
        raise ValidationError("only single-coordinate distributions have a file format")
    name, al = P.schema[0]
    return {"name": name, "alphabet": [encode_symbol(s) for s in al],
            "p": [encode_rational(P[(s,)]) for s in al]}


def distribution_from_json(doc, source: str = "distribution") -> Distribution:
    if not isinstance(doc, dict):
        raise ValidationError(f"{source}: expected an object")
    al = _alphabet(doc, "alphabet", source)
    probs = doc.get("p")
    if not isinstance(probs, list) or len(probs) != len(al):
        raise ValidationError(f"{source}: 'p' must be an array as long as the alphabet")
    ps = [parse_rational(v, f"{source}: p[{i}]") for i, v in enumerate(probs)]
    try:
        return Distribution.from_probs(str(doc.get("name", "s")), al, ps)
    except GameLabError as e:
        raise ValidationError(f"{source}: {e}") from None


def channel_to_json(K: ConditionalDistribution) -> dict:
    (_, A), (_, B) = K.given_schema
    (_, Z), = K.output_schema
    enc = encode_symbol
    return {"a_alphabet": [enc(a) for a in A], "b_alphabet": [enc(b) for b in B],
            "z_alphabet": [enc(z) for z in Z],
            "rows": [{"a": enc(a), "b": enc(b),
                      "dist": [{"z": enc(z), "p": encode_rational(p)} for (z,), p in K.row((a, b)).items()]}
                     for a in A for b in B]}


def channel_from_json(doc, source: str = "channel") -> ConditionalDistribution:
    if not isinstance(doc, dict):
        raise ValidationError(f"{source}: expected an object")
    A, B, Z = (_alphabet(doc, k, source) for k in ("a_alphabet", "b_alphabet", "z_alphabet"))
    out_schema = (("z", Z),)
    rows = {}
    for i, e in enumerate(_entries(doc, "rows", source)):
        where = f"{source}: rows[{i}]"
        key = (_symbol(e, "a", A, where), _symbol(e, "b", B, where))
        if key in rows:
            raise ValidationError(f"{where}: duplicate row {key!r}")
        mass = {}
        for k, d in enumerate(_entries(e, "dist", where)):
            w = f"{where}.dist[{k}]"
            z = _symbol(d, "z", Z, w)
            mass[(z,)] = mass.get((z,), Fraction(0)) + parse_rational(d.get("p"), w)
        try:
            rows[key] = Distribution(out_schema, mass)
        except GameLabError as err:
            raise ValidationError(f"{where}: {err}") from None
    missing = [(a, b) for a in A for b in B if (a, b) not in rows]
    if missing:
        raise ValidationError(f"{source}: no row for inputs {missing[:3]}")
    return ConditionalDistribution((("a", A), ("b", B)), out_schema, rows)
