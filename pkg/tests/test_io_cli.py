import json
from fractions import Fraction as F

import pytest

from pargame import io
from pargame.cli import main
from pargame.covers import FractionalCover, RectanglePartition, channel_from_tables
from pargame.errors import ValidationError
from pargame.games import Game, chsh, classical_value, fortnow, repeat
from pargame.nosignaling import pr_box
from pargame.prob import Distribution

BITS = (0, 1)


def roundtrip(to, frm, obj):
    doc = to(obj)
    text = io.dump_json(doc)
    back = frm(io.loads(text))
    assert io.dump_json(to(back)) == text
    return back


# --- file formats ------------------------------------------------------------

def test_game_roundtrip_fortnow_squared():
    g2 = repeat(fortnow(), 2)
    back = roundtrip(io.game_to_json, io.game_from_json, g2)
    doc = io.game_to_json(g2)
    assert len(doc["query"]) == 9
    assert all(q["p"] == "1/9" for q in doc["query"])
    assert classical_value(back)[0] == F(2, 3)


def test_game_mass_deficit_is_reported():
    doc = io.game_to_json(fortnow())
    doc["query"][0]["p"] = "5/18"
    with pytest.raises(ValidationError, match="17/18.*deficit 1/18"):
        io.game_from_json(doc)
    doc["query"][0]["p"] = 0.25
    with pytest.raises(ValidationError, match="num/den"):
        io.game_from_json(doc)


def test_json_syntax_error_has_position():
    with pytest.raises(ValidationError, match=r"g\.json:2:10:"):
        io.loads('{\n    "x": }', "g.json")


def test_strategy_and_box_roundtrip():
    g = io.normalize_game(chsh())
    _, s = classical_value(g)
    assert roundtrip(io.strategy_to_json, lambda d: io.strategy_from_json(d, g), s) == s
    box = io.box_from_json(io.box_to_json(pr_box()), g)
    back = roundtrip(io.box_to_json, lambda d: io.box_from_json(d, g), box)
    assert back.table[("1", "1")][("0", "1")] == F(1, 2)


def test_cover_partition_distribution_channel_roundtrip():
    A = B = ("0", "1")
    cover = FractionalCover(A, B, 2, {("0", 1): F(1), ("1", 2): F(1, 2)}, {("0", 1): F(1), ("1", 2): F(1)})
    back = roundtrip(io.cover_to_json, lambda d: io.cover_from_json(d, A, B), cover)
    assert back.value("1", "1") == F(1, 2)
    part = RectanglePartition(((("0",), ("0", "1")), (("1",), ("1",))))
    assert roundtrip(io.partition_to_json, io.partition_from_json, part) == part
    P = Distribution.from_probs("s", ("a", "b", "c"), [F(1, 6), F(1, 3), F(1, 2)])
    assert roundtrip(io.distribution_to_json, io.distribution_from_json, P) == P
    Z = ("u", "v")
    f = {(a, z): F(1, 2) for a in A for z in Z}
    g = {(b, z): F(1) for b in B for z in Z}
    K = channel_from_tables(A, B, Z, f, g)
    assert roundtrip(io.channel_to_json, io.channel_from_json, K).row(("1", "0"))[("u",)] == F(1, 2)


def test_channel_missing_row():
    doc = {"a_alphabet": ["0"], "b_alphabet": ["0", "1"], "z_alphabet": ["z"],
           "rows": [{"a": "0", "b": "0", "dist": [{"z": "z", "p": "1"}]}]}
    with pytest.raises(ValidationError, match="no row"):
        io.channel_from_json(doc)


# --- command line ----------------------------------------------------------------

def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_value_fortnow(capsys):
    code, out, _ = run(capsys, "value", "fortnow")
    assert code == 0 and out.splitlines()[0] == "2/3"


def test_cli_ns_value_chsh(capsys, tmp_path):
    code, out, _ = run(capsys, "ns-value", "chsh", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["results"]["value"] == "1/1" and rep["results"]["no_signaling"]
    box_file = tmp_path / "box.json"
    code, out, _ = run(capsys, "ns-value", "chsh", "--box-out", str(box_file))
    assert code == 0 and out.startswith("1/1")
    box = io.box_from_json(io.load_json(box_file), io.normalize_game(chsh()))
    assert box.table[("1", "1")][("0", "1")] == F(1, 2)


def test_cli_value_of_losing_game(capsys, tmp_path):
    g = Game.from_table(BITS, BITS, BITS, BITS, {(0, 0): 1}, [])
    path = tmp_path / "lose.json"
    io.dump_json(io.game_to_json(g), path)
    code, out, _ = run(capsys, "value", str(path))
    assert code == 0 and out.splitlines()[0] == "0/1"


def test_cli_repeat_roundtrip(capsys, tmp_path):
    out_file = tmp_path / "f2.json"
    code, out, _ = run(capsys, "repeat", "fortnow", "2", str(out_file), "--json")
    assert code == 0 and json.loads(out)["results"]["queries"] == 9
    code, out, _ = run(capsys, "value", str(out_file))
    assert out.splitlines()[0] == "2/3"


def test_cli_bound(capsys):
    code, out, _ = run(capsys, "bound", "--v", "2/3", "--n", "60", "--ab", "4", "--json")
    rep = json.loads(out)["results"]
    assert code == 0 and rep["bound"] == pytest.approx(0.9998148, abs=5e-8)
    code, out, _ = run(capsys, "bound", "--game", "chsh", "--n", "100", "--theorem", "ns", "--recurrence", "--json")
    rep = json.loads(out)["results"]
    assert rep["v"] == "1" and rep["bound"] == 1.0 and rep["recurrence"]["bound"] == 1.0


@pytest.mark.parametrize("argv", [
    ["bound", "--n", "5", "--ab", "4"],
    ["bound", "--v", "1/2", "--game", "chsh", "--n", "5"],
    ["bound", "--v", "1/2", "--n", "5", "--theorem", "cover"],
    ["bound", "--v", "1/2", "--n", "5", "--alpha", "3", "--ab", "4"],
    ["bound", "--v", "3/2", "--n", "5", "--ab", "4"],
    ["value", "no-such-game"],
])
def test_cli_validation_exit_code(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 3 and err.startswith("error:")


def test_cli_budget_exit_code(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("GAMELAB_BUDGET", "100")
    code, _, err = run(capsys, "repeat", "fortnow", "2", str(tmp_path / "x.json"))
    assert code == 4 and "GAMELAB_BUDGET" in err


def test_cli_factorize(capsys, tmp_path):
    out = (("z", BITS),)
    from pargame.prob import ConditionalDistribution
    xor = ConditionalDistribution((("a", BITS), ("b", BITS)), out,
                                  {(a, b): Distribution.point(out, (a ^ b,)) for a in BITS for b in BITS})
    path = tmp_path / "xor.json"
    io.dump_json(io.channel_to_json(xor), path)
    code, text, _ = run(capsys, "factorize", str(path), "--json")
    rep = json.loads(text)["results"]
    assert code == 6 and rep["factorizable"] is False and len(rep["witness"]) == 5
    K = channel_from_tables(BITS, BITS, ("u",), {(a, "u"): F(1) for a in BITS}, {(b, "u"): F(1) for b in BITS})
    io.dump_json(io.channel_to_json(K), path)
    code, text, _ = run(capsys, "factorize", str(path))
    assert code == 0 and text.startswith("factorizable")


def test_cli_sample_and_embed_deterministic(capsys, tmp_path):
    p, q = tmp_path / "p.json", tmp_path / "q.json"
    io.dump_json({"alphabet": ["0", "1"], "p": ["2/3", "1/3"]}, p)
    io.dump_json({"alphabet": ["0", "1"], "p": ["1/3", "2/3"]}, q)
    argv = ["sample", str(p), str(q), "--trials", "20000", "--seed", "4", "--json"]
    first = json.loads(run(capsys, *argv)[1])
    second = json.loads(run(capsys, *argv)[1])
    assert first["results"] == second["results"] and first["inputs_digest"] == second["inputs_digest"]
    assert first["results"]["exact_pairwise_agreement"] == "1/2"
    assert first["results"]["exact_agreement"] == "2/3"
    code, text, _ = run(capsys, "embed", "fortnow", "2", "cross", "--cond", "2", "--target-j", "1",
                        "--trials", "20000", "--json")
    rep = json.loads(text)["results"]
    assert code == 0 and rep["embedding_distance_exact"] == "1/3" and rep["guarantee_holds"]
    code, _, _ = run(capsys, "embed", "fortnow", "2", "cross", "--cond", "1", "2")
    assert code == 3


def test_cli_missing_file(capsys):
    code, _, _ = run(capsys, "sample", "/nonexistent/p.json", "/nonexistent/q.json")
    assert code == 2
