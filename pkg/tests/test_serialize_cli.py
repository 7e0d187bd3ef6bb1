import io
import json

import numpy as np
import pytest

from splitcat import errors, serialize
from splitcat.cli import run
from splitcat.decompose import decompose_cptp_idempotent
from splitcat.matcat import MatMorphism
from splitcat.quant import QUANT, dephasing, validate_channel

PAIR = lambda x: [float(x), 0.0]  # noqa: E731


def _mat(rows):
    return [[PAIR(x) for x in row] for row in rows]


CHOI_FILE = {"dom": {"dims": [2]}, "cod": {"dims": [2]}, "repr": "choi",
             "choi": _mat(np.diag([1, 0, 0, 1]))}
KRAUS_FILE = {"dom": {"dims": [2]}, "cod": {"dims": [2]}, "repr": "kraus",
              "kraus": [_mat([[1, 0], [0, 0]]), _mat([[0, 0], [0, 1]])]}


def _run(argv):
    out = io.StringIO()
    code = run(argv, stdout=out)
    return code, out.getvalue()


@pytest.fixture
def dephasing_file(tmp_path):
    path = tmp_path / "dephasing.json"
    path.write_text(json.dumps(CHOI_FILE))
    return path


# ---------------------------------------------------------------------------
# parsing


def test_parse_dephasing_choi():
    c = serialize.parse_channel_file(CHOI_FILE)
    assert validate_channel(c)[:2] == (True, True)
    assert QUANT.distance(c, dephasing(2)) == 0


def test_kraus_and_choi_files_agree():
    a = serialize.parse_channel_file(json.dumps(KRAUS_FILE))
    b = serialize.parse_channel_file(CHOI_FILE)
    assert QUANT.distance(a, b) <= 1e-12


def test_bad_choi_shape():
    bad = dict(CHOI_FILE, choi=_mat(np.eye(3)))
    with pytest.raises(errors.ShapeError):
        serialize.parse_channel_file(bad)


def test_missing_repr_is_convention_error():
    bad = {k: v for k, v in CHOI_FILE.items() if k != "repr"}
    with pytest.raises(errors.ConventionError):
        serialize.parse_channel_file(bad)


def test_malformed_json():
    with pytest.raises(errors.ParseError):
        serialize.parse_channel_file("{not json")


def test_inconsistent_payloads_rejected():
    both = dict(CHOI_FILE, kraus=[_mat([[1, 0], [0, 1]])])
    with pytest.raises(errors.ShapeMismatch):
        serialize.parse_channel_file(both)


def test_bare_dims_accepted():
    c = serialize.parse_channel_file(dict(CHOI_FILE, dom=[2], cod=2))
    assert QUANT.distance(c, dephasing(2)) == 0


def test_semiring_payload():
    m = serialize.parse_channel_file({"semiring": "boolean", "matrix": [[1, 1], [0, 1]]})
    assert isinstance(m, MatMorphism)
    with pytest.raises(errors.ParseError):
        serialize.parse_channel_file({"semiring": "boolean", "matrix": [[2]]})


def test_channel_round_trip():
    rng = np.random.default_rng(0)
    c = QUANT.random_morphism(rng, [2, 1], [3])
    for rep in ("choi", "superop"):
        back = serialize.parse_channel_file(serialize.dumps(serialize.channel_to_dict(c, rep)))
        assert QUANT.distance(back, c) < 1e-15


def test_decomposition_round_trip():
    dec = decompose_cptp_idempotent(dephasing(2))
    back = serialize.parse_decomposition(serialize.dumps(serialize.decomposition_to_dict(dec)))
    assert QUANT.distance(back.q, dec.q) < 1e-15
    assert back.dims_a() == dec.dims_a()


# ---------------------------------------------------------------------------
# CLI


def test_split_dephasing(dephasing_file):
    code, out = _run(["split", "--in", str(dephasing_file), "--tol", "1e-9"])
    assert code == 0
    assert "2 blocks: 1⊗(τ=1), 1⊗(τ=1)" in out


def test_relsearch_counterexample():
    code, out = _run(["relsearch", "--p", "[[1,1],[0,1]]", "--max", "4"])
    assert code == 0
    assert "no splitting up to dim 4" in out


def test_demo_equiv():
    code, out = _run(["demo-equiv", "--seed", "3", "--dims", "2,2"])
    assert code == 0, out
    assert "FAIL" not in out


def test_split_then_verify(tmp_path, dephasing_file):
    dec_path, q_path = tmp_path / "dec.json", tmp_path / "q.json"
    code, _ = _run(["split", "--in", str(dephasing_file), "--out", str(dec_path), "--q-out", str(q_path)])
    assert code == 0
    code, out = _run(["check", "--in", str(dephasing_file), "--verify-decomposition", str(dec_path)])
    assert code == 0, out
    code, out = _run(["check", "--in", str(q_path)])
    assert code == 0 and "PASS idempotent" in out


def test_json_output_is_deterministic(dephasing_file):
    a = _run(["split", "--in", str(dephasing_file), "--json"])[1]
    b = _run(["split", "--in", str(dephasing_file), "--json"])[1]
    assert a == b
    assert json.loads(a)["ok"] is True


@pytest.mark.parametrize("argv", [
    ["flor", "--p", "[[1,1],[0,0]]"],
    ["leak", "--kind", "broadcast", "--theory", "frel", "--n", "3"],
    ["frobenius", "--kind", "copy", "--n", "3"],
    ["frobenius", "--kind", "pants", "--n", "2"],
    ["laws", "--theory", "class", "--samples", "10"],
])
def test_subcommands_pass(argv):
    code, out = _run(argv)
    assert code == 0, out


def test_stinespring_leak_command(dephasing_file):
    code, out = _run(["leak", "--kind", "stinespring", "--in", str(dephasing_file)])
    assert code == 0, out
    assert _run(["leak", "--kind", "stinespring"])[0] == 2


def test_causalize_command(tmp_path):
    pi = np.diag([1.0, 1.0, 1.0, 0.0])
    k = {"dom": {"dims": [4]}, "cod": {"dims": [4]}, "repr": "kraus", "kraus": [_mat(pi)]}
    path = tmp_path / "pi.json"
    path.write_text(json.dumps(k))
    code, out = _run(["causalize", "--in", str(path)])
    assert code == 0, out
    assert "1 block: 3⊗(τ=1)" in out


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert _run(["check", "--in", str(bad)])[0] == 2
    assert _run(["split", "--bogus"])[0] == 2
    assert _run(["frobenius", "--kind", "pants", "--n", "2", "--unnormalized"])[0] == 1
    assert _run(["leak", "--kind", "broadcast", "--theory", "quant"])[0] == 1


def test_split_non_idempotent_fails(tmp_path):
    x = {"dom": {"dims": [2]}, "cod": {"dims": [2]}, "repr": "kraus", "kraus": [_mat([[0, 1], [1, 0]])]}
    path = tmp_path / "x.json"
    path.write_text(json.dumps(x))
    assert _run(["split", "--in", str(path)])[0] == 1
