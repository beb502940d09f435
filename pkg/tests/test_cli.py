from __future__ import annotations

import json
import subprocess
import sys

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from vanishcert.cli import main
from vanishcert.config import parse_config
from vanishcert.errors import ConfigError, ParseError
from vanishcert.jsonio import dumps
from vanishcert.pipeline import agreement_status, run_certify, run_crosscheck
from vanishcert.recipes import parse_recipe


def _run(tmp_path, capsys, doc, *extra, command="certify"):
    path = tmp_path / "config.json"
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    code = main([command, "--config", str(path), *extra])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_certify_sl3_adjoint_exit_zero(tmp_path, capsys):
    code, doc = _run(tmp_path, capsys, {"algebra": {"family": "sl_real", "n": 3}, "rep": "adjoint"})
    assert code == 0
    assert len(doc["certificates"]) == 1 and doc["certificates"][0]["verdict"] == "positive_definite"


def test_certify_so21_natural_exit_two(tmp_path, capsys):
    code, doc = _run(tmp_path, capsys, {"algebra": {"family": "so_lorentz", "n": 2}, "rep": "natural"})
    assert code == 2 and doc["certificates"][0]["verdict"] == "not_positive_definite"


def test_missing_power_is_parse_error(tmp_path, capsys):
    code, doc = _run(tmp_path, capsys, {"algebra": {"family": "sl_real", "n": 2}, "rep": "sym(natural)"})
    assert code == 1
    assert doc["status"] == "error" and doc["error"] == "ParseError" and doc["position"] == 11


def test_degree_out_of_range(tmp_path, capsys):
    code, doc = _run(tmp_path, capsys, {"algebra": {"family": "sl_real", "n": 2}, "rep": "natural",
                                        "degrees": [3]})
    assert code == 1 and doc["error"] == "ConfigError"


def test_unknown_family(tmp_path, capsys):
    code, doc = _run(tmp_path, capsys, {"algebra": {"family": "g2", "n": 2}, "rep": "natural"})
    assert code == 1 and doc["error"] == "UnsupportedFamily"


def test_invalid_json(tmp_path, capsys):
    code, doc = _run(tmp_path, capsys, "{not json")
    assert code == 1 and doc["error"] == "ConfigError"


def test_missing_file(capsys, tmp_path):
    assert main(["certify", "--config", str(tmp_path / "nope.json")]) == 1
    assert json.loads(capsys.readouterr().out)["error"] == "ConfigError"


def test_out_file_and_seed_override(tmp_path, capsys):
    out = tmp_path / "cert.json"
    code, _ = (main(["certify", "--config", str(_write(tmp_path, {"algebra": {"family": "sl_real", "n": 2},
                                                                  "rep": "natural", "degrees": [2]})),
                     "--seed", "5", "--out", str(out)]), None)
    assert code == 0
    assert json.loads(out.read_text())["seed"] == 5


def _write(tmp_path, doc):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    return path


@pytest.mark.parametrize("recipe,family,n,agreement", [
    ("adjoint", "sl_real", 3, "agree"),
    ("natural", "so_lorentz", 2, "agree"),
    ("trivial", "sl_real", 2, "agree"),
])
def test_crosscheck_examples(tmp_path, capsys, recipe, family, n, agreement):
    code, doc = _run(tmp_path, capsys, {"algebra": {"family": family, "n": n}, "rep": recipe},
                     command="crosscheck")
    assert code == 0
    row, = doc["rows"]
    assert row["agreement"] == agreement
    if recipe == "trivial":
        assert row["criterion"]["verdict"] == "refuted" and row["bochner"]["gap"] == 0


def test_agreement_table():
    assert agreement_status("certified_over_sampled_orders", True, "not_positive_definite") == "CONTRADICTION"
    assert agreement_status("certified_over_sampled_orders", True, "positive_definite") == "agree"
    assert agreement_status("certified_over_sampled_orders", False, "not_positive_definite") == \
        "criterion_inconclusive"
    assert agreement_status("inconclusive", False, "positive_definite") == "criterion_inconclusive"
    assert agreement_status("refuted", True, "not_positive_definite") == "agree"
    assert agreement_status("refuted", True, "positive_definite") == "agree"


def test_catalog_is_deterministic(capsys):
    assert main(["catalog"]) == 0
    first = capsys.readouterr().out
    main(["catalog"])
    assert capsys.readouterr().out == first
    fams = [f["family"] for f in json.loads(first)["families"]]
    assert "so_lorentz" in fams and "su_lorentz" in fams


def test_byte_identical_output():
    cfg = parse_config({"algebra": {"family": "su_lorentz", "n": 1}, "rep": ["natural", "adjoint"],
                        "degrees": [1, 2], "seed": 11})
    assert dumps(run_certify(cfg)[1]) == dumps(run_certify(cfg)[1])
    assert dumps(run_crosscheck(cfg)[1]) == dumps(run_crosscheck(cfg)[1])


def test_float_format():
    text = dumps({"a": 0.1, "b": 1.0, "c": float("nan"), "d": 3})
    doc = json.loads(text)
    assert '"a": 0.10000000000000001' in text and doc["b"] == 1.0 and doc["c"] is None and doc["d"] == 3


def test_console_entry_point(tmp_path):
    path = _write(tmp_path, {"algebra": {"family": "sl_real", "n": 2}, "rep": "natural"})
    proc = subprocess.run([sys.executable, "-m", "vanishcert", "certify", "--config", str(path)],
                          capture_output=True, text=True, env={"CERT_LOG": "quiet", "PATH": ""})
    assert proc.returncode == 2
    assert json.loads(proc.stdout)["status"] == "ok"


@pytest.mark.parametrize("text,pos", [
    ("sym(natural)", 11), ("tensor(natural)", 14), ("dual natural", 5), ("sym(natural,0)", 12),
    ("foo", 0), ("natural)", 7), ("", 0), ("adjoint$", 7),
])
def test_recipe_errors_have_positions(text, pos):
    with pytest.raises(ParseError) as info:
        parse_recipe(text)
    assert info.value.position == pos


atoms = st.sampled_from(["natural", "adjoint", "trivial"])
recipes = st.recursive(atoms, lambda inner: st.one_of(
    inner.map(lambda r: f"dual({r})"),
    st.tuples(inner, st.integers(1, 4)).map(lambda t: f"sym({t[0]},{t[1]})"),
    st.tuples(inner, inner).map(lambda t: f"tensor({t[0]},{t[1]})"),
), max_leaves=4)


@given(recipes)
def test_recipe_roundtrip(text):
    assert str(parse_recipe(text)) == text
    assert str(parse_recipe(text.replace(",", " , "))) == text


json_values = st.recursive(
    st.one_of(st.none(), st.booleans(), st.integers(-3, 10**20), st.floats(allow_nan=False), st.text(max_size=12)),
    lambda inner: st.one_of(st.lists(inner, max_size=3), st.dictionaries(st.text(max_size=8), inner, max_size=3)),
    max_leaves=8,
)


def _mutations():
    base = {"algebra": {"family": "sl_real", "n": 2}, "rep": "natural", "degrees": [1]}
    keys = st.sampled_from(["algebra", "rep", "degrees", "seed", "tolerances", "output", "reps"])
    return st.tuples(keys, json_values).map(lambda kv: {**base, kv[0]: kv[1]})


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.one_of(json_values, _mutations(), st.text(max_size=40)))
def test_fuzzed_configs_give_structured_output(tmp_path, capsys, doc):
    path = tmp_path / "fuzz.json"
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    code = main(["certify", "--config", str(path)])
    payload = json.loads(capsys.readouterr().out)
    assert code in (0, 1, 2)
    if code == 1:
        assert payload["status"] == "error" and isinstance(payload["error"], str) and payload["message"]
    else:
        assert payload["status"] == "ok"


def test_parse_config_rejects_huge_algebra():
    with pytest.raises(ConfigError):
        parse_config({"algebra": {"family": "sl_real", "n": 1000}, "rep": "natural"})


def test_vanishing_prediction_matches_spectrum():
    for family, n in (("sl_real", 3), ("so_lorentz", 3), ("su_lorentz", 2), ("sl_real", 2)):
        cfg = parse_config({"algebra": {"family": family, "n": n}, "rep": ["natural", "adjoint", "sym(natural,2)"]})
        report, payload, code = run_crosscheck(cfg)
        assert code == 0
        for row in payload["rows"]:
            if row["vanishing_prediction"] == "positive_definite":
                assert row["bochner"]["verdict"] == "positive_definite"
            for pair in row["criterion"]["excluded_pairs"]:
                assert pair["excluded"]
