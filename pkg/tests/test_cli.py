import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from mertens.cli import (
    TABLE_SCHEMA,
    ConfigError,
    build_parser,
    emit_table,
    load_config_file,
    parse_int,
    resolve_config,
    run,
)


def call(argv, env=None):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, env=env or {}, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_parse_int_forms():
    assert parse_int("1e6") == 10**6
    assert parse_int("10^7") == 10**7
    assert parse_int("1_000") == 1000
    with pytest.raises(ValueError):
        parse_int("1.5")


def test_zeta_eval_json_validates():
    code, out, _ = call(["zeta", "eval", "--s", "2", "--json"])
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, TABLE_SCHEMA)
    assert doc["rows"][0]["zeta"].startswith("1.6449340668482264364724")
    assert doc["provenance"]["prec_bits"] == 192


def test_csv_has_provenance_line_and_header():
    code, out, _ = call(["oracle", "rk", "--k", "2", "--x", "1e4", "--csv"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# ")
    json.loads(lines[0][2:])
    rows = list(csv.DictReader(lines[1:]))
    assert rows[0]["quantity"] == "R_k"
    assert int(rows[0]["x"]) == 10**4


def test_csv_quotes_commas():
    out = emit_table([{"a": "x,y", "b": 1}], "csv")
    assert list(csv.reader(io.StringIO(out))) == [["a", "b"], ["x,y", "1"]]


def test_empty_rows_give_header_only():
    out = emit_table([], "csv", columns=["j", "value"])
    assert out == "j,value\n"
    doc = json.loads(emit_table([], "json", columns=["j"], prov={
        "prime_limit": 10**4, "prec_bits": 192, "truncation": {}, "git_describe": "x"}))
    jsonschema.validate(doc, TABLE_SCHEMA)


def test_text_alignment_on_decimal_point():
    out = emit_table([{"v": "1.5"}, {"v": "123.25"}, {"v": "-0.125"}], "text")
    lines = out.splitlines()[1:]
    assert len({line.index(".") for line in lines}) == 1


def test_usage_errors_exit_2():
    assert call(["constants"])[0] == 2
    assert call(["constants", "alpha"])[0] == 2
    assert call(["expand", "rk", "--k", "7"])[0] == 2
    assert call(["--format", "xml", "zeta", "eval", "--s", "2"])[0] == 2


def test_domain_error_exit_2():
    code, _, err = call(["zeta", "eval", "--s", "1"])
    assert code == 2
    assert "error" in err


def test_config_file_errors_name_the_line(tmp_path):
    cfg = tmp_path / "m.conf"
    cfg.write_text("# settings\nprec_bits = 256\nbogus = 1\n")
    with pytest.raises(ConfigError, match=r"m\.conf:3"):
        load_config_file(cfg)
    code, _, err = call(["--config", str(cfg), "zeta", "eval", "--s", "2"])
    assert code == 2
    assert "m.conf:3" in err
    cfg.write_text("prec_bits = many\n")
    with pytest.raises(ConfigError, match=r":1"):
        load_config_file(cfg)


def test_precedence_file_env_flag(tmp_path):
    cfg = tmp_path / "m.conf"
    cfg.write_text("prec_bits = 200\noutput_format = text\ntolerance.identities = 1e-9\n")
    parser = build_parser()
    args = parser.parse_args(["--config", str(cfg), "zeta", "eval", "--s", "2"])
    assert resolve_config(args, {}).prec_bits == 200
    assert resolve_config(args, {}).suite_tolerances == {"identities": 1e-9}
    assert resolve_config(args, {"MERTENS_PREC_BITS": "224"}).prec_bits == 224
    args = parser.parse_args(["--config", str(cfg), "--prec", "256", "zeta", "eval", "--s", "2"])
    assert resolve_config(args, {"MERTENS_PREC_BITS": "224"}).prec_bits == 256
    assert resolve_config(args, {"MERTENS_FORMAT": "json"}).output_format == "json"


def test_bad_env_and_low_precision():
    assert call(["zeta", "eval", "--s", "2"], env={"MERTENS_PREC_BITS": "abc"})[0] == 2
    assert call(["--prec", "16", "zeta", "eval", "--s", "2"])[0] == 2


def test_failing_suite_exits_1(tmp_path):
    cfg = tmp_path / "m.conf"
    cfg.write_text("tolerance.identities = 1e-30\n")
    code, out, _ = call(["--config", str(cfg), "oracle", "identity-suite", "--x", "1000"])
    assert code == 1
    code, _, _ = call(["oracle", "identity-suite", "--x", "1000"])
    assert code == 0


def test_expand_sk_text():
    code, out, _ = call(["expand", "sk", "--k", "2", "--N", "1", "--text"])
    assert code == 0
    assert "llx_pow" in out.splitlines()[1]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "mertens", "oracle", "sk", "--k", "2", "--x", "1000",
                          "--json"], capture_output=True, text=True, timeout=120)
    assert res.returncode == 0
    jsonschema.validate(json.loads(res.stdout), TABLE_SCHEMA)


def test_constants_table_csv_and_json():
    code, out, _ = call(["constants", "table", "--jmax", "26", "--csv"])
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()[1:]))
    assert len(rows) == 26
    assert rows[0]["ratio"].startswith("1.332582")
    assert rows[13]["ratio"].startswith("1.012312")
    assert rows[25]["ratio"].startswith("1.000377")
    code, out, _ = call(["constants", "table", "--jmax", "26", "--json"])
    doc = json.loads(out)
    jsonschema.validate(doc, TABLE_SCHEMA)
    assert json.loads(json.dumps(doc)) == doc
    assert [r["j"] for r in doc["rows"]] == list(range(1, 27))


def test_verify_all_quick():
    code, out, err = call(["verify", "all", "--quick"])
    assert code == 0
    lines = [l for l in err.splitlines() if l]
    assert len(lines) == 6
    assert all(l.startswith("PASS") for l in lines)
