import json

import pytest

from pplb.cli import RunConfig, build_parser, config_from_args, main, parse_int


@pytest.mark.parametrize("text,value", [("1e8", 10**8), ("10_000_000", 10**7), ("1E10", 10**10), ("42", 42), ("2.5e1", 25)])
def test_parse_int(text, value):
    assert parse_int(text) == value


@pytest.mark.parametrize("text", ["1.5", "abc", "1e-3", "inf"])
def test_parse_int_rejects(text):
    import argparse

    with pytest.raises(argparse.ArgumentTypeError):
        parse_int(text)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_table_grid(capsys):
    code, out, err = run(capsys, "table", "--cmax", "2", "--dmax", "3", "--limit", "1e5")
    assert code == 0
    assert out.splitlines() == ["c\\d,1,2,3", "1,2,5,6", "2,5,6,8"]
    assert "9592 primes below 100000" in err


def test_table_1x1(capsys):
    code, out, _ = run(capsys, "table", "--cmax", "1", "--dmax", "1", "--limit", "1e4", "--no-banner")
    assert out == "c\\d,1\n1,2\n"


def test_table_bfile_and_output(tmp_path, capsys):
    path = tmp_path / "row.txt"
    code, out, _ = run(capsys, "table", "--cmax", "1", "--dmax", "5", "--limit", "1e5", "--format", "bfile", "-o", str(path))
    assert code == 0
    assert path.read_text() == "1 2\n2 5\n3 6\n4 9\n5 10\n"
    assert "primes below" in out


def test_table_json(capsys):
    code, out, _ = run(capsys, "table", "--cmax", "2", "--dmax", "3", "--limit", "1e5", "--format", "json", "--no-banner")
    obj = json.loads(out)
    assert obj["rows"][1][2]["m"] == 8 and obj["rows"][1][2]["last_violation"] == 7


def test_byte_identical_outputs(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert main(["table", "--cmax", "3", "--dmax", "3", "--limit", "1e5", "-o", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_certify(capsys):
    code, out, _ = run(capsys, "certify", "--c-list", "0,1,2", "--d-list", "1,2", "--mode", "strict", "--limit", "1e5", "--no-banner")
    cert = json.loads(out)
    assert code == 0 and cert["certified_least_n"] == 10 and cert["n0"] == 33


def test_certify_bertrand(capsys):
    code, out, _ = run(capsys, "certify", "--c-list", "0,0", "--d-list", "1", "--mode", "strict", "--limit", "1e5", "--no-banner")
    assert json.loads(out)["certified_least_n"] == 1


def test_certify_g_not_above_h(capsys):
    code, _, err = run(capsys, "certify", "--c-list", "0,1", "--d-list", "1,2")
    assert code == 2 and "g > h" in err


def test_certify_exhausted(capsys):
    code, _, err = run(capsys, "certify", "--c-list", "0,1,2,3", "--d-list", "4,5,6", "--ceiling", "300", "--limit", "1e4")
    assert code == 4


def test_range_error_exit(capsys):
    code, _, err = run(capsys, "delta", "--c", "2", "--d", "2", "--start", "6", "--end", "9", "--limit", "10")
    assert code == 3 and "error" in err


def test_config_error_exit(capsys):
    assert run(capsys, "table", "--cmax", "0", "--limit", "100")[0] == 2
    assert run(capsys, "table", "--limit", "2")[0] == 2
    assert run(capsys, "delta", "--c", "2", "--d", "2", "--start", "2", "--end", "9")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["table", "--limit", "abc"])
    assert exc.value.code == 2


def test_delta_cmd(capsys):
    code, out, _ = run(capsys, "delta", "--c", "2", "--d", "2", "--start", "6", "--end", "9", "--limit", "100", "--no-banner")
    assert out.splitlines() == ["n,delta", "6,1", "7,5", "8,3", "9,9"]


def test_runs_cmd(capsys):
    code, out, err = run(capsys, "runs", "--c", "1", "--d", "1", "--start", "45", "--end", "55", "--limit", "1e4")
    rep = json.loads(out)
    assert {"start_index": 50, "length": 2, "value": 223} in rep["longest_runs"]
    assert "223" in err


def test_survey_cmd(capsys):
    code, out, _ = run(capsys, "survey", "--cmax", "2", "--dmax", "2", "--scan-limit", "5000", "--limit", "1e5", "--no-banner")
    rep = json.loads(out)
    assert code == 0 and len(rep["cells"]) == 4


@pytest.mark.parametrize(
    "argv,needle",
    [
        (["verify", "theorem2", "--limit", "1000000"], "equality only at n=2; 0 violations"),
        (["verify", "rs-bounds", "--limit", "1000000"], "lower 0 violations, upper 0 violations"),
        (["verify", "loo", "--limit", "200000"], "0 failures"),
        (["verify", "shevelev", "--limit", "200000"], "k=14 0 failures"),
    ],
)
def test_verify_cmds(capsys, argv, needle):
    code, out, err = run(capsys, *argv)
    assert code == 0 and needle in err


def test_count_and_cache(tmp_path, capsys, monkeypatch):
    path = tmp_path / "p.bin"
    assert run(capsys, "cache", "--limit", "1e6", "-o", str(path))[0] == 0
    monkeypatch.setenv("PPLB_CACHE", str(path))
    code, out, _ = run(capsys, "count", "--limit", "1e5", "--no-banner")
    assert json.loads(out) == {"limit": 100000, "count": 9592}
    # cache smaller than the request falls back to sieving
    code, out, _ = run(capsys, "count", "--limit", "2e6", "--no-banner", "--format", "csv")
    assert out.splitlines()[1] == "2000000,148933"


def test_dump_config_roundtrip(capsys):
    argv = ["certify", "--c-list", "0,1,2", "--d-list", "1,2", "--mode", "strict", "--limit", "1_000", "--threads", "2"]
    code, out, _ = run(capsys, *argv, "--dump-config")
    dumped = json.loads(out)
    assert dumped["limit"] == 1000 and dumped["c_list"] == [0, 1, 2]
    again = config_from_args(build_parser().parse_args(argv))
    assert RunConfig.from_dict(dumped) == again
