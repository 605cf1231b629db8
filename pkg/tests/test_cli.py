import json

import pytest

from volterra_stability import dumps_kernel, pn_roots
from volterra_stability.cli import main
from volterra_stability.fixtures import fixture_names, fixture_text, load_fixture

from conftest import geometric_null_kernel, renewal_kernel, rouche_unstable_pair_kernel


def _write_kernel(tmp_path, kernel, name="kernel.json"):
    path = tmp_path / name
    path.write_text(dumps_kernel(kernel), encoding="utf-8")
    return str(path)


def test_simulate_csv_rows(tmp_path, capsys):
    path = _write_kernel(tmp_path, geometric_null_kernel(3.0))
    assert main(["simulate", "--kernel", path, "--steps", "3"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines() == ["n,x", "0,1", "1,-3", "2,0", "3,0"]


def test_simulate_json_format(tmp_path, capsys):
    path = _write_kernel(tmp_path, renewal_kernel())
    out_file = tmp_path / "traj.json"
    assert main(["simulate", "--kernel", path, "--steps", "120", "--format", "json", "--out", str(out_file)]) == 0
    payload = json.loads(out_file.read_text())
    assert payload["method"] == "direct" and len(payload["values"]) == 121
    assert payload["values"][0] == 1.0


def test_simulate_fast_flag(tmp_path, capsys):
    path = _write_kernel(tmp_path, renewal_kernel())
    assert main(["simulate", "--kernel", path, "--steps", "64", "--fast", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["method"] == "fft_blocked"


def test_roots_json_schema(tmp_path, capsys):
    path = _write_kernel(tmp_path, rouche_unstable_pair_kernel())
    assert main(["roots", "--kernel", path, "--n", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n"] == 2
    assert payload["r_n"] == pytest.approx(2.0, abs=1e-9)
    assert payload["residual_bound"] <= 1e-8
    assert {"re", "im"} == set(payload["roots"][0])
    direct = pn_roots(rouche_unstable_pair_kernel(), 2)
    assert payload["r_n"] == direct.r_n


def test_certify_stdout_line(tmp_path, capsys):
    path = _write_kernel(tmp_path, renewal_kernel())
    out_file = tmp_path / "report.json"
    assert main(["certify", "--kernel", path, "--out", str(out_file)]) == 0
    line = capsys.readouterr().out.splitlines()[0]
    assert line == "asymptotically_stable (EFP, rigorous)"
    payload = json.loads(out_file.read_text())
    assert payload["final"]["criterion"] == "EFP"
    assert payload["final"]["verdict"] == "asymptotically_stable"


def test_malformed_kernel_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"prefix": [1.0], "tail": {"kind": "parametric", "c": 1.0, "q": 0.5, "alpha": -3.0, "beta": 0.0}}')
    assert main(["certify", "--kernel", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "alpha" in err


def test_missing_file_exit_two(tmp_path, capsys):
    assert main(["roots", "--kernel", str(tmp_path / "nope.json"), "--n", "2"]) == 2


def test_unknown_flag_exit_two(tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["simulate", "--bogus"])
    assert e.value.code == 2


def test_nonconvergence_exit_three(tmp_path, capsys):
    path = _write_kernel(tmp_path, geometric_null_kernel(3.0))
    assert main(["roots", "--kernel", path, "--n", "700"]) == 3


def test_fixture_files_parse():
    assert len(fixture_names()) == 9
    for name in fixture_names():
        k = load_fixture(name)
        assert json.loads(fixture_text(name))["prefix"] == list(k.prefix)
    with pytest.raises(KeyError):
        fixture_text("missing")


def test_reproduce_paper_table_and_verdicts(tmp_path, capsys):
    out_file = tmp_path / "rp.json"
    code = main(["reproduce-paper", "--out", str(out_file)])
    out = capsys.readouterr().out
    assert code == 0
    assert "6, 0.667, 0.00024, 0.00137" in out
    assert "renewal: asymptotically_stable (EFP, rigorous)" in out
    assert "rouche_unstable_pair: unstable (RealAxisRoot, rigorous)" in out
    payload = json.loads(out_file.read_text())
    assert payload["table"][5]["n"] == 6
    assert payload["table"][5]["r_n"] == pytest.approx(2.0 / 3.0, abs=5e-4)
    assert payload["verdicts"]["alternating_cubic"]["final"]["verdict"] == "stable"


def test_reproduce_paper_fails_on_deviation(monkeypatch, tmp_path, capsys):
    import volterra_stability.cli as cli_mod

    monkeypatch.setattr(cli_mod, "_TABLE_R", {4: 0.5, 5: 0.781, 6: 0.667})
    code = main(["reproduce-paper", "--steps", "500", "--grid-points", "512", "--out", str(tmp_path / "x.json")])
    assert code == 1
    assert "MISMATCH" in capsys.readouterr().err


def test_reproduce_paper_byte_identical(tmp_path, capsys):
    a_file = tmp_path / "a.json"
    b_file = tmp_path / "b.json"
    assert main(["reproduce-paper", "--steps", "500", "--grid-points", "512", "--out", str(a_file)]) == 0
    out_a = capsys.readouterr().out
    assert main(["reproduce-paper", "--steps", "500", "--grid-points", "512", "--out", str(b_file)]) == 0
    out_b = capsys.readouterr().out
    assert out_a == out_b
    assert a_file.read_bytes() == b_file.read_bytes()
