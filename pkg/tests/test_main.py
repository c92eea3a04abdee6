import json
import sys

import pytest

import main
from reladp import prover


@pytest.fixture
def cli(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    config = tmp_path / "config.yaml"
    config.write_text(
        "prover:\n  timeout_seconds: 60\n  max_seeds: 60\nlogging:\n  file: run.log\n  level: WARNING\n"
    )

    def run(*argv):
        monkeypatch.setattr(sys, "argv", ["main.py", *argv, "--config", str(config)])
        with pytest.raises(SystemExit) as info:
            main.main()
        return info.value.code

    return run


def test_prove_prints_the_verdict_first(cli, corpus_dir, capsys):
    assert cli("prove", str(corpus_dir / "r4_cycle.trs")) == 1
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "NO"
    assert any("a -> b ->= a" in line for line in out)


def test_json_proof(cli, corpus_dir, capsys):
    assert cli("prove", str(corpus_dir / "divl_mset.trs"), "--proof", "json") == 0
    out = capsys.readouterr().out
    verdict, _, body = out.partition("\n")
    assert verdict == "YES"
    assert json.loads(body)["verdict"] == "SN"


def test_maybe_without_loop_search(cli, corpus_dir, tmp_path):
    dot = tmp_path / "proof.dot"
    code = cli("prove", str(corpus_dir / "r2_redex_creating.trs"), "--no-loop-search", "--dot", str(dot))
    assert code == 2
    assert dot.read_text().startswith("// proof")


def test_unparsable_input(cli, tmp_path):
    bad = tmp_path / "bad.trs"
    bad.write_text("(RULES a => b)")
    assert cli("prove", str(bad)) == 3
    assert cli("prove", str(tmp_path / "missing.trs")) == 3


def test_bad_config(tmp_path, corpus_dir, monkeypatch):
    monkeypatch.chdir(tmp_path)
    config = tmp_path / "config.yaml"
    config.write_text("prover:\n  max_coeff: 0\nlogging:\n  file: run.log\n")
    monkeypatch.setattr(sys, "argv", ["main.py", "prove", str(corpus_dir / "r4_cycle.trs"), "--config", str(config)])
    with pytest.raises(SystemExit) as info:
        main.main()
    assert info.value.code == 3


def test_adps_command(cli, corpus_dir, capsys):
    assert cli("adps", str(corpus_dir / "r2_redex_creating.trs")) == 0
    out = capsys.readouterr().out
    assert "f -> d(F,A)" in out


def test_bench_writes_csv(cli, corpus_dir, tmp_path):
    target = tmp_path / "systems"
    target.mkdir()
    (target / "cycle.trs").write_text((corpus_dir / "r4_cycle.trs").read_text())
    out = tmp_path / "out.csv"
    assert cli("bench", str(target), "--csv", str(out)) == 0
    assert out.read_text().splitlines()[1].startswith("cycle.trs,NO,")


def test_undecodable_input_is_an_input_error(cli, tmp_path):
    bad = tmp_path / "binary.trs"
    bad.write_bytes(b"\xff\xfe")
    assert cli("prove", str(bad)) == 3


def test_usage_errors_never_look_like_verdicts(cli):
    assert cli("prove") == 3
    assert cli("bench") == 3
    assert cli("prove", "x.trs", "--timeout", "soon") == 3


def test_unexpected_failure_exits_with_4(cli, corpus_dir, monkeypatch):
    def broken(trs, config):
        raise RuntimeError("boom")

    monkeypatch.setattr(prover, "prove", broken)
    assert cli("prove", str(corpus_dir / "r4_cycle.trs")) == 4
