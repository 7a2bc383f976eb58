import json
from pathlib import Path

import pandas as pd
import pytest

import main
from core.errors import OracleMismatchError
from processors.canonical_processor import CanonicalProcessor
from processors.generate_processor import GenerateProcessor
from reduction.blocks import CanonicalBlock, realize, realize_sum
from reduction.canon import CanonicalForm

from conftest import GF7, Q

CONFIG = str(Path(__file__).resolve().parent.parent / "config" / "skewpair_config.yaml")


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(*argv) -> int:
    return main.main(["--config", CONFIG, *argv])


def load(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def test_generate_with_identity_congruence_writes_the_canonical_pair(workdir):
    assert run("generate", "--blocks", "L:1", "--seed", "0", "--congruence", "identity", "-o", "l1.json") == 0
    assert load("l1.json") == {"field": "Q", "a": [["0"]], "b": [["0"]]}
    answer = load("l1.answer.json")
    assert answer["blocks"] == [{"kind": "L", "n": 1}]
    assert answer["scrambling"] == [["1"]]


def test_generated_k2_canonicalizes_to_k2(workdir):
    assert run("generate", "--blocks", "K:2", "--field", "GF(7)", "--seed", "1", "-o", "k2.json") == 0
    assert run("canonicalize", "k2.json", "--witness", "--verify", "-o", "k2.result.json") == 0
    result = load("k2.result.json")
    assert result["field"] == "GF(7)"
    assert result["blocks"] == [{"kind": "K", "n": 2}]
    assert result["verified"] is True
    assert len(result["witness"]) == 4


def test_canonical_blocks_match_the_generator_answer(workdir):
    assert run("generate", "--blocks", "J:2:3,K:1,L:2", "--field", "GF(7)", "--seed", "5",
               "-o", "mixed.json") == 0
    assert run("canonicalize", "mixed.json", "-o", "mixed.result.json") == 0
    result = load("mixed.result.json")
    assert result["blocks"] == load("mixed.answer.json")["blocks"]
    assert "witness" not in result


def test_j1_and_l2_over_gf7(workdir):
    run("generate", "--blocks", "J:1:4,L:2", "--field", "GF(7)", "--seed", "12", "-o", "pair.json")
    assert run("canonicalize", "pair.json", "--witness", "--verify", "-o", "pair.result.json") == 0
    assert load("pair.result.json")["blocks"] == [{"kind": "L", "n": 2}, {"kind": "J", "n": 1, "eigenvalue": "4"}]


def test_zero_pair_file(workdir):
    zeros = [["0"] * 3 for _ in range(3)]
    Path("zero.json").write_text(json.dumps({"field": "Q", "a": zeros, "b": zeros}), encoding="utf-8")
    assert run("canonicalize", "zero.json", "--verify", "-o", "zero.result.json") == 0
    result = load("zero.result.json")
    assert result["blocks"] == [{"kind": "L", "n": 1}] * 3
    assert result["verified"] is True


def test_verify_accepts_a_good_witness_and_rejects_a_tampered_one(workdir):
    run("generate", "--blocks", "K:2", "--field", "GF(7)", "--seed", "1", "-o", "k2.json")
    run("canonicalize", "k2.json", "--witness", "-o", "k2.result.json")
    assert run("verify", "k2.json", "k2.result.json") == 0

    result = load("k2.result.json")
    result["witness"][0][0] = str((int(result["witness"][0][0]) + 1) % 7)
    Path("tampered.json").write_text(json.dumps(result), encoding="utf-8")
    assert run("verify", "k2.json", "tampered.json") == 3


def test_verify_without_a_witness_fails(workdir):
    run("generate", "--blocks", "K:1", "--seed", "2", "-o", "k1.json")
    run("canonicalize", "k1.json", "-o", "k1.result.json")
    assert run("verify", "k1.json", "k1.result.json") == 3


@pytest.mark.parametrize("content", [
    "{not json",
    json.dumps({"field": "GF(4)", "a": [["0"]], "b": [["0"]]}),
    json.dumps({"field": "Q", "a": [["0", "1"], ["1", "0"]], "b": [["0", "0"], ["0", "0"]]}),
    json.dumps({"field": "Q", "a": [["0", "1"]], "b": [["0"]]}),
    json.dumps({"field": "Q", "a": [["0"]]}),
])
def test_malformed_instances_exit_with_parse_code(workdir, content):
    Path("bad.json").write_text(content, encoding="utf-8")
    assert run("canonicalize", "bad.json") == 2


INVALID_UTF8 = b'{"field": "Q", "a": [["\xff"]], "b": [["0"]]}'


def test_invalid_utf8_exits_with_parse_code(workdir):
    Path("latin.json").write_bytes(INVALID_UTF8)
    assert run("canonicalize", "latin.json") == 2
    assert run("invariants", "latin.json") == 2


def test_invalid_utf8_result_file_exits_with_parse_code(workdir):
    run("generate", "--blocks", "K:1", "--seed", "2", "-o", "k1.json")
    Path("latin.result.json").write_bytes(INVALID_UTF8)
    assert run("verify", "k1.json", "latin.result.json") == 2


def test_batch_mode_reports_invalid_utf8_as_a_failed_row(workdir):
    run("generate", "--blocks", "L:2", "--seed", "3", "-o", "good.json")
    Path("latin.json").write_bytes(INVALID_UTF8)
    code = run("canonicalize", "good.json", "latin.json", "--output-dir", "out", "--summary", "out/summary.csv")
    assert code == 2
    summary = pd.read_csv("out/summary.csv")
    assert list(summary["status"]) == ["ok", "failed"]
    assert list(summary["exit_code"]) == [0, 2]


def test_output_is_byte_deterministic(workdir):
    for name in ("first", "second"):
        run("generate", "--blocks", "J:1:2,L:2", "--seed", "11", "-o", f"{name}.json")
        run("canonicalize", f"{name}.json", "--witness", "-o", f"{name}.result.json")
    assert Path("first.json").read_bytes() == Path("second.json").read_bytes()
    assert Path("first.result.json").read_bytes() == Path("second.result.json").read_bytes()


def test_canonicalize_prints_json_to_stdout(workdir, capsys):
    run("generate", "--blocks", "L:2", "--seed", "3", "-o", "l2.json")
    capsys.readouterr()
    assert run("canonicalize", "l2.json") == 0
    record = json.loads(capsys.readouterr().out)
    assert record["blocks"] == [{"kind": "L", "n": 2}]


def test_batch_mode_writes_results_and_a_summary(workdir):
    run("generate", "--blocks", "K:1,L:1", "--seed", "1", "-o", "one.json")
    run("generate", "--blocks", "J:1:-1", "--seed", "2", "-o", "two.json")
    Path("broken.json").write_text("[]", encoding="utf-8")

    code = run("canonicalize", "one.json", "two.json", "broken.json", "--verify",
               "--output-dir", "out", "--summary", "out/summary.csv")
    assert code == 2
    summary = pd.read_csv("out/summary.csv")
    assert list(summary["status"]) == ["ok", "ok", "failed"]
    assert list(summary["exit_code"]) == [0, 0, 2]
    assert load("out/one.result.json")["blocks"] == [{"kind": "L", "n": 1}, {"kind": "K", "n": 1}]
    assert load("out/two.result.json")["verified"] is True
    assert not Path("out/broken.result.json").exists()


def test_regularize_k1(workdir):
    run("generate", "--blocks", "K:1", "--seed", "4", "-o", "k1.json")
    assert run("regularize", "k1.json", "--verify", "-o", "k1.reg.json") == 0
    record = load("k1.reg.json")
    assert record["t"] == 1
    assert record["blocks"] == [{"kind": "K", "n": 1}]
    assert record["regular_part"]["a"] == []
    assert record["verified"] is True
    assert run("verify", "k1.json", "k1.reg.json") == 0


def test_regularize_keeps_the_regular_part(workdir):
    run("generate", "--blocks", "J:1:3,L:2", "--seed", "6", "-o", "mixed.json")
    assert run("regularize", "mixed.json", "-o", "mixed.reg.json") == 0
    record = load("mixed.reg.json")
    assert record["blocks"] == [{"kind": "L", "n": 2}]
    assert len(record["regular_part"]["a"]) == 2
    assert run("verify", "mixed.json", "mixed.reg.json") == 0


def test_invariants_command(workdir):
    run("generate", "--blocks", "L:2,K:1", "--seed", "8", "-o", "pair.json")
    assert run("invariants", "pair.json", "-o", "inv.json") == 0
    record = load("inv.json")
    assert record["paired"] is True
    assert record["invariants"]["right_minimal_indices"] == [1]
    assert record["invariants"]["infinite_divisors"] == [1, 1]


def test_oracle_flag_adds_invariants(workdir):
    run("generate", "--blocks", "J:2:0,L:1", "--field", "GF(97)", "--seed", "9", "-o", "pair.json")
    assert run("canonicalize", "pair.json", "--oracle", "-o", "pair.result.json") == 0
    assert load("pair.result.json")["invariants"]["left_minimal_indices"] == [0]


def test_missing_command_prints_help():
    assert main.main([]) == 1


class TestProcessors:
    def test_identity_generation_is_the_realized_sum(self):
        blocks = [CanonicalBlock.k_block(1), CanonicalBlock.j_block(1, GF7(2))]
        built = GenerateProcessor(CONFIG).build(GF7, blocks, seed=0, congruence="identity")
        assert built["instance"] == realize_sum(blocks, GF7)

    def test_unknown_congruence_mode(self):
        with pytest.raises(ValueError):
            GenerateProcessor(CONFIG).build(Q, [CanonicalBlock.l_block(1)], congruence="orthogonal")

    def test_canonicalize_pair_record(self, k3_scattered):
        record = CanonicalProcessor(CONFIG).canonicalize_pair(k3_scattered, verify=True, oracle=True)
        assert record["blocks"] == [{"kind": "K", "n": 3}]
        assert record["size"] == 6
        assert record["verified"] and record["witness_complete"]
        assert record["invariants"]["infinite_divisors"] == [3, 3]

    def test_oracle_rejects_wrong_blocks(self):
        pair = realize_sum([CanonicalBlock.k_block(1)] * 2, Q)
        wrong = CanonicalForm(Q, [CanonicalBlock.k_block(2)], None, False)
        with pytest.raises(OracleMismatchError):
            CanonicalProcessor(CONFIG).check_oracle(pair, wrong)

    def test_missing_config_falls_back_to_defaults(self, workdir):
        processor = CanonicalProcessor(str(workdir / "absent.yaml"))
        assert processor.json_indent == 2
        record = processor.canonicalize_pair(realize(CanonicalBlock.l_block(1), Q))
        assert record["blocks"] == [{"kind": "L", "n": 1}]

    def test_processing_stats_count_records(self, l2_pair):
        processor = CanonicalProcessor(CONFIG)
        processor.canonicalize_pair(l2_pair)
        assert processor.get_processing_stats() == {"processed": 1, "failed": 0}
