import json

import pytest

from topocode.cli import main
from topocode.tables import reproduce_table1, reproduce_table2


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestStringCommands:
    def test_add_matches_table1(self, capsys):
        code, out, _ = run_cli(capsys, "string", "add", "1013412", "2143101", "--ring", "mod10")
        assert code == 0
        assert out.strip() == "3156513"

    def test_sub(self, capsys):
        code, out, _ = run_cli(capsys, "string", "sub", "1013412", "2143101", "--ring", "mod10")
        assert code == 0 and out.strip() == "9970311"

    def test_complement(self, capsys):
        code, out, _ = run_cli(capsys, "string", "complement", "1013412")
        assert code == 0 and out.strip() == "8986587"

    def test_breed_requires_seed(self, capsys, monkeypatch):
        monkeypatch.delenv("TOPOCODE_SEED", raising=False)
        code, _, err = run_cli(capsys, "string", "breed", "214", "1001", "68")
        assert code == 1 and "seed" in err.lower()

    def test_breed_env_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("TOPOCODE_SEED", "3")
        code, out, _ = run_cli(capsys, "string", "breed", "214", "1001", "68")
        assert code == 0
        assert json.loads(out)["total_bytes"] == "54"

    def test_partitions(self, capsys):
        code, out, _ = run_cli(capsys, "string", "partitions", "5", "--mode", "sum")
        assert code == 0
        assert [p["parts"] for p in json.loads(out)][0] == [4, 1]


class TestTables:
    def test_table2_file_output(self, capsys, tmp_path):
        target = tmp_path / "table2.tsv"
        code, _, _ = run_cli(capsys, "tables", "reproduce", "--which", "table2", "--out", str(target))
        assert code == 0
        assert target.read_text() == reproduce_table2().to_text()

    def test_table1_stdout(self, capsys):
        code, out, _ = run_cli(capsys, "tables", "reproduce", "--which", "table1")
        assert code == 0
        assert out == reproduce_table1().to_text()


class TestGraphCommands:
    def test_split_complete(self, capsys):
        code, out, _ = run_cli(capsys, "graph", "split-complete", "--m", "3")
        assert code == 0
        trees = json.loads(out)["trees"]
        assert len(trees) == 3

    def test_cayley(self, capsys):
        code, out, _ = run_cli(capsys, "graph", "cayley", "--m", "6")
        data = json.loads(out)
        assert code == 0 and data["closed_form"] == data["enumerated"] == 1296


class TestLabelCommands:
    def graph_file(self, tmp_path):
        blob = {"vertices": [1, 2, 3, 4], "edges": [[1, 2], [2, 3], [3, 4]]}
        path = tmp_path / "p4.json"
        path.write_text(json.dumps(blob))
        return str(path)

    def test_search(self, capsys, tmp_path):
        code, out, _ = run_cli(
            capsys, "label", "search", "--graph", self.graph_file(tmp_path),
            "--spec", "graceful;labeling",
        )
        assert code == 0
        assert json.loads(out)["status"] == "found"

    def test_verify(self, capsys, tmp_path):
        blob = {
            "vertices": [1, 2, 3],
            "edges": [[1, 2], [2, 3]],
            "vcolors": {"1": 0, "2": 2, "3": 1},
        }
        path = tmp_path / "p3.json"
        path.write_text(json.dumps(blob))
        code, out, _ = run_cli(capsys, "label", "verify", "--graph", str(path),
                               "--spec", "graceful;labeling")
        assert code == 0
        assert json.loads(out)["verdict"] is True


class TestTopcodeCommands:
    def test_string(self, capsys, tmp_path):
        blob = {
            "vertices": [1, 2],
            "edges": [[1, 2]],
            "vcolors": {"1": 1, "2": 2},
            "ecolors": {"1,2": 3},
        }
        path = tmp_path / "k2.json"
        path.write_text(json.dumps(blob))
        code, out, _ = run_cli(capsys, "topcode", "string", "--graph", str(path))
        assert code == 0 and out.strip() == "132"


class TestProtoCommands:
    def test_run_deterministic(self, capsys):
        code1, out1, _ = run_cli(capsys, "proto", "run", "--id", "self-cert-1", "--seed", "7")
        code2, out2, _ = run_cli(capsys, "proto", "run", "--id", "self-cert-1", "--seed", "7")
        assert code1 == code2 == 0
        assert out1 == out2

    def test_replay_diff(self, capsys, tmp_path):
        target = tmp_path / "t.jsonl"
        code, _, _ = run_cli(capsys, "proto", "run", "--id", "tkpdra", "--seed", "5",
                             "--out", str(target))
        assert code == 0
        code, out, _ = run_cli(capsys, "proto", "replay", "--id", "tkpdra", "--seed", "5",
                               "--in", str(target))
        assert code == 0 and "match" in out
        code, out, _ = run_cli(capsys, "proto", "replay", "--id", "tkpdra", "--seed", "6",
                               "--in", str(target))
        assert code == 1

    def test_list(self, capsys):
        code, out, _ = run_cli(capsys, "proto", "list")
        assert code == 0 and "tkpdra" in out

    def test_usage_error_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["string"])
        assert exc.value.code == 2

    def test_operation_error_exit_1(self, capsys):
        code, _, err = run_cli(capsys, "string", "add", "12", "345")
        assert code == 1 and "length" in err
