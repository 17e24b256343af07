import json

import numpy as np
import pytest

from qbnets.cli import main
from qbnets.io import (
    density_to_json,
    extension_to_json,
    qbnet_from_json,
    qbnet_to_json,
    load_json,
    save_json,
)
from qbnets.sampling import (
    random_diagonal_extension,
    random_density_matrix,
    random_polytree_dag,
    random_qbnet,
    random_reducible_net,
)


@pytest.fixture
def screened_net_file(tmp_path, screened_pair_dag):
    net = random_qbnet(screened_pair_dag, np.random.default_rng(0))
    path = tmp_path / "net.json"
    save_json(path, qbnet_to_json(net))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestDsep:
    def test_screened_pair_true(self, capsys, screened_net_file):
        code, out, _ = run(capsys, "dsep", screened_net_file, "--a", "x", "--b", "y", "--z", "lam")
        assert code == 0 and out.strip() == "true"

    def test_bare_graph_accepted(self, capsys, tmp_path):
        save_json(
            tmp_path / "dag.json",
            {
                "nodes": [
                    {"name": "x", "states": 2, "parents": []},
                    {"name": "y", "states": 2, "parents": ["x"]},
                ]
            },
        )
        code, out, _ = run(capsys, "dsep", str(tmp_path / "dag.json"), "--a", "x", "--b", "y")
        assert code == 0 and out.strip() == "false"

    def test_unknown_name_is_usage_error(self, capsys, screened_net_file):
        code, _, err = run(capsys, "dsep", screened_net_file, "--a", "nope", "--b", "y")
        assert code == 2 and "nope" in err


class TestInfer:
    def test_bp_and_oracle_agree(self, capsys, tmp_path):
        rng = np.random.default_rng(1)
        net = random_qbnet(random_polytree_dag(rng, 6), rng)
        path = tmp_path / "net.json"
        save_json(path, qbnet_to_json(net))
        name = net.dag.name(0)
        code, out_bp, _ = run(
            capsys, "infer", str(path), "--evidence", f"{name}=0", "--method", "bp"
        )
        code2, out_or, _ = run(
            capsys, "infer", str(path), "--evidence", f"{name}=0", "--method", "oracle"
        )
        assert code == 0 and code2 == 0
        bp = json.loads(out_bp)["posteriors"]
        oracle = json.loads(out_or)["posteriors"]
        assert bp.keys() == oracle.keys()
        for node in bp:
            np.testing.assert_allclose(bp[node], oracle[node], atol=1e-8)

    def test_impossible_evidence_exits_one(self, capsys, tmp_path):
        save_json(
            tmp_path / "net.json",
            {
                "nodes": [{"name": "a", "states": 2, "parents": []}],
                "tpms": {"a": [[1.0, 0.0], [0.0, 0.0]]},
            },
        )
        code, _, err = run(
            capsys, "infer", str(tmp_path / "net.json"), "--evidence", "a=1", "--method", "oracle"
        )
        assert code == 1 and "impossible evidence" in err

    def test_query_selection(self, capsys, screened_net_file):
        code, out, _ = run(capsys, "infer", screened_net_file, "--method", "oracle", "--query", "x")
        assert code == 0
        assert list(json.loads(out)["posteriors"].keys()) == ["x"]


class TestEntropy:
    def test_plain_entropy(self, capsys, tmp_path):
        rho = random_density_matrix((("x", 2),), np.random.default_rng(2))
        save_json(tmp_path / "rho.json", density_to_json(rho))
        code, out, _ = run(capsys, "entropy", str(tmp_path / "rho.json"))
        w = np.linalg.eigvalsh(rho.matrix)
        assert code == 0
        assert float(out) == pytest.approx(float(-(w * np.log(w)).sum()), abs=1e-10)

    def test_mutual_and_cmi(self, capsys, tmp_path):
        v = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
        bell = np.outer(v, v.conj())
        save_json(
            tmp_path / "bell.json",
            density_to_json_from(bell),
        )
        code, out, _ = run(capsys, "entropy", str(tmp_path / "bell.json"), "--mutual", "x:y")
        assert code == 0 and float(out) == pytest.approx(2 * np.log(2), abs=1e-10)
        code, out, _ = run(capsys, "entropy", str(tmp_path / "bell.json"), "--conditional", "y")
        assert code == 0 and float(out) == pytest.approx(-np.log(2), abs=1e-10)


def density_to_json_from(matrix):
    from qbnets import DensityMatrix

    return density_to_json(DensityMatrix((("x", 2), ("y", 2)), matrix))


class TestEsq:
    def test_value_and_witness_file(self, capsys, tmp_path):
        mix = np.diag([0.5, 0, 0, 0.5]).astype(complex)
        save_json(tmp_path / "rho.json", density_to_json_from(mix))
        witness = tmp_path / "witness.json"
        code, out, _ = run(
            capsys,
            "esq",
            str(tmp_path / "rho.json"),
            "--restarts", "3",
            "--budget", "300",
            "--witness", str(witness),
        )
        assert code == 0
        assert json.loads(out)["value"] <= 1e-3
        assert witness.exists()
        from qbnets.io import extension_from_json

        ext = extension_from_json(load_json(witness))
        assert abs(float(ext.weights.sum()) - 1.0) < 1e-10


class TestConstructionCommands:
    def test_from_density_round_trip(self, capsys, tmp_path):
        ext = random_diagonal_extension(np.random.default_rng(3), (2, 2), 2)
        save_json(tmp_path / "ext.json", extension_to_json(ext))
        out_net = tmp_path / "net.json"
        code, _, _ = run(capsys, "from-density", str(tmp_path / "ext.json"), "-o", str(out_net))
        assert code == 0
        written = load_json(out_net)
        reparsed = qbnet_from_json(written)
        rewritten = qbnet_to_json(reparsed)
        for name, flat in written["tpms"].items():
            np.testing.assert_allclose(flat, rewritten["tpms"][name], atol=1e-12)

    def test_reduce_reducible(self, capsys, tmp_path):
        net = random_reducible_net(np.random.default_rng(4))
        save_json(tmp_path / "net.json", qbnet_to_json(net))
        out = tmp_path / "reduced.json"
        code, _, _ = run(capsys, "reduce", str(tmp_path / "net.json"), "-o", str(out))
        assert code == 0
        reduced = qbnet_from_json(load_json(out))
        assert reduced.dag.node_count == 3

    def test_reduce_rejects_dependent(self, capsys, tmp_path):
        ext = random_diagonal_extension(np.random.default_rng(5), (2, 2), 2)
        save_json(tmp_path / "ext.json", extension_to_json(ext))
        net_path = tmp_path / "net.json"
        run(capsys, "from-density", str(tmp_path / "ext.json"), "-o", str(net_path))
        code, _, err = run(capsys, "reduce", str(net_path), "-o", str(tmp_path / "r.json"))
        assert code == 1 and "reduction" in err


class TestVerifyCommand:
    def test_dsep_auto_selects_direction(self, capsys, tmp_path, screened_pair_dag):
        net = random_qbnet(screened_pair_dag, np.random.default_rng(6))
        path = tmp_path / "net.json"
        save_json(path, qbnet_to_json(net))
        code, out, _ = run(
            capsys, "verify", "dsep", "--dag", str(path),
            "--a", "x", "--b", "y", "--z", "lam", "--trials", "10",
        )
        assert code == 0
        report = json.loads(out)
        assert report["kind"] == "forward" and report["passed"]

        code, out, _ = run(
            capsys, "verify", "dsep", "--dag", str(path),
            "--a", "x", "--b", "y", "--trials", "50",
        )
        report = json.loads(out)
        assert report["kind"] == "witness"

    def test_bp_campaign(self, capsys):
        code, out, _ = run(capsys, "verify", "bp", "--trials", "5", "--max-nodes", "5")
        assert code == 0
        assert json.loads(out)["passed"]


class TestErrorHandling:
    def test_malformed_json_exits_two_with_line(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"nodes": [,]}')
        code, _, err = run(capsys, "dsep", str(bad), "--a", "x", "--b", "y")
        assert code == 2 and "line 1" in err

    def test_unknown_flag_exits_two(self, capsys, screened_net_file):
        code, _, _ = run(capsys, "dsep", screened_net_file, "--a", "x", "--b", "y", "--frobnicate", "1")
        assert code == 2

    def test_missing_file_exits_two(self, capsys):
        code, _, err = run(capsys, "dsep", "no-such-file.json", "--a", "x", "--b", "y")
        assert code == 2
