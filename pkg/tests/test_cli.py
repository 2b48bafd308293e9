import json

import pytest

from hspeed.cli import main
from hspeed.property import K3, P3
from hspeed.structures import dump_structure


@pytest.fixture
def forbidden_files(tmp_path):
    p3 = tmp_path / "p3.json"
    k3 = tmp_path / "k3.json"
    dump_structure(P3, str(p3))
    dump_structure(K3, str(k3))
    return f"{p3},{k3}"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDispatch:
    def test_speed_csv(self, capsys, forbidden_files):
        code, out, _ = run(capsys, "speed", "--forbid", forbidden_files, "--nmax", "8", "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == "n,labeled,unlabeled"
        assert out.splitlines()[8].startswith("8,764,")

    def test_template_count(self, capsys, tmp_path):
        from hspeed.corpus import symmetric_bipartite_template
        from hspeed.template import template_to_json

        path = tmp_path / "bip.json"
        path.write_text(json.dumps(template_to_json(symmetric_bipartite_template())))
        code, out, _ = run(capsys, "template", "count", "--template", str(path), "--n", "8")
        assert code == 0
        assert json.loads(out)["count"] == "91"

    def test_unknown_subcommand(self, capsys):
        code, _, err = run(capsys, "frobnicate")
        assert code == 2

    def test_contract_error_json(self, capsys):
        code, _, err = run(capsys, "blocks", "--n", "2", "--k", "5")
        assert code == 2
        payload = json.loads(err)
        assert payload["error"] == "out-of-range"

    def test_usage_error_json(self, capsys):
        code, _, err = run(capsys, "speed", "--nmax", "4")
        assert code == 2
        assert json.loads(err)["error"] == "usage"

    def test_decompose(self, capsys, tmp_path):
        from hspeed.corpus import matching

        path = tmp_path / "m2.json"
        dump_structure(matching(2), str(path))
        code, out, _ = run(capsys, "decompose", str(path))
        assert code == 0
        payload = json.loads(out)
        assert payload["classes"] == [[1, 2], [3, 4]]
        assert payload["sigma"]["E(x1,x2)"] == [[1, 1], [2, 2]]

    def test_probe(self, capsys, forbidden_files):
        code, out, _ = run(capsys, "probe", "tb", "--forbid", forbidden_files, "--k", "2", "--nmax", "6")
        assert code == 0
        assert json.loads(out)["verdict"] == "consistent"

    def test_blocks(self, capsys):
        code, out, _ = run(capsys, "blocks", "--n", "6", "--k", "2")
        assert code == 0
        assert json.loads(out)["count"] == "15"

    def test_osc_balanced(self, capsys):
        code, out, _ = run(capsys, "osc", "balanced", "--r", "3", "--c", "2/5")
        assert code == 0
        payload = json.loads(out)
        assert payload["density"] == "2/5"

    def test_osc_blowup(self, capsys, tmp_path):
        path = tmp_path / "edge3.json"
        path.write_text(json.dumps({"r": 3, "v": 3, "edges": [[1, 2, 3]]}))
        code, out, _ = run(capsys, "osc", "blowup", "--hypergraph", str(path), "--n", "9")
        assert code == 0
        assert json.loads(out)["count"] == "36"

    def test_corpus_kinds(self, capsys):
        for kind in ("matching", "halfgraph-blowup", "tight-cycle", "symmetric-bipartite"):
            code, out, _ = run(capsys, "corpus", "--kind", kind)
            assert code == 0
            json.loads(out)

    def test_unknown_corpus_kind(self, capsys):
        code, _, err = run(capsys, "corpus", "--kind", "nonsense")
        assert code == 2
        assert json.loads(err)["error"] == "unknown-kind"


class TestReproducibility:
    def test_sampler_byte_identical(self, capsys, tmp_path):
        args = [
            "osc", "sample", "--r", "2", "--c", "2/3", "--k", "3", "--n", "30",
            "--delta", "1.6", "--seed", "42",
        ]
        out_a = tmp_path / "a.json"
        out_b = tmp_path / "b.json"
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_speed_byte_identical(self, capsys, forbidden_files, tmp_path):
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        args = ["speed", "--forbid", forbidden_files, "--nmax", "6", "--format", "csv"]
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_arrays_probe_csv(self, capsys, forbidden_files):
        code, out, _ = run(
            capsys, "arrays", "probe", "--forbid", forbidden_files, "--rel", "E",
            "--split", "1", "--m", "2", "--nmax", "6", "--format", "csv",
        )
        assert code == 0
        assert out.splitlines()[0] == "n,maxN,witness_id"
        assert out.splitlines()[2].split(",")[2]  # witness digest present

    def test_speed_defaults_to_csv(self, capsys, forbidden_files):
        code, out, _ = run(capsys, "speed", "--forbid", forbidden_files, "--nmax", "8")
        assert code == 0
        assert out.splitlines()[0] == "n,labeled,unlabeled"
        assert out.splitlines()[8] == "8,764,5"
