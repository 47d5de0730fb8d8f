import pytest

from dualmem import build_v_universe, parse_structure, serialize_structure
from dualmem.cli import main
from dualmem.lemmas import EXPECTED_SUMMARIES


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def v3_file(tmp_path):
    path = tmp_path / "v3.st"
    path.write_text(serialize_structure(build_v_universe(3)))
    return str(path)


class TestGen:
    def test_v_universe(self, capsys, tmp_path):
        out_path = tmp_path / "u.st"
        code, out, _ = run(capsys, "gen", "v-universe", "--n", "3", "--out", str(out_path))
        assert code == 0
        assert out.strip() == str(out_path)
        assert parse_structure(out_path.read_text()) == build_v_universe(3)

    def test_scramble_prints_permutation(self, capsys, tmp_path, v3_file):
        out_path = tmp_path / "s.st"
        code, out, _ = run(capsys, "gen", "scramble", "--in", v3_file, "--seed", "7", "--out", str(out_path))
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == str(out_path)
        assert lines[1].startswith("perm ")
        assert sorted(map(int, lines[1].split()[1:])) == [0, 1, 2, 3]

    def test_gallery_writes_files_and_summaries(self, capsys, tmp_path):
        directory = tmp_path / "g"
        code, out, _ = run(capsys, "gen", "gallery", "--out", str(directory))
        assert code == 0
        assert len(out.splitlines()) == 8
        expected = (directory / "chain-vs-v3.expected").read_text()
        assert expected == EXPECTED_SUMMARIES["chain-vs-v3"]

    def test_tamper(self, capsys, tmp_path, v3_file):
        out_path = tmp_path / "t.st"
        code, out, _ = run(
            capsys, "gen", "tamper", "--in", v3_file, "--tamper-kind", "add-cycle",
            "--seed", "1", "--out", str(out_path),
        )
        assert code == 0
        assert parse_structure(out_path.read_text()).e1.find_cycle() is not None

    def test_bad_params_exit_two(self, capsys):
        code, _, err = run(capsys, "gen", "scramble")
        assert code == 2
        assert "error" in err


class TestCheckAxioms:
    def test_universe_passes(self, capsys, v3_file):
        code, out, _ = run(capsys, "check-axioms", v3_file)
        assert code == 0
        assert "1 extensionality pass" in out

    def test_tampered_fails_exit_one(self, capsys, tmp_path, v3_file):
        tampered = tmp_path / "t.st"
        run(capsys, "gen", "tamper", "--in", v3_file, "--tamper-kind", "break-extensionality",
            "--seed", "2", "--out", str(tampered))
        code, out, _ = run(capsys, "check-axioms", str(tampered))
        assert code == 1
        assert "1 extensionality fail" in out

    def test_missing_file_exit_two(self, capsys):
        code, _, err = run(capsys, "check-axioms", "no-such-file.st")
        assert code == 2

    def test_bounded_mode(self, capsys, v3_file):
        code, out, _ = run(capsys, "check-axioms", v3_file, "--mode", "bounded", "--depth", "3")
        assert code == 0
        assert "battery+bounded" in out


class TestFindIso:
    def test_identity_certificate(self, capsys, v3_file):
        code, out, _ = run(capsys, "find-iso", v3_file, "--verify", "--oracle-check")
        assert code == 0
        assert out.splitlines()[0] == "iso 4"
        assert out.splitlines()[1] == "map 0 0"

    def test_scrambled_matches_permutation(self, capsys, tmp_path, v3_file):
        s_path = tmp_path / "s.st"
        _, gen_out, _ = run(capsys, "gen", "scramble", "--in", v3_file, "--seed", "5", "--out", str(s_path))
        perm = gen_out.splitlines()[1].split()[1:]
        code, out, _ = run(capsys, "find-iso", str(s_path))
        assert code == 0
        maps = [line.split()[2] for line in out.splitlines()[1:]]
        assert maps == perm

    def test_diagnostic_exit_one(self, capsys, tmp_path):
        directory = tmp_path / "g"
        run(capsys, "gen", "gallery", "--out", str(directory))
        code, out, _ = run(capsys, "find-iso", str(directory / "chain-vs-v3.st"))
        assert code == 1
        assert out.splitlines()[0] == "fail both-directions-fail"

    def test_ill_founded_diagnostic(self, capsys, tmp_path):
        directory = tmp_path / "g"
        run(capsys, "gen", "gallery", "--out", str(directory))
        code, out, _ = run(capsys, "find-iso", str(directory / "membership-cycle.st"))
        assert code == 1
        assert out.startswith("fail ill-founded e1")

    def test_parse_error_exit_two(self, capsys, tmp_path):
        bad = tmp_path / "bad.st"
        bad.write_text("n 2\ne1 0 5\n")
        code, _, err = run(capsys, "find-iso", str(bad))
        assert code == 2
        assert "line 2" in err

    def test_empty_domain(self, capsys, tmp_path):
        empty = tmp_path / "v0.st"
        empty.write_text("n 0\n")
        code, out, _ = run(capsys, "find-iso", str(empty), "--verify", "--oracle-check")
        assert code == 0
        assert out == "iso 0\n"
        code, out, _ = run(capsys, "eval", str(empty), "--formula", "forall x false")
        assert code == 0 and out.strip() == "true"


class TestEval:
    def test_edge_query(self, capsys, tmp_path):
        path = tmp_path / "v2.st"
        path.write_text(serialize_structure(build_v_universe(2)))
        code, out, _ = run(capsys, "eval", str(path), "--formula", "x in1 y", "--assign", "x=0,y=1")
        assert code == 0 and out.strip() == "true"

    def test_false_exit_one(self, capsys, v3_file):
        code, out, _ = run(capsys, "eval", v3_file, "--formula", "exists x x in1 x")
        assert code == 1 and out.strip() == "false"

    def test_missing_assignment_exit_two(self, capsys, v3_file):
        code, _, err = run(capsys, "eval", v3_file, "--formula", "x in1 y", "--assign", "x=0")
        assert code == 2

    def test_formula_file(self, capsys, tmp_path, v3_file):
        f = tmp_path / "f.formula"
        f.write_text("forall x forall y ((forall z (z in1 x <-> z in1 y)) -> x = y)\n")
        code, out, _ = run(capsys, "eval", v3_file, "--formula-file", str(f))
        assert code == 0 and out.strip() == "true"


class TestVerifyLemmas:
    def test_structure_file(self, capsys, v3_file):
        code, out, _ = run(capsys, "verify-lemmas", v3_file)
        assert code == 0
        assert out.splitlines()[0] == "lemma witness-uniqueness pass"

    def test_gallery_failure_exit_one(self, capsys, tmp_path):
        directory = tmp_path / "g"
        run(capsys, "gen", "gallery", "--out", str(directory))
        code, out, _ = run(capsys, "verify-lemmas", str(directory / "chain-vs-v3.st"))
        assert code == 1
        assert "lemma isomorphism fail" in out

    def test_corpus_aggregate(self, capsys):
        code, out, _ = run(capsys, "verify-lemmas", "--corpus", "sizes=3 count=4", "--seed", "1")
        assert code == 0
        assert out.splitlines()[-1].startswith("corpus seeds=1..4 sizes=3")

    def test_no_input_exit_two(self, capsys):
        code, _, _ = run(capsys, "verify-lemmas")
        assert code == 2


class TestCollapse:
    def test_braces_and_code(self, capsys, v3_file):
        code, out, _ = run(capsys, "collapse", v3_file, "--element", "3")
        assert code == 0
        assert out == "{{},{{}}}\ncode=3\n"

    def test_empty_element(self, capsys, v3_file):
        code, out, _ = run(capsys, "collapse", v3_file, "--element", "0")
        assert code == 0
        assert out == "{}\ncode=0\n"

    def test_cycle_exit_one(self, capsys, tmp_path):
        directory = tmp_path / "g"
        run(capsys, "gen", "gallery", "--out", str(directory))
        code, out, _ = run(capsys, "collapse", str(directory / "membership-cycle.st"), "--element", "0")
        assert code == 1
        assert out.startswith("fail ill-founded e1 cycle=")

    def test_out_of_range_exit_two(self, capsys, v3_file):
        code, _, _ = run(capsys, "collapse", v3_file, "--element", "9")
        assert code == 2
