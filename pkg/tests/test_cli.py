from pathlib import Path

import pytest

from catkit.cli import _COMMANDS, build_parser, run
from catkit.syntax import parse_sentence
from catkit.transforms import TheoryInstanceSet

HERE = Path(__file__).parent
DATA = HERE / "data"
GOLDEN = HERE / "golden"

CYCLE = "domain 3\nrel R 2\nt 0 1\nt 1 2\nt 2 0\n"
FLIPPED = "domain 3\nrel R 2\nt 1 0\nt 0 2\nt 2 1\n"


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    (tmp_path / "a.str").write_text(CYCLE)
    (tmp_path / "b.str").write_text(FLIPPED)
    (tmp_path / "serial.fml").write_text("rel R 2\n!x ?y R(x, y)\n")
    (tmp_path / "pool.fml").write_text("rel P 1\nP(y1)\ny1 = y1\n")
    (tmp_path / "h.str").write_text("domain 2\nrel P 1\nt 0\nfamily rel 1\nbegin\nend\n")
    return tmp_path


def test_every_documented_subcommand_exists():
    assert list(_COMMANDS) == [
        "parse", "render", "relativize", "prime", "res", "iso", "cat", "catplus", "eval",
        "eval-henkin", "closure-check", "enum", "find-iso", "check-cat", "cat-truth",
        "lemma-check", "unique-iso", "gen-comprehension", "gen-induction", "gen-pa-doubled",
        "gen-zfc", "build-phi", "verify-phi", "export-prover", "catalogue"]


@pytest.mark.parametrize("command", list(_COMMANDS))
def test_help_lists_flags(command, capsys):
    code, out, _ = call(capsys, command, "--help")
    assert code == 0
    assert "--seed" in out and "--out" in out
    sub = build_parser()._subparsers._group_actions[0].choices[command]
    for action in sub._actions:
        for opt in action.option_strings:
            assert opt in out


def test_usage_errors_exit_1(capsys):
    assert call(capsys, "cat", "--bogus")[0] == 1
    assert call(capsys, "nonsense")[0] == 1
    assert call(capsys)[0] == 1
    assert call(capsys, "cat")[0] == 1
    assert call(capsys, "cat", "--key", "N9")[0] == 1
    assert call(capsys, "check-cat", "--key", "N2", "--kappa", "0")[0] == 1
    assert call(capsys, "render", "--formula", "/nonexistent.fml")[0] == 1


def test_capacity_exit_2(capsys):
    code, _, err = call(capsys, "check-cat", "--key", "N2", "--kappa", "3", "--capacity", "5")
    assert code == 2 and "capacity" in err


def test_capacity_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("CATKIT_CAPACITY", "5")
    assert call(capsys, "check-cat", "--key", "N2", "--kappa", "3")[0] == 2


def test_cat_of_n2(capsys):
    code, out, _ = call(capsys, "cat", "--key", "N2")
    assert code == 0
    f, vocab = parse_sentence(out)
    assert len(vocab) == 0


def test_lemma_check_on_one_element(capsys):
    code, out, _ = call(capsys, "lemma-check", "--formula", DATA / "one_elem.fml", "--kappa", "2")
    assert code == 0
    assert "verdict agree" in out.splitlines()


def test_check_cat_n2_is_vacuous(capsys):
    code, out, _ = call(capsys, "check-cat", "--key", "N2", "--kappa", "4")
    assert code == 0
    assert out.splitlines()[0] == "verdict vacuously-categorical"


def test_non_categorical_still_exits_0(capsys):
    code, out, _ = call(capsys, "check-cat", "--key", "N2", "--kappa", "1")
    assert code == 0
    code, out, _ = call(capsys, "lemma-check", "--key", "N2", "--kappa", "1")
    assert code == 0


def test_structure_commands(files, capsys):
    assert call(capsys, "eval", "--formula", files / "serial.fml", "--model", files / "a.str")[1] == "value true\n"
    code, out, _ = call(capsys, "find-iso", "--model", files / "a.str", "--model", files / "b.str")
    assert out == "isomorphic true\nmap 0->0 1->2 2->1\n"
    code, out, _ = call(capsys, "enum", "--formula", files / "serial.fml", "--size", "2", "--up-to-iso")
    assert out.splitlines()[:2] == ["size 2", "count 6"]


def test_henkin_commands(files, capsys):
    (files / "p.fml").write_text("rel P 1\n!X1 !x ~X1(x)\n")
    code, out, _ = call(capsys, "eval-henkin", "--formula", files / "p.fml", "--model", files / "h.str")
    assert out == "value true\n"
    code, out, _ = call(capsys, "closure-check", "--model", files / "h.str", "--formula", files / "pool.fml")
    assert out.splitlines()[0] == "closed false"
    assert "missing 0 1" in out
    assert call(capsys, "eval-henkin", "--formula", files / "p.fml", "--model", files / "a.str")[0] == 1


def test_generators_reparse(files, capsys):
    for argv in (("gen-comprehension", "--formula", files / "pool.fml"),
                 ("gen-induction", "--depth", "1"),
                 ("gen-pa-doubled", "--depth", "1"),
                 ("gen-zfc", "--formula", DATA / "zfc_pool.fml")):
        code, out, _ = call(capsys, *argv)
        assert code == 0
        ts = TheoryInstanceSet.from_text(out)
        assert ts.to_text() == out


@pytest.mark.parametrize("argv,golden", [
    (("gen-pa-doubled", "--depth", "1"), "gen_pa_doubled_d1.txt"),
    (("gen-zfc", "--formula", DATA / "zfc_pool.fml"), "gen_zfc_pool3.txt"),
])
def test_golden_outputs(argv, golden, capsys, tmp_path):
    out_path = tmp_path / "out.txt"
    assert call(capsys, *argv, "--out", out_path)[0] == 0
    assert out_path.read_bytes() == (GOLDEN / golden).read_bytes()


def test_phi_and_prover_commands(capsys):
    code, out, _ = call(capsys, "build-phi")
    assert out.startswith("psi ") and "\nphi (?x " in out
    code, out, _ = call(capsys, "verify-phi", "--size", "4", "--conjugated")
    assert "identity false" in out and "map 0->0 1->1 2->3 3->2 4->5" in out
    code, out, _ = call(capsys, "export-prover", "--key", "PA-base")
    assert out.count("fof(") == 8
    assert call(capsys, "export-prover", "--key", "ZFC2-templates")[0] == 1


def test_catalogue(capsys):
    code, out, _ = call(capsys, "catalogue", "list")
    assert [line.split()[0] for line in out.splitlines()][:2] == ["N2", "I2"]
    code, out, _ = call(capsys, "catalogue", "show", "P2")
    assert out.startswith("entry P2\n")
    assert call(capsys, "catalogue", "show")[0] == 1


def test_identical_invocations_are_identical(capsys):
    argv = ("check-cat", "--formula", DATA / "one_elem.fml", "--kappa", "3", "--seed", "4")
    assert call(capsys, *argv) == call(capsys, *argv)
