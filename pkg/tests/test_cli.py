import json

from polyopt.cli import main


def test_solve_file(tmp_path, capsys):
    f = tmp_path / "q.poly"
    f.write_text("vars x\nminimize (x - 2)^2 + 1\n")
    report = tmp_path / "r.json"
    assert main(["solve", str(f), "--report", str(report)]) == 0
    out = capsys.readouterr().out
    assert "status: solved" in out and "x=2" in out
    assert json.loads(report.read_text())["fstar"] > 0.999


def test_solve_example_with_options(tmp_path, capsys):
    rc = main(["solve", "example:twisted-cubic", "--strategy", "fj-minors", "--rank-bound", "2",
               "--export-sdpa", str(tmp_path), "--seed", "1"])
    assert rc == 0
    assert list(tmp_path.glob("*.dat-s"))


def test_known_minimum_flag(capsys):
    assert main(["solve", "example:motzkin", "--known-minimum", "0"]) == 0
    assert capsys.readouterr().out.count("point:") == 4


def test_radical(tmp_path, capsys):
    f = tmp_path / "r.poly"
    f.write_text("vars x y\nminimize 0\neq x^2 + y^2\n")
    assert main(["radical", str(f)]) == 0
    out = capsys.readouterr().out
    assert "generator: y" in out and "generator: x" in out


def test_bad_input(tmp_path, capsys):
    f = tmp_path / "bad.poly"
    f.write_text("vars x\n")
    assert main(["solve", str(f)]) == 2
    assert main(["solve", str(tmp_path / "missing.poly")]) == 2
