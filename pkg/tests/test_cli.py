import subprocess
import sys

import pytest

from ratstep.cli import main, read_config
from ratstep.convergence import from_csv


def test_run_to_stdout(capsys):
    code = main(["run", "--problem", "heat1d", "--method", "sdirk3", "--scheme", "rational",
                 "--grid", "20", "--steps", "10,20,40"])
    assert code == 0
    (rep,) = from_csv(capsys.readouterr().out)
    assert rep.Ns == [10, 20, 40] and rep.M == 20


def test_run_markdown_to_file(tmp_path):
    out = tmp_path / "r.md"
    code = main(["run", "--problem", "advection", "--method", "implicit_euler", "--scheme", "rk",
                 "--grid", "10", "--steps", "10,20", "--format", "markdown", "--out", str(out)])
    assert code == 0
    assert "| Implicit Euler | RK |" in out.read_text()


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("# sweep\nproblem = heat1d\nmethod: gauss3\nscheme = rk\ngrid = 12\nsteps = 4, 8\n")
    assert read_config(cfg)["method"] == "gauss3"
    assert main(["run", "--config", str(cfg), "--method", "sdirk3"]) == 0
    (rep,) = from_csv(capsys.readouterr().out)
    assert rep.method == "sdirk3" and rep.M == 12 and rep.Ns == [4, 8]


@pytest.mark.parametrize("argv", [
    [],
    ["run", "--problem", "heat1d"],
    ["run", "--problem", "wave", "--method", "gauss3", "--scheme", "rk", "--steps", "4"],
    ["run", "--problem", "heat1d", "--method", "gauss3", "--scheme", "rk", "--steps", "8,4"],
    ["reproduce", "--table", "T4"],
])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_bad_config_is_usage_error(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    with pytest.raises(SystemExit) as exc:
        main(["run", "--config", str(cfg)])
    assert exc.value.code == 2
    cfg.write_text("problem = wave\nmethod = gauss3\nscheme = rk\nsteps = 4\n")
    with pytest.raises(SystemExit) as exc:
        main(["run", "--config", str(cfg)])
    assert exc.value.code == 2


def test_check_command(capsys):
    assert main(["check"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(line.startswith("[PASS]") for line in lines)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ratstep", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "reproduce" in proc.stdout
