import io
import subprocess
import sys

import pytest

from thompson_stein.cli import main

NONMINIMAL_IDENTITY = "[2 [3 . . .] [3 . . .]] | [3 [2 . .] [2 . .] [2 . .]]"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_eq():
    assert run("eq", "z1_0 z1_0^-1", "") == (0, "equal\n", "")
    code, out, _ = run("eq", "z1_0", "z1_1")
    assert (code, out) == (1, "distinct\n")
    assert run("eq", "y2_2 z1_0", "z1_0 y2_3")[0] == 0


def test_reduce_nonminimal_identity():
    assert run("reduce", NONMINIMAL_IDENTITY) == (0, ". | .\n", "")


def test_growth():
    code, out, _ = run("--group", "2,3", "growth", "--j", "2", "--n", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,leaves,lower_bound,finite_word_length,bfs_length"
    assert [line.split(",")[1] for line in lines[1:]] == ["3", "9", "27", "81"]


def test_eval_and_map_round_trip():
    code, out, _ = run("eval", "z1_0")
    assert code == 0
    plmap, leaves = out.splitlines()
    assert plmap == "0,0;1/2,1/4;3/4,1/2;1,1"
    assert leaves == "leaves 3"
    code, out, _ = run("unmap", plmap)
    diagram = out.strip()
    assert run("map", diagram)[1].strip() == plmap


def test_nf_and_bounds():
    code, out, _ = run("nf", "z1_0^-1 y2_0 z1_0")
    assert code == 0
    assert run("eq", out.strip(), "z1_0^-1 y2_0 z1_0")[0] == 0
    code, out, _ = run("bounds", "y2_0^2")
    assert code == 0
    values = dict(line.split() for line in out.splitlines())
    assert list(values) == ["lower_bound", "finite_word_length", "d_times_leaves"]
    assert int(values["lower_bound"]) <= 2 <= int(values["finite_word_length"]) <= int(values["d_times_leaves"]) == 90


def test_compose_and_invert():
    a = "[2 . [2 . .]] | [3 . . .]"
    code, out, _ = run("compose", a, "[3 . . .] | [2 . [2 . .]]")
    assert (code, out) == (0, ". | .\n")
    assert run("invert", a)[1] == "[3 . . .] | [2 . [2 . .]]\n"


def test_ball_dump():
    code, out, _ = run("ball", "--radius", "1")
    lines = out.splitlines()
    assert lines[0] == "length,word,diagram,map"
    assert len(lines) == 1 + 17
    assert lines[1].startswith('0,"",". | ."')


def test_file_arguments(tmp_path):
    p = tmp_path / "w.txt"
    p.write_text("z1_0 z1_0^-1\n")
    assert run("eq", f"@{p}", "")[0] == 0
    code, _, err = run("eq", f"@{tmp_path / 'missing'}", "")
    assert code == 2 and "cannot read" in err


@pytest.mark.parametrize(
    "argv, code",
    [
        (("eq", "z1_0^0", ""), 2),
        (("eval", "q1_0"), 2),
        (("reduce", "[2 . .] | [3 . . .]"), 2),
        (("reduce", "[5 . . . . .] | [5 . . . . .]"), 2),
        (("unmap", "0,0;1/5,1/2;1,1"), 3),
        (("--group", "3,4", "nf", "z1_0"), 3),
        (("--group", "2,2", "eval", "z1_0"), 3),
        (("frobnicate",), 2),
        ((), 2),
    ],
)
def test_error_exit_codes(argv, code):
    got, out, err = run(*argv) if argv else run()
    assert got == code
    assert out == ""


def test_parse_error_reports_position():
    code, _, err = run("eval", "z1_0 z1_x")
    assert code == 2 and "position 5" in err


def test_deterministic_output():
    assert run("eval", "y2_1 z2_2^-1 z1_0") == run("eval", "y2_1 z2_2^-1 z1_0")


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "thompson_stein", "eq", "z1_0", "z1_1"], capture_output=True, text=True
    )
    assert proc.returncode == 1 and proc.stdout == "distinct\n"
