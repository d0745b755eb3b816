import pytest

from fxacc.cli import main

IDENTITY = "int main(int a) { return a; }\n"


@pytest.fixture
def prog(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)

    def write(name, text):
        (tmp_path / name).write_text(text)
        return name
    return write


def test_compile_and_run(prog, capsys):
    src = prog("id.c", IDENTITY)
    assert main(["compile", src, "--seed", "3"]) == 0
    assert main(["run", "id.fxa", "--in", "41"]) == 0
    assert capsys.readouterr().out.strip().endswith("return = 41")


def test_oracle_run(prog, capsys):
    src = prog("add.c", "int main(int a, int b) { emit(a * b); return a + b; }\n")
    assert main(["oracle-run", src, "--in", "3,4"]) == 0
    assert capsys.readouterr().out.splitlines() == ["emit@1:26 = 12", "return = 7"]


def test_trap_exit_code(prog, capsys):
    src = prog("div.c", "int main(int a) { return 1 / a; }\n")
    main(["compile", src, "--seed", "1"])
    assert main(["run", "div.fxa", "--in", "0"]) == 3
    assert "trap: divide" in capsys.readouterr().err
    assert main(["oracle-run", src, "--in", "0"]) == 3


def test_compile_error_exit_code(prog):
    assert main(["compile", prog("bad.c", "int main( { }\n")]) == 2


def test_usage_errors(prog):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 4
    src = prog("id.c", IDENTITY)
    assert main(["stats", src, "--target", "a", "--seeds", "10"]) == 4
    assert main(["run", "missing.fxa"]) == 4


def test_diff_trace(prog, capsys):
    src = prog("loop.c", "int main(int n) { int s = 0; for (int i = 0; i < n; i++) s += i; return s; }\n")
    for seed in (1, 2):
        main(["compile", src, "--seed", str(seed), "-o", f"s{seed}.fxa"])
    main(["run", "s1.fxa", "--in", "5", "--trace", "a.trace"])
    main(["run", "s2.fxa", "--in", "5", "--trace", "b.trace"])
    main(["run", "s2.fxa", "--in", "6", "--trace", "c.trace"])
    capsys.readouterr()
    assert main(["diff-trace", "a.trace", "b.trace"]) == 0
    assert "shapes equal" in capsys.readouterr().out
    assert main(["diff-trace", "a.trace", "c.trace"]) == 1


def test_stats(prog, capsys):
    src = prog("br.c", "int main(int a) { int x = a + 1; if (a > 0) x = x * 2; return x; }\n")
    assert main(["stats", src, "--target", "x", "--seeds", "500", "--in", "3"]) == 0
    lines = dict(l.split(": ", 1) for l in capsys.readouterr().out.splitlines())
    assert float(lines["chi2_pvalue"]) > 0.001
    assert 0.4 < float(lines["first_branch_taken_fraction"]) < 0.6
    assert main(["stats", src, "--target", "nope", "--seeds", "500"]) == 4


def test_storm_report(prog, capsys):
    src = prog("arr.c", "int a[100];\nint main(int i) { a[i] = 1; return a[0]; }\n")
    assert main(["storm-report", src, "--seed", "2"]) == 0
    out = capsys.readouterr().out
    assert "storm a class 0 words 100 loop" in out
