import pytest

from corpus_tools import corpus_files
from fxacc.frontend import CompileError, check_source, parse, to_source


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
def test_printer_roundtrip(path):
    src = path.read_text()
    once = to_source(parse(src, str(path)))
    assert to_source(parse(once)) == once
    check_source(once)


@pytest.mark.parametrize("src, message", [
    ("int main(){ return x; }", "undeclared"),
    ("int main(){ int a; a = ; }", "expected expression"),
    ("int main(){ int *p; float f; f = p; return 0; }", "restrict"),
    ("int main(){ break; }", "outside a loop"),
    ("int f(int a){return a;} int main(){ return f(1,2); }", "expects 1 arguments"),
    ("int main(){ goto L; }", "__label__"),
])
def test_rejected(src, message):
    with pytest.raises(CompileError, match=message):
        check_source(src)


def test_error_carries_position():
    with pytest.raises(CompileError, match=r"prog\.c:2:"):
        check_source("int main() {\n  return y;\n}", "prog.c")


def test_main_params_visible():
    prog = check_source("int main(int a, unsigned b) { return a; }")
    assert len(prog.main.params) == 2
