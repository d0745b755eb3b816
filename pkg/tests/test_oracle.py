import numpy as np

from fxacc.frontend import check_source
from fxacc.oracle import interpret


def values(src, inputs):
    res = interpret(check_source(src), inputs)
    assert res.status == "ok", res.message
    return [o.value for o in res.outputs]


def test_integer_wraparound_and_truncation():
    src = """int main(int a, int b) {
      emit(a / b); emit(-2147483647 - 1 - 1); unsigned u = 0; emit(u - 1);
      char c = 300; emit(c); return a % b; }"""
    assert values(src, [7, -2]) == [-3, 2147483647, 4294967295, 44, 1]


def test_float_and_wide_types():
    src = """int main(float x) {
      emit((int)x); emit(x * 2.0f); double d = 1.0 / 3.0; emit(d);
      long long q = 1LL << 40; emit(q); return 0; }"""
    v = values(src, [2.75])
    assert v[0] == 2
    assert v[1] == np.float32(5.5) and isinstance(v[1], np.float32)
    assert v[2] == 1.0 / 3.0
    assert v[3] == 1 << 40


def test_divide_trap():
    res = interpret(check_source("int main(int a) { return 1 / a; }"), [0])
    assert (res.status, res.message) == ("trap", "divide")


def test_step_limit():
    res = interpret(check_source("int main() { while (1) {} return 0; }"), [], step_limit=1000)
    assert res.status == "nontermination"


def test_output_names():
    res = interpret(check_source("int main() {\n  emit(1);\n  return 2;\n}"), [])
    assert [o.name for o in res.outputs] == ["emit@2:3", "return"]


def test_recursion():
    src = "int f(int n) { if (n < 2) return n; return f(n - 1) + f(n - 2); }\nint main(int n) { return f(n); }"
    assert values(src, [10]) == [55]
