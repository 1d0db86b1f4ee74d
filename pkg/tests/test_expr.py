import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critgrad.errors import ArityError, EvalDomainError, ExprSyntaxError, UnknownIdentifierError
from critgrad.expr import evaluate, parse, sample, to_text, variables
from critgrad.mesh import build_mesh


def ev(text, x=0.0, y=None):
    return evaluate(parse(text), x, y)


def test_basic_expression():
    assert ev("cos(x) - sin(x)^2", 0.0) == 1.0


def test_guarded_branch():
    assert ev("if x < 0 then cos(x) - sin(x)^2 else 0", 1.0) == 0.0
    assert ev("if x < 0 then cos(x) - sin(x)^2 else 0", -np.pi / 2) == pytest.approx(-1.0)


def test_guard_boundary_takes_else():
    assert ev("if x < 0 then 1 else 2", 0.0) == 2.0


def test_precedence_exact():
    assert ev("2+3*4") == 14
    assert ev("-2^2") == -4
    assert ev("2^3^2") == 512
    assert ev("2^-1") == 0.5
    assert ev("8/4/2") == 1
    assert ev("10-4-3") == 3


def test_constants_and_functions():
    assert ev("pi") == math.pi
    assert ev("exp(1)") == pytest.approx(math.e)
    assert ev("ln(exp(2))") == pytest.approx(2.0)
    assert ev("abs(-3) + min(1, 2) + max(1, 2)") == 6
    assert ev("x * y", 2.0, 3.0) == 6.0


def test_unicode_comparators():
    assert ev("if x ≤ 0 then 1 else 2", 0.0) == 1.0
    assert ev("if x ≥ 1 then 1 else 2", 0.0) == 2.0


def test_syntax_error_offset():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("1 +")
    assert exc.value.offset == 3


def test_syntax_error_byte_offset_after_unicode():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("if x ≤ 0 then 1 else )")
    assert exc.value.offset == len("if x ≤ 0 then 1 else ".encode())


@pytest.mark.parametrize("text", ["", "(1", "1 2", "if x then 1 else 2", "sin x", "3 $ 4", "1e"])
def test_syntax_errors(text):
    with pytest.raises(ExprSyntaxError):
        parse(text)


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError):
        parse("tan(x)")
    with pytest.raises(UnknownIdentifierError):
        parse("z + 1")


def test_arity():
    with pytest.raises(ArityError):
        parse("sin(x, 1)")
    with pytest.raises(ArityError):
        parse("max(1)")


def test_variables():
    assert variables(parse("x + y*sin(x)")) == {"x", "y"}
    assert variables(parse("2*pi")) == set()


def test_sample_zero_and_example_coefficient():
    mesh = build_mesh(1, [-2 * np.pi, 2 * np.pi], 99)
    x = mesh.coords[:, 0]
    assert np.all(sample("0", mesh) == 0)
    got = sample("if x < 0 then 0 else cos(x) + 1", mesh)
    np.testing.assert_allclose(got, np.where(x < 0, 0.0, np.cos(x) + 1.0), rtol=0, atol=1e-15)


def test_sample_domain_error_reports_node():
    mesh = build_mesh(1, [-1, 1], 9)
    with pytest.raises(EvalDomainError) as exc:
        sample("ln(x)", mesh)
    assert exc.value.point[0] == pytest.approx(mesh.coords[0, 0])


def test_lazy_guard_avoids_domain_error():
    mesh = build_mesh(1, [-1, 1], 9)
    x = mesh.coords[:, 0]
    got = sample("if x > 0 then ln(x) else 0", mesh)
    np.testing.assert_allclose(got[x > 0], np.log(x[x > 0]))


def test_sample_rejects_y_in_1d():
    with pytest.raises(UnknownIdentifierError):
        sample("y", build_mesh(1, [0, 1], 5))


_leaf = st.one_of(
    st.sampled_from(["x", "y", "pi"]),
    st.floats(0, 50, allow_nan=False).map(lambda v: repr(round(v, 3))),
)


def _combine(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(lambda t: f"({t[0]}) {t[1]} ({t[2]})"),
        children.map(lambda c: f"-({c})"),
        st.tuples(st.sampled_from(["sin", "cos", "abs"]), children).map(lambda t: f"{t[0]}({t[1]})"),
        st.tuples(st.sampled_from(["min", "max"]), children, children).map(lambda t: f"{t[0]}({t[1]}, {t[2]})"),
        st.tuples(children, st.sampled_from(["<", "<=", ">", ">="]), children, children, children).map(
            lambda t: f"if ({t[0]}) {t[1]} ({t[2]}) then {t[3]} else {t[4]}"
        ),
    )


@settings(max_examples=100, deadline=None)
@given(text=st.recursive(_leaf, _combine, max_leaves=12))
def test_print_parse_round_trip(text):
    rng = np.random.default_rng(0)
    x, y = rng.uniform(-3, 3, 100), rng.uniform(-3, 3, 100)
    a = parse(text)
    b = parse(to_text(a))
    np.testing.assert_array_equal(evaluate(a, x, y), evaluate(b, x, y))
    assert to_text(b) == to_text(a)
