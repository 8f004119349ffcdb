import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilmin.errors import EvalError, LexError, ParseError
from nilmin.expr import Node, eval_jet, eval_real, parse_text, render, tokenize
from nilmin.paracomplex import Paracomplex, close


def test_tokenize_positions():
    toks = tokenize("z + conj(zbar)")
    assert [t.kind for t in toks] == ["ident", "op", "ident", "lparen", "ident", "rparen"]
    assert toks[2].position == 4


def test_lex_error_position():
    with pytest.raises(LexError) as ei:
        tokenize("z + $")
    assert ei.value.position == 4


def test_leading_minus_binds_loosest():
    # -z + 1 parses as neg(z + 1)
    ast = parse_text("-z + 1")
    assert ast.kind == "neg"
    assert ast.children[0].kind == "add"


def test_precedence_and_associativity():
    ast = parse_text("1 - 2 - 3")
    assert ast.kind == "sub"
    assert ast.children[0].kind == "sub"
    ast = parse_text("1 + 2 * 3")
    assert ast.kind == "add"
    assert ast.children[1].kind == "mul"


def test_power_with_signed_exponent():
    ast = parse_text("z^-2")
    assert ast.kind == "pow" and ast.value == -2
    with pytest.raises(ParseError):
        parse_text("z^65")
    with pytest.raises(ParseError):
        parse_text("z^(2)")


def test_unknown_identifier():
    with pytest.raises(ParseError) as ei:
        parse_text("z + w")
    assert ei.value.position == 4


def test_unknown_function():
    with pytest.raises(ParseError):
        parse_text("tan(z)")


def test_trailing_junk():
    with pytest.raises(ParseError):
        parse_text("z )")


def test_render_round_trip_examples():
    for src in [
        "z", "-z + 1", "conj(z)^2 * (1 + j)/2", "exp(z) - sinh(zbar)",
        "x + y", "re(z)*im(zbar)", "2.5e-1 * z^3", "-(z - zbar)^-4",
    ]:
        ast = parse_text(src)
        assert parse_text(render(ast)) == ast


_leaf = st.sampled_from(["z", "zbar", "x", "y", "j", "1", "2.5", "0.25"])


@st.composite
def _expr_text(draw, depth=3):
    if depth == 0:
        return draw(_leaf)
    kind = draw(st.sampled_from(["leaf", "bin", "call", "pow", "neg"]))
    if kind == "leaf":
        return draw(_leaf)
    if kind == "bin":
        op = draw(st.sampled_from(["+", "-", "*"]))
        return f"({draw(_expr_text(depth - 1))}{op}({draw(_expr_text(depth - 1))}))"
    if kind == "call":
        fn = draw(st.sampled_from(["conj", "exp", "sinh", "cosh", "re", "im"]))
        return f"{fn}({draw(_expr_text(depth - 1))})"
    if kind == "pow":
        n = draw(st.integers(min_value=-4, max_value=4))
        return f"({draw(_expr_text(depth - 1))})^{n}"
    return f"-({draw(_expr_text(depth - 1))})"


@given(_expr_text())
@settings(max_examples=150)
def test_render_round_trip_fuzz(src):
    ast = parse_text(src)
    assert parse_text(render(ast)) == ast


def test_eval_jet_variables():
    z0 = Paracomplex(0.3, 0.7)
    jx = eval_jet(parse_text("x"), z0)
    jy = eval_jet(parse_text("y"), z0)
    assert close(jx.v, Paracomplex(0.3, 0.0), tol=1e-14)
    assert close(jy.v, Paracomplex(0.7, 0.0), tol=1e-14)
    # x = (z + zbar)/2
    assert close(jx.dz, Paracomplex(0.5, 0.0), tol=1e-14)
    assert close(jy.dz, Paracomplex(0.0, 0.5), tol=1e-14)


def test_eval_jet_re_im():
    z0 = Paracomplex(1.2, -0.4)
    jet = eval_jet(parse_text("re(z^2) + j*im(z^2)"), z0)
    assert close(jet.v, z0 * z0, tol=1e-12)


def test_eval_jet_null_divisor_reports_position():
    # (1-j)z is a null divisor at every point
    with pytest.raises(EvalError) as ei:
        eval_jet(parse_text("1/((1 - j)*z)"), Paracomplex(0.2, 0.1))
    assert ei.value.position is not None


def test_eval_real_profile():
    ast = parse_text("-(6 - 36*s^2)/(1 + 3*s^2)^2")
    assert abs(eval_real(ast, 0.0) + 6.0) < 1e-14
    s = 1.0 / 6.0 ** 0.5
    # at s = 1/sqrt(6) the numerator vanishes
    assert abs(eval_real(ast, s)) < 1e-14


def test_eval_real_rejects_paracomplex_vars():
    with pytest.raises(EvalError):
        eval_real(parse_text("z"), 0.0)
    with pytest.raises(EvalError):
        eval_real(parse_text("j*s"), 0.0)


def test_node_equality_and_hash():
    a = parse_text("z + 1")
    b = parse_text("z + 1")
    assert a == b and hash(a) == hash(b)
    assert a != parse_text("z + 2")
    assert isinstance(a, Node)
