import pytest

from planesing.parsing import ParseError, parse_curve, parse_map, parse_reals


def test_parse_map_lips_form():
    P, Q = parse_map("(u, v^3+u^2*v)")
    assert P.coeffs == {(1, 0): 1.0}
    assert Q.coeffs == {(0, 3): 1.0, (2, 1): 1.0}


def test_parse_map_juxtaposition_products():
    _, Q = parse_map("(u, v^3 + u^3 v)")
    assert Q.coeffs == {(0, 3): 1.0, (3, 1): 1.0}
    _, Q = parse_map("(u, 2u v^2)")
    assert Q.coeffs == {(1, 2): 2.0}


def test_parse_map_without_outer_parens():
    P, Q = parse_map("u, v^2")
    assert P.coeffs == {(1, 0): 1.0}
    assert Q.coeffs == {(0, 2): 1.0}


def test_parse_map_signs_and_constants():
    P, Q = parse_map("(-u + 0.5, v^2 - 3v)")
    assert P.coeffs == {(1, 0): -1.0, (0, 0): 0.5}
    assert Q.coeffs == {(0, 2): 1.0, (0, 1): -3.0}


def test_parse_map_scientific_notation():
    P, _ = parse_map("(1e-3*u, v)")
    assert P.coeffs == {(1, 0): 1e-3}


def test_parse_map_double_star_power():
    _, Q = parse_map("(u, v**4 + u*v)")
    assert Q.coeffs == {(0, 4): 1.0, (1, 1): 1.0}


def test_parse_map_nested_parens():
    _, Q = parse_map("(u, (v + u)^2)")
    assert Q.coeffs == {(0, 2): 1.0, (1, 1): 2.0, (2, 0): 1.0}


def test_parse_curve_uses_t():
    a, b = parse_curve("t, t^3 + 0.5*t^2")
    assert a.coeffs == {1: 1.0}
    assert b.coeffs == {3: 1.0, 2: 0.5}


def test_parse_curve_rejects_uv():
    with pytest.raises(ParseError):
        parse_curve("u, t^2")


def test_parse_map_rejects_t():
    with pytest.raises(ParseError):
        parse_map("(t, v^2)")


@pytest.mark.parametrize(
    "bad",
    [
        "(u, v",          # unbalanced
        "(u,)",           # empty component
        "(u, v, w)",      # arity
        "(u, v^)",        # dangling power
        "(u, v^-2)",      # negative power
        "(u, v^2.5)",     # fractional power
        "(u, @)",         # stray token
        "",               # empty
        "(u, v/2)",       # unsupported operator
    ],
)
def test_parse_map_rejects_malformed(bad):
    with pytest.raises(ParseError):
        parse_map(bad)


def test_parse_reals():
    assert parse_reals("0.5,-1", 2) == (0.5, -1.0)
    assert parse_reals("1,2,3") == (1.0, 2.0, 3.0)
    with pytest.raises(ParseError):
        parse_reals("1,2", 3)
    with pytest.raises(ParseError):
        parse_reals("a,b", 2)
