import pytest

from backorbit.parse import ParseError, format_map, parse_expression, parse_map, parse_point
from backorbit.sphere import INFINITY, format_point, point


def test_parse_examples():
    R = parse_map("z^2 - 1")
    assert R.p.coeffs.tolist() == [-1, 0, 1]
    assert R.q.coeffs.tolist() == [1]
    assert parse_map("(z^2+1)/(2*z)").degree == 2


@pytest.mark.parametrize(
    "text,offset",
    [("z^2 + + 1", 6), ("z^2+(1", 6), ("z^", 2), ("2z", 1), ("z^2 1", 4), ("", 0), ("z^2/", 4), ("z^-1", 2)],
)
def test_syntax_errors_report_offset(text, offset):
    with pytest.raises(ParseError) as err:
        parse_expression(text)
    assert err.value.position == offset


def test_numbers_and_imaginary_unit():
    num, _ = parse_expression("-z^2+3i*z - .5e1 + 2.5E-1i")
    assert num.coeffs.tolist() == [-5 + 0.25j, 3j, -1]
    num, _ = parse_expression("(1+i)^2*z")
    assert num.coeffs.tolist() == [0, 2j]


def test_unary_sign_only_at_expression_start():
    assert parse_expression("-(z-1)")[0].coeffs.tolist() == [1, -1]
    assert parse_expression("(-z)^2")[0].coeffs.tolist() == [0, 0, 1]
    with pytest.raises(ParseError):
        parse_expression("z*-1")


def test_points():
    assert parse_point("inf") == INFINITY
    assert parse_point(" 0 ") == point(0)
    assert parse_point("-1.5+2i").affine() == -1.5 + 2j
    assert parse_point("1/(2i)").affine() == -0.5j
    with pytest.raises(ParseError):
        parse_point("z")
    with pytest.raises(ParseError):
        parse_point("1/0")


def test_format_round_trip():
    for text in ("z^2-1", "(z^2+1)/(2*z)", "(0.1+0.3i)*z^3 - 7e-5*z + 1/3", "(z^2-3)/(z^2+z+5)"):
        R = parse_map(text)
        S = parse_map(format_map(R))
        assert S.p == R.p and S.q == R.q
        T = parse_map(format_map(S))
        assert T.p == S.p and T.q == S.q
    for a in (0.1 + 0.2j, -3e-17 + 1j, 12345.678):
        p = point(a)
        assert parse_point(format_point(p)) == p
