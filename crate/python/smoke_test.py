"""Quick check that the extension module loads and agrees with hand results."""

from fractions import Fraction
import json

import weilcalc_py as wc


def main():
    assert wc.InfinitesimalObject("D").dim == 2
    assert wc.InfinitesimalObject("D(3)").dim == 4
    assert wc.InfinitesimalObject("D^3").dim == 8
    assert wc.InfinitesimalObject("D^3{(1,3)(2,3)}").dim == 5

    base = [1, Fraction(1, 2)]
    a = wc.TangentVector(base, [1, 2])
    b = wc.TangentVector(base, ["1/3", -1])
    s = a + b
    assert s.direction == [Fraction(4, 3), Fraction(1)]
    assert a + (-a) == wc.tangent_zero(base)
    assert 2 * a == a + a

    x = wc.VectorField(2, "x2, 0")
    y = wc.VectorField(2, "0, x1")
    z = wc.VectorField(2, "x1*x1, 1")
    br = x.bracket(y)
    assert br.components() == ["-x1", "x2"], br
    assert br == x.jacobian_bracket(y) == x.bracket_via_strong_difference(y)
    assert y.bracket(x) == wc.VectorField(2, "x1, -x2")

    terms, vanishes = wc.jacobi(x, y, z)
    assert vanishes and len(terms) == 3

    cones = wc.catalog_cones()
    assert len(cones) == 11 and all(c[4] for c in cones)

    code, report = wc.check_script("obj Sq = D^2\nmap s : Sq -> D := d1 + d2\ncheck map s\n")
    assert code == 2
    assert json.loads(report)["checks"][0]["details"]["residue"] == "2*X1*X2"

    code, report = wc.run_suite(section=5, trials=2)
    assert code == 0, report

    try:
        wc.InfinitesimalObject("D^")
    except ValueError:
        pass
    else:
        raise AssertionError("bad object parsed")

    print("smoke test passed")


if __name__ == "__main__":
    main()
