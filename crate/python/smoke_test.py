"""Smoke test for the bertini extension module.

Build and install first:

    pip install --no-build-isolation -e crates/py
"""

from fractions import Fraction

import bertini


def main():
    f = bertini.Field("3^2")
    assert (f.p, f.m, f.q) == (3, 2, 9)
    assert f.mul(f.inv(5), 5) == 1

    e = bertini.Enclosure("1/3", 64)
    assert e.contains("1/3") and not e.contains("1/2")
    assert (e * bertini.Enclosure("3")).contains("1")

    p2 = bertini.WeilModel("pn:2@gf:3")
    assert p2.dim == 2 and p2.q == 3
    assert int(p2.point_count(1)) == 13

    z = bertini.zeta_value(p2, bits=96)
    assert z.lo <= z.hi
    ep = bertini.euler_product(p2, 1, bits=96)
    assert 0 < ep.lo <= ep.hi < 1

    assert Fraction(bertini.l_fraction(3, 2, 1)) > 0

    conic = bertini.Scheme("pn:2", "3")
    exh = bertini.run_fraction(conic, [2])
    assert exh["total"] == 729 and exh["exhaustive"]
    smp = bertini.run_fraction(conic, [2], count=200, seed=7)
    again = bertini.run_fraction(conic, [2], count=200, seed=7)
    assert smp == again

    assert conic.decide(["x0*x2-x1^2"]) == "smooth_of_expected_dim"

    bk = bertini.verify_bk(conic, [2], bits=128)
    assert bk["verdict"] == "holds", bk

    r = bertini.verify_suite("lemma34", qmax=4, nmax=4, tmax=3)
    assert r["counterexample"] is None

    cor = bertini.corollary(2, 3)
    assert int(cor["minimal_d"]) > 0

    try:
        bertini.Field("6")
    except bertini.BertiniError:
        pass
    else:
        raise AssertionError("F_6 accepted")

    code, out, _ = bertini.cli(["bound", "simple", "--q", "3", "--n", "2", "--deg", "1"])
    assert code == 0 and '"schema"' in out

    print("smoke test ok")


if __name__ == "__main__":
    main()
