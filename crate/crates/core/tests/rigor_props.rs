use bertini_core::rigor::{certify_compare, log2_sum, Enclosure, Relation, Verdict};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pos() -> impl Strategy<Value = (i64, i64)> {
    (1i64..1_000_000, 1i64..1_000_000)
}

fn any_ratio() -> impl Strategy<Value = (i64, i64)> {
    (-1_000_000i64..1_000_000, 1i64..1_000_000)
}

proptest! {
    #[test]
    fn arithmetic_contains_exact((a, b) in any_ratio(), (c, d) in any_ratio(), bits in 16u32..200) {
        let (x, y) = (rat(a, b), rat(c, d));
        let (ex, ey) = (Enclosure::from_rational(&x, bits), Enclosure::from_rational(&y, bits));
        prop_assert!(ex.add(&ey).contains_rational(&(&x + &y)));
        prop_assert!(ex.sub(&ey).contains_rational(&(&x - &y)));
        prop_assert!(ex.mul(&ey).contains_rational(&(&x * &y)));
        if c != 0 {
            prop_assert!(ex.div(&ey).unwrap().contains_rational(&(&x / &y)));
        }
    }

    #[test]
    fn sqrt_squares_back((a, b) in pos(), bits in 16u32..200) {
        let x = rat(a, b);
        let r = Enclosure::from_rational(&x, bits).sqrt().unwrap();
        prop_assert!(r.mul(&r).contains_rational(&x));
    }

    #[test]
    fn exp_ln_round_trip((a, b) in pos(), bits in 32u32..160) {
        let x = rat(a, b);
        let e = Enclosure::from_rational(&x, bits);
        prop_assert!(e.ln().unwrap().exp().contains_rational(&x));
        prop_assert!(e.log2().unwrap().exp2().contains_rational(&x));
    }

    #[test]
    fn float_oracle((a, b) in pos()) {
        let x = a as f64 / b as f64;
        let e = Enclosure::from_ratio(a, b, 128);
        let tol = 1e-12;
        let ln = e.ln().unwrap();
        prop_assert!(ln.lo_f64() - tol <= x.ln() && x.ln() <= ln.hi_f64() + tol);
        let s = e.sqrt().unwrap();
        prop_assert!(s.lo_f64() * (1.0 - tol) <= x.sqrt() && x.sqrt() <= s.hi_f64() * (1.0 + tol));
    }

    #[test]
    fn log2_sum_matches((a, b) in pos(), (c, d) in pos()) {
        let (x, y) = (rat(a, b), rat(c, d));
        let lx = Enclosure::from_rational(&x, 96).log2().unwrap();
        let ly = Enclosure::from_rational(&y, 96).log2().unwrap();
        let s = log2_sum(&lx, &ly).exp2();
        prop_assert!(s.contains_rational(&(x + y)));
    }

    #[test]
    fn comparison_is_sound((a, b) in any_ratio(), (c, d) in any_ratio(), bits in 16u32..128) {
        let (x, y) = (rat(a, b), rat(c, d));
        let v = certify_compare(&Enclosure::from_rational(&x, bits), &Enclosure::from_rational(&y, bits), Relation::Le);
        match v {
            Verdict::Holds => prop_assert!(x <= y),
            Verdict::Fails => prop_assert!(x > y),
            Verdict::Inconclusive => {}
        }
    }

    #[test]
    fn higher_precision_nests((a, b) in pos(), bits in 16u32..100) {
        let x = rat(a, b);
        let lo = Enclosure::from_rational(&x, bits).ln().unwrap();
        let hi = Enclosure::from_rational(&x, bits * 2).ln().unwrap();
        prop_assert!(lo.intersects(&hi));
        prop_assert!(hi.width().unwrap() <= lo.width().unwrap());
    }
}
