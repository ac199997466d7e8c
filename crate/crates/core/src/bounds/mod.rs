//! Closed-form constants, error terms and genus bounds, plus certified
//! minimal-degree solvers and the report assembled from them.

mod report;
mod solve;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use report::{bound_general, bound_simple, bound_thm_b, corollary_pipeline, BoundReport};
pub use solve::{
    minimal_d, replay_certificate, sides_log2, BoundQuery, Certificate, Inequality, PointMode, SolveOptions,
    ZetaSpec,
};

use crate::error::{Error, Result};
use crate::gf::prime_power;
use crate::rigor::{certify_adaptive, Enclosure, Relation, Verdict, MAX_BITS};

/// `L(q, n, k) = prod_{j<k} (1 - q^{-(n-j)})`.
pub fn l_fraction(q: &BigInt, n: u32, k: u32) -> Result<BigRational> {
    if k > n {
        return Err(Error::domain(format!("k = {k} exceeds n = {n}")));
    }
    if q < &BigInt::from(2) {
        return Err(Error::domain("q must be at least 2"));
    }
    let mut acc = BigRational::one();
    for j in 0..k {
        let qp = q.pow(n - j);
        acc *= BigRational::new(&qp - 1, qp);
    }
    Ok(acc)
}

/// `(2k-1)(1 + floor((1/n) log_q((d1+1) / ((n+1) 2^{n+1}))))`, exactly.
pub fn delta_exponent(d1: &BigUint, n: u32, k: u32, q: u64) -> BigInt {
    let num = d1 + 1u32;
    let den = BigUint::from(n + 1) << (n + 1);
    let step = BigUint::from(q).pow(n);
    // Largest j with q^{jn} <= num/den.
    let j: i64 = if num >= den {
        let mut j = 0i64;
        let mut scaled = den.clone() * &step;
        while scaled <= num {
            j += 1;
            scaled *= &step;
        }
        j
    } else {
        let mut t = 0i64;
        let mut scaled = num.clone();
        while scaled < den {
            t += 1;
            scaled *= &step;
        }
        -t
    };
    BigInt::from(2 * k as i64 - 1) * (1 + j)
}

/// The error term `2^{n+2} deg k q^{-δ} + (r+1) k r^n deg (n+1) dk^n q^{-d1/max(n+1,p)}`.
#[allow(clippy::too_many_arguments)]
pub fn bk_error_bound(
    d1: u64,
    dk: u64,
    n: u32,
    k: u32,
    q: u64,
    p: u64,
    r: u32,
    deg_x: &BigUint,
    bits: u32,
) -> Result<Enclosure> {
    if d1 > dk || d1 == 0 {
        return Err(Error::domain("need 1 <= d1 <= dk"));
    }
    let w = bits + 32;
    let delta = delta_exponent(&BigUint::from(d1), n, k, q);
    let qd = if delta.is_negative() {
        BigRational::from_integer(BigInt::from(q).pow(delta.magnitude().try_into().unwrap_or(u32::MAX)))
    } else {
        let e: u32 = delta.magnitude().try_into().map_err(|_| Error::capacity("delta too large"))?;
        BigRational::new(BigInt::one(), BigInt::from(q).pow(e))
    };
    let deg = BigInt::from(deg_x.clone());
    let first = BigRational::from_integer((BigInt::one() << (n + 2)) * &deg * k) * qd;
    let coef = BigInt::from(r + 1) * k * BigInt::from(r).pow(n) * &deg * (n + 1) * BigInt::from(dk).pow(n);
    let m = (n as u64 + 1).max(p);
    let decay = q_power(q, &BigRational::new(-BigInt::from(d1), BigInt::from(m)), w)?;
    let second = Enclosure::from_rational(&BigRational::from_integer(coef), w).mul(&decay);
    Ok(Enclosure::from_rational(&first, w).add(&second).with_bits(bits))
}

/// `q^x` for rational `x`.
pub(crate) fn q_power(q: u64, x: &BigRational, w: u32) -> Result<Enclosure> {
    if x.is_integer() {
        let e = x.to_integer();
        let mag: u32 = e.magnitude().try_into().map_err(|_| Error::capacity("exponent too large"))?;
        let v = BigRational::from_integer(BigInt::from(q).pow(mag));
        let v = if e.is_negative() { v.recip() } else { v };
        return Ok(Enclosure::from_rational(&v, w));
    }
    let lq = Enclosure::from_int(q, w).log2()?;
    Ok(lq.mul(&Enclosure::from_rational(x, w)).exp2())
}

/// Which generic constant `C_{r,q}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstantKind {
    /// `2^{3r+1}(r+1)^5 r^r`, or `2^{3r+2^{r+1}}(r+1)^5 r^r` when `q = 2`.
    ThmB,
    /// `2^{3r+3} r^{r+5}`, or `2^{3r+3+(3+2√2)^r} r^{r+5}` when `q = 2`.
    ThmA,
}

/// A constant as an exact integer when representable, always with a
/// certified `log2`.
#[derive(Clone, Debug)]
pub struct Constant {
    pub exact: Option<BigUint>,
    pub log2: Enclosure,
}

impl Constant {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "exact": self.exact.as_ref().map(|x| x.to_string()),
            "log2": self.log2.to_json(),
        })
    }
}

const EXACT_CONSTANT_BITS: u64 = 1 << 16;

pub fn constant(which: ConstantKind, r: u32, q: u64, bits: u32) -> Result<Constant> {
    if r < 2 {
        return Err(Error::domain("need r >= 2"));
    }
    let w = bits + 32;
    let rr = BigUint::from(r);
    let (two_exp, rest): (Option<u64>, BigUint) = match which {
        ConstantKind::ThmB => {
            let e = if q == 2 { 3 * r as u64 + 2u64.checked_pow(r + 1).unwrap_or(u64::MAX) } else { 3 * r as u64 + 1 };
            (Some(e), BigUint::from(r + 1).pow(5) * rr.pow(r))
        }
        ConstantKind::ThmA => (if q == 2 { None } else { Some(3 * r as u64 + 3) }, rr.pow(r + 5)),
    };
    let rest_log = Enclosure::from_biguint(&rest, w).log2()?;
    let log2 = match two_exp {
        Some(e) => Enclosure::from_int(e, w).add(&rest_log),
        None => weil_av_base(w)?.powi(r).add(&Enclosure::from_int(3 * r as u64 + 3, w)).add(&rest_log),
    };
    let exact = match two_exp {
        Some(e) if e <= EXACT_CONSTANT_BITS => Some(rest << e),
        _ => None,
    };
    Ok(Constant { exact, log2: log2.with_bits(bits) })
}

/// `3 + 2√2`.
fn weil_av_base(w: u32) -> Result<Enclosure> {
    Ok(Enclosure::from_int(3, w).add(&Enclosure::from_int(8, w).sqrt()?))
}

/// `(1 + √q)^{2n} = (q + 1 + 2√q)^n`, the Weil bound for an `n`-dimensional
/// abelian variety.
pub fn weil_point_bound(n: u32, q: u64, bits: u32) -> Result<Enclosure> {
    if n == 0 || q < 2 {
        return Err(Error::domain("need n >= 1 and q >= 2"));
    }
    let w = bits + 32;
    let root = BigUint::from(q).sqrt();
    if &root * &root == BigUint::from(q) {
        return Ok(Enclosure::from_biguint(&(root + 1u32).pow(2 * n), bits));
    }
    let s = Enclosure::from_int(q, w).sqrt()?;
    Ok(Enclosure::one(w).add(&s).powi(2 * n).with_bits(bits))
}

/// Castelnuovo's bound `m (D - (m+1)(r-1)/2 - 1)` with `m = floor((D-1)/(r-1))`,
/// exactly and floored.
pub fn castelnuovo_bound(big_d: &BigUint, r: u32) -> Result<(BigRational, BigInt)> {
    if r < 2 {
        return Err(Error::domain("Castelnuovo's bound needs r >= 2"));
    }
    if big_d.is_zero() {
        return Err(Error::domain("curve degree must be positive"));
    }
    let dd = BigInt::from(big_d.clone());
    let r1 = BigInt::from(r - 1);
    let m = (&dd - BigInt::one()).div_floor(&r1);
    let inner = BigRational::from_integer(&dd - 1) - BigRational::new((&m + 1) * &r1, BigInt::from(2));
    let value = BigRational::from_integer(m) * inner;
    let floor = value.floor().to_integer();
    Ok((value, floor))
}

/// `(D(D+1), D^2 + D - 2)` with `D = deg_A d^{n-1}`.
pub fn simple_genus_bounds(deg_a: &BigUint, d: &BigUint, n: u32) -> Result<(BigUint, BigUint)> {
    if deg_a.is_zero() || d < &BigUint::from(2u32) || n < 2 {
        return Err(Error::domain("need deg >= 1, d >= 2, n >= 2"));
    }
    let big_d = deg_a * d.pow(n - 1);
    let stated = &big_d * (&big_d + 1u32);
    let sharper = &stated - 2u32;
    Ok((stated, sharper))
}

/// `D(D+1) - 2`, the arithmetic-genus bound for a connected reduced curve of degree `D`.
pub fn lemma53_bound(big_d: &BigUint) -> Result<BigUint> {
    if big_d.is_zero() {
        return Err(Error::domain("curve degree must be positive"));
    }
    Ok(big_d * (big_d + 1u32) - 2u32)
}

/// Certified truth of `g - sqrt(ln ln g / (6 ln q)) >= n`.
pub fn ehr_constraint(n: &BigUint, q: u64, g: &BigUint, bits: u32) -> Result<Verdict> {
    if g < &BigUint::from(3u32) {
        return Err(Error::domain("need g >= 3"));
    }
    if q < 2 {
        return Err(Error::domain("need q >= 2"));
    }
    let (v, _) = certify_adaptive(bits, MAX_BITS, |b| {
        let w = b + 32;
        let gg = Enclosure::from_biguint(g, w);
        let lnq = Enclosure::from_int(q, w).ln()?;
        let root = gg.ln()?.ln()?.div(&lnq.mul(&Enclosure::from_int(6, w)))?.sqrt()?;
        let lhs = gg.sub(&root);
        Ok(crate::rigor::certify_compare(&Enclosure::from_biguint(n, w), &lhs, Relation::Le))
    })?;
    Ok(v)
}

/// Prime power check returning the characteristic.
pub(crate) fn characteristic(q: u64) -> Result<u64> {
    prime_power(q)
        .map(|(p, _)| p as u64)
        .ok_or_else(|| Error::domain(format!("q = {q} is not a prime power")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigor::Dyadic;

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn l_fraction_values() {
        assert_eq!(l_fraction(&2.into(), 2, 1).unwrap(), ratio(3, 4));
        assert_eq!(l_fraction(&5.into(), 3, 0).unwrap(), BigRational::one());
        assert_eq!(l_fraction(&3.into(), 2, 2).unwrap(), ratio(16, 27));
        assert!(l_fraction(&3.into(), 2, 3).is_err());
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta_exponent(&2u32.into(), 2, 1, 2), BigInt::from(-1));
        // (d1+1) = (n+1) 2^{n+1} q^n exactly.
        let d1 = BigUint::from(3u32 * 8 * 9 - 1);
        assert_eq!(delta_exponent(&d1, 2, 2, 3), BigInt::from(6));
        assert_eq!(delta_exponent(&(d1 - 1u32), 2, 2, 3), BigInt::from(3));
    }

    #[test]
    fn bk_error_examples() {
        let e = bk_error_bound(2, 2, 2, 1, 2, 2, 2, &BigUint::one(), 64).unwrap();
        let oracle = 32.0 + 144.0 * 2f64.powf(-2.0 / 3.0);
        assert!(e.lo_f64() <= oracle + 1e-9 && e.hi_f64() >= oracle - 1e-9);
        let z = bk_error_bound(2, 2, 2, 1, 2, 2, 2, &BigUint::zero(), 64).unwrap();
        assert_eq!(z, Enclosure::zero(64));
    }

    #[test]
    fn constants() {
        let c = |k, r, q| constant(k, r, q, 64).unwrap().exact.unwrap();
        assert_eq!(c(ConstantKind::ThmB, 2, 3), BigUint::from(124416u32));
        assert_eq!(c(ConstantKind::ThmB, 2, 2), BigUint::from(15925248u32));
        assert_eq!(c(ConstantKind::ThmA, 2, 3), BigUint::from(65536u32));
        let a2 = constant(ConstantKind::ThmA, 2, 2, 64).unwrap();
        assert!(a2.exact.is_none());
        let x = 9.0 + (3.0 + 8f64.sqrt()).powi(2) + 7.0;
        assert!((a2.log2.mid_f64() - x).abs() < 1e-9);
    }

    #[test]
    fn genus_examples() {
        let cb = |d: u32, r| castelnuovo_bound(&d.into(), r).unwrap().1;
        assert_eq!(cb(3, 2), 1.into());
        assert_eq!(cb(4, 3), 1.into());
        assert_eq!(cb(5, 2), 6.into());
        for r in 2..=20 {
            for d in 1..=200u32 {
                assert!(!cb(d, r).is_negative());
            }
        }
        assert!(castelnuovo_bound(&3u32.into(), 1).is_err());
        let (s, h) = simple_genus_bounds(&18u32.into(), &2u32.into(), 2).unwrap();
        assert_eq!((s, h), (1332u32.into(), 1330u32.into()));
        let (s, h) = simple_genus_bounds(&1u32.into(), &2u32.into(), 2).unwrap();
        assert_eq!((s, h), (6u32.into(), 4u32.into()));
        let l = |d: u32| lemma53_bound(&d.into()).unwrap();
        assert_eq!((l(1), l(2), l(3)), (0u32.into(), 4u32.into(), 10u32.into()));
    }

    #[test]
    fn weil_bound_examples() {
        let a = weil_point_bound(1, 2, 64).unwrap();
        let x = 3.0 + 2.0 * 2f64.sqrt();
        assert!(a.lo_f64() <= x + 1e-12 && a.hi_f64() >= x - 1e-12);
        assert_eq!(a.floor_lo().unwrap(), 5.into());
        assert_eq!(weil_point_bound(1, 4, 64).unwrap(), Enclosure::from_int(9, 64));
        let b = weil_point_bound(2, 2, 64).unwrap();
        let x = 17.0 + 12.0 * 2f64.sqrt();
        assert!(b.lo_f64() <= x + 1e-9 && b.hi_f64() >= x - 1e-9);
        assert!(b.width().unwrap() < Dyadic::pow2(-40));
    }

    #[test]
    fn ehr_examples() {
        let v = |n: u32, q, g: u32| ehr_constraint(&n.into(), q, &g.into(), 64).unwrap();
        assert_eq!(v(1, 2, 3), Verdict::Holds);
        assert_eq!(v(3, 2, 3), Verdict::Fails);
        assert_eq!(v(1000, 2, 1001), Verdict::Holds);
        assert!(ehr_constraint(&1u32.into(), 2, &2u32.into(), 64).is_err());
    }
}
