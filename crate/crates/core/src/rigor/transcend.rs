//! Rigorous elementary functions on enclosures: square root, natural and
//! binary logarithm, exponentials and real powers.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;

use super::dyadic::{Dir, Dyadic};
use super::enclosure::{Enclosure, Ext};
use crate::error::{Error, Result};

const GUARD_BITS: u32 = 32;
/// Beyond this magnitude exp/exp2 arguments saturate to coarse bounds.
const EXP_ARG_LIMIT: i64 = 1 << 50;

thread_local! {
    static LN2_CACHE: RefCell<HashMap<u32, Enclosure>> = RefCell::new(HashMap::new());
}

/// ln 2 = 2 atanh(1/3), enclosed at `w` bits.
pub fn ln2(w: u32) -> Enclosure {
    if let Some(v) = LN2_CACHE.with(|c| c.borrow().get(&w).cloned()) {
        return v;
    }
    let third = Enclosure::from_ratio(1, 3, w);
    let v = atanh_series(&third, w).mul_pow2(1);
    LN2_CACHE.with(|c| c.borrow_mut().insert(w, v.clone()));
    v
}

fn abs_upper(z: &Enclosure) -> Dyadic {
    let lo = z.lo().finite().expect("finite").abs();
    let hi = z.hi().finite().expect("finite").abs();
    lo.max(hi)
}

/// Sum of `z^(2j+1)/(2j+1)` with an explicit tail bound; needs `|z| <= 1/2`.
fn atanh_series(z: &Enclosure, w: u32) -> Enclosure {
    let zmax = abs_upper(z);
    if zmax.is_zero() {
        return Enclosure::zero(w);
    }
    debug_assert!(zmax <= Dyadic::new(BigInt::from(1), -1));
    let rate = -zmax.to_f64().log2();
    let terms = ((w as f64 + 4.0) / (2.0 * rate)).ceil() as u64 + 1;
    let z = z.with_bits(w);
    let z2 = z.powi(2);
    let mut term = z.clone();
    let mut sum = z.clone();
    for j in 1..=terms {
        term = term.mul(&z2);
        let k = Enclosure::from_int(2 * j + 1, w);
        sum = sum.add(&term.div(&k).expect("nonzero"));
    }
    // Tail: |z|^(2N+3) / ((2N+3)(1 - z^2)).
    let n3 = 2 * terms + 3;
    let zm = Enclosure::point(zmax, w);
    let tail = zm
        .powi(n3 as u32)
        .div(
            &Enclosure::from_int(n3, w)
                .mul(&Enclosure::one(w).sub(&zm.powi(2))),
        )
        .expect("positive");
    let r = tail.hi().clone();
    let pad = Enclosure::from_ext(r.clone().neg_ext(), r, w).expect("symmetric");
    sum.add(&pad)
}

trait NegExt {
    fn neg_ext(self) -> Ext;
}

impl NegExt for Ext {
    fn neg_ext(self) -> Ext {
        match self {
            Ext::Fin(d) => Ext::Fin(d.neg()),
            Ext::PosInf => Ext::NegInf,
            Ext::NegInf => Ext::PosInf,
        }
    }
}

/// Split positive `x` as `m * 2^k` with `m` in `[sqrt(1/2), sqrt(2))`.
fn split_binary(x: &Dyadic) -> (Dyadic, i64) {
    let mut k = x.ilog2();
    let mut m = x.mul_pow2(-k);
    if m.to_f64() > std::f64::consts::SQRT_2 {
        k += 1;
        m = m.mul_pow2(-1);
    }
    (m, k)
}

/// ln of a mantissa near one.
fn ln_mantissa(m: &Dyadic, w: u32) -> Enclosure {
    if super::enclosure::is_one(m) {
        return Enclosure::zero(w);
    }
    let one = Dyadic::one();
    let num = Enclosure::point(m.sub(&one), w);
    let den = Enclosure::point(m.add(&one), w);
    let z = num.div(&den).expect("positive denominator");
    atanh_series(&z, w).mul_pow2(1)
}

fn ln_point(x: &Dyadic, w: u32) -> Enclosure {
    let (m, k) = split_binary(x);
    let lm = ln_mantissa(&m, w);
    if k == 0 {
        return lm;
    }
    let wk = w + 64 - (k.unsigned_abs().leading_zeros());
    ln2(wk).scale_int(&BigInt::from(k)).with_bits(w).add(&lm)
}

fn log2_point(x: &Dyadic, w: u32) -> Enclosure {
    let (m, k) = split_binary(x);
    let frac = if super::enclosure::is_one(&m) {
        Enclosure::zero(w)
    } else {
        ln_mantissa(&m, w).div(&ln2(w)).expect("ln2 > 0")
    };
    frac.add(&Enclosure::from_int(k, w))
}

fn ln1p_point(u: &Dyadic, w: u32) -> Enclosure {
    if u.is_zero() {
        return Enclosure::zero(w);
    }
    let uu = Enclosure::point(u.clone(), w);
    let z = uu
        .div(&Enclosure::from_int(2, w).add(&uu))
        .expect("u > -1");
    if abs_upper(&z) <= Dyadic::new(BigInt::from(1), -2) {
        atanh_series(&z, w).mul_pow2(1)
    } else {
        ln_point(&u.add(&Dyadic::one()), w)
    }
}

fn exp_small(y: &Enclosure, w: u32) -> Enclosure {
    let ymax = abs_upper(y);
    if ymax.is_zero() {
        return Enclosure::one(w);
    }
    // Choose N with ymax^(N+1)/(N+1)! below 2^-(w+4).
    let lg = ymax.to_f64().log2();
    let mut n = 1u64;
    let mut acc = lg; // log2(ymax^n / n!)
    while acc > -(w as f64 + 4.0) {
        n += 1;
        acc += lg - (n as f64).log2();
    }
    let mut term = Enclosure::one(w);
    let mut sum = Enclosure::one(w);
    for j in 1..n {
        term = term.mul(y).div(&Enclosure::from_int(j, w)).expect("nonzero");
        sum = sum.add(&term);
    }
    // Tail from j = n on: at most 2 * ymax^n / n! for ymax <= 1.
    let ym = Enclosure::point(ymax, w);
    let mut fact = Enclosure::one(w);
    for j in 2..=n {
        fact = fact.mul(&Enclosure::from_int(j, w));
    }
    let tail = ym.powi(n as u32).div(&fact).expect("positive").mul_pow2(1);
    let r = tail.hi().clone();
    sum.add(&Enclosure::from_ext(r.clone().neg_ext(), r, w).expect("symmetric"))
}

fn exp_point(x: &Dyadic, w: u32) -> Enclosure {
    if x.is_zero() {
        return Enclosure::one(w);
    }
    let big = Dyadic::from_int(EXP_ARG_LIMIT);
    if *x > big {
        // e^x >= 2^x.
        return Enclosure::from_ext(Ext::Fin(Dyadic::pow2(EXP_ARG_LIMIT)), Ext::PosInf, w).unwrap();
    }
    if *x < big.neg() {
        return Enclosure::new(Dyadic::zero(), Dyadic::pow2(-EXP_ARG_LIMIT), w).unwrap();
    }
    let k = (x.to_f64() / std::f64::consts::LN_2).round() as i64;
    let wk = w + 64 - k.unsigned_abs().leading_zeros();
    let y = Enclosure::point(x.clone(), wk).sub(&ln2(wk).scale_int(&BigInt::from(k)));
    exp_small(&y.with_bits(w), w).mul_pow2(k)
}

fn exp2_point(x: &Dyadic, w: u32) -> Enclosure {
    let big = Dyadic::from_int(EXP_ARG_LIMIT);
    if *x > big {
        return Enclosure::from_ext(Ext::Fin(Dyadic::pow2(EXP_ARG_LIMIT)), Ext::PosInf, w).unwrap();
    }
    if *x < big.neg() {
        return Enclosure::new(Dyadic::zero(), Dyadic::pow2(-EXP_ARG_LIMIT), w).unwrap();
    }
    let k_big = x.to_integer(Dir::Down);
    let k: i64 = i64::try_from(&k_big).expect("bounded above");
    let f = x.sub(&Dyadic::from_int(k));
    if f.is_zero() {
        return Enclosure::point(Dyadic::pow2(k), w);
    }
    let arg = Enclosure::point(f, w).mul(&ln2(w));
    exp_interval(&arg, w).mul_pow2(k)
}

fn exp_interval(e: &Enclosure, w: u32) -> Enclosure {
    let lo = match e.lo() {
        Ext::NegInf => Ext::Fin(Dyadic::zero()),
        Ext::Fin(d) => exp_point(d, w).lo().clone(),
        Ext::PosInf => unreachable!(),
    };
    let hi = match e.hi() {
        Ext::PosInf => Ext::PosInf,
        Ext::Fin(d) => exp_point(d, w).hi().clone(),
        Ext::NegInf => unreachable!(),
    };
    Enclosure::from_ext(lo, hi, w).expect("monotone")
}

/// Apply an increasing point function to both endpoints.
fn monotone<F>(e: &Enclosure, f: F, at_neg_inf: Ext, at_pos_inf: Ext) -> Enclosure
where
    F: Fn(&Dyadic, u32) -> Enclosure,
{
    let w = e.bits() + GUARD_BITS;
    let lo = match e.lo() {
        Ext::NegInf => at_neg_inf,
        Ext::Fin(d) => f(d, w).lo().clone(),
        Ext::PosInf => unreachable!(),
    };
    let hi = match e.hi() {
        Ext::PosInf => at_pos_inf,
        Ext::Fin(d) => f(d, w).hi().clone(),
        Ext::NegInf => unreachable!(),
    };
    Enclosure::from_ext(lo, hi, e.bits()).expect("monotone image")
}

impl Enclosure {
    pub fn sqrt(&self) -> Result<Enclosure> {
        if !self.is_nonnegative() {
            return Err(Error::domain("sqrt of an enclosure reaching below zero"));
        }
        let bits = self.bits();
        let lo = Ext::Fin(self.lo().finite().unwrap().sqrt_round(bits, Dir::Down));
        let hi = match self.hi() {
            Ext::Fin(d) => Ext::Fin(d.sqrt_round(bits, Dir::Up)),
            _ => Ext::PosInf,
        };
        Enclosure::from_ext(lo, hi, bits)
    }

    pub fn ln(&self) -> Result<Enclosure> {
        if !self.is_positive() {
            return Err(Error::domain("log of an enclosure not strictly positive"));
        }
        Ok(monotone(self, ln_point, Ext::NegInf, Ext::PosInf))
    }

    pub fn log2(&self) -> Result<Enclosure> {
        if !self.is_positive() {
            return Err(Error::domain("log2 of an enclosure not strictly positive"));
        }
        if let Some(p) = self.as_point() {
            if p.mantissa() == &BigInt::from(1) {
                return Ok(Enclosure::from_int(p.exponent(), self.bits()));
            }
        }
        Ok(monotone(self, log2_point, Ext::NegInf, Ext::PosInf))
    }

    /// `ln(1 + x)`, accurate for tiny `x`.
    pub fn ln1p(&self) -> Result<Enclosure> {
        let minus_one = Ext::Fin(Dyadic::from_int(-1));
        if self.lo() <= &minus_one {
            return Err(Error::domain("ln1p argument reaching -1"));
        }
        Ok(monotone(self, ln1p_point, Ext::NegInf, Ext::PosInf))
    }

    pub fn exp(&self) -> Enclosure {
        monotone(self, exp_point, Ext::Fin(Dyadic::zero()), Ext::PosInf)
    }

    pub fn exp2(&self) -> Enclosure {
        monotone(self, exp2_point, Ext::Fin(Dyadic::zero()), Ext::PosInf)
    }

    /// `self^(num/den)`; computed as `exp2((num/den) log2 self)` unless exact.
    pub fn pow_rational(&self, num: i64, den: u64) -> Result<Enclosure> {
        if den == 0 {
            return Err(Error::domain("zero denominator in exponent"));
        }
        let g = num_integer::gcd(num.unsigned_abs(), den);
        let (num, den) = (num / g as i64, den / g);
        let bits = self.bits();
        if den == 1 {
            let p = self.powi(num.unsigned_abs() as u32);
            return if num >= 0 { Ok(p) } else { p.recip() };
        }
        if den == 2 && self.is_nonnegative() {
            let s = self.sqrt()?;
            let p = s.powi(num.unsigned_abs() as u32);
            return if num >= 0 { Ok(p) } else { p.recip() };
        }
        if !self.is_positive() {
            if self.is_nonnegative() && num > 0 {
                // Includes zero: x^a is increasing from 0.
                let hi = self.hi().clone();
                let top = Enclosure::from_ext(hi.clone(), hi, bits)?;
                let up = top.pow_rational(num, den)?;
                return Enclosure::from_ext(Ext::Fin(Dyadic::zero()), up.hi().clone(), bits);
            }
            return Err(Error::domain("fractional power of a non-positive enclosure"));
        }
        let w = bits + GUARD_BITS;
        let l = self.with_bits(w).log2()?;
        let y = l.mul(&Enclosure::from_ratio(num, den as i64, w));
        Ok(y.exp2().with_bits(bits))
    }

    /// `self^y` for positive `self`.
    pub fn pow(&self, y: &Enclosure) -> Result<Enclosure> {
        if let Some(p) = y.as_point() {
            if p.is_integer() && p.bits() < 32 {
                let n = i64::try_from(&p.to_integer(Dir::Down)).unwrap();
                return self.pow_rational(n, 1);
            }
        }
        if !self.is_positive() {
            return Err(Error::domain("real power of a non-positive enclosure"));
        }
        let bits = self.bits().max(y.bits());
        let w = bits + GUARD_BITS;
        let l = self.with_bits(w).log2()?;
        Ok(l.mul(&y.with_bits(w)).exp2().with_bits(bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sqrt_two_is_tight() {
        let s = Enclosure::from_int(2, 64).sqrt().unwrap();
        let w = s.width().unwrap();
        assert!(w <= Dyadic::pow2(-50));
        assert!(s.lo_f64() <= std::f64::consts::SQRT_2 && std::f64::consts::SQRT_2 <= s.hi_f64());
    }

    #[test]
    fn log2_of_one_is_exact_zero() {
        assert_eq!(Enclosure::one(64).log2().unwrap(), Enclosure::zero(64));
    }

    #[test]
    fn two_to_five_halves() {
        // 2^(5/2) = 4 sqrt 2; compare against a 200-bit evaluation of sqrt(32).
        let p = Enclosure::from_int(2, 64).pow_rational(5, 2).unwrap();
        let oracle = Enclosure::from_int(32, 200).sqrt().unwrap();
        assert!(p.encloses(&oracle));
        let q = Enclosure::from_int(2, 64).pow_rational(5, 3).unwrap();
        // 2^(5/3) cubed is 32.
        let cube = q.powi(3);
        assert!(cube.contains_rational(&rat(32, 1)));
        assert!(cube.width().unwrap() < Dyadic::pow2(-40));
    }

    #[test]
    fn ln_and_exp_agree() {
        for bits in [64, 128, 512] {
            let x = Enclosure::from_ratio(7, 5, bits);
            let y = x.ln().unwrap().exp();
            assert!(y.contains_rational(&rat(7, 5)), "bits {bits}: {y:?}");
            let l = Enclosure::from_int(10, bits).log2().unwrap();
            assert!(l.lo_f64() <= 3.321928094887362 && l.hi_f64() >= 3.3219280948873622);
        }
    }

    #[test]
    fn e_is_enclosed() {
        let e = Enclosure::one(128).exp();
        assert!(e.lo_f64() <= std::f64::consts::E && std::f64::consts::E <= e.hi_f64());
        assert!(e.width().unwrap() < Dyadic::pow2(-120));
    }

    #[test]
    fn ln1p_tiny_argument_keeps_relative_accuracy() {
        let tiny = Enclosure::point(Dyadic::pow2(-300), 64);
        let l = tiny.ln1p().unwrap();
        // ln(1+u) is in [u - u^2/2, u].
        assert!(l.hi_f64() > 0.0);
        let rel = (l.hi_f64() - l.lo_f64()) / l.hi_f64();
        assert!(rel < 1e-15);
    }

    #[test]
    fn exp2_of_huge_negative_saturates_soundly() {
        let x = Enclosure::from_int(-(1i64 << 55), 64);
        let y = x.exp2();
        assert!(y.is_nonnegative());
        assert!(y.hi() <= &Ext::Fin(Dyadic::pow2(-(1 << 50))));
    }

    #[test]
    fn domain_errors() {
        assert!(Enclosure::from_int(-1, 64).sqrt().is_err());
        assert!(Enclosure::zero(64).log2().is_err());
        assert!(Enclosure::from_int(-1, 64).pow_rational(1, 3).is_err());
    }
}
