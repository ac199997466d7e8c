//! Outward-rounded real intervals with configurable working precision.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::dyadic::{parse_decimal, Dir, Dyadic};
use crate::error::{Error, Result};

/// Default working precision in bits.
pub const DEFAULT_BITS: u32 = 64;
/// Largest precision the certification loops escalate to.
pub const MAX_BITS: u32 = 4096;

/// An extended-real endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ext {
    NegInf,
    Fin(Dyadic),
    PosInf,
}

impl Ext {
    fn rank(&self) -> i32 {
        match self {
            Ext::NegInf => -1,
            Ext::Fin(_) => 0,
            Ext::PosInf => 1,
        }
    }

    pub fn finite(&self) -> Option<&Dyadic> {
        match self {
            Ext::Fin(d) => Some(d),
            _ => None,
        }
    }

    fn signum(&self) -> i32 {
        match self {
            Ext::NegInf => -1,
            Ext::PosInf => 1,
            Ext::Fin(d) => d.signum(),
        }
    }

    pub fn neg(&self) -> Ext {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::PosInf => Ext::NegInf,
            Ext::Fin(d) => Ext::Fin(d.neg()),
        }
    }

    /// Exact product with the interval convention `0 * inf = 0`.
    fn mul(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a.mul(b)),
            _ => match self.signum() * other.signum() {
                0 => Ext::Fin(Dyadic::zero()),
                1 => Ext::PosInf,
                _ => Ext::NegInf,
            },
        }
    }

    fn round(self, prec: u32, dir: Dir) -> Ext {
        match self {
            Ext::Fin(d) => Ext::Fin(d.round(prec, dir)),
            other => other,
        }
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

/// A closed interval `[lo, hi]` that is guaranteed to contain the exact
/// value it stands for. Every operation rounds outward to `bits` bits.
#[derive(Clone, PartialEq, Eq)]
pub struct Enclosure {
    lo: Ext,
    hi: Ext,
    bits: u32,
}

impl fmt::Debug for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]@{}", self.lo_string(17), self.hi_string(17), self.bits)
    }
}

impl fmt::Display for Enclosure {
    /// Human-readable form with 12 significant digits per endpoint.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo_string(12), self.hi_string(12))
    }
}

/// Result of a certified comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// Relation tested by [`certify_compare`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
}

impl Enclosure {
    fn raw(lo: Ext, hi: Ext, bits: u32) -> Self {
        debug_assert!(lo <= hi, "inverted enclosure");
        Enclosure { lo, hi, bits }
    }

    /// Interval from dyadic endpoints, rounded outward to `bits`.
    pub fn new(lo: Dyadic, hi: Dyadic, bits: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain("enclosure with lo > hi"));
        }
        Ok(Self::raw(
            Ext::Fin(lo.round(bits, Dir::Down)),
            Ext::Fin(hi.round(bits, Dir::Up)),
            bits,
        ))
    }

    pub fn from_ext(lo: Ext, hi: Ext, bits: u32) -> Result<Self> {
        if lo > hi || lo == Ext::PosInf || hi == Ext::NegInf {
            return Err(Error::domain("invalid extended enclosure"));
        }
        Ok(Self::raw(lo.round(bits, Dir::Down), hi.round(bits, Dir::Up), bits))
    }

    /// Exact point enclosure; no rounding is applied.
    pub fn point(d: Dyadic, bits: u32) -> Self {
        Self::raw(Ext::Fin(d.clone()), Ext::Fin(d), bits)
    }

    pub fn from_int(v: impl Into<BigInt>, bits: u32) -> Self {
        Self::point(Dyadic::from_int(v), bits)
    }

    pub fn from_biguint(v: &BigUint, bits: u32) -> Self {
        Self::point(Dyadic::from_biguint(v), bits)
    }

    pub fn zero(bits: u32) -> Self {
        Self::from_int(0, bits)
    }

    pub fn one(bits: u32) -> Self {
        Self::from_int(1, bits)
    }

    pub fn entire(bits: u32) -> Self {
        Self::raw(Ext::NegInf, Ext::PosInf, bits)
    }

    pub fn from_rational(r: &BigRational, bits: u32) -> Self {
        Self::raw(
            Ext::Fin(Dyadic::from_rational(r, bits, Dir::Down)),
            Ext::Fin(Dyadic::from_rational(r, bits, Dir::Up)),
            bits,
        )
    }

    pub fn from_ratio(num: i64, den: i64, bits: u32) -> Self {
        Self::from_rational(&BigRational::new(num.into(), den.into()), bits)
    }

    /// Parse a decimal or `a/b` literal into an outward enclosure.
    pub fn parse(s: &str, bits: u32) -> Result<Self> {
        let r = parse_decimal(s).ok_or_else(|| Error::parse(format!("bad real literal '{s}'")))?;
        Ok(Self::from_rational(&r, bits))
    }

    pub fn lo(&self) -> &Ext {
        &self.lo
    }

    pub fn hi(&self) -> &Ext {
        &self.hi
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Same endpoints, different working precision for later operations.
    pub fn with_bits(&self, bits: u32) -> Self {
        Self::raw(
            self.lo.clone().round(bits, Dir::Down),
            self.hi.clone().round(bits, Dir::Up),
            bits,
        )
    }

    pub fn is_point(&self) -> bool {
        matches!((&self.lo, &self.hi), (Ext::Fin(a), Ext::Fin(b)) if a == b)
    }

    pub fn is_finite(&self) -> bool {
        matches!((&self.lo, &self.hi), (Ext::Fin(_), Ext::Fin(_)))
    }

    /// `hi - lo` rounded up; `None` when unbounded.
    pub fn width(&self) -> Option<Dyadic> {
        match (&self.lo, &self.hi) {
            (Ext::Fin(a), Ext::Fin(b)) => Some(b.sub(a)),
            _ => None,
        }
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        let above_lo = match &self.lo {
            Ext::NegInf => true,
            Ext::Fin(d) => d.to_rational() <= *r,
            Ext::PosInf => false,
        };
        let below_hi = match &self.hi {
            Ext::PosInf => true,
            Ext::Fin(d) => *r <= d.to_rational(),
            Ext::NegInf => false,
        };
        above_lo && below_hi
    }

    pub fn contains_dyadic(&self, x: &Dyadic) -> bool {
        let x = Ext::Fin(x.clone());
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains_dyadic(&Dyadic::zero())
    }

    /// True when `other` lies inside `self`.
    pub fn encloses(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Smallest enclosure containing both.
    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Self::raw(
            self.lo.clone().min(other.lo.clone()),
            self.hi.clone().max(other.hi.clone()),
            self.bits.max(other.bits),
        )
    }

    pub fn intersect(&self, other: &Enclosure) -> Option<Enclosure> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo <= hi).then(|| Self::raw(lo, hi, self.bits.max(other.bits)))
    }

    pub fn is_positive(&self) -> bool {
        self.lo > Ext::Fin(Dyadic::zero())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.lo >= Ext::Fin(Dyadic::zero())
    }

    fn prec_with(&self, other: &Enclosure) -> u32 {
        self.bits.max(other.bits)
    }

    pub fn neg(&self) -> Enclosure {
        Self::raw(self.hi.neg(), self.lo.neg(), self.bits)
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        let bits = self.prec_with(other);
        let lo = match (&self.lo, &other.lo) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a.add_round(b, bits, Dir::Down)),
            _ => Ext::NegInf,
        };
        let hi = match (&self.hi, &other.hi) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a.add_round(b, bits, Dir::Up)),
            _ => Ext::PosInf,
        };
        Self::raw(lo, hi, bits)
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        let bits = self.prec_with(other);
        let products = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = products.iter().min().cloned().unwrap();
        let hi = products.iter().max().cloned().unwrap();
        Self::raw(lo.round(bits, Dir::Down), hi.round(bits, Dir::Up), bits)
    }

    pub fn recip(&self) -> Result<Enclosure> {
        if self.contains_zero() {
            return Err(Error::domain("division by an enclosure containing zero"));
        }
        let bits = self.bits;
        let inv = |e: &Ext, dir: Dir| -> Ext {
            match e {
                Ext::Fin(d) => Ext::Fin(Dyadic::div_round(&Dyadic::one(), d, bits, dir)),
                _ => Ext::Fin(Dyadic::zero()),
            }
        };
        // 1/x is decreasing on each sign branch.
        Ok(Self::raw(inv(&self.hi, Dir::Down), inv(&self.lo, Dir::Up), bits))
    }

    pub fn div(&self, other: &Enclosure) -> Result<Enclosure> {
        if other.contains_zero() {
            return Err(Error::domain("division by an enclosure containing zero"));
        }
        // Point quotients are rounded once instead of via the reciprocal.
        if let (Some(a), Some(b)) = (self.as_point(), other.as_point()) {
            let bits = self.prec_with(other);
            return Ok(Self::raw(
                Ext::Fin(Dyadic::div_round(a, b, bits, Dir::Down)),
                Ext::Fin(Dyadic::div_round(a, b, bits, Dir::Up)),
                bits,
            ));
        }
        let bits = self.prec_with(other);
        Ok(self.with_bits(bits).mul(&other.with_bits(bits).recip()?))
    }

    pub fn as_point(&self) -> Option<&Dyadic> {
        match (&self.lo, &self.hi) {
            (Ext::Fin(a), Ext::Fin(b)) if a == b => Some(a),
            _ => None,
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Enclosure {
        let sh = |e: &Ext| match e {
            Ext::Fin(d) => Ext::Fin(d.mul_pow2(k)),
            other => other.clone(),
        };
        Self::raw(sh(&self.lo), sh(&self.hi), self.bits)
    }

    pub fn scale_int(&self, n: &BigInt) -> Enclosure {
        self.mul(&Enclosure::from_int(n.clone(), self.bits))
    }

    /// Integer power.
    pub fn powi(&self, n: u32) -> Enclosure {
        if n == 0 {
            return Enclosure::one(self.bits);
        }
        if n % 2 == 0 && self.hi <= Ext::Fin(Dyadic::zero()) {
            return self.neg().powi(n);
        }
        if n % 2 == 0 && self.lo < Ext::Fin(Dyadic::zero()) {
            let top = self.abs().hi;
            let p = Self::raw(top.clone(), top, self.bits).powi(n);
            return Self::raw(Ext::Fin(Dyadic::zero()), p.hi, self.bits);
        }
        // Monotone on the remaining cases: square-and-multiply per endpoint.
        let pw = |e: &Ext, dir: Dir| -> Ext {
            match e {
                Ext::Fin(d) => Ext::Fin(pow_round(d, n, self.bits, dir)),
                Ext::PosInf => Ext::PosInf,
                Ext::NegInf => Ext::NegInf,
            }
        };
        Self::raw(pw(&self.lo, Dir::Down), pw(&self.hi, Dir::Up), self.bits)
    }

    pub fn abs(&self) -> Enclosure {
        if self.is_nonnegative() {
            self.clone()
        } else if self.hi <= Ext::Fin(Dyadic::zero()) {
            self.neg()
        } else {
            let hi = self.hi.clone().max(self.lo.neg());
            Self::raw(Ext::Fin(Dyadic::zero()), hi, self.bits)
        }
    }

    pub fn max(&self, other: &Enclosure) -> Enclosure {
        Self::raw(
            self.lo.clone().max(other.lo.clone()),
            self.hi.clone().max(other.hi.clone()),
            self.prec_with(other),
        )
    }

    /// Lower endpoint as `f64`, rounded toward `-inf` loosely (display only).
    pub fn lo_f64(&self) -> f64 {
        match &self.lo {
            Ext::NegInf => f64::NEG_INFINITY,
            Ext::PosInf => f64::INFINITY,
            Ext::Fin(d) => d.to_f64(),
        }
    }

    pub fn hi_f64(&self) -> f64 {
        match &self.hi {
            Ext::NegInf => f64::NEG_INFINITY,
            Ext::PosInf => f64::INFINITY,
            Ext::Fin(d) => d.to_f64(),
        }
    }

    pub fn mid_f64(&self) -> f64 {
        0.5 * (self.lo_f64() + self.hi_f64())
    }

    pub fn lo_string(&self, digits: u32) -> String {
        ext_string(&self.lo, digits, Dir::Down)
    }

    pub fn hi_string(&self, digits: u32) -> String {
        ext_string(&self.hi, digits, Dir::Up)
    }

    /// Number of decimal digits used when serializing at this precision.
    pub fn serial_digits(&self) -> u32 {
        ((self.bits as f64 * std::f64::consts::LOG10_2).ceil() as u32 + 2).min(80)
    }

    /// Floor of the lower endpoint.
    pub fn floor_lo(&self) -> Option<BigInt> {
        self.lo.finite().map(|d| d.to_integer(Dir::Down))
    }

    /// Ceiling of the upper endpoint.
    pub fn ceil_hi(&self) -> Option<BigInt> {
        self.hi.finite().map(|d| d.to_integer(Dir::Up))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let digits = self.serial_digits();
        serde_json::json!({
            "lo": self.lo_string(digits),
            "hi": self.hi_string(digits),
            "bits": self.bits,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Enclosure> {
        let bits = v["bits"]
            .as_u64()
            .ok_or_else(|| Error::parse("enclosure json lacks bits"))? as u32;
        let end = |key: &str, dir: Dir| -> Result<Ext> {
            let s = v[key]
                .as_str()
                .ok_or_else(|| Error::parse(format!("enclosure json lacks {key}")))?;
            match s {
                "-inf" => Ok(Ext::NegInf),
                "inf" | "+inf" => Ok(Ext::PosInf),
                _ => {
                    let r = parse_decimal(s).ok_or_else(|| Error::parse(format!("bad decimal '{s}'")))?;
                    Ok(Ext::Fin(Dyadic::from_rational(&r, bits.max(64) + 16, dir)))
                }
            }
        };
        Enclosure::from_ext(end("lo", Dir::Down)?, end("hi", Dir::Up)?, bits)
    }
}

fn ext_string(e: &Ext, digits: u32, dir: Dir) -> String {
    match e {
        Ext::NegInf => "-inf".into(),
        Ext::PosInf => "inf".into(),
        Ext::Fin(d) => d.to_decimal(digits, dir),
    }
}

fn pow_round(base: &Dyadic, n: u32, bits: u32, dir: Dir) -> Dyadic {
    // Exact when small; otherwise keep a generous intermediate precision and
    // round every step in the direction that preserves the final bound.
    let exact_bits = base.bits().saturating_mul(n as u64);
    if exact_bits <= 4 * bits as u64 + 64 {
        return base.powi(n).round(bits, dir);
    }
    let work = bits + 32;
    // For a negative base with odd n the magnitude must be rounded the other way.
    let mag_dir = if base.signum() < 0 { dir.flip() } else { dir };
    let mut acc = Dyadic::one();
    let mut b = base.abs();
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.mul(&b).round(work, mag_dir);
        }
        k >>= 1;
        if k > 0 {
            b = b.mul(&b).round(work, mag_dir);
        }
    }
    let acc = if base.signum() < 0 && n % 2 == 1 { acc.neg() } else { acc };
    acc.round(bits, dir)
}

/// Certified comparison of two enclosures.
pub fn certify_compare(a: &Enclosure, b: &Enclosure, rel: Relation) -> Verdict {
    match rel {
        Relation::Lt => {
            if a.hi < b.lo {
                Verdict::Holds
            } else if a.lo >= b.hi {
                Verdict::Fails
            } else {
                Verdict::Inconclusive
            }
        }
        Relation::Le => {
            if a.hi <= b.lo {
                Verdict::Holds
            } else if a.lo > b.hi {
                Verdict::Fails
            } else {
                Verdict::Inconclusive
            }
        }
    }
}

/// Convert an exact nonnegative integer to `f64` for display.
pub fn big_to_f64(n: &BigInt) -> f64 {
    n.to_f64().unwrap_or(if n.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

pub(crate) fn is_one(d: &Dyadic) -> bool {
    d.mantissa().is_one() && d.exponent() == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: i64, hi: i64) -> Enclosure {
        Enclosure::new(Dyadic::from_int(lo), Dyadic::from_int(hi), 64).unwrap()
    }

    #[test]
    fn exact_integer_sum() {
        assert_eq!(iv(1, 1).add(&iv(2, 2)), iv(3, 3));
    }

    #[test]
    fn product_with_sign_change() {
        assert_eq!(iv(0, 1).mul(&iv(-1, 1)), iv(-1, 1));
    }

    #[test]
    fn division_by_zero_interval_is_domain_error() {
        assert!(matches!(iv(1, 2).div(&iv(-1, 1)), Err(Error::Domain(_))));
    }

    #[test]
    fn comparisons() {
        assert_eq!(certify_compare(&iv(1, 2), &iv(3, 4), Relation::Lt), Verdict::Holds);
        assert_eq!(certify_compare(&iv(3, 4), &iv(1, 2), Relation::Lt), Verdict::Fails);
        assert_eq!(certify_compare(&iv(1, 3), &iv(2, 4), Relation::Lt), Verdict::Inconclusive);
        assert_eq!(certify_compare(&iv(1, 1), &iv(1, 1), Relation::Le), Verdict::Holds);
        assert_eq!(certify_compare(&iv(1, 1), &iv(1, 1), Relation::Lt), Verdict::Fails);
    }

    #[test]
    fn infinite_endpoints() {
        let e = Enclosure::from_ext(Ext::Fin(Dyadic::one()), Ext::PosInf, 64).unwrap();
        let s = e.add(&iv(1, 1));
        assert_eq!(s.hi(), &Ext::PosInf);
        let r = e.recip().unwrap();
        assert_eq!(r.lo(), &Ext::Fin(Dyadic::zero()));
        assert_eq!(r.hi(), &Ext::Fin(Dyadic::one()));
    }

    #[test]
    fn json_round_trip_contains_value() {
        let third = Enclosure::from_ratio(1, 3, 64);
        let back = Enclosure::from_json(&third.to_json()).unwrap();
        assert!(back.encloses(&third));
        let r = BigRational::new(1.into(), 3.into());
        assert!(back.contains_rational(&r));
    }

    #[test]
    fn table_format_uses_twelve_digits() {
        let third = Enclosure::from_ratio(1, 3, 64);
        assert_eq!(third.to_string(), "[3.33333333333e-1, 3.33333333334e-1]");
    }

    #[test]
    fn even_power_of_straddling_interval() {
        let p = iv(-2, 1).powi(2);
        assert_eq!(p, iv(0, 4));
    }
}
