//! Values stored as `sign * 2^log2`, for quantities whose magnitude
//! overflows any reasonable dyadic exponent.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use super::dyadic::Dyadic;
use super::enclosure::{certify_compare, Enclosure, Ext, Relation, Verdict};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

#[derive(Clone, PartialEq, Eq)]
pub struct LogScaled {
    sign: Sign,
    log2: Enclosure,
}

impl fmt::Debug for LogScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => write!(f, "0"),
            Sign::Pos => write!(f, "2^{:?}", self.log2),
            Sign::Neg => write!(f, "-2^{:?}", self.log2),
        }
    }
}

impl fmt::Display for LogScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => write!(f, "0"),
            Sign::Pos => write!(f, "2^{}", self.log2),
            Sign::Neg => write!(f, "-2^{}", self.log2),
        }
    }
}

impl LogScaled {
    /// Positive value `2^log2`.
    pub fn positive(log2: Enclosure) -> Self {
        LogScaled { sign: Sign::Pos, log2 }
    }

    pub fn zero(bits: u32) -> Self {
        LogScaled { sign: Sign::Zero, log2: Enclosure::zero(bits) }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn log2(&self) -> &Enclosure {
        &self.log2
    }

    pub fn bits(&self) -> u32 {
        self.log2.bits()
    }

    pub fn from_enclosure(e: &Enclosure) -> Result<Self> {
        if e.is_positive() {
            Ok(LogScaled::positive(e.log2()?))
        } else if e.is_point() && e.contains_zero() {
            Ok(LogScaled::zero(e.bits()))
        } else if e.neg().is_positive() {
            Ok(LogScaled { sign: Sign::Neg, log2: e.neg().log2()? })
        } else {
            Err(Error::domain("cannot take log scale of an enclosure straddling zero"))
        }
    }

    pub fn from_biguint(n: &BigUint, bits: u32) -> Self {
        if n.is_zero() {
            return LogScaled::zero(bits);
        }
        let e = Enclosure::point(Dyadic::from_biguint(n), bits);
        LogScaled::positive(e.log2().expect("positive integer"))
    }

    pub fn from_u64(n: u64, bits: u32) -> Self {
        LogScaled::from_biguint(&BigUint::from(n), bits)
    }

    /// `2^x` for an enclosure `x`.
    pub fn exp2_of(x: Enclosure) -> Self {
        LogScaled::positive(x)
    }

    pub fn mul(&self, other: &LogScaled) -> LogScaled {
        let sign = match (self.sign, other.sign) {
            (Sign::Zero, _) | (_, Sign::Zero) => return LogScaled::zero(self.bits().max(other.bits())),
            (a, b) if a == b => Sign::Pos,
            _ => Sign::Neg,
        };
        LogScaled { sign, log2: self.log2.add(&other.log2) }
    }

    pub fn div(&self, other: &LogScaled) -> Result<LogScaled> {
        if other.sign == Sign::Zero {
            return Err(Error::domain("division by zero"));
        }
        let sign = match (self.sign, other.sign) {
            (Sign::Zero, _) => return Ok(self.clone()),
            (a, b) if a == b => Sign::Pos,
            _ => Sign::Neg,
        };
        Ok(LogScaled { sign, log2: self.log2.sub(&other.log2) })
    }

    /// `self^y` for positive `self`.
    pub fn pow(&self, y: &Enclosure) -> Result<LogScaled> {
        match self.sign {
            Sign::Pos => Ok(LogScaled::positive(self.log2.mul(y))),
            _ => Err(Error::domain("log-scaled power needs a positive base")),
        }
    }

    /// Sum of two nonnegative values.
    pub fn add(&self, other: &LogScaled) -> Result<LogScaled> {
        match (self.sign, other.sign) {
            (Sign::Zero, _) => Ok(other.clone()),
            (_, Sign::Zero) => Ok(self.clone()),
            (Sign::Pos, Sign::Pos) => Ok(LogScaled::positive(log2_sum(&self.log2, &other.log2))),
            _ => Err(Error::domain("log-scaled addition supports nonnegative terms only")),
        }
    }

    /// Back to a plain enclosure; may saturate for astronomically large values.
    pub fn to_enclosure(&self) -> Enclosure {
        match self.sign {
            Sign::Zero => Enclosure::zero(self.bits()),
            Sign::Pos => self.log2.exp2(),
            Sign::Neg => self.log2.exp2().neg(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let sign = match self.sign {
            Sign::Neg => "-",
            Sign::Zero => "0",
            Sign::Pos => "+",
        };
        serde_json::json!({ "sign": sign, "log2": self.log2.to_json() })
    }
}

fn lse_point(x: &Ext, y: &Ext, bits: u32) -> Enclosure {
    let w = bits + 16;
    match (x, y) {
        // Only the upper endpoint of this case is ever used.
        (Ext::PosInf, _) | (_, Ext::PosInf) => Enclosure::entire(bits),
        (Ext::NegInf, other) | (other, Ext::NegInf) => {
            Enclosure::from_ext(other.clone(), other.clone(), bits).expect("finite")
        }
        (Ext::Fin(a), Ext::Fin(b)) => {
            let (big, small) = if a >= b { (a, b) } else { (b, a) };
            let gap = Enclosure::point(small.sub(big), w);
            let frac = gap.exp2();
            let corr = frac
                .ln1p()
                .expect("nonnegative")
                .div(&super::transcend::ln2(w))
                .expect("ln2 > 0");
            Enclosure::point(big.clone(), w).add(&corr).with_bits(bits)
        }
    }
}

/// `log2(2^a + 2^b)` for enclosures `a`, `b`; increasing in both.
pub fn log2_sum(a: &Enclosure, b: &Enclosure) -> Enclosure {
    let bits = a.bits().max(b.bits());
    let lo = lse_point(a.lo(), b.lo(), bits);
    let hi = lse_point(a.hi(), b.hi(), bits);
    Enclosure::from_ext(lo.lo().clone(), hi.hi().clone(), bits).expect("monotone")
}

/// Certified comparison of two log-scaled values.
pub fn certify_compare_log(a: &LogScaled, b: &LogScaled, rel: Relation) -> Verdict {
    use Sign::*;
    let strict = rel == Relation::Lt;
    match (a.sign, b.sign) {
        (Pos, Pos) => certify_compare(&a.log2, &b.log2, rel),
        (Neg, Neg) => certify_compare(&b.log2, &a.log2, rel),
        (Zero, Zero) => {
            if strict {
                Verdict::Fails
            } else {
                Verdict::Holds
            }
        }
        (Neg, _) | (Zero, Pos) => Verdict::Holds,
        (Pos, _) | (Zero, Neg) => Verdict::Fails,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_of_equal_powers() {
        let a = Enclosure::from_int(10, 64);
        let s = log2_sum(&a, &a);
        assert!(s.contains_dyadic(&Dyadic::from_int(11)));
        assert!(s.width().unwrap() < Dyadic::pow2(-50));
    }

    #[test]
    fn sum_with_vanishing_term() {
        let a = Enclosure::from_int(1i64 << 52, 64);
        let b = Enclosure::from_int(0, 64);
        let s = log2_sum(&a, &b);
        assert!(s.contains_dyadic(&Dyadic::from_int(1i64 << 52)));
    }

    #[test]
    fn compare_huge_values() {
        let a = LogScaled::positive(Enclosure::from_int(1_000_000, 64));
        let b = LogScaled::positive(Enclosure::from_int(1_000_001, 64));
        assert_eq!(certify_compare_log(&a, &b, Relation::Lt), Verdict::Holds);
        assert_eq!(certify_compare_log(&b, &a, Relation::Le), Verdict::Fails);
        let z = LogScaled::zero(64);
        assert_eq!(certify_compare_log(&z, &a, Relation::Lt), Verdict::Holds);
    }

    #[test]
    fn round_trip_small_value() {
        let x = LogScaled::from_u64(12, 64);
        let e = x.to_enclosure();
        assert!(e.contains_dyadic(&Dyadic::from_int(12)));
        let y = x.mul(&LogScaled::from_u64(3, 64)).to_enclosure();
        assert!(y.contains_dyadic(&Dyadic::from_int(36)));
    }
}
