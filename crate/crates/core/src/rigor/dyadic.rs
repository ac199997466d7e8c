//! Exact binary floating-point numbers `mantissa * 2^exponent` with
//! explicitly directed rounding.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for a single operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Down,
    Up,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Down => Dir::Up,
            Dir::Up => Dir::Down,
        }
    }
}

/// A dyadic rational. Normalized: the mantissa is odd, or zero with exponent 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.man, self.exp)
    }
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { man, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.man.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.man >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn zero() -> Self {
        Dyadic { man: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { man: BigInt::one(), exp: 0 }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic::new(v.into(), 0)
    }

    pub fn pow2(k: i64) -> Self {
        Dyadic { man: BigInt::one(), exp: k }
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exp_field = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp_field == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_field - 1075)
        };
        Some(Dyadic::new(BigInt::from(m) * sign, e))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// `floor(log2 |x|)` for nonzero `x`.
    pub fn ilog2(&self) -> i64 {
        debug_assert!(!self.is_zero());
        self.man.bits() as i64 - 1 + self.exp
    }

    pub fn neg(&self) -> Self {
        Dyadic { man: -&self.man, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        Dyadic { man: self.man.abs(), exp: self.exp }
    }

    pub fn add(&self, other: &Dyadic) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as usize;
        let b = &other.man << (other.exp - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Self {
        Dyadic::new(&self.man * &other.man, self.exp + other.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { man: self.man.clone(), exp: self.exp + k }
    }

    pub fn is_integer(&self) -> bool {
        self.exp >= 0
    }

    /// Round to at most `prec` significant bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Dir) -> Self {
        let prec = prec.max(2) as u64;
        let nbits = self.man.bits();
        if nbits <= prec {
            return self.clone();
        }
        let shift = nbits - prec;
        let mag = self.man.magnitude();
        let truncated = mag >> shift as usize;
        let exact = (&truncated << shift as usize) == *mag;
        let negative = self.man.is_negative();
        // Truncation moves toward zero; bump the magnitude when that is the wrong way.
        let bump = !exact && (negative == (dir == Dir::Down));
        let mag = if bump { truncated + 1u32 } else { truncated };
        let man = if negative { -BigInt::from(mag) } else { BigInt::from(mag) };
        Dyadic::new(man, self.exp + shift as i64)
    }

    /// `self + other` rounded to `prec` bits, without materialising huge
    /// exponent gaps.
    pub fn add_round(&self, other: &Dyadic, prec: u32, dir: Dir) -> Self {
        if self.is_zero() || other.is_zero() {
            return self.add(other).round(prec, dir);
        }
        let (big, small) = if self.ilog2() >= other.ilog2() { (self, other) } else { (other, self) };
        let t = big.exp.min(big.ilog2() - prec.max(2) as i64 - 2) - 1;
        if small.ilog2() < t {
            // A sticky bit strictly below every grid point near `big`.
            let sticky = Dyadic { man: BigInt::from(small.signum()), exp: t - 1 };
            return big.add(&sticky).round(prec, dir);
        }
        big.add(small).round(prec, dir)
    }

    /// `floor` (Down) or `ceil` (Up) to an integer.
    pub fn to_integer(&self, dir: Dir) -> BigInt {
        if self.exp >= 0 {
            return &self.man << self.exp as usize;
        }
        let shift = (-self.exp) as u64;
        if shift > self.man.bits() + 1 {
            return match (self.signum(), dir) {
                (0, _) => BigInt::zero(),
                (1, Dir::Down) | (-1, Dir::Up) => BigInt::zero(),
                (1, Dir::Up) => BigInt::one(),
                _ => -BigInt::one(),
            };
        }
        let den = BigInt::one() << shift as usize;
        match dir {
            Dir::Down => self.man.div_floor(&den),
            Dir::Up => -((-&self.man).div_floor(&den)),
        }
    }

    /// Quotient `a / b` rounded to `prec` bits.
    pub fn div_round(a: &Dyadic, b: &Dyadic, prec: u32, dir: Dir) -> Dyadic {
        assert!(!b.is_zero(), "division by zero dyadic");
        if a.is_zero() {
            return Dyadic::zero();
        }
        // Scale the numerator so the integer quotient carries prec+2 bits.
        let want = prec as i64 + 2;
        let shift = (want + b.man.bits() as i64 - a.man.bits() as i64).max(0);
        let num = &a.man << shift as usize;
        let den = &b.man;
        let (q, r) = num.div_mod_floor(den);
        // div_mod_floor gives floor for any sign combination.
        let q = if r.is_zero() || dir == Dir::Down { q } else { q + 1 };
        Dyadic::new(q, a.exp - b.exp - shift).round(prec, dir)
    }

    /// Square root of a nonnegative value rounded to `prec` bits.
    pub fn sqrt_round(&self, prec: u32, dir: Dir) -> Dyadic {
        assert!(!self.man.is_negative(), "sqrt of negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // Make the exponent even and give the radicand 2*prec+4 bits.
        let want = 2 * (prec as i64 + 2);
        let mut shift = (want - self.man.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let n = self.man.magnitude() << shift as usize;
        let root = n.sqrt();
        let exact = &root * &root == n;
        let root = if !exact && dir == Dir::Up { root + 1u32 } else { root };
        Dyadic::new(BigInt::from(root), (self.exp - shift) / 2).round(prec, dir)
    }

    /// Integer power, exact.
    pub fn powi(&self, n: u32) -> Dyadic {
        Dyadic::new(num_traits::pow(self.man.clone(), n as usize), self.exp * n as i64)
    }

    pub fn from_rational(r: &BigRational, prec: u32, dir: Dir) -> Dyadic {
        Dyadic::div_round(
            &Dyadic::from_int(r.numer().clone()),
            &Dyadic::from_int(r.denom().clone()),
            prec,
            dir,
        )
    }

    /// Exact value as a rational. Only sensible for moderate exponents.
    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as usize)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let nb = self.man.bits() as i64;
        let keep = 60.min(nb);
        let top = (&self.man >> (nb - keep) as usize).to_f64().unwrap_or(0.0);
        let e = self.exp + nb - keep;
        if e > 2000 {
            return top.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        top * 2f64.powi(e as i32)
    }

    /// Scientific decimal string with `digits` significant digits, rounded in `dir`.
    pub fn to_decimal(&self, digits: u32, dir: Dir) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        // Estimate the decimal exponent; an off-by-one only changes the digit count.
        let l2 = self.ilog2() as f64 + 0.5;
        let e10 = (l2 * std::f64::consts::LOG10_2).floor() as i64;
        let scale = digits as i64 - 1 - e10;
        // value * 10^scale, rounded in `dir` to an integer.
        let ten = BigInt::from(10u32);
        let (num, den) = if scale >= 0 {
            (
                self.to_num_den().0 * num_traits::pow(ten.clone(), scale as usize),
                self.to_num_den().1,
            )
        } else {
            (
                self.to_num_den().0,
                self.to_num_den().1 * num_traits::pow(ten.clone(), (-scale) as usize),
            )
        };
        let (q, r) = num.div_mod_floor(&den);
        let q = if r.is_zero() || dir == Dir::Down { q } else { q + 1 };
        let negative = q.is_negative();
        let s = q.abs().to_string();
        let exp10 = s.len() as i64 - 1 - scale;
        let (head, tail) = s.split_at(1);
        let tail = tail.trim_end_matches('0');
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(head);
        if !tail.is_empty() {
            out.push('.');
            out.push_str(tail);
        }
        if exp10 != 0 {
            out.push_str(&format!("e{exp10}"));
        }
        out
    }

    fn to_num_den(&self) -> (BigInt, BigInt) {
        if self.exp >= 0 {
            (&self.man << self.exp as usize, BigInt::one())
        } else {
            (self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    pub fn from_biguint(v: &BigUint) -> Dyadic {
        Dyadic::from_int(BigInt::from(v.clone()))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // Same sign: compare magnitudes by leading exponent first.
        let (la, lb) = (self.ilog2(), other.ilog2());
        let mag = if la != lb {
            la.cmp(&lb)
        } else {
            self.abs().sub(&other.abs()).signum().cmp(&0)
        };
        if sa > 0 {
            mag
        } else {
            mag.reverse()
        }
    }
}

/// Parse a decimal literal such as `-12.5e-3` into an exact rational.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let digits = digits / 10;
    let e = exp - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let mut r = if e >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, e as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-e) as usize))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_brackets_value() {
        let x = Dyadic::from_int(0b1011_0111);
        let lo = x.round(4, Dir::Down);
        let hi = x.round(4, Dir::Up);
        assert_eq!(lo, Dyadic::from_int(0b1011_0000));
        assert_eq!(hi, Dyadic::from_int(0b1100_0000));
        let nx = x.neg();
        assert_eq!(nx.round(4, Dir::Down), hi.neg());
        assert_eq!(nx.round(4, Dir::Up), lo.neg());
    }

    #[test]
    fn division_directed() {
        let one = Dyadic::one();
        let three = Dyadic::from_int(3);
        let lo = Dyadic::div_round(&one, &three, 20, Dir::Down);
        let hi = Dyadic::div_round(&one, &three, 20, Dir::Up);
        assert!(lo.mul(&three) < one);
        assert!(hi.mul(&three) > one);
        let neg_lo = Dyadic::div_round(&one.neg(), &three, 20, Dir::Down);
        assert!(neg_lo.mul(&three) < one.neg());
    }

    #[test]
    fn sqrt_exact_and_directed() {
        assert_eq!(Dyadic::from_int(9).sqrt_round(64, Dir::Down), Dyadic::from_int(3));
        assert_eq!(Dyadic::from_int(9).sqrt_round(64, Dir::Up), Dyadic::from_int(3));
        let two = Dyadic::from_int(2);
        let lo = two.sqrt_round(64, Dir::Down);
        let hi = two.sqrt_round(64, Dir::Up);
        assert!(lo.mul(&lo) < two && hi.mul(&hi) > two);
    }

    #[test]
    fn decimal_rendering() {
        let x = Dyadic::new(BigInt::from(5), -1);
        assert_eq!(x.to_decimal(12, Dir::Down), "2.5");
        let third_lo = Dyadic::div_round(&Dyadic::one(), &Dyadic::from_int(3), 64, Dir::Down);
        assert_eq!(third_lo.to_decimal(5, Dir::Down), "3.3333e-1");
        assert_eq!(third_lo.to_decimal(5, Dir::Up), "3.3334e-1");
        assert_eq!(Dyadic::from_int(-1500).to_decimal(3, Dir::Down), "-1.5e3");
    }

    #[test]
    fn parse_decimal_literals() {
        assert_eq!(parse_decimal("2.5").unwrap(), BigRational::new(5.into(), 2.into()));
        assert_eq!(parse_decimal("-1e-2").unwrap(), BigRational::new((-1).into(), 100.into()));
        assert_eq!(parse_decimal("3/4").unwrap(), BigRational::new(3.into(), 4.into()));
        assert!(parse_decimal("abc").is_none());
    }

    #[test]
    fn ordering_and_floor() {
        let a = Dyadic::new(BigInt::from(7), -2); // 1.75
        assert!(a > Dyadic::one());
        assert!(a.neg() < Dyadic::one().neg());
        assert_eq!(a.to_integer(Dir::Down), BigInt::from(1));
        assert_eq!(a.to_integer(Dir::Up), BigInt::from(2));
        assert_eq!(a.neg().to_integer(Dir::Down), BigInt::from(-2));
        assert_eq!(Dyadic::from_f64(0.75).unwrap(), Dyadic::new(BigInt::from(3), -2));
    }
}
