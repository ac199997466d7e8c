//! Monomials packed into a `u64` whose natural order is grevlex with
//! `x0 > x1 > ... > xr`.
//!
//! Byte 7 holds the total degree. Variable `i` of an `n`-variable ring
//! sits in byte `7 - n + i` and stores `127 - e_i`, so the most
//! significant slot is the last variable and a smaller exponent there
//! compares larger. Multiplication is word addition minus a per-ring
//! constant, valid while every exponent stays at most 127.

use std::fmt::Write;

pub const MAX_VARS: usize = 7;
/// Largest total degree representable.
pub const MAX_DEGREE: u32 = 127;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Mono(pub(crate) u64);

#[inline]
fn shift(nvars: usize, i: usize) -> u32 {
    8 * (7 - nvars + i) as u32
}

#[inline]
fn offset(nvars: usize) -> u64 {
    (0..nvars).map(|i| 127u64 << shift(nvars, i)).sum()
}

#[inline]
fn guard(nvars: usize) -> u64 {
    (0..nvars).map(|i| 0x80u64 << shift(nvars, i)).sum()
}

impl Mono {
    pub fn one(nvars: usize) -> Mono {
        Mono(offset(nvars))
    }

    /// Caller guarantees `exps.len() <= MAX_VARS` and `sum <= MAX_DEGREE`.
    pub fn from_exps(exps: &[u32]) -> Mono {
        let n = exps.len();
        let deg: u32 = exps.iter().sum();
        debug_assert!(n <= MAX_VARS && deg <= MAX_DEGREE);
        let mut w = (deg as u64) << 56;
        for (i, &e) in exps.iter().enumerate() {
            w |= (127 - e as u64) << shift(n, i);
        }
        Mono(w)
    }

    pub fn var(nvars: usize, i: usize) -> Mono {
        Mono(offset(nvars) + (1u64 << 56) - (1u64 << shift(nvars, i)))
    }

    #[inline]
    pub fn degree(self) -> u32 {
        (self.0 >> 56) as u32
    }

    #[inline]
    pub fn exp(self, nvars: usize, i: usize) -> u32 {
        127 - ((self.0 >> shift(nvars, i)) & 0xff) as u32
    }

    pub fn exps(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exp(nvars, i)).collect()
    }

    #[inline]
    pub fn mul(self, other: Mono, nvars: usize) -> Mono {
        Mono(self.0.wrapping_add(other.0).wrapping_sub(offset(nvars)))
    }

    /// True when `self` divides `other`.
    #[inline]
    pub fn divides(self, other: Mono, nvars: usize) -> bool {
        let h = guard(nvars);
        let d = (self.0 | h).wrapping_sub(other.0 & !(0xffu64 << 56));
        d & h == h && self.degree() <= other.degree()
    }

    /// `other / self`, assuming divisibility.
    #[inline]
    pub fn quotient_of(self, other: Mono, nvars: usize) -> Mono {
        Mono(other.0.wrapping_add(offset(nvars)).wrapping_sub(self.0))
    }

    pub fn lcm(self, other: Mono, nvars: usize) -> Mono {
        let e: Vec<u32> = (0..nvars)
            .map(|i| self.exp(nvars, i).max(other.exp(nvars, i)))
            .collect();
        Mono::from_exps(&e)
    }

    /// True when no variable occurs in both.
    pub fn coprime(self, other: Mono, nvars: usize) -> bool {
        (0..nvars).all(|i| self.exp(nvars, i) == 0 || other.exp(nvars, i) == 0)
    }

    /// `x0^a*x2` style rendering; `1` for the unit monomial.
    pub fn render(self, nvars: usize) -> String {
        let mut s = String::new();
        for i in 0..nvars {
            let e = self.exp(nvars, i);
            if e == 0 {
                continue;
            }
            if !s.is_empty() {
                s.push('*');
            }
            write!(s, "x{i}").unwrap();
            if e > 1 {
                write!(s, "^{e}").unwrap();
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }
}

/// All monomials of degree `d` in `nvars` variables, in descending order.
pub fn monomials(nvars: usize, d: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; nvars];
    fn rec(i: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Mono>) {
        let n = exps.len();
        if i == n - 1 {
            exps[i] = left;
            out.push(Mono::from_exps(exps));
            return;
        }
        for e in 0..=left {
            exps[i] = e;
            rec(i + 1, left - e, exps, out);
        }
    }
    if nvars > 0 {
        rec(0, d, &mut exps, &mut out);
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// `C(d + nvars - 1, nvars - 1)`.
pub fn count_monomials(nvars: usize, d: u32) -> u64 {
    let k = nvars as u64 - 1;
    let mut c = 1u64;
    for i in 1..=k {
        c = c * (d as u64 + i) / i;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grevlex_order_in_three_vars() {
        let m = monomials(3, 2);
        let names: Vec<String> = m.iter().map(|x| x.render(3)).collect();
        assert_eq!(names, ["x0^2", "x0*x1", "x1^2", "x0*x2", "x1*x2", "x2^2"]);
    }

    #[test]
    fn arithmetic_matches_exponents() {
        let a = Mono::from_exps(&[1, 0, 2]);
        let b = Mono::from_exps(&[0, 3, 1]);
        assert_eq!(a.mul(b, 3).exps(3), vec![1, 3, 3]);
        assert!(a.divides(a.mul(b, 3), 3));
        assert!(!a.divides(b, 3));
        assert_eq!(a.quotient_of(a.mul(b, 3), 3), b);
        assert_eq!(a.lcm(b, 3).exps(3), vec![1, 3, 2]);
        assert!(!a.coprime(b, 3));
        assert!(Mono::from_exps(&[2, 0, 0]).coprime(b, 3));
        assert_eq!(Mono::var(3, 1).exps(3), vec![0, 1, 0]);
        assert_eq!(Mono::one(3).mul(a, 3), a);
    }

    #[test]
    fn divisibility_in_x0_alone() {
        let a = Mono::from_exps(&[2, 0]);
        let b = Mono::from_exps(&[1, 1]);
        assert!(!a.divides(b, 2));
        assert!(Mono::from_exps(&[1, 0]).divides(b, 2));
    }

    #[test]
    fn counts() {
        assert_eq!(count_monomials(3, 3), 10);
        assert_eq!(monomials(4, 3).len(), 20);
        assert_eq!(count_monomials(3, 0), 1);
    }
}
