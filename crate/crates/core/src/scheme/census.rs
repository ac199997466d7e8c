use serde::Serialize;

use super::points::{count_projective_points, for_each_point};
use super::EmbeddedScheme;
use crate::error::{Error, Result};
use crate::gf::ExtensionTower;
use crate::polyring::CompiledForm;

/// Default cap on points visited per level by [`census`].
pub const DEFAULT_CENSUS_CAP: u64 = 1 << 24;

/// Point counts `N_e = #X(F_{q^e})` and closed-point counts `a_e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedPointCensus {
    pub q: u64,
    pub dim: usize,
    pub degree: u64,
    /// `n[e-1] = N_e`.
    pub n: Vec<u64>,
    /// `a[e-1] = a_e`.
    pub a: Vec<u64>,
}

/// Möbius function.
pub fn mobius(mut n: u64) -> i64 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

impl ClosedPointCensus {
    /// Closed-point counts by Möbius inversion of `N_e = sum_{m | e} m a_m`.
    pub fn from_counts(q: u64, dim: usize, degree: u64, n: Vec<u64>) -> Result<Self> {
        let mut a = Vec::with_capacity(n.len());
        for e in 1..=n.len() as u64 {
            let s: i128 = (1..=e)
                .filter(|m| e % m == 0)
                .map(|m| mobius(e / m) as i128 * n[m as usize - 1] as i128)
                .sum();
            if s < 0 || s % e as i128 != 0 {
                return Err(Error::domain(format!("point counts are not Galois-consistent at e = {e}")));
            }
            a.push((s / e as i128) as u64);
        }
        Ok(ClosedPointCensus { q, dim, degree, n, a })
    }

    pub fn e_max(&self) -> usize {
        self.n.len()
    }
}

/// Exact census for `e = 1..=e_max` by evaluating the defining forms.
pub fn census(x: &EmbeddedScheme, e_max: u32) -> Result<ClosedPointCensus> {
    census_capped(x, e_max, DEFAULT_CENSUS_CAP)
}

pub fn census_capped(x: &EmbeddedScheme, e_max: u32, cap: u64) -> Result<ClosedPointCensus> {
    let q = x.field().q() as u64;
    let tower = ExtensionTower::new(x.field());
    let mut counts = Vec::with_capacity(e_max as usize);
    for e in 1..=e_max {
        let big_q = (q as u128).pow(e);
        let total = u64::try_from(big_q)
            .ok()
            .and_then(|bq| count_projective_points(x.ambient_r(), bq))
            .filter(|&c| c <= cap || x.defining().is_empty());
        let Some(total) = total else {
            return Err(Error::capacity(format!(
                "census of {x} at e = {e} exceeds the point cap {cap}; use a Weil model"
            )));
        };
        if x.defining().is_empty() {
            counts.push(total);
            continue;
        }
        let level = tower.level(e)?;
        let embed = tower.embedding(e)?;
        let forms: Vec<CompiledForm> = x.defining().iter().map(|f| f.compile(&level, Some(&embed))).collect();
        let mut n = 0u64;
        for_each_point(x.ambient_r(), &level, |p| {
            if forms.iter().all(|f| f.eval(p) == 0) {
                n += 1;
            }
            true
        });
        counts.push(n);
    }
    ClosedPointCensus::from_counts(q, x.dim(), x.degree(), counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;

    #[test]
    fn projective_line_over_f2() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let c = census(&EmbeddedScheme::projective_space(&f2, 1).unwrap(), 3).unwrap();
        assert_eq!(c.n, vec![3, 5, 9]);
        assert_eq!(c.a, vec![3, 1, 2]);
    }

    #[test]
    fn empty_section() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let x = EmbeddedScheme::parse("ci:2;x0^2+x0*x1+x1^2;x2", &f2).unwrap();
        // Over F_2 the conic x0^2+x0x1+x1^2 restricted to x2 = 0 has no
        // rational points; its two points are conjugate over F_4.
        let c = census(&x, 2).unwrap();
        assert_eq!(c.n, vec![0, 2]);
        assert_eq!(c.a, vec![0, 1]);
    }

    #[test]
    fn smooth_conic() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let x = EmbeddedScheme::parse("ci:2;x0*x1+x2^2", &f2).unwrap();
        let c = census(&x, 4).unwrap();
        assert_eq!(c.n, vec![3, 5, 9, 17]);
        for e in 1..=4u64 {
            let s: u64 = (1..=e).filter(|m| e % m == 0).map(|m| m * c.a[m as usize - 1]).sum();
            assert_eq!(s, c.n[e as usize - 1]);
        }
    }

    #[test]
    fn mobius_values() {
        let v: Vec<i64> = (1..=10).map(mobius).collect();
        assert_eq!(v, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    }

    #[test]
    fn census_cap() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let x = EmbeddedScheme::parse("ci:2;x0*x1+x2^2", &f2).unwrap();
        assert!(matches!(census_capped(&x, 5, 100), Err(Error::Capacity(_))));
    }
}
