//! Certified enclosures of `ζ_X(s)` and of the limiting Euler product for
//! smooth sections, from exact Weil models or finite censuses.

mod model;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use model::{GrowthConstant, WeilModel};

use crate::bounds::l_fraction;
use crate::error::{Error, Result};
use crate::rigor::Enclosure;
use crate::scheme::ClosedPointCensus;

/// Default number of exact per-degree factors.
pub const DEFAULT_E_CUTOFF: u32 = 20;

const GUARD: u32 = 32;

/// Where closed-point counts come from.
#[derive(Clone, Debug)]
pub enum ZetaSource {
    Model(WeilModel),
    /// Counts for `e <= census.e_max()`, with a crude tail beyond.
    Census(ClosedPointCensus),
    /// Exactly these closed points and no others.
    Finite { q: u64, a: Vec<BigUint> },
}

impl ZetaSource {
    pub fn q(&self) -> u64 {
        match self {
            ZetaSource::Model(m) => m.q(),
            ZetaSource::Census(c) => c.q,
            ZetaSource::Finite { q, .. } => *q,
        }
    }

    /// Dimension governing convergence (0 for finite sources).
    pub fn dim(&self) -> u32 {
        match self {
            ZetaSource::Model(m) => m.dim(),
            ZetaSource::Census(c) => c.dim as u32,
            ZetaSource::Finite { .. } => 0,
        }
    }

    /// Number of degrees handled exactly for a requested cutoff.
    pub fn head_len(&self, e_cutoff: u32) -> u32 {
        match self {
            ZetaSource::Census(c) => e_cutoff.min(c.e_max() as u32),
            _ => e_cutoff,
        }
    }

    fn closed_points(&self, e_max: u32) -> Vec<BigUint> {
        match self {
            ZetaSource::Model(m) => m.closed_points(e_max),
            ZetaSource::Census(c) => c.a[..e_max as usize].iter().map(|&x| BigUint::from(x)).collect(),
            ZetaSource::Finite { a, .. } => (0..e_max as usize)
                .map(|i| a.get(i).cloned().unwrap_or_else(BigUint::zero))
                .collect(),
        }
    }

    /// `K` with `e a_e <= N_e <= K q^{dim e}`, or `None` when there is no tail.
    fn growth(&self, e_cutoff: u32, bits: u32) -> Option<Enclosure> {
        match self {
            ZetaSource::Model(m) => Some(m.growth_constant().enclosure(bits)),
            // N_e <= D #P^n(F_{q^e}) <= D q/(q-1) q^{ne}.
            ZetaSource::Census(c) => Some(Enclosure::from_rational(
                &BigRational::new(BigInt::from(c.degree) * c.q, BigInt::from(c.q - 1)),
                bits,
            )),
            ZetaSource::Finite { a, .. } => (a.len() as u32 > e_cutoff).then(|| {
                let worst = a.iter().enumerate().map(|(i, x)| x * BigUint::from(i + 1)).max().unwrap();
                Enclosure::from_biguint(&worst, bits)
            }),
        }
    }
}

/// A request for `ζ_X(s)`.
#[derive(Clone, Debug)]
pub struct ZetaQuery {
    pub source: ZetaSource,
    pub s: BigRational,
    pub e_cutoff: u32,
}

impl ZetaQuery {
    /// `s = dim + 1/2` with the default cutoff.
    pub fn half_past(source: ZetaSource) -> Self {
        let s = BigRational::new(BigInt::from(2 * source.dim() + 1), BigInt::from(2));
        ZetaQuery { source, s, e_cutoff: DEFAULT_E_CUTOFF }
    }
}

/// `q^{-x}` for an enclosure `x`.
fn q_pow_neg(q: u64, x: &Enclosure, w: u32) -> Enclosure {
    let lq = Enclosure::from_int(q, w).log2().expect("q >= 2");
    x.mul(&lq).neg().exp2()
}

/// Enclosure of `ln ζ_X(s)`.
pub fn ln_zeta_enclosure(query: &ZetaQuery, bits: u32) -> Result<Enclosure> {
    let src = &query.source;
    let n = BigRational::from_integer(BigInt::from(src.dim()));
    let positive_needed = matches!(src, ZetaSource::Finite { .. });
    if query.s <= n && !(positive_needed && query.s > BigRational::zero()) {
        return Err(Error::Divergence(format!(
            "s = {} does not exceed the dimension {}",
            query.s,
            src.dim()
        )));
    }
    let w = bits + GUARD;
    let q = src.q();
    let s = Enclosure::from_rational(&query.s, w);
    let big_e = src.head_len(query.e_cutoff);
    let a = src.closed_points(big_e);
    let mut head = Enclosure::zero(w);
    for (i, ae) in a.iter().enumerate() {
        if ae.is_zero() {
            continue;
        }
        let e = (i + 1) as i64;
        let x = q_pow_neg(q, &s.mul(&Enclosure::from_int(e, w)), w);
        let term = x.neg().ln1p()?.neg();
        head = head.add(&term.mul(&Enclosure::from_biguint(ae, w)));
    }
    let tail = match src.growth(big_e, w) {
        None => Enclosure::zero(w),
        Some(k) => {
            let e1 = Enclosure::from_int(big_e + 1, w);
            let gap = s.sub(&Enclosure::from_rational(&n, w));
            let num = k.mul(&q_pow_neg(q, &gap.mul(&e1), w));
            let d1 = Enclosure::one(w).sub(&q_pow_neg(q, &s.mul(&e1), w));
            let d2 = Enclosure::one(w).sub(&q_pow_neg(q, &gap, w));
            let t = num.div(&e1.mul(&d1).mul(&d2))?;
            Enclosure::from_ext(crate::rigor::Ext::Fin(crate::rigor::Dyadic::zero()), t.hi().clone(), w)?
        }
    };
    Ok(head.add(&tail).with_bits(bits))
}

/// Enclosure of `ζ_X(s) = prod_x (1 - q^{-s deg x})^{-1}`.
pub fn zeta_enclosure(query: &ZetaQuery, bits: u32) -> Result<Enclosure> {
    let w = bits + GUARD;
    Ok(ln_zeta_enclosure(query, w)?.exp().with_bits(bits))
}

/// Enclosure of `prod_x (1 - q^{-k deg x}(1 - L(q^{deg x}, n, k)))` over
/// the closed points of an `n`-dimensional `X`.
pub fn euler_product_enclosure(source: &ZetaSource, n: u32, k: u32, e_cutoff: u32, bits: u32) -> Result<Enclosure> {
    Ok(ln_euler_product_enclosure(source, n, k, e_cutoff, bits)?.exp().with_bits(bits))
}

pub fn ln_euler_product_enclosure(source: &ZetaSource, n: u32, k: u32, e_cutoff: u32, bits: u32) -> Result<Enclosure> {
    if k == 0 || k >= n.max(1) {
        return Err(Error::domain("need 1 <= k <= n - 1"));
    }
    let w = bits + GUARD;
    let q = source.q();
    let big_e = source.head_len(e_cutoff);
    let a = source.closed_points(big_e);
    let mut head = Enclosure::zero(w);
    for (i, ae) in a.iter().enumerate() {
        if ae.is_zero() {
            continue;
        }
        let e = (i + 1) as u32;
        let qe = BigInt::from(q).pow(e);
        let l = l_fraction(&qe, n, k)?;
        let u = (BigRational::one() - l) / BigRational::from_integer(qe.pow(k));
        let f = Enclosure::from_rational(&u, w).neg().ln1p()?;
        head = head.add(&f.mul(&Enclosure::from_biguint(ae, w)));
    }
    let tail = match source.growth(big_e, w) {
        None => Enclosure::zero(w),
        Some(kc) => {
            // Each factor is at least 1 - 2 q^{-(n+1)e}, and
            // -ln(1 - x) <= x / (1 - x).
            let e1 = Enclosure::from_int(big_e + 1, w);
            let qq = Enclosure::from_int(q, w);
            let small = Enclosure::from_int(2, w).mul(&q_pow_neg(q, &Enclosure::from_int((n + 1) as u64 * (big_e as u64 + 1), w), w));
            let num = Enclosure::from_int(2, w).mul(&kc).mul(&q_pow_neg(q, &e1, w));
            let den = e1
                .mul(&Enclosure::one(w).sub(&small))
                .mul(&Enclosure::one(w).sub(&qq.recip()?));
            let t = num.div(&den)?;
            Enclosure::from_ext(t.hi().neg(), crate::rigor::Ext::Fin(crate::rigor::Dyadic::zero()), w)?
        }
    };
    Ok(head.add(&tail).with_bits(bits))
}

/// Enclosure of `((1 + sqrt q)/(1 - 1/sqrt q))^{2^{n-1}}`, a uniform upper
/// bound for `ζ_{E^n}(n + 1/2)`.
pub fn zeta_en_upper(n: u32, q: u64, bits: u32) -> Result<Enclosure> {
    if n == 0 || n > 32 || q < 2 {
        return Err(Error::domain("need 1 <= n <= 32 and q >= 2"));
    }
    let w = bits + GUARD;
    Ok(en_base(q, w)?.powi(1u32 << (n - 1)).with_bits(bits))
}

/// `log2` of [`zeta_en_upper`], valid for any `n >= 1`.
pub fn zeta_en_upper_log2(n: u32, q: u64, bits: u32) -> Result<Enclosure> {
    if n == 0 || q < 2 {
        return Err(Error::domain("need n >= 1 and q >= 2"));
    }
    let w = bits + GUARD;
    Ok(en_base(q, w)?.log2()?.mul_pow2(n as i64 - 1).with_bits(bits))
}

fn en_base(q: u64, w: u32) -> Result<Enclosure> {
    let root = Enclosure::from_int(q, w).sqrt()?;
    let one = Enclosure::one(w);
    one.add(&root).div(&one.sub(&root.recip()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigor::Dyadic;

    fn close(e: &Enclosure, x: f64, tol: f64) -> bool {
        e.lo_f64() <= x + tol && e.hi_f64() >= x - tol && e.hi_f64() - e.lo_f64() <= tol
    }

    #[test]
    fn projective_plane_closed_form() {
        let m = WeilModel::projective_space(2, 2).unwrap();
        let mut query = ZetaQuery::half_past(ZetaSource::Model(m));
        query.e_cutoff = 64;
        let z = zeta_enclosure(&query, 128).unwrap();
        let exact: f64 = (0..=2).map(|i| 1.0 / (1.0 - 2f64.powf(i as f64 - 2.5))).product();
        assert!((exact - 6.416).abs() < 1e-3);
        assert!(close(&z, exact, 1e-6), "{z:?}");
    }

    #[test]
    fn elliptic_rational_function() {
        let m = WeilModel::elliptic(0, 2).unwrap();
        let query = ZetaQuery { source: ZetaSource::Model(m), s: BigRational::new(3.into(), 2.into()), e_cutoff: 80 };
        let z = zeta_enclosure(&query, 128).unwrap();
        let t = 2f64.powf(-1.5);
        let exact = (1.0 + 2.0 * t * t) / ((1.0 - t) * (1.0 - 2.0 * t));
        assert!(close(&z, exact, 1e-9), "{z:?} vs {exact}");
    }

    #[test]
    fn empty_scheme_and_divergence() {
        let src = ZetaSource::Finite { q: 2, a: vec![] };
        let z = zeta_enclosure(&ZetaQuery { source: src.clone(), s: BigRational::one(), e_cutoff: 20 }, 64).unwrap();
        assert_eq!(z, Enclosure::one(64));
        let p = ZetaSource::Model(WeilModel::projective_space(2, 2).unwrap());
        let q = ZetaQuery { source: p, s: BigRational::from_integer(2.into()), e_cutoff: 20 };
        assert!(matches!(zeta_enclosure(&q, 64), Err(Error::Divergence(_))));
    }

    #[test]
    fn cutoffs_nest() {
        let m = ZetaSource::Model(WeilModel::segre_power(0, 2, 3).unwrap());
        let mut prev: Option<Enclosure> = None;
        for e in [4, 8, 16, 32] {
            let mut q = ZetaQuery::half_past(m.clone());
            q.e_cutoff = e;
            let z = zeta_enclosure(&q, 96).unwrap();
            if let Some(p) = &prev {
                assert!(p.intersects(&z));
                assert!(z.width().unwrap() <= p.width().unwrap());
            }
            prev = Some(z);
        }
    }

    #[test]
    fn euler_product_examples() {
        let empty = ZetaSource::Finite { q: 3, a: vec![] };
        assert_eq!(euler_product_enclosure(&empty, 2, 1, 20, 64).unwrap(), Enclosure::one(64));
        let point = ZetaSource::Finite { q: 3, a: vec![BigUint::one()] };
        let p = euler_product_enclosure(&point, 2, 1, 20, 64).unwrap();
        assert!(p.contains_rational(&BigRational::new(26.into(), 27.into())));
        assert!(p.width().unwrap() < Dyadic::pow2(-50));
        let plane = ZetaSource::Model(WeilModel::projective_space(2, 2).unwrap());
        let e = euler_product_enclosure(&plane, 2, 1, 12, 64).unwrap();
        assert!(e.is_positive() && e.hi_f64() < 1.0);
        assert!(euler_product_enclosure(&plane, 2, 2, 12, 64).is_err());
    }

    #[test]
    fn en_upper_values() {
        let one = zeta_en_upper(1, 2, 64).unwrap();
        assert!(close(&one, 4.0 + 3.0 * 2f64.sqrt(), 1e-12));
        let two = zeta_en_upper(2, 2, 64).unwrap();
        assert!(close(&two, (4.0 + 3.0 * 2f64.sqrt()).powi(2), 1e-10));
        for q in 2..=5 {
            for n in 1..6 {
                let a = zeta_en_upper(n, q, 64).unwrap();
                let b = zeta_en_upper(n + 1, q, 64).unwrap();
                assert!(b.lo_f64() >= a.hi_f64());
                let l = zeta_en_upper_log2(n, q, 64).unwrap();
                assert!(a.log2().unwrap().intersects(&l));
            }
        }
    }
}
