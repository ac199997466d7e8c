use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{characteristic, constant, weil_av_base, ConstantKind};
use crate::error::{Error, Result};
use crate::rigor::{certify_adaptive, certify_compare, ln2, log2_sum, Enclosure, Relation, Verdict, DEFAULT_BITS, MAX_BITS};
use crate::zeta::{ln_zeta_enclosure, zeta_en_upper_log2, WeilModel, ZetaQuery, ZetaSource};

/// A degree condition, solved for the least certified `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// The sharp constant for `k` sections, strict.
    ThmB,
    /// Smooth curves, `d^{1/2}` numerator.
    Prop41,
    /// Smooth curves with the generic constant, `d + 1` numerator.
    ThmADisplay,
    /// Any curve, `deg <= (d-1) q^{(d+1)(d+2)/2} / (d^{n-1} - 1)`.
    Simple,
}

impl Inequality {
    pub fn as_str(self) -> &'static str {
        match self {
            Inequality::ThmB => "thm_b",
            Inequality::Prop41 => "prop41",
            Inequality::ThmADisplay => "thm_a_display",
            Inequality::Simple => "simple",
        }
    }

    pub fn relation(self) -> Relation {
        match self {
            Inequality::ThmB => Relation::Lt,
            _ => Relation::Le,
        }
    }

    fn first_d(self) -> u64 {
        match self {
            Inequality::Simple => 2,
            _ => 1,
        }
    }
}

/// How `ζ_X(n + 1/2)` enters a query.
#[derive(Clone, Debug)]
pub enum ZetaSpec {
    /// Computed from a Weil model; the cutoff scales with precision.
    Model { model: WeilModel, e_cutoff: u32 },
    /// The uniform upper bound for `ζ_{E^n}(n + 1/2)`.
    EnUpper { n: u32, q: u64 },
    /// A fixed enclosure; its width is not refined.
    Value(Enclosure),
}

impl ZetaSpec {
    /// `log2 ζ` at roughly `bits` bits of precision.
    pub fn log2(&self, n: u32, bits: u32) -> Result<Enclosure> {
        match self {
            ZetaSpec::Model { model, e_cutoff } => {
                let scale = (bits / DEFAULT_BITS).max(1);
                let mut query = ZetaQuery::half_past(ZetaSource::Model(model.clone()));
                query.s = BigRational::new(BigInt::from(2 * n + 1), BigInt::from(2));
                query.e_cutoff = e_cutoff.saturating_mul(scale);
                let w = bits + 16;
                Ok(ln_zeta_enclosure(&query, w)?.div(&ln2(w))?.with_bits(bits))
            }
            ZetaSpec::EnUpper { n, q } => zeta_en_upper_log2(*n, *q, bits),
            ZetaSpec::Value(e) => e.with_bits(bits.max(e.bits())).log2(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ZetaSpec::Model { model, e_cutoff } => format!("model:{model};e_cutoff={e_cutoff}"),
            ZetaSpec::EnUpper { n, q } => format!("en_upper:n={n};q={q}"),
            ZetaSpec::Value(e) => format!("value:{e}"),
        }
    }
}

/// Bound for `#X(F_2)` in the `q = 2` conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointMode {
    Exact(u64),
    /// `#P^r(F_2) = 2^{r+1} - 1`.
    PrBound,
    /// `ceil((3 + 2√2)^n)`, for abelian varieties.
    WeilAvBound,
}

impl PointMode {
    pub fn describe(&self) -> String {
        match self {
            PointMode::Exact(v) => format!("exact:{v}"),
            PointMode::PrBound => "pr_bound".into(),
            PointMode::WeilAvBound => "weil_av_bound".into(),
        }
    }
}

/// Parameters of a degree condition.
#[derive(Clone, Debug)]
pub struct BoundQuery {
    pub q: u64,
    pub p: u64,
    pub r: u32,
    pub n: u32,
    pub k: u32,
    pub deg: BigUint,
    pub zeta: Option<ZetaSpec>,
    pub x_f2: PointMode,
}

impl BoundQuery {
    /// A query with `k = n - 1`, no zeta value and `#X(F_2)` bounded by `#P^r(F_2)`.
    pub fn new(q: u64, r: u32, n: u32, deg: BigUint) -> Result<Self> {
        let p = characteristic(q)?;
        if n < 2 {
            return Err(Error::domain("need n >= 2"));
        }
        if deg.is_zero() {
            return Err(Error::domain("degree must be positive"));
        }
        Ok(BoundQuery { q, p, r, n, k: n - 1, deg, zeta: None, x_f2: PointMode::PrBound })
    }

    pub fn with_k(mut self, k: u32) -> Result<Self> {
        if k == 0 || k >= self.n {
            return Err(Error::domain("need 1 <= k <= n - 1"));
        }
        self.k = k;
        Ok(self)
    }

    pub fn with_zeta(mut self, zeta: ZetaSpec) -> Self {
        self.zeta = Some(zeta);
        self
    }

    pub fn with_points(mut self, mode: PointMode) -> Self {
        self.x_f2 = mode;
        self
    }

    fn check_ambient(&self) -> Result<()> {
        if self.r < self.n {
            return Err(Error::domain("need n <= r"));
        }
        Ok(())
    }

    fn x_f2_value(&self, w: u32) -> Result<Enclosure> {
        Ok(match self.x_f2 {
            PointMode::Exact(v) => Enclosure::from_int(v, w),
            PointMode::PrBound => Enclosure::from_biguint(&((BigUint::one() << (self.r + 1)) - 1u32), w),
            PointMode::WeilAvBound => {
                let c = weil_av_base(w + 16)?.powi(self.n).ceil_hi().expect("finite");
                Enclosure::from_int(c, w)
            }
        })
    }

    fn zeta_log2(&self, bits: u32) -> Result<Enclosure> {
        self.zeta
            .as_ref()
            .ok_or_else(|| Error::domain("this condition needs a zeta value"))?
            .log2(self.n, bits)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "q": self.q,
            "p": self.p,
            "r": self.r,
            "n": self.n,
            "k": self.k,
            "deg": self.deg.to_string(),
            "zeta": self.zeta.as_ref().map(|z| z.describe()),
            "x_f2": self.x_f2.describe(),
        })
    }
}

/// `log2` of both sides at `d`, at `bits` bits.
pub fn sides_log2(ineq: Inequality, query: &BoundQuery, d: &BigUint, bits: u32) -> Result<(Enclosure, Enclosure)> {
    let lhs = lhs_log2(ineq, query, bits)?;
    let rhs = rhs_log2(ineq, query, d, bits)?;
    Ok((lhs, rhs))
}

fn lhs_log2(ineq: Inequality, q: &BoundQuery, bits: u32) -> Result<Enclosure> {
    let w = bits + 32;
    let lg = |v: u64| Enclosure::from_int(v, w).log2();
    let deg = Enclosure::from_biguint(&q.deg, w).log2()?;
    let two_q = q.q == 2;
    let out = match ineq {
        Inequality::ThmB => {
            q.check_ambient()?;
            let (n, k) = (q.n as i64, q.k as i64);
            let a = Enclosure::from_ratio(2 * k - 1, n, w);
            let mut two = Enclosure::from_int(n + 2 * k + 1, w).add(&a);
            if two_q {
                two = two.add(&q.x_f2_value(w)?);
            }
            two.add(&lg(q.k as u64)?)
                .add(&Enclosure::one(w).add(&a).mul(&lg(q.n as u64 + 1)?))
                .add(&lg(q.r as u64 + 1)?)
                .add(&lg(q.r as u64)?.mul(&Enclosure::from_int(n, w)))
                .add(&deg)
                .add(&q.zeta_log2(w)?)
        }
        Inequality::Prop41 => {
            q.check_ambient()?;
            let n = q.n as i64;
            let mut two = Enclosure::from_int(3 * n + 3, w);
            if two_q {
                two = two.add(&q.x_f2_value(w)?);
            }
            two.add(&deg)
                .add(&lg(q.n as u64)?.mul(&Enclosure::from_int(4, w)))
                .add(&lg(q.r as u64)?.mul(&Enclosure::from_int(n + 1, w)))
                .add(&q.zeta_log2(w)?)
        }
        Inequality::ThmADisplay => {
            q.check_ambient()?;
            constant(ConstantKind::ThmA, q.r, q.q, w)?.log2.add(&deg).add(&q.zeta_log2(w)?)
        }
        Inequality::Simple => deg,
    };
    Ok(out.with_bits(bits))
}

fn rhs_log2(ineq: Inequality, q: &BoundQuery, d: &BigUint, bits: u32) -> Result<Enclosure> {
    if d.is_zero() {
        return Err(Error::domain("d must be positive"));
    }
    let w = bits + 32;
    let n = q.n as i64;
    let dd = Enclosure::from_biguint(d, w);
    let ld = dd.log2()?;
    let lq = Enclosure::from_int(q.q, w).log2()?;
    let scaled = |e: &Enclosure, num: i64, den: i64| e.mul(&Enclosure::from_ratio(num, den, w));
    let zero = Enclosure::zero(w);
    let m = (q.n as u64 + 1).max(q.p);
    // log2 Q with Q = q^{d/m}.
    let big_q = dd.mul(&lq).div(&Enclosure::from_int(m, w))?;
    // Q (x + 1) / (t1 + t2 + Q) = (x + 1) / (1 + (t1 + t2) / Q), which keeps
    // the huge log2 Q out of the cancellation.
    let frac = |num_log: Enclosure, t1: Enclosure, t2: Enclosure| {
        log2_sum(&num_log, &zero).sub(&log2_sum(&zero, &log2_sum(&t1, &t2).sub(&big_q)))
    };
    let out = match ineq {
        Inequality::ThmB => {
            let a = 2 * q.k as i64 - 1;
            frac(scaled(&ld, a, n), scaled(&ld, n, 1), scaled(&ld, n * n + a, n))
        }
        Inequality::Prop41 => frac(scaled(&ld, 1, 2), scaled(&ld, n + 2, 1), scaled(&ld, n, 1)),
        Inequality::ThmADisplay => frac(ld.clone(), scaled(&ld, n + 1, 1), scaled(&ld, n, 1)),
        Inequality::Simple => {
            if d < &BigUint::from(2u32) {
                return Err(Error::domain("the simple-case condition needs d >= 2"));
            }
            let (num, den) = simple_sides_exact(q, d)?;
            Enclosure::from_biguint(&num, w).log2()?.sub(&Enclosure::from_biguint(&den, w).log2()?)
        }
    };
    Ok(out.with_bits(bits))
}

/// `((d-1) q^{(d+1)(d+2)/2}, d^{n-1} - 1)`.
fn simple_sides_exact(q: &BoundQuery, d: &BigUint) -> Result<(BigUint, BigUint)> {
    let e = (d + 1u32) * (d + 2u32) / 2u32;
    let e: u32 = e
        .to_u32()
        .filter(|&e| e as u64 * 64 <= 1 << 26)
        .ok_or_else(|| Error::capacity("simple-case exponent too large"))?;
    Ok(((d - 1u32) * BigUint::from(q.q).pow(e), d.pow(q.n - 1) - 1u32))
}

/// Verdict of one condition at `d` and precision `bits`.
fn verdict_at(ineq: Inequality, query: &BoundQuery, d: &BigUint, bits: u32, lhs: &LhsCache) -> Result<Verdict> {
    if ineq == Inequality::Simple {
        // Exact: deg (d^{n-1} - 1) <= (d-1) q^{(d+1)(d+2)/2}.
        let (num, den) = simple_sides_exact(query, d)?;
        return Ok(if &query.deg * den <= num { Verdict::Holds } else { Verdict::Fails });
    }
    let l = lhs.get(ineq, query, bits)?;
    let r = rhs_log2(ineq, query, d, bits)?;
    Ok(certify_compare(&l, &r, ineq.relation()))
}

#[derive(Default)]
struct LhsCache(Mutex<HashMap<u32, Enclosure>>);

impl LhsCache {
    fn get(&self, ineq: Inequality, q: &BoundQuery, bits: u32) -> Result<Enclosure> {
        if let Some(v) = self.0.lock().unwrap().get(&bits) {
            return Ok(v.clone());
        }
        let v = lhs_log2(ineq, q, bits)?;
        self.0.lock().unwrap().insert(bits, v.clone());
        Ok(v)
    }
}

/// Solver limits.
#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub start_bits: u32,
    pub cap_bits: u32,
    /// Largest `d` tried before giving up.
    pub d_max: BigUint,
    /// Scan `d` one by one up to here, then double and bisect.
    pub linear_limit: u64,
    /// Smallest `d` considered.
    pub d_min: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            start_bits: crate::rigor::default_bits(),
            cap_bits: MAX_BITS,
            d_max: BigUint::one() << 65536u32,
            linear_limit: 10_000,
            d_min: None,
        }
    }
}

/// A certified solution `d` with the evidence needed to re-check it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub inequality: Inequality,
    pub d: BigUint,
    /// Precision at which `d` holds; 0 means exact integer arithmetic.
    pub bits: u32,
    /// Verdict and precision at `d - 1`, if `d - 1` was in range.
    pub previous: Option<(Verdict, u32)>,
    /// Every `d` up to this value fails because `d^a + 1` is below the left side.
    pub skipped_below: Option<BigUint>,
    pub lhs_log2: Enclosure,
    pub rhs_log2: Enclosure,
}

impl Certificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "inequality": self.inequality.as_str(),
            "relation": self.inequality.relation(),
            "d": self.d.to_string(),
            "bits": self.bits,
            "verdict": Verdict::Holds,
            "previous": self.previous.map(|(v, b)| serde_json::json!({ "verdict": v, "bits": b })),
            "skipped_below": self.skipped_below.as_ref().map(|d| d.to_string()),
            "lhs_log2": self.lhs_log2.to_json(),
            "rhs_log2": self.rhs_log2.to_json(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Certificate> {
        let bad = || Error::parse("malformed certificate");
        let inequality: Inequality = serde_json::from_value(v["inequality"].clone()).map_err(|_| bad())?;
        let d: BigUint = v["d"].as_str().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let bits = v["bits"].as_u64().ok_or_else(bad)? as u32;
        let previous = match &v["previous"] {
            serde_json::Value::Null => None,
            p => Some((
                serde_json::from_value(p["verdict"].clone()).map_err(|_| bad())?,
                p["bits"].as_u64().ok_or_else(bad)? as u32,
            )),
        };
        let skipped_below = match &v["skipped_below"] {
            serde_json::Value::Null => None,
            x => Some(x.as_str().and_then(|s| s.parse().ok()).ok_or_else(bad)?),
        };
        Ok(Certificate {
            inequality,
            d,
            bits,
            previous,
            skipped_below,
            lhs_log2: Enclosure::from_json(&v["lhs_log2"])?,
            rhs_log2: Enclosure::from_json(&v["rhs_log2"])?,
        })
    }
}

fn check(ineq: Inequality, query: &BoundQuery, d: &BigUint, opts: &SolveOptions, lhs: &LhsCache) -> Result<(Verdict, u32)> {
    if ineq == Inequality::Simple {
        return Ok((verdict_at(ineq, query, d, 0, lhs)?, 0));
    }
    certify_adaptive(opts.start_bits, opts.cap_bits, |b| verdict_at(ineq, query, d, b, lhs))
}

const BLOCK: u64 = 256;

/// Exponent `a` with `RHS(d) < d^a + 1`, for the three ratio conditions.
fn numerator_exponent(ineq: Inequality, query: &BoundQuery) -> Option<(i64, i64)> {
    match ineq {
        Inequality::ThmB => Some((2 * query.k as i64 - 1, query.n as i64)),
        Inequality::Prop41 => Some((1, 2)),
        Inequality::ThmADisplay => Some((1, 1)),
        Inequality::Simple => None,
    }
}

/// Whether `log2(d^a + 1) < LHS` is certified, so that the condition fails at
/// every `d' <= d`.
fn vacuous_at(ineq: Inequality, query: &BoundQuery, d: &BigUint, bits: u32, lhs: &LhsCache) -> Result<Verdict> {
    let (num, den) = numerator_exponent(ineq, query).expect("ratio condition");
    let w = bits + 32;
    let l = lhs.get(ineq, query, bits)?;
    let top = Enclosure::from_biguint(d, w).log2()?.mul(&Enclosure::from_ratio(num, den, w));
    let bound = log2_sum(&top, &Enclosure::zero(w)).with_bits(bits);
    Ok(certify_compare(&bound, &l, Relation::Lt))
}

/// Largest `d` at which the numerator bound already rules the condition out.
fn vacuous_below(ineq: Inequality, query: &BoundQuery, opts: &SolveOptions, lhs: &LhsCache) -> Result<Option<BigUint>> {
    let Some((num, den)) = numerator_exponent(ineq, query) else {
        return Ok(None);
    };
    let l = lhs.get(ineq, query, opts.start_bits)?.lo_f64();
    if !(l > 1.0) {
        return Ok(None);
    }
    // log2 of a candidate slightly below the crossing point.
    let e = (l - 1e-9 * l - 1.0) * den as f64 / num as f64;
    if e > (opts.d_max.bits() + 1) as f64 {
        return Err(Error::UnsatWithinCap(format!(
            "{} needs d near 2^{e:.0}, beyond {}",
            ineq.as_str(),
            short(&opts.d_max)
        )));
    }
    if e < 1.0 {
        return Ok(None);
    }
    let shift = e.floor() as u64;
    let mant = (2f64.powf(e - shift as f64) * (1u64 << 52) as f64) as u64;
    let mut cand = (BigUint::from(mant) << shift) >> 52u32;
    while cand > BigUint::one() {
        let (v, _) = certify_adaptive(opts.start_bits, opts.cap_bits, |b| vacuous_at(ineq, query, &cand, b, lhs))?;
        if v == Verdict::Holds {
            return Ok(Some(cand));
        }
        cand >>= 1u32;
    }
    Ok(None)
}

/// Least `d` (in scan order) for which the condition is certified.
///
/// Values of `d` whose numerator bound `d^a + 1` is already below the left
/// side are skipped wholesale. The rest is scanned one by one up to
/// `opts.linear_limit`, then by doubling and bisection, assuming the
/// condition is monotone there. The verdict at `d - 1` is recomputed and
/// stored.
pub fn minimal_d(ineq: Inequality, query: &BoundQuery, opts: &SolveOptions) -> Result<Certificate> {
    let lhs = LhsCache::default();
    let first = opts.d_min.unwrap_or(1).max(ineq.first_d());
    let skipped = vacuous_below(ineq, query, opts, &lhs)?.filter(|v| v >= &BigUint::from(first));
    let start = match &skipped {
        Some(v) => v + 1u32,
        None => BigUint::from(first),
    };
    let mut found: Option<BigUint> = None;
    let mut frontier = start.clone();
    if let Some(s) = start.to_u64().filter(|&s| s <= opts.linear_limit) {
        let mut lo = s;
        while lo <= opts.linear_limit && found.is_none() && BigUint::from(lo) <= opts.d_max {
            let hi = (lo + BLOCK).min(opts.linear_limit + 1);
            let verdicts: Vec<Result<(Verdict, u32)>> = (lo..hi)
                .into_par_iter()
                .map(|d| check(ineq, query, &BigUint::from(d), opts, &lhs))
                .collect();
            for (i, v) in verdicts.into_iter().enumerate() {
                let d = BigUint::from(lo + i as u64);
                if d > opts.d_max {
                    break;
                }
                if v?.0 == Verdict::Holds {
                    found = Some(d);
                    break;
                }
            }
            lo = hi;
        }
        frontier = BigUint::from(lo);
    }
    let d = match found {
        Some(d) => d,
        None => {
            // Everything below `frontier` is known not to hold.
            let mut lo = &frontier - 1u32;
            let mut hi = frontier.clone();
            loop {
                if hi > opts.d_max {
                    hi = opts.d_max.clone();
                }
                if hi <= lo {
                    return Err(Error::UnsatWithinCap(format!(
                        "{} not certified for any d <= {}",
                        ineq.as_str(),
                        short(&opts.d_max)
                    )));
                }
                if check(ineq, query, &hi, opts, &lhs)?.0 == Verdict::Holds {
                    break;
                }
                lo = hi.clone();
                hi = &hi * 2u32;
            }
            while &hi - &lo > BigUint::one() {
                let mid: BigUint = (&lo + &hi) / 2u32;
                if check(ineq, query, &mid, opts, &lhs)?.0 == Verdict::Holds {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    };
    let (v, bits) = check(ineq, query, &d, opts, &lhs)?;
    debug_assert_eq!(v, Verdict::Holds);
    let prev_d = &d - 1u32;
    let previous = if prev_d >= BigUint::from(first) {
        let pv = check(ineq, query, &prev_d, opts, &lhs)?;
        if pv.0 == Verdict::Holds {
            return Err(Error::domain("condition not monotone near the bisection result"));
        }
        Some(pv)
    } else {
        None
    };
    let shown = if bits == 0 { DEFAULT_BITS } else { bits };
    let (lhs_log2, rhs_log2) = sides_log2(ineq, query, &d, shown)?;
    Ok(Certificate { inequality: ineq, d, bits, previous, skipped_below: skipped, lhs_log2, rhs_log2 })
}

fn short(x: &BigUint) -> String {
    if x.bits() > 64 {
        format!("2^{}", x.bits() - 1)
    } else {
        x.to_string()
    }
}

/// Re-evaluate a certificate at its stored precisions. Returns whether
/// both the verdict at `d` and the recorded verdict at `d - 1` reproduce.
pub fn replay_certificate(query: &BoundQuery, cert: &Certificate) -> Result<bool> {
    let lhs = LhsCache::default();
    let ineq = cert.inequality;
    if verdict_at(ineq, query, &cert.d, cert.bits, &lhs)? != Verdict::Holds {
        return Ok(false);
    }
    if let Some((v, b)) = cert.previous {
        if verdict_at(ineq, query, &(&cert.d - 1u32), b, &lhs)? != v {
            return Ok(false);
        }
    }
    if let Some(s) = &cert.skipped_below {
        let (v, _) = certify_adaptive(DEFAULT_BITS, MAX_BITS, |b| vacuous_at(ineq, query, s, b, &lhs))?;
        if v != Verdict::Holds {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2_f3() -> BoundQuery {
        BoundQuery::new(3, 2, 2, BigUint::one())
            .unwrap()
            .with_zeta(ZetaSpec::Model { model: WeilModel::projective_space(2, 3).unwrap(), e_cutoff: 20 })
    }

    #[test]
    fn simple_examples() {
        let opts = SolveOptions::default();
        let q = BoundQuery::new(2, 2, 2, 18u32.into()).unwrap();
        let c = minimal_d(Inequality::Simple, &q, &opts).unwrap();
        assert_eq!(c.d, 2u32.into());
        assert_eq!(c.previous, None);
        let q = BoundQuery::new(2, 2, 2, 65u32.into()).unwrap();
        let c = minimal_d(Inequality::Simple, &q, &opts).unwrap();
        assert_eq!(c.d, 3u32.into());
        assert_eq!(c.previous, Some((Verdict::Fails, 0)));
        assert!(replay_certificate(&q, &c).unwrap());
    }

    #[test]
    fn refined_certificate_replays() {
        let q = p2_f3();
        let c = minimal_d(Inequality::Prop41, &q, &SolveOptions::default()).unwrap();
        assert!(c.d > BigUint::from(10_000u32));
        assert!(c.skipped_below.is_some());
        assert!(replay_certificate(&q, &c).unwrap());
        let back = Certificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back.d, c.d);
        assert_eq!(back.previous, c.previous);
        assert!(replay_certificate(&q, &back).unwrap());
    }

    #[test]
    fn thm_b_lhs_example() {
        let q = p2_f3().with_k(1).unwrap();
        let (l, _) = sides_log2(Inequality::ThmB, &q, &BigUint::one(), 64).unwrap();
        let zeta: f64 = (0..=2).map(|i| 1.0 / (1.0 - 3f64.powf(i as f64 - 2.5))).product();
        let oracle = (2f64.powf(5.5) * 3f64.powf(1.5) * 3.0 * 4.0 * zeta).log2();
        assert!((l.mid_f64() - oracle).abs() < 1e-4, "{} vs {oracle}", l.mid_f64());
    }

    #[test]
    fn q2_lhs_differs_by_point_count() {
        let base = BoundQuery::new(2, 2, 2, BigUint::one())
            .unwrap()
            .with_k(1)
            .unwrap()
            .with_zeta(ZetaSpec::Value(Enclosure::from_int(3, 64)))
            .with_points(PointMode::Exact(7));
        let mut other = base.clone();
        other.q = 3;
        other.p = 3;
        let a = lhs_log2(Inequality::ThmB, &base, 64).unwrap();
        let b = lhs_log2(Inequality::ThmB, &other, 64).unwrap();
        assert!(a.sub(&b).intersects(&Enclosure::from_int(7, 64)));
    }

    #[test]
    fn unsat_within_cap() {
        let q = p2_f3();
        let opts = SolveOptions { d_max: BigUint::from(50u32), linear_limit: 40, ..SolveOptions::default() };
        assert!(matches!(minimal_d(Inequality::Prop41, &q, &opts), Err(Error::UnsatWithinCap(_))));
    }

    #[test]
    fn refined_below_generic_display() {
        // 2^{3n+3} n^4 r^{n+1} <= 2^{3r+3} r^{r+5} for n <= r.
        for r in 2..=8u32 {
            for n in 2..=r {
                let q = BoundQuery::new(3, r, n, BigUint::one())
                    .unwrap()
                    .with_zeta(ZetaSpec::Value(Enclosure::from_int(2, 64)));
                let a = lhs_log2(Inequality::Prop41, &q, 64).unwrap();
                let b = lhs_log2(Inequality::ThmADisplay, &q, 64).unwrap();
                assert_ne!(certify_compare(&a, &b, Relation::Le), Verdict::Fails, "r={r} n={n}");
            }
        }
    }
}
