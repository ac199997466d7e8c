//! Exhaustive and sampled estimates of the smooth-section fraction, the
//! effective error-term check, and verifier suites for the supporting
//! inequalities.

mod suites;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use suites::{prop32_case, prop32_fixtures, verify_lemma_suite, CurveFixture, Suite, SuiteParams, SuiteReport};

use crate::bounds::bk_error_bound;
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::polyring::{sample_form, FormSpace, FormTuple, DEFAULT_ENUMERATION_CAP};
use crate::rigor::{certify_adaptive, certify_compare, Enclosure, Relation, Verdict};
use crate::scheme::{census, count_projective_points, section_decide, DEFAULT_CENSUS_CAP, EmbeddedScheme, PointScanner, SectionEngine, SectionVerdict};
use crate::zeta::{euler_product_enclosure, WeilModel, ZetaSource};

/// How tuples are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    /// `count` uniform tuples; tuple `j` uses ChaCha8 stream `j` of `seed`.
    Sample { count: u64, seed: u64 },
}

/// A smooth-section experiment on `X`.
#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    pub x: EmbeddedScheme,
    pub degrees: Vec<u32>,
    pub mode: Mode,
    pub engine: SectionEngine,
    pub partitions: u64,
    pub cap: u64,
}

impl ExperimentPlan {
    pub fn new(x: EmbeddedScheme, degrees: Vec<u32>, mode: Mode, engine: SectionEngine) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::domain("at least one form degree is needed"));
        }
        if degrees.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::domain("form degrees must be non-decreasing"));
        }
        if degrees.len() > x.dim() {
            return Err(Error::domain("more forms than the dimension of X"));
        }
        Ok(ExperimentPlan { x, degrees, mode, engine, partitions: 1, cap: DEFAULT_ENUMERATION_CAP })
    }

    pub fn with_partitions(mut self, partitions: u64) -> Self {
        self.partitions = partitions.max(1);
        self
    }

    /// Parse `key=value` lines (`#` starts a comment). Keys: `x`, `gf`,
    /// `d` (comma-separated degrees), `k` (repeat a single degree),
    /// `mode` (`exhaustive` | `sample`), `count`, `seed`, `engine`
    /// (`groebner` | `pointscan`), `e_max`, `partitions`, `cap`.
    pub fn from_config(text: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("line {}: expected key=value", i + 1)))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        Self::from_map(&kv)
    }

    pub fn from_map(kv: &BTreeMap<String, String>) -> Result<Self> {
        let known = ["x", "gf", "d", "k", "mode", "count", "seed", "engine", "e_max", "partitions", "cap"];
        if let Some(bad) = kv.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::parse(format!("unknown plan key '{bad}'")));
        }
        let get = |k: &str| kv.get(k).map(String::as_str);
        let num = |k: &str| -> Result<Option<u64>> {
            get(k).map(|v| v.parse::<u64>().map_err(|_| Error::parse(format!("bad {k} '{v}'")))).transpose()
        };
        let field = FieldSpec::parse(get("gf").ok_or_else(|| Error::parse("plan needs gf"))?)?;
        let x = EmbeddedScheme::parse(get("x").ok_or_else(|| Error::parse("plan needs x"))?, &field)?;
        let mut degrees: Vec<u32> = get("d")
            .ok_or_else(|| Error::parse("plan needs d"))?
            .split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|_| Error::parse(format!("bad degree '{s}'"))))
            .collect::<Result<_>>()?;
        if let Some(k) = num("k")? {
            if degrees.len() == 1 {
                degrees = vec![degrees[0]; k as usize];
            } else if degrees.len() as u64 != k {
                return Err(Error::parse("k disagrees with the number of degrees"));
            }
        }
        let mode = match get("mode").unwrap_or("exhaustive") {
            "exhaustive" => Mode::Exhaustive,
            "sample" => Mode::Sample {
                count: num("count")?.ok_or_else(|| Error::parse("sample mode needs count"))?,
                seed: num("seed")?.ok_or_else(|| Error::parse("sample mode needs an explicit seed"))?,
            },
            m => return Err(Error::parse(format!("unknown mode '{m}'"))),
        };
        let engine = match get("engine").unwrap_or("groebner") {
            "groebner" => SectionEngine::Groebner,
            "pointscan" => SectionEngine::PointScan { e_max: num("e_max")?.unwrap_or(8) as u32 },
            e => return Err(Error::parse(format!("unknown engine '{e}'"))),
        };
        let mut plan = Self::new(x, degrees, mode, engine)?.with_partitions(num("partitions")?.unwrap_or(1));
        if let Some(c) = num("cap")? {
            plan.cap = c;
        }
        Ok(plan)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (mode, count, seed) = match self.mode {
            Mode::Exhaustive => ("exhaustive", None, None),
            Mode::Sample { count, seed } => ("sample", Some(count), Some(seed)),
        };
        let (engine, e_max) = match self.engine {
            SectionEngine::Groebner => ("groebner", None),
            SectionEngine::PointScan { e_max } => ("pointscan", Some(e_max)),
        };
        serde_json::json!({
            "x": self.x.to_string(),
            "gf": self.x.field().name(),
            "d": self.degrees,
            "mode": mode,
            "count": count,
            "seed": seed,
            "engine": engine,
            "e_max": e_max,
            "partitions": self.partitions,
            "cap": self.cap,
        })
    }
}

/// Verdict counts, merged by addition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally([u64; 4]);

impl Tally {
    fn slot(v: SectionVerdict) -> usize {
        SectionVerdict::ALL.iter().position(|&w| w == v).unwrap()
    }

    pub fn add(&mut self, v: SectionVerdict) {
        self.0[Self::slot(v)] += 1;
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        for i in 0..4 {
            self.0[i] += other.0[i];
        }
        self
    }

    pub fn get(&self, v: SectionVerdict) -> u64 {
        self.0[Self::slot(v)]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

impl Serialize for Tally {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<&str, u64> = SectionVerdict::ALL.iter().map(|&v| (v.as_str(), self.get(v))).collect();
        m.serialize(s)
    }
}

/// Outcome of [`run_fraction`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub total: u64,
    pub counts: Tally,
    /// `#smooth / total`; the exact fraction for exhaustive runs.
    pub fraction: BigRational,
    pub exhaustive: bool,
    /// Exhaustive and decided for every tuple.
    pub exact: bool,
}

impl ExperimentResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "total": self.total,
            "counts": self.counts,
            "fraction": self.fraction.to_string(),
            "fraction_f64": self.fraction.to_f64(),
            "exhaustive": self.exhaustive,
            "exact": self.exact,
        })
    }
}

impl fmt::Display for ExperimentResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} of {} smooth ({})", self.counts.get(SectionVerdict::SmoothOfExpectedDim), self.total, self.fraction)
    }
}

struct Decider {
    engine: SectionEngine,
    scanner: Option<PointScanner>,
}

impl Decider {
    fn new(plan: &ExperimentPlan) -> Self {
        let scanner = match plan.engine {
            SectionEngine::PointScan { .. } => Some(PointScanner::new(plan.x.field(), plan.x.ambient_r())),
            SectionEngine::Groebner => None,
        };
        Decider { engine: plan.engine, scanner }
    }

    fn decide(&self, x: &EmbeddedScheme, fs: &FormTuple) -> Result<SectionVerdict> {
        match (&self.scanner, self.engine) {
            (Some(s), SectionEngine::PointScan { e_max }) => s.decide(x, fs, e_max),
            _ => section_decide(x, fs, self.engine),
        }
    }
}

/// Classify every tuple (or a seeded sample) and count verdicts.
pub fn run_fraction(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    let x = &plan.x;
    let decider = Decider::new(plan);
    let parts = plan.partitions.max(1);
    let tally = match plan.mode {
        Mode::Exhaustive => {
            let space = FormSpace::new(x.field(), x.nvars(), &plan.degrees, plan.cap)?;
            let tallies: Vec<Result<Tally>> = (0..parts)
                .into_par_iter()
                .map(|i| {
                    let mut t = Tally::default();
                    for fs in space.iter_range(space.partition(i, parts)?) {
                        t.add(decider.decide(x, &fs)?);
                    }
                    Ok(t)
                })
                .collect();
            tallies.into_iter().try_fold(Tally::default(), |acc, t| Ok::<_, Error>(acc.merge(t?)))?
        }
        Mode::Sample { count, seed } => {
            if count == 0 {
                return Err(Error::domain("empty sample"));
            }
            let tallies: Vec<Result<Tally>> = (0..parts)
                .into_par_iter()
                .map(|i| {
                    let lo = (count as u128 * i as u128 / parts as u128) as u64;
                    let hi = (count as u128 * (i + 1) as u128 / parts as u128) as u64;
                    let mut t = Tally::default();
                    for j in lo..hi {
                        let fs = sample_tuple(plan, seed, j)?;
                        t.add(decider.decide(x, &fs)?);
                    }
                    Ok(t)
                })
                .collect();
            tallies.into_iter().try_fold(Tally::default(), |acc, t| Ok::<_, Error>(acc.merge(t?)))?
        }
    };
    let total = tally.total();
    let smooth = tally.get(SectionVerdict::SmoothOfExpectedDim);
    let exhaustive = plan.mode == Mode::Exhaustive;
    Ok(ExperimentResult {
        total,
        counts: tally,
        fraction: BigRational::new(BigInt::from(smooth), BigInt::from(total)),
        exhaustive,
        exact: exhaustive && tally.get(SectionVerdict::Inconclusive) == 0,
    })
}

fn sample_tuple(plan: &ExperimentPlan, seed: u64, j: u64) -> Result<FormTuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(j);
    let x = &plan.x;
    let forms = plan
        .degrees
        .iter()
        .map(|&d| sample_form(x.field(), x.nvars(), d, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    FormTuple::new(forms)
}

/// Hoeffding interval `estimate ± sqrt(ln(2/α) / (2 count))`, clamped to `[0, 1]`.
pub fn sample_ci(result: &ExperimentResult, alpha: f64) -> Result<(f64, f64)> {
    if result.exhaustive {
        return Err(Error::domain("confidence intervals apply to sampled runs only"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain("alpha must lie in (0, 1]"));
    }
    let radius = hoeffding_radius(result.total, alpha);
    let est = result.fraction.to_f64().unwrap_or(0.0);
    Ok(((est - radius).max(0.0), (est + radius).min(1.0)))
}

pub fn hoeffding_radius(count: u64, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * count as f64)).sqrt()
}

/// Certified comparison of an exact fraction with the Euler product.
#[derive(Clone, Debug)]
pub struct BkReport {
    pub result: ExperimentResult,
    pub euler_product: Enclosure,
    pub error_bound: Enclosure,
    /// `|fraction - product|`.
    pub deviation: Enclosure,
    /// `error_bound - deviation`.
    pub margin: Enclosure,
    pub verdict: Verdict,
    pub bits: u32,
}

impl BkReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "result": self.result.to_json(),
            "euler_product": self.euler_product.to_json(),
            "error_bound": self.error_bound.to_json(),
            "deviation": self.deviation.to_json(),
            "margin": self.margin.to_json(),
            "verdict": self.verdict,
            "bits": self.bits,
        })
    }
}

/// Closed-point source for `X`: exact for projective space, otherwise a
/// census up to the largest degree whose ambient scan fits the point cap.
pub fn zeta_source_for(x: &EmbeddedScheme, e_cutoff: u32) -> Result<ZetaSource> {
    let q = x.field().q() as u64;
    if x.defining().is_empty() {
        return Ok(ZetaSource::Model(WeilModel::projective_space(x.ambient_r() as u32, q)?));
    }
    let mut e_max = 1;
    while e_max < e_cutoff
        && (q as u128)
            .checked_pow(e_max + 1)
            .and_then(|bq| u64::try_from(bq).ok())
            .and_then(|bq| count_projective_points(x.ambient_r(), bq))
            .is_some_and(|c| c <= DEFAULT_CENSUS_CAP)
    {
        e_max += 1;
    }
    Ok(ZetaSource::Census(census(x, e_max)?))
}

/// Run an exhaustive plan and certify `|fraction - P| <= E`.
pub fn verify_bk(plan: &ExperimentPlan, e_cutoff: u32, bits: u32) -> Result<BkReport> {
    if plan.mode != Mode::Exhaustive {
        return Err(Error::domain("the error-term check needs an exhaustive plan"));
    }
    let result = run_fraction(plan)?;
    if !result.exact {
        return Err(Error::domain("pointscan left tuples undecided; the fraction is not exact"));
    }
    let x = &plan.x;
    let source = zeta_source_for(x, e_cutoff)?;
    verify_bk_with(plan, result, &source, e_cutoff, bits)
}

/// As [`verify_bk`] with a precomputed result and closed-point source.
pub fn verify_bk_with(
    plan: &ExperimentPlan,
    result: ExperimentResult,
    source: &ZetaSource,
    e_cutoff: u32,
    bits: u32,
) -> Result<BkReport> {
    let x = &plan.x;
    let (n, k) = (x.dim() as u32, plan.degrees.len() as u32);
    let q = x.field().q() as u64;
    let p = x.field().p() as u64;
    let d1 = *plan.degrees.first().unwrap() as u64;
    let dk = *plan.degrees.last().unwrap() as u64;
    let mut last = None;
    let (verdict, used) = certify_adaptive(bits, 4 * bits.max(64), |b| {
        let euler = euler_product_enclosure(source, n, k, e_cutoff, b)?;
        let err = bk_error_bound(d1, dk, n, k, q, p, x.ambient_r() as u32, &BigUint::from(x.degree()), b)?;
        let frac = Enclosure::from_rational(&result.fraction, b);
        let dev = frac.sub(&euler).abs();
        let v = certify_compare(&dev, &err, Relation::Le);
        last = Some((euler, err.clone(), dev.clone(), err.sub(&dev)));
        Ok(v)
    })?;
    let (euler_product, error_bound, deviation, margin) = last.unwrap();
    Ok(BkReport { result, euler_product, error_bound, deviation, margin, verdict, bits: used })
}

/// Smooth fraction as a float, for display.
pub fn fraction_f64(r: &BigRational) -> f64 {
    if r.denom().is_zero() {
        return f64::NAN;
    }
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(q: u64) -> EmbeddedScheme {
        EmbeddedScheme::projective_space(&FieldSpec::of_order(q).unwrap(), 2).unwrap()
    }

    #[test]
    fn lines_in_the_plane() {
        let plan = ExperimentPlan::new(plane(2), vec![1], Mode::Exhaustive, SectionEngine::Groebner).unwrap();
        let r = run_fraction(&plan).unwrap();
        assert_eq!(r.fraction, BigRational::new(7.into(), 8.into()));
        assert_eq!(r.counts.get(SectionVerdict::WrongDimension), 1);
        assert!(r.exact);
    }

    #[test]
    fn partitions_do_not_change_tallies() {
        let base = ExperimentPlan::new(plane(2), vec![2], Mode::Exhaustive, SectionEngine::Groebner).unwrap();
        let a = run_fraction(&base).unwrap();
        let b = run_fraction(&base.clone().with_partitions(7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total, 64);
        assert_eq!(a.counts.get(SectionVerdict::SmoothOfExpectedDim), 28);
    }

    #[test]
    fn sampling_is_seeded() {
        let mode = Mode::Sample { count: 200, seed: 11 };
        let plan = ExperimentPlan::new(plane(2), vec![2], mode, SectionEngine::Groebner).unwrap();
        let a = run_fraction(&plan).unwrap();
        let b = run_fraction(&plan.clone().with_partitions(5)).unwrap();
        assert_eq!(a, b);
        assert!(!a.exhaustive);
        let empty = ExperimentPlan::new(plane(2), vec![2], Mode::Sample { count: 0, seed: 1 }, SectionEngine::Groebner)
            .unwrap();
        assert!(run_fraction(&empty).is_err());
    }

    #[test]
    fn hoeffding() {
        assert!((hoeffding_radius(10_000, 0.05) - 0.01358).abs() < 1e-4);
        assert!((hoeffding_radius(1, 1.0) - (2f64.ln() / 2.0).sqrt()).abs() < 1e-12);
        let r = ExperimentResult {
            total: 10_000,
            counts: Tally::default(),
            fraction: BigRational::zero(),
            exhaustive: false,
            exact: false,
        };
        assert_eq!(sample_ci(&r, 0.05).unwrap().0, 0.0);
        let ex = ExperimentResult { exhaustive: true, ..r };
        assert!(sample_ci(&ex, 0.05).is_err());
    }

    #[test]
    fn bk_on_plane_conics_over_f3() {
        let plan = ExperimentPlan::new(plane(3), vec![2], Mode::Exhaustive, SectionEngine::Groebner)
            .unwrap()
            .with_partitions(4);
        let rep = verify_bk(&plan, 20, 64).unwrap();
        assert_eq!(rep.result.total, 729);
        assert_eq!(rep.verdict, Verdict::Holds);
        assert!(rep.margin.is_positive());
    }

    #[test]
    fn config_round_trip() {
        let text = "# conics\nx = pn:2\ngf = 2\nd = 2\nmode = sample\ncount = 50\nseed = 3\nengine = pointscan\ne_max = 4\npartitions = 2\n";
        let plan = ExperimentPlan::from_config(text).unwrap();
        assert_eq!(plan.mode, Mode::Sample { count: 50, seed: 3 });
        assert_eq!(plan.engine, SectionEngine::PointScan { e_max: 4 });
        assert_eq!(plan.partitions, 2);
        assert!(ExperimentPlan::from_config("x = pn:2\ngf = 2\nd = 2\nmode = sample\ncount = 5\n").is_err());
        assert!(ExperimentPlan::from_config("x = pn:2\ngf = 2\nd = 2\ncolour = red\n").is_err());
    }
}
