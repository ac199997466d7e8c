use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bounds::l_fraction;
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::groebner::{buchberger, Ideal};
use crate::polyring::HomogeneousForm;
use crate::rigor::{certify_adaptive, certify_compare, Enclosure, Relation, Verdict};
use crate::zeta::{euler_product_enclosure, ln_zeta_enclosure, WeilModel, ZetaQuery, ZetaSource};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// `1 - Σ a_i <= Π (1 - a_i) < 1` on random rational sequences.
    Lemma33,
    /// Lower bounds for `L(q^t, n, k)`.
    Lemma34,
    /// `ζ_X(n + 1/2)^{-1}` below the Euler product on fixtures.
    Prop32,
    /// `HF(d) >= d + 1` on curve ideals.
    Lemma52,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Lemma33, Suite::Lemma34, Suite::Prop32, Suite::Lemma52];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Lemma33 => "lemma33",
            Suite::Lemma34 => "lemma34",
            Suite::Prop32 => "prop32",
            Suite::Lemma52 => "lemma52",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::parse(format!("unknown suite '{s}'; expected lemma33, lemma34, prop32 or lemma52")))
    }
}

/// A curve ideal for the Hilbert-function suite.
#[derive(Clone, Debug)]
pub struct CurveFixture {
    pub name: String,
    pub field: FieldSpec,
    pub nvars: usize,
    pub generators: Vec<String>,
    /// Known closed form `HF(d) = a d + b` for `d >= 1`.
    pub linear_hf: Option<(u64, u64)>,
}

impl CurveFixture {
    pub fn new(name: &str, q: u64, nvars: usize, generators: &[&str], linear_hf: Option<(u64, u64)>) -> Result<Self> {
        Ok(CurveFixture {
            name: name.into(),
            field: FieldSpec::of_order(q)?,
            nvars,
            generators: generators.iter().map(|s| s.to_string()).collect(),
            linear_hf,
        })
    }

    pub fn defaults() -> Vec<CurveFixture> {
        let twisted = ["x0*x2-x1^2", "x1*x3-x2^2", "x0*x3-x1*x2"];
        vec![
            CurveFixture::new("twisted cubic / F_2", 2, 4, &twisted, Some((3, 1))),
            CurveFixture::new("twisted cubic / F_3", 3, 4, &twisted, Some((3, 1))),
            CurveFixture::new("line in P^3 / F_2", 2, 4, &["x2", "x3"], Some((1, 1))),
            CurveFixture::new("conic / F_3", 3, 3, &["x0^2+x1^2-x2^2"], Some((2, 1))),
            CurveFixture::new("Fermat cubic / F_2", 2, 3, &["x0^3+x1^3+x2^3"], Some((3, 0))),
            CurveFixture::new("quartic in P^3 / F_3", 3, 4, &["x0^2+x1^2+x2^2+x3^2", "x0*x1-x2*x3"], Some((4, 0))),
            CurveFixture::new("rational quartic / F_2", 2, 4, &["x0*x3-x1*x2", "x1^3-x0^2*x2", "x2^3-x1*x3^2", "x0*x2^2-x1^2*x3"], None),
        ]
        .into_iter()
        .collect::<Result<_>>()
        .expect("fixture fields are valid")
    }
}

#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub seed: u64,
    pub sequences: u64,
    pub max_len: u32,
    pub qmax: u64,
    pub nmax: u32,
    pub tmax: u32,
    pub e_cutoff: u32,
    pub bits: u32,
    pub max_bits: u32,
    pub hf_max: u32,
    pub curves: Vec<CurveFixture>,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            seed: 0x5eed,
            sequences: 10_000,
            max_len: 20,
            qmax: 9,
            nmax: 6,
            tmax: 6,
            e_cutoff: 20,
            bits: 128,
            max_bits: 256,
            hf_max: 10,
            curves: CurveFixture::defaults(),
        }
    }
}

/// Outcome of a verifier suite. A suite stops at its first violation.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: u64,
    pub counterexample: Option<Value>,
    pub inconclusive: Vec<Value>,
    pub max_bits_used: u32,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport { suite, cases: 0, counterexample: None, inconclusive: Vec::new(), max_bits_used: 0 }
    }

    pub fn passed(&self) -> bool {
        self.counterexample.is_none() && self.inconclusive.is_empty()
    }

    /// Record a certified case; returns `false` once a violation halts the suite.
    fn record(&mut self, verdict: Verdict, bits: u32, case: Value) -> bool {
        self.cases += 1;
        self.max_bits_used = self.max_bits_used.max(bits);
        match verdict {
            Verdict::Holds => true,
            Verdict::Inconclusive => {
                self.inconclusive.push(case);
                true
            }
            Verdict::Fails => {
                self.counterexample = Some(case);
                false
            }
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.as_str(),
            "passed": self.passed(),
            "cases": self.cases,
            "counterexample": self.counterexample,
            "inconclusive": self.inconclusive,
            "max_bits_used": self.max_bits_used,
        })
    }
}

pub fn verify_lemma_suite(which: Suite, params: &SuiteParams) -> Result<SuiteReport> {
    match which {
        Suite::Lemma33 => lemma33(params),
        Suite::Lemma34 => lemma34(params),
        Suite::Prop32 => prop32(params),
        Suite::Lemma52 => lemma52(params),
    }
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn product_bounds(a: &[BigRational]) -> Verdict {
    let one = BigRational::one();
    let sum: BigRational = a.iter().sum();
    let prod = a.iter().fold(one.clone(), |acc, x| acc * (&one - x));
    if one.clone() - sum <= prod && prod < one {
        Verdict::Holds
    } else {
        Verdict::Fails
    }
}

fn lemma33(p: &SuiteParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Lemma33);
    let half = vec![ratio(1, 2), ratio(1, 2)];
    if !rep.record(product_bounds(&half), 0, json!(["1/2", "1/2"])) {
        return Ok(rep);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    for _ in 0..p.sequences {
        let t = rng.gen_range(1..=p.max_len.max(1));
        let a: Vec<BigRational> = (0..t)
            .map(|_| {
                let den = rng.gen_range(2..=1u64 << 20);
                ratio(rng.gen_range(1..den), den)
            })
            .collect();
        let case = || json!(a.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        if !rep.record(product_bounds(&a), 0, case()) {
            break;
        }
    }
    Ok(rep)
}

/// `1 - Q^{-(n-k+1/2)}` with `Q = q^t`, halved when `q = 2, t = 1`.
fn lemma34_lhs(q: u64, t: u32, n: u32, k: u32, bits: u32) -> Result<Enclosure> {
    let big_q = BigInt::from(q).pow(t);
    let w = bits + 16;
    let root = Enclosure::from_int(big_q.clone(), w).sqrt()?;
    let tail = root.mul(&Enclosure::from_int(big_q.pow(n - k), w)).recip()?;
    let v = Enclosure::one(w).sub(&tail);
    Ok(if q == 2 && t == 1 { v.mul_pow2(-1) } else { v }.with_bits(bits))
}

fn lemma34(p: &SuiteParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Lemma34);
    for q in [2u64, 3, 4, 5, 7, 9].into_iter().filter(|&q| q <= p.qmax) {
        for t in 1..=p.tmax {
            for n in 2..=p.nmax {
                for k in 1..n {
                    let l = l_fraction(&BigInt::from(q).pow(t), n, k)?;
                    let (v, bits) = certify_adaptive(p.bits, p.max_bits, |b| {
                        Ok(certify_compare(&lemma34_lhs(q, t, n, k, b)?, &Enclosure::from_rational(&l, b), Relation::Le))
                    })?;
                    let case = json!({ "q": q, "t": t, "n": n, "k": k, "l": l.to_string() });
                    if !rep.record(v, bits, case) {
                        return Ok(rep);
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// The fixtures certified by the Euler-product suite.
pub fn prop32_fixtures() -> Result<Vec<(&'static str, WeilModel)>> {
    let e = WeilModel::elliptic(0, 3)?;
    Ok(vec![
        ("P^2/F_3", WeilModel::projective_space(2, 3)?),
        ("P^3/F_3", WeilModel::projective_space(3, 3)?),
        ("E^2/F_3 (a=0)", WeilModel::product(vec![e.clone(), e])?),
        ("P^2/F_2", WeilModel::projective_space(2, 2)?),
    ])
}

/// `2^{-#X(F_2)} ζ_X(n+1/2)^{-1}` (unweakened for `q >= 3`) against the
/// lower end of the Euler product.
pub fn prop32_case(model: &WeilModel, k: u32, e_cutoff: u32, bits: u32) -> Result<(Enclosure, Enclosure, Verdict)> {
    let source = ZetaSource::Model(model.clone());
    let n = model.dim();
    let mut query = ZetaQuery::half_past(source.clone());
    query.e_cutoff = e_cutoff;
    let mut lhs = ln_zeta_enclosure(&query, bits)?.neg().exp();
    if model.q() == 2 {
        let n1 = model.point_count(1);
        let shift = i64::try_from(n1).map_err(|_| Error::capacity("#X(F_2) too large"))?;
        lhs = lhs.mul_pow2(-shift);
    }
    let rhs = euler_product_enclosure(&source, n, k, e_cutoff, bits)?;
    let v = certify_compare(&lhs, &rhs, Relation::Le);
    Ok((lhs, rhs, v))
}

fn prop32(p: &SuiteParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Prop32);
    for (name, model) in prop32_fixtures()? {
        for k in 1..model.dim() {
            let mut last = None;
            let (v, bits) = certify_adaptive(p.bits, p.max_bits, |b| {
                let (l, r, v) = prop32_case(&model, k, p.e_cutoff, b)?;
                last = Some((l, r));
                Ok(v)
            })?;
            let (l, r) = last.unwrap();
            let case = json!({ "x": name, "k": k, "lhs": l.to_json(), "euler_product": r.to_json() });
            if !rep.record(v, bits, case) {
                return Ok(rep);
            }
        }
    }
    Ok(rep)
}

fn lemma52(p: &SuiteParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Lemma52);
    for c in &p.curves {
        let gens = c
            .generators
            .iter()
            .map(|g| HomogeneousForm::parse(&c.field, c.nvars, g))
            .collect::<Result<Vec<_>>>()?;
        let gb = buchberger(&Ideal::new(&c.field, c.nvars, gens)?)?;
        if gb.projective_dimension() != 1 {
            return Err(Error::domain(format!("fixture '{}' is not a curve", c.name)));
        }
        for d in 0..=p.hf_max {
            let hf = gb.hilbert_value(d);
            let closed = c.linear_hf.filter(|_| d >= 1).map(|(a, b)| a * d as u64 + b);
            let ok = hf >= d as u64 + 1 && closed.is_none_or(|v| v == hf);
            let v = if ok { Verdict::Holds } else { Verdict::Fails };
            let case = json!({ "curve": c.name, "d": d, "hf": hf, "expected": closed });
            if !rep.record(v, 0, case) {
                return Ok(rep);
            }
        }
    }
    Ok(rep)
}
