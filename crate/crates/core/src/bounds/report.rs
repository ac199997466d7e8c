use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

use super::solve::{minimal_d, BoundQuery, Certificate, Inequality, PointMode, SolveOptions, ZetaSpec};
use super::{castelnuovo_bound, constant, simple_genus_bounds, Constant, ConstantKind};
use crate::error::{Error, Result};

/// Outcome of a bound pipeline.
#[derive(Clone, Debug)]
pub struct BoundReport {
    /// `thm_b`, `general`, `simple` or `corollary`.
    pub kind: &'static str,
    pub query: Option<BoundQuery>,
    pub constant: Option<Constant>,
    pub certificate: Option<Certificate>,
    /// `deg X d^{n-1}` for curve pipelines, `deg X d^k` for sections.
    pub curve_degree: Option<BigUint>,
    pub genus_bound_rational: Option<BigRational>,
    pub genus_bound: Option<BigInt>,
    pub jacobian_dim_bound: Option<BigInt>,
    /// `D^2 + D - 2` next to the stated `D(D+1)` in the simple case.
    pub sharper_genus_bound: Option<BigUint>,
    /// The `thm_a_display` solution, for comparison with `prop41`.
    pub alternate: Option<Certificate>,
    pub notes: Vec<String>,
}

impl BoundReport {
    fn empty(kind: &'static str, query: Option<BoundQuery>) -> Self {
        BoundReport {
            kind,
            query,
            constant: None,
            certificate: None,
            curve_degree: None,
            genus_bound_rational: None,
            genus_bound: None,
            jacobian_dim_bound: None,
            sharper_genus_bound: None,
            alternate: None,
            notes: Vec::new(),
        }
    }

    pub fn minimal_d(&self) -> Option<&BigUint> {
        self.certificate.as_ref().map(|c| &c.d)
    }

    pub fn precision_bits(&self) -> u32 {
        self.certificate.as_ref().map_or(0, |c| c.bits)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let s = |x: Option<String>| x.map_or(serde_json::Value::Null, serde_json::Value::String);
        serde_json::json!({
            "kind": self.kind,
            "query": self.query.as_ref().map(|q| q.to_json()),
            "constant": self.constant.as_ref().map(|c| c.to_json()),
            "minimal_d": s(self.minimal_d().map(|d| d.to_string())),
            "certificate": self.certificate.as_ref().map(|c| c.to_json()),
            "curve_degree": s(self.curve_degree.as_ref().map(|d| d.to_string())),
            "genus_bound_rational": s(self.genus_bound_rational.as_ref().map(|g| g.to_string())),
            "genus_bound": s(self.genus_bound.as_ref().map(|g| g.to_string())),
            "jacobian_dim_bound": s(self.jacobian_dim_bound.as_ref().map(|g| g.to_string())),
            "sharper_genus_bound": s(self.sharper_genus_bound.as_ref().map(|g| g.to_string())),
            "alternate": self.alternate.as_ref().map(|c| c.to_json()),
            "precision_bits": self.precision_bits(),
            "notes": self.notes,
        })
    }
}

/// Least certified `d` for `k` sections with the sharp constant.
pub fn bound_thm_b(query: &BoundQuery, opts: &SolveOptions) -> Result<BoundReport> {
    let cert = minimal_d(Inequality::ThmB, query, opts)?;
    let mut rep = BoundReport::empty("thm_b", Some(query.clone()));
    rep.constant = Some(constant(ConstantKind::ThmB, query.r, query.q, opts.start_bits)?);
    rep.curve_degree = Some(&query.deg * cert.d.pow(query.k));
    rep.certificate = Some(cert);
    Ok(rep)
}

/// Smooth curve of bounded genus: `prop41` degree, Castelnuovo genus.
pub fn bound_general(query: &BoundQuery, opts: &SolveOptions) -> Result<BoundReport> {
    let opts = SolveOptions { d_min: Some(opts.d_min.unwrap_or(2).max(2)), ..opts.clone() };
    let cert = minimal_d(Inequality::Prop41, query, &opts)?;
    let mut rep = BoundReport::empty("general", Some(query.clone()));
    rep.constant = Some(constant(ConstantKind::ThmA, query.r, query.q, opts.start_bits)?);
    curve_genus(&mut rep, query, &cert)?;
    match minimal_d(Inequality::ThmADisplay, query, &opts) {
        Ok(alt) => {
            if alt.d != cert.d {
                rep.notes.push(format!("thm_a_display gives d = {}, prop41 gives d = {}", alt.d, cert.d));
            }
            rep.alternate = Some(alt);
        }
        Err(e) => rep.notes.push(format!("thm_a_display: {e}")),
    }
    rep.certificate = Some(cert);
    Ok(rep)
}

fn curve_genus(rep: &mut BoundReport, query: &BoundQuery, cert: &Certificate) -> Result<()> {
    let big_d = &query.deg * cert.d.pow(query.n - 1);
    let (exact, floor) = castelnuovo_bound(&big_d, query.r)?;
    rep.curve_degree = Some(big_d);
    rep.genus_bound_rational = Some(exact);
    rep.jacobian_dim_bound = Some(floor.clone());
    rep.genus_bound = Some(floor);
    Ok(())
}

/// Simple abelian varieties: any curve, genus at most `D(D+1)`.
pub fn bound_simple(query: &BoundQuery, opts: &SolveOptions) -> Result<BoundReport> {
    let cert = minimal_d(Inequality::Simple, query, opts)?;
    let (stated, sharper) = simple_genus_bounds(&query.deg, &cert.d, query.n)?;
    let mut rep = BoundReport::empty("simple", Some(query.clone()));
    rep.curve_degree = Some(&query.deg * cert.d.pow(query.n - 1));
    rep.genus_bound_rational = Some(BigRational::from_integer(stated.clone().into()));
    rep.genus_bound = Some(stated.clone().into());
    rep.jacobian_dim_bound = Some(stated.into());
    rep.sharper_genus_bound = Some(sharper);
    rep.certificate = Some(cert);
    Ok(rep)
}

/// `B_{n,q}`: a genus bound for curves whose Jacobian has `E^n` as an
/// isogeny factor, uniform over elliptic `E/F_q`.
pub fn corollary_pipeline(n: u32, q: u64, opts: &SolveOptions) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::domain("need n >= 1"));
    }
    if n == 1 {
        super::characteristic(q)?;
        let mut rep = BoundReport::empty("corollary", None);
        rep.genus_bound_rational = Some(BigRational::one());
        rep.genus_bound = Some(BigInt::one());
        rep.jacobian_dim_bound = Some(BigInt::one());
        rep.notes.push("n = 1: the elliptic curve itself".into());
        return Ok(rep);
    }
    if n > 12 {
        return Err(Error::capacity("embedding dimension 3^n - 1 too large"));
    }
    let r = 3u32.pow(n) - 1;
    let deg = BigUint::from(3u32).pow(n) * (1..=n).map(BigUint::from).product::<BigUint>();
    let query = BoundQuery::new(q, r, n, deg)?
        .with_zeta(ZetaSpec::EnUpper { n, q })
        .with_points(PointMode::WeilAvBound);
    let opts = SolveOptions { d_min: Some(2), ..opts.clone() };
    let cert = minimal_d(Inequality::ThmADisplay, &query, &opts)?;
    let mut rep = BoundReport::empty("corollary", Some(query.clone()));
    rep.constant = Some(constant(ConstantKind::ThmA, r, q, opts.start_bits)?);
    curve_genus(&mut rep, &query, &cert)?;
    rep.certificate = Some(cert);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::replay_certificate;

    #[test]
    fn simple_report() {
        let q = BoundQuery::new(2, 2, 2, 18u32.into()).unwrap();
        let rep = bound_simple(&q, &SolveOptions::default()).unwrap();
        assert_eq!(rep.minimal_d(), Some(&BigUint::from(2u32)));
        assert_eq!(rep.curve_degree, Some(36u32.into()));
        assert_eq!(rep.genus_bound, Some(1332.into()));
        assert_eq!(rep.sharper_genus_bound, Some(1330u32.into()));
    }

    #[test]
    fn corollary_small_cases() {
        let opts = SolveOptions::default();
        for q in [2, 3] {
            assert_eq!(corollary_pipeline(1, q, &opts).unwrap().genus_bound, Some(BigInt::one()));
        }
        let a = corollary_pipeline(2, 3, &opts).unwrap();
        let b = corollary_pipeline(2, 3, &opts).unwrap();
        assert!(a.genus_bound.as_ref().unwrap() > &BigInt::one());
        assert_eq!(a.to_json().to_string(), b.to_json().to_string());
        let cert = a.certificate.as_ref().unwrap();
        assert!(replay_certificate(a.query.as_ref().unwrap(), cert).unwrap());
    }
}
