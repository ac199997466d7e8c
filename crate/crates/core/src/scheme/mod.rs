//! Projective schemes over `F_q`: point enumeration, closed-point
//! censuses, and deciders for smoothness of hypersurface sections.

mod census;
mod points;
mod section;

use std::fmt;

pub use census::{census, census_capped, mobius, ClosedPointCensus, DEFAULT_CENSUS_CAP};
pub use points::{
    count_projective_points, for_each_point, projective_points, projective_points_capped, DEFAULT_POINT_CAP,
};
pub use section::{
    jacobian_minors, jacobian_rank_at, section_decide, section_decide_groebner, PointScanner, SectionEngine,
    SectionVerdict, DEFAULT_SCAN_LEVELS,
};

use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::polyring::HomogeneousForm;

/// `X ⊂ P^r` cut out by `defining`, with its declared dimension and degree.
#[derive(Clone, Debug)]
pub struct EmbeddedScheme {
    r: usize,
    field: FieldSpec,
    defining: Vec<HomogeneousForm>,
    dim: usize,
    degree: u64,
    smoothness_assumed: bool,
}

impl EmbeddedScheme {
    pub fn projective_space(field: &FieldSpec, r: usize) -> Result<Self> {
        HomogeneousForm::zero(field, r + 1, 0)?;
        Ok(EmbeddedScheme { r, field: field.clone(), defining: Vec::new(), dim: r, degree: 1, smoothness_assumed: true })
    }

    /// Complete intersection of `forms` in `P^r`, assumed smooth, with
    /// Bezout degree.
    pub fn complete_intersection(field: &FieldSpec, r: usize, forms: Vec<HomogeneousForm>) -> Result<Self> {
        if forms.len() > r {
            return Err(Error::domain("more equations than the ambient dimension"));
        }
        let degree = forms.iter().try_fold(1u64, |acc, f| {
            if f.is_zero() || f.degree() == 0 {
                return Err(Error::domain("defining forms must be nonzero of positive degree"));
            }
            acc.checked_mul(f.degree() as u64).ok_or_else(|| Error::capacity("degree overflow"))
        })?;
        Self::new(field, r, forms.clone(), r - forms.len(), degree, true)
    }

    pub fn new(
        field: &FieldSpec,
        r: usize,
        defining: Vec<HomogeneousForm>,
        dim: usize,
        degree: u64,
        smoothness_assumed: bool,
    ) -> Result<Self> {
        for f in &defining {
            if f.field() != field || f.nvars() != r + 1 {
                return Err(Error::domain("defining form lives in a different ring"));
            }
        }
        if defining.is_empty() && (dim != r || degree != 1) {
            return Err(Error::domain("projective space has dimension r and degree 1"));
        }
        if dim > r || degree == 0 {
            return Err(Error::domain("invalid dimension or degree"));
        }
        Ok(EmbeddedScheme { r, field: field.clone(), defining, dim, degree, smoothness_assumed })
    }

    /// Parse `pn:<r>` or `ci:<r>;<form>;<form>;...`.
    pub fn parse(s: &str, field: &FieldSpec) -> Result<Self> {
        let s = s.trim();
        if let Some(r) = s.strip_prefix("pn:") {
            let r: usize = r.trim().parse().map_err(|_| Error::parse(format!("bad scheme '{s}'")))?;
            return Self::projective_space(field, r);
        }
        if let Some(body) = s.strip_prefix("ci:") {
            let mut parts = body.split(';');
            let r: usize = parts
                .next()
                .and_then(|x| x.trim().parse().ok())
                .ok_or_else(|| Error::parse(format!("bad scheme '{s}'")))?;
            let forms = parts
                .filter(|p| !p.trim().is_empty())
                .map(|p| HomogeneousForm::parse(field, r + 1, p))
                .collect::<Result<Vec<_>>>()?;
            return Self::complete_intersection(field, r, forms);
        }
        Err(Error::parse(format!("unknown scheme '{s}'; expected pn:<r> or ci:<r>;<form>;...")))
    }

    pub fn ambient_r(&self) -> usize {
        self.r
    }

    pub fn nvars(&self) -> usize {
        self.r + 1
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn defining(&self) -> &[HomogeneousForm] {
        &self.defining
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn smoothness_assumed(&self) -> bool {
        self.smoothness_assumed
    }
}

impl fmt::Display for EmbeddedScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.defining.is_empty() {
            write!(f, "pn:{}", self.r)
        } else {
            write!(f, "ci:{}", self.r)?;
            for g in &self.defining {
                write!(f, ";{g}")?;
            }
            Ok(())
        }
    }
}
