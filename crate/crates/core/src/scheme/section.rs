use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::points::{count_projective_points, for_each_point};
use super::EmbeddedScheme;
use crate::error::{Error, Result};
use crate::gf::{Code, ExtensionTower, FieldSpec};
use crate::groebner::{buchberger, GroebnerBasis, Ideal};
use crate::polyring::{CompiledForm, FormTuple, HomogeneousForm};

/// Default number of tower levels scanned by the point engine.
pub const DEFAULT_SCAN_LEVELS: u32 = 6;
const SCAN_POINT_CAP: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionVerdict {
    SmoothOfExpectedDim,
    WrongDimension,
    Singular,
    Inconclusive,
}

impl SectionVerdict {
    pub const ALL: [SectionVerdict; 4] = [
        SectionVerdict::SmoothOfExpectedDim,
        SectionVerdict::WrongDimension,
        SectionVerdict::Singular,
        SectionVerdict::Inconclusive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SectionVerdict::SmoothOfExpectedDim => "smooth_of_expected_dim",
            SectionVerdict::WrongDimension => "wrong_dimension",
            SectionVerdict::Singular => "singular",
            SectionVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionEngine {
    Groebner,
    PointScan { e_max: u32 },
}

fn check_inputs(x: &EmbeddedScheme, fs: &FormTuple) -> Result<()> {
    if !x.smoothness_assumed() {
        return Err(Error::domain("sections are only classified on schemes assumed smooth"));
    }
    for f in fs.forms() {
        if f.field() != x.field() || f.nvars() != x.nvars() {
            return Err(Error::domain("section forms live in a different ring than X"));
        }
    }
    if fs.len() > x.dim() {
        return Err(Error::domain("more forms than the dimension of X"));
    }
    Ok(())
}

/// `x`'s defining forms followed by `fs`.
fn combined(x: &EmbeddedScheme, fs: &FormTuple) -> Vec<HomogeneousForm> {
    x.defining().iter().chain(fs.forms()).cloned().collect()
}

fn determinant(m: &[Vec<HomogeneousForm>]) -> Result<HomogeneousForm> {
    if m.len() == 1 {
        return Ok(m[0][0].clone());
    }
    let field = m[0][0].field().clone();
    let minus = field.neg(1);
    let mut acc: Option<HomogeneousForm> = None;
    for j in 0..m.len() {
        let sub: Vec<Vec<HomogeneousForm>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, f)| f.clone()).collect())
            .collect();
        let mut term = m[0][j].mul(&determinant(&sub)?)?;
        if j % 2 == 1 {
            term = term.scale(minus);
        }
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc.expect("nonempty matrix"))
}

fn subsets(n: usize, c: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(c);
    fn rec(start: usize, n: usize, c: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == c {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, c, cur, out);
            cur.pop();
        }
    }
    rec(0, n, c, &mut cur, &mut out);
    out
}

/// All nonzero `c x c` minors of the Jacobian matrix of `gens`.
pub fn jacobian_minors(gens: &[HomogeneousForm], nvars: usize, c: usize) -> Result<Vec<HomogeneousForm>> {
    if c == 0 {
        return Ok(Vec::new());
    }
    let jac: Vec<Vec<HomogeneousForm>> = gens
        .iter()
        .map(|g| (0..nvars).map(|i| g.partial_derivative(i)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for rows in subsets(gens.len(), c) {
        for cols in subsets(nvars, c) {
            let m: Vec<Vec<HomogeneousForm>> =
                rows.iter().map(|&i| cols.iter().map(|&j| jac[i][j].clone()).collect()).collect();
            let d = determinant(&m)?;
            if !d.is_zero() {
                out.push(d);
            }
        }
    }
    Ok(out)
}

fn expected_dim(x: &EmbeddedScheme, fs: &FormTuple) -> i64 {
    x.dim() as i64 - fs.len() as i64
}

/// Exact classification by Gröbner bases; also returns the basis of the
/// singular-locus ideal when it was computed.
pub fn section_decide_groebner(x: &EmbeddedScheme, fs: &FormTuple) -> Result<(SectionVerdict, Option<GroebnerBasis>)> {
    check_inputs(x, fs)?;
    let field = x.field();
    let nvars = x.nvars();
    let gens = combined(x, fs);
    let expected = expected_dim(x, fs);
    let gb = buchberger(&Ideal::new(field, nvars, gens.clone())?)?;
    if gb.projective_dimension() != expected {
        return Ok((SectionVerdict::WrongDimension, Some(gb)));
    }
    let c = x.ambient_r() - expected as usize;
    let mut jgens = gb.elements();
    jgens.extend(jacobian_minors(&gens, nvars, c)?);
    let jgb = buchberger(&Ideal::new(field, nvars, jgens)?)?;
    let verdict = if jgb.projective_empty() {
        SectionVerdict::SmoothOfExpectedDim
    } else {
        SectionVerdict::Singular
    };
    Ok((verdict, Some(jgb)))
}

/// Classify `X ∩ V(fs)`.
pub fn section_decide(x: &EmbeddedScheme, fs: &FormTuple, engine: SectionEngine) -> Result<SectionVerdict> {
    match engine {
        SectionEngine::Groebner => Ok(section_decide_groebner(x, fs)?.0),
        SectionEngine::PointScan { e_max } => PointScanner::new(x.field(), x.ambient_r()).decide(x, fs, e_max),
    }
}

fn rank(mut rows: Vec<Vec<Code>>, field: &FieldSpec) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = field.inv(rows[rank][col]).expect("nonzero pivot");
        for i in 0..rows.len() {
            if i != rank && rows[i][col] != 0 {
                let factor = field.mul(rows[i][col], inv);
                for j in col..ncols {
                    let v = field.mul(factor, rows[rank][j]);
                    rows[i][j] = field.sub(rows[i][j], v);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of the Jacobian of `X`'s defining forms and `fs` at a point of
/// `F_{q^e}` lying on the section.
pub fn jacobian_rank_at(x: &EmbeddedScheme, fs: &FormTuple, e: u32, point: &[Code]) -> Result<usize> {
    check_inputs(x, fs)?;
    let tower = ExtensionTower::new(x.field());
    let level = tower.level(e)?;
    let gens = combined(x, fs);
    for g in &gens {
        if g.evaluate_in(&tower, e, point)? != 0 {
            return Err(Error::domain("point does not lie on the section"));
        }
    }
    let rows = gens
        .iter()
        .map(|g| {
            (0..x.nvars())
                .map(|i| g.partial_derivative(i)?.evaluate_in(&tower, e, point))
                .collect::<Result<Vec<Code>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rank(rows, &level))
}

struct Level {
    field: FieldSpec,
    embed: Vec<Code>,
    /// Flattened normalized points, `nvars` codes each.
    points: Vec<Code>,
}

/// Point-scanning classifier with cached point lists per tower level.
///
/// Sound in one direction only: `singular` and `wrong_dimension` come with
/// witnesses, while a scan that finds nothing answers `inconclusive`.
#[derive(Clone)]
pub struct PointScanner {
    tower: ExtensionTower,
    r: usize,
    levels: Arc<Mutex<HashMap<u32, Arc<Level>>>>,
}

impl PointScanner {
    pub fn new(field: &FieldSpec, r: usize) -> Self {
        PointScanner { tower: ExtensionTower::new(field), r, levels: Arc::new(Mutex::new(HashMap::new())) }
    }

    fn level(&self, e: u32) -> Result<Arc<Level>> {
        if let Some(l) = self.levels.lock().unwrap().get(&e) {
            return Ok(l.clone());
        }
        let field = self.tower.level(e)?;
        let count = count_projective_points(self.r, field.q() as u64)
            .filter(|&c| c <= SCAN_POINT_CAP)
            .ok_or_else(|| Error::capacity(format!("P^{}({}) is too large to scan", self.r, field.name())))?;
        let mut points = Vec::with_capacity(count as usize * (self.r + 1));
        for_each_point(self.r, &field, |p| {
            points.extend_from_slice(p);
            true
        });
        let level = Arc::new(Level { embed: self.tower.embedding(e)?, field, points });
        self.levels.lock().unwrap().insert(e, level.clone());
        Ok(level)
    }

    /// Scan levels `1..=e_max` for a witness.
    pub fn decide(&self, x: &EmbeddedScheme, fs: &FormTuple, e_max: u32) -> Result<SectionVerdict> {
        check_inputs(x, fs)?;
        if x.ambient_r() != self.r || x.field() != self.tower.base() {
            return Err(Error::domain("scanner was built for a different ambient space"));
        }
        // A vanishing form leaves a section of dimension at least n - k + 1.
        if fs.forms().iter().any(|f| f.is_zero()) {
            return Ok(SectionVerdict::WrongDimension);
        }
        // With one nonzero form on projective space the dimension is r - 1,
        // so a rank-deficient point is a singularity of the right-dimensional
        // section. Otherwise a rank-deficient point alone cannot tell
        // singular from wrong-dimensional.
        let dimension_known = x.defining().is_empty() && fs.len() == 1;
        let expected = expected_dim(x, fs);
        let c = x.ambient_r() - expected as usize;
        let gens = combined(x, fs);
        let nvars = x.nvars();
        let partials: Vec<Vec<HomogeneousForm>> = gens
            .iter()
            .map(|g| (0..nvars).map(|i| g.partial_derivative(i)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let section_degree = fs
            .forms()
            .iter()
            .fold(x.degree() as u128, |acc, f| acc.saturating_mul(f.degree() as u128));
        let mut saw_deficient = false;
        for e in 1..=e_max {
            let level = self.level(e)?;
            let lf = &level.field;
            let cg: Vec<CompiledForm> = gens.iter().map(|g| g.compile(lf, Some(&level.embed))).collect();
            let cp: Vec<Vec<CompiledForm>> = partials
                .iter()
                .map(|row| row.iter().map(|p| p.compile(lf, Some(&level.embed))).collect())
                .collect();
            let mut on_section: u128 = 0;
            for p in level.points.chunks_exact(nvars) {
                if !cg.iter().all(|g| g.eval(p) == 0) {
                    continue;
                }
                on_section += 1;
                let rows: Vec<Vec<Code>> = cp.iter().map(|row| row.iter().map(|d| d.eval(p)).collect()).collect();
                if rank(rows, lf) < c {
                    if dimension_known {
                        return Ok(SectionVerdict::Singular);
                    }
                    saw_deficient = true;
                }
            }
            // An equidimensional set of dimension m and degree D has at most
            // D * #P^m(F_Q) rational points.
            if expected >= 0 {
                let bound = count_projective_points(expected as usize, lf.q() as u64)
                    .map_or(u128::MAX, |v| section_degree.saturating_mul(v as u128));
                if on_section > bound {
                    return Ok(SectionVerdict::WrongDimension);
                }
            }
        }
        let _ = saw_deficient;
        Ok(SectionVerdict::Inconclusive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(form: &str) -> (EmbeddedScheme, FormTuple) {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let x = EmbeddedScheme::projective_space(&f2, 2).unwrap();
        let f = HomogeneousForm::parse_with_degree(&f2, 3, form, Some(2)).unwrap_or_else(|_| {
            HomogeneousForm::parse(&f2, 3, form).unwrap()
        });
        (x, FormTuple::new(vec![f]).unwrap())
    }

    #[test]
    fn plane_examples_groebner() {
        let d = |s| {
            let (x, fs) = setup(s);
            section_decide(&x, &fs, SectionEngine::Groebner).unwrap()
        };
        assert_eq!(d("x0"), SectionVerdict::SmoothOfExpectedDim);
        assert_eq!(d("x0^2"), SectionVerdict::Singular);
        assert_eq!(d("0"), SectionVerdict::WrongDimension);
        assert_eq!(d("x0*x1+x2^2"), SectionVerdict::SmoothOfExpectedDim);
        assert_eq!(d("x0*x1"), SectionVerdict::Singular);
    }

    #[test]
    fn plane_examples_pointscan() {
        let d = |s| {
            let (x, fs) = setup(s);
            section_decide(&x, &fs, SectionEngine::PointScan { e_max: 4 }).unwrap()
        };
        assert_eq!(d("x0^2"), SectionVerdict::Singular);
        assert_eq!(d("0"), SectionVerdict::WrongDimension);
        assert_eq!(d("x0*x1+x2^2"), SectionVerdict::Inconclusive);
    }

    #[test]
    fn ranks_at_points() {
        let (x, fs) = setup("x0*x1+x2^2");
        assert_eq!(jacobian_rank_at(&x, &fs, 1, &[1, 0, 0]).unwrap(), 1);
        assert!(jacobian_rank_at(&x, &fs, 1, &[1, 1, 0]).is_err());
        let (x, fs) = setup("x0^2");
        assert_eq!(jacobian_rank_at(&x, &fs, 1, &[0, 1, 1]).unwrap(), 0);
        let f2 = FieldSpec::new(2, 1).unwrap();
        let quadric = EmbeddedScheme::parse("ci:3;x0*x3+x1*x2", &f2).unwrap();
        let none = FormTuple::new(vec![]).unwrap();
        for p in super::super::projective_points(3, &f2).unwrap() {
            if quadric.defining()[0].evaluate_in(&ExtensionTower::new(&f2), 1, &p).unwrap() == 0 {
                assert_eq!(jacobian_rank_at(&quadric, &none, 1, &p).unwrap(), 1);
            }
        }
    }

    #[test]
    fn space_curve_section() {
        let f3 = FieldSpec::new(3, 1).unwrap();
        let x = EmbeddedScheme::parse("ci:3;x0*x3+2*x1*x2", &f3).unwrap();
        let plane = HomogeneousForm::parse(&f3, 4, "x0+x3").unwrap();
        let fs = FormTuple::new(vec![plane]).unwrap();
        // A plane section of a smooth quadric surface: a conic, smooth unless tangent.
        let v = section_decide(&x, &fs, SectionEngine::Groebner).unwrap();
        assert_eq!(v, SectionVerdict::SmoothOfExpectedDim);
        let tangent = HomogeneousForm::parse(&f3, 4, "x3").unwrap();
        let fs = FormTuple::new(vec![tangent]).unwrap();
        assert_eq!(section_decide(&x, &fs, SectionEngine::Groebner).unwrap(), SectionVerdict::Singular);
    }
}
