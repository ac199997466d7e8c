use std::fmt;

use super::mono::{monomials, Mono, MAX_DEGREE, MAX_VARS};
use crate::error::{Error, Result};
use crate::gf::{Code, ExtensionTower, FieldElement, FieldSpec};

/// A homogeneous polynomial with terms in descending grevlex order.
#[derive(Clone, PartialEq, Eq)]
pub struct HomogeneousForm {
    field: FieldSpec,
    nvars: usize,
    degree: u32,
    terms: Vec<(Mono, Code)>,
}

fn check_ring(nvars: usize, degree: u32) -> Result<()> {
    if nvars == 0 || nvars > MAX_VARS {
        return Err(Error::capacity(format!("between 1 and {MAX_VARS} variables supported")));
    }
    if degree > MAX_DEGREE {
        return Err(Error::capacity(format!("degree above {MAX_DEGREE}")));
    }
    Ok(())
}

impl HomogeneousForm {
    pub fn zero(field: &FieldSpec, nvars: usize, degree: u32) -> Result<Self> {
        check_ring(nvars, degree)?;
        Ok(HomogeneousForm { field: field.clone(), nvars, degree, terms: Vec::new() })
    }

    /// Build from `(exponents, coefficient)` pairs; like terms are combined.
    pub fn new(field: &FieldSpec, nvars: usize, degree: u32, terms: &[(Vec<u32>, Code)]) -> Result<Self> {
        check_ring(nvars, degree)?;
        let mut raw = Vec::with_capacity(terms.len());
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::domain("exponent vector length differs from variable count"));
            }
            if exps.iter().sum::<u32>() != degree {
                return Err(Error::domain("term degree differs from form degree"));
            }
            if *c >= field.q() {
                return Err(Error::domain("coefficient code out of range"));
            }
            raw.push((Mono::from_exps(exps), *c));
        }
        Ok(Self::from_raw(field, nvars, degree, raw))
    }

    pub(crate) fn from_raw(field: &FieldSpec, nvars: usize, degree: u32, mut raw: Vec<(Mono, Code)>) -> Self {
        raw.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut terms: Vec<(Mono, Code)> = Vec::with_capacity(raw.len());
        for (m, c) in raw {
            match terms.last_mut() {
                Some(last) if last.0 == m => last.1 = field.add(last.1, c),
                _ => terms.push((m, c)),
            }
        }
        terms.retain(|t| t.1 != 0);
        HomogeneousForm { field: field.clone(), nvars, degree, terms }
    }

    /// Coefficients listed against [`monomials`]`(nvars, degree)`.
    pub fn from_coeffs(field: &FieldSpec, nvars: usize, degree: u32, coeffs: &[Code]) -> Result<Self> {
        check_ring(nvars, degree)?;
        let monos = monomials(nvars, degree);
        if coeffs.len() != monos.len() {
            return Err(Error::domain("coefficient vector length differs from dim S_d"));
        }
        let terms = monos
            .into_iter()
            .zip(coeffs.iter().copied())
            .filter(|t| t.1 != 0)
            .collect();
        Ok(HomogeneousForm { field: field.clone(), nvars, degree, terms })
    }

    pub(crate) fn from_sorted_terms(field: &FieldSpec, nvars: usize, degree: u32, terms: Vec<(Mono, Code)>) -> Self {
        HomogeneousForm { field: field.clone(), nvars, degree, terms }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &[(Mono, Code)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(exponents, coefficient)` pairs in descending grevlex order.
    pub fn term_list(&self) -> Vec<(Vec<u32>, Code)> {
        self.terms.iter().map(|(m, c)| (m.exps(self.nvars), *c)).collect()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Code {
        let m = Mono::from_exps(exps);
        self.terms.iter().find(|t| t.0 == m).map_or(0, |t| t.1)
    }

    fn same_ring(&self, other: &HomogeneousForm) -> Result<()> {
        if self.field != other.field || self.nvars != other.nvars {
            return Err(Error::domain("forms live in different rings"));
        }
        Ok(())
    }

    pub fn add(&self, other: &HomogeneousForm) -> Result<HomogeneousForm> {
        self.same_ring(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::domain("sum of forms of different degrees"));
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let raw = self.terms.iter().chain(other.terms.iter()).copied().collect();
        Ok(Self::from_raw(&self.field, self.nvars, degree, raw))
    }

    pub fn scale(&self, c: Code) -> HomogeneousForm {
        let raw = self.terms.iter().map(|&(m, a)| (m, self.field.mul(a, c))).collect();
        Self::from_raw(&self.field, self.nvars, self.degree, raw)
    }

    pub fn mul(&self, other: &HomogeneousForm) -> Result<HomogeneousForm> {
        self.same_ring(other)?;
        let degree = self.degree + other.degree;
        check_ring(self.nvars, degree)?;
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(a, x) in &self.terms {
            for &(b, y) in &other.terms {
                raw.push((a.mul(b, self.nvars), self.field.mul(x, y)));
            }
        }
        Ok(Self::from_raw(&self.field, self.nvars, degree, raw))
    }

    /// Formal partial derivative; terms whose exponent vanishes mod p drop out.
    pub fn partial_derivative(&self, var: usize) -> Result<HomogeneousForm> {
        if var >= self.nvars {
            return Err(Error::domain("variable index out of range"));
        }
        if self.degree == 0 {
            return Self::zero(&self.field, self.nvars, 0);
        }
        let dv = Mono::var(self.nvars, var);
        let terms = self
            .terms
            .iter()
            .filter_map(|&(m, c)| {
                let e = m.exp(self.nvars, var);
                let k = self.field.from_int(e as i64);
                (k != 0).then(|| (dv.quotient_of(m, self.nvars), self.field.mul(c, k)))
            })
            .collect();
        Ok(Self::from_sorted_terms(&self.field, self.nvars, self.degree - 1, terms))
    }

    /// Value at a point with coordinates in the form's own field.
    pub fn evaluate(&self, point: &[FieldElement]) -> Result<FieldElement> {
        if point.len() != self.nvars {
            return Err(Error::domain("point has the wrong number of coordinates"));
        }
        if point.iter().any(|x| x.field() != &self.field) {
            return Err(Error::domain("point coordinates lie in a different field"));
        }
        let codes: Vec<Code> = point.iter().map(|x| x.code()).collect();
        let v = self.compile(&self.field, None).eval(&codes);
        FieldElement::new(&self.field, v)
    }

    /// Value at a point of `F_{q^e}` given by codes of `tower.level(e)`.
    pub fn evaluate_in(&self, tower: &ExtensionTower, e: u32, point: &[Code]) -> Result<Code> {
        if tower.base() != &self.field {
            return Err(Error::domain("tower is not built over the form's field"));
        }
        if point.len() != self.nvars {
            return Err(Error::domain("point has the wrong number of coordinates"));
        }
        let level = tower.level(e)?;
        if point.iter().any(|&x| x >= level.q()) {
            return Err(Error::domain("coordinate code out of range"));
        }
        let embed = tower.embedding(e)?;
        Ok(self.compile(&level, Some(&embed)).eval(point))
    }

    /// Precompute an evaluator over `level`; `embed` maps coefficient codes.
    pub fn compile(&self, level: &FieldSpec, embed: Option<&[Code]>) -> CompiledForm {
        let terms = self
            .terms
            .iter()
            .map(|&(m, c)| {
                let c = embed.map_or(c, |t| t[c as usize]);
                let mut exps = [0u8; MAX_VARS];
                for (i, e) in exps.iter_mut().enumerate().take(self.nvars) {
                    *e = m.exp(self.nvars, i) as u8;
                }
                (level.log(c), exps)
            })
            .collect();
        CompiledForm { field: level.clone(), nvars: self.nvars, terms }
    }

    /// Parse `c*x0^a*x1 + ... - ...`; coefficients are integers or
    /// `(c0,c1,...)` tuples and may be omitted. `0` is the zero form of degree `degree`.
    pub fn parse(field: &FieldSpec, nvars: usize, s: &str) -> Result<Self> {
        Self::parse_with_degree(field, nvars, s, None)
    }

    /// As [`HomogeneousForm::parse`], fixing the degree (needed for zero).
    pub fn parse_with_degree(field: &FieldSpec, nvars: usize, s: &str, degree: Option<u32>) -> Result<Self> {
        check_ring(nvars, degree.unwrap_or(0))?;
        let bad = |why: &str| Error::parse(format!("form '{s}': {why}"));
        let mut raw = Vec::new();
        let mut deg = degree;
        let signed = with_minus_terms(s);
        for term in split_top(&signed, '+') {
            let term = term.trim();
            let (negate, term) = match term.strip_prefix('-') {
                Some(t) => (true, t.trim()),
                None => (false, term),
            };
            if term.is_empty() {
                return Err(bad("empty term"));
            }
            let mut coeff = 1;
            let mut exps = vec![0u32; nvars];
            for (j, factor) in split_top(term, '*').into_iter().enumerate() {
                let factor = factor.trim();
                if let Some(v) = factor.strip_prefix('x') {
                    let (idx, e) = match v.split_once('^') {
                        Some((i, e)) => (i, e.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                        None => (v, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| bad("bad variable"))?;
                    if idx >= nvars {
                        return Err(bad("variable index out of range"));
                    }
                    exps[idx] += e;
                } else if j == 0 {
                    coeff = field.parse_element(factor)?;
                } else {
                    return Err(bad("coefficient must come first"));
                }
            }
            if negate {
                coeff = field.neg(coeff);
            }
            let d: u32 = exps.iter().sum();
            if d > MAX_DEGREE {
                return Err(Error::capacity(format!("degree above {MAX_DEGREE}")));
            }
            if coeff == 0 {
                if term.trim() == "0" {
                    continue;
                }
                if deg.is_some_and(|x| x != d) {
                    return Err(bad("terms of different degrees"));
                }
                deg = Some(d);
                continue;
            }
            match deg {
                Some(x) if x != d => return Err(bad("terms of different degrees")),
                _ => deg = Some(d),
            }
            raw.push((Mono::from_exps(&exps), coeff));
        }
        let degree = deg.ok_or_else(|| bad("zero form needs an explicit degree"))?;
        Ok(Self::from_raw(field, nvars, degree, raw))
    }
}

/// Turn each top-level `a - b` into `a +-b`.
fn with_minus_terms(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 4);
    let mut depth = 0;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '-' if depth == 0 && !out.trim().is_empty() && !out.trim_end().ends_with('+') => out.push('+'),
            _ => {}
        }
        out.push(ch);
    }
    out
}

fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

impl fmt::Display for HomogeneousForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, &(m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            let mono = m.render(self.nvars);
            match (c, mono.as_str()) {
                (1, _) => write!(f, "{mono}")?,
                (_, "1") => write!(f, "{}", self.field.format(c))?,
                _ => write!(f, "{}*{mono}", self.field.format(c))?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for HomogeneousForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (deg {} over {})", self.degree, self.field)
    }
}

/// A form prepared for repeated evaluation over one field.
#[derive(Clone)]
pub struct CompiledForm {
    field: FieldSpec,
    nvars: usize,
    terms: Vec<(u32, [u8; MAX_VARS])>,
}

impl CompiledForm {
    pub fn eval(&self, point: &[Code]) -> Code {
        let f = &self.field;
        let order = f.q() - 1;
        let mut logs = [0u32; MAX_VARS];
        let mut zero = [false; MAX_VARS];
        for i in 0..self.nvars {
            if point[i] == 0 {
                zero[i] = true;
            } else {
                logs[i] = f.log(point[i]);
            }
        }
        let mut acc = 0;
        'terms: for (lc, exps) in &self.terms {
            let mut l = *lc as u64;
            for i in 0..self.nvars {
                let e = exps[i];
                if e > 0 {
                    if zero[i] {
                        continue 'terms;
                    }
                    l += e as u64 * logs[i] as u64;
                }
            }
            acc = f.add(acc, f.exp((l % order as u64) as u32));
        }
        acc
    }
}

/// Forms `f_1, ..., f_k` over one ring with non-decreasing degrees.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormTuple {
    forms: Vec<HomogeneousForm>,
}

impl FormTuple {
    pub fn new(forms: Vec<HomogeneousForm>) -> Result<Self> {
        if let Some(first) = forms.first() {
            for f in &forms[1..] {
                first.same_ring(f)?;
            }
        }
        if forms.windows(2).any(|w| w[0].degree > w[1].degree) {
            return Err(Error::domain("form degrees must be non-decreasing"));
        }
        Ok(FormTuple { forms })
    }

    pub fn forms(&self) -> &[HomogeneousForm] {
        &self.forms
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.forms.iter().map(|f| f.degree).collect()
    }
}

impl fmt::Display for FormTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.forms.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldSpec {
        FieldSpec::new(2, 1).unwrap()
    }

    #[test]
    fn conic_value_at_point() {
        let f = HomogeneousForm::parse(&f2(), 3, "x0*x1+x2^2").unwrap();
        let pt: Vec<FieldElement> = [0, 0, 1].iter().map(|&c| FieldElement::new(&f2(), c).unwrap()).collect();
        assert_eq!(f.evaluate(&pt).unwrap().code(), 1);
        let origin: Vec<FieldElement> = (0..3).map(|_| FieldElement::new(&f2(), 0).unwrap()).collect();
        assert_eq!(f.evaluate(&origin).unwrap().code(), 0);
    }

    #[test]
    fn cube_of_generator_in_f4() {
        let f4 = FieldSpec::new(2, 2).unwrap();
        let f = HomogeneousForm::parse(&f4, 3, "x0^3").unwrap();
        let t = f4.t();
        let pt: Vec<FieldElement> = [t, 0, 0].iter().map(|&c| FieldElement::new(&f4, c).unwrap()).collect();
        assert_eq!(f.evaluate(&pt).unwrap().code(), 1);
    }

    #[test]
    fn derivatives_in_characteristic_two() {
        let f = HomogeneousForm::parse(&f2(), 3, "x0*x1+x2^2").unwrap();
        assert!(f.partial_derivative(2).unwrap().is_zero());
        assert_eq!(f.partial_derivative(0).unwrap().to_string(), "x1");
    }

    #[test]
    fn subtraction() {
        let f3 = FieldSpec::new(3, 1).unwrap();
        let f = HomogeneousForm::parse(&f3, 4, "x0*x2 - x1^2").unwrap();
        assert_eq!(f, HomogeneousForm::parse(&f3, 4, "x0*x2+2*x1^2").unwrap());
        let g = HomogeneousForm::parse(&f3, 2, "-x0-(1)*x1").unwrap();
        assert_eq!(g, HomogeneousForm::parse(&f3, 2, "2*x0+2*x1").unwrap());
    }

    #[test]
    fn mixed_fields_rejected() {
        let f = HomogeneousForm::parse(&f2(), 2, "x0").unwrap();
        let f3 = FieldSpec::new(3, 1).unwrap();
        let pt: Vec<FieldElement> = (0..2).map(|_| FieldElement::new(&f3, 1).unwrap()).collect();
        assert!(f.evaluate(&pt).is_err());
    }

    #[test]
    fn parse_and_print_round_trip() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        let f = HomogeneousForm::parse(&f9, 3, "(1,2)*x0^2 + 2*x1*x2 + x2^2").unwrap();
        let again = HomogeneousForm::parse(&f9, 3, &f.to_string()).unwrap();
        assert_eq!(f, again);
        assert!(HomogeneousForm::parse(&f9, 3, "x0 + x1^2").is_err());
        assert!(HomogeneousForm::parse(&f9, 3, "0").is_err());
        assert!(HomogeneousForm::parse_with_degree(&f9, 3, "0", Some(2)).unwrap().is_zero());
        assert!(HomogeneousForm::parse(&f9, 3, "x3").is_err());
    }

    #[test]
    fn tuple_degrees_must_not_decrease() {
        let a = HomogeneousForm::parse(&f2(), 3, "x0^2").unwrap();
        let b = HomogeneousForm::parse(&f2(), 3, "x1").unwrap();
        assert!(FormTuple::new(vec![a.clone(), b.clone()]).is_err());
        assert_eq!(FormTuple::new(vec![b, a]).unwrap().degrees(), vec![1, 2]);
    }

    #[test]
    fn evaluation_in_extension() {
        let base = f2();
        let tower = ExtensionTower::new(&base);
        let f = HomogeneousForm::parse(&base, 3, "x0*x1+x2^2").unwrap();
        let l = tower.level(2).unwrap();
        let t = l.t();
        // t * 1 + 1^2 = t + 1 in F_4.
        let v = f.evaluate_in(&tower, 2, &[t, 1, 1]).unwrap();
        assert_eq!(v, l.add(t, 1));
    }
}
