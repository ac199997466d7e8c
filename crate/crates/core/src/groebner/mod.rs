//! Reduced Gröbner bases of homogeneous ideals in grevlex, and the
//! projective invariants read off their initial ideals.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Code, FieldSpec};
use crate::polyring::{HomogeneousForm, Mono, MAX_DEGREE};

mod hilbert;

pub use hilbert::HilbertSeries;

type Poly = Vec<(Mono, Code)>;

/// Resource caps for [`buchberger_with`].
#[derive(Clone, Copy, Debug)]
pub struct GbLimits {
    pub max_vars: usize,
    pub max_input_degree: u32,
    pub max_basis: usize,
}

impl Default for GbLimits {
    fn default() -> Self {
        GbLimits { max_vars: 7, max_input_degree: 12, max_basis: 20_000 }
    }
}

/// A homogeneous ideal given by generators.
#[derive(Clone, Debug)]
pub struct Ideal {
    field: FieldSpec,
    nvars: usize,
    generators: Vec<HomogeneousForm>,
}

impl Ideal {
    pub fn new(field: &FieldSpec, nvars: usize, generators: Vec<HomogeneousForm>) -> Result<Self> {
        for g in &generators {
            if g.field() != field || g.nvars() != nvars {
                return Err(Error::domain("generator lives in a different ring"));
            }
        }
        Ok(Ideal { field: field.clone(), nvars, generators })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[HomogeneousForm] {
        &self.generators
    }
}

/// Reduced grevlex Gröbner basis, sorted by degree and then by descending
/// leading monomial.
#[derive(Clone)]
pub struct GroebnerBasis {
    field: FieldSpec,
    nvars: usize,
    basis: Vec<Poly>,
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Mono,
}

struct Engine<'a> {
    f: &'a FieldSpec,
    n: usize,
}

impl Engine<'_> {
    fn make_monic(&self, p: &mut Poly) {
        if let Some(&(_, c)) = p.first() {
            if c != 1 {
                let inv = self.f.inv(c).expect("nonzero lead");
                for t in p.iter_mut() {
                    t.1 = self.f.mul(t.1, inv);
                }
            }
        }
    }

    /// `p - c * m * g`, where all of `m * g` sorts at or below `p`'s cursor.
    fn sub_mul(&self, p: &[(Mono, Code)], c: Code, m: Mono, g: &[(Mono, Code)]) -> Poly {
        let f = self.f;
        let negc = f.neg(c);
        let mut out = Vec::with_capacity(p.len() + g.len());
        let (mut i, mut j) = (0, 0);
        while i < p.len() && j < g.len() {
            let gm = m.mul(g[j].0, self.n);
            match p[i].0.cmp(&gm) {
                std::cmp::Ordering::Greater => {
                    out.push(p[i]);
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((gm, f.mul(negc, g[j].1)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let v = f.add(p[i].1, f.mul(negc, g[j].1));
                    if v != 0 {
                        out.push((gm, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&p[i..]);
        for t in &g[j..] {
            out.push((m.mul(t.0, self.n), f.mul(negc, t.1)));
        }
        out
    }

    /// Full reduction of `p` by the monic polynomials `g` (indices `active`).
    fn reduce(&self, mut p: Poly, polys: &[Poly], active: &[usize]) -> Poly {
        let mut done: Poly = Vec::new();
        let mut start = 0;
        while start < p.len() {
            let (m, c) = p[start];
            let div = active.iter().find(|&&k| polys[k][0].0.divides(m, self.n));
            match div {
                Some(&k) => {
                    let g = &polys[k];
                    let u = g[0].0.quotient_of(m, self.n);
                    // The leading terms cancel; subtract the tails only.
                    p = self.sub_mul(&p[start + 1..], c, u, &g[1..]);
                    start = 0;
                }
                None => {
                    done.push((m, c));
                    start += 1;
                }
            }
        }
        done
    }

    fn spoly(&self, a: &Poly, b: &Poly, lcm: Mono) -> Poly {
        let ua = a[0].0.quotient_of(lcm, self.n);
        let ub = b[0].0.quotient_of(lcm, self.n);
        let left: Poly = a[1..].iter().map(|&(m, c)| (ua.mul(m, self.n), c)).collect();
        self.sub_mul(&left, 1, ub, &b[1..])
    }
}

fn to_poly(f: &HomogeneousForm) -> Poly {
    f.terms().to_vec()
}

/// Reduced Gröbner basis with default limits.
pub fn buchberger(ideal: &Ideal) -> Result<GroebnerBasis> {
    buchberger_with(ideal, GbLimits::default())
}

pub fn buchberger_with(ideal: &Ideal, limits: GbLimits) -> Result<GroebnerBasis> {
    let n = ideal.nvars;
    if n > limits.max_vars {
        return Err(Error::capacity(format!("{n} variables exceed the cap {}", limits.max_vars)));
    }
    if let Some(g) = ideal.generators.iter().find(|g| g.degree() > limits.max_input_degree) {
        return Err(Error::capacity(format!(
            "generator degree {} exceeds the cap {}",
            g.degree(),
            limits.max_input_degree
        )));
    }
    let eng = Engine { f: &ideal.field, n };
    let mut gens: Vec<Poly> = ideal.generators.iter().filter(|g| !g.is_zero()).map(to_poly).collect();
    gens.sort_by_key(|g| std::cmp::Reverse(g[0].0.degree()));

    let mut polys: Vec<Poly> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    loop {
        let gen_deg = gens.last().map(|g| g[0].0.degree());
        let pair_pos = pairs
            .iter()
            .enumerate()
            .min_by_key(|(_, p)| p.lcm)
            .map(|(k, _)| k);
        let pair_deg = pair_pos.map(|k| pairs[k].lcm.degree());
        let h = match (gen_deg, pair_deg) {
            (None, None) => break,
            (Some(g), Some(p)) if p < g => {
                let pr = pairs.swap_remove(pair_pos.unwrap());
                eng.spoly(&polys[pr.i], &polys[pr.j], pr.lcm)
            }
            (Some(_), _) => gens.pop().unwrap(),
            (None, Some(_)) => {
                let pr = pairs.swap_remove(pair_pos.unwrap());
                eng.spoly(&polys[pr.i], &polys[pr.j], pr.lcm)
            }
        };
        let mut h = eng.reduce(h, &polys, &active);
        if h.is_empty() {
            continue;
        }
        eng.make_monic(&mut h);
        if h[0].0.degree() > MAX_DEGREE {
            return Err(Error::capacity("basis degree exceeds the monomial encoding"));
        }
        polys.push(h);
        if polys.len() > limits.max_basis {
            return Err(Error::capacity(format!("basis exceeded {} elements", limits.max_basis)));
        }
        let hi = polys.len() - 1;
        update(&polys, &mut active, &mut pairs, hi, n);
    }

    // Interreduce: leads of `active` are already pairwise non-dividing.
    let mut basis: Vec<Poly> = Vec::with_capacity(active.len());
    for (pos, &k) in active.iter().enumerate() {
        let others: Vec<usize> = active.iter().enumerate().filter(|&(q, _)| q != pos).map(|(_, &x)| x).collect();
        let p = &polys[k];
        let mut tail = eng.reduce(p[1..].to_vec(), &polys, &others);
        let mut r = vec![p[0]];
        r.append(&mut tail);
        basis.push(r);
    }
    basis.sort_by(|a, b| {
        let (x, y) = (a[0].0, b[0].0);
        x.degree().cmp(&y.degree()).then(y.cmp(&x))
    });
    Ok(GroebnerBasis { field: ideal.field.clone(), nvars: n, basis })
}

/// Gebauer–Möller pair update after adding `h`.
fn update(polys: &[Poly], active: &mut Vec<usize>, pairs: &mut Vec<Pair>, h: usize, n: usize) {
    let lh = polys[h][0].0;
    let mut c: Vec<(usize, Mono)> = active.iter().map(|&g| (g, lh.lcm(polys[g][0].0, n))).collect();
    let mut d: Vec<(usize, Mono)> = Vec::new();
    while let Some((g1, l1)) = c.pop() {
        let coprime = lh.coprime(polys[g1][0].0, n);
        let dominated = c.iter().chain(d.iter()).any(|&(_, l2)| l2.divides(l1, n));
        if coprime || !dominated {
            d.push((g1, l1));
        }
    }
    pairs.retain(|p| {
        !(lh.divides(p.lcm, n)
            && lh.lcm(polys[p.i][0].0, n) != p.lcm
            && lh.lcm(polys[p.j][0].0, n) != p.lcm)
    });
    for (g, l) in d {
        if !lh.coprime(polys[g][0].0, n) {
            pairs.push(Pair { i: g, j: h, lcm: l });
        }
    }
    active.retain(|&g| !lh.divides(polys[g][0].0, n));
    active.push(h);
}

impl GroebnerBasis {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn leading_monomials(&self) -> Vec<Mono> {
        self.basis.iter().map(|p| p[0].0).collect()
    }

    pub fn elements(&self) -> Vec<HomogeneousForm> {
        self.basis
            .iter()
            .map(|p| HomogeneousForm::from_sorted_terms(&self.field, self.nvars, p[0].0.degree(), p.clone()))
            .collect()
    }

    fn all(&self) -> Vec<usize> {
        (0..self.basis.len()).collect()
    }

    /// Remainder of `f` on division by the basis.
    pub fn normal_form(&self, f: &HomogeneousForm) -> Result<HomogeneousForm> {
        if f.field() != &self.field || f.nvars() != self.nvars {
            return Err(Error::domain("form lives in a different ring"));
        }
        let eng = Engine { f: &self.field, n: self.nvars };
        let r = eng.reduce(to_poly(f), &self.basis, &self.all());
        Ok(HomogeneousForm::from_sorted_terms(&self.field, self.nvars, f.degree(), r))
    }

    pub fn contains(&self, f: &HomogeneousForm) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Buchberger's criterion, checked directly on every pair.
    pub fn s_pairs_reduce_to_zero(&self) -> bool {
        let eng = Engine { f: &self.field, n: self.nvars };
        let all = self.all();
        for i in 0..self.basis.len() {
            for j in i + 1..self.basis.len() {
                let l = self.basis[i][0].0.lcm(self.basis[j][0].0, self.nvars);
                let s = eng.spoly(&self.basis[i], &self.basis[j], l);
                if !eng.reduce(s, &self.basis, &all).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    /// True when the ideal contains a power of every variable, so its zero
    /// set in projective space is empty over the algebraic closure.
    pub fn projective_empty(&self) -> bool {
        let n = self.nvars;
        let leads = self.leading_monomials();
        if leads.iter().any(|m| m.degree() == 0) {
            return true;
        }
        (0..n).all(|i| leads.iter().any(|m| m.exp(n, i) == m.degree()))
    }

    /// Krull dimension of `S/I` from maximal sets of variables carrying no
    /// leading monomial.
    pub fn affine_dimension(&self) -> usize {
        let n = self.nvars;
        let leads = self.leading_monomials();
        if leads.iter().any(|m| m.degree() == 0) {
            return 0;
        }
        let supports: Vec<u32> = leads
            .iter()
            .map(|m| (0..n).filter(|&i| m.exp(n, i) > 0).fold(0u32, |s, i| s | (1 << i)))
            .collect();
        (0u32..(1 << n))
            .filter(|&u| supports.iter().all(|&s| s & !u != 0))
            .map(|u| u.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Dimension of the projective zero set; `-1` when empty.
    pub fn projective_dimension(&self) -> i64 {
        self.affine_dimension() as i64 - 1
    }

    /// `dim_F (S/I)_t`: degree-`t` monomials outside the initial ideal.
    pub fn hilbert_value(&self, t: u32) -> u64 {
        let n = self.nvars;
        let leads = self.leading_monomials();
        let mut count = 0u64;
        let mut exps = vec![0u32; n];
        fn rec(i: usize, left: u32, exps: &mut Vec<u32>, leads: &[Mono], n: usize, count: &mut u64) {
            if i == n - 1 {
                exps[i] = left;
                if leads.iter().all(|l| (0..n).any(|k| l.exp(n, k) > exps[k])) {
                    *count += 1;
                }
                return;
            }
            for e in 0..=left {
                exps[i] = e;
                rec(i + 1, left - e, exps, leads, n, count);
            }
        }
        rec(0, t, &mut exps, &leads, n, &mut count);
        count
    }

    pub fn hilbert_series(&self) -> HilbertSeries {
        HilbertSeries::of_monomial_ideal(&self.leading_monomials(), self.nvars)
    }

    /// Degree of the projective zero set (0 when empty).
    pub fn projective_degree(&self) -> u64 {
        self.hilbert_series().degree()
    }
}

impl fmt::Display for GroebnerBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.elements().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroebnerBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroebnerBasis[{}]", self.elements().iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal(q: u64, nvars: usize, gens: &[&str]) -> Ideal {
        let f = FieldSpec::of_order(q).unwrap();
        let g = gens.iter().map(|s| HomogeneousForm::parse(&f, nvars, s).unwrap()).collect();
        Ideal::new(&f, nvars, g).unwrap()
    }

    fn twisted_cubic() -> Ideal {
        ideal(3, 4, &["x0*x2+2*x1^2", "x1*x3+2*x2^2", "x0*x3+2*x1*x2"])
    }

    #[test]
    fn linear_generators_are_a_basis() {
        let gb = buchberger(&ideal(2, 3, &["x0", "x1"])).unwrap();
        assert_eq!(gb.to_string(), "x0\nx1");
        assert_eq!(gb.projective_dimension(), 0);
        assert!(!gb.projective_empty());
    }

    #[test]
    fn twisted_cubic_invariants() {
        let gb = buchberger(&twisted_cubic()).unwrap();
        assert!(gb.s_pairs_reduce_to_zero());
        for g in twisted_cubic().generators() {
            assert!(gb.contains(g).unwrap());
        }
        assert_eq!(gb.projective_dimension(), 1);
        assert_eq!(gb.projective_degree(), 3);
        for t in 0..=10 {
            assert_eq!(gb.hilbert_value(t), 3 * t as u64 + 1);
        }
    }

    #[test]
    fn duplicate_generators() {
        let a = buchberger(&ideal(5, 3, &["x0^2+x1*x2"])).unwrap();
        let b = buchberger(&ideal(5, 3, &["x0^2+x1*x2", "x0^2+x1*x2"])).unwrap();
        assert_eq!(a.to_string(), b.to_string());
    }

    #[test]
    fn emptiness() {
        assert!(buchberger(&ideal(2, 3, &["x0", "x1", "x2^2"])).unwrap().projective_empty());
        assert!(!buchberger(&ideal(2, 3, &["x0"])).unwrap().projective_empty());
        // Jacobian ideal of the smooth conic x0*x1 + x2^2 over F_2.
        let gb = buchberger(&ideal(2, 3, &["x1", "x0", "x0*x1+x2^2"])).unwrap();
        assert_eq!(gb.to_string(), "x0\nx1\nx2^2");
        assert!(gb.projective_empty());
    }

    #[test]
    fn dimensions_of_simple_ideals() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let zero = buchberger(&Ideal::new(&f2, 3, vec![]).unwrap()).unwrap();
        assert_eq!(zero.projective_dimension(), 2);
        assert_eq!(zero.hilbert_value(2), 6);
        assert_eq!(buchberger(&ideal(2, 3, &["x0"])).unwrap().projective_dimension(), 1);
        let unit = buchberger(&ideal(2, 3, &["x0", "x1", "x2"])).unwrap();
        assert_eq!(unit.projective_dimension(), -1);
    }

    #[test]
    fn complete_intersection_degree() {
        let gb = buchberger(&ideal(3, 4, &["x0^2+x1*x2+x3^2", "x0*x1*x2+x3^3+x1^3"])).unwrap();
        assert_eq!(gb.projective_dimension(), 1);
        assert_eq!(gb.projective_degree(), 6);
    }

    #[test]
    fn input_caps() {
        let lim = GbLimits { max_vars: 2, ..GbLimits::default() };
        assert!(matches!(buchberger_with(&ideal(2, 3, &["x0"]), lim), Err(Error::Capacity(_))));
    }
}
