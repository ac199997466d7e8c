use crate::polyring::Mono;

/// Hilbert series `K(t) / (1 - t)^n` of `S/I` for a monomial ideal `I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSeries {
    numerator: Vec<i64>,
    nvars: usize,
}

fn minimalize(mut gens: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    gens.sort_by_key(|g| g.iter().sum::<u32>());
    gens.dedup();
    let mut out: Vec<Vec<u32>> = Vec::with_capacity(gens.len());
    for g in gens {
        if !out.iter().any(|h| h.iter().zip(&g).all(|(a, b)| a <= b)) {
            out.push(g);
        }
    }
    out
}

fn sub_shifted(a: &mut Vec<i64>, b: &[i64], shift: usize) {
    if a.len() < b.len() + shift {
        a.resize(b.len() + shift, 0);
    }
    for (i, &x) in b.iter().enumerate() {
        a[i + shift] -= x;
    }
}

fn mul_poly(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn numerator(gens: Vec<Vec<u32>>) -> Vec<i64> {
    let mut gens = minimalize(gens);
    let coprime = gens.iter().enumerate().all(|(i, g)| {
        gens[i + 1..]
            .iter()
            .all(|h| g.iter().zip(h).all(|(a, b)| *a == 0 || *b == 0))
    });
    if coprime {
        return gens.iter().fold(vec![1], |acc, g| {
            let d = g.iter().sum::<u32>() as usize;
            let mut f = vec![0; d + 1];
            f[0] = 1;
            f[d] -= 1;
            mul_poly(&acc, &f)
        });
    }
    let m = gens.pop().expect("non-coprime set has two generators");
    let colon: Vec<Vec<u32>> = gens
        .iter()
        .map(|g| g.iter().zip(&m).map(|(a, b)| a.saturating_sub(*b)).collect())
        .collect();
    let mut k = numerator(gens);
    let kc = numerator(colon);
    sub_shifted(&mut k, &kc, m.iter().sum::<u32>() as usize);
    while k.len() > 1 && k.last() == Some(&0) {
        k.pop();
    }
    k
}

impl HilbertSeries {
    pub fn of_monomial_ideal(gens: &[Mono], nvars: usize) -> Self {
        let gens = gens.iter().map(|m| m.exps(nvars)).collect();
        HilbertSeries { numerator: numerator(gens), nvars }
    }

    pub fn numerator(&self) -> &[i64] {
        &self.numerator
    }

    /// `(D, G)` with `K = (1 - t)^(n - D) G` and `G(1) != 0`.
    fn reduced(&self) -> (usize, Vec<i64>) {
        let mut g = self.numerator.clone();
        let mut dim = self.nvars;
        while dim > 0 && g.iter().sum::<i64>() == 0 {
            // Divide by (1 - t): coefficients of G are partial sums of K.
            let mut q = Vec::with_capacity(g.len() - 1);
            let mut acc = 0;
            for &c in &g[..g.len() - 1] {
                acc += c;
                q.push(acc);
            }
            g = q;
            dim -= 1;
        }
        (dim, g)
    }

    /// Krull dimension of `S/I`.
    pub fn affine_dimension(&self) -> usize {
        self.reduced().0
    }

    /// Degree of the projective zero set; 0 when it is empty.
    pub fn degree(&self) -> u64 {
        let (dim, g) = self.reduced();
        if dim == 0 {
            return 0;
        }
        g.iter().sum::<i64>() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypersurface_and_points() {
        let h = HilbertSeries::of_monomial_ideal(&[Mono::from_exps(&[0, 0, 3])], 3);
        assert_eq!(h.numerator(), &[1, 0, 0, -1]);
        assert_eq!(h.affine_dimension(), 2);
        assert_eq!(h.degree(), 3);
        let pts = HilbertSeries::of_monomial_ideal(&[Mono::from_exps(&[0, 2, 0]), Mono::from_exps(&[0, 1, 1]), Mono::from_exps(&[0, 0, 2])], 3);
        assert_eq!(pts.affine_dimension(), 1);
        assert_eq!(pts.degree(), 3);
    }

    #[test]
    fn empty_projective_set() {
        let gens: Vec<Mono> = (0..3).map(|i| Mono::var(3, i)).collect();
        let h = HilbertSeries::of_monomial_ideal(&gens, 3);
        assert_eq!(h.affine_dimension(), 0);
        assert_eq!(h.degree(), 0);
    }
}
