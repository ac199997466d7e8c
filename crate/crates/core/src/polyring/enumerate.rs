use std::ops::Range;

use rand::Rng;

use super::form::{FormTuple, HomogeneousForm};
use super::mono::{monomials, Mono};
use crate::error::{Error, Result};
use crate::gf::{Code, FieldSpec};

/// Default cap on the number of tuples an exhaustive run may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 26;

/// The space `S_d = S_{d_1} + ... + S_{d_k}`, indexed by an odometer over
/// coefficient vectors: the last coefficient of the last form turns fastest.
#[derive(Clone, Debug)]
pub struct FormSpace {
    field: FieldSpec,
    nvars: usize,
    degrees: Vec<u32>,
    monos: Vec<Vec<Mono>>,
    total: u64,
}

impl FormSpace {
    /// Fails with a capacity error when the space exceeds `cap` tuples.
    pub fn new(field: &FieldSpec, nvars: usize, degrees: &[u32], cap: u64) -> Result<Self> {
        if degrees.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::domain("form degrees must be non-decreasing"));
        }
        // Validates the ring.
        for &d in degrees {
            HomogeneousForm::zero(field, nvars, d)?;
        }
        let monos: Vec<Vec<Mono>> = degrees.iter().map(|&d| monomials(nvars, d)).collect();
        let dim: u64 = monos.iter().map(|m| m.len() as u64).sum();
        let total = u32::try_from(dim)
            .ok()
            .and_then(|dim| (field.q() as u64).checked_pow(dim))
            .filter(|&t| t <= cap)
            .ok_or_else(|| {
                Error::capacity(format!(
                    "{}^{dim} tuples exceed the exhaustive cap {cap}; use sampling mode",
                    field.q()
                ))
            })?;
        Ok(FormSpace { field: field.clone(), nvars, degrees: degrees.to_vec(), monos, total })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Total dimension `sum dim S_{d_i}`.
    pub fn dimension(&self) -> usize {
        self.monos.iter().map(|m| m.len()).sum()
    }

    /// Index range of partition `i` out of `parts`.
    pub fn partition(&self, i: u64, parts: u64) -> Result<Range<u64>> {
        if parts == 0 || i >= parts {
            return Err(Error::domain("partition index out of range"));
        }
        let lo = (self.total as u128 * i as u128 / parts as u128) as u64;
        let hi = (self.total as u128 * (i + 1) as u128 / parts as u128) as u64;
        Ok(lo..hi)
    }

    pub fn tuple_at(&self, index: u64) -> Result<FormTuple> {
        if index >= self.total {
            return Err(Error::domain("tuple index out of range"));
        }
        let q = self.field.q() as u64;
        let mut digits: Vec<Code> = vec![0; self.dimension()];
        let mut x = index;
        for d in digits.iter_mut().rev() {
            *d = (x % q) as Code;
            x /= q;
        }
        let mut forms = Vec::with_capacity(self.degrees.len());
        let mut at = 0;
        for (i, monos) in self.monos.iter().enumerate() {
            let terms = monos
                .iter()
                .zip(&digits[at..at + monos.len()])
                .filter(|t| *t.1 != 0)
                .map(|(&m, &c)| (m, c))
                .collect();
            at += monos.len();
            forms.push(HomogeneousForm::from_sorted_terms(&self.field, self.nvars, self.degrees[i], terms));
        }
        FormTuple::new(forms)
    }

    pub fn iter_range(&self, range: Range<u64>) -> impl Iterator<Item = FormTuple> + '_ {
        range.map(move |i| self.tuple_at(i).expect("index in range"))
    }

    /// A uniformly random tuple.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FormTuple {
        let forms = self
            .degrees
            .iter()
            .map(|&d| sample_form(&self.field, self.nvars, d, rng).expect("ring validated"))
            .collect();
        FormTuple::new(forms).expect("degrees validated")
    }
}

/// All forms of one degree, as a single-form [`FormSpace`].
pub fn enumerate_forms(field: &FieldSpec, nvars: usize, degree: u32, cap: u64) -> Result<FormSpace> {
    FormSpace::new(field, nvars, &[degree], cap)
}

/// A uniformly random form of degree `degree`.
pub fn sample_form<R: Rng + ?Sized>(field: &FieldSpec, nvars: usize, degree: u32, rng: &mut R) -> Result<HomogeneousForm> {
    HomogeneousForm::zero(field, nvars, degree)?;
    let terms = monomials(nvars, degree)
        .into_iter()
        .map(|m| (m, rng.gen_range(0..field.q())))
        .filter(|t| t.1 != 0)
        .collect();
    Ok(HomogeneousForm::from_sorted_terms(field, nvars, degree, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    #[test]
    fn space_sizes() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        assert_eq!(enumerate_forms(&f2, 3, 1, u64::MAX).unwrap().total(), 8);
        assert_eq!(enumerate_forms(&f2, 3, 2, u64::MAX).unwrap().total(), 64);
        let f3 = FieldSpec::new(3, 1).unwrap();
        assert_eq!(enumerate_forms(&f3, 3, 3, u64::MAX).unwrap().total(), 59049);
        assert!(matches!(enumerate_forms(&f3, 3, 3, 1000), Err(Error::Capacity(_))));
    }

    #[test]
    fn enumeration_is_duplicate_free_and_partitioned() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let s = enumerate_forms(&f2, 3, 2, u64::MAX).unwrap();
        let all: HashSet<String> = s.iter_range(0..s.total()).map(|t| t.to_string()).collect();
        assert_eq!(all.len(), 64);
        let mut seen = 0;
        for i in 0..5 {
            seen += s.partition(i, 5).unwrap().count();
        }
        assert_eq!(seen, 64);
        assert!(s.tuple_at(0).unwrap().forms()[0].is_zero());
    }

    #[test]
    fn sampling_is_deterministic_and_roughly_uniform() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(sample_form(&f2, 3, 2, &mut a).unwrap(), sample_form(&f2, 3, 2, &mut b).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = std::collections::HashMap::new();
        for _ in 0..10_000 {
            *counts.entry(sample_form(&f2, 3, 1, &mut rng).unwrap().to_string()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 8);
        for &c in counts.values() {
            assert!((c as f64 / 1e4 - 0.125).abs() < 0.02);
        }
    }
}
