use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::field::{Code, FieldSpec};
use crate::error::{Error, Result};

struct Level {
    field: FieldSpec,
    /// Image of each base-field code.
    embed: Vec<Code>,
}

/// The fields `F_{q^e}` over a base `F_q`, built on demand, with
/// compatible embeddings of the base field.
#[derive(Clone)]
pub struct ExtensionTower {
    base: FieldSpec,
    levels: Arc<Mutex<HashMap<u32, Arc<Level>>>>,
}

impl std::fmt::Debug for ExtensionTower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ExtensionTower({})", self.base)
    }
}

impl ExtensionTower {
    pub fn new(base: &FieldSpec) -> Self {
        ExtensionTower { base: base.clone(), levels: Arc::new(Mutex::new(HashMap::new())) }
    }

    pub fn base(&self) -> &FieldSpec {
        &self.base
    }

    fn level_data(&self, e: u32) -> Result<Arc<Level>> {
        if e == 0 {
            return Err(Error::domain("tower level must be positive"));
        }
        if let Some(l) = self.levels.lock().unwrap().get(&e) {
            return Ok(l.clone());
        }
        let level = if e == 1 {
            Level { field: self.base.clone(), embed: self.base.codes().collect() }
        } else {
            let field = FieldSpec::new(self.base.p(), self.base.m() * e)?;
            let modulus = self.base.modulus();
            let eval = |x: Code| {
                modulus.iter().rev().fold(0, |acc, &c| field.add(field.mul(acc, x), c))
            };
            let beta = field
                .codes()
                .find(|&x| eval(x) == 0)
                .expect("the base modulus splits in every extension of degree divisible by m");
            let embed = self
                .base
                .codes()
                .map(|c| {
                    let mut acc = 0;
                    let mut pw = 1;
                    for d in self.base.coeffs(c) {
                        acc = field.add(acc, field.mul(d, pw));
                        pw = field.mul(pw, beta);
                    }
                    acc
                })
                .collect();
            Level { field, embed }
        };
        let level = Arc::new(level);
        self.levels.lock().unwrap().insert(e, level.clone());
        Ok(level)
    }

    /// The field `F_{q^e}`.
    pub fn level(&self, e: u32) -> Result<FieldSpec> {
        Ok(self.level_data(e)?.field.clone())
    }

    /// Map a base-field element into level `e`.
    pub fn embed(&self, x: Code, e: u32) -> Result<Code> {
        let l = self.level_data(e)?;
        l.embed
            .get(x as usize)
            .copied()
            .ok_or_else(|| Error::domain("element code out of range"))
    }

    /// Embedding table of the base field into level `e`.
    pub fn embedding(&self, e: u32) -> Result<Vec<Code>> {
        Ok(self.level_data(e)?.embed.clone())
    }

    /// `x -> x^q` on level `e`.
    pub fn frobenius(&self, x: Code, e: u32) -> Result<Code> {
        Ok(self.level(e)?.pow(x, self.base.q() as u64))
    }
}

/// Smallest `d` dividing `e` such that `x` (an element of level `e`)
/// lies in `F_{q^d}`.
pub fn element_degree(tower: &ExtensionTower, x: Code, e: u32) -> Result<u32> {
    let field = tower.level(e)?;
    if x >= field.q() {
        return Err(Error::domain("element code out of range"));
    }
    let q = tower.base().q() as u64;
    let mut y = x;
    for d in 1..=e {
        y = field.pow(y, q);
        if e % d == 0 && y == x {
            return Ok(d);
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_is_a_ring_map() {
        for (p, m, e) in [(2, 1, 3), (2, 2, 2), (3, 1, 2), (2, 1, 4), (3, 2, 2)] {
            let base = FieldSpec::new(p, m).unwrap();
            let tower = ExtensionTower::new(&base);
            let top = tower.level(e).unwrap();
            assert_eq!(top.q(), base.q().pow(e));
            for a in base.codes() {
                let ea = tower.embed(a, e).unwrap();
                assert_eq!(element_degree(&tower, ea, e).unwrap(), 1);
                for b in base.codes() {
                    let eb = tower.embed(b, e).unwrap();
                    assert_eq!(tower.embed(base.add(a, b), e).unwrap(), top.add(ea, eb));
                    assert_eq!(tower.embed(base.mul(a, b), e).unwrap(), top.mul(ea, eb));
                }
            }
        }
    }

    #[test]
    fn frobenius_orbits() {
        let base = FieldSpec::new(2, 1).unwrap();
        let tower = ExtensionTower::new(&base);
        let f = tower.level(6).unwrap();
        let mut counts = [0usize; 7];
        for x in f.codes() {
            let d = element_degree(&tower, x, 6).unwrap();
            counts[d as usize] += 1;
            let mut y = x;
            for _ in 0..6 {
                y = tower.frobenius(y, 6).unwrap();
            }
            assert_eq!(y, x);
        }
        // Elements of exact degree d: 2, 2, 6, 54 for d = 1, 2, 3, 6.
        assert_eq!(counts, [0, 2, 2, 6, 0, 0, 54]);
    }

    #[test]
    fn oversized_level_is_rejected() {
        let tower = ExtensionTower::new(&FieldSpec::new(2, 1).unwrap());
        assert!(matches!(tower.level(21), Err(Error::Capacity(_))));
    }
}
