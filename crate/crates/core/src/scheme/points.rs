use crate::error::{Error, Result};
use crate::gf::{Code, FieldSpec};

/// Largest point set materialised by [`projective_points`].
pub const DEFAULT_POINT_CAP: u64 = 1 << 22;

/// `#P^r(F_Q) = (Q^(r+1) - 1)/(Q - 1)`, or `None` on overflow.
pub fn count_projective_points(r: usize, big_q: u64) -> Option<u64> {
    let mut total: u64 = 0;
    let mut pw: u64 = 1;
    for _ in 0..=r {
        total = total.checked_add(pw)?;
        pw = pw.checked_mul(big_q)?;
    }
    Some(total)
}

/// Visit every point of `P^r(field)` in normalized form (first nonzero
/// coordinate 1), stopping early when `visit` returns false.
pub fn for_each_point<F>(r: usize, field: &FieldSpec, mut visit: F)
where
    F: FnMut(&[Code]) -> bool,
{
    let n = r + 1;
    let q = field.q();
    let mut coords = vec![0 as Code; n];
    for lead in 0..n {
        coords.iter_mut().for_each(|c| *c = 0);
        coords[lead] = 1;
        loop {
            if !visit(&coords) {
                return;
            }
            // Odometer over the coordinates after `lead`, last fastest.
            let mut k = n;
            let mut wrapped = true;
            while k > lead + 1 {
                k -= 1;
                coords[k] += 1;
                if coords[k] < q {
                    wrapped = false;
                    break;
                }
                coords[k] = 0;
            }
            if wrapped {
                break;
            }
        }
    }
}

/// All points of `P^r(field)`, normalized, in deterministic order.
pub fn projective_points(r: usize, field: &FieldSpec) -> Result<Vec<Vec<Code>>> {
    projective_points_capped(r, field, DEFAULT_POINT_CAP)
}

pub fn projective_points_capped(r: usize, field: &FieldSpec, cap: u64) -> Result<Vec<Vec<Code>>> {
    let count = count_projective_points(r, field.q() as u64)
        .filter(|&c| c <= cap)
        .ok_or_else(|| Error::capacity(format!("P^{r}({}) exceeds the point cap {cap}", field.name())))?;
    let mut out = Vec::with_capacity(count as usize);
    for_each_point(r, field, |p| {
        out.push(p.to_vec());
        true
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn point_counts() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        assert_eq!(projective_points(2, &f2).unwrap().len(), 7);
        let f4 = FieldSpec::new(2, 2).unwrap();
        assert_eq!(projective_points(1, &f4).unwrap().len(), 5);
        let f3 = FieldSpec::new(3, 1).unwrap();
        let p3 = projective_points(3, &f3).unwrap();
        assert_eq!(p3.len(), 40);
        let distinct: HashSet<_> = p3.iter().collect();
        assert_eq!(distinct.len(), 40);
        assert!(p3.iter().all(|p| p.iter().find(|&&c| c != 0) == Some(&1)));
        assert!(projective_points_capped(3, &f3, 39).is_err());
    }

    #[test]
    fn projective_line_over_f2() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        assert_eq!(projective_points(1, &f2).unwrap(), vec![vec![1, 0], vec![1, 1], vec![0, 1]]);
    }
}
