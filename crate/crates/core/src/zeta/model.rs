use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gf::prime_power;
use crate::scheme::mobius;

/// A variety whose point counts over every `F_{q^e}` are known exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeilModel {
    ProjectiveSpace { n: u32, q: u64 },
    /// Elliptic curve with Frobenius trace `a`.
    Elliptic { a: i64, q: u64 },
    Product(Vec<WeilModel>),
}

impl WeilModel {
    pub fn projective_space(n: u32, q: u64) -> Result<Self> {
        check_q(q)?;
        Ok(WeilModel::ProjectiveSpace { n, q })
    }

    /// Fails unless `a^2 <= 4q`.
    pub fn elliptic(a: i64, q: u64) -> Result<Self> {
        check_q(q)?;
        if (a as i128) * (a as i128) > 4 * q as i128 {
            return Err(Error::domain(format!("trace {a} violates the Hasse bound for q = {q}")));
        }
        Ok(WeilModel::Elliptic { a, q })
    }

    pub fn product(parts: Vec<WeilModel>) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::domain("empty product"))?;
        if parts.iter().any(|p| p.q() != first.q()) {
            return Err(Error::domain("product factors over different fields"));
        }
        Ok(WeilModel::Product(parts))
    }

    /// `E^n` with the Segre embedding.
    pub fn segre_power(a: i64, n: u32, q: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("power must be positive"));
        }
        let e = Self::elliptic(a, q)?;
        if n == 1 {
            return Ok(e);
        }
        Self::product(vec![e; n as usize])
    }

    pub fn q(&self) -> u64 {
        match self {
            WeilModel::ProjectiveSpace { q, .. } | WeilModel::Elliptic { q, .. } => *q,
            WeilModel::Product(parts) => parts[0].q(),
        }
    }

    pub fn dim(&self) -> u32 {
        match self {
            WeilModel::ProjectiveSpace { n, .. } => *n,
            WeilModel::Elliptic { .. } => 1,
            WeilModel::Product(parts) => parts.iter().map(|p| p.dim()).sum(),
        }
    }

    /// `N_e = #X(F_{q^e})`.
    pub fn point_count(&self, e: u32) -> BigUint {
        match self {
            WeilModel::ProjectiveSpace { n, q } => {
                let qe = BigUint::from(*q).pow(e);
                let mut total = BigUint::zero();
                let mut pw = BigUint::one();
                for _ in 0..=*n {
                    total += &pw;
                    pw *= &qe;
                }
                total
            }
            WeilModel::Elliptic { a, q } => {
                // s_e = alpha^e + beta^e via s_e = a s_{e-1} - q s_{e-2}.
                let (a, q) = (BigInt::from(*a), BigInt::from(*q));
                let (mut s0, mut s1) = (BigInt::from(2), a.clone());
                for _ in 1..e {
                    let s2 = &a * &s1 - &q * &s0;
                    s0 = s1;
                    s1 = s2;
                }
                let s_e = if e == 0 { s0 } else { s1 };
                let n: BigInt = q.pow(e) + 1 - s_e;
                n.to_biguint().expect("Hasse keeps counts nonnegative")
            }
            WeilModel::Product(parts) => parts.iter().map(|p| p.point_count(e)).product(),
        }
    }

    /// Closed points of degree `1..=e_max`.
    pub fn closed_points(&self, e_max: u32) -> Vec<BigUint> {
        let n: Vec<BigInt> = (1..=e_max).map(|e| BigInt::from(self.point_count(e))).collect();
        (1..=e_max as u64)
            .map(|e| {
                let s: BigInt = (1..=e)
                    .filter(|m| e % m == 0)
                    .map(|m| mobius(e / m) * &n[m as usize - 1])
                    .sum();
                let a = s / BigInt::from(e);
                debug_assert!(!a.is_negative());
                a.to_biguint().expect("closed-point counts are nonnegative")
            })
            .collect()
    }

    /// `K` with `N_e <= K q^{dim e}` for every `e >= 1`.
    pub fn growth_constant(&self) -> GrowthConstant {
        match self {
            WeilModel::ProjectiveSpace { q, .. } => GrowthConstant::rational(BigRational::new(
                BigInt::from(*q),
                BigInt::from(*q - 1),
            )),
            // (q^{e/2} + 1)^2 <= q^e (1 + q^{-1/2})^2.
            WeilModel::Elliptic { q, .. } => GrowthConstant { rational: BigRational::one(), sqrt_q_terms: 2, q: *q },
            WeilModel::Product(parts) => parts.iter().map(|p| p.growth_constant()).fold(
                GrowthConstant { rational: BigRational::one(), sqrt_q_terms: 0, q: self.q() },
                |acc, g| GrowthConstant {
                    rational: acc.rational * g.rational,
                    sqrt_q_terms: acc.sqrt_q_terms + g.sqrt_q_terms,
                    q: acc.q,
                },
            ),
        }
    }

    /// Natural embedding `(r, degree)`: `P^n` itself, a plane cubic, and
    /// the Segre embedding for products.
    pub fn embedding(&self) -> (BigUint, BigUint) {
        match self {
            WeilModel::ProjectiveSpace { n, .. } => (BigUint::from(*n), BigUint::one()),
            WeilModel::Elliptic { .. } => (BigUint::from(2u32), BigUint::from(3u32)),
            WeilModel::Product(parts) => {
                let mut r1 = BigUint::one(); // r + 1
                let mut deg = BigUint::one();
                let mut dim = 0u32;
                for p in parts {
                    let (r, d) = p.embedding();
                    let pd = p.dim();
                    deg = deg * d * binomial(dim + pd, pd);
                    dim += pd;
                    r1 *= r + 1u32;
                }
                (r1 - 1u32, deg)
            }
        }
    }

    /// Parse `pn:<n>@gf:q`, `elliptic:a=<int>@gf:q`, `prod:<m>*<m>`, or
    /// `segre-power:elliptic:a=<int>^<n>@gf:q`. The `@gf:q` suffix may be
    /// omitted when `default_q` is given.
    pub fn parse(s: &str, default_q: Option<u64>) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::parse(format!("bad model '{s}'"));
        if let Some(body) = s.strip_prefix("prod:") {
            let parts = body
                .split('*')
                .map(|p| Self::parse(p, default_q))
                .collect::<Result<Vec<_>>>()?;
            return Self::product(parts);
        }
        let (body, q) = match s.rsplit_once('@') {
            Some((b, f)) => {
                let f = f.trim();
                let f = f.strip_prefix("gf:").unwrap_or(f);
                let q = match f.split_once('^') {
                    Some((p, m)) => {
                        let p: u64 = p.parse().map_err(|_| bad())?;
                        let m: u32 = m.parse().map_err(|_| bad())?;
                        p.checked_pow(m).ok_or_else(bad)?
                    }
                    None => f.parse().map_err(|_| bad())?,
                };
                (b, q)
            }
            None => (s, default_q.ok_or_else(|| Error::parse(format!("model '{s}' needs @gf:q")))?),
        };
        if let Some(n) = body.strip_prefix("pn:") {
            return Self::projective_space(n.trim().parse().map_err(|_| bad())?, q);
        }
        if let Some(rest) = body.strip_prefix("segre-power:") {
            let (ell, n) = rest.rsplit_once('^').ok_or_else(bad)?;
            let n: u32 = n.trim().parse().map_err(|_| bad())?;
            let a = parse_trace(ell).ok_or_else(bad)?;
            return Self::segre_power(a, n, q);
        }
        if body.starts_with("elliptic:") {
            return Self::elliptic(parse_trace(body).ok_or_else(bad)?, q);
        }
        Err(bad())
    }
}

fn parse_trace(s: &str) -> Option<i64> {
    s.trim().strip_prefix("elliptic:a=")?.trim().parse().ok()
}

fn check_q(q: u64) -> Result<()> {
    prime_power(q).map(|_| ()).ok_or_else(|| Error::domain(format!("{q} is not a prime power")))
}

fn binomial(n: u32, k: u32) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

impl fmt::Display for WeilModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeilModel::ProjectiveSpace { n, q } => write!(f, "pn:{n}@gf:{q}"),
            WeilModel::Elliptic { a, q } => write!(f, "elliptic:a={a}@gf:{q}"),
            WeilModel::Product(parts) => {
                let all_same = parts.windows(2).all(|w| w[0] == w[1]);
                if let (true, WeilModel::Elliptic { a, q }) = (all_same, &parts[0]) {
                    return write!(f, "segre-power:elliptic:a={a}^{}@gf:{q}", parts.len());
                }
                let p: Vec<String> = parts.iter().map(|x| x.to_string()).collect();
                write!(f, "prod:{}", p.join("*"))
            }
        }
    }
}

/// `K = rational * (1 + q^{-1/2})^sqrt_q_terms`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthConstant {
    pub rational: BigRational,
    pub sqrt_q_terms: u32,
    pub q: u64,
}

impl GrowthConstant {
    pub fn rational(r: BigRational) -> Self {
        GrowthConstant { rational: r, sqrt_q_terms: 0, q: 2 }
    }

    pub fn enclosure(&self, bits: u32) -> crate::rigor::Enclosure {
        use crate::rigor::Enclosure;
        let base = Enclosure::from_rational(&self.rational, bits);
        if self.sqrt_q_terms == 0 {
            return base;
        }
        let root = Enclosure::from_int(self.q, bits).sqrt().expect("q > 0");
        let factor = Enclosure::one(bits).add(&root.recip().expect("q > 0"));
        base.mul(&factor.powi(self.sqrt_q_terms))
    }

    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64().unwrap_or(f64::INFINITY) * (1.0 + (self.q as f64).powf(-0.5)).powi(self.sqrt_q_terms as i32)
    }
}
