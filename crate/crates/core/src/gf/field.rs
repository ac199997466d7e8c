use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};
use std::collections::HashMap;

use crate::error::{Error, Result};

/// Largest field order for which log/antilog tables are built.
pub const MAX_FIELD_ORDER: u32 = 1 << 20;
const ADD_TABLE_MAX: u32 = 512;

/// Element of a field, encoded as the integer `sum c_i p^i` of its
/// coefficient vector in the polynomial basis `1, t, t^2, ...`.
pub type Code = u32;

struct FieldInner {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus, low coefficient first, length m + 1.
    modulus: Vec<u32>,
    /// exp[i] = g^i for i in 0..2(q-1).
    exp: Vec<Code>,
    /// log[x] for x != 0.
    log: Vec<u32>,
    add_table: Option<Vec<Code>>,
}

/// `F_q = F_p[t]/(modulus)` with precomputed multiplication tables.
#[derive(Clone)]
pub struct FieldSpec(Arc<FieldInner>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Split `q` as `p^m`, or `None` if it is not a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut m = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p as u32, m))
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p, low coefficient first.

fn trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let c = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &bi) in b.iter().enumerate() {
            let idx = i + shift;
            r[idx] = (r[idx] + p - (c as u64 * bi as u64 % p as u64) as u32) % p;
        }
        trim(&mut r);
    }
    r
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn code_to_poly(mut c: u32, p: u32, m: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(m as usize);
    for _ in 0..m {
        v.push(c % p);
        c /= p;
    }
    v
}

fn poly_to_code(v: &[u32], p: u32) -> u32 {
    v.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

/// True when the monic `f` of degree m has no factor of degree 1..=m/2.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let m = f.len() as u32 - 1;
    if m <= 1 {
        return m == 1;
    }
    for deg in 1..=m / 2 {
        let count = p.pow(deg);
        for low in 0..count {
            let mut g = code_to_poly(low, p, deg);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible of degree `m` over `F_p`,
/// ordering by the integer code of the non-leading coefficients.
fn least_irreducible(p: u32, m: u32) -> Vec<u32> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Vec<u32>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(p, m)) {
        return v.clone();
    }
    let count = p.pow(m);
    let found = (0..count)
        .map(|low| {
            let mut f = code_to_poly(low, p, m);
            f.push(1);
            f
        })
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree");
    cache.lock().unwrap().insert((p, m), found.clone());
    found
}

impl FieldSpec {
    /// `F_{p^m}` with the lexicographically least irreducible modulus.
    pub fn new(p: u32, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if m == 0 {
            return Err(Error::domain("extension degree must be positive"));
        }
        Self::check_order(p, m)?;
        let modulus = least_irreducible(p, m);
        Self::build(p, modulus)
    }

    /// The prime-power field of order `q`.
    pub fn of_order(q: u64) -> Result<Self> {
        let (p, m) = prime_power(q).ok_or_else(|| Error::domain(format!("{q} is not a prime power")))?;
        Self::new(p, m)
    }

    /// Field with an explicit monic modulus (low coefficient first).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        let m = modulus.len().saturating_sub(1) as u32;
        if m == 0 || m > 16 || modulus[m as usize] != 1 {
            return Err(Error::domain("modulus must be monic of degree 1..=16"));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::domain("modulus coefficients must be reduced mod p"));
        }
        Self::check_order(p, m)?;
        if !is_irreducible(&modulus, p) {
            return Err(Error::domain("modulus is reducible"));
        }
        Self::build(p, modulus)
    }

    fn check_order(p: u32, m: u32) -> Result<()> {
        let q = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if q > MAX_FIELD_ORDER as u64 {
            return Err(Error::capacity(format!("field order {p}^{m} exceeds 2^20")));
        }
        Ok(())
    }

    fn build(p: u32, modulus: Vec<u32>) -> Result<Self> {
        let m = modulus.len() as u32 - 1;
        let q = p.pow(m);
        let mulmod = |a: u32, b: u32| -> u32 {
            let av = code_to_poly(a, p, m);
            let bv = code_to_poly(b, p, m);
            let mut prod = vec![0u32; (2 * m) as usize];
            for (i, &x) in av.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in bv.iter().enumerate() {
                    prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
                }
            }
            let r = poly_rem(&prod, &modulus, p);
            poly_to_code(&r, p)
        };
        let powmod = |mut b: u32, mut e: u64| -> u32 {
            let mut r = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    r = mulmod(r, b);
                }
                b = mulmod(b, b);
                e >>= 1;
            }
            r
        };
        let order = (q - 1) as u64;
        let factors = distinct_prime_factors(order);
        let gen = (1..q.max(2))
            .find(|&g| q == 2 || factors.iter().all(|&l| powmod(g, order / l) != 1))
            .unwrap_or(1);
        let n = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..n.max(1) {
            exp[i] = x;
            log[x as usize] = i as u32;
            x = mulmod(x, gen);
        }
        for i in 0..n.max(1) {
            exp[i + n.max(1)] = exp[i];
        }
        let mut inner = FieldInner { p, m, q, modulus, exp, log, add_table: None };
        if p != 2 && m > 1 && q <= ADD_TABLE_MAX {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = digit_add(a, b, p, m);
                }
            }
            inner.add_table = Some(t);
        }
        Ok(FieldSpec(Arc::new(inner)))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn m(&self) -> u32 {
        self.0.m
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// `gf:p` or `gf:p^m`.
    pub fn name(&self) -> String {
        if self.0.m == 1 {
            format!("gf:{}", self.0.p)
        } else {
            format!("gf:{}^{}", self.0.p, self.0.m)
        }
    }

    /// Parse `gf:p`, `gf:p^m`, or a bare prime power such as `4`.
    pub fn parse(s: &str) -> Result<Self> {
        let body = s.trim();
        let body = body.strip_prefix("gf:").unwrap_or(body);
        if let Some((p, m)) = body.split_once('^') {
            let p: u32 = p.trim().parse().map_err(|_| Error::parse(format!("bad field '{s}'")))?;
            let m: u32 = m.trim().parse().map_err(|_| Error::parse(format!("bad field '{s}'")))?;
            return Self::new(p, m);
        }
        let q: u64 = body.parse().map_err(|_| Error::parse(format!("bad field '{s}'")))?;
        Self::of_order(q)
    }

    #[inline]
    pub fn add(&self, a: Code, b: Code) -> Code {
        let f = &*self.0;
        if f.p == 2 {
            a ^ b
        } else if f.m == 1 {
            let s = a + b;
            if s >= f.p {
                s - f.p
            } else {
                s
            }
        } else if let Some(t) = &f.add_table {
            t[(a * f.q + b) as usize]
        } else {
            digit_add(a, b, f.p, f.m)
        }
    }

    #[inline]
    pub fn neg(&self, a: Code) -> Code {
        let f = &*self.0;
        if f.p == 2 || a == 0 {
            a
        } else if f.m == 1 {
            f.p - a
        } else {
            let mut out = 0;
            let mut x = a;
            let mut place = 1;
            for _ in 0..f.m {
                let d = x % f.p;
                out += ((f.p - d) % f.p) * place;
                x /= f.p;
                place *= f.p;
            }
            out
        }
    }

    #[inline]
    pub fn sub(&self, a: Code, b: Code) -> Code {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Code, b: Code) -> Code {
        if a == 0 || b == 0 {
            return 0;
        }
        let f = &*self.0;
        f.exp[(f.log[a as usize] + f.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: Code) -> Result<Code> {
        if a == 0 {
            return Err(Error::domain("inverse of zero"));
        }
        let f = &*self.0;
        let n = f.q - 1;
        Ok(f.exp[((n - f.log[a as usize]) % n) as usize])
    }

    pub fn div(&self, a: Code, b: Code) -> Result<Code> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Code, e: u64) -> Code {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let f = &*self.0;
        let n = (f.q - 1) as u64;
        f.exp[((f.log[a as usize] as u64 * (e % n)) % n) as usize]
    }

    /// Discrete log base the table generator; `a` must be nonzero.
    #[inline]
    pub fn log(&self, a: Code) -> u32 {
        self.0.log[a as usize]
    }

    /// `g^k` for the table generator `g`, any `k < 2(q-1)`.
    #[inline]
    pub fn exp(&self, k: u32) -> Code {
        self.0.exp[k as usize]
    }

    /// Image of the integer `k` under `Z -> F_p -> F_q`.
    pub fn from_int(&self, k: i64) -> Code {
        k.rem_euclid(self.0.p as i64) as Code
    }

    /// Coefficient vector (length m) of an element.
    pub fn coeffs(&self, a: Code) -> Vec<u32> {
        code_to_poly(a, self.0.p, self.0.m)
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Result<Code> {
        if c.len() > self.0.m as usize || c.iter().any(|&x| x >= self.0.p) {
            return Err(Error::domain("coefficient vector does not describe an element"));
        }
        Ok(poly_to_code(c, self.0.p))
    }

    /// Code of the class of `t` (the polynomial generator).
    pub fn t(&self) -> Code {
        if self.0.m == 1 {
            // F_p: t is a root of a monic linear modulus t + c.
            self.neg(self.0.modulus[0])
        } else {
            self.0.p
        }
    }

    /// Print as an integer for prime fields and as `(c0,c1,...)` otherwise.
    pub fn format(&self, a: Code) -> String {
        if self.0.m == 1 {
            a.to_string()
        } else {
            let c: Vec<String> = self.coeffs(a).iter().map(|x| x.to_string()).collect();
            format!("({})", c.join(","))
        }
    }

    /// Parse an element literal printed by [`FieldSpec::format`]; integers
    /// are read through `Z -> F_p`.
    pub fn parse_element(&self, s: &str) -> Result<Code> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
            let c: std::result::Result<Vec<u32>, _> =
                inner.split(',').map(|x| x.trim().parse::<u32>()).collect();
            let c = c.map_err(|_| Error::parse(format!("bad element '{s}'")))?;
            return self.from_coeffs(&c);
        }
        let k: i64 = s.parse().map_err(|_| Error::parse(format!("bad element '{s}'")))?;
        Ok(self.from_int(k))
    }

    /// Every element in code order.
    pub fn codes(&self) -> std::ops::Range<Code> {
        0..self.0.q
    }
}

fn digit_add(mut a: u32, mut b: u32, p: u32, m: u32) -> u32 {
    let mut out = 0;
    let mut place = 1;
    for _ in 0..m {
        let d = (a % p + b % p) % p;
        out += d * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

/// An element together with its field.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: FieldSpec,
    code: Code,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(self.code))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(self.code))
    }
}

/// Operation selector for [`field_op`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
}

impl FieldElement {
    pub fn new(field: &FieldSpec, code: Code) -> Result<Self> {
        if code >= field.q() {
            return Err(Error::domain("element code out of range"));
        }
        Ok(FieldElement { field: field.clone(), code })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn code(&self) -> Code {
        self.code
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.code)
    }

    fn same_field(&self, other: &FieldElement) -> Result<()> {
        if self.field != other.field {
            return Err(Error::domain("elements belong to different fields"));
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(FieldElement { field: self.field.clone(), code: self.field.add(self.code, other.code) })
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(FieldElement { field: self.field.clone(), code: self.field.mul(self.code, other.code) })
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(FieldElement { field: self.field.clone(), code: self.field.inv(self.code)? })
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        FieldElement { field: self.field.clone(), code: self.field.pow(self.code, e) }
    }
}

/// Binary or unary field operation; `b` is ignored for `Inv`.
pub fn field_op(a: &FieldElement, b: &FieldElement, op: FieldOp) -> Result<FieldElement> {
    match op {
        FieldOp::Add => a.add(b),
        FieldOp::Mul => a.mul(b),
        FieldOp::Inv => a.inv(),
    }
}

/// All elements of the field in code order.
pub fn enumerate_field(field: &FieldSpec) -> Result<Vec<FieldElement>> {
    enumerate_field_capped(field, MAX_FIELD_ORDER)
}

pub fn enumerate_field_capped(field: &FieldSpec, cap: u32) -> Result<Vec<FieldElement>> {
    if field.q() > cap {
        return Err(Error::capacity(format!("field of order {} exceeds cap {cap}", field.q())));
    }
    Ok(field
        .codes()
        .map(|c| FieldElement { field: field.clone(), code: c })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f2_one_plus_one() {
        let f = FieldSpec::new(2, 1).unwrap();
        assert_eq!(f.add(1, 1), 0);
    }

    #[test]
    fn f4_t_squared() {
        let f = FieldSpec::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let t = f.t();
        // t*t = t + 1.
        assert_eq!(f.coeffs(f.mul(t, t)), vec![1, 1]);
    }

    #[test]
    fn f3_inverse_of_two() {
        let f = FieldSpec::new(3, 1).unwrap();
        assert_eq!(f.inv(2).unwrap(), 2);
        assert!(matches!(f.inv(0), Err(Error::Domain(_))));
    }

    #[test]
    fn enumeration_small_fields() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let e: Vec<u32> = enumerate_field(&f2).unwrap().iter().map(|x| x.code()).collect();
        assert_eq!(e, vec![0, 1]);
        assert_eq!(enumerate_field(&FieldSpec::new(2, 2).unwrap()).unwrap().len(), 4);
        let f9 = FieldSpec::new(3, 2).unwrap();
        let all = enumerate_field(&f9).unwrap();
        assert_eq!(all.len(), 9);
        assert!(all.iter().all(|x| x.pow(9) == *x));
        assert!(matches!(enumerate_field_capped(&f9, 8), Err(Error::Capacity(_))));
    }

    /// Exhaustive field axioms for every field of order at most 9.
    #[test]
    fn field_axioms_exhaustive() {
        for (p, m) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
            let f = FieldSpec::new(p, m).unwrap();
            let q = f.q();
            for a in 0..q {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn explicit_modulus_validation() {
        assert!(FieldSpec::with_modulus(2, vec![1, 0, 1]).is_err()); // (t+1)^2
        assert!(FieldSpec::with_modulus(2, vec![1, 1, 1]).is_ok());
        assert!(FieldSpec::with_modulus(4, vec![1, 1]).is_err());
        // t^2 + 1 over F_3 is irreducible but t is not primitive.
        let f = FieldSpec::with_modulus(3, vec![1, 0, 1]).unwrap();
        assert_eq!(f.pow(f.t(), 4), 1);
        assert!(f.codes().all(|a| f.pow(a, 9) == a));
    }

    #[test]
    fn parse_specs_and_elements() {
        assert_eq!(FieldSpec::parse("gf:2").unwrap().q(), 2);
        assert_eq!(FieldSpec::parse("gf:3^2").unwrap().q(), 9);
        assert_eq!(FieldSpec::parse("4").unwrap().name(), "gf:2^2");
        assert!(FieldSpec::parse("gf:6").is_err());
        let f = FieldSpec::parse("gf:3^2").unwrap();
        let x = f.parse_element("(1,2)").unwrap();
        assert_eq!(f.format(x), "(1,2)");
        assert_eq!(f.parse_element("-1").unwrap(), 2);
    }
}
