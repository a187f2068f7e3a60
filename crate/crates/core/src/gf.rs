//! Table-driven arithmetic for the small Galois fields used as coordinate rings.
//!
//! Elements are dense ids `0..q`. An element of an extension of degree `d` over a
//! field of order `b` is stored as the polynomial `c_0 + c_1 x + ... + c_{d-1} x^{d-1}`
//! with id `c_0 + c_1 b + ... + c_{d-1} b^{d-1}`, so `0` and `1` are always the
//! additive and multiplicative identities, and the subfield sits at ids `0..b`.

use thiserror::Error;

/// A field element id.
pub type Elem = u8;

/// Field orders with precomputed tables.
pub const SUPPORTED_ORDERS: [usize; 9] = [2, 3, 4, 5, 7, 8, 9, 16, 25];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct FieldTable {
    p: u32,
    e: u32,
    q: usize,
    /// Monic irreducible modulus, constant term first, with coefficients in the
    /// subfield of order `modulus_base`. Prime fields store `[0, 1]` (the polynomial `x`).
    modulus: Vec<Elem>,
    modulus_base: usize,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
}

impl std::fmt::Debug for FieldTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldTable")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .field("modulus_base", &self.modulus_base)
            .finish()
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Builds `GF(p^e)` over the lowest monic irreducible polynomial of degree `e`.
pub fn field_new(p: u32, e: u32) -> Result<FieldTable, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::UnsupportedField(format!("{p} is not prime")));
    }
    if e == 0 {
        return Err(FieldError::UnsupportedField("extension degree must be at least 1".into()));
    }
    let q = (p as usize).checked_pow(e).unwrap_or(usize::MAX);
    if !SUPPORTED_ORDERS.contains(&q) {
        return Err(FieldError::UnsupportedField(format!("GF({p}^{e}) is outside the supported set")));
    }
    let prime = prime_field(p);
    if e == 1 {
        Ok(prime)
    } else {
        Ok(extend(&prime, e as usize))
    }
}

/// Builds `GF(q)` from its order, rejecting anything that is not a supported prime power.
pub fn field_of_order(q: usize) -> Result<FieldTable, FieldError> {
    for p in 2..=q as u32 {
        if !is_prime(p) || q % p as usize != 0 {
            continue;
        }
        let mut e = 0;
        let mut rest = q;
        while rest % p as usize == 0 {
            rest /= p as usize;
            e += 1;
        }
        if rest != 1 {
            break;
        }
        return field_new(p, e);
    }
    Err(FieldError::UnsupportedField(format!("{q} is not a prime power")))
}

fn prime_field(p: u32) -> FieldTable {
    let q = p as usize;
    let mut add = vec![0; q * q];
    let mut mul = vec![0; q * q];
    for a in 0..q {
        for b in 0..q {
            add[a * q + b] = ((a + b) % q) as Elem;
            mul[a * q + b] = ((a * b) % q) as Elem;
        }
    }
    finish(p, 1, q, vec![0, 1], q, add, mul)
}

fn finish(
    p: u32,
    e: u32,
    q: usize,
    modulus: Vec<Elem>,
    modulus_base: usize,
    add: Vec<Elem>,
    mul: Vec<Elem>,
) -> FieldTable {
    let mut neg = vec![0; q];
    let mut inv = vec![0; q];
    for a in 0..q {
        for b in 0..q {
            if add[a * q + b] == 0 {
                neg[a] = b as Elem;
            }
            if mul[a * q + b] == 1 {
                inv[a] = b as Elem;
            }
        }
    }
    FieldTable { p, e, q, modulus, modulus_base, add, mul, neg, inv }
}

/// Polynomial helpers over a base table; coefficient vectors are constant term first.
mod poly {
    use super::{Elem, FieldTable};

    pub fn trim(mut a: Vec<Elem>) -> Vec<Elem> {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        a
    }

    pub fn mul(f: &FieldTable, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        trim(out)
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    pub fn rem_monic(f: &FieldTable, a: &[Elem], m: &[Elem]) -> Vec<Elem> {
        let dm = m.len() - 1;
        let mut r = a.to_vec();
        while r.len() > dm && r.len() > 1 {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - dm;
            if lead != 0 {
                for (i, &c) in m.iter().enumerate() {
                    r[shift + i] = f.sub(r[shift + i], f.mul(lead, c));
                }
            }
            r.pop();
        }
        trim(r)
    }

    /// Monic polynomial of the given degree whose lower coefficients are the base-`q`
    /// digits of `code`.
    pub fn monic_from_code(q: usize, degree: usize, mut code: usize) -> Vec<Elem> {
        let mut c = Vec::with_capacity(degree + 1);
        for _ in 0..degree {
            c.push((code % q) as Elem);
            code /= q;
        }
        c.push(1);
        c
    }

    pub fn is_irreducible(f: &FieldTable, m: &[Elem]) -> bool {
        let d = m.len() - 1;
        for fd in 1..=d / 2 {
            for code in 0..f.order().pow(fd as u32) {
                let factor = monic_from_code(f.order(), fd, code);
                if rem_monic(f, m, &factor).iter().all(|&c| c == 0) {
                    return false;
                }
            }
        }
        true
    }
}

/// Degree-`d` extension of `base` over the lowest monic irreducible polynomial.
fn extend(base: &FieldTable, d: usize) -> FieldTable {
    let b = base.q;
    let q = b.pow(d as u32);
    let modulus = (0..b.pow(d as u32))
        .map(|code| poly::monic_from_code(b, d, code))
        .find(|m| poly::is_irreducible(base, m))
        .expect("an irreducible polynomial exists in every degree");
    let digits = |mut v: usize| -> Vec<Elem> {
        (0..d)
            .map(|_| {
                let c = (v % b) as Elem;
                v /= b;
                c
            })
            .collect()
    };
    let encode = |c: &[Elem]| -> usize { c.iter().rev().fold(0, |acc, &x| acc * b + x as usize) };
    let mut add = vec![0; q * q];
    let mut mul = vec![0; q * q];
    for x in 0..q {
        let cx = digits(x);
        for y in 0..q {
            let cy = digits(y);
            let sum: Vec<Elem> = cx.iter().zip(&cy).map(|(&s, &t)| base.add(s, t)).collect();
            add[x * q + y] = encode(&sum) as Elem;
            let mut prod = poly::rem_monic(base, &poly::mul(base, &cx, &cy), &modulus);
            prod.resize(d, 0);
            mul[x * q + y] = encode(&prod) as Elem;
        }
    }
    finish(base.p, base.e * d as u32, q, modulus, b, add, mul)
}

impl FieldTable {
    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.e
    }

    /// The defining polynomial, constant term first.
    pub fn modulus(&self) -> &[Elem] {
        &self.modulus
    }

    /// Order of the field holding the modulus coefficients.
    pub fn modulus_base(&self) -> usize {
        self.modulus_base
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        (a != 0).then(|| self.inv[a as usize])
    }

    pub fn pow(&self, a: Elem, k: u32) -> Elem {
        (0..k).fold(1, |acc, _| self.mul(acc, a))
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(|a| a as Elem)
    }

    /// `a ↦ a^p`.
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.p)
    }
}

/// A field extension `GF(q^d) / GF(q)` with the coordinate map onto `GF(q)^d`
/// with respect to the polynomial basis `1, x, ..., x^{d-1}`.
#[derive(Debug, Clone)]
pub struct Extension {
    pub base: FieldTable,
    pub field: FieldTable,
    pub degree: usize,
}

/// An extension element together with its base-field coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtElement {
    pub value: Elem,
    pub coords: Vec<Elem>,
}

/// Builds the degree-`degree` extension of `base`.
pub fn ext_field(base: &FieldTable, degree: usize) -> Result<Extension, FieldError> {
    if degree == 0 {
        return Err(FieldError::UnsupportedField("extension degree must be at least 1".into()));
    }
    let order = base.q.checked_pow(degree as u32).unwrap_or(usize::MAX);
    if !SUPPORTED_ORDERS.contains(&order) {
        return Err(FieldError::UnsupportedField(format!(
            "extension of GF({}) of degree {degree} is outside the supported set",
            base.q
        )));
    }
    let field = if degree == 1 { base.clone() } else { extend(base, degree) };
    Ok(Extension { base: base.clone(), field, degree })
}

impl Extension {
    pub fn coords(&self, value: Elem) -> Vec<Elem> {
        let b = self.base.q;
        let mut v = value as usize;
        (0..self.degree)
            .map(|_| {
                let c = (v % b) as Elem;
                v /= b;
                c
            })
            .collect()
    }

    pub fn from_coords(&self, coords: &[Elem]) -> Elem {
        debug_assert_eq!(coords.len(), self.degree);
        coords.iter().rev().fold(0usize, |acc, &c| acc * self.base.q + c as usize) as Elem
    }

    pub fn element(&self, value: Elem) -> ExtElement {
        ExtElement { value, coords: self.coords(value) }
    }

    /// The copy of a base element inside the extension.
    pub fn embed(&self, a: Elem) -> Elem {
        a
    }
}
