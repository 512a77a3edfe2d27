//! Arithmetic in F_q for prime powers q = p^e.
//!
//! Elements are stored as compact codes in `[0, q)`: the base-p digits of a
//! code are the coordinates of the element in the F_p-basis 1, g, ..., g^{e-1},
//! where g is the class of the generator modulo the irreducible modulus.
//! All arithmetic goes through tables precomputed at construction, so the
//! per-operation cost is a lookup and the whole field fits desk scale
//! (q <= [`MAX_Q`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_Q: u64 = 1024;

/// Irreducible moduli (ascending coefficients over F_p) for the prime powers
/// supported without a user-supplied modulus.
const BUILTIN_MODULI: &[(u64, &[u64])] = &[
    (4, &[1, 1, 1]),           // t^2 + t + 1 over F_2
    (8, &[1, 1, 0, 1]),        // t^3 + t + 1 over F_2
    (9, &[1, 0, 1]),           // t^2 + 1 over F_3
    (16, &[1, 1, 0, 0, 1]),    // t^4 + t + 1 over F_2
    (25, &[1, 1, 1]),          // t^2 + t + 1 over F_5
    (27, &[1, 2, 0, 1]),       // t^3 + 2t + 1 over F_3
    (32, &[1, 0, 1, 0, 0, 1]), // t^5 + t^2 + 1 over F_2
    (49, &[3, 1, 1]),          // t^2 + t + 3 over F_7
    (64, &[1, 1, 0, 0, 0, 0, 1]), // t^6 + t + 1 over F_2
];

/// An element of a [`Field`], stored as its code in `[0, q)`.
///
/// Codes are only meaningful relative to the field that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub(crate) u16);

impl Elem {
    /// The element's code: base-p digit i is the coordinate of g^i.
    pub fn code(self) -> u64 {
        self.0 as u64
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for Elem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite field F_q, q = p^e, with all arithmetic tables precomputed.
#[derive(Debug, Clone)]
pub struct Field {
    p: u64,
    e: u32,
    q: u64,
    modulus: Option<Vec<u64>>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>, // inv[0] unused
    /// Every element exactly once, sorted by their F_p-basis coordinates
    /// compared lexicographically (coordinate of 1 first). This is the
    /// enumeration order used by every deterministic search in the crate.
    order: Vec<Elem>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}
impl Eq for Field {}

impl Field {
    /// Build F_{p^e}. For e > 1 the modulus is taken from the argument or the
    /// built-in table; it must be monic, of degree e, and irreducible over F_p.
    pub fn new(p: u64, e: u32, modulus: Option<Vec<u64>>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NonPrimeP(p));
        }
        if e == 0 {
            return Err(Error::UnsupportedSize("extension degree must be >= 1".into()));
        }
        let q = checked_pow(p, e)
            .filter(|&q| q <= MAX_Q)
            .ok_or_else(|| Error::UnsupportedSize(format!("q = {p}^{e} exceeds the cap {MAX_Q}")))?;

        let modulus = if e == 1 {
            None
        } else {
            let m = match modulus {
                Some(m) => m,
                None => BUILTIN_MODULI
                    .iter()
                    .find(|(bq, _)| *bq == q)
                    .map(|(_, m)| m.to_vec())
                    .ok_or_else(|| {
                        Error::UnsupportedSize(format!(
                            "no built-in modulus for q = {p}^{e}; supply one"
                        ))
                    })?,
            };
            validate_modulus(p, e, &m)?;
            Some(m)
        };

        Ok(Self::build(p, e, q, modulus))
    }

    /// Build the field of order q, factoring q = p^e.
    pub fn from_order(q: u64, modulus: Option<Vec<u64>>) -> Result<Field> {
        let (p, e) = factor_prime_power(q)
            .ok_or_else(|| Error::UnsupportedSize(format!("q = {q} is not a prime power >= 2")))?;
        Field::new(p, e, modulus)
    }

    /// Parse a field description: a `q=<order>` or `q=<p>^<e>` clause plus an
    /// optional `modulus=c0,c1,...,ce` clause (ascending coefficients over F_p).
    pub fn parse(q_clause: &str, modulus_clause: Option<&str>) -> Result<Field> {
        let q_val = q_clause
            .strip_prefix("q=")
            .unwrap_or(q_clause)
            .trim()
            .to_string();
        let modulus = match modulus_clause {
            None => None,
            Some(m) => {
                let body = m.strip_prefix("modulus=").unwrap_or(m).trim();
                let coeffs = body
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<u64>()
                            .map_err(|_| Error::Parse(format!("bad modulus coefficient {t:?}")))
                    })
                    .collect::<Result<Vec<u64>>>()?;
                Some(coeffs)
            }
        };
        if let Some((ps, es)) = q_val.split_once('^') {
            let p = ps
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad prime {ps:?}")))?;
            let e = es
                .trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad extension degree {es:?}")))?;
            Field::new(p, e, modulus)
        } else {
            let q = q_val
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad field order {q_val:?}")))?;
            Field::from_order(q, modulus)
        }
    }

    fn build(p: u64, e: u32, q: u64, modulus: Option<Vec<u64>>) -> Field {
        let qs = q as usize;
        let mod_digits: Vec<u64> = modulus.clone().unwrap_or_default();

        let mut add = vec![0u16; qs * qs];
        let mut mul = vec![0u16; qs * qs];
        let mut neg = vec![0u16; qs];
        for a in 0..qs {
            let da = digits(a as u64, p, e);
            let mut nd: Vec<u64> = da.iter().map(|&c| (p - c) % p).collect();
            neg[a] = code(&nd, p) as u16;
            for b in a..qs {
                let db = digits(b as u64, p, e);
                nd = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                let s = code(&nd, p) as u16;
                add[a * qs + b] = s;
                add[b * qs + a] = s;
                let prod = poly_mul_mod(&da, &db, p, e, &mod_digits);
                let m = code(&prod, p) as u16;
                mul[a * qs + b] = m;
                mul[b * qs + a] = m;
            }
        }

        // a^{q-2} is a^{-1} for a != 0.
        let mut inv = vec![0u16; qs];
        for a in 1..qs {
            let mut acc = 1u16;
            let mut base = a as u16;
            let mut exp = q - 2;
            while exp > 0 {
                if exp & 1 == 1 {
                    acc = mul[acc as usize * qs + base as usize];
                }
                base = mul[base as usize * qs + base as usize];
                exp >>= 1;
            }
            debug_assert_eq!(mul[a * qs + acc as usize], 1);
            inv[a] = acc;
        }

        let mut order: Vec<Elem> = (0..q as u16).map(Elem).collect();
        order.sort_by_key(|el| {
            let d = digits(el.code(), p, e);
            d.iter().fold(0u64, |acc, &c| acc * p + c)
        });

        Field { p, e, q, modulus, add, mul, neg, inv, order }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ext_degree(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// The irreducible modulus (ascending coefficients); `None` for prime fields.
    pub fn modulus(&self) -> Option<&[u64]> {
        self.modulus.as_deref()
    }

    pub fn zero(&self) -> Elem {
        Elem(0)
    }

    pub fn one(&self) -> Elem {
        Elem(1)
    }

    /// The element with the given code. Panics if `c >= q`.
    pub fn elem(&self, c: u64) -> Elem {
        assert!(c < self.q, "code {c} out of range for q = {}", self.q);
        Elem(c as u16)
    }

    /// Checked variant of [`Field::elem`] for parsing paths.
    pub fn try_elem(&self, c: u64) -> Result<Elem> {
        if c < self.q {
            Ok(Elem(c as u16))
        } else {
            Err(Error::Parse(format!("element code {c} out of range for q = {}", self.q)))
        }
    }

    /// Image of an integer under Z -> F_p -> F_q (lands in the prime subfield).
    pub fn from_int(&self, i: i64) -> Elem {
        let r = i.rem_euclid(self.p as i64) as u64;
        Elem(r as u16)
    }

    /// Basis coordinates (coefficient of 1 first) of an element.
    pub fn rep(&self, a: Elem) -> Vec<u64> {
        digits(a.code(), self.p, self.e)
    }

    /// The element with the given basis coordinates.
    pub fn elem_from_rep(&self, rep: &[u64]) -> Result<Elem> {
        if rep.len() != self.e as usize {
            return Err(Error::DimensionMismatch { expected: self.e as usize, got: rep.len() });
        }
        if rep.iter().any(|&c| c >= self.p) {
            return Err(Error::Parse("basis coordinate out of range".into()));
        }
        Ok(Elem(code(rep, self.p) as u16))
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.add[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.mul[a.0 as usize * self.q as usize + b.0 as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.is_zero() {
            None
        } else {
            Some(Elem(self.inv[a.0 as usize]))
        }
    }

    pub fn pow(&self, a: Elem, mut exp: u64) -> Elem {
        let mut acc = self.one();
        let mut base = a;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Every element once, in the crate's canonical enumeration order
    /// (basis coordinates compared lexicographically).
    pub fn elements(&self) -> &[Elem] {
        &self.order
    }

    /// Sort key realizing the enumeration order of [`Field::elements`].
    pub fn sort_key(&self, a: Elem) -> u64 {
        let d = digits(a.code(), self.p, self.e);
        d.iter().fold(0u64, |acc, &c| acc * self.p + c)
    }

    /// q^nvars, or `None` on overflow.
    pub fn domain_size(&self, nvars: usize) -> Option<u128> {
        let mut acc: u128 = 1;
        for _ in 0..nvars {
            acc = acc.checked_mul(self.q as u128)?;
        }
        Some(acc)
    }

    /// The `index`-th point of (F_q)^nvars in lexicographic order (variable 0
    /// most significant), with coordinates ordered as in [`Field::elements`].
    pub fn point_at(&self, nvars: usize, index: u128) -> Vec<Elem> {
        let mut point = vec![self.zero(); nvars];
        let mut rem = index;
        for v in (0..nvars).rev() {
            let d = (rem % self.q as u128) as usize;
            point[v] = self.order[d];
            rem /= self.q as u128;
        }
        debug_assert_eq!(rem, 0);
        point
    }

    /// Iterator over all of (F_q)^nvars in the order of [`Field::point_at`].
    pub fn domain_iter(&self, nvars: usize) -> DomainIter<'_> {
        DomainIter { field: self, nvars, index: 0, size: self.domain_size(nvars) }
    }
}

/// Lexicographic iterator over (F_q)^nvars.
pub struct DomainIter<'a> {
    field: &'a Field,
    nvars: usize,
    index: u128,
    size: Option<u128>,
}

impl Iterator for DomainIter<'_> {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        let size = self.size?;
        if self.index >= size {
            return None;
        }
        let point = self.field.point_at(self.nvars, self.index);
        self.index += 1;
        Some(point)
    }
}

fn digits(mut c: u64, p: u64, e: u32) -> Vec<u64> {
    let mut out = Vec::with_capacity(e as usize);
    for _ in 0..e {
        out.push(c % p);
        c /= p;
    }
    out
}

fn code(digits: &[u64], p: u64) -> u64 {
    digits.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Product of two digit polynomials reduced modulo the monic modulus, all over F_p.
fn poly_mul_mod(a: &[u64], b: &[u64], p: u64, e: u32, modulus: &[u64]) -> Vec<u64> {
    let e = e as usize;
    if e == 1 {
        return vec![a[0] * b[0] % p];
    }
    let mut prod = vec![0u64; 2 * e - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // The modulus is monic, so clearing leading coefficients terminates.
    for i in (e..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for (j, &m) in modulus.iter().enumerate().take(e) {
            let idx = i - e + j;
            prod[idx] = (prod[idx] + c * (p - m % p)) % p;
        }
    }
    prod.truncate(e);
    prod
}

fn validate_modulus(p: u64, e: u32, m: &[u64]) -> Result<()> {
    let e = e as usize;
    if m.len() != e + 1 {
        return Err(Error::Parse(format!(
            "modulus must list {} coefficients, got {}",
            e + 1,
            m.len()
        )));
    }
    if m.iter().any(|&c| c >= p) {
        return Err(Error::Parse("modulus coefficient out of range".into()));
    }
    if m[e] != 1 {
        return Err(Error::Parse("modulus must be monic".into()));
    }
    // Exhaustive trial division by every monic polynomial of degree <= e/2.
    for deg in 1..=e / 2 {
        let combos = checked_pow(p, deg as u32).expect("small by construction");
        for idx in 0..combos {
            let mut div = digits(idx, p, deg as u32);
            div.push(1);
            if poly_divides(&div, m, p) {
                return Err(Error::ReducibleModulus { p, factor_degree: deg });
            }
        }
    }
    Ok(())
}

/// Whether monic `d` divides `m` over F_p.
fn poly_divides(d: &[u64], m: &[u64], p: u64) -> bool {
    let mut rem: Vec<u64> = m.to_vec();
    let dd = d.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let shift = rem.len() - 1 - dd;
            for (j, &c) in d.iter().enumerate() {
                let idx = shift + j;
                rem[idx] = (rem[idx] + lead * (p - c % p)) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Factor q as p^e with p prime, if possible.
pub fn factor_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut rest = q;
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            return (rest == 1).then_some((p, e));
        }
        p += 1;
    }
    Some((q, 1))
}

fn checked_pow(p: u64, e: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}
