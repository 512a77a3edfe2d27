//! Sparse multivariate polynomials over F_q.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors, so iteration order
//! (and therefore every serialized form) is the lexicographic order on
//! exponent vectors. Reduction folds exponents through x^q = x, which
//! preserves the polynomial as a function on (F_q)^n while capping every
//! exponent at q - 1.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::field::{Elem, Field};
use crate::error::{Error, Result};

/// Exponent vector of one term; ordering is lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// Degree counting only variables in `lo..hi`.
    pub fn degree_in(&self, lo: usize, hi: usize) -> u64 {
        self.0[lo..hi].iter().map(|&e| e as u64).sum()
    }

    /// Fold every positive exponent e to ((e - 1) mod (q - 1)) + 1; exponent 0
    /// is untouched. This is the monomial-level shadow of x^q = x.
    pub fn fold_exponents(&self, q: u64) -> Monomial {
        let qm1 = (q - 1) as u32;
        Monomial(
            self.0
                .iter()
                .map(|&e| if e == 0 { 0 } else { (e - 1) % qm1 + 1 })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "MultiPolyRepr", from = "MultiPolyRepr")]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Elem>,
}

/// Wire form: explicit (exponents, coefficient code) pairs, since JSON maps
/// cannot key on vectors.
#[derive(Serialize, Deserialize)]
struct MultiPolyRepr {
    nvars: usize,
    terms: Vec<(Vec<u32>, u64)>,
}

impl From<MultiPoly> for MultiPolyRepr {
    fn from(p: MultiPoly) -> MultiPolyRepr {
        MultiPolyRepr {
            nvars: p.nvars,
            terms: p.terms.into_iter().map(|(m, c)| (m.0, c.code())).collect(),
        }
    }
}

impl From<MultiPolyRepr> for MultiPoly {
    fn from(r: MultiPolyRepr) -> MultiPoly {
        let terms = r
            .terms
            .into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|(m, c)| (Monomial(m), Elem(c.min(u16::MAX as u64) as u16)))
            .collect();
        MultiPoly { nvars: r.nvars, terms }
    }
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> MultiPoly {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Elem) -> MultiPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial(vec![0; nvars]), c);
        }
        MultiPoly { nvars, terms }
    }

    pub fn one(nvars: usize, f: &Field) -> MultiPoly {
        MultiPoly::constant(nvars, f.one())
    }

    /// The single variable x_i.
    pub fn variable(nvars: usize, i: usize, f: &Field) -> MultiPoly {
        assert!(i < nvars);
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(exps), f.one());
        MultiPoly { nvars, terms }
    }

    /// Combine explicit terms, summing duplicates and dropping zeros.
    pub fn from_terms(
        nvars: usize,
        pairs: impl IntoIterator<Item = (Monomial, Elem)>,
        f: &Field,
    ) -> MultiPoly {
        let mut terms: BTreeMap<Monomial, Elem> = BTreeMap::new();
        for (m, c) in pairs {
            assert_eq!(m.nvars(), nvars, "term width mismatch");
            let entry = terms.entry(m).or_insert_with(|| f.zero());
            *entry = f.add(*entry, c);
        }
        terms.retain(|_, c| !c.is_zero());
        MultiPoly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Elem)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, m: &Monomial) -> Elem {
        self.terms.get(m).copied().unwrap_or_default()
    }

    /// Max total degree over terms; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// All element codes must index into `f`'s tables; deserialized data is
    /// checked through here before any arithmetic touches it.
    pub fn check_codes(&self, f: &Field) -> Result<()> {
        for (m, c) in &self.terms {
            if c.code() >= f.q() {
                return Err(Error::Parse(format!(
                    "coefficient code {} out of range for q = {}",
                    c.code(),
                    f.q()
                )));
            }
            if m.nvars() != self.nvars {
                return Err(Error::DimensionMismatch { expected: self.nvars, got: m.nvars() });
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiPoly, f: &Field) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = self.terms.clone();
        for (m, &c) in &other.terms {
            let entry = terms.entry(m.clone()).or_insert_with(|| f.zero());
            *entry = f.add(*entry, c);
        }
        terms.retain(|_, c| !c.is_zero());
        MultiPoly { nvars: self.nvars, terms }
    }

    pub fn sub(&self, other: &MultiPoly, f: &Field) -> MultiPoly {
        self.add(&other.scale(f.neg(f.one()), f), f)
    }

    pub fn scale(&self, a: Elem, f: &Field) -> MultiPoly {
        if a.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        let terms = self.terms.iter().map(|(m, &c)| (m.clone(), f.mul(a, c))).collect();
        MultiPoly { nvars: self.nvars, terms }
    }

    /// Product with no exponent folding: formal degrees add.
    pub fn mul_raw(&self, other: &MultiPoly, f: &Field) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut terms: BTreeMap<Monomial, Elem> = BTreeMap::new();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let m = Monomial(ma.0.iter().zip(&mb.0).map(|(&x, &y)| x + y).collect());
                let entry = terms.entry(m).or_insert_with(|| f.zero());
                *entry = f.add(*entry, f.mul(ca, cb));
            }
        }
        terms.retain(|_, c| !c.is_zero());
        MultiPoly { nvars: self.nvars, terms }
    }

    /// Product with every accumulated term folded through x^q = x, erroring
    /// once the accumulator exceeds `max_terms`. Folding keeps the term count
    /// bounded by q^nvars no matter how many factors are chained.
    pub fn mul_reduced(&self, other: &MultiPoly, f: &Field, max_terms: usize) -> Result<MultiPoly> {
        assert_eq!(self.nvars, other.nvars);
        let q = f.q();
        let mut terms: BTreeMap<Monomial, Elem> = BTreeMap::new();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let raw = Monomial(ma.0.iter().zip(&mb.0).map(|(&x, &y)| x + y).collect());
                let m = raw.fold_exponents(q);
                let entry = terms.entry(m).or_insert_with(|| f.zero());
                *entry = f.add(*entry, f.mul(ca, cb));
                if terms.len() > max_terms {
                    return Err(Error::SizeBudgetExceeded {
                        what: "multivariate terms",
                        needed: terms.len() as u128,
                        cap: max_terms as u128,
                    });
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(MultiPoly { nvars: self.nvars, terms })
    }

    pub fn pow_reduced(&self, exp: u32, f: &Field, max_terms: usize) -> Result<MultiPoly> {
        let mut acc = MultiPoly::one(self.nvars, f);
        for _ in 0..exp {
            acc = acc.mul_reduced(self, f, max_terms)?;
        }
        Ok(acc)
    }

    /// Re-read this polynomial in a wider variable space, with its own
    /// variables placed at `offset..offset + self.nvars()`.
    pub fn embed(&self, nvars: usize, offset: usize) -> MultiPoly {
        assert!(offset + self.nvars <= nvars, "embedding window out of range");
        let terms = self
            .terms
            .iter()
            .map(|(m, &c)| {
                let mut exps = vec![0u32; nvars];
                exps[offset..offset + self.nvars].copy_from_slice(&m.0);
                (Monomial(exps), c)
            })
            .collect();
        MultiPoly { nvars, terms }
    }

    /// Fold every term's exponents through x^q = x and recombine. The result
    /// has per-variable degree <= q - 1 and the same values on all of (F_q)^n.
    pub fn reduce_exponents(&self, f: &Field) -> MultiPoly {
        let q = f.q();
        MultiPoly::from_terms(
            self.nvars,
            self.terms.iter().map(|(m, &c)| (m.fold_exponents(q), c)),
            f,
        )
    }

    pub fn eval(&self, point: &[Elem], f: &Field) -> Elem {
        assert_eq!(point.len(), self.nvars, "evaluation point width mismatch");
        let mut acc = f.zero();
        for (m, &c) in &self.terms {
            let mut t = c;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = f.mul(t, f.pow(point[i], e as u64));
                }
            }
            acc = f.add(acc, t);
        }
        acc
    }

    /// Deterministic text form: terms in exponent-lex order, coefficients as
    /// codes, e.g. `1 + 2*x0^2*x1`.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut vars = String::new();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                vars.push_str(&format!("*x{i}"));
                if e > 1 {
                    vars.push_str(&format!("^{e}"));
                }
            }
            if vars.is_empty() {
                parts.push(format!("{}", c.code()));
            } else {
                parts.push(format!("{}{vars}", c.code()));
            }
        }
        parts.join(" + ")
    }
}
