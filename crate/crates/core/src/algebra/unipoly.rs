//! Univariate polynomials over F_q, the raw objects the searches range over.
//!
//! Coefficients are stored ascending (constant term first) with no trailing
//! zeros, so the zero polynomial is the empty vector and `degree` is `None`
//! for it.

use serde::{Deserialize, Serialize};

use super::field::{Elem, Field};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UniPoly {
    coeffs: Vec<Elem>,
}

impl UniPoly {
    pub fn zero() -> UniPoly {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Elem) -> UniPoly {
        UniPoly::from_coeffs(vec![c])
    }

    /// From ascending coefficients; trailing zeros are trimmed.
    pub fn from_coeffs(mut coeffs: Vec<Elem>) -> UniPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    /// Ascending coefficients, no trailing zeros.
    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// Coefficient of x^i (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &UniPoly, f: &Field) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        UniPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &UniPoly, f: &Field) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect();
        UniPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, a: Elem, f: &Field) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|&c| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &UniPoly, f: &Field) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn pow(&self, exp: u32, f: &Field) -> UniPoly {
        let mut acc = UniPoly::constant(f.one());
        for _ in 0..exp {
            acc = acc.mul(self, f);
        }
        acc
    }

    pub fn eval(&self, x: Elem, f: &Field) -> Elem {
        let mut acc = f.zero();
        for &c in self.coeffs.iter().rev() {
            acc = f.add(f.mul(acc, x), c);
        }
        acc
    }

    /// Text form: ascending coefficient codes separated by single spaces;
    /// the zero polynomial prints as `0`.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            "0".to_string()
        } else {
            self.coeffs
                .iter()
                .map(|c| c.code().to_string())
                .collect::<Vec<_>>()
                .join(" ")
        }
    }

    pub fn parse(s: &str, f: &Field) -> Result<UniPoly> {
        let mut coeffs = Vec::new();
        for tok in s.split_whitespace() {
            let c = tok
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad coefficient {tok:?}")))?;
            coeffs.push(f.try_elem(c)?);
        }
        if coeffs.is_empty() {
            return Err(Error::Parse("empty polynomial text".into()));
        }
        Ok(UniPoly::from_coeffs(coeffs))
    }
}
