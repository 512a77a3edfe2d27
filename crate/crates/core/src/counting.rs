//! Exact monomial counting and the bound arithmetic built on top of it.
//!
//! The counting side is exact (arbitrary precision); the concentration side
//! deliberately carries values in log_q scale so that reports stay meaningful
//! far past the range of u64 or f64.

use num::bigint::BigUint;
use num::rational::Ratio;
use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// |{(e_1..e_n) : 0 <= e_i <= q-1, sum e_i <= floor(d)}|, exactly.
///
/// `d` may be any real; the floor is taken, and anything below 0 (including
/// NaN) admits no monomials at all. Dynamic programming over variables with a
/// prefix-sum convolution, so each variable costs O(cap) big-integer adds.
pub fn exact_monomial_count(n: u64, d: f64, q: u64) -> BigUint {
    assert!(q >= 2, "field order must be >= 2");
    let d = d.floor();
    if d.is_nan() || d < 0.0 {
        return BigUint::zero();
    }
    let full = n * (q - 1);
    let cap = if d >= full as f64 { full } else { d as u64 };

    // dp[t] = number of exponent vectors over the first v variables with sum t.
    let mut dp = vec![BigUint::zero(); cap as usize + 1];
    dp[0] = BigUint::one();
    let w = (q - 1) as usize; // per-variable window
    for _ in 0..n {
        // prefix[t] = sum of dp[0..=t]
        let mut prefix = Vec::with_capacity(dp.len() + 1);
        prefix.push(BigUint::zero());
        for v in &dp {
            let last = prefix.last().unwrap().clone();
            prefix.push(last + v);
        }
        for t in (0..dp.len()).rev() {
            let lo = t.saturating_sub(w);
            dp[t] = &prefix[t + 1] - &prefix[lo];
        }
    }
    dp.into_iter().sum()
}

/// q^n * e^{-n eps^2 / 2}: the deviation bound on the monomial count.
pub fn hoeffding_bound(n: u64, epsilon: f64, q: u64) -> Result<f64> {
    Ok(hoeffding_bound_ln(n, epsilon, q)?.exp())
}

/// Natural log of [`hoeffding_bound`], safe for large n.
pub fn hoeffding_bound_ln(n: u64, epsilon: f64, q: u64) -> Result<f64> {
    check_epsilon(epsilon)?;
    assert!(q >= 2);
    Ok(n as f64 * ((q as f64).ln() - epsilon * epsilon / 2.0))
}

/// c(eps, q) = 1 - eps^2 / (2 ln q), the exponent with
/// q^{n c} = q^n e^{-n eps^2/2}. Always in (0, 1) on the valid range.
pub fn c_exponent(epsilon: f64, q: u64) -> Result<f64> {
    check_epsilon(epsilon)?;
    assert!(q >= 2);
    Ok(1.0 - epsilon * epsilon / (2.0 * (q as f64).ln()))
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 0.5 {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange(epsilon))
    }
}

/// eps(r) = 1 / (4 (2 r^2 + 1)), exact.
pub fn epsilon_of_r(r: u64) -> Ratio<u64> {
    assert!(r >= 1);
    let den = 4u64
        .checked_mul(2 * r * r + 1)
        .expect("r far beyond any usable range");
    Ratio::new(1, den)
}

/// Whether m*l/k <= (1/2 - eps) * n, by exact cross-multiplication.
pub fn proposition_condition(m: u64, l: u64, k: u64, n: u64, epsilon: Ratio<u64>) -> bool {
    assert!(k >= 1);
    let (num, den) = (*epsilon.numer() as u128, *epsilon.denom() as u128);
    // m*l/k <= n (den - 2 num) / (2 den), rhs negative iff eps > 1/2.
    if 2 * num > den {
        return false;
    }
    let lhs = 2 * den * m as u128 * l as u128;
    let rhs = k as u128 * n as u128 * (den - 2 * num);
    lhs <= rhs
}

/// Everything the headline bound says about one parameter tuple.
///
/// `applicable` is false when k < 2r^2 + 1, in which case the bound asserts
/// nothing; the other flags are informational. The bound itself is
/// k * C * q^{c n} with C = q^{4(d+1)r}, carried in log_q scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub q: u64,
    pub r: u64,
    pub k: u64,
    pub d: u64,
    pub n: u64,
    /// eps(r) as an exact fraction.
    pub epsilon_num: u64,
    pub epsilon_den: u64,
    pub epsilon: f64,
    pub c_exponent: f64,
    /// C = q^{logq_c_constant}, i.e. the exponent 4(d+1)r.
    pub logq_c_constant: u64,
    /// log_q of the full bound k * C * q^{c n}.
    pub logq_bound: f64,
    /// The bound as a float when it fits; None once it overflows f64.
    pub bound_approx: Option<f64>,
    /// Ceiling of `bound_approx` when that fits in u64 (a bound survives
    /// rounding up); None otherwise.
    pub bound_ceiling: Option<u64>,
    pub m: u64,
    pub ell: u64,
    /// k >= 2r^2 + 1.
    pub k_condition: bool,
    /// n >= 4(d+1)r.
    pub n_condition: bool,
    /// m*l/k <= (1/2 - eps) n, exact.
    pub prop_condition: bool,
    pub applicable: bool,
}

/// Evaluates the headline size bound at one parameter tuple.
///
/// Inapplicability (k < 2r^2 + 1) is data on the report, not an error.
pub fn theorem_bound(q: u64, r: u64, k: u64, d: u64, n: u64) -> BoundReport {
    assert!(q >= 2 && r >= 1 && k >= 2 && n >= 1);
    let eps = epsilon_of_r(r);
    let epsilon = *eps.numer() as f64 / *eps.denom() as f64;
    let c = c_exponent(epsilon, q).expect("eps(r) is always in (0, 1/2)");
    let logq_c_constant = 4 * (d + 1) * r;
    let logq_bound = (k as f64).ln() / (q as f64).ln() + logq_c_constant as f64 + c * n as f64;
    let ln_bound = logq_bound * (q as f64).ln();
    let bound_approx = (ln_bound < (f64::MAX).ln()).then(|| ln_bound.exp());
    let bound_ceiling = bound_approx
        .filter(|b| *b < u64::MAX as f64)
        .map(|b| b.ceil() as u64);
    let m = (n - 1) * r + d + 1;

    BoundReport {
        q,
        r,
        k,
        d,
        n,
        epsilon_num: *eps.numer(),
        epsilon_den: *eps.denom(),
        epsilon,
        c_exponent: c,
        logq_c_constant,
        logq_bound,
        bound_approx,
        bound_ceiling,
        m,
        ell: r,
        k_condition: k > 2 * r * r,
        n_condition: n >= 4 * (d + 1) * r,
        prop_condition: proposition_condition(m, r, k, n, eps),
        applicable: k > 2 * r * r,
    }
}

impl BoundReport {
    pub fn to_text(&self) -> String {
        let bound_line = match (self.bound_approx, self.bound_ceiling) {
            (Some(b), Some(c)) => format!("{b:.6e} (integer ceiling {c})"),
            (Some(b), None) => format!("{b:.6e}"),
            _ => "overflows f64; use the log_q value".to_string(),
        };
        let mut s = String::new();
        s.push_str("bound report\n");
        s.push_str(&format!(
            "  q={} r={} k={} d={} n={} (m={} l={})\n",
            self.q, self.r, self.k, self.d, self.n, self.m, self.ell
        ));
        s.push_str(&format!(
            "  epsilon = {}/{} (~{:.9})\n",
            self.epsilon_num, self.epsilon_den, self.epsilon
        ));
        s.push_str(&format!("  c = {:.9}\n", self.c_exponent));
        s.push_str(&format!("  C = q^{}\n", self.logq_c_constant));
        s.push_str(&format!(
            "  bound = k * C * q^(c*n); log_q(bound) = {:.6}; value = {}\n",
            self.logq_bound, bound_line
        ));
        s.push_str(&format!(
            "  flags: k>=2r^2+1: {}; n>=4(d+1)r: {}; m*l/k<=(1/2-eps)n: {}\n",
            self.k_condition, self.n_condition, self.prop_condition
        ));
        s.push_str(&format!("  applicable: {}\n", self.applicable));
        s.push_str(
            "  note: the deviation factor is the conservative e^(-n*eps^2/2); \
             the sharper e^(-2*n*eps^2) form would shrink the bound further\n",
        );
        s
    }

    pub fn csv_header() -> &'static str {
        "q,r,k,d,n,epsilon,c,logq_bound,flags"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}/{},{:.9},{:.6},k_ok={};n_ok={};prop_ok={}",
            self.q,
            self.r,
            self.k,
            self.d,
            self.n,
            self.epsilon_num,
            self.epsilon_den,
            self.c_exponent,
            self.logq_bound,
            self.k_condition,
            self.n_condition,
            self.prop_condition
        )
    }
}
