//! Brute-force ground truth for diagonal equations: solution testing by
//! direct univariate arithmetic, exhaustive freeness certification, and tiny
//! extremal searches.
//!
//! Everything here is deliberately independent of the coefficient-vector
//! encoding; the two routes are compared against each other in tests.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::field::Field;
use crate::algebra::unipoly::UniPoly;
use crate::budget::Budget;
use crate::encoding::EquationSpec;
use crate::error::{Error, Result};

/// A deduplicated, sorted subset of the polynomials of degree < n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolySet {
    n: usize,
    members: Vec<UniPoly>,
}

impl PolySet {
    /// Sorts and deduplicates; every member must have degree < n.
    pub fn new(n: usize, mut members: Vec<UniPoly>) -> Result<PolySet> {
        for m in &members {
            if let Some(deg) = m.degree() {
                if deg >= n {
                    return Err(Error::DegreeTooLarge { degree: deg, bound: n.saturating_sub(1) });
                }
            }
        }
        members.sort();
        members.dedup();
        Ok(PolySet { n, members })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[UniPoly] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// All q^n polynomials of degree < n, ordered lexicographically by ascending
/// coefficient vector (constant term most significant), coefficients compared
/// in the field's canonical element order.
pub fn enumerate_polys(f: &Field, n: usize) -> Vec<UniPoly> {
    f.domain_iter(n).map(UniPoly::from_coeffs).collect()
}

/// Whether sum a_i f_i^r = 0, by direct univariate arithmetic.
pub fn is_solution(eq: &EquationSpec, tuple: &[UniPoly], f: &Field) -> Result<bool> {
    if tuple.len() != eq.k() {
        return Err(Error::ArityMismatch { expected: eq.k(), got: tuple.len() });
    }
    let mut sum = UniPoly::zero();
    for (a, fi) in eq.coeffs.iter().zip(tuple) {
        sum = sum.add(&a.mul(&fi.pow(eq.r, f), f), f);
    }
    Ok(sum.is_zero())
}

/// Constant tuples (f, ..., f); empty and singleton tuples vacuously so.
pub fn is_trivial(tuple: &[UniPoly]) -> bool {
    tuple.windows(2).all(|w| w[0] == w[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FreeStatus {
    Free,
    Witness,
}

/// Outcome of a freeness check over a candidate set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub status: FreeStatus,
    /// The lexicographically first non-trivial solution, when one exists.
    pub witness: Option<Vec<UniPoly>>,
    /// Tuples inspected: the witness's position + 1, or the full count.
    pub tuples_examined: u64,
}

impl SolutionReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match self.status {
            FreeStatus::Free => s.push_str("status: free\n"),
            FreeStatus::Witness => s.push_str("status: witness\n"),
        }
        s.push_str(&format!("tuples_examined: {}\n", self.tuples_examined));
        if let Some(w) = &self.witness {
            for p in w {
                s.push_str(&format!("w={}\n", p.to_text()));
            }
        }
        s
    }
}

/// Scans all |A|^k tuples in lexicographic order (first coordinate most
/// significant) and reports the first non-trivial solution, or freeness.
///
/// The scan may be split across `threads` workers over disjoint index ranges;
/// the merged result is the minimum witness index, so output is independent
/// of the thread count.
pub fn verify_solution_free(
    set: &PolySet,
    eq: &EquationSpec,
    f: &Field,
    budget: &Budget,
    threads: usize,
) -> Result<SolutionReport> {
    let k = eq.k();
    let s = set.len() as u64;
    let total = (0..k).try_fold(1u64, |acc, _| acc.checked_mul(s)).filter(|&t| {
        t <= budget.max_tuples
    });
    let total = match total {
        Some(t) => t,
        None => {
            return Err(Error::SizeBudgetExceeded {
                what: "tuple enumeration",
                needed: (s as u128).pow(k as u32),
                cap: budget.max_tuples as u128,
            })
        }
    };
    if total == 0 {
        return Ok(SolutionReport { status: FreeStatus::Free, witness: None, tuples_examined: 0 });
    }

    // a_i * g^r for every member g, so a tuple test is k-1 additions
    let powers: Vec<Vec<UniPoly>> = eq
        .coeffs
        .iter()
        .map(|a| set.members().iter().map(|g| a.mul(&g.pow(eq.r, f), f)).collect())
        .collect();

    let check_range = |lo: u64, hi: u64| -> Option<u64> {
        let mut idx_digits = vec![0usize; k];
        for i in lo..hi {
            let mut rem = i;
            for d in (0..k).rev() {
                idx_digits[d] = (rem % s) as usize;
                rem /= s;
            }
            let trivial = idx_digits.windows(2).all(|w| w[0] == w[1]);
            if trivial {
                continue;
            }
            let mut sum = UniPoly::zero();
            for (c, &gi) in idx_digits.iter().enumerate() {
                sum = sum.add(&powers[c][gi], f);
            }
            if sum.is_zero() {
                return Some(i);
            }
        }
        None
    };

    let threads = threads.max(1).min(total as usize);
    let first_hit: Option<u64> = if threads == 1 {
        check_range(0, total)
    } else {
        let chunk = total.div_ceil(threads as u64);
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads as u64)
                .map(|t| {
                    let lo = t * chunk;
                    let hi = ((t + 1) * chunk).min(total);
                    scope.spawn(move || check_range(lo, hi.max(lo)))
                })
                .collect();
            handles.into_iter().filter_map(|h| h.join().unwrap()).min()
        })
    };

    Ok(match first_hit {
        Some(i) => {
            let mut rem = i;
            let mut digits = vec![0usize; k];
            for d in (0..k).rev() {
                digits[d] = (rem % s) as usize;
                rem /= s;
            }
            let witness = digits.iter().map(|&gi| set.members()[gi].clone()).collect();
            SolutionReport {
                status: FreeStatus::Witness,
                witness: Some(witness),
                tuples_examined: i + 1,
            }
        }
        None => SolutionReport { status: FreeStatus::Free, witness: None, tuples_examined: total },
    })
}

/// Exact maximum size of a solution-free subset of the q^n polynomials of
/// degree < n, with the lexicographically least witness set.
///
/// Enumerates subsets in decreasing size, within each size in lexicographic
/// order over sorted index combinations; requires q^n <= 16.
pub fn exhaustive_max_free(
    f: &Field,
    n: usize,
    eq: &EquationSpec,
    budget: &Budget,
) -> Result<(usize, PolySet)> {
    let universe = enumerate_polys(f, n);
    let u = universe.len();
    if u > 16 {
        return Err(Error::SizeBudgetExceeded {
            what: "subset enumeration universe",
            needed: u as u128,
            cap: 16,
        });
    }
    let k = eq.k() as u32;
    let mut spent: u64 = 0;

    for size in (1..=u).rev() {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let cost = (size as u64).pow(k);
            spent = spent.saturating_add(cost);
            if spent > budget.max_tuples {
                return Err(Error::SizeBudgetExceeded {
                    what: "cumulative tuple enumeration",
                    needed: spent as u128,
                    cap: budget.max_tuples as u128,
                });
            }
            let members: Vec<UniPoly> = combo.iter().map(|&i| universe[i].clone()).collect();
            let set = PolySet::new(n, members)?;
            let report = verify_solution_free(&set, eq, f, budget, 1)?;
            if report.status == FreeStatus::Free {
                return Ok((size, set));
            }

            // next combination in lexicographic order
            let mut pos = size;
            loop {
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
                pos -= 1;
                if combo[pos] < u - (size - pos) {
                    combo[pos] += 1;
                    for j in pos + 1..size {
                        combo[j] = combo[j - 1] + 1;
                    }
                    break;
                }
            }
            if pos == usize::MAX {
                break;
            }
        }
    }
    Ok((0, PolySet::new(n, Vec::new())?))
}

/// Greedy solution-free set: scan the q^n polynomials in a seeded random
/// order, keeping each one that preserves freeness. Only tuples that use the
/// new element are rechecked; all others were checked when added.
pub fn greedy_free(
    f: &Field,
    n: usize,
    eq: &EquationSpec,
    seed: u64,
    budget: &Budget,
) -> Result<PolySet> {
    let mut order = enumerate_polys(f, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let k = eq.k();
    let mut chosen: Vec<UniPoly> = Vec::new();
    let mut spent: u64 = 0;

    'cand: for g in order {
        let s = chosen.len() as u64 + 1;
        let cost = s.pow(k as u32) - (s - 1).pow(k as u32);
        spent = spent.saturating_add(cost);
        if spent > budget.max_tuples {
            return Err(Error::SizeBudgetExceeded {
                what: "cumulative tuple enumeration",
                needed: spent as u128,
                cap: budget.max_tuples as u128,
            });
        }

        // powers of the candidate pool: chosen + g at index s-1
        let mut pool = chosen.clone();
        pool.push(g.clone());
        let powers: Vec<Vec<UniPoly>> = eq
            .coeffs
            .iter()
            .map(|a| pool.iter().map(|p| a.mul(&p.pow(eq.r, f), f)).collect())
            .collect();

        // all index tuples over the pool that use index s-1 at least once
        let total = s.pow(k as u32);
        let mut digits = vec![0u64; k];
        for idx in 0..total {
            let mut rem = idx;
            for d in (0..k).rev() {
                digits[d] = rem % s;
                rem /= s;
            }
            if !digits.contains(&(s - 1)) {
                continue;
            }
            if digits.windows(2).all(|w| w[0] == w[1]) {
                continue;
            }
            let mut sum = UniPoly::zero();
            for (c, &gi) in digits.iter().enumerate() {
                sum = sum.add(&powers[c][gi as usize], f);
            }
            if sum.is_zero() {
                continue 'cand;
            }
        }
        chosen.push(g);
    }
    PolySet::new(n, chosen)
}

/// Parse a set file: header `q=.. [modulus=..] n=..`, then one polynomial per
/// line in ascending-coefficient form; `#` starts a comment.
pub fn parse_polyset_file(text: &str) -> Result<(Field, PolySet)> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty set file".into()))?;

    let mut q_clause = None;
    let mut modulus_clause = None;
    let mut n = None;
    for tok in header.split_whitespace() {
        if tok.starts_with("q=") {
            q_clause = Some(tok.to_string());
        } else if tok.starts_with("modulus=") {
            modulus_clause = Some(tok.to_string());
        } else if let Some(v) = tok.strip_prefix("n=") {
            n = Some(
                v.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad n in header: {v:?}")))?,
            );
        } else {
            return Err(Error::Parse(format!("unknown header token {tok:?}")));
        }
    }
    let q_clause = q_clause.ok_or_else(|| Error::Parse("header missing q=".into()))?;
    let n = n.ok_or_else(|| Error::Parse("header missing n=".into()))?;
    let field = Field::parse(&q_clause, modulus_clause.as_deref())?;

    let members = lines
        .map(|l| UniPoly::parse(l, &field))
        .collect::<Result<Vec<_>>>()?;
    let set = PolySet::new(n, members)?;
    Ok((field, set))
}

/// Inverse of [`parse_polyset_file`]; members in sorted order.
pub fn serialize_polyset_file(field: &Field, set: &PolySet) -> String {
    let mut s = String::new();
    if field.ext_degree() == 1 {
        s.push_str(&format!("q={} n={}\n", field.q(), set.n()));
    } else {
        let m = field
            .modulus()
            .expect("extension fields always carry a modulus")
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        s.push_str(&format!(
            "q={}^{} modulus={} n={}\n",
            field.p(),
            field.ext_degree(),
            m,
            set.n()
        ));
    }
    for p in set.members() {
        s.push_str(&format!("{}\n", p.to_text()));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Field {
        Field::new(3, 1, None).unwrap()
    }

    fn up(f: &Field, codes: &[u64]) -> UniPoly {
        UniPoly::from_coeffs(codes.iter().map(|&c| f.elem(c)).collect())
    }

    fn square_eq(f: &Field) -> EquationSpec {
        EquationSpec::new(2, 0, vec![up(f, &[1]), up(f, &[1]), up(f, &[1])], f).unwrap()
    }

    #[test]
    fn solution_oracle_basics() {
        let f = f3();
        let eq = square_eq(&f);
        for &x in f.elements() {
            let c = UniPoly::constant(x);
            assert!(is_solution(&eq, &[c.clone(), c.clone(), c], &f).unwrap());
        }
        let (z, o, t) = (up(&f, &[0]), up(&f, &[1]), up(&f, &[2]));
        assert!(is_solution(&eq, &[o.clone(), o.clone(), t.clone()], &f).unwrap());
        assert!(!is_solution(&eq, &[z.clone(), z.clone(), o.clone()], &f).unwrap());
        assert!(matches!(
            is_solution(&eq, &[z.clone(), o.clone()], &f),
            Err(Error::ArityMismatch { expected: 3, got: 2 })
        ));
        assert!(is_trivial(&[o.clone(), o.clone(), o.clone()]));
        assert!(!is_trivial(&[z.clone(), z, o]));
        assert!(is_trivial(&[t]));
        assert!(is_trivial(&[]));
    }

    #[test]
    fn enumeration_order_and_count() {
        let f = f3();
        let polys = enumerate_polys(&f, 2);
        assert_eq!(polys.len(), 9);
        // constant coefficient most significant: 0, t, 2t, 1, 1+t, ...
        assert_eq!(polys[0], UniPoly::zero());
        assert_eq!(polys[1], up(&f, &[0, 1]));
        assert_eq!(polys[3], up(&f, &[1, 0]));
        assert_eq!(polys[4], up(&f, &[1, 1]));
    }

    #[test]
    fn freeness_frozen_cases() {
        let f = f3();
        let eq = square_eq(&f);
        let budget = Budget::default();

        let a01 = PolySet::new(1, vec![up(&f, &[0]), up(&f, &[1])]).unwrap();
        let rep = verify_solution_free(&a01, &eq, &f, &budget, 1).unwrap();
        assert_eq!(rep.status, FreeStatus::Free);
        assert_eq!(rep.tuples_examined, 8);

        let a12 = PolySet::new(1, vec![up(&f, &[1]), up(&f, &[2])]).unwrap();
        let rep = verify_solution_free(&a12, &eq, &f, &budget, 1).unwrap();
        assert_eq!(rep.status, FreeStatus::Witness);
        let w = rep.witness.unwrap();
        assert_eq!(w, vec![up(&f, &[1]), up(&f, &[1]), up(&f, &[2])]);
        assert!(is_solution(&eq, &w, &f).unwrap());
        assert!(!is_trivial(&w));

        let empty = PolySet::new(1, vec![]).unwrap();
        let rep = verify_solution_free(&empty, &eq, &f, &budget, 1).unwrap();
        assert_eq!(rep.status, FreeStatus::Free);
    }

    #[test]
    fn freeness_thread_count_invariance() {
        let f = f3();
        let eq = square_eq(&f);
        let budget = Budget::default();
        let all = PolySet::new(1, enumerate_polys(&f, 1)).unwrap();
        let base = verify_solution_free(&all, &eq, &f, &budget, 1).unwrap();
        for threads in [2, 3, 7] {
            let rep = verify_solution_free(&all, &eq, &f, &budget, threads).unwrap();
            assert_eq!(rep, base);
        }
    }

    #[test]
    fn budget_on_tuple_enumeration() {
        let f = f3();
        let eq = square_eq(&f);
        let tight = Budget { max_tuples: 7, ..Budget::default() };
        let a01 = PolySet::new(1, vec![up(&f, &[0]), up(&f, &[1])]).unwrap();
        assert!(matches!(
            verify_solution_free(&a01, &eq, &f, &tight, 1),
            Err(Error::SizeBudgetExceeded { .. })
        ));
    }

    #[test]
    fn exhaustive_max_free_squares() {
        let f = f3();
        let eq = square_eq(&f);
        let (size, set) = exhaustive_max_free(&f, 1, &eq, &Budget::default()).unwrap();
        assert_eq!(size, 2);
        assert_eq!(set.members(), &[up(&f, &[0]), up(&f, &[1])]);
    }

    #[test]
    fn exhaustive_max_free_linear_k4() {
        // f1 + f2 + f3 + f4 = 0 over F_2: any 2-set {g, h} admits (g, g, h, h).
        let f = Field::new(2, 1, None).unwrap();
        let one = up(&f, &[1]);
        let eq = EquationSpec::new(1, 0, vec![one.clone(); 4], &f).unwrap();
        let (size, set) = exhaustive_max_free(&f, 1, &eq, &Budget::default()).unwrap();
        assert_eq!(size, 1);
        assert_eq!(set.members(), &[UniPoly::zero()]);
    }

    #[test]
    fn greedy_is_free_deterministic_and_bounded() {
        let f = f3();
        let eq = square_eq(&f);
        let budget = Budget::default();
        for seed in 0..5u64 {
            let set = greedy_free(&f, 1, &eq, seed, &budget).unwrap();
            let rep = verify_solution_free(&set, &eq, &f, &budget, 1).unwrap();
            assert_eq!(rep.status, FreeStatus::Free, "seed {seed}");
            assert!(!set.is_empty() && set.len() <= 2);
            let again = greedy_free(&f, 1, &eq, seed, &budget).unwrap();
            assert_eq!(set, again);
        }
    }

    #[test]
    fn polyset_file_round_trip() {
        let f = f3();
        let set = PolySet::new(2, vec![up(&f, &[1, 2]), up(&f, &[0, 1]), up(&f, &[1, 2])]).unwrap();
        assert_eq!(set.len(), 2); // dedup
        let text = serialize_polyset_file(&f, &set);
        let (f2, set2) = parse_polyset_file(&text).unwrap();
        assert_eq!(f, f2);
        assert_eq!(set, set2);

        let manual = "q=3 n=1  # header\n0\n1\n";
        let (_, s) = parse_polyset_file(manual).unwrap();
        assert_eq!(s.members(), &[UniPoly::zero(), up(&f, &[1])]);

        assert!(parse_polyset_file("").is_err());
        assert!(parse_polyset_file("n=1\n0\n").is_err());
        assert!(parse_polyset_file("q=3 n=1\n0 0 7\n").is_err());
        // member with degree >= n
        assert!(parse_polyset_file("q=3 n=1\n1 2\n").is_err());
    }

    #[test]
    fn report_text_shapes() {
        let f = f3();
        let eq = square_eq(&f);
        let a12 = PolySet::new(1, vec![up(&f, &[1]), up(&f, &[2])]).unwrap();
        let rep = verify_solution_free(&a12, &eq, &f, &Budget::default(), 1).unwrap();
        let text = rep.to_text();
        assert!(text.starts_with("status: witness\n"));
        assert!(text.contains("w=1\n"));
        assert!(text.contains("w=2\n"));
    }
}
