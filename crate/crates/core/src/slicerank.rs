//! Indicator polynomials of zero sets, their slot-by-slot covers, and the
//! slice-rank oracles that bound covers from below.
//!
//! The variable space is k slots of n variables; slot j owns the flat
//! variables j*n .. (j+1)*n. A cover writes a polynomial P on that space as
//! sum_j sum_{p in M_j} p(X_j) * F_{j,p}(all other slots); its size is
//! sum |M_j|, and the minimum size over covers is the slice rank.

use std::collections::{BTreeMap, BTreeSet};

use num::rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::field::{Elem, Field};
use crate::algebra::multipoly::{Monomial, MultiPoly};
use crate::budget::Budget;
use crate::encoding::PolyMap;
use crate::error::{Error, Result};

/// P = prod_i (1 - Phi_i^{q-1}), reduced: 1 on the zero set of the map, 0
/// elsewhere. The empty map gives the constant 1.
pub fn indicator_poly(map: &PolyMap, f: &Field, budget: &Budget) -> Result<MultiPoly> {
    let nvars = map.nvars_in();
    let needed = f.domain_size(nvars).unwrap_or(u128::MAX);
    if needed > budget.max_terms as u128 {
        return Err(Error::SizeBudgetExceeded {
            what: "indicator terms",
            needed,
            cap: budget.max_terms as u128,
        });
    }
    let qm1 = (f.q() - 1) as u32;
    let one = MultiPoly::one(nvars, f);
    let mut acc = one.clone();
    for coord in map.coords() {
        let power = coord.pow_reduced(qm1, f, budget.max_terms)?;
        let factor = one.sub(&power, f);
        acc = acc.mul_reduced(&factor, f, budget.max_terms)?;
    }
    Ok(acc)
}

/// A polynomial cover: per-slot monomial sets M_j and, for every admitted
/// (slot, monomial) pair, a cofactor polynomial in the other slots' (k-1)*n
/// variables (in increasing slot order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SliceCoverRepr", from = "SliceCoverRepr")]
pub struct SliceCover {
    pub k: usize,
    pub n: usize,
    /// Degree bound used for slot admission, kept exact.
    pub threshold: Ratio<u64>,
    pub slots: Vec<BTreeSet<Monomial>>,
    pub cofactors: BTreeMap<(usize, Monomial), MultiPoly>,
}

/// Wire form with explicit pairs (JSON maps cannot key on tuples).
#[derive(Serialize, Deserialize)]
struct SliceCoverRepr {
    k: usize,
    n: usize,
    threshold: (u64, u64),
    slots: Vec<Vec<Vec<u32>>>,
    cofactors: Vec<(usize, Vec<u32>, MultiPoly)>,
}

impl From<SliceCover> for SliceCoverRepr {
    fn from(c: SliceCover) -> SliceCoverRepr {
        SliceCoverRepr {
            k: c.k,
            n: c.n,
            threshold: (*c.threshold.numer(), *c.threshold.denom()),
            slots: c
                .slots
                .into_iter()
                .map(|s| s.into_iter().map(|m| m.0).collect())
                .collect(),
            cofactors: c
                .cofactors
                .into_iter()
                .map(|((j, m), p)| (j, m.0, p))
                .collect(),
        }
    }
}

impl From<SliceCoverRepr> for SliceCover {
    fn from(r: SliceCoverRepr) -> SliceCover {
        SliceCover {
            k: r.k,
            n: r.n,
            threshold: Ratio::new(r.threshold.0, r.threshold.1.max(1)),
            slots: r
                .slots
                .into_iter()
                .map(|s| s.into_iter().map(Monomial).collect())
                .collect(),
            cofactors: r
                .cofactors
                .into_iter()
                .map(|(j, m, p)| ((j, Monomial(m)), p))
                .collect(),
        }
    }
}

impl SliceCover {
    pub fn size(&self) -> u64 {
        self.slots.iter().map(|s| s.len() as u64).sum()
    }

    /// Structural checks: shapes, slot-monomial degree admission, per-variable
    /// degree <= q-1, and coefficient codes in range. Run on anything
    /// deserialized before arithmetic touches it.
    pub fn validate(&self, f: &Field) -> Result<()> {
        if self.slots.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, got: self.slots.len() });
        }
        let qm1 = (f.q() - 1) as u32;
        for slot in &self.slots {
            for m in slot {
                if m.nvars() != self.n {
                    return Err(Error::DimensionMismatch { expected: self.n, got: m.nvars() });
                }
                if Ratio::from_integer(m.total_degree()) > self.threshold {
                    return Err(Error::Parse(format!(
                        "slot monomial {:?} exceeds the admission threshold",
                        m.0
                    )));
                }
                if m.0.iter().any(|&e| e > qm1) {
                    return Err(Error::Parse(format!(
                        "slot monomial {:?} has an exponent above q-1",
                        m.0
                    )));
                }
            }
        }
        for ((j, m), cof) in &self.cofactors {
            if *j >= self.k || !self.slots[*j].contains(m) {
                return Err(Error::Parse(format!(
                    "cofactor key (slot {}, {:?}) has no matching slot monomial",
                    j + 1,
                    m.0
                )));
            }
            if cof.nvars() != (self.k - 1) * self.n {
                return Err(Error::DimensionMismatch {
                    expected: (self.k - 1) * self.n,
                    got: cof.nvars(),
                });
            }
            cof.check_codes(f)?;
        }
        Ok(())
    }

    /// Deterministic certificate text: slots and cofactor term maps in
    /// lexicographic order.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "cover: k={} n={} threshold={}/{} size={}\n",
            self.k,
            self.n,
            self.threshold.numer(),
            self.threshold.denom(),
            self.size()
        );
        for (j, slot) in self.slots.iter().enumerate() {
            s.push_str(&format!("slot {}:\n", j + 1));
            for m in slot {
                let exps = m.0.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
                let cof = self
                    .cofactors
                    .get(&(j, m.clone()))
                    .map(MultiPoly::to_text)
                    .unwrap_or_else(|| "0".to_string());
                s.push_str(&format!("  p=({exps}) F={cof}\n"));
            }
        }
        s
    }
}

/// Assigns every monomial of P to the smallest slot where its slot-degree is
/// at most `threshold`, splitting it into slot monomial times cofactor.
/// The output satisfies Eq-style identity P = sum p(X_j) F_{j,p} exactly, by
/// construction at the level of terms.
pub fn build_cover(
    p: &MultiPoly,
    k: usize,
    n: usize,
    threshold: Ratio<u64>,
    f: &Field,
) -> Result<SliceCover> {
    assert!(k >= 1 && n >= 1);
    assert_eq!(p.nvars(), k * n, "polynomial width must be k*n");

    let mut slots: Vec<BTreeSet<Monomial>> = vec![BTreeSet::new(); k];
    let mut cof_terms: BTreeMap<(usize, Monomial), Vec<(Monomial, Elem)>> = BTreeMap::new();

    for (mono, c) in p.terms() {
        let slot = (0..k).find(|&j| {
            Ratio::from_integer(mono.degree_in(j * n, (j + 1) * n)) <= threshold
        });
        let j = match slot {
            Some(j) => j,
            None => return Err(Error::NoAdmissibleSlot(mono.0.clone())),
        };
        let pj = Monomial(mono.0[j * n..(j + 1) * n].to_vec());
        let mut rest = Vec::with_capacity((k - 1) * n);
        rest.extend_from_slice(&mono.0[..j * n]);
        rest.extend_from_slice(&mono.0[(j + 1) * n..]);
        slots[j].insert(pj.clone());
        cof_terms.entry((j, pj)).or_default().push((Monomial(rest), c));
    }

    let cofactors = cof_terms
        .into_iter()
        .map(|(key, terms)| (key, MultiPoly::from_terms((k - 1) * n, terms, f)))
        .collect();
    Ok(SliceCover { k, n, threshold, slots, cofactors })
}

/// How a cover is checked against its polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    /// Every point of the q^{k n} domain.
    Exhaustive,
    /// A fixed number of seeded-random points.
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverVerdict {
    Pass { points_checked: u64 },
    /// First failing point in enumeration (or sampling) order.
    Fail { index: u128, point: Vec<Elem> },
}

/// Checks P(x) = sum_j sum_{p in M_j} p(x_j) F_{j,p}(x_others) pointwise.
///
/// Exhaustive mode walks the whole domain (budget-capped, chunked across
/// `threads` with the minimum failing index winning, so the verdict never
/// depends on the thread count). Sampled mode draws points from the given
/// seed on one thread.
pub fn verify_cover(
    p: &MultiPoly,
    cover: &SliceCover,
    f: &Field,
    mode: VerifyMode,
    budget: &Budget,
    threads: usize,
) -> Result<CoverVerdict> {
    cover.validate(f)?;
    let (k, n) = (cover.k, cover.n);
    if p.nvars() != k * n {
        return Err(Error::DimensionMismatch { expected: k * n, got: p.nvars() });
    }

    let rhs = |point: &[Elem]| -> Elem {
        let mut acc = f.zero();
        for j in 0..k {
            if cover.slots[j].is_empty() {
                continue;
            }
            let mut others = Vec::with_capacity((k - 1) * n);
            others.extend_from_slice(&point[..j * n]);
            others.extend_from_slice(&point[(j + 1) * n..]);
            for m in &cover.slots[j] {
                let mut mv = f.one();
                for (i, &e) in m.0.iter().enumerate() {
                    if e > 0 {
                        mv = f.mul(mv, f.pow(point[j * n + i], e as u64));
                    }
                }
                if mv.is_zero() {
                    continue;
                }
                if let Some(cof) = cover.cofactors.get(&(j, m.clone())) {
                    acc = f.add(acc, f.mul(mv, cof.eval(&others, f)));
                }
            }
        }
        acc
    };

    match mode {
        VerifyMode::Exhaustive => {
            let size = f.domain_size(k * n).unwrap_or(u128::MAX);
            if size > budget.max_points as u128 {
                return Err(Error::SizeBudgetExceeded {
                    what: "verification points",
                    needed: size,
                    cap: budget.max_points as u128,
                });
            }
            let size = size as u64;
            let check_range = |lo: u64, hi: u64| -> Option<u64> {
                for i in lo..hi {
                    let point = f.point_at(k * n, i as u128);
                    if p.eval(&point, f) != rhs(&point) {
                        return Some(i);
                    }
                }
                None
            };
            let threads = threads.max(1).min(size.max(1) as usize);
            let first_fail = if threads <= 1 {
                check_range(0, size)
            } else {
                let chunk = size.div_ceil(threads as u64);
                std::thread::scope(|scope| {
                    let handles: Vec<_> = (0..threads as u64)
                        .map(|t| {
                            let lo = (t * chunk).min(size);
                            let hi = ((t + 1) * chunk).min(size);
                            scope.spawn(move || check_range(lo, hi))
                        })
                        .collect();
                    handles.into_iter().filter_map(|h| h.join().unwrap()).min()
                })
            };
            Ok(match first_fail {
                Some(i) => {
                    CoverVerdict::Fail { index: i as u128, point: f.point_at(k * n, i as u128) }
                }
                None => CoverVerdict::Pass { points_checked: size },
            })
        }
        VerifyMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let els = f.elements();
            for i in 0..samples {
                let point: Vec<Elem> =
                    (0..k * n).map(|_| els[rng.gen_range(0..els.len())]).collect();
                if p.eval(&point, f) != rhs(&point) {
                    return Ok(CoverVerdict::Fail { index: i as u128, point });
                }
            }
            Ok(CoverVerdict::Pass { points_checked: samples })
        }
    }
}

/// Rank of a matrix over F_q by Gaussian elimination.
pub fn matrix_rank(mut rows: Vec<Vec<Elem>>, f: &Field) -> usize {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..nrows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = f.inv(rows[rank][col]).expect("pivot is nonzero");
        for cell in rows[rank][col..].iter_mut() {
            *cell = f.mul(*cell, inv);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = row[col];
                for (cell, &p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *cell = f.sub(*cell, f.mul(factor, p));
                }
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// For two slots, the diagonal indicator of an s-element set has the slice
/// rank of the s x s identity matrix; this computes that rank by elimination
/// rather than asserting s.
pub fn diagonal_rank_k2(s: usize, f: &Field) -> usize {
    let rows = (0..s)
        .map(|i| (0..s).map(|j| if i == j { f.one() } else { f.zero() }).collect())
        .collect();
    matrix_rank(rows, f)
}

/// sum_{v in points} prod_j delta_v(X_j), the k-slot diagonal indicator:
/// 1 exactly on the tuples (v, ..., v) with v in points, 0 elsewhere.
pub fn diagonal_indicator(
    points: &[Vec<Elem>],
    k: usize,
    n: usize,
    f: &Field,
    budget: &Budget,
) -> Result<MultiPoly> {
    assert!(k >= 1 && n >= 1);
    let qm1 = (f.q() - 1) as u32;
    let nvars = k * n;
    let mut acc = MultiPoly::zero(nvars);
    for v in points {
        assert_eq!(v.len(), n, "point width mismatch");
        // delta_v in one slot's n variables
        let mut delta = MultiPoly::one(n, f);
        for (i, &vi) in v.iter().enumerate() {
            let xi = MultiPoly::variable(n, i, f);
            let shifted = xi.sub(&MultiPoly::constant(n, vi), f);
            let power = shifted.pow_reduced(qm1, f, budget.max_terms)?;
            let factor = MultiPoly::one(n, f).sub(&power, f);
            delta = delta.mul_reduced(&factor, f, budget.max_terms)?;
        }
        let mut term = MultiPoly::one(nvars, f);
        for j in 0..k {
            term = term.mul_reduced(&delta.embed(nvars, j * n), f, budget.max_terms)?;
        }
        acc = acc.add(&term, f);
    }
    Ok(acc)
}

/// Exact slice rank by exhaustive search: try every family of (slot,
/// monomial) slices of increasing total size, and for each family every
/// assignment of cofactor value tables, until the identity holds at all
/// q^{k n} points. Costs are pre-checked against `budget.max_rank_steps`.
pub fn slice_rank_exhaustive(
    p: &MultiPoly,
    k: usize,
    n: usize,
    f: &Field,
    budget: &Budget,
) -> Result<usize> {
    assert_eq!(p.nvars(), k * n);
    let q = f.q();
    let dn = (q as u128).pow(n as u32);
    let total = dn.pow(k as u32);
    if total > budget.max_points as u128 {
        return Err(Error::SizeBudgetExceeded {
            what: "rank search domain",
            needed: total,
            cap: budget.max_points as u128,
        });
    }
    let dn = dn as usize;
    let total = total as usize;

    let table: Vec<Elem> = f.domain_iter(k * n).map(|pt| p.eval(&pt, f)).collect();
    if table.iter().all(|e| e.is_zero()) {
        return Ok(0);
    }

    // slot-local points and the monomial universe, both in canonical order
    let slot_points: Vec<Vec<Elem>> = f.domain_iter(n).collect();
    let universe: Vec<Monomial> = (0..dn)
        .map(|flat| {
            let mut exps = vec![0u32; n];
            let mut rem = flat;
            for i in (0..n).rev() {
                exps[i] = (rem % q as usize) as u32;
                rem /= q as usize;
            }
            Monomial(exps)
        })
        .collect();

    // mval[u][d]: monomial u at slot point d
    let mval: Vec<Vec<Elem>> = universe
        .iter()
        .map(|m| {
            slot_points
                .iter()
                .map(|pt| {
                    let mut v = f.one();
                    for (i, &e) in m.0.iter().enumerate() {
                        if e > 0 {
                            v = f.mul(v, f.pow(pt[i], e as u64));
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();

    // flat point index -> per-slot digit and cofactor index with slot j removed
    let sz = dn.pow(k as u32 - 1); // cofactor table length
    let mut slot_digit = vec![vec![0usize; k]; total];
    let mut others_idx = vec![vec![0usize; k]; total];
    for (flat, (digits, others)) in slot_digit.iter_mut().zip(&mut others_idx).enumerate() {
        let mut rem = flat;
        for j in (0..k).rev() {
            digits[j] = rem % dn;
            rem /= dn;
        }
        for (j, o) in others.iter_mut().enumerate() {
            let mut idx = 0;
            for (jj, &d) in digits.iter().enumerate() {
                if jj != j {
                    idx = idx * dn + d;
                }
            }
            *o = idx;
        }
    }

    // the slice universe: all (slot, monomial index) pairs, lexicographic
    let slices: Vec<(usize, usize)> =
        (0..k).flat_map(|j| (0..dn).map(move |u| (j, u))).collect();

    for t in 1..=slices.len() {
        let families = binomial(slices.len() as u128, t as u128);
        let assigns = (q as u128).checked_pow((t * sz) as u32).unwrap_or(u128::MAX);
        let cost = families
            .checked_mul(assigns)
            .and_then(|c| c.checked_mul(total as u128))
            .unwrap_or(u128::MAX);
        if cost > budget.max_rank_steps as u128 {
            return Err(Error::SizeBudgetExceeded {
                what: "rank search steps",
                needed: cost,
                cap: budget.max_rank_steps as u128,
            });
        }

        let mut combo: Vec<usize> = (0..t).collect();
        loop {
            if family_covers(&combo, &slices, &table, &mval, &slot_digit, &others_idx, sz, f) {
                return Ok(t);
            }
            let mut pos = t;
            let mut done = true;
            while pos > 0 {
                pos -= 1;
                if combo[pos] < slices.len() - (t - pos) {
                    combo[pos] += 1;
                    for j in pos + 1..t {
                        combo[j] = combo[j - 1] + 1;
                    }
                    done = false;
                    break;
                }
            }
            if done {
                break;
            }
        }
    }
    unreachable!("a full slot-0 expansion always covers, so some t succeeds")
}

/// Whether some assignment of cofactor tables makes the slice family cover
/// the target table; brute force over all q^{t * sz} assignments.
#[allow(clippy::too_many_arguments)]
fn family_covers(
    combo: &[usize],
    slices: &[(usize, usize)],
    table: &[Elem],
    mval: &[Vec<Elem>],
    slot_digit: &[Vec<usize>],
    others_idx: &[Vec<usize>],
    sz: usize,
    f: &Field,
) -> bool {
    let t = combo.len();
    let q = f.q() as usize;
    let vars = t * sz;
    let mut assign = vec![0usize; vars];
    loop {
        let ok = (0..table.len()).all(|flat| {
            let mut acc = f.zero();
            for (s, &ci) in combo.iter().enumerate() {
                let (j, u) = slices[ci];
                let m = mval[u][slot_digit[flat][j]];
                if m.is_zero() {
                    continue;
                }
                let cof = f.elem(assign[s * sz + others_idx[flat][j]] as u64);
                acc = f.add(acc, f.mul(m, cof));
            }
            acc == table[flat]
        });
        if ok {
            return true;
        }
        // next assignment (base-q odometer)
        let mut pos = vars;
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            assign[pos] += 1;
            if assign[pos] < q {
                break;
            }
            assign[pos] = 0;
        }
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Self-contained, re-verifiable record of one cover construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverReport {
    pub q: u64,
    pub modulus: Option<Vec<u64>>,
    /// Per-slot variable count (the length bound on the f_i).
    pub n: usize,
    pub equation: crate::encoding::EquationSpec,
    pub m: usize,
    pub ell: u64,
    pub cover_size: u64,
    /// k * |M_{floor(threshold), n}|: the counting-side cap on the size.
    pub size_bound: String,
    pub verify_mode: VerifyMode,
    pub verdict: CoverVerdict,
    pub zero_coeff_warning: bool,
    pub cover: SliceCover,
}

impl CoverReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("cover report\n");
        match &self.modulus {
            None => s.push_str(&format!("  q={} n={}\n", self.q, self.n)),
            Some(m) => {
                let mm = m.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
                s.push_str(&format!("  q={} modulus={} n={}\n", self.q, mm, self.n));
            }
        }
        s.push_str(&format!(
            "  equation: k={} r={} d={}\n",
            self.equation.k(),
            self.equation.r,
            self.equation.d
        ));
        s.push_str(&format!("  map: m={} degree={}\n", self.m, self.ell));
        s.push_str(&format!(
            "  cover size {} (cap {})\n",
            self.cover_size, self.size_bound
        ));
        match self.verify_mode {
            VerifyMode::Exhaustive => s.push_str("  verification: exhaustive\n"),
            VerifyMode::Sampled { samples, seed } => s.push_str(&format!(
                "  verification: sampled ({samples} points, seed {seed})\n"
            )),
        }
        match &self.verdict {
            CoverVerdict::Pass { points_checked } => {
                s.push_str(&format!("  verdict: pass ({points_checked} points)\n"))
            }
            CoverVerdict::Fail { index, point } => {
                let pt = point.iter().map(|e| e.code().to_string()).collect::<Vec<_>>();
                s.push_str(&format!(
                    "  verdict: FAIL at point #{index} ({})\n",
                    pt.join(",")
                ));
            }
        }
        if self.zero_coeff_warning {
            s.push_str("  warning: some equation coefficient is zero; its variable is vacuous\n");
        }
        s.push_str(&self.cover.to_text());
        s
    }

    /// Rebuild everything from the stored field and equation and re-run the
    /// stored verification mode; a certificate is only as good as this check.
    pub fn reverify(&self, budget: &Budget, threads: usize) -> Result<CoverVerdict> {
        let field = Field::from_order(self.q, self.modulus.clone())?;
        let map = crate::encoding::build_equation_map(&self.equation, self.n, &field)?;
        let p = indicator_poly(&map, &field, budget)?;
        verify_cover(&p, &self.cover, &field, self.verify_mode, budget, threads)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::unipoly::UniPoly;
    use crate::encoding::{build_equation_map, EquationSpec};
    use crate::search::is_solution;

    fn f3() -> Field {
        Field::new(3, 1, None).unwrap()
    }

    fn up(f: &Field, codes: &[u64]) -> UniPoly {
        UniPoly::from_coeffs(codes.iter().map(|&c| f.elem(c)).collect())
    }

    fn square_eq(f: &Field) -> EquationSpec {
        EquationSpec::new(2, 0, vec![up(f, &[1]), up(f, &[1]), up(f, &[1])], f).unwrap()
    }

    fn poly(f: &Field, nvars: usize, seeds: &[(&[u32], u64)]) -> MultiPoly {
        MultiPoly::from_terms(
            nvars,
            seeds.iter().map(|(e, c)| (Monomial(e.to_vec()), f.elem(c % f.q()))),
            f,
        )
    }

    #[test]
    fn indicator_edge_cases() {
        let f = f3();
        let b = Budget::default();
        // empty product
        let empty = PolyMap::new(2, vec![]);
        assert_eq!(indicator_poly(&empty, &f, &b).unwrap(), MultiPoly::one(2, &f));
        // zero coordinate contributes factor 1
        let zero = PolyMap::new(2, vec![MultiPoly::zero(2)]);
        assert_eq!(indicator_poly(&zero, &f, &b).unwrap(), MultiPoly::one(2, &f));
    }

    #[test]
    fn indicator_linear_f2() {
        let f = Field::new(2, 1, None).unwrap();
        let b = Budget::default();
        let phi = poly(&f, 2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let ind = indicator_poly(&PolyMap::new(2, vec![phi]), &f, &b).unwrap();
        assert_eq!(ind, poly(&f, 2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1)]));
        for pt in f.domain_iter(2) {
            let expect = if pt[0] == pt[1] { f.one() } else { f.zero() };
            assert_eq!(ind.eval(&pt, &f), expect);
        }
    }

    #[test]
    fn indicator_squares_frozen_terms() {
        // P = 1 - (x^2+y^2+z^2)^2 reduced: 1 + 2x^2 + 2y^2 + 2z^2
        //     + x^2 y^2 + x^2 z^2 + y^2 z^2
        let f = f3();
        let b = Budget::default();
        let map = build_equation_map(&square_eq(&f), 1, &f).unwrap();
        let ind = indicator_poly(&map, &f, &b).unwrap();
        let want = poly(
            &f,
            3,
            &[
                (&[0, 0, 0], 1),
                (&[2, 0, 0], 2),
                (&[0, 2, 0], 2),
                (&[0, 0, 2], 2),
                (&[2, 2, 0], 1),
                (&[2, 0, 2], 1),
                (&[0, 2, 2], 1),
            ],
        );
        assert_eq!(ind, want);
    }

    #[test]
    fn indicator_matches_solution_oracle() {
        let f = f3();
        let b = Budget::default();
        let eq = square_eq(&f);
        let map = build_equation_map(&eq, 1, &f).unwrap();
        let ind = indicator_poly(&map, &f, &b).unwrap();
        let mut ones = 0;
        for pt in f.domain_iter(3) {
            let tuple: Vec<UniPoly> = pt.iter().map(|&e| UniPoly::constant(e)).collect();
            let expect = if is_solution(&eq, &tuple, &f).unwrap() { f.one() } else { f.zero() };
            let got = ind.eval(&pt, &f);
            assert_eq!(got, expect, "at {pt:?}");
            if got == f.one() {
                ones += 1;
            }
        }
        assert_eq!(ones, 9); // 3 constant tuples + 6 permutations of (1,1,2)
    }

    #[test]
    fn indicator_budget() {
        let f = f3();
        let tight = Budget { max_terms: 8, ..Budget::default() };
        let map = build_equation_map(&square_eq(&f), 1, &f).unwrap();
        assert!(matches!(
            indicator_poly(&map, &f, &tight),
            Err(Error::SizeBudgetExceeded { what: "indicator terms", .. })
        ));
    }

    #[test]
    fn cover_of_squares_indicator() {
        let f = f3();
        let b = Budget::default();
        let map = build_equation_map(&square_eq(&f), 1, &f).unwrap();
        let ind = indicator_poly(&map, &f, &b).unwrap();
        // threshold (q-1) m l / k = 2*1*2/3
        let threshold = Ratio::new(4u64, 3);
        let cover = build_cover(&ind, 3, 1, threshold, &f).unwrap();
        assert_eq!(cover.size(), 3);
        for slot in &cover.slots {
            assert_eq!(slot.len(), 1);
            assert!(slot.contains(&Monomial(vec![0])));
        }
        let verdict = verify_cover(&ind, &cover, &f, VerifyMode::Exhaustive, &b, 1).unwrap();
        assert_eq!(verdict, CoverVerdict::Pass { points_checked: 27 });
        // thread count cannot change the verdict
        let verdict2 = verify_cover(&ind, &cover, &f, VerifyMode::Exhaustive, &b, 4).unwrap();
        assert_eq!(verdict, verdict2);
    }

    #[test]
    fn cover_trivial_shapes() {
        let f = Field::new(2, 1, None).unwrap();
        let b = Budget::default();
        // P = x_{1,1}, k=2, n=1, threshold 1
        let p = poly(&f, 2, &[(&[1, 0], 1)]);
        let cover = build_cover(&p, 2, 1, Ratio::from_integer(1), &f).unwrap();
        assert_eq!(cover.size(), 1);
        assert!(cover.slots[0].contains(&Monomial(vec![1])));
        assert!(cover.slots[1].is_empty());
        let cof = cover.cofactors.get(&(0, Monomial(vec![1]))).unwrap();
        assert_eq!(cof, &MultiPoly::one(1, &f));

        // P = 1 goes to slot 1 by the smallest-slot rule
        let one = MultiPoly::one(2, &f);
        let cover = build_cover(&one, 2, 1, Ratio::from_integer(0), &f).unwrap();
        assert_eq!(cover.size(), 1);
        assert!(cover.slots[0].contains(&Monomial(vec![0])));

        // P = 0: empty cover passes
        let zero = MultiPoly::zero(2);
        let cover = build_cover(&zero, 2, 1, Ratio::from_integer(0), &f).unwrap();
        assert_eq!(cover.size(), 0);
        let verdict = verify_cover(&zero, &cover, &f, VerifyMode::Exhaustive, &b, 1).unwrap();
        assert!(matches!(verdict, CoverVerdict::Pass { .. }));
    }

    #[test]
    fn no_admissible_slot_fires() {
        let f = f3();
        let p = poly(&f, 3, &[(&[2, 2, 2], 1)]);
        let err = build_cover(&p, 3, 1, Ratio::from_integer(1), &f).unwrap_err();
        assert_eq!(err, Error::NoAdmissibleSlot(vec![2, 2, 2]));
    }

    #[test]
    fn perturbed_cover_fails_verification() {
        let f = f3();
        let b = Budget::default();
        let map = build_equation_map(&square_eq(&f), 1, &f).unwrap();
        let ind = indicator_poly(&map, &f, &b).unwrap();
        let mut cover = build_cover(&ind, 3, 1, Ratio::new(4, 3), &f).unwrap();
        let key = (0usize, Monomial(vec![0]));
        let cof = cover.cofactors.get(&key).unwrap().clone();
        cover.cofactors.insert(key, cof.add(&MultiPoly::one(2, &f), &f));
        let verdict = verify_cover(&ind, &cover, &f, VerifyMode::Exhaustive, &b, 1).unwrap();
        assert!(matches!(verdict, CoverVerdict::Fail { index: 0, .. }));
        // sampled mode finds it too
        let sampled = VerifyMode::Sampled { samples: 50, seed: 7 };
        let verdict = verify_cover(&ind, &cover, &f, sampled, &b, 1).unwrap();
        assert!(matches!(verdict, CoverVerdict::Fail { .. }));
    }

    #[test]
    fn matrix_rank_basics() {
        let f = f3();
        assert_eq!(diagonal_rank_k2(0, &f), 0);
        assert_eq!(diagonal_rank_k2(2, &f), 2);
        assert_eq!(diagonal_rank_k2(5, &f), 5);
        // dependent rows
        let rows = vec![
            vec![f.elem(1), f.elem(2)],
            vec![f.elem(2), f.elem(1)], // 2 * row0 = (2, 4=1)
            vec![f.elem(0), f.elem(0)],
        ];
        assert_eq!(matrix_rank(rows, &f), 1);
    }

    #[test]
    fn diagonal_indicator_values_and_matrix_rank() {
        let f = Field::new(2, 1, None).unwrap();
        let b = Budget::default();
        let pts = vec![vec![f.elem(0)], vec![f.elem(1)]];
        let ind = diagonal_indicator(&pts, 2, 1, &f, &b).unwrap();
        // 1 + x + y over F_2
        assert_eq!(
            ind,
            poly(&f, 2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1)])
        );
        // as a q^n x q^n matrix its rank is |A|
        let dom: Vec<Vec<Elem>> = f.domain_iter(1).collect();
        let rows: Vec<Vec<Elem>> = dom
            .iter()
            .map(|x| {
                dom.iter()
                    .map(|y| {
                        let mut pt = x.clone();
                        pt.extend_from_slice(y);
                        ind.eval(&pt, &f)
                    })
                    .collect()
            })
            .collect();
        assert_eq!(matrix_rank(rows, &f), 2);
        assert_eq!(diagonal_rank_k2(2, &f), 2);
    }

    #[test]
    fn slice_rank_tiny_cases() {
        let f = Field::new(2, 1, None).unwrap();
        let b = Budget::default();
        assert_eq!(slice_rank_exhaustive(&MultiPoly::zero(2), 2, 1, &f, &b).unwrap(), 0);
        let x = poly(&f, 2, &[(&[1, 0], 1)]);
        assert_eq!(slice_rank_exhaustive(&x, 2, 1, &f, &b).unwrap(), 1);
    }

    #[test]
    fn slice_rank_diagonal_is_two() {
        let f = Field::new(2, 1, None).unwrap();
        let b = Budget::default();
        let pts = vec![vec![f.elem(0)], vec![f.elem(1)]];
        for k in [2usize, 3] {
            let ind = diagonal_indicator(&pts, k, 1, &f, &b).unwrap();
            let rank = slice_rank_exhaustive(&ind, k, 1, &f, &b).unwrap();
            assert_eq!(rank, 2, "k = {k}");
            assert_eq!(rank, diagonal_rank_k2(2, &f));
        }
    }

    #[test]
    fn rank_budget_fires() {
        let f = f3();
        let tight = Budget { max_rank_steps: 10, ..Budget::default() };
        let p = poly(&f, 2, &[(&[1, 1], 1)]);
        assert!(matches!(
            slice_rank_exhaustive(&p, 2, 1, &f, &tight),
            Err(Error::SizeBudgetExceeded { .. })
        ));
    }

    #[test]
    fn cover_serde_and_text_round_trip() {
        let f = f3();
        let b = Budget::default();
        let map = build_equation_map(&square_eq(&f), 1, &f).unwrap();
        let ind = indicator_poly(&map, &f, &b).unwrap();
        let cover = build_cover(&ind, 3, 1, Ratio::new(4, 3), &f).unwrap();
        let json = serde_json::to_string(&cover).unwrap();
        let back: SliceCover = serde_json::from_str(&json).unwrap();
        assert_eq!(cover, back);
        back.validate(&f).unwrap();
        let verdict = verify_cover(&ind, &back, &f, VerifyMode::Exhaustive, &b, 1).unwrap();
        assert!(matches!(verdict, CoverVerdict::Pass { .. }));

        let text = cover.to_text();
        assert!(text.starts_with("cover: k=3 n=1 threshold=4/3 size=3\n"));
        assert!(text.contains("slot 1:\n"));
        assert!(text.contains("p=(0) F="));
    }

    #[test]
    fn cover_report_reverify() {
        let f = f3();
        let b = Budget::default();
        let eq = square_eq(&f);
        let map = build_equation_map(&eq, 1, &f).unwrap();
        let ind = indicator_poly(&map, &f, &b).unwrap();
        let cover = build_cover(&ind, 3, 1, Ratio::new(4, 3), &f).unwrap();
        let verdict = verify_cover(&ind, &cover, &f, VerifyMode::Exhaustive, &b, 1).unwrap();
        let report = CoverReport {
            q: 3,
            modulus: None,
            n: 1,
            equation: eq,
            m: map.m(),
            ell: map.ell(),
            cover_size: cover.size(),
            size_bound: "6".into(),
            verify_mode: VerifyMode::Exhaustive,
            verdict: verdict.clone(),
            zero_coeff_warning: false,
            cover,
        };
        let json = serde_json::to_string_pretty(&report).unwrap();
        let back: CoverReport = serde_json::from_str(&json).unwrap();
        let again = back.reverify(&b, 2).unwrap();
        assert_eq!(again, verdict);
        assert!(report.to_text().contains("verdict: pass (27 points)"));
    }
}
