//! The coefficient-vector view of low-degree polynomials and the polynomial
//! maps it induces.
//!
//! A polynomial f of degree < n over F_q is a vector of its n coefficients.
//! Under that identification f -> f^r becomes a polynomial map of degree r
//! ([`power_map`]), f -> a*f a linear map ([`scalar_mul_map`]), and the whole
//! left-hand side of a diagonal equation sum a_i f_i^r a single map Phi from
//! (F_q^n)^k to F_q^m with m = (n-1)r + d + 1 ([`build_equation_map`]).

use num::bigint::BigUint;
use num::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::algebra::field::{Elem, Field};
use crate::algebra::multipoly::{Monomial, MultiPoly};
use crate::algebra::unipoly::UniPoly;
use crate::error::{Error, Result};

/// A diagonal equation sum_{i=1}^k a_i f_i^r = 0 with sum a_i = 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationSpec {
    pub r: u32,
    /// Degree cap on the coefficient polynomials a_i.
    pub d: usize,
    /// a_1 .. a_k, ascending-coefficient form.
    pub coeffs: Vec<UniPoly>,
}

impl EquationSpec {
    /// Validates k >= 2, r >= 1, deg a_i <= d, and sum a_i = 0.
    pub fn new(r: u32, d: usize, coeffs: Vec<UniPoly>, f: &Field) -> Result<EquationSpec> {
        let eq = EquationSpec { r, d, coeffs };
        eq.validate(f)?;
        Ok(eq)
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    pub fn validate(&self, f: &Field) -> Result<()> {
        if self.coeffs.len() < 2 {
            return Err(Error::InvalidEquation(format!(
                "need at least 2 coefficients, got {}",
                self.coeffs.len()
            )));
        }
        if self.r < 1 {
            return Err(Error::InvalidEquation("exponent r must be >= 1".into()));
        }
        for (i, a) in self.coeffs.iter().enumerate() {
            if let Some(deg) = a.degree() {
                if deg > self.d {
                    return Err(Error::DegreeTooLarge { degree: deg, bound: self.d });
                }
            }
            for &c in a.coeffs() {
                // catches coefficients parsed against a different field
                if c.code() >= f.q() {
                    return Err(Error::InvalidEquation(format!(
                        "coefficient a_{} has an element code out of range for q = {}",
                        i + 1,
                        f.q()
                    )));
                }
            }
        }
        let sum = self
            .coeffs
            .iter()
            .fold(UniPoly::zero(), |acc, a| acc.add(a, f));
        if !sum.is_zero() {
            return Err(Error::InvalidEquation(format!(
                "coefficients must sum to zero, got {}",
                sum.to_text()
            )));
        }
        Ok(())
    }

    /// A zero a_i makes f_i vacuous; legal, but reports flag it.
    pub fn has_zero_coeff(&self) -> bool {
        self.coeffs.iter().any(UniPoly::is_zero)
    }
}

/// A tuple of m coordinate polynomials in a shared variable space: a
/// polynomial map F_q^{nvars_in} -> F_q^m.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyMap {
    nvars_in: usize,
    coords: Vec<MultiPoly>,
    ell: u64,
}

impl PolyMap {
    pub fn new(nvars_in: usize, coords: Vec<MultiPoly>) -> PolyMap {
        assert!(coords.iter().all(|c| c.nvars() == nvars_in));
        let ell = coords.iter().filter_map(MultiPoly::total_degree).max().unwrap_or(0);
        PolyMap { nvars_in, coords, ell }
    }

    pub fn nvars_in(&self) -> usize {
        self.nvars_in
    }

    /// Number of output coordinates.
    pub fn m(&self) -> usize {
        self.coords.len()
    }

    /// Max total degree over coordinates (0 for the zero map).
    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn coords(&self) -> &[MultiPoly] {
        &self.coords
    }
}

/// The n coefficients of f, zero-padded; requires deg f < n.
pub fn vectorize(f: &UniPoly, n: usize, field: &Field) -> Result<Vec<Elem>> {
    if let Some(deg) = f.degree() {
        if deg >= n {
            return Err(Error::DegreeTooLarge { degree: deg, bound: n.saturating_sub(1) });
        }
    }
    let mut v = vec![field.zero(); n];
    for (i, &c) in f.coeffs().iter().enumerate() {
        v[i] = c;
    }
    Ok(v)
}

/// Inverse of [`vectorize`] (padding is forgotten).
pub fn devectorize(v: &[Elem]) -> UniPoly {
    UniPoly::from_coeffs(v.to_vec())
}

/// The map Q with Q(vec(f)) = vec(f^r) for deg f < n: m = (n-1)r + 1
/// coordinates, coordinate s the sum over (i_1..i_r) with sum s of
/// prod x_{i_j}, collected with multinomial coefficients reduced mod p.
pub fn power_map(n: usize, r: u32, f: &Field) -> PolyMap {
    assert!(n >= 1 && r >= 1);
    let m = (n - 1) * r as usize + 1;
    let mut coord_terms: Vec<Vec<(Monomial, Elem)>> = vec![Vec::new(); m];

    // Multisets of size r from [0, n) as nondecreasing index tuples.
    let mut idx = vec![0usize; r as usize];
    loop {
        let s: usize = idx.iter().sum();
        let mut counts = vec![0u32; n];
        for &i in &idx {
            counts[i] += 1;
        }
        let coeff = multinomial_mod_p(r, &counts, f);
        if !coeff.is_zero() {
            coord_terms[s].push((Monomial(counts), coeff));
        }

        // next nondecreasing tuple
        let mut pos = r as usize;
        loop {
            if pos == 0 {
                pos = usize::MAX;
                break;
            }
            pos -= 1;
            if idx[pos] + 1 < n {
                let v = idx[pos] + 1;
                for slot in idx.iter_mut().skip(pos) {
                    *slot = v;
                }
                break;
            }
        }
        if pos == usize::MAX {
            break;
        }
    }

    let coords = coord_terms
        .into_iter()
        .map(|terms| MultiPoly::from_terms(n, terms, f))
        .collect();
    PolyMap::new(n, coords)
}

/// r! / prod(counts!) mod p, computed exactly then reduced.
fn multinomial_mod_p(r: u32, counts: &[u32], f: &Field) -> Elem {
    let mut num = factorial(r);
    for &c in counts {
        if c > 1 {
            num /= factorial(c);
        }
    }
    let rem = (num % BigUint::from(f.p())).to_u64().unwrap();
    f.from_int(rem as i64)
}

fn factorial(n: u32) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

/// The linear map vec(f) -> vec(a*f) from F_q^n to F_q^{n+d}; coordinate s is
/// sum_{i+j=s} a_j x_i. Degree 1 (or the zero map when a = 0).
pub fn scalar_mul_map(a: &UniPoly, n: usize, d: usize, f: &Field) -> Result<PolyMap> {
    assert!(n >= 1);
    if let Some(deg) = a.degree() {
        if deg > d {
            return Err(Error::DegreeTooLarge { degree: deg, bound: d });
        }
    }
    let m = n + d;
    let coords = (0..m)
        .map(|s| {
            let terms = (0..n).filter(|&i| i <= s && s - i <= d).map(|i| {
                let mut exps = vec![0u32; n];
                exps[i] = 1;
                (Monomial(exps), a.coeff(s - i))
            });
            MultiPoly::from_terms(n, terms, f)
        })
        .collect();
    Ok(PolyMap::new(n, coords))
}

/// The full left-hand-side map Phi for the equation: k blocks of n input
/// variables (block i holds the coefficients of f_i, flat index i*n + j),
/// m = (n-1)r + d + 1 output coordinates, and
/// Phi(vec(f_1) || ... || vec(f_k)) = vec(sum a_i f_i^r).
///
/// Coordinates are kept in the raw multinomial form, so the map's degree is
/// exactly r whenever some a_i is nonzero; callers that need the functional
/// normal form reduce afterwards.
pub fn build_equation_map(eq: &EquationSpec, n: usize, f: &Field) -> Result<PolyMap> {
    eq.validate(f)?;
    assert!(n >= 1);
    let k = eq.k();
    let r = eq.r;
    let nvars = k * n;
    let np = (n - 1) * r as usize + 1; // power-map output length
    let m = np + eq.d;

    let base = power_map(n, r, f);
    let mut coords = vec![MultiPoly::zero(nvars); m];
    for (i, a) in eq.coeffs.iter().enumerate() {
        for (s, coord) in coords.iter_mut().enumerate() {
            // coordinate s of a_i * f_i^r = sum_j a_i[j] * Q_{s-j}
            for j in 0..=eq.d.min(s) {
                let aj = a.coeff(j);
                if aj.is_zero() || s - j >= np {
                    continue;
                }
                let part = base.coords()[s - j].embed(nvars, i * n).scale(aj, f);
                *coord = coord.add(&part, f);
            }
        }
    }
    Ok(PolyMap::new(nvars, coords))
}

/// Coordinatewise evaluation.
pub fn map_eval(map: &PolyMap, point: &[Elem], f: &Field) -> Result<Vec<Elem>> {
    if point.len() != map.nvars_in() {
        return Err(Error::DimensionMismatch { expected: map.nvars_in(), got: point.len() });
    }
    Ok(map.coords().iter().map(|c| c.eval(point, f)).collect())
}

/// Parse an equation file: `key=value` lines (`q`, optional `modulus`, `r`,
/// `k`, `d`) plus exactly k `a=<ascending coefficients>` lines; `#` starts a
/// comment. Returns the field together with the validated equation.
pub fn parse_equation_file(text: &str) -> Result<(Field, EquationSpec)> {
    let mut q_clause = None;
    let mut modulus_clause = None;
    let mut r = None;
    let mut k = None;
    let mut d = None;
    let mut a_lines: Vec<String> = Vec::new();

    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "q" => q_clause = Some(format!("q={value}")),
            "modulus" => modulus_clause = Some(format!("modulus={value}")),
            "r" => r = Some(parse_num::<u32>("r", value)?),
            "k" => k = Some(parse_num::<usize>("k", value)?),
            "d" => d = Some(parse_num::<usize>("d", value)?),
            "a" => a_lines.push(value.to_string()),
            other => return Err(Error::Parse(format!("unknown key {other:?}"))),
        }
    }

    let q_clause = q_clause.ok_or_else(|| Error::Parse("missing q= line".into()))?;
    let field = Field::parse(&q_clause, modulus_clause.as_deref())?;
    let r = r.ok_or_else(|| Error::Parse("missing r= line".into()))?;
    let k = k.ok_or_else(|| Error::Parse("missing k= line".into()))?;
    let d = d.ok_or_else(|| Error::Parse("missing d= line".into()))?;
    if a_lines.len() != k {
        return Err(Error::Parse(format!(
            "k = {k} but found {} coefficient lines",
            a_lines.len()
        )));
    }
    let coeffs = a_lines
        .iter()
        .map(|s| UniPoly::parse(s, &field))
        .collect::<Result<Vec<_>>>()?;
    let eq = EquationSpec::new(r, d, coeffs, &field)?;
    Ok((field, eq))
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::Parse(format!("bad value for {key}: {value:?}")))
}

/// Inverse of [`parse_equation_file`], deterministic.
pub fn serialize_equation_file(field: &Field, eq: &EquationSpec) -> String {
    let mut s = String::new();
    if field.ext_degree() == 1 {
        s.push_str(&format!("q={}\n", field.q()));
    } else {
        s.push_str(&format!("q={}^{}\n", field.p(), field.ext_degree()));
        let m = field
            .modulus()
            .expect("extension fields always carry a modulus")
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        s.push_str(&format!("modulus={m}\n"));
    }
    s.push_str(&format!("r={}\n", eq.r));
    s.push_str(&format!("k={}\n", eq.k()));
    s.push_str(&format!("d={}\n", eq.d));
    for a in &eq.coeffs {
        s.push_str(&format!("a={}\n", a.to_text()));
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

    /// f_1^2 + f_2^2 + f_3^2 = 0 over F_3 (1 + 1 + 1 = 0).
    fn square_eq(f: &Field) -> EquationSpec {
        EquationSpec::new(2, 0, vec![up(f, &[1]), up(f, &[1]), up(f, &[1])], f).unwrap()
    }

    #[test]
    fn vectorize_round_trip() {
        let f = f3();
        let p = up(&f, &[1, 2]);
        let v = vectorize(&p, 3, &f).unwrap();
        assert_eq!(v, vec![f.elem(1), f.elem(2), f.elem(0)]);
        assert_eq!(devectorize(&v), p);
        assert_eq!(vectorize(&UniPoly::zero(), 2, &f).unwrap(), vec![f.zero(); 2]);
        assert!(matches!(
            vectorize(&up(&f, &[1, 0, 0, 1]), 3, &f),
            Err(Error::DegreeTooLarge { degree: 3, bound: 2 })
        ));
    }

    #[test]
    fn power_map_n2_r2_coordinates() {
        let f = f3();
        let q = power_map(2, 2, &f);
        assert_eq!(q.m(), 3);
        assert_eq!(q.ell(), 2);
        let texts: Vec<String> = q.coords().iter().map(MultiPoly::to_text).collect();
        assert_eq!(texts, vec!["1*x0^2", "2*x0*x1", "1*x1^2"]);
    }

    #[test]
    fn power_map_agrees_with_univariate_powers() {
        // Q(vec(f)) = vec(f^r), against the direct repeated-multiplication route.
        for q in [2u64, 3, 4] {
            let field = Field::from_order(q, None).unwrap();
            for n in 1..=3usize {
                for r in 1..=3u32 {
                    let map = power_map(n, r, &field);
                    assert_eq!(map.m(), (n - 1) * r as usize + 1);
                    if r == 1 {
                        assert_eq!(map.m(), n);
                    }
                    for point in field.domain_iter(n) {
                        let fpoly = devectorize(&point);
                        let want =
                            vectorize(&fpoly.pow(r, &field), map.m(), &field).unwrap();
                        let got = map_eval(&map, &point, &field).unwrap();
                        assert_eq!(got, want, "q={q} n={n} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn power_map_frozen_evaluations() {
        let f = f3();
        let map = power_map(2, 2, &f);
        // (1+2t)^2 = 1 + t + t^2
        let got = map_eval(&map, &[f.elem(1), f.elem(2)], &f).unwrap();
        assert_eq!(got, vec![f.elem(1), f.elem(1), f.elem(1)]);
        // t^2
        let got = map_eval(&map, &[f.elem(0), f.elem(1)], &f).unwrap();
        assert_eq!(got, vec![f.elem(0), f.elem(0), f.elem(1)]);
    }

    #[test]
    fn scalar_map_shift_and_identity() {
        let f2 = Field::new(2, 1, None).unwrap();
        let t = up(&f2, &[0, 1]);
        let map = scalar_mul_map(&t, 2, 1, &f2).unwrap();
        assert_eq!(map.m(), 3);
        assert_eq!(map.ell(), 1);
        for point in f2.domain_iter(2) {
            let got = map_eval(&map, &point, &f2).unwrap();
            assert_eq!(got, vec![f2.zero(), point[0], point[1]]);
        }

        let f = f3();
        let one = up(&f, &[1]);
        let id = scalar_mul_map(&one, 3, 0, &f).unwrap();
        for point in f.domain_iter(3) {
            assert_eq!(map_eval(&id, &point, &f).unwrap(), point);
        }

        let zero_map = scalar_mul_map(&UniPoly::zero(), 2, 1, &f).unwrap();
        assert_eq!(zero_map.ell(), 0);
        assert!(zero_map.coords().iter().all(MultiPoly::is_zero));

        assert!(matches!(
            scalar_mul_map(&up(&f, &[1, 1]), 2, 0, &f),
            Err(Error::DegreeTooLarge { degree: 1, bound: 0 })
        ));
    }

    #[test]
    fn equation_spec_validation() {
        let f = f3();
        assert!(EquationSpec::new(2, 0, vec![up(&f, &[1]), up(&f, &[2])], &f).is_ok());
        // sum 1 + 1 = 2 != 0
        assert!(matches!(
            EquationSpec::new(2, 0, vec![up(&f, &[1]), up(&f, &[1])], &f),
            Err(Error::InvalidEquation(_))
        ));
        assert!(matches!(
            EquationSpec::new(2, 0, vec![up(&f, &[1])], &f),
            Err(Error::InvalidEquation(_))
        ));
        // deg a exceeds d
        assert!(matches!(
            EquationSpec::new(2, 0, vec![up(&f, &[0, 1]), up(&f, &[0, 2])], &f),
            Err(Error::DegreeTooLarge { .. })
        ));
        let withzero =
            EquationSpec::new(1, 0, vec![up(&f, &[1]), up(&f, &[2]), UniPoly::zero()], &f)
                .unwrap();
        assert!(withzero.has_zero_coeff());
    }

    #[test]
    fn equation_map_shape_and_exactness() {
        let f = f3();
        let eq = square_eq(&f);
        let map = build_equation_map(&eq, 2, &f).unwrap();
        assert_eq!(map.nvars_in(), 6);
        assert_eq!(map.m(), 3); // (2-1)*2 + 0 + 1
        assert_eq!(map.ell(), 2);

        for point in f.domain_iter(6) {
            let fs: Vec<UniPoly> =
                (0..3).map(|i| devectorize(&point[i * 2..(i + 1) * 2])).collect();
            let mut sum = UniPoly::zero();
            for (a, fi) in eq.coeffs.iter().zip(&fs) {
                sum = sum.add(&a.mul(&fi.pow(eq.r, &f), &f), &f);
            }
            let want = vectorize(&sum, map.m(), &f).unwrap();
            assert_eq!(map_eval(&map, &point, &f).unwrap(), want);
        }
    }

    #[test]
    fn equation_map_vanishes_on_constant_tuples() {
        let f = f3();
        let eq = square_eq(&f);
        let map = build_equation_map(&eq, 1, &f).unwrap();
        for &x in f.elements() {
            let point = vec![x, x, x];
            let v = map_eval(&map, &point, &f).unwrap();
            assert!(v.iter().all(|e| e.is_zero()), "x = {x}");
        }
        // 1 + 1 + 4 = 6 = 0 mod 3
        let v = map_eval(&map, &[f.elem(1), f.elem(1), f.elem(2)], &f).unwrap();
        assert_eq!(v, vec![f.zero()]);
    }

    #[test]
    fn equation_map_degree_with_nonconstant_coeffs() {
        // a = (t, -t) over F_3, d = 1, r = 2, n = 2: m = (n-1)r + d + 1 = 4.
        let f = f3();
        let eq = EquationSpec::new(2, 1, vec![up(&f, &[0, 1]), up(&f, &[0, 2])], &f).unwrap();
        let map = build_equation_map(&eq, 2, &f).unwrap();
        assert_eq!(map.m(), 4);
        assert_eq!(map.ell(), 2);
        for point in f.domain_iter(4) {
            let f1 = devectorize(&point[0..2]);
            let f2 = devectorize(&point[2..4]);
            let sum = eq.coeffs[0]
                .mul(&f1.pow(2, &f), &f)
                .add(&eq.coeffs[1].mul(&f2.pow(2, &f), &f), &f);
            assert_eq!(
                map_eval(&map, &point, &f).unwrap(),
                vectorize(&sum, 4, &f).unwrap()
            );
        }
    }

    #[test]
    fn equation_file_round_trip() {
        let text = "# squares over F_3\nq=3\nr=2\nk=3\nd=0\na=1\na=1\na=1\n";
        let (field, eq) = parse_equation_file(text).unwrap();
        assert_eq!(field.q(), 3);
        assert_eq!((eq.r, eq.d, eq.k()), (2, 0, 3));
        let out = serialize_equation_file(&field, &eq);
        let (field2, eq2) = parse_equation_file(&out).unwrap();
        assert_eq!(field, field2);
        assert_eq!(eq, eq2);

        // extension field with modulus survives the round trip
        let text9 = "q=3^2\nmodulus=1,0,1\nr=1\nk=2\nd=0\na=1\na=2\n";
        let (f9, eq9) = parse_equation_file(text9).unwrap();
        assert_eq!(f9.q(), 9);
        let out9 = serialize_equation_file(&f9, &eq9);
        assert_eq!(parse_equation_file(&out9).unwrap().0, f9);

        assert!(parse_equation_file("q=3\nr=2\nk=3\nd=0\na=1\na=1\n").is_err());
        assert!(parse_equation_file("r=2\nk=2\nd=0\na=1\na=2\n").is_err());
        assert!(parse_equation_file("q=3\nr=2\nk=2\nd=0\na=1\na=1\n").is_err());
    }
}
