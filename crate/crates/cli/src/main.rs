//! One binary in front of the whole toolkit.
//!
//! Subcommands: `bound`, `count`, `cover`, `verify`, `search`. Output goes to
//! stdout in `--format text|json|csv`; diagnostics go to stderr. Exit codes:
//! 0 success, 2 invalid input, 3 work budget exceeded. Every run is a pure
//! function of its flags, the input files, and `--seed`, so repeated
//! invocations emit identical bytes regardless of `--threads`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::rational::Ratio;
use num::{BigUint, ToPrimitive};
use serde::Serialize;

use slicelab::algebra::field::factor_prime_power;
use slicelab::counting::{exact_monomial_count, hoeffding_bound, theorem_bound, BoundReport};
use slicelab::encoding::{build_equation_map, parse_equation_file, EquationSpec};
use slicelab::search::{
    exhaustive_max_free, greedy_free, parse_polyset_file, verify_solution_free,
};
use slicelab::slicerank::{build_cover, indicator_poly, verify_cover, CoverReport, VerifyMode};
use slicelab::{Budget, Error, Field, UniPoly};

const PARAM_CAP: u64 = 1_000_000_000;
const SWEEP_CAP: u64 = 100_000;

#[derive(Parser)]
#[command(
    name = "slicelab",
    version,
    about = "Covers, counts, and searches around diagonal equations over F_q[t]"
)]
struct Cli {
    /// Output format. `csv` is only meaningful for bound and count.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for every randomized path (sampled verification, greedy search).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the enumeration kernels. Output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Uniform work cap; takes precedence over SLICELAB_BUDGET.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the solution-free-set size bound and its applicability flags.
    Bound(BoundArgs),
    /// Count bounded-degree monomials exactly, against the concentration bound.
    Count(CountArgs),
    /// Build a slice cover certificate for an equation and verify it.
    Cover(CoverArgs),
    /// Check a polynomial set file for non-trivial solutions of an equation.
    Verify(VerifyArgs),
    /// Search for large solution-free sets, exhaustively or greedily.
    Search(SearchArgs),
}

#[derive(Args)]
struct BoundArgs {
    /// Field order, a prime power >= 2.
    #[arg(long)]
    q: u64,
    /// Power the unknowns are raised to.
    #[arg(long)]
    r: u64,
    /// Number of unknowns.
    #[arg(long)]
    k: u64,
    /// Degree cap on the coefficient polynomials.
    #[arg(long)]
    d: u64,
    /// Coefficient-vector length of each unknown.
    #[arg(long)]
    n: u64,
    /// Sweep n..=n_to, one CSV row per n (JSON gives an array).
    #[arg(long)]
    n_to: Option<u64>,
}

#[derive(Args)]
struct CountArgs {
    /// Field order, a prime power >= 2.
    #[arg(long)]
    q: u64,
    /// Number of variables.
    #[arg(long)]
    n: u64,
    /// Total-degree cap (fractions allowed; the count uses its floor).
    #[arg(long, conflicts_with = "epsilon", required_unless_present = "epsilon")]
    d: Option<f64>,
    /// Margin in (0, 1/2); sets the degree cap to (q-1)*n*(1/2-epsilon).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Sweep n..=n_to, one CSV row per n (JSON gives an array).
    #[arg(long)]
    n_to: Option<u64>,
}

/// Equation source shared by cover and search: a file, or inline flags.
/// Inline flags given alongside --eq are cross-checked against the file.
#[derive(Args)]
struct EquationArgs {
    /// Equation file (key=value lines: q, optional modulus, r, k, d, a=...).
    #[arg(long)]
    eq: Option<PathBuf>,
    /// Field order, a prime power >= 2.
    #[arg(long)]
    q: Option<u64>,
    /// Extension-field modulus, ascending coefficients "c0,c1,...,1".
    #[arg(long)]
    modulus: Option<String>,
    /// Power the unknowns are raised to.
    #[arg(long)]
    r: Option<u32>,
    /// Number of unknowns; must match the number of --a entries.
    #[arg(long)]
    k: Option<usize>,
    /// Degree cap on the coefficients (default: their maximum degree).
    #[arg(long)]
    d: Option<usize>,
    /// Coefficients, semicolon-separated, each "c0 c1 ..." ascending.
    #[arg(long)]
    a: Option<String>,
}

#[derive(Args)]
struct CoverArgs {
    #[command(flatten)]
    eq: EquationArgs,
    /// Coefficient-vector length of each unknown (degree < n).
    #[arg(long)]
    n: usize,
    /// Points drawn when the domain is too big for exhaustive verification.
    #[arg(long, default_value_t = 1000)]
    samples: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Polynomial set file.
    #[arg(long)]
    set: PathBuf,
    /// Equation file.
    #[arg(long)]
    eq: PathBuf,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    eq: EquationArgs,
    /// Coefficient-vector length of each unknown (degree < n).
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    mode: SearchMode,
}

#[derive(Copy, Clone, ValueEnum)]
enum SearchMode {
    /// Subset enumeration: exact maximum, exponential in q^n.
    Exhaustive,
    /// Seeded random insertion order: a lower bound, fast.
    Greedy,
}

/// Diagnostic plus process exit code (2 invalid input, 3 budget).
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Failure {
        Failure { code: 2, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::SizeBudgetExceeded { .. } => 3,
            _ => 2,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Failure {
        Failure { code: 2, msg: e.to_string() }
    }
}

struct Globals {
    format: Format,
    seed: u64,
    threads: usize,
    budget: Budget,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => emit(&out),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

/// Writes to stdout, treating a closed pipe (`slicelab ... | head`) as done.
fn emit(out: &str) -> ExitCode {
    use std::io::Write as _;
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(out.as_bytes()).and_then(|()| stdout.flush()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    if cli.threads < 1 {
        return Err(Failure::input("threads must be >= 1"));
    }
    let g = Globals {
        format: cli.format,
        seed: cli.seed,
        threads: cli.threads,
        budget: resolve_budget(cli.budget)?,
    };
    match &cli.cmd {
        Cmd::Bound(a) => cmd_bound(a, &g),
        Cmd::Count(a) => cmd_count(a, &g),
        Cmd::Cover(a) => cmd_cover(a, &g),
        Cmd::Verify(a) => cmd_verify(a, &g),
        Cmd::Search(a) => cmd_search(a, &g),
    }
}

fn resolve_budget(flag: Option<u64>) -> Result<Budget, Failure> {
    if let Some(v) = flag {
        return Ok(Budget::uniform(v));
    }
    match std::env::var("SLICELAB_BUDGET") {
        Ok(s) => {
            let v: u64 = s.trim().parse().map_err(|_| {
                Failure::input(format!("SLICELAB_BUDGET must be an unsigned integer, got {s:?}"))
            })?;
            Ok(Budget::uniform(v))
        }
        Err(_) => Ok(Budget::default()),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn check_prime_power(q: u64) -> Result<(), Failure> {
    if q > PARAM_CAP || factor_prime_power(q).is_none() {
        return Err(Failure::input("q must be a prime power >= 2"));
    }
    Ok(())
}

fn check_sweep(lo: u64, hi: Option<u64>) -> Result<(), Failure> {
    if let Some(hi) = hi {
        if hi < lo {
            return Err(Failure::input("--n-to must be >= --n"));
        }
        if hi - lo >= SWEEP_CAP {
            return Err(Failure::input(format!("sweep too large (limit {SWEEP_CAP} rows)")));
        }
    }
    Ok(())
}

fn cmd_bound(a: &BoundArgs, g: &Globals) -> Result<String, Failure> {
    check_prime_power(a.q)?;
    if a.r < 1 {
        return Err(Failure::input("r must be >= 1"));
    }
    if a.k < 2 {
        return Err(Failure::input("k must be >= 2"));
    }
    if a.n < 1 {
        return Err(Failure::input("n must be >= 1"));
    }
    if a.r > PARAM_CAP || a.k > PARAM_CAP || a.d > PARAM_CAP || a.n > PARAM_CAP {
        return Err(Failure::input(format!("parameters must be at most {PARAM_CAP}")));
    }
    check_sweep(a.n, a.n_to)?;

    match a.n_to {
        None => {
            let rep = theorem_bound(a.q, a.r, a.k, a.d, a.n);
            Ok(match g.format {
                Format::Text => rep.to_text(),
                Format::Json => to_json(&rep)?,
                Format::Csv => format!("{}\n{}\n", BoundReport::csv_header(), rep.csv_row()),
            })
        }
        Some(hi) => {
            let reps: Vec<BoundReport> =
                (a.n..=hi).map(|n| theorem_bound(a.q, a.r, a.k, a.d, n)).collect();
            match g.format {
                Format::Json => to_json(&reps),
                // a sweep is tabular by nature; text degrades to the CSV table
                _ => {
                    let mut s = String::from(BoundReport::csv_header());
                    s.push('\n');
                    for r in &reps {
                        s.push_str(&r.csv_row());
                        s.push('\n');
                    }
                    Ok(s)
                }
            }
        }
    }
}

#[derive(Serialize)]
struct CountRow {
    q: u64,
    n: u64,
    degree_cap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    exact: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    hoeffding: Option<f64>,
    /// exact / hoeffding; how much slack the concentration bound leaves.
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
}

fn count_row(q: u64, n: u64, d: Option<f64>, epsilon: Option<f64>) -> Result<CountRow, Failure> {
    let (cap, hoeffding) = match (d, epsilon) {
        (Some(d), None) => (d, None),
        (None, Some(eps)) => {
            let bound = hoeffding_bound(n, eps, q)?;
            ((q - 1) as f64 * n as f64 * (0.5 - eps), Some(bound))
        }
        _ => unreachable!("clap enforces exactly one of --d/--epsilon"),
    };
    let exact = exact_monomial_count(n, cap, q);
    let ratio = hoeffding.map(|b| exact.to_f64().unwrap_or(f64::INFINITY) / b);
    Ok(CountRow {
        q,
        n,
        degree_cap: cap,
        epsilon,
        exact: exact.to_string(),
        hoeffding,
        ratio,
    })
}

fn count_csv(rows: &[CountRow]) -> String {
    let mut s = String::from("q,n,degree_cap,epsilon,exact,hoeffding,ratio\n");
    for r in rows {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.q,
            r.n,
            r.degree_cap,
            opt(r.epsilon),
            r.exact,
            opt(r.hoeffding),
            opt(r.ratio)
        );
    }
    s
}

fn count_text(r: &CountRow) -> String {
    let mut s = String::from("count report\n");
    match r.epsilon {
        Some(eps) => {
            let _ = writeln!(s, "  q={} n={} epsilon={} degree_cap={}", r.q, r.n, eps, r.degree_cap);
        }
        None => {
            let _ = writeln!(s, "  q={} n={} degree_cap={}", r.q, r.n, r.degree_cap);
        }
    }
    let _ = writeln!(s, "  exact: {}", r.exact);
    if let (Some(b), Some(ratio)) = (r.hoeffding, r.ratio) {
        let _ = writeln!(s, "  hoeffding: {b}");
        let _ = writeln!(s, "  ratio: {ratio}");
    }
    s
}

fn cmd_count(a: &CountArgs, g: &Globals) -> Result<String, Failure> {
    check_prime_power(a.q)?;
    if a.n > PARAM_CAP {
        return Err(Failure::input(format!("parameters must be at most {PARAM_CAP}")));
    }
    check_sweep(a.n, a.n_to)?;

    match a.n_to {
        None => {
            let row = count_row(a.q, a.n, a.d, a.epsilon)?;
            Ok(match g.format {
                Format::Text => count_text(&row),
                Format::Json => to_json(&row)?,
                Format::Csv => count_csv(std::slice::from_ref(&row)),
            })
        }
        Some(hi) => {
            let rows = (a.n..=hi)
                .map(|n| count_row(a.q, n, a.d, a.epsilon))
                .collect::<Result<Vec<_>, _>>()?;
            match g.format {
                Format::Json => to_json(&rows),
                _ => Ok(count_csv(&rows)),
            }
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

impl EquationArgs {
    fn load(&self) -> Result<(Field, EquationSpec), Failure> {
        let (f, eq) = if let Some(path) = &self.eq {
            parse_equation_file(&read_file(path)?)?
        } else {
            let q = self
                .q
                .ok_or_else(|| Failure::input("give --eq FILE, or --q/--r/--a inline"))?;
            let modulus = match &self.modulus {
                None => None,
                Some(s) => Some(parse_modulus(s)?),
            };
            let f = Field::from_order(q, modulus)?;
            let r = self.r.ok_or_else(|| Failure::input("--r is required without --eq"))?;
            let a_text =
                self.a.as_ref().ok_or_else(|| Failure::input("--a is required without --eq"))?;
            let coeffs = a_text
                .split(';')
                .map(|s| UniPoly::parse(s.trim(), &f))
                .collect::<Result<Vec<_>, _>>()?;
            let d = match self.d {
                Some(d) => d,
                None => coeffs.iter().filter_map(UniPoly::degree).max().unwrap_or(0),
            };
            let eq = EquationSpec::new(r, d, coeffs, &f)?;
            (f, eq)
        };
        // inline flags double as cross-checks when a file is given
        if let Some(q) = self.q {
            if q != f.q() {
                return Err(Failure::input(format!(
                    "--q {q} does not match the equation's field (q={})",
                    f.q()
                )));
            }
        }
        if let Some(r) = self.r {
            if r != eq.r {
                return Err(Failure::input(format!(
                    "--r {r} does not match the equation (r={})",
                    eq.r
                )));
            }
        }
        if let Some(k) = self.k {
            if k != eq.k() {
                return Err(Failure::input(format!(
                    "--k {k} does not match the number of coefficients ({})",
                    eq.k()
                )));
            }
        }
        if let Some(d) = self.d {
            if d != eq.d {
                return Err(Failure::input(format!(
                    "--d {d} does not match the equation (d={})",
                    eq.d
                )));
            }
        }
        Ok((f, eq))
    }
}

fn parse_modulus(s: &str) -> Result<Vec<u64>, Failure> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u64>()
                .map_err(|_| Failure::input(format!("bad modulus coefficient {tok:?}")))
        })
        .collect()
}

fn cmd_cover(a: &CoverArgs, g: &Globals) -> Result<String, Failure> {
    if g.format == Format::Csv {
        return Err(Failure::input("csv output is not available for cover"));
    }
    if a.n < 1 {
        return Err(Failure::input("n must be >= 1"));
    }
    let (f, eq) = a.eq.load()?;
    let map = build_equation_map(&eq, a.n, &f)?;
    let ind = indicator_poly(&map, &f, &g.budget)?;
    let threshold =
        Ratio::new((f.q() - 1) * map.m() as u64 * map.ell(), eq.k() as u64);
    let cover = build_cover(&ind, eq.k(), a.n, threshold, &f)?;

    let nvars = eq.k() * a.n;
    let exhaustive_ok =
        f.domain_size(nvars).is_some_and(|s| s <= u128::from(g.budget.max_points));
    let mode = if exhaustive_ok {
        VerifyMode::Exhaustive
    } else {
        VerifyMode::Sampled { samples: a.samples, seed: g.seed }
    };
    let verdict = verify_cover(&ind, &cover, &f, mode, &g.budget, g.threads)?;

    let size_bound = (BigUint::from(eq.k())
        * exact_monomial_count(a.n as u64, threshold.to_integer() as f64, f.q()))
    .to_string();
    let report = CoverReport {
        q: f.q(),
        modulus: f.modulus().map(<[u64]>::to_vec),
        n: a.n,
        equation: eq.clone(),
        m: map.m(),
        ell: map.ell(),
        cover_size: cover.size(),
        size_bound,
        verify_mode: mode,
        verdict,
        zero_coeff_warning: eq.has_zero_coeff(),
        cover,
    };
    match g.format {
        Format::Text => Ok(report.to_text()),
        Format::Json => to_json(&report),
        Format::Csv => unreachable!(),
    }
}

fn cmd_verify(a: &VerifyArgs, g: &Globals) -> Result<String, Failure> {
    if g.format == Format::Csv {
        return Err(Failure::input("csv output is not available for verify"));
    }
    let (f_eq, eq) = parse_equation_file(&read_file(&a.eq)?)?;
    let (f_set, set) = parse_polyset_file(&read_file(&a.set)?)?;
    if f_eq != f_set {
        return Err(Failure::input(
            "the set file and the equation file use different fields",
        ));
    }
    let report = verify_solution_free(&set, &eq, &f_eq, &g.budget, g.threads)?;
    match g.format {
        Format::Text => Ok(report.to_text()),
        Format::Json => to_json(&report),
        Format::Csv => unreachable!(),
    }
}

#[derive(Serialize)]
struct SearchReport {
    mode: &'static str,
    q: u64,
    n: usize,
    /// Exhaustive mode returns the exact maximum; greedy only a lower bound.
    exact_maximum: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    size: usize,
    members: Vec<String>,
}

fn search_text(r: &SearchReport) -> String {
    let mut s = String::from("search report\n");
    match r.seed {
        Some(seed) => {
            let _ = writeln!(s, "  q={} n={} mode={} seed={seed}", r.q, r.n, r.mode);
        }
        None => {
            let _ = writeln!(s, "  q={} n={} mode={}", r.q, r.n, r.mode);
        }
    }
    if r.exact_maximum {
        let _ = writeln!(s, "  max_free: {}", r.size);
    } else {
        let _ = writeln!(s, "  size: {}", r.size);
    }
    for m in &r.members {
        let _ = writeln!(s, "  member: {m}");
    }
    s
}

fn cmd_search(a: &SearchArgs, g: &Globals) -> Result<String, Failure> {
    if g.format == Format::Csv {
        return Err(Failure::input("csv output is not available for search"));
    }
    if a.n < 1 {
        return Err(Failure::input("n must be >= 1"));
    }
    let (f, eq) = a.eq.load()?;
    let report = match a.mode {
        SearchMode::Exhaustive => {
            let (max, set) = exhaustive_max_free(&f, a.n, &eq, &g.budget)?;
            SearchReport {
                mode: "exhaustive",
                q: f.q(),
                n: a.n,
                exact_maximum: true,
                seed: None,
                size: max,
                members: set.members().iter().map(UniPoly::to_text).collect(),
            }
        }
        SearchMode::Greedy => {
            let set = greedy_free(&f, a.n, &eq, g.seed, &g.budget)?;
            SearchReport {
                mode: "greedy",
                q: f.q(),
                n: a.n,
                exact_maximum: false,
                seed: Some(g.seed),
                size: set.len(),
                members: set.members().iter().map(UniPoly::to_text).collect(),
            }
        }
    };
    match g.format {
        Format::Text => Ok(search_text(&report)),
        Format::Json => to_json(&report),
        Format::Csv => unreachable!(),
    }
}
