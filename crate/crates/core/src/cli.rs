//! Command-line front end. [`run`] parses, validates and executes one
//! subcommand and returns the process exit code:
//!
//! | code | meaning |
//! |---|---|
//! | 0 | success, or every probe passed |
//! | 1 | a verification or equivalence check failed |
//! | 2 | usage or configuration error |
//! | 3 | ambiguous numerical rank |

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kernel::{self, harmonic_space_with, kernel_basis};
use crate::meanvalue::{self, DomainBox, Oracle, Probe};
use crate::moments::{self, MomentTable};
use crate::norms::{parse_rational, LpExponent, NormKind, NormSpec, Polytope};
use crate::pde;
use crate::polycore::{factorial, Polynomial};

#[derive(Debug, Parser)]
#[command(name = "strongly-harmonic", version, about = "Mean-value harmonic polynomials for norm balls and weighted measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
struct NormArgs {
    /// `lp:<p>` with p ≥ 1 a decimal, fraction or `inf`; or `polytope:<file.json>`.
    #[arg(long)]
    norm: String,
    /// Dimension (ignored for polytope files, which carry their own).
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Args, Clone)]
struct OutputArgs {
    /// Write the result here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OracleArg {
    /// Pizzetti series; approximate when the moments are.
    Pizzetti,
    /// Pizzetti series, rejected unless the moments are exact rationals.
    ExactPizzetti,
    /// Monte-Carlo rejection sampling.
    Mc,
    /// Exact integration over the triangulated ball (polytope norms).
    Exact,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalized unit-ball moments up to an order, as JSON.
    Moments {
        #[command(flatten)]
        norm: NormArgs,
        #[arg(long, default_value_t = 4)]
        max_order: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Canonical basis of strongly harmonic polynomials up to a degree.
    Basis {
        #[command(flatten)]
        norm: NormArgs,
        #[arg(long, default_value = "1")]
        weight: String,
        #[arg(long, default_value_t = 6)]
        degree: u32,
        /// Equation orders, e.g. `2,4`; defaults to every even order that can
        /// constrain the ansatz.
        #[arg(long, value_delimiter = ',')]
        j_list: Option<Vec<u32>>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check the mean-value property of a candidate at probe balls.
    Verify {
        #[command(flatten)]
        norm: NormArgs,
        #[arg(long, default_value = "1")]
        weight: String,
        #[arg(long)]
        candidate: String,
        /// Probe `x1,…,xn;r`, repeatable; rationals such as `1/10` are exact.
        #[arg(long = "probe")]
        probes: Vec<String>,
        /// Additional seeded random admissible probes.
        #[arg(long, default_value_t = 0)]
        random_probes: usize,
        #[arg(long, default_value = "1")]
        max_radius: String,
        #[arg(long, value_enum, default_value_t = OracleArg::Pizzetti)]
        oracle: OracleArg,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Domain box `lo,hi`, applied to every coordinate.
        #[arg(long, default_value = "-10,10", allow_hyphen_values = true)]
        domain: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Weighted ball mean by the Pizzetti series.
    Pizzetti {
        #[command(flatten)]
        norm: NormArgs,
        /// Polynomial to average.
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "1")]
        weight: String,
        /// Center `x1,…,xn`.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long)]
        radius: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Kernel dimension per ansatz degree, as CSV.
    Scan {
        #[command(flatten)]
        norm: NormArgs,
        #[arg(long, default_value = "1")]
        weight: String,
        /// Degree range `a..b` (inclusive) or list `a,b,c`.
        #[arg(long, default_value = "2..8")]
        degrees: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Table of f(p) = Γ(3/p)²/(Γ(5/p)Γ(1/p)) and its derivative, as CSV.
    Fp {
        /// Comma-separated p values; defaults to 1, 1.1, …, 10, 20, 50, 100.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare the Euclidean Bose, iterated-Laplacian and moment systems.
    Bose {
        #[arg(long, default_value = "1")]
        weight: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        degree: u32,
        /// Highest `j` in `Δʲw` for the Bose system (iterated system uses l + 1).
        #[arg(long)]
        l: Option<u32>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::AmbiguousRank { .. } => 3,
        _ => 2,
    }
}

fn parse_norm(args: &NormArgs) -> Result<NormSpec> {
    if let Some(p) = args.norm.strip_prefix("lp:") {
        return NormSpec::lp(LpExponent::parse(p)?, args.n.unwrap_or(2));
    }
    if let Some(path) = args.norm.strip_prefix("polytope:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidNorm(format!("cannot read {path}: {e}")))?;
        let poly = Polytope::from_json(&text)?;
        if let Some(n) = args.n {
            if n != poly.dim() {
                return Err(Error::DimensionMismatch { expected: n, found: poly.dim() });
            }
        }
        return Ok(NormSpec::polytope(poly));
    }
    Err(Error::InvalidNorm(format!("expected lp:<p> or polytope:<file>, got {:?}", args.norm)))
}

fn parse_point(text: &str, n: usize) -> Result<Vec<BigRational>> {
    let coords = text.split(',').map(|c| parse_rational(c.trim())).collect::<Result<Vec<_>>>()?;
    if coords.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: coords.len() });
    }
    Ok(coords)
}

fn parse_probe(text: &str, n: usize) -> Result<Probe> {
    let (center, radius) = text
        .split_once(';')
        .ok_or_else(|| Error::Parse(format!("probe {text:?} is not of the form x1,…,xn;r")))?;
    Ok(Probe::new(parse_point(center, n)?, parse_rational(radius.trim())?))
}

fn parse_domain(text: &str, n: usize) -> Result<DomainBox> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("domain {text:?} is not of the form lo,hi")))?;
    let (lo, hi) = (parse_rational(lo.trim())?, parse_rational(hi.trim())?);
    DomainBox::new(vec![lo; n], vec![hi; n])
}

fn parse_degrees(text: &str) -> Result<Vec<u32>> {
    let bad = || Error::Parse(format!("degree range {text:?} is not a..b or a,b,…"));
    if let Some((a, b)) = text.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(|d| d.trim().parse().map_err(|_| bad())).collect()
}

fn default_fp_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (10..=100).map(|k| k as f64 / 10.0).collect();
    grid.extend([20.0, 50.0, 100.0]);
    grid
}

fn emit(out: &OutputArgs, text: &str) -> Result<()> {
    match &out.output {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

fn emit_json(out: &OutputArgs, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, &text)
}

/// Order of the signed permutation group, the linear isometry group of
/// `ℓᵖ` for `p ≠ 2`.
fn signed_permutations(n: usize) -> BigInt {
    BigInt::from(2).pow(n as u32) * factorial(n as u32)
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Moments { norm, max_order, out } => {
            let norm = parse_norm(&norm)?;
            let table = MomentTable::build(&norm, max_order)?;
            emit_json(&out, &table.to_json())?;
            Ok(0)
        }
        Command::Basis { norm, weight, degree, j_list, out } => {
            let norm = parse_norm(&norm)?;
            let w = Polynomial::parse(&weight, norm.dim())?;
            let j_list = j_list.unwrap_or_else(|| pde::default_j_list(&w, degree));
            if j_list.is_empty() {
                return Err(Error::InvalidArgument("empty --j-list".into()));
            }
            if j_list.iter().any(|j| j % 2 == 1) {
                eprintln!("warning: odd equation orders give zero rows for symmetric balls");
            }
            let table = MomentTable::build(&norm, *j_list.iter().max().unwrap())?;
            let basis = kernel_basis(&pde::assemble_general(&w, &table, &j_list, degree)?)?;
            let mut v = basis.to_json();
            if let NormKind::Lp(p) = norm.kind() {
                if *p != LpExponent::finite(2) {
                    v["linear_isometries"] = json!(signed_permutations(norm.dim()).to_string());
                }
            }
            emit_json(&out, &v)?;
            Ok(0)
        }
        Command::Verify {
            norm,
            weight,
            candidate,
            probes,
            random_probes,
            max_radius,
            oracle,
            samples,
            seed,
            domain,
            out,
        } => {
            let norm = parse_norm(&norm)?;
            let n = norm.dim();
            let u = Polynomial::parse(&candidate, n)?;
            let w = Polynomial::parse(&weight, n)?;
            let domain = parse_domain(&domain, n)?;
            let mut list = probes.iter().map(|p| parse_probe(p, n)).collect::<Result<Vec<_>>>()?;
            if random_probes > 0 {
                let r = parse_rational(&max_radius)?;
                list.extend(meanvalue::random_probes(&norm, &domain, random_probes, &r, seed)?);
            }
            if list.is_empty() {
                return Err(Error::InvalidArgument("no probes: pass --probe or --random-probes".into()));
            }
            let oracle = match oracle {
                OracleArg::Pizzetti => Oracle::Pizzetti,
                OracleArg::ExactPizzetti => {
                    if !MomentTable::build(&norm, 2)?.is_exact() {
                        return Err(Error::InvalidArgument(format!("{norm} has irrational moments")));
                    }
                    Oracle::Pizzetti
                }
                OracleArg::Mc => Oracle::MonteCarlo { samples, seed },
                OracleArg::Exact => Oracle::ExactPolytope,
            };
            let report = meanvalue::verify_strongly_harmonic(&u, &w, &norm, &list, oracle, &domain)?;
            let mut v = serde_json::to_value(&report)?;
            v["seed"] = json!(seed);
            emit_json(&out, &v)?;
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Pizzetti { norm, f, weight, at, radius, out } => {
            let norm = parse_norm(&norm)?;
            let n = norm.dim();
            let f = Polynomial::parse(&f, n)?;
            let w = Polynomial::parse(&weight, n)?;
            let x = parse_point(&at, n)?;
            let r = parse_rational(&radius)?;
            let table = MomentTable::build(&norm, f.degree() + w.degree())?;
            let mean = meanvalue::weighted_mean(&f, &w, &table, &x, &r)?;
            let v = json!({
                "f": f.to_string(),
                "weight": w.to_string(),
                "norm": norm.to_json(),
                "center": x.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "radius": r.to_string(),
                "mean": mean,
                "value_at_center": f.evaluate(&x)?.to_string(),
            });
            emit_json(&out, &v)?;
            Ok(0)
        }
        Command::Scan { norm, weight, degrees, out } => {
            let norm = parse_norm(&norm)?;
            let w = Polynomial::parse(&weight, norm.dim())?;
            let scan = kernel::stabilization_scan(&norm, &w, &parse_degrees(&degrees)?)?;
            emit(&out, &scan.to_csv())?;
            eprintln!("stabilized: {}", scan.stabilized);
            Ok(0)
        }
        Command::Fp { grid, out } => {
            let grid = grid.unwrap_or_else(default_fp_grid);
            if grid.iter().any(|&p| !(p >= 1.0) || !p.is_finite()) {
                return Err(Error::InvalidArgument("grid values must be finite and ≥ 1".into()));
            }
            let scan = moments::f_ratio_scan(&grid);
            let mut csv = String::from("p,f,df_numeric,df_closed\n");
            for pt in &scan.points {
                csv.push_str(&format!("{},{:.17e},{:.17e},{:.17e}\n", pt.p, pt.f, pt.derivative_numeric, pt.derivative_closed));
            }
            emit(&out, &csv)?;
            eprintln!(
                "strictly increasing: {}; f = 1/3 at p = {}",
                scan.strictly_increasing,
                scan.crossing.map_or("none in grid".to_string(), |c| format!("{c:.12}"))
            );
            Ok(0)
        }
        Command::Bose { weight, n, degree, l, out } => {
            let w = Polynomial::parse(&weight, n)?;
            let j_list = pde::default_j_list(&w, degree);
            let l = l.unwrap_or(j_list.len() as u32 - 1);
            let bose = kernel_basis(&pde::assemble_bose(&w, l, degree)?)?;
            let iterated = kernel_basis(&pde::assemble_iterated_laplace(&w, l + 1, degree)?)?;
            let euclid = NormSpec::lp(LpExponent::finite(2), n)?;
            let top = (2 * (l + 1)).max(*j_list.last().unwrap());
            let table = MomentTable::build(&euclid, top)?;
            let general = harmonic_space_with(&table, &w, degree)?;
            let coincide = bose.same_span(&iterated) && bose.same_span(&general);
            let v = json!({
                "weight": w.to_string(),
                "degree": degree,
                "l": l,
                "bose": bose.to_json(),
                "iterated_laplace": iterated.to_json(),
                "general": general.to_json(),
                "coincide": coincide,
            });
            emit_json(&out, &v)?;
            Ok(if coincide { 0 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_ranges() {
        assert_eq!(parse_degrees("4..8").unwrap(), vec![4, 5, 6, 7, 8]);
        assert_eq!(parse_degrees("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_degrees("2,4,6").unwrap(), vec![2, 4, 6]);
        assert!(parse_degrees("5..2").is_err());
        assert!(parse_degrees("a").is_err());
    }

    #[test]
    fn probes_and_domains() {
        let p = parse_probe("1/10, -0.2;1/4", 2).unwrap();
        assert_eq!(p.center[1], BigRational::new((-1).into(), 5.into()));
        assert!(parse_probe("0,0", 2).is_err());
        assert!(parse_probe("0;1", 2).is_err());
        assert!(parse_domain("1,-1", 2).is_err());
        assert_eq!(parse_domain("-1,1", 3).unwrap().dim(), 3);
    }

    #[test]
    fn norm_parsing() {
        let a = NormArgs { norm: "lp:inf".into(), n: Some(3) };
        assert_eq!(parse_norm(&a).unwrap().dim(), 3);
        let b = NormArgs { norm: "l2".into(), n: None };
        assert!(matches!(parse_norm(&b), Err(Error::InvalidNorm(_))));
        let c = NormArgs { norm: "lp:0.5".into(), n: None };
        assert!(parse_norm(&c).is_err());
    }

    #[test]
    fn fp_grid_default() {
        let g = default_fp_grid();
        assert_eq!(g.len(), 94);
        assert_eq!(g[0], 1.0);
        assert_eq!(*g.last().unwrap(), 100.0);
    }

    #[test]
    fn isometry_count() {
        assert_eq!(signed_permutations(3), BigInt::from(48));
    }
}
