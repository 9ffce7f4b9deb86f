//! The `osculant` command line.
//!
//! Exit codes: 0 on success, 1 on input errors, 2 when a verification
//! check fails.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::curvature::{analyze_with, AnalysisOptions, FlagReport};
use crate::immersion::{
    extremal_example, gallery, load_spec_file, random_corpus, random_polynomial_immersion,
    save_spec, ImmersionSpec,
};
use crate::linalg::RankTolerance;
use crate::report::{number, render_csv, render_json, report_value, TOOL_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

pub const SYMMETRY_LIMIT: f64 = 1e-8;
pub const EIGEN_SPAN_LIMIT: f64 = 1e-7;
pub const INVARIANCE_LIMIT: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "osculant",
    version,
    about = "Higher-order normal curvatures of parametrized immersions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Gallery,
    Random,
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    RankTolerance::new(x)
        .map(RankTolerance::value)
        .map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one immersion spec file.
    Analyze {
        spec: PathBuf,
        /// Base point, comma separated; defaults to the one in the spec.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
        /// Highest curvature order; defaults to the one in the spec.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_order: Option<u64>,
        /// Relative rank tolerance.
        #[arg(long, env = "OSCULANT_TOL", value_parser = parse_tol)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Also check invariance under the seeded domain rotation (repeatable).
        #[arg(long)]
        invariance_seed: Vec<u64>,
    },
    /// Write the extremal example spec for `n` and `r`.
    Extremal {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        r: u64,
        /// Monomial coefficients, comma separated; default all ones.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coefficients: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded random polynomial immersion spec.
    Random {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        degree: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        max_order: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every check over the gallery or a seeded random corpus.
    Verify {
        #[arg(long, value_enum, default_value = "gallery")]
        suite: Suite,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, env = "OSCULANT_TOL", value_parser = parse_tol)]
        tol: Option<f64>,
        /// Domain rotations per case for the invariance check.
        #[arg(long, default_value_t = 20)]
        rotations: u64,
        /// Also write every report as one JSON document.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write every gallery surface as a spec file.
    SaveGallery {
        #[arg(long, default_value = "gallery")]
        dir: PathBuf,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn tolerance(tol: Option<f64>) -> RankTolerance {
    tol.and_then(|t| RankTolerance::new(t).ok())
        .unwrap_or_default()
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| input_error(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Analyze {
            spec,
            point,
            max_order,
            tol,
            out,
            format,
            invariance_seed,
        } => cmd_analyze(
            &spec,
            point,
            max_order.map(|r| r as usize),
            tolerance(tol),
            out.as_deref(),
            format,
            invariance_seed,
        ),
        Command::Extremal {
            n,
            r,
            coefficients,
            out,
        } => {
            let im = extremal_example(n as usize, r as usize, coefficients.as_deref())
                .map_err(|e| input_error(e.to_string()))?;
            emit(
                out.as_deref(),
                &save_spec(&ImmersionSpec::at_origin(im, r as usize)),
            )?;
            Ok(EXIT_OK)
        }
        Command::Random {
            n,
            m,
            degree,
            seed,
            max_order,
            out,
        } => {
            let im = random_polynomial_immersion(n as usize, m as usize, degree as usize, seed)
                .map_err(|e| input_error(e.to_string()))?;
            emit(
                out.as_deref(),
                &save_spec(&ImmersionSpec::at_origin(im, max_order as usize)),
            )?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            suite,
            count,
            seed,
            tol,
            rotations,
            out,
        } => cmd_verify(
            suite,
            count,
            seed,
            tolerance(tol),
            rotations,
            out.as_deref(),
        ),
        Command::SaveGallery { dir } => {
            std::fs::create_dir_all(&dir)
                .map_err(|e| input_error(format!("cannot create {}: {e}", dir.display())))?;
            for spec in gallery() {
                let path = dir.join(format!("{}.spec", spec.immersion.name()));
                emit(Some(&path), &save_spec(&spec))?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn verification_failures(report: &FlagReport) -> Vec<&'static str> {
    let mut failed = Vec::new();
    if !report.bound_satisfied() {
        failed.push("bound");
    }
    if !report.weak_bounds_satisfied() {
        failed.push("weak bound");
    }
    if !report.psd_satisfied() {
        failed.push("psd");
    }
    if !report.oracle_match() {
        failed.push("oracle");
    }
    failed
}

fn cmd_analyze(
    spec_path: &Path,
    point: Option<Vec<f64>>,
    max_order: Option<usize>,
    tol: RankTolerance,
    out: Option<&Path>,
    format: Format,
    invariance_seeds: Vec<u64>,
) -> Result<i32, Failure> {
    let spec = load_spec_file(spec_path).map_err(|e| input_error(e.to_string()))?;
    let point = point.unwrap_or(spec.base_point);
    let max_order = max_order.unwrap_or(spec.max_order);
    let options = AnalysisOptions { invariance_seeds };
    let report = analyze_with(&spec.immersion, &point, max_order, tol, &options)
        .map_err(|e| input_error(e.to_string()))?;
    let text = match format {
        Format::Json => render_json(&report_value(&report)),
        Format::Csv => render_csv(&report).map_err(|e| input_error(e.to_string()))?,
    };
    emit(out, &text)?;
    let failed = verification_failures(&report);
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("verification failed: {}", failed.join(", "));
        Ok(EXIT_VERIFY)
    }
}

/// Outcome of one verification case.
#[derive(Debug)]
pub struct CaseResult {
    pub spec: ImmersionSpec,
    pub report: Result<FlagReport, String>,
}

impl CaseResult {
    /// Names of the failed checks; empty when the case passes.
    pub fn failures(&self) -> Vec<&'static str> {
        let Ok(r) = &self.report else {
            return vec!["error"];
        };
        let mut failed = verification_failures(r);
        if r.symmetry_residual > SYMMETRY_LIMIT {
            failed.push("symmetry");
        }
        if r.eigen_span_residuals.iter().any(|&x| x > EIGEN_SPAN_LIMIT) {
            failed.push("eigen span");
        }
        if r.frame_invariance_residual
            .is_some_and(|x| x > INVARIANCE_LIMIT)
        {
            failed.push("invariance");
        }
        if r.any_ill_conditioned() {
            failed.push("ill-conditioned");
        }
        failed
    }
}

/// Analyzes every case of a suite in parallel, keeping input order.
pub fn run_suite(specs: Vec<ImmersionSpec>, tol: RankTolerance, rotations: u64) -> Vec<CaseResult> {
    let options = AnalysisOptions {
        invariance_seeds: (0..rotations).collect(),
    };
    specs
        .into_par_iter()
        .map(|spec| {
            let report = analyze_with(
                &spec.immersion,
                &spec.base_point,
                spec.max_order,
                tol,
                &options,
            )
            .map_err(|e| e.to_string());
            CaseResult { spec, report }
        })
        .collect()
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// The fixed-width summary printed by `verify`.
pub fn summary_table(results: &[CaseResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<44} {:>2} {:>3} {:>2} {:<12} {:<12} {:>9} {:>9} {:>9}  status",
        "case", "n", "m", "R", "dims", "oracle", "symmetry", "span", "invariance"
    );
    let mut passed = 0;
    for case in results {
        let im = &case.spec.immersion;
        let failures = case.failures();
        let status = if failures.is_empty() {
            passed += 1;
            "ok".to_string()
        } else {
            format!("FAIL({})", failures.join(", "))
        };
        match &case.report {
            Ok(r) => {
                let span = r.eigen_span_residuals.iter().copied().fold(0.0, f64::max);
                let inv = r
                    .frame_invariance_residual
                    .map_or("-".to_string(), |x| format!("{x:.2e}"));
                let _ = writeln!(
                    s,
                    "{:<44} {:>2} {:>3} {:>2} {:<12} {:<12} {:>9.2e} {:>9.2e} {:>9}  {}",
                    im.name(),
                    r.n,
                    r.m,
                    r.max_order,
                    join(&r.flag.dims),
                    join(&r.oracle_dims),
                    r.symmetry_residual,
                    span,
                    inv,
                    status
                );
            }
            Err(e) => {
                let _ = writeln!(
                    s,
                    "{:<44} {:>2} {:>3} {:>2} {}  {}",
                    im.name(),
                    im.dim_domain(),
                    im.dim_ambient(),
                    case.spec.max_order,
                    e,
                    status
                );
            }
        }
    }
    let _ = writeln!(s, "{passed}/{} cases passed", results.len());
    s
}

fn suite_value(results: &[CaseResult], tol: RankTolerance, suite: Suite) -> Value {
    let mut doc = Map::new();
    doc.insert("tool_version".into(), Value::from(TOOL_VERSION));
    doc.insert(
        "suite".into(),
        Value::from(match suite {
            Suite::Gallery => "gallery",
            Suite::Random => "random",
        }),
    );
    doc.insert("tolerance".into(), number(tol.value()));
    let cases: Vec<Value> = results
        .iter()
        .map(|c| {
            let mut o = Map::new();
            o.insert("name".into(), Value::from(c.spec.immersion.name()));
            match &c.report {
                Ok(r) => {
                    o.insert("report".into(), report_value(r));
                }
                Err(e) => {
                    o.insert("error".into(), Value::from(e.clone()));
                }
            }
            o.insert(
                "failures".into(),
                Value::Array(c.failures().into_iter().map(Value::from).collect()),
            );
            Value::Object(o)
        })
        .collect();
    doc.insert("cases".into(), Value::Array(cases));
    Value::Object(doc)
}

fn cmd_verify(
    suite: Suite,
    count: usize,
    seed: u64,
    tol: RankTolerance,
    rotations: u64,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    let specs = match suite {
        Suite::Gallery => gallery(),
        Suite::Random => random_corpus(count, seed),
    };
    let results = run_suite(specs, tol, rotations);
    print!("{}", summary_table(&results));
    if let Some(path) = out {
        emit(Some(path), &render_json(&suite_value(&results, tol, suite)))?;
    }
    if results.iter().all(|c| c.failures().is_empty()) {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_VERIFY)
    }
}
