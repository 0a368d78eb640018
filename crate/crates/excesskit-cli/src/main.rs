//! Command-line front end: parse ideal files, dispatch to the formula,
//! mixed-volume and homotopy methods, run cross-checks, and emit
//! machine-readable reports.
//!
//! Exit codes: 0 success, 1 cross-check disagreement, 2 bad input,
//! 3 inconclusive numeric run.

mod ideal_file;
mod report;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use excesskit_core::{
    excess_by_mixed_volume, excess_powers, run_hit_iterations, run_hup, DegreeVector, EngineConfig,
    EngineError, ExcessRunReport, IdealSpec, PowersIdealSpec, SolutionSet, SparsePolynomial,
    VariableSet,
};
use num_traits::ToPrimitive;
use report::{
    bound_kind_str, render, run_report_fields, IdealEcho, Inputs, MethodValue, Report, Tolerances,
    SCHEMA,
};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "excesskit",
    version,
    about = "Count the isolated solutions of a square homogeneous system away from an ideal's variety"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed formula for ideals generated by powers of variables
    Formula(FormulaArgs),
    /// Exact mixed volume of the system's Newton polytopes
    Mixedvol(MixedvolArgs),
    /// Endpoint-continuation run; exact after the membership split
    Hup(HupArgs),
    /// Iterated lower-bound run with fresh blend factors
    Hit(HitArgs),
    /// Run every applicable method and check agreement
    Crosscheck(CrosscheckArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// System degrees d_1,..,d_n (comma separated)
    #[arg(long, value_delimiter = ',', required = true)]
    degrees: Vec<u32>,
    /// Random seed; falls back to EXCESSKIT_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Corrector and polish residual tolerance
    #[arg(long)]
    tol_newton: Option<f64>,
    /// Generator-residual membership tolerance
    #[arg(long)]
    tol_membership: Option<f64>,
    /// Write per-path accepted steps to this file
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct FormulaArgs {
    /// Generator exponents p_1,..,p_k (comma separated)
    #[arg(long, value_delimiter = ',', required = true)]
    powers: Vec<u32>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct MixedvolArgs {
    /// Ideal file (text with a vars: header, or structured JSON)
    #[arg(long, required = true)]
    ideal: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct HupArgs {
    #[arg(long, required = true)]
    ideal: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct HitArgs {
    #[arg(long, required = true)]
    ideal: PathBuf,
    /// Equal-degree monomials paired with the generators (comma separated)
    #[arg(long, required = true)]
    monomials: String,
    /// Blend-factor iterations
    #[arg(long, default_value_t = 8)]
    max_iters: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CrosscheckArgs {
    #[arg(long)]
    ideal: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    powers: Option<Vec<u32>>,
    /// Monomials for an additional lower-bound run
    #[arg(long)]
    monomials: Option<String>,
    #[arg(long, default_value_t = 8)]
    max_iters: usize,
    #[command(flatten)]
    common: CommonArgs,
}

/// `--method X ...` is accepted as an alias for the `X` subcommand.
fn preprocess_method_flag(mut args: Vec<String>) -> Vec<String> {
    let mut i = 1;
    while i < args.len() {
        if args[i] == "--method" && i + 1 < args.len() {
            let method = args.remove(i + 1);
            args.remove(i);
            args.insert(1, method);
            return args;
        }
        if let Some(method) = args[i].strip_prefix("--method=") {
            let method = method.to_string();
            args.remove(i);
            args.insert(1, method);
            return args;
        }
        i += 1;
    }
    args
}

fn main() -> ExitCode {
    let args = preprocess_method_flag(std::env::args().collect());
    let cli = Cli::parse_from(args);
    match dispatch(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.exit)
        }
    }
}

struct Failure {
    exit: u8,
    message: String,
}

fn input_error(err: impl std::fmt::Display) -> Failure {
    Failure {
        exit: 2,
        message: err.to_string(),
    }
}

fn engine_failure(err: EngineError) -> Failure {
    match err {
        EngineError::NonGenericStart { .. } | EngineError::Inconclusive { .. } => Failure {
            exit: 3,
            message: err.to_string(),
        },
        other => input_error(other),
    }
}

fn dispatch(cli: Cli) -> std::result::Result<ExitCode, Failure> {
    let started = Instant::now();
    let (report, exit) = match cli.command {
        Command::Formula(args) => (cmd_formula(&args)?, ExitCode::SUCCESS),
        Command::Mixedvol(args) => (cmd_mixedvol(&args)?, ExitCode::SUCCESS),
        Command::Hup(args) => (cmd_hup(&args)?, ExitCode::SUCCESS),
        Command::Hit(args) => (cmd_hit(&args)?, ExitCode::SUCCESS),
        Command::Crosscheck(args) => {
            let (report, agree) = cmd_crosscheck(&args)?;
            let exit = if agree {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
            (report, exit)
        }
    };
    let rendered = render(&report.0);
    match &report.1 {
        Some(path) => {
            std::fs::write(path, &rendered).map_err(input_error)?;
        }
        None => print!("{rendered}"),
    }
    eprintln!(
        "{} finished in {} ms",
        report.0.method,
        started.elapsed().as_millis()
    );
    Ok(exit)
}

type Rendered = (Report, Option<PathBuf>);

fn resolve_seed(args: &CommonArgs) -> u64 {
    args.seed
        .or_else(|| {
            std::env::var("EXCESSKIT_SEED")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0)
}

fn engine_config(args: &CommonArgs) -> EngineConfig {
    let mut cfg = EngineConfig::default();
    if let Some(tol) = args.tol_newton {
        cfg.tracker.newton_tol = tol;
    }
    if let Some(tol) = args.tol_membership {
        cfg.membership_tol = tol;
    }
    cfg.trace = args.trace.is_some();
    cfg
}

fn tolerances(cfg: &EngineConfig) -> Tolerances {
    Tolerances {
        newton: cfg.tracker.newton_tol,
        membership: cfg.membership_tol,
        dedupe: cfg.dedupe_tol,
    }
}

fn degree_vector(degrees: &[u32]) -> std::result::Result<DegreeVector, Failure> {
    DegreeVector::new(degrees.to_vec()).map_err(input_error)
}

fn big_to_u64(value: &excesskit_core::BigInt) -> std::result::Result<u64, Failure> {
    value
        .to_u64()
        .ok_or_else(|| input_error("count does not fit in 64 bits"))
}

fn ideal_echo(ideal: &IdealSpec) -> IdealEcho {
    IdealEcho {
        vars: ideal.vars().names().to_vec(),
        generators: ideal
            .generators()
            .iter()
            .map(|g| g.display(ideal.vars()).to_string())
            .collect(),
    }
}

fn write_trace(path: &PathBuf, report: &ExcessRunReport) -> std::result::Result<(), Failure> {
    let mut out = String::new();
    for (path_idx, t, step, residual) in &report.trace {
        out.push_str(&format!(
            "path={path_idx} t={t:.6e} step={step:.6e} residual={residual:.6e}\n"
        ));
    }
    std::fs::write(path, out).map_err(input_error)
}

fn cmd_formula(args: &FormulaArgs) -> std::result::Result<Rendered, Failure> {
    let powers = PowersIdealSpec::new(args.powers.clone()).map_err(input_error)?;
    let d = degree_vector(&args.common.degrees)?;
    let result = excess_powers(&powers, &d).map_err(input_error)?;
    let cfg = engine_config(&args.common);
    let report = Report {
        schema: SCHEMA,
        method: "formula",
        inputs: Inputs {
            ideal: None,
            powers: Some(args.powers.clone()),
            degrees: args.common.degrees.clone(),
            monomials: None,
            tolerances: tolerances(&cfg),
        },
        excess: big_to_u64(&result.excess)?,
        equivalence: big_to_u64(&result.equivalence)?,
        bezout: big_to_u64(&result.bezout)?,
        bound_kind: "exact",
        start_count: None,
        upper_bound: None,
        solutions: None,
        path_stats: None,
        gamma_history: None,
        iterations: None,
        methods: None,
        agree: None,
        seed: resolve_seed(&args.common),
    };
    Ok((report, args.common.out.clone()))
}

fn cmd_mixedvol(args: &MixedvolArgs) -> std::result::Result<Rendered, Failure> {
    let ideal = ideal_file::load_ideal(&args.ideal).map_err(input_error)?;
    let d = degree_vector(&args.common.degrees)?;
    let (value, bound_kind) = if ideal.is_monomial() {
        (
            excess_by_mixed_volume(&ideal, &d).map_err(input_error)?,
            "exact",
        )
    } else {
        let monomialized = ideal.monomialize();
        (
            excess_by_mixed_volume(&monomialized, &d).map_err(input_error)?,
            "upper",
        )
    };
    let bezout: u64 = args.common.degrees.iter().map(|&x| x as u64).product();
    let cfg = engine_config(&args.common);
    let report = Report {
        schema: SCHEMA,
        method: "mixedvol",
        inputs: Inputs {
            ideal: Some(ideal_echo(&ideal)),
            powers: None,
            degrees: args.common.degrees.clone(),
            monomials: None,
            tolerances: tolerances(&cfg),
        },
        excess: value,
        equivalence: bezout - value,
        bezout,
        bound_kind,
        start_count: None,
        upper_bound: None,
        solutions: None,
        path_stats: None,
        gamma_history: None,
        iterations: None,
        methods: None,
        agree: None,
        seed: resolve_seed(&args.common),
    };
    Ok((report, args.common.out.clone()))
}

fn cmd_hup(args: &HupArgs) -> std::result::Result<Rendered, Failure> {
    let ideal = ideal_file::load_ideal(&args.ideal).map_err(input_error)?;
    let d = degree_vector(&args.common.degrees)?;
    let cfg = engine_config(&args.common);
    let seed = resolve_seed(&args.common);
    let run = run_hup(&ideal, &d, &cfg, seed).map_err(engine_failure)?;
    if let Some(path) = &args.common.trace {
        write_trace(path, &run)?;
    }
    let bezout: u64 = args.common.degrees.iter().map(|&x| x as u64).product();
    let (solutions, path_stats) = run_report_fields(&run);
    let report = Report {
        schema: SCHEMA,
        method: "hup",
        inputs: Inputs {
            ideal: Some(ideal_echo(&ideal)),
            powers: None,
            degrees: args.common.degrees.clone(),
            monomials: None,
            tolerances: tolerances(&cfg),
        },
        excess: run.excess_count as u64,
        equivalence: bezout - run.excess_count as u64,
        bezout,
        bound_kind: bound_kind_str(run.bound_kind),
        start_count: Some(run.start_count),
        upper_bound: run.upper_bound,
        solutions: Some(solutions),
        path_stats: Some(path_stats),
        gamma_history: None,
        iterations: None,
        methods: None,
        agree: None,
        seed,
    };
    Ok((report, args.common.out.clone()))
}

fn cmd_hit(args: &HitArgs) -> std::result::Result<Rendered, Failure> {
    let ideal = ideal_file::load_ideal(&args.ideal).map_err(input_error)?;
    let monomials =
        ideal_file::parse_monomials(&args.monomials, ideal.vars()).map_err(input_error)?;
    let d = degree_vector(&args.common.degrees)?;
    let cfg = engine_config(&args.common);
    let seed = resolve_seed(&args.common);
    let run = run_hit_iterations(
        &ideal,
        &monomials,
        &d,
        &cfg,
        seed,
        args.max_iters,
        &SolutionSet::default(),
    )
    .map_err(engine_failure)?;
    if let Some(path) = &args.common.trace {
        write_trace(path, &run)?;
    }
    let bezout: u64 = args.common.degrees.iter().map(|&x| x as u64).product();
    let (solutions, path_stats) = run_report_fields(&run);
    let report = Report {
        schema: SCHEMA,
        method: "hit",
        inputs: Inputs {
            ideal: Some(ideal_echo(&ideal)),
            powers: None,
            degrees: args.common.degrees.clone(),
            monomials: Some(
                monomials
                    .generators()
                    .iter()
                    .map(|g| g.display(monomials.vars()).to_string())
                    .collect(),
            ),
            tolerances: tolerances(&cfg),
        },
        excess: run.excess_count as u64,
        equivalence: bezout - run.excess_count as u64,
        bezout,
        bound_kind: bound_kind_str(run.bound_kind),
        start_count: Some(run.start_count),
        upper_bound: None,
        solutions: Some(solutions),
        path_stats: Some(path_stats),
        gamma_history: Some(run.gamma_history.iter().map(|g| [g.re, g.im]).collect()),
        iterations: Some(
            run.iterations
                .iter()
                .map(|it| report::JsonIteration {
                    gamma: [it.gamma.re, it.gamma.im],
                    new_points: it.new_points,
                    cumulative: it.cumulative,
                })
                .collect(),
        ),
        methods: None,
        agree: None,
        seed,
    };
    Ok((report, args.common.out.clone()))
}

/// Detect an ideal of the form (x_{i1}^{p1}, ..., x_{ik}^{pk}) with distinct
/// non-homogenizing variables, which the closed formula covers.
fn powers_form(ideal: &IdealSpec) -> Option<Vec<u32>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut powers = Vec::new();
    for g in ideal.generators() {
        if g.num_terms() != 1 {
            return None;
        }
        let (exps, _) = g.terms().next().unwrap();
        let nonzero: Vec<(usize, u32)> = exps
            .exps()
            .iter()
            .enumerate()
            .filter(|&(_, &e)| e > 0)
            .map(|(i, &e)| (i, e))
            .collect();
        match nonzero.as_slice() {
            [(index, power)] if *index != 0 && seen.insert(*index) => powers.push(*power),
            _ => return None,
        }
    }
    Some(powers)
}

fn powers_ideal(powers: &[u32], n: usize) -> Result<IdealSpec> {
    let names: Vec<String> = (0..=n).map(|i| format!("x{i}")).collect();
    let vars = VariableSet::new(names)?;
    if powers.len() > n {
        return Err(anyhow!("more powers than system degrees"));
    }
    let gens: Vec<SparsePolynomial> = powers
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut exps = vec![0u32; n + 1];
            exps[i + 1] = p;
            SparsePolynomial::monomial(n + 1, exps, num_complex::Complex64::new(1.0, 0.0))
        })
        .collect::<std::result::Result<_, _>>()?;
    IdealSpec::new(gens, vars).context("building powers ideal")
}

fn cmd_crosscheck(args: &CrosscheckArgs) -> std::result::Result<(Rendered, bool), Failure> {
    let d = degree_vector(&args.common.degrees)?;
    let cfg = engine_config(&args.common);
    let seed = resolve_seed(&args.common);

    let (ideal, powers) = match (&args.ideal, &args.powers) {
        (Some(path), None) => {
            let ideal = ideal_file::load_ideal(path).map_err(input_error)?;
            let powers = powers_form(&ideal);
            (ideal, powers)
        }
        (None, Some(powers)) => {
            let ideal = powers_ideal(powers, args.common.degrees.len()).map_err(input_error)?;
            (ideal, Some(powers.clone()))
        }
        _ => {
            return Err(input_error(
                "crosscheck needs exactly one of --ideal or --powers",
            ))
        }
    };

    let mut methods: Vec<MethodValue> = Vec::new();
    if let Some(p) = &powers {
        let spec = PowersIdealSpec::new(p.clone()).map_err(input_error)?;
        let result = excess_powers(&spec, &d).map_err(input_error)?;
        methods.push(MethodValue {
            method: "formula",
            value: big_to_u64(&result.excess)?,
            bound_kind: "exact",
        });
    }
    if ideal.is_monomial() {
        let value = excess_by_mixed_volume(&ideal, &d).map_err(input_error)?;
        methods.push(MethodValue {
            method: "mixedvol",
            value,
            bound_kind: "exact",
        });
    } else {
        let value = excess_by_mixed_volume(&ideal.monomialize(), &d).map_err(input_error)?;
        methods.push(MethodValue {
            method: "mixedvol",
            value,
            bound_kind: "upper",
        });
    }
    let hup_run = run_hup(&ideal, &d, &cfg, seed).map_err(engine_failure)?;
    methods.push(MethodValue {
        method: "hup",
        value: hup_run.excess_count as u64,
        bound_kind: "exact",
    });
    if let Some(spec) = &args.monomials {
        let monomials = ideal_file::parse_monomials(spec, ideal.vars()).map_err(input_error)?;
        let run = run_hit_iterations(
            &ideal,
            &monomials,
            &d,
            &cfg,
            seed,
            args.max_iters,
            &SolutionSet::default(),
        )
        .map_err(engine_failure)?;
        methods.push(MethodValue {
            method: "hit",
            value: run.excess_count as u64,
            bound_kind: "lower",
        });
    }

    let reference = methods
        .iter()
        .find(|m| m.bound_kind == "exact")
        .map(|m| m.value)
        .expect("hup always contributes an exact value");
    let agree = methods.iter().all(|m| match m.bound_kind {
        "exact" => m.value == reference,
        "upper" => m.value >= reference,
        "lower" => m.value <= reference,
        _ => false,
    });

    let bezout: u64 = args.common.degrees.iter().map(|&x| x as u64).product();
    let report = Report {
        schema: SCHEMA,
        method: "crosscheck",
        inputs: Inputs {
            ideal: Some(ideal_echo(&ideal)),
            powers,
            degrees: args.common.degrees.clone(),
            monomials: args.monomials.clone().map(|m| vec![m]),
            tolerances: tolerances(&cfg),
        },
        excess: reference,
        equivalence: bezout - reference,
        bezout,
        bound_kind: "exact",
        start_count: None,
        upper_bound: None,
        solutions: None,
        path_stats: None,
        gamma_history: None,
        iterations: None,
        methods: Some(methods),
        agree: Some(agree),
        seed,
    };
    Ok(((report, args.common.out.clone()), agree))
}
