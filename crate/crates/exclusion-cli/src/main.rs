//! Command-line front end: every analysis in the core crate exposed as a
//! subcommand with JSON/CSV output suitable for external plotting.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parameter error,
//! 3 capacity error.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use exclusion_core::evolution::{empirical_tv_from_histogram, endpoint_histogram, SimConfig};
use exclusion_core::generator::{build_lep_generator, build_uep_generator, Generator};
use exclusion_core::mixing::{
    lep_l2_curve_approx, sandwich_check, spectrum_l2_curve, standard_alpha, tau2, uep_l2_curve,
    verify_coefficient_lemma, L2Curve, MixingReport, DEFAULT_UPPER_FLOOR,
};
use exclusion_core::spectral::{
    brute_force_spectrum, default_cluster_tol, envelope, multiplicity_checks, symmetric_core,
    uep_spectrum_closed_form, verify_lift_lemmas, SpectrumSummary, SummaryKind,
};
use exclusion_core::state::{ProcessKind, ProcessParams};
use exclusion_core::Error;

#[derive(Parser)]
#[command(name = "exclusion", version, about = "Exclusion and interchange processes on complete graphs: spectra, envelopes, L2 curves, mixing times")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Uep,
    Lep,
}

impl From<KindArg> for ProcessKind {
    fn from(k: KindArg) -> ProcessKind {
        match k {
            KindArg::Uep => ProcessKind::Uep,
            KindArg::Lep => ProcessKind::Lep,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct ProcessArgs {
    /// Number of vertices.
    #[arg(long)]
    n: usize,
    /// Number of balls.
    #[arg(long)]
    ell: usize,
    /// Edge clock rate; defaults to 2/n^2.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "uep")]
    kind: KindArg,
}

impl ProcessArgs {
    fn alpha(&self) -> f64 {
        self.alpha.unwrap_or_else(|| standard_alpha(self.n.max(1)))
    }

    fn params(&self) -> Result<ProcessParams, Error> {
        ProcessParams::new(self.n, self.ell, self.alpha(), self.kind.into())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form or brute-force spectrum of -Q.
    Spectrum {
        #[command(flatten)]
        process: ProcessArgs,
        /// Use the dense eigensolver instead of the closed form.
        #[arg(long)]
        oracle: bool,
        /// Run both routes and report agreement.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Spectrum envelope E^n_ell from the Cayley recursion.
    Envelope {
        #[command(flatten)]
        process: ProcessArgs,
        /// Verify oracle containment (and the symmetric core at ell = n).
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// L2 distance-from-stationarity curve at the standard rate 2/n^2.
    L2 {
        #[command(flatten)]
        process: ProcessArgs,
        /// Offset grid start:stop:step; t = (1/4) n log(scale) + c n.
        #[arg(long, value_name = "START:STOP:STEP", conflicts_with = "t_grid")]
        c_grid: Option<String>,
        /// Time grid start:stop:step.
        #[arg(long, value_name = "START:STOP:STEP")]
        t_grid: Option<String>,
        /// Labelled process: use the first-band bound instead of an oracle
        /// spectrum (mandatory beyond oracle capacity).
        #[arg(long)]
        approx: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Locate the L2 mixing time tau2(epsilon).
    Mix {
        #[command(flatten)]
        process: ProcessArgs,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo endpoint histogram and empirical TV estimate.
    Simulate {
        #[command(flatten)]
        process: ProcessArgs,
        /// Time horizon.
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 10_000)]
        replicas: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rank of the common starting state.
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the small-n assertion battery.
    Verify {
        /// Largest n included in the exhaustive sweeps.
        #[arg(long, default_value_t = 5)]
        max_n: usize,
    },
    /// Dump the generator as a sparse coordinate listing.
    Dump {
        #[command(flatten)]
        process: ProcessArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            Error::Capacity(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn param_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Spectrum {
            process,
            oracle,
            verify,
            output,
        } => cmd_spectrum(process, oracle, verify, output),
        Command::Envelope {
            process,
            check,
            output,
        } => cmd_envelope(process, check, output),
        Command::L2 {
            process,
            c_grid,
            t_grid,
            approx,
            output,
        } => cmd_l2(process, c_grid, t_grid, approx, output),
        Command::Mix {
            process,
            epsilon,
            output,
        } => cmd_mix(process, epsilon, output),
        Command::Simulate {
            process,
            t,
            replicas,
            seed,
            start,
            output,
        } => cmd_simulate(process, t, replicas, seed, start, output),
        Command::Verify { max_n } => cmd_verify(max_n),
        Command::Dump { process, output } => cmd_dump(process, output),
    }
}

fn emit(output: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure {
            code: 2,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn kind_label(kind: SummaryKind) -> &'static str {
    match kind {
        SummaryKind::Uep => "UEP",
        SummaryKind::Lep => "LEP",
        SummaryKind::Cayley => "CAYLEY",
    }
}

fn process_label(kind: ProcessKind) -> &'static str {
    match kind {
        ProcessKind::Uep => "UEP",
        ProcessKind::Lep => "LEP",
    }
}

fn summary_json(s: &SpectrumSummary) -> Value {
    json!({
        "n": s.n,
        "ell": s.ell,
        "alpha": s.alpha,
        "kind": kind_label(s.kind),
        "pairs": s.pairs.iter().map(|p| json!({
            "value": p.value,
            "multiplicity": p.multiplicity,
        })).collect::<Vec<_>>(),
    })
}

fn summary_csv(s: &SpectrumSummary) -> String {
    let mut out = String::from("value,multiplicity\n");
    for p in &s.pairs {
        let _ = writeln!(out, "{},{}", p.value, p.multiplicity);
    }
    out
}

fn build_generator(p: ProcessParams) -> Result<Generator, Error> {
    match p.kind {
        ProcessKind::Uep => build_uep_generator(p),
        ProcessKind::Lep => build_lep_generator(p),
    }
}

fn oracle_spectrum(p: ProcessParams) -> Result<SpectrumSummary, Error> {
    let g = build_generator(p)?;
    brute_force_spectrum(&g, default_cluster_tol(p.alpha, p.n))
}

fn cmd_spectrum(
    process: ProcessArgs,
    oracle: bool,
    verify: bool,
    output: OutputArgs,
) -> Result<ExitCode, Failure> {
    let p = process.params()?;
    if verify {
        if p.kind != ProcessKind::Uep {
            return Err(param_error("--verify compares the closed form, which exists for --kind uep only"));
        }
        let closed = uep_spectrum_closed_form(p)?;
        let oracle_s = oracle_spectrum(p)?;
        let mut max_dev = f64::INFINITY;
        let mut mults_match = closed.pairs.len() == oracle_s.pairs.len();
        if mults_match {
            max_dev = 0.0f64;
            for (a, b) in closed.pairs.iter().zip(&oracle_s.pairs) {
                max_dev = max_dev.max((a.value - b.value).abs());
                mults_match &= a.multiplicity == b.multiplicity;
            }
        }
        let passed = mults_match && max_dev < 1e-8;
        let doc = json!({
            "closed_form": summary_json(&closed),
            "oracle": summary_json(&oracle_s),
            "max_dev": max_dev,
            "multiplicities_match": mults_match,
            "passed": passed,
        });
        emit(&output, &format!("{doc}\n"))?;
        return Ok(if passed {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        });
    }

    let s = if oracle || p.kind == ProcessKind::Lep {
        oracle_spectrum(p)?
    } else {
        uep_spectrum_closed_form(p)?
    };
    let text = match output.format {
        FormatArg::Json => format!("{}\n", summary_json(&s)),
        FormatArg::Csv => summary_csv(&s),
    };
    emit(&output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_envelope(
    process: ProcessArgs,
    check: bool,
    output: OutputArgs,
) -> Result<ExitCode, Failure> {
    let n = process.n;
    let ell = process.ell;
    let alpha = process.alpha();
    let e = envelope(n, ell, alpha)?;
    let tol = default_cluster_tol(alpha, n).max(1e-6);

    let mut doc = json!({
        "n": n,
        "ell": ell,
        "alpha": alpha,
        "values": e.values,
    });
    let mut passed = true;
    if check {
        let p = ProcessParams::new(n, ell, alpha, ProcessKind::Lep)?;
        let oracle_s = oracle_spectrum(p)?;
        let contained = oracle_s
            .pairs
            .iter()
            .all(|p| e.contains(p.value, tol));
        passed &= contained;
        doc["containment"] = json!(contained);
        if ell == n {
            let center = alpha * (n * (n - 1) / 2) as f64;
            let core = symmetric_core(&e, center);
            let core_contains = oracle_s
                .pairs
                .iter()
                .all(|p| core.contains(p.value, tol));
            passed &= core_contains;
            doc["symmetric_core"] = json!(core.values);
            doc["symmetric_core_contains"] = json!(core_contains);
        }
        doc["passed"] = json!(passed);
    }
    let text = match output.format {
        FormatArg::Json => format!("{doc}\n"),
        FormatArg::Csv => {
            let mut out = String::from("value\n");
            for v in &e.values {
                let _ = writeln!(out, "{v}");
            }
            out
        }
    };
    emit(&output, &text)?;
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Parses "start:stop:step", inclusive of both endpoints within half a step.
fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(param_error(format!(
            "grid must be start:stop:step, got {spec:?}"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| param_error(format!("bad grid number {p:?}")))
        })
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if step.is_nan() || step <= 0.0 || stop < start {
        return Err(param_error("grid needs stop >= start and step > 0"));
    }
    let mut grid = Vec::new();
    let mut k = 0u64;
    loop {
        let x = start + k as f64 * step;
        if x > stop + 0.5 * step {
            break;
        }
        grid.push(x);
        k += 1;
    }
    Ok(grid)
}

fn curve_csv(curve: &L2Curve) -> String {
    let mut out = String::from("t,c,l2,lower,upper\n");
    for s in &curve.samples {
        let _ = writeln!(out, "{},{},{},{},{}", s.t, s.c, s.l2, s.lower, s.upper);
    }
    out
}

fn curve_json(curve: &L2Curve) -> Value {
    json!({
        "n": curve.n,
        "ell": curve.ell,
        "kind": process_label(curve.kind),
        "approximate": curve.approximate,
        "samples": curve.samples.iter().map(|s| json!({
            "t": s.t, "c": s.c, "l2": s.l2, "lower": s.lower, "upper": s.upper,
        })).collect::<Vec<_>>(),
    })
}

fn cmd_l2(
    process: ProcessArgs,
    c_grid: Option<String>,
    t_grid: Option<String>,
    approx: bool,
    output: OutputArgs,
) -> Result<ExitCode, Failure> {
    let n = process.n;
    let ell = process.ell;
    let kind: ProcessKind = process.kind.into();
    if let Some(alpha) = process.alpha {
        if (alpha - standard_alpha(n.max(1))).abs() > 1e-15 * standard_alpha(n.max(1)) {
            return Err(param_error(
                "l2 curves are defined at the standard rate alpha = 2/n^2; omit --alpha",
            ));
        }
    }
    let c_values: Vec<f64> = match (&c_grid, &t_grid) {
        (Some(spec), None) => parse_grid(spec)?,
        (None, Some(spec)) => parse_grid(spec)?
            .into_iter()
            .map(|t| exclusion_core::mixing::offset_from_time(n, ell, kind, t))
            .collect(),
        (None, None) => return Err(param_error("one of --c-grid or --t-grid is required")),
        _ => unreachable!("clap enforces the conflict"),
    };

    let curve = match kind {
        ProcessKind::Uep => uep_l2_curve(n, ell, &c_values)?,
        ProcessKind::Lep if approx => lep_l2_curve_approx(n, ell, &c_values),
        ProcessKind::Lep => {
            let p = ProcessParams::new(n, ell, standard_alpha(n), ProcessKind::Lep)?;
            let s = oracle_spectrum(p)?;
            spectrum_l2_curve(&s, &c_values)?
        }
    };
    let text = match output.format {
        FormatArg::Json => format!("{}\n", curve_json(&curve)),
        FormatArg::Csv => curve_csv(&curve),
    };
    emit(&output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn mixing_report_json(r: &MixingReport) -> Value {
    json!({
        "n": r.n,
        "ell": r.ell,
        "kind": process_label(r.kind),
        "epsilon": r.epsilon,
        "tau2": r.tau2,
        "tol": r.solver_tol,
    })
}

fn cmd_mix(
    process: ProcessArgs,
    epsilon: f64,
    output: OutputArgs,
) -> Result<ExitCode, Failure> {
    let n = process.n;
    let ell = process.ell;
    let kind: ProcessKind = process.kind.into();
    let report = match kind {
        ProcessKind::Uep => tau2(n, ell, kind, epsilon, None)?,
        ProcessKind::Lep => {
            let p = ProcessParams::new(n, ell, standard_alpha(n), ProcessKind::Lep)?;
            let s = oracle_spectrum(p)?;
            tau2(n, ell, kind, epsilon, Some(&s))?
        }
    };
    let doc = mixing_report_json(&report);
    let text = match output.format {
        FormatArg::Json => format!("{doc}\n"),
        FormatArg::Csv => format!(
            "n,ell,kind,epsilon,tau2,tol\n{},{},{},{},{},{}\n",
            report.n,
            report.ell,
            process_label(report.kind),
            report.epsilon,
            report.tau2,
            report.solver_tol
        ),
    };
    emit(&output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(
    process: ProcessArgs,
    t: f64,
    replicas: u64,
    seed: u64,
    start: u64,
    output: OutputArgs,
) -> Result<ExitCode, Failure> {
    let p = process.params()?;
    let cfg = SimConfig::new(p, t, replicas, seed)?.with_start(start);
    let hist = endpoint_histogram(&cfg)?;
    match output.format {
        FormatArg::Csv => {
            let mut out = String::from("rank,count\n");
            for (rank, count) in hist.iter().enumerate() {
                let _ = writeln!(out, "{rank},{count}");
            }
            emit(&output, &out)?;
        }
        FormatArg::Json => {
            let est = empirical_tv_from_histogram(&hist, replicas, seed)?;
            let doc = json!({
                "n": p.n,
                "ell": p.ell,
                "alpha": p.alpha,
                "kind": process_label(p.kind),
                "t": t,
                "replicas": replicas,
                "seed": seed,
                "start": start,
                "tv_estimate": est.estimate,
                "tv_halfwidth": est.halfwidth,
                "tv_bias_bound": est.bias_bound,
            });
            emit(&output, &format!("{doc}\n"))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_dump(process: ProcessArgs, output: OutputArgs) -> Result<ExitCode, Failure> {
    let p = process.params()?;
    let g = build_generator(p)?;
    let mut out = format!("dim {}\n", g.dim);
    for (row, col, value) in g.triplets() {
        let _ = writeln!(out, "{row} {col} {value}");
    }
    emit(&output, &out)?;
    Ok(ExitCode::SUCCESS)
}

// ---- verification battery ----

struct CheckTable {
    rows: Vec<(String, bool)>,
}

impl CheckTable {
    fn new() -> Self {
        CheckTable { rows: Vec::new() }
    }

    fn record(&mut self, name: String, ok: bool) {
        println!("{} {}", if ok { "PASS" } else { "FAIL" }, name);
        self.rows.push((name, ok));
    }

    fn all_passed(&self) -> bool {
        self.rows.iter().all(|(_, ok)| *ok)
    }
}

fn cmd_verify(max_n: usize) -> Result<ExitCode, Failure> {
    if max_n < 2 {
        return Err(param_error("--max-n must be at least 2"));
    }
    if max_n > 6 {
        return Err(Failure {
            code: 3,
            message: "--max-n beyond 6 exceeds the labelled oracle budget".into(),
        });
    }
    let mut table = CheckTable::new();

    // closed form vs oracle, every unlabelled instance with 2l <= n
    for n in 2..=max_n {
        for ell in 0..=n / 2 {
            let p = ProcessParams::new(n, ell, 1.0, ProcessKind::Uep)?;
            let closed = uep_spectrum_closed_form(p)?;
            let oracle_s = oracle_spectrum(p)?;
            let ok = closed.pairs.len() == oracle_s.pairs.len()
                && closed.pairs.iter().zip(&oracle_s.pairs).all(|(a, b)| {
                    (a.value - b.value).abs() < 1e-8 && a.multiplicity == b.multiplicity
                });
            table.record(format!("closed-form n={n} ell={ell}"), ok);
        }
    }

    // envelope containment, band bounds and the symmetric core
    for n in 2..=max_n {
        for ell in 0..=n {
            let p = ProcessParams::new(n, ell, 1.0, ProcessKind::Lep)?;
            let oracle_s = oracle_spectrum(p)?;
            let e = envelope(n, ell, 1.0)?;
            let tol = 1e-6;
            let mut ok = oracle_s.pairs.iter().all(|q| e.contains(q.value, tol));
            if ell == n {
                let core = symmetric_core(&e, (n * (n - 1) / 2) as f64);
                ok &= oracle_s.pairs.iter().all(|q| core.contains(q.value, tol));
            }
            ok &= multiplicity_checks(&oracle_s, tol)?.passed;
            table.record(format!("envelope n={n} ell={ell}"), ok);
        }
    }

    // lift lemmas wherever level l+1 exists
    for n in 2..=max_n {
        for ell in 0..n {
            let report = verify_lift_lemmas(n, ell, 1.0, 1e-9)?;
            table.record(format!("lifts n={n} ell={ell}"), report.passed);
        }
    }

    // start-state symmetry of squared coefficients
    for n in 2..=max_n {
        for ell in 0..=n {
            if 2 * ell <= n {
                let g = build_uep_generator(ProcessParams::new(n, ell, 1.0, ProcessKind::Uep)?)?;
                let r = verify_coefficient_lemma(&g, 1e-9)?;
                table.record(
                    format!("coefficients uep n={n} ell={ell}"),
                    r.max_deviation < 1e-9,
                );
            }
            if ell >= 1 {
                let g = build_lep_generator(ProcessParams::new(n, ell, 1.0, ProcessKind::Lep)?)?;
                let r = verify_coefficient_lemma(&g, 1e-9)?;
                table.record(
                    format!("coefficients lep n={n} ell={ell}"),
                    r.max_deviation < 1e-9,
                );
            }
        }
    }

    // sandwich lower bound at formula scale
    let c_grid = [0.0, 0.5, 1.0, 2.0];
    for &(n, ell) in &[(10_000usize, 5_000usize), (10_000, 100)] {
        let r = sandwich_check(n, ell, ProcessKind::Uep, &c_grid, DEFAULT_UPPER_FLOOR)?;
        table.record(format!("sandwich uep n={n} ell={ell}"), r.passed);
    }
    for &(n, ell) in &[(10_000usize, 10usize), (10_000, 100), (10_000, 4_500)] {
        let r = sandwich_check(n, ell, ProcessKind::Lep, &c_grid, DEFAULT_UPPER_FLOOR)?;
        table.record(format!("sandwich lep n={n} ell={ell}"), r.passed);
    }

    let passed = table.all_passed();
    println!(
        "{}: {} checks",
        if passed { "ALL PASS" } else { "FAILURES" },
        table.rows.len()
    );
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
