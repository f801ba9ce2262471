use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use sistab_core::certify::{analyze, certification_targets, Theorem, Verdict};
use sistab_core::oracle::{
    describe_point, fit_decay_rate, freq_sample_abscissa, lift_finite_system, simulate, DEFAULT_DT, DEFAULT_SNAPSHOTS,
};
use sistab_core::sos::{verify_certificate, VerifyTolerances};
use sistab_core::{AnalyzeOptions, DirectionKind, SisModel, VerdictStatus};

use crate::certjson::CertificateFile;
use crate::modelfile::{model_hash, parse_model};

pub const EXIT_STABLE: i32 = 0;
pub const EXIT_NOT_STABLE: i32 = 1;
pub const EXIT_INDETERMINATE: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "sistab", version, about = "Stability certificates for spatially interconnected systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide stability and print the verdict.
    Analyze(AnalyzeArgs),
    /// Like analyze, and write the positivity certificate as JSON.
    Certify(CertifyArgs),
    /// Re-check a certificate file against a model, independently of any solver.
    Verify(VerifyArgs),
    /// Largest spectral abscissa of A(z) over a frequency grid.
    Sample(SampleArgs),
    /// Simulate the system lifted onto a finite grid of sites; writes CSV.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Degree slack per direction, e.g. `1,0` (default all zeros).
    #[arg(long, value_delimiter = ',')]
    pub slack: Vec<u32>,
    /// On an indeterminate result, raise every slack component by one and
    /// retry while the components stay ≤ this bound.
    #[arg(long, value_name = "MAX")]
    pub auto_slack: Option<u32>,
    #[arg(long, default_value_t = 200_000)]
    pub max_iter: usize,
    /// Relative coefficient residual accepted by verification.
    #[arg(long, default_value_t = 1e-6)]
    pub rtol: f64,
    /// Allowed negativity of the smallest Gram eigenvalue.
    #[arg(long, default_value_t = 1e-8)]
    pub ptol: f64,
    /// Samples per infinite direction for the instability-witness search.
    #[arg(long, default_value_t = 32)]
    pub witness_grid: usize,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    pub model: PathBuf,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    pub model: PathBuf,
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Certificate destination.
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub model: PathBuf,
    pub certificate: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub ptol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    pub model: PathBuf,
    /// Points per direction (periodic directions always use their N roots of unity).
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    pub model: PathBuf,
    /// Sites per direction (default: the period for periodic directions, 24 otherwise).
    #[arg(long, value_delimiter = ',')]
    pub sites: Vec<usize>,
    /// Initial value `k1,k2,…:state=value` with one-based site and state
    /// indices; `state` may be `*` for every state. Repeatable.
    #[arg(long = "init", value_name = "SPEC")]
    pub init: Vec<String>,
    /// Output times, in seconds.
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
    /// Trajectory CSV destination (stdout when omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

fn load(path: &Path) -> Result<SisModel> {
    parse_model(path).with_context(|| format!("loading model {}", path.display()))
}

fn status_code(s: VerdictStatus) -> i32 {
    match s {
        VerdictStatus::Stable => EXIT_STABLE,
        VerdictStatus::NotStable => EXIT_NOT_STABLE,
        VerdictStatus::Indeterminate => EXIT_INDETERMINATE,
    }
}

fn route(m: &SisModel, v: &Verdict) -> &'static str {
    match v.theorem {
        Theorem::Global => "all directions infinite: A(1) Hurwitz and det(-W(z)) > 0 on the torus",
        Theorem::Mixed if m.all_periodic() => "all directions periodic: Routh table, then exhaustive grid evaluation",
        Theorem::Mixed => "mixed directions: Routh table, then positivity on the circles x roots of unity",
    }
}

/// Run the analysis, escalating the slack on indeterminate results when asked.
fn run_analysis(m: &SisModel, s: &SolveArgs) -> Result<(Verdict, Vec<u32>)> {
    let mut slack = if s.slack.is_empty() { vec![0; m.dim()] } else { s.slack.clone() };
    if slack.len() != m.dim() {
        bail!("--slack has {} components but the model has {} directions", slack.len(), m.dim());
    }
    loop {
        let mut opts = AnalyzeOptions::with_slack(slack.clone());
        opts.solve.max_iter = s.max_iter;
        opts.verify = VerifyTolerances { rtol: s.rtol, ptol: s.ptol };
        opts.witness_grid = s.witness_grid;
        let v = analyze(m, &opts)?;
        let next: Vec<u32> = slack.iter().map(|e| e + 1).collect();
        match s.auto_slack {
            Some(max) if v.status == VerdictStatus::Indeterminate && next.iter().all(|&e| e <= max) => {
                eprintln!("indeterminate at slack {slack:?}; retrying with {next:?}");
                slack = next;
            }
            _ => return Ok((v, slack)),
        }
    }
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    model_hash: String,
    status: VerdictStatus,
    route: &'static str,
    reason: &'a str,
    slack: &'a [u32],
    epsilon_star: Option<f64>,
    lower_bound: Option<f64>,
    residual: Option<f64>,
    min_eig: Option<f64>,
    solver_status: Option<sistab_core::sdp::SdpStatus>,
    certified_polys: Vec<String>,
    witness: Option<&'a sistab_core::certify::Witness>,
}

fn report<'a>(m: &SisModel, v: &'a Verdict, slack: &'a [u32]) -> AnalyzeReport<'a> {
    AnalyzeReport {
        model_hash: model_hash(m),
        status: v.status,
        route: route(m, v),
        reason: &v.reason,
        slack,
        epsilon_star: v.epsilon_star,
        lower_bound: v.report.as_ref().map(|r| r.lower_bound),
        residual: v.report.as_ref().map(|r| r.residual),
        min_eig: v.report.as_ref().map(|r| r.min_eig),
        solver_status: v.solver_status,
        certified_polys: v.polys.iter().map(|p| p.to_string()).collect(),
        witness: v.witness.as_ref(),
    }
}

fn print_report(r: &AnalyzeReport, format: Format) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(r)?)?,
        Format::Text => {
            writeln!(out, "verdict: {:?}", r.status)?;
            writeln!(out, "route: {}", r.route)?;
            writeln!(out, "reason: {}", r.reason)?;
            writeln!(out, "slack: {:?}", r.slack)?;
            if let Some(e) = r.epsilon_star {
                writeln!(out, "epsilon*: {e:.6}")?;
            }
            if let (Some(lb), Some(res), Some(me)) = (r.lower_bound, r.residual, r.min_eig) {
                writeln!(out, "lower bound: {lb:.6}  residual: {res:.3e}  min Gram eigenvalue: {me:.3e}")?;
            }
            for (k, p) in r.certified_polys.iter().enumerate() {
                writeln!(out, "F_{}(z) = {p}", k + 1)?;
            }
            if let Some(w) = r.witness {
                writeln!(out, "witness: {}", serde_json::to_string(w)?)?;
            }
        }
    }
    Ok(())
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<i32> {
    let m = load(&a.model)?;
    let t0 = Instant::now();
    let (v, slack) = run_analysis(&m, &a.solve)?;
    eprintln!("analysis time: {:.3} s", t0.elapsed().as_secs_f64());
    print_report(&report(&m, &v, &slack), a.format)?;
    Ok(status_code(v.status))
}

fn cmd_certify(a: &CertifyArgs) -> Result<i32> {
    let m = load(&a.model)?;
    let t0 = Instant::now();
    let (v, slack) = run_analysis(&m, &a.solve)?;
    eprintln!("analysis time: {:.3} s", t0.elapsed().as_secs_f64());
    print_report(&report(&m, &v, &slack), a.format)?;
    match (&v.certificate, &v.report) {
        (Some(c), Some(r)) => {
            let file = CertificateFile::new(c, r, model_hash(&m));
            std::fs::write(&a.output, file.to_json())
                .with_context(|| format!("writing {}", a.output.display()))?;
            eprintln!("certificate written to {}", a.output.display());
        }
        _ => eprintln!("no SOS certificate for this verdict; nothing written"),
    }
    Ok(status_code(v.status))
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let m = load(&a.model)?;
    let text = std::fs::read_to_string(&a.certificate)
        .with_context(|| format!("reading {}", a.certificate.display()))?;
    let file = CertificateFile::from_json(&text)?;
    let hash = model_hash(&m);
    if file.model_hash != hash {
        bail!("certificate was issued for model {} but this model hashes to {hash}", file.model_hash);
    }
    let cert = file.to_certificate()?;
    let (polys, domains) = certification_targets(&m)?;
    let rep = verify_certificate(
        &cert,
        &polys,
        &domains,
        &VerifyTolerances { rtol: a.rtol, ptol: a.ptol },
    )?;
    let proves = rep.valid && rep.lower_bound > 0.0;
    let mut out = std::io::stdout().lock();
    match a.format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&json!({
                "model_hash": hash,
                "epsilon": cert.epsilon,
                "residual": rep.residual,
                "min_eig": rep.min_eig,
                "lower_bound": rep.lower_bound,
                "valid": rep.valid,
                "proves_stability": proves,
            }))?
        )?,
        Format::Text => {
            writeln!(out, "residual: {:.3e}", rep.residual)?;
            if let Some((k, d)) = &rep.worst {
                writeln!(out, "worst coefficient: F_{} at {:?}", k + 1, d.0)?;
            }
            writeln!(out, "min Gram eigenvalue: {:.3e}", rep.min_eig)?;
            writeln!(out, "epsilon: {:.6}  lower bound: {:.6}", cert.epsilon, rep.lower_bound)?;
            writeln!(out, "valid: {}", rep.valid)?;
        }
    }
    Ok(if proves { EXIT_STABLE } else { EXIT_NOT_STABLE })
}

fn cmd_sample(a: &SampleArgs) -> Result<i32> {
    let m = load(&a.model)?;
    let grid = if a.grid.is_empty() { vec![64; m.dim()] } else { a.grid.clone() };
    if grid.len() != m.dim() {
        bail!("--grid has {} components but the model has {} directions", grid.len(), m.dim());
    }
    let r = freq_sample_abscissa(&m, &grid)?;
    let mut out = std::io::stdout().lock();
    match a.format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&json!({
                "max_abscissa": r.max_abscissa,
                "argmax": r.argmax.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "counts": r.counts,
            }))?
        )?,
        Format::Text => {
            writeln!(out, "grid: {:?}", r.counts)?;
            writeln!(out, "max abscissa: {:.9}", r.max_abscissa)?;
            writeln!(out, "at z = {}", describe_point(&r.argmax))?;
        }
    }
    Ok(if r.max_abscissa < 0.0 { EXIT_STABLE } else { EXIT_NOT_STABLE })
}

/// `k1,k2,…:state=value`, `state` one-based or `*`.
fn parse_init(spec: &str, n0: usize) -> Result<Vec<(Vec<usize>, usize, f64)>> {
    let bad = || anyhow::anyhow!("--init '{spec}': expected k1,k2,...:state=value");
    let (site, rest) = spec.split_once(':').ok_or_else(bad)?;
    let (state, value) = rest.split_once('=').ok_or_else(bad)?;
    let site: Vec<usize> = site
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    let value: f64 = value.trim().parse().map_err(|_| bad())?;
    let states: Vec<usize> = match state.trim() {
        "*" => (1..=n0).collect(),
        s => vec![s.parse().map_err(|_| bad())?],
    };
    Ok(states.into_iter().map(|j| (site.clone(), j, value)).collect())
}

fn cmd_simulate(a: &SimulateArgs) -> Result<i32> {
    let m = load(&a.model)?;
    let sites = if a.sites.is_empty() {
        m.directions()
            .iter()
            .map(|d| match d.kind {
                DirectionKind::Periodic(n) => n as usize,
                _ => 24,
            })
            .collect()
    } else {
        a.sites.clone()
    };
    let ls = lift_finite_system(&m, &sites)?;
    let mut entries = Vec::new();
    for s in &a.init {
        entries.extend(parse_init(s, m.n0())?);
    }
    let x0 = ls.initial_state(&entries)?;
    let snaps = if a.snapshots.is_empty() { DEFAULT_SNAPSHOTS.to_vec() } else { a.snapshots.clone() };
    if snaps.iter().any(|t| !t.is_finite() || *t < 0.0) {
        bail!("snapshot times must be finite and nonnegative");
    }
    let t_end = snaps.iter().copied().fold(0.0, f64::max);
    let traj = simulate(&ls, &x0, t_end, a.dt, &snaps)?;

    let write_csv = |w: &mut dyn Write| -> Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        let mut header = vec!["time".to_string()];
        header.extend((1..=sites.len()).map(|i| format!("k{i}")));
        header.extend((1..=m.n0()).map(|j| format!("x{j}")));
        csv.write_record(&header)?;
        for (t, x) in traj.times.iter().zip(&traj.states) {
            for site in 0..ls.num_sites() {
                let mut rec = vec![t.to_string()];
                rec.extend(ls.site_coords(site).iter().map(|k| (k + 1).to_string()));
                rec.extend(x[site * m.n0()..(site + 1) * m.n0()].iter().map(|v| v.to_string()));
                csv.write_record(&rec)?;
            }
        }
        csv.flush()?;
        Ok(())
    };
    let beta = fit_decay_rate(&traj);
    match &a.output {
        Some(p) => {
            let mut f = std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            write_csv(&mut f)?;
        }
        None => write_csv(&mut std::io::stdout().lock())?,
    }
    // the summary goes to stdout only when the CSV does not
    let mut summary: Box<dyn Write> = if a.output.is_some() {
        Box::new(std::io::stdout().lock())
    } else {
        Box::new(std::io::stderr().lock())
    };
    match a.format {
        Format::Json => writeln!(
            summary,
            "{}",
            serde_json::to_string_pretty(&json!({
                "sites": sites,
                "times": traj.times,
                "norms": traj.norms,
                "decay_rate": beta,
            }))?
        )?,
        Format::Text => {
            writeln!(summary, "sites: {sites:?}")?;
            for (t, n) in traj.times.iter().zip(&traj.norms) {
                writeln!(summary, "t = {t:>8.3}  |x| = {n:.6e}")?;
            }
            match beta {
                Some(b) => writeln!(summary, "fitted decay rate: {b:.6}")?,
                None => writeln!(summary, "fitted decay rate: n/a")?,
            }
        }
    }
    Ok(EXIT_STABLE)
}
