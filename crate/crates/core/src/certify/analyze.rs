use num_complex::Complex64;
use serde::Serialize;

use super::polys::{build_f_thm1, build_k, build_phi, char_poly_k};
use super::routh::{routh_table, RouthTable};
use crate::error::{Error, Result};
use crate::model::{grid_point, SisModel};
use crate::oracle::{freq_sample_abscissa, hurwitz_lyapunov, spectral_abscissa};
use crate::sdp::{SdpStatus, SolveOptions};
use crate::sos::{
    assemble_domain_sdp, assemble_global_sdp, build_domain_polys, finite_grid_positivity, solve_sos, verify_certificate,
    Certificate, DomainPoly, SosProgram, VerificationReport, VerifyTolerances,
};
use crate::trigpoly::TrigPoly;

/// Abscissa a sampled point must exceed to count as an instability witness.
const WITNESS_MARGIN: f64 = 1e-7;
/// Relative (to the coefficient ℓ¹ norm) negativity of a sampled `F_k`
/// value that counts as a witness; far above evaluation rounding.
const NEGATIVE_SAMPLE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictStatus {
    Stable,
    NotStable,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Theorem {
    /// All directions infinite.
    Global,
    /// At least one periodic direction.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Witness {
    /// `A(1)` is not Hurwitz.
    NotHurwitzAtOne { abscissa: f64 },
    /// Leading entry of this Routh row vanishes identically.
    DegenerateRouthTable { row: usize },
    /// Rows of the cleared Routh table that are nonpositive constants.
    NonpositiveRouthRows { rows: Vec<usize> },
    /// A polynomial whose positivity is necessary is nonpositive at a point
    /// of the domain (finite grid, or a sampled point).
    GridPoint { poly: usize, value: f64, point: Vec<(f64, f64)> },
    /// `A(z)` has an eigenvalue with positive real part at a sampled point.
    SampledPoint { abscissa: f64, point: Vec<(f64, f64)> },
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub theorem: Theorem,
    pub reason: String,
    pub witness: Option<Witness>,
    /// Certified margin `ε` (or, for exhaustive checks, the minimum found).
    pub epsilon_star: Option<f64>,
    pub solver_status: Option<SdpStatus>,
    pub certificate: Option<Certificate>,
    pub report: Option<VerificationReport>,
    /// Polynomials whose positivity was checked, and the domain description.
    pub polys: Vec<TrigPoly>,
    pub domains: Vec<DomainPoly>,
    pub routh: Option<RouthTable>,
}

impl Verdict {
    fn new(status: VerdictStatus, theorem: Theorem, reason: impl Into<String>) -> Self {
        Verdict {
            status,
            theorem,
            reason: reason.into(),
            witness: None,
            epsilon_star: None,
            solver_status: None,
            certificate: None,
            report: None,
            polys: Vec::new(),
            domains: Vec::new(),
            routh: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub slack: Vec<u32>,
    pub solve: SolveOptions,
    pub verify: VerifyTolerances,
    /// Samples per infinite direction for the instability-witness search.
    pub witness_grid: usize,
}

impl AnalyzeOptions {
    pub fn with_slack(slack: Vec<u32>) -> Self {
        AnalyzeOptions {
            slack,
            solve: SolveOptions::default(),
            verify: VerifyTolerances::default(),
            witness_grid: 32,
        }
    }
}

fn pairs(z: &[Complex64]) -> Vec<(f64, f64)> {
    z.iter().map(|c| (c.re, c.im)).collect()
}

fn check_supported(m: &SisModel) -> Result<()> {
    if m.has_finite_directions() {
        return Err(Error::Unsupported(
            "finite-extent directions; supply the equivalent periodic system".into(),
        ));
    }
    Ok(())
}

fn slack_for(m: &SisModel, opts: &AnalyzeOptions) -> Result<Vec<u32>> {
    if opts.slack.is_empty() {
        return Ok(vec![0; m.dim()]);
    }
    if opts.slack.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: opts.slack.len(),
        });
    }
    Ok(opts.slack.clone())
}

/// Sample `A(z)` looking for a concrete instability witness.
fn witness_search(m: &SisModel, opts: &AnalyzeOptions) -> Result<Option<Witness>> {
    let grid = vec![opts.witness_grid.max(1); m.dim()];
    let r = freq_sample_abscissa(m, &grid)?;
    Ok((r.max_abscissa > WITNESS_MARGIN).then(|| Witness::SampledPoint {
        abscissa: r.max_abscissa,
        point: pairs(&r.argmax),
    }))
}

/// Smallest sampled value of the `F_k` over the domain: `witness_grid`
/// points on infinite circles, the exact roots on periodic ones.
fn sampled_minimum(m: &SisModel, polys: &[TrigPoly], opts: &AnalyzeOptions) -> (f64, usize, Vec<Complex64>) {
    let counts: Vec<usize> = m
        .directions()
        .iter()
        .map(|d| d.period().map_or(opts.witness_grid.max(1), |n| n as usize))
        .collect();
    let total: usize = counts.iter().product();
    let mut best = (f64::INFINITY, 0, Vec::new());
    for flat in 0..total {
        let z = grid_point(flat, &counts);
        for (k, f) in polys.iter().enumerate() {
            let v = f.eval_unchecked(&z).re / f.l1_norm().max(1.0);
            if v < best.0 {
                best = (v, k, z.clone());
            }
        }
    }
    best
}

/// Solve an SOS program and turn the outcome into a verdict. A clearly
/// negative sampled value settles non-stability without the solver, since
/// positivity of every `F_k` on the domain is also necessary.
fn settle_sos(m: &SisModel, prog: &SosProgram, theorem: Theorem, opts: &AnalyzeOptions) -> Result<Verdict> {
    let (rel, k, z) = sampled_minimum(m, &prog.polys, opts);
    if rel < -NEGATIVE_SAMPLE {
        let value = prog.polys[k].eval_unchecked(&z).re;
        let mut v = Verdict::new(
            VerdictStatus::NotStable,
            theorem,
            format!("F_{} = {value:.6e} < 0 at a sampled point of the domain", k + 1),
        );
        v.witness = Some(Witness::GridPoint {
            poly: k,
            value,
            point: pairs(&z),
        });
        v.polys = prog.polys.clone();
        v.domains = prog.domains.clone();
        return Ok(v);
    }
    let out = solve_sos(prog, &opts.solve)?;
    let mut v = Verdict::new(VerdictStatus::Indeterminate, theorem, "");
    v.polys = prog.polys.clone();
    v.domains = prog.domains.clone();
    v.solver_status = Some(out.status);
    let Some(mut cert) = out.certificate else {
        v.epsilon_star = out.solver_epsilon.is_finite().then_some(out.solver_epsilon);
        v.reason = format!(
            "SDP solver stopped with status {:?} after {} iterations; raise the degree slack or the iteration limit",
            out.status, out.iterations
        );
        return Ok(v);
    };
    let rep = verify_certificate(&cert, &prog.polys, &prog.domains, &opts.verify)?;
    cert.residual = rep.residual;
    cert.min_eig = rep.min_eig;
    v.epsilon_star = Some(cert.epsilon);
    if rep.valid && rep.lower_bound > 0.0 {
        v.status = VerdictStatus::Stable;
        v.reason = format!(
            "positivity certified: ε* = {:.6}, proven lower bound {:.6} (residual {:.2e}, min Gram eigenvalue {:.2e})",
            cert.epsilon, rep.lower_bound, rep.residual, rep.min_eig
        );
    } else if cert.epsilon <= 0.0 {
        match witness_search(m, opts)? {
            Some(w) => {
                v.status = VerdictStatus::NotStable;
                v.reason = format!("ε* = {:.6} ≤ 0 and A(z) is not Hurwitz at a sampled point", cert.epsilon);
                v.witness = Some(w);
            }
            None => {
                v.reason = format!(
                    "ε* = {:.6} ≤ 0 at this degree slack but no sampled instability; raise the slack",
                    cert.epsilon
                );
            }
        }
    } else {
        v.reason = format!(
            "certificate not conclusive: ε* = {:.6}, lower bound {:.3e}, residual {:.2e}, min Gram eigenvalue {:.2e}",
            cert.epsilon, rep.lower_bound, rep.residual, rep.min_eig
        );
    }
    v.certificate = Some(cert);
    v.report = Some(rep);
    Ok(v)
}

/// Test for models whose directions are all infinite.
pub fn theorem1_analyze(m: &SisModel, opts: &AnalyzeOptions) -> Result<Verdict> {
    check_supported(m)?;
    if !m.all_infinite() {
        return Err(Error::InvalidArgument("the global test needs every direction infinite".into()));
    }
    let slack = slack_for(m, opts)?;
    let a1 = m.eval_a_at_one()?;
    if !hurwitz_lyapunov(&a1) {
        let mut v = Verdict::new(VerdictStatus::NotStable, Theorem::Global, "A(1) is not Hurwitz");
        v.witness = Some(Witness::NotHurwitzAtOne {
            abscissa: spectral_abscissa(&a1, 1e-10),
        });
        return Ok(v);
    }
    let f = build_f_thm1(m)?;
    let prog = assemble_global_sdp(&f, &slack)?;
    settle_sos(m, &prog, Theorem::Global, opts)
}

/// Test for models with at least one periodic direction.
pub fn theorem2_analyze(m: &SisModel, opts: &AnalyzeOptions) -> Result<Verdict> {
    check_supported(m)?;
    if m.all_infinite() {
        return Err(Error::InvalidArgument("the mixed test needs a periodic direction".into()));
    }
    let slack = slack_for(m, opts)?;
    let k = build_k(m)?;
    let phi = build_phi(&char_poly_k(&k)?);
    let table = match routh_table(&phi) {
        Ok(t) => t,
        Err(Error::DegenerateRouthTable { row }) => {
            let mut v = Verdict::new(
                VerdictStatus::NotStable,
                Theorem::Mixed,
                format!("Routh table degenerates at row {row}: φ has roots on the imaginary axis"),
            );
            v.witness = Some(Witness::DegenerateRouthTable { row });
            return Ok(v);
        }
        Err(e) => return Err(e),
    };
    if !table.nonpositive_set.is_empty() {
        let mut v = Verdict::new(
            VerdictStatus::NotStable,
            Theorem::Mixed,
            format!("Routh rows {:?} are nonpositive constants", table.nonpositive_set),
        );
        v.witness = Some(Witness::NonpositiveRouthRows {
            rows: table.nonpositive_set.clone(),
        });
        v.routh = Some(table);
        return Ok(v);
    }
    if table.n_f() == 0 {
        let mut v = Verdict::new(
            VerdictStatus::Stable,
            Theorem::Mixed,
            "every cleared Routh leading entry is a positive constant",
        );
        v.routh = Some(table);
        return Ok(v);
    }
    let polys = table.nonconstant_polys.clone();
    if m.all_periodic() {
        let periods: Vec<u32> = m.directions().iter().filter_map(|d| d.period()).collect();
        let g = finite_grid_positivity(&polys, &periods)?;
        let mut v = if g.value > 0.0 {
            Verdict::new(
                VerdictStatus::Stable,
                Theorem::Mixed,
                format!("every F_k is positive on the {} grid points (min {:.6})", periods.iter().product::<u32>(), g.value),
            )
        } else {
            let mut v = Verdict::new(
                VerdictStatus::NotStable,
                Theorem::Mixed,
                format!("F_{} = {:.6e} ≤ 0 at a grid point", g.poly + 1, g.value),
            );
            v.witness = Some(Witness::GridPoint {
                poly: g.poly,
                value: g.value,
                point: pairs(&g.point),
            });
            v
        };
        v.epsilon_star = Some(g.value);
        v.polys = polys;
        v.routh = Some(table);
        return Ok(v);
    }
    let domains = build_domain_polys(m.directions());
    let prog = assemble_domain_sdp(&polys, &domains, &slack)?;
    let mut v = settle_sos(m, &prog, Theorem::Mixed, opts)?;
    v.routh = Some(table);
    Ok(v)
}

/// Dispatch on the direction kinds.
pub fn analyze(m: &SisModel, opts: &AnalyzeOptions) -> Result<Verdict> {
    check_supported(m)?;
    if m.all_infinite() {
        theorem1_analyze(m, opts)
    } else {
        theorem2_analyze(m, opts)
    }
}

/// The polynomials (and domain description) a certificate for `m` must
/// establish, rebuilt from the model alone.
pub fn certification_targets(m: &SisModel) -> Result<(Vec<TrigPoly>, Vec<DomainPoly>)> {
    check_supported(m)?;
    if m.all_infinite() {
        return Ok((vec![build_f_thm1(m)?], Vec::new()));
    }
    let phi = build_phi(&char_poly_k(&build_k(m)?)?);
    let table = routh_table(&phi)?;
    let domains = if m.all_periodic() {
        Vec::new()
    } else {
        build_domain_polys(m.directions())
    };
    Ok((table.nonconstant_polys, domains))
}
