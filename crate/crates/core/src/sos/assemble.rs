use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{CertBlock, Certificate, DomainPoly, GramBasisSpec};
use crate::error::{Error, Result};
use crate::rational::rat_to_f64;
use crate::sdp::{hermitian_unembed, solve, LinearFunctional, SdpConstraint, SdpProblem, SdpStatus, SolveOptions};
use crate::trigpoly::{DegreeTuple, TrigPoly};

/// Placement of one Gram block of an SOS program. SDP block `j` is the real
/// embedding (size `2·basis.len()`) of the Gram matrix described by
/// `layout[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramBlockSpec {
    pub poly: usize,
    pub multiplier: Option<usize>,
    pub basis: GramBasisSpec,
}

/// `maximize ε` s.t. `F_k − ε = H_{k,0} + Σ_i D_i·H_{k,i}` coefficientwise
/// for every k. Free variable 0 is `ε`.
#[derive(Clone, Debug)]
pub struct SosProgram {
    pub problem: SdpProblem,
    pub layout: Vec<GramBlockSpec>,
    pub polys: Vec<TrigPoly>,
    pub domains: Vec<DomainPoly>,
}

#[derive(Default)]
struct Row {
    re: LinearFunctional,
    im: LinearFunctional,
}

fn check_slack(dim: usize, slack: &[u32]) -> Result<()> {
    if slack.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: slack.len(),
        });
    }
    Ok(())
}

/// Global positivity on `T^L`: one Gram block of degree `n_F + slack`.
pub fn assemble_global_sdp(f: &TrigPoly, slack: &[u32]) -> Result<SosProgram> {
    f.check_hermitian()?;
    check_slack(f.dim(), slack)?;
    let nhat: Vec<u32> = f.degree().iter().zip(slack).map(|(n, e)| n + e).collect();
    let layout = vec![GramBlockSpec {
        poly: 0,
        multiplier: None,
        basis: GramBasisSpec::new(nhat),
    }];
    build(vec![f.clone()], Vec::new(), layout)
}

/// Positivity on `T^l × 𝕊`: per polynomial a free Gram block and one
/// multiplier block per domain polynomial, all sharing one `ε`.
pub fn assemble_domain_sdp(fs: &[TrigPoly], domains: &[DomainPoly], slack: &[u32]) -> Result<SosProgram> {
    let Some(first) = fs.first() else {
        return Err(Error::InvalidArgument("no polynomials to certify".into()));
    };
    if domains.is_empty() {
        return Err(Error::InvalidArgument("domain description is empty".into()));
    }
    let dim = first.dim();
    check_slack(dim, slack)?;
    for f in fs {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: f.dim(),
            });
        }
        f.check_hermitian()?;
    }
    for d in domains {
        if d.poly.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: d.poly.dim(),
            });
        }
    }
    let mut layout = Vec::new();
    for (k, f) in fs.iter().enumerate() {
        let mut top = f.degree();
        for d in domains {
            for (t, n) in top.iter_mut().zip(d.degree()) {
                *t = (*t).max(n);
            }
        }
        let g0: Vec<u32> = top.iter().zip(slack).map(|(t, e)| 2 * (t.div_ceil(2) + e)).collect();
        layout.push(GramBlockSpec {
            poly: k,
            multiplier: None,
            basis: GramBasisSpec::new(g0.clone()),
        });
        for (i, d) in domains.iter().enumerate() {
            let gi: Vec<i64> = g0.iter().zip(d.degree()).map(|(&a, b)| a as i64 - b as i64).collect();
            if gi.iter().any(|&x| x < 0) {
                return Err(Error::InfeasibleDegreeLedger {
                    multiplier: i,
                    degree: gi,
                });
            }
            layout.push(GramBlockSpec {
                poly: k,
                multiplier: Some(i),
                basis: GramBasisSpec::new(gi.iter().map(|&x| x as u32).collect()),
            });
        }
    }
    build(fs.to_vec(), domains.to_vec(), layout)
}

/// Add `w·G_ab` (real and imaginary parts) to a row, with `G` realized from
/// the block's real embedding `Y` of size `2n`.
fn push_gram_term(row: &mut Row, block: usize, n: usize, a: usize, b: usize, w: Complex64) {
    // Re G_ab = (Y[a][b] + Y[a+n][b+n])/2, Im G_ab = (Y[a+n][b] − Y[a][b+n])/2
    let re_g = [(a, b, 0.5), (a + n, b + n, 0.5)];
    let im_g = [(a + n, b, 0.5), (a, b + n, -0.5)];
    for &(r, c, s) in &re_g {
        if w.re != 0.0 {
            row.re.add_entry(block, r, c, w.re * s);
        }
        if w.im != 0.0 {
            row.im.add_entry(block, r, c, w.im * s);
        }
    }
    for &(r, c, s) in &im_g {
        if w.im != 0.0 {
            row.re.add_entry(block, r, c, -w.im * s);
        }
        if w.re != 0.0 {
            row.im.add_entry(block, r, c, w.re * s);
        }
    }
}

fn build(polys: Vec<TrigPoly>, domains: Vec<DomainPoly>, layout: Vec<GramBlockSpec>) -> Result<SosProgram> {
    let dim = polys[0].dim();
    let mut rows: Vec<BTreeMap<DegreeTuple, Row>> = (0..polys.len()).map(|_| BTreeMap::new()).collect();
    let keep = |d: &DegreeTuple| d.is_zero() || d.is_upper_half();

    for (j, spec) in layout.iter().enumerate() {
        let n = spec.basis.len();
        let ex = spec.basis.all_exponents();
        let shifts: Vec<(DegreeTuple, Complex64)> = match spec.multiplier {
            None => vec![(DegreeTuple::zero(dim), Complex64::new(1.0, 0.0))],
            Some(i) => domains[i].poly.terms().map(|(d, c)| (d.clone(), c.to_c64())).collect(),
        };
        let table = &mut rows[spec.poly];
        for a in 0..n {
            for b in 0..n {
                let e = DegreeTuple(ex[b].iter().zip(&ex[a]).map(|(x, y)| x - y).collect());
                for (s, w) in &shifts {
                    let d = e.add(s);
                    if keep(&d) {
                        push_gram_term(table.entry(d).or_default(), j, n, a, b, *w);
                    }
                }
            }
        }
    }

    let mut constraints = Vec::new();
    for (k, f) in polys.iter().enumerate() {
        let table = &mut rows[k];
        for (d, _) in f.terms() {
            if keep(d) {
                table.entry(d.clone()).or_default();
            }
        }
        for (d, row) in std::mem::take(table) {
            let c = f.coeff(&d);
            let (re_rhs, im_rhs) = (rat_to_f64(&c.re), rat_to_f64(&c.im));
            let mut re = row.re;
            if d.is_zero() {
                re.add_free(0, 1.0);
            }
            if !re.is_empty() || re_rhs != 0.0 {
                constraints.push(SdpConstraint { functional: re, rhs: re_rhs });
            }
            if !d.is_zero() && (!row.im.is_empty() || im_rhs != 0.0) {
                constraints.push(SdpConstraint {
                    functional: row.im,
                    rhs: im_rhs,
                });
            }
        }
    }

    let mut objective = LinearFunctional::default();
    objective.add_free(0, 1.0);
    let problem = SdpProblem {
        blocks: layout.iter().map(|s| 2 * s.basis.len()).collect(),
        free_vars: 1,
        constraints,
        objective,
    };
    Ok(SosProgram {
        problem,
        layout,
        polys,
        domains,
    })
}

#[derive(Clone, Debug)]
pub struct SosOutcome {
    pub status: SdpStatus,
    /// `ε` as returned by the solver, before polishing.
    pub solver_epsilon: f64,
    pub iterations: usize,
    /// Polished certificate, present when the solver reached optimality.
    /// Its `residual`/`min_eig` are placeholders until verified.
    pub certificate: Option<Certificate>,
}

/// Solve the program and turn the optimal point into a certificate.
///
/// Polishing: each constant-coefficient equation is made to hold in double
/// precision by lowering `ε` to `min_k (f_k(0) − c_k)` (with `c_k` the
/// reconstructed constant term) and absorbing the leftover of every other
/// `k` into its free block as a multiple of the identity, which keeps it PSD.
pub fn solve_sos(prog: &SosProgram, opts: &SolveOptions) -> Result<SosOutcome> {
    let sol = solve(&prog.problem, opts)?;
    let eps_solver = sol.free.first().copied().unwrap_or(f64::NAN);
    if sol.status != SdpStatus::Optimal {
        return Ok(SosOutcome {
            status: sol.status,
            solver_epsilon: eps_solver,
            iterations: sol.iterations,
            certificate: None,
        });
    }
    let mut grams: Vec<DMatrix<Complex64>> = sol
        .blocks
        .iter()
        .map(|y| {
            let g = hermitian_unembed(y);
            (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
        })
        .collect();

    let dim = prog.polys[0].dim();
    let mut constant = vec![0.0; prog.polys.len()];
    for (spec, g) in prog.layout.iter().zip(&grams) {
        constant[spec.poly] += match spec.multiplier {
            None => g.trace().re,
            Some(i) => {
                let ex = spec.basis.all_exponents();
                let mut acc = Complex64::new(0.0, 0.0);
                for (s, w) in prog.domains[i].poly.terms() {
                    // H(−s)·D(s)
                    for a in 0..ex.len() {
                        for b in 0..ex.len() {
                            if (0..dim).all(|v| ex[b][v] - ex[a][v] == -s.0[v]) {
                                acc += w.to_c64() * g[(a, b)];
                            }
                        }
                    }
                }
                acc.re
            }
        };
    }
    let slack: Vec<f64> = prog
        .polys
        .iter()
        .zip(&constant)
        .map(|(f, c)| rat_to_f64(&f.constant_term().re) - c)
        .collect();
    let epsilon = slack.iter().copied().fold(f64::INFINITY, f64::min);
    for (spec, g) in prog.layout.iter().zip(grams.iter_mut()) {
        if spec.multiplier.is_none() {
            let extra = (slack[spec.poly] - epsilon) / spec.basis.len() as f64;
            for a in 0..g.nrows() {
                g[(a, a)] += extra;
            }
        }
    }
    let blocks = prog
        .layout
        .iter()
        .zip(grams)
        .map(|(spec, gram)| CertBlock {
            poly: spec.poly,
            multiplier: spec.multiplier,
            basis: spec.basis.clone(),
            gram,
        })
        .collect();
    Ok(SosOutcome {
        status: sol.status,
        solver_epsilon: eps_solver,
        iterations: sol.iterations,
        certificate: Some(Certificate {
            epsilon,
            blocks,
            residual: f64::NAN,
            min_eig: f64::NAN,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Cq;
    use crate::sos::{verify_certificate, VerifyTolerances};

    fn cos1(dim: usize, var: usize, k: i64) -> TrigPoly {
        // k·(z + z⁻¹)
        let mut p = TrigPoly::zero(dim);
        let mut d = vec![0; dim];
        d[var] = 1;
        p.add_term(DegreeTuple(d.clone()), &Cq::from_int(k));
        d[var] = -1;
        p.add_term(DegreeTuple(d), &Cq::from_int(k));
        p
    }

    fn run(prog: &SosProgram) -> (f64, bool) {
        let out = solve_sos(prog, &SolveOptions::default()).unwrap();
        assert_eq!(out.status, SdpStatus::Optimal);
        let cert = out.certificate.unwrap();
        let rep = verify_certificate(&cert, &prog.polys, &prog.domains, &VerifyTolerances::default()).unwrap();
        (cert.epsilon, rep.valid)
    }

    #[test]
    fn constant_polynomial() {
        let f = TrigPoly::constant(2, Cq::ratio(7, 2));
        let prog = assemble_global_sdp(&f, &[0, 0]).unwrap();
        let (eps, ok) = run(&prog);
        assert!((eps - 3.5).abs() < 1e-6);
        assert!(ok);
    }

    #[test]
    fn cosine_minimum_on_torus() {
        let prog = assemble_global_sdp(&cos1(1, 0, 1), &[0]).unwrap();
        let (eps, ok) = run(&prog);
        assert!((eps + 2.0).abs() < 1e-5, "{eps}");
        assert!(ok);
    }

    #[test]
    fn cosine_minimum_on_cube_roots_is_a_supremum() {
        // min over the cube roots is −1, but no certificate attains it: at a
        // root D has a double zero while F + 1 has a simple one. Iterates
        // approach −1 from below.
        let d = DomainPoly::new(1, 0, 3);
        let prog = assemble_domain_sdp(&[cos1(1, 0, 1)], &[d], &[0]).unwrap();
        let s = solve(&prog.problem, &SolveOptions { max_iter: 20_000, ..Default::default() }).unwrap();
        assert_eq!(s.status, SdpStatus::MaxIter);
        assert!((s.free[0] + 1.0).abs() < 2e-2, "{}", s.free[0]);
    }

    #[test]
    fn constant_with_domain() {
        let d = DomainPoly::new(2, 1, 3);
        let f = TrigPoly::constant(2, Cq::from_int(4));
        let prog = assemble_domain_sdp(&[f], &[d], &[0, 0]).unwrap();
        let (eps, ok) = run(&prog);
        assert!((eps - 4.0).abs() < 1e-6);
        assert!(ok);
    }

    #[test]
    fn shared_epsilon_is_the_smallest() {
        let d = DomainPoly::new(1, 0, 2);
        let f1 = TrigPoly::constant(1, Cq::from_int(5));
        let f2 = TrigPoly::constant(1, Cq::from_int(3)).try_add(&cos1(1, 0, 1)).unwrap();
        // On {±1}: f1 = 5, f2 ∈ {1, 5}.
        let prog = assemble_domain_sdp(&[f1, f2], &[d], &[0]).unwrap();
        let (eps, ok) = run(&prog);
        assert!((eps - 1.0).abs() < 1e-5, "{eps}");
        assert!(ok);
    }

    #[test]
    fn ledger_layout() {
        let d = DomainPoly::new(2, 1, 3);
        let f = cos1(2, 0, 1).try_mul(&cos1(2, 1, 1)).unwrap();
        let prog = assemble_domain_sdp(&[f], &[d], &[0, 0]).unwrap();
        assert_eq!(prog.layout[0].basis.nhat, vec![2, 4]);
        assert_eq!(prog.layout[1].basis.nhat, vec![2, 1]);
        assert_eq!(prog.problem.blocks, vec![30, 12]);
    }

    #[test]
    fn ledger_never_goes_negative() {
        // 2·⌈max/2⌉ ≥ n_D, so every multiplier degree is nonnegative.
        let f = TrigPoly::constant(1, Cq::from_int(1));
        for n in 1..8 {
            let prog = assemble_domain_sdp(std::slice::from_ref(&f), &[DomainPoly::new(1, 0, n)], &[0]).unwrap();
            assert_eq!(prog.layout[0].basis.nhat[0], 2 * n.div_ceil(2));
            assert_eq!(prog.layout[1].basis.nhat[0], 2 * n.div_ceil(2) - n);
        }
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut p = TrigPoly::zero(1);
        p.add_term(DegreeTuple(vec![1]), &Cq::from_int(1));
        assert!(matches!(assemble_global_sdp(&p, &[0]), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn slack_dimension_checked() {
        let f = TrigPoly::constant(2, Cq::from_int(1));
        assert!(assemble_global_sdp(&f, &[0]).is_err());
    }
}
