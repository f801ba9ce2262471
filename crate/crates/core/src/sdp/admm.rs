//! Douglas–Rachford / ADMM splitting between the affine constraint set and
//! the product of PSD cones (free variables live in an unconstrained cone).
//!
//! Each iteration projects onto `{x : A x = b}` through a precomputed
//! pseudo-inverse of `A Aᵀ`, then clips eigenvalues block by block. Dual
//! iterates are recovered from the scaled multiplier `u`.

use nalgebra::{DMatrix, DVector};

use super::{LinearFunctional, SdpProblem, SdpSolution, SdpStatus, SolveOptions};
use crate::error::Result;

const ALPHA: f64 = 1.6;
const CHECK_EVERY: usize = 10;
const ADAPT_EVERY: usize = 50;
const INFEAS_START: usize = 2000;
const INFEAS_TOL: f64 = 1e-4;
const INFEAS_PERSIST: usize = 5;

struct Layout {
    offsets: Vec<usize>,
    dims: Vec<usize>,
    free_offset: usize,
    n: usize,
}

impl Layout {
    fn new(p: &SdpProblem) -> Self {
        let mut offsets = Vec::with_capacity(p.blocks.len());
        let mut off = 0;
        for &d in &p.blocks {
            offsets.push(off);
            off += d * (d + 1) / 2;
        }
        Layout {
            offsets,
            dims: p.blocks.clone(),
            free_offset: off,
            n: off + p.free_vars,
        }
    }

    fn index(&self, block: usize, row: usize, col: usize) -> usize {
        self.offsets[block] + col * (col + 1) / 2 + row
    }

    /// Dense vector of a functional in scaled-svec coordinates.
    fn functional_terms(&self, f: &LinearFunctional) -> Vec<(usize, f64)> {
        let mut out = Vec::with_capacity(f.entries.len() + f.free.len());
        for e in &f.entries {
            let w = if e.row == e.col {
                e.coef
            } else {
                e.coef / std::f64::consts::SQRT_2
            };
            out.push((self.index(e.block, e.row, e.col), w));
        }
        for &(k, c) in &f.free {
            out.push((self.free_offset + k, c));
        }
        out
    }

    fn unpack_block(&self, v: &[f64], b: usize) -> DMatrix<f64> {
        let d = self.dims[b];
        let mut m = DMatrix::zeros(d, d);
        for c in 0..d {
            for r in 0..=c {
                let x = v[self.index(b, r, c)];
                if r == c {
                    m[(r, c)] = x;
                } else {
                    let y = x / std::f64::consts::SQRT_2;
                    m[(r, c)] = y;
                    m[(c, r)] = y;
                }
            }
        }
        m
    }

    fn pack_block(&self, m: &DMatrix<f64>, v: &mut [f64], b: usize) {
        let d = self.dims[b];
        for c in 0..d {
            for r in 0..=c {
                v[self.index(b, r, c)] = if r == c {
                    m[(r, c)]
                } else {
                    0.5 * (m[(r, c)] + m[(c, r)]) * std::f64::consts::SQRT_2
                };
            }
        }
    }

    /// Euclidean projection onto the cone; returns the smallest eigenvalue
    /// seen before clipping.
    fn project_cone(&self, v: &mut [f64]) -> f64 {
        let mut min_eig = f64::INFINITY;
        for b in 0..self.dims.len() {
            let d = self.dims[b];
            if d == 0 {
                continue;
            }
            if d == 1 {
                let i = self.offsets[b];
                min_eig = min_eig.min(v[i]);
                v[i] = v[i].max(0.0);
                continue;
            }
            let m = self.unpack_block(v, b);
            let eig = m.symmetric_eigen();
            let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            min_eig = min_eig.min(lo);
            if lo >= 0.0 {
                continue;
            }
            let clipped = eig.eigenvalues.map(|l| l.max(0.0));
            let q = &eig.eigenvectors;
            let r = q * DMatrix::from_diagonal(&clipped) * q.transpose();
            self.pack_block(&r, v, b);
        }
        min_eig
    }

    /// Smallest eigenvalue of every block (no projection).
    fn cone_violation(&self, v: &[f64]) -> f64 {
        let mut w = v.to_vec();
        let lo = self.project_cone(&mut w);
        lo.min(0.0)
    }
}

struct Sparse {
    rows: Vec<Vec<(usize, f64)>>,
    n: usize,
}

impl Sparse {
    fn mul(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(j, a)| a * x[j]).sum())
            .collect()
    }

    fn tmul(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (r, &yi) in self.rows.iter().zip(y) {
            if yi != 0.0 {
                for &(j, a) in r {
                    out[j] += a * yi;
                }
            }
        }
        out
    }

    fn gram_pinv(&self) -> DMatrix<f64> {
        let m = self.rows.len();
        let mut dense_cols: Vec<std::collections::BTreeMap<usize, f64>> = Vec::with_capacity(m);
        for r in &self.rows {
            let mut h = std::collections::BTreeMap::new();
            for &(j, a) in r {
                *h.entry(j).or_insert(0.0) += a;
            }
            dense_cols.push(h);
        }
        let mut g = DMatrix::zeros(m, m);
        for i in 0..m {
            for k in i..m {
                let (small, large) = if dense_cols[i].len() <= dense_cols[k].len() {
                    (&dense_cols[i], &dense_cols[k])
                } else {
                    (&dense_cols[k], &dense_cols[i])
                };
                let s: f64 = small
                    .iter()
                    .filter_map(|(j, a)| large.get(j).map(|b| a * b))
                    .sum();
                g[(i, k)] = s;
                g[(k, i)] = s;
            }
        }
        if m == 0 {
            return g;
        }
        let eig = g.symmetric_eigen();
        let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let cut = top * 1e-12 * m as f64;
        let inv = eig
            .eigenvalues
            .map(|l| if l > cut && l > 0.0 { 1.0 / l } else { 0.0 });
        let q = &eig.eigenvectors;
        q * DMatrix::from_diagonal(&inv) * q.transpose()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

/// Solve `p` to the tolerances in `opts`. Non-convergence is reported via
/// [`SdpStatus::MaxIter`], never as an error.
pub fn solve(p: &SdpProblem, opts: &SolveOptions) -> Result<SdpSolution> {
    p.validate()?;
    let lay = Layout::new(p);
    let n = lay.n;
    let a = Sparse {
        rows: p
            .constraints
            .iter()
            .map(|c| lay.functional_terms(&c.functional))
            .collect(),
        n,
    };
    let b_raw: Vec<f64> = p.constraints.iter().map(|c| c.rhs).collect();
    let mut c_raw = vec![0.0; n];
    for (j, w) in lay.functional_terms(&p.objective) {
        c_raw[j] += w;
    }

    // Scale data to unit size; undone on output.
    let sb = b_raw.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let sc = c_raw.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let sc = if sc > 0.0 { sc } else { 1.0 };
    let b: Vec<f64> = b_raw.iter().map(|x| x / sb).collect();
    let c: Vec<f64> = c_raw.iter().map(|x| x / sc).collect();

    let minv = a.gram_pinv();
    let project_affine = |v: &[f64]| -> Vec<f64> {
        if a.rows.is_empty() {
            return v.to_vec();
        }
        let r: Vec<f64> = a.mul(v).iter().zip(&b).map(|(x, y)| x - y).collect();
        let t = &minv * DVector::from_vec(r);
        let corr = a.tmul(t.as_slice());
        v.iter().zip(&corr).map(|(x, y)| x - y).collect()
    };
    let lsq_dual = |g: &[f64]| -> Vec<f64> {
        if a.rows.is_empty() {
            return Vec::new();
        }
        let t = &minv * DVector::from_vec(a.mul(g));
        t.as_slice().to_vec()
    };

    let finish = |status: SdpStatus, z: &[f64], it: usize, rp: f64, rd: f64, gap: f64| {
        let blocks: Vec<DMatrix<f64>> = (0..lay.dims.len())
            .map(|bk| lay.unpack_block(z, bk) * sb)
            .collect();
        let free: Vec<f64> = z[lay.free_offset..].iter().map(|x| x * sb).collect();
        let objective = p.objective.eval(&blocks, &free);
        SdpSolution {
            status,
            objective,
            blocks,
            free,
            iterations: it,
            primal_residual: rp * sb,
            dual_residual: rd * sc,
            gap: gap * sb * sc,
        }
    };

    // Empty affine set.
    let x0 = project_affine(&vec![0.0; n]);
    let infeas0 = norm(&a.mul(&x0).iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>());
    if infeas0 > 1e-7 * (1.0 + norm(&b)) {
        return Ok(finish(SdpStatus::Infeasible, &vec![0.0; n], 0, infeas0, 0.0, f64::NAN));
    }

    let mut z = vec![0.0; n];
    let mut u = vec![0.0; n];
    if opts.seed != 0 {
        let mut st = opts.seed;
        for zi in z.iter_mut() {
            *zi = 1e-3 * splitmix(&mut st);
        }
        lay.project_cone(&mut z);
    }
    let mut rho = 1.0;
    let mut x = vec![0.0; n];
    let mut xh = vec![0.0; n];
    let mut z_prev = vec![0.0; n];
    let (mut rp, mut rd, mut gap) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut primal_inf_hits = 0;
    let mut dual_inf_hits = 0;

    for it in 1..=opts.max_iter {
        let v: Vec<f64> = (0..n).map(|i| z[i] - u[i] + c[i] / rho).collect();
        x = project_affine(&v);
        for i in 0..n {
            xh[i] = ALPHA * x[i] + (1.0 - ALPHA) * z[i];
        }
        z_prev.copy_from_slice(&z);
        for i in 0..n {
            z[i] = xh[i] + u[i];
        }
        lay.project_cone(&mut z);
        for i in 0..n {
            u[i] += xh[i] - z[i];
        }

        if it % CHECK_EVERY != 0 && it != opts.max_iter {
            continue;
        }
        let diff: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a - b).collect();
        rp = norm(&diff);
        let s: Vec<f64> = u.iter().map(|ui| -rho * ui).collect();
        let g: Vec<f64> = c.iter().zip(&s).map(|(ci, si)| -ci - si).collect();
        let y = lsq_dual(&g);
        let aty = a.tmul(&y);
        let res_d: Vec<f64> = g.iter().zip(&aty).map(|(gi, ai)| gi - ai).collect();
        rd = norm(&res_d);
        let pobj = -dot(&c, &z);
        let dobj = dot(&b, &y);
        gap = (pobj - dobj).abs();

        let eps_p = opts.eps_abs + opts.eps_rel * norm(&x).max(norm(&z));
        let eps_d = opts.eps_abs + opts.eps_rel * norm(&c).max(norm(&s));
        let eps_g = opts.eps_abs + opts.eps_rel * pobj.abs().max(dobj.abs());
        if rp <= eps_p && rd <= eps_d && gap <= eps_g {
            return Ok(finish(SdpStatus::Optimal, &z, it, rp, rd, gap));
        }

        if it % ADAPT_EVERY == 0 {
            let np = rp / norm(&x).max(norm(&z)).max(1e-12);
            let nd = rd / norm(&c).max(norm(&s)).max(1e-12);
            if np > 0.0 && nd > 0.0 {
                let new_rho = (rho * (np / nd).sqrt()).clamp(1e-6, 1e6);
                if new_rho > 5.0 * rho || new_rho < 0.2 * rho {
                    let k = rho / new_rho;
                    u.iter_mut().for_each(|ui| *ui *= k);
                    rho = new_rho;
                }
            }
        }

        if it >= INFEAS_START && it % ADAPT_EVERY == 0 {
            // Primal infeasibility: the multiplier step converges to a
            // separating direction δs = -Aᵀδy ∈ K*, with bᵀδy > 0.
            let ds: Vec<f64> = xh.iter().zip(&z).map(|(a, b)| -rho * (a - b)).collect();
            let nds = norm(&ds);
            let mut hit = false;
            if nds > 1e-9 {
                let d: Vec<f64> = ds.iter().map(|v| v / nds).collect();
                let negd: Vec<f64> = d.iter().map(|v| -v).collect();
                let dy = lsq_dual(&negd);
                let r = norm(&d.iter().zip(a.tmul(&dy)).map(|(di, ai)| di + ai).collect::<Vec<_>>());
                let free_ok = d[lay.free_offset..].iter().all(|v| v.abs() <= INFEAS_TOL);
                if r <= INFEAS_TOL
                    && free_ok
                    && lay.cone_violation(&d) >= -INFEAS_TOL
                    && dot(&b, &dy) > INFEAS_TOL * norm(&dy).max(1e-12)
                {
                    hit = true;
                }
            }
            primal_inf_hits = if hit { primal_inf_hits + 1 } else { 0 };
            if primal_inf_hits >= INFEAS_PERSIST {
                return Ok(finish(SdpStatus::Infeasible, &z, it, rp, rd, gap));
            }

            // Unboundedness: δz is a recession direction of the feasible set
            // along which the objective grows.
            let dz: Vec<f64> = z.iter().zip(&z_prev).map(|(a, b)| a - b).collect();
            let ndz = norm(&dz);
            let mut hit = false;
            if ndz > 1e-9 {
                let d: Vec<f64> = dz.iter().map(|v| v / ndz).collect();
                if norm(&a.mul(&d)) <= INFEAS_TOL
                    && lay.cone_violation(&d) >= -INFEAS_TOL
                    && dot(&c, &d) > INFEAS_TOL
                {
                    hit = true;
                }
            }
            dual_inf_hits = if hit { dual_inf_hits + 1 } else { 0 };
            if dual_inf_hits >= INFEAS_PERSIST {
                return Ok(finish(SdpStatus::Unbounded, &z, it, rp, rd, gap));
            }
        }
    }
    Ok(finish(SdpStatus::MaxIter, &z, opts.max_iter, rp, rd, gap))
}
