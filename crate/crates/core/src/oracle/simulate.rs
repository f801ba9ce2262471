use super::lift::LiftedSystem;
use crate::error::{Error, Result};

/// Default snapshot times for a decay plot.
pub const DEFAULT_SNAPSHOTS: [f64; 4] = [0.0, 3.0, 5.0, 20.0];
pub const DEFAULT_DT: f64 = 1e-3;
const BLOWUP: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Fixed-step RK4 integration of `ẋ = A_big x` from `x0`, recording the
/// state at every time in `sample_times` (each rounded to the step grid).
pub fn simulate(ls: &LiftedSystem, x0: &[f64], t_end: f64, dt: f64, sample_times: &[f64]) -> Result<Trajectory> {
    let n = ls.state_len();
    if x0.len() != n {
        return Err(Error::ShapeMismatch {
            what: "initial state".into(),
            expected: n.to_string(),
            found: x0.len().to_string(),
        });
    }
    if !(dt.is_finite() && dt > 0.0 && t_end >= dt) {
        return Err(Error::InvalidArgument(format!("need dt > 0 and t_end ≥ dt (dt = {dt}, t_end = {t_end})")));
    }
    let steps = (t_end / dt).round() as usize;
    let mut marks: Vec<(usize, f64)> = sample_times
        .iter()
        .filter(|&&t| (0.0..=t_end + 0.5 * dt).contains(&t))
        .map(|&t| ((t / dt).round() as usize, t))
        .collect();
    marks.sort_by_key(|m| m.0);
    marks.dedup_by_key(|m| m.0);

    let a = &ls.abig;
    let mut x = x0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        norms: Vec::new(),
    };
    let mut next = 0;
    for step in 0..=steps {
        while next < marks.len() && marks[next].0 == step {
            traj.times.push(step as f64 * dt);
            traj.norms.push(norm(&x));
            traj.states.push(x.clone());
            next += 1;
        }
        if step == steps {
            break;
        }
        a.mul_into(&x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k1[i];
        }
        a.mul_into(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k2[i];
        }
        a.mul_into(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + dt * k3[i];
        }
        a.mul_into(&tmp, &mut k4);
        for i in 0..n {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let nx = norm(&x);
        if !nx.is_finite() || nx > BLOWUP {
            return Err(Error::Divergence {
                time: (step + 1) as f64 * dt,
            });
        }
    }
    Ok(traj)
}

/// Decay rate `β` of the least-squares fit `log ‖x(t)‖ ≈ c − β t` over the
/// recorded samples with nonzero norm. `None` with fewer than two samples.
pub fn fit_decay_rate(traj: &Trajectory) -> Option<f64> {
    let pts: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&traj.norms)
        .filter(|(_, &n)| n > 0.0)
        .map(|(&t, &n)| (t, n.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    Some(-sxy / sxx)
}
