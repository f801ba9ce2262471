use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{DirectionKind, SisModel};

/// Compressed sparse row matrix; all the lifted dynamics needs is `y = A x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Csr {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl Csr {
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v != 0.0 {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Csr {
            n: m.nrows(),
            indptr,
            indices,
            values,
        }
    }

    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (self.indptr[i]..self.indptr[i + 1])
                .map(|k| self.values[k] * x[self.indices[k]])
                .sum();
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.indptr[i]..self.indptr[i + 1] {
                m[(i, self.indices[k])] += self.values[k];
            }
        }
        m
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }
}

/// The interconnection instantiated on a finite grid of sites (periodic
/// wraparound in every direction) with the interconnection variables
/// eliminated: `ẋ = A_big x`.
#[derive(Clone, Debug)]
pub struct LiftedSystem {
    pub sites: Vec<usize>,
    pub n0: usize,
    pub abig: Csr,
}

impl LiftedSystem {
    pub fn num_sites(&self) -> usize {
        self.sites.iter().product()
    }

    pub fn state_len(&self) -> usize {
        self.n0 * self.num_sites()
    }

    /// Flat site index of zero-based coordinates, `k_1` varying fastest.
    pub fn site_index(&self, k: &[usize]) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (ki, &s) in k.iter().zip(&self.sites) {
            idx += ki * stride;
            stride *= s;
        }
        idx
    }

    /// Block offset of site `k` in the state vector.
    pub fn offset(&self, k: &[usize]) -> usize {
        self.site_index(k) * self.n0
    }

    pub fn site_coords(&self, mut flat: usize) -> Vec<usize> {
        self.sites
            .iter()
            .map(|&s| {
                let k = flat % s;
                flat /= s;
                k
            })
            .collect()
    }

    /// Initial state from `(site, state, value)` triples with one-based site
    /// coordinates and state index.
    pub fn initial_state(&self, entries: &[(Vec<usize>, usize, f64)]) -> Result<Vec<f64>> {
        let mut x = vec![0.0; self.state_len()];
        for (site, j, v) in entries {
            if site.len() != self.sites.len()
                || site.iter().zip(&self.sites).any(|(&k, &s)| k == 0 || k > s)
                || *j == 0
                || *j > self.n0
            {
                return Err(Error::InvalidArgument(format!(
                    "initial condition ({site:?}, {j}) outside sites {:?} / states 1..={}",
                    self.sites, self.n0
                )));
            }
            let k: Vec<usize> = site.iter().map(|k| k - 1).collect();
            x[self.offset(&k) + j - 1] = *v;
        }
        Ok(x)
    }

    pub fn dense(&self) -> DMatrix<f64> {
        self.abig.to_dense()
    }
}

/// Lift `m` onto `sites[i]` sites per direction. Periodic directions must use
/// their period; infinite directions are approximated by rings.
pub fn lift_finite_system(m: &SisModel, sites: &[usize]) -> Result<LiftedSystem> {
    let dirs = m.directions();
    if sites.len() != dirs.len() {
        return Err(Error::DimensionMismatch {
            expected: dirs.len(),
            found: sites.len(),
        });
    }
    for (d, &s) in dirs.iter().zip(sites) {
        if s == 0 {
            return Err(Error::InvalidArgument("site count must be positive".into()));
        }
        match d.kind {
            DirectionKind::Periodic(n) if n as usize != s => {
                return Err(Error::InvalidArgument(format!(
                    "periodic direction with N = {n} must be lifted with {n} sites, got {s}"
                )));
            }
            DirectionKind::Finite { .. } => {
                return Err(Error::Unsupported(
                    "finite-extent directions; supply the equivalent periodic system".into(),
                ));
            }
            _ => {}
        }
    }
    let n0 = m.n0();
    let n = m.n();
    let shifts = m.channel_shifts();
    let total: usize = sites.iter().product();
    let att = m.a_tt().to_f64();
    let ats = m.a_ts().to_f64();
    let ast = m.a_st().to_f64();
    let ass = m.a_ss().to_f64();

    // Site read by channel `ch` of site `s`: forward channels look one step
    // ahead, backward channels one step behind (with wraparound).
    let neighbour = |s: usize, ch: usize| -> usize {
        let (dir, p) = shifts[ch];
        let mut k = {
            let mut flat = s;
            sites
                .iter()
                .map(|&w| {
                    let r = flat % w;
                    flat /= w;
                    r
                })
                .collect::<Vec<_>>()
        };
        let w = sites[dir] as i64;
        k[dir] = ((k[dir] as i64 + p as i64).rem_euclid(w)) as usize;
        let mut idx = 0;
        let mut stride = 1;
        for (ki, &sz) in k.iter().zip(sites) {
            idx += ki * stride;
            stride *= sz;
        }
        idx
    };

    let ls = |abig| LiftedSystem {
        sites: sites.to_vec(),
        n0,
        abig,
    };

    if n == 0 {
        let mut big = DMatrix::zeros(total * n0, total * n0);
        for s in 0..total {
            big.view_mut((s * n0, s * n0), (n0, n0)).copy_from(&att);
        }
        return Ok(ls(Csr::from_dense(&big)));
    }

    if ass.iter().all(|&v| v == 0.0) {
        // Δ_big is a permutation: v_{nbr(s,ch), ch} ← (A_ST x_s)_ch, so the
        // channel ch of site s carries (A_ST x_{s'})_ch for s' with nbr(s', ch) = s.
        let mut src = vec![vec![0usize; n]; total];
        for s in 0..total {
            for ch in 0..n {
                src[neighbour(s, ch)][ch] = s;
            }
        }
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for s in 0..total {
            for r in 0..n0 {
                let mut row: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
                for j in 0..n0 {
                    if att[(r, j)] != 0.0 {
                        *row.entry(s * n0 + j).or_default() += att[(r, j)];
                    }
                }
                for ch in 0..n {
                    let a = ats[(r, ch)];
                    if a == 0.0 {
                        continue;
                    }
                    let from = src[s][ch];
                    for j in 0..n0 {
                        if ast[(ch, j)] != 0.0 {
                            *row.entry(from * n0 + j).or_default() += a * ast[(ch, j)];
                        }
                    }
                }
                for (c, v) in row {
                    if v != 0.0 {
                        indices.push(c);
                        values.push(v);
                    }
                }
                indptr.push(indices.len());
            }
        }
        return Ok(ls(Csr {
            n: total * n0,
            indptr,
            indices,
            values,
        }));
    }

    // General case: dense elimination of (Δ_big − I⊗A_SS).
    let nv = total * n;
    let mut dm = DMatrix::<f64>::zeros(nv, nv);
    let mut rhs = DMatrix::<f64>::zeros(nv, total * n0);
    for s in 0..total {
        for ch in 0..n {
            dm[(s * n + ch, neighbour(s, ch) * n + ch)] += 1.0;
            for c2 in 0..n {
                dm[(s * n + ch, s * n + c2)] -= ass[(ch, c2)];
            }
            for j in 0..n0 {
                rhs[(s * n + ch, s * n0 + j)] = ast[(ch, j)];
            }
        }
    }
    let v = dm
        .lu()
        .solve(&rhs)
        .filter(|v| v.iter().all(|x| x.is_finite()))
        .ok_or_else(|| Error::IllPosed {
            at: format!("lifted grid {sites:?}"),
        })?;
    let mut big = DMatrix::zeros(total * n0, total * n0);
    for s in 0..total {
        big.view_mut((s * n0, s * n0), (n0, n0)).copy_from(&att);
        let coupled = &ats * v.rows(s * n, n);
        let mut rows = big.rows_mut(s * n0, n0);
        rows += coupled;
    }
    Ok(ls(Csr::from_dense(&big)))
}

/// Complex copy of the dense lifted matrix (for abscissa computations).
pub fn lifted_dense_c64(ls: &LiftedSystem) -> DMatrix<Complex64> {
    ls.dense().map(|v| Complex64::new(v, 0.0))
}
