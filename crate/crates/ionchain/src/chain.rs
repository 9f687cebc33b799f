//! Classical equilibrium and phonon normal modes of a linear ion chain.
//!
//! Everything is dimensionless: the axial trap frequency, the ion mass, and
//! the quantum of action are all 1, and lengths are measured in the Coulomb
//! length scale. In these units the center-of-mass mode always oscillates at
//! frequency 1 and a two-ion chain has a breathing mode at √3.

use ndarray::{Array1, Array2};
use ndarray_linalg::Solve;

use crate::error::{Error, Result};
use crate::linalg;

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITERS: usize = 200;

/// A linear chain of `n_ions` in a harmonic axial trap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainSpec {
    n_ions: usize,
}

impl ChainSpec {
    pub fn new(n_ions: usize) -> Result<Self> {
        if n_ions < 1 {
            return Err(Error::InvalidInput("n_ions must be at least 1".into()));
        }
        Ok(ChainSpec { n_ions })
    }

    pub fn n_ions(&self) -> usize {
        self.n_ions
    }

    /// Solve the classical force balance
    /// `u_m - Σ_{n<m} (u_m-u_n)⁻² + Σ_{n>m} (u_n-u_m)⁻² = 0`
    /// by damped Newton iteration from a uniformly spaced seed.
    pub fn solve_equilibrium(&self) -> Result<EquilibriumPositions> {
        solve_equilibrium(*self)
    }
}

/// Equilibrium ion positions, strictly ascending and reflection-antisymmetric.
#[derive(Debug, Clone)]
pub struct EquilibriumPositions {
    u: Array1<f64>,
}

impl EquilibriumPositions {
    pub fn positions(&self) -> &Array1<f64> {
        &self.u
    }

    pub fn n_ions(&self) -> usize {
        self.u.len()
    }

    /// Residual of the force balance at each ion.
    pub fn force_residual(&self) -> Array1<f64> {
        force(&self.u)
    }

    /// Second derivatives of the potential at equilibrium.
    pub fn coupling(&self) -> Result<CouplingMatrix> {
        coupling_matrix(self)
    }
}

/// Hessian of the dimensionless potential at equilibrium:
/// diagonal `1 + 2 Σ_{n≠m} |u_m-u_n|⁻³`, off-diagonal `-2 |u_m-u_n|⁻³`.
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    g: Array2<f64>,
}

impl CouplingMatrix {
    /// Wrap an externally built matrix. It must be symmetric.
    pub fn from_matrix(g: Array2<f64>) -> Result<Self> {
        if g.nrows() != g.ncols() {
            return Err(Error::InvalidInput("coupling matrix must be square".into()));
        }
        for i in 0..g.nrows() {
            for j in 0..i {
                if (g[[i, j]] - g[[j, i]]).abs() > 1e-12 {
                    return Err(Error::InvalidInput(
                        "coupling matrix must be symmetric".into(),
                    ));
                }
            }
        }
        Ok(CouplingMatrix { g })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.g
    }

    pub fn n_ions(&self) -> usize {
        self.g.nrows()
    }

    pub fn normal_modes(&self) -> Result<NormalModes> {
        normal_modes(self)
    }

    /// Remove every coupling between the first `cut` ions and the rest,
    /// leaving all other entries (including diagonals) unchanged. The result
    /// is block-diagonal and the two blocks evolve independently.
    pub fn truncated(&self, cut: usize) -> Result<CouplingMatrix> {
        let n = self.n_ions();
        if cut < 1 || cut >= n {
            return Err(Error::InvalidInput(format!(
                "cut must satisfy 1 <= cut < n_ions, got {cut} for {n} ions"
            )));
        }
        let mut g = self.g.clone();
        for i in 0..cut {
            for j in cut..n {
                g[[i, j]] = 0.0;
                g[[j, i]] = 0.0;
            }
        }
        Ok(CouplingMatrix { g })
    }
}

/// Phonon normal modes: frequencies ascending (the first is the
/// center-of-mass mode at exactly 1) and the orthogonal matrix whose column
/// `n` is the eigenvector of the coupling matrix with eigenvalue `ν_n²`.
#[derive(Debug, Clone)]
pub struct NormalModes {
    frequencies: Array1<f64>,
    mode_matrix: Array2<f64>,
}

impl NormalModes {
    /// Convenience: equilibrium, coupling matrix, and modes for an `n`-ion chain.
    pub fn for_chain(n_ions: usize) -> Result<Self> {
        ChainSpec::new(n_ions)?
            .solve_equilibrium()?
            .coupling()?
            .normal_modes()
    }

    pub fn n_ions(&self) -> usize {
        self.frequencies.len()
    }

    pub fn frequencies(&self) -> &Array1<f64> {
        &self.frequencies
    }

    /// Column `n` is mode `n`'s displacement pattern.
    pub fn mode_matrix(&self) -> &Array2<f64> {
        &self.mode_matrix
    }
}

fn force(u: &Array1<f64>) -> Array1<f64> {
    let n = u.len();
    let mut r = u.clone();
    for m in 0..n {
        for k in 0..n {
            if k == m {
                continue;
            }
            let d = u[m] - u[k];
            r[m] -= d.signum() / (d * d);
        }
    }
    r
}

fn hessian(u: &Array1<f64>) -> Array2<f64> {
    let n = u.len();
    let mut g = Array2::zeros((n, n));
    for m in 0..n {
        let mut diag = 1.0;
        for k in 0..n {
            if k == m {
                continue;
            }
            let c = 2.0 / (u[m] - u[k]).abs().powi(3);
            diag += c;
            g[[m, k]] = -c;
        }
        g[[m, m]] = diag;
    }
    g
}

fn is_strictly_ascending(u: &Array1<f64>) -> bool {
    u.windows(2).into_iter().all(|w| w[0] < w[1])
}

pub fn solve_equilibrium(spec: ChainSpec) -> Result<EquilibriumPositions> {
    let n = spec.n_ions();
    if n == 1 {
        return Ok(EquilibriumPositions {
            u: Array1::zeros(1),
        });
    }
    // Empirical minimum-spacing fit; a uniformly spaced seed at this pitch
    // keeps Newton in the ordered basin for any chain length used here.
    let spacing = 2.018 / (n as f64).powf(0.559);
    let mut u: Array1<f64> =
        Array1::from_iter((0..n).map(|i| (i as f64 - (n as f64 - 1.0) / 2.0) * spacing));

    let mut residual = force(&u);
    let mut res_norm = residual.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    for _ in 0..NEWTON_MAX_ITERS {
        if res_norm < NEWTON_TOL {
            return Ok(EquilibriumPositions { u });
        }
        let jac = hessian(&u);
        let step = jac
            .solve(&residual.mapv(|x| -x))
            .map_err(|e| Error::Numerical(format!("Newton linear solve failed: {e}")))?;
        // Backtrack until the residual shrinks and the ordering survives.
        let mut t = 1.0;
        loop {
            let trial = &u + &step.mapv(|x| x * t);
            if is_strictly_ascending(&trial) {
                let trial_res = force(&trial);
                let trial_norm = trial_res.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
                if trial_norm < res_norm || trial_norm < NEWTON_TOL {
                    u = trial;
                    residual = trial_res;
                    res_norm = trial_norm;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                return Err(Error::NoConvergence {
                    iterations: NEWTON_MAX_ITERS,
                    residual: res_norm,
                });
            }
        }
    }
    if res_norm < NEWTON_TOL {
        Ok(EquilibriumPositions { u })
    } else {
        Err(Error::NoConvergence {
            iterations: NEWTON_MAX_ITERS,
            residual: res_norm,
        })
    }
}

pub fn coupling_matrix(positions: &EquilibriumPositions) -> Result<CouplingMatrix> {
    let u = positions.positions();
    let n = u.len();
    for i in 0..n {
        for j in 0..i {
            if (u[i] - u[j]).abs() < 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "coincident ion positions at indices {j} and {i}"
                )));
            }
        }
    }
    Ok(CouplingMatrix { g: hessian(u) })
}

pub fn normal_modes(coupling: &CouplingMatrix) -> Result<NormalModes> {
    let (vals, mut vecs) = linalg::sym_eigh(coupling.matrix())?;
    if vals[0] <= 0.0 {
        return Err(Error::Numerical(format!(
            "coupling matrix has a non-positive eigenvalue {:.3e}: unstable configuration",
            vals[0]
        )));
    }
    // Fix the overall sign of each column: its largest-magnitude entry is
    // made positive (lowest index wins ties).
    for mut col in vecs.columns_mut() {
        let mut best = 0;
        for (i, &v) in col.iter().enumerate() {
            if v.abs() > col[best].abs() + 1e-14 {
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.mapv_inplace(|x| -x);
        }
    }
    Ok(NormalModes {
        frequencies: vals.mapv(f64::sqrt),
        mode_matrix: vecs,
    })
}

pub fn truncated_coupling(coupling: &CouplingMatrix, cut: usize) -> Result<CouplingMatrix> {
    coupling.truncated(cut)
}
