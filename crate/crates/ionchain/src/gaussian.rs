//! Gaussian ground-state calculus on the chain: covariance matrices,
//! reductions, symplectic spectra, bipartite entropy, and logarithmic
//! negativity.
//!
//! Covariance matrices are stored in `xxpp` ordering (the first M rows and
//! columns are positions, the last M are momenta) and normalized so that a
//! single vacuum mode at frequency ν has diagonal `(1/(2ν), ν/2)`: every
//! symplectic eigenvalue of a physical state is at least 1/2, with equality
//! for pure modes.

use ndarray::{s, Array1, Array2};

use crate::chain::{ChainSpec, CouplingMatrix, NormalModes};
use crate::error::{Error, Result};
use crate::linalg;

/// Second moments of a Gaussian state over M modes, in xxpp ordering.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    sigma: Array2<f64>,
    modes: usize,
}

impl CovarianceMatrix {
    pub fn from_matrix(sigma: Array2<f64>) -> Result<Self> {
        let n = sigma.nrows();
        if n != sigma.ncols() || n % 2 != 0 {
            return Err(Error::InvalidInput(
                "covariance matrix must be square with even dimension".into(),
            ));
        }
        for i in 0..n {
            for j in 0..i {
                if (sigma[[i, j]] - sigma[[j, i]]).abs() > 1e-10 {
                    return Err(Error::InvalidInput(
                        "covariance matrix must be symmetric".into(),
                    ));
                }
            }
        }
        Ok(CovarianceMatrix {
            modes: n / 2,
            sigma,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.sigma
    }

    /// Keep only the listed modes (0-based), in the order given, preserving
    /// the xxpp layout.
    pub fn reduce(&self, sites: &[usize]) -> Result<CovarianceMatrix> {
        if sites.is_empty() {
            return Err(Error::InvalidInput("reduction subset is empty".into()));
        }
        let m = self.modes;
        for &s in sites {
            if s >= m {
                return Err(Error::InvalidInput(format!(
                    "site index {s} out of range for {m} modes"
                )));
            }
        }
        let k = sites.len();
        let mut out = Array2::zeros((2 * k, 2 * k));
        for (a, &i) in sites.iter().enumerate() {
            for (b, &j) in sites.iter().enumerate() {
                out[[a, b]] = self.sigma[[i, j]];
                out[[a, b + k]] = self.sigma[[i, j + m]];
                out[[a + k, b]] = self.sigma[[i + m, j]];
                out[[a + k, b + k]] = self.sigma[[i + m, j + m]];
            }
        }
        Ok(CovarianceMatrix {
            modes: k,
            sigma: out,
        })
    }

    pub fn symplectic_eigenvalues(&self) -> Result<SymplecticSpectrum> {
        let mu = symplectic_spectrum_raw(&self.sigma)?;
        if let Some(&bad) = mu.iter().find(|&&v| v < 0.5 - 1e-6) {
            return Err(Error::InvalidState(format!(
                "symplectic eigenvalue {bad} below vacuum floor 1/2"
            )));
        }
        Ok(SymplecticSpectrum { mu })
    }

    /// Is this a pure state (all symplectic eigenvalues 1/2 within `tol`)?
    pub fn is_pure(&self, tol: f64) -> Result<bool> {
        let mu = symplectic_spectrum_raw(&self.sigma)?;
        Ok(mu.iter().all(|&v| (v - 0.5).abs() <= tol))
    }
}

/// Symplectic eigenvalues, descending, one entry per mode.
#[derive(Debug, Clone)]
pub struct SymplecticSpectrum {
    mu: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.mu
    }
}

/// Symplectic eigenvalues of a symmetric PSD matrix in xxpp ordering, with no
/// physicality floor applied (partial transposes dip below 1/2 on purpose).
fn symplectic_spectrum_raw(sigma: &Array2<f64>) -> Result<Vec<f64>> {
    let m = sigma.nrows() / 2;
    let sqrt = linalg::sym_matrix_func(sigma, |v| {
        if v < -1e-9 {
            Err(Error::InvalidState(format!(
                "covariance matrix has negative eigenvalue {v:.3e}"
            )))
        } else {
            Ok(v.max(0.0).sqrt())
        }
    })?;
    // W = √σ J √σ is antisymmetric with singular values {μ_k, μ_k}; the
    // eigenvalues of iJσ are recovered without any non-symmetric solve.
    let mut w = Array2::zeros((2 * m, 2 * m));
    {
        let (top, bottom) = (sqrt.slice(s![.., m..]), sqrt.slice(s![.., ..m]));
        let j_sqrt_top = top.to_owned();
        let j_sqrt_bottom = bottom.mapv(|x| -x);
        let mut upper = w.slice_mut(s![..m, ..]);
        upper.assign(&sqrt.slice(s![..m, ..]));
        let _ = upper;
        // w = sqrt · (J · sqrt): build J·sqrt first.
        let mut js = Array2::zeros((2 * m, 2 * m));
        js.slice_mut(s![..m, ..]).assign(&sqrt.slice(s![m.., ..]));
        js.slice_mut(s![m.., ..])
            .assign(&sqrt.slice(s![..m, ..]).mapv(|x| -x));
        w = sqrt.dot(&js);
        let _ = (j_sqrt_top, j_sqrt_bottom);
    }
    let sv = linalg::singular_values(&w)?;
    let mut mu = Vec::with_capacity(m);
    for k in 0..m {
        mu.push(0.5 * (sv[2 * k] + sv[2 * k + 1]));
    }
    Ok(mu)
}

/// Entropy contribution of one symplectic eigenvalue, in ebits.
/// Continuous at the vacuum value: values at or below 1/2 contribute zero.
pub fn mode_entropy(mu: f64) -> f64 {
    if mu <= 0.5 {
        return 0.0;
    }
    (mu + 0.5) * (mu + 0.5).log2() - (mu - 0.5) * (mu - 0.5).log2()
}

/// Ground-state covariance of the quadratic chain Hamiltonian: position block
/// `G^(-1/2)/2`, momentum block `G^(1/2)/2`, no cross correlations.
pub fn ground_state_covariance(coupling: &CouplingMatrix) -> Result<CovarianceMatrix> {
    let g = coupling.matrix();
    let n = coupling.n_ions();
    let check = |v: f64| {
        if v <= 0.0 {
            Err(Error::Numerical(format!(
                "coupling matrix has non-positive eigenvalue {v:.3e}"
            )))
        } else {
            Ok(v)
        }
    };
    let xx = linalg::sym_matrix_func(g, |v| Ok(0.5 / check(v)?.sqrt()))?;
    let pp = linalg::sym_matrix_func(g, |v| Ok(0.5 * check(v)?.sqrt()))?;
    let mut sigma = Array2::zeros((2 * n, 2 * n));
    sigma.slice_mut(s![..n, ..n]).assign(&xx);
    sigma.slice_mut(s![n.., n..]).assign(&pp);
    Ok(CovarianceMatrix { modes: n, sigma })
}

/// Von Neumann entanglement entropy (in ebits) between `partition` and its
/// complement, for a pure global state. An empty partition carries zero
/// entropy.
pub fn entanglement_entropy(sigma: &CovarianceMatrix, partition: &[usize]) -> Result<f64> {
    if !sigma.is_pure(1e-6)? {
        return Err(Error::InvalidState(
            "entanglement entropy requires a pure global state".into(),
        ));
    }
    if partition.is_empty() {
        return Ok(0.0);
    }
    let reduced = sigma.reduce(partition)?;
    let spectrum = reduced.symplectic_eigenvalues()?;
    Ok(spectrum.values().iter().copied().map(mode_entropy).sum())
}

/// Logarithmic negativity between two disjoint groups of modes. The state is
/// reduced to the union first; the partial transpose flips the second group's
/// momenta. Zero means the partial transpose is positive (no entanglement
/// detected).
pub fn log_negativity(
    sigma: &CovarianceMatrix,
    group_a: &[usize],
    group_b: &[usize],
) -> Result<f64> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(Error::InvalidInput("negativity groups must be nonempty".into()));
    }
    if group_a.iter().any(|a| group_b.contains(a)) {
        return Err(Error::InvalidInput("negativity groups must be disjoint".into()));
    }
    let kept: Vec<usize> = group_a.iter().chain(group_b.iter()).copied().collect();
    let reduced = sigma.reduce(&kept)?;
    let k = kept.len();
    let na = group_a.len();
    let mut pt = reduced.sigma.clone();
    // Momentum sign flip on group B = negate its momentum rows and columns.
    for i in (k + na)..(2 * k) {
        for j in 0..(2 * k) {
            pt[[i, j] ] = -pt[[i, j]];
            pt[[j, i]] = -pt[[j, i]];
        }
    }
    let mu = symplectic_spectrum_raw(&pt)?;
    Ok(mu
        .iter()
        .map(|&v| (-(2.0 * v).log2()).max(0.0))
        .sum())
}

/// Closed-form two-ion quantities: the symplectic eigenvalue λ of a single
/// ion's reduction, the squeezing weight q = e^(-β), and the ground-state
/// entanglement in ebits.
#[derive(Debug, Clone, Copy)]
pub struct TwoIonSqueezing {
    pub lambda: f64,
    pub e_beta: f64,
    pub entropy_ebits: f64,
}

/// Evaluate the two-ion closed forms from the mode pair {1, √3}.
pub fn two_ion_analytics() -> TwoIonSqueezing {
    let ratio = 3.0f64.sqrt();
    let lambda = 0.25 * (ratio.sqrt() + 1.0 / ratio.sqrt());
    let e_beta = ((lambda - 0.5) / (lambda + 0.5)).sqrt();
    TwoIonSqueezing {
        lambda,
        e_beta,
        entropy_ebits: mode_entropy(lambda),
    }
}

/// Half-chain entanglement entropy for each (even) chain size.
pub fn entropy_vs_chain_size(sizes: &[usize]) -> Result<Vec<(usize, f64)>> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "entropy scan requires even chain sizes, got {n}"
            )));
        }
        let coupling = ChainSpec::new(n)?.solve_equilibrium()?.coupling()?;
        let sigma = ground_state_covariance(&coupling)?;
        let half: Vec<usize> = (0..n / 2).collect();
        rows.push((n, entanglement_entropy(&sigma, &half)?));
    }
    Ok(rows)
}

/// One row of the negativity-versus-separation table.
#[derive(Debug, Clone, Copy)]
pub struct NegativityRow {
    /// Number of ions strictly between the two groups.
    pub separation: usize,
    pub group_size: usize,
    pub log_negativity: f64,
}

/// Logarithmic negativity between two size-`g` groups placed as close to the
/// chain center as the geometry allows, for every separation that fits.
pub fn negativity_vs_separation(
    n_ions: usize,
    group_sizes: &[usize],
) -> Result<Vec<NegativityRow>> {
    let coupling = ChainSpec::new(n_ions)?.solve_equilibrium()?.coupling()?;
    let sigma = ground_state_covariance(&coupling)?;
    let mut rows = Vec::new();
    for &g in group_sizes {
        if g == 0 {
            return Err(Error::InvalidInput("group size must be positive".into()));
        }
        let mut sep = 0usize;
        loop {
            let span = 2 * g + sep;
            if span > n_ions {
                break;
            }
            let (a, b) = centered_groups(n_ions, g, sep);
            rows.push(NegativityRow {
                separation: sep,
                group_size: g,
                log_negativity: log_negativity(&sigma, &a, &b)?,
            });
            sep += 1;
        }
    }
    Ok(rows)
}

/// Two size-`g` groups with `sep` ions strictly between, centered on the
/// chain (0-based site indices).
pub fn centered_groups(n_ions: usize, g: usize, sep: usize) -> (Vec<usize>, Vec<usize>) {
    let span = 2 * g + sep;
    debug_assert!(span <= n_ions);
    let start = (n_ions - span) / 2;
    let a = (start..start + g).collect();
    let b = (start + g + sep..start + span).collect();
    (a, b)
}

/// Largest separation at which the negativity between centered size-`g`
/// groups is still positive (above `floor`), if any.
pub fn max_entangled_separation(rows: &[NegativityRow], g: usize, floor: f64) -> Option<usize> {
    rows.iter()
        .filter(|r| r.group_size == g && r.log_negativity > floor)
        .map(|r| r.separation)
        .max()
}

/// Frequencies and modes are not needed to build the ground state covariance,
/// but sweeps often want both; bundle the chain pipeline for convenience.
pub fn chain_ground_state(n_ions: usize) -> Result<(NormalModes, CovarianceMatrix)> {
    let coupling = ChainSpec::new(n_ions)?.solve_equilibrium()?.coupling()?;
    let modes = coupling.normal_modes()?;
    let sigma = ground_state_covariance(&coupling)?;
    Ok((modes, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainSpec;

    fn two_ion_sigma() -> CovarianceMatrix {
        let coupling = ChainSpec::new(2)
            .unwrap()
            .solve_equilibrium()
            .unwrap()
            .coupling()
            .unwrap();
        ground_state_covariance(&coupling).unwrap()
    }

    #[test]
    fn single_ion_vacuum() {
        let coupling = ChainSpec::new(1)
            .unwrap()
            .solve_equilibrium()
            .unwrap()
            .coupling()
            .unwrap();
        let sigma = ground_state_covariance(&coupling).unwrap();
        assert!((sigma.matrix()[[0, 0]] - 0.5).abs() < 1e-14);
        assert!((sigma.matrix()[[1, 1]] - 0.5).abs() < 1e-14);
        assert!(sigma.matrix()[[0, 1]].abs() < 1e-14);
    }

    #[test]
    fn two_ion_blocks() {
        let sigma = two_ion_sigma();
        let x_diag = (1.0 + 1.0 / 3.0f64.sqrt()) / 4.0;
        let p_diag = (1.0 + 3.0f64.sqrt()) / 4.0;
        assert!((sigma.matrix()[[0, 0]] - x_diag).abs() < 1e-12);
        assert!((sigma.matrix()[[2, 2]] - p_diag).abs() < 1e-12);
        assert!(sigma.matrix()[[0, 2]].abs() < 1e-14);
    }

    #[test]
    fn ground_state_is_pure_up_to_30() {
        for n in [1, 2, 3, 5, 10, 20, 30] {
            let coupling = ChainSpec::new(n)
                .unwrap()
                .solve_equilibrium()
                .unwrap()
                .coupling()
                .unwrap();
            let sigma = ground_state_covariance(&coupling).unwrap();
            let mu = sigma.symplectic_eigenvalues().unwrap();
            for &v in mu.values() {
                assert!((v - 0.5).abs() < 1e-9, "impure mode {v} at n={n}");
            }
        }
    }

    #[test]
    fn reduce_to_all_sites_is_identity() {
        let sigma = two_ion_sigma();
        let red = sigma.reduce(&[0, 1]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(red.matrix()[[i, j]], sigma.matrix()[[i, j]]);
            }
        }
    }

    #[test]
    fn reduce_single_ion_two_ion_chain() {
        let sigma = two_ion_sigma();
        let red = sigma.reduce(&[0]).unwrap();
        assert_eq!(red.n_modes(), 1);
        assert!((red.matrix()[[0, 0]] - (1.0 + 1.0 / 3.0f64.sqrt()) / 4.0).abs() < 1e-12);
        assert!((red.matrix()[[1, 1]] - (1.0 + 3.0f64.sqrt()) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn reduce_rejects_bad_subsets() {
        let sigma = two_ion_sigma();
        assert!(sigma.reduce(&[]).is_err());
        assert!(sigma.reduce(&[2]).is_err());
    }

    #[test]
    fn reduce_pair_in_long_chain_is_valid_covariance() {
        let coupling = ChainSpec::new(20)
            .unwrap()
            .solve_equilibrium()
            .unwrap()
            .coupling()
            .unwrap();
        let sigma = ground_state_covariance(&coupling).unwrap();
        let red = sigma.reduce(&[5, 14]).unwrap();
        assert_eq!(red.matrix().nrows(), 4);
        let mu = red.symplectic_eigenvalues().unwrap();
        assert!(mu.values().iter().all(|&v| v >= 0.5 - 1e-9));
    }

    #[test]
    fn single_mode_vacuum_spectrum() {
        let sigma =
            CovarianceMatrix::from_matrix(ndarray::array![[0.5, 0.0], [0.0, 0.5]]).unwrap();
        let mu = sigma.symplectic_eigenvalues().unwrap();
        assert!((mu.values()[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn two_by_two_closed_form_sqrt_det() {
        let (a, b) = (0.9, 0.7);
        let sigma = CovarianceMatrix::from_matrix(ndarray::array![[a, 0.0], [0.0, b]]).unwrap();
        let mu = sigma.symplectic_eigenvalues().unwrap();
        assert!((mu.values()[0] - (a * b).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_ion_reduction_lambda() {
        let sigma = two_ion_sigma();
        let red = sigma.reduce(&[0]).unwrap();
        let mu = red.symplectic_eigenvalues().unwrap();
        assert!((mu.values()[0] - 0.5189).abs() < 5e-4);
        assert!((mu.values()[0] - two_ion_analytics().lambda).abs() < 1e-12);
    }

    #[test]
    fn two_ion_entropy_matches_closed_form() {
        let sigma = two_ion_sigma();
        let e = entanglement_entropy(&sigma, &[0]).unwrap();
        assert!((e - 0.136).abs() < 1e-3);
        assert!((e - two_ion_analytics().entropy_ebits).abs() < 1e-9);
    }

    #[test]
    fn entropy_complementarity() {
        let coupling = ChainSpec::new(6)
            .unwrap()
            .solve_equilibrium()
            .unwrap()
            .coupling()
            .unwrap();
        let sigma = ground_state_covariance(&coupling).unwrap();
        for part in [vec![0], vec![0, 1], vec![0, 2, 4], vec![1, 3]] {
            let comp: Vec<usize> = (0..6).filter(|i| !part.contains(i)).collect();
            let ea = entanglement_entropy(&sigma, &part).unwrap();
            let eb = entanglement_entropy(&sigma, &comp).unwrap();
            assert!((ea - eb).abs() < 1e-9, "complementarity broken for {part:?}");
        }
    }

    #[test]
    fn entropy_of_everything_is_zero() {
        let sigma = two_ion_sigma();
        assert!(entanglement_entropy(&sigma, &[0, 1]).unwrap() < 1e-9);
        assert_eq!(entanglement_entropy(&sigma, &[]).unwrap(), 0.0);
    }

    #[test]
    fn entropy_requires_pure_state() {
        let sigma = two_ion_sigma();
        let mixed = sigma.reduce(&[0]).unwrap();
        assert!(entanglement_entropy(&mixed, &[0]).is_err());
    }

    #[test]
    fn two_ion_negativity_closed_form() {
        let sigma = two_ion_sigma();
        let n = log_negativity(&sigma, &[0], &[1]).unwrap();
        // For the mode pair {1, √3} the partially transposed spectrum scales
        // by the fourth root of the frequency ratio.
        assert!((n - 3.0f64.powf(0.25).log2()).abs() < 1e-10);
        let q = two_ion_analytics().e_beta;
        assert!((n - ((1.0 + q) / (1.0 - q)).log2()).abs() < 1e-10);
    }

    #[test]
    fn negativity_rejects_overlap() {
        let sigma = two_ion_sigma();
        assert!(log_negativity(&sigma, &[0], &[0]).is_err());
        assert!(log_negativity(&sigma, &[], &[1]).is_err());
    }

    #[test]
    fn negativity_local_rescaling_invariance() {
        let coupling = ChainSpec::new(8)
            .unwrap()
            .solve_equilibrium()
            .unwrap()
            .coupling()
            .unwrap();
        let sigma = ground_state_covariance(&coupling).unwrap();
        let (a, b) = (vec![2, 3], vec![4, 5]);
        let base = log_negativity(&sigma, &a, &b).unwrap();
        // x -> s x, p -> p/s on group A's modes is a local symplectic map.
        let scale = 1.7;
        let mut m = sigma.matrix().clone();
        for &site in &a {
            for j in 0..16 {
                m[[site, j]] *= scale;
                m[[j, site]] *= scale;
                m[[site + 8, j]] /= scale;
                m[[j, site + 8]] /= scale;
            }
        }
        // The double loop above scaled diagonal entries twice; rebuild
        // cleanly with an explicit diagonal map instead.
        let mut d = Array1::<f64>::ones(16);
        for &site in &a {
            d[site] = scale;
            d[site + 8] = 1.0 / scale;
        }
        let mut scaled = sigma.matrix().clone();
        for i in 0..16 {
            for j in 0..16 {
                scaled[[i, j]] *= d[i] * d[j];
            }
        }
        let sigma_scaled = CovarianceMatrix::from_matrix(scaled).unwrap();
        let rescaled = log_negativity(&sigma_scaled, &a, &b).unwrap();
        assert!((base - rescaled).abs() < 1e-9);
    }

    #[test]
    fn analytic_two_ion_values() {
        let t = two_ion_analytics();
        assert!((t.lambda - 0.5189).abs() < 5e-4);
        assert!((t.e_beta - 0.1366).abs() < 5e-4);
        assert!((t.entropy_ebits - 0.136).abs() < 1e-3);
        let check = ((t.lambda - 0.5) / (t.lambda + 0.5)).sqrt();
        assert!((t.e_beta - check).abs() < 1e-15);
    }

    #[test]
    fn mode_entropy_continuity_at_vacuum() {
        assert_eq!(mode_entropy(0.5), 0.0);
        assert_eq!(mode_entropy(0.5 - 1e-9), 0.0);
        let eps = mode_entropy(0.5 + 1e-12);
        assert!(eps.is_finite() && eps >= 0.0 && eps < 1e-9);
    }

    #[test]
    fn entropy_scan_rejects_odd_sizes() {
        assert!(entropy_vs_chain_size(&[3]).is_err());
    }

    #[test]
    fn entropy_scan_small() {
        let rows = entropy_vs_chain_size(&[2, 4]).unwrap();
        assert!((rows[0].1 - 0.136).abs() < 1e-3);
        assert!(rows[1].1 > rows[0].1);
    }

    #[test]
    fn centered_group_geometry() {
        let (a, b) = centered_groups(20, 1, 0);
        assert_eq!((a[0], b[0]), (9, 10));
        let (a, b) = centered_groups(20, 1, 1);
        assert_eq!((a[0], b[0]), (9, 11));
        let (a, b) = centered_groups(20, 3, 2);
        assert_eq!(a, vec![6, 7, 8]);
        assert_eq!(b, vec![11, 12, 13]);
    }

    #[test]
    fn negativity_rows_reject_oversized_groups() {
        assert!(negativity_vs_separation(4, &[0]).is_err());
        let rows = negativity_vs_separation(4, &[2]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].separation, 0);
    }
}
