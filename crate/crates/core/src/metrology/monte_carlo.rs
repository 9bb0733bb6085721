use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::protocol::{EstimationResult, Method, Protocol, ResponseCurve};
use crate::error::{Error, Result};
use crate::fock::{BasisState, Observable, StateVector};

const EIGENVALUE_MERGE: f64 = 1e-9;

/// Born-rule distribution of one observable measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pub values: Vec<f64>,
    pub probabilities: Vec<f64>,
    cumulative: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.probabilities).map(|(v, p)| v * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.values.iter().zip(&self.probabilities).map(|(v, p)| p * (v - m).powi(2)).sum()
    }

    /// Index of the sampled outcome.
    pub fn sample_index<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative.partition_point(|&c| c <= u).min(self.values.len() - 1)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        self.values[self.sample_index(rng)]
    }
}

/// Eigendecomposition of `obs` on the joint support of `obs` and `state`,
/// with outcome probabilities |⟨v_k|ψ⟩|² summed over degenerate eigenvalues.
pub fn outcome_distribution(state: &StateVector, obs: &Observable) -> Result<OutcomeDistribution> {
    if !obs.is_hermitian() {
        return Err(Error::NonHermitian);
    }
    let mut basis: Vec<BasisState> = obs.support().into_iter().collect();
    basis.extend(state.iter().map(|(b, _)| b.clone()));
    basis.sort();
    basis.dedup();
    let dense: DMatrix<Complex64> = obs.to_dense(&basis);
    let psi = DVector::from_iterator(basis.len(), basis.iter().map(|b| state.amplitude(b)));
    let norm = psi.norm_squared();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let eig = dense.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..basis.len())
        .map(|k| {
            let v = eig.eigenvectors.column(k);
            (eig.eigenvalues[k], v.dotc(&psi).norm_sqr() / norm)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut values: Vec<f64> = Vec::new();
    let mut probabilities: Vec<f64> = Vec::new();
    for (v, p) in pairs {
        match values.last() {
            Some(&last) if (v - last).abs() < EIGENVALUE_MERGE => *probabilities.last_mut().unwrap() += p,
            _ => {
                values.push(v);
                probabilities.push(p);
            }
        }
    }
    // Snap eigenvalues that are integers up to rounding so sums stay exact.
    for v in values.iter_mut() {
        if (*v - v.round()).abs() < EIGENVALUE_MERGE {
            *v = v.round();
        }
    }
    let total: f64 = probabilities.iter().sum();
    probabilities.iter_mut().for_each(|p| *p /= total);
    let mut acc = 0.0;
    let cumulative = probabilities
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    Ok(OutcomeDistribution { values, probabilities, cumulative })
}

fn repetition_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Samples `trials` projective measurements per repetition, inverts each
/// repetition's mean outcome through the protocol fringe, and reports the
/// mean estimate with the standard deviation across repetitions.
///
/// With a single repetition the uncertainty is the plug-in value: the sample
/// standard deviation of the outcomes over √trials, propagated through the
/// fringe slope at the estimate.
pub fn run_monte_carlo(protocol: Protocol, x: f64, trials: u64, repetitions: u32, seed: u64) -> Result<EstimationResult> {
    if trials == 0 || repetitions == 0 {
        return Err(Error::InvalidParameter("trials and repetitions must be positive".into()));
    }
    let setup = protocol.setup()?;
    let dist = outcome_distribution(&setup.state(x)?, setup.observable())?;
    let fringe = protocol.fringe();

    let runs: Vec<(f64, f64, f64, bool)> = (0..repetitions as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = repetition_rng(seed, rep);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..trials {
                let v = dist.sample(&mut rng);
                sum += v;
                sum_sq += v * v;
            }
            let mean = sum / trials as f64;
            let (est, clamped) = fringe.invert(mean);
            (est, mean, sum_sq / trials as f64 - mean * mean, clamped)
        })
        .collect();

    let n = runs.len() as f64;
    let estimate = runs.iter().map(|r| r.0).sum::<f64>() / n;
    let mean_signal = runs.iter().map(|r| r.1).sum::<f64>() / n;
    let clamped = runs.iter().any(|r| r.3);
    let uncertainty = if runs.len() > 1 {
        (runs.iter().map(|r| (r.0 - estimate).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        let spread = runs[0].2.max(0.0).sqrt() / (trials as f64).sqrt();
        if spread == 0.0 {
            0.0
        } else {
            super::protocol::propagate_uncertainty(&ResponseCurve::Known(fringe), spread, estimate)?
        }
    };
    Ok(EstimationResult {
        estimate,
        uncertainty,
        resources: trials,
        method: Method::MonteCarlo,
        mean_signal,
        clamped,
        repetitions,
        seed: Some(seed),
    })
}

/// Least-squares line through (ln N, ln Δ).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
}

pub fn fit_scaling(points: Vec<(f64, f64)>) -> Result<ScalingFit> {
    if points.len() < 4 {
        return Err(Error::DegenerateGrid(format!("{} points; at least 4 are needed", points.len())));
    }
    if points.iter().any(|&(n, d)| !(n > 0.0) || !(d > 0.0)) {
        return Err(Error::DegenerateGrid("resources and uncertainties must be positive".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateGrid("all resource values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let slope_stderr = (rss / (n - 2.0) / sxx).sqrt();
    Ok(ScalingFit { points, slope, slope_stderr, intercept })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ScalingFamily {
    /// Grid values are trial counts of the single-photon protocol.
    IndependentPhotons,
    /// Grid values are NOON photon numbers, each run with `trials` shots.
    Noon { trials: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRun {
    pub family: ScalingFamily,
    pub results: Vec<EstimationResult>,
    pub fit: ScalingFit,
}

/// SplitMix64 step; gives each grid point its own seed.
fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Monte Carlo uncertainty at each grid value, at the protocol's working
/// point, followed by a log-log fit against the grid value.
pub fn scaling_experiment(family: ScalingFamily, grid: &[u64], repetitions: u32, seed: u64) -> Result<ScalingRun> {
    let mut sorted = grid.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() < 4 || sorted[0] == 0 {
        return Err(Error::DegenerateGrid("need at least 4 distinct positive grid values".into()));
    }
    if repetitions < 2 {
        return Err(Error::InvalidParameter("scaling needs at least 2 repetitions per point".into()));
    }
    let mut results = Vec::with_capacity(grid.len());
    for (i, &g) in grid.iter().enumerate() {
        let s = derive_seed(seed, i as u64);
        let r = match family {
            ScalingFamily::IndependentPhotons => {
                let p = Protocol::SinglePhotonMz;
                run_monte_carlo(p, p.working_point(), g, repetitions, s)?
            }
            ScalingFamily::Noon { trials } => {
                let n = u32::try_from(g).map_err(|_| Error::InvalidParameter("photon number too large".into()))?;
                let p = Protocol::Noon { n };
                run_monte_carlo(p, p.working_point(), trials, repetitions, s)?
            }
        };
        results.push(r);
    }
    let points = grid.iter().zip(&results).map(|(&g, r)| (g as f64, r.uncertainty)).collect();
    let fit = fit_scaling(points)?;
    Ok(ScalingRun { family, results, fit })
}
