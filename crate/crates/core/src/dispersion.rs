//! Biphoton propagation through dispersive media and two-photon coincidence
//! interferometry: exchange (Hong-Ou-Mandel type) dips, paired-path fringes,
//! nonlocal timing correlations, a classical pulse baseline and delay fits.
//!
//! The signal photon sits at ω₀ + Δ and the idler at ω₀ − Δ. A medium adds
//! the spectral phase `L·Σ βₙ Δⁿ/n!` to each photon that crosses it; a
//! scanned delay τ multiplies the delayed photon by `e^{iωτ}`.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elements::{beam_splitter_matrix, BALANCED};
use crate::error::{Error, Result};
use crate::sources::BiphotonSpectrum;

/// Taylor coefficients β₀..β₃ of k(ω) about ω₀ and the medium length.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DispersionProfile {
    pub beta: [f64; 4],
    pub length: f64,
}

impl DispersionProfile {
    pub fn new(beta: [f64; 4], length: f64) -> Result<Self> {
        let p = Self { beta, length };
        p.validate()?;
        Ok(p)
    }

    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Single nonzero coefficient of order `n` (0..=3).
    pub fn single_order(n: usize, beta: f64, length: f64) -> Result<Self> {
        if n > 3 {
            return Err(Error::InvalidParameter(format!("dispersion order {n} is not modeled")));
        }
        let mut b = [0.0; 4];
        b[n] = beta;
        Self::new(b, length)
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta.iter().any(|b| !b.is_finite()) || !(self.length >= 0.0) || !self.length.is_finite() {
            return Err(Error::InvalidParameter("dispersion needs finite β and L ≥ 0".into()));
        }
        Ok(())
    }

    /// L·Σ βₙ Δⁿ/n!.
    pub fn phase(&self, detuning: f64) -> f64 {
        let [b0, b1, b2, b3] = self.beta;
        let d = detuning;
        self.length * (b0 + d * (b1 + d * (b2 / 2.0 + d * b3 / 6.0)))
    }

    /// Same medium with every coefficient negated.
    pub fn opposite(&self) -> Self {
        Self { beta: self.beta.map(|b| -b), length: self.length }
    }
}

/// Media crossed by the signal and idler photons.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Arms {
    pub signal: DispersionProfile,
    pub idler: DispersionProfile,
}

impl Arms {
    pub fn signal_only(medium: DispersionProfile) -> Self {
        Self { signal: medium, idler: DispersionProfile::vacuum() }
    }

    pub fn both(medium: DispersionProfile) -> Self {
        Self { signal: medium, idler: medium }
    }

    /// Medium in the signal arm, its opposite in the idler arm.
    pub fn opposite(medium: DispersionProfile) -> Self {
        Self { signal: medium, idler: medium.opposite() }
    }
}

/// Multiplies A(Δ) by e^{i(φ_s(Δ) + φ_i(−Δ))}.
pub fn propagate(spectrum: &BiphotonSpectrum, arms: &Arms) -> Result<BiphotonSpectrum> {
    arms.signal.validate()?;
    arms.idler.validate()?;
    let amps = spectrum
        .detunings()
        .iter()
        .zip(spectrum.amplitudes())
        .map(|(&d, &a)| a * Complex64::from_polar(1.0, arms.signal.phase(d) + arms.idler.phase(-d)))
        .collect();
    spectrum.with_amplitudes(amps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Configuration {
    /// Signal and idler meet on a balanced splitter; the idler is delayed.
    Exchange,
    /// The pair travels together through one of two arms, the first of which
    /// holds the medium and the delay; the arms recombine on a balanced
    /// splitter. Odd orders cancel instead of even ones.
    PairedPath,
    /// Distribution of signal-minus-idler arrival time.
    Franson,
}

/// Which dispersion parity the coincidence signal is blind to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    /// Exchange interference: even orders cancel.
    ExchangeInterference,
    /// Paired-path interference: odd orders cancel.
    PairedPath,
}

/// Coincidence data versus delay.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interferogram {
    pub configuration: Configuration,
    /// Strictly increasing delays, seconds.
    pub delays: Vec<f64>,
    /// Coincidence probability (or timing density for Franson), in [0, 1].
    pub rates: Vec<f64>,
    /// Probability that both photons leave by the same port; empty for
    /// timing distributions.
    pub same_port: Vec<f64>,
    /// Rate far from any interference feature.
    pub baseline: f64,
}

impl Interferogram {
    /// max |coincidence + same-port − 1| over the scan.
    pub fn probability_defect(&self) -> f64 {
        self.rates.iter().zip(&self.same_port).map(|(r, s)| (r + s - 1.0).abs()).fold(0.0, f64::max)
    }

    /// (max − min)/(max + min) of the rates.
    pub fn visibility(&self) -> f64 {
        let max = self.rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.rates.iter().copied().fold(f64::INFINITY, f64::min);
        if max + min > 0.0 { (max - min) / (max + min) } else { 0.0 }
    }
}

fn check_delays(spectrum: &BiphotonSpectrum, delays: &[f64]) -> Result<()> {
    if delays.len() < 2 {
        return Err(Error::GridMismatch("delay scan needs at least two points".into()));
    }
    if delays.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::GridMismatch("delays must be strictly increasing".into()));
    }
    let bw = spectrum.rms_bandwidth();
    let step = delays.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if step > 1.0 / (2.0 * bw) {
        return Err(Error::Resolution(format!(
            "delay step {step:e} s exceeds 1/(2·rms bandwidth) = {:e} s",
            1.0 / (2.0 * bw)
        )));
    }
    let alias = PI / spectrum.step();
    if delays.iter().any(|t| t.abs() > alias / 2.0) {
        return Err(Error::Resolution(format!("delays beyond ±{:e} s alias on the frequency grid", alias / 2.0)));
    }
    Ok(())
}

/// Exchange-interference scan: after `arms`, the idler is delayed by τ and
/// the photons meet on a balanced splitter.
pub fn hom_interferogram(spectrum: &BiphotonSpectrum, arms: &Arms, delays: &[f64]) -> Result<Interferogram> {
    check_delays(spectrum, delays)?;
    let prop = propagate(spectrum, arms)?;
    let t = beam_splitter_matrix(BALANCED);
    // Ports C, D = rows; inputs signal, idler = columns.
    let (t_c1, t_c2, t_d1, t_d2) = (t[0][0], t[0][1], t[1][0], t[1][1]);
    let w0 = prop.omega0();
    let n = prop.len();
    let points: Vec<(f64, f64)> = delays
        .par_iter()
        .map(|&tau| {
            let f: Vec<Complex64> = prop
                .detunings()
                .iter()
                .zip(prop.amplitudes())
                .map(|(&d, &a)| a * Complex64::from_polar(1.0, (w0 - d) * tau))
                .collect();
            let (mut cd, mut same) = (0.0, 0.0);
            for j in 0..n {
                let (fj, fm) = (f[j], f[n - 1 - j]);
                cd += (t_c1 * t_d2 * fj + t_c2 * t_d1 * fm).norm_sqr();
                let sum = (fj + fm).norm_sqr();
                same += 0.5 * ((t_c1 * t_c2).norm_sqr() + (t_d1 * t_d2).norm_sqr()) * sum;
            }
            (cd, same)
        })
        .collect();
    let baseline = (t_c1 * t_d2).norm_sqr() + (t_c2 * t_d1).norm_sqr();
    Ok(Interferogram {
        configuration: Configuration::Exchange,
        delays: delays.to_vec(),
        rates: points.iter().map(|p| p.0).collect(),
        same_port: points.iter().map(|p| p.1).collect(),
        baseline,
    })
}

/// Paired-path scan: the exchange-symmetrized pair goes through arm a
/// (medium + delay τ on both photons) or arm b (empty) with equal amplitude,
/// then the arms meet on a balanced splitter.
fn paired_path_interferogram(spectrum: &BiphotonSpectrum, medium: &DispersionProfile, delays: &[f64]) -> Result<Interferogram> {
    check_delays(spectrum, delays)?;
    medium.validate()?;
    let sym = spectrum.symmetrized()?;
    let t = beam_splitter_matrix(BALANCED);
    let (t_ca, t_cb, t_da, t_db) = (t[0][0], t[0][1], t[1][0], t[1][1]);
    let w0 = sym.omega0();
    let points: Vec<(f64, f64)> = delays
        .par_iter()
        .map(|&tau| {
            let (mut cd, mut same) = (0.0, 0.0);
            for (&d, a) in sym.detunings().iter().zip(sym.amplitudes()) {
                let phase_a = medium.phase(d) + medium.phase(-d) + 2.0 * w0 * tau;
                let ea = Complex64::from_polar(1.0, phase_a);
                let h = t_ca * t_da * ea + t_cb * t_db;
                let kc = t_ca * t_ca * ea + t_cb * t_cb;
                let kd = t_da * t_da * ea + t_db * t_db;
                let w = a.norm_sqr();
                cd += w * h.norm_sqr();
                same += 0.5 * w * (kc.norm_sqr() + kd.norm_sqr());
            }
            (cd, same)
        })
        .collect();
    Ok(Interferogram {
        configuration: Configuration::PairedPath,
        delays: delays.to_vec(),
        rates: points.iter().map(|p| p.0).collect(),
        same_port: points.iter().map(|p| p.1).collect(),
        baseline: 0.5,
    })
}

/// Medium in one arm only. `geometry` selects exchange interference
/// (even orders cancel) or paired-path interference (odd orders cancel).
pub fn skc_interferogram(
    spectrum: &BiphotonSpectrum,
    medium: &DispersionProfile,
    delays: &[f64],
    geometry: Geometry,
) -> Result<Interferogram> {
    match geometry {
        Geometry::ExchangeInterference => hom_interferogram(spectrum, &Arms::signal_only(*medium), delays),
        Geometry::PairedPath => paired_path_interferogram(spectrum, medium, delays),
    }
}

/// Arrival-time difference distribution R(τ) ∝ |Σ A(Δ) e^{iΦ(Δ)} e^{−iΔτ}|²,
/// normalized so a transform-limited pair peaks at 1.
pub fn franson_interferogram(spectrum: &BiphotonSpectrum, arms: &Arms, delays: &[f64]) -> Result<Interferogram> {
    check_delays(spectrum, delays)?;
    let prop = propagate(spectrum, arms)?;
    let norm: f64 = prop.amplitudes().iter().map(|a| a.norm()).sum::<f64>().powi(2);
    let rates = delays
        .par_iter()
        .map(|&tau| {
            let s: Complex64 = prop
                .detunings()
                .iter()
                .zip(prop.amplitudes())
                .map(|(&d, &a)| a * Complex64::from_polar(1.0, -d * tau))
                .sum();
            s.norm_sqr() / norm
        })
        .collect();
    Ok(Interferogram {
        configuration: Configuration::Franson,
        delays: delays.to_vec(),
        rates,
        same_port: Vec::new(),
        baseline: 0.0,
    })
}

/// Temporal intensity of a single photon with the pair's marginal spectrum,
/// transform limited before the medium.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalPulse {
    pub times: Vec<f64>,
    pub intensity: Vec<f64>,
    pub rms_width: f64,
    pub transform_limited_width: f64,
}

impl ClassicalPulse {
    pub fn broadening(&self) -> f64 {
        self.rms_width / self.transform_limited_width
    }
}

const PULSE_SAMPLES: usize = 2048;

fn synthesize(detunings: &[f64], amps: &[Complex64], times: &[f64]) -> Vec<f64> {
    times
        .par_iter()
        .map(|&t| {
            detunings
                .iter()
                .zip(amps)
                .map(|(&d, &a)| a * Complex64::from_polar(1.0, -d * t))
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect()
}

fn rms(times: &[f64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    let mean = times.iter().zip(weights).map(|(t, w)| t * w).sum::<f64>() / total;
    (times.iter().zip(weights).map(|(t, w)| w * (t - mean).powi(2)).sum::<f64>() / total).sqrt()
}

/// Spectral-moment estimate of the temporal RMS width (Fourier identity
/// ⟨t²⟩ = ∫|dÃ/dΔ|²), used to size the synthesis window.
fn moment_width(detunings: &[f64], amps: &[Complex64]) -> f64 {
    let mut num = 0.0;
    let mut mean = 0.0;
    let den: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    for j in 1..amps.len() {
        let dd = detunings[j] - detunings[j - 1];
        let deriv = (amps[j] - amps[j - 1]) / dd;
        let mid = (amps[j] + amps[j - 1]) * 0.5;
        num += deriv.norm_sqr() * dd;
        mean += (mid.conj() * deriv).im * dd;
    }
    let step = (detunings[detunings.len() - 1] - detunings[0]) / (detunings.len() - 1) as f64;
    let t2 = num / (den * step);
    let t1 = mean / (den * step);
    (t2 - t1 * t1).max(0.0).sqrt()
}

/// Propagates the signal marginal √|A(Δ)|² through `medium` and reports the
/// RMS width of the synthesized temporal intensity.
pub fn classical_baseline(spectrum: &BiphotonSpectrum, medium: &DispersionProfile) -> Result<ClassicalPulse> {
    medium.validate()?;
    let d = spectrum.detunings();
    let limited: Vec<Complex64> = spectrum.amplitudes().iter().map(|a| Complex64::new(a.norm(), 0.0)).collect();
    let chirped: Vec<Complex64> =
        d.iter().zip(&limited).map(|(&x, &a)| a * Complex64::from_polar(1.0, medium.phase(x))).collect();
    let delay = medium.length * medium.beta[1];
    let span = 10.0 * moment_width(d, &chirped).max(moment_width(d, &limited));
    let times: Vec<f64> = (0..PULSE_SAMPLES)
        .map(|k| delay - span + 2.0 * span * k as f64 / (PULSE_SAMPLES - 1) as f64)
        .collect();
    let intensity = synthesize(d, &chirped, &times);
    let rms_width = rms(&times, &intensity);
    let lspan = 10.0 * moment_width(d, &limited);
    let ltimes: Vec<f64> = (0..PULSE_SAMPLES).map(|k| -lspan + 2.0 * lspan * k as f64 / (PULSE_SAMPLES - 1) as f64).collect();
    let transform_limited_width = rms(&ltimes, &synthesize(d, &limited, &ltimes));
    Ok(ClassicalPulse { times, intensity, rms_width, transform_limited_width })
}

/// Centroid, RMS width and kurtosis of |rate − baseline| over the scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeMoments {
    pub centroid: f64,
    pub rms_width: f64,
    pub kurtosis: f64,
}

pub fn envelope_moments(gram: &Interferogram) -> Result<EnvelopeMoments> {
    let w: Vec<f64> = gram.rates.iter().map(|r| (r - gram.baseline).abs()).collect();
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::FitFailure("interferogram has no envelope".into()));
    }
    let t = &gram.delays;
    let centroid = t.iter().zip(&w).map(|(t, w)| t * w).sum::<f64>() / total;
    let m2 = t.iter().zip(&w).map(|(t, w)| w * (t - centroid).powi(2)).sum::<f64>() / total;
    let m4 = t.iter().zip(&w).map(|(t, w)| w * (t - centroid).powi(4)).sum::<f64>() / total;
    Ok(EnvelopeMoments { centroid, rms_width: m2.sqrt(), kurtosis: m4 / (m2 * m2) })
}

/// Gaussian-envelope fit result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayEstimate {
    pub center: f64,
    pub stderr: f64,
    /// Envelope standard deviation.
    pub width: f64,
    /// Signed feature height (negative for a dip).
    pub amplitude: f64,
    pub offset: f64,
}

/// Relative noise floor assumed for noiseless data when forming the
/// standard error.
const FIT_NOISE_FLOOR: f64 = 1e-12;

/// Least-squares fit of `b + a·exp(−(τ − τ₀)²/(2w²))` by Levenberg-Marquardt.
pub fn extract_delay(gram: &Interferogram) -> Result<DelayEstimate> {
    let n = gram.delays.len();
    if n < 5 {
        return Err(Error::FitFailure("need at least 5 points".into()));
    }
    let t0 = gram.delays[0];
    let scale = gram.delays[n - 1] - t0;
    let x: Vec<f64> = gram.delays.iter().map(|t| (t - t0) / scale).collect();
    let y = &gram.rates;
    let ymax = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ymin = y.iter().copied().fold(f64::INFINITY, f64::min);
    if !(ymax - ymin > 1e-9 * ymax.abs().max(1e-300)) {
        return Err(Error::FitFailure("interferogram is featureless".into()));
    }
    let b0 = gram.baseline;
    let (k_ext, a0) = if (ymin - b0).abs() >= (ymax - b0).abs() {
        (y.iter().position(|&v| v == ymin).unwrap(), ymin - b0)
    } else {
        (y.iter().position(|&v| v == ymax).unwrap(), ymax - b0)
    };
    let moments = envelope_moments(gram)?;
    let mut p = Vector4::new(b0, a0, x[k_ext], (moments.rms_width / scale).max(2.0 / n as f64));

    let model = |p: &Vector4<f64>, xi: f64| {
        let z = (xi - p[2]) / p[3];
        let g = (-0.5 * z * z).exp();
        (p[0] + p[1] * g, Vector4::new(1.0, g, p[1] * g * z / p[3], p[1] * g * z * z / p[3]))
    };
    let rss_of = |p: &Vector4<f64>| x.iter().zip(y).map(|(&xi, &yi)| (yi - model(p, xi).0).powi(2)).sum::<f64>();

    let mut lambda = 1e-3;
    let mut rss = rss_of(&p);
    for _ in 0..500 {
        let mut jtj = Matrix4::zeros();
        let mut jtr = Vector4::zeros();
        for (&xi, &yi) in x.iter().zip(y) {
            let (f, j) = model(&p, xi);
            jtj += j * j.transpose();
            jtr += j * (yi - f);
        }
        let mut damped = jtj;
        for k in 0..4 {
            damped[(k, k)] *= 1.0 + lambda;
        }
        let Some(step) = damped.lu().solve(&jtr) else {
            return Err(Error::FitFailure("singular normal equations".into()));
        };
        let trial = p + step;
        let trial_rss = if trial[3] > 0.0 { rss_of(&trial) } else { f64::INFINITY };
        if trial_rss <= rss {
            let converged = step.norm() < 1e-15 * (1.0 + p.norm()) || rss - trial_rss <= 1e-30 + 1e-15 * rss;
            p = trial;
            rss = trial_rss;
            lambda = (lambda * 0.3).max(1e-12);
            if converged {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    let mut jtj = Matrix4::zeros();
    for &xi in &x {
        let (_, j) = model(&p, xi);
        jtj += j * j.transpose();
    }
    let floor = n as f64 * (FIT_NOISE_FLOOR * ymax.abs()).powi(2);
    let s2 = rss.max(floor) / (n as f64 - 4.0);
    let cov = jtj.try_inverse().ok_or_else(|| Error::FitFailure("fit covariance is singular".into()))?;
    let stderr = (s2 * cov[(2, 2)]).max(0.0).sqrt() * scale;
    if !p.iter().all(|v| v.is_finite()) {
        return Err(Error::FitFailure("fit diverged".into()));
    }
    Ok(DelayEstimate { center: t0 + p[2] * scale, stderr, width: p[3].abs() * scale, amplitude: p[1], offset: p[0] })
}

/// Symmetric delay grid of `points` values over ±`half_span`.
pub fn delay_grid(half_span: f64, points: usize) -> Vec<f64> {
    (0..points).map(|k| -half_span + 2.0 * half_span * k as f64 / (points - 1) as f64).collect()
}
