use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::observables::{observable_a, observable_b, observable_r};
use crate::elements::{build_interferometer, ElementSpec};
use crate::error::{Error, Result};
use crate::fock::{expectation, variance_and_uncertainty, BasisState, FockSpace, ModeLabel, Observable, StateVector};
use crate::signal::dominant_frequency;
use crate::sources::{noon_state, spdc_oam_pair, SpdcOamSpectrum, IDLER, SIGNAL};

/// Below this |d⟨O⟩/dx| the working point is treated as stationary.
pub const DERIVATIVE_FLOOR: f64 = 1e-8;

/// Largest two-photon fringe visibility reachable with classical light.
pub const CLASSICAL_VISIBILITY_BOUND: f64 = std::f64::consts::FRAC_1_SQRT_2;

const NUMERIC_STEP: f64 = 1e-6;

/// Closed-form mean signal as a function of the parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Fringe {
    /// cos(kx)
    Cosine { k: f64 },
    /// cos²(kx)
    CosineSquared { k: f64 },
}

impl Fringe {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Fringe::Cosine { k } => (k * x).cos(),
            Fringe::CosineSquared { k } => (k * x).cos().powi(2),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Fringe::Cosine { k } => -k * (k * x).sin(),
            Fringe::CosineSquared { k } => -k * (2.0 * k * x).sin(),
        }
    }

    /// Principal-branch inverse; the parameter is assumed to lie in (0, π/(2k))
    /// for cos² and (0, π/k) for cos. Returns the estimate and whether the
    /// mean had to be clamped into the domain.
    pub fn invert(&self, mean: f64) -> (f64, bool) {
        match *self {
            Fringe::Cosine { k } => {
                let c = mean.clamp(-1.0, 1.0);
                (c.acos() / k, c != mean)
            }
            Fringe::CosineSquared { k } => {
                let c = mean.clamp(0.0, 1.0);
                (c.sqrt().acos() / k, c != mean)
            }
        }
    }

    /// Point of steepest slope inside the principal branch.
    pub fn working_point(&self) -> f64 {
        match *self {
            Fringe::Cosine { k } => FRAC_PI_2 / k,
            Fringe::CosineSquared { k } => FRAC_PI_4 / k,
        }
    }
}

/// Mean-signal curve handed to [`propagate_uncertainty`].
pub enum ResponseCurve<'a> {
    Known(Fringe),
    /// Differentiated numerically by central difference.
    Numeric(&'a dyn Fn(f64) -> f64),
}

/// Δx = ΔO / |d⟨O⟩/dx|.
pub fn propagate_uncertainty(curve: &ResponseCurve<'_>, delta_o: f64, x: f64) -> Result<f64> {
    let d = match curve {
        ResponseCurve::Known(f) => f.derivative(x),
        ResponseCurve::Numeric(f) => (f(x + NUMERIC_STEP) - f(x - NUMERIC_STEP)) / (2.0 * NUMERIC_STEP),
    };
    if !(d.abs() >= DERIVATIVE_FLOOR) {
        return Err(Error::StationaryPoint { derivative: d });
    }
    Ok(delta_o / d.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationResult {
    pub estimate: f64,
    pub uncertainty: f64,
    /// Photons for analytic results, trials per repetition for sampled ones.
    pub resources: u64,
    pub method: Method,
    /// ⟨O⟩ for analytic results, the mean sampled outcome otherwise.
    pub mean_signal: f64,
    /// Set when some sampled mean fell outside the estimator's domain.
    pub clamped: bool,
    pub repetitions: u32,
    pub seed: Option<u64>,
}

impl EstimationResult {
    /// Uncertainty of a single trial, Δ·√ν.
    pub fn per_trial(&self) -> f64 {
        self.uncertainty * (self.resources as f64).sqrt()
    }
}

/// Measurement schemes, each a state preparation, a parameter-dependent
/// apparatus and a readout observable.
///
/// * `SinglePhotonMz`: one photon split over two paths, phase φ on the upper
///   path, Â readout. ⟨Â⟩ = cos φ.
/// * `Noon`: (|N,0⟩ + |0,N⟩)/√2, phase φ per photon on one path, B̂_N
///   readout. ⟨B̂_N⟩ = cos Nφ.
/// * `AngularPair`: OAM-filtered down-conversion pair (charges ±l), Dove
///   prism at θ on the signal arm, fixed prism at π/(4l) on the idler arm,
///   balanced splitters mixing equal charges, R̂ readout. ⟨R̂⟩ = cos²(2lθ).
/// * `OamNoon`: N photons of charge l in one of two arms,
///   (|N⟩_signal + |N⟩_idler)/√2, Dove prism at θ on the signal arm and at 0
///   on the idler arm, readout projector onto (|N⟩_signal + |N⟩_idler)/√2 at
///   charge −l. Mean cos²(Nlθ); equals `AngularPair` at N = 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "protocol", rename_all = "kebab-case")]
pub enum Protocol {
    SinglePhotonMz,
    Noon { n: u32 },
    AngularPair { l: i32 },
    OamNoon { n: u32, l: i32 },
}

pub(crate) const LOWER: ModeLabel = ModeLabel::path(0);
pub(crate) const UPPER: ModeLabel = ModeLabel::path(1);

/// Phased two-mode NOON state (|N,0⟩ + e^{iNφ}|0,N⟩)/√2.
pub(crate) fn phased_noon(space: Arc<FockSpace>, a: ModeLabel, b: ModeLabel, n: u32, phi: f64) -> Result<StateVector> {
    let psi = noon_state(space, a, b, n)?;
    ElementSpec::phase_shift(b, phi)?.apply(&psi)
}

impl Protocol {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Protocol::SinglePhotonMz => Ok(()),
            Protocol::Noon { n } | Protocol::OamNoon { n, .. } if n == 0 => {
                Err(Error::InvalidParameter("photon number must be at least 1".into()))
            }
            Protocol::AngularPair { l } | Protocol::OamNoon { l, .. } if l <= 0 => {
                Err(Error::InvalidParameter("OAM charge must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    /// Entangled photons consumed per trial.
    pub fn photons(&self) -> u32 {
        match *self {
            Protocol::SinglePhotonMz => 1,
            Protocol::Noon { n } | Protocol::OamNoon { n, .. } => n,
            Protocol::AngularPair { .. } => 2,
        }
    }

    pub fn fringe(&self) -> Fringe {
        match *self {
            Protocol::SinglePhotonMz => Fringe::Cosine { k: 1.0 },
            Protocol::Noon { n } => Fringe::Cosine { k: n as f64 },
            Protocol::AngularPair { l } => Fringe::CosineSquared { k: 2.0 * l as f64 },
            Protocol::OamNoon { n, l } => Fringe::CosineSquared { k: (n as i64 * l as i64) as f64 },
        }
    }

    pub fn working_point(&self) -> f64 {
        self.fringe().working_point()
    }

    /// Builds the Fock space and readout observable once for repeated use.
    pub fn setup(&self) -> Result<ProtocolSetup> {
        self.validate()?;
        let (space, observable) = match *self {
            Protocol::SinglePhotonMz => {
                let space = FockSpace::new([LOWER, UPPER], 1)?;
                (space.clone(), observable_a(space)?)
            }
            Protocol::Noon { n } => {
                let space = FockSpace::new([LOWER, UPPER], n)?;
                (space.clone(), observable_b(space, LOWER, UPPER, n)?)
            }
            Protocol::AngularPair { l } => {
                let modes = [l, -l].into_iter().flat_map(|q| [ModeLabel::oam(SIGNAL, q), ModeLabel::oam(IDLER, q)]);
                let space = FockSpace::new(modes, 2)?;
                (space.clone(), observable_r(space, (SIGNAL, IDLER), l)?)
            }
            Protocol::OamNoon { n, l } => {
                let modes = [l, -l].into_iter().flat_map(|q| [ModeLabel::oam(SIGNAL, q), ModeLabel::oam(IDLER, q)]);
                let space = FockSpace::new(modes, n)?;
                let target = StateVector::from_amplitudes(
                    space.clone(),
                    [
                        (BasisState::from_occupations([(ModeLabel::oam(SIGNAL, -l), n)]), Complex64::new(1.0, 0.0)),
                        (BasisState::from_occupations([(ModeLabel::oam(IDLER, -l), n)]), Complex64::new(1.0, 0.0)),
                    ],
                )?;
                (space, Observable::projector(&target))
            }
        };
        Ok(ProtocolSetup { protocol: *self, space, observable })
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolSetup {
    protocol: Protocol,
    space: Arc<FockSpace>,
    observable: Observable,
}

impl ProtocolSetup {
    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        &self.space
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    /// Output state for parameter value `x` (phase or prism angle).
    pub fn state(&self, x: f64) -> Result<StateVector> {
        let space = self.space.clone();
        match self.protocol {
            Protocol::SinglePhotonMz => phased_noon(space, LOWER, UPPER, 1, x),
            Protocol::Noon { n } => phased_noon(space, LOWER, UPPER, n, x),
            Protocol::AngularPair { l } => {
                let spectrum = SpdcOamSpectrum::new([(l, Complex64::new(1.0, 0.0)), (-l, Complex64::new(1.0, 0.0))])?;
                let pair = spdc_oam_pair(space.clone(), &spectrum)?;
                let mut elements = vec![
                    ElementSpec::dove_prism(SIGNAL, x)?,
                    ElementSpec::dove_prism(IDLER, PI / (4.0 * l as f64))?,
                ];
                for q in [l, -l] {
                    elements.push(ElementSpec::balanced_splitter(ModeLabel::oam(SIGNAL, q), ModeLabel::oam(IDLER, q))?);
                }
                build_interferometer(space, elements)?.apply_sequential(&pair)
            }
            Protocol::OamNoon { n, l } => {
                let psi = noon_state(space.clone(), ModeLabel::oam(SIGNAL, l), ModeLabel::oam(IDLER, l), n)?;
                let elements = vec![ElementSpec::dove_prism(SIGNAL, x)?, ElementSpec::dove_prism(IDLER, 0.0)?];
                build_interferometer(space, elements)?.apply_sequential(&psi)
            }
        }
    }

    pub fn expectation(&self, x: f64) -> Result<f64> {
        expectation(&self.state(x)?, &self.observable)
    }

    /// (⟨O⟩, ΔO) at `x`.
    pub fn moments(&self, x: f64) -> Result<(f64, f64)> {
        let psi = self.state(x)?;
        let mean = expectation(&psi, &self.observable)?;
        let (_, delta) = variance_and_uncertainty(&psi, &self.observable)?;
        Ok((mean, delta))
    }
}

/// Error-propagation estimate at `x` from `trials` independent repetitions,
/// using ΔO from the simulated state and the closed-form fringe slope.
pub fn analytic_estimate(protocol: Protocol, x: f64, trials: u64) -> Result<EstimationResult> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let setup = protocol.setup()?;
    let (mean, delta_o) = setup.moments(x)?;
    let fringe = protocol.fringe();
    let single = propagate_uncertainty(&ResponseCurve::Known(fringe), delta_o, x)?;
    let (estimate, clamped) = fringe.invert(mean);
    Ok(EstimationResult {
        estimate,
        uncertainty: single / (trials as f64).sqrt(),
        resources: trials,
        method: Method::Analytic,
        mean_signal: mean,
        clamped,
        repetitions: 1,
        seed: None,
    })
}

/// Period of a fringe sampled on a uniform grid, from the dominant DFT peak.
pub fn fringe_period(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 8 {
        return Err(Error::GridMismatch("fringe needs matching grids of at least 8 points".into()));
    }
    let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    if xs.windows(2).any(|w| ((w[1] - w[0]) - dx).abs() > 1e-9 * dx.abs().max(1.0)) {
        return Err(Error::DegenerateGrid("fringe grid must be uniform".into()));
    }
    let peak = dominant_frequency(ys, dx, 64)?;
    Ok(1.0 / peak.frequency)
}

/// (max − min)/(max + min).
pub fn fringe_visibility(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if max + min == 0.0 { 0.0 } else { (max - min) / (max + min) }
}
