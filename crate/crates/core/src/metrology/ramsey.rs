use serde::Serialize;

use super::observables::observable_b;
use super::protocol::{phased_noon, propagate_uncertainty, EstimationResult, Fringe, Method, ResponseCurve};
use crate::error::{Error, Result};
use crate::fock::{expectation, variance_and_uncertainty, FockSpace, ModeLabel};

/// Ground and excited levels of the atoms.
const GROUND: ModeLabel = ModeLabel::level(0);
const EXCITED: ModeLabel = ModeLabel::level(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "atoms", rename_all = "kebab-case")]
pub enum RamseyProtocol {
    SingleAtom,
    /// N atoms sharing one excitation pattern, (|N,0⟩ + |0,N⟩)/√2.
    Entangled { n: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RamseyResult {
    /// Accumulated phase ωt per atom.
    pub phase: f64,
    /// Frequency estimate and Δω.
    pub estimation: EstimationResult,
}

/// Ramsey sequence mapped onto the interferometer: the free evolution adds
/// phase ωt per excited atom. The estimate inverts the fringe on its
/// principal branch, so it is only faithful for Nωt in (0, π).
pub fn ramsey_frequency_estimate(omega: f64, t: f64, protocol: RamseyProtocol) -> Result<RamseyResult> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter("free evolution time must be positive".into()));
    }
    let n = match protocol {
        RamseyProtocol::SingleAtom => 1,
        RamseyProtocol::Entangled { n } if n >= 1 => n,
        RamseyProtocol::Entangled { .. } => return Err(Error::InvalidParameter("need at least one atom".into())),
    };
    let phase = omega * t;
    let space = FockSpace::new([GROUND, EXCITED], n)?;
    let psi = phased_noon(space.clone(), GROUND, EXCITED, n, phase)?;
    let obs = observable_b(space, GROUND, EXCITED, n)?;
    let mean = expectation(&psi, &obs)?;
    let (_, delta_o) = variance_and_uncertainty(&psi, &obs)?;
    // Fringe in ω: cos(N t ω).
    let fringe = Fringe::Cosine { k: n as f64 * t };
    let uncertainty = propagate_uncertainty(&ResponseCurve::Known(fringe), delta_o, omega)?;
    let (estimate, clamped) = fringe.invert(mean);
    Ok(RamseyResult {
        phase,
        estimation: EstimationResult {
            estimate,
            uncertainty,
            resources: n as u64,
            method: Method::Analytic,
            mean_signal: mean,
            clamped,
            repetitions: 1,
            seed: None,
        },
    })
}
