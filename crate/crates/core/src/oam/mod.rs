//! Laguerre-Gauss modes and orbital-angular-momentum measurements: digital
//! and correlated spiral imaging, symmetry detection, rotational Doppler.
//!
//! Modes carry the azimuthal factor `e^{−ilθ}`, so the spiral coefficient
//! `a_{lp} = ∬ u*_{lp} f r dr dθ` of an object rotated by θ₀ (f'(θ) = f(θ − θ₀))
//! picks up `e^{+ilθ₀}`.

mod doppler;
mod grid;
mod lg;
mod spiral;

pub use doppler::{rotational_doppler_beat, DopplerMeasurement};
pub use grid::{ObjectProfile, PolarGrid, DEFAULT_ANGULAR_NODES, DEFAULT_RADIAL_NODES, DEFAULT_RADIAL_EXTENT};
pub use lg::{laguerre, lg_amplitude, radial_node_count, LgModeSpec};
pub use spiral::{
    correlated_phases, detect_rotational_symmetry, project_object, rotate_object, CorrelatedChannel,
    CorrelatedSpectrum, LgBasis, SpiralSpectrum, Symmetry, SIGNIFICANT_POWER,
};
