//! Simulation of quantum-enhanced sensing protocols in a truncated Fock space.
//!
//! * [`fock`]: sparse multimode states, operators and Schmidt decomposition.
//! * [`elements`]: beam splitters, phase shifters, Dove prisms.
//! * [`sources`]: single photons, coherent and NOON states, down-conversion pairs.
//! * [`metrology`]: phase and angle estimation, Monte Carlo, scaling fits.
//! * [`oam`]: Laguerre-Gauss modes, spiral imaging, rotational Doppler.
//! * [`dispersion`]: biphoton interferometry in dispersive media.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod elements;
pub mod error;
pub mod fock;
pub mod metrology;
pub mod oam;
pub mod signal;
pub mod sources;

pub use dispersion::{Arms, Configuration, DispersionProfile, Geometry, Interferogram};
pub use elements::{ElementSpec, Interferometer};
pub use error::{Error, Result};
pub use fock::{BasisState, FockSpace, ModeKind, ModeLabel, Observable, StateVector};
pub use metrology::{EstimationResult, Method, Protocol, ScalingFit};
pub use num_complex::Complex64;
pub use oam::{LgBasis, LgModeSpec, ObjectProfile, SpiralSpectrum};
pub use sources::BiphotonSpectrum;
