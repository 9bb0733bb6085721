//! Benchmark fixtures shared by the criterion targets.

use std::sync::Arc;

use qsensing_core::elements::{build_interferometer, ElementSpec};
use qsensing_core::oam::{LgBasis, ObjectProfile, PolarGrid};
use qsensing_core::{BasisState, Complex64, FockSpace, Interferometer, ModeLabel, StateVector};

/// `photons` photons spread over the first modes of an `m`-path space.
pub fn spread_state(m: i32, photons: u32) -> StateVector {
    let modes: Vec<ModeLabel> = (0..m).map(ModeLabel::path).collect();
    let space = FockSpace::new(modes.clone(), photons).expect("space");
    let occ = (0..photons).map(|k| (modes[k as usize % modes.len()], 1));
    let mut counts = std::collections::BTreeMap::new();
    for (mode, n) in occ {
        *counts.entry(mode).or_insert(0) += n;
    }
    StateVector::basis(space, BasisState::from_occupations(counts)).expect("state")
}

/// Nearest-neighbour splitter mesh with a phase on every path, `layers` deep.
pub fn mesh(space: Arc<FockSpace>, layers: usize) -> Interferometer {
    let modes = space.modes().to_vec();
    let mut elements = Vec::new();
    for layer in 0..layers {
        for (k, &mode) in modes.iter().enumerate() {
            elements.push(ElementSpec::phase_shift(mode, 0.1 * (k + layer) as f64).expect("phase"));
        }
        for k in (layer % 2..modes.len().saturating_sub(1)).step_by(2) {
            elements.push(ElementSpec::beam_splitter(modes[k], modes[k + 1], 0.3 + 0.05 * k as f64).expect("splitter"));
        }
    }
    build_interferometer(space, elements).expect("interferometer")
}

pub fn letter_object() -> (ObjectProfile, LgBasis) {
    let basis = LgBasis::at_waist(1.0, 0.8, 10, 3);
    let grid = PolarGrid::for_waist(basis.w0).expect("grid");
    (ObjectProfile::letter(grid, 'F', 2.5).expect("object"), basis)
}

pub fn unit() -> Complex64 {
    Complex64::new(1.0, 0.0)
}
