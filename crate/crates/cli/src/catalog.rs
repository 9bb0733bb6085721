//! Listing of the available experiment kinds.

use crate::config::Kind;

pub struct Entry {
    pub kind: Kind,
    pub topic: &'static str,
    pub description: &'static str,
}

pub const ENTRIES: [Entry; 7] = [
    Entry { kind: Kind::SqlScaling, topic: "phase", description: "single-photon Mach-Zehnder, Δφ against trials (seed required)" },
    Entry { kind: Kind::HeisenbergScaling, topic: "phase", description: "NOON interferometry, Δφ against photon number (seed required)" },
    Entry { kind: Kind::Angular, topic: "rotation", description: "OAM angular fringe and Δθ from the two-photon readout" },
    Entry { kind: Kind::Spiral, topic: "imaging", description: "spiral spectrum of an object, rotation test and symmetry order" },
    Entry { kind: Kind::Doppler, topic: "rotation", description: "rotational Doppler beat frequencies over a grid of l and Ω" },
    Entry { kind: Kind::Dispersion, topic: "timing", description: "biphoton interferograms with dispersion, classical baseline" },
    Entry { kind: Kind::Ramsey, topic: "frequency", description: "Ramsey frequency estimation with N entangled atoms" },
];

pub fn render() -> String {
    let mut out = String::new();
    for e in &ENTRIES {
        out.push_str(&format!("{:<20} {:<10} {}\n", e.kind.name(), e.topic, e.description));
    }
    out
}
