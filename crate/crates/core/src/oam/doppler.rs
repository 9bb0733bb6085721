use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::signal::dominant_frequency;

/// Minimum record length in beat periods.
const MIN_BEAT_PERIODS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DopplerMeasurement {
    /// Beat angular frequency, rad/s.
    pub beat: f64,
    /// One DFT bin, 2π/duration, rad/s.
    pub resolution: f64,
    /// Set when the body is static and no beat exists.
    pub no_beat: bool,
}

/// Two photons of charge ±l reflected from a body rotating at `omega_rot`
/// acquire frequencies ω ± lΩ. The summed field is sampled for `duration`
/// seconds at `sample_rate` Hz and the beat read from the intensity spectrum.
pub fn rotational_doppler_beat(
    l: i32,
    omega_rot: f64,
    carrier: f64,
    duration: f64,
    sample_rate: f64,
) -> Result<DopplerMeasurement> {
    if !(duration > 0.0) || !(sample_rate > 0.0) || !carrier.is_finite() || !omega_rot.is_finite() {
        return Err(Error::InvalidParameter("duration and sample rate must be positive".into()));
    }
    let resolution = 2.0 * PI / duration;
    let expected = 2.0 * (l as f64 * omega_rot).abs();
    if expected == 0.0 {
        return Ok(DopplerMeasurement { beat: 0.0, resolution, no_beat: true });
    }
    let beat_hz = expected / (2.0 * PI);
    if sample_rate <= 2.0 * beat_hz {
        return Err(Error::Undersampled(format!(
            "{sample_rate} Hz does not resolve a {beat_hz} Hz beat; need more than {}",
            2.0 * beat_hz
        )));
    }
    if duration * beat_hz < MIN_BEAT_PERIODS {
        return Err(Error::Undersampled(format!(
            "{duration} s covers {:.2} beat periods; need {MIN_BEAT_PERIODS}",
            duration * beat_hz
        )));
    }
    let n = (duration * sample_rate).round() as usize;
    let dt = 1.0 / sample_rate;
    let shift = l as f64 * omega_rot;
    let intensity: Vec<f64> = (0..n)
        .map(|k| {
            let t = k as f64 * dt;
            let carrier_phase = Complex64::from_polar(1.0, (carrier * t).rem_euclid(2.0 * PI));
            let field = carrier_phase * (Complex64::from_polar(1.0, shift * t) + Complex64::from_polar(1.0, -shift * t));
            field.norm_sqr()
        })
        .collect();
    let peak = dominant_frequency(&intensity, dt, 8)?;
    Ok(DopplerMeasurement { beat: 2.0 * PI * peak.frequency, resolution, no_beat: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beat_is_twice_l_omega() {
        let m = rotational_doppler_beat(10, 0.5, 3.0e3, 60.0, 50.0).unwrap();
        assert!((m.beat - 10.0).abs() < m.resolution, "{m:?}");
    }

    #[test]
    fn static_body() {
        let m = rotational_doppler_beat(3, 0.0, 1.0, 1.0, 10.0).unwrap();
        assert!(m.no_beat && m.beat == 0.0);
    }

    #[test]
    fn undersampled() {
        assert!(matches!(rotational_doppler_beat(10, 5.0, 0.0, 100.0, 10.0), Err(Error::Undersampled(_))));
        assert!(matches!(rotational_doppler_beat(1, 0.1, 0.0, 5.0, 100.0), Err(Error::Undersampled(_))));
    }
}
