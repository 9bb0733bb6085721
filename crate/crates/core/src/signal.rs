//! Spectral peak finding for uniformly sampled real signals.

use std::f64::consts::PI;

use rustfft::FftPlanner;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dominant spectral component of a sampled signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPeak {
    /// Cycles per unit of the sample spacing.
    pub frequency: f64,
    /// Resolution of the unpadded transform, 1/(n·dt).
    pub bin_width: f64,
    /// Peak magnitude relative to the largest non-peak bin outside the main lobe.
    pub contrast: f64,
}

pub fn hann(n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![1.0; n];
    }
    (0..n).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos()).collect()
}

/// Locates the strongest non-DC component. The mean is removed, a Hann
/// window applied, the record zero-padded by `pad_factor`, and the peak
/// refined by a parabola through the log magnitudes of the three top bins.
pub fn dominant_frequency(samples: &[f64], dt: f64, pad_factor: usize) -> Result<SpectralPeak> {
    let n = samples.len();
    if n < 8 {
        return Err(Error::Undersampled(format!("{n} samples are too few for a spectral estimate")));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter("sample spacing must be positive".into()));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let window = hann(n);
    let padded = (n * pad_factor.max(1)).next_power_of_two();
    let mut buf: Vec<Complex64> = samples.iter().zip(&window).map(|(s, w)| Complex64::new((s - mean) * w, 0.0)).collect();
    buf.resize(padded, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(padded).process(&mut buf);

    let mags: Vec<f64> = buf[..padded / 2 + 1].iter().map(|c| c.norm()).collect();
    let (k, &peak) = mags
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::FitFailure("empty spectrum".into()))?;
    if peak <= 0.0 {
        return Err(Error::FitFailure("signal has no oscillating component".into()));
    }
    let delta = if k + 1 < mags.len() && mags[k - 1] > 0.0 && mags[k + 1] > 0.0 {
        let (a, b, c) = (mags[k - 1].ln(), peak.ln(), mags[k + 1].ln());
        let denom = a - 2.0 * b + c;
        if denom.abs() > 0.0 { 0.5 * (a - c) / denom } else { 0.0 }
    } else {
        0.0
    };
    // Hann main lobe spans two unpadded bins either side.
    let lobe = 2 * padded / n + 1;
    let side = mags
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(i, _)| i.abs_diff(k) > lobe)
        .map(|(_, m)| *m)
        .fold(0.0, f64::max);
    Ok(SpectralPeak {
        frequency: (k as f64 + delta) / (padded as f64 * dt),
        bin_width: 1.0 / (n as f64 * dt),
        contrast: if side > 0.0 { peak / side } else { f64::INFINITY },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_off_bin_tone() {
        let dt = 0.01;
        let f = 7.3;
        let s: Vec<f64> = (0..1000).map(|i| 2.0 + (2.0 * PI * f * i as f64 * dt).cos()).collect();
        let p = dominant_frequency(&s, dt, 8).unwrap();
        assert!((p.frequency - f).abs() < 0.01 * p.bin_width, "{}", p.frequency);
    }

    #[test]
    fn flat_signal_fails() {
        assert!(dominant_frequency(&[1.0; 64], 1.0, 4).is_err());
    }
}
