use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One Laguerre-Gauss mode u_{lp} at propagation distance `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LgModeSpec {
    pub l: i32,
    pub p: u32,
    pub w0: f64,
    pub wavelength: f64,
    pub z: f64,
}

impl LgModeSpec {
    pub fn new(l: i32, p: u32, w0: f64, wavelength: f64, z: f64) -> Result<Self> {
        if !(w0 > 0.0) || !(wavelength > 0.0) || !z.is_finite() {
            return Err(Error::InvalidParameter("LG mode needs w0 > 0, wavelength > 0, finite z".into()));
        }
        Ok(Self { l, p, w0, wavelength, z })
    }

    /// Mode at the waist.
    pub fn at_waist(l: i32, p: u32, w0: f64, wavelength: f64) -> Result<Self> {
        Self::new(l, p, w0, wavelength, 0.0)
    }

    pub fn rayleigh_range(&self) -> f64 {
        PI * self.w0 * self.w0 / self.wavelength
    }

    /// w(z) = w₀√(1 + (z/z_R)²).
    pub fn beam_radius(&self) -> f64 {
        let zr = self.rayleigh_range();
        self.w0 * (1.0 + (self.z / zr).powi(2)).sqrt()
    }

    pub fn normalization(&self) -> f64 {
        let la = self.l.unsigned_abs();
        let ln_ratio: f64 = (self.p + 1..=self.p + la).map(|k| (k as f64).ln()).sum();
        (2.0 / PI * (-ln_ratio).exp()).sqrt()
    }

    /// Everything except the azimuthal factor.
    pub fn radial(&self, r: f64) -> Complex64 {
        let la = self.l.unsigned_abs();
        let w = self.beam_radius();
        let zr = self.rayleigh_range();
        let x = 2.0 * r * r / (w * w);
        let amp = self.normalization() / w
            * (2f64.sqrt() * r / w).powi(la as i32)
            * (-r * r / (w * w)).exp()
            * laguerre(self.p, la as f64, x);
        let k = 2.0 * PI / self.wavelength;
        let curvature = -k * r * r * self.z / (2.0 * (self.z * self.z + zr * zr));
        let gouy = (2 * self.p + la + 1) as f64 * (self.z / zr).atan();
        Complex64::from_polar(amp, curvature + gouy)
    }
}

/// Associated Laguerre polynomial L_p^α(x) by upward recurrence.
pub fn laguerre(p: u32, alpha: f64, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 + alpha - x);
    if p == 0 {
        return prev;
    }
    for k in 1..p {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// u_{lp}(r, θ, z).
pub fn lg_amplitude(spec: &LgModeSpec, r: f64, theta: f64) -> Complex64 {
    spec.radial(r) * Complex64::from_polar(1.0, -(spec.l as f64) * theta)
}

/// Dark rings of |u|² away from the axis, counted numerically from sign
/// changes of the radial amplitude at the waist, plus whether the axis
/// itself is dark. Returns `(rings, axis_dark)`.
pub fn radial_node_count(spec: &LgModeSpec) -> (usize, bool) {
    let waist = LgModeSpec { z: 0.0, ..*spec };
    let steps = 20_000;
    let r_max = 6.0 * spec.w0 * (1.0 + spec.p as f64).sqrt();
    let mut rings = 0;
    let mut last = waist.radial(r_max / steps as f64).re;
    for i in 2..=steps {
        let v = waist.radial(r_max * i as f64 / steps as f64).re;
        if v != 0.0 && last != 0.0 && v.signum() != last.signum() {
            rings += 1;
        }
        if v != 0.0 {
            last = v;
        }
    }
    (rings, waist.radial(0.0).norm() == 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_peak() {
        let s = LgModeSpec::at_waist(0, 0, 1.5, 0.8).unwrap();
        let v = lg_amplitude(&s, 0.0, 0.3);
        assert!((v.re - (2.0 / PI).sqrt() / 1.5).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn vortex_on_axis_and_phase_only_azimuth() {
        for l in [-3, -1, 1, 4] {
            let s = LgModeSpec::new(l, 1, 1.0, 0.5, 0.7).unwrap();
            assert_eq!(lg_amplitude(&s, 0.0, 1.0).norm(), 0.0);
            let a = lg_amplitude(&s, 0.6, 0.0).norm();
            let b = lg_amplitude(&s, 0.6, 2.1).norm();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn laguerre_closed_forms() {
        let x = 0.37;
        assert!((laguerre(1, 2.0, x) - (3.0 - x)).abs() < 1e-15);
        assert!((laguerre(2, 0.0, x) - (x * x - 4.0 * x + 2.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn dark_rings_equal_radial_index() {
        for p in 0..4 {
            for l in [0, 2] {
                let (rings, axis) = radial_node_count(&LgModeSpec::at_waist(l, p, 1.0, 1.0).unwrap());
                assert_eq!(rings, p as usize);
                assert_eq!(axis, l != 0);
            }
        }
    }

    #[test]
    fn invalid_waist() {
        assert!(LgModeSpec::new(0, 0, 0.0, 1.0, 0.0).is_err());
    }
}
