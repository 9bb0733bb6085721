use std::f64::consts::PI;
use std::fmt::Write as _;
use std::num::NonZeroUsize;
use std::path::Path;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use super::lg::{lg_amplitude, LgModeSpec};
use crate::error::{Error, Result};

pub const DEFAULT_RADIAL_NODES: usize = 128;
pub const DEFAULT_ANGULAR_NODES: usize = 256;
/// Radial extent in units of the beam waist.
pub const DEFAULT_RADIAL_EXTENT: f64 = 6.0;

const PASSIVE_TOLERANCE: f64 = 1e-12;

/// Gauss-Legendre radii on [0, r_max] × equally spaced angles θ_j = 2πj/n_θ.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    r_max: f64,
    radii: Vec<f64>,
    /// Quadrature weights for ∫ g(r) r dr, the Jacobian included.
    radial_weights: Vec<f64>,
    n_theta: usize,
}

impl PolarGrid {
    pub fn new(n_r: usize, n_theta: usize, r_max: f64) -> Result<Self> {
        let nr = NonZeroUsize::new(n_r).ok_or_else(|| Error::InvalidParameter("need radial nodes".into()))?;
        if n_theta < 2 || !(r_max > 0.0) {
            return Err(Error::InvalidParameter("need ≥ 2 angular nodes and r_max > 0".into()));
        }
        let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(nr).as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let half = 0.5 * r_max;
        let radii: Vec<f64> = pairs.iter().map(|(x, _)| half * (x + 1.0)).collect();
        let radial_weights = pairs.iter().zip(&radii).map(|((_, w), r)| half * w * r).collect();
        Ok(Self { r_max, radii, radial_weights, n_theta })
    }

    /// Default quadrature for beams of waist `w0`.
    pub fn for_waist(w0: f64) -> Result<Self> {
        Self::new(DEFAULT_RADIAL_NODES, DEFAULT_ANGULAR_NODES, DEFAULT_RADIAL_EXTENT * w0)
    }

    pub fn n_r(&self) -> usize {
        self.radii.len()
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    pub fn angular_weight(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    /// ∬ g r dr dθ over samples laid out radial-major.
    pub fn integrate(&self, samples: &[Complex64]) -> Complex64 {
        let dtheta = self.angular_weight();
        self.radial_weights
            .iter()
            .enumerate()
            .map(|(i, w)| samples[i * self.n_theta..(i + 1) * self.n_theta].iter().sum::<Complex64>() * (w * dtheta))
            .sum()
    }
}

/// Complex transmission of a passive object sampled on a [`PolarGrid`],
/// radial-major (`index = i_r · n_θ + i_θ`).
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectProfile {
    grid: PolarGrid,
    values: Vec<Complex64>,
}

impl ObjectProfile {
    pub fn new(grid: PolarGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_r() * grid.n_theta() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a {}×{} grid",
                values.len(),
                grid.n_r(),
                grid.n_theta()
            )));
        }
        let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !peak.is_finite() || peak > 1.0 + PASSIVE_TOLERANCE {
            return Err(Error::NotPassive(peak));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: PolarGrid, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.n_r() * grid.n_theta());
        for &r in grid.radii() {
            for j in 0..grid.n_theta() {
                values.push(f(r, grid.theta(j)));
            }
        }
        Self::new(grid, values)
    }

    /// Uniform transmitting disk of radius `radius`.
    pub fn disk(grid: PolarGrid, radius: f64) -> Result<Self> {
        Self::from_fn(grid, |r, _| Complex64::new(if r <= radius { 1.0 } else { 0.0 }, 0.0))
    }

    /// Opaque screen with a letter-shaped opening drawn from bars on a
    /// 5×5 cell raster spanning `size`. Supported: L, T, E, F.
    pub fn letter(grid: PolarGrid, letter: char, size: f64) -> Result<Self> {
        let cells: &[(usize, usize, usize, usize)] = match letter.to_ascii_uppercase() {
            // (col0, row0, col1, row1) inclusive, row 0 at the top.
            'L' => &[(0, 0, 0, 4), (0, 4, 4, 4)],
            'T' => &[(0, 0, 4, 0), (2, 0, 2, 4)],
            'E' => &[(0, 0, 0, 4), (0, 0, 4, 0), (0, 2, 3, 2), (0, 4, 4, 4)],
            'F' => &[(0, 0, 0, 4), (0, 0, 4, 0), (0, 2, 3, 2)],
            _ => return Err(Error::InvalidParameter(format!("no mask for letter {letter:?}"))),
        };
        let cell = size / 5.0;
        Self::from_fn(grid, |r, t| {
            let (x, y) = (r * t.cos(), r * t.sin());
            let col = ((x + size / 2.0) / cell).floor();
            let row = ((size / 2.0 - y) / cell).floor();
            let inside = (0.0..5.0).contains(&col)
                && (0.0..5.0).contains(&row)
                && cells.iter().any(|&(c0, r0, c1, r1)| {
                    (c0 as f64..=c1 as f64).contains(&col) && (r0 as f64..=r1 as f64).contains(&row)
                });
            Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        })
    }

    /// Σ c_k u_k for LG modes `terms`.
    pub fn lg_superposition(grid: PolarGrid, terms: &[(LgModeSpec, Complex64)]) -> Result<Self> {
        Self::from_fn(grid, |r, t| terms.iter().map(|(s, c)| c * lg_amplitude(s, r, t)).sum())
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Samples of ring `i`.
    pub fn ring(&self, i: usize) -> &[Complex64] {
        let n = self.grid.n_theta();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn norm_sqr(&self) -> f64 {
        let sq: Vec<Complex64> = self.values.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect();
        self.grid.integrate(&sq).re
    }

    /// Same grid, new samples. Skips the passivity check: band-limited
    /// resampling of sharp masks overshoots slightly.
    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::GridMismatch("sample count changed".into()));
        }
        Ok(Self { grid: self.grid.clone(), values })
    }

    /// Header `n_r n_theta r_max`, then one `re,im` row per sample,
    /// radial-major. Radii are the Gauss-Legendre nodes of the grid.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {:e}\n", self.grid.n_r(), self.grid.n_theta(), self.grid.r_max());
        for v in &self.values {
            let _ = writeln!(out, "{:e},{:e}", v.re, v.im);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty profile".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("header {header:?}: expected `n_r n_theta r_max`")));
        }
        let bad = |what: &str| Error::Parse(format!("header field {what} is invalid"));
        let n_r: usize = fields[0].parse().map_err(|_| bad("n_r"))?;
        let n_theta: usize = fields[1].parse().map_err(|_| bad("n_theta"))?;
        let r_max: f64 = fields[2].parse().map_err(|_| bad("r_max"))?;
        let grid = PolarGrid::new(n_r, n_theta, r_max)?;
        let mut values = Vec::with_capacity(n_r * n_theta);
        for (k, line) in lines.enumerate() {
            let (re, im) = line.split_once(',').ok_or_else(|| Error::Parse(format!("sample {k}: expected re,im")))?;
            let re: f64 = re.trim().parse().map_err(|_| Error::Parse(format!("sample {k}: bad real part")))?;
            let im: f64 = im.trim().parse().map_err(|_| Error::Parse(format!("sample {k}: bad imaginary part")))?;
            values.push(Complex64::new(re, im));
        }
        Self::new(grid, values)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}
