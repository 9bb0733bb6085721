//! Experiment kinds: parameters, execution and post-run invariant checks.

use std::f64::consts::PI;
use std::path::PathBuf;

use qsensing_core::dispersion::{
    classical_baseline, delay_grid, envelope_moments, extract_delay, franson_interferogram, hom_interferogram,
    skc_interferogram, Arms, DispersionProfile, Geometry, Interferogram,
};
use qsensing_core::metrology::{
    analytic_estimate, fit_scaling, fringe_visibility, ramsey_frequency_estimate, scaling_experiment,
    Protocol, RamseyProtocol, ScalingFamily, CLASSICAL_VISIBILITY_BOUND,
};
use qsensing_core::oam::{
    correlated_phases, detect_rotational_symmetry, project_object, rotate_object, rotational_doppler_beat, LgBasis,
    LgModeSpec, ObjectProfile, PolarGrid, Symmetry, DEFAULT_ANGULAR_NODES, DEFAULT_RADIAL_EXTENT,
    DEFAULT_RADIAL_NODES,
};
use qsensing_core::sources::BiphotonSpectrum;
use qsensing_core::{Complex64, Error};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Kind};
use crate::output::{int, num, ResultBundle, Table};
use crate::CliError;

/// Maps library errors: bad inputs are configuration errors, the rest are
/// numerical failures.
pub fn classify(e: Error) -> CliError {
    match e {
        Error::InvalidParameter(_)
        | Error::Parse(_)
        | Error::Resolution(_)
        | Error::Undersampled(_)
        | Error::AsymmetricGrid
        | Error::GridMismatch(_)
        | Error::DegenerateGrid(_)
        | Error::ModeNotInSpace(_)
        | Error::MissingMirrorMode { .. }
        | Error::EmptyPartition
        | Error::NotPassive(_)
        | Error::TruncationOverflow { .. } => CliError::Config(e.to_string()),
        _ => CliError::Numerical(e.to_string()),
    }
}

trait OrConfig<T> {
    fn lib(self) -> Result<T, CliError>;
}

impl<T> OrConfig<T> for qsensing_core::Result<T> {
    fn lib(self) -> Result<T, CliError> {
        self.map_err(classify)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SqlParams {
    pub trials: Vec<u64>,
    pub repetitions: u32,
}

impl Default for SqlParams {
    fn default() -> Self {
        Self { trials: (4..=12).map(|k| 1u64 << k).collect(), repetitions: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeisenbergParams {
    pub n_values: Vec<u32>,
    pub trials: u64,
    pub repetitions: u32,
}

impl Default for HeisenbergParams {
    fn default() -> Self {
        Self { n_values: (1..=5).collect(), trials: 1000, repetitions: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AngularParams {
    /// OAM charge.
    pub l: i32,
    /// Entangled photons; 2 is the down-conversion pair.
    pub photons: u32,
    pub points: usize,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl Default for AngularParams {
    fn default() -> Self {
        Self { l: 2, photons: 2, points: 101, theta_min: 0.0, theta_max: PI }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "type", rename_all = "kebab-case")]
pub enum ObjectSpec {
    Disk { radius: f64 },
    Letter { letter: char, size: f64 },
    /// cos(qθ)·exp(−r²/width²)
    Petals { q: u32, width: f64 },
    Lg { terms: Vec<LgTerm> },
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LgTerm {
    pub l: i32,
    pub p: u32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpiralParams {
    pub object: ObjectSpec,
    pub w0: f64,
    pub wavelength: f64,
    pub l_max: u32,
    pub p_max: u32,
    pub p_zero_only: bool,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    /// Object rotation applied for the equivariance table, rad.
    pub rotation: f64,
}

impl Default for SpiralParams {
    fn default() -> Self {
        Self {
            object: ObjectSpec::Letter { letter: 'F', size: 2.5 },
            w0: 1.0,
            wavelength: 0.8,
            l_max: 6,
            p_max: 2,
            p_zero_only: false,
            radial_nodes: DEFAULT_RADIAL_NODES,
            angular_nodes: DEFAULT_ANGULAR_NODES,
            rotation: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DopplerParams {
    pub l_values: Vec<i32>,
    /// Rotation rates, rad/s.
    pub omega_values: Vec<f64>,
    /// Optical carrier, rad/s; cancels in the intensity.
    pub carrier: f64,
    pub duration: f64,
    pub sample_rate: f64,
}

impl Default for DopplerParams {
    fn default() -> Self {
        Self { l_values: vec![1, 5, 10], omega_values: vec![0.5, 1.0, 2.0], carrier: 0.0, duration: 200.0, sample_rate: 50.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DispersionSetup {
    /// Same medium in both arms of an exchange interferometer.
    Hom,
    /// Medium in one arm, exchange interference.
    Skc,
    /// Medium in one arm, paired-path interference.
    SkcPaired,
    /// Medium in the signal arm, its opposite in the idler arm.
    Franson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersionParams {
    pub setup: DispersionSetup,
    /// Centre angular frequency, rad/s.
    pub omega0: f64,
    /// Spectral width σ, rad/s.
    pub sigma: f64,
    pub grid_points: usize,
    pub grid_half_width_sigmas: f64,
    /// β₀..β₃ in sⁿ/m.
    pub beta: [f64; 4],
    /// Medium length, m.
    pub length: f64,
    /// Delay scan half-span, s.
    pub delay_half_span: f64,
    pub delay_points: usize,
}

impl Default for DispersionParams {
    fn default() -> Self {
        Self {
            setup: DispersionSetup::Skc,
            omega0: 2.355e15,
            sigma: 1.0e13,
            grid_points: 1024,
            grid_half_width_sigmas: 4.0,
            beta: [0.0, 0.0, 2.0e-26, 0.0],
            length: 1.0,
            delay_half_span: 1.0e-12,
            delay_points: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RamseyParams {
    /// Transition frequency, rad/s.
    pub omega: f64,
    /// Free evolution times, s.
    pub times: Vec<f64>,
    pub atoms: Vec<u32>,
}

impl Default for RamseyParams {
    fn default() -> Self {
        Self { omega: 1.0, times: vec![0.1, 0.2, 0.4], atoms: (1..=5).collect() }
    }
}

/// Parses the parameter block for the configured kind.
pub fn validate_params(cfg: &ExperimentConfig) -> Result<(), CliError> {
    resolved_params(cfg).map(drop)
}

fn to_json<T: Serialize>(v: T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Config(e.to_string()))
}

/// Parameters with defaults filled in.
pub fn resolved_params(cfg: &ExperimentConfig) -> Result<serde_json::Value, CliError> {
    match cfg.kind {
        Kind::SqlScaling => to_json(cfg.params::<SqlParams>()?),
        Kind::HeisenbergScaling => to_json(cfg.params::<HeisenbergParams>()?),
        Kind::Angular => to_json(cfg.params::<AngularParams>()?),
        Kind::Spiral => to_json(cfg.params::<SpiralParams>()?),
        Kind::Doppler => to_json(cfg.params::<DopplerParams>()?),
        Kind::Dispersion => to_json(cfg.params::<DispersionParams>()?),
        Kind::Ramsey => to_json(cfg.params::<RamseyParams>()?),
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<ResultBundle, CliError> {
    if cfg.kind.is_stochastic() {
        cfg.require_seed()?;
    }
    match cfg.kind {
        Kind::SqlScaling => sql_scaling(&cfg.params()?, cfg.require_seed()?),
        Kind::HeisenbergScaling => heisenberg_scaling(&cfg.params()?, cfg.require_seed()?),
        Kind::Angular => angular(&cfg.params()?),
        Kind::Spiral => spiral(&cfg.params()?),
        Kind::Doppler => doppler(&cfg.params()?),
        Kind::Dispersion => dispersion(&cfg.params()?),
        Kind::Ramsey => ramsey(&cfg.params()?),
    }
}

const ANALYTIC_TOLERANCE: f64 = 1e-10;

pub fn sql_scaling(p: &SqlParams, seed: u64) -> Result<ResultBundle, CliError> {
    let run = scaling_experiment(ScalingFamily::IndependentPhotons, &p.trials, p.repetitions, seed).lib()?;
    let proto = Protocol::SinglePhotonMz;
    let mut t = Table::new("scaling", &["trials[1]", "delta_phi_analytic[rad]", "delta_phi_mc[rad]", "phi_estimate[rad]"]);
    let mut worst: f64 = 0.0;
    for (&n, r) in p.trials.iter().zip(&run.results) {
        let a = analytic_estimate(proto, proto.working_point(), n).lib()?;
        worst = worst.max((a.uncertainty - 1.0 / (n as f64).sqrt()).abs());
        t.push(vec![int(n), num(a.uncertainty), num(r.uncertainty), num(r.estimate)]);
    }
    let mut b = ResultBundle::default();
    b.tables.push(t);
    b.metric("slope", run.fit.slope);
    b.metric("slope_stderr", run.fit.slope_stderr);
    b.metric("working_point_rad", proto.working_point());
    b.metric("repetitions", p.repetitions);
    b.metric("clamped_estimates", run.results.iter().filter(|r| r.clamped).count());
    b.check("analytic uncertainty equals 1/sqrt(N)", worst < ANALYTIC_TOLERANCE, format!("max deviation {worst:e}"));
    Ok(b)
}

pub fn heisenberg_scaling(p: &HeisenbergParams, seed: u64) -> Result<ResultBundle, CliError> {
    let grid: Vec<u64> = p.n_values.iter().map(|&n| n as u64).collect();
    let run = scaling_experiment(ScalingFamily::Noon { trials: p.trials }, &grid, p.repetitions, seed).lib()?;
    let mut t = Table::new("scaling", &["N[photons]", "delta_phi_analytic[rad]", "delta_phi_mc[rad]", "phi_estimate[rad]", "phi_true[rad]"]);
    let mut worst: f64 = 0.0;
    for (&n, r) in p.n_values.iter().zip(&run.results) {
        let proto = Protocol::Noon { n };
        let a = analytic_estimate(proto, proto.working_point(), 1).lib()?;
        worst = worst.max((a.uncertainty - 1.0 / n as f64).abs());
        t.push(vec![int(n), num(a.uncertainty), num(r.per_trial()), num(r.estimate), num(proto.working_point())]);
    }
    let per_trial = fit_scaling(p.n_values.iter().zip(&run.results).map(|(&n, r)| (n as f64, r.per_trial())).collect()).lib()?;
    let mut b = ResultBundle::default();
    b.tables.push(t);
    b.metric("slope", run.fit.slope);
    b.metric("slope_stderr", run.fit.slope_stderr);
    b.metric("per_trial_slope", per_trial.slope);
    b.metric("trials", p.trials);
    b.metric("repetitions", p.repetitions);
    b.check("analytic uncertainty equals 1/N", worst < ANALYTIC_TOLERANCE, format!("max deviation {worst:e}"));
    Ok(b)
}

pub fn angular(p: &AngularParams) -> Result<ResultBundle, CliError> {
    if p.points < 2 || !(p.theta_max > p.theta_min) {
        return Err(CliError::Config("angular scan needs ≥ 2 points and theta_max > theta_min".into()));
    }
    let proto = if p.photons == 2 { Protocol::AngularPair { l: p.l } } else { Protocol::OamNoon { n: p.photons, l: p.l } };
    let setup = proto.setup().lib()?;
    let fringe = proto.fringe();
    let mut t = Table::new("fringe", &["theta[rad]", "r_expectation[1]", "r_reference[1]", "delta_r[1]", "delta_theta[rad]"]);
    let mut values = Vec::with_capacity(p.points);
    let mut worst: f64 = 0.0;
    for k in 0..p.points {
        let theta = p.theta_min + (p.theta_max - p.theta_min) * k as f64 / (p.points - 1) as f64;
        let (mean, delta) = setup.moments(theta).lib()?;
        let reference = fringe.value(theta);
        worst = worst.max((mean - reference).abs());
        let dtheta = match analytic_estimate(proto, theta, 1) {
            Ok(r) => num(r.uncertainty),
            Err(Error::StationaryPoint { .. }) => String::new(),
            Err(e) => return Err(classify(e)),
        };
        values.push(mean);
        t.push(vec![num(theta), num(mean), num(reference), num(delta), dtheta]);
    }
    let best = analytic_estimate(proto, proto.working_point(), 1).lib()?;
    let expected = 1.0 / (2.0 * p.photons as f64 * p.l as f64);
    let visibility = fringe_visibility(&values);
    let mut b = ResultBundle::default();
    b.tables.push(t);
    b.metric("delta_theta_working_point_rad", best.uncertainty);
    b.metric("delta_theta_expected_rad", expected);
    b.metric("visibility", visibility);
    b.metric("classical_visibility_bound", CLASSICAL_VISIBILITY_BOUND);
    b.metric("max_fringe_deviation", worst);
    b.check("fringe matches closed form", worst < 1e-12, format!("max deviation {worst:e}"));
    b.check("angular uncertainty equals 1/(2Nl)", (best.uncertainty - expected).abs() < ANALYTIC_TOLERANCE, format!("{} vs {expected}", best.uncertainty));
    Ok(b)
}

fn build_object(spec: &ObjectSpec, grid: PolarGrid, basis: &LgBasis) -> Result<ObjectProfile, CliError> {
    match spec {
        ObjectSpec::Disk { radius } => ObjectProfile::disk(grid, *radius).lib(),
        ObjectSpec::Letter { letter, size } => ObjectProfile::letter(grid, *letter, *size).lib(),
        ObjectSpec::Petals { q, width } => {
            let (q, w) = (*q as f64, *width);
            ObjectProfile::from_fn(grid, |r, t| Complex64::new((q * t).cos() * (-r * r / (w * w)).exp(), 0.0)).lib()
        }
        ObjectSpec::Lg { terms } => {
            let modes = terms
                .iter()
                .map(|t| Ok((basis.mode(t.l, t.p)?, Complex64::new(t.re, t.im))))
                .collect::<qsensing_core::Result<Vec<(LgModeSpec, Complex64)>>>()
                .lib()?;
            ObjectProfile::lg_superposition(grid, &modes).lib()
        }
        ObjectSpec::File { path } => ObjectProfile::read(path).lib(),
    }
}

pub fn spiral(p: &SpiralParams) -> Result<ResultBundle, CliError> {
    let basis = LgBasis { w0: p.w0, wavelength: p.wavelength, z: 0.0, l_max: p.l_max, p_max: p.p_max, p_zero_only: p.p_zero_only };
    let grid = PolarGrid::new(p.radial_nodes, p.angular_nodes, DEFAULT_RADIAL_EXTENT * p.w0).lib()?;
    let object = build_object(&p.object, grid, &basis)?;
    let spectrum = project_object(&object, &basis).lib()?;
    let rotated = project_object(&rotate_object(&object, p.rotation).lib()?, &basis).lib()?;
    let correlated = correlated_phases(&spectrum, |_, _| Complex64::new(1.0, 0.0)).lib()?;
    let mut t = Table::new(
        "spectrum",
        &["l[1]", "p[1]", "a_re[1]", "a_im[1]", "power[1]", "phase_correlated[rad]", "power_rotated[1]", "phase_shift_rotated[rad]"],
    );
    let mut worst_power: f64 = 0.0;
    let mut worst_phase: f64 = 0.0;
    for (&(l, pp), a) in &spectrum.coefficients {
        let ar = rotated.coefficient(l, pp);
        worst_power = worst_power.max((ar.norm_sqr() - a.norm_sqr()).abs());
        let shift = if a.norm() > 1e-6 {
            let expected = Complex64::from_polar(1.0, l as f64 * p.rotation);
            let ratio = ar / a;
            worst_phase = worst_phase.max((ratio / ratio.norm() - expected).norm());
            num(ratio.arg())
        } else {
            String::new()
        };
        let phase = correlated.phase(l, pp).map(num).unwrap_or_default();
        t.push(vec![int(l), int(pp), num(a.re), num(a.im), num(a.norm_sqr()), phase, num(ar.norm_sqr()), shift]);
    }
    let symmetry = match detect_rotational_symmetry(&spectrum) {
        Symmetry::Order(q) => serde_json::json!(q),
        Symmetry::Continuous => serde_json::json!("continuous"),
    };
    let mut b = ResultBundle::default();
    b.tables.push(t);
    b.metric("symmetry_order", symmetry);
    b.metric("object_norm_sqr", spectrum.object_norm_sqr);
    b.metric("captured_power", spectrum.captured_power());
    b.metric("residual", spectrum.residual);
    b.metric("flagged_channels", correlated.flagged().len());
    b.check("captured power does not exceed object power", spectrum.residual > -1e-8 * spectrum.object_norm_sqr.max(1.0), format!("residual {:e}", spectrum.residual));
    b.check("rotation leaves spectral power unchanged", worst_power < 1e-9, format!("max change {worst_power:e}"));
    b.check("rotation multiplies coefficients by exp(i l theta0)", worst_phase < 1e-8, format!("max deviation {worst_phase:e}"));
    Ok(b)
}

pub fn doppler(p: &DopplerParams) -> Result<ResultBundle, CliError> {
    let mut t = Table::new("beats", &["l[1]", "omega[rad/s]", "beat_expected[rad/s]", "beat_measured[rad/s]", "resolution[rad/s]"]);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut worst_bins: f64 = 0.0;
    for &l in &p.l_values {
        for &w in &p.omega_values {
            let m = rotational_doppler_beat(l, w, p.carrier, p.duration, p.sample_rate).lib()?;
            let expected = 2.0 * (l as f64 * w).abs();
            if !m.no_beat {
                worst_bins = worst_bins.max((m.beat - expected).abs() / m.resolution);
            }
            xs.push(expected);
            ys.push(m.beat);
            t.push(vec![int(l), num(w), num(expected), num(m.beat), num(m.resolution)]);
        }
    }
    let (slope, r2) = linear_fit(&xs, &ys);
    let mut b = ResultBundle::default();
    b.tables.push(t);
    b.metric("slope", slope);
    b.metric("r_squared", r2);
    b.metric("max_error_bins", worst_bins);
    b.check("beat within one bin of 2 l Omega", worst_bins <= 1.0, format!("worst {worst_bins:.3} bins"));
    Ok(b)
}

/// Least-squares slope and R² of y against x.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return (0.0, 0.0);
    }
    (sxy / sxx, sxy * sxy / (sxx * syy))
}

fn scan(p: &DispersionParams, spectrum: &BiphotonSpectrum, medium: &DispersionProfile, delays: &[f64]) -> Result<Interferogram, CliError> {
    match p.setup {
        DispersionSetup::Hom => hom_interferogram(spectrum, &Arms::both(*medium), delays),
        DispersionSetup::Skc => skc_interferogram(spectrum, medium, delays, Geometry::ExchangeInterference),
        DispersionSetup::SkcPaired => skc_interferogram(spectrum, medium, delays, Geometry::PairedPath),
        DispersionSetup::Franson => franson_interferogram(spectrum, &Arms::opposite(*medium), delays),
    }
    .lib()
}

pub fn dispersion(p: &DispersionParams) -> Result<ResultBundle, CliError> {
    let spectrum = BiphotonSpectrum::gaussian(p.omega0, p.sigma, p.grid_points, p.grid_half_width_sigmas).lib()?;
    let medium = DispersionProfile::new(p.beta, p.length).lib()?;
    if p.delay_points < 5 {
        return Err(CliError::Config("delay_points must be at least 5".into()));
    }
    let delays = delay_grid(p.delay_half_span, p.delay_points);
    let reference = scan(p, &spectrum, &DispersionProfile::vacuum(), &delays)?;
    let dispersed = scan(p, &spectrum, &medium, &delays)?;
    let classical = classical_baseline(&spectrum, &medium).lib()?;

    let mut t = Table::new("interferogram", &["delay[s]", "coincidence[1]", "coincidence_reference[1]", "same_port[1]"]);
    for k in 0..delays.len() {
        let same = dispersed.same_port.get(k).map(|v| num(*v)).unwrap_or_default();
        t.push(vec![num(delays[k]), num(dispersed.rates[k]), num(reference.rates[k]), same]);
    }
    let mut pulse = Table::new("classical_pulse", &["time[s]", "intensity[arb]"]);
    for (tt, i) in classical.times.iter().zip(&classical.intensity) {
        pulse.push(vec![num(*tt), num(*i)]);
    }

    let mut b = ResultBundle::default();
    b.tables.push(t);
    b.tables.push(pulse);
    b.metric("classical_broadening", classical.broadening());
    b.metric("visibility", dispersed.visibility());
    let m_ref = envelope_moments(&reference).lib()?;
    match envelope_moments(&dispersed) {
        Ok(m) => {
            b.metric("envelope_width_ratio", m.rms_width / m_ref.rms_width);
            b.metric("envelope_centroid_s", m.centroid);
            b.metric("envelope_kurtosis", m.kurtosis);
            b.metric("reference_kurtosis", m_ref.kurtosis);
        }
        Err(_) => b.metric("envelope_width_ratio", serde_json::Value::Null),
    }
    if matches!(p.setup, DispersionSetup::Hom | DispersionSetup::Skc) {
        if let Ok(fit) = extract_delay(&dispersed) {
            b.metric("fitted_delay_s", fit.center);
            b.metric("fitted_delay_stderr_s", fit.stderr);
        }
    }
    if !dispersed.same_port.is_empty() {
        let defect = dispersed.probability_defect();
        b.check("output probabilities sum to one", defect < 1e-10, format!("max defect {defect:e}"));
    }
    Ok(b)
}

pub fn ramsey(p: &RamseyParams) -> Result<ResultBundle, CliError> {
    let mut t = Table::new(
        "ramsey",
        &["atoms[1]", "t[s]", "phase[rad]", "signal[1]", "omega_estimate[rad/s]", "delta_omega[rad/s]"],
    );
    let mut worst: f64 = 0.0;
    for &n in &p.atoms {
        for &time in &p.times {
            let protocol = if n == 1 { RamseyProtocol::SingleAtom } else { RamseyProtocol::Entangled { n } };
            let r = ramsey_frequency_estimate(p.omega, time, protocol).lib()?;
            worst = worst.max((r.estimation.uncertainty - 1.0 / (n as f64 * time)).abs() * time);
            t.push(vec![
                int(n),
                num(time),
                num(r.phase),
                num(r.estimation.mean_signal),
                num(r.estimation.estimate),
                num(r.estimation.uncertainty),
            ]);
        }
    }
    let mut b = ResultBundle::default();
    b.tables.push(t);
    b.check("frequency uncertainty equals 1/(N t)", worst < ANALYTIC_TOLERANCE, format!("max relative deviation {worst:e}"));
    Ok(b)
}
