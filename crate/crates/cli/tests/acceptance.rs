//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use qsensing_core::dispersion::{
    classical_baseline, delay_grid, envelope_moments, extract_delay, franson_interferogram, skc_interferogram, Arms,
    DispersionProfile, Geometry, Interferogram,
};
use qsensing_core::elements::ElementSpec;
use qsensing_core::metrology::{analytic_estimate, fringe_period, fringe_visibility, scaling_experiment, Protocol, ScalingFamily, CLASSICAL_VISIBILITY_BOUND};
use qsensing_core::oam::{
    project_object, rotate_object, rotational_doppler_beat, LgBasis, ObjectProfile, PolarGrid,
};
use qsensing_core::sources::BiphotonSpectrum;
use qsensing_core::{BasisState, Complex64, FockSpace, ModeLabel, StateVector};

type Outcome = Result<String, String>;

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn max_fringe_deviation(p: Protocol, xs: &[f64], reference: impl Fn(f64) -> f64) -> Result<f64, String> {
    let setup = p.setup().map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for &x in xs {
        let m = setup.expectation(x).map_err(|e| e.to_string())?;
        worst = worst.max((m - reference(x)).abs());
    }
    Ok(worst)
}

fn c1_fringes() -> Outcome {
    let start = Instant::now();
    let phis = grid(0.0, 2.0 * PI, 101);
    let mut worst = max_fringe_deviation(Protocol::SinglePhotonMz, &phis, f64::cos)?;
    for n in 2..=5u32 {
        worst = worst.max(max_fringe_deviation(Protocol::Noon { n }, &phis, |x| (n as f64 * x).cos())?);
    }
    let thetas = grid(0.0, PI, 101);
    for l in 1..=3i32 {
        worst = worst.max(max_fringe_deviation(Protocol::AngularPair { l }, &thetas, |t| (2.0 * l as f64 * t).cos().powi(2))?);
    }
    let elapsed = start.elapsed();
    let detail = format!("max deviation {worst:.2e}, {:.2} s", elapsed.as_secs_f64());
    if worst < 1e-12 && elapsed < Duration::from_secs(5) { Ok(detail) } else { Err(detail) }
}

fn c2_uncertainty_laws() -> Outcome {
    let mut worst: f64 = 0.0;
    let delta = |p: Protocol, x: f64, trials: u64| analytic_estimate(p, x, trials).map(|r| r.uncertainty).map_err(|e| e.to_string());
    for n in 1..=5u64 {
        for frac in [0.3, 0.7, 1.3] {
            let p = Protocol::SinglePhotonMz;
            worst = worst.max((delta(p, frac * p.working_point(), n)? - 1.0 / (n as f64).sqrt()).abs());
            let p = Protocol::Noon { n: n as u32 };
            worst = worst.max((delta(p, frac * p.working_point(), 1)? - 1.0 / n as f64).abs());
            for l in 1..=4i32 {
                let p = if n == 2 { Protocol::AngularPair { l } } else { Protocol::OamNoon { n: n as u32, l } };
                worst = worst.max((delta(p, frac * p.working_point(), 1)? - 1.0 / (2.0 * n as f64 * l as f64)).abs());
            }
        }
    }
    let detail = format!("max deviation {worst:.2e}");
    if worst < 1e-10 { Ok(detail) } else { Err(detail) }
}

const SEED: u64 = 20_240_611;

fn c3_scaling() -> Outcome {
    let start = Instant::now();
    let trials: Vec<u64> = (4..=12).map(|k| 1u64 << k).collect();
    let sql = scaling_experiment(ScalingFamily::IndependentPhotons, &trials, 500, SEED).map_err(|e| e.to_string())?;
    let noon = scaling_experiment(ScalingFamily::Noon { trials: 1000 }, &[1, 2, 3, 4, 5], 500, SEED).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let detail = format!(
        "independent slope {:.4} ± {:.4}, NOON slope {:.4} ± {:.4}, seed {SEED}, {:.2} s",
        sql.fit.slope,
        sql.fit.slope_stderr,
        noon.fit.slope,
        noon.fit.slope_stderr,
        elapsed.as_secs_f64()
    );
    let ok = (sql.fit.slope + 0.5).abs() <= 0.05 && (noon.fit.slope + 1.0).abs() <= 0.05 && elapsed < Duration::from_secs(120);
    if ok { Ok(detail) } else { Err(detail) }
}

fn c4_super_resolution() -> Outcome {
    let n = 5u32;
    let setup = Protocol::Noon { n }.setup().map_err(|e| e.to_string())?;
    let xs: Vec<f64> = (0..256).map(|k| 2.0 * PI * k as f64 / 256.0).collect();
    let ys = xs.iter().map(|&x| setup.expectation(x)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let period = fringe_period(&xs, &ys).map_err(|e| e.to_string())?;
    let expected = 2.0 * PI / n as f64;
    let rel = (period - expected).abs() / expected;
    let detail = format!("period {period:.6} vs 2π/5 = {expected:.6} ({:.3}%)", rel * 100.0);
    if rel < 0.005 { Ok(detail) } else { Err(detail) }
}

fn c5_hom_and_visibility() -> Outcome {
    let (a, b) = (ModeLabel::path(0), ModeLabel::path(1));
    let space = FockSpace::new([a, b], 2).map_err(|e| e.to_string())?;
    let input = StateVector::basis(space, BasisState::from_occupations([(a, 1), (b, 1)])).map_err(|e| e.to_string())?;
    let out = ElementSpec::balanced_splitter(a, b).and_then(|s| s.apply(&input)).map_err(|e| e.to_string())?;
    let coincidence = out.amplitude(&BasisState::from_occupations([(a, 1), (b, 1)])).norm();

    let mut worst_vis = f64::INFINITY;
    for l in 1..=3i32 {
        let setup = Protocol::AngularPair { l }.setup().map_err(|e| e.to_string())?;
        let thetas = grid(0.0, PI / (2.0 * l as f64), 101);
        let values = thetas.iter().map(|&t| setup.expectation(t)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        worst_vis = worst_vis.min(fringe_visibility(&values));
    }
    let detail = format!("|1,1⟩ amplitude {coincidence:.2e}, min visibility {worst_vis:.6} (classical bound {CLASSICAL_VISIBILITY_BOUND:.4})");
    if coincidence < 1e-14 && worst_vis >= 0.99 && worst_vis > CLASSICAL_VISIBILITY_BOUND { Ok(detail) } else { Err(detail) }
}

fn c6_lg_orthonormality() -> Outcome {
    let start = Instant::now();
    let basis = LgBasis::at_waist(1.0, 0.8, 3, 2);
    let channels = basis.channels();
    let mut worst: f64 = 0.0;
    for &(l, p) in &channels {
        let grid = PolarGrid::for_waist(basis.w0).map_err(|e| e.to_string())?;
        let mode = basis.mode(l, p).map_err(|e| e.to_string())?;
        let object = ObjectProfile::lg_superposition(grid, &[(mode, Complex64::new(1.0, 0.0))]).map_err(|e| e.to_string())?;
        let spectrum = project_object(&object, &basis).map_err(|e| e.to_string())?;
        for &(l2, p2) in &channels {
            let target = if (l, p) == (l2, p2) { 1.0 } else { 0.0 };
            worst = worst.max((spectrum.coefficient(l2, p2) - target).norm());
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("{} modes, max |G − I| {worst:.2e}, {:.2} s", channels.len(), elapsed.as_secs_f64());
    if worst < 1e-6 && elapsed < Duration::from_secs(10) { Ok(detail) } else { Err(detail) }
}

fn c7_rotation() -> Outcome {
    let basis = LgBasis::at_waist(1.0, 0.8, 6, 2);
    let grid = PolarGrid::for_waist(basis.w0).map_err(|e| e.to_string())?;
    let object = ObjectProfile::letter(grid, 'F', 2.5).map_err(|e| e.to_string())?;
    let before = project_object(&object, &basis).map_err(|e| e.to_string())?;
    let (mut worst_power, mut worst_phase, mut worst_opposite): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for theta0 in [0.37, 1.0, PI / 3.0] {
        let after = project_object(&rotate_object(&object, theta0).map_err(|e| e.to_string())?, &basis).map_err(|e| e.to_string())?;
        let back = project_object(&rotate_object(&object, -theta0).map_err(|e| e.to_string())?, &basis).map_err(|e| e.to_string())?;
        for (&(l, p), a) in &before.coefficients {
            let a1 = after.coefficient(l, p);
            worst_power = worst_power.max((a1.norm_sqr() - a.norm_sqr()).abs());
            if a.norm() > 1e-6 {
                let phase = Complex64::from_polar(1.0, l as f64 * theta0);
                worst_phase = worst_phase.max((a1 - phase * a).norm() / a.norm());
                worst_opposite = worst_opposite.max((back.coefficient(l, p) - phase.conj() * a).norm() / a.norm());
            }
        }
    }
    let detail = format!(
        "power change {worst_power:.2e}; factor e^(+ilθ0) deviation {worst_phase:.2e} (modes e^(−ilθ), rotation f(θ−θ0)); \
         e^(−ilθ0) holds for rotation by −θ0 ({worst_opposite:.2e})"
    );
    if worst_power < 1e-9 && worst_phase < 1e-8 && worst_opposite < 1e-8 { Ok(detail) } else { Err(detail) }
}

fn c8_doppler() -> Outcome {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut worst_bins: f64 = 0.0;
    for l in [1, 5, 10] {
        for omega in [0.5, 1.0, 2.0] {
            let m = rotational_doppler_beat(l, omega, 0.0, 200.0, 50.0).map_err(|e| e.to_string())?;
            let expected = 2.0 * l as f64 * omega;
            worst_bins = worst_bins.max((m.beat - expected).abs() / m.resolution);
            xs.push(expected);
            ys.push(m.beat);
        }
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    let detail = format!("worst error {worst_bins:.2e} bins, R² = {r2:.9}");
    if worst_bins <= 1.0 && r2 > 0.999 { Ok(detail) } else { Err(detail) }
}

const OMEGA0: f64 = 2.355e15;
const SIGMA: f64 = 1.0e13;

fn spectrum() -> Result<BiphotonSpectrum, String> {
    BiphotonSpectrum::gaussian(OMEGA0, SIGMA, 1024, 4.0).map_err(|e| e.to_string())
}

fn skc(s: &BiphotonSpectrum, medium: &DispersionProfile, delays: &[f64]) -> Result<Interferogram, String> {
    skc_interferogram(s, medium, delays, Geometry::ExchangeInterference).map_err(|e| e.to_string())
}

fn c9_dispersion_cancellation() -> Outcome {
    let s = spectrum()?;
    let delays = delay_grid(1.0e-12, 401);
    let step = delays[1] - delays[0];
    let beta2 = DispersionProfile::single_order(2, 2.0e-26, 1.0).map_err(|e| e.to_string())?;
    let vacuum = DispersionProfile::vacuum();
    let moments = |g: &Interferogram| envelope_moments(g).map_err(|e| e.to_string());

    let skc_ref = moments(&skc(&s, &vacuum, &delays)?)?;
    let skc_ratio = moments(&skc(&s, &beta2, &delays)?)?.rms_width / skc_ref.rms_width;
    let franson = |m: DispersionProfile| franson_interferogram(&s, &Arms::opposite(m), &delays).map_err(|e| e.to_string());
    let franson_ratio = moments(&franson(beta2)?)?.rms_width / moments(&franson(vacuum)?)?.rms_width;
    let broadening = classical_baseline(&s, &beta2).map_err(|e| e.to_string())?.broadening();

    let beta1_l = 50.0e-15;
    let beta1 = DispersionProfile::single_order(1, beta1_l, 1.0).map_err(|e| e.to_string())?;
    let shift = moments(&skc(&s, &beta1, &delays)?)?.centroid - skc_ref.centroid;
    let beta3 = DispersionProfile::single_order(3, 2.0e-39, 1.0).map_err(|e| e.to_string())?;
    let kurtosis = moments(&skc(&s, &beta3, &delays)?)?.kurtosis;
    let kurtosis_change = (kurtosis - skc_ref.kurtosis).abs() / skc_ref.kurtosis;

    let detail = format!(
        "width ratio SKC {skc_ratio:.6}, Franson {franson_ratio:.6}; classical broadening {broadening:.3}×; \
         β1 shift {:.3} fs vs {:.3} fs (step {:.1} fs); β3 kurtosis change {:.1}%",
        shift * 1e15,
        beta1_l * 1e15,
        step * 1e15,
        kurtosis_change * 100.0
    );
    let ok = (0.99..=1.01).contains(&skc_ratio)
        && (0.99..=1.01).contains(&franson_ratio)
        && broadening > 2.0
        && (shift.abs() - beta1_l).abs() <= step
        && kurtosis_change > 0.05;
    if ok { Ok(detail) } else { Err(detail) }
}

fn c10_delay_extraction() -> Outcome {
    let s = spectrum()?;
    let delays = delay_grid(1.0e-12, 201);
    let target = 3.0e-15;
    let plain = DispersionProfile::new([0.0, target, 0.0, 0.0], 1.0).map_err(|e| e.to_string())?;
    let with_beta2 = DispersionProfile::new([0.0, target, 2.0e-26, 0.0], 1.0).map_err(|e| e.to_string())?;
    let fit = |m: &DispersionProfile| extract_delay(&skc(&s, m, &delays)?).map_err(|e| e.to_string());
    let a = fit(&plain)?;
    let b = fit(&with_beta2)?;
    let err_a = (a.center.abs() - target).abs();
    let joint = a.stderr.hypot(b.stderr);
    let detail = format!(
        "recovered {:.6} fs ± {:.1e} fs; with β2 {:.6} fs ± {:.1e} fs",
        a.center * 1e15,
        a.stderr * 1e15,
        b.center * 1e15,
        b.stderr * 1e15
    );
    if err_a <= a.stderr && (a.center - b.center).abs() <= joint { Ok(detail) } else { Err(detail) }
}

fn run_cli(config: &Path, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_qsensing"))
        .args(["--quiet", "run"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() { Ok(()) } else { Err(format!("qsensing exited with {status}")) }
}

fn read_dir_sorted(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|e| {
            let e = e.map_err(|e| e.to_string())?;
            Ok((e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).map_err(|e| e.to_string())?))
        })
        .collect::<Result<Vec<_>, String>>()?;
    files.sort();
    Ok(files)
}

fn c11_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    for (name, body) in [
        ("sql", "kind = \"sql-scaling\"\nseed = 5\n[params]\nrepetitions = 100\n"),
        ("noon", "kind = \"heisenberg-scaling\"\nseed = 5\n[params]\nrepetitions = 100\ntrials = 200\n"),
    ] {
        let cfg = tmp.path().join(format!("{name}.toml"));
        std::fs::write(&cfg, format!("schema_version = 1\n{body}")).map_err(|e| e.to_string())?;
        let (a, b) = (tmp.path().join(format!("{name}-a")), tmp.path().join(format!("{name}-b")));
        run_cli(&cfg, &a)?;
        run_cli(&cfg, &b)?;
        let (fa, fb) = (read_dir_sorted(&a)?, read_dir_sorted(&b)?);
        if fa != fb {
            return Err(format!("{name}: outputs differ between runs"));
        }
        compared += fa.len();
    }
    Ok(format!("{compared} files byte-identical across repeated runs"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("fringe identities", c1_fringes),
        ("uncertainty laws", c2_uncertainty_laws),
        ("scaling fits", c3_scaling),
        ("super-resolution period", c4_super_resolution),
        ("HOM null and visibility", c5_hom_and_visibility),
        ("LG orthonormality", c6_lg_orthonormality),
        ("spiral rotation equivariance", c7_rotation),
        ("rotational Doppler", c8_doppler),
        ("dispersion cancellation", c9_dispersion_cancellation),
        ("delay extraction", c10_delay_extraction),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
