//! Acceptance suite: one line per criterion, then a non-zero exit if any
//! criterion fails. Tolerances are pinned below.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wigtomo::hilbert::{assemble_from_slice, random_density_matrix};
use wigtomo::sampling::rng::substream;
use wigtomo::sampling::RadialTable;
use wigtomo::wigner::ketbra_wigner;
use wigtomo::{
    allocate_budget, element_operators, enumerate_basis, ideal_w_state, Complex, DisplacementPoint,
    MeasurementBackend, OccupationVector, ParityAngles, ProtocolConfig, SampledPoint, SignMode,
    Strategy,
};
use wigtomo_bench::commands::{write_csv, write_json};
use wigtomo_bench::harness::{demesst_states, demesst_with_counts, Scenario};
use wigtomo_bench::RunConfig;

const ORACLE_TOL: f64 = 1e-9;
const ORACLE_SECONDS: f64 = 30.0;
const ROUND_TRIP_TOL: f64 = 1e-10;
const CONSISTENCY_FIDELITY: f64 = 0.9;
const CONSISTENCY_MIN_PASSES: usize = 45;
const CONSISTENCY_SECONDS: f64 = 300.0;
const EXPONENT_RANGE: (f64, f64) = (-0.6, -0.4);
const TRACE_TOL: f64 = 0.05;
const KS_SIGNIFICANCE: f64 = 0.01;
const W2_TOL: f64 = 0.02;
const FLIP_SIGMAS: f64 = 3.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn config(name: &str) -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name);
    RunConfig::load(&path).expect("shipped config loads")
}

fn in_range(b: f64) -> bool {
    (EXPONENT_RANGE.0..=EXPONENT_RANGE.1).contains(&b)
}

fn wigner_oracle() -> Outcome {
    let start = Instant::now();
    let dim = 60;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for theta in [
        std::f64::consts::PI,
        0.9 * std::f64::consts::PI,
        std::f64::consts::FRAC_PI_2,
    ] {
        let angles = ParityAngles::uniform(1, theta).unwrap();
        for _ in 0..50 {
            let r = 3.0 * rng.random::<f64>().sqrt();
            let alpha = Complex::from_polar(r, std::f64::consts::TAU * rng.random::<f64>());
            let kernel = wigtomo_oracle::parity_kernel(alpha, theta, dim);
            let point = DisplacementPoint::full(vec![alpha]).unwrap();
            for m in 0..=4u32 {
                for n in 0..=4u32 {
                    let fast = ketbra_wigner(
                        &OccupationVector::new(vec![m]),
                        &OccupationVector::new(vec![n]),
                        &point,
                        &angles,
                    )
                    .unwrap();
                    // Tr[|m⟩⟨n| X] = X[n, m].
                    worst = worst.max((fast - kernel[(n as usize, m as usize)]).norm());
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < ORACLE_TOL && secs < ORACLE_SECONDS,
        format!("max |Δ| = {worst:.2e} (< {ORACLE_TOL:e}), {secs:.1} s (< {ORACLE_SECONDS} s)"),
    )
}

fn round_trip() -> Outcome {
    let shapes: Vec<(usize, usize)> = (1..=10)
        .flat_map(|m| (1..=9).map(move |n| (m, n)))
        .filter(|&(m, n)| {
            enumerate_basis(m, n)
                .map(|b| b.dimension() <= 10)
                .unwrap_or(false)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let (m, n) = shapes[i % shapes.len()];
        let basis = enumerate_basis(m, n).unwrap();
        let rank = rng.random_range(1..=basis.dimension());
        let rho = random_density_matrix(basis.clone(), rank, &mut rng);
        let back = assemble_from_slice(&basis, &rho.element_expectations()).unwrap();
        worst = worst.max(back.frobenius_distance(&rho).unwrap());
    }
    outcome(
        worst < ROUND_TRIP_TOL,
        format!("200 states, max Frobenius = {worst:.2e} (< {ROUND_TRIP_TOL:e})"),
    )
}

fn estimator_consistency() -> Outcome {
    let start = Instant::now();
    let mut cfg = RunConfig::default();
    cfg.target.modes = 3;
    cfg.protocol.repetitions = 1;
    cfg.protocol.sign_mode = SignMode::RandomSign;
    cfg.protocol.readout_flip = 0.0;
    let scn = Scenario::new(&cfg, 3, 0).unwrap();
    let budget = allocate_budget(&scn.basis, &scn.protocol.angles, 0.3, 0.1).unwrap();
    let ops = element_operators(&scn.basis);
    let counts = vec![budget
        .per_operator
        .iter()
        .map(|b| b.samples)
        .collect::<Vec<_>>()];
    let mut passes = 0;
    let mut lowest: f64 = 1.0;
    for trial in 0..50u64 {
        let values = demesst_with_counts(&scn, &ops, 1000 + trial, 0, &counts)
            .unwrap()
            .pop()
            .flatten()
            .unwrap();
        let (_, physical) = demesst_states(&scn.basis, &values).unwrap();
        let f = physical.overlap(&scn.ideal).unwrap();
        lowest = lowest.min(f);
        passes += usize::from(f >= CONSISTENCY_FIDELITY);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        passes >= CONSISTENCY_MIN_PASSES && secs < CONSISTENCY_SECONDS,
        format!(
            "{passes}/50 trials with F >= {CONSISTENCY_FIDELITY} (need {CONSISTENCY_MIN_PASSES}), lowest F = {lowest:.4}, {} samples per trial, {secs:.0} s",
            budget.total
        ),
    )
}

struct ConvergenceFits {
    // (modes, strategy, b, a, a_half)
    fits: Vec<(usize, Strategy, f64, f64, f64)>,
}

fn convergence_fits() -> ConvergenceFits {
    let mut fits = Vec::new();
    for modes in [2, 3, 4] {
        let mut cfg = config("convergence.toml");
        cfg.target.modes = modes;
        cfg.target.phases.clear();
        for f in wigtomo_bench::convergence(&cfg).unwrap().fits {
            fits.push((modes, f.strategy, f.b, f.a, f.a_half));
        }
    }
    ConvergenceFits { fits }
}

fn convergence_exponent(c: &ConvergenceFits) -> Outcome {
    let pass = c.fits.len() == 6 && c.fits.iter().all(|f| in_range(f.2));
    let list: Vec<String> = c
        .fits
        .iter()
        .map(|f| format!("{} M={} b={:.3}", f.1, f.0, f.2))
        .collect();
    outcome(
        pass,
        format!(
            "{} (range [{}, {}])",
            list.join(", "),
            EXPONENT_RANGE.0,
            EXPONENT_RANGE.1
        ),
    )
}

fn distance_ratio(c: &ConvergenceFits) -> Outcome {
    let ratio = |modes: usize, pick: fn(&(usize, Strategy, f64, f64, f64)) -> f64| -> f64 {
        let get = |s| {
            c.fits
                .iter()
                .find(|f| f.0 == modes && f.1 == s)
                .map(pick)
                .unwrap_or(f64::NAN)
        };
        get(Strategy::Oli) / get(Strategy::Demesst)
    };
    let half: Vec<f64> = [2, 3, 4].iter().map(|&m| ratio(m, |f| f.4)).collect();
    let free: Vec<f64> = [2, 3, 4].iter().map(|&m| ratio(m, |f| f.3)).collect();
    let pass = half[0] < half[1] && half[1] < half[2];
    outcome(
        pass,
        format!(
            "OLI:DEMESST coefficient of a x^(-1/2) = {:.2}, {:.2}, {:.2} for M = 2, 3, 4 (free-exponent fits: {:.2}, {:.2}, {:.2})",
            half[0], half[1], half[2], free[0], free[1], free[2]
        ),
    )
}

fn crossover() -> Outcome {
    let mut cfg = config("scaling.toml");
    cfg.scaling.modes = vec![2, 4];
    let rows = wigtomo_bench::scaling(&cfg).unwrap();
    let get = |m: usize, s: Strategy| {
        rows.iter()
            .find(|r| r.modes == m && r.strategy == s)
            .and_then(|r| r.shots_to_target)
    };
    let (d2, o2, d4, o4) = (
        get(2, Strategy::Demesst),
        get(2, Strategy::Oli),
        get(4, Strategy::Demesst),
        get(4, Strategy::Oli),
    );
    let pass =
        matches!((d2, o2, d4, o4), (Some(d2), Some(o2), Some(d4), Some(o4)) if o2 < d2 && d4 < o4);
    let show = |x: Option<usize>| x.map_or("capped".to_string(), |v| v.to_string());
    outcome(
        pass,
        format!(
            "shots to median F >= 0.9: M=2 OLI {} vs DEMESST {}; M=4 DEMESST {} vs OLI {}",
            show(o2),
            show(d2),
            show(d4),
            show(o4)
        ),
    )
}

fn trace_consistency() -> Outcome {
    let mut full = config("trace-check.toml");
    full.target.modes = 3;
    full.trace_check.subspace.clear();
    let rows = wigtomo_bench::trace_check(&full).unwrap();
    let f = rows.last().unwrap().clone();
    let sub_rows = wigtomo_bench::trace_check(&config("trace-check.toml")).unwrap();
    let s = sub_rows
        .iter()
        .rev()
        .find(|r| r.variant != "full")
        .unwrap()
        .clone();
    let pass = (f.trace - 1.0).abs() <= TRACE_TOL && (s.trace - 0.5).abs() <= TRACE_TOL;
    outcome(
        pass,
        format!(
            "3-mode full trace {:.4} ± {:.4} (1 ± {TRACE_TOL}); 4-mode modes {} trace {:.4} ± {:.4} (0.5 ± {TRACE_TOL}) at {} shots",
            f.trace, f.stderr, s.variant, s.trace, s.stderr, s.shots
        ),
    )
}

fn sampler_distribution() -> Outcome {
    let table = RadialTable::cached(0, 0).unwrap();
    let scale = 2.0 * (std::f64::consts::PI / 2.0).sin();
    let mut rng = substream(8, &[0]);
    let n = 100_000;
    let samples: Vec<f64> = (0..n)
        .map(|_| table.invert(rng.random::<f64>()) / scale)
        .collect();
    let d = wigtomo_oracle::ks_statistic(&samples, |r| 1.0 - (-2.0 * r * r).exp());
    let crit = wigtomo_oracle::ks_critical(n, KS_SIGNIFICANCE);
    outcome(
        d < crit,
        format!("KS D = {d:.5} vs critical {crit:.5} at {KS_SIGNIFICANCE}, n = {n}"),
    )
}

fn w2_self_fidelity() -> Outcome {
    let run = wigtomo_bench::w2(&config("w2.toml")).unwrap();
    let last = run.rows.last().unwrap();
    let b = run.summary.error_b.unwrap_or(f64::NAN);
    let pass = last.samples == 10_000 && (last.fidelity - 1.0).abs() <= W2_TOL && in_range(b);
    outcome(
        pass,
        format!(
            "F = {:.4} ± {:.4} at {} samples (1 ± {W2_TOL}); error exponent {b:.3}",
            last.fidelity, last.stderr, last.samples
        ),
    )
}

fn readout_attenuation() -> Outcome {
    let state = ideal_w_state(2, &[0.0]).unwrap();
    let backend = MeasurementBackend::new(state);
    let angles = ParityAngles::pi(2);
    let sample = SampledPoint {
        point: DisplacementPoint::full(vec![Complex::new(0.2, 0.1), Complex::new(-0.1, 0.15)])
            .unwrap(),
        phase: 0.0,
        weight: 1.0,
    };
    let ideal = backend
        .expected_signal(&sample.point, &angles, 0.0)
        .unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, p) in [0.01, 0.05, 0.1].into_iter().enumerate() {
        let cfg = ProtocolConfig::new(angles.clone(), p, 10, SignMode::PairedPhases, 0).unwrap();
        let mut rng = substream(10, &[i as u64]);
        let n = 40_000;
        let s: Vec<f64> = (0..n)
            .map(|_| backend.measure_signal(&sample, &cfg, &mut rng).unwrap())
            .collect();
        let mean = s.iter().sum::<f64>() / n as f64;
        let sd = (s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0) / n as f64)
            .sqrt();
        let ratio = mean / ideal;
        let ok = (mean - (1.0 - 2.0 * p) * ideal).abs() <= FLIP_SIGMAS * sd;
        pass &= ok;
        parts.push(format!(
            "p={p}: ratio {ratio:.4} vs {:.2} (σ_ratio {:.4})",
            1.0 - 2.0 * p,
            sd / ideal.abs()
        ));
    }
    outcome(pass, format!("{} within {FLIP_SIGMAS}σ", parts.join("; ")))
}

fn outputs(dir: &Path, cfgs: &Configs) -> Vec<(String, Vec<u8>)> {
    std::fs::create_dir_all(dir).unwrap();
    let c = wigtomo_bench::convergence(&cfgs.convergence).unwrap();
    write_csv(&dir.join("convergence.csv"), &c.rows).unwrap();
    write_csv(&dir.join("convergence_fit.csv"), &c.fits).unwrap();
    write_csv(
        &dir.join("scaling.csv"),
        &wigtomo_bench::scaling(&cfgs.scaling).unwrap(),
    )
    .unwrap();
    write_csv(
        &dir.join("trace.csv"),
        &wigtomo_bench::trace_check(&cfgs.trace).unwrap(),
    )
    .unwrap();
    let w = wigtomo_bench::w2(&cfgs.w2).unwrap();
    write_csv(&dir.join("w2.csv"), &w.rows).unwrap();
    write_json(&dir.join("w2_summary.json"), &w.summary).unwrap();
    let (summary, report) = wigtomo_bench::reconstruct(&cfgs.reconstruct).unwrap();
    write_json(&dir.join("reconstruct_summary.json"), &summary).unwrap();
    std::fs::write(dir.join("reconstruct.json"), report.to_json().unwrap()).unwrap();
    write_json(
        &dir.join("optimize_set.json"),
        &wigtomo_bench::optimize_set(&cfgs.optimize).unwrap(),
    )
    .unwrap();
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

struct Configs {
    convergence: RunConfig,
    scaling: RunConfig,
    trace: RunConfig,
    w2: RunConfig,
    reconstruct: RunConfig,
    optimize: RunConfig,
}

fn determinism() -> Outcome {
    // Shipped configs, shrunk so each command runs in seconds.
    let mut convergence = config("convergence.toml");
    convergence.target.modes = 2;
    convergence.target.phases.clear();
    convergence.convergence.checkpoints = vec![4000, 8000, 16000, 32000];
    convergence.convergence.groups = 3;
    let mut scaling = config("scaling.toml");
    scaling.scaling.modes = vec![2];
    scaling.scaling.seeds = 3;
    let mut trace = config("trace-check.toml");
    trace.convergence.checkpoints = vec![4000, 8000];
    trace.convergence.groups = 2;
    let mut w2 = config("w2.toml");
    w2.w2.checkpoints = vec![200, 400, 800, 1600];
    let mut reconstruct = config("reconstruct.toml");
    reconstruct.reconstruct.shots = 40_000;
    let optimize = config("optimize-set.toml");
    let cfgs = Configs {
        convergence,
        scaling,
        trace,
        w2,
        reconstruct,
        optimize,
    };

    let root: PathBuf =
        std::env::temp_dir().join(format!("wigtomo-acceptance-{}", std::process::id()));
    let run = |threads: usize, tag: &str| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| outputs(&root.join(tag), &cfgs))
    };
    let a = run(1, "a");
    let b = run(1, "b");
    let c = run(3, "c");
    let _ = std::fs::remove_dir_all(&root);
    let same = |x: &Vec<(String, Vec<u8>)>, y: &Vec<(String, Vec<u8>)>| x == y;
    let pass = a.len() == 9 && same(&a, &b) && same(&a, &c);
    let bytes: usize = a.iter().map(|f| f.1.len()).sum();
    outcome(
        pass,
        format!(
            "{} files ({bytes} bytes) identical across reruns and across 1 and 3 worker threads",
            a.len()
        ),
    )
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut record = |n: u32, name: &'static str, o: Outcome| {
        println!(
            "criterion {n:>2} {} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((n, name, o));
    };
    record(1, "Wigner oracle equivalence", wigner_oracle());
    record(2, "decompose/reassemble round trip", round_trip());
    record(3, "estimator consistency", estimator_consistency());
    let fits = convergence_fits();
    record(4, "convergence exponent", convergence_exponent(&fits));
    record(5, "crossover ordering", crossover());
    record(6, "distance-ratio growth", distance_ratio(&fits));
    record(7, "trace self-consistency", trace_consistency());
    record(8, "sampler distribution", sampler_distribution());
    record(9, "W2 self-fidelity", w2_self_fidelity());
    record(10, "readout-noise attenuation", readout_attenuation());
    record(11, "determinism", determinism());
    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("all {} criteria pass", results.len());
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
