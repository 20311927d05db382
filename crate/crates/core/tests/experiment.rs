use std::f64::consts::{LN_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wigtomo::experiment::{read_shot_log, write_shot_log};
use wigtomo::hilbert::random_density_matrix;
use wigtomo::sampling::rng::substream;
use wigtomo::{
    batch_signal, enumerate_basis, generalized_wigner_state, ideal_w_state, parity_probability,
    project_and_trace, projected_parity_probability, run_batch, Complex, DensityMatrix,
    DisplacementPoint, MeasurementBackend, ModePartition, ParityAngles, ProtocolConfig,
    SampledPoint, SignMode,
};

fn fock(n: usize) -> DensityMatrix {
    let basis = enumerate_basis(1, 1).unwrap();
    let mut psi = nalgebra::DVector::zeros(2);
    psi[n] = Complex::new(1.0, 0.0);
    DensityMatrix::pure(basis, &psi).unwrap()
}

fn at(alphas: Vec<Complex>) -> DisplacementPoint {
    DisplacementPoint::full(alphas).unwrap()
}

fn random_point<R: Rng>(rng: &mut R, modes: usize) -> DisplacementPoint {
    at((0..modes)
        .map(|_| Complex::from_polar(2.0 * rng.random::<f64>(), TAU * rng.random::<f64>()))
        .collect())
}

#[test]
fn parity_at_origin() {
    let origin = at(vec![Complex::new(0.0, 0.0)]);
    let pi = ParityAngles::pi(1);
    assert!((parity_probability(&fock(0), &origin, &pi, 0.0).unwrap() - 1.0).abs() < 1e-15);
    assert!(
        parity_probability(&fock(1), &origin, &pi, 0.0)
            .unwrap()
            .abs()
            < 1e-15
    );
}

#[test]
fn probability_matches_wigner_and_sums_to_one() {
    let basis = enumerate_basis(2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..200 {
        let rho = random_density_matrix(basis.clone(), 3, &mut rng);
        let point = random_point(&mut rng, 2);
        let angles = ParityAngles::new(vec![0.5 + 5.0 * rng.random::<f64>(), PI]).unwrap();
        let phase = TAU * rng.random::<f64>();
        let p = parity_probability(&rho, &point, &angles, phase).unwrap();
        let w = generalized_wigner_state(&rho, &point, &angles.negated()).unwrap();
        assert!((p - 0.5 * (1.0 + (Complex::from_polar(1.0, phase) * w).re)).abs() < 1e-12);
        assert!((-1e-9..=1.0 + 1e-9).contains(&p));
        let q = parity_probability(&rho, &point, &angles, phase + PI).unwrap();
        assert!((p + q - 1.0).abs() < 1e-12);
    }
}

#[test]
fn empty_projection_is_plain_parity() {
    let basis = enumerate_basis(3, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for _ in 0..1000 {
        let rho = random_density_matrix(basis.clone(), 2, &mut rng);
        let point = random_point(&mut rng, 3);
        let angles = ParityAngles::pi(3);
        let phase = TAU * rng.random::<f64>();
        let a = parity_probability(&rho, &point, &angles, phase).unwrap();
        let b = projected_parity_probability(&rho, &ModePartition::full(3), &point, &angles, phase)
            .unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn projected_w_state() {
    let w = ideal_w_state(4, &[0.1, 0.2, 0.3]).unwrap();
    let part = ModePartition::from_active(4, vec![0, 3]).unwrap();
    let point = DisplacementPoint::new(vec![Complex::new(0.0, 0.0); 2], part.clone()).unwrap();
    let angles = ParityAngles::pi(4);
    let p = projected_parity_probability(&w, &part, &point, &angles, 0.0).unwrap();
    let reduced = project_and_trace(&w, &part).unwrap();
    let origin = at(vec![Complex::new(0.0, 0.0); 2]);
    let wv = generalized_wigner_state(&reduced, &origin, &ParityAngles::pi(2)).unwrap();
    assert!((reduced.trace() - 0.5).abs() < 1e-12);
    assert!((p - 0.5 * (0.5 + wv.re)).abs() < 1e-12);
    // What survives the projection is the one-photon weight on modes 0 and 3,
    // with parity −1 at the origin.
    assert!((wv.re + 0.5).abs() < 1e-12);
}

#[test]
fn unsupported_state_gives_zero_probability() {
    let w = ideal_w_state(2, &[0.0]).unwrap();
    // Projecting mode 0 onto vacuum annihilates |10⟩ entirely.
    let basis = enumerate_basis(2, 1).unwrap();
    let mut psi = nalgebra::DVector::zeros(basis.dimension());
    psi[basis
        .index_of(&wigtomo::OccupationVector::new(vec![1, 0]))
        .unwrap()] = Complex::new(1.0, 0.0);
    let excited = DensityMatrix::pure(basis, &psi).unwrap();
    let part = ModePartition::from_active(2, vec![1]).unwrap();
    let point = DisplacementPoint::new(vec![Complex::new(0.4, 0.2)], part.clone()).unwrap();
    let angles = ParityAngles::pi(2);
    for phase in [0.0, 1.0, PI] {
        assert_eq!(
            projected_parity_probability(&excited, &part, &point, &angles, phase).unwrap(),
            0.0
        );
    }
    assert!(projected_parity_probability(&w, &part, &point, &angles, 0.0).unwrap() > 0.0);
}

#[test]
fn certain_outcomes_without_readout_noise() {
    let sample = SampledPoint {
        point: at(vec![Complex::new(0.0, 0.0)]),
        phase: 0.0,
        weight: 1.0,
    };
    let config =
        ProtocolConfig::new(ParityAngles::pi(1), 0.0, 50, SignMode::PairedPhases, 1).unwrap();
    let batch = run_batch(&fock(0), None, &sample, &config, 0).unwrap();
    assert_eq!((batch.plus_shots, batch.plus_ground), (50, 50));
    assert_eq!((batch.minus_shots, batch.minus_ground), (50, 0));
    assert_eq!(batch_signal(&batch).unwrap(), 1.0);
}

#[test]
fn flip_rate_of_one_half_is_rejected() {
    assert!(ProtocolConfig::new(ParityAngles::pi(1), 0.5, 10, SignMode::PairedPhases, 1).is_err());
    assert!(ProtocolConfig::new(ParityAngles::pi(1), 0.1, 0, SignMode::PairedPhases, 1).is_err());
}

#[test]
fn empirical_frequency_tracks_probability() {
    // e^{-2|α|²} = ½ puts P_g at ¾.
    let alpha = Complex::new((LN_2 / 2.0).sqrt(), 0.0);
    let sample = SampledPoint {
        point: at(vec![alpha]),
        phase: 0.0,
        weight: 1.0,
    };
    let config =
        ProtocolConfig::new(ParityAngles::pi(1), 0.0, 100_000, SignMode::PairedPhases, 2).unwrap();
    let batch = run_batch(&fock(0), None, &sample, &config, 0).unwrap();
    let freq = batch.plus_ground as f64 / batch.plus_shots as f64;
    assert!((freq - 0.75).abs() < 0.005, "{freq}");
}

#[test]
fn signals_are_unbiased_in_both_modes() {
    let basis = enumerate_basis(2, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let rho = random_density_matrix(basis, 2, &mut rng);
    let angles = ParityAngles::pi(2);
    let sample = SampledPoint {
        point: random_point(&mut rng, 2),
        phase: 0.7,
        weight: 1.0,
    };
    let exact = MeasurementBackend::new(rho.clone())
        .expected_signal(&sample.point, &angles, sample.phase)
        .unwrap();
    for mode in [SignMode::PairedPhases, SignMode::RandomSign] {
        let config = ProtocolConfig::new(angles.clone(), 0.0, 1_000_000, mode, 3).unwrap();
        let batch = run_batch(&rho, None, &sample, &config, 0).unwrap();
        let s = batch_signal(&batch).unwrap();
        // Upper bounds: each branch frequency has variance ≤ 1/(4R); a
        // single s·A has variance ≤ 1.
        let se = match mode {
            SignMode::PairedPhases => (0.5f64 / 1e6).sqrt(),
            SignMode::RandomSign => (1.0f64 / 1e6).sqrt(),
        };
        assert!((s - exact).abs() < 4.0 * se, "{mode:?}: {s} vs {exact}");
    }
}

#[test]
fn readout_flips_attenuate_the_signal() {
    let angles = ParityAngles::pi(1);
    let sample = SampledPoint {
        point: at(vec![Complex::new(0.3, 0.0)]),
        phase: 0.0,
        weight: 1.0,
    };
    let backend = MeasurementBackend::new(fock(0));
    let ideal = (-0.18f64).exp();
    assert!(
        (backend
            .expected_signal(&sample.point, &angles, 0.0)
            .unwrap()
            - ideal)
            .abs()
            < 1e-14
    );
    for (k, p) in [0.01, 0.05, 0.1].into_iter().enumerate() {
        let config = ProtocolConfig::new(angles.clone(), p, 10, SignMode::PairedPhases, 4).unwrap();
        let mut rng = substream(4, &[k as u64]);
        let n = 20_000;
        let s: Vec<f64> = (0..n)
            .map(|_| backend.measure_signal(&sample, &config, &mut rng).unwrap())
            .collect();
        let mean = s.iter().sum::<f64>() / n as f64;
        let se = (s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0) / n as f64)
            .sqrt();
        assert!(
            (mean - (1.0 - 2.0 * p) * ideal).abs() <= 3.0 * se,
            "p={p}: {mean} ± {se}"
        );
    }
}

#[test]
fn batches_are_deterministic_and_logs_round_trip() {
    let w = ideal_w_state(3, &[0.2, -0.4]).unwrap();
    let mut config =
        ProtocolConfig::new(ParityAngles::pi(3), 0.02, 10, SignMode::PairedPhases, 5).unwrap();
    config.record_shots = true;
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    let batches: Vec<_> = (0..20)
        .map(|k| {
            let sample = SampledPoint {
                point: random_point(&mut rng, 3),
                phase: 0.3,
                weight: 1.7,
            };
            let a = run_batch(&w, Some("D:100"), &sample, &config, k).unwrap();
            assert_eq!(
                a,
                run_batch(&w, Some("D:100"), &sample, &config, k).unwrap()
            );
            a
        })
        .collect();
    let mut buf = Vec::new();
    write_shot_log(&mut buf, &batches).unwrap();
    let back = read_shot_log(std::io::Cursor::new(buf)).unwrap();
    assert_eq!(back, batches);
}
