use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wigtomo::hilbert::random_density_matrix;
use wigtomo::sampling::{
    condition_number, measurement_matrix, oli_pool, DemesstSampler, OliOptions, W2Options,
};
use wigtomo::wigner::ketbra_wigner;
use wigtomo::{
    allocate_budget, demesst_sample, element_operators, enumerate_basis,
    generalized_wigner_element, generalized_wigner_state, hoeffding_budget, normalization_c,
    oli_displacement_set, w2_sample, Complex, DensityMatrix, DisplacementPoint, ElementOperator,
    MeasurementBackend, OccupationVector, OperatorKind, ParityAngles,
};

fn occ(s: &str) -> OccupationVector {
    OccupationVector::new(s.chars().map(|c| c.to_digit(10).unwrap()).collect())
}

/// CDF of the radial density `∝ r² e^{-2r²}` (one-photon ket-bra at θ = π),
/// by trapezoid integration on a fine grid.
fn one_photon_cdf() -> impl Fn(f64) -> f64 {
    let h = 1e-4;
    let n = 60_000;
    let mut acc = vec![0.0; n + 1];
    let f = |r: f64| r * r * (-2.0 * r * r).exp();
    for i in 1..=n {
        let (a, b) = ((i - 1) as f64 * h, i as f64 * h);
        acc[i] = acc[i - 1] + 0.5 * h * (f(a) + f(b));
    }
    let total = acc[n];
    move |r: f64| {
        let x = (r / h).min(n as f64 - 1.0);
        let i = x.floor() as usize;
        (acc[i] + (x - i as f64) * (acc[i + 1] - acc[i])) / total
    }
}

#[test]
fn one_photon_ketbra_radii() {
    let op = ElementOperator::new(OperatorKind::RealOffDiag, occ("0"), occ("1")).unwrap();
    let n = 100_000;
    let pts = demesst_sample(&op, &ParityAngles::pi(1), n, 31).unwrap();
    let radii: Vec<f64> = pts.iter().map(|p| p.point.alphas()[0].norm()).collect();
    let d = wigtomo_oracle::ks_statistic(&radii, one_photon_cdf());
    assert!(
        d < 0.01 && d < wigtomo_oracle::ks_critical(n, 0.01),
        "KS D = {d}"
    );
}

#[test]
fn two_active_modes_are_independent() {
    let op = ElementOperator::new(OperatorKind::ImagOffDiag, occ("10"), occ("01")).unwrap();
    let n = 100_000;
    let pts = demesst_sample(&op, &ParityAngles::pi(2), n, 32).unwrap();
    let cdf = one_photon_cdf();
    let r0: Vec<f64> = pts.iter().map(|p| p.point.alphas()[0].norm()).collect();
    let r1: Vec<f64> = pts.iter().map(|p| p.point.alphas()[1].norm()).collect();
    let crit = wigtomo_oracle::ks_critical(n, 0.01);
    assert!(wigtomo_oracle::ks_statistic(&r0, &cdf) < crit);
    assert!(wigtomo_oracle::ks_statistic(&r1, &cdf) < crit);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (m0, m1) = (mean(&r0), mean(&r1));
    let cov = r0
        .iter()
        .zip(&r1)
        .map(|(a, b)| (a - m0) * (b - m1))
        .sum::<f64>()
        / n as f64;
    let sd = |v: &[f64], m: f64| (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64).sqrt();
    let corr = cov / (sd(&r0, m0) * sd(&r1, m1));
    assert!(corr.abs() < 0.02, "correlation {corr}");
}

#[test]
fn rotated_ketbra_is_real_nonnegative() {
    let basis = enumerate_basis(2, 2).unwrap();
    let angles = ParityAngles::new(vec![0.9 * PI, 1.1 * PI]).unwrap();
    for op in element_operators(&basis)
        .iter()
        .filter(|o| !o.support().active().is_empty())
    {
        let sampler = DemesstSampler::new(op, &angles).unwrap();
        for p in sampler.sample_many(200, 33, 0).unwrap() {
            let w = ketbra_wigner(op.col(), op.row(), &p.point, &angles).unwrap();
            let shift = if op.kind() == OperatorKind::ImagOffDiag {
                std::f64::consts::FRAC_PI_2
            } else {
                0.0
            };
            let v = Complex::from_polar(1.0, -(p.phase + shift)) * w;
            assert!(v.im.abs() < 1e-10 && v.re >= -1e-10, "{}: {v}", op.label());
        }
    }
}

#[test]
fn samples_are_reproducible_prefixes() {
    let op = ElementOperator::new(OperatorKind::RealOffDiag, occ("100"), occ("010")).unwrap();
    let sampler = DemesstSampler::new(&op, &ParityAngles::pi(3)).unwrap();
    let long = sampler.sample_many(10_000, 34, 5).unwrap();
    assert_eq!(long, sampler.sample_many(10_000, 34, 5).unwrap());
    assert_eq!(
        &long[..5000],
        &sampler.sample_many(5000, 34, 5).unwrap()[..]
    );
    assert_ne!(long, sampler.sample_many(10_000, 35, 5).unwrap());
}

#[test]
fn importance_sampling_is_unbiased() {
    let basis = enumerate_basis(1, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let rho = random_density_matrix(basis.clone(), 3, &mut rng);
    let backend = MeasurementBackend::new(rho.clone());
    for theta in [PI, 0.7 * PI] {
        let angles = ParityAngles::new(vec![theta]).unwrap();
        for op in element_operators(&basis) {
            let sampler = DemesstSampler::new(&op, &angles).unwrap();
            let pts = sampler.sample_many(1_000_000, 37, 0).unwrap();
            let values: Vec<f64> = pts
                .iter()
                .map(|p| p.weight * backend.expected_signal(&p.point, &angles, p.phase).unwrap())
                .collect();
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let se =
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
            let exact = op.expectation(&basis, rho.entries()).unwrap();
            assert!(
                (mean - exact).abs() <= 4.0 * se.max(1e-12),
                "{} θ={theta}: {mean} ± {se} vs {exact}",
                op.label()
            );
        }
    }
}

#[test]
fn importance_sampling_beats_uniform_proposal() {
    let basis = enumerate_basis(1, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(38);
    let rho = random_density_matrix(basis.clone(), 2, &mut rng);
    let angles = ParityAngles::pi(1);
    let c = normalization_c(&angles);
    let radius = 6.0;
    let n = 200_000;
    let var = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)
    };
    for op in element_operators(&basis)
        .into_iter()
        .filter(|o| o.kind() != OperatorKind::Diagonal)
    {
        let backend = MeasurementBackend::new(rho.clone());
        let importance: Vec<f64> = demesst_sample(&op, &angles, n, 39)
            .unwrap()
            .iter()
            .map(|p| p.weight * backend.expected_signal(&p.point, &angles, p.phase).unwrap())
            .collect();
        let uniform: Vec<f64> = (0..n)
            .map(|_| {
                let alpha = Complex::from_polar(
                    radius * rng.random::<f64>().sqrt(),
                    TAU * rng.random::<f64>(),
                );
                let p = DisplacementPoint::full(vec![alpha]).unwrap();
                let w_rho = generalized_wigner_state(&rho, &p, &angles.negated()).unwrap();
                let w_op = generalized_wigner_element(&op, &p, &angles).unwrap();
                (c * PI * radius * radius * w_rho * w_op).re
            })
            .collect();
        assert!(var(&importance) <= var(&uniform), "{}", op.label());
    }
}

#[test]
fn w2_vacuum_radii_follow_squared_magnitude() {
    let basis = enumerate_basis(1, 0).unwrap();
    let vac = DensityMatrix::maximally_mixed(basis);
    let n = 100_000;
    let options = W2Options {
        cutoff: Some(0.0),
        ..W2Options::default()
    };
    let pts = w2_sample(&vac, &ParityAngles::pi(1), n, &options, 40).unwrap();
    let radii: Vec<f64> = pts.iter().map(|p| p.point.alphas()[0].norm()).collect();
    // |W̃|² = e^{-4r²} on d²α gives CDF 1 − e^{-4r²}.
    let d = wigtomo_oracle::ks_statistic(&radii, |r| 1.0 - (-4.0 * r * r).exp());
    assert!(d < 0.02, "KS D = {d}");
    for p in &pts {
        let r = p.point.alphas()[0].norm();
        assert!((p.weight - (-2.0 * r * r).exp()).abs() < 1e-12);
    }
}

#[test]
fn w2_cutoff_above_peak_is_an_error() {
    let w = wigtomo::ideal_w_state(2, &[0.3]).unwrap();
    let options = W2Options {
        cutoff: Some(10.0),
        ..W2Options::default()
    };
    assert!(w2_sample(&w, &ParityAngles::pi(2), 10, &options, 41).is_err());
}

#[test]
fn w2_samples_are_deterministic() {
    let w = wigtomo::ideal_w_state(2, &[0.3]).unwrap();
    let a = w2_sample(&w, &ParityAngles::pi(2), 2000, &W2Options::default(), 42).unwrap();
    let b = w2_sample(&w, &ParityAngles::pi(2), 2000, &W2Options::default(), 42).unwrap();
    assert_eq!(a, b);
}

#[test]
fn oli_set_beats_random_sets() {
    let basis = enumerate_basis(1, 1).unwrap();
    let angles = ParityAngles::pi(1);
    let options = OliOptions {
        pool_size: 200,
        exchange_iterations: 500,
    };
    let set = oli_displacement_set(&basis, &angles, 4, &options, 43).unwrap();
    assert!(set.condition.is_finite());
    assert!(set.condition <= set.greedy_condition + 1e-12);
    let pool = oli_pool(&basis, &angles, options.pool_size, 43).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut random: Vec<f64> = (0..100)
        .map(|_| {
            let pick: Vec<_> = rand::seq::index::sample(&mut rng, pool.len(), 4)
                .iter()
                .map(|k| pool[k].clone())
                .collect();
            condition_number(&measurement_matrix(&basis, &pick, &angles))
        })
        .collect();
    random.sort_by(f64::total_cmp);
    assert!(
        set.condition < random[50],
        "{} vs median {}",
        set.condition,
        random[50]
    );
}

#[test]
fn oli_set_preconditions_and_determinism() {
    let basis = enumerate_basis(2, 1).unwrap();
    let angles = ParityAngles::pi(2);
    let options = OliOptions {
        pool_size: 300,
        exchange_iterations: 200,
    };
    assert!(oli_displacement_set(&basis, &angles, 8, &options, 45).is_err());
    let a = oli_displacement_set(&basis, &angles, 18, &options, 45).unwrap();
    let b = oli_displacement_set(&basis, &angles, 18, &options, 45).unwrap();
    assert_eq!(a.points, b.points);
    assert!(a.condition <= a.greedy_condition + 1e-12);
}

#[test]
fn hoeffding_examples() {
    assert_eq!(hoeffding_budget(2.0, 0.1, 0.05), 2952);
    // ln(2/δ) = 1 at δ = 2/e.
    assert_eq!(hoeffding_budget(1.0, 1.0, 2.0 / std::f64::consts::E), 2);
    for (cz, eps, delta) in [(2.0, 0.1, 0.05), (3.5, 0.02, 0.01), (1.0, 0.3, 0.2)] {
        let a = hoeffding_budget(cz, eps, delta) as f64;
        let b = hoeffding_budget(cz, eps / 2.0, delta) as f64;
        assert!((b / a - 4.0).abs() < 4.0 / a);
    }
}

#[test]
fn budget_split_over_elements() {
    let angles = ParityAngles::pi(3);
    let spec = allocate_budget(&enumerate_basis(3, 1).unwrap(), &angles, 0.2, 0.1).unwrap();
    assert!((spec.epsilon2 - 0.05).abs() < 1e-15);
    assert!((spec.delta2 - 0.1 / 16.0).abs() < 1e-15);
    assert_eq!(spec.per_operator.len(), 16);
    assert_eq!(
        spec.total,
        spec.per_operator.iter().map(|o| o.samples).sum::<usize>()
    );

    let trivial = allocate_budget(
        &enumerate_basis(1, 0).unwrap(),
        &ParityAngles::pi(1),
        0.2,
        0.1,
    )
    .unwrap();
    assert_eq!((trivial.epsilon2, trivial.delta2), (0.2, 0.1));

    let totals: Vec<usize> = (2..=5)
        .map(|m| {
            allocate_budget(
                &enumerate_basis(m, 1).unwrap(),
                &ParityAngles::pi(m),
                0.3,
                0.1,
            )
            .unwrap()
            .total
        })
        .collect();
    assert!(totals.windows(2).all(|w| w[1] > w[0]), "{totals:?}");
    // At fixed N the dominant factor is D⁴ with D = M + 1.
    let ratio = totals[3] as f64 / totals[2] as f64;
    assert!(ratio > (6.0f64 / 5.0).powi(4), "growth {ratio}");
}
