//! Slow, independent reference evaluators for tests.
//!
//! Nothing here shares code with `wigtomo`: displacement operators come from
//! exponentiating the truncated generator, bases from exhaustive search.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// All occupation vectors over `modes` modes with total at most `cutoff`,
/// found by scanning the full `(cutoff + 1)^modes` grid.
pub fn brute_force_states(modes: usize, cutoff: usize) -> Vec<Vec<u32>> {
    let base = cutoff as u64 + 1;
    let count = base.pow(modes as u32);
    let mut out = Vec::new();
    for code in 0..count {
        let mut v = Vec::with_capacity(modes);
        let mut c = code;
        for _ in 0..modes {
            v.push((c % base) as u32);
            c /= base;
        }
        if v.iter().sum::<u32>() as usize <= cutoff {
            out.push(v);
        }
    }
    out
}

/// Truncated annihilation operator on `dim` levels.
pub fn annihilation(dim: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// `exp(i H)` for Hermitian `H` by eigendecomposition.
pub fn expm_i_hermitian(h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::new(0.0, l).exp()),
    );
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&phases) * v.adjoint()
}

/// `D(α) = exp(α a† − α* a)` truncated to `dim` levels. The generator is
/// anti-Hermitian, so `D = exp(i H)` with `H = −i(α a† − α* a)`.
pub fn displacement_matrix(alpha: Complex64, dim: usize) -> DMatrix<Complex64> {
    let a = annihilation(dim);
    let gen = a.adjoint() * alpha - &a * alpha.conj();
    let h = gen * Complex64::new(0.0, -1.0);
    expm_i_hermitian(&h)
}

/// `⟨row|D(α)|col⟩` from a matrix exponential at truncation `dim`.
pub fn displacement_element(row: usize, col: usize, alpha: Complex64, dim: usize) -> Complex64 {
    displacement_matrix(alpha, dim)[(row, col)]
}

/// `D(α) e^{iθ n̂} D†(α)` on `dim` levels.
pub fn parity_kernel(alpha: Complex64, theta: f64, dim: usize) -> DMatrix<Complex64> {
    let d = displacement_matrix(alpha, dim);
    let rot = DMatrix::from_diagonal(&DVector::from_iterator(
        dim,
        (0..dim).map(|n| Complex64::from_polar(1.0, theta * n as f64)),
    ));
    &d * rot * d.adjoint()
}

/// `Tr[ρ X]` for a single-mode `ρ` given on its first `rho.nrows()` levels,
/// with `X` built at truncation `dim`.
pub fn single_mode_wigner(
    rho: &DMatrix<Complex64>,
    alpha: Complex64,
    theta: f64,
    dim: usize,
) -> Complex64 {
    let x = parity_kernel(alpha, theta, dim);
    let n = rho.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho[(i, j)] * x[(j, i)];
        }
    }
    acc
}

/// `Tr[ρ (X_1 ⊗ X_2)]` for a two-mode `ρ` indexed by `(n_1, n_2)` pairs.
pub fn two_mode_wigner(
    rho: &DMatrix<Complex64>,
    states: &[(usize, usize)],
    alphas: [Complex64; 2],
    thetas: [f64; 2],
    dim: usize,
) -> Complex64 {
    let x1 = parity_kernel(alphas[0], thetas[0], dim);
    let x2 = parity_kernel(alphas[1], thetas[1], dim);
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &(a1, a2)) in states.iter().enumerate() {
        for (j, &(b1, b2)) in states.iter().enumerate() {
            acc += rho[(i, j)] * x1[(b1, a1)] * x2[(b2, a2)];
        }
    }
    acc
}

/// Stratified Monte-Carlo estimate of `∫ f` over the disc of radius `r`
/// using an `n × n` jittered grid on the bounding square. `jitter` supplies
/// uniform numbers in `[0, 1)`.
pub fn disc_integral<F, J>(f: F, r: f64, n: usize, mut jitter: J) -> f64
where
    F: Fn(f64, f64) -> f64,
    J: FnMut() -> f64,
{
    let h = 2.0 * r / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = -r + (i as f64 + jitter()) * h;
            let y = -r + (j as f64 + jitter()) * h;
            if x * x + y * y <= r * r {
                acc += f(x, y);
            }
        }
    }
    acc * h * h
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value `c(a)/√n` at significance `a`.
pub fn ks_critical(n: usize, significance: f64) -> f64 {
    (-0.5 * (significance / 2.0).ln()).sqrt() / (n as f64).sqrt()
}
