use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::hilbert::{DensityMatrix, FockBasis};
use crate::Complex;

/// Element-operator coordinates `Tr[ρ O_k]` of a matrix, in
/// [`crate::hilbert::element_operators`] order (Hermitian part only).
pub fn to_coordinates(m: &DMatrix<Complex>) -> Vec<f64> {
    let d = m.nrows();
    let mut x = Vec::with_capacity(d * d);
    for i in 0..d {
        x.push(m[(i, i)].re);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            x.push(SQRT_2 * z.re);
            x.push(SQRT_2 * z.im);
        }
    }
    x
}

/// Inverse of [`to_coordinates`].
pub fn from_coordinates(x: &[f64], d: usize) -> DMatrix<Complex> {
    debug_assert_eq!(x.len(), d * d);
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = Complex::new(x[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = Complex::new(x[k], x[k + 1]) * FRAC_1_SQRT_2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Euclidean projection of `v` onto the probability simplex.
pub fn simplex_projection(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

fn recompose(vectors: &DMatrix<Complex>, values: &[f64]) -> DMatrix<Complex> {
    let d = values.len();
    let diag = DVector::from_iterator(d, values.iter().map(|&l| Complex::new(l, 0.0)));
    let m = vectors * DMatrix::from_diagonal(&diag) * vectors.adjoint();
    (&m + m.adjoint()).scale(0.5)
}

/// Frobenius-nearest density matrix: eigenvalues of the Hermitian part
/// projected onto the simplex.
pub fn project_to_density(m: &DMatrix<Complex>) -> DMatrix<Complex> {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    recompose(&eig.eigenvectors, &simplex_projection(&ev))
}

/// Negative eigenvalues set to zero, then the trace rescaled to one. A
/// matrix with no positive eigenvalue maps to the maximally mixed state.
pub fn clip_to_physical(m: &DensityMatrix) -> DensityMatrix {
    let e = m.entries();
    let h = (e + e.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let basis: Arc<FockBasis> = m.basis().clone();
    if !(total > 0.0) {
        return DensityMatrix::maximally_mixed(basis);
    }
    let values: Vec<f64> = clipped.iter().map(|l| l / total).collect();
    let out = recompose(&eig.eigenvectors, &values);
    DensityMatrix::physical(basis.clone(), out.clone())
        .or_else(|_| DensityMatrix::raw(basis, out))
        .expect("dimensions match")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{enumerate_basis, random_hermitian};
    use rand::SeedableRng;

    #[test]
    fn coordinates_round_trip_and_agree_with_operators() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let b = enumerate_basis(2, 2).unwrap();
        let m = random_hermitian(b.dimension(), &mut rng);
        let x = to_coordinates(&m);
        let dm = DensityMatrix::raw(b.clone(), m.clone()).unwrap();
        let slow = dm.element_expectations();
        for (a, s) in x.iter().zip(&slow) {
            assert!((a - s).abs() < 1e-14);
        }
        assert!((from_coordinates(&x, b.dimension()) - m).norm() < 1e-13);
    }

    #[test]
    fn simplex_cases() {
        assert_eq!(simplex_projection(&[0.5, 0.5]), vec![0.5, 0.5]);
        let p = simplex_projection(&[2.0, 0.0, -1.0]);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        let p = simplex_projection(&[0.4, 0.4, 0.4]);
        for x in p {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }
}
