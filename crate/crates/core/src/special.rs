//! Associated Laguerre polynomials and Fock-basis displacement matrix elements.

use num_complex::Complex;

use crate::scalar::Scalar;

/// Associated Laguerre polynomial `L_n^{(k)}(x)` by the three-term recurrence.
pub fn laguerre<T: Scalar>(n: usize, k: usize, x: T) -> T {
    let k = T::from_count(k);
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = T::one() + k - x;
    for j in 1..n {
        let jf = T::from_count(j);
        let next =
            ((T::lit(2.0) * jf + T::one() + k - x) * cur - (jf + k) * prev) / (jf + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// `sqrt(small! / large!)` for `small <= large`.
pub fn sqrt_factorial_ratio<T: Scalar>(small: usize, large: usize) -> T {
    debug_assert!(small <= large);
    let mut log = T::zero();
    for j in (small + 1)..=large {
        log = log + T::from_count(j).ln();
    }
    (-T::lit(0.5) * log).exp()
}

/// `|⟨m|D(γ)|n⟩|` as a function of `ρ = |γ|` only.
pub fn displacement_magnitude<T: Scalar>(m: usize, n: usize, rho: T) -> T {
    let (small, large) = if m <= n { (m, n) } else { (n, m) };
    let x = rho * rho;
    let power = if large == small {
        T::one()
    } else {
        rho.powi((large - small) as i32)
    };
    sqrt_factorial_ratio::<T>(small, large)
        * power
        * (-T::lit(0.5) * x).exp()
        * laguerre(small, large - small, x).abs()
}

/// Matrix element `⟨row|D(α)|col⟩` of the displacement operator
/// `D(α) = exp(α a† − α* a)`.
pub fn displacement_element<T: Scalar>(row: usize, col: usize, alpha: Complex<T>) -> Complex<T> {
    let x = alpha.norm_sqr();
    let envelope = (-T::lit(0.5) * x).exp();
    if row >= col {
        let d = row - col;
        let amp = sqrt_factorial_ratio::<T>(col, row) * envelope * laguerre(col, d, x);
        alpha.powu(d as u32) * amp
    } else {
        let d = col - row;
        let amp = sqrt_factorial_ratio::<T>(row, col) * envelope * laguerre(row, d, x);
        (-alpha.conj()).powu(d as u32) * amp
    }
}

/// Positive roots of `L_n^{(k)}(x)`, located by sign changes on a grid and
/// refined by bisection.
pub fn laguerre_roots(n: usize, k: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    // All roots lie below n + (n-1) sqrt(n + k) + k + 2 (a crude but safe bound).
    let nf = n as f64;
    let kf = k as f64;
    let upper = 2.0 * nf + kf + 2.0 + (nf - 1.0).max(0.0) * (nf + kf).sqrt() * 2.0;
    let steps = 4000 * n;
    let h = upper / steps as f64;
    let mut roots = Vec::with_capacity(n);
    let mut x0 = 1e-12;
    let mut f0: f64 = laguerre(n, k, x0);
    for i in 1..=steps {
        let x1 = i as f64 * h;
        let f1: f64 = laguerre(n, k, x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0.signum() != f1.signum() {
            let (mut lo, mut hi) = (x0, x1);
            let flo = f0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm: f64 = laguerre(n, k, mid);
                if fm.signum() == flo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-15 * hi.max(1.0) {
                    break;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
        if roots.len() == n {
            break;
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn laguerre_low_orders() {
        let x = 0.7_f64;
        assert_abs_diff_eq!(laguerre(0, 3, x), 1.0);
        assert_abs_diff_eq!(laguerre(1, 2, x), 3.0 - x, epsilon = 1e-15);
        // L_2^{(1)}(x) = (x^2 - 6x + 6)/2
        assert_abs_diff_eq!(
            laguerre(2, 1, x),
            (x * x - 6.0 * x + 6.0) / 2.0,
            epsilon = 1e-14
        );
        // L_3^{(0)}(x) = (-x^3 + 9x^2 - 18x + 6)/6
        let l3 = (-x.powi(3) + 9.0 * x * x - 18.0 * x + 6.0) / 6.0;
        assert_abs_diff_eq!(laguerre(3, 0, x), l3, epsilon = 1e-14);
    }

    #[test]
    fn vacuum_and_first_coefficient() {
        let a = Complex::new(0.3_f64, -0.8);
        let env = (-a.norm_sqr() / 2.0).exp();
        let v = displacement_element(0, 0, a);
        assert_abs_diff_eq!(v.re, env, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        let v = displacement_element(1, 0, a);
        assert_abs_diff_eq!((v - a * env).norm(), 0.0, epsilon = 1e-15);
        let v = displacement_element(0, 1, a);
        assert_abs_diff_eq!((v + a.conj() * env).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_displacement_is_identity() {
        for m in 0..6 {
            for n in 0..6 {
                let v = displacement_element(m, n, Complex::new(0.0_f64, 0.0));
                let expect = if m == n { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(v.re, expect, epsilon = 1e-15);
                assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn single_precision_tracks_double() {
        let a64 = Complex::new(0.7_f64, 0.4);
        let a32 = Complex::new(0.7_f32, 0.4);
        for (m, n) in [(3, 2), (0, 4), (2, 2)] {
            let d64 = displacement_element(m, n, a64);
            let d32 = displacement_element(m, n, a32);
            assert!((d64.re - d32.re as f64).abs() < 1e-6);
            assert!((d64.im - d32.im as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn magnitude_matches_element() {
        let a = Complex::new(-1.1_f64, 0.9);
        for m in 0..5 {
            for n in 0..5 {
                let mag = displacement_magnitude(m, n, a.norm());
                assert_abs_diff_eq!(mag, displacement_element(m, n, a).norm(), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn roots_are_roots() {
        for n in 1..5 {
            for k in 0..4 {
                let roots = laguerre_roots(n, k);
                assert_eq!(roots.len(), n, "n={n} k={k}");
                for r in roots {
                    assert!(laguerre::<f64>(n, k, r).abs() < 1e-10);
                }
            }
        }
    }
}
