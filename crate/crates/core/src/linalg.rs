//! Small dense complex linear algebra: everything the representation and synthesis code needs,
//! written against the [`Real`] abstraction so it runs in `f32` and `f64` alike.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{LopError, Result};
use crate::scalar::{real, scale, CMatrix, CVector, Real, C};

pub fn identity<T: Real>(n: usize) -> CMatrix<T> {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { C::one() } else { C::zero() })
}

pub fn dagger<T: Real>(m: ArrayView2<C<T>>) -> CMatrix<T> {
    m.t().mapv(|z| z.conj())
}

pub fn max_abs<T: Real>(m: ArrayView2<C<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff<T: Real>(a: ArrayView2<C<T>>, b: ArrayView2<C<T>>) -> T {
    assert_eq!(a.dim(), b.dim(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc.max((*x - *y).norm()))
}

pub fn frobenius_norm<T: Real>(m: ArrayView2<C<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// `max |M^dag M - I|`, or infinity for non-square input.
pub fn unitarity_deviation<T: Real>(m: ArrayView2<C<T>>) -> T {
    let (r, c) = m.dim();
    if r != c {
        return T::infinity();
    }
    let prod = dagger(m).dot(&m);
    max_abs_diff(prod.view(), identity::<T>(r).view())
}

/// `max |A + A^dag|`.
pub fn anti_hermiticity_deviation<T: Real>(m: ArrayView2<C<T>>) -> T {
    let (r, c) = m.dim();
    if r != c {
        return T::infinity();
    }
    let sum = &m + &dagger(m);
    max_abs(sum.view())
}

pub fn hermiticity_deviation<T: Real>(m: ArrayView2<C<T>>) -> T {
    let (r, c) = m.dim();
    if r != c {
        return T::infinity();
    }
    max_abs_diff(m, dagger(m).view())
}

pub fn vdot<T: Real>(a: ArrayView1<C<T>>, b: ArrayView1<C<T>>) -> C<T> {
    a.iter()
        .zip(b.iter())
        .fold(C::zero(), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm<T: Real>(v: ArrayView1<C<T>>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

fn one_norm<T: Real>(m: ArrayView2<C<T>>) -> T {
    m.columns()
        .into_iter()
        .map(|col| col.iter().fold(T::zero(), |acc, z| acc + z.norm()))
        .fold(T::zero(), T::max)
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
///
/// The argument is scaled until its 1-norm is below 1/4, the series is summed until the next
/// term no longer changes the partial sum, and the result is squared back.
pub fn expm<T: Real>(m: ArrayView2<C<T>>) -> CMatrix<T> {
    let n = m.nrows();
    let norm = one_norm(m);
    let mut squarings = 0i32;
    if norm > T::lit(0.25) {
        squarings = (norm / T::lit(0.25)).log2().ceil().to_i32().unwrap_or(0).max(0);
    }
    let factor = T::lit(2.0).powi(-squarings);
    let x = m.mapv(|z| scale(z, factor));

    let mut sum = identity::<T>(n);
    let mut term = identity::<T>(n);
    for k in 1..=40 {
        term = term.dot(&x).mapv(|z| scale(z, T::one() / T::from_usize(k).unwrap()));
        sum = &sum + &term;
        if max_abs(term.view()) <= T::epsilon() * max_abs(sum.view()) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.dot(&sum);
    }
    sum
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues (unsorted) and a unitary whose columns are the matching eigenvectors.
pub fn hermitian_eigen<T: Real>(h: ArrayView2<C<T>>) -> (Vec<T>, CMatrix<T>) {
    let n = h.nrows();
    let mut a = h.to_owned();
    let mut v = identity::<T>(n);
    let scale_ref = max_abs(h).max(T::min_positive_value());

    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + a[[p, q]].norm_sqr();
            }
        }
        if off.sqrt() <= T::epsilon() * scale_ref {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[[p, q]];
                let gabs = g.norm();
                if gabs <= T::epsilon() * T::epsilon() * scale_ref {
                    continue;
                }
                let phase = scale(g, T::one() / gabs);
                let app = a[[p, p]].re;
                let aqq = a[[q, q]].re;
                let tau = (aqq - app) / (gabs + gabs);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = t * cs;
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]] restricted to (p, q)
                let gpp = real(cs);
                let gpq = real(sn);
                let gqp = scale(phase.conj(), -sn);
                let gqq = scale(phase.conj(), cs);

                for r in 0..n {
                    let xp = a[[r, p]];
                    let xq = a[[r, q]];
                    a[[r, p]] = xp * gpp + xq * gqp;
                    a[[r, q]] = xp * gpq + xq * gqq;
                }
                for k in 0..n {
                    let xp = a[[p, k]];
                    let xq = a[[q, k]];
                    a[[p, k]] = gpp.conj() * xp + gqp.conj() * xq;
                    a[[q, k]] = gpq.conj() * xp + gqq.conj() * xq;
                }
                for r in 0..n {
                    let xp = v[[r, p]];
                    let xq = v[[r, q]];
                    v[[r, p]] = xp * gpp + xq * gqp;
                    v[[r, q]] = xp * gpq + xq * gqq;
                }
                a[[p, q]] = C::zero();
                a[[q, p]] = C::zero();
                a[[p, p]] = real(a[[p, p]].re);
                a[[q, q]] = real(a[[q, q]].re);
            }
        }
    }
    ((0..n).map(|i| a[[i, i]].re).collect(), v)
}

/// Principal square root of a Hermitian positive semidefinite matrix. Tiny negative eigenvalues
/// produced by rounding are clamped to zero.
pub fn psd_sqrt<T: Real>(h: ArrayView2<C<T>>) -> CMatrix<T> {
    let (vals, vecs) = hermitian_eigen(h);
    let n = vals.len();
    let mut out = CMatrix::<T>::zeros((n, n));
    for (k, &lam) in vals.iter().enumerate() {
        let root = lam.max(T::zero()).sqrt();
        for i in 0..n {
            for j in 0..n {
                out[[i, j]] = out[[i, j]] + scale(vecs[[i, k]] * vecs[[j, k]].conj(), root);
            }
        }
    }
    out
}

/// Spectral data of a unitary: `M = V diag(lambda) V^dag`.
pub struct UnitarySpectrum<T: Real> {
    pub eigenvalues: Vec<C<T>>,
    pub eigenvectors: CMatrix<T>,
}

/// Diagonalizes a unitary (normal) matrix.
///
/// `M` is split into commuting Hermitian parts `(M + M^dag)/2` and `(M - M^dag)/2i`; a generic
/// real combination of the two has the eigenvectors of `M`. Combinations that happen to be
/// degenerate in a way `M` is not are detected and retried with another weight.
pub fn unitary_spectrum<T: Real>(m: ArrayView2<C<T>>) -> Result<UnitarySpectrum<T>> {
    let n = m.nrows();
    let md = dagger(m);
    let herm = (&m + &md).mapv(|z| scale(z, T::lit(0.5)));
    let i_half = C::new(T::zero(), T::lit(-0.5));
    let skew = (&m - &md).mapv(|z| z * i_half);
    let tol = T::lit(1e3) * T::epsilon() * T::from_usize(n.max(1)).unwrap();

    for weight in [0.618_034, 1.377_9, 0.271_83, 2.903_7] {
        let w = T::lit(weight);
        let combo = &herm + &skew.mapv(|z| scale(z, w));
        let (_, vecs) = hermitian_eigen(combo.view());
        let diag = dagger(vecs.view()).dot(&m).dot(&vecs);
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(diag[[i, j]].norm());
                }
            }
        }
        if off <= tol {
            let eigenvalues = (0..n)
                .map(|i| {
                    let z = diag[[i, i]];
                    scale(z, T::one() / z.norm())
                })
                .collect();
            return Ok(UnitarySpectrum {
                eigenvalues,
                eigenvectors: vecs,
            });
        }
    }
    Err(LopError::LogarithmFailed(
        "could not diagonalize the unitary to working precision".into(),
    ))
}

/// Builds `V diag(values) V^dag`.
pub fn from_spectrum<T: Real>(vecs: ArrayView2<C<T>>, values: &[C<T>]) -> CMatrix<T> {
    let mut scaled = vecs.to_owned();
    for (k, &val) in values.iter().enumerate() {
        scaled.column_mut(k).mapv_inplace(|z| z * val);
    }
    scaled.dot(&dagger(vecs))
}

/// Completes `k` orthonormal columns of an `n x k` matrix to an `n x n` unitary by
/// Gram-Schmidt against the standard basis, always taking the basis vector with the largest
/// residual next.
pub fn complete_unitary<T: Real>(cols: ArrayView2<C<T>>) -> CMatrix<T> {
    let (n, k) = cols.dim();
    let mut out = CMatrix::<T>::zeros((n, n));
    out.slice_mut(s![.., 0..k]).assign(&cols);
    for col in k..n {
        let mut best: Option<(T, CVector<T>)> = None;
        for e in 0..n {
            let mut v = CVector::<T>::zeros(n);
            v[e] = C::one();
            // two passes of modified Gram-Schmidt for stability
            for _ in 0..2 {
                for j in 0..col {
                    let q = out.column(j);
                    let proj = vdot(q, v.view());
                    v.zip_mut_with(&q, |x, y| *x = *x - proj * y);
                }
            }
            let nv = norm(v.view());
            if best.as_ref().is_none_or(|(b, _)| nv > *b) {
                best = Some((nv, v));
            }
        }
        let (nv, v) = best.expect("at least one candidate");
        out.column_mut(col).assign(&v.mapv(|z| scale(z, T::one() / nv)));
    }
    out
}

/// Haar-random unitary from a complex Ginibre matrix, orthonormalized column by column so the
/// implied triangular factor has a positive diagonal.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = Array2::from_shape_fn((n, n), |_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re * half), T::lit(im * half))
    });
    for j in 0..n {
        for _ in 0..2 {
            for i in 0..j {
                let qi = m.column(i).to_owned();
                let proj = vdot(qi.view(), m.column(j));
                let mut cj = m.column_mut(j);
                cj.zip_mut_with(&qi, |x, y| *x = *x - proj * y);
            }
        }
        let nv = norm(m.column(j));
        m.column_mut(j).mapv_inplace(|z| scale(z, T::one() / nv));
    }
    m
}

/// Complex vector of the given length with entries drawn from the standard complex normal.
pub fn gaussian_vector<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector<T> {
    Array1::from_shape_fn(n, |_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re), T::lit(im))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn expm_of_diagonal_phases() {
        let mut a = CMatrix::<f64>::zeros((3, 3));
        let thetas = [0.3, -1.7, 2.9];
        for (i, t) in thetas.iter().enumerate() {
            a[[i, i]] = Complex::new(0.0, *t);
        }
        let e = expm(a.view());
        for (i, t) in thetas.iter().enumerate() {
            let want = Complex::new(t.cos(), t.sin());
            assert!((e[[i, i]] - want).norm() < 1e-14);
        }
    }

    #[test]
    fn expm_of_nilpotent_is_polynomial() {
        let mut a = CMatrix::<f64>::zeros((2, 2));
        a[[0, 1]] = Complex::new(5.0, -2.0);
        let e = expm(a.view());
        assert!((e[[0, 1]] - Complex::new(5.0, -2.0)).norm() < 1e-13);
        assert!((e[[0, 0]] - Complex::one()).norm() < 1e-14);
        assert!(e[[1, 0]].norm() < 1e-15);
    }

    #[test]
    fn jacobi_diagonalizes_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = haar_unitary::<f64, _>(5, &mut rng);
        let h = (&g + &dagger(g.view())).mapv(|z| z * 0.5);
        let (vals, vecs) = hermitian_eigen(h.view());
        assert!(unitarity_deviation(vecs.view()) < 1e-13);
        let vals_c: Vec<_> = vals.iter().map(|&x| Complex::new(x, 0.0)).collect();
        let rebuilt = from_spectrum(vecs.view(), &vals_c);
        assert!(max_abs_diff(rebuilt.view(), h.view()) < 1e-13);
    }

    #[test]
    fn unitary_spectrum_handles_degenerate_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = haar_unitary::<f64, _>(4, &mut rng);
        let phases = [
            Complex::new(0.0, 1.0),
            Complex::new(0.0, 1.0),
            Complex::new(-1.0, 0.0),
            Complex::new(0.6, 0.8),
        ];
        let m = from_spectrum(v.view(), &phases);
        let spec = unitary_spectrum(m.view()).unwrap();
        let rebuilt = from_spectrum(spec.eigenvectors.view(), &spec.eigenvalues);
        assert!(max_abs_diff(rebuilt.view(), m.view()) < 1e-12);
    }

    #[test]
    fn completion_and_haar_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = haar_unitary::<f64, _>(4, &mut rng);
        assert!(unitarity_deviation(u.view()) < 1e-13);
        let partial = u.slice(s![.., 0..2]).to_owned();
        let full = complete_unitary(partial.view());
        assert!(unitarity_deviation(full.view()) < 1e-13);
        assert!(max_abs_diff(full.slice(s![.., 0..2]), partial.view()) < 1e-15);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = haar_unitary::<f64, _>(3, &mut rng);
        let p = dagger(g.view()).dot(&CMatrix::from_diag(&Array1::from(vec![
            Complex::new(0.5, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(2.0, 0.0),
        ])))
        .dot(&g);
        let r = psd_sqrt(p.view());
        assert!(max_abs_diff(r.dot(&r).view(), p.view()) < 1e-12);
    }
}
