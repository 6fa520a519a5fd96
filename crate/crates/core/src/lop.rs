//! The representation of U(N) on n-photon Fock sectors induced by a linear-optical passive
//! transformation `b_i = M_ij a_j`.
//!
//! Two independent constructions are provided:
//!
//! * [`lift_unitary`] evaluates every matrix element as a permanent,
//!   `<m|U|n> = perm(M[m|n]) / sqrt(prod m_i! prod n_j!)`, where `M[m|n]` repeats row `i`
//!   `m_i` times and column `j` `n_j` times;
//! * [`lift_via_js_exponential`] takes `A = log M` and exponentiates the Jordan-Schwinger image
//!   `JS(A) = sum_ij A_ij a_i^dag a_j` restricted to the sector.
//!
//! With this convention the one-photon block is `M` itself and lifting is a homomorphism,
//! `lift(M1 M2) = lift(M1) lift(M2)`.

use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{LopError, Result};
use crate::fock::{FockBasis, OccupationVector, PureState};
use crate::linalg::{
    anti_hermiticity_deviation, dagger, expm, from_spectrum, identity, unitarity_deviation,
    unitary_spectrum,
};
use crate::permanent::permanent;
use crate::scalar::{real, scale, CMatrix, Real, C};

/// Unitary `N x N` matrix acting on mode operators.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary<T: Real = f64> {
    matrix: CMatrix<T>,
}

impl<T: Real> ModeUnitary<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        Self::with_tolerance(matrix, T::default_tolerance())
    }

    pub fn with_tolerance(matrix: CMatrix<T>, tol: T) -> Result<Self> {
        let (rows, cols) = matrix.dim();
        if rows != cols {
            return Err(LopError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(LopError::ZeroModes);
        }
        let deviation = unitarity_deviation(matrix.view());
        if deviation.is_nan() || deviation > tol {
            return Err(LopError::NotUnitary {
                deviation: deviation.as_f64(),
            });
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix<T>) -> Self {
        Self { matrix }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: identity(n),
        }
    }

    /// `[[alpha, beta], [-conj(beta), conj(alpha)]]` with `alpha = e^{i chi} cos(theta)`,
    /// `beta = e^{i phi} sin(theta)`.
    pub fn su2(theta: T, chi: T, phi: T) -> Self {
        let alpha = Complex::from_polar(theta.cos(), chi);
        let beta = Complex::from_polar(theta.sin(), phi);
        let matrix = ndarray::arr2(&[[alpha, beta], [-beta.conj(), alpha.conj()]]);
        Self { matrix }
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    /// Matrix product `self * other`: `other` acts first.
    pub fn compose(&self, other: &ModeUnitary<T>) -> Result<ModeUnitary<T>> {
        if self.size() != other.size() {
            return Err(LopError::DimensionMismatch(format!(
                "cannot compose {}-mode and {}-mode unitaries",
                self.size(),
                other.size()
            )));
        }
        Ok(Self {
            matrix: self.matrix.dot(&other.matrix),
        })
    }

    pub fn dagger(&self) -> ModeUnitary<T> {
        Self {
            matrix: dagger(self.matrix.view()),
        }
    }

    pub fn to_json(&self) -> ModeUnitaryJson {
        ModeUnitaryJson {
            size: self.size(),
            matrix: matrix_to_json(self.matrix.view()),
        }
    }

    pub fn from_json(json: &ModeUnitaryJson, tol: T) -> Result<Self> {
        let m = matrix_from_json(&json.matrix)?;
        if m.nrows() != json.size {
            return Err(LopError::DimensionMismatch(format!(
                "declared size {} but matrix has {} rows",
                json.size,
                m.nrows()
            )));
        }
        Self::with_tolerance(m, tol)
    }
}

/// Wire form of a [`ModeUnitary`]: row-major `[[[re, im], ...], ...]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeUnitaryJson {
    pub size: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

pub fn matrix_to_json<T: Real>(m: ArrayView2<C<T>>) -> Vec<Vec<[f64; 2]>> {
    m.rows()
        .into_iter()
        .map(|row| row.iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect())
        .collect()
}

pub fn matrix_from_json<T: Real>(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix<T>> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(LopError::DimensionMismatch("ragged matrix rows".into()));
    }
    let mut m = CMatrix::<T>::zeros((n, cols));
    for (i, row) in rows.iter().enumerate() {
        for (j, [re, im]) in row.iter().enumerate() {
            m[[i, j]] = Complex::new(T::lit(*re), T::lit(*im));
        }
    }
    Ok(m)
}

/// Anti-Hermitian element of u(N).
#[derive(Clone, Debug)]
pub struct AlgebraElement<T: Real = f64> {
    matrix: CMatrix<T>,
}

impl<T: Real> AlgebraElement<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        Self::with_tolerance(matrix, T::default_tolerance())
    }

    pub fn with_tolerance(matrix: CMatrix<T>, tol: T) -> Result<Self> {
        let (rows, cols) = matrix.dim();
        if rows != cols {
            return Err(LopError::NotSquare { rows, cols });
        }
        let deviation = anti_hermiticity_deviation(matrix.view());
        if deviation.is_nan() || deviation > tol {
            return Err(LopError::NotAntiHermitian {
                deviation: deviation.as_f64(),
            });
        }
        Ok(Self { matrix })
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Principal logarithm of a unitary, `M = exp(A)` with eigenphases in `(-pi, pi]`.
    pub fn log_of(m: &ModeUnitary<T>) -> Result<Self> {
        let spec = unitary_spectrum(m.matrix().view())?;
        let logs: Vec<C<T>> = spec
            .eigenvalues
            .iter()
            .map(|z| Complex::new(T::zero(), z.im.atan2(z.re)))
            .collect();
        let a = from_spectrum(spec.eigenvectors.view(), &logs);
        // remove rounding-level Hermitian part
        let a = (&a - &dagger(a.view())).mapv(|z| scale(z, T::lit(0.5)));
        Ok(Self { matrix: a })
    }
}

/// The sector-`n` image of a mode unitary.
#[derive(Clone, Debug)]
pub struct LiftedUnitary<T: Real = f64> {
    basis: Arc<FockBasis>,
    matrix: CMatrix<T>,
}

impl<T: Real> LiftedUnitary<T> {
    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn basis_arc(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Matrix element `<out|U|in>`.
    pub fn element(&self, out: &OccupationVector, input: &OccupationVector) -> Option<C<T>> {
        Some(self.matrix[[self.basis.index_of(out)?, self.basis.index_of(input)?]])
    }

    /// `L * other` on the same sector.
    pub fn compose(&self, other: &LiftedUnitary<T>) -> Result<LiftedUnitary<T>> {
        self.basis.ensure_same(&other.basis)?;
        Ok(Self {
            basis: self.basis.clone(),
            matrix: self.matrix.dot(&other.matrix),
        })
    }

    pub fn apply(&self, state: &PureState<T>) -> Result<PureState<T>> {
        apply(self, state)
    }
}

fn sector_basis(modes: usize, photons: usize) -> Result<Arc<FockBasis>> {
    Ok(Arc::new(FockBasis::sector(modes, photons)?))
}

fn expand_indices(occ: &OccupationVector) -> Vec<usize> {
    occ.as_slice()
        .iter()
        .enumerate()
        .flat_map(|(mode, &k)| std::iter::repeat_n(mode, k))
        .collect()
}

/// Sector-`n` matrix of the lifted unitary, one permanent per matrix element.
pub fn lift_unitary<T: Real>(m: &ModeUnitary<T>, photons: usize) -> Result<LiftedUnitary<T>> {
    let basis = sector_basis(m.size(), photons)?;
    let d = basis.len();
    let expanded: Vec<Vec<usize>> = basis.states().iter().map(expand_indices).collect();
    let norms: Vec<T> = basis
        .states()
        .iter()
        .map(|s| T::lit(s.factorial_product().sqrt()))
        .collect();
    let mut out = CMatrix::<T>::zeros((d, d));
    let mut sub = CMatrix::<T>::zeros((photons, photons));
    for (r, rows) in expanded.iter().enumerate() {
        for (c, cols) in expanded.iter().enumerate() {
            for (i, &ri) in rows.iter().enumerate() {
                for (j, &cj) in cols.iter().enumerate() {
                    sub[[i, j]] = m.matrix[[ri, cj]];
                }
            }
            let p = permanent(sub.view())?;
            out[[r, c]] = scale(p, T::one() / (norms[r] * norms[c]));
        }
    }
    Ok(LiftedUnitary { basis, matrix: out })
}

/// Matrix of the hopping operator `a_i^dag a_j` on `basis` (0-based modes).
///
/// `a_j` maps `|..k_j..>` to `sqrt(k_j) |..k_j - 1..>`, and `a_i^dag` maps `|..k_i..>` to
/// `sqrt(k_i + 1) |..k_i + 1..>`; for `i == j` the operator is the number operator.
pub fn hopping_operator<T: Real>(basis: &FockBasis, i: usize, j: usize) -> CMatrix<T> {
    let d = basis.len();
    let mut out = CMatrix::<T>::zeros((d, d));
    for (col, occ) in basis.states().iter().enumerate() {
        let kj = occ.get(j);
        if kj == 0 {
            continue;
        }
        let mut next = occ.as_slice().to_vec();
        next[j] -= 1;
        let after_annihilation = T::lit(kj as f64).sqrt();
        next[i] += 1;
        let ki_new = next[i];
        let amp = after_annihilation * T::lit(ki_new as f64).sqrt();
        if let Some(row) = basis.index_of(&OccupationVector::new(next)) {
            out[[row, col]] = real(amp);
        }
    }
    out
}

/// `JS(A) = sum_ij A_ij a_i^dag a_j` restricted to the `photons` sector.
pub fn js_operator_matrix<T: Real>(a: &AlgebraElement<T>, photons: usize) -> Result<CMatrix<T>> {
    let basis = FockBasis::sector(a.size(), photons)?;
    Ok(js_on_basis(a.matrix().view(), &basis))
}

fn js_on_basis<T: Real>(a: ArrayView2<C<T>>, basis: &FockBasis) -> CMatrix<T> {
    let n = a.nrows();
    let d = basis.len();
    let mut out = CMatrix::<T>::zeros((d, d));
    for i in 0..n {
        for j in 0..n {
            let coef = a[[i, j]];
            if coef.is_zero() {
                continue;
            }
            let h = hopping_operator::<T>(basis, i, j);
            out.zip_mut_with(&h, |o, x| *o = *o + coef * x);
        }
    }
    out
}

/// Distance from `-1` below which the logarithm branch cut is moved.
const BRANCH_CUT_GUARD: f64 = 1e-12;

/// Sector-`n` matrix of the lifted unitary computed as `exp(JS(log M))`.
///
/// When an eigenvalue of `M` sits on the branch cut at `-1`, `M` is first multiplied by a
/// global phase `e^{i delta}`; the lifted result is then multiplied by `e^{-i n delta}`, the
/// phase that `e^{i delta} I` induces on an `n`-photon sector.
pub fn lift_via_js_exponential<T: Real>(
    m: &ModeUnitary<T>,
    photons: usize,
) -> Result<LiftedUnitary<T>> {
    let basis = sector_basis(m.size(), photons)?;
    let guard = T::lit(BRANCH_CUT_GUARD);
    let touches_cut = |u: &ModeUnitary<T>| -> Result<bool> {
        let spec = unitary_spectrum(u.matrix().view())?;
        Ok(spec.eigenvalues.iter().any(|z| (*z + C::one()).norm() < guard))
    };

    let mut delta = T::zero();
    let mut shifted = m.clone();
    if touches_cut(m)? {
        let mut found = false;
        for candidate in [0.5, 0.9, 1.3, 1.7] {
            let d = T::lit(candidate);
            let phase = Complex::from_polar(T::one(), d);
            let trial = ModeUnitary::from_matrix_unchecked(m.matrix().mapv(|z| z * phase));
            if !touches_cut(&trial)? {
                delta = d;
                shifted = trial;
                found = true;
                break;
            }
        }
        if !found {
            return Err(LopError::LogarithmFailed(
                "no phase shift moves the spectrum off the branch cut".into(),
            ));
        }
    }
    let on_cut = !delta.is_zero();
    let a = AlgebraElement::log_of(&shifted)?;
    let js = js_on_basis(a.matrix().view(), &basis);
    let mut lifted = expm(js.view());
    if on_cut {
        let undo = Complex::from_polar(T::one(), -delta * T::lit(photons as f64));
        lifted.mapv_inplace(|z| z * undo);
    }
    Ok(LiftedUnitary {
        basis,
        matrix: lifted,
    })
}

/// Applies a lifted unitary to a state on the same sector.
pub fn apply<T: Real>(l: &LiftedUnitary<T>, s: &PureState<T>) -> Result<PureState<T>> {
    l.basis.ensure_same(s.basis())?;
    let out: Array1<C<T>> = l.matrix.dot(s.amplitudes());
    Ok(PureState::from_parts(l.basis.clone(), out))
}

/// Wraps an explicit matrix as a lifted operator on `basis`, checking only the shape.
pub fn lifted_from_matrix<T: Real>(
    basis: Arc<FockBasis>,
    matrix: CMatrix<T>,
) -> Result<LiftedUnitary<T>> {
    if matrix.dim() != (basis.len(), basis.len()) {
        return Err(LopError::DimensionMismatch(format!(
            "{:?} matrix for a basis of {} states",
            matrix.dim(),
            basis.len()
        )));
    }
    Ok(LiftedUnitary { basis, matrix })
}

/// Closed-form sector-2 image of the two-mode matrix `[[alpha, beta], [-conj(beta), conj(alpha)]]`
/// in the basis `|20>, |11>, |02>`.
pub fn two_photon_su2_closed_form<T: Real>(alpha: C<T>, beta: C<T>) -> CMatrix<T> {
    let r2 = real(T::lit(2.0).sqrt());
    let (ac, bc) = (alpha.conj(), beta.conj());
    let mid = real(alpha.norm_sqr() - beta.norm_sqr());
    ndarray::arr2(&[
        [alpha * alpha, r2 * alpha * beta, beta * beta],
        [-r2 * alpha * bc, mid, r2 * ac * beta],
        [bc * bc, -r2 * ac * bc, ac * ac],
    ])
}

/// Lifted identity on a sector, handy for products.
pub fn lifted_identity<T: Real>(modes: usize, photons: usize) -> Result<LiftedUnitary<T>> {
    let basis = sector_basis(modes, photons)?;
    let d = basis.len();
    Ok(LiftedUnitary {
        basis,
        matrix: Array2::from_shape_fn((d, d), |(i, j)| if i == j { C::one() } else { C::zero() }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, max_abs_diff};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ModeUnitary<f64> {
        ModeUnitary::new(haar_unitary(n, rng)).unwrap()
    }

    #[test]
    fn identity_lifts_to_identity() {
        for n in 0..4 {
            let l = lift_unitary(&ModeUnitary::<f64>::identity(3), n).unwrap();
            let id = lifted_identity::<f64>(3, n).unwrap();
            assert!(max_abs_diff(l.matrix().view(), id.matrix().view()) < 1e-15);
        }
    }

    #[test]
    fn vacuum_and_single_photon_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_unitary(4, &mut rng);
        let l0 = lift_unitary(&m, 0).unwrap();
        assert_eq!(l0.matrix().dim(), (1, 1));
        assert_eq!(l0.matrix()[[0, 0]], Complex64::one());
        let l1 = lift_unitary(&m, 1).unwrap();
        assert!(max_abs_diff(l1.matrix().view(), m.matrix().view()) <= 1e-14);
    }

    #[test]
    fn two_photon_closed_form_and_action_on_11() {
        let (theta, chi, phi) = (0.37, 1.1, -2.3);
        let m = ModeUnitary::<f64>::su2(theta, chi, phi);
        let alpha = Complex64::from_polar(theta.cos(), chi);
        let beta = Complex64::from_polar(theta.sin(), phi);
        let l = lift_unitary(&m, 2).unwrap();
        let want = two_photon_su2_closed_form(alpha, beta);
        assert!(max_abs_diff(l.matrix().view(), want.view()) < 1e-14);

        let out = apply(&l, &PureState::from_occupation(&[1, 1]).unwrap()).unwrap();
        let r2 = 2f64.sqrt();
        assert!((out.amplitude(&[2, 0]) - r2 * alpha * beta).norm() < 1e-14);
        assert!(
            (out.amplitude(&[1, 1]) - Complex64::new(alpha.norm_sqr() - beta.norm_sqr(), 0.0))
                .norm()
                < 1e-14
        );
        assert!((out.amplitude(&[0, 2]) + r2 * alpha.conj() * beta.conj()).norm() < 1e-14);
    }

    #[test]
    fn hopping_operators_obey_commutation_relations() {
        let basis = FockBasis::sector(3, 3).unwrap();
        let n = 3;
        let ops: Vec<Vec<CMatrix<f64>>> = (0..n)
            .map(|i| (0..n).map(|j| hopping_operator(&basis, i, j)).collect())
            .collect();
        let d = basis.len();
        for i in 0..n {
            for j in 0..n {
                for h in 0..n {
                    for k in 0..n {
                        let lhs = ops[i][j].dot(&ops[h][k]) - ops[h][k].dot(&ops[i][j]);
                        let mut rhs = CMatrix::<f64>::zeros((d, d));
                        if h == j {
                            rhs = &rhs + &ops[i][k];
                        }
                        if i == k {
                            rhs = &rhs - &ops[h][j];
                        }
                        assert!(max_abs_diff(lhs.view(), rhs.view()) < 1e-12, "{i}{j}{h}{k}");
                    }
                }
            }
        }
    }

    #[test]
    fn js_of_zero_and_number_operator() {
        let zero = AlgebraElement::<f64>::new(CMatrix::zeros((3, 3))).unwrap();
        let js = js_operator_matrix(&zero, 2).unwrap();
        assert!(js.iter().all(|z| z.is_zero()));

        let mut a = CMatrix::<f64>::zeros((3, 3));
        a[[0, 0]] = Complex64::new(0.0, 1.0);
        let js = js_operator_matrix(&AlgebraElement::new(a).unwrap(), 3).unwrap();
        let basis = FockBasis::sector(3, 3).unwrap();
        for (r, occ) in basis.states().iter().enumerate() {
            for c in 0..basis.len() {
                let want = if r == c {
                    Complex64::new(0.0, occ.get(0) as f64)
                } else {
                    Complex64::zero()
                };
                assert!((js[[r, c]] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn js_rejects_hermitian_input() {
        let mut a = CMatrix::<f64>::zeros((2, 2));
        a[[0, 0]] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            AlgebraElement::new(a),
            Err(LopError::NotAntiHermitian { .. })
        ));
    }

    #[test]
    fn diagonal_phases_lift_to_photon_counting_phases() {
        let thetas = [0.4, -1.3, 2.2];
        let m = ModeUnitary::<f64>::new(CMatrix::from_diag(&Array1::from(
            thetas
                .iter()
                .map(|t| Complex64::from_polar(1.0, *t))
                .collect::<Vec<_>>(),
        )))
        .unwrap();
        let l = lift_via_js_exponential(&m, 3).unwrap();
        for (i, occ) in l.basis().states().iter().enumerate() {
            let phase: f64 = occ
                .as_slice()
                .iter()
                .zip(thetas.iter())
                .map(|(&k, t)| k as f64 * t)
                .sum();
            for j in 0..l.basis().len() {
                let want = if i == j {
                    Complex64::from_polar(1.0, phase)
                } else {
                    Complex64::zero()
                };
                assert!((l.matrix()[[i, j]] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn js_route_agrees_with_permanent_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let m = random_unitary(3, &mut rng);
            let a = lift_unitary(&m, 2).unwrap();
            let b = lift_via_js_exponential(&m, 2).unwrap();
            assert!(max_abs_diff(a.matrix().view(), b.matrix().view()) < 1e-8);
        }
    }

    #[test]
    fn branch_cut_eigenvalue_handled() {
        // swap has eigenvalue -1; so does a pi phase
        let swap = ndarray::arr2(&[
            [Complex64::zero(), Complex64::one()],
            [Complex64::one(), Complex64::zero()],
        ]);
        let m = ModeUnitary::new(swap).unwrap();
        for n in 0..4 {
            let a = lift_unitary(&m, n).unwrap();
            let b = lift_via_js_exponential(&m, n).unwrap();
            assert!(max_abs_diff(a.matrix().view(), b.matrix().view()) < 1e-10, "n={n}");
        }
        let m = ModeUnitary::<f64>::su2(0.3, PI, 0.0);
        let a = lift_unitary(&m, 2).unwrap();
        let b = lift_via_js_exponential(&m, 2).unwrap();
        assert!(max_abs_diff(a.matrix().view(), b.matrix().view()) < 1e-10);
    }

    #[test]
    fn apply_preserves_norm_and_checks_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = random_unitary(3, &mut rng);
        let l = lift_unitary(&m, 2).unwrap();
        let amps = crate::linalg::gaussian_vector::<f64, _>(l.basis().len(), &mut rng);
        let nrm = crate::linalg::norm(amps.view());
        let s = PureState::new(
            l.basis_arc().clone(),
            amps.mapv(|z| z / nrm * rng.random_range(0.2..1.0)),
        )
        .unwrap();
        let out = apply(&l, &s).unwrap();
        assert!((out.norm() - s.norm()).abs() < 1e-12);
        let wrong = PureState::<f64>::from_occupation(&[1, 1]).unwrap();
        assert!(apply(&l, &wrong).is_err());
    }

    #[test]
    fn non_unitary_rejected() {
        let m = ndarray::arr2(&[[Complex64::new(1.1, 0.0)]]);
        assert!(matches!(
            ModeUnitary::new(m),
            Err(LopError::NotUnitary { .. })
        ));
    }

    #[test]
    fn single_precision_lift() {
        let m = ModeUnitary::<f32>::su2(0.7, 0.2, 1.3);
        let a = lift_unitary(&m, 2).unwrap();
        let b = lift_via_js_exponential(&m, 2).unwrap();
        assert!(max_abs_diff(a.matrix().view(), b.matrix().view()) < 1e-4);
    }
}
