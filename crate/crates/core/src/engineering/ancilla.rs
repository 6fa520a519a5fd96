//! Search over `U(2 + a)` with `a` vacuum ancillas for the best all-vacuum post-selection
//! probability of preparing a qutrit target from `|11>`.
//!
//! With vacuum ancillas the selected branch only sees the upper-left `2 x 2` block `B` of the
//! mode unitary, so the branch is `(b1 . a^dag)(b2 . a^dag)|00>` for the columns `b1, b2` of
//! `B`. It equals a multiple of the target exactly when the columns are parallel to a factor
//! pair `(u, v)` of the target's quadratic form. Each sample is therefore repaired: its columns
//! are projected onto `u` and `v`, the block is rescaled into a contraction when needed, and a
//! unitary dilation with that block is built. The probability of the repaired unitary is
//! `|s^2 x y|^2`, where `x`, `y` are the projection coefficients and `s` the rescaling.
//! The winning unitary is re-checked by full simulation.

use ndarray::{s, Array2};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::postselect::postselect_pattern;
use super::synthesis::{factor_target, qutrit_components, FactorPair, TARGET_OVERLAP_FLOOR};
use crate::error::{LopError, Result};
use crate::fock::PureState;
use crate::linalg::{complete_unitary, expm, haar_unitary, hermitian_eigen};
use crate::lop::ModeUnitary;
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::scalar::{real, scale, CMatrix, Real, C};

#[derive(Clone, Copy, Debug)]
pub struct AncillaSearchOptions {
    pub seed: u64,
    /// Number of best samples handed to local refinement.
    pub refine_top: usize,
    pub refine_evaluations: usize,
}

impl Default for AncillaSearchOptions {
    fn default() -> Self {
        Self {
            seed: super::synthesis::DEFAULT_SEED,
            refine_top: 4,
            refine_evaluations: 3000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AncillaSearchReport<T: Real = f64> {
    pub ancillas: usize,
    /// Best all-vacuum probability, as measured by full simulation of `best_unitary`.
    pub best_probability: T,
    pub best_unitary: ModeUnitary<T>,
    /// Overlap modulus of the selected branch with the target.
    pub overlap: T,
    /// Samples drawn plus objective evaluations spent in refinement.
    pub evaluations: usize,
}

/// Projection coefficients `(x, y)` of the first two columns of `w` onto `u` and `v`.
fn projections<T: Real>(w: &CMatrix<T>, pair: &FactorPair<T>) -> (C<T>, C<T>) {
    let (u, v) = pair;
    let nu = u[0].norm_sqr() + u[1].norm_sqr();
    let nv = v[0].norm_sqr() + v[1].norm_sqr();
    let x = (u[0].conj() * w[[0, 0]] + u[1].conj() * w[[1, 0]]) / real(nu);
    let y = (v[0].conj() * w[[0, 1]] + v[1].conj() * w[[1, 1]]) / real(nv);
    (x, y)
}

/// Largest singular value of `[x u, y v]`, from the closed-form eigenvalues of its Gram matrix.
fn block_norm<T: Real>(pair: &FactorPair<T>, x: C<T>, y: C<T>) -> T {
    let (u, v) = pair;
    let g11 = x.norm_sqr() * (u[0].norm_sqr() + u[1].norm_sqr());
    let g22 = y.norm_sqr() * (v[0].norm_sqr() + v[1].norm_sqr());
    let g12 = (x.conj() * y * (u[0].conj() * v[0] + u[1].conj() * v[1])).norm_sqr();
    let half = T::lit(0.5);
    let mean = half * (g11 + g22);
    let spread = (half * (g11 - g22)).hypot(g12.sqrt());
    (mean + spread).max(T::zero()).sqrt()
}

/// Probability of the repaired sample and the rescaling applied to its block.
fn repaired_probability<T: Real>(w: &CMatrix<T>, pair: &FactorPair<T>, ancillas: usize) -> Option<(T, T)> {
    let (x, y) = projections(w, pair);
    let sigma = block_norm(pair, x, y);
    if sigma <= T::min_positive_value() {
        return None;
    }
    let s = if ancillas == 1 || sigma > T::one() {
        T::one() / sigma
    } else {
        T::one()
    };
    Some(((x * y).norm_sqr() * s.powi(4), s))
}

fn best_probability<T: Real>(w: &CMatrix<T>, pairs: &[FactorPair<T>; 2], ancillas: usize) -> T {
    pairs
        .iter()
        .filter_map(|p| repaired_probability(w, p, ancillas))
        .map(|(p, _)| p)
        .fold(T::zero(), T::max)
}

/// Repairs the upper-left block of `w` toward the factor pair and returns the dilated unitary
/// with its probability.
fn repair<T: Real>(w: &CMatrix<T>, pair: &FactorPair<T>, ancillas: usize) -> Option<(CMatrix<T>, T)> {
    let (u, v) = pair;
    let (p, s_factor) = repaired_probability(w, pair, ancillas)?;
    let (x, y) = projections(w, pair);
    let b = Array2::from_shape_fn((2, 2), |(i, j)| {
        scale(if j == 0 { x * u[i] } else { y * v[i] }, s_factor)
    });

    // rows below the block: E = Lambda^{1/2} V^dag from I - B^dag B = V Lambda V^dag
    let defect = Array2::<C<T>>::eye(2) - b.t().mapv(|z| z.conj()).dot(&b);
    let (lam, vecs) = hermitian_eigen(defect.view());
    let mut order = [0usize, 1];
    order.sort_by(|&i, &j| lam[j].partial_cmp(&lam[i]).unwrap_or(std::cmp::Ordering::Equal));
    let keep = ancillas.min(2);
    let n = 2 + ancillas;
    let mut cols = Array2::<C<T>>::zeros((n, 2));
    cols.slice_mut(s![0..2, ..]).assign(&b);
    for (row, &k) in order.iter().take(keep).enumerate() {
        let root = lam[k].max(T::zero()).sqrt();
        for j in 0..2 {
            cols[[2 + row, j]] = scale(vecs[[j, k]].conj(), root);
        }
    }
    Some((complete_unitary(cols.view()), p))
}

fn best_repair<T: Real>(
    w: &CMatrix<T>,
    pairs: &[FactorPair<T>; 2],
    ancillas: usize,
) -> Option<(CMatrix<T>, T)> {
    pairs
        .iter()
        .filter_map(|p| repair(w, p, ancillas))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
}

/// Anti-Hermitian matrix from `n^2` real parameters.
fn anti_hermitian<T: Real>(n: usize, theta: &[T]) -> CMatrix<T> {
    let mut h = CMatrix::<T>::zeros((n, n));
    let mut k = 0;
    for i in 0..n {
        h[[i, i]] = Complex::new(T::zero(), theta[k]);
        k += 1;
        for j in i + 1..n {
            let z = Complex::new(theta[k], theta[k + 1]);
            k += 2;
            h[[i, j]] = z;
            h[[j, i]] = -z.conj();
        }
    }
    h
}

/// Random plus locally refined search for the best all-vacuum post-selection probability of
/// preparing `target` from `|11>` with `ancillas` vacuum ancilla modes.
///
/// `budget` Haar samples are drawn; the best few are refined by Nelder-Mead over
/// `W exp(H)` with `H` anti-Hermitian. The reported probability is the simulated one of a
/// unitary whose selected branch matches the target to overlap `>= 1 - 1e-9`.
pub fn multi_ancilla_bound_check<T: Real>(
    target: &PureState<T>,
    ancillas: usize,
    budget: usize,
    opts: &AncillaSearchOptions,
) -> Result<AncillaSearchReport<T>> {
    if ancillas == 0 {
        return Err(LopError::InvalidArgument("at least one ancilla is required".into()));
    }
    let [a, b, c] = qutrit_components(target)?;
    target.require_normalized(T::lit(1e-9).max(T::default_tolerance()))?;
    let pairs = factor_target(a, b, c)?;
    let n = 2 + ancillas;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut pool: Vec<(CMatrix<T>, T)> = Vec::with_capacity(budget + 1);
    pool.push((Array2::eye(n), best_probability(&Array2::eye(n), &pairs, ancillas)));
    for _ in 0..budget {
        let w = haar_unitary::<T, _>(n, &mut rng);
        let p = best_probability(&w, &pairs, ancillas);
        pool.push((w, p));
    }
    let mut evaluations = budget;
    pool.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap_or(std::cmp::Ordering::Equal));
    pool.truncate(opts.refine_top.max(1));

    let nm = NelderMeadOptions {
        max_evaluations: opts.refine_evaluations,
        initial_step: T::lit(0.2),
        ..NelderMeadOptions::default()
    };
    let mut best: Option<(CMatrix<T>, T)> = None;
    for (w0, _) in &pool {
        let objective = |theta: &[T]| -> T {
            let w = w0.dot(&expm(anti_hermitian(n, theta).view()));
            -best_probability(&w, &pairs, ancillas)
        };
        let m = nelder_mead(objective, &vec![T::zero(); n * n], &nm);
        evaluations += m.evaluations;
        let w = w0.dot(&expm(anti_hermitian(n, &m.x).view()));
        if let Some(cand) = best_repair(&w, &pairs, ancillas) {
            if best.as_ref().is_none_or(|b| cand.1 > b.1) {
                best = Some(cand);
            }
        }
    }
    let (matrix, _) = best.ok_or_else(|| LopError::Infeasible("no admissible sample".into()))?;

    let unitary = ModeUnitary::with_tolerance(matrix, T::lit(1e-8).max(T::default_tolerance()))?;
    let input = PureState::from_occupation(&[1, 1])?;
    let vacuum = vec![0usize; ancillas];
    let run = postselect_pattern(&unitary, &input, &vacuum, &vacuum)?;
    let overlap = match &run.state {
        Some(s) => s.overlap_modulus(target)?,
        None => T::zero(),
    };
    if overlap < T::lit(TARGET_OVERLAP_FLOOR) {
        return Err(LopError::Infeasible(format!(
            "refined unitary reaches the target only to overlap {overlap}"
        )));
    }
    Ok(AncillaSearchReport {
        ancillas,
        best_probability: run.probability,
        best_unitary: unitary,
        overlap,
        evaluations,
    })
}
