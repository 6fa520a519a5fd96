//! Maximum-probability preparation of `A|20> + B|11> + C|02>` from `|11>` with one vacuum
//! ancilla and vacuum post-selection.
//!
//! The target corresponds to the binary quadratic form
//! `Q(x, y) = (A/sqrt2) x^2 + B xy + (C/sqrt2) y^2`, and a parameter set `(alpha, beta, gamma,
//! delta)` produces it exactly when `Q = (alpha x + beta y)(gamma x + delta y)`. Factorizations
//! are unique up to exchanging the two factors and rescaling `u -> lambda u`, `v -> v / lambda`.
//! Only `r = |lambda|^2` changes `k^2`:
//!
//! ```text
//! k^2(r) = |v|^2 / r + |<u, v>|^2 / (1 - r |u|^2),   0 < r <= 1/|u|^2
//! ```
//!
//! minimized at `1/r = |u|^2 + sqrt(|u|^2 |<u,v>|^2 / |v|^2)` with value
//! `(|u||v| + |<u,v>|)^2`. [`solve_target`] uses this; [`solve_target_search`] solves the same
//! constrained problem by penalized multistart Nelder-Mead and serves as a cross-check.

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::extension::{build_extension_matrix, success_probability, unit_phase, ExtensionParams, ParamsJson};
use super::postselect::postselect;
use crate::circuit::{decompose, CircuitJson};
use crate::error::{LopError, Result};
use crate::fock::{PureState, StateJson};
use crate::linalg::{frobenius_norm, identity};
use crate::lop::{matrix_to_json, ModeUnitary};
use crate::optimize::{multistart, NelderMeadOptions};
use crate::scalar::{real, scale, Real, C};

/// Minimum overlap modulus between achieved and requested state.
pub const TARGET_OVERLAP_FLOOR: f64 = 1.0 - 1e-9;

/// Default seed for randomized searches.
pub const DEFAULT_SEED: u64 = 0x5eed_1a0f_0c7a_2007;

/// A compiled post-selected preparation.
#[derive(Clone, Debug)]
pub struct EngineeringSolution<T: Real = f64> {
    pub mode_unitary: ModeUnitary<T>,
    pub params: ExtensionParams<T>,
    pub k: T,
    pub ancilla_in: usize,
    pub postselect_outcome: usize,
    pub success_probability: T,
    pub achieved_state: PureState<T>,
    /// `|<target|achieved>|`.
    pub target_overlap: T,
}

impl<T: Real> EngineeringSolution<T> {
    pub fn to_json(&self) -> Result<SolutionJson> {
        let circuit = decompose(&self.mode_unitary, T::default_tolerance())?;
        Ok(SolutionJson {
            matrix: matrix_to_json(self.mode_unitary.matrix().view()),
            ancilla_in: self.ancilla_in,
            outcome: self.postselect_outcome,
            probability: self.success_probability.as_f64(),
            k: self.k.as_f64(),
            params: self.params.to_json(),
            circuit: circuit.to_json(),
            achieved_state: self.achieved_state.to_json(),
            overlap: self.target_overlap.as_f64(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub ancilla_in: usize,
    pub outcome: usize,
    pub probability: f64,
    pub k: f64,
    pub params: ParamsJson,
    pub circuit: CircuitJson,
    pub achieved_state: StateJson,
    pub overlap: f64,
}

/// Wire form of a qutrit target `A|20> + B|11> + C|02>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetJson {
    #[serde(rename = "A")]
    pub a: [f64; 2],
    #[serde(rename = "B")]
    pub b: [f64; 2],
    #[serde(rename = "C")]
    pub c: [f64; 2],
}

impl TargetJson {
    pub fn to_state<T: Real>(&self) -> Result<PureState<T>> {
        let z = |p: [f64; 2]| Complex::new(T::lit(p[0]), T::lit(p[1]));
        PureState::qutrit(z(self.a), z(self.b), z(self.c))
    }

    pub fn from_state<T: Real>(state: &PureState<T>) -> Result<Self> {
        let [a, b, c] = qutrit_components(state)?;
        let f = |z: C<T>| [z.re.as_f64(), z.im.as_f64()];
        Ok(Self {
            a: f(a),
            b: f(b),
            c: f(c),
        })
    }
}

pub(crate) fn qutrit_components<T: Real>(target: &PureState<T>) -> Result<[C<T>; 3]> {
    let b = target.basis();
    if !(b.is_sector() && b.modes() == 2 && b.photons() == 2) {
        return Err(LopError::BasisMismatch {
            expected: "2 modes / 2 photons".into(),
            found: b.describe(),
        });
    }
    Ok([
        target.amplitude(&[2, 0]),
        target.amplitude(&[1, 1]),
        target.amplitude(&[0, 2]),
    ])
}

/// Factor pair `(u, v)` with `Q(x, y) = (u0 x + u1 y)(v0 x + v1 y)`.
pub type FactorPair<T> = ([C<T>; 2], [C<T>; 2]);

/// Roots of `p t^2 + q t + r` for `p != 0`, by the cancellation-free formula.
fn quadratic_roots<T: Real>(p: C<T>, q: C<T>, r: C<T>) -> (C<T>, C<T>) {
    let four = real(T::lit(4.0));
    let mut sq = (q * q - four * p * r).sqrt();
    if (q.conj() * sq).re < T::zero() {
        sq = -sq;
    }
    let w = scale(q + sq, -T::lit(0.5));
    if w.norm() <= T::min_positive_value() {
        return (C::zero(), C::zero());
    }
    (w / p, r / w)
}

/// Factors the quadratic form of a qutrit target into two linear forms; both orderings are
/// returned (they coincide when the factors are parallel).
pub fn factor_target<T: Real>(a: C<T>, b: C<T>, c: C<T>) -> Result<[FactorPair<T>; 2]> {
    let inv_r2 = T::one() / T::lit(2.0).sqrt();
    let p = scale(a, inv_r2);
    let r = scale(c, inv_r2);
    let tiny = T::epsilon() * (p.norm() + b.norm() + r.norm());
    if p.norm() + b.norm() + r.norm() <= T::min_positive_value() {
        return Err(LopError::InvalidArgument("zero target".into()));
    }
    let (u, v) = if p.norm() <= tiny && r.norm() <= tiny {
        ([b, C::zero()], [C::zero(), C::one()])
    } else if p.norm() >= r.norm() {
        // Q = p (x - t1 y)(x - t2 y)
        let (t1, t2) = quadratic_roots(p, b, r);
        ([p, -p * t1], [C::one(), -t2])
    } else {
        // Q = r (y - s1 x)(y - s2 x)
        let (s1, s2) = quadratic_roots(r, b, p);
        ([-r * s1, r], [-s2, C::one()])
    };
    Ok([(u, v), (v, u)])
}

fn norm2<T: Real>(x: &[C<T>; 2]) -> T {
    x[0].norm_sqr() + x[1].norm_sqr()
}

fn inner<T: Real>(x: &[C<T>; 2], y: &[C<T>; 2]) -> C<T> {
    x[0].conj() * y[0] + x[1].conj() * y[1]
}

/// Optimal parameters for a factor pair: the best rescaling, with the global phase chosen so
/// that `alpha` (or `beta` when `alpha = 0`) is real and non-negative.
pub fn optimal_params_for<T: Real>(pair: &FactorPair<T>) -> ExtensionParams<T> {
    let (u, v) = pair;
    let a = norm2(u);
    let b = norm2(v);
    let c = inner(u, v).norm_sqr();
    let r = T::one() / (a + (a * c / b).sqrt());
    let lambda = r.sqrt();
    let lead = if u[0].norm() > T::lit(1e-12) * a.sqrt() {
        u[0]
    } else {
        u[1]
    };
    let ph = unit_phase(lead);
    ExtensionParams::new(
        scale(u[0] * ph.conj(), lambda),
        scale(u[1] * ph.conj(), lambda),
        scale(v[0] * ph, T::one() / lambda),
        scale(v[1] * ph, T::one() / lambda),
    )
}

/// Closed-form maximum success probability `1 / (|u||v| + |<u,v>|)^2` for a normalized target.
pub fn optimal_probability<T: Real>(target: &PureState<T>) -> Result<T> {
    let [a, b, c] = qutrit_components(target)?;
    let [(u, v), _] = factor_target(a, b, c)?;
    let k = (norm2(&u) * norm2(&v)).sqrt() + inner(&u, &v).norm();
    Ok(T::one() / (k * k))
}

fn evaluate<T: Real>(
    params: ExtensionParams<T>,
    target: &PureState<T>,
    tol: T,
) -> Result<EngineeringSolution<T>> {
    let (m, k) = build_extension_matrix(&params, tol)?;
    let input = PureState::from_occupation(&[1, 1])?;
    let ps = postselect(&m, &input, 0, 0)?;
    let achieved = ps
        .state
        .ok_or_else(|| LopError::Infeasible("vacuum branch vanished".into()))?;
    let overlap = achieved.overlap_modulus(target)?;
    let predicted = success_probability(&params, tol.max(T::lit(1e-9)))?;
    if (predicted - ps.probability).abs() > tol.max(T::lit(1e-9)) {
        return Err(LopError::Infeasible(format!(
            "simulated probability {} disagrees with 1/k^2 = {}",
            ps.probability, predicted
        )));
    }
    Ok(EngineeringSolution {
        mode_unitary: m,
        params,
        k,
        ancilla_in: 0,
        postselect_outcome: 0,
        success_probability: ps.probability,
        achieved_state: achieved,
        target_overlap: overlap,
    })
}

/// Compiles a normalized qutrit target into the maximum-probability three-mode circuit acting
/// on `|11>|0>` with vacuum post-selection.
///
/// Both factor orderings are evaluated end to end (matrix completion, lifting, post-selection);
/// among equal-probability candidates the one closest to the identity in Frobenius norm wins.
pub fn solve_target<T: Real>(target: &PureState<T>) -> Result<EngineeringSolution<T>> {
    solve_target_with_tolerance(target, T::default_tolerance())
}

pub fn solve_target_with_tolerance<T: Real>(
    target: &PureState<T>,
    tol: T,
) -> Result<EngineeringSolution<T>> {
    let [a, b, c] = qutrit_components(target)?;
    target.require_normalized(tol)?;
    let pairs = factor_target(a, b, c)?;
    let floor = T::lit(TARGET_OVERLAP_FLOOR);
    let tie = T::lit(1e-12);
    let id = identity::<T>(3);

    let mut best: Option<(EngineeringSolution<T>, T)> = None;
    for pair in &pairs {
        let sol = evaluate(optimal_params_for(pair), target, tol)?;
        if sol.target_overlap < floor {
            return Err(LopError::Infeasible(format!(
                "achieved overlap {} below {}",
                sol.target_overlap, TARGET_OVERLAP_FLOOR
            )));
        }
        let dist = frobenius_norm((sol.mode_unitary.matrix() - &id).view());
        let better = match &best {
            None => true,
            Some((b, bd)) => {
                sol.success_probability > b.success_probability + tie
                    || ((sol.success_probability - b.success_probability).abs() <= tie && dist < *bd)
            }
        };
        if better {
            best = Some((sol, dist));
        }
    }
    Ok(best.expect("two candidates evaluated").0)
}

/// Result of the numerical route.
#[derive(Clone, Debug)]
pub struct SearchOutcome<T: Real = f64> {
    pub params: ExtensionParams<T>,
    pub probability: T,
    /// Euclidean norm of the constraint residual at the returned point.
    pub residual: T,
    pub evaluations: usize,
}

/// Solves `min k^2` subject to `sqrt2 alpha gamma = A`, `alpha delta + beta gamma = B`,
/// `sqrt2 beta delta = C` numerically.
///
/// The global phase is used to make `alpha` real and non-negative; the search runs over
/// `(|alpha|, |beta|, arg beta)`. For each point `(gamma, delta)` is the least-squares solution
/// of the three (linear in `gamma`, `delta`) constraints and the remaining residual is
/// penalized.
pub fn solve_target_search<T: Real>(
    target: &PureState<T>,
    starts: usize,
    seed: u64,
) -> Result<SearchOutcome<T>> {
    let [ta, tb, tc] = qutrit_components(target)?;
    let r2 = real(T::lit(2.0).sqrt());
    let penalty = T::lit(1e7);

    let fit = move |x: &[T]| -> Option<(ExtensionParams<T>, T)> {
        let alpha = real(x[0].abs());
        let beta = Complex::from_polar(x[1].abs(), x[2]);
        // L = [[r2 alpha, 0], [beta, alpha], [0, r2 beta]]
        let l = [[r2 * alpha, C::zero()], [beta, alpha], [C::zero(), r2 * beta]];
        let t = [ta, tb, tc];
        let mut g = [[C::<T>::zero(); 2]; 2];
        let mut h = [C::<T>::zero(); 2];
        for row in 0..3 {
            for i in 0..2 {
                h[i] = h[i] + l[row][i].conj() * t[row];
                for j in 0..2 {
                    g[i][j] = g[i][j] + l[row][i].conj() * l[row][j];
                }
            }
        }
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        if det.norm() <= T::lit(1e-300).max(T::min_positive_value()) {
            return None;
        }
        let gamma = (g[1][1] * h[0] - g[0][1] * h[1]) / det;
        let delta = (g[0][0] * h[1] - g[1][0] * h[0]) / det;
        let mut res = T::zero();
        for row in 0..3 {
            res = res + (l[row][0] * gamma + l[row][1] * delta - t[row]).norm_sqr();
        }
        Some((ExtensionParams::new(alpha, beta, gamma, delta), res.sqrt()))
    };

    let objective = |x: &[T]| -> T {
        let weight = x[0] * x[0] + x[1] * x[1];
        if weight >= T::one() {
            return T::lit(1e6) * (T::one() + weight);
        }
        match fit(x) {
            Some((p, res)) => p.kappa_squared() + penalty * res * res,
            None => T::lit(1e6),
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = NelderMeadOptions {
        max_evaluations: 3000,
        ..NelderMeadOptions::default()
    };
    let runs = multistart(
        objective,
        |r: &mut ChaCha8Rng| {
            let rho: f64 = r.random_range(0.05..0.99);
            let split: f64 = r.random_range(0.0..std::f64::consts::FRAC_PI_2);
            let psi: f64 = r.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            vec![
                T::lit(rho * split.cos()),
                T::lit(rho * split.sin()),
                T::lit(psi),
            ]
        },
        starts,
        &mut rng,
        &opts,
    );
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let best = runs
        .into_iter()
        .min_by(|a, b| a.value.partial_cmp(&b.value).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or_else(|| LopError::InvalidArgument("no starts requested".into()))?;
    let (params, residual) =
        fit(&best.x).ok_or_else(|| LopError::Infeasible("search ended at a singular point".into()))?;
    Ok(SearchOutcome {
        probability: T::one() / params.kappa_squared(),
        params,
        residual,
        evaluations,
    })
}

/// Normalizes `(A, B, C)`; `None` for the zero triple.
pub fn normalize_triple<T: Real>(a: C<T>, b: C<T>, c: C<T>) -> Option<[C<T>; 3]> {
    let n = (a.norm_sqr() + b.norm_sqr() + c.norm_sqr()).sqrt();
    if n <= T::min_positive_value() {
        return None;
    }
    let inv = T::one() / n;
    Some([scale(a, inv), scale(b, inv), scale(c, inv)])
}
