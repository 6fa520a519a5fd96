use ndarray::Array2;
use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{LopError, Result};
use crate::fock::PureState;
use crate::linalg::complete_unitary;
use crate::lop::ModeUnitary;
use crate::scalar::{real, scale, Real, C};

/// Upper-left data `(alpha, beta)` and `(gamma, delta)` of a three-mode extension
///
/// ```text
///     | alpha  gamma/k  e3 |
/// M = | beta   delta/k  e4 |
///     | e1     e2/k     e5 |
/// ```
///
/// which sends `|11>|0>` to `(sqrt2 alpha gamma |20> + (alpha delta + beta gamma)|11>
/// + sqrt2 beta delta |02>) / k` on the vacuum-ancilla branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtensionParams<T: Real = f64> {
    pub alpha: C<T>,
    pub beta: C<T>,
    pub gamma: C<T>,
    pub delta: C<T>,
}

impl<T: Real> ExtensionParams<T> {
    pub fn new(alpha: C<T>, beta: C<T>, gamma: C<T>, delta: C<T>) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    /// `|alpha|^2 + |beta|^2`.
    pub fn first_column_weight(&self) -> T {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    /// `conj(alpha) gamma + conj(beta) delta`.
    pub fn column_inner(&self) -> C<T> {
        self.alpha.conj() * self.gamma + self.beta.conj() * self.delta
    }

    /// `2|alpha gamma|^2 + |alpha delta + beta gamma|^2 + 2|beta delta|^2`; equal to one when the
    /// post-selected output has squared norm `1/k^2`.
    pub fn normalization_value(&self) -> T {
        let two = T::lit(2.0);
        two * (self.alpha * self.gamma).norm_sqr()
            + (self.alpha * self.delta + self.beta * self.gamma).norm_sqr()
            + two * (self.beta * self.delta).norm_sqr()
    }

    /// `k^2 = |gamma|^2 + |delta|^2 + |conj(alpha) gamma + conj(beta) delta|^2 / (1 - |alpha|^2 - |beta|^2)`,
    /// or `|gamma|^2 + |delta|^2` on the boundary `|alpha|^2 + |beta|^2 = 1`.
    pub fn kappa_squared(&self) -> T {
        let base = self.gamma.norm_sqr() + self.delta.norm_sqr();
        let slack = T::one() - self.first_column_weight();
        if slack <= boundary_slack::<T>() {
            base
        } else {
            base + self.column_inner().norm_sqr() / slack
        }
    }

    /// The un-normalized output `(sqrt2 alpha gamma, alpha delta + beta gamma, sqrt2 beta delta)`
    /// before the `1/k` factor, i.e. the state the parameters encode.
    pub fn encoded_state(&self) -> [C<T>; 3] {
        let r2 = real(T::lit(2.0).sqrt());
        [
            r2 * self.alpha * self.gamma,
            self.alpha * self.delta + self.beta * self.gamma,
            r2 * self.beta * self.delta,
        ]
    }

    pub fn to_json(&self) -> ParamsJson {
        let f = |z: C<T>| [z.re.as_f64(), z.im.as_f64()];
        ParamsJson {
            alpha: f(self.alpha),
            beta: f(self.beta),
            gamma: f(self.gamma),
            delta: f(self.delta),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub gamma: [f64; 2],
    pub delta: [f64; 2],
}

/// Slack `1 - |alpha|^2 - |beta|^2` at or below which the boundary branch is taken.
fn boundary_slack<T: Real>() -> T {
    T::lit(64.0) * T::epsilon()
}

/// Completes `params` to a three-mode unitary of the form documented on [`ExtensionParams`].
///
/// Off the boundary, `e1 = sqrt(1 - |alpha|^2 - |beta|^2)` (real, non-negative) and
/// `e2 = -(conj(alpha) gamma + conj(beta) delta) / e1`, which fixes `k` as in
/// [`ExtensionParams::kappa_squared`]. On the boundary `e1 = e2 = 0`, which needs
/// `conj(alpha) gamma + conj(beta) delta = 0`, and `k = sqrt(|gamma|^2 + |delta|^2)`.
/// The third column comes from Gram-Schmidt completion.
pub fn build_extension_matrix<T: Real>(
    params: &ExtensionParams<T>,
    tol: T,
) -> Result<(ModeUnitary<T>, T)> {
    let weight = params.first_column_weight();
    if weight > T::one() + tol {
        return Err(LopError::Infeasible(format!(
            "|alpha|^2 + |beta|^2 = {weight} exceeds 1"
        )));
    }
    let slack = T::one() - weight;
    let inner = params.column_inner();
    let (e1, e2) = if slack <= boundary_slack::<T>() {
        if inner.norm() > tol {
            return Err(LopError::Infeasible(format!(
                "boundary branch |alpha|^2 + |beta|^2 = 1 needs conj(alpha) gamma + conj(beta) delta = 0, got |.| = {}",
                inner.norm()
            )));
        }
        (C::zero(), C::zero())
    } else {
        let e1 = slack.sqrt();
        (real(e1), scale(-inner, T::one() / e1))
    };
    let k2 = params.gamma.norm_sqr() + params.delta.norm_sqr() + e2.norm_sqr();
    if k2 <= T::min_positive_value() {
        return Err(LopError::Infeasible(
            "gamma = delta = 0 leaves k undefined".into(),
        ));
    }
    let k = k2.sqrt();
    let inv_k = T::one() / k;

    let mut cols = Array2::<C<T>>::zeros((3, 2));
    cols[[0, 0]] = params.alpha;
    cols[[1, 0]] = params.beta;
    cols[[2, 0]] = e1;
    cols[[0, 1]] = scale(params.gamma, inv_k);
    cols[[1, 1]] = scale(params.delta, inv_k);
    cols[[2, 1]] = scale(e2, inv_k);
    if slack <= boundary_slack::<T>() {
        // keep the first column on the unit sphere exactly
        let n = weight.sqrt();
        cols.column_mut(0).mapv_inplace(|z| scale(z, T::one() / n));
    }
    let m = complete_unitary(cols.view());
    Ok((ModeUnitary::with_tolerance(m, tol)?, k))
}

/// Post-selection success probability `1/k^2`, valid for parameters obeying the normalization
/// condition [`ExtensionParams::normalization_value`] `= 1`.
pub fn success_probability<T: Real>(params: &ExtensionParams<T>, tol: T) -> Result<T> {
    let value = params.normalization_value();
    if (value - T::one()).abs() > tol {
        return Err(LopError::Unnormalized {
            value: value.as_f64(),
        });
    }
    let k2 = params.kappa_squared();
    if k2 <= T::min_positive_value() {
        return Err(LopError::Infeasible("k = 0".into()));
    }
    Ok(T::one() / k2)
}

/// The state `A|20> + B|11> + C|02>` encoded by `params`, normalized.
pub fn encoded_target<T: Real>(params: &ExtensionParams<T>) -> Result<PureState<T>> {
    let [a, b, c] = params.encoded_state();
    let n = (a.norm_sqr() + b.norm_sqr() + c.norm_sqr()).sqrt();
    if n.is_zero() {
        return Err(LopError::Infeasible("parameters encode the zero vector".into()));
    }
    let inv = T::one() / n;
    PureState::qutrit(scale(a, inv), scale(b, inv), scale(c, inv))
}

pub(crate) fn unit_phase<T: Real>(z: C<T>) -> C<T> {
    let n = z.norm();
    if n <= T::min_positive_value() {
        Complex::new(T::one(), T::zero())
    } else {
        scale(z, T::one() / n)
    }
}
