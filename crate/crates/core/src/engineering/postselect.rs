use std::sync::Arc;

use ndarray::Array1;
use num_traits::Zero;

use crate::error::{LopError, Result};
use crate::fock::{FockBasis, OccupationVector, PureState};
use crate::linalg::{dagger, identity, max_abs_diff};
use crate::lop::{lift_unitary, LiftedUnitary, ModeUnitary};
use crate::scalar::{CMatrix, Real};

/// Outcome of conditioning on an ancilla detection pattern.
#[derive(Clone, Debug)]
pub struct PostSelected<T: Real = f64> {
    /// Normalized conditional state; `None` when the outcome has zero probability.
    pub state: Option<PureState<T>>,
    /// Squared norm of the un-normalized branch.
    pub probability: T,
    /// The un-normalized branch `<m'|_anc U (|input>|m>)`.
    pub branch: PureState<T>,
}

impl<T: Real> PostSelected<T> {
    pub fn is_empty(&self) -> bool {
        self.state.is_none()
    }
}

/// Splits a state on `comp_modes + ancillas` modes by ancilla occupation: for the pattern
/// `ancilla_out` returns the (un-normalized) computational-mode component.
pub fn project_ancillas<T: Real>(
    state: &PureState<T>,
    comp_modes: usize,
    ancilla_out: &[usize],
) -> Result<PureState<T>> {
    let basis = state.basis();
    if !basis.is_sector() || basis.modes() != comp_modes + ancilla_out.len() {
        return Err(LopError::DimensionMismatch(format!(
            "cannot project {} onto {} computational and {} ancilla modes",
            basis.describe(),
            comp_modes,
            ancilla_out.len()
        )));
    }
    let total = basis.photons();
    let detected: usize = ancilla_out.iter().sum();
    if detected > total {
        return Err(LopError::OutcomeOutOfRange {
            outcome: detected,
            total,
        });
    }
    let comp = Arc::new(FockBasis::sector(comp_modes, total - detected)?);
    let amps: Array1<_> = comp
        .states()
        .iter()
        .map(|occ| {
            basis
                .index_of(&occ.concat(ancilla_out))
                .map_or_else(Zero::zero, |i| state.amplitudes()[i])
        })
        .collect();
    Ok(PureState::from_parts(comp, amps))
}

/// All ancilla branches `phi_k` (k = 0..=n photons on the last mode) of a state whose last mode
/// is the single ancilla.
pub fn ancilla_branches<T: Real>(state: &PureState<T>) -> Result<Vec<PureState<T>>> {
    let modes = state.basis().modes();
    if modes < 2 {
        return Err(LopError::InvalidArgument(
            "need at least one computational mode and one ancilla".into(),
        ));
    }
    let total = state.basis().photons();
    (0..=total)
        .map(|k| project_ancillas(state, modes - 1, &[k]))
        .collect()
}

fn evolve<T: Real>(
    u: &ModeUnitary<T>,
    input: &PureState<T>,
    ancilla_in: &[usize],
) -> Result<PureState<T>> {
    if u.size() != input.basis().modes() + ancilla_in.len() {
        return Err(LopError::DimensionMismatch(format!(
            "{}-mode unitary for {} computational and {} ancilla modes",
            u.size(),
            input.basis().modes(),
            ancilla_in.len()
        )));
    }
    let extended = input.tensor_with_ancillas(ancilla_in)?;
    let lifted: LiftedUnitary<T> = lift_unitary(u, extended.basis().photons())?;
    lifted.apply(&extended)
}

/// Post-selection with any number of ancilla modes (the modes after the computational ones).
pub fn postselect_pattern<T: Real>(
    u: &ModeUnitary<T>,
    input: &PureState<T>,
    ancilla_in: &[usize],
    ancilla_out: &[usize],
) -> Result<PostSelected<T>> {
    if ancilla_out.len() != ancilla_in.len() {
        return Err(LopError::DimensionMismatch(
            "input and output ancilla patterns differ in length".into(),
        ));
    }
    let total = input.basis().photons() + ancilla_in.iter().sum::<usize>();
    let detected: usize = ancilla_out.iter().sum();
    if detected > total {
        return Err(LopError::OutcomeOutOfRange {
            outcome: detected,
            total,
        });
    }
    let out = evolve(u, input, ancilla_in)?;
    let branch = project_ancillas(&out, input.basis().modes(), ancilla_out)?;
    let probability = branch.norm_sqr();
    let state = if probability > T::epsilon() * T::epsilon() {
        branch.normalized()
    } else {
        None
    };
    Ok(PostSelected {
        state,
        probability,
        branch,
    })
}

/// Runs `U (|input>|m>)` with one ancilla mode and conditions on `m'` photons in it.
pub fn postselect<T: Real>(
    u: &ModeUnitary<T>,
    input: &PureState<T>,
    ancilla_in: usize,
    ancilla_out: usize,
) -> Result<PostSelected<T>> {
    postselect_pattern(u, input, &[ancilla_in], &[ancilla_out])
}

/// Full output state `U (|input>|m>)` on all modes.
pub fn evolve_with_ancilla<T: Real>(
    u: &ModeUnitary<T>,
    input: &PureState<T>,
    ancilla_in: usize,
) -> Result<PureState<T>> {
    evolve(u, input, &[ancilla_in])
}

/// One branch `A_{m'} = <m'| U |m>` of the channel on the computational modes.
#[derive(Clone, Debug)]
pub struct KrausBranch<T: Real = f64> {
    pub outcome: usize,
    /// Maps the `n_total - m` photon computational sector to the `n_total - m'` one.
    pub operator: CMatrix<T>,
    input_basis: Arc<FockBasis>,
    output_basis: Arc<FockBasis>,
}

impl<T: Real> KrausBranch<T> {
    pub fn input_basis(&self) -> &FockBasis {
        &self.input_basis
    }

    pub fn output_basis(&self) -> &FockBasis {
        &self.output_basis
    }

    pub fn apply(&self, state: &PureState<T>) -> Result<PureState<T>> {
        self.input_basis.ensure_same(state.basis())?;
        Ok(PureState::from_parts(
            self.output_basis.clone(),
            self.operator.dot(state.amplitudes()),
        ))
    }

    /// `|A_{m'} psi|^2`.
    pub fn probability(&self, state: &PureState<T>) -> Result<T> {
        Ok(self.apply(state)?.norm_sqr())
    }
}

/// Kraus operators of the channel `rho -> sum_{m'} A_{m'} rho A_{m'}^dag` obtained by adding
/// an ancilla (last mode of `u`) with `m` photons, applying `u` on the `n_total` photon sector
/// and reading out the ancilla.
pub fn kraus_branches<T: Real>(
    u: &ModeUnitary<T>,
    ancilla_in: usize,
    n_total: usize,
) -> Result<Vec<KrausBranch<T>>> {
    if u.size() < 2 {
        return Err(LopError::InvalidArgument(
            "need at least one computational mode and one ancilla".into(),
        ));
    }
    if ancilla_in > n_total {
        return Err(LopError::OutcomeOutOfRange {
            outcome: ancilla_in,
            total: n_total,
        });
    }
    let comp_modes = u.size() - 1;
    let lifted = lift_unitary(u, n_total)?;
    let full = lifted.basis();
    let input_basis = Arc::new(FockBasis::sector(comp_modes, n_total - ancilla_in)?);
    let cols: Vec<usize> = input_basis
        .states()
        .iter()
        .map(|occ| full.index_of(&occ.concat(&[ancilla_in])).expect("in sector"))
        .collect();

    (0..=n_total)
        .map(|outcome| {
            let output_basis = Arc::new(FockBasis::sector(comp_modes, n_total - outcome)?);
            let rows: Vec<usize> = output_basis
                .states()
                .iter()
                .map(|occ: &OccupationVector| full.index_of(&occ.concat(&[outcome])).expect("in sector"))
                .collect();
            let operator = CMatrix::from_shape_fn((rows.len(), cols.len()), |(r, c)| {
                lifted.matrix()[[rows[r], cols[c]]]
            });
            Ok(KrausBranch {
                outcome,
                operator,
                input_basis: input_basis.clone(),
                output_basis,
            })
        })
        .collect()
}

/// `max |sum A^dag A - I|` over the branch set.
pub fn completeness_deviation<T: Real>(branches: &[KrausBranch<T>]) -> T {
    let Some(first) = branches.first() else {
        return T::infinity();
    };
    let d = first.input_basis.len();
    let mut acc = CMatrix::<T>::zeros((d, d));
    for b in branches {
        acc = acc + dagger(b.operator.view()).dot(&b.operator);
    }
    max_abs_diff(acc.view(), identity::<T>(d).view())
}
