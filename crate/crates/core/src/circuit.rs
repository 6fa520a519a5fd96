//! Circuits of two-mode elements (beam splitters and swaps) plus single-mode phase shifters.
//!
//! Mode indices are 1-based, as in circuit diagrams. The element list is in order of action,
//! so the circuit `[E1, E2, ..., EL]` has matrix `EL ... E2 E1`.
//!
//! A beam splitter on modes `(i, j)` with angles `(theta, phi)` has the block
//!
//! ```text
//! |  cos(theta)              e^{i phi} sin(theta) |
//! | -e^{-i phi} sin(theta)   cos(theta)           |
//! ```
//!
//! on rows and columns `i, j`; extra phases are carried by phase shifters.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{LopError, Result};
use crate::linalg::identity;
use crate::lop::ModeUnitary;
use crate::scalar::{Real, C};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CircuitElement<T: Real = f64> {
    BeamSplitter { modes: (usize, usize), theta: T, phi: T },
    PhaseShifter { mode: usize, phase: T },
    Swap { modes: (usize, usize) },
}

impl<T: Real> CircuitElement<T> {
    pub fn beam_splitter(i: usize, j: usize, theta: T, phi: T) -> Self {
        Self::BeamSplitter {
            modes: (i, j),
            theta,
            phi,
        }
    }

    pub fn phase_shifter(mode: usize, phase: T) -> Self {
        Self::PhaseShifter { mode, phase }
    }

    pub fn swap(i: usize, j: usize) -> Self {
        Self::Swap { modes: (i, j) }
    }

    fn validate(&self, modes: usize) -> Result<()> {
        let in_range = |m: usize| (1..=modes).contains(&m);
        let ok = match *self {
            Self::BeamSplitter { modes: (i, j), .. } | Self::Swap { modes: (i, j) } => {
                i != j && in_range(i) && in_range(j)
            }
            Self::PhaseShifter { mode, .. } => in_range(mode),
        };
        if ok {
            Ok(())
        } else {
            Err(LopError::InvalidElement(format!(
                "{self:?} on a {modes}-mode circuit"
            )))
        }
    }

    pub fn to_json(&self) -> ElementJson {
        match *self {
            Self::BeamSplitter {
                modes: (i, j),
                theta,
                phi,
            } => ElementJson::Bs {
                modes: [i, j],
                theta: theta.as_f64(),
                phi: phi.as_f64(),
            },
            Self::PhaseShifter { mode, phase } => ElementJson::Ps {
                mode,
                phase: phase.as_f64(),
            },
            Self::Swap { modes: (i, j) } => ElementJson::Swap { modes: [i, j] },
        }
    }

    pub fn from_json(json: &ElementJson) -> Self {
        match *json {
            ElementJson::Bs {
                modes: [i, j],
                theta,
                phi,
            } => Self::beam_splitter(i, j, T::lit(theta), T::lit(phi)),
            ElementJson::Ps { mode, phase } => Self::phase_shifter(mode, T::lit(phase)),
            ElementJson::Swap { modes: [i, j] } => Self::swap(i, j),
        }
    }
}

/// Embeds `e` into an `modes x modes` unitary, identity outside the touched modes.
pub fn element_matrix<T: Real>(e: &CircuitElement<T>, modes: usize) -> Result<ModeUnitary<T>> {
    e.validate(modes)?;
    let mut m = identity::<T>(modes);
    match *e {
        CircuitElement::BeamSplitter {
            modes: (i, j),
            theta,
            phi,
        } => {
            let (i, j) = (i - 1, j - 1);
            let (s, c) = theta.sin_cos();
            let ph = Complex::from_polar(T::one(), phi);
            m[[i, i]] = Complex::new(c, T::zero());
            m[[j, j]] = Complex::new(c, T::zero());
            m[[i, j]] = ph * s;
            m[[j, i]] = -ph.conj() * s;
        }
        CircuitElement::PhaseShifter { mode, phase } => {
            m[[mode - 1, mode - 1]] = Complex::from_polar(T::one(), phase);
        }
        CircuitElement::Swap { modes: (i, j) } => {
            let (i, j) = (i - 1, j - 1);
            m[[i, i]] = C::zero();
            m[[j, j]] = C::zero();
            m[[i, j]] = C::one();
            m[[j, i]] = C::one();
        }
    }
    Ok(ModeUnitary::from_matrix_unchecked(m))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T: Real = f64> {
    modes: usize,
    elements: Vec<CircuitElement<T>>,
}

impl<T: Real> Circuit<T> {
    pub fn new(modes: usize, elements: Vec<CircuitElement<T>>) -> Result<Self> {
        if modes == 0 {
            return Err(LopError::ZeroModes);
        }
        for e in &elements {
            e.validate(modes)?;
        }
        Ok(Self { modes, elements })
    }

    pub fn empty(modes: usize) -> Result<Self> {
        Self::new(modes, Vec::new())
    }

    /// A 50:50 beam splitter on modes 1, 2 followed by a swap of modes 2, 3. Its matrix
    /// sends `|11>|0>` to `|20>|0>` with probability 1/2 on the vacuum-ancilla branch.
    pub fn bunching_reference() -> Self {
        let quarter = T::FRAC_PI_4();
        let half = T::FRAC_PI_2();
        Self {
            modes: 3,
            elements: vec![
                CircuitElement::beam_splitter(1, 2, quarter, half),
                CircuitElement::swap(2, 3),
            ],
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn elements(&self) -> &[CircuitElement<T>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn beam_splitter_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, CircuitElement::BeamSplitter { .. }))
            .count()
    }

    pub fn push(&mut self, e: CircuitElement<T>) -> Result<()> {
        e.validate(self.modes)?;
        self.elements.push(e);
        Ok(())
    }

    pub fn to_json(&self) -> CircuitJson {
        CircuitJson {
            modes: self.modes,
            elements: self.elements.iter().map(CircuitElement::to_json).collect(),
        }
    }

    pub fn from_json(json: &CircuitJson) -> Result<Self> {
        Self::new(
            json.modes,
            json.elements.iter().map(CircuitElement::from_json).collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitJson {
    pub modes: usize,
    pub elements: Vec<ElementJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ElementJson {
    Bs { modes: [usize; 2], theta: f64, phi: f64 },
    Ps { mode: usize, phase: f64 },
    Swap { modes: [usize; 2] },
}

/// Matrix of the circuit: `E_last ... E_first`. The empty circuit gives the identity.
pub fn recompose<T: Real>(c: &Circuit<T>) -> ModeUnitary<T> {
    let mut m = identity::<T>(c.modes);
    for e in &c.elements {
        let em = element_matrix(e, c.modes).expect("elements validated on construction");
        m = em.matrix().dot(&m);
    }
    ModeUnitary::from_matrix_unchecked(m)
}

/// Triangular decomposition into at most `N(N-1)/2` nearest-neighbour beam splitters and `N`
/// phase shifters.
///
/// Column by column, each sub-diagonal entry is nulled from the bottom up with a rotation on
/// rows `(r-1, r)`. The rotations are inverse beam splitters, so `M = B_1 ... B_L D` with `D`
/// diagonal; the circuit applies `D` first (zero phases omitted) and then `B_L, ..., B_1`.
pub fn decompose<T: Real>(m: &ModeUnitary<T>, tol: T) -> Result<Circuit<T>> {
    let checked = ModeUnitary::with_tolerance(m.matrix().clone(), tol)?;
    let n = checked.size();
    let mut x = checked.into_matrix();
    let mut rotations: Vec<CircuitElement<T>> = Vec::new();
    let skip = T::epsilon();

    for col in 0..n {
        for r in (col + 1..n).rev() {
            let a = x[[r - 1, col]];
            let b = x[[r, col]];
            if b.norm() <= skip {
                continue;
            }
            let theta = b.norm().atan2(a.norm());
            let phi = if a.norm() <= skip {
                -(-b).arg()
            } else {
                a.arg() - (-b).arg()
            };
            // apply B(theta, phi)^dag to rows r-1, r
            let (s, c) = theta.sin_cos();
            let ph = Complex::from_polar(T::one(), phi);
            for k in 0..n {
                let top = x[[r - 1, k]];
                let bot = x[[r, k]];
                x[[r - 1, k]] = top * c - ph * bot * s;
                x[[r, k]] = ph.conj() * top * s + bot * c;
            }
            x[[r, col]] = C::zero();
            rotations.push(CircuitElement::beam_splitter(r, r + 1, theta, phi));
        }
    }

    let mut elements = Vec::with_capacity(rotations.len() + n);
    for i in 0..n {
        let phase = x[[i, i]].arg();
        if phase.abs() > skip {
            elements.push(CircuitElement::phase_shifter(i + 1, phase));
        }
    }
    elements.extend(rotations.into_iter().rev());
    Circuit::new(n, elements)
}
