//! Fock bases of fixed (or bounded) photon number with the pure and mixed states over them.
//!
//! Basis states are ordered anti-lexicographically: mode 1 occupation descending, then mode 2
//! descending, and so on, so the two-photon two-mode basis reads `|20>, |11>, |02>`. Bases that
//! span several photon-number sectors list the largest sector first.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{LopError, Result};
use crate::linalg::{hermitian_eigen, hermiticity_deviation, norm, vdot};
use crate::scalar::{scale, CMatrix, CVector, Real, C};

/// Hard limit on the number of basis states of a single basis.
pub const MAX_BASIS_DIMENSION: usize = 10_000;

/// Photon counts per mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationVector(Vec<usize>);

impl OccupationVector {
    pub fn new(occupations: Vec<usize>) -> Self {
        Self(occupations)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn get(&self, mode: usize) -> usize {
        self.0[mode]
    }

    /// `prod_i occ_i!` as a float (exact for the sector sizes handled here).
    pub fn factorial_product(&self) -> f64 {
        self.0
            .iter()
            .map(|&k| (1..=k).map(|x| x as f64).product::<f64>())
            .product()
    }

    /// Concatenates `self` with `other` (computational modes followed by ancilla modes).
    pub fn concat(&self, other: &[usize]) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        Self(v)
    }

    pub fn split_at(&self, modes: usize) -> (&[usize], &[usize]) {
        self.0.split_at(modes)
    }
}

impl From<Vec<usize>> for OccupationVector {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        let wide = self.0.iter().any(|&k| k > 9);
        for (i, k) in self.0.iter().enumerate() {
            if wide && i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ">")
    }
}

/// `(n + N - 1)! / (n! (N - 1)!)`, the number of ways to place `n` photons in `N` modes.
///
/// Evaluated as a binomial coefficient with the multiplicative recurrence
/// `C(a + i, i) = C(a + i - 1, i - 1) (a + i) / i`, in which every division is exact.
pub fn dimension(modes: usize, photons: usize) -> Result<usize> {
    if modes == 0 {
        return Err(LopError::ZeroModes);
    }
    let k = photons.min(modes - 1);
    let base = photons + modes - 1 - k;
    let mut acc: usize = 1;
    for i in 1..=k {
        acc = acc
            .checked_mul(base + i)
            .ok_or(LopError::DimensionOverflow { modes, photons })?
            / i;
    }
    Ok(acc)
}

/// Ordered list of occupation vectors spanning one or more photon-number sectors.
#[derive(Clone, Debug)]
pub struct FockBasis {
    modes: usize,
    min_photons: usize,
    max_photons: usize,
    states: Vec<OccupationVector>,
    index: HashMap<OccupationVector, usize>,
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes
            && self.min_photons == other.min_photons
            && self.max_photons == other.max_photons
    }
}

impl Eq for FockBasis {}

fn push_sector(modes: usize, photons: usize, out: &mut Vec<OccupationVector>) {
    fn rec(remaining: usize, modes_left: usize, prefix: &mut Vec<usize>, out: &mut Vec<OccupationVector>) {
        if modes_left == 1 {
            prefix.push(remaining);
            out.push(OccupationVector(prefix.clone()));
            prefix.pop();
            return;
        }
        for k in (0..=remaining).rev() {
            prefix.push(k);
            rec(remaining - k, modes_left - 1, prefix, out);
            prefix.pop();
        }
    }
    rec(photons, modes, &mut Vec::with_capacity(modes), out);
}

impl FockBasis {
    /// Basis of the sector with exactly `photons` photons on `modes` modes.
    pub fn sector(modes: usize, photons: usize) -> Result<Self> {
        Self::truncated(modes, photons, photons)
    }

    /// Basis of all states with `min_photons..=max_photons` photons, largest sector first.
    pub fn truncated(modes: usize, min_photons: usize, max_photons: usize) -> Result<Self> {
        if min_photons > max_photons {
            return Err(LopError::InvalidArgument(format!(
                "empty photon range {min_photons}..={max_photons}"
            )));
        }
        let mut total = 0usize;
        for n in min_photons..=max_photons {
            let d = dimension(modes, n)?;
            total = total.saturating_add(d);
            if total > MAX_BASIS_DIMENSION {
                return Err(LopError::SectorTooLarge {
                    modes,
                    photons: n,
                    dimension: total,
                    limit: MAX_BASIS_DIMENSION,
                });
            }
        }
        let mut states = Vec::with_capacity(total);
        for n in (min_photons..=max_photons).rev() {
            push_sector(modes, n, &mut states);
        }
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Self {
            modes,
            min_photons,
            max_photons,
            states,
            index,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Photon number of a single-sector basis, or the largest photon number otherwise.
    pub fn photons(&self) -> usize {
        self.max_photons
    }

    pub fn min_photons(&self) -> usize {
        self.min_photons
    }

    pub fn is_sector(&self) -> bool {
        self.min_photons == self.max_photons
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[OccupationVector] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &OccupationVector {
        &self.states[i]
    }

    pub fn index_of(&self, occ: &OccupationVector) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn describe(&self) -> String {
        if self.is_sector() {
            format!("{} modes / {} photons", self.modes, self.max_photons)
        } else {
            format!(
                "{} modes / {}..={} photons",
                self.modes, self.min_photons, self.max_photons
            )
        }
    }

    pub(crate) fn ensure_same(&self, other: &FockBasis) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(LopError::BasisMismatch {
                expected: self.describe(),
                found: other.describe(),
            })
        }
    }
}

/// Canonically ordered basis of `photons` photons on `modes` modes.
pub fn enumerate_basis(modes: usize, photons: usize) -> Result<FockBasis> {
    FockBasis::sector(modes, photons)
}

/// Amplitude vector over a [`FockBasis`]. Squared norm may be below one (unnormalized
/// post-selection branches) but never above `1 + tolerance`.
#[derive(Clone, Debug)]
pub struct PureState<T: Real = f64> {
    basis: Arc<FockBasis>,
    amplitudes: CVector<T>,
}

impl<T: Real> PureState<T> {
    pub fn new(basis: Arc<FockBasis>, amplitudes: CVector<T>) -> Result<Self> {
        Self::with_tolerance(basis, amplitudes, T::default_tolerance())
    }

    pub fn with_tolerance(basis: Arc<FockBasis>, amplitudes: CVector<T>, tol: T) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(LopError::DimensionMismatch(format!(
                "{} amplitudes for a basis of {} states",
                amplitudes.len(),
                basis.len()
            )));
        }
        let state = Self { basis, amplitudes };
        let n2 = state.norm_sqr();
        if n2.is_nan() || n2 > T::one() + tol {
            return Err(LopError::NormTooLarge {
                norm_sqr: n2.as_f64(),
            });
        }
        Ok(state)
    }

    pub(crate) fn from_parts(basis: Arc<FockBasis>, amplitudes: CVector<T>) -> Self {
        debug_assert_eq!(basis.len(), amplitudes.len());
        Self { basis, amplitudes }
    }

    pub fn zero(basis: Arc<FockBasis>) -> Self {
        let n = basis.len();
        Self::from_parts(basis, Array1::zeros(n))
    }

    /// The Fock state `|occ>` on its own sector.
    pub fn from_occupation(occ: &[usize]) -> Result<Self> {
        if occ.is_empty() {
            return Err(LopError::ZeroModes);
        }
        let occ = OccupationVector::new(occ.to_vec());
        let basis = Arc::new(FockBasis::sector(occ.modes(), occ.total())?);
        Self::basis_state(basis, &occ)
    }

    pub fn basis_state(basis: Arc<FockBasis>, occ: &OccupationVector) -> Result<Self> {
        let idx = basis
            .index_of(occ)
            .ok_or_else(|| LopError::InvalidOccupation(format!("{occ} not in {}", basis.describe())))?;
        let mut amps = Array1::zeros(basis.len());
        amps[idx] = Complex::new(T::one(), T::zero());
        Ok(Self::from_parts(basis, amps))
    }

    /// Superposition `sum_k c_k |occ_k>` over a single sector.
    pub fn from_terms(modes: usize, photons: usize, terms: &[(C<T>, &[usize])]) -> Result<Self> {
        let basis = Arc::new(FockBasis::sector(modes, photons)?);
        let mut amps = Array1::zeros(basis.len());
        for (coef, occ) in terms {
            let occ = OccupationVector::new(occ.to_vec());
            let idx = basis.index_of(&occ).ok_or_else(|| {
                LopError::InvalidOccupation(format!("{occ} not in {}", basis.describe()))
            })?;
            amps[idx] = amps[idx] + *coef;
        }
        Self::new(basis, amps)
    }

    /// The two-mode two-photon state `A|20> + B|11> + C|02>`.
    pub fn qutrit(a: C<T>, b: C<T>, c: C<T>) -> Result<Self> {
        Self::from_terms(2, 2, &[(a, &[2, 0]), (b, &[1, 1]), (c, &[0, 2])])
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn basis_arc(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    pub fn amplitude(&self, occ: &[usize]) -> C<T> {
        self.basis
            .index_of(&OccupationVector::new(occ.to_vec()))
            .map_or(C::zero(), |i| self.amplitudes[i])
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn norm(&self) -> T {
        norm(self.amplitudes.view())
    }

    /// Returns `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n <= T::min_positive_value() {
            return None;
        }
        Some(Self::from_parts(
            self.basis.clone(),
            self.amplitudes.mapv(|z| scale(z, T::one() / n)),
        ))
    }

    pub fn is_normalized(&self, tol: T) -> bool {
        (self.norm_sqr() - T::one()).abs() <= tol
    }

    pub(crate) fn require_normalized(&self, tol: T) -> Result<()> {
        if self.is_normalized(tol) {
            Ok(())
        } else {
            Err(LopError::NotNormalized {
                norm_sqr: self.norm_sqr().as_f64(),
            })
        }
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn overlap(&self, other: &PureState<T>) -> Result<C<T>> {
        self.basis.ensure_same(&other.basis)?;
        Ok(vdot(self.amplitudes.view(), other.amplitudes.view()))
    }

    /// `|<self|other>| / (|self| |other|)`: agreement up to normalization and global phase.
    pub fn overlap_modulus(&self, other: &PureState<T>) -> Result<T> {
        let ov = self.overlap(other)?;
        let denom = self.norm() * other.norm();
        if denom <= T::min_positive_value() {
            return Ok(T::zero());
        }
        Ok(ov.norm() / denom)
    }

    /// Appends one ancilla mode holding `m` photons: `|psi> -> |psi>|m>`.
    pub fn tensor_with_ancilla(&self, m: usize) -> Result<PureState<T>> {
        self.tensor_with_ancillas(&[m])
    }

    /// Appends ancilla modes with the given occupations.
    pub fn tensor_with_ancillas(&self, ancillas: &[usize]) -> Result<PureState<T>> {
        if !self.basis.is_sector() {
            return Err(LopError::InvalidArgument(
                "ancilla extension needs a single-sector state".into(),
            ));
        }
        let extra: usize = ancillas.iter().sum();
        let basis = Arc::new(FockBasis::sector(
            self.basis.modes() + ancillas.len(),
            self.basis.photons() + extra,
        )?);
        let mut amps = Array1::zeros(basis.len());
        for (occ, amp) in self.basis.states().iter().zip(self.amplitudes.iter()) {
            let idx = basis
                .index_of(&occ.concat(ancillas))
                .expect("extended occupation lies in the extended sector");
            amps[idx] = *amp;
        }
        Ok(Self::from_parts(basis, amps))
    }

    /// Re-expresses the state over a larger basis with the same mode count.
    pub fn embed(&self, target: Arc<FockBasis>) -> Result<PureState<T>> {
        if target.modes() != self.basis.modes() {
            return Err(LopError::BasisMismatch {
                expected: target.describe(),
                found: self.basis.describe(),
            });
        }
        let mut amps = Array1::zeros(target.len());
        for (occ, amp) in self.basis.states().iter().zip(self.amplitudes.iter()) {
            match target.index_of(occ) {
                Some(i) => amps[i] = *amp,
                None if amp.is_zero() => {}
                None => {
                    return Err(LopError::BasisMismatch {
                        expected: target.describe(),
                        found: self.basis.describe(),
                    })
                }
            }
        }
        Ok(Self::from_parts(target, amps))
    }

    pub fn to_json(&self) -> StateJson {
        StateJson {
            modes: self.basis.modes(),
            photons: self.basis.photons(),
            min_photons: (!self.basis.is_sector()).then_some(self.basis.min_photons()),
            amplitudes: self
                .amplitudes
                .iter()
                .map(|z| [z.re.as_f64(), z.im.as_f64()])
                .collect(),
        }
    }

    pub fn from_json(json: &StateJson) -> Result<Self> {
        let basis = Arc::new(FockBasis::truncated(
            json.modes,
            json.min_photons.unwrap_or(json.photons),
            json.photons,
        )?);
        let amps = json
            .amplitudes
            .iter()
            .map(|[re, im]| Complex::new(T::lit(*re), T::lit(*im)))
            .collect::<Vec<_>>();
        Self::new(basis, Array1::from(amps))
    }
}

impl<T: Real> fmt::Display for PureState<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (occ, amp) in self.basis.states().iter().zip(self.amplitudes.iter()) {
            if amp.norm() <= T::lit(1e-12) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i){occ}", amp.re, amp.im)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Wire form of a [`PureState`]: amplitudes as `[re, im]` pairs in canonical basis order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub modes: usize,
    pub photons: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_photons: Option<usize>,
    pub amplitudes: Vec<[f64; 2]>,
}

/// Density matrix over a [`FockBasis`].
#[derive(Clone, Debug)]
pub struct MixedState<T: Real = f64> {
    basis: Arc<FockBasis>,
    matrix: CMatrix<T>,
}

impl<T: Real> MixedState<T> {
    /// Validates Hermiticity, positivity (smallest eigenvalue `>= -tol`) and `trace <= 1 + tol`.
    pub fn new(basis: Arc<FockBasis>, matrix: CMatrix<T>, tol: T) -> Result<Self> {
        if matrix.dim() != (basis.len(), basis.len()) {
            return Err(LopError::DimensionMismatch(format!(
                "{:?} density matrix for a basis of {} states",
                matrix.dim(),
                basis.len()
            )));
        }
        let state = Self { basis, matrix };
        let herm = hermiticity_deviation(state.matrix.view());
        if herm > tol {
            return Err(LopError::InvalidArgument(format!(
                "density matrix not Hermitian (deviation {herm})"
            )));
        }
        if state.min_eigenvalue() < -tol {
            return Err(LopError::InvalidArgument(
                "density matrix not positive semidefinite".into(),
            ));
        }
        let tr = state.trace();
        if tr > T::one() + tol {
            return Err(LopError::InvalidArgument(format!("trace {tr} exceeds 1")));
        }
        Ok(state)
    }

    pub(crate) fn from_parts(basis: Arc<FockBasis>, matrix: CMatrix<T>) -> Self {
        Self { basis, matrix }
    }

    /// `|psi><psi|`.
    pub fn from_pure(psi: &PureState<T>) -> Self {
        let a = psi.amplitudes();
        let n = a.len();
        let m = Array2::from_shape_fn((n, n), |(i, j)| a[i] * a[j].conj());
        Self::from_parts(psi.basis_arc().clone(), m)
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn basis_arc(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.diag().iter().fold(T::zero(), |acc, z| acc + z.re)
    }

    pub fn min_eigenvalue(&self) -> T {
        let (vals, _) = hermitian_eigen(self.matrix.view());
        vals.into_iter().fold(T::infinity(), T::min)
    }

    pub fn hermiticity_deviation(&self) -> T {
        hermiticity_deviation(self.matrix.view())
    }

    /// `<phi|rho|phi>` with `phi` embedded into this state's basis.
    pub fn expectation(&self, phi: &PureState<T>) -> Result<T> {
        let phi = phi.embed(self.basis.clone())?;
        let v = phi.amplitudes();
        let rv = self.matrix.dot(v);
        Ok(vdot(v.view(), rv.view()).re)
    }

    pub fn to_json(&self) -> MixedStateJson {
        MixedStateJson {
            modes: self.basis.modes(),
            photons: self.basis.photons(),
            min_photons: (!self.basis.is_sector()).then_some(self.basis.min_photons()),
            matrix: self
                .matrix
                .rows()
                .into_iter()
                .map(|row| row.iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedStateJson {
    pub modes: usize,
    pub photons: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_photons: Option<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn occs(b: &FockBasis) -> Vec<Vec<usize>> {
        b.states().iter().map(|s| s.as_slice().to_vec()).collect()
    }

    // independent count: all tuples in 0..=n per mode, filtered by total
    fn brute_count(modes: usize, photons: usize) -> usize {
        let mut count = 0;
        let mut idx = vec![0usize; modes];
        loop {
            if idx.iter().sum::<usize>() == photons {
                count += 1;
            }
            let mut k = 0;
            loop {
                if k == modes {
                    return count;
                }
                idx[k] += 1;
                if idx[k] <= photons {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dimension(2, 2).unwrap(), 3);
        for n in 1..6 {
            assert_eq!(dimension(n, 0).unwrap(), 1);
        }
        assert_eq!(brute_count(3, 3), 10);
        assert_eq!(dimension(3, 3).unwrap(), 10);
        assert_eq!(dimension(8, 12).unwrap(), brute_count(8, 12));
        assert!(matches!(dimension(0, 3), Err(LopError::ZeroModes)));
    }

    #[test]
    fn basis_ordering() {
        assert_eq!(
            occs(&enumerate_basis(2, 2).unwrap()),
            vec![vec![2, 0], vec![1, 1], vec![0, 2]]
        );
        assert_eq!(occs(&enumerate_basis(1, 4).unwrap()), vec![vec![4]]);
        assert_eq!(
            occs(&enumerate_basis(3, 1).unwrap()),
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]
        );
        let b = FockBasis::truncated(2, 0, 2).unwrap();
        assert_eq!(
            occs(&b),
            vec![vec![2, 0], vec![1, 1], vec![0, 2], vec![1, 0], vec![0, 1], vec![0, 0]]
        );
    }

    #[test]
    fn sector_guard() {
        assert!(matches!(
            FockBasis::sector(8, 30),
            Err(LopError::SectorTooLarge { .. })
        ));
    }

    #[test]
    fn ancilla_extension_examples() {
        let s11 = PureState::<f64>::from_occupation(&[1, 1]).unwrap();
        let ext = s11.tensor_with_ancilla(0).unwrap();
        assert_eq!(ext.amplitude(&[1, 1, 0]), Complex64::new(1.0, 0.0));
        assert_eq!(ext.basis().photons(), 2);

        let s20 = PureState::<f64>::from_occupation(&[2, 0]).unwrap();
        let ext = s20.tensor_with_ancilla(1).unwrap();
        assert_eq!(ext.basis().photons(), 3);
        assert_eq!(ext.amplitude(&[2, 0, 1]), Complex64::new(1.0, 0.0));
        assert!((ext.norm_sqr() - 1.0).abs() < 1e-15);

        let (a, b, c) = (
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.48),
            Complex64::new(-0.64, 0.0),
        );
        let q = PureState::qutrit(a, b, c).unwrap();
        let ext = q.tensor_with_ancilla(0).unwrap();
        assert_eq!(ext.amplitude(&[2, 0, 0]), a);
        assert_eq!(ext.amplitude(&[1, 1, 0]), b);
        assert_eq!(ext.amplitude(&[0, 2, 0]), c);
        assert_eq!(ext.amplitude(&[1, 0, 1]), Complex64::zero());
    }

    #[test]
    fn overlap_examples() {
        let s20 = PureState::<f64>::from_occupation(&[2, 0]).unwrap();
        let s11 = PureState::<f64>::from_occupation(&[1, 1]).unwrap();
        assert_eq!(s20.overlap(&s11).unwrap(), Complex64::zero());
        assert!((s11.overlap(&s11).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let s3 = PureState::<f64>::from_occupation(&[1, 1, 0]).unwrap();
        assert!(matches!(
            s11.overlap(&s3),
            Err(LopError::BasisMismatch { .. })
        ));
    }

    #[test]
    fn norm_limit_enforced() {
        let basis = Arc::new(FockBasis::sector(2, 1).unwrap());
        let amps = Array1::from(vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)]);
        assert!(matches!(
            PureState::new(basis, amps),
            Err(LopError::NormTooLarge { .. })
        ));
    }

    #[test]
    fn json_shape() {
        let q = PureState::<f64>::qutrit(
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
            Complex64::zero(),
        )
        .unwrap();
        let text = serde_json::to_string(&q.to_json()).unwrap();
        assert_eq!(
            text,
            r#"{"modes":2,"photons":2,"amplitudes":[[0.6,0.0],[0.0,0.8],[0.0,0.0]]}"#
        );
        let back = PureState::<f64>::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert!((back.overlap(&q).unwrap().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_state_checks() {
        let s = PureState::<f64>::qutrit(
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
            Complex64::zero(),
        )
        .unwrap();
        let rho = MixedState::from_pure(&s);
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        assert!(rho.min_eigenvalue() > -1e-12);
        assert!((rho.expectation(&s).unwrap() - 1.0).abs() < 1e-14);
        let checked = MixedState::new(rho.basis_arc().clone(), rho.matrix().clone(), 1e-10);
        assert!(checked.is_ok());

        let bad = rho.matrix().mapv(|z| z * 2.0);
        assert!(MixedState::new(rho.basis_arc().clone(), bad, 1e-10).is_err());
    }
}
