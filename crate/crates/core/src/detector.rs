//! On/off photodetection with quantum efficiency `eta` on the ancilla mode.
//!
//! A detector of efficiency `eta` stays silent on `k` incident photons with probability
//! `(1 - eta)^k`, so its "no click" element is `sum_k (1 - eta)^k |k><k|` and the "click"
//! element is the complement. Only the ancilla (last) mode is measured.
//!
//! Writing the pre-measurement state as `sum_k |phi_k>|k>`, the conditional states are
//! mixtures of the branches `phi_k`. The branches carry different photon numbers on the
//! computational modes, so the conditional states live on the truncated basis holding
//! `0..=n` photons.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::engineering::{ancilla_branches, evolve_with_ancilla};
use crate::error::{LopError, Result};
use crate::fock::{FockBasis, MixedState, PureState};
use crate::lop::ModeUnitary;
use crate::scalar::{CMatrix, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorModel<T: Real = f64> {
    eta: T,
}

impl<T: Real> DetectorModel<T> {
    pub fn new(eta: T) -> Result<Self> {
        check_eta(eta)?;
        Ok(Self { eta })
    }

    pub fn ideal() -> Self {
        Self { eta: T::one() }
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    /// `(1 - eta)^k`.
    pub fn no_click_weight(&self, k: usize) -> T {
        (T::one() - self.eta).powi(k as i32)
    }

    /// `1 - (1 - eta)^k`.
    pub fn click_weight(&self, k: usize) -> T {
        T::one() - self.no_click_weight(k)
    }
}

fn check_eta<T: Real>(eta: T) -> Result<()> {
    if eta.is_nan() || eta < T::zero() || eta > T::one() {
        return Err(LopError::InvalidEfficiency(eta.as_f64()));
    }
    Ok(())
}

/// Diagonal of the no-click element for `k = 0..=max_photons`.
pub fn povm_no_click<T: Real>(eta: T, max_photons: usize) -> Result<Vec<T>> {
    let d = DetectorModel::new(eta)?;
    Ok((0..=max_photons).map(|k| d.no_click_weight(k)).collect())
}

/// Diagonal of the click element for `k = 0..=max_photons`.
pub fn povm_click<T: Real>(eta: T, max_photons: usize) -> Result<Vec<T>> {
    let d = DetectorModel::new(eta)?;
    Ok((0..=max_photons).map(|k| d.click_weight(k)).collect())
}

/// Readout protocol on the ancilla.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    /// Keep runs where the detector stays silent; the ideal branch is `phi_0`.
    NoClick,
    /// Keep runs where the detector clicks; the ideal branch is `phi_branch` (`branch >= 1`).
    Click { branch: usize },
}

impl Protocol {
    pub fn target_branch(&self) -> usize {
        match *self {
            Protocol::NoClick => 0,
            Protocol::Click { branch } => branch,
        }
    }
}

fn mixture<T: Real>(
    psi: &PureState<T>,
    weights: impl Fn(usize) -> T,
    what: &str,
) -> Result<(MixedState<T>, T)> {
    psi.require_normalized(T::default_tolerance().max(T::lit(1e-9)))?;
    let branches = ancilla_branches(psi)?;
    let comp_modes = psi.basis().modes() - 1;
    let basis = Arc::new(FockBasis::truncated(comp_modes, 0, psi.basis().photons())?);
    let d = basis.len();
    let mut rho = CMatrix::<T>::zeros((d, d));
    let mut p = T::zero();
    for (k, phi) in branches.iter().enumerate() {
        let w = weights(k);
        if w == T::zero() {
            continue;
        }
        let v = phi.embed(basis.clone())?;
        let a = v.amplitudes();
        for i in 0..d {
            if a[i].norm_sqr() == T::zero() {
                continue;
            }
            for j in 0..d {
                rho[[i, j]] = rho[[i, j]] + a[i] * a[j].conj() * w;
            }
        }
        p = p + w * phi.norm_sqr();
    }
    if p <= T::epsilon() * T::epsilon() {
        return Err(LopError::ZeroProbability(format!("{what} is impossible for this state")));
    }
    let inv = T::one() / p;
    rho.mapv_inplace(|z| z * inv);
    Ok((MixedState::from_parts(basis, rho), p))
}

/// `rho_0 = sum_k (1-eta)^k |phi_k><phi_k| / P_0` and `P_0 = sum_k (1-eta)^k <phi_k|phi_k>` for
/// a normalized state whose last mode is the ancilla.
pub fn conditional_no_click<T: Real>(psi: &PureState<T>, eta: T) -> Result<(MixedState<T>, T)> {
    let d = DetectorModel::new(eta)?;
    mixture(psi, |k| d.no_click_weight(k), "no click")
}

/// `rho_1 = sum_k A_k |phi_k><phi_k| / P_1` with `A_k = 1 - (1-eta)^k`.
pub fn conditional_click<T: Real>(psi: &PureState<T>, eta: T) -> Result<(MixedState<T>, T)> {
    let d = DetectorModel::new(eta)?;
    mixture(psi, |k| d.click_weight(k), "a click")
}

/// `<phi|rho|phi> / <phi|phi>` for an unnormalized branch `phi`.
pub fn fidelity_to_branch<T: Real>(rho: &MixedState<T>, phi: &PureState<T>) -> Result<T> {
    let n2 = phi.norm_sqr();
    if n2 <= T::epsilon() * T::epsilon() {
        return Err(LopError::ZeroProbability("target branch has zero norm".into()));
    }
    Ok(rho.expectation(phi)? / n2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TradeoffPoint<T: Real = f64> {
    pub eta: T,
    /// Probability that the protocol's detector outcome occurs (`P_0` or `P_1`).
    pub probability: T,
    /// Fidelity of the conditional state to the ideal branch; zero when the outcome is
    /// impossible.
    pub fidelity: T,
}

/// Evaluates the protocol at each efficiency in `grid` for `u` acting on `input` with
/// `ancilla_in` photons in the ancilla (last mode of `u`).
pub fn tradeoff_sweep<T: Real>(
    u: &ModeUnitary<T>,
    input: &PureState<T>,
    ancilla_in: usize,
    protocol: Protocol,
    grid: &[T],
) -> Result<Vec<TradeoffPoint<T>>> {
    if let Protocol::Click { branch: 0 } = protocol {
        return Err(LopError::InvalidArgument(
            "the click protocol targets a branch with at least one ancilla photon".into(),
        ));
    }
    for &eta in grid {
        check_eta(eta)?;
    }
    let psi = evolve_with_ancilla(u, input, ancilla_in)?;
    let branches = ancilla_branches(&psi)?;
    let target = branches.get(protocol.target_branch()).ok_or(LopError::OutcomeOutOfRange {
        outcome: protocol.target_branch(),
        total: psi.basis().photons(),
    })?;

    grid.iter()
        .map(|&eta| {
            let run = match protocol {
                Protocol::NoClick => conditional_no_click(&psi, eta),
                Protocol::Click { .. } => conditional_click(&psi, eta),
            };
            match run {
                Ok((rho, p)) => Ok(TradeoffPoint {
                    eta,
                    probability: p,
                    fidelity: fidelity_to_branch(&rho, target)?,
                }),
                Err(LopError::ZeroProbability(_)) => Ok(TradeoffPoint {
                    eta,
                    probability: T::zero(),
                    fidelity: T::zero(),
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// `n` evenly spaced points from `lo` to `hi`; a single point is `lo`.
pub fn eta_grid<T: Real>(lo: T, hi: T, n: usize) -> Result<Vec<T>> {
    check_eta(lo)?;
    check_eta(hi)?;
    if lo > hi || n == 0 {
        return Err(LopError::InvalidArgument(format!(
            "bad efficiency range {lo}..{hi} with {n} steps"
        )));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / T::from_usize(n - 1).expect("small count");
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + step * T::from_usize(i).expect("small count")
            }
        })
        .collect())
}

pub const CSV_HEADER: &str = "eta,probability,fidelity";

/// Formats `x` with 12 significant digits and no trailing zeros.
pub fn format_significant(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("valid float literal");
    let s = rounded.to_string();
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// CSV with header `eta,probability,fidelity` and LF line endings.
pub fn tradeoff_csv<T: Real>(points: &[TradeoffPoint<T>]) -> String {
    let mut out = String::with_capacity(32 * (points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{}",
            format_significant(p.eta.as_f64()),
            format_significant(p.probability.as_f64()),
            format_significant(p.fidelity.as_f64())
        );
    }
    out
}

/// Reads the output of [`tradeoff_csv`].
pub fn parse_tradeoff_csv(text: &str) -> Result<Vec<TradeoffPoint<f64>>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => {
            return Err(LopError::InvalidArgument(format!(
                "expected header {CSV_HEADER:?}, found {other:?}"
            )))
        }
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(LopError::InvalidArgument(format!("malformed row {line:?}")));
            }
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| LopError::InvalidArgument(format!("{s:?}: {e}")))
            };
            Ok(TradeoffPoint {
                eta: num(fields[0])?,
                probability: num(fields[1])?,
                fidelity: num(fields[2])?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{recompose, Circuit};

    fn reference() -> ModeUnitary<f64> {
        recompose(&Circuit::bunching_reference())
    }

    #[test]
    fn povm_weights() {
        assert_eq!(povm_no_click(1.0, 3).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(povm_no_click(0.0, 3).unwrap(), vec![1.0; 4]);
        assert_eq!(povm_no_click(0.5, 2).unwrap()[2], 0.25);
        assert_eq!(povm_click(0.5, 2).unwrap(), vec![0.0, 0.5, 0.75]);
        assert!(matches!(povm_no_click(1.5, 2), Err(LopError::InvalidEfficiency(_))));
        assert!(povm_click(-0.1, 2).is_err());
    }

    #[test]
    fn reference_no_click_closed_form() {
        let u = reference();
        let psi = evolve_with_ancilla(&u, &PureState::from_occupation(&[1, 1]).unwrap(), 0).unwrap();
        let phi0 = &ancilla_branches(&psi).unwrap()[0];
        for eta in [0.0, 0.1, 0.25, 0.5, 0.9, 1.0] {
            let (rho, p0) = conditional_no_click(&psi, eta).unwrap();
            let expected = 0.5 + (1.0 - eta) * (1.0 - eta) / 2.0;
            assert!((p0 - expected).abs() < 1e-12);
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            let f = fidelity_to_branch(&rho, phi0).unwrap();
            assert!((f - 0.5 / expected).abs() < 1e-12);
        }
    }

    #[test]
    fn click_impossible_for_blind_detector() {
        let psi = evolve_with_ancilla(&reference(), &PureState::from_occupation(&[1, 1]).unwrap(), 0)
            .unwrap();
        assert!(matches!(
            conditional_click(&psi, 0.0),
            Err(LopError::ZeroProbability(_))
        ));
    }

    #[test]
    fn click_reverse_protocol() {
        let psi = evolve_with_ancilla(&reference(), &PureState::from_occupation(&[2, 0]).unwrap(), 1)
            .unwrap();
        let branches = ancilla_branches(&psi).unwrap();
        assert!((branches[1].norm_sqr() - 0.5).abs() < 1e-12);
        let (rho, p1) = conditional_click(&psi, 1.0).unwrap();
        let f = fidelity_to_branch(&rho, &branches[1]).unwrap();
        assert!((f * p1 - branches[1].norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn sweep_reference_grid() {
        let pts = tradeoff_sweep(
            &reference(),
            &PureState::from_occupation(&[1, 1]).unwrap(),
            0,
            Protocol::NoClick,
            &[0.0, 0.5, 1.0],
        )
        .unwrap();
        let f: Vec<f64> = pts.iter().map(|p| p.fidelity).collect();
        let p: Vec<f64> = pts.iter().map(|p| p.probability).collect();
        for (a, b) in f.iter().zip([0.5, 0.8, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in p.iter().zip([1.0, 0.625, 0.5]) {
            assert!((a - b).abs() < 1e-12);
        }
        let csv = tradeoff_csv(&pts);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("eta,probability,fidelity\n"));
        assert!(!csv.contains('\r'));
        let back = parse_tradeoff_csv(&csv).unwrap();
        assert_eq!(back.len(), 3);
        assert!((back[1].fidelity - 0.8).abs() < 1e-12);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.8), "0.8");
        assert_eq!(format_significant(0.1 + 0.2), "0.3");
        assert_eq!(format_significant(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_significant(1.0), "1");
        assert_eq!(format_significant(-0.0), "0");
    }

    #[test]
    fn grids() {
        assert_eq!(eta_grid(0.3, 0.9, 1).unwrap(), vec![0.3]);
        assert_eq!(eta_grid(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(eta_grid(0.6, 0.5, 3).is_err());
        assert!(eta_grid(0.0, 1.0, 0).is_err());
    }
}
