//! The acceptance suite: thirteen numbered checks with pinned tolerances, shared by the
//! `acceptance` test target and the `selftest` command.

use std::time::{Duration, Instant};

use ndarray::array;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{decompose, recompose, Circuit};
use crate::detector::{
    conditional_click, conditional_no_click, fidelity_to_branch, tradeoff_sweep, Protocol,
};
use crate::engineering::{
    ancilla_branches, completeness_deviation, evolve_with_ancilla, kraus_branches,
    multi_ancilla_bound_check, postselect, solve_target, AncillaSearchOptions,
};
use crate::error::Result;
use crate::fock::{enumerate_basis, PureState};
use crate::linalg::{haar_unitary, max_abs_diff};
use crate::lop::{lift_unitary, lift_via_js_exponential, two_photon_su2_closed_form, ModeUnitary};

pub const DEFAULT_SEED: u64 = 20_070_419;

#[derive(Clone, Copy, Debug)]
pub struct AcceptanceConfig {
    pub seed: u64,
    /// Replaces every pinned tolerance when set.
    pub tolerance_override: Option<f64>,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            tolerance_override: None,
        }
    }
}

impl AcceptanceConfig {
    fn tol(&self, pinned: f64) -> f64 {
        self.tolerance_override.unwrap_or(pinned)
    }

    fn rng(&self, id: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (id as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<34} {:>9.3}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

type Check = fn(&AcceptanceConfig) -> Result<(bool, String)>;

pub const CHECKS: [(&str, Check); 13] = [
    ("optimal 11 -> 20 preparation", optimal_twenty),
    ("reference circuit, vacuum branch", reference_forward),
    ("reference circuit, reverse run", reference_reverse),
    ("lift is a homomorphism", homomorphism),
    ("permanent lift = exp(JS(log M))", oracle_equivalence),
    ("two-photon SU(2) closed form", su2_closed_form),
    ("sector dimension law", dimension_law),
    ("Kraus completeness", kraus_completeness),
    ("detector fidelity identities", detector_identities),
    ("no-click trade-off numbers", tradeoff_numbers),
    ("extra ancillas do not help", ancilla_bound),
    ("SU(2) orbit of |11> not total", orbit_non_totality),
    ("decomposition round trip", decomposition_round_trip),
];

pub fn run_check(id: usize, config: &AcceptanceConfig) -> Option<CheckOutcome> {
    let (name, check) = *CHECKS.get(id.checked_sub(1)?)?;
    let start = Instant::now();
    let (passed, detail) = match check(config) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Some(CheckOutcome {
        id,
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    })
}

pub fn run_all(config: &AcceptanceConfig) -> Vec<CheckOutcome> {
    (1..=CHECKS.len())
        .filter_map(|id| run_check(id, config))
        .collect()
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn reference_unitary() -> ModeUnitary<f64> {
    recompose(&Circuit::bunching_reference())
}

fn within(value: f64, expected: f64, tol: f64) -> bool {
    (value - expected).abs() <= tol
}

fn optimal_twenty(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let tol = cfg.tol(1e-6);
    let start = Instant::now();
    let target = PureState::qutrit(Complex64::one(), Complex64::zero(), Complex64::zero())?;
    let sol = solve_target(&target)?;
    let secs = start.elapsed().as_secs_f64();
    let ok = within(sol.success_probability, 0.5, tol) && secs < 10.0;
    Ok((ok, format!("P = {:.12}, {:.3}s", sol.success_probability, secs)))
}

fn reference_forward(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let tol = cfg.tol(1e-10);
    let input = PureState::from_occupation(&[1, 1])?;
    let run = postselect(&reference_unitary(), &input, 0, 0)?;
    let want = PureState::from_occupation(&[2, 0])?;
    let overlap = run.state.as_ref().map_or(Ok(0.0), |s| s.overlap_modulus(&want))?;
    let ok = overlap >= 1.0 - tol && within(run.probability, 0.5, tol);
    Ok((ok, format!("overlap {overlap:.15}, P = {:.15}", run.probability)))
}

fn reference_reverse(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let tol = cfg.tol(1e-10);
    let input = PureState::from_occupation(&[2, 0])?;
    let run = postselect(&reference_unitary(), &input, 1, 1)?;
    let want = PureState::from_occupation(&[1, 1])?;
    let overlap = run.state.as_ref().map_or(Ok(0.0), |s| s.overlap_modulus(&want))?;
    let ok = overlap >= 1.0 - tol && within(run.probability, 0.5, tol);
    Ok((ok, format!("overlap {overlap:.15}, P = {:.15}", run.probability)))
}

fn homomorphism(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let tol = cfg.tol(1e-10);
    let mut rng = cfg.rng(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m1 = ModeUnitary::new(haar_unitary::<f64, _>(3, &mut rng))?;
        let m2 = ModeUnitary::new(haar_unitary::<f64, _>(3, &mut rng))?;
        let m12 = m1.compose(&m2)?;
        for n in 0..=3 {
            let lhs = lift_unitary(&m12, n)?;
            let rhs = lift_unitary(&m1, n)?.compose(&lift_unitary(&m2, n)?)?;
            worst = worst.max(max_abs_diff(lhs.matrix().view(), rhs.matrix().view()));
        }
    }
    Ok((worst <= tol, format!("max deviation {worst:.3e}")))
}

fn oracle_equivalence(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let tol = cfg.tol(1e-8);
    let mut rng = cfg.rng(5);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let modes = 2 + i % 3;
        let photons = (i / 3) % 5;
        let m = ModeUnitary::new(haar_unitary::<f64, _>(modes, &mut rng))?;
        let a = lift_unitary(&m, photons)?;
        let b = lift_via_js_exponential(&m, photons)?;
        worst = worst.max(max_abs_diff(a.matrix().view(), b.matrix().view()));
    }
    Ok((worst <= tol, format!("max deviation {worst:.3e}")))
}

fn su2_closed_form(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let tol = cfg.tol(1e-12);
    let mut rng = cfg.rng(6);
    let pi = std::f64::consts::PI;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let theta = rng.random_range(0.0..pi);
        let chi = rng.random_range(-pi..pi);
        let phi = rng.random_range(-pi..pi);
        let m = ModeUnitary::su2(theta, chi, phi);
        let (alpha, beta) = (m.matrix()[[0, 0]], m.matrix()[[0, 1]]);
        let lifted = lift_unitary(&m, 2)?;
        let closed = two_photon_su2_closed_form(alpha, beta);
        worst = worst.max(max_abs_diff(lifted.matrix().view(), closed.view()));
    }
    Ok((worst <= tol, format!("max deviation {worst:.3e}")))
}

fn dimension_law(_: &AcceptanceConfig) -> Result<(bool, String)> {
    let factorial = |k: usize| (1..=k as u128).product::<u128>();
    let mut bad = Vec::new();
    for modes in 1..=5 {
        for photons in 0..=6 {
            let expected = factorial(photons + modes - 1) / (factorial(photons) * factorial(modes - 1));
            let basis = enumerate_basis(modes, photons)?;
            let distinct: std::collections::HashSet<_> = basis.states().iter().collect();
            let sums_ok = basis.states().iter().all(|s| s.total() == photons);
            if basis.len() as u128 != expected || distinct.len() != basis.len() || !sums_ok {
                bad.push((modes, photons));
            }
        }
    }
    Ok((bad.is_empty(), format!("35 sectors, mismatches {bad:?}")))
}

fn kraus_completeness(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let tol = cfg.tol(1e-10);
    let mut rng = cfg.rng(8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let u = ModeUnitary::new(haar_unitary::<f64, _>(3, &mut rng))?;
        for m in 0..=1 {
            let branches = kraus_branches(&u, m, 2 + m)?;
            worst = worst.max(completeness_deviation(&branches));
        }
    }
    Ok((worst <= tol, format!("max |sum A^dag A - I| = {worst:.3e}")))
}

fn detector_identities(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let tol = cfg.tol(1e-10);
    let mut rng = cfg.rng(9);
    let input = PureState::from_occupation(&[1, 1])?;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let u = ModeUnitary::new(haar_unitary::<f64, _>(3, &mut rng))?;
        let psi = evolve_with_ancilla(&u, &input, 0)?;
        let branches = ancilla_branches(&psi)?;
        let (p0_ideal, p1_ideal) = (branches[0].norm_sqr(), branches[1].norm_sqr());
        for step in 1..=9 {
            let eta = step as f64 / 10.0;
            let (rho0, p0) = conditional_no_click(&psi, eta)?;
            let f0 = fidelity_to_branch(&rho0, &branches[0])?;
            let (rho1, p1) = conditional_click(&psi, eta)?;
            let f1 = fidelity_to_branch(&rho1, &branches[1])?;
            worst = worst
                .max((f0 * p0 - p0_ideal).abs())
                .max((f1 * p1 - eta * p1_ideal).abs());
        }
    }
    Ok((worst <= tol, format!("max residual {worst:.3e}")))
}

fn tradeoff_numbers(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let tol = cfg.tol(1e-9);
    let points = tradeoff_sweep(
        &reference_unitary(),
        &PureState::from_occupation(&[1, 1])?,
        0,
        Protocol::NoClick,
        &[0.0, 0.5, 1.0],
    )?;
    let want_f = [0.5, 0.8, 1.0];
    let want_p = [1.0, 0.625, 0.5];
    let ok = points.len() == 3
        && points
            .iter()
            .zip(want_f.iter().zip(want_p.iter()))
            .all(|(pt, (f, p))| within(pt.fidelity, *f, tol) && within(pt.probability, *p, tol));
    let f: Vec<String> = points.iter().map(|p| format!("{:.12}", p.fidelity)).collect();
    let p: Vec<String> = points.iter().map(|p| format!("{:.12}", p.probability)).collect();
    Ok((ok, format!("F = [{}], P0 = [{}]", f.join(", "), p.join(", "))))
}

fn ancilla_bound(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let tol = cfg.tol(1e-6);
    let start = Instant::now();
    let target = PureState::qutrit(Complex64::one(), Complex64::zero(), Complex64::zero())?;
    let opts = AncillaSearchOptions {
        seed: cfg.seed,
        ..AncillaSearchOptions::default()
    };
    let report = multi_ancilla_bound_check(&target, 2, 2000, &opts)?;
    let secs = start.elapsed().as_secs_f64();
    let ok = report.best_probability <= 0.5 + tol && secs < 60.0;
    Ok((
        ok,
        format!(
            "best P = {:.12} over {} evaluations, {:.3}s",
            report.best_probability, report.evaluations, secs
        ),
    ))
}

fn orbit_non_totality(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let tol = cfg.tol(1e-3);
    let pi = std::f64::consts::PI;
    let steps = 48;
    let mut best = 0.0f64;
    // |<20|U|11>|^2 does not depend on chi; a coarse chi grid still exercises it
    for a in 0..=steps {
        let theta = pi * a as f64 / steps as f64;
        for b in 0..4 {
            let chi = 2.0 * pi * b as f64 / 4.0;
            for c in 0..8 {
                let phi = 2.0 * pi * c as f64 / 8.0;
                let m = ModeUnitary::su2(theta, chi, phi);
                let lifted = lift_unitary(&m, 2)?;
                best = best.max(lifted.matrix()[[0, 1]].norm_sqr());
            }
        }
    }
    let ok = within(best, 0.5, tol) && best < 1.0;
    Ok((ok, format!("grid max {best:.12}")))
}

fn decomposition_round_trip(cfg: &AcceptanceConfig) -> Result<(bool, String)> {
    let tol = cfg.tol(1e-10);
    let mut rng = cfg.rng(13);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 2 + i % 3;
        let m = ModeUnitary::new(haar_unitary::<f64, _>(n, &mut rng))?;
        let c = decompose(&m, 1e-10)?;
        worst = worst.max(max_abs_diff(recompose(&c).matrix().view(), m.matrix().view()));
    }
    Ok((worst <= tol, format!("max deviation {worst:.3e}")))
}

/// The reference three-mode matrix written out entry by entry.
pub fn reference_matrix() -> ndarray::Array2<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    array![
        [cx(h, 0.0), cx(0.0, h), cx(0.0, 0.0)],
        [cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)],
        [cx(0.0, h), cx(h, 0.0), cx(0.0, 0.0)],
    ]
}
