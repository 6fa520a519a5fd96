mod common;

use common::{cx, permanent_by_permutations, random_unitary, rng};
use lopforge::linalg::{max_abs_diff, unitarity_deviation};
use lopforge::lop::two_photon_su2_closed_form;
use lopforge::{
    lift_unitary, lift_via_js_exponential, permanent, AlgebraElement, LopError, ModeUnitary,
    OccupationVector, PureState,
};
use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn permanent_examples() {
    let x = cx(0.3, -1.2);
    assert_eq!(permanent(ndarray::arr2(&[[x]]).view()).unwrap(), x);
    let (a, b, c, d) = (cx(1.0, 2.0), cx(-0.5, 0.1), cx(0.0, 3.0), cx(2.0, -1.0));
    let p = permanent(ndarray::arr2(&[[a, b], [c, d]]).view()).unwrap();
    assert!((p - (a * d + b * c)).norm() < 1e-14);
    let ones = Array2::from_elem((3, 3), cx(1.0, 0.0));
    assert_eq!(permanent(ones.view()).unwrap(), permanent_by_permutations(&ones));
    assert!((permanent(ones.view()).unwrap() - 6.0).norm() < 1e-14);
    let empty = Array2::<Complex64>::zeros((0, 0));
    assert_eq!(permanent(empty.view()).unwrap(), cx(1.0, 0.0));
    let rect = Array2::<Complex64>::zeros((2, 3));
    assert!(matches!(permanent(rect.view()), Err(LopError::NotSquare { .. })));
}

/// `<out|U|in>` from the product of creation operators `prod_j (sum_i U_ij a_i^dag)^{in_j}`
/// expanded over all ways of sending each input photon to an output mode.
fn amplitude_by_photon_paths(u: &Array2<Complex64>, out: &[usize], input: &[usize]) -> Complex64 {
    let sources: Vec<usize> = input
        .iter()
        .enumerate()
        .flat_map(|(j, &k)| std::iter::repeat_n(j, k))
        .collect();
    let modes = out.len();
    let n = sources.len();
    let mut total = cx(0.0, 0.0);
    let mut dest = vec![0usize; n];
    loop {
        let mut counts = vec![0usize; modes];
        for &d in &dest {
            counts[d] += 1;
        }
        if counts == out {
            let mut term = cx(1.0, 0.0);
            for (p, &d) in dest.iter().enumerate() {
                term *= u[[d, sources[p]]];
            }
            total += term;
        }
        let mut i = 0;
        loop {
            if i == n {
                let fact = |v: &[usize]| v.iter().map(|&k| (1..=k).product::<usize>() as f64).product::<f64>();
                return total * (fact(out) / fact(input)).sqrt();
            }
            dest[i] += 1;
            if dest[i] < modes {
                break;
            }
            dest[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn lift_matches_photon_path_expansion() {
    let mut r = rng(2);
    for (modes, photons) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
        let u = random_unitary(modes, &mut r);
        let l = lift_unitary(&u, photons).unwrap();
        for (i, out) in l.basis().states().iter().enumerate() {
            for (j, inp) in l.basis().states().iter().enumerate() {
                let want = amplitude_by_photon_paths(u.matrix(), out.as_slice(), inp.as_slice());
                assert!((l.matrix()[[i, j]] - want).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn one_photon_block_is_the_mode_matrix() {
    let mut r = rng(3);
    for n in 1..=5 {
        let u = random_unitary(n, &mut r);
        let l = lift_unitary(&u, 1).unwrap();
        assert!(max_abs_diff(l.matrix().view(), u.matrix().view()) < 1e-15);
        let v = lift_unitary(&u, 0).unwrap();
        assert_eq!(v.matrix().dim(), (1, 1));
        assert!((v.matrix()[[0, 0]] - 1.0).norm() < 1e-15);
    }
}

#[test]
fn two_photon_closed_form() {
    let mut r = rng(4);
    for _ in 0..100 {
        use rand::Rng;
        let theta: f64 = r.random_range(0.0..std::f64::consts::PI);
        let chi: f64 = r.random_range(-3.2..3.2);
        let phi: f64 = r.random_range(-3.2..3.2);
        let m = ModeUnitary::su2(theta, chi, phi);
        let (alpha, beta) = (m.matrix()[[0, 0]], m.matrix()[[0, 1]]);
        assert!((alpha - Complex64::from_polar(theta.cos(), chi)).norm() < 1e-15);
        assert!((beta - Complex64::from_polar(theta.sin(), phi)).norm() < 1e-15);
        let l = lift_unitary(&m, 2).unwrap();
        let closed = two_photon_su2_closed_form(alpha, beta);
        assert!(max_abs_diff(l.matrix().view(), closed.view()) < 1e-12);
    }
}

#[test]
fn permanent_and_exponential_routes_agree() {
    let mut r = rng(5);
    for modes in 2..=4 {
        for photons in 0..=4 {
            let u = random_unitary(modes, &mut r);
            let a = lift_unitary(&u, photons).unwrap();
            let b = lift_via_js_exponential(&u, photons).unwrap();
            assert!(max_abs_diff(a.matrix().view(), b.matrix().view()) < 1e-8);
        }
    }
}

#[test]
fn exponential_route_survives_eigenvalue_minus_one() {
    // the swap has eigenvalue -1, where the principal logarithm is ill-defined
    let z = cx(0.0, 0.0);
    let o = cx(1.0, 0.0);
    let swap = ModeUnitary::new(ndarray::array![[z, o], [o, z]]).unwrap();
    for n in 0..=4 {
        let a = lift_unitary(&swap, n).unwrap();
        let b = lift_via_js_exponential(&swap, n).unwrap();
        assert!(max_abs_diff(a.matrix().view(), b.matrix().view()) < 1e-10);
    }
}

#[test]
fn algebra_element_rejects_non_anti_hermitian() {
    let h = ndarray::array![[cx(1.0, 0.0), cx(0.0, 0.0)], [cx(0.0, 0.0), cx(0.0, 0.0)]];
    assert!(matches!(AlgebraElement::new(h), Err(LopError::NotAntiHermitian { .. })));
}

#[test]
fn mode_unitary_rejects_non_unitary() {
    let m = ndarray::array![[cx(1.0, 0.0), cx(0.1, 0.0)], [cx(0.0, 0.0), cx(1.0, 0.0)]];
    assert!(matches!(ModeUnitary::new(m), Err(LopError::NotUnitary { .. })));
}

#[test]
fn lift_acts_on_states() {
    let mut r = rng(6);
    let u = random_unitary(3, &mut r);
    let psi = PureState::from_occupation(&[1, 1, 1]).unwrap();
    let out = lift_unitary(&u, 3).unwrap().apply(&psi).unwrap();
    assert!((out.norm_sqr() - 1.0).abs() < 1e-13);
    let l = lift_unitary(&u, 3).unwrap();
    let occ = OccupationVector::new(vec![3, 0, 0]);
    let el = l.element(&occ, &OccupationVector::new(vec![1, 1, 1])).unwrap();
    assert!((el - out.amplitude(&[3, 0, 0])).norm() < 1e-15);
}

#[test]
fn single_precision_routes_agree() {
    let mut r = rng(7);
    let m64 = random_unitary(3, &mut r);
    let m32 = ModeUnitary::<f32>::new(m64.matrix().mapv(|z| num_complex::Complex32::new(z.re as f32, z.im as f32))).unwrap();
    let a = lift_unitary(&m32, 2).unwrap();
    let b = lift_via_js_exponential(&m32, 2).unwrap();
    assert!(max_abs_diff(a.matrix().view(), b.matrix().view()) < 1e-4);
    assert!(unitarity_deviation(a.matrix().view()) < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ryser_equals_permutation_sum(k in 1usize..6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = lopforge::linalg::haar_unitary::<f64, _>(k, &mut r).mapv(|z| z * 1.7);
        let fast = permanent(m.view()).unwrap();
        let slow = permanent_by_permutations(&m);
        prop_assert!((fast - slow).norm() <= 1e-12 * (1.0 + slow.norm()));
    }

    #[test]
    fn lift_is_unitary_and_multiplicative(modes in 2usize..5, photons in 0usize..4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_unitary(modes, &mut r);
        let b = random_unitary(modes, &mut r);
        let la = lift_unitary(&a, photons).unwrap();
        let lb = lift_unitary(&b, photons).unwrap();
        let lab = lift_unitary(&a.compose(&b).unwrap(), photons).unwrap();
        prop_assert!(unitarity_deviation(la.matrix().view()) <= 1e-12);
        let prod = la.compose(&lb).unwrap();
        prop_assert!(max_abs_diff(prod.matrix().view(), lab.matrix().view()) <= 1e-10);
    }

    #[test]
    fn lift_of_dagger_is_dagger_of_lift(seed in any::<u64>(), photons in 0usize..4) {
        let mut r = rng(seed);
        let a = random_unitary(3, &mut r);
        let l = lift_unitary(&a, photons).unwrap();
        let ld = lift_unitary(&a.dagger(), photons).unwrap();
        let want = l.matrix().t().mapv(|z| z.conj());
        prop_assert!(max_abs_diff(ld.matrix().view(), want.view()) <= 1e-12);
    }
}
