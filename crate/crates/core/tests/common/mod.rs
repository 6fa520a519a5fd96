#![allow(dead_code)]

use lopforge::linalg::{gaussian_vector, haar_unitary};
use lopforge::{ModeUnitary, PureState};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ModeUnitary<f64> {
    ModeUnitary::new(haar_unitary::<f64, _>(n, rng)).unwrap()
}

/// Uniform point on the unit sphere of the two-photon two-mode sector.
pub fn random_qutrit(rng: &mut ChaCha8Rng) -> PureState<f64> {
    let v = gaussian_vector::<f64, _>(3, rng);
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    PureState::qutrit(v[0] / n, v[1] / n, v[2] / n).unwrap()
}

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn qutrit(a: Complex64, b: Complex64, c: Complex64) -> PureState<f64> {
    PureState::qutrit(a, b, c).unwrap()
}

/// Permanent by summing over all permutations.
pub fn permanent_by_permutations(m: &ndarray::Array2<Complex64>) -> Complex64 {
    fn rec(m: &ndarray::Array2<Complex64>, row: usize, used: &mut Vec<bool>) -> Complex64 {
        let n = m.nrows();
        if row == n {
            return Complex64::new(1.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for col in 0..n {
            if !used[col] {
                used[col] = true;
                acc += m[[row, col]] * rec(m, row + 1, used);
                used[col] = false;
            }
        }
        acc
    }
    rec(m, 0, &mut vec![false; m.nrows()])
}
