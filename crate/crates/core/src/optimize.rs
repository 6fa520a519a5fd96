//! Derivative-free local minimization (Nelder-Mead) and a seeded multistart driver.

use rand::Rng;

use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub struct NelderMeadOptions<T> {
    pub max_evaluations: usize,
    /// Stop once the spread of simplex values falls below this.
    pub f_tolerance: T,
    /// Stop once the simplex diameter falls below this.
    pub x_tolerance: T,
    pub initial_step: T,
}

impl<T: Real> Default for NelderMeadOptions<T> {
    fn default() -> Self {
        Self {
            max_evaluations: 4000,
            f_tolerance: T::lit(1e-15),
            x_tolerance: T::lit(1e-12),
            initial_step: T::lit(0.1),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum<T> {
    pub x: Vec<T>,
    pub value: T,
    pub evaluations: usize,
}

/// Minimizes `f` from `x0` with the standard reflection / expansion / contraction / shrink
/// moves (coefficients 1, 2, 1/2, 1/2).
pub fn nelder_mead<T: Real, F: FnMut(&[T]) -> T>(
    mut f: F,
    x0: &[T],
    opts: &NelderMeadOptions<T>,
) -> Minimum<T> {
    let n = x0.len();
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let mut evals = 0usize;
    let mut eval = |x: &[T], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            T::infinity()
        } else {
            v
        }
    };

    if n == 0 {
        let value = eval(x0, &mut evals);
        return Minimum {
            x: Vec::new(),
            value,
            evaluations: evals,
        };
    }

    let mut simplex: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        let step = if p[i].abs() > T::lit(1e-3) {
            opts.initial_step * p[i].abs().max(T::one())
        } else {
            opts.initial_step
        };
        p[i] = p[i] + step;
        simplex.push(p);
    }
    let mut values: Vec<T> = simplex.iter().map(|p| eval(p, &mut evals)).collect();

    while evals < opts.max_evaluations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = (values[n] - values[0]).abs();
        let diameter = simplex[1..]
            .iter()
            .flat_map(|p| p.iter().zip(simplex[0].iter()).map(|(a, b)| (*a - *b).abs()))
            .fold(T::zero(), T::max);
        if spread <= opts.f_tolerance && diameter <= opts.x_tolerance {
            break;
        }
        if diameter <= opts.x_tolerance * T::lit(1e-3) {
            break;
        }

        let centroid: Vec<T> = (0..n)
            .map(|j| simplex[..n].iter().fold(T::zero(), |acc, p| acc + p[j]) / T::from_usize(n).unwrap())
            .collect();
        let along = |t: T| -> Vec<T> {
            centroid
                .iter()
                .zip(simplex[n].iter())
                .map(|(c, w)| *c + t * (*c - *w))
                .collect()
        };

        let reflected = along(T::one());
        let fr = eval(&reflected, &mut evals);
        if fr < values[0] {
            let expanded = along(two);
            let fe = eval(&expanded, &mut evals);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[n] {
            let p = along(half);
            let v = eval(&p, &mut evals);
            (p, v)
        } else {
            let p = along(-half);
            let v = eval(&p, &mut evals);
            (p, v)
        };
        if fc < values[n].min(fr) {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].clone();
        for i in 1..=n {
            let p: Vec<T> = simplex[i]
                .iter()
                .zip(best.iter())
                .map(|(x, b)| *b + half * (*x - *b))
                .collect();
            values[i] = eval(&p, &mut evals);
            simplex[i] = p;
        }
    }

    let (ibest, _) = values
        .iter()
        .enumerate()
        .fold((0, T::infinity()), |(bi, bv), (i, v)| if *v < bv { (i, *v) } else { (bi, bv) });
    Minimum {
        x: simplex[ibest].clone(),
        value: values[ibest],
        evaluations: evals,
    }
}

/// Runs [`nelder_mead`] from `starts` points drawn by `sample`, restarting each run once from
/// its own optimum, and returns every local minimum in start order.
pub fn multistart<T, F, S, R>(
    mut f: F,
    mut sample: S,
    starts: usize,
    rng: &mut R,
    opts: &NelderMeadOptions<T>,
) -> Vec<Minimum<T>>
where
    T: Real,
    F: FnMut(&[T]) -> T,
    S: FnMut(&mut R) -> Vec<T>,
    R: Rng + ?Sized,
{
    (0..starts)
        .map(|_| {
            let x0 = sample(rng);
            let first = nelder_mead(&mut f, &x0, opts);
            let second = nelder_mead(&mut f, &first.x, opts);
            Minimum {
                evaluations: first.evaluations + second.evaluations,
                ..if second.value <= first.value { second } else { first }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions {
            max_evaluations: 20_000,
            ..Default::default()
        };
        let m = nelder_mead(f, &[-1.2, 1.0], &opts);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{:?}", m.x);
    }

    #[test]
    fn multistart_finds_global_minimum_of_double_well() {
        // local minimum near x = -1 (value about 0.3), global one near x = 1 (value about 0)
        let f = |x: &[f64]| (x[0] * x[0] - 1.0).powi(2) + 0.15 * (1.0 - x[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let runs = multistart(
            f,
            |r: &mut ChaCha8Rng| vec![r.random_range(-2.0..2.0)],
            8,
            &mut rng,
            &NelderMeadOptions::default(),
        );
        let best = runs
            .iter()
            .min_by(|a, b| a.value.partial_cmp(&b.value).unwrap())
            .unwrap();
        assert!(best.x[0] > 0.0 && best.value < 0.01, "{:?}", best);
    }
}
