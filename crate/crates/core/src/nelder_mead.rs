//! Derivative-free Nelder–Mead simplex minimization.
//!
//! Standard coefficients (reflection 1, expansion 2, contraction 1/2,
//! shrink 1/2). The initial simplex perturbs each coordinate by 5 % of its
//! value (0.00025 when it is zero). Ties keep the earlier vertex, so a start
//! point that is already optimal is returned unchanged.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    pub x_tol: f64,
    pub f_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iterations: 600,
            x_tol: 1e-5,
            f_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

pub fn initial_simplex(x0: &[f64]) -> Vec<Vec<f64>> {
    let mut simplex = Vec::with_capacity(x0.len() + 1);
    simplex.push(x0.to_vec());
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] = if v[i] != 0.0 { v[i] * 1.05 } else { 0.00025 };
        simplex.push(v);
    }
    simplex
}

fn combine(a: &[f64], wa: f64, b: &[f64], wb: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect()
}

pub fn minimize<F>(mut f: F, x0: &[f64], options: &NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex = initial_simplex(x0);
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();
    let mut iterations = 0;
    let mut converged = false;

    loop {
        // Stable ordering by value.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let x_spread = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let f_spread = values[1..]
            .iter()
            .map(|v| (v - values[0]).abs())
            .fold(0.0, f64::max);
        if (x_spread <= options.x_tol && f_spread <= options.f_tol) || values[0] == 0.0 {
            converged = true;
            break;
        }
        if iterations >= options.max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = alloc::vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let f_worst = values[n];

        let reflected = combine(&centroid, 2.0, &worst, -1.0);
        let f_r = eval(&reflected);
        if f_r < values[0] {
            let expanded = combine(&centroid, 3.0, &worst, -2.0);
            let f_e = eval(&expanded);
            if f_e < f_r {
                simplex[n] = expanded;
                values[n] = f_e;
            } else {
                simplex[n] = reflected;
                values[n] = f_r;
            }
            continue;
        }
        if f_r < values[n - 1] {
            simplex[n] = reflected;
            values[n] = f_r;
            continue;
        }

        let shrink = if f_r < f_worst {
            let outside = combine(&centroid, 1.5, &worst, -0.5);
            let f_c = eval(&outside);
            if f_c <= f_r {
                simplex[n] = outside;
                values[n] = f_c;
                false
            } else {
                true
            }
        } else {
            let inside = combine(&centroid, 0.5, &worst, 0.5);
            let f_cc = eval(&inside);
            if f_cc < f_worst {
                simplex[n] = inside;
                values[n] = f_cc;
                false
            } else {
                true
            }
        };
        if shrink {
            let best = simplex[0].clone();
            for i in 1..=n {
                simplex[i] = combine(&best, 0.5, &simplex[i], 0.5);
                values[i] = eval(&simplex[i]);
            }
        }
    }

    Minimum {
        x: simplex.swap_remove(0),
        value: values[0],
        iterations,
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let opts = NelderMeadOptions {
            max_iterations: 5000,
            x_tol: 1e-10,
            f_tol: 1e-14,
        };
        let m = minimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &opts,
        );
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn optimal_start_is_kept() {
        let m = minimize(
            |x| x[0].abs() + (x[1] - 2.0).abs(),
            &[0.0, 2.0],
            &Default::default(),
        );
        assert_eq!(m.x, [0.0, 2.0]);
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + (x[1] + 1.0).powi(4) + x[2].abs();
        let a = minimize(f, &[1.0, 1.0, 1.0], &Default::default());
        let b = minimize(f, &[1.0, 1.0, 1.0], &Default::default());
        assert_eq!(a, b);
    }
}
