//! Derivative-free minimisation: a plain Nelder-Mead simplex.

#[derive(Clone, Debug)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex along each axis.
    pub initial_step: f64,
    /// Stop once every vertex lies within this distance of the best one.
    pub x_tolerance: f64,
    /// Stop once the spread of function values falls below this.
    pub f_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 1e-2,
            x_tolerance: 1e-9,
            f_tolerance: 0.0,
            max_iterations: 10_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimises `f` starting from `start`. Fully deterministic.
pub fn nelder_mead<F>(f: F, start: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        // Stable sort keeps the older vertex first on ties.
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = simplex[1..]
            .iter()
            .map(|v| max_abs_diff(v, &simplex[0]))
            .fold(0.0, f64::max);
        if spread <= opts.x_tolerance || values[dim] - values[0] < opts.f_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|v| v[j]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = along(-REFLECT);
        let f_r = f(&reflected);
        if f_r < values[0] {
            let expanded = along(-EXPAND);
            let f_e = f(&expanded);
            if f_e < f_r {
                simplex[dim] = expanded;
                values[dim] = f_e;
            } else {
                simplex[dim] = reflected;
                values[dim] = f_r;
            }
            continue;
        }
        if f_r < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = f_r;
            continue;
        }
        let (contracted, f_c) = if f_r < values[dim] {
            let p = along(-CONTRACT);
            let fp = f(&p);
            (p, fp)
        } else {
            let p = along(CONTRACT);
            let fp = f(&p);
            (p, fp)
        };
        if f_c < values[dim].min(f_r) {
            simplex[dim] = contracted;
            values[dim] = f_c;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=dim {
            for (x, b) in simplex[i].iter_mut().zip(&best) {
                *x = b + SHRINK * (*x - b);
            }
            values[i] = f(&simplex[i]);
        }
    }

    let best = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    Minimum {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.25).powi(2);
        let m = nelder_mead(
            f,
            &[0.0, 0.0],
            &NelderMeadOptions {
                initial_step: 0.5,
                ..Default::default()
            },
        );
        assert!(m.converged);
        assert!((m.x[0] - 1.5).abs() < 1e-8);
        assert!((m.x[1] + 0.25).abs() < 1e-8);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(
            f,
            &[-1.2, 1.0],
            &NelderMeadOptions {
                initial_step: 0.1,
                x_tolerance: 1e-10,
                max_iterations: 20_000,
                ..Default::default()
            },
        );
        assert!((m.x[0] - 1.0).abs() < 1e-6, "{:?}", m);
        assert!((m.x[1] - 1.0).abs() < 1e-6, "{:?}", m);
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0].sin() + 0.3).powi(2) + x[1].cos().powi(2);
        let a = nelder_mead(f, &[0.2, 0.4], &NelderMeadOptions::default());
        let b = nelder_mead(f, &[0.2, 0.4], &NelderMeadOptions::default());
        assert_eq!(a.x, b.x);
        assert_eq!(a.iterations, b.iterations);
    }
}
