//! Nelder–Mead simplex minimization.

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexOptions {
    pub max_evaluations: usize,
    pub x_tolerance: f64,
    pub f_tolerance: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    options: SimplexOptions,
) -> SimplexOutcome {
    let n = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64], evaluations: &mut usize| {
        *evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evaluations);
    simplex.push((x0.to_vec(), v0));
    for k in 0..n {
        let mut x = x0.to_vec();
        x[k] += step;
        let v = eval(&x, &mut evaluations);
        simplex.push((x, v));
    }
    let mut iterations = 0;
    let mut converged = false;
    while evaluations < options.max_evaluations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[n].1);
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter <= options.x_tolerance && (worst - best).abs() <= options.f_tolerance * (1.0 + best.abs()) {
            converged = true;
            break;
        }
        iterations += 1;
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = along(-1.0);
        let fr = eval(&xr, &mut evaluations);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evaluations);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let x = along(-0.5);
            let v = eval(&x, &mut evaluations);
            (x, v)
        } else {
            let x = along(0.5);
            let v = eval(&x, &mut evaluations);
            (x, v)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = x_best.iter().zip(&entry.0).map(|(b, v)| b + 0.5 * (v - b)).collect();
            let v = eval(&x, &mut evaluations);
            *entry = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    SimplexOutcome {
        x,
        value,
        evaluations,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(
            f,
            &[-1.2, 1.0],
            0.1,
            SimplexOptions {
                max_evaluations: 5000,
                x_tolerance: 1e-10,
                f_tolerance: 1e-14,
            },
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-7 && (r.x[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn budget_exhaustion() {
        let r = nelder_mead(
            |x: &[f64]| x.iter().map(|v| v * v).sum(),
            &[1.0; 4],
            0.5,
            SimplexOptions {
                max_evaluations: 10,
                x_tolerance: 1e-12,
                f_tolerance: 1e-14,
            },
        );
        assert!(!r.converged);
    }
}
