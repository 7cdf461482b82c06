//! Preconditioned nonlinear conjugate gradient for objectives whose
//! restriction to any line is a polynomial of degree at most four.

/// Objective with a quartic line restriction.
pub trait QuarticObjective {
    fn dim(&self) -> usize;

    /// Energy at `x`; writes the gradient into `grad`.
    fn energy_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64;

    /// Coefficients `[c1, c2, c3, c4]` of `φ(α) − φ(0)` where
    /// `φ(α) = energy(x + α·d)`.
    fn line_polynomial(&self, x: &[f64], d: &[f64]) -> [f64; 4];

    /// Positive diagonal preconditioner at `x`.
    fn diagonal(&self, x: &[f64], out: &mut [f64]);

    /// Norm against which the gradient is measured for convergence.
    fn gradient_scale(&self) -> f64;
}

#[derive(Debug, Clone)]
pub struct NcgOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Restart with steepest descent after this many iterations; 0 means
    /// the problem dimension.
    pub restart_every: usize,
    /// Recompute the diagonal preconditioner this often.
    pub precondition_every: usize,
    pub record_energy: bool,
}

impl Default for NcgOptions {
    fn default() -> Self {
        NcgOptions {
            max_iterations: 100_000,
            tolerance: 1e-8,
            restart_every: 0,
            precondition_every: 50,
            record_energy: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NcgOutcome {
    pub converged: bool,
    pub iterations: usize,
    /// ‖∇E‖ / gradient_scale at exit.
    pub residual: f64,
    pub energy: f64,
    /// Start energy followed by the start energy plus the accumulated
    /// line-polynomial drop of every accepted step. Differences are exact
    /// to the accuracy of the polynomial, free of the cancellation that
    /// limits recomputed totals near the minimum.
    pub energy_history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn poly_value(c: &[f64; 4], a: f64) -> f64 {
    a * (c[0] + a * (c[1] + a * (c[2] + a * c[3])))
}

fn poly_slope(c: &[f64; 4], a: f64) -> f64 {
    c[0] + a * (2.0 * c[1] + a * (3.0 * c[2] + a * 4.0 * c[3]))
}

/// Step length at a local minimum of `φ(α) − φ(0)` for α > 0, given
/// `φ'(0) = c[0] < 0`. `None` when the polynomial has no bounded minimum.
pub(crate) fn quartic_step(c: &[f64; 4]) -> Option<f64> {
    if !(c[0] < 0.0) {
        return None;
    }
    let mut hi = if c[1] > 0.0 { -c[0] / (2.0 * c[1]) } else { 1.0 };
    if !(hi.is_finite() && hi > 0.0) {
        hi = 1.0;
    }
    let mut lo = 0.0;
    let mut doublings = 0;
    while poly_slope(c, hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 || !hi.is_finite() {
            return None;
        }
    }
    // φ' changes sign in [lo, hi]; Newton on φ' guarded by bisection.
    let mut a = hi;
    for _ in 0..100 {
        let s = poly_slope(c, a);
        if s > 0.0 {
            hi = a;
        } else if s < 0.0 {
            lo = a;
        } else {
            break;
        }
        let curv = 2.0 * c[1] + a * (6.0 * c[2] + a * 12.0 * c[3]);
        let mut next = if curv > 0.0 { a - s / curv } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - a).abs() <= 1e-14 * a || hi - lo <= 1e-14 * hi {
            a = next;
            break;
        }
        a = next;
    }
    Some(a)
}

/// Minimize from `x` in place.
///
/// Directions follow Polak–Ribière with non-negative β, restarted with
/// steepest descent every `restart_every` iterations or whenever the
/// direction stops being a descent direction. Each step lands on a minimum
/// of the exact quartic line restriction and is then backtracked until
/// the Armijo condition holds, so every accepted step lowers the energy.
pub fn minimize<O: QuarticObjective>(objective: &O, x: &mut [f64], options: &NcgOptions) -> NcgOutcome {
    let n = objective.dim();
    assert_eq!(x.len(), n);
    let scale = objective.gradient_scale();
    let restart_every = if options.restart_every == 0 {
        n.max(1)
    } else {
        options.restart_every
    };

    let mut grad = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut grad_new = vec![0.0; n];

    let mut energy = objective.energy_gradient(x, &mut grad);
    objective.diagonal(x, &mut diag);
    for i in 0..n {
        z[i] = grad[i] / diag[i];
        d[i] = -z[i];
    }
    let mut zg = dot(&z, &grad);
    let mut tracked = energy;
    let mut history = Vec::new();
    if options.record_energy {
        history.push(tracked);
    }

    let mut residual = dot(&grad, &grad).sqrt() / scale;
    let mut since_restart = 0;
    let mut iterations = 0;

    while iterations < options.max_iterations {
        if residual <= options.tolerance {
            break;
        }
        iterations += 1;

        if !(dot(&grad, &d) < 0.0) {
            for i in 0..n {
                d[i] = -z[i];
            }
            since_restart = 0;
        }

        let coeffs = objective.line_polynomial(x, &d);
        let step = match quartic_step(&coeffs) {
            Some(a) => a,
            None => break,
        };
        // Armijo backtracking on the exact line polynomial.
        let mut alpha = step;
        let mut accepted = false;
        for _ in 0..60 {
            let drop = poly_value(&coeffs, alpha);
            if drop < 0.0 && drop <= 1e-4 * alpha * coeffs[0] {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
        for i in 0..n {
            x[i] += alpha * d[i];
        }

        energy = objective.energy_gradient(x, &mut grad_new);
        tracked += poly_value(&coeffs, alpha);
        if options.record_energy {
            history.push(tracked);
        }
        residual = dot(&grad_new, &grad_new).sqrt() / scale;

        since_restart += 1;
        if iterations % options.precondition_every.max(1) == 0 {
            objective.diagonal(x, &mut diag);
        }
        let mut num = 0.0;
        let mut zg_new = 0.0;
        for i in 0..n {
            let zi = grad_new[i] / diag[i];
            num += zi * (grad_new[i] - grad[i]);
            zg_new += zi * grad_new[i];
            z[i] = zi;
        }
        let beta = if since_restart >= restart_every || zg <= 0.0 {
            since_restart = 0;
            0.0
        } else {
            (num / zg).max(0.0)
        };
        for i in 0..n {
            d[i] = -z[i] + beta * d[i];
        }
        zg = zg_new;
        std::mem::swap(&mut grad, &mut grad_new);
    }

    NcgOutcome {
        converged: residual <= options.tolerance,
        iterations,
        residual,
        energy,
        energy_history: history,
    }
}
