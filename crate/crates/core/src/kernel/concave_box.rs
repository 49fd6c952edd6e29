//! Barrier method for `max t s.t. f_j(p) >= t, lower <= p_i <= upper` with
//! concave `f_j`.
//!
//! The box is mapped to the unit cube, `p = lower + (upper - lower) z`, so
//! the box barrier and the Newton system stay well scaled whatever the
//! physical units of `p`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{
    SolveReport, SolveStatus, TraceRow, ARMIJO, BACKTRACK, CENTERING_TOL, MAX_BACKTRACK, TAU_GROWTH,
};
use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::params::SolverSettings;

/// A family of smooth concave functions of `p`.
pub trait ConcaveFn {
    /// Number of variables.
    fn dim(&self) -> usize;
    /// Number of functions.
    fn count(&self) -> usize;
    /// `f_j(p)`, or `None` outside its domain.
    fn value(&self, j: usize, p: &[f64]) -> Option<f64>;
    /// Gradient and row-major Hessian of `f_j` at an interior point.
    fn derivatives(&self, j: usize, p: &[f64], grad: &mut [f64], hess: &mut [f64]);
}

pub struct ConcaveBoxProblem<'a, F: ConcaveFn + ?Sized> {
    pub f: &'a F,
    pub lower: f64,
    pub upper: f64,
    /// Warm start; pulled into the interior before use.
    pub start: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ConcaveSolution {
    pub p: Vec<f64>,
    /// `min_j f_j(p)`.
    pub t: f64,
    pub report: SolveReport,
    pub trace: Vec<TraceRow>,
}

struct Scaled<'a, F: ConcaveFn + ?Sized> {
    f: &'a F,
    lower: f64,
    width: f64,
    n: usize,
    count: usize,
}

impl<F: ConcaveFn + ?Sized> Scaled<'_, F> {
    fn to_p(&self, z: &[f64]) -> Vec<f64> {
        z.iter().map(|&zi| self.lower + self.width * zi).collect()
    }

    fn values(&self, z: &[f64]) -> Option<Vec<f64>> {
        let p = self.to_p(z);
        (0..self.count)
            .map(|j| self.f.value(j, &p).filter(|v| !v.is_nan()))
            .collect()
    }

    fn phi(&self, z: &[f64], t: f64, tau: f64) -> Option<(f64, Vec<f64>)> {
        if z.iter().any(|&zi| !(zi > 0.0 && zi < 1.0)) {
            return None;
        }
        let vals = self.values(z)?;
        let mut phi = -tau * t;
        for &v in &vals {
            let s = v - t;
            if !(s > 0.0) {
                return None;
            }
            phi -= s.ln();
        }
        for &zi in z {
            phi -= zi.ln() + (1.0 - zi).ln();
        }
        phi.is_finite().then_some((phi, vals))
    }

    /// Newton step `(dz, dt)` and the decrement `lambda²`.
    fn newton(&self, z: &[f64], t: f64, vals: &[f64], tau: f64) -> Result<(Vec<f64>, f64, f64)> {
        let n = self.n;
        let dim = n + 1;
        let p = self.to_p(z);
        let mut h = vec![0.0; dim * dim];
        let mut grad = vec![0.0; dim];
        let mut gj = vec![0.0; n];
        let mut hj = vec![0.0; n * n];
        let w2 = self.width * self.width;
        for (j, &v) in vals.iter().enumerate() {
            let s = v - t;
            gj.iter_mut().for_each(|x| *x = 0.0);
            hj.iter_mut().for_each(|x| *x = 0.0);
            self.f.derivatives(j, &p, &mut gj, &mut hj);
            for x in &mut gj {
                *x *= self.width;
            }
            // (grad f_j, -1)/s
            let mut u = gj.clone();
            u.push(-1.0);
            for a in 0..dim {
                grad[a] -= u[a] / s;
                for b in 0..dim {
                    h[a * dim + b] += u[a] * u[b] / (s * s);
                }
            }
            for a in 0..n {
                for b in 0..n {
                    h[a * dim + b] -= hj[a * n + b] * w2 / s;
                }
            }
        }
        grad[n] -= tau;
        for (i, &zi) in z.iter().enumerate() {
            grad[i] += -1.0 / zi + 1.0 / (1.0 - zi);
            h[i * dim + i] += 1.0 / (zi * zi) + 1.0 / ((1.0 - zi) * (1.0 - zi));
        }
        let mut step: Vec<f64> = grad.iter().map(|g| -g).collect();
        solve_dense(&mut h, dim, &mut step)?;
        if step.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalTrouble("non-finite Newton step".into()));
        }
        let decrement = -grad.iter().zip(&step).map(|(g, s)| g * s).sum::<f64>();
        let dt = step.pop().unwrap_or(0.0);
        Ok((step, dt, decrement))
    }
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Maximizes `min_j f_j` over the box.
pub fn solve_concave_box<F: ConcaveFn + ?Sized>(
    prob: &ConcaveBoxProblem<'_, F>,
    settings: &SolverSettings,
) -> Result<ConcaveSolution> {
    let (lower, upper) = (prob.lower, prob.upper);
    let n = prob.f.dim();
    let count = prob.f.count();
    if !lower.is_finite() || !upper.is_finite() || prob.start.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalTrouble("non-finite box or start".into()));
    }
    if lower > upper {
        return Err(Error::InvalidParams("empty box".into()));
    }
    if prob.start.len() != n || n == 0 || count == 0 {
        return Err(Error::Dimension(format!(
            "start of length {} for {n} variables",
            prob.start.len()
        )));
    }
    let eval_min = |p: &[f64]| -> Result<f64> {
        let mut t = f64::INFINITY;
        for j in 0..count {
            let v = prob
                .f
                .value(j, p)
                .ok_or_else(|| Error::Domain(format!("f_{j} undefined")))?;
            if v.is_nan() {
                return Err(Error::NumericalTrouble(format!("f_{j} is NaN")));
            }
            t = t.min(v);
        }
        Ok(t)
    };

    if lower == upper {
        let p = vec![lower; n];
        let t = eval_min(&p)?;
        return Ok(ConcaveSolution {
            p,
            t,
            report: SolveReport {
                status: SolveStatus::Optimal,
                objective: t,
                iterations: 0,
                max_violation: 0.0,
                gap: 0.0,
            },
            trace: Vec::new(),
        });
    }

    let sc = Scaled {
        f: prob.f,
        lower,
        width: upper - lower,
        n,
        count,
    };
    let z_hat: Vec<f64> = prob
        .start
        .iter()
        .map(|&p| ((p - lower) / sc.width).clamp(0.0, 1.0))
        .collect();
    let mut start = None;
    for theta in [0.99, 0.9, 0.5, 0.0] {
        let z: Vec<f64> = z_hat.iter().map(|&zi| 0.5 + theta * (zi - 0.5)).collect();
        if let Some(vals) = sc.values(&z) {
            start = Some((z, min_of(&vals) - 1.0));
            break;
        }
    }
    let (mut z, mut t) =
        start.ok_or_else(|| Error::Domain("no interior point in the domain".into()))?;
    if !t.is_finite() {
        return Err(Error::NumericalTrouble(
            "non-finite objective at start".into(),
        ));
    }

    let nu = (count + 2 * n) as f64;
    let mut tau = 1.0;
    let mut iterations = 0;
    let mut trace = Vec::new();
    let mut status = SolveStatus::Optimal;
    'outer: loop {
        let (mut phi, mut vals) = sc.phi(&z, t, tau).ok_or(Error::Infeasible)?;
        let mut decrement;
        loop {
            if iterations >= settings.max_newton {
                status = SolveStatus::MaxIter;
                break 'outer;
            }
            let (dz, dt, lam2) = sc.newton(&z, t, &vals, tau)?;
            iterations += 1;
            decrement = 0.5 * lam2.max(0.0);
            if decrement <= CENTERING_TOL {
                break;
            }
            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..MAX_BACKTRACK {
                let zn: Vec<f64> = z.iter().zip(&dz).map(|(a, b)| a + alpha * b).collect();
                let tn = t + alpha * dt;
                if let Some((pn, vn)) = sc.phi(&zn, tn, tau) {
                    if pn <= phi - ARMIJO * alpha * lam2 {
                        accepted = Some((zn, tn, pn, vn));
                        break;
                    }
                }
                alpha *= BACKTRACK;
            }
            match accepted {
                Some((zn, tn, pn, vn)) => {
                    z = zn;
                    t = tn;
                    phi = pn;
                    vals = vn;
                }
                None if decrement < 1e-6 => break,
                None => {
                    return Err(Error::NumericalTrouble(format!(
                        "box line search failed (decrement {decrement:e}, tau {tau:e})"
                    )))
                }
            }
        }
        let gap = nu / tau;
        trace.push(TraceRow {
            iteration: iterations,
            tau,
            objective: t,
            decrement,
            gap,
        });
        if gap <= settings.gap_tol * (1.0 + t.abs()) {
            break;
        }
        tau *= TAU_GROWTH;
    }

    let p: Vec<f64> = sc
        .to_p(&z)
        .into_iter()
        .map(|v| v.clamp(lower, upper))
        .collect();
    let t_final = eval_min(&p)?;
    Ok(ConcaveSolution {
        p,
        t: t_final,
        report: SolveReport {
            status,
            objective: t_final,
            iterations,
            max_violation: (t - t_final).max(0.0),
            gap: nu / tau,
        },
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `f_j(p) = -sum_i (p_i - c_ji)²`.
    struct Quadratics(Vec<Vec<f64>>);

    impl ConcaveFn for Quadratics {
        fn dim(&self) -> usize {
            self.0[0].len()
        }
        fn count(&self) -> usize {
            self.0.len()
        }
        fn value(&self, j: usize, p: &[f64]) -> Option<f64> {
            Some(
                -p.iter()
                    .zip(&self.0[j])
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>(),
            )
        }
        fn derivatives(&self, j: usize, p: &[f64], grad: &mut [f64], hess: &mut [f64]) {
            let n = p.len();
            for i in 0..n {
                grad[i] = -2.0 * (p[i] - self.0[j][i]);
                hess[i * n + i] = -2.0;
            }
        }
    }

    /// `f(p) = sum_i ln(1 + p_i)`, increasing in every coordinate.
    struct Monotone(usize, usize);

    impl ConcaveFn for Monotone {
        fn dim(&self) -> usize {
            self.0
        }
        fn count(&self) -> usize {
            self.1
        }
        fn value(&self, _: usize, p: &[f64]) -> Option<f64> {
            Some(p.iter().map(|x| x.ln_1p()).sum())
        }
        fn derivatives(&self, _: usize, p: &[f64], grad: &mut [f64], hess: &mut [f64]) {
            let n = p.len();
            for i in 0..n {
                grad[i] = 1.0 / (1.0 + p[i]);
                hess[i * n + i] = -1.0 / ((1.0 + p[i]) * (1.0 + p[i]));
            }
        }
    }

    #[test]
    fn monotone_goes_to_upper_corner() {
        let f = Monotone(4, 2);
        let prob = ConcaveBoxProblem {
            f: &f,
            lower: 1e-3,
            upper: 0.0316,
            start: vec![0.0316; 4],
        };
        let sol = solve_concave_box(&prob, &SolverSettings::default()).unwrap();
        assert_eq!(sol.report.status, SolveStatus::Optimal);
        for p in &sol.p {
            assert!((p - 0.0316).abs() < 1e-6 * 0.0316 * 10.0, "p = {p}");
        }
    }

    #[test]
    fn max_min_of_quadratics_matches_grid() {
        let f = Quadratics(vec![vec![0.2, 0.9], vec![0.8, 0.1], vec![1.5, 0.5]]);
        let prob = ConcaveBoxProblem {
            f: &f,
            lower: 0.0,
            upper: 1.0,
            start: vec![1.0, 1.0],
        };
        let sol = solve_concave_box(&prob, &SolverSettings::default()).unwrap();
        let q = 801;
        let mut best = f64::NEG_INFINITY;
        for a in 0..q {
            for b in 0..q {
                let p = [a as f64 / (q - 1) as f64, b as f64 / (q - 1) as f64];
                let v = (0..3)
                    .map(|j| f.value(j, &p).unwrap())
                    .fold(f64::INFINITY, f64::min);
                best = best.max(v);
            }
        }
        assert!(sol.t >= best - 1e-6, "solver {} grid {}", sol.t, best);
        assert!(sol.t <= best + 1e-4);
    }

    #[test]
    fn degenerate_box_and_nan() {
        let f = Monotone(2, 1);
        let prob = ConcaveBoxProblem {
            f: &f,
            lower: 0.5,
            upper: 0.5,
            start: vec![0.5; 2],
        };
        let sol = solve_concave_box(&prob, &SolverSettings::default()).unwrap();
        assert_eq!(sol.p, [0.5, 0.5]);
        assert!((sol.t - 2.0 * 1.5f64.ln()).abs() < 1e-15);
        let prob = ConcaveBoxProblem {
            f: &f,
            lower: 0.0,
            upper: f64::NAN,
            start: vec![0.5; 2],
        };
        assert!(matches!(
            solve_concave_box(&prob, &SolverSettings::default()),
            Err(Error::NumericalTrouble(_))
        ));
    }

    #[test]
    fn deterministic() {
        let f = Quadratics(vec![vec![0.3, 0.6, 0.1], vec![0.7, 0.2, 0.9]]);
        let prob = ConcaveBoxProblem {
            f: &f,
            lower: 0.0,
            upper: 1.0,
            start: vec![0.9; 3],
        };
        let a = solve_concave_box(&prob, &SolverSettings::default()).unwrap();
        let b = solve_concave_box(&prob, &SolverSettings::default()).unwrap();
        assert_eq!(a.p, b.p);
        assert_eq!(a.t.to_bits(), b.t.to_bits());
    }
}
