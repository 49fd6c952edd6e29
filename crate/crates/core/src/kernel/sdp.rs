//! Barrier method for small complex SDPs with smooth concave constraints.
//!
//! Problem:
//!
//! ```text
//!     max t  s.t.  g_j(W) >= t,  diag(W) = 1,  W ⪰ 0,  ‖W - Ŵ‖_F <= xi
//!     g_j(W) = sum_k w_jk ln(<A_jk, W> + b_jk) - <C_j, W> - c_j
//! ```
//!
//! with `A_jk` PSD and `w_jk >= 0`. The barrier is
//!
//! ```text
//!     -tau t - sum_j ln(g_j - t) - ln det W - ln(xi² - ‖W - Ŵ‖²)
//! ```
//!
//! Its Hessian is `M + sum_k u_k u_kᵀ` where `M(D) = W⁻¹ D W⁻¹ + (2/r) D`
//! and the `u_k` are a handful of rank-one terms (one per constraint, one
//! per log term, one for the ball). In the eigenbasis of `W`, `M` is
//! diagonal in the matrix entries, so a Newton step only needs `M⁻¹` applied
//! to `K + 1` matrices plus the `m` diagonal unit matrices, followed by a
//! dense solve of size `K + 1 + m` for the rank-one weights, the `t` step
//! and the multipliers of `diag(D) = 0`.
//!
//! The eigendecomposition goes through the real embedding (see
//! [`crate::linalg`]); the rest of the algebra stays complex.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{
    SolveReport, SolveStatus, TraceRow, ARMIJO, BACKTRACK, CENTERING_TOL, MAX_BACKTRACK,
    MAX_EXPAND, TAU_GROWTH,
};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, log_det_pd, solve_dense, CMatrix};
use crate::params::SolverSettings;
use crate::rates::PsdMatrix;

pub const MAX_DIM: usize = 128;

/// `weight * ln(<a, W> + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogTerm {
    pub weight: f64,
    pub a: CMatrix,
    pub b: f64,
}

/// `g(W) = sum logs - <linear, W> - constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothConstraint {
    pub logs: Vec<LogTerm>,
    pub linear: CMatrix,
    pub constant: f64,
}

impl SmoothConstraint {
    /// `g(W)`, or `None` outside the domain of a log.
    pub fn value(&self, w: &CMatrix) -> Option<f64> {
        let mut g = -w.inner(&self.linear) - self.constant;
        for term in &self.logs {
            let arg = w.inner(&term.a) + term.b;
            if !(arg > 0.0) {
                return None;
            }
            g += term.weight * arg.ln();
        }
        Some(g)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    /// Expansion point `Ŵ`: unit diagonal, PSD.
    pub center: CMatrix,
    /// Trust-region radius; `None` drops the ball.
    pub radius: Option<f64>,
    pub constraints: Vec<SmoothConstraint>,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub w: PsdMatrix,
    pub t: f64,
    pub report: SolveReport,
    pub trace: Vec<TraceRow>,
}

/// Log term rescaled by `kappa = b + tr(A)` so its argument is O(1).
struct Term {
    weight: f64,
    a: CMatrix,
    b: f64,
    ln_kappa: f64,
    /// `A = sum_k sign_k f_k f_k†` over the numerically nonzero spectrum.
    factors: Vec<(f64, Vec<Complex64>)>,
}

impl Term {
    /// `U† A U` through the factors.
    fn in_basis(&self, u: &CMatrix) -> CMatrix {
        let m = u.dim();
        if self.factors.len() * 2 >= m {
            return self.a.congruence_adj(u).hermitian_part();
        }
        let mut out = CMatrix::zeros(m);
        for (sign, f) in &self.factors {
            // (U† f)_a = sum_l conj(U_la) f_l
            let mut g = vec![Complex64::new(0.0, 0.0); m];
            for (l, fl) in f.iter().enumerate() {
                for (ga, ula) in g.iter_mut().zip(u.row(l)) {
                    *ga += ula.conj() * fl;
                }
            }
            out.add_outer(*sign, &g);
        }
        out
    }
}

fn low_rank_factors(a: &CMatrix) -> Result<Vec<(f64, Vec<Complex64>)>> {
    let eig = hermitian_eigen(a)?;
    let top = eig.values.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let mut out = Vec::new();
    for (k, &l) in eig.values.iter().enumerate() {
        if l.abs() > 1e-13 * top {
            let r = l.abs().sqrt();
            out.push((l.signum(), eig.vector(k).iter().map(|z| z * r).collect()));
        }
    }
    Ok(out)
}

struct Con {
    terms: Vec<Term>,
    linear: CMatrix,
    constant: f64,
}

struct Prepared<'a> {
    m: usize,
    center: &'a CMatrix,
    radius: Option<f64>,
    cons: Vec<Con>,
}

/// Constraint state at a point inside the barrier domain.
struct Eval {
    args: Vec<Vec<f64>>,
    g: Vec<f64>,
    /// `xi² - ‖W - Ŵ‖²`, infinite without a ball.
    r: f64,
}

impl Prepared<'_> {
    fn constraint_values(&self, w: &CMatrix) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
        let mut args = Vec::with_capacity(self.cons.len());
        let mut g = Vec::with_capacity(self.cons.len());
        for con in &self.cons {
            let mut val = -w.inner(&con.linear) - con.constant;
            let mut a_j = Vec::with_capacity(con.terms.len());
            for term in &con.terms {
                let arg = w.inner(&term.a) + term.b;
                if !(arg > 0.0) {
                    return None;
                }
                val += term.weight * (term.ln_kappa + arg.ln());
                a_j.push(arg);
            }
            args.push(a_j);
            g.push(val);
        }
        Some((args, g))
    }

    fn ball_slack(&self, w: &CMatrix) -> f64 {
        match self.radius {
            Some(xi) => {
                let d = w.sub(self.center).frobenius_norm();
                xi * xi - d * d
            }
            None => f64::INFINITY,
        }
    }

    fn eval(&self, w: &CMatrix, t: f64, tau: f64) -> Option<Eval> {
        let logdet = log_det_pd(w)?;
        let (args, g) = self.constraint_values(w)?;
        let r = self.ball_slack(w);
        if !(r > 0.0) {
            return None;
        }
        let mut phi = -tau * t - logdet;
        if r.is_finite() {
            phi -= r.ln();
        }
        for &gj in &g {
            let s = gj - t;
            if !(s > 0.0) {
                return None;
            }
            phi -= s.ln();
        }
        phi.is_finite().then_some(Eval { args, g, r })
    }

    fn barrier_order(&self) -> f64 {
        (self.m + self.cons.len() + usize::from(self.radius.is_some())) as f64
    }
}

fn check_matrix(x: &CMatrix, m: usize, what: &str) -> Result<()> {
    if x.dim() != m {
        return Err(Error::Dimension(format!(
            "{what} is {0}x{0}, expected {m}x{m}",
            x.dim()
        )));
    }
    if !x.is_finite() {
        return Err(Error::NumericalTrouble(format!(
            "non-finite entry in {what}"
        )));
    }
    Ok(())
}

fn prepare(prob: &SdpProblem) -> Result<Prepared<'_>> {
    let m = prob.center.dim();
    if m == 0 || m > MAX_DIM {
        return Err(Error::Dimension(format!(
            "SDP dimension {m} outside 1..={MAX_DIM}"
        )));
    }
    check_matrix(&prob.center, m, "center")?;
    if let Some(xi) = prob.radius {
        if !xi.is_finite() || xi.is_nan() {
            return Err(Error::NumericalTrouble("non-finite trust radius".into()));
        }
        if xi < 0.0 {
            return Err(Error::InvalidParams("negative trust radius".into()));
        }
    }
    let scale = prob
        .center
        .as_slice()
        .iter()
        .fold(1.0f64, |s, z| s.max(z.norm()));
    if prob.center.hermitian_defect() > 1e-10 * scale {
        return Err(Error::Infeasible);
    }
    if prob.center.diag_re().iter().any(|d| (d - 1.0).abs() > 1e-9) {
        return Err(Error::Infeasible);
    }
    if prob.constraints.is_empty() {
        return Err(Error::InvalidParams(
            "SDP needs at least one constraint".into(),
        ));
    }
    let mut cons = Vec::with_capacity(prob.constraints.len());
    for c in &prob.constraints {
        check_matrix(&c.linear, m, "linear term")?;
        if !c.constant.is_finite() {
            return Err(Error::NumericalTrouble("non-finite constant".into()));
        }
        let mut terms = Vec::with_capacity(c.logs.len());
        for lt in &c.logs {
            check_matrix(&lt.a, m, "log term")?;
            if !lt.weight.is_finite() || !lt.b.is_finite() {
                return Err(Error::NumericalTrouble("non-finite log term".into()));
            }
            if lt.weight < 0.0 {
                return Err(Error::InvalidParams("negative log weight".into()));
            }
            let kappa = lt.b.abs() + lt.a.trace().re.abs();
            let kappa = if kappa > 0.0 { kappa } else { 1.0 };
            let a = lt.a.hermitian_part().scaled(1.0 / kappa);
            terms.push(Term {
                weight: lt.weight,
                factors: low_rank_factors(&a)?,
                a,
                b: lt.b / kappa,
                ln_kappa: kappa.ln(),
            });
        }
        cons.push(Con {
            terms,
            linear: c.linear.clone(),
            constant: c.constant,
        });
    }
    Ok(Prepared {
        m,
        center: &prob.center,
        radius: prob.radius,
        cons,
    })
}

/// `D̃_ab * kappa_ab`, the action of `M⁻¹` in the eigenbasis.
fn apply_kinv(x: &CMatrix, kappa: &[f64]) -> CMatrix {
    let mut out = x.clone();
    for (o, k) in out.as_mut_slice().iter_mut().zip(kappa) {
        *o *= *k;
    }
    out
}

/// Real diagonal of `U X U†`.
fn diag_back(x: &CMatrix, u: &CMatrix) -> Vec<f64> {
    let m = x.dim();
    let y = u.matmul(x);
    (0..m)
        .map(|l| {
            y.row(l)
                .iter()
                .zip(u.row(l))
                .map(|(a, b)| (a * b.conj()).re)
                .sum()
        })
        .collect()
}

struct Direction {
    d: CMatrix,
    dt: f64,
    /// `lambda²`.
    decrement: f64,
    /// Eigenvalues of `W^{-1/2} D W^{-1/2}`.
    mu: Vec<f64>,
    /// `<A_jk, D>` (rescaled terms), `<C_j, D>`, `<W - Ŵ, D>`, `‖D‖²`.
    da: Vec<Vec<f64>>,
    dlin: Vec<f64>,
    dball: f64,
    dnorm2: f64,
}

fn newton_direction(
    p: &Prepared<'_>,
    w: &CMatrix,
    t: f64,
    ev: &Eval,
    tau: f64,
) -> Result<Direction> {
    let m = p.m;
    let eig = hermitian_eigen(w)?;
    let u = &eig.vectors;
    let lam: Vec<f64> = eig
        .values
        .iter()
        .map(|&l| l.max(f64::MIN_POSITIVE))
        .collect();
    let rho = if ev.r.is_finite() { 2.0 / ev.r } else { 0.0 };
    let mut kappa = vec![0.0; m * m];
    for a in 0..m {
        for b in 0..m {
            let ll = lam[a] * lam[b];
            kappa[a * m + b] = ll / (1.0 + rho * ll);
        }
    }

    // rank-one Hessian terms in the eigenbasis, with their t-coefficients
    let mut us: Vec<CMatrix> = Vec::new();
    let mut eta: Vec<f64> = Vec::new();
    let mut grad = CMatrix::from_diag(&lam.iter().map(|l| -1.0 / l).collect::<Vec<_>>());
    let mut grad_t = -tau;
    for (j, con) in p.cons.iter().enumerate() {
        let s = ev.g[j] - t;
        let a_basis: Vec<CMatrix> = con.terms.iter().map(|term| term.in_basis(u)).collect();
        let mut gj = con.linear.congruence_adj(u).hermitian_part().scaled(-1.0);
        for (k, term) in con.terms.iter().enumerate() {
            gj.add_scaled(term.weight / ev.args[j][k], &a_basis[k]);
        }
        grad.add_scaled(-1.0 / s, &gj);
        grad_t += 1.0 / s;
        us.push(gj.scaled(1.0 / s));
        eta.push(-1.0 / s);
        for (k, term) in con.terms.iter().enumerate() {
            if term.weight == 0.0 {
                continue;
            }
            let coef = (term.weight / s).sqrt() / ev.args[j][k];
            us.push(a_basis[k].scaled(coef));
            eta.push(0.0);
        }
    }
    if rho > 0.0 {
        let delta = w.sub(p.center).congruence_adj(u).hermitian_part();
        grad.add_scaled(rho, &delta);
        us.push(delta.scaled(rho));
        eta.push(0.0);
    }
    let k_count = us.len();

    let r0 = apply_kinv(&grad.scaled(-1.0), &kappa);
    let rk: Vec<CMatrix> = us.iter().map(|x| apply_kinv(x, &kappa)).collect();
    let diag_r0 = diag_back(&r0, u);
    let diag_rk: Vec<Vec<f64>> = rk.iter().map(|x| diag_back(x, u)).collect();

    // S_li = sum_ab kappa_ab F_l(ab) conj(F_i(ab)), F_l(ab) = U_la conj(U_lb)
    let mut f = vec![Complex64::new(0.0, 0.0); m * m * m];
    for l in 0..m {
        for a in 0..m {
            let ula = u[(l, a)];
            for b in 0..m {
                f[(l * m + a) * m + b] = ula * u[(l, b)].conj();
            }
        }
    }
    let mut s_mat = vec![0.0; m * m];
    let mut gl = vec![Complex64::new(0.0, 0.0); m * m];
    for l in 0..m {
        let fl = &f[l * m * m..(l + 1) * m * m];
        for ((g, fv), k) in gl.iter_mut().zip(fl).zip(&kappa) {
            *g = fv * *k;
        }
        for i in l..m {
            let fi = &f[i * m * m..(i + 1) * m * m];
            let v: f64 = gl
                .iter()
                .zip(fi)
                .map(|(a, b)| a.re * b.re + a.im * b.im)
                .sum();
            s_mat[l * m + i] = v;
            s_mat[i * m + l] = v;
        }
    }

    let n = k_count + 1 + m;
    let mut a = vec![0.0; n * n];
    let mut rhs = vec![0.0; n];
    let row_t = k_count;
    for i in 0..k_count {
        for k in 0..k_count {
            a[i * n + k] = us[i].inner(&rk[k]) + if i == k { 1.0 } else { 0.0 };
        }
        a[i * n + row_t] = -eta[i];
        for l in 0..m {
            a[i * n + row_t + 1 + l] = diag_rk[i][l];
        }
        rhs[i] = us[i].inner(&r0);
        a[row_t * n + i] = eta[i];
    }
    rhs[row_t] = -grad_t;
    for l in 0..m {
        let row = row_t + 1 + l;
        for k in 0..k_count {
            a[row * n + k] = diag_rk[k][l];
        }
        for i in 0..m {
            a[row * n + row_t + 1 + i] = s_mat[l * m + i];
        }
        rhs[row] = diag_r0[l];
    }
    solve_dense(&mut a, n, &mut rhs)?;
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalTrouble(
            "non-finite Newton system solution".into(),
        ));
    }

    let mut dt_basis = r0;
    for k in 0..k_count {
        dt_basis.add_scaled(-rhs[k], &rk[k]);
    }
    let mult = CMatrix::from_diag(&rhs[row_t + 1..]).congruence_adj(u);
    dt_basis.add_scaled(-1.0, &apply_kinv(&mult, &kappa));
    let mut d = dt_basis.congruence(u).hermitian_part();
    for i in 0..m {
        d[(i, i)] = Complex64::new(0.0, 0.0);
    }
    let dt = rhs[row_t];
    // everything below uses the projected D so that the model matches phi
    let d_basis = d.congruence_adj(u);
    let decrement = -(grad.inner(&d_basis) + grad_t * dt);
    let inv_sqrt: Vec<f64> = lam.iter().map(|l| 1.0 / l.sqrt()).collect();
    let scaled = CMatrix::from_fn(m, |a, b| d_basis[(a, b)] * (inv_sqrt[a] * inv_sqrt[b]));
    let mu = hermitian_eigen(&scaled.hermitian_part())?.values;

    let da = p
        .cons
        .iter()
        .map(|con| con.terms.iter().map(|term| d.inner(&term.a)).collect())
        .collect();
    let dlin = p.cons.iter().map(|con| d.inner(&con.linear)).collect();
    let (dball, dnorm2) = if ev.r.is_finite() {
        (w.sub(p.center).inner(&d), d.inner(&d))
    } else {
        (0.0, 0.0)
    };
    Ok(Direction {
        d,
        dt,
        decrement,
        mu,
        da,
        dlin,
        dball,
        dnorm2,
    })
}

impl Direction {
    /// `phi(W + alpha D, t + alpha dt) - phi(W, t)` computed from ratios, so
    /// it stays accurate when `tau t` is large; `None` outside the domain.
    fn delta_phi(&self, p: &Prepared<'_>, ev: &Eval, t: f64, tau: f64, alpha: f64) -> Option<f64> {
        let mut out = -tau * alpha * self.dt;
        for &mu in &self.mu {
            let x = alpha * mu;
            if !(x > -1.0) {
                return None;
            }
            out -= x.ln_1p();
        }
        for (j, con) in p.cons.iter().enumerate() {
            let mut dg = -alpha * self.dlin[j];
            for (k, term) in con.terms.iter().enumerate() {
                let x = alpha * self.da[j][k] / ev.args[j][k];
                if !(x > -1.0) {
                    return None;
                }
                dg += term.weight * x.ln_1p();
            }
            let x = (dg - alpha * self.dt) / (ev.g[j] - t);
            if !(x > -1.0) {
                return None;
            }
            out -= x.ln_1p();
        }
        if ev.r.is_finite() {
            let x = -(2.0 * alpha * self.dball + alpha * alpha * self.dnorm2) / ev.r;
            if !(x > -1.0) {
                return None;
            }
            out -= x.ln_1p();
        }
        out.is_finite().then_some(out)
    }
}

fn pin_diagonal(w: &mut CMatrix) {
    for i in 0..w.dim() {
        w[(i, i)] = Complex64::new(1.0, 0.0);
    }
}

fn min_or_inf(g: &[f64]) -> f64 {
    g.iter().copied().fold(f64::INFINITY, f64::min)
}

fn finish(
    p: &Prepared<'_>,
    w: CMatrix,
    t: f64,
    status: SolveStatus,
    iterations: usize,
    gap: f64,
    trace: Vec<TraceRow>,
    settings: &SolverSettings,
) -> Result<SdpSolution> {
    let (_, g) = p.constraint_values(&w).ok_or_else(|| {
        Error::NumericalTrouble("final iterate left the constraint domain".into())
    })?;
    let mut viol: f64 = 0.0;
    for d in w.diag_re() {
        viol = viol.max((d - 1.0).abs());
    }
    let eig = hermitian_eigen(&w)?;
    viol = viol.max(-eig.min_value());
    if let Some(xi) = p.radius {
        viol = viol.max(w.sub(p.center).frobenius_norm() - xi);
    }
    for &gj in &g {
        viol = viol.max(t - gj);
    }
    let status = if status == SolveStatus::Optimal && viol > settings.feasibility_tol {
        SolveStatus::NumericalTrouble
    } else {
        status
    };
    Ok(SdpSolution {
        w: PsdMatrix::trusted(w),
        t,
        report: SolveReport {
            status,
            objective: t,
            iterations,
            max_violation: viol,
            gap,
        },
        trace,
    })
}

/// Solves the SDP to the tolerances in `settings`.
///
/// Returns `Err(Infeasible)` when `Ŵ` is not a unit-diagonal PSD matrix or no
/// strictly feasible start exists, and `Err(NumericalTrouble)` on NaN input or
/// a failed line search. Hitting the Newton cap gives `Ok` with status
/// [`SolveStatus::MaxIter`].
pub fn solve_sdp(prob: &SdpProblem, settings: &SolverSettings) -> Result<SdpSolution> {
    let p = prepare(prob)?;
    let m = p.m;

    if p.radius == Some(0.0) {
        let (_, g) = p.constraint_values(p.center).ok_or(Error::Infeasible)?;
        let t = min_or_inf(&g);
        return finish(
            &p,
            p.center.clone(),
            t,
            SolveStatus::Optimal,
            0,
            0.0,
            Vec::new(),
            settings,
        );
    }

    // strictly feasible start between Ŵ and I
    let ident = CMatrix::identity(m);
    let spread = ident.sub(p.center).frobenius_norm();
    let theta = match p.radius {
        Some(xi) if spread > 0.0 => (0.5 * xi / spread).min(0.5),
        _ => 0.5,
    };
    let mut w = p.center.scaled(1.0 - theta);
    w.add_scaled(theta, &ident);
    pin_diagonal(&mut w);
    if log_det_pd(&w).is_none() {
        return Err(Error::Infeasible);
    }
    let (_, g0) = p.constraint_values(&w).ok_or(Error::Infeasible)?;
    let mut t = min_or_inf(&g0) - 1.0;
    if !t.is_finite() {
        return Err(Error::NumericalTrouble(
            "non-finite constraint value at start".into(),
        ));
    }

    let nu = p.barrier_order();
    let mut tau = 1.0;
    let mut iterations = 0;
    let mut trace = Vec::new();
    loop {
        let mut ev = p.eval(&w, t, tau).ok_or(Error::Infeasible)?;
        let mut decrement = f64::INFINITY;
        loop {
            if iterations >= settings.max_newton {
                let gap = nu / tau;
                trace.push(TraceRow {
                    iteration: iterations,
                    tau,
                    objective: t,
                    decrement,
                    gap,
                });
                return finish(
                    &p,
                    w,
                    t,
                    SolveStatus::MaxIter,
                    iterations,
                    gap,
                    trace,
                    settings,
                );
            }
            let dir = newton_direction(&p, &w, t, &ev, tau)?;
            iterations += 1;
            decrement = 0.5 * dir.decrement.max(0.0);
            if decrement <= CENTERING_TOL {
                break;
            }
            let mut alpha = 1.0;
            let mut accepted = None;
            // long steps: the full Newton step is often short of the center
            if let Some(mut best) = dir.delta_phi(&p, &ev, t, tau, 1.0) {
                if best <= -ARMIJO * dir.decrement {
                    while alpha < MAX_EXPAND {
                        match dir.delta_phi(&p, &ev, t, tau, 2.0 * alpha) {
                            Some(v) if v < best => {
                                best = v;
                                alpha *= 2.0;
                            }
                            _ => break,
                        }
                    }
                }
            }
            for _ in 0..MAX_BACKTRACK {
                let ok = dir
                    .delta_phi(&p, &ev, t, tau, alpha)
                    .is_some_and(|d| d <= -ARMIJO * alpha.min(1.0) * dir.decrement);
                if ok {
                    let mut w_new = w.clone();
                    w_new.add_scaled(alpha, &dir.d);
                    pin_diagonal(&mut w_new);
                    let t_new = t + alpha * dir.dt;
                    if let Some(e) = p.eval(&w_new, t_new, tau) {
                        accepted = Some((w_new, t_new, e));
                        break;
                    }
                }
                alpha *= BACKTRACK;
            }
            match accepted {
                Some((w_new, t_new, e)) => {
                    log::trace!("newton alpha={alpha:e} dec={decrement:e}");
                    w = w_new;
                    t = t_new;
                    ev = e;
                }
                // rounding floor: the direction no longer decreases phi
                None if decrement < 1e-6 => break,
                None => {
                    return Err(Error::NumericalTrouble(format!(
                        "SDP line search failed (decrement {decrement:e}, tau {tau:e})"
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
        log::trace!("sdp stage tau={tau:e} t={t} gap={gap:e} newton={iterations}");
        if gap <= settings.gap_tol * (1.0 + t.abs()) {
            return finish(
                &p,
                w,
                t,
                SolveStatus::Optimal,
                iterations,
                gap,
                trace,
                settings,
            );
        }
        tau *= TAU_GROWTH;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn linear_only(a: CMatrix) -> SmoothConstraint {
        SmoothConstraint {
            logs: Vec::new(),
            linear: a.scaled(-1.0),
            constant: 0.0,
        }
    }

    fn random_vec(m: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..m)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect()
    }

    fn unit_phase_vec(angles: &[f64]) -> Vec<Complex64> {
        angles
            .iter()
            .map(|&a| Complex64::from_polar(1.0, a))
            .collect()
    }

    #[test]
    fn rank_one_alignment() {
        // A = vv† with constant-modulus v: optimum W = vv†, t = lambda_max * m
        let m = 5;
        let v = unit_phase_vec(&[0.0, 0.4, -1.2, 2.5, 3.0]);
        let a = CMatrix::outer(&v);
        let prob = SdpProblem {
            center: CMatrix::identity(m),
            radius: None,
            constraints: vec![linear_only(a)],
        };
        let sol = solve_sdp(&prob, &SolverSettings::default()).unwrap();
        assert_eq!(sol.report.status, SolveStatus::Optimal);
        let expected = (m * m) as f64;
        assert!(
            (sol.t - expected).abs() <= 1e-6 * (1.0 + expected),
            "t = {}",
            sol.t
        );
        let diff = sol.w.matrix().sub(&CMatrix::outer(&v)).frobenius_norm();
        assert!(diff < 1e-3, "diff {diff}");
    }

    /// Log-type constraints shaped like the phase subproblem, for a rank-one
    /// oracle over a phase grid.
    fn log_instance(m: usize, pairs: usize, rng: &mut ChaCha8Rng) -> Vec<SmoothConstraint> {
        (0..pairs)
            .map(|_| {
                let logs = (0..3)
                    .map(|_| {
                        let h = random_vec(m, rng);
                        let mut a = CMatrix::outer(&h);
                        let h2 = random_vec(m, rng);
                        a.add_outer(0.5, &h2);
                        LogTerm {
                            weight: 1.0 / core::f64::consts::LN_2,
                            a,
                            b: 0.05 + rng.random::<f64>() * 0.1,
                        }
                    })
                    .collect();
                let c = random_vec(m, rng);
                SmoothConstraint {
                    logs,
                    linear: CMatrix::outer(&c).scaled(0.3),
                    constant: rng.random::<f64>(),
                }
            })
            .collect()
    }

    fn rank_one_value(cons: &[SmoothConstraint], omega: &[Complex64]) -> f64 {
        let w = CMatrix::outer(omega);
        cons.iter()
            .map(|c| c.value(&w).unwrap())
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn single_phase_relaxation_is_tight_or_above() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            let cons = log_instance(2, 2, &mut rng);
            let prob = SdpProblem {
                center: CMatrix::identity(2),
                radius: None,
                constraints: cons.clone(),
            };
            let sol = solve_sdp(&prob, &SolverSettings::default()).unwrap();
            let best = (0..10_000)
                .map(|k| {
                    let phi = k as f64 * core::f64::consts::TAU / 10_000.0;
                    rank_one_value(&cons, &unit_phase_vec(&[phi, 0.0]))
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(sol.t >= best - 1e-3, "sdp {} grid {}", sol.t, best);
        }
    }

    #[test]
    fn zero_radius_returns_center() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cons = log_instance(3, 2, &mut rng);
        let center = CMatrix::outer(&unit_phase_vec(&[0.3, 1.0, 0.0]));
        let prob = SdpProblem {
            center: center.clone(),
            radius: Some(0.0),
            constraints: cons.clone(),
        };
        let sol = solve_sdp(&prob, &SolverSettings::default()).unwrap();
        assert_eq!(sol.w.matrix(), &center);
        let expected = cons
            .iter()
            .map(|c| c.value(&center).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(sol.t, expected);
    }

    #[test]
    fn trust_region_dominates_rank_one_points() {
        // every rank-one feasible point in the ball scores at most t
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..3 {
            let cons = log_instance(3, 2, &mut rng);
            let center_phases = [rng.random::<f64>() * 6.0, rng.random::<f64>() * 6.0, 0.0];
            let center = CMatrix::outer(&unit_phase_vec(&center_phases));
            let xi = 0.6;
            let prob = SdpProblem {
                center: center.clone(),
                radius: Some(xi),
                constraints: cons.clone(),
            };
            let sol = solve_sdp(&prob, &SolverSettings::default()).unwrap();
            assert_eq!(sol.report.status, SolveStatus::Optimal);
            assert!(sol.report.max_violation <= 1e-7);
            let n = 120;
            let mut best = f64::NEG_INFINITY;
            for i in 0..n {
                for k in 0..n {
                    let phases = [
                        i as f64 * core::f64::consts::TAU / n as f64,
                        k as f64 * core::f64::consts::TAU / n as f64,
                        0.0,
                    ];
                    let omega = unit_phase_vec(&phases);
                    if CMatrix::outer(&omega).sub(&center).frobenius_norm() <= xi {
                        best = best.max(rank_one_value(&cons, &omega));
                    }
                }
            }
            assert!(sol.t >= best - 1e-6, "sdp {} grid {}", sol.t, best);
        }
    }

    #[test]
    fn solution_is_feasible_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = 9;
        let cons = log_instance(m, 2, &mut rng);
        let phases: Vec<f64> = (0..m)
            .map(|i| {
                if i + 1 == m {
                    0.0
                } else {
                    rng.random::<f64>() * 6.0
                }
            })
            .collect();
        let prob = SdpProblem {
            center: CMatrix::outer(&unit_phase_vec(&phases)),
            radius: Some(0.05 * m as f64),
            constraints: cons,
        };
        let s1 = solve_sdp(&prob, &SolverSettings::default()).unwrap();
        let s2 = solve_sdp(&prob, &SolverSettings::default()).unwrap();
        assert_eq!(s1.w.matrix(), s2.w.matrix());
        assert_eq!(s1.t.to_bits(), s2.t.to_bits());
        let w = s1.w.matrix();
        for d in w.diag_re() {
            assert!((d - 1.0).abs() <= 1e-7);
        }
        assert!(hermitian_eigen(w).unwrap().min_value() >= -1e-7);
        assert!(w.sub(&prob.center).frobenius_norm() <= 0.05 * m as f64 + 1e-7);
        for c in &prob.constraints {
            assert!(c.value(w).unwrap() >= s1.t - 1e-7);
        }
    }

    #[test]
    fn rejects_nan_and_bad_center() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut cons = log_instance(2, 1, &mut rng);
        cons[0].constant = f64::NAN;
        let prob = SdpProblem {
            center: CMatrix::identity(2),
            radius: None,
            constraints: cons,
        };
        assert!(matches!(
            solve_sdp(&prob, &SolverSettings::default()),
            Err(Error::NumericalTrouble(_))
        ));
        let prob = SdpProblem {
            center: CMatrix::from_diag(&[2.0, 1.0]),
            radius: None,
            constraints: log_instance(2, 1, &mut rng),
        };
        assert!(matches!(
            solve_sdp(&prob, &SolverSettings::default()),
            Err(Error::Infeasible)
        ));
    }
}
