//! Fractional-programming loop over transmit powers at fixed phases.
//!
//! Each rate term `log2(1 + A/B)` is replaced by its quadratic transform
//! `log2(1 + 2x sqrt(A) - x² B)`, which is concave in the powers for fixed
//! `x` and tight at `x = sqrt(A)/B`. The leakage term `-log2(1 + N/D)` is
//! written as `log2(D/(N + D))` and transformed the same way,
//! `log2(2x sqrt(D) - x² (N + D))`, tight at `x = sqrt(D)/(N + D)`.
//!
//! The printed leakage form (argument `1 - x² (D_int + 2x sqrt(N) + sigma²)`
//! with `x = sqrt(N)/D`) is available through [`SurrogateForm::Printed`] for
//! evaluation only.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

#[allow(unused_imports)]
use num_traits::Float;

use crate::channel::EffectiveChannels;
use crate::error::{Error, Result};
use crate::kernel::{solve_concave_box, ConcaveBoxProblem, ConcaveFn, SolveStatus};
use crate::metrics::fractional_increase;
use crate::params::SystemParams;
use crate::rates::{GainTable, PhaseVector, PowerVector};

/// Smallest log argument accepted before reporting a domain violation.
const LOG_FLOOR: f64 = 1e-300;

/// Auxiliary variables of the quadratic transform, one triple per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxVars {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub x3: Vec<f64>,
}

impl AuxVars {
    pub fn zeros(pairs: usize) -> Self {
        Self {
            x1: vec![0.0; pairs],
            x2: vec![0.0; pairs],
            x3: vec![0.0; pairs],
        }
    }

    pub fn pairs(&self) -> usize {
        self.x1.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurrogateForm {
    Remediated,
    /// Leakage term as printed; not concave, not tight.
    Printed,
}

/// Leakage-term parts `(N, D)` of pair `j`: own-pair power at E and other
/// pairs' power at E plus `sigma²`.
fn leakage_parts(g: &GainTable, p: &[f64], pair: usize, params: &SystemParams) -> (f64, f64) {
    g.eve_terms(p, pair, params)
}

/// Tight auxiliary values at `p` (pair-wise closed forms).
pub fn update_aux_gains(g: &GainTable, p: &[f64], params: &SystemParams) -> AuxVars {
    let pairs = g.pairs();
    let mut aux = AuxVars::zeros(pairs);
    for j in 0..pairs {
        let (sa, da) = g.legit_terms(p, 2 * j, params);
        let (sb, db) = g.legit_terms(p, 2 * j + 1, params);
        let (ne, de) = leakage_parts(g, p, j, params);
        aux.x1[j] = sa.sqrt() / da;
        aux.x2[j] = sb.sqrt() / db;
        aux.x3[j] = de.sqrt() / (ne + de);
    }
    aux
}

/// Auxiliary values for the rates at phases `omega` and powers `p`.
pub fn update_aux(
    eff: &EffectiveChannels,
    p: &PowerVector,
    omega: &PhaseVector,
    params: &SystemParams,
) -> AuxVars {
    update_aux_gains(&GainTable::from_phases(eff, omega), p.as_slice(), params)
}

/// The three log arguments of `f_j`.
fn surrogate_args(
    g: &GainTable,
    p: &[f64],
    aux: &AuxVars,
    pair: usize,
    params: &SystemParams,
) -> [f64; 3] {
    let (sa, da) = g.legit_terms(p, 2 * pair, params);
    let (sb, db) = g.legit_terms(p, 2 * pair + 1, params);
    let (ne, de) = leakage_parts(g, p, pair, params);
    let (x1, x2, x3) = (aux.x1[pair], aux.x2[pair], aux.x3[pair]);
    [
        1.0 + 2.0 * x1 * sa.sqrt() - x1 * x1 * da,
        1.0 + 2.0 * x2 * sb.sqrt() - x2 * x2 * db,
        2.0 * x3 * de.sqrt() - x3 * x3 * (ne + de),
    ]
}

/// `f_j(P, aux)` in bits, `pair` 0-based.
pub fn surrogate_gains(
    g: &GainTable,
    p: &[f64],
    aux: &AuxVars,
    pair: usize,
    params: &SystemParams,
    form: SurrogateForm,
) -> Result<f64> {
    let mut args = surrogate_args(g, p, aux, pair, params);
    if form == SurrogateForm::Printed {
        let (ne, de) = leakage_parts(g, p, pair, params);
        let x3 = aux.x3[pair];
        let interference = de - params.sigma2;
        args[2] = 1.0 - x3 * x3 * (interference + 2.0 * x3 * ne.sqrt() + params.sigma2);
    }
    let mut total = 0.0;
    for (k, a) in args.iter().enumerate() {
        if !(*a >= LOG_FLOOR) {
            return Err(Error::Domain(format!(
                "log argument {a:e} of term {} in f_{}; refresh the auxiliary variables",
                k + 1,
                pair + 1
            )));
        }
        total += a.ln();
    }
    Ok(total / LN_2)
}

/// Printed-form auxiliary value `x3 = sqrt(N)/D`, for documentation runs.
pub fn printed_x3(g: &GainTable, p: &[f64], pair: usize, params: &SystemParams) -> f64 {
    let (ne, de) = leakage_parts(g, p, pair, params);
    ne.sqrt() / de
}

/// `f_j(P, omega, aux)` in bits, `pair` 1-based.
pub fn surrogate_f(
    eff: &EffectiveChannels,
    p: &PowerVector,
    omega: &PhaseVector,
    aux: &AuxVars,
    pair: usize,
    params: &SystemParams,
) -> Result<f64> {
    if pair == 0 || pair > eff.pairs() || aux.pairs() != eff.pairs() {
        return Err(Error::InvalidParams(format!(
            "pair {pair} or auxiliary size mismatch"
        )));
    }
    let g = GainTable::from_phases(eff, omega);
    surrogate_gains(
        &g,
        p.as_slice(),
        aux,
        pair - 1,
        params,
        SurrogateForm::Remediated,
    )
}

/// The surrogate family handed to the box solver.
struct Surrogates<'a> {
    g: &'a GainTable,
    aux: &'a AuxVars,
    params: &'a SystemParams,
}

impl ConcaveFn for Surrogates<'_> {
    fn dim(&self) -> usize {
        self.g.users()
    }

    fn count(&self) -> usize {
        self.g.pairs()
    }

    fn value(&self, j: usize, p: &[f64]) -> Option<f64> {
        surrogate_gains(
            self.g,
            p,
            self.aux,
            j,
            self.params,
            SurrogateForm::Remediated,
        )
        .ok()
    }

    fn derivatives(&self, j: usize, p: &[f64], grad: &mut [f64], hess: &mut [f64]) {
        let n = p.len();
        let g = self.g;
        let args = surrogate_args(g, p, self.aux, j, self.params);
        let mut du = vec![0.0; n];
        let mut d2u = vec![0.0; n * n];
        let mut add_log = |u: f64, du: &[f64], d2u: &[f64]| {
            for a in 0..n {
                grad[a] += du[a] / (u * LN_2);
                for b in 0..n {
                    hess[a * n + b] += (d2u[a * n + b] / u - du[a] * du[b] / (u * u)) / LN_2;
                }
            }
        };
        // rate terms: receiver rx decodes partner
        for (rx, x) in [(2 * j, self.aux.x1[j]), (2 * j + 1, self.aux.x2[j])] {
            let partner = rx ^ 1;
            du.iter_mut().for_each(|v| *v = 0.0);
            d2u.iter_mut().for_each(|v| *v = 0.0);
            let gs = g.gain(partner, rx);
            let pp = p[partner];
            if pp > 0.0 && gs > 0.0 {
                du[partner] = x * gs.sqrt() / pp.sqrt();
                d2u[partner * n + partner] = -0.5 * x * gs.sqrt() / (pp * pp.sqrt());
            }
            for y in 0..n {
                if y / 2 != j {
                    du[y] = -x * x * g.gain(y, rx);
                }
            }
            add_log(args[if rx == 2 * j { 0 } else { 1 }], &du, &d2u);
        }
        // leakage term
        let x3 = self.aux.x3[j];
        let e = g.eve();
        let (_, de) = leakage_parts(g, p, j, self.params);
        du.iter_mut().for_each(|v| *v = 0.0);
        d2u.iter_mut().for_each(|v| *v = 0.0);
        for y in 0..n {
            let gy = g.gain(y, e);
            if y / 2 == j {
                du[y] = -x3 * x3 * gy;
            } else {
                du[y] = x3 * gy / de.sqrt() - x3 * x3 * gy;
                for z in 0..n {
                    if z / 2 != j {
                        d2u[y * n + z] = -0.5 * x3 * gy * g.gain(z, e) / (de * de.sqrt());
                    }
                }
            }
        }
        add_log(args[2], &du, &d2u);
    }
}

#[derive(Debug, Clone)]
pub struct FpState {
    pub p_hat: PowerVector,
    pub aux: AuxVars,
    /// `min_j C_j` (clamped) at the initial point and after every step.
    pub trace: Vec<f64>,
    /// Same points, unclamped.
    pub unclamped: Vec<f64>,
    /// Powers after every step.
    pub powers: Vec<Vec<f64>>,
    /// Clamped `C_j` of every pair at the same points.
    pub pair_secrecy: Vec<Vec<f64>>,
    pub statuses: Vec<SolveStatus>,
}

impl FpState {
    pub fn new(g: &GainTable, p0: PowerVector, params: &SystemParams) -> Self {
        let aux = update_aux_gains(g, p0.as_slice(), params);
        let c = g.min_secrecy(p0.as_slice(), params);
        let u = g.min_unclamped(p0.as_slice(), params);
        Self {
            unclamped: vec![u],
            powers: vec![p0.as_slice().to_vec()],
            pair_secrecy: vec![pair_secrecy(g, p0.as_slice(), params)],
            p_hat: p0,
            aux,
            trace: vec![c],
            statuses: Vec::new(),
        }
    }

    pub fn current(&self) -> f64 {
        self.trace.last().copied().unwrap_or(0.0)
    }

    /// Fractional increase of the last step. While every pair is still
    /// clamped at zero the unclamped minimum decides instead.
    pub fn last_increase(&self) -> f64 {
        let n = self.trace.len();
        if n < 2 {
            return f64::INFINITY;
        }
        if self.trace[n - 2] == 0.0 && self.trace[n - 1] == 0.0 {
            fractional_increase(self.unclamped[n - 2], self.unclamped[n - 1])
        } else {
            fractional_increase(self.trace[n - 2], self.trace[n - 1])
        }
    }
}

fn pair_secrecy(g: &GainTable, p: &[f64], params: &SystemParams) -> Vec<f64> {
    (0..g.pairs())
        .map(|j| g.unclamped(p, j, params).max(0.0))
        .collect()
}

/// One FP step on a fixed gain table.
pub fn fp_step_gains(g: &GainTable, mut state: FpState, params: &SystemParams) -> Result<FpState> {
    state.aux = update_aux_gains(g, state.p_hat.as_slice(), params);
    let fam = Surrogates {
        g,
        aux: &state.aux,
        params,
    };
    let prob = ConcaveBoxProblem {
        f: &fam,
        lower: params.p_min,
        upper: params.p_max,
        start: state.p_hat.as_slice().to_vec(),
    };
    let sol = solve_concave_box(&prob, &params.solver)?;
    let p = PowerVector::new(sol.p)?;
    state.trace.push(g.min_secrecy(p.as_slice(), params));
    state.unclamped.push(g.min_unclamped(p.as_slice(), params));
    state.powers.push(p.as_slice().to_vec());
    state
        .pair_secrecy
        .push(pair_secrecy(g, p.as_slice(), params));
    state.statuses.push(sol.report.status);
    state.p_hat = p;
    Ok(state)
}

/// Iterates FP steps until the fractional increase of `min_j C_j` is below
/// `eps1` or `fp_max_iter` steps were taken.
pub fn fp_loop_gains(g: &GainTable, p0: PowerVector, params: &SystemParams) -> Result<FpState> {
    if p0.len() != g.users() {
        return Err(Error::Dimension(format!(
            "{} powers for {} users",
            p0.len(),
            g.users()
        )));
    }
    if !p0.within(params.p_min, params.p_max, 1e-12) {
        return Err(Error::InvalidParams(
            "initial powers outside the box".into(),
        ));
    }
    let mut state = FpState::new(g, p0, params);
    for k in 0..params.fp_max_iter.max(1) {
        state = fp_step_gains(g, state, params).map_err(|e| Error::Iteration {
            outer: 0,
            stage: "fp",
            inner: k + 1,
            source: alloc::boxed::Box::new(e),
        })?;
        if state.last_increase() < params.eps1 {
            break;
        }
    }
    Ok(state)
}

pub fn fp_step(
    eff: &EffectiveChannels,
    omega: &PhaseVector,
    state: FpState,
    params: &SystemParams,
) -> Result<FpState> {
    fp_step_gains(&GainTable::from_phases(eff, omega), state, params)
}

/// FP loop at phases `omega`; `p0 = None` starts from `P_max` everywhere.
pub fn fp_loop(
    eff: &EffectiveChannels,
    omega: &PhaseVector,
    p0: Option<PowerVector>,
    params: &SystemParams,
) -> Result<FpState> {
    let p0 = p0.unwrap_or_else(|| PowerVector::uniform(eff.users(), params.p_max));
    fp_loop_gains(&GainTable::from_phases(eff, omega), p0, params)
}
