//! SCA loop over the relaxed phase matrix `W` at fixed powers.
//!
//! With `W = ωω†` relaxed to a unit-diagonal PSD matrix, each pair's
//! unclamped secrecy value is `G_j = Q_j - S_j` with both parts concave in
//! `W`. Each step replaces `S_j` by its tangent plane at the current point
//! `Ŵ` and solves the resulting SDP inside a Frobenius ball of radius `xi`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

#[allow(unused_imports)]
use num_traits::Float;

use crate::channel::EffectiveChannels;
use crate::error::{Error, Result};
use crate::kernel::{solve_sdp, LogTerm, SdpProblem, SmoothConstraint, SolveStatus};
use crate::linalg::CMatrix;
use crate::metrics::fractional_increase;
use crate::params::SystemParams;
use crate::rates::{weighted_gram, PowerVector, PsdMatrix};

/// Coefficient matrices of the six log terms of one pair.
#[derive(Debug, Clone)]
pub struct PairMatrices {
    /// All transmitters at `A_j` / `B_j` (numerators of the `Q_j` terms).
    pub total: [CMatrix; 2],
    /// Other pairs only at `A_j` / `B_j`.
    pub interference: [CMatrix; 2],
    /// Other pairs at the eavesdropper.
    pub eve_interference: CMatrix,
    /// Every user at the eavesdropper.
    pub eve_total: CMatrix,
}

impl PairMatrices {
    /// `pair` is 0-based.
    pub fn new(eff: &EffectiveChannels, p: &[f64], pair: usize) -> Self {
        let (a, b) = (2 * pair, 2 * pair + 1);
        let other = |x: usize| x / 2 != pair;
        Self {
            total: [
                weighted_gram(eff, p, a, |_| true),
                weighted_gram(eff, p, b, |_| true),
            ],
            interference: [
                weighted_gram(eff, p, a, other),
                weighted_gram(eff, p, b, other),
            ],
            eve_interference: weighted_gram(eff, p, eff.eve(), other),
            eve_total: weighted_gram(eff, p, eff.eve(), |_| true),
        }
    }

    /// `S_j(W)` in bits together with the three log arguments.
    fn s_parts(&self, w: &CMatrix, params: &SystemParams) -> (f64, [f64; 3]) {
        let nl = params.sigma2 + params.sigma_l2;
        let args = [
            self.interference[0].inner(w) + nl,
            self.interference[1].inner(w) + nl,
            self.eve_total.inner(w) + params.sigma2,
        ];
        ((args[0].ln() + args[1].ln() + args[2].ln()) / LN_2, args)
    }

    pub fn s(&self, w: &CMatrix, params: &SystemParams) -> f64 {
        self.s_parts(w, params).0
    }

    pub fn q(&self, w: &CMatrix, params: &SystemParams) -> f64 {
        let nl = params.sigma2 + params.sigma_l2;
        ((self.total[0].inner(w) + nl).ln()
            + (self.total[1].inner(w) + nl).ln()
            + (self.eve_interference.inner(w) + params.sigma2).ln())
            / LN_2
    }

    /// Gradient of `S_j` at `w`.
    pub fn grad_s(&self, w: &CMatrix, params: &SystemParams) -> Result<CMatrix> {
        let (_, args) = self.s_parts(w, params);
        if args.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::Domain(format!(
                "nonpositive log argument in S_j: {args:?}"
            )));
        }
        let mut g = self.interference[0].scaled(1.0 / (args[0] * LN_2));
        g.add_scaled(1.0 / (args[1] * LN_2), &self.interference[1]);
        g.add_scaled(1.0 / (args[2] * LN_2), &self.eve_total);
        Ok(g)
    }

    /// `Q_j(W) - S_j(Ŵ) - <grad S_j(Ŵ), W - Ŵ>` as an SDP constraint.
    fn surrogate(&self, w_hat: &CMatrix, params: &SystemParams) -> Result<SmoothConstraint> {
        let nl = params.sigma2 + params.sigma_l2;
        let grad = self.grad_s(w_hat, params)?;
        let constant = self.s(w_hat, params) - grad.inner(w_hat);
        let log = |a: &CMatrix, b: f64| LogTerm {
            weight: 1.0 / LN_2,
            a: a.clone(),
            b,
        };
        Ok(SmoothConstraint {
            logs: vec![
                log(&self.total[0], nl),
                log(&self.total[1], nl),
                log(&self.eve_interference, params.sigma2),
            ],
            linear: grad,
            constant,
        })
    }
}

fn pair_index(eff: &EffectiveChannels, pair: usize) -> Result<usize> {
    if pair == 0 || pair > eff.pairs() {
        return Err(Error::InvalidParams(format!(
            "pair {pair} out of 1..={}",
            eff.pairs()
        )));
    }
    Ok(pair - 1)
}

/// Gradient of `S_j(P, W)` with respect to `W`, `pair` 1-based.
pub fn grad_s(
    eff: &EffectiveChannels,
    p: &PowerVector,
    w: &CMatrix,
    pair: usize,
    params: &SystemParams,
) -> Result<CMatrix> {
    let j = pair_index(eff, pair)?;
    PairMatrices::new(eff, p.as_slice(), j).grad_s(w, params)
}

/// `S_j(P, Ŵ) + <grad S_j(P, Ŵ), W - Ŵ>`, an upper bound on `S_j(P, W)`.
pub fn taylor_upper_bound(
    eff: &EffectiveChannels,
    p: &PowerVector,
    w: &CMatrix,
    w_hat: &CMatrix,
    pair: usize,
    params: &SystemParams,
) -> Result<f64> {
    let j = pair_index(eff, pair)?;
    let pm = PairMatrices::new(eff, p.as_slice(), j);
    let grad = pm.grad_s(w_hat, params)?;
    Ok(pm.s(w_hat, params) + grad.inner(&w.sub(w_hat)))
}

/// `min_j G_j(P, W)` in bits.
pub fn min_relaxed(mats: &[PairMatrices], w: &CMatrix, params: &SystemParams) -> f64 {
    mats.iter()
        .map(|m| m.q(w, params) - m.s(w, params))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone)]
pub struct ScaState {
    pub w_hat: PsdMatrix,
    /// `min_j G_j` at `w_hat`.
    pub t: f64,
    pub iteration: usize,
    /// `min_j G_j` before the first step and after every step.
    pub trace: Vec<f64>,
    /// Solver status of every step.
    pub statuses: Vec<SolveStatus>,
}

impl ScaState {
    pub fn new(
        eff: &EffectiveChannels,
        p: &PowerVector,
        w0: PsdMatrix,
        params: &SystemParams,
    ) -> Self {
        let mats = all_pairs(eff, p);
        let t = min_relaxed(&mats, w0.matrix(), params);
        Self {
            w_hat: w0,
            t,
            iteration: 0,
            trace: vec![t],
            statuses: Vec::new(),
        }
    }
}

fn all_pairs(eff: &EffectiveChannels, p: &PowerVector) -> Vec<PairMatrices> {
    (0..eff.pairs())
        .map(|j| PairMatrices::new(eff, p.as_slice(), j))
        .collect()
}

fn subproblem_with(
    mats: &[PairMatrices],
    w_hat: &CMatrix,
    params: &SystemParams,
) -> Result<SdpProblem> {
    let constraints = mats
        .iter()
        .map(|m| m.surrogate(w_hat, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(SdpProblem {
        center: w_hat.clone(),
        radius: Some(params.xi()),
        constraints,
    })
}

/// The convex subproblem one SCA step solves around `w_hat`.
pub fn sca_subproblem(
    eff: &EffectiveChannels,
    p: &PowerVector,
    w_hat: &PsdMatrix,
    params: &SystemParams,
) -> Result<SdpProblem> {
    subproblem_with(&all_pairs(eff, p), w_hat.matrix(), params)
}

fn step_with(mats: &[PairMatrices], state: ScaState, params: &SystemParams) -> Result<ScaState> {
    let mut prob = subproblem_with(mats, state.w_hat.matrix(), params)?;
    let sol = match solve_sdp(&prob, &params.solver) {
        Err(Error::Infeasible) => {
            let xi = 2.0 * params.xi();
            log::warn!("SCA subproblem infeasible, retrying with xi = {xi}");
            prob.radius = Some(xi);
            solve_sdp(&prob, &params.solver)?
        }
        other => other?,
    };
    let t = min_relaxed(mats, sol.w.matrix(), params);
    let mut state = state;
    // The surrogate is a tight minorant, so only an inexact solve can lower
    // the objective. Such a step is rejected.
    if t >= state.t {
        state.w_hat = sol.w;
        state.t = t;
    } else {
        log::warn!(
            "SCA step ({:?}) lowered min G from {} to {t}; kept previous iterate",
            sol.report.status,
            state.t
        );
    }
    state.iteration += 1;
    state.trace.push(state.t);
    state.statuses.push(sol.report.status);
    Ok(state)
}

/// One SCA step: solve the surrogate SDP around `state.w_hat`.
pub fn sca_step(
    eff: &EffectiveChannels,
    p: &PowerVector,
    state: ScaState,
    params: &SystemParams,
) -> Result<ScaState> {
    step_with(&all_pairs(eff, p), state, params)
}

/// Runs SCA steps until the fractional increase of `min_j G_j` is at most
/// `eps2` or `sca_max_iter` steps were taken.
pub fn sca_loop(
    eff: &EffectiveChannels,
    p: &PowerVector,
    w0: PsdMatrix,
    params: &SystemParams,
) -> Result<ScaState> {
    let mats = all_pairs(eff, p);
    let mut state = ScaState::new(eff, p, w0, params);
    for k in 0..params.sca_max_iter.max(1) {
        let old = state.t;
        state = step_with(&mats, state, params).map_err(|e| Error::Iteration {
            outer: 0,
            stage: "sca",
            inner: k + 1,
            source: alloc::boxed::Box::new(e),
        })?;
        if fractional_increase(old, state.t) <= params.eps2 {
            break;
        }
    }
    Ok(state)
}
