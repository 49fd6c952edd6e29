//! Per-realization result records (JSON) and trace tables (CSV).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use irsec_core::ao::AoResult;
use irsec_core::kernel::{SolveStatus, TraceRow};
use irsec_core::rates::RateBreakdown;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub rate_a: f64,
    pub rate_b: f64,
    pub leakage: f64,
    pub unclamped: f64,
    pub secrecy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatesRecord {
    pub pairs: Vec<PairRecord>,
    pub min_secrecy: f64,
    pub min_unclamped: f64,
}

impl From<&RateBreakdown> for RatesRecord {
    fn from(r: &RateBreakdown) -> Self {
        Self {
            pairs: r
                .pairs
                .iter()
                .map(|p| PairRecord {
                    rate_a: p.rate_a,
                    rate_b: p.rate_b,
                    leakage: p.leakage,
                    unclamped: p.unclamped,
                    secrecy: p.secrecy,
                })
                .collect(),
            min_secrecy: r.min_secrecy,
            min_unclamped: r.min_unclamped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterIterRecord {
    pub fp_trace: Vec<f64>,
    pub fp_powers: Vec<Vec<f64>>,
    pub fp_pairs: Vec<Vec<f64>>,
    pub sca_trace: Vec<f64>,
    pub sca_statuses: Vec<String>,
    pub objective: f64,
}

/// Everything known about one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub seed: u64,
    pub config: String,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub realization: usize,
    /// Phase angles of `omega_f` in radians.
    pub omega: Vec<f64>,
    pub powers: Vec<f64>,
    pub rates: RatesRecord,
    pub outer_trace: Vec<f64>,
    pub outer: Vec<OuterIterRecord>,
    pub relaxation_objective: f64,
    pub recovery_gap: f64,
    /// `min_j C_j` of every baseline that was run.
    pub baselines: BTreeMap<String, f64>,
}

impl ResultRecord {
    pub fn from_ao(seed: u64, config: &str, realization: usize, ao: &AoResult) -> Self {
        Self {
            seed,
            config: config.into(),
            l: ao.omega.elements(),
            n: ao.rates.pairs.len(),
            realization,
            omega: ao.omega.angles(),
            powers: ao.powers.as_slice().to_vec(),
            rates: (&ao.rates).into(),
            outer_trace: ao.outer_trace.clone(),
            outer: ao
                .outer
                .iter()
                .map(|o| OuterIterRecord {
                    fp_trace: o.fp_trace.clone(),
                    fp_powers: o.fp_powers.clone(),
                    fp_pairs: o.fp_pairs.clone(),
                    sca_trace: o.sca_trace.clone(),
                    sca_statuses: o.sca_statuses.iter().map(|s| s.as_str().into()).collect(),
                    objective: o.objective,
                })
                .collect(),
            relaxation_objective: ao.relaxation_objective,
            recovery_gap: ao.recovery_gap,
            baselines: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records hold only finite-or-null numbers")
    }
}

/// `outer_iter,sub_iter,min_G,solver_status`. Sub-iteration 0 is the
/// expansion point the iteration starts from.
pub fn phase_trace_csv(rec: &ResultRecord) -> String {
    let mut out = String::from("outer_iter,sub_iter,min_G,solver_status\n");
    for (k, o) in rec.outer.iter().enumerate() {
        for (i, g) in o.sca_trace.iter().enumerate() {
            let status = if i == 0 {
                "start"
            } else {
                o.sca_statuses[i - 1].as_str()
            };
            let _ = writeln!(out, "{},{i},{g},{status}", k + 1);
        }
    }
    out
}

fn power_header(users: usize) -> String {
    (0..users)
        .map(|u| format!("P_{}{}", if u % 2 == 0 { 'A' } else { 'B' }, u / 2 + 1))
        .collect::<Vec<_>>()
        .join(",")
}

/// `outer_iter,sub_iter,min_C,C_1..C_N,P_A1..P_BN`.
pub fn fp_trace_csv(rec: &ResultRecord) -> String {
    let users = 2 * rec.n;
    let cs: Vec<String> = (1..=rec.n).map(|j| format!("C_{j}")).collect();
    let mut out = format!(
        "outer_iter,sub_iter,min_C,{},{}\n",
        cs.join(","),
        power_header(users)
    );
    for (k, o) in rec.outer.iter().enumerate() {
        push_fp_rows(
            &mut out,
            &(k + 1).to_string(),
            &o.fp_trace,
            &o.fp_pairs,
            &o.fp_powers,
            1.0,
        );
    }
    out
}

/// Power-loop trace at fixed phases, powers as fractions of `p_max`:
/// `sub_iter,min_C,C_1..C_N,P_A1/Pmax..`.
pub fn fp_fraction_csv(
    trace: &[f64],
    pairs: &[Vec<f64>],
    powers: &[Vec<f64>],
    p_max: f64,
) -> String {
    let n = pairs.first().map_or(0, Vec::len);
    let cs: Vec<String> = (1..=n).map(|j| format!("C_{j}")).collect();
    let mut out = format!("sub_iter,min_C,{},{}\n", cs.join(","), power_header(2 * n));
    push_fp_rows(&mut out, "", trace, pairs, powers, 1.0 / p_max);
    out
}

fn push_fp_rows(
    out: &mut String,
    prefix: &str,
    trace: &[f64],
    pairs: &[Vec<f64>],
    powers: &[Vec<f64>],
    scale: f64,
) {
    for (i, c) in trace.iter().enumerate() {
        if !prefix.is_empty() {
            let _ = write!(out, "{prefix},");
        }
        let _ = write!(out, "{i},{c}");
        for v in &pairs[i] {
            let _ = write!(out, ",{v}");
        }
        for p in &powers[i] {
            let _ = write!(out, ",{}", p * scale);
        }
        out.push('\n');
    }
}

/// `stage,iteration,tau,objective,decrement,gap,status` of one barrier
/// solve. Every stage but the last is `centered`; the last carries the final
/// solver status.
pub fn sdp_trace_csv(rows: &[TraceRow], status: SolveStatus) -> String {
    let mut out = String::from("stage,iteration,tau,objective,decrement,gap,status\n");
    for (k, r) in rows.iter().enumerate() {
        let st = if k + 1 == rows.len() {
            status.as_str()
        } else {
            "centered"
        };
        let _ = writeln!(
            out,
            "{k},{},{},{},{},{},{st}",
            r.iteration, r.tau, r.objective, r.decrement, r.gap
        );
    }
    out
}
