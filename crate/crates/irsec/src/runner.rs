//! Monte Carlo runner.
//!
//! Every `(config, L, realization)` triple gets its own channel seed,
//! `derive_seed(base, [hash(label), L, realization])`, and AO plus all
//! requested baselines run on that one channel draw. A realization in which
//! any scheme fails is dropped from every mean (and counted), so all means
//! cover the same realizations.
//!
//! Realizations run on a small thread pool; results are stored by task index
//! and reduced sequentially, so outputs do not depend on scheduling.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context};
use irsec_core::ao::run_algorithm1;
use irsec_core::baselines::{
    corner_search_power, grid_search_power, no_irs_baseline, random_phase_baseline, random_phases,
    BaselineKind,
};
use irsec_core::channel::{build_effective, sample_channels, ChannelSet, EffectiveChannels};
use irsec_core::geometry::{place_nodes, ScenarioConfig};
use irsec_core::metrics::{fractional_increase, mean_stderr, pad_trace};
use irsec_core::params::{SystemParams, TrustRadius};
use irsec_core::power_opt::{fp_loop_gains, FpState};
use irsec_core::rates::{GainTable, PowerVector};
use irsec_core::seed::{derive_seed, hash_str};
use serde::Serialize;

use crate::record::{fp_trace_csv, phase_trace_csv, ResultRecord};
use crate::scenario::param_entries;

/// Scheme name of the alternating optimizer in reports.
pub const AO: &str = "ao";

#[derive(Debug, Clone)]
pub struct RunPlan {
    pub configs: Vec<ScenarioConfig>,
    pub l_values: Vec<usize>,
    pub realizations: usize,
    pub seed: u64,
    pub baselines: Vec<BaselineKind>,
    /// Write per-realization traces and records under `traces/`.
    pub traces: bool,
    /// Lattice size of [`BaselineKind::GridSearchPower`].
    pub grid_q: usize,
    pub out: Option<PathBuf>,
    /// Worker threads; 0 picks the available parallelism.
    pub threads: usize,
}

impl RunPlan {
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.configs.is_empty() {
            bail!("plan has no scenario");
        }
        if self.l_values.is_empty() || self.l_values.contains(&0) {
            bail!("L list must be nonempty and positive");
        }
        if self.realizations == 0 {
            bail!("realization count must be at least 1");
        }
        for c in &self.configs {
            let n = c.users.len();
            if self.baselines.contains(&BaselineKind::CornerSearchPower) && n != 1 {
                bail!(
                    "corner_search_power needs a single pair, {} has {n}",
                    c.label
                );
            }
            if self.baselines.contains(&BaselineKind::GridSearchPower) {
                let points = (self.grid_q as u128)
                    .checked_pow(2 * n as u32)
                    .unwrap_or(u128::MAX);
                if self.grid_q < 2 || points > irsec_core::baselines::GRID_LIMIT {
                    bail!(
                        "grid of Q = {} over {} users is out of range",
                        self.grid_q,
                        2 * n
                    );
                }
            }
            for &l in &self.l_values {
                let mut p = c.params.clone();
                p.irs_elements = l;
                p.pairs = n;
                p.validate()?;
            }
            place_nodes(c)?;
        }
        Ok(())
    }
}

/// Channel seed of one realization.
pub fn realization_seed(base: u64, label: &str, l: usize, realization: usize) -> u64 {
    derive_seed(base, &[hash_str(label), l as u64, realization as u64])
}

/// Parameters of `config` for `l` elements.
pub fn params_for(config: &ScenarioConfig, l: usize) -> SystemParams {
    let mut p = config.params.clone();
    p.irs_elements = l;
    p.pairs = config.users.len();
    p
}

pub fn channels_for(
    config: &ScenarioConfig,
    params: &SystemParams,
    seed: u64,
) -> irsec_core::Result<ChannelSet> {
    sample_channels(&place_nodes(config)?, params, seed)
}

/// The power loop at the random baseline phases, from `Pmax`.
pub fn fp_at_random_phases(
    eff: &EffectiveChannels,
    params: &SystemParams,
    seed: u64,
) -> irsec_core::Result<FpState> {
    let g = GainTable::from_phases(eff, &random_phases(eff.irs_elements(), seed));
    fp_loop_gains(&g, PowerVector::uniform(eff.users(), params.p_max), params)
}

/// Best lattice (N >= 2) or corner (N = 1) value at the random baseline
/// phases.
pub fn lattice_reference(
    eff: &EffectiveChannels,
    params: &SystemParams,
    seed: u64,
    q: usize,
) -> irsec_core::Result<f64> {
    let omega = random_phases(eff.irs_elements(), seed);
    if eff.pairs() == 1 {
        Ok(corner_search_power(eff, &omega, params)?.1)
    } else {
        Ok(grid_search_power(eff, &omega, params, q)?.1)
    }
}

pub fn run_baseline(
    kind: BaselineKind,
    chs: &ChannelSet,
    eff: &EffectiveChannels,
    params: &SystemParams,
    seed: u64,
    q: usize,
) -> irsec_core::Result<f64> {
    let omega = || random_phases(eff.irs_elements(), seed);
    Ok(match kind {
        BaselineKind::GridSearchPower => grid_search_power(eff, &omega(), params, q)?.1,
        BaselineKind::CornerSearchPower => corner_search_power(eff, &omega(), params)?.1,
        k => {
            let mode = k
                .power_mode()
                .expect("random-phase and no-IRS kinds have a power mode");
            match k {
                BaselineKind::RandomPhaseOptPower
                | BaselineKind::RandomPhasePmax
                | BaselineKind::RandomPhasePmin => {
                    random_phase_baseline(eff, params, seed, mode)?.min_secrecy
                }
                _ => no_irs_baseline(chs, params, mode)?.min_secrecy,
            }
        }
    })
}

/// Output of one realization.
#[derive(Debug, Clone)]
pub struct Realization {
    pub config: String,
    pub l: usize,
    pub index: usize,
    pub seed: u64,
    pub outcome: Result<Outcome, String>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub record: ResultRecord,
    /// Clamped `min_j C_j` of the power loop at random phases.
    pub fp_trace: Vec<f64>,
    /// Lattice or corner optimum at the same phases, if a lattice baseline
    /// was requested.
    pub lattice: Option<f64>,
}

fn run_one(plan: &RunPlan, config: &ScenarioConfig, l: usize, index: usize) -> Realization {
    let label = config.label.as_str().to_string();
    let seed = realization_seed(plan.seed, &label, l, index);
    let outcome = (|| -> irsec_core::Result<Outcome> {
        let params = params_for(config, l);
        let chs = channels_for(config, &params, seed)?;
        let eff = build_effective(&chs);
        let ao = run_algorithm1(&eff, &params, seed)?;
        let mut record = ResultRecord::from_ao(seed, &label, index, &ao);
        for &kind in &plan.baselines {
            let v = run_baseline(kind, &chs, &eff, &params, seed, plan.grid_q)?;
            record.baselines.insert(kind.as_str().into(), v);
        }
        let fp = fp_at_random_phases(&eff, &params, seed)?;
        let lattice = plan
            .baselines
            .iter()
            .find(|k| {
                matches!(
                    k,
                    BaselineKind::GridSearchPower | BaselineKind::CornerSearchPower
                )
            })
            .map(|k| record.baselines[k.as_str()]);
        Ok(Outcome {
            record,
            fp_trace: fp.trace,
            lattice,
        })
    })()
    .map_err(|e| e.to_string());
    if let Err(e) = &outcome {
        log::warn!("{label} L={l} realization {index} (seed {seed}) failed: {e}");
    } else {
        log::info!("{label} L={l} realization {index} done");
    }
    Realization {
        config: label,
        l,
        index,
        seed,
        outcome,
    }
}

/// Runs `f` over `0..n` on `threads` workers and returns results in index
/// order.
fn pool<T: Send>(n: usize, threads: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let threads = if threads == 0 {
        std::thread::available_parallelism().map_or(1, |t| t.get())
    } else {
        threads
    }
    .min(n.max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let r = f(i);
                slots.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|r| r.expect("every task ran"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeRow {
    pub config: String,
    #[serde(rename = "L")]
    pub l: usize,
    pub scheme: String,
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
    pub failed: usize,
}

/// Mean of one iteration-indexed series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaRow {
    /// `outer` (outer loop), `fp` (power loop) or `fp_alt` (power loop
    /// against the lattice optimum).
    pub series: &'static str,
    pub config: String,
    #[serde(rename = "L")]
    pub l: usize,
    pub iter: usize,
    pub mean: f64,
    /// Realizations that entered the mean.
    pub count: usize,
}

#[derive(Debug, Clone)]
pub struct AggregateReport {
    pub rows: Vec<SchemeRow>,
    pub deltas: Vec<DeltaRow>,
    pub realizations: Vec<Realization>,
}

impl AggregateReport {
    pub fn mean(&self, config: &str, l: usize, scheme: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.config == config && r.l == l && r.scheme == scheme)
            .map(|r| r.mean)
    }

    pub fn delta(&self, series: &str, config: &str, l: usize, iter: usize) -> Option<&DeltaRow> {
        self.deltas
            .iter()
            .find(|d| d.series == series && d.config == config && d.l == l && d.iter == iter)
    }

    pub fn aggregate_csv(&self) -> String {
        let mut out = String::from("config,L,scheme,mean,stderr,count,failed\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.config, r.l, r.scheme, r.mean, r.stderr, r.count, r.failed
            );
        }
        out
    }

    pub fn deltas_csv(&self) -> String {
        let mut out = String::from("series,config,L,iter,mean,count\n");
        for d in &self.deltas {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                d.series, d.config, d.l, d.iter, d.mean, d.count
            );
        }
        out
    }
}

/// `Delta_i = (J_i - J_{i-1}) / J_{i-1}` per iteration, averaged over the
/// traces whose predecessor is positive. Traces are padded with their last
/// value first, so a converged run contributes zeros.
pub fn mean_delta(traces: &[Vec<f64>]) -> Vec<(f64, usize)> {
    let len = traces.iter().map(Vec::len).max().unwrap_or(0);
    let padded: Vec<Vec<f64>> = traces.iter().map(|t| pad_trace(t, len)).collect();
    (1..len)
        .map(|i| {
            let xs: Vec<f64> = padded
                .iter()
                .filter(|t| t[i - 1] > 0.0)
                .map(|t| fractional_increase(t[i - 1], t[i]))
                .collect();
            (mean_stderr(&xs).0, xs.len())
        })
        .collect()
}

/// `(J_alt - J_i) / J_alt` per iteration over pairs with `J_alt > 0`, raw
/// (negative when the trace beats the reference).
pub fn mean_delta_alt(traces: &[(Vec<f64>, f64)]) -> Vec<(f64, usize)> {
    let usable: Vec<&(Vec<f64>, f64)> = traces.iter().filter(|(_, a)| *a > 0.0).collect();
    let len = traces.iter().map(|(t, _)| t.len()).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            let xs: Vec<f64> = usable
                .iter()
                .map(|(t, a)| (a - pad_trace(t, len)[i]) / a)
                .collect();
            (mean_stderr(&xs).0, xs.len())
        })
        .collect()
}

pub fn aggregate(plan: &RunPlan, realizations: Vec<Realization>) -> AggregateReport {
    let mut groups: BTreeMap<(String, usize), Vec<&Realization>> = BTreeMap::new();
    for r in &realizations {
        groups.entry((r.config.clone(), r.l)).or_default().push(r);
    }
    let mut rows = Vec::new();
    let mut deltas = Vec::new();
    for ((config, l), rs) in &groups {
        let ok: Vec<&Outcome> = rs.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
        let failed = rs.len() - ok.len();
        let mut schemes = vec![AO.to_string()];
        schemes.extend(plan.baselines.iter().map(|b| b.as_str().to_string()));
        for scheme in schemes {
            let xs: Vec<f64> = ok
                .iter()
                .map(|o| {
                    if scheme == AO {
                        o.record.rates.min_secrecy
                    } else {
                        o.record.baselines[&scheme]
                    }
                })
                .collect();
            let (mean, stderr) = mean_stderr(&xs);
            rows.push(SchemeRow {
                config: config.clone(),
                l: *l,
                scheme,
                mean,
                stderr,
                count: xs.len(),
                failed,
            });
        }
        let mut push = |series: &'static str, values: Vec<(f64, usize)>, first: usize| {
            for (k, (mean, count)) in values.into_iter().enumerate() {
                deltas.push(DeltaRow {
                    series,
                    config: config.clone(),
                    l: *l,
                    iter: k + first,
                    mean,
                    count,
                });
            }
        };
        let outer: Vec<Vec<f64>> = ok.iter().map(|o| o.record.outer_trace.clone()).collect();
        push("outer", mean_delta(&outer), 1);
        let fp: Vec<Vec<f64>> = ok.iter().map(|o| o.fp_trace.clone()).collect();
        push("fp", mean_delta(&fp), 1);
        let alt: Vec<(Vec<f64>, f64)> = ok
            .iter()
            .filter_map(|o| o.lattice.map(|a| (o.fp_trace.clone(), a)))
            .collect();
        if !alt.is_empty() {
            push("fp_alt", mean_delta_alt(&alt), 0);
        }
    }
    AggregateReport {
        rows,
        deltas,
        realizations,
    }
}

/// Runs every realization of the plan and, with `plan.out` set, writes
/// `aggregate.csv`, `deltas.csv`, `meta.json` and optionally `traces/`.
pub fn run_plan(plan: &RunPlan) -> anyhow::Result<AggregateReport> {
    plan.validate()?;
    let mut tasks = Vec::new();
    for c in &plan.configs {
        for &l in &plan.l_values {
            for r in 0..plan.realizations {
                tasks.push((c, l, r));
            }
        }
    }
    let realizations = pool(tasks.len(), plan.threads, |i| {
        let (c, l, r) = tasks[i];
        run_one(plan, c, l, r)
    });
    let report = aggregate(plan, realizations);
    if let Some(out) = &plan.out {
        write_outputs(plan, &report, out)?;
    }
    Ok(report)
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_outputs(plan: &RunPlan, report: &AggregateReport, out: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write(&out.join("aggregate.csv"), &report.aggregate_csv())?;
    write(&out.join("deltas.csv"), &report.deltas_csv())?;
    write(&out.join("meta.json"), &meta_json(plan, report))?;
    if plan.traces {
        let dir = out.join("traces");
        std::fs::create_dir_all(&dir)?;
        for r in &report.realizations {
            if let Ok(o) = &r.outcome {
                write(
                    &dir.join(format!("{}.csv", r.seed)),
                    &phase_trace_csv(&o.record),
                )?;
                write(
                    &dir.join(format!("{}_fp.csv", r.seed)),
                    &fp_trace_csv(&o.record),
                )?;
                write(&dir.join(format!("{}.json", r.seed)), &o.record.to_json())?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SeedAudit<'a> {
    config: &'a str,
    #[serde(rename = "L")]
    l: usize,
    realization: usize,
    seed: u64,
    /// Schemes evaluated on this channel draw.
    schemes: Vec<String>,
    error: Option<&'a str>,
}

/// Run manifest: every parameter, decision knob and channel seed.
pub fn meta_json(plan: &RunPlan, report: &AggregateReport) -> String {
    let configs: Vec<serde_json::Value> = plan
        .configs
        .iter()
        .map(|c| {
            let params: BTreeMap<&str, String> = param_entries(&c.params).into_iter().collect();
            serde_json::json!({
                "label": c.label.as_str(),
                "users": c.users.iter().map(|(a, b)| [[a.x, a.y], [b.x, b.y]]).collect::<Vec<_>>(),
                "anchors": c.anchors.iter().map(|(k, p)| (k.clone(), [p.x, p.y])).collect::<BTreeMap<_, _>>(),
                "eve_anchor": c.eve_anchor,
                "irs_anchor": c.irs_anchor,
                "params": params,
                "trust_radius": match c.params.trust_radius {
                    TrustRadius::PerElement(k) => format!("{k} * (L + 1), Frobenius norm"),
                    TrustRadius::Fixed(x) => format!("{x}, Frobenius norm"),
                },
            })
        })
        .collect();
    let mut schemes = vec![AO.to_string()];
    schemes.extend(plan.baselines.iter().map(|b| b.as_str().to_string()));
    let seeds: Vec<SeedAudit> = report
        .realizations
        .iter()
        .map(|r| SeedAudit {
            config: &r.config,
            l: r.l,
            realization: r.index,
            seed: r.seed,
            schemes: schemes.clone(),
            error: r.outcome.as_ref().err().map(String::as_str),
        })
        .collect();
    let meta = serde_json::json!({
        "tool": concat!("irsec ", env!("CARGO_PKG_VERSION")),
        "configs": configs,
        "L": plan.l_values,
        "realizations": plan.realizations,
        "seed_base": plan.seed,
        "seed_rule": "derive_seed(base, [fnv1a(config label), L, realization]) with SplitMix64 folding",
        "baselines": plan.baselines.iter().map(|b| b.as_str()).collect::<Vec<_>>(),
        "grid_q": plan.grid_q,
        "knobs": {
            "leakage_surrogate": "inverted-ratio quadratic transform, x3 = sqrt(D) / (N + D)",
            "stopping_rule": "fractional increase of clamped min C_j; unclamped minimum while both values are 0",
            "sca_step_guard": "steps that lower min G_j are rejected",
            "sca_infeasible_retry": "once with 2 * xi",
            "eve_irs_path_loss": "alpha_irs",
            "lattice_spacing": "linear watts, both box ends included",
            "lattice_baselines_phases": "the random baseline phases of the realization",
            "randomization_ranking": "unclamped min G_j, principal eigenvector always included",
            "trace_padding": "repeat final value",
            "delta_mean": "over realizations with a positive predecessor",
        },
        "seeds": seeds,
    });
    serde_json::to_string_pretty(&meta).expect("manifest is plain data")
}
