//! Oracle suites: the ten acceptance checks, shared by `irsec validate` and
//! the `acceptance` test target.
//!
//! Each check builds its own instances from fixed seeds and returns a
//! [`Check`] with the measured quantity in `detail`.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use irsec_core::ao::{gaussian_randomization, initial_phases};
use irsec_core::baselines::{corner_search_power, grid_search_power, random_phases, BaselineKind};
use irsec_core::channel::{build_effective, EffectiveChannels};
use irsec_core::geometry::{default_anchors, ConfigLabel, Point, ScenarioConfig};
use irsec_core::linalg::CMatrix;
use irsec_core::params::SystemParams;
use irsec_core::phase_opt::{grad_s, sca_loop, taylor_upper_bound, PairMatrices};
use irsec_core::power_opt::{fp_loop, surrogate_gains, update_aux_gains, SurrogateForm};
use irsec_core::rates::{
    secrecy_breakdown, trace_form_g, GainTable, PhaseVector, PowerVector, PsdMatrix,
};
use irsec_core::seed::stream_rng;
use irsec_core::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::runner::{
    channels_for, fp_at_random_phases, lattice_reference, mean_delta_alt, params_for,
    realization_seed, run_plan, AggregateReport, RunPlan, AO,
};

/// Stream id of the instance generators below.
const VALIDATE_STREAM: u64 = 9 << 40;

#[derive(Debug, Clone)]
pub struct Check {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} ({}, {:.1} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

type Outcome = anyhow::Result<(bool, String)>;

fn timed(id: usize, name: &'static str, f: impl FnOnce() -> Outcome) -> Check {
    let start = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e:#}")));
    Check {
        id,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn rng(seed: u64) -> impl Rng {
    stream_rng(seed, VALIDATE_STREAM)
}

fn cn(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

fn random_power(users: usize, params: &SystemParams, rng: &mut impl Rng) -> PowerVector {
    let p = (0..users)
        .map(|_| params.p_min + rng.random::<f64>() * (params.p_max - params.p_min))
        .collect();
    PowerVector::new(p).expect("box values are finite and nonnegative")
}

fn random_phase_vector(l: usize, rng: &mut impl Rng) -> PhaseVector {
    let a: Vec<f64> = (0..l).map(|_| rng.random::<f64>() * TAU).collect();
    PhaseVector::from_angles(&a)
}

/// `G G^H` with a random number of Gaussian columns, scaled to unit
/// diagonal.
fn random_unit_diag_psd(m: usize, rng: &mut impl Rng) -> CMatrix {
    let k = rng.random_range(1..=m);
    let mut w = CMatrix::zeros(m);
    for _ in 0..k {
        let g: Vec<Complex64> = (0..m).map(|_| cn(rng)).collect();
        w.add_outer(1.0, &g);
    }
    let d: Vec<f64> = w.diag_re().iter().map(|x| x.sqrt()).collect();
    let w0 = w.clone();
    CMatrix::from_fn(m, |i, j| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            w0.row(i)[j] / (d[i] * d[j])
        }
    })
}

/// Random Hermitian direction of unit Frobenius norm.
fn random_direction(m: usize, rng: &mut impl Rng) -> CMatrix {
    let a = CMatrix::from_fn(m, |_, _| cn(rng));
    let h = a.hermitian_part();
    let n = h.frobenius_norm();
    h.scaled(1.0 / n)
}

pub fn named_instance(
    label: ConfigLabel,
    l: usize,
    seed: u64,
) -> anyhow::Result<(EffectiveChannels, SystemParams)> {
    let params = SystemParams::reference(l, 2);
    let config = ScenarioConfig::named(label, params.clone())?;
    Ok((
        build_effective(&channels_for(&config, &params, seed)?),
        params,
    ))
}

/// One pair on the `A1`/`B1` positions of the default layout with the
/// eavesdropper at `W` and the IRS at `Z` (the C1 anchors).
pub fn single_pair_config(params: SystemParams) -> ScenarioConfig {
    let mut params = params;
    params.pairs = 1;
    ScenarioConfig {
        label: ConfigLabel::Custom,
        users: vec![(Point::new(0.0, 0.0), Point::new(60.0, 0.0))],
        anchors: default_anchors(),
        eve_anchor: "W".into(),
        irs_anchor: "Z".into(),
        params,
    }
}

fn single_pair_instance(l: usize, seed: u64) -> anyhow::Result<(EffectiveChannels, SystemParams)> {
    let params = params_for(&single_pair_config(SystemParams::reference(l, 1)), l);
    let config = single_pair_config(params.clone());
    Ok((
        build_effective(&channels_for(&config, &params, seed)?),
        params,
    ))
}

/// 1. Trace form against the phase form of the secrecy rate.
pub fn criterion_1() -> Check {
    timed(1, "SDR/rate consistency", || {
        let mut worst = 0.0f64;
        for i in 0..100u64 {
            let l = if i % 2 == 0 { 4 } else { 8 };
            let (eff, params) = named_instance(ConfigLabel::NAMED[i as usize % 4], l, 1000 + i)?;
            let mut r = rng(i);
            let p = random_power(4, &params, &mut r);
            let omega = random_phase_vector(l, &mut r);
            let br = secrecy_breakdown(&eff, &p, &omega, &params)?;
            let w = PsdMatrix::rank_one(&omega);
            for j in 1..=2 {
                let g = trace_form_g(&eff, &p, &w, j, &params)?;
                worst = worst.max((g - br.pairs[j - 1].unclamped).abs());
            }
        }
        Ok((
            worst <= 1e-9,
            format!("max |G_j - C_j| = {worst:.3e} over 100 instances (tol 1e-9)"),
        ))
    })
}

/// 2. Analytic gradient of `S_j` against central differences.
pub fn criterion_2() -> Check {
    timed(2, "gradient oracle", || {
        let mut worst = 0.0f64;
        let h = 1e-4;
        for i in 0..20u64 {
            let l = if i % 2 == 0 { 4 } else { 8 };
            let (eff, params) = named_instance(ConfigLabel::NAMED[i as usize % 4], l, 2000 + i)?;
            let mut r = rng(100 + i);
            let p = random_power(4, &params, &mut r);
            let w = random_unit_diag_psd(l + 1, &mut r);
            let j = 1 + (i as usize % 2);
            let pm = PairMatrices::new(&eff, p.as_slice(), j - 1);
            let grad = grad_s(&eff, &p, &w, j, &params)?;
            for _ in 0..10 {
                let d = random_direction(l + 1, &mut r);
                let mut plus = w.clone();
                plus.add_scaled(h, &d);
                let mut minus = w.clone();
                minus.add_scaled(-h, &d);
                let fd = (pm.s(&plus, &params) - pm.s(&minus, &params)) / (2.0 * h);
                let an = grad.inner(&d);
                worst = worst.max((fd - an).abs() / an.abs());
            }
        }
        Ok((
            worst < 1e-5,
            format!("max relative error {worst:.3e} over 20 instances x 10 directions (tol 1e-5)"),
        ))
    })
}

/// 3. The linearization of `S_j` bounds it from above.
pub fn criterion_3() -> Check {
    timed(3, "Taylor bound", || {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..10u64 {
            let l = if i % 2 == 0 { 4 } else { 8 };
            let (eff, params) = named_instance(ConfigLabel::NAMED[i as usize % 4], l, 3000 + i)?;
            let mut r = rng(200 + i);
            let p = random_power(4, &params, &mut r);
            let w_hat = random_unit_diag_psd(l + 1, &mut r);
            for k in 0..100 {
                let j = 1 + k % 2;
                let w = random_unit_diag_psd(l + 1, &mut r);
                let bound = taylor_upper_bound(&eff, &p, &w, &w_hat, j, &params)?;
                let s = PairMatrices::new(&eff, p.as_slice(), j - 1).s(&w, &params);
                worst = worst.max(s - bound);
            }
        }
        let violation = worst.max(0.0);
        Ok((
            violation <= 1e-10,
            format!("max violation {violation:.3e} (largest S - bound {worst:.3e}) over 10 x 100 points (tol 1e-10)"),
        ))
    })
}

/// 4. Tightness and midpoint concavity of the power surrogate.
pub fn criterion_4() -> Check {
    timed(4, "FP tightness & concavity", || {
        let mut tight = 0.0f64;
        let mut concave = 0.0f64;
        let mut skipped = 0;
        let mut checked = 0;
        for i in 0..5u64 {
            let (eff, params) = named_instance(ConfigLabel::NAMED[i as usize % 4], 6, 4000 + i)?;
            let mut r = rng(300 + i);
            let g = GainTable::from_phases(&eff, &random_phase_vector(6, &mut r));
            for _ in 0..100 {
                let p = random_power(4, &params, &mut r);
                let aux = update_aux_gains(&g, p.as_slice(), &params);
                for j in 0..2 {
                    let f = surrogate_gains(
                        &g,
                        p.as_slice(),
                        &aux,
                        j,
                        &params,
                        SurrogateForm::Remediated,
                    )?;
                    tight = tight.max((f - g.unclamped(p.as_slice(), j, &params)).abs());
                }
            }
            let p0 = random_power(4, &params, &mut r);
            let aux = update_aux_gains(&g, p0.as_slice(), &params);
            for _ in 0..100 {
                let p1 = random_power(4, &params, &mut r);
                let p2 = random_power(4, &params, &mut r);
                let mid: Vec<f64> = p1
                    .as_slice()
                    .iter()
                    .zip(p2.as_slice())
                    .map(|(a, b)| 0.5 * (a + b))
                    .collect();
                for j in 0..2 {
                    let f = |p: &[f64]| {
                        surrogate_gains(&g, p, &aux, j, &params, SurrogateForm::Remediated)
                    };
                    match (f(p1.as_slice()), f(p2.as_slice())) {
                        (Ok(a), Ok(b)) => {
                            let m = f(&mid)?;
                            concave = concave.max(0.5 * (a + b) - m);
                            checked += 1;
                        }
                        _ => skipped += 1,
                    }
                }
            }
        }
        let violation = concave.max(0.0);
        Ok((
            tight <= 1e-9 && violation <= 1e-10 && checked > 0,
            format!(
                "max |f - C_j| = {tight:.3e} (tol 1e-9); max midpoint violation {violation:.3e} over {checked} pairs, \
                 {skipped} outside the surrogate domain (tol 1e-10)"
            ),
        ))
    })
}

fn converged_fp(params: &SystemParams) -> SystemParams {
    let mut p = params.clone();
    p.eps1 = 1e-6;
    p.fp_max_iter = 200;
    p
}

/// 5. Converged power loop against corner (N = 1) and Q = 50 grid (N = 2)
///    enumeration at random phases.
pub fn criterion_5() -> Check {
    timed(5, "power-optimizer cross-validation", || {
        let shortfall = |fp: f64, reference: f64| if reference > 0.0 { (reference - fp) / reference } else { 0.0 };
        let (mut worst1, mut worst2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for i in 0..20u64 {
            let (eff, params) = single_pair_instance(4, 5000 + i)?;
            let params = converged_fp(&params);
            let omega = random_phases(4, 5000 + i);
            let fp = fp_loop(&eff, &omega, None, &params)?.current();
            let corner = corner_search_power(&eff, &omega, &params)?.1;
            worst1 = worst1.max(shortfall(fp, corner));
        }
        for i in 0..20u64 {
            let (eff, params) = named_instance(ConfigLabel::NAMED[i as usize % 4], 4, 5100 + i)?;
            let params = converged_fp(&params);
            let omega = random_phases(4, 5100 + i);
            let fp = fp_loop(&eff, &omega, None, &params)?.current();
            let grid = grid_search_power(&eff, &omega, &params, 50)?.1;
            worst2 = worst2.max(shortfall(fp, grid));
        }
        Ok((
            worst1 <= 0.01 && worst2 <= 0.02,
            format!(
                "largest relative shortfall: N=1 vs corners {worst1:.3e} (tol 1e-2), N=2 vs Q=50 grid {worst2:.3e} (tol 2e-2)"
            ),
        ))
    })
    .with_limit(600.0)
}

fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// 6. SCA at `L = 1` against an exhaustive phase grid.
pub fn criterion_6() -> Check {
    timed(6, "SCA sanity at L=1", || {
        let mut worst = 0.0f64;
        for i in 0..20u64 {
            let (eff, mut params) = single_pair_instance(1, 6000 + i)?;
            params.eps2 = 1e-9;
            params.sca_max_iter = 500;
            let p = PowerVector::uniform(2, params.p_max);
            let st = sca_loop(
                &eff,
                &p,
                PsdMatrix::rank_one(&initial_phases(1, i)),
                &params,
            )?;
            let got = gaussian_randomization(&st.w_hat, &eff, &p, &params, i)?.angles()[0];
            let mut best = (f64::NEG_INFINITY, 0.0);
            for k in 0..36_000 {
                let a = k as f64 * TAU / 36_000.0;
                let v = GainTable::from_phases(&eff, &PhaseVector::from_angles(&[a]))
                    .min_unclamped(p.as_slice(), &params);
                if v > best.0 {
                    best = (v, a);
                }
            }
            worst = worst.max(angle_diff(got, best.1).to_degrees());
        }
        Ok((
            worst <= 5.0,
            format!("max phase error {worst:.3} deg over 20 instances (tol 5 deg)"),
        ))
    })
}

/// Mean `Delta_i^Alt` of the power loop at random phases, `i = 0..=cap`.
pub fn fp_convergence(
    config: &ScenarioConfig,
    l: usize,
    realizations: usize,
    seed: u64,
    q: usize,
    cap: usize,
) -> anyhow::Result<Vec<(f64, usize)>> {
    let mut params = params_for(config, l);
    params.eps1 = f64::MIN_POSITIVE;
    params.fp_max_iter = cap;
    let mut traces = Vec::new();
    for r in 0..realizations {
        let s = realization_seed(seed, config.label.as_str(), l, r);
        let eff = build_effective(&channels_for(config, &params, s)?);
        let fp = fp_at_random_phases(&eff, &params, s)?;
        traces.push((fp.trace, lattice_reference(&eff, &params, s, q)?));
    }
    Ok(mean_delta_alt(&traces))
}

fn first_below(series: &[(f64, usize)], tol: f64) -> Option<usize> {
    series.iter().position(|&(d, _)| d <= tol)
}

/// 7. Power-loop convergence speed against the lattice optimum.
pub fn criterion_7() -> Check {
    timed(7, "convergence speed (power loop)", || {
        let one = fp_convergence(
            &single_pair_config(SystemParams::reference(20, 1)),
            20,
            50,
            7,
            2,
            40,
        )?;
        let two = fp_convergence(
            &ScenarioConfig::named(ConfigLabel::C1, SystemParams::reference(20, 2))?,
            20,
            50,
            7,
            50,
            40,
        )?;
        let at = |s: &[(f64, usize)], i: usize| s.get(i).or(s.last()).map_or(f64::NAN, |x| x.0);
        let (d1, d2) = (at(&one, 10), at(&two, 35));
        let fmt = |s: &[(f64, usize)]| {
            s.iter()
                .take(41)
                .step_by(5)
                .map(|(d, _)| format!("{d:.2e}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        Ok((
            d1 <= 1e-2 && d2 <= 1e-2,
            format!(
                "N=1: mean Delta^Alt at iter 10 = {d1:.3e} (first <= 1e-2 at {:?}, {} realizations with J_Alt > 0); \
                 N=2: at iter 35 = {d2:.3e} (first <= 1e-2 at {:?}, {} usable); every 5th iter N=1 [{}] N=2 [{}]",
                first_below(&one, 1e-2),
                one.first().map_or(0, |x| x.1),
                first_below(&two, 1e-2),
                two.first().map_or(0, |x| x.1),
                fmt(&one),
                fmt(&two),
            ),
        ))
    })
}

/// 8. Outer-loop convergence on C1 at `L = 20`.
pub fn criterion_8() -> Check {
    timed(8, "outer-loop convergence", || {
        let plan = RunPlan {
            configs: vec![ScenarioConfig::named(
                ConfigLabel::C1,
                SystemParams::reference(20, 2),
            )?],
            l_values: vec![20],
            realizations: 20,
            seed: 8,
            baselines: Vec::new(),
            traces: false,
            grid_q: 50,
            out: None,
            threads: 0,
        };
        let rep = run_plan(&plan)?;
        let d: Vec<String> = (1..=4)
            .map(|i| {
                rep.delta("outer", "C1", 20, i)
                    .map_or("-".into(), |r| format!("{:.3e} (n={})", r.mean, r.count))
            })
            .collect();
        let d4 = rep.delta("outer", "C1", 20, 4).map_or(0.0, |r| r.mean);
        let failed = rep.rows.first().map_or(0, |r| r.failed);
        Ok((
            d4 < 1e-2 && failed == 0,
            format!(
                "mean outer Delta_1..4 = [{}] (tol 1e-2 at iter 4), {failed} failed runs",
                d.join(", ")
            ),
        ))
    })
}

pub const SWEEP_BASELINES: [BaselineKind; 6] = [
    BaselineKind::RandomPhaseOptPower,
    BaselineKind::RandomPhasePmax,
    BaselineKind::RandomPhasePmin,
    BaselineKind::NoIrsOptPower,
    BaselineKind::NoIrsPmax,
    BaselineKind::NoIrsPmin,
];

/// Table of means of a configuration sweep.
pub fn sweep_table(rep: &AggregateReport, configs: &[&str], ls: &[usize]) -> String {
    let mut out = String::new();
    let mut schemes = vec![AO];
    schemes.extend(SWEEP_BASELINES.iter().map(|b| b.as_str()));
    for c in configs {
        for &l in ls {
            let _ = write!(out, "\n    {c} L={l:>2}:");
            for s in &schemes {
                let _ = write!(out, " {s}={:.4}", rep.mean(c, l, s).unwrap_or(f64::NAN));
            }
        }
    }
    out
}

/// AO gain over random phases with optimized powers, `AO / RP - 1`.
pub fn gain(rep: &AggregateReport, config: &str, l: usize) -> f64 {
    let ao = rep.mean(config, l, AO).unwrap_or(f64::NAN);
    let rp = rep
        .mean(config, l, BaselineKind::RandomPhaseOptPower.as_str())
        .unwrap_or(f64::NAN);
    ao / rp - 1.0
}

/// 9. Configuration comparison over `L`.
pub fn criterion_9() -> Check {
    timed(9, "configuration comparison", || {
        let ls = [10, 20, 30, 40];
        let plan = RunPlan {
            configs: ConfigLabel::NAMED
                .iter()
                .map(|&c| ScenarioConfig::named(c, SystemParams::reference(40, 2)))
                .collect::<Result<_, _>>()?,
            l_values: ls.to_vec(),
            realizations: 10,
            seed: 9,
            baselines: SWEEP_BASELINES.to_vec(),
            traces: false,
            grid_q: 50,
            out: None,
            threads: 0,
        };
        let rep = run_plan(&plan)?;
        let names = ["C1", "C2", "C3", "C4"];

        let mut monotone = true;
        for c in names {
            for w in ls.windows(2) {
                let (a, b) = (
                    rep.mean(c, w[0], AO).unwrap_or(f64::NAN),
                    rep.mean(c, w[1], AO).unwrap_or(f64::NAN),
                );
                monotone &= b >= a;
            }
        }
        let g: Vec<f64> = names.iter().map(|c| gain(&rep, c, 40)).collect();
        let ordering = g[3] > g[0] && g[0] > g[2] && g[2] > g[1];
        let band = (1.5..=2.8).contains(&g[0]);
        let mut worst_pair = 0.0f64;
        for c in names {
            for &l in &ls {
                for (rp, ni) in SWEEP_BASELINES[..3].iter().zip(&SWEEP_BASELINES[3..]) {
                    let a = rep.mean(c, l, rp.as_str()).unwrap_or(f64::NAN);
                    let b = rep.mean(c, l, ni.as_str()).unwrap_or(f64::NAN);
                    let scale = a.max(b);
                    let rel = if scale > 0.0 {
                        (a - b).abs() / scale
                    } else if scale == 0.0 {
                        0.0
                    } else {
                        f64::NAN
                    };
                    worst_pair = if rel.is_nan() {
                        f64::NAN
                    } else {
                        worst_pair.max(rel)
                    };
                }
            }
        }
        let pairs_ok = worst_pair <= 0.05;
        let failed: usize = rep
            .rows
            .iter()
            .filter(|r| r.scheme == AO)
            .map(|r| r.failed)
            .sum();
        let pct = |x: f64| format!("{:.0}%", 100.0 * x);
        Ok((
            monotone && ordering && band && pairs_ok && failed == 0,
            format!(
                "(a) AO nondecreasing in L: {}; (b) gains at L=40 C1 {} C2 {} C3 {} C4 {}, ordering C4>C1>C3>C2: {}; \
                 (c) C1 gain in [150%, 280%]: {}; (d) random-phase vs no-IRS worst relative gap {:.3} (tol 0.05): {}; \
                 {failed} failed realizations; means:{}",
                ok(monotone),
                pct(g[0]),
                pct(g[1]),
                pct(g[2]),
                pct(g[3]),
                ok(ordering),
                ok(band),
                worst_pair,
                ok(pairs_ok),
                sweep_table(&rep, &names, &ls),
            ),
        ))
    })
}

fn ok(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

fn files_under(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d)? {
            let p = e?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(dir).expect("listed under dir").to_path_buf());
            }
        }
    }
    out.sort();
    Ok(out)
}

/// 10. The same plan, run twice with different worker counts under `work`,
///     writes byte-identical files.
pub fn criterion_10(work: &Path) -> Check {
    timed(10, "determinism", || {
        let mut params = SystemParams::reference(3, 2);
        params.randomization_samples = 20;
        let mut plan = RunPlan {
            configs: vec![
                ScenarioConfig::named(ConfigLabel::C1, params.clone())?,
                ScenarioConfig::named(ConfigLabel::C4, params)?,
            ],
            l_values: vec![3],
            realizations: 2,
            seed: 10,
            baselines: SWEEP_BASELINES
                .iter()
                .copied()
                .chain([BaselineKind::GridSearchPower])
                .collect(),
            traces: true,
            grid_q: 6,
            out: Some(work.join("a")),
            threads: 1,
        };
        run_plan(&plan)?;
        plan.out = Some(work.join("b"));
        plan.threads = 2;
        run_plan(&plan)?;
        let (a, b) = (work.join("a"), work.join("b"));
        let files = files_under(&a)?;
        let mut differing = Vec::new();
        let mut csvs = 0;
        for f in &files {
            csvs += usize::from(f.extension().is_some_and(|e| e == "csv"));
            if std::fs::read(a.join(f))? != std::fs::read(b.join(f)).unwrap_or_default() {
                differing.push(f.display().to_string());
            }
        }
        let same_set = files == files_under(&b)?;
        Ok((
            differing.is_empty() && same_set && csvs > 0,
            format!(
                "{} files ({csvs} CSV) compared across 1 and 2 workers, differing: {:?}",
                files.len(),
                differing
            ),
        ))
    })
}

trait WithLimit {
    fn with_limit(self, seconds: f64) -> Self;
}

impl WithLimit for Check {
    /// Fails the check when it ran longer than `seconds`.
    fn with_limit(mut self, seconds: f64) -> Self {
        if self.seconds >= seconds {
            self.passed = false;
            let _ = write!(
                self.detail,
                "; runtime {:.1} s exceeds {seconds} s",
                self.seconds
            );
        }
        self
    }
}

/// Runtime-limited variants of checks 1 and 2.
pub fn criterion_1_timed() -> Check {
    criterion_1().with_limit(10.0)
}

pub fn criterion_2_timed() -> Check {
    criterion_2().with_limit(30.0)
}

/// Runs the checks in `ids` in order.
pub fn run(ids: &[usize], work: &Path) -> Vec<Check> {
    ids.iter()
        .filter_map(|&id| match id {
            1 => Some(criterion_1_timed()),
            2 => Some(criterion_2_timed()),
            3 => Some(criterion_3()),
            4 => Some(criterion_4()),
            5 => Some(criterion_5()),
            6 => Some(criterion_6()),
            7 => Some(criterion_7()),
            8 => Some(criterion_8()),
            9 => Some(criterion_9()),
            10 => Some(criterion_10(work)),
            _ => None,
        })
        .collect()
}
