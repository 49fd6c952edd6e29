//! Alternating optimization: FP power loops and SCA phase loops, then
//! Gaussian randomization to recover unit-modulus phases.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::EffectiveChannels;
use crate::error::{Error, Result};
use crate::kernel::SolveStatus;
use crate::linalg::hermitian_eigen;
use crate::metrics::fractional_increase;
use crate::params::SystemParams;
use crate::phase_opt::sca_loop;
use crate::power_opt::fp_loop_gains;
use crate::rates::{GainTable, PhaseVector, PowerVector, PsdMatrix, RateBreakdown};
use crate::seed::{stream_rng, INIT_PHASE_STREAM, RANDOMIZATION_STREAM};

/// One outer iteration of Algorithm 1.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterRecord {
    /// Clamped `min_j C_j` of every FP sub-iteration, starting point first.
    pub fp_trace: Vec<f64>,
    /// Powers after every FP sub-iteration.
    pub fp_powers: Vec<Vec<f64>>,
    /// Clamped per-pair `C_j` at the same points.
    pub fp_pairs: Vec<Vec<f64>>,
    /// Relaxed `min_j G_j` of every SCA sub-iteration, starting point first.
    pub sca_trace: Vec<f64>,
    pub sca_statuses: Vec<SolveStatus>,
    /// Clamped relaxed `min_j C_j` at the end of the iteration.
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct AoResult {
    pub omega: PhaseVector,
    pub powers: PowerVector,
    /// Rates at `(omega, powers)`.
    pub rates: RateBreakdown,
    /// Clamped relaxed `min_j C_j` at the start and after every outer
    /// iteration.
    pub outer_trace: Vec<f64>,
    pub outer: Vec<OuterRecord>,
    /// Relaxed `min_j G_j` (unclamped) at termination.
    pub relaxation_objective: f64,
    /// `relaxation_objective - rates.min_unclamped`.
    pub recovery_gap: f64,
    pub w: PsdMatrix,
}

fn with_outer(outer: usize, e: Error) -> Error {
    match e {
        Error::Iteration {
            stage,
            inner,
            source,
            ..
        } => Error::Iteration {
            outer,
            stage,
            inner,
            source,
        },
        other => Error::Iteration {
            outer,
            stage: "ao",
            inner: 0,
            source: Box::new(other),
        },
    }
}

/// Initial random phases drawn from the init stream of `seed`.
pub fn initial_phases(l: usize, seed: u64) -> PhaseVector {
    let mut rng = stream_rng(seed, INIT_PHASE_STREAM);
    let angles: Vec<f64> = (0..l).map(|_| rng.random::<f64>() * TAU).collect();
    PhaseVector::from_angles(&angles)
}

/// Algorithm 1 from random initial phases.
pub fn run_algorithm1(
    eff: &EffectiveChannels,
    params: &SystemParams,
    seed: u64,
) -> Result<AoResult> {
    let w0 = PsdMatrix::rank_one(&initial_phases(eff.irs_elements(), seed));
    run_algorithm1_from(eff, params, w0, seed)
}

/// Algorithm 1 from a given relaxed starting point; `seed` feeds the
/// randomization stream.
pub fn run_algorithm1_from(
    eff: &EffectiveChannels,
    params: &SystemParams,
    w0: PsdMatrix,
    seed: u64,
) -> Result<AoResult> {
    params.validate()?;
    if params.users() != eff.users() || w0.matrix().dim() != eff.dim() {
        return Err(Error::Dimension(
            "parameters, channels and W disagree".into(),
        ));
    }
    let mut w = w0;
    let mut p = PowerVector::uniform(eff.users(), params.p_max);
    let start = GainTable::from_relaxed(eff, w.matrix());
    let mut outer_trace = alloc::vec![start.min_secrecy(p.as_slice(), params)];
    let mut unclamped = alloc::vec![start.min_unclamped(p.as_slice(), params)];
    let mut outer = Vec::new();

    for k in 1..=params.outer_max_iter.max(1) {
        let gains = GainTable::from_relaxed(eff, w.matrix());
        let fp = fp_loop_gains(&gains, p, params).map_err(|e| with_outer(k, e))?;
        p = fp.p_hat;
        let sca = sca_loop(eff, &p, w, params).map_err(|e| with_outer(k, e))?;
        w = sca.w_hat;

        let after = GainTable::from_relaxed(eff, w.matrix());
        let obj = after.min_secrecy(p.as_slice(), params);
        outer_trace.push(obj);
        unclamped.push(after.min_unclamped(p.as_slice(), params));
        outer.push(OuterRecord {
            fp_trace: fp.trace,
            fp_powers: fp.powers,
            fp_pairs: fp.pair_secrecy,
            sca_trace: sca.trace,
            sca_statuses: sca.statuses,
            objective: obj,
        });

        let n = outer_trace.len();
        let inc = if outer_trace[n - 2] == 0.0 && obj == 0.0 {
            fractional_increase(unclamped[n - 2], unclamped[n - 1])
        } else {
            fractional_increase(outer_trace[n - 2], obj)
        };
        if inc < params.eps3 {
            break;
        }
    }

    let relaxation_objective = *unclamped.last().unwrap_or(&f64::NEG_INFINITY);
    let omega = gaussian_randomization(&w, eff, &p, params, seed)?;
    let rates = GainTable::from_phases(eff, &omega).breakdown(p.as_slice(), params);
    let recovery_gap = relaxation_objective - rates.min_unclamped;
    if recovery_gap > 0.0 {
        log::debug!("rank-one recovery lost {recovery_gap:.3e} bits");
    }
    Ok(AoResult {
        omega,
        powers: p,
        rates,
        outer_trace,
        outer,
        relaxation_objective,
        recovery_gap,
        w,
    })
}

/// `exp(j angle(w_i / w_{L+1}))` for `i = 1..L`, last entry 1.
pub fn recover_phases(omega_hat: &[Complex64]) -> Result<PhaseVector> {
    let last = *omega_hat.last().ok_or(Error::ZeroReference)?;
    if last == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroReference);
    }
    let angles: Vec<f64> = omega_hat[..omega_hat.len() - 1]
        .iter()
        .map(|z| (z / last).arg())
        .collect();
    Ok(PhaseVector::from_angles(&angles))
}

/// Rounds `W` to phases: the principal eigenvector and
/// `randomization_samples` draws from `CN(0, W)` are mapped to unit
/// modulus, and the candidate with the largest unclamped `min_j G_j` at
/// powers `p` wins (earliest on ties).
pub fn gaussian_randomization(
    w: &PsdMatrix,
    eff: &EffectiveChannels,
    p: &PowerVector,
    params: &SystemParams,
    seed: u64,
) -> Result<PhaseVector> {
    let m = eff.dim();
    if w.matrix().dim() != m {
        return Err(Error::Dimension("W does not match the channels".into()));
    }
    let eig = hermitian_eigen(w.matrix())?;
    // eigenvalues at rounding level count as zero
    let floor = 1e-12 * eig.max_value().max(0.0);
    let scale: Vec<f64> = eig
        .values
        .iter()
        .map(|&l| if l > floor { l.sqrt() } else { 0.0 })
        .collect();

    let mut best: Option<(f64, PhaseVector)> = None;
    let mut consider = |v: &[Complex64]| {
        if let Ok(omega) = recover_phases(v) {
            let score = GainTable::from_phases(eff, &omega).min_unclamped(p.as_slice(), params);
            if score.is_finite() && best.as_ref().is_none_or(|(b, _)| score > *b) {
                best = Some((score, omega));
            }
        }
    };

    consider(&eig.vector(m - 1));
    let mut rng = stream_rng(seed, RANDOMIZATION_STREAM);
    let mut v = alloc::vec![Complex64::new(0.0, 0.0); m];
    for _ in 0..params.randomization_samples {
        let z: Vec<Complex64> = (0..m)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * FRAC_1_SQRT_2
            })
            .collect();
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = (0..m).map(|k| eig.vectors[(i, k)] * scale[k] * z[k]).sum();
        }
        consider(&v);
    }
    best.map(|(_, o)| o)
        .ok_or_else(|| Error::Domain("every randomization candidate".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_effective, sample_channels};
    use crate::geometry::{place_nodes, ConfigLabel, Geometry, Point, ScenarioConfig};
    use crate::linalg::CMatrix;
    use crate::power_opt::fp_loop;
    use crate::rates::test_instance;
    use alloc::vec;

    fn quick(mut params: SystemParams) -> SystemParams {
        params.randomization_samples = 20;
        params
    }

    #[test]
    fn recover_phases_normalizes() {
        let omega = PhaseVector::from_angles(&[0.3, -1.2, 2.0]);
        let same = recover_phases(omega.as_slice()).unwrap();
        for (a, b) in same.as_slice().iter().zip(omega.as_slice()) {
            assert!((a - b).norm() < 1e-14);
        }
        let c = Complex64::from_polar(3.7, 0.9);
        let scaled: Vec<Complex64> = omega.as_slice().iter().map(|z| z * c).collect();
        let again = recover_phases(&scaled).unwrap();
        for (a, b) in again.as_slice().iter().zip(omega.as_slice()) {
            assert!((a - b).norm() < 1e-14);
        }
        assert_eq!(
            recover_phases(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]),
            Err(Error::ZeroReference)
        );
    }

    #[test]
    fn rank_one_w_returns_its_phases() {
        let (eff, params) = test_instance(4, ConfigLabel::C1, 3);
        let omega = PhaseVector::from_angles(&[0.1, 2.2, -0.7, 1.4]);
        let p = PowerVector::uniform(4, params.p_max);
        let got = gaussian_randomization(&PsdMatrix::rank_one(&omega), &eff, &p, &quick(params), 5)
            .unwrap();
        for (a, b) in got.as_slice().iter().zip(omega.as_slice()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn single_sample_is_reproducible() {
        let (eff, mut params) = test_instance(3, ConfigLabel::C2, 3);
        params.randomization_samples = 1;
        let w = PsdMatrix::new(CMatrix::identity(4)).unwrap();
        let p = PowerVector::uniform(4, params.p_max);
        let a = gaussian_randomization(&w, &eff, &p, &params, 9).unwrap();
        let b = gaussian_randomization(&w, &eff, &p, &params, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn null_irs_reduces_to_power_only() {
        let mut params = SystemParams::reference(3, 2);
        params.eps1 = f64::MIN_POSITIVE;
        params.eps3 = f64::MIN_POSITIVE;
        params.fp_max_iter = 3;
        params.outer_max_iter = 3;
        params.sca_max_iter = 2;
        let g =
            place_nodes(&ScenarioConfig::named(ConfigLabel::C1, params.clone()).unwrap()).unwrap();
        let chs = sample_channels(&g, &params, 11).unwrap();
        let bare = build_effective(&chs.without_irs());
        let ao = run_algorithm1(&bare, &quick(params.clone()), 11).unwrap();
        let mut solo = params.clone();
        solo.fp_max_iter = 9;
        let fp = fp_loop(&bare, &ao.omega, None, &solo).unwrap();
        for (a, b) in ao.powers.as_slice().iter().zip(fp.p_hat.as_slice()) {
            assert!((a - b).abs() <= 1e-6 * params.p_max);
        }
        assert!((ao.rates.min_secrecy - fp.current()).abs() <= 1e-6);
    }

    #[test]
    fn deterministic_and_consistent() {
        let (eff, params) = test_instance(4, ConfigLabel::C1, 21);
        let params = quick(params);
        let a = run_algorithm1(&eff, &params, 4).unwrap();
        let b = run_algorithm1(&eff, &params, 4).unwrap();
        assert_eq!(a.omega, b.omega);
        assert_eq!(a.powers, b.powers);
        assert_eq!(a.outer_trace, b.outer_trace);
        assert!(a.powers.within(params.p_min, params.p_max, 1e-12));
        for w in a.outer_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-6, "{:?}", a.outer_trace);
        }
        assert_eq!(
            a.recovery_gap,
            a.relaxation_objective - a.rates.min_unclamped
        );
        let direct = GainTable::from_phases(&eff, &a.omega).breakdown(a.powers.as_slice(), &params);
        assert_eq!(direct, a.rates);
    }

    #[test]
    fn global_phase_of_start_is_irrelevant() {
        let (eff, params) = test_instance(3, ConfigLabel::C3, 2);
        let params = quick(params);
        let omega = initial_phases(3, 2);
        let c = Complex64::from_polar(1.0, 1.1);
        let rotated: Vec<Complex64> = omega.as_slice().iter().map(|z| z * c).collect();
        let a = run_algorithm1_from(&eff, &params, PsdMatrix::rank_one(&omega), 2).unwrap();
        let w = PsdMatrix::new(CMatrix::outer(&rotated)).unwrap();
        let b = run_algorithm1_from(&eff, &params, w, 2).unwrap();
        assert!((a.rates.min_secrecy - b.rates.min_secrecy).abs() <= 1e-9);
    }

    /// Exhaustive single-phase oracle at fixed powers.
    fn best_angle(eff: &EffectiveChannels, p: &PowerVector, params: &SystemParams) -> f64 {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for k in 0..36_000 {
            let a = k as f64 * TAU / 36_000.0;
            let v = GainTable::from_phases(eff, &PhaseVector::from_angles(&[a]))
                .min_unclamped(p.as_slice(), params);
            if v > best.0 {
                best = (v, a);
            }
        }
        best.1
    }

    fn angle_diff(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(TAU);
        d.min(TAU - d)
    }

    #[test]
    fn single_element_phase_matches_grid() {
        let mut params = quick(SystemParams::reference(1, 1));
        params.eps2 = 1e-9;
        params.sca_max_iter = 500;
        let geom = Geometry::new(
            vec![(Point::new(0.0, 0.0), Point::new(30.0, 0.0))],
            Point::new(28.0, 6.0),
            Point::new(15.0, 5.0),
        );
        for seed in 0..5 {
            let eff = build_effective(&sample_channels(&geom, &params, seed).unwrap());
            let p = PowerVector::uniform(2, params.p_max);
            let st = sca_loop(
                &eff,
                &p,
                PsdMatrix::rank_one(&initial_phases(1, seed)),
                &params,
            )
            .unwrap();
            let omega = gaussian_randomization(&st.w_hat, &eff, &p, &params, seed).unwrap();
            let got = omega.angles()[0];
            let want = best_angle(&eff, &p, &params);
            assert!(
                angle_diff(got, want) <= 5f64.to_radians(),
                "seed {seed}: {got} vs {want}"
            );
        }
    }
}
