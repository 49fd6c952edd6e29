//! Reference schemes: random phases, no IRS, exhaustive power searches.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::Rng;

use crate::channel::{build_effective, ChannelSet, EffectiveChannels};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::power_opt::fp_loop_gains;
use crate::rates::{GainTable, PhaseVector, PowerVector, RateBreakdown};
use crate::seed::{stream_rng, BASELINE_PHASE_STREAM};

/// Largest lattice accepted by [`grid_search_power`].
pub const GRID_LIMIT: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaselineKind {
    RandomPhaseOptPower,
    RandomPhasePmax,
    RandomPhasePmin,
    NoIrsOptPower,
    NoIrsPmax,
    NoIrsPmin,
    GridSearchPower,
    CornerSearchPower,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 8] = [
        Self::RandomPhaseOptPower,
        Self::RandomPhasePmax,
        Self::RandomPhasePmin,
        Self::NoIrsOptPower,
        Self::NoIrsPmax,
        Self::NoIrsPmin,
        Self::GridSearchPower,
        Self::CornerSearchPower,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::RandomPhaseOptPower => "random_phase_opt_power",
            Self::RandomPhasePmax => "random_phase_pmax",
            Self::RandomPhasePmin => "random_phase_pmin",
            Self::NoIrsOptPower => "no_irs_opt_power",
            Self::NoIrsPmax => "no_irs_pmax",
            Self::NoIrsPmin => "no_irs_pmin",
            Self::GridSearchPower => "grid_search_power",
            Self::CornerSearchPower => "corner_search_power",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
    }

    /// Power mode of the random-phase and no-IRS schemes.
    pub fn power_mode(self) -> Option<PowerMode> {
        match self {
            Self::RandomPhaseOptPower | Self::NoIrsOptPower => Some(PowerMode::Optimized),
            Self::RandomPhasePmax | Self::NoIrsPmax => Some(PowerMode::Pmax),
            Self::RandomPhasePmin | Self::NoIrsPmin => Some(PowerMode::Pmin),
            Self::GridSearchPower | Self::CornerSearchPower => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMode {
    Optimized,
    Pmax,
    Pmin,
}

/// Uniform random phases from the baseline stream of `seed`.
pub fn random_phases(l: usize, seed: u64) -> PhaseVector {
    let mut rng = stream_rng(seed, BASELINE_PHASE_STREAM);
    let angles: Vec<f64> = (0..l).map(|_| rng.random::<f64>() * TAU).collect();
    PhaseVector::from_angles(&angles)
}

fn with_powers(g: &GainTable, params: &SystemParams, mode: PowerMode) -> Result<RateBreakdown> {
    let users = g.users();
    let p = match mode {
        PowerMode::Pmax => PowerVector::uniform(users, params.p_max),
        PowerMode::Pmin => PowerVector::uniform(users, params.p_min),
        PowerMode::Optimized => {
            fp_loop_gains(g, PowerVector::uniform(users, params.p_max), params)?.p_hat
        }
    };
    Ok(g.breakdown(p.as_slice(), params))
}

/// Random phases drawn once, powers per `mode`.
pub fn random_phase_baseline(
    eff: &EffectiveChannels,
    params: &SystemParams,
    seed: u64,
    mode: PowerMode,
) -> Result<RateBreakdown> {
    let omega = random_phases(eff.irs_elements(), seed);
    with_powers(&GainTable::from_phases(eff, &omega), params, mode)
}

/// Direct links only, powers per `mode`.
pub fn no_irs_baseline(
    chs: &ChannelSet,
    params: &SystemParams,
    mode: PowerMode,
) -> Result<RateBreakdown> {
    let eff = build_effective(&chs.without_irs());
    let omega = PhaseVector::from_angles(&vec![0.0; eff.irs_elements()]);
    with_powers(&GainTable::from_phases(&eff, &omega), params, mode)
}

/// Exhaustive search of `min_j C_j` over `Q` evenly spaced powers per user
/// (both box ends included). Ties go to the lowest lattice index, with user 0
/// as the most significant digit.
pub fn grid_search_power(
    eff: &EffectiveChannels,
    omega: &PhaseVector,
    params: &SystemParams,
    q: usize,
) -> Result<(PowerVector, f64)> {
    grid_search_gains(&GainTable::from_phases(eff, omega), params, q)
}

pub fn grid_search_gains(
    g: &GainTable,
    params: &SystemParams,
    q: usize,
) -> Result<(PowerVector, f64)> {
    let n = g.users();
    if q < 2 {
        return Err(Error::InvalidParams(format!("grid needs Q >= 2, got {q}")));
    }
    let points = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if points > GRID_LIMIT {
        return Err(Error::GridTooLarge {
            points,
            limit: GRID_LIMIT,
        });
    }
    let step = (params.p_max - params.p_min) / (q - 1) as f64;
    let levels: Vec<f64> = (0..q)
        .map(|k| {
            if k == q - 1 {
                params.p_max
            } else {
                params.p_min + k as f64 * step
            }
        })
        .collect();
    let mut digits = vec![0usize; n];
    let mut p: Vec<f64> = vec![levels[0]; n];
    let mut best = (p.clone(), f64::NEG_INFINITY);
    loop {
        let v = g.min_secrecy(&p, params);
        if v > best.1 {
            best = (p.clone(), v);
        }
        // odometer, last user fastest
        let mut u = n;
        loop {
            if u == 0 {
                return Ok((PowerVector::new(best.0)?, best.1));
            }
            u -= 1;
            digits[u] += 1;
            if digits[u] < q {
                p[u] = levels[digits[u]];
                break;
            }
            digits[u] = 0;
            p[u] = levels[0];
        }
    }
}

/// Best of the four corners `{P_min, P_max}²` for a single pair.
pub fn corner_search_power(
    eff: &EffectiveChannels,
    omega: &PhaseVector,
    params: &SystemParams,
) -> Result<(PowerVector, f64)> {
    if eff.pairs() != 1 {
        return Err(Error::CornerSearchPairs(eff.pairs()));
    }
    grid_search_power(eff, omega, params, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_channels;
    use crate::geometry::{ConfigLabel, Geometry, Point};
    use crate::power_opt::fp_loop;
    use crate::rates::test_instance;

    fn single_pair(l: usize, seed: u64) -> (ChannelSet, SystemParams) {
        let params = SystemParams::reference(l, 1);
        let g = Geometry::new(
            vec![(Point::new(0.0, 0.0), Point::new(40.0, 0.0))],
            Point::new(20.0, 30.0),
            Point::new(35.0, 8.0),
        );
        (sample_channels(&g, &params, seed).unwrap(), params)
    }

    /// Independent corner oracle: evaluates the four corners directly.
    fn corners_oracle(g: &GainTable, params: &SystemParams) -> f64 {
        let (lo, hi) = (params.p_min, params.p_max);
        [[lo, lo], [lo, hi], [hi, lo], [hi, hi]]
            .iter()
            .map(|p| g.min_secrecy(p, params))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn q2_is_corner_enumeration() {
        for seed in 0..10 {
            let (chs, params) = single_pair(3, seed);
            let eff = build_effective(&chs);
            let omega = random_phases(3, seed);
            let (p, v) = corner_search_power(&eff, &omega, &params).unwrap();
            let g = GainTable::from_phases(&eff, &omega);
            assert_eq!(v, corners_oracle(&g, &params));
            assert_eq!(g.min_secrecy(p.as_slice(), &params), v);
        }
    }

    #[test]
    fn corner_dominates_q25_lattice() {
        for seed in 0..10 {
            let (chs, params) = single_pair(4, 50 + seed);
            let eff = build_effective(&chs);
            let omega = random_phases(4, seed);
            let (_, corner) = corner_search_power(&eff, &omega, &params).unwrap();
            let (_, grid) = grid_search_power(&eff, &omega, &params, 25).unwrap();
            assert!(corner >= grid - 1e-12, "corner {corner} grid {grid}");
        }
    }

    #[test]
    fn finer_lattices_dominate() {
        let (eff, params) = test_instance(3, ConfigLabel::C1, 8);
        let omega = random_phases(3, 8);
        let mut last = f64::NEG_INFINITY;
        // nested lattices: Q - 1 divides the next Q - 1
        for q in [3, 5, 9, 17] {
            let (_, v) = grid_search_power(&eff, &omega, &params, q).unwrap();
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn guards() {
        let (eff, params) = test_instance(2, ConfigLabel::C1, 1);
        let omega = random_phases(2, 1);
        assert!(matches!(
            grid_search_power(&eff, &omega, &params, 101),
            Err(Error::GridTooLarge { .. })
        ));
        assert!(grid_search_power(&eff, &omega, &params, 1).is_err());
        assert_eq!(
            corner_search_power(&eff, &omega, &params),
            Err(Error::CornerSearchPairs(2))
        );
    }

    fn zero() -> crate::Complex64 {
        crate::Complex64::new(0.0, 0.0)
    }

    #[test]
    fn eve_blind_prefers_full_power() {
        let (chs, params) = single_pair(2, 3);
        let blind = ChannelSet::from_parts(
            2,
            vec![zero(), chs.direct(0, 1), chs.direct(1, 0), zero()],
            vec![chs.user_irs(0).to_vec(), chs.user_irs(1).to_vec()],
            vec![zero(); 2],
            vec![zero(); 2],
        )
        .unwrap();
        let eff = build_effective(&blind);
        let (p, _) = corner_search_power(&eff, &random_phases(2, 3), &params).unwrap();
        assert_eq!(p.as_slice(), [params.p_max, params.p_max]);
    }

    #[test]
    fn zeroed_cascades_make_phases_irrelevant() {
        let params = SystemParams::reference(4, 2);
        let geom = crate::geometry::place_nodes(
            &crate::geometry::ScenarioConfig::named(ConfigLabel::C2, params.clone()).unwrap(),
        )
        .unwrap();
        let chs = sample_channels(&geom, &params, 4).unwrap();
        let bare = build_effective(&chs.without_irs());
        for mode in [PowerMode::Pmax, PowerMode::Pmin, PowerMode::Optimized] {
            let a = random_phase_baseline(&bare, &params, 17, mode).unwrap();
            let b = no_irs_baseline(&chs, &params, mode).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn dead_network_has_zero_rates() {
        let params = SystemParams::reference(2, 1);
        let dead = ChannelSet::from_parts(
            2,
            vec![zero(); 4],
            vec![vec![zero(); 2]; 2],
            vec![zero(); 2],
            vec![zero(); 2],
        )
        .unwrap();
        let r = no_irs_baseline(&dead, &params, PowerMode::Pmax).unwrap();
        assert!(r
            .pairs
            .iter()
            .all(|p| p.rate_a == 0.0 && p.rate_b == 0.0 && p.leakage == 0.0));
        assert_eq!(r.min_secrecy, 0.0);
    }

    #[test]
    fn fp_close_to_corners_for_one_pair() {
        for seed in 0..10 {
            let (chs, params) = single_pair(4, 200 + seed);
            let eff = build_effective(&chs);
            let omega = random_phases(4, seed);
            let (_, corner) = corner_search_power(&eff, &omega, &params).unwrap();
            let st = fp_loop(&eff, &omega, None, &params).unwrap();
            let got = st.current();
            assert!(got >= corner * 0.99 - 1e-12, "fp {got} corner {corner}");
        }
    }

    #[test]
    fn fp_close_to_grid_for_two_pairs() {
        for seed in 0..4 {
            let (eff, params) = test_instance(4, ConfigLabel::NAMED[seed as usize], seed);
            let omega = random_phases(4, seed);
            let (_, grid) = grid_search_power(&eff, &omega, &params, 12).unwrap();
            let st = fp_loop(&eff, &omega, None, &params).unwrap();
            assert!(
                st.current() >= grid * 0.98 - 1e-12,
                "fp {} grid {grid}",
                st.current()
            );
        }
    }
}
