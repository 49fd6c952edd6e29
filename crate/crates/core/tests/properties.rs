use irsec_core::baselines::grid_search_gains;
use irsec_core::channel::{build_effective, sample_channels, EffectiveChannels};
use irsec_core::geometry::{place_nodes, ConfigLabel, Point, ScenarioConfig};
use irsec_core::linalg::CMatrix;
use irsec_core::metrics::{fractional_increase, pad_trace};
use irsec_core::params::SystemParams;
use irsec_core::power_opt::{fp_loop_gains, surrogate_f, update_aux, AuxVars};
use irsec_core::rates::{
    trace_form_g, trace_form_terms, GainTable, PhaseVector, PowerVector, PsdMatrix,
};
use irsec_core::Complex64;
use proptest::prelude::*;

fn instance(l: usize, label: ConfigLabel, seed: u64) -> (EffectiveChannels, SystemParams) {
    let params = SystemParams::reference(l, 2);
    let cfg = ScenarioConfig::named(label, params.clone()).unwrap();
    let chs = sample_channels(&place_nodes(&cfg).unwrap(), &params, seed).unwrap();
    (build_effective(&chs), params)
}

fn label() -> impl Strategy<Value = ConfigLabel> {
    prop::sample::select(ConfigLabel::NAMED.to_vec())
}

fn angles(l: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..std::f64::consts::TAU, l)
}

fn fractions(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=1.0f64, n)
}

fn in_box(fr: &[f64], params: &SystemParams) -> Vec<f64> {
    fr.iter()
        .map(|f| params.p_min + f * (params.p_max - params.p_min))
        .collect()
}

/// `sum_k v_k v_k†` rescaled to unit diagonal.
fn psd(dim: usize, vs: &[Vec<f64>]) -> CMatrix {
    let mut w = CMatrix::zeros(dim);
    for v in vs {
        let u: Vec<Complex64> = (0..dim)
            .map(|i| Complex64::new(v[2 * i], v[2 * i + 1]))
            .collect();
        w.add_outer(1.0, &u);
    }
    let d: Vec<f64> = w.diag_re().iter().map(|x| 1.0 / x.sqrt()).collect();
    CMatrix::from_fn(dim, |i, j| w.as_slice()[i * dim + j] * d[i] * d[j])
}

fn gaussian_rows(dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 2 * dim), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distance_is_a_metric(pts in prop::collection::vec((-100.0..100.0f64, -100.0..100.0f64), 3)) {
        let p: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x, y)).collect();
        prop_assert_eq!(p[0].distance(&p[1]), p[1].distance(&p[0]));
        prop_assert!(p[0].distance(&p[2]) <= p[0].distance(&p[1]) + p[1].distance(&p[2]) + 1e-9);
    }

    #[test]
    fn gram_quadratic_form_matches_gain(lab in label(), seed in 0u64..1000, a in angles(4)) {
        let (eff, _) = instance(4, lab, seed);
        let omega = PhaseVector::from_angles(&a);
        for x in 0..eff.users() {
            for y in 0..=eff.users() {
                if x == y {
                    continue;
                }
                let direct = eff.gain(x, y, omega.as_slice());
                let quad = eff.gram(x, y).quad_form(omega.as_slice());
                prop_assert!((direct - quad).abs() <= 1e-12 * direct.max(f64::MIN_POSITIVE), "{direct} vs {quad}");
            }
        }
    }

    #[test]
    fn trace_form_agrees_with_phase_form(lab in label(), seed in 0u64..1000, a in angles(3), fr in fractions(4)) {
        let (eff, params) = instance(3, lab, seed);
        let omega = PhaseVector::from_angles(&a);
        let p = PowerVector::new(in_box(&fr, &params)).unwrap();
        let rates = GainTable::from_phases(&eff, &omega).breakdown(p.as_slice(), &params);
        let w = PsdMatrix::rank_one(&omega);
        for j in 1..=2 {
            let g = trace_form_g(&eff, &p, &w, j, &params).unwrap();
            prop_assert!((g - rates.pairs[j - 1].unclamped).abs() <= 1e-9);
        }
    }

    #[test]
    fn rates_ignore_global_phase(lab in label(), seed in 0u64..1000, a in angles(3), nu in 0.0..std::f64::consts::TAU, fr in fractions(4)) {
        let (eff, params) = instance(3, lab, seed);
        let omega = PhaseVector::from_angles(&a);
        let rot = Complex64::from_polar(1.0, nu);
        let turned: Vec<Complex64> = omega.as_slice().iter().map(|w| w * rot).collect();
        let p = in_box(&fr, &params);
        let base = GainTable::from_phases(&eff, &omega).breakdown(&p, &params);
        let other = GainTable::from_relaxed(&eff, &CMatrix::outer(&turned)).breakdown(&p, &params);
        for (x, y) in base.pairs.iter().zip(&other.pairs) {
            prop_assert!((x.unclamped - y.unclamped).abs() <= 1e-12 * (1.0 + x.unclamped.abs()));
        }
    }

    #[test]
    fn q_and_s_are_concave(lab in label(), seed in 0u64..1000, r1 in gaussian_rows(4), r2 in gaussian_rows(4), fr in fractions(4)) {
        let (eff, params) = instance(3, lab, seed);
        let p = PowerVector::new(in_box(&fr, &params)).unwrap();
        let w1 = psd(4, &r1);
        let w2 = psd(4, &r2);
        let mut mid = w1.scaled(0.5);
        mid.add_scaled(0.5, &w2);
        for j in 1..=2 {
            let t = |w: &CMatrix| trace_form_terms(&eff, &p, &PsdMatrix::new(w.clone()).unwrap(), j, &params).unwrap();
            let (a, b, m) = (t(&w1), t(&w2), t(&mid));
            prop_assert!(m.q >= 0.5 * (a.q + b.q) - 1e-10);
            prop_assert!(m.s >= 0.5 * (a.s + b.s) - 1e-10);
        }
    }

    #[test]
    fn surrogate_is_a_tight_lower_bound(
        lab in label(), seed in 0u64..1000, a in angles(3), fr in fractions(4),
        shrink in prop::collection::vec(0.5..1.5f64, 6),
    ) {
        let (eff, params) = instance(3, lab, seed);
        let omega = PhaseVector::from_angles(&a);
        let p = PowerVector::new(in_box(&fr, &params)).unwrap();
        let rates = GainTable::from_phases(&eff, &omega).breakdown(p.as_slice(), &params);
        let tight = update_aux(&eff, &p, &omega, &params);
        let mut moved = AuxVars::zeros(2);
        for j in 0..2 {
            moved.x1[j] = tight.x1[j] * shrink[3 * j];
            moved.x2[j] = tight.x2[j] * shrink[3 * j + 1];
            moved.x3[j] = tight.x3[j] * shrink[3 * j + 2];
        }
        for j in 1..=2 {
            let c = rates.pairs[j - 1].unclamped;
            let at = surrogate_f(&eff, &p, &omega, &tight, j, &params).unwrap();
            prop_assert!((at - c).abs() <= 1e-9 * (1.0 + c.abs()));
            if let Ok(f) = surrogate_f(&eff, &p, &omega, &moved, j, &params) {
                prop_assert!(f <= c + 1e-9 * (1.0 + c.abs()));
            }
        }
    }

    #[test]
    fn pad_keeps_prefix_and_repeats_last(trace in prop::collection::vec(0.0..10.0f64, 1..8), extra in 0usize..5) {
        let padded = pad_trace(&trace, trace.len() + extra);
        prop_assert_eq!(&padded[..trace.len()], &trace[..]);
        prop_assert!(padded[trace.len()..].iter().all(|v| v == trace.last().unwrap()));
    }

    #[test]
    fn fractional_increase_has_the_step_sign(old in 0.0..10.0f64, new in 0.0..10.0f64) {
        let f = fractional_increase(old, new);
        prop_assert_eq!(f > 0.0, new > old);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn fp_stays_in_box_and_ascends(lab in label(), seed in 0u64..1000, a in angles(3), fr in fractions(4)) {
        let (eff, params) = instance(3, lab, seed);
        let g = GainTable::from_phases(&eff, &PhaseVector::from_angles(&a));
        let fp = fp_loop_gains(&g, PowerVector::new(in_box(&fr, &params)).unwrap(), &params).unwrap();
        prop_assert!(fp.p_hat.within(params.p_min, params.p_max, 1e-9));
        for w in fp.unclamped.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-6 * (1.0 + w[0].abs()), "{:?}", fp.unclamped);
        }
    }

    #[test]
    fn finer_power_lattices_never_lose(lab in label(), seed in 0u64..1000, a in angles(2)) {
        let (eff, params) = instance(2, lab, seed);
        let g = GainTable::from_phases(&eff, &PhaseVector::from_angles(&a));
        // nested lattices: every point of the coarser one is on the finer one
        let vals: Vec<f64> = [5, 9, 17].iter().map(|&q| grid_search_gains(&g, &params, q).unwrap().1).collect();
        prop_assert!(vals[1] >= vals[0] - 1e-12 && vals[2] >= vals[1] - 1e-12, "{vals:?}");
    }
}
