use irsec::scenario::{parse, render, Scenario};
use irsec_core::baselines::BaselineKind;
use irsec_core::geometry::{ConfigLabel, Point};
use irsec_core::params::TrustRadius;
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -500.0..500.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_then_parse_is_identity(
        lab in prop::sample::select(ConfigLabel::NAMED.to_vec()),
        ax in coord(), ay in coord(),
        l_values in prop::collection::vec(1usize..64, 1..5),
        realizations in 1usize..500,
        seed in any::<u64>(),
        p_max in 2e-3..1.0f64,
        sigma2 in 1e-16..1e-10f64,
        xi in prop::option::of(0.01..3.0f64),
        baselines in prop::sample::subsequence(BaselineKind::ALL.to_vec(), 0..=8),
    ) {
        let mut s = Scenario::named(lab).unwrap();
        s.config.users[0].0 = Point::new(ax, ay);
        s.config.params.p_max = p_max;
        s.config.params.sigma2 = sigma2;
        if let Some(x) = xi {
            s.config.params.trust_radius = TrustRadius::Fixed(x);
        }
        s.run.l_values = l_values;
        s.run.realizations = realizations;
        s.run.seed = seed;
        s.run.baselines = baselines;
        prop_assert_eq!(parse(&render(&s)).unwrap(), s);
    }

    #[test]
    fn unknown_keys_are_reported_at_their_line(junk in "[a-z]{3,8}_x", pad in 0usize..5) {
        let text = format!("{}[params]\nN = 2\n{junk} = 1\n", "\n".repeat(pad));
        let err = parse(&text).unwrap_err().to_string();
        prop_assert!(err.contains(&format!("line {}", pad + 3)), "{}", err);
    }
}
