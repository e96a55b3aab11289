use orgsim::ant::{AntConfig, RandomFood, Strategy};
use orgsim::engine::{LogMode, World};
use orgsim::retail::{Manager, RetailConfig};
use orgsim::team::{Policy, TeamConfig};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn colony_keeps_its_food_and_trail(
        seed in any::<u64>(),
        tandem in any::<bool>(),
        n_ants in 1u32..30,
        rho in 0.0f64..=1.0,
        explore in 0.0f64..=1.0,
    ) {
        let mut c = AntConfig::default();
        c.grid.width = 15;
        c.grid.height = 12;
        c.random_food = Some(RandomFood { count: 3, units: 7 });
        c.params.n_ants = n_ants;
        c.params.evaporation_rate = rho;
        c.params.exploration_prob = explore;
        c.params.strategy = if tandem { Strategy::TandemRecruitment } else { Strategy::MassRecruitment };
        let mut w = World::new(c.build(seed).unwrap(), seed, LogMode::CountsOnly);
        for _ in 0..600 {
            w.tick();
            let bad = w.model().invariant_violations();
            prop_assert!(bad.is_empty(), "tick {}: {:?}", w.tick_count(), bad);
        }
    }

    #[test]
    fn store_accounts_for_every_customer(
        seed in any::<u64>(),
        staff in 0u32..7,
        lambda in 0.0f64..2.0,
        review in 1u64..20,
    ) {
        let mut c = RetailConfig::default().with_uniform_staff(staff, 0.5, 0.5);
        c.params.arrival_rate = lambda;
        c.manager = Some(Manager { review_period: review, min_staff_floor: 0, department: 0 });
        let mut w = World::new(c.build().unwrap(), seed, LogMode::CountsOnly);
        for _ in 0..600 {
            w.tick();
            let bad = w.model().invariant_violations();
            prop_assert!(bad.is_empty(), "tick {}: {:?}", w.tick_count(), bad);
        }
    }

    #[test]
    fn trust_stays_in_bounds(
        seed in any::<u64>(),
        gated in any::<bool>(),
        drop in any::<bool>(),
        up in 0.0f64..=1.0,
        down in 0.0f64..=1.0,
    ) {
        let mut c = TeamConfig::default();
        c.params.policy = if gated { Policy::Gatewayed } else { Policy::AnyToAny };
        c.params.trust_drop = drop;
        c.params.trust_up = up;
        c.params.trust_down = down;
        let mut w = World::new(c.build(seed).unwrap(), seed, LogMode::CountsOnly);
        for _ in 0..300 {
            w.tick();
            let bad = w.model().invariant_violations();
            prop_assert!(bad.is_empty(), "tick {}: {:?}", w.tick_count(), bad);
        }
    }
}
