//! Mass versus tandem recruitment on one large source and on many small
//! ones.
//!
//! cargo run --release --example ant_strategies [replications]

use orgsim::ant::{foraging_metrics, AntConfig, Coord, FoodSpec, RandomFood, Strategy};
use orgsim::engine::LogMode;
use orgsim::harness::run_model;
use orgsim::harness::stats::{mann_whitney, mean};

fn main() {
    let reps: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20);

    let large = AntConfig {
        food: vec![FoodSpec { cell: Coord::new(37, 33), units: 200 }],
        ..AntConfig::default()
    };
    let small = AntConfig {
        random_food: Some(RandomFood { count: 10, units: 5 }),
        ..AntConfig::default()
    };

    for (label, base) in [("one source of 200", &large), ("ten sources of 5", &small)] {
        println!("{label}, {reps} replications");
        let mut ttd = Vec::new();
        let mut eff = Vec::new();
        for strategy in [Strategy::MassRecruitment, Strategy::TandemRecruitment] {
            let mut c = base.clone();
            c.params.strategy = strategy;
            let (t, e): (Vec<f64>, Vec<f64>) = (1..=reps)
                .map(|seed| {
                    let (run, _) = run_model(c.build(seed).unwrap(), seed, 20_000, 1_000, LogMode::CountsOnly);
                    let m = foraging_metrics(&run);
                    (run.summary["time_to_depletion"], m.efficiency)
                })
                .unzip();
            println!(
                "  {strategy:?}: mean time to depletion {:>8.1}  efficiency {:.5} units/step",
                mean(&t),
                mean(&e)
            );
            ttd.push(t);
            eff.push(e);
        }
        println!(
            "  mass faster: p = {:.3e}   tandem more efficient: p = {:.3e}",
            mann_whitney(&ttd[0], &ttd[1]).p_less,
            mann_whitney(&eff[1], &eff[0]).p_greater
        );
    }
}
