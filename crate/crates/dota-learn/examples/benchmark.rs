//! Random targets and a small learning batch.
//!
//! `cargo run --release --example benchmark [group] [count]`

use dota_learn::bench::{generate_random_dota, run_benchmark, BenchReport, GenParams};
use dota_learn::learner::LearnerOptions;
use dota_learn::model::Model;

fn main() -> dota_learn::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let group = args.next().unwrap_or_else(|| "4_2_5".into());
    let count: usize = args.next().and_then(|c| c.parse().ok()).unwrap_or(5);
    let params = GenParams::from_group(&group, 42)?;

    let sample = generate_random_dota(&params)?;
    println!("first target of {group}:\n{}", Model::Dota(sample).to_json());

    let report = run_benchmark(&params, count, &LearnerOptions::default(), 0);
    println!("{}\n{}", BenchReport::CSV_HEADER, report.csv_row());
    for r in &report.instances {
        println!(
            "seed {:>3}: verified {}  mq {:>6}  eq {:>3}  locations {}  {:.3}s",
            r.seed, r.verified, r.membership, r.equivalence, r.learned_locations, r.wall_time
        );
    }
    Ok(())
}
