//! Guard partitions and watching every hypothesis the learner builds.
//!
//! `cargo run --example hypothesis`

use dota_learn::hypothesis::partition;
use dota_learn::learner::{learn_observed, LearnerOptions};
use dota_learn::model::Model;
use dota_learn::rational::Rational;
use dota_learn::reference::delay_window;
use dota_learn::teacher::SimulatedTeacher;

fn main() -> dota_learn::error::Result<()> {
    let values: Vec<Rational> = ["0", "4", "5.5", "9.5"].iter().map(|s| s.parse().unwrap()).collect();
    let guards: Vec<String> = partition(&values)?.iter().map(ToString::to_string).collect();
    println!("partition of {values:?}: {}", guards.join(" "));

    let mut teacher = SimulatedTeacher::new(Model::Dota(delay_window()));
    let mut seen = 0;
    let outcome = learn_observed(&mut teacher, &LearnerOptions::default(), &mut |view| {
        seen += 1;
        let s = view.table.sizes();
        println!(
            "hypothesis {seen}: {} locations from |S|={} |S+|={} |R|={} |E|={}",
            view.hypothesis.location_count(),
            s.0, s.1, s.2, s.3
        );
    })?;
    println!("final: {} locations", outcome.model.location_count());
    Ok(())
}
