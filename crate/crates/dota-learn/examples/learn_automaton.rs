//! Learn the bundled three-location reference automaton from an exact teacher.
//!
//! `cargo run --example learn_automaton [model.json]`

use dota_learn::learner::{learn, LearnerOptions};
use dota_learn::model::Model;
use dota_learn::oracle::model_counterexample;
use dota_learn::reference::delay_window;
use dota_learn::teacher::{SimulatedTeacher, Teacher};

fn main() -> dota_learn::error::Result<()> {
    let target = match std::env::args().nth(1) {
        Some(path) => Model::load(path)?,
        None => Model::Dota(delay_window()),
    };
    let mut teacher = SimulatedTeacher::new(target.clone());
    let outcome = learn(&mut teacher, &LearnerOptions::default())?;

    println!("{}", outcome.model.to_json());
    let s = &outcome.stats;
    println!(
        "locations {}  membership {}  equivalence {}  iterations {}  N {}",
        s.locations, s.membership, s.equivalence, s.iterations, s.final_n
    );
    println!("cache hits {}", teacher.stats().cache_hits);
    // Independent check, outside the teacher's own bookkeeping.
    assert!(model_counterexample(&target, &outcome.model)?.is_none());
    println!("equivalent to the target");
    Ok(())
}
