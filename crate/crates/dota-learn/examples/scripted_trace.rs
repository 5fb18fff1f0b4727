//! Replays a fixed list of counterexamples and prints the learner's event log.
//!
//! `cargo run --example scripted_trace`

use dota_learn::learner::{learn, LearnerOptions};
use dota_learn::model::Model;
use dota_learn::reference::{delay_window, delay_window_counterexamples};
use dota_learn::table::TableDump;
use dota_learn::teacher::{ScriptedTeacher, SimulatedTeacher};

fn main() -> dota_learn::error::Result<()> {
    let inner = SimulatedTeacher::new(Model::Dota(delay_window()));
    let mut teacher = ScriptedTeacher::new(inner, delay_window_counterexamples());
    let outcome = learn(&mut teacher, &LearnerOptions::default())?;

    for e in &outcome.trace {
        println!("{:>3}  {:<13} {}", e.iteration, e.event, e.payload);
    }
    println!();
    print!("{}", TableDump::of(&outcome.table));
    println!();
    println!("{}", outcome.model.to_json());
    Ok(())
}
