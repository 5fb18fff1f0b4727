//! Learn a timed Mealy machine: the alternating-bit sender.
//!
//! `cargo run --example learn_mealy`

use dota_learn::learner::{learn_dtmm, LearnerOptions};
use dota_learn::model::Model;
use dota_learn::oracle::dtmm_counterexample;
use dota_learn::reference::alternating_bit_sender;
use dota_learn::teacher::SimulatedTeacher;
use dota_learn::word::TimedWord;

fn main() -> dota_learn::error::Result<()> {
    let target = alternating_bit_sender();
    let mut teacher = SimulatedTeacher::new(Model::Dtmm(target.clone()));
    let (learned, stats) = learn_dtmm(&mut teacher, &LearnerOptions::default())?;

    println!("{}", Model::Dtmm(learned.clone()).to_json());
    println!("{} locations, {} membership, {} equivalence", learned.locations().len(), stats.membership, stats.equivalence);

    let w = TimedWord::parse("(in,2)(ack0,1)(in,0.5)(void,10)", target.inputs())?;
    println!("{}  ->  {:?}", w.display(target.inputs()), learned.run_named(&w)?);
    assert_eq!(learned.run_named(&w)?, target.run_named(&w)?);
    assert!(dtmm_counterexample(&target, &learned.complete_with_void_loops())?.is_none());
    Ok(())
}
