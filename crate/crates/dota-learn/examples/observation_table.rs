//! Drive the observation table by hand and print its symbolic cells.
//!
//! `cargo run --example observation_table`

use dota_learn::model::Model;
use dota_learn::reference::delay_window;
use dota_learn::table::{valid_reset_combinations, ObservationTable, TableDump, TableOptions};
use dota_learn::teacher::SimulatedTeacher;
use dota_learn::word::TimedWord;

fn main() -> dota_learn::error::Result<()> {
    let mut teacher = SimulatedTeacher::new(Model::Dota(delay_window()));
    let alphabet = ["a".to_string()];
    let w = |s: &str| TimedWord::parse(s, &alphabet).unwrap();

    let mut table = ObservationTable::new(&mut teacher, TableOptions::default())?;
    table.move_to_s(&mut teacher)?;
    for ctx in ["(a,4)", "(a,9.5)", "(a,4)(a,5.5)"] {
        table.process_counterexample(&mut teacher, &w(ctx))?;
    }
    table.add_suffix(&mut teacher, w("(a,5.5)"))?;

    println!("{}", TableDump::of(&table));
    println!("valid last-reset pairs for (a,4) vs (a,4)(a,5.5): {:?}",
        valid_reset_combinations(&w("(a,4)"), &w("(a,4)(a,5.5)")));

    let (x, y) = (table.find(&w("(a,4)")).unwrap(), table.find(&w("(a,4)(a,5.5)")).unwrap());
    for (i, j) in table.combinations(x, y) {
        println!("  f(b{x}, b{y}, {i}, {j}) = {}", table.f(x, y, i, j));
    }
    println!("certainly distinct: {}", table.certainly_distinct(x, y));
    Ok(())
}
