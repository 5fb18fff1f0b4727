//! Exact language equivalence and shortest counterexamples.
//!
//! `cargo run --example equivalence`

use dota_learn::dota::{Dota, Transition};
use dota_learn::guard::GuardInterval;
use dota_learn::oracle::dota_counterexample;
use dota_learn::reference::delay_window;

fn main() -> dota_learn::error::Result<()> {
    let a = delay_window();
    println!("self-check: {:?}", dota_counterexample(&a, &a)?);

    // Same automaton with the first guard boundary moved from 4 to 3.
    let moved: Vec<Transition> = a
        .transitions()
        .iter()
        .map(|t| {
            let mut t = *t;
            if t.source == 0 && t.guard.to_string() == "[0,4)" {
                t.guard = GuardInterval::new(0, true, Some(3), false).unwrap();
            } else if t.source == 0 && t.guard.to_string() == "[4,9]" {
                t.guard = GuardInterval::new(3, true, Some(9), true).unwrap();
            }
            t
        })
        .collect();
    let b = Dota::new(
        a.alphabet().to_vec(),
        a.locations().to_vec(),
        a.initial(),
        a.accepting().to_vec(),
        a.sink(),
        moved,
    )?;

    match dota_counterexample(&a, &b)? {
        None => println!("equivalent"),
        Some(w) => {
            let shown = w.display(a.alphabet());
            println!("counterexample {shown}: original {}, moved {}", a.accepts(&w)?, b.accepts(&w)?);
        }
    }
    Ok(())
}
