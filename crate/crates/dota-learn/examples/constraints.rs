//! Encode table readiness as clauses, solve them, and export SMT-LIB.
//!
//! `cargo run --example constraints [path/to/smt-solver]`
//! With a solver path (e.g. `z3`), the same system is also solved externally.

use dota_learn::constraints::{assemble, build_c2, export_smtlib, InternalSolver, Overlay, SmtLibSolver, SolverBackend};
use dota_learn::model::Model;
use dota_learn::reference::delay_window;
use dota_learn::table::{ObservationTable, TableOptions};
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
    table.set_n(3);

    let sys = assemble(&table, build_c2(&table).clauses).expect("|S| <= N");
    println!("{} base clauses over {} reset and {} location variables", sys.base.len(), sys.resets, sys.locations);
    for c in sys.base.iter().take(8) {
        println!("  {c}");
    }

    let mut solver = InternalSolver::default();
    for overlay in [Overlay::Closed, Overlay::Relaxed] {
        match solver.solve(&sys, overlay)? {
            None => println!("{overlay:?}: UNSAT"),
            Some(m) => println!("{overlay:?}: SAT  resets {:?}  locations {:?}", m.resets, m.locations),
        }
        println!("  {:?}", solver.last_stats());
    }

    let script = export_smtlib(&sys, Overlay::Relaxed);
    println!("\n{}", script.lines().take(12).collect::<Vec<_>>().join("\n"));
    println!("... ({} lines)", script.lines().count());

    if let Some(path) = std::env::args().nth(1) {
        let verdict = SmtLibSolver::new(&path).solve(&sys, Overlay::Relaxed)?;
        println!("{path}: {}", if verdict.is_some() { "sat" } else { "unsat" });
    }
    Ok(())
}
