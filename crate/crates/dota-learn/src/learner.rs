//! The learning loop: grow the table, solve the readiness constraints, and
//! query hypotheses until the teacher has no counterexample.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::{json, Value};

use crate::constraints::{
    assemble, parse_backend, build_c2_with, InternalSolver, Overlay, Quadruple, SolverBackend, SolverModel,
};
use crate::dota::Dota;
use crate::dtmm::Dtmm;
use crate::error::{Error, Result};
use crate::hypothesis::{build, verify_hypothesis};
use crate::model::Model;
use crate::table::{ObservationTable, RowId, TableOptions};
use crate::teacher::{Answer, Mode, Teacher};
use crate::word::TimedWord;

#[derive(Clone, Debug)]
pub struct LearnerOptions {
    /// `internal` or `smtlib:<path>`.
    pub solver: String,
    pub use_sink: bool,
    pub max_iterations: usize,
    pub time_budget: Duration,
}

impl Default for LearnerOptions {
    fn default() -> Self {
        LearnerOptions {
            solver: "internal".into(),
            use_sink: false,
            max_iterations: 500,
            time_budget: Duration::from_secs(600),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TableSize {
    pub s: usize,
    pub s_plus: usize,
    pub r: usize,
    pub e: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LearnerStats {
    pub membership: u64,
    pub equivalence: u64,
    pub iterations: usize,
    #[serde(rename = "final_N")]
    pub final_n: u32,
    /// Seconds.
    #[serde(serialize_with = "as_secs")]
    pub wall_time: Duration,
    pub hypotheses: usize,
    pub solver_calls: usize,
    pub locations: usize,
    /// Table size at the head of every iteration.
    pub table_sizes: Vec<TableSize>,
}

fn as_secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEvent {
    pub iteration: usize,
    pub event: &'static str,
    pub payload: Value,
}

/// Writes one JSON object per line.
pub fn write_trace(events: &[TraceEvent], mut out: impl std::io::Write) -> Result<()> {
    for e in events {
        serde_json::to_writer(&mut out, e)?;
        writeln!(out)?;
    }
    Ok(())
}

/// What an observer sees each time a hypothesis is built.
pub struct HypothesisView<'a> {
    pub table: &'a ObservationTable,
    pub model: &'a SolverModel,
    pub hypothesis: &'a Model,
}

pub struct Outcome {
    pub model: Model,
    pub stats: LearnerStats,
    pub trace: Vec<TraceEvent>,
    pub table: ObservationTable,
}

pub fn learn(teacher: &mut dyn Teacher, options: &LearnerOptions) -> Result<Outcome> {
    learn_observed(teacher, options, &mut |_| {})
}

pub fn learn_dota(teacher: &mut dyn Teacher, options: &LearnerOptions) -> Result<(Dota, LearnerStats)> {
    if teacher.mode() != Mode::Dota {
        return Err(Error::Input("teacher does not hold an automaton".into()));
    }
    let out = learn(teacher, options)?;
    match out.model {
        Model::Dota(d) => Ok((d, out.stats)),
        Model::Dtmm(_) => unreachable!("mode checked"),
    }
}

pub fn learn_dtmm(teacher: &mut dyn Teacher, options: &LearnerOptions) -> Result<(Dtmm, LearnerStats)> {
    if teacher.mode() != Mode::Dtmm {
        return Err(Error::Input("teacher does not hold a Mealy machine".into()));
    }
    let out = learn(teacher, options)?;
    match out.model {
        Model::Dtmm(m) => Ok((m, out.stats)),
        Model::Dota(_) => unreachable!("mode checked"),
    }
}

struct Session<'a> {
    teacher: &'a mut dyn Teacher,
    options: &'a LearnerOptions,
    table: ObservationTable,
    solver: Box<dyn SolverBackend + Send>,
    trace: Vec<TraceEvent>,
    stats: LearnerStats,
    started: Instant,
    /// Quadruples that already added suffixes.
    spent: HashSet<Quadruple>,
}

/// Like [`learn`], calling `observer` on every hypothesis before it is queried.
pub fn learn_observed(
    teacher: &mut dyn Teacher,
    options: &LearnerOptions,
    observer: &mut dyn FnMut(HypothesisView<'_>),
) -> Result<Outcome> {
    let started = Instant::now();
    let solver: Box<dyn SolverBackend + Send> = if options.solver == "internal" {
        Box::new(InternalSolver::with_deadline(started + options.time_budget))
    } else {
        parse_backend(&options.solver)?
    };
    let table = ObservationTable::new(teacher, TableOptions { use_sink: options.use_sink })?;
    let mut session =
        Session { teacher, options, table, solver, trace: Vec::new(), stats: LearnerStats::default(), started, spent: HashSet::new() };
    let model = session.run(observer)?;
    let Session { table, trace, mut stats, .. } = session;
    stats.locations = model.location_count();
    Ok(Outcome { model, stats, trace, table })
}

impl Session<'_> {
    fn word(&self, w: &TimedWord) -> String {
        w.display(self.table.alphabet()).to_string()
    }

    fn rows(&self, ids: &[RowId]) -> Vec<String> {
        ids.iter().map(|&r| self.word(&self.table.row(r).word)).collect()
    }

    fn emit(&mut self, event: &'static str, payload: Value) {
        self.trace.push(TraceEvent { iteration: self.stats.iterations, event, payload });
    }

    fn finish_stats(&mut self) {
        let t = self.teacher.stats();
        self.stats.membership = t.membership_count;
        self.stats.equivalence = t.equivalence_count;
        self.stats.final_n = self.table.n();
        self.stats.wall_time = self.started.elapsed();
    }

    fn budget(&mut self, reason: String) -> Error {
        self.finish_stats();
        Error::Budget { reason, stats: Box::new(self.stats.clone()) }
    }

    fn solve(&mut self, sys: &crate::constraints::ConstraintSystem, overlay: Overlay) -> Result<Option<SolverModel>> {
        self.stats.solver_calls += 1;
        match self.solver.solve(sys, overlay) {
            Err(Error::Solver(msg)) if self.started.elapsed() > self.options.time_budget => {
                Err(self.budget(format!("time budget exceeded in solver ({msg})")))
            }
            other => other,
        }
    }

    fn increase_n(&mut self, why: &str) {
        let n = self.table.n() + 1;
        self.table.set_n(n);
        self.emit("N-increase", json!({ "N": n, "reason": why }));
    }

    fn run(&mut self, observer: &mut dyn FnMut(HypothesisView<'_>)) -> Result<Model> {
        loop {
            self.stats.iterations += 1;
            if self.stats.iterations > self.options.max_iterations {
                return Err(self.budget(format!("more than {} iterations", self.options.max_iterations)));
            }
            if self.started.elapsed() > self.options.time_budget {
                return Err(self.budget(format!("time budget of {:?} exceeded", self.options.time_budget)));
            }
            let (s, s_plus, r, e) = self.table.sizes();
            self.stats.table_sizes.push(TableSize { s, s_plus, r, e });

            let moved = self.table.move_to_s(self.teacher)?;
            if !moved.is_empty() {
                let rows = self.rows(&moved);
                self.emit("move_to_S", json!({ "rows": rows }));
            }
            let c2 = build_c2_with(&self.table, &self.spent);
            if let Some(q) = c2.source {
                self.spent.insert(q);
                for e in c2.suffixes {
                    if self.table.add_suffix(self.teacher, e.clone())? {
                        let shown = self.word(&e);
                        self.emit("suffix-added", json!({ "suffix": shown }));
                    }
                }
                continue;
            }
            let Some(sys) = assemble(&self.table, c2.clauses) else {
                self.increase_n("|S| > N");
                continue;
            };
            let n = self.table.n();
            let model = match self.solve(&sys, Overlay::Closed)? {
                Some(m) => {
                    self.emit("SAT", self.model_payload(n, "C3", &m));
                    m
                }
                None => {
                    self.emit("UNSAT", json!({ "N": n, "constraint": "C3" }));
                    let Some(m) = self.solve(&sys, Overlay::Relaxed)? else {
                        self.emit("UNSAT", json!({ "N": n, "constraint": "C3'" }));
                        self.increase_n("C3' unsatisfiable");
                        continue;
                    };
                    self.emit("SAT", self.model_payload(n, "C3'", &m));
                    match self.table.move_to_s_plus(self.teacher, &m.locations)? {
                        Some(row) => {
                            let shown = self.word(&self.table.row(row).word);
                            self.emit("move_to_S+", json!({ "row": shown }));
                            continue;
                        }
                        // Every row sits on a location of `S ∪ S+`: renumbering
                        // those locations satisfies closedness.
                        None => self.compact(m),
                    }
                }
            };
            let hyp = build(&self.table, &model)?;
            verify_hypothesis(&self.table, &model, &hyp)?;
            self.stats.hypotheses += 1;
            observer(HypothesisView { table: &self.table, model: &model, hypothesis: &hyp });
            match self.teacher.equivalence(&hyp)? {
                None => {
                    self.emit("equivalent", json!({ "locations": hyp.location_count() }));
                    self.finish_stats();
                    return Ok(hyp);
                }
                Some(ctx) => {
                    self.validate(&hyp, &ctx)?;
                    let added = self.table.process_counterexample(self.teacher, &ctx)?;
                    let shown = self.word(&ctx);
                    let rows = self.rows(&added);
                    self.emit("ctx", json!({ "word": shown, "new_rows": rows }));
                }
            }
        }
    }

    fn model_payload(&self, n: u32, constraint: &str, m: &SolverModel) -> Value {
        let resets: Vec<RowId> = (1..m.resets.len()).filter(|&r| m.resets[r]).collect();
        json!({ "N": n, "constraint": constraint, "resets": self.rows(&resets) })
    }

    fn compact(&mut self, mut m: SolverModel) -> SolverModel {
        let mut used: Vec<u32> = self.table.s().iter().chain(self.table.s_plus()).map(|&w| m.locations[w]).collect();
        used.sort_unstable();
        used.dedup();
        for q in &mut m.locations {
            *q = used.binary_search(q).expect("row on a representative location") as u32 + 1;
        }
        self.emit("compacted", json!({ "locations": used.len() }));
        m
    }

    fn validate(&mut self, hyp: &Model, ctx: &TimedWord) -> Result<()> {
        let target = self.teacher.membership(ctx)?;
        let agrees = match (hyp, &target) {
            (Model::Dota(h), Answer::Accept(a)) => h.accepts(ctx)? == *a,
            (Model::Dtmm(h), Answer::Outputs(o)) => h.run(ctx)? == *o,
            _ => return Err(Error::Input("teacher answered in the wrong mode".into())),
        };
        if agrees {
            return Err(Error::InvalidCounterexample(format!(
                "hypothesis already agrees with the target on {}",
                self.word(ctx)
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{alternating_bit_sender, delay_window, delay_window_counterexamples};
    use crate::teacher::{ScriptedTeacher, SimulatedTeacher};

    #[test]
    fn learns_reference_automaton() {
        let mut t = SimulatedTeacher::new(Model::Dota(delay_window()));
        let (h, stats) = learn_dota(&mut t, &LearnerOptions::default()).unwrap();
        assert!(crate::oracle::dota_counterexample(&delay_window().complete(), &h).unwrap().is_none());
        assert!(stats.final_n >= 1 && stats.equivalence >= 1);
    }

    #[test]
    fn scripted_run_ends_with_reference_table() {
        let inner = SimulatedTeacher::new(Model::Dota(delay_window()));
        let mut t = ScriptedTeacher::new(inner, delay_window_counterexamples());
        let out = learn(&mut t, &LearnerOptions::default()).unwrap();
        assert_eq!(out.model.location_count(), 3);
        let a = out.table.alphabet().to_vec();
        let names = |ids: &[RowId]| -> Vec<String> {
            ids.iter().map(|&r| out.table.row(r).word.display(&a).to_string()).collect()
        };
        assert_eq!(names(out.table.s()), ["ε", "(a,0)", "(a,4)"]);
        assert_eq!(names(out.table.s_plus()), ["(a,4)(a,5.5)"]);
    }

    #[test]
    fn learns_mealy_machine() {
        let mut t = SimulatedTeacher::new(Model::Dtmm(alternating_bit_sender()));
        let (h, _) = learn_dtmm(&mut t, &LearnerOptions::default()).unwrap();
        let target = alternating_bit_sender().complete_with_void_loops();
        assert!(crate::oracle::dtmm_counterexample(&target, &h).unwrap().is_none());
    }

    #[test]
    fn invalid_counterexample_is_rejected() {
        let inner = SimulatedTeacher::new(Model::Dota(delay_window()));
        let bogus = TimedWord::parse("(a,0)", &["a".to_string()]).unwrap();
        let mut t = ScriptedTeacher::new(inner, vec![bogus]);
        assert!(matches!(learn(&mut t, &LearnerOptions::default()), Err(Error::InvalidCounterexample(_))));
    }

    #[test]
    fn iteration_budget_reports_partial_stats() {
        let mut t = SimulatedTeacher::new(Model::Dota(delay_window()));
        let opts = LearnerOptions { max_iterations: 2, ..LearnerOptions::default() };
        match learn(&mut t, &opts) {
            Err(Error::Budget { stats, .. }) => assert_eq!(stats.iterations, 3),
            Err(e) => panic!("unexpected error {e}"),
            Ok(_) => panic!("expected a budget error"),
        }
    }
}
