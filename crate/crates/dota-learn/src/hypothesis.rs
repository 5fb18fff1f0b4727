//! Turns a ready table and a solver model into a candidate automaton or
//! Mealy machine.
//!
//! Every nonempty row `ω1·(σ, t)` yields an auxiliary transition from the
//! location of `ω1` on `σ` at clock value `ψ = ν(ω1) + t`. The sorted values
//! per `(location, action)` are cut into guards by [`partition`].

use std::collections::BTreeMap;

use serde::Serialize;

use crate::constraints::SolverModel;
use crate::dota::{Dota, Transition};
use crate::dtmm::{Dtmm, MealyTransition};
use crate::error::{Error, Result};
use crate::guard::{GuardInterval, Region};
use crate::model::Model;
use crate::rational::Rational;
use crate::table::{ObservationTable, RowId};
use crate::teacher::Mode;
use crate::word::Action;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct AuxTransition {
    pub source: u32,
    pub action: Action,
    pub psi: Rational,
    pub reset: bool,
    pub target: u32,
    /// Last output of the row, Mealy mode only.
    pub output: Option<Action>,
}

/// Clock value after `row` under the model's resets.
pub fn clock_value(table: &ObservationTable, row: RowId, model: &SolverModel) -> Result<Rational> {
    let r = table.row(row);
    let mut v = Rational::from_int(0);
    for (k, step) in r.word.steps().iter().enumerate() {
        let p = r.prefixes[k + 1];
        let reset = *model
            .resets
            .get(p)
            .ok_or_else(|| Error::Contract(format!("no reset assigned to row {p}")))?;
        v = if reset { Rational::from_int(0) } else { v + step.delay };
    }
    Ok(v)
}

fn bound(v: Rational) -> u32 {
    u32::try_from(v.floor()).expect("clock values fit the guard range")
}

/// Guards `g_0..g_n` partitioning `[0, ∞)` with `μ_i ∈ g_i`. The values must be
/// strictly increasing from 0, with distinct floors among non-integers.
pub fn partition(values: &[Rational]) -> Result<Vec<GuardInterval>> {
    if values.first() != Some(&Rational::from_int(0)) {
        return Err(Error::Contract("partition needs a list starting at 0".into()));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract("partition needs strictly increasing values".into()));
    }
    let mut floors: Vec<i64> = values.iter().filter(|v| !v.is_integer()).map(Rational::floor).collect();
    let count = floors.len();
    floors.dedup();
    if floors.len() != count {
        return Err(Error::Readiness("two clock values share a region interval".into()));
    }
    let mut out = Vec::with_capacity(values.len());
    for (i, &mu) in values.iter().enumerate() {
        let (lo, lo_closed) = if mu.is_integer() { (bound(mu), true) } else { (bound(mu), false) };
        let (hi, hi_closed) = match values.get(i + 1) {
            None => (None, false),
            Some(&next) if next.is_integer() => (Some(bound(next)), false),
            Some(&next) => (Some(bound(next)), true),
        };
        out.push(GuardInterval::new(lo, lo_closed, hi, hi_closed)?);
    }
    Ok(out)
}

/// Auxiliary transitions of all rows, grouped by `(source, action)` with one
/// entry per clock region, sorted by `ψ`.
pub fn auxiliary_transitions(
    table: &ObservationTable,
    model: &SolverModel,
) -> Result<BTreeMap<(u32, Action), Vec<AuxTransition>>> {
    let mut groups: BTreeMap<(u32, Action), BTreeMap<Region, AuxTransition>> = BTreeMap::new();
    for (id, row) in table.rows().iter().enumerate() {
        let (Some(parent), Some(step)) = (row.parent(), row.last_step()) else { continue };
        let aux = AuxTransition {
            source: model.locations[parent],
            action: step.action,
            psi: clock_value(table, parent, model)? + step.delay,
            reset: model.resets[id],
            target: model.locations[id],
            output: row.last_output(),
        };
        let slot = groups.entry((aux.source, aux.action)).or_default();
        match slot.get_mut(&Region::of(aux.psi)) {
            None => {
                slot.insert(Region::of(aux.psi), aux);
            }
            Some(old) if (old.reset, old.target, old.output) == (aux.reset, aux.target, aux.output) => {
                if aux.psi < old.psi {
                    old.psi = aux.psi;
                }
            }
            Some(old) => {
                return Err(Error::Readiness(format!(
                    "auxiliary transitions from location {} at clock {} and {} disagree",
                    aux.source, old.psi, aux.psi
                )))
            }
        }
    }
    Ok(groups
        .into_iter()
        .map(|(k, v)| {
            let mut list: Vec<AuxTransition> = v.into_values().collect();
            list.sort_by_key(|a| a.psi);
            (k, list)
        })
        .collect())
}

/// Guards for one group; a first value above 0 has its guard stretched down to 0.
fn guards(group: &[AuxTransition]) -> Result<Vec<GuardInterval>> {
    let mut values: Vec<Rational> = group.iter().map(|a| a.psi).collect();
    values[0] = Rational::from_int(0);
    partition(&values)
}

/// Location count: the largest value the model uses.
fn location_count(model: &SolverModel) -> u32 {
    model.locations.iter().copied().max().unwrap_or(1)
}

fn location_names(n: u32) -> Vec<String> {
    (0..n).map(|k| format!("q{k}")).collect()
}

pub fn build_hypothesis(table: &ObservationTable, model: &SolverModel) -> Result<Dota> {
    let n = location_count(model);
    let mut accepting = vec![false; n as usize];
    for &w in table.s().iter().chain(table.s_plus()) {
        if table.row(w).accepted() {
            accepting[model.locations[w] as usize - 1] = true;
        }
    }
    let mut transitions = Vec::new();
    for ((source, action), group) in auxiliary_transitions(table, model)? {
        for (aux, guard) in group.iter().zip(guards(&group)?) {
            transitions.push(Transition {
                source: source as usize - 1,
                action,
                guard,
                reset: aux.reset,
                target: aux.target as usize - 1,
            });
        }
    }
    let initial = model.locations[0] as usize - 1;
    Dota::new(table.alphabet().to_vec(), location_names(n), initial, accepting, None, transitions)
}

pub fn build_hypothesis_dtmm(table: &ObservationTable, model: &SolverModel) -> Result<Dtmm> {
    let mut transitions = Vec::new();
    for ((source, input), group) in auxiliary_transitions(table, model)? {
        for (aux, guard) in group.iter().zip(guards(&group)?) {
            transitions.push(MealyTransition {
                source: source as usize - 1,
                input,
                output: aux.output.ok_or_else(|| Error::Contract("row without an output".into()))?,
                guard,
                reset: aux.reset,
                target: aux.target as usize - 1,
            });
        }
    }
    let initial = model.locations[0] as usize - 1;
    Dtmm::new(table.alphabet().to_vec(), table.outputs().to_vec(), location_names(location_count(model)), initial, transitions)
}

/// Builds the hypothesis matching the table's mode.
pub fn build(table: &ObservationTable, model: &SolverModel) -> Result<Model> {
    Ok(match table.mode() {
        Mode::Dota => Model::Dota(build_hypothesis(table, model)?),
        Mode::Dtmm => Model::Dtmm(build_hypothesis_dtmm(table, model)?),
    })
}

/// Checks that the hypothesis is complete, replays every row to its assigned
/// location, resets and answer, and keeps apart rows the table separates.
pub fn verify_hypothesis(table: &ObservationTable, model: &SolverModel, hyp: &Model) -> Result<()> {
    let fail = |msg: String| Err(Error::Readiness(msg));
    let complete = match hyp {
        Model::Dota(h) => h.is_complete(),
        Model::Dtmm(h) => h.is_complete(),
    };
    if !complete {
        return fail("hypothesis guards do not cover [0,∞)".into());
    }
    for (id, row) in table.rows().iter().enumerate() {
        let want = model.locations[id] as usize - 1;
        let shown = || row.word.display(table.alphabet()).to_string();
        match hyp {
            Model::Dota(h) => {
                let run = h.run(&row.word)?;
                if run.accepted != row.accepted() {
                    return fail(format!("hypothesis disagrees with the table on {}", shown()));
                }
                if run.final_location != want {
                    return fail(format!("{} reaches q{} instead of q{want}", shown(), run.final_location));
                }
                let expected: Vec<bool> = row.prefixes[1..].iter().map(|&p| model.resets[p]).collect();
                if run.reset_word.resets() != expected {
                    return fail(format!("resets along {} differ from the model", shown()));
                }
            }
            Model::Dtmm(h) => {
                if Some(h.run(&row.word)?.as_slice()) != row.answer.outputs() {
                    return fail(format!("hypothesis outputs differ from the table on {}", shown()));
                }
            }
        }
    }
    let rows = table.rows().len();
    let last: Vec<usize> = (0..rows).map(|r| table.last_reset(r, &model.resets)).collect();
    for a in 0..rows {
        for b in a + 1..rows {
            if model.locations[a] == model.locations[b] && !table.f(a, b, last[a], last[b]) {
                return fail(format!("separated rows {a} and {b} share a location"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::delay_window;
    use crate::table::TableOptions;
    use crate::teacher::SimulatedTeacher;
    use crate::word::TimedWord;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn shown(gs: &[GuardInterval]) -> Vec<String> {
        gs.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn partition_examples() {
        let p = partition(&[r("0"), r("4"), r("5.5"), r("9.5")]).unwrap();
        assert_eq!(shown(&p), ["[0,4)", "[4,5]", "(5,9]", "(9,+)"]);
        assert_eq!(shown(&partition(&[r("0")]).unwrap()), ["[0,+)"]);
        let p = partition(&[r("0"), r("3.2"), r("7")]).unwrap();
        assert_eq!(shown(&p), ["[0,3]", "(3,7)", "[7,+)"]);
    }

    #[test]
    fn partition_rejects_bad_lists() {
        assert!(matches!(partition(&[r("1")]), Err(Error::Contract(_))));
        assert!(matches!(partition(&[r("0"), r("2"), r("2")]), Err(Error::Contract(_))));
        assert!(matches!(partition(&[r("0"), r("2.2"), r("2.7")]), Err(Error::Readiness(_))));
    }

    #[test]
    fn clock_values_follow_resets() {
        let mut t = SimulatedTeacher::new(Model::Dota(delay_window()));
        let mut table = ObservationTable::new(&mut t, TableOptions::default()).unwrap();
        let w = |s: &str| TimedWord::parse(s, &["a".to_string()]).unwrap();
        table.process_counterexample(&mut t, &w("(a,4)(a,5.5)")).unwrap();
        let (a4, long) = (table.find(&w("(a,4)")).unwrap(), table.find(&w("(a,4)(a,5.5)")).unwrap());
        let rows = table.rows().len();
        let mut m = SolverModel { resets: vec![false; rows], locations: vec![1; rows] };
        assert_eq!(clock_value(&table, 0, &m).unwrap(), r("0"));
        assert_eq!(clock_value(&table, a4, &m).unwrap(), r("4"));
        assert_eq!(clock_value(&table, long, &m).unwrap(), r("9.5"));
        m.resets[a4] = true;
        assert_eq!(clock_value(&table, a4, &m).unwrap(), r("0"));
        assert_eq!(clock_value(&table, long, &m).unwrap(), r("5.5"));
        m.resets.truncate(a4);
        assert!(matches!(clock_value(&table, long, &m), Err(Error::Contract(_))));
    }
}
