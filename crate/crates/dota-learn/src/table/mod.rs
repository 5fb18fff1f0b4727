//! The timed observation table `(S, S+, R, E, f, N)`.
//!
//! Every row stores its own membership answer. The distinguishability
//! function `f` is not stored per cell: for a row `w` and a shift `δ ≥ 0` the
//! table keeps the vector of answers to `w·e` (first delay of `e` raised by
//! `δ`) for every suffix `e ∈ E`. Aligning two rows under last resets
//! `(i1, i2)` shifts only the side with the smaller clock value, so
//! `f(w1, w2, i1, i2)` is the equality of two such vectors. The vectors are
//! filled eagerly whenever a row or a suffix is added, so reading `f` never
//! issues queries.

mod dump;

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::teacher::{Answer, Mode, Teacher};
use crate::word::{Action, Step, TimedWord};

pub use dump::{CellExpr, TableDump};

/// Index of a row in creation order; also names its reset and location variables.
pub type RowId = usize;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Part {
    S,
    #[serde(rename = "S+")]
    SPlus,
    R,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub word: TimedWord,
    pub part: Part,
    pub answer: Answer,
    /// Whether the run ended in the sink (only known with sink queries enabled).
    pub sink: bool,
    /// `prefixes[k]` is the row of the length-`k` prefix; the last entry is the row itself.
    pub prefixes: Vec<RowId>,
    /// `nu[i]` = clock value after the word if the last reset followed step `i`.
    pub nu: Vec<Rational>,
}

impl Row {
    pub fn parent(&self) -> Option<RowId> {
        let n = self.prefixes.len();
        (n >= 2).then(|| self.prefixes[n - 2])
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn last_step(&self) -> Option<Step> {
        self.word.last().copied()
    }

    pub fn accepted(&self) -> bool {
        self.answer.accepted().unwrap_or(false)
    }

    /// Output of the last step (Mealy mode).
    pub fn last_output(&self) -> Option<Action> {
        self.answer.outputs().and_then(|o| o.last().copied())
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TableOptions {
    /// Use sink answers to skip queries for rows known to be in the sink.
    pub use_sink: bool,
}

/// `(i1, i2)` pairs of last resets that do not contradict each other on the
/// common prefix, in lexicographic order.
pub fn valid_reset_combinations(w1: &TimedWord, w2: &TimedWord) -> Vec<(usize, usize)> {
    combinations(w1.len(), w2.len(), w1.common_prefix_len(w2))
}

fn combinations(n1: usize, n2: usize, m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity((n1 + 1) * (n2 + 1));
    for i in 0..=n1 {
        for j in 0..=n2 {
            if i <= m && j <= m && i != j {
                continue;
            }
            out.push((i, j));
        }
    }
    out
}

/// Pads the first delay of the suffix on the side with the smaller clock
/// value so both sides run `e` from the same valuation.
pub fn align_suffix(
    w1: &TimedWord,
    w2: &TimedWord,
    i1: usize,
    i2: usize,
    e: &TimedWord,
) -> Result<(TimedWord, TimedWord)> {
    if e.is_empty() {
        return Err(Error::Contract("alignment needs a nonempty suffix".into()));
    }
    if !valid_reset_combinations(w1, w2).contains(&(i1, i2)) {
        return Err(Error::Contract(format!("({i1},{i2}) is not a valid reset combination")));
    }
    let (v1, v2) = (w1.nu_c(i1)?, w2.nu_c(i2)?);
    Ok(if v1 > v2 {
        (e.clone(), e.with_first_delay_shifted(v1 - v2))
    } else {
        (e.with_first_delay_shifted(v2 - v1), e.clone())
    })
}

/// The test `T`: do the two aligned queries agree? For Mealy targets only the
/// outputs produced by the suffix are compared.
pub fn test_t(
    teacher: &mut dyn Teacher,
    w1: &TimedWord,
    w2: &TimedWord,
    i1: usize,
    i2: usize,
    e: &TimedWord,
) -> Result<bool> {
    if e.is_empty() {
        if !valid_reset_combinations(w1, w2).contains(&(i1, i2)) {
            return Err(Error::Contract(format!("({i1},{i2}) is not a valid reset combination")));
        }
        return Ok(match teacher.mode() {
            Mode::Dota => teacher.membership(w1)? == teacher.membership(w2)?,
            Mode::Dtmm => true,
        });
    }
    let (e1, e2) = align_suffix(w1, w2, i1, i2, e)?;
    let a1 = teacher.membership(&w1.concat(&e1))?;
    let a2 = teacher.membership(&w2.concat(&e2))?;
    Ok(match (a1, a2) {
        (Answer::Outputs(o1), Answer::Outputs(o2)) => o1[w1.len()..] == o2[w2.len()..],
        (a1, a2) => a1 == a2,
    })
}

pub struct ObservationTable {
    alphabet: Vec<String>,
    outputs: Vec<String>,
    mode: Mode,
    options: TableOptions,
    rows: Vec<Row>,
    index: HashMap<TimedWord, RowId>,
    s: Vec<RowId>,
    s_plus: Vec<RowId>,
    suffixes: Vec<TimedWord>,
    n: u32,
    /// Answer-vector storage, keyed by (row, shift), in first-use order.
    sig_keys: Vec<(RowId, Rational)>,
    sig_index: HashMap<(RowId, Rational), usize>,
    sig_codes: Vec<Vec<u32>>,
    output_codes: HashMap<Vec<Action>, u32>,
}

impl ObservationTable {
    /// `S = {ε}`, `S+ = ∅`, `R = {(σ,0) | σ ∈ Σ}`, `E = {ε}`, `N = 1`.
    pub fn new(teacher: &mut dyn Teacher, options: TableOptions) -> Result<Self> {
        if options.use_sink && !teacher.sink_info() {
            return Err(Error::Capability("sink optimization needs a teacher with sink answers".into()));
        }
        let mut table = ObservationTable {
            alphabet: teacher.alphabet().to_vec(),
            outputs: teacher.outputs().to_vec(),
            mode: teacher.mode(),
            options,
            rows: Vec::new(),
            index: HashMap::new(),
            s: Vec::new(),
            s_plus: Vec::new(),
            suffixes: vec![TimedWord::empty()],
            n: 1,
            sig_keys: Vec::new(),
            sig_index: HashMap::new(),
            sig_codes: Vec::new(),
            output_codes: HashMap::new(),
        };
        let eps = table.insert_row(teacher, TimedWord::empty(), Part::S)?;
        table.s.push(eps);
        for a in 0..table.alphabet.len() as Action {
            table.insert_row(teacher, TimedWord::from_pairs([(a, Rational::ZERO)]), Part::R)?;
        }
        Ok(table)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }
    /// Output names (Mealy mode only).
    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }
    pub fn mode(&self) -> Mode {
        self.mode
    }
    pub fn rows(&self) -> &[Row] {
        &self.rows
    }
    pub fn row(&self, id: RowId) -> &Row {
        &self.rows[id]
    }
    pub fn find(&self, w: &TimedWord) -> Option<RowId> {
        self.index.get(w).copied()
    }
    /// Rows of `S` in insertion order.
    pub fn s(&self) -> &[RowId] {
        &self.s
    }
    pub fn s_plus(&self) -> &[RowId] {
        &self.s_plus
    }
    /// Rows of `R` in creation order.
    pub fn r(&self) -> Vec<RowId> {
        (0..self.rows.len()).filter(|&id| self.rows[id].part == Part::R).collect()
    }
    pub fn suffixes(&self) -> &[TimedWord] {
        &self.suffixes
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn set_n(&mut self, n: u32) {
        assert!(n >= 1, "N must be positive");
        self.n = n;
    }
    /// `(|S|, |S+|, |R|, |E|)`.
    pub fn sizes(&self) -> (usize, usize, usize, usize) {
        let r = self.rows.len() - self.s.len() - self.s_plus.len();
        (self.s.len(), self.s_plus.len(), r, self.suffixes.len())
    }

    /// Valid combinations for two rows; the common prefix is read off the shared prefix rows.
    pub fn combinations(&self, a: RowId, b: RowId) -> Vec<(usize, usize)> {
        let (pa, pb) = (&self.rows[a].prefixes, &self.rows[b].prefixes);
        let m = pa.iter().zip(pb).take_while(|(x, y)| x == y).count() - 1;
        combinations(pa.len() - 1, pb.len() - 1, m)
    }

    fn shifts(&self, a: RowId, b: RowId, i: usize, j: usize) -> (Rational, Rational) {
        let (v1, v2) = (self.rows[a].nu[i], self.rows[b].nu[j]);
        if v1 > v2 {
            (Rational::ZERO, v1 - v2)
        } else {
            (v2 - v1, Rational::ZERO)
        }
    }

    fn codes(&self, row: RowId, shift: Rational) -> &[u32] {
        let idx = self.sig_index.get(&(row, shift)).expect("answer vector filled when row was added");
        &self.sig_codes[*idx]
    }

    /// `f(a, b, i, j)`: ⊤ iff no suffix in `E` separates the rows under last resets `(i, j)`.
    pub fn f(&self, a: RowId, b: RowId, i: usize, j: usize) -> bool {
        if a == b && i == j {
            return true;
        }
        let (da, db) = self.shifts(a, b, i, j);
        self.codes(a, da) == self.codes(b, db)
    }

    /// Indices into `E` of the suffixes that separate the rows under `(i, j)`.
    pub fn separating_suffixes(&self, a: RowId, b: RowId, i: usize, j: usize) -> Vec<usize> {
        let (da, db) = self.shifts(a, b, i, j);
        let (ca, cb) = (self.codes(a, da), self.codes(b, db));
        (0..ca.len()).filter(|&k| ca[k] != cb[k]).collect()
    }

    /// `f` is ⊥ on every valid combination.
    pub fn certainly_distinct(&self, a: RowId, b: RowId) -> bool {
        self.combinations(a, b).into_iter().all(|(i, j)| !self.f(a, b, i, j))
    }

    fn code_for(&mut self, teacher: &mut dyn Teacher, row: RowId, shift: Rational, e: usize) -> Result<u32> {
        let suffix = &self.suffixes[e];
        let r = &self.rows[row];
        if suffix.is_empty() {
            return Ok(match self.mode {
                Mode::Dota => r.accepted() as u32,
                Mode::Dtmm => 0,
            });
        }
        if self.options.use_sink && r.sink {
            return Ok(0);
        }
        let word = r.word.concat(&suffix.with_first_delay_shifted(shift));
        let skip = r.len();
        Ok(match teacher.membership(&word)? {
            Answer::Accept(b) => b as u32,
            Answer::Outputs(o) => {
                let next = self.output_codes.len() as u32;
                *self.output_codes.entry(o[skip..].to_vec()).or_insert(next)
            }
        })
    }

    fn ensure_sig(&mut self, teacher: &mut dyn Teacher, row: RowId, shift: Rational) -> Result<()> {
        if self.sig_index.contains_key(&(row, shift)) {
            return Ok(());
        }
        let mut codes = Vec::with_capacity(self.suffixes.len());
        for e in 0..self.suffixes.len() {
            codes.push(self.code_for(teacher, row, shift, e)?);
        }
        self.sig_index.insert((row, shift), self.sig_codes.len());
        self.sig_keys.push((row, shift));
        self.sig_codes.push(codes);
        Ok(())
    }

    fn insert_row(&mut self, teacher: &mut dyn Teacher, word: TimedWord, part: Part) -> Result<RowId> {
        let n = word.len();
        let mut prefixes = Vec::with_capacity(n + 1);
        for k in 0..n {
            let p = word.prefix(k);
            prefixes.push(self.find(&p).ok_or_else(|| {
                Error::TableIntegrity(format!("prefix {} of a new row is missing", p.display(&self.alphabet)))
            })?);
        }
        let id = self.rows.len();
        prefixes.push(id);
        let (answer, sink) = if self.options.use_sink {
            teacher.membership_sink(&word)?
        } else {
            (teacher.membership(&word)?, false)
        };
        let mut nu = vec![Rational::ZERO; n + 1];
        for i in (0..n).rev() {
            nu[i] = nu[i + 1] + word.steps()[i].delay;
        }
        self.index.insert(word.clone(), id);
        self.rows.push(Row { word, part, answer, sink, prefixes, nu });
        for other in 0..=id {
            for (i, j) in self.combinations(id, other) {
                let (da, db) = self.shifts(id, other, i, j);
                self.ensure_sig(teacher, id, da)?;
                self.ensure_sig(teacher, other, db)?;
            }
        }
        Ok(id)
    }

    /// Appends `word` to `R` unless it is already a row. Its proper prefixes must be rows.
    pub fn add_row(&mut self, teacher: &mut dyn Teacher, word: TimedWord) -> Result<(RowId, bool)> {
        match self.find(&word) {
            Some(id) => Ok((id, false)),
            None => Ok((self.insert_row(teacher, word, Part::R)?, true)),
        }
    }

    /// Adds `e` to `E` and extends every answer vector; returns whether it was new.
    pub fn add_suffix(&mut self, teacher: &mut dyn Teacher, e: TimedWord) -> Result<bool> {
        if self.suffixes.contains(&e) {
            return Ok(false);
        }
        self.suffixes.push(e);
        let k = self.suffixes.len() - 1;
        for idx in 0..self.sig_keys.len() {
            let (row, shift) = self.sig_keys[idx];
            let code = self.code_for(teacher, row, shift, k)?;
            self.sig_codes[idx].push(code);
        }
        Ok(true)
    }

    fn add_successors(&mut self, teacher: &mut dyn Teacher, id: RowId) -> Result<Vec<RowId>> {
        let mut added = Vec::new();
        for a in 0..self.alphabet.len() as Action {
            let w = self.rows[id].word.extended(Step::new(a, Rational::ZERO));
            let (rid, new) = self.add_row(teacher, w)?;
            if new {
                added.push(rid);
            }
        }
        Ok(added)
    }

    /// Moves `R` rows that are certainly distinct from every `S` row into
    /// `S`, one at a time in creation order, until none is left. Returns the
    /// moved rows.
    pub fn move_to_s(&mut self, teacher: &mut dyn Teacher) -> Result<Vec<RowId>> {
        let mut moved = Vec::new();
        loop {
            let candidate = (0..self.rows.len()).find(|&r| {
                self.rows[r].part == Part::R && self.s.iter().all(|&s| self.certainly_distinct(r, s))
            });
            let Some(r) = candidate else { break };
            self.rows[r].part = Part::S;
            self.s.push(r);
            self.add_successors(teacher, r)?;
            moved.push(r);
        }
        Ok(moved)
    }

    /// Moves one `R` row into `S+` and adds its `(σ,0)` successors.
    pub fn move_row_to_s_plus(&mut self, teacher: &mut dyn Teacher, r: RowId) -> Result<()> {
        if self.rows.get(r).map(|row| row.part) != Some(Part::R) {
            return Err(Error::Contract(format!("row {r} is not in R")));
        }
        self.rows[r].part = Part::SPlus;
        self.s_plus.push(r);
        self.add_successors(teacher, r)?;
        Ok(())
    }

    /// Given a location for every row (indexed by row id), moves the first
    /// `R` row whose location is used by no `S ∪ S+` row. Returns that row.
    pub fn move_to_s_plus(&mut self, teacher: &mut dyn Teacher, locations: &[u32]) -> Result<Option<RowId>> {
        if locations.len() != self.rows.len() {
            return Err(Error::Contract(format!(
                "model assigns {} locations for {} rows",
                locations.len(),
                self.rows.len()
            )));
        }
        let covered: Vec<u32> = self.s.iter().chain(&self.s_plus).map(|&r| locations[r]).collect();
        let fresh = (0..self.rows.len()).find(|&r| self.rows[r].part == Part::R && !covered.contains(&locations[r]));
        if let Some(r) = fresh {
            self.move_row_to_s_plus(teacher, r)?;
        }
        Ok(fresh)
    }

    /// Adds every prefix of `ctx` that is not yet a row to `R`; returns the new rows.
    pub fn process_counterexample(&mut self, teacher: &mut dyn Teacher, ctx: &TimedWord) -> Result<Vec<RowId>> {
        let mut added = Vec::new();
        for p in ctx.prefixes() {
            let (id, new) = self.add_row(teacher, p)?;
            if new {
                added.push(id);
            }
        }
        Ok(added)
    }

    /// Last reset index of `row` under the given per-row reset assignment.
    pub fn last_reset(&self, row: RowId, resets: &[bool]) -> usize {
        let p = &self.rows[row].prefixes;
        (1..p.len()).rev().find(|&k| resets[p[k]]).unwrap_or(0)
    }

    /// Checks the structural invariants of the table.
    pub fn audit(&self) -> Result<()> {
        let bad = |m: String| Err(Error::TableIntegrity(m));
        if self.rows.is_empty() || !self.rows[0].word.is_empty() || self.rows[0].part != Part::S {
            return bad("ε must be the first row and belong to S".into());
        }
        if self.suffixes.first().is_none_or(|e| !e.is_empty()) {
            return bad("ε must be the first suffix".into());
        }
        let s_count = self.rows.iter().filter(|r| r.part == Part::S).count();
        let sp_count = self.rows.iter().filter(|r| r.part == Part::SPlus).count();
        if s_count != self.s.len() || sp_count != self.s_plus.len() {
            return bad("S or S+ listing out of sync with row parts".into());
        }
        for (id, row) in self.rows.iter().enumerate() {
            if self.index.get(&row.word) != Some(&id) {
                return bad(format!("row {id} is not indexed"));
            }
            for (k, &p) in row.prefixes.iter().enumerate() {
                if p > id || self.rows[p].word != row.word.prefix(k) {
                    return bad(format!("row {id} has a broken prefix link at length {k}"));
                }
            }
            if row.part != Part::R {
                for a in 0..self.alphabet.len() as Action {
                    if self.find(&row.word.extended(Step::new(a, Rational::ZERO))).is_none() {
                        return bad(format!("row {id} lacks its (σ,0) successor"));
                    }
                }
            }
        }
        for codes in &self.sig_codes {
            if codes.len() != self.suffixes.len() {
                return bad("answer vector shorter than E".into());
            }
        }
        Ok(())
    }

    pub fn dump(&self) -> TableDump {
        TableDump::of(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Model;
    use crate::reference::delay_window;
    use crate::teacher::SimulatedTeacher;

    fn w(s: &str) -> TimedWord {
        TimedWord::parse(s, &["a".to_string()]).unwrap()
    }

    fn teacher() -> SimulatedTeacher {
        SimulatedTeacher::new(Model::Dota(delay_window()))
    }

    #[test]
    fn valid_combinations_examples() {
        assert_eq!(valid_reset_combinations(&w("(a,4)"), &w("(a,4)(a,5.5)")), [(0, 0), (0, 2), (1, 1), (1, 2)]);
        assert_eq!(valid_reset_combinations(&w(""), &w("")), [(0, 0)]);
        let ab = ["a".to_string(), "b".to_string()];
        let (x, y) = (TimedWord::parse("(a,4)", &ab).unwrap(), TimedWord::parse("(b,3)", &ab).unwrap());
        assert_eq!(valid_reset_combinations(&x, &y), [(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn alignment_examples() {
        let (e1, e2) = align_suffix(&w("(a,4)"), &w(""), 0, 0, &w("(a,5.5)")).unwrap();
        assert_eq!((e1, e2), (w("(a,5.5)"), w("(a,9.5)")));
        let (e1, e2) = align_suffix(&w("(a,4)"), &w(""), 1, 0, &w("(a,5.5)")).unwrap();
        assert_eq!((e1, e2), (w("(a,5.5)"), w("(a,5.5)")));
        assert!(align_suffix(&w("(a,4)"), &w("(a,4)"), 0, 1, &w("(a,1)")).is_err());
    }

    #[test]
    fn test_t_examples() {
        let mut t = teacher();
        assert!(!test_t(&mut t, &w("(a,4)"), &w(""), 0, 0, &w("(a,5.5)")).unwrap());
        assert!(test_t(&mut t, &w("(a,4)"), &w(""), 1, 0, &w("(a,5.5)")).unwrap());
        assert!(test_t(&mut t, &w("(a,4)"), &w("(a,4)"), 1, 1, &w("(a,7)")).unwrap());
    }

    /// Builds the table shown with the relaxed-closedness example: rows
    /// ε, (a,0), (a,0)(a,0), (a,4), (a,9.5), (a,4)(a,5.5) and E = {ε, (a,5.5)}.
    fn before_relaxation(t: &mut SimulatedTeacher) -> ObservationTable {
        let mut table = ObservationTable::new(t, TableOptions::default()).unwrap();
        assert_eq!(table.move_to_s(t).unwrap(), [1]);
        for ctx in ["(a,4)", "(a,9.5)", "(a,4)(a,5.5)"] {
            table.process_counterexample(t, &w(ctx)).unwrap();
        }
        table.add_suffix(t, w("(a,5.5)")).unwrap();
        table
    }

    #[test]
    fn f_and_certainly_distinct_before_relaxation() {
        let mut t = teacher();
        let table = before_relaxation(&mut t);
        table.audit().unwrap();
        let id = |s: &str| table.find(&w(s)).unwrap();
        let (a4, eps, a4a55) = (id("(a,4)"), id(""), id("(a,4)(a,5.5)"));
        assert!(!table.f(a4, eps, 0, 0));
        assert!(table.f(a4, eps, 1, 0));
        assert!(table.certainly_distinct(a4, a4a55));
        assert!(!table.certainly_distinct(a4, eps));
        assert!(!table.certainly_distinct(a4, a4));
        assert_eq!(table.r(), [2, 3, 4, 5]);
    }

    #[test]
    fn symbolic_cells_match_reference_table() {
        let mut t = teacher();
        let table = before_relaxation(&mut t);
        let id = |s: &str| table.find(&w(s)).unwrap();
        let cell = |x: &str, y: &str| table.cell(id(x), id(y)).to_string();
        assert_eq!(cell("", "(a,4)"), "b3");
        assert_eq!(cell("", "(a,4)(a,5.5)"), "¬b5");
        assert_eq!(cell("(a,4)", "(a,4)(a,5.5)"), "⊥");
        assert_eq!(cell("(a,0)", "(a,9.5)"), "⊤");
        assert_eq!(cell("", "(a,0)"), "⊥");
        let grid = table.dump().to_string();
        assert!(grid.contains("E = {ε, (a,5.5)}"), "{grid}");
    }

    #[test]
    fn initial_move_to_s_adds_successor() {
        let mut t = teacher();
        let mut table = ObservationTable::new(&mut t, TableOptions::default()).unwrap();
        table.move_to_s(&mut t).unwrap();
        assert_eq!(table.s(), [0, 1]);
        assert_eq!(table.row(2).word, w("(a,0)(a,0)"));
        assert_eq!(table.row(2).part, Part::R);
        table.audit().unwrap();
    }

    #[test]
    fn counterexample_prefixes_are_added_once() {
        let mut t = teacher();
        let mut table = before_relaxation(&mut t);
        let before = table.rows().len();
        assert!(table.process_counterexample(&mut t, &w("(a,4)(a,5.5)")).unwrap().is_empty());
        assert_eq!(table.rows().len(), before);
        assert_eq!(table.process_counterexample(&mut t, &w("(a,4)(a,0)")).unwrap().len(), 1);
    }

    #[test]
    fn fresh_location_moves_first_row_only() {
        let mut t = teacher();
        let mut table = before_relaxation(&mut t);
        // ε:1, (a,0):2, the rest split over two fresh locations
        let locs = [1, 2, 2, 3, 2, 3];
        assert_eq!(table.move_to_s_plus(&mut t, &locs).unwrap(), Some(3));
        assert_eq!(table.s_plus(), [3]);
        table.audit().unwrap();
    }

    #[test]
    fn sink_rows_skip_queries() {
        let mut plain = teacher();
        let mut sinky = teacher().with_sink_info(true);
        let opts = TableOptions { use_sink: true };
        let mut a = ObservationTable::new(&mut plain, TableOptions::default()).unwrap();
        let mut b = ObservationTable::new(&mut sinky, opts).unwrap();
        for ctx in ["(a,9.5)(a,1)", "(a,4)"] {
            a.process_counterexample(&mut plain, &w(ctx)).unwrap();
            b.process_counterexample(&mut sinky, &w(ctx)).unwrap();
        }
        for e in ["(a,2)", "(a,5.5)"] {
            a.add_suffix(&mut plain, w(e)).unwrap();
            b.add_suffix(&mut sinky, w(e)).unwrap();
        }
        for x in 0..a.rows().len() {
            for y in 0..a.rows().len() {
                for (i, j) in a.combinations(x, y) {
                    assert_eq!(a.f(x, y, i, j), b.f(x, y, i, j));
                }
            }
        }
        assert!(sinky.stats().membership_count < plain.stats().membership_count);
    }
}
