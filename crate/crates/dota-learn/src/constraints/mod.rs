//! Readiness constraints over ending-reset variables `b_w` and location
//! variables `q_w`, one pair per table row (indexed by row id).

mod cdcl;
mod smtlib;

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::guard::Region;
use crate::table::{ObservationTable, RowId};
use crate::teacher::Mode;
use crate::word::{Step, TimedWord};

pub use cdcl::InternalSolver;
pub use smtlib::{export_smtlib, SmtLibSolver};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Lit {
    /// `b_v` if the flag is true, `¬b_v` otherwise.
    B(usize, bool),
    QEq(usize, usize),
    QNeq(usize, usize),
    /// `q_v = k`.
    QIs(usize, u32),
}

impl Lit {
    pub fn holds(&self, m: &SolverModel) -> bool {
        match *self {
            Lit::B(v, pol) => m.resets[v] == pol,
            Lit::QEq(a, b) => m.locations[a] == m.locations[b],
            Lit::QNeq(a, b) => m.locations[a] != m.locations[b],
            Lit::QIs(a, k) => m.locations[a] == k,
        }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Lit::B(v, true) => write!(f, "b{v}"),
            Lit::B(v, false) => write!(f, "¬b{v}"),
            Lit::QEq(a, b) => write!(f, "q{a}=q{b}"),
            Lit::QNeq(a, b) => write!(f, "q{a}≠q{b}"),
            Lit::QIs(a, k) => write!(f, "q{a}={k}"),
        }
    }
}

/// Which constraint family produced a clause.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum Family {
    /// `b_ε = ⊤`.
    Pin,
    C1,
    C2,
    /// Mealy mode: rows whose extensions disagree on output cannot share a location.
    C2Output,
    C3,
    C4,
}

/// A disjunction of literals with its provenance.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Clause {
    pub lits: Vec<Lit>,
    pub family: Family,
    pub rows: Vec<RowId>,
}

impl Clause {
    pub fn new(lits: Vec<Lit>, family: Family, rows: Vec<RowId>) -> Clause {
        Clause { lits, family, rows }
    }

    pub fn holds(&self, m: &SolverModel) -> bool {
        self.lits.iter().any(|l| l.holds(m))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return write!(f, "⊥");
        }
        let parts: Vec<String> = self.lits.iter().map(Lit::to_string).collect();
        write!(f, "{}", parts.join(" ∨ "))
    }
}

/// Closedness (`C3`) or its relaxation (`C3'`, ranges only).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Overlay {
    Closed,
    Relaxed,
}

/// `C1 ∧ C2 ∧ C4` plus what is needed to add either closedness overlay.
/// Every location variable ranges over `1..=n` under both overlays.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub resets: usize,
    pub locations: usize,
    pub n: u32,
    pub base: Vec<Clause>,
    /// Rows of `S ∪ S+`; `C3` asks each location to be taken by one of them.
    pub representatives: Vec<RowId>,
}

impl ConstraintSystem {
    pub fn overlay(&self, kind: Overlay) -> Vec<Clause> {
        match kind {
            Overlay::Relaxed => Vec::new(),
            Overlay::Closed => (1..=self.n)
                .map(|k| {
                    let lits = self.representatives.iter().map(|&w| Lit::QIs(w, k)).collect();
                    Clause::new(lits, Family::C3, vec![])
                })
                .collect(),
        }
    }

    /// Evaluates the model against ranges, the base and the overlay.
    pub fn holds(&self, kind: Overlay, m: &SolverModel) -> bool {
        m.resets.len() == self.resets
            && m.locations.len() == self.locations
            && m.locations.iter().all(|&q| (1..=self.n).contains(&q))
            && self.base.iter().all(|c| c.holds(m))
            && self.overlay(kind).iter().all(|c| c.holds(m))
    }

    /// First clause the model violates, for diagnostics.
    pub fn violated(&self, kind: Overlay, m: &SolverModel) -> Option<Clause> {
        self.base.iter().cloned().chain(self.overlay(kind)).find(|c| !c.holds(m))
    }

    pub fn count(&self, family: Family) -> usize {
        self.base.iter().filter(|c| c.family == family).count()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SolverModel {
    pub resets: Vec<bool>,
    pub locations: Vec<u32>,
}

pub trait SolverBackend {
    fn name(&self) -> String;
    /// `Ok(None)` means unsatisfiable. Returned models satisfy the system.
    fn solve(&mut self, sys: &ConstraintSystem, overlay: Overlay) -> Result<Option<SolverModel>>;
}

/// Parses `internal` or `smtlib:<path>`.
pub fn parse_backend(name: &str) -> Result<Box<dyn SolverBackend + Send>> {
    match name.split_once(':') {
        None if name == "internal" => Ok(Box::new(InternalSolver::default())),
        Some(("smtlib", path)) if !path.is_empty() => Ok(Box::new(SmtLibSolver::new(path))),
        _ => Err(Error::Input(format!("unknown solver {name:?}; expected internal or smtlib:<path>"))),
    }
}

/// `lr(row, i)`: the last reset of `row` happened after step `i`. The pinned
/// `b_ε` is left out.
pub fn encode_lr(table: &ObservationTable, row: RowId, i: usize) -> Result<Vec<Lit>> {
    let p = &table
        .rows()
        .get(row)
        .ok_or_else(|| Error::TableIntegrity(format!("row {row} does not exist")))?
        .prefixes;
    if i >= p.len() {
        return Err(Error::Contract(format!("reset index {i} beyond row {row}")));
    }
    let mut lits = Vec::with_capacity(p.len() - i);
    if i > 0 {
        lits.push(Lit::B(p[i], true));
    }
    lits.extend((i + 1..p.len()).map(|k| Lit::B(p[k], false)));
    Ok(lits)
}

/// `¬LR(a, b, i, j)` as literals, ready to head an implication clause.
fn not_lr(table: &ObservationTable, a: RowId, b: RowId, i: usize, j: usize) -> Vec<Lit> {
    let mut lits = encode_lr(table, a, i).expect("valid row and index");
    lits.extend(encode_lr(table, b, j).expect("valid row and index"));
    lits.sort();
    lits.dedup();
    lits.into_iter()
        .map(|l| match l {
            Lit::B(v, p) => Lit::B(v, !p),
            other => other,
        })
        .collect()
}

pub fn pin_clause() -> Clause {
    Clause::new(vec![Lit::B(0, true)], Family::Pin, vec![0])
}

/// `C1`: rows separated under some last resets cannot share a location then.
/// Pairs separated under every combination get one unconditional clause.
pub fn build_c1(table: &ObservationTable) -> Vec<Clause> {
    let mut out = Vec::new();
    let rows = table.rows().len();
    for a in 0..rows {
        for b in a + 1..rows {
            let combos = table.combinations(a, b);
            let split: Vec<(usize, usize)> = combos.iter().copied().filter(|&(i, j)| !table.f(a, b, i, j)).collect();
            if split.len() == combos.len() {
                out.push(Clause::new(vec![Lit::QNeq(a, b)], Family::C1, vec![a, b]));
                continue;
            }
            for (i, j) in split {
                let mut lits = not_lr(table, a, b, i, j);
                lits.push(Lit::QNeq(a, b));
                out.push(Clause::new(lits, Family::C1, vec![a, b]));
            }
        }
    }
    out
}

/// Clauses of `C2` plus the suffixes found while building them.
#[derive(Clone, Debug, Default)]
pub struct C2Result {
    pub clauses: Vec<Clause>,
    /// New suffixes, in discovery order, none already in `E`.
    pub suffixes: Vec<TimedWord>,
    /// Extension pair and last resets that produced `suffixes`.
    pub source: Option<Quadruple>,
}

/// Two extension rows and the last resets of their parents.
pub type Quadruple = (RowId, RowId, usize, usize);

fn valid_for(table: &ObservationTable, a: RowId, b: RowId, i: usize, j: usize) -> bool {
    let (pa, pb) = (&table.row(a).prefixes, &table.row(b).prefixes);
    let m = pa.iter().zip(pb).take_while(|(x, y)| x == y).count() - 1;
    !(i <= m && j <= m && i != j)
}

/// `C2`: if two rows share a location and, under last resets `(i, j)`, their
/// one-step extensions on the same action end in the same region, the
/// extensions share their reset and location.
///
/// While building, the first pair of extensions that some suffix in `E`
/// separates under the induced resets (both extensions resetting or neither)
/// yields `(σ, d)·e` for the first such `e` not yet tried, where `d` brings the
/// aligned parents to the clock value of the aligned extensions. When that is
/// new, `(σ, d)·e'` is also added for the first fresh `e'` already separating
/// the parents. In Mealy mode extensions with different last outputs count as
/// separated, and a clause keeps their parents apart.
///
/// Quadruples in `spent` still give clauses but no suffixes, which keeps `E`
/// finite when the assumed resets are wrong and a lifted suffix cannot settle
/// the pair.
pub fn build_c2_with(table: &ObservationTable, spent: &HashSet<Quadruple>) -> C2Result {
    let rows = table.rows();
    let alphabet = table.alphabet().len();
    let mealy = table.mode() == Mode::Dtmm;
    let mut by_action: Vec<Vec<RowId>> = vec![Vec::new(); alphabet];
    let mut ext_regions: Vec<Vec<Region>> = vec![Vec::new(); rows.len()];
    for (id, row) in rows.iter().enumerate() {
        let (Some(step), Some(parent)) = (row.last_step(), row.parent()) else { continue };
        by_action[step.action as usize].push(id);
        ext_regions[id] = table.row(parent).nu.iter().map(|&v| Region::of(v + step.delay)).collect();
    }
    let mut out = C2Result::default();
    // Suffixes come from one quadruple per call, the first that yields a new one.
    let discover = |out: &mut C2Result, e: TimedWord| {
        let fresh = !table.suffixes().contains(&e) && !out.suffixes.contains(&e);
        if fresh {
            out.suffixes.push(e);
        }
        fresh
    };
    for group in &by_action {
        for (x, &a2) in group.iter().enumerate() {
            for &b2 in &group[x + 1..] {
                let (ra, rb) = (table.row(a2), table.row(b2));
                let (a, b) = (ra.parent().expect("nonempty row"), rb.parent().expect("nonempty row"));
                let (sa, sb) = (ra.last_step().expect("nonempty"), rb.last_step().expect("nonempty"));
                let outputs_differ = mealy && ra.last_output() != rb.last_output();
                let (na, nb) = (ra.len(), rb.len());
                for (i, j) in table.combinations(a, b) {
                    if ext_regions[a2][i] != ext_regions[b2][j] || !table.f(a, b, i, j) {
                        continue;
                    }
                    let guard = not_lr(table, a, b, i, j);
                    let with_neq = |mut lits: Vec<Lit>| {
                        if a != b {
                            lits.push(Lit::QNeq(a, b));
                        }
                        lits
                    };
                    let tag = vec![a, b, a2, b2];
                    let mut c = with_neq(guard.clone());
                    c.extend([Lit::B(a2, false), Lit::B(b2, true)]);
                    out.clauses.push(Clause::new(c, Family::C2, tag.clone()));
                    let mut c = with_neq(guard.clone());
                    c.extend([Lit::B(a2, true), Lit::B(b2, false)]);
                    out.clauses.push(Clause::new(c, Family::C2, tag.clone()));
                    let mut c = with_neq(guard.clone());
                    c.push(Lit::QEq(a2, b2));
                    out.clauses.push(Clause::new(c, Family::C2, tag.clone()));
                    if outputs_differ {
                        out.clauses.push(Clause::new(with_neq(guard), Family::C2Output, tag));
                    }
                    if out.source.is_some() || spent.contains(&(a2, b2, i, j)) {
                        continue;
                    }
                    let mut separating: Vec<usize> = if outputs_differ { vec![0] } else { Vec::new() };
                    for (x2, y2) in [(i, j), (na, nb)] {
                        if valid_for(table, a2, b2, x2, y2) {
                            separating.extend(table.separating_suffixes(a2, b2, x2, y2));
                        }
                    }
                    if separating.is_empty() {
                        continue;
                    }
                    // One suffix that splits the extensions, and one that already
                    // splits the parents under some last resets, both behind the head.
                    let mut lifted: Vec<usize> =
                        table.combinations(a, b).into_iter().flat_map(|(x, y)| table.separating_suffixes(a, b, x, y)).collect();
                    separating.sort_unstable();
                    lifted.sort_unstable();
                    // The head moves both aligned parents to the clock value at which
                    // the extensions were compared.
                    let (va, vb) = (table.row(a).nu[i], table.row(b).nu[j]);
                    let head = Step::new(sa.action, (va + sa.delay).max(vb + sb.delay) - va.max(vb));
                    let prefix = TimedWord::from_pairs([(head.action, head.delay)]);
                    let fresh = |out: &mut C2Result, candidates: Vec<usize>| {
                        candidates.into_iter().any(|e| discover(out, prefix.concat(&table.suffixes()[e])))
                    };
                    if fresh(&mut out, separating) {
                        out.source = Some((a2, b2, i, j));
                        fresh(&mut out, lifted);
                    }
                }
            }
        }
    }
    out
}

pub fn build_c2(table: &ObservationTable) -> C2Result {
    build_c2_with(table, &HashSet::new())
}

/// `C4`: the `k`-th row of `S` takes location `k`. `None` if `|S| > N`.
pub fn build_c4(table: &ObservationTable) -> Option<Vec<Clause>> {
    if table.s().len() > table.n() as usize {
        return None;
    }
    Some(
        table
            .s()
            .iter()
            .enumerate()
            .map(|(k, &w)| Clause::new(vec![Lit::QIs(w, k as u32 + 1)], Family::C4, vec![w]))
            .collect(),
    )
}

/// Assembles `b_ε ∧ C1 ∧ C2 ∧ C4` from prebuilt `C2` clauses. `None` if `|S| > N`.
pub fn assemble(table: &ObservationTable, c2: Vec<Clause>) -> Option<ConstraintSystem> {
    let c4 = build_c4(table)?;
    let mut base = vec![pin_clause()];
    base.extend(build_c1(table));
    base.extend(c2);
    base.extend(c4);
    let mut representatives = table.s().to_vec();
    representatives.extend_from_slice(table.s_plus());
    Some(ConstraintSystem {
        resets: table.rows().len(),
        locations: table.rows().len(),
        n: table.n(),
        base,
        representatives,
    })
}
