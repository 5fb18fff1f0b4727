//! Conflict-driven clause learning over a one-hot location encoding.
//!
//! Decisions follow a fixed order (locations row by row with value 1 first,
//! then resets, then auxiliaries) with fixed phases and no restarts. Every
//! learnt clause is implied by the input, so no literal on the trail can
//! contradict the lexicographically least model under that order, and the
//! first model found is that one.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use super::{Clause, ConstraintSystem, Lit, Overlay, SolverBackend, SolverModel};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Default, Debug, PartialEq, Eq)]
pub struct SolverStats {
    pub vars: usize,
    pub clauses: usize,
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
}

#[derive(Clone, Debug)]
pub struct InternalSolver {
    /// Order interchangeable location values by first use.
    pub symmetry_breaking: bool,
    pub deadline: Option<Instant>,
    last: SolverStats,
}

impl Default for InternalSolver {
    fn default() -> Self {
        InternalSolver { symmetry_breaking: true, deadline: None, last: SolverStats::default() }
    }
}

impl InternalSolver {
    pub fn with_deadline(deadline: Instant) -> Self {
        InternalSolver { deadline: Some(deadline), ..InternalSolver::default() }
    }

    pub fn last_stats(&self) -> SolverStats {
        self.last
    }
}

impl SolverBackend for InternalSolver {
    fn name(&self) -> String {
        "internal".into()
    }

    fn solve(&mut self, sys: &ConstraintSystem, overlay: Overlay) -> Result<Option<SolverModel>> {
        let extra = sys.overlay(overlay);
        let clauses: Vec<&Clause> = sys.base.iter().chain(&extra).collect();
        if sys.n == 0 {
            let trivial = SolverModel { resets: vec![false; sys.resets], locations: vec![] };
            return Ok((sys.locations == 0 && sys.holds(overlay, &trivial)).then_some(trivial));
        }
        let mut enc = Encoder::new(sys.resets, sys.locations, sys.n);
        for c in &clauses {
            enc.add(c);
        }
        if self.symmetry_breaking {
            enc.value_precedence(&symmetric_values(&clauses, sys.n));
        }
        let (n_vars, n_clauses) = (enc.num_vars, enc.clauses.len());
        let order = enc.order();
        let mut cdcl = Cdcl::new(enc.num_vars, order.0, order.1);
        let sat = !enc.unsat && enc.clauses.into_iter().all(|c| cdcl.add_clause(c)) && cdcl.search(self.deadline)?;
        self.last = SolverStats { vars: n_vars, clauses: n_clauses, ..cdcl.stats };
        if !sat {
            return Ok(None);
        }
        let model = SolverModel {
            resets: (0..sys.resets).map(|v| cdcl.assigns[v] == TRUE).collect(),
            locations: (0..sys.locations)
                .map(|q| (1..=sys.n).find(|&k| cdcl.assigns[x_var(sys.resets, sys.n, q, k) as usize] == TRUE).unwrap_or(0))
                .collect(),
        };
        if let Some(bad) = sys.violated(overlay, &model) {
            return Err(Error::Solver(format!("internal solver produced a model violating {bad}")));
        }
        if model.locations.contains(&0) {
            return Err(Error::Solver("internal solver left a location unassigned".into()));
        }
        Ok(Some(model))
    }
}

fn x_var(nb: usize, n: u32, q: usize, k: u32) -> u32 {
    (nb + q * n as usize + (k as usize - 1)) as u32
}

/// Location values that every clause treats alike. A value pinned by a unit
/// clause or mentioned together with another value drops out.
pub(crate) fn symmetric_values(clauses: &[&Clause], n: u32) -> Vec<u32> {
    let mut free: BTreeSet<u32> = (1..=n).collect();
    let mut groups: BTreeMap<Vec<Lit>, BTreeSet<u32>> = BTreeMap::new();
    for c in clauses {
        let values: BTreeSet<u32> = c
            .lits
            .iter()
            .filter_map(|l| match *l {
                Lit::QIs(_, k) if (1..=n).contains(&k) => Some(k),
                _ => None,
            })
            .collect();
        match values.len() {
            0 => {}
            1 => {
                let k = *values.first().unwrap();
                let mut key: Vec<Lit> = c
                    .lits
                    .iter()
                    .filter_map(|l| match *l {
                        Lit::QIs(_, v) if !(1..=n).contains(&v) => None,
                        Lit::QIs(q, _) => Some(Lit::QIs(q, 0)),
                        other => Some(other),
                    })
                    .collect();
                key.sort();
                key.dedup();
                groups.entry(key).or_default().insert(k);
            }
            _ => free.retain(|v| !values.contains(v)),
        }
    }
    loop {
        let mut changed = false;
        for group in groups.values() {
            if group.iter().any(|v| free.contains(v)) && !free.is_subset(group) {
                free.retain(|v| !group.contains(v));
                changed = true;
            }
        }
        if !changed {
            return free.into_iter().collect();
        }
    }
}

const TRUE: u8 = 1;
const FALSE: u8 = 0;
const UNDEF: u8 = 2;
const NONE: u32 = u32::MAX;

fn pos(v: u32) -> u32 {
    v << 1
}

fn neg(v: u32) -> u32 {
    (v << 1) | 1
}

enum Tr {
    Const(bool),
    L(u32),
}

struct Encoder {
    nb: usize,
    nq: usize,
    n: u32,
    num_vars: usize,
    clauses: Vec<Vec<u32>>,
    aux: HashMap<(bool, usize, usize), u32>,
    unsat: bool,
}

impl Encoder {
    fn new(nb: usize, nq: usize, n: u32) -> Self {
        let mut e = Encoder {
            nb,
            nq,
            n,
            num_vars: nb + nq * n as usize,
            clauses: Vec::new(),
            aux: HashMap::new(),
            unsat: false,
        };
        for q in 0..nq {
            e.clauses.push((1..=n).map(|k| pos(e.x(q, k))).collect());
            for k1 in 1..=n {
                for k2 in k1 + 1..=n {
                    e.clauses.push(vec![neg(e.x(q, k1)), neg(e.x(q, k2))]);
                }
            }
        }
        e
    }

    fn x(&self, q: usize, k: u32) -> u32 {
        x_var(self.nb, self.n, q, k)
    }

    fn fresh(&mut self) -> u32 {
        self.num_vars += 1;
        (self.num_vars - 1) as u32
    }

    /// Literal implying `q_a = q_b` (or `≠` when `eq` is false).
    fn relation(&mut self, eq: bool, a: usize, b: usize) -> u32 {
        let key = (eq, a.min(b), a.max(b));
        if let Some(&v) = self.aux.get(&key) {
            return pos(v);
        }
        let v = self.fresh();
        self.aux.insert(key, v);
        for k in 1..=self.n {
            let (xa, xb) = (self.x(a, k), self.x(b, k));
            if eq {
                self.clauses.push(vec![neg(v), neg(xa), pos(xb)]);
                self.clauses.push(vec![neg(v), pos(xa), neg(xb)]);
            } else {
                self.clauses.push(vec![neg(v), neg(xa), neg(xb)]);
            }
        }
        pos(v)
    }

    fn translate(&self, l: Lit) -> Option<Tr> {
        Some(match l {
            Lit::B(v, p) => Tr::L(if p { pos(v as u32) } else { neg(v as u32) }),
            Lit::QIs(q, k) if (1..=self.n).contains(&k) => Tr::L(pos(self.x(q, k))),
            Lit::QIs(..) => Tr::Const(false),
            Lit::QEq(a, b) if a == b => Tr::Const(true),
            Lit::QNeq(a, b) if a == b => Tr::Const(false),
            Lit::QEq(..) | Lit::QNeq(..) => return None,
        })
    }

    fn add(&mut self, c: &Clause) {
        let mut lits = Vec::with_capacity(c.lits.len());
        let mut relations = Vec::new();
        for &l in &c.lits {
            match self.translate(l) {
                Some(Tr::Const(true)) => return,
                Some(Tr::Const(false)) => {}
                Some(Tr::L(x)) => lits.push(x),
                None => relations.push(l),
            }
        }
        if lits.is_empty() && relations.len() == 1 {
            for k in 1..=self.n {
                match relations[0] {
                    Lit::QNeq(a, b) => self.clauses.push(vec![neg(self.x(a, k)), neg(self.x(b, k))]),
                    Lit::QEq(a, b) => {
                        self.clauses.push(vec![neg(self.x(a, k)), pos(self.x(b, k))]);
                        self.clauses.push(vec![pos(self.x(a, k)), neg(self.x(b, k))]);
                    }
                    _ => unreachable!(),
                }
            }
            return;
        }
        for r in relations {
            let x = match r {
                Lit::QEq(a, b) => self.relation(true, a, b),
                Lit::QNeq(a, b) => self.relation(false, a, b),
                _ => unreachable!(),
            };
            lits.push(x);
        }
        if lits.is_empty() {
            self.unsat = true;
        }
        self.clauses.push(lits);
    }

    /// For consecutive symmetric values `f < g`: a row may take `g` only if an
    /// earlier row took `f`.
    fn value_precedence(&mut self, values: &[u32]) {
        if values.len() < 2 || self.nq == 0 {
            return;
        }
        for pair in values.windows(2) {
            let (f, g) = (pair[0], pair[1]);
            // seen[w]: some row `<= w` takes `f`.
            let mut seen_prev: Option<u32> = None;
            for w in 0..self.nq {
                match seen_prev {
                    None => self.clauses.push(vec![neg(self.x(w, g))]),
                    Some(s) => self.clauses.push(vec![neg(self.x(w, g)), pos(s)]),
                }
                let s = self.fresh();
                let mut def = vec![neg(s), pos(self.x(w, f))];
                if let Some(p) = seen_prev {
                    def.push(pos(p));
                }
                self.clauses.push(def);
                seen_prev = Some(s);
            }
        }
    }

    fn order(&self) -> (Vec<u32>, Vec<bool>) {
        let first_x = self.nb;
        let last_x = self.nb + self.nq * self.n as usize;
        let order = (first_x..last_x).chain(0..self.nb).chain(last_x..self.num_vars).map(|v| v as u32).collect();
        let phase = (0..self.num_vars).map(|v| (first_x..last_x).contains(&v)).collect();
        (order, phase)
    }
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: u32,
}

struct Cdcl {
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<u32>,
    trail_lim: Vec<usize>,
    qhead: usize,
    clauses: Vec<Vec<u32>>,
    learnt: Vec<bool>,
    deleted: Vec<bool>,
    live_learnts: usize,
    max_learnts: usize,
    watches: Vec<Vec<Watch>>,
    order: Vec<u32>,
    order_pos: Vec<usize>,
    phase: Vec<bool>,
    next: usize,
    seen: Vec<bool>,
    stats: SolverStats,
}

fn value(assigns: &[u8], lit: u32) -> u8 {
    let a = assigns[(lit >> 1) as usize];
    if a == UNDEF {
        UNDEF
    } else {
        a ^ (lit & 1) as u8
    }
}

impl Cdcl {
    fn new(num_vars: usize, order: Vec<u32>, phase: Vec<bool>) -> Self {
        let mut order_pos = vec![0; num_vars];
        for (i, &v) in order.iter().enumerate() {
            order_pos[v as usize] = i;
        }
        Cdcl {
            assigns: vec![UNDEF; num_vars],
            level: vec![0; num_vars],
            reason: vec![NONE; num_vars],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            clauses: Vec::new(),
            learnt: Vec::new(),
            deleted: Vec::new(),
            live_learnts: 0,
            max_learnts: 20_000,
            watches: vec![Vec::new(); 2 * num_vars],
            order,
            order_pos,
            phase,
            next: 0,
            seen: vec![false; num_vars],
            stats: SolverStats::default(),
        }
    }

    fn enqueue(&mut self, lit: u32, reason: u32) {
        let v = (lit >> 1) as usize;
        self.assigns[v] = TRUE ^ (lit & 1) as u8;
        self.level[v] = self.trail_lim.len() as u32;
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    /// Adds an input clause at level 0; false means the formula is unsatisfiable.
    fn add_clause(&mut self, mut c: Vec<u32>) -> bool {
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return true;
        }
        match c.len() {
            0 => false,
            1 => match value(&self.assigns, c[0]) {
                FALSE => false,
                TRUE => true,
                _ => {
                    self.enqueue(c[0], NONE);
                    true
                }
            },
            _ => {
                self.attach(c, false);
                true
            }
        }
    }

    fn attach(&mut self, c: Vec<u32>, learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[c[0] as usize].push(Watch { cref, blocker: c[1] });
        self.watches[c[1] as usize].push(Watch { cref, blocker: c[0] });
        self.clauses.push(c);
        self.learnt.push(learnt);
        self.deleted.push(false);
        cref
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let fl = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[fl as usize]);
            let (mut i, mut j) = (0, 0);
            let mut confl = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.deleted[w.cref as usize] {
                    continue;
                }
                if value(&self.assigns, w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let c = &mut self.clauses[w.cref as usize];
                if c[0] == fl {
                    c.swap(0, 1);
                }
                let first = c[0];
                let kept = Watch { cref: w.cref, blocker: first };
                if first != w.blocker && value(&self.assigns, first) == TRUE {
                    ws[j] = kept;
                    j += 1;
                    continue;
                }
                if let Some(k) = (2..c.len()).find(|&k| value(&self.assigns, c[k]) != FALSE) {
                    c.swap(1, k);
                    self.watches[c[1] as usize].push(kept);
                    continue;
                }
                ws[j] = kept;
                j += 1;
                if value(&self.assigns, first) == FALSE {
                    confl = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[fl as usize] = ws;
            if confl.is_some() {
                self.qhead = self.trail.len();
                return confl;
            }
        }
        None
    }

    /// First-UIP learnt clause (asserting literal first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<u32>, u32) {
        let current = self.trail_lim.len() as u32;
        let mut learnt = vec![0u32];
        let mut path = 0usize;
        let mut p: Option<u32> = None;
        let mut idx = self.trail.len();
        loop {
            let c = &self.clauses[confl as usize];
            let start = usize::from(p.is_some());
            for &q in &c[start..] {
                let v = (q >> 1) as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[(self.trail[idx] >> 1) as usize] {
                    break;
                }
            }
            let pl = self.trail[idx];
            let v = (pl >> 1) as usize;
            self.seen[v] = false;
            p = Some(pl);
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[v];
        }
        learnt[0] = p.expect("conflict at a decision level") ^ 1;
        let all = learnt.clone();
        let mut keep = vec![learnt[0]];
        for &q in &learnt[1..] {
            let r = self.reason[(q >> 1) as usize];
            let redundant = r != NONE
                && self.clauses[r as usize][1..].iter().all(|&x| {
                    let u = (x >> 1) as usize;
                    self.seen[u] || self.level[u] == 0
                });
            if !redundant {
                keep.push(q);
            }
        }
        for q in all {
            self.seen[(q >> 1) as usize] = false;
        }
        let mut bt = 0;
        if keep.len() > 1 {
            let (mut best, mut best_level) = (1, 0);
            for (k, &q) in keep.iter().enumerate().skip(1) {
                let l = self.level[(q >> 1) as usize];
                if l > best_level {
                    best = k;
                    best_level = l;
                }
            }
            keep.swap(1, best);
            bt = best_level;
        }
        (keep, bt)
    }

    fn cancel_until(&mut self, level: usize) {
        if self.trail_lim.len() <= level {
            return;
        }
        let lim = self.trail_lim[level];
        for &lit in &self.trail[lim..] {
            let v = (lit >> 1) as usize;
            self.assigns[v] = UNDEF;
            self.reason[v] = NONE;
            self.next = self.next.min(self.order_pos[v]);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level);
        self.qhead = lim;
    }

    /// Drops the longer half of the learnt clauses that are not reasons.
    fn reduce(&mut self) {
        let locked: BTreeSet<u32> = self.trail.iter().map(|&l| self.reason[(l >> 1) as usize]).collect();
        let mut cands: Vec<(usize, u32)> = (0..self.clauses.len())
            .filter(|&c| self.learnt[c] && !self.deleted[c] && self.clauses[c].len() > 2 && !locked.contains(&(c as u32)))
            .map(|c| (self.clauses[c].len(), c as u32))
            .collect();
        cands.sort_unstable_by(|a, b| b.cmp(a));
        for &(_, c) in &cands[..cands.len() / 2] {
            self.deleted[c as usize] = true;
            self.clauses[c as usize] = Vec::new();
            self.live_learnts -= 1;
        }
        self.max_learnts += self.max_learnts / 10;
    }

    fn search(&mut self, deadline: Option<Instant>) -> Result<bool> {
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                if self.trail_lim.is_empty() {
                    return Ok(false);
                }
                if self.stats.conflicts.is_multiple_of(256) && deadline.is_some_and(|d| Instant::now() > d) {
                    return Err(Error::Solver("solver deadline exceeded".into()));
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt as usize);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NONE);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.live_learnts += 1;
                    self.enqueue(first, cref);
                }
                if self.live_learnts > self.max_learnts {
                    self.reduce();
                }
                continue;
            }
            while self.next < self.order.len() && self.assigns[self.order[self.next] as usize] != UNDEF {
                self.next += 1;
            }
            let Some(&v) = self.order.get(self.next) else { return Ok(true) };
            self.stats.decisions += 1;
            self.trail_lim.push(self.trail.len());
            let lit = if self.phase[v as usize] { pos(v) } else { neg(v) };
            self.enqueue(lit, NONE);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::Family;

    fn sys(resets: usize, locations: usize, n: u32, base: Vec<Vec<Lit>>, reps: Vec<usize>) -> ConstraintSystem {
        ConstraintSystem {
            resets,
            locations,
            n,
            base: base.into_iter().map(|l| Clause::new(l, Family::C1, vec![])).collect(),
            representatives: reps,
        }
    }

    #[test]
    fn empty_system_takes_first_values() {
        let s = sys(3, 3, 1, vec![], vec![0]);
        let m = InternalSolver::default().solve(&s, Overlay::Closed).unwrap().unwrap();
        assert_eq!(m.locations, [1, 1, 1]);
        assert_eq!(m.resets, [false, false, false]);
    }

    #[test]
    fn disequalities_need_enough_values() {
        let triangle = vec![vec![Lit::QNeq(0, 1)], vec![Lit::QNeq(1, 2)], vec![Lit::QNeq(0, 2)]];
        let s2 = sys(0, 3, 2, triangle.clone(), vec![0, 1, 2]);
        assert!(InternalSolver::default().solve(&s2, Overlay::Relaxed).unwrap().is_none());
        let s3 = sys(0, 3, 3, triangle, vec![0, 1, 2]);
        let m = InternalSolver::default().solve(&s3, Overlay::Closed).unwrap().unwrap();
        assert_eq!(m.locations, [1, 2, 3]);
    }

    #[test]
    fn closedness_overlay_can_make_a_system_unsat() {
        let s = sys(0, 2, 2, vec![vec![Lit::QIs(0, 1)], vec![Lit::QEq(0, 1)]], vec![0]);
        assert!(InternalSolver::default().solve(&s, Overlay::Relaxed).unwrap().is_some());
        assert!(InternalSolver::default().solve(&s, Overlay::Closed).unwrap().is_none());
    }

    #[test]
    fn symmetric_values_skip_pinned_ones() {
        let c4 = Clause::new(vec![Lit::QIs(0, 1)], Family::C4, vec![]);
        let c1 = Clause::new(vec![Lit::QNeq(0, 1)], Family::C1, vec![]);
        assert_eq!(symmetric_values(&[&c4, &c1], 4), [2, 3, 4]);
        let s = sys(0, 2, 4, vec![], vec![0, 1]);
        let c3 = s.overlay(Overlay::Closed);
        let refs: Vec<&Clause> = c3.iter().chain([&c4]).collect();
        assert_eq!(symmetric_values(&refs, 4), [2, 3, 4]);
        let odd = Clause::new(vec![Lit::QIs(1, 3)], Family::C1, vec![]);
        assert_eq!(symmetric_values(&[&c4, &odd], 4), [2, 4]);
    }
}
