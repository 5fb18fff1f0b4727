//! Exact equivalence checking for complete one-clock automata and Mealy machines.
//!
//! The two machines run in lockstep, each with its own clock. The pair of
//! clocks is abstracted by two-clock regions: integer part (capped at the
//! largest guard constant), integrality, and the order of the fractional
//! parts. Breadth-first search over this finite graph finds a shortest
//! distinguishing path, which is then replayed with concrete delays.

use std::collections::{HashSet, VecDeque};

use crate::dota::Dota;
use crate::dtmm::Dtmm;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::rational::Rational;
use crate::word::{Action, Step, TimedWord};

/// Order of the fractional parts of the two clocks.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum FracOrder {
    /// Not comparable: at least one clock is integral or beyond the cap.
    None,
    Less,
    Equal,
    Greater,
}

/// Product state: a location of each machine and the joint clock region.
///
/// Clock regions are indices: `2n` is the point `n`, `2n+1` the interval
/// `(n, n+1)`, and `2κ+1` stands for every value above `κ`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ProductState {
    pub loc_target: usize,
    pub loc_hyp: usize,
    pub region_target: u32,
    pub region_hyp: u32,
    pub order: FracOrder,
}

struct Abstraction {
    top: u32,
}

impl Abstraction {
    fn new(kappa: u32) -> Self {
        Abstraction { top: 2 * kappa + 1 }
    }

    fn region_of(&self, v: Rational) -> u32 {
        let n = v.floor() as u64;
        let r = if v.is_integer() { 2 * n } else { 2 * n + 1 };
        r.min(self.top as u64) as u32
    }

    fn frac_live(&self, r: u32) -> bool {
        r % 2 == 1 && r < self.top
    }

    fn order_of(&self, x: Rational, y: Rational) -> FracOrder {
        let (rx, ry) = (self.region_of(x), self.region_of(y));
        if !(self.frac_live(rx) && self.frac_live(ry)) {
            return FracOrder::None;
        }
        let fx = x - Rational::from_int(x.floor());
        let fy = y - Rational::from_int(y.floor());
        match fx.cmp(&fy) {
            std::cmp::Ordering::Less => FracOrder::Less,
            std::cmp::Ordering::Equal => FracOrder::Equal,
            std::cmp::Ordering::Greater => FracOrder::Greater,
        }
    }

    fn key(&self, x: Rational, y: Rational) -> Key {
        (self.region_of(x), self.region_of(y), self.order_of(x, y))
    }

    /// Symbolic time successors of a clock-region pair, starting with itself.
    fn successors(&self, mut rx: u32, mut ry: u32, mut ord: FracOrder) -> Vec<Key> {
        let mut out = vec![(rx, ry, ord)];
        loop {
            let (x_top, y_top) = (rx == self.top, ry == self.top);
            if x_top && y_top {
                return out;
            }
            let x_int = !x_top && rx.is_multiple_of(2);
            let y_int = !y_top && ry.is_multiple_of(2);
            if x_int || y_int {
                // Integral clocks leave their point; they now hold the smallest fraction.
                if x_int {
                    rx += 1;
                }
                if y_int {
                    ry += 1;
                }
                let (lx, ly) = (self.frac_live(rx), self.frac_live(ry));
                ord = match (lx && ly, x_int, y_int) {
                    (false, _, _) => FracOrder::None,
                    (true, true, true) => FracOrder::Equal,
                    (true, true, false) => FracOrder::Less,
                    (true, false, true) => FracOrder::Greater,
                    (true, false, false) => ord,
                };
            } else {
                // Every live clock is fractional: the largest fraction reaches the next integer.
                let (lx, ly) = (self.frac_live(rx), self.frac_live(ry));
                let (bump_x, bump_y) = match (lx, ly) {
                    (true, true) => match ord {
                        FracOrder::Greater => (true, false),
                        FracOrder::Less => (false, true),
                        _ => (true, true),
                    },
                    (true, false) => (true, false),
                    (false, true) => (false, true),
                    (false, false) => unreachable!("non-top clocks are live or integral"),
                };
                if bump_x {
                    rx = (rx + 1).min(self.top);
                }
                if bump_y {
                    ry = (ry + 1).min(self.top);
                }
                ord = FracOrder::None;
            }
            out.push((rx, ry, ord));
        }
    }

    /// Concrete delay leading from `(x, y)` into the region pair `want`.
    /// Boundary points are hit exactly; open stretches use the simplest rational inside.
    fn concretize(&self, x: Rational, y: Rational, want: Key) -> Option<Rational> {
        let kappa = ((self.top - 1) / 2) as i64;
        let mut cuts = vec![Rational::ZERO];
        for v in [x, y] {
            let mut n = v.floor() + 1;
            while n <= kappa + 1 {
                cuts.push(Rational::from_int(n) - v);
                n += 1;
            }
        }
        cuts.sort();
        cuts.dedup();
        let mut candidates = Vec::with_capacity(cuts.len() * 2 + 1);
        for (i, &c) in cuts.iter().enumerate() {
            candidates.push(c);
            let next = cuts.get(i + 1).copied();
            candidates.push(Rational::simplest_between(c, next));
        }
        candidates.into_iter().find(|&d| self.key(x + d, y + d) == want)
    }
}

/// One synchronized step of the two machines: `(target, reset)` per side plus
/// a flag telling whether the observable behaviour differs after the step.
trait Lockstep {
    fn kappa(&self) -> u32;
    fn initial(&self) -> (usize, usize);
    fn initial_differs(&self) -> bool;
    fn alphabet_len(&self) -> usize;
    /// Returns `((next_a, reset_a), (next_b, reset_b), differs)`.
    fn step(&self, qa: usize, ra: u32, qb: usize, rb: u32, action: Action) -> ((usize, bool), (usize, bool), bool);
    fn prune(&self, _qa: usize, _qb: usize) -> bool {
        false
    }
    fn confirm(&self, w: &TimedWord) -> Result<bool>;
}

// Per (location, action, clock region) transition lookup.
struct RegionTable {
    k: usize,
    regions: usize,
    cells: Vec<u32>,
}

impl RegionTable {
    fn build<G>(locs: usize, k: usize, top: u32, mut find: G) -> RegionTable
    where
        G: FnMut(usize, Action, u32) -> u32,
    {
        let regions = top as usize + 1;
        let mut cells = vec![0; locs * k * regions];
        for q in 0..locs {
            for a in 0..k {
                for r in 0..regions {
                    cells[(q * k + a) * regions + r] = find(q, a as Action, r as u32);
                }
            }
        }
        RegionTable { k, regions, cells }
    }

    fn get(&self, q: usize, a: Action, r: u32) -> usize {
        self.cells[(q * self.k + a as usize) * self.regions + r as usize] as usize
    }
}

fn region_lookup<T>(outgoing: impl Iterator<Item = (usize, T)>, r: u32, contains: impl Fn(&T, u64) -> bool) -> u32 {
    for (i, g) in outgoing {
        if contains(&g, r as u64) {
            return i as u32;
        }
    }
    panic!("machine is not complete")
}

struct DotaPair<'a> {
    a: &'a Dota,
    b: &'a Dota,
    kappa: u32,
    ta: RegionTable,
    tb: RegionTable,
    dead_a: Vec<bool>,
    dead_b: Vec<bool>,
}

impl<'a> DotaPair<'a> {
    fn new(a: &'a Dota, b: &'a Dota) -> Self {
        let kappa = a.kappa().max(b.kappa());
        let top = 2 * kappa + 1;
        let table = |m: &Dota| {
            RegionTable::build(m.locations().len(), m.alphabet().len(), top, |q, act, r| {
                let idx: Vec<(usize, crate::guard::GuardInterval)> = m
                    .transitions()
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.source == q && t.action == act)
                    .map(|(i, t)| (i, t.guard))
                    .collect();
                region_lookup(idx.into_iter(), r, |g, r| g.contains_region_index(r))
            })
        };
        DotaPair { a, b, kappa, ta: table(a), tb: table(b), dead_a: a.dead_locations(), dead_b: b.dead_locations() }
    }
}

impl Lockstep for DotaPair<'_> {
    fn kappa(&self) -> u32 {
        self.kappa
    }
    fn initial(&self) -> (usize, usize) {
        (self.a.initial(), self.b.initial())
    }
    fn initial_differs(&self) -> bool {
        self.a.is_accepting(self.a.initial()) != self.b.is_accepting(self.b.initial())
    }
    fn alphabet_len(&self) -> usize {
        self.a.alphabet().len()
    }
    fn step(&self, qa: usize, ra: u32, qb: usize, rb: u32, action: Action) -> ((usize, bool), (usize, bool), bool) {
        let ta = &self.a.transitions()[self.ta.get(qa, action, ra)];
        let tb = &self.b.transitions()[self.tb.get(qb, action, rb)];
        let differs = self.a.is_accepting(ta.target) != self.b.is_accepting(tb.target);
        ((ta.target, ta.reset), (tb.target, tb.reset), differs)
    }
    fn prune(&self, qa: usize, qb: usize) -> bool {
        self.dead_a[qa] && self.dead_b[qb]
    }
    fn confirm(&self, w: &TimedWord) -> Result<bool> {
        Ok(self.a.accepts(w)? != self.b.accepts(w)?)
    }
}

struct DtmmPair<'a> {
    a: &'a Dtmm,
    b: &'a Dtmm,
    kappa: u32,
    ta: RegionTable,
    tb: RegionTable,
}

impl<'a> DtmmPair<'a> {
    fn new(a: &'a Dtmm, b: &'a Dtmm) -> Self {
        let kappa = a.kappa().max(b.kappa());
        let top = 2 * kappa + 1;
        let table = |m: &Dtmm| {
            RegionTable::build(m.locations().len(), m.inputs().len(), top, |q, inp, r| {
                let idx: Vec<(usize, crate::guard::GuardInterval)> = m
                    .transitions()
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.source == q && t.input == inp)
                    .map(|(i, t)| (i, t.guard))
                    .collect();
                region_lookup(idx.into_iter(), r, |g, r| g.contains_region_index(r))
            })
        };
        DtmmPair { a, b, kappa, ta: table(a), tb: table(b) }
    }
}

impl Lockstep for DtmmPair<'_> {
    fn kappa(&self) -> u32 {
        self.kappa
    }
    fn initial(&self) -> (usize, usize) {
        (self.a.initial(), self.b.initial())
    }
    fn initial_differs(&self) -> bool {
        false
    }
    fn alphabet_len(&self) -> usize {
        self.a.inputs().len()
    }
    fn step(&self, qa: usize, ra: u32, qb: usize, rb: u32, input: Action) -> ((usize, bool), (usize, bool), bool) {
        let ta = &self.a.transitions()[self.ta.get(qa, input, ra)];
        let tb = &self.b.transitions()[self.tb.get(qb, input, rb)];
        let differs = self.a.outputs()[ta.output as usize] != self.b.outputs()[tb.output as usize];
        ((ta.target, ta.reset), (tb.target, tb.reset), differs)
    }
    fn confirm(&self, w: &TimedWord) -> Result<bool> {
        Ok(self.a.run_named(w)? != self.b.run_named(w)?)
    }
}

type Key = (u32, u32, FracOrder);

// Parent pointer: parent node, action, region pair at the action, resets taken.
type Edge = (usize, Action, Key, (bool, bool));

fn search(pair: &dyn Lockstep) -> Result<Option<TimedWord>> {
    if pair.initial_differs() {
        return Ok(Some(TimedWord::empty()));
    }
    let abs = Abstraction::new(pair.kappa());
    let (qa0, qb0) = pair.initial();
    let start = ProductState { loc_target: qa0, loc_hyp: qb0, region_target: 0, region_hyp: 0, order: FracOrder::None };
    let mut nodes: Vec<(ProductState, Option<Edge>)> = vec![(start, None)];
    let mut seen: HashSet<ProductState> = HashSet::from([start]);
    let mut queue = VecDeque::from([0usize]);
    let k = pair.alphabet_len();
    while let Some(id) = queue.pop_front() {
        let (st, _) = nodes[id];
        if pair.prune(st.loc_target, st.loc_hyp) {
            continue;
        }
        let succ = abs.successors(st.region_target, st.region_hyp, st.order);
        for a in 0..k as Action {
            for &(rx, ry, ord) in &succ {
                let ((na, reset_a), (nb, reset_b), differs) = pair.step(st.loc_target, rx, st.loc_hyp, ry, a);
                if differs {
                    let w = concretize_path(&abs, &nodes, id, (a, (rx, ry, ord), (reset_a, reset_b)))?;
                    if !pair.confirm(&w)? {
                        return Err(Error::Contract("counterexample failed replay".into()));
                    }
                    return Ok(Some(w));
                }
                let nrx = if reset_a { 0 } else { rx };
                let nry = if reset_b { 0 } else { ry };
                let nord = if abs.frac_live(nrx) && abs.frac_live(nry) { ord } else { FracOrder::None };
                let next = ProductState { loc_target: na, loc_hyp: nb, region_target: nrx, region_hyp: nry, order: nord };
                if seen.insert(next) {
                    nodes.push((next, Some((id, a, (rx, ry, ord), (reset_a, reset_b)))));
                    queue.push_back(nodes.len() - 1);
                }
            }
        }
    }
    Ok(None)
}

fn concretize_path(
    abs: &Abstraction,
    nodes: &[(ProductState, Option<Edge>)],
    last: usize,
    final_step: (Action, Key, (bool, bool)),
) -> Result<TimedWord> {
    let mut path = vec![final_step];
    let mut cur = last;
    while let Some((parent, a, key, resets)) = nodes[cur].1 {
        path.push((a, key, resets));
        cur = parent;
    }
    path.reverse();
    let (mut x, mut y) = (Rational::ZERO, Rational::ZERO);
    let mut word = TimedWord::empty();
    for (a, want, (reset_x, reset_y)) in path {
        let d = abs
            .concretize(x, y, want)
            .ok_or_else(|| Error::Contract("region path cannot be concretized".into()))?;
        word.push(Step::new(a, d));
        x = if reset_x { Rational::ZERO } else { x + d };
        y = if reset_y { Rational::ZERO } else { y + d };
    }
    Ok(word)
}

/// Shortest distinguishing word between two complete automata, or `None` if
/// they accept the same timed language.
pub fn dota_counterexample(target: &Dota, hyp: &Dota) -> Result<Option<TimedWord>> {
    if target.alphabet() != hyp.alphabet() {
        return Err(Error::Input("alphabets differ".into()));
    }
    if !target.is_complete() || !hyp.is_complete() {
        return Err(Error::Input("equivalence requires complete automata".into()));
    }
    search(&DotaPair::new(target, hyp))
}

/// Shortest input word on which two complete Mealy machines produce different outputs.
pub fn dtmm_counterexample(target: &Dtmm, hyp: &Dtmm) -> Result<Option<TimedWord>> {
    if target.inputs() != hyp.inputs() {
        return Err(Error::Input("input alphabets differ".into()));
    }
    if !target.is_complete() || !hyp.is_complete() {
        return Err(Error::Input("equivalence requires complete machines".into()));
    }
    search(&DtmmPair::new(target, hyp))
}

/// Distinguishing word between two models of the same kind, completing both first.
pub fn model_counterexample(a: &Model, b: &Model) -> Result<Option<TimedWord>> {
    match (a, b) {
        (Model::Dota(x), Model::Dota(y)) => dota_counterexample(&x.complete(), &y.complete()),
        (Model::Dtmm(x), Model::Dtmm(y)) => {
            dtmm_counterexample(&x.complete_with_void_loops(), &y.complete_with_void_loops())
        }
        _ => Err(Error::Input("cannot compare an automaton with a Mealy machine".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dota::Transition;
    use crate::model::Model;
    use crate::reference::{alternating_bit_sender, delay_window};

    fn dota(json: &str) -> Dota {
        match Model::from_json(json).unwrap() {
            Model::Dota(a) => a.complete(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn reflexive() {
        assert_eq!(dota_counterexample(&delay_window(), &delay_window()).unwrap(), None);
        let m = alternating_bit_sender();
        assert_eq!(dtmm_counterexample(&m, &m).unwrap(), None);
    }

    #[test]
    fn single_location_hypothesis_is_refuted() {
        let h = dota(
            r#"{"type":"dota","alphabet":["a"],"locations":["q0","q1"],"initial":"q0","accepting":["q0"],"sink":null,
            "transitions":[{"source":"q0","action":"a","guard":"[0,+)","reset":false,"target":"q1"},
                           {"source":"q1","action":"a","guard":"[0,+)","reset":false,"target":"q1"}]}"#,
        );
        let ctx = dota_counterexample(&delay_window(), &h).unwrap().unwrap();
        assert_ne!(delay_window().accepts(&ctx).unwrap(), h.accepts(&ctx).unwrap());
        assert_eq!(ctx.len(), 1);
    }

    #[test]
    fn boundary_difference_found_exactly() {
        let base = delay_window();
        let mut ts: Vec<Transition> = base.transitions().to_vec();
        for t in &mut ts {
            if t.source == 0 && t.guard.to_string() == "[4,9]" {
                t.guard = "[4,9)".parse().unwrap();
            }
            if t.source == 0 && t.guard.to_string() == "(9,+)" {
                t.guard = "[9,+)".parse().unwrap();
            }
        }
        let h = Dota::new(
            base.alphabet().to_vec(),
            base.locations().to_vec(),
            0,
            base.accepting().to_vec(),
            base.sink(),
            ts,
        )
        .unwrap();
        let ctx = dota_counterexample(&base, &h).unwrap().unwrap();
        assert_eq!(ctx, TimedWord::from_pairs([(0, Rational::from_int(9))]));
    }

    #[test]
    fn fractional_order_matters() {
        // Differ only when the second delay pushes a non-reset clock past 1
        // while the freshly reset clock stays below 1.
        let a = dota(
            r#"{"type":"dota","alphabet":["a","b"],"locations":["p","q","r"],"initial":"p","accepting":["r"],"sink":null,
            "transitions":[{"source":"p","action":"a","guard":"(0,1)","reset":false,"target":"q"},
                           {"source":"q","action":"b","guard":"(1,2)","reset":false,"target":"r"}]}"#,
        );
        let b = dota(
            r#"{"type":"dota","alphabet":["a","b"],"locations":["p","q","r"],"initial":"p","accepting":["r"],"sink":null,
            "transitions":[{"source":"p","action":"a","guard":"(0,1)","reset":true,"target":"q"},
                           {"source":"q","action":"b","guard":"(0,1)","reset":false,"target":"r"}]}"#,
        );
        let ctx = dota_counterexample(&a, &b).unwrap().unwrap();
        assert_ne!(a.accepts(&ctx).unwrap(), b.accepts(&ctx).unwrap());
    }

    #[test]
    fn mealy_output_flip_detected() {
        let m = alternating_bit_sender();
        let mut ts = m.transitions().to_vec();
        let send1 = m.outputs().iter().position(|o| o == "send1").unwrap() as Action;
        for t in &mut ts {
            if t.source == 0 && m.inputs()[t.input as usize] == "in" {
                t.output = send1;
            }
        }
        let h = Dtmm::new(m.inputs().to_vec(), m.outputs().to_vec(), m.locations().to_vec(), 0, ts).unwrap();
        let ctx = dtmm_counterexample(&m, &h).unwrap().unwrap();
        assert_eq!(ctx.len(), 1);
        assert_eq!(m.inputs()[ctx.steps()[0].action as usize], "in");
    }

    #[test]
    fn mealy_guard_boundary_detected() {
        let m = alternating_bit_sender();
        let mut ts = m.transitions().to_vec();
        let void_in = m.inputs().iter().position(|o| o == "void").unwrap() as Action;
        for t in &mut ts {
            if t.source == 1 && t.input == void_in {
                t.guard = match t.guard.to_string().as_str() {
                    "[3,3]" => "[2,3]".parse().unwrap(),
                    "[0,3)" => "[0,2)".parse().unwrap(),
                    _ => t.guard,
                };
            }
        }
        let h = Dtmm::new(m.inputs().to_vec(), m.outputs().to_vec(), m.locations().to_vec(), 0, ts).unwrap();
        let ctx = dtmm_counterexample(&m, &h).unwrap().unwrap();
        let last = ctx.steps().last().unwrap();
        assert_eq!(last.action, void_in);
        assert_ne!(m.run(&ctx).unwrap(), h.run(&ctx).unwrap());
    }
}
