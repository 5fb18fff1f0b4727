//! Deterministic one-clock timed automata.

use crate::error::{Error, Result};
use crate::guard::GuardInterval;
use crate::rational::Rational;
use crate::word::{Action, ResetTimedWord, TimedWord};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Transition {
    pub source: usize,
    pub action: Action,
    pub guard: GuardInterval,
    pub reset: bool,
    pub target: usize,
}

/// Result of running a timed word.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DotaRun {
    pub accepted: bool,
    pub reset_word: ResetTimedWord,
    pub reached_sink: bool,
    pub final_location: usize,
}

/// A deterministic one-clock timed automaton. Locations and actions are indices.
#[derive(Clone, Debug)]
pub struct Dota {
    alphabet: Vec<String>,
    locations: Vec<String>,
    initial: usize,
    accepting: Vec<bool>,
    sink: Option<usize>,
    transitions: Vec<Transition>,
    // Transition indices per `loc * |Σ| + action`, sorted by lower bound.
    outgoing: Vec<Vec<usize>>,
}

impl PartialEq for Dota {
    fn eq(&self, other: &Self) -> bool {
        let mut a = self.transitions.clone();
        let mut b = other.transitions.clone();
        let key = |t: &Transition| (t.source, t.action, t.guard.lower(), !t.guard.lower_closed());
        a.sort_by_key(key);
        b.sort_by_key(key);
        self.alphabet == other.alphabet
            && self.locations == other.locations
            && self.initial == other.initial
            && self.accepting == other.accepting
            && self.sink == other.sink
            && a == b
    }
}

impl Dota {
    /// Validates indices, determinism and the sink shape.
    pub fn new(
        alphabet: Vec<String>,
        locations: Vec<String>,
        initial: usize,
        accepting: Vec<bool>,
        sink: Option<usize>,
        transitions: Vec<Transition>,
    ) -> Result<Dota> {
        let n = locations.len();
        if n == 0 {
            return Err(Error::Model("automaton has no locations".into()));
        }
        if alphabet.is_empty() {
            return Err(Error::Model("empty alphabet".into()));
        }
        if initial >= n || accepting.len() != n {
            return Err(Error::Model("location index out of range".into()));
        }
        let k = alphabet.len();
        let mut outgoing = vec![Vec::new(); n * k];
        for (idx, t) in transitions.iter().enumerate() {
            if t.source >= n || t.target >= n || t.action as usize >= k {
                return Err(Error::Model(format!("transition {idx} references an unknown index")));
            }
            outgoing[t.source * k + t.action as usize].push(idx);
        }
        for list in &mut outgoing {
            list.sort_by_key(|&i| {
                let g = transitions[i].guard;
                (g.lower(), !g.lower_closed())
            });
            for w in list.windows(2) {
                let (a, b) = (&transitions[w[0]], &transitions[w[1]]);
                if a.guard.overlaps(&b.guard) {
                    return Err(Error::Model(format!(
                        "nondeterministic: guards {} and {} overlap at {} on {}",
                        a.guard, b.guard, locations[a.source], alphabet[a.action as usize]
                    )));
                }
            }
        }
        if let Some(s) = sink {
            if s >= n {
                return Err(Error::Model("sink index out of range".into()));
            }
            if accepting[s] {
                return Err(Error::Model("sink location is accepting".into()));
            }
            if transitions.iter().any(|t| t.source == s && (t.target != s || !t.reset)) {
                return Err(Error::Model("sink transitions must be resetting self-loops".into()));
            }
        }
        Ok(Dota { alphabet, locations, initial, accepting, sink, transitions, outgoing })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }
    pub fn locations(&self) -> &[String] {
        &self.locations
    }
    pub fn initial(&self) -> usize {
        self.initial
    }
    pub fn is_accepting(&self, loc: usize) -> bool {
        self.accepting[loc]
    }
    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }
    pub fn sink(&self) -> Option<usize> {
        self.sink
    }
    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Transitions leaving `loc` on `action`, ordered by lower bound.
    pub fn outgoing(&self, loc: usize, action: Action) -> impl Iterator<Item = &Transition> {
        self.outgoing[loc * self.alphabet.len() + action as usize].iter().map(|&i| &self.transitions[i])
    }

    /// Largest constant appearing in a guard.
    pub fn kappa(&self) -> u32 {
        self.transitions.iter().map(|t| t.guard.max_constant()).max().unwrap_or(0)
    }

    /// The transition enabled at `loc` on `action` with clock value `v`.
    pub fn step(&self, loc: usize, action: Action, v: Rational) -> Option<&Transition> {
        self.outgoing(loc, action).find(|t| t.guard.contains(v))
    }

    /// Guards per (location, action) cover `[0, ∞)`.
    pub fn is_complete(&self) -> bool {
        (0..self.locations.len()).all(|q| {
            (0..self.alphabet.len() as Action).all(|a| {
                let guards: Vec<GuardInterval> = self.outgoing(q, a).map(|t| t.guard).collect();
                GuardInterval::complement(&guards).is_empty()
            })
        })
    }

    /// Runs `w` from the initial location. Fails on unknown actions or when no
    /// transition is enabled (only possible on incomplete automata).
    pub fn run(&self, w: &TimedWord) -> Result<DotaRun> {
        let mut loc = self.initial;
        let mut clock = Rational::ZERO;
        let mut reset_word = ResetTimedWord::default();
        for s in w.steps() {
            if s.action as usize >= self.alphabet.len() {
                return Err(Error::Input(format!("unknown action index {}", s.action)));
            }
            clock += s.delay;
            let t = self.step(loc, s.action, clock).ok_or_else(|| {
                Error::Input(format!(
                    "no transition from {} on {} at clock {clock}",
                    self.locations[loc], self.alphabet[s.action as usize]
                ))
            })?;
            reset_word.steps.push((*s, t.reset));
            loc = t.target;
            if t.reset {
                clock = Rational::ZERO;
            }
        }
        Ok(DotaRun {
            accepted: self.accepting[loc],
            reset_word,
            reached_sink: self.sink == Some(loc),
            final_location: loc,
        })
    }

    pub fn accepts(&self, w: &TimedWord) -> Result<bool> {
        Ok(self.run(w)?.accepted)
    }

    /// Same language, with every missing guard segment routed to a
    /// non-accepting sink. The sink is only added when something is missing.
    pub fn complete(&self) -> Dota {
        let k = self.alphabet.len();
        let mut missing = Vec::new();
        for q in 0..self.locations.len() {
            for a in 0..k as Action {
                let guards: Vec<GuardInterval> = self.outgoing(q, a).map(|t| t.guard).collect();
                for g in GuardInterval::complement(&guards) {
                    missing.push((q, a, g));
                }
            }
        }
        if missing.is_empty() {
            return self.clone();
        }
        let mut locations = self.locations.clone();
        let mut accepting = self.accepting.clone();
        let mut transitions = self.transitions.clone();
        let sink = match self.sink {
            Some(s) => s,
            None => {
                let mut name = "sink".to_string();
                let mut i = 1;
                while locations.contains(&name) {
                    name = format!("sink_{i}");
                    i += 1;
                }
                locations.push(name);
                accepting.push(false);
                let s = locations.len() - 1;
                for a in 0..k as Action {
                    transitions.push(Transition {
                        source: s,
                        action: a,
                        guard: GuardInterval::all(),
                        reset: true,
                        target: s,
                    });
                }
                s
            }
        };
        for (q, a, g) in missing {
            transitions.push(Transition { source: q, action: a, guard: g, reset: true, target: sink });
        }
        Dota::new(self.alphabet.clone(), locations, self.initial, accepting, Some(sink), transitions)
            .expect("completion preserves validity")
    }

    /// Locations from which no accepting location is reachable (ignoring guards).
    pub fn dead_locations(&self) -> Vec<bool> {
        let n = self.locations.len();
        let mut live = self.accepting.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for t in &self.transitions {
                if live[t.target] && !live[t.source] {
                    live[t.source] = true;
                    changed = true;
                }
            }
        }
        (0..n).map(|q| !live[q]).collect()
    }

    /// Locations reachable from the initial one along the transition graph.
    pub fn graph_reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.locations.len()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(q) = stack.pop() {
            for t in self.transitions.iter().filter(|t| t.source == q) {
                if !seen[t.target] {
                    seen[t.target] = true;
                    stack.push(t.target);
                }
            }
        }
        seen
    }
}
