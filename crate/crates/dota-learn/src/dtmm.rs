//! Deterministic timed Mealy machines with one clock.

use crate::error::{Error, Result};
use crate::guard::GuardInterval;
use crate::rational::Rational;
use crate::word::{Action, TimedWord};

/// Name of the empty input and output action.
pub const VOID: &str = "void";

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct MealyTransition {
    pub source: usize,
    pub input: Action,
    pub output: Action,
    pub guard: GuardInterval,
    pub reset: bool,
    pub target: usize,
}

#[derive(Clone, Debug)]
pub struct Dtmm {
    inputs: Vec<String>,
    outputs: Vec<String>,
    locations: Vec<String>,
    initial: usize,
    transitions: Vec<MealyTransition>,
    outgoing: Vec<Vec<usize>>,
}

impl PartialEq for Dtmm {
    fn eq(&self, other: &Self) -> bool {
        let key = |t: &MealyTransition| (t.source, t.input, t.guard.lower(), !t.guard.lower_closed());
        let mut a = self.transitions.clone();
        let mut b = other.transitions.clone();
        a.sort_by_key(key);
        b.sort_by_key(key);
        self.inputs == other.inputs
            && self.outputs == other.outputs
            && self.locations == other.locations
            && self.initial == other.initial
            && a == b
    }
}

impl Dtmm {
    /// Validates indices and determinism. Completeness is checked separately.
    pub fn new(
        inputs: Vec<String>,
        outputs: Vec<String>,
        locations: Vec<String>,
        initial: usize,
        transitions: Vec<MealyTransition>,
    ) -> Result<Dtmm> {
        let n = locations.len();
        if n == 0 || inputs.is_empty() || outputs.is_empty() {
            return Err(Error::Model("machine needs locations, inputs and outputs".into()));
        }
        if initial >= n {
            return Err(Error::Model("initial location out of range".into()));
        }
        let k = inputs.len();
        let mut outgoing = vec![Vec::new(); n * k];
        for (idx, t) in transitions.iter().enumerate() {
            if t.source >= n || t.target >= n || t.input as usize >= k || t.output as usize >= outputs.len() {
                return Err(Error::Model(format!("transition {idx} references an unknown index")));
            }
            outgoing[t.source * k + t.input as usize].push(idx);
        }
        for list in &mut outgoing {
            list.sort_by_key(|&i| (transitions[i].guard.lower(), !transitions[i].guard.lower_closed()));
            for w in list.windows(2) {
                let (a, b) = (&transitions[w[0]], &transitions[w[1]]);
                if a.guard.overlaps(&b.guard) {
                    return Err(Error::Model(format!(
                        "nondeterministic: guards {} and {} overlap at {} on {}",
                        a.guard, b.guard, locations[a.source], inputs[a.input as usize]
                    )));
                }
            }
        }
        Ok(Dtmm { inputs, outputs, locations, initial, transitions, outgoing })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }
    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }
    pub fn locations(&self) -> &[String] {
        &self.locations
    }
    pub fn initial(&self) -> usize {
        self.initial
    }
    pub fn transitions(&self) -> &[MealyTransition] {
        &self.transitions
    }

    pub fn outgoing(&self, loc: usize, input: Action) -> impl Iterator<Item = &MealyTransition> {
        self.outgoing[loc * self.inputs.len() + input as usize].iter().map(|&i| &self.transitions[i])
    }

    pub fn kappa(&self) -> u32 {
        self.transitions.iter().map(|t| t.guard.max_constant()).max().unwrap_or(0)
    }

    pub fn step(&self, loc: usize, input: Action, v: Rational) -> Option<&MealyTransition> {
        self.outgoing(loc, input).find(|t| t.guard.contains(v))
    }

    pub fn is_complete(&self) -> bool {
        (0..self.locations.len()).all(|q| {
            (0..self.inputs.len() as Action).all(|a| {
                let guards: Vec<GuardInterval> = self.outgoing(q, a).map(|t| t.guard).collect();
                GuardInterval::complement(&guards).is_empty()
            })
        })
    }

    /// Output sequence (as output indices) produced by `w`.
    pub fn run(&self, w: &TimedWord) -> Result<Vec<Action>> {
        let mut loc = self.initial;
        let mut clock = Rational::ZERO;
        let mut out = Vec::with_capacity(w.len());
        for s in w.steps() {
            if s.action as usize >= self.inputs.len() {
                return Err(Error::Input(format!("unknown input index {}", s.action)));
            }
            clock += s.delay;
            let t = self.step(loc, s.action, clock).ok_or_else(|| {
                Error::Input(format!(
                    "no transition from {} on {} at clock {clock}",
                    self.locations[loc], self.inputs[s.action as usize]
                ))
            })?;
            out.push(t.output);
            loc = t.target;
            if t.reset {
                clock = Rational::ZERO;
            }
        }
        Ok(out)
    }

    /// Output names for `w`.
    pub fn run_named(&self, w: &TimedWord) -> Result<Vec<String>> {
        Ok(self.run(w)?.into_iter().map(|o| self.outputs[o as usize].clone()).collect())
    }

    /// Completes every missing guard segment with a self-loop that outputs
    /// `void` and keeps the clock running. Adds `void` to the outputs if absent.
    pub fn complete_with_void_loops(&self) -> Dtmm {
        let mut outputs = self.outputs.clone();
        let void = match outputs.iter().position(|o| o == VOID) {
            Some(i) => i as Action,
            None => {
                outputs.push(VOID.to_string());
                (outputs.len() - 1) as Action
            }
        };
        let mut transitions = self.transitions.clone();
        for q in 0..self.locations.len() {
            for a in 0..self.inputs.len() as Action {
                let guards: Vec<GuardInterval> = self.outgoing(q, a).map(|t| t.guard).collect();
                for g in GuardInterval::complement(&guards) {
                    transitions.push(MealyTransition {
                        source: q,
                        input: a,
                        output: void,
                        guard: g,
                        reset: false,
                        target: q,
                    });
                }
            }
        }
        Dtmm::new(self.inputs.clone(), outputs, self.locations.clone(), self.initial, transitions)
            .expect("completion preserves validity")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::alternating_bit_sender;

    #[test]
    fn alternating_bit_outputs() {
        let m = alternating_bit_sender();
        assert!(m.is_complete());
        let w = |s: &str| TimedWord::parse(s, m.inputs()).unwrap();
        assert_eq!(m.run_named(&w("(in,2)")).unwrap(), ["send0"]);
        assert!(m.run_named(&w("")).unwrap().is_empty());
        assert_eq!(m.run_named(&w("(in,2)(void,3)")).unwrap(), ["send0", "send0"]);
        assert_eq!(m.run_named(&w("(in,2)(ack0,1)")).unwrap(), ["send0", "void"]);
    }

    #[test]
    fn unknown_input_rejected() {
        let m = alternating_bit_sender();
        let bad = TimedWord::from_pairs([(9, Rational::ONE)]);
        assert!(matches!(m.run(&bad), Err(Error::Input(_))));
    }
}
