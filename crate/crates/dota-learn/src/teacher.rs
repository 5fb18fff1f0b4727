//! Teachers answer membership and equivalence queries about a hidden model.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Model;
use crate::oracle::{dota_counterexample, dtmm_counterexample};
use crate::word::{Action, TimedWord};

/// What a membership query reveals.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Answer {
    /// Acceptance verdict of an automaton.
    Accept(bool),
    /// Output sequence of a Mealy machine, one output per input.
    Outputs(Vec<Action>),
}

impl Answer {
    pub fn accepted(&self) -> Option<bool> {
        match self {
            Answer::Accept(b) => Some(*b),
            Answer::Outputs(_) => None,
        }
    }

    pub fn outputs(&self) -> Option<&[Action]> {
        match self {
            Answer::Outputs(o) => Some(o),
            Answer::Accept(_) => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Dota,
    Dtmm,
}

#[derive(Clone, Copy, Default, Debug, PartialEq, Eq, Serialize)]
pub struct TeacherStats {
    /// Distinct timed words queried; repeats are cache hits.
    pub membership_count: u64,
    pub equivalence_count: u64,
    pub cache_hits: u64,
}

pub trait Teacher {
    fn mode(&self) -> Mode;
    /// Actions (or inputs) the learner may use.
    fn alphabet(&self) -> &[String];
    /// Output names for Mealy targets; empty for automata.
    fn outputs(&self) -> &[String];
    fn membership(&mut self, w: &TimedWord) -> Result<Answer>;
    /// Membership plus whether the run ends in the sink location.
    fn membership_sink(&mut self, w: &TimedWord) -> Result<(Answer, bool)>;
    /// `None` when `hyp` is equivalent to the target, otherwise a counterexample.
    fn equivalence(&mut self, hyp: &Model) -> Result<Option<TimedWord>>;
    fn stats(&self) -> TeacherStats;
    fn sink_info(&self) -> bool;
}

/// Holds the target model and answers queries exactly.
pub struct SimulatedTeacher {
    target: Model,
    cache: HashMap<TimedWord, (Answer, bool)>,
    stats: TeacherStats,
    sink_info: bool,
}

impl SimulatedTeacher {
    /// Completes the target first: automata get a sink, Mealy machines get
    /// `void` self-loops on missing guard segments.
    pub fn new(target: Model) -> Self {
        let target = match target {
            Model::Dota(a) => Model::Dota(a.complete()),
            Model::Dtmm(m) => Model::Dtmm(m.complete_with_void_loops()),
        };
        SimulatedTeacher { target, cache: HashMap::new(), stats: TeacherStats::default(), sink_info: false }
    }

    /// Enables [`Teacher::membership_sink`].
    pub fn with_sink_info(mut self, on: bool) -> Self {
        self.sink_info = on;
        self
    }

    pub fn target(&self) -> &Model {
        &self.target
    }

    fn lookup(&mut self, w: &TimedWord) -> Result<(Answer, bool)> {
        if let Some(hit) = self.cache.get(w) {
            self.stats.cache_hits += 1;
            return Ok(hit.clone());
        }
        let result = match &self.target {
            Model::Dota(a) => {
                let run = a.run(w)?;
                (Answer::Accept(run.accepted), run.reached_sink)
            }
            Model::Dtmm(m) => (Answer::Outputs(m.run(w)?), false),
        };
        self.stats.membership_count += 1;
        self.cache.insert(w.clone(), result.clone());
        Ok(result)
    }

    /// Acceptance verdict; fails on Mealy targets.
    pub fn mq(&mut self, w: &TimedWord) -> Result<bool> {
        self.lookup(w)?.0.accepted().ok_or_else(|| Error::Input("target is not an automaton".into()))
    }

    /// Output names; fails on automaton targets.
    pub fn mq_dtmm(&mut self, w: &TimedWord) -> Result<Vec<String>> {
        let Model::Dtmm(m) = &self.target else {
            return Err(Error::Input("target is not a Mealy machine".into()));
        };
        let outs = m.outputs().to_vec();
        let ans = self.lookup(w)?.0;
        Ok(ans.outputs().unwrap_or_default().iter().map(|&o| outs[o as usize].clone()).collect())
    }

    pub fn mq_sink(&mut self, w: &TimedWord) -> Result<(bool, bool)> {
        let (ans, sink) = self.membership_sink(w)?;
        Ok((ans.accepted().ok_or_else(|| Error::Input("target is not an automaton".into()))?, sink))
    }

    pub(crate) fn count_equivalence(&mut self) {
        self.stats.equivalence_count += 1;
    }
}

impl Teacher for SimulatedTeacher {
    fn mode(&self) -> Mode {
        match self.target {
            Model::Dota(_) => Mode::Dota,
            Model::Dtmm(_) => Mode::Dtmm,
        }
    }

    fn alphabet(&self) -> &[String] {
        self.target.alphabet()
    }

    fn outputs(&self) -> &[String] {
        match &self.target {
            Model::Dota(_) => &[],
            Model::Dtmm(m) => m.outputs(),
        }
    }

    fn membership(&mut self, w: &TimedWord) -> Result<Answer> {
        Ok(self.lookup(w)?.0)
    }

    fn membership_sink(&mut self, w: &TimedWord) -> Result<(Answer, bool)> {
        if !self.sink_info {
            return Err(Error::Capability("sink information is disabled".into()));
        }
        self.lookup(w)
    }

    fn equivalence(&mut self, hyp: &Model) -> Result<Option<TimedWord>> {
        self.stats.equivalence_count += 1;
        match (&self.target, hyp) {
            (Model::Dota(t), Model::Dota(h)) => dota_counterexample(t, h),
            (Model::Dtmm(t), Model::Dtmm(h)) => dtmm_counterexample(t, h),
            _ => Err(Error::Input("hypothesis kind differs from target kind".into())),
        }
    }

    fn stats(&self) -> TeacherStats {
        self.stats
    }

    fn sink_info(&self) -> bool {
        self.sink_info
    }
}

/// Replays a fixed list of counterexamples before deferring to the exact oracle.
pub struct ScriptedTeacher {
    inner: SimulatedTeacher,
    script: VecDeque<TimedWord>,
}

impl ScriptedTeacher {
    pub fn new(inner: SimulatedTeacher, script: Vec<TimedWord>) -> Self {
        ScriptedTeacher { inner, script: script.into() }
    }

    pub fn remaining(&self) -> usize {
        self.script.len()
    }
}

impl Teacher for ScriptedTeacher {
    fn mode(&self) -> Mode {
        self.inner.mode()
    }
    fn alphabet(&self) -> &[String] {
        self.inner.alphabet()
    }
    fn outputs(&self) -> &[String] {
        self.inner.outputs()
    }
    fn membership(&mut self, w: &TimedWord) -> Result<Answer> {
        self.inner.membership(w)
    }
    fn membership_sink(&mut self, w: &TimedWord) -> Result<(Answer, bool)> {
        self.inner.membership_sink(w)
    }
    fn equivalence(&mut self, hyp: &Model) -> Result<Option<TimedWord>> {
        match self.script.pop_front() {
            Some(ctx) => {
                self.inner.count_equivalence();
                Ok(Some(ctx))
            }
            None => self.inner.equivalence(hyp),
        }
    }
    fn stats(&self) -> TeacherStats {
        self.inner.stats()
    }
    fn sink_info(&self) -> bool {
        self.inner.sink_info()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{alternating_bit_sender, delay_window};

    fn w(s: &str) -> TimedWord {
        TimedWord::parse(s, &["a".to_string()]).unwrap()
    }

    #[test]
    fn membership_on_reference_automaton() {
        let mut t = SimulatedTeacher::new(Model::Dota(delay_window()));
        assert!(t.mq(&w("(a,4)")).unwrap());
        assert!(!t.mq(&w("(a,9.5)")).unwrap());
        assert!(t.mq(&w("")).unwrap());
    }

    #[test]
    fn sink_queries_need_the_capability() {
        let mut t = SimulatedTeacher::new(Model::Dota(delay_window()));
        assert!(matches!(t.mq_sink(&w("(a,0)")), Err(Error::Capability(_))));
        let mut t = t.with_sink_info(true);
        assert_eq!(t.mq_sink(&w("(a,9.5)")).unwrap(), (false, true));
        assert_eq!(t.mq_sink(&w("(a,4)")).unwrap(), (true, false));
        assert_eq!(t.mq_sink(&w("(a,0)")).unwrap(), (false, true));
    }

    #[test]
    fn cache_hits_do_not_count_as_queries() {
        let mut t = SimulatedTeacher::new(Model::Dota(delay_window()));
        let a = t.mq(&w("(a,4)")).unwrap();
        let b = t.mq(&w("(a,4)")).unwrap();
        assert_eq!(a, b);
        let s = t.stats();
        assert_eq!((s.membership_count, s.cache_hits), (1, 1));
    }

    #[test]
    fn mealy_membership() {
        let m = alternating_bit_sender();
        let inputs = m.inputs().to_vec();
        let mut t = SimulatedTeacher::new(Model::Dtmm(m));
        let q = |s: &str| TimedWord::parse(s, &inputs).unwrap();
        assert_eq!(t.mq_dtmm(&q("(in,2)")).unwrap(), ["send0"]);
        assert!(t.mq_dtmm(&q("")).unwrap().is_empty());
        assert_eq!(t.mq_dtmm(&q("(in,2)(ack0,1)")).unwrap(), ["send0", "void"]);
    }

    #[test]
    fn scripted_teacher_replays_then_defers() {
        let inner = SimulatedTeacher::new(Model::Dota(delay_window()));
        let mut t = ScriptedTeacher::new(inner, vec![w("(a,4)")]);
        let h = Model::Dota(delay_window());
        assert_eq!(t.equivalence(&h).unwrap(), Some(w("(a,4)")));
        assert_eq!(t.equivalence(&h).unwrap(), None);
        assert_eq!(t.stats().equivalence_count, 2);
    }
}
