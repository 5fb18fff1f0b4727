//! A hand-written teacher around a system defined in code.
//!
//! The hidden system is a light switch: pressing it within 2 time units of the
//! previous press toggles it off again, otherwise it turns (or stays) on.

use dota_learn::dota::{Dota, Transition};
use dota_learn::error::Result;
use dota_learn::guard::GuardInterval;
use dota_learn::learner::{learn, LearnerOptions};
use dota_learn::model::Model;
use dota_learn::oracle::dota_counterexample;
use dota_learn::teacher::{Answer, Mode, Teacher, TeacherStats};
use dota_learn::word::TimedWord;

struct Switch {
    system: Dota,
    alphabet: Vec<String>,
    stats: TeacherStats,
}

impl Teacher for Switch {
    fn mode(&self) -> Mode {
        Mode::Dota
    }
    fn alphabet(&self) -> &[String] {
        &self.alphabet
    }
    fn outputs(&self) -> &[String] {
        &[]
    }
    fn membership(&mut self, w: &TimedWord) -> Result<Answer> {
        self.stats.membership_count += 1;
        Ok(Answer::Accept(self.system.accepts(w)?))
    }
    fn membership_sink(&mut self, w: &TimedWord) -> Result<(Answer, bool)> {
        Ok((self.membership(w)?, false))
    }
    fn equivalence(&mut self, hyp: &Model) -> Result<Option<TimedWord>> {
        self.stats.equivalence_count += 1;
        let hyp = hyp.as_dota().expect("automaton hypothesis");
        dota_counterexample(&self.system, hyp)
    }
    fn stats(&self) -> TeacherStats {
        self.stats
    }
    fn sink_info(&self) -> bool {
        false
    }
}

fn main() -> Result<()> {
    let quick = GuardInterval::new(0, true, Some(2), false)?;
    let slow = GuardInterval::new(2, true, None, false)?;
    let t = |source, guard, target| Transition { source, action: 0, guard, reset: true, target };
    let system = Dota::new(
        vec!["press".into()],
        vec!["off".into(), "on".into()],
        0,
        vec![false, true],
        None,
        vec![t(0, quick, 1), t(0, slow, 1), t(1, quick, 0), t(1, slow, 1)],
    )?;
    let mut teacher = Switch { system, alphabet: vec!["press".into()], stats: TeacherStats::default() };
    let outcome = learn(&mut teacher, &LearnerOptions::default())?;
    println!("{}", outcome.model.to_json());
    println!("{:?}", teacher.stats());
    Ok(())
}
