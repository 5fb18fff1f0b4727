//! Timed words and reset-annotated timed words.
//!
//! Actions are stored as indices into the owning model's alphabet; use
//! [`TimedWord::display`] or [`TimedWord::to_named`] to render names.

use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Index of a symbol in an alphabet.
pub type Action = u32;

/// One delay-action pair; `delay` is measured since the previous action.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Step {
    pub action: Action,
    pub delay: Rational,
}

impl Step {
    pub fn new(action: Action, delay: Rational) -> Self {
        Step { action, delay }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TimedWord {
    steps: Vec<Step>,
}

impl TimedWord {
    pub fn empty() -> Self {
        TimedWord { steps: Vec::new() }
    }

    /// Fails if any delay is negative.
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        if let Some(s) = steps.iter().find(|s| s.delay.is_negative()) {
            return Err(Error::Input(format!("negative delay {}", s.delay)));
        }
        Ok(TimedWord { steps })
    }

    /// Convenience constructor for non-negative literal pairs; panics on negative delays.
    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (Action, Rational)>,
    {
        let steps = pairs.into_iter().map(|(a, d)| Step::new(a, d)).collect();
        TimedWord::new(steps).expect("non-negative delays")
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> Option<&Step> {
        self.steps.last()
    }

    pub fn prefix(&self, len: usize) -> TimedWord {
        TimedWord { steps: self.steps[..len].to_vec() }
    }

    /// All prefixes, shortest first, including ε and the word itself.
    pub fn prefixes(&self) -> impl Iterator<Item = TimedWord> + '_ {
        (0..=self.len()).map(|i| self.prefix(i))
    }

    pub fn push(&mut self, step: Step) {
        assert!(!step.delay.is_negative(), "negative delay");
        self.steps.push(step);
    }

    pub fn extended(&self, step: Step) -> TimedWord {
        let mut w = self.clone();
        w.push(step);
        w
    }

    pub fn concat(&self, other: &TimedWord) -> TimedWord {
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        TimedWord { steps }
    }

    /// Total elapsed time.
    pub fn duration(&self) -> Rational {
        self.steps.iter().fold(Rational::ZERO, |acc, s| acc + s.delay)
    }

    /// Clock value after the word when the last reset happened after step `i`
    /// (`i = 0` means no reset): the sum of delays `t_{i+1}..t_n`.
    pub fn nu_c(&self, i: usize) -> Result<Rational> {
        if i > self.len() {
            return Err(Error::Input(format!("reset index {i} beyond word length {}", self.len())));
        }
        Ok(self.steps[i..].iter().fold(Rational::ZERO, |acc, s| acc + s.delay))
    }

    /// Length of the longest common prefix under exact equality.
    pub fn common_prefix_len(&self, other: &TimedWord) -> usize {
        self.steps.iter().zip(&other.steps).take_while(|(a, b)| a == b).count()
    }

    /// Copy with `extra` added to the first delay.
    pub fn with_first_delay_shifted(&self, extra: Rational) -> TimedWord {
        let mut w = self.clone();
        if let Some(first) = w.steps.first_mut() {
            first.delay += extra;
        }
        w
    }

    pub fn display<'a>(&'a self, alphabet: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, alphabet }
    }

    pub fn to_named(&self, alphabet: &[String]) -> Vec<(String, Rational)> {
        self.steps.iter().map(|s| (alphabet[s.action as usize].clone(), s.delay)).collect()
    }

    pub fn from_named(pairs: &[(String, Rational)], alphabet: &[String]) -> Result<TimedWord> {
        let mut steps = Vec::with_capacity(pairs.len());
        for (name, delay) in pairs {
            let a = lookup(alphabet, name)?;
            steps.push(Step::new(a, *delay));
        }
        TimedWord::new(steps)
    }

    /// Parses the `(a,4)(a,5.5)` notation; `ε` or an empty string is the empty word.
    pub fn parse(text: &str, alphabet: &[String]) -> Result<TimedWord> {
        let text = text.trim();
        if text.is_empty() || text == "ε" || text == "eps" {
            return Ok(TimedWord::empty());
        }
        let mut steps = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in {text:?}")))?;
            let close = body.find(')').ok_or_else(|| Error::Parse(format!("unclosed pair in {text:?}")))?;
            let (name, delay) = body[..close]
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected ',' in {text:?}")))?;
            steps.push(Step::new(lookup(alphabet, name.trim())?, delay.parse()?));
            rest = body[close + 1..].trim_start();
        }
        TimedWord::new(steps)
    }
}

pub(crate) fn lookup(alphabet: &[String], name: &str) -> Result<Action> {
    alphabet
        .iter()
        .position(|a| a == name)
        .map(|i| i as Action)
        .ok_or_else(|| Error::Input(format!("unknown symbol {name:?}")))
}

impl fmt::Debug for TimedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "ε");
        }
        for s in &self.steps {
            write!(f, "(#{},{})", s.action, s.delay)?;
        }
        Ok(())
    }
}

pub struct WordDisplay<'a> {
    word: &'a TimedWord,
    alphabet: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "ε");
        }
        for s in self.word.steps() {
            let name = self.alphabet.get(s.action as usize).map(String::as_str).unwrap_or("?");
            write!(f, "({},{})", name, s.delay)?;
        }
        Ok(())
    }
}

/// A timed word annotated with per-step clock resets.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ResetTimedWord {
    pub steps: Vec<(Step, bool)>,
}

impl ResetTimedWord {
    pub fn word(&self) -> TimedWord {
        TimedWord { steps: self.steps.iter().map(|(s, _)| *s).collect() }
    }

    pub fn resets(&self) -> Vec<bool> {
        self.steps.iter().map(|(_, b)| *b).collect()
    }

    /// Index of the last step that reset the clock, 0 if none did.
    pub fn last_reset(&self) -> usize {
        self.steps.iter().rposition(|(_, b)| *b).map_or(0, |i| i + 1)
    }
}
