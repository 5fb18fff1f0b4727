//! Small reference models bundled with the crate.

use crate::dota::Dota;
use crate::dtmm::Dtmm;
use crate::model::Model;
use crate::word::TimedWord;

pub const DELAY_WINDOW_JSON: &str = include_str!("../data/delay_window.json");
pub const ALTERNATING_BIT_JSON: &str = include_str!("../data/alternating_bit.json");
pub const DELAY_WINDOW_COUNTEREXAMPLES: &str = include_str!("../data/delay_window_counterexamples.txt");

/// Single-action automaton accepting words whose delays alternate between
/// `[4,9]` (first) and `[4,∞)` (second, measured without reset). Complete, with sink `q2`.
pub fn delay_window() -> Dota {
    match Model::from_json(DELAY_WINDOW_JSON).expect("bundled model parses") {
        Model::Dota(a) => a,
        Model::Dtmm(_) => unreachable!(),
    }
}

/// Alternating-bit protocol sender with a 3-unit retransmission timeout,
/// completed with `void` self-loops for inputs the protocol ignores.
pub fn alternating_bit_sender() -> Dtmm {
    match Model::from_json(ALTERNATING_BIT_JSON).expect("bundled model parses") {
        Model::Dtmm(m) => m.complete_with_void_loops(),
        Model::Dota(_) => unreachable!(),
    }
}

/// The four counterexamples that drive the worked learning trace on [`delay_window`].
pub fn delay_window_counterexamples() -> Vec<TimedWord> {
    let alphabet = ["a".to_string()];
    DELAY_WINDOW_COUNTEREXAMPLES
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| TimedWord::parse(l, &alphabet).expect("bundled word parses"))
        .collect()
}
