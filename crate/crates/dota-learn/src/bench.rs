//! Random targets and batch learning runs.
//!
//! Generator recipe: for every `(location, action)` draw `k ∈ {1, 2, 3}`
//! distinct boundary points from `{0..κ}`, cut `[0, ∞)` at them (each cut
//! closes the left or the right piece by a fair coin; a cut at 0 always yields
//! `[0,0]`), and give every piece a uniform target and a fair-coin reset.
//! Each location accepts with probability 1/2; at least one accepts and, given
//! two or more locations, at least one rejects.
//! Draws with a location unreachable from the initial one are rejected.

use std::collections::VecDeque;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dota::{Dota, Transition};
use crate::error::{Error, Result};
use crate::guard::GuardInterval;
use crate::learner::{learn, LearnerOptions};
use crate::model::Model;
use crate::oracle::dota_counterexample;
use crate::teacher::SimulatedTeacher;
use crate::word::Action;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenParams {
    pub locations: usize,
    pub alphabet_size: usize,
    pub kappa: u32,
    pub seed: u64,
}

impl GenParams {
    /// Parses a group id `|Q|_|Σ|_κ` such as `6_2_10`.
    pub fn from_group(group: &str, seed: u64) -> Result<Self> {
        let parts: Vec<&str> = group.split('_').collect();
        let bad = || Error::Input(format!("group {group:?} is not of the form Q_S_K"));
        let [q, s, k] = parts.as_slice() else { return Err(bad()) };
        let p = GenParams {
            locations: q.parse().map_err(|_| bad())?,
            alphabet_size: s.parse().map_err(|_| bad())?,
            kappa: k.parse().map_err(|_| bad())?,
            seed,
        };
        p.check()?;
        Ok(p)
    }

    pub fn group(&self) -> String {
        format!("{}_{}_{}", self.locations, self.alphabet_size, self.kappa)
    }

    fn check(&self) -> Result<()> {
        if self.locations == 0 || self.alphabet_size == 0 || self.kappa == 0 {
            return Err(Error::Input("locations, alphabet size and kappa must be at least 1".into()));
        }
        Ok(())
    }

    /// Parameters of the `i`-th instance of a batch.
    pub fn instance(&self, i: u64) -> GenParams {
        GenParams { seed: self.seed.wrapping_add(i), ..*self }
    }
}

fn random_partition(rng: &mut ChaCha8Rng, kappa: u32) -> Vec<GuardInterval> {
    let k = rng.gen_range(1..=3).min(kappa as usize + 1);
    let mut cuts: Vec<u32> = sample(rng, kappa as usize + 1, k).into_iter().map(|c| c as u32).collect();
    cuts.sort_unstable();
    let mut out = Vec::new();
    let (mut lo, mut lo_closed) = (0, true);
    for c in cuts {
        let left_gets_point = c == 0 || rng.gen_bool(0.5);
        if !(c == 0 && !lo_closed) {
            out.push(GuardInterval::new(lo, lo_closed, Some(c), left_gets_point).expect("nonempty piece"));
        }
        lo = c;
        lo_closed = !left_gets_point;
    }
    out.push(GuardInterval::new(lo, lo_closed, None, false).expect("nonempty tail"));
    out
}

fn draw(p: &GenParams, rng: &mut ChaCha8Rng) -> Dota {
    let alphabet: Vec<String> = (0..p.alphabet_size)
        .map(|i| if p.alphabet_size <= 26 { ((b'a' + i as u8) as char).to_string() } else { format!("a{i}") })
        .collect();
    let locations: Vec<String> = (0..p.locations).map(|i| format!("q{i}")).collect();
    let mut transitions = Vec::new();
    for source in 0..p.locations {
        for action in 0..p.alphabet_size as Action {
            for guard in random_partition(rng, p.kappa) {
                let target = rng.gen_range(0..p.locations);
                let reset = rng.gen_bool(0.5);
                transitions.push(Transition { source, action, guard, reset, target });
            }
        }
    }
    let mut accepting: Vec<bool> = (0..p.locations).map(|_| rng.gen_bool(0.5)).collect();
    if !accepting.contains(&true) {
        accepting[rng.gen_range(0..p.locations)] = true;
    }
    if p.locations > 1 && !accepting.contains(&false) {
        accepting[rng.gen_range(0..p.locations)] = false;
    }
    Dota::new(alphabet, locations, 0, accepting, None, transitions).expect("generated automaton is valid")
}

/// Complete deterministic target in which every location is reachable.
pub fn generate_random_dota(p: &GenParams) -> Result<Dota> {
    p.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    loop {
        let a = draw(p, &mut rng);
        if reachable_locations(&a).iter().all(|&r| r) {
            return Ok(a);
        }
    }
}

/// Locations some timed word reaches, by search over (location, clock region).
pub fn reachable_locations(a: &Dota) -> Vec<bool> {
    let top = 2 * u64::from(a.kappa()) + 1;
    let n = a.locations().len();
    let mut seen = vec![vec![false; top as usize + 1]; n];
    let mut queue = VecDeque::from([(a.initial(), 0u64)]);
    seen[a.initial()][0] = true;
    while let Some((q, r)) = queue.pop_front() {
        for t in a.transitions().iter().filter(|t| t.source == q) {
            for r2 in r..=top {
                if t.guard.contains_region_index(r2) {
                    let next = (t.target, if t.reset { 0 } else { r2 });
                    if !seen[next.0][next.1 as usize] {
                        seen[next.0][next.1 as usize] = true;
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    seen.iter().map(|row| row.contains(&true)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceReport {
    pub seed: u64,
    pub target_locations: usize,
    pub target_transitions: usize,
    pub learned: bool,
    /// Separately confirmed by the equivalence oracle.
    pub verified: bool,
    pub membership: u64,
    pub equivalence: u64,
    pub learned_locations: usize,
    #[serde(rename = "final_N")]
    pub final_n: u32,
    pub wall_time: f64,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Spread {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl Spread {
    fn of(values: impl Iterator<Item = f64>) -> Spread {
        let v: Vec<f64> = values.collect();
        if v.is_empty() {
            return Spread::default();
        }
        Spread {
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            mean: v.iter().sum::<f64>() / v.len() as f64,
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub group: String,
    pub count: usize,
    /// Instances learned and verified equivalent.
    pub learnt: usize,
    pub transitions: Spread,
    pub membership: Spread,
    pub equivalence: Spread,
    pub learned_locations: Spread,
    pub wall_time: Spread,
    pub instances: Vec<InstanceReport>,
}

impl BenchReport {
    pub const CSV_HEADER: &'static str = "group,transitions_mean,mq_min,mq_mean,mq_max,eq_min,eq_mean,eq_max,\
        locations_mean,learnt,count,time_mean_s";

    /// One line in the column order of [`Self::CSV_HEADER`]; spreads cover verified runs.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.1},{},{:.1},{},{},{:.1},{},{:.1},{},{},{:.3}",
            self.group,
            self.transitions.mean,
            self.membership.min,
            self.membership.mean,
            self.membership.max,
            self.equivalence.min,
            self.equivalence.mean,
            self.equivalence.max,
            self.learned_locations.mean,
            self.learnt,
            self.count,
            self.wall_time.mean,
        )
    }
}

pub fn run_instance(params: &GenParams, options: &LearnerOptions) -> InstanceReport {
    let started = Instant::now();
    let mut report = InstanceReport {
        seed: params.seed,
        target_locations: params.locations,
        target_transitions: 0,
        learned: false,
        verified: false,
        membership: 0,
        equivalence: 0,
        learned_locations: 0,
        final_n: 0,
        wall_time: 0.0,
        error: None,
    };
    let target = match generate_random_dota(params) {
        Ok(t) => t,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    report.target_transitions = target.transitions().len();
    let mut teacher = SimulatedTeacher::new(Model::Dota(target.clone()));
    match learn(&mut teacher, options) {
        Ok(out) => {
            report.learned = true;
            report.membership = out.stats.membership;
            report.equivalence = out.stats.equivalence;
            report.learned_locations = out.model.location_count();
            report.final_n = out.stats.final_n;
            if let Model::Dota(h) = &out.model {
                match dota_counterexample(&target.complete(), h) {
                    Ok(None) => report.verified = true,
                    Ok(Some(w)) => report.error = Some(format!("learned model differs on {}", w.display(h.alphabet()))),
                    Err(e) => report.error = Some(e.to_string()),
                }
            }
        }
        Err(Error::Budget { reason, stats }) => {
            report.membership = stats.membership;
            report.equivalence = stats.equivalence;
            report.final_n = stats.final_n;
            report.error = Some(reason);
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    report.wall_time = started.elapsed().as_secs_f64();
    report
}

/// Learns `count` generated targets on `threads` workers (0 = rayon default).
pub fn run_benchmark(params: &GenParams, count: usize, options: &LearnerOptions, threads: usize) -> BenchReport {
    let work = || -> Vec<InstanceReport> {
        (0..count as u64).into_par_iter().map(|i| run_instance(&params.instance(i), options)).collect()
    };
    let instances = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    };
    let ok: Vec<&InstanceReport> = instances.iter().filter(|r| r.verified).collect();
    BenchReport {
        group: params.group(),
        count,
        learnt: ok.len(),
        transitions: Spread::of(instances.iter().map(|r| r.target_transitions as f64)),
        membership: Spread::of(ok.iter().map(|r| r.membership as f64)),
        equivalence: Spread::of(ok.iter().map(|r| r.equivalence as f64)),
        learned_locations: Spread::of(ok.iter().map(|r| r.learned_locations as f64)),
        wall_time: Spread::of(instances.iter().map(|r| r.wall_time)),
        instances,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_deterministic_and_valid() {
        let p = GenParams::from_group("6_2_10", 3).unwrap();
        let a = generate_random_dota(&p).unwrap();
        assert_eq!(a, generate_random_dota(&p).unwrap());
        assert_eq!(a.locations().len(), 6);
        assert!(a.is_complete());
        assert!(a.sink().is_none());
        assert!(a.accepting().contains(&true));
        assert!(a.accepting().contains(&false));
        assert!(a.kappa() <= 10);
        assert!(reachable_locations(&a).iter().all(|&r| r));
    }

    #[test]
    fn smallest_instance() {
        let p = GenParams { locations: 1, alphabet_size: 1, kappa: 1, seed: 9 };
        let a = generate_random_dota(&p).unwrap();
        assert!((1..=3).contains(&a.transitions().len()));
        assert!(a.is_complete());
    }

    #[test]
    fn partitions_cover_the_half_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let g = random_partition(&mut rng, 4);
            assert!(GuardInterval::complement(&g).is_empty());
            for w in g.windows(2) {
                assert!(!w[0].overlaps(&w[1]));
            }
        }
    }

    #[test]
    fn reachability_respects_guards() {
        let g = |s: &str| s.parse::<GuardInterval>().unwrap();
        let t = |source, guard: &str, reset, target| Transition { source, action: 0, guard: g(guard), reset, target };
        // q1 is entered with clock ≥ 2 and leaves for q2 only below 1.
        let a = Dota::new(
            vec!["a".into()],
            vec!["q0".into(), "q1".into(), "q2".into()],
            0,
            vec![true, false, false],
            None,
            vec![t(0, "[0,2)", true, 0), t(0, "[2,+)", false, 1), t(1, "[0,1)", false, 2), t(1, "[1,+)", false, 1), t(2, "[0,+)", false, 2)],
        )
        .unwrap();
        assert_eq!(reachable_locations(&a), [true, true, false]);
        assert_eq!(a.graph_reachable(), [true, true, true]);
    }

    #[test]
    fn empty_batch() {
        let p = GenParams::from_group("2_1_2", 0).unwrap();
        let r = run_benchmark(&p, 0, &LearnerOptions::default(), 1);
        assert_eq!((r.count, r.learnt, r.instances.len()), (0, 0, 0));
    }
}
