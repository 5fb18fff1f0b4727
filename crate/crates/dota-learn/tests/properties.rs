use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dota_learn::bench::{generate_random_dota, GenParams};
use dota_learn::constraints::{assemble, build_c2, Family, InternalSolver, Overlay, SolverBackend};
use dota_learn::dota::Dota;
use dota_learn::guard::Region;
use dota_learn::hypothesis::partition;
use dota_learn::learner::{learn, learn_observed, write_trace, LearnerOptions};
use dota_learn::model::Model;
use dota_learn::rational::Rational;
use dota_learn::table::{ObservationTable, TableOptions};
use dota_learn::teacher::{SimulatedTeacher, Teacher};
use dota_learn::word::TimedWord;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn target(seed: u64, locations: usize, actions: usize, kappa: u32) -> Dota {
    generate_random_dota(&GenParams { locations, alphabet_size: actions, kappa, seed }).unwrap()
}

/// Delays are multiples of 1/2 up to `κ + 2`.
fn word(pairs: &[(u32, i64)], actions: usize) -> TimedWord {
    TimedWord::from_pairs(pairs.iter().map(|&(a, d)| (a % actions as u32, Rational::new(d, 2))))
}

fn word_strategy(max_len: usize) -> impl Strategy<Value = Vec<(u32, i64)>> {
    prop::collection::vec((0u32..4, 0i64..=24), 0..=max_len)
}

/// A table over a random target with a few random rows and suffixes, plus that target.
fn random_table(seed: u64) -> (ObservationTable, SimulatedTeacher, Dota) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = target(seed, rng.gen_range(1..=4), rng.gen_range(1..=2), rng.gen_range(1..=5));
    let actions = a.alphabet().len() as u32;
    let half_kappa = 2 * (a.kappa() as i64 + 2);
    let rand_word = |rng: &mut ChaCha8Rng, len: usize| {
        TimedWord::from_pairs((0..len).map(|_| (rng.gen_range(0..actions), Rational::new(rng.gen_range(0..=half_kappa), 2))))
    };
    let mut teacher = SimulatedTeacher::new(Model::Dota(a.clone()));
    let mut table = ObservationTable::new(&mut teacher, TableOptions::default()).unwrap();
    for _ in 0..rng.gen_range(1..=4) {
        let len = rng.gen_range(1..=3);
        let w = rand_word(&mut rng, len);
        for k in 1..=len {
            table.add_row(&mut teacher, w.prefix(k)).unwrap();
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        let len = rng.gen_range(1..=2);
        let e = rand_word(&mut rng, len);
        table.add_suffix(&mut teacher, e).unwrap();
    }
    (table, teacher, a)
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn rationals_round_trip(n in -10_000i64..10_000, d in 1i64..64) {
        let v = Rational::new(n, d);
        prop_assert_eq!(v.to_string().parse::<Rational>().unwrap(), v);
    }

    #[test]
    fn regions_match_floor_and_integrality(n1 in 0i64..200, d1 in 1i64..8, n2 in 0i64..200, d2 in 1i64..8) {
        let (v1, v2) = (Rational::new(n1, d1), Rational::new(n2, d2));
        let same = v1.floor() == v2.floor() && v1.is_integer() == v2.is_integer();
        prop_assert_eq!(Region::of(v1) == Region::of(v2), same);
    }

    #[test]
    fn partition_covers_the_half_line(picks in prop::collection::vec((any::<bool>(), 1i64..7), 0..30)) {
        let mut values = vec![Rational::ZERO];
        for (idx, &(take, frac)) in picks.iter().enumerate() {
            let idx = idx as i64 + 1;
            if take {
                values.push(if idx % 2 == 0 { Rational::from_int(idx / 2) } else { Rational::new(idx / 2 * 7 + frac, 7) });
            }
        }
        let gs = partition(&values).unwrap();
        for (g, v) in gs.iter().zip(&values) {
            prop_assert!(g.contains(*v));
        }
        for k in 0..(2 * picks.len() as i64 + 6) {
            let v = Rational::new(k, 2);
            prop_assert_eq!(gs.iter().filter(|g| g.contains(v)).count(), 1);
        }
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn complete_automata_run_every_word(seed in 0u64..10_000, w in word_strategy(6)) {
        let a = target(seed, 4, 2, 6);
        prop_assert!(a.is_complete());
        let run = a.run(&word(&w, 2)).unwrap();
        prop_assert!(run.final_location < a.locations().len());
    }

    #[test]
    fn completion_keeps_the_language(seed in 0u64..10_000, drop in prop::collection::vec(any::<bool>(), 24), w in word_strategy(5)) {
        let full = target(seed, 3, 2, 5);
        let kept: Vec<_> = full.transitions().iter().zip(drop.iter().cycle()).filter(|(_, d)| !**d).map(|(t, _)| *t).collect();
        let partial = Dota::new(full.alphabet().to_vec(), full.locations().to_vec(), full.initial(), full.accepting().to_vec(), None, kept).unwrap();
        let completed = partial.complete();
        prop_assert!(completed.is_complete());
        let w = word(&w, 2);
        let before = partial.accepts(&w).unwrap_or(false);
        prop_assert_eq!(completed.accepts(&w).unwrap(), before);
    }

    #[test]
    fn membership_is_cached_and_stable(seed in 0u64..10_000, w in word_strategy(5)) {
        let mut t = SimulatedTeacher::new(Model::Dota(target(seed, 3, 2, 5)));
        let w = word(&w, 2);
        let first = t.membership(&w).unwrap();
        let before = t.stats();
        prop_assert_eq!(t.membership(&w).unwrap(), first);
        let after = t.stats();
        prop_assert_eq!(after.membership_count, before.membership_count);
        prop_assert_eq!(after.cache_hits, before.cache_hits + 1);
    }

    #[test]
    fn f_is_symmetric_and_reflexive(seed in 0u64..10_000) {
        let (table, _, _) = random_table(seed);
        let rows = table.rows().len();
        for a in 0..rows {
            for i in 0..=table.row(a).len() {
                prop_assert!(table.f(a, a, i, i));
            }
            for b in 0..rows {
                for (i, j) in table.combinations(a, b) {
                    prop_assert_eq!(table.f(a, b, i, j), table.f(b, a, j, i));
                }
            }
        }
        prop_assert!(table.audit().is_ok());
    }

    #[test]
    fn new_suffixes_only_separate(seed in 0u64..10_000, e in word_strategy(2)) {
        let (mut table, mut teacher, a) = random_table(seed);
        let rows = table.rows().len();
        let cells = |t: &ObservationTable| -> Vec<bool> {
            (0..rows).flat_map(|x| (0..rows).flat_map(move |y| t.combinations(x, y).into_iter().map(move |(i, j)| t.f(x, y, i, j)))).collect()
        };
        let before = cells(&table);
        table.add_suffix(&mut teacher, word(&e, a.alphabet().len())).unwrap();
        for (b, now) in before.iter().zip(cells(&table)) {
            prop_assert!(*b || !now, "a suffix turned a separated cell back");
        }
    }

    #[test]
    fn rows_in_one_location_agree_under_true_resets(seed in 0u64..10_000) {
        let (table, _, a) = random_table(seed);
        let runs: Vec<_> = table.rows().iter().map(|r| a.run(&r.word).unwrap()).collect();
        for x in 0..runs.len() {
            for y in 0..runs.len() {
                if runs[x].final_location == runs[y].final_location {
                    let (i, j) = (runs[x].reset_word.last_reset(), runs[y].reset_word.last_reset());
                    prop_assert!(table.f(x, y, i, j), "rows {} and {} share a target location but are separated", x, y);
                }
            }
        }
    }

    #[test]
    fn s_rows_stay_certainly_distinct(seed in 0u64..10_000) {
        let (mut table, mut teacher, _) = random_table(seed);
        table.move_to_s(&mut teacher).unwrap();
        let s = table.s().to_vec();
        for (k, &x) in s.iter().enumerate() {
            for &y in &s[k + 1..] {
                prop_assert!(table.certainly_distinct(x, y));
            }
        }
        prop_assert!(table.audit().is_ok());
    }

    #[test]
    fn solver_systems_behave(seed in 0u64..10_000, extra in 0u32..3) {
        let (mut table, mut teacher, _) = random_table(seed);
        table.move_to_s(&mut teacher).unwrap();
        table.set_n(table.s().len() as u32 + extra);
        let sys = assemble(&table, build_c2(&table).clauses).unwrap();
        let mut without_c4 = sys.clone();
        without_c4.base.retain(|c| c.family != Family::C4);
        let mut wider = sys.clone();
        wider.n += 1;
        let mut solver = InternalSolver::default();
        for overlay in [Overlay::Closed, Overlay::Relaxed] {
            let m = solver.solve(&sys, overlay).unwrap();
            if let Some(m) = &m {
                prop_assert!(sys.holds(overlay, m));
            }
            let free = solver.solve(&without_c4, overlay).unwrap();
            prop_assert_eq!(m.is_some(), free.is_some(), "C4 changed satisfiability under {:?}", overlay);
        }
        if solver.solve(&sys, Overlay::Relaxed).unwrap().is_some() {
            prop_assert!(solver.solve(&wider, Overlay::Relaxed).unwrap().is_some());
        }
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn learning_is_reproducible_and_progresses(seed in 0u64..10_000) {
        let a = target(seed, 3, 2, 6);
        let run = || {
            let mut t = SimulatedTeacher::new(Model::Dota(a.clone()));
            let mut sizes = Vec::new();
            let out = learn_observed(&mut t, &LearnerOptions::default(), &mut |v| {
                let (s, sp, r, e) = v.table.sizes();
                sizes.push((v.table.n(), [s, sp, e, r]));
            })
            .unwrap();
            let mut bytes = Vec::new();
            write_trace(&out.trace, &mut bytes).unwrap();
            (out, sizes, bytes)
        };
        let (out, sizes, bytes) = run();
        prop_assert_eq!(&run().2, &bytes);
        for w in sizes.windows(2) {
            if w[0].0 == w[1].0 {
                prop_assert!(w[0].1.iter().zip(&w[1].1).all(|(x, y)| x <= y), "table shrank: {:?}", w);
            }
        }
        let mut n = 0;
        for e in &out.trace {
            if let Some(k) = e.payload.get("N").and_then(|v| v.as_u64()) {
                prop_assert!(k >= n);
                n = k;
            }
            if e.event == "ctx" {
                prop_assert!(!e.payload["new_rows"].as_array().unwrap().is_empty());
            }
        }
        let again = learn(&mut SimulatedTeacher::new(Model::Dota(a.clone())), &LearnerOptions::default()).unwrap();
        prop_assert_eq!(again.stats.membership, out.stats.membership);
    }
}
