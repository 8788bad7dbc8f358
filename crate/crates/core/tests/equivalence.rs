mod common;

use common::*;
use hyperskolem::automata::{Alphabet, Nba};
use hyperskolem::equivalence::{analyze, block_length, TypeSystem};
use hyperskolem::ts::TransitionSystem;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn random_pairs(seed: u64, count: usize, arity: usize) -> Vec<(Nba, TransitionSystem)> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let states = rng.gen_range(1..=3);
            let a = random_nba(&mut rng, Alphabet::new(1, arity), states, 0.35);
            let vertices = rng.gen_range(1..=3);
            (a, random_ts(&mut rng, vertices))
        })
        .collect()
}

/// Level-`k` types agree with the run-by-run relations on all short tuple-words.
#[test]
fn profiles_match_definition() {
    for (n, (a, ts)) in random_pairs(11, 12, 2).iter().enumerate() {
        let mut sys = TypeSystem::new(a, ts, &[1, 1], BUDGET).unwrap();
        let ws = words(4, 3);
        let ids: Vec<u32> = ws.iter().map(|w| sys.type_of(2, w).unwrap()).collect();
        let facts: Vec<RunFacts> = ws.iter().map(|w| run_facts(a, ts, w)).collect();
        for x in 0..ws.len() {
            for y in 0..ws.len() {
                if ws[x].len() == ws[y].len() || x < 8 || y < 8 {
                    assert_eq!(ids[x] == ids[y], facts[x] == facts[y], "pair {n}: {:?} {:?}", ws[x], ws[y]);
                }
            }
        }
    }
}

/// Lower levels agree with the forall-exists definition over completions.
#[test]
fn lower_levels_match_definition() {
    for (k, seed) in [(2usize, 21u64), (3, 22)] {
        for (n, (a, ts)) in random_pairs(seed, 6, k).iter().enumerate() {
            let arities = vec![1; k];
            let mut sys = TypeSystem::new(a, ts, &arities, BUDGET).unwrap();
            let mut def = Definitional::new(a, ts, k);
            for level in 1..k {
                let ws = words(1 << level, 2);
                let ids: Vec<u32> = ws.iter().map(|w| sys.type_of(level, w).unwrap()).collect();
                for x in 0..ws.len() {
                    for y in 0..ws.len() {
                        if ws[x].len() != ws[y].len() {
                            continue;
                        }
                        let same = sys.value(level, ids[x]) == sys.value(level, ids[y]);
                        assert_eq!(same, def.equiv(level, &ws[x], &ws[y]), "k={k} pair {n} level {level}: {:?} {:?}", ws[x], ws[y]);
                    }
                }
            }
        }
    }
}

#[test]
fn block_length_matches_enumeration() {
    let ts = free_ts();
    let mut checked = 0;
    for src in [DELAYED, COPY, LOOKAHEAD] {
        let inst = instance(&ts, src);
        let arities = inst.form.arities();
        let (dump, dfa) = analyze(&inst.automaton, &ts, &arities, BUDGET).unwrap();
        let mut sys = TypeSystem::new(&inst.automaton, &ts, &arities, BUDGET).unwrap();
        let letters = 1u32 << arities[0];
        assert_eq!(dump.ell, block_length_oracle(&mut sys, letters, dfa.len()), "{src}");
        assert!(dump.ell <= dfa.len());
        checked += 1;
    }
    for (a, ts) in random_pairs(31, 40, 2) {
        let (dump, dfa) = analyze(&a, &ts, &[1, 1], BUDGET).unwrap();
        if dfa.len() > 10 {
            continue;
        }
        let mut sys = TypeSystem::new(&a, &ts, &[1, 1], BUDGET).unwrap();
        assert_eq!(dump.ell, block_length_oracle(&mut sys, 2, dfa.len()));
        assert_eq!(block_length(&dfa).ell, dump.ell);
        assert!(dump.ell <= dfa.len());
        checked += 1;
    }
    assert!(checked >= 6, "only {checked} instances small enough");
}

#[test]
fn index_within_bound() {
    let ts = free_ts();
    for src in [DELAYED, COPY, LOOKAHEAD] {
        let d = instance(&ts, src).equivalence;
        assert!((*d.index.last().unwrap() as f64).log2() <= d.index_bound_log2, "{src}: {:?}", d.index);
    }
    for (a, ts) in random_pairs(41, 10, 2) {
        let (d, _) = analyze(&a, &ts, &[1, 1], BUDGET).unwrap();
        assert!((d.monoid_size as f64).log2() <= d.index_bound_log2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn types_compose_on_concatenation(
        seed in 0u64..1000,
        u in proptest::collection::vec(0u32..4, 0..5),
        v in proptest::collection::vec(0u32..4, 0..5),
    ) {
        let (a, ts) = random_pairs(seed, 1, 2).pop().unwrap();
        let mut sys = TypeSystem::new(&a, &ts, &[1, 1], BUDGET).unwrap();
        let uv: Vec<u32> = u.iter().chain(&v).copied().collect();
        for level in 1..=2 {
            let mask = (1u32 << level) - 1;
            let cut = |w: &[u32]| w.iter().map(|&l| l & mask).collect::<Vec<_>>();
            let tu = sys.type_of(level, &cut(&u)).unwrap();
            let tv = sys.type_of(level, &cut(&v)).unwrap();
            prop_assert_eq!(sys.compose(level, tu, tv).unwrap(), sys.type_of(level, &cut(&uv)).unwrap());
        }
    }
}

