//! Property tests for the operator laws, parser round-trips, and the
//! morphism machinery.

use proptest::collection::vec;
use proptest::prelude::*;

use krasp::asp::{Alphabet, Atom, Program, Rule};
use krasp::automata::{
    characteristic_automaton, check_morphism, find_morphism, quotient_by, Automaton, BuildMode,
    MorphismMode, MorphismPair, Partition, SearchBudget,
};

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

fn atom(i: usize) -> Atom {
    Atom::new(NAMES[i]).unwrap()
}

prop_compose! {
    fn arb_rule(m: usize)(
        head in 0..m,
        pos in proptest::bits::usize::between(0, 4),
        neg in proptest::bits::usize::between(0, 4),
    ) -> Rule {
        let pick = |mask: usize| -> Vec<Atom> {
            (0..m).filter(|i| mask & (1 << i) != 0).map(atom).collect()
        };
        Rule::new(atom(head), pick(pos), pick(neg))
    }
}

fn arb_program() -> impl Strategy<Value = Program> {
    (1..=4usize).prop_flat_map(|m| {
        vec(arb_rule(m), 1..8).prop_map(move |rules| {
            let atoms: Vec<Atom> = (0..m).map(atom).collect();
            Program::new(Alphabet::new(atoms).unwrap(), rules).unwrap()
        })
    })
}

fn arb_automaton(max_states: usize, max_inputs: usize) -> impl Strategy<Value = Automaton> {
    (2..=max_states, 1..=max_inputs).prop_flat_map(|(n, k)| {
        vec(vec(0..n, k), n).prop_map(move |delta| {
            Automaton::from_table(
                (1..=n).map(|i| i.to_string()).collect(),
                (0..k).map(|x| format!("x{x}")).collect(),
                delta,
            )
            .unwrap()
        })
    })
}

proptest! {
    #[test]
    fn psi_is_monotone_in_the_first_argument(p in arb_program(), seed in any::<u64>()) {
        let m = p.atom_count();
        let mask = (1u64 << m) - 1;
        let alpha = p.alphabet();
        let i_small = seed & mask;
        let i_big = i_small | (seed >> 8) & mask;
        let j = (seed >> 16) & mask;
        let small = p.psi(&alpha.interp_from_bits(i_small), &alpha.interp_from_bits(j)).unwrap();
        let big = p.psi(&alpha.interp_from_bits(i_big), &alpha.interp_from_bits(j)).unwrap();
        prop_assert!(small.is_subset_of(&big));
    }

    #[test]
    fn psi_is_antitone_in_the_second_argument(p in arb_program(), seed in any::<u64>()) {
        let m = p.atom_count();
        let mask = (1u64 << m) - 1;
        let alpha = p.alphabet();
        let i = seed & mask;
        let j_small = (seed >> 8) & mask;
        let j_big = j_small | (seed >> 16) & mask;
        let loose = p.psi(&alpha.interp_from_bits(i), &alpha.interp_from_bits(j_small)).unwrap();
        let tight = p.psi(&alpha.interp_from_bits(i), &alpha.interp_from_bits(j_big)).unwrap();
        prop_assert!(tight.is_subset_of(&loose));
    }

    #[test]
    fn lfp_stabilizes_within_alphabet_plus_one(p in arb_program(), seed in any::<u64>()) {
        let m = p.atom_count();
        let j = p.alphabet().interp_from_bits(seed & ((1 << m) - 1));
        prop_assert!(p.lfp_iterations(&j).unwrap() <= m + 1);
    }

    #[test]
    fn positive_programs_ignore_the_second_argument(p in arb_program(), seed in any::<u64>()) {
        if !p.classify().positive {
            return Ok(());
        }
        let m = p.atom_count();
        let mask = (1u64 << m) - 1;
        let alpha = p.alphabet();
        let i = alpha.interp_from_bits(seed & mask);
        let j1 = alpha.interp_from_bits((seed >> 8) & mask);
        let j2 = alpha.interp_from_bits((seed >> 16) & mask);
        prop_assert_eq!(p.psi(&i, &j1).unwrap(), p.psi(&i, &j2).unwrap());
    }

    #[test]
    fn answer_sets_recheck_as_fixpoints(p in arb_program()) {
        for i in p.answer_sets_default().unwrap() {
            // independent recheck: iterate psi(., i) from the bottom by hand
            let alpha = p.alphabet();
            let mut cur = alpha.empty_interp();
            for _ in 0..=p.atom_count() {
                cur = p.psi(&cur, &i).unwrap();
            }
            prop_assert_eq!(cur, i);
        }
    }

    #[test]
    fn rendered_programs_parse_back(p in arb_program()) {
        let back = krasp::parse::parse_program(&p.render()).unwrap();
        prop_assert_eq!(p, back);
    }

    #[test]
    fn single_factor_identity_products_degenerate_to_the_factor(aut in arb_automaton(4, 3)) {
        let inputs: Vec<String> = (0..aut.input_count()).map(|x| aut.input_label(x)).collect();
        let expected = aut.table(64).unwrap();
        let spec = krasp::cascade::CascadeSpec::new(
            vec![std::sync::Arc::new(aut)],
            inputs,
            krasp::cascade::Feedforward::Identity,
        )
        .unwrap();
        let prod =
            krasp::cascade::product_automaton(&spec, BuildMode::Explicit, 64).unwrap();
        prop_assert_eq!(prod.table(64).unwrap(), expected);
    }

    #[test]
    fn lazy_and_explicit_characteristic_automata_agree(p in arb_program()) {
        let explicit = characteristic_automaton(&p, BuildMode::Explicit, 4).unwrap();
        let lazy = characteristic_automaton(&p, BuildMode::Lazy, 4).unwrap();
        let n = explicit.state_count();
        for q in 0..n {
            for x in 0..n {
                prop_assert_eq!(explicit.step(q, x), lazy.step(q, x));
            }
        }
    }

    #[test]
    fn found_morphisms_pass_the_checker(
        source in arb_automaton(3, 2),
        target in arb_automaton(3, 2),
    ) {
        let budget = SearchBudget { max_candidates: 1_000_000 };
        for mode in [MorphismMode::Homomorphism, MorphismMode::Isomorphism] {
            if let Ok(Some(pair)) = find_morphism(&source, &target, mode, budget) {
                let report = check_morphism(&source, &target, &pair, mode).unwrap();
                prop_assert!(report.passed());
            }
        }
    }

    #[test]
    fn quotients_project_homomorphically(aut in arb_automaton(4, 2), a in 0..4usize, b in 0..4usize) {
        let n = aut.state_count();
        let (a, b) = (a % n, b % n);
        if a == b {
            return Ok(());
        }
        // congruence closure of merging a with b
        let mut block_of: Vec<usize> = (0..n).collect();
        fn root(block_of: &mut [usize], mut q: usize) -> usize {
            while block_of[q] != q {
                q = block_of[q];
            }
            q
        }
        let mut pending = vec![(a, b)];
        while let Some((x, y)) = pending.pop() {
            let (rx, ry) = (root(&mut block_of, x), root(&mut block_of, y));
            if rx == ry {
                continue;
            }
            block_of[rx.max(ry)] = rx.min(ry);
            for input in 0..aut.input_count() {
                pending.push((aut.step(rx, input), aut.step(ry, input)));
            }
        }
        let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for q in 0..n {
            let r = root(&mut block_of, q);
            blocks.entry(r).or_default().push(q);
        }
        let partition = Partition::new(blocks.into_values().collect(), n).unwrap();
        let quotient = quotient_by(&aut, &partition).unwrap();
        let h = MorphismPair::with_identity_inputs(partition.block_of(n), aut.input_count());
        let report = check_morphism(&aut, &quotient, &h, MorphismMode::Homomorphism).unwrap();
        prop_assert!(report.passed());
    }
}
