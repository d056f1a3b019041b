//! Seeded random generators for test corpora. Everything here is
//! deterministic in the seed and platform-independent; nothing in the
//! library's search paths depends on it.

use std::sync::Arc;

use crate::asp::{Alphabet, Atom, Program, Rule};
use crate::automata::{canonical_automaton, Automaton, CanonicalAutomaton};
use crate::cascade::{CascadeSpec, FactorTable, Feedforward};

/// SplitMix64. Small, seedable, and stable across platforms.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.next_u64() % den < num
    }
}

const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// A random normal program over at most `max_atoms` atoms (<= 6) with at
/// most `max_rules` rules.
pub fn random_program(rng: &mut Rng, max_atoms: usize, max_rules: usize) -> Program {
    let m = 1 + rng.below(max_atoms.min(NAMES.len()));
    let atoms: Vec<Atom> = NAMES[..m].iter().map(|n| Atom::new(n).unwrap()).collect();
    let n_rules = 1 + rng.below(max_rules);
    let mut rules = Vec::with_capacity(n_rules);
    for _ in 0..n_rules {
        let head = atoms[rng.below(m)].clone();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for a in &atoms {
            if rng.chance(1, 4) {
                pos.push(a.clone());
            }
            if rng.chance(1, 4) {
                neg.push(a.clone());
            }
        }
        rules.push(Rule::new(head, pos, neg));
    }
    Program::new(Alphabet::new(atoms).unwrap(), rules).unwrap()
}

/// A random positive tight program: atoms get levels, and every rule's
/// positive body draws only from strictly lower levels.
pub fn random_positive_tight(rng: &mut Rng, max_atoms: usize, max_rules: usize) -> Program {
    let m = 1 + rng.below(max_atoms.min(NAMES.len()));
    let atoms: Vec<Atom> = NAMES[..m].iter().map(|n| Atom::new(n).unwrap()).collect();
    let levels: Vec<usize> = (0..m).map(|_| rng.below(3)).collect();
    let n_rules = 1 + rng.below(max_rules);
    let mut rules = Vec::with_capacity(n_rules);
    for _ in 0..n_rules {
        let h = rng.below(m);
        let mut pos = Vec::new();
        for (i, a) in atoms.iter().enumerate() {
            if levels[i] < levels[h] && rng.chance(1, 2) {
                pos.push(a.clone());
            }
        }
        rules.push(Rule::new(atoms[h].clone(), pos, vec![]));
    }
    Program::new(Alphabet::new(atoms).unwrap(), rules).unwrap()
}

/// A random total automaton with `states` states and `inputs` inputs.
pub fn random_automaton(rng: &mut Rng, states: usize, inputs: usize) -> Automaton {
    let delta = (0..states)
        .map(|_| (0..inputs).map(|_| rng.below(states)).collect())
        .collect();
    Automaton::from_table(
        (1..=states).map(|i| i.to_string()).collect(),
        (0..inputs).map(|x| format!("x{x}")).collect(),
        delta,
    )
    .unwrap()
}

/// A random cascade of one or two reset/standard(2) factors over a two-letter
/// global alphabet, with random feedforward tables.
pub fn random_cascade(rng: &mut Rng) -> CascadeSpec {
    let pick = |rng: &mut Rng| {
        if rng.chance(1, 2) {
            Arc::new(canonical_automaton(CanonicalAutomaton::Reset).unwrap())
        } else {
            Arc::new(canonical_automaton(CanonicalAutomaton::Standard(2)).unwrap())
        }
    };
    let k = 1 + rng.below(2);
    let factors: Vec<Arc<Automaton>> = (0..k).map(|_| pick(rng)).collect();
    let nx = 2usize;
    let mut tables = Vec::with_capacity(k);
    for (i, f) in factors.iter().enumerate() {
        let cells: usize = factors[..i]
            .iter()
            .map(|g| g.state_count())
            .product::<usize>()
            * nx;
        let entries = (0..cells).map(|_| rng.below(f.input_count())).collect();
        tables.push(
            FactorTable::new(
                factors[..i].iter().map(|g| g.state_count()).collect(),
                nx,
                entries,
            )
            .unwrap(),
        );
    }
    CascadeSpec::new(
        factors,
        vec!["g0".into(), "g1".into()],
        Feedforward::Tables(tables),
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let mut a = Rng::new(7);
        let mut b = Rng::new(7);
        for _ in 0..20 {
            let pa = random_program(&mut a, 4, 6);
            let pb = random_program(&mut b, 4, 6);
            assert_eq!(pa, pb);
        }
    }

    #[test]
    fn positive_tight_generator_is_positive_and_tight() {
        let mut rng = Rng::new(11);
        for _ in 0..100 {
            let p = random_positive_tight(&mut rng, 6, 12);
            let cls = p.classify();
            assert!(cls.positive);
            assert!(cls.tightness.is_some(), "{}", p.render());
        }
    }
}
