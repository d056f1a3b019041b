//! Finite automata, morphisms, congruences, quotients, and the
//! characteristic automaton of a program.
//!
//! An [`Automaton`] is a total transition structure `delta: Q x Sigma -> Q`
//! without initial or accepting states. States and inputs are addressed by
//! index; label spaces describe how indices render. The transition map is
//! either an explicit table or a memoized deferred evaluator, which is what
//! makes characteristic automata of larger programs usable: their state and
//! input spaces are the full interpretation lattice and are never
//! materialized.

use std::collections::HashMap;
use std::sync::Mutex;

use thiserror::Error;

use crate::asp::{Alphabet, Program};

/// Default cap (in atoms) for building an explicit characteristic automaton.
pub const DEFAULT_CHAR_CAP: usize = 6;

/// Lazy characteristic automata still index states by `usize`.
pub const MAX_LAZY_ATOMS: usize = 32;

#[derive(Debug, Error)]
pub enum AutomatonError {
    #[error("automaton needs a nonempty input alphabet")]
    NoInputs,
    #[error("automaton needs at least one state")]
    NoStates,
    #[error("transition table has wrong shape at state {state}")]
    BadTableShape { state: usize },
    #[error("transition target {target} out of range at ({state}, {input})")]
    BadTarget {
        state: usize,
        input: usize,
        target: usize,
    },
    #[error("alphabet has {got} atoms, explicit characteristic automaton cap is {cap}")]
    CharCapExceeded { got: usize, cap: usize },
    #[error(
        "alphabet has {got} atoms, lazy characteristic automata support at most {MAX_LAZY_ATOMS}"
    )]
    LazyCapExceeded { got: usize },
    #[error("automaton with {got} states exceeds cap {cap} for {what}")]
    TooLarge {
        got: usize,
        cap: usize,
        what: &'static str,
    },
    #[error("morphism component {component} has wrong length: got {got}, want {want}")]
    BadMorphismLength {
        component: u8,
        got: usize,
        want: usize,
    },
    #[error("morphism component {component} maps to out-of-range index {value}")]
    BadMorphismTarget { component: u8, value: usize },
    #[error("partition is not an exact cover of the state set")]
    BadPartition,
    #[error("partition is not a congruence: states {q} and {q2} diverge on input {input}")]
    NotACongruence {
        q: String,
        q2: String,
        input: String,
    },
    #[error("subautomaton selection is not closed: delta({state}, {input}) = {target} is outside")]
    NotClosed {
        state: String,
        input: String,
        target: String,
    },
    #[error("subautomaton selection needs a nonempty input subset")]
    EmptySelection,
    #[error("selection index {0} out of range or duplicated")]
    BadSelection(usize),
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("morphism search budget exceeded: {candidates} candidate pairs")]
    SearchBudget { candidates: u128 },
    #[error("state label `{0}` not found")]
    UnknownState(String),
    #[error("input label `{0}` not found")]
    UnknownInput(String),
}

/// How state or input indices of an automaton render as labels.
#[derive(Debug, Clone)]
pub enum LabelSpace {
    /// Explicit label list; index = position.
    Labels(Vec<String>),
    /// All interpretations of an alphabet; index = membership bit mask.
    Interps(Alphabet),
    /// Tuples over component spaces; index = mixed radix, last component fastest.
    Tuples(Vec<LabelSpace>),
}

impl LabelSpace {
    pub fn count(&self) -> usize {
        match self {
            LabelSpace::Labels(v) => v.len(),
            LabelSpace::Interps(alpha) => 1usize << alpha.len(),
            LabelSpace::Tuples(parts) => parts.iter().map(|p| p.count()).product(),
        }
    }

    pub fn label(&self, idx: usize) -> String {
        match self {
            LabelSpace::Labels(v) => v[idx].clone(),
            LabelSpace::Interps(alpha) => alpha.render_interp(alpha.interp_from_bits(idx as u64)),
            LabelSpace::Tuples(parts) => {
                let mut rem = idx;
                let mut comps = vec![String::new(); parts.len()];
                for (k, part) in parts.iter().enumerate().rev() {
                    let n = part.count();
                    comps[k] = part.label(rem % n);
                    rem /= n;
                }
                format!("({})", comps.join(","))
            }
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        match self {
            LabelSpace::Labels(v) => v.iter().position(|l| l == label),
            LabelSpace::Interps(alpha) => alpha.parse_interp(label).ok().map(|i| i.bits() as usize),
            LabelSpace::Tuples(parts) => {
                let inner = label.strip_prefix('(')?.strip_suffix(')')?;
                let comps = split_tuple(inner);
                if comps.len() != parts.len() {
                    return None;
                }
                let mut idx = 0usize;
                for (part, comp) in parts.iter().zip(comps) {
                    idx = idx * part.count() + part.index_of(comp.trim())?;
                }
                Some(idx)
            }
        }
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.count()).map(|i| self.label(i)).collect()
    }
}

/// Splits tuple component text at top-level commas, respecting braces/parens.
fn split_tuple(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

enum Delta {
    Table(Vec<Vec<usize>>),
    Lazy {
        eval: Box<dyn Fn(usize, usize) -> usize + Send + Sync>,
        memo: Mutex<HashMap<(usize, usize), usize>>,
    },
}

impl std::fmt::Debug for Delta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Delta::Table(t) => write!(f, "Table({} rows)", t.len()),
            Delta::Lazy { .. } => write!(f, "Lazy"),
        }
    }
}

/// A finite automaton `<Q, Sigma, delta>`.
#[derive(Debug)]
pub struct Automaton {
    states: LabelSpace,
    inputs: LabelSpace,
    delta: Delta,
}

impl Automaton {
    /// Builds an explicit-table automaton; `delta[q][x]` is the successor index.
    pub fn from_table(
        states: Vec<String>,
        inputs: Vec<String>,
        delta: Vec<Vec<usize>>,
    ) -> Result<Self, AutomatonError> {
        if states.is_empty() {
            return Err(AutomatonError::NoStates);
        }
        if inputs.is_empty() {
            return Err(AutomatonError::NoInputs);
        }
        if delta.len() != states.len() {
            return Err(AutomatonError::BadTableShape { state: delta.len() });
        }
        for (q, row) in delta.iter().enumerate() {
            if row.len() != inputs.len() {
                return Err(AutomatonError::BadTableShape { state: q });
            }
            for (x, &t) in row.iter().enumerate() {
                if t >= states.len() {
                    return Err(AutomatonError::BadTarget {
                        state: q,
                        input: x,
                        target: t,
                    });
                }
            }
        }
        Ok(Automaton {
            states: LabelSpace::Labels(states),
            inputs: LabelSpace::Labels(inputs),
            delta: Delta::Table(delta),
        })
    }

    pub(crate) fn from_parts_table(
        states: LabelSpace,
        inputs: LabelSpace,
        delta: Vec<Vec<usize>>,
    ) -> Self {
        Automaton {
            states,
            inputs,
            delta: Delta::Table(delta),
        }
    }

    pub(crate) fn from_parts_lazy(
        states: LabelSpace,
        inputs: LabelSpace,
        eval: Box<dyn Fn(usize, usize) -> usize + Send + Sync>,
    ) -> Self {
        Automaton {
            states,
            inputs,
            delta: Delta::Lazy {
                eval,
                memo: Mutex::new(HashMap::new()),
            },
        }
    }

    pub fn state_count(&self) -> usize {
        self.states.count()
    }

    pub fn input_count(&self) -> usize {
        self.inputs.count()
    }

    pub fn states(&self) -> &LabelSpace {
        &self.states
    }

    pub fn inputs(&self) -> &LabelSpace {
        &self.inputs
    }

    pub fn state_label(&self, q: usize) -> String {
        self.states.label(q)
    }

    pub fn input_label(&self, x: usize) -> String {
        self.inputs.label(x)
    }

    pub fn state_index(&self, label: &str) -> Result<usize, AutomatonError> {
        self.states
            .index_of(label)
            .filter(|&q| q < self.state_count())
            .ok_or_else(|| AutomatonError::UnknownState(label.to_string()))
    }

    pub fn input_index(&self, label: &str) -> Result<usize, AutomatonError> {
        self.inputs
            .index_of(label)
            .filter(|&x| x < self.input_count())
            .ok_or_else(|| AutomatonError::UnknownInput(label.to_string()))
    }

    /// One transition. Lazy transitions are computed once and memoized;
    /// concurrent callers may race but always observe the same value.
    pub fn step(&self, q: usize, x: usize) -> usize {
        match &self.delta {
            Delta::Table(t) => t[q][x],
            Delta::Lazy { eval, memo } => {
                if let Some(&v) = memo.lock().unwrap().get(&(q, x)) {
                    return v;
                }
                let v = eval(q, x);
                memo.lock().unwrap().insert((q, x), v);
                v
            }
        }
    }

    pub fn is_lazy(&self) -> bool {
        matches!(self.delta, Delta::Lazy { .. })
    }

    /// Materializes the full transition table. Guarded by `cap` on states.
    pub fn table(&self, cap: usize) -> Result<Vec<Vec<usize>>, AutomatonError> {
        let n = self.state_count();
        if n > cap {
            return Err(AutomatonError::TooLarge {
                got: n,
                cap,
                what: "table export",
            });
        }
        Ok((0..n)
            .map(|q| (0..self.input_count()).map(|x| self.step(q, x)).collect())
            .collect())
    }

    /// DOT rendering, one node per state and edges merged per endpoint pair.
    pub fn to_dot(&self) -> Result<String, AutomatonError> {
        let n = self.state_count();
        if n > 64 {
            return Err(AutomatonError::TooLarge {
                got: n,
                cap: 64,
                what: "DOT export",
            });
        }
        let mut out = String::from("digraph {\n  rankdir=LR;\n");
        for q in 0..n {
            out.push_str(&format!(
                "  q{} [label=\"{}\"];\n",
                q,
                esc(&self.state_label(q))
            ));
        }
        for q in 0..n {
            let mut edges: Vec<(usize, Vec<String>)> = Vec::new();
            for x in 0..self.input_count() {
                let t = self.step(q, x);
                match edges.iter_mut().find(|(dst, _)| *dst == t) {
                    Some((_, labels)) => labels.push(self.input_label(x)),
                    None => edges.push((t, vec![self.input_label(x)])),
                }
            }
            for (dst, labels) in edges {
                out.push_str(&format!(
                    "  q{} -> q{} [label=\"{}\"];\n",
                    q,
                    dst,
                    esc(&labels.join(","))
                ));
            }
        }
        out.push_str("}\n");
        Ok(out)
    }
}

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// The canonical machines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanonicalAutomaton {
    /// Two states; both letters are constant maps.
    Reset,
    /// `n` states with identity, cyclic shift, and the (1 2) transposition.
    Standard(usize),
    /// `n` states; one letter per map `[n] -> [n]`, `delta(j, s) = s(j)`.
    Tn(usize),
    /// Two states; `s0` is the identity, `s1` the constant map to 2.
    Elevator,
}

pub fn canonical_automaton(kind: CanonicalAutomaton) -> Result<Automaton, AutomatonError> {
    match kind {
        CanonicalAutomaton::Reset => Automaton::from_table(
            vec!["1".into(), "2".into()],
            vec!["s0".into(), "s1".into()],
            vec![vec![0, 1], vec![0, 1]],
        ),
        CanonicalAutomaton::Standard(n) => {
            if n < 2 {
                return Err(AutomatonError::BadParameter(format!(
                    "standard automaton needs n > 1, got {n}"
                )));
            }
            let states = (1..=n).map(|i| i.to_string()).collect();
            let inputs = vec!["s0".into(), "s1".into(), "s2".into()];
            let mut delta = Vec::with_capacity(n);
            for i in 1..=n {
                let swap = match i {
                    1 => 2,
                    2 => 1,
                    _ => i,
                };
                delta.push(vec![i - 1, i % n, swap - 1]);
            }
            Automaton::from_table(states, inputs, delta)
        }
        CanonicalAutomaton::Tn(n) => {
            if n < 1 {
                return Err(AutomatonError::BadParameter("tn needs n >= 1".into()));
            }
            let count = crate::asp::tn_input_count(n);
            let states = (1..=n).map(|i| i.to_string()).collect();
            let inputs = (1..=count).map(|k| format!("s{k}")).collect();
            let mut delta = Vec::with_capacity(n);
            for j in 1..=n {
                let row = (1..=count)
                    .map(|k| crate::asp::tn_map(n, k)[j - 1] - 1)
                    .collect();
                delta.push(row);
            }
            Automaton::from_table(states, inputs, delta)
        }
        CanonicalAutomaton::Elevator => Automaton::from_table(
            vec!["1".into(), "2".into()],
            vec!["s0".into(), "s1".into()],
            vec![vec![0, 1], vec![1, 1]],
        ),
    }
}

/// Construction mode for machines whose transition structure is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildMode {
    Explicit,
    Lazy,
}

/// The characteristic automaton of a program: states and inputs are both the
/// interpretation lattice, and the transition function is the consequence
/// operator itself.
pub fn characteristic_automaton(
    program: &Program,
    mode: BuildMode,
    cap: usize,
) -> Result<Automaton, AutomatonError> {
    let m = program.atom_count();
    let space = LabelSpace::Interps(program.alphabet().clone());
    match mode {
        BuildMode::Explicit => {
            if m > cap {
                return Err(AutomatonError::CharCapExceeded { got: m, cap });
            }
            let n = 1usize << m;
            let delta = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| program.step_bits(i as u64, j as u64) as usize)
                        .collect()
                })
                .collect();
            Ok(Automaton::from_parts_table(space.clone(), space, delta))
        }
        BuildMode::Lazy => {
            if m > MAX_LAZY_ATOMS {
                return Err(AutomatonError::LazyCapExceeded { got: m });
            }
            let prog = program.clone();
            Ok(Automaton::from_parts_lazy(
                space.clone(),
                space,
                Box::new(move |i, j| prog.step_bits(i as u64, j as u64) as usize),
            ))
        }
    }
}

pub fn characteristic_automaton_default(
    program: &Program,
    mode: BuildMode,
) -> Result<Automaton, AutomatonError> {
    characteristic_automaton(program, mode, DEFAULT_CHAR_CAP)
}

/// A pair of index maps `(h1: Q -> Q', h2: Sigma -> Sigma')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismPair {
    pub h1: Vec<usize>,
    pub h2: Vec<usize>,
}

impl MorphismPair {
    pub fn new(h1: Vec<usize>, h2: Vec<usize>) -> Self {
        MorphismPair { h1, h2 }
    }

    /// The convention when source and target share their input alphabet:
    /// the input component is stored as an explicit identity.
    pub fn with_identity_inputs(h1: Vec<usize>, input_count: usize) -> Self {
        MorphismPair {
            h1,
            h2: (0..input_count).collect(),
        }
    }

    pub fn h2_is_identity(&self) -> bool {
        self.h2.iter().enumerate().all(|(i, &v)| i == v)
    }
}

/// What a morphism check is asked to establish.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorphismMode {
    /// Surjective components satisfying the morphism equation.
    Homomorphism,
    /// Bijective components satisfying the morphism equation.
    Isomorphism,
    /// Injective components satisfying the morphism equation; the target may
    /// be larger. Used for embeddings into product machines.
    Embedding,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismViolation {
    /// `h1(delta(q, x)) != delta'(h1(q), h2(x))`.
    Equation {
        state: String,
        input: String,
        got: String,
        expected: String,
    },
    NotSurjective {
        component: u8,
        missing: String,
    },
    NotInjective {
        component: u8,
        first: String,
        second: String,
    },
}

impl std::fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MorphismViolation::Equation {
                state,
                input,
                got,
                expected,
            } => write!(
                f,
                "at ({state}, {input}): image of successor is {got}, target expects {expected}"
            ),
            MorphismViolation::NotSurjective { component, missing } => {
                write!(f, "h{component} misses target element {missing}")
            }
            MorphismViolation::NotInjective {
                component,
                first,
                second,
            } => {
                write!(f, "h{component} identifies {first} and {second}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct MorphismReport {
    pub mode: MorphismMode,
    pub violations: Vec<MorphismViolation>,
    pub equations_checked: usize,
}

impl MorphismReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustively checks the morphism equation `h1(delta(q,x)) = delta'(h1 q, h2 x)`
/// at every pair, plus the mode's surjectivity/injectivity requirements.
/// Failures are report content, not errors.
pub fn check_morphism(
    source: &Automaton,
    target: &Automaton,
    h: &MorphismPair,
    mode: MorphismMode,
) -> Result<MorphismReport, AutomatonError> {
    let (ns, nx) = (source.state_count(), source.input_count());
    if h.h1.len() != ns {
        return Err(AutomatonError::BadMorphismLength {
            component: 1,
            got: h.h1.len(),
            want: ns,
        });
    }
    if h.h2.len() != nx {
        return Err(AutomatonError::BadMorphismLength {
            component: 2,
            got: h.h2.len(),
            want: nx,
        });
    }
    for &v in &h.h1 {
        if v >= target.state_count() {
            return Err(AutomatonError::BadMorphismTarget {
                component: 1,
                value: v,
            });
        }
    }
    for &v in &h.h2 {
        if v >= target.input_count() {
            return Err(AutomatonError::BadMorphismTarget {
                component: 2,
                value: v,
            });
        }
    }

    let mut violations = Vec::new();
    let mut equations = 0usize;
    for q in 0..ns {
        for x in 0..nx {
            equations += 1;
            let got = h.h1[source.step(q, x)];
            let expected = target.step(h.h1[q], h.h2[x]);
            if got != expected {
                violations.push(MorphismViolation::Equation {
                    state: source.state_label(q),
                    input: source.input_label(x),
                    got: target.state_label(got),
                    expected: target.state_label(expected),
                });
            }
        }
    }

    match mode {
        MorphismMode::Homomorphism => {
            check_surjective(&h.h1, target.state_count(), 1, target, &mut violations);
            check_surjective(&h.h2, target.input_count(), 2, target, &mut violations);
        }
        MorphismMode::Isomorphism => {
            check_surjective(&h.h1, target.state_count(), 1, target, &mut violations);
            check_surjective(&h.h2, target.input_count(), 2, target, &mut violations);
            check_injective(&h.h1, 1, source, true, &mut violations);
            check_injective(&h.h2, 2, source, false, &mut violations);
        }
        MorphismMode::Embedding => {
            check_injective(&h.h1, 1, source, true, &mut violations);
            check_injective(&h.h2, 2, source, false, &mut violations);
        }
    }

    Ok(MorphismReport {
        mode,
        violations,
        equations_checked: equations,
    })
}

fn check_surjective(
    map: &[usize],
    target_count: usize,
    component: u8,
    target: &Automaton,
    out: &mut Vec<MorphismViolation>,
) {
    let mut hit = vec![false; target_count];
    for &v in map {
        hit[v] = true;
    }
    for (t, h) in hit.iter().enumerate() {
        if !h {
            let missing = if component == 1 {
                target.state_label(t)
            } else {
                target.input_label(t)
            };
            out.push(MorphismViolation::NotSurjective { component, missing });
        }
    }
}

fn check_injective(
    map: &[usize],
    component: u8,
    source: &Automaton,
    states: bool,
    out: &mut Vec<MorphismViolation>,
) {
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for (i, &v) in map.iter().enumerate() {
        if let Some(&first) = seen.get(&v) {
            let label = |k: usize| {
                if states {
                    source.state_label(k)
                } else {
                    source.input_label(k)
                }
            };
            out.push(MorphismViolation::NotInjective {
                component,
                first: label(first),
                second: label(i),
            });
        } else {
            seen.insert(v, i);
        }
    }
}

/// Disjoint nonempty state subsets covering the whole state set. Blocks are
/// normalized to sorted members, ordered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(mut blocks: Vec<Vec<usize>>, state_count: usize) -> Result<Self, AutomatonError> {
        let mut seen = vec![false; state_count];
        let mut total = 0usize;
        for b in &mut blocks {
            if b.is_empty() {
                return Err(AutomatonError::BadPartition);
            }
            b.sort_unstable();
            b.dedup();
            for &q in b.iter() {
                if q >= state_count || seen[q] {
                    return Err(AutomatonError::BadPartition);
                }
                seen[q] = true;
                total += 1;
            }
        }
        if total != state_count {
            return Err(AutomatonError::BadPartition);
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Partition { blocks })
    }

    pub fn diagonal(state_count: usize) -> Self {
        Partition {
            blocks: (0..state_count).map(|q| vec![q]).collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// block index per state
    pub fn block_of(&self, state_count: usize) -> Vec<usize> {
        let mut of = vec![0usize; state_count];
        for (bi, b) in self.blocks.iter().enumerate() {
            for &q in b {
                of[q] = bi;
            }
        }
        of
    }

    pub fn is_diagonal(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }
}

/// Quotient automaton by a congruence. States are blocks in canonical order;
/// inputs are unchanged. Rejects partitions that are not congruences,
/// reporting a witnessing pair and input.
pub fn quotient_by(a: &Automaton, p: &Partition) -> Result<Automaton, AutomatonError> {
    let n = a.state_count();
    let of = p.block_of(n);
    let nx = a.input_count();
    let mut delta = Vec::with_capacity(p.block_count());
    for b in p.blocks() {
        let rep = b[0];
        let mut row = Vec::with_capacity(nx);
        for x in 0..nx {
            let dst = of[a.step(rep, x)];
            for &q in &b[1..] {
                if of[a.step(q, x)] != dst {
                    return Err(AutomatonError::NotACongruence {
                        q: a.state_label(rep),
                        q2: a.state_label(q),
                        input: a.input_label(x),
                    });
                }
            }
            row.push(dst);
        }
        delta.push(row);
    }
    let states = p
        .blocks()
        .iter()
        .map(|b| {
            let members: Vec<String> = b.iter().map(|&q| a.state_label(q)).collect();
            format!("{{{}}}", members.join(","))
        })
        .collect();
    let inputs = (0..nx).map(|x| a.input_label(x)).collect();
    Automaton::from_table(states, inputs, delta)
}

/// A closed choice of states and inputs of some automaton. Closure is checked
/// on construction; a non-closed selection cannot exist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubautomatonSelection {
    state_subset: Vec<usize>,
    input_subset: Vec<usize>,
}

impl SubautomatonSelection {
    pub fn new(
        a: &Automaton,
        state_subset: Vec<usize>,
        input_subset: Vec<usize>,
    ) -> Result<Self, AutomatonError> {
        if input_subset.is_empty() {
            return Err(AutomatonError::EmptySelection);
        }
        if state_subset.is_empty() {
            return Err(AutomatonError::NoStates);
        }
        for &q in &state_subset {
            if q >= a.state_count() || state_subset.iter().filter(|&&r| r == q).count() > 1 {
                return Err(AutomatonError::BadSelection(q));
            }
        }
        for &x in &input_subset {
            if x >= a.input_count() || input_subset.iter().filter(|&&r| r == x).count() > 1 {
                return Err(AutomatonError::BadSelection(x));
            }
        }
        for &q in &state_subset {
            for &x in &input_subset {
                let t = a.step(q, x);
                if !state_subset.contains(&t) {
                    return Err(AutomatonError::NotClosed {
                        state: a.state_label(q),
                        input: a.input_label(x),
                        target: a.state_label(t),
                    });
                }
            }
        }
        Ok(SubautomatonSelection {
            state_subset,
            input_subset,
        })
    }

    pub fn states(&self) -> &[usize] {
        &self.state_subset
    }

    pub fn inputs(&self) -> &[usize] {
        &self.input_subset
    }

    /// The selected subautomaton as a standalone machine with local indices.
    pub fn restrict(&self, a: &Automaton) -> Automaton {
        let local: HashMap<usize, usize> = self
            .state_subset
            .iter()
            .enumerate()
            .map(|(i, &q)| (q, i))
            .collect();
        let states = self
            .state_subset
            .iter()
            .map(|&q| a.state_label(q))
            .collect();
        let inputs = self
            .input_subset
            .iter()
            .map(|&x| a.input_label(x))
            .collect();
        let delta = self
            .state_subset
            .iter()
            .map(|&q| {
                self.input_subset
                    .iter()
                    .map(|&x| local[&a.step(q, x)])
                    .collect()
            })
            .collect();
        Automaton::from_table(states, inputs, delta).expect("closed selection restricts cleanly")
    }
}

/// Budget for [`find_morphism`]: the number of candidate pairs enumerated.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub max_candidates: u128,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_candidates: 50_000_000,
        }
    }
}

/// Exhaustive backtracking search for a morphism pair in canonical order:
/// `h1` candidates ascend lexicographically, `h2` candidates nested inside.
/// Returns the first passing pair, or `None` when the full space is refuted.
pub fn find_morphism(
    source: &Automaton,
    target: &Automaton,
    mode: MorphismMode,
    budget: SearchBudget,
) -> Result<Option<MorphismPair>, AutomatonError> {
    let (ns, nx) = (source.state_count(), source.input_count());
    let (ts, tx) = (target.state_count(), target.input_count());
    let total = (ts as u128).pow(ns as u32) * (tx as u128).pow(nx as u32);
    if total > budget.max_candidates {
        return Err(AutomatonError::SearchBudget { candidates: total });
    }
    match mode {
        MorphismMode::Homomorphism if ns < ts || nx < tx => return Ok(None),
        MorphismMode::Isomorphism if ns != ts || nx != tx => return Ok(None),
        MorphismMode::Embedding if ns > ts || nx > tx => return Ok(None),
        _ => {}
    }

    let mut h1 = vec![0usize; ns];
    loop {
        let mut h2 = vec![0usize; nx];
        loop {
            let pair = MorphismPair::new(h1.clone(), h2.clone());
            if check_morphism(source, target, &pair, mode)?.passed() {
                return Ok(Some(pair));
            }
            if !bump(&mut h2, tx) {
                break;
            }
        }
        if !bump(&mut h1, ts) {
            return Ok(None);
        }
    }
}

/// Advances `digits` in lexicographic order, each digit below `base`.
/// The leftmost digit is most significant. Returns false on wrap-around.
fn bump(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}
