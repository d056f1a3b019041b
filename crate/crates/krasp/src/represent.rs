//! Certificate-based verification of homomorphic and isomorphic
//! representation, brute-force representation search, and answer-set
//! computation through a representing product.
//!
//! A [`Certificate`] names a closed subautomaton of a product's
//! characteristic automaton, a congruence on its states, and a morphism pair
//! from the quotient onto a target automaton. [`verify_certificate`] checks
//! all of it exhaustively; nothing in this module is trusted unchecked.
//!
//! [`search_representation`] decides representability at desk scale. It
//! enumerates input subsets (largest first), closed state subsets (smallest
//! first, then lexicographically), input maps, and equivariant state maps in
//! lexicographic order with forced-value propagation. A certificate found by
//! the search always carries the finest (fiber) partition, so its quotient
//! map is bijective on blocks.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::asp::{AspError, Interpretation, Program};
use crate::automata::{Automaton, AutomatonError, BuildMode, Partition};
use crate::cascade::{
    product_automaton, product_char_automaton, CascadeError, CascadeSpec, ProgramProduct,
};

#[derive(Debug, Error)]
pub enum RepresentError {
    #[error("certificate refers to state index {0} outside the product")]
    BadStateIndex(usize),
    #[error("certificate refers to input index {0} outside the product")]
    BadInputIndex(usize),
    #[error("certificate repeats state index {0}")]
    DuplicateState(usize),
    #[error("certificate repeats input index {0}")]
    DuplicateInput(usize),
    #[error("certificate has an empty state or input selection")]
    EmptySelection,
    #[error("h1 has {got} entries for {want} partition blocks")]
    H1Length { got: usize, want: usize },
    #[error("h2 has {got} entries for {want} selected inputs")]
    H2Length { got: usize, want: usize },
    #[error("h1 maps block {block} to out-of-range target state {value}")]
    H1Target { block: usize, value: usize },
    #[error("h2 maps input {input} to out-of-range target input {value}")]
    H2Target { input: usize, value: usize },
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Cascade(#[from] CascadeError),
    #[error(transparent)]
    Asp(#[from] AspError),
    #[error("product has {got} states, search budget is {budget}")]
    BudgetStates { got: usize, budget: usize },
    #[error("product has {got} inputs, search supports at most {cap}")]
    BudgetInputs { got: usize, cap: usize },
    #[error("closed-subset enumeration exceeded {0} sets")]
    BudgetSubsets(usize),
    #[error("certificate does not verify: {0}")]
    Unverified(String),
    #[error("product global inputs do not match the program's interpretation space")]
    InputAlphabetMismatch,
    #[error("certificate input map is not the identity")]
    NotIdentityInputs,
    #[error("certificate quotient is not bijective on blocks")]
    NotBijectiveBlocks,
    #[error("quotient iteration failed to stabilize, certificate is inconsistent")]
    Unstable,
}

/// What a certificate claims.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Claim {
    Homomorphic,
    Isomorphic,
}

impl Claim {
    pub fn as_str(self) -> &'static str {
        match self {
            Claim::Homomorphic => "homomorphic",
            Claim::Isomorphic => "isomorphic",
        }
    }
}

/// Either kind of cascade product behind one verification interface.
#[derive(Debug, Clone)]
pub enum Product {
    Programs(ProgramProduct),
    Automata(CascadeSpec),
}

impl Product {
    pub fn char_automaton(&self, mode: BuildMode, cap: usize) -> Result<Automaton, CascadeError> {
        match self {
            Product::Programs(pp) => product_char_automaton(pp, mode, cap),
            Product::Automata(spec) => product_automaton(spec, mode, cap),
        }
    }

    pub fn state_dims(&self) -> Vec<usize> {
        match self {
            Product::Programs(pp) => pp.state_dims(),
            Product::Automata(spec) => spec.state_dims(),
        }
    }

    pub fn factor_count(&self) -> usize {
        match self {
            Product::Programs(pp) => pp.factors().len(),
            Product::Automata(spec) => spec.factors().len(),
        }
    }

    pub fn input_count(&self) -> usize {
        match self {
            Product::Programs(pp) => pp.global_inputs().count(),
            Product::Automata(spec) => spec.global_inputs().len(),
        }
    }

    pub fn input_label(&self, x: usize) -> String {
        match self {
            Product::Programs(pp) => pp.global_inputs().label(x),
            Product::Automata(spec) => spec.global_inputs()[x].clone(),
        }
    }
}

/// Subautomaton selection + state partition + morphism pair, witnessing that
/// a product represents a target automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// Product state indices of the selected subautomaton.
    pub sub_states: Vec<usize>,
    /// Global input indices of the selection.
    pub sub_inputs: Vec<usize>,
    /// Congruence blocks over positions in `sub_states`.
    pub partition: Partition,
    /// Target state index per block.
    pub h1: Vec<usize>,
    /// Target input index per position in `sub_inputs`.
    pub h2: Vec<usize>,
    pub claim: Claim,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepViolation {
    NotClosed {
        state: String,
        input: String,
        target: String,
    },
    NotCongruence {
        state: String,
        state2: String,
        input: String,
    },
    Equation {
        state: String,
        input: String,
        got: String,
        expected: String,
    },
    H1NotSurjective {
        missing: String,
    },
    H2NotSurjective {
        missing: String,
    },
    H1NotInjective {
        first: String,
        second: String,
    },
    H2NotInjective {
        first: String,
        second: String,
    },
}

impl std::fmt::Display for RepViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RepViolation::NotClosed {
                state,
                input,
                target,
            } => {
                write!(
                    f,
                    "not closed: delta({state}, {input}) = {target} left the selection"
                )
            }
            RepViolation::NotCongruence {
                state,
                state2,
                input,
            } => write!(
                f,
                "not a congruence: {state} ~ {state2} but their {input}-successors are not"
            ),
            RepViolation::Equation {
                state,
                input,
                got,
                expected,
            } => write!(
                f,
                "morphism equation fails at ({state}, {input}): got {got}, expected {expected}"
            ),
            RepViolation::H1NotSurjective { missing } => {
                write!(f, "h1 misses target state {missing}")
            }
            RepViolation::H2NotSurjective { missing } => {
                write!(f, "h2 misses target input {missing}")
            }
            RepViolation::H1NotInjective { first, second } => {
                write!(f, "h1 identifies blocks {first} and {second}")
            }
            RepViolation::H2NotInjective { first, second } => {
                write!(f, "h2 identifies inputs {first} and {second}")
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RepStats {
    pub states_checked: usize,
    pub inputs_checked: usize,
    pub equations_checked: usize,
}

/// Outcome of [`verify_certificate`]. `verdict` is false exactly when
/// `violations` is nonempty.
#[derive(Debug, Clone)]
pub struct RepresentationReport {
    pub verdict: bool,
    pub claim: Claim,
    pub violations: Vec<RepViolation>,
    pub stats: RepStats,
}

impl RepresentationReport {
    pub fn summary(&self) -> String {
        if self.verdict {
            format!(
                "verified: {} ({} states, {} inputs, {} equations)",
                self.claim.as_str(),
                self.stats.states_checked,
                self.stats.inputs_checked,
                self.stats.equations_checked
            )
        } else {
            let head = self
                .violations
                .first()
                .map(|v| v.to_string())
                .unwrap_or_default();
            format!(
                "failed: {} violation(s); first: {}",
                self.violations.len(),
                head
            )
        }
    }
}

/// Checks a certificate exhaustively: selection closure, congruence, quotient
/// morphism equation at every (block, input), surjectivity, and the claim's
/// bijectivity requirements. Structural mismatches are errors; semantic
/// failures are report content.
pub fn verify_certificate(
    product: &Product,
    target: &Automaton,
    cert: &Certificate,
    claim: Claim,
) -> Result<RepresentationReport, RepresentError> {
    let aut = product.char_automaton(BuildMode::Lazy, usize::MAX)?;
    verify_against(&aut, target, cert, claim)
}

/// Like [`verify_certificate`], against an already-built product automaton.
pub(crate) fn verify_against(
    aut: &Automaton,
    target: &Automaton,
    cert: &Certificate,
    claim: Claim,
) -> Result<RepresentationReport, RepresentError> {
    let n_product = aut.state_count();
    let n_inputs = aut.input_count();

    if cert.sub_states.is_empty() || cert.sub_inputs.is_empty() {
        return Err(RepresentError::EmptySelection);
    }
    let mut seen = BTreeSet::new();
    for &q in &cert.sub_states {
        if q >= n_product {
            return Err(RepresentError::BadStateIndex(q));
        }
        if !seen.insert(q) {
            return Err(RepresentError::DuplicateState(q));
        }
    }
    let mut seen = BTreeSet::new();
    for &x in &cert.sub_inputs {
        if x >= n_inputs {
            return Err(RepresentError::BadInputIndex(x));
        }
        if !seen.insert(x) {
            return Err(RepresentError::DuplicateInput(x));
        }
    }
    if cert.h1.len() != cert.partition.block_count() {
        return Err(RepresentError::H1Length {
            got: cert.h1.len(),
            want: cert.partition.block_count(),
        });
    }
    if cert.h2.len() != cert.sub_inputs.len() {
        return Err(RepresentError::H2Length {
            got: cert.h2.len(),
            want: cert.sub_inputs.len(),
        });
    }
    for (block, &t) in cert.h1.iter().enumerate() {
        if t >= target.state_count() {
            return Err(RepresentError::H1Target { block, value: t });
        }
    }
    for (input, &t) in cert.h2.iter().enumerate() {
        if t >= target.input_count() {
            return Err(RepresentError::H2Target { input, value: t });
        }
    }
    // must partition exactly the selected states
    let _ = Partition::new(cert.partition.blocks().to_vec(), cert.sub_states.len())?;

    let local: HashMap<usize, usize> = cert
        .sub_states
        .iter()
        .enumerate()
        .map(|(i, &q)| (q, i))
        .collect();
    let mut violations = Vec::new();
    let mut stats = RepStats {
        states_checked: cert.sub_states.len(),
        inputs_checked: cert.sub_inputs.len(),
        equations_checked: 0,
    };

    // closure
    let mut local_delta = vec![vec![0usize; cert.sub_inputs.len()]; cert.sub_states.len()];
    for (si, &q) in cert.sub_states.iter().enumerate() {
        for (xi, &x) in cert.sub_inputs.iter().enumerate() {
            let t = aut.step(q, x);
            match local.get(&t) {
                Some(&tl) => local_delta[si][xi] = tl,
                None => violations.push(RepViolation::NotClosed {
                    state: aut.state_label(q),
                    input: aut.input_label(x),
                    target: aut.state_label(t),
                }),
            }
        }
    }
    if !violations.is_empty() {
        return Ok(RepresentationReport {
            verdict: false,
            claim,
            violations,
            stats,
        });
    }

    // congruence
    let block_of = cert.partition.block_of(cert.sub_states.len());
    for b in cert.partition.blocks() {
        let rep = b[0];
        for xi in 0..cert.sub_inputs.len() {
            let dst = block_of[local_delta[rep][xi]];
            for &q in &b[1..] {
                if block_of[local_delta[q][xi]] != dst {
                    violations.push(RepViolation::NotCongruence {
                        state: aut.state_label(cert.sub_states[rep]),
                        state2: aut.state_label(cert.sub_states[q]),
                        input: aut.input_label(cert.sub_inputs[xi]),
                    });
                }
            }
        }
    }
    if !violations.is_empty() {
        return Ok(RepresentationReport {
            verdict: false,
            claim,
            violations,
            stats,
        });
    }

    // quotient + morphism equation, exhaustively over (block, input)
    for (bi, b) in cert.partition.blocks().iter().enumerate() {
        let rep = b[0];
        for (xi, &x) in cert.sub_inputs.iter().enumerate() {
            stats.equations_checked += 1;
            let got = cert.h1[block_of[local_delta[rep][xi]]];
            let expected = target.step(cert.h1[bi], cert.h2[xi]);
            if got != expected {
                violations.push(RepViolation::Equation {
                    state: aut.state_label(cert.sub_states[rep]),
                    input: aut.input_label(x),
                    got: target.state_label(got),
                    expected: target.state_label(expected),
                });
            }
        }
    }

    // surjectivity
    let mut hit = vec![false; target.state_count()];
    for &t in &cert.h1 {
        hit[t] = true;
    }
    for (t, h) in hit.iter().enumerate() {
        if !h {
            violations.push(RepViolation::H1NotSurjective {
                missing: target.state_label(t),
            });
        }
    }
    let mut hit = vec![false; target.input_count()];
    for &t in &cert.h2 {
        hit[t] = true;
    }
    for (t, h) in hit.iter().enumerate() {
        if !h {
            violations.push(RepViolation::H2NotSurjective {
                missing: target.input_label(t),
            });
        }
    }

    // claim-specific bijectivity
    if claim == Claim::Isomorphic {
        let mut first_of: HashMap<usize, usize> = HashMap::new();
        for (bi, &t) in cert.h1.iter().enumerate() {
            if let Some(&prev) = first_of.get(&t) {
                violations.push(RepViolation::H1NotInjective {
                    first: format!("block {prev}"),
                    second: format!("block {bi}"),
                });
            } else {
                first_of.insert(t, bi);
            }
        }
        let mut first_of: HashMap<usize, usize> = HashMap::new();
        for (xi, &t) in cert.h2.iter().enumerate() {
            if let Some(&prev) = first_of.get(&t) {
                violations.push(RepViolation::H2NotInjective {
                    first: aut.input_label(cert.sub_inputs[prev]),
                    second: aut.input_label(cert.sub_inputs[xi]),
                });
            } else {
                first_of.insert(t, xi);
            }
        }
    }

    Ok(RepresentationReport {
        verdict: violations.is_empty(),
        claim,
        violations,
        stats,
    })
}

/// Search limits for [`search_representation`].
#[derive(Debug, Clone, Copy)]
pub struct RepSearchBudget {
    /// Cap on the product's state count.
    pub max_states: usize,
    /// Cap on distinct closed subsets enumerated per input selection.
    pub max_closed_subsets: usize,
}

impl Default for RepSearchBudget {
    fn default() -> Self {
        RepSearchBudget {
            max_states: 1024,
            max_closed_subsets: 200_000,
        }
    }
}

const MAX_SEARCH_INPUTS: usize = 16;

/// Exhaustive, deterministic search for a representation certificate.
/// Returns the first find in canonical order, or `None` when the bounded
/// space is refuted.
pub fn search_representation(
    product: &Product,
    target: &Automaton,
    claim: Claim,
    budget: RepSearchBudget,
) -> Result<Option<Certificate>, RepresentError> {
    let n: usize = product.state_dims().iter().product();
    if n > budget.max_states {
        return Err(RepresentError::BudgetStates {
            got: n,
            budget: budget.max_states,
        });
    }
    let aut = product.char_automaton(BuildMode::Explicit, budget.max_states)?;
    search_on_automaton(&aut, target, claim, budget)
}

/// The same search against a pre-built explicit product automaton.
pub(crate) fn search_on_automaton(
    aut: &Automaton,
    target: &Automaton,
    claim: Claim,
    budget: RepSearchBudget,
) -> Result<Option<Certificate>, RepresentError> {
    let n = aut.state_count();
    let nx = aut.input_count();
    if n > budget.max_states {
        return Err(RepresentError::BudgetStates {
            got: n,
            budget: budget.max_states,
        });
    }
    if nx > MAX_SEARCH_INPUTS {
        return Err(RepresentError::BudgetInputs {
            got: nx,
            cap: MAX_SEARCH_INPUTS,
        });
    }
    let nt = target.state_count();
    let ntx = target.input_count();
    if n < nt || nx < ntx {
        return Ok(None);
    }
    let delta = aut.table(budget.max_states)?;
    let target_delta = target.table(usize::MAX)?;

    // input subsets, largest first, lexicographic within a size
    let mut input_subsets: Vec<Vec<usize>> = subsets_of(nx)
        .into_iter()
        .filter(|s| s.len() >= ntx)
        .collect();
    input_subsets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    if claim == Claim::Isomorphic {
        input_subsets.retain(|s| s.len() == ntx);
    }

    for inputs in input_subsets {
        let closed = closed_subsets(&delta, &inputs, budget.max_closed_subsets)?;
        for sub in closed {
            if sub.len() < nt {
                continue;
            }
            let mut h2 = vec![0usize; inputs.len()];
            loop {
                let mut hit = vec![false; ntx];
                for &v in &h2 {
                    hit[v] = true;
                }
                let surjective = hit.iter().all(|&h| h);
                let admissible = match claim {
                    Claim::Homomorphic => surjective,
                    Claim::Isomorphic => surjective && h2.len() == ntx,
                };
                if admissible {
                    if let Some(g) =
                        first_equivariant_map(&delta, &target_delta, &sub, &inputs, &h2, nt)
                    {
                        let cert = certificate_from_map(&sub, &inputs, &h2, &g, claim);
                        debug_assert!(verify_against(aut, target, &cert, claim)
                            .map(|r| r.verdict)
                            .unwrap_or(false));
                        return Ok(Some(cert));
                    }
                }
                if !bump(&mut h2, ntx) {
                    break;
                }
            }
        }
    }
    Ok(None)
}

fn subsets_of(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0u32..(1u32 << n) {
        out.push((0..n).filter(|&i| mask & (1 << i) != 0).collect());
    }
    out
}

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

/// All subsets closed under the selected inputs, ordered by increasing size
/// then lexicographically by members. Closed sets are exactly the unions of
/// single-state forward closures.
fn closed_subsets(
    delta: &[Vec<usize>],
    inputs: &[usize],
    cap: usize,
) -> Result<Vec<Vec<usize>>, RepresentError> {
    let n = delta.len();
    let mut seeds: Vec<BTreeSet<usize>> = Vec::new();
    for q in 0..n {
        let mut closure = BTreeSet::new();
        let mut stack = vec![q];
        while let Some(s) = stack.pop() {
            if closure.insert(s) {
                for &x in inputs {
                    stack.push(delta[s][x]);
                }
            }
        }
        if !seeds.contains(&closure) {
            seeds.push(closure);
        }
    }
    let mut all: BTreeSet<BTreeSet<usize>> = seeds.iter().cloned().collect();
    let mut frontier: Vec<BTreeSet<usize>> = seeds.clone();
    while let Some(cur) = frontier.pop() {
        for seed in &seeds {
            if seed.is_subset(&cur) {
                continue;
            }
            let mut merged = cur.clone();
            merged.extend(seed.iter().copied());
            if all.insert(merged.clone()) {
                if all.len() > cap {
                    return Err(RepresentError::BudgetSubsets(cap));
                }
                frontier.push(merged);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = all.into_iter().map(|s| s.into_iter().collect()).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Backtracking for the lexicographically first surjective map `g` from the
/// closed subset onto the target states satisfying
/// `g(delta(s, x)) = delta_T(g(s), h2(x))`. Assigning one state forces its
/// whole forward closure, so dead branches die fast.
fn first_equivariant_map(
    delta: &[Vec<usize>],
    target_delta: &[Vec<usize>],
    sub: &[usize],
    inputs: &[usize],
    h2: &[usize],
    nt: usize,
) -> Option<Vec<usize>> {
    let local: HashMap<usize, usize> = sub.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let local_delta: Vec<Vec<usize>> = sub
        .iter()
        .map(|&q| inputs.iter().map(|&x| local[&delta[q][x]]).collect())
        .collect();
    let mut g: Vec<Option<usize>> = vec![None; sub.len()];
    let mut trail: Vec<usize> = Vec::new();
    if solve(&mut g, &mut trail, &local_delta, target_delta, h2, nt) {
        Some(g.into_iter().map(|v| v.unwrap()).collect())
    } else {
        None
    }
}

fn propagate(
    start: usize,
    value: usize,
    g: &mut [Option<usize>],
    trail: &mut Vec<usize>,
    local_delta: &[Vec<usize>],
    target_delta: &[Vec<usize>],
    h2: &[usize],
) -> bool {
    let mut queue = vec![(start, value)];
    while let Some((s, v)) = queue.pop() {
        match g[s] {
            Some(existing) => {
                if existing != v {
                    return false;
                }
            }
            None => {
                g[s] = Some(v);
                trail.push(s);
                for (xi, &succ) in local_delta[s].iter().enumerate() {
                    queue.push((succ, target_delta[v][h2[xi]]));
                }
            }
        }
    }
    true
}

fn solve(
    g: &mut Vec<Option<usize>>,
    trail: &mut Vec<usize>,
    local_delta: &[Vec<usize>],
    target_delta: &[Vec<usize>],
    h2: &[usize],
    nt: usize,
) -> bool {
    let next = match g.iter().position(|v| v.is_none()) {
        Some(i) => i,
        None => {
            let mut hit = vec![false; nt];
            for v in g.iter() {
                hit[v.unwrap()] = true;
            }
            return hit.iter().all(|&h| h);
        }
    };
    for value in 0..nt {
        let mark = trail.len();
        if propagate(next, value, g, trail, local_delta, target_delta, h2)
            && solve(g, trail, local_delta, target_delta, h2, nt)
        {
            return true;
        }
        while trail.len() > mark {
            g[trail.pop().unwrap()] = None;
        }
    }
    false
}

/// Packages an equivariant map as a certificate. The partition is the map's
/// fiber partition, so the quotient map is injective on blocks.
fn certificate_from_map(
    sub: &[usize],
    inputs: &[usize],
    h2: &[usize],
    g: &[usize],
    claim: Claim,
) -> Certificate {
    let mut fibers: HashMap<usize, Vec<usize>> = HashMap::new();
    for (local, &v) in g.iter().enumerate() {
        fibers.entry(v).or_default().push(local);
    }
    let mut blocks: Vec<Vec<usize>> = fibers.into_values().collect();
    blocks.sort_by_key(|b| b[0]);
    let partition = Partition::new(blocks, sub.len()).expect("fibers partition the subset");
    let h1 = partition.blocks().iter().map(|b| g[b[0]]).collect();
    Certificate {
        sub_states: sub.to_vec(),
        sub_inputs: inputs.to_vec(),
        partition,
        h1,
        h2: h2.to_vec(),
        claim,
    }
}

/// Answer sets of `program` computed through a verified representing product,
/// by iterating the quotient operator from the block mapped to the empty
/// interpretation. Preconditions: the certificate verifies against the
/// program's characteristic automaton, the product's global inputs are the
/// program's interpretation space in canonical order, the input map is the
/// identity, and the quotient map is bijective on blocks.
pub fn answer_sets_via_product(
    program: &Program,
    product: &Product,
    cert: &Certificate,
) -> Result<Vec<Interpretation>, RepresentError> {
    let m = program.atom_count();
    let n_interps = 1usize << m;

    if product.input_count() != n_interps {
        return Err(RepresentError::InputAlphabetMismatch);
    }
    let alphabet = program.alphabet();
    for bits in 0..n_interps {
        let want = alphabet.render_interp(alphabet.interp_from_bits(bits as u64));
        if product.input_label(bits) != want {
            return Err(RepresentError::InputAlphabetMismatch);
        }
    }

    // identity input map: every global input selected in order, each mapped
    // to the target input of the same index
    if cert.sub_inputs.len() != n_interps
        || cert.sub_inputs.iter().enumerate().any(|(k, &x)| k != x)
        || cert.h2.iter().enumerate().any(|(k, &t)| k != t)
    {
        return Err(RepresentError::NotIdentityInputs);
    }

    if cert.h1.len() != n_interps {
        return Err(RepresentError::NotBijectiveBlocks);
    }
    let mut inv = vec![usize::MAX; n_interps];
    for (bi, &t) in cert.h1.iter().enumerate() {
        if t >= n_interps || inv[t] != usize::MAX {
            return Err(RepresentError::NotBijectiveBlocks);
        }
        inv[t] = bi;
    }

    let target = crate::automata::characteristic_automaton(program, BuildMode::Explicit, m)?;
    let aut = product.char_automaton(BuildMode::Lazy, usize::MAX)?;
    let report = verify_against(&aut, &target, cert, cert.claim)?;
    if !report.verdict {
        return Err(RepresentError::Unverified(report.summary()));
    }

    let local: HashMap<usize, usize> = cert
        .sub_states
        .iter()
        .enumerate()
        .map(|(i, &q)| (q, i))
        .collect();
    let block_of = cert.partition.block_of(cert.sub_states.len());
    let bottom = inv[0]; // the block mapped to the empty interpretation

    let mut found = Vec::new();
    for i_bits in 0..n_interps {
        let mut block = bottom;
        let mut stable = false;
        for _ in 0..=m + 1 {
            let rep = cert.sub_states[cert.partition.blocks()[block][0]];
            let next = block_of[local[&aut.step(rep, i_bits)]];
            if next == block {
                stable = true;
                break;
            }
            block = next;
        }
        if !stable {
            return Err(RepresentError::Unstable);
        }
        if cert.h1[block] == i_bits {
            found.push(alphabet.interp_from_bits(i_bits as u64));
        }
    }
    Ok(found)
}
