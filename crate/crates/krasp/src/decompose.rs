//! Constructive builders: programmability witnesses for the canonical
//! machines, the positive-tight compiler into reset products, the
//! full-transformation embedding, the bounded cascade decomposition engine,
//! and the end-to-end program pipeline.
//!
//! Every builder ends by verifying its own output. A decomposition that does
//! not verify is a bug and surfaces as a hard error, never as a silently
//! accepted result. The search engine itself is bounded and deterministic;
//! exhausting its bounds yields an explicit "inconclusive" outcome, which is
//! never interpreted as non-existence.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::asp::{canonical_program, AspError, Atom, CanonicalProgram, Interpretation, Program};
use crate::automata::{
    canonical_automaton, characteristic_automaton, check_morphism, Automaton, AutomatonError,
    BuildMode, CanonicalAutomaton, LabelSpace, MorphismMode, MorphismPair, MorphismReport,
    Partition, SubautomatonSelection,
};
use crate::cascade::{
    decode_mixed, encode_mixed, product_automaton, CascadeError, CascadeSpec, FactorTable,
    Feedforward, ProgramProduct,
};
use crate::represent::{
    answer_sets_via_product, search_on_automaton, verify_certificate, Certificate, Claim, Product,
    RepSearchBudget, RepresentError, RepresentationReport,
};

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("program is not positive and tight: {0}")]
    NotPositiveTight(String),
    #[error("target automaton needs more than one state")]
    TooFewStates,
    #[error("program has {got} atoms, pipeline budget is {budget}")]
    PipelineBudget { got: usize, budget: usize },
    #[error("full-transformation embedding budget is n <= {budget}, got {got}")]
    TnBudget { got: usize, budget: usize },
    #[error("internal verification failure (this is a bug): {0}")]
    InternalVerification(String),
    #[error(transparent)]
    Asp(#[from] AspError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Cascade(#[from] CascadeError),
    #[error(transparent)]
    Represent(#[from] RepresentError),
}

/// A program together with a verified isomorphism from a subautomaton of its
/// characteristic automaton onto a target machine.
#[derive(Debug)]
pub struct ProgrammabilityWitness {
    pub program: Program,
    pub target: Automaton,
    char_automaton: Automaton,
    pub selection: SubautomatonSelection,
    /// Morphism from the restricted subautomaton (in selection order) onto the target.
    pub pair: MorphismPair,
}

impl ProgrammabilityWitness {
    /// Re-checks the isomorphism exhaustively.
    pub fn verify(&self) -> Result<MorphismReport, DecomposeError> {
        let sub = self.selection.restrict(&self.char_automaton);
        Ok(check_morphism(
            &sub,
            &self.target,
            &self.pair,
            MorphismMode::Isomorphism,
        )?)
    }

    /// Canonical rendering of the witness tables.
    pub fn render(&self) -> String {
        let a = &self.char_automaton;
        let states: Vec<String> = self
            .selection
            .states()
            .iter()
            .map(|&q| a.state_label(q))
            .collect();
        let inputs: Vec<String> = self
            .selection
            .inputs()
            .iter()
            .map(|&x| a.input_label(x))
            .collect();
        let h1: Vec<String> = self
            .selection
            .states()
            .iter()
            .zip(&self.pair.h1)
            .map(|(&q, &t)| format!("{}->{}", a.state_label(q), self.target.state_label(t)))
            .collect();
        let h2: Vec<String> = self
            .selection
            .inputs()
            .iter()
            .zip(&self.pair.h2)
            .map(|(&x, &t)| format!("{}->{}", a.input_label(x), self.target.input_label(t)))
            .collect();
        format!(
            "states: {}\ninputs: {}\nh1: {}\nh2: {}\n",
            states.join(", "),
            inputs.join(", "),
            h1.join(", "),
            h2.join(", ")
        )
    }
}

/// The machines whose programmability the library establishes constructively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    Reset,
    Standard(usize),
}

/// Emits the explicit isomorphism witnessing that the reset program programs
/// the reset automaton, or that the n-standard program programs the n-state
/// standard automaton. The witness is verified before being returned.
pub fn programmable_witness(kind: WitnessKind) -> Result<ProgrammabilityWitness, DecomposeError> {
    let witness = match kind {
        WitnessKind::Reset => {
            let program = canonical_program(CanonicalProgram::Reset)?;
            let target = canonical_automaton(CanonicalAutomaton::Reset)?;
            let char_automaton = characteristic_automaton(&program, BuildMode::Explicit, 1)?;
            let selection = SubautomatonSelection::new(&char_automaton, vec![0, 1], vec![0, 1])?;
            // h1: {} -> 1, {1} -> 2 ; h2: {} -> s1, {1} -> s0
            let pair = MorphismPair::new(vec![0, 1], vec![1, 0]);
            ProgrammabilityWitness {
                program,
                target,
                char_automaton,
                selection,
                pair,
            }
        }
        WitnessKind::Standard(n) => {
            if n < 2 {
                return Err(DecomposeError::BadParameter(format!(
                    "standard witness needs n > 1, got {n}"
                )));
            }
            let program = canonical_program(CanonicalProgram::Standard(n))?;
            let target = canonical_automaton(CanonicalAutomaton::Standard(n))?;
            let m = program.atom_count();
            let char_automaton = characteristic_automaton(&program, BuildMode::Explicit, m)?;
            let alpha = program.alphabet().clone();
            let singleton = |i: usize| -> Result<usize, DecomposeError> {
                Ok(alpha.interp_from_atoms([&Atom::integer(i as u64)])?.bits() as usize)
            };
            let pairset = |i: usize, j: usize| -> Result<usize, DecomposeError> {
                Ok(alpha
                    .interp_from_atoms([&Atom::integer(i as u64), &Atom::integer(j as u64)])?
                    .bits() as usize)
            };
            let states: Vec<usize> = (1..=n).map(singleton).collect::<Result<_, _>>()?;
            // inputs mapping to identity, cyclic shift, transposition in order
            let inputs = vec![pairset(2, 3)?, pairset(1, 3)?, pairset(1, 2)?];
            let selection = SubautomatonSelection::new(&char_automaton, states, inputs)?;
            let pair = MorphismPair::new((0..n).collect(), vec![0, 1, 2]);
            ProgrammabilityWitness {
                program,
                target,
                char_automaton,
                selection,
                pair,
            }
        }
    };
    let report = witness.verify()?;
    if !report.passed() {
        return Err(DecomposeError::InternalVerification(format!(
            "programmability witness for {kind:?} failed: {} violations",
            report.violations.len()
        )));
    }
    Ok(witness)
}

/// Which factor machines the decomposition engine may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FactorKind {
    Reset,
    Standard(usize),
}

impl FactorKind {
    fn automaton(self) -> Result<Automaton, AutomatonError> {
        match self {
            FactorKind::Reset => canonical_automaton(CanonicalAutomaton::Reset),
            FactorKind::Standard(n) => canonical_automaton(CanonicalAutomaton::Standard(n)),
        }
    }

    fn program(self) -> Result<Program, AspError> {
        match self {
            FactorKind::Reset => canonical_program(CanonicalProgram::Reset),
            FactorKind::Standard(n) => canonical_program(CanonicalProgram::Standard(n)),
        }
    }
}

/// Factor counts per kind in a decomposition.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactorCensus {
    pub resets: usize,
    pub standards: BTreeMap<usize, usize>,
}

impl FactorCensus {
    fn from_kinds(kinds: &[FactorKind]) -> Self {
        let mut census = FactorCensus::default();
        for k in kinds {
            match k {
                FactorKind::Reset => census.resets += 1,
                FactorKind::Standard(n) => *census.standards.entry(*n).or_default() += 1,
            }
        }
        census
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        if self.resets > 0 {
            parts.push(format!("reset x{}", self.resets));
        }
        for (n, count) in &self.standards {
            parts.push(format!("standard({n}) x{count}"));
        }
        if parts.is_empty() {
            "none".to_string()
        } else {
            parts.join(", ")
        }
    }
}

/// A verified decomposition: the product, its certificate, the verification
/// report, and the factor census.
#[derive(Debug)]
pub struct DecompositionResult {
    pub product: Product,
    pub certificate: Certificate,
    pub report: RepresentationReport,
    pub census: FactorCensus,
}

/// Engine outcome. Exhausted bounds are reported, never treated as a proof
/// of non-existence.
#[derive(Debug)]
pub enum DecomposeOutcome {
    Verified(Box<DecompositionResult>),
    Inconclusive {
        reason: String,
        sequences_tried: u64,
        tables_tried: u64,
    },
}

impl DecomposeOutcome {
    pub fn is_verified(&self) -> bool {
        matches!(self, DecomposeOutcome::Verified(_))
    }
}

#[derive(Debug, Clone)]
pub struct DecomposeConfig {
    /// Longest factor sequence tried.
    pub max_factors: usize,
    /// Cap on explicit product states per candidate.
    pub product_cap: usize,
    /// Cap on feedforward tables enumerated per factor sequence; sequences
    /// with a larger table space are skipped as part of the bound.
    pub max_tables_per_sequence: u128,
    /// Budget of the per-candidate representation search.
    pub search: RepSearchBudget,
    /// Standard-automaton sizes to draw factors from. `None` means 2..=|Q|.
    pub standard_sizes: Option<Vec<usize>>,
    /// Skip structurally hopeless targets (see [`mixed_letter_obstruction`]).
    pub structural_prune: bool,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            max_factors: 3,
            product_cap: crate::cascade::DEFAULT_PRODUCT_CAP,
            max_tables_per_sequence: 1_000_000,
            search: RepSearchBudget::default(),
            standard_sizes: None,
            structural_prune: true,
        }
    }
}

/// Reset and standard letters are constants or permutations, and that shape
/// is closed under cascading: on the settled image of a repeated letter,
/// every input word acts injectively. A target with one letter acting as a
/// permutation and another acting non-injectively therefore admits no
/// representation by such a cascade at any length: some word containing the
/// collapsing letter acts as the identity on the settled image, while its
/// image under the quotient map would have to land in a proper subset of the
/// target, contradicting surjectivity. Detecting that shape up front saves
/// the engine from enumerating a table space it can only exhaust; the
/// reported outcome is still "inconclusive".
pub fn mixed_letter_obstruction(target: &Automaton) -> bool {
    let n = target.state_count();
    let mut has_perm = false;
    let mut has_collapse = false;
    for x in 0..target.input_count() {
        let mut hit = vec![false; n];
        let mut injective = true;
        for q in 0..n {
            let t = target.step(q, x);
            if hit[t] {
                injective = false;
            }
            hit[t] = true;
        }
        if injective {
            has_perm = true;
        } else {
            has_collapse = true;
        }
    }
    has_perm && has_collapse
}

/// Bounded deterministic search for a cascade of reset and standard automata
/// homomorphically representing `target`, over the target's own input
/// alphabet. Iterative deepening on the factor count (resets ordered before
/// standard factors); within a sequence, feedforward tables are enumerated
/// in lexicographic order and each candidate product is searched for a
/// certificate. The first verified candidate wins.
pub fn decompose_automaton(
    target: &Automaton,
    config: &DecomposeConfig,
) -> Result<DecomposeOutcome, DecomposeError> {
    let nq = target.state_count();
    if nq < 2 {
        return Err(DecomposeError::TooFewStates);
    }
    let global_inputs: Vec<String> = (0..target.input_count())
        .map(|x| target.input_label(x))
        .collect();

    let mut kinds: Vec<FactorKind> = vec![FactorKind::Reset];
    match &config.standard_sizes {
        Some(sizes) => kinds.extend(sizes.iter().map(|&n| FactorKind::Standard(n))),
        None => kinds.extend((2..=nq).map(FactorKind::Standard)),
    }

    let mut sequences_tried = 0u64;
    let mut tables_tried = 0u64;

    if config.structural_prune && mixed_letter_obstruction(target) {
        return Ok(DecomposeOutcome::Inconclusive {
            reason: "target mixes a permutation letter with a collapsing letter; no cascade of \
                     reset/standard factors exists, search skipped"
                .into(),
            sequences_tried,
            tables_tried,
        });
    }

    let mut cache: BTreeMap<FactorKind, Arc<Automaton>> = BTreeMap::new();
    for &k in &kinds {
        cache.insert(k, Arc::new(k.automaton()?));
    }

    for len in 1..=config.max_factors {
        let mut seq = vec![0usize; len];
        loop {
            let sequence: Vec<FactorKind> = seq.iter().map(|&i| kinds[i]).collect();
            sequences_tried += 1;
            if let Some(result) = try_sequence(
                &sequence,
                &cache,
                target,
                &global_inputs,
                config,
                &mut tables_tried,
            )? {
                return Ok(DecomposeOutcome::Verified(Box::new(result)));
            }
            if !bump_digits(&mut seq, kinds.len()) {
                break;
            }
        }
    }

    Ok(DecomposeOutcome::Inconclusive {
        reason: format!(
            "no verified cascade within {} factor(s); bounds exhausted",
            config.max_factors
        ),
        sequences_tried,
        tables_tried,
    })
}

fn bump_digits(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn try_sequence(
    sequence: &[FactorKind],
    cache: &BTreeMap<FactorKind, Arc<Automaton>>,
    target: &Automaton,
    global_inputs: &[String],
    config: &DecomposeConfig,
    tables_tried: &mut u64,
) -> Result<Option<DecompositionResult>, DecomposeError> {
    let factors: Vec<Arc<Automaton>> = sequence.iter().map(|k| cache[k].clone()).collect();
    let state_dims: Vec<usize> = factors.iter().map(|f| f.state_count()).collect();
    let product_states: usize = state_dims.iter().product();
    if product_states > config.product_cap || product_states < target.state_count() {
        return Ok(None);
    }

    let nx = global_inputs.len();
    let mut cells = Vec::with_capacity(sequence.len());
    let mut total: u128 = 1;
    for (i, f) in factors.iter().enumerate() {
        let c: usize = state_dims[..i].iter().product::<usize>() * nx;
        cells.push(c);
        total = total.saturating_mul((f.input_count() as u128).saturating_pow(c as u32));
    }
    if total > config.max_tables_per_sequence {
        return Ok(None);
    }

    // flat odometer over all table cells, factor 1 cells most significant
    let mut cell_base = Vec::new();
    for (i, &c) in cells.iter().enumerate() {
        cell_base.extend(std::iter::repeat_n(factors[i].input_count(), c));
    }
    let mut digits: Vec<usize> = vec![0; cell_base.len()];

    loop {
        *tables_tried += 1;
        let mut tables = Vec::with_capacity(sequence.len());
        let mut off = 0usize;
        for (i, &c) in cells.iter().enumerate() {
            let entries = digits[off..off + c].to_vec();
            off += c;
            tables.push(
                FactorTable::new(state_dims[..i].to_vec(), nx, entries)
                    .expect("odometer shape matches"),
            );
        }
        let spec = CascadeSpec::new(
            factors.clone(),
            global_inputs.to_vec(),
            Feedforward::Tables(tables),
        )?;
        let aut = product_automaton(&spec, BuildMode::Explicit, config.product_cap)?;
        if let Some(cert) = search_on_automaton(&aut, target, Claim::Homomorphic, config.search)? {
            let product = Product::Automata(spec);
            let report = verify_certificate(&product, target, &cert, Claim::Homomorphic)?;
            if !report.verdict {
                return Err(DecomposeError::InternalVerification(report.summary()));
            }
            return Ok(Some(DecompositionResult {
                product,
                certificate: cert,
                report,
                census: FactorCensus::from_kinds(sequence),
            }));
        }
        if !bump_mixed(&mut digits, &cell_base) {
            return Ok(None);
        }
    }
}

fn bump_mixed(digits: &mut [usize], bases: &[usize]) -> bool {
    for (d, &b) in digits.iter_mut().zip(bases).rev() {
        *d += 1;
        if *d < b {
            return true;
        }
        *d = 0;
    }
    false
}

/// Compiles a positive tight program into an isomorphically representing
/// product of reset programs: one factor per atom, ordered by ascending
/// level (ties by alphabet order). A factor's feedforward feeds the empty
/// letter (so the factor's rule fires) exactly when some rule for its atom
/// has its positive body satisfied by the decoded earlier factors. The
/// certificate is the diagonal with the binary-encoding map, verified before
/// return.
pub fn compile_positive_tight(program: &Program) -> Result<DecompositionResult, DecomposeError> {
    let classification = program.classify();
    if !classification.positive {
        return Err(DecomposeError::NotPositiveTight(
            "program has negative body atoms".into(),
        ));
    }
    let levels = classification
        .tightness
        .ok_or_else(|| DecomposeError::NotPositiveTight("positive dependency cycle".into()))?;

    let m = program.atom_count();
    let n_interps = 1usize << m;
    if n_interps > crate::cascade::DEFAULT_PRODUCT_CAP {
        return Err(DecomposeError::BadParameter(format!(
            "program has {m} atoms; the compiled product would exceed the state cap"
        )));
    }

    // factor order: ascending level, ties by alphabet position
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| (levels.level(i), i));

    let reset = canonical_program(CanonicalProgram::Reset)?;
    let mut tables = Vec::with_capacity(m);
    for (k, &atom_idx) in order.iter().enumerate() {
        let dims = vec![2usize; k];
        let cell_count: usize = dims.iter().product();
        let mut entries = Vec::with_capacity(cell_count * n_interps);
        for cell in 0..cell_count {
            let comps = decode_mixed(&dims, cell);
            // earlier factors decode to a partial interpretation
            let mut decoded = 0u64;
            for (j, &s) in comps.iter().enumerate() {
                if s == 1 {
                    decoded |= 1 << order[j];
                }
            }
            let fires = program.rules().iter().any(|r| {
                program.alphabet().index_of(&r.head) == Some(atom_idx)
                    && r.pos_body.iter().all(|b| {
                        let bi = program.alphabet().index_of(b).expect("validated");
                        decoded & (1 << bi) != 0
                    })
            });
            let letter = if fires { 0 } else { 1 };
            entries.extend(std::iter::repeat_n(letter, n_interps));
        }
        tables.push(FactorTable::new(dims, n_interps, entries).expect("shape"));
    }

    let pp = ProgramProduct::new(
        vec![reset; m],
        LabelSpace::Interps(program.alphabet().clone()),
        Feedforward::Tables(tables),
    )?;

    // binary encoding: product index (in factor order) -> interpretation bits
    let dims = vec![2usize; m];
    let mut h1 = Vec::with_capacity(n_interps);
    for idx in 0..n_interps {
        let comps = decode_mixed(&dims, idx);
        let mut bits = 0usize;
        for (k, &s) in comps.iter().enumerate() {
            if s == 1 {
                bits |= 1 << order[k];
            }
        }
        h1.push(bits);
    }
    let cert = Certificate {
        sub_states: (0..n_interps).collect(),
        sub_inputs: (0..n_interps).collect(),
        partition: Partition::diagonal(n_interps),
        h1,
        h2: (0..n_interps).collect(),
        claim: Claim::Isomorphic,
    };

    let target = characteristic_automaton(program, BuildMode::Explicit, m)?;
    let product = Product::Programs(pp);
    let report = verify_certificate(&product, &target, &cert, Claim::Isomorphic)?;
    if !report.verdict {
        return Err(DecomposeError::InternalVerification(report.summary()));
    }
    Ok(DecompositionResult {
        product,
        certificate: cert,
        report,
        census: FactorCensus {
            resets: m,
            standards: BTreeMap::new(),
        },
    })
}

/// Default budget for [`build_tn_embedding`].
pub const DEFAULT_TN_BUDGET: usize = 3;

/// A verified embedding of the full-transformation automaton on `[n]` into
/// the single-factor product of its program.
#[derive(Debug)]
pub struct TnEmbedding {
    pub n: usize,
    pub product: ProgramProduct,
    /// Injective pair from the n-state automaton into the product automaton.
    pub pair: MorphismPair,
    pub report: MorphismReport,
}

/// Builds the single-factor product of the full-transformation program with
/// identity feedforward and checks the embedding equations at all `n * n^n`
/// pairs by lazy operator evaluation.
pub fn build_tn_embedding(n: usize, max_n: usize) -> Result<TnEmbedding, DecomposeError> {
    if n < 1 {
        return Err(DecomposeError::BadParameter(
            "tn embedding needs n >= 1".into(),
        ));
    }
    if n > max_n {
        return Err(DecomposeError::TnBudget {
            got: n,
            budget: max_n,
        });
    }
    let program = canonical_program(CanonicalProgram::Tn(n))?;
    let count = crate::asp::tn_input_count(n);
    let pp = ProgramProduct::new(
        vec![program.clone()],
        LabelSpace::Interps(program.alphabet().clone()),
        Feedforward::Identity,
    )?;
    let product_aut = crate::cascade::product_char_automaton(&pp, BuildMode::Lazy, usize::MAX)?;
    let target = canonical_automaton(CanonicalAutomaton::Tn(n))?;

    // h1(j) = {j}; h2(s_k) = the complement of {k}
    let h1: Vec<usize> = (0..n).map(|j| 1usize << j).collect();
    let full = (1usize << count) - 1;
    let h2: Vec<usize> = (0..count).map(|k| full ^ (1 << k)).collect();
    let pair = MorphismPair::new(h1, h2);
    let report = check_morphism(&target, &product_aut, &pair, MorphismMode::Embedding)?;
    if !report.passed() {
        return Err(DecomposeError::InternalVerification(format!(
            "full-transformation embedding for n={n} failed: {} violations",
            report.violations.len()
        )));
    }
    Ok(TnEmbedding {
        n,
        product: pp,
        pair,
        report,
    })
}

/// Default cap on the alphabet size handled by [`kr_pipeline`].
pub const DEFAULT_PIPELINE_ATOMS: usize = 2;

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Largest program alphabet accepted.
    pub max_atoms: usize,
    pub decompose: DecomposeConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            max_atoms: DEFAULT_PIPELINE_ATOMS,
            decompose: DecomposeConfig::default(),
        }
    }
}

/// Pipeline outcome: a verified program product with its certificate, plus
/// the answer sets computed through the product when the certificate
/// supports that (bijective blocks, identity input map).
#[derive(Debug)]
pub enum PipelineOutcome {
    Verified(Box<PipelineResult>),
    Inconclusive { reason: String },
}

#[derive(Debug)]
pub struct PipelineResult {
    pub decomposition: DecompositionResult,
    pub answer_sets: Option<Vec<Interpretation>>,
}

impl PipelineOutcome {
    pub fn is_verified(&self) -> bool {
        matches!(self, PipelineOutcome::Verified(_))
    }
}

/// End-to-end pipeline: build the program's characteristic automaton,
/// decompose it into a cascade of reset and `2^m`-state standard automata
/// over the program's interpretation space, transport the result to a
/// product of reset and standard programs through the programmability
/// isomorphisms, re-verify the transported certificate from scratch, and
/// attach the answer sets computed through the product when the certificate
/// allows it.
pub fn kr_pipeline(
    program: &Program,
    config: &PipelineConfig,
) -> Result<PipelineOutcome, DecomposeError> {
    let m = program.atom_count();
    if m > config.max_atoms {
        return Err(DecomposeError::PipelineBudget {
            got: m,
            budget: config.max_atoms,
        });
    }
    let target = characteristic_automaton(program, BuildMode::Explicit, m)?;

    let mut dconfig = config.decompose.clone();
    dconfig.standard_sizes = Some(vec![1 << m]);
    let outcome = decompose_automaton(&target, &dconfig)?;
    let auto_result = match outcome {
        DecomposeOutcome::Verified(r) => r,
        DecomposeOutcome::Inconclusive { reason, .. } => {
            return Ok(PipelineOutcome::Inconclusive { reason });
        }
    };
    let spec = match &auto_result.product {
        Product::Automata(spec) => spec,
        Product::Programs(_) => unreachable!("engine builds automata cascades"),
    };

    let result = transport_to_programs(program, spec, &auto_result, &target)?;

    let cert = &result.certificate;
    let n_interps = 1usize << m;
    let identity_inputs = cert.sub_inputs.len() == n_interps
        && cert.sub_inputs.iter().enumerate().all(|(k, &x)| k == x)
        && cert.h2.iter().enumerate().all(|(k, &t)| k == t);
    let bijective = cert.h1.len() == n_interps && {
        let mut seen = vec![false; n_interps];
        cert.h1.iter().all(|&t| {
            let fresh = !seen[t];
            seen[t] = true;
            fresh
        })
    };
    let answer_sets = if identity_inputs && bijective {
        Some(answer_sets_via_product(program, &result.product, cert)?)
    } else {
        None
    };

    Ok(PipelineOutcome::Verified(Box::new(PipelineResult {
        decomposition: result,
        answer_sets,
    })))
}

/// Replaces each automaton factor by its program, transports feedforward
/// tables and certificate through the programmability isomorphisms, and
/// verifies the result against the program's characteristic automaton.
fn transport_to_programs(
    program: &Program,
    spec: &CascadeSpec,
    auto_result: &DecompositionResult,
    target: &Automaton,
) -> Result<DecompositionResult, DecomposeError> {
    let kinds = census_kinds(spec)?;
    let factor_programs: Vec<Program> = kinds
        .iter()
        .map(|k| k.program())
        .collect::<Result<_, _>>()?;

    // per factor: automaton state -> program interpretation bits, and
    // automaton letter -> program letter bits
    let mut state_maps: Vec<Vec<usize>> = Vec::new();
    let mut letter_maps: Vec<Vec<usize>> = Vec::new();
    for (k, p) in kinds.iter().zip(&factor_programs) {
        let alpha = p.alphabet().clone();
        let sets = |atoms: &[u64]| -> Result<usize, DecomposeError> {
            let owned: Vec<Atom> = atoms.iter().map(|&v| Atom::integer(v)).collect();
            Ok(alpha.interp_from_atoms(owned.iter())?.bits() as usize)
        };
        match k {
            FactorKind::Reset => {
                state_maps.push(vec![sets(&[])?, sets(&[1])?]);
                // s0 (reset to 1) corresponds to the letter {1}; s1 to {}
                letter_maps.push(vec![sets(&[1])?, sets(&[])?]);
            }
            FactorKind::Standard(n) => {
                let states: Vec<usize> = (1..=*n as u64)
                    .map(|i| sets(&[i]))
                    .collect::<Result<_, _>>()?;
                state_maps.push(states);
                letter_maps.push(vec![sets(&[2, 3])?, sets(&[1, 3])?, sets(&[1, 2])?]);
            }
        }
    }

    let aut_dims = spec.state_dims();
    let prog_dims: Vec<usize> = factor_programs
        .iter()
        .map(|p| p.alphabet().interp_count())
        .collect();
    let nx = spec.global_inputs().len();

    // inverse state maps: program bits -> automaton state, where defined
    let inverses: Vec<BTreeMap<usize, usize>> = state_maps
        .iter()
        .map(|sm| sm.iter().enumerate().map(|(a, &b)| (b, a)).collect())
        .collect();

    let aut_tables = match spec.psi() {
        Feedforward::Tables(ts) => ts,
        Feedforward::Identity => {
            return Err(DecomposeError::InternalVerification(
                "engine cascades always carry extensional tables".into(),
            ))
        }
    };

    let mut tables = Vec::with_capacity(kinds.len());
    for i in 0..kinds.len() {
        let dims = prog_dims[..i].to_vec();
        let cell_count: usize = dims.iter().product();
        // cells outside the embedded subproduct get the factor's smallest
        // transported letter; the certificate's selection never reaches them
        let default_letter = *letter_maps[i].iter().min().expect("nonempty");
        let mut entries = Vec::with_capacity(cell_count * nx);
        for cell in 0..cell_count {
            let comps = decode_mixed(&dims, cell);
            let aut_states: Option<Vec<usize>> = comps
                .iter()
                .enumerate()
                .map(|(j, &bits)| inverses[j].get(&bits).copied())
                .collect();
            for x in 0..nx {
                let letter = match &aut_states {
                    Some(states) => {
                        let aut_letter =
                            aut_tables[i].entries()[flat_index(&aut_dims[..i], states, nx, x)];
                        letter_maps[i][aut_letter]
                    }
                    None => default_letter,
                };
                entries.push(letter);
            }
        }
        tables.push(FactorTable::new(dims, nx, entries).expect("shape"));
    }

    let pp = ProgramProduct::new(
        factor_programs,
        LabelSpace::Interps(program.alphabet().clone()),
        Feedforward::Tables(tables),
    )?;

    let sub_states: Vec<usize> = auto_result
        .certificate
        .sub_states
        .iter()
        .map(|&idx| {
            let comps = decode_mixed(&aut_dims, idx);
            let mapped: Vec<usize> = comps
                .iter()
                .enumerate()
                .map(|(j, &q)| state_maps[j][q])
                .collect();
            encode_mixed(&prog_dims, &mapped)
        })
        .collect();
    let cert = Certificate {
        sub_states,
        sub_inputs: auto_result.certificate.sub_inputs.clone(),
        partition: auto_result.certificate.partition.clone(),
        h1: auto_result.certificate.h1.clone(),
        h2: auto_result.certificate.h2.clone(),
        claim: auto_result.certificate.claim,
    };

    let product = Product::Programs(pp);
    let report = verify_certificate(&product, target, &cert, cert.claim)?;
    if !report.verdict {
        return Err(DecomposeError::InternalVerification(format!(
            "transported certificate failed: {}",
            report.summary()
        )));
    }
    Ok(DecompositionResult {
        product,
        certificate: cert,
        report,
        census: auto_result.census.clone(),
    })
}

fn flat_index(dims: &[usize], comps: &[usize], nx: usize, x: usize) -> usize {
    encode_mixed(dims, comps) * nx + x
}

/// Recovers the factor kinds of an engine-built cascade from state counts.
fn census_kinds(spec: &CascadeSpec) -> Result<Vec<FactorKind>, DecomposeError> {
    spec.factors()
        .iter()
        .map(|f| match (f.state_count(), f.input_count()) {
            (2, 2) => Ok(FactorKind::Reset),
            (n, 3) => Ok(FactorKind::Standard(n)),
            other => Err(DecomposeError::InternalVerification(format!(
                "unexpected factor shape {other:?}"
            ))),
        })
        .collect()
}

/// The worked example products: a stored fact, the mutually exclusive pair,
/// and the two three-atom chains, each with its binary-encoding certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleProduct {
    /// `{a.}` as a single ignored-input reset factor.
    A,
    /// `{a :- not b; b :- not a}` as two reset factors.
    B,
    /// `{a; b :- a; c :- a, b}` as three reset factors.
    C,
    /// `{a; b :- a; c :- a; c :- b}` as three reset factors.
    CPrime,
}

/// Builds the example product with its program and certificate. The tables
/// are written out exactly; the certificate verifies isomorphic.
pub fn example_product(
    kind: ExampleProduct,
) -> Result<(Program, ProgramProduct, Certificate), DecomposeError> {
    let reset = canonical_program(CanonicalProgram::Reset)?;
    let (program, tables): (Program, Vec<FactorTable>) = match kind {
        ExampleProduct::A => {
            let p = crate::parse::parse_program("a.").map_err(DecomposeError::Asp)?;
            (p, vec![FactorTable::head(vec![0, 0])])
        }
        ExampleProduct::B => {
            let p = canonical_program(CanonicalProgram::ExampleB)?;
            // psi1: {} for J in {{},{a}}, {1} for J in {{b},{a,b}}
            let t1 = FactorTable::head(vec![0, 0, 1, 1]);
            // psi2: {} for J in {{},{b}}, {1} for J in {{a},{a,b}}, any I1
            let t2 = FactorTable::new(vec![2], 4, vec![0, 1, 0, 1, 0, 1, 0, 1]).unwrap();
            (p, vec![t1, t2])
        }
        ExampleProduct::C | ExampleProduct::CPrime => {
            let p = canonical_program(match kind {
                ExampleProduct::C => CanonicalProgram::ExampleC,
                _ => CanonicalProgram::ExampleCPrime,
            })?;
            let t1 = FactorTable::head(vec![0; 8]);
            let mut t2 = Vec::new();
            for i1 in 0..2usize {
                t2.extend(std::iter::repeat_n(1 - i1, 8));
            }
            let mut t3 = Vec::new();
            for i1 in 0..2usize {
                for i2 in 0..2usize {
                    let blocked = match kind {
                        ExampleProduct::C => i1 & i2,
                        _ => i1 | i2,
                    };
                    t3.extend(std::iter::repeat_n(1 - blocked, 8));
                }
            }
            (
                p,
                vec![
                    t1,
                    FactorTable::new(vec![2], 8, t2).unwrap(),
                    FactorTable::new(vec![2, 2], 8, t3).unwrap(),
                ],
            )
        }
    };

    let m = program.atom_count();
    let n_interps = 1usize << m;
    let pp = ProgramProduct::new(
        vec![reset; m],
        LabelSpace::Interps(program.alphabet().clone()),
        Feedforward::Tables(tables),
    )?;

    // binary encoding: factor k carries atom k (alphabet order)
    let dims = vec![2usize; m];
    let h1 = (0..n_interps)
        .map(|idx| {
            let comps = decode_mixed(&dims, idx);
            comps
                .iter()
                .enumerate()
                .fold(0usize, |bits, (k, &s)| bits | (s << k))
        })
        .collect();
    let cert = Certificate {
        sub_states: (0..n_interps).collect(),
        sub_inputs: (0..n_interps).collect(),
        partition: Partition::diagonal(n_interps),
        h1,
        h2: (0..n_interps).collect(),
        claim: Claim::Isomorphic,
    };
    Ok((program, pp, cert))
}
