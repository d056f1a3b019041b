//! Grounded normal logic programs and their operator semantics.
//!
//! A [`Program`] is a finite nonempty set of rules `a <- b1,..,bk, not c1,..`
//! over a finite alphabet of propositional atoms. Semantics is given by the
//! two-input immediate consequence operator [`Program::psi`]: `psi(I, J)`
//! collects the heads of all rules whose positive body holds in `I` and whose
//! negative body is disjoint from `J`. An interpretation `I` is an answer set
//! when `I` equals the least fixpoint of `psi(., I)`.
//!
//! Interpretations are bit vectors indexed by the owning alphabet, which caps
//! program alphabets at 64 atoms. That is far beyond anything the exhaustive
//! operations here can enumerate anyway.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Hard engine limit: interpretations are stored in a single `u64`.
pub const MAX_ATOMS: usize = 64;

/// Default cap on alphabet size for exhaustive answer-set enumeration.
pub const DEFAULT_ENUM_CAP: usize = 20;

#[derive(Debug, Error)]
pub enum AspError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("invalid atom name `{0}`")]
    BadAtom(String),
    #[error("alphabet mismatch: interpretation width {got} does not fit alphabet of size {want}")]
    AlphabetMismatch { got: usize, want: usize },
    #[error("atom `{0}` is not in the alphabet")]
    UnknownAtom(String),
    #[error("program must have a nonempty alphabet")]
    EmptyAlphabet,
    #[error("program must have at least one rule")]
    NoRules,
    #[error("duplicate atom `{0}` in alphabet")]
    DuplicateAtom(String),
    #[error("alphabet has {0} atoms, engine limit is {MAX_ATOMS}")]
    TooManyAtoms(usize),
    #[error("alphabet has {got} atoms, exceeding the enumeration cap of {cap}")]
    EnumCapExceeded { got: usize, cap: usize },
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("malformed interpretation `{0}`")]
    BadInterpretation(String),
}

#[derive(Debug, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

/// A propositional atom: a lowercase-initial identifier or an integer literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom(String);

impl Atom {
    pub fn new(name: &str) -> Result<Self, AspError> {
        if is_valid_atom(name) {
            Ok(Atom(name.to_string()))
        } else {
            Err(AspError::BadAtom(name.to_string()))
        }
    }

    pub fn integer(n: u64) -> Self {
        Atom(n.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn as_int(&self) -> Option<u64> {
        if self.0.bytes().all(|b| b.is_ascii_digit()) {
            self.0.parse().ok()
        } else {
            None
        }
    }
}

fn is_valid_atom(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        None => false,
        Some(c) if c.is_ascii_lowercase() => {
            name != "not" && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        }
        Some(c) if c.is_ascii_digit() => name.bytes().all(|b| b.is_ascii_digit()),
        Some(_) => false,
    }
}

// Integer atoms sort numerically and before word atoms, so the alphabet of a
// program over {1,..,n} comes out in the order one writes it on paper.
impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.as_int(), other.as_int()) {
            (Some(a), Some(b)) => a.cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An ordered, duplicate-free list of atoms. Cheap to clone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet(Arc<Vec<Atom>>);

impl Alphabet {
    pub fn new(atoms: Vec<Atom>) -> Result<Self, AspError> {
        if atoms.is_empty() {
            return Err(AspError::EmptyAlphabet);
        }
        if atoms.len() > MAX_ATOMS {
            return Err(AspError::TooManyAtoms(atoms.len()));
        }
        for (i, a) in atoms.iter().enumerate() {
            if atoms[..i].contains(a) {
                return Err(AspError::DuplicateAtom(a.to_string()));
            }
        }
        Ok(Alphabet(Arc::new(atoms)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn atom(&self, idx: usize) -> &Atom {
        &self.0[idx]
    }

    pub fn index_of(&self, atom: &Atom) -> Option<usize> {
        self.0.iter().position(|a| a == atom)
    }

    /// Number of interpretations over this alphabet (`2^len`).
    pub fn interp_count(&self) -> usize {
        1usize << self.len()
    }

    pub fn empty_interp(&self) -> Interpretation {
        Interpretation {
            bits: 0,
            width: self.len() as u8,
        }
    }

    pub fn interp_from_bits(&self, bits: u64) -> Interpretation {
        debug_assert!(self.len() == 64 || bits < (1u64 << self.len()));
        Interpretation {
            bits,
            width: self.len() as u8,
        }
    }

    pub fn interp_from_atoms<'a, I>(&self, atoms: I) -> Result<Interpretation, AspError>
    where
        I: IntoIterator<Item = &'a Atom>,
    {
        let mut bits = 0u64;
        for a in atoms {
            let idx = self
                .index_of(a)
                .ok_or_else(|| AspError::UnknownAtom(a.to_string()))?;
            bits |= 1 << idx;
        }
        Ok(self.interp_from_bits(bits))
    }

    /// Renders an interpretation as a sorted, comma-separated atom list in braces.
    pub fn render_interp(&self, i: Interpretation) -> String {
        let mut members: Vec<&Atom> = (0..self.len())
            .filter(|&k| i.bits & (1 << k) != 0)
            .map(|k| self.atom(k))
            .collect();
        members.sort();
        let body: Vec<&str> = members.iter().map(|a| a.as_str()).collect();
        format!("{{{}}}", body.join(","))
    }

    /// Parses `{a,b}` back into an interpretation. Whitespace around atoms is accepted.
    pub fn parse_interp(&self, text: &str) -> Result<Interpretation, AspError> {
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| AspError::BadInterpretation(text.to_string()))?;
        let mut bits = 0u64;
        if !inner.trim().is_empty() {
            for tok in inner.split(',') {
                let atom = Atom::new(tok.trim())?;
                let idx = self
                    .index_of(&atom)
                    .ok_or_else(|| AspError::UnknownAtom(atom.to_string()))?;
                bits |= 1 << idx;
            }
        }
        Ok(self.interp_from_bits(bits))
    }
}

/// A subset of some program's alphabet, as a fixed-width bit vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interpretation {
    bits: u64,
    width: u8,
}

impl Interpretation {
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn contains(&self, atom_idx: usize) -> bool {
        self.bits & (1 << atom_idx) != 0
    }

    pub fn is_subset_of(&self, other: &Interpretation) -> bool {
        debug_assert_eq!(self.width, other.width);
        self.bits & !other.bits == 0
    }

    pub fn union(&self, other: &Interpretation) -> Interpretation {
        debug_assert_eq!(self.width, other.width);
        Interpretation {
            bits: self.bits | other.bits,
            width: self.width,
        }
    }

    pub fn intersection(&self, other: &Interpretation) -> Interpretation {
        debug_assert_eq!(self.width, other.width);
        Interpretation {
            bits: self.bits & other.bits,
            width: self.width,
        }
    }

    pub fn complement(&self) -> Interpretation {
        let mask = if self.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        };
        Interpretation {
            bits: !self.bits & mask,
            width: self.width,
        }
    }
}

/// A rule `head <- pos,.., not neg,..`. Bodies are sets and may overlap.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: Atom,
    pub pos_body: Vec<Atom>,
    pub neg_body: Vec<Atom>,
}

impl Rule {
    pub fn new(head: Atom, mut pos_body: Vec<Atom>, mut neg_body: Vec<Atom>) -> Self {
        pos_body.sort();
        pos_body.dedup();
        neg_body.sort();
        neg_body.dedup();
        Rule {
            head,
            pos_body,
            neg_body,
        }
    }

    pub fn is_fact(&self) -> bool {
        self.pos_body.is_empty() && self.neg_body.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.neg_body.is_empty()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.pos_body.is_empty() || !self.neg_body.is_empty() {
            write!(f, " :- ")?;
            let mut lits: Vec<String> = self.pos_body.iter().map(|a| a.to_string()).collect();
            lits.extend(self.neg_body.iter().map(|a| format!("not {a}")));
            write!(f, "{}", lits.join(", "))?;
        }
        write!(f, ".")
    }
}

/// Rule with bodies compiled to bit masks over the owning alphabet.
#[derive(Debug, Clone, Copy)]
struct MaskRule {
    head: u64,
    pos: u64,
    neg: u64,
}

/// A grounded normal logic program over a fixed alphabet.
#[derive(Debug, Clone)]
pub struct Program {
    alphabet: Alphabet,
    rules: Vec<Rule>,
    compiled: Vec<MaskRule>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.rules == other.rules
    }
}
impl Eq for Program {}

impl Program {
    /// Builds a program, checking that every rule atom is in the alphabet.
    /// Rules are stored sorted and de-duplicated.
    pub fn new(alphabet: Alphabet, mut rules: Vec<Rule>) -> Result<Self, AspError> {
        if rules.is_empty() {
            return Err(AspError::NoRules);
        }
        rules.sort();
        rules.dedup();
        let mut compiled = Vec::with_capacity(rules.len());
        for r in &rules {
            let head_idx = alphabet
                .index_of(&r.head)
                .ok_or_else(|| AspError::UnknownAtom(r.head.to_string()))?;
            let mut pos = 0u64;
            for a in &r.pos_body {
                pos |= 1
                    << alphabet
                        .index_of(a)
                        .ok_or_else(|| AspError::UnknownAtom(a.to_string()))?;
            }
            let mut neg = 0u64;
            for a in &r.neg_body {
                neg |= 1
                    << alphabet
                        .index_of(a)
                        .ok_or_else(|| AspError::UnknownAtom(a.to_string()))?;
            }
            compiled.push(MaskRule {
                head: 1 << head_idx,
                pos,
                neg,
            });
        }
        Ok(Program {
            alphabet,
            rules,
            compiled,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn atom_count(&self) -> usize {
        self.alphabet.len()
    }

    fn check_interp(&self, i: &Interpretation) -> Result<(), AspError> {
        if i.width() != self.alphabet.len() {
            return Err(AspError::AlphabetMismatch {
                got: i.width(),
                want: self.alphabet.len(),
            });
        }
        Ok(())
    }

    /// Raw operator step on bit masks. `i` feeds positive bodies, `j` negative ones.
    #[inline]
    pub(crate) fn step_bits(&self, i: u64, j: u64) -> u64 {
        let mut out = 0u64;
        for r in &self.compiled {
            if r.pos & i == r.pos && r.neg & j == 0 {
                out |= r.head;
            }
        }
        out
    }

    /// The two-input immediate consequence operator: heads of all rules whose
    /// positive body is contained in `i` and whose negative body misses `j`.
    pub fn psi(&self, i: &Interpretation, j: &Interpretation) -> Result<Interpretation, AspError> {
        self.check_interp(i)?;
        self.check_interp(j)?;
        Ok(self
            .alphabet
            .interp_from_bits(self.step_bits(i.bits, j.bits)))
    }

    /// Least fixpoint of `psi(., j)` by Kleene iteration from the empty set.
    pub fn lfp_psi(&self, j: &Interpretation) -> Result<Interpretation, AspError> {
        self.check_interp(j)?;
        Ok(self.alphabet.interp_from_bits(self.lfp_bits(j.bits)))
    }

    pub(crate) fn lfp_bits(&self, j: u64) -> u64 {
        let mut cur = 0u64;
        loop {
            let next = self.step_bits(cur, j);
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Number of iterations `lfp_psi` needs to stabilize (including the
    /// confirming step). Exposed for the stabilization-bound property.
    pub fn lfp_iterations(&self, j: &Interpretation) -> Result<usize, AspError> {
        self.check_interp(j)?;
        let mut cur = 0u64;
        let mut steps = 0usize;
        loop {
            let next = self.step_bits(cur, j.bits());
            steps += 1;
            if next == cur {
                return Ok(steps);
            }
            cur = next;
        }
    }

    /// All answer sets, by exhaustive enumeration of the interpretation space.
    /// Fails when the alphabet exceeds `cap` atoms.
    pub fn answer_sets(&self, cap: usize) -> Result<Vec<Interpretation>, AspError> {
        let m = self.alphabet.len();
        if m > cap {
            return Err(AspError::EnumCapExceeded { got: m, cap });
        }
        let mut out = Vec::new();
        for bits in 0..(1u64 << m) {
            if self.lfp_bits(bits) == bits {
                out.push(self.alphabet.interp_from_bits(bits));
            }
        }
        Ok(out)
    }

    pub fn answer_sets_default(&self) -> Result<Vec<Interpretation>, AspError> {
        self.answer_sets(DEFAULT_ENUM_CAP)
    }

    /// Syntactic classification: positivity and tightness.
    pub fn classify(&self) -> Classification {
        let positive = self.rules.iter().all(|r| r.is_positive());
        Classification {
            positive,
            tightness: self.level_mapping(),
        }
    }

    /// Longest-path layering over the positive dependency graph, if acyclic.
    /// Level 0 atoms have no positive-body prerequisites; each rule's head
    /// sits strictly above every atom in its positive body.
    fn level_mapping(&self) -> Option<LevelMapping> {
        let n = self.alphabet.len();
        // deps[a] = positive bodies of rules with head a
        let mut deps: Vec<Vec<u64>> = vec![Vec::new(); n];
        for r in &self.compiled {
            let head_idx = r.head.trailing_zeros() as usize;
            deps[head_idx].push(r.pos);
        }
        const UNVISITED: u8 = 0;
        const IN_PROGRESS: u8 = 1;
        const DONE: u8 = 2;
        let mut state = vec![UNVISITED; n];
        let mut level = vec![0u32; n];

        fn visit(a: usize, deps: &[Vec<u64>], state: &mut [u8], level: &mut [u32]) -> bool {
            match state[a] {
                DONE => return true,
                IN_PROGRESS => return false, // cycle
                _ => {}
            }
            state[a] = IN_PROGRESS;
            let mut lv = 0u32;
            for &pos in &deps[a] {
                if pos == 0 {
                    continue;
                }
                let mut body_max = 0u32;
                for b in 0..deps.len() {
                    if pos & (1 << b) != 0 {
                        if !visit(b, deps, state, level) {
                            return false;
                        }
                        body_max = body_max.max(level[b]);
                    }
                }
                lv = lv.max(body_max + 1);
            }
            level[a] = lv;
            state[a] = DONE;
            true
        }

        for a in 0..n {
            if !visit(a, &deps, &mut state, &mut level) {
                return None;
            }
        }
        Some(LevelMapping {
            alphabet: self.alphabet.clone(),
            levels: level,
        })
    }

    /// Canonical text form; `parse_program` of the result reconstructs the program.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut used = 0u64;
        for r in &self.compiled {
            used |= r.head | r.pos | r.neg;
        }
        let extras: Vec<&Atom> = (0..self.alphabet.len())
            .filter(|&k| used & (1 << k) == 0)
            .map(|k| self.alphabet.atom(k))
            .collect();
        if !extras.is_empty() {
            let names: Vec<&str> = extras.iter().map(|a| a.as_str()).collect();
            out.push_str(&format!("#alphabet {}.\n", names.join(", ")));
        }
        for r in &self.rules {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

/// Result of [`Program::classify`].
#[derive(Debug, Clone)]
pub struct Classification {
    pub positive: bool,
    /// A witnessing level mapping when the program is tight, absent otherwise.
    pub tightness: Option<LevelMapping>,
}

/// A total map from alphabet atoms to levels, witnessing tightness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMapping {
    alphabet: Alphabet,
    levels: Vec<u32>,
}

impl LevelMapping {
    pub fn level(&self, atom_idx: usize) -> u32 {
        self.levels[atom_idx]
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .alphabet
            .atoms()
            .iter()
            .zip(&self.levels)
            .map(|(a, l)| format!("{a}:{l}"))
            .collect();
        parts.join(", ")
    }
}

/// The canonical programs used throughout the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanonicalProgram {
    /// Single rule `1 :- not 1` over the one-atom alphabet.
    Reset,
    /// The n-standard program over `[n] ∪ {3}`, `n > 1`.
    Standard(usize),
    /// The program whose rules `s_k(j) <- j, not k` encode all maps `[n] -> [n]`.
    Tn(usize),
    /// `{e :- e; e :- not e}`.
    Elevator,
    /// `m` independent facts `a1. a2. ...`.
    Facts(usize),
    /// `{a :- not b; b :- not a}`.
    ExampleB,
    /// `{a; b :- a; c :- a, b}`.
    ExampleC,
    /// `{a; b :- a; c :- a; c :- b}`.
    ExampleCPrime,
}

/// Enumerates all maps `[n] -> [n]` lexicographically by value vector.
/// `tn_map(n, k)[j-1]` is the image of `j` under the k-th map (1-based `k`).
pub fn tn_map(n: usize, k: usize) -> Vec<usize> {
    let mut idx = k - 1;
    let mut digits = vec![0usize; n];
    for j in (0..n).rev() {
        digits[j] = idx % n + 1;
        idx /= n;
    }
    digits
}

/// Number of maps `[n] -> [n]`.
pub fn tn_input_count(n: usize) -> usize {
    n.pow(n as u32)
}

pub fn canonical_program(kind: CanonicalProgram) -> Result<Program, AspError> {
    match kind {
        CanonicalProgram::Reset => {
            let one = Atom::integer(1);
            let alphabet = Alphabet::new(vec![one.clone()])?;
            Program::new(alphabet, vec![Rule::new(one.clone(), vec![], vec![one])])
        }
        CanonicalProgram::Standard(n) => {
            if n < 2 {
                return Err(AspError::BadParameter(format!(
                    "standard program needs n > 1, got {n}"
                )));
            }
            let mut names: Vec<u64> = (1..=n as u64).collect();
            if !names.contains(&3) {
                names.push(3);
            }
            names.sort();
            let alphabet = Alphabet::new(names.into_iter().map(Atom::integer).collect())?;
            let at = |k: usize| Atom::integer(k as u64);
            let mut rules = Vec::new();
            for i in 1..=n {
                rules.push(Rule::new(at(i), vec![at(i)], vec![at(1)]));
                rules.push(Rule::new(at(i % n + 1), vec![at(i)], vec![at(2)]));
            }
            rules.push(Rule::new(at(1), vec![at(2)], vec![at(3)]));
            rules.push(Rule::new(at(2), vec![at(1)], vec![at(3)]));
            for j in 3..=n {
                rules.push(Rule::new(at(j), vec![at(j)], vec![at(3)]));
            }
            Program::new(alphabet, rules)
        }
        CanonicalProgram::Tn(n) => {
            if n < 1 {
                return Err(AspError::BadParameter("tn needs n >= 1".into()));
            }
            let count = tn_input_count(n);
            if count > MAX_ATOMS {
                return Err(AspError::TooManyAtoms(count));
            }
            let alphabet = Alphabet::new((1..=count as u64).map(Atom::integer).collect())?;
            let at = |k: usize| Atom::integer(k as u64);
            let mut rules = Vec::new();
            for k in 1..=count {
                let sigma = tn_map(n, k);
                for j in 1..=n {
                    rules.push(Rule::new(at(sigma[j - 1]), vec![at(j)], vec![at(k)]));
                }
            }
            Program::new(alphabet, rules)
        }
        CanonicalProgram::Elevator => {
            let e = Atom::new("e")?;
            let alphabet = Alphabet::new(vec![e.clone()])?;
            Program::new(
                alphabet,
                vec![
                    Rule::new(e.clone(), vec![e.clone()], vec![]),
                    Rule::new(e.clone(), vec![], vec![e]),
                ],
            )
        }
        CanonicalProgram::Facts(m) => {
            if m < 1 {
                return Err(AspError::BadParameter("facts needs m >= 1".into()));
            }
            let atoms: Vec<Atom> = (1..=m)
                .map(|i| Atom::new(&format!("a{i}")).expect("generated name"))
                .collect();
            let rules = atoms
                .iter()
                .map(|a| Rule::new(a.clone(), vec![], vec![]))
                .collect();
            Program::new(Alphabet::new(atoms)?, rules)
        }
        CanonicalProgram::ExampleB => {
            let a = Atom::new("a")?;
            let b = Atom::new("b")?;
            let alphabet = Alphabet::new(vec![a.clone(), b.clone()])?;
            Program::new(
                alphabet,
                vec![
                    Rule::new(a.clone(), vec![], vec![b.clone()]),
                    Rule::new(b, vec![], vec![a]),
                ],
            )
        }
        CanonicalProgram::ExampleC => {
            let a = Atom::new("a")?;
            let b = Atom::new("b")?;
            let c = Atom::new("c")?;
            let alphabet = Alphabet::new(vec![a.clone(), b.clone(), c.clone()])?;
            Program::new(
                alphabet,
                vec![
                    Rule::new(a.clone(), vec![], vec![]),
                    Rule::new(b.clone(), vec![a.clone()], vec![]),
                    Rule::new(c, vec![a, b], vec![]),
                ],
            )
        }
        CanonicalProgram::ExampleCPrime => {
            let a = Atom::new("a")?;
            let b = Atom::new("b")?;
            let c = Atom::new("c")?;
            let alphabet = Alphabet::new(vec![a.clone(), b.clone(), c.clone()])?;
            Program::new(
                alphabet,
                vec![
                    Rule::new(a.clone(), vec![], vec![]),
                    Rule::new(b.clone(), vec![a.clone()], vec![]),
                    Rule::new(c.clone(), vec![a], vec![]),
                    Rule::new(c, vec![b], vec![]),
                ],
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_program;

    fn interp(p: &Program, text: &str) -> Interpretation {
        p.alphabet().parse_interp(text).unwrap()
    }

    fn render_sets(p: &Program, sets: &[Interpretation]) -> Vec<String> {
        sets.iter()
            .map(|i| p.alphabet().render_interp(*i))
            .collect()
    }

    #[test]
    fn psi_on_the_choice_pair() {
        let b = canonical_program(CanonicalProgram::ExampleB).unwrap();
        let empty = b.alphabet().empty_interp();
        let out = b.psi(&empty, &empty).unwrap();
        assert_eq!(b.alphabet().render_interp(out), "{a,b}");
        let full = interp(&b, "{a,b}");
        let out = b.psi(&interp(&b, "{a}"), &full).unwrap();
        assert_eq!(b.alphabet().render_interp(out), "{}");
    }

    #[test]
    fn psi_on_reset() {
        let r = canonical_program(CanonicalProgram::Reset).unwrap();
        let empty = r.alphabet().empty_interp();
        let out = r.psi(&empty, &empty).unwrap();
        assert_eq!(r.alphabet().render_interp(out), "{1}");
    }

    #[test]
    fn psi_on_standard_three() {
        let s3 = canonical_program(CanonicalProgram::Standard(3)).unwrap();
        let out = s3.psi(&interp(&s3, "{2}"), &interp(&s3, "{2,3}")).unwrap();
        assert_eq!(s3.alphabet().render_interp(out), "{2}");
    }

    #[test]
    fn interpretation_set_operations() {
        let c = canonical_program(CanonicalProgram::ExampleC).unwrap();
        let ab = interp(&c, "{a,b}");
        let bc = interp(&c, "{b,c}");
        assert_eq!(c.alphabet().render_interp(ab.union(&bc)), "{a,b,c}");
        assert_eq!(c.alphabet().render_interp(ab.intersection(&bc)), "{b}");
        assert_eq!(c.alphabet().render_interp(ab.complement()), "{c}");
        assert!(interp(&c, "{b}").is_subset_of(&ab));
        assert!(!ab.is_subset_of(&bc));
        assert_eq!(ab.len(), 2);
    }

    #[test]
    fn lfp_examples() {
        let c = canonical_program(CanonicalProgram::ExampleC).unwrap();
        for bits in 0..8u64 {
            let j = c.alphabet().interp_from_bits(bits);
            let out = c.lfp_psi(&j).unwrap();
            assert_eq!(c.alphabet().render_interp(out), "{a,b,c}");
        }
        let r = canonical_program(CanonicalProgram::Reset).unwrap();
        let out = r.lfp_psi(&interp(&r, "{1}")).unwrap();
        assert!(out.is_empty());
        let b = canonical_program(CanonicalProgram::ExampleB).unwrap();
        let out = b.lfp_psi(&interp(&b, "{b}")).unwrap();
        assert_eq!(b.alphabet().render_interp(out), "{b}");
    }

    #[test]
    fn answer_sets_of_canonical_programs() {
        let b = canonical_program(CanonicalProgram::ExampleB).unwrap();
        assert_eq!(
            render_sets(&b, &b.answer_sets_default().unwrap()),
            ["{a}", "{b}"]
        );

        let r = canonical_program(CanonicalProgram::Reset).unwrap();
        assert!(r.answer_sets_default().unwrap().is_empty());

        for n in 2..=6 {
            let s = canonical_program(CanonicalProgram::Standard(n)).unwrap();
            assert_eq!(render_sets(&s, &s.answer_sets_default().unwrap()), ["{}"]);
        }

        let cp = canonical_program(CanonicalProgram::ExampleCPrime).unwrap();
        assert_eq!(
            render_sets(&cp, &cp.answer_sets_default().unwrap()),
            ["{a,b,c}"]
        );
    }

    #[test]
    fn answer_set_cap() {
        let b = canonical_program(CanonicalProgram::ExampleB).unwrap();
        assert!(matches!(
            b.answer_sets(1),
            Err(AspError::EnumCapExceeded { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        let c = canonical_program(CanonicalProgram::ExampleC).unwrap();
        let cls = c.classify();
        assert!(cls.positive);
        assert_eq!(cls.tightness.unwrap().render(), "a:0, b:1, c:2");

        let b = canonical_program(CanonicalProgram::ExampleB).unwrap();
        let cls = b.classify();
        assert!(!cls.positive);
        assert_eq!(cls.tightness.unwrap().render(), "a:0, b:0");

        let e = canonical_program(CanonicalProgram::Elevator).unwrap();
        let cls = e.classify();
        assert!(!cls.positive);
        assert!(cls.tightness.is_none());
    }

    #[test]
    fn standard_two_rule_set() {
        let s2 = canonical_program(CanonicalProgram::Standard(2)).unwrap();
        let expected = parse_program(
            "1 :- 1, not 1.\n2 :- 2, not 1.\n2 :- 1, not 2.\n1 :- 2, not 2.\n\
             1 :- 2, not 3.\n2 :- 1, not 3.",
        )
        .unwrap();
        assert_eq!(s2, expected);
    }

    #[test]
    fn tn_builders() {
        let t1 = canonical_program(CanonicalProgram::Tn(1)).unwrap();
        assert_eq!(t1.render(), "1 :- 1, not 1.\n");

        let t2 = canonical_program(CanonicalProgram::Tn(2)).unwrap();
        assert_eq!(t2.atom_count(), 4);
        assert_eq!(t2.rules().len(), 8);
        // lexicographic map enumeration: s3 = (2,1)
        assert_eq!(tn_map(2, 3), [2, 1]);

        let t3 = canonical_program(CanonicalProgram::Tn(3)).unwrap();
        assert_eq!(t3.atom_count(), 27);
        assert_eq!(t3.rules().len(), 81);
    }

    #[test]
    fn facts_builder() {
        let f3 = canonical_program(CanonicalProgram::Facts(3)).unwrap();
        assert_eq!(f3.render(), "a1.\na2.\na3.\n");
        assert!(canonical_program(CanonicalProgram::Facts(0)).is_err());
    }

    #[test]
    fn alphabet_mismatch_detected() {
        let b = canonical_program(CanonicalProgram::ExampleB).unwrap();
        let r = canonical_program(CanonicalProgram::Reset).unwrap();
        let foreign = r.alphabet().empty_interp();
        assert!(matches!(
            b.psi(&foreign, &foreign),
            Err(AspError::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn atom_ordering_is_numeric_then_lexical() {
        let mut atoms = [
            Atom::new("b").unwrap(),
            Atom::integer(10),
            Atom::integer(2),
            Atom::new("a").unwrap(),
        ];
        atoms.sort();
        let names: Vec<&str> = atoms.iter().map(|a| a.as_str()).collect();
        assert_eq!(names, ["2", "10", "a", "b"]);
    }
}
