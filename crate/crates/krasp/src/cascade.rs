//! Cascade (loop-free) products of automata and of programs.
//!
//! Each factor of a product receives its input letter from a feedforward
//! table keyed by the *current* states of strictly earlier factors and the
//! global input. The loop-free condition is structural: table `i` simply has
//! no axis for factors `>= i`, so a forward-referencing table is not
//! representable.
//!
//! Product states are tuples, indexed in mixed radix with the last factor
//! fastest. Program products use each factor's interpretation lattice as its
//! state and letter space, with an interpretation's bit mask as its index.

use std::sync::Arc;

use thiserror::Error;

use crate::asp::{Interpretation, Program};
use crate::automata::{Automaton, AutomatonError, BuildMode, LabelSpace};

#[derive(Debug, Error)]
pub enum CascadeError {
    #[error("product needs at least one factor")]
    NoFactors,
    #[error("product needs a nonempty global input alphabet")]
    NoInputs,
    #[error("feedforward has {got} tables for {want} factors")]
    TableCount { got: usize, want: usize },
    #[error("feedforward table {factor} has wrong shape: axis {axis} is {got}, want {want}")]
    TableShape {
        factor: usize,
        axis: usize,
        got: usize,
        want: usize,
    },
    #[error("feedforward table {factor} holds letter {letter}, factor has {letters} letters")]
    BadLetter {
        factor: usize,
        letter: usize,
        letters: usize,
    },
    #[error("identity feedforward needs a single factor whose letters match the global inputs")]
    BadIdentity,
    #[error("malformed state tuple: component {component} is {got}, factor has {want} states")]
    BadState {
        component: usize,
        got: usize,
        want: usize,
    },
    #[error("state tuple has {got} components, product has {want} factors")]
    BadStateLength { got: usize, want: usize },
    #[error("malformed state tuple `{0}`")]
    BadStateText(String),
    #[error("input index {0} out of range")]
    BadInput(usize),
    #[error("product has {got} states, explicit cap is {cap}")]
    StateCapExceeded { got: usize, cap: usize },
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

/// Default cap on explicit product-automaton construction.
pub const DEFAULT_PRODUCT_CAP: usize = 4096;

/// One factor's feedforward table. `dims` are the state-space sizes of the
/// strictly earlier factors; entries are letter indices for this factor,
/// stored with the global input as the fastest axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorTable {
    dims: Vec<usize>,
    n_inputs: usize,
    entries: Vec<usize>,
}

impl FactorTable {
    pub fn new(dims: Vec<usize>, n_inputs: usize, entries: Vec<usize>) -> Option<Self> {
        let want: usize = dims.iter().product::<usize>() * n_inputs;
        if n_inputs == 0 || entries.len() != want {
            return None;
        }
        Some(FactorTable {
            dims,
            n_inputs,
            entries,
        })
    }

    /// Table for the first factor: one letter per global input.
    pub fn head(entries: Vec<usize>) -> Self {
        let n = entries.len();
        FactorTable {
            dims: Vec::new(),
            n_inputs: n,
            entries,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_count(&self) -> usize {
        self.n_inputs
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    #[inline]
    fn eval(&self, earlier: &[usize], input: usize) -> usize {
        debug_assert_eq!(earlier.len(), self.dims.len());
        let mut idx = 0usize;
        for (k, &q) in earlier.iter().enumerate() {
            idx = idx * self.dims[k] + q;
        }
        self.entries[idx * self.n_inputs + input]
    }
}

/// The family of per-factor letter-selection functions of a product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feedforward {
    /// Extensional tables, one per factor.
    Tables(Vec<FactorTable>),
    /// The identity function for a single-factor product whose factor letter
    /// space coincides with the global input space. Kept symbolic because the
    /// full-transformation products have input spaces too large to tabulate.
    Identity,
}

impl Feedforward {
    fn validate(
        &self,
        factor_states: &[usize],
        factor_letters: &[usize],
        n_inputs: usize,
    ) -> Result<(), CascadeError> {
        match self {
            Feedforward::Identity => {
                if factor_states.len() != 1 || factor_letters[0] != n_inputs {
                    return Err(CascadeError::BadIdentity);
                }
                Ok(())
            }
            Feedforward::Tables(tables) => {
                if tables.len() != factor_states.len() {
                    return Err(CascadeError::TableCount {
                        got: tables.len(),
                        want: factor_states.len(),
                    });
                }
                for (i, t) in tables.iter().enumerate() {
                    if t.dims.len() != i {
                        return Err(CascadeError::TableShape {
                            factor: i,
                            axis: t.dims.len().min(i),
                            got: t.dims.len(),
                            want: i,
                        });
                    }
                    for (axis, (&got, &want)) in t.dims.iter().zip(&factor_states[..i]).enumerate()
                    {
                        if got != want {
                            return Err(CascadeError::TableShape {
                                factor: i,
                                axis,
                                got,
                                want,
                            });
                        }
                    }
                    if t.n_inputs != n_inputs {
                        return Err(CascadeError::TableShape {
                            factor: i,
                            axis: i,
                            got: t.n_inputs,
                            want: n_inputs,
                        });
                    }
                    for &letter in &t.entries {
                        if letter >= factor_letters[i] {
                            return Err(CascadeError::BadLetter {
                                factor: i,
                                letter,
                                letters: factor_letters[i],
                            });
                        }
                    }
                }
                Ok(())
            }
        }
    }

    #[inline]
    pub(crate) fn letter(&self, factor: usize, earlier: &[usize], input: usize) -> usize {
        match self {
            Feedforward::Identity => input,
            Feedforward::Tables(tables) => tables[factor].eval(earlier, input),
        }
    }
}

/// A cascade product of automata.
#[derive(Debug, Clone)]
pub struct CascadeSpec {
    factors: Vec<Arc<Automaton>>,
    global_inputs: Vec<String>,
    psi: Feedforward,
}

impl CascadeSpec {
    pub fn new(
        factors: Vec<Arc<Automaton>>,
        global_inputs: Vec<String>,
        psi: Feedforward,
    ) -> Result<Self, CascadeError> {
        if factors.is_empty() {
            return Err(CascadeError::NoFactors);
        }
        if global_inputs.is_empty() {
            return Err(CascadeError::NoInputs);
        }
        let states: Vec<usize> = factors.iter().map(|f| f.state_count()).collect();
        let letters: Vec<usize> = factors.iter().map(|f| f.input_count()).collect();
        psi.validate(&states, &letters, global_inputs.len())?;
        Ok(CascadeSpec {
            factors,
            global_inputs,
            psi,
        })
    }

    pub fn factors(&self) -> &[Arc<Automaton>] {
        &self.factors
    }

    pub fn global_inputs(&self) -> &[String] {
        &self.global_inputs
    }

    pub fn psi(&self) -> &Feedforward {
        &self.psi
    }

    pub fn state_dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.state_count()).collect()
    }

    pub fn state_count(&self) -> usize {
        self.state_dims().iter().product()
    }

    /// One synchronous step: every factor moves at once, each on the letter
    /// computed from the current states of strictly earlier factors.
    pub fn step(&self, state: &[usize], input: usize) -> Result<Vec<usize>, CascadeError> {
        if state.len() != self.factors.len() {
            return Err(CascadeError::BadStateLength {
                got: state.len(),
                want: self.factors.len(),
            });
        }
        if input >= self.global_inputs.len() {
            return Err(CascadeError::BadInput(input));
        }
        for (i, (&q, f)) in state.iter().zip(&self.factors).enumerate() {
            if q >= f.state_count() {
                return Err(CascadeError::BadState {
                    component: i,
                    got: q,
                    want: f.state_count(),
                });
            }
        }
        Ok(self.step_unchecked(state, input))
    }

    pub(crate) fn step_unchecked(&self, state: &[usize], input: usize) -> Vec<usize> {
        (0..self.factors.len())
            .map(|i| {
                let letter = self.psi.letter(i, &state[..i], input);
                self.factors[i].step(state[i], letter)
            })
            .collect()
    }

    pub fn state_space(&self) -> LabelSpace {
        LabelSpace::Tuples(self.factors.iter().map(|f| f.states().clone()).collect())
    }

    pub fn render_state(&self, state: &[usize]) -> String {
        let comps: Vec<String> = state
            .iter()
            .zip(&self.factors)
            .map(|(&q, f)| f.state_label(q))
            .collect();
        format!("({})", comps.join(","))
    }

    pub fn parse_state(&self, text: &str) -> Result<Vec<usize>, CascadeError> {
        let idx = self
            .state_space()
            .index_of(text.trim())
            .ok_or_else(|| CascadeError::BadStateText(text.to_string()))?;
        Ok(decode_mixed(&self.state_dims(), idx))
    }

    pub fn input_index(&self, label: &str) -> Option<usize> {
        self.global_inputs.iter().position(|l| l == label)
    }
}

/// A cascade product of programs, with global inputs given as opaque labels
/// (interpretations of the represented program, when there is one).
#[derive(Debug, Clone)]
pub struct ProgramProduct {
    factors: Vec<Program>,
    global_inputs: LabelSpace,
    psi: Feedforward,
}

impl ProgramProduct {
    pub fn new(
        factors: Vec<Program>,
        global_inputs: LabelSpace,
        psi: Feedforward,
    ) -> Result<Self, CascadeError> {
        if factors.is_empty() {
            return Err(CascadeError::NoFactors);
        }
        let n_inputs = global_inputs.count();
        if n_inputs == 0 {
            return Err(CascadeError::NoInputs);
        }
        let sizes: Vec<usize> = factors
            .iter()
            .map(|f| f.alphabet().interp_count())
            .collect();
        psi.validate(&sizes, &sizes, n_inputs)?;
        Ok(ProgramProduct {
            factors,
            global_inputs,
            psi,
        })
    }

    pub fn factors(&self) -> &[Program] {
        &self.factors
    }

    pub fn global_inputs(&self) -> &LabelSpace {
        &self.global_inputs
    }

    pub fn psi(&self) -> &Feedforward {
        &self.psi
    }

    pub fn state_dims(&self) -> Vec<usize> {
        self.factors
            .iter()
            .map(|f| f.alphabet().interp_count())
            .collect()
    }

    pub fn state_count(&self) -> usize {
        self.state_dims().iter().product()
    }

    /// One synchronous step on a tuple of factor interpretations.
    pub fn step(
        &self,
        state: &[Interpretation],
        input: usize,
    ) -> Result<Vec<Interpretation>, CascadeError> {
        if state.len() != self.factors.len() {
            return Err(CascadeError::BadStateLength {
                got: state.len(),
                want: self.factors.len(),
            });
        }
        if input >= self.global_inputs.count() {
            return Err(CascadeError::BadInput(input));
        }
        for (i, (s, f)) in state.iter().zip(&self.factors).enumerate() {
            if s.width() != f.atom_count() {
                return Err(CascadeError::BadState {
                    component: i,
                    got: 1 << s.width(),
                    want: f.alphabet().interp_count(),
                });
            }
        }
        let bits: Vec<usize> = state.iter().map(|s| s.bits() as usize).collect();
        let next = self.step_bits(&bits, input);
        Ok(next
            .iter()
            .zip(&self.factors)
            .map(|(&b, f)| f.alphabet().interp_from_bits(b as u64))
            .collect())
    }

    /// Step on raw per-factor interpretation indices (= bit masks).
    pub(crate) fn step_bits(&self, state: &[usize], input: usize) -> Vec<usize> {
        (0..self.factors.len())
            .map(|i| {
                let letter = self.psi.letter(i, &state[..i], input);
                self.factors[i].step_bits(state[i] as u64, letter as u64) as usize
            })
            .collect()
    }

    /// Renders a state tuple in the canonical `({..},..)` form.
    pub fn render_state(&self, state: &[Interpretation]) -> String {
        let comps: Vec<String> = state
            .iter()
            .zip(&self.factors)
            .map(|(s, f)| f.alphabet().render_interp(*s))
            .collect();
        format!("({})", comps.join(","))
    }

    /// Parses a `({..},..)` state tuple.
    pub fn parse_state(&self, text: &str) -> Result<Vec<Interpretation>, CascadeError> {
        let space = self.state_space();
        let idx = space
            .index_of(text.trim())
            .ok_or_else(|| CascadeError::BadStateText(text.to_string()))?;
        let comps = decode_mixed(&self.state_dims(), idx);
        Ok(comps
            .iter()
            .zip(&self.factors)
            .map(|(&b, f)| f.alphabet().interp_from_bits(b as u64))
            .collect())
    }

    pub fn state_space(&self) -> LabelSpace {
        LabelSpace::Tuples(
            self.factors
                .iter()
                .map(|f| LabelSpace::Interps(f.alphabet().clone()))
                .collect(),
        )
    }
}

/// Mixed-radix index of a component tuple, last component fastest.
pub fn encode_mixed(dims: &[usize], comps: &[usize]) -> usize {
    debug_assert_eq!(dims.len(), comps.len());
    let mut idx = 0usize;
    for (&d, &c) in dims.iter().zip(comps) {
        debug_assert!(c < d);
        idx = idx * d + c;
    }
    idx
}

pub fn decode_mixed(dims: &[usize], mut idx: usize) -> Vec<usize> {
    let mut comps = vec![0usize; dims.len()];
    for k in (0..dims.len()).rev() {
        comps[k] = idx % dims[k];
        idx /= dims[k];
    }
    comps
}

/// The full product automaton of a cascade of automata. State labels are
/// tuples of factor state labels.
pub fn product_automaton(
    spec: &CascadeSpec,
    mode: BuildMode,
    cap: usize,
) -> Result<Automaton, CascadeError> {
    let dims = spec.state_dims();
    let states = LabelSpace::Tuples(spec.factors.iter().map(|f| f.states().clone()).collect());
    let inputs = LabelSpace::Labels(spec.global_inputs.clone());
    build_product(
        states,
        inputs,
        dims,
        mode,
        cap,
        spec.clone(),
        |spec, comps, x| spec.step_unchecked(comps, x),
    )
}

/// The characteristic automaton of a program product: states are tuples of
/// factor interpretations, inputs the global labels, transitions one
/// synchronous operator step.
pub fn product_char_automaton(
    pp: &ProgramProduct,
    mode: BuildMode,
    cap: usize,
) -> Result<Automaton, CascadeError> {
    let dims = pp.state_dims();
    let states = pp.state_space();
    let inputs = pp.global_inputs.clone();
    build_product(
        states,
        inputs,
        dims,
        mode,
        cap,
        pp.clone(),
        |pp, comps, x| pp.step_bits(comps, x),
    )
}

fn build_product<C: Send + Sync + 'static>(
    states: LabelSpace,
    inputs: LabelSpace,
    dims: Vec<usize>,
    mode: BuildMode,
    cap: usize,
    ctx: C,
    step: fn(&C, &[usize], usize) -> Vec<usize>,
) -> Result<Automaton, CascadeError> {
    match mode {
        BuildMode::Explicit => {
            let n = states.count();
            if n > cap {
                return Err(CascadeError::StateCapExceeded { got: n, cap });
            }
            let nx = inputs.count();
            let delta = (0..n)
                .map(|q| {
                    let comps = decode_mixed(&dims, q);
                    (0..nx)
                        .map(|x| encode_mixed(&dims, &step(&ctx, &comps, x)))
                        .collect()
                })
                .collect();
            Ok(Automaton::from_parts_table(states, inputs, delta))
        }
        BuildMode::Lazy => {
            let eval = Box::new(move |q: usize, x: usize| {
                let comps = decode_mixed(&dims, q);
                encode_mixed(&dims, &step(&ctx, &comps, x))
            });
            Ok(Automaton::from_parts_lazy(states, inputs, eval))
        }
    }
}
