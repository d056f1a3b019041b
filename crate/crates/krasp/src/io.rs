//! JSON file formats: automata, cascade/program products, certificates, and
//! decomposition bundles.
//!
//! An automaton is `{"states": [..], "inputs": [..], "delta": [[..], ..]}`
//! with one delta row per state and one state index per input.
//!
//! A product is `{"factor_domain": "program"|"automaton", "factors": [..],
//! "global_inputs": [..], "psi": [..]}`. A factor is `{"kind": "reset"}`,
//! `{"kind": "standard", "n": N}`, or `{"kind": "inline", "inline": ..}`
//! where an inline program is its text form as a string and an inline
//! automaton is an automaton object. Table `i` of `psi` is a nested array
//! indexed by the states of factors `1..i-1` and then the global input,
//! holding factor-letter indices (for program factors, an interpretation's
//! index is its membership bit mask). `factor_domain` disambiguates the
//! reset/standard kinds on read and may be omitted when inline factors
//! settle it; it defaults to `"program"`.
//!
//! A certificate is `{"sub_states": [[component labels], ..], "sub_inputs":
//! [..], "partition": [[sub-state positions], ..], "h1": [target state label
//! per block], "h2": [target input label per selected input], "claim": ..}`.
//!
//! A bundle is `{"target": automaton, "spec": product, "certificate":
//! certificate, "answer_sets": [..]?, "status": "verified"|"inconclusive",
//! "reason": ..?}`; inconclusive bundles carry only target, status, reason.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::asp::AspError;
use crate::asp::{canonical_program, CanonicalProgram, Program};
use crate::automata::LabelSpace;
use crate::automata::{canonical_automaton, CanonicalAutomaton};
use crate::automata::{Automaton, AutomatonError, Partition};
use crate::cascade::{
    decode_mixed, CascadeError, CascadeSpec, FactorTable, Feedforward, ProgramProduct,
};
use crate::parse::parse_program;
use crate::represent::{Certificate, Claim, Product, RepresentError};
use std::sync::Arc;

/// Cap on label-space materialization during export.
const EXPORT_CAP: usize = 4096;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Cascade(#[from] CascadeError),
    #[error(transparent)]
    Asp(#[from] AspError),
    #[error(transparent)]
    Represent(#[from] RepresentError),
}

fn bad(what: &'static str, detail: impl Into<String>) -> IoError {
    IoError::Format {
        what,
        detail: detail.into(),
    }
}

// ---------------------------------------------------------------- automata

pub fn automaton_to_json(aut: &Automaton) -> Result<Value, IoError> {
    let n = aut.state_count();
    if n > EXPORT_CAP {
        return Err(bad(
            "automaton",
            format!("{n} states exceed the export cap {EXPORT_CAP}"),
        ));
    }
    let states: Vec<String> = (0..n).map(|q| aut.state_label(q)).collect();
    let inputs: Vec<String> = (0..aut.input_count()).map(|x| aut.input_label(x)).collect();
    let delta = aut.table(EXPORT_CAP)?;
    Ok(json!({ "states": states, "inputs": inputs, "delta": delta }))
}

pub fn automaton_from_json(v: &Value) -> Result<Automaton, IoError> {
    let states = string_array(v.get("states"), "automaton", "states")?;
    let inputs = string_array(v.get("inputs"), "automaton", "inputs")?;
    let rows = v
        .get("delta")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("automaton", "missing delta array"))?;
    let mut delta = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| bad("automaton", "delta rows must be arrays"))?;
        delta.push(
            row.iter()
                .map(|t| {
                    t.as_u64()
                        .map(|t| t as usize)
                        .ok_or_else(|| bad("automaton", "delta entries must be state indices"))
                })
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Ok(Automaton::from_table(states, inputs, delta)?)
}

fn string_array(
    v: Option<&Value>,
    what: &'static str,
    field: &str,
) -> Result<Vec<String>, IoError> {
    v.and_then(Value::as_array)
        .ok_or_else(|| bad(what, format!("missing {field} array")))?
        .iter()
        .map(|s| {
            s.as_str()
                .map(str::to_string)
                .ok_or_else(|| bad(what, format!("{field} entries must be strings")))
        })
        .collect()
}

// ---------------------------------------------------------------- products

fn program_factor_kind(p: &Program) -> Value {
    if let Ok(reset) = canonical_program(CanonicalProgram::Reset) {
        if *p == reset {
            return json!({ "kind": "reset" });
        }
    }
    // a standard program over [n] ∪ {3} has max(n, 3) atoms
    for n in [2usize, p.atom_count()] {
        if n >= 2 {
            if let Ok(s) = canonical_program(CanonicalProgram::Standard(n)) {
                if *p == s {
                    return json!({ "kind": "standard", "n": n });
                }
            }
        }
    }
    json!({ "kind": "inline", "inline": p.render() })
}

fn automaton_factor_kind(a: &Automaton) -> Result<Value, IoError> {
    let same = |canon: &Automaton| -> bool {
        canon.state_count() == a.state_count()
            && canon.input_count() == a.input_count()
            && (0..a.state_count()).all(|q| {
                canon.state_label(q) == a.state_label(q)
                    && (0..a.input_count()).all(|x| canon.step(q, x) == a.step(q, x))
            })
            && (0..a.input_count()).all(|x| canon.input_label(x) == a.input_label(x))
    };
    if let Ok(reset) = canonical_automaton(CanonicalAutomaton::Reset) {
        if same(&reset) {
            return Ok(json!({ "kind": "reset" }));
        }
    }
    let n = a.state_count();
    if n >= 2 {
        if let Ok(s) = canonical_automaton(CanonicalAutomaton::Standard(n)) {
            if same(&s) {
                return Ok(json!({ "kind": "standard", "n": n }));
            }
        }
    }
    Ok(json!({ "kind": "inline", "inline": automaton_to_json(a)? }))
}

fn psi_to_json(psi: &Feedforward, n_inputs: usize) -> Result<Value, IoError> {
    let tables: Vec<FactorTable> = match psi {
        Feedforward::Tables(ts) => ts.clone(),
        Feedforward::Identity => {
            if n_inputs > EXPORT_CAP {
                return Err(bad(
                    "product",
                    "identity feedforward over an input space too large to tabulate",
                ));
            }
            vec![FactorTable::head((0..n_inputs).collect())]
        }
    };
    Ok(Value::Array(
        tables
            .iter()
            .map(|t| nest_entries(t.entries(), t.dims()))
            .collect(),
    ))
}

fn nest_entries(entries: &[usize], dims: &[usize]) -> Value {
    if dims.is_empty() {
        return Value::Array(entries.iter().map(|&e| json!(e)).collect());
    }
    let chunk = entries.len() / dims[0];
    Value::Array(
        (0..dims[0])
            .map(|i| nest_entries(&entries[i * chunk..(i + 1) * chunk], &dims[1..]))
            .collect(),
    )
}

fn flatten_entries(
    v: &Value,
    dims: &[usize],
    n_inputs: usize,
    out: &mut Vec<usize>,
) -> Result<(), IoError> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad("product", "psi tables must be nested arrays"))?;
    if dims.is_empty() {
        if arr.len() != n_inputs {
            return Err(bad(
                "product",
                format!("psi row has {} entries for {} inputs", arr.len(), n_inputs),
            ));
        }
        for e in arr {
            out.push(
                e.as_u64()
                    .map(|e| e as usize)
                    .ok_or_else(|| bad("product", "psi entries must be letter indices"))?,
            );
        }
        return Ok(());
    }
    if arr.len() != dims[0] {
        return Err(bad(
            "product",
            format!(
                "psi axis has {} entries, factor has {} states",
                arr.len(),
                dims[0]
            ),
        ));
    }
    for sub in arr {
        flatten_entries(sub, &dims[1..], n_inputs, out)?;
    }
    Ok(())
}

pub fn product_to_json(product: &Product) -> Result<Value, IoError> {
    match product {
        Product::Programs(pp) => {
            let factors: Vec<Value> = pp.factors().iter().map(program_factor_kind).collect();
            let n_inputs = pp.global_inputs().count();
            if n_inputs > EXPORT_CAP {
                return Err(bad("product", "global input space too large to list"));
            }
            let globals: Vec<String> = (0..n_inputs).map(|x| pp.global_inputs().label(x)).collect();
            Ok(json!({
                "factor_domain": "program",
                "factors": factors,
                "global_inputs": globals,
                "psi": psi_to_json(pp.psi(), n_inputs)?,
            }))
        }
        Product::Automata(spec) => {
            let factors: Vec<Value> = spec
                .factors()
                .iter()
                .map(|f| automaton_factor_kind(f))
                .collect::<Result<_, _>>()?;
            Ok(json!({
                "factor_domain": "automaton",
                "factors": factors,
                "global_inputs": spec.global_inputs(),
                "psi": psi_to_json(spec.psi(), spec.global_inputs().len())?,
            }))
        }
    }
}

pub fn product_from_json(v: &Value) -> Result<Product, IoError> {
    let factors = v
        .get("factors")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("product", "missing factors array"))?;
    let globals = string_array(v.get("global_inputs"), "product", "global_inputs")?;
    if globals.is_empty() {
        return Err(bad("product", "global_inputs must be nonempty"));
    }

    let domain = match v.get("factor_domain").and_then(Value::as_str) {
        Some("program") => "program",
        Some("automaton") => "automaton",
        Some(other) => return Err(bad("product", format!("unknown factor_domain `{other}`"))),
        None => {
            // infer from inline shapes; plain reset/standard kinds default to programs
            let mut inferred = "program";
            for f in factors {
                match f.get("inline") {
                    Some(Value::String(_)) => inferred = "program",
                    Some(Value::Object(_)) => inferred = "automaton",
                    _ => continue,
                }
            }
            inferred
        }
    };

    let psi_rows = v
        .get("psi")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("product", "missing psi array"))?;
    if psi_rows.len() != factors.len() {
        return Err(bad(
            "product",
            format!(
                "{} psi tables for {} factors",
                psi_rows.len(),
                factors.len()
            ),
        ));
    }

    if domain == "program" {
        let mut programs = Vec::with_capacity(factors.len());
        for f in factors {
            programs.push(parse_program_factor(f)?);
        }
        let dims: Vec<usize> = programs
            .iter()
            .map(|p| p.alphabet().interp_count())
            .collect();
        let tables = parse_psi(psi_rows, &dims, globals.len())?;
        let pp = ProgramProduct::new(
            programs,
            LabelSpace::Labels(globals),
            Feedforward::Tables(tables),
        )?;
        Ok(Product::Programs(pp))
    } else {
        let mut automata = Vec::with_capacity(factors.len());
        for f in factors {
            automata.push(Arc::new(parse_automaton_factor(f)?));
        }
        let dims: Vec<usize> = automata.iter().map(|a| a.state_count()).collect();
        let tables = parse_psi(psi_rows, &dims, globals.len())?;
        let spec = CascadeSpec::new(automata, globals, Feedforward::Tables(tables))?;
        Ok(Product::Automata(spec))
    }
}

fn parse_program_factor(f: &Value) -> Result<Program, IoError> {
    match f.get("kind").and_then(Value::as_str) {
        Some("reset") => Ok(canonical_program(CanonicalProgram::Reset)?),
        Some("standard") => {
            let n = f
                .get("n")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("product", "standard factor needs n"))?;
            Ok(canonical_program(CanonicalProgram::Standard(n as usize))?)
        }
        Some("inline") => {
            let text = f
                .get("inline")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("product", "inline program factor must be a string"))?;
            Ok(parse_program(text)?)
        }
        other => Err(bad("product", format!("unknown factor kind {other:?}"))),
    }
}

fn parse_automaton_factor(f: &Value) -> Result<Automaton, IoError> {
    match f.get("kind").and_then(Value::as_str) {
        Some("reset") => Ok(canonical_automaton(CanonicalAutomaton::Reset)?),
        Some("standard") => {
            let n = f
                .get("n")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("product", "standard factor needs n"))?;
            Ok(canonical_automaton(CanonicalAutomaton::Standard(
                n as usize,
            ))?)
        }
        Some("inline") => {
            let obj = f
                .get("inline")
                .ok_or_else(|| bad("product", "inline automaton factor missing body"))?;
            automaton_from_json(obj)
        }
        other => Err(bad("product", format!("unknown factor kind {other:?}"))),
    }
}

fn parse_psi(rows: &[Value], dims: &[usize], n_inputs: usize) -> Result<Vec<FactorTable>, IoError> {
    let mut tables = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let mut entries = Vec::new();
        flatten_entries(row, &dims[..i], n_inputs, &mut entries)?;
        tables.push(
            FactorTable::new(dims[..i].to_vec(), n_inputs, entries)
                .ok_or_else(|| bad("product", format!("psi table {i} has the wrong size")))?,
        );
    }
    Ok(tables)
}

// ------------------------------------------------------------ certificates

fn factor_state_label(product: &Product, factor: usize, state: usize) -> String {
    match product {
        Product::Programs(pp) => {
            let alpha = pp.factors()[factor].alphabet();
            alpha.render_interp(alpha.interp_from_bits(state as u64))
        }
        Product::Automata(spec) => spec.factors()[factor].state_label(state),
    }
}

fn factor_state_index(product: &Product, factor: usize, label: &str) -> Result<usize, IoError> {
    match product {
        Product::Programs(pp) => {
            let alpha = pp.factors()[factor].alphabet();
            Ok(alpha
                .parse_interp(label)
                .map_err(|_| bad("certificate", format!("unknown component `{label}`")))?
                .bits() as usize)
        }
        Product::Automata(spec) => spec.factors()[factor]
            .state_index(label)
            .map_err(|_| bad("certificate", format!("unknown component `{label}`"))),
    }
}

pub fn certificate_to_json(
    cert: &Certificate,
    product: &Product,
    target: &Automaton,
) -> Result<Value, IoError> {
    let dims = product.state_dims();
    let sub_states: Vec<Value> = cert
        .sub_states
        .iter()
        .map(|&idx| {
            let comps = decode_mixed(&dims, idx);
            Value::Array(
                comps
                    .iter()
                    .enumerate()
                    .map(|(j, &q)| json!(factor_state_label(product, j, q)))
                    .collect(),
            )
        })
        .collect();
    let sub_inputs: Vec<String> = cert
        .sub_inputs
        .iter()
        .map(|&x| product.input_label(x))
        .collect();
    let h1: Vec<String> = cert.h1.iter().map(|&t| target.state_label(t)).collect();
    let h2: Vec<String> = cert.h2.iter().map(|&t| target.input_label(t)).collect();
    Ok(json!({
        "sub_states": sub_states,
        "sub_inputs": sub_inputs,
        "partition": cert.partition.blocks(),
        "h1": h1,
        "h2": h2,
        "claim": cert.claim.as_str(),
    }))
}

pub fn certificate_from_json(
    v: &Value,
    product: &Product,
    target: &Automaton,
) -> Result<Certificate, IoError> {
    let dims = product.state_dims();
    let raw_states = v
        .get("sub_states")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("certificate", "missing sub_states"))?;
    let mut sub_states = Vec::with_capacity(raw_states.len());
    for entry in raw_states {
        let comps = entry
            .as_array()
            .ok_or_else(|| bad("certificate", "sub_states entries must be label tuples"))?;
        if comps.len() != dims.len() {
            return Err(bad(
                "certificate",
                format!(
                    "state tuple has {} components for {} factors",
                    comps.len(),
                    dims.len()
                ),
            ));
        }
        let mut idx = Vec::with_capacity(comps.len());
        for (j, c) in comps.iter().enumerate() {
            let label = c
                .as_str()
                .ok_or_else(|| bad("certificate", "state components must be strings"))?;
            idx.push(factor_state_index(product, j, label)?);
        }
        sub_states.push(crate::cascade::encode_mixed(&dims, &idx));
    }

    let sub_input_labels = string_array(v.get("sub_inputs"), "certificate", "sub_inputs")?;
    let n_inputs = product.input_count();
    let input_index = |label: &str| -> Result<usize, IoError> {
        (0..n_inputs)
            .find(|&x| product.input_label(x) == label)
            .ok_or_else(|| bad("certificate", format!("unknown input `{label}`")))
    };
    let sub_inputs = sub_input_labels
        .iter()
        .map(|l| input_index(l))
        .collect::<Result<Vec<_>, _>>()?;

    let raw_partition = v
        .get("partition")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("certificate", "missing partition"))?;
    let mut blocks = Vec::with_capacity(raw_partition.len());
    for b in raw_partition {
        let b = b
            .as_array()
            .ok_or_else(|| bad("certificate", "partition blocks must be arrays"))?;
        blocks.push(
            b.iter()
                .map(|i| {
                    i.as_u64()
                        .map(|i| i as usize)
                        .ok_or_else(|| bad("certificate", "block entries must be indices"))
                })
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    let partition =
        Partition::new(blocks, sub_states.len()).map_err(|e| bad("certificate", e.to_string()))?;

    let h1 = string_array(v.get("h1"), "certificate", "h1")?
        .iter()
        .map(|l| {
            target
                .state_index(l)
                .map_err(|_| bad("certificate", format!("unknown target state `{l}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let h2 = string_array(v.get("h2"), "certificate", "h2")?
        .iter()
        .map(|l| {
            target
                .input_index(l)
                .map_err(|_| bad("certificate", format!("unknown target input `{l}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let claim = match v.get("claim").and_then(Value::as_str) {
        Some("homomorphic") => Claim::Homomorphic,
        Some("isomorphic") => Claim::Isomorphic,
        other => return Err(bad("certificate", format!("unknown claim {other:?}"))),
    };
    Ok(Certificate {
        sub_states,
        sub_inputs,
        partition,
        h1,
        h2,
        claim,
    })
}

// ----------------------------------------------------------------- bundles

pub fn bundle_to_json(
    target: &Automaton,
    payload: Option<(&Product, &Certificate, Option<&[String]>)>,
    status: &str,
    reason: Option<&str>,
) -> Result<Value, IoError> {
    let mut obj = Map::new();
    obj.insert("target".into(), automaton_to_json(target)?);
    if let Some((product, cert, sets)) = payload {
        obj.insert("spec".into(), product_to_json(product)?);
        obj.insert(
            "certificate".into(),
            certificate_to_json(cert, product, target)?,
        );
        if let Some(sets) = sets {
            obj.insert("answer_sets".into(), json!(sets));
        }
    }
    obj.insert("status".into(), json!(status));
    if let Some(reason) = reason {
        obj.insert("reason".into(), json!(reason));
    }
    Ok(Value::Object(obj))
}

/// A parsed bundle. The certificate is resolved against the bundled product
/// and target when both are present.
pub struct ParsedBundle {
    pub target: Automaton,
    pub product: Option<Product>,
    pub certificate: Option<Certificate>,
    pub answer_sets: Option<Vec<String>>,
    pub status: String,
    pub reason: Option<String>,
}

pub fn bundle_from_json(v: &Value) -> Result<ParsedBundle, IoError> {
    let target = automaton_from_json(
        v.get("target")
            .ok_or_else(|| bad("bundle", "missing target"))?,
    )?;
    let status = v
        .get("status")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("bundle", "missing status"))?
        .to_string();
    let product = match v.get("spec") {
        Some(spec) => Some(product_from_json(spec)?),
        None => None,
    };
    let certificate = match (v.get("certificate"), &product) {
        (Some(c), Some(p)) => Some(certificate_from_json(c, p, &target)?),
        (Some(_), None) => return Err(bad("bundle", "certificate without spec")),
        _ => None,
    };
    let answer_sets = match v.get("answer_sets") {
        Some(sets) => Some(string_array(Some(sets), "bundle", "answer_sets")?),
        None => None,
    };
    let reason = v.get("reason").and_then(Value::as_str).map(str::to_string);
    Ok(ParsedBundle {
        target,
        product,
        certificate,
        answer_sets,
        status,
        reason,
    })
}
