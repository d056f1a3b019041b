//! End-to-end tour: semantics, characteristic automaton, decomposition into
//! trivial factors, and answer sets recovered through the product.
//!
//! Run with: cargo run -p krasp --example walkthrough

use krasp::asp::{canonical_program, CanonicalProgram};
use krasp::automata::{characteristic_automaton, BuildMode};
use krasp::decompose::{kr_pipeline, programmable_witness, PipelineConfig, WitnessKind};
use krasp::parse::parse_program;

fn main() {
    let program = parse_program("a :- not b.\nb :- not a.\n").unwrap();
    println!("program:\n{}", program.render());

    let sets = program.answer_sets_default().unwrap();
    let rendered: Vec<String> = sets
        .iter()
        .map(|s| program.alphabet().render_interp(*s))
        .collect();
    println!("answer sets: {}\n", rendered.join(" "));

    // the operator as an automaton over the interpretation lattice
    let aut = characteristic_automaton(&program, BuildMode::Explicit, 2).unwrap();
    println!("characteristic automaton ({} states):", aut.state_count());
    for q in 0..aut.state_count() {
        for x in 0..aut.input_count() {
            println!(
                "  {} --{}--> {}",
                aut.state_label(q),
                aut.input_label(x),
                aut.state_label(aut.step(q, x))
            );
        }
    }

    // the one-rule reset program realizes the two-state reset machine exactly
    let witness = programmable_witness(WitnessKind::Reset).unwrap();
    println!("\nreset programmability witness:\n{}", witness.render());

    // decompose, transport to programs, and recompute the answer sets
    // through the verified product
    match kr_pipeline(&program, &PipelineConfig::default()).unwrap() {
        krasp::decompose::PipelineOutcome::Verified(result) => {
            println!(
                "pipeline verified: factors: {}",
                result.decomposition.census.render()
            );
            println!("certificate: {}", result.decomposition.report.summary());
            if let Some(via) = &result.answer_sets {
                let rendered: Vec<String> = via
                    .iter()
                    .map(|s| program.alphabet().render_interp(*s))
                    .collect();
                println!("answer sets through the product: {}", rendered.join(" "));
            }
        }
        krasp::decompose::PipelineOutcome::Inconclusive { reason } => {
            println!("pipeline inconclusive: {reason}");
        }
    }

    // the elevator program is the smallest case the factor family cannot
    // represent; the engine reports it rather than searching forever
    let elevator = canonical_program(CanonicalProgram::Elevator).unwrap();
    match kr_pipeline(&elevator, &PipelineConfig::default()).unwrap() {
        krasp::decompose::PipelineOutcome::Verified(_) => unreachable!(),
        krasp::decompose::PipelineOutcome::Inconclusive { reason } => {
            println!("\nelevator program: inconclusive ({reason})");
        }
    }
}
