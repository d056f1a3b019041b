//! Acceptance suite. One test per criterion; each prints a single
//! `criterion NN: PASS/FAIL` line (visible with `--nocapture`) and asserts
//! both the criterion's content and its runtime budget.

use std::time::{Duration, Instant};

use krasp::asp::{canonical_program, CanonicalProgram, Program};
use krasp::automata::{
    canonical_automaton, characteristic_automaton, Automaton, BuildMode, CanonicalAutomaton,
};
use krasp::corpus::{random_automaton, random_cascade, random_positive_tight, random_program, Rng};
use krasp::decompose::{
    build_tn_embedding, compile_positive_tight, decompose_automaton, example_product, kr_pipeline,
    programmable_witness, DecomposeConfig, DecomposeOutcome, ExampleProduct, PipelineConfig,
    PipelineOutcome, WitnessKind,
};
use krasp::parse::parse_program;
use krasp::represent::{
    answer_sets_via_product, search_representation, verify_certificate, Claim, Product,
    RepSearchBudget,
};
use serde_json::json;

fn conclude(name: &str, started: Instant, budget: Duration, failures: Vec<String>) {
    let elapsed = started.elapsed();
    let timely = elapsed <= budget;
    let ok = failures.is_empty() && timely;
    println!(
        "criterion {name}: {} [{elapsed:.2?} / {budget:.0?}]",
        if ok { "PASS" } else { "FAIL" }
    );
    for f in &failures {
        println!("  - {f}");
    }
    if !timely {
        panic!("criterion {name}: exceeded time budget ({elapsed:.2?} > {budget:.0?})");
    }
    assert!(
        failures.is_empty(),
        "criterion {name}: {} failure(s)",
        failures.len()
    );
}

fn render_sets(p: &Program, sets: &[krasp::Interpretation]) -> Vec<String> {
    sets.iter()
        .map(|s| p.alphabet().render_interp(*s))
        .collect()
}

/// Quotient of `aut` by the congruence closure of merging states `a` and `b`.
fn random_quotient(aut: &Automaton, a: usize, b: usize) -> Automaton {
    let n = aut.state_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut q: usize) -> usize {
        while parent[q] != q {
            q = parent[q];
        }
        q
    }
    let mut pending = vec![(a, b)];
    while let Some((x, y)) = pending.pop() {
        let (rx, ry) = (root(&mut parent, x), root(&mut parent, y));
        if rx == ry {
            continue;
        }
        parent[rx.max(ry)] = rx.min(ry);
        for input in 0..aut.input_count() {
            pending.push((aut.step(rx, input), aut.step(ry, input)));
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for q in 0..n {
        let r = root(&mut parent, q);
        blocks.entry(r).or_default().push(q);
    }
    let partition = krasp::automata::Partition::new(blocks.into_values().collect(), n).unwrap();
    krasp::automata::quotient_by(aut, &partition).unwrap()
}

#[test]
fn criterion_01_answer_sets_exact() {
    let t0 = Instant::now();
    let mut failures = Vec::new();

    let mut check = |name: &str, program: &Program, expected: &[&str]| {
        let got = render_sets(program, &program.answer_sets_default().unwrap());
        if got != expected {
            failures.push(format!("{name}: got {got:?}, expected {expected:?}"));
        }
    };

    let b = canonical_program(CanonicalProgram::ExampleB).unwrap();
    check("B", &b, &["{a}", "{b}"]);
    let r = canonical_program(CanonicalProgram::Reset).unwrap();
    check("R", &r, &[]);
    for n in 2..=6 {
        let s = canonical_program(CanonicalProgram::Standard(n)).unwrap();
        check(&format!("S_{n}"), &s, &["{}"]);
    }
    let c = canonical_program(CanonicalProgram::ExampleC).unwrap();
    check("C", &c, &["{a,b,c}"]);
    let cp = canonical_program(CanonicalProgram::ExampleCPrime).unwrap();
    check("C'", &cp, &["{a,b,c}"]);

    conclude(
        "01 (answer sets, exact)",
        t0,
        Duration::from_secs(1),
        failures,
    );
}

#[test]
fn criterion_02_choice_pair_transition_table() {
    let t0 = Instant::now();
    let mut failures = Vec::new();

    let b = canonical_program(CanonicalProgram::ExampleB).unwrap();
    let aut = characteristic_automaton(&b, BuildMode::Explicit, 2).unwrap();

    // golden: 16 transitions; the successor depends only on the input
    let golden: Vec<Vec<usize>> = vec![vec![3, 1, 2, 0]; 4];
    let labels: Vec<String> = (0..4).map(|q| aut.state_label(q)).collect();
    if labels != ["{}", "{a}", "{b}", "{a,b}"] {
        failures.push(format!("state labels {labels:?}"));
    }
    let table = aut.table(64).unwrap();
    if table != golden {
        failures.push(format!("transition table {table:?}, expected {golden:?}"));
    }

    conclude(
        "02 (two-atom transition table)",
        t0,
        Duration::from_secs(1),
        failures,
    );
}

#[test]
fn criterion_03_programmability_witnesses() {
    let t0 = Instant::now();
    let mut failures = Vec::new();

    match programmable_witness(WitnessKind::Reset) {
        Ok(w) => {
            let rep = w.verify().unwrap();
            if !rep.passed() || rep.equations_checked != 4 {
                failures.push(format!(
                    "reset witness: {} equations",
                    rep.equations_checked
                ));
            }
        }
        Err(e) => failures.push(format!("reset witness: {e}")),
    }
    for n in 2..=6 {
        match programmable_witness(WitnessKind::Standard(n)) {
            Ok(w) => {
                let rep = w.verify().unwrap();
                if !rep.passed() || rep.equations_checked != 3 * n {
                    failures.push(format!(
                        "standard({n}) witness: {} equations, passed={}",
                        rep.equations_checked,
                        rep.passed()
                    ));
                }
            }
            Err(e) => failures.push(format!("standard({n}) witness: {e}")),
        }
    }

    conclude(
        "03 (programmability witnesses)",
        t0,
        Duration::from_secs(1),
        failures,
    );
}

#[test]
fn criterion_04_example_products_reproduced() {
    let t0 = Instant::now();
    let mut failures = Vec::new();

    // frozen feedforward tables, as nested JSON in the file format
    let row8 = |v: usize| vec![v; 8];
    let expected_psi = [
        (ExampleProduct::A, json!([[0, 0]])),
        (
            ExampleProduct::B,
            json!([[0, 0, 1, 1], [[0, 1, 0, 1], [0, 1, 0, 1]]]),
        ),
        (
            ExampleProduct::C,
            json!([
                row8(0),
                [row8(1), row8(0)],
                [[row8(1), row8(1)], [row8(1), row8(0)]]
            ]),
        ),
        (
            ExampleProduct::CPrime,
            json!([
                row8(0),
                [row8(1), row8(0)],
                [[row8(1), row8(0)], [row8(0), row8(0)]]
            ]),
        ),
    ];

    for (kind, expected) in expected_psi {
        let (program, pp, cert) = example_product(kind).unwrap();
        let product = Product::Programs(pp);
        let v = krasp::io::product_to_json(&product).unwrap();
        if v["psi"] != expected {
            failures.push(format!("{kind:?}: psi {} != {expected}", v["psi"]));
        }
        let target =
            characteristic_automaton(&program, BuildMode::Explicit, program.atom_count()).unwrap();
        match verify_certificate(&product, &target, &cert, Claim::Isomorphic) {
            Ok(rep) => {
                if !rep.verdict {
                    failures.push(format!("{kind:?}: {}", rep.summary()));
                }
                if kind == ExampleProduct::B && rep.stats.equations_checked != 16 {
                    failures.push(format!(
                        "B: {} quotient equations, expected 16",
                        rep.stats.equations_checked
                    ));
                }
            }
            Err(e) => failures.push(format!("{kind:?}: {e}")),
        }
    }

    // the positive-tight compiler reproduces the same tables
    for (kind, source) in [
        (ExampleProduct::A, "a."),
        (ExampleProduct::C, "a.\nb :- a.\nc :- a, b."),
        (ExampleProduct::CPrime, "a.\nb :- a.\nc :- a.\nc :- b."),
    ] {
        let program = parse_program(source).unwrap();
        let compiled = compile_positive_tight(&program).unwrap();
        let (_, expected_pp, _) = example_product(kind).unwrap();
        match &compiled.product {
            Product::Programs(pp) => {
                if pp.psi() != expected_pp.psi() {
                    failures.push(format!("compiler vs {kind:?}: tables differ"));
                }
            }
            _ => failures.push(format!("compiler vs {kind:?}: wrong product kind")),
        }
    }

    conclude(
        "04 (example products reproduced)",
        t0,
        Duration::from_secs(1),
        failures,
    );
}

#[test]
fn criterion_05_answer_set_correspondence() {
    let t0 = Instant::now();
    let mut failures = Vec::new();

    for kind in [
        ExampleProduct::A,
        ExampleProduct::B,
        ExampleProduct::C,
        ExampleProduct::CPrime,
    ] {
        let (program, pp, cert) = example_product(kind).unwrap();
        let product = Product::Programs(pp);
        let via = answer_sets_via_product(&program, &product, &cert).unwrap();
        let direct = program.answer_sets_default().unwrap();
        if via != direct {
            failures.push(format!(
                "{kind:?}: via {:?} != direct {:?}",
                render_sets(&program, &via),
                render_sets(&program, &direct)
            ));
        }
    }

    // every verified pipeline output must agree as well
    let pipeline_programs = [
        ("fact", "a."),
        ("self-support", "p :- p."),
        ("reset", "1 :- not 1."),
        ("choice pair", "a :- not b.\nb :- not a."),
    ];
    for (name, source) in pipeline_programs {
        let program = parse_program(source).unwrap();
        match kr_pipeline(&program, &PipelineConfig::default()) {
            Ok(PipelineOutcome::Verified(result)) => match &result.answer_sets {
                Some(via) => {
                    let direct = program.answer_sets_default().unwrap();
                    if *via != direct {
                        failures.push(format!(
                            "{name}: via {:?} != direct {:?}",
                            render_sets(&program, via),
                            render_sets(&program, &direct)
                        ));
                    }
                }
                None => failures.push(format!("{name}: verified but no answer sets attached")),
            },
            Ok(PipelineOutcome::Inconclusive { reason }) => {
                failures.push(format!("{name}: inconclusive ({reason})"));
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }

    conclude(
        "05 (answer-set correspondence)",
        t0,
        Duration::from_secs(10),
        failures,
    );
}

#[test]
fn criterion_06_full_transformation_embeddings() {
    let t0 = Instant::now();
    let mut failures = Vec::new();

    for (n, expected_equations) in [(1usize, 1usize), (2, 8), (3, 81)] {
        match build_tn_embedding(n, 3) {
            Ok(emb) => {
                if !emb.report.passed() {
                    failures.push(format!("n={n}: embedding equations violated"));
                }
                if emb.report.equations_checked != expected_equations {
                    failures.push(format!(
                        "n={n}: {} equations, expected {expected_equations}",
                        emb.report.equations_checked
                    ));
                }
            }
            Err(e) => failures.push(format!("n={n}: {e}")),
        }
    }

    conclude(
        "06 (full-transformation embeddings)",
        t0,
        Duration::from_secs(1),
        failures,
    );
}

#[test]
fn criterion_07_positive_tight_at_scale() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut rng = Rng::new(0x5eed_0007);
    let mut passed = 0usize;

    for case in 0..100 {
        let program = random_positive_tight(&mut rng, 6, 12);
        match compile_positive_tight(&program) {
            Ok(result) => {
                if !result.report.verdict {
                    failures.push(format!("case {case}: certificate failed"));
                    continue;
                }
                let via = answer_sets_via_product(&program, &result.product, &result.certificate)
                    .unwrap();
                let direct = program.answer_sets_default().unwrap();
                let least = program.lfp_psi(&program.alphabet().empty_interp()).unwrap();
                if via != direct || via.len() != 1 || via[0] != least {
                    failures.push(format!(
                        "case {case}: via {:?}, direct {:?}, least model {}",
                        render_sets(&program, &via),
                        render_sets(&program, &direct),
                        program.alphabet().render_interp(least)
                    ));
                    continue;
                }
                passed += 1;
            }
            Err(e) => failures.push(format!("case {case}: {e}")),
        }
    }
    if passed != 100 {
        failures.push(format!("{passed}/100 cases passed"));
    }

    conclude(
        "07 (positive tight at scale)",
        t0,
        Duration::from_secs(60),
        failures,
    );
}

#[test]
fn criterion_08_two_state_decompositions() {
    let t0 = Instant::now();
    let mut failures = Vec::new();

    // the four maps on two states: identity, swap, both constants
    let maps: [(&str, [usize; 2]); 4] = [
        ("id", [0, 1]),
        ("swap", [1, 0]),
        ("const1", [0, 0]),
        ("const2", [1, 1]),
    ];
    let mut targets: Vec<(String, Automaton)> = Vec::new();
    for (na, ma) in maps.iter() {
        for (nb, mb) in maps.iter() {
            let aut = Automaton::from_table(
                vec!["1".into(), "2".into()],
                vec!["x".into(), "y".into()],
                vec![vec![ma[0], mb[0]], vec![ma[1], mb[1]]],
            )
            .unwrap();
            targets.push((format!("({na},{nb})"), aut));
        }
    }
    targets.push((
        "elevator".into(),
        canonical_automaton(CanonicalAutomaton::Elevator).unwrap(),
    ));
    let flip = Automaton::from_table(
        vec!["1".into(), "2".into()],
        vec!["x".into(), "y".into()],
        vec![vec![1, 1], vec![0, 0]],
    )
    .unwrap();
    targets.push(("flip".into(), flip));

    let config = DecomposeConfig::default();
    let mut verified = 0usize;
    for (name, target) in &targets {
        match decompose_automaton(target, &config) {
            Ok(DecomposeOutcome::Verified(result)) => {
                let factor_count =
                    result.census.resets + result.census.standards.values().sum::<usize>();
                if factor_count > 3 {
                    failures.push(format!("{name}: {factor_count} factors"));
                } else {
                    verified += 1;
                }
            }
            Ok(DecomposeOutcome::Inconclusive { reason, .. }) => {
                failures.push(format!("{name}: inconclusive ({reason})"));
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    println!(
        "criterion 08 detail: {verified}/{} targets verified",
        targets.len()
    );
    if verified != targets.len() {
        failures.push(format!(
            "{verified}/{} verified, expected 18/18",
            targets.len()
        ));
    }

    conclude(
        "08 (two-state decompositions)",
        t0,
        Duration::from_secs(300),
        failures,
    );
}

#[test]
fn criterion_09_pipeline_coverage() {
    let t0 = Instant::now();
    let mut failures = Vec::new();

    // representatives of every distinct one-atom operator behavior
    let one_atom = [
        ("A (fact)", "a."),
        ("identity", "p :- p."),
        ("R (reset)", "1 :- not 1."),
        ("guarded self-block", "p :- p, not p."),
        ("E (elevator)", "e :- e.\ne :- not e."),
    ];
    for (name, source) in one_atom {
        let program = parse_program(source).unwrap();
        match kr_pipeline(&program, &PipelineConfig::default()) {
            Ok(PipelineOutcome::Verified(result)) => {
                let direct = program.answer_sets_default().unwrap();
                match &result.answer_sets {
                    Some(via) if *via == direct => {}
                    Some(via) => failures.push(format!(
                        "{name}: answer sets {:?} != {:?}",
                        render_sets(&program, via),
                        render_sets(&program, &direct)
                    )),
                    None => failures.push(format!("{name}: no answer sets attached")),
                }
            }
            Ok(PipelineOutcome::Inconclusive { reason }) => {
                failures.push(format!("{name}: inconclusive ({reason})"));
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    let m1_elapsed = t0.elapsed();
    if m1_elapsed > Duration::from_secs(300) {
        failures.push(format!("one-atom sweep took {m1_elapsed:.2?}"));
    }

    // two atoms: the choice pair must verify within ten minutes
    let t1 = Instant::now();
    let b = canonical_program(CanonicalProgram::ExampleB).unwrap();
    match kr_pipeline(&b, &PipelineConfig::default()) {
        Ok(PipelineOutcome::Verified(result)) => {
            let direct = b.answer_sets_default().unwrap();
            if result.answer_sets.as_deref() != Some(&direct[..]) {
                failures.push("choice pair: answer sets mismatch".into());
            }
        }
        Ok(PipelineOutcome::Inconclusive { reason }) => {
            failures.push(format!("choice pair: inconclusive ({reason})"));
        }
        Err(e) => failures.push(format!("choice pair: {e}")),
    }
    if t1.elapsed() > Duration::from_secs(600) {
        failures.push(format!("two-atom run took {:.2?}", t1.elapsed()));
    }

    conclude(
        "09 (pipeline coverage)",
        t0,
        Duration::from_secs(900),
        failures,
    );
}

#[test]
fn criterion_10_property_suites() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut rng = Rng::new(0x5eed_0010);

    // operator laws on 500 random programs x 50 interpretation pairs
    let mut violations = 0usize;
    for _ in 0..500 {
        let p = random_program(&mut rng, 6, 12);
        let m = p.atom_count();
        let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        for _ in 0..50 {
            let i_small = rng.next_u64() & mask;
            let i_big = i_small | (rng.next_u64() & mask);
            let j_small = rng.next_u64() & mask;
            let j_big = j_small | (rng.next_u64() & mask);
            let alpha = p.alphabet();
            let psi = |i: u64, j: u64| {
                p.psi(&alpha.interp_from_bits(i), &alpha.interp_from_bits(j))
                    .unwrap()
                    .bits()
            };
            // monotone in the first argument
            if psi(i_small, j_small) & !psi(i_big, j_small) != 0 {
                violations += 1;
            }
            // antitone in the second argument
            if psi(i_small, j_big) & !psi(i_small, j_small) != 0 {
                violations += 1;
            }
            // stabilization within |alphabet| + 1 iterations
            let iters = p.lfp_iterations(&alpha.interp_from_bits(j_small)).unwrap();
            if iters > m + 1 {
                violations += 1;
            }
        }
    }
    if violations > 0 {
        failures.push(format!("{violations} operator-law violations"));
    }

    // representation search results always re-verify (200 fuzz cases);
    // even cases target a quotient of the product itself, so a certificate
    // is guaranteed to exist there
    let mut found = 0usize;
    for case in 0..200 {
        let spec = random_cascade(&mut rng);
        let product = Product::Automata(spec);
        let guaranteed = case % 2 == 0;
        let target = if guaranteed {
            let aut = product.char_automaton(BuildMode::Explicit, 64).unwrap();
            let n = aut.state_count();
            random_quotient(&aut, rng.below(n), rng.below(n))
        } else {
            random_automaton(&mut rng, 2, 2)
        };
        match search_representation(
            &product,
            &target,
            Claim::Homomorphic,
            RepSearchBudget::default(),
        ) {
            Ok(Some(cert)) => {
                found += 1;
                let rep = verify_certificate(&product, &target, &cert, Claim::Homomorphic).unwrap();
                if !rep.verdict {
                    failures.push(format!(
                        "fuzz case {case}: found certificate fails re-verify"
                    ));
                }
            }
            Ok(None) => {
                if guaranteed {
                    failures.push(format!("fuzz case {case}: missed a guaranteed certificate"));
                }
            }
            Err(e) => failures.push(format!("fuzz case {case}: {e}")),
        }
    }
    println!("criterion 10 detail: {found}/200 fuzz searches found a certificate");

    // lazy and explicit characteristic automata agree on full tables
    for case in 0..100 {
        let p = random_program(&mut rng, 4, 8);
        let explicit = characteristic_automaton(&p, BuildMode::Explicit, 4).unwrap();
        let lazy = characteristic_automaton(&p, BuildMode::Lazy, 4).unwrap();
        let n = explicit.state_count();
        for q in 0..n {
            for x in 0..n {
                if explicit.step(q, x) != lazy.step(q, x) {
                    failures.push(format!("corpus case {case}: lazy/explicit disagree"));
                }
            }
        }
    }

    conclude(
        "10 (property suites)",
        t0,
        Duration::from_secs(120),
        failures,
    );
}
