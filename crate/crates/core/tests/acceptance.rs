//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bethck_core::asimulation::fixture_family;
use bethck_core::asimulation::transfer_sweep;
use bethck_core::mutation::Mutation;
use bethck_core::semantics::{cert_lsat, implicit_definability_suite, sample_successors};
use bethck_core::suites::{cmd_check_z, cmd_demo_beth_failure, cmd_verify_lemmas, Report, FIXTURE_SEED};
use bethck_core::upset::oracle::{closure_bits, companions};
use bethck_core::upset::props::{ClosureFacts, PROPERTY_IDS};
use bethck_core::upset::{companion, n0_set, random_upset, NatMap, UpSet};
use bethck_core::worlds::{base_u, base_v, lemma2_check, random_u_world_with, three_n_plus_two, WORLD_PROPERTY_IDS};
use common::{companion_naive, first_mismatch, random_expr};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn res(r: u64, m: u64) -> UpSet {
    UpSet::from_residue(r, m).unwrap()
}

fn upset_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..1000 {
        let e = random_expr(&mut rng, 4, 2);
        if let Some(n) = first_mismatch(&e, 100_000) {
            return outcome(false, format!("expression {i} disagrees at n = {n}: {e:?}"));
        }
    }
    outcome(true, "1000 expressions agree on 0..10⁵")
}

fn closed_forms() -> Outcome {
    const LIMIT: u64 = 10_000;
    let graph = companions(LIMIT).expect("components have at most two points");
    for n in 0..LIMIT {
        if companion(n) != graph[n as usize] || companion(n) != companion_naive(n) {
            return outcome(false, format!("companion closed form wrong at {n}"));
        }
    }
    // closures computed on bit vectors by fixpoint, not by the companion map
    let bits = |x: &UpSet| (0..3 * LIMIT + 2).map(|n| x.member(n)).collect::<Vec<bool>>();
    let cl_three_n_plus_two = closure_bits(&bits(three_n_plus_two()));
    let cl_s = closure_bits(&bits(&res(0, 3).union(&res(2, 3))));
    let v1_expected = res(0, 3).union(&res(1, 9)).union(&res(4, 9));
    let cl_expected = res(2, 3).union(&res(7, 9));
    for n in 0..LIMIT {
        let i = n as usize;
        if n0_set().member(n) != !cl_s[i] || n0_set().member(n) != (n % 9 == 4) {
            return outcome(false, format!("ℕ₀ closed form wrong at {n}"));
        }
        if cl_expected.member(n) != cl_three_n_plus_two[i] || three_n_plus_two().closure().member(n) != cl_three_n_plus_two[i] {
            return outcome(false, format!("Cl(3ℕ+2) closed form wrong at {n}"));
        }
        if base_v().a().member(n) != v1_expected.member(n) || v1_expected.member(n) != !cl_three_n_plus_two[i] {
            return outcome(false, format!("𝐯₁ closed form wrong at {n}"));
        }
    }
    outcome(true, "companion map, ℕ₀, Cl(3ℕ+2), 𝐯₁ exact on 0..10⁴")
}

fn lemma1() -> Outcome {
    let facts = ClosureFacts::new(NatMap::companion());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sets: Vec<UpSet> = (0..300).map(|_| random_upset(&mut rng, 4)).collect();
    sets.extend([UpSet::empty(), UpSet::naturals(), three_n_plus_two().clone(), base_v().a().clone(), UpSet::from_finite([0, 5])]);
    for id in PROPERTY_IDS {
        for x in &sets {
            if !facts.set_level(id, x).unwrap() {
                return outcome(false, format!("property {id} fails at set level for {x:?}"));
            }
        }
        for n in 0..=1_000_000u64 {
            let x = &sets[(n % sets.len() as u64) as usize];
            if !facts.pointwise(id, x, n).unwrap() {
                return outcome(false, format!("property {id} fails at n = {n}"));
            }
        }
    }
    // the companion is an involution, checked against the independent map
    for n in 0..=1_000_000u64 {
        if companion_naive(companion_naive(n)) != n || companion(n) != companion_naive(n) {
            return outcome(false, format!("companion is not an involution at {n}"));
        }
    }
    outcome(true, format!("properties 1..=8 on {} sets, pointwise for n ≤ 10⁶", sets.len()))
}

fn lemma2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worlds = vec![base_v().clone(), base_u().clone()];
    worlds.extend((0..200).map(|_| random_u_world_with(&mut rng, 5)));
    for id in WORLD_PROPERTY_IDS {
        for w in &worlds {
            if !lemma2_check(id, w).unwrap() {
                return outcome(false, format!("property {id} fails at {w}"));
            }
        }
    }
    outcome(true, "properties 9..=15 at 𝐯, 𝐮 and 200 U-worlds")
}

fn certificates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worlds = vec![base_v().clone(), base_u().clone()];
    worlds.extend((0..200).map(|_| random_u_world_with(&mut rng, 5)));
    let mut facts = 0;
    for (i, w) in worlds.iter().enumerate() {
        let successors = sample_successors(w, i as u64, 21);
        for axiom in 1..=3 {
            let cert = cert_lsat(w, axiom, &successors).unwrap();
            facts += cert.facts.len();
            if !cert.pass() {
                let failed: Vec<&str> = cert.failures().map(|f| f.name.as_str()).collect();
                return outcome(false, format!("axiom {axiom} at world {i}: {failed:?}"));
            }
        }
    }
    outcome(true, format!("202 worlds × 3 axioms, 20 successors each, {facts} facts"))
}

fn summarize(r: &Report) -> String {
    let cats: Vec<String> = r.categories.iter().map(|(c, n)| format!("{c} ×{n}")).collect();
    format!("{} cases, {} violations [{}]", r.cases, r.violation_count, cats.join(", "))
}

fn constructors() -> Outcome {
    let r = cmd_check_z(6, 500, 4, None).unwrap();
    let mut detail = summarize(&r);
    if let Some(v) = r.violations.first() {
        detail.push_str(&format!("; first witness: {}", v.witness));
    }
    outcome(r.pass, detail)
}

fn finite_oracles() -> Outcome {
    let defin = implicit_definability_suite(3, 3);
    let models = fixture_family(FIXTURE_SEED, 40, 2, 2);
    let transfer = transfer_sweep(&models, 3);
    outcome(
        defin.pass() && transfer.pass(),
        format!(
            "definability: {} models, {} of T, {} violations; transfer: {} model pairs, {} pairs checked, {} violations",
            defin.models, defin.models_of_t, defin.violation_count, transfer.model_pairs, transfer.pairs_checked, transfer.violation_count
        ),
    )
}

fn demo() -> Outcome {
    let r = cmd_demo_beth_failure();
    outcome(r.pass, summarize(&r))
}

fn categories(r: &Report) -> BTreeSet<String> {
    r.categories.keys().cloned().collect()
}

/// Each mutant must raise a violation category that the unmutated run does
/// not, with a concrete witness.
fn mutants() -> Outcome {
    let run = |m: Option<Mutation>| {
        let mut c = categories(&cmd_verify_lemmas(5, 100, m));
        c.extend(categories(&cmd_check_z(5, 200, 4, m).unwrap()));
        c
    };
    let baseline = run(None);
    let mut parts = Vec::new();
    let mut pass = true;
    for m in Mutation::ALL {
        let fresh: Vec<String> = run(Some(m)).difference(&baseline).cloned().collect();
        pass &= !fresh.is_empty();
        parts.push(format!("{m}: {}", if fresh.is_empty() { "undetected".to_string() } else { fresh.join(", ") }));
    }
    outcome(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(u8, &str, Duration, fn() -> Outcome); 9] = [
        (1, "set algebra against bit-vector oracle", Duration::from_secs(10), upset_oracle),
        (2, "closed forms certified by oracle", Duration::from_secs(10), closed_forms),
        (3, "closure and companion facts", Duration::from_secs(30), lemma1),
        (4, "world facts", Duration::from_secs(10), lemma2),
        (5, "satisfaction certificates", Duration::from_secs(60), certificates),
        (6, "witness constructor soundness", Duration::from_secs(120), constructors),
        (7, "finite definability and transfer", Duration::from_secs(600), finite_oracles),
        (8, "end-to-end demonstration", Duration::from_secs(10), demo),
        (9, "mutation sensitivity", Duration::from_secs(120), mutants),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let started = Instant::now();
        let mut o = run();
        let took = started.elapsed();
        if took > limit {
            o.pass = false;
            o.detail.push_str(&format!("; over the {} s limit", limit.as_secs()));
        }
        if !o.pass {
            failed += 1;
        }
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {id} {status} ({name}, {:.1} s): {}", took.as_secs_f64(), o.detail);
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
