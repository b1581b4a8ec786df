//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pcgroup::commutator::{
    decomposable_rank_oracle, k_set, k_set_pairs, k_x, tower_check, verify_lemma_d,
};
use pcgroup::constructions::{
    build_free_class2, build_huppert_example, extraspecial_wide, heisenberg,
    huppert_via_semidirect, semidirect_cyclic, semidirect_powerful, GroupRecipe,
};
use pcgroup::format::parse_presentation;
use pcgroup::properties::{power_class_suite, weight_power_maps};
use pcgroup::series::{
    cf_parameters, derived_subgroup, exponent_log, frattini, is_powerful, lower_central,
    nilpotency_class, rank,
};
use pcgroup::verdict::{find_union_triple, lemma_union_decomposition};
use pcgroup::witness::{
    find_theorem_b_witness, hall_congruence_check, hall_instances, random_hall_instances,
    replay_certificate, HallInstance,
};
use pcgroup::{Error, Gate, PcPresentation, Subgroup};

type Outcome = std::result::Result<String, String>;

fn ensure(ok: bool, what: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn e2s(e: Error) -> String {
    e.to_string()
}

fn derived(g: &PcPresentation) -> Subgroup {
    derived_subgroup(g, &Subgroup::whole(g))
}

fn profile(p: u32) -> Outcome {
    let gate = Gate::default().with_max_order((p as u128).pow(6));
    let g = build_huppert_example(p).map_err(e2s)?;
    g.to_builder().check_consistency().map_err(e2s)?;
    let whole = Subgroup::whole(&g);
    let d = derived(&g);
    let dd = derived_subgroup(&g, &d);
    let exp = exponent_log(&g, &whole, &gate).map_err(e2s)?;
    let cf = cf_parameters(&g).map_err(e2s)?;
    let checks = [
        (g.n() == 6, format!("order {p}^{}", g.n())),
        (exp == 1, format!("exponent {p}^{exp}")),
        (
            nilpotency_class(&g) == 5,
            format!("class {}", nilpotency_class(&g)),
        ),
        (rank(&g, &d) == 3, format!("d(G') = {}", rank(&g, &d))),
        (
            !dd.is_trivial() && dd == lower_central(&g, 5),
            "G'' = gamma_5 != 1".to_string(),
        ),
        (
            !is_powerful(&g, &d, &gate).map_err(e2s)?,
            "G' non-powerful".to_string(),
        ),
        (
            cf.is_some_and(|c| c.m == 6),
            format!("CF m = {:?}", cf.map(|c| c.m)),
        ),
    ];
    let bad: Vec<&String> = checks
        .iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, w)| w)
        .collect();
    let all: Vec<&String> = checks.iter().map(|(_, w)| w).collect();
    if bad.is_empty() {
        Ok(format!(
            "p={p}: {}",
            all.iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        ))
    } else {
        Err(format!(
            "p={p}: {} (expected exponent p, class 5, d(G')=3, CF(6,p))",
            bad.iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        ))
    }
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let a = profile(5)
        .and_then(|m| ensure(t.elapsed() < Duration::from_secs(5), "p=5 over 5 s").map(|_| m));
    let t = Instant::now();
    let b = profile(7)
        .and_then(|m| ensure(t.elapsed() < Duration::from_secs(60), "p=7 over 60 s").map(|_| m));
    match (a, b) {
        (Ok(a), Ok(b)) => Ok(format!("{a}; {b}")),
        (a, b) => Err(format!(
            "{}; {}",
            a.unwrap_or_else(|e| e),
            b.unwrap_or_else(|e| e)
        )),
    }
}

fn criterion_2() -> Outcome {
    let g = build_huppert_example(5).map_err(e2s)?;
    let k = k_set(&g, None, &Gate::default()).map_err(e2s)?;
    ensure(k.equals_subgroup(&g, &derived(&g)), "K(G) != G'")?;
    ensure(k.len() == 625, format!("|K(G)| = {}", k.len()))?;
    Ok("K(G) = G', 625 elements".into())
}

fn criterion_3(instances: &mut Vec<(PcPresentation, HallInstance)>) -> Outcome {
    let gate = Gate::default();
    let g = build_huppert_example(5).map_err(e2s)?;
    let cert = find_theorem_b_witness(&g, false, &gate).map_err(e2s)?;
    ensure(cert.chain.len() == 4, format!("{} rungs", cert.chain.len()))?;
    ensure(
        replay_certificate(&g, &cert, &gate).map_err(e2s)?.pass(),
        "replay failed",
    )?;
    let kx = k_x(&g, &cert.witness, &gate).map_err(e2s)?;
    ensure(
        kx.len() == 625 && kx.equals_subgroup(&g, &derived(&g)),
        "K_x(G) != G'",
    )?;
    instances.extend(hall_instances(&cert).into_iter().map(|i| (g.clone(), i)));
    Ok(format!(
        "witness {:?}, 4 rungs replayed, |K_x(G)| = 625",
        cert.witness.exponents()
    ))
}

fn criterion_4() -> Outcome {
    let gate = Gate::default();
    let f = build_free_class2(5, 3).map_err(e2s)?;
    let g = &f.pres;
    let whole = Subgroup::whole(g);
    let reps = frattini(g, &whole).transversal(g);
    let mut largest = 0;
    for x in &reps {
        let n = k_x(g, x, &gate).map_err(e2s)?.len();
        ensure(n <= 25, format!("|K_x(G)| = {n}"))?;
        largest = largest.max(n);
    }
    let k = k_set(g, None, &gate).map_err(e2s)?;
    ensure(
        k.len() == 125 && k.equals_subgroup(g, &derived(g)),
        "K(G) != G'",
    )?;
    Ok(format!(
        "{} representatives, max |K_x(G)| = {largest}, K(G) = G' of order 125",
        reps.len()
    ))
}

fn criterion_5() -> Outcome {
    let f = build_free_class2(5, 4).map_err(e2s)?;
    let g = &f.pres;
    let a: Vec<_> = (0..4).map(|i| f.generator(i)).collect();
    let c = g.mul(&g.comm(&a[0], &a[1]), &g.comm(&a[2], &a[3]));
    ensure(
        !decomposable_rank_oracle(&f, &c).map_err(e2s)?,
        "oracle calls it a commutator",
    )?;
    let k = k_set_pairs(g, &Gate::default()).map_err(e2s)?;
    ensure(!k.contains(&c), "pair enumeration finds it")?;
    let elems = derived(g).elements(g);
    let mut disagreements = 0;
    for e in &elems {
        if decomposable_rank_oracle(&f, e).map_err(e2s)? != k.contains(e) {
            disagreements += 1;
        }
    }
    ensure(disagreements == 0, format!("{disagreements} disagreements"))?;
    Ok(format!(
        "[a1,a2][a3,a4] not a commutator; oracle and pairs agree on all {} elements",
        elems.len()
    ))
}

fn criterion_6() -> Outcome {
    let gate = Gate::default();
    let f = build_free_class2(5, 6).map_err(e2s)?;
    let g = &f.pres;
    let a: Vec<_> = (0..6).map(|i| f.generator(i)).collect();
    let c = (0..3).fold(g.identity(), |acc, i| {
        g.mul(&acc, &g.comm(&a[2 * i], &a[2 * i + 1]))
    });
    ensure(
        !decomposable_rank_oracle(&f, &c).map_err(e2s)?,
        "oracle calls it a commutator",
    )?;
    ensure(
        matches!(k_set(g, None, &gate), Err(Error::Infeasible { .. })),
        "K(G) not skipped",
    )?;
    ensure(
        matches!(k_set_pairs(g, &gate), Err(Error::Infeasible { .. })),
        "pairs not skipped",
    )?;
    ensure(
        matches!(verify_lemma_d(g, &gate), Err(Error::Infeasible { .. })),
        "D sweep not skipped",
    )?;
    Ok("[a1,a2][a3,a4][a5,a6] not a commutator; enumerations SKIPPED".into())
}

fn criterion_7() -> Outcome {
    let gate = Gate::default();
    let groups: Vec<(&str, PcPresentation)> = vec![
        ("heisenberg", heisenberg(5).map_err(e2s)?),
        (
            "extraspecial exponent p^2",
            extraspecial_wide(5).map_err(e2s)?,
        ),
        (
            "free class 2, d=3",
            build_free_class2(5, 3).map_err(e2s)?.pres,
        ),
        ("huppert", build_huppert_example(5).map_err(e2s)?),
        (
            "huppert semidirect",
            huppert_via_semidirect(5).map_err(e2s)?,
        ),
        ("semidirect cyclic", semidirect_cyclic(5).map_err(e2s)?),
    ];
    let mut elements = 0;
    for (name, g) in &groups {
        let r = verify_lemma_d(g, &gate).map_err(e2s)?;
        ensure(r.pass(), format!("{name}: {r:?}"))?;
        elements += r.elements_checked;
    }
    Ok(format!(
        "{} groups, {elements} elements, every D(T) contains Phi(G) with even index",
        groups.len()
    ))
}

fn criterion_8(mut instances: Vec<(PcPresentation, HallInstance)>) -> Outcome {
    let gate = Gate::default();
    for g in [
        semidirect_cyclic(5).map_err(e2s)?,
        semidirect_powerful(5).map_err(e2s)?,
    ] {
        let cert = find_theorem_b_witness(&g, false, &gate).map_err(e2s)?;
        instances.extend(hall_instances(&cert).into_iter().map(|i| (g.clone(), i)));
    }
    let g = semidirect_powerful(5).map_err(e2s)?;
    let random = random_hall_instances(&g, 100, 2024, &gate).map_err(e2s)?;
    ensure(
        random.len() == 100,
        format!("only {} random instances", random.len()),
    )?;
    instances.extend(random.into_iter().map(|i| (g.clone(), i)));
    let (mut checked, mut rejected) = (0, 0);
    for (g, inst) in &instances {
        match hall_congruence_check(g, inst, &gate) {
            Ok(r) => {
                checked += 1;
                ensure(r.pass(), format!("congruence fails: {r:?}"))?;
            }
            Err(Error::Hypothesis(_)) => rejected += 1,
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(format!(
        "{checked} instances hold, {rejected} chain instances outside the hypotheses"
    ))
}

fn criterion_9() -> Outcome {
    let gate = Gate::default();
    let f = build_free_class2(5, 3).map_err(e2s)?;
    let (x, u, v) = find_union_triple(&f.pres, &gate)
        .map_err(e2s)?
        .ok_or("no triple")?;
    let r = lemma_union_decomposition(&f.pres, &x, &u, &v, &gate).map_err(e2s)?;
    ensure(r.pieces.len() == 6, format!("{} pieces", r.pieces.len()))?;
    ensure(r.pass(), "union or powerful property fails")?;
    ensure(
        r.pieces.iter().all(|h| h.derived.order_log() == 1),
        "derived pieces not of order 5",
    )?;
    Ok(format!(
        "6 derived subgroups of order 5 cover [x,G](G')^p of order 5^{}",
        r.target.order_log()
    ))
}

fn criterion_10() -> Outcome {
    let gate = Gate::default();
    let mut instances = 0;
    for recipe in GroupRecipe::corpus(5) {
        let g = recipe.build().map_err(e2s)?;
        let r = power_class_suite(&g, &gate).map_err(e2s)?;
        ensure(r.pass(), format!("{recipe}: {:?}", r.checks))?;
        instances += r.instances();
        if find_theorem_b_witness(&g, false, &gate).is_ok() {
            let c = weight_power_maps(&g, &gate).map_err(e2s)?;
            ensure(c.failures.is_empty(), format!("{recipe}: {:?}", c.failures))?;
            instances += c.instances;
        }
    }
    ensure(instances > 0, "no qualifying instance")?;
    Ok(format!("{instances} instances over the corpus"))
}

fn criterion_11() -> Outcome {
    let g = build_huppert_example(5).map_err(e2s)?;
    let tower = [
        Subgroup::whole(&g),
        lower_central(&g, 5),
        Subgroup::trivial(g.n()),
    ];
    let r = tower_check(&g, &tower, &Gate::default()).map_err(e2s)?;
    ensure(r.pass(), format!("{r:?}"))?;
    Ok(format!("|X_N| = {:?}, unions of cosets, monotone", r.sizes))
}

fn criterion_12() -> Outcome {
    let gate = Gate::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for recipe in GroupRecipe::corpus(5) {
        let g = recipe.build().map_err(e2s)?;
        let bad = g.collection_mismatches(1000, &mut rng);
        ensure(bad == 0, format!("{recipe}: {bad} mismatches"))?;
    }
    let planted = "p 5\nn 3\npow 1 : g2\ncomm 2 1 : g3\n";
    ensure(
        matches!(parse_presentation(planted), Err(Error::Inconsistent { .. })),
        "planted inconsistency accepted",
    )?;
    let g = build_huppert_example(5).map_err(e2s)?;
    let cert = find_theorem_b_witness(&g, false, &gate).map_err(e2s)?;
    let mut bad = cert.clone();
    bad.pairing[1] = g.identity();
    let r = replay_certificate(&g, &bad, &gate).map_err(e2s)?;
    ensure(
        r.first_failure.as_ref().map(|f| f.0) == Some(1),
        "tampered rung not detected",
    )?;
    let other = heisenberg(5).map_err(e2s)?;
    ensure(
        matches!(
            replay_certificate(&other, &cert, &gate),
            Err(Error::Usage(_))
        ),
        "digest mismatch accepted",
    )?;
    Ok("1000 word pairs per corpus group, planted inconsistency and tampering detected".into())
}

fn main() {
    let mut hall = Vec::new();
    let run = |n: usize, name: &str, budget: u64, f: &mut dyn FnMut() -> Outcome| -> bool {
        let t = Instant::now();
        let out = f();
        let secs = t.elapsed().as_secs_f64();
        let (ok, msg) = match out {
            Ok(m) if secs <= budget as f64 => (true, m),
            Ok(m) => (false, format!("{m} (took {secs:.1} s, budget {budget} s)")),
            Err(m) => (false, m),
        };
        println!(
            "{} {n:>2} {name} [{secs:.2} s]: {msg}",
            if ok { "PASS" } else { "FAIL" }
        );
        ok
    };
    let results = [
        run(1, "maximal-class profile", 65, &mut criterion_1),
        run(
            2,
            "K(G) = G' on the maximal-class group",
            60,
            &mut criterion_2,
        ),
        run(3, "single-element witness", 60, &mut || {
            criterion_3(&mut hall)
        }),
        run(4, "F_3 quotient separation", 30, &mut criterion_4),
        run(5, "F_4 quotient gap", 600, &mut criterion_5),
        run(6, "F_6 quotient gap", 5, &mut criterion_6),
        run(7, "D subgroup sweep", 300, &mut criterion_7),
        run(8, "power congruence", 120, &mut || {
            criterion_8(std::mem::take(&mut hall))
        }),
        run(9, "union decomposition", 60, &mut criterion_9),
        run(10, "power-class properties", 300, &mut criterion_10),
        run(11, "quotient tower", 120, &mut criterion_11),
        run(12, "engine self-checks", 60, &mut criterion_12),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!(
        "{} of {} criteria pass",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
