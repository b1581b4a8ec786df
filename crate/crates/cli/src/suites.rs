use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use pcgroup::commutator::{
    decomposable_rank_oracle, honda_power_check, k_set, tower_check, verify_lemma_d,
};
use pcgroup::constructions::{build_free_class2, GroupRecipe};
use pcgroup::properties::{power_class_suite, weight_power_maps};
use pcgroup::series::{
    cf_parameters, derived_subgroup, is_uniserial_mod, lower_central_series, power_subgroup,
};
use pcgroup::verdict::{find_union_triple, lemma_union_decomposition, theorem_a_verdict, Branch};
use pcgroup::witness::{
    find_theorem_b_witness, hall_congruence_check, hall_instances, random_hall_instances,
    replay_certificate,
};
use pcgroup::{Element, Error, Gate, PcPresentation, Subgroup};

use crate::report::{CheckResult, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    Consistency,
    LemmaD,
    Hall,
    TheoremA,
    TheoremB,
    Union,
    Honda,
    PowerClasses,
    Uniserial,
    Tower,
    KGap,
}

impl Suite {
    pub fn name(self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string()
    }

    pub fn defaults() -> Vec<Suite> {
        vec![
            Suite::Consistency,
            Suite::LemmaD,
            Suite::TheoremA,
            Suite::TheoremB,
            Suite::PowerClasses,
            Suite::Uniserial,
        ]
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub gate: Gate,
    pub seed: u64,
    pub relaxed: bool,
    pub random_hall: usize,
}

pub struct Target<'a> {
    pub pres: &'a PcPresentation,
    pub recipe: Option<&'a GroupRecipe>,
}

fn from_error(name: &str, e: Error) -> CheckResult {
    let verdict = match e {
        Error::Infeasible { .. } => Verdict::Skipped,
        Error::Hypothesis(_) => Verdict::Rejected,
        _ => Verdict::Fail,
    };
    CheckResult::new(name, verdict, json!({ "summary": e.to_string() }))
}

fn pass_fail(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn show(pres: &PcPresentation, e: &Element) -> String {
    let mut parts = Vec::new();
    for (i, &x) in e.exponents().iter().enumerate() {
        if x != 0 {
            let name = pres
                .names()
                .map_or_else(|| format!("g{}", i + 1), |n| n[i].clone());
            parts.push(if x == 1 { name } else { format!("{name}^{x}") });
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

pub fn run_suite(suite: Suite, t: &Target, opts: &Options) -> Vec<CheckResult> {
    let name = suite.name();
    let result = match suite {
        Suite::Consistency => consistency(t, opts),
        Suite::LemmaD => lemma_d(t, opts),
        Suite::Hall => hall(t, opts),
        Suite::TheoremA => theorem_a(t, opts),
        Suite::TheoremB => theorem_b(t, opts),
        Suite::Union => union(t, opts),
        Suite::Honda => honda(t, opts),
        Suite::PowerClasses => power_classes(t, opts),
        Suite::Uniserial => uniserial(t, opts),
        Suite::Tower => tower(t, opts),
        Suite::KGap => return k_gap(t, opts),
    };
    vec![result.unwrap_or_else(|e| from_error(&name, e))]
}

fn consistency(t: &Target, opts: &Options) -> pcgroup::Result<CheckResult> {
    t.pres.to_builder().check_consistency()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pairs = 1000;
    let bad = t.pres.collection_mismatches(pairs, &mut rng);
    Ok(CheckResult::new(
        "consistency",
        pass_fail(bad == 0),
        json!({
            "summary": format!("overlaps consistent, {bad} of {pairs} random word pairs disagree"),
            "word_pairs": pairs,
            "mismatches": bad,
        }),
    ))
}

fn lemma_d(t: &Target, opts: &Options) -> pcgroup::Result<CheckResult> {
    let r = verify_lemma_d(t.pres, &opts.gate)?;
    Ok(CheckResult::new(
        "lemma-d",
        pass_fail(r.pass()),
        json!({
            "summary": format!("{} elements, {} hyperplanes, {} mismatches", r.elements_checked, r.hyperplanes, r.mismatches.len()),
            "report": r,
        }),
    ))
}

fn hall(t: &Target, opts: &Options) -> pcgroup::Result<CheckResult> {
    let mut instances = match find_theorem_b_witness(t.pres, opts.relaxed, &opts.gate) {
        Ok(cert) => hall_instances(&cert),
        Err(Error::Hypothesis(_)) => Vec::new(),
        Err(e) => return Err(e),
    };
    let from_witness = instances.len();
    instances.extend(random_hall_instances(
        t.pres,
        opts.random_hall,
        opts.seed,
        &opts.gate,
    )?);
    let (mut checked, mut failures) = (0, Vec::new());
    for (k, inst) in instances.iter().enumerate() {
        match hall_congruence_check(t.pres, inst, &opts.gate) {
            Ok(r) => {
                checked += 1;
                if !r.pass() {
                    failures.push(k);
                }
            }
            Err(Error::Hypothesis(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if checked == 0 {
        return Err(Error::Hypothesis(
            "no instance satisfies the congruence hypotheses".into(),
        ));
    }
    Ok(CheckResult::new(
        "hall",
        pass_fail(failures.is_empty()),
        json!({
            "summary": format!("{checked} instances meet the hypotheses ({from_witness} from the witness chain), {} fail", failures.len()),
            "instances": checked,
            "failures": failures,
        }),
    ))
}

fn branch_text(branch: Branch, p: u32) -> String {
    match branch {
        Branch::Abelian => "abelian".into(),
        Branch::RankAtMostTwo => "powerful, d(G') <= 2".into(),
        Branch::Case1 => "powerful, |G':(G')^p gamma_3| = p".into(),
        Branch::Case2 => "powerful, |G':(G')^p gamma_3| = p^2".into(),
        Branch::Case3 => "powerful, gamma_3 <= (G')^p, union of derived subgroups".into(),
        Branch::NonPowerful => format!("non-powerful -> CF(6,{p}) -> single witness"),
    }
}

fn theorem_a(t: &Target, opts: &Options) -> pcgroup::Result<CheckResult> {
    let r = theorem_a_verdict(t.pres, &opts.gate)?;
    let verdict = match r.derived_is_commutators {
        None if r.confirmations.iter().all(|(_, ok)| *ok) => Verdict::Skipped,
        _ => pass_fail(r.holds()),
    };
    let branch = branch_text(r.branch, t.pres.p());
    let equality = match r.derived_is_commutators {
        Some(true) => "G' = K(G)",
        Some(false) => "G' != K(G)",
        None => "K(G) beyond the gate",
    };
    Ok(CheckResult::new(
        "theorem-a",
        verdict,
        json!({
            "summary": format!("{branch}; {equality}"),
            "branch": branch,
            "derived_rank": r.derived_rank,
            "derived_powerful": r.derived_powerful,
            "derived_is_commutators": r.derived_is_commutators,
            "confirmations": r.confirmations,
        }),
    ))
}

fn theorem_b(t: &Target, opts: &Options) -> pcgroup::Result<CheckResult> {
    let cert = find_theorem_b_witness(t.pres, opts.relaxed, &opts.gate)?;
    let replay = replay_certificate(t.pres, &cert, &opts.gate)?;
    Ok(CheckResult::new(
        "theorem-b",
        pass_fail(replay.pass()),
        json!({
            "summary": format!("x = {}, {} rungs, replay {}", show(t.pres, &cert.witness), cert.chain.len(), if replay.pass() { "ok" } else { "failed" }),
            "certificate": cert,
        }),
    ))
}

fn union(t: &Target, opts: &Options) -> pcgroup::Result<CheckResult> {
    let Some((x, u, v)) = find_union_triple(t.pres, &opts.gate)? else {
        return Err(Error::Hypothesis(
            "no (x, u, v) satisfies the union hypotheses".into(),
        ));
    };
    let r = lemma_union_decomposition(t.pres, &x, &u, &v, &opts.gate)?;
    let orders: Vec<usize> = r.pieces.iter().map(|h| h.derived.order_log()).collect();
    Ok(CheckResult::new(
        "union",
        pass_fail(r.pass()),
        json!({
            "summary": format!("{} subgroups, union {} [x,G](G')^p", r.pieces.len(), if r.union_equals_target { "equals" } else { "differs from" }),
            "x": show(t.pres, &x),
            "u": show(t.pres, &u),
            "v": show(t.pres, &v),
            "derived_order_logs": orders,
            "target_order_log": r.target.order_log(),
        }),
    ))
}

fn honda(t: &Target, opts: &Options) -> pcgroup::Result<CheckResult> {
    let r = honda_power_check(t.pres, 50, opts.seed, &opts.gate)?;
    Ok(CheckResult::new(
        "honda",
        pass_fail(r.pass()),
        json!({
            "summary": format!("{} commutators sampled{}", r.sampled, if r.vacuous { ", exponent p (vacuous)" } else { "" }),
            "report": r,
        }),
    ))
}

fn power_classes(t: &Target, opts: &Options) -> pcgroup::Result<CheckResult> {
    let mut r = power_class_suite(t.pres, &opts.gate)?;
    match weight_power_maps(t.pres, &opts.gate) {
        Ok(c) => r.checks.push(c),
        Err(Error::Infeasible { .. } | Error::Hypothesis(_)) => {}
        Err(e) => return Err(e),
    }
    let verdict = if !r.pass() {
        Verdict::Fail
    } else if r.instances() == 0 {
        Verdict::Rejected
    } else {
        Verdict::Pass
    };
    Ok(CheckResult::new(
        "power-classes",
        verdict,
        json!({
            "summary": format!("{} instances over {} checks", r.instances(), r.checks.len()),
            "checks": r.checks,
        }),
    ))
}

fn uniserial(t: &Target, opts: &Options) -> pcgroup::Result<CheckResult> {
    let whole = Subgroup::whole(t.pres);
    let derived = derived_subgroup(t.pres, &whole);
    let dp = power_subgroup(t.pres, &derived, 1, &opts.gate)?;
    let u = is_uniserial_mod(t.pres, &derived, &dp)?;
    let cf = cf_parameters(t.pres)?;
    let verdict = if u.holds {
        Verdict::Pass
    } else {
        Verdict::Rejected
    };
    Ok(CheckResult::new(
        "uniserial",
        verdict,
        json!({
            "summary": format!("G acts {}uniserially on G'/(G')^p; factors {:?}", if u.holds { "" } else { "non-" }, u.series.factor_logs()),
            "factor_logs": u.series.factor_logs(),
            "cf": cf.map(|c| json!({ "m": c.m, "degree": c.degree })),
        }),
    ))
}

fn tower(t: &Target, opts: &Options) -> pcgroup::Result<CheckResult> {
    let lcs = lower_central_series(t.pres);
    let mut tower = vec![Subgroup::whole(t.pres)];
    if let Some(last) = lcs.iter().rev().find(|s| !s.is_trivial()) {
        if !last.is_whole() {
            tower.push(last.clone());
        }
    }
    tower.push(Subgroup::trivial(t.pres.n()));
    let r = tower_check(t.pres, &tower, &opts.gate)?;
    Ok(CheckResult::new(
        "tower",
        pass_fail(r.pass()),
        json!({
            "summary": format!("|X_N| = {:?} along orders p^{:?}", r.sizes, tower.iter().map(Subgroup::order_log).collect::<Vec<_>>()),
            "report": r,
        }),
    ))
}

/// Looks for an element of `G'` that is not a commutator.
fn k_gap(t: &Target, opts: &Options) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut candidate = None;
    if let Some(&GroupRecipe::FreeClass2 { p, d }) = t.recipe {
        match build_free_class2(p, d) {
            Ok(f) => {
                let c = (0..d / 2).fold(f.pres.identity(), |acc, i| {
                    f.pres.mul(
                        &acc,
                        &f.pres.comm(&f.generator(2 * i), &f.generator(2 * i + 1)),
                    )
                });
                let decomposable = decomposable_rank_oracle(&f, &c).unwrap_or(true);
                out.push(CheckResult::new(
                    "k-gap/oracle",
                    if decomposable { Verdict::Fail } else { Verdict::Pass },
                    json!({
                        "summary": format!("{} is {}a commutator by bivector rank", show(&f.pres, &c), if decomposable { "" } else { "not " }),
                        "element": c,
                    }),
                ));
                candidate = Some(c);
            }
            Err(e) => out.push(from_error("k-gap/oracle", e)),
        }
    }
    let enumeration = k_set(t.pres, None, &opts.gate).map(|k| {
        let derived = derived_subgroup(t.pres, &Subgroup::whole(t.pres));
        let gap = match &candidate {
            Some(c) if !k.contains(c) => Some(c.clone()),
            _ => derived.elements(t.pres).into_iter().find(|c| !k.contains(c)),
        };
        CheckResult::new(
            "k-gap/enumeration",
            pass_fail(gap.is_some()),
            json!({
                "summary": match &gap {
                    Some(c) => format!("{} lies in G' but not in K(G); |K(G)| = {}", show(t.pres, c), k.len()),
                    None => format!("G' = K(G), {} elements", k.len()),
                },
                "element": gap,
                "commutators": k.len(),
            }),
        )
    });
    out.push(enumeration.unwrap_or_else(|e| from_error("k-gap/enumeration", e)));
    out
}
