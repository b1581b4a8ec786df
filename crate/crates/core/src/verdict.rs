//! Covering `G'` by commutators when `d(G') <= 3`: the case split, the
//! union decomposition, and the end-to-end verdict.

use serde::{Deserialize, Serialize};

use crate::commutator::{commutators_with, k_set, ElementSet};
use crate::config::Gate;
use crate::error::{Error, Result};
use crate::pc::{Element, PcPresentation};
use crate::quotient::quotient;
use crate::series::{
    cf_parameters, derived_subgroup, frattini, is_powerful, is_uniserial_mod, lower_central,
    power_subgroup, rank,
};
use crate::subgroup::{closure, commutator_subgroup, join, Subgroup};
use crate::witness::{find_theorem_b_witness, WitnessCertificate};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionPiece {
    pub subgroup: Subgroup,
    pub derived: Subgroup,
    pub derived_as_expected: bool,
    pub derived_powerful: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionReport {
    pub pieces: Vec<UnionPiece>,
    /// `[x, G] (G')^p`
    pub target: Subgroup,
    pub union_equals_target: bool,
}

impl UnionReport {
    pub fn pass(&self) -> bool {
        self.union_equals_target
            && self
                .pieces
                .iter()
                .all(|u| u.derived_as_expected && u.derived_powerful)
    }
}

/// First violated hypothesis of the union decomposition, if any.
pub fn union_hypotheses(
    pres: &PcPresentation,
    x: &Element,
    u: &Element,
    v: &Element,
    gate: &Gate,
) -> Result<Option<String>> {
    let whole = Subgroup::whole(pres);
    let derived = derived_subgroup(pres, &whole);
    let gen = closure(pres, &[pres.comm(u, v), pres.comm(x, u), pres.comm(x, v)]);
    if gen != derived {
        return Ok(Some("G' = <[u,v], [x,u], [x,v]>".into()));
    }
    let xg = commutators_with(pres, x);
    if xg == derived {
        return Ok(Some("G' != [x,G]".into()));
    }
    let dp = power_subgroup(pres, &derived, 1, gate)?;
    if !commutator_subgroup(pres, &xg, &whole).is_subgroup_of(pres, &dp) {
        return Ok(Some("[x,G,G] <= (G')^p".into()));
    }
    if pres.p() < 5 {
        return Ok(Some("p >= 5".into()));
    }
    if !is_powerful(pres, &derived, gate)? {
        return Ok(Some("G' powerful".into()));
    }
    if rank(pres, &derived) != 3 {
        return Ok(Some("d(G') = 3".into()));
    }
    Ok(None)
}

/// `H_i = <x, u v^i, v^p>` for `i < p` and `H_p = <x, v, u^p>`, with their derived subgroups.
pub fn lemma_union_decomposition(
    pres: &PcPresentation,
    x: &Element,
    u: &Element,
    v: &Element,
    gate: &Gate,
) -> Result<UnionReport> {
    if let Some(why) = union_hypotheses(pres, x, u, v, gate)? {
        return Err(Error::Hypothesis(format!(
            "union decomposition needs {why}"
        )));
    }
    let p = pres.p() as i64;
    let whole = Subgroup::whole(pres);
    let derived = derived_subgroup(pres, &whole);
    let dp = power_subgroup(pres, &derived, 1, gate)?;
    let target = join(pres, &[&commutators_with(pres, x), &dp]);
    gate.require_order("union decomposition", pres.p(), target.order_log())?;
    let mut pieces = Vec::new();
    let vp = pres.pow(v, p);
    for i in 0..=p {
        let (h, c) = if i < p {
            let w = pres.mul(u, &pres.pow(v, i));
            (
                closure(pres, &[x.clone(), w.clone(), vp.clone()]),
                pres.comm(x, &w),
            )
        } else {
            (
                closure(pres, &[x.clone(), v.clone(), pres.pow(u, p)]),
                pres.comm(x, v),
            )
        };
        let hd = derived_subgroup(pres, &h);
        let mut expected = dp.igs().to_vec();
        expected.push(c);
        let derived_as_expected = closure(pres, &expected) == hd;
        let derived_powerful = is_powerful(pres, &hd, gate)?;
        pieces.push(UnionPiece {
            subgroup: h,
            derived: hd,
            derived_as_expected,
            derived_powerful,
        });
    }
    let mut union = ElementSet::new();
    for piece in &pieces {
        union.extend(piece.derived.elements(pres).into_iter().collect());
    }
    Ok(UnionReport {
        union_equals_target: union.equals_subgroup(pres, &target),
        pieces,
        target,
    })
}

/// First `(x, u, v)` over coset representatives of `Phi(G)` satisfying the union hypotheses.
pub fn find_union_triple(
    pres: &PcPresentation,
    gate: &Gate,
) -> Result<Option<(Element, Element, Element)>> {
    let whole = Subgroup::whole(pres);
    let derived = derived_subgroup(pres, &whole);
    let dp = power_subgroup(pres, &derived, 1, gate)?;
    let reps: Vec<Element> = frattini(pres, &whole)
        .transversal(pres)
        .into_iter()
        .skip(1)
        .collect();
    gate.require_pairs(
        "union triple search",
        pres.p(),
        whole.order_log() - frattini(pres, &whole).order_log(),
    )?;
    for x in &reps {
        let xg = join(pres, &[&commutators_with(pres, x), &dp]);
        if xg.order_log() != dp.order_log() + 2 {
            continue;
        }
        for u in &reps {
            for v in &reps {
                if union_hypotheses(pres, x, u, v, gate)?.is_none() {
                    return Ok(Some((x.clone(), u.clone(), v.clone())));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Abelian,
    /// Powerful `G'` with `d(G') <= 2`.
    RankAtMostTwo,
    /// Powerful `G'`, `|G' : (G')^p gamma_3(G)| = p`.
    Case1,
    /// Powerful `G'`, `|G' : (G')^p gamma_3(G)| = p^2`.
    Case2,
    /// Powerful `G'`, `gamma_3(G) <= (G')^p`.
    Case3,
    /// Non-powerful `G'`: `G/(G')^p` of type CF(6,p), then a single witness.
    NonPowerful,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremAReport {
    pub derived_rank: usize,
    pub derived_powerful: bool,
    pub branch: Branch,
    /// `None` when the commutator set is beyond the enumeration gate.
    pub derived_is_commutators: Option<bool>,
    pub confirmations: Vec<(String, bool)>,
    pub witness: Option<WitnessCertificate>,
}

impl TheoremAReport {
    pub fn holds(&self) -> bool {
        self.derived_is_commutators == Some(true) && self.confirmations.iter().all(|(_, ok)| *ok)
    }
}

/// Classifies an in-scope group and checks `G' = K(G)` extensionally.
pub fn theorem_a_verdict(pres: &PcPresentation, gate: &Gate) -> Result<TheoremAReport> {
    if pres.p() < 5 {
        return Err(Error::Hypothesis(format!("needs p >= 5, got {}", pres.p())));
    }
    let whole = Subgroup::whole(pres);
    let derived = derived_subgroup(pres, &whole);
    let derived_rank = rank(pres, &derived);
    if derived_rank > 3 {
        return Err(Error::Hypothesis(format!(
            "d(G') = {derived_rank} exceeds 3"
        )));
    }
    let derived_powerful = is_powerful(pres, &derived, gate)?;
    let dp = power_subgroup(pres, &derived, 1, gate)?;
    let mut confirmations = Vec::new();
    let mut witness = None;
    let branch = if derived.is_trivial() {
        Branch::Abelian
    } else if derived_powerful {
        if derived_rank <= 2 {
            Branch::RankAtMostTwo
        } else {
            let gamma = join(pres, &[&dp, &lower_central(pres, 3)]);
            match derived.order_log() - gamma.order_log() {
                1 => Branch::Case1,
                2 => Branch::Case2,
                _ => {
                    confirmations.push((
                        "gamma_3(G) <= (G')^p".into(),
                        lower_central(pres, 3).is_subgroup_of(pres, &dp),
                    ));
                    Branch::Case3
                }
            }
        }
    } else {
        confirmations.push((
            "|G':(G')^p| = p^4".into(),
            derived.order_log() - dp.order_log() == 4,
        ));
        let q = quotient(&std::sync::Arc::new(pres.clone()), &dp)?;
        let cf = cf_parameters(q.target())?;
        confirmations.push(("G/(G')^p is CF(6,p)".into(), cf.is_some_and(|c| c.m == 6)));
        confirmations.push((
            "uniserial modulo (G')^p".into(),
            is_uniserial_mod(pres, &derived, &dp)?.holds,
        ));
        match find_theorem_b_witness(pres, false, gate) {
            Ok(cert) => {
                confirmations.push(("single-element witness found".into(), true));
                witness = Some(cert);
            }
            Err(Error::Infeasible { .. }) => {}
            Err(e) => {
                confirmations.push((format!("single-element witness found ({e})"), false));
            }
        }
        Branch::NonPowerful
    };
    let derived_is_commutators = match k_set(pres, None, gate) {
        Ok(k) => Some(k.equals_subgroup(pres, &derived)),
        Err(Error::Infeasible { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(TheoremAReport {
        derived_rank,
        derived_powerful,
        branch,
        derived_is_commutators,
        confirmations,
        witness,
    })
}
