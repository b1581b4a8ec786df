//! Characteristic series and class predicates.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::config::Gate;
use crate::error::{Error, Result};
use crate::pc::{Element, PcPresentation};
use crate::subgroup::{
    closure, commutator_subgroup, condition_subgroup, is_normal, join, normal_closure,
    relative_transversal, Reducer, Subgroup,
};

/// A descending chain of subgroups, each containing the next.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalSeries {
    pub terms: Vec<Subgroup>,
}

impl NormalSeries {
    pub fn factor_logs(&self) -> Vec<usize> {
        self.terms
            .windows(2)
            .map(|w| w[0].order_log() - w[1].order_log())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every term normal in `G` and every factor of order `p`.
    pub fn is_chief(&self, pres: &PcPresentation) -> bool {
        let whole = Subgroup::whole(pres);
        self.factor_logs().iter().all(|&l| l == 1)
            && self.terms.iter().all(|t| is_normal(pres, t, &whole))
    }
}

pub fn derived_subgroup(pres: &PcPresentation, h: &Subgroup) -> Subgroup {
    commutator_subgroup(pres, h, h)
}

/// `gamma_i(H)`, with `gamma_1(H) = H`.
pub fn lower_central_of(pres: &PcPresentation, h: &Subgroup, i: usize) -> Subgroup {
    let mut cur = h.clone();
    for _ in 1..i.max(1) {
        if cur.is_trivial() {
            break;
        }
        cur = commutator_subgroup(pres, &cur, h);
    }
    cur
}

pub fn lower_central(pres: &PcPresentation, i: usize) -> Subgroup {
    lower_central_of(pres, &Subgroup::whole(pres), i)
}

/// `gamma_1(H) > gamma_2(H) > ... > 1`.
pub fn lower_central_series_of(pres: &PcPresentation, h: &Subgroup) -> Vec<Subgroup> {
    let mut out = vec![h.clone()];
    while !out.last().unwrap().is_trivial() {
        let next = commutator_subgroup(pres, out.last().unwrap(), h);
        if &next == out.last().unwrap() {
            break;
        }
        out.push(next);
    }
    out
}

pub fn lower_central_series(pres: &PcPresentation) -> Vec<Subgroup> {
    lower_central_series_of(pres, &Subgroup::whole(pres))
}

pub fn nilpotency_class_of(pres: &PcPresentation, h: &Subgroup) -> usize {
    lower_central_series_of(pres, h).len() - 1
}

pub fn nilpotency_class(pres: &PcPresentation) -> usize {
    nilpotency_class_of(pres, &Subgroup::whole(pres))
}

/// `H^{p^k}`, the subgroup generated by all `p^k`-th powers.
///
/// When the class of `H` is below `p` the group is regular and
/// `H^{p^k}` is the normal closure of the powers of the igs elements times
/// `(H')^{p^k}`. Otherwise that subgroup is only a lower bound, and every
/// coset of it in `H` is tested once, since the power map is well defined
/// on cosets of a normal subgroup of `H`.
pub fn power_subgroup(
    pres: &PcPresentation,
    h: &Subgroup,
    k: u32,
    gate: &Gate,
) -> Result<Subgroup> {
    if k == 0 || h.is_trivial() {
        return Ok(h.clone());
    }
    let mut gens: Vec<Element> = h.igs().iter().map(|t| pres.pow_p(t, k)).collect();
    let derived = derived_subgroup(pres, h);
    if !derived.is_trivial() {
        gens.extend(
            power_subgroup(pres, &derived, k, gate)?
                .igs()
                .iter()
                .cloned(),
        );
    }
    let mut s = normal_closure(pres, &gens, h)?;
    if nilpotency_class_of(pres, h) < pres.p() as usize {
        return Ok(s);
    }
    gate.require_order(
        "power subgroup coset scan",
        pres.p(),
        h.order_log() - s.order_log(),
    )?;
    let start = s.clone();
    for x in relative_transversal(pres, h, &start) {
        let y = pres.pow_p(&x, k);
        if !s.contains(pres, &y) {
            let mut more = s.igs().to_vec();
            more.push(y);
            s = normal_closure(pres, &more, h)?;
        }
    }
    Ok(s)
}

/// `Phi(H) = H^p H'`.
pub fn frattini(pres: &PcPresentation, h: &Subgroup) -> Subgroup {
    let t = h.igs();
    let mut gens = Vec::new();
    for (k, a) in t.iter().enumerate() {
        gens.push(pres.pow(a, pres.p() as i64));
        for b in &t[k + 1..] {
            gens.push(pres.comm(a, b));
        }
    }
    normal_closure(pres, &gens, h).expect("generators lie in H")
}

/// Frattini rank `log_p |H : Phi(H)|`.
pub fn rank(pres: &PcPresentation, h: &Subgroup) -> usize {
    h.order_log() - frattini(pres, h).order_log()
}

/// `Omega_i(H)`, generated by the elements of order at most `p^i`.
pub fn omega(pres: &PcPresentation, h: &Subgroup, i: u32, gate: &Gate) -> Result<Subgroup> {
    gate.require_order("omega", pres.p(), h.order_log())?;
    let small: Vec<Element> = h
        .elements(pres)
        .into_iter()
        .filter(|a| pres.pow_p(a, i).is_identity())
        .collect();
    Ok(closure(pres, &small))
}

/// Smallest `e` with `H^{p^e} = 1`.
pub fn exponent_log(pres: &PcPresentation, h: &Subgroup, gate: &Gate) -> Result<u32> {
    let mut e = 0;
    let mut cur = h.clone();
    while !cur.is_trivial() {
        e += 1;
        cur = power_subgroup(pres, h, e, gate)?;
    }
    Ok(e)
}

/// `H' <= H^p`, or `H' <= H^4` when `p = 2`.
pub fn is_powerful(pres: &PcPresentation, h: &Subgroup, gate: &Gate) -> Result<bool> {
    let k = if pres.p() == 2 { 2 } else { 1 };
    let derived = derived_subgroup(pres, h);
    if derived.is_trivial() {
        return Ok(true);
    }
    Ok(derived.is_subgroup_of(pres, &power_subgroup(pres, h, k, gate)?))
}

/// `gamma_{p-1}(H) <= H^p`, or `H' <= H^4` when `p = 2`.
pub fn is_potent(pres: &PcPresentation, h: &Subgroup, gate: &Gate) -> Result<bool> {
    if pres.p() == 2 {
        return is_powerful(pres, h, gate);
    }
    let gamma = lower_central_of(pres, h, pres.p() as usize - 1);
    if gamma.is_trivial() {
        return Ok(true);
    }
    Ok(gamma.is_subgroup_of(pres, &power_subgroup(pres, h, 1, gate)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerAbelian {
    /// `H^{p^i}` is exactly the set of `p^i`-th powers.
    pub powers_form_subgroup: bool,
    /// `Omega_i(H)` is exactly the set of elements of order at most `p^i`.
    pub omega_is_set: bool,
    /// `|H : H^{p^i}| = |Omega_i(H)|`.
    pub index_matches: bool,
}

impl PowerAbelian {
    pub fn all(&self) -> bool {
        self.powers_form_subgroup && self.omega_is_set && self.index_matches
    }
}

/// The three power-abelian conditions, each checked for every `i` up to the exponent.
pub fn is_power_abelian(pres: &PcPresentation, h: &Subgroup, gate: &Gate) -> Result<PowerAbelian> {
    gate.require_order("power abelian check", pres.p(), h.order_log())?;
    let elems = h.elements(pres);
    let e = exponent_log(pres, h, gate)?;
    let mut out = PowerAbelian {
        powers_form_subgroup: true,
        omega_is_set: true,
        index_matches: true,
    };
    let mut pows = elems.clone();
    for i in 1..=e {
        pows = pows.iter().map(|a| pres.pow(a, pres.p() as i64)).collect();
        let distinct: HashSet<&Element> = pows.iter().collect();
        let sub = power_subgroup(pres, h, i, gate)?;
        if distinct.len() as u128 != Gate::size(pres.p(), sub.order_log()).unwrap_or(u128::MAX) {
            out.powers_form_subgroup = false;
        }
        let killed: Vec<Element> = elems
            .iter()
            .zip(&pows)
            .filter(|(_, q)| q.is_identity())
            .map(|(a, _)| a.clone())
            .collect();
        let om = closure(pres, &killed);
        if killed.len() as u128 != Gate::size(pres.p(), om.order_log()).unwrap_or(u128::MAX) {
            out.omega_is_set = false;
        }
        if h.order_log() - sub.order_log() != om.order_log() {
            out.index_matches = false;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Uniserial {
    pub holds: bool,
    /// `N > [N,G]M > [N,G,G]M > ... > M`.
    pub series: NormalSeries,
}

/// Whether `[N, G, ..., G] M` descends to `M` in steps of order `p`.
pub fn is_uniserial_mod(pres: &PcPresentation, n: &Subgroup, m: &Subgroup) -> Result<Uniserial> {
    let whole = Subgroup::whole(pres);
    if !m.is_subgroup_of(pres, n) {
        return Err(Error::Usage("uniserial check requires M <= N".into()));
    }
    if !is_normal(pres, n, &whole) || !is_normal(pres, m, &whole) {
        return Err(Error::Hypothesis(
            "uniserial check requires N and M normal in G".into(),
        ));
    }
    let mut terms = vec![n.clone()];
    loop {
        let cur = terms.last().unwrap();
        if cur == m {
            break;
        }
        let next = join(pres, &[&commutator_subgroup(pres, cur, &whole), m]);
        if &next == cur {
            break;
        }
        terms.push(next);
    }
    let series = NormalSeries { terms };
    let holds = series.terms.last() == Some(m) && series.factor_logs().iter().all(|&l| l == 1);
    Ok(Uniserial { holds, series })
}

/// `gamma_i(G) (G')^p`.
pub fn weight_term(pres: &PcPresentation, i: usize, derived_power: &Subgroup) -> Subgroup {
    join(pres, &[&lower_central(pres, i), derived_power])
}

/// Two-step centraliser of `G_i / G_{i+2}` where `G_i = gamma_i(G) (G')^p`.
pub fn two_step_centralizer(
    pres: &PcPresentation,
    i: usize,
    derived_power: &Subgroup,
) -> Result<Subgroup> {
    let upper = weight_term(pres, i, derived_power);
    let lower = weight_term(pres, i + 2, derived_power);
    condition_subgroup(pres, upper.igs(), &lower)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfParameters {
    pub m: usize,
    pub degree: usize,
}

/// `Some` when `G` has class `m - 1 >= 2` and acts uniserially on `G'`.
pub fn cf_parameters(pres: &PcPresentation) -> Result<Option<CfParameters>> {
    let lcs = lower_central_series(pres);
    let class = lcs.len() - 1;
    if class < 2 {
        return Ok(None);
    }
    let trivial = Subgroup::trivial(pres.n());
    if !is_uniserial_mod(pres, &lcs[1], &trivial)?.holds {
        return Ok(None);
    }
    let m = class + 1;
    let first = condition_subgroup(pres, lcs[1].igs(), lcs.get(3).unwrap_or(&trivial))?;
    let term = |i: usize| -> &Subgroup {
        match i {
            1 => &first,
            _ => lcs.get(i - 1).unwrap_or(&trivial),
        }
    };
    let holds = |k: usize| {
        (1..=class).all(|i| {
            (i..=class).all(|j| {
                let c = commutator_subgroup(pres, term(i), term(j));
                c.is_subgroup_of(pres, term(i + j + k))
            })
        })
    };
    let degree = (0..=m - 2).rev().find(|&k| holds(k)).unwrap_or(0);
    Ok(Some(CfParameters { m, degree }))
}

/// A series from `L` down to `N` whose factors are chief factors of `G`.
///
/// Each next term is `S <b_1, ..., b_{r-1}>` where `S = [cur, G] cur^p N` and
/// `b_1, ..., b_r` are the igs elements of `cur` at depths missing from `S`.
pub fn chief_refinement(pres: &PcPresentation, l: &Subgroup, n: &Subgroup) -> Result<NormalSeries> {
    let whole = Subgroup::whole(pres);
    if !n.is_subgroup_of(pres, l) {
        return Err(Error::Usage("chief refinement requires N <= L".into()));
    }
    if !is_normal(pres, n, &whole) || !is_normal(pres, l, &whole) {
        return Err(Error::Hypothesis(
            "chief refinement requires L and N normal in G".into(),
        ));
    }
    let mut terms = vec![l.clone()];
    while terms.last().unwrap() != n {
        let cur = terms.last().unwrap().clone();
        let mut gens: Vec<Element> = n.igs().to_vec();
        for t in cur.igs() {
            gens.push(pres.pow(t, pres.p() as i64));
            for g in whole.igs() {
                gens.push(pres.comm(t, g));
            }
        }
        let s = closure(pres, &gens);
        let taken: HashSet<usize> = s.depths().into_iter().collect();
        let mut layer: Vec<Element> = cur
            .igs()
            .iter()
            .filter(|t| !taken.contains(&t.depth().unwrap()))
            .cloned()
            .collect();
        layer.pop();
        let mut more = s.igs().to_vec();
        more.extend(layer);
        terms.push(closure(pres, &more));
    }
    Ok(NormalSeries { terms })
}

/// Elements of `h` outside `sub`, one per coset, for small sections.
pub fn coset_representatives(pres: &PcPresentation, h: &Subgroup, sub: &Subgroup) -> Vec<Element> {
    let red = Reducer::new(pres, sub);
    let mut seen = HashSet::new();
    relative_transversal(pres, h, sub)
        .into_iter()
        .filter(|x| seen.insert(red.reduce(x)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pc::PcBuilder;

    fn heisenberg() -> PcPresentation {
        let mut b = PcBuilder::new(5, 3);
        b.comm(1, 0, &[(2, 1)]);
        b.build().unwrap()
    }

    /// Free class-two quotient of exponent 25 on two generators.
    fn wide_commutator() -> PcPresentation {
        let mut b = PcBuilder::new(5, 6);
        b.comm(1, 0, &[(2, 1)])
            .power(0, &[(3, 1)])
            .power(1, &[(4, 1)])
            .power(2, &[(5, 1)])
            .comm(3, 1, &[(5, 4)])
            .comm(4, 0, &[(5, 1)]);
        b.build().unwrap()
    }

    #[test]
    fn heisenberg_series() {
        let h = heisenberg();
        let g = Subgroup::whole(&h);
        assert_eq!(derived_subgroup(&h, &g).order_log(), 1);
        assert_eq!(nilpotency_class(&h), 2);
        assert_eq!(rank(&h, &g), 2);
        assert!(power_subgroup(&h, &g, 1, &Gate::default())
            .unwrap()
            .is_trivial());
        assert!(!is_powerful(&h, &g, &Gate::default()).unwrap());
        assert!(is_potent(&h, &g, &Gate::default()).unwrap());
    }

    #[test]
    fn power_subgroup_sees_commutator_powers() {
        let w = wide_commutator();
        let g = Subgroup::whole(&w);
        let p1 = power_subgroup(&w, &g, 1, &Gate::default()).unwrap();
        assert_eq!(p1.order_log(), 3);
        assert!(p1.contains(&w, &w.generator(5)));
        assert!(is_powerful(&w, &g, &Gate::default()).is_ok());
        assert_eq!(exponent_log(&w, &g, &Gate::default()).unwrap(), 2);
    }

    #[test]
    fn power_abelian_on_abelian() {
        let mut b = PcBuilder::new(5, 3);
        b.power(0, &[(1, 1)]);
        let a = b.build().unwrap();
        let pa = is_power_abelian(&a, &Subgroup::whole(&a), &Gate::default()).unwrap();
        assert!(pa.all());
        assert_eq!(
            omega(&a, &Subgroup::whole(&a), 1, &Gate::default())
                .unwrap()
                .order_log(),
            2
        );
    }

    #[test]
    fn uniserial_and_chief() {
        let h = heisenberg();
        let g = Subgroup::whole(&h);
        let t = Subgroup::trivial(3);
        let u = is_uniserial_mod(&h, &g, &t).unwrap();
        assert!(!u.holds);
        let dg = derived_subgroup(&h, &g);
        assert!(is_uniserial_mod(&h, &dg, &t).unwrap().holds);
        assert!(is_uniserial_mod(&h, &t, &t).unwrap().series.is_empty());
        let c = chief_refinement(&h, &g, &t).unwrap();
        assert_eq!(c.factor_logs(), vec![1, 1, 1]);
        assert!(c.is_chief(&h));
        assert!(chief_refinement(&h, &t, &g).is_err());
        assert_eq!(
            cf_parameters(&h).unwrap(),
            Some(CfParameters { m: 3, degree: 0 })
        );
    }
}
