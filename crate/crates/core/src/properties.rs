//! Extensional checks of the power structure of powerful and potent groups.

use serde::{Deserialize, Serialize};

use crate::config::Gate;
use crate::error::{Error, Result};
use crate::pc::{Element, PcPresentation};
use crate::series::{
    derived_subgroup, frattini, is_potent, is_power_abelian, is_powerful, lower_central_series,
    power_subgroup, weight_term,
};
use crate::subgroup::{center, closure, is_normal, relative_transversal, Subgroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Epimorphism {
    pub well_defined: bool,
    pub homomorphism: bool,
    pub surjective: bool,
}

impl Epimorphism {
    pub fn holds(&self) -> bool {
        self.well_defined && self.homomorphism && self.surjective
    }
}

/// The map `U/L -> V/W`, `gL |-> g^p W`, checked element by element.
///
/// `L` must be normal in `U` and `W` normal in `V`.
pub fn power_map_epimorphism(
    pres: &PcPresentation,
    upper: &Subgroup,
    lower: &Subgroup,
    image: &Subgroup,
    image_lower: &Subgroup,
    gate: &Gate,
) -> Result<Epimorphism> {
    if !lower.is_subgroup_of(pres, upper) || !is_normal(pres, lower, upper) {
        return Err(Error::Hypothesis(
            "domain kernel must be normal in the domain".into(),
        ));
    }
    if !image_lower.is_subgroup_of(pres, image) || !is_normal(pres, image_lower, image) {
        return Err(Error::Hypothesis(
            "target kernel must be normal in the target".into(),
        ));
    }
    gate.require_order("power map", pres.p(), upper.order_log())?;
    let p = pres.p() as i64;
    let reps = relative_transversal(pres, upper, lower);
    let image_of = |g: &Element| image_lower.reduce(pres, &pres.pow(g, p));
    let rep_images: Vec<Element> = reps.iter().map(image_of).collect();
    let mut out = Epimorphism {
        well_defined: true,
        homomorphism: true,
        surjective: true,
    };
    let lower_elems = lower.elements(pres);
    'outer: for (t, ti) in reps.iter().zip(&rep_images) {
        if !image.contains(pres, &pres.pow(t, p)) {
            out.well_defined = false;
            break;
        }
        for n in &lower_elems {
            if image_of(&pres.mul(t, n)) != *ti {
                out.well_defined = false;
                break 'outer;
            }
        }
    }
    'hom: for (s, si) in reps.iter().zip(&rep_images) {
        for (t, ti) in reps.iter().zip(&rep_images) {
            if image_of(&pres.mul(s, t)) != image_lower.reduce(pres, &pres.mul(si, ti)) {
                out.homomorphism = false;
                break 'hom;
            }
        }
    }
    let hit: std::collections::HashSet<&Element> = rep_images.iter().collect();
    out.surjective = hit.len() == relative_transversal(pres, image, image_lower).len();
    Ok(out)
}

/// All subspaces of `F_p^r`, each as a list of basis rows in reduced echelon form.
pub fn subspaces(p: u32, r: usize) -> Vec<Vec<Vec<u32>>> {
    fn pivots(r: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for c in start..r {
            cur.push(c);
            pivots(r, k, c + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for k in 0..=r {
        let mut sets = Vec::new();
        pivots(r, k, 0, &mut Vec::new(), &mut sets);
        for piv in sets {
            let free: Vec<(usize, usize)> = piv
                .iter()
                .enumerate()
                .flat_map(|(row, &c)| {
                    ((c + 1)..r)
                        .filter(|d| !piv.contains(d))
                        .map(move |d| (row, d))
                })
                .collect();
            let count = (p as u64).pow(free.len() as u32);
            for mut code in 0..count {
                let mut basis = vec![vec![0u32; r]; k];
                for (row, &c) in piv.iter().enumerate() {
                    basis[row][c] = 1;
                }
                for &(row, d) in &free {
                    basis[row][d] = (code % p as u64) as u32;
                    code /= p as u64;
                }
                out.push(basis);
            }
        }
    }
    out
}

/// Subgroups between `H^p` and `H` for powerful `H`, as lifts of subspaces of `H/H^p`.
fn subgroups_above_power(pres: &PcPresentation, h: &Subgroup, hp: &Subgroup) -> Vec<Subgroup> {
    let depths: Vec<usize> = hp.depths();
    let basis: Vec<&Element> = h
        .igs()
        .iter()
        .filter(|t| !depths.contains(&t.depth().unwrap()))
        .collect();
    subspaces(pres.p(), basis.len())
        .into_iter()
        .map(|rows| {
            let mut gens = hp.igs().to_vec();
            for row in rows {
                let mut g = pres.identity();
                for (t, &c) in basis.iter().zip(&row) {
                    g = pres.mul(&g, &pres.pow(t, c as i64));
                }
                gens.push(g);
            }
            closure(pres, &gens)
        })
        .collect()
}

/// `|L^{p^i} : N^{p^i}| <= |L : N|` for all `H^p <= N <= L <= H`; returns the violations.
pub fn remark_index_violations(
    pres: &PcPresentation,
    h: &Subgroup,
    gate: &Gate,
) -> Result<Vec<String>> {
    let hp = power_subgroup(pres, h, 1, gate)?;
    let r = h.order_log() - hp.order_log();
    if r > 4 {
        return Err(Error::Infeasible {
            what: "subspace enumeration".into(),
            size: format!("rank {r}"),
            gate: 4,
        });
    }
    let subs = subgroups_above_power(pres, h, &hp);
    let mut powers = Vec::with_capacity(subs.len());
    let mut depth = 1;
    while !power_subgroup(pres, h, depth, gate)?.is_trivial() {
        depth += 1;
    }
    for s in &subs {
        let mut row = Vec::new();
        for i in 1..=depth {
            row.push(power_subgroup(pres, s, i, gate)?.order_log());
        }
        powers.push(row);
    }
    let mut bad = Vec::new();
    for (li, l) in subs.iter().enumerate() {
        for (ni, n) in subs.iter().enumerate() {
            if !n.is_subgroup_of(pres, l) {
                continue;
            }
            let idx = l.order_log() - n.order_log();
            for i in 0..depth as usize {
                if powers[li][i] < powers[ni][i] || powers[li][i] - powers[ni][i] > idx {
                    bad.push(format!("L={li} N={ni} i={}", i + 1));
                }
            }
        }
    }
    Ok(bad)
}

/// `|N : N^{p^i}| <= |L : L^{p^i}|` for each pair `N <= L` of the family.
pub fn lemma_index_violations(
    pres: &PcPresentation,
    family: &[Subgroup],
    gate: &Gate,
) -> Result<Vec<String>> {
    let mut cols = Vec::with_capacity(family.len());
    for h in family {
        let mut row = Vec::new();
        let mut i = 1;
        loop {
            let q = power_subgroup(pres, h, i, gate)?;
            row.push(h.order_log() - q.order_log());
            if q.is_trivial() {
                break;
            }
            i += 1;
        }
        cols.push(row);
    }
    let mut bad = Vec::new();
    for (li, l) in family.iter().enumerate() {
        for (ni, n) in family.iter().enumerate() {
            if !n.is_subgroup_of(pres, l) {
                continue;
            }
            for i in 0..cols[ni].len().max(cols[li].len()) {
                let a = cols[ni][i.min(cols[ni].len() - 1)];
                let b = cols[li][i.min(cols[li].len() - 1)];
                if a > b {
                    bad.push(format!("N={ni} L={li} i={}", i + 1));
                }
            }
        }
    }
    Ok(bad)
}

/// Normal subgroups of `G` drawn from the usual series, deduplicated.
pub fn normal_family(pres: &PcPresentation, gate: &Gate) -> Result<Vec<Subgroup>> {
    let whole = Subgroup::whole(pres);
    let mut out: Vec<Subgroup> = Vec::new();
    let mut push = |s: Subgroup| {
        if !out.contains(&s) {
            out.push(s);
        }
    };
    for s in lower_central_series(pres) {
        push(s);
    }
    let derived = derived_subgroup(pres, &whole);
    push(derived_subgroup(pres, &derived));
    push(frattini(pres, &whole));
    push(center(pres));
    let mut i = 1;
    loop {
        let gp = power_subgroup(pres, &whole, i, gate)?;
        let dp = power_subgroup(pres, &derived, i, gate)?;
        push(dp.clone());
        if gp.is_trivial() {
            break;
        }
        push(gp);
        i += 1;
    }
    let dp = power_subgroup(pres, &derived, 1, gate)?;
    for k in 2..pres.n() + 2 {
        push(weight_term(pres, k, &dp));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub instances: usize,
    /// Instances beyond the enumeration gate.
    pub skipped: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerClassReport {
    pub checks: Vec<PropertyCheck>,
}

impl PowerClassReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.failures.is_empty())
    }

    pub fn instances(&self) -> usize {
        self.checks.iter().map(|c| c.instances).sum()
    }
}

/// Power-map epimorphisms `H^{p^{i-1}}/H^{p^i} -> H^{p^i}/H^{p^{i+1}}` for powerful `H`.
pub fn powerful_power_maps(
    pres: &PcPresentation,
    h: &Subgroup,
    gate: &Gate,
) -> Result<PropertyCheck> {
    let mut check = PropertyCheck {
        name: "powerful power map".into(),
        instances: 0,
        skipped: 0,
        failures: Vec::new(),
    };
    let mut layers = vec![h.clone()];
    while !layers.last().unwrap().is_trivial() {
        layers.push(power_subgroup(pres, h, layers.len() as u32, gate)?);
    }
    layers.push(layers.last().unwrap().clone());
    for i in 0..layers.len() - 2 {
        let e = power_map_epimorphism(
            pres,
            &layers[i],
            &layers[i + 1],
            &layers[i + 1],
            &layers[i + 2],
            gate,
        )?;
        check.instances += 1;
        if !e.holds() {
            check.failures.push(format!("layer {}: {e:?}", i + 1));
        }
    }
    Ok(check)
}

/// `G_i/G_{i+1} -> G_i^p/G_{i+1}^p` along the weight series down to `(G')^p`.
pub fn weight_power_maps(pres: &PcPresentation, gate: &Gate) -> Result<PropertyCheck> {
    let whole = Subgroup::whole(pres);
    let derived = derived_subgroup(pres, &whole);
    let dp = power_subgroup(pres, &derived, 1, gate)?;
    let d = derived.order_log() - dp.order_log();
    let mut check = PropertyCheck {
        name: "weight series power map".into(),
        instances: 0,
        skipped: 0,
        failures: Vec::new(),
    };
    for i in 2..=d + 1 {
        let gi = weight_term(pres, i, &dp);
        let gn = weight_term(pres, i + 1, &dp);
        let e = power_map_epimorphism(
            pres,
            &gi,
            &gn,
            &power_subgroup(pres, &gi, 1, gate)?,
            &power_subgroup(pres, &gn, 1, gate)?,
            gate,
        )?;
        check.instances += 1;
        if !e.holds() {
            check.failures.push(format!("G_{i}: {e:?}"));
        }
    }
    Ok(check)
}

/// Runs every check whose hypotheses the group meets.
pub fn power_class_suite(pres: &PcPresentation, gate: &Gate) -> Result<PowerClassReport> {
    let whole = Subgroup::whole(pres);
    let derived = derived_subgroup(pres, &whole);
    let family = normal_family(pres, gate)?;
    let gp = power_subgroup(pres, &whole, 1, gate)?;
    let mut checks = Vec::new();

    let mut powerful: Vec<Subgroup> = Vec::new();
    for h in [&whole, &derived] {
        if is_powerful(pres, h, gate)? && !powerful.contains(h) {
            powerful.push(h.clone());
        }
    }
    let mut maps = PropertyCheck {
        name: "powerful power map".into(),
        instances: 0,
        skipped: 0,
        failures: Vec::new(),
    };
    let mut remark = PropertyCheck {
        name: "powerful index bound".into(),
        instances: 0,
        skipped: 0,
        failures: Vec::new(),
    };
    for h in &powerful {
        let c = powerful_power_maps(pres, h, gate)?;
        maps.instances += c.instances;
        maps.failures.extend(c.failures);
        match remark_index_violations(pres, h, gate) {
            Ok(v) => {
                remark.instances += 1;
                remark.failures.extend(v);
            }
            Err(Error::Infeasible { .. }) => remark.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    checks.push(maps);
    checks.push(remark);

    let mut index = PropertyCheck {
        name: "potent index bound".into(),
        instances: 0,
        skipped: 0,
        failures: Vec::new(),
    };
    let mut potent = PropertyCheck {
        name: "potent normal subgroups".into(),
        instances: 0,
        skipped: 0,
        failures: Vec::new(),
    };
    if is_potent(pres, &whole, gate)? {
        index.instances += 1;
        index
            .failures
            .extend(lemma_index_violations(pres, &family, gate)?);
        for (k, n) in family.iter().enumerate() {
            match is_power_abelian(pres, n, gate) {
                Ok(pa) => {
                    potent.instances += 1;
                    if !pa.all() {
                        potent
                            .failures
                            .push(format!("family member {k} not power abelian"));
                    }
                }
                Err(Error::Infeasible { .. }) => potent.skipped += 1,
                Err(e) => return Err(e),
            }
            if n.is_subgroup_of(pres, &gp) && !is_powerful(pres, n, gate)? {
                potent
                    .failures
                    .push(format!("family member {k} below G^p not powerful"));
            }
        }
    }
    if !derived.is_trivial() && is_potent(pres, &derived, gate)? {
        let inside: Vec<Subgroup> = family
            .iter()
            .filter(|s| s.is_subgroup_of(pres, &derived))
            .cloned()
            .collect();
        index.instances += 1;
        index
            .failures
            .extend(lemma_index_violations(pres, &inside, gate)?);
    }
    checks.push(index);
    checks.push(potent);
    Ok(PowerClassReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_huppert_example, elementary_abelian, semidirect_powerful};

    #[test]
    fn subspace_counts() {
        assert_eq!(subspaces(5, 3).len(), 64);
        assert_eq!(subspaces(3, 2).len(), 6);
    }

    #[test]
    fn abelian_power_maps() {
        let g = elementary_abelian(5, 3).unwrap();
        let r = power_class_suite(&g, &Gate::default()).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!(r.checks[1].instances > 0);
    }

    #[test]
    fn powerful_derived() {
        let g = semidirect_powerful(5).unwrap();
        let r = power_class_suite(&g, &Gate::default()).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!(r.instances() > 2);
    }

    #[test]
    fn huppert_weight_maps() {
        let g = build_huppert_example(5).unwrap();
        let c = weight_power_maps(&g, &Gate::default()).unwrap();
        assert!(c.failures.is_empty(), "{c:?}");
    }
}
