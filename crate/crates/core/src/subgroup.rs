//! Subgroups as canonical induced generating sequences.
//!
//! Because every relative order is `p` and commutator relations are
//! right-supported, the series `G_k = <g_k, ..., g_n>` is a central series
//! with factors of order `p`. A subgroup is stored as the unique sequence
//! with strictly increasing depths, leading exponents 1 and zero exponents
//! at the other leading positions, so equality is structural.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::config::Gate;
use crate::error::{Error, Result};
use crate::linalg::{inv_mod, nullspace};
use crate::pc::{Element, PcPresentation};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subgroup {
    n: usize,
    igs: Vec<Element>,
}

/// Precomputed powers of the igs elements, for repeated coset reduction.
pub struct Reducer<'a> {
    pres: &'a PcPresentation,
    /// `(depth, [t^0, t^1, ..., t^(p-1)])`
    steps: Vec<(usize, Vec<Element>)>,
}

impl<'a> Reducer<'a> {
    pub fn new(pres: &'a PcPresentation, h: &Subgroup) -> Self {
        let p = pres.p() as usize;
        let steps = h
            .igs
            .iter()
            .map(|t| {
                let mut pows = Vec::with_capacity(p);
                let mut acc = pres.identity();
                for _ in 0..p {
                    pows.push(acc.clone());
                    acc = pres.mul(&acc, t);
                }
                (t.depth().expect("igs elements are nontrivial"), pows)
            })
            .collect();
        Reducer { pres, steps }
    }

    /// Canonical representative of the coset `aH`: zero at every leading depth of `H`.
    pub fn reduce(&self, a: &Element) -> Element {
        let p = self.pres.p() as usize;
        let mut a = a.clone();
        for (d, pows) in &self.steps {
            let e = a.get(*d) as usize;
            if e != 0 {
                a = self.pres.mul(&a, &pows[p - e]);
            }
        }
        a
    }

    pub fn contains(&self, a: &Element) -> bool {
        self.reduce(a).is_identity()
    }
}

struct Table<'a> {
    pres: &'a PcPresentation,
    slots: Vec<Option<Vec<Element>>>,
}

impl<'a> Table<'a> {
    fn new(pres: &'a PcPresentation) -> Self {
        Table {
            pres,
            slots: vec![None; pres.n()],
        }
    }

    fn sift(&self, a: &Element) -> Element {
        let p = self.pres.p() as usize;
        let mut a = a.clone();
        while let Some(d) = a.depth() {
            match &self.slots[d] {
                Some(pows) => a = self.pres.mul(&a, &pows[p - a.get(d) as usize]),
                None => break,
            }
        }
        a
    }

    fn insert(&mut self, r: Element) -> Element {
        let p = self.pres.p();
        let d = r.depth().expect("nontrivial");
        let lead = r.get(d) as u32;
        let r = if lead == 1 {
            r
        } else {
            self.pres.pow(&r, inv_mod(lead, p) as i64)
        };
        let mut pows = Vec::with_capacity(p as usize);
        let mut acc = self.pres.identity();
        for _ in 0..p {
            pows.push(acc.clone());
            acc = self.pres.mul(&acc, &r);
        }
        self.slots[d] = Some(pows);
        r
    }

    fn members(&self) -> impl Iterator<Item = &Element> {
        self.slots.iter().flatten().map(|pows| &pows[1])
    }

    fn into_subgroup(self) -> Subgroup {
        let pres = self.pres;
        let p = pres.p() as usize;
        let mut igs: Vec<Element> = self.members().cloned().collect();
        let depths: Vec<usize> = igs.iter().map(|t| t.depth().unwrap()).collect();
        let pows: Vec<Vec<Element>> = self.slots.into_iter().flatten().collect();
        for k in 0..igs.len() {
            for l in k + 1..igs.len() {
                let e = igs[k].get(depths[l]) as usize;
                if e != 0 {
                    igs[k] = pres.mul(&igs[k], &pows[l][p - e]);
                }
            }
        }
        Subgroup { n: pres.n(), igs }
    }
}

/// Closes `gens` under products, `p`-th powers, and conjugation by `conjugators`.
fn close(pres: &PcPresentation, gens: &[Element], conjugators: &[Element]) -> Subgroup {
    let mut table = Table::new(pres);
    let mut queue: Vec<Element> = gens.to_vec();
    while let Some(g) = queue.pop() {
        let r = table.sift(&g);
        if r.is_identity() {
            continue;
        }
        let others: Vec<Element> = table.members().cloned().collect();
        let r = table.insert(r);
        queue.push(pres.pow(&r, pres.p() as i64));
        for t in &others {
            queue.push(pres.comm(&r, t));
        }
        for c in conjugators {
            queue.push(pres.conj(&r, c));
        }
    }
    table.into_subgroup()
}

/// Smallest subgroup containing `gens`.
pub fn closure(pres: &PcPresentation, gens: &[Element]) -> Subgroup {
    close(pres, gens, &[])
}

/// Smallest subgroup containing `gens` and normalised by `ambient`.
pub fn normal_closure(
    pres: &PcPresentation,
    gens: &[Element],
    ambient: &Subgroup,
) -> Result<Subgroup> {
    if let Some(g) = gens.iter().find(|g| !ambient.contains(pres, g)) {
        return Err(Error::Usage(format!(
            "generator {g} does not lie in the ambient subgroup"
        )));
    }
    Ok(close(pres, gens, &ambient.igs))
}

/// Closure of the union of several subgroups.
pub fn join(pres: &PcPresentation, parts: &[&Subgroup]) -> Subgroup {
    let gens: Vec<Element> = parts.iter().flat_map(|h| h.igs.iter().cloned()).collect();
    closure(pres, &gens)
}

/// `[A, B]`, the normal closure of generator commutators in `<A, B>`.
pub fn commutator_subgroup(pres: &PcPresentation, a: &Subgroup, b: &Subgroup) -> Subgroup {
    let mut gens = Vec::new();
    for x in &a.igs {
        for y in &b.igs {
            gens.push(pres.comm(x, y));
        }
    }
    let conjugators: Vec<Element> = a.igs.iter().chain(&b.igs).cloned().collect();
    close(pres, &gens, &conjugators)
}

pub fn is_normal(pres: &PcPresentation, h: &Subgroup, ambient: &Subgroup) -> bool {
    if !h.is_subgroup_of(pres, ambient) {
        return false;
    }
    let red = Reducer::new(pres, h);
    h.igs
        .iter()
        .all(|t| ambient.igs.iter().all(|g| red.contains(&pres.conj(t, g))))
}

/// `log_p |H : K|` for `K <= H`.
pub fn index_log(pres: &PcPresentation, h: &Subgroup, k: &Subgroup) -> Result<usize> {
    if !k.is_subgroup_of(pres, h) {
        return Err(Error::Usage("index requires K <= H".into()));
    }
    Ok(h.order_log() - k.order_log())
}

/// `|H : K|` for `K <= H`.
pub fn index(pres: &PcPresentation, h: &Subgroup, k: &Subgroup) -> Result<u128> {
    let l = index_log(pres, h, k)?;
    Gate::size(pres.p(), l).ok_or_else(|| Error::Usage("index overflows u128".into()))
}

/// Extensional intersection over the smaller operand.
pub fn intersection(
    pres: &PcPresentation,
    h: &Subgroup,
    k: &Subgroup,
    gate: &Gate,
) -> Result<Subgroup> {
    if h.is_subgroup_of(pres, k) {
        return Ok(h.clone());
    }
    if k.is_subgroup_of(pres, h) {
        return Ok(k.clone());
    }
    let (small, big) = if h.order_log() <= k.order_log() {
        (h, k)
    } else {
        (k, h)
    };
    gate.require_order("intersection", pres.p(), small.order_log())?;
    let red = Reducer::new(pres, big);
    let common: Vec<Element> = small
        .elements(pres)
        .into_iter()
        .filter(|a| red.contains(a))
        .collect();
    Ok(closure(pres, &common))
}

/// `HK`, defined when one of the two normalises the other.
pub fn product(pres: &PcPresentation, h: &Subgroup, k: &Subgroup) -> Result<Subgroup> {
    let normalises = |a: &Subgroup, b: &Subgroup| {
        let red = Reducer::new(pres, b);
        b.igs
            .iter()
            .all(|t| a.igs.iter().all(|g| red.contains(&pres.conj(t, g))))
    };
    if !normalises(h, k) && !normalises(k, h) {
        return Err(Error::Hypothesis(
            "neither factor normalises the other".into(),
        ));
    }
    Ok(join(pres, &[h, k]))
}

/// `{z in G : [z, t] in modulus for every t in target_gens}`.
///
/// The modulus must be normal in `G`; the set is then the centraliser of
/// `<target_gens> modulus / modulus` in `G / modulus`. Computed layer by
/// layer down the pc series: on the current candidate subgroup the map
/// `z -> [z, t]` into `G_j M / G_{j+1} M` is a homomorphism, so each layer
/// is a kernel computation over F_p.
pub fn condition_subgroup(
    pres: &PcPresentation,
    target_gens: &[Element],
    modulus: &Subgroup,
) -> Result<Subgroup> {
    let whole = Subgroup::whole(pres);
    if !is_normal(pres, modulus, &whole) {
        return Err(Error::Hypothesis(
            "modulus is not normal in G, so the commutator condition does not define a subgroup"
                .into(),
        ));
    }
    let p = pres.p();
    let red = Reducer::new(pres, modulus);
    let mod_depths: HashSet<usize> = modulus.depths().into_iter().collect();
    let mut current = whole;
    for j in 0..pres.n() {
        if mod_depths.contains(&j) {
            continue;
        }
        let cs = current.igs.clone();
        let cols: Vec<Vec<u32>> = target_gens
            .iter()
            .map(|t| {
                cs.iter()
                    .map(|c| {
                        let r = red.reduce(&pres.comm(c, t));
                        debug_assert!(r.exponents()[..j].iter().all(|&x| x == 0));
                        r.get(j) as u32
                    })
                    .collect()
            })
            .collect();
        if cols.iter().all(|row| row.iter().all(|&x| x == 0)) {
            continue;
        }
        let mut gens = Vec::new();
        for a in nullspace(&cols, cs.len(), p) {
            let mut z = pres.identity();
            for (c, &k) in cs.iter().zip(&a) {
                if k != 0 {
                    z = pres.mul(&z, &pres.pow(c, k as i64));
                }
            }
            gens.push(z);
        }
        for (k, c) in cs.iter().enumerate() {
            gens.push(pres.pow(c, p as i64));
            for d in &cs[k + 1..] {
                gens.push(pres.comm(c, d));
            }
        }
        current = closure(pres, &gens);
    }
    Ok(current)
}

pub fn centralizer(pres: &PcPresentation, elems: &[Element]) -> Subgroup {
    condition_subgroup(pres, elems, &Subgroup::trivial(pres.n()))
        .expect("trivial subgroup is normal")
}

pub fn center(pres: &PcPresentation) -> Subgroup {
    centralizer(pres, &pres.generators())
}

/// Coset representatives of `small` in `big` (`small` normal in `big`):
/// products of the igs elements of `big` at depths that `small` lacks.
pub fn relative_transversal(
    pres: &PcPresentation,
    big: &Subgroup,
    small: &Subgroup,
) -> Vec<Element> {
    let depths: HashSet<usize> = small.depths().into_iter().collect();
    let free: Vec<&Element> = big
        .igs
        .iter()
        .filter(|t| !depths.contains(&t.depth().unwrap()))
        .collect();
    let mut out = vec![pres.identity()];
    for t in free.iter().rev() {
        let mut pows = vec![pres.identity()];
        for _ in 1..pres.p() {
            pows.push(pres.mul(pows.last().unwrap(), t));
        }
        let mut next = Vec::with_capacity(out.len() * pows.len());
        for x in &pows {
            for y in &out {
                next.push(pres.mul(x, y));
            }
        }
        out = next;
    }
    out
}

impl Subgroup {
    pub fn trivial(n: usize) -> Self {
        Subgroup { n, igs: Vec::new() }
    }

    pub fn whole(pres: &PcPresentation) -> Self {
        Subgroup {
            n: pres.n(),
            igs: pres.generators(),
        }
    }

    /// Builds a subgroup from a stored igs, re-closing it so the result is canonical.
    pub fn from_generators(pres: &PcPresentation, gens: &[Element]) -> Self {
        closure(pres, gens)
    }

    pub fn igs(&self) -> &[Element] {
        &self.igs
    }

    pub fn order_log(&self) -> usize {
        self.igs.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.igs.is_empty()
    }

    pub fn depths(&self) -> Vec<usize> {
        self.igs.iter().map(|t| t.depth().unwrap()).collect()
    }

    pub fn contains(&self, pres: &PcPresentation, a: &Element) -> bool {
        Reducer::new(pres, self).contains(a)
    }

    pub fn reduce(&self, pres: &PcPresentation, a: &Element) -> Element {
        Reducer::new(pres, self).reduce(a)
    }

    pub fn is_subgroup_of(&self, pres: &PcPresentation, other: &Subgroup) -> bool {
        if self.order_log() > other.order_log() {
            return false;
        }
        let red = Reducer::new(pres, other);
        self.igs.iter().all(|t| red.contains(t))
    }

    pub fn is_whole(&self) -> bool {
        self.igs.len() == self.n
    }

    /// All elements, as `prod t_k^{e_k}` over the igs.
    pub fn elements(&self, pres: &PcPresentation) -> Vec<Element> {
        let mut out = vec![pres.identity()];
        for t in self.igs.iter().rev() {
            let mut pows = vec![pres.identity()];
            for _ in 1..pres.p() {
                pows.push(pres.mul(pows.last().unwrap(), t));
            }
            let mut next = Vec::with_capacity(out.len() * pows.len());
            for x in &pows {
                for y in &out {
                    next.push(pres.mul(x, y));
                }
            }
            out = next;
        }
        out
    }

    /// Canonical coset representatives of this subgroup in the whole group
    /// (every exponent vector vanishing at the leading depths), lexicographic.
    pub fn transversal(&self, pres: &PcPresentation) -> Vec<Element> {
        let depths: HashSet<usize> = self.depths().into_iter().collect();
        let free: Vec<usize> = (0..pres.n()).filter(|i| !depths.contains(i)).collect();
        let p = pres.p() as u8;
        let mut out = Vec::new();
        let mut e = pres.identity();
        loop {
            out.push(e.clone());
            let mut k = free.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                let pos = free[k];
                if e.get(pos) + 1 < p {
                    e.set(pos, e.get(pos) + 1);
                    break;
                }
                e.set(pos, 0);
            }
        }
    }
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

    #[test]
    fn closure_basics() {
        let h = heisenberg();
        assert!(closure(&h, &[]).is_trivial());
        let g1 = closure(&h, &[h.generator(0)]);
        assert_eq!(g1.order_log(), 1);
        let both = closure(&h, &[h.generator(0), h.generator(1)]);
        assert!(both.is_whole());
        assert_eq!(closure(&h, both.igs()), both);
    }

    #[test]
    fn membership() {
        let h = heisenberg();
        let z = closure(&h, &[h.generator(2)]);
        assert!(z.contains(&h, &h.identity()));
        assert!(!z.contains(&h, &h.generator(0)));
        assert_eq!(center(&h), z);
    }

    #[test]
    fn canonical_form_independent_of_generators() {
        let h = heisenberg();
        let a = Element::from_exponents(&[1, 2, 3]);
        let b = Element::from_exponents(&[0, 0, 1]);
        let s1 = closure(&h, &[a.clone(), b.clone()]);
        let s2 = closure(&h, &[h.mul(&a, &b), h.pow(&b, 3)]);
        assert_eq!(s1, s2);
        assert_eq!(s1.order_log(), 2);
    }

    #[test]
    fn normal_closure_and_normality() {
        let h = heisenberg();
        let g = Subgroup::whole(&h);
        let n = normal_closure(&h, &[h.generator(1)], &g).unwrap();
        assert_eq!(n.order_log(), 2);
        assert!(is_normal(&h, &n, &g));
        assert!(!is_normal(&h, &closure(&h, &[h.generator(1)]), &g));
        assert!(normal_closure(&h, &[h.identity()], &g)
            .unwrap()
            .is_trivial());
    }

    #[test]
    fn product_requires_normalising() {
        let h = heisenberg();
        let a = closure(&h, &[h.generator(0)]);
        let b = closure(&h, &[h.generator(1)]);
        assert!(product(&h, &a, &b).is_err());
        let z = center(&h);
        assert_eq!(product(&h, &a, &z).unwrap().order_log(), 2);
    }

    #[test]
    fn transversal_size() {
        let h = heisenberg();
        let z = center(&h);
        assert_eq!(z.transversal(&h).len(), 25);
        assert_eq!(Subgroup::whole(&h).transversal(&h).len(), 1);
    }
}
