//! Commutator sets and the subgroups that control them.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Gate;
use crate::constructions::FreeClass2;
use crate::error::{Error, Result};
use crate::linalg::{nullspace, rank};
use crate::pc::{Element, PcPresentation};
use crate::series::{derived_subgroup, exponent_log, frattini};
use crate::subgroup::{center, closure, condition_subgroup, is_normal, normal_closure, Subgroup};

/// A finite set of normal forms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementSet {
    elems: BTreeSet<Element>,
}

impl ElementSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: Element) -> bool {
        self.elems.insert(a)
    }

    pub fn contains(&self, a: &Element) -> bool {
        self.elems.contains(a)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Element> {
        self.elems.iter()
    }

    pub fn extend(&mut self, other: ElementSet) {
        self.elems.extend(other.elems);
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.elems.is_subset(&other.elems)
    }

    /// Same elements as the subgroup `h`.
    pub fn equals_subgroup(&self, pres: &PcPresentation, h: &Subgroup) -> bool {
        Gate::size(pres.p(), h.order_log()) == Some(self.len() as u128)
            && self.iter().all(|a| h.contains(pres, a))
    }

    /// Every element of `h` lies in the set.
    pub fn contains_subgroup(&self, pres: &PcPresentation, h: &Subgroup) -> bool {
        h.elements(pres).iter().all(|a| self.contains(a))
    }

    /// Closed under right multiplication by `n`.
    pub fn is_union_of_cosets(&self, pres: &PcPresentation, n: &Subgroup) -> bool {
        self.iter()
            .all(|a| n.igs().iter().all(|t| self.contains(&pres.mul(a, t))))
    }
}

impl FromIterator<Element> for ElementSet {
    fn from_iter<I: IntoIterator<Item = Element>>(iter: I) -> Self {
        ElementSet {
            elems: iter.into_iter().collect(),
        }
    }
}

/// Conjugacy class of `x`, by orbit search under the pc generators.
pub fn conjugacy_class(pres: &PcPresentation, x: &Element) -> Vec<Element> {
    let gens = pres.generators();
    let mut seen: HashSet<Element> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(x.clone());
    queue.push_back(x.clone());
    let mut out = Vec::new();
    while let Some(y) = queue.pop_front() {
        for g in &gens {
            let z = pres.conj(&y, g);
            if seen.insert(z.clone()) {
                queue.push_back(z);
            }
        }
        out.push(y);
    }
    out
}

/// `K_x(G) = { [x, g] }`.
pub fn k_x(pres: &PcPresentation, x: &Element, gate: &Gate) -> Result<ElementSet> {
    let derived = derived_subgroup(pres, &Subgroup::whole(pres));
    gate.require_order(
        "commutators with a fixed entry",
        pres.p(),
        derived.order_log(),
    )?;
    let xi = pres.inv(x);
    Ok(conjugacy_class(pres, x)
        .iter()
        .map(|y| pres.mul(&xi, y))
        .collect())
}

/// `K(G)` when `x` is `None`, otherwise `K_x(G)`.
///
/// The full set is the union of `x^{-1} x^G` over a transversal of the
/// centre; the work is bounded by the number of central coset pairs.
pub fn k_set(pres: &PcPresentation, x: Option<&Element>, gate: &Gate) -> Result<ElementSet> {
    if let Some(x) = x {
        return k_x(pres, x, gate);
    }
    let z = center(pres);
    gate.require_pairs("commutator set", pres.p(), pres.n() - z.order_log())?;
    let reps = z.transversal(pres);
    Ok(reps
        .par_iter()
        .map(|x| {
            let xi = pres.inv(x);
            conjugacy_class(pres, x)
                .iter()
                .map(|y| pres.mul(&xi, y))
                .collect::<ElementSet>()
        })
        .reduce(ElementSet::new, |mut a, b| {
            a.extend(b);
            a
        }))
}

/// `K(G)` by brute force over all pairs of central coset representatives.
pub fn k_set_pairs(pres: &PcPresentation, gate: &Gate) -> Result<ElementSet> {
    let z = center(pres);
    gate.require_pairs("commutator pairs", pres.p(), pres.n() - z.order_log())?;
    let reps = z.transversal(pres);
    Ok(reps
        .par_iter()
        .map(|x| reps.iter().map(|y| pres.comm(x, y)).collect::<ElementSet>())
        .reduce(ElementSet::new, |mut a, b| {
            a.extend(b);
            a
        }))
}

/// Whether `c` is a commutator in a free class-two exponent-`p` quotient:
/// true iff its alternating matrix has rank at most 2.
pub fn decomposable_rank_oracle(group: &FreeClass2, c: &Element) -> Result<bool> {
    let m = group.bivector(c)?;
    Ok(rank(&m, group.pres.p()) <= 2)
}

/// The subgroups `D(T)` for every maximal `T < G'` containing `Phi(G')` and normal in `G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DSubgroups {
    /// `(T, D(T))`
    pub pairs: Vec<(Subgroup, Subgroup)>,
}

impl DSubgroups {
    /// Membership in the union `D`.
    pub fn contains(&self, pres: &PcPresentation, x: &Element) -> bool {
        self.pairs.iter().any(|(_, d)| d.contains(pres, x))
    }

    pub fn to_element_set(&self, pres: &PcPresentation, gate: &Gate) -> Result<ElementSet> {
        let mut out = ElementSet::new();
        for (_, d) in &self.pairs {
            gate.require_order("union of D(T)", pres.p(), d.order_log())?;
            out.extend(d.elements(pres).into_iter().collect());
        }
        Ok(out)
    }
}

/// Normal subgroups between `bottom` and `top` of index `p` in `top`,
/// when `top / bottom` is elementary abelian.
pub fn normal_hyperplanes(
    pres: &PcPresentation,
    top: &Subgroup,
    bottom: &Subgroup,
    gate: &Gate,
) -> Result<Vec<Subgroup>> {
    let p = pres.p();
    let taken: HashSet<usize> = bottom.depths().into_iter().collect();
    let basis: Vec<Element> = top
        .igs()
        .iter()
        .filter(|t| !taken.contains(&t.depth().unwrap()))
        .cloned()
        .collect();
    let r = basis.len();
    let count = (Gate::size(p, r).unwrap_or(u128::MAX) - 1) / (p as u128 - 1);
    if count > gate.max_order {
        return Err(Error::Infeasible {
            what: "hyperplane enumeration".into(),
            size: format!("({p}^{r}-1)/({p}-1)"),
            gate: gate.max_order,
        });
    }
    let whole = Subgroup::whole(pres);
    let mut out = Vec::new();
    for f in normalized_vectors(r, p) {
        let mut gens = bottom.igs().to_vec();
        for v in nullspace(&[f], r, p) {
            let mut e = pres.identity();
            for (b, &k) in basis.iter().zip(&v) {
                if k != 0 {
                    e = pres.mul(&e, &pres.pow(b, k as i64));
                }
            }
            gens.push(e);
        }
        let t = closure(pres, &gens);
        if is_normal(pres, &t, &whole) {
            out.push(t);
        }
    }
    Ok(out)
}

/// Nonzero vectors of `F_p^r` whose first nonzero entry is 1.
fn normalized_vectors(r: usize, p: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for lead in 0..r {
        let tail = r - lead - 1;
        let total = (p as u64).pow(tail as u32);
        for mut code in 0..total {
            let mut v = vec![0u32; r];
            v[lead] = 1;
            for k in (lead + 1..r).rev() {
                v[k] = (code % p as u64) as u32;
                code /= p as u64;
            }
            out.push(v);
        }
    }
    out
}

pub fn d_subgroups(pres: &PcPresentation, gate: &Gate) -> Result<DSubgroups> {
    let whole = Subgroup::whole(pres);
    let derived = derived_subgroup(pres, &whole);
    if derived.is_trivial() {
        return Err(Error::Hypothesis(
            "D is only defined for non-abelian groups".into(),
        ));
    }
    let phi = frattini(pres, &derived);
    let gens = pres.generators();
    let pairs = normal_hyperplanes(pres, &derived, &phi, gate)?
        .into_iter()
        .map(|t| {
            let d = condition_subgroup(pres, &gens, &t)?;
            Ok((t, d))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DSubgroups { pairs })
}

/// `[x, G]`, the normal closure of the `[x, g_i]`.
pub fn commutators_with(pres: &PcPresentation, x: &Element) -> Subgroup {
    let whole = Subgroup::whole(pres);
    let gens: Vec<Element> = pres.generators().iter().map(|g| pres.comm(x, g)).collect();
    normal_closure(pres, &gens, &whole).expect("commutators lie in G")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaDReport {
    pub elements_checked: usize,
    pub hyperplanes: usize,
    /// `x` with `[x, G] = G'` disagreeing with `x` outside `D`.
    pub mismatches: Vec<Element>,
    pub frattini_inside_every_d: bool,
    pub index_logs: Vec<usize>,
    pub even_indices: bool,
}

impl LemmaDReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty() && self.frattini_inside_every_d && self.even_indices
    }
}

/// Checks `[x, G] = G'` iff `x` is outside `D`, for every `x`, and the
/// structure of each `D(T)`.
pub fn verify_lemma_d(pres: &PcPresentation, gate: &Gate) -> Result<LemmaDReport> {
    gate.require_order("Lemma D sweep", pres.p(), pres.n())?;
    let whole = Subgroup::whole(pres);
    let derived = derived_subgroup(pres, &whole);
    let ds = d_subgroups(pres, gate)?;
    let phi = frattini(pres, &whole);
    let elems = whole.elements(pres);
    let mismatches: Vec<Element> = elems
        .par_iter()
        .filter(|x| {
            let full = commutators_with(pres, x).order_log() == derived.order_log();
            full == ds.contains(pres, x)
        })
        .cloned()
        .collect();
    let index_logs: Vec<usize> = ds
        .pairs
        .iter()
        .map(|(_, d)| pres.n() - d.order_log())
        .collect();
    Ok(LemmaDReport {
        elements_checked: elems.len(),
        hyperplanes: ds.pairs.len(),
        mismatches,
        frattini_inside_every_d: ds.pairs.iter().all(|(_, d)| phi.is_subgroup_of(pres, d)),
        even_indices: index_logs.iter().all(|l| l % 2 == 0),
        index_logs,
    })
}

/// `X_N = { x : (G/N)' = K_{xN}(G/N) }`.
pub fn x_n_set(pres: &PcPresentation, n: &Subgroup, gate: &Gate) -> Result<ElementSet> {
    let whole = Subgroup::whole(pres);
    if !is_normal(pres, n, &whole) {
        return Err(Error::Hypothesis("X_N needs N normal in G".into()));
    }
    gate.require_order("X_N sweep", pres.p(), pres.n())?;
    let derived = derived_subgroup(pres, &whole);
    let target = crate::subgroup::join(pres, &[&derived, n]).order_log() - n.order_log();
    let elems = whole.elements(pres);
    let hits: Vec<Element> = elems
        .into_par_iter()
        .filter(|x| {
            let c = condition_subgroup(pres, std::slice::from_ref(x), n).expect("N is normal");
            pres.n() - c.order_log() == target
        })
        .collect();
    Ok(hits.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerReport {
    /// `|X_N|` for each term, top first.
    pub sizes: Vec<usize>,
    pub unions_of_cosets: Vec<bool>,
    /// `X_{N_{k+1}} <= X_{N_k}` for consecutive terms.
    pub monotone: Vec<bool>,
}

impl TowerReport {
    pub fn pass(&self) -> bool {
        self.unions_of_cosets
            .iter()
            .chain(&self.monotone)
            .all(|b| *b)
    }
}

/// `X_N` along a descending chain of normal subgroups.
pub fn tower_check(pres: &PcPresentation, tower: &[Subgroup], gate: &Gate) -> Result<TowerReport> {
    if tower.windows(2).any(|w| !w[1].is_subgroup_of(pres, &w[0])) {
        return Err(Error::Usage("tower must be descending".into()));
    }
    let sets = tower
        .iter()
        .map(|n| x_n_set(pres, n, gate))
        .collect::<Result<Vec<_>>>()?;
    Ok(TowerReport {
        sizes: sets.iter().map(ElementSet::len).collect(),
        unions_of_cosets: sets
            .iter()
            .zip(tower)
            .map(|(s, n)| s.is_union_of_cosets(pres, n))
            .collect(),
        monotone: sets.windows(2).map(|w| w[1].is_subset(&w[0])).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HondaReport {
    /// `G'` has exponent at most `p`, so every tested power equals `c` itself.
    pub vacuous: bool,
    pub sampled: usize,
    pub exponents: Vec<u64>,
    pub failures: Vec<(Element, u64)>,
}

impl HondaReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For sampled commutators `c` and `e = 1 (mod p)` below the exponent of
/// `G'`, checks that `c^e` is again a commutator.
pub fn honda_power_check(
    pres: &PcPresentation,
    sample_size: usize,
    seed: u64,
    gate: &Gate,
) -> Result<HondaReport> {
    let p = pres.p() as u64;
    let commutators = k_set(pres, None, gate)?;
    let derived = derived_subgroup(pres, &Subgroup::whole(pres));
    let e = exponent_log(pres, &derived, gate)?;
    let vacuous = e <= 1;
    let bound = if vacuous { p * p } else { p.pow(e) };
    let exponents: Vec<u64> = (0..)
        .map(|j| 1 + j * p)
        .take_while(|&x| x < bound)
        .collect();
    let mut all: Vec<&Element> = commutators.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    all.shuffle(&mut rng);
    all.truncate(sample_size);
    let mut failures = Vec::new();
    for c in &all {
        for &x in &exponents {
            if !commutators.contains(&pres.pow(c, x as i64)) {
                failures.push(((*c).clone(), x));
            }
        }
    }
    Ok(HondaReport {
        vacuous,
        sampled: all.len(),
        exponents,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_free_class2, heisenberg};

    #[test]
    fn heisenberg_commutators() {
        let h = heisenberg(5).unwrap();
        let gate = Gate::default();
        let k = k_set(&h, None, &gate).unwrap();
        assert_eq!(k, k_set_pairs(&h, &gate).unwrap());
        assert_eq!(k.len(), 5);
        let ds = d_subgroups(&h, &gate).unwrap();
        assert_eq!(ds.pairs.len(), 1);
        assert_eq!(ds.pairs[0].1, center(&h));
        assert!(verify_lemma_d(&h, &gate).unwrap().pass());
    }

    #[test]
    fn rank_oracle_on_free_quotient() {
        let f = build_free_class2(5, 4).unwrap();
        let a: Vec<Element> = (0..4).map(|i| f.generator(i)).collect();
        let c12 = f.pres.comm(&a[0], &a[1]);
        let c34 = f.pres.comm(&a[2], &a[3]);
        assert!(decomposable_rank_oracle(&f, &c12).unwrap());
        assert!(!decomposable_rank_oracle(&f, &f.pres.mul(&c12, &c34)).unwrap());
        assert!(decomposable_rank_oracle(&f, &a[0]).is_err());
    }

    #[test]
    fn huppert_tower() {
        let g = crate::constructions::build_huppert_example(5).unwrap();
        let tower = [
            Subgroup::whole(&g),
            crate::series::lower_central(&g, 5),
            Subgroup::trivial(g.n()),
        ];
        let r = tower_check(&g, &tower, &Gate::default()).unwrap();
        assert!(r.pass());
        assert_eq!(r.sizes[0], 15625);
        assert!(r.sizes[2] > 0);
    }

    #[test]
    fn normalized_vector_count() {
        assert_eq!(normalized_vectors(3, 5).len(), 31);
    }
}
