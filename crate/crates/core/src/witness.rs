//! Single-element commutator witnesses, their certificates, and the
//! congruence checks behind them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::commutator::{d_subgroups, k_x};
use crate::config::Gate;
use crate::error::{Error, Result};
use crate::format::presentation_digest;
use crate::pc::{Element, PcPresentation};
use crate::series::{
    chief_refinement, derived_subgroup, frattini, is_powerful, is_uniserial_mod, power_subgroup,
    rank, two_step_centralizer, weight_term, NormalSeries,
};
use crate::subgroup::{closure, is_normal, normal_closure, Reducer, Subgroup};

pub const CERTIFICATE_SCHEMA: u32 = 1;

/// One step of the certificate chain, from `chain.terms[rung]` to `chain.terms[rung + 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RungRecord {
    pub rung: usize,
    /// `i` when the step lies between `p^i`-th powers of the weight series.
    pub level: u32,
    pub commutator: Element,
    pub generates: bool,
    pub normal: bool,
    pub index_p: bool,
    pub covered: bool,
    pub inside_kx: bool,
}

impl RungRecord {
    pub fn ok(&self) -> bool {
        self.generates && self.normal && self.index_p && self.covered && self.inside_kx
    }

    fn first_failure(&self) -> Option<&'static str> {
        [
            (self.normal, "terms not normal in G"),
            (self.index_p, "factor does not have order p"),
            (self.generates, "[x, g] does not generate the factor"),
            (self.covered, "factor not covered by [x, g^e]"),
            (self.inside_kx, "term not contained in K_x(G)"),
        ]
        .into_iter()
        .find(|(ok, _)| !ok)
        .map(|(_, why)| why)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub schema: u32,
    pub digest: String,
    pub witness: Element,
    /// `G' = N_0 > N_1 > ... > 1`.
    pub chain: NormalSeries,
    /// `g_j` for each step.
    pub pairing: Vec<Element>,
    pub levels: Vec<u32>,
    pub verdict: String,
    pub transcript: Vec<RungRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub rungs: Vec<RungRecord>,
    pub first_failure: Option<(usize, String)>,
    pub top_is_derived: bool,
    pub bottom_is_trivial: bool,
    pub final_equality: bool,
}

impl ReplayReport {
    pub fn pass(&self) -> bool {
        self.first_failure.is_none()
            && self.top_is_derived
            && self.bottom_is_trivial
            && self.final_equality
    }
}

fn check_rung(
    pres: &PcPresentation,
    x: &Element,
    upper: &Subgroup,
    lower: &Subgroup,
    partner: &Element,
    kx: &crate::commutator::ElementSet,
    rung: usize,
    level: u32,
) -> RungRecord {
    let whole = Subgroup::whole(pres);
    let c = pres.comm(x, partner);
    let red = Reducer::new(pres, lower);
    let generates = upper.contains(pres, &c) && !red.contains(&c);
    let index_p = lower.is_subgroup_of(pres, upper) && upper.order_log() == lower.order_log() + 1;
    let normal = is_normal(pres, upper, &whole) && is_normal(pres, lower, &whole);
    let mut cosets = std::collections::HashSet::new();
    let mut h = pres.identity();
    let mut inside = true;
    for _ in 0..pres.p() {
        let c = pres.comm(x, &h);
        inside &= upper.contains(pres, &c);
        cosets.insert(red.reduce(&c));
        h = pres.mul(&h, partner);
    }
    let covered = inside && index_p && cosets.len() == pres.p() as usize;
    RungRecord {
        rung,
        level,
        commutator: c,
        generates,
        normal,
        index_p,
        covered,
        inside_kx: kx.contains_subgroup(pres, upper),
    }
}

/// Re-verifies every rung and the final equality `K_x(G) = G'` without searching.
pub fn replay_certificate(
    pres: &PcPresentation,
    cert: &WitnessCertificate,
    gate: &Gate,
) -> Result<ReplayReport> {
    if cert.schema != CERTIFICATE_SCHEMA {
        return Err(Error::Usage(format!(
            "unsupported certificate schema {}",
            cert.schema
        )));
    }
    if cert.digest != presentation_digest(pres) {
        return Err(Error::Usage(
            "certificate was issued for a different presentation".into(),
        ));
    }
    if cert.witness.len() != pres.n()
        || cert.pairing.len() != cert.chain.len()
        || cert.levels.len() != cert.chain.len()
    {
        return Err(Error::Usage("certificate is malformed".into()));
    }
    let terms: Vec<Subgroup> = cert
        .chain
        .terms
        .iter()
        .map(|t| Subgroup::from_generators(pres, t.igs()))
        .collect();
    let x = &cert.witness;
    let kx = k_x(pres, x, gate)?;
    let derived = derived_subgroup(pres, &Subgroup::whole(pres));
    let mut rungs = Vec::new();
    let mut first_failure = None;
    for j in 0..cert.chain.len() {
        let rec = check_rung(
            pres,
            x,
            &terms[j],
            &terms[j + 1],
            &cert.pairing[j],
            &kx,
            j,
            cert.levels[j],
        );
        if first_failure.is_none() {
            if let Some(why) = rec.first_failure() {
                first_failure = Some((j, why.to_string()));
            }
        }
        rungs.push(rec);
    }
    Ok(ReplayReport {
        rungs,
        first_failure,
        top_is_derived: terms.first() == Some(&derived),
        bottom_is_trivial: terms.last().is_some_and(|t| t.is_trivial()),
        final_equality: kx.equals_subgroup(pres, &derived),
    })
}

/// A `(x, g, L, N, k)` instance of the power congruence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallInstance {
    pub x: Element,
    pub g: Element,
    pub l: Subgroup,
    pub n: Subgroup,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallStep {
    pub i: u32,
    pub congruence: bool,
    pub generates: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallReport {
    pub steps: Vec<HallStep>,
}

impl HallReport {
    pub fn pass(&self) -> bool {
        self.steps.iter().all(|s| s.congruence && s.generates)
    }
}

/// Checks `[x,g]^{p^i} = [x, g^{p^i}]` modulo `N^{p^i}` and
/// `L^{p^i} = <[x, g^{p^i}]> N^{p^i}` for every `i` up to the exponent of `L`.
///
/// Fails with [`Error::Hypothesis`] when the instance does not satisfy the
/// hypotheses, so vacuous instances are never reported as passes.
pub fn hall_congruence_check(
    pres: &PcPresentation,
    inst: &HallInstance,
    gate: &Gate,
) -> Result<HallReport> {
    let HallInstance { x, g, l, n, k } = inst;
    let p = pres.p();
    let whole = Subgroup::whole(pres);
    let miss = |what: &str| Err(Error::Hypothesis(format!("hypotheses not met: {what}")));
    if p < 3 {
        return miss("p >= 3");
    }
    let derived = derived_subgroup(pres, &whole);
    let top = power_subgroup(pres, &derived, *k, gate)?;
    if !is_powerful(pres, &top, gate)? {
        return miss("(G')^{p^k} powerful");
    }
    if !is_normal(pres, l, &whole) || !is_normal(pres, n, &whole) {
        return miss("L and N normal in G");
    }
    let bottom = power_subgroup(pres, &top, 1, gate)?;
    if !(bottom.is_subgroup_of(pres, n)
        && n.is_subgroup_of(pres, l)
        && l.is_subgroup_of(pres, &top))
    {
        return miss("((G')^{p^k})^p <= N <= L <= (G')^{p^k}");
    }
    let d = rank(pres, &top) as u64;
    let pk = (p as u64).pow(*k);
    if d + pk + 1 > pk * p as u64 {
        return miss("d <= p^{k+1} - p^k - 1");
    }
    if !power_subgroup(pres, &whole, *k, gate)?.contains(pres, g) {
        return miss("g in G^{p^k}");
    }
    let c = pres.comm(x, g);
    let mut gens = n.igs().to_vec();
    gens.push(c.clone());
    if &closure(pres, &gens) != l {
        return miss("L = <[x,g]> N");
    }
    let mut steps = Vec::new();
    let mut i = 0;
    loop {
        let li = power_subgroup(pres, l, i, gate)?;
        let ni = power_subgroup(pres, n, i, gate)?;
        let gi = pres.pow_p(g, i);
        let lhs = pres.pow_p(&c, i);
        let rhs = pres.comm(x, &gi);
        let congruence = ni.contains(pres, &pres.mul(&pres.inv(&rhs), &lhs));
        let mut gens = ni.igs().to_vec();
        gens.push(rhs);
        let generates = closure(pres, &gens) == li;
        steps.push(HallStep {
            i,
            congruence,
            generates,
        });
        if li.is_trivial() {
            break;
        }
        i += 1;
    }
    Ok(HallReport { steps })
}

/// The congruence instances carried by a certificate's rungs.
pub fn hall_instances(cert: &WitnessCertificate) -> Vec<HallInstance> {
    (0..cert.chain.len())
        .map(|j| HallInstance {
            x: cert.witness.clone(),
            g: cert.pairing[j].clone(),
            l: cert.chain.terms[j].clone(),
            n: cert.chain.terms[j + 1].clone(),
            k: cert.levels[j],
        })
        .collect()
}

fn random_member<R: Rng>(pres: &PcPresentation, h: &Subgroup, rng: &mut R) -> Element {
    h.igs().iter().fold(pres.identity(), |acc, t| {
        pres.mul(&acc, &pres.pow(t, rng.gen_range(0..pres.p()) as i64))
    })
}

/// Random instances meeting the congruence hypotheses, with `k` in `{0, 1}` and `[x,g]` outside `N`.
///
/// Returns fewer than `count` instances when the attempt budget runs out.
pub fn random_hall_instances(
    pres: &PcPresentation,
    count: usize,
    seed: u64,
    gate: &Gate,
) -> Result<Vec<HallInstance>> {
    let whole = Subgroup::whole(pres);
    let derived = derived_subgroup(pres, &whole);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for attempt in 0..count * 200 {
        if out.len() == count {
            break;
        }
        let k = (attempt % 2) as u32;
        let top = power_subgroup(pres, &derived, k, gate)?;
        let bottom = power_subgroup(pres, &top, 1, gate)?;
        let x = random_member(pres, &whole, &mut rng);
        let g = random_member(pres, &power_subgroup(pres, &whole, k, gate)?, &mut rng);
        let c = pres.comm(&x, &g);
        let mut gens = bottom.igs().to_vec();
        gens.push(random_member(pres, &top, &mut rng));
        gens.extend(pres.generators().iter().map(|t| pres.comm(&c, t)));
        let n = normal_closure(pres, &gens, &whole)?;
        if n.contains(pres, &c) {
            continue;
        }
        let mut lg = n.igs().to_vec();
        lg.push(c);
        let inst = HallInstance {
            x,
            g,
            l: closure(pres, &lg),
            n,
            k,
        };
        match hall_congruence_check(pres, &inst, gate) {
            Ok(_) => out.push(inst),
            Err(Error::Hypothesis(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Searches `g` with `[x, g]` in `upper` but outside `lower`, preferring `preferred`.
fn find_partner(
    pres: &PcPresentation,
    x: &Element,
    upper: &Subgroup,
    lower: &Subgroup,
    preferred: &[Element],
    gate: &Gate,
) -> Result<Option<Element>> {
    let red = Reducer::new(pres, lower);
    let good = |g: &Element| {
        let c = pres.comm(x, g);
        upper.contains(pres, &c) && !red.contains(&c)
    };
    if let Some(g) = preferred
        .iter()
        .chain(pres.generators().iter())
        .find(|g| good(g))
    {
        return Ok(Some(g.clone()));
    }
    gate.require_order("partner search", pres.p(), pres.n())?;
    Ok(Subgroup::whole(pres).elements(pres).into_iter().find(good))
}

struct ChainBuilder<'a> {
    pres: &'a PcPresentation,
    gate: &'a Gate,
    x: Element,
    terms: Vec<Subgroup>,
    pairing: Vec<Element>,
    levels: Vec<u32>,
}

impl ChainBuilder<'_> {
    /// Extends the chain from its last term down to `lower`, using `preferred` first.
    fn descend(&mut self, lower: &Subgroup, preferred: &[Element], level: u32) -> Result<bool> {
        let upper = self.terms.last().unwrap().clone();
        if &upper == lower {
            return Ok(true);
        }
        if !lower.is_subgroup_of(self.pres, &upper) {
            return Ok(false);
        }
        let steps = if upper.order_log() == lower.order_log() + 1 {
            vec![upper.clone(), lower.clone()]
        } else {
            chief_refinement(self.pres, &upper, lower)?.terms
        };
        for w in steps.windows(2) {
            let Some(g) = find_partner(self.pres, &self.x, &w[0], &w[1], preferred, self.gate)?
            else {
                return Ok(false);
            };
            self.terms.push(w[1].clone());
            self.pairing.push(g);
            self.levels.push(level);
        }
        Ok(true)
    }
}

/// Scans for `x` outside `D` and the two-step centralisers, then builds and
/// verifies the certificate chain through the weight series `G_i = gamma_i(G) (G')^p`
/// and its `p`-power layers.
///
/// `relaxed` admits `d <= p + 1` when `(G')^p = 1`.
pub fn find_theorem_b_witness(
    pres: &PcPresentation,
    relaxed: bool,
    gate: &Gate,
) -> Result<WitnessCertificate> {
    let whole = Subgroup::whole(pres);
    let derived = derived_subgroup(pres, &whole);
    let digest = presentation_digest(pres);
    let verdict = "G' = K_x(G)".to_string();
    if derived.is_trivial() {
        let cert = WitnessCertificate {
            schema: CERTIFICATE_SCHEMA,
            digest,
            witness: pres.identity(),
            chain: NormalSeries {
                terms: vec![derived],
            },
            pairing: Vec::new(),
            levels: Vec::new(),
            verdict,
            transcript: Vec::new(),
        };
        return Ok(cert);
    }
    let p = pres.p() as usize;
    let dp = power_subgroup(pres, &derived, 1, gate)?;
    let d = derived.order_log() - dp.order_log();
    let bound = if relaxed && dp.is_trivial() {
        p + 1
    } else {
        p - 1
    };
    if d > bound {
        return Err(Error::Hypothesis(format!("d = {d} exceeds {bound}")));
    }
    if !is_uniserial_mod(pres, &derived, &dp)?.holds {
        return Err(Error::Hypothesis(
            "the action on G' is not uniserial modulo (G')^p".into(),
        ));
    }
    let weights: Vec<Subgroup> = (2..=d + 2).map(|i| weight_term(pres, i, &dp)).collect();
    let ds = d_subgroups(pres, gate)?;
    let cents: Vec<Subgroup> = (2..=d.max(2))
        .map(|i| two_step_centralizer(pres, i, &dp))
        .collect::<Result<_>>()?;
    let excluded: Vec<&Subgroup> = cents.iter().take(d.saturating_sub(1)).collect();
    let phi = frattini(pres, &whole);
    let mut tried = 0usize;
    let mut last_err = String::from("no element outside D and the two-step centralisers");
    for x in phi.transversal(pres).into_iter().skip(1) {
        if ds.contains(pres, &x) || excluded.iter().any(|c| c.contains(pres, &x)) {
            continue;
        }
        tried += 1;
        match build_certificate(pres, &x, &weights, &cents[0], gate, &digest) {
            Ok(cert) => return Ok(cert),
            Err(e) if relaxed => last_err = e.to_string(),
            Err(e) => return Err(Error::WitnessNotFound(format!(
                "candidate x = {x} failed: {e}; d = {d}, |G:D| sets = {:?}, centralisers = {:?}",
                ds.pairs
                    .iter()
                    .map(|(_, s)| pres.n() - s.order_log())
                    .collect::<Vec<_>>(),
                cents
                    .iter()
                    .map(|c| pres.n() - c.order_log())
                    .collect::<Vec<_>>()
            ))),
        }
    }
    Err(Error::WitnessNotFound(format!(
        "{last_err} (candidates tried: {tried}, d = {d})"
    )))
}

fn build_certificate(
    pres: &PcPresentation,
    x: &Element,
    weights: &[Subgroup],
    c2: &Subgroup,
    gate: &Gate,
    digest: &str,
) -> Result<WitnessCertificate> {
    let fail = |what: String| Error::WitnessNotFound(format!("x = {x}: {what}"));
    let mut b = ChainBuilder {
        pres,
        gate,
        x: x.clone(),
        terms: vec![weights[0].clone()],
        pairing: Vec::new(),
        levels: Vec::new(),
    };
    let mut partners = Vec::new();
    for j in 0..weights.len() - 1 {
        let pool: Vec<Element> = if j == 0 {
            c2.igs().to_vec()
        } else {
            weights[j - 1].igs().to_vec()
        };
        let before = b.pairing.len();
        if !b.descend(&weights[j + 1], &pool, 0)? {
            return Err(fail(format!(
                "no partner for step {} of the weight series",
                j + 1
            )));
        }
        partners.push(
            b.pairing
                .get(before)
                .cloned()
                .unwrap_or_else(|| pres.identity()),
        );
    }
    let mut level = 1u32;
    loop {
        let top = b.terms.last().unwrap().clone();
        if top.is_trivial() {
            break;
        }
        let powered: Vec<Subgroup> = weights
            .iter()
            .map(|w| power_subgroup(pres, w, level, gate))
            .collect::<Result<_>>()?;
        if !b.descend(&powered[0], &[], level)? {
            return Err(fail(format!(
                "p-power layer {level} does not continue the chain"
            )));
        }
        for j in 0..powered.len() - 1 {
            let pool = vec![pres.pow_p(&partners[j], level)];
            if !b.descend(&powered[j + 1], &pool, level)? {
                return Err(fail(format!("no partner at layer {level}, step {}", j + 1)));
            }
        }
        if powered[0].is_trivial() || b.terms.last() == Some(&top) {
            if !b.terms.last().unwrap().is_trivial() {
                let trivial = Subgroup::trivial(pres.n());
                if !b.descend(&trivial, &[], level)? {
                    return Err(fail("could not reach the trivial subgroup".into()));
                }
            }
            break;
        }
        level += 1;
    }
    let mut cert = WitnessCertificate {
        schema: CERTIFICATE_SCHEMA,
        digest: digest.to_string(),
        witness: x.clone(),
        chain: NormalSeries { terms: b.terms },
        pairing: b.pairing,
        levels: b.levels,
        verdict: "G' = K_x(G)".into(),
        transcript: Vec::new(),
    };
    let replay = replay_certificate(pres, &cert, gate)?;
    if !replay.pass() {
        return Err(fail(format!("replay failed: {:?}", replay.first_failure)));
    }
    cert.transcript = replay.rungs;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        build_huppert_example, elementary_abelian, semidirect_cyclic, semidirect_powerful,
    };

    #[test]
    fn abelian_gets_trivial_certificate() {
        let a = elementary_abelian(5, 2).unwrap();
        let cert = find_theorem_b_witness(&a, false, &Gate::default()).unwrap();
        assert!(cert.chain.is_empty());
        assert!(replay_certificate(&a, &cert, &Gate::default())
            .unwrap()
            .pass());
    }

    #[test]
    fn huppert_witness_replays() {
        let g = build_huppert_example(5).unwrap();
        let gate = Gate::default();
        let cert = find_theorem_b_witness(&g, false, &gate).unwrap();
        assert_eq!(cert.chain.len(), 4);
        assert!(replay_certificate(&g, &cert, &gate).unwrap().pass());
        let mut bad = cert.clone();
        bad.pairing[2] = g.identity();
        let r = replay_certificate(&g, &bad, &gate).unwrap();
        assert_eq!(r.first_failure.map(|f| f.0), Some(2));
    }

    #[test]
    fn shift_extensions_have_witnesses() {
        let gate = Gate::default();
        for g in [
            semidirect_cyclic(5).unwrap(),
            semidirect_powerful(5).unwrap(),
        ] {
            let cert = find_theorem_b_witness(&g, false, &gate).unwrap();
            assert!(cert.levels.iter().any(|&l| l > 0));
            for inst in hall_instances(&cert) {
                if let Ok(r) = hall_congruence_check(&g, &inst, &gate) {
                    assert!(r.pass());
                }
            }
        }
    }

    #[test]
    fn random_instances_hold() {
        let g = semidirect_powerful(5).unwrap();
        let gate = Gate::default();
        let insts = random_hall_instances(&g, 20, 7, &gate).unwrap();
        assert_eq!(insts.len(), 20);
        assert!(insts.iter().any(|i| i.k == 1));
        for inst in &insts {
            assert!(hall_congruence_check(&g, inst, &gate).unwrap().pass());
        }
    }
}
