//! Builders for the concrete groups and families used by the checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pc::{is_prime, Element, PcBuilder, PcPresentation};

fn word_of(e: &Element, shift: usize) -> Vec<(usize, u32)> {
    e.exponents()
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(k, &x)| (k + shift, x as u32))
        .collect()
}

fn require_prime(p: u32) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::Usage(format!("{p} is not a prime")))
    }
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

pub fn elementary_abelian(p: u32, n: usize) -> Result<PcPresentation> {
    require_prime(p)?;
    PcBuilder::new(p, n).build()
}

/// Extraspecial of order `p^3` and exponent `p`: `[g2, g1] = g3`.
pub fn heisenberg(p: u32) -> Result<PcPresentation> {
    require_prime(p)?;
    let mut b = PcBuilder::new(p, 3);
    b.comm(1, 0, &[(2, 1)]).names(names(&["x", "y", "z"]));
    b.build()
}

/// Extraspecial of order `p^3` and exponent `p^2`, on `(b, a, c)` with `a^p = c = [a, b]`.
pub fn extraspecial_wide(p: u32) -> Result<PcPresentation> {
    require_prime(p)?;
    let mut b = PcBuilder::new(p, 3);
    b.comm(1, 0, &[(2, 1)])
        .power(1, &[(2, 1)])
        .names(names(&["b", "a", "c"]));
    b.build()
}

/// `F_d / gamma_3(F_d) F_d^p` together with the positions of the basic commutators.
#[derive(Debug, Clone)]
pub struct FreeClass2 {
    pub pres: PcPresentation,
    pub d: usize,
    /// `pair_index[&(i, j)]` (`i < j`) is the pc generator equal to `[a_j, a_i]`.
    pub pair_index: BTreeMap<(usize, usize), usize>,
}

impl FreeClass2 {
    /// Alternating matrix of a derived-subgroup element in the basis `[a_j, a_i]`.
    pub fn bivector(&self, c: &Element) -> Result<Vec<Vec<u32>>> {
        let p = self.pres.p();
        if (0..self.d).any(|k| c.get(k) != 0) {
            return Err(Error::Usage(
                "element lies outside the derived subgroup".into(),
            ));
        }
        let mut m = vec![vec![0u32; self.d]; self.d];
        for (&(i, j), &k) in &self.pair_index {
            let e = c.get(k) as u32;
            m[j][i] = e;
            m[i][j] = (p - e) % p;
        }
        Ok(m)
    }

    pub fn generator(&self, i: usize) -> Element {
        self.pres.generator(i)
    }
}

pub fn build_free_class2(p: u32, d: usize) -> Result<FreeClass2> {
    require_prime(p)?;
    if p == 2 {
        return Err(Error::Usage(
            "the free class-two exponent-p quotient needs p odd".into(),
        ));
    }
    if d == 0 {
        return Err(Error::Usage("free class-two quotient needs d >= 1".into()));
    }
    let n = d + d * (d - 1) / 2;
    let mut b = PcBuilder::new(p, n);
    let mut pair_index = BTreeMap::new();
    let mut labels: Vec<String> = (1..=d).map(|i| format!("a{i}")).collect();
    let mut k = d;
    for i in 0..d {
        for j in i + 1..d {
            b.comm(j, i, &[(k, 1)]);
            pair_index.insert((i, j), k);
            labels.push(format!("c{}{}", i + 1, j + 1));
            k += 1;
        }
    }
    b.names(labels);
    Ok(FreeClass2 {
        pres: b.build()?,
        d,
        pair_index,
    })
}

/// The maximal-class group of order `p^6` on `(x, b1, b2, a1, a2, a3)`.
///
/// Conjugation images `g^x` translate to `[g, x] = g^{-1} g^x`.
pub fn build_huppert_example(p: u32) -> Result<PcPresentation> {
    require_prime(p)?;
    if p < 5 {
        return Err(Error::Usage(format!("the example needs p >= 5, got {p}")));
    }
    let m = p - 1;
    let (x, b1, b2, a1, a2, a3) = (0, 1, 2, 3, 4, 5);
    let mut b = PcBuilder::new(p, 6);
    b.comm(b1, x, &[(b2, m)])
        .comm(b2, x, &[(a1, m)])
        .comm(a1, x, &[(a2, m)])
        .comm(a1, b1, &[(a3, m)])
        .comm(a2, b1, &[(a3, 1)])
        .comm(a1, b2, &[(a3, m)])
        .names(names(&["x", "b1", "b2", "a1", "a2", "a3"]));
    b.build()
}

/// `base ⋊ top`, with the top generators placed first.
///
/// `action[i][k]` is the image of base generator `k` under conjugation by
/// top generator `i`. Each image must differ from its generator only at
/// deeper base generators.
pub fn build_semidirect(
    base: &PcPresentation,
    top: &PcPresentation,
    action: &[Vec<Element>],
) -> Result<PcPresentation> {
    if base.p() != top.p() {
        return Err(Error::Usage("base and top have different primes".into()));
    }
    if action.len() != top.n() || action.iter().any(|row| row.len() != base.n()) {
        return Err(Error::Usage(
            "action table must give an image for every base generator under every top generator"
                .into(),
        ));
    }
    let (m, n) = (top.n(), base.n());
    for (i, row) in action.iter().enumerate() {
        check_automorphism(base, row).map_err(|reason| Error::Malformed {
            relation: format!("action of top generator {}", i + 1),
            reason,
        })?;
    }
    let mut b = PcBuilder::new(base.p(), m + n);
    for i in 0..m {
        b.power(i, &word_of(top.power_relation(i), 0));
        for j in i + 1..m {
            b.comm(j, i, &word_of(top.comm_relation(j, i), 0));
        }
    }
    for k in 0..n {
        b.power(m + k, &word_of(base.power_relation(k), m));
        for l in k + 1..n {
            b.comm(m + l, m + k, &word_of(base.comm_relation(l, k), m));
        }
        for (i, row) in action.iter().enumerate() {
            let tail = base.mul(&base.inv(&base.generator(k)), &row[k]);
            b.comm(m + k, i, &word_of(&tail, m));
        }
    }
    if let (Some(tn), Some(bn)) = (top.names(), base.names()) {
        b.names(tn.iter().chain(bn).cloned().collect());
    }
    b.build()
}

/// Images of the base generators under the `e`-th power of an action.
pub fn action_power(base: &PcPresentation, images: &[Element], e: u32) -> Vec<Element> {
    let mut cur: Vec<Element> = base.generators();
    for _ in 0..e {
        cur = cur.iter().map(|a| apply(base, images, a)).collect();
    }
    cur
}

fn apply(base: &PcPresentation, images: &[Element], a: &Element) -> Element {
    let mut out = base.identity();
    for (k, &e) in a.exponents().iter().enumerate() {
        if e != 0 {
            out = base.mul(&out, &base.pow(&images[k], e as i64));
        }
    }
    out
}

fn check_automorphism(
    base: &PcPresentation,
    images: &[Element],
) -> std::result::Result<(), String> {
    for (k, img) in images.iter().enumerate() {
        let tail = base.mul(&base.inv(&base.generator(k)), img);
        if tail.depth().is_some_and(|d| d <= k) {
            return Err(format!(
                "image of base generator {} is not of the form g{} times deeper generators",
                k + 1,
                k + 1
            ));
        }
    }
    for k in 0..base.n() {
        let lhs = base.pow(&images[k], base.p() as i64);
        if lhs != apply(base, images, base.power_relation(k)) {
            return Err(format!(
                "power relation of base generator {} is not preserved",
                k + 1
            ));
        }
        for l in k + 1..base.n() {
            let lhs = base.comm(&images[l], &images[k]);
            if lhs != apply(base, images, base.comm_relation(l, k)) {
                return Err(format!(
                    "commutator relation [g{}, g{}] is not preserved",
                    l + 1,
                    k + 1
                ));
            }
        }
    }
    Ok(())
}

/// The same maximal-class group assembled as `(A ⋊ B) ⋊ X`.
pub fn huppert_via_semidirect(p: u32) -> Result<PcPresentation> {
    require_prime(p)?;
    if p < 5 {
        return Err(Error::Usage(format!("the example needs p >= 5, got {p}")));
    }
    let el = |n: usize, pairs: &[(usize, u8)]| {
        let mut v = vec![0u8; n];
        for &(k, e) in pairs {
            v[k] = e;
        }
        Element::from_exponents(&v)
    };
    let m = (p - 1) as u8;
    let mut ab = PcBuilder::new(p, 3);
    ab.names(names(&["a1", "a2", "a3"]));
    let a = ab.build()?;
    let mut bb = PcBuilder::new(p, 2);
    bb.names(names(&["b1", "b2"]));
    let bgrp = bb.build()?;
    let by_b1 = vec![
        el(3, &[(0, 1), (2, m)]),
        el(3, &[(1, 1), (2, 1)]),
        el(3, &[(2, 1)]),
    ];
    let by_b2 = vec![el(3, &[(0, 1), (2, m)]), el(3, &[(1, 1)]), el(3, &[(2, 1)])];
    let y = build_semidirect(&a, &bgrp, &[by_b1, by_b2])?;
    let mut xb = PcBuilder::new(p, 1);
    xb.names(names(&["x"]));
    let x = xb.build()?;
    // y generators: b1, b2, a1, a2, a3
    let by_x = vec![
        el(5, &[(0, 1), (1, m)]),
        el(5, &[(1, 1), (2, m)]),
        el(5, &[(2, 1), (3, m)]),
        el(5, &[(3, 1)]),
        el(5, &[(4, 1)]),
    ];
    build_semidirect(&y, &x, &[by_x])
}

fn cyclic_p2(p: u32, label: &str) -> Result<PcPresentation> {
    let mut b = PcBuilder::new(p, 2);
    b.power(0, &[(1, 1)])
        .names(vec![label.to_string(), format!("{label}p")]);
    b.build()
}

/// Homocyclic `(C_{p^2})^r` on `(a_1, ..., a_r, a_1^p, ..., a_r^p)`.
fn homocyclic_p2(p: u32, r: usize) -> Result<PcPresentation> {
    let mut b = PcBuilder::new(p, 2 * r);
    let mut labels: Vec<String> = (1..=r).map(|i| format!("a{i}")).collect();
    labels.extend((1..=r).map(|i| format!("a{i}p")));
    for i in 0..r {
        b.power(i, &[(r + i, 1)]);
    }
    b.names(labels);
    b.build()
}

/// `(C_{p^2})^r ⋊ C_{p^2}` where the generator shifts `a_i -> a_i a_{i+1}`.
fn shift_extension(p: u32, r: usize) -> Result<PcPresentation> {
    require_prime(p)?;
    let base = homocyclic_p2(p, r)?;
    let gens = base.generators();
    let mut shift = gens.clone();
    for i in 0..r - 1 {
        shift[i] = base.mul(&gens[i], &gens[i + 1]);
        shift[r + i] = base.mul(&gens[r + i], &gens[r + i + 1]);
    }
    let top = cyclic_p2(p, "x")?;
    let fifth = action_power(&base, &shift, p);
    build_semidirect(&base, &top, &[shift, fifth])
}

/// Order `p^6` with cyclic derived subgroup of order `p^2`.
pub fn semidirect_cyclic(p: u32) -> Result<PcPresentation> {
    shift_extension(p, 2)
}

/// Order `p^8` with derived subgroup `C_{p^2} x C_{p^2}`, powerful and uniserial modulo its `p`-th powers.
pub fn semidirect_powerful(p: u32) -> Result<PcPresentation> {
    shift_extension(p, 3)
}

/// A named group family with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GroupRecipe {
    ElementaryAbelian { p: u32, n: usize },
    Heisenberg { p: u32 },
    Extraspecial { p: u32, exponent_p: bool },
    FreeClass2 { p: u32, d: usize },
    Huppert { p: u32 },
    HuppertSemidirect { p: u32 },
    SemidirectCyclic { p: u32 },
    SemidirectPowerful { p: u32 },
}

impl GroupRecipe {
    pub fn build(&self) -> Result<PcPresentation> {
        match *self {
            GroupRecipe::ElementaryAbelian { p, n } => elementary_abelian(p, n),
            GroupRecipe::Heisenberg { p } => heisenberg(p),
            GroupRecipe::Extraspecial {
                p,
                exponent_p: true,
            } => heisenberg(p),
            GroupRecipe::Extraspecial {
                p,
                exponent_p: false,
            } => extraspecial_wide(p),
            GroupRecipe::FreeClass2 { p, d } => build_free_class2(p, d).map(|f| f.pres),
            GroupRecipe::Huppert { p } => build_huppert_example(p),
            GroupRecipe::HuppertSemidirect { p } => huppert_via_semidirect(p),
            GroupRecipe::SemidirectCyclic { p } => semidirect_cyclic(p),
            GroupRecipe::SemidirectPowerful { p } => semidirect_powerful(p),
        }
    }

    pub fn p(&self) -> u32 {
        match *self {
            GroupRecipe::ElementaryAbelian { p, .. }
            | GroupRecipe::Heisenberg { p }
            | GroupRecipe::Extraspecial { p, .. }
            | GroupRecipe::FreeClass2 { p, .. }
            | GroupRecipe::Huppert { p }
            | GroupRecipe::HuppertSemidirect { p }
            | GroupRecipe::SemidirectCyclic { p }
            | GroupRecipe::SemidirectPowerful { p } => p,
        }
    }

    /// The default corpus at a given prime.
    pub fn corpus(p: u32) -> Vec<GroupRecipe> {
        vec![
            GroupRecipe::ElementaryAbelian { p, n: 3 },
            GroupRecipe::Heisenberg { p },
            GroupRecipe::Extraspecial {
                p,
                exponent_p: false,
            },
            GroupRecipe::FreeClass2 { p, d: 3 },
            GroupRecipe::Huppert { p },
            GroupRecipe::HuppertSemidirect { p },
            GroupRecipe::SemidirectCyclic { p },
            GroupRecipe::SemidirectPowerful { p },
        ]
    }
}

impl fmt::Display for GroupRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupRecipe::ElementaryAbelian { p, n } => write!(f, "abelian(p={p},n={n})"),
            GroupRecipe::Heisenberg { p } => write!(f, "heisenberg(p={p})"),
            GroupRecipe::Extraspecial { p, exponent_p } => {
                write!(
                    f,
                    "extraspecial(p={p},exp={})",
                    if *exponent_p { "p" } else { "p^2" }
                )
            }
            GroupRecipe::FreeClass2 { p, d } => write!(f, "free-class2(p={p},d={d})"),
            GroupRecipe::Huppert { p } => write!(f, "huppert(p={p})"),
            GroupRecipe::HuppertSemidirect { p } => write!(f, "huppert-semidirect(p={p})"),
            GroupRecipe::SemidirectCyclic { p } => write!(f, "semidirect-cyclic(p={p})"),
            GroupRecipe::SemidirectPowerful { p } => write!(f, "semidirect-powerful(p={p})"),
        }
    }
}

impl GroupRecipe {
    /// Parses `family` or `family(key=value,...)`, the form printed by `Display`.
    ///
    /// Keys missing from the spec fall back to `default_p` and `default_d`;
    /// `d` doubles as the rank of `abelian`.
    pub fn from_spec(spec: &str, default_p: u32, default_d: Option<usize>) -> Result<GroupRecipe> {
        let bad = |m: String| Error::Usage(format!("group `{spec}`: {m}"));
        let spec = spec.trim();
        let (family, args) = match spec.split_once('(') {
            Some((f, rest)) => (
                f,
                rest.strip_suffix(')')
                    .ok_or_else(|| bad("missing `)`".into()))?,
            ),
            None => (spec, ""),
        };
        let (mut p, mut d, mut exp_p) = (default_p, default_d, false);
        for kv in args.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, found `{kv}`")))?;
            let num = || {
                v.parse::<usize>()
                    .map_err(|_| bad(format!("`{v}` is not a number")))
            };
            match k.trim() {
                "p" => p = num()? as u32,
                "d" | "n" => d = Some(num()?),
                "exp" => {
                    exp_p = match v {
                        "p" => true,
                        "p^2" => false,
                        _ => return Err(bad(format!("exp must be `p` or `p^2`, found `{v}`"))),
                    }
                }
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        let need_d = || d.ok_or_else(|| bad("needs d".into()));
        Ok(match family {
            "abelian" | "elementary-abelian" => GroupRecipe::ElementaryAbelian {
                p,
                n: d.unwrap_or(2),
            },
            "heisenberg" => GroupRecipe::Heisenberg { p },
            "extraspecial" => GroupRecipe::Extraspecial {
                p,
                exponent_p: exp_p,
            },
            "free-class2" => GroupRecipe::FreeClass2 { p, d: need_d()? },
            "huppert" => GroupRecipe::Huppert { p },
            "huppert-semidirect" => GroupRecipe::HuppertSemidirect { p },
            "semidirect-cyclic" => GroupRecipe::SemidirectCyclic { p },
            "semidirect-powerful" => GroupRecipe::SemidirectPowerful { p },
            other => return Err(bad(format!("unknown family `{other}`"))),
        })
    }
}

impl std::str::FromStr for GroupRecipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupRecipe::from_spec(s, 5, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{lower_central_series, nilpotency_class};

    #[test]
    fn recipe_names_round_trip() {
        for r in GroupRecipe::corpus(7) {
            assert_eq!(r.to_string().parse::<GroupRecipe>().unwrap(), r);
        }
        assert!("free-class2".parse::<GroupRecipe>().is_err());
        assert_eq!(
            GroupRecipe::from_spec("free-class2", 5, Some(4)).unwrap(),
            GroupRecipe::FreeClass2 { p: 5, d: 4 }
        );
    }

    #[test]
    fn huppert_profile() {
        let g = build_huppert_example(5).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(nilpotency_class(&g), 5);
        let orders: Vec<usize> = lower_central_series(&g)
            .iter()
            .map(|s| s.order_log())
            .collect();
        assert_eq!(orders, vec![6, 4, 3, 2, 1, 0]);
        assert!(build_huppert_example(3).is_err());
    }

    #[test]
    fn huppert_power_of_x_b1() {
        let g = build_huppert_example(5).unwrap();
        let xb = g.mul(&g.generator(0), &g.generator(1));
        assert_eq!(g.pow(&xb, 5).exponents(), &[0, 0, 0, 0, 0, 2]);
        let g = build_huppert_example(7).unwrap();
        let xb = g.mul(&g.generator(0), &g.generator(1));
        assert!(g.pow(&xb, 7).is_identity());
    }

    #[test]
    fn semidirect_rebuild_matches() {
        let g = huppert_via_semidirect(5).unwrap();
        assert_eq!(nilpotency_class(&g), 5);
    }

    #[test]
    fn free_class2_orders() {
        assert_eq!(build_free_class2(5, 1).unwrap().pres.n(), 1);
        let f = build_free_class2(5, 3).unwrap();
        assert_eq!(f.pres.n(), 6);
        let c = f.pres.comm(&f.generator(1), &f.generator(0));
        let m = f.bivector(&c).unwrap();
        assert_eq!(m[1][0], 1);
        assert_eq!(m[0][1], 4);
    }

    #[test]
    fn shift_extensions() {
        let c = semidirect_cyclic(5).unwrap();
        assert_eq!(c.n(), 6);
        let w = semidirect_powerful(5).unwrap();
        assert_eq!(w.n(), 8);
    }

    #[test]
    fn semidirect_rejects_non_unipotent_action() {
        let base = elementary_abelian(5, 2).unwrap();
        let top = elementary_abelian(5, 1).unwrap();
        let swap = vec![base.generator(1), base.generator(0)];
        assert!(matches!(
            build_semidirect(&base, &top, &[swap]),
            Err(Error::Malformed { .. })
        ));
        let trivial = base.generators();
        assert_eq!(build_semidirect(&base, &top, &[trivial]).unwrap().n(), 3);
    }
}
