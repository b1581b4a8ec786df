//! Power-commutator presentations with every relative order equal to `p`,
//! and the collector that brings words to normal form.
//!
//! Generators are indexed from 0 internally. Relation words are stored as
//! normal-form exponent vectors; `power[i]` is `g_i^p` and `comm[j][i]`
//! (for `j > i`) is `[g_j, g_i]`. The presentation text format and all
//! user-facing output index generators from 1.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest supported prime.
pub const MAX_PRIME: u32 = 251;

/// An exponent vector in normal form: `g_1^{e_1} ... g_n^{e_n}` with `0 <= e_i < p`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(SmallVec<[u8; 24]>);

impl Element {
    pub fn identity(n: usize) -> Self {
        Element(SmallVec::from_elem(0, n))
    }

    pub fn from_exponents(exps: &[u8]) -> Self {
        Element(SmallVec::from_slice(exps))
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Index of the first nonzero exponent, `None` for the identity.
    pub fn depth(&self) -> Option<usize> {
        self.0.iter().position(|&e| e != 0)
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub(crate) fn set(&mut self, i: usize, e: u8) {
        self.0[i] = e;
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [u8] {
        &mut self.0
    }

    /// Mixed-radix index of this element, when it fits in a `u64`.
    pub fn index(&self, p: u32) -> Option<u64> {
        let mut acc: u64 = 0;
        for &e in self.0.iter() {
            acc = acc.checked_mul(p as u64)?.checked_add(e as u64)?;
        }
        Some(acc)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "g{}^{}", i + 1, e)?;
        }
        Ok(())
    }
}

/// An unreduced word: `(generator, exponent)` pairs, generators 0-based.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Word(pub Vec<(usize, i64)>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn push(&mut self, generator: usize, exponent: i64) -> &mut Self {
        self.0.push((generator, exponent));
        self
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        out.extend_from_slice(&other.0);
        Word(out)
    }
}

impl From<Vec<(usize, i64)>> for Word {
    fn from(v: Vec<(usize, i64)>) -> Self {
        Word(v)
    }
}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Relation data for a presentation that has not been checked yet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcBuilder {
    p: u32,
    n: usize,
    power: Vec<Vec<(usize, u32)>>,
    comm: Vec<Vec<Vec<(usize, u32)>>>,
    names: Option<Vec<String>>,
}

impl PcBuilder {
    /// All relations trivial: the elementary abelian group of order `p^n`.
    pub fn new(p: u32, n: usize) -> Self {
        PcBuilder {
            p,
            n,
            power: vec![Vec::new(); n],
            comm: (0..n).map(|j| vec![Vec::new(); j]).collect(),
            names: None,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sets `g_i^p` to the word `prod g_k^e` (0-based generators).
    pub fn power(&mut self, i: usize, word: &[(usize, u32)]) -> &mut Self {
        self.power[i] = word.to_vec();
        self
    }

    /// Sets `[g_j, g_i]` (`j > i`) to the word `prod g_k^e`.
    pub fn comm(&mut self, j: usize, i: usize, word: &[(usize, u32)]) -> &mut Self {
        assert!(j > i && j < self.n, "comm relation needs j > i");
        self.comm[j][i] = word.to_vec();
        self
    }

    pub fn names(&mut self, names: Vec<String>) -> &mut Self {
        self.names = Some(names);
        self
    }

    fn word_to_element(&self, word: &[(usize, u32)], after: usize, label: &str) -> Result<Element> {
        let mut e = Element::identity(self.n);
        let mut last: Option<usize> = None;
        for &(k, x) in word {
            let malformed = |reason: String| Error::Malformed {
                relation: label.to_string(),
                reason,
            };
            if k >= self.n {
                return Err(malformed(format!("generator g{} out of range", k + 1)));
            }
            if k <= after {
                return Err(malformed(format!(
                    "word involves g{} but must be supported on generators after g{}",
                    k + 1,
                    after + 1
                )));
            }
            if last.is_some_and(|l| k <= l) {
                return Err(malformed(
                    "factors not in increasing generator order".into(),
                ));
            }
            if x >= self.p {
                return Err(malformed(format!(
                    "exponent {x} not reduced modulo {}",
                    self.p
                )));
            }
            last = Some(k);
            e.set(k, x as u8);
        }
        Ok(e)
    }

    fn validated(&self) -> Result<PcPresentation> {
        if !is_prime(self.p) || self.p > MAX_PRIME {
            return Err(Error::Usage(format!(
                "p = {} must be a prime at most {MAX_PRIME}",
                self.p
            )));
        }
        if let Some(names) = &self.names {
            if names.len() != self.n {
                return Err(Error::Usage(format!(
                    "{} generator names given for {} generators",
                    names.len(),
                    self.n
                )));
            }
        }
        let power = (0..self.n)
            .map(|i| self.word_to_element(&self.power[i], i, &format!("g{}^{}", i + 1, self.p)))
            .collect::<Result<Vec<_>>>()?;
        let comm = (0..self.n)
            .map(|j| {
                (0..j)
                    .map(|i| {
                        self.word_to_element(
                            &self.comm[j][i],
                            j,
                            &format!("[g{},g{}]", j + 1, i + 1),
                        )
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PcPresentation::assemble(
            self.p,
            self.n,
            power,
            comm,
            self.names.clone(),
        ))
    }

    /// Runs the overlap tests; on failure the error names the first offending overlap.
    pub fn check_consistency(&self) -> Result<()> {
        self.validated()?.consistency()
    }

    pub fn build(&self) -> Result<PcPresentation> {
        let pres = self.validated()?;
        pres.consistency()?;
        Ok(pres)
    }
}

/// A consistent power-commutator presentation of a group of order `p^n`.
#[derive(Clone, PartialEq, Eq)]
pub struct PcPresentation {
    p: u32,
    n: usize,
    power: Vec<Element>,
    comm: Vec<Vec<Element>>,
    names: Option<Vec<String>>,
    /// `conj_pow[(j * n + i) * p + e] = (g_j^{g_i})^e` for `i < j`.
    conj_pow: Vec<Element>,
    inv_gen: Vec<Element>,
}

impl fmt::Debug for PcPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PcPresentation")
            .field("p", &self.p)
            .field("n", &self.n)
            .finish_non_exhaustive()
    }
}

impl PcPresentation {
    fn assemble(
        p: u32,
        n: usize,
        power: Vec<Element>,
        comm: Vec<Vec<Element>>,
        names: Option<Vec<String>>,
    ) -> Self {
        let mut pres = PcPresentation {
            p,
            n,
            power,
            comm,
            names,
            conj_pow: Vec::new(),
            inv_gen: Vec::new(),
        };
        let mut table = vec![Element::identity(n); n * n * p as usize];
        for j in 0..n {
            for i in 0..j {
                let mut base = pres.comm[j][i].clone();
                base.set(j, 1);
                let mut acc = Element::identity(n);
                for e in 1..p as usize {
                    acc = pres.mul(&acc, &base);
                    table[(j * n + i) * p as usize + e] = acc.clone();
                }
            }
        }
        pres.conj_pow = table;
        pres.inv_gen = (0..n).map(|i| pres.inv(&pres.generator(i))).collect();
        pres
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Number of pc generators; the group has order `p^n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn power_relation(&self, i: usize) -> &Element {
        &self.power[i]
    }

    /// `[g_j, g_i]` for `j > i`.
    pub fn comm_relation(&self, j: usize, i: usize) -> &Element {
        &self.comm[j][i]
    }

    /// Group order, when it fits in a `u128`.
    pub fn order(&self) -> Option<u128> {
        (self.p as u128).checked_pow(self.n as u32)
    }

    /// Rebuilds a builder holding the same relations.
    pub fn to_builder(&self) -> PcBuilder {
        let word = |e: &Element| -> Vec<(usize, u32)> {
            e.exponents()
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(k, &x)| (k, x as u32))
                .collect()
        };
        let mut b = PcBuilder::new(self.p, self.n);
        for i in 0..self.n {
            b.power(i, &word(&self.power[i]));
            for j in i + 1..self.n {
                b.comm(j, i, &word(&self.comm[j][i]));
            }
        }
        if let Some(names) = &self.names {
            b.names(names.clone());
        }
        b
    }

    pub fn identity(&self) -> Element {
        Element::identity(self.n)
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut e = self.identity();
        e.set(i, 1);
        e
    }

    pub fn generators(&self) -> Vec<Element> {
        (0..self.n).map(|i| self.generator(i)).collect()
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        let exps: Vec<u8> = (0..self.n)
            .map(|_| rng.gen_range(0..self.p) as u8)
            .collect();
        Element::from_exponents(&exps)
    }

    /// A word of length 1 to 12 with exponents in `-p..=p`.
    pub fn random_word<R: Rng + ?Sized>(&self, rng: &mut R) -> Word {
        let p = self.p as i64;
        if self.n == 0 {
            return Word::new();
        }
        let len = rng.gen_range(1..=12);
        Word(
            (0..len)
                .map(|_| (rng.gen_range(0..self.n), rng.gen_range(-p..=p)))
                .collect(),
        )
    }

    /// Number of random word pairs `(u, v)` for which collecting `uv` disagrees
    /// with multiplying the collected factors, or `[u, v]` disagrees with `u^-1 v^-1 u v`.
    pub fn collection_mismatches<R: Rng + ?Sized>(&self, pairs: usize, rng: &mut R) -> usize {
        (0..pairs)
            .filter(|_| {
                let (u, v) = (self.random_word(rng), self.random_word(rng));
                let (a, b) = (self.collect(&u), self.collect(&v));
                let joined = self.collect(&u.concat(&v));
                let inv = |w: &Word| Word(w.0.iter().rev().map(|&(g, e)| (g, -e)).collect());
                let comm = self.collect(&inv(&u).concat(&inv(&v)).concat(&u).concat(&v));
                joined != self.mul(&a, &b) || comm != self.comm(&a, &b)
            })
            .count()
    }

    fn push_element(stack: &mut Vec<(u32, u32)>, e: &Element) {
        for (k, &x) in e.exponents().iter().enumerate().rev() {
            if x != 0 {
                stack.push((k as u32, x as u32));
            }
        }
    }

    /// Collection from the left: multiplies the normal form `e` on the right
    /// by the word on `stack` (top of stack is the leftmost factor).
    fn run_collector(&self, e: &mut [u8], stack: &mut Vec<(u32, u32)>) {
        let n = self.n;
        let p = self.p;
        let pu = p as usize;
        while let Some((g, c)) = stack.pop() {
            let g = g as usize;
            if c == 0 {
                continue;
            }
            if e[g + 1..].iter().all(|&x| x == 0) {
                let s = e[g] as u32 + c;
                e[g] = (s % p) as u8;
                for _ in 0..s / p {
                    Self::push_element(stack, &self.power[g]);
                }
                continue;
            }
            // g_{>g} part moves across one copy of g_g as its conjugate.
            if c > 1 {
                stack.push((g as u32, c - 1));
            }
            for j in (g + 1..n).rev() {
                let ej = e[j];
                if ej == 0 {
                    continue;
                }
                e[j] = 0;
                if self.conj_pow.is_empty() {
                    let mut base = self.comm[j][g].clone();
                    base.set(j, 1);
                    for _ in 0..ej {
                        Self::push_element(stack, &base);
                    }
                } else {
                    Self::push_element(stack, &self.conj_pow[(j * n + g) * pu + ej as usize]);
                }
            }
            if e[g] as u32 + 1 == p {
                e[g] = 0;
                Self::push_element(stack, &self.power[g]);
            } else {
                e[g] += 1;
            }
        }
    }

    /// Normal form of an arbitrary word.
    pub fn collect(&self, w: &Word) -> Element {
        let mut e = self.identity();
        let mut stack = Vec::new();
        let reduce = self.order().and_then(|o| i64::try_from(o).ok());
        for &(g, k) in w.0.iter().rev() {
            assert!(g < self.n, "generator index {g} out of range");
            let k = match reduce {
                Some(o) if k.abs() >= o => k % o,
                _ => k,
            };
            if k >= 0 {
                stack.push((g as u32, k as u32));
            } else if self.inv_gen.is_empty() {
                unreachable!("inverse generators are built before any negative word is collected");
            } else {
                for _ in 0..(-k) {
                    Self::push_element(&mut stack, &self.inv_gen[g]);
                }
            }
        }
        self.run_collector(e.as_mut_slice(), &mut stack);
        e
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        assert_eq!(a.len(), self.n, "element from a different presentation");
        assert_eq!(b.len(), self.n, "element from a different presentation");
        let mut e = a.clone();
        let mut stack = Vec::with_capacity(4 * self.n);
        Self::push_element(&mut stack, b);
        self.run_collector(e.as_mut_slice(), &mut stack);
        e
    }

    /// Multiplies `a` on the right by `g_i^k`, `0 <= k`.
    pub fn mul_gen(&self, a: &Element, i: usize, k: u32) -> Element {
        let mut e = a.clone();
        let mut stack = vec![(i as u32, k)];
        self.run_collector(e.as_mut_slice(), &mut stack);
        e
    }

    pub fn inv(&self, a: &Element) -> Element {
        assert_eq!(a.len(), self.n, "element from a different presentation");
        let mut r = a.clone();
        let mut out = self.identity();
        let mut stack = Vec::new();
        while let Some(i) = r.depth() {
            let f = self.p - r.get(i) as u32;
            out.set(i, f as u8);
            stack.push((i as u32, f));
            self.run_collector(r.as_mut_slice(), &mut stack);
        }
        out
    }

    /// `a^k` by square-and-multiply; negative `k` inverts first.
    pub fn pow(&self, a: &Element, k: i64) -> Element {
        if k < 0 {
            return self.pow(&self.inv(a), -k);
        }
        let mut k = k as u64;
        if let Some(o) = self.order().and_then(|o| u64::try_from(o).ok()) {
            k %= o;
        }
        let mut base = a.clone();
        let mut acc = self.identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `a^(p^k)`.
    pub fn pow_p(&self, a: &Element, k: u32) -> Element {
        let mut x = a.clone();
        for _ in 0..k {
            x = self.pow(&x, self.p as i64);
        }
        x
    }

    /// `[a, b] = a^-1 b^-1 a b`.
    pub fn comm(&self, a: &Element, b: &Element) -> Element {
        let ba = self.mul(b, a);
        let ab = self.mul(a, b);
        self.mul(&self.inv(&ba), &ab)
    }

    /// Left-normed `[a_1, a_2, ..., a_k]`.
    pub fn comm_seq(&self, elems: &[Element]) -> Element {
        let mut it = elems.iter();
        let mut acc = it.next().cloned().unwrap_or_else(|| self.identity());
        for b in it {
            acc = self.comm(&acc, b);
        }
        acc
    }

    /// `a^b = b^-1 a b`.
    pub fn conj(&self, a: &Element, b: &Element) -> Element {
        self.mul(&self.inv(b), &self.mul(a, b))
    }

    /// Smallest `k` with `a^(p^k) = 1`.
    pub fn order_log(&self, a: &Element) -> u32 {
        let mut x = a.clone();
        let mut k = 0;
        while !x.is_identity() {
            x = self.pow(&x, self.p as i64);
            k += 1;
        }
        k
    }

    /// The `z` with `(xy)^k = x^k y^k z`.
    pub fn hall_petrescu_defect(&self, x: &Element, y: &Element, k: i64) -> Element {
        let xy_k = self.pow(&self.mul(x, y), k);
        let xk_yk = self.mul(&self.pow(x, k), &self.pow(y, k));
        self.mul(&self.inv(&xk_yk), &xy_k)
    }

    fn gen_power(&self, i: usize, e: u8) -> Element {
        let mut x = self.identity();
        x.set(i, e);
        x
    }

    fn consistency(&self) -> Result<()> {
        match self.first_inconsistent_overlap() {
            None => Ok(()),
            Some((overlap, left, right)) => Err(Error::Inconsistent {
                overlap,
                left: left.exponents().to_vec(),
                right: right.exponents().to_vec(),
            }),
        }
    }

    /// Collects both sides of every overlap word; returns the first disagreement.
    pub(crate) fn first_inconsistent_overlap(&self) -> Option<(String, Element, Element)> {
        let n = self.n;
        let p = self.p;
        let g: Vec<Element> = self.generators();
        let check = |name: String, l: Element, r: Element| {
            if l == r {
                None
            } else {
                Some((name, l, r))
            }
        };
        for k in 0..n {
            for j in 0..k {
                for i in 0..j {
                    let left = self.mul(&self.mul(&g[k], &g[j]), &g[i]);
                    let right = self.mul(&g[k], &self.mul(&g[j], &g[i]));
                    let r = check(format!("g{} g{} g{}", k + 1, j + 1, i + 1), left, right);
                    if r.is_some() {
                        return r;
                    }
                }
            }
        }
        let top = (p - 1) as u8;
        for j in 0..n {
            for i in 0..j {
                let left = self.mul(&self.power[j], &g[i]);
                let right = self.mul(&self.gen_power(j, top), &self.mul(&g[j], &g[i]));
                let r = check(format!("g{}^{} g{}", j + 1, p, i + 1), left, right);
                if r.is_some() {
                    return r;
                }
                let left = self.mul(&g[j], &self.power[i]);
                let right = self.mul(&self.mul(&g[j], &self.gen_power(i, top)), &g[i]);
                let r = check(format!("g{} g{}^{}", j + 1, i + 1, p), left, right);
                if r.is_some() {
                    return r;
                }
            }
        }
        for i in 0..n {
            let left = self.mul(&self.power[i], &g[i]);
            let right = self.mul(&g[i], &self.power[i]);
            let r = check(format!("g{}^{}", i + 1, p + 1), left, right);
            if r.is_some() {
                return r;
            }
        }
        None
    }
}
