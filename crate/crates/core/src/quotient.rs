use std::sync::Arc;

use crate::error::{Error, Result};
use crate::pc::{Element, PcBuilder, PcPresentation};
use crate::subgroup::{is_normal, Reducer, Subgroup};

/// The natural map `G -> G/N` onto a refined pc presentation of the quotient.
///
/// Quotient generators are the images of the pc generators whose index is
/// not a leading depth of `N`; images are read off canonical coset
/// representatives.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    source: Arc<PcPresentation>,
    kernel: Subgroup,
    target: Arc<PcPresentation>,
    kept: Vec<usize>,
}

impl QuotientMap {
    pub fn source(&self) -> &PcPresentation {
        &self.source
    }

    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    pub fn target(&self) -> &PcPresentation {
        &self.target
    }

    pub fn target_arc(&self) -> Arc<PcPresentation> {
        self.target.clone()
    }

    /// Source generator index behind each target generator.
    pub fn kept_generators(&self) -> &[usize] {
        &self.kept
    }

    pub fn image(&self, a: &Element) -> Element {
        let rep = self.kernel.reduce(&self.source, a);
        self.compress(&rep)
    }

    fn compress(&self, rep: &Element) -> Element {
        let exps: Vec<u8> = self.kept.iter().map(|&k| rep.get(k)).collect();
        Element::from_exponents(&exps)
    }

    /// Images of the source pc generators.
    pub fn generator_images(&self) -> Vec<Element> {
        self.source
            .generators()
            .iter()
            .map(|g| self.image(g))
            .collect()
    }

    /// Section: the canonical coset representative of a target element.
    pub fn lift(&self, b: &Element) -> Element {
        let mut e = self.source.identity();
        for (i, &k) in self.kept.iter().enumerate() {
            e.set(k, b.get(i));
        }
        e
    }

    /// Full preimage of a target subgroup.
    pub fn preimage(&self, h: &Subgroup) -> Subgroup {
        let mut gens: Vec<Element> = h.igs().iter().map(|b| self.lift(b)).collect();
        gens.extend(self.kernel.igs().iter().cloned());
        crate::subgroup::closure(&self.source, &gens)
    }

    /// Image of a source subgroup.
    pub fn image_subgroup(&self, h: &Subgroup) -> Subgroup {
        let gens: Vec<Element> = h.igs().iter().map(|a| self.image(a)).collect();
        crate::subgroup::closure(&self.target, &gens)
    }
}

pub fn quotient(pres: &Arc<PcPresentation>, kernel: &Subgroup) -> Result<QuotientMap> {
    if !is_normal(pres, kernel, &Subgroup::whole(pres)) {
        return Err(Error::Hypothesis(
            "quotient by a non-normal subgroup".into(),
        ));
    }
    let depths = kernel.depths();
    let kept: Vec<usize> = (0..pres.n()).filter(|i| !depths.contains(i)).collect();
    let red = Reducer::new(pres, kernel);
    let read = |e: &Element| -> Vec<(usize, u32)> {
        let rep = red.reduce(e);
        kept.iter()
            .enumerate()
            .filter(|(_, &k)| rep.get(k) != 0)
            .map(|(i, &k)| (i, rep.get(k) as u32))
            .collect()
    };
    let mut b = PcBuilder::new(pres.p(), kept.len());
    for (i, &ki) in kept.iter().enumerate() {
        b.power(i, &read(pres.power_relation(ki)));
        for (j, &kj) in kept.iter().enumerate().skip(i + 1) {
            b.comm(j, i, &read(pres.comm_relation(kj, ki)));
        }
    }
    if let Some(names) = pres.names() {
        b.names(kept.iter().map(|&k| names[k].clone()).collect());
    }
    let target = b.build()?;
    Ok(QuotientMap {
        source: pres.clone(),
        kernel: kernel.clone(),
        target: Arc::new(target),
        kept,
    })
}
