//! Infinitesimal objects presented by monomial nilpotency ideals, and the
//! polynomial maps between them.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{WeilAlgebra, WeilElement};
use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial};

/// An infinitesimal object `{d in R^n | d_i^{c_i} = 0, relations vanish}`.
///
/// Simplicial objects `D^n{p}` are the case where every cap is 2 and every
/// relation is squarefree. The object with `n = 0` is the point `1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct InfinitesimalObject {
    caps: Vec<u32>,
    relations: Vec<Monomial>,
}

impl InfinitesimalObject {
    /// Builds an object from 1-based, strictly increasing index sequences,
    /// each standing for the squarefree monomial on those variables.
    pub fn new(n: usize, caps: &[u32], relations: &[Vec<usize>]) -> Result<Self> {
        if caps.len() != n {
            return Err(Error::ArityMismatch { expected: n, found: caps.len() });
        }
        let mut monomials = Vec::with_capacity(relations.len());
        for seq in relations {
            if seq.is_empty() {
                return Err(Error::ConstantRelation);
            }
            for &i in seq {
                if i == 0 || i > n {
                    return Err(Error::IndexOutOfRange { index: i, n });
                }
            }
            if seq.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::NonIncreasingSequence(seq.clone()));
            }
            let zero_based: Vec<usize> = seq.iter().map(|i| i - 1).collect();
            monomials.push(Monomial::squarefree(&zero_based));
        }
        Self::from_monomials(caps.to_vec(), monomials)
    }

    /// General constructor: arbitrary (nonconstant) relation monomials.
    pub fn from_monomials(caps: Vec<u32>, relations: Vec<Monomial>) -> Result<Self> {
        let n = caps.len();
        for (var, &cap) in caps.iter().enumerate() {
            if cap < 2 {
                return Err(Error::CapTooSmall { var: var + 1, cap });
            }
        }
        for r in &relations {
            if r.is_one() {
                return Err(Error::ConstantRelation);
            }
            if r.support_len() > n {
                return Err(Error::IndexOutOfRange { index: r.support_len(), n });
            }
        }
        Ok(Self::normalized(caps, relations))
    }

    fn normalized(caps: Vec<u32>, relations: Vec<Monomial>) -> Self {
        let mut rels: Vec<Monomial> = relations
            .into_iter()
            .filter(|r| (0..caps.len()).all(|i| r.exponent(i) < caps[i]))
            .collect();
        rels.sort_by(Monomial::graded_cmp);
        rels.dedup();
        let minimal: Vec<Monomial> = rels
            .iter()
            .filter(|r| !rels.iter().any(|other| other != *r && other.divides(r)))
            .cloned()
            .collect();
        InfinitesimalObject { caps, relations: minimal }
    }

    /// The terminal object `1`.
    pub fn point() -> Self {
        InfinitesimalObject { caps: Vec::new(), relations: Vec::new() }
    }

    /// `D = {d | d^2 = 0}`.
    pub fn d() -> Self {
        Self::power(1)
    }

    /// `D^n`.
    pub fn power(n: usize) -> Self {
        InfinitesimalObject { caps: vec![2; n], relations: Vec::new() }
    }

    /// `D(n)`: all pairwise products vanish.
    pub fn pairwise(n: usize) -> Self {
        let mut rels = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                rels.push(Monomial::squarefree(&[i, j]));
            }
        }
        Self::normalized(vec![2; n], rels)
    }

    /// `D_k = {d | d^{k+1} = 0}`.
    pub fn higher(k: u32) -> Self {
        assert!(k >= 1, "D_k needs k >= 1");
        InfinitesimalObject { caps: vec![k + 1], relations: Vec::new() }
    }

    /// `D^n{p}` from 1-based sequences; panics on malformed input, for
    /// building fixed objects in code.
    pub fn simplicial(n: usize, seqs: &[&[usize]]) -> Self {
        let rels: Vec<Vec<usize>> = seqs.iter().map(|s| s.to_vec()).collect();
        Self::new(n, &vec![2; n], &rels).expect("well-formed simplicial object")
    }

    pub fn n(&self) -> usize {
        self.caps.len()
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn relations(&self) -> &[Monomial] {
        &self.relations
    }

    pub fn is_simplicial(&self) -> bool {
        self.caps.iter().all(|&c| c == 2)
    }

    /// True for `D^n` itself (no relations beyond the squares).
    pub fn is_power(&self) -> bool {
        self.is_simplicial() && self.relations.is_empty()
    }

    /// Generators of the nilpotency ideal: cap powers, then relations.
    pub fn generators(&self) -> Vec<Monomial> {
        let mut gens: Vec<Monomial> = self
            .caps
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut e = vec![0; i + 1];
                e[i] = c;
                Monomial::from_exponents(e)
            })
            .collect();
        gens.extend(self.relations.iter().cloned());
        gens
    }

    /// `D^m{p} (+) D^n{q}`: concatenation with every cross product killed.
    pub fn oplus(&self, other: &Self) -> Result<Self> {
        for obj in [self, other] {
            if !obj.is_simplicial() {
                return Err(Error::NonSimplicial(obj.to_string()));
            }
        }
        let m = self.n();
        let n = other.n();
        let mut rels = self.relations.clone();
        rels.extend(other.relations.iter().map(|r| shift(r, m)));
        for i in 0..m {
            for j in 0..n {
                rels.push(Monomial::squarefree(&[i, j + m]));
            }
        }
        Ok(Self::normalized(vec![2; m + n], rels))
    }

    /// Concatenation without cross relations; dual to the tensor product of
    /// Weil algebras.
    pub fn product(&self, other: &Self) -> Self {
        let m = self.n();
        let mut caps = self.caps.clone();
        caps.extend_from_slice(&other.caps);
        let mut rels = self.relations.clone();
        rels.extend(other.relations.iter().map(|r| shift(r, m)));
        Self::normalized(caps, rels)
    }

    /// Relations as 1-based index sequences, when they are squarefree.
    pub fn relation_sequences(&self) -> Option<Vec<Vec<usize>>> {
        self.relations
            .iter()
            .map(|r| {
                let dense = r.dense(self.n());
                if dense.iter().any(|&e| e > 1) {
                    None
                } else {
                    Some(dense.iter().enumerate().filter(|(_, &e)| e == 1).map(|(i, _)| i + 1).collect())
                }
            })
            .collect()
    }
}

fn shift(m: &Monomial, offset: usize) -> Monomial {
    let mut e = vec![0; offset];
    e.extend_from_slice(&m.dense(m.support_len()));
    Monomial::from_exponents(e)
}

impl fmt::Display for InfinitesimalObject {
    /// Canonical text form, parseable by the script grammar for simplicial
    /// objects and `D_k`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        if n == 1 && self.relations.is_empty() {
            return match self.caps[0] {
                2 => write!(f, "D"),
                c => write!(f, "D_{}", c - 1),
            };
        }
        if self.is_simplicial() {
            if let Some(seqs) = self.relation_sequences() {
                write!(f, "D^{n}")?;
                if !seqs.is_empty() {
                    write!(f, "{{")?;
                    for s in seqs {
                        let parts: Vec<String> = s.iter().map(|i| i.to_string()).collect();
                        write!(f, "({})", parts.join(","))?;
                    }
                    write!(f, "}}")?;
                }
                return Ok(());
            }
        }
        let caps: Vec<String> = self.caps.iter().map(|c| c.to_string()).collect();
        let rels: Vec<String> = self.relations.iter().map(|r| r.render("X")).collect();
        write!(f, "Obj[caps {}; {}]", caps.join(","), rels.join(", "))
    }
}

/// A polynomial "putative mapping" `source -> target`: one component per
/// target variable, each a polynomial in the source variables with zero
/// constant term, sending the target's ideal into the source's.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InfinitesimalMap {
    source: InfinitesimalObject,
    target: InfinitesimalObject,
    components: Vec<Polynomial>,
}

impl InfinitesimalMap {
    /// Validates and builds a map. Components are stored reduced modulo the
    /// source ideal, so equal maps compare equal.
    pub fn new(source: InfinitesimalObject, target: InfinitesimalObject, components: Vec<Polynomial>) -> Result<Self> {
        if components.len() != target.n() {
            return Err(Error::ArityMismatch { expected: target.n(), found: components.len() });
        }
        for (idx, c) in components.iter().enumerate() {
            if c.used_vars() > source.n() {
                return Err(Error::IndexOutOfRange { index: c.used_vars(), n: source.n() });
            }
            if !num_traits::Zero::is_zero(&c.constant_term()) {
                return Err(Error::NonzeroConstantTerm { component: idx + 1 });
            }
        }
        let alg = WeilAlgebra::of(&source);
        let images: Vec<WeilElement> = components.iter().map(|c| WeilElement::from_polynomial(&alg, c)).collect();
        check_generators(&target, &images, &alg)?;
        let components = images.iter().map(WeilElement::to_polynomial).collect();
        Ok(InfinitesimalMap { source, target, components })
    }

    pub fn identity(obj: &InfinitesimalObject) -> Self {
        let n = obj.n();
        let comps = (0..n).map(|i| Polynomial::var(n, i)).collect();
        Self::new(obj.clone(), obj.clone(), comps).expect("identity is well defined")
    }

    /// The unique map into the point `1`.
    pub fn to_point(obj: &InfinitesimalObject) -> Self {
        Self::new(obj.clone(), InfinitesimalObject::point(), Vec::new()).expect("terminal map")
    }

    /// Embedding of the `i`-th summand into `objs[0] (+) ... (+) objs[last]`.
    pub fn block_embedding(objs: &[InfinitesimalObject], i: usize) -> Result<Self> {
        let total = oplus_all(objs)?;
        let offset: usize = objs[..i].iter().map(InfinitesimalObject::n).sum();
        let src = &objs[i];
        let comps = (0..total.n())
            .map(|j| {
                if j >= offset && j < offset + src.n() {
                    Polynomial::var(src.n(), j - offset)
                } else {
                    Polynomial::zero(src.n())
                }
            })
            .collect();
        Self::new(src.clone(), total, comps)
    }

    pub fn source(&self) -> &InfinitesimalObject {
        &self.source
    }

    pub fn target(&self) -> &InfinitesimalObject {
        &self.target
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &InfinitesimalMap) -> Result<InfinitesimalMap> {
        compose_maps(self, next)
    }

    pub fn render(&self) -> String {
        let comps: Vec<String> = self.components.iter().map(|c| c.render("d")).collect();
        format!("{} -> {} := ({})", self.source, self.target, comps.join(", "))
    }
}

fn check_generators(target: &InfinitesimalObject, images: &[WeilElement], alg: &Arc<WeilAlgebra>) -> Result<()> {
    let one = WeilElement::one(alg);
    for g in target.generators() {
        let residue = Polynomial::from_terms(
            target.n(),
            [(g.clone(), num_traits::One::one())],
        )
        .eval(images, &one);
        if !residue.is_zero() {
            return Err(Error::IllDefinedMap {
                generator: g.render("X"),
                residue: residue.to_polynomial().render("X"),
            });
        }
    }
    Ok(())
}

pub fn oplus_all(objs: &[InfinitesimalObject]) -> Result<InfinitesimalObject> {
    let mut iter = objs.iter();
    let first = iter.next().ok_or(Error::ArityMismatch { expected: 1, found: 0 })?;
    if !first.is_simplicial() {
        return Err(Error::NonSimplicial(first.to_string()));
    }
    iter.try_fold(first.clone(), |acc, o| acc.oplus(o))
}

/// Combines maps with a common target into one map out of the `(+)` of
/// their sources, each acting on its own block of variables.
pub fn combine_maps(maps: &[InfinitesimalMap]) -> Result<InfinitesimalMap> {
    let first = maps.first().ok_or(Error::ArityMismatch { expected: 1, found: 0 })?;
    for m in maps {
        if m.target != first.target {
            return Err(Error::ObjectMismatch { left: first.target.to_string(), right: m.target.to_string() });
        }
    }
    let sources: Vec<InfinitesimalObject> = maps.iter().map(|m| m.source.clone()).collect();
    let source = oplus_all(&sources)?;
    let total = source.n();
    let mut comps = vec![Polynomial::zero(total); first.target.n()];
    let mut offset = 0;
    for m in maps {
        for (slot, c) in comps.iter_mut().zip(&m.components) {
            *slot = slot.add(&c.shifted(total, offset));
        }
        offset += m.source.n();
    }
    InfinitesimalMap::new(source, first.target.clone(), comps)
}

/// `f: A -> B` followed by `g: B -> C`.
pub fn compose_maps(f: &InfinitesimalMap, g: &InfinitesimalMap) -> Result<InfinitesimalMap> {
    if f.target != g.source {
        return Err(Error::ObjectMismatch { left: f.target.to_string(), right: g.source.to_string() });
    }
    let alg = WeilAlgebra::of(&f.source);
    let images: Vec<WeilElement> = f.components.iter().map(|c| WeilElement::from_polynomial(&alg, c)).collect();
    let one = WeilElement::one(&alg);
    let comps = g
        .components
        .iter()
        .map(|c| c.eval(&images, &one).to_polynomial().with_nvars(f.source.n()))
        .collect();
    InfinitesimalMap::new(f.source.clone(), g.target.clone(), comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, Rational};

    fn d(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    #[test]
    fn base_objects() {
        let obj = InfinitesimalObject::new(1, &[2], &[]).unwrap();
        assert_eq!(obj, InfinitesimalObject::d());
        assert_eq!(obj.to_string(), "D");
        let dpair = InfinitesimalObject::new(2, &[2, 2], &[vec![1, 2]]).unwrap();
        assert_eq!(dpair, InfinitesimalObject::pairwise(2));
        assert_eq!(dpair.to_string(), "D^2{(1,2)}");
        assert_eq!(InfinitesimalObject::higher(2).to_string(), "D_2");
        assert_eq!(InfinitesimalObject::point().to_string(), "D^0");
    }

    #[test]
    fn object_e_keeps_its_five_relations() {
        let e = InfinitesimalObject::new(
            4,
            &[2; 4],
            &[vec![1, 3], vec![2, 3], vec![1, 4], vec![2, 4], vec![3, 4]],
        )
        .unwrap();
        assert_eq!(e.relations().len(), 5);
        assert_eq!(e.to_string(), "D^4{(1,3)(1,4)(2,3)(2,4)(3,4)}");
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            InfinitesimalObject::new(2, &[2, 2], &[vec![1, 3]]),
            Err(Error::IndexOutOfRange { index: 3, n: 2 })
        );
        assert_eq!(InfinitesimalObject::new(1, &[1], &[]), Err(Error::CapTooSmall { var: 1, cap: 1 }));
        assert_eq!(
            InfinitesimalObject::new(3, &[2; 3], &[vec![2, 1]]),
            Err(Error::NonIncreasingSequence(vec![2, 1]))
        );
    }

    #[test]
    fn normalization_prunes_redundant_relations() {
        let obj = InfinitesimalObject::new(3, &[2; 3], &[vec![1, 2, 3], vec![1, 2], vec![1, 2]]).unwrap();
        assert_eq!(obj.relations(), &[Monomial::squarefree(&[0, 1])]);
        let again = InfinitesimalObject::from_monomials(obj.caps().to_vec(), obj.relations().to_vec()).unwrap();
        assert_eq!(again, obj);
    }

    #[test]
    fn oplus_examples() {
        let dd = InfinitesimalObject::d().oplus(&InfinitesimalObject::d()).unwrap();
        assert_eq!(dd, InfinitesimalObject::pairwise(2));
        let left = dd.oplus(&InfinitesimalObject::d()).unwrap();
        let right = InfinitesimalObject::d().oplus(&dd).unwrap();
        assert_eq!(left, right);
        assert_eq!(left, InfinitesimalObject::pairwise(3));
        let cubes = InfinitesimalObject::power(3).oplus(&InfinitesimalObject::power(3)).unwrap();
        assert_eq!(cubes.n(), 6);
        assert_eq!(cubes.relations().len(), 9);
        assert!(matches!(
            InfinitesimalObject::higher(2).oplus(&InfinitesimalObject::d()),
            Err(Error::NonSimplicial(_))
        ));
    }

    #[test]
    fn diagonal_into_pairwise_is_valid() {
        let m = InfinitesimalMap::new(InfinitesimalObject::d(), InfinitesimalObject::pairwise(2), vec![d(1, 0), d(1, 0)]);
        assert!(m.is_ok());
    }

    #[test]
    fn product_coordinate_map_is_valid() {
        let target = InfinitesimalObject::simplicial(3, &[&[1, 3], &[2, 3]]);
        let m = InfinitesimalMap::new(
            InfinitesimalObject::power(2),
            target,
            vec![d(2, 0), d(2, 1), d(2, 0).mul(&d(2, 1))],
        );
        assert!(m.is_ok());
    }

    #[test]
    fn sum_map_out_of_square_is_rejected() {
        let err = InfinitesimalMap::new(InfinitesimalObject::power(2), InfinitesimalObject::d(), vec![d(2, 0).add(&d(2, 1))])
            .unwrap_err();
        assert_eq!(
            err,
            Error::IllDefinedMap { generator: "X1^2".into(), residue: "2*X1*X2".into() }
        );
    }

    #[test]
    fn constant_terms_are_rejected() {
        let err = InfinitesimalMap::new(
            InfinitesimalObject::d(),
            InfinitesimalObject::d(),
            vec![d(1, 0).add(&Polynomial::constant(1, int(1)))],
        )
        .unwrap_err();
        assert_eq!(err, Error::NonzeroConstantTerm { component: 1 });
    }

    #[test]
    fn squaring_from_second_order() {
        let m = InfinitesimalMap::new(InfinitesimalObject::higher(2), InfinitesimalObject::d(), vec![d(1, 0).pow(2)]);
        assert!(m.is_ok());
        let bad = InfinitesimalMap::new(InfinitesimalObject::higher(2), InfinitesimalObject::d(), vec![d(1, 0)]);
        assert!(matches!(bad, Err(Error::IllDefinedMap { .. })));
    }

    #[test]
    fn combine_two_identities_is_the_sum() {
        let id = InfinitesimalMap::identity(&InfinitesimalObject::d());
        let sum = combine_maps(&[id.clone(), id.clone()]).unwrap();
        assert_eq!(sum.source(), &InfinitesimalObject::pairwise(2));
        assert_eq!(sum.components(), &[d(2, 0).add(&d(2, 1))]);
        assert_eq!(combine_maps(std::slice::from_ref(&id)).unwrap(), id);
    }

    #[test]
    fn compose_examples() {
        let dpair = InfinitesimalObject::pairwise(2);
        let first = InfinitesimalMap::new(InfinitesimalObject::d(), dpair.clone(), vec![d(1, 0), Polynomial::zero(1)]).unwrap();
        let second = InfinitesimalMap::new(InfinitesimalObject::d(), dpair.clone(), vec![Polynomial::zero(1), d(1, 0)]).unwrap();
        let proj = InfinitesimalMap::new(dpair.clone(), InfinitesimalObject::d(), vec![d(2, 0)]).unwrap();
        assert_eq!(compose_maps(&first, &proj).unwrap(), InfinitesimalMap::identity(&InfinitesimalObject::d()));
        let zero = compose_maps(&second, &proj).unwrap();
        assert!(zero.components()[0].is_zero());
        assert_eq!(compose_maps(&first, &InfinitesimalMap::identity(&dpair)).unwrap(), first);
        assert!(matches!(compose_maps(&proj, &proj), Err(Error::ObjectMismatch { .. })));
    }

    #[test]
    fn block_embeddings_recover_operands() {
        let d1 = InfinitesimalObject::d();
        let a = InfinitesimalMap::new(d1.clone(), d1.clone(), vec![d(1, 0).scale_by(&int(3))]).unwrap();
        let b = InfinitesimalMap::new(d1.clone(), d1.clone(), vec![d(1, 0).scale_by(&Rational::from_integer((-2).into()))]).unwrap();
        let combined = combine_maps(&[a.clone(), b.clone()]).unwrap();
        let objs = [d1.clone(), d1.clone()];
        for (i, op) in [a, b].iter().enumerate() {
            let e = InfinitesimalMap::block_embedding(&objs, i).unwrap();
            assert_eq!(&compose_maps(&e, &combined).unwrap(), op);
        }
    }
}
