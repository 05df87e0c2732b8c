//! Points of the Weil prolongation `R^k (x) W` and polynomial maps acting
//! on them.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{AlgebraHom, Element, WeilAlgebra};
use crate::error::{Error, Result};
use crate::poly::{Coefficient, Evaluate, Polynomial, Rational};

/// `k` coordinates in one Weil algebra.
#[derive(Clone)]
pub struct WeilPoint<C: Coefficient = Rational> {
    algebra: Arc<WeilAlgebra>,
    coords: Vec<Element<C>>,
}

impl<C: Coefficient> WeilPoint<C> {
    pub fn new(algebra: &Arc<WeilAlgebra>, coords: Vec<Element<C>>) -> Result<Self> {
        for c in &coords {
            if c.algebra().object() != algebra.object() {
                return Err(Error::AlgebraMismatch {
                    left: algebra.object().to_string(),
                    right: c.algebra().object().to_string(),
                });
            }
        }
        Ok(WeilPoint { algebra: Arc::clone(algebra), coords })
    }

    /// The point with no infinitesimal part.
    pub fn constant(algebra: &Arc<WeilAlgebra>, base: Vec<C>) -> Self {
        let coords = base.into_iter().map(|b| Element::constant(algebra, b)).collect();
        WeilPoint { algebra: Arc::clone(algebra), coords }
    }

    /// Builds a point from one coefficient vector per basis index.
    pub fn from_components(algebra: &Arc<WeilAlgebra>, k: usize, comps: impl IntoIterator<Item = (usize, Vec<C>)>) -> Self {
        let mut coords = vec![Element::zero(algebra); k];
        for (idx, vec) in comps {
            assert_eq!(vec.len(), k, "component width");
            for (coord, c) in coords.iter_mut().zip(vec) {
                *coord = coord.plus(&Element::basis_term(algebra, idx, c));
            }
        }
        WeilPoint { algebra: Arc::clone(algebra), coords }
    }

    pub fn algebra(&self) -> &Arc<WeilAlgebra> {
        &self.algebra
    }

    pub fn k(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Element<C>] {
        &self.coords
    }

    /// The base point (augmentation of every coordinate).
    pub fn base(&self) -> Vec<C> {
        self.coords.iter().map(Element::augmentation).collect()
    }

    /// The coefficient vector at basis index `idx`.
    pub fn component(&self, idx: usize) -> Vec<C> {
        self.coords.iter().map(|c| c.coeff(idx)).collect()
    }

    /// `id (x) h`, coordinatewise.
    pub fn apply_hom(&self, h: &AlgebraHom) -> Result<Self> {
        let coords = self.coords.iter().map(|c| h.apply(c)).collect::<Result<Vec<_>>>()?;
        Ok(WeilPoint { algebra: Arc::clone(h.codomain()), coords })
    }

    pub fn linear(&self, other: &Self, alpha: &Rational, beta: &Rational) -> Result<Self> {
        if self.k() != other.k() {
            return Err(Error::ArityMismatch { expected: self.k(), found: other.k() });
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.linear(b, alpha, beta))
            .collect::<Result<Vec<_>>>()?;
        Ok(WeilPoint { algebra: Arc::clone(&self.algebra), coords })
    }

    pub fn map_coeffs<D: Coefficient>(&self, mut f: impl FnMut(&C) -> D) -> WeilPoint<D> {
        WeilPoint {
            algebra: Arc::clone(&self.algebra),
            coords: self.coords.iter().map(|c| c.map_coeffs(&mut f)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Element::is_zero)
    }
}

impl<C: Coefficient> PartialEq for WeilPoint<C> {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.object() == other.algebra.object() && self.coords == other.coords
    }
}

impl<C: Coefficient> fmt::Debug for WeilPoint<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<C: Coefficient> fmt::Display for WeilPoint<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(Element::render).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A polynomial map `R^k -> R^m`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMap {
    dom: usize,
    components: Vec<Polynomial>,
}

impl PolyMap {
    pub fn new(dom: usize, components: Vec<Polynomial>) -> Result<Self> {
        for c in &components {
            if c.used_vars() > dom {
                return Err(Error::IndexOutOfRange { index: c.used_vars(), n: dom });
            }
        }
        Ok(PolyMap { dom, components: components.into_iter().map(|c| c.with_nvars(dom)).collect() })
    }

    pub fn identity(k: usize) -> Self {
        PolyMap { dom: k, components: (0..k).map(|i| Polynomial::var(k, i)).collect() }
    }

    pub fn zero(k: usize, m: usize) -> Self {
        PolyMap { dom: k, components: vec![Polynomial::zero(k); m] }
    }

    pub fn dom(&self) -> usize {
        self.dom
    }

    pub fn codom(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    /// Weil prolongation: substitutes the coordinates of `p`.
    pub fn eval_point<C: Coefficient>(&self, p: &WeilPoint<C>) -> Result<WeilPoint<C>> {
        if p.k() != self.dom {
            return Err(Error::ArityMismatch { expected: self.dom, found: p.k() });
        }
        let mut at = Expansion::new(p.algebra(), p.coords());
        let coords = self.components.iter().map(|c| at.eval(c)).collect();
        Ok(WeilPoint { algebra: Arc::clone(p.algebra()), coords })
    }

    pub fn eval_rational(&self, x: &[Rational]) -> Vec<Rational> {
        self.components.iter().map(|c| c.eval_rational(x)).collect()
    }

    /// `self . inner`.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap> {
        if inner.codom() != self.dom {
            return Err(Error::ArityMismatch { expected: self.dom, found: inner.codom() });
        }
        let one = Polynomial::constant(inner.dom, num_traits::One::one());
        let comps = self.components.iter().map(|c| c.eval(&inner.components, &one).with_nvars(inner.dom)).collect();
        Ok(PolyMap { dom: inner.dom, components: comps })
    }

    /// Row `i` holds the partial derivatives of component `i`.
    pub fn jacobian(&self) -> Vec<Vec<Polynomial>> {
        self.components
            .iter()
            .map(|c| (0..self.dom).map(|j| c.derivative(j).with_nvars(self.dom)).collect())
            .collect()
    }

    pub fn add(&self, other: &PolyMap) -> Result<PolyMap> {
        if self.dom != other.dom || self.codom() != other.codom() {
            return Err(Error::ArityMismatch { expected: self.codom(), found: other.codom() });
        }
        let comps = self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect();
        Ok(PolyMap { dom: self.dom, components: comps })
    }

    pub fn scale(&self, factor: &Rational) -> PolyMap {
        PolyMap { dom: self.dom, components: self.components.iter().map(|c| c.scale_by(factor)).collect() }
    }
}

/// Evaluates polynomials at one point of `R^k (x) W` by expanding around
/// its base: `f(p)` is the sum over multi-indices `a` of
/// `(d^a f)(base) n^a / a!` for as long as `n^a` is nonzero. Powers of the
/// nilpotent part are cached across calls.
pub struct Expansion<C: Coefficient> {
    algebra: Arc<WeilAlgebra>,
    bases: Vec<C>,
    nilpotent: Vec<Element<C>>,
    powers: HashMap<Vec<u32>, Element<C>>,
}

impl<C: Coefficient> Expansion<C> {
    pub fn new(algebra: &Arc<WeilAlgebra>, coords: &[Element<C>]) -> Self {
        let bases: Vec<C> = coords.iter().map(Element::augmentation).collect();
        let nilpotent = coords.iter().map(|e| e.plus(&Element::constant(algebra, e.augmentation().negate()))).collect();
        let mut powers = HashMap::new();
        powers.insert(vec![0; coords.len()], Element::one(algebra));
        Expansion { algebra: Arc::clone(algebra), bases, nilpotent, powers }
    }

    pub fn eval(&mut self, f: &Polynomial) -> Element<C> {
        assert!(f.used_vars() <= self.bases.len(), "evaluation needs {} values, got {}", f.used_vars(), self.bases.len());
        let mut acc = Element::zero(&self.algebra);
        let mut exps = vec![0; self.bases.len()];
        self.visit(f, 0, &mut exps, Rational::one_value(), &mut acc);
        acc
    }

    fn visit(&mut self, f: &Polynomial, from: usize, exps: &mut Vec<u32>, weight: Rational, acc: &mut Element<C>) {
        let power = self.powers[exps.as_slice()].clone();
        if power.is_zero() {
            return;
        }
        let value = f.eval(&self.bases, &C::one_value());
        if !value.vanishes() {
            *acc = acc.plus(&power.scale_coeffs(&value.scale(&weight)));
        }
        for i in from..self.nilpotent.len() {
            let df = f.derivative(i);
            if df.is_zero() {
                continue;
            }
            exps[i] += 1;
            if !self.powers.contains_key(exps.as_slice()) {
                let next = power.times(&self.nilpotent[i]);
                self.powers.insert(exps.clone(), next);
            }
            let w = &weight / Rational::from_integer(exps[i].into());
            self.visit(&df, i, exps, w, acc);
            exps[i] -= 1;
        }
    }
}

/// `f` prolonged to `R^k (x) W`.
pub fn prolong_point<C: Coefficient>(f: &PolyMap, p: &WeilPoint<C>) -> Result<WeilPoint<C>> {
    f.eval_point(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::WeilElement;
    use crate::object::InfinitesimalObject;
    use crate::poly::int;

    #[test]
    fn prolong_square_on_dual_numbers() {
        let wd = WeilAlgebra::of(&InfinitesimalObject::d());
        let p = WeilPoint::new(&wd, vec![WeilElement::constant(&wd, int(3)).plus(&WeilElement::variable(&wd, 0))]).unwrap();
        let sq = PolyMap::new(1, vec![Polynomial::var(1, 0).pow(2)]).unwrap();
        assert_eq!(prolong_point(&sq, &p).unwrap().to_string(), "(9 + 6*X1)");
        assert_eq!(prolong_point(&PolyMap::identity(1), &p).unwrap(), p);
        let c = PolyMap::new(1, vec![Polynomial::constant(1, int(4))]).unwrap();
        assert_eq!(prolong_point(&c, &p).unwrap().to_string(), "(4)");
    }

    #[test]
    fn expansion_matches_substitution() {
        let alg = WeilAlgebra::of(&InfinitesimalObject::power(3));
        let x = |i| WeilElement::variable(&alg, i);
        let c = |n| WeilElement::constant(&alg, int(n));
        let coords = vec![c(2).plus(&x(0)).plus(&x(1).times(&x(2))), c(-1).plus(&x(1)).plus(&x(2).scale(&int(3)))];
        let (a, b) = (Polynomial::var(2, 0), Polynomial::var(2, 1));
        let f = a.pow(3).mul(&b).add(&b.pow(2).scale_by(&int(5))).add(&Polynomial::constant(2, int(7)));
        let direct = f.eval(&coords, &WeilElement::one(&alg));
        assert_eq!(Expansion::new(&alg, &coords).eval(&f), direct);
    }

    #[test]
    fn compose_and_jacobian() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let f = PolyMap::new(2, vec![x.mul(&y), x.clone()]).unwrap();
        let g = PolyMap::new(2, vec![y.clone(), x.add(&y)]).unwrap();
        let fg = f.compose(&g).unwrap();
        assert_eq!(fg.components()[0], y.mul(&x.add(&y)));
        let j = f.jacobian();
        assert_eq!(j[0][0], y);
        assert_eq!(j[0][1], x);
        assert!(j[1][1].is_zero());
    }
}
