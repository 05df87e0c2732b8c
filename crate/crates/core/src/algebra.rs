//! Weil algebras `R[X]/I` for monomial ideals `I`, their elements, and the
//! homomorphisms induced by maps of infinitesimal objects.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::object::{InfinitesimalMap, InfinitesimalObject};
use crate::poly::{Coefficient, Evaluate, Monomial, Polynomial, Rational};

/// The Weil algebra of an infinitesimal object, with its staircase basis
/// and a precomputed multiplication table.
#[derive(Debug)]
pub struct WeilAlgebra {
    object: InfinitesimalObject,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    products: Vec<Option<usize>>,
}

fn cache() -> &'static Mutex<HashMap<InfinitesimalObject, Arc<WeilAlgebra>>> {
    static CACHE: OnceLock<Mutex<HashMap<InfinitesimalObject, Arc<WeilAlgebra>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl WeilAlgebra {
    /// The (shared, memoized) algebra of `obj`.
    pub fn of(obj: &InfinitesimalObject) -> Arc<WeilAlgebra> {
        if let Some(alg) = cache().lock().expect("algebra cache").get(obj) {
            return Arc::clone(alg);
        }
        let alg = Arc::new(Self::build(obj.clone()));
        let mut guard = cache().lock().expect("algebra cache");
        Arc::clone(guard.entry(obj.clone()).or_insert(alg))
    }

    fn build(object: InfinitesimalObject) -> WeilAlgebra {
        let mut basis = Vec::new();
        let mut exps = vec![0u32; object.n()];
        staircase(&object, 0, &mut exps, &mut basis);
        basis.sort_by(Monomial::graded_cmp);
        let index: HashMap<Monomial, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let dim = basis.len();
        let mut products = Vec::with_capacity(dim * dim);
        for a in &basis {
            for b in &basis {
                products.push(index.get(&a.mul(b)).copied());
            }
        }
        WeilAlgebra { object, basis, index, products }
    }

    pub fn object(&self) -> &InfinitesimalObject {
        &self.object
    }

    pub fn n(&self) -> usize {
        self.object.n()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Basis index of `basis[i] * basis[j]`, or `None` if it lies in the ideal.
    pub fn product_index(&self, i: usize, j: usize) -> Option<usize> {
        self.products[i * self.dim() + j]
    }

    /// Basis index of the variable `X_{i+1}`, if it survives.
    pub fn variable_index(&self, i: usize) -> Option<usize> {
        self.index_of(&Monomial::var(i))
    }

    fn same(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || self.object == other.object
    }
}

fn staircase(obj: &InfinitesimalObject, var: usize, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if var == obj.n() {
        out.push(Monomial::from_exponents(exps.clone()));
        return;
    }
    for e in 0..obj.caps()[var] {
        exps[var] = e;
        let m = Monomial::from_exponents(exps[..=var].to_vec());
        if obj.relations().iter().any(|r| r.divides(&m)) {
            break;
        }
        staircase(obj, var + 1, exps, out);
    }
    exps[var] = 0;
}

/// `A (x) B`: the algebra of the product object (variables concatenated).
pub fn product_algebra(a: &WeilAlgebra, b: &WeilAlgebra) -> Arc<WeilAlgebra> {
    WeilAlgebra::of(&a.object().product(b.object()))
}

/// An element of a Weil algebra with coefficients in `C`.
#[derive(Clone)]
pub struct Element<C: Coefficient = Rational> {
    algebra: Arc<WeilAlgebra>,
    coeffs: BTreeMap<usize, C>,
}

pub type WeilElement = Element<Rational>;

impl<C: Coefficient> Element<C> {
    pub fn zero(algebra: &Arc<WeilAlgebra>) -> Self {
        Element { algebra: Arc::clone(algebra), coeffs: BTreeMap::new() }
    }

    pub fn constant(algebra: &Arc<WeilAlgebra>, c: C) -> Self {
        Self::from_coeffs(algebra, [(0, c)])
    }

    pub fn one(algebra: &Arc<WeilAlgebra>) -> Self {
        Self::constant(algebra, C::one_value())
    }

    /// `c * basis[idx]`.
    pub fn basis_term(algebra: &Arc<WeilAlgebra>, idx: usize, c: C) -> Self {
        Self::from_coeffs(algebra, [(idx, c)])
    }

    /// `X_{i+1}` (zero when the variable itself lies in the ideal).
    pub fn variable(algebra: &Arc<WeilAlgebra>, i: usize) -> Self {
        match algebra.variable_index(i) {
            Some(idx) => Self::basis_term(algebra, idx, C::one_value()),
            None => Self::zero(algebra),
        }
    }

    /// Builds from `(basis index, coefficient)` pairs, summing repeats.
    pub fn from_coeffs(algebra: &Arc<WeilAlgebra>, terms: impl IntoIterator<Item = (usize, C)>) -> Self {
        let mut coeffs: BTreeMap<usize, C> = BTreeMap::new();
        for (idx, c) in terms {
            assert!(idx < algebra.dim(), "basis index {idx} out of range");
            accumulate(&mut coeffs, idx, c);
        }
        Element { algebra: Arc::clone(algebra), coeffs }
    }

    pub fn algebra(&self) -> &Arc<WeilAlgebra> {
        &self.algebra
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (usize, &C)> {
        self.coeffs.iter().map(|(&i, c)| (i, c))
    }

    pub fn coeff(&self, idx: usize) -> C {
        self.coeffs.get(&idx).cloned().unwrap_or_else(C::zero_value)
    }

    /// Coefficient of a monomial (zero if it is not a basis monomial).
    pub fn coefficient(&self, m: &Monomial) -> C {
        self.algebra.index_of(m).map(|i| self.coeff(i)).unwrap_or_else(C::zero_value)
    }

    /// The constant term (the base point, geometrically).
    pub fn augmentation(&self) -> C {
        self.coeff(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.algebra.same(&other.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch {
                left: self.algebra.object().to_string(),
                right: other.algebra.object().to_string(),
            })
        }
    }

    /// `alpha * self + beta * other`.
    pub fn linear(&self, other: &Self, alpha: &Rational, beta: &Rational) -> Result<Self> {
        self.check(other)?;
        let mut coeffs = BTreeMap::new();
        for (&i, c) in &self.coeffs {
            accumulate(&mut coeffs, i, c.scale(alpha));
        }
        for (&i, c) in &other.coeffs {
            accumulate(&mut coeffs, i, c.scale(beta));
        }
        Ok(Element { algebra: Arc::clone(&self.algebra), coeffs })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.plus(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.plus(&other.neg()))
    }

    pub fn neg(&self) -> Self {
        self.scale(&-<Rational as num_traits::One>::one())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.times(other))
    }

    /// Multiplies every coefficient by a ring element.
    pub fn scale_coeffs(&self, factor: &C) -> Self {
        let mut coeffs = BTreeMap::new();
        for (&i, c) in &self.coeffs {
            accumulate(&mut coeffs, i, c.times(factor));
        }
        Element { algebra: Arc::clone(&self.algebra), coeffs }
    }

    pub fn map_coeffs<D: Coefficient>(&self, mut f: impl FnMut(&C) -> D) -> Element<D> {
        let mut coeffs = BTreeMap::new();
        for (&i, c) in &self.coeffs {
            accumulate(&mut coeffs, i, f(c));
        }
        Element { algebra: Arc::clone(&self.algebra), coeffs }
    }

    /// Reinterprets the coefficient table in another algebra that shares
    /// the same basis monomials (e.g. a relabelled copy).
    pub fn transport(&self, target: &Arc<WeilAlgebra>) -> Option<Self> {
        let mut coeffs = BTreeMap::new();
        for (&i, c) in &self.coeffs {
            let idx = target.index_of(&self.algebra.basis()[i])?;
            coeffs.insert(idx, c.clone());
        }
        Some(Element { algebra: Arc::clone(target), coeffs })
    }

    pub fn render(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (&i, c)) in self.coeffs.iter().enumerate() {
            let m = &self.algebra.basis()[i];
            let mut text = c.to_string();
            if text.contains(' ') {
                text = format!("({text})");
            }
            let term = if m.is_one() {
                text
            } else if text == "1" {
                m.render("X")
            } else if text == "-1" {
                format!("-{}", m.render("X"))
            } else {
                format!("{text}*{}", m.render("X"))
            };
            if k == 0 {
                out.push_str(&term);
            } else if let Some(rest) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        out
    }
}

fn accumulate<C: Coefficient>(coeffs: &mut BTreeMap<usize, C>, idx: usize, c: C) {
    use std::collections::btree_map::Entry;
    match coeffs.entry(idx) {
        Entry::Vacant(v) => {
            if !c.vanishes() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            let sum = o.get().plus(&c);
            if sum.vanishes() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

impl WeilElement {
    /// Reduces a polynomial in `X_1..X_n` into the algebra.
    pub fn from_polynomial(algebra: &Arc<WeilAlgebra>, p: &Polynomial) -> Self {
        let terms = p.terms().filter_map(|(m, c)| algebra.index_of(m).map(|i| (i, c.clone())));
        Self::from_coeffs(algebra, terms.collect::<Vec<_>>())
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let basis = self.algebra.basis();
        Polynomial::from_terms(self.algebra.n(), self.coeffs.iter().map(|(&i, c)| (basis[i].clone(), c.clone())))
    }
}

impl<C: Coefficient> Evaluate for Element<C> {
    /// Panics on mismatched algebras; the checked variants are `add`/`mul`.
    fn plus(&self, other: &Self) -> Self {
        assert!(self.algebra.same(&other.algebra), "algebra mismatch");
        let mut coeffs = self.coeffs.clone();
        for (&i, c) in &other.coeffs {
            accumulate(&mut coeffs, i, c.clone());
        }
        Element { algebra: Arc::clone(&self.algebra), coeffs }
    }

    fn times(&self, other: &Self) -> Self {
        assert!(self.algebra.same(&other.algebra), "algebra mismatch");
        let mut coeffs = BTreeMap::new();
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                if let Some(k) = self.algebra.product_index(i, j) {
                    accumulate(&mut coeffs, k, a.times(b));
                }
            }
        }
        Element { algebra: Arc::clone(&self.algebra), coeffs }
    }

    fn scale(&self, factor: &Rational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !num_traits::Zero::is_zero(factor) {
            for (&i, c) in &self.coeffs {
                accumulate(&mut coeffs, i, c.scale(factor));
            }
        }
        Element { algebra: Arc::clone(&self.algebra), coeffs }
    }
}

impl<C: Coefficient> PartialEq for Element<C> {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.same(&other.algebra) && self.coeffs == other.coeffs
    }
}

impl<C: Coefficient> fmt::Debug for Element<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element[{}]({})", self.algebra.object(), self.render())
    }
}

impl<C: Coefficient> fmt::Display for Element<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A unital algebra homomorphism `domain -> codomain`, determined by the
/// images of the domain's variables.
#[derive(Clone)]
pub struct AlgebraHom {
    domain: Arc<WeilAlgebra>,
    codomain: Arc<WeilAlgebra>,
    images: Vec<WeilElement>,
    columns: Vec<WeilElement>,
}

impl AlgebraHom {
    /// Validates that the images have zero constant term and kill every
    /// generator of the domain's ideal.
    pub fn from_images(domain: &Arc<WeilAlgebra>, codomain: &Arc<WeilAlgebra>, images: Vec<WeilElement>) -> Result<Self> {
        if images.len() != domain.n() {
            return Err(Error::ArityMismatch { expected: domain.n(), found: images.len() });
        }
        for (k, img) in images.iter().enumerate() {
            if !img.algebra.same(codomain) {
                return Err(Error::AlgebraMismatch {
                    left: codomain.object().to_string(),
                    right: img.algebra.object().to_string(),
                });
            }
            if !num_traits::Zero::is_zero(&img.augmentation()) {
                return Err(Error::NonzeroConstantTerm { component: k + 1 });
            }
        }
        let one = WeilElement::one(codomain);
        for g in domain.object().generators() {
            let value = monomial_value(&g, &images, &one);
            if !value.is_zero() {
                return Err(Error::IllDefinedMap { generator: g.render("X"), residue: value.to_polynomial().render("X") });
            }
        }
        let columns = domain.basis().iter().map(|m| monomial_value(m, &images, &one)).collect();
        Ok(AlgebraHom { domain: Arc::clone(domain), codomain: Arc::clone(codomain), images, columns })
    }

    /// `W_phi : W_target -> W_source` for `phi : source -> target`.
    pub fn induced(map: &InfinitesimalMap) -> AlgebraHom {
        let domain = WeilAlgebra::of(map.target());
        let codomain = WeilAlgebra::of(map.source());
        let images = map.components().iter().map(|c| WeilElement::from_polynomial(&codomain, c)).collect();
        Self::from_images(&domain, &codomain, images).expect("well-defined maps induce homomorphisms")
    }

    pub fn identity(algebra: &Arc<WeilAlgebra>) -> AlgebraHom {
        let images = (0..algebra.n()).map(|i| WeilElement::variable(algebra, i)).collect();
        Self::from_images(algebra, algebra, images).expect("identity")
    }

    pub fn domain(&self) -> &Arc<WeilAlgebra> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<WeilAlgebra> {
        &self.codomain
    }

    pub fn images(&self) -> &[WeilElement] {
        &self.images
    }

    /// Image of the basis monomial with index `idx`.
    pub fn column(&self, idx: usize) -> &WeilElement {
        &self.columns[idx]
    }

    pub fn apply<C: Coefficient>(&self, x: &Element<C>) -> Result<Element<C>> {
        if !x.algebra.same(&self.domain) {
            return Err(Error::AlgebraMismatch {
                left: self.domain.object().to_string(),
                right: x.algebra.object().to_string(),
            });
        }
        let mut coeffs = BTreeMap::new();
        for (&b, c) in &x.coeffs {
            for (&t, r) in &self.columns[b].coeffs {
                accumulate(&mut coeffs, t, c.scale(r));
            }
        }
        Ok(Element { algebra: Arc::clone(&self.codomain), coeffs })
    }

    /// `self` followed by `next`, i.e. `next . self`.
    pub fn then(&self, next: &AlgebraHom) -> Result<AlgebraHom> {
        let images = self.images.iter().map(|img| next.apply(img)).collect::<Result<Vec<_>>>()?;
        AlgebraHom::from_images(&self.domain, &next.codomain, images)
    }

    /// Dense matrix, `codomain.dim()` rows by `domain.dim()` columns.
    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        let mut m = vec![vec![<Rational as Coefficient>::zero_value(); self.domain.dim()]; self.codomain.dim()];
        for (b, col) in self.columns.iter().enumerate() {
            for (&t, r) in &col.coeffs {
                m[t][b] = r.clone();
            }
        }
        m
    }

    /// Checks multiplicativity on all basis pairs, unitality, and
    /// preservation of the augmentation.
    pub fn is_homomorphism(&self) -> bool {
        let dim = self.domain.dim();
        if self.columns[0] != WeilElement::one(&self.codomain) {
            return false;
        }
        for i in 0..dim {
            for j in 0..dim {
                let lhs = match self.domain.product_index(i, j) {
                    Some(k) => self.columns[k].clone(),
                    None => WeilElement::zero(&self.codomain),
                };
                if lhs != self.columns[i].times(&self.columns[j]) {
                    return false;
                }
            }
            if i > 0 && !num_traits::Zero::is_zero(&self.columns[i].augmentation()) {
                return false;
            }
        }
        true
    }
}

fn monomial_value(m: &Monomial, images: &[WeilElement], one: &WeilElement) -> WeilElement {
    let mut acc = one.clone();
    for (i, img) in images.iter().enumerate() {
        for _ in 0..m.exponent(i) {
            acc = acc.times(img);
        }
    }
    acc
}

impl PartialEq for AlgebraHom {
    fn eq(&self, other: &Self) -> bool {
        self.domain.same(&other.domain) && self.codomain.same(&other.codomain) && self.images == other.images
    }
}

impl fmt::Debug for AlgebraHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imgs: Vec<String> = self.images.iter().map(|e| e.render()).collect();
        write!(f, "AlgebraHom[{} -> {}]({})", self.domain.object(), self.codomain.object(), imgs.join(", "))
    }
}
