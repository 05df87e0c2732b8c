//! Tangent vectors, vector fields and microflows on the model space `R^k`:
//! the vector-space operations, the `*` composition, Lie brackets, strong
//! differences and both Jacobi checks.

use std::sync::Arc;

use num_traits::One;

use crate::algebra::{AlgebraHom, Element, WeilAlgebra};
use crate::diagrams::catalog;
use crate::error::{Error, Result};
use crate::object::{InfinitesimalMap, InfinitesimalObject};
use crate::point::{Expansion, PolyMap, WeilPoint};
use crate::poly::{Coefficient, Evaluate, Monomial, Polynomial, Rational};

/// The coordinate model `R^k` standing in for a microlinear space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelSpace {
    k: usize,
}

impl ModelSpace {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::ArityMismatch { expected: 1, found: 0 });
        }
        Ok(ModelSpace { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// `W_phi` for the map with the given components in `d1..dm`.
fn induced(src: InfinitesimalObject, dst: InfinitesimalObject, comps: Vec<Polynomial>) -> AlgebraHom {
    AlgebraHom::induced(&InfinitesimalMap::new(src, dst, comps).expect("built-in map is well defined"))
}

fn w_d() -> Arc<WeilAlgebra> {
    WeilAlgebra::of(&InfinitesimalObject::d())
}

// ---------------------------------------------------------------- tangent vectors

/// A point `x` of `R^k` with a direction `v`, i.e. `x + d v` in `R^k (x) W_D`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub base: Vec<Rational>,
    pub dir: Vec<Rational>,
}

impl TangentVector {
    pub fn new(base: Vec<Rational>, dir: Vec<Rational>) -> Result<Self> {
        if base.len() != dir.len() {
            return Err(Error::ArityMismatch { expected: base.len(), found: dir.len() });
        }
        Ok(TangentVector { base, dir })
    }

    pub fn k(&self) -> usize {
        self.base.len()
    }

    pub fn to_point(&self) -> WeilPoint {
        let alg = w_d();
        WeilPoint::from_components(&alg, self.k(), [(0, self.base.clone()), (1, self.dir.clone())])
    }

    pub fn from_point(p: &WeilPoint) -> Result<Self> {
        if p.algebra().object() != &InfinitesimalObject::d() {
            return Err(Error::AlgebraMismatch { left: "D".into(), right: p.algebra().object().to_string() });
        }
        Ok(TangentVector { base: p.base(), dir: p.component(1) })
    }
}

/// `l_(t1..tn)`: the point `x + d1 v1 + ... + dn vn` over `W_D(n)`.
pub fn ell_combine<C: Coefficient>(points: &[WeilPoint<C>]) -> Result<WeilPoint<C>> {
    let first = points.first().ok_or(Error::ArityMismatch { expected: 1, found: 0 })?;
    let d = InfinitesimalObject::d();
    for p in points {
        if p.algebra().object() != &d {
            return Err(Error::AlgebraMismatch { left: d.to_string(), right: p.algebra().object().to_string() });
        }
        if p.k() != first.k() {
            return Err(Error::ArityMismatch { expected: first.k(), found: p.k() });
        }
        if p.base() != first.base() {
            return Err(Error::BaseMismatch);
        }
    }
    let alg = WeilAlgebra::of(&InfinitesimalObject::pairwise(points.len()));
    let comps = std::iter::once((0, first.base()))
        .chain(points.iter().enumerate().map(|(i, p)| (alg.variable_index(i).expect("variable"), p.component(1))));
    Ok(WeilPoint::from_components(&alg, first.k(), comps))
}

/// `W_(d -> (d,...,d))` applied to `l_(t1..tn)`.
pub fn tangent_sum<C: Coefficient>(points: &[WeilPoint<C>]) -> Result<WeilPoint<C>> {
    let l = ell_combine(points)?;
    let n = points.len();
    let diag = induced(InfinitesimalObject::d(), InfinitesimalObject::pairwise(n), vec![Polynomial::var(1, 0); n]);
    l.apply_hom(&diag)
}

pub fn tangent_add(t1: &TangentVector, t2: &TangentVector) -> Result<TangentVector> {
    TangentVector::from_point(&tangent_sum(&[t1.to_point(), t2.to_point()])?)
}

/// `0_x`, through `W_1 -> W_D`.
pub fn tangent_zero(x: &[Rational]) -> TangentVector {
    let one = WeilAlgebra::of(&InfinitesimalObject::point());
    let p = WeilPoint::constant(&one, x.to_vec());
    let h = induced(InfinitesimalObject::d(), InfinitesimalObject::point(), Vec::new());
    TangentVector::from_point(&p.apply_hom(&h).expect("W_1 point")).expect("W_D point")
}

pub fn tangent_scale(alpha: &Rational, t: &TangentVector) -> TangentVector {
    let d = InfinitesimalObject::d();
    let h = induced(d.clone(), d, vec![Polynomial::var(1, 0).scale_by(alpha)]);
    TangentVector::from_point(&t.to_point().apply_hom(&h).expect("W_D point")).expect("W_D point")
}

pub fn tangent_neg(t: &TangentVector) -> TangentVector {
    tangent_scale(&-Rational::one(), t)
}

// ---------------------------------------------------------------- fields and flows

/// A polynomial vector field `X : R^k -> R^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    map: PolyMap,
}

impl VectorField {
    pub fn new(map: PolyMap) -> Result<Self> {
        if map.dom() != map.codom() {
            return Err(Error::ArityMismatch { expected: map.dom(), found: map.codom() });
        }
        Ok(VectorField { map })
    }

    pub fn from_components(k: usize, comps: Vec<Polynomial>) -> Result<Self> {
        Self::new(PolyMap::new(k, comps)?)
    }

    pub fn zero(k: usize) -> Self {
        VectorField { map: PolyMap::zero(k, k) }
    }

    pub fn k(&self) -> usize {
        self.map.dom()
    }

    pub fn map(&self) -> &PolyMap {
        &self.map
    }

    pub fn components(&self) -> &[Polynomial] {
        self.map.components()
    }

    pub fn at(&self, x: &[Rational]) -> TangentVector {
        TangentVector { base: x.to_vec(), dir: self.map.eval_rational(x) }
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        Ok(VectorField { map: self.map.add(&other.map)? })
    }

    pub fn scale(&self, factor: &Rational) -> VectorField {
        VectorField { map: self.map.scale(factor) }
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(Polynomial::is_zero)
    }

    /// `J_Y X - J_X Y`, straight from the Jacobians.
    pub fn jacobian_bracket(&self, y: &VectorField) -> Result<VectorField> {
        let k = self.k();
        if y.k() != k {
            return Err(Error::ArityMismatch { expected: k, found: y.k() });
        }
        let (jx, jy) = (self.map.jacobian(), y.map.jacobian());
        let comps = (0..k)
            .map(|i| {
                (0..k).fold(Polynomial::zero(k), |acc, j| {
                    acc.add(&jy[i][j].mul(&self.components()[j])).sub(&jx[i][j].mul(&y.components()[j]))
                })
            })
            .collect();
        VectorField::from_components(k, comps)
    }
}

/// An element of `M^M (x) W_O`: each coordinate a Weil element whose
/// coefficients are polynomials in the base point `x1..xk`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowElement {
    k: usize,
    point: WeilPoint<Polynomial>,
}

fn coordinate(k: usize, i: usize) -> Polynomial {
    Polynomial::var(k, i)
}

impl FlowElement {
    pub fn new(k: usize, point: WeilPoint<Polynomial>) -> Result<Self> {
        if point.k() != k {
            return Err(Error::ArityMismatch { expected: k, found: point.k() });
        }
        Ok(FlowElement { k, point })
    }

    /// The identity flow `x -> x` over `obj`.
    pub fn identity(obj: &InfinitesimalObject, k: usize) -> Self {
        let alg = WeilAlgebra::of(obj);
        FlowElement { k, point: WeilPoint::constant(&alg, (0..k).map(|i| coordinate(k, i)).collect()) }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn point(&self) -> &WeilPoint<Polynomial> {
        &self.point
    }

    pub fn algebra(&self) -> &Arc<WeilAlgebra> {
        self.point.algebra()
    }

    pub fn object(&self) -> &InfinitesimalObject {
        self.point.algebra().object()
    }

    /// Substituting 0 for every infinitesimal gives the identity.
    pub fn is_id_based(&self) -> bool {
        self.point.base().iter().enumerate().all(|(i, b)| *b == coordinate(self.k, i))
    }

    pub fn apply_hom(&self, h: &AlgebraHom) -> Result<FlowElement> {
        Ok(FlowElement { k: self.k, point: self.point.apply_hom(h)? })
    }

    /// The coefficient of basis monomial `m`, as a map `R^k -> R^k`.
    pub fn coefficient(&self, m: &Monomial) -> PolyMap {
        let comps = self.point.coords().iter().map(|c| c.coefficient(m).with_nvars(self.k)).collect();
        PolyMap::new(self.k, comps).expect("coefficients live in the base coordinates")
    }

    /// The Weil point over a concrete base point.
    pub fn at(&self, x: &[Rational]) -> WeilPoint {
        self.point.map_coeffs(|c| c.eval_rational(x))
    }

    /// `self . inner`, both over the same Weil algebra.
    pub fn compose_same(&self, inner: &FlowElement) -> Result<FlowElement> {
        if !Arc::ptr_eq(self.algebra(), inner.algebra()) && self.object() != inner.object() {
            return Err(Error::AlgebraMismatch {
                left: self.object().to_string(),
                right: inner.object().to_string(),
            });
        }
        let alg = self.algebra();
        let mut at = Expansion::new(alg, inner.point.coords());
        let coords = self
            .point
            .coords()
            .iter()
            .map(|c| {
                c.coeffs().fold(Element::zero(alg), |acc, (idx, poly)| {
                    let value = at.eval(poly);
                    acc.plus(&value.times(&Element::basis_term(alg, idx, Polynomial::one_value())))
                })
            })
            .collect();
        Ok(FlowElement { k: self.k, point: WeilPoint::new(alg, coords)? })
    }

    /// The field of an id-based flow over `D`.
    pub fn to_field(&self) -> Result<VectorField> {
        if self.object() != &InfinitesimalObject::d() {
            return Err(Error::AlgebraMismatch { left: "D".into(), right: self.object().to_string() });
        }
        VectorField::new(self.coefficient(&Monomial::var(0)))
    }
}

/// `x -> x + d X(x)`.
pub fn field_to_flow(x: &VectorField) -> FlowElement {
    let alg = w_d();
    let k = x.k();
    let comps = [(0, (0..k).map(|i| coordinate(k, i)).collect()), (1, x.components().to_vec())];
    FlowElement { k, point: WeilPoint::from_components(&alg, k, comps) }
}

/// `g2 * g1`: `g1` over `D^m` in the variables `d1..dm`, then `g2` over
/// `D^n` in `d(m+1)..d(m+n)`.
pub fn star(g1: &FlowElement, g2: &FlowElement) -> Result<FlowElement> {
    for g in [g1, g2] {
        if !g.object().is_power() {
            return Err(Error::NonPowerObject(g.object().to_string()));
        }
    }
    if g1.k != g2.k {
        return Err(Error::ArityMismatch { expected: g1.k, found: g2.k });
    }
    let (m, n) = (g1.object().n(), g2.object().n());
    let total = InfinitesimalObject::power(m + n);
    let alg = WeilAlgebra::of(&total);
    let first = induced(total.clone(), g1.object().clone(), (0..m).map(|i| Polynomial::var(m + n, i)).collect());
    let inner = g1.point.apply_hom(&first)?;
    let mut at = Expansion::new(&alg, inner.coords());
    let coords = g2
        .point
        .coords()
        .iter()
        .map(|c| {
            c.coeffs().fold(Element::zero(&alg), |acc, (idx, poly)| {
                let mono = &g2.algebra().basis()[idx];
                let mut exps = vec![0; m];
                exps.extend(mono.dense(n));
                let target = alg.index_of(&Monomial::from_exponents(exps)).expect("block monomial in D^(m+n)");
                let value = at.eval(poly);
                acc.plus(&value.times(&Element::basis_term(&alg, target, Polynomial::one_value())))
            })
        })
        .collect();
    Ok(FlowElement { k: g1.k, point: WeilPoint::new(&alg, coords)? })
}

/// `W_(d1,d2) -> (d2,d1)` on a flow over `D^2`.
pub fn swap(g: &FlowElement) -> Result<FlowElement> {
    let sq = InfinitesimalObject::power(2);
    let h = induced(sq.clone(), sq, vec![Polynomial::var(2, 1), Polynomial::var(2, 0)]);
    g.apply_hom(&h)
}

/// The commutator loop `Y*X*Y*X` pulled back along `(d1,d2) -> (d1,d2,-d1,-d2)`.
pub fn commutator_loop(x: &VectorField, y: &VectorField) -> Result<FlowElement> {
    let (fx, fy) = (field_to_flow(x), field_to_flow(y));
    let loop4 = star(&star(&star(&fx, &fy)?, &fx)?, &fy)?;
    let v = |i| Polynomial::var(2, i);
    let back = induced(InfinitesimalObject::power(2), InfinitesimalObject::power(4), vec![v(0), v(1), v(0).neg(), v(1).neg()]);
    loop4.apply_hom(&back)
}

/// `[X,Y]`: factors the commutator loop through `W_((d1,d2) -> d1 d2)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    let loop2 = commutator_loop(x, y)?;
    let cat = catalog();
    let lim = cat.limit("bracket_factor_cone")?;
    let line = loop2.point.apply_hom(cat.hom("sq_zero"))?;
    let lifted = lim.lift_point(&[loop2.point.clone(), line]).map_err(|e| match e {
        Error::IncompatibleFamily { arrow } => Error::FactorizationFailure(format!("arrow `{arrow}` disagrees")),
        other => other,
    })?;
    FlowElement { k: x.k(), point: lifted }.to_field()
}

/// `Y*X -. swap(X*Y)`.
pub fn bracket_via_strong_diff(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    let (fx, fy) = (field_to_flow(x), field_to_flow(y));
    let yx = star(&fx, &fy)?;
    let xy = swap(&star(&fy, &fx)?)?;
    let t = strong_diff(xy.point(), yx.point())?;
    FlowElement { k: x.k(), point: t }.to_field()
}

// ---------------------------------------------------------------- strong differences

/// `g2 -. g1` for microsquares agreeing on `D(2)`.
pub fn strong_diff<C: Coefficient>(g1: &WeilPoint<C>, g2: &WeilPoint<C>) -> Result<WeilPoint<C>> {
    let cat = catalog();
    let lim = cat.limit("square_pair_cone")?;
    let edge = g1.apply_hom(cat.hom("rim"))?;
    let g = lim.lift_point(&[g1.clone(), g2.clone(), edge])?;
    g.apply_hom(cat.hom("sq_gap"))
}

/// `g2 -._axis g1` for microcubes agreeing on the face for `axis`.
pub fn strong_diff_axis<C: Coefficient>(g1: &WeilPoint<C>, g2: &WeilPoint<C>, axis: usize) -> Result<WeilPoint<C>> {
    if !(1..=3).contains(&axis) {
        return Err(Error::InvalidAxis(axis));
    }
    let cat = catalog();
    let lim = cat.limit(&format!("cube_pair{axis}_cone"))?;
    let face = g1.apply_hom(cat.hom(&format!("face{axis}")))?;
    let g = lim.lift_point(&[g1.clone(), g2.clone(), face])?;
    g.apply_hom(cat.hom(&format!("axis{axis}")))
}

// ---------------------------------------------------------------- Jacobi

/// The three tangent terms of a Jacobi check and their sum.
#[derive(Clone, Debug)]
pub struct JacobiOutcome<C: Coefficient = Rational> {
    pub terms: [WeilPoint<C>; 3],
    pub sum: WeilPoint<C>,
}

impl<C: Coefficient> JacobiOutcome<C> {
    /// True iff the sum is the zero tangent at its base.
    pub fn vanishes(&self) -> bool {
        self.sum.component(1).iter().all(Coefficient::vanishes)
    }
}

fn labelled<T>(label: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::IncompatibleFamily { arrow } => Error::IncompatibleFamily { arrow: format!("{label}: {arrow}") },
        other => other,
    })
}

/// `(g2 -. g1) + (g3 -. g2) + (g1 -. g3)`.
pub fn primordial_jacobi<C: Coefficient>(g1: &WeilPoint<C>, g2: &WeilPoint<C>, g3: &WeilPoint<C>) -> Result<JacobiOutcome<C>> {
    let t1 = labelled("g2 -. g1", strong_diff(g1, g2))?;
    let t2 = labelled("g3 -. g2", strong_diff(g2, g3))?;
    let t3 = labelled("g1 -. g3", strong_diff(g3, g1))?;
    let sum = tangent_sum(&[t1.clone(), t2.clone(), t3.clone()])?;
    Ok(JacobiOutcome { terms: [t1, t2, t3], sum })
}

/// The unique point over `W_E` restricting to three microsquares that
/// pairwise agree on `D(2)`.
pub fn encode_triple<C: Coefficient>(g1: &WeilPoint<C>, g2: &WeilPoint<C>, g3: &WeilPoint<C>) -> Result<WeilPoint<C>> {
    let cat = catalog();
    let lim = cat.limit("square_triple_cone")?;
    let rim = cat.hom("rim");
    let family = [g1.clone(), g2.clone(), g3.clone(), g1.apply_hom(rim)?, g2.apply_hom(rim)?, g3.apply_hom(rim)?];
    lim.lift_point(&family)
}

/// Six microcubes indexed by the permutations of `123`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sextuple<T> {
    pub g123: T,
    pub g132: T,
    pub g213: T,
    pub g231: T,
    pub g312: T,
    pub g321: T,
}

impl<T> Sextuple<T> {
    pub fn map<U>(&self, mut f: impl FnMut(&T) -> Result<U>) -> Result<Sextuple<U>> {
        Ok(Sextuple {
            g123: f(&self.g123)?,
            g132: f(&self.g132)?,
            g213: f(&self.g213)?,
            g231: f(&self.g231)?,
            g312: f(&self.g312)?,
            g321: f(&self.g321)?,
        })
    }
}

/// `(g123 -.1 g132) -. (g231 -.1 g321)` and its two rotations, summed.
pub fn general_jacobi<C: Coefficient>(s: &Sextuple<WeilPoint<C>>) -> Result<JacobiOutcome<C>> {
    let pair = |outer: &str, a: (&WeilPoint<C>, &WeilPoint<C>, &str), b: (&WeilPoint<C>, &WeilPoint<C>, &str), axis| {
        let first = labelled(a.2, strong_diff_axis(a.0, a.1, axis))?;
        let second = labelled(b.2, strong_diff_axis(b.0, b.1, axis))?;
        labelled(outer, strong_diff(&first, &second))
    };
    let t1 = pair(
        "term 1",
        (&s.g321, &s.g231, "g231 -.1 g321"),
        (&s.g132, &s.g123, "g123 -.1 g132"),
        1,
    )?;
    let t2 = pair(
        "term 2",
        (&s.g132, &s.g312, "g312 -.2 g132"),
        (&s.g213, &s.g231, "g231 -.2 g213"),
        2,
    )?;
    let t3 = pair(
        "term 3",
        (&s.g213, &s.g123, "g123 -.3 g213"),
        (&s.g321, &s.g312, "g312 -.3 g321"),
        3,
    )?;
    let sum = tangent_sum(&[t1.clone(), t2.clone(), t3.clone()])?;
    Ok(JacobiOutcome { terms: [t1, t2, t3], sum })
}

/// `h^j`: the point over `W_E[j]` whose four cube restrictions are `gs`.
pub fn encode_quad<C: Coefficient>(j: usize, gs: [&WeilPoint<C>; 4]) -> Result<WeilPoint<C>> {
    if !(1..=3).contains(&j) {
        return Err(Error::InvalidAxis(j));
    }
    let cat = catalog();
    let cube = cat.limit(&format!("cube_pair{j}_cone"))?;
    let face = cat.hom(&format!("face{j}"));
    let a = cube.lift_point(&[gs[0].clone(), gs[1].clone(), gs[0].apply_hom(face)?])?;
    let b = cube.lift_point(&[gs[2].clone(), gs[3].clone(), gs[2].apply_hom(face)?])?;
    let edge = a.apply_hom(cat.hom(&format!("edge{j}")))?;
    cat.limit(&format!("quad{j}_cone"))?.lift_point(&[a, b, edge])
}

/// `m`: the point over `W_G` encoding all six microcubes.
pub fn encode_sextuple<C: Coefficient>(s: &Sextuple<WeilPoint<C>>) -> Result<WeilPoint<C>> {
    let cat = catalog();
    let h1 = labelled("h1", encode_quad(1, [&s.g321, &s.g231, &s.g132, &s.g123]))?;
    let h2 = labelled("h2", encode_quad(2, [&s.g132, &s.g312, &s.g213, &s.g231]))?;
    let h3 = labelled("h3", encode_quad(3, [&s.g213, &s.g123, &s.g321, &s.g312]))?;
    let b12 = h1.apply_hom(cat.hom("h1_12"))?;
    let b23 = h2.apply_hom(cat.hom("h2_23"))?;
    let b31 = h3.apply_hom(cat.hom("h3_31"))?;
    labelled("m", cat.limit("sextuple_cone")?.lift_point(&[h1, h2, h3, b12, b23, b31]))
}

/// Reads the six microcubes back out of `m`.
pub fn decode_sextuple<C: Coefficient>(m: &WeilPoint<C>) -> Result<Sextuple<WeilPoint<C>>> {
    let cat = catalog();
    let via = |k: &str, iota: &str| m.apply_hom(cat.hom(k))?.apply_hom(cat.hom(iota));
    Ok(Sextuple {
        g321: via("k1", "iota1_1")?,
        g231: via("k1", "iota1_2")?,
        g132: via("k1", "iota1_3")?,
        g123: via("k1", "iota1_4")?,
        g312: via("k2", "iota2_2")?,
        g213: via("k2", "iota2_3")?,
    })
}

/// The three Jacobi terms read directly off `m`.
pub fn jacobi_terms_from_encoding<C: Coefficient>(m: &WeilPoint<C>) -> Result<[WeilPoint<C>; 3]> {
    let cat = catalog();
    Ok([
        m.apply_hom(cat.hom("jacobi_t1"))?,
        m.apply_hom(cat.hom("jacobi_t2"))?,
        m.apply_hom(cat.hom("jacobi_t3"))?,
    ])
}

/// The six permuted composites of `X`, `Y`, `Z` over `D^3`.
pub fn jacobi_witness(x: &VectorField, y: &VectorField, z: &VectorField) -> Result<Sextuple<FlowElement>> {
    let (fx, fy, fz) = (field_to_flow(x), field_to_flow(y), field_to_flow(z));
    let cube = InfinitesimalObject::power(3);
    let v = |i| Polynomial::var(3, i);
    let perm = |p: [usize; 3], g: FlowElement| g.apply_hom(&induced(cube.clone(), cube.clone(), p.iter().map(|&i| v(i)).collect()));
    // `c * b * a` is star(star(a, b), c).
    let chain = |a: &FlowElement, b: &FlowElement, c: &FlowElement| star(&star(a, b)?, c);
    Ok(Sextuple {
        g123: chain(&fx, &fy, &fz)?,
        g132: perm([0, 2, 1], chain(&fx, &fz, &fy)?)?,
        g213: perm([1, 0, 2], chain(&fy, &fx, &fz)?)?,
        g231: perm([1, 2, 0], chain(&fy, &fz, &fx)?)?,
        g312: perm([2, 0, 1], chain(&fz, &fx, &fy)?)?,
        g321: perm([2, 1, 0], chain(&fz, &fy, &fx)?)?,
    })
}

/// Whether a Weil point has no infinitesimal part.
pub fn is_constant<C: Coefficient>(p: &WeilPoint<C>) -> bool {
    p.coords().iter().all(|c| c.coeffs().all(|(idx, v)| idx == 0 || v.vanishes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};
    use crate::script::parse_components;

    fn field(k: usize, src: &str) -> VectorField {
        let comps = parse_components(src, 'x').unwrap().into_iter().map(|p| p.with_nvars(k)).collect();
        VectorField::from_components(k, comps).unwrap()
    }

    // [X,Y] for linear fields Ax, By is (BA - AB)x.
    fn linear_bracket(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
        let mul = |p: [[i64; 2]; 2], q: [[i64; 2]; 2]| {
            let mut r = [[0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    r[i][j] = (0..2).map(|l| p[i][l] * q[l][j]).sum();
                }
            }
            r
        };
        let (ba, ab) = (mul(b, a), mul(a, b));
        let mut r = [[0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = ba[i][j] - ab[i][j];
            }
        }
        r
    }

    fn linear_field(m: [[i64; 2]; 2]) -> VectorField {
        let comps = (0..2)
            .map(|i| Polynomial::var(2, 0).scale_by(&int(m[i][0])).add(&Polynomial::var(2, 1).scale_by(&int(m[i][1]))))
            .collect();
        VectorField::from_components(2, comps).unwrap()
    }

    #[test]
    fn linear_bracket_matches_matrix_commutator() {
        let (a, b) = ([[1, 2], [0, -1]], [[0, 1], [3, 2]]);
        let got = lie_bracket(&linear_field(a), &linear_field(b)).unwrap();
        assert_eq!(got, linear_field(linear_bracket(a, b)));
        assert_eq!(bracket_via_strong_diff(&linear_field(a), &linear_field(b)).unwrap(), got);
    }

    #[test]
    fn polynomial_bracket() {
        let x = field(2, "x2, x1*x1");
        let y = field(2, "x1*x2, 1");
        // J_Y X - J_X Y, by hand: J_Y = [[x2, x1], [0, 0]], J_X = [[0, 1], [2 x1, 0]].
        let want = field(2, "x2*x2 + x1*x1*x1 - 1, -2*x1*x1*x2");
        assert_eq!(lie_bracket(&x, &y).unwrap(), want);
        assert_eq!(x.jacobian_bracket(&y).unwrap(), want);
    }

    #[test]
    fn tangent_operations() {
        let x = vec![int(1), rat(1, 2)];
        let t = TangentVector::new(x.clone(), vec![int(3), int(-1)]).unwrap();
        let u = TangentVector::new(x.clone(), vec![rat(1, 3), int(2)]).unwrap();
        assert_eq!(tangent_add(&t, &u).unwrap().dir, vec![rat(10, 3), int(1)]);
        assert_eq!(tangent_zero(&x).dir, vec![int(0), int(0)]);
        assert_eq!(tangent_neg(&t).dir, vec![int(-3), int(1)]);
        assert_eq!(tangent_scale(&rat(2, 3), &t).dir, vec![int(2), rat(-2, 3)]);
        let v = TangentVector::new(vec![int(0), int(0)], vec![int(1), int(1)]).unwrap();
        assert_eq!(tangent_add(&t, &v), Err(Error::BaseMismatch));
    }

    #[test]
    fn star_with_identity_is_restriction() {
        let x = field(2, "x2, x1*x1");
        let g = star(&field_to_flow(&x), &field_to_flow(&field(2, "x1, 0"))).unwrap();
        let id = FlowElement::identity(&InfinitesimalObject::d(), 2);
        let left = star(&id, &g).unwrap();
        let v = |i| Polynomial::var(3, i);
        let onto_last = induced(InfinitesimalObject::power(3), InfinitesimalObject::power(2), vec![v(1), v(2)]);
        assert_eq!(left, g.apply_hom(&onto_last).unwrap());
    }

    #[test]
    fn star_rejects_non_power() {
        let x = field(1, "x1");
        let id = FlowElement::identity(&InfinitesimalObject::pairwise(2), 1);
        assert!(matches!(star(&id, &field_to_flow(&x)), Err(Error::NonPowerObject(_))));
    }

    #[test]
    fn general_jacobi_on_fields() {
        let x = field(2, "x2, 0");
        let y = field(2, "x1*x1, x1");
        let z = field(2, "1, x1*x2");
        let six = jacobi_witness(&x, &y, &z).unwrap().map(|g| Ok(g.point().clone())).unwrap();
        let out = general_jacobi(&six).unwrap();
        assert!(out.vanishes());
        let terms: Vec<_> = out.terms.iter().map(|t| FlowElement::new(2, t.clone()).unwrap().to_field().unwrap()).collect();
        let b = |p: &VectorField, q: &VectorField| p.jacobian_bracket(q).unwrap();
        assert_eq!(terms[0], b(&x, &b(&y, &z)));
        assert_eq!(terms[1], b(&y, &b(&z, &x)));
        assert_eq!(terms[2], b(&z, &b(&x, &y)));
        let m = encode_sextuple(&six).unwrap();
        assert_eq!(decode_sextuple(&m).unwrap(), six);
        assert_eq!(jacobi_terms_from_encoding(&m).unwrap(), out.terms);
    }

    #[test]
    fn primordial_terms_read_off_the_triple() {
        let x = field(2, "x2, x1");
        let y = field(2, "x1*x2, 0");
        let sq = star(&field_to_flow(&x), &field_to_flow(&y)).unwrap();
        let bump = |c: &str| {
            let extra = field(2, c);
            let alg = sq.algebra().clone();
            let idx = alg.index_of(&Monomial::squarefree(&[0, 1])).unwrap();
            let coords = sq
                .point()
                .coords()
                .iter()
                .zip(extra.components())
                .map(|(e, p)| e.add(&Element::basis_term(&alg, idx, p.clone())).unwrap())
                .collect();
            WeilPoint::new(&alg, coords).unwrap()
        };
        let (g1, g2, g3) = (sq.point().clone(), bump("x1, 1"), bump("0, x2*x2"));
        let out = primordial_jacobi(&g1, &g2, &g3).unwrap();
        assert!(out.vanishes());
        let e = encode_triple(&g1, &g2, &g3).unwrap();
        let cat = catalog();
        assert_eq!(e.apply_hom(cat.hom("tri_t1")).unwrap(), out.terms[0]);
        assert_eq!(e.apply_hom(cat.hom("tri_t2")).unwrap(), out.terms[1]);
        assert_eq!(e.apply_hom(cat.hom("tri_t3")).unwrap(), out.terms[2]);
    }
}
