//! Finite diagrams of Weil algebras, their vector-space limits, cone
//! verification and lifting of compatible families through a limit.

use std::sync::Arc;

use num_traits::Zero;

use crate::algebra::{AlgebraHom, Element, WeilAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::point::WeilPoint;
use crate::poly::{Coefficient, Rational};

#[derive(Clone, Debug)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub hom: AlgebraHom,
}

/// Named nodes and (possibly parallel) named arrows.
#[derive(Clone, Debug, Default)]
pub struct WeilDiagram {
    nodes: Vec<(String, Arc<WeilAlgebra>)>,
    arrows: Vec<Arrow>,
}

impl WeilDiagram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: &str, algebra: Arc<WeilAlgebra>) -> Result<usize> {
        if self.node_index(name).is_some() {
            return Err(Error::MalformedDiagram(format!("duplicate node `{name}`")));
        }
        self.nodes.push((name.to_string(), algebra));
        Ok(self.nodes.len() - 1)
    }

    pub fn add_arrow(&mut self, name: &str, source: &str, target: &str, hom: AlgebraHom) -> Result<()> {
        let lookup = |n: &str| self.node_index(n).ok_or_else(|| Error::MalformedDiagram(format!("unknown node `{n}`")));
        let (s, t) = (lookup(source)?, lookup(target)?);
        if hom.domain().object() != self.nodes[s].1.object() || hom.codomain().object() != self.nodes[t].1.object() {
            return Err(Error::MalformedDiagram(format!(
                "arrow `{name}` is {} -> {}, but nodes are {} -> {}",
                hom.domain().object(),
                hom.codomain().object(),
                self.nodes[s].1.object(),
                self.nodes[t].1.object()
            )));
        }
        self.arrows.push(Arrow { name: name.to_string(), source: s, target: t, hom });
        Ok(())
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|(n, _)| n == name)
    }

    pub fn nodes(&self) -> &[(String, Arc<WeilAlgebra>)] {
        &self.nodes
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len() + 1);
        let mut acc = 0;
        for (_, a) in &self.nodes {
            out.push(acc);
            acc += a.dim();
        }
        out.push(acc);
        out
    }

    /// Sum of the node dimensions.
    pub fn total_dim(&self) -> usize {
        self.nodes.iter().map(|(_, a)| a.dim()).sum()
    }

    /// Rows `f(x_src) - x_dst` for every arrow, over the concatenated space.
    fn constraints(&self) -> Matrix {
        let offsets = self.offsets();
        let total = self.total_dim();
        let mut rows = Vec::new();
        for arrow in &self.arrows {
            let m = arrow.hom.matrix();
            let (so, to) = (offsets[arrow.source], offsets[arrow.target]);
            for (r, mrow) in m.iter().enumerate() {
                let mut row = vec![Rational::zero(); total];
                for (c, v) in mrow.iter().enumerate() {
                    row[so + c] += v;
                }
                row[to + r] -= Rational::from_integer(1.into());
                rows.push(row);
            }
        }
        rows
    }
}

/// An apex with one leg per node, in node order.
#[derive(Clone, Debug)]
pub struct Cone {
    pub apex: Arc<WeilAlgebra>,
    pub legs: Vec<AlgebraHom>,
}

/// The compatibility subspace of the product of the node spaces.
#[derive(Clone, Debug)]
pub struct LimitSpace {
    pub basis: Matrix,
    pub ambient_dim: usize,
}

impl LimitSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn compute_limit(d: &WeilDiagram) -> LimitSpace {
    let total = d.total_dim();
    LimitSpace { basis: linalg::kernel(&d.constraints(), total), ambient_dim: total }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeVerdict {
    pub commutes: bool,
    pub bijective: bool,
    pub limit_dim: usize,
    pub apex_dim: usize,
    /// First arrow along which the legs fail to commute.
    pub failing_arrow: Option<String>,
}

impl ConeVerdict {
    pub fn is_limit(&self) -> bool {
        self.commutes && self.bijective
    }
}

fn check_shape(d: &WeilDiagram, c: &Cone) -> Result<()> {
    if c.legs.len() != d.nodes.len() {
        return Err(Error::MalformedCone(format!("{} legs for {} nodes", c.legs.len(), d.nodes.len())));
    }
    for (leg, (name, alg)) in c.legs.iter().zip(&d.nodes) {
        if leg.domain().object() != c.apex.object() {
            return Err(Error::MalformedCone(format!("leg to `{name}` does not start at the apex")));
        }
        if leg.codomain().object() != alg.object() {
            return Err(Error::MalformedCone(format!(
                "leg to `{name}` lands in {}, node is {}",
                leg.codomain().object(),
                alg.object()
            )));
        }
    }
    Ok(())
}

/// Stacked leg matrix: `total_dim` rows by `apex_dim` columns.
fn stacked_legs(d: &WeilDiagram, c: &Cone) -> Matrix {
    let mut rows = Vec::with_capacity(d.total_dim());
    for leg in &c.legs {
        rows.extend(leg.matrix());
    }
    rows
}

pub fn verify_cone(d: &WeilDiagram, c: &Cone) -> Result<ConeVerdict> {
    check_shape(d, c)?;
    let mut failing_arrow = None;
    for arrow in &d.arrows {
        let via_source = c.legs[arrow.source].then(&arrow.hom)?;
        if via_source != c.legs[arrow.target] {
            failing_arrow = Some(arrow.name.clone());
            break;
        }
    }
    let limit_dim = compute_limit(d).dim();
    let apex_dim = c.apex.dim();
    let injective = linalg::rank(&stacked_legs(d, c), apex_dim) == apex_dim;
    Ok(ConeVerdict {
        commutes: failing_arrow.is_none(),
        bijective: injective && apex_dim == limit_dim,
        limit_dim,
        apex_dim,
        failing_arrow,
    })
}

/// A cone that passed verification, with a precomputed left inverse of
/// its stacked legs.
#[derive(Clone, Debug)]
pub struct VerifiedLimit {
    diagram: WeilDiagram,
    cone: Cone,
    verdict: ConeVerdict,
    rows: Vec<usize>,
    inverse: Matrix,
}

impl VerifiedLimit {
    pub fn new(diagram: WeilDiagram, cone: Cone) -> Result<Self> {
        let verdict = verify_cone(&diagram, &cone)?;
        if !verdict.is_limit() {
            return Err(Error::NotALimit {
                limit_dim: verdict.limit_dim,
                apex_dim: verdict.apex_dim,
                commutes: verdict.commutes,
            });
        }
        let legs = stacked_legs(&diagram, &cone);
        let apex_dim = cone.apex.dim();
        let rows = linalg::independent_rows(&legs, apex_dim);
        let square: Matrix = rows.iter().map(|&r| legs[r].clone()).collect();
        let inverse = linalg::inverse(&square).expect("independent rows form an invertible block");
        Ok(VerifiedLimit { diagram, cone, verdict, rows, inverse })
    }

    pub fn diagram(&self) -> &WeilDiagram {
        &self.diagram
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn verdict(&self) -> &ConeVerdict {
        &self.verdict
    }

    pub fn apex(&self) -> &Arc<WeilAlgebra> {
        &self.cone.apex
    }

    /// Checks every arrow constraint on a family, one element per node.
    pub fn check_family<C: Coefficient>(&self, family: &[Element<C>]) -> Result<()> {
        if family.len() != self.diagram.nodes.len() {
            return Err(Error::ArityMismatch { expected: self.diagram.nodes.len(), found: family.len() });
        }
        for (elt, (_, alg)) in family.iter().zip(&self.diagram.nodes) {
            if elt.algebra().object() != alg.object() {
                return Err(Error::AlgebraMismatch {
                    left: alg.object().to_string(),
                    right: elt.algebra().object().to_string(),
                });
            }
        }
        for arrow in &self.diagram.arrows {
            if arrow.hom.apply(&family[arrow.source])? != family[arrow.target] {
                return Err(Error::IncompatibleFamily { arrow: arrow.name.clone() });
            }
        }
        Ok(())
    }

    /// The unique apex element whose legs give `family`.
    pub fn lift<C: Coefficient>(&self, family: &[Element<C>]) -> Result<Element<C>> {
        self.check_family(family)?;
        let offsets = self.diagram.offsets();
        let node_of = |row: usize| offsets.partition_point(|&o| o <= row) - 1;
        let values: Vec<C> = self
            .rows
            .iter()
            .map(|&r| {
                let node = node_of(r);
                family[node].coeff(r - offsets[node])
            })
            .collect();
        let terms = self.inverse.iter().enumerate().map(|(j, inv_row)| {
            let mut acc = C::zero_value();
            for (coef, v) in inv_row.iter().zip(&values) {
                if !coef.is_zero() && !v.vanishes() {
                    acc = acc.plus(&v.scale(coef));
                }
            }
            (j, acc)
        });
        Ok(Element::from_coeffs(self.apex(), terms.collect::<Vec<_>>()))
    }

    /// Coordinatewise lift of a family of points of equal width.
    pub fn lift_point<C: Coefficient>(&self, family: &[WeilPoint<C>]) -> Result<WeilPoint<C>> {
        let k = family.first().map(WeilPoint::k).unwrap_or(0);
        if family.iter().any(|p| p.k() != k) {
            return Err(Error::ArityMismatch { expected: k, found: family.iter().map(WeilPoint::k).max().unwrap_or(0) });
        }
        // Check compatibility on whole points first so the failing arrow is
        // reported independent of which coordinate breaks.
        for arrow in &self.diagram.arrows {
            if family[arrow.source].apply_hom(&arrow.hom)? != family[arrow.target] {
                return Err(Error::IncompatibleFamily { arrow: arrow.name.clone() });
            }
        }
        let coords = (0..k)
            .map(|i| {
                let fam: Vec<Element<C>> = family.iter().map(|p| p.coords()[i].clone()).collect();
                self.lift(&fam)
            })
            .collect::<Result<Vec<_>>>()?;
        WeilPoint::new(self.apex(), coords)
    }

    /// Images of an apex element under every leg.
    pub fn project<C: Coefficient>(&self, x: &Element<C>) -> Result<Vec<Element<C>>> {
        self.cone.legs.iter().map(|leg| leg.apply(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::WeilElement;
    use crate::object::{InfinitesimalMap, InfinitesimalObject};
    use crate::poly::{int, Evaluate, Polynomial};

    fn hom(src: InfinitesimalObject, dst: InfinitesimalObject, comps: Vec<Polynomial>) -> AlgebraHom {
        AlgebraHom::induced(&InfinitesimalMap::new(src, dst, comps).unwrap())
    }

    /// Two copies of W_D over W_1, with apex W_{D(2)}.
    fn tangent_pullback() -> (WeilDiagram, Cone) {
        let d = InfinitesimalObject::d();
        let one = InfinitesimalObject::point();
        let pair = InfinitesimalObject::pairwise(2);
        let to_base = hom(one.clone(), d.clone(), vec![Polynomial::zero(0)]);
        let mut diag = WeilDiagram::new();
        diag.add_node("left", WeilAlgebra::of(&d)).unwrap();
        diag.add_node("right", WeilAlgebra::of(&d)).unwrap();
        diag.add_node("base", WeilAlgebra::of(&one)).unwrap();
        diag.add_arrow("l", "left", "base", to_base.clone()).unwrap();
        diag.add_arrow("r", "right", "base", to_base.clone()).unwrap();
        let legs = vec![
            hom(d.clone(), pair.clone(), vec![Polynomial::var(1, 0), Polynomial::zero(1)]),
            hom(d.clone(), pair.clone(), vec![Polynomial::zero(1), Polynomial::var(1, 0)]),
            hom(one.clone(), pair.clone(), vec![Polynomial::zero(0), Polynomial::zero(0)]),
        ];
        (diag, Cone { apex: WeilAlgebra::of(&pair), legs })
    }

    #[test]
    fn tangent_pullback_is_a_limit() {
        let (diag, cone) = tangent_pullback();
        assert_eq!(compute_limit(&diag).dim(), 3);
        let v = verify_cone(&diag, &cone).unwrap();
        assert!(v.is_limit(), "{v:?}");
    }

    #[test]
    fn point_diagram() {
        let mut diag = WeilDiagram::new();
        diag.add_node("only", WeilAlgebra::of(&InfinitesimalObject::d())).unwrap();
        assert_eq!(compute_limit(&diag).dim(), 2);
    }

    #[test]
    fn oversized_apex_is_rejected() {
        let (diag, _) = tangent_pullback();
        let sq = InfinitesimalObject::power(2);
        let d = InfinitesimalObject::d();
        let legs = vec![
            hom(d.clone(), sq.clone(), vec![Polynomial::var(1, 0), Polynomial::zero(1)]),
            hom(d.clone(), sq.clone(), vec![Polynomial::zero(1), Polynomial::var(1, 0)]),
            hom(InfinitesimalObject::point(), sq.clone(), vec![Polynomial::zero(0), Polynomial::zero(0)]),
        ];
        let v = verify_cone(&diag, &Cone { apex: WeilAlgebra::of(&sq), legs }).unwrap();
        assert!(v.commutes);
        assert!(!v.bijective);
        assert_eq!((v.limit_dim, v.apex_dim), (3, 4));
    }

    #[test]
    fn lift_round_trip_and_incompatibility() {
        let (diag, cone) = tangent_pullback();
        let lim = VerifiedLimit::new(diag, cone).unwrap();
        let apex = lim.apex().clone();
        let x = WeilElement::from_coeffs(&apex, [(0, int(2)), (1, int(3)), (2, int(-5))]);
        let fam = lim.project(&x).unwrap();
        assert_eq!(lim.lift(&fam).unwrap(), x);
        let mut bad = fam.clone();
        bad[1] = bad[1].plus(&WeilElement::constant(bad[1].algebra(), int(1)));
        assert_eq!(lim.lift(&bad), Err(Error::IncompatibleFamily { arrow: "r".into() }));
    }

    #[test]
    fn malformed_cone() {
        let (diag, mut cone) = tangent_pullback();
        cone.legs.pop();
        assert!(matches!(verify_cone(&diag, &cone), Err(Error::MalformedCone(_))));
    }
}
