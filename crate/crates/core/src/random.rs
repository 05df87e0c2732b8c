//! Seeded generators for randomized trials: small rationals, polynomial
//! fields, and compatible families of microsquares and microcubes.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Element, WeilAlgebra};
use crate::diagrams::catalog;
use crate::object::InfinitesimalObject;
use crate::point::WeilPoint;
use crate::poly::{rat, Monomial, Polynomial, Rational};
use crate::tangent::{decode_sextuple, FlowElement, Sextuple, TangentVector, VectorField};

/// A ChaCha stream for one named trial batch.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `p/q` with `|p| <= 4`, `1 <= q <= 3`.
pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    rat(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

pub fn nonzero_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let r = small_rational(rng);
        if r != rat(0, 1) {
            return r;
        }
    }
}

pub fn rational_vector<R: Rng>(rng: &mut R, k: usize) -> Vec<Rational> {
    (0..k).map(|_| small_rational(rng)).collect()
}

/// All exponent vectors in `k` variables of total degree at most `degree`.
fn monomials_up_to(k: usize, degree: u32) -> Vec<Monomial> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| {
                let used: u32 = e.iter().sum();
                (0..=degree - used).map(move |i| {
                    let mut next = e.clone();
                    next.push(i);
                    next
                })
            })
            .collect();
    }
    out.into_iter().map(Monomial::from_exponents).collect()
}

/// A sparse polynomial in `k` variables of degree at most `degree`; each
/// monomial is present with probability one half.
pub fn random_polynomial<R: Rng>(rng: &mut R, k: usize, degree: u32) -> Polynomial {
    let terms = monomials_up_to(k, degree)
        .into_iter()
        .filter_map(|m| rng.gen_bool(0.5).then(|| (m, nonzero_rational(rng))))
        .collect::<Vec<_>>();
    Polynomial::from_terms(k, terms)
}

pub fn random_field<R: Rng>(rng: &mut R, k: usize, degree: u32) -> VectorField {
    VectorField::from_components(k, (0..k).map(|_| random_polynomial(rng, k, degree)).collect()).expect("square field")
}

pub fn random_tangent<R: Rng>(rng: &mut R, base: &[Rational]) -> TangentVector {
    TangentVector { base: base.to_vec(), dir: rational_vector(rng, base.len()) }
}

/// An id-based point over `alg`: base `x`, random polynomial coefficients
/// on every other basis monomial.
pub fn random_flow_point<R: Rng>(rng: &mut R, alg: &Arc<WeilAlgebra>, k: usize, degree: u32) -> WeilPoint<Polynomial> {
    let coords = (0..k)
        .map(|i| {
            let rest = (1..alg.dim()).map(|idx| (idx, random_polynomial(rng, k, degree)));
            Element::from_coeffs(alg, std::iter::once((0, Polynomial::var(k, i))).chain(rest))
        })
        .collect();
    WeilPoint::new(alg, coords).expect("k coordinates")
}

pub fn random_flow<R: Rng>(rng: &mut R, obj: &InfinitesimalObject, k: usize, degree: u32) -> FlowElement {
    FlowElement::new(k, random_flow_point(rng, &WeilAlgebra::of(obj), k, degree)).expect("k coordinates")
}

/// `g` with fresh random coefficients at the given basis indices.
pub fn perturb<R: Rng>(rng: &mut R, g: &WeilPoint<Polynomial>, indices: &[usize], k: usize, degree: u32) -> WeilPoint<Polynomial> {
    let alg = g.algebra();
    let coords = g
        .coords()
        .iter()
        .map(|c| {
            let kept = c.coeffs().filter(|(idx, _)| !indices.contains(idx)).map(|(idx, p)| (idx, p.clone()));
            let fresh: Vec<_> = indices.iter().map(|&idx| (idx, random_polynomial(rng, k, degree))).collect();
            Element::from_coeffs(alg, kept.chain(fresh))
        })
        .collect();
    WeilPoint::new(alg, coords).expect("same arity")
}

/// `g` with a fresh random `d1 d2` coefficient.
pub fn perturb_top<R: Rng>(rng: &mut R, g: &WeilPoint<Polynomial>, k: usize, degree: u32) -> WeilPoint<Polynomial> {
    let top = g.algebra().index_of(&Monomial::squarefree(&[0, 1])).expect("microsquare");
    perturb(rng, g, &[top], k, degree)
}

/// `g` with `c` added to the first coordinate's coefficient at `idx`.
pub fn shift_coefficient(g: &WeilPoint<Polynomial>, idx: usize, c: Rational) -> WeilPoint<Polynomial> {
    let alg = g.algebra();
    let mut coords = g.coords().to_vec();
    let k = g.k();
    let bump = Element::basis_term(alg, idx, Polynomial::constant(k, c));
    coords[0] = coords[0].add(&bump).expect("same algebra");
    WeilPoint::new(alg, coords).expect("same arity")
}

/// Three microsquares sharing everything but their `d1 d2` parts.
pub fn compatible_triple<R: Rng>(rng: &mut R, k: usize, degree: u32) -> [WeilPoint<Polynomial>; 3] {
    let sq = WeilAlgebra::of(&InfinitesimalObject::power(2));
    let g1 = random_flow_point(rng, &sq, k, degree);
    let g2 = perturb_top(rng, &g1, k, degree);
    let g3 = perturb_top(rng, &g1, k, degree);
    [g1, g2, g3]
}

/// Six microcubes decoded from a random point over `W_G`, so every
/// agreement the general Jacobi identity needs holds.
pub fn compatible_sextuple<R: Rng>(rng: &mut R, k: usize, degree: u32) -> Sextuple<WeilPoint<Polynomial>> {
    let g = WeilAlgebra::of(catalog().object("G"));
    let m = random_flow_point(rng, &g, k, degree);
    decode_sextuple(&m).expect("catalog maps compose")
}
