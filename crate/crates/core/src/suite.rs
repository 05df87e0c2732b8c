//! The built-in verification suite: limit diagrams, dimension counts and
//! randomized exact trials of every identity the library relies on.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraHom, WeilAlgebra};
use crate::diagrams::{catalog, CatalogEntry, ENTRIES, SEXTUPLE};
use crate::error::{Error, Result};
use crate::object::{InfinitesimalMap, InfinitesimalObject};
use crate::poly::{int, Monomial, Polynomial, Rational};
use crate::random::{
    compatible_sextuple, compatible_triple, nonzero_rational, perturb, perturb_top, random_field, random_flow,
    random_flow_point, random_tangent, rational_vector, shift_coefficient, small_rational, stream,
};
use crate::report::{Record, Report};
use crate::runner::verdict_record;
use crate::tangent::{
    bracket_via_strong_diff, ell_combine, encode_sextuple, encode_triple, field_to_flow, general_jacobi,
    jacobi_terms_from_encoding, jacobi_witness, lie_bracket, primordial_jacobi, star, strong_diff, strong_diff_axis,
    swap, tangent_add, tangent_neg, tangent_scale, tangent_sum, tangent_zero, FlowElement, TangentVector, VectorField,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    /// `None` runs every section.
    pub section: Option<u8>,
    pub trials: usize,
    pub seed: u64,
    /// Largest model dimension `k`; trials cycle through `1..=dim`.
    pub dim: usize,
    pub degree: u32,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { section: None, trials: 10, seed: 42, dim: 2, degree: 2 }
    }
}

pub const SECTIONS: [u8; 4] = [3, 4, 5, 6];

pub fn run_suite(opts: &SuiteOptions) -> Report {
    let mut report = Report::default();
    for s in SECTIONS {
        if opts.section.is_none_or(|want| want == s) {
            report.extend(run_section(s, opts));
        }
    }
    report
}

pub fn run_section(section: u8, opts: &SuiteOptions) -> Report {
    match section {
        3 => tangent_section(opts),
        4 => composition_section(opts),
        5 => difference_section(opts),
        6 => bridge_section(opts),
        _ => Report::default(),
    }
}

fn sq() -> InfinitesimalObject {
    InfinitesimalObject::power(2)
}

fn hom(src: InfinitesimalObject, dst: InfinitesimalObject, comps: Vec<Polynomial>) -> Result<AlgebraHom> {
    Ok(AlgebraHom::induced(&InfinitesimalMap::new(src, dst, comps)?))
}

fn v(n: usize, i: usize) -> Polynomial {
    Polynomial::var(n, i)
}

fn timed(f: impl FnOnce() -> Record) -> Record {
    let start = Instant::now();
    let mut r = f();
    r.duration = start.elapsed();
    r
}

/// Runs `body` once per trial with `k` cycling through `1..=max_k`.
fn trials(
    opts: &SuiteOptions,
    stream_id: u64,
    max_k: usize,
    record: Record,
    mut body: impl FnMut(&mut ChaCha8Rng, usize) -> Result<bool>,
) -> Record {
    timed(|| {
        let mut rng = stream(opts.seed, stream_id);
        let mut passed = 0;
        let mut first_failure = None;
        for t in 0..opts.trials {
            let k = 1 + t % max_k.max(1);
            match body(&mut rng, k) {
                Ok(true) => passed += 1,
                Ok(false) => {
                    first_failure.get_or_insert_with(|| format!("trial {t} (k = {k}): identity does not hold"));
                }
                Err(e) => {
                    first_failure.get_or_insert_with(|| format!("trial {t} (k = {k}): {e}"));
                }
            }
        }
        let mut r = record.detail("trials", opts.trials).detail("passed", passed).detail("max_k", max_k);
        if let Some(f) = first_failure {
            r.set("first_failure", f);
        }
        r.passed(passed == opts.trials)
    })
}

fn cone_record(entry: &CatalogEntry) -> Record {
    timed(|| {
        let r = Record::new(entry.cone, "limit", entry.label);
        match catalog().verdict(entry.cone) {
            Some(v) => verdict_record(r, v),
            None => r.errored(&catalog().limit(entry.cone).err().unwrap_or(Error::MalformedCone(entry.cone.into()))),
        }
    })
}

// ---------------------------------------------------------------- tangent spaces

fn tangent_section(opts: &SuiteOptions) -> Report {
    let mut rep = Report::default();
    rep.push(cone_record(&ENTRIES[0]));
    let k = opts.dim;
    let anchor = "tangent vector space";
    type Law = fn(&TangentVector, &TangentVector, &TangentVector, &Rational, &Rational) -> Result<bool>;
    let laws: [(&str, Law); 8] = [
        ("addition is associative", |a, b, c, _, _| {
            Ok(tangent_add(&tangent_add(a, b)?, c)? == tangent_add(a, &tangent_add(b, c)?)?)
        }),
        ("addition is commutative", |a, b, _, _, _| Ok(tangent_add(a, b)? == tangent_add(b, a)?)),
        ("zero is an identity", |a, _, _, _, _| Ok(tangent_add(a, &tangent_zero(&a.base))? == *a)),
        ("negation is an inverse", |a, _, _, _, _| Ok(tangent_add(a, &tangent_neg(a))? == tangent_zero(&a.base))),
        ("scaling distributes over addition", |a, b, _, s, _| {
            Ok(tangent_scale(s, &tangent_add(a, b)?) == tangent_add(&tangent_scale(s, a), &tangent_scale(s, b))?)
        }),
        ("scalar addition distributes", |a, _, _, s, t| {
            Ok(tangent_scale(&(s + t), a) == tangent_add(&tangent_scale(s, a), &tangent_scale(t, a))?)
        }),
        ("scaling is associative", |a, _, _, s, t| Ok(tangent_scale(&(s * t), a) == tangent_scale(s, &tangent_scale(t, a)))),
        ("unit scalar", |a, _, _, _, _| Ok(tangent_scale(&int(1), a) == *a)),
    ];
    for (i, (name, law)) in laws.iter().enumerate() {
        rep.push(trials(opts, 300 + i as u64, k, Record::new(*name, "property", anchor), |rng, k| {
            let x = rational_vector(rng, k);
            let (a, b, c) = (random_tangent(rng, &x), random_tangent(rng, &x), random_tangent(rng, &x));
            let (s, t) = (small_rational(rng), small_rational(rng));
            law(&a, &b, &c, &s, &t)
        }));
    }
    rep.push(trials(opts, 310, k, Record::new("sum through W_D(2) is the coefficient sum", "property", anchor), |rng, k| {
        let x = rational_vector(rng, k);
        let (a, b) = (random_tangent(rng, &x), random_tangent(rng, &x));
        let want: Vec<Rational> = a.dir.iter().zip(&b.dir).map(|(p, q)| p + q).collect();
        Ok(tangent_add(&a, &b)?.dir == want)
    }));
    rep.push(trials(opts, 311, k, Record::new("combined tangents project back", "property", "tangent n-tuples over D(n)"), |rng, k| {
        let x = rational_vector(rng, k);
        let n = rng.gen_range(1..=3);
        let ts: Vec<_> = (0..n).map(|_| random_tangent(rng, &x).to_point()).collect();
        let l = ell_combine(&ts)?;
        for (j, t) in ts.iter().enumerate() {
            let comps = (0..n).map(|i| if i == j { v(1, 0) } else { Polynomial::zero(1) }).collect();
            let inj = hom(InfinitesimalObject::d(), InfinitesimalObject::pairwise(n), comps)?;
            if l.apply_hom(&inj)? != *t {
                return Ok(false);
            }
        }
        Ok(true)
    }));
    rep.push(timed(|| {
        let r = Record::new("tangents at different points are rejected", "property", anchor);
        let a = TangentVector { base: vec![int(0)], dir: vec![int(1)] };
        let b = TangentVector { base: vec![int(1)], dir: vec![int(1)] };
        r.passed(tangent_add(&a, &b) == Err(Error::BaseMismatch))
    }));
    rep
}

// ---------------------------------------------------------------- composition and brackets

fn random_linear_field<R: Rng>(rng: &mut R, k: usize) -> (Vec<Vec<i64>>, VectorField) {
    let m: Vec<Vec<i64>> = (0..k).map(|_| (0..k).map(|_| rng.gen_range(-3..=3)).collect()).collect();
    let comps = m
        .iter()
        .map(|row| row.iter().enumerate().fold(Polynomial::zero(k), |acc, (j, c)| acc.add(&v(k, j).scale_by(&int(*c)))))
        .collect();
    (m, VectorField::from_components(k, comps).expect("square"))
}

fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let k = a.len();
    (0..k).map(|i| (0..k).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect()).collect()
}

fn composition_section(opts: &SuiteOptions) -> Report {
    let mut rep = Report::default();
    rep.push(cone_record(&ENTRIES[9]));
    let (k, deg) = (opts.dim, opts.degree);

    rep.push(trials(opts, 400, k, Record::new("composition is associative", "property", "composition of microflows"), |rng, k| {
        let (x, y, z) = (random_field(rng, k, deg), random_field(rng, k, deg), random_field(rng, k, deg));
        let (fx, fy, fz) = (field_to_flow(&x), field_to_flow(&y), field_to_flow(&z));
        Ok(star(&star(&fx, &fy)?, &fz)? == star(&fx, &star(&fy, &fz)?)?)
    }));

    rep.push(trials(opts, 401, k, Record::new("identity flows are units", "property", "composition of microflows"), |rng, k| {
        let m = rng.gen_range(1..=2);
        let g = random_flow(rng, &InfinitesimalObject::power(m), k, deg);
        for l in 1..=2 {
            let id = FlowElement::identity(&InfinitesimalObject::power(l), k);
            let last = hom(InfinitesimalObject::power(l + m), InfinitesimalObject::power(m), (l..l + m).map(|i| v(l + m, i)).collect())?;
            let first = hom(InfinitesimalObject::power(m + l), InfinitesimalObject::power(m), (0..m).map(|i| v(m + l, i)).collect())?;
            if star(&id, &g)? != g.apply_hom(&last)? || star(&g, &id)? != g.apply_hom(&first)? {
                return Ok(false);
            }
        }
        Ok(true)
    }));

    let pair = InfinitesimalObject::pairwise(2);
    let p1 = hom(pair.clone(), InfinitesimalObject::d(), vec![v(2, 0)]).expect("projection");
    let p2 = hom(pair.clone(), InfinitesimalObject::d(), vec![v(2, 1)]).expect("projection");

    rep.push(trials(opts, 402, k, Record::new("flow of a sum over D(2)", "property", "vector fields as microflows"), |rng, k| {
        let x = random_field(rng, k, deg);
        let fx = field_to_flow(&x);
        let plus = hom(pair.clone(), InfinitesimalObject::d(), vec![v(2, 0).add(&v(2, 1))])?;
        let along_sum = fx.apply_hom(&plus)?;
        let composed = fx.apply_hom(&p1)?.compose_same(&fx.apply_hom(&p2)?)?;
        let restricted = star(&fx, &fx)?.apply_hom(catalog().hom("rim"))?;
        Ok(along_sum == composed && along_sum == restricted)
    }));

    rep.push(trials(opts, 403, k, Record::new("opposite contractions give the identity", "property", "vector fields as microflows"), |rng, k| {
        let x = random_field(rng, k, deg);
        let xx = star(&field_to_flow(&x), &field_to_flow(&x))?;
        let id = FlowElement::identity(&InfinitesimalObject::d(), k);
        let a = hom(InfinitesimalObject::d(), sq(), vec![v(1, 0), v(1, 0).neg()])?;
        let b = hom(InfinitesimalObject::d(), sq(), vec![v(1, 0).neg(), v(1, 0)])?;
        Ok(xx.apply_hom(&a)? == id && xx.apply_hom(&b)? == id)
    }));

    rep.push(trials(opts, 404, k, Record::new("both composition orders give l(X,Y)", "property", "vector fields as microflows"), |rng, k| {
        let (x, y) = (random_field(rng, k, deg), random_field(rng, k, deg));
        let (fx, fy) = (field_to_flow(&x), field_to_flow(&y));
        let l = ell_combine(&[fx.point().clone(), fy.point().clone()])?;
        let xy = fx.apply_hom(&p1)?.compose_same(&fy.apply_hom(&p2)?)?;
        let yx = fy.apply_hom(&p2)?.compose_same(&fx.apply_hom(&p1)?)?;
        Ok(*xy.point() == l && *yx.point() == l)
    }));

    rep.push(trials(opts, 405, k, Record::new("commutator loop factors; bracket is J_Y X - J_X Y", "property", "Lie bracket"), |rng, k| {
        let (x, y) = (random_field(rng, k, deg), random_field(rng, k, deg));
        Ok(lie_bracket(&x, &y)? == x.jacobian_bracket(&y)?)
    }));

    rep.push(trials(opts, 406, k, Record::new("linear fields: bracket is (BA - AB)x", "property", "Lie bracket"), |rng, k| {
        let ((a, x), (b, y)) = (random_linear_field(rng, k), random_linear_field(rng, k));
        let (ba, ab) = (matmul(&b, &a), matmul(&a, &b));
        let diff: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| ba[i][j] - ab[i][j]).collect()).collect();
        let want = diff
            .iter()
            .map(|row| row.iter().enumerate().fold(Polynomial::zero(k), |acc, (j, c)| acc.add(&v(k, j).scale_by(&int(*c)))))
            .collect();
        Ok(lie_bracket(&x, &y)? == VectorField::from_components(k, want)?)
    }));

    rep.push(trials(opts, 407, k, Record::new("bracket of a field with itself vanishes", "property", "Lie bracket"), |rng, k| {
        let x = random_field(rng, k, deg);
        Ok(lie_bracket(&x, &x)?.is_zero())
    }));

    rep.push(trials(opts, 408, k, Record::new("bracket is antisymmetric", "property", "antisymmetry of the bracket"), |rng, k| {
        let (x, y) = (random_field(rng, k, deg), random_field(rng, k, deg));
        let (xy, yx) = (lie_bracket(&x, &y)?, lie_bracket(&y, &x)?);
        let loop_ = star(&field_to_flow(&xy), &field_to_flow(&yx))?;
        let both = hom(sq(), sq(), vec![v(2, 0).mul(&v(2, 1)), v(2, 0).mul(&v(2, 1))])?;
        Ok(xy == yx.scale(&int(-1)) && loop_.apply_hom(&both)? == FlowElement::identity(&sq(), k))
    }));
    rep
}

// ---------------------------------------------------------------- strong differences and Jacobi

fn difference_section(opts: &SuiteOptions) -> Report {
    let mut rep = Report::default();
    for entry in &ENTRIES[1..9] {
        rep.push(cone_record(entry));
    }
    rep.push(cone_record(&SEXTUPLE));
    rep.push(timed(|| {
        let cat = catalog();
        let dim = |name: &str| WeilAlgebra::of(cat.object(name)).dim();
        let g_limit = cat.verdict(SEXTUPLE.cone).map(|v| v.limit_dim).unwrap_or(0);
        let dims = [dim("E"), dim("E1"), dim("E2"), dim("E3"), dim("G")];
        Record::new("Weil algebra dimensions", "dimension", "objects of the Jacobi diagrams")
            .detail("dim_W_E", dims[0])
            .detail("dim_W_E1", dims[1])
            .detail("dim_W_E2", dims[2])
            .detail("dim_W_E3", dims[3])
            .detail("dim_W_G", dims[4])
            .detail("sextuple_limit_dim", g_limit)
            .passed(dims[..4] == [6, 17, 17, 17] && dims[4] == g_limit)
    }));
    let (k, deg) = (opts.dim, opts.degree);

    rep.push(trials(opts, 500, k, Record::new("strong difference is b12 - a12", "property", "strong difference"), |rng, k| {
        let [a, b, _] = compatible_triple(rng, k, deg);
        let t = strong_diff(&a, &b)?;
        let top = a.algebra().index_of(&Monomial::squarefree(&[0, 1])).expect("d1 d2");
        let want: Vec<Polynomial> = a.component(top).iter().zip(b.component(top)).map(|(p, q)| q.sub(p)).collect();
        Ok(t.base() == a.base() && t.component(1) == want)
    }));

    rep.push(trials(opts, 501, k, Record::new("axis-1 strong difference in coefficients", "property", "strong difference of microcubes"), |rng, k| {
        let cube = WeilAlgebra::of(&InfinitesimalObject::power(3));
        let a = random_flow_point(rng, &cube, k, deg);
        let m = |v: &[usize]| cube.index_of(&Monomial::squarefree(v)).expect("cube monomial");
        let (i23, i123) = (m(&[1, 2]), m(&[0, 1, 2]));
        let b = perturb(rng, &a, &[i23, i123], k, deg);
        let t = strong_diff_axis(&a, &b, 1)?;
        let sqa = t.algebra();
        let s = |v: &[usize]| sqa.index_of(&Monomial::squarefree(v)).expect("square monomial");
        let diff = |i: usize| -> Vec<Polynomial> { a.component(i).iter().zip(b.component(i)).map(|(p, q)| q.sub(p)).collect() };
        Ok(t.base() == a.base() && t.component(s(&[0])) == a.component(m(&[0])) && t.component(s(&[1])) == diff(i23) && t.component(s(&[0, 1])) == diff(i123))
    }));

    rep.push(trials(opts, 502, k, Record::new("primordial Jacobi identity", "property", "Jacobi identity for microsquares"), |rng, k| {
        let [g1, g2, g3] = compatible_triple(rng, k, deg);
        let out = primordial_jacobi(&g1, &g2, &g3)?;
        let e = encode_triple(&g1, &g2, &g3)?;
        let cat = catalog();
        let encoded = [e.apply_hom(cat.hom("tri_t1"))?, e.apply_hom(cat.hom("tri_t2"))?, e.apply_hom(cat.hom("tri_t3"))?];
        Ok(out.vanishes() && encoded == out.terms)
    }));

    rep.push(trials(opts, 503, k, Record::new("incompatible microsquares are rejected", "property", "Jacobi identity for microsquares"), |rng, k| {
        let [g1, g2, g3] = compatible_triple(rng, k, deg);
        let d1 = g2.algebra().variable_index(0).expect("d1");
        let broken = shift_coefficient(&g2, d1, nonzero_rational(rng));
        Ok(matches!(primordial_jacobi(&g1, &broken, &g3), Err(Error::IncompatibleFamily { .. })))
    }));

    rep.push(trials(opts, 504, k, Record::new("general Jacobi identity", "property", "Jacobi identity for microcubes"), |rng, k| {
        let six = compatible_sextuple(rng, k, deg);
        let out = general_jacobi(&six)?;
        let m = encode_sextuple(&six)?;
        Ok(out.vanishes() && jacobi_terms_from_encoding(&m)? == out.terms)
    }));
    rep
}

// ---------------------------------------------------------------- fields meet differences

fn bridge_section(opts: &SuiteOptions) -> Report {
    let mut rep = Report::default();
    let (k, deg) = (opts.dim, opts.degree);

    rep.push(trials(opts, 600, k, Record::new("bracket as a strong difference", "property", "brackets from strong differences"), |rng, k| {
        let (x, y) = (random_field(rng, k, deg), random_field(rng, k, deg));
        Ok(bracket_via_strong_diff(&x, &y)? == lie_bracket(&x, &y)?)
    }));

    rep.push(trials(opts, 601, k, Record::new("composition commutes with strong differences", "property", "brackets from strong differences"), |rng, k| {
        let fx = field_to_flow(&random_field(rng, k, deg));
        let g1 = random_flow(rng, &sq(), k, deg);
        let g2 = FlowElement::new(k, perturb_top(rng, g1.point(), k, deg))?;
        let cat = catalog();
        let (xg1, xg2) = (star(&fx, &g1)?, star(&fx, &g2)?);
        let (g1x, g2x) = (star(&g1, &fx)?, star(&g2, &fx)?);
        let faces = xg1.apply_hom(cat.hom("face1"))? == xg2.apply_hom(cat.hom("face1"))?
            && g1x.apply_hom(cat.hom("face3"))? == g2x.apply_hom(cat.hom("face3"))?;
        let diff = FlowElement::new(k, strong_diff(g2.point(), g1.point())?)?;
        let left = strong_diff_axis(xg2.point(), xg1.point(), 1)? == *star(&fx, &diff)?.point();
        let right = strong_diff_axis(g2x.point(), g1x.point(), 3)? == *swap(&star(&diff, &fx)?)?.point();
        Ok(faces && left && right)
    }));

    rep.push(trials(opts, 602, k.max(1), Record::new("Jacobi identity for vector fields", "property", "Jacobi identity for vector fields"), |rng, k| {
        let (x, y, z) = (random_field(rng, k, deg), random_field(rng, k, deg), random_field(rng, k, deg));
        let six = jacobi_witness(&x, &y, &z)?.map(|g| Ok(g.point().clone()))?;
        let out = general_jacobi(&six)?;
        let terms = out.terms.iter().map(|t| FlowElement::new(k, t.clone())?.to_field()).collect::<Result<Vec<_>>>()?;
        let nested = [
            lie_bracket(&x, &lie_bracket(&y, &z)?)?,
            lie_bracket(&y, &lie_bracket(&z, &x)?)?,
            lie_bracket(&z, &lie_bracket(&x, &y)?)?,
        ];
        let sum = nested[0].add(&nested[1])?.add(&nested[2])?;
        let via_sum = FlowElement::new(k, tangent_sum(&out.terms)?)?.to_field()?;
        Ok(out.vanishes() && terms[..] == nested[..] && sum.is_zero() && via_sum.is_zero())
    }));
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let opts = SuiteOptions { trials: 2, ..SuiteOptions::default() };
        let rep = run_suite(&opts);
        assert!(rep.all_pass(), "{}", rep.to_text());
    }

    #[test]
    fn section_filter() {
        let opts = SuiteOptions { section: Some(3), trials: 1, ..SuiteOptions::default() };
        let rep = run_suite(&opts);
        assert!(rep.checks.iter().all(|r| r.anchor.contains("tangent")));
    }

    #[test]
    fn seeded_reports_repeat() {
        let opts = SuiteOptions { section: Some(4), trials: 2, seed: 9, ..SuiteOptions::default() };
        assert_eq!(run_suite(&opts).to_json(), run_suite(&opts).to_json());
    }

    #[test]
    fn nonzero_rationals() {
        let mut rng = stream(0, 0);
        assert!((0..50).all(|_| nonzero_rational(&mut rng) != int(0)));
    }
}
