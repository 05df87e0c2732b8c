//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Every comparison is exact (rational arithmetic, tolerance 0). Runtime
//! budgets are pinned below.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use weilcalc::diagrams::{catalog, ENTRIES, SEXTUPLE};
use weilcalc::limits::verify_cone;
use weilcalc::poly::{int, Monomial, Polynomial};
use weilcalc::random::{compatible_sextuple, compatible_triple, random_field, stream};
use weilcalc::report::{Report, Status};
use weilcalc::script::parse_object;
use weilcalc::suite::{run_section, SuiteOptions};
use weilcalc::tangent::{
    bracket_via_strong_diff, commutator_loop, general_jacobi, jacobi_witness, lie_bracket, primordial_jacobi,
    FlowElement, VectorField,
};
use weilcalc::{InfinitesimalObject, WeilAlgebra};

const CONE_BUDGET: Duration = Duration::from_secs(10);
const JACOBI_BUDGET: Duration = Duration::from_secs(60);
const SEED: u64 = 20_240_601;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- oracles

/// Square-free monomials in `n` variables avoiding every listed product.
fn enumerate_dim(n: usize, relations: &[Vec<usize>]) -> usize {
    (0u32..1 << n)
        .filter(|mask| relations.iter().all(|r| !r.iter().all(|&i| mask & (1 << (i - 1)) != 0)))
        .count()
}

fn pairs(n: usize) -> Vec<Vec<usize>> {
    (1..=n).flat_map(|i| (i + 1..=n).map(move |j| vec![i, j])).collect()
}

fn lib_dim(obj: &InfinitesimalObject) -> usize {
    WeilAlgebra::of(obj).dim()
}

/// `a + b eps` with `eps^2 = 0`, polynomial coefficients.
#[derive(Clone)]
struct Dual {
    re: Polynomial,
    eps: Polynomial,
}

impl Dual {
    fn mul(&self, o: &Dual) -> Dual {
        Dual { re: self.re.mul(&o.re), eps: self.re.mul(&o.eps).add(&self.eps.mul(&o.re)) }
    }
}

/// `J_F(x) v`, read off `F(x + eps v)`.
fn directional(f: &VectorField, v: &[Polynomial]) -> Vec<Polynomial> {
    let k = f.k();
    let at: Vec<Dual> = (0..k).map(|i| Dual { re: Polynomial::var(k, i), eps: v[i].clone() }).collect();
    f.components()
        .iter()
        .map(|comp| {
            let mut eps = Polynomial::zero(k);
            for (m, c) in comp.terms() {
                let mut term = Dual { re: Polynomial::constant(k, c.clone()), eps: Polynomial::zero(k) };
                for (i, x) in at.iter().enumerate() {
                    for _ in 0..m.exponent(i) {
                        term = term.mul(x);
                    }
                }
                eps = eps.add(&term.eps);
            }
            eps
        })
        .collect()
}

fn classical_bracket(x: &VectorField, y: &VectorField) -> Vec<Polynomial> {
    let a = directional(y, x.components());
    let b = directional(x, y.components());
    a.iter().zip(&b).map(|(p, q)| p.sub(q)).collect()
}

type Mat = Vec<Vec<i64>>;

/// The `d1 d2` coefficient of `(1 - d2 B)(1 - d1 A)(1 + d2 B)(1 + d1 A)`,
/// expanded over the four monomials `1, d1, d2, d1 d2`.
fn loop_coefficient(a: &Mat, b: &Mat) -> Mat {
    let k = a.len();
    let zero = vec![vec![0; k]; k];
    let id: Mat = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
    let matmul = |p: &Mat, q: &Mat| -> Mat {
        (0..k).map(|i| (0..k).map(|j| (0..k).map(|l| p[i][l] * q[l][j]).sum()).collect()).collect()
    };
    let add = |p: &Mat, q: &Mat| -> Mat { (0..k).map(|i| (0..k).map(|j| p[i][j] + q[i][j]).collect()).collect() };
    let neg = |p: &Mat| -> Mat { p.iter().map(|r| r.iter().map(|c| -c).collect()).collect() };
    // index by bitmask over {d1, d2}
    let factor = |bit: usize, m: &Mat| -> [Mat; 4] {
        let mut f = [id.clone(), zero.clone(), zero.clone(), zero.clone()];
        f[bit] = m.clone();
        f
    };
    let times = |p: &[Mat; 4], q: &[Mat; 4]| -> [Mat; 4] {
        let mut out = [zero.clone(), zero.clone(), zero.clone(), zero.clone()];
        for i in 0..4 {
            for j in 0..4 {
                if i & j == 0 {
                    out[i | j] = add(&out[i | j], &matmul(&p[i], &q[j]));
                }
            }
        }
        out
    };
    let prod = times(&times(&times(&factor(2, &neg(b)), &factor(1, &neg(a))), &factor(2, b)), &factor(1, a));
    prod[3].clone()
}

fn linear(m: &Mat) -> VectorField {
    let k = m.len();
    let comps = m
        .iter()
        .map(|row| row.iter().enumerate().fold(Polynomial::zero(k), |acc, (j, c)| acc.add(&Polynomial::var(k, j).scale_by(&int(*c)))))
        .collect();
    VectorField::from_components(k, comps).unwrap()
}

fn section(n: u8, trials: usize, dim: usize) -> Report {
    run_section(n, &SuiteOptions { section: Some(n), trials, seed: SEED, dim, degree: 2 })
}

fn records_pass(rep: &Report, names: &[&str]) -> Outcome {
    let mut seen = Vec::new();
    for name in names {
        let r = rep.checks.iter().find(|r| r.name == *name).ok_or_else(|| format!("no record `{name}`"))?;
        ensure(r.status == Status::Pass, || format!("`{name}`: {:?}", r.details))?;
        seen.push(format!("{} x{}", name, r.details.get("passed").map(|v| v.to_string()).unwrap_or_default()));
    }
    Ok(seen.join("; "))
}

// ---------------------------------------------------------------- criteria

fn c01_dimension_oracle() -> Outcome {
    let d = InfinitesimalObject::d();
    ensure(lib_dim(&d) == 2 && enumerate_dim(1, &[]) == 2, || "dim W_D".into())?;
    for n in 1..=8 {
        let want = n + 1;
        ensure(enumerate_dim(n, &pairs(n)) == want, || format!("oracle D({n})"))?;
        ensure(lib_dim(&InfinitesimalObject::pairwise(n)) == want, || format!("dim W_D({n})"))?;
        ensure(enumerate_dim(n, &[]) == 1 << n, || format!("oracle D^{n}"))?;
        ensure(lib_dim(&InfinitesimalObject::power(n)) == 1 << n, || format!("dim W_D^{n}"))?;
    }
    let sq3 = parse_object("D^3{(1,3)(2,3)}").unwrap();
    let q1 = parse_object("D^4{(2,4)(3,4)}").unwrap();
    let (e3, e4) = (enumerate_dim(3, &[vec![1, 3], vec![2, 3]]), enumerate_dim(4, &[vec![2, 4], vec![3, 4]]));
    ensure(e3 == 5 && lib_dim(&sq3) == 5, || format!("D^3{{(1,3),(2,3)}}: oracle {e3}, lib {}", lib_dim(&sq3)))?;
    ensure(e4 == 10 && lib_dim(&q1) == 10, || format!("D^4{{(2,4),(3,4)}}: oracle {e4}, lib {}", lib_dim(&q1)))?;
    Ok("D=2, D(2)=3, D(n)=n+1, D^n=2^n (n<=8), D^3{(1,3)(2,3)}=5, D^4{(2,4)(3,4)}=10".into())
}

fn c02_e_dimensions() -> Outcome {
    let cat = catalog();
    let e = enumerate_dim(4, &[vec![1, 3], vec![2, 3], vec![1, 4], vec![2, 4], vec![3, 4]]);
    ensure(e == 6 && lib_dim(cat.object("E")) == 6, || format!("dim W_E oracle {e}"))?;
    let tail = |j: usize| -> Vec<Vec<usize>> {
        let mut rels: Vec<Vec<usize>> = (1..=5).filter(|&i| i != j).map(|i| vec![i, 6]).collect();
        rels.extend((1..=6).map(|i| vec![i, 7]));
        let others: Vec<usize> = (1..=3).filter(|&i| i != j).collect();
        rels.extend(others.iter().flat_map(|&i| [vec![i, 4], vec![i, 5]]));
        rels
    };
    let mut dims = Vec::new();
    for j in 1..=3 {
        let oracle = enumerate_dim(7, &tail(j));
        let lib = lib_dim(cat.object(&format!("E{j}")));
        ensure(oracle == 17 && lib == 17, || format!("E[{j}]: oracle {oracle}, lib {lib}"))?;
        dims.push(lib);
    }
    Ok(format!("dim W_E = 6, dim W_E[1..3] = {dims:?}"))
}

fn c03_g_dimension() -> Outcome {
    let cat = catalog();
    let g = cat.object("G");
    let rels: Vec<Vec<usize>> = g.relation_sequences().expect("simplicial");
    let oracle = enumerate_dim(8, &rels);
    let lib = lib_dim(g);
    let v = cat.verdict(SEXTUPLE.cone).ok_or("no sextuple verdict")?;
    let line = format!("enumerated dim W_G = {oracle}, limit dim = {}, cone is limit = {}", v.limit_dim, v.is_limit());
    ensure(oracle == lib && oracle == v.limit_dim && v.is_limit(), || line.clone())?;
    Ok(line)
}

fn c04_cones() -> Outcome {
    let start = Instant::now();
    let cat = catalog();
    let mut names = Vec::new();
    for entry in ENTRIES.iter().chain([&SEXTUPLE]) {
        let lim = cat.limit(entry.cone).map_err(|e| format!("{}: {e}", entry.cone))?;
        let v = verify_cone(lim.diagram(), lim.cone()).map_err(|e| e.to_string())?;
        ensure(v.is_limit(), || format!("{}: {v:?}", entry.cone))?;
        names.push(entry.cone);
    }
    let took = start.elapsed();
    ensure(took < CONE_BUDGET, || format!("took {took:?}"))?;
    Ok(format!("{} cones verified in {took:.2?}", names.len()))
}

fn c05_vector_space_axioms() -> Outcome {
    let rep = section(3, 200, 3);
    records_pass(
        &rep,
        &[
            "addition is associative",
            "addition is commutative",
            "zero is an identity",
            "negation is an inverse",
            "scaling distributes over addition",
            "scalar addition distributes",
            "scaling is associative",
            "unit scalar",
        ],
    )
}

fn c06_star_laws() -> Outcome {
    let rep = section(4, 50, 2);
    records_pass(&rep, &["composition is associative", "identity flows are units"])
}

fn c07_flows_of_fields() -> Outcome {
    let rep = section(4, 50, 2);
    records_pass(
        &rep,
        &["flow of a sum over D(2)", "opposite contractions give the identity", "both composition orders give l(X,Y)"],
    )
}

fn c08_bracket() -> Outcome {
    let mut rng = stream(SEED, 8);
    for t in 0..50 {
        let k = 1 + t % 3;
        let (x, y) = (random_field(&mut rng, k, 2), random_field(&mut rng, k, 2));
        let l = commutator_loop(&x, &y).map_err(|e| e.to_string())?;
        for i in 0..2 {
            ensure(l.coefficient(&Monomial::var(i)).components().iter().all(Polynomial::is_zero), || {
                format!("trial {t}: d{} coefficient survives", i + 1)
            })?;
        }
        let b = lie_bracket(&x, &y).map_err(|e| e.to_string())?;
        ensure(b.components() == classical_bracket(&x, &y).as_slice(), || format!("trial {t}: bracket differs from J_Y X - J_X Y"))?;
    }
    let mats: [(Mat, Mat); 3] = [
        (vec![vec![1, 2], vec![0, -1]], vec![vec![0, 1], vec![3, 2]]),
        (vec![vec![0, 1], vec![0, 0]], vec![vec![0, 0], vec![1, 0]]),
        (vec![vec![1, 0, 2], vec![0, 1, -1], vec![3, 0, 0]], vec![vec![0, 2, 0], vec![1, 0, 0], vec![0, -1, 1]]),
    ];
    for (a, b) in &mats {
        let want = linear(&loop_coefficient(a, b));
        let got = lie_bracket(&linear(a), &linear(b)).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("linear case {a:?}, {b:?}"))?;
    }
    Ok("50 pairs factor and match J_Y X - J_X Y; linear fields give (BA - AB)x".into())
}

fn c09_antisymmetry_and_strong_difference() -> Outcome {
    let mut rng = stream(SEED, 9);
    for t in 0..50 {
        let k = 1 + t % 3;
        let (x, y) = (random_field(&mut rng, k, 2), random_field(&mut rng, k, 2));
        let (xy, yx) = (lie_bracket(&x, &y).map_err(|e| e.to_string())?, lie_bracket(&y, &x).map_err(|e| e.to_string())?);
        ensure(xy == yx.scale(&int(-1)), || format!("trial {t}: not antisymmetric"))?;
        let sd = bracket_via_strong_diff(&x, &y).map_err(|e| e.to_string())?;
        ensure(sd == xy, || format!("trial {t}: strong difference differs"))?;
    }
    Ok("50 pairs: [X,Y] = -[Y,X] and equals the strong difference of swap(Y*X) and X*Y".into())
}

fn c10_jacobi_batches() -> Outcome {
    let start = Instant::now();
    let mut rng = stream(SEED, 10);
    for t in 0..100 {
        let k = 1 + t % 2;
        let [g1, g2, g3] = compatible_triple(&mut rng, k, 2);
        let out = primordial_jacobi(&g1, &g2, &g3).map_err(|e| format!("triple {t}: {e}"))?;
        ensure(out.vanishes(), || format!("triple {t}: sum {}", out.sum))?;
    }
    for t in 0..100 {
        let k = 1 + t % 2;
        let six = compatible_sextuple(&mut rng, k, 2);
        let out = general_jacobi(&six).map_err(|e| format!("sextuple {t}: {e}"))?;
        ensure(out.vanishes(), || format!("sextuple {t}: sum {}", out.sum))?;
    }
    let took = start.elapsed();
    ensure(took < JACOBI_BUDGET, || format!("took {took:?}"))?;
    Ok(format!("100 triples and 100 sextuples sum to zero in {took:.2?}"))
}

fn c11_field_jacobi() -> Outcome {
    let mut rng = stream(SEED, 11);
    for t in 0..100 {
        let k = 1 + t % 3;
        let (x, y, z) = (random_field(&mut rng, k, 2), random_field(&mut rng, k, 2), random_field(&mut rng, k, 2));
        let six = jacobi_witness(&x, &y, &z).and_then(|s| s.map(|g| Ok(g.point().clone()))).map_err(|e| e.to_string())?;
        let out = general_jacobi(&six).map_err(|e| format!("trial {t}: {e}"))?;
        let terms: Vec<VectorField> = out
            .terms
            .iter()
            .map(|p| FlowElement::new(k, p.clone()).and_then(|f| f.to_field()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let br = |a: &VectorField, b: &VectorField| lie_bracket(a, b).map_err(|e| e.to_string());
        let nested = [br(&x, &br(&y, &z)?)?, br(&y, &br(&z, &x)?)?, br(&z, &br(&x, &y)?)?];
        for i in 0..3 {
            ensure(terms[i] == nested[i], || format!("trial {t}: term {} is not the nested bracket", i + 1))?;
        }
        let sum: Vec<Polynomial> = (0..k)
            .map(|i| nested.iter().fold(Polynomial::zero(k), |acc, f| acc.add(&f.components()[i])))
            .collect();
        ensure(sum.iter().all(Polynomial::is_zero) && out.vanishes(), || format!("trial {t}: Jacobi sum is nonzero"))?;
    }
    Ok("100 triples: three terms equal the nested brackets and sum to zero".into())
}

fn c12_cli() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_weilcalc");
    let run = || Command::new(bin).args(["suite", "--format", "json"]).output();
    let (a, b) = (run().map_err(|e| e.to_string())?, run().map_err(|e| e.to_string())?);
    ensure(a.status.code() == Some(0), || format!("exit {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stdout)))?;
    ensure(b.status.code() == Some(0), || "second run failed".into())?;
    ensure(a.stdout == b.stdout, || "JSON differs between runs".into())?;
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).map_err(|e| e.to_string())?;
    let n = v["checks"].as_array().map(Vec::len).unwrap_or(0);
    Ok(format!("suite exits 0 with {n} records; {} JSON bytes identical across runs", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("dimension oracle", c01_dimension_oracle),
        ("dim W_E and W_E[j]", c02_e_dimensions),
        ("dim W_G against the sextuple limit", c03_g_dimension),
        ("every catalog cone is a limit", c04_cones),
        ("tangent vector-space axioms, 200 trials", c05_vector_space_axioms),
        ("associativity and units of *, 50 trials", c06_star_laws),
        ("flows of sums and l(X,Y), 50 trials", c07_flows_of_fields),
        ("bracket factorization and sign", c08_bracket),
        ("antisymmetry and bracket as strong difference", c09_antisymmetry_and_strong_difference),
        ("primordial and general Jacobi, 100 each", c10_jacobi_batches),
        ("Jacobi identity for vector fields, 100 triples", c11_field_jacobi),
        ("CLI suite exit code and reproducible JSON", c12_cli),
    ];
    println!("acceptance: tolerance exact (0), seed {SEED}");
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or("panic".into()))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2}  {title}  ({took:.2?})  {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2}  {title}  ({took:.2?})  {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
