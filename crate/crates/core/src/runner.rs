//! Executes the `check` directives of a script.

use std::time::Instant;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::limits::{verify_cone, ConeVerdict, WeilDiagram};
use crate::limits::Cone;
use crate::point::PolyMap;
use crate::report::{Record, Report};
use crate::script::{elaborate, Check, Environment, Name, Script, Stmt};
use crate::tangent::{bracket_via_strong_diff, general_jacobi, jacobi_witness, lie_bracket, FlowElement, VectorField};

pub(crate) fn render_field(f: &VectorField) -> Value {
    f.components().iter().map(|p| Value::from(p.render("x"))).collect()
}

pub(crate) fn verdict_record(mut r: Record, v: &ConeVerdict) -> Record {
    r.set("limit_dim", v.limit_dim);
    r.set("apex_dim", v.apex_dim);
    r.set("commutes", v.commutes);
    r.set("bijective", v.bijective);
    if let Some(a) = &v.failing_arrow {
        r.set("failing_arrow", a.clone());
    }
    r.passed(v.is_limit())
}

fn limit_check(d: &WeilDiagram, c: &Cone, r: Record) -> Record {
    match verify_cone(d, c) {
        Ok(v) => verdict_record(r, &v),
        Err(e) => r.errored(&e),
    }
}

fn field(env: &Environment, n: &Name) -> Result<VectorField> {
    let map: &PolyMap = env.field(n)?;
    VectorField::new(map.clone())
}

fn lookup_failure(env: &Environment, n: &Name) -> Error {
    env.failures.get(&n.text).map(|(_, e)| e.clone()).unwrap_or(Error::Unresolved {
        line: n.pos.line,
        column: n.pos.column,
        name: n.text.clone(),
    })
}

fn bracket_check(env: &Environment, x: &Name, y: &Name, r: Record) -> Record {
    let run = || -> Result<Record> {
        let (fx, fy) = (field(env, x)?, field(env, y)?);
        let b = lie_bracket(&fx, &fy)?;
        let via_diff = bracket_via_strong_diff(&fx, &fy)?;
        let classical = fx.jacobian_bracket(&fy)?;
        Ok(r.clone()
            .detail("bracket", render_field(&b))
            .detail("matches_strong_difference", via_diff == b)
            .detail("matches_jacobians", classical == b)
            .passed(via_diff == b && classical == b))
    };
    run().unwrap_or_else(|e| r.errored(&e))
}

fn jacobi_check(env: &Environment, names: [&Name; 3], r: Record) -> Record {
    let run = || -> Result<Record> {
        let [x, y, z] = [field(env, names[0])?, field(env, names[1])?, field(env, names[2])?];
        let six = jacobi_witness(&x, &y, &z)?.map(|g| Ok(g.point().clone()))?;
        let out = general_jacobi(&six)?;
        let k = x.k();
        let terms = out.terms.iter().map(|t| FlowElement::new(k, t.clone())?.to_field()).collect::<Result<Vec<_>>>()?;
        let nested = [
            x.jacobian_bracket(&y.jacobian_bracket(&z)?)?,
            y.jacobian_bracket(&z.jacobian_bracket(&x)?)?,
            z.jacobian_bracket(&x.jacobian_bracket(&y)?)?,
        ];
        let bridged = terms.iter().zip(&nested).all(|(a, b)| a == b);
        Ok(r.clone()
            .detail("terms", terms.iter().map(render_field).collect::<Vec<_>>())
            .detail("terms_are_nested_brackets", bridged)
            .detail("sum_vanishes", out.vanishes())
            .passed(bridged && out.vanishes()))
    };
    run().unwrap_or_else(|e| r.errored(&e))
}

fn run_check(env: &Environment, check: &Check) -> Record {
    match check {
        Check::Limit { diagram, apex, legs } => {
            let r = Record::new(format!("limit {diagram}"), "limit", "limit verification");
            match (env.diagram(&diagram.text), env.build_cone(diagram, apex, legs)) {
                (Some(d), Ok(c)) => limit_check(d, &c, r),
                (_, Err(e)) => r.errored(&e),
                (None, _) => r.errored(&lookup_failure(env, diagram)),
            }
        }
        Check::Cone(name) => {
            let r = Record::new(format!("cone {name}"), "limit", "limit verification");
            match env.cone(name) {
                Ok((dname, c)) => limit_check(env.diagram(dname).expect("elaborated cone"), c, r),
                Err(e) => r.errored(&e),
            }
        }
        Check::Map(name) => {
            let r = Record::new(format!("map {name}"), "map", "well-defined map");
            match env.map_named(&name.text) {
                Some(m) => r
                    .detail("source", m.source().to_string())
                    .detail("target", m.target().to_string())
                    .detail("components", m.components().iter().map(|p| Value::from(p.render("d"))).collect::<Vec<_>>()),
                None => r.errored(&lookup_failure(env, name)),
            }
        }
        Check::Bracket(x, y) => bracket_check(env, x, y, Record::new(format!("bracket {x} {y}"), "bracket", "Lie bracket")),
        Check::Jacobi(x, y, z) => jacobi_check(
            env,
            [x, y, z],
            Record::new(format!("jacobi {x} {y} {z}"), "jacobi", "Jacobi identity"),
        ),
    }
}

fn declared_name(stmt: &Stmt) -> Option<(&Name, &'static str)> {
    match stmt {
        Stmt::Obj { name, .. } => Some((name, "obj")),
        Stmt::Map { name, .. } => Some((name, "map")),
        Stmt::Field { name, .. } => Some((name, "field")),
        Stmt::Diagram { name, .. } => Some((name, "diagram")),
        Stmt::Cone { name, .. } => Some((name, "cone")),
        Stmt::Check { .. } => None,
    }
}

/// One record per failed declaration and per check, in script order.
pub fn run_checks(script: &Script) -> Report {
    let env = elaborate(script);
    let mut report = Report::default();
    for stmt in &script.stmts {
        let start = Instant::now();
        let mut record = match stmt {
            Stmt::Check { check, .. } => run_check(&env, check),
            other => {
                let Some((name, kind)) = declared_name(other) else { continue };
                match env.failures.get(&name.text) {
                    Some((pos, e)) if (pos.line, pos.column) == (name.pos.line, name.pos.column) => {
                        Record::new(format!("{kind} {name}"), "declaration", "elaboration")
                            .detail("line", pos.line)
                            .detail("column", pos.column)
                            .errored(e)
                    }
                    _ => continue,
                }
            }
        };
        record.duration = start.elapsed();
        report.push(record);
    }
    report
}

/// A one-record report for the bracket of two fields declared in `script`.
pub fn bracket_report(script: &Script, x: &str, y: &str) -> Report {
    let env = elaborate(script);
    let name = |t: &str| Name { text: t.to_string(), pos: Default::default() };
    let (nx, ny) = (name(x), name(y));
    let mut report = Report::default();
    let start = Instant::now();
    let mut r = bracket_check(&env, &nx, &ny, Record::new(format!("bracket {x} {y}"), "bracket", "Lie bracket"));
    r.duration = start.elapsed();
    report.push(r);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;
    use crate::script::parse_script;

    fn run(src: &str) -> Report {
        run_checks(&parse_script(src).unwrap())
    }

    #[test]
    fn empty_script() {
        let rep = run("");
        assert!(rep.checks.is_empty());
        assert_eq!(rep.exit_code(), 0);
    }

    #[test]
    fn tangent_pullback_script() {
        let rep = run(
            "obj One = D^0\nobj Dpair = D(2)\nmap base : One -> D := 0\nmap in1 : D -> Dpair := d1, 0\n\
             map in2 : D -> Dpair := 0, d1\n\
             diagram t { node l : D  node r : D  node p : One  arrow a : l -> p := W[base]  arrow b : r -> p := W[base] }\n\
             check limit t apex Dpair leg l : W[in1] leg r : W[in2]",
        );
        assert_eq!(rep.checks.len(), 1);
        assert_eq!(rep.checks[0].status, Status::Pass);
        assert_eq!(rep.checks[0].details["limit_dim"], 3);
    }

    #[test]
    fn ill_defined_map_is_an_error_record() {
        let rep = run("obj Sq = D^2\nmap s : Sq -> D := d1 + d2\ncheck map s");
        assert_eq!(rep.checks.len(), 2);
        for r in &rep.checks {
            assert_eq!(r.status, Status::Error);
            assert_eq!(r.details["error"], "IllDefinedMap");
            assert_eq!(r.details["residue"], "2*X1*X2");
        }
        assert_eq!(rep.exit_code(), 2);
    }

    #[test]
    fn bracket_and_jacobi_directives() {
        let rep = run("field X on 2 := x2, 0\nfield Y on 2 := 0, x1\nfield Z on 2 := x1*x1, 1\ncheck bracket X Y\ncheck jacobi X Y Z");
        assert!(rep.all_pass(), "{}", rep.to_text());
        assert_eq!(rep.checks[0].details["bracket"], serde_json::json!(["-x1", "x2"]));
    }

    #[test]
    fn mismatched_field_dims() {
        let rep = run("field X on 2 := x2, 0\nfield Y on 1 := x1\ncheck bracket X Y");
        assert_eq!(rep.checks[0].status, Status::Error);
    }
}
