//! JSON encodings. Objects are serde_json maps, which keep keys sorted, so
//! output is byte-stable. Rationals are "p/q" strings.

use crate::diagram::{Diagram, HyperCone, Mode, Support, Wall};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::lattice::{fmt_q, parse_q, Grading, LatVec, SkewForm, SupportKind, SupportR2, Q};
use crate::lie::{Alg, AlgElem, Backend, LieAlgebra, LieElement};
use crate::quiver::QuiverData;
use crate::rings::{Coefficient, LaurentV, NilMono, RatV, Ring, Var};
use crate::theta::{BrokenLine, Frame};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

fn bad(msg: impl Into<String>) -> Error {
    Error::parse("<json>", msg)
}

pub fn q_to(x: &Q) -> Value {
    Value::String(fmt_q(x))
}

pub fn q_from(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s).ok_or_else(|| bad(format!("bad rational {s:?}"))),
        Value::Number(n) => n.as_i64().map(|i| Q::from_integer(i.into())).ok_or_else(|| bad("non-integer number")),
        _ => Err(bad("rational expected")),
    }
}

pub fn point_to(x: &[Q]) -> Value {
    Value::Array(x.iter().map(q_to).collect())
}

pub fn point_from(v: &Value) -> Result<Vec<Q>> {
    v.as_array().ok_or_else(|| bad("point array expected"))?.iter().map(q_from).collect()
}

pub fn vec_to(m: &LatVec) -> Value {
    json!(m.0)
}

pub fn vec_from(v: &Value) -> Result<LatVec> {
    let a = v.as_array().ok_or_else(|| bad("integer array expected"))?;
    a.iter()
        .map(|x| x.as_i64().ok_or_else(|| bad("integer expected")))
        .collect::<Result<Vec<i64>>>()
        .map(LatVec)
}

fn laurent_to(l: &LaurentV) -> Value {
    let mut m = Map::new();
    for (e, c) in l.terms() {
        m.insert(e.to_string(), q_to(c));
    }
    Value::Object(m)
}

fn laurent_from(v: &Value) -> Result<LaurentV> {
    let m = v.as_object().ok_or_else(|| bad("Laurent map expected"))?;
    let mut terms = Vec::new();
    for (e, c) in m {
        let e: i32 = e.parse().map_err(|_| bad(format!("bad exponent {e:?}")))?;
        terms.push((e, q_from(c)?));
    }
    Ok(LaurentV::from_terms(terms))
}

/// Constants as "p/q"; otherwise {num, cyclotomic?} with the denominator
/// given by cyclotomic exponents.
pub fn ratv_to(x: &RatV) -> Value {
    if let Some(c) = x.as_constant() {
        return q_to(&c);
    }
    let mut m = Map::new();
    m.insert("num".into(), laurent_to(x.num()));
    if !x.den_factors().is_empty() {
        let mut d = Map::new();
        for (k, e) in x.den_factors() {
            d.insert(k.to_string(), json!(e));
        }
        m.insert("cyclotomic".into(), Value::Object(d));
    }
    Value::Object(m)
}

pub fn ratv_from(v: &Value) -> Result<RatV> {
    match v {
        Value::String(_) | Value::Number(_) => Ok(RatV::constant(q_from(v)?)),
        Value::Object(o) => {
            let num = laurent_from(o.get("num").ok_or_else(|| bad("missing num"))?)?;
            let mut den = BTreeMap::new();
            if let Some(c) = o.get("cyclotomic") {
                for (k, e) in c.as_object().ok_or_else(|| bad("cyclotomic map expected"))? {
                    let k: u32 = k.parse().map_err(|_| bad("bad cyclotomic index"))?;
                    let e = e.as_u64().ok_or_else(|| bad("bad cyclotomic exponent"))? as u32;
                    if k == 0 {
                        return Err(bad("cyclotomic index must be positive"));
                    }
                    den.insert(k, e);
                }
            }
            if let Some(d) = o.get("den") {
                let d = laurent_from(d)?;
                let base = RatV::from_parts(num, den);
                let inv = RatV::from_fraction(&LaurentV::one(), &d).ok_or_else(|| bad("denominator is not cyclotomic"))?;
                return Ok(base.mul(&inv));
            }
            Ok(RatV::from_parts(num, den))
        }
        _ => Err(bad("coefficient value expected")),
    }
}

pub fn coeff_to(c: &Coefficient) -> Value {
    Value::Array(
        c.0.iter()
            .map(|(mono, x)| json!({"mono": mono.names(), "value": ratv_to(x)}))
            .collect(),
    )
}

pub fn coeff_from(v: &Value, ring: &Ring) -> Result<Coefficient> {
    if matches!(v, Value::String(_) | Value::Number(_)) {
        return Ok(Coefficient::scalar(ratv_from(v)?));
    }
    let mut out = Coefficient::zero();
    for t in v.as_array().ok_or_else(|| bad("coefficient term list expected"))? {
        let x = ratv_from(t.get("value").ok_or_else(|| bad("missing value"))?)?;
        let mut mono = Some(NilMono::one());
        if let Some(names) = t.get("mono") {
            for n in names.as_array().ok_or_else(|| bad("mono must be a list"))? {
                let s = n.as_str().ok_or_else(|| bad("variable name expected"))?;
                let var = Var::parse(s).ok_or_else(|| bad(format!("unknown variable {s:?}")))?;
                // A nilpotent product kills the term.
                mono = mono.and_then(|m| m.mul(&NilMono::var(var), ring));
            }
        }
        if let Some(mono) = mono {
            out.add_assign(&Coefficient::term(mono, x));
        }
    }
    Ok(out)
}

/// Classical terms are split into one entry per nonzero ∂_j component.
pub fn lie_to(g: &LieElement) -> Value {
    let mut out = Vec::new();
    for (m, comps) in g.terms() {
        match g.alg.backend {
            Backend::Classical => {
                for (j, c) in comps.iter().enumerate() {
                    if !c.is_zero() {
                        let n = LatVec::basis(g.alg.rank, j);
                        out.push(json!({"m": vec_to(m), "n": vec_to(&n), "coeff": coeff_to(c)}));
                    }
                }
            }
            Backend::Quantum(_) => out.push(json!({"m": vec_to(m), "coeff": coeff_to(&comps[0])})),
        }
    }
    Value::Array(out)
}

pub fn lie_from(v: &Value, alg: &Alg, order: u32) -> Result<LieElement> {
    let mut g = LieElement::zero(alg, order);
    for t in v.as_array().ok_or_else(|| bad("term list expected"))? {
        let m = vec_from(t.get("m").ok_or_else(|| bad("term without m"))?)?;
        if m.rank() != alg.rank {
            return Err(Error::RankMismatch { expected: alg.rank, got: m.rank() });
        }
        let c = coeff_from(t.get("coeff").ok_or_else(|| bad("term without coeff"))?, &alg.ring)?;
        let term = match alg.backend {
            Backend::Classical => {
                let n = vec_from(t.get("n").ok_or_else(|| bad("classical term without n"))?)?;
                if n.rank() != alg.rank {
                    return Err(Error::RankMismatch { expected: alg.rank, got: n.rank() });
                }
                LieElement::classical(alg, order, &m, &n, c)
            }
            Backend::Quantum(_) => LieElement::quantum(alg, order, &m, c),
        };
        g = g.add(&term);
    }
    Ok(g)
}

pub fn support_to(s: &Support) -> Value {
    match s {
        Support::R2(s) => json!({
            "kind": match s.kind { SupportKind::Line => "line", SupportKind::Ray => "ray" },
            "base": point_to(&s.base),
            "direction": vec_to(&s.dir),
        }),
        Support::Cone(h) => json!({
            "kind": "hyperplane",
            "normal": vec_to(&h.normal),
            "offset": q_to(&h.offset),
            "ineqs": h.ineqs.iter().map(|(a, b)| json!({"a": point_to(a), "b": q_to(b)})).collect::<Vec<_>>(),
        }),
    }
}

pub fn support_from(v: &Value) -> Result<Support> {
    let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| bad("support without kind"))?;
    match kind {
        "line" | "ray" => {
            let base = point_from(v.get("base").ok_or_else(|| bad("support without base"))?)?;
            let dir = vec_from(v.get("direction").ok_or_else(|| bad("support without direction"))?)?;
            if base.len() != 2 || dir.rank() != 2 {
                return Err(bad("line and ray supports live in rank 2"));
            }
            if dir.is_zero() {
                return Err(bad("zero support direction"));
            }
            Ok(Support::R2(if kind == "line" { SupportR2::line(base, dir) } else { SupportR2::ray(base, dir) }))
        }
        "hyperplane" => {
            let normal = vec_from(v.get("normal").ok_or_else(|| bad("missing normal"))?)?;
            let offset = v.get("offset").map(q_from).transpose()?.unwrap_or_default();
            let mut ineqs = Vec::new();
            if let Some(list) = v.get("ineqs") {
                for i in list.as_array().ok_or_else(|| bad("ineqs must be a list"))? {
                    let a = point_from(i.get("a").ok_or_else(|| bad("ineq without a"))?)?;
                    let b = q_from(i.get("b").ok_or_else(|| bad("ineq without b"))?)?;
                    ineqs.push((a, b));
                }
            }
            Ok(Support::Cone(HyperCone { normal, offset, ineqs }))
        }
        other => Err(bad(format!("unknown support kind {other:?}"))),
    }
}

fn skew_to(w: &SkewForm) -> Value {
    json!(w.mat)
}

fn skew_from(v: &Value) -> Result<SkewForm> {
    let rows = v.as_array().ok_or_else(|| bad("skew_form must be a matrix"))?;
    let mat = rows
        .iter()
        .map(|r| vec_from(r).map(|x| x.0))
        .collect::<Result<Vec<Vec<i64>>>>()?;
    SkewForm::new(mat)
}

pub fn diagram_to(d: &Diagram) -> Value {
    let mut top = Map::new();
    top.insert("mode".into(), json!(d.mode.name()));
    top.insert("rank".into(), json!(d.rank()));
    top.insert("truncation".into(), json!(d.order));
    top.insert("grading".into(), json!(d.alg.grading.weights));
    top.insert("t_cap".into(), json!(d.alg.ring.t_cap));
    match &d.alg.backend {
        Backend::Classical => {
            top.insert("backend".into(), json!("classical"));
        }
        Backend::Quantum(w) => {
            top.insert("backend".into(), json!("quantum"));
            top.insert("skew_form".into(), skew_to(w));
        }
    }
    let walls: Vec<Value> = d
        .walls
        .iter()
        .map(|w| {
            let mut o = Map::new();
            o.insert("m".into(), vec_to(&w.m));
            if let Some(n) = &w.n {
                o.insert("n".into(), vec_to(n));
            }
            o.insert("support".into(), support_to(&w.support));
            o.insert("log_theta".into(), lie_to(&w.theta.log));
            o.insert("initial".into(), json!(w.initial));
            Value::Object(o)
        })
        .collect();
    top.insert("walls".into(), Value::Array(walls));
    Value::Object(top)
}

pub fn diagram_from(v: &Value) -> Result<Diagram> {
    let mode = match v.get("mode").and_then(Value::as_str).unwrap_or("tropical") {
        "tropical" => Mode::Tropical,
        "cone" => Mode::Cone,
        other => return Err(bad(format!("unknown mode {other:?}"))),
    };
    let order = v.get("truncation").and_then(Value::as_u64).ok_or_else(|| bad("missing truncation"))? as u32;
    let ring = match v.get("t_cap") {
        None | Some(Value::Null) => Ring::free(),
        Some(x) => Ring::truncated(x.as_u64().ok_or_else(|| bad("bad t_cap"))? as u32),
    };
    let backend = v.get("backend").and_then(Value::as_str).unwrap_or("classical");
    let mut alg = match backend {
        "classical" => {
            let r = match v.get("rank") {
                Some(r) => r.as_u64().ok_or_else(|| bad("bad rank"))? as usize,
                None => 2,
            };
            LieAlgebra::classical(r, ring)
        }
        "quantum" => {
            let w = skew_from(v.get("skew_form").ok_or_else(|| bad("quantum backend needs skew_form"))?)?;
            LieAlgebra::quantum(w, ring)
        }
        other => return Err(bad(format!("unknown backend {other:?}"))),
    };
    if let Some(g) = v.get("grading") {
        let w = vec_from(g)?.0;
        alg = alg.with_grading(Grading::new(w)?)?;
    }
    let mut d = Diagram::new(mode, &alg, order);
    let walls = v.get("walls").and_then(Value::as_array).ok_or_else(|| bad("missing walls"))?;
    for w in walls {
        let m = vec_from(w.get("m").ok_or_else(|| bad("wall without m"))?)?;
        let n = w.get("n").map(vec_from).transpose()?;
        let support = support_from(w.get("support").ok_or_else(|| bad("wall without support"))?)?;
        let log = lie_from(w.get("log_theta").ok_or_else(|| bad("wall without log_theta"))?, &alg, order)?;
        let mut wall = Wall::new(mode, m, n, support, GroupElement::exp(log))?;
        if w.get("initial").and_then(Value::as_bool).unwrap_or(false) {
            wall = wall.as_initial();
        }
        d.push(wall)?;
    }
    Ok(d)
}

pub fn alg_elem_to(a: &AlgElem) -> Value {
    let terms: Vec<Value> = a
        .terms
        .iter()
        .map(|(o, c)| {
            let mut t = Map::new();
            t.insert("m".into(), vec_to(&a.base_m.add(o)));
            if let Some(n) = &a.base_n {
                t.insert("n".into(), vec_to(n));
            }
            t.insert("coeff".into(), coeff_to(c));
            Value::Object(t)
        })
        .collect();
    json!({"truncation": a.order, "terms": terms})
}

pub fn broken_lines_to(frame: &Frame, lines: &[BrokenLine]) -> Value {
    let (kind, label) = match frame {
        Frame::Tropical(m) => ("tropical", m),
        Frame::Quiver(n) => ("quiver", n),
    };
    let ls: Vec<Value> = lines
        .iter()
        .map(|l| {
            let bends: Vec<Value> = l
                .bends
                .iter()
                .map(|b| {
                    json!({
                        "point": point_to(&b.point),
                        "walls": b.walls,
                        "before": vec_to(&b.before),
                        "after": vec_to(&b.after),
                        "factor": coeff_to(&b.factor),
                    })
                })
                .collect();
            json!({
                "end": point_to(&l.end),
                "bends": bends,
                "final_offset": vec_to(&l.final_offset),
                "coeff": coeff_to(&l.coeff),
            })
        })
        .collect();
    json!({"frame": kind, "label": vec_to(label), "lines": ls})
}

pub fn quiver_to(qd: &QuiverData) -> Value {
    let mut arrows = Vec::new();
    for i in 0..qd.r {
        for j in 0..qd.r {
            if qd.arrows[i][j] != 0 {
                arrows.push(json!([i + 1, j + 1, qd.arrows[i][j]]));
            }
        }
    }
    json!({"r": qd.r, "arrows": arrows})
}

pub fn quiver_from(v: &Value) -> Result<QuiverData> {
    let r = v.get("r").and_then(Value::as_u64).ok_or_else(|| bad("quiver without r"))? as usize;
    let mut list = Vec::new();
    for a in v.get("arrows").and_then(Value::as_array).ok_or_else(|| bad("quiver without arrows"))? {
        let t = vec_from(a)?;
        if t.rank() != 3 || t.0[0] < 1 || t.0[1] < 1 {
            return Err(bad("arrow must be [i, j, count]"));
        }
        list.push((t.0[0] as usize, t.0[1] as usize, t.0[2]));
    }
    QuiverData::new(r, &list)
}

/// Pretty JSON with a trailing newline.
pub fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn parse(text: &str, path: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::parse(path, e.to_string()))
}
