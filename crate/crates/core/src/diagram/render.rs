use std::fmt::Write;

use serde_json::{json, Value};

use super::{symmetry_factor, Diagram};

/// DOT text: vertices labeled `h=<index>`, lines `<f>|<g>`, legs as boxes.
pub fn render_dot(d: &Diagram) -> String {
    let mut s = String::from("graph diagram {\n");
    write_body(&mut s, d, "", "  ");
    s.push_str("}\n");
    s
}

fn write_body(s: &mut String, d: &Diagram, prefix: &str, indent: &str) {
    for (v, vs) in d.vertices.iter().enumerate() {
        let _ = writeln!(s, "{indent}{prefix}v{v} [shape=circle, label=\"h={}\"];", vs.h);
    }
    for e in &d.edges {
        let _ = writeln!(s, "{indent}{prefix}v{} -- {prefix}v{} [label=\"{}|{}\"];", e.a.v, e.b.v, e.a.f, e.b.f);
    }
    for x in &d.external {
        let _ = writeln!(s, "{indent}{prefix}{} [shape=box, label=\"{}\"];", x.label, x.label);
        let _ = writeln!(s, "{indent}{prefix}{} -- {prefix}v{} [label=\"{}\"];", x.label, x.v, x.m);
    }
}

/// One cluster per diagram, each annotated with its weight.
pub fn render_catalog_dot(ds: &[Diagram]) -> String {
    let mut s = String::from("graph catalog {\n");
    for (n, d) in ds.iter().enumerate() {
        let w = symmetry_factor(d).value;
        let _ = writeln!(s, "  subgraph cluster_{n} {{");
        let _ = writeln!(s, "    label=\"Pi = {}/{}\";", w.numer(), w.denom());
        write_body(&mut s, d, &format!("d{n}_"), "    ");
        s.push_str("  }\n");
    }
    s.push_str("}\n");
    s
}

pub fn diagram_json(d: &Diagram) -> Value {
    let sf = symmetry_factor(d);
    json!({
        "vertices": d.vertices.iter().map(|v| json!({"h": v.h, "alpha": v.alpha.entries()})).collect::<Vec<_>>(),
        "internal_edges": d.edges.iter().map(|e| json!([[e.a.v, e.a.f], [e.b.v, e.b.f]])).collect::<Vec<_>>(),
        "external": d.external.iter().map(|x| json!({"p": x.label.as_str(), "v": x.v, "m": x.m})).collect::<Vec<_>>(),
        "pi": sf.pi.to_string(),
        "c": sf.c.to_string(),
        "d": sf.d.to_string(),
        "weight": format!("{}/{}", sf.value.numer(), sf.value.denom()),
    })
}

pub fn catalog_json(ds: &[Diagram]) -> Value {
    Value::Array(ds.iter().map(diagram_json).collect())
}
