//! Graphviz output. Edges run from each element to its upper covers, drawn
//! bottom to top.

use std::fmt::Write;

use crate::algebra::FiniteAlgebra;
use crate::poset::Poset;
use crate::set::{Color, ElemSet};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// A Hasse diagram of a poset. Points of `s` get a double border and a
/// colored point is labelled `name | color`.
pub fn poset_dot(poset: &Poset, s: Option<&ElemSet>, colors: Option<&[Color]>) -> String {
    let mut out = String::from("digraph model {\n  rankdir=BT;\n  node [shape=ellipse];\n");
    for x in 0..poset.len() {
        let mut label = poset.name(x);
        if let Some(c) = colors {
            write!(label, " | {}", c[x]).unwrap();
        }
        write!(out, "  n{x} [label=\"{}\"", escape(&label)).unwrap();
        if s.is_some_and(|s| s.contains(x)) {
            out.push_str(", peripheries=2");
        }
        out.push_str("];\n");
    }
    for (a, b) in poset.covers() {
        writeln!(out, "  n{a} -> n{b};").unwrap();
    }
    out.push_str("}\n");
    out
}

/// A Hasse diagram of an algebra. Fixpoints of the nucleus, if any, get a
/// double border.
pub fn algebra_dot(alg: &FiniteAlgebra) -> String {
    let mut out = String::from("digraph algebra {\n  rankdir=BT;\n  node [shape=box];\n");
    for a in 0..alg.len() {
        write!(out, "  a{a} [label=\"{}\"", escape(&alg.label(a))).unwrap();
        if alg.nucleus(a) == Some(a) {
            out.push_str(", peripheries=2");
        }
        out.push_str("];\n");
    }
    for (a, b) in alg.order_covers() {
        writeln!(out, "  a{a} -> a{b};").unwrap();
    }
    out.push_str("}\n");
    out
}
