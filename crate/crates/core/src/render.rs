//! ASCII, DOT and JSON renderings of valuation trees.

use std::fmt::Write;
use std::str::FromStr;

use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};
use crate::padic::Prime;
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::tree::{LabelRule, NodeLabel, ResidueClass, SplitAnalysis, TreeNode, ValuationTree};

/// One node per line, two spaces of indentation per level.
pub fn render_ascii<T: Scalar>(t: &ValuationTree<T>) -> String {
    let mut out = String::new();
    for node in t.nodes() {
        let indent = "  ".repeat(node.class.level as usize);
        writeln!(out, "{indent}{} {}", node.class, node.label).unwrap();
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// A single digraph; edges appear in child order.
pub fn render_dot<T: Scalar>(t: &ValuationTree<T>) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"valuation_tree\" {{").unwrap();
    writeln!(
        out,
        "  label=\"{} (p = {})\";",
        dot_escape(&t.f.to_string()),
        t.p
    )
    .unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    let mut next_id = 0usize;
    let mut edges = Vec::new();
    let mut stack = vec![(&t.root, None::<usize>)];
    while let Some((node, parent)) = stack.pop() {
        let id = next_id;
        next_id += 1;
        writeln!(
            out,
            "  \"n{id}\" [label=\"{}\", tooltip=\"{}\"];",
            dot_escape(&node.label.to_string()),
            dot_escape(&node.class.to_string())
        )
        .unwrap();
        if let Some(parent) = parent {
            edges.push((parent, id));
        }
        stack.extend(node.children.iter().rev().map(|c| (c, Some(id))));
    }
    for (a, b) in edges {
        writeln!(out, "  \"n{a}\" -> \"n{b}\";").unwrap();
    }
    out.push_str("}\n");
    out
}

fn number<T: Scalar>(v: &T) -> Value {
    Value::Number(Number::from_str(&v.to_string()).expect("integer literal"))
}

fn split_json(s: &SplitAnalysis) -> Value {
    json!({
        "alpha": s.alpha,
        "lin": s.lin,
        "class": s.kind.name(),
    })
}

fn node_json<T: Scalar>(node: &TreeNode<T>) -> Value {
    let mut m = Map::new();
    m.insert(
        "class".into(),
        json!({
            "level": node.class.level,
            "residues": node.class.residues.iter().map(number).collect::<Vec<_>>(),
        }),
    );
    let label = match node.label {
        NodeLabel::Terminal(v) => json!(v),
        NodeLabel::Star => json!("star"),
        NodeLabel::Frontier => json!("frontier"),
    };
    m.insert("label".into(), label);
    if let Some(split) = &node.split {
        m.insert("split".into(), split_json(split));
    }
    m.insert(
        "children".into(),
        Value::Array(node.children.iter().map(node_json).collect()),
    );
    Value::Object(m)
}

fn header<T: Scalar>(
    f: &Polynomial<T>,
    p: Prime,
    arity: usize,
    max_depth: u32,
    rule: LabelRule,
) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("polynomial".into(), json!(f.to_string()));
    m.insert("p".into(), json!(p.get()));
    m.insert("arity".into(), json!(arity));
    m.insert("max_depth".into(), json!(max_depth));
    m.insert("rule".into(), json!(rule.name()));
    m
}

pub fn tree_to_json<T: Scalar>(t: &ValuationTree<T>) -> Value {
    let mut m = header(&t.f, t.p, t.arity, t.max_depth, t.rule);
    m.insert("root".into(), node_json(&t.root));
    Value::Object(m)
}

pub fn render_json<T: Scalar>(t: &ValuationTree<T>) -> String {
    let mut s = serde_json::to_string_pretty(&tree_to_json(t)).expect("serializable");
    s.push('\n');
    s
}

/// Document for a build that ran out of node budget.
pub fn render_truncated_json<T: Scalar>(
    f: &Polynomial<T>,
    p: Prime,
    arity: usize,
    max_depth: u32,
    rule: LabelRule,
    node_budget: usize,
) -> String {
    let mut m = header(f, p, arity, max_depth, rule);
    m.insert("truncated".into(), json!(true));
    m.insert("node_budget".into(), json!(node_budget));
    m.insert("root".into(), Value::Null);
    let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("serializable");
    s.push('\n');
    s
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Document(format!("missing field `{key}`")))
}

fn as_u64(v: &Value, key: &str) -> Result<u64> {
    field(v, key)?
        .as_u64()
        .ok_or_else(|| Error::Document(format!("`{key}` is not a non-negative integer")))
}

fn scalar_from<T: Scalar>(v: &Value) -> Result<T> {
    match v {
        Value::Number(n) => T::from_str_radix(&n.to_string(), 10)
            .map_err(|_| Error::Document(format!("bad residue {n}"))),
        other => Err(Error::Document(format!("bad residue {other}"))),
    }
}

fn node_from<T: Scalar>(v: &Value, p: Prime) -> Result<TreeNode<T>> {
    let class_v = field(v, "class")?;
    let level = as_u64(class_v, "level")? as u32;
    let residues = field(class_v, "residues")?
        .as_array()
        .ok_or_else(|| Error::Document("`residues` is not an array".into()))?
        .iter()
        .map(scalar_from)
        .collect::<Result<Vec<T>>>()?;
    let class = if level == 0 {
        ResidueClass::root(residues.len())
    } else {
        ResidueClass::new(level, residues, p)?
    };
    let label = match field(v, "label")? {
        Value::String(s) if s == "star" => NodeLabel::Star,
        Value::String(s) if s == "frontier" => NodeLabel::Frontier,
        Value::Number(n) => NodeLabel::Terminal(
            n.as_u64()
                .and_then(|x| u32::try_from(x).ok())
                .ok_or_else(|| Error::Document(format!("bad label {n}")))?,
        ),
        other => return Err(Error::Document(format!("bad label {other}"))),
    };
    let split = match v.get("split") {
        None | Some(Value::Null) => None,
        Some(s) => {
            let alpha = as_u64(s, "alpha")?;
            let lin = field(s, "lin")?
                .as_array()
                .ok_or_else(|| Error::Document("`lin` is not an array".into()))?
                .iter()
                .map(|x| {
                    x.as_u64()
                        .ok_or_else(|| Error::Document("bad `lin` entry".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            let analysis = SplitAnalysis::from_congruence(alpha, lin, p);
            let kind = field(s, "class")?.as_str().unwrap_or_default();
            if kind != analysis.kind.name() {
                return Err(Error::Document(format!(
                    "split class `{kind}` contradicts alpha/lin (expected `{}`)",
                    analysis.kind.name()
                )));
            }
            Some(analysis)
        }
    };
    let children = field(v, "children")?
        .as_array()
        .ok_or_else(|| Error::Document("`children` is not an array".into()))?
        .iter()
        .map(|c| node_from(c, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(TreeNode {
        class,
        label,
        children,
        split,
    })
}

/// Reads back a document produced by [`render_json`].
pub fn tree_from_json<T: Scalar>(text: &str) -> Result<ValuationTree<T>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
    let p = Prime::new(as_u64(&doc, "p")?)?;
    let f: Polynomial<T> = field(&doc, "polynomial")?
        .as_str()
        .ok_or_else(|| Error::Document("`polynomial` is not a string".into()))?
        .parse()?;
    let arity = as_u64(&doc, "arity")? as usize;
    let max_depth = as_u64(&doc, "max_depth")? as u32;
    let rule = match doc.get("rule").and_then(Value::as_str) {
        Some("modular") => LabelRule::Modular,
        Some("constant") => LabelRule::Constant,
        None => LabelRule::default_for(arity),
        Some(other) => return Err(Error::Document(format!("unknown rule `{other}`"))),
    };
    if doc.get("truncated").and_then(Value::as_bool) == Some(true) {
        return Err(Error::Document("truncated document has no tree".into()));
    }
    let root = node_from(field(&doc, "root")?, p)?;
    Ok(ValuationTree {
        f,
        p,
        arity,
        max_depth,
        rule,
        root,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::build_tree;
    use crate::{Poly, Tree};

    fn tree(src: &str, p: u64, arity: usize, depth: u32) -> Tree {
        build_tree(
            &src.parse::<Poly>().unwrap(),
            Prime::new(p).unwrap(),
            arity,
            depth,
        )
        .unwrap()
    }

    #[test]
    fn ascii_square_plus_five() {
        assert_eq!(
            render_ascii(&tree("x^2 + 5", 2, 1, 4)),
            "(0 mod 1) *\n  (0 mod 2) 0\n  (1 mod 2) 1\n"
        );
    }

    #[test]
    fn ascii_bivariate_indentation() {
        let text = render_ascii(&tree("x^2 + y^2 + x*y + x + y + 1", 2, 2, 4));
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[4], "  ((1, 1) mod 2) *");
        assert_eq!(lines[6], "    ((1, 3) mod 4) 1");
    }

    #[test]
    fn dot_structure() {
        let dot = render_dot(&tree("x^2 + y^2 + x*y + x + y + 1", 2, 2, 4));
        assert!(dot.starts_with("digraph \"valuation_tree\" {\n"));
        assert!(dot.ends_with("}\n"));
        assert_eq!(dot.matches(" -> ").count(), 8);
        assert_eq!(dot.matches("[label=").count(), 9);
        assert!(dot.contains("\"n4\" [label=\"*\", tooltip=\"((1, 1) mod 2)\"];"));
    }

    #[test]
    fn json_round_trip() {
        for (src, p, arity, depth) in [
            ("x^2 + 5", 2, 1, 4),
            ("x^2 + 7", 2, 1, 8),
            ("x^2 + y^2 + x*y + x + y + 1", 2, 2, 4),
            ("x*y + 1", 3, 2, 3),
        ] {
            let t = tree(src, p, arity, depth);
            let back: Tree = tree_from_json(&render_json(&t)).unwrap();
            assert_eq!(back, t, "{src}");
        }
    }

    #[test]
    fn json_rejects_contradictory_split() {
        let t = tree("x*y + 1", 3, 2, 3);
        let text = render_json(&t).replacen("\"exactly_p\"", "\"all_star\"", 1);
        assert!(matches!(
            tree_from_json::<num_bigint::BigInt>(&text),
            Err(Error::Document(_))
        ));
    }

    #[test]
    fn truncated_document() {
        let f: Poly = "x^2 + y^2".parse().unwrap();
        let text =
            render_truncated_json(&f, Prime::new(5).unwrap(), 2, 5, LabelRule::Modular, 1000);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["truncated"], json!(true));
        assert!(v["root"].is_null());
        assert!(tree_from_json::<num_bigint::BigInt>(&text).is_err());
    }
}
