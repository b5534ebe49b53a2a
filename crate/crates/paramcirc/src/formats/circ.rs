use std::fmt::Write as _;

use paramcirc_core::algebra::Rational;
use paramcirc_core::circuit::{Circuit, Node, NodeId, NodeLabel};

use super::{content_lines, header, number, ParseError};

fn parse_rational(line: usize, word: &str) -> Result<Rational, ParseError> {
    let bad = || ParseError::new(line, format!("expected a rational constant, found `{word}`"));
    let (n, d) = match word.split_once('/') {
        Some((n, d)) => (n, d),
        None => (word, "1"),
    };
    let n: num_bigint::BigInt = n.parse().map_err(|_| bad())?;
    let d: num_bigint::BigInt = d.parse().map_err(|_| bad())?;
    if d == 0.into() {
        return Err(ParseError::new(line, "zero denominator in constant"));
    }
    Ok(Rational::new(n, d))
}

fn parse_node(line: usize, words: &[&str]) -> Result<Node, ParseError> {
    let arity = |n: usize| {
        if words.len() == n {
            Ok(())
        } else {
            Err(ParseError::new(line, format!("`{}` node takes {} argument(s)", words[2], n - 3)))
        }
    };
    if words.len() < 3 {
        return Err(ParseError::new(line, "expected `node <id> <kind> …`"));
    }
    let id: NodeId = number(line, words[1], "a node id")?;
    if id == 0 {
        return Err(ParseError::new(line, "node ids start at 1"));
    }
    let arg = |i: usize| number::<NodeId>(line, words[i], "a node id");
    let label = match words[2] {
        "const" => {
            arity(4)?;
            NodeLabel::Scalar(parse_rational(line, words[3])?)
        }
        "param" => {
            arity(4)?;
            NodeLabel::Param(number(line, words[3], "a parameter index")?)
        }
        "input" => {
            arity(4)?;
            NodeLabel::Input(number(line, words[3], "an input index")?)
        }
        op @ ("add" | "sub" | "mul" | "div") => {
            arity(5)?;
            let (a, b) = (arg(3)?, arg(4)?);
            match op {
                "add" => NodeLabel::Add(a, b),
                "sub" => NodeLabel::Sub(a, b),
                "mul" => NodeLabel::Mul(a, b),
                _ => NodeLabel::Div(a, b),
            }
        }
        other => return Err(ParseError::new(line, format!("unknown node kind `{other}`"))),
    };
    Ok(Node { id, label })
}

fn check_node(line: usize, node: &Node, earlier: &[Node], params: u32, inputs: u32) -> Result<(), ParseError> {
    if earlier.last().is_some_and(|prev| prev.id >= node.id) {
        return Err(ParseError::new(line, format!("node id {} is not increasing", node.id)));
    }
    match node.label {
        NodeLabel::Param(k) if k == 0 || k > params => {
            Err(ParseError::new(line, format!("parameter index {k} outside 1..={params}")))
        }
        NodeLabel::Input(i) if i == 0 || i > inputs => {
            Err(ParseError::new(line, format!("input index {i} outside 1..={inputs}")))
        }
        _ => match node.label.args() {
            Some((a, b)) => match [a, b].into_iter().find(|&x| earlier.binary_search_by_key(&x, |n| n.id).is_err()) {
                Some(x) => Err(ParseError::new(line, format!("argument {x} is not an earlier node"))),
                None => Ok(()),
            },
            None => Ok(()),
        },
    }
}

pub fn parse_circ(text: &str) -> Result<Circuit, ParseError> {
    let last = text.lines().count().max(1);
    let mut lines = content_lines(text).peekable();
    let (_, name) = header(&mut lines, "circuit", last)?;
    let (l, r) = header(&mut lines, "params", last)?;
    let params: u32 = number(l, r[0], "a parameter count")?;
    let (l, n) = header(&mut lines, "inputs", last)?;
    let inputs: u32 = number(l, n[0], "an input count")?;
    let mut nodes = Vec::new();
    let mut outputs: Option<(usize, Vec<NodeId>)> = None;
    for (l, words) in lines {
        if outputs.is_some() {
            return Err(ParseError::new(l, "content after the `output` line"));
        }
        match words[0] {
            "node" => {
                let node = parse_node(l, &words)?;
                check_node(l, &node, &nodes, params, inputs)?;
                nodes.push(node);
            }
            "output" => {
                let ids = words[1..].iter().map(|w| number(l, w, "a node id")).collect::<Result<Vec<NodeId>, _>>()?;
                if ids.is_empty() {
                    return Err(ParseError::new(l, "`output` needs at least one node id"));
                }
                outputs = Some((l, ids));
            }
            other => return Err(ParseError::new(l, format!("unknown directive `{other}`"))),
        }
    }
    let (l, outputs) = outputs.ok_or_else(|| ParseError::new(last, "missing `output` line"))?;
    Circuit::new(name.join(" "), params, inputs, nodes, outputs).map_err(|e| ParseError::new(l, e.to_string()))
}

pub fn render_circ(c: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "circuit {}", c.name());
    let _ = writeln!(out, "params {}", c.params());
    let _ = writeln!(out, "inputs {}", c.inputs());
    for node in c.nodes() {
        let _ = match &node.label {
            NodeLabel::Scalar(q) => writeln!(out, "node {} const {q}", node.id),
            NodeLabel::Param(k) => writeln!(out, "node {} param {k}", node.id),
            NodeLabel::Input(i) => writeln!(out, "node {} input {i}", node.id),
            NodeLabel::Add(a, b) => writeln!(out, "node {} add {a} {b}", node.id),
            NodeLabel::Sub(a, b) => writeln!(out, "node {} sub {a} {b}", node.id),
            NodeLabel::Mul(a, b) => writeln!(out, "node {} mul {a} {b}", node.id),
            NodeLabel::Div(a, b) => writeln!(out, "node {} div {a} {b}", node.id),
        };
    }
    let outs: Vec<String> = c.outputs().iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "output {}", outs.join(" "));
    out
}
