use std::fmt::Write as _;

use paramcirc_core::arithmetize::{BoolCircuit, BoolNode, BoolOp};
use paramcirc_core::circuit::NodeId;

use super::{content_lines, header, number, ParseError};

fn parse_node(line: usize, words: &[&str]) -> Result<BoolNode, ParseError> {
    if words.len() < 3 {
        return Err(ParseError::new(line, "expected `node <id> <kind> …`"));
    }
    let want = |n: usize| {
        if words.len() == n {
            Ok(())
        } else {
            Err(ParseError::new(line, format!("`{}` node takes {} argument(s)", words[2], n - 3)))
        }
    };
    let id: NodeId = number(line, words[1], "a node id")?;
    let arg = |i: usize| number::<NodeId>(line, words[i], "a node id");
    let op = match words[2] {
        "and" | "or" => {
            want(5)?;
            let (a, b) = (arg(3)?, arg(4)?);
            if words[2] == "and" {
                BoolOp::And(a, b)
            } else {
                BoolOp::Or(a, b)
            }
        }
        "not" => {
            want(4)?;
            BoolOp::Not(arg(3)?)
        }
        "const0" | "const1" => {
            want(3)?;
            BoolOp::Const(words[2] == "const1")
        }
        "var" => {
            want(4)?;
            BoolOp::Var(number(line, words[3], "a variable index")?)
        }
        other => return Err(ParseError::new(line, format!("unknown node kind `{other}`"))),
    };
    Ok(BoolNode { id, op })
}

fn check_node(line: usize, node: &BoolNode, earlier: &[BoolNode], vars: u32) -> Result<(), ParseError> {
    if node.id == 0 || earlier.last().is_some_and(|p| p.id >= node.id) {
        return Err(ParseError::new(line, format!("node id {} is not increasing from 1", node.id)));
    }
    let args: &[NodeId] = match &node.op {
        BoolOp::And(a, b) | BoolOp::Or(a, b) => &[*a, *b],
        BoolOp::Not(a) => std::slice::from_ref(a),
        BoolOp::Var(i) if *i == 0 || *i > vars => {
            return Err(ParseError::new(line, format!("variable {i} outside 1..={vars}")));
        }
        _ => &[],
    };
    match args.iter().find(|&&a| earlier.binary_search_by_key(&a, |n| n.id).is_err()) {
        Some(a) => Err(ParseError::new(line, format!("argument {a} is not an earlier node"))),
        None => Ok(()),
    }
}

pub fn parse_bool(text: &str) -> Result<BoolCircuit, ParseError> {
    let last = text.lines().count().max(1);
    let mut lines = content_lines(text).peekable();
    let (_, name) = header(&mut lines, "boolcircuit", last)?;
    let (l, m) = header(&mut lines, "vars", last)?;
    let vars: u32 = number(l, m[0], "a variable count")?;
    let mut split = None;
    if let Some((l, w)) = lines.peek() {
        if w[0] == "split" {
            if w.len() != 3 {
                return Err(ParseError::new(*l, "expected `split <r> <n>`"));
            }
            let (r, n): (u32, u32) = (number(*l, w[1], "a parameter count")?, number(*l, w[2], "an input count")?);
            if r.checked_add(n) != Some(vars) {
                return Err(ParseError::new(*l, format!("split {r}+{n} does not add up to {vars} variables")));
            }
            split = Some((r, n));
            lines.next();
        }
    }
    let mut nodes = Vec::new();
    let mut outputs: Option<(usize, Vec<NodeId>)> = None;
    for (l, words) in lines {
        if outputs.is_some() {
            return Err(ParseError::new(l, "content after the `output` line"));
        }
        match words[0] {
            "node" => {
                let node = parse_node(l, &words)?;
                check_node(l, &node, &nodes, vars)?;
                nodes.push(node);
            }
            "output" => {
                let ids = words[1..].iter().map(|w| number(l, w, "a node id")).collect::<Result<Vec<NodeId>, _>>()?;
                outputs = Some((l, ids));
            }
            other => return Err(ParseError::new(l, format!("unknown directive `{other}`"))),
        }
    }
    let (l, outputs) = outputs.ok_or_else(|| ParseError::new(last, "missing `output` line"))?;
    BoolCircuit::new(name.join(" "), vars, split, nodes, outputs).map_err(|e| ParseError::new(l, e.to_string()))
}

pub fn render_bool(b: &BoolCircuit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "boolcircuit {}", b.name());
    let _ = writeln!(out, "vars {}", b.vars());
    if let Some((r, n)) = b.split() {
        let _ = writeln!(out, "split {r} {n}");
    }
    for node in b.nodes() {
        let id = node.id;
        let _ = match node.op {
            BoolOp::And(a, c) => writeln!(out, "node {id} and {a} {c}"),
            BoolOp::Or(a, c) => writeln!(out, "node {id} or {a} {c}"),
            BoolOp::Not(a) => writeln!(out, "node {id} not {a}"),
            BoolOp::Const(c) => writeln!(out, "node {id} const{}", c as u8),
            BoolOp::Var(i) => writeln!(out, "node {id} var {i}"),
        };
    }
    let outs: Vec<String> = b.outputs().iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "output {}", outs.join(" "));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const OR2: &str = "boolcircuit or2\nvars 3\nsplit 1 2\nnode 1 var 2\nnode 2 var 3\nnode 3 or 1 2\nnode 4 const1\nnode 5 and 3 4\noutput 5\n";

    #[test]
    fn roundtrip() {
        let b = parse_bool(OR2).unwrap();
        assert_eq!(b.split(), Some((1, 2)));
        assert_eq!(render_bool(&b), OR2);
    }

    #[test]
    fn errors_name_the_line() {
        assert_eq!(parse_bool(&OR2.replace("split 1 2", "split 1 1")).unwrap_err().line, 3);
        assert_eq!(parse_bool(&OR2.replace("node 3 or 1 2", "node 3 or 1 4")).unwrap_err().line, 6);
        assert_eq!(parse_bool(&OR2.replace("node 3 or 1 2", "node 3 xor 1 2")).unwrap_err().line, 6);
        assert_eq!(parse_bool(&OR2.replace("vars 3", "vars x")).unwrap_err().line, 2);
    }
}
