//! Seeded generators of random circuits, Boolean circuits and single-node
//! corruptions, used by the property tests and the acceptance suite.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::rat;
use crate::arithmetize::{BoolCircuit, BoolNode, BoolOp};
use crate::circuit::{Circuit, Node, NodeId, NodeLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub params: u32,
    pub inputs: u32,
    pub internal: usize,
    pub outputs: usize,
    /// Allow division nodes (the result may then be inconsistent).
    pub divisions: bool,
}

/// A random valid circuit. Leaves are repeated on purpose and some internal
/// nodes duplicate earlier ones (possibly with swapped arguments), so that
/// reduction has work to do.
pub fn random_circuit<R: Rng + ?Sized>(shape: Shape, rng: &mut R) -> Circuit {
    let mut nodes: Vec<Node> = Vec::new();
    let push = |nodes: &mut Vec<Node>, label: NodeLabel| {
        let id = nodes.len() as NodeId + 1;
        nodes.push(Node { id, label });
        id
    };
    let leaves = (shape.params + shape.inputs + 2) as usize;
    for _ in 0..leaves {
        let label = match rng.gen_range(0..3) {
            0 if shape.params > 0 => NodeLabel::Param(rng.gen_range(1..=shape.params)),
            1 if shape.inputs > 0 => NodeLabel::Input(rng.gen_range(1..=shape.inputs)),
            _ => NodeLabel::Scalar(rat(rng.gen_range(-3..=3))),
        };
        push(&mut nodes, label);
    }
    for _ in 0..shape.internal {
        let count = nodes.len() as NodeId;
        let internal: Vec<&Node> = nodes.iter().filter(|n| !n.label.is_leaf()).collect();
        if !internal.is_empty() && rng.gen_bool(0.2) {
            let label = internal.choose(rng).unwrap().label.clone();
            let label = match label {
                NodeLabel::Add(a, b) if rng.gen() => NodeLabel::Add(b, a),
                NodeLabel::Mul(a, b) if rng.gen() => NodeLabel::Mul(b, a),
                other => other,
            };
            push(&mut nodes, label);
            continue;
        }
        let a = rng.gen_range(1..=count);
        let b = rng.gen_range(1..=count);
        let ops = if shape.divisions { 4 } else { 3 };
        let label = match rng.gen_range(0..ops) {
            0 => NodeLabel::Add(a, b),
            1 => NodeLabel::Sub(a, b),
            2 => NodeLabel::Mul(a, b),
            _ => NodeLabel::Div(a, b),
        };
        push(&mut nodes, label);
    }
    let total = nodes.len() as NodeId;
    let first_internal = total - shape.internal as NodeId + 1;
    let mut outputs: Vec<NodeId> = (0..shape.outputs.saturating_sub(1)).map(|_| rng.gen_range(1..=total)).collect();
    outputs.push(if shape.internal > 0 { rng.gen_range(first_internal..=total) } else { total });
    Circuit::new("random", shape.params, shape.inputs, nodes, outputs).expect("valid by construction")
}

/// A random Boolean circuit over `vars` variables with one output (the last
/// gate). Every variable gets a leaf.
pub fn random_bool_circuit<R: Rng + ?Sized>(vars: u32, split: Option<(u32, u32)>, gates: usize, rng: &mut R) -> BoolCircuit {
    let mut nodes: Vec<BoolNode> = Vec::new();
    let push = |nodes: &mut Vec<BoolNode>, op: BoolOp| {
        let id = nodes.len() as NodeId + 1;
        nodes.push(BoolNode { id, op });
        id
    };
    for i in 1..=vars {
        push(&mut nodes, BoolOp::Var(i));
    }
    if rng.gen_bool(0.3) {
        push(&mut nodes, BoolOp::Const(rng.gen()));
    }
    for _ in 0..gates.max(1) {
        let count = nodes.len() as NodeId;
        let a = rng.gen_range(1..=count);
        let b = rng.gen_range(1..=count);
        let op = match rng.gen_range(0..5) {
            0 | 1 => BoolOp::And(a, b),
            2 | 3 => BoolOp::Or(a, b),
            _ => BoolOp::Not(a),
        };
        push(&mut nodes, op);
    }
    let out = nodes.len() as NodeId;
    BoolCircuit::new(format!("random_{vars}"), vars, split, nodes, alloc::vec![out]).expect("valid by construction")
}

/// Changes one internal node: its operation, one argument, or (for a
/// scalar) its value. Divisions are never introduced. Returns the changed
/// node id and the new circuit.
pub fn corrupt<R: Rng + ?Sized>(c: &Circuit, rng: &mut R) -> Option<(NodeId, Circuit)> {
    let candidates: Vec<usize> = c
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, n)| !matches!(n.label, NodeLabel::Input(_) | NodeLabel::Param(_)))
        .map(|(i, _)| i)
        .collect();
    let &pos = candidates.choose(rng)?;
    let mut nodes = c.nodes().to_vec();
    let node = &mut nodes[pos];
    node.label = match node.label.clone() {
        NodeLabel::Scalar(v) => NodeLabel::Scalar(v + rat(if rng.gen() { 1 } else { -1 })),
        label => {
            let (a, b) = label.args().expect("internal node");
            let earlier: Vec<NodeId> = c.nodes()[..pos].iter().map(|n| n.id).collect();
            match rng.gen_range(0..3) {
                0 => {
                    let ops = [NodeLabel::Add(a, b), NodeLabel::Sub(a, b), NodeLabel::Mul(a, b)];
                    ops.into_iter().filter(|l| *l != label).collect::<Vec<_>>().choose(rng).cloned()?
                }
                1 => label.with_args(*earlier.choose(rng)?, b),
                _ => label.with_args(a, *earlier.choose(rng)?),
            }
        }
    };
    let id = node.id;
    let out = Circuit::new(c.name(), c.params(), c.inputs(), nodes, c.outputs().to_vec()).ok()?;
    Some((id, out))
}
