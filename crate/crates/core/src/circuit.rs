//! The parameterized arithmetic circuit DAG.
//!
//! Leaves are scalars, basic parameters `π₁…π_r` and inputs `X₁…X_n`;
//! internal nodes are binary `+ − × ÷` with ordered arguments. Node ids are
//! positive and strictly increasing and arguments always reference earlier
//! ids, so every valid circuit is topologically sorted and acyclic.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::algebra::{Rational, SparsePoly, Var};
use crate::semantics::{self, Budget};
use crate::{Error, Result};

pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeLabel {
    Scalar(Rational),
    Param(u32),
    Input(u32),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    /// Numerator, denominator.
    Div(NodeId, NodeId),
}

impl NodeLabel {
    pub fn args(&self) -> Option<(NodeId, NodeId)> {
        match *self {
            NodeLabel::Add(a, b) | NodeLabel::Sub(a, b) | NodeLabel::Mul(a, b) | NodeLabel::Div(a, b) => {
                Some((a, b))
            }
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.args().is_none()
    }

    /// Same operation with new arguments; leaves are returned unchanged.
    pub fn with_args(&self, a: NodeId, b: NodeId) -> NodeLabel {
        match self {
            NodeLabel::Add(..) => NodeLabel::Add(a, b),
            NodeLabel::Sub(..) => NodeLabel::Sub(a, b),
            NodeLabel::Mul(..) => NodeLabel::Mul(a, b),
            NodeLabel::Div(..) => NodeLabel::Div(a, b),
            leaf => leaf.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub label: NodeLabel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    name: String,
    params: u32,
    inputs: u32,
    nodes: Vec<Node>,
    outputs: Vec<NodeId>,
}

impl Circuit {
    pub fn new(
        name: impl Into<String>,
        params: u32,
        inputs: u32,
        nodes: Vec<Node>,
        outputs: Vec<NodeId>,
    ) -> Result<Circuit> {
        let c = Circuit { name: name.into(), params, inputs, nodes, outputs };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let mut prev: NodeId = 0;
        for node in &self.nodes {
            if node.id <= prev {
                let why = if node.id == prev { "duplicate" } else { "non-increasing" };
                return Err(Error::Validation(format!("{why} node id {}", node.id)));
            }
            match node.label {
                NodeLabel::Param(k) if k == 0 || k > self.params => {
                    return Err(Error::Validation(format!(
                        "node {}: parameter index {k} outside 1..={}",
                        node.id, self.params
                    )));
                }
                NodeLabel::Input(i) if i == 0 || i > self.inputs => {
                    return Err(Error::Validation(format!(
                        "node {}: input index {i} outside 1..={}",
                        node.id, self.inputs
                    )));
                }
                _ => {}
            }
            if let Some((a, b)) = node.label.args() {
                for arg in [a, b] {
                    if arg >= node.id || self.position(arg).is_none() {
                        return Err(Error::Validation(format!(
                            "node {} references undefined or later node {arg}",
                            node.id
                        )));
                    }
                }
            }
            prev = node.id;
        }
        if self.outputs.is_empty() {
            return Err(Error::Validation("circuit has no outputs".into()));
        }
        for &o in &self.outputs {
            if self.position(o).is_none() {
                return Err(Error::Validation(format!("output references undefined node {o}")));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Circuit {
        self.name = name.into();
        self
    }

    /// Number of basic parameters `r`.
    pub fn params(&self) -> u32 {
        self.params
    }

    /// Number of inputs `n`.
    pub fn inputs(&self) -> u32 {
        self.inputs
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    pub fn max_id(&self) -> NodeId {
        self.nodes.last().map_or(0, |n| n.id)
    }

    pub fn position(&self, id: NodeId) -> Option<usize> {
        self.nodes.binary_search_by_key(&id, |n| n.id).ok()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.position(id).map(|i| &self.nodes[i])
    }

    /// Nodes of outdegree zero that are not outputs.
    pub fn lints(&self) -> Vec<String> {
        let mut used: BTreeSet<NodeId> = self.outputs.iter().copied().collect();
        for n in &self.nodes {
            if let Some((a, b)) = n.label.args() {
                used.insert(a);
                used.insert(b);
            }
        }
        self.nodes
            .iter()
            .filter(|n| !used.contains(&n.id))
            .map(|n| format!("node {} has outdegree zero but is not an output", n.id))
            .collect()
    }

    pub fn classify(&self) -> Vec<NodeFlags> {
        let mut flags: Vec<NodeFlags> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let f = match node.label {
                NodeLabel::Scalar(_) => NodeFlags::leaf(node.id, false, false),
                NodeLabel::Param(_) => NodeFlags::leaf(node.id, true, false),
                NodeLabel::Input(_) => NodeFlags::leaf(node.id, true, true),
                ref l => {
                    let (a, b) = l.args().unwrap();
                    let fa = flags[self.position(a).unwrap()];
                    let fb = flags[self.position(b).unwrap()];
                    let depends_on_input = fa.depends_on_input || fb.depends_on_input;
                    let is_essential = match l {
                        NodeLabel::Add(..) | NodeLabel::Mul(..) => fa.depends_on_input && fb.depends_on_input,
                        NodeLabel::Div(..) => fb.depends_on_input,
                        _ => false,
                    };
                    let counts_nonscalar = match l {
                        NodeLabel::Mul(..) => fa.depends_on_var && fb.depends_on_var,
                        NodeLabel::Div(..) => fb.depends_on_var,
                        _ => false,
                    };
                    NodeFlags {
                        id: node.id,
                        is_parameter_node: !depends_on_input,
                        depends_on_input,
                        depends_on_var: fa.depends_on_var || fb.depends_on_var,
                        is_essential,
                        counts_nonscalar,
                    }
                }
            };
            flags.push(f);
        }
        flags
    }

    pub fn metrics(&self) -> Metrics {
        let flags = self.classify();
        let mut depth: Vec<u32> = Vec::with_capacity(self.nodes.len());
        let mut m = Metrics { total_nodes: self.nodes.len(), ..Metrics::default() };
        for (node, f) in self.nodes.iter().zip(&flags) {
            let mut d = 0;
            if let Some((a, b)) = node.label.args() {
                m.internal_nodes += 1;
                d = depth[self.position(a).unwrap()].max(depth[self.position(b).unwrap()]);
                if f.counts_nonscalar {
                    m.nonscalar_size += 1;
                    d += 1;
                    if f.is_essential && matches!(node.label, NodeLabel::Mul(..) | NodeLabel::Div(..)) {
                        m.essential_mul_count += 1;
                    } else {
                        m.param_mul_count += 1;
                    }
                }
            }
            depth.push(d);
        }
        m.nonscalar_depth = depth.into_iter().max().unwrap_or(0);
        m
    }

    /// Strongest division class; decides scalar-ness of divisors
    /// semantically.
    pub fn division_class(&self) -> Result<DivisionClass> {
        if !self.nodes.iter().any(|n| matches!(n.label, NodeLabel::Div(..))) {
            return Ok(DivisionClass::TotallyDivisionFree);
        }
        let interp = semantics::interpret(self, Budget::default())?;
        let mut totally = true;
        for node in &self.nodes {
            if let NodeLabel::Div(_, b) = node.label {
                match interp.value(b).and_then(|v| v.as_constant()) {
                    Some(c) if !c.is_zero() => {}
                    Some(_) => return Err(Error::InconsistentCircuit(node.id)),
                    None => totally = false,
                }
            }
        }
        if totally {
            return Ok(DivisionClass::TotallyDivisionFree);
        }
        let flags = self.classify();
        let essentially = self
            .nodes
            .iter()
            .zip(&flags)
            .all(|(n, f)| !matches!(n.label, NodeLabel::Div(..)) || f.is_parameter_node);
        Ok(if essentially { DivisionClass::EssentiallyDivisionFree } else { DivisionClass::General })
    }

    /// Only the syntactic criterion "totally division-free implies robust"
    /// is decided.
    pub fn robustness(&self) -> Result<Robustness> {
        Ok(match self.division_class()? {
            DivisionClass::TotallyDivisionFree => Robustness::Robust,
            _ => Robustness::Unknown,
        })
    }

    /// Ids of all nodes the given node depends on, itself included.
    pub fn cone(&self, id: NodeId) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![id];
        while let Some(x) = stack.pop() {
            if !seen.insert(x) {
                continue;
            }
            if let Some((a, b)) = self.node(x).and_then(|n| n.label.args()) {
                stack.push(a);
                stack.push(b);
            }
        }
        seen
    }

    /// Straight expansion of polynomials in `Param`/`Input` variables: one
    /// product chain per monomial, summed per output.
    pub fn from_polys(name: impl Into<String>, params: u32, inputs: u32, polys: &[SparsePoly]) -> Result<Circuit> {
        let mut b = CircuitBuilder::new(name, params, inputs);
        let mut outputs = Vec::with_capacity(polys.len());
        for p in polys {
            let mut terms = Vec::new();
            for (m, c) in p.terms() {
                let mut factors = alloc::vec![b.scalar(c.clone())];
                for &(v, e) in m.factors() {
                    let leaf = match v {
                        Var::Param(k) if k >= 1 && k <= params => b.param(k),
                        Var::Input(i) if i >= 1 && i <= inputs => b.input(i),
                        other => return Err(Error::Validation(format!("variable {other:?} has no leaf"))),
                    };
                    factors.extend(core::iter::repeat(leaf).take(e as usize));
                }
                terms.push(b.product(&factors));
            }
            let out = if terms.is_empty() { b.int(0) } else { b.sum(&terms) };
            outputs.push(out);
        }
        b.finish(outputs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeFlags {
    pub id: NodeId,
    pub is_parameter_node: bool,
    pub depends_on_input: bool,
    /// Depends on some parameter or input (false exactly for scalar nodes).
    pub depends_on_var: bool,
    pub is_essential: bool,
    /// Counted by the non-scalar measure.
    pub counts_nonscalar: bool,
}

impl NodeFlags {
    fn leaf(id: NodeId, depends_on_var: bool, depends_on_input: bool) -> Self {
        NodeFlags {
            id,
            is_parameter_node: !depends_on_input,
            depends_on_input,
            depends_on_var,
            is_essential: false,
            counts_nonscalar: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Metrics {
    pub total_nodes: usize,
    pub internal_nodes: usize,
    /// Ostrowski measure: multiplications with both arguments depending on a
    /// parameter or input, plus divisions whose denominator does.
    pub nonscalar_size: usize,
    /// Longest chain of counted nodes.
    pub nonscalar_depth: u32,
    pub essential_mul_count: usize,
    /// Counted nodes that are not essential (multiplications or divisions
    /// involving a parameter node).
    pub param_mul_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisionClass {
    TotallyDivisionFree,
    EssentiallyDivisionFree,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Robustness {
    Robust,
    Unknown,
}

/// Incremental construction with sequential ids starting at 1. Parameter and
/// input leaves are created once and shared.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    name: String,
    params: u32,
    inputs: u32,
    nodes: Vec<Node>,
    param_leaf: Vec<Option<NodeId>>,
    input_leaf: Vec<Option<NodeId>>,
}

impl CircuitBuilder {
    pub fn new(name: impl Into<String>, params: u32, inputs: u32) -> Self {
        CircuitBuilder {
            name: name.into(),
            params,
            inputs,
            nodes: Vec::new(),
            param_leaf: alloc::vec![None; params as usize + 1],
            input_leaf: alloc::vec![None; inputs as usize + 1],
        }
    }

    pub fn push(&mut self, label: NodeLabel) -> NodeId {
        let id = self.nodes.len() as NodeId + 1;
        self.nodes.push(Node { id, label });
        id
    }

    pub fn scalar(&mut self, c: Rational) -> NodeId {
        self.push(NodeLabel::Scalar(c))
    }

    pub fn int(&mut self, c: i64) -> NodeId {
        self.scalar(crate::algebra::rat(c))
    }

    /// Panics if `k` is outside `1..=params`.
    pub fn param(&mut self, k: u32) -> NodeId {
        if let Some(id) = self.param_leaf[k as usize] {
            return id;
        }
        assert!(k >= 1);
        let id = self.push(NodeLabel::Param(k));
        self.param_leaf[k as usize] = Some(id);
        id
    }

    /// Panics if `i` is outside `1..=inputs`.
    pub fn input(&mut self, i: u32) -> NodeId {
        if let Some(id) = self.input_leaf[i as usize] {
            return id;
        }
        assert!(i >= 1);
        let id = self.push(NodeLabel::Input(i));
        self.input_leaf[i as usize] = Some(id);
        id
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(NodeLabel::Add(a, b))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(NodeLabel::Sub(a, b))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(NodeLabel::Mul(a, b))
    }

    pub fn div(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(NodeLabel::Div(a, b))
    }

    /// Product of a nonempty list, left to right.
    pub fn product(&mut self, factors: &[NodeId]) -> NodeId {
        let mut acc = factors[0];
        for &f in &factors[1..] {
            acc = self.mul(acc, f);
        }
        acc
    }

    pub fn sum(&mut self, terms: &[NodeId]) -> NodeId {
        let mut acc = terms[0];
        for &t in &terms[1..] {
            acc = self.add(acc, t);
        }
        acc
    }

    pub fn finish(self, outputs: Vec<NodeId>) -> Result<Circuit> {
        Circuit::new(self.name, self.params, self.inputs, self.nodes, outputs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Circuit {
        let mut b = CircuitBuilder::new("sq", 0, 1);
        let x = b.input(1);
        let m = b.mul(x, x);
        b.finish(alloc::vec![m]).unwrap()
    }

    #[test]
    fn validation_errors() {
        let nodes = alloc::vec![
            Node { id: 1, label: NodeLabel::Param(1) },
            Node { id: 2, label: NodeLabel::Input(1) },
            Node { id: 3, label: NodeLabel::Mul(1, 5) },
        ];
        assert!(matches!(Circuit::new("c", 2, 1, nodes, alloc::vec![3]), Err(Error::Validation(_))));
        let nodes = alloc::vec![Node { id: 1, label: NodeLabel::Param(3) }];
        assert!(Circuit::new("c", 2, 1, nodes, alloc::vec![1]).is_err());
        let nodes = alloc::vec![Node { id: 1, label: NodeLabel::Input(1) }, Node { id: 1, label: NodeLabel::Input(1) }];
        assert!(Circuit::new("c", 0, 1, nodes, alloc::vec![1]).is_err());
        let nodes = alloc::vec![Node { id: 1, label: NodeLabel::Input(1) }];
        assert!(Circuit::new("c", 0, 1, nodes.clone(), alloc::vec![]).is_err());
        assert!(Circuit::new("c", 0, 1, nodes, alloc::vec![1, 1]).is_ok());
    }

    #[test]
    fn classify_examples() {
        let mut b = CircuitBuilder::new("c", 1, 1);
        let p = b.param(1);
        let x = b.input(1);
        let px = b.mul(p, x);
        let xx = b.mul(x, x);
        let c = b.finish(alloc::vec![px, xx]).unwrap();
        let f = c.classify();
        assert!(f[0].is_parameter_node && !f[0].is_essential);
        assert!(f[2].depends_on_input && !f[2].is_essential && f[2].counts_nonscalar);
        assert!(f[3].is_essential);
        for fl in &f {
            assert!(fl.is_parameter_node ^ fl.depends_on_input);
        }
    }

    #[test]
    fn metrics_examples() {
        let m = square().metrics();
        assert_eq!((m.nonscalar_size, m.essential_mul_count, m.nonscalar_depth), (1, 1, 1));

        let mut b = CircuitBuilder::new("3x", 0, 1);
        let three = b.int(3);
        let x = b.input(1);
        let y = b.mul(three, x);
        let m = b.finish(alloc::vec![y]).unwrap().metrics();
        assert_eq!(m.nonscalar_size, 0);
    }

    #[test]
    fn division_classes() {
        assert_eq!(square().division_class().unwrap(), DivisionClass::TotallyDivisionFree);

        let mut b = CircuitBuilder::new("d", 2, 1);
        let p1 = b.param(1);
        let p2 = b.param(2);
        let q = b.div(p1, p2);
        let x = b.input(1);
        let y = b.mul(q, x);
        let c = b.finish(alloc::vec![y]).unwrap();
        assert_eq!(c.division_class().unwrap(), DivisionClass::EssentiallyDivisionFree);
        assert_eq!(c.robustness().unwrap(), Robustness::Unknown);

        let mut b = CircuitBuilder::new("g", 0, 2);
        let x1 = b.input(1);
        let x2 = b.input(2);
        let q = b.div(x1, x2);
        assert_eq!(b.finish(alloc::vec![q]).unwrap().division_class().unwrap(), DivisionClass::General);

        // Divisor syntactically input-dependent but semantically the scalar 2.
        let mut b = CircuitBuilder::new("s", 0, 1);
        let x = b.input(1);
        let two = b.int(2);
        let s = b.add(x, two);
        let d = b.sub(s, x);
        let q = b.div(x, d);
        let c = b.finish(alloc::vec![q]).unwrap();
        assert_eq!(c.division_class().unwrap(), DivisionClass::TotallyDivisionFree);
        assert_eq!(c.robustness().unwrap(), Robustness::Robust);
    }

    #[test]
    fn lints_report_dangling_nodes() {
        let mut b = CircuitBuilder::new("l", 0, 1);
        let x = b.input(1);
        let _dead = b.mul(x, x);
        let c = b.finish(alloc::vec![x]).unwrap();
        assert_eq!(c.lints().len(), 1);
    }
}
