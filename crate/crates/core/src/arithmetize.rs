//! Boolean circuits, their standard arithmetization and satisfiability
//! counting through the coefficients of an elimination polynomial.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::{rat, Rational, SparsePoly, Var};
use crate::circuit::{Circuit, CircuitBuilder, NodeId};
use crate::elim::{eliminate_enum, ElimProblem};
use crate::semantics::{interpret, Budget};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    Not(NodeId),
    Const(bool),
    /// 1-based variable index.
    Var(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoolNode {
    pub id: NodeId,
    pub op: BoolOp,
}

/// A Boolean circuit over variables `z₁…z_m`. With a split `(r, n)` the
/// first `r` variables are parameters and the remaining `n` are inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolCircuit {
    name: String,
    vars: u32,
    split: Option<(u32, u32)>,
    nodes: Vec<BoolNode>,
    outputs: Vec<NodeId>,
}

impl BoolCircuit {
    pub fn new(
        name: impl Into<String>,
        vars: u32,
        split: Option<(u32, u32)>,
        nodes: Vec<BoolNode>,
        outputs: Vec<NodeId>,
    ) -> Result<Self> {
        if let Some((r, n)) = split {
            if r.checked_add(n) != Some(vars) {
                return Err(Error::Validation(format!("split {r}+{n} does not add up to {vars} variables")));
            }
        }
        let mut prev: Option<NodeId> = None;
        for node in &nodes {
            if node.id == 0 || prev.is_some_and(|p| node.id <= p) {
                return Err(Error::Validation(format!("node ids must be positive and increasing at {}", node.id)));
            }
            prev = Some(node.id);
            let args: &[NodeId] = match &node.op {
                BoolOp::And(a, b) | BoolOp::Or(a, b) => &[*a, *b],
                BoolOp::Not(a) => core::slice::from_ref(a),
                BoolOp::Var(i) if *i == 0 || *i > vars => {
                    return Err(Error::Validation(format!("node {}: variable {i} out of range 1..={vars}", node.id)))
                }
                _ => &[],
            };
            if let Some(a) = args.iter().find(|&&a| a >= node.id || nodes.binary_search_by_key(&a, |n| n.id).is_err()) {
                return Err(Error::Validation(format!("node {}: argument {a} is not an earlier node", node.id)));
            }
        }
        if outputs.is_empty() {
            return Err(Error::Validation("no outputs".into()));
        }
        if let Some(o) = outputs.iter().find(|&&o| nodes.binary_search_by_key(&o, |n| n.id).is_err()) {
            return Err(Error::Validation(format!("output {o} does not exist")));
        }
        Ok(BoolCircuit { name: name.into(), vars, split, nodes, outputs })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vars(&self) -> u32 {
        self.vars
    }

    pub fn split(&self) -> Option<(u32, u32)> {
        self.split
    }

    pub fn nodes(&self) -> &[BoolNode] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    /// Number of parameter variables (0 without a split).
    pub fn params(&self) -> u32 {
        self.split.map_or(0, |(r, _)| r)
    }

    pub fn inputs(&self) -> u32 {
        self.vars - self.params()
    }

    fn position(&self, id: NodeId) -> usize {
        self.nodes.binary_search_by_key(&id, |n| n.id).expect("validated id")
    }

    /// Value of every node at `z ∈ {0,1}^m`.
    pub fn eval(&self, z: &[bool]) -> Vec<bool> {
        let mut vals: Vec<bool> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = |id: NodeId| vals[self.position(id)];
            let x = match node.op {
                BoolOp::And(a, b) => v(a) && v(b),
                BoolOp::Or(a, b) => v(a) || v(b),
                BoolOp::Not(a) => !v(a),
                BoolOp::Const(c) => c,
                BoolOp::Var(i) => z[i as usize - 1],
            };
            vals.push(x);
        }
        vals
    }

    /// Number of inputs `x ∈ {0,1}ⁿ` with the first output true at `(u, x)`.
    pub fn count_true(&self, u: &[bool]) -> u64 {
        let n = self.inputs();
        let out = self.position(self.outputs[0]);
        let mut z: Vec<bool> = u.to_vec();
        z.resize(self.vars as usize, false);
        (0u64..1 << n)
            .filter(|&x| {
                for i in 0..n as usize {
                    z[u.len() + i] = (x >> i) & 1 == 1;
                }
                self.eval(&z)[out]
            })
            .count() as u64
    }
}

/// An arithmetic circuit together with the node it assigns to every Boolean
/// node.
#[derive(Debug, Clone)]
pub struct Arithmetization {
    pub circuit: Circuit,
    /// `(Boolean node, arithmetic node)` in Boolean node order.
    pub node_map: Vec<(NodeId, NodeId)>,
}

/// `∧ ↦ a·b`, `∨ ↦ a + b − a·b`, `¬ ↦ 1 − a`. Variable `i ≤ r` becomes
/// parameter `i`, the others input `i − r`.
pub fn standard_arithmetization(b: &BoolCircuit) -> Arithmetization {
    let r = b.params();
    let mut cb = CircuitBuilder::new(b.name(), r, b.inputs());
    let mut map: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut one: Option<NodeId> = None;
    let mut node_map = Vec::with_capacity(b.nodes().len());
    for node in b.nodes() {
        let id = match node.op {
            BoolOp::And(x, y) => cb.mul(map[&x], map[&y]),
            BoolOp::Or(x, y) => {
                let (x, y) = (map[&x], map[&y]);
                let s = cb.add(x, y);
                let p = cb.mul(x, y);
                cb.sub(s, p)
            }
            BoolOp::Not(x) => {
                let c = *one.get_or_insert_with(|| cb.int(1));
                cb.sub(c, map[&x])
            }
            BoolOp::Const(c) => cb.int(c as i64),
            BoolOp::Var(i) if i <= r => cb.param(i),
            BoolOp::Var(i) => cb.input(i - r),
        };
        map.insert(node.id, id);
        node_map.push((node.id, id));
    }
    let outputs = b.outputs().iter().map(|o| map[o]).collect();
    let circuit = cb.finish(outputs).expect("arithmetization of a valid circuit is valid");
    Arithmetization { circuit, node_map }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    /// Exponent of the elimination polynomial that the formulas read.
    pub q: u32,
    pub max_inputs: u32,
    pub budget: Budget,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { q: 1, max_inputs: 12, budget: Budget::default() }
    }
}

/// The satisfying-assignment count computed three ways.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountReport {
    pub inputs: u32,
    pub q: u32,
    /// Order of `F^q` at `Y = 0`.
    pub order: u32,
    /// First coefficient of `F^q` at the assignment.
    pub phi1: Rational,
    /// `2ⁿ − l/q`, if `q` divides `l`.
    pub by_order: Option<u64>,
    /// `−φ₁/q`, if that is a nonnegative integer.
    pub by_trace: Option<u64>,
    pub by_truth_table: u64,
    /// `deg_U φ₁` of the symbolic first coefficient.
    pub phi1_degree: u32,
    pub h_degree: u32,
}

impl CountReport {
    pub fn count(&self) -> Option<u64> {
        self.is_consistent().then_some(self.by_truth_table)
    }

    /// Both formulas agree with the truth table and `deg_U φ₁ ≤ deg_U H`.
    pub fn is_consistent(&self) -> bool {
        self.by_order == Some(self.by_truth_table)
            && self.by_trace == Some(self.by_truth_table)
            && self.phi1_degree <= self.h_degree
    }
}

/// `−Σ_{ε ∈ {0,1}ⁿ} H(U, ε)`, summing each term once with the number of
/// Boolean points on which its input part is one.
fn symbolic_phi1(h: &SparsePoly, n: u32) -> SparsePoly {
    let mut out = SparsePoly::zero();
    for (m, c) in h.terms() {
        let (inputs, params) = m.split(Var::is_input);
        let free = n - inputs.factors().len() as u32;
        let weight = Rational::from_integer(BigInt::from(1u8) << free);
        out.add_term(params, -(c * weight));
    }
    out
}

fn nonnegative_integer(r: &Rational) -> Option<u64> {
    if r.is_integer() {
        r.to_integer().to_u64()
    } else {
        None
    }
}

/// Counts the `x ∈ {0,1}ⁿ` with `b(u, x) = 1` from `F = Π_x (Y − H(u, x))`,
/// where `H` is the arithmetization of `b`, once through the order of `F^q`
/// at zero and once through its first coefficient.
pub fn count_satisfying(b: &BoolCircuit, u: &[bool], opts: CountOptions) -> Result<CountReport> {
    if b.outputs().len() != 1 {
        return Err(Error::Validation(format!("counting needs one output, found {}", b.outputs().len())));
    }
    if u.len() != b.params() as usize {
        return Err(Error::ArityMismatch(format!("assignment has {} bits, circuit has {} parameters", u.len(), b.params())));
    }
    if opts.q == 0 {
        return Err(Error::Validation("q must be positive".into()));
    }
    let n = b.inputs();
    if n > opts.max_inputs {
        return Err(Error::BudgetExceeded(opts.budget.max_terms));
    }
    let arith = standard_arithmetization(b);
    let h = interpret(&arith.circuit, opts.budget)?.final_polys().expect("arithmetization is division-free").remove(0);

    let is_param = |v: Var| v.is_param();
    let phi1_sym = symbolic_phi1(&h, n);
    let h_degree = h.degree_in_set(is_param);
    let phi1_degree = phi1_sym.degree_in_set(is_param);

    let at_u: BTreeMap<Var, Rational> =
        u.iter().enumerate().map(|(k, &bit)| (Var::Param(k as u32 + 1), rat(bit as i64))).collect();
    let hu = h.eval(&at_u);
    let inputs: Vec<Var> = (1..=n).map(Var::Input).collect();
    let equations = inputs.iter().map(|&x| crate::elim::boolean_equation(x)).collect();
    let problem = ElimProblem::new(equations, hu, Vec::new(), inputs)?;
    let res = eliminate_enum(&problem, opts.budget)?.power(opts.q);

    let coeffs: Vec<SparsePoly> = core::iter::once(SparsePoly::one()).chain(res.phi.iter().cloned()).collect();
    let order = SparsePoly::from_coeff_vector(&coeffs, Var::Y).order_in(Var::Y).unwrap_or(0);
    let by_order = (order % opts.q == 0).then(|| (1u64 << n) - (order / opts.q) as u64);
    let phi1 = res.phi.first().and_then(SparsePoly::as_constant).unwrap_or_else(Rational::zero);
    let q = Rational::from_integer(BigInt::from(opts.q));

    // The symbolic first coefficient, specialized at u, is the q = 1 trace.
    let phi1_at_u = phi1_sym.eval(&at_u).as_constant().unwrap_or_else(Rational::zero);
    let by_trace = if &phi1_at_u * &q == phi1 {
        nonnegative_integer(&(-(&phi1) / &q))
    } else {
        log::warn!("symbolic and specialized first coefficients disagree for {}", b.name());
        None
    };
    Ok(CountReport {
        inputs: n,
        q: opts.q,
        order,
        phi1,
        by_order,
        by_trace,
        by_truth_table: b.count_true(u),
        phi1_degree,
        h_degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::VarNames;

    fn node(id: NodeId, op: BoolOp) -> BoolNode {
        BoolNode { id, op }
    }

    fn or2() -> BoolCircuit {
        let nodes = alloc::vec![node(1, BoolOp::Var(1)), node(2, BoolOp::Var(2)), node(3, BoolOp::Or(1, 2))];
        BoolCircuit::new("or", 2, Some((0, 2)), nodes, alloc::vec![3]).unwrap()
    }

    fn final_poly(b: &BoolCircuit) -> SparsePoly {
        let a = standard_arithmetization(b);
        interpret(&a.circuit, Budget::default()).unwrap().final_polys().unwrap().remove(0)
    }

    #[test]
    fn rules() {
        let nodes = alloc::vec![node(1, BoolOp::Var(1)), node(2, BoolOp::Var(2)), node(3, BoolOp::And(1, 2))];
        let and = BoolCircuit::new("and", 2, None, nodes, alloc::vec![3]).unwrap();
        assert_eq!(final_poly(&and), SparsePoly::parse("X1*X2", &VarNames::new()).unwrap());
        let nodes = alloc::vec![node(1, BoolOp::Var(1)), node(2, BoolOp::Not(1))];
        let not = BoolCircuit::new("not", 1, None, nodes, alloc::vec![2]).unwrap();
        assert_eq!(final_poly(&not), SparsePoly::parse("1 - X1", &VarNames::new()).unwrap());
        let h = final_poly(&or2());
        assert_eq!(h.evaluate(|_| rat(1)), rat(1));
    }

    #[test]
    fn validation() {
        let bad = alloc::vec![node(1, BoolOp::Var(3))];
        assert!(BoolCircuit::new("b", 2, None, bad, alloc::vec![1]).is_err());
        let fwd = alloc::vec![node(1, BoolOp::Not(2)), node(2, BoolOp::Var(1))];
        assert!(BoolCircuit::new("b", 1, None, fwd, alloc::vec![1]).is_err());
        let ok = alloc::vec![node(1, BoolOp::Var(1))];
        assert!(BoolCircuit::new("b", 1, Some((1, 1)), ok, alloc::vec![1]).is_err());
    }

    #[test]
    fn count_or() {
        let r = count_satisfying(&or2(), &[], CountOptions::default()).unwrap();
        assert_eq!(r.phi1, rat(-3));
        assert_eq!(r.count(), Some(3));
        assert_eq!(r.order, 1);
        let r2 = count_satisfying(&or2(), &[], CountOptions { q: 2, ..Default::default() }).unwrap();
        assert_eq!((r2.order, r2.phi1.clone(), r2.count()), (2, rat(-6), Some(3)));
    }

    #[test]
    fn count_const0() {
        let nodes = alloc::vec![node(1, BoolOp::Var(1)), node(2, BoolOp::Var(2)), node(3, BoolOp::Const(false))];
        let b = BoolCircuit::new("zero", 2, None, nodes, alloc::vec![3]).unwrap();
        let r = count_satisfying(&b, &[], CountOptions::default()).unwrap();
        assert_eq!((r.order, r.count()), (4, Some(0)));
    }

    #[test]
    fn count_boolhard_all_ones() {
        let b = crate::elim::boolhard_formula(2);
        let r = count_satisfying(&b, &[true; 5], CountOptions::default()).unwrap();
        assert_eq!(r.count(), Some(4));
    }

    #[test]
    fn input_budget() {
        let opts = CountOptions { max_inputs: 1, ..Default::default() };
        assert!(matches!(count_satisfying(&or2(), &[], opts), Err(Error::BudgetExceeded(_))));
    }
}
