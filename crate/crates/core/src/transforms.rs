//! Semantics-preserving rewriting: reduction, join and broadcasting.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{RatFunc, SparsePoly};
use crate::circuit::{Circuit, DivisionClass, Node, NodeId, NodeLabel};
use crate::modular;
use crate::semantics::{interpret, Budget};
use crate::{Error, Result};

/// Seed of the fingerprinting fallback used above the term budget.
const FINGERPRINT_SEED: u64 = 0x5eed_f00d;
const FINGERPRINT_PRIMES: usize = 3;

/// Merges nodes with equal intermediate results, keeping the smallest id of
/// each class. Output references are redirected to the survivors.
///
/// Equality is decided exactly when the interpretation fits in `budget`.
/// Otherwise nodes are compared by their images at one random point modulo
/// three random 62-bit primes; nodes whose image is undefined are never
/// merged.
pub fn reduce(c: &Circuit, budget: Budget) -> Result<Circuit> {
    let rep = match interpret(c, budget) {
        Ok(interp) => exact_representatives(c, interp.values().map(|(_, v)| v)),
        Err(Error::BudgetExceeded(_)) => fingerprint_representatives(c),
        Err(e) => return Err(e),
    };
    Ok(rebuild(c, &rep))
}

fn exact_representatives<'a>(c: &Circuit, values: impl Iterator<Item = &'a RatFunc>) -> Vec<NodeId> {
    let mut polys: BTreeMap<&SparsePoly, NodeId> = BTreeMap::new();
    let mut fractions: Vec<(&RatFunc, NodeId)> = Vec::new();
    let mut rep = Vec::with_capacity(c.nodes().len());
    for (node, v) in c.nodes().iter().zip(values) {
        let r = match v.as_poly() {
            Some(p) => *polys.entry(p).or_insert(node.id),
            None => match fractions.iter().find(|(w, _)| w.equals(v)) {
                Some(&(_, id)) => id,
                None => {
                    fractions.push((v, node.id));
                    node.id
                }
            },
        };
        rep.push(r);
    }
    rep
}

fn fingerprint_representatives(c: &Circuit) -> Vec<NodeId> {
    let mut rng = ChaCha8Rng::seed_from_u64(FINGERPRINT_SEED);
    let mut prints: Vec<Vec<Option<u64>>> = alloc::vec![Vec::new(); c.nodes().len()];
    for _ in 0..FINGERPRINT_PRIMES {
        let p = modular::random_prime(&mut rng);
        let params: Vec<u64> = (0..c.params()).map(|_| rng.gen_range(0..p)).collect();
        let inputs: Vec<u64> = (0..c.inputs()).map(|_| rng.gen_range(0..p)).collect();
        for (slot, v) in prints.iter_mut().zip(partial_eval_mod(c, p, &params, &inputs)) {
            slot.push(v);
        }
    }
    let mut seen: BTreeMap<&[Option<u64>], NodeId> = BTreeMap::new();
    c.nodes()
        .iter()
        .zip(&prints)
        .map(|(node, fp)| {
            if fp.iter().any(Option::is_none) {
                node.id
            } else {
                *seen.entry(fp.as_slice()).or_insert(node.id)
            }
        })
        .collect()
}

/// Node residues, `None` where a division by zero occurs on the way.
fn partial_eval_mod(c: &Circuit, p: u64, params: &[u64], inputs: &[u64]) -> Vec<Option<u64>> {
    let mut vals: Vec<Option<u64>> = Vec::with_capacity(c.nodes().len());
    for node in c.nodes() {
        let arg = |id: NodeId| vals[c.position(id).unwrap()];
        let v = match &node.label {
            NodeLabel::Scalar(r) => modular::rational_mod(r, p),
            NodeLabel::Param(k) => Some(params[*k as usize - 1]),
            NodeLabel::Input(i) => Some(inputs[*i as usize - 1]),
            NodeLabel::Add(a, b) => arg(*a).zip(arg(*b)).map(|(x, y)| modular::add_mod(x, y, p)),
            NodeLabel::Sub(a, b) => arg(*a).zip(arg(*b)).map(|(x, y)| modular::sub_mod(x, y, p)),
            NodeLabel::Mul(a, b) => arg(*a).zip(arg(*b)).map(|(x, y)| modular::mul_mod(x, y, p)),
            NodeLabel::Div(a, b) => arg(*a)
                .zip(arg(*b).and_then(|y| modular::inv_mod(y, p)))
                .map(|(x, y)| modular::mul_mod(x, y, p)),
        };
        vals.push(v);
    }
    vals
}

fn rebuild(c: &Circuit, rep: &[NodeId]) -> Circuit {
    let rep_of = |id: NodeId| rep[c.position(id).unwrap()];
    let nodes: Vec<Node> = c
        .nodes()
        .iter()
        .zip(rep)
        .filter(|(n, &r)| n.id == r)
        .map(|(n, _)| {
            let label = match n.label.args() {
                Some((a, b)) => n.label.with_args(rep_of(a), rep_of(b)),
                None => n.label.clone(),
            };
            Node { id: n.id, label }
        })
        .collect();
    let outputs = c.outputs().iter().map(|&o| rep_of(o)).collect();
    Circuit::new(c.name(), c.params(), c.inputs(), nodes, outputs).expect("reduction preserves validity")
}

/// Appends `inner` after the nodes of `outer`, wiring input `i` of `inner`
/// to node `wires[i-1]` of `outer`. Returns the new nodes and the id map of
/// `inner`.
fn splice(outer: &[Node], inner: &Circuit, wires: &[NodeId]) -> (Vec<Node>, BTreeMap<NodeId, NodeId>) {
    let offset = outer.last().map_or(0, |n| n.id);
    let mut nodes = outer.to_vec();
    let mut map: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for n in inner.nodes() {
        if let NodeLabel::Input(i) = n.label {
            map.insert(n.id, wires[i as usize - 1]);
            continue;
        }
        let id = offset + n.id;
        let label = match n.label.args() {
            Some((a, b)) => n.label.with_args(map[&a], map[&b]),
            None => n.label.clone(),
        };
        map.insert(n.id, id);
        nodes.push(Node { id, label });
    }
    (nodes, map)
}

/// Join without the consistency check: the outputs of `first` selected by
/// `lambda` (0-based output positions, one per input of `second`) feed the
/// inputs of `second`. The result has the inputs of `first` and the outputs
/// of `second`.
pub fn compose(first: &Circuit, second: &Circuit, lambda: &[usize]) -> Result<Circuit> {
    if first.params() != second.params() {
        return Err(Error::ArityMismatch(format!(
            "parameter counts differ: {} vs {}",
            first.params(),
            second.params()
        )));
    }
    if lambda.len() != second.inputs() as usize {
        return Err(Error::ArityMismatch(format!(
            "map covers {} inputs, second circuit has {}",
            lambda.len(),
            second.inputs()
        )));
    }
    if let Some(&bad) = lambda.iter().find(|&&pos| pos >= first.outputs().len()) {
        return Err(Error::ArityMismatch(format!(
            "output position {bad} out of range (first circuit has {} outputs)",
            first.outputs().len()
        )));
    }
    let wires: Vec<NodeId> = lambda.iter().map(|&pos| first.outputs()[pos]).collect();
    let (nodes, map) = splice(first.nodes(), second, &wires);
    let outputs = second.outputs().iter().map(|o| map[o]).collect();
    Circuit::new(format!("{}*{}", second.name(), first.name()), first.params(), first.inputs(), nodes, outputs)
}

/// Consistent join: [`compose`] followed by a symbolic consistency check.
pub fn join(first: &Circuit, second: &Circuit, lambda: &[usize], budget: Budget) -> Result<Circuit> {
    let c = compose(first, second, lambda)?;
    interpret(&c, budget)?;
    Ok(c)
}

/// Joins `gamma` into `c` at the nodes `at` (input `i` of `gamma` is wired
/// to `at[i-1]`), keeps the outputs of `c` and reduces. `gamma` must be
/// totally division-free.
pub fn broadcast(c: &Circuit, at: &[NodeId], gamma: &Circuit, budget: Budget) -> Result<Circuit> {
    if gamma.inputs() as usize != at.len() {
        return Err(Error::ArityMismatch(format!(
            "gamma has {} inputs for {} broadcast nodes",
            gamma.inputs(),
            at.len()
        )));
    }
    if gamma.params() != c.params() {
        return Err(Error::ArityMismatch(format!(
            "parameter counts differ: {} vs {}",
            c.params(),
            gamma.params()
        )));
    }
    if let Some(&bad) = at.iter().find(|&&id| c.position(id).is_none()) {
        return Err(Error::Validation(format!("broadcast node {bad} does not exist")));
    }
    if gamma.division_class()? != DivisionClass::TotallyDivisionFree {
        return Err(Error::NotRobust("broadcast circuit must be totally division-free".into()));
    }
    let (nodes, _) = splice(c.nodes(), gamma, at);
    let joined = Circuit::new(c.name(), c.params(), c.inputs(), nodes, c.outputs().to_vec())?;
    interpret(&joined, budget)?;
    reduce(&joined, budget)
}
