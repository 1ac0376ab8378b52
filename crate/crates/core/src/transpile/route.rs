use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::CouplingGraph;
use crate::circuit::{Circuit, Gate, GateKind, Step};
use crate::error::{Error, Result};

/// CNOTs charged for one SWAP.
pub const SWAP_CNOTS: usize = 3;

/// Injective map from logical to physical qubits.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Layout {
    mapping: Vec<usize>,
}

impl Layout {
    pub fn new(mapping: Vec<usize>, num_physical: usize) -> Result<Self> {
        for (i, &p) in mapping.iter().enumerate() {
            if p >= num_physical {
                return Err(Error::InvalidArgument(format!("physical qubit {p} out of range")));
            }
            if mapping[..i].contains(&p) {
                return Err(Error::InvalidArgument(format!("physical qubit {p} assigned twice")));
            }
        }
        Ok(Self { mapping })
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn physical(&self, logical: usize) -> usize {
        self.mapping[logical]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CostReport {
    /// Two-qubit gates, with each SWAP counted as three CNOTs.
    pub cnot_count: usize,
    pub swap_count: usize,
    pub depth: usize,
}

/// Result of [`route`].
#[derive(Clone, Debug, PartialEq)]
pub struct Routing {
    /// Placement before the first step.
    pub layout: Layout,
    /// Placement after the last step (differs from `layout` when SWAPs move qubits).
    pub final_layout: Layout,
    /// Circuit over the device's physical qubits.
    pub routed: Circuit,
    pub cost: CostReport,
}

impl Routing {
    /// The routed circuit restricted to the physical qubits it uses. Compact
    /// qubit `i` is physical `physical[i]`; the initially placed logical
    /// qubits come first in logical order. Returns the circuit, `physical`,
    /// and where each logical qubit ends up in compact numbering.
    pub fn compact(&self) -> (Circuit, Vec<usize>, Vec<usize>) {
        let mut physical: Vec<usize> = self.layout.mapping.clone();
        let mut extra: Vec<usize> =
            self.routed.steps().iter().flat_map(|s| s.qubits().to_vec()).filter(|q| !physical.contains(q)).collect();
        extra.sort_unstable();
        extra.dedup();
        physical.extend(extra);
        let index = |p: usize| physical.iter().position(|&x| x == p).expect("used qubit");
        let mut c = Circuit::new(physical.len()).with_bits(self.routed.num_bits());
        for s in self.routed.steps() {
            c.push(remap_step(s, index));
        }
        let finals = self.final_layout.mapping.iter().map(|&p| index(p)).collect();
        (c, physical, finals)
    }
}

pub(crate) fn remap_step(s: &Step, f: impl Fn(usize) -> usize) -> Step {
    match s {
        Step::Gate(g) => Step::Gate(g.remapped(f)),
        Step::Measure { qubits, bits } => {
            Step::Measure { qubits: qubits.iter().map(|&q| f(q)).collect(), bits: bits.clone() }
        }
        Step::Conditional { gate, bit, value } => {
            Step::Conditional { gate: gate.remapped(f), bit: *bit, value: *value }
        }
    }
}

fn step_gate(s: &Step) -> Option<&Gate> {
    match s {
        Step::Gate(g) | Step::Conditional { gate: g, .. } => Some(g),
        Step::Measure { .. } => None,
    }
}

/// CNOT count (SWAP = 3), SWAP count and depth of an edge-respecting
/// circuit. Depth is the longest chain of steps linked by shared qubits or
/// classical bits; a SWAP occupies three layers.
pub fn cost(routed: &Circuit, graph: &CouplingGraph) -> Result<CostReport> {
    let mut cnot_count = 0;
    let mut swap_count = 0;
    let mut qubit_level = vec![0usize; routed.num_qubits()];
    let mut bit_level = vec![0usize; routed.num_bits()];
    for s in routed.steps() {
        let mut weight = 1;
        if let Some(g) = step_gate(s) {
            let t = g.targets();
            match t.len() {
                1 => {}
                2 => {
                    if !graph.has_edge(t[0], t[1]) {
                        return Err(Error::NonEdgeGate(t[0], t[1]));
                    }
                    if matches!(g.kind(), GateKind::Swap) {
                        swap_count += 1;
                        cnot_count += SWAP_CNOTS;
                        weight = SWAP_CNOTS;
                    } else {
                        cnot_count += 1;
                    }
                }
                k => return Err(Error::Routing(format!("{k}-qubit gate cannot be costed"))),
            }
        }
        let bits: Vec<usize> = match s {
            Step::Measure { bits, .. } => bits.clone(),
            Step::Conditional { bit, .. } => vec![*bit],
            Step::Gate(_) => Vec::new(),
        };
        let start =
            s.qubits().iter().map(|&q| qubit_level[q]).chain(bits.iter().map(|&b| bit_level[b])).max().unwrap_or(0);
        let end = start + weight;
        for &q in s.qubits() {
            qubit_level[q] = end;
        }
        for &b in &bits {
            bit_level[b] = end;
        }
    }
    let depth = qubit_level.iter().chain(&bit_level).copied().max().unwrap_or(0);
    Ok(CostReport { cnot_count, swap_count, depth })
}

/// All injective placements of `n` logical qubits on `p` physical ones, in
/// lexicographic order.
fn placements(n: usize, p: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u8>| {
                (0..p as u8)
                    .filter(|q| !prefix.contains(q))
                    .map(|q| {
                        let mut v = prefix.clone();
                        v.push(q);
                        v
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

const UNREACHABLE: usize = usize::MAX;

struct SwapSpace {
    edges: Vec<(usize, usize)>,
    placements: Vec<Vec<u8>>,
    /// `next[p][e]`: placement after swapping edge `e` from placement `p`.
    next: Vec<Vec<usize>>,
}

impl SwapSpace {
    fn new(n: usize, g: &CouplingGraph) -> Self {
        let placements = placements(n, g.num_physical());
        let index: HashMap<&[u8], usize> = placements.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let next = placements
            .iter()
            .map(|p| {
                edges
                    .iter()
                    .map(|&(a, b)| {
                        let moved: Vec<u8> = p
                            .iter()
                            .map(|&q| match q as usize {
                                x if x == a => b as u8,
                                x if x == b => a as u8,
                                _ => q,
                            })
                            .collect();
                        index[moved.as_slice()]
                    })
                    .collect()
            })
            .collect();
        Self { edges, placements, next }
    }

    /// Multi-source Dijkstra over SWAPs (cost 1 each) from `init`.
    fn relax(&self, init: Vec<usize>) -> Vec<usize> {
        let mut dist = init;
        let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
            dist.iter().enumerate().filter(|(_, &d)| d != UNREACHABLE).map(|(p, &d)| Reverse((d, p))).collect();
        while let Some(Reverse((d, p))) = heap.pop() {
            if d > dist[p] {
                continue;
            }
            for &q in &self.next[p] {
                if d + 1 < dist[q] {
                    dist[q] = d + 1;
                    heap.push(Reverse((d + 1, q)));
                }
            }
        }
        dist
    }
}

/// Chooses a layout and inserts SWAPs so that every two-qubit gate acts on a
/// coupling edge.
///
/// The search is exact. For every two-qubit gate `i` and placement `p`, a
/// backward pass computes the fewest SWAPs needed to finish the circuit from
/// gate `i` in placement `p`. Every initial placement achieving the global
/// minimum is expanded into a routed circuit, and the winner is the least
/// `(cnot_count, depth, layout)`.
pub fn route(c: &Circuit, g: &CouplingGraph) -> Result<Routing> {
    c.validate()?;
    let n = c.num_qubits();
    if n > g.num_physical() {
        return Err(Error::Routing(format!("{n} logical qubits exceed {} physical", g.num_physical())));
    }
    let pairs: Vec<(usize, usize)> = c
        .steps()
        .iter()
        .filter_map(step_gate)
        .filter_map(|gate| match gate.targets() {
            [_] => None,
            [a, b] => Some(Ok((*a, *b))),
            t => Some(Err(Error::Routing(format!("{}-qubit gate cannot be routed", t.len())))),
        })
        .collect::<Result<_>>()?;

    let space = SwapSpace::new(n, g);
    let np = space.placements.len();
    let executable = |i: usize, p: usize| {
        let pl = &space.placements[p];
        let (a, b) = pairs[i];
        g.has_edge(pl[a] as usize, pl[b] as usize)
    };
    // togo[i][p]: fewest SWAPs to finish from gate i in placement p.
    let mut togo = vec![vec![0usize; np]; pairs.len() + 1];
    for i in (0..pairs.len()).rev() {
        let init = (0..np).map(|p| if executable(i, p) { togo[i + 1][p] } else { UNREACHABLE }).collect();
        togo[i] = space.relax(init);
    }
    let best = *togo[0].iter().min().expect("at least one placement");
    if best == UNREACHABLE {
        return Err(Error::Routing("interaction graph cannot be embedded".into()));
    }

    let candidates: Vec<usize> = (0..np).filter(|&p| togo[0][p] == best).collect();
    let mut routings: Vec<Routing> = candidates
        .into_par_iter()
        .map(|p0| {
            let mut p = p0;
            let mut gate = 0;
            let mut out = Circuit::new(g.num_physical()).with_bits(c.num_bits());
            for s in c.steps() {
                let is_pair = step_gate(s).is_some_and(|x| x.arity() == 2);
                if is_pair {
                    // Follow the optimal policy: run the gate when that keeps the
                    // remaining cost, otherwise take the first cost-reducing SWAP.
                    while !(executable(gate, p) && togo[gate + 1][p] == togo[gate][p]) {
                        let e = (0..space.edges.len())
                            .find(|&e| togo[gate][space.next[p][e]] + 1 == togo[gate][p])
                            .expect("optimal SWAP exists");
                        let (a, b) = space.edges[e];
                        out.swap(a, b);
                        p = space.next[p][e];
                    }
                    gate += 1;
                }
                let pl = &space.placements[p];
                out.push(remap_step(s, |q| pl[q] as usize));
            }
            let to_layout = |p: usize| Layout { mapping: space.placements[p].iter().map(|&q| q as usize).collect() };
            let cost = cost(&out, g).expect("routed gates lie on edges");
            Routing { layout: to_layout(p0), final_layout: to_layout(p), routed: out, cost }
        })
        .collect();
    routings.sort_by(|a, b| {
        (a.cost.cnot_count, a.cost.depth, &a.layout).cmp(&(b.cost.cnot_count, b.cost.depth, &b.layout))
    });
    Ok(routings.swap_remove(0))
}
