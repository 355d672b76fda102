use std::collections::{BTreeMap, VecDeque};

use super::step::combinatorial_step;
use super::StepType;
use crate::iet_core::reducibility_witness;
use crate::{Error, Result};

/// A combinatorial pair of 0-based position vectors.
pub type Pair = (Vec<usize>, Vec<usize>);

/// Rauzy class with its labelled moves.
#[derive(Clone, Debug)]
pub struct RauzyClass {
    pub start: Pair,
    /// Pairs in discovery order.
    pub pairs: Vec<Pair>,
    /// `(from, to, step type)` as indices into `pairs`.
    pub edges: Vec<(usize, usize, StepType)>,
}

impl RauzyClass {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, p: &Pair) -> bool {
        self.pairs.contains(p)
    }

    pub fn to_dot(&self) -> String {
        let line = |v: &[usize]| {
            v.iter()
                .map(|x| (x + 1).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut s = String::from("digraph rauzy_class {\n");
        for (i, (p0, p1)) in self.pairs.iter().enumerate() {
            s.push_str(&format!(
                "  n{i} [label=\"{} / {}\"];\n",
                line(p0),
                line(p1)
            ));
        }
        for (a, b, t) in &self.edges {
            s.push_str(&format!("  n{a} -> n{b} [label=\"{}\"];\n", t.code()));
        }
        s.push_str("}\n");
        s
    }
}

/// Closure of a pair under both induction moves. Successors come from an
/// actual induction step on lengths forcing the move.
pub fn rauzy_class(pi0: &[usize], pi1: &[usize]) -> Result<RauzyClass> {
    if let Some(k) = reducibility_witness(pi0, pi1) {
        return Err(Error::ReduciblePair(k));
    }
    let start: Pair = (pi0.to_vec(), pi1.to_vec());
    let mut index: BTreeMap<Pair, usize> = BTreeMap::new();
    let mut pairs = vec![start.clone()];
    index.insert(start.clone(), 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (p0, p1) = pairs[i].clone();
        for st in [StepType::Top, StepType::Bottom] {
            let (q0, q1, _) = combinatorial_step(&p0, &p1, st)?;
            let key = (q0, q1);
            let j = match index.get(&key) {
                Some(&j) => j,
                None => {
                    let j = pairs.len();
                    pairs.push(key.clone());
                    index.insert(key, j);
                    queue.push_back(j);
                    j
                }
            };
            edges.push((i, j, st));
        }
    }
    Ok(RauzyClass {
        start,
        pairs,
        edges,
    })
}
