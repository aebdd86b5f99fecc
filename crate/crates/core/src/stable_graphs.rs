//! Stable graphs of type `(g, n)`: enumeration up to label-preserving
//! isomorphism, canonical forms and automorphism counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_stable, Error, Result};
use crate::exact::numbers::{int, zeta_negative_odd, Rational};
use crate::exact::volume::next_permutation;

type Code = (Vec<u32>, Vec<usize>, Vec<(usize, usize)>);

/// A stable graph with vertices `0..genera.len()`, leaves `1..=n`, and edges
/// stored as vertex pairs `(u, v)` with `u <= v` (`u == v` is a loop).
///
/// Graphs returned by [`enumerate`] are in canonical vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StableGraph {
    genera: Vec<u32>,
    leaves: Vec<usize>,
    edges: Vec<(usize, usize)>,
    aut: u64,
}

impl StableGraph {
    /// Builds a graph and computes its automorphism count; validates
    /// connectivity, stability and vertex indices.
    pub fn new(genera: Vec<u32>, leaves: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let nv = genera.len();
        if nv == 0 {
            return Err(Error::Precondition("a stable graph needs a vertex".into()));
        }
        if leaves
            .iter()
            .chain(edges.iter().flat_map(|(a, b)| [a, b]))
            .any(|&v| v >= nv)
        {
            return Err(Error::Precondition("vertex index out of range".into()));
        }
        let mut edges: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        let mut graph = Self {
            genera,
            leaves,
            edges,
            aut: 1,
        };
        if !graph.is_connected() {
            return Err(Error::Precondition("graph is not connected".into()));
        }
        if let Some(v) = (0..nv).find(|&v| 2 * graph.genera[v] as i64 - 2 + graph.valence(v) as i64 <= 0) {
            return Err(Error::Precondition(format!("vertex {v} is unstable")));
        }
        let (canon, aut) = graph.canonical();
        graph = canon;
        graph.aut = aut;
        Ok(graph)
    }

    pub fn genera(&self) -> &[u32] {
        &self.genera
    }

    /// `leaves()[i]` is the vertex carrying leaf `i + 1`.
    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.genera.len()
    }

    /// Order of the group of half-edge permutations fixing every leaf.
    pub fn automorphisms(&self) -> u64 {
        self.aut
    }

    /// `n(v)`: leaves plus half-edges at `v`.
    pub fn valence(&self, v: usize) -> usize {
        let leaves = self.leaves.iter().filter(|&&x| x == v).count();
        let halves: usize = self
            .edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum();
        leaves + halves
    }

    pub fn codim(&self) -> usize {
        self.edges.len()
    }

    /// First Betti number `|E| − |V| + 1`.
    pub fn h1(&self) -> usize {
        self.edges.len() + 1 - self.genera.len()
    }

    pub fn genus(&self) -> u32 {
        self.genera.iter().sum::<u32>() + self.h1() as u32
    }

    pub fn n(&self) -> usize {
        self.leaves.len()
    }

    fn is_connected(&self) -> bool {
        let nv = self.genera.len();
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_stable(&self) -> bool {
        (0..self.genera.len()).all(|v| 2 * self.genera[v] as i64 - 2 + self.valence(v) as i64 > 0)
    }

    fn code_under(&self, perm: &[usize]) -> Code {
        let nv = self.genera.len();
        let mut genera = vec![0; nv];
        for v in 0..nv {
            genera[perm[v]] = self.genera[v];
        }
        let leaves = self.leaves.iter().map(|&v| perm[v]).collect();
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        (genera, leaves, edges)
    }

    fn invariant(&self, v: usize) -> (u32, usize, Vec<usize>, usize) {
        let leaves: Vec<usize> = (0..self.leaves.len()).filter(|&i| self.leaves[i] == v).collect();
        let loops = self.edges.iter().filter(|&&(a, b)| a == v && b == v).count();
        (self.genera[v], self.valence(v), leaves, loops)
    }

    /// Minimal code over vertex relabelings that respect the vertex
    /// invariants, together with the automorphism count.
    fn canonical(&self) -> (Self, u64) {
        let nv = self.genera.len();
        let mut classes: BTreeMap<_, Vec<usize>> = BTreeMap::new();
        for v in 0..nv {
            classes.entry(self.invariant(v)).or_default().push(v);
        }
        // each class gets a consecutive block of new labels
        let blocks: Vec<Vec<usize>> = classes.into_values().collect();
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut next = 0;
        for b in &blocks {
            offsets.push(next);
            next += b.len();
        }
        let mut orders: Vec<Vec<usize>> = blocks.iter().map(|b| (0..b.len()).collect()).collect();
        let mut best: Option<Code> = None;
        let mut count = 0u64;
        loop {
            let mut perm = vec![0; nv];
            for (bi, b) in blocks.iter().enumerate() {
                for (k, &v) in b.iter().enumerate() {
                    perm[v] = offsets[bi] + orders[bi][k];
                }
            }
            let code = self.code_under(&perm);
            match &best {
                Some(c) if code > *c => {}
                Some(c) if code == *c => count += 1,
                _ => {
                    best = Some(code);
                    count = 1;
                }
            }
            // odometer over the per-block permutations
            let mut i = 0;
            while i < orders.len() && !next_permutation(&mut orders[i]) {
                orders[i].sort_unstable();
                i += 1;
            }
            if i == orders.len() {
                break;
            }
        }
        let (genera, leaves, edges) = best.expect("at least one relabeling");
        let mut mult: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for &e in &edges {
            *mult.entry(e).or_default() += 1;
        }
        let edge_aut: u64 = mult
            .iter()
            .map(|(&(a, b), &m)| {
                let f: u64 = (1..=m).product();
                if a == b {
                    f << m
                } else {
                    f
                }
            })
            .product();
        (
            Self {
                genera,
                leaves,
                edges,
                aut: 1,
            },
            count * edge_aut,
        )
    }

    fn code(&self) -> Code {
        (self.genera.clone(), self.leaves.clone(), self.edges.clone())
    }

    /// One-step degenerations: add a loop at a vertex of positive genus, or
    /// split a vertex in two joined by a new edge.
    fn degenerations(&self) -> Vec<StableGraph> {
        let mut out = Vec::new();
        let nv = self.genera.len();
        for v in 0..nv {
            if self.genera[v] > 0 {
                let mut genera = self.genera.clone();
                genera[v] -= 1;
                let mut edges = self.edges.clone();
                edges.push((v, v));
                out.push((genera, self.leaves.clone(), edges));
            }
            // half-edges at v: (leaf or edge index, which end)
            let mut halves: Vec<(bool, usize, usize)> = Vec::new();
            for (i, &x) in self.leaves.iter().enumerate() {
                if x == v {
                    halves.push((true, i, 0));
                }
            }
            for (e, &(a, b)) in self.edges.iter().enumerate() {
                if a == v {
                    halves.push((false, e, 0));
                }
                if b == v {
                    halves.push((false, e, 1));
                }
            }
            let k = halves.len();
            for g1 in 0..=self.genera[v] {
                let g2 = self.genera[v] - g1;
                for mask in 0u64..(1 << k) {
                    let n2 = mask.count_ones() as i64;
                    let n1 = k as i64 - n2;
                    if 2 * g1 as i64 - 1 + n1 <= 0 || 2 * g2 as i64 - 1 + n2 <= 0 {
                        continue;
                    }
                    let w = nv;
                    let mut genera = self.genera.clone();
                    genera[v] = g1;
                    genera.push(g2);
                    let mut leaves = self.leaves.clone();
                    let mut edges = self.edges.clone();
                    for (j, &(is_leaf, idx, end)) in halves.iter().enumerate() {
                        if mask >> j & 1 == 0 {
                            continue;
                        }
                        if is_leaf {
                            leaves[idx] = w;
                        } else if end == 0 {
                            edges[idx].0 = w;
                        } else {
                            edges[idx].1 = w;
                        }
                    }
                    edges.push((v, w));
                    out.push((genera, leaves, edges));
                }
            }
        }
        out.into_iter()
            .map(|(g, l, e)| StableGraph::new(g, l, e).expect("degeneration of a stable graph is stable"))
            .collect()
    }

    /// Relabels vertices by `perm` without canonicalizing.
    fn relabeled(&self, perm: &[usize]) -> Self {
        let (genera, leaves, edges) = self.code_under(perm);
        Self {
            genera,
            leaves,
            edges,
            aut: self.aut,
        }
    }
}

impl fmt::Display for StableGraph {
    /// `v:0,0 e:(0,1) l:1@0,2@0,3@1,4@1 |Aut|=1`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.genera.iter().map(|g| g.to_string()).collect();
        let e: Vec<String> = self.edges.iter().map(|(a, b)| format!("({a},{b})")).collect();
        let l: Vec<String> = self
            .leaves
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{}@{v}", i + 1))
            .collect();
        write!(
            f,
            "v:{} e:{} l:{} |Aut|={}",
            v.join(","),
            e.join(""),
            l.join(","),
            self.aut
        )
    }
}

/// All stable graphs of type `(g, n)`, one per isomorphism class, ordered by
/// `(|E|, canonical code)`.
pub fn enumerate(g: u32, n: usize) -> Result<Vec<StableGraph>> {
    enumerate_inner(g, n, None)
}

/// Same as [`enumerate`], but scrambles vertex labels and traversal order
/// with the given seed before each canonicalization.
pub fn enumerate_shuffled(g: u32, n: usize, seed: u64) -> Result<Vec<StableGraph>> {
    enumerate_inner(g, n, Some(ChaCha8Rng::seed_from_u64(seed)))
}

fn enumerate_inner(g: u32, n: usize, mut rng: Option<ChaCha8Rng>) -> Result<Vec<StableGraph>> {
    check_stable(g, n)?;
    let root = StableGraph::new(vec![g], vec![0; n], Vec::new())?;
    let mut seen: BTreeSet<(usize, Code)> = BTreeSet::new();
    let mut all = vec![root.clone()];
    seen.insert((0, root.code()));
    let mut layer = vec![root];
    while !layer.is_empty() {
        let mut next = Vec::new();
        if let Some(r) = rng.as_mut() {
            layer.shuffle(r);
        }
        for graph in &layer {
            let start = match rng.as_mut() {
                Some(r) => {
                    let mut perm: Vec<usize> = (0..graph.num_vertices()).collect();
                    perm.shuffle(r);
                    graph.relabeled(&perm)
                }
                None => graph.clone(),
            };
            for d in start.degenerations() {
                if seen.insert((d.codim(), d.code())) {
                    next.push(d.clone());
                    all.push(d);
                }
            }
        }
        layer = next;
    }
    all.sort_by_key(|gr| (gr.codim(), gr.code()));
    Ok(all)
}

/// Orbifold Euler characteristic `χ(M_{g,n}) = (1−2g)_{n−1} ζ(1−2g)` with the
/// falling factorial `(x)_m = x(x−1)⋯(x−m+1)`, for `g >= 1`.
pub fn euler_characteristic(g: u32, n: usize) -> Result<Rational> {
    if g == 0 {
        return Err(Error::Domain("the Euler characteristic formula needs g >= 1".into()));
    }
    check_stable(g, n)?;
    let x = 1 - 2 * g as i64;
    let falling: BigInt = (0..n as i64 - 1).map(|j| BigInt::from(x - j)).product();
    Ok(Rational::from_integer(falling) * zeta_negative_odd(g as i64)? * int(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::numbers::rat;

    #[test]
    fn small_counts() {
        let g04 = enumerate(0, 4).unwrap();
        assert_eq!(g04.len(), 4);
        assert_eq!(g04[0].codim(), 0);
        assert!(g04[1..].iter().all(|x| x.codim() == 1 && x.automorphisms() == 1));
        let g11 = enumerate(1, 1).unwrap();
        assert_eq!(g11.len(), 2);
        assert_eq!(g11[1].genus(), 1);
        assert_eq!(g11[1].codim(), 1);
        assert_eq!(g11[1].automorphisms(), 2);
        assert_eq!(enumerate(0, 5).unwrap().len(), 26);
        assert_eq!(enumerate(1, 2).unwrap().len(), 5);
        assert_eq!(enumerate(2, 0).unwrap().len(), 7);
        assert!(enumerate(0, 2).is_err());
    }

    #[test]
    fn automorphisms_of_genus_two() {
        let graphs = enumerate(2, 0).unwrap();
        let auts: Vec<u64> = graphs.iter().map(|x| x.automorphisms()).collect();
        // g2 | g1-loop | g1-g1 | g0 two loops | g1-g0 loop | theta | loop-edge-loop
        let mut sorted = auts.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![1, 2, 2, 2, 8, 8, 12]);
    }

    #[test]
    fn invariants_and_shuffles() {
        for (g, n) in [(0, 5), (0, 6), (1, 3), (2, 1), (2, 2), (3, 0)] {
            let graphs = enumerate(g, n).unwrap();
            for x in &graphs {
                assert!(x.is_stable());
                assert_eq!(x.genus(), g);
                assert_eq!(x.n(), n);
            }
            let codes: BTreeSet<Code> = graphs.iter().map(|x| x.code()).collect();
            assert_eq!(codes.len(), graphs.len());
            for seed in 0..3 {
                assert_eq!(enumerate_shuffled(g, n, seed).unwrap(), graphs);
            }
        }
    }

    #[test]
    fn text_form() {
        let g11 = enumerate(1, 1).unwrap();
        assert_eq!(g11[0].to_string(), "v:1 e: l:1@0 |Aut|=1");
        assert_eq!(g11[1].to_string(), "v:0 e:(0,0) l:1@0 |Aut|=2");
    }

    #[test]
    fn euler() {
        assert_eq!(euler_characteristic(1, 1).unwrap(), rat(-1, 12));
        assert_eq!(euler_characteristic(1, 2).unwrap(), rat(1, 12));
        assert_eq!(euler_characteristic(2, 1).unwrap(), rat(1, 120));
        assert!(euler_characteristic(0, 4).is_err());
    }
}
