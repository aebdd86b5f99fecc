//! Trivalent ribbon graphs with labelled faces and Kontsevich's edge sum
//! `2^{2g−2+n} Σ_G 1/|Aut G| Π_{e} 1/(λ_{i(e)} + λ_{j(e)})`.
//!
//! Half-edges (darts) of a graph with `E` edges are `0..2E`. Vertices are
//! the 3-cycles `(3v, 3v+1, 3v+2)` of the rotation `σ`, `α` pairs darts into
//! edges, and faces are the cycles of `φ = σ ∘ α` (first `α`, then `σ`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;

use crate::error::{check_stable, Error, Result};
use crate::exact::numbers::{int, Rational};
use crate::exact::volume::next_permutation;
use crate::exact::Ring;

/// Largest edge count enumerated unless the caller raises it.
pub const DEFAULT_MAX_EDGES: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibbonGraph {
    sigma: Vec<usize>,
    alpha: Vec<usize>,
    /// Face label (1-based) of the face containing each dart.
    face: Vec<usize>,
    automorphisms: usize,
    genus: u32,
    n: usize,
}

/// Canonical form: `α` and the face labels after relabelling darts in
/// breadth-first order from the best root.
pub type RibbonCode = (Vec<usize>, Vec<usize>);

impl RibbonGraph {
    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    pub fn face_labels(&self) -> &[usize] {
        &self.face
    }

    pub fn automorphisms(&self) -> usize {
        self.automorphisms
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.alpha.len() / 2
    }

    pub fn num_vertices(&self) -> usize {
        self.alpha.len() / 3
    }

    /// Unordered face pairs `(i, j)`, `i ≤ j`, one per edge, sorted.
    pub fn edge_faces(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = (0..self.alpha.len())
            .filter(|&d| d < self.alpha[d])
            .map(|d| {
                let (a, b) = (self.face[d], self.face[self.alpha[d]]);
                (a.min(b), a.max(b))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// The same graph with dart `d` renamed `perm[d]`.
    pub fn relabelled(&self, perm: &[usize]) -> Self {
        let m = self.alpha.len();
        let mut sigma = vec![0; m];
        let mut alpha = vec![0; m];
        let mut face = vec![0; m];
        for d in 0..m {
            sigma[perm[d]] = perm[self.sigma[d]];
            alpha[perm[d]] = perm[self.alpha[d]];
            face[perm[d]] = self.face[d];
        }
        Self {
            sigma,
            alpha,
            face,
            ..self.clone()
        }
    }

    pub fn canonical_code(&self) -> RibbonCode {
        (0..self.alpha.len())
            .map(|r| {
                let perm = bfs_labels(&self.sigma, &self.alpha, r);
                code_under(&self.alpha, &self.face, &perm)
            })
            .min()
            .expect("nonempty graph")
    }
}

impl fmt::Display for RibbonGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma=")?;
        write_cycles(f, &self.sigma)?;
        write!(f, " alpha=")?;
        write_cycles(f, &self.alpha)?;
        write!(f, " faces=")?;
        let phi = face_perm(&self.sigma, &self.alpha);
        let mut seen = vec![false; phi.len()];
        let mut cycles: Vec<(usize, Vec<usize>)> = Vec::new();
        for s in 0..phi.len() {
            if !seen[s] {
                cycles.push((self.face[s], cycle_from(&phi, s, &mut seen)));
            }
        }
        cycles.sort();
        for (label, c) in cycles {
            write!(f, "{label}:")?;
            write_cycle(f, &c)?;
        }
        write!(f, " |Aut|={}", self.automorphisms)
    }
}

fn write_cycles(f: &mut fmt::Formatter<'_>, p: &[usize]) -> fmt::Result {
    let mut seen = vec![false; p.len()];
    for s in 0..p.len() {
        if !seen[s] {
            write_cycle(f, &cycle_from(p, s, &mut seen))?;
        }
    }
    Ok(())
}

fn write_cycle(f: &mut fmt::Formatter<'_>, c: &[usize]) -> fmt::Result {
    let items: Vec<String> = c.iter().map(usize::to_string).collect();
    write!(f, "({})", items.join(" "))
}

fn cycle_from(p: &[usize], s: usize, seen: &mut [bool]) -> Vec<usize> {
    let mut c = Vec::new();
    let mut d = s;
    while !seen[d] {
        seen[d] = true;
        c.push(d);
        d = p[d];
    }
    c
}

fn face_perm(sigma: &[usize], alpha: &[usize]) -> Vec<usize> {
    alpha.iter().map(|&a| sigma[a]).collect()
}

/// Face index (0-based, by first dart) of every dart, and the face count.
fn faces_of(sigma: &[usize], alpha: &[usize]) -> (Vec<usize>, usize) {
    let phi = face_perm(sigma, alpha);
    let mut face = vec![usize::MAX; phi.len()];
    let mut count = 0;
    for s in 0..phi.len() {
        if face[s] == usize::MAX {
            let mut d = s;
            while face[d] == usize::MAX {
                face[d] = count;
                d = phi[d];
            }
            count += 1;
        }
    }
    (face, count)
}

/// Breadth-first relabelling from `root`: the root vertex gets darts
/// `0, 1, 2` starting at the root, and each new vertex is entered through the
/// `α`-partner of the smallest dart whose partner is still unlabelled.
fn bfs_labels(sigma: &[usize], alpha: &[usize], root: usize) -> Vec<usize> {
    let m = alpha.len();
    let mut label = vec![usize::MAX; m];
    let mut order = Vec::with_capacity(m);
    let enter = |d: usize, label: &mut Vec<usize>, order: &mut Vec<usize>| {
        let mut x = d;
        for _ in 0..3 {
            label[x] = order.len();
            order.push(x);
            x = sigma[x];
        }
    };
    enter(root, &mut label, &mut order);
    let mut i = 0;
    while i < order.len() {
        let partner = alpha[order[i]];
        if label[partner] == usize::MAX {
            enter(partner, &mut label, &mut order);
        }
        i += 1;
    }
    label
}

fn code_under(alpha: &[usize], face: &[usize], perm: &[usize]) -> RibbonCode {
    let m = alpha.len();
    let mut a = vec![0; m];
    let mut f = vec![0; m];
    for d in 0..m {
        a[perm[d]] = perm[alpha[d]];
        f[perm[d]] = face[d];
    }
    (a, f)
}

/// All connected rooted trivalent maps on `2E` darts in breadth-first normal
/// form, each exactly once.
fn rooted_maps(edges: usize, mut visit: impl FnMut(&[usize])) {
    fn extend(alpha: &mut Vec<usize>, reached: usize, visit: &mut dyn FnMut(&[usize])) {
        let v = alpha.len() / 3;
        let Some(d) = (0..3 * reached).find(|&d| alpha[d] == usize::MAX) else {
            if reached == v {
                visit(alpha);
            }
            return;
        };
        for e in d + 1..3 * reached {
            if alpha[e] == usize::MAX {
                alpha[d] = e;
                alpha[e] = d;
                extend(alpha, reached, visit);
                alpha[d] = usize::MAX;
                alpha[e] = usize::MAX;
            }
        }
        if reached < v {
            let e = 3 * reached;
            alpha[d] = e;
            alpha[e] = d;
            extend(alpha, reached + 1, visit);
            alpha[d] = usize::MAX;
            alpha[e] = usize::MAX;
        }
    }
    let mut alpha = vec![usize::MAX; 2 * edges];
    extend(&mut alpha, 1, &mut visit);
}

/// One graph per isomorphism class of face-labelled trivalent ribbon graphs
/// of type `(g, n)`.
pub fn enumerate_ribbon(g: u32, n: usize) -> Result<Vec<RibbonGraph>> {
    enumerate_ribbon_with_budget(g, n, DEFAULT_MAX_EDGES)
}

pub fn enumerate_ribbon_with_budget(g: u32, n: usize, max_edges: usize) -> Result<Vec<RibbonGraph>> {
    check_stable(g, n)?;
    let edges = 6 * g as usize + 3 * n - 6;
    if edges > max_edges {
        return Err(Error::Budget(format!(
            "ribbon graphs of type ({g},{n}) have {edges} edges, limit is {max_edges}"
        )));
    }
    let m = 2 * edges;
    let sigma: Vec<usize> = (0..m).map(|d| d - d % 3 + (d + 1) % 3).collect();
    let mut out = Vec::new();
    rooted_maps(edges, |alpha| {
        let (face, count) = faces_of(&sigma, alpha);
        if count != n {
            return;
        }
        // keep the map only if its own labelling is the minimal one; the
        // roots reaching the minimum are its automorphisms
        let own = code_under(alpha, &vec![0; m], &(0..m).collect::<Vec<_>>());
        let mut autos = Vec::new();
        for r in 0..m {
            let perm = bfs_labels(&sigma, alpha, r);
            let code = code_under(alpha, &vec![0; m], &perm);
            match code.cmp(&own) {
                std::cmp::Ordering::Less => return,
                std::cmp::Ordering::Equal => autos.push(perm),
                std::cmp::Ordering::Greater => {}
            }
        }
        // induced action on faces
        let face_actions: Vec<Vec<usize>> = autos
            .iter()
            .map(|perm| {
                let mut act = vec![0; n];
                for d in 0..m {
                    act[face[d]] = face[perm[d]];
                }
                act
            })
            .collect();
        let mut labels: Vec<usize> = (1..=n).collect();
        loop {
            let mut minimal = true;
            let mut stab = 0;
            for act in &face_actions {
                let moved: Vec<usize> = (0..n).map(|f| labels[act[f]]).collect();
                match moved.cmp(&labels) {
                    std::cmp::Ordering::Less => {
                        minimal = false;
                        break;
                    }
                    std::cmp::Ordering::Equal => stab += 1,
                    std::cmp::Ordering::Greater => {}
                }
            }
            if minimal {
                out.push(RibbonGraph {
                    sigma: sigma.clone(),
                    alpha: alpha.to_vec(),
                    face: face.iter().map(|&f| labels[f]).collect(),
                    automorphisms: stab,
                    genus: g,
                    n,
                });
            }
            if !next_permutation(&mut labels) {
                break;
            }
        }
    });
    Ok(out)
}

/// `V̂_{g,n}` as weights `2^{2g−2+n}/|Aut G|` on edge-face multisets; the
/// multiset `{(i,j)}` stands for `Π 1/(λ_i + λ_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KontsevichSum {
    pub g: u32,
    pub n: usize,
    pub terms: BTreeMap<Vec<(usize, usize)>, Rational>,
}

pub fn kontsevich_sum(g: u32, n: usize) -> Result<KontsevichSum> {
    let graphs = enumerate_ribbon(g, n)?;
    Ok(sum_over(g, n, &graphs))
}

pub fn sum_over(g: u32, n: usize, graphs: &[RibbonGraph]) -> KontsevichSum {
    let scale = Rational::from_integer(BigInt::from(2).pow(2 * g + n as u32 - 2));
    let mut terms: BTreeMap<Vec<(usize, usize)>, Rational> = BTreeMap::new();
    for graph in graphs {
        let w = &scale / Rational::from_integer(graph.automorphisms().into());
        *terms.entry(graph.edge_faces()).or_insert_with(|| int(0)) += w;
    }
    terms.retain(|_, v| !Ring::is_zero(v));
    KontsevichSum { g, n, terms }
}

type MPoly = BTreeMap<Vec<u32>, Rational>;

fn mpoly_mul(a: &MPoly, b: &MPoly) -> MPoly {
    let mut out = MPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(|| int(0)) += ca * cb;
        }
    }
    out.retain(|_, v| !Ring::is_zero(v));
    out
}

fn mpoly_add_assign(a: &mut MPoly, b: &MPoly) {
    for (e, c) in b {
        *a.entry(e.clone()).or_insert_with(|| int(0)) += c;
    }
    a.retain(|_, v| !Ring::is_zero(v));
}

fn mpoly_monomial(e: Vec<u32>, c: Rational) -> MPoly {
    MPoly::from([(e, c)])
}

/// `(λ_i + λ_j)^k` in `n` variables (0-based indices).
fn pair_power(n: usize, i: usize, j: usize, k: u32) -> MPoly {
    let mut lin = MPoly::new();
    for x in [i, j] {
        let mut e = vec![0; n];
        e[x] += 1;
        *lin.entry(e).or_insert_with(|| int(0)) += int(1);
    }
    (0..k).fold(mpoly_monomial(vec![0; n], int(1)), |acc, _| mpoly_mul(&acc, &lin))
}

impl KontsevichSum {
    /// Exact identity with `Σ_d c_d / Π λ_i^{2d_i+1}` (as returned by
    /// `KappaEngine::laplace_volume`), checked by clearing all denominators
    /// and comparing polynomials.
    pub fn equals_laplace(&self, laplace: &BTreeMap<Vec<u32>, Rational>) -> bool {
        let n = self.n;
        let top = 2 * (3 * self.g + n as u32 - 3) + 1;
        let mut max_mult: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for key in self.terms.keys() {
            let mut counts: BTreeMap<(usize, usize), u32> = BTreeMap::new();
            for &p in key {
                *counts.entry(p).or_default() += 1;
            }
            for (p, c) in counts {
                let slot = max_mult.entry(p).or_default();
                *slot = (*slot).max(c);
            }
        }
        let lambda_top = mpoly_monomial(vec![top; n], int(1));

        let mut lhs = MPoly::new();
        for (key, w) in &self.terms {
            let mut term = mpoly_monomial(vec![0; n], w.clone());
            for (&(i, j), &mx) in &max_mult {
                let used = key.iter().filter(|&&p| p == (i, j)).count() as u32;
                term = mpoly_mul(&term, &pair_power(n, i - 1, j - 1, mx - used));
            }
            mpoly_add_assign(&mut lhs, &term);
        }
        let lhs = mpoly_mul(&lhs, &lambda_top);

        let mut rhs = MPoly::new();
        for (d, c) in laplace {
            let e: Vec<u32> = d.iter().map(|&x| top - 2 * x - 1).collect();
            mpoly_add_assign(&mut rhs, &mpoly_monomial(e, c.clone()));
        }
        let rhs = max_mult.iter().fold(rhs, |acc, (&(i, j), &mx)| {
            mpoly_mul(&acc, &pair_power(n, i - 1, j - 1, mx))
        });
        lhs == rhs
    }
}

/// Canonical codes of a graph list; duplicates indicate failed isomorph
/// rejection.
pub fn canonical_set(graphs: &[RibbonGraph]) -> BTreeSet<RibbonCode> {
    graphs.iter().map(RibbonGraph::canonical_code).collect()
}
