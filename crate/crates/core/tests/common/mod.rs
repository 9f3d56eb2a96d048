//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use ep_core::graph::{Graph, RootedGraph, Separation};
use ep_core::minor_model::ModelFunction;
use ep_core::{VSet, Vertex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, VecDeque};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vs(v: &[usize]) -> VSet {
    v.iter().collect()
}

/// `G(n, p)`.
pub fn random_graph(r: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Random recursive tree on `0..n`.
pub fn random_tree(r: &mut ChaCha8Rng, n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|v| (r.gen_range(0..v), v)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// `m` random non-empty subsets of `0..n` of size at most `max`.
pub fn random_family(r: &mut ChaCha8Rng, n: usize, m: usize, max: usize) -> Vec<VSet> {
    let all: Vec<usize> = (0..n).collect();
    (0..m)
        .map(|_| {
            let s = r.gen_range(1..=max.min(n));
            all.choose_multiple(r, s).copied().collect()
        })
        .collect()
}

/// Random connected node set of `tree` with `size` nodes at most.
pub fn random_subtree(r: &mut ChaCha8Rng, tree: &Graph, size: usize) -> VSet {
    let start = r.gen_range(0..tree.vertex_count());
    let mut s = VSet::singleton(start);
    for _ in 1..size {
        let frontier: Vec<usize> = tree.boundary(&s).iter().collect();
        match frontier.choose(r) {
            Some(&v) => {
                s.insert(v);
            }
            None => break,
        }
    }
    s
}

/// Patterns the brute-force model oracle understands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    K1,
    K2,
    TwoK1,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::K1 => "K1",
            Kind::K2 => "K2",
            Kind::TwoK1 => "2K1",
        }
    }
}

/// Bitmask form of a rooted graph on `0..n` with `n <= 20`.
pub struct Small {
    pub n: usize,
    pub adj: Vec<u32>,
    pub z: Vec<u32>,
}

impl Small {
    pub fn new(rg: &RootedGraph) -> Self {
        let n = rg.graph.id_bound();
        assert!(
            n <= 20 && rg.graph.vertex_count() == n,
            "oracle needs vertices 0..n with n <= 20"
        );
        let adj = (0..n)
            .map(|v| rg.graph.neighbors(v).iter().fold(0u32, |a, u| a | 1 << u))
            .collect();
        let z =
            rg.z.iter()
                .map(|s| s.iter().fold(0u32, |a, u| a | 1 << u))
                .collect();
        Small { n, adj, z }
    }

    pub fn full(&self) -> u32 {
        ((1u64 << self.n) - 1) as u32
    }

    pub fn components(&self, mask: u32) -> Vec<u32> {
        let mut left = mask;
        let mut out = Vec::new();
        while left != 0 {
            let mut c = left & left.wrapping_neg();
            loop {
                let grow = c | self.neighbourhood(c) & mask;
                if grow == c {
                    break;
                }
                c = grow;
            }
            out.push(c);
            left &= !c;
        }
        out
    }

    fn neighbourhood(&self, c: u32) -> u32 {
        (0..self.n)
            .filter(|&v| c >> v & 1 == 1)
            .fold(0, |a, v| a | self.adj[v])
    }

    /// Z positions met by `mask`, as a bitmask (at most 64 members).
    pub fn hits(&self, mask: u32) -> u64 {
        self.z
            .iter()
            .enumerate()
            .filter(|(_, &s)| s & mask != 0)
            .fold(0, |a, (i, _)| a | 1 << i)
    }

    /// Whether `G[mask]` contains an (optionally pure) `(H, Z, ℓ)`-model.
    pub fn has_model(&self, kind: Kind, pure: bool, l: usize, mask: u32) -> bool {
        let comps = self.components(mask);
        let hits: Vec<u64> = comps.iter().map(|&c| self.hits(c)).collect();
        let big = |i: usize| comps[i].count_ones() >= 2;
        let enough = |h: u64| h.count_ones() as usize >= l;
        match kind {
            Kind::K1 => hits.iter().any(|&h| enough(h)),
            Kind::K2 => (0..comps.len()).any(|i| big(i) && enough(hits[i])),
            Kind::TwoK1 => {
                if pure {
                    if hits.iter().any(|&h| enough(h)) {
                        return true;
                    }
                } else if (0..comps.len()).any(|i| big(i) && enough(hits[i])) {
                    return true;
                }
                for i in 0..comps.len() {
                    for j in i + 1..comps.len() {
                        if pure && (hits[i] == 0 || hits[j] == 0) {
                            continue;
                        }
                        if enough(hits[i] | hits[j]) {
                            return true;
                        }
                    }
                }
                false
            }
        }
    }

    /// Inclusion-minimal vertex sets hosting a model.
    pub fn minimal_models(&self, kind: Kind, pure: bool, l: usize) -> Vec<u32> {
        let full = self.full();
        (1..=full)
            .filter(|&m| {
                self.has_model(kind, pure, l, m)
                    && (0..self.n)
                        .all(|v| m >> v & 1 == 0 || !self.has_model(kind, pure, l, m & !(1 << v)))
            })
            .collect()
    }

    /// Maximum number of vertex-disjoint models.
    pub fn nu(&self, kind: Kind, pure: bool, l: usize) -> usize {
        fn rec(avail: u32, mins: &[u32], memo: &mut HashMap<u32, usize>) -> usize {
            if let Some(&v) = memo.get(&avail) {
                return v;
            }
            let inside: Vec<u32> = mins.iter().copied().filter(|&m| m & !avail == 0).collect();
            let best = match inside.first() {
                None => 0,
                Some(&first) => {
                    let v = first.trailing_zeros();
                    let mut best = rec(avail & !(1 << v), &inside, memo);
                    for &m in inside.iter().filter(|&&m| m >> v & 1 == 1) {
                        best = best.max(1 + rec(avail & !m, &inside, memo));
                    }
                    best
                }
            };
            memo.insert(avail, best);
            best
        }
        let mins = self.minimal_models(kind, pure, l);
        rec(self.full(), &mins, &mut HashMap::new())
    }

    /// Minimum size of a vertex set meeting every model.
    pub fn tau(&self, kind: Kind, pure: bool, l: usize) -> usize {
        self.tau_in(kind, pure, l, self.full())
    }

    /// Minimum size of a vertex set meeting every model inside `G[allowed]`.
    pub fn tau_in(&self, kind: Kind, pure: bool, l: usize, allowed: u32) -> usize {
        let full = self.full();
        for s in 0..=self.n {
            let found = (0..=full)
                .filter(|m: &u32| m & !allowed == 0 && m.count_ones() as usize == s)
                .any(|m| !self.has_model(kind, pure, l, allowed & !m));
            if found {
                return s;
            }
        }
        unreachable!("deleting every vertex leaves no model")
    }
}

/// Maximum number of vertex-disjoint paths from `x` to `y` inside `allowed`,
/// by augmenting paths on the vertex-split network.
pub fn max_disjoint_paths(g: &Graph, x: &VSet, y: &VSet, allowed: &VSet) -> usize {
    let n = g.id_bound();
    // Node 2v is v_in, 2v+1 is v_out, 2n is the source, 2n+1 the sink.
    let (s, t) = (2 * n, 2 * n + 1);
    let mut cap: HashMap<(usize, usize), i32> = HashMap::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 2 * n + 2];
    let mut add = |cap: &mut HashMap<(usize, usize), i32>, a: usize, b: usize| {
        *cap.entry((a, b)).or_insert(0) += 1;
        cap.entry((b, a)).or_insert(0);
        adj[a].push(b);
        adj[b].push(a);
    };
    for v in allowed.iter() {
        add(&mut cap, 2 * v, 2 * v + 1);
        if x.contains(v) {
            add(&mut cap, s, 2 * v);
        }
        if y.contains(v) {
            add(&mut cap, 2 * v + 1, t);
        }
        for u in g.neighbors(v).iter().filter(|&u| allowed.contains(u)) {
            add(&mut cap, 2 * v + 1, 2 * u);
        }
    }
    let mut flow = 0;
    loop {
        let mut prev = vec![usize::MAX; 2 * n + 2];
        prev[s] = s;
        let mut q = VecDeque::from([s]);
        while let Some(a) = q.pop_front() {
            for &b in &adj[a] {
                if prev[b] == usize::MAX && cap[&(a, b)] > 0 {
                    prev[b] = a;
                    q.push_back(b);
                }
            }
        }
        if prev[t] == usize::MAX {
            return flow;
        }
        let mut b = t;
        while b != s {
            let a = prev[b];
            *cap.get_mut(&(a, b)).unwrap() -= 1;
            *cap.get_mut(&(b, a)).unwrap() += 1;
            b = a;
        }
        flow += 1;
    }
}

/// Connectivity of `s` inside `G[s]`, by BFS.
pub fn connected_in(g: &Graph, s: &VSet) -> bool {
    let Some(start) = s.first() else { return false };
    let mut seen = VSet::singleton(start);
    let mut q = VecDeque::from([start]);
    while let Some(v) = q.pop_front() {
        for u in g.neighbors(v).iter() {
            if s.contains(u) && seen.insert(u) {
                q.push_back(u);
            }
        }
    }
    seen.len() == s.len()
}

/// Checks branch sets against `pattern`: non-empty, connected, pairwise
/// disjoint, inside `allowed`, with a host edge for every pattern edge.
pub fn check_model(
    g: &Graph,
    pattern: &Graph,
    m: &ModelFunction,
    allowed: &VSet,
) -> Result<(), String> {
    for v in pattern.vertices().iter() {
        let b = m
            .branch_sets
            .get(&v)
            .ok_or_else(|| format!("no branch set for {v}"))?;
        if b.is_empty() || !connected_in(g, b) {
            return Err(format!("branch set of {v} is empty or disconnected"));
        }
        if !b.is_subset(allowed) {
            return Err(format!("branch set of {v} leaves the allowed set"));
        }
    }
    let sets: Vec<&VSet> = m.branch_sets.values().collect();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if sets[i].intersects(sets[j]) {
                return Err("branch sets overlap".into());
            }
        }
    }
    for (u, v) in pattern.edges() {
        let (bu, bv) = (&m.branch_sets[&u], &m.branch_sets[&v]);
        if !bu.iter().any(|a| g.neighbors(a).intersects(bv)) {
            return Err(format!("no host edge for pattern edge ({u},{v})"));
        }
    }
    Ok(())
}

/// Number of Z positions met by `s`.
pub fn hits(z: &[VSet], s: &VSet) -> usize {
    z.iter().filter(|m| m.intersects(s)).count()
}

/// Separation axioms checked edge by edge; returns the order.
pub fn check_separation(g: &Graph, sep: &Separation) -> Result<usize, String> {
    let cover = sep.a_vertices.union(&sep.b_vertices);
    if cover != *g.vertices() {
        return Err("sides do not cover V(G) exactly".into());
    }
    for (u, v) in g.edges() {
        let ina = sep.a_edges.contains(&(u, v));
        let inb = sep.b_edges.contains(&(u, v));
        if ina == inb {
            return Err(format!(
                "edge ({u},{v}) is in {} sides",
                if ina { "both" } else { "neither" }
            ));
        }
        let side = if ina {
            &sep.a_vertices
        } else {
            &sep.b_vertices
        };
        if !side.contains(u) || !side.contains(v) {
            return Err(format!("edge ({u},{v}) leaves its side"));
        }
    }
    if sep.a_edges.len() + sep.b_edges.len() != g.edge_count() {
        return Err("separation has foreign edges".into());
    }
    Ok(sep.a_vertices.intersection(&sep.b_vertices).len())
}

/// Members of `z` with a vertex outside `a`.
pub fn outside(z: &[VSet], a: &VSet) -> usize {
    z.iter().filter(|m| !m.is_subset(a)).count()
}

pub fn path_ok(g: &Graph, p: &[Vertex]) -> bool {
    !p.is_empty() && p.windows(2).all(|w| g.has_edge(w[0], w[1]))
}
