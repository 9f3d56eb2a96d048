//! Simple undirected graphs with stable vertex ids, grids, separations and
//! the multiset operations on prescribed vertex families.

use crate::error::{EpError, Result};
use crate::vset::{VSet, Vertex};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

/// Simple undirected graph on the id space `0..n`. Deleting vertices keeps
/// the remaining ids unchanged, so subgraphs share coordinates with the host.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    present: VSet,
    adj: Vec<VSet>,
}

pub type Edge = (Vertex, Vertex);

#[inline]
pub fn norm_edge(u: Vertex, v: Vertex) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    /// Edgeless graph on `0..n`.
    pub fn empty(n: usize) -> Self {
        Graph {
            present: VSet::full(n),
            adj: vec![VSet::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[Edge]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            if u == v {
                return Err(EpError::InvalidInput(format!("self-loop at {u}")));
            }
            if u >= n || v >= n {
                return Err(EpError::InvalidInput(format!(
                    "edge ({u},{v}) out of range for n={n}"
                )));
            }
            if g.adj[u].contains(v) {
                return Err(EpError::InvalidInput(format!("parallel edge ({u},{v})")));
            }
            g.adj[u].insert(v);
            g.adj[v].insert(u);
        }
        Ok(g)
    }

    pub(crate) fn add_edge_unchecked(&mut self, u: Vertex, v: Vertex) {
        debug_assert!(u != v);
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    /// Size of the id space (not the number of present vertices).
    pub fn id_bound(&self) -> usize {
        self.adj.len()
    }

    pub fn vertices(&self) -> &VSet {
        &self.present
    }

    pub fn vertex_count(&self) -> usize {
        self.present.len()
    }

    pub fn edge_count(&self) -> usize {
        self.present
            .iter()
            .map(|v| self.adj[v].len())
            .sum::<usize>()
            / 2
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.present.contains(v)
    }

    pub fn neighbors(&self, v: Vertex) -> &VSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.adj.len() && self.adj[u].contains(v)
    }

    /// Edges as sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in self.present.iter() {
            for v in self.adj[u].iter() {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn remove_vertices(&self, s: &VSet) -> Graph {
        let mut g = self.clone();
        for v in s.iter() {
            if v >= g.adj.len() || !g.present.contains(v) {
                continue;
            }
            for u in self.adj[v].iter() {
                g.adj[u].remove(v);
            }
            g.adj[v] = VSet::new();
            g.present.remove(v);
        }
        g
    }

    pub fn induced(&self, keep: &VSet) -> Graph {
        self.remove_vertices(&self.present.difference(keep))
    }

    /// Connected components of `G[allowed]`, ordered by smallest vertex.
    pub fn components_in(&self, allowed: &VSet) -> Vec<VSet> {
        let allowed = allowed.intersection(&self.present);
        let mut seen = VSet::new();
        let mut comps = Vec::new();
        for s in allowed.iter() {
            if seen.contains(s) {
                continue;
            }
            let comp = self.reach_within(s, &allowed);
            seen.union_with(&comp);
            comps.push(comp);
        }
        comps
    }

    pub fn components(&self) -> Vec<VSet> {
        self.components_in(&self.present.clone())
    }

    /// Vertices reachable from `s` inside `allowed`.
    pub fn reach_within(&self, s: Vertex, allowed: &VSet) -> VSet {
        let mut comp = VSet::singleton(s);
        let mut frontier = VSet::singleton(s);
        while !frontier.is_empty() {
            let mut next = VSet::new();
            for v in frontier.iter() {
                next.union_with(&self.adj[v]);
            }
            next.intersect_with(allowed);
            next.difference_with(&comp);
            comp.union_with(&next);
            frontier = next;
        }
        comp
    }

    pub fn is_connected_set(&self, s: &VSet) -> bool {
        match s.first() {
            None => false,
            Some(v) => s.is_subset(&self.present) && self.reach_within(v, s).len() == s.len(),
        }
    }

    /// Union of neighbourhoods of `s`, minus `s`.
    pub fn boundary(&self, s: &VSet) -> VSet {
        let mut out = VSet::new();
        for v in s.iter() {
            out.union_with(&self.adj[v]);
        }
        out.difference_with(s);
        out
    }

    /// Some vertex of `a` adjacent to some vertex of `b`, smallest pair first.
    pub fn edge_between(&self, a: &VSet, b: &VSet) -> Option<Edge> {
        a.iter()
            .find_map(|u| self.adj[u].intersection(b).first().map(|v| (u, v)))
    }

    /// Breadth-first order from `s` within `allowed`.
    pub fn bfs_order(&self, s: Vertex, allowed: &VSet) -> Vec<Vertex> {
        let mut seen = VSet::singleton(s);
        let mut order = vec![s];
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for u in self.adj[v].iter() {
                if allowed.contains(u) && seen.insert(u) {
                    order.push(u);
                    q.push_back(u);
                }
            }
        }
        order
    }

    /// Shortest path from any vertex of `from` to any vertex of `to` inside `allowed`.
    pub fn shortest_path(&self, from: &VSet, to: &VSet, allowed: &VSet) -> Option<Vec<Vertex>> {
        let mut parent: Vec<usize> = vec![usize::MAX; self.adj.len()];
        let mut q = VecDeque::new();
        for s in from.iter().filter(|&s| allowed.contains(s)) {
            parent[s] = s;
            q.push_back(s);
        }
        while let Some(v) = q.pop_front() {
            if to.contains(v) {
                let mut path = vec![v];
                let mut c = v;
                while parent[c] != c {
                    c = parent[c];
                    path.push(c);
                }
                path.reverse();
                return Some(path);
            }
            for u in self.adj[v].iter() {
                if allowed.contains(u) && parent[u] == usize::MAX {
                    parent[u] = v;
                    q.push_back(u);
                }
            }
        }
        None
    }
}

/// A `g x h` grid with row-major ids `(i-1)*h + (j-1)` for 1-based `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridGraph {
    pub graph: Graph,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridCoord {
    pub row: usize,
    pub col: usize,
}

impl GridGraph {
    pub fn id(&self, row: usize, col: usize) -> Vertex {
        debug_assert!((1..=self.rows).contains(&row) && (1..=self.cols).contains(&col));
        (row - 1) * self.cols + (col - 1)
    }

    pub fn coord(&self, v: Vertex) -> GridCoord {
        GridCoord {
            row: v / self.cols + 1,
            col: v % self.cols + 1,
        }
    }

    pub fn row(&self, i: usize) -> VSet {
        (1..=self.cols).map(|j| self.id(i, j)).collect()
    }

    pub fn column(&self, j: usize) -> VSet {
        (1..=self.rows).map(|i| self.id(i, j)).collect()
    }
}

pub fn grid_graph(g: usize, h: usize) -> Result<GridGraph> {
    if g == 0 || h == 0 {
        return Err(EpError::InvalidInput(format!(
            "grid dimensions must be positive, got {g}x{h}"
        )));
    }
    let mut graph = Graph::empty(g * h);
    for i in 0..g {
        for j in 0..h {
            let v = i * h + j;
            if j + 1 < h {
                graph.add_edge_unchecked(v, v + 1);
            }
            if i + 1 < g {
                graph.add_edge_unchecked(v, v + h);
            }
        }
    }
    Ok(GridGraph {
        graph,
        rows: g,
        cols: h,
    })
}

/// Disjoint union with component `i` shifted by `offsets[i]`.
#[derive(Clone, Debug)]
pub struct DisjointUnion {
    pub graph: Graph,
    pub offsets: Vec<usize>,
}

impl DisjointUnion {
    /// `(part index, id inside that part)` for a vertex of the union.
    pub fn origin(&self, v: Vertex) -> (usize, Vertex) {
        let part = self.offsets.partition_point(|&o| o <= v) - 1;
        (part, v - self.offsets[part])
    }
}

pub fn disjoint_union(graphs: &[&Graph]) -> DisjointUnion {
    let total: usize = graphs.iter().map(|g| g.id_bound()).sum();
    let mut out = Graph::empty(total);
    let mut offsets = Vec::with_capacity(graphs.len());
    let mut off = 0;
    let mut absent = VSet::new();
    for g in graphs {
        offsets.push(off);
        for (u, v) in g.edges() {
            out.add_edge_unchecked(u + off, v + off);
        }
        for v in 0..g.id_bound() {
            if !g.contains(v) {
                absent.insert(v + off);
            }
        }
        off += g.id_bound();
    }
    DisjointUnion {
        graph: out.remove_vertices(&absent),
        offsets,
    }
}

/// Number of members counted with multiplicity, skipping empty sets.
pub fn multiset_size(z: &[VSet]) -> usize {
    z.iter().filter(|x| !x.is_empty()).count()
}

pub fn restrict_multiset(z: &[VSet], b: &VSet) -> Vec<VSet> {
    z.iter().map(|x| x.intersection(b)).collect()
}

pub fn subtract_multiset(z: &[VSet], b: &VSet) -> Vec<VSet> {
    z.iter().map(|x| x.difference(b)).collect()
}

/// A graph together with an ordered multiset of vertex sets. The identity of
/// a member is its list position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedGraph {
    pub graph: Graph,
    pub z: Vec<VSet>,
}

impl RootedGraph {
    pub fn new(graph: Graph, z: Vec<VSet>) -> Result<Self> {
        for (i, x) in z.iter().enumerate() {
            if !x.is_subset(graph.vertices()) {
                return Err(EpError::InvalidInput(format!(
                    "Z[{i}] contains a vertex outside the graph"
                )));
            }
        }
        Ok(RootedGraph { graph, z })
    }

    /// `G - S` with every member reduced accordingly.
    pub fn remove_vertices(&self, s: &VSet) -> RootedGraph {
        RootedGraph {
            graph: self.graph.remove_vertices(s),
            z: subtract_multiset(&self.z, s),
        }
    }

    pub fn induced(&self, keep: &VSet) -> RootedGraph {
        RootedGraph {
            graph: self.graph.induced(keep),
            z: restrict_multiset(&self.z, keep),
        }
    }

    pub fn z_size(&self) -> usize {
        multiset_size(&self.z)
    }

    /// Positions of members meeting `s`.
    pub fn hit_positions(&self, s: &VSet) -> Vec<usize> {
        self.z
            .iter()
            .enumerate()
            .filter(|(_, x)| x.intersects(s))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_json(&self) -> InstanceJson {
        InstanceJson::from_rooted(self, None)
    }
}

/// `{"n", "edges", "z"}` with an optional `"grid": [g, h]` tag. Vertex lists
/// are sorted so serialisation is canonical.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub z: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deleted: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

impl InstanceJson {
    pub fn from_rooted(rg: &RootedGraph, grid: Option<[usize; 2]>) -> Self {
        let n = rg.graph.id_bound();
        InstanceJson {
            n,
            edges: rg.graph.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            z: rg.z.iter().map(|x| x.to_vec()).collect(),
            grid,
            deleted: (0..n).filter(|&v| !rg.graph.contains(v)).collect(),
            provenance: None,
        }
    }

    pub fn to_rooted(&self) -> Result<RootedGraph> {
        let edges: Vec<Edge> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let mut g = Graph::from_edges(self.n, &edges)?;
        if let Some([gr, gc]) = self.grid {
            if gr * gc != self.n {
                return Err(EpError::InvalidInput(format!(
                    "grid tag {gr}x{gc} does not match n={}",
                    self.n
                )));
            }
        }
        if !self.deleted.is_empty() {
            g = g.remove_vertices(&self.deleted.iter().collect());
        }
        let mut z = Vec::with_capacity(self.z.len());
        for x in &self.z {
            if let Some(&bad) = x.iter().find(|&&v| v >= self.n) {
                return Err(EpError::InvalidInput(format!(
                    "Z member refers to vertex {bad} >= n"
                )));
            }
            z.push(x.iter().collect());
        }
        RootedGraph::new(g, z)
    }

    pub fn to_canonical_string(&self) -> String {
        serde_json::to_string(self).expect("instance serialises")
    }
}

/// Pair of subgraphs `(A, B)` covering the graph with no shared edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub a_vertices: VSet,
    pub b_vertices: VSet,
    pub a_edges: BTreeSet<Edge>,
    pub b_edges: BTreeSet<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeparationViolation {
    VerticesNotCovered(VSet),
    EdgesNotCovered(Vec<Edge>),
    SharedEdges(Vec<Edge>),
    ForeignVertex(Vertex),
    ForeignEdge(Edge),
    EdgeEndOutside(Edge),
}

impl std::fmt::Display for SeparationViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeparationViolation::VerticesNotCovered(s) => {
                write!(f, "V(A)∪V(B)≠V(G): missing {s:?}")
            }
            SeparationViolation::EdgesNotCovered(e) => write!(f, "E(A)∪E(B)≠E(G): missing {e:?}"),
            SeparationViolation::SharedEdges(e) => write!(f, "E(A)∩E(B)≠∅: {e:?}"),
            SeparationViolation::ForeignVertex(v) => write!(f, "vertex {v} not in G"),
            SeparationViolation::ForeignEdge(e) => write!(f, "edge {e:?} not in G"),
            SeparationViolation::EdgeEndOutside(e) => {
                write!(f, "edge {e:?} has an end outside its side")
            }
        }
    }
}

impl Separation {
    /// Builds the separation whose sides are `G[a]` and the remaining edges
    /// on `b`. Fails if some edge joins `a - b` to `b - a`.
    pub fn from_vertex_sets(g: &Graph, a: &VSet, b: &VSet) -> Result<Self> {
        let mut a_edges = BTreeSet::new();
        let mut b_edges = BTreeSet::new();
        for (u, v) in g.edges() {
            if a.contains(u) && a.contains(v) {
                a_edges.insert((u, v));
            } else if b.contains(u) && b.contains(v) {
                b_edges.insert((u, v));
            } else {
                return Err(EpError::InvalidInput(format!(
                    "edge ({u},{v}) crosses the separator"
                )));
            }
        }
        if !a.union(b).is_subset(g.vertices()) || !g.vertices().is_subset(&a.union(b)) {
            return Err(EpError::InvalidInput(
                "sides do not cover V(G) exactly".into(),
            ));
        }
        Ok(Separation {
            a_vertices: a.clone(),
            b_vertices: b.clone(),
            a_edges,
            b_edges,
        })
    }

    /// `(∅, G)`.
    pub fn trivial(g: &Graph) -> Self {
        Separation {
            a_vertices: VSet::new(),
            b_vertices: g.vertices().clone(),
            a_edges: BTreeSet::new(),
            b_edges: g.edges().into_iter().collect(),
        }
    }

    pub fn separator(&self) -> VSet {
        self.a_vertices.intersection(&self.b_vertices)
    }

    pub fn order(&self) -> usize {
        self.a_vertices.intersection_len(&self.b_vertices)
    }

    pub fn a_only(&self) -> VSet {
        self.a_vertices.difference(&self.b_vertices)
    }

    pub fn b_only(&self) -> VSet {
        self.b_vertices.difference(&self.a_vertices)
    }

    /// `‖Z \ A‖`.
    pub fn z_outside_a(&self, z: &[VSet]) -> usize {
        multiset_size(&subtract_multiset(z, &self.a_vertices))
    }
}

/// Returns the order if every separation axiom holds, else all violations.
pub fn validate_separation(
    g: &Graph,
    s: &Separation,
) -> std::result::Result<usize, Vec<SeparationViolation>> {
    let mut bad = Vec::new();
    for v in s.a_vertices.union(&s.b_vertices).iter() {
        if !g.contains(v) {
            bad.push(SeparationViolation::ForeignVertex(v));
        }
    }
    let missing = g.vertices().difference(&s.a_vertices.union(&s.b_vertices));
    if !missing.is_empty() {
        bad.push(SeparationViolation::VerticesNotCovered(missing));
    }
    for (side_v, side_e) in [(&s.a_vertices, &s.a_edges), (&s.b_vertices, &s.b_edges)] {
        for &(u, v) in side_e {
            if !g.has_edge(u, v) {
                bad.push(SeparationViolation::ForeignEdge((u, v)));
            } else if !side_v.contains(u) || !side_v.contains(v) {
                bad.push(SeparationViolation::EdgeEndOutside((u, v)));
            }
        }
    }
    let uncovered: Vec<Edge> = g
        .edges()
        .into_iter()
        .filter(|e| !s.a_edges.contains(e) && !s.b_edges.contains(e))
        .collect();
    if !uncovered.is_empty() {
        bad.push(SeparationViolation::EdgesNotCovered(uncovered));
    }
    let shared: Vec<Edge> = s.a_edges.intersection(&s.b_edges).copied().collect();
    if !shared.is_empty() {
        bad.push(SeparationViolation::SharedEdges(shared));
    }
    if bad.is_empty() {
        Ok(s.order())
    } else {
        Err(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vs(v: &[usize]) -> VSet {
        v.iter().collect()
    }

    #[test]
    fn small_grids() {
        let g = grid_graph(2, 2).unwrap();
        assert_eq!((g.graph.vertex_count(), g.graph.edge_count()), (4, 4));
        assert!(g.graph.vertices().iter().all(|v| g.graph.degree(v) == 2));
        let p = grid_graph(1, 5).unwrap();
        assert_eq!((p.graph.vertex_count(), p.graph.edge_count()), (5, 4));
        let g3 = grid_graph(3, 3).unwrap();
        // 2·g·(g−1) for a square grid
        assert_eq!(g3.graph.edge_count(), 2 * 3 * 2);
        assert_eq!(g3.id(2, 3), 5);
        assert_eq!(g3.coord(5), GridCoord { row: 2, col: 3 });
        assert!(grid_graph(0, 3).is_err());
    }

    #[test]
    fn unions() {
        let u = disjoint_union(&[]);
        assert_eq!(u.graph.vertex_count(), 0);
        let g2 = grid_graph(2, 2).unwrap().graph;
        let u = disjoint_union(&[&g2, &g2]);
        assert_eq!(
            (
                u.graph.vertex_count(),
                u.graph.edge_count(),
                u.graph.components().len()
            ),
            (8, 8, 2)
        );
        assert_eq!(u.origin(5), (1, 1));
        let g3 = grid_graph(3, 3).unwrap().graph;
        let g1 = grid_graph(1, 1).unwrap().graph;
        let u = disjoint_union(&[&g3, &g1]);
        assert_eq!((u.graph.vertex_count(), u.graph.edge_count()), (10, 12));
    }

    #[test]
    fn multisets() {
        let (a, b, c) = (vs(&[1]), vs(&[2]), vs(&[3]));
        let z = vec![a, b.clone(), b, c.clone(), c, VSet::new()];
        assert_eq!(multiset_size(&z), 5);
        assert_eq!(multiset_size(&[]), 0);
        assert_eq!(multiset_size(&[VSet::new(), VSet::new()]), 0);
        let z = vec![vs(&[1, 2]), vs(&[3])];
        let b = vs(&[1, 3]);
        assert_eq!(restrict_multiset(&z, &b), vec![vs(&[1]), vs(&[3])]);
        assert_eq!(subtract_multiset(&z, &b), vec![vs(&[2]), VSet::new()]);
        let z = vec![vs(&[1]), vs(&[1])];
        let d = subtract_multiset(&z, &vs(&[1]));
        assert_eq!(d, vec![VSet::new(), VSet::new()]);
        assert_eq!(multiset_size(&d), 0);
    }

    #[test]
    fn separations() {
        let g = grid_graph(2, 3).unwrap().graph;
        let full = Separation {
            a_vertices: g.vertices().clone(),
            b_vertices: VSet::new(),
            a_edges: g.edges().into_iter().collect(),
            b_edges: BTreeSet::new(),
        };
        assert_eq!(validate_separation(&g, &full), Ok(0));
        let u = disjoint_union(&[&g, &g]);
        let comps = u.graph.components();
        let s = Separation::from_vertex_sets(&u.graph, &comps[0], &comps[1]).unwrap();
        assert_eq!(validate_separation(&u.graph, &s), Ok(0));
        let mut shared = full.clone();
        shared.b_vertices = vs(&[0, 1]);
        shared.b_edges.insert((0, 1));
        let err = validate_separation(&g, &shared).unwrap_err();
        assert!(err
            .iter()
            .any(|e| matches!(e, SeparationViolation::SharedEdges(_))));
        assert!(err.iter().any(|e| e.to_string().starts_with("E(A)∩E(B)≠∅")));
    }

    #[test]
    fn json_round_trip() {
        let gg = grid_graph(2, 3).unwrap();
        let rg = RootedGraph::new(gg.graph, vec![vs(&[0, 4]), VSet::new()]).unwrap();
        let j = InstanceJson::from_rooted(&rg, Some([2, 3]));
        let s = j.to_canonical_string();
        let back: InstanceJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_canonical_string(), s);
        assert_eq!(back.to_rooted().unwrap(), rg);
    }

    proptest! {
        #[test]
        fn grid_counts(g in 1usize..9, h in 1usize..9) {
            let gg = grid_graph(g, h).unwrap();
            prop_assert_eq!(gg.graph.vertex_count(), g * h);
            let mut count = 0;
            for u in 0..g * h {
                for v in u + 1..g * h {
                    let (a, b) = (gg.coord(u), gg.coord(v));
                    if a.row.abs_diff(b.row) + a.col.abs_diff(b.col) == 1 {
                        count += 1;
                        prop_assert!(gg.graph.has_edge(u, v));
                    }
                }
            }
            prop_assert_eq!(count, g * (h - 1) + h * (g - 1));
            prop_assert_eq!(gg.graph.edge_count(), count);
        }

        #[test]
        fn subtraction_accounting(z in proptest::collection::vec(proptest::collection::btree_set(0usize..12, 0..5), 0..6),
                                  b in proptest::collection::btree_set(0usize..12, 0..8)) {
            let z: Vec<VSet> = z.iter().map(|x| x.iter().collect()).collect();
            let b: VSet = b.iter().collect();
            let inside = z.iter().filter(|x| x.is_subset(&b) || x.is_empty()).count();
            let nonempty_total = z.len();
            // members fully inside B (or empty) vanish; the rest survive
            prop_assert_eq!(multiset_size(&subtract_multiset(&z, &b)) + inside, nonempty_total);
        }

        #[test]
        fn trivial_separation_always_valid(n in 0usize..10, seed in any::<u64>()) {
            let mut edges = Vec::new();
            let mut s = seed;
            for u in 0..n { for v in u+1..n { s = s.wrapping_mul(6364136223846793005).wrapping_add(1); if s >> 62 == 0 { edges.push((u, v)); } } }
            let g = Graph::from_edges(n, &edges).unwrap();
            let sep = Separation {
                a_vertices: g.vertices().clone(), b_vertices: VSet::new(),
                a_edges: g.edges().into_iter().collect(), b_edges: BTreeSet::new() };
            prop_assert_eq!(validate_separation(&g, &sep), Ok(0));
        }
    }
}
