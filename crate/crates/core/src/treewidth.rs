//! Tree decompositions, packing and hitting of d-subtrees of a tree, and the
//! packing/covering dichotomy on graphs with a given tree decomposition.

use crate::error::{precondition, Budget, EpError, Result};
use crate::graph::RootedGraph;
use crate::minor_model::{ModelOracle, ModelWitness, Pattern};
use crate::pack_cover::{max_disjoint, PackCover};
use crate::vset::{VSet, Vertex};
use crate::Graph;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A tree with a bag of host vertices at every node. Serialised as
/// `{"tree_edges": [[s, t], ...], "bags": {node: [v, ...]}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TdJson", into = "TdJson")]
pub struct TreeDecomposition {
    pub tree: Graph,
    pub bags: BTreeMap<usize, VSet>,
}

#[derive(Serialize, Deserialize)]
struct TdJson {
    tree_edges: Vec<[usize; 2]>,
    bags: BTreeMap<usize, Vec<Vertex>>,
}

impl TryFrom<TdJson> for TreeDecomposition {
    type Error = EpError;

    fn try_from(j: TdJson) -> Result<Self> {
        let n = j.bags.keys().map(|&t| t + 1).max().unwrap_or(0);
        let edges: Vec<(usize, usize)> = j.tree_edges.iter().map(|e| (e[0], e[1])).collect();
        let n = edges.iter().map(|&(a, b)| a.max(b) + 1).fold(n, usize::max);
        let bags: BTreeMap<usize, VSet> = j
            .bags
            .into_iter()
            .map(|(t, b)| (t, b.into_iter().collect()))
            .collect();
        let absent: VSet = (0..n).filter(|t| !bags.contains_key(t)).collect();
        let tree = Graph::from_edges(n, &edges)?.remove_vertices(&absent);
        Ok(TreeDecomposition { tree, bags })
    }
}

impl From<TreeDecomposition> for TdJson {
    fn from(td: TreeDecomposition) -> Self {
        TdJson {
            tree_edges: td.tree.edges().into_iter().map(|(a, b)| [a, b]).collect(),
            bags: td.bags.into_iter().map(|(t, b)| (t, b.to_vec())).collect(),
        }
    }
}

impl TreeDecomposition {
    /// One bag holding every vertex.
    pub fn single_bag(g: &Graph) -> Self {
        TreeDecomposition {
            tree: Graph::empty(1),
            bags: BTreeMap::from([(0, g.vertices().clone())]),
        }
    }

    /// Maximum bag size minus one (`0` for no bags).
    pub fn width(&self) -> usize {
        self.bags
            .values()
            .map(|b| b.len())
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
    }

    /// Tree nodes whose bag contains `v`.
    pub fn nodes_of(&self, v: Vertex) -> VSet {
        self.bags
            .iter()
            .filter(|(_, b)| b.contains(v))
            .map(|(&t, _)| t)
            .collect()
    }

    /// Tree nodes whose bag meets `s`.
    pub fn node_image(&self, s: &VSet) -> VSet {
        self.bags
            .iter()
            .filter(|(_, b)| b.intersects(s))
            .map(|(&t, _)| t)
            .collect()
    }

    /// Union of the bags at `nodes`.
    pub fn bag_union(&self, nodes: &VSet) -> VSet {
        nodes
            .iter()
            .fold(VSet::new(), |acc, t| acc.union(&self.bags[&t]))
    }

    /// Decomposition from an elimination order: each vertex's bag is itself
    /// plus its later neighbours in the fill-in graph.
    pub fn from_elimination_order(g: &Graph, order: &[Vertex]) -> Self {
        let mut pos = vec![usize::MAX; g.id_bound()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut adj: Vec<VSet> = (0..g.id_bound()).map(|v| g.neighbors(v).clone()).collect();
        let mut bags = BTreeMap::new();
        let mut edges = Vec::new();
        for (i, &v) in order.iter().enumerate() {
            let later: VSet = adj[v].iter().filter(|&u| pos[u] > i).collect();
            for a in later.iter() {
                adj[a].union_with(&later);
                adj[a].remove(a);
            }
            if let Some(p) = later.iter().min_by_key(|&u| pos[u]) {
                edges.push((i, pos[p]));
            } else if i + 1 < order.len() {
                edges.push((i, i + 1));
            }
            let mut bag = later;
            bag.insert(v);
            bags.insert(i, bag);
        }
        let tree =
            Graph::from_edges(order.len().max(1), &edges).expect("elimination tree is simple");
        let mut bags = bags;
        if order.is_empty() {
            bags.insert(0, VSet::new());
        }
        TreeDecomposition { tree, bags }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TdViolation {
    NotATree,
    BagNodeMismatch,
    /// (T1): a vertex in no bag.
    Uncovered(Vertex),
    /// (T2): an edge in no bag.
    EdgeUncovered(Vertex, Vertex),
    /// (T3): the bags holding a vertex are not connected in the tree.
    Scattered(Vertex),
}

impl fmt::Display for TdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdViolation::NotATree => write!(f, "decomposition tree is not a tree"),
            TdViolation::BagNodeMismatch => write!(f, "bags and tree nodes differ"),
            TdViolation::Uncovered(v) => write!(f, "(T1) vertex {v} is in no bag"),
            TdViolation::EdgeUncovered(u, v) => write!(f, "(T2) edge {u}-{v} is in no bag"),
            TdViolation::Scattered(v) => write!(f, "(T3) bags containing {v} are not connected"),
        }
    }
}

pub fn is_tree(t: &Graph) -> bool {
    t.vertex_count() > 0 && t.edge_count() + 1 == t.vertex_count() && t.components().len() == 1
}

/// Checks (T1)-(T3) in that order and returns the width.
pub fn validate_td(g: &Graph, td: &TreeDecomposition) -> std::result::Result<usize, TdViolation> {
    if !is_tree(&td.tree) {
        return Err(TdViolation::NotATree);
    }
    if td.tree.vertices().to_vec() != td.bags.keys().copied().collect::<Vec<_>>() {
        return Err(TdViolation::BagNodeMismatch);
    }
    for v in g.vertices().iter() {
        if td.bags.values().all(|b| !b.contains(v)) {
            return Err(TdViolation::Uncovered(v));
        }
    }
    for (u, v) in g.edges() {
        if td.bags.values().all(|b| !(b.contains(u) && b.contains(v))) {
            return Err(TdViolation::EdgeUncovered(u, v));
        }
    }
    for v in g.vertices().iter() {
        if !td.tree.is_connected_set(&td.nodes_of(v)) {
            return Err(TdViolation::Scattered(v));
        }
    }
    Ok(td.width())
}

/// Subgraphs of a tree (given by node sets) with at most `d` components each.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DSubtreeFamily {
    pub d: usize,
    pub members: Vec<VSet>,
}

impl DSubtreeFamily {
    pub fn validate(&self, tree: &Graph) -> std::result::Result<(), String> {
        for (i, m) in self.members.iter().enumerate() {
            if m.is_empty() || !m.is_subset(tree.vertices()) {
                return Err(format!("member {i} is empty or leaves the tree"));
            }
            let c = tree.components_in(m).len();
            if c > self.d {
                return Err(format!("member {i} has {c} > d = {} components", self.d));
            }
        }
        Ok(())
    }
}

/// `(d²−d+1)(k−1)`.
pub fn subtree_hitting_bound(d: usize, k: usize) -> usize {
    (d * d - d + 1) * k.saturating_sub(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PackOrHit {
    /// Indices of `k` pairwise disjoint members.
    Packing(Vec<usize>),
    /// Nodes meeting every member.
    Hitting(VSet),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DSubtreeReport {
    pub outcome: PackOrHit,
    /// Maximum number of pairwise disjoint members.
    pub nu: usize,
    /// Minimum size of a hitting set.
    pub tau: usize,
    /// `(d²−d+1)(k−1)`.
    pub bound: usize,
    /// `τ <= (d²−d+1)ν`.
    pub bound_holds: bool,
}

/// Exact optimal packing and hitting set of the family, returned as `k`
/// disjoint members when `ν >= k` and as an optimal hitting set otherwise.
pub fn d_subtree_pack_or_hit(
    tree: &Graph,
    fam: &DSubtreeFamily,
    k: usize,
    budget: &mut Budget,
) -> Result<DSubtreeReport> {
    if !is_tree(tree) {
        return Err(precondition("host is not a tree"));
    }
    fam.validate(tree).map_err(precondition)?;
    let packing = max_disjoint(&fam.members, budget)?;
    let nu = packing.len();
    let hitting = min_hitting_set(&fam.members, budget)?;
    let tau = hitting.len();
    let outcome = if nu >= k {
        let mut idx = Vec::new();
        for p in packing.iter().take(k) {
            idx.push(
                fam.members
                    .iter()
                    .position(|m| m == p)
                    .expect("packing uses members"),
            );
        }
        PackOrHit::Packing(idx)
    } else {
        PackOrHit::Hitting(hitting)
    };
    Ok(DSubtreeReport {
        outcome,
        nu,
        tau,
        bound: subtree_hitting_bound(fam.d, k),
        bound_holds: tau <= subtree_hitting_bound(fam.d, nu + 1),
    })
}

/// Smallest set meeting every member, by iterative deepening over the
/// elements of the first unhit member.
pub fn min_hitting_set(family: &[VSet], budget: &mut Budget) -> Result<VSet> {
    if family.iter().any(|m| m.is_empty()) {
        return Err(precondition("an empty member cannot be hit"));
    }
    let mut sorted: Vec<&VSet> = family.iter().collect();
    sorted.sort_by_key(|m| m.len());
    sorted.dedup();
    for b in 0.. {
        let mut chosen = VSet::new();
        if hit_within(&sorted, b, &mut chosen, budget)? {
            return Ok(chosen);
        }
    }
    unreachable!()
}

fn hit_within(family: &[&VSet], b: usize, chosen: &mut VSet, budget: &mut Budget) -> Result<bool> {
    budget.tick(1)?;
    let unhit: Vec<&VSet> = family
        .iter()
        .copied()
        .filter(|m| !m.intersects(chosen))
        .collect();
    let Some(first) = unhit.first() else {
        return Ok(true);
    };
    // greedily disjoint unhit members each need their own element
    let mut cover = VSet::new();
    let mut lower = 0;
    for m in &unhit {
        if !m.intersects(&cover) {
            cover.union_with(m);
            lower += 1;
        }
    }
    if lower > b {
        return Ok(false);
    }
    for v in first.iter() {
        chosen.insert(v);
        if hit_within(&unhit, b - 1, chosen, budget)? {
            return Ok(true);
        }
        chosen.remove(v);
    }
    Ok(false)
}

/// Exact treewidth with an optimal decomposition, by dynamic programming over
/// vertex subsets. Meant for graphs with at most 16 vertices.
pub fn exact_treewidth(g: &Graph) -> Result<(usize, TreeDecomposition)> {
    let verts = g.vertices().to_vec();
    let n = verts.len();
    if n > 16 {
        return Err(precondition("exact treewidth supports at most 16 vertices"));
    }
    if n == 0 {
        return Ok((0, TreeDecomposition::single_bag(g)));
    }
    let full = (1usize << n) - 1;
    let mask_of = |s: usize| -> VSet {
        (0..n)
            .filter(|i| s >> i & 1 == 1)
            .map(|i| verts[i])
            .collect()
    };
    // q(s, v): vertices outside s ∪ {v} reachable from v through s
    let q = |s: usize, v: usize| -> usize {
        let inside = mask_of(s).union(&VSet::singleton(verts[v]));
        let comp = g.reach_within(verts[v], &inside);
        g.boundary(&comp).len()
    };
    let mut best = vec![usize::MAX; full + 1];
    let mut choice = vec![0usize; full + 1];
    best[0] = 0;
    for s in 1..=full {
        for v in 0..n {
            if s >> v & 1 == 1 {
                let rest = s & !(1 << v);
                let c = best[rest].max(q(rest, v));
                if c < best[s] {
                    best[s] = c;
                    choice[s] = v;
                }
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = choice[s];
        order.push(verts[v]);
        s &= !(1 << v);
    }
    order.reverse();
    let td = TreeDecomposition::from_elimination_order(g, &order);
    Ok((best[full], td))
}

/// Decomposition from the greedy minimum-degree elimination order.
pub fn min_degree_decomposition(g: &Graph) -> TreeDecomposition {
    let mut adj: Vec<VSet> = (0..g.id_bound()).map(|v| g.neighbors(v).clone()).collect();
    let mut left = g.vertices().clone();
    let mut order = Vec::with_capacity(left.len());
    while let Some(v) = left.iter().min_by_key(|&v| adj[v].len()) {
        let nb = adj[v].clone();
        for a in nb.iter() {
            adj[a].union_with(&nb);
            adj[a].remove(a);
            adj[a].remove(v);
        }
        left.remove(v);
        order.push(v);
    }
    TreeDecomposition::from_elimination_order(g, &order)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelsOrDeletion {
    Models(Vec<ModelWitness>),
    Deletion(VSet),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedTwReport {
    pub outcome: ModelsOrDeletion,
    pub width: usize,
    /// `(w−1)(h²−h+1)(k−1)`.
    pub stated_bound: usize,
    /// `(w+1)(h²−h+1)(k−1)`, the bag-size bound.
    pub safe_bound: usize,
    pub within_stated_bound: bool,
    pub within_safe_bound: bool,
    /// Node images of the models, one per minimal model set.
    pub family_size: usize,
}

/// Packs `k` models or deletes the bags at an optimal hitting set of the node
/// images of all minimal model sets.
pub fn bounded_tw_pack_or_hit(
    rg: &RootedGraph,
    h: &Graph,
    l: usize,
    k: usize,
    td: &TreeDecomposition,
    pure: bool,
    budget: Budget,
) -> Result<BoundedTwReport> {
    let w = validate_td(&rg.graph, td).map_err(|e| precondition(e.to_string()))?;
    let hn = h.vertex_count();
    let factor = (hn * hn - hn + 1) * k.saturating_sub(1);
    let pat = Pattern::new(h);
    let mut pc = PackCover::new(rg, &pat, l, pure, budget.clone());
    let sets = pc.minimal_sets()?;
    let members: Vec<VSet> = sets.iter().map(|s| td.node_image(s)).collect();
    let d = pat.component_count().max(1);
    let fam = DSubtreeFamily { d, members };
    let mut b = pc.oracle.budget.clone();
    let outcome = if fam.members.is_empty() {
        ModelsOrDeletion::Deletion(VSet::new())
    } else {
        match d_subtree_pack_or_hit(&td.tree, &fam, k, &mut b)?.outcome {
            PackOrHit::Packing(idx) => {
                let mut oracle = ModelOracle::new(rg, &pat, l, pure, budget);
                let mut ws = Vec::new();
                for i in idx {
                    ws.push(oracle.find(&sets[i])?.expect("minimal sets carry models"));
                }
                ModelsOrDeletion::Models(ws)
            }
            PackOrHit::Hitting(nodes) => {
                let s = td.bag_union(&nodes);
                let mut fresh = PackCover::new(rg, &pat, l, pure, budget);
                fresh.certify_deletion(&s)?;
                ModelsOrDeletion::Deletion(s)
            }
        }
    };
    let size = match &outcome {
        ModelsOrDeletion::Deletion(s) => s.len(),
        ModelsOrDeletion::Models(_) => 0,
    };
    Ok(BoundedTwReport {
        outcome,
        width: w,
        stated_bound: w.saturating_sub(1) * factor,
        safe_bound: (w + 1) * factor,
        within_stated_bound: size <= w.saturating_sub(1) * factor,
        within_safe_bound: size <= (w + 1) * factor,
        family_size: fam.members.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::grid_graph;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>()).unwrap()
    }

    fn path_td(n: usize) -> TreeDecomposition {
        let bags = (1..n)
            .map(|i| (i - 1, [i - 1, i].into_iter().collect()))
            .collect();
        TreeDecomposition {
            tree: path(n - 1),
            bags,
        }
    }

    #[test]
    fn single_bag_width() {
        let g = grid_graph(2, 3).unwrap().graph;
        assert_eq!(validate_td(&g, &TreeDecomposition::single_bag(&g)), Ok(5));
    }

    #[test]
    fn path_width_one() {
        assert_eq!(validate_td(&path(5), &path_td(5)), Ok(1));
    }

    #[test]
    fn violations_name_the_axiom() {
        let g = path(3);
        let mut td = path_td(3);
        td.bags.get_mut(&1).unwrap().remove(2);
        assert!(validate_td(&g, &td)
            .unwrap_err()
            .to_string()
            .starts_with("(T1)"));
        // vertex 0 in the two end bags only
        let tree = path(3);
        let bags = BTreeMap::from([
            (0, VSet::from_iter([0, 1])),
            (1, VSet::from_iter([1, 2])),
            (2, VSet::from_iter([0, 2])),
        ]);
        let bad = TreeDecomposition { tree, bags };
        let e = validate_td(&Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap(), &bad).unwrap_err();
        assert_eq!(e, TdViolation::Scattered(0));
        assert!(e.to_string().contains("(T3)"));
    }

    #[test]
    fn json_round_trip() {
        let td = path_td(4);
        let s = serde_json::to_string(&td).unwrap();
        assert_eq!(
            s,
            r#"{"tree_edges":[[0,1],[1,2]],"bags":{"0":[0,1],"1":[1,2],"2":[2,3]}}"#
        );
        let back: TreeDecomposition = serde_json::from_str(&s).unwrap();
        assert_eq!(back, td);
    }

    #[test]
    fn singletons_on_a_path() {
        let t = path(6);
        let fam = DSubtreeFamily {
            d: 1,
            members: (0..6).map(VSet::singleton).collect(),
        };
        let mut b = Budget::default();
        let r = d_subtree_pack_or_hit(&t, &fam, 4, &mut b).unwrap();
        assert!(matches!(r.outcome, PackOrHit::Packing(ref v) if v.len() == 4));
        let fam2 = DSubtreeFamily {
            d: 1,
            members: vec![
                VSet::from_iter([0, 1, 2]),
                VSet::from_iter([2, 3]),
                VSet::from_iter([4, 5]),
            ],
        };
        let r = d_subtree_pack_or_hit(&t, &fam2, 3, &mut b).unwrap();
        assert_eq!((r.nu, r.tau), (2, 2));
        assert!(matches!(r.outcome, PackOrHit::Hitting(ref s) if s.len() == 2));
        assert!(r.bound_holds);
    }

    #[test]
    fn k_one_needs_empty_family_for_empty_hit() {
        let t = path(3);
        let mut b = Budget::default();
        let empty = DSubtreeFamily {
            d: 2,
            members: vec![],
        };
        assert_eq!(
            d_subtree_pack_or_hit(&t, &empty, 1, &mut b)
                .unwrap()
                .outcome,
            PackOrHit::Hitting(VSet::new())
        );
        let one = DSubtreeFamily {
            d: 2,
            members: vec![VSet::from_iter([0, 2])],
        };
        assert_eq!(
            d_subtree_pack_or_hit(&t, &one, 1, &mut b).unwrap().outcome,
            PackOrHit::Packing(vec![0])
        );
        let bad = DSubtreeFamily {
            d: 1,
            members: vec![VSet::from_iter([0, 2])],
        };
        assert!(d_subtree_pack_or_hit(&t, &bad, 1, &mut b).is_err());
    }

    #[test]
    fn exact_treewidth_small() {
        let cases = [
            (path(5), 1),
            (grid_graph(3, 3).unwrap().graph, 3),
            (Graph::empty(3), 0),
        ];
        for (g, want) in cases {
            let (tw, td) = exact_treewidth(&g).unwrap();
            assert_eq!(tw, want);
            assert_eq!(validate_td(&g, &td), Ok(want));
        }
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(exact_treewidth(&k4).unwrap().0, 3);
    }

    #[test]
    fn path_models_match_oracles() {
        let g = path(7);
        let z = vec![
            VSet::from_iter([0, 3]),
            VSet::from_iter([2, 6]),
            VSet::from_iter([4]),
        ];
        let rg = RootedGraph::new(g, z).unwrap();
        let k1 = Graph::empty(1);
        let td = path_td(7);
        for k in 1..=3 {
            let r = bounded_tw_pack_or_hit(&rg, &k1, 2, k, &td, false, Budget::default()).unwrap();
            let nu = crate::pack_cover::packing_number(&rg, &k1, 2, false, Budget::default())
                .unwrap()
                .nu;
            match r.outcome {
                ModelsOrDeletion::Models(ws) => {
                    assert!(nu >= k);
                    assert_eq!(ws.len(), k);
                }
                ModelsOrDeletion::Deletion(s) => {
                    assert!(nu < k);
                    assert!(r.within_safe_bound, "{s:?}");
                }
            }
        }
    }

    #[test]
    fn min_degree_is_valid() {
        for g in [path(7), grid_graph(5, 5).unwrap().graph, Graph::empty(2)] {
            let td = min_degree_decomposition(&g);
            let w = validate_td(&g, &td).unwrap();
            assert!(w >= exact_treewidth(&g).map(|r| r.0).unwrap_or(0));
        }
    }

    #[test]
    fn no_models_no_deletion() {
        let rg = RootedGraph::new(path(3), vec![VSet::singleton(0)]).unwrap();
        let r = bounded_tw_pack_or_hit(
            &rg,
            &Graph::empty(1),
            2,
            2,
            &path_td(3),
            false,
            Budget::default(),
        )
        .unwrap();
        assert_eq!(r.outcome, ModelsOrDeletion::Deletion(VSet::new()));
    }
}
