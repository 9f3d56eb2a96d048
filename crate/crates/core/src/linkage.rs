//! (Z,k)-partitions, their refinement into ℓ-sets with consecutive anchors,
//! and the linkage-or-separation dichotomy.

use crate::error::{precondition, Result};
use crate::flow::{FlowNet, INF};
use crate::graph::{validate_separation, RootedGraph, Separation};
use crate::vset::{VSet, Vertex};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Classes of points, each inside a distinct member of Z and of size at most k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZkPartition {
    pub classes: Vec<Vec<Vertex>>,
    /// `gamma[i]` is the Z position hosting `classes[i]`.
    pub gamma: Vec<usize>,
    pub k: usize,
}

impl ZkPartition {
    pub fn class_of(&self, v: Vertex) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&v))
    }

    pub fn points(&self) -> VSet {
        self.classes.iter().flatten().collect()
    }
}

pub fn validate_zk_partition(
    points: &[Vertex],
    z: &[VSet],
    p: &ZkPartition,
) -> std::result::Result<(), String> {
    if p.classes.len() != p.gamma.len() {
        return Err("classes and γ differ in length".into());
    }
    let mut seen = VSet::new();
    for (i, c) in p.classes.iter().enumerate() {
        if c.is_empty() {
            return Err(format!("class {i} is empty"));
        }
        if c.len() > p.k {
            return Err(format!("class {i} has {} > k = {} points", c.len(), p.k));
        }
        let zi = z
            .get(p.gamma[i])
            .ok_or_else(|| format!("γ({i}) out of range"))?;
        for &v in c {
            if !zi.contains(v) {
                return Err(format!("point {v} of class {i} not in Z[{}]", p.gamma[i]));
            }
            if !seen.insert(v) {
                return Err(format!("point {v} in two classes"));
            }
        }
    }
    let mut g = p.gamma.clone();
    g.sort_unstable();
    if g.windows(2).any(|w| w[0] == w[1]) {
        return Err("γ is not injective".into());
    }
    let want: VSet = points.iter().collect();
    if want != seen || want.len() != points.len() {
        return Err("classes do not partition the points".into());
    }
    Ok(())
}

/// Decides existence by a capacitated assignment of points to Z positions.
pub fn find_zk_partition(points: &[Vertex], z: &[VSet], k: usize) -> Option<ZkPartition> {
    let n = points.len();
    let m = z.len();
    let (s, t) = (n + m, n + m + 1);
    let mut net = FlowNet::new(n + m + 2);
    let mut arcs = Vec::new();
    for (i, &v) in points.iter().enumerate() {
        net.add_arc(s, i, 1);
        for (j, zj) in z.iter().enumerate() {
            if zj.contains(v) {
                arcs.push((net.add_arc(i, n + j, 1), i, j));
            }
        }
    }
    for j in 0..m {
        net.add_arc(n + j, t, k as i64);
    }
    if net.max_flow(s, t, n as i64) < n as i64 {
        return None;
    }
    let mut by_z: BTreeMap<usize, Vec<Vertex>> = BTreeMap::new();
    for (id, i, j) in arcs {
        if net.flow(id) > 0 {
            by_z.entry(j).or_default().push(points[i]);
        }
    }
    let (gamma, classes) = by_z.into_iter().unzip();
    Some(ZkPartition { classes, gamma, k })
}

/// Index classes `I_1..I_k` of `[kℓ]` (1-based), with injections into Z
/// positions and anchor pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinedPartition {
    pub index_classes: Vec<Vec<usize>>,
    pub betas: Vec<BTreeMap<usize, usize>>,
    /// `None` only when ℓ = 1, where a class has no two indices.
    pub anchors: Vec<Option<(usize, usize)>>,
}

pub fn validate_refined(
    points: &[Vertex],
    z: &[VSet],
    k: usize,
    l: usize,
    r: &RefinedPartition,
) -> std::result::Result<(), String> {
    if r.index_classes.len() != k || r.betas.len() != k || r.anchors.len() != k {
        return Err(format!("expected {k} classes"));
    }
    let mut seen = VSet::new();
    for (j, cls) in r.index_classes.iter().enumerate() {
        if cls.len() != l {
            return Err(format!(
                "I_{} has {} indices, expected {l}",
                j + 1,
                cls.len()
            ));
        }
        let beta = &r.betas[j];
        let keys: Vec<usize> = beta.keys().copied().collect();
        let mut sorted = cls.clone();
        sorted.sort_unstable();
        if keys != sorted {
            return Err(format!("β_{} is not defined on I_{}", j + 1, j + 1));
        }
        let mut img = VSet::new();
        for &i in cls {
            if i == 0 || i > points.len() || !seen.insert(i) {
                return Err(format!("index {i} invalid or repeated"));
            }
            let p = beta[&i];
            if !z.get(p).is_some_and(|zp| zp.contains(points[i - 1])) {
                return Err(format!("w_{i} not in Z[{p}]"));
            }
            if !img.insert(p) {
                return Err(format!("β_{} not injective", j + 1));
            }
        }
    }
    if seen.len() != k * l || seen != (1..=k * l).collect() {
        return Err("classes do not partition [kℓ]".into());
    }
    for j in 0..k {
        match r.anchors[j] {
            None if l == 1 => {}
            None => return Err(format!("anchor of I_{} missing", j + 1)),
            Some((a, b)) => {
                if !(a < b && r.index_classes[j].contains(&a) && r.index_classes[j].contains(&b)) {
                    return Err(format!(
                        "anchor ({a},{b}) of I_{} is not an increasing pair in it",
                        j + 1
                    ));
                }
                let later: Vec<usize> = r.index_classes[j..].iter().flatten().copied().collect();
                if later.iter().any(|&c| a < c && c < b) {
                    return Err(format!(
                        "anchor ({a},{b}) of I_{} has a later index between",
                        j + 1
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Peels off one ℓ-set per capacity level: each set takes a point from every
/// full class and contains two consecutive remaining indices from distinct
/// classes; smallest choices win ties.
pub fn refine_partition(
    points: &[Vertex],
    z: &[VSet],
    k: usize,
    l: usize,
    base: &ZkPartition,
) -> Result<RefinedPartition> {
    if points.len() != k * l || k == 0 || l == 0 {
        return Err(precondition(format!("need exactly kℓ = {} points", k * l)));
    }
    if base.k != k {
        return Err(precondition("partition capacity differs from k"));
    }
    validate_zk_partition(points, z, base).map_err(precondition)?;
    // class id for every index 1..=kℓ
    let mut class_of = vec![usize::MAX; k * l + 1];
    for (i, &v) in points.iter().enumerate() {
        class_of[i + 1] = base.class_of(v).expect("partition covers points");
    }
    let mut remaining: Vec<usize> = (1..=k * l).collect();
    let mut out = RefinedPartition {
        index_classes: vec![],
        betas: vec![],
        anchors: vec![],
    };
    for cap in (1..=k).rev() {
        let mut size = vec![0usize; base.classes.len()];
        for &i in &remaining {
            size[class_of[i]] += 1;
        }
        let full: Vec<usize> = (0..size.len()).filter(|&c| size[c] == cap).collect();
        let (chosen, anchor) = if cap == 1 {
            let a = if l >= 2 {
                Some((remaining[0], remaining[1]))
            } else {
                None
            };
            (remaining.clone(), a)
        } else {
            let pair = remaining
                .windows(2)
                .find(|w| {
                    let (ca, cb) = (class_of[w[0]], class_of[w[1]]);
                    ca != cb && (full.is_empty() || full.contains(&ca) || full.contains(&cb))
                })
                .map(|w| (w[0], w[1]));
            let mut s: Vec<usize> = Vec::with_capacity(l);
            let mut hit = VSet::new();
            if let Some((a, b)) = pair {
                if l >= 2 {
                    s.extend([a, b]);
                    hit.insert(class_of[a]);
                    hit.insert(class_of[b]);
                }
            }
            for &c in &full {
                if !hit.contains(c) {
                    let first = *remaining.iter().find(|&&i| class_of[i] == c).unwrap();
                    s.push(first);
                    hit.insert(c);
                }
            }
            for &i in &remaining {
                if s.len() >= l {
                    break;
                }
                if hit.insert(class_of[i]) {
                    s.push(i);
                }
            }
            if s.len() != l {
                return Err(precondition(
                    "could not select ℓ indices from distinct classes",
                ));
            }
            (s, if l >= 2 { pair } else { None })
        };
        let mut cls = chosen.clone();
        cls.sort_unstable();
        let beta: BTreeMap<usize, usize> =
            cls.iter().map(|&i| (i, base.gamma[class_of[i]])).collect();
        remaining.retain(|i| !cls.contains(i));
        out.index_classes.push(cls);
        out.betas.push(beta);
        out.anchors.push(anchor);
    }
    debug_assert!(validate_refined(points, z, k, l, &out).is_ok());
    Ok(out)
}

/// Vertex-disjoint paths from Z-members to Y, with a (Z,k)-partition of their
/// Z-side ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Linkage {
    pub paths: Vec<Vec<Vertex>>,
    pub partition: ZkPartition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkageOutcome {
    Linkage(Linkage),
    Separation(Separation),
}

pub fn validate_linkage(
    rg: &RootedGraph,
    y: &VSet,
    k: usize,
    order: usize,
    lk: &Linkage,
) -> std::result::Result<(), String> {
    if lk.paths.len() != order {
        return Err(format!("{} paths, expected {order}", lk.paths.len()));
    }
    let mut used = VSet::new();
    let mut starts = Vec::new();
    for (i, p) in lk.paths.iter().enumerate() {
        if p.is_empty() {
            return Err(format!("path {i} is empty"));
        }
        for w in p.windows(2) {
            if !rg.graph.has_edge(w[0], w[1]) {
                return Err(format!("path {i} uses non-edge {:?}", (w[0], w[1])));
            }
        }
        for &v in p {
            if !rg.graph.contains(v) || !used.insert(v) {
                return Err(format!("path {i} repeats or leaves the graph at {v}"));
            }
        }
        if !y.contains(*p.last().unwrap()) {
            return Err(format!("path {i} does not end in Y"));
        }
        starts.push(p[0]);
    }
    if lk.partition.k != k {
        return Err("partition capacity differs from k".into());
    }
    validate_zk_partition(&starts, &rg.z, &lk.partition)
}

/// Checks the separation branch: order below `k(ℓ−‖Z∖A‖)`, `‖Z∖A‖ ≤ ℓ−1` and `Y ⊆ V(B)`.
pub fn validate_linkage_separation(
    rg: &RootedGraph,
    y: &VSet,
    k: usize,
    l: usize,
    sep: &Separation,
) -> std::result::Result<(), String> {
    let order = validate_separation(&rg.graph, sep).map_err(|v| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    })?;
    let outside = sep.z_outside_a(&rg.z);
    if outside + 1 > l {
        return Err(format!("‖Z∖A‖ = {outside} exceeds ℓ−1"));
    }
    if order >= k * (l - outside) {
        return Err(format!(
            "order {order} not below k(ℓ−‖Z∖A‖) = {}",
            k * (l - outside)
        ));
    }
    if !y.is_subset(&sep.b_vertices) {
        return Err("Y is not inside B".into());
    }
    Ok(())
}

/// Either kℓ disjoint Z→Y paths with a (Z,k)-partition of their starts, or a
/// separation certifying that none exist.
pub fn linkage_or_separation(rg: &RootedGraph, y: &VSet, k: usize, l: usize) -> LinkageOutcome {
    let g = &rg.graph;
    let n = g.id_bound();
    let m = rg.z.len();
    // node layout: G vertex v -> (2v, 2v+1); W_i vertex j -> (2(n+ik+j), +1); then s, t
    let wbase = n;
    let total = n + m * k;
    let (s, t) = (2 * total, 2 * total + 1);
    let mut net = FlowNet::new(2 * total + 2);
    let inn = |v: usize| 2 * v;
    let out = |v: usize| 2 * v + 1;
    for v in g.vertices().iter() {
        net.add_arc(inn(v), out(v), 1);
        for u in g.neighbors(v).iter() {
            net.add_arc(out(v), inn(u), INF);
        }
        if y.contains(v) {
            net.add_arc(out(v), t, 1);
        }
    }
    let mut source_arcs = Vec::new();
    for (i, zi) in rg.z.iter().enumerate() {
        for j in 0..k {
            let w = wbase + i * k + j;
            source_arcs.push((net.add_arc(s, inn(w), 1), i, inn(w)));
            net.add_arc(inn(w), out(w), 1);
            for z in zi.iter() {
                net.add_arc(out(w), inn(z), INF);
            }
        }
    }
    let target = (k * l) as i64;
    let f = net.max_flow(s, t, target);
    if f >= target && target > 0 {
        let mut paths = Vec::new();
        let mut owner: BTreeMap<usize, Vec<Vertex>> = BTreeMap::new();
        // Walk each unit of flow; flow decomposition is consumed as we go.
        let flows: Vec<Vec<(usize, usize)>> = (0..net.node_count())
            .map(|u| net.arcs_from(u).collect())
            .collect();
        let mut remaining: BTreeMap<usize, i64> = BTreeMap::new();
        for list in &flows {
            for &(id, _) in list {
                let fl = net.flow(id);
                if fl > 0 {
                    remaining.insert(id, fl);
                }
            }
        }
        for &(sid, i, first) in &source_arcs {
            if remaining.get(&sid).copied().unwrap_or(0) == 0 {
                continue;
            }
            *remaining.get_mut(&sid).unwrap() -= 1;
            let mut cur = first;
            let mut verts = Vec::new();
            while cur != t {
                let (id, nxt) = *flows[cur]
                    .iter()
                    .find(|(id, _)| remaining.get(id).copied().unwrap_or(0) > 0)
                    .expect("flow conservation");
                *remaining.get_mut(&id).unwrap() -= 1;
                if cur % 2 == 1 && cur / 2 < n {
                    verts.push(cur / 2);
                }
                cur = nxt;
            }
            if let Some(p) = verts.iter().position(|&v| y.contains(v)) {
                verts.truncate(p + 1);
            }
            owner.entry(i).or_default().push(verts[0]);
            paths.push(verts);
            if paths.len() == k * l {
                break;
            }
        }
        let (gamma, classes) = owner.into_iter().unzip();
        return LinkageOutcome::Linkage(Linkage {
            paths,
            partition: ZkPartition { classes, gamma, k },
        });
    }
    let reach = net.residual_reach(s);
    let mut a = VSet::new();
    let mut b = VSet::new();
    for v in g.vertices().iter() {
        let source_side = reach[out(v)];
        let cut = reach[inn(v)] && !reach[out(v)];
        if source_side || cut {
            a.insert(v);
        }
        if !source_side {
            b.insert(v);
        }
    }
    let sep = Separation::from_vertex_sets(g, &a, &b).expect("residual cut separates");
    LinkageOutcome::Separation(sep)
}
