//! Minor-model functions, (H,Z,ℓ)-models and pure (H,Z,ℓ)-models.
//!
//! Existence is decided per host component: a model living in a host
//! component can always be grown until it absorbs that component, so an
//! (H,Z,ℓ)-model exists iff the components of H can be distributed over host
//! components, each group forming a minor of its host, with the used hosts
//! meeting at least ℓ members of Z.

use crate::error::{Budget, Result};
use crate::graph::{norm_edge, Edge, Graph, RootedGraph};
use crate::vset::{VSet, Vertex};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Branch sets for the vertices of H and one host edge per edge of H. Edge
/// keys index into `H.edges()`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFunction {
    pub branch_sets: BTreeMap<Vertex, VSet>,
    pub branch_edges: BTreeMap<usize, Edge>,
}

impl ModelFunction {
    pub fn image(&self) -> VSet {
        let mut out = VSet::new();
        for s in self.branch_sets.values() {
            out.union_with(s);
        }
        out
    }

    /// Fills `branch_edges` with the smallest host edge between the ends'
    /// branch sets, for every edge of `h` with both ends in the domain.
    pub fn attach_edges(&mut self, g: &Graph, h: &Graph) {
        self.branch_edges.clear();
        for (i, (a, b)) in h.edges().into_iter().enumerate() {
            if let (Some(sa), Some(sb)) = (self.branch_sets.get(&a), self.branch_sets.get(&b)) {
                if let Some((u, v)) = g.edge_between(sa, sb) {
                    self.branch_edges.insert(i, norm_edge(u, v));
                }
            }
        }
    }

    /// Absorbs every vertex of `target` reachable from the image through
    /// `target`, attaching each to the smallest adjacent branch set.
    pub fn grow_into(&mut self, g: &Graph, h: &Graph, target: &VSet) {
        let mut used = self.image();
        loop {
            let mut progressed = false;
            let keys: Vec<Vertex> = self.branch_sets.keys().copied().collect();
            for hv in keys {
                let set = self.branch_sets[&hv].clone();
                let add = g.boundary(&set).intersection(target).difference(&used);
                if !add.is_empty() {
                    used.union_with(&add);
                    self.branch_sets.get_mut(&hv).unwrap().union_with(&add);
                    progressed = true;
                }
            }
            if !progressed {
                break;
            }
        }
        self.attach_edges(g, h);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelViolation {
    MissingBranchSet(Vertex),
    UnexpectedBranchSet(Vertex),
    EmptyBranchSet(Vertex),
    OutsideHost(Vertex),
    Disconnected(Vertex),
    NotDisjoint(Vertex, Vertex),
    MissingBranchEdge(usize),
    UnexpectedBranchEdge(usize),
    NotAnEdge(usize),
    EdgeEndMismatch(usize),
    EdgesNotDistinct(usize, usize),
}

impl fmt::Display for ModelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ModelViolation::*;
        match self {
            MissingBranchSet(v) => write!(f, "no branch set for H-vertex {v}"),
            UnexpectedBranchSet(v) => {
                write!(f, "branch set given for {v}, which is not in the pattern")
            }
            EmptyBranchSet(v) => write!(f, "branch set of {v} is empty"),
            OutsideHost(v) => write!(f, "branch set of {v} leaves the host graph"),
            Disconnected(v) => write!(f, "branch set of {v} is not connected"),
            NotDisjoint(a, b) => write!(f, "branch sets not disjoint ({a} and {b})"),
            MissingBranchEdge(e) => write!(f, "no branch edge for H-edge {e}"),
            UnexpectedBranchEdge(e) => write!(f, "branch edge given for unknown H-edge {e}"),
            NotAnEdge(e) => write!(f, "branch edge of H-edge {e} is not an edge of G"),
            EdgeEndMismatch(e) => write!(
                f,
                "branch edge of H-edge {e} does not join its ends' branch sets"
            ),
            EdgesNotDistinct(a, b) => write!(f, "H-edges {a} and {b} share a branch edge"),
        }
    }
}

pub fn validate_model_function(
    g: &Graph,
    h: &Graph,
    eta: &ModelFunction,
) -> std::result::Result<(), ModelViolation> {
    validate_model_on(g, h, h.vertices(), eta)
}

/// Validates `eta` as a model of `H[hverts]`, keeping the edge indexing of H.
pub fn validate_model_on(
    g: &Graph,
    h: &Graph,
    hverts: &VSet,
    eta: &ModelFunction,
) -> std::result::Result<(), ModelViolation> {
    use ModelViolation::*;
    for v in hverts.iter() {
        if !eta.branch_sets.contains_key(&v) {
            return Err(MissingBranchSet(v));
        }
    }
    if let Some(&v) = eta.branch_sets.keys().find(|v| !hverts.contains(**v)) {
        return Err(UnexpectedBranchSet(v));
    }
    for (&v, s) in &eta.branch_sets {
        if s.is_empty() {
            return Err(EmptyBranchSet(v));
        }
        if !s.is_subset(g.vertices()) {
            return Err(OutsideHost(v));
        }
        if !g.is_connected_set(s) {
            return Err(Disconnected(v));
        }
    }
    let sets: Vec<(&Vertex, &VSet)> = eta.branch_sets.iter().collect();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if sets[i].1.intersects(sets[j].1) {
                return Err(NotDisjoint(*sets[i].0, *sets[j].0));
            }
        }
    }
    let h_edges = h.edges();
    let wanted: Vec<usize> = (0..h_edges.len())
        .filter(|&i| hverts.contains(h_edges[i].0) && hverts.contains(h_edges[i].1))
        .collect();
    for &i in &wanted {
        let Some(&(u, v)) = eta.branch_edges.get(&i) else {
            return Err(MissingBranchEdge(i));
        };
        if !g.has_edge(u, v) {
            return Err(NotAnEdge(i));
        }
        let (a, b) = h_edges[i];
        let (sa, sb) = (&eta.branch_sets[&a], &eta.branch_sets[&b]);
        if !((sa.contains(u) && sb.contains(v)) || (sa.contains(v) && sb.contains(u))) {
            return Err(EdgeEndMismatch(i));
        }
    }
    if let Some(&e) = eta.branch_edges.keys().find(|e| !wanted.contains(e)) {
        return Err(UnexpectedBranchEdge(e));
    }
    let mut seen: BTreeMap<Edge, usize> = BTreeMap::new();
    for (&i, &(u, v)) in &eta.branch_edges {
        if let Some(&j) = seen.get(&norm_edge(u, v)) {
            return Err(EdgesNotDistinct(j, i));
        }
        seen.insert(norm_edge(u, v), i);
    }
    Ok(())
}

/// Number of nonempty members of `z` meeting `f`.
pub fn hits_count(f: &VSet, z: &[VSet]) -> usize {
    z.iter().filter(|x| x.intersects(f)).count()
}

/// Positions of members of `z` meeting `f`.
pub fn hit_positions(f: &VSet, z: &[VSet]) -> VSet {
    z.iter()
        .enumerate()
        .filter(|(_, x)| x.intersects(f))
        .map(|(i, _)| i)
        .collect()
}

/// A model of some components of H with disjoint Z-assignments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PureModelWitness {
    /// Indices into the component list of H (ordered by smallest vertex).
    pub component_subset: Vec<usize>,
    pub model: ModelFunction,
    /// Component index to the Z positions assigned to it.
    pub alpha: BTreeMap<usize, Vec<usize>>,
}

/// Either kind of model found by the searches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelWitness {
    Pure(PureModelWitness),
    Ordinary(ModelFunction),
}

impl ModelWitness {
    pub fn image(&self) -> VSet {
        match self {
            ModelWitness::Ordinary(m) => m.image(),
            ModelWitness::Pure(p) => p.model.image(),
        }
    }

    pub fn model(&self) -> &ModelFunction {
        match self {
            ModelWitness::Ordinary(m) => m,
            ModelWitness::Pure(p) => &p.model,
        }
    }
}

/// Checks every clause of a pure witness, returning a description of the
/// first failure.
pub fn validate_pure_witness(
    g: &Graph,
    z: &[VSet],
    h: &Graph,
    l: usize,
    w: &PureModelWitness,
) -> std::result::Result<(), String> {
    let comps = h.components();
    if w.component_subset.is_empty() {
        return Err("empty component subset".into());
    }
    if w.component_subset.len() > l {
        return Err(format!(
            "{} components used but ℓ = {l}",
            w.component_subset.len()
        ));
    }
    let mut hverts = VSet::new();
    for &c in &w.component_subset {
        let comp = comps
            .get(c)
            .ok_or_else(|| format!("component index {c} out of range"))?;
        hverts.union_with(comp);
    }
    validate_model_on(g, h, &hverts, &w.model).map_err(|e| e.to_string())?;
    let keys: Vec<usize> = w.alpha.keys().copied().collect();
    let mut sorted = w.component_subset.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if keys != sorted || sorted.len() != w.component_subset.len() {
        return Err("α is not defined exactly on the component subset".into());
    }
    let mut used = VSet::new();
    for (&c, members) in &w.alpha {
        if members.is_empty() {
            return Err(format!("α({c}) is empty"));
        }
        let img: VSet = comps[c]
            .iter()
            .fold(VSet::new(), |acc, v| acc.union(&w.model.branch_sets[&v]));
        for &p in members {
            let zp = z
                .get(p)
                .ok_or_else(|| format!("Z position {p} out of range"))?;
            if zp.is_empty() || !zp.intersects(&img) {
                return Err(format!(
                    "Z[{p}] assigned to component {c} but not met by it"
                ));
            }
            if !used.insert(p) {
                return Err(format!("Z[{p}] assigned twice"));
            }
        }
    }
    if used.len() != l {
        return Err(format!(
            "α covers {} members, expected exactly {l}",
            used.len()
        ));
    }
    Ok(())
}

/// Pattern graph with its components and a BFS vertex order per component.
#[derive(Clone, Debug)]
pub struct Pattern {
    pub graph: Graph,
    pub comps: Vec<VSet>,
    orders: Vec<Vec<Vertex>>,
    comp_edges: Vec<usize>,
    comp_cyclic: Vec<bool>,
}

impl Pattern {
    pub fn new(h: &Graph) -> Self {
        let comps = h.components();
        let orders = comps
            .iter()
            .map(|c| h.bfs_order(c.first().unwrap(), c))
            .collect();
        let comp_edges: Vec<usize> = comps
            .iter()
            .map(|c| {
                c.iter()
                    .map(|v| h.neighbors(v).intersection_len(c))
                    .sum::<usize>()
                    / 2
            })
            .collect();
        let comp_cyclic = comps
            .iter()
            .zip(&comp_edges)
            .map(|(c, &e)| e >= c.len())
            .collect();
        Pattern {
            graph: h.clone(),
            comps,
            orders,
            comp_edges,
            comp_cyclic,
        }
    }

    pub fn component_count(&self) -> usize {
        self.comps.len()
    }

    pub fn is_edgeless(&self) -> bool {
        self.comp_edges.iter().all(|&e| e == 0)
    }
}

/// Exact minor search inside one host vertex set.
pub struct MinorSearch<'a> {
    g: &'a Graph,
    pat: &'a Pattern,
    budget: &'a mut Budget,
    cache: FxHashMap<(VSet, u64), Option<BTreeMap<Vertex, VSet>>>,
}

impl<'a> MinorSearch<'a> {
    pub fn new(g: &'a Graph, pat: &'a Pattern, budget: &'a mut Budget) -> Self {
        MinorSearch {
            g,
            pat,
            budget,
            cache: FxHashMap::default(),
        }
    }

    /// Branch sets realising the components in `group` (bitmask over
    /// component indices) inside `G[host]`, or `None`.
    pub fn embed(&mut self, host: &VSet, group: u64) -> Result<Option<BTreeMap<Vertex, VSet>>> {
        if group == 0 {
            return Ok(Some(BTreeMap::new()));
        }
        let key = (host.clone(), group);
        if let Some(r) = self.cache.get(&key) {
            return Ok(r.clone());
        }
        let r = self.embed_uncached(host, group)?;
        self.cache.insert(key, r.clone());
        Ok(r)
    }

    fn embed_uncached(
        &mut self,
        host: &VSet,
        group: u64,
    ) -> Result<Option<BTreeMap<Vertex, VSet>>> {
        let idx: Vec<usize> = (0..self.pat.comps.len())
            .filter(|i| group >> i & 1 == 1)
            .collect();
        let nverts: usize = idx.iter().map(|&i| self.pat.comps[i].len()).sum();
        let nedges: usize = idx.iter().map(|&i| self.pat.comp_edges[i]).sum();
        let host_edges: usize = host
            .iter()
            .map(|v| self.g.neighbors(v).intersection_len(host))
            .sum::<usize>()
            / 2;
        if nverts > host.len() || nedges > host_edges {
            return Ok(None);
        }
        if idx.iter().any(|&i| self.pat.comp_cyclic[i]) {
            let forest = self.g.components_in(host).iter().all(|c| {
                let e: usize = c
                    .iter()
                    .map(|v| self.g.neighbors(v).intersection_len(c))
                    .sum::<usize>()
                    / 2;
                e + 1 == c.len()
            });
            if forest {
                return Ok(None);
            }
        }
        let order: Vec<Vertex> = idx
            .iter()
            .flat_map(|&i| self.pat.orders[i].iter().copied())
            .collect();
        let mut st = EmbedState {
            g: self.g,
            h: &self.pat.graph,
            order: &order,
            host,
            sets: Vec::with_capacity(order.len()),
            used: VSet::new(),
            budget: self.budget,
        };
        for total in order.len()..=host.len() {
            if st.dfs(0, total)? {
                return Ok(Some(
                    order.iter().copied().zip(st.sets.iter().cloned()).collect(),
                ));
            }
        }
        Ok(None)
    }
}

struct EmbedState<'s> {
    g: &'s Graph,
    h: &'s Graph,
    order: &'s [Vertex],
    host: &'s VSet,
    sets: Vec<VSet>,
    used: VSet,
    budget: &'s mut Budget,
}

impl EmbedState<'_> {
    /// Tries to place `order[i..]` using at most `room` further host vertices.
    fn dfs(&mut self, i: usize, room: usize) -> Result<bool> {
        if i == self.order.len() {
            return Ok(true);
        }
        let later = self.order.len() - i - 1;
        if room < later + 1 {
            return Ok(false);
        }
        let hv = self.order[i];
        let earlier: Vec<usize> = (0..i)
            .filter(|&j| self.h.has_edge(hv, self.order[j]))
            .collect();
        let free = self.host.difference(&self.used);
        let candidates = match earlier.first() {
            Some(&j) => self.g.boundary(&self.sets[j]).intersection(&free),
            None => free.clone(),
        };
        let max_size = room - later;
        for r in candidates.iter() {
            let mut allowed = free.clone();
            for c in candidates.iter().take_while(|&c| c < r) {
                allowed.remove(c);
            }
            let ext = self.g.neighbors(r).intersection(&allowed);
            let mut found = false;
            let mut forb = VSet::singleton(r);
            self.grow(
                VSet::singleton(r),
                ext,
                &mut forb,
                &allowed,
                max_size,
                i,
                room,
                &earlier,
                &mut found,
            )?;
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }

    #[allow(clippy::too_many_arguments)]
    fn grow(
        &mut self,
        set: VSet,
        mut ext: VSet,
        forb: &mut VSet,
        allowed: &VSet,
        max_size: usize,
        i: usize,
        room: usize,
        earlier: &[usize],
        found: &mut bool,
    ) -> Result<()> {
        self.budget.tick(1)?;
        let adjacent_to_all = earlier.iter().all(|&j| {
            let b = self.g.boundary(&self.sets[j]);
            b.intersects(&set)
        });
        if adjacent_to_all {
            self.used.union_with(&set);
            self.sets.push(set.clone());
            let ok = self.dfs(i + 1, room - set.len())?;
            if ok {
                *found = true;
                return Ok(());
            }
            self.sets.pop();
            self.used.difference_with(&set);
        }
        if set.len() == max_size {
            return Ok(());
        }
        let saved = forb.clone();
        ext.difference_with(forb);
        while let Some(u) = ext.first() {
            ext.remove(u);
            let mut next = set.clone();
            next.insert(u);
            forb.insert(u);
            let mut next_ext = ext.union(self.g.neighbors(u));
            next_ext.intersect_with(allowed);
            next_ext.difference_with(forb);
            next_ext.difference_with(&next);
            // `forb` now also blocks `u` for later siblings; children see it too,
            // which is harmless because `u` is already in `next`.
            let mut child_forb = forb.clone();
            self.grow(
                next,
                next_ext,
                &mut child_forb,
                allowed,
                max_size,
                i,
                room,
                earlier,
                found,
            )?;
            if *found {
                *forb = saved;
                return Ok(());
            }
        }
        *forb = saved;
        Ok(())
    }
}

/// Host components of `G[allowed]` with the Z positions each one meets.
fn host_components(g: &Graph, z: &[VSet], allowed: &VSet) -> Vec<(VSet, VSet)> {
    g.components_in(allowed)
        .into_iter()
        .map(|c| {
            let hits = hit_positions(&c, z);
            (c, hits)
        })
        .collect()
}

/// Maximum matching size between `sides` and Z positions (Kuhn).
fn sdr_matching(sides: &[&VSet]) -> Vec<Option<usize>> {
    fn try_assign(
        i: usize,
        sides: &[&VSet],
        owner: &mut FxHashMap<usize, usize>,
        seen: &mut VSet,
        choice: &mut [Option<usize>],
    ) -> bool {
        for p in sides[i].iter() {
            if seen.insert(p) {
                let free = match owner.get(&p) {
                    None => true,
                    Some(&o) => try_assign(o, sides, owner, seen, choice),
                };
                if free {
                    owner.insert(p, i);
                    choice[i] = Some(p);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = FxHashMap::default();
    let mut choice = vec![None; sides.len()];
    for i in 0..sides.len() {
        let mut seen = VSet::new();
        try_assign(i, sides, &mut owner, &mut seen, &mut choice);
    }
    choice
}

/// Decides and constructs models inside induced subgraphs of a rooted graph.
pub struct ModelOracle<'a> {
    pub rg: &'a RootedGraph,
    pub pat: &'a Pattern,
    pub l: usize,
    pub pure: bool,
    pub budget: Budget,
    embed_cache: FxHashMap<(VSet, u64), bool>,
    exists_cache: FxHashMap<VSet, bool>,
}

impl<'a> ModelOracle<'a> {
    pub fn new(
        rg: &'a RootedGraph,
        pat: &'a Pattern,
        l: usize,
        pure: bool,
        budget: Budget,
    ) -> Self {
        ModelOracle {
            rg,
            pat,
            l,
            pure,
            budget,
            embed_cache: FxHashMap::default(),
            exists_cache: FxHashMap::default(),
        }
    }

    fn embeds(&mut self, host: &VSet, group: u64) -> Result<bool> {
        if let Some(&b) = self.embed_cache.get(&(host.clone(), group)) {
            return Ok(b);
        }
        let r = MinorSearch::new(&self.rg.graph, self.pat, &mut self.budget)
            .embed(host, group)?
            .is_some();
        self.embed_cache.insert((host.clone(), group), r);
        Ok(r)
    }

    /// Whether `G[allowed]` has a model of the configured kind.
    pub fn exists(&mut self, allowed: &VSet) -> Result<bool> {
        if let Some(&b) = self.exists_cache.get(allowed) {
            return Ok(b);
        }
        let r = self.plan(allowed)?.is_some();
        if self.exists_cache.len() > 1 << 20 {
            self.exists_cache.clear();
        }
        self.exists_cache.insert(allowed.clone(), r);
        Ok(r)
    }

    /// A model inside `G[allowed]`, grown to fill the host components it uses.
    pub fn find(&mut self, allowed: &VSet) -> Result<Option<ModelWitness>> {
        let Some(plan) = self.plan(allowed)? else {
            return Ok(None);
        };
        let g = &self.rg.graph;
        let h = &self.pat.graph;
        let mut model = ModelFunction::default();
        let mut search = MinorSearch::new(g, self.pat, &mut self.budget);
        for (host, group) in &plan.groups {
            let sets = search.embed(host, *group)?.expect("planned group embeds");
            let mut part = ModelFunction {
                branch_sets: sets,
                branch_edges: BTreeMap::new(),
            };
            part.grow_into(g, h, host);
            model.branch_sets.extend(part.branch_sets);
        }
        model.attach_edges(g, h);
        if !self.pure {
            return Ok(Some(ModelWitness::Ordinary(model)));
        }
        let alpha = plan.alpha.expect("pure plan carries α");
        Ok(Some(ModelWitness::Pure(PureModelWitness {
            component_subset: plan
                .groups
                .iter()
                .map(|(_, gm)| gm.trailing_zeros() as usize)
                .collect(),
            model,
            alpha,
        })))
    }

    /// An inclusion-minimal vertex set inside `allowed` whose induced
    /// subgraph still has a model, or `None`.
    pub fn minimal_model_set(&mut self, allowed: &VSet) -> Result<Option<VSet>> {
        if !self.exists(allowed)? {
            return Ok(None);
        }
        // Shortest prefix of a BFS order from a Z vertex that already works.
        let g = &self.rg.graph;
        let start = self
            .rg
            .z
            .iter()
            .find_map(|x| x.intersection(allowed).first())
            .or(allowed.first());
        let mut order = Vec::new();
        let mut seen = VSet::new();
        if let Some(s) = start {
            order = g.bfs_order(s, allowed);
            seen = order.iter().collect();
        }
        order.extend(allowed.difference(&seen).iter());
        let (mut lo, mut hi) = (1usize, order.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            let pre: VSet = order[..mid].iter().collect();
            if self.exists(&pre)? {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let mut cur: VSet = order[..lo].iter().collect();
        for &v in order[..lo].iter().rev() {
            let mut t = cur.clone();
            t.remove(v);
            if self.exists(&t)? {
                cur = t;
            }
        }
        Ok(Some(cur))
    }

    fn plan(&mut self, allowed: &VSet) -> Result<Option<Plan>> {
        let hosts = host_components(&self.rg.graph, &self.rg.z, allowed);
        let mut all_hits = VSet::new();
        for (_, hits) in &hosts {
            all_hits.union_with(hits);
        }
        if self.l == 0 || all_hits.len() < self.l || self.pat.comps.is_empty() {
            return Ok(None);
        }
        if self.pure {
            self.plan_pure(&hosts)
        } else {
            self.plan_ordinary(&hosts)
        }
    }

    fn plan_ordinary(&mut self, hosts: &[(VSet, VSet)]) -> Result<Option<Plan>> {
        let t = self.pat.comps.len();
        let mut assign = vec![usize::MAX; t];
        let mut groups = vec![0u64; hosts.len()];
        if self.assign_ordinary(0, hosts, &mut assign, &mut groups)? {
            let mut out = Vec::new();
            for (hi, &gm) in groups.iter().enumerate() {
                if gm != 0 {
                    out.push((hosts[hi].0.clone(), gm));
                }
            }
            return Ok(Some(Plan {
                groups: out,
                alpha: None,
            }));
        }
        Ok(None)
    }

    fn assign_ordinary(
        &mut self,
        c: usize,
        hosts: &[(VSet, VSet)],
        assign: &mut [usize],
        groups: &mut [u64],
    ) -> Result<bool> {
        if c == assign.len() {
            let mut hits = VSet::new();
            for (hi, &gm) in groups.iter().enumerate() {
                if gm != 0 {
                    hits.union_with(&hosts[hi].1);
                }
            }
            if hits.len() < self.l {
                return Ok(false);
            }
            for (hi, &gm) in groups.iter().enumerate() {
                if gm != 0 && !self.embeds(&hosts[hi].0, gm)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let need = self.pat.comps[c].len();
        for hi in 0..hosts.len() {
            self.budget.tick(1)?;
            let cur = groups[hi];
            let used: usize = (0..assign.len())
                .filter(|i| cur >> i & 1 == 1)
                .map(|i| self.pat.comps[i].len())
                .sum();
            if used + need > hosts[hi].0.len() {
                continue;
            }
            groups[hi] |= 1 << c;
            if self.embeds(&hosts[hi].0, groups[hi])? {
                assign[c] = hi;
                if self.assign_ordinary(c + 1, hosts, assign, groups)? {
                    return Ok(true);
                }
            }
            groups[hi] = cur;
        }
        Ok(false)
    }

    fn plan_pure(&mut self, hosts: &[(VSet, VSet)]) -> Result<Option<Plan>> {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut used_hosts = VSet::new();
        if let Some(pairs) = self.assign_pure(0, hosts, &mut pairs, &mut used_hosts)? {
            let sides: Vec<&VSet> = pairs.iter().map(|&(_, hi)| &hosts[hi].1).collect();
            let matched = sdr_matching(&sides);
            let mut alpha: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            let mut taken = VSet::new();
            for (i, &(c, _)) in pairs.iter().enumerate() {
                let p = matched[i].expect("plan has an SDR");
                alpha.insert(c, vec![p]);
                taken.insert(p);
            }
            let mut extra = self.l - pairs.len();
            for &(c, hi) in &pairs {
                for p in hosts[hi].1.iter() {
                    if extra == 0 {
                        break;
                    }
                    if taken.insert(p) {
                        alpha.get_mut(&c).unwrap().push(p);
                        extra -= 1;
                    }
                }
            }
            for v in alpha.values_mut() {
                v.sort_unstable();
            }
            let groups = pairs
                .iter()
                .map(|&(c, hi)| (hosts[hi].0.clone(), 1u64 << c))
                .collect();
            return Ok(Some(Plan {
                groups,
                alpha: Some(alpha),
            }));
        }
        Ok(None)
    }

    fn assign_pure(
        &mut self,
        c: usize,
        hosts: &[(VSet, VSet)],
        pairs: &mut Vec<(usize, usize)>,
        used_hosts: &mut VSet,
    ) -> Result<Option<Vec<(usize, usize)>>> {
        if !pairs.is_empty() && pairs.len() <= self.l {
            let sides: Vec<&VSet> = pairs.iter().map(|&(_, hi)| &hosts[hi].1).collect();
            let mut union = VSet::new();
            for s in &sides {
                union.union_with(s);
            }
            if union.len() >= self.l && sdr_matching(&sides).iter().all(|m| m.is_some()) {
                return Ok(Some(pairs.clone()));
            }
        }
        if c == self.pat.comps.len() || pairs.len() == self.l {
            return Ok(None);
        }
        for hi in 0..hosts.len() {
            if used_hosts.contains(hi) || hosts[hi].1.is_empty() {
                continue;
            }
            self.budget.tick(1)?;
            if self.embeds(&hosts[hi].0, 1 << c)? {
                pairs.push((c, hi));
                used_hosts.insert(hi);
                if let Some(p) = self.assign_pure(c + 1, hosts, pairs, used_hosts)? {
                    return Ok(Some(p));
                }
                pairs.pop();
                used_hosts.remove(hi);
            }
        }
        self.assign_pure(c + 1, hosts, pairs, used_hosts)
    }
}

struct Plan {
    groups: Vec<(VSet, u64)>,
    alpha: Option<BTreeMap<usize, Vec<usize>>>,
}

/// An (H,Z,ℓ)-model of `G`, or `None`.
pub fn find_hzl_model(
    rg: &RootedGraph,
    h: &Graph,
    l: usize,
    budget: Budget,
) -> Result<Option<ModelFunction>> {
    let pat = Pattern::new(h);
    let mut o = ModelOracle::new(rg, &pat, l, false, budget);
    Ok(o.find(rg.graph.vertices())?.map(|w| w.model().clone()))
}

/// A pure (H,Z,ℓ)-model of `G`, or `None`.
pub fn find_pure_model(
    rg: &RootedGraph,
    h: &Graph,
    l: usize,
    budget: Budget,
) -> Result<Option<PureModelWitness>> {
    let pat = Pattern::new(h);
    let mut o = ModelOracle::new(rg, &pat, l, true, budget);
    Ok(o.find(rg.graph.vertices())?.map(|w| match w {
        ModelWitness::Pure(p) => p,
        ModelWitness::Ordinary(_) => unreachable!(),
    }))
}

/// Named small patterns: `K<n>`, `P<n>`, `C<n>`, and `<t>K1`-style
/// disjoint copies such as `2K1` or `3K2`.
pub fn pattern_preset(name: &str) -> Option<Graph> {
    let (copies, base) = match name.find(|c: char| c.is_ascii_alphabetic()) {
        Some(0) => (1, name),
        Some(i) => (name[..i].parse().ok()?, &name[i..]),
        None => return None,
    };
    let kind = base.chars().next()?;
    let n: usize = base[1..].parse().ok()?;
    if n == 0 || copies == 0 {
        return None;
    }
    let mut edges = Vec::new();
    match kind {
        'K' => {
            for u in 0..n {
                for v in u + 1..n {
                    edges.push((u, v));
                }
            }
        }
        'P' => edges.extend((1..n).map(|v| (v - 1, v))),
        'C' if n >= 3 => {
            edges.extend((1..n).map(|v| (v - 1, v)));
            edges.push((0, n - 1));
        }
        _ => return None,
    }
    let all: Vec<Edge> = (0..copies)
        .flat_map(|c| edges.iter().map(move |&(u, v)| (u + c * n, v + c * n)))
        .collect();
    Graph::from_edges(n * copies, &all).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::grid_graph;

    fn vs(v: &[usize]) -> VSet {
        v.iter().collect()
    }

    fn path3() -> RootedGraph {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        RootedGraph::new(g, vec![vs(&[0]), vs(&[2])]).unwrap()
    }

    #[test]
    fn validator_clauses() {
        let k1 = pattern_preset("K1").unwrap();
        let k2 = pattern_preset("K2").unwrap();
        let g = k2.clone();
        let single = ModelFunction {
            branch_sets: [(0, vs(&[1]))].into(),
            branch_edges: BTreeMap::new(),
        };
        assert_eq!(validate_model_function(&g, &k1, &single), Ok(()));
        let mut id = ModelFunction {
            branch_sets: [(0, vs(&[0])), (1, vs(&[1]))].into(),
            branch_edges: BTreeMap::new(),
        };
        assert_eq!(
            validate_model_function(&g, &k2, &id),
            Err(ModelViolation::MissingBranchEdge(0))
        );
        id.attach_edges(&g, &k2);
        assert_eq!(validate_model_function(&g, &k2, &id), Ok(()));
        let overlap = ModelFunction {
            branch_sets: [(0, vs(&[0, 1])), (1, vs(&[1]))].into(),
            branch_edges: [(0, (0, 1))].into(),
        };
        let err = validate_model_function(&g, &k2, &overlap).unwrap_err();
        assert!(err.to_string().starts_with("branch sets not disjoint"));
        let p = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let gap = ModelFunction {
            branch_sets: [(0, vs(&[0, 2]))].into(),
            branch_edges: BTreeMap::new(),
        };
        assert_eq!(
            validate_model_function(&p, &k1, &gap),
            Err(ModelViolation::Disconnected(0))
        );
    }

    #[test]
    fn path_example() {
        let rg = path3();
        let k1 = pattern_preset("K1").unwrap();
        let m = find_hzl_model(&rg, &k1, 2, Budget::default())
            .unwrap()
            .unwrap();
        assert_eq!(m.image(), vs(&[0, 1, 2]));
        assert!(find_hzl_model(&rg, &k1, 3, Budget::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn hits() {
        let z = vec![vs(&[0]), vs(&[0]), VSet::new(), vs(&[4])];
        assert_eq!(hits_count(&VSet::new(), &z), 0);
        assert_eq!(hits_count(&vs(&[0, 1, 2, 3, 4]), &z), 3);
        assert_eq!(hits_count(&vs(&[4]), &z), 1);
    }

    #[test]
    fn pure_connected_matches_ordinary() {
        let gg = grid_graph(3, 3).unwrap();
        let g = gg.graph.remove_vertices(&vs(&[4]));
        let rg = RootedGraph::new(g, vec![vs(&[0]), vs(&[8]), vs(&[2, 6])]).unwrap();
        for name in ["K1", "K2", "P3", "C4", "K3"] {
            let h = pattern_preset(name).unwrap();
            for l in 1..=3 {
                let a = find_hzl_model(&rg, &h, l, Budget::default()).unwrap();
                let b = find_pure_model(&rg, &h, l, Budget::default()).unwrap();
                assert_eq!(a.is_some(), b.is_some(), "{name} ℓ={l}");
                if let Some(m) = a {
                    validate_model_function(&rg.graph, &h, &m).unwrap();
                    assert!(hits_count(&m.image(), &rg.z) >= l);
                }
                if let Some(w) = b {
                    validate_pure_witness(&rg.graph, &rg.z, &h, l, &w).unwrap();
                }
            }
        }
    }

    #[test]
    fn pure_two_components_on_path() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let rg = RootedGraph::new(g, vec![vs(&[0]), vs(&[1]), vs(&[2])]).unwrap();
        let h = pattern_preset("2K2").unwrap();
        let w = find_pure_model(&rg, &h, 3, Budget::default())
            .unwrap()
            .unwrap();
        validate_pure_witness(&rg.graph, &rg.z, &h, 3, &w).unwrap();
        assert!(w.component_subset.len() <= 3);
        let h3 = pattern_preset("2K3").unwrap();
        assert!(find_pure_model(&rg, &h3, 3, Budget::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn presets() {
        assert_eq!(pattern_preset("C4").unwrap().edge_count(), 4);
        assert_eq!(pattern_preset("2K1").unwrap().vertex_count(), 2);
        assert_eq!(pattern_preset("P3").unwrap().edge_count(), 2);
        assert!(pattern_preset("X3").is_none());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let gg = grid_graph(4, 4).unwrap();
        let rg = RootedGraph::new(gg.graph.clone(), vec![gg.graph.vertices().clone()]).unwrap();
        let k5 = pattern_preset("K5").unwrap();
        let r = find_hzl_model(&rg, &k5, 1, Budget::new(50));
        assert!(matches!(r, Err(crate::EpError::BudgetExceeded { .. })));
    }
}
