use super::separate::{
    find_irrelevant_vertex, reduce_across_separation, separate_or_models, SeparateOutcome,
    SeparationBranch,
};
use super::{EngineConfig, Thresholds};
use crate::error::{precondition, EpError, Result};
use crate::graph::{subtract_multiset, Graph, RootedGraph};
use crate::minor_model::{
    hits_count, validate_model_function, validate_pure_witness, ModelOracle, ModelWitness, Pattern,
};
use crate::pack_cover::{DualityReport, Status};
use crate::rooted_grid::{models_from_rooted_grid, restrict_grid_model, GridModel, Variant};
use crate::treewidth::{
    bounded_tw_pack_or_hit, exact_treewidth, min_degree_decomposition, ModelsOrDeletion,
    TreeDecomposition,
};
use crate::vset::VSet;
use crate::Budget;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Packing(Vec<ModelWitness>),
    Deletion(VSet),
}

/// One branch decision, emitted as a JSON line by the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub depth: usize,
    pub branch: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_prime: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineReport {
    pub report: DualityReport,
    /// Branch that produced the top-level answer.
    pub branch: String,
    pub thresholds: Thresholds,
    pub trace: Vec<TraceEvent>,
}

/// Re-checks an outcome from scratch: `k` pairwise disjoint valid models each
/// meeting ℓ members, or a set whose deletion leaves no model.
pub fn certify_outcome(
    rg: &RootedGraph,
    h: &Graph,
    l: usize,
    k: usize,
    pure: bool,
    out: &Outcome,
    budget: Budget,
) -> std::result::Result<String, String> {
    let g = &rg.graph;
    match out {
        Outcome::Packing(ws) => {
            if ws.len() < k {
                return Err(format!("{} models, expected {k}", ws.len()));
            }
            let mut used = VSet::new();
            for (i, w) in ws.iter().enumerate() {
                match (pure, w) {
                    (true, ModelWitness::Pure(p)) => validate_pure_witness(g, &rg.z, h, l, p)?,
                    (true, ModelWitness::Ordinary(_)) => {
                        return Err(format!("model {i} is not pure"))
                    }
                    (false, _) => {
                        validate_model_function(g, h, w.model())
                            .map_err(|e| format!("model {i}: {e}"))?;
                        let hits = hits_count(&w.image(), &rg.z);
                        if hits < l {
                            return Err(format!("model {i} meets {hits} members"));
                        }
                    }
                }
                let img = w.image();
                if img.intersects(&used) {
                    return Err(format!("model {i} overlaps an earlier one"));
                }
                used.union_with(&img);
            }
            Ok(format!("{} disjoint models validated", ws.len()))
        }
        Outcome::Deletion(s) => {
            if !s.is_subset(g.vertices()) {
                return Err("deletion set leaves the graph".into());
            }
            let pat = Pattern::new(h);
            let mut oracle = ModelOracle::new(rg, &pat, l, pure, budget);
            match oracle.exists(&g.vertices().difference(s)) {
                Ok(false) => Ok(format!("no model survives deleting {} vertices", s.len())),
                Ok(true) => Err("a model survives the deletion set".into()),
                Err(e) => Err(e.to_string()),
            }
        }
    }
}

struct Ctx<'c> {
    cfg: &'c EngineConfig,
    trace: Vec<TraceEvent>,
}

impl Ctx<'_> {
    fn budget(&self) -> Budget {
        Budget::new(self.cfg.budget)
    }

    fn event(
        &mut self,
        depth: usize,
        branch: &str,
        order: Option<usize>,
        l_prime: Option<usize>,
        cert: Option<String>,
    ) {
        self.trace.push(TraceEvent {
            depth,
            branch: branch.into(),
            order,
            l_prime,
            certificate: cert,
        });
    }

    #[allow(clippy::too_many_arguments)]
    fn solve(
        &mut self,
        rg: &RootedGraph,
        h: &Graph,
        l: usize,
        k: usize,
        pure: bool,
        grid: Option<&GridModel>,
        td: Option<&TreeDecomposition>,
        depth: usize,
    ) -> Result<(Outcome, String)> {
        if let Some(m) = grid.filter(|_| depth < self.cfg.max_depth) {
            match self.grid_route(rg, h, l, k, pure, m, depth) {
                Ok((out, branch)) => {
                    match certify_outcome(rg, h, l, k, pure, &out, self.budget()) {
                        Ok(c) => {
                            self.event(depth, &branch, None, None, Some(c));
                            return Ok((out, branch));
                        }
                        Err(e) => self.event(depth, "grid_route_uncertified", None, None, Some(e)),
                    }
                }
                Err(e) => self.event(
                    depth,
                    "grid_route_abandoned",
                    None,
                    None,
                    Some(e.to_string()),
                ),
            }
        }
        self.bounded_tw(rg, h, l, k, pure, td, depth)
    }

    #[allow(clippy::too_many_arguments)]
    fn bounded_tw(
        &mut self,
        rg: &RootedGraph,
        h: &Graph,
        l: usize,
        k: usize,
        pure: bool,
        td: Option<&TreeDecomposition>,
        depth: usize,
    ) -> Result<(Outcome, String)> {
        let g = &rg.graph;
        if g.vertex_count() == 0 {
            self.event(depth, "empty", None, None, None);
            return Ok((Outcome::Deletion(VSet::new()), "empty".into()));
        }
        let td = match td {
            Some(t) => t.clone(),
            None if g.vertex_count() <= 16 => exact_treewidth(g)?.1,
            None => min_degree_decomposition(g),
        };
        let report = bounded_tw_pack_or_hit(rg, h, l, k, &td, pure, self.budget())?;
        let out = match report.outcome {
            ModelsOrDeletion::Models(ws) => Outcome::Packing(ws),
            ModelsOrDeletion::Deletion(s) => Outcome::Deletion(s),
        };
        let cert = certify_outcome(rg, h, l, k, pure, &out, self.budget())
            .map_err(EpError::Inconclusive)?;
        self.event(
            depth,
            "bounded_treewidth",
            Some(report.width),
            None,
            Some(cert),
        );
        Ok((out, "bounded_treewidth".into()))
    }

    #[allow(clippy::too_many_arguments)]
    fn grid_route(
        &mut self,
        rg: &RootedGraph,
        h: &Graph,
        l: usize,
        k: usize,
        pure: bool,
        m: &GridModel,
        depth: usize,
    ) -> Result<(Outcome, String)> {
        let cc = h.components().len();
        let block = self.cfg.block_for(h.vertex_count());
        let br = match separate_or_models(rg, m, k, block, l, self.cfg.permissive)? {
            SeparateOutcome::Models(ws) => {
                self.event(depth, "grid_models", None, None, None);
                let pat = Pattern::new(h);
                let mut oracle = ModelOracle::new(rg, &pat, l, pure, self.budget());
                let mut out = Vec::with_capacity(ws.len());
                for w in &ws {
                    let found = oracle.find(&w.image())?;
                    out.push(found.ok_or_else(|| {
                        EpError::Inconclusive("a grid model hosts no H-model".into())
                    })?);
                }
                return Ok((Outcome::Packing(out), "grid_models".into()));
            }
            SeparateOutcome::Separation(br) => br,
        };
        let sep = &br.separation;
        let lp = br.l_prime;
        self.event(depth, "separation", Some(sep.order()), Some(lp), None);
        if lp == 0 {
            if pure {
                return self.irrelevant_route(rg, h, l, k, pure, m, &br, depth);
            }
            let sub = rg.induced(&sep.a_only());
            let (out, _) = self.solve(&sub, h, l, k, true, None, None, depth + 1)?;
            return match out {
                Outcome::Deletion(t) => Ok((
                    Outcome::Deletion(t.union(&sep.separator())),
                    "pure_reduction".into(),
                )),
                Outcome::Packing(ps) => {
                    let regions = column_bands(&br.grid, k)?;
                    Ok((
                        complete(rg, h, l, pure, &ps, &regions, self.budget())?,
                        "pure_completion".into(),
                    ))
                }
            };
        }
        if cc == 1 && l == 2 {
            return self.irrelevant_route(rg, h, l, k, pure, m, &br, depth);
        }
        let a_only = sep.a_only();
        let za: Vec<VSet> =
            rg.z.iter()
                .map(|x| {
                    if x.is_subset(&sep.a_vertices) {
                        x.intersection(&a_only)
                    } else {
                        VSet::new()
                    }
                })
                .collect();
        let sub = RootedGraph::new(rg.graph.induced(&a_only), za)?;
        let rooted = br
            .rooted
            .as_ref()
            .ok_or_else(|| EpError::Inconclusive("missing rooted grid model".into()))?;
        let outside =
            RootedGraph::new(rg.graph.clone(), subtract_multiset(&rg.z, &sep.a_vertices))?;
        if cc >= l || lp >= 2 {
            let variant = if cc >= l {
                Variant::Full
            } else {
                Variant::Reduced
            };
            let (out, _) = self.solve(&sub, h, l - lp, k, true, None, None, depth + 1)?;
            return match out {
                Outcome::Deletion(t) => Ok((
                    Outcome::Deletion(reduce_across_separation(rg, sep, l, lp, &t)?),
                    "reduction".into(),
                )),
                Outcome::Packing(ps) => {
                    let regions: Vec<VSet> =
                        models_from_rooted_grid(&outside, rooted, block, variant)?
                            .iter()
                            .map(|w| w.image())
                            .collect();
                    Ok((
                        complete(rg, h, l, pure, &ps, &regions, self.budget())?,
                        "completion".into(),
                    ))
                }
            };
        }
        let comps = h.components();
        let mut t = VSet::new();
        for subset in combinations(cc, l - 2) {
            let keep = subset
                .iter()
                .fold(VSet::new(), |acc, &c| acc.union(&comps[c]));
            let hp = h.induced(&keep);
            let (out, _) = self.solve(&sub, &hp, l - 1, k, true, None, None, depth + 1)?;
            match out {
                Outcome::Deletion(tp) => t.union_with(&tp),
                Outcome::Packing(ps) => {
                    let regions: Vec<VSet> =
                        models_from_rooted_grid(&outside, rooted, block, Variant::Full)?
                            .iter()
                            .map(|w| w.image())
                            .collect();
                    return Ok((
                        complete(rg, h, l, pure, &ps, &regions, self.budget())?,
                        "subpattern_completion".into(),
                    ));
                }
            }
        }
        Ok((
            Outcome::Deletion(t.union(&sep.separator())),
            "subpattern_reduction".into(),
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn irrelevant_route(
        &mut self,
        rg: &RootedGraph,
        h: &Graph,
        l: usize,
        k: usize,
        pure: bool,
        m: &GridModel,
        br: &SeparationBranch,
        depth: usize,
    ) -> Result<(Outcome, String)> {
        let block = self.cfg.block_for(h.vertex_count());
        let found =
            find_irrelevant_vertex(rg, &br.separation, &br.grid, block, self.cfg.permissive)?;
        let w = VSet::singleton(found.vertex);
        self.event(
            depth,
            "irrelevant_vertex",
            Some(found.separation.order()),
            None,
            Some(format!("w = {}", found.vertex)),
        );
        let smaller = rg.remove_vertices(&w);
        let grid = if m.image().contains(found.vertex) {
            restrict_grid_model(&rg.graph, m, &w).ok()
        } else {
            Some(m.clone())
        };
        let (out, _) = self.solve(&smaller, h, l, k, pure, grid.as_ref(), None, depth + 1)?;
        let t = match out {
            Outcome::Packing(ps) => return Ok((Outcome::Packing(ps), "irrelevant_vertex".into())),
            Outcome::Deletion(t) => t,
        };
        let pat = Pattern::new(h);
        let mut oracle = ModelOracle::new(rg, &pat, l, pure, self.budget());
        let all = rg.graph.vertices();
        if !oracle.exists(&all.difference(&t))? {
            return Ok((Outcome::Deletion(t), "irrelevant_vertex".into()));
        }
        // Lift: keep T ∩ V(A) and add a smallest part of the separator.
        let ta = t.intersection(&found.separation.a_vertices);
        let free = found.separation.separator().difference(&t).to_vec();
        for size in 0..=free.len() {
            for pick in combinations(free.len(), size) {
                let cand = pick.iter().fold(ta.clone(), |mut acc, &i| {
                    acc.insert(free[i]);
                    acc
                });
                if cand.len() <= t.len() && !oracle.exists(&all.difference(&cand))? {
                    return Ok((Outcome::Deletion(cand), "irrelevant_vertex_lift".into()));
                }
            }
        }
        Err(EpError::Inconclusive(
            "deletion set does not lift past the irrelevant vertex".into(),
        ))
    }
}

/// All `r`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// `k` disjoint vertex sets, each the union of a band of consecutive columns.
fn column_bands(m: &GridModel, k: usize) -> Result<Vec<VSet>> {
    if m.cols < k {
        return Err(EpError::Inconclusive(format!(
            "{} columns cannot host {k} disjoint regions",
            m.cols
        )));
    }
    let width = m.cols / k;
    Ok((0..k)
        .map(|i| {
            (i * width + 1..=(i + 1) * width)
                .fold(VSet::new(), |acc, c| acc.union(&m.column_image(c)))
        })
        .collect())
}

/// Extends each partial model with its own region and searches the union for a
/// full model of the requested kind.
fn complete(
    rg: &RootedGraph,
    h: &Graph,
    l: usize,
    pure: bool,
    parts: &[ModelWitness],
    regions: &[VSet],
    budget: Budget,
) -> Result<Outcome> {
    let pat = Pattern::new(h);
    let mut oracle = ModelOracle::new(rg, &pat, l, pure, budget);
    let mut out = Vec::with_capacity(parts.len());
    for (p, r) in parts.iter().zip(regions) {
        let found = oracle.find(&p.image().union(r))?;
        out.push(found.ok_or_else(|| EpError::Inconclusive("completion found no model".into()))?);
    }
    if out.len() < parts.len() {
        return Err(EpError::Inconclusive(
            "fewer regions than partial models".into(),
        ));
    }
    Ok(Outcome::Packing(out))
}

/// Either `k` disjoint (pure) `(H, Z, ℓ)`-models or a deletion set, every
/// answer re-certified by the oracles. A supplied grid model enables the
/// separation branches; otherwise, or when they do not certify, the
/// bounded-treewidth argument runs on `td` or a computed decomposition.
#[allow(clippy::too_many_arguments)]
pub fn ep_pipeline(
    rg: &RootedGraph,
    h: &Graph,
    l: usize,
    k: usize,
    cfg: &EngineConfig,
    pure: bool,
    grid: Option<&GridModel>,
    td: Option<&TreeDecomposition>,
) -> Result<PipelineReport> {
    if l == 0 || k == 0 {
        return Err(precondition("k and ℓ must be positive"));
    }
    if h.vertex_count() == 0 {
        return Err(precondition("H must be non-empty"));
    }
    let cc = h.components().len();
    if cc + 1 < l {
        return Err(precondition(format!(
            "cc(H) = {cc} is below ℓ − 1 = {}",
            l - 1
        )));
    }
    if let Some(m) = grid {
        m.validate(&rg.graph)
            .map_err(|e| precondition(format!("grid model: {e}")))?;
    }
    let thresholds = cfg.thresholds(k, l, h.vertex_count());
    let mut ctx = Ctx {
        cfg,
        trace: Vec::new(),
    };
    let internal = pure || cc == 1;
    let mut report = DualityReport {
        k,
        bound: thresholds.f_value.and_then(|v| usize::try_from(v).ok()),
        nu: None,
        tau: None,
        witnesses: vec![],
        deletion_set: None,
        status: Status::Undecided,
        note: None,
    };
    let branch = match ctx.solve(rg, h, l, k, internal, grid, td, 0) {
        Ok((out, branch)) => {
            let out = match out {
                Outcome::Packing(ws) if !pure => Outcome::Packing(
                    ws.into_iter()
                        .map(|w| ModelWitness::Ordinary(w.model().clone()))
                        .collect(),
                ),
                other => other,
            };
            match certify_outcome(rg, h, l, k, pure, &out, Budget::new(cfg.budget)) {
                Ok(c) => {
                    report.status = Status::Ok;
                    report.note = Some(c);
                    match out {
                        Outcome::Packing(ws) => {
                            report.nu = Some(ws.len());
                            report.witnesses = ws;
                        }
                        Outcome::Deletion(s) => report.deletion_set = Some(s),
                    }
                }
                Err(e) => report.note = Some(format!("uncertified: {e}")),
            }
            branch
        }
        Err(e) if e.is_undecided() => {
            report.note = Some(e.to_string());
            "undecided".into()
        }
        Err(e) => return Err(e),
    };
    Ok(PipelineReport {
        report,
        branch,
        thresholds,
        trace: ctx.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::grid_graph;
    use crate::minor_model::pattern_preset;
    use crate::pack_cover::{covering_number, packing_number};

    fn vs(v: &[usize]) -> VSet {
        v.iter().collect()
    }

    fn check(rg: &RootedGraph, h: &Graph, l: usize, k: usize, pure: bool, r: &PipelineReport) {
        assert_eq!(r.report.status, Status::Ok, "{:?}", r.report.note);
        let nu = packing_number(rg, h, l, pure, Budget::default())
            .unwrap()
            .nu;
        if let Some(s) = &r.report.deletion_set {
            assert!(nu < k);
            let rest = rg.remove_vertices(s);
            assert_eq!(
                packing_number(&rest, h, l, pure, Budget::default())
                    .unwrap()
                    .nu,
                0
            );
        } else {
            assert!(r.report.witnesses.len() >= k && nu >= k);
        }
    }

    #[test]
    fn tree_full_z_matches_pack_cover() {
        let k1 = pattern_preset("K1").unwrap();
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)]).unwrap();
        let rg = RootedGraph::new(g.clone(), vec![g.vertices().clone()]).unwrap();
        for k in 1..=3 {
            let r =
                ep_pipeline(&rg, &k1, 1, k, &EngineConfig::default(), false, None, None).unwrap();
            check(&rg, &k1, 1, k, false, &r);
            assert_eq!(r.branch, "bounded_treewidth");
        }
    }

    #[test]
    fn path_k1_l2_within_mader_bound() {
        let k1 = pattern_preset("K1").unwrap();
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let rg = RootedGraph::new(g, vec![vs(&[0, 4]), vs(&[2])]).unwrap();
        for k in 1..=3 {
            let r =
                ep_pipeline(&rg, &k1, 2, k, &EngineConfig::default(), false, None, None).unwrap();
            check(&rg, &k1, 2, k, false, &r);
            if let Some(s) = &r.report.deletion_set {
                let tau = covering_number(&rg, &k1, 2, false, Budget::default())
                    .unwrap()
                    .tau;
                assert!(tau <= 2 * k - 2);
                assert!(s.len() >= tau);
            }
        }
    }

    #[test]
    fn rejects_too_few_components() {
        let k1 = pattern_preset("K1").unwrap();
        let rg = RootedGraph::new(Graph::empty(2), vec![vs(&[0]), vs(&[1]), vs(&[0])]).unwrap();
        assert!(ep_pipeline(&rg, &k1, 3, 1, &EngineConfig::default(), false, None, None).is_err());
    }

    #[test]
    fn grid_route_on_rooted_grid() {
        let k1 = pattern_preset("K1").unwrap();
        let gg = grid_graph(12, 12).unwrap();
        let rg = RootedGraph::new(gg.graph.clone(), vec![vs(&[0, 1]), vs(&[2, 3])]).unwrap();
        let m = GridModel::identity(&gg);
        let r = ep_pipeline(
            &rg,
            &k1,
            2,
            1,
            &EngineConfig::default(),
            false,
            Some(&m),
            None,
        )
        .unwrap();
        assert_eq!(r.report.status, Status::Ok);
        assert_eq!(r.branch, "grid_models");
        assert_eq!(r.report.witnesses.len(), 1);
    }

    #[test]
    fn grid_route_pendant_members() {
        let k1 = pattern_preset("K1").unwrap();
        let gg = grid_graph(8, 8).unwrap();
        let mut edges = gg.graph.edges();
        edges.extend([(0, 64), (64, 65)]);
        let g = Graph::from_edges(66, &edges).unwrap();
        let rg = RootedGraph::new(g, vec![vs(&[64]), vs(&[65])]).unwrap();
        let m = GridModel::identity(&gg);
        let r = ep_pipeline(
            &rg,
            &k1,
            2,
            2,
            &EngineConfig::default(),
            true,
            Some(&m),
            None,
        )
        .unwrap();
        assert_eq!(r.report.status, Status::Ok, "{:?}", r.trace);
        assert!(r.trace.iter().any(|e| e.branch == "separation"));
        let s = r.report.deletion_set.clone().unwrap();
        assert_eq!(
            packing_number(&rg.remove_vertices(&s), &k1, 2, true, Budget::default())
                .unwrap()
                .nu,
            0
        );
    }

    #[test]
    fn combinations_in_order() {
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(combinations(2, 0), vec![Vec::<usize>::new()]);
    }
}
