//! Exact packing and covering numbers for (pure) (H,Z,ℓ)-models, irrelevance
//! checks and duality reports.
//!
//! Both numbers are computed over inclusion-minimal vertex sets whose induced
//! subgraph contains a model: disjoint models correspond to disjoint minimal
//! sets and deletion sets are exactly the hitting sets of minimal sets.

pub mod frontier;

use crate::error::{Budget, EpError, Result};
use crate::graph::RootedGraph;
use crate::minor_model::{ModelOracle, ModelWitness, Pattern};
use crate::vset::{VSet, Vertex};
use crate::Graph;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

/// Above this many vertices, K1 packings use the frontier programme instead of
/// enumerating minimal sets.
pub const FRONTIER_THRESHOLD: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    pub nu: usize,
    pub witnesses: Vec<ModelWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    pub tau: usize,
    pub deletion_set: VSet,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Violation,
    Undecided,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Violation => 2,
            Status::Undecided => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityReport {
    pub k: usize,
    pub bound: Option<usize>,
    pub nu: Option<usize>,
    pub tau: Option<usize>,
    pub witnesses: Vec<ModelWitness>,
    pub deletion_set: Option<VSet>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Shared state for one packing/covering computation on a fixed instance.
pub struct PackCover<'a> {
    pub oracle: ModelOracle<'a>,
    minimal_cache: Option<Vec<VSet>>,
}

impl<'a> PackCover<'a> {
    pub fn new(
        rg: &'a RootedGraph,
        pat: &'a Pattern,
        l: usize,
        pure: bool,
        budget: Budget,
    ) -> Self {
        PackCover {
            oracle: ModelOracle::new(rg, pat, l, pure, budget),
            minimal_cache: None,
        }
    }

    fn is_k1(&self) -> bool {
        let h = &self.oracle.pat.graph;
        h.vertex_count() == 1
    }

    /// Every inclusion-minimal model vertex set of the whole graph.
    pub fn minimal_sets(&mut self) -> Result<Vec<VSet>> {
        if let Some(c) = &self.minimal_cache {
            return Ok(c.clone());
        }
        let mut found: FxHashSet<VSet> = FxHashSet::default();
        let mut visited: FxHashSet<VSet> = FxHashSet::default();
        let all = self.oracle.rg.graph.vertices().clone();
        let mut stack = vec![all];
        while let Some(allowed) = stack.pop() {
            if !visited.insert(allowed.clone()) {
                continue;
            }
            self.oracle.budget.tick(1)?;
            if let Some(m) = self.oracle.minimal_model_set(&allowed)? {
                for v in m.iter() {
                    let mut next = allowed.clone();
                    next.remove(v);
                    stack.push(next);
                }
                found.insert(m);
            }
        }
        let mut out: Vec<VSet> = found.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        self.minimal_cache = Some(out.clone());
        Ok(out)
    }

    /// Maximum number of disjoint models, with witnesses.
    pub fn packing(&mut self) -> Result<Packing> {
        let all = self.oracle.rg.graph.vertices().clone();
        if !self.oracle.exists(&all)? {
            return Ok(Packing {
                nu: 0,
                witnesses: vec![],
            });
        }
        let sets = if self.is_k1() && all.len() > FRONTIER_THRESHOLD {
            self.k1_packing_sets(&all)?
        } else {
            let family = self.minimal_sets()?;
            max_disjoint(&family, &mut self.oracle.budget)?
        };
        let mut witnesses = Vec::with_capacity(sets.len());
        for s in &sets {
            let w = self.oracle.find(s)?.expect("minimal set carries a model");
            witnesses.push(w);
        }
        Ok(Packing {
            nu: witnesses.len(),
            witnesses,
        })
    }

    /// Whether `nu >= k`, returning a packing of size `min(nu, k)`.
    pub fn packing_at_least(&mut self, k: usize) -> Result<(bool, Packing)> {
        let all = self.oracle.rg.graph.vertices().clone();
        if k == 0 {
            return Ok((
                true,
                Packing {
                    nu: 0,
                    witnesses: vec![],
                },
            ));
        }
        if self.is_k1() && all.len() > FRONTIER_THRESHOLD {
            let rg = self.oracle.rg;
            let v = frontier::k1_packing(
                &rg.graph,
                &rg.z,
                self.oracle.l,
                &all,
                k,
                &mut self.oracle.budget,
            )?;
            if v < k {
                return Ok((
                    false,
                    Packing {
                        nu: v,
                        witnesses: vec![],
                    },
                ));
            }
        }
        let p = self.packing()?;
        Ok((p.nu >= k, p))
    }

    /// Disjoint minimal sets realising the frontier optimum (K1 only).
    fn k1_packing_sets(&mut self, all: &VSet) -> Result<Vec<VSet>> {
        let rg = self.oracle.rg;
        let l = self.oracle.l;
        let nu = frontier::k1_packing(
            &rg.graph,
            &rg.z,
            l,
            all,
            usize::MAX,
            &mut self.oracle.budget,
        )?;
        if nu == 1 {
            return Ok(vec![self.oracle.minimal_model_set(all)?.unwrap()]);
        }
        // Self-reduction: drop blocks of vertices while the optimum survives.
        let mut keep = all.clone();
        let verts = all.to_vec();
        let mut chunks: Vec<&[Vertex]> = verts.chunks(verts.len().div_ceil(8).max(1)).collect();
        while let Some(chunk) = chunks.pop() {
            let trial = keep.difference(&chunk.iter().collect());
            if frontier::k1_packing(&rg.graph, &rg.z, l, &trial, nu, &mut self.oracle.budget)? >= nu
            {
                keep = trial;
            } else if chunk.len() > 1 {
                let (a, b) = chunk.split_at(chunk.len() / 2);
                chunks.push(a);
                chunks.push(b);
            }
        }
        // Each remaining component hitting ℓ sets is split by exact search.
        let mut out = Vec::new();
        for comp in rg.graph.components_in(&keep) {
            let sub = rg.induced(&comp);
            let pat = self.oracle.pat;
            let before = self.oracle.budget.used();
            let mut inner =
                PackCover::new(&sub, pat, l, self.oracle.pure, self.oracle.budget.clone());
            let fam = inner.minimal_sets()?;
            out.extend(max_disjoint(&fam, &mut inner.oracle.budget)?);
            self.oracle
                .budget
                .tick(inner.oracle.budget.used() - before)?;
        }
        debug_assert_eq!(out.len(), nu);
        Ok(out)
    }

    /// Minimum deletion set, certified by a fresh search on `G - S`.
    pub fn covering(&mut self) -> Result<Cover> {
        let all = self.oracle.rg.graph.vertices().clone();
        let mut failed: FxHashMap<VSet, usize> = FxHashMap::default();
        let mut b = 0;
        loop {
            if let Some(s) = self.hit(&all, b, &mut failed)? {
                let c = Cover {
                    tau: s.len(),
                    deletion_set: s,
                };
                self.certify_deletion(&c.deletion_set)?;
                return Ok(c);
            }
            b += 1;
        }
    }

    /// A deletion set of size at most `b`, or `None` if none exists.
    pub fn cover_within(&mut self, b: usize) -> Result<Option<VSet>> {
        let all = self.oracle.rg.graph.vertices().clone();
        let mut failed = FxHashMap::default();
        let r = self.hit(&all, b, &mut failed)?;
        if let Some(s) = &r {
            self.certify_deletion(s)?;
        }
        Ok(r)
    }

    fn hit(
        &mut self,
        allowed: &VSet,
        b: usize,
        failed: &mut FxHashMap<VSet, usize>,
    ) -> Result<Option<VSet>> {
        self.oracle.budget.tick(1)?;
        let Some(m) = self.oracle.minimal_model_set(allowed)? else {
            return Ok(Some(VSet::new()));
        };
        if b == 0 || failed.get(allowed).is_some_and(|&f| f >= b) {
            return Ok(None);
        }
        if b >= 2 {
            // More than b disjoint models refute any b-set.
            let mut rest = allowed.difference(&m);
            let mut count = 1;
            while count <= b {
                match self.oracle.minimal_model_set(&rest)? {
                    Some(m2) => {
                        rest.difference_with(&m2);
                        count += 1;
                    }
                    None => break,
                }
            }
            if count > b {
                failed.insert(allowed.clone(), b);
                return Ok(None);
            }
        }
        for v in m.iter() {
            let mut next = allowed.clone();
            next.remove(v);
            if let Some(mut s) = self.hit(&next, b - 1, failed)? {
                s.insert(v);
                return Ok(Some(s));
            }
        }
        failed.insert(allowed.clone(), b);
        Ok(None)
    }

    /// Panics-free certification: errors if a model survives in `G - S`.
    pub fn certify_deletion(&mut self, s: &VSet) -> Result<()> {
        let rest = self.oracle.rg.graph.vertices().difference(s);
        let rg = self.oracle.rg;
        let mut fresh = ModelOracle::new(
            rg,
            self.oracle.pat,
            self.oracle.l,
            self.oracle.pure,
            Budget::default(),
        );
        if fresh.exists(&rest)? {
            return Err(EpError::Inconclusive(format!(
                "deletion set {s:?} leaves a model"
            )));
        }
        Ok(())
    }
}

/// Largest subfamily of pairwise disjoint sets (branch and bound).
pub fn max_disjoint(family: &[VSet], budget: &mut Budget) -> Result<Vec<VSet>> {
    fn rec(
        family: &[VSet],
        avail: &[usize],
        used: &VSet,
        cur: &mut Vec<usize>,
        best: &mut Vec<usize>,
        budget: &mut Budget,
    ) -> Result<()> {
        budget.tick(1)?;
        if cur.len() > best.len() {
            *best = cur.clone();
        }
        if avail.is_empty() {
            return Ok(());
        }
        // Upper bound: remaining vertices over the smallest set size.
        let mut uni = VSet::new();
        let mut min = usize::MAX;
        for &i in avail {
            uni.union_with(&family[i]);
            min = min.min(family[i].len());
        }
        if cur.len() + uni.len() / min.max(1) <= best.len() {
            return Ok(());
        }
        // Branch on the smallest vertex still covered: a set containing it, or none.
        let v = uni.first().unwrap();
        for &i in avail.iter().filter(|&&i| family[i].contains(v)) {
            let next_used = used.union(&family[i]);
            let next: Vec<usize> = avail
                .iter()
                .copied()
                .filter(|&j| family[j].is_disjoint(&next_used))
                .collect();
            cur.push(i);
            rec(family, &next, &next_used, cur, best, budget)?;
            cur.pop();
        }
        let without: Vec<usize> = avail
            .iter()
            .copied()
            .filter(|&j| !family[j].contains(v))
            .collect();
        rec(family, &without, used, cur, best, budget)
    }
    let avail: Vec<usize> = (0..family.len()).collect();
    let mut best = Vec::new();
    rec(
        family,
        &avail,
        &VSet::new(),
        &mut Vec::new(),
        &mut best,
        budget,
    )?;
    Ok(best.into_iter().map(|i| family[i].clone()).collect())
}

pub fn packing_number(
    rg: &RootedGraph,
    h: &Graph,
    l: usize,
    pure: bool,
    budget: Budget,
) -> Result<Packing> {
    let pat = Pattern::new(h);
    PackCover::new(rg, &pat, l, pure, budget).packing()
}

pub fn covering_number(
    rg: &RootedGraph,
    h: &Graph,
    l: usize,
    pure: bool,
    budget: Budget,
) -> Result<Cover> {
    let pat = Pattern::new(h);
    PackCover::new(rg, &pat, l, pure, budget).covering()
}

/// Whether deleting `v` leaves the pure covering number unchanged.
pub fn is_irrelevant(
    rg: &RootedGraph,
    h: &Graph,
    l: usize,
    v: Vertex,
    budget: Budget,
) -> Result<bool> {
    if !rg.graph.contains(v) {
        return Err(crate::error::precondition(format!(
            "vertex {v} is not in the graph"
        )));
    }
    let before = covering_number(rg, h, l, true, budget.clone())?.tau;
    let after = covering_number(&rg.remove_vertices(&VSet::singleton(v)), h, l, true, budget)?.tau;
    Ok(before == after)
}

/// `ν ≥ k` or `τ ≤ bound(k)`; any budget exhaustion yields `Undecided`.
pub fn check_duality(
    rg: &RootedGraph,
    h: &Graph,
    l: usize,
    k: usize,
    bound: &dyn Fn(usize) -> usize,
    pure: bool,
    budget: Budget,
) -> DualityReport {
    let pat = Pattern::new(h);
    let mut pc = PackCover::new(rg, &pat, l, pure, budget);
    let b = bound(k);
    let mut report = DualityReport {
        k,
        bound: Some(b),
        nu: None,
        tau: None,
        witnesses: vec![],
        deletion_set: None,
        status: Status::Undecided,
        note: None,
    };
    let run = |pc: &mut PackCover, report: &mut DualityReport| -> Result<()> {
        let (enough, p) = pc.packing_at_least(k)?;
        report.nu = Some(p.nu);
        if enough {
            report.witnesses = p.witnesses;
            report.status = Status::Ok;
            return Ok(());
        }
        let c = pc.covering()?;
        if c.tau < p.nu {
            return Err(EpError::Inconclusive("weak duality failed".into()));
        }
        report.status = if c.tau <= b {
            Status::Ok
        } else {
            Status::Violation
        };
        report.tau = Some(c.tau);
        report.deletion_set = Some(c.deletion_set);
        Ok(())
    };
    if let Err(e) = run(&mut pc, &mut report) {
        report.status = Status::Undecided;
        report.note = Some(e.to_string());
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::grid_graph;
    use crate::minor_model::pattern_preset;

    fn vs(v: &[usize]) -> VSet {
        v.iter().collect()
    }

    fn path3() -> RootedGraph {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        RootedGraph::new(g, vec![vs(&[0]), vs(&[2])]).unwrap()
    }

    #[test]
    fn path_numbers() {
        let k1 = pattern_preset("K1").unwrap();
        let rg = path3();
        assert_eq!(
            packing_number(&rg, &k1, 2, false, Budget::default())
                .unwrap()
                .nu,
            1
        );
        let c = covering_number(&rg, &k1, 2, false, Budget::default()).unwrap();
        assert_eq!(c.tau, 1);
        assert_eq!(
            packing_number(&rg, &k1, 3, false, Budget::default())
                .unwrap()
                .nu,
            0
        );
        let c = covering_number(&rg, &k1, 3, false, Budget::default()).unwrap();
        assert_eq!((c.tau, c.deletion_set), (0, VSet::new()));
    }

    #[test]
    fn irrelevance_basics() {
        let k1 = pattern_preset("K1").unwrap();
        let g = Graph::from_edges(2, &[]).unwrap();
        let rg = RootedGraph::new(g, vec![vs(&[0]), vs(&[0])]).unwrap();
        assert!(is_irrelevant(&rg, &k1, 2, 1, Budget::default()).unwrap());
        assert!(!is_irrelevant(&rg, &k1, 2, 0, Budget::default()).unwrap());
    }

    #[test]
    fn frontier_agrees_with_enumeration_on_grid() {
        let gg = grid_graph(4, 4).unwrap();
        let z = vec![gg.column(1), gg.column(4), gg.row(1)];
        let rg = RootedGraph::new(gg.graph.clone(), z).unwrap();
        let k1 = pattern_preset("K1").unwrap();
        let pat = Pattern::new(&k1);
        for l in 1..=3 {
            let mut pc = PackCover::new(&rg, &pat, l, false, Budget::default());
            let p = pc.packing().unwrap();
            let fam = pc.minimal_sets();
            let mut b = Budget::default();
            let dp = frontier::k1_packing(&rg.graph, &rg.z, l, rg.graph.vertices(), 100, &mut b)
                .unwrap();
            assert_eq!(p.nu, dp, "ℓ={l}");
            if let Ok(fam) = fam {
                let e = max_disjoint(&fam, &mut Budget::default()).unwrap().len();
                assert_eq!(e, dp);
            }
        }
    }

    #[test]
    fn duality_k1_is_trivial() {
        let k1 = pattern_preset("K1").unwrap();
        let r = check_duality(&path3(), &k1, 2, 1, &|_| 0, false, Budget::default());
        assert_eq!(r.status, Status::Ok);
    }
}
