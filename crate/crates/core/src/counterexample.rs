//! Instances on the negative side: the three-set grid and the family of
//! rooted graphs without the packing/covering duality when H has at most
//! ℓ−2 components.

use crate::error::{precondition, Budget, Result};
use crate::graph::{disjoint_union, grid_graph, InstanceJson, RootedGraph};
use crate::minor_model::{ModelOracle, Pattern};
use crate::pack_cover::PackCover;
use crate::vset::{VSet, Vertex};
use crate::Graph;
use serde::{Deserialize, Serialize};

/// `n x n` grid with Z = (first column, first row, last column), corners
/// removed from each.
pub fn figure1_instance(n: usize) -> Result<RootedGraph> {
    if n < 2 {
        return Err(precondition("three-set grid needs n >= 2"));
    }
    let gg = grid_graph(n, n)?;
    let inner = |f: &dyn Fn(usize) -> usize| -> VSet { (2..n).map(f).collect() };
    let z = vec![
        inner(&|i| gg.id(i, 1)),
        inner(&|j| gg.id(1, j)),
        inner(&|i| gg.id(i, n)),
    ];
    RootedGraph::new(gg.graph, z)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NegativeParams {
    pub t: usize,
    pub l: usize,
    pub n: usize,
    pub x: usize,
}

#[derive(Clone, Debug)]
pub struct NegativeInstance {
    pub rooted: RootedGraph,
    pub params: NegativeParams,
    /// Offsets of `G_1, ..., G_t` in the union.
    pub offsets: Vec<usize>,
    pub orders: Vec<usize>,
}

impl NegativeInstance {
    pub fn to_json(&self) -> InstanceJson {
        let mut j = InstanceJson::from_rooted(&self.rooted, None);
        j.provenance = Some(serde_json::to_value(&self.params).expect("params serialise"));
        j
    }

    /// Vertex set of component grid `G_i` (1-based).
    pub fn part(&self, i: usize) -> VSet {
        let off = self.offsets[i - 1];
        (off..off + self.orders[i - 1] * self.orders[i - 1]).collect()
    }
}

/// Sufficient grid size for the covering claim: `(14h+x+1)(x+1)+x+1`.
pub fn negative_threshold(h_order: usize, x: usize) -> usize {
    (14 * h_order + x + 1) * (x + 1) + x + 1
}

/// `G_1` of order `(ℓ−t+2)n` carrying ℓ−t+1 first-row blocks of width n, and
/// `t−1` companion grids of order n whose first rows are the remaining members.
pub fn negative_family(h: &Graph, l: usize, n: usize, x: usize) -> Result<NegativeInstance> {
    let t = h.components().len();
    if t == 0 {
        return Err(precondition("H must be non-empty"));
    }
    if t + 2 > l {
        return Err(precondition(format!(
            "need cc(H) <= ℓ-2, got cc(H)={t}, ℓ={l}"
        )));
    }
    if n == 0 {
        return Err(precondition("n must be positive"));
    }
    let big = grid_graph((l - t + 2) * n, (l - t + 2) * n)?;
    let small = grid_graph(n, n)?;
    let mut parts: Vec<&Graph> = vec![&big.graph];
    parts.extend(std::iter::repeat_n(&small.graph, t - 1));
    let u = disjoint_union(&parts);
    let mut z = Vec::with_capacity(l);
    for j in 1..=l - t + 1 {
        z.push((n * (j - 1) + 1..=n * j).map(|i| big.id(1, i)).collect());
    }
    for j in l - t + 2..=l {
        let off = u.offsets[j + t - l - 1];
        z.push((1..=n).map(|i| off + small.id(1, i)).collect());
    }
    let mut orders = vec![(l - t + 2) * n];
    orders.extend(std::iter::repeat_n(n, t - 1));
    Ok(NegativeInstance {
        rooted: RootedGraph::new(u.graph, z)?,
        params: NegativeParams { t, l, n, x },
        offsets: u.offsets,
        orders,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NegativeReport {
    pub nu: usize,
    /// `ν = 1`.
    pub single_model: bool,
    /// `ν <= 1` was proved from the outer faces of the grid components rather
    /// than by search.
    pub outer_face_certificate: bool,
    /// Every `S` with `|S| <= x` leaves a model.
    pub survives_small_deletions: bool,
    pub failing_set: Option<VSet>,
    pub threshold: usize,
    pub x: usize,
}

impl NegativeReport {
    pub fn holds(&self) -> bool {
        self.single_model && self.survives_small_deletions
    }
}

/// Outer face of the `m x m` grid placed at `off`, in cyclic order.
fn grid_boundary_cycle(off: usize, m: usize) -> Result<Vec<Vertex>> {
    let gg = grid_graph(m, m)?;
    let mut cycle: Vec<Vertex> = (1..=m).map(|c| gg.id(1, c)).collect();
    cycle.extend((2..=m).map(|r| gg.id(r, m)));
    if m > 1 {
        cycle.extend((1..m).rev().map(|c| gg.id(m, c)));
        cycle.extend((2..m).rev().map(|r| gg.id(r, 1)));
    }
    Ok(cycle.into_iter().map(|v| off + v).collect())
}

/// Decides whether the outer faces of the grid components allow two disjoint
/// connected sets each meeting `l` members of Z.
///
/// In a plane graph two disjoint connected sets cannot have interleaving
/// points on the outer face, so two such sets inside one grid need a split of
/// its boundary cycle into two arcs that each meet `l` members. Returns
/// `Some(false)` when no component pair and no arc split allows it, and `None`
/// when a Z vertex is interior or two components each meet `l` members.
pub fn outer_face_admits_two(inst: &NegativeInstance, l: usize) -> Result<Option<bool>> {
    let z = &inst.rooted.z;
    if z.len() > 64 {
        return Ok(None);
    }
    let mut candidates = Vec::new();
    for (i, (&off, &m)) in inst.offsets.iter().zip(&inst.orders).enumerate() {
        let cycle = grid_boundary_cycle(off, m)?;
        let on_cycle: VSet = cycle.iter().copied().collect();
        let part = inst.part(i + 1);
        let masks: Vec<u64> = cycle
            .iter()
            .map(|&v| {
                z.iter()
                    .enumerate()
                    .filter(|(_, zi)| zi.contains(v))
                    .fold(0u64, |a, (j, _)| a | 1 << j)
            })
            .collect();
        if z.iter()
            .any(|zi| !zi.intersection(&part).is_subset(&on_cycle))
        {
            return Ok(None);
        }
        if masks.iter().fold(0u64, |a, &m| a | m).count_ones() as usize >= l {
            candidates.push(masks);
        }
    }
    match candidates.len() {
        0 => Ok(Some(false)),
        1 => {
            let masks = &candidates[0];
            let len = masks.len();
            let arc = |from: usize, to: usize| -> usize {
                (from..to)
                    .fold(0u64, |a, p| a | masks[p % len])
                    .count_ones() as usize
            };
            for i in 0..len {
                for j in i + 1..len {
                    if arc(i, j) >= l && arc(j, i + len) >= l {
                        return Ok(Some(true));
                    }
                }
            }
            Ok(Some(false))
        }
        _ => Ok(None),
    }
}

/// Checks `ν = 1` and that no set of at most `x` vertices is a deletion set,
/// enumerating the sets explicitly. For connected `H` the upper bound on ν
/// comes from [`outer_face_admits_two`] when it applies.
pub fn verify_negative(
    inst: &NegativeInstance,
    h: &Graph,
    x: usize,
    budget: Budget,
) -> Result<NegativeReport> {
    let rg = &inst.rooted;
    let l = inst.params.l;
    let pat = Pattern::new(h);
    let mut oracle = ModelOracle::new(rg, &pat, l, false, budget.clone());
    let one = oracle.exists(rg.graph.vertices())?;
    let certified =
        one && h.components().len() == 1 && outer_face_admits_two(inst, l)? == Some(false);
    let (nu, two) = if !one {
        (0, false)
    } else if certified {
        (1, false)
    } else {
        let mut pc = PackCover::new(rg, &pat, l, false, budget);
        let (two, p) = pc.packing_at_least(2)?;
        (if two { p.nu } else { 1 }, two)
    };
    let verts = rg.graph.vertices().to_vec();
    let mut failing = None;
    let mut chosen = Vec::new();
    subsets_up_to(
        &verts,
        x,
        0,
        &mut chosen,
        &mut |s: &[usize]| -> Result<bool> {
            oracle.budget.tick(1)?;
            let set: VSet = s.iter().collect();
            let rest = rg.graph.vertices().difference(&set);
            if !oracle.exists(&rest)? {
                failing = Some(set);
                return Ok(false);
            }
            Ok(true)
        },
    )?;
    Ok(NegativeReport {
        nu,
        single_model: nu == 1 && !two,
        outer_face_certificate: certified,
        survives_small_deletions: failing.is_none(),
        failing_set: failing,
        threshold: negative_threshold(h.vertex_count(), x),
        x,
    })
}

/// Visits every subset of size at most `max` in lexicographic order until
/// the visitor returns `false`.
fn subsets_up_to(
    items: &[usize],
    max: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> Result<bool>,
) -> Result<bool> {
    if !visit(chosen)? {
        return Ok(false);
    }
    if chosen.len() == max {
        return Ok(true);
    }
    for i in start..items.len() {
        chosen.push(items[i]);
        let go = subsets_up_to(items, max, i + 1, chosen, visit)?;
        chosen.pop();
        if !go {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minor_model::pattern_preset;

    #[test]
    fn three_set_grid_n3() {
        let rg = figure1_instance(3).unwrap();
        let gg = grid_graph(3, 3).unwrap();
        assert_eq!(
            rg.z,
            vec![
                VSet::singleton(gg.id(2, 1)),
                VSet::singleton(gg.id(1, 2)),
                VSet::singleton(gg.id(2, 3))
            ]
        );
        assert!(figure1_instance(1).is_err());
    }

    #[test]
    fn family_shapes() {
        let k1 = pattern_preset("K1").unwrap();
        let a = negative_family(&k1, 3, 2, 0).unwrap();
        assert_eq!(a.orders, vec![8]);
        assert_eq!(a.rooted.z.len(), 3);
        assert!(a.rooted.z.iter().all(|x| x.len() == 2));
        let h = pattern_preset("2K1").unwrap();
        let b = negative_family(&h, 4, 2, 0).unwrap();
        assert_eq!(b.orders, vec![8, 2]);
        assert_eq!(b.rooted.z_size(), 4);
        let h5 = pattern_preset("5K1").unwrap();
        let c = negative_family(&h5, 8, 1, 0).unwrap();
        assert_eq!(c.orders.len(), 5);
        assert_eq!(
            c.rooted
                .z
                .iter()
                .filter(|x| x.is_subset(&c.part(1)))
                .count(),
            4
        );
        assert!(negative_family(&h, 3, 2, 0).is_err());
    }

    #[test]
    fn verify_small() {
        let k1 = pattern_preset("K1").unwrap();
        let inst = negative_family(&k1, 3, 2, 0).unwrap();
        let r = verify_negative(&inst, &k1, 0, Budget::default()).unwrap();
        assert!(r.holds() && r.outer_face_certificate, "{r:?}");
        let tiny = negative_family(&k1, 3, 1, 0).unwrap();
        let all = tiny.rooted.graph.vertex_count();
        let r = verify_negative(&tiny, &k1, all, Budget::default()).unwrap();
        assert!(!r.survives_small_deletions);
    }

    #[test]
    fn outer_face_split() {
        let k1 = pattern_preset("K1").unwrap();
        let inst = negative_family(&k1, 3, 2, 0).unwrap();
        assert_eq!(outer_face_admits_two(&inst, 3).unwrap(), Some(false));
        // with ℓ = 2 the first row splits into two arcs meeting two blocks each
        assert_eq!(outer_face_admits_two(&inst, 2).unwrap(), Some(true));
        let cycle = grid_boundary_cycle(0, 3).unwrap();
        assert_eq!(cycle.len(), 8);
        assert_eq!(grid_boundary_cycle(5, 1).unwrap(), vec![5]);
    }

    #[test]
    fn outer_face_agrees_with_search() {
        let k1 = pattern_preset("K1").unwrap();
        let inst = negative_family(&k1, 3, 1, 0).unwrap();
        for l in 1..=3 {
            let nu =
                crate::pack_cover::packing_number(&inst.rooted, &k1, l, false, Budget::default())
                    .unwrap()
                    .nu;
            assert_eq!(
                outer_face_admits_two(&inst, l).unwrap(),
                Some(nu >= 2),
                "l={l}"
            );
        }
    }
}
