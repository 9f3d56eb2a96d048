use crate::error::{precondition, EpError, Result};
use crate::graph::{multiset_size, subtract_multiset, Graph, RootedGraph, Separation};
use crate::rooted_grid::{
    models_from_rooted_grid, models_threshold, restrict_grid_model, rooted_grid_or_separation,
    GridCopiesWitness, GridModel, RootedGridModel, RootedGridOutcome, Variant,
};
use crate::vset::{VSet, Vertex};
use serde::{Deserialize, Serialize};

/// A separation of small order leaving `ℓ' < ℓ` members of Z outside `A`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparationBranch {
    pub separation: Separation,
    pub l_prime: usize,
    /// Grid model inside `B − V(A)`.
    pub grid: GridModel,
    /// `(Z∖A, k, ℓ')`-rooted grid model inside `B − V(A)`; absent when `ℓ' = 0`.
    pub rooted: Option<RootedGridModel>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum SeparateOutcome {
    Models(Vec<GridCopiesWitness>),
    Separation(SeparationBranch),
}

/// Subgraph `B` of a separation as a graph on `V(B)` with edges `E(B)`.
fn side_b(g: &Graph, sep: &Separation) -> Result<Graph> {
    let edges: Vec<_> = sep.b_edges.iter().copied().collect();
    let full = Graph::from_edges(g.id_bound(), &edges)?;
    Ok(full.induced(&sep.b_vertices))
}

/// `k` disjoint `(ℓ*·G_b, Z, ℓ)`-models or a separation of order below `kℓ²`
/// with `‖Z∖A‖ = ℓ' < ℓ`, together with a grid model and a
/// `(Z∖A, k, ℓ')`-rooted grid model of order `kℓ(b+2)+1` in `B − V(A)`.
pub fn separate_or_models(
    rg: &RootedGraph,
    m: &GridModel,
    k: usize,
    block: usize,
    l: usize,
    permissive: bool,
) -> Result<SeparateOutcome> {
    if k == 0 || l == 0 || block == 0 {
        return Err(precondition("k, ℓ and the subgrid side must be positive"));
    }
    let order = models_threshold(k, l, block);
    let g = &rg.graph;
    let (mut sep, mut grid) = if rg.z_size() < l {
        (Separation::trivial(g), m.clone())
    } else {
        match rooted_grid_or_separation(rg, m, order, k, l, permissive)? {
            RootedGridOutcome::RootedGrid(r) => {
                let variant = if l >= 2 {
                    Variant::Reduced
                } else {
                    Variant::Full
                };
                return Ok(SeparateOutcome::Models(models_from_rooted_grid(
                    rg, &r, block, variant,
                )?));
            }
            RootedGridOutcome::Separation {
                separation,
                restricted,
            } => (separation, restricted),
        }
    };
    for t in 0..l.saturating_sub(1) {
        let y = subtract_multiset(&rg.z, &sep.a_vertices);
        let ly = multiset_size(&y);
        if ly < l - 1 - t {
            continue;
        }
        if ly == 0 {
            break;
        }
        let inner = RootedGraph::new(g.induced(&sep.b_only()), y)?;
        match rooted_grid_or_separation(&inner, &grid, order, k, ly, permissive)? {
            RootedGridOutcome::RootedGrid(r) => {
                return Ok(SeparateOutcome::Separation(SeparationBranch {
                    separation: sep,
                    l_prime: ly,
                    grid,
                    rooted: Some(r),
                }));
            }
            RootedGridOutcome::Separation {
                separation: cd,
                restricted,
            } => {
                let a = sep.a_vertices.union(&cd.a_vertices);
                let b = cd.b_vertices.union(&sep.separator());
                sep = Separation::from_vertex_sets(g, &a, &b)?;
                grid = restricted;
            }
        }
    }
    let l_prime = sep.z_outside_a(&rg.z);
    if l_prime >= l {
        return Err(EpError::Inconclusive(format!(
            "‖Z∖A‖ = {l_prime} did not drop below ℓ = {l}"
        )));
    }
    if l_prime > 0 {
        return Err(EpError::Inconclusive(
            "no rooted grid model for the remaining members".into(),
        ));
    }
    Ok(SeparateOutcome::Separation(SeparationBranch {
        separation: sep,
        l_prime: 0,
        grid,
        rooted: None,
    }))
}

/// `T ∪ V(A∩B)` after checking that `‖Z∖A‖ = ℓ'` with `1 ≤ ℓ' < ℓ` and that
/// `T` lies in `A − V(B)`.
pub fn reduce_across_separation(
    rg: &RootedGraph,
    sep: &Separation,
    l: usize,
    l_prime: usize,
    t: &VSet,
) -> Result<VSet> {
    crate::graph::validate_separation(&rg.graph, sep)
        .map_err(|v| precondition(format!("not a separation: {}", v[0])))?;
    if l_prime == 0 || l_prime >= l {
        return Err(precondition(format!(
            "need 1 ≤ ℓ' < ℓ, got ℓ'={l_prime}, ℓ={l}"
        )));
    }
    let outside = sep.z_outside_a(&rg.z);
    if outside != l_prime {
        return Err(precondition(format!(
            "‖Z∖A‖ = {outside}, expected {l_prime}"
        )));
    }
    if !t.is_subset(&sep.a_only()) {
        return Err(precondition("T is not inside A − V(B)"));
    }
    Ok(t.union(&sep.separator()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IrrelevantMode {
    /// `‖Z∖A‖ = 0`.
    ZEmpty,
    /// `‖Z∖A‖ = 1`, H connected and ℓ = 2.
    ZOne,
}

/// The last-row, last-column branch set of `m`, or any vertex of `B − V(A)`
/// when the separation has order 0.
pub fn irrelevant_vertex_candidate(
    rg: &RootedGraph,
    sep: &Separation,
    m: Option<&RootedGridModel>,
    mode: IrrelevantMode,
) -> Result<Vertex> {
    let outside = sep.z_outside_a(&rg.z);
    let want = match mode {
        IrrelevantMode::ZEmpty => 0,
        IrrelevantMode::ZOne => 1,
    };
    if outside != want {
        return Err(precondition(format!(
            "‖Z∖A‖ = {outside}, mode needs {want}"
        )));
    }
    if sep.order() == 0 {
        return sep
            .b_only()
            .first()
            .ok_or_else(|| precondition("B − V(A) is empty"));
    }
    let m = m.ok_or_else(|| {
        precondition("a rooted grid model is required for a separation of positive order")
    })?;
    if !m.grid.image().is_subset(&sep.b_vertices) {
        return Err(precondition("the rooted grid model leaves B"));
    }
    let n = m.grid.order();
    m.grid
        .cell(n, n)
        .first()
        .ok_or_else(|| precondition("empty branch set"))
}

/// Result of the irrelevant-vertex search with the separation it ended on.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IrrelevantSearch {
    pub vertex: Vertex,
    pub mode: IrrelevantMode,
    pub separation: Separation,
    pub rooted: Option<RootedGridModel>,
    /// Separations passed through, by order.
    pub orders: Vec<usize>,
}

/// Follows the induction on the separation order: a rooted grid model on
/// `{W}` (or `{W, Y_a}`) inside `B` yields the candidate, a smaller
/// separation inside `B` is merged into `(A, B)` and the search repeats.
pub fn find_irrelevant_vertex(
    rg: &RootedGraph,
    sep: &Separation,
    grid: &GridModel,
    block: usize,
    permissive: bool,
) -> Result<IrrelevantSearch> {
    let g = &rg.graph;
    let mut sep = sep.clone();
    let mut grid = grid.clone();
    let mut orders = Vec::new();
    let limit = 4 * (sep.order() + 2);
    for _ in 0..limit {
        let x = sep.order();
        orders.push(x);
        let outside = sep.z_outside_a(&rg.z);
        let mode = match outside {
            0 => IrrelevantMode::ZEmpty,
            1 => IrrelevantMode::ZOne,
            _ => return Err(precondition(format!("‖Z∖A‖ = {outside} exceeds 1"))),
        };
        if x == 0 {
            let vertex = irrelevant_vertex_candidate(rg, &sep, None, mode)?;
            return Ok(IrrelevantSearch {
                vertex,
                mode,
                separation: sep,
                rooted: None,
                orders,
            });
        }
        let w = sep.separator();
        let (zb, lb, order) = match mode {
            IrrelevantMode::ZEmpty => (vec![w.clone()], 1, x * x + block * x + 2 * x),
            IrrelevantMode::ZOne => {
                let ya = subtract_multiset(&rg.z, &sep.a_vertices)
                    .into_iter()
                    .find(|s| !s.is_empty())
                    .unwrap();
                (vec![w.clone(), ya], 2, 2 * (4 * x * x + block * x + 3 * x))
            }
        };
        let rb = RootedGraph::new(side_b(g, &sep)?, zb)?;
        match rooted_grid_or_separation(&rb, &grid, order, w.len(), lb, permissive)? {
            RootedGridOutcome::RootedGrid(r) => {
                let vertex = irrelevant_vertex_candidate(rg, &sep, Some(&r), mode)?;
                return Ok(IrrelevantSearch {
                    vertex,
                    mode,
                    separation: sep,
                    rooted: Some(r),
                    orders,
                });
            }
            RootedGridOutcome::Separation {
                separation: inner,
                restricted,
            } => {
                let a = sep.a_vertices.union(&inner.a_vertices);
                let next = Separation::from_vertex_sets(g, &a, &inner.b_vertices)?;
                let clash = restricted.image().intersection(&next.a_vertices);
                grid = if clash.is_empty() {
                    restricted
                } else {
                    restrict_grid_model(g, &restricted, &clash)?
                };
                sep = next;
            }
        }
    }
    Err(EpError::Inconclusive(
        "irrelevant-vertex search did not settle".into(),
    ))
}
