//! Grid models: restriction under vertex deletion, the search for a rooted
//! grid model (or a small separation), and disjoint models read off a rooted
//! grid model.

use crate::error::{precondition, EpError, Result};
use crate::graph::{
    disjoint_union, grid_graph, restrict_multiset, GridGraph, RootedGraph, Separation,
};
use crate::linkage::{
    linkage_or_separation, refine_partition, validate_zk_partition, LinkageOutcome, ZkPartition,
};
use crate::minor_model::{hit_positions, validate_model_function, ModelFunction, ModelViolation};
use crate::vset::{VSet, Vertex};
use crate::Graph;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A model of the `rows x cols` grid; branch sets are keyed by grid ids
/// `(i-1)*cols + (j-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridModel {
    pub rows: usize,
    pub cols: usize,
    pub eta: ModelFunction,
}

impl GridModel {
    /// Builds a model from branch sets given by `(row, col)` (1-based).
    pub fn from_cells(
        host: &Graph,
        rows: usize,
        cols: usize,
        cell: impl Fn(usize, usize) -> VSet,
    ) -> Result<Self> {
        let gg = grid_graph(rows, cols)?;
        let mut eta = ModelFunction::default();
        for i in 1..=rows {
            for j in 1..=cols {
                eta.branch_sets.insert(gg.id(i, j), cell(i, j));
            }
        }
        eta.attach_edges(host, &gg.graph);
        Ok(GridModel { rows, cols, eta })
    }

    /// The grid graph modelled in itself.
    pub fn identity(gg: &GridGraph) -> Self {
        Self::from_cells(&gg.graph, gg.rows, gg.cols, |i, j| {
            VSet::singleton(gg.id(i, j))
        })
        .expect("grid dimensions are positive")
    }

    pub fn order(&self) -> usize {
        self.rows.min(self.cols)
    }

    pub fn pattern(&self) -> GridGraph {
        grid_graph(self.rows, self.cols).expect("grid dimensions are positive")
    }

    pub fn cell(&self, row: usize, col: usize) -> &VSet {
        &self.eta.branch_sets[&((row - 1) * self.cols + (col - 1))]
    }

    pub fn row_image(&self, i: usize) -> VSet {
        (1..=self.cols).fold(VSet::new(), |acc, j| acc.union(self.cell(i, j)))
    }

    pub fn column_image(&self, j: usize) -> VSet {
        (1..=self.rows).fold(VSet::new(), |acc, i| acc.union(self.cell(i, j)))
    }

    pub fn image(&self) -> VSet {
        self.eta.image()
    }

    /// Column index of the branch set containing `v`.
    pub fn column_of(&self, v: Vertex) -> Option<usize> {
        self.eta
            .branch_sets
            .iter()
            .find(|(_, s)| s.contains(v))
            .map(|(&id, _)| id % self.cols + 1)
    }

    pub fn validate(&self, host: &Graph) -> std::result::Result<(), ModelViolation> {
        validate_model_function(host, &self.pattern().graph, &self.eta)
    }
}

/// Grid model of order `n − |S|` avoiding `S`, inside the image of the square
/// model `m` and containing every row and column image that misses `S`.
///
/// Deleted rows are absorbed by the next surviving row along each surviving
/// column (and symmetrically for columns); surplus rows and columns are then
/// merged into the last one.
pub fn restrict_grid_model(host: &Graph, m: &GridModel, s: &VSet) -> Result<GridModel> {
    let n = m.rows;
    if m.cols != n {
        return Err(precondition("restriction needs a square grid model"));
    }
    let k = s.len();
    if k >= n {
        return Err(precondition(format!(
            "|S| = {k} must be below the order {n}"
        )));
    }
    let rows: Vec<usize> = (1..=n).filter(|&i| !m.row_image(i).intersects(s)).collect();
    let cols: Vec<usize> = (1..=n)
        .filter(|&j| !m.column_image(j).intersects(s))
        .collect();
    let (a, b) = (rows.len(), cols.len());
    let alpha = |x: usize, y: usize| -> VSet {
        let (ix, jy) = (rows[x], cols[y]);
        let row_lo = if x == 0 { 0 } else { rows[x - 1] };
        let col_lo = if y == 0 { 0 } else { cols[y - 1] };
        let row_hi = if x + 1 == a { n } else { ix };
        let col_hi = if y + 1 == b { n } else { jy };
        let mut out = VSet::new();
        for xp in row_lo + 1..=row_hi {
            out.union_with(m.cell(xp, jy));
        }
        for yp in col_lo + 1..=col_hi {
            out.union_with(m.cell(ix, yp));
        }
        out
    };
    let target = n - k;
    // output row r (0-based) takes surviving rows r..; the last one absorbs the surplus
    let span = |r: usize, len: usize| if r + 1 == target { r..len } else { r..r + 1 };
    GridModel::from_cells(host, target, target, |i, j| {
        let mut out = VSet::new();
        for x in span(i - 1, a) {
            for y in span(j - 1, b) {
                out.union_with(&alpha(x, y));
            }
        }
        out
    })
}

/// A grid model whose first-row branch sets carry root vertices admitting a
/// (Z,k)-partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootedGridModel {
    pub grid: GridModel,
    /// `roots[i]` lies in the branch set of first-row cell `i + 1`.
    pub roots: Vec<Vertex>,
    pub partition: ZkPartition,
    pub k: usize,
    pub l: usize,
}

pub fn validate_rooted_grid(
    rg: &RootedGraph,
    m: &RootedGridModel,
) -> std::result::Result<(), String> {
    m.grid.validate(&rg.graph).map_err(|e| e.to_string())?;
    let kl = m.k * m.l;
    if m.grid.rows != m.grid.cols || m.grid.order() < kl {
        return Err(format!(
            "order {}x{} is below kℓ = {kl}",
            m.grid.rows, m.grid.cols
        ));
    }
    if m.roots.len() != kl {
        return Err(format!("{} roots, expected {kl}", m.roots.len()));
    }
    for (i, &w) in m.roots.iter().enumerate() {
        if !m.grid.cell(1, i + 1).contains(w) {
            return Err(format!("root {w} is not in first-row cell {}", i + 1));
        }
    }
    if m.partition.k != m.k {
        return Err("partition capacity differs from k".into());
    }
    validate_zk_partition(&m.roots, &rg.z, &m.partition)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootedGridOutcome {
    /// A separation of order below `k(ℓ−‖Z∖A‖)` with a grid model of order
    /// `n − |V(A∩B)|` inside `B − V(A)`.
    Separation {
        separation: Separation,
        restricted: GridModel,
    },
    RootedGrid(RootedGridModel),
}

/// Smallest grid order for which the search is guaranteed to conclude.
pub fn rooted_grid_threshold(g: usize, k: usize, l: usize) -> usize {
    g * (k * k * l * l + 1) + k * l
}

/// Finds a separation or a (Z,k,ℓ)-rooted grid model of order `g` from a
/// square grid model `m`.
///
/// Columns of `m` are marked in `kℓ` rounds: each round links Z to the top
/// cells of the `kℓ` lowest unmarked columns and shortens the paths so that
/// they only touch marked columns. A window of `g` unmarked columns then
/// hosts the new model, whose first row is linked to Z through contracted
/// cells. With `permissive`, orders below the guaranteed threshold are
/// accepted and an unlucky run ends in [`EpError::Inconclusive`].
pub fn rooted_grid_or_separation(
    rg: &RootedGraph,
    m: &GridModel,
    g: usize,
    k: usize,
    l: usize,
    permissive: bool,
) -> Result<RootedGridOutcome> {
    let n = m.rows;
    let kl = k * l;
    if k == 0 || l == 0 || g < kl {
        return Err(precondition(format!(
            "need k, ℓ >= 1 and g >= kℓ, got g={g}, k={k}, ℓ={l}"
        )));
    }
    if m.cols != n {
        return Err(precondition("the grid model must be square"));
    }
    if !permissive && n < rooted_grid_threshold(g, k, l) {
        return Err(precondition(format!(
            "order {n} is below g(k²ℓ²+1)+kℓ = {}",
            rooted_grid_threshold(g, k, l)
        )));
    }
    let inconclusive = |why: &str| Err(EpError::Inconclusive(why.to_string()));
    let mut marked = vec![false; n + 1];
    for _ in 0..kl {
        let chosen: Vec<usize> = (1..=n).filter(|&c| !marked[c]).take(kl).collect();
        if chosen.len() < kl {
            return inconclusive("not enough unmarked columns");
        }
        let t: VSet = chosen
            .iter()
            .map(|&c| m.cell(1, c).first().expect("branch sets are non-empty"))
            .collect();
        match linkage_or_separation(rg, &t, k, l) {
            LinkageOutcome::Separation(sep) => {
                let restricted = restrict_grid_model(&rg.graph, m, &sep.separator())?;
                if !restricted.image().is_subset(&sep.b_only()) {
                    return inconclusive("restricted grid model leaves B − V(A)");
                }
                return Ok(RootedGridOutcome::Separation {
                    separation: sep,
                    restricted,
                });
            }
            LinkageOutcome::Linkage(lk) => {
                let mut ends: Vec<Vec<Vertex>> = lk.paths;
                let end_col = |p: &Vec<Vertex>| m.column_of(*p.last().unwrap());
                loop {
                    let mut changed = false;
                    for i in 0..ends.len() {
                        let others: Vec<Option<usize>> = (0..ends.len())
                            .filter(|&j| j != i)
                            .map(|j| end_col(&ends[j]))
                            .collect();
                        let cut = (0..ends[i].len() - 1).find(|&q| match m.column_of(ends[i][q]) {
                            Some(c) => !marked[c] && !others.contains(&Some(c)),
                            None => false,
                        });
                        if let Some(q) = cut {
                            ends[i].truncate(q + 1);
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
                for p in &ends {
                    let c = end_col(p).expect("paths end inside the grid model");
                    marked[c] = true;
                }
            }
        }
    }
    let Some(p) = (kl..=n.saturating_sub(g)).find(|&p| (1..=g).all(|i| !marked[p + i])) else {
        return inconclusive("no window of g unmarked columns");
    };
    if n < 2 * kl || n < kl + g {
        return inconclusive("grid model too small for the final linkage");
    }
    let d: VSet = (kl + 1..=n)
        .flat_map(|i| (1..=g).map(move |j| (i, p + j)))
        .fold(VSet::new(), |acc, (i, j)| acc.union(m.cell(i, j)));
    let bound = rg.graph.id_bound();
    let mut edges = Vec::new();
    let kept = rg.graph.vertices().difference(&d);
    for (u, v) in rg.graph.edges() {
        if kept.contains(u) && kept.contains(v) {
            edges.push((u, v));
        }
    }
    let contracted: Vec<&VSet> = (1..=kl).map(|i| m.cell(kl + i, p + 1)).collect();
    for (i, cell) in contracted.iter().enumerate() {
        for u in rg.graph.boundary(cell).intersection(&kept).iter() {
            edges.push((bound + i, u));
        }
        for (j, other) in contracted.iter().enumerate().take(i) {
            if rg.graph.edge_between(other, cell).is_some() {
                edges.push((bound + j, bound + i));
            }
        }
    }
    let gp = Graph::from_edges(bound + kl, &edges)?.remove_vertices(&d);
    let w: VSet = (bound..bound + kl).collect();
    let zp = restrict_multiset(&rg.z, &kept);
    let rgp = RootedGraph::new(gp, zp)?;
    let lk = match linkage_or_separation(&rgp, &w, k, l) {
        LinkageOutcome::Linkage(lk) => lk,
        LinkageOutcome::Separation(_) => return inconclusive("final linkage failed"),
    };
    // transposed window: new cell (i, j) is old cell (kℓ+j, p+i), so the first row is column p+1
    let mut cells: BTreeMap<(usize, usize), VSet> = BTreeMap::new();
    for i in 1..=g {
        for j in 1..=g {
            cells.insert((i, j), m.cell(kl + j, p + i).clone());
        }
    }
    let mut roots = vec![0; kl];
    for path in &lk.paths {
        let (&last, body) = path.split_last().expect("paths are non-empty");
        let j = last - bound + 1;
        cells.get_mut(&(1, j)).unwrap().extend(body.iter().copied());
        roots[j - 1] = path[0];
    }
    let grid = GridModel::from_cells(&rg.graph, g, g, |i, j| cells[&(i, j)].clone())?;
    Ok(RootedGridOutcome::RootedGrid(RootedGridModel {
        grid,
        roots,
        partition: lk.partition,
        k,
        l,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `k` disjoint `(ℓ·G_h, Z, ℓ)`-models.
    Full,
    /// `k` disjoint `((ℓ−1)·G_h, Z, ℓ)`-models, two subgrids per model joined by a path.
    Reduced,
}

/// One model of `c` disjoint copies of `G_h`; copy `s` uses pattern ids
/// `s·h² .. (s+1)·h²`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCopiesWitness {
    pub copies: usize,
    pub h: usize,
    pub model: ModelFunction,
    /// Root index (1-based) to the Z position it hits.
    pub beta: BTreeMap<usize, usize>,
}

impl GridCopiesWitness {
    pub fn pattern(&self) -> Graph {
        grid_copies(self.copies, self.h)
    }

    pub fn image(&self) -> VSet {
        self.model.image()
    }
}

/// `c` disjoint copies of the `h x h` grid.
pub fn grid_copies(c: usize, h: usize) -> Graph {
    let gg = grid_graph(h, h).expect("h is positive");
    let parts: Vec<&Graph> = std::iter::repeat_n(&gg.graph, c).collect();
    disjoint_union(&parts).graph
}

/// Smallest rooted grid order the construction needs.
pub fn models_threshold(k: usize, l: usize, h: usize) -> usize {
    k * l * (h + 2) + 1
}

type Cell = (usize, usize);

/// Grid cells (1-based) of the route from root column `j` to the top-left of
/// the `j`-th `h x h` subgrid, followed by that subgrid row by row.
fn route_cells(kl: usize, h: usize, j: usize) -> (Vec<Cell>, Vec<Cell>) {
    let turn = kl + 2 - j;
    let left = kl + 1 + h * (j - 1);
    let mut route: Vec<(usize, usize)> = (1..=turn).map(|a| (a, j)).collect();
    route.extend((j + 1..=left).map(|b| (turn, b)));
    route.extend((turn + 1..kl + 2).map(|a| (a, left)));
    let block = (kl + 2..=kl + 1 + h)
        .flat_map(|a| (left..left + h).map(move |b| (a, b)))
        .collect();
    (route, block)
}

/// Reads `k` disjoint models off a rooted grid model of order at least
/// `kℓ(h+2)+1`: root `i` is routed to its own `h x h` subgrid, and the refined
/// partition of the roots groups the subgrids into models.
pub fn models_from_rooted_grid(
    rg: &RootedGraph,
    m: &RootedGridModel,
    h: usize,
    variant: Variant,
) -> Result<Vec<GridCopiesWitness>> {
    let (k, l) = (m.k, m.l);
    let kl = k * l;
    if h == 0 {
        return Err(precondition("h must be positive"));
    }
    if m.grid.order() < models_threshold(k, l, h) {
        return Err(precondition(format!(
            "order {} below kℓ(h+2)+1 = {}",
            m.grid.order(),
            models_threshold(k, l, h)
        )));
    }
    if variant == Variant::Reduced && l < 2 {
        return Err(precondition("the reduced variant needs ℓ >= 2"));
    }
    validate_rooted_grid(rg, m).map_err(precondition)?;
    let refined = refine_partition(&m.roots, &rg.z, k, l, &m.partition)?;
    let cells = |list: &[(usize, usize)]| {
        list.iter()
            .fold(VSet::new(), |acc, &(a, b)| acc.union(m.grid.cell(a, b)))
    };
    let mut out = Vec::with_capacity(k);
    for (j, class) in refined.index_classes.iter().enumerate() {
        let (skip, joined) = match (variant, refined.anchors[j]) {
            (Variant::Reduced, Some((a, b))) => (Some(b), Some((a, b))),
            (Variant::Reduced, None) => return Err(precondition("missing anchor pair")),
            (Variant::Full, _) => (None, None),
        };
        let mut model = ModelFunction::default();
        let mut copy = 0;
        for &i in class {
            if Some(i) == skip {
                continue;
            }
            let (route, block) = route_cells(kl, h, i);
            for (s, &(a, b)) in block.iter().enumerate() {
                let mut set = m.grid.cell(a, b).clone();
                if s == 0 {
                    set.union_with(&cells(&route));
                }
                if let Some((anchor, other)) = joined {
                    if i == anchor && s == (h - 1) * h {
                        let (r2, b2) = route_cells(kl, h, other);
                        set.union_with(&cells(&r2));
                        set.union_with(&cells(&b2));
                        set.union_with(&cells(&detour(kl, h, anchor, other, j + 1)));
                    }
                }
                model.branch_sets.insert(copy * h * h + s, set);
            }
            copy += 1;
        }
        let pattern = grid_copies(copy, h);
        model.attach_edges(&rg.graph, &pattern);
        out.push(GridCopiesWitness {
            copies: copy,
            h,
            model,
            beta: refined.betas[j].clone(),
        });
    }
    Ok(out)
}

/// Interior cells of the path below the subgrids joining the bottom-left
/// cells of subgrids `a` and `b` along row `kℓ+1+h+i`.
fn detour(kl: usize, h: usize, a: usize, b: usize, i: usize) -> Vec<(usize, usize)> {
    let base = kl + 1 + h;
    let (ca, cb) = (kl + 1 + h * (a - 1), kl + 1 + h * (b - 1));
    let mut cells: Vec<(usize, usize)> = (base + 1..=base + i).map(|r| (r, ca)).collect();
    cells.extend((ca + 1..cb).map(|c| (base + i, c)));
    cells.extend((base + 1..=base + i).rev().map(|r| (r, cb)));
    cells
}

/// Checks a family of witnesses: valid models, pairwise disjoint, each
/// hitting at least ℓ members of Z.
pub fn validate_grid_witnesses(
    rg: &RootedGraph,
    l: usize,
    ws: &[GridCopiesWitness],
) -> std::result::Result<(), String> {
    let mut used = VSet::new();
    for (i, w) in ws.iter().enumerate() {
        validate_model_function(&rg.graph, &w.pattern(), &w.model)
            .map_err(|e| format!("witness {i}: {e}"))?;
        let img = w.image();
        if img.intersects(&used) {
            return Err(format!("witness {i} overlaps an earlier one"));
        }
        used.union_with(&img);
        let hits = hit_positions(&img, &rg.z).len();
        if hits < l {
            return Err(format!("witness {i} hits {hits} < ℓ = {l} members"));
        }
    }
    Ok(())
}
