//! Path-decomposition dynamic programme for packing connected vertex sets
//! that each meet at least ℓ members of Z (the case H = K1).
//!
//! Vertices are processed in a fixed order. A state records, for every
//! processed vertex that still has unprocessed neighbours, which open piece
//! it belongs to, and for every open piece the Z positions it meets. A piece
//! that reaches ℓ members is closed and counted at once; extending a finished
//! piece is never needed.

use crate::error::{Budget, EpError, Result};
use crate::graph::Graph;
use crate::vset::{VSet, Vertex};
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

/// Vertex order of `allowed` with small frontier: the best of id order and
/// BFS orders from a few extreme vertices.
pub fn frontier_order(g: &Graph, allowed: &VSet) -> Vec<Vertex> {
    let mut candidates: Vec<Vec<Vertex>> = vec![allowed.to_vec()];
    let starts: Vec<Vertex> = {
        let mut s = vec![];
        if let Some(f) = allowed.first() {
            s.push(f);
        }
        if let Some(l) = allowed.iter().last() {
            s.push(l);
        }
        let mut by_deg: Vec<Vertex> = allowed.to_vec();
        by_deg.sort_by_key(|&v| (g.neighbors(v).intersection_len(allowed), v));
        s.extend(by_deg.into_iter().take(2));
        s
    };
    for s in starts {
        let mut order = Vec::new();
        let mut seen = VSet::new();
        let mut next = Some(s);
        while let Some(r) = next {
            let o = g.bfs_order(r, allowed);
            seen.extend(o.iter().copied());
            order.extend(o);
            next = allowed.difference(&seen).first();
        }
        candidates.push(order);
    }
    candidates
        .into_iter()
        .min_by_key(|o| frontier_width(g, allowed, o))
        .unwrap_or_default()
}

pub fn frontier_width(g: &Graph, allowed: &VSet, order: &[Vertex]) -> usize {
    let last = last_needed(g, allowed, order);
    let mut width = 0;
    let mut live = 0usize;
    for (i, _) in order.iter().enumerate() {
        live += 1;
        width = width.max(live);
        live -= order[..=i].iter().filter(|&&u| last[u] == i).count();
    }
    width
}

/// For each vertex, the position after which it has no unprocessed neighbour.
fn last_needed(g: &Graph, allowed: &VSet, order: &[Vertex]) -> Vec<usize> {
    let mut pos = vec![usize::MAX; g.id_bound()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut last = vec![0usize; g.id_bound()];
    for &v in order {
        last[v] = g
            .neighbors(v)
            .intersection(allowed)
            .iter()
            .map(|u| pos[u])
            .fold(pos[v], usize::max);
    }
    last
}

/// `min(cap, ν)` where ν is the maximum number of pairwise disjoint connected
/// subsets of `G[allowed]` each meeting at least `l` members of `z`.
///
/// At most `cap` groups are tracked. Each group is a prospective model made
/// of open pieces that must all merge before their frontier vertices retire;
/// a vertex given to a group joins every adjacent piece of that group.
pub fn k1_packing(
    g: &Graph,
    z: &[VSet],
    l: usize,
    allowed: &VSet,
    cap: usize,
    budget: &mut Budget,
) -> Result<usize> {
    if cap == 0 {
        return Ok(0);
    }
    let relevant: Vec<usize> = (0..z.len()).filter(|&i| z[i].intersects(allowed)).collect();
    if relevant.len() < l || l == 0 {
        return Ok(0);
    }
    if relevant.len() > 64 {
        return Err(EpError::InvalidInput(
            "frontier packing supports at most 64 Z members".into(),
        ));
    }
    let mut zbits = vec![0u64; g.id_bound()];
    for (bit, &i) in relevant.iter().enumerate() {
        for v in z[i].intersection(allowed).iter() {
            zbits[v] |= 1 << bit;
        }
    }
    let order = frontier_order(g, allowed);
    let last = last_needed(g, allowed, &order);
    let cap = cap.min(64) as u8;

    let mut frontier: Vec<Vertex> = Vec::new();
    let mut states: FxHashMap<Key, u8> = FxHashMap::default();
    states.insert(Key::default(), 0);
    let mut best = 0u8;

    for (i, &v) in order.iter().enumerate() {
        let nbr_idx: SmallVec<[usize; 8]> = (0..frontier.len())
            .filter(|&j| g.has_edge(frontier[j], v))
            .collect();
        let keep: SmallVec<[bool; 32]> = frontier
            .iter()
            .chain(std::iter::once(&v))
            .map(|&u| last[u] > i)
            .collect();
        let next_frontier: Vec<Vertex> = frontier
            .iter()
            .chain(std::iter::once(&v))
            .zip(keep.iter())
            .filter(|(_, &k)| k)
            .map(|(&u, _)| u)
            .collect();

        let mut next: FxHashMap<Key, u8> = FxHashMap::default();
        for (key, &done) in &states {
            budget.tick(1)?;
            let active = key.masks.len() as u8;
            finish(&mut next, key, 0, done, &keep, l, cap, &mut best);
            for grp in 1..=active + 1 {
                if grp == active + 1 && active + done >= cap {
                    continue;
                }
                let mut st = key.clone();
                if grp == active + 1 {
                    st.masks.push(0);
                }
                st.masks[grp as usize - 1] |= zbits[v];
                // v joins every adjacent piece of its group
                let mut merge: SmallVec<[u8; 8]> = SmallVec::new();
                for &j in &nbr_idx {
                    let p = st.labels[j];
                    if p != 0 && st.groups[p as usize - 1] == grp && !merge.contains(&p) {
                        merge.push(p);
                    }
                }
                let piece = match merge.first() {
                    Some(&p) => {
                        for lab in st.labels.iter_mut() {
                            if merge.contains(lab) {
                                *lab = p;
                            }
                        }
                        p
                    }
                    None => {
                        st.groups.push(grp);
                        st.groups.len() as u8
                    }
                };
                finish(&mut next, &st, piece, done, &keep, l, cap, &mut best);
            }
        }
        if best >= cap {
            return Ok(cap as usize);
        }
        states = next;
        frontier = next_frontier;
    }
    Ok(best as usize)
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
struct Key {
    /// piece id per frontier position, 0 for unused
    labels: SmallVec<[u8; 32]>,
    /// group id per piece
    groups: SmallVec<[u8; 16]>,
    /// Z hits per group
    masks: SmallVec<[u64; 4]>,
}

/// Appends the new vertex's piece, closes completed groups, retires frontier
/// positions, drops states with stranded pieces and stores the canonical form.
#[allow(clippy::too_many_arguments)]
fn finish(
    next: &mut FxHashMap<Key, u8>,
    st: &Key,
    v_piece: u8,
    mut done: u8,
    keep: &[bool],
    l: usize,
    cap: u8,
    best: &mut u8,
) {
    let labels: SmallVec<[u8; 64]> = st
        .labels
        .iter()
        .copied()
        .chain(std::iter::once(v_piece))
        .collect();
    let npieces = st.groups.len();
    let ngroups = st.masks.len();
    let mut pieces_of_group = [0u8; 64];
    let mut present = [false; 256];
    for &p in &labels {
        if p != 0 && !present[p as usize] {
            present[p as usize] = true;
            pieces_of_group[st.groups[p as usize - 1] as usize] += 1;
        }
    }
    // a group with one piece and enough hits is a finished model
    let mut closed = [false; 64];
    for grp in 1..=ngroups {
        if pieces_of_group[grp] == 1 && st.masks[grp - 1].count_ones() as usize >= l {
            closed[grp] = true;
            done = (done + 1).min(cap);
        }
    }
    *best = (*best).max(done);
    let mut retained = [false; 256];
    for (j, &p) in labels.iter().enumerate() {
        if keep[j] && p != 0 {
            retained[p as usize] = true;
        }
    }
    for p in 1..=npieces {
        if present[p] && !retained[p] && !closed[st.groups[p - 1] as usize] {
            return;
        }
    }
    let mut piece_map = [0u8; 256];
    let mut group_map = [0u8; 64];
    let mut out = Key::default();
    for (j, &p) in labels.iter().enumerate() {
        if !keep[j] {
            continue;
        }
        if p == 0 || closed[st.groups[p as usize - 1] as usize] {
            out.labels.push(0);
            continue;
        }
        if piece_map[p as usize] == 0 {
            let grp = st.groups[p as usize - 1] as usize;
            if group_map[grp] == 0 {
                out.masks.push(st.masks[grp - 1]);
                group_map[grp] = out.masks.len() as u8;
            }
            out.groups.push(group_map[grp]);
            piece_map[p as usize] = out.groups.len() as u8;
        }
        out.labels.push(piece_map[p as usize]);
    }
    let e = next.entry(out).or_insert(done);
    if *e < done {
        *e = done;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::grid_graph;

    #[test]
    fn path_has_one() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let z = vec![VSet::singleton(0), VSet::singleton(2)];
        let mut b = Budget::default();
        assert_eq!(k1_packing(&g, &z, 2, g.vertices(), 5, &mut b).unwrap(), 1);
        assert_eq!(k1_packing(&g, &z, 1, g.vertices(), 5, &mut b).unwrap(), 2);
        assert_eq!(k1_packing(&g, &z, 3, g.vertices(), 5, &mut b).unwrap(), 0);
    }

    #[test]
    fn grid_rows_pack() {
        // Z_1 = first column, Z_2 = last column: every row is a model.
        let gg = grid_graph(4, 5).unwrap();
        let z = vec![gg.column(1), gg.column(5)];
        let mut b = Budget::default();
        assert_eq!(
            k1_packing(&gg.graph, &z, 2, gg.graph.vertices(), 10, &mut b).unwrap(),
            4
        );
    }

    #[test]
    fn row_major_grid_width() {
        let gg = grid_graph(6, 6).unwrap();
        let o = frontier_order(&gg.graph, gg.graph.vertices());
        assert!(frontier_width(&gg.graph, gg.graph.vertices(), &o) <= 8);
    }
}
