//! Exhaustive enumeration of small graphs.

use crate::graph::Graph;

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn connected(n: usize, mask: u32, pairs: &[(usize, usize)]) -> bool {
    let mut reach = 1u32;
    loop {
        let mut next = reach;
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 && (reach >> u & 1 == 1 || reach >> v & 1 == 1) {
                next |= 1 << u | 1 << v;
            }
        }
        if next == reach {
            return reach.count_ones() as usize == n;
        }
        reach = next;
    }
}

/// One representative of every isomorphism class of connected graphs on `n`
/// vertices (`1 <= n <= 7`), each the least edge mask in its class.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!((1..=7).contains(&n), "enumeration supports 1..=7 vertices");
    let ps = pairs(n);
    let mut index = vec![vec![0usize; n]; n];
    for (i, &(u, v)) in ps.iter().enumerate() {
        index[u][v] = i;
        index[v][u] = i;
    }
    let perms = permutations(n);
    // Each permutation as a map on pair indices.
    let maps: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| ps.iter().map(|&(u, v)| index[p[u]][p[v]]).collect())
        .collect();
    let mut out = Vec::new();
    'masks: for mask in 0u32..1 << ps.len() {
        if !connected(n, mask, &ps) {
            continue;
        }
        for map in &maps {
            let mut img = 0u32;
            for (i, &j) in map.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    img |= 1 << j;
                }
            }
            if img < mask {
                continue 'masks;
            }
        }
        let edges: Vec<(usize, usize)> = (0..ps.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| ps[i])
            .collect();
        out.push(Graph::from_edges(n, &edges).expect("pairs are simple"));
    }
    out
}
