//! Enumeration of connected vertex subsets (ESU algorithm).

/// All connected `k`-subsets of the graph restricted to `allowed` vertices,
/// each sorted ascending, returned in lexicographic order.
pub fn connected_subsets(neighbors: &[Vec<usize>], allowed: &[bool], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let n = neighbors.len();
    for v in (0..n).filter(|&v| allowed[v]) {
        let ext: Vec<usize> = neighbors[v].iter().copied().filter(|&u| u > v && allowed[u]).collect();
        extend(neighbors, allowed, k, v, &mut vec![v], ext, &mut out);
    }
    for s in &mut out {
        s.sort_unstable();
    }
    out.sort();
    out
}

fn extend(
    neighbors: &[Vec<usize>],
    allowed: &[bool],
    k: usize,
    root: usize,
    sub: &mut Vec<usize>,
    mut ext: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if sub.len() == k {
        out.push(sub.clone());
        return;
    }
    while let Some(w) = ext.pop() {
        // Exclusive neighbourhood of w: not in sub, not adjacent to sub.
        let mut next = ext.clone();
        for &u in &neighbors[w] {
            if u <= root || !allowed[u] || sub.contains(&u) || next.contains(&u) {
                continue;
            }
            if sub.iter().any(|&s| neighbors[s].contains(&u)) {
                continue;
            }
            next.push(u);
        }
        sub.push(w);
        extend(neighbors, allowed, k, root, sub, next, out);
        sub.pop();
    }
}

/// Whether `vertices` induce a connected subgraph.
pub fn is_connected(neighbors: &[Vec<usize>], vertices: &[usize]) -> bool {
    let Some(&first) = vertices.first() else {
        return true;
    };
    let mut seen = vec![first];
    let mut stack = vec![first];
    while let Some(v) = stack.pop() {
        for &u in &neighbors[v] {
            if vertices.contains(&u) && !seen.contains(&u) {
                seen.push(u);
                stack.push(u);
            }
        }
    }
    seen.len() == vertices.len()
}
