//! Builders for the small graphs used throughout the tests and the shipped fixture files.
//! All are built in d = 4.

use crate::graph::{EdgeSet, Graph};

fn labelled(labels: &[&str], edges: &[(usize, usize)]) -> Graph {
    Graph::new(labels.iter().map(|s| s.to_string()).collect(), edges.to_vec(), 4).expect("valid fixture")
}

/// Two vertices joined by two parallel edges.
pub fn fish() -> Graph {
    Graph::from_edges(2, &[(0, 1), (0, 1)], 4).unwrap()
}

/// Triangle with a doubled side: e1=(v1,v2), e2=(v1,v3), e3=(v2,v3), e4=(v2,v3).
pub fn dunce() -> Graph {
    labelled(&["v1", "v2", "v3"], &[(0, 1), (0, 2), (1, 2), (1, 2)])
}

/// The fish {e3, e4} inside the dunce's cap.
pub fn dunce_fish() -> EdgeSet {
    EdgeSet::from_indices([2, 3])
}

/// Triangle: a=(1,2), b=(2,3), c=(1,3).
pub fn k3() -> Graph {
    labelled(&["1", "2", "3"], &[(0, 1), (1, 2), (0, 2)])
}

/// Complete graph on four vertices: a=(1,2), b=(2,3), c=(3,4), d=(4,1), e=(2,4), f=(1,3).
pub fn k4() -> Graph {
    labelled(&["1", "2", "3", "4"], &[(0, 1), (1, 2), (2, 3), (3, 0), (1, 3), (0, 2)])
}

/// The three perfect matchings of `k4`: ac, bd, ef.
pub fn k4_matchings() -> [EdgeSet; 3] {
    [EdgeSet::from_indices([0, 2]), EdgeSet::from_indices([1, 3]), EdgeSet::from_indices([4, 5])]
}

/// The four triangles of `k4`.
pub fn k4_triangles() -> [EdgeSet; 4] {
    // 123: a b f, 234: b c e, 341: c d f, 412: d a e
    [
        EdgeSet::from_indices([0, 1, 5]),
        EdgeSet::from_indices([1, 2, 4]),
        EdgeSet::from_indices([2, 3, 5]),
        EdgeSet::from_indices([0, 3, 4]),
    ]
}

/// Chain of `n` fishes closed into a ring: fish k sits on {2k-2, 2k-1} and consecutive fishes
/// are joined by (2k-1, 2k) and (2k-2, 2k+1).
pub fn bubble(n: usize) -> Graph {
    assert!(n >= 1);
    let mut edges = vec![(0, 1), (0, 1)];
    for k in 1..n {
        let (a, b) = (2 * k - 2, 2 * k - 1);
        edges.push((b, 2 * k));
        edges.push((a, 2 * k + 1));
        edges.push((2 * k, 2 * k + 1));
        edges.push((2 * k, 2 * k + 1));
    }
    Graph::from_edges(2 * n, &edges, 4).unwrap()
}

/// In `bubble(n)`: the full subgraph on the `k` consecutive fishes starting at fish `l` (1-based).
pub fn bubble_block(n: usize, k: usize, l: usize) -> EdgeSet {
    assert!(k >= 1 && l >= 1 && l + k - 1 <= n);
    let g = bubble(n);
    let lo = 2 * l - 2;
    let hi = lo + 2 * k - 1;
    EdgeSet::from_indices((0..g.n_edges()).filter(|&e| {
        let (a, b) = g.edges()[e];
        (lo..=hi).contains(&a) && (lo..=hi).contains(&b)
    }))
}

/// Nested insertions: double edge (0,1), then vertex i ≥ 2 joined to i-2 and i-1.
pub fn insertion(n: usize) -> Graph {
    assert!(n >= 1);
    let mut edges = vec![(0, 1), (0, 1)];
    for i in 2..=n {
        edges.push((i - 2, i));
        edges.push((i - 1, i));
    }
    Graph::from_edges(n + 1, &edges, 4).unwrap()
}

/// In `insertion(n)`: the full subgraph on vertices 0..=i.
pub fn insertion_level(i: usize) -> EdgeSet {
    EdgeSet::full(2 * i)
}

/// Two fish chains of lengths `n` and `m` closed into a ring by (0, n+m+1) and (n, n+1).
/// Edges: left fishes, right fishes, then the two closing edges.
pub fn nm_bubble(n: usize, m: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 1..=n {
        edges.push((i - 1, i));
        edges.push((i - 1, i));
    }
    for j in 1..=m {
        edges.push((n + j, n + j + 1));
        edges.push((n + j, n + j + 1));
    }
    edges.push((0, n + m + 1));
    edges.push((n, n + 1));
    Graph::from_edges(n + m + 2, &edges, 4).unwrap()
}

/// Left fish `i` (1-based) of `nm_bubble`.
pub fn nm_left(i: usize) -> EdgeSet {
    EdgeSet::from_indices([2 * i - 2, 2 * i - 1])
}

/// Right fish `j` (1-based) of `nm_bubble(n, _)`.
pub fn nm_right(n: usize, j: usize) -> EdgeSet {
    EdgeSet::from_indices([2 * n + 2 * j - 2, 2 * n + 2 * j - 1])
}

/// Every named builder with its fixture file stem.
pub fn all_named() -> Vec<(&'static str, Graph)> {
    vec![
        ("fish", fish()),
        ("dunce", dunce()),
        ("k3", k3()),
        ("k4", k4()),
        ("bubble2", bubble(2)),
        ("bubble3", bubble(3)),
        ("insertion2", insertion(2)),
        ("insertion3", insertion(3)),
        ("nm_bubble11", nm_bubble(1, 1)),
        ("nm_bubble21", nm_bubble(2, 1)),
    ]
}
