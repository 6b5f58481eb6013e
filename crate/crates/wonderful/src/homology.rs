//! Betti numbers of the complement of the divergent arrangement.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::graph::{Dsu, EdgeSet};
use crate::lattice::SubgraphPoset;

/// Map from homological degree to rank; degrees with rank zero are omitted.
pub type BettiTable = BTreeMap<i64, u64>;

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Closed form from atom counts: choosing `m_i` of the `n_i` atoms of dimension `d·i`
/// contributes `∏ C(n_i, m_i)` in degree `Σ m_i (d·i − 1)`.
pub fn homology_from_atoms(lattice: &SubgraphPoset) -> BettiTable {
    let d = lattice.graph().dim() as i64;
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    for a in lattice.atoms() {
        *counts.entry(lattice.grade(a)).or_default() += 1;
    }
    let mut table: BettiTable = BTreeMap::from([(0, 1)]);
    for (&i, &n) in &counts {
        let mut next = BettiTable::new();
        for (&k, &r) in &table {
            for m in 0..=n {
                *next.entry(k + m as i64 * (d * i - 1)).or_default() += r * binom(n, m);
            }
        }
        table = next;
    }
    table
}

/// Vertex partition as a sorted list of blocks (vertex masks), singletons dropped.
type Partition = Vec<u64>;

fn partition_of(lattice: &SubgraphPoset, atoms: &[EdgeSet]) -> Partition {
    let g = lattice.graph();
    let mut dsu = Dsu::new(g.n_vertices());
    for a in atoms {
        for e in a.iter() {
            let (x, y) = g.edges()[e];
            dsu.union(x, y);
        }
    }
    let mut blocks: BTreeMap<usize, u64> = BTreeMap::new();
    for v in 0..g.n_vertices() {
        *blocks.entry(dsu.find(v)).or_default() |= 1 << v;
    }
    let mut out: Vec<u64> = blocks.into_values().filter(|b| b.count_ones() > 1).collect();
    out.sort();
    out
}

/// `p` refines `q` (every block of `p` inside a block of `q`).
fn refines(p: &Partition, q: &Partition) -> bool {
    p.iter().all(|&b| q.iter().any(|&c| b & !c == 0))
}

/// Independent computation through the Goresky–MacPherson formula: builds the intersection
/// lattice of the atom subspaces as vertex partitions and sums reduced homology of the order
/// complexes of its open lower intervals.
pub fn homology_gm_oracle(lattice: &SubgraphPoset) -> BettiTable {
    let d = lattice.graph().dim() as i64;
    let atoms = lattice.atoms();
    let mut elems: BTreeSet<Partition> = BTreeSet::new();
    for mask in 0u64..(1 << atoms.len()) {
        let chosen: Vec<EdgeSet> = (0..atoms.len()).filter(|&i| mask >> i & 1 == 1).map(|i| atoms[i]).collect();
        elems.insert(partition_of(lattice, &chosen));
    }
    let elems: Vec<Partition> = elems.into_iter().collect();
    let rank = |p: &Partition| d * p.iter().map(|b| b.count_ones() as i64 - 1).sum::<i64>();
    let bottom: Partition = Vec::new();
    let mut table = BettiTable::new();
    for a in &elems {
        let r = rank(a);
        if *a == bottom {
            *table.entry(0).or_default() += 1;
            continue;
        }
        let open: Vec<&Partition> = elems.iter().filter(|p| **p != bottom && *p != a && refines(p, a)).collect();
        if open.is_empty() {
            *table.entry(r - 1).or_default() += 1;
            continue;
        }
        let lt: Vec<Vec<bool>> =
            open.iter().map(|p| open.iter().map(|q| p != q && refines(p, q)).collect()).collect();
        for (j, b) in reduced_betti_of_order_complex(&lt).into_iter().enumerate() {
            if b > 0 {
                *table.entry(r - 2 - j as i64).or_default() += b;
            }
        }
    }
    table.retain(|_, v| *v > 0);
    table
}

/// Reduced Betti numbers (degree 0, 1, ...) of the order complex of a poset given by its strict
/// order matrix. Nonempty posets only.
pub fn reduced_betti_of_order_complex(lt: &[Vec<bool>]) -> Vec<u64> {
    let n = lt.len();
    // Chains, grouped by length; each chain is increasing.
    let mut faces: Vec<Vec<Vec<usize>>> = vec![(0..n).map(|i| vec![i]).collect()];
    loop {
        let last = faces.last().unwrap();
        let next: Vec<Vec<usize>> = last
            .iter()
            .flat_map(|c| {
                let top = *c.last().unwrap();
                (0..n).filter(move |&j| lt[top][j]).map(move |j| {
                    let mut c2 = c.clone();
                    c2.push(j);
                    c2
                })
            })
            .collect();
        if next.is_empty() {
            break;
        }
        faces.push(next);
    }
    // Augmented chain complex: C_{-1} = Q.
    let dims: Vec<usize> = faces.iter().map(|f| f.len()).collect();
    let mut ranks = vec![0usize; faces.len() + 1];
    // rank of ∂_0: C_0 → C_{-1} is 1.
    ranks[0] = 1;
    for k in 1..faces.len() {
        let index: BTreeMap<&Vec<usize>, usize> = faces[k - 1].iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut m = vec![vec![BigRational::zero(); faces[k].len()]; faces[k - 1].len()];
        for (col, f) in faces[k].iter().enumerate() {
            for skip in 0..f.len() {
                let mut sub = f.clone();
                sub.remove(skip);
                let row = index[&sub];
                m[row][col] = if skip % 2 == 0 { BigRational::one() } else { -BigRational::one() };
            }
        }
        ranks[k] = rank(m);
    }
    (0..faces.len()).map(|k| (dims[k] - ranks[k] - ranks[k + 1]) as u64).collect()
}

/// Rank by exact Gaussian elimination.
pub fn rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &pivot;
                for j in c..cols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}
