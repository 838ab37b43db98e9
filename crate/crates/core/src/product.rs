//! Product-graph generating matrices: adjacency `A`, pair matrices `T(y)` and
//! `B(y)`, the marked-edge matrix `C(z)` and the joint matrix `D(x, y)`.

use std::collections::BTreeMap;

use crate::graphs::{Edge, LabelledGraph};
use crate::polymat::{BiMatrix, BiPoly, MatrixBuilder, Signature, UniMatrix, UniPoly, Var};
use crate::singlestate;

/// Index of unordered state pairs `(i, j)`, `i <= j`, in lexicographic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StatePairIndex {
    n: usize,
}

impl StatePairIndex {
    pub fn new(n: usize) -> Self {
        StatePairIndex { n }
    }

    pub fn len(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Position of the pair `{i, j}`; the order of the arguments does not matter.
    pub fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // row i starts after sum_{r<i} (n - r) entries
        i * self.n - i * i.saturating_sub(1) / 2 + (j - i)
    }

    pub fn pair(&self, idx: usize) -> (usize, usize) {
        let mut start = 0;
        for i in 0..self.n {
            let len = self.n - i;
            if idx < start + len {
                return (i, i + idx - start);
            }
            start += len;
        }
        panic!("pair index {idx} out of range");
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (i..self.n).map(move |j| (i, j)))
    }
}

/// Number of edges between each pair of states.
pub fn adjacency_matrix(g: &LabelledGraph) -> UniMatrix {
    let mut b = MatrixBuilder::<UniPoly>::new(g.num_states(), Signature::Constant);
    for e in g.edges() {
        b.add(e.from, e.to, &UniPoly::constant(1.0));
    }
    b.build()
}

fn hamming(a: u64, b: u64) -> u32 {
    (a ^ b).count_ones()
}

/// Default marked edges: for one-bit labels, the edges labelled `1`.
pub fn default_marks(g: &LabelledGraph) -> Option<Vec<bool>> {
    (g.s() == 1).then(|| g.edges().iter().map(|e| e.label == 1).collect())
}

/// Marks the edges whose label has Hamming weight `w`.
pub fn weight_marks(g: &LabelledGraph, w: u32) -> Vec<bool> {
    g.edges().iter().map(|e| e.label.count_ones() == w).collect()
}

/// Ordered pair matrix on `|V|^2` states, `(i, j) -> i * |V| + j`, with entries
/// summing `y^dH` over label pairs.
pub fn build_t(g: &LabelledGraph) -> UniMatrix {
    let n = g.num_states();
    if n == 1 {
        return singlestate_b(g);
    }
    let mut b = MatrixBuilder::<UniPoly>::new(n * n, Signature::Uni(Var::Y));
    for i in 0..n {
        for j in 0..n {
            let mut row: BTreeMap<(usize, u32), f64> = BTreeMap::new();
            for e1 in g.out_edges(i) {
                for e2 in g.out_edges(j) {
                    *row.entry((e1.to * n + e2.to, hamming(e1.label, e2.label)))
                        .or_default() += 1.0;
                }
            }
            for ((col, d), c) in row {
                b.add(i * n + j, col, &UniPoly::monomial(c, d));
            }
        }
    }
    b.build()
}

/// Merges each pair `(i, j)` with `(j, i)`: column `(j, i)` is added to column
/// `(i, j)`, and row and column `(j, i)` are dropped.
pub fn reduce_to_b(t: &UniMatrix, n: usize) -> UniMatrix {
    if t.dim() == 1 {
        return t.clone();
    }
    assert_eq!(t.dim(), n * n, "T must act on ordered state pairs");
    let idx = StatePairIndex::new(n);
    let mut b = MatrixBuilder::<UniPoly>::new(idx.len(), Signature::Uni(Var::Y));
    for (i, j) in idx.pairs() {
        let r = idx.index(i, j);
        for (col, p) in &t.rows()[i * n + j] {
            b.add(r, idx.index(col / n, col % n), p);
        }
    }
    b.build()
}

fn labels_between(g: &LabelledGraph) -> BTreeMap<(usize, usize), Vec<u64>> {
    let mut m: BTreeMap<(usize, usize), Vec<u64>> = BTreeMap::new();
    for e in g.edges() {
        m.entry((e.from, e.to)).or_default().push(e.label);
    }
    m
}

/// Pair matrix on unordered state pairs built entry by entry: the entry from
/// `{i, j}` to `{k, l}` sums `y^dH(a, b)` over labels `a` of `i -> k` and `b`
/// of `j -> l`, plus the crossed matching `i -> l`, `j -> k` when `k != l`.
pub fn build_b(g: &LabelledGraph) -> UniMatrix {
    let n = g.num_states();
    if n == 1 {
        return singlestate_b(g);
    }
    let labels = labels_between(g);
    let none: Vec<u64> = Vec::new();
    let lab = |a: usize, b: usize| labels.get(&(a, b)).unwrap_or(&none);
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut v: Vec<usize> = g.out_edges(i).map(|e| e.to).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let match_sum = |p: &mut UniPoly, la: &[u64], lb: &[u64]| {
        for &a in la {
            for &b in lb {
                p.add_term(1.0, hamming(a, b));
            }
        }
    };

    let idx = StatePairIndex::new(n);
    let mut b = MatrixBuilder::<UniPoly>::new(idx.len(), Signature::Uni(Var::Y));
    for (i, j) in idx.pairs() {
        let mut targets: Vec<(usize, usize)> = Vec::new();
        for &k in &succ[i] {
            for &l in &succ[j] {
                targets.push((k.min(l), k.max(l)));
            }
        }
        targets.sort_unstable();
        targets.dedup();
        for (k, l) in targets {
            let mut p = UniPoly::zero();
            match_sum(&mut p, lab(i, k), lab(j, l));
            if k != l {
                match_sum(&mut p, lab(i, l), lab(j, k));
            }
            b.add(idx.index(i, j), idx.index(k, l), &p);
        }
    }
    b.build()
}

fn singlestate_b(g: &LabelledGraph) -> UniMatrix {
    let labels: Vec<u64> = g.edges().iter().map(|e| e.label).collect();
    let prof = singlestate::distance_profile(&labels, g.s());
    let mut b = MatrixBuilder::<UniPoly>::new(1, Signature::Uni(Var::Y));
    for (t, &c) in prof.iter().enumerate() {
        b.add(0, 0, &UniPoly::monomial(c as f64, t as u32));
    }
    b.build()
}

/// Entry `z` per marked edge and `1` per unmarked edge.
pub fn build_c(g: &LabelledGraph, marks: &[bool]) -> UniMatrix {
    assert_eq!(marks.len(), g.edges().len());
    let mut b = MatrixBuilder::<UniPoly>::new(g.num_states(), Signature::Uni(Var::Z));
    for (e, &m) in g.edges().iter().zip(marks) {
        b.add(e.from, e.to, &UniPoly::monomial(1.0, m as u32));
    }
    b.build()
}

/// Joint matrix on unordered pairs: each pair of edges contributes
/// `x^(marked count) * y^dH`.
pub fn build_d(g: &LabelledGraph, marks: &[bool]) -> BiMatrix {
    assert_eq!(marks.len(), g.edges().len());
    let n = g.num_states();
    if n == 1 {
        let labels: Vec<u64> = g.edges().iter().map(|e| e.label).collect();
        let part = singlestate::partition_profile(&labels, marks, g.s());
        let mut b = MatrixBuilder::<BiPoly>::new(1, Signature::XY);
        for t in 0..=g.s() {
            b.add(0, 0, &BiPoly::monomial(part.alpha[t] as f64, 2, t as u32));
            b.add(0, 0, &BiPoly::monomial(part.beta[t] as f64, 1, t as u32));
            b.add(0, 0, &BiPoly::monomial(part.gamma[t] as f64, 0, t as u32));
        }
        return b.build();
    }
    let out: Vec<Vec<(usize, &Edge)>> = (0..n)
        .map(|i| {
            g.edges()
                .iter()
                .enumerate()
                .filter(|(_, e)| e.from == i)
                .collect()
        })
        .collect();
    let idx = StatePairIndex::new(n);
    let mut b = MatrixBuilder::<BiPoly>::new(idx.len(), Signature::XY);
    for (i, j) in idx.pairs() {
        let r = idx.index(i, j);
        for &(k1, e1) in &out[i] {
            for &(k2, e2) in &out[j] {
                let ex = marks[k1] as u32 + marks[k2] as u32;
                b.add(
                    r,
                    idx.index(e1.to, e2.to),
                    &BiPoly::monomial(1.0, ex, hamming(e1.label, e2.label)),
                );
            }
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_rll, build_secc, build_swcc};

    fn dense_y(m: &UniMatrix, y: f64) -> Vec<Vec<f64>> {
        m.eval(y).unwrap().to_dense()
    }

    #[test]
    fn pair_index_is_lexicographic() {
        let idx = StatePairIndex::new(3);
        let order: Vec<_> = idx.pairs().collect();
        assert_eq!(order, vec![(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]);
        for (k, &(i, j)) in order.iter().enumerate() {
            assert_eq!(idx.index(i, j), k);
            assert_eq!(idx.index(j, i), k);
            assert_eq!(idx.pair(k), (i, j));
        }
        let big = StatePairIndex::new(7);
        for (k, (i, j)) in big.pairs().enumerate() {
            assert_eq!(big.index(i, j), k);
        }
    }

    #[test]
    fn swcc_3_2_b_matrix() {
        let g = build_swcc(3, 2).unwrap();
        let b = build_b(&g);
        // evaluated at y = 3 so that 1, y and 2y are distinguishable
        let want = vec![
            vec![1.0, 6.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 3.0, 0.0],
            vec![1.0, 3.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        ];
        assert_eq!(dense_y(&b, 3.0), want);
        assert_eq!(reduce_to_b(&build_t(&g), 3), b);
    }

    #[test]
    fn swcc_3_2_c_and_d() {
        let g = build_swcc(3, 2).unwrap();
        let marks = default_marks(&g).unwrap();
        let c = build_c(&g, &marks).eval(5.0).unwrap().to_dense();
        assert_eq!(c, vec![vec![5.0, 1.0, 0.0], vec![0.0, 0.0, 5.0], vec![5.0, 0.0, 0.0]]);
        let d = build_d(&g, &marks);
        let (x, y) = (2.0, 3.0);
        let want = vec![
            vec![x * x, 2.0 * x * y, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, x * x, 0.0, x * y, 0.0],
            vec![x * x, x * y, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, x * x],
            vec![0.0, 0.0, x * x, 0.0, 0.0, 0.0],
            vec![x * x, 0.0, 0.0, 0.0, 0.0, 0.0],
        ];
        assert_eq!(d.eval(x, y).unwrap().to_dense(), want);
    }

    #[test]
    fn d_at_unit_x_is_b() {
        for g in [build_swcc(4, 2).unwrap(), build_rll(1, 3).unwrap()] {
            let marks = default_marks(&g).unwrap();
            let d = build_d(&g, &marks);
            let b = build_b(&g);
            for y in [0.0, 0.3, 1.0, 2.5] {
                assert_eq!(d.eval(1.0, y).unwrap(), b.eval(y).unwrap());
            }
        }
    }

    #[test]
    fn single_state_secc_matrices() {
        let g = build_secc(3, 2).unwrap();
        let t = build_t(&g);
        assert_eq!(t.dump(), "0 0 4*y^0+6*y^1+6*y^2\n");
        let marks = weight_marks(&g, 2);
        assert_eq!(build_c(&g, &marks).dump(), "0 0 1*z^0+3*z^1\n");
        assert_eq!(build_d(&g, &marks).dump(), "0 0 1*x^0*y^0+6*x^1*y^1+3*x^2*y^0+6*x^2*y^2\n");
    }

    #[test]
    fn adjacency_counts_parallel_edges() {
        let g = build_secc(3, 2).unwrap();
        assert_eq!(adjacency_matrix(&g).constant_values().to_dense(), vec![vec![4.0]]);
    }
}
