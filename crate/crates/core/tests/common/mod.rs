//! Reference computations written independently of the library numerics.

#![allow(dead_code)]

use gvbound::polymat::{BiMatrix, UniMatrix};
use twofloat::TwoFloat;

/// Dominant eigenvalue of a dense nonnegative matrix. Right and left Perron
/// vectors come from shifted power iteration; the eigenvalue is their
/// two-sided Rayleigh quotient, whose error is quadratic in the vector error.
pub fn perron(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let t: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect();
    let v = power_vector(a);
    let u = power_vector(&t);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let av: f64 = (0..n).map(|j| a[i][j] * v[j]).sum();
        num += u[i] * av;
        den += u[i] * v[i];
    }
    num / den
}

fn power_vector(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut v = vec![1.0; n];
    for _ in 0..200_000 {
        let mut w = v.clone();
        for i in 0..n {
            for j in 0..n {
                w[i] += a[i][j] * v[j];
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in w.iter_mut() {
            *x /= norm;
        }
        let diff = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = w;
        if diff < 1e-14 {
            break;
        }
    }
    v
}

/// Dense double-double evaluation of a univariate polynomial matrix.
pub fn eval_uni(m: &UniMatrix, t: TwoFloat) -> Vec<Vec<TwoFloat>> {
    let mut out = vec![vec![TwoFloat::from(0.0); m.dim()]; m.dim()];
    for (i, row) in m.rows().iter().enumerate() {
        for (j, p) in row {
            for &(e, c) in p.terms() {
                out[i][*j] += TwoFloat::from(c) * t.powi(e as i32);
            }
        }
    }
    out
}

/// Dense double-double evaluation of a bivariate polynomial matrix.
pub fn eval_bi(m: &BiMatrix, x: TwoFloat, y: TwoFloat) -> Vec<Vec<TwoFloat>> {
    let mut out = vec![vec![TwoFloat::from(0.0); m.dim()]; m.dim()];
    for (i, row) in m.rows().iter().enumerate() {
        for (j, p) in row {
            for &((a, b), c) in p.terms() {
                out[i][*j] += TwoFloat::from(c) * x.powi(a as i32) * y.powi(b as i32);
            }
        }
    }
    out
}

/// Perron eigenvalue in double-double precision. Vectors found in double
/// precision suffice because the two-sided quotient squares their error.
pub fn perron_tf(a: &[Vec<TwoFloat>]) -> TwoFloat {
    let n = a.len();
    let lo: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|&x| f64::from(x)).collect()).collect();
    let t: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| lo[j][i]).collect()).collect();
    let v = power_vector(&lo);
    let u = power_vector(&t);
    let mut num = TwoFloat::from(0.0);
    let mut den = TwoFloat::from(0.0);
    for i in 0..n {
        let mut av = TwoFloat::from(0.0);
        for j in 0..n {
            av += a[i][j] * v[j];
        }
        num += av * u[i];
        den += TwoFloat::from(u[i]) * v[i];
    }
    num / den
}

fn tf(t: f64) -> TwoFloat {
    TwoFloat::from(t)
}

/// Central first difference evaluated in double-double.
pub fn d1_tf(f: impl Fn(TwoFloat) -> TwoFloat, t: f64, h: f64) -> f64 {
    let (t, h) = (tf(t), tf(h));
    f64::from((f(t + h) - f(t - h)) / (h * 2.0))
}

/// Central second difference evaluated in double-double.
pub fn d2_tf(f: impl Fn(TwoFloat) -> TwoFloat, t: f64, h: f64) -> f64 {
    let (t, h) = (tf(t), tf(h));
    f64::from((f(t + h) - f(t) * 2.0 + f(t - h)) / (h * h))
}

/// Central mixed difference evaluated in double-double.
pub fn dxy_tf(f: impl Fn(TwoFloat, TwoFloat) -> TwoFloat, x: f64, y: f64, h: f64) -> f64 {
    let (x, y, h) = (tf(x), tf(y), tf(h));
    f64::from((f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (h * h * 4.0))
}

/// Central first difference.
pub fn d1(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (f(t + h) - f(t - h)) / (2.0 * h)
}

/// Central second difference.
pub fn d2(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h)
}

/// Central mixed difference.
pub fn dxy(f: impl Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> f64 {
    (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// Exhaustive count, by Hamming distance, of ordered pairs of label
/// sequences read along two paths of `n` edges from arbitrary start states.
pub fn path_pair_counts(g: &gvbound::LabelledGraph, n: usize) -> Vec<u64> {
    fn walk(g: &gvbound::LabelledGraph, v: usize, n: usize, acc: u64, out: &mut Vec<u64>) {
        if n == 0 {
            out.push(acc);
            return;
        }
        for e in g.out_edges(v) {
            walk(g, e.to, n - 1, (acc << g.s()) | e.label, out);
        }
    }
    let mut seqs = Vec::new();
    for v in 0..g.num_states() {
        walk(g, v, n, 0, &mut seqs);
    }
    let mut counts = vec![0u64; n * g.s() + 1];
    for &a in &seqs {
        for &b in &seqs {
            counts[(a ^ b).count_ones() as usize] += 1;
        }
    }
    counts
}

/// Binary entropy in bits.
pub fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}
