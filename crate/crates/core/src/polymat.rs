//! Sparse matrices with polynomial entries and their numeric evaluations.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    fn symbol(self) -> char {
        match self {
            Var::X => 'x',
            Var::Y => 'y',
            Var::Z => 'z',
        }
    }
}

/// Which indeterminates a matrix's entries use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signature {
    Constant,
    Uni(Var),
    /// Entries in `x` and `y`.
    XY,
}

/// Sparse univariate polynomial with terms sorted by exponent.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct UniPoly {
    terms: Vec<(u32, f64)>,
}

impl UniPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: f64, e: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(c, e);
        p
    }

    pub fn from_coeffs(coeffs: &[f64]) -> Self {
        let mut p = Self::zero();
        for (e, &c) in coeffs.iter().enumerate() {
            p.add_term(c, e as u32);
        }
        p
    }

    pub fn add_term(&mut self, c: f64, e: u32) {
        if c == 0.0 {
            return;
        }
        match self.terms.binary_search_by_key(&e, |t| t.0) {
            Ok(i) => {
                self.terms[i].1 += c;
                if self.terms[i].1 == 0.0 {
                    self.terms.remove(i);
                }
            }
            Err(i) => self.terms.insert(i, (e, c)),
        }
    }

    pub fn add(&mut self, other: &UniPoly) {
        for &(e, c) in &other.terms {
            self.add_term(c, e);
        }
    }

    pub fn terms(&self) -> &[(u32, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.last().map(|t| t.0)
    }

    pub fn coefficient(&self, e: u32) -> f64 {
        self.terms
            .binary_search_by_key(&e, |t| t.0)
            .map(|i| self.terms[i].1)
            .unwrap_or(0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|&(e, c)| c * t.powi(e as i32)).sum()
    }

    pub fn derivative(&self) -> UniPoly {
        let mut p = UniPoly::zero();
        for &(e, c) in &self.terms {
            if e > 0 {
                p.add_term(c * e as f64, e - 1);
            }
        }
        p
    }

    fn write(&self, var: Option<Var>, out: &mut String) {
        if self.terms.is_empty() {
            out.push('0');
            return;
        }
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push('+');
            }
            match var {
                Some(v) => write!(out, "{c}*{}^{e}", v.symbol()).unwrap(),
                None => write!(out, "{c}").unwrap(),
            }
        }
    }
}

/// Sparse polynomial in `x` and `y`; exponents are `(x, y)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BiPoly {
    terms: Vec<((u32, u32), f64)>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(c: f64, ex: u32, ey: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(c, ex, ey);
        p
    }

    pub fn add_term(&mut self, c: f64, ex: u32, ey: u32) {
        if c == 0.0 {
            return;
        }
        match self.terms.binary_search_by_key(&(ex, ey), |t| t.0) {
            Ok(i) => {
                self.terms[i].1 += c;
                if self.terms[i].1 == 0.0 {
                    self.terms.remove(i);
                }
            }
            Err(i) => self.terms.insert(i, ((ex, ey), c)),
        }
    }

    pub fn add(&mut self, other: &BiPoly) {
        for &((a, b), c) in &other.terms {
            self.add_term(c, a, b);
        }
    }

    pub fn terms(&self) -> &[((u32, u32), f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|&((a, b), c)| c * x.powi(a as i32) * y.powi(b as i32))
            .sum()
    }

    pub fn derivative(&self, var: Var) -> BiPoly {
        let mut p = BiPoly::zero();
        for &((a, b), c) in &self.terms {
            match var {
                Var::X if a > 0 => p.add_term(c * a as f64, a - 1, b),
                Var::Y if b > 0 => p.add_term(c * b as f64, a, b - 1),
                _ => {}
            }
        }
        p
    }

    /// Coefficient of `x^k`, as a polynomial in `y`.
    pub fn x_coefficient(&self, k: u32) -> UniPoly {
        let mut p = UniPoly::zero();
        for &((a, b), c) in &self.terms {
            if a == k {
                p.add_term(c, b);
            }
        }
        p
    }

    pub fn x_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.0 .0).max()
    }

    fn write(&self, out: &mut String) {
        if self.terms.is_empty() {
            out.push('0');
            return;
        }
        for (i, &((a, b), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push('+');
            }
            write!(out, "{c}*x^{a}*y^{b}").unwrap();
        }
    }
}

/// Square sparse matrix, one list of `(column, entry)` per row sorted by column.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePolyMatrix<P> {
    dim: usize,
    signature: Signature,
    rows: Vec<Vec<(usize, P)>>,
}

pub type UniMatrix = SparsePolyMatrix<UniPoly>;
pub type BiMatrix = SparsePolyMatrix<BiPoly>;

impl<P> SparsePolyMatrix<P> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn rows(&self) -> &[Vec<(usize, P)>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&P> {
        let row = &self.rows[i];
        row.binary_search_by_key(&j, |t| t.0).ok().map(|k| &row[k].1)
    }

    fn map_entries<Q>(&self, signature: Signature, f: impl Fn(&P) -> Option<Q>) -> SparsePolyMatrix<Q> {
        SparsePolyMatrix {
            dim: self.dim,
            signature,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().filter_map(|(j, p)| f(p).map(|q| (*j, q))).collect())
                .collect(),
        }
    }

    fn eval_with(&self, f: impl Fn(&P) -> f64) -> NumMatrix {
        let mut row_ptr = Vec::with_capacity(self.dim + 1);
        let mut cols = Vec::with_capacity(self.nnz());
        let mut vals = Vec::with_capacity(self.nnz());
        row_ptr.push(0);
        for row in &self.rows {
            for (j, p) in row {
                let v = f(p);
                if v != 0.0 {
                    cols.push(*j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        NumMatrix {
            dim: self.dim,
            row_ptr,
            cols,
            vals,
        }
    }
}

fn check_point(v: f64, var: Var) -> Result<()> {
    if v.is_nan() || v < 0.0 || v.is_infinite() {
        return Err(Error::Domain(format!(
            "cannot evaluate at {}={v}: indeterminates must be finite and non-negative",
            var.symbol()
        )));
    }
    Ok(())
}

/// Accumulates entries by `(row, column)`; later entries are added to earlier ones.
pub struct MatrixBuilder<P> {
    dim: usize,
    signature: Signature,
    rows: Vec<Vec<(usize, P)>>,
}

impl MatrixBuilder<UniPoly> {
    pub fn add(&mut self, i: usize, j: usize, p: &UniPoly) {
        let row = &mut self.rows[i];
        match row.binary_search_by_key(&j, |t| t.0) {
            Ok(k) => row[k].1.add(p),
            Err(k) => row.insert(k, (j, p.clone())),
        }
    }

    pub fn build(self) -> UniMatrix {
        let rows = self
            .rows
            .into_iter()
            .map(|r| r.into_iter().filter(|(_, p)| !p.is_zero()).collect())
            .collect();
        SparsePolyMatrix {
            dim: self.dim,
            signature: self.signature,
            rows,
        }
    }
}

impl MatrixBuilder<BiPoly> {
    pub fn add(&mut self, i: usize, j: usize, p: &BiPoly) {
        let row = &mut self.rows[i];
        match row.binary_search_by_key(&j, |t| t.0) {
            Ok(k) => row[k].1.add(p),
            Err(k) => row.insert(k, (j, p.clone())),
        }
    }

    pub fn build(self) -> BiMatrix {
        let rows = self
            .rows
            .into_iter()
            .map(|r| r.into_iter().filter(|(_, p)| !p.is_zero()).collect())
            .collect();
        SparsePolyMatrix {
            dim: self.dim,
            signature: self.signature,
            rows,
        }
    }
}

impl<P> MatrixBuilder<P> {
    pub fn new(dim: usize, signature: Signature) -> Self {
        MatrixBuilder {
            dim,
            signature,
            rows: (0..dim).map(|_| Vec::new()).collect(),
        }
    }
}

impl UniMatrix {
    fn var(&self) -> Option<Var> {
        match self.signature {
            Signature::Uni(v) => Some(v),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> Result<NumMatrix> {
        if let Some(v) = self.var() {
            check_point(t, v)?;
        }
        Ok(self.eval_with(|p| p.eval(t)))
    }

    /// Evaluation of a matrix with constant entries.
    pub fn constant_values(&self) -> NumMatrix {
        self.eval_with(|p| p.coefficient(0))
    }

    /// `order`-th derivative with respect to `var`; zero when `var` does not appear.
    pub fn derivative(&self, var: Var, order: u32) -> UniMatrix {
        if self.var() != Some(var) {
            return self.map_entries(self.signature, |_| None);
        }
        self.map_entries(self.signature, |p| {
            let mut d = p.clone();
            for _ in 0..order {
                d = d.derivative();
            }
            (!d.is_zero()).then_some(d)
        })
    }

    /// Matrix of the coefficients of `t^k`, with constant entries.
    pub fn coefficient_matrix(&self, k: u32) -> UniMatrix {
        self.map_entries(Signature::Constant, |p| {
            let c = p.coefficient(k);
            (c != 0.0).then(|| UniPoly::constant(c))
        })
    }

    /// One line per nonzero entry: `row col poly`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, row) in self.rows.iter().enumerate() {
            for (j, p) in row {
                write!(out, "{i} {j} ").unwrap();
                p.write(self.var(), &mut out);
                out.push('\n');
            }
        }
        out
    }
}

impl BiMatrix {
    pub fn eval(&self, x: f64, y: f64) -> Result<NumMatrix> {
        check_point(x, Var::X)?;
        check_point(y, Var::Y)?;
        Ok(self.eval_with(|p| p.eval(x, y)))
    }

    pub fn derivative(&self, var: Var, order: u32) -> BiMatrix {
        self.map_entries(Signature::XY, |p| {
            let mut d = p.clone();
            for _ in 0..order {
                d = d.derivative(var);
            }
            (!d.is_zero()).then_some(d)
        })
    }

    /// Coefficient of `x^k`; the result is a matrix in `y`.
    pub fn coefficient_matrix(&self, k: u32) -> UniMatrix {
        self.map_entries(Signature::Uni(Var::Y), |p| {
            let q = p.x_coefficient(k);
            (!q.is_zero()).then_some(q)
        })
    }

    /// Substitutes `x = value`, leaving a matrix in `y`.
    pub fn fix_x(&self, value: f64) -> UniMatrix {
        self.map_entries(Signature::Uni(Var::Y), |p| {
            let mut q = UniPoly::zero();
            for &((a, b), c) in p.terms() {
                q.add_term(c * value.powi(a as i32), b);
            }
            (!q.is_zero()).then_some(q)
        })
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, row) in self.rows.iter().enumerate() {
            for (j, p) in row {
                write!(out, "{i} {j} ").unwrap();
                p.write(&mut out);
                out.push('\n');
            }
        }
        out
    }
}

/// Numeric sparse matrix in compressed row form.
#[derive(Clone, Debug, PartialEq)]
pub struct NumMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl NumMatrix {
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for row in rows {
            assert_eq!(row.len(), dim, "matrix must be square");
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        NumMatrix {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.cols[lo..hi].binary_search(&j) {
            Ok(k) => self.vals[lo + k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Column indices stored in row `i`.
    pub fn row_cols(&self, i: usize) -> &[usize] {
        &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn is_zero(&self) -> bool {
        self.vals.iter().all(|&v| v == 0.0)
    }

    /// Principal submatrix on the sorted index set `idx`.
    pub fn submatrix(&self, idx: &[usize]) -> NumMatrix {
        let mut pos = vec![usize::MAX; self.dim];
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = k;
        }
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for &i in idx {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = pos[self.cols[k]];
                if j != usize::MAX {
                    cols.push(j);
                    vals.push(self.vals[k]);
                }
            }
            row_ptr.push(cols.len());
        }
        NumMatrix {
            dim: idx.len(),
            row_ptr,
            cols,
            vals,
        }
    }

    /// `out = self * v`.
    pub fn mul_vec(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..self.dim {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * v[self.cols[k]];
            }
            out[i] = acc;
        }
    }

    /// `out += self * v`.
    pub fn mul_vec_add(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..self.dim {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * v[self.cols[k]];
            }
            out[i] += acc;
        }
    }

    pub fn mean_row_sum(&self) -> f64 {
        if self.dim == 0 {
            return 0.0;
        }
        self.vals.iter().sum::<f64>() / self.dim as f64
    }

    pub fn max_abs_diff(&self, other: &NumMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(|k| self.cols[k])
                .chain((other.row_ptr[i]..other.row_ptr[i + 1]).map(|k| other.cols[k]))
            {
                worst = worst.max((self.get(i, j) - other.get(i, j)).abs());
            }
        }
        worst
    }
}
