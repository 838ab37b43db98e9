//! Power iterations returning the dominant eigenvalue of a nonnegative matrix
//! together with derivatives of that eigenvalue.
//!
//! Reducible matrices are split into the irreducible diagonal blocks of their
//! combined sparsity pattern and each block is iterated on its own, since
//! blocks with close eigenvalues would otherwise make convergence arbitrarily
//! slow. The block with the largest eigenvalue wins.
//!
//! Derivative estimates take the norm of the residual vector signed by its
//! projection on the current eigenvector estimate, so decreasing eigenvalues
//! come out with the right sign.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polymat::NumMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub power_tol: f64,
    pub power_max_iter: usize,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Diagonal shift as a multiple of the mean row sum. Zero disables it;
    /// a positive value makes periodic matrices converge.
    pub shift: f64,
    /// Range of `x` scanned for the maximiser of the distance at `y = 1` in
    /// the GV-MR procedures; its ends stand in for the limits `0` and `∞`.
    pub x_lo: f64,
    pub x_hi: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            power_tol: 1e-10,
            power_max_iter: 100_000,
            newton_tol: 1e-8,
            newton_max_iter: 100,
            shift: 0.0,
            x_lo: 1e-3,
            x_hi: 1e3,
        }
    }
}

impl SolverConfig {
    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.power_tol > 0.0
            && self.newton_tol > 0.0
            && self.power_max_iter > 0
            && self.newton_max_iter > 0
            && self.shift >= 0.0
            && self.shift.is_finite()
            && self.x_lo > 0.0
            && self.x_lo < 1.0
            && self.x_hi > 1.0
            && self.x_hi.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameters(format!("bad solver configuration {self:?}")))
        }
    }
}

/// Dominant eigenvalue with derivatives. For one variable `grad[0]` and
/// `hess[0]` hold the first and second derivative; for two variables `grad`
/// is `[x, y]` and `hess` is `[xx, yy, xy]`. Unrequested entries are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPack {
    pub lambda: f64,
    pub grad: [f64; 2],
    pub hess: [f64; 3],
    pub eigvec: Vec<f64>,
    pub iterations: usize,
}

impl EigenPack {
    pub fn d1(&self) -> f64 {
        self.grad[0]
    }
    pub fn d2(&self) -> f64 {
        self.hess[0]
    }
    pub fn dx(&self) -> f64 {
        self.grad[0]
    }
    pub fn dy(&self) -> f64 {
        self.grad[1]
    }
    pub fn dxx(&self) -> f64 {
        self.hess[0]
    }
    pub fn dyy(&self) -> f64 {
        self.hess[1]
    }
    pub fn dxy(&self) -> f64 {
        self.hess[2]
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn signed_norm(v: &[f64], q: &[f64]) -> f64 {
    let n = norm(v);
    if dot(v, q) < 0.0 {
        -n
    } else {
        n
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `out = (A + c I) v`.
fn apply(a: &NumMatrix, c: f64, v: &[f64], out: &mut [f64]) {
    a.mul_vec(v, out);
    if c != 0.0 {
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
}

fn check_dims(mats: &[&NumMatrix]) -> Result<usize> {
    let n = mats[0].dim();
    if n == 0 {
        return Err(Error::InvalidParameters("empty matrix".into()));
    }
    if mats.iter().any(|m| m.dim() != n) {
        return Err(Error::InvalidParameters(
            "matrix and derivative dimensions differ".into(),
        ));
    }
    Ok(n)
}

/// Convergence test for the eigenvalue and derivative estimates.
///
/// The estimates must move by at most ten times the tolerance once the
/// eigenvector has converged. Derivative recurrences can stall at a roundoff
/// floor above that when the matrix entries dwarf the eigenvalue; they are
/// accepted once the eigenvector has stayed converged for as many iterations
/// again as it needed to converge, plus twenty.
struct Tracker {
    tol: f64,
    prev: Vec<f64>,
    converged_at: Option<usize>,
}

impl Tracker {
    fn new(tol: f64, count: usize) -> Self {
        Tracker {
            tol,
            prev: vec![f64::NAN; count],
            converged_at: None,
        }
    }

    fn done(&mut self, k: usize, q_change: f64, now: &[f64]) -> Result<bool> {
        let settled = self.settled(now)?;
        if q_change > self.tol {
            self.converged_at = None;
            return Ok(false);
        }
        let at = *self.converged_at.get_or_insert(k);
        Ok(settled || k >= 2 * at + 20)
    }

    fn settled(&mut self, now: &[f64]) -> Result<bool> {
        if now.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericFailure(
                "non-finite eigenvalue derivative estimate".into(),
            ));
        }
        let ok = now
            .iter()
            .zip(&self.prev)
            .all(|(a, b)| (a - b).abs() <= 10.0 * self.tol * a.abs().max(1.0));
        self.prev.copy_from_slice(now);
        Ok(ok)
    }
}

fn start_vector(n: usize) -> Vec<f64> {
    vec![1.0 / (n as f64).sqrt(); n]
}

fn shift_for(a: &NumMatrix, cfg: &SolverConfig) -> f64 {
    if cfg.shift > 0.0 {
        cfg.shift * a.mean_row_sum().max(f64::MIN_POSITIVE)
    } else {
        0.0
    }
}

/// Once the iteration has a rough eigenvalue, a shift proportional to the
/// mean row sum is replaced by one proportional to that eigenvalue: a shift
/// much larger than the eigenvalue squeezes the spectral gap.
fn retune(k: usize, c: f64, unshifted: f64, cfg: &SolverConfig) -> f64 {
    if cfg.shift > 0.0 && (k == 20 || k == 200) && unshifted > 0.0 {
        cfg.shift * unshifted
    } else {
        c
    }
}

fn first_step(a: &NumMatrix, c: f64, q: &[f64], aq: &mut [f64]) -> Result<f64> {
    apply(a, c, q, aq);
    let lam = norm(aq);
    if lam.is_nan() || lam <= 0.0 || lam.is_infinite() {
        return Err(Error::NumericFailure(
            "power iteration collapsed to the zero vector".into(),
        ));
    }
    Ok(lam)
}

fn no_convergence(cfg: &SolverConfig, change: f64) -> Error {
    Error::NoConvergence {
        what: "power iteration",
        iterations: cfg.power_max_iter,
        last_change: change,
    }
}

/// Nontrivial strongly connected components of the union pattern of `mats`,
/// each sorted, or `None` when the whole index set is one component.
fn irreducible_blocks(mats: &[&NumMatrix]) -> Option<Vec<Vec<usize>>> {
    let n = mats[0].dim();
    let succ = |v: usize| mats.iter().flat_map(move |m| m.row_cols(v).iter().copied());
    // iterative Tarjan
    const NONE: usize = usize::MAX;
    let mut index = vec![NONE; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if index[root] != NONE {
            continue;
        }
        let mut call: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, succ(root).collect(), 0));
        while let Some((v, ws, pos)) = call.last_mut() {
            let v = *v;
            if *pos < ws.len() {
                let w = ws[*pos];
                *pos += 1;
                if index[w] == NONE {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, succ(w).collect(), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some((u, _, _)) = call.last() {
                low[*u] = low[*u].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("Tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    if comps.len() == 1 {
        return None;
    }
    comps.retain(|c| c.len() > 1 || succ(c[0]).any(|w| w == c[0]));
    Some(comps)
}

/// Runs `solve` on every irreducible block and keeps the largest eigenvalue.
/// Among blocks tied to twelve digits the one with the smallest `tie_key`
/// wins, which gives one-sided derivatives from below at a crossing.
fn by_blocks(
    mats: &[&NumMatrix],
    tie_key: fn(&EigenPack) -> f64,
    solve: impl Fn(&[&NumMatrix]) -> Result<EigenPack>,
) -> Result<EigenPack> {
    let n = check_dims(mats)?;
    let Some(blocks) = irreducible_blocks(mats) else {
        return solve(mats);
    };
    let mut best: Option<EigenPack> = None;
    let mut iterations = 0;
    for block in blocks {
        let subs: Vec<NumMatrix> = mats.iter().map(|m| m.submatrix(&block)).collect();
        if subs[0].is_zero() {
            continue;
        }
        let refs: Vec<&NumMatrix> = subs.iter().collect();
        let mut e = solve(&refs)?;
        iterations += e.iterations;
        let mut full = vec![0.0; n];
        for (k, &i) in block.iter().enumerate() {
            full[i] = e.eigvec[k];
        }
        e.eigvec = full;
        best = Some(match best {
            None => e,
            Some(cur) => {
                let tied = (e.lambda - cur.lambda).abs() <= 1e-12 * cur.lambda.abs().max(e.lambda.abs());
                if (tied && tie_key(&e) < tie_key(&cur)) || (!tied && e.lambda > cur.lambda) {
                    e
                } else {
                    cur
                }
            }
        });
    }
    let mut e = best.ok_or_else(|| Error::NumericFailure("matrix is nilpotent".into()))?;
    e.iterations = iterations;
    Ok(e)
}

/// Dominant eigenvalue only.
pub fn spectral_radius(a: &NumMatrix, cfg: &SolverConfig) -> Result<f64> {
    check_dims(&[a])?;
    match irreducible_blocks(&[a]) {
        None => spectral_radius_block(a, cfg),
        Some(blocks) => {
            let mut best: Option<f64> = None;
            for block in blocks {
                let sub = a.submatrix(&block);
                if sub.is_zero() {
                    continue;
                }
                let lam = spectral_radius_block(&sub, cfg)?;
                best = Some(best.map_or(lam, |b: f64| b.max(lam)));
            }
            best.ok_or_else(|| Error::NumericFailure("matrix is nilpotent".into()))
        }
    }
}

/// Eigenvalue and first derivative of `A(t)` given `A` and `A'` at the same point.
pub fn power_i(a: &NumMatrix, a1: &NumMatrix, cfg: &SolverConfig) -> Result<EigenPack> {
    by_blocks(&[a, a1], EigenPack::d1, |m| power_i_block(m[0], m[1], cfg))
}

/// Eigenvalue with first and second derivatives.
pub fn power_ii(a: &NumMatrix, a1: &NumMatrix, a2: &NumMatrix, cfg: &SolverConfig) -> Result<EigenPack> {
    by_blocks(&[a, a1, a2], EigenPack::d1, |m| power_ii_block(m[0], m[1], m[2], cfg))
}

/// Eigenvalue with both partials and all second partials of `A(x, y)`.
pub fn power_iii(m: &BivariateSet<'_>, cfg: &SolverConfig) -> Result<EigenPack> {
    by_blocks(&[m.a, m.ax, m.ay, m.axx, m.ayy, m.axy], EigenPack::dy, |s| {
        let set = BivariateSet {
            a: s[0],
            ax: s[1],
            ay: s[2],
            axx: s[3],
            ayy: s[4],
            axy: s[5],
        };
        power_iii_block(&set, cfg)
    })
}

fn spectral_radius_block(a: &NumMatrix, cfg: &SolverConfig) -> Result<f64> {
    let n = check_dims(&[a])?;
    let mut c = shift_for(a, cfg);
    let mut q = start_vector(n);
    let mut aq = vec![0.0; n];
    let mut prev = f64::NAN;
    let mut change = f64::INFINITY;
    for k in 1..=cfg.power_max_iter {
        let lam = first_step(a, c, &q, &mut aq)?;
        for v in aq.iter_mut() {
            *v /= lam;
        }
        change = dist(&aq, &q);
        std::mem::swap(&mut q, &mut aq);
        if change <= cfg.power_tol && (lam - c - prev).abs() <= 10.0 * cfg.power_tol * lam {
            return Ok(lam - c);
        }
        prev = lam - c;
        c = retune(k, c, lam - c, cfg);
    }
    Err(no_convergence(cfg, change))
}

fn power_i_block(a: &NumMatrix, a1: &NumMatrix, cfg: &SolverConfig) -> Result<EigenPack> {
    let n = check_dims(&[a, a1])?;
    let mut c = shift_for(a, cfg);
    let mut q = start_vector(n);
    let mut r = vec![0.0; n];
    let (mut aq, mut v, mut tmp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut track = Tracker::new(cfg.power_tol, 2);
    let mut change = f64::INFINITY;
    for k in 1..=cfg.power_max_iter {
        let lam = first_step(a, c, &q, &mut aq)?;
        // v = A' q + A r - lam r
        a1.mul_vec(&q, &mut v);
        apply(a, c, &r, &mut tmp);
        for i in 0..n {
            v[i] += tmp[i] - lam * r[i];
        }
        let mu = signed_norm(&v, &q);
        for i in 0..n {
            r[i] = (v[i] + lam * r[i] - mu * q[i]) / lam;
            aq[i] /= lam;
        }
        change = dist(&aq, &q);
        std::mem::swap(&mut q, &mut aq);
        if track.done(k, change, &[lam, mu])? {
            return Ok(EigenPack {
                lambda: lam - c,
                grad: [mu, 0.0],
                hess: [0.0; 3],
                eigvec: q,
                iterations: k,
            });
        }
        c = retune(k, c, lam - c, cfg);
    }
    Err(no_convergence(cfg, change))
}

fn power_ii_block(
    a: &NumMatrix,
    a1: &NumMatrix,
    a2: &NumMatrix,
    cfg: &SolverConfig,
) -> Result<EigenPack> {
    let n = check_dims(&[a, a1, a2])?;
    let mut c = shift_for(a, cfg);
    let mut q = start_vector(n);
    let mut r = vec![0.0; n];
    let mut s = vec![0.0; n];
    let (mut aq, mut ar, mut a1q) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (mut w, mut a1r, mut a_s) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut track = Tracker::new(cfg.power_tol, 3);
    let mut change = f64::INFINITY;
    for k in 1..=cfg.power_max_iter {
        let lam = first_step(a, c, &q, &mut aq)?;
        apply(a, c, &r, &mut ar);
        a1.mul_vec(&q, &mut a1q);
        // first-order residual: A' q + A r - lam r
        let v: Vec<f64> = (0..n).map(|i| a1q[i] + ar[i] - lam * r[i]).collect();
        let mu = signed_norm(&v, &q);

        a2.mul_vec(&q, &mut w);
        a1.mul_vec(&r, &mut a1r);
        apply(a, c, &s, &mut a_s);
        // second-order residual: A'' q + 2 A' r + A s - lam s - 2 mu r
        for i in 0..n {
            w[i] += 2.0 * a1r[i] + a_s[i] - lam * s[i] - 2.0 * mu * r[i];
        }
        let nu = signed_norm(&w, &q);

        for i in 0..n {
            s[i] = (w[i] + lam * s[i] - nu * q[i]) / lam;
            r[i] = (ar[i] + a1q[i] - mu * q[i]) / lam;
            aq[i] /= lam;
        }
        change = dist(&aq, &q);
        std::mem::swap(&mut q, &mut aq);
        if track.done(k, change, &[lam, mu, nu])? {
            return Ok(EigenPack {
                lambda: lam - c,
                grad: [mu, 0.0],
                hess: [nu, 0.0, 0.0],
                eigvec: q,
                iterations: k,
            });
        }
        c = retune(k, c, lam - c, cfg);
    }
    Err(no_convergence(cfg, change))
}

/// Matrices needed for the bivariate iteration, all evaluated at one point.
pub struct BivariateSet<'a> {
    pub a: &'a NumMatrix,
    pub ax: &'a NumMatrix,
    pub ay: &'a NumMatrix,
    pub axx: &'a NumMatrix,
    pub ayy: &'a NumMatrix,
    pub axy: &'a NumMatrix,
}

fn power_iii_block(m: &BivariateSet<'_>, cfg: &SolverConfig) -> Result<EigenPack> {
    let n = check_dims(&[m.a, m.ax, m.ay, m.axx, m.ayy, m.axy])?;
    let mut c = shift_for(m.a, cfg);
    let mut q = start_vector(n);
    let mut qx = vec![0.0; n];
    let mut qy = vec![0.0; n];
    let mut qxx = vec![0.0; n];
    let mut qyy = vec![0.0; n];
    let mut qxy = vec![0.0; n];
    let mut aq = vec![0.0; n];
    let mut t1 = vec![0.0; n];
    let mut t2 = vec![0.0; n];
    let mut track = Tracker::new(cfg.power_tol, 6);
    let mut change = f64::INFINITY;

    // first-order residual vector: A_v q + A q_v - lam q_v
    let first = |av: &NumMatrix, qv: &[f64], q: &[f64], lam: f64, c: f64, t: &mut Vec<f64>| {
        let mut v = vec![0.0; n];
        av.mul_vec(q, &mut v);
        apply(m.a, c, qv, t);
        for i in 0..n {
            v[i] += t[i] - lam * qv[i];
        }
        v
    };

    for k in 1..=cfg.power_max_iter {
        let lam = first_step(m.a, c, &q, &mut aq)?;

        let vx = first(m.ax, &qx, &q, lam, c, &mut t1);
        let lx = signed_norm(&vx, &q);
        let vy = first(m.ay, &qy, &q, lam, c, &mut t1);
        let ly = signed_norm(&vy, &q);

        // pure second order: A_vv q + 2 A_v q_v + A q_vv - lam q_vv - 2 l_v q_v
        let second = |avv: &NumMatrix, av: &NumMatrix, qv: &[f64], qvv: &[f64], lv: f64,
                      t1: &mut Vec<f64>, t2: &mut Vec<f64>| {
            let mut w = vec![0.0; n];
            avv.mul_vec(&q, &mut w);
            av.mul_vec(qv, t1);
            apply(m.a, c, qvv, t2);
            for i in 0..n {
                w[i] += 2.0 * t1[i] + t2[i] - lam * qvv[i] - 2.0 * lv * qv[i];
            }
            w
        };
        let wxx = second(m.axx, m.ax, &qx, &qxx, lx, &mut t1, &mut t2);
        let lxx = signed_norm(&wxx, &q);
        let wyy = second(m.ayy, m.ay, &qy, &qyy, ly, &mut t1, &mut t2);
        let lyy = signed_norm(&wyy, &q);

        // mixed: A_xy q + A_x q_y + A_y q_x + A q_xy - lam q_xy - l_x q_y - l_y q_x
        let mut wxy = vec![0.0; n];
        m.axy.mul_vec(&q, &mut wxy);
        m.ax.mul_vec_add(&qy, &mut wxy);
        m.ay.mul_vec_add(&qx, &mut wxy);
        apply(m.a, c, &qxy, &mut t1);
        for i in 0..n {
            wxy[i] += t1[i] - lam * qxy[i] - lx * qy[i] - ly * qx[i];
        }
        let lxy = signed_norm(&wxy, &q);

        for i in 0..n {
            qx[i] = (vx[i] + lam * qx[i] - lx * q[i]) / lam;
            qy[i] = (vy[i] + lam * qy[i] - ly * q[i]) / lam;
            qxx[i] = (wxx[i] + lam * qxx[i] - lxx * q[i]) / lam;
            qyy[i] = (wyy[i] + lam * qyy[i] - lyy * q[i]) / lam;
            qxy[i] = (wxy[i] + lam * qxy[i] - lxy * q[i]) / lam;
            aq[i] /= lam;
        }
        change = dist(&aq, &q);
        std::mem::swap(&mut q, &mut aq);
        if track.done(k, change, &[lam, lx, ly, lxx, lyy, lxy])? {
            return Ok(EigenPack {
                lambda: lam - c,
                grad: [lx, ly],
                hess: [lxx, lyy, lxy],
                eigvec: q,
                iterations: k,
            });
        }
        c = retune(k, c, lam - c, cfg);
    }
    Err(no_convergence(cfg, change))
}
