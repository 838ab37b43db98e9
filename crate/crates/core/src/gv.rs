//! GV bound for multi-state graphs with one-bit labels.

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::Serialize;

use crate::curve::{h2, xlog2y, Curve, CurvePoint, Segment};
use crate::eigen::{power_i, power_ii, spectral_radius, EigenPack, SolverConfig};
use crate::error::{Error, Result};
use crate::graphs::{validate, LabelledGraph};
use crate::polymat::{NumMatrix, UniMatrix, Var};
use crate::product::{adjacency_matrix, build_b};
use crate::roots::newton_bracketed;

/// `log2` of the spectral radius of the adjacency matrix, per label bit.
pub fn capacity(g: &LabelledGraph, cfg: &SolverConfig) -> Result<f64> {
    let a = adjacency_matrix(g).constant_values();
    Ok(spectral_radius(&a, &config_for(g, cfg))?.log2() / g.s() as f64)
}

/// Shift used for graphs whose matrices may be periodic.
pub(crate) fn config_for(g: &LabelledGraph, cfg: &SolverConfig) -> SolverConfig {
    let mut cfg = *cfg;
    if cfg.shift == 0.0 && !validate(g).is_primitive() {
        cfg.shift = 1.0;
    }
    cfg
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GvPoint {
    pub delta: f64,
    /// Minimiser of the distance-weighted pair count.
    pub y: f64,
    pub t_tilde: f64,
    pub rate: f64,
    /// True when `delta` is at or beyond the largest distance with positive rate.
    pub clamped: bool,
    pub newton_iterations: usize,
    pub power_iterations: usize,
}

/// `F(y) = y Λ'(y) - δ Λ(y)`.
pub fn f_value(pack: &EigenPack, delta: f64, y: f64) -> f64 {
    y * pack.d1() - delta * pack.lambda
}

/// `F'(y) = (1 - δ) Λ'(y) + y Λ''(y)`.
pub fn f_derivative(pack: &EigenPack, delta: f64, y: f64) -> f64 {
    (1.0 - delta) * pack.d1() + y * pack.d2()
}

/// Precomputed matrices for repeated GV evaluations on one graph.
pub struct GvProblem {
    b: UniMatrix,
    b1: UniMatrix,
    b2: UniMatrix,
    a: NumMatrix,
    cfg: SolverConfig,
    capacity: f64,
    delta_max: OnceLock<f64>,
}

impl GvProblem {
    pub fn new(g: &LabelledGraph, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if g.s() != 1 {
            return Err(Error::Unsupported(format!(
                "the multi-state GV procedure needs one-bit labels, got s = {}",
                g.s()
            )));
        }
        let cfg = config_for(g, cfg);
        let b = build_b(g);
        let a = adjacency_matrix(g).constant_values();
        let capacity = spectral_radius(&a, &cfg)?.log2();
        Ok(GvProblem {
            b1: b.derivative(Var::Y, 1),
            b2: b.derivative(Var::Y, 2),
            b,
            a,
            cfg,
            capacity,
            delta_max: OnceLock::new(),
        })
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn b_matrix(&self) -> &UniMatrix {
        &self.b
    }

    pub fn adjacency(&self) -> &NumMatrix {
        &self.a
    }

    /// `Λ`, `Λ'` and `Λ''` of `B` at `y`.
    pub fn lambda_ii(&self, y: f64) -> Result<EigenPack> {
        power_ii(&self.b.eval(y)?, &self.b1.eval(y)?, &self.b2.eval(y)?, &self.cfg)
    }

    /// `Λ` and `Λ'` of `B` at `y`.
    pub fn lambda_i(&self, y: f64) -> Result<EigenPack> {
        power_i(&self.b.eval(y)?, &self.b1.eval(y)?, &self.cfg)
    }

    /// `Λ'(1) / Λ(1)`: beyond this distance the bound is zero.
    pub fn delta_max(&self) -> Result<f64> {
        if let Some(&d) = self.delta_max.get() {
            return Ok(d);
        }
        let p = self.lambda_i(1.0)?;
        let d = p.d1() / p.lambda;
        Ok(*self.delta_max.get_or_init(|| d))
    }

    fn point_at(&self, delta: f64, y: f64, clamped: bool, newton: usize, power: usize) -> Result<GvPoint> {
        let p = self.lambda_i(y)?;
        let t_tilde = -xlog2y(delta, y) + p.lambda.log2();
        Ok(GvPoint {
            delta,
            y,
            t_tilde,
            rate: (2.0 * self.capacity - t_tilde).max(0.0),
            clamped,
            newton_iterations: newton,
            power_iterations: power + p.iterations,
        })
    }

    /// Solves `F(y) = 0` for the given relative distance and evaluates the bound.
    pub fn fixed_delta(&self, delta: f64) -> Result<GvPoint> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidParameters(format!(
                "relative distance must lie in [0, 1], got {delta}"
            )));
        }
        if delta == 0.0 {
            return self.point_at(0.0, 0.0, false, 0, 0);
        }
        if delta >= self.delta_max()? {
            return self.point_at(delta, 1.0, true, 0, 0);
        }
        let mut power = 0;
        let root = newton_bracketed(
            |y| {
                let p = self.lambda_ii(y)?;
                power += p.iterations;
                Ok((f_value(&p, delta, y), f_derivative(&p, delta, y)))
            },
            0.0,
            1.0,
            true,
            0.5,
            self.cfg.newton_tol,
            self.cfg.newton_max_iter,
        )?;
        self.point_at(delta, root.x, false, root.iterations, power)
    }

    /// Parametric curve `δ(y) = yΛ'/Λ`, `ρ(y) = 2 Cap + δ log y - log Λ` on a
    /// uniform grid of `n` values of `y` in `[0, 1]`, plus a zero-rate point
    /// at `δ = 1`.
    pub fn curve(&self, n: usize) -> Result<Curve> {
        if n < 2 {
            return Err(Error::InvalidParameters("a curve needs at least 2 points".into()));
        }
        let mut points = Vec::with_capacity(n + 1);
        let mut iters = 0;
        for i in 0..n {
            let y = i as f64 / (n - 1) as f64;
            let p = self.lambda_i(y)?;
            iters += p.iterations;
            let delta = if y == 0.0 { 0.0 } else { y * p.d1() / p.lambda };
            let rate = 2.0 * self.capacity + xlog2y(delta, y) - p.lambda.log2();
            points.push(CurvePoint {
                segment: Segment::Gv,
                param: y,
                delta,
                rate: rate.max(0.0),
            });
        }
        let delta_max = points.last().map(|p| p.delta).unwrap_or(0.0);
        let _ = self.delta_max.set(delta_max);
        points.push(CurvePoint {
            segment: Segment::Tail,
            param: 1.0,
            delta: 1.0,
            rate: 0.0,
        });
        let mut c = Curve {
            points,
            delta_max,
            power_iterations: iters,
        };
        c.sort_by_delta();
        Ok(c)
    }
}

pub fn gv_fixed_delta(g: &LabelledGraph, delta: f64, cfg: &SolverConfig) -> Result<GvPoint> {
    GvProblem::new(g, cfg)?.fixed_delta(delta)
}

pub fn delta_max_gv(g: &LabelledGraph, cfg: &SolverConfig) -> Result<f64> {
    GvProblem::new(g, cfg)?.delta_max()
}

pub fn gv_curve(g: &LabelledGraph, n: usize, cfg: &SolverConfig) -> Result<Curve> {
    GvProblem::new(g, cfg)?.curve(n)
}

/// `max(0, Cap - H(δ))`, zero for `δ >= 1/2`.
pub fn simple_lb(capacity: f64, delta: f64) -> f64 {
    if delta >= 0.5 {
        return 0.0;
    }
    (capacity - h2(delta)).max(0.0)
}

/// Curve of [`simple_lb`] on `n` evenly spaced distances in `[0, 1/2]`.
pub fn simple_lb_curve(capacity: f64, n: usize) -> Curve {
    let n = n.max(2);
    let points = (0..n)
        .map(|i| {
            let d = 0.5 * i as f64 / (n - 1) as f64;
            CurvePoint {
                segment: Segment::Simple,
                param: d,
                delta: d,
                rate: simple_lb(capacity, d),
            }
        })
        .collect();
    Curve {
        points,
        delta_max: 0.5,
        power_iterations: 0,
    }
}

/// Largest word count [`brute_force_t`] will enumerate.
pub const BRUTE_FORCE_MAX_WORDS: usize = 1 << 14;

/// Distinct label sequences of `n` symbols read along paths from any state,
/// packed with the first symbol in the high bits.
pub fn words(g: &LabelledGraph, n: usize) -> Result<Vec<u64>> {
    let s = g.s();
    if n == 0 || n * s > 63 {
        return Err(Error::InvalidParameters(format!(
            "word length must be in 1..={} symbols",
            63 / s
        )));
    }
    let mut frontier: HashSet<(usize, u64)> = (0..g.num_states()).map(|v| (v, 0)).collect();
    for _ in 0..n {
        let mut next = HashSet::new();
        for &(v, w) in &frontier {
            for e in g.out_edges(v) {
                next.insert((e.to, (w << s) | e.label));
            }
        }
        if next.len() > BRUTE_FORCE_MAX_WORDS * g.num_states() {
            return Err(Error::InvalidParameters(format!(
                "too many paths of length {n} to enumerate"
            )));
        }
        frontier = next;
    }
    let mut out: Vec<u64> = frontier.into_iter().map(|(_, w)| w).collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Number of ordered pairs of words of length `n` at Hamming distance below `d`.
pub fn brute_force_t(g: &LabelledGraph, n: usize, d: usize) -> Result<u64> {
    if n > 14 {
        return Err(Error::InvalidParameters(format!(
            "brute-force enumeration is capped at n = 14, got {n}"
        )));
    }
    let ws = words(g, n)?;
    if ws.len() > BRUTE_FORCE_MAX_WORDS {
        return Err(Error::InvalidParameters(format!(
            "{} words of length {n} is too many to enumerate",
            ws.len()
        )));
    }
    let mut count = 0u64;
    for &u in &ws {
        for &v in &ws {
            if ((u ^ v).count_ones() as usize) < d {
                count += 1;
            }
        }
    }
    Ok(count)
}
