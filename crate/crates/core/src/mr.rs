//! GV-MR bound: the GV argument restricted to words whose fraction of marked
//! edges is fixed.
//!
//! With `p(x) = xΛ'(x;C)/Λ(x;C)` substituted, `y = 1` always solves
//! `G2(x, y) = 0` because `Λ(x, 1; D) = Λ(x; C)^2`. The curve therefore
//! follows the smallest root `y(x)` in `[0, 1)`, which is `0` at `x = 1`.

use serde::Serialize;

use crate::curve::{finite_or_null, xlog2y, Curve, CurvePoint, Segment};
use crate::eigen::{power_i, power_ii, power_iii, spectral_radius, BivariateSet, SolverConfig};
use crate::error::{Error, Result};
use crate::gv::config_for;
use crate::graphs::LabelledGraph;
use crate::polymat::{BiMatrix, NumMatrix, UniMatrix, Var};
use crate::product::{build_c, build_d, default_marks};
use crate::roots::{bisect_monotone, golden_max, newton_bracketed};

/// Grid size used when locating the maximiser of `Δ(x)`.
pub const SCAN_POINTS: usize = 61;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum XPoint {
    Finite(f64),
    /// Limit `x -> 0`.
    Zero,
    /// Limit `x -> ∞`.
    Infinity,
}

impl XPoint {
    pub fn value(self) -> f64 {
        match self {
            XPoint::Finite(x) => x,
            XPoint::Zero => 0.0,
            XPoint::Infinity => f64::INFINITY,
        }
    }
}

/// Where `Δ(x) = Λ_y(x,1;D) / Λ(x,1;D)` attains its maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaShape {
    /// Maximum as `x -> 0`.
    Decreasing,
    /// Maximum as `x -> ∞`.
    Increasing,
    Interior,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub shape: DeltaShape,
    pub x_sharp: XPoint,
    pub delta_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CInfo {
    /// Marked-edge frequency `p(x)`.
    pub p: f64,
    /// `log2 Λ(x; C)` per bit; at a limit the divergent power of `x` is removed.
    pub log_lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DInfo {
    /// `yΛ_y / Λ` per bit.
    pub delta: f64,
    /// `log2 Λ(x, y; D)` per bit; at a limit the divergent power of `x` is removed.
    pub log_lambda: f64,
}

/// What the generic curve and fixed-distance procedures need from a system.
pub trait MrModel {
    fn capacity(&self) -> f64;
    fn config(&self) -> &SolverConfig;
    fn c_info(&self, x: XPoint) -> Result<CInfo>;
    /// `G2` scaled by `Λ(D)`, with `p = p(x)`, and optionally its `y`-derivative.
    fn g2(&self, x: XPoint, p: f64, y: f64, derivative: bool) -> Result<(f64, f64)>;
    fn d_info(&self, x: XPoint, y: f64) -> Result<DInfo>;
    /// Whether the limit points `Zero` and `Infinity` can be evaluated.
    fn supports(&self, x: XPoint) -> bool;
}

/// Which bound a point realises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// The GV-MR rate itself.
    Mr,
    /// Lower bound from the extremal `x`.
    LowerBound,
    /// Beyond the largest admissible distance.
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Newton,
    Boundary,
    Parametric,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MrPoint {
    pub delta: f64,
    pub p: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub x: f64,
    pub y: f64,
    pub rate: f64,
    pub bound: Bound,
    pub method: Method,
    pub newton_iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MrCurve {
    pub curve: Curve,
    pub classification: Classification,
}

const Y_SAMPLES: usize = 40;

/// Smallest root of `G2(x, ·)` in `[0, 1)`, or `1` when only the trivial root exists.
pub fn smallest_root_y<M: MrModel + ?Sized>(m: &M, x: XPoint, p: f64) -> Result<f64> {
    if x == XPoint::Finite(1.0) {
        return Ok(0.0);
    }
    let g = |y: f64| m.g2(x, p, y, false).map(|v| v.0);
    let g0 = g(0.0)?;
    if g0.abs() <= 1e-13 {
        return Ok(0.0);
    }
    let mut grid: Vec<f64> = (1..Y_SAMPLES).map(|i| i as f64 / Y_SAMPLES as f64).collect();
    let last = *grid.last().unwrap();
    grid.extend((1..=6).map(|k| 1.0 - (1.0 - last) * 10f64.powi(-k)));
    let mut prev = 0.0;
    let mut bracket = None;
    for &t in &grid {
        let gt = g(t)?;
        if (gt < 0.0) != (g0 < 0.0) || gt == 0.0 {
            bracket = Some((prev, t));
            break;
        }
        prev = t;
    }
    let Some((a, b)) = bracket else {
        return Ok(1.0);
    };
    let tol = m.config().newton_tol.min(1e-12);
    let root = newton_bracketed(
        |y| m.g2(x, p, y, true),
        a,
        b,
        g0 < 0.0,
        0.5 * (a + b),
        tol,
        m.config().newton_max_iter.max(200),
    )?;
    Ok(root.x)
}

/// `Δ(x)`: the relative distance at `y = 1`.
pub fn big_delta<M: MrModel + ?Sized>(m: &M, x: XPoint) -> Result<f64> {
    Ok(m.d_info(x, 1.0)?.delta)
}

pub fn classify<M: MrModel + ?Sized>(m: &M) -> Result<Classification> {
    let (x_lo, x_hi) = (m.config().x_lo, m.config().x_hi);
    let (t_lo, t_hi) = (x_lo.ln(), x_hi.ln());
    let ts: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| t_lo + (t_hi - t_lo) * i as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &t) in ts.iter().enumerate() {
        let d = big_delta(m, XPoint::Finite(t.exp()))?;
        if d > best.1 + 1e-12 {
            best = (i, d);
        }
    }
    let (shape, x_sharp) = if best.0 == 0 {
        let xs = if m.supports(XPoint::Zero) { XPoint::Zero } else { XPoint::Finite(x_lo) };
        (DeltaShape::Decreasing, xs)
    } else if best.0 == SCAN_POINTS - 1 {
        let xs = if m.supports(XPoint::Infinity) {
            XPoint::Infinity
        } else {
            XPoint::Finite(x_hi)
        };
        (DeltaShape::Increasing, xs)
    } else {
        let t = golden_max(
            |t| big_delta(m, XPoint::Finite(t.exp())),
            ts[best.0 - 1],
            ts[best.0 + 1],
            1e-6,
        )?;
        (DeltaShape::Interior, XPoint::Finite(t.exp()))
    };
    Ok(Classification {
        shape,
        x_sharp,
        delta_max: big_delta(m, x_sharp)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct ParamPoint {
    p: f64,
    y: f64,
    delta: f64,
    rate: f64,
}

fn segment_a<M: MrModel + ?Sized>(m: &M, x: f64) -> Result<ParamPoint> {
    let xp = XPoint::Finite(x);
    let c = m.c_info(xp)?;
    let y = smallest_root_y(m, xp, c.p)?;
    let d = m.d_info(xp, y)?;
    let delta = if y == 0.0 { 0.0 } else { d.delta };
    Ok(ParamPoint {
        p: c.p,
        y,
        delta,
        rate: (2.0 * c.log_lambda + xlog2y(delta, y) - d.log_lambda).max(0.0),
    })
}

fn segment_b<M: MrModel + ?Sized>(m: &M, xs: XPoint, c: &CInfo, y: f64) -> Result<ParamPoint> {
    let d = m.d_info(xs, y)?;
    let delta = if y == 0.0 { 0.0 } else { d.delta };
    Ok(ParamPoint {
        p: c.p,
        y,
        delta,
        rate: (2.0 * c.log_lambda + xlog2y(delta, y) - d.log_lambda).max(0.0),
    })
}

/// End of the interior segment: `x♯` itself, or a proxy when `x♯` is a limit.
fn segment_a_end(xs: XPoint, proxy_lo: f64, proxy_hi: f64) -> f64 {
    match xs {
        XPoint::Finite(x) => x,
        XPoint::Zero => proxy_lo,
        XPoint::Infinity => proxy_hi,
    }
}

/// GV-MR curve: segment `A` follows `x` from `1` to `x♯`, segment `B` holds
/// `x♯` fixed and runs `y` from `y(x♯)` to `1`, then a zero-rate tail point.
pub fn mr_curve_with<M: MrModel + ?Sized>(m: &M, n: usize) -> Result<MrCurve> {
    if n < 4 {
        return Err(Error::InvalidParameters("a GV-MR curve needs at least 4 points".into()));
    }
    let cls = classify(m)?;
    let n_a = n / 2;
    let n_b = n - n_a;
    let x_end = segment_a_end(cls.x_sharp, m.config().x_lo, m.config().x_hi);
    let mut points = Vec::with_capacity(n + 1);
    for k in 0..n_a {
        let t = x_end.ln() * k as f64 / (n_a - 1) as f64;
        let x = t.exp();
        let a = segment_a(m, x)?;
        points.push(CurvePoint {
            segment: Segment::A,
            param: x,
            delta: a.delta,
            rate: a.rate,
        });
    }
    let c = m.c_info(cls.x_sharp)?;
    let y0 = smallest_root_y(m, cls.x_sharp, c.p)?;
    // with a finite x♯ segment A already ends at (x♯, y(x♯))
    let (first, steps) = match cls.x_sharp {
        XPoint::Finite(_) => (1, n_b),
        _ => (0, n_b - 1),
    };
    for k in first..first + n_b {
        let y = y0 + (1.0 - y0) * k as f64 / steps as f64;
        let b = segment_b(m, cls.x_sharp, &c, y)?;
        points.push(CurvePoint {
            segment: Segment::B,
            param: y,
            delta: b.delta,
            rate: b.rate,
        });
    }
    if cls.delta_max < 1.0 {
        points.push(CurvePoint {
            segment: Segment::Tail,
            param: 1.0,
            delta: 1.0,
            rate: 0.0,
        });
    }
    let mut curve = Curve {
        points,
        delta_max: cls.delta_max,
        power_iterations: 0,
    };
    curve.sort_by_delta();
    Ok(MrCurve {
        curve,
        classification: cls,
    })
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameters(format!(
            "relative distance must lie in [0, 1], got {delta}"
        )));
    }
    Ok(())
}

/// Fixed-distance GV-MR value located on the parametric curve: bisection in
/// `ln x` along segment `A`, then in `y` along segment `B`.
pub fn mr_parametric<M: MrModel + ?Sized>(m: &M, cls: &Classification, delta: f64) -> Result<MrPoint> {
    check_delta(delta)?;
    if delta == 0.0 {
        let c = m.c_info(XPoint::Finite(1.0))?;
        return Ok(MrPoint {
            delta,
            p: c.p,
            x: 1.0,
            y: 0.0,
            rate: m.capacity(),
            bound: Bound::Mr,
            method: Method::Analytic,
            newton_iterations: 0,
        });
    }
    if delta >= cls.delta_max {
        let c = m.c_info(cls.x_sharp)?;
        return Ok(MrPoint {
            delta,
            p: c.p,
            x: cls.x_sharp.value(),
            y: 1.0,
            rate: 0.0,
            bound: Bound::Zero,
            method: Method::Parametric,
            newton_iterations: 0,
        });
    }
    let far = segment_a_end(cls.x_sharp, 1e-8, 1e8);
    let end = segment_a(m, far)?;
    if delta <= end.delta {
        let t_end = far.ln();
        let t = bisect_monotone(
            |t| segment_a(m, (t * t_end).exp()).map(|a| a.delta),
            0.0,
            1.0,
            delta,
            1e-14,
        )?;
        let x = (t * t_end).exp();
        let a = segment_a(m, x)?;
        return Ok(MrPoint {
            delta,
            p: a.p,
            x,
            y: a.y,
            rate: a.rate,
            bound: Bound::Mr,
            method: Method::Parametric,
            newton_iterations: 0,
        });
    }
    let xs = cls.x_sharp;
    let c = m.c_info(xs)?;
    let y0 = smallest_root_y(m, xs, c.p)?;
    let y = bisect_monotone(
        |y| segment_b(m, xs, &c, y).map(|b| b.delta),
        y0,
        1.0,
        delta,
        1e-14,
    )?;
    let b = segment_b(m, xs, &c, y)?;
    Ok(MrPoint {
        delta,
        p: c.p,
        x: xs.value(),
        y,
        rate: b.rate,
        bound: Bound::LowerBound,
        method: Method::Parametric,
        newton_iterations: 0,
    })
}

/// Precomputed matrices for the multi-state GV-MR procedures.
pub struct MrProblem {
    c: UniMatrix,
    c1: UniMatrix,
    c2: UniMatrix,
    d: BiMatrix,
    dx: BiMatrix,
    dy: BiMatrix,
    dxx: BiMatrix,
    dyy: BiMatrix,
    dxy: BiMatrix,
    cfg: SolverConfig,
    capacity: f64,
}

/// Residuals, their Jacobian, and the scaled residuals that judge a step.
type Linearisation = ([f64; 3], [[f64; 3]; 3], [f64; 3]);

impl MrProblem {
    /// Uses the edges labelled `1` as the marked set.
    pub fn new(g: &LabelledGraph, cfg: &SolverConfig) -> Result<Self> {
        let marks = default_marks(g).ok_or_else(|| {
            Error::Unsupported(format!(
                "the multi-state GV-MR procedure needs one-bit labels, got s = {}",
                g.s()
            ))
        })?;
        Self::with_marks(g, &marks, cfg)
    }

    pub fn with_marks(g: &LabelledGraph, marks: &[bool], cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if g.s() != 1 {
            return Err(Error::Unsupported(format!(
                "the multi-state GV-MR procedure needs one-bit labels, got s = {}",
                g.s()
            )));
        }
        if marks.len() != g.edges().len() {
            return Err(Error::InvalidParameters("one mark per edge is required".into()));
        }
        let cfg = config_for(g, cfg);
        let c = build_c(g, marks);
        let d = build_d(g, marks);
        let capacity = spectral_radius(&c.eval(1.0)?, &cfg)?.log2();
        Ok(MrProblem {
            c1: c.derivative(Var::Z, 1),
            c2: c.derivative(Var::Z, 2),
            c,
            dx: d.derivative(Var::X, 1),
            dy: d.derivative(Var::Y, 1),
            dxx: d.derivative(Var::X, 2),
            dyy: d.derivative(Var::Y, 2),
            dxy: d.derivative(Var::X, 1).derivative(Var::Y, 1),
            d,
            cfg,
            capacity,
        })
    }

    pub fn c_matrix(&self) -> &UniMatrix {
        &self.c
    }

    pub fn d_matrix(&self) -> &BiMatrix {
        &self.d
    }

    fn eval_d(&self, x: f64, y: f64) -> Result<[NumMatrix; 6]> {
        Ok([
            self.d.eval(x, y)?,
            self.dx.eval(x, y)?,
            self.dy.eval(x, y)?,
            self.dxx.eval(x, y)?,
            self.dyy.eval(x, y)?,
            self.dxy.eval(x, y)?,
        ])
    }

    fn d_full(&self, x: f64, y: f64) -> Result<crate::eigen::EigenPack> {
        let [a, ax, ay, axx, ayy, axy] = self.eval_d(x, y)?;
        power_iii(
            &BivariateSet {
                a: &a,
                ax: &ax,
                ay: &ay,
                axx: &axx,
                ayy: &ayy,
                axy: &axy,
            },
            &self.cfg,
        )
    }

    pub fn classify(&self) -> Result<Classification> {
        classify(self)
    }

    pub fn curve(&self, n: usize) -> Result<MrCurve> {
        mr_curve_with(self, n)
    }

    pub fn delta_max(&self) -> Result<f64> {
        Ok(self.classify()?.delta_max)
    }

    /// Damped Newton on `(p, x, y)` for `G1 = G2 = G3 = 0`, starting from
    /// `(0.5, 1, 0.5)`, with `x` kept inside the configured scan range.
    /// Solutions with `p` outside `[0, 1]` move to the
    /// corresponding limit of `x`; spurious solutions at `y = 1` and failures
    /// fall back to [`mr_parametric`].
    pub fn fixed_delta(&self, delta: f64) -> Result<MrPoint> {
        check_delta(delta)?;
        if delta == 0.0 {
            let cls = Classification {
                shape: DeltaShape::Interior,
                x_sharp: XPoint::Finite(1.0),
                delta_max: 1.0,
            };
            return mr_parametric(self, &cls, 0.0);
        }
        match self.newton(delta) {
            Ok(NewtonOutcome::Interior(pt)) => return Ok(pt),
            Ok(NewtonOutcome::OutOfRange { p, iterations }) => {
                if let Some(pt) = self.boundary(delta, p, iterations)? {
                    return Ok(pt);
                }
            }
            Ok(NewtonOutcome::Rejected) | Err(_) => {}
        }
        let cls = self.classify()?;
        mr_parametric(self, &cls, delta)
    }

    fn residuals(&self, delta: f64, v: [f64; 3]) -> Result<Linearisation> {
        let [p, x, y] = v;
        let c = power_ii(&self.c.eval(x)?, &self.c1.eval(x)?, &self.c2.eval(x)?, &self.cfg)?;
        let d = self.d_full(x, y)?;
        let g = [
            x * c.d1() - p * c.lambda,
            x * d.dx() - 2.0 * p * d.lambda,
            y * d.dy() - delta * d.lambda,
        ];
        let j = [
            [-c.lambda, c.d1() + x * c.d2() - p * c.d1(), 0.0],
            [
                -2.0 * d.lambda,
                d.dx() + x * d.dxx() - 2.0 * p * d.dx(),
                x * d.dxy() - 2.0 * p * d.dy(),
            ],
            [
                0.0,
                y * d.dxy() - delta * d.dx(),
                d.dy() + y * d.dyy() - delta * d.dy(),
            ],
        ];
        let scaled = [g[0] / c.lambda, g[1] / d.lambda, g[2] / d.lambda];
        Ok((g, j, scaled))
    }

    fn newton(&self, delta: f64) -> Result<NewtonOutcome> {
        let mut v = [0.5, 1.0, 0.5];
        let norm = |r: &[f64; 3]| r.iter().map(|a| a * a).sum::<f64>().sqrt();
        let (mut g, mut j, mut scaled) = self.residuals(delta, v)?;
        for it in 1..=self.cfg.newton_max_iter {
            let step = solve3(j, [-g[0], -g[1], -g[2]])
                .ok_or_else(|| Error::NumericFailure("singular Newton system".into()))?;
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..=8 {
                let cand = [v[0] + t * step[0], v[1] + t * step[1], v[2] + t * step[2]];
                let in_range = cand[1] >= self.cfg.x_lo && cand[1] <= self.cfg.x_hi;
                if in_range && cand[2] > 0.0 && cand[2] <= 1.0 {
                    if let Ok(next) = self.residuals(delta, cand) {
                        if norm(&next.2) < norm(&scaled) || t < 1.0 / 128.0 {
                            accepted = Some((cand, next));
                            break;
                        }
                    }
                }
                t *= 0.5;
            }
            let Some((cand, next)) = accepted else {
                // stuck against the domain boundary: p tells which limit
                return Ok(if v[0] < 0.0 || v[0] > 1.0 {
                    NewtonOutcome::OutOfRange { p: v[0], iterations: it }
                } else {
                    NewtonOutcome::Rejected
                });
            };
            let moved = (0..3).map(|k| (cand[k] - v[k]).abs()).fold(0.0, f64::max);
            v = cand;
            (g, j, scaled) = next;
            if moved <= self.cfg.newton_tol {
                let [p, x, y] = v;
                if !(0.0..=1.0).contains(&p) {
                    return Ok(NewtonOutcome::OutOfRange { p, iterations: it });
                }
                if y >= 1.0 - 1e-6 || norm(&scaled) > 1e-6 {
                    return Ok(NewtonOutcome::Rejected);
                }
                let c = power_i(&self.c.eval(x)?, &self.c1.eval(x)?, &self.cfg)?;
                let d = power_i(&self.d.eval(x, y)?, &self.dy.eval(x, y)?, &self.cfg)?;
                let rate = 2.0 * c.lambda.log2() + xlog2y(delta, y) - d.lambda.log2();
                return Ok(NewtonOutcome::Interior(MrPoint {
                    delta,
                    p,
                    x,
                    y,
                    rate: rate.max(0.0),
                    bound: Bound::Mr,
                    method: Method::Newton,
                    newton_iterations: it,
                }));
            }
        }
        Ok(NewtonOutcome::Rejected)
    }

    /// Limit `x -> 0` (`p < 0`) or `x -> ∞` (`p > 1`) evaluated through the
    /// coefficient matrices. `None` when that limit matrix has no positive
    /// spectral radius.
    fn boundary(&self, delta: f64, p: f64, iterations: usize) -> Result<Option<MrPoint>> {
        let (k_c, k_d, x, p_lim) = if p < 0.0 { (0, 0, 0.0, 0.0) } else { (1, 2, f64::INFINITY, 1.0) };
        let c_lim = self.c.coefficient_matrix(k_c).constant_values();
        let Ok(lc) = spectral_radius(&c_lim, &self.cfg) else {
            return Ok(None);
        };
        let d_lim = self.d.coefficient_matrix(k_d);
        let d1 = d_lim.derivative(Var::Y, 1);
        let d2 = d_lim.derivative(Var::Y, 2);
        let at_one = power_i(&d_lim.eval(1.0)?, &d1.eval(1.0)?, &self.cfg)?;
        let dmax = at_one.d1() / at_one.lambda;
        let (y, rate) = if delta >= dmax {
            (1.0, 0.0)
        } else {
            let root = newton_bracketed(
                |y| {
                    let e = power_ii(&d_lim.eval(y)?, &d1.eval(y)?, &d2.eval(y)?, &self.cfg)?;
                    Ok((
                        y * e.d1() - delta * e.lambda,
                        (1.0 - delta) * e.d1() + y * e.d2(),
                    ))
                },
                0.0,
                1.0,
                true,
                0.5,
                self.cfg.newton_tol,
                self.cfg.newton_max_iter,
            )?;
            let e = spectral_radius(&d_lim.eval(root.x)?, &self.cfg)?;
            let r = 2.0 * lc.log2() + xlog2y(delta, root.x) - e.log2();
            (root.x, r.max(0.0))
        };
        Ok(Some(MrPoint {
            delta,
            p: p_lim,
            x,
            y,
            rate,
            bound: if rate > 0.0 { Bound::LowerBound } else { Bound::Zero },
            method: Method::Boundary,
            newton_iterations: iterations,
        }))
    }
}

enum NewtonOutcome {
    Interior(MrPoint),
    OutOfRange { p: f64, iterations: usize },
    Rejected,
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            for k in col..3 {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

impl MrModel for MrProblem {
    fn capacity(&self) -> f64 {
        self.capacity
    }

    fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn c_info(&self, x: XPoint) -> Result<CInfo> {
        let XPoint::Finite(x) = x else {
            return Err(Error::Unsupported("limit points of a multi-state system".into()));
        };
        let e = power_i(&self.c.eval(x)?, &self.c1.eval(x)?, &self.cfg)?;
        Ok(CInfo {
            p: x * e.d1() / e.lambda,
            log_lambda: e.lambda.log2(),
        })
    }

    fn g2(&self, x: XPoint, p: f64, y: f64, derivative: bool) -> Result<(f64, f64)> {
        let XPoint::Finite(x) = x else {
            return Err(Error::Unsupported("limit points of a multi-state system".into()));
        };
        if derivative {
            let e = self.d_full(x, y)?;
            let l = e.lambda;
            let val = x * e.dx() / l - 2.0 * p;
            let dval = x * (e.dxy() * l - e.dx() * e.dy()) / (l * l);
            Ok((val, dval))
        } else {
            let e = power_i(&self.d.eval(x, y)?, &self.dx.eval(x, y)?, &self.cfg)?;
            Ok((x * e.dx() / e.lambda - 2.0 * p, 0.0))
        }
    }

    fn d_info(&self, x: XPoint, y: f64) -> Result<DInfo> {
        let XPoint::Finite(x) = x else {
            return Err(Error::Unsupported("limit points of a multi-state system".into()));
        };
        let e = power_i(&self.d.eval(x, y)?, &self.dy.eval(x, y)?, &self.cfg)?;
        Ok(DInfo {
            delta: y * e.d1() / e.lambda,
            log_lambda: e.lambda.log2(),
        })
    }

    fn supports(&self, x: XPoint) -> bool {
        matches!(x, XPoint::Finite(_))
    }
}

pub fn mr_fixed_delta(g: &LabelledGraph, delta: f64, cfg: &SolverConfig) -> Result<MrPoint> {
    MrProblem::new(g, cfg)?.fixed_delta(delta)
}

pub fn mr_curve(g: &LabelledGraph, n: usize, cfg: &SolverConfig) -> Result<MrCurve> {
    MrProblem::new(g, cfg)?.curve(n)
}

pub fn delta_max_mr(g: &LabelledGraph, cfg: &SolverConfig) -> Result<f64> {
    MrProblem::new(g, cfg)?.delta_max()
}
