//! Graphs with one state: every matrix is 1×1 and all bounds have closed forms
//! in the pair-distance counts of the edge labels.

use serde::Serialize;

use crate::curve::{xlog2y, Curve, CurvePoint, Segment};
use crate::eigen::SolverConfig;
use crate::error::{Error, Result};
use crate::graphs::{binomial, LabelledGraph};
use crate::gv::GvPoint;
use crate::mr::{
    classify, mr_curve_with, mr_parametric, CInfo, Classification, DInfo, MrCurve, MrModel,
    MrPoint, XPoint,
};
use crate::roots::newton_bracketed;

/// Above this many label pairs the counts go through a Walsh-Hadamard transform.
const DIRECT_PAIR_LIMIT: usize = 1 << 22;

/// Ordered pairs `(u, v)` with `u` from `a` and `v` from `b`, counted by Hamming distance.
fn cross_profile(a: &[u64], b: &[u64], s: usize) -> Vec<u64> {
    let mut out = vec![0u64; s + 1];
    if a.len().saturating_mul(b.len()) <= DIRECT_PAIR_LIMIT || s > 26 {
        for &u in a {
            for &v in b {
                out[(u ^ v).count_ones() as usize] += 1;
            }
        }
        return out;
    }
    let n = 1usize << s;
    let indicator = |set: &[u64]| {
        let mut f = vec![0i64; n];
        for &u in set {
            f[u as usize] += 1;
        }
        walsh_hadamard(&mut f);
        f
    };
    let fa = indicator(a);
    let fb = indicator(b);
    let mut h: Vec<i64> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
    walsh_hadamard(&mut h);
    for (z, &c) in h.iter().enumerate() {
        out[(z as u64).count_ones() as usize] += (c >> s) as u64;
    }
    out
}

fn walsh_hadamard(f: &mut [i64]) {
    let mut h = 1;
    while h < f.len() {
        for i in (0..f.len()).step_by(2 * h) {
            for j in i..i + h {
                let (x, y) = (f[j], f[j + h]);
                f[j] = x + y;
                f[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// `alpha[t]`: ordered label pairs at Hamming distance `t`.
pub fn distance_profile(labels: &[u64], s: usize) -> Vec<u64> {
    cross_profile(labels, labels, s)
}

/// Pair counts split by membership in the marked set: both marked (`alpha`),
/// exactly one marked (`beta`, both orders) and neither marked (`gamma`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionProfile {
    pub alpha: Vec<u64>,
    pub beta: Vec<u64>,
    pub gamma: Vec<u64>,
}

pub fn partition_profile(labels: &[u64], marks: &[bool], s: usize) -> PartitionProfile {
    let inside: Vec<u64> = labels.iter().zip(marks).filter(|x| *x.1).map(|x| *x.0).collect();
    let outside: Vec<u64> = labels.iter().zip(marks).filter(|x| !*x.1).map(|x| *x.0).collect();
    PartitionProfile {
        alpha: cross_profile(&inside, &inside, s),
        beta: cross_profile(&inside, &outside, s).iter().map(|c| 2 * c).collect(),
        gamma: cross_profile(&outside, &outside, s),
    }
}

fn binom_i(n: i64, k: i64) -> i64 {
    if n < 0 || k < 0 || k > n {
        0
    } else {
        binomial(n as usize, k as usize) as i64
    }
}

/// One disagreement between a printed closed form and the enumerated count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaMismatch {
    pub series: &'static str,
    pub t: usize,
    pub closed_form: i64,
    pub enumerated: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeccProfiles {
    /// Enumerated full profile; authoritative.
    pub alpha_all: Vec<u64>,
    /// Enumerated partition for the words of weight exactly `w`; authoritative.
    pub partition: PartitionProfile,
    pub mismatches: Vec<FormulaMismatch>,
}

/// Closed-form pair counts for the subblock energy constraint, checked
/// against enumeration. The enumerated values are returned; each closed-form
/// value that disagrees is reported.
pub fn secc_profile_closed(l: usize, w: usize) -> Result<SeccProfiles> {
    let g = crate::graphs::build_secc(l, w)?;
    let labels: Vec<u64> = g.edges().iter().map(|e| e.label).collect();
    let marks: Vec<bool> = labels.iter().map(|v| v.count_ones() as usize == w).collect();
    let alpha_all = distance_profile(&labels, l);
    let partition = partition_profile(&labels, &marks, l);

    let (li, wi) = (l as i64, w as i64);
    let edges = labels.len() as i64;
    let gv_alpha = |t: i64| -> i64 {
        let mut sub = 0;
        for j in 1..=t {
            for k in 0..(j + 1) / 2 {
                sub += binom_i(li - t, wi - j + k) * binom_i(t, k);
            }
        }
        binom_i(li, t) * (edges - sub)
    };
    let mr_alpha = |t: i64| -> i64 {
        if t % 2 == 0 {
            binom_i(li, wi) * binom_i(li - wi, t / 2) * binom_i(wi, t / 2)
        } else {
            0
        }
    };
    let mr_beta = |t: i64| -> i64 {
        let sum: i64 = (1..=t / 2).map(|j| binom_i(li - wi, t - j) * binom_i(wi, j)).sum();
        2 * binom_i(li, wi) * sum - 2 * mr_alpha(t)
    };
    let mut mismatches = Vec::new();
    let mut check = |series: &'static str, t: usize, closed: i64, enumerated: u64| {
        if closed != enumerated as i64 {
            mismatches.push(FormulaMismatch {
                series,
                t,
                closed_form: closed,
                enumerated,
            });
        }
    };
    for t in 0..=l {
        let ti = t as i64;
        check("alpha", t, gv_alpha(ti), alpha_all[t]);
        check("alpha_marked", t, mr_alpha(ti), partition.alpha[t]);
        check("beta", t, mr_beta(ti), partition.beta[t]);
        check(
            "gamma",
            t,
            gv_alpha(ti) - mr_alpha(ti) - mr_beta(ti),
            partition.gamma[t],
        );
    }
    Ok(SeccProfiles {
        alpha_all,
        partition,
        mismatches,
    })
}

fn check_split(p: f64, edges: usize, marked: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameters(format!("frequency must lie in [0, 1], got {p}")));
    }
    if marked == 0 || marked >= edges {
        return Err(Error::InvalidParameters(
            "the marked subset must be a proper nonempty subset of the edges".into(),
        ));
    }
    Ok(())
}

/// Per-bit exponent of the number of words whose marked-edge frequency is `p`:
/// `(H(p) + p log|P| + (1 - p) log(|E| - |P|)) / s`.
pub fn s_of_p(p: f64, edges: usize, marked: usize, s: usize) -> Result<f64> {
    check_split(p, edges, marked)?;
    let rest = (edges - marked) as f64;
    Ok((crate::curve::h2(p) + xlog2y(p, marked as f64) + xlog2y(1.0 - p, rest)) / s as f64)
}

/// Minimiser `z = p (|E| - |P|) / ((1 - p) |P|)` of `-p log z + log(|E| - |P| + |P| z)`.
pub fn z_opt(p: f64, edges: usize, marked: usize) -> Result<f64> {
    check_split(p, edges, marked)?;
    Ok(p * (edges - marked) as f64 / ((1.0 - p) * marked as f64))
}

fn poly(c: &[f64], y: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * y + a)
}

/// `Σ t c_t y^(t-1)`.
fn poly_d(c: &[f64], y: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (t, &a)| acc * y + t as f64 * a)
}

/// `Σ t c_t y^t`.
fn poly_t(c: &[f64], y: f64) -> f64 {
    y * poly_d(c, y)
}

fn to_f64(v: &[u64]) -> Vec<f64> {
    v.iter().map(|&c| c as f64).collect()
}

/// Bounds for a single-state graph with `s`-bit labels.
#[derive(Clone, Debug)]
pub struct SingleState {
    s: usize,
    edges: usize,
    marked: usize,
    alpha: Vec<f64>,
    part: Option<[Vec<f64>; 3]>,
    cfg: SolverConfig,
}

impl SingleState {
    /// `marks` selects the marked subset used by the GV-MR bound; it may be
    /// omitted when only the GV bound is needed.
    pub fn new(g: &LabelledGraph, marks: Option<&[bool]>, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if !g.is_single_state() {
            return Err(Error::InvalidParameters(format!(
                "expected a single-state graph, got {} states",
                g.num_states()
            )));
        }
        let labels: Vec<u64> = g.edges().iter().map(|e| e.label).collect();
        let alpha = to_f64(&distance_profile(&labels, g.s()));
        let (marked, part) = match marks {
            Some(m) => {
                if m.len() != labels.len() {
                    return Err(Error::InvalidParameters("one mark per edge is required".into()));
                }
                let p = partition_profile(&labels, m, g.s());
                (
                    m.iter().filter(|&&b| b).count(),
                    Some([to_f64(&p.alpha), to_f64(&p.beta), to_f64(&p.gamma)]),
                )
            }
            None => (0, None),
        };
        Ok(SingleState {
            s: g.s(),
            edges: labels.len(),
            marked,
            alpha,
            part,
            cfg: *cfg,
        })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn capacity(&self) -> f64 {
        (self.edges as f64).log2() / self.s as f64
    }

    /// `Σ t α_t / (s |E|^2)`.
    pub fn delta_max_gv(&self) -> f64 {
        poly_t(&self.alpha, 1.0) / (self.s as f64 * poly(&self.alpha, 1.0))
    }

    /// `T̃(δ)` at a given `y`.
    fn t_tilde(&self, delta: f64, y: f64) -> f64 {
        let s = self.s as f64;
        (-xlog2y(delta * s, y) + poly(&self.alpha, y).log2()) / s
    }

    pub fn gv_fixed(&self, delta: f64) -> Result<GvPoint> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidParameters(format!(
                "relative distance must lie in [0, 1], got {delta}"
            )));
        }
        let cap = self.capacity();
        let point = |y: f64, clamped: bool, it: usize| {
            let t = self.t_tilde(delta, y);
            GvPoint {
                delta,
                y,
                t_tilde: t,
                rate: (2.0 * cap - t).max(0.0),
                clamped,
                newton_iterations: it,
                power_iterations: 0,
            }
        };
        if delta == 0.0 {
            return Ok(point(0.0, false, 0));
        }
        if delta >= self.delta_max_gv() {
            return Ok(point(1.0, true, 0));
        }
        let ds = delta * self.s as f64;
        // F(y) = Σ (t - δs) α_t y^t
        let f: Vec<f64> = self
            .alpha
            .iter()
            .enumerate()
            .map(|(t, &a)| (t as f64 - ds) * a)
            .collect();
        let root = newton_bracketed(
            |y| Ok((poly(&f, y), poly_d(&f, y))),
            0.0,
            1.0,
            true,
            0.5,
            self.cfg.newton_tol.min(1e-13),
            self.cfg.newton_max_iter.max(200),
        )?;
        Ok(point(root.x, false, root.iterations))
    }

    pub fn gv_curve(&self, n: usize) -> Result<Curve> {
        if n < 2 {
            return Err(Error::InvalidParameters("a curve needs at least 2 points".into()));
        }
        let s = self.s as f64;
        let cap = self.capacity();
        let mut points: Vec<CurvePoint> = (0..n)
            .map(|i| {
                let y = i as f64 / (n - 1) as f64;
                let w = poly(&self.alpha, y);
                let delta = poly_t(&self.alpha, y) / (s * w);
                let rate = 2.0 * cap + (xlog2y(delta * s, y) - w.log2()) / s;
                CurvePoint {
                    segment: Segment::Gv,
                    param: y,
                    delta,
                    rate: rate.max(0.0),
                }
            })
            .collect();
        points.push(CurvePoint {
            segment: Segment::Tail,
            param: 1.0,
            delta: 1.0,
            rate: 0.0,
        });
        let mut c = Curve {
            points,
            delta_max: self.delta_max_gv(),
            power_iterations: 0,
        };
        c.sort_by_delta();
        Ok(c)
    }

    fn partition(&self) -> Result<&[Vec<f64>; 3]> {
        let part = self.part.as_ref().ok_or_else(|| {
            Error::InvalidParameters("the GV-MR bound needs a marked edge subset".into())
        })?;
        if self.marked == 0 || self.marked == self.edges {
            return Err(Error::Unsupported(
                "the marked subset must be a proper nonempty subset of the edges".into(),
            ));
        }
        Ok(part)
    }

    fn unmarked(&self) -> f64 {
        (self.edges - self.marked) as f64
    }

    pub fn s_of_p(&self, p: f64) -> Result<f64> {
        s_of_p(p, self.edges, self.marked, self.s)
    }

    pub fn z_opt(&self, p: f64) -> Result<f64> {
        z_opt(p, self.edges, self.marked)
    }

    /// Marked-edge frequency `p(x) = |P| x / (|E| - |P| + |P| x)`.
    pub fn p_of_x(&self, x: f64) -> f64 {
        let m = self.marked as f64;
        m * x / (self.unmarked() + m * x)
    }

    /// Coefficients of `Λ(x, y; D)` in `y` for fixed `x`.
    fn w_coeffs(&self, x: XPoint) -> Result<Vec<f64>> {
        let [a, b, g] = self.partition()?;
        Ok(match x {
            XPoint::Finite(x) => (0..=self.s).map(|t| a[t] * x * x + b[t] * x + g[t]).collect(),
            XPoint::Infinity => a.clone(),
            XPoint::Zero => g.clone(),
        })
    }

    pub fn classify(&self) -> Result<Classification> {
        classify(self)
    }

    pub fn mr_curve(&self, n: usize) -> Result<MrCurve> {
        self.partition()?;
        mr_curve_with(self, n)
    }

    pub fn mr_fixed(&self, delta: f64) -> Result<MrPoint> {
        self.partition()?;
        let cls = self.classify()?;
        mr_parametric(self, &cls, delta)
    }

    pub fn delta_max_mr(&self) -> Result<f64> {
        Ok(self.classify()?.delta_max)
    }

    /// Segment-`A` quantities `(p, y, δ, ρ)` at a finite `x`.
    pub fn mr_at_x(&self, x: f64) -> Result<(f64, f64, f64, f64)> {
        let xp = XPoint::Finite(x);
        let c = self.c_info(xp)?;
        let y = crate::mr::smallest_root_y(self, xp, c.p)?;
        let d = self.d_info(xp, y)?;
        let delta = if y == 0.0 { 0.0 } else { d.delta };
        let rate = 2.0 * c.log_lambda + xlog2y(delta, y) - d.log_lambda;
        Ok((c.p, y, delta, rate))
    }
}

impl MrModel for SingleState {
    fn capacity(&self) -> f64 {
        SingleState::capacity(self)
    }

    fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn c_info(&self, x: XPoint) -> Result<CInfo> {
        self.partition()?;
        let s = self.s as f64;
        let m = self.marked as f64;
        Ok(match x {
            XPoint::Finite(x) => CInfo {
                p: self.p_of_x(x),
                log_lambda: (self.unmarked() + m * x).log2() / s,
            },
            XPoint::Zero => CInfo {
                p: 0.0,
                log_lambda: self.unmarked().log2() / s,
            },
            XPoint::Infinity => CInfo {
                p: 1.0,
                log_lambda: m.log2() / s,
            },
        })
    }

    fn g2(&self, x: XPoint, p: f64, y: f64, _derivative: bool) -> Result<(f64, f64)> {
        let [a, b, g] = self.partition()?;
        let (av, bv, gv) = (poly(a, y), poly(b, y), poly(g, y));
        let (ad, bd, gd) = (poly_d(a, y), poly_d(b, y), poly_d(g, y));
        let n = self.unmarked();
        let m = self.marked as f64;
        Ok(match x {
            XPoint::Finite(x) => {
                // xΛ_x/Λ - 2p with Λ = A x^2 + B x + Γ
                let num = 2.0 * av * x * x + bv * x;
                let den = av * x * x + bv * x + gv;
                let dnum = 2.0 * ad * x * x + bd * x;
                let dden = ad * x * x + bd * x + gd;
                (num / den - 2.0 * p, (dnum * den - num * dden) / (den * den))
            }
            // leading terms of x·g as x -> ∞ and of g/x as x -> 0
            XPoint::Infinity => {
                let num = 2.0 * n * av - m * bv;
                let dnum = 2.0 * n * ad - m * bd;
                let den = m * av;
                (num / den, (dnum * den - num * m * ad) / (den * den))
            }
            XPoint::Zero => {
                let num = n * bv - 2.0 * m * gv;
                let dnum = n * bd - 2.0 * m * gd;
                let den = n * gv;
                (num / den, (dnum * den - num * n * gd) / (den * den))
            }
        })
    }

    fn d_info(&self, x: XPoint, y: f64) -> Result<DInfo> {
        let w = self.w_coeffs(x)?;
        let s = self.s as f64;
        let val = poly(&w, y);
        if val.is_nan() || val <= 0.0 {
            return Err(Error::NumericFailure(format!(
                "pair generating function vanishes at y = {y}"
            )));
        }
        Ok(DInfo {
            delta: poly_t(&w, y) / (s * val),
            log_lambda: val.log2() / s,
        })
    }

    fn supports(&self, x: XPoint) -> bool {
        match x {
            XPoint::Finite(_) => true,
            XPoint::Zero => self.part.as_ref().is_some_and(|p| p[2].iter().any(|&c| c > 0.0)),
            XPoint::Infinity => self.part.as_ref().is_some_and(|p| p[0].iter().any(|&c| c > 0.0)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::build_secc;
    use crate::product::weight_marks;

    fn secc32() -> SingleState {
        let g = build_secc(3, 2).unwrap();
        let marks = weight_marks(&g, 2);
        SingleState::new(&g, Some(&marks), &SolverConfig::default()).unwrap()
    }

    #[test]
    fn secc_3_2_profiles() {
        let g = build_secc(3, 2).unwrap();
        let labels: Vec<u64> = g.edges().iter().map(|e| e.label).collect();
        assert_eq!(distance_profile(&labels, 3), vec![4, 6, 6, 0]);
        let p = partition_profile(&labels, &weight_marks(&g, 2), 3);
        assert_eq!(p.alpha, vec![3, 0, 6, 0]);
        assert_eq!(p.beta, vec![0, 6, 0, 0]);
        assert_eq!(p.gamma, vec![1, 0, 0, 0]);
    }

    #[test]
    fn transform_matches_direct_count() {
        let labels: Vec<u64> = (0..1u64 << 12).filter(|v| v.count_ones() >= 5).collect();
        let mut direct = vec![0u64; 13];
        for &u in &labels {
            for &v in &labels {
                direct[(u ^ v).count_ones() as usize] += 1;
            }
        }
        let n = 1usize << 12;
        let mut f = vec![0i64; n];
        for &u in &labels {
            f[u as usize] = 1;
        }
        walsh_hadamard(&mut f);
        let mut h: Vec<i64> = f.iter().map(|x| x * x).collect();
        walsh_hadamard(&mut h);
        let mut via = vec![0u64; 13];
        for (z, &c) in h.iter().enumerate() {
            via[(z as u64).count_ones() as usize] += (c >> 12) as u64;
        }
        assert_eq!(direct, via);
        assert_eq!(direct, distance_profile(&labels, 12));
    }

    #[test]
    fn secc_gv_at_one_third() {
        let ss = secc32();
        let p = ss.gv_fixed(1.0 / 3.0).unwrap();
        assert!((p.y - (2.0f64 / 3.0).sqrt()).abs() < 1e-9);
        assert!((p.t_tilde - 1.327).abs() < 1e-3);
        assert!((p.rate - 0.006).abs() < 1e-3);
        assert_eq!(ss.capacity(), 2.0 / 3.0);
        assert_eq!(ss.delta_max_gv(), 3.0 / 8.0);
    }

    #[test]
    fn secc_mr_closed_forms() {
        let ss = secc32();
        for x in [2.0, 5.0, 10.0] {
            let (p, y, d, _) = ss.mr_at_x(x).unwrap();
            assert!((p - 3.0 * x / (1.0 + 3.0 * x)).abs() < 1e-9);
            assert!((y - (x - 1.0) / (2.0 * x)).abs() < 1e-9);
            assert!((d - 2.0 * x * (x - 1.0) / (9.0 * x * x - 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn s_of_p_peaks_at_uniform_split() {
        let ss = secc32();
        // p = |P|/|E| recovers the capacity
        assert!((ss.s_of_p(0.75).unwrap() - ss.capacity()).abs() < 1e-12);
        assert!(ss.s_of_p(0.5).unwrap() < ss.capacity());
        assert!((ss.z_opt(0.75).unwrap() - 1.0).abs() < 1e-12);
        assert!((s_of_p(1.0, 4, 3, 3).unwrap() - 2.0 * 3f64.log2() / 3.0 * 0.5).abs() < 1e-12);
        for p in [0.2, 0.5, 0.8] {
            let z = z_opt(p, 4, 3).unwrap();
            let direct = -p * z.log2() + (1.0 + 3.0 * z).log2();
            assert!((direct - 3.0 * s_of_p(p, 4, 3, 3).unwrap()).abs() < 1e-12);
        }
        assert!(s_of_p(1.5, 4, 3, 3).is_err());
    }

    #[test]
    fn closed_form_report() {
        let r = secc_profile_closed(3, 2).unwrap();
        assert_eq!(r.alpha_all, vec![4, 6, 6, 0]);
        assert!(r.mismatches.iter().all(|m| m.series == "beta" || m.series == "gamma"));
        assert!(r.mismatches.iter().any(|m| m.series == "beta" && m.t == 1));
    }
}
