//! Rate-distance curves and the records they are made of.

use serde::{Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Segment {
    /// Plain GV curve, parametrised by `y`.
    Gv,
    /// Interior GV-MR points, parametrised by `x`.
    A,
    /// Lower-bound segment at the extremal `x`, parametrised by `y`.
    B,
    /// Zero rate beyond the largest admissible distance.
    Tail,
    /// `Cap - H(delta)`, parametrised by `delta`.
    Simple,
}

impl Segment {
    pub fn as_str(self) -> &'static str {
        match self {
            Segment::Gv => "gv",
            Segment::A => "A",
            Segment::B => "B",
            Segment::Tail => "tail",
            Segment::Simple => "simple",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub segment: Segment,
    pub param: f64,
    pub delta: f64,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curve {
    pub points: Vec<CurvePoint>,
    pub delta_max: f64,
    pub power_iterations: usize,
}

impl Curve {
    /// Stable sort by relative distance.
    pub fn sort_by_delta(&mut self) {
        self.points.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    }

    /// Piecewise-linear rate at `delta`; zero beyond the last point.
    pub fn rate_at(&self, delta: f64) -> f64 {
        let pts = &self.points;
        if pts.is_empty() {
            return 0.0;
        }
        if delta <= pts[0].delta {
            return pts[0].rate;
        }
        for w in pts.windows(2) {
            if delta <= w[1].delta {
                let span = w[1].delta - w[0].delta;
                if span <= 0.0 {
                    return w[1].rate;
                }
                let t = (delta - w[0].delta) / span;
                return w[0].rate + t * (w[1].rate - w[0].rate);
            }
        }
        0.0
    }
}

/// CSV rows `segment,param,delta,rate` with six decimals, sorted by `delta`.
/// Points with a non-finite field are dropped; the count is returned.
pub fn to_csv(points: &[CurvePoint]) -> (String, usize) {
    let mut rows: Vec<&CurvePoint> = points
        .iter()
        .filter(|p| p.param.is_finite() && p.delta.is_finite() && p.rate.is_finite())
        .collect();
    rows.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    let mut out = String::from("segment,param,delta,rate\n");
    for p in &rows {
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6}\n",
            p.segment.as_str(),
            p.param,
            p.delta,
            p.rate
        ));
    }
    (out, points.len() - rows.len())
}

/// Binary entropy in bits.
pub fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// `0 * log 0 = 0` convention for the `delta log y` terms.
pub fn xlog2y(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.log2()
    }
}

/// Serialises non-finite floats as `null`.
pub fn finite_or_null<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert_eq!(h2(0.5), 1.0);
        assert_eq!(h2(0.0), 0.0);
        assert!((h2(0.11) - 0.4999).abs() < 1e-3);
    }

    #[test]
    fn interpolation() {
        let c = Curve {
            points: vec![
                CurvePoint { segment: Segment::Gv, param: 0.0, delta: 0.0, rate: 1.0 },
                CurvePoint { segment: Segment::Gv, param: 1.0, delta: 0.5, rate: 0.0 },
            ],
            delta_max: 0.5,
            power_iterations: 0,
        };
        assert_eq!(c.rate_at(0.25), 0.5);
        assert_eq!(c.rate_at(0.75), 0.0);
    }

    #[test]
    fn csv_drops_non_finite_and_sorts() {
        let pts = [
            CurvePoint { segment: Segment::B, param: 0.5, delta: 0.4, rate: 0.1 },
            CurvePoint { segment: Segment::A, param: 1.0, delta: 0.0, rate: 0.5 },
            CurvePoint { segment: Segment::A, param: 2.0, delta: f64::NAN, rate: 0.5 },
        ];
        let (csv, dropped) = to_csv(&pts);
        assert_eq!(dropped, 1);
        assert_eq!(
            csv,
            "segment,param,delta,rate\nA,1.000000,0.000000,0.500000\nB,0.500000,0.400000,0.100000\n"
        );
    }
}
