use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use gvbound::curve::{to_csv, Curve};
use gvbound::graphs::format_label;
use gvbound::gv::{simple_lb, simple_lb_curve};
use gvbound::plot::{render_svg, Series};
use gvbound::product::{adjacency_matrix, build_b, build_c, build_d, build_t};
use gvbound::singlestate::{distance_profile, partition_profile, secc_profile_closed};
use gvbound::{Error, Result, SolverConfig, System, SystemSpec};

#[derive(Parser)]
#[command(name = "gvbound", version, about = "GV and GV-MR lower bounds for binary constrained systems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct SystemArgs {
    /// swcc:L,w | rll:d,k | secc:L,w | file:<path>
    #[arg(long, required_unless_present = "file")]
    system: Option<String>,
    /// Graph file, same as --system file:<path>
    #[arg(long, conflicts_with = "system")]
    file: Option<PathBuf>,
}

impl SystemArgs {
    fn spec(&self) -> Result<SystemSpec> {
        match (&self.system, &self.file) {
            (Some(s), _) => s.parse(),
            (None, Some(f)) => Ok(SystemSpec::File(f.clone())),
            (None, None) => Err(Error::InvalidParameters("no system given".into())),
        }
    }
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Power iteration tolerance [default: 1e-10]
    #[arg(long)]
    tol_power: Option<f64>,
    /// Newton tolerance [default: 1e-8]
    #[arg(long)]
    tol_newton: Option<f64>,
    /// Power iteration cap [default: 100000]
    #[arg(long)]
    max_iter_power: Option<usize>,
    /// Newton iteration cap [default: 100]
    #[arg(long)]
    max_iter_newton: Option<usize>,
    /// Lower end of the x range scanned by the GV-MR procedures
    #[arg(long)]
    x_lo: Option<f64>,
    /// Upper end of the x range scanned by the GV-MR procedures
    #[arg(long)]
    x_hi: Option<f64>,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let d = SolverConfig::default();
        let cfg = SolverConfig {
            power_tol: self.tol_power.unwrap_or(d.power_tol),
            newton_tol: self.tol_newton.unwrap_or(d.newton_tol),
            power_max_iter: self.max_iter_power.unwrap_or(d.power_max_iter),
            newton_max_iter: self.max_iter_newton.unwrap_or(d.newton_max_iter),
            x_lo: self.x_lo.unwrap_or(d.x_lo),
            x_hi: self.x_hi.unwrap_or(d.x_hi),
            ..d
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the result here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ModeArgs {
    /// Evaluate at one relative distance
    #[arg(long, conflicts_with = "curve")]
    delta: Option<f64>,
    /// Evaluate a curve, optionally with this many points
    #[arg(long, num_args = 0..=1, value_name = "N")]
    curve: Option<Option<usize>>,
    /// Default number of curve points
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Also draw the curve as SVG
    #[arg(long, value_name = "PATH")]
    plot: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SubsetArgs {
    /// Marked edges for the GV-MR bound, as weight=<w>
    #[arg(long, value_name = "weight=W")]
    p_subset: Option<String>,
}

impl SubsetArgs {
    fn weight(&self) -> Result<Option<u32>> {
        let Some(text) = &self.p_subset else {
            return Ok(None);
        };
        text.strip_prefix("weight=")
            .and_then(|w| w.parse().ok())
            .map(Some)
            .ok_or_else(|| Error::InvalidParameters(format!("--p-subset expects weight=<w>, got {text:?}")))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixKind {
    Adjacency,
    T,
    B,
    C,
    D,
}

#[derive(Subcommand)]
enum Cmd {
    /// Capacity in bits per symbol
    Capacity {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// GV bound at one distance or as a curve
    Gv {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// GV-MR bound at one distance or as a curve
    Mr {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        subset: SubsetArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// GV, GV-MR and Cap - H(delta) curves together
    Lb {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Number of points per curve
        #[arg(long, num_args = 0..=1, value_name = "N")]
        curve: Option<Option<usize>>,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, value_name = "PATH")]
        plot: Option<PathBuf>,
        #[command(flatten)]
        subset: SubsetArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Structural checks on the graph
    Validate {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Label pair counts by Hamming distance for a single-state graph
    Profile {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        subset: SubsetArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Print a polynomial matrix as `row col poly` lines
    Dump {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, value_enum)]
        matrix: MatrixKind,
        #[command(flatten)]
        subset: SubsetArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    system: String,
    solver: Option<SolverConfig>,
    tool_version: &'static str,
    wall_time_s: f64,
    warnings: Vec<String>,
}

struct Run {
    start: Instant,
    system: String,
    solver: Option<SolverConfig>,
    warnings: Vec<String>,
}

impl Run {
    fn manifest(&self) -> RunManifest {
        RunManifest {
            command: std::env::args().collect::<Vec<_>>().join(" "),
            system: self.system.clone(),
            solver: self.solver,
            tool_version: env!("CARGO_PKG_VERSION"),
            wall_time_s: self.start.elapsed().as_secs_f64(),
            warnings: self.warnings.clone(),
        }
    }
}

fn write_text(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// CSV goes to the output and the manifest beside it (or to standard error);
/// JSON carries the manifest inline.
fn emit(run: &Run, out: &OutputArgs, csv: String, json_body: Value) -> Result<()> {
    let manifest = serde_json::to_value(run.manifest()).expect("manifest serialises");
    match out.format {
        Format::Csv => {
            write_text(&out.out, &csv)?;
            let m = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
            match &out.out {
                Some(p) => std::fs::write(manifest_path(p), m + "\n")?,
                None => eprintln!("{m}"),
            }
        }
        Format::Json => {
            let mut body = json_body;
            body["manifest"] = manifest;
            let text = serde_json::to_string_pretty(&body).expect("result serialises");
            write_text(&out.out, &(text + "\n"))?;
        }
    }
    Ok(())
}

fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

fn curve_size(curve: &Option<Option<usize>>, points: usize) -> usize {
    curve.flatten().unwrap_or(points)
}

fn open_system(args: &SystemArgs) -> Result<(System, Run)> {
    let sys = System::new(args.spec()?)?;
    let run = Run {
        start: Instant::now(),
        system: sys.spec.to_string(),
        solver: None,
        warnings: sys.warnings(),
    };
    Ok((sys, run))
}

fn curve_json(c: &Curve, extra: Value) -> Value {
    let mut v = json!({
        "points": c.points.iter().filter(|p| p.delta.is_finite() && p.rate.is_finite() && p.param.is_finite()).collect::<Vec<_>>(),
        "delta_max": c.delta_max,
    });
    if let Value::Object(m) = extra {
        for (k, x) in m {
            v[k] = x;
        }
    }
    v
}

fn write_plot(path: &Option<PathBuf>, title: &str, series: &[Series<'_>]) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, render_svg(title, series))?;
    }
    Ok(())
}

fn point_mode(mode: &ModeArgs) -> Result<Option<f64>> {
    match (mode.delta, &mode.curve) {
        (Some(d), None) => Ok(Some(d)),
        (None, Some(_)) => Ok(None),
        _ => Err(Error::InvalidParameters("give exactly one of --delta or --curve".into())),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Capacity { sys, solver, out } => {
            let (sys, mut run) = open_system(&sys)?;
            let cfg = solver.config()?;
            run.solver = Some(cfg);
            let cap = sys.capacity(&cfg)?;
            emit(&run, &out, format!("capacity\n{}\n", fmt6(cap)), json!({ "capacity": cap }))
        }
        Cmd::Gv { sys, solver, mode, out } => {
            let (sys, mut run) = open_system(&sys)?;
            let cfg = solver.config()?;
            run.solver = Some(cfg);
            if let Some(delta) = point_mode(&mode)? {
                let p = sys.gv_fixed(delta, &cfg)?;
                let csv = format!(
                    "delta,y,t_tilde,rate,clamped\n{},{},{},{},{}\n",
                    fmt6(p.delta),
                    fmt6(p.y),
                    fmt6(p.t_tilde),
                    fmt6(p.rate),
                    p.clamped
                );
                return emit(&run, &out, csv, json!({ "result": p }));
            }
            let c = sys.gv_curve(curve_size(&mode.curve, mode.points), &cfg)?;
            let (csv, dropped) = to_csv(&c.points);
            if dropped > 0 {
                run.warnings.push(format!("{dropped} non-finite curve points dropped"));
            }
            write_plot(&mode.plot, &run.system, &[Series { name: "GV", points: &c.points }])?;
            emit(&run, &out, csv, curve_json(&c, json!({})))
        }
        Cmd::Mr { sys, solver, mode, subset, out } => {
            let (sys, mut run) = open_system(&sys)?;
            let cfg = solver.config()?;
            run.solver = Some(cfg);
            let weight = subset.weight()?;
            if let Some(delta) = point_mode(&mode)? {
                let p = sys.mr_fixed(delta, weight, &cfg)?;
                let csv = format!(
                    "delta,p,x,y,rate,bound,method\n{},{},{},{},{},{},{}\n",
                    fmt6(p.delta),
                    fmt6(p.p),
                    if p.x.is_finite() { fmt6(p.x) } else { "inf".into() },
                    fmt6(p.y),
                    fmt6(p.rate),
                    serde_json::to_value(p.bound).unwrap().as_str().unwrap_or(""),
                    serde_json::to_value(p.method).unwrap().as_str().unwrap_or(""),
                );
                return emit(&run, &out, csv, json!({ "result": p }));
            }
            let mc = sys.mr_curve(curve_size(&mode.curve, mode.points), weight, &cfg)?;
            let (csv, dropped) = to_csv(&mc.curve.points);
            if dropped > 0 {
                run.warnings.push(format!("{dropped} non-finite curve points dropped"));
            }
            write_plot(&mode.plot, &run.system, &[Series { name: "GV-MR", points: &mc.curve.points }])?;
            emit(
                &run,
                &out,
                csv,
                curve_json(&mc.curve, json!({ "classification": mc.classification })),
            )
        }
        Cmd::Lb { sys, solver, curve, points, plot, subset, out } => {
            let (sys, mut run) = open_system(&sys)?;
            let cfg = solver.config()?;
            run.solver = Some(cfg);
            let n = curve_size(&curve, points);
            let cap = sys.capacity(&cfg)?;
            let gv = sys.gv_curve(n, &cfg)?;
            let mr = match sys.mr_curve(n, subset.weight()?, &cfg) {
                Ok(m) => Some(m),
                Err(e) if !e.is_input_error() => return Err(e),
                Err(e) => {
                    run.warnings.push(format!("GV-MR curve skipped: {e}"));
                    None
                }
            };
            let simple = simple_lb_curve(cap, n);
            let mut all = gv.points.clone();
            if let Some(m) = &mr {
                all.extend(m.curve.points.iter().copied());
            }
            all.extend(simple.points.iter().copied());
            let (csv, dropped) = to_csv(&all);
            if dropped > 0 {
                run.warnings.push(format!("{dropped} non-finite curve points dropped"));
            }
            let mut series = vec![Series { name: "GV", points: &gv.points }];
            if let Some(m) = &mr {
                series.push(Series { name: "GV-MR", points: &m.curve.points });
            }
            series.push(Series { name: "Cap - H(delta)", points: &simple.points });
            write_plot(&plot, &run.system, &series)?;
            let body = json!({
                "capacity": cap,
                "gv": curve_json(&gv, json!({})),
                "mr": mr.as_ref().map(|m| curve_json(&m.curve, json!({ "classification": m.classification }))),
                "simple": curve_json(&simple, json!({})),
                "simple_at_zero": simple_lb(cap, 0.0),
            });
            emit(&run, &out, csv, body)
        }
        Cmd::Validate { sys, out } => {
            let (sys, run) = open_system(&sys)?;
            let v = &sys.validation;
            let mut csv = String::from("states,edges,s,irreducible,period,primitive\n");
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                sys.graph.num_states(),
                sys.graph.edges().len(),
                sys.graph.s(),
                v.irreducible,
                v.period.map(|p| p.to_string()).unwrap_or_default(),
                v.is_primitive()
            ));
            let body = json!({
                "states": sys.graph.num_states(),
                "edges": sys.graph.edges().len(),
                "s": sys.graph.s(),
                "validation": v,
            });
            emit(&run, &out, csv, body)
        }
        Cmd::Profile { sys, subset, out } => {
            let (sys, mut run) = open_system(&sys)?;
            if !sys.is_single_state() {
                return Err(Error::Unsupported("distance profiles need a single-state graph".into()));
            }
            let s = sys.graph.s();
            let labels: Vec<u64> = sys.graph.edges().iter().map(|e| e.label).collect();
            let marks = sys.marks(subset.weight()?);
            let alpha = distance_profile(&labels, s);
            let part = partition_profile(&labels, &marks, s);
            if let SystemSpec::Secc { l, w } = sys.spec {
                if subset.weight()?.is_none_or(|x| x as usize == w) {
                    for m in secc_profile_closed(l, w)?.mismatches {
                        run.warnings.push(format!(
                            "closed form for {} at t = {} gives {}, enumeration gives {}",
                            m.series, m.t, m.closed_form, m.enumerated
                        ));
                    }
                }
            }
            let mut csv = String::from("t,alpha,beta,gamma\n");
            for t in 0..=s {
                csv.push_str(&format!("{t},{},{},{}\n", alpha[t], part.beta[t], part.gamma[t]));
            }
            let marked: Vec<String> = labels
                .iter()
                .zip(&marks)
                .filter(|x| *x.1)
                .map(|x| format_label(*x.0, s))
                .collect();
            let body = json!({
                "alpha": alpha,
                "alpha_marked": part.alpha,
                "beta": part.beta,
                "gamma": part.gamma,
                "marked_labels": marked,
            });
            emit(&run, &out, csv, body)
        }
        Cmd::Dump { sys, matrix, subset, out } => {
            let (sys, run) = open_system(&sys)?;
            let g = &sys.graph;
            let marks = || sys.marks(subset.weight().ok().flatten());
            subset.weight()?;
            let text = match matrix {
                MatrixKind::Adjacency => adjacency_matrix(g).dump(),
                MatrixKind::T => build_t(g).dump(),
                MatrixKind::B => build_b(g).dump(),
                MatrixKind::C => build_c(g, &marks()).dump(),
                MatrixKind::D => build_d(g, &marks()).dump(),
            };
            let body = json!({ "dump": text });
            emit(&run, &out, text.clone(), body)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 1 } else { 2 })
        }
    }
}
