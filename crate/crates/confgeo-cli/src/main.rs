//! `confgeo` -- tensor tables, verification suites, and flow experiments
//! for the deformed-geometry engine.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use confgeo::chart::Chart;
use confgeo::domain::DomainBox;
use confgeo::dsl::load_metric;
use confgeo::expr::Expr;
use confgeo::flow::{conservation_report, integrate_geodesic, integrate_hamiltonian, MonitorDrift};
use confgeo::hj::{flrw_fields, schwarzschild_fields};
use confgeo::metric::{builtin_metric, curvature, MetricSpec, DIM};
use confgeo::parse::parse;
use confgeo::poisson::{h_alpha, hamiltonian_vector_field, l_alpha, ltilde_alpha};
use confgeo::recursion::{t_alpha_minkowski_display, trace_power};
use confgeo::suites::{run_suite, SuiteConfig, SUITE_NAMES};

#[derive(Parser)]
#[command(name = "confgeo", about = "conformable differential geometry engine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Subcommand)]
enum Command {
    /// Emit nonzero curvature components (expressions and values at a point)
    Tensors(TensorsArgs),
    /// Run a named verification suite; exit status 0 iff it passes
    Verify(VerifyArgs),
    /// Integrate a flow, writing a trajectory CSV and a drift report
    Flow(FlowArgs),
}

#[derive(Args)]
struct MetricArgs {
    /// builtin name (minkowski | schwarzschild | flrw) or a .metric file
    #[arg(long)]
    metric: String,
    /// black-hole mass for schwarzschild
    #[arg(long = "M", visible_alias = "mass", default_value_t = 1.0)]
    mass: f64,
    /// spatial curvature constant for flrw
    #[arg(long, default_value_t = 0.0)]
    k: f64,
    /// scale factor expression in q1 for flrw
    #[arg(long = "R", visible_alias = "scale-factor", default_value = "q1^2")]
    scale_factor: String,
    /// parameter overrides for .metric files (name=value)
    #[arg(long = "param")]
    params: Vec<String>,
}

impl MetricArgs {
    fn load(&self) -> Result<MetricSpec> {
        if self.metric.ends_with(".metric") {
            let text = fs::read_to_string(&self.metric)
                .with_context(|| format!("reading {}", self.metric))?;
            let mut overrides = BTreeMap::new();
            for p in &self.params {
                let (k, v) = p
                    .split_once('=')
                    .ok_or_else(|| anyhow!("--param needs name=value, got `{p}`"))?;
                overrides.insert(k.to_string(), v.parse::<f64>()?);
            }
            return Ok(load_metric(&text, &overrides)?);
        }
        let scale = parse(&self.scale_factor, &Chart::config())
            .map_err(|e| anyhow!("bad --scale-factor: {e}"))?;
        Ok(builtin_metric(&self.metric, Some(self.mass), Some(self.k), Some(scale))?)
    }
}

#[derive(Args)]
struct TensorsArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    /// evaluation point q1,q2,q3,q4 (defaults to the domain center)
    #[arg(long)]
    at: Option<String>,
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
    /// write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// one of: lemma1 jacobi morphism noether schouten appendix oevel hierarchy hj
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    /// sampling seed (env CONFGEO_SEED overrides the default)
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long)]
    tol: Option<f64>,
    /// restrict metric-bearing suites (appendix, hj)
    #[arg(long)]
    metric: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    /// hamiltonian: x0 is q1..q4,p1..p4; geodesic: q1..q4,v1..v4
    #[arg(long, default_value = "hamiltonian")]
    kind: String,
    /// initial state, 8 comma-separated values
    #[arg(long)]
    x0: String,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// comma-separated monitor names (H plus the separation constants)
    #[arg(long, default_value = "")]
    monitors: String,
    /// relative drift tolerance for the exit status
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// trajectory CSV path
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON drift-summary path (stdout when omitted)
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run() {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<bool> {
    match Cli::parse().command {
        Command::Tensors(args) => cmd_tensors(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Flow(args) => cmd_flow(args),
    }
}

fn default_seed() -> u64 {
    std::env::var("CONFGEO_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(42)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct TensorComponent {
    tensor: &'static str,
    indices: Vec<usize>,
    expression: String,
    value: f64,
}

#[derive(Serialize)]
struct TensorReport {
    metric: String,
    alpha: f64,
    at: Vec<f64>,
    components: Vec<TensorComponent>,
    notes: Vec<String>,
}

fn cmd_tensors(args: TensorsArgs) -> Result<bool> {
    let g = args.metric.load()?;
    let at: Vec<f64> = match &args.at {
        Some(s) => {
            let v: Vec<f64> = s
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .context("parsing --at")?;
            if v.len() != DIM {
                bail!("--at needs {DIM} coordinates");
            }
            v
        }
        None => g
            .domain
            .intervals()
            .iter()
            .map(|(lo, hi)| 0.5 * (lo + hi))
            .collect(),
    };
    if !g.domain.contains(&at) {
        bail!("evaluation point {at:?} is outside the metric domain");
    }

    let bundle = curvature(&g);
    let chart = Chart::config();
    let mut components = Vec::new();
    let mut push = |tensor: &'static str, indices: Vec<usize>, e: &Expr| -> Result<()> {
        if e.is_zero() {
            return Ok(());
        }
        let value = e.eval(&at, args.alpha)?;
        components.push(TensorComponent {
            tensor,
            indices,
            expression: e.print(&chart),
            value,
        });
        Ok(())
    };
    for m in 0..DIM {
        for n in 0..DIM {
            for l in n..DIM {
                push(
                    "christoffel",
                    vec![m + 1, n + 1, l + 1],
                    &bundle.christoffel[(m * DIM + n) * DIM + l],
                )?;
            }
        }
    }
    let mut riemann_all_zero = true;
    for i in 0..DIM {
        for j in (i + 1)..DIM {
            for k in 0..DIM {
                for l in (k + 1)..DIM {
                    if (k, l) < (i, j) {
                        continue;
                    }
                    let e = &bundle.riemann_lowered[((i * DIM + j) * DIM + k) * DIM + l];
                    if !e.is_zero() {
                        riemann_all_zero = false;
                    }
                    push("riemann", vec![i + 1, j + 1, k + 1, l + 1], e)?;
                }
            }
        }
    }
    for i in 0..DIM {
        for j in i..DIM {
            push("ricci", vec![i + 1, j + 1], &bundle.ricci[i * DIM + j])?;
            push("einstein", vec![i + 1, j + 1], &bundle.einstein[i * DIM + j])?;
        }
    }
    push("ricci_scalar", Vec::new(), &bundle.ricci_scalar)?;

    let mut notes = Vec::new();
    if riemann_all_zero {
        notes.push("all Riemann components zero".to_string());
    }
    notes.push(bundle.conventions.to_string());

    let report = TensorReport {
        metric: g.name.clone(),
        alpha: args.alpha,
        at,
        components,
        notes,
    };
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Csv => {
            let mut s = String::from("tensor,indices,expression,value\n");
            for c in &report.components {
                s.push_str(&format!(
                    "{},{},\"{}\",{:?}\n",
                    c.tensor,
                    c.indices.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
                    c.expression,
                    c.value
                ));
            }
            s
        }
        Format::Markdown => {
            let mut s = format!(
                "# {} curvature (alpha = {}) at ({})\n",
                report.metric,
                report.alpha,
                report
                    .at
                    .iter()
                    .map(|v| format!("{v}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            for note in &report.notes {
                s.push_str(&format!("\n> {note}\n"));
            }
            for tensor in ["christoffel", "riemann", "ricci", "ricci_scalar", "einstein"] {
                let rows: Vec<_> =
                    report.components.iter().filter(|c| c.tensor == tensor).collect();
                if rows.is_empty() {
                    continue;
                }
                s.push_str(&format!(
                    "\n## {tensor}\n\n| indices | expression | value |\n|---|---|---|\n"
                ));
                for c in rows {
                    s.push_str(&format!(
                        "| {} | `{}` | {:.6e} |\n",
                        c.indices.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
                        c.expression,
                        c.value
                    ));
                }
            }
            s
        }
    };
    emit(&args.out, &text)?;
    Ok(true)
}

fn cmd_verify(args: VerifyArgs) -> Result<bool> {
    if !SUITE_NAMES.contains(&args.suite.as_str()) {
        bail!("unknown suite `{}` (expected one of {})", args.suite, SUITE_NAMES.join(", "));
    }
    let default_tol = match args.suite.as_str() {
        "lemma1" => 1e-10,
        "jacobi" | "morphism" | "appendix" => 1e-8,
        _ => 1e-9,
    };
    let cfg = SuiteConfig {
        alpha: args.alpha,
        seed: args.seed.unwrap_or_else(default_seed),
        n: args.n,
        tol: args.tol.unwrap_or(default_tol),
        metric: args.metric.clone(),
    };
    let report = run_suite(&args.suite, &cfg)?;
    let text = match args.format {
        Format::Json => report.to_json() + "\n",
        Format::Markdown => report.to_markdown(),
        Format::Csv => {
            let mut s = String::from("name,max_residual\n");
            for r in &report.results {
                s.push_str(&format!("\"{}\",{:?}\n", r.name, r.max_residual));
            }
            s
        }
    };
    emit(&args.out, &text)?;
    eprintln!(
        "suite {}: {} ({} identities, worst residual {:.3e})",
        report.suite,
        if report.passed() { "PASS" } else { "FAIL" },
        report.results.len(),
        report.worst()
    );
    Ok(report.passed())
}

/// The Hamiltonian generating a metric's phase-space flow.
fn hamiltonian_for(g: &MetricSpec) -> Result<Expr> {
    Ok(match g.name.as_str() {
        "schwarzschild" => {
            schwarzschild_fields(g.params.get("M").copied().unwrap_or(1.0)).hamiltonian
        }
        "flrw" => {
            let r = g
                .scale_factor
                .clone()
                .ok_or_else(|| anyhow!("flrw flow needs a scale factor"))?;
            flrw_fields(g.params.get("k").copied().unwrap_or(0.0), &r).hamiltonian
        }
        _ => h_alpha(),
    })
}

/// Named monitor fields for a metric's flow.
fn monitors_for(g: &MetricSpec, requested: &str) -> Result<Vec<(String, Expr)>> {
    let mut table: Vec<(String, Expr)> = Vec::new();
    match g.name.as_str() {
        "schwarzschild" => {
            let m = g.params.get("M").copied().unwrap_or(1.0);
            let fields = schwarzschild_fields(m);
            table.push(("H".into(), fields.hamiltonian.clone()));
            for (n, f) in fields.names.iter().zip(&fields.fields) {
                table.push((n.to_string(), f.clone()));
            }
        }
        "flrw" => {
            let k = g.params.get("k").copied().unwrap_or(0.0);
            let r = g
                .scale_factor
                .clone()
                .ok_or_else(|| anyhow!("flrw flow needs a scale factor"))?;
            let fields = flrw_fields(k, &r);
            table.push(("H".into(), fields.hamiltonian.clone()));
            for (n, f) in fields.names.iter().zip(&fields.fields) {
                table.push((n.to_string(), f.clone()));
            }
        }
        _ => {
            table.push(("H".into(), h_alpha()));
            table.push(("La".into(), l_alpha()));
            table.push(("Ltilde".into(), ltilde_alpha()));
            let t = t_alpha_minkowski_display();
            for h in 1..=3u32 {
                table.push((format!("TrT{h}"), trace_power(&t, h)));
            }
        }
    }
    if requested.is_empty() {
        return Ok(table);
    }
    let mut out = Vec::new();
    for name in requested.split(',') {
        let name = name.trim();
        let found = table
            .iter()
            .find(|(n, _)| n == name)
            .ok_or_else(|| {
                anyhow!(
                    "unknown monitor `{name}` for {} (available: {})",
                    g.name,
                    table.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>().join(", ")
                )
            })?;
        out.push(found.clone());
    }
    Ok(out)
}

/// Open manifold box for trajectories: positive orthant, outside the
/// horizon, polar angle inside (0, pi), curvature bound respected.
fn flow_domain(g: &MetricSpec) -> DomainBox {
    let huge = 1e9;
    let tiny = 1e-9;
    let mut iv = vec![(tiny, huge); 4];
    if g.name == "schwarzschild" {
        let m = g.params.get("M").copied().unwrap_or(1.0);
        iv[1] = (2.0 * m, huge);
        iv[2] = (tiny, std::f64::consts::PI);
    }
    if g.name == "flrw" {
        let k = g.params.get("k").copied().unwrap_or(0.0);
        if k > 0.0 {
            iv[1] = (tiny, 1.0 / k.sqrt());
        }
        iv[2] = (tiny, std::f64::consts::PI);
    }
    let mut all = iv;
    all.extend(vec![(tiny, huge); 4]);
    DomainBox::new(all)
}

#[derive(Serialize)]
struct FlowReport {
    metric: String,
    kind: String,
    alpha: f64,
    dt: f64,
    steps_requested: usize,
    steps_completed: usize,
    tol: f64,
    halted: Option<String>,
    drifts: Vec<MonitorDrift>,
}

fn cmd_flow(args: FlowArgs) -> Result<bool> {
    let g = args.metric.load()?;
    let x0: Vec<f64> = args
        .x0
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .context("parsing --x0")?;
    if x0.len() != 8 {
        bail!("--x0 needs 8 values, found {}", x0.len());
    }

    let result = match args.kind.as_str() {
        "hamiltonian" => {
            let monitors = monitors_for(&g, &args.monitors)?;
            let h = hamiltonian_for(&g)?;
            let field = hamiltonian_vector_field(&h);
            let domain = flow_domain(&g);
            integrate_hamiltonian(&field, &x0, args.dt, args.steps, &domain, &monitors, args.alpha)
        }
        "geodesic" => integrate_geodesic(&g, &x0, args.dt, args.steps, args.alpha),
        other => bail!("unknown --kind `{other}` (hamiltonian | geodesic)"),
    };

    let (traj, halted) = match result {
        Ok(t) => (t, None),
        Err((partial, e)) => (partial, Some(e.to_string())),
    };

    if let Some(path) = &args.csv {
        fs::write(path, traj.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    let drifts = if traj.is_empty() {
        Vec::new()
    } else {
        conservation_report(&traj, args.tol)
    };
    let ok = halted.is_none() && drifts.iter().all(|d| d.relative_drift <= args.tol);
    let report = FlowReport {
        metric: g.name.clone(),
        kind: args.kind.clone(),
        alpha: args.alpha,
        dt: args.dt,
        steps_requested: args.steps,
        steps_completed: traj.len().saturating_sub(1),
        tol: args.tol,
        halted,
        drifts,
    };
    let text = serde_json::to_string_pretty(&report)? + "\n";
    emit(&args.report, &text)?;
    eprintln!(
        "flow {}: {} ({} steps)",
        report.metric,
        if ok { "PASS" } else { "FAIL" },
        report.steps_completed
    );
    Ok(ok)
}
