//! `mgflab`: command-line front end for the mgf-core experiments.
//!
//! Every subcommand writes one report, to stdout or to `--output`. Relative
//! output paths are resolved against `$MGFLAB_OUT_DIR` when it is set.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mgf_core::convergence::{
    theorem1_report, theorem2_demo, ConditionVerdict, ConvergenceReport, LabConfig, Theorem2Table,
    DEFAULT_N_SET, DEFAULT_T_POINTS,
};
use mgf_core::distributions::{
    make_family, DistributionFamily, DistributionModel, FamilyParams, FamilyTag, TabulatedCdf,
    DEFAULT_CLT_ECDF_DRAWS, DEFAULT_FAMILY_SEED,
};
use mgf_core::mgf::{self, Interval, MgfValue};
use mgf_core::montecarlo::{empirical_cdf_distance, empirical_mgf, sample_stream};
use mgf_core::quadrature::QuadratureConfig;
use serde::Serialize;

mod parse;

use parse::ModelSpec;

pub const OUT_DIR_ENV: &str = "MGFLAB_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "mgflab", version, about = "One-sided MGFs and their convergence diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate M(t) for one model.
    Mgf {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, value_enum, default_value_t = Route::Auto)]
        route: Route,
        #[command(flatten)]
        common: Common,
    },
    /// Classify M(t) as finite or divergent across a t grid.
    Scan {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long = "t-grid", value_parser = parse::t_grid, allow_hyphen_values = true)]
        t_grid: ::std::vec::Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate M_n(t) for a family over n and t.
    Converge {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long = "t-grid", value_parser = parse::t_grid, allow_hyphen_values = true)]
        t_grid: ::std::vec::Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Check both conditions and MGF convergence on an interval.
    Theorem1 {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long, value_parser = parse::interval, allow_hyphen_values = true)]
        interval: (f64, f64),
        /// Defaults to equispaced interior points of the interval.
        #[arg(long = "t-grid", value_parser = parse::t_grid, allow_hyphen_values = true)]
        t_grid: Option<::std::vec::Vec<f64>>,
        #[command(flatten)]
        common: Common,
    },
    /// Uniform convergence of G_n(t, .) and the tail-integral formula at one t.
    Theorem2 {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimate of M(t) with its standard error.
    Mc {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 1_000_000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct ModelArg {
    /// frechet, lognormal, uniform, exponential, normal, pareto:<n>, point:<x>,
    /// clt:<n> or tabulated:<path>
    #[arg(long, value_parser = parse::model)]
    model: ModelSpec,
}

#[derive(Args, Debug)]
struct FamilyArg {
    /// pareto_to_frechet, degenerate_drift or clt_exponential
    #[arg(long, value_parser = parse::family)]
    family: FamilyTag,
    /// Comma list or logspace:lo:hi:count (base-10 exponents).
    #[arg(long = "n-set", value_parser = parse::n_set)]
    n_set: Option<::std::vec::Vec<u64>>,
    /// Draws behind each CLT member's empirical CDF.
    #[arg(long = "ecdf-draws", default_value_t = DEFAULT_CLT_ECDF_DRAWS)]
    ecdf_draws: usize,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long = "abs-tol", value_parser = parse::positive)]
    abs_tol: Option<f64>,
    #[arg(long = "rel-tol", value_parser = parse::positive)]
    rel_tol: Option<f64>,
    #[arg(long = "weak-tol", value_parser = parse::positive)]
    weak_tol: Option<f64>,
    #[arg(long = "mgf-tol", value_parser = parse::positive)]
    mgf_tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_FAMILY_SEED)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Auto,
    Density,
    Tail,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Eval(String),
}

impl From<mgf_core::Error> for Failure {
    fn from(e: mgf_core::Error) -> Self {
        Failure::Eval(e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

impl Common {
    fn lab(&self) -> LabConfig {
        let mut lab = LabConfig::default();
        if let Some(v) = self.abs_tol {
            lab.quadrature.abs_tol = v;
        }
        if let Some(v) = self.rel_tol {
            lab.quadrature.rel_tol = v;
        }
        if let Some(v) = self.weak_tol {
            lab.weak_tol = v;
        }
        if let Some(v) = self.mgf_tol {
            lab.mgf_tol = v;
        }
        lab
    }

    fn quad(&self) -> QuadratureConfig {
        self.lab().quadrature
    }
}

/// Parse `argv` (program name first), run, and return the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Eval(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn load_model(spec: &ModelSpec) -> Outcome<DistributionModel> {
    match spec {
        ModelSpec::Builtin(m) => Ok(m.clone()),
        ModelSpec::Tabulated(path) => {
            let (table, report) = TabulatedCdf::load(path)
                .map_err(|e| Failure::Eval(format!("cannot load tabulated CDF: {e}")))?;
            if report.truncated_lower || report.truncated_upper {
                eprintln!(
                    "warning: {} has F from {} to {}; mass outside the knots is truncated",
                    path.display(),
                    report.first_f,
                    report.last_f
                );
            }
            Ok(DistributionModel::tabulated(table))
        }
    }
}

fn build_family(arg: &FamilyArg, seed: u64) -> Outcome<(DistributionFamily, Vec<u64>)> {
    let n_set = arg.n_set.clone().unwrap_or_else(|| DEFAULT_N_SET.to_vec());
    let params = FamilyParams { index_set: n_set.clone(), seed, ecdf_draws: arg.ecdf_draws };
    let family = make_family(arg.family, &params).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok((family, n_set))
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn mgf_cells(v: &MgfValue) -> [String; 3] {
    [v.status.as_str().to_string(), num(v.value), num(v.error_estimate)]
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::Eval(format!("cannot format csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Eval(format!("cannot format csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Failure::Eval(e.to_string()))
}

fn json_text<T: Serialize>(value: &T) -> Outcome<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Eval(format!("cannot format json: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> Outcome<()> {
    match output {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Eval(format!("cannot write to stdout: {e}")))
        }
        Some(p) => {
            let path = resolve(p);
            fs::write(&path, text)
                .map_err(|e| Failure::Eval(format!("cannot write output file {}: {e}", path.display())))
        }
    }
}

fn execute(command: Command) -> Outcome<()> {
    match command {
        Command::Mgf { model, t, route, common } => {
            let m = load_model(&model.model)?;
            let quad = common.quad();
            let v = match route {
                Route::Auto => mgf::evaluate(&m, t, &quad),
                Route::Density => mgf::mgf_via_density(&m, t, &quad),
                Route::Tail => mgf::mgf_via_tail(&m, t, &quad),
            }?;
            model_rows(&m, &[(t, v)], &common)
        }
        Command::Scan { model, t_grid, common } => {
            let m = load_model(&model.model)?;
            let mut grid = t_grid;
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            let scan = mgf::existence_scan(&m, &grid, &common.quad())?;
            model_rows(&m, &scan, &common)
        }
        Command::Converge { family, t_grid, common } => {
            let (fam, n_set) = build_family(&family, common.seed)?;
            converge(&fam, &t_grid, &n_set, &common)
        }
        Command::Theorem1 { family, interval, t_grid, common } => {
            let (fam, n_set) = build_family(&family, common.seed)?;
            let interval = Interval::new(interval.0, interval.1)?;
            let t_grid = t_grid.unwrap_or_else(|| interval.interior_grid(DEFAULT_T_POINTS));
            let report = theorem1_report(&fam, &interval, &t_grid, &n_set, &common.lab())?;
            theorem1_output(&report, &common)
        }
        Command::Theorem2 { family, t, common } => {
            let (fam, n_set) = build_family(&family, common.seed)?;
            let table = theorem2_demo(&fam, t, &n_set, &common.lab())?;
            theorem2_output(&table, &common)
        }
        Command::Mc { model, t, count, stream, common } => {
            let m = load_model(&model.model)?;
            if count == 0 {
                return Err(Failure::Usage("--count must be positive".into()));
            }
            let batch = sample_stream(&m, count, common.seed, stream)?;
            let est = empirical_mgf(&batch, t)?;
            let ks = empirical_cdf_distance(&batch, &m)?;
            #[derive(Serialize)]
            struct McReport<'a> {
                model: String,
                t: f64,
                count: usize,
                seed: u64,
                stream: u64,
                estimate: &'a mgf_core::montecarlo::EmpiricalMgf,
                ks_distance: f64,
            }
            let text = match common.format.unwrap_or(Format::Csv) {
                Format::Json => json_text(&McReport {
                    model: m.id(),
                    t,
                    count,
                    seed: common.seed,
                    stream,
                    estimate: &est,
                    ks_distance: ks,
                })?,
                Format::Csv => csv_text(
                    &["model", "t", "count", "seed", "stream", "status", "estimate", "std_error", "ks_distance"],
                    &[vec![
                        m.id(),
                        num(t),
                        count.to_string(),
                        common.seed.to_string(),
                        stream.to_string(),
                        est.status.as_str().to_string(),
                        num(est.estimate),
                        num(est.std_error),
                        num(ks),
                    ]],
                )?,
            };
            emit(&common.output, &text)
        }
    }
}

fn model_rows(m: &DistributionModel, values: &[(f64, MgfValue)], common: &Common) -> Outcome<()> {
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let rows: Vec<Vec<String>> = values
                .iter()
                .map(|(t, v)| {
                    let mut r = vec![m.id(), num(*t)];
                    r.extend(mgf_cells(v));
                    r
                })
                .collect();
            csv_text(&["model", "t", "status", "value", "error_estimate"], &rows)?
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                t: f64,
                mgf: &'a MgfValue,
            }
            #[derive(Serialize)]
            struct Rows<'a> {
                model: String,
                rows: Vec<Row<'a>>,
            }
            json_text(&Rows { model: m.id(), rows: values.iter().map(|(t, mgf)| Row { t: *t, mgf }).collect() })?
        }
    };
    emit(&common.output, &text)
}

#[derive(Serialize)]
struct ConvergeReport {
    family: String,
    t_grid: ::std::vec::Vec<f64>,
    n_set: Vec<u64>,
    mgf_table: Vec<mgf_core::convergence::MgfCell>,
    limit_mgf: Vec<mgf_core::convergence::LimitCell>,
}

fn converge(fam: &DistributionFamily, t_grid: &[f64], n_set: &[u64], common: &Common) -> Outcome<()> {
    use mgf_core::convergence::{LimitCell, MgfCell};
    let quad = common.quad();
    let mut t_sorted = t_grid.to_vec();
    t_sorted.sort_by(f64::total_cmp);
    t_sorted.dedup();
    let mut mgf_table = Vec::new();
    for &n in n_set {
        let m = fam.member(n)?;
        for &t in &t_sorted {
            let v = mgf::evaluate(&m, t, &quad).map_err(|e| Failure::Eval(format!("n = {n}: {e}")))?;
            mgf_table.push(MgfCell { n, t, mgf: v });
        }
    }
    let limit_mgf = match fam.declared_limit().model() {
        Some(limit) => t_sorted
            .iter()
            .map(|&t| mgf::evaluate(limit, t, &quad).map(|mgf| LimitCell { t, mgf }))
            .collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    let report = ConvergeReport {
        family: fam.id().to_string(),
        t_grid: t_sorted,
        n_set: n_set.to_vec(),
        mgf_table,
        limit_mgf,
    };
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => family_table(&report.family, &report.mgf_table)?,
        Format::Json => json_text(&report)?,
    };
    emit(&common.output, &text)
}

fn family_table(family: &str, cells: &[mgf_core::convergence::MgfCell]) -> Outcome<String> {
    let rows: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            let mut r = vec![family.to_string(), c.n.to_string(), num(c.t)];
            r.extend(mgf_cells(&c.mgf));
            r
        })
        .collect();
    csv_text(&["family", "n", "t", "status", "value", "error_estimate"], &rows)
}

fn evidence_table(v: &ConditionVerdict) -> Outcome<String> {
    let cols: Vec<&str> = v.evidence.columns.iter().map(String::as_str).collect();
    csv_text(&cols, &v.evidence.rows)
}

/// CSV form: the MGF table, then the distance table, verdict summary and one
/// evidence table per verdict. On stdout the sections are separated by `# name`
/// lines; with `--output` each section after the first goes to a sibling file
/// `<stem>.<name>.csv`.
fn theorem1_output(report: &ConvergenceReport, common: &Common) -> Outcome<()> {
    if common.format.unwrap_or(Format::Json) == Format::Json {
        return emit(&common.output, &json_text(report)?);
    }
    let distances: Vec<Vec<String>> = report
        .sup_distance_by_n
        .iter()
        .map(|d| vec![d.n.to_string(), num(d.sup_distance), num(d.arg_x)])
        .collect();
    let verdicts = [
        ("condition_a", &report.condition_a),
        ("condition_b", &report.condition_b),
        ("mgf_convergence", &report.mgf_convergence),
    ];
    let mut summary: Vec<Vec<String>> = verdicts
        .iter()
        .map(|(name, v)| vec![name.to_string(), v.status.as_str().to_string(), v.note.clone()])
        .collect();
    summary.push(vec!["consistency".into(), serde_json::to_value(report.consistency)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default(), report.discrepancies.join("; ")]);

    let mut sections = vec![
        ("mgf_table".to_string(), family_table(&report.family, &report.mgf_table)?),
        ("distances".to_string(), csv_text(&["n", "sup_distance", "arg_x"], &distances)?),
        ("verdicts".to_string(), csv_text(&["verdict", "status", "note"], &summary)?),
    ];
    for (name, v) in verdicts {
        sections.push((name.to_string(), evidence_table(v)?));
    }
    write_sections(&sections, common)
}

fn write_sections(sections: &[(String, String)], common: &Common) -> Outcome<()> {
    match &common.output {
        None => {
            let text: Vec<String> = sections.iter().map(|(n, s)| format!("# {n}\n{s}")).collect();
            emit(&None, &text.join("\n"))
        }
        Some(p) => {
            let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("report").to_string();
            for (i, (name, text)) in sections.iter().enumerate() {
                let target = if i == 0 { p.clone() } else { p.with_file_name(format!("{stem}.{name}.csv")) };
                emit(&Some(target), text)?;
            }
            Ok(())
        }
    }
}

fn theorem2_output(table: &Theorem2Table, common: &Common) -> Outcome<()> {
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Json => json_text(table)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        num(r.sup_distance),
                        num(r.arg_x),
                        num(r.tail_integral.value),
                        num(r.density_route.value),
                        num(r.route_gap),
                    ]
                })
                .collect();
            csv_text(
                &["n", "sup_distance", "arg_x", "tail_integral", "density_route", "route_gap"],
                &rows,
            )?
        }
    };
    emit(&common.output, &text)
}
