use std::path::{Path, PathBuf};

use optvalue::bootstrap::default_m_grid;
use optvalue::dgp::DgpSpec;
use optvalue::estimator::{classical_one_step, online_one_step, OnlineConfig, RefitPolicy, TermRecord, DEFAULT_SIGMA_FLOOR};
use optvalue::harness::{bootstrap_sweep, run_experiment, ExperimentConfig, McEstimate, Method, MonteCarloReport, NuisanceMode, SweepReport};
use optvalue::model::{CovariateKind, DEFAULT_PROPENSITY_FLOOR};
use optvalue::nuisance::{AnyLearner, KernelLearner, NpmleLearner};
use optvalue::rng::derive_seed;

use crate::config::{pick, ConfigFile};
use crate::svg::{self, Chart, Panel, Series, Spread};
use crate::{io, CliError, CompareArgs, EstimateArgs, OutputArgs, SimulateArgs, SummarizeArgs};

pub const SEED_ENV: &str = "OPTVALUE_SEED";

const ESTIMATE_KEYS: &[&str] = &["ell", "alpha", "refit", "sigma-floor", "learner", "seed", "out", "no-chart"];
const SIMULATE_KEYS: &[&str] = &[
    "dgp", "n", "ell", "reps", "methods", "mode", "alpha", "seed", "m-grid", "draws", "refit", "sigma-floor", "threads", "out", "no-chart",
];
const COMPARE_KEYS: &[&str] = &[
    "dgp", "n", "ell", "reps", "m-grid", "draws", "mode", "alpha", "seed", "refit", "sigma-floor", "threads", "min-coverage", "out", "no-chart",
];

fn load_config(path: Option<&Path>, allowed: &[&str]) -> Result<ConfigFile, CliError> {
    match path {
        Some(p) => ConfigFile::load(p, allowed),
        None => Ok(ConfigFile::default()),
    }
}

/// Flag, then config file, then `$OPTVALUE_SEED`, then 0.
fn resolve_seed(flag: Option<u64>, cfg: &ConfigFile) -> Result<u64, CliError> {
    if let Some(s) = pick(flag, cfg, "seed")? {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|e| CliError::Usage(format!("{SEED_ENV}=`{v}` is not a valid seed: {e}"))),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(CliError::Usage(format!("{SEED_ENV}: {e}"))),
    }
}

struct Output {
    dir: Option<PathBuf>,
    chart: bool,
}

fn resolve_output(args: &OutputArgs, cfg: &ConfigFile) -> Result<Output, CliError> {
    Ok(Output {
        dir: pick(args.out.clone(), cfg, "out")?,
        chart: !(args.no_chart || cfg.flag("no-chart")?),
    })
}

impl Output {
    fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        std::fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
    }

    fn write_chart(&self, chart: impl FnOnce() -> Chart) -> Result<(), CliError> {
        if self.chart && self.dir.is_some() {
            self.write("chart.svg", &svg::render(&chart()))?;
        }
        Ok(())
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e| CliError::Usage(format!("bad {what} entry `{s}`: {e}"))))
        .collect()
}

/// Aligned text table; the first column is left-aligned, the rest right.
fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { format!("{c:<w$}", w = widths[i]) } else { format!("{c:>w$}", w = widths[i]) })
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(headers.to_vec()) + "\n";
    for r in rows {
        out += &line(r.iter().map(String::as_str).collect());
        out.push('\n');
    }
    out
}

fn show(e: Option<McEstimate>, digits: usize) -> String {
    match e {
        Some(e) if e.se.is_finite() => format!("{:.digits$} ({:.digits$})", e.value, e.se),
        Some(e) => format!("{:.digits$}", e.value),
        None => "-".into(),
    }
}

pub fn estimate(args: EstimateArgs) -> Result<(), CliError> {
    let cfg = load_config(args.config.as_deref(), ESTIMATE_KEYS)?;
    let ell: usize = pick(args.ell, &cfg, "ell")?.ok_or_else(|| CliError::Usage("--ell is required".into()))?;
    let alpha = pick(args.alpha, &cfg, "alpha")?.unwrap_or(0.05);
    let sigma_floor = pick(args.sigma_floor, &cfg, "sigma-floor")?.unwrap_or(DEFAULT_SIGMA_FLOOR);
    let kind = match pick(args.learner, &cfg, "learner")?.as_deref() {
        None => None,
        Some("npmle") => Some(CovariateKind::Discrete),
        Some("kernel") => Some(CovariateKind::Continuous),
        Some(other) => return Err(CliError::Usage(format!("unknown learner `{other}` (expected npmle or kernel)"))),
    };
    let seed = resolve_seed(args.seed, &cfg)?;
    let out = resolve_output(&args.output, &cfg)?;
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(CliError::Usage(format!("alpha must lie in (0, 0.5), got {alpha}")));
    }

    let data = io::parse_observations(&io::read_input(&args.input)?, kind)?;
    let learner = match data.kind() {
        CovariateKind::Discrete => AnyLearner::Npmle(NpmleLearner),
        CovariateKind::Continuous => AnyLearner::Kernel(KernelLearner::default()),
    };
    let learner_name = if data.kind() == CovariateKind::Discrete { "npmle" } else { "kernel" };
    let refit = match pick(args.refit, &cfg, "refit")? {
        Some(r) => r.parse::<RefitPolicy>()?,
        None if data.kind() == CovariateKind::Discrete => RefitPolicy::EveryObservation,
        None => RefitPolicy::Blocks,
    };
    let schedule = refit.schedule(data.len(), ell)?;
    let online_cfg = OnlineConfig {
        sigma_floor,
        propensity_floor: DEFAULT_PROPENSITY_FLOOR,
        seed,
        keep_log: true,
    };
    let online = online_one_step(data.records(), &schedule, &learner, &online_cfg)?;
    let (lo, hi) = online.two_sided_ci(alpha)?;
    let lb = online.lower_bound(alpha)?;
    let classical = classical_one_step(data.records(), &learner, derive_seed(seed, 2), DEFAULT_PROPENSITY_FLOOR);

    let level = format!("{}%", 100.0 * (1.0 - alpha));
    println!(
        "n = {}, ell_n = {}, refits = {} ({refit}), learner = {learner_name}, seed = {seed}",
        data.len(),
        ell,
        schedule.blocks()
    );
    let mut rows = vec![vec![
        "online".to_string(),
        format!("{:.6}", online.psi_hat),
        format!("{:.6}", online.se),
        format!("[{:.6}, {:.6}]", lo, hi),
        format!("{lb:.6}"),
    ]];
    let mut csv_rows = vec![[
        "online".to_string(),
        online.psi_hat.to_string(),
        online.se.to_string(),
        lo.to_string(),
        hi.to_string(),
        lb.to_string(),
        online.gamma_n.to_string(),
        String::new(),
    ]];
    match &classical {
        Ok(c) => {
            let (clo, chi) = c.wald_ci(alpha)?;
            let clb = c.lower_bound(alpha)?;
            rows.push(vec![
                "classical".into(),
                format!("{:.6}", c.psi_hat),
                format!("{:.6}", c.se),
                format!("[{clo:.6}, {chi:.6}]"),
                format!("{clb:.6}"),
            ]);
            csv_rows.push([
                "classical".into(),
                c.psi_hat.to_string(),
                c.se.to_string(),
                clo.to_string(),
                chi.to_string(),
                clb.to_string(),
                String::new(),
                String::new(),
            ]);
        }
        Err(e) => {
            rows.push(vec!["classical".into(), format!("failed: {e}"), String::new(), String::new(), String::new()]);
            csv_rows.push(["classical".into(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), e.to_string()]);
        }
    }
    let ci_head = format!("{level} CI");
    let lb_head = format!("{level} lower bound");
    print!("{}", table(&["method", "estimate", "se", &ci_head, &lb_head], &rows));
    println!("gamma_n = {:.6} (1 / gamma_n = {:.6})", online.gamma_n, 1.0 / online.gamma_n);

    let mut w = csv::Writer::from_writer(Vec::new());
    let fmt_err = |e: csv::Error| CliError::Numerical(format!("cannot format output: {e}"));
    w.write_record(["method", "estimate", "se", "lower", "upper", "lower_bound", "gamma_n", "error"]).map_err(fmt_err)?;
    for r in &csv_rows {
        w.write_record(r).map_err(fmt_err)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))?).map_err(|e| CliError::Numerical(e.to_string()))?;
    let preamble = format!("# n={}\n# ell_n={ell}\n# alpha={alpha}\n# learner={learner_name}\n# refit={refit}\n# sigma_floor={sigma_floor}\n# seed={seed}\n", data.len());
    out.write("summary.csv", &(preamble + &body))?;

    let log = online.log.as_deref().unwrap_or(&[]);
    let mut terms = String::from("j,influence,sigma\n");
    for t in log {
        terms += &format!("{},{},{}\n", t.j, t.influence, t.sigma);
    }
    out.write("terms.csv", &terms)?;
    out.write_chart(|| trajectory_chart(log, alpha))?;
    Ok(())
}

/// Running estimate and interval after each scored observation.
pub fn running_estimates(log: &[TermRecord], alpha: f64) -> Vec<(f64, f64, f64, f64)> {
    let z = optvalue::normal::quantile(1.0 - alpha / 2.0);
    let (mut inv, mut weighted) = (0.0, 0.0);
    log.iter()
        .enumerate()
        .map(|(k, t)| {
            inv += 1.0 / t.sigma;
            weighted += t.influence / t.sigma;
            let psi = weighted / inv;
            let half = z * ((k + 1) as f64).sqrt() / inv;
            (t.j as f64, psi, psi - half, psi + half)
        })
        .collect()
}

fn trajectory_chart(log: &[TermRecord], alpha: f64) -> Chart {
    let all = running_estimates(log, alpha);
    // the first few terms swamp the scale
    let skip = (all.len() / 20).max(20).min(all.len().saturating_sub(1));
    let shown = &all[skip..];
    let stride = shown.len().div_ceil(400).max(1);
    let mut series = Series::new(format!("estimate, {}% CI", 100.0 * (1.0 - alpha)), Spread::Band, true);
    series.points = shown.iter().enumerate().filter(|(i, _)| i % stride == 0 || i + 1 == shown.len()).map(|(_, p)| *p).collect();
    let references = all.last().map(|p| vec![(p.1, "final".to_string())]).unwrap_or_default();
    Chart {
        title: format!("Online estimate as observations are scored (from j = {})", shown.first().map_or(0.0, |p| p.0)),
        x_label: "observation index j".into(),
        panels: vec![Panel {
            y_label: "estimated optimal value".into(),
            series: vec![series],
            references,
            categories: vec![],
        }],
    }
}

/// Shared experiment settings of `simulate` and `compare-bootstrap`.
struct Experiment {
    cfg: ExperimentConfig,
    m_grid: Vec<usize>,
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    file: &ConfigFile,
    dgp: Option<String>,
    n: Option<usize>,
    ell: Option<usize>,
    reps: Option<usize>,
    default_reps: usize,
    mode: Option<String>,
    alpha: Option<f64>,
    seed: Option<u64>,
    m_grid: Option<String>,
    draws: Option<usize>,
    refit: Option<String>,
    sigma_floor: Option<f64>,
    threads: Option<usize>,
) -> Result<Experiment, CliError> {
    let dgp: DgpSpec = pick(dgp, file, "dgp")?
        .ok_or_else(|| CliError::Usage("--dgp is required (d-e, c-ne or c-e)".into()))?
        .parse()?;
    let n = pick(n, file, "n")?.unwrap_or(1000);
    let ell = pick(ell, file, "ell")?.unwrap_or(match dgp.covariate_kind() {
        CovariateKind::Discrete => 100,
        CovariateKind::Continuous if n <= 1000 => 25,
        CovariateKind::Continuous => 100,
    });
    let mut cfg = ExperimentConfig::new(dgp, n, ell);
    cfg.replicates = pick(reps, file, "reps")?.unwrap_or(default_reps);
    if let Some(m) = pick(mode, file, "mode")? {
        cfg.mode = m.parse::<NuisanceMode>()?;
    }
    cfg.alpha = pick(alpha, file, "alpha")?.unwrap_or(cfg.alpha);
    cfg.seed = resolve_seed(seed, file)?;
    cfg.bootstrap_draws = pick(draws, file, "draws")?.unwrap_or(cfg.bootstrap_draws);
    cfg.sigma_floor = pick(sigma_floor, file, "sigma-floor")?.unwrap_or(cfg.sigma_floor);
    if let Some(r) = pick(refit, file, "refit")? {
        cfg.refit = Some(r.parse()?);
    }
    cfg.threads = pick(threads, file, "threads")?;
    let m_grid = match pick(m_grid, file, "m-grid")? {
        Some(text) => parse_list(&text, "m-grid")?,
        None => default_m_grid(n),
    };
    if m_grid.is_empty() {
        return Err(CliError::Usage("m-grid is empty".into()));
    }
    Ok(Experiment { cfg, m_grid })
}

fn extras(cfg: &ExperimentConfig) -> Vec<(&'static str, String)> {
    let mut v = vec![
        ("seed", cfg.seed.to_string()),
        ("refit", cfg.refit_policy().to_string()),
        ("sigma_floor", cfg.sigma_floor.to_string()),
    ];
    if cfg.methods.iter().any(|m| matches!(m, Method::Bootstrap { .. })) {
        v.push(("bootstrap_draws", cfg.bootstrap_draws.to_string()));
    }
    v
}

fn print_report(report: &MonteCarloReport) {
    let c = &report.context;
    println!(
        "{} (n = {}, ell_n = {}, mode = {}), {} replicates, alpha = {}, optimal value = {:.6}",
        c.dgp, c.n, c.ell_n, c.mode, report.replicates, c.alpha, c.truth
    );
    let online_width = report.method(Method::Online).and_then(|s| s.width).map(|w| w.value);
    let rows: Vec<Vec<String>> = report
        .methods
        .iter()
        .map(|s| {
            vec![
                s.method.to_string(),
                s.succeeded.to_string(),
                s.failed.to_string(),
                show(s.coverage, 4),
                show(s.one_sided_coverage, 4),
                show(s.adaptive_coverage, 4),
                show(s.bias, 5),
                show(s.width, 5),
                match (s.width, online_width) {
                    (Some(w), Some(o)) => format!("{:.3}", w.value / o),
                    _ => "-".into(),
                },
                s.ill_defined_draws.to_string(),
            ]
        })
        .collect();
    print!(
        "{}",
        table(
            &["method", "ok", "failed", "coverage (se)", "one-sided (se)", "adaptive (se)", "bias (se)", "width (se)", "width/online", "ill-defined"],
            &rows
        )
    );
}

fn coverage_chart(report: &MonteCarloReport) -> Chart {
    let c = &report.context;
    let categories: Vec<String> = report.methods.iter().map(|s| s.method.to_string()).collect();
    let bar = |e: Option<McEstimate>, x: f64, proportion: bool| {
        e.map(|e| {
            let half = if e.se.is_finite() { 1.96 * e.se } else { 0.0 };
            let (lo, hi) = (e.value - half, e.value + half);
            if proportion {
                (x, e.value, lo.max(0.0), hi.min(1.0))
            } else {
                (x, e.value, lo, hi)
            }
        })
    };
    let mut two = Series::new("two-sided", Spread::Bars, false);
    let mut one = Series::new("one-sided", Spread::Bars, false);
    let mut width = Series::new("mean width", Spread::Bars, false);
    for (i, s) in report.methods.iter().enumerate() {
        let x = i as f64;
        two.points.extend(bar(s.coverage, x - 0.1, true));
        one.points.extend(bar(s.one_sided_coverage, x + 0.1, true));
        width.points.extend(bar(s.width, x, false));
    }
    let nominal = 1.0 - c.alpha;
    Chart {
        title: format!("{}: n = {}, ell_n = {}, {} replicates", c.dgp, c.n, c.ell_n, report.replicates),
        x_label: "method".into(),
        panels: vec![
            Panel {
                y_label: "coverage (95% MC bars)".into(),
                series: vec![two, one],
                references: vec![(nominal, format!("nominal {nominal}"))],
                categories: categories.clone(),
            },
            Panel {
                y_label: "mean interval width".into(),
                series: vec![width],
                references: vec![],
                categories,
            },
        ],
    }
}

fn emit(report: &MonteCarloReport, records: &[optvalue::harness::ReplicateRecord], extra: &[(&str, String)], out: &Output) -> Result<(), CliError> {
    out.write("summary.csv", &io::write_summary(report, extra)?)?;
    out.write("replicates.csv", &io::write_replicates(&report.context, extra, records)?)
}

pub fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let file = load_config(args.config.as_deref(), SIMULATE_KEYS)?;
    let out = resolve_output(&args.output, &file)?;
    let Experiment { mut cfg, m_grid } = experiment(
        &file,
        args.dgp,
        args.n,
        args.ell,
        args.reps,
        2000,
        args.mode,
        args.alpha,
        args.seed,
        args.m_grid,
        args.draws,
        args.refit,
        args.sigma_floor,
        args.threads,
    )?;
    if let Some(text) = pick(args.methods, &file, "methods")? {
        let mut methods = Vec::new();
        for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let expanded: Vec<Method> = if name == "bootstrap" {
                m_grid.iter().map(|&m| Method::Bootstrap { m }).collect()
            } else {
                vec![name.parse()?]
            };
            for m in expanded {
                if !methods.contains(&m) {
                    methods.push(m);
                }
            }
        }
        cfg.methods = methods;
    }
    let (report, records) = run_experiment(&cfg)?;
    print_report(&report);
    emit(&report, &records, &extras(&cfg), &out)?;
    out.write_chart(|| coverage_chart(&report))
}

fn sweep_chart(sweep: &SweepReport, report: &MonteCarloReport) -> Chart {
    let c = &report.context;
    let mut cov = Series::new("bootstrap coverage", Spread::Bars, true);
    let mut ratio = Series::new("bootstrap / online", Spread::None, true);
    for r in &sweep.rows {
        if let Some(e) = r.coverage {
            cov.points.push((r.m as f64, e.value, (e.value - 1.96 * e.se).max(0.0), (e.value + 1.96 * e.se).min(1.0)));
        }
        if r.width_ratio.is_finite() {
            ratio.points.push((r.m as f64, r.width_ratio, r.width_ratio, r.width_ratio));
        }
    }
    let nominal = 1.0 - c.alpha;
    let mut refs = vec![(nominal, format!("nominal {nominal}"))];
    if let Some(o) = sweep.online_coverage {
        refs.push((o.value, "online".into()));
    }
    Chart {
        title: format!("{}: m-out-of-n bootstrap vs online, n = {}, {} replicates", c.dgp, c.n, report.replicates),
        x_label: "resample size m".into(),
        panels: vec![
            Panel {
                y_label: "coverage".into(),
                series: vec![cov],
                references: refs,
                categories: vec![],
            },
            Panel {
                y_label: "average CI width divided by online".into(),
                series: vec![ratio],
                references: vec![(1.0, "online".into())],
                categories: vec![],
            },
        ],
    }
}

pub fn compare_bootstrap(args: CompareArgs) -> Result<(), CliError> {
    let file = load_config(args.config.as_deref(), COMPARE_KEYS)?;
    let out = resolve_output(&args.output, &file)?;
    let Experiment { cfg, m_grid } = experiment(
        &file,
        args.dgp,
        args.n,
        args.ell,
        args.reps,
        500,
        args.mode,
        args.alpha,
        args.seed,
        args.m_grid,
        args.draws,
        args.refit,
        args.sigma_floor,
        args.threads,
    )?;
    let min_coverage = pick(args.min_coverage, &file, "min-coverage")?.unwrap_or(1.0 - cfg.alpha - 0.02);
    let (sweep, report, records) = bootstrap_sweep(&cfg, &m_grid)?;
    let c = &report.context;
    println!(
        "{} (n = {}, ell_n = {}, mode = {}), {} replicates, {} draws, alpha = {}, optimal value = {:.6}",
        c.dgp, c.n, c.ell_n, c.mode, report.replicates, cfg.bootstrap_draws, c.alpha, c.truth
    );
    println!("online: coverage {}, width {}", show(sweep.online_coverage, 4), show(sweep.online_width, 5));
    let rows: Vec<Vec<String>> = sweep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.m.to_string(),
                show(r.coverage, 4),
                show(r.width, 5),
                format!("{:.3}", r.width_ratio),
                r.ill_defined_draws.to_string(),
                r.failed.to_string(),
            ]
        })
        .collect();
    print!("{}", table(&["m", "coverage (se)", "width (se)", "width/online", "ill-defined", "failed"], &rows));
    match sweep.oracle_m(min_coverage) {
        Some(m) => {
            let r = sweep.rows.iter().find(|r| r.m == m).expect("oracle m is a grid point");
            println!("narrowest m with coverage >= {min_coverage:.3}: m = {m}, width ratio {:.3}", r.width_ratio);
        }
        None => println!("no m reaches coverage {min_coverage:.3}"),
    }
    let mut cfg = cfg;
    cfg.methods = report.methods.iter().map(|s| s.method).collect();
    emit(&report, &records, &extras(&cfg), &out)?;
    out.write_chart(|| sweep_chart(&sweep, &report))
}

pub fn summarize(args: SummarizeArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.replicates).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.replicates.display())))?;
    let (ctx, extra, records) = io::read_replicates(&text)?;
    let report = MonteCarloReport::from_records(ctx, &records);
    print_report(&report);
    let out = resolve_output(&args.output, &ConfigFile::default())?;
    let extra: Vec<(&str, String)> = extra.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    out.write("summary.csv", &io::write_summary(&report, &extra)?)?;
    out.write_chart(|| coverage_chart(&report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_aligns_columns() {
        let t = table(&["a", "bb"], &[vec!["long".into(), "1".into()], vec!["x".into(), "22".into()]]);
        assert_eq!(t, "a     bb\nlong   1\nx     22\n");
    }

    #[test]
    fn running_estimate_ends_at_the_weighted_mean() {
        let log: Vec<TermRecord> = (0..50)
            .map(|i| TermRecord {
                j: i + 11,
                influence: (i as f64 * 0.37).sin(),
                sigma: 0.5 + (i % 7) as f64 * 0.1,
            })
            .collect();
        let last = *running_estimates(&log, 0.05).last().unwrap();
        let inv: f64 = log.iter().map(|t| 1.0 / t.sigma).sum();
        let psi = log.iter().map(|t| t.influence / t.sigma).sum::<f64>() / inv;
        let gamma = inv / 50.0;
        assert!((last.1 - psi).abs() < 1e-12);
        assert!((last.3 - last.2 - 2.0 * 1.959963984540054 / (gamma * 50f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn lists_parse() {
        assert_eq!(parse_list::<usize>("100, 200,", "m").unwrap(), vec![100, 200]);
        assert!(matches!(parse_list::<usize>("1,x", "m"), Err(CliError::Usage(_))));
    }
}
