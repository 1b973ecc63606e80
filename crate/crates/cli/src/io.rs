//! Input parsing and the CSV formats written by the subcommands.
//!
//! Floats are written with `{}`, the shortest representation that parses
//! back to the same value, so a dump re-read by `summarize` yields
//! bit-identical aggregates.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use optvalue::harness::{ExperimentContext, Interval, McEstimate, Method, MethodOutcome, MonteCarloReport, NuisanceMode, ReplicateRecord};
use optvalue::model::{Covariate, CovariateKind, Dataset, Observation};

use crate::CliError;

/// Reads the whole input (`-` is stdin) as UTF-8.
pub fn read_input(path: &Path) -> Result<String, CliError> {
    let mut bytes = Vec::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_end(&mut bytes)
    } else {
        std::fs::File::open(path).and_then(|mut f| f.read_to_end(&mut bytes))
    }
    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    String::from_utf8(bytes).map_err(|e| CliError::Data(format!("{}: input is not valid UTF-8: {e}", path.display())))
}

/// Parses `w,a,y` records. With `kind = None` the covariate is discrete when
/// every `w` is a non-negative integer, continuous otherwise.
pub fn parse_observations(text: &str, kind: Option<CovariateKind>) -> Result<Dataset, CliError> {
    // the csv reader miscounts lines on CRLF input
    let text = text.replace("\r\n", "\n");
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CliError::Data(format!("cannot read header: {e}")))?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(CliError::Usage("input is empty (expected a `w,a,y` header and records)".into()));
    }
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Data(format!("line 1: header must name columns w, a and y (got `{}`)", headers.iter().collect::<Vec<_>>().join(","))))
    };
    let (cw, ca, cy) = (col("w")?, col("a")?, col("y")?);

    let mut raw = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::Data(format!("malformed record: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |c: usize| rec.get(c).ok_or_else(|| CliError::Data(format!("line {line}: missing column")));
        raw.push((line, field(cw)?.to_string(), field(ca)?.to_string(), field(cy)?.to_string()));
    }
    if raw.is_empty() {
        return Err(CliError::Usage("input has a header but no records".into()));
    }
    let kind = kind.unwrap_or_else(|| {
        if raw.iter().all(|r| r.1.parse::<u32>().is_ok()) {
            CovariateKind::Discrete
        } else {
            CovariateKind::Continuous
        }
    });
    let records = raw
        .into_iter()
        .map(|(line, w, a, y)| {
            let bad = |what: &str, v: &str| CliError::Data(format!("line {line}: bad {what} `{v}`"));
            let w = match kind {
                CovariateKind::Discrete => Covariate::Stratum(w.parse().map_err(|_| bad("stratum (non-negative integer)", &w))?),
                CovariateKind::Continuous => Covariate::Real(w.parse().map_err(|_| bad("covariate", &w))?),
            };
            let a: u8 = a.parse().map_err(|_| bad("treatment (0 or 1)", &a))?;
            let y: f64 = y.parse().map_err(|_| bad("outcome", &y))?;
            Observation::new(w, a, y).map_err(|e| CliError::Data(format!("line {line}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Dataset::new(records).map_err(|e| CliError::Data(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

fn preamble(ctx: &ExperimentContext, extra: &[(&str, String)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# dgp={}", ctx.dgp);
    let _ = writeln!(s, "# n={}", ctx.n);
    let _ = writeln!(s, "# ell_n={}", ctx.ell_n);
    let _ = writeln!(s, "# mode={}", ctx.mode);
    let _ = writeln!(s, "# alpha={}", ctx.alpha);
    let _ = writeln!(s, "# truth={}", ctx.truth);
    for (k, v) in extra {
        let _ = writeln!(s, "# {k}={v}");
    }
    s
}

const REPLICATE_COLUMNS: [&str; 12] = [
    "replicate",
    "method",
    "status",
    "point",
    "lower",
    "upper",
    "lower_one_sided",
    "ill_defined_draws",
    "truth",
    "adaptive_truth",
    "fingerprint",
    "error",
];

pub fn write_replicates(ctx: &ExperimentContext, extra: &[(&str, String)], records: &[ReplicateRecord]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(REPLICATE_COLUMNS).map_err(internal)?;
    for r in records {
        for o in &r.outcomes {
            let (status, iv, err) = match &o.result {
                Ok(iv) => ("ok", Some(iv), String::new()),
                Err(e) => ("failed", None, e.clone()),
            };
            w.write_record([
                r.index.to_string(),
                o.method.to_string(),
                status.to_string(),
                opt(iv.map(|i| i.point)),
                opt(iv.map(|i| i.lower)),
                opt(iv.map(|i| i.upper)),
                opt(iv.and_then(|i| i.lower_one_sided)),
                iv.map_or(String::new(), |i| i.ill_defined_draws.to_string()),
                r.truth.to_string(),
                opt(r.adaptive_truth),
                r.fingerprint.clone(),
                err,
            ])
            .map_err(internal)?;
        }
    }
    let body = String::from_utf8(w.into_inner().map_err(internal)?).map_err(internal)?;
    Ok(preamble(ctx, extra) + &body)
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(format!("cannot format output: {e}"))
}

const CONTEXT_KEYS: [&str; 6] = ["dgp", "n", "ell_n", "mode", "alpha", "truth"];

/// A parsed replicate dump: its context, the remaining `# key=value` header
/// lines in order, and the records.
pub type ReplicateDump = (ExperimentContext, Vec<(String, String)>, Vec<ReplicateRecord>);

/// Inverse of [`write_replicates`].
pub fn read_replicates(text: &str) -> Result<ReplicateDump, CliError> {
    let mut meta = Vec::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        if let Some((k, v)) = line.trim_start_matches('#').trim().split_once('=') {
            meta.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    let get = |k: &str| {
        meta.iter()
            .find(|(key, _)| key == k)
            .map(|(_, v)| v)
            .ok_or_else(|| CliError::Data(format!("replicate dump lacks `# {k}=` header line")))
    };
    let parse_err = |k: &str, e: &dyn std::fmt::Display| CliError::Data(format!("bad `{k}` in header: {e}"));
    let ctx = ExperimentContext {
        dgp: get("dgp")?.parse().map_err(|e| parse_err("dgp", &e))?,
        n: get("n")?.parse().map_err(|e| parse_err("n", &e))?,
        ell_n: get("ell_n")?.parse().map_err(|e| parse_err("ell_n", &e))?,
        mode: get("mode")?.parse::<NuisanceMode>().map_err(|e| parse_err("mode", &e))?,
        alpha: get("alpha")?.parse().map_err(|e| parse_err("alpha", &e))?,
        truth: get("truth")?.parse().map_err(|e| parse_err("truth", &e))?,
    };

    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CliError::Data(e.to_string()))?.clone();
    if headers.iter().ne(REPLICATE_COLUMNS) {
        return Err(CliError::Data(format!("unexpected replicate columns `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut records: Vec<ReplicateRecord> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::Data(format!("malformed record: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |c: &str| CliError::Data(format!("line {line}: bad `{c}` value"));
        let num = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(REPLICATE_COLUMNS[i]));
        let opt_num = |i: usize| if rec[i].is_empty() { Ok(None) } else { num(i).map(Some) };
        let index: usize = rec[0].parse().map_err(|_| bad("replicate"))?;
        let method: Method = rec[1].parse().map_err(|_| bad("method"))?;
        let result = match &rec[2] {
            "ok" => Ok(Interval {
                point: num(3)?,
                lower: num(4)?,
                upper: num(5)?,
                lower_one_sided: opt_num(6)?,
                ill_defined_draws: rec[7].parse().map_err(|_| bad("ill_defined_draws"))?,
            }),
            "failed" => Err(rec[11].to_string()),
            _ => return Err(bad("status")),
        };
        let outcome = MethodOutcome { method, result };
        match records.last_mut() {
            Some(last) if last.index == index => last.outcomes.push(outcome),
            _ => records.push(ReplicateRecord {
                index,
                truth: num(8)?,
                adaptive_truth: opt_num(9)?,
                fingerprint: rec[10].to_string(),
                outcomes: vec![outcome],
            }),
        }
    }
    let extra = meta.into_iter().filter(|(k, _)| !CONTEXT_KEYS.contains(&k.as_str())).collect();
    Ok((ctx, extra, records))
}

fn est(e: Option<McEstimate>) -> [String; 2] {
    match e {
        Some(e) => [e.value.to_string(), e.se.to_string()],
        None => [String::new(), String::new()],
    }
}

/// Machine-readable summary: one row per method.
pub fn write_summary(report: &MonteCarloReport, extra: &[(&str, String)]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record([
        "method",
        "succeeded",
        "failed",
        "coverage",
        "coverage_se",
        "one_sided_coverage",
        "one_sided_coverage_se",
        "adaptive_coverage",
        "adaptive_coverage_se",
        "bias",
        "bias_se",
        "squared_bias",
        "squared_bias_se",
        "mean_width",
        "mean_width_se",
        "width_ratio_vs_online",
        "ill_defined_draws",
    ])
    .map_err(internal)?;
    let online_width = report.method(Method::Online).and_then(|s| s.width).map(|w| w.value);
    for s in &report.methods {
        let mut row = vec![s.method.to_string(), s.succeeded.to_string(), s.failed.to_string()];
        for e in [s.coverage, s.one_sided_coverage, s.adaptive_coverage, s.bias, s.squared_bias, s.width] {
            row.extend(est(e));
        }
        row.push(match (s.width, online_width) {
            (Some(w), Some(o)) => (w.value / o).to_string(),
            _ => String::new(),
        });
        row.push(s.ill_defined_draws.to_string());
        w.write_record(row).map_err(internal)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(internal)?).map_err(internal)?;
    let mut extra = extra.to_vec();
    extra.push(("replicates", report.replicates.to_string()));
    Ok(preamble(&report.context, &extra) + &body)
}
