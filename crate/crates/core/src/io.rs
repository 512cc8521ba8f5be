//! CSV ingestion, analysis reports and simulation configuration files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{PovError, Result};
use crate::estimators::{estimate, EstimatorMethod, IndexEstimate, IndexKind};
use crate::interval::{confidence_interval, CiMethod, ConfidenceInterval};
use crate::model::{gini_among_poor, income_gap_ratio, poor_partition, IncomeSample, PovertyLine};
use crate::simulation::{
    run_full_grid, CellKind, DistributionSpec, EstimatorSpec, IntervalSpec, MonteCarloConfig, SimulationCellReport,
};

/// Row counts from a CSV ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    /// Data rows after the header.
    pub total: usize,
    pub parsed: usize,
    /// Rows whose income field was empty after trimming.
    pub dropped_empty: usize,
}

fn parse_income(field: &str) -> Option<f64> {
    let field = field.trim();
    let v: f64 = match field.strip_prefix('\u{2212}') {
        Some(rest) => -rest.trim_start().parse::<f64>().ok()?,
        None => field.parse().ok()?,
    };
    v.is_finite().then_some(v)
}

/// Reads one income column from CSV data with a header row.
///
/// `column` is matched against the header names first and otherwise read as
/// a 0-based column index. Row numbers in errors count data rows from 1.
pub fn ingest_reader<R: Read>(reader: R, column: &str, delimiter: u8) -> Result<(IncomeSample, IngestSummary)> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| PovError::Io(e.to_string()))?.clone();
    let col = headers
        .iter()
        .position(|h| h.trim() == column.trim())
        .or_else(|| column.trim().parse::<usize>().ok().filter(|&i| i < headers.len()))
        .ok_or_else(|| PovError::MissingColumn(column.to_string()))?;

    let mut values = Vec::new();
    let mut negative = Vec::new();
    let mut malformed = Vec::new();
    let mut summary = IngestSummary { total: 0, parsed: 0, dropped_empty: 0 };
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| PovError::Io(e.to_string()))?;
        let row = i + 1;
        summary.total += 1;
        let field = record.get(col).unwrap_or("").trim();
        if field.is_empty() {
            summary.dropped_empty += 1;
            continue;
        }
        match parse_income(field) {
            Some(v) if v < 0.0 => negative.push(row),
            Some(v) => values.push(v),
            None => malformed.push(row),
        }
    }
    if !malformed.is_empty() {
        return Err(PovError::MalformedNumber { rows: malformed });
    }
    if !negative.is_empty() {
        return Err(PovError::NegativeIncome { rows: negative });
    }
    summary.parsed = values.len();
    if values.len() < 2 {
        return Err(PovError::TooFewObservations { found: values.len() });
    }
    Ok((IncomeSample::new(values)?, summary))
}

pub fn ingest_csv(path: &Path, column: &str, delimiter: u8) -> Result<(IncomeSample, IngestSummary)> {
    let file = fs::File::open(path).map_err(|e| PovError::Io(format!("{}: {e}", path.display())))?;
    ingest_reader(file, column, delimiter)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum IndexSelection {
    Sen,
    Sst,
    Both,
}

impl IndexSelection {
    pub fn kinds(self) -> Vec<IndexKind> {
        match self {
            Self::Sen => vec![IndexKind::Sen],
            Self::Sst => vec![IndexKind::Sst],
            Self::Both => IndexKind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodSelection {
    Ustat,
    Plugin,
    Davidson,
    All,
}

impl MethodSelection {
    pub fn methods(self) -> Vec<EstimatorMethod> {
        match self {
            Self::Ustat => vec![EstimatorMethod::UStat],
            Self::Plugin => vec![EstimatorMethod::PlugIn],
            Self::Davidson => vec![EstimatorMethod::Davidson],
            Self::All => EstimatorMethod::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CiSelection {
    El,
    Jel,
    Normal,
    None,
    All,
}

impl CiSelection {
    pub fn methods(self) -> Vec<CiMethod> {
        match self {
            Self::El => vec![CiMethod::El],
            Self::Jel => vec![CiMethod::Jel],
            Self::Normal => vec![CiMethod::Normal],
            Self::None => Vec::new(),
            Self::All => CiMethod::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub input: PathBuf,
    /// Header name, or 0-based column index.
    pub column: String,
    pub delimiter: u8,
    pub poverty_line: f64,
    pub index: IndexSelection,
    pub method: MethodSelection,
    pub ci: CiSelection,
    pub alpha: f64,
    pub format: OutputFormat,
    /// Record the generation time (seconds since the Unix epoch) in the report.
    pub timestamp: bool,
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        PovertyLine::new(self.poverty_line)?;
        crate::interval::check_alpha(self.alpha)
    }
}

/// Results for one index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub index: IndexKind,
    pub estimates: Vec<IndexEstimate>,
    pub intervals: Vec<ConfidenceInterval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: String,
    pub column: String,
    pub rows: IngestSummary,
    pub poverty_line: f64,
    pub alpha: f64,
    pub n: usize,
    pub q: usize,
    pub headcount: f64,
    /// Undefined without poor observations.
    pub income_gap_ratio: Option<f64>,
    /// Undefined with fewer than two poor observations.
    pub gini_poor: Option<f64>,
    pub indices: Vec<IndexReport>,
    pub generated_unix: Option<u64>,
}

/// Runs the configured estimators and intervals on an already ingested sample.
pub fn analyze(
    sample: &IncomeSample,
    rows: IngestSummary,
    config: &AnalysisConfig,
) -> Result<AnalysisReport> {
    config.validate()?;
    let z = PovertyLine::new(config.poverty_line)?;
    let part = poor_partition(sample, z);
    let mut indices = Vec::new();
    for kind in config.index.kinds() {
        let estimates = config.method.methods().into_iter().map(|m| estimate(sample, z, kind, m)).collect();
        let intervals = config
            .ci
            .methods()
            .into_iter()
            .map(|c| confidence_interval(sample, z, kind, c, config.alpha))
            .collect::<Result<_>>()?;
        indices.push(IndexReport { index: kind, estimates, intervals });
    }
    let generated_unix = config.timestamp.then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    Ok(AnalysisReport {
        input: config.input.display().to_string(),
        column: config.column.clone(),
        rows,
        poverty_line: z.get(),
        alpha: config.alpha,
        n: part.n,
        q: part.q,
        headcount: part.headcount,
        income_gap_ratio: income_gap_ratio(&part, z).ok(),
        gini_poor: gini_among_poor(sample, z).ok(),
        indices,
        generated_unix,
    })
}

pub fn cmd_estimate(config: &AnalysisConfig) -> Result<AnalysisReport> {
    config.validate()?;
    let (sample, rows) = ingest_csv(&config.input, &config.column, config.delimiter)?;
    analyze(&sample, rows, config)
}

fn centre_method(ci: CiMethod) -> EstimatorMethod {
    match ci {
        CiMethod::El => EstimatorMethod::PlugIn,
        CiMethod::Jel => EstimatorMethod::UStat,
        CiMethod::Normal => EstimatorMethod::Davidson,
    }
}

fn interval_flags(ci: &ConfidenceInterval) -> String {
    let d = &ci.diagnostics;
    let mut flags = Vec::new();
    if d.lower_at_bound {
        flags.push("lower_at_bound");
    }
    if d.upper_at_bound {
        flags.push("upper_at_bound");
    }
    if d.infeasible_endpoints {
        flags.push("infeasible_endpoints");
    }
    flags.join(";")
}

impl AnalysisReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| PovError::Io(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| PovError::Io(e.to_string()))
    }

    /// One row per point estimate and one per interval, columns
    /// `index,method,n,q,estimate,ci_method,lower,upper,alpha,flags`.
    ///
    /// Interval rows carry the estimator their centre coincides with
    /// (EL: plug-in, JEL: U-statistic, normal: Davidson).
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| PovError::Io(e.to_string());
        w.write_record(["index", "method", "n", "q", "estimate", "ci_method", "lower", "upper", "alpha", "flags"])
            .map_err(io)?;
        for ir in &self.indices {
            for e in &ir.estimates {
                let flags = if e.no_poor { "no_poor" } else { "" };
                w.write_record([
                    ir.index.as_str(),
                    e.method.as_str(),
                    &e.n.to_string(),
                    &e.q.to_string(),
                    &e.value.to_string(),
                    "",
                    "",
                    "",
                    "",
                    flags,
                ])
                .map_err(io)?;
            }
            for ci in &ir.intervals {
                w.write_record([
                    ir.index.as_str(),
                    centre_method(ci.method).as_str(),
                    &self.n.to_string(),
                    &self.q.to_string(),
                    &ci.estimate.to_string(),
                    ci.method.as_str(),
                    &ci.lower.to_string(),
                    &ci.upper.to_string(),
                    &self.alpha.to_string(),
                    &interval_flags(ci),
                ])
                .map_err(io)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| PovError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| PovError::Io(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "undefined".to_string(), |v| format!("{v:.6}"));
        let mut out = String::new();
        out += &format!("input: {} (column {})\n", self.input, self.column);
        out += &format!(
            "rows: {} total, {} parsed, {} empty\n",
            self.rows.total, self.rows.parsed, self.rows.dropped_empty
        );
        out += &format!("poverty line: {}\n", self.poverty_line);
        out += &format!("n = {}, q = {}, headcount = {:.6}\n", self.n, self.q, self.headcount);
        out += &format!("income gap ratio: {}\n", opt(self.income_gap_ratio));
        out += &format!("gini among poor: {}\n", opt(self.gini_poor));
        for ir in &self.indices {
            out += &format!("\n[{}]\n", ir.index);
            for e in &ir.estimates {
                let flag = if e.no_poor { "  (no poor observations)" } else { "" };
                out += &format!("  {:<9} {:.6}{flag}\n", e.method.as_str(), e.value);
            }
            for ci in &ir.intervals {
                let flags = interval_flags(ci);
                let flags = if flags.is_empty() { String::new() } else { format!("  [{flags}]") };
                out += &format!(
                    "  {:<9} {:.0}% CI [{:.6}, {:.6}]  centre {:.6}{flags}\n",
                    ci.method.as_str(),
                    ci.level * 100.0,
                    ci.lower,
                    ci.upper,
                    ci.estimate
                );
            }
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => self.to_json().map(|s| s + "\n"),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Text => Ok(self.to_text()),
        }
    }
}

/// Default simulation configuration reproducing the bias/MSE and
/// coverage/length tables.
pub const BUNDLED_GRID_CONFIG: &str = include_str!("../configs/paper_tables.toml");

fn default_alpha() -> f64 {
    0.05
}

fn default_estimators() -> Vec<EstimatorSpec> {
    IndexKind::ALL
        .iter()
        .flat_map(|&index| EstimatorMethod::ALL.iter().map(move |&method| EstimatorSpec { index, method }))
        .collect()
}

fn default_intervals() -> Vec<IntervalSpec> {
    IndexKind::ALL
        .iter()
        .flat_map(|&index| CiMethod::ALL.iter().map(move |&method| IntervalSpec { index, method }))
        .collect()
}

/// Contents of a simulation TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationFile {
    pub seed: u64,
    pub reps: usize,
    pub z: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub n_grid: Vec<usize>,
    pub distributions: Vec<DistributionSpec>,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorSpec>,
    #[serde(default = "default_intervals")]
    pub intervals: Vec<IntervalSpec>,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

impl SimulationFile {
    /// Parses and validates a simulation file; errors name the offending line.
    pub fn parse(text: &str) -> Result<Self> {
        let file: SimulationFile = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| format!("line {}: ", line_of(text, s.start))).unwrap_or_default();
            PovError::Config(format!("{line}{}", e.message().trim()))
        })?;
        let at = |key: &str, msg: String| {
            let line = key_line(text, key).map(|l| format!("line {l}: ")).unwrap_or_default();
            PovError::Config(format!("{line}{msg}"))
        };
        if file.distributions.is_empty() {
            return Err(at("distributions", "no distributions given".into()));
        }
        for d in &file.distributions {
            d.validated().map_err(|e| at("family", e.to_string()))?;
        }
        let cfg = file.monte_carlo();
        cfg.validate().map_err(|e| {
            let key = match &e {
                PovError::InvalidAlpha(_) => "alpha",
                PovError::InvalidPovertyLine(_) => "z",
                PovError::Config(m) if m.contains("reps") => "reps",
                PovError::Config(m) if m.contains("threads") => "threads",
                _ => "n_grid",
            };
            at(key, e.to_string())
        })?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| PovError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            PovError::Config(m) => PovError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn monte_carlo(&self) -> MonteCarloConfig {
        MonteCarloConfig {
            reps: self.reps,
            seed: self.seed,
            n_grid: self.n_grid.clone(),
            z: self.z,
            alpha: self.alpha,
            estimators: self.estimators.clone(),
            intervals: self.intervals.clone(),
            threads: self.threads,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: MonteCarloConfig,
    pub distributions: Vec<DistributionSpec>,
    pub cells: Vec<SimulationCellReport>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl SimulationReport {
    /// Columns `dist,params,n,index,method,bias,mse,coverage,avg_length,failures,mc_se`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| PovError::Io(e.to_string());
        w.write_record([
            "dist", "params", "n", "index", "method", "bias", "mse", "coverage", "avg_length", "failures", "mc_se",
        ])
        .map_err(io)?;
        for c in &self.cells {
            w.write_record([
                c.distribution.family(),
                &c.distribution.params(),
                &c.n.to_string(),
                c.index.as_str(),
                &c.method,
                &fmt_opt(c.bias),
                &fmt_opt(c.mse),
                &fmt_opt(c.coverage),
                &fmt_opt(c.avg_length),
                &c.failures.to_string(),
                &c.mc_se.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| PovError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| PovError::Io(e.to_string()))
    }

    /// Wide per-table layout: one file per (index, estimator/interval, family),
    /// one row per (parameters, n), one column pair per method.
    pub fn tables(&self) -> Result<BTreeMap<String, String>> {
        let mut groups: BTreeMap<String, Vec<&SimulationCellReport>> = BTreeMap::new();
        for c in &self.cells {
            let kind = match c.kind {
                CellKind::Estimator => "estimators",
                CellKind::Interval => "intervals",
            };
            let name = format!("{}_{}_{}.csv", c.index.as_str(), kind, c.distribution.family());
            groups.entry(name).or_default().push(c);
        }
        let mut out = BTreeMap::new();
        for (name, cells) in groups {
            let mut methods: Vec<&str> = Vec::new();
            for c in &cells {
                if !methods.contains(&c.method.as_str()) {
                    methods.push(&c.method);
                }
            }
            let estimator = cells[0].kind == CellKind::Estimator;
            let (a, b) = if estimator { ("bias", "mse") } else { ("coverage", "avg_length") };
            let mut header = vec!["params".to_string(), "n".to_string(), "true_value".to_string()];
            for m in &methods {
                header.push(format!("{m}_{a}"));
                header.push(format!("{m}_{b}"));
            }
            if !estimator {
                header.extend(methods.iter().map(|m| format!("{m}_failures")));
            }
            let mut rows: Vec<(String, usize, f64, BTreeMap<&str, &SimulationCellReport>)> = Vec::new();
            for c in &cells {
                let params = c.distribution.params();
                match rows.iter_mut().find(|r| r.0 == params && r.1 == c.n) {
                    Some(r) => {
                        r.3.insert(&c.method, c);
                    }
                    None => rows.push((params, c.n, c.true_value, BTreeMap::from([(c.method.as_str(), *c)]))),
                }
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| PovError::Io(e.to_string());
            w.write_record(&header).map_err(io)?;
            for (params, n, truth, by_method) in rows {
                let mut rec = vec![params, n.to_string(), truth.to_string()];
                for m in &methods {
                    let c = by_method.get(m);
                    let (x, y) = match c {
                        Some(c) if estimator => (c.bias, c.mse),
                        Some(c) => (c.coverage, c.avg_length),
                        None => (None, None),
                    };
                    rec.push(fmt_opt(x));
                    rec.push(fmt_opt(y));
                }
                if !estimator {
                    rec.extend(methods.iter().map(|m| by_method.get(m).map(|c| c.failures.to_string()).unwrap_or_default()));
                }
                w.write_record(&rec).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| PovError::Io(e.to_string()))?;
            out.insert(name, String::from_utf8(bytes).map_err(|e| PovError::Io(e.to_string()))?);
        }
        Ok(out)
    }
}

pub fn cmd_simulate(file: &SimulationFile) -> Result<SimulationReport> {
    let config = file.monte_carlo();
    let cells = run_full_grid(&config, &file.distributions)?;
    Ok(SimulationReport { config, distributions: file.distributions.clone(), cells })
}

/// Writes `report.csv`, `report.json` and the per-table CSVs into `dir`,
/// returning the written paths.
pub fn write_simulation_outputs(report: &SimulationReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error| PovError::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: &str| -> Result<()> {
        let p = dir.join(name);
        fs::write(&p, body).map_err(io)?;
        written.push(p);
        Ok(())
    };
    for (name, body) in report.tables()? {
        put(&name, &body)?;
    }
    put("report.csv", &report.to_csv()?)?;
    let json = serde_json::to_string_pretty(report).map_err(|e| PovError::Io(e.to_string()))?;
    put("report.json", &(json + "\n"))?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ingest(text: &str, column: &str) -> Result<(IncomeSample, IngestSummary)> {
        ingest_reader(text.as_bytes(), column, b',')
    }

    #[test]
    fn ingest_by_name_and_index() {
        let (s, sum) = ingest("id,income\n1, 0.5\n2,1.0\n3,2.0\n", "income").unwrap();
        assert_eq!(s.values(), &[0.5, 1.0, 2.0]);
        assert_eq!(sum, IngestSummary { total: 3, parsed: 3, dropped_empty: 0 });
        let (s, _) = ingest("id,income\n1,0.5\n2,1.0\n3,2.0\n", "1").unwrap();
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn ingest_errors() {
        assert_eq!(
            ingest("income\n1\n-5\n2\n\u{2212}3\n", "income").unwrap_err(),
            PovError::NegativeIncome { rows: vec![2, 4] }
        );
        assert_eq!(
            ingest("income\n1\nabc\n2\nNaN\n", "income").unwrap_err(),
            PovError::MalformedNumber { rows: vec![2, 4] }
        );
        assert_eq!(ingest("income\n1\n", "income").unwrap_err(), PovError::TooFewObservations { found: 1 });
        assert_eq!(ingest("income\n1\n2\n", "wage").unwrap_err(), PovError::MissingColumn("wage".into()));
    }

    #[test]
    fn ingest_drops_empty_and_accepts_zero() {
        let (s, sum) = ingest_reader("a;income\nx; 0\ny;\nz; 3 \n".as_bytes(), "income", b';').unwrap();
        assert_eq!(s.values(), &[0.0, 3.0]);
        assert_eq!(sum, IngestSummary { total: 3, parsed: 2, dropped_empty: 1 });
    }

    fn config(ci: CiSelection) -> AnalysisConfig {
        AnalysisConfig {
            input: PathBuf::from("mem"),
            column: "income".into(),
            delimiter: b',',
            poverty_line: 1.41,
            index: IndexSelection::Both,
            method: MethodSelection::All,
            ci,
            alpha: 0.05,
            format: OutputFormat::Json,
            timestamp: false,
        }
    }

    #[test]
    fn analysis_report_round_trips() {
        let (s, rows) = ingest("income\n0.2\n0.4\n0.6\n0.9\n1.3\n2\n3.5\n", "income").unwrap();
        let report = analyze(&s, rows, &config(CiSelection::All)).unwrap();
        let back = AnalysisReport::from_json(&report.to_json().unwrap()).unwrap();
        assert_eq!(back, report);
        assert_eq!(report.indices.len(), 2);
        assert_eq!(report.indices[0].intervals.len(), 3);
        let csv = report.to_csv().unwrap();
        assert!(csv.starts_with("index,method,n,q,estimate,ci_method,lower,upper,alpha,flags\n"));
        assert_eq!(csv.lines().count(), 1 + 2 * (3 + 3));
    }

    #[test]
    fn text_matches_library_to_six_decimals() {
        let (s, rows) = ingest("income\n0.5\n1\n2\n", "income").unwrap();
        let mut cfg = config(CiSelection::None);
        cfg.method = MethodSelection::Ustat;
        let text = analyze(&s, rows, &cfg).unwrap().to_text();
        assert!(text.contains("ustat     0.322695"), "{text}");
        assert!(text.contains("ustat     0.527187"), "{text}");
    }

    #[test]
    fn interval_without_poor_is_an_inference_error() {
        let (s, rows) = ingest("income\n2\n3\n4\n", "income").unwrap();
        let err = analyze(&s, rows, &config(CiSelection::Jel)).unwrap_err();
        assert_eq!(err.code(), "NO_POOR_OBSERVATIONS");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn bundled_config_parses() {
        let f = SimulationFile::parse(BUNDLED_GRID_CONFIG).unwrap();
        assert_eq!(f.seed, 42);
        assert_eq!(f.reps, 2000);
        assert_eq!(f.z, 1.41);
        assert_eq!(f.n_grid, vec![20, 40, 60, 80, 100]);
        assert_eq!(f.distributions.len(), 9);
        assert_eq!(f.estimators.len(), 6);
        assert_eq!(f.intervals.len(), 6);
    }

    #[test]
    fn config_errors_name_lines() {
        let bad = "seed = 1\nreps = 0\nz = 1.41\nn_grid = [10]\n[[distributions]]\nfamily = \"exponential\"\nrate = 1.0\n";
        let e = SimulationFile::parse(bad).unwrap_err();
        assert_eq!(e.exit_code(), 4);
        assert!(e.to_string().contains("line 2"), "{e}");

        let bad = "seed = 1\nreps = 3\nz = 1.41\nn_grid = [10]\nbogus = 2\n";
        let e = SimulationFile::parse(bad).unwrap_err();
        assert!(e.to_string().contains("line 5"), "{e}");

        let bad = "seed = 1\nreps = 3\nz = 1.41\nn_grid = [10]\n[[distributions]]\nfamily = \"weibull\"\n";
        let e = SimulationFile::parse(bad).unwrap_err();
        assert!(e.to_string().contains("line "), "{e}");
    }

    #[test]
    fn simulation_tables_cover_grid() {
        let mut f = SimulationFile::parse(BUNDLED_GRID_CONFIG).unwrap();
        f.reps = 2;
        f.n_grid = vec![10];
        let report = cmd_simulate(&f).unwrap();
        let tables = report.tables().unwrap();
        assert_eq!(tables.len(), 12);
        assert_eq!(report.cells.len(), 9 * 12);
        let csv = report.to_csv().unwrap();
        assert!(csv.starts_with("dist,params,n,index,method,bias,mse,coverage,avg_length,failures,mc_se\n"));
        assert_eq!(csv.lines().count(), 1 + 9 * 12);
    }
}
