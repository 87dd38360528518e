//! Drivers behind each subcommand. Every driver returns printable
//! output plus enough structure for tests to assert on; exit codes are
//! decided by the binary (0 pass, 1 verification failure, 2 usage or
//! input error).

use crate::parse::{parse_expr, ParseError};
use crate::suites::{self, SuiteReport};
use coefficients::{naive_order_table_budgeted, order_to_csv, order_to_json, recurrence_table};
use exact_scalars::{rat, rat_to_f64, GaussianRational, Rational};
use geometry::{build_chart, random_regular_point, Expr, Point};
use indices::CapIndex;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use star::{eval_series, star_coeff_form, star_series_left};
use std::time::{Duration, Instant};

/// Largest coefficient-table order any subcommand will compute.
pub const MAX_TABLE_ORDER: usize = 6;
/// Largest star-product truncation order.
pub const MAX_STAR_ORDER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Self::Text),
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(format!(
                "unknown format '{other}' (expected text, json or csv)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub p: u8,
    pub q: u8,
    /// Coefficient-table order; per-command default when absent.
    pub n: Option<usize>,
    /// Star-product truncation order; per-command default when absent.
    pub order: Option<usize>,
    pub hbar: Rational,
    pub format: OutputFormat,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 2,
            q: 2,
            n: None,
            order: None,
            hbar: rat(1, 10),
            format: OutputFormat::Text,
            seed: 42,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("cannot parse {flag}: {err}")]
    Parse { flag: String, err: ParseError },
    #[error("the evaluation point is singular for this expression")]
    SingularPoint,
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {err}")]
    Io { path: String, err: String },
}

pub fn parse_flag_expr(flag: &str, src: &str) -> Result<Expr, CliError> {
    parse_expr(src).map_err(|err| CliError::Parse {
        flag: flag.into(),
        err,
    })
}

fn require_2x2(cfg: &RunConfig) -> Result<(), CliError> {
    if (cfg.p, cfg.q) != (2, 2) {
        return Err(CliError::Usage(
            "this command is fixed to the 2x2 chart (--pq 2,2)".into(),
        ));
    }
    Ok(())
}

fn capped(value: usize, max: usize, what: &str) -> Result<usize, CliError> {
    if value > max {
        return Err(CliError::BoundExceeded(format!(
            "{what} {value} exceeds the limit {max}"
        )));
    }
    Ok(value)
}

/// One order of the coefficient table, rendered in the chosen format.
pub fn cmd_coeff(cfg: &RunConfig) -> Result<String, CliError> {
    require_2x2(cfg)?;
    let n = capped(cfg.n.unwrap_or(1), MAX_TABLE_ORDER, "coefficient order")?;
    let table = recurrence_table(n);
    Ok(match cfg.format {
        OutputFormat::Json => {
            let mut s = order_to_json(&table, n).to_string();
            s.push('\n');
            s
        }
        OutputFormat::Csv => order_to_csv(&table, n),
        OutputFormat::Text => {
            let mut out = String::new();
            for (a, b, poly) in table.order_entries(n) {
                out.push_str(&format!("T^{n}_{a};{b} = {poly}\n"));
            }
            out
        }
    })
}

/// Dispatch one verification suite by name.
pub fn cmd_verify(
    cfg: &RunConfig,
    suite: &str,
    extra_triple: Option<&[Expr; 3]>,
) -> Result<SuiteReport, CliError> {
    match suite {
        "recurrence" => {
            require_2x2(cfg)?;
            let n = capped(cfg.n.unwrap_or(3), 4, "verification order")?;
            Ok(suites::suite_recurrence(n))
        }
        "hs-residual" => {
            require_2x2(cfg)?;
            let n = capped(cfg.n.unwrap_or(3), 4, "verification order")?;
            Ok(suites::suite_hs_residual(n))
        }
        "i-independence" => {
            require_2x2(cfg)?;
            let n = capped(cfg.n.unwrap_or(3), 3, "verification order")?;
            Ok(suites::suite_i_independence(n))
        }
        "fock" => {
            require_2x2(cfg)?;
            let n = capped(cfg.n.unwrap_or(3), 4, "verification order")?;
            Ok(suites::suite_fock(n))
        }
        "geometry" => {
            if !(1..=3).contains(&cfg.p) || !(1..=3).contains(&cfg.q) {
                return Err(CliError::BoundExceeded(
                    "the geometry suite supports 1 <= p, q <= 3".into(),
                ));
            }
            Ok(suites::suite_geometry(cfg.p, cfg.q, cfg.seed, 5))
        }
        "star-axioms" => {
            require_2x2(cfg)?;
            let order = capped(cfg.order.unwrap_or(2), MAX_STAR_ORDER, "star order")?;
            Ok(suites::suite_star_axioms(cfg.seed, order, 3, extra_triple))
        }
        other => Err(CliError::Usage(format!(
            "unknown suite '{other}' (expected recurrence, hs-residual, \
             i-independence, fock, geometry or star-axioms)"
        ))),
    }
}

pub struct EvalReport {
    pub order: usize,
    pub hbar: Rational,
    pub point: Point,
    pub per_order: Vec<GaussianRational>,
    pub value: GaussianRational,
}

impl EvalReport {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => {
                let mut out = String::new();
                out.push_str(&format!("point: {}\n", self.point.to_json()));
                out.push_str(&format!(
                    "hbar = {}, truncation order {}\n",
                    self.hbar, self.order
                ));
                for (k, v) in self.per_order.iter().enumerate() {
                    out.push_str(&format!("h^{k} coefficient = {v}\n"));
                }
                out.push_str(&format!(
                    "value = {} (~ re {}, im {})\n",
                    self.value,
                    rat_to_f64(&self.value.re),
                    rat_to_f64(&self.value.im)
                ));
                out
            }
            OutputFormat::Json => {
                let coeffs: Vec<serde_json::Value> = self
                    .per_order
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        serde_json::json!({
                            "k": k,
                            "re": v.re.to_string(),
                            "im": v.im.to_string(),
                        })
                    })
                    .collect();
                let v = serde_json::json!({
                    "order": self.order,
                    "hbar": self.hbar.to_string(),
                    "point": self.point.to_json(),
                    "coefficients": coeffs,
                    "value": {
                        "re": self.value.re.to_string(),
                        "im": self.value.im.to_string(),
                        "approx_re": rat_to_f64(&self.value.re),
                        "approx_im": rat_to_f64(&self.value.im),
                    },
                });
                format!("{v}\n")
            }
            OutputFormat::Csv => {
                let mut out = String::from("k,re,im\n");
                for (k, v) in self.per_order.iter().enumerate() {
                    out.push_str(&format!("{k},{},{}\n", v.re, v.im));
                }
                out.push_str(&format!("value,{},{}\n", self.value.re, self.value.im));
                out
            }
        }
    }
}

/// Evaluate f * g (optionally (f * g) * h) truncated at the configured
/// order, summed with the configured numeric hbar, at one point.
pub fn cmd_eval(
    cfg: &RunConfig,
    f_src: &str,
    g_src: &str,
    h_src: Option<&str>,
    point_file: Option<&str>,
) -> Result<EvalReport, CliError> {
    require_2x2(cfg)?;
    let order = capped(cfg.order.unwrap_or(2), MAX_STAR_ORDER, "star order")?;
    let f = parse_flag_expr("--f", f_src)?;
    let g = parse_flag_expr("--g", g_src)?;
    let h = h_src.map(|s| parse_flag_expr("--h", s)).transpose()?;
    let chart = build_chart(2, 2);
    let point = match point_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.into(),
                err: e.to_string(),
            })?;
            let v: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| CliError::Io {
                    path: path.into(),
                    err: e.to_string(),
                })?;
            Point::from_json(&v).map_err(|err| CliError::Io {
                path: path.into(),
                err,
            })?
        }
        None => {
            // the draw already redraws until every chart denominator
            // evaluates, so only user-supplied points can be singular
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            random_regular_point(&chart, &mut rng)
        }
    };
    let mut series = star_coeff_form(&chart, &f, &g, order);
    if let Some(h) = &h {
        series = star_series_left(&chart, &series, h, order);
    }
    let per_order = eval_series(&series, &point).map_err(|_| CliError::SingularPoint)?;
    let mut value = GaussianRational::zero();
    let mut hk = Rational::one();
    for v in &per_order {
        let scaled = v * &GaussianRational::from_rational(hk.clone());
        value = &value + &scaled;
        hk = &hk * &cfg.hbar;
    }
    Ok(EvalReport {
        order,
        hbar: cfg.hbar.clone(),
        point,
        per_order,
        value,
    })
}

#[derive(Debug, Clone, Copy)]
pub enum BenchCutoff {
    /// Let the naive enumeration run to completion.
    None,
    /// Abort the naive enumeration after this many seconds.
    Secs(f64),
    /// Abort after this multiple of the measured recurrence time.
    FactorOfRecurrence(f64),
}

pub struct BenchReport {
    pub table_n: usize,
    pub naive_n: usize,
    pub recurrence_secs: f64,
    pub recurrence_entries: usize,
    pub naive_secs: f64,
    pub naive_entries: Option<usize>,
    pub naive_finished: bool,
    /// Exact when the naive run finished, otherwise a lower bound.
    pub ratio: f64,
    pub meets_ten_x: bool,
}

impl BenchReport {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => {
                let mut out = String::new();
                out.push_str(&format!(
                    "recurrence table to order {}: {:.3} s ({} entries)\n",
                    self.table_n, self.recurrence_secs, self.recurrence_entries
                ));
                if self.naive_finished {
                    out.push_str(&format!(
                        "naive enumeration at order {}: {:.3} s ({} entries)\n",
                        self.naive_n,
                        self.naive_secs,
                        self.naive_entries.unwrap_or(0)
                    ));
                    out.push_str(&format!("speedup: {:.1}x\n", self.ratio));
                } else {
                    out.push_str(&format!(
                        "naive enumeration at order {}: stopped at the {:.3} s budget\n",
                        self.naive_n, self.naive_secs
                    ));
                    out.push_str(&format!("speedup: >= {:.1}x (lower bound)\n", self.ratio));
                }
                out.push_str(&format!(
                    "10x floor: {}\n",
                    if self.meets_ten_x { "met" } else { "not met" }
                ));
                out
            }
            OutputFormat::Json => {
                let v = serde_json::json!({
                    "recurrence": {
                        "n": self.table_n,
                        "secs": self.recurrence_secs,
                        "entries": self.recurrence_entries,
                    },
                    "naive": {
                        "n": self.naive_n,
                        "secs": self.naive_secs,
                        "finished": self.naive_finished,
                        "entries": self.naive_entries,
                    },
                    "ratio": self.ratio,
                    "ratio_is_lower_bound": !self.naive_finished,
                    "meets_ten_x": self.meets_ten_x,
                });
                format!("{v}\n")
            }
            OutputFormat::Csv => {
                let mut out = String::from("metric,value\n");
                out.push_str(&format!("recurrence_n,{}\n", self.table_n));
                out.push_str(&format!("recurrence_secs,{}\n", self.recurrence_secs));
                out.push_str(&format!("recurrence_entries,{}\n", self.recurrence_entries));
                out.push_str(&format!("naive_n,{}\n", self.naive_n));
                out.push_str(&format!("naive_secs,{}\n", self.naive_secs));
                out.push_str(&format!("naive_finished,{}\n", self.naive_finished));
                out.push_str(&format!(
                    "naive_entries,{}\n",
                    self.naive_entries.map_or(String::new(), |e| e.to_string())
                ));
                out.push_str(&format!("ratio,{}\n", self.ratio));
                out.push_str(&format!("meets_ten_x,{}\n", self.meets_ten_x));
                out
            }
        }
    }
}

/// Time the recurrence solver for the whole table at order n against
/// the naive tuple enumeration at naive_n (default n - 1).
pub fn cmd_bench(
    cfg: &RunConfig,
    naive_n: Option<usize>,
    cutoff: BenchCutoff,
) -> Result<BenchReport, CliError> {
    require_2x2(cfg)?;
    let n = capped(cfg.n.unwrap_or(6), MAX_TABLE_ORDER, "coefficient order")?;
    let naive_n = capped(
        naive_n.unwrap_or_else(|| n.saturating_sub(1)),
        MAX_TABLE_ORDER,
        "naive order",
    )?;
    let t0 = Instant::now();
    let table = recurrence_table(n);
    let recurrence_secs = t0.elapsed().as_secs_f64();
    let recurrence_entries = table.len();
    let budget = match cutoff {
        BenchCutoff::None => None,
        BenchCutoff::Secs(s) => {
            if !(s > 0.0) {
                return Err(CliError::Usage("cutoff must be a positive number".into()));
            }
            Some(Duration::from_secs_f64(s))
        }
        BenchCutoff::FactorOfRecurrence(f) => {
            if !(f > 0.0) {
                return Err(CliError::Usage("cutoff must be a positive number".into()));
            }
            Some(Duration::from_secs_f64((f * recurrence_secs).max(0.05)))
        }
    };
    let t1 = Instant::now();
    let naive = naive_order_table_budgeted(naive_n, CapIndex::new(1, 1), budget);
    let naive_secs = t1.elapsed().as_secs_f64();
    let ratio = naive_secs / recurrence_secs.max(1e-9);
    Ok(BenchReport {
        table_n: n,
        naive_n,
        recurrence_secs,
        recurrence_entries,
        naive_secs,
        naive_entries: naive.as_ref().map(|m| m.len()),
        naive_finished: naive.is_some(),
        ratio,
        meets_ten_x: ratio >= 10.0,
    })
}
