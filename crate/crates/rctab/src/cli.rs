//! Reproducible experiment runner.
//!
//! One command = one experiment; a config (JSON file and/or flags) plus a
//! seed pins every number in the report. Reports echo the full effective
//! config so any result is one command away from reproduction.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::counting::{
    self, bounded_compositions, cm_log_count, count_exact, enumerate_tables, rn_ratio,
    verify_margin_maximality, CompositionPolynomial, CM_DEFAULT_A, CM_DEFAULT_B,
};
use crate::entropy::{barvinok_bounds, typical_table, TYPICAL_MAX_SWEEPS};
use crate::error::{Error, Result};
use crate::sampling::{
    rejection_sample_many, swap_chain_run, ChainConfig, GeometricModel, RejectionConfig,
};
use crate::seed::Seed;
use crate::stats::spectrum::{
    mp_cdf, mp_density, mp_edge, mp_eigen_cdf, verify_esd, EsdSource,
};
use crate::stats::{
    self, verify_joint, verify_marginal, verify_max_entry, verify_moments,
};
use crate::table::{Margins, Table, UniformMargins};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "RCTAB_OUT";

/// Default enumeration cap for `enumerate` and oracle checks.
pub const DEFAULT_ENUM_CAP: usize = 2_000_000;

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

/// Everything a command needs. Unused fields are ignored by commands that
/// do not read them; flags override file values field by field.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: String,
    /// Square uniform instance size.
    pub n: Option<u64>,
    /// Entry density C (uniform margins Cn).
    #[serde(rename = "C")]
    pub c: Option<u64>,
    /// Explicit margins (override n/C when present).
    pub rows: Option<Vec<u64>>,
    pub cols: Option<Vec<u64>>,
    /// Caps vector for composition counting.
    pub caps: Option<Vec<u64>>,
    /// Row count m and total N for margin-maximality sweeps.
    pub m: Option<u64>,
    pub total: Option<u64>,
    /// Composition target / row-class depth.
    pub r: Option<u64>,
    /// Block size for joint-law experiments.
    pub k: Option<u64>,
    /// Threshold exponent for max-entry experiments.
    pub eps: Option<f64>,
    /// Sizes for trend experiments (marginal, moments, esd).
    pub sizes: Option<Vec<u64>>,
    /// Pooled entries per size for the marginal experiment.
    pub entries: Option<u64>,
    /// Per-entry truncation for the joint-law comparison support.
    pub trunc: Option<u64>,
    pub sampler: Option<String>,
    pub samples: Option<u64>,
    pub burn_in: Option<u64>,
    pub thin: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Sample-stream format: csv | json | bin.
    pub format: Option<String>,
    /// Named tolerance overrides, e.g. {"ks": 0.08}.
    pub tolerances: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    fn seed(&self) -> Seed {
        Seed(self.seed.unwrap_or(0))
    }

    fn tol(&self, name: &str, default: f64) -> f64 {
        *self.tolerances.get(name).unwrap_or(&default)
    }

    fn margins(&self) -> Result<Margins> {
        match (&self.rows, &self.cols) {
            (Some(r), Some(c)) => Margins::new(r.clone(), c.clone()),
            (None, None) => {
                let n = self.require_n()?;
                Ok(UniformMargins::new(n as usize, self.c_or_default())?.margins())
            }
            _ => Err(Error::Config("give both --rows and --cols, or neither".into())),
        }
    }

    fn require_n(&self) -> Result<u64> {
        self.n
            .ok_or_else(|| Error::Config("this command needs --n".into()))
    }

    fn c_or_default(&self) -> u64 {
        self.c.unwrap_or(2)
    }

    fn chain_config(&self, margins: &Margins) -> ChainConfig {
        let mut cfg = ChainConfig::default_for(margins);
        if let Some(b) = self.burn_in {
            cfg.burn_in = b;
        }
        if let Some(t) = self.thin {
            cfg.thin = t.max(1);
        }
        if let Some(s) = self.samples {
            cfg.samples = s;
        }
        cfg
    }

    fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("rctab-out"))
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// One verified quantity: observed value, reference, tolerance, verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub statistic: String,
    pub value: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_bar: Option<f64>,
    pub reference: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    fn info(statistic: &str, value: Value, reference: Value) -> Self {
        Check {
            statistic: statistic.into(),
            value,
            error_bar: None,
            reference,
            tolerance: None,
            pass: true,
        }
    }

    fn bounded(statistic: &str, value: f64, reference: Value, tol: f64, pass: bool) -> Self {
        Check {
            statistic: statistic.into(),
            value: json!(value),
            error_bar: None,
            reference,
            tolerance: Some(tol),
            pass,
        }
    }

    fn flag(statistic: &str, pass: bool) -> Self {
        Check {
            statistic: statistic.into(),
            value: json!(pass),
            error_bar: None,
            reference: json!(true),
            tolerance: None,
            pass,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    /// C = 1 is outside the density range the limit statements assume.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_warning: Option<String>,
    pub checks: Vec<Check>,
    pub artifacts: Vec<PathBuf>,
    pub pass: bool,
    pub wall_clock_ms: f64,
}

impl RunReport {
    /// One line per check, as printed to stdout.
    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "[{}] {} = {} (reference {}{})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.statistic,
                    c.value,
                    c.reference,
                    c.tolerance
                        .map(|t| format!(", tolerance {t}"))
                        .unwrap_or_default(),
                )
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub members: Vec<RunReport>,
    pub failed: Vec<String>,
    pub pass: bool,
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

/// Execute one experiment and write its report (plus any data artifacts)
/// under the configured output directory.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let started = Instant::now();
    let out_dir = cfg.out_dir();
    fs::create_dir_all(&out_dir)?;

    let mut artifacts = Vec::new();
    let checks = match cfg.command.as_str() {
        "count" => cmd_count(cfg)?,
        "enumerate" => cmd_enumerate(cfg, &out_dir, &mut artifacts)?,
        "compositions" => cmd_compositions(cfg, &out_dir, &mut artifacts)?,
        "margin-max" => cmd_margin_max(cfg)?,
        "typical" => cmd_typical(cfg, &out_dir, &mut artifacts)?,
        "bounds" => cmd_bounds(cfg)?,
        "cm-estimate" => cmd_cm_estimate(cfg)?,
        "rn-ratio" => cmd_rn_ratio(cfg)?,
        "sample" => cmd_sample(cfg, &out_dir, &mut artifacts)?,
        "verify-marginal" => cmd_verify_marginal(cfg, &out_dir, &mut artifacts)?,
        "verify-joint" => cmd_verify_joint(cfg)?,
        "verify-moments" => cmd_verify_moments(cfg)?,
        "verify-max" => cmd_verify_max(cfg)?,
        "verify-esd" => cmd_verify_esd(cfg, &out_dir, &mut artifacts)?,
        other => {
            return Err(Error::Config(format!(
                "unknown command {other:?}; see rctab --help"
            )))
        }
    };

    let pass = checks.iter().all(|c| c.pass);
    let density_warning = match cfg.c {
        Some(1) => Some("C = 1 is below the density range of the limit laws".into()),
        _ => None,
    };
    let report = RunReport {
        command: cfg.command.clone(),
        config: cfg.clone(),
        seed: cfg.seed().0,
        density_warning,
        checks,
        artifacts: artifacts.clone(),
        pass,
        wall_clock_ms: started.elapsed().as_secs_f64() * 1000.0,
    };
    let path = out_dir.join(format!("{}-report.json", cfg.command));
    fs::write(&path, serde_json::to_string_pretty(&report)?)?;
    Ok(report)
}

/// Run every config in a JSON list file. Member failures are recorded, not
/// fatal to siblings. Members without a seed get one derived from the root
/// config's seed and their index.
pub fn suite(path: &Path, root_seed: Option<u64>) -> Result<SuiteReport> {
    let text = fs::read_to_string(path)?;
    let members: Vec<ExperimentConfig> =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let root = Seed(root_seed.unwrap_or(0));
    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for (idx, mut member) in members.into_iter().enumerate() {
        if member.seed.is_none() {
            member.seed = Some(root.derive(&format!("member/{idx}")).0);
        }
        let name = format!("{}#{idx}", member.command);
        match run(&member) {
            Ok(rep) => {
                if !rep.pass {
                    failed.push(name);
                }
                reports.push(rep);
            }
            Err(e) => {
                failed.push(format!("{name}: {e}"));
            }
        }
    }
    Ok(SuiteReport {
        pass: failed.is_empty(),
        members: reports,
        failed,
    })
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_count(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let margins = cfg.margins()?;
    let count = count_exact(&margins);
    Ok(vec![Check::info(
        "count_exact",
        json!(count.to_string()),
        json!({"margins": {"row": margins.row(), "col": margins.col()}, "method": "exact"}),
    )])
}

fn cmd_enumerate(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    artifacts: &mut Vec<PathBuf>,
) -> Result<Vec<Check>> {
    let margins = cfg.margins()?;
    let tables = enumerate_tables(&margins, DEFAULT_ENUM_CAP)?;
    let path = write_tables(&tables, cfg, out_dir, "enumerate-tables")?;
    artifacts.push(path);
    let count = count_exact(&margins);
    let listed = tables.len() as u64;
    Ok(vec![
        Check::info("tables_enumerated", json!(listed), json!("complete list")),
        Check {
            statistic: "count_exact_matches_enumeration".into(),
            value: json!(count.to_string()),
            error_bar: None,
            reference: json!(listed),
            tolerance: None,
            pass: count == counting::BigCount::from(listed),
        },
    ])
}

fn cmd_compositions(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    artifacts: &mut Vec<PathBuf>,
) -> Result<Vec<Check>> {
    let caps = cfg
        .caps
        .clone()
        .ok_or_else(|| Error::Config("compositions needs --caps".into()))?;
    let poly = CompositionPolynomial::new(&caps);
    let mut csv = String::from("degree,coefficient\n");
    for (d, c) in poly.coefficients().iter().enumerate() {
        csv.push_str(&format!("{d},{c}\n"));
    }
    let path = out_dir.join("compositions.csv");
    fs::write(&path, csv)?;
    artifacts.push(path);

    let mut checks = vec![
        Check::flag("coefficients_symmetric", poly.is_symmetric()),
        Check::flag("coefficients_unimodal", poly.is_unimodal()),
    ];
    if let Some(r) = cfg.r {
        checks.push(Check::info(
            "bounded_compositions",
            json!(bounded_compositions(&caps, r).to_string()),
            json!({"caps": caps, "r": r}),
        ));
    }
    Ok(checks)
}

fn cmd_margin_max(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let m = cfg
        .m
        .ok_or_else(|| Error::Config("margin-max needs --m".into()))? as usize;
    let n = cfg.require_n()? as usize;
    let total = cfg
        .total
        .ok_or_else(|| Error::Config("margin-max needs --total".into()))?;
    let rep = verify_margin_maximality(m, n, total, 1_000_000)?;
    Ok(vec![
        Check {
            statistic: "balanced_margins_maximize".into(),
            value: json!({"row": rep.balanced_row, "col": rep.balanced_col,
                          "count": rep.balanced_count.to_string()}),
            error_bar: None,
            reference: json!({"max_count": rep.max_count.to_string(),
                              "pairs_tested": rep.pairs_tested}),
            tolerance: None,
            pass: rep.balanced_is_max,
        },
        Check::bounded(
            "smoothing_violations",
            rep.smoothing_violations as f64,
            json!(0),
            0.0,
            rep.smoothing_violations == 0,
        ),
    ])
}

fn cmd_typical(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    artifacts: &mut Vec<PathBuf>,
) -> Result<Vec<Check>> {
    let margins = cfg.margins()?;
    let tol = cfg.tol("residual", 1e-10);
    let tt = typical_table(&margins, tol, TYPICAL_MAX_SWEEPS)?;
    let path = out_dir.join("typical.json");
    fs::write(&path, serde_json::to_string_pretty(&tt.to_json())?)?;
    artifacts.push(path);
    Ok(vec![
        Check::bounded("margin_residual", tt.residual, json!(0.0), tol, tt.residual <= tol),
        Check::bounded(
            "dual_residual",
            tt.dual_residual(),
            json!(0.0),
            10.0 * tol,
            tt.dual_residual() <= 10.0 * tol,
        ),
        Check::info("g_z", json!(tt.g_z), json!("entropy at the maximizer")),
    ])
}

fn cmd_bounds(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let margins = cfg.margins()?;
    let b = barvinok_bounds(&margins, cfg.tol("residual", 1e-10))?;
    let mut checks = vec![Check::info(
        "log_upper_bound",
        json!(b.log_upper),
        json!(b.log_lower_symbolic),
    )];
    // exact comparison when counting is cheap
    if margins.m() + margins.n() <= 8 && margins.total() <= 24 {
        let ln_count = count_exact(&margins).ln();
        checks.push(Check::bounded(
            "ln_count_below_upper_bound",
            ln_count,
            json!(b.log_upper),
            1e-8,
            ln_count <= b.log_upper + 1e-8,
        ));
    }
    Ok(checks)
}

fn cmd_cm_estimate(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let n = cfg.require_n()?;
    let c = cfg.c_or_default();
    // square uniform margins by default; explicit rows/cols are not used here
    let est = cm_log_count(n, n, c * n, c * n, CM_DEFAULT_A, CM_DEFAULT_B)?;
    let mut checks = vec![
        Check::info("cm_log_count", json!(est.log_count), json!({"lambda": est.lambda, "A": est.big_a})),
        Check::info("cm_applicable", json!(est.applicable), json!({"a": est.const_a, "b": est.const_b})),
    ];
    if n <= 6 {
        let exact = count_exact(&UniformMargins::new(n as usize, c)?.margins()).ln();
        checks.push(Check::info(
            "ln_count_exact",
            json!(exact),
            json!({"abs_error": (est.log_count - exact).abs()}),
        ));
    }
    Ok(checks)
}

fn cmd_rn_ratio(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let n = cfg.require_n()?;
    let c = cfg.c_or_default();
    let r = cfg.r.unwrap_or(1);
    let rep = rn_ratio(n, c, r)?;
    let mut checks = vec![Check::info(
        "rn_ratio",
        json!(rep.ratio),
        json!({"limit": rep.limit, "abs_error": rep.abs_error, "method": rep.method}),
    )];
    if let Some(&tol) = cfg.tolerances.get("ratio") {
        checks.push(Check::bounded(
            "ratio_near_limit",
            rep.abs_error,
            json!(rep.limit),
            tol,
            rep.abs_error <= tol,
        ));
    }
    Ok(checks)
}

fn cmd_sample(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    artifacts: &mut Vec<PathBuf>,
) -> Result<Vec<Check>> {
    let margins = cfg.margins()?;
    let samples = cfg.samples.unwrap_or(100);
    let seed = cfg.seed();
    let sampler = cfg.sampler.as_deref().unwrap_or("chain");
    let tables = match sampler {
        "chain" => {
            let chain = cfg.chain_config(&margins).with_samples(samples);
            swap_chain_run(&margins, &chain, seed)?
        }
        "rejection" => {
            let tt = typical_table(&margins, 1e-10, TYPICAL_MAX_SWEEPS)?;
            let model = GeometricModel::from_typical(&tt)?;
            rejection_sample_many(
                &margins,
                &model,
                &RejectionConfig::default(),
                samples as usize,
                seed,
            )?
        }
        other => return Err(Error::Config(format!("unknown sampler {other:?}"))),
    };
    let path = write_tables(&tables, cfg, out_dir, "samples")?;
    artifacts.push(path);
    let all_valid = tables.iter().all(|t| t.validate().unwrap_or(false));
    Ok(vec![
        Check::info("samples_written", json!(tables.len()), json!(sampler)),
        Check::flag("all_samples_valid", all_valid),
    ])
}

fn cmd_verify_marginal(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    artifacts: &mut Vec<PathBuf>,
) -> Result<Vec<Check>> {
    let c = cfg.c_or_default();
    let sizes = cfg.sizes.clone().unwrap_or_else(|| vec![10, 20, 40]);
    let entries = cfg.entries.unwrap_or(100_000);
    let rep = verify_marginal(c, &sizes, entries, cfg.seed())?;

    let mut csv = String::from("n,tv,error_bar\n");
    for p in &rep.points {
        csv.push_str(&format!("{},{},{}\n", p.n, p.tv, p.error_bar));
    }
    let path = out_dir.join("marginal-tv.csv");
    fs::write(&path, csv)?;
    artifacts.push(path);

    let (lo, hi) = (cfg.tol("slope_lo", -1.0), cfg.tol("slope_hi", -0.2));
    Ok(vec![
        Check::flag("tv_strictly_decreasing", rep.strictly_decreasing),
        Check::bounded(
            "log_log_slope",
            rep.slope,
            json!([lo, hi]),
            hi - lo,
            rep.slope >= lo && rep.slope <= hi,
        ),
        Check::info(
            "tv_points",
            serde_json::to_value(&rep.points)?,
            json!(stats::TV_CONVENTION),
        ),
    ])
}

fn cmd_verify_joint(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let n = cfg.require_n()?;
    let c = cfg.c_or_default();
    let k = cfg.k.unwrap_or(2) as usize;
    let samples = cfg.samples.unwrap_or(20_000);
    let trunc = cfg
        .trunc
        .unwrap_or_else(|| stats::max_threshold(n, c, 1.0).floor() as u64);
    let rep = verify_joint(n, c, k, samples, trunc, cfg.seed())?;
    let mut checks = vec![Check::info(
        "block_tv_truncated",
        json!(rep.tv_truncated),
        json!({"k": rep.k, "trunc": rep.trunc,
               "emp_mass_outside": rep.emp_mass_outside,
               "ref_mass_outside": rep.ref_mass_outside,
               "convention": rep.tv_convention}),
    )];
    if let Some(&tol) = cfg.tolerances.get("tv") {
        checks.push(Check::bounded(
            "block_tv_within_tolerance",
            rep.tv_truncated,
            json!(0.0),
            tol,
            rep.tv_truncated <= tol,
        ));
    }
    Ok(checks)
}

fn cmd_verify_moments(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let c = cfg.c_or_default();
    let sizes = cfg
        .sizes
        .clone()
        .unwrap_or_else(|| vec![cfg.n.unwrap_or(40)]);
    let samples = cfg.samples.unwrap_or(1000);
    let mut checks = Vec::new();
    let mut pair_gaps = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let rep = verify_moments(n, c, samples, cfg.seed())?;
        checks.push(Check::flag(
            &format!("pooled_mean_exact_n{n}"),
            rep.mean_is_exact,
        ));
        if i == sizes.len() - 1 {
            let z = (rep.second_moment - rep.second_ref).abs() / rep.second_se.max(1e-12);
            checks.push(Check {
                statistic: format!("second_moment_n{n}"),
                value: json!(rep.second_moment),
                error_bar: Some(rep.second_se),
                reference: json!(rep.second_ref),
                tolerance: Some(3.0),
                pass: z <= 3.0,
            });
        }
        checks.push(Check {
            statistic: format!("pair_moment_n{n}"),
            value: json!(rep.pair_moment),
            error_bar: Some(rep.pair_se),
            reference: json!(rep.pair_ref),
            tolerance: None,
            pass: true,
        });
        pair_gaps.push((rep.pair_moment - rep.pair_ref).abs());
    }
    if sizes.len() >= 2 {
        let approaching = pair_gaps.windows(2).all(|w| w[1] < w[0]);
        checks.push(Check::flag("pair_moment_approaching_c_squared", approaching));
    }
    Ok(checks)
}

fn cmd_verify_max(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let n = cfg.require_n()?;
    let c = cfg.c_or_default();
    let eps = cfg.eps.unwrap_or(1.0);
    let samples = cfg.samples.unwrap_or(1000);
    let rep = verify_max_entry(n, c, eps, samples, cfg.seed())?;
    let tol = cfg.tol("exceedance", 0.05);
    Ok(vec![
        Check::flag("iid_harmonic_bounds_hold", rep.iid_bounds_hold),
        Check::bounded(
            "threshold_exceedance",
            rep.exceed_freq,
            json!({"threshold": rep.threshold, "samples": rep.samples}),
            tol,
            rep.exceed_freq < tol,
        ),
        Check::info(
            "mean_max",
            json!(rep.mean_max),
            json!({"iid_mean_max": rep.iid_mean_max,
                   "iid_bounds": [rep.iid_lower, rep.iid_upper]}),
        ),
    ])
}

fn cmd_verify_esd(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    artifacts: &mut Vec<PathBuf>,
) -> Result<Vec<Check>> {
    let c = cfg.c_or_default();
    let sizes = cfg.sizes.clone().unwrap_or_else(|| vec![50, 100, 200]);
    let samples = cfg.samples.unwrap_or(3);
    let ks_tol = cfg.tol("ks", 0.08);
    let seed = cfg.seed();

    // analytic law self-checks
    let integral = mp_cdf(c, mp_edge(c));
    let mut worst_cov = 0.0f64;
    for i in 1..=8 {
        let y = mp_edge(c) * i as f64 / 8.0;
        worst_cov = worst_cov.max((mp_cdf(c, y) - mp_eigen_cdf(c, y * y)).abs());
    }
    let mut checks = vec![
        Check::bounded(
            "mp_density_normalization",
            (integral - 1.0).abs(),
            json!(1.0),
            1e-6,
            (integral - 1.0).abs() < 1e-6,
        ),
        Check::bounded(
            "mp_change_of_variables",
            worst_cov,
            json!(0.0),
            1e-6,
            worst_cov < 1e-6,
        ),
    ];

    let mut ks_means = Vec::new();
    let mut csv = String::from("n,ks_first,ks_mean,w1_first,w1_mean\n");
    for &n in &sizes {
        let rep = verify_esd(n, c, samples, EsdSource::Chain, seed)?;
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            n, rep.ks_first, rep.ks_mean, rep.w1_first, rep.w1_mean
        ));
        ks_means.push(rep.ks_mean);
        if n == *sizes.last().unwrap() {
            checks.push(Check::bounded(
                &format!("ks_single_sample_n{n}"),
                rep.ks_first,
                json!(0.0),
                ks_tol,
                rep.ks_first < ks_tol,
            ));
            checks.push(Check::bounded(
                &format!("frobenius_consistency_n{n}"),
                rep.frobenius_worst_rel,
                json!(0.0),
                1e-6,
                rep.frobenius_worst_rel < 1e-6,
            ));
            let control = verify_esd(n, c, 1, EsdSource::IidControl, seed)?;
            checks.push(Check::bounded(
                &format!("ks_iid_control_n{n}"),
                control.ks_first,
                json!(0.0),
                ks_tol,
                control.ks_first < ks_tol,
            ));
        }
    }
    let path = out_dir.join("esd-ks.csv");
    fs::write(&path, csv)?;
    artifacts.push(path);

    if sizes.len() >= 2 {
        let decreasing = ks_means.windows(2).all(|w| w[1] < w[0]);
        checks.push(Check {
            statistic: "ks_decreasing_over_sizes".into(),
            value: json!(ks_means),
            error_bar: None,
            reference: json!(sizes),
            tolerance: None,
            pass: decreasing,
        });
    }
    // density sanity: value at 0 for the record
    checks.push(Check::info(
        "mp_density_at_zero",
        json!(mp_density(c, 0.0)),
        json!({"edge": mp_edge(c)}),
    ));
    Ok(checks)
}

// ---------------------------------------------------------------------------
// Artifact writing
// ---------------------------------------------------------------------------

fn write_tables(
    tables: &[Table],
    cfg: &ExperimentConfig,
    out_dir: &Path,
    stem: &str,
) -> Result<PathBuf> {
    let format = cfg.format.as_deref().unwrap_or("csv");
    let path = out_dir.join(format!("{stem}.{format}"));
    match format {
        "csv" => {
            // one flattened table per line
            let mut text = String::new();
            for t in tables {
                let line: Vec<String> = t.entries().iter().map(|e| e.to_string()).collect();
                text.push_str(&line.join(","));
                text.push('\n');
            }
            fs::write(&path, text)?;
        }
        "json" => {
            let arr: Vec<Value> = tables.iter().map(|t| t.to_json()).collect();
            fs::write(&path, serde_json::to_string_pretty(&arr)?)?;
        }
        "bin" => {
            let mut buf = Vec::new();
            for t in tables {
                t.write_frame(&mut buf)?;
            }
            fs::write(&path, buf)?;
        }
        other => return Err(Error::Config(format!("unknown format {other:?}"))),
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(command: &str) -> ExperimentConfig {
        ExperimentConfig {
            command: command.into(),
            out: Some(std::env::temp_dir().join(format!(
                "rctab-cli-test-{command}-{}",
                std::process::id()
            ))),
            seed: Some(7),
            ..Default::default()
        }
    }

    #[test]
    fn count_command_reports_five() {
        let mut cfg = base("count");
        cfg.n = Some(2);
        cfg.c = Some(2);
        let rep = run(&cfg).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.checks[0].value, json!("5"));
    }

    #[test]
    fn typical_command_uniform_case() {
        let mut cfg = base("typical");
        cfg.n = Some(4);
        cfg.c = Some(2);
        let rep = run(&cfg).unwrap();
        assert!(rep.pass);
        let z: Value = serde_json::from_str(
            &fs::read_to_string(cfg.out_dir().join("typical.json")).unwrap(),
        )
        .unwrap();
        let z00 = z["Z"][0][0].as_f64().unwrap();
        assert!((z00 - 2.0).abs() < 1e-9);
    }

    #[test]
    fn reports_are_deterministic_modulo_wall_clock() {
        let mut cfg = base("sample");
        cfg.n = Some(3);
        cfg.c = Some(1);
        cfg.samples = Some(25);
        let mut a = run(&cfg).unwrap();
        let mut b = run(&cfg).unwrap();
        a.wall_clock_ms = 0.0;
        b.wall_clock_ms = 0.0;
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn unknown_command_is_config_error() {
        let cfg = base("frobnicate");
        assert!(matches!(run(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn suite_aggregates_and_derives_seeds() {
        let dir = std::env::temp_dir().join(format!("rctab-suite-test-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let mut member = ExperimentConfig {
            command: "count".into(),
            n: Some(2),
            c: Some(2),
            out: Some(dir.clone()),
            ..Default::default()
        };
        let list = vec![member.clone(), {
            member.n = Some(3);
            member.c = Some(1);
            member
        }];
        let path = dir.join("suite.json");
        fs::write(&path, serde_json::to_string(&list).unwrap()).unwrap();
        let rep = suite(&path, Some(42)).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.members.len(), 2);
        assert_ne!(rep.members[0].seed, rep.members[1].seed);
        assert_eq!(rep.members[1].checks[0].value, json!("55"));

        // empty list passes with zero experiments
        fs::write(&path, "[]").unwrap();
        let rep = suite(&path, None).unwrap();
        assert!(rep.pass);
        assert!(rep.members.is_empty());
    }
}
