//! Command-line front end. Exit codes: 0 success, 1 a requested check failed, 2 bad input.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::catalog::DEFAULT_SPOT_SEED;
use crate::diagnostics::{
    classify, cluster_scan, exp_lemma_constants, exp_modified_weight_check, multiplication_norm_bound,
    non_arens_witness, omega_table, t2_upper_bound, two_summability, Decomposition, DiagConfig, Route,
    DEFAULT_CLUSTER_THRESHOLD, DEFAULT_KG, REPORT_SCHEMA,
};
use crate::error::{HyplabError, Result};
use crate::hypergroups::{check_axioms, Hypergroup};
use crate::measures::{Scalar, DEFAULT_TOLERANCE};
use crate::registry::{build_hypergroup, build_weight};
use crate::reproduce::reproduce;
use crate::weights::{
    check_bounded_below, check_central_tol, check_equivalence, check_submultiplicative_tol,
    weak_additivity_constant_tol, Weight, WeightKind,
};

pub const DEFAULT_TRUNCATION: usize = 100;

#[derive(Parser, Debug)]
#[command(
    name = "hyplab",
    version,
    about = "Hypergroups, weights and Arens regularity / injectivity diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Args, Debug, Default)]
pub struct Opts {
    /// Hypergroup spec, e.g. chebyshev, su2hat, conj:s3, rdp:conj:s3, rdp:sl2:K=3.
    #[arg(long, global = true)]
    pub hypergroup: Option<String>,
    /// Weight spec, e.g. poly:beta=2, dim:beta=1, product:table:e=1,T=2,R=5.
    #[arg(long, global = true)]
    pub weight: Option<String>,
    /// Truncation: number of elements in enumeration order.
    #[arg(short = 'N', long = "truncation", global = true)]
    pub truncation: Option<usize>,
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Grothendieck constant used by norm bounds.
    #[arg(long, env = "HYPLAB_KG", global = true)]
    pub kg: Option<f64>,
    /// Constant of the SU(n) dimension inequality.
    #[arg(long, global = true)]
    pub cn: Option<f64>,
    /// Report file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// JSON file with any of the options above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// CSV side output for omega-table and growth.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Ω threshold for cluster-scan and classify.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PropertyArg {
    Submultiplicative,
    Central,
    WeaklyAdditive,
    BoundedBelow,
    Equivalent,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RouteArg {
    #[value(name = "2-summable")]
    TwoSummable,
    Polynomial,
    Exponential,
    SuN,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DecompositionArg {
    WeaklyAdditive,
    SuN,
    /// f₁ = Ω, f₂ = 0.
    Rows,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the hypergroup (and weight) and list the first N elements.
    Build,
    /// Check the hypergroup axioms on the first N elements.
    CheckAxioms,
    /// Convolution δ_x * δ_y.
    Convolve {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Haar weight of x, or of the first N elements.
    Haar {
        #[arg(long)]
        x: Option<String>,
    },
    /// Length τ(x) with respect to the generating set.
    Tau {
        #[arg(long)]
        x: Option<String>,
    },
    /// Ball sizes and the fitted polynomial growth law.
    Growth,
    /// Check a weight property on the first N elements.
    WeightCheck {
        #[arg(long, value_enum, default_value = "submultiplicative")]
        property: PropertyArg,
        /// Lower bound for bounded-below.
        #[arg(long)]
        delta: Option<String>,
        /// Second weight for equivalent.
        #[arg(long)]
        weight2: Option<String>,
    },
    /// Ω(x, y) on the first N elements.
    OmegaTable,
    /// Envelope scan for the 0-cluster property of Ω.
    ClusterScan,
    /// 2-summability of 1/ω with certified tail bounds.
    Summability,
    /// Upper bound on the T² norm of Ω from a decomposition.
    T2Bound {
        #[arg(long, value_enum, default_value = "weakly-additive")]
        decomposition: DecompositionArg,
        /// Weak-additivity constant; the family certificate is used when absent.
        #[arg(long)]
        constant: Option<String>,
    },
    /// Bound on the multiplication norm through a certified route.
    NormBound {
        #[arg(long, value_enum, default_value = "2-summable")]
        route: RouteArg,
    },
    /// Constants for the exponential-weight modification.
    ExpConstants {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        beta: String,
        /// Growth exponent for the theorem floor.
        #[arg(long)]
        d: Option<u32>,
        /// Also check ω(t) ≤ M ω(x) ω(y) on the hypergroup for τ ≤ tau-max.
        #[arg(long)]
        tau_max: Option<usize>,
    },
    /// Search for pairs with Ω bounded below on a restricted product.
    Witness {
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
    /// Arens regularity and injectivity verdicts with a certificate chain.
    Classify,
    /// Run every reference check and report pass/fail per claim.
    ReproducePaper,
}

/// Options after merging defaults < config file < environment and flags.
#[derive(Clone, Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub hypergroup: Option<String>,
    pub weight: Option<String>,
    pub truncation: Option<usize>,
    pub tolerance: Option<f64>,
    #[serde(rename = "K_G", alias = "kg")]
    pub kg: Option<f64>,
    #[serde(rename = "C_n", alias = "cn")]
    pub cn: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub csv: Option<PathBuf>,
    pub threshold: Option<f64>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| HyplabError::Config(format!("{}: {e}", path.display())))
    }

    pub fn merge(file: RunConfig, o: &Opts) -> RunConfig {
        RunConfig {
            hypergroup: o.hypergroup.clone().or(file.hypergroup),
            weight: o.weight.clone().or(file.weight),
            truncation: o.truncation.or(file.truncation),
            tolerance: o.tolerance.or(file.tolerance),
            kg: o.kg.or(file.kg),
            cn: o.cn.or(file.cn),
            out: o.out.clone().or(file.out),
            seed: o.seed.or(file.seed),
            workers: o.workers.or(file.workers),
            csv: o.csv.clone().or(file.csv),
            threshold: o.threshold.or(file.threshold),
        }
    }

    pub fn n(&self) -> usize {
        self.truncation.unwrap_or(DEFAULT_TRUNCATION)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SPOT_SEED)
    }

    pub fn validate(&self) -> Result<()> {
        if self.truncation == Some(0) {
            return Err(HyplabError::Config("truncation must be at least 1".into()));
        }
        if self.tolerance.is_some_and(|t| t.is_nan() || t <= 0.0) {
            return Err(HyplabError::Config("tolerance must be positive".into()));
        }
        if self.kg.is_some_and(|k| !(k > 0.0 && k.is_finite())) {
            return Err(HyplabError::Config("K_G must be a positive number".into()));
        }
        if self.workers == Some(0) {
            return Err(HyplabError::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn diag(&self) -> DiagConfig {
        DiagConfig {
            k_g: self.kg.unwrap_or(DEFAULT_KG),
            c_n: self.cn,
            tolerance: self.tolerance.unwrap_or(DEFAULT_TOLERANCE),
            cluster_threshold: self.threshold.unwrap_or(DEFAULT_CLUSTER_THRESHOLD),
        }
    }

    fn hypergroup(&self) -> Result<Hypergroup> {
        build_hypergroup(
            self.hypergroup
                .as_deref()
                .ok_or_else(|| HyplabError::Config("--hypergroup is required".into()))?,
        )
    }

    fn weight(&self, h: &Hypergroup) -> Result<Weight> {
        build_weight(
            h,
            self.weight
                .as_deref()
                .ok_or_else(|| HyplabError::Config("--weight is required".into()))?,
        )
    }
}

/// A finished command: JSON body and whether its checks passed.
struct Outcome {
    body: Value,
    passed: bool,
}

fn wrap(command: &str, cfg: &RunConfig, subject: Value, result: Value, passed: bool) -> Outcome {
    Outcome {
        body: json!({
            "schema": REPORT_SCHEMA,
            "command": command,
            "subject": subject,
            "truncation": cfg.n(),
            "config": cfg.diag(),
            "passed": passed,
            "result": result,
        }),
        passed,
    }
}

fn subject(h: &Hypergroup, w: Option<&Weight>) -> Value {
    json!({"hypergroup": h.describe(), "weight": w.map(Weight::describe)})
}

fn scalar_json(s: &Scalar) -> Value {
    match s.num_den() {
        Some((n, d)) => json!({"num": n, "den": d, "value": s.to_f64(), "exact": true}),
        None => json!({"value": s.to_f64(), "exact": false}),
    }
}

fn write_csv(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

fn weight_check(
    h: &Hypergroup,
    w: &Weight,
    cfg: &RunConfig,
    property: PropertyArg,
    delta: Option<&str>,
    weight2: Option<&str>,
) -> Result<Outcome> {
    let (n, tol) = (cfg.n(), cfg.diag().tolerance);
    let report = match property {
        PropertyArg::Submultiplicative => check_submultiplicative_tol(h, w, n, tol)?,
        PropertyArg::Central => check_central_tol(h, w, n, tol)?,
        PropertyArg::WeaklyAdditive => weak_additivity_constant_tol(h, w, n, tol)?,
        PropertyArg::BoundedBelow => {
            let d = Scalar::parse(delta.ok_or_else(|| HyplabError::Config("--delta is required".into()))?)?;
            check_bounded_below(h, w, &d, n)?
        }
        PropertyArg::Equivalent => {
            let w2 = build_weight(
                h,
                weight2.ok_or_else(|| HyplabError::Config("--weight2 is required".into()))?,
            )?;
            check_equivalence(h, w, &w2, n)?
        }
    };
    let passed = report.passed;
    Ok(wrap(
        "weight-check",
        cfg,
        subject(h, Some(w)),
        serde_json::to_value(&report)?,
        passed,
    ))
}

fn execute(command: &Command, cfg: &RunConfig) -> Result<Outcome> {
    let diag = cfg.diag();
    let n = cfg.n();
    match command {
        Command::ReproducePaper => {
            let r = reproduce(cfg.seed(), &diag);
            let passed = r.passed;
            return Ok(Outcome {
                body: serde_json::to_value(&r)?,
                passed,
            });
        }
        Command::ExpConstants {
            alpha,
            c,
            beta,
            d,
            tau_max,
        } => {
            let k = exp_lemma_constants(&Scalar::parse(alpha)?, &Scalar::parse(c)?, &Scalar::parse(beta)?, *d)?;
            let mut result = json!({"constants": k});
            let mut passed = k.agree;
            let mut subj = Value::Null;
            if let Some(t) = tau_max {
                let h = cfg.hypergroup()?;
                let check = exp_modified_weight_check(&h, &k, *t)?;
                passed &= check.holds;
                result["modified_weight_check"] = serde_json::to_value(&check)?;
                subj = subject(&h, None);
            }
            return Ok(wrap("exp-constants", cfg, subj, result, passed));
        }
        _ => {}
    }
    let h = cfg.hypergroup()?;
    match command {
        Command::Build => {
            let w = cfg.weight.as_ref().map(|_| cfg.weight(&h)).transpose()?;
            let elements: Vec<Value> = h
                .elements(n)
                .iter()
                .map(|x| {
                    Ok(json!({
                        "label": h.label(x),
                        "weight": w.as_ref().map(|w| w.eval(x).map(|v| scalar_json(&v))).transpose()?,
                    }))
                })
                .collect::<Result<_>>()?;
            Ok(wrap(
                "build",
                cfg,
                subject(&h, w.as_ref()),
                json!({"size": h.size(), "commutative": h.is_commutative(), "elements": elements}),
                true,
            ))
        }
        Command::CheckAxioms => {
            let r = check_axioms(&h, n);
            let passed = r.passed();
            Ok(wrap(
                "check-axioms",
                cfg,
                subject(&h, None),
                serde_json::to_value(&r)?,
                passed,
            ))
        }
        Command::Convolve { x, y } => {
            let (a, b) = (h.parse_element(x)?, h.parse_element(y)?);
            let m = h.convolve(&a, &b)?;
            let terms: Vec<Value> = m
                .terms()
                .iter()
                .map(|(t, c)| {
                    let mut v = scalar_json(c);
                    v["elem"] = json!(h.label(t));
                    v
                })
                .collect();
            Ok(wrap(
                "convolve",
                cfg,
                subject(&h, None),
                json!({"x": x, "y": y, "terms": terms}),
                true,
            ))
        }
        Command::Haar { x } => {
            let xs = match x {
                Some(s) => vec![h.parse_element(s)?],
                None => h.elements(n),
            };
            let rows = xs
                .iter()
                .map(|x| Ok(json!({"x": h.label(x), "haar": scalar_json(&h.haar(x)?)})))
                .collect::<Result<Vec<_>>>()?;
            Ok(wrap("haar", cfg, subject(&h, None), json!(rows), true))
        }
        Command::Tau { x } => {
            let xs = match x {
                Some(s) => vec![h.parse_element(s)?],
                None => h.elements(n),
            };
            let rows = xs
                .iter()
                .map(|x| Ok(json!({"x": h.label(x), "tau": h.tau(x)?})))
                .collect::<Result<Vec<_>>>()?;
            Ok(wrap("tau", cfg, subject(&h, None), json!(rows), true))
        }
        Command::Growth => {
            let p = h.growth_profile(n)?;
            if let Some(path) = &cfg.csv {
                let mut text = String::from("n,ball_size,level_size\n");
                for (i, b) in p.ball_sizes.iter().enumerate() {
                    text.push_str(&format!("{i},{b},{}\n", p.level_sizes.get(i).copied().unwrap_or(0)));
                }
                write_csv(path, &text)?;
            }
            let passed = p.certificate_holds;
            Ok(wrap(
                "growth",
                cfg,
                subject(&h, None),
                serde_json::to_value(&p)?,
                passed,
            ))
        }
        Command::WeightCheck {
            property,
            delta,
            weight2,
        } => {
            let w = cfg.weight(&h)?;
            weight_check(&h, &w, cfg, *property, delta.as_deref(), weight2.as_deref())
        }
        Command::OmegaTable => {
            let w = cfg.weight(&h)?;
            let t = omega_table(&h, &w, n)?;
            if let Some(path) = &cfg.csv {
                write_csv(path, &t.to_csv()?)?;
            }
            let passed = t.in_unit_interval(diag.tolerance);
            Ok(wrap(
                "omega-table",
                cfg,
                subject(&h, Some(&w)),
                serde_json::to_value(&t)?,
                passed,
            ))
        }
        Command::ClusterScan => {
            let w = cfg.weight(&h)?;
            let r = cluster_scan(&h, &w, n, diag.cluster_threshold)?;
            Ok(wrap(
                "cluster-scan",
                cfg,
                subject(&h, Some(&w)),
                serde_json::to_value(&r)?,
                true,
            ))
        }
        Command::Summability => {
            let w = cfg.weight(&h)?;
            let s = two_summability(&h, &w, n)?;
            Ok(wrap(
                "summability",
                cfg,
                subject(&h, Some(&w)),
                serde_json::to_value(&s)?,
                true,
            ))
        }
        Command::T2Bound {
            decomposition,
            constant,
        } => {
            let w = cfg.weight(&h)?;
            let d = match decomposition {
                DecompositionArg::WeaklyAdditive => Decomposition::WeaklyAdditive {
                    constant: constant.as_deref().map(Scalar::parse).transpose()?,
                },
                DecompositionArg::SuN => match w.kind() {
                    WeightKind::Dimension { beta } => Decomposition::SuN {
                        n: 2,
                        beta: beta.to_f64(),
                    },
                    _ => return Err(HyplabError::Config("the su-n decomposition needs a dim weight".into())),
                },
                DecompositionArg::Rows => {
                    let (hh, ww) = (h.clone(), w.clone());
                    Decomposition::Custom {
                        f1: Arc::new(move |x, y| {
                            crate::diagnostics::omega_f64(&hh, &ww, x, y).unwrap_or(f64::INFINITY)
                        }),
                        f2: Arc::new(|_, _| 0.0),
                    }
                }
            };
            let b = t2_upper_bound(&h, &w, n, &d, &diag)?;
            Ok(wrap(
                "t2-bound",
                cfg,
                subject(&h, Some(&w)),
                serde_json::to_value(&b)?,
                true,
            ))
        }
        Command::NormBound { route } => {
            let w = cfg.weight(&h)?;
            let r = match route {
                RouteArg::TwoSummable => Route::TwoSummable,
                RouteArg::Polynomial => Route::Polynomial,
                RouteArg::Exponential => Route::Exponential,
                RouteArg::SuN => Route::SuN,
            };
            let b = multiplication_norm_bound(&h, &w, r, n, &diag)?;
            Ok(wrap(
                "norm-bound",
                cfg,
                subject(&h, Some(&w)),
                serde_json::to_value(&b)?,
                true,
            ))
        }
        Command::Witness { depth } => {
            let w = cfg.weight(&h)?;
            let r = non_arens_witness(&h, &w, *depth)?;
            let passed = r.verdict.is_witness_against();
            Ok(wrap(
                "witness",
                cfg,
                subject(&h, Some(&w)),
                serde_json::to_value(&r)?,
                passed,
            ))
        }
        Command::Classify => {
            let w = cfg.weight(&h)?;
            let c = classify(&h, &w, n, &diag)?;
            Ok(Outcome {
                body: c.to_json(),
                passed: true,
            })
        }
        Command::ReproducePaper | Command::ExpConstants { .. } => unreachable!("handled above"),
    }
}

/// Exit code for an error: 1 when a route or decomposition is unavailable, 2 for bad input.
pub fn exit_code(e: &HyplabError) -> i32 {
    match e {
        HyplabError::RouteUnavailable(_) | HyplabError::NoDecomposition(_) => 1,
        _ => 2,
    }
}

fn error_object(kind: &str, message: &str) -> String {
    json!({"error": {"kind": kind, "message": message}}).to_string()
}

fn run_parsed(cli: &Cli) -> Result<bool> {
    let file = match &cli.opts.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    let cfg = RunConfig::merge(file, &cli.opts);
    cfg.validate()?;
    if let Some(k) = cfg.workers {
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    let out = execute(&cli.command, &cfg)?;
    let mut text = serde_json::to_string_pretty(&out.body)?;
    text.push('\n');
    match &cfg.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(out.passed)
}

/// Parses arguments, runs the command and returns the exit code; errors go to stderr as JSON.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprintln!("{}", error_object("UsageError", e.to_string().trim()));
            return 2;
        }
    };
    match run_parsed(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("{}", error_object(e.kind(), &e.to_string()));
            exit_code(&e)
        }
    }
}
