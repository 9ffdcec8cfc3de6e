//! Runs check suites over a seeded sample set and assembles the report.
//!
//! Samples are evaluated in parallel and merged in index order; all
//! aggregation afterwards is sequential, so the report is byte-identical for
//! a fixed configuration regardless of thread count.

use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::geometry::{ManifoldInstance, PointData};
use crate::paracontact::{apm_axioms, classify, normal_structure_checks, normality_residual, Classification, Range};
use crate::qps::{
    classification_l6, component_table, conformal_flatness_verdict, curvature_identity_residuals, l_closed_forms,
    probe_curvature, qps_axioms, AGREEMENT_TOLERANCE,
};
use crate::report::{Check, CheckReport};
use crate::residual::ResidualRecord;
use crate::sampling::{sample_points, SampleError};
use crate::spec::{load_spec, SpecError};
use crate::tensor::max_abs;
use crate::zoo::{build_example, SectionalCurvature, ZooEntry, ZooError, ZooId, ZooParams};

/// Caps the number of worker threads used for sample evaluation.
pub const THREADS_ENV: &str = "PARACURV_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Axioms,
    Normality,
    Qps,
    Conformal,
    Classify,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Axioms, Suite::Normality, Suite::Qps, Suite::Conformal, Suite::Classify];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Normality => "normality",
            Suite::Qps => "qps",
            Suite::Conformal => "conformal",
            Suite::Classify => "classify",
        }
    }

    /// Parses one suite name or `all`.
    pub fn parse_list(name: &str) -> Result<Vec<Suite>, RunError> {
        if name == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        Suite::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .map(|s| vec![s])
            .ok_or_else(|| RunError::Config(format!("unknown suite '{name}' (expected axioms, normality, qps, conformal, classify or all)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl FromStr for Format {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(RunError::Config(format!("unknown format '{s}' (expected text or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldSource {
    Zoo { id: ZooId, params: ZooParams },
    Spec(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: ManifoldSource,
    pub suites: Vec<Suite>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub tol3: f64,
    pub spread: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(source: ManifoldSource) -> Self {
        Self {
            source,
            suites: Suite::ALL.to_vec(),
            samples: 100,
            seed: 0,
            tol: 1e-9,
            tol3: 1e-6,
            spread: 1e-8,
            format: Format::Text,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.samples == 0 {
            return Err(RunError::Config("sample count must be at least 1".into()));
        }
        for (name, v) in [("tol", self.tol), ("tol3", self.tol3), ("spread", self.spread)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(RunError::Config(format!("{name} must be a positive number, got {v}")));
            }
        }
        if self.suites.is_empty() {
            return Err(RunError::Config("no suites selected".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("sampling failed: {0}")]
    Sampling(#[from] SampleError),
    #[error("cannot start worker threads: {0}")]
    Threads(String),
}

impl RunError {
    /// 2 for usage and input errors, 3 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Threads(_) => 3,
            _ => 2,
        }
    }
}

pub fn load_manifold(source: &ManifoldSource) -> Result<(ManifoldInstance, Option<ZooEntry>), RunError> {
    match source {
        ManifoldSource::Zoo { id, params } => {
            let (m, entry) = build_example(*id, *params)?;
            Ok((m, Some(entry)))
        }
        ManifoldSource::Spec(path) => Ok((load_spec(path)?, None)),
    }
}

fn thread_cap() -> Result<Option<usize>, RunError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| RunError::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

/// Loads the manifold named by the configuration and runs the selected suites.
pub fn run_suite(config: &RunConfig) -> Result<CheckReport, RunError> {
    config.validate()?;
    let (m, entry) = load_manifold(&config.source)?;
    let mut manifold = Map::new();
    match &config.source {
        ManifoldSource::Zoo { params, .. } => {
            manifold.insert("source".into(), json!("zoo"));
            manifold.insert("params".into(), json!({"beta0": params.beta0, "alpha0": params.alpha0}));
        }
        ManifoldSource::Spec(path) => {
            manifold.insert("source".into(), json!("spec"));
            manifold.insert("path".into(), json!(path.display().to_string()));
        }
    }
    run_on(&m, entry.as_ref(), config, manifold)
}

/// Runs the selected suites on an already built instance.
///
/// `extra` is merged into the report's `manifold` block.
pub fn run_on(
    m: &ManifoldInstance,
    entry: Option<&ZooEntry>,
    config: &RunConfig,
    extra: Map<String, Value>,
) -> Result<CheckReport, RunError> {
    config.validate()?;
    let samples = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunError::Threads(e.to_string()))?
            .install(|| sample_points(m, config.samples, config.seed))?,
        None => sample_points(m, config.samples, config.seed)?,
    };
    let rejected: usize = samples.iter().map(|s| s.rejected).sum();
    let points: Vec<PointData> = samples.into_iter().map(|s| s.data).collect();

    let mut manifold = Map::new();
    manifold.insert("id".into(), json!(m.id));
    manifold.insert("backend".into(), json!(m.backend.tag()));
    manifold.insert("domain".into(), json!(m.domain));
    manifold.extend(extra);

    let mut suites = config.suites.clone();
    suites.sort();
    suites.dedup();
    let config_echo = json!({
        "suites": suites.iter().map(|s| s.name()).collect::<Vec<_>>(),
        "samples": config.samples,
        "seed": config.seed,
        "tol": config.tol,
        "tol3": config.tol3,
        "spread": config.spread,
    });

    let mut run = Run::new(&points, entry, config);
    for suite in &suites {
        match suite {
            Suite::Axioms => run.axioms(),
            Suite::Normality => run.normality(),
            Suite::Qps => run.qps(),
            Suite::Conformal => run.conformal(),
            Suite::Classify => run.classify(),
        }
    }

    let grad_beta_zero = points
        .iter()
        .all(|pd| pd.basis.change.covector(pd.structure.d_beta).iter().all(|v| v.abs() < config.tol));
    let mut coverage = Map::new();
    coverage.insert("grad_beta_identically_zero".into(), json!(grad_beta_zero));
    coverage.insert(
        "phi_basis_fallback_points".into(),
        json!(points.iter().filter(|p| !p.basis.from_structure).count()),
    );
    coverage.insert("rejected_candidates".into(), json!(rejected));

    let passed = !run.engine_fault && !run.checks.iter().any(Check::failed);
    Ok(CheckReport {
        manifold: Value::Object(manifold),
        config: config_echo,
        checks: run.checks,
        verdicts: run.verdicts,
        coverage_flags: coverage,
        engine_fault: run.engine_fault,
        diagnostics: run.diagnostics,
        passed,
    })
}

pub fn render(report: &CheckReport, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    }
}

/// Max over samples per residual name, in first-seen order; NaN propagates.
fn aggregate(records: impl IntoIterator<Item = ResidualRecord>) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = Vec::new();
    for rec in records {
        for (name, v) in rec.iter() {
            match out.iter_mut().find(|(n, _)| n == name) {
                Some((_, acc)) => {
                    if v.is_nan() || *acc < v {
                        *acc = if acc.is_nan() { *acc } else { v };
                    }
                }
                None => out.push((name.to_string(), v)),
            }
        }
    }
    out
}

fn range_json(r: Range) -> Value {
    json!({"min": r.min, "max": r.max})
}

struct Run<'a> {
    points: &'a [PointData],
    entry: Option<&'a ZooEntry>,
    cfg: &'a RunConfig,
    class: crate::paracontact::ClassificationReport,
    checks: Vec<Check>,
    verdicts: Map<String, Value>,
    diagnostics: Vec<String>,
    engine_fault: bool,
}

impl<'a> Run<'a> {
    fn new(points: &'a [PointData], entry: Option<&'a ZooEntry>, cfg: &'a RunConfig) -> Self {
        Self {
            points,
            entry,
            cfg,
            class: classify(points, cfg.tol, cfg.spread),
            checks: Vec::new(),
            verdicts: Map::new(),
            diagnostics: Vec::new(),
            engine_fault: false,
        }
    }

    fn is_qps(&self) -> bool {
        self.class.verdict.is_quasi_para_sasakian()
    }

    fn is_normal(&self) -> bool {
        self.class.verdict != Classification::NonNormal
    }

    fn verdict(&mut self, name: &str, v: Value) {
        self.verdicts.insert(name.into(), v);
    }

    fn residuals(&mut self, prefix: &str, agg: Vec<(String, f64)>, table: &[(&str, &str, f64)]) {
        for (name, v) in agg {
            let (formula, tol) = table
                .iter()
                .find(|(n, _, _)| *n == name)
                .map(|(_, f, t)| (*f, *t))
                .unwrap_or(("", self.cfg.tol));
            self.checks.push(Check::residual(format!("{prefix}.{name}"), formula, v, tol));
        }
    }

    fn skip_all(&mut self, prefix: &str, table: &[(&str, &str, f64)], reason: &str) {
        for (name, formula, _) in table {
            self.checks.push(Check::skipped(format!("{prefix}.{name}"), *formula, reason));
        }
    }

    fn not_qps_reason(&self) -> String {
        format!("not quasi-para-Sasakian (classified {})", self.class.verdict)
    }

    fn axioms(&mut self) {
        let tol = self.cfg.tol;
        let table = [
            ("phi_squared", "φ² = Id − η⊗ξ", tol),
            ("metric_compatibility", "g(φX,φY) = −g(X,Y) + η(X)η(Y)", tol),
            ("eta_xi", "η(ξ) = 1", tol),
            ("phi_xi", "φξ = 0", tol),
            ("eta_phi", "η∘φ = 0", tol),
            ("eta_metric_dual", "η(X) = g(X,ξ)", tol),
            ("fundamental_form_skew", "Φ(X,Y) = g(X,φY) is skew", tol),
            ("eigen_split", "φ has ±1 eigendistributions of equal rank on ker η", tol),
            ("phi_basis", "(e1, φe1, ξ) orthonormal with signs (+,−,+)", tol),
        ];
        let agg = aggregate(self.points.iter().map(apm_axioms));
        self.residuals("axioms", agg, &table);
    }

    fn normality(&mut self) {
        let tol = self.cfg.tol;
        let table = [
            ("nijenhuis", "N^(1) = [φ,φ] − 2dη⊗ξ = 0", tol),
            ("nabla_phi", "(∇_Xφ)Y = β(g(X,Y)ξ − η(Y)X) + α(g(φX,Y)ξ − η(Y)φX)", tol),
            ("nabla_xi", "∇_Xξ = α(X − η(X)ξ) + βφX", tol),
            ("nabla_xi_xi", "∇_ξξ = 0", tol),
            ("d_eta_fundamental_form", "dη = −βΦ", tol),
        ];
        let agg = aggregate(
            self.points
                .iter()
                .map(|pd| ResidualRecord::new().with("nijenhuis", normality_residual(pd)))
                .chain(self.points.iter().map(normal_structure_checks)),
        );
        self.residuals("normality", agg, &table);
        let (alpha, beta) = (range_json(self.class.alpha), range_json(self.class.beta));
        self.verdict("alpha", alpha);
        self.verdict("beta", beta);
        if let Some(e) = self.entry {
            let (a, b) = (e.expected.alpha, e.expected.beta);
            if let Some(a) = a {
                self.reference_scalar("alpha", "α = ½ tr ∇ξ", a.value, self.class.alpha);
            }
            if let Some(b) = b {
                self.reference_scalar("beta", "β = ½ tr(φ∇ξ)", b.value, self.class.beta);
            }
        }
    }

    fn reference_scalar(&mut self, name: &str, formula: &str, expected: f64, r: Range) {
        let dev = (r.min - expected).abs().max((r.max - expected).abs());
        let mut c = Check::residual(format!("reference.{name}"), formula, dev, self.cfg.tol);
        c.detail.get_or_insert_with(|| format!("expected {expected}"));
        self.checks.push(c);
    }

    fn qps(&mut self) {
        let (tol, tol3) = (self.cfg.tol, self.cfg.tol3);
        let normal_table = [
            (
                "riemann_normal",
                "R(X,Y)Z = (2(ξ(α)+α²+β²)+τ/2)(g(Y,Z)X − g(X,Z)Y) − (ξ(α)+3(α²+β²)+τ/2)(g(Y,Z)η(X)ξ − g(X,Z)η(Y)ξ + η(Y)η(Z)X − η(X)η(Z)Y) + (φZ(β) − Z(α))(η(Y)X − η(X)Y) + (φY(β) − Y(α))(η(Z)X − g(X,Z)ξ) − (φX(β) − X(α))(η(Z)Y − g(Y,Z)ξ) + (φ grad β + grad α)(η(Y)g(X,Z) − η(X)g(Y,Z))",
                tol,
            ),
            (
                "ricci_normal",
                "S(Y,Z) = −(ξ(α)+α²+β²+τ/2)g(φY,φZ) + η(Z)(φY(β) − Y(α)) + η(Y)(φZ(β) − Z(α)) − 2(α²+β²)η(Y)η(Z)",
                tol,
            ),
        ];
        let quasi_table = [
            (
                "riemann_quasi",
                "R(X,Y)Z = (2β²+τ/2)(g(Y,Z)X − g(X,Z)Y) − (3β²+τ/2)(g(Y,Z)η(X)ξ − g(X,Z)η(Y)ξ + η(Y)η(Z)X − η(X)η(Z)Y) + φZ(β)(η(Y)X − η(X)Y) + φY(β)(η(Z)X − g(X,Z)ξ) − φX(β)(η(Z)Y − g(Y,Z)ξ) + (φ grad β)(η(Y)g(X,Z) − η(X)g(Y,Z))",
                tol,
            ),
            (
                "ricci_quasi",
                "S(Y,Z) = (β²+τ/2)g(Y,Z) − (3β²+τ/2)η(Y)η(Z) + η(Y)φZ(β) + η(Z)φY(β)",
                tol,
            ),
        ];
        if self.is_normal() {
            let agg = aggregate(self.points.iter().map(|pd| curvature_identity_residuals(pd, tol)));
            let (normal, quasi): (Vec<_>, Vec<_>) = agg.into_iter().partition(|(n, _)| n.ends_with("_normal"));
            self.residuals("curvature", normal, &normal_table);
            if self.is_qps() {
                self.residuals("curvature", quasi, &quasi_table);
            } else {
                self.skip_all("curvature", &quasi_table, "α ≠ 0");
            }
        } else {
            self.skip_all("curvature", &normal_table, "structure is not normal");
            self.skip_all("curvature", &quasi_table, "structure is not normal");
        }

        let axiom_table = [
            ("nabla_phi", "(∇_Xφ)Y = β(g(X,Y)ξ − η(Y)X)", tol),
            ("nabla_xi", "∇_Xξ = βφX", tol),
            ("xi_beta", "ξ(β) = 0", tol),
            ("xi_tau", "ξ(τ) = 0", tol3),
        ];
        let l_table = [
            ("l_operator", "LY = (τ/4+β²)Y − (3β²+τ/2)η(Y)ξ − η(Y)φ grad β + dβ(φY)ξ", tol),
            (
                "nabla_l",
                "(∇_XL)Y = (dτ(X)/4 + 2βdβ(X))Y − (6βdβ(X) + dτ(X)/2)η(Y)ξ − β(3β²+τ/2)(g(φX,Y)ξ + η(Y)φX) − βg(φX,Y)φ grad β − βdβ(X)η(Y)ξ − η(Y)φ∇_X grad β + (∇_Xdβ)(φY)ξ − βη(Y)dβ(X)ξ + βdβ(φY)φX",
                tol3,
            ),
            ("xi_derivative_of_grad_beta", "∇_ξ grad β = βφ grad β", tol3),
        ];
        let table_table = [
            ("beta_3", "β₃ = 0", tol),
            ("tau_3", "τ₃ = 0", tol3),
            ("beta_13", "β₁₃ + ββ₂ = 0", tol3),
            ("beta_23", "β₂₃ + ββ₁ = 0", tol3),
            ("beta_33", "β₃₃ = 0", tol3),
            ("hessian_symmetry", "β_ij = β_ji", tol3),
        ];
        if self.is_qps() {
            let agg = aggregate(self.points.iter().map(|pd| qps_axioms(pd, tol).expect("α vanishes on every sample")));
            self.residuals("qps", agg, &axiom_table);
            let agg = aggregate(self.points.iter().map(l_closed_forms));
            self.residuals("schouten", agg, &l_table);
            let agg = aggregate(self.points.iter().map(|pd| component_table(pd).1));
            self.residuals("components", agg, &table_table);
            let ricci_xi = Range::of(
                self.points
                    .iter()
                    .map(|pd| crate::tensor::bilinear(&pd.curvature.tensors.ricci, pd.structure.xi, pd.structure.xi)),
            );
            self.verdict("ricci_xi_xi", range_json(ricci_xi));
        } else {
            let reason = self.not_qps_reason();
            self.skip_all("qps", &axiom_table, &reason);
            self.skip_all("schouten", &l_table, &reason);
            self.skip_all("components", &table_table, &reason);
        }
    }

    fn conformal(&mut self) {
        let (tol, tol3, spread) = (self.cfg.tol, self.cfg.tol3, self.cfg.spread);
        let max_cotton = self
            .points
            .iter()
            .map(|pd| {
                pd.curvature.orthonormal.cotton.iter().flatten().fold(0.0_f64, |m, v| m.max(crate::tensor::norm(*v)))
            })
            .fold(0.0, f64::max);
        let by_cotton = max_cotton < tol3;
        self.verdict("cotton_max", json!(max_cotton));
        let formula = "Cotton (∇_XL)Y − (∇_YL)X, table differences L_ij − L_ji, and the conditions τ + 10β² constant, (∇_Xdβ)(Y) = −β(3β²+τ/2)(g(X,Y) − η(X)η(Y)) − βη(X)dβ(φY) − βη(Y)dβ(φX) agree";
        let flat = if self.is_qps() {
            match conformal_flatness_verdict(self.points, tol, tol3, spread) {
                Ok(v) => {
                    let mut c = Check::residual("conformal.agreement", formula, v.max_cotton_vs_table, AGREEMENT_TOLERANCE);
                    if v.engine_fault {
                        c.pass = Some(false);
                        c.detail = Some("formulations disagree".into());
                        self.engine_fault = true;
                        self.diagnostics.push("ENGINE FAULT in conformal flatness".into());
                        self.diagnostics.extend(v.diagnostics.iter().cloned());
                    }
                    self.checks.push(c);
                    self.verdict("conformally_flat", json!(v.conformally_flat));
                    self.verdict(
                        "conformal_formulations",
                        json!({
                            "cotton": v.by_cotton,
                            "table": v.by_table,
                            "conditions": v.by_conditions,
                            "max_table_differences": v.max_table_differences,
                            "max_conditions": v.max_conditions,
                            "max_hessian_residual": v.max_hessian_residual,
                            "max_hessian_rhs_e1e1": v.max_hessian_rhs_e1e1,
                            "tau_plus_10_beta2": range_json(v.tau_plus_10_beta2),
                        }),
                    );
                    v.conformally_flat
                }
                Err(e) => {
                    self.checks.push(Check::skipped("conformal.agreement", formula, e.to_string()));
                    self.verdict("conformally_flat", json!(by_cotton));
                    by_cotton
                }
            }
        } else {
            let reason = self.not_qps_reason();
            self.checks.push(Check::skipped("conformal.agreement", formula, reason));
            self.verdict("conformally_flat", json!(by_cotton));
            by_cotton
        };
        if let Some(exp) = self.entry.and_then(|e| e.expected.conformally_flat) {
            self.checks.push(Check::boolean(
                "reference.conformally_flat",
                "Cotton tensor vanishes",
                flat == exp.value,
                format!("expected {}, found {flat}", exp.value),
            ));
        }
    }

    fn classify(&mut self) {
        let (tol, tol3, spread) = (self.cfg.tol, self.cfg.tol3, self.cfg.spread);
        let verdict = self.class.verdict;
        self.verdict("classification", json!(verdict.label()));
        self.verdict("alpha", range_json(self.class.alpha));
        self.verdict("beta", range_json(self.class.beta));
        if !self.class.diagnostics.is_empty() {
            self.verdict("classification_notes", json!(self.class.diagnostics));
        }
        let tau = Range::of(self.points.iter().map(|p| p.curvature.tensors.scalar));
        self.verdict("scalar_curvature", range_json(tau));
        let nabla_r = self.points.iter().map(|p| p.curvature.nabla_riemann_norm).fold(0.0, f64::max);
        let locally_symmetric = nabla_r < tol3;
        self.verdict("locally_symmetric", json!(locally_symmetric));
        self.verdict("nabla_riemann_max", json!(nabla_r));
        let einstein = self
            .points
            .iter()
            .map(|pd| {
                let o = &pd.curvature.orthonormal;
                let gb = pd.basis.change.bilinear(&pd.metric);
                max_abs((0..3).flat_map(|i| (0..3).map(move |j| o.ricci[i][j] - o.scalar / 3.0 * gb[i][j])))
            })
            .fold(0.0, f64::max);
        self.verdict("einstein_residual", json!(einstein));

        let probe = probe_curvature(self.points, tol);
        self.verdict("constant_curvature", json!(probe.constant));
        self.verdict("sectional_curvature", range_json(probe.sectional));
        let sf_ricci = "S = 2Kg on a space of constant curvature K";
        let sf_scalar = "τ = 6K on a space of constant curvature K";
        match (probe.space_form_ricci, probe.space_form_scalar) {
            (Some(r), Some(s)) => {
                self.checks.push(Check::residual("classify.space_form_ricci", sf_ricci, r, tol));
                self.checks.push(Check::residual("classify.space_form_scalar", sf_scalar, s, tol));
            }
            _ => {
                self.checks.push(Check::skipped("classify.space_form_ricci", sf_ricci, "no constant curvature detected"));
                self.checks.push(Check::skipped("classify.space_form_scalar", sf_scalar, "no constant curvature detected"));
            }
        }

        let eq_formula = "∇R = 0 ⇔ conformally flat with τ constant ⇔ conformally flat with β constant ⇔ paracosymplectic product or constant curvature −β²";
        let k_formula = "K ≤ 0 for constant curvature";
        if self.is_qps() {
            match classification_l6(self.points, tol, tol3, spread) {
                Ok(r) => {
                    self.checks.push(Check::boolean(
                        "classify.equivalence",
                        eq_formula,
                        r.unanimous,
                        format!(
                            "[{}, {}, {}, {}]",
                            r.locally_symmetric,
                            r.conformally_flat_constant_tau,
                            r.conformally_flat_constant_beta,
                            r.structure_statement
                        ),
                    ));
                    self.verdict(
                        "equivalence",
                        json!({
                            "locally_symmetric": r.locally_symmetric,
                            "conformally_flat_constant_tau": r.conformally_flat_constant_tau,
                            "conformally_flat_constant_beta": r.conformally_flat_constant_beta,
                            "structure_statement": r.structure_statement,
                        }),
                    );
                    if r.conformal.engine_fault && !self.engine_fault {
                        self.engine_fault = true;
                        self.diagnostics.push("ENGINE FAULT in conformal flatness".into());
                        self.diagnostics.extend(r.conformal.diagnostics.iter().cloned());
                    }
                    match r.curvature.constant {
                        Some(k) => self.checks.push(Check::boolean(
                            "classify.nonpositive_curvature",
                            k_formula,
                            k <= tol,
                            format!("K = {k}"),
                        )),
                        None => self.checks.push(Check::skipped(
                            "classify.nonpositive_curvature",
                            k_formula,
                            "no constant curvature detected",
                        )),
                    }
                }
                Err(e) => {
                    self.checks.push(Check::skipped("classify.equivalence", eq_formula, e.to_string()));
                    self.checks.push(Check::skipped("classify.nonpositive_curvature", k_formula, e.to_string()));
                }
            }
        } else {
            let reason = self.not_qps_reason();
            self.checks.push(Check::skipped("classify.equivalence", eq_formula, reason.clone()));
            self.checks.push(Check::skipped("classify.nonpositive_curvature", k_formula, reason));
        }

        let Some(e) = self.entry else { return };
        let exp = e.expected.clone();
        let want = exp.classification.value;
        self.checks.push(Check::boolean(
            "reference.classification",
            "classification rules on (α, β)",
            verdict == want,
            format!("expected {want}, found {verdict}"),
        ));
        if let Some(t) = exp.tau {
            self.reference_scalar("tau", "τ = tr Q", t.value, tau);
        }
        if let Some(s) = exp.sectional {
            let (ok, detail) = match (s.value, probe.constant) {
                (SectionalCurvature::Constant(k), Some(found)) => ((found - k).abs() < tol, format!("expected {k}, found {found}")),
                (SectionalCurvature::Constant(k), None) => (false, format!("expected {k}, found non-constant")),
                (SectionalCurvature::NonConstant, None) => (true, "non-constant".into()),
                (SectionalCurvature::NonConstant, Some(found)) => (false, format!("expected non-constant, found {found}")),
            };
            self.checks.push(Check::boolean(
                "reference.sectional_curvature",
                "K(X,Y) = g(R(X,Y)Y,X)/(g(X,X)g(Y,Y) − g(X,Y)²)",
                ok,
                detail,
            ));
        }
        if let Some(ls) = exp.locally_symmetric {
            self.checks.push(Check::boolean(
                "reference.locally_symmetric",
                "∇R = 0",
                locally_symmetric == ls.value,
                format!("expected {}, found {locally_symmetric}", ls.value),
            ));
        }
    }
}
