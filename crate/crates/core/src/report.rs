//! End-to-end pipelines behind the command-line tool and the reports they
//! produce.
//!
//! Every check in a [`BoundReport`] is an inequality `lhs >= rhs` with signed
//! slack `lhs - rhs`; it passes when the slack is non-negative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{gp_pipeline, Denominator, GpOutcome};
use crate::graph::Graph;
use crate::numerics::SdpOptions;
use crate::rounding::{estimate_expected_energy, theta_lower_bound, Model, RoundingEstimate};
use crate::specialfn::rounding_coefficient;
use crate::spectrum;
use crate::theta::{lovasz_theta_complement, EdgeMode, ThetaCertificate};

pub const REPORT_VERSION: u32 = 1;

/// Approximation ratio guaranteed for the moment-matrix rounding.
pub const GP_RATIO_GUARANTEE: f64 = 0.498;

/// Number of standard errors allowed by every Monte-Carlo check.
pub const SIGMA_POLICY: f64 = 3.0;

pub const STATISTICAL_GUIDANCE: &str = "statistical check failed at the 3-sigma level; \
rerun with a larger --trials (or another --seed) before treating this as a bug";

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage {
        stage: name,
        source: Box::new(e),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub model: Model,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_exact_n: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            model: Model::Qmc,
            trials: 10_000,
            seed: 0,
            tol: 1e-7,
            max_exact_n: 20,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDescriptor {
    pub source: String,
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantEntry {
    pub model: Model,
    pub symbol: String,
    pub value: f64,
}

pub fn constants() -> Vec<ConstantEntry> {
    [Model::Qmc, Model::Xx, Model::Mc]
        .into_iter()
        .map(|model| ConstantEntry {
            model,
            symbol: model.constant_symbol().to_string(),
            value: rounding_coefficient(model.rank()).expect("rank is positive"),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThetaSection {
    pub kappa: f64,
    pub t: f64,
    pub mode: EdgeMode,
    pub residual: f64,
    pub iterations: usize,
}

impl From<&ThetaCertificate> for ThetaSection {
    fn from(c: &ThetaCertificate) -> Self {
        Self {
            kappa: c.kappa,
            t: c.t,
            mode: c.mode,
            residual: c.residual,
            iterations: c.iterations,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundEntry {
    pub model: Model,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundingSection {
    pub model: Model,
    pub mean: f64,
    pub stderr: f64,
    pub best: f64,
    pub best_trial: usize,
    pub trials: usize,
    pub seed: u64,
    pub resamples: u64,
}

impl RoundingSection {
    fn new(model: Model, e: &RoundingEstimate) -> Self {
        Self {
            model,
            mean: e.mean,
            stderr: e.stderr,
            best: e.best_energy,
            best_trial: e.best_trial,
            trials: e.trials,
            seed: e.master_seed,
            resamples: e.resamples,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExactSection {
    pub qmc: Option<f64>,
    pub xx: Option<f64>,
    pub mc: Option<u64>,
    /// Start-vector seed of the eigensolver, when one ran.
    pub eigen_seed: Option<u64>,
    pub eigen_residual: Option<f64>,
    /// Why nothing was computed, if so.
    pub skipped: Option<String>,
}

impl ExactSection {
    pub fn value(&self, model: Model) -> Option<f64> {
        match model {
            Model::Qmc => self.qmc,
            Model::Xx => self.xx,
            Model::Mc => self.mc.map(|v| v as f64),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GpSection {
    pub relaxation_value: f64,
    pub relaxation_violation: f64,
    pub ratio: f64,
    pub ratio_stderr: f64,
    pub denominator: Denominator,
    pub denominator_value: f64,
    pub upper_bound_denominator: bool,
    pub mean: f64,
    pub stderr: f64,
    pub best: f64,
    pub trials: usize,
    pub seed: u64,
}

impl From<&GpOutcome> for GpSection {
    fn from(o: &GpOutcome) -> Self {
        Self {
            relaxation_value: o.relaxation_value,
            relaxation_violation: o.relaxation_violation,
            ratio: o.ratio,
            ratio_stderr: o.ratio_stderr,
            denominator: o.denominator,
            denominator_value: o.denominator_value,
            upper_bound_denominator: o.denominator == Denominator::UpperBound,
            mean: o.estimate.mean,
            stderr: o.estimate.stderr,
            best: o.estimate.best_energy,
            trials: o.estimate.trials,
            seed: o.estimate.master_seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs_name: String,
    pub lhs: f64,
    pub rhs_name: String,
    pub rhs: f64,
    /// `lhs - rhs`.
    pub slack: f64,
    pub pass: bool,
    pub statistical: bool,
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: &str, lhs_name: &str, lhs: f64, rhs_name: &str, rhs: f64) -> Self {
        let slack = lhs - rhs;
        Self {
            name: name.into(),
            lhs_name: lhs_name.into(),
            lhs,
            rhs_name: rhs_name.into(),
            rhs,
            slack,
            pass: slack >= 0.0,
            statistical: false,
            note: None,
        }
    }

    fn statistical(mut self) -> Self {
        self.statistical = true;
        if !self.pass {
            self.note = Some(STATISTICAL_GUIDANCE.to_string());
        }
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub report_version: u32,
    pub command: String,
    pub graph: GraphDescriptor,
    pub options: RunOptions,
    pub constants: Vec<ConstantEntry>,
    pub theta: Option<ThetaSection>,
    pub bounds: Vec<BoundEntry>,
    pub rounding: Option<RoundingSection>,
    pub exact: Option<ExactSection>,
    pub gp: Option<GpSection>,
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

impl BoundReport {
    fn new(command: &str, source: &str, g: &Graph, options: RunOptions) -> Self {
        Self {
            report_version: REPORT_VERSION,
            command: command.into(),
            graph: GraphDescriptor {
                source: source.into(),
                n: g.n(),
                m: g.m(),
            },
            options,
            constants: constants(),
            theta: None,
            bounds: Vec::new(),
            rounding: None,
            exact: None,
            gp: None,
            checks: Vec::new(),
            all_passed: true,
        }
    }

    fn push(&mut self, check: Check) {
        self.all_passed &= check.pass;
        self.checks.push(check);
    }

    pub fn bound(&self, model: Model) -> Option<f64> {
        self.bounds
            .iter()
            .find(|b| b.model == model)
            .map(|b| b.bound)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn sdp_options(tol: f64) -> SdpOptions {
    SdpOptions {
        tol,
        ..SdpOptions::default()
    }
}

fn theta_stage(g: &Graph, tol: f64) -> Result<ThetaCertificate> {
    if g.m() == 0 {
        return Err(Error::NoEdges);
    }
    stage("theta", lovasz_theta_complement(g, sdp_options(tol)))
}

fn all_bounds(g: &Graph, kappa: f64) -> Result<Vec<BoundEntry>> {
    [Model::Qmc, Model::Xx, Model::Mc]
        .into_iter()
        .map(|model| {
            Ok(BoundEntry {
                model,
                bound: stage("bound", theta_lower_bound(g, kappa, model))?,
            })
        })
        .collect()
}

/// Largest eigenvalue (`qmc`, `xx`) or maximum cut (`mc`) when
/// `n <= max_exact_n`.
pub fn exact_values(g: &Graph, models: &[Model], opts: &RunOptions) -> Result<ExactSection> {
    let mut out = ExactSection::default();
    if g.n() > opts.max_exact_n.min(spectrum::MAX_QUBITS) {
        out.skipped = Some(format!(
            "n = {} exceeds the exact-solver limit {}",
            g.n(),
            opts.max_exact_n.min(spectrum::MAX_QUBITS)
        ));
        return Ok(out);
    }
    for &model in models {
        match model {
            Model::Mc => out.mc = Some(stage("exact", spectrum::max_cut_bruteforce(g))? as u64),
            Model::Qmc | Model::Xx => {
                let est = stage(
                    "exact",
                    spectrum::max_eigenvalue(g, model, 1e-10, opts.seed),
                )?;
                out.eigen_seed = Some(est.seed);
                out.eigen_residual = Some(out.eigen_residual.unwrap_or(0.0).max(est.residual));
                if model == Model::Qmc {
                    out.qmc = Some(est.value);
                } else {
                    out.xx = Some(est.value);
                }
            }
        }
    }
    Ok(out)
}

/// Theta of the complement and the implied bound for every model.
pub fn cmd_theta(g: &Graph, source: &str, opts: RunOptions) -> Result<BoundReport> {
    let mut report = BoundReport::new("theta", source, g, opts);
    let cert = theta_stage(g, opts.tol)?;
    report.bounds = all_bounds(g, cert.kappa)?;
    report.theta = Some((&cert).into());
    report.push(Check::new(
        "theta_certificate",
        "residual_limit",
        100.0 * opts.tol,
        "certificate_residual",
        cert.residual,
    ));
    Ok(report)
}

/// Theta, bound, Monte-Carlo rounding and exact value for one model, with the
/// four checks
/// `exact >= bound - 1e-6`, `mean >= bound - 3 stderr`,
/// `exact + 1e-9 >= best` and `exact >= m/4`.
pub fn cmd_verify(g: &Graph, source: &str, opts: RunOptions) -> Result<BoundReport> {
    let mut report = BoundReport::new("verify", source, g, opts);
    let model = opts.model;
    let cert = theta_stage(g, opts.tol)?;
    report.bounds = all_bounds(g, cert.kappa)?;
    report.theta = Some((&cert).into());
    let bound = report.bound(model).expect("every model has a bound");

    let est = stage(
        "rounding",
        estimate_expected_energy(g, &cert.vectors, model, opts.trials, opts.seed),
    )?;
    report.rounding = Some(RoundingSection::new(model, &est));
    let exact = exact_values(g, &[model], &opts)?;
    let exact_value = exact.value(model);
    report.exact = Some(exact);

    if let Some(exact) = exact_value {
        report.push(Check::new(
            "exact_ge_bound",
            "exact",
            exact,
            "bound - 1e-6",
            bound - 1e-6,
        ));
    }
    report.push(
        Check::new(
            "mean_ge_bound",
            "rounding_mean",
            est.mean,
            "bound - 3*stderr",
            bound - SIGMA_POLICY * est.stderr,
        )
        .statistical(),
    );
    if let Some(exact) = exact_value {
        report.push(Check::new(
            "best_le_exact",
            "exact + 1e-9",
            exact + 1e-9,
            "best_energy",
            est.best_energy,
        ));
        report.push(Check::new(
            "exact_ge_quarter_m",
            "exact",
            exact,
            "m/4",
            g.m() as f64 / 4.0,
        ));
    }
    Ok(report)
}

/// Moment-matrix relaxation, rank-3 rounding and the empirical ratio.
pub fn cmd_gp(g: &Graph, source: &str, opts: RunOptions) -> Result<BoundReport> {
    let mut report = BoundReport::new("gp", source, g, opts);
    if g.m() == 0 {
        return Err(Error::NoEdges);
    }
    let out = stage(
        "gp",
        gp_pipeline(g, opts.trials, opts.seed, opts.tol, opts.max_exact_n),
    )?;
    report.gp = Some((&out).into());
    report.push(
        Check::new(
            "gp_ratio",
            "ratio",
            out.ratio,
            "0.498 - 3*stderr/denominator",
            GP_RATIO_GUARANTEE - SIGMA_POLICY * out.ratio_stderr,
        )
        .statistical(),
    );
    if out.denominator == Denominator::ExactQmc {
        let exact = out.denominator_value;
        report.exact = Some(ExactSection {
            qmc: Some(exact),
            eigen_seed: Some(opts.seed),
            ..ExactSection::default()
        });
        report.push(Check::new(
            "relaxation_ge_exact",
            "relaxation",
            out.relaxation_value,
            "exact - 1e-5",
            exact - 1e-5,
        ));
        report.push(Check::new(
            "best_le_exact",
            "exact + 1e-9",
            exact + 1e-9,
            "best_energy",
            out.estimate.best_energy,
        ));
    }
    Ok(report)
}

pub const CSV_HEADER: [&str; 11] = [
    "n",
    "m",
    "kappa",
    "bound_qmc",
    "bound_xx",
    "bound_mc",
    "mc_exact",
    "qmc_exact",
    "gp_relax",
    "gp_ratio",
    "seeds",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub source: String,
    pub n: usize,
    pub m: usize,
    pub kappa: f64,
    pub bound_qmc: f64,
    pub bound_xx: f64,
    pub bound_mc: f64,
    pub mc_exact: Option<u64>,
    pub qmc_exact: Option<f64>,
    pub gp_relax: f64,
    pub gp_ratio: f64,
    pub gp_upper_bound_denominator: bool,
    pub seed: u64,
}

/// `x` with 12 significant digits: positional notation for moderate
/// magnitudes, scientific otherwise.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    // log10 can misjudge the exponent by one right at powers of ten
    let sci = format!("{x:.11e}");
    let exp = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse::<i32>().ok())
        .unwrap_or(exp);
    if (-5..12).contains(&exp) {
        format!("{x:.*}", (11 - exp) as usize)
    } else {
        sci
    }
}

impl SweepRow {
    pub fn csv_fields(&self) -> [String; 11] {
        [
            self.n.to_string(),
            self.m.to_string(),
            format_sig12(self.kappa),
            format_sig12(self.bound_qmc),
            format_sig12(self.bound_xx),
            format_sig12(self.bound_mc),
            self.mc_exact.map(|v| v.to_string()).unwrap_or_default(),
            self.qmc_exact.map(format_sig12).unwrap_or_default(),
            format_sig12(self.gp_relax),
            format_sig12(self.gp_ratio),
            self.seed.to_string(),
        ]
    }
}

/// One comparison row: theta, all three bounds, exact values within the size
/// limit, and the moment-matrix relaxation with its rounding ratio.
pub fn sweep_row(g: &Graph, source: &str, opts: RunOptions) -> Result<SweepRow> {
    let cert = theta_stage(g, opts.tol)?;
    let bounds = all_bounds(g, cert.kappa)?;
    let exact = exact_values(g, &[Model::Qmc, Model::Mc], &opts)?;
    let gp = stage(
        "gp",
        gp_pipeline(g, opts.trials, opts.seed, opts.tol, opts.max_exact_n),
    )?;
    let get = |model| {
        bounds
            .iter()
            .find(|b| b.model == model)
            .map(|b| b.bound)
            .unwrap_or(f64::NAN)
    };
    Ok(SweepRow {
        source: source.into(),
        n: g.n(),
        m: g.m(),
        kappa: cert.kappa,
        bound_qmc: get(Model::Qmc),
        bound_xx: get(Model::Xx),
        bound_mc: get(Model::Mc),
        mc_exact: exact.mc,
        qmc_exact: exact.qmc,
        gp_relax: gp.relaxation_value,
        gp_ratio: gp.ratio,
        gp_upper_bound_denominator: gp.denominator == Denominator::UpperBound,
        seed: opts.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{named_graph, Family};

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(5f64.sqrt()), "2.23606797750");
        assert_eq!(format_sig12(10.0), "10.0000000000");
        assert_eq!(format_sig12(0.5), "0.500000000000");
        assert_eq!(format_sig12(-0.000123), "-0.000123000000000");
        assert_eq!(format_sig12(1e-7), "1.00000000000e-7");
        assert_eq!(format_sig12(9.9999999999999), "10.0000000000");
        assert_eq!(format_sig12(0.0), "0");
    }

    #[test]
    fn constants_are_listed_symbolically() {
        let c = constants();
        assert_eq!(c.len(), 3);
        assert_eq!(c[0].symbol, "8/(3*pi)");
        assert!((c[0].value - 8.0 / (3.0 * std::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn verify_single_edge() {
        let g = named_graph(Family::Complete, &[2], 0).unwrap();
        let opts = RunOptions {
            trials: 500,
            ..RunOptions::default()
        };
        let r = cmd_verify(&g, "complete:2", opts).unwrap();
        assert!(r.all_passed, "{:?}", r.checks);
        assert_eq!(r.checks.len(), 4);
        assert!((r.bound(Model::Qmc).unwrap() - 0.462_206_6).abs() < 1e-6);
        assert!((r.exact.unwrap().qmc.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn edgeless_has_no_bound() {
        let g = Graph::empty(3).unwrap();
        assert!(matches!(
            cmd_theta(&g, "x", RunOptions::default()),
            Err(Error::NoEdges)
        ));
        assert!(matches!(
            cmd_verify(&g, "x", RunOptions::default()),
            Err(Error::NoEdges)
        ));
        assert!(matches!(
            cmd_gp(&g, "x", RunOptions::default()),
            Err(Error::NoEdges)
        ));
    }

    #[test]
    fn failing_check_carries_guidance() {
        let c = Check::new("c", "a", 0.0, "b", 1.0).statistical();
        assert!(!c.pass && c.slack == -1.0);
        assert!(c.note.unwrap().contains("--trials"));
    }

    #[test]
    fn exact_skipped_above_limit() {
        let g = named_graph(Family::Cycle, &[6], 0).unwrap();
        let opts = RunOptions {
            max_exact_n: 5,
            ..RunOptions::default()
        };
        let e = exact_values(&g, &[Model::Qmc], &opts).unwrap();
        assert!(e.qmc.is_none() && e.skipped.is_some());
    }
}
