use hardy_core::functions::{make_family, AngularFactor, ExtremizerSpec, FunctionError};
use hardy_core::hilbert::{randomized_suite, LemmaSuiteReport};
use hardy_core::identities::{
    evaluate, EvalConfig, IdentityError, IdentityId, IdentityParams, IdentityReport, TestSubject,
};
use hardy_core::sharpness::{
    divergence_diagnostic, r_sweep_t2, sharpness_sweep, DivergenceReport, SharpnessError, SweepResult,
};
use hardy_core::suite::{run_all, CriterionOutcome};
use serde::Serialize;

use crate::config::{Command, RunConfig};
use crate::{CliError, UsageError};

/// What a command produced.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Artifact {
    Reports(Vec<IdentityReport>),
    Sweeps(Vec<SweepResult>),
    Divergence(Vec<DivergenceReport>),
    Lemma(Vec<LemmaSuiteReport>),
    Criteria(Vec<CriterionOutcome>),
}

impl Artifact {
    pub fn is_empty(&self) -> bool {
        match self {
            Artifact::Reports(v) => v.is_empty(),
            Artifact::Sweeps(v) => v.is_empty(),
            Artifact::Divergence(v) => v.is_empty(),
            Artifact::Lemma(v) => v.is_empty(),
            Artifact::Criteria(v) => v.is_empty(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub artifact: Artifact,
    pub passed: bool,
    /// Human-readable lines for the terminal.
    pub summary: Vec<String>,
}

/// Executes the configured command. Numerical failures that still produce
/// a report come back as an [`Outcome`] with `passed == false`.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let eval = EvalConfig {
        rel_tol: cfg.rel_tol,
        threshold: cfg.threshold,
    };
    match cfg.command {
        Command::Verify => verify(cfg, &eval),
        Command::Sharpness => sharpness(cfg, &eval),
        Command::Divergence => divergence(cfg, &eval),
        Command::Lemma1 => lemma1(cfg),
        Command::RSweep => r_sweep(cfg, &eval),
        Command::All => {
            let outcomes = run_all(&eval, cfg.seed);
            let passed = outcomes.len() == 8 && outcomes.iter().all(|o| o.passed);
            let summary = outcomes.iter().map(|o| o.line()).collect();
            Ok(Outcome {
                artifact: Artifact::Criteria(outcomes),
                passed,
                summary,
            })
        }
    }
}

fn default_identity(theorem: u8) -> IdentityId {
    match theorem {
        1 => IdentityId::T1_eq15,
        2 => IdentityId::T2_eq19,
        _ => IdentityId::T3_eq113,
    }
}

fn params_for(cfg: &RunConfig, theorem: u8) -> IdentityParams {
    match theorem {
        1 => IdentityParams::dim(cfg.n.unwrap_or(3)),
        2 => IdentityParams::radius(cfg.n.unwrap_or(2), cfg.radius.unwrap_or(1.0)),
        _ => IdentityParams::exponent(cfg.p.unwrap_or(1.0)),
    }
}

fn function_error(e: FunctionError) -> CliError {
    CliError::Usage(UsageError::Invalid(e.to_string()))
}

fn identity_error(e: IdentityError) -> CliError {
    match e {
        IdentityError::Function(f) => function_error(f),
        IdentityError::Unsupported { .. } => CliError::Usage(UsageError::Invalid(e.to_string())),
        other => CliError::Numerical(other.to_string()),
    }
}

fn sharpness_error(e: SharpnessError) -> CliError {
    match e {
        SharpnessError::Identity(e) => identity_error(e),
        SharpnessError::InvalidInput(m) => CliError::Usage(UsageError::Invalid(m)),
        other => CliError::Numerical(other.to_string()),
    }
}

fn subject(
    cfg: &RunConfig,
    id: IdentityId,
    params: &IdentityParams,
    default_family: &str,
) -> Result<TestSubject, CliError> {
    let family = cfg.family.as_deref().unwrap_or(default_family);
    let s = TestSubject::from_catalogue(id, family, &cfg.params, params).map_err(identity_error)?;
    match (s, &cfg.angular) {
        (TestSubject::Product(f), Some(label)) => {
            let angular = AngularFactor::parse(label, f.dimension).map_err(function_error)?;
            Ok(TestSubject::Product(f.with_angular(angular).map_err(function_error)?))
        }
        (TestSubject::Profile(_), Some(_)) => Err(CliError::Usage(UsageError::Invalid(
            "--angular applies to theorems 1 and 2 only".into(),
        ))),
        (s, None) => Ok(s),
    }
}

fn verify(cfg: &RunConfig, eval: &EvalConfig) -> Result<Outcome, CliError> {
    let theorem = cfg.theorem_or_usage()?;
    let id = cfg.identity.unwrap_or_else(|| default_identity(theorem));
    let params = params_for(cfg, theorem);
    let default_family = if theorem == 3 { "exp_decay" } else { "gaussian" };
    let s = subject(cfg, id, &params, default_family)?;
    let ev = evaluate(id, s.as_subject(), &params, eval).map_err(identity_error)?;
    let r = ev.report;
    let summary = vec![format!(
        "{} {}: lhs {:e}, main {:e}, remainder {:e}, residual_rel {:e}",
        id,
        s.label(),
        r.lhs,
        r.main_term,
        r.remainder_term,
        r.residual_rel
    )];
    Ok(Outcome {
        passed: r.passed,
        artifact: Artifact::Reports(vec![r]),
        summary,
    })
}

fn extremizer_family(id: IdentityId) -> &'static str {
    match id.theorem() {
        1 => "subcritical_extremizer_approx",
        2 => "log_extremizer_approx",
        _ if id == IdentityId::T3_eq117 => "extremizer_backward_approx",
        _ => "extremizer_forward_approx",
    }
}

fn sharpness(cfg: &RunConfig, eval: &EvalConfig) -> Result<Outcome, CliError> {
    let theorem = cfg.theorem_or_usage()?;
    let id = cfg.identity.unwrap_or_else(|| default_identity(theorem));
    let params = params_for(cfg, theorem);
    let family = cfg.family.clone().unwrap_or_else(|| extremizer_family(id).to_owned());
    let result = match sharpness_sweep(id, &family, &cfg.eps, &params, eval) {
        Ok(r) => r,
        Err(SharpnessError::PropertyViolation { reason, result, .. }) => {
            return Ok(Outcome {
                summary: vec![format!("{id} {family}: {reason}")],
                artifact: Artifact::Sweeps(vec![*result]),
                passed: false,
            })
        }
        Err(e) => return Err(sharpness_error(e)),
    };
    let passed = match cfg.min_fraction {
        Some(m) => result.passed(m),
        None => result.monotone && result.bounded,
    };
    let summary = vec![format!(
        "{id} {}: quotient reaches {:.6} of the sharp value {} (monotone {}, bounded {})",
        result.family_label, result.attained_fraction, result.sharp_value, result.monotone, result.bounded
    )];
    Ok(Outcome {
        artifact: Artifact::Sweeps(vec![result]),
        passed,
        summary,
    })
}

fn divergence(cfg: &RunConfig, eval: &EvalConfig) -> Result<Outcome, CliError> {
    let theorem = cfg.theorem_or_usage()?;
    let id = cfg.identity.unwrap_or_else(|| default_identity(theorem));
    let params = params_for(cfg, theorem);
    let amplitude = |n: usize| -> Result<AngularFactor, CliError> {
        AngularFactor::parse(cfg.angular.as_deref().unwrap_or("one"), n).map_err(function_error)
    };
    let coefficient = cfg.params.first().copied().unwrap_or(1.0);
    let spec = match id {
        IdentityId::T1_eq15 | IdentityId::T1_eq16 => {
            let n = params.n.unwrap_or(3);
            ExtremizerSpec::subcritical(n, &amplitude(n)?)
        }
        IdentityId::T2_eq19 | IdentityId::T2_eq110 => {
            let n = params.n.unwrap_or(2);
            ExtremizerSpec::logarithmic(n, params.R.unwrap_or(1.0), &amplitude(n)?)
        }
        IdentityId::T3_eq113 => ExtremizerSpec::oned_forward(params.p.unwrap_or(1.0), coefficient),
        IdentityId::T3_eq117 => ExtremizerSpec::oned_backward(params.p.unwrap_or(1.0), coefficient),
        other => {
            return Err(CliError::Usage(UsageError::Invalid(format!(
                "no extremizer form for {other}"
            ))));
        }
    }
    .map_err(function_error)?;
    let logarithmic = theorem == 2;
    let cutoffs = cfg
        .cutoffs
        .clone()
        .unwrap_or_else(|| vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-8]);
    if cutoffs.len() < 2 || cutoffs.iter().any(|d| !(*d > 0.0 && *d < 1.0)) {
        return Err(CliError::Usage(UsageError::Invalid(
            "need at least two cutoffs in (0, 1)".into(),
        )));
    }
    let windows: Vec<(f64, f64)> = cutoffs
        .iter()
        .map(|&d| if logarithmic { (d, 1.0) } else { (d, 1.0 / d) })
        .collect();
    let report = divergence_diagnostic(&spec, &windows, eval).map_err(sharpness_error)?;
    let summary = vec![format!(
        "{}: slope {} against expected {} (relative error {:e}, fit residual {:e})",
        report.identity_id, report.fitted_slope, report.expected_slope, report.slope_rel_error, report.fit_residual
    )];
    Ok(Outcome {
        passed: report.passed,
        artifact: Artifact::Divergence(vec![report]),
        summary,
    })
}

fn lemma1(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let r = randomized_suite(cfg.trials, cfg.dim, cfg.seed)
        .map_err(|e| CliError::Usage(UsageError::Invalid(e.to_string())))?;
    let worst = r
        .max_consistency
        .max(r.max_polarization)
        .max(r.max_equality_residual)
        .max(r.max_orthogonal_residual);
    let summary = vec![format!(
        "lemma1: {} trials in dimension {}, max residual {:e} (tolerance {:e})",
        r.trials, r.dim, worst, r.tolerance
    )];
    Ok(Outcome {
        passed: r.passed,
        artifact: Artifact::Lemma(vec![r]),
        summary,
    })
}

fn r_sweep(cfg: &RunConfig, eval: &EvalConfig) -> Result<Outcome, CliError> {
    if let Some(t) = cfg.theorem.filter(|&t| t != 2) {
        return Err(CliError::Usage(UsageError::Invalid(format!(
            "r-sweep is for theorem 2, got {t}"
        ))));
    }
    let n = cfg.n.unwrap_or(2);
    if n < 2 {
        return Err(CliError::Usage(UsageError::Invalid(format!(
            "theorem 2 needs n >= 2, got {n}"
        ))));
    }
    let radii = if cfg.radii.is_empty() {
        vec![0.5, 1.0, 2.0]
    } else {
        cfg.radii.clone()
    };
    let mut f = make_family(cfg.family.as_deref().unwrap_or("gaussian"), &cfg.params, n).map_err(function_error)?;
    if let Some(label) = &cfg.angular {
        f = f
            .with_angular(AngularFactor::parse(label, n).map_err(function_error)?)
            .map_err(function_error)?;
    }
    let reports = r_sweep_t2(&f, &radii, eval).map_err(sharpness_error)?;
    let passed = reports.iter().all(|r| r.passed);
    let summary = reports
        .iter()
        .map(|r| {
            format!(
                "R = {}: lhs {:e}, residual_rel {:e}",
                r.params.R.unwrap_or(f64::NAN),
                r.lhs,
                r.residual_rel
            )
        })
        .collect();
    Ok(Outcome {
        artifact: Artifact::Reports(reports),
        passed,
        summary,
    })
}
