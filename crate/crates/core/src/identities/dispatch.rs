//! Uniform entry point over all identities.

use super::ibp::Subject;
use super::report::{Evaluation, IdentityId, IdentityParams};
use super::{eval_t1, eval_t1_fullgradient, eval_t2, eval_t3_backward, eval_t3_forward, EvalConfig, IdentityError};
use crate::functions::{make_family, make_profile_1d, ProductTestFunction, Profile1D};

/// Owned counterpart of [`Subject`].
#[derive(Clone, Debug)]
pub enum TestSubject {
    Product(ProductTestFunction),
    Profile(Profile1D),
}

impl TestSubject {
    pub fn as_subject(&self) -> Subject<'_> {
        match self {
            TestSubject::Product(f) => Subject::Product(f),
            TestSubject::Profile(f) => Subject::Profile(f),
        }
    }

    pub fn label(&self) -> String {
        match self {
            TestSubject::Product(f) => f.label(),
            TestSubject::Profile(f) => f.label.clone(),
        }
    }

    /// Builds a catalogued family of the kind `id` expects: a product
    /// function in dimension `params.n` for T1/T2, a profile for T3.
    pub fn from_catalogue(
        id: IdentityId,
        family: &str,
        family_params: &[f64],
        params: &IdentityParams,
    ) -> Result<Self, IdentityError> {
        if id.is_one_dimensional() {
            Ok(TestSubject::Profile(make_profile_1d(family, family_params)?))
        } else {
            let n = params.n.ok_or_else(|| IdentityError::Unsupported {
                identity: id,
                reason: "missing parameter `n`".into(),
            })?;
            Ok(TestSubject::Product(make_family(family, family_params, n)?))
        }
    }
}

impl IdentityId {
    pub fn is_one_dimensional(&self) -> bool {
        matches!(self, IdentityId::T3_eq113 | IdentityId::T3_eq117)
    }

    pub fn theorem(&self) -> u8 {
        match self {
            IdentityId::T1_eq15 | IdentityId::T1_eq16 | IdentityId::T1_eq21 | IdentityId::T1_dirichlet_decomp => 1,
            IdentityId::T2_eq19 | IdentityId::T2_eq110 => 2,
            IdentityId::T3_eq113 | IdentityId::T3_eq117 => 3,
        }
    }
}

/// Evaluates `id`; `report` is the form named by `id`, `alternate` the
/// companion form of the same equality.
pub fn evaluate(
    id: IdentityId,
    subject: Subject<'_>,
    params: &IdentityParams,
    cfg: &EvalConfig,
) -> Result<Evaluation, IdentityError> {
    let wrong = |what: &str| IdentityError::Unsupported {
        identity: id,
        reason: format!("expects {what}"),
    };
    let missing = |what: &str| IdentityError::Unsupported {
        identity: id,
        reason: format!("missing parameter `{what}`"),
    };
    let swap = |mut ev: Evaluation| {
        std::mem::swap(&mut ev.report, &mut ev.alternate);
        ev
    };
    match (id, subject) {
        (IdentityId::T1_eq15, Subject::Product(f)) => eval_t1(f, cfg),
        (IdentityId::T1_eq16, Subject::Product(f)) => eval_t1(f, cfg).map(swap),
        (IdentityId::T1_eq21, Subject::Product(f)) => eval_t1_fullgradient(f, cfg),
        (IdentityId::T1_dirichlet_decomp, Subject::Product(f)) => eval_t1_fullgradient(f, cfg).map(swap),
        (IdentityId::T2_eq19, Subject::Product(f)) => eval_t2(f, params.R.ok_or_else(|| missing("R"))?, cfg),
        (IdentityId::T2_eq110, Subject::Product(f)) => eval_t2(f, params.R.ok_or_else(|| missing("R"))?, cfg).map(swap),
        (IdentityId::T3_eq113, Subject::Profile(f)) => eval_t3_forward(f, params.p.ok_or_else(|| missing("p"))?, cfg),
        (IdentityId::T3_eq117, Subject::Profile(f)) => eval_t3_backward(f, params.p.ok_or_else(|| missing("p"))?, cfg),
        (_, Subject::Product(_)) => Err(wrong("a one-dimensional profile")),
        (_, Subject::Profile(_)) => Err(wrong("a product test function")),
    }
}
