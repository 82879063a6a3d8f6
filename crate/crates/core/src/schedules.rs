//! Relaxation and Tikhonov parameter sequences, and the step-size
//! certificates of the primal-dual schemes.

use std::sync::Arc;

use crate::error::{Result, SplitError};

type SeqFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyTag {
    /// `beta_0 = 1/4`, `beta_n = 1 - 1/(n+1)` for `n >= 1`; constant lambda.
    DefaultBeta,
    /// `beta_n = 1` for all n: no Tikhonov term, weak-convergence-only baseline.
    ConstantBetaOne,
    CustomCertified,
}

/// The pair of sequences `(beta_n)` and `(lambda_n)` driving every solver,
/// together with the family they were certified under and the scheme cap
/// on `lambda_n`.
#[derive(Clone)]
pub struct ParamSchedules {
    beta: SeqFn,
    lambda: SeqFn,
    family: FamilyTag,
    lambda_cap: f64,
}

impl ParamSchedules {
    pub fn beta(&self, n: usize) -> f64 {
        (self.beta)(n)
    }

    pub fn lambda(&self, n: usize) -> f64 {
        (self.lambda)(n)
    }

    pub fn family(&self) -> FamilyTag {
        self.family
    }

    pub fn lambda_cap(&self) -> f64 {
        self.lambda_cap
    }

    /// Lazy per-step validity check used by the solvers.
    pub fn check_step(&self, n: usize) -> Result<(f64, f64)> {
        let b = self.beta(n);
        let l = self.lambda(n);
        if !(b > 0.0 && b <= 1.0) {
            return Err(SplitError::Schedule {
                iteration: n,
                detail: format!("beta_n = {b} outside (0, 1]"),
            });
        }
        if !(l > 0.0 && l <= self.lambda_cap) {
            return Err(SplitError::Schedule {
                iteration: n,
                detail: format!("lambda_n = {l} outside (0, {}]", self.lambda_cap),
            });
        }
        Ok((b, l))
    }

    /// Custom schedules; the caller is responsible for the summability
    /// conditions of the certified families.
    pub fn custom(
        beta: impl Fn(usize) -> f64 + Send + Sync + 'static,
        lambda: impl Fn(usize) -> f64 + Send + Sync + 'static,
        lambda_cap: f64,
    ) -> Self {
        ParamSchedules {
            beta: Arc::new(beta),
            lambda: Arc::new(lambda),
            family: FamilyTag::CustomCertified,
            lambda_cap,
        }
    }

    pub fn tag(&self) -> String {
        match self.family {
            FamilyTag::DefaultBeta => "default-beta".into(),
            FamilyTag::ConstantBetaOne => "beta-one".into(),
            FamilyTag::CustomCertified => "custom".into(),
        }
    }
}

fn check_lambda(lambda_value: f64, lambda_cap: f64) -> Result<()> {
    if !(lambda_value > 0.0 && lambda_value <= lambda_cap) {
        return Err(SplitError::Domain(format!(
            "lambda_value {lambda_value} outside (0, {lambda_cap}]"
        )));
    }
    Ok(())
}

/// Tikhonov schedules: `beta_0 = 1/4`, `beta_n = 1 - 1/(n+1)` for `n >= 1`
/// and constant relaxation. The `beta_0` clamp keeps the sequence strictly
/// positive; the recorded family certifies the summability conditions.
pub fn make_default_schedules(lambda_value: f64, lambda_cap: f64) -> Result<ParamSchedules> {
    check_lambda(lambda_value, lambda_cap)?;
    Ok(ParamSchedules {
        beta: Arc::new(|n| if n == 0 { 0.25 } else { 1.0 - 1.0 / (n as f64 + 1.0) }),
        lambda: Arc::new(move |_| lambda_value),
        family: FamilyTag::DefaultBeta,
        lambda_cap,
    })
}

/// Baseline without Tikhonov terms: `beta_n = 1` for all n. Marked as the
/// weak-convergence-only family.
pub fn make_unregularized_schedules(lambda_value: f64, lambda_cap: f64) -> Result<ParamSchedules> {
    check_lambda(lambda_value, lambda_cap)?;
    Ok(ParamSchedules {
        beta: Arc::new(|_| 1.0),
        lambda: Arc::new(move |_| lambda_value),
        family: FamilyTag::ConstantBetaOne,
        lambda_cap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertScheme {
    PdFb,
    PdDr,
}

impl std::fmt::Display for CertScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CertScheme::PdFb => write!(f, "pd_fb"),
            CertScheme::PdDr => write!(f, "pd_dr"),
        }
    }
}

/// An accepted step-size configuration for a primal-dual scheme, with the
/// derived constants the relaxation cap depends on. Infinite `mu`/`nu`
/// encode absent smooth or strongly monotone terms.
#[derive(Debug, Clone)]
pub struct StepSizeCertificate {
    pub tau: f64,
    pub sigmas: Vec<f64>,
    pub operator_norm_squares: Vec<f64>,
    pub mu: f64,
    pub nus: Vec<f64>,
    pub beta_const: f64,
    pub rho: f64,
    pub lambda_cap: f64,
    pub scheme: CertScheme,
    /// pd_fb: the left-hand side of the acceptance inequality.
    /// pd_dr: the product `tau * sum sigma_i ||L_i||^2`.
    pub checked_value: f64,
}

fn check_positive_inputs(tau: f64, sigmas: &[f64], norm_squares: &[f64]) -> Result<()> {
    if tau <= 0.0 {
        return Err(SplitError::Domain(format!("tau must be positive, got {tau}")));
    }
    if sigmas.is_empty() || sigmas.len() != norm_squares.len() {
        return Err(SplitError::Domain(
            "sigma and operator-norm lists must be nonempty and of equal length".into(),
        ));
    }
    if sigmas.iter().any(|&s| s <= 0.0) {
        return Err(SplitError::Domain("all sigma_i must be positive".into()));
    }
    if norm_squares.iter().any(|&n| !(n >= 0.0) || !n.is_finite()) {
        return Err(SplitError::Domain("operator norms must be finite and nonnegative".into()));
    }
    Ok(())
}

/// Certificate for the forward-backward-type primal-dual scheme:
/// `2 * min{1/tau, 1/sigma_i} * min{mu, nu_i} * (1 - sqrt(tau sum sigma_i ||L_i||^2)) >= 1`.
///
/// `mu = +inf` (and `nu_i = +inf`) are admitted for absent terms; the
/// relaxation cap then takes its limit value 2.
pub fn validate_pd_fb_stepsizes(
    tau: f64,
    sigmas: &[f64],
    norm_squares: &[f64],
    mu: f64,
    nus: &[f64],
) -> Result<StepSizeCertificate> {
    check_positive_inputs(tau, sigmas, norm_squares)?;
    if mu <= 0.0 || nus.iter().any(|&n| n <= 0.0) {
        return Err(SplitError::Domain("mu and all nu_i must be positive".into()));
    }
    if nus.len() != sigmas.len() {
        return Err(SplitError::Domain("one nu_i per block is required".into()));
    }

    let s: f64 = tau
        * sigmas
            .iter()
            .zip(norm_squares)
            .map(|(sig, ns)| sig * ns)
            .sum::<f64>();
    if s >= 1.0 {
        return Err(SplitError::CertificateRejected {
            detail: "tau * sum sigma_i ||L_i||^2 must be < 1".into(),
            value: s,
        });
    }
    let min_inv_step = sigmas.iter().fold(1.0 / tau, |m, &sig| m.min(1.0 / sig));
    let beta_const = nus.iter().fold(mu, |m, &n| m.min(n));
    let rho = min_inv_step * (1.0 - s.sqrt());
    let lhs = 2.0 * beta_const * rho;
    if lhs < 1.0 {
        return Err(SplitError::CertificateRejected {
            detail: "2 * min{1/tau, 1/sigma_i} * min{mu, nu_i} * (1 - sqrt(tau sum sigma_i ||L_i||^2)) must be >= 1"
                .into(),
            value: lhs,
        });
    }
    let lambda_cap = if beta_const.is_infinite() {
        2.0
    } else {
        (4.0 * beta_const * rho - 1.0) / (2.0 * beta_const * rho)
    };
    Ok(StepSizeCertificate {
        tau,
        sigmas: sigmas.to_vec(),
        operator_norm_squares: norm_squares.to_vec(),
        mu,
        nus: nus.to_vec(),
        beta_const,
        rho,
        lambda_cap,
        scheme: CertScheme::PdFb,
        checked_value: lhs,
    })
}

/// Certificate for the Douglas-Rachford-type primal-dual scheme:
/// `tau * sum sigma_i ||L_i||^2 < 4` (strict), relaxation cap 2.
pub fn validate_pd_dr_stepsizes(
    tau: f64,
    sigmas: &[f64],
    norm_squares: &[f64],
) -> Result<StepSizeCertificate> {
    check_positive_inputs(tau, sigmas, norm_squares)?;
    let product: f64 = tau
        * sigmas
            .iter()
            .zip(norm_squares)
            .map(|(sig, ns)| sig * ns)
            .sum::<f64>();
    if product >= 4.0 {
        return Err(SplitError::CertificateRejected {
            detail: "tau * sum sigma_i ||L_i||^2 must be strictly below 4".into(),
            value: product,
        });
    }
    let min_inv_step = sigmas.iter().fold(1.0 / tau, |m, &sig| m.min(1.0 / sig));
    let rho = (1.0 - 0.5 * product.sqrt()) * min_inv_step;
    Ok(StepSizeCertificate {
        tau,
        sigmas: sigmas.to_vec(),
        operator_norm_squares: norm_squares.to_vec(),
        mu: f64::INFINITY,
        nus: vec![f64::INFINITY; sigmas.len()],
        beta_const: f64::INFINITY,
        rho,
        lambda_cap: 2.0,
        scheme: CertScheme::PdDr,
        checked_value: product,
    })
}
