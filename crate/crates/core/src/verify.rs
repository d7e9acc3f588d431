//! Numerical checks of the braid relation, unitarity, factorization, exponential form,
//! projector algebra and the reference composition law.
//!
//! Residuals are max-norm differences divided by `max(1, largest entry modulus)` of the
//! compared matrices. A check passes iff `residual <= tolerance`; a check that could not be
//! evaluated carries an infinite residual (serialized as `null`) and a message.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::braid::{BraidError, BraidFamily, Mode, ReferenceFamily};
use crate::config::{BraidConfig, Config};
use crate::linalg::{self, dagger, kron, matmul, normalized_diff, ComplexMatrix};
use crate::projector::{full_family, image_vector, FamilyKind, Parity};
use crate::sampling::{SampleStream, THETA_RANGE};

pub const BRAID_TOL: f64 = 1e-10;
pub const UNITARITY_TOL: f64 = 1e-12;
pub const ADJOINT_TOL: f64 = 1e-13;
pub const FACTORIZATION_TOL: f64 = 1e-11;
pub const EXPONENTIAL_TOL: f64 = 1e-10;
pub const COMPOSITION_TOL: f64 = 1e-13;
pub const PROJECTOR_TOL: f64 = 1e-14;

/// Composition-law samples draw `z` from `[−Z_RANGE, Z_RANGE]`.
pub const Z_RANGE: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub context: BTreeMap<String, Value>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            context: BTreeMap::new(),
        }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, tolerance: f64, message: impl Into<String>) -> Self {
        CheckResult::new(name, f64::INFINITY, tolerance).with("error", message.into())
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.context.insert(key.to_string(), value.into());
        self
    }

    fn from_result(
        name: &str,
        tolerance: f64,
        r: Result<(f64, Vec<(&'static str, Value)>), BraidError>,
    ) -> Self {
        match r {
            Ok((residual, ctx)) => ctx
                .into_iter()
                .fold(CheckResult::new(name, residual, tolerance), |c, (k, v)| {
                    c.with(k, v)
                }),
            Err(e) => CheckResult::failed(name, tolerance, e.to_string()),
        }
    }
}

/// `R̂₁₂(θ)R̂₂₃(θ+θ′)R̂₁₂(θ′)` against `R̂₂₃(θ′)R̂₁₂(θ+θ′)R̂₂₃(θ)`.
pub fn braid_residual(
    family: &BraidFamily,
    theta: f64,
    theta_prime: f64,
) -> Result<f64, BraidError> {
    let (a12, a23) = family.lift(&family.build_r(theta)?)?;
    let (b12, b23) = family.lift(&family.build_r(theta + theta_prime)?)?;
    let (c12, c23) = family.lift(&family.build_r(theta_prime)?)?;
    let left = matmul(&matmul(&a12, &b23)?, &c12)?;
    let right = matmul(&matmul(&c23, &b12)?, &a23)?;
    Ok(normalized_diff(&left, &right)?)
}

pub fn check_braid(family: &BraidFamily, theta: f64, theta_prime: f64, tol: f64) -> CheckResult {
    CheckResult::from_result(
        "braid",
        tol,
        braid_residual(family, theta, theta_prime).map(|r| {
            (
                r,
                vec![("theta", json!(theta)), ("theta_prime", json!(theta_prime))],
            )
        }),
    )
}

/// `max |R†R − I|` (normalized).
pub fn unitarity_residual(r: &ComplexMatrix) -> Result<f64, BraidError> {
    let prod = matmul(&dagger(r), r)?;
    Ok(normalized_diff(&prod, &ComplexMatrix::identity(r.dim()))?)
}

/// `max |R̂(θ)† − R̂(−θ)|` (normalized).
pub fn adjoint_reversal_residual(family: &BraidFamily, theta: f64) -> Result<f64, BraidError> {
    Ok(normalized_diff(
        &dagger(&family.build_r(theta)?),
        &family.build_r(-theta)?,
    )?)
}

/// Unitarity and adjoint reversal; the residual is the larger of the two, each is also
/// recorded in the context. Real-mode families are rejected.
pub fn check_unitarity(
    family: &BraidFamily,
    theta: f64,
    tol: f64,
) -> Result<CheckResult, BraidError> {
    if family.mode() != Mode::Unitary {
        return Err(BraidError::ModeMismatch {
            expected: Mode::Unitary,
        });
    }
    let eval = || -> Result<(f64, Vec<(&'static str, Value)>), BraidError> {
        let u = unitarity_residual(&family.build_r(theta)?)?;
        let a = adjoint_reversal_residual(family, theta)?;
        Ok((
            u.max(a),
            vec![
                ("theta", json!(theta)),
                ("unitarity", json!(u)),
                ("adjoint_reversal", json!(a)),
            ],
        ))
    };
    Ok(CheckResult::from_result("unitarity", tol, eval()))
}

/// `R̂(θ₁ ± θ₂)` against `R̂(θ₁)R̂(±θ₂)`, plus `R̂(θ₂)R̂(−θ₂) = I`.
pub fn factorization_residual(
    family: &BraidFamily,
    theta1: f64,
    theta2: f64,
) -> Result<f64, BraidError> {
    let r1 = family.build_r(theta1)?;
    let mut worst: f64 = 0.0;
    for s in [1.0, -1.0] {
        let lhs = family.build_r(theta1 + s * theta2)?;
        let rhs = matmul(&r1, &family.build_r(s * theta2)?)?;
        worst = worst.max(normalized_diff(&lhs, &rhs)?);
    }
    let inv = matmul(&family.build_r(theta2)?, &family.build_r(-theta2)?)?;
    worst = worst.max(normalized_diff(&inv, &ComplexMatrix::identity(inv.dim()))?);
    Ok(worst)
}

pub fn check_factorization(
    family: &BraidFamily,
    theta1: f64,
    theta2: f64,
    tol: f64,
) -> CheckResult {
    CheckResult::from_result(
        "factorization",
        tol,
        factorization_residual(family, theta1, theta2).map(|r| {
            (
                r,
                vec![("theta1", json!(theta1)), ("theta2", json!(theta2))],
            )
        }),
    )
}

/// `R̂(θ)` against `e^{θX}`.
pub fn exponential_residual(family: &BraidFamily, theta: f64) -> Result<f64, BraidError> {
    let x = family.build_generator();
    Ok(normalized_diff(&family.build_r(theta)?, &x.exp(theta)?)?)
}

/// The braid relation with every factor written as an exponential on the three-fold space:
/// `e^{θX₁₂}e^{(θ+θ′)X₂₃}e^{θ′X₁₂} = e^{θ′X₂₃}e^{(θ+θ′)X₁₂}e^{θX₂₃}`.
pub fn exponential_braid_residual(
    family: &BraidFamily,
    theta: f64,
    theta_prime: f64,
) -> Result<f64, BraidError> {
    let x = family.build_generator();
    let id = ComplexMatrix::identity(family.side());
    let x12 = kron(x.matrix(), &id)?;
    let x23 = kron(&id, x.matrix())?;
    let e = |m: &ComplexMatrix, t: f64| linalg::matrix_exponential(&m.scale_real(t));
    let s = theta + theta_prime;
    let left = matmul(
        &matmul(&e(&x12, theta)?, &e(&x23, s)?)?,
        &e(&x12, theta_prime)?,
    )?;
    let right = matmul(
        &matmul(&e(&x23, theta_prime)?, &e(&x12, s)?)?,
        &e(&x23, theta)?,
    )?;
    Ok(normalized_diff(&left, &right)?)
}

/// Exponential form at `θ` and the exponential braid relation at `(θ, θ′)`.
pub fn check_exponential(
    family: &BraidFamily,
    theta: f64,
    theta_prime: f64,
    tol: f64,
) -> CheckResult {
    let eval = || -> Result<(f64, Vec<(&'static str, Value)>), BraidError> {
        let direct = exponential_residual(family, theta)?;
        let braid = exponential_braid_residual(family, theta, theta_prime)?;
        Ok((
            direct.max(braid),
            vec![
                ("theta", json!(theta)),
                ("theta_prime", json!(theta_prime)),
                ("build_vs_exp", json!(direct)),
                ("exponential_braid", json!(braid)),
            ],
        ))
    };
    CheckResult::from_result("exponential", tol, eval())
}

/// `R̂(z₁)R̂(z₂) = (1 − z₁z₂)R̂(z₃)` for the linear reference family.
pub fn check_composition_law(
    n: usize,
    z1: f64,
    z2: f64,
    tol: f64,
) -> Result<CheckResult, BraidError> {
    let (z3, scalar) = ReferenceFamily::compose(z1, z2)?;
    let fam = ReferenceFamily::new(n)?;
    let lhs = matmul(&fam.linear(z1), &fam.linear(z2))?;
    let rhs = fam.linear(z3).scale_real(scalar);
    let residual = normalized_diff(&lhs, &rhs)?;
    Ok(CheckResult::new("composition", residual, tol)
        .with("n", n)
        .with("z1", z1)
        .with("z2", z2)
        .with("z3", z3)
        .with("scalar", scalar))
}

/// Phase form against the normalized linear form, and `e^{φX}` against the phase form.
pub fn check_reference_forms(n: usize, z: f64, tol: f64) -> Result<CheckResult, BraidError> {
    let fam = ReferenceFamily::new(n)?;
    let phase = fam.phase_form(z)?;
    let lin = fam.linear(z).scale_real(ReferenceFamily::normalization(z));
    let proportional = normalized_diff(&phase, &lin)?;
    let phi = ReferenceFamily::phase_angle(z);
    let exp = linalg::matrix_exponential(&fam.generator().scale_real(phi))?;
    let exponential = normalized_diff(&exp, &phase)?;
    let checks = fam.checks()?;
    let residual = proportional.max(exponential);
    Ok(CheckResult::new("reference_forms", residual, tol)
        .with("n", n)
        .with("z", z)
        .with("normalization", ReferenceFamily::normalization(z))
        .with("phase_vs_linear", proportional)
        .with("exp_vs_phase", exponential)
        .with("m_sign", fam.sign())
        .with("p_algebra", checks.projector_algebra)
        .with("m_square_plus_identity", checks.m_square_plus_identity))
}

/// Algebra of every projector family available for side `N`, plus the Gram matrix of the
/// unified family's image vectors.
pub fn check_projectors(side: usize, tol: f64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut kinds = vec![FamilyKind::Unified];
    if side % 2 == 0 {
        kinds.extend([FamilyKind::P, FamilyKind::Q]);
    }
    for kind in kinds {
        let name = format!("projectors_{kind}");
        out.push(match full_family(side, kind) {
            Ok(fam) => {
                let r = fam.algebra_residuals();
                CheckResult::new(name, r.max(), tol)
                    .with("N", side)
                    .with("members", fam.len())
                    .with(
                        "residuals",
                        serde_json::to_value(r).expect("residuals serialize"),
                    )
            }
            Err(e) => CheckResult::failed(name, tol, e.to_string()),
        });
    }
    out.push(match gram_residual(side) {
        Ok(r) => CheckResult::new("projector_images_orthonormal", r, tol).with("N", side),
        Err(e) => CheckResult::failed("projector_images_orthonormal", tol, e.to_string()),
    });
    out
}

/// `max |G − I|` for the Gram matrix of the unified family's image vectors.
pub fn gram_residual(side: usize) -> Result<f64, BraidError> {
    let fam = full_family(side, FamilyKind::Unified)?;
    let vecs = fam
        .keys()
        .map(|k| image_vector(k, side))
        .collect::<Result<Vec<_>, _>>()?;
    let mut worst: f64 = 0.0;
    for (a, u) in vecs.iter().enumerate() {
        for (b, v) in vecs.iter().enumerate() {
            let g: linalg::C64 = u
                .entries()
                .iter()
                .zip(v.entries())
                .map(|(x, y)| x.conj() * y)
                .sum();
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    Ok(worst)
}

/// Agreement of the three construction routes of `R̂(θ)`: elementary terms, spectral sum
/// over the unified basis and, for even `N`, the `P`-pair form.
pub fn construction_paths_residual(family: &BraidFamily, theta: f64) -> Result<f64, BraidError> {
    let direct = family.build_r(theta)?;
    let mut worst = normalized_diff(&direct, &family.build_r_spectral(theta)?)?;
    if family.params().bar().parity() == Parity::Even {
        worst = worst.max(normalized_diff(&direct, &family.build_r_even(theta)?)?);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Braid,
    Unitarity,
    Factorization,
    Exponential,
    Projectors,
    Composition,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "braid" => Suite::Braid,
            "unitarity" => Suite::Unitarity,
            "factorization" => Suite::Factorization,
            "exponential" => Suite::Exponential,
            "projectors" => Suite::Projectors,
            "composition" => Suite::Composition,
            "all" => Suite::All,
            other => return Err(format!("unknown suite {other:?}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    #[serde(rename = "N")]
    pub side: usize,
    pub mode: Option<Mode>,
    pub suite: Suite,
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub parameter_digest: Option<String>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Random spectral parameters for one sample, drawn up front so evaluation order does not
/// affect the report.
#[derive(Debug, Clone, Copy)]
struct Draw {
    index: usize,
    theta: f64,
    theta_prime: f64,
    z1: f64,
    z2: f64,
}

fn draws(seed: u64, samples: usize) -> Vec<Draw> {
    let mut stream = SampleStream::new(seed);
    (0..samples)
        .map(|index| Draw {
            index,
            theta: stream.symmetric(THETA_RANGE),
            theta_prime: stream.symmetric(THETA_RANGE),
            z1: stream.symmetric(Z_RANGE),
            z2: stream.symmetric(Z_RANGE),
        })
        .collect()
}

fn wants(suite: Suite, part: Suite) -> bool {
    suite == Suite::All || suite == part
}

/// Runs a suite against a configuration. The configured parameters are fixed; each of the
/// `samples` draws supplies `θ, θ′ ∈ [−1, 1]` and `z₁, z₂ ∈ [−0.9, 0.9]`. Checks that do not
/// apply (unitarity in real mode, the reference family for odd `N`) are skipped under `all`
/// and reported as failures when requested explicitly.
pub fn run_suite(
    config: &Config,
    suite: Suite,
    samples: usize,
    seed: u64,
    tol: f64,
) -> VerificationReport {
    let draws = draws(seed, samples);
    let (side, mode, digest, checks) = match config {
        Config::Braid(cfg) => {
            let (mode, digest, checks) = braid_suite(cfg, suite, &draws, tol);
            (cfg.side, Some(mode), digest, checks)
        }
        Config::Reference(cfg) => (
            2 * cfg.n,
            None,
            None,
            reference_suite(cfg.n, suite, &draws, tol),
        ),
    };
    let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
    VerificationReport {
        side,
        mode,
        suite,
        seed,
        samples,
        tolerance: tol,
        parameter_digest: digest,
        checks,
        passed,
    }
}

fn braid_suite(
    cfg: &BraidConfig,
    suite: Suite,
    draws: &[Draw],
    tol: f64,
) -> (Mode, Option<String>, Vec<CheckResult>) {
    let family = match cfg.family() {
        Ok(f) => f,
        Err(e) => {
            return (
                cfg.mode,
                None,
                vec![CheckResult::failed("config", tol, e.to_string())],
            );
        }
    };
    let digest = family.params().digest();
    let mut checks = Vec::new();

    if wants(suite, Suite::Projectors) {
        checks.extend(check_projectors(cfg.side, tol));
    }

    let per_sample: Vec<Vec<CheckResult>> = draws
        .par_iter()
        .map(|d| {
            let mut out = Vec::new();
            let tag = |c: CheckResult| c.with("sample", d.index);
            if wants(suite, Suite::Braid) {
                out.push(tag(check_braid(&family, d.theta, d.theta_prime, tol)));
                out.push(tag(CheckResult::from_result(
                    "construction_paths",
                    tol,
                    construction_paths_residual(&family, d.theta)
                        .map(|r| (r, vec![("theta", json!(d.theta))])),
                )));
            }
            if wants(suite, Suite::Unitarity) {
                match check_unitarity(&family, d.theta, tol) {
                    Ok(c) => out.push(tag(c)),
                    Err(e) if suite == Suite::Unitarity => {
                        out.push(tag(CheckResult::failed("unitarity", tol, e.to_string())))
                    }
                    Err(_) => {}
                }
            }
            if wants(suite, Suite::Factorization) {
                out.push(tag(check_factorization(
                    &family,
                    d.theta,
                    d.theta_prime,
                    tol,
                )));
            }
            if wants(suite, Suite::Exponential) {
                out.push(tag(check_exponential(&family, d.theta, d.theta_prime, tol)));
            }
            out
        })
        .collect();
    checks.extend(per_sample.into_iter().flatten());

    if wants(suite, Suite::Composition) {
        if cfg.side % 2 == 0 {
            checks.extend(reference_suite(
                cfg.side / 2,
                Suite::Composition,
                draws,
                tol,
            ));
        } else if suite == Suite::Composition {
            checks.push(CheckResult::failed(
                "composition",
                tol,
                format!("the reference family needs even N, got N = {}", cfg.side),
            ));
        }
    }
    (cfg.mode, Some(digest), checks)
}

fn reference_suite(n: usize, suite: Suite, draws: &[Draw], tol: f64) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    if suite == Suite::Projectors || suite == Suite::All {
        checks.extend(check_projectors(2 * n, tol));
    }
    if wants(suite, Suite::Composition) {
        for d in draws {
            let c = check_composition_law(n, d.z1, d.z2, tol)
                .unwrap_or_else(|e| CheckResult::failed("composition", tol, e.to_string()));
            checks.push(c.with("sample", d.index));
            let f = check_reference_forms(n, d.z1, tol)
                .unwrap_or_else(|e| CheckResult::failed("reference_forms", tol, e.to_string()));
            checks.push(f.with("sample", d.index));
        }
    }
    if !matches!(suite, Suite::All | Suite::Projectors | Suite::Composition) {
        checks.push(CheckResult::failed(
            format!("{suite:?}").to_lowercase(),
            tol,
            "suite needs a braid config; reference configs support projectors and composition",
        ));
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{ParamKey, ParameterSet};
    use crate::projector::Sign;

    fn n2(mode: Mode) -> BraidFamily {
        let free = BTreeMap::from([
            (ParamKey::new(1, 1, Sign::Plus), 1.0),
            (ParamKey::new(1, 1, Sign::Minus), -1.0),
        ]);
        BraidFamily::new(ParameterSet::new(2, mode, &free).unwrap()).unwrap()
    }

    #[test]
    fn trivial_points_are_exact() {
        let f = n2(Mode::Unitary);
        assert_eq!(check_braid(&f, 0.0, 0.0, BRAID_TOL).residual, 0.0);
        assert_eq!(
            check_unitarity(&f, 0.0, UNITARITY_TOL).unwrap().residual,
            0.0
        );
        assert_eq!(
            check_factorization(&f, 0.0, 0.0, FACTORIZATION_TOL).residual,
            0.0
        );
        assert_eq!(
            check_exponential(&f, 0.0, 0.0, EXPONENTIAL_TOL).residual,
            0.0
        );
        assert_eq!(
            check_composition_law(1, 0.0, 0.0, COMPOSITION_TOL)
                .unwrap()
                .residual,
            0.0
        );
    }

    #[test]
    fn unitarity_rejects_real_mode() {
        assert!(matches!(
            check_unitarity(&n2(Mode::Real), 0.5, UNITARITY_TOL),
            Err(BraidError::ModeMismatch { .. })
        ));
    }

    #[test]
    fn real_mode_is_not_unitary() {
        // R = a₊ I + a₋ A with A² = I, so R†R − I = (a₊² + a₋² − 1) I + 2a₊a₋ A
        // with a₊ = cosh 1, a₋ = sinh 1: the off-diagonal part is 2 cosh·sinh = sinh 2.
        let r = n2(Mode::Real).build_r(1.0).unwrap();
        let prod = matmul(&dagger(&r), &r).unwrap();
        let diff = linalg::max_abs_diff(&prod, &ComplexMatrix::identity(4)).unwrap();
        assert!((diff - 2f64.sinh()).abs() < 1e-12, "{diff}");
        assert!(unitarity_residual(&r).unwrap() > 0.5);
    }

    #[test]
    fn composition_domain_error() {
        assert!(matches!(
            check_composition_law(1, 1.0, 1.0, COMPOSITION_TOL),
            Err(BraidError::CompositionDomain { .. })
        ));
    }

    #[test]
    fn failed_check_serializes_null_residual() {
        let c = CheckResult::failed("x", 1e-10, "boom");
        assert!(!c.passed);
        let v = serde_json::to_value(&c).unwrap();
        assert!(v["residual"].is_null());
        assert_eq!(v["context"]["error"], "boom");
    }

    #[test]
    fn suites_parse() {
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("everything".parse::<Suite>().is_err());
    }
}
