//! Entanglement of product basis states under unitary braid matrices, and θ-periodicity.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::braid::{canonical_keys, BraidError, BraidFamily, Mode, ParamKey};
use crate::linalg::{self, schmidt_decompose, ComplexVector, LinalgError};
use crate::projector::Sign;

/// Singular values above this count toward the Schmidt rank.
pub const RANK_TOL: f64 = 1e-8;

/// A class is degenerate at `θ` when `(m⁺ − m⁻)θ` lies within this distance of a multiple
/// of `π`.
pub const GENERIC_TOL: f64 = 1e-6;

/// Tolerance for the numerical confirmation of a detected period.
pub const PERIOD_TOL: f64 = 1e-10;

/// Base points at which a period is confirmed by direct comparison.
pub const PERIOD_PROBES: [f64; 2] = [0.37, 1.91];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntangleError {
    #[error("entanglement analysis requires unitary mode")]
    RealMode,
    #[error("basis index ({a}, {b}) out of range 1..={side}")]
    IndexOutOfRange { a: usize, b: usize, side: usize },
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, EntangleError>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementRecord {
    pub a: usize,
    pub b: usize,
    pub singular_values: Vec<f64>,
    /// Von Neumann entropy of the reduced state, in bits.
    pub entropy: f64,
    pub schmidt_rank: usize,
}

/// `−Σ p log₂ p` over `p = σ²`, with `0·log 0 = 0`.
pub fn entropy_bits(singular_values: &[f64]) -> f64 {
    let h: f64 = singular_values
        .iter()
        .map(|s| s * s)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    h.max(0.0)
}

fn require_unitary(family: &BraidFamily) -> Result<()> {
    if family.mode() != Mode::Unitary {
        return Err(EntangleError::RealMode);
    }
    Ok(())
}

fn record(
    r: &linalg::ComplexMatrix,
    side: usize,
    a: usize,
    b: usize,
) -> Result<EntanglementRecord> {
    if !(1..=side).contains(&a) || !(1..=side).contains(&b) {
        return Err(EntangleError::IndexOutOfRange { a, b, side });
    }
    let input = ComplexVector::basis(side, a - 1).kron(&ComplexVector::basis(side, b - 1));
    let out = r.mul_vec(&input)?;
    let singular_values = schmidt_decompose(&out, side, side)?;
    let schmidt_rank = singular_values.iter().filter(|&&s| s > RANK_TOL).count();
    Ok(EntanglementRecord {
        a,
        b,
        entropy: entropy_bits(&singular_values),
        schmidt_rank,
        singular_values,
    })
}

/// Applies `R̂(θ)` to `|a⟩⊗|b⟩` (1-based) and Schmidt-decomposes the result across the
/// `N × N` cut.
pub fn apply_to_product(
    family: &BraidFamily,
    a: usize,
    b: usize,
    theta: f64,
) -> Result<EntanglementRecord> {
    require_unitary(family)?;
    let r = family.build_r(theta)?;
    record(&r, family.side(), a, b)
}

/// Canonical classes `(i, j)` whose two coefficients `e^{im⁺θ}`, `e^{im⁻θ}` are equal or
/// opposite at `θ`, so that one of `a± = ½(e^{im⁺θ} ± e^{im⁻θ})` vanishes.
pub fn degenerate_classes(family: &BraidFamily, theta: f64) -> Vec<(usize, usize)> {
    let params = family.params();
    let bar = params.bar();
    let mut out = Vec::new();
    for key in canonical_keys(family.side()).expect("side validated") {
        if key.epsilon != Sign::Plus {
            continue;
        }
        let diff =
            (params.m(key.i, key.j, Sign::Plus) - params.m(key.i, key.j, Sign::Minus)) * theta;
        let dist = (diff / PI - (diff / PI).round()).abs() * PI;
        if dist <= GENERIC_TOL && !(bar.is_central(key.i) && bar.is_central(key.j)) {
            out.push((key.i, key.j));
        }
    }
    out
}

pub fn is_generic(family: &BraidFamily, theta: f64) -> bool {
    degenerate_classes(family, theta).is_empty()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExceptionalScan {
    pub theta: f64,
    pub records: Vec<EntanglementRecord>,
    /// Every basis product left with Schmidt rank 1, in lexicographic order.
    pub exceptional: Vec<(usize, usize)>,
    /// The subset of `exceptional` explained by a degenerate class at this `θ`.
    pub accidental: Vec<(usize, usize)>,
    /// Basis products mapped to a multiple of themselves.
    pub invariant: Vec<(usize, usize)>,
}

impl ExceptionalScan {
    /// Exceptional states not explained by a coefficient coincidence.
    pub fn structural(&self) -> Vec<(usize, usize)> {
        self.exceptional
            .iter()
            .filter(|s| !self.accidental.contains(s))
            .copied()
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "theta": self.theta,
            "records": self.records,
            "exceptional": self.exceptional.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
            "accidental": self.accidental.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
            "invariant": self.invariant.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
        })
    }
}

/// Exhaustive scan of all `N²` basis products at `θ`.
pub fn exceptional_scan(family: &BraidFamily, theta: f64) -> Result<ExceptionalScan> {
    require_unitary(family)?;
    let side = family.side();
    let bar = family.params().bar();
    let r = family.build_r(theta)?;
    let degenerate = degenerate_classes(family, theta);
    let mut scan = ExceptionalScan {
        theta,
        records: Vec::with_capacity(side * side),
        exceptional: Vec::new(),
        accidental: Vec::new(),
        invariant: Vec::new(),
    };
    for a in 1..=side {
        for b in 1..=side {
            let rec = record(&r, side, a, b)?;
            if rec.schmidt_rank == 1 {
                scan.exceptional.push((a, b));
                if degenerate.contains(&(bar.canonical(a), bar.canonical(b))) {
                    scan.accidental.push((a, b));
                }
            }
            let col = (a - 1) * side + (b - 1);
            let leak: f64 = (0..side * side)
                .filter(|&row| row != col)
                .map(|row| r[(row, col)].norm())
                .fold(0.0, f64::max);
            if leak <= RANK_TOL {
                scan.invariant.push((a, b));
            }
            scan.records.push(rec);
        }
    }
    Ok(scan)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodResult {
    pub periodic: bool,
    pub period: Option<f64>,
    /// `None` when the parameters were not supplied exactly.
    pub commensurate: Option<bool>,
    /// All parameters zero: `R̂(θ) ≡ I` and the period is reported as 0.
    pub degenerate: bool,
    /// `max |R̂(θ₀ + T) − R̂(θ₀)|` over the probe points.
    pub verification_residual: Option<f64>,
}

/// Largest positive rational `g` with `r/g ∈ ℤ` for every `r` (zeros ignored).
pub fn rational_gcd(values: impl IntoIterator<Item = Ratio<i64>>) -> Option<Ratio<i64>> {
    values
        .into_iter()
        .filter(|r| *r.numer() != 0)
        .map(|r| Ratio::new(r.numer().abs(), *r.denom()))
        .reduce(|x, y| Ratio::new(x.numer().gcd(y.numer()), x.denom().lcm(y.denom())))
}

/// Period of `θ ↦ R̂(θ)` in unitary mode.
///
/// With exact parameters the family is periodic with `T = 2π/g`, `g` the rational gcd of the
/// parameters; `T` is then confirmed numerically at [`PERIOD_PROBES`]. Without exact values
/// commensurability is undecidable and the result is neither periodic nor commensurate.
pub fn detect_period(
    family: &BraidFamily,
    exact: Option<&BTreeMap<ParamKey, Ratio<i64>>>,
) -> Result<PeriodResult> {
    require_unitary(family)?;
    let Some(exact) = exact else {
        return Ok(PeriodResult {
            periodic: false,
            period: None,
            commensurate: None,
            degenerate: false,
            verification_residual: None,
        });
    };
    let Some(g) = rational_gcd(exact.values().copied()) else {
        return Ok(PeriodResult {
            periodic: true,
            period: Some(0.0),
            commensurate: Some(true),
            degenerate: true,
            verification_residual: None,
        });
    };
    let period = TAU * *g.denom() as f64 / *g.numer() as f64;
    let mut residual: f64 = 0.0;
    for theta0 in PERIOD_PROBES {
        let a = family.build_r(theta0)?;
        let b = family.build_r(theta0 + period)?;
        residual = residual.max(linalg::max_abs_diff(&a, &b)?);
    }
    Ok(PeriodResult {
        periodic: residual <= PERIOD_TOL,
        period: Some(period),
        commensurate: Some(true),
        degenerate: false,
        verification_residual: Some(residual),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::ParameterSet;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn n2(mode: Mode) -> BraidFamily {
        let free = BTreeMap::from([
            (ParamKey::new(1, 1, Sign::Plus), 1.0),
            (ParamKey::new(1, 1, Sign::Minus), -1.0),
        ]);
        BraidFamily::new(ParameterSet::new(2, mode, &free).unwrap()).unwrap()
    }

    #[test]
    fn entropy_convention() {
        assert_eq!(entropy_bits(&[1.0, 0.0]), 0.0);
        assert!((entropy_bits(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn n2_quarter_pi_is_maximally_entangled() {
        let rec = apply_to_product(&n2(Mode::Unitary), 1, 1, FRAC_PI_4).unwrap();
        assert_eq!(rec.schmidt_rank, 2);
        for s in &rec.singular_values {
            assert!((s - FRAC_1_SQRT_2).abs() < 1e-15);
        }
        assert!((rec.entropy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_at_zero() {
        let scan = exceptional_scan(&n2(Mode::Unitary), 0.0).unwrap();
        assert_eq!(scan.exceptional.len(), 4);
        assert_eq!(scan.accidental.len(), 4);
        assert_eq!(scan.invariant.len(), 4);
        assert!(scan.records.iter().all(|r| r.entropy == 0.0));
    }

    #[test]
    fn half_pi_is_accidental() {
        // (m⁺ − m⁻)θ = π: a₊ = 0 and every basis state is sent to a single basis state.
        let scan = exceptional_scan(&n2(Mode::Unitary), std::f64::consts::FRAC_PI_2).unwrap();
        assert_eq!(scan.exceptional.len(), 4);
        assert!(scan.structural().is_empty());
    }

    #[test]
    fn real_mode_rejected() {
        assert_eq!(
            apply_to_product(&n2(Mode::Real), 1, 1, 0.3),
            Err(EntangleError::RealMode)
        );
        assert!(exceptional_scan(&n2(Mode::Real), 0.3).is_err());
        assert!(detect_period(&n2(Mode::Real), None).is_err());
        assert!(matches!(
            apply_to_product(&n2(Mode::Unitary), 3, 1, 0.3),
            Err(EntangleError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn rational_gcds() {
        let r = |p, q| Ratio::new(p, q);
        assert_eq!(rational_gcd([r(1, 1), r(2, 1)]), Some(r(1, 1)));
        assert_eq!(rational_gcd([r(1, 2), r(1, 3)]), Some(r(1, 6)));
        assert_eq!(rational_gcd([r(-3, 4), r(0, 1), r(3, 2)]), Some(r(3, 4)));
        assert_eq!(rational_gcd([r(0, 1)]), None);
    }

    #[test]
    fn inexact_parameters_are_undecided() {
        let p = detect_period(&n2(Mode::Unitary), None).unwrap();
        assert!(!p.periodic);
        assert_eq!(p.commensurate, None);
    }
}
