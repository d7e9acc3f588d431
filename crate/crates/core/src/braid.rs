//! Parameter sets, the braid matrix `R̂(θ)`, its generator, and the single-parameter
//! reference family.
//!
//! `R̂(θ) = ½ Σ_{ε,i,j} c(m_ij^(ε), θ) [E_ii⊗E_jj + ε E_iī⊗E_jj̄]` with `c = e^{mθ}` in real
//! mode and `c = e^{imθ}` in unitary mode. The parameters obey
//! `m_ij = m_īj = m_ij̄ = m_īj̄` and, for odd `N`, `m_{n+1,n+1} = 0`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::linalg::{self, kron, matmul, ComplexMatrix, LinalgError, C64};
use crate::projector::{
    build_p, full_family, BarIndex, FamilyKind, Parity, ProjectorError, ProjectorFamily,
    ProjectorKey, Sign,
};

/// Real-mode spectral parameters are confined to `|θ| ≤ REAL_THETA_MAX`.
pub const REAL_THETA_MAX: f64 = 50.0;

/// Tolerance for the runtime checks on the reference family's `P±` and `M`.
pub const REFERENCE_CHECK_TOL: f64 = 1e-13;

pub type ParamKey = ProjectorKey;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BraidError {
    #[error("key {key} is not a canonical representative for N = {side}")]
    NonCanonicalKey { key: ParamKey, side: usize },
    #[error("central parameter m_({c},{c})^({eps}) must be zero for odd N, got {value}")]
    CentralNonZero { c: usize, eps: Sign, value: f64 },
    #[error("parameter {key} is not finite")]
    NonFiniteParameter { key: ParamKey },
    #[error("bar symmetry violated for class {class}: {detail}")]
    SymmetryViolation { class: ParamKey, detail: String },
    #[error("|theta| = {theta} exceeds {max} in real mode")]
    ThetaOutOfRange { theta: f64, max: f64 },
    #[error("operation requires {expected} mode")]
    ModeMismatch { expected: Mode },
    #[error("reference family requires n >= 1")]
    ReferenceHalfDim,
    #[error("reference construction failed: {0}")]
    ReferenceConstruction(String),
    #[error("composition undefined for z1*z2 = 1 (z1 = {z1}, z2 = {z2})")]
    CompositionDomain { z1: f64, z2: f64 },
    #[error(transparent)]
    Projector(#[from] ProjectorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, BraidError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Real,
    Unitary,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Real => "real",
            Mode::Unitary => "unitary",
        })
    }
}

impl Mode {
    /// `e^{mθ}` or `e^{imθ}`.
    pub fn coefficient(self, m: f64, theta: f64) -> C64 {
        match self {
            Mode::Real => C64::new((m * theta).exp(), 0.0),
            Mode::Unitary => C64::from_polar(1.0, m * theta),
        }
    }
}

/// Canonical free-parameter keys: `i, j ≤ ⌈N/2⌉`, both signs, minus the odd-`N` central pair.
pub fn canonical_keys(side: usize) -> Result<Vec<ParamKey>> {
    let bar = BarIndex::new(side)?;
    let h = bar.half_ceil();
    let mut keys = Vec::new();
    for i in 1..=h {
        for j in 1..=h {
            if bar.is_central(i) && bar.is_central(j) {
                continue;
            }
            for eps in Sign::BOTH {
                keys.push(ParamKey::new(i, j, eps));
            }
        }
    }
    Ok(keys)
}

/// Closed-form free-parameter count: `N²/2` for even `N`, `(N+3)(N−1)/2` for odd `N`.
pub fn expected_free_count(side: usize) -> usize {
    if side % 2 == 0 {
        side * side / 2
    } else {
        (side + 3) * (side - 1) / 2
    }
}

/// The full map `(i, j, ε) ↦ m` for `i, j ∈ 1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    bar: BarIndex,
    mode: Mode,
    values: BTreeMap<ParamKey, f64>,
}

impl ParameterSet {
    /// Populates the full map from canonical representatives. Missing classes are zero.
    pub fn new(side: usize, mode: Mode, free: &BTreeMap<ParamKey, f64>) -> Result<Self> {
        let bar = BarIndex::new(side)?;
        let canonical = canonical_keys(side)?;
        for (&key, &value) in free {
            if !value.is_finite() {
                return Err(BraidError::NonFiniteParameter { key });
            }
            if let Some(c) = bar.central() {
                if key.i == c && key.j == c {
                    if value != 0.0 {
                        return Err(BraidError::CentralNonZero {
                            c,
                            eps: key.epsilon,
                            value,
                        });
                    }
                    continue;
                }
            }
            if !canonical.contains(&key) {
                return Err(BraidError::NonCanonicalKey { key, side });
            }
        }
        let mut values = BTreeMap::new();
        for i in 1..=side {
            for j in 1..=side {
                for eps in Sign::BOTH {
                    let class = ParamKey::new(bar.canonical(i), bar.canonical(j), eps);
                    let v = free.get(&class).copied().unwrap_or(0.0);
                    values.insert(ParamKey::new(i, j, eps), v);
                }
            }
        }
        Ok(ParameterSet { bar, mode, values })
    }

    /// Sets one entry of the full map without touching its bar images. The result generally
    /// violates the symmetry constraint; it exists to build negative controls.
    pub fn with_unchecked_entry(&self, key: ParamKey, value: f64) -> Result<Self> {
        self.bar.check(key.i)?;
        self.bar.check(key.j)?;
        let mut out = self.clone();
        out.values.insert(key, value);
        Ok(out)
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        ParameterSet {
            mode,
            ..self.clone()
        }
    }

    pub fn side(&self) -> usize {
        self.bar.side()
    }

    pub fn bar(&self) -> BarIndex {
        self.bar
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `m_ij^(ε)`, 1-based.
    pub fn m(&self, i: usize, j: usize, eps: Sign) -> f64 {
        self.values[&ParamKey::new(i, j, eps)]
    }

    pub fn get(&self, key: &ParamKey) -> f64 {
        self.m(key.i, key.j, key.epsilon)
    }

    pub fn full_map(&self) -> &BTreeMap<ParamKey, f64> {
        &self.values
    }

    /// Canonical representatives and their values.
    pub fn free_values(&self) -> BTreeMap<ParamKey, f64> {
        canonical_keys(self.side())
            .expect("side validated")
            .into_iter()
            .map(|k| (k, self.get(&k)))
            .collect()
    }

    pub fn free_count(&self) -> usize {
        canonical_keys(self.side()).expect("side validated").len()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.values().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Checks bar symmetry and the odd-`N` central constraint on the full map.
    pub fn validate_symmetry(&self) -> Result<()> {
        let bar = self.bar;
        for (&key, &v) in &self.values {
            let (ib, jb) = (bar.bar(key.i), bar.bar(key.j));
            for (a, b) in [(ib, key.j), (key.i, jb), (ib, jb)] {
                let w = self.m(a, b, key.epsilon);
                if w != v {
                    return Err(BraidError::SymmetryViolation {
                        class: ParamKey::new(
                            bar.canonical(key.i),
                            bar.canonical(key.j),
                            key.epsilon,
                        ),
                        detail: format!("m{key} = {v} but m({a},{b},{}) = {w}", key.epsilon),
                    });
                }
            }
            if bar.is_central(key.i) && bar.is_central(key.j) && v != 0.0 {
                return Err(BraidError::CentralNonZero {
                    c: key.i,
                    eps: key.epsilon,
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// Short hex digest of `(N, mode, full map)`, stable across platforms.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.side() as u64).to_le_bytes());
        h.update(self.mode.to_string().as_bytes());
        for (k, v) in &self.values {
            h.update((k.i as u64).to_le_bytes());
            h.update((k.j as u64).to_le_bytes());
            h.update([matches!(k.epsilon, Sign::Plus) as u8]);
            h.update(v.to_bits().to_le_bytes());
        }
        let out = h.finalize();
        out.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// A parameter set bound to its unified projector basis.
#[derive(Debug, Clone)]
pub struct BraidFamily {
    params: ParameterSet,
    basis: ProjectorFamily,
}

impl BraidFamily {
    pub fn new(params: ParameterSet) -> Result<Self> {
        let basis = full_family(params.side(), FamilyKind::Unified)?;
        Ok(BraidFamily { params, basis })
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn basis(&self) -> &ProjectorFamily {
        &self.basis
    }

    pub fn side(&self) -> usize {
        self.params.side()
    }

    pub fn mode(&self) -> Mode {
        self.params.mode()
    }

    fn check_theta(&self, theta: f64) -> Result<()> {
        if self.mode() == Mode::Real && !(theta.abs() <= REAL_THETA_MAX) {
            return Err(BraidError::ThetaOutOfRange {
                theta,
                max: REAL_THETA_MAX,
            });
        }
        Ok(())
    }

    /// `R̂(θ)` from the single-expression form, summing all `2N²` elementary terms.
    pub fn build_r(&self, theta: f64) -> Result<ComplexMatrix> {
        self.check_theta(theta)?;
        let side = self.side();
        let bar = self.params.bar();
        let idx = |a: usize, b: usize| (a - 1) * side + (b - 1);
        let mut r = ComplexMatrix::zeros(side * side);
        for (key, &m) in self.params.full_map() {
            let c = self.mode().coefficient(m, theta) * 0.5;
            let (i, j) = (key.i, key.j);
            let row = idx(i, j);
            r[(row, row)] += c;
            r[(row, idx(bar.bar(i), bar.bar(j)))] += c * key.epsilon.value();
        }
        if !r.is_finite() {
            return Err(LinalgError::NonFinite { index: 0 }.into());
        }
        Ok(r)
    }

    /// `R̂(θ) = Σ_{ε} Σ_{i,j ≤ n} c(m_ij^(ε)) (P_ij^(ε) + P_ij̄^(ε))`, even `N` only.
    pub fn build_r_even(&self, theta: f64) -> Result<ComplexMatrix> {
        self.check_theta(theta)?;
        let bar = self.params.bar();
        if bar.parity() != Parity::Even {
            return Err(ProjectorError::ParityMismatch {
                kind: FamilyKind::P,
                side: self.side(),
            }
            .into());
        }
        let n = bar.n_half();
        let mut r = ComplexMatrix::zeros(self.side() * self.side());
        for eps in Sign::BOTH {
            for i in 1..=n {
                for j in 1..=n {
                    let c = self.mode().coefficient(self.params.m(i, j, eps), theta);
                    let pair = build_p(ProjectorKey::new(i, j, eps), n)?
                        .add(&build_p(ProjectorKey::new(i, bar.bar(j), eps), n)?)?;
                    r.add_scaled(c, &pair)?;
                }
            }
        }
        Ok(r)
    }

    /// `R̂(θ) = Σ_k c(m_k, θ) P_k` over the unified basis (spectral form).
    pub fn build_r_spectral(&self, theta: f64) -> Result<ComplexMatrix> {
        self.check_theta(theta)?;
        let mut r = ComplexMatrix::zeros(self.side() * self.side());
        for (key, p) in self.basis.members() {
            r.add_scaled(self.mode().coefficient(self.params.get(key), theta), p)?;
        }
        Ok(r)
    }

    /// `X = ½ Σ m_ij^(ε) [E_ii⊗E_jj + ε E_iī⊗E_jj̄]`, times `i` in unitary mode.
    pub fn build_generator(&self) -> Generator {
        let side = self.side();
        let bar = self.params.bar();
        let idx = |a: usize, b: usize| (a - 1) * side + (b - 1);
        let unit = match self.mode() {
            Mode::Real => C64::new(1.0, 0.0),
            Mode::Unitary => C64::new(0.0, 1.0),
        };
        let mut x = ComplexMatrix::zeros(side * side);
        for (key, &m) in self.params.full_map() {
            let c = unit * (0.5 * m);
            let row = idx(key.i, key.j);
            x[(row, row)] += c;
            x[(row, idx(bar.bar(key.i), bar.bar(key.j)))] += c * key.epsilon.value();
        }
        Generator {
            side,
            mode: self.mode(),
            matrix: x,
        }
    }

    /// `Σ_k m_k^power P_k` over the unified basis (times `i^power` in unitary mode); equals
    /// `X^power` by orthogonality of the basis.
    pub fn generator_power_spectral(&self, power: u32) -> ComplexMatrix {
        let unit = match self.mode() {
            Mode::Real => C64::new(1.0, 0.0),
            Mode::Unitary => C64::new(0.0, 1.0),
        };
        let mut out = ComplexMatrix::zeros(self.side() * self.side());
        for (key, p) in self.basis.members() {
            let c = (unit * self.params.get(key)).powu(power);
            out.add_scaled(c, p).expect("basis members share dim");
        }
        out
    }

    /// Eigenvalue multiset `{c(m_k, θ)}` over the unified basis.
    pub fn spectrum(&self, theta: f64) -> Vec<C64> {
        self.basis
            .members()
            .iter()
            .map(|(key, _)| self.mode().coefficient(self.params.get(key), theta))
            .collect()
    }

    /// `R̂₁₂ = R̂ ⊗ I` and `R̂₂₃ = I ⊗ R̂` for a matrix on the two-fold space.
    pub fn lift(&self, r: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let id = ComplexMatrix::identity(self.side());
        Ok((kron(r, &id)?, kron(&id, r)?))
    }
}

/// `X` with `R̂(θ) = e^{θX}`.
#[derive(Debug, Clone)]
pub struct Generator {
    side: usize,
    mode: Mode,
    matrix: ComplexMatrix,
}

impl Generator {
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Real mode: largest imaginary part. Unitary mode: `max |X† + X|`.
    pub fn invariant_residual(&self) -> f64 {
        match self.mode {
            Mode::Real => self.matrix.max_imag(),
            Mode::Unitary => linalg::dagger(&self.matrix)
                .add(&self.matrix)
                .expect("same dim")
                .max_abs(),
        }
    }

    /// `X^power` by repeated multiplication.
    pub fn power(&self, power: u32) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::identity(self.matrix.dim());
        for _ in 0..power {
            out = matmul(&out, &self.matrix)?;
        }
        Ok(out)
    }

    pub fn exp(&self, theta: f64) -> Result<ComplexMatrix> {
        Ok(linalg::matrix_exponential(&self.matrix.scale_real(theta))?)
    }
}

/// Sparsity and symmetry of a braid matrix on `C^N ⊗ C^N`.
///
/// Nonzeros may only sit on the diagonal `(a,b),(a,b)` and the anti-diagonal
/// `(a,b),(ā,b̄)`; both are constant along the orbit `(a,b) ~ (ā,b) ~ (a,b̄) ~ (ā,b̄)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockStructure {
    pub side: usize,
    /// Largest modulus found outside the diagonal and anti-diagonal.
    pub off_pattern_max: f64,
    /// Largest mismatch of diagonal or anti-diagonal entries within a bar orbit.
    pub symmetry_max: f64,
    pub violations: Vec<String>,
    pub conforms: bool,
}

pub fn block_structure(r: &ComplexMatrix, side: usize, tol: f64) -> Result<BlockStructure> {
    let bar = BarIndex::new(side)?;
    if r.dim() != side * side {
        return Err(LinalgError::DimensionMismatch {
            left: r.dim(),
            right: side * side,
        }
        .into());
    }
    let dim = side * side;
    let idx = |a: usize, b: usize| (a - 1) * side + (b - 1);
    let mut report = BlockStructure {
        side,
        off_pattern_max: 0.0,
        symmetry_max: 0.0,
        violations: Vec::new(),
        conforms: true,
    };
    for row in 0..dim {
        for col in 0..dim {
            if col == row || col == dim - 1 - row {
                continue;
            }
            let v = r[(row, col)].norm();
            report.off_pattern_max = report.off_pattern_max.max(v);
            if v > tol {
                report.violations.push(format!(
                    "nonzero {v:e} at ({}, {}) off pattern",
                    row + 1,
                    col + 1
                ));
            }
        }
    }
    for a in 1..=side {
        for b in 1..=side {
            let k = idx(a, b);
            let diag = r[(k, k)];
            let anti = r[(k, dim - 1 - k)];
            for (a2, b2) in [(bar.bar(a), b), (a, bar.bar(b)), (bar.bar(a), bar.bar(b))] {
                let k2 = idx(a2, b2);
                let dd = (r[(k2, k2)] - diag).norm();
                let da = (r[(k2, dim - 1 - k2)] - anti).norm();
                let d = dd.max(da);
                report.symmetry_max = report.symmetry_max.max(d);
                if d > tol {
                    report.violations.push(format!(
                        "entries at ({a},{b}) and ({a2},{b2}) differ by {d:e}"
                    ));
                }
            }
        }
    }
    report.conforms = report.violations.is_empty();
    Ok(report)
}

/// The single-parameter family `R̂(z) = I + zM` on `C^{2n} ⊗ C^{2n}`, assembled from the `Q`
/// projectors: `P± = Σ_{ε=±} Q`, `M = s·(−i)(P₊ − P₋)`, with the sign `s` fixed by matching
/// the phase form `e^{iφ}P₊ + e^{−iφ}P₋` at small positive `z`.
#[derive(Debug, Clone)]
pub struct ReferenceFamily {
    n: usize,
    p_plus: ComplexMatrix,
    p_minus: ComplexMatrix,
    m: ComplexMatrix,
    sign: f64,
}

/// Residuals of the runtime checks performed on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceChecks {
    pub projector_algebra: f64,
    pub m_imag: f64,
    pub m_square_plus_identity: f64,
}

impl ReferenceFamily {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(BraidError::ReferenceHalfDim);
        }
        let q = full_family(2 * n, FamilyKind::Q)?;
        let p_plus = q.sum_with_sign(Sign::Plus);
        let p_minus = q.sum_with_sign(Sign::Minus);
        let base = p_plus.sub(&p_minus)?.scale(C64::new(0.0, -1.0));

        let z = 1e-3;
        let phase = phase_form(&p_plus, &p_minus, z)?;
        let norm = (1.0 + z * z).sqrt().recip();
        let id = ComplexMatrix::identity(4 * n * n);
        let residual = |s: f64| -> Result<f64> {
            let mut lin = id.clone();
            lin.add_scaled(C64::new(s * z, 0.0), &base)?;
            Ok(linalg::max_abs_diff(&phase, &lin.scale_real(norm))?)
        };
        let sign = if residual(1.0)? <= residual(-1.0)? {
            1.0
        } else {
            -1.0
        };
        let family = ReferenceFamily {
            n,
            p_plus,
            p_minus,
            m: base.scale_real(sign),
            sign,
        };
        let checks = family.checks()?;
        if checks.projector_algebra > REFERENCE_CHECK_TOL
            || checks.m_imag > REFERENCE_CHECK_TOL
            || checks.m_square_plus_identity > REFERENCE_CHECK_TOL
        {
            return Err(BraidError::ReferenceConstruction(format!(
                "P± regrouping failed its checks: {checks:?}"
            )));
        }
        Ok(family)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p_plus(&self) -> &ComplexMatrix {
        &self.p_plus
    }

    pub fn p_minus(&self) -> &ComplexMatrix {
        &self.p_minus
    }

    /// The real matrix `M` (`M² = −I`).
    pub fn m(&self) -> &ComplexMatrix {
        &self.m
    }

    /// `+1` if `M = −i(P₊ − P₋)`, `−1` if the opposite sign was needed.
    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn checks(&self) -> Result<ReferenceChecks> {
        let dim = 4 * self.n * self.n;
        let id = ComplexMatrix::identity(dim);
        let pp = &self.p_plus;
        let pm = &self.p_minus;
        let algebra = [
            linalg::max_abs_diff(&pp.add(pm)?, &id)?,
            linalg::max_abs_diff(&matmul(pp, pp)?, pp)?,
            linalg::max_abs_diff(&matmul(pm, pm)?, pm)?,
            matmul(pp, pm)?.max_abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let m2 = matmul(&self.m, &self.m)?;
        Ok(ReferenceChecks {
            projector_algebra: algebra,
            m_imag: self.m.max_imag(),
            m_square_plus_identity: m2.add(&id)?.max_abs(),
        })
    }

    /// `I + zM`.
    pub fn linear(&self, z: f64) -> ComplexMatrix {
        let mut out = ComplexMatrix::identity(self.m.dim());
        out.add_scaled(C64::new(z, 0.0), &self.m).expect("same dim");
        out
    }

    /// `e^{iφ}P₊ + e^{−iφ}P₋` with `e^{iφ} = ((1 − iz)/(1 + iz))^{1/2}`, principal branch.
    pub fn phase_form(&self, z: f64) -> Result<ComplexMatrix> {
        phase_form(&self.p_plus, &self.p_minus, z)
    }

    /// `(1 + z²)^{-1/2}`, the scalar relating the linear and phase forms.
    pub fn normalization(z: f64) -> f64 {
        (1.0 + z * z).sqrt().recip()
    }

    /// `X = i(P₊ − P₋)`; `e^{φX}` reproduces the phase form.
    pub fn generator(&self) -> ComplexMatrix {
        self.p_plus
            .sub(&self.p_minus)
            .expect("same dim")
            .scale(C64::new(0.0, 1.0))
    }

    /// `φ` with `e^{iφ} = ((1 − iz)/(1 + iz))^{1/2}` on the principal branch.
    pub fn phase_angle(z: f64) -> f64 {
        principal_phase(z).arg()
    }

    /// `(z₃, λ)` with `R̂(z₁)R̂(z₂) = λ R̂(z₃)`: `z₃ = (z₁+z₂)/(1−z₁z₂)`, `λ = 1 − z₁z₂`.
    pub fn compose(z1: f64, z2: f64) -> Result<(f64, f64)> {
        let scalar = 1.0 - z1 * z2;
        if scalar == 0.0 {
            return Err(BraidError::CompositionDomain { z1, z2 });
        }
        Ok(((z1 + z2) / scalar, scalar))
    }
}

fn principal_phase(z: f64) -> C64 {
    let ratio = C64::new(1.0, -z) / C64::new(1.0, z);
    ratio.sqrt()
}

fn phase_form(p_plus: &ComplexMatrix, p_minus: &ComplexMatrix, z: f64) -> Result<ComplexMatrix> {
    let e = principal_phase(z);
    let mut out = p_plus.scale(e);
    out.add_scaled(e.conj(), p_minus)?;
    Ok(out)
}

/// Bar-orbit size of a canonical class (number of `(i,j)` sharing its parameter).
pub fn orbit_size(bar: BarIndex, key: &ParamKey) -> usize {
    let ci = if bar.is_central(key.i) { 1 } else { 2 };
    let cj = if bar.is_central(key.j) { 1 } else { 2 };
    ci * cj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use std::f64::consts::{FRAC_PI_2, LN_2};

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn n2(mode: Mode) -> BraidFamily {
        let free = BTreeMap::from([
            (ParamKey::new(1, 1, Sign::Plus), 1.0),
            (ParamKey::new(1, 1, Sign::Minus), -1.0),
        ]);
        BraidFamily::new(ParameterSet::new(2, mode, &free).unwrap()).unwrap()
    }

    fn eq_2_6(ap: C64, am: C64) -> ComplexMatrix {
        let z = re(0.0);
        ComplexMatrix::new(
            4,
            vec![
                ap, z, z, am, //
                z, ap, am, z, //
                z, am, ap, z, //
                am, z, z, ap,
            ],
        )
        .unwrap()
    }

    #[test]
    fn free_counts() {
        for side in 2..=9 {
            assert_eq!(
                canonical_keys(side).unwrap().len(),
                expected_free_count(side)
            );
        }
        assert_eq!(expected_free_count(2), 2);
        assert_eq!(expected_free_count(3), 6);
    }

    #[test]
    fn n2_params_fill_bar_images() {
        let p = n2(Mode::Real).params().clone();
        assert_eq!(p.free_count(), 2);
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            assert_eq!(p.m(i, j, Sign::Plus), 1.0);
            assert_eq!(p.m(i, j, Sign::Minus), -1.0);
        }
        p.validate_symmetry().unwrap();
    }

    #[test]
    fn n3_constraints() {
        let keys = canonical_keys(3).unwrap();
        assert_eq!(keys.len(), 6);
        let free: BTreeMap<_, _> = keys.iter().map(|&k| (k, 0.5)).collect();
        let p = ParameterSet::new(3, Mode::Real, &free).unwrap();
        assert_eq!(p.m(2, 2, Sign::Plus), 0.0);
        assert_eq!(p.m(3, 2, Sign::Minus), 0.5);

        let bad = BTreeMap::from([(ParamKey::new(2, 2, Sign::Plus), 0.3)]);
        assert!(matches!(
            ParameterSet::new(3, Mode::Real, &bad),
            Err(BraidError::CentralNonZero { c: 2, .. })
        ));
        let zero_central = BTreeMap::from([(ParamKey::new(2, 2, Sign::Plus), 0.0)]);
        assert!(ParameterSet::new(3, Mode::Real, &zero_central).is_ok());

        let non_canonical = BTreeMap::from([(ParamKey::new(1, 3, Sign::Plus), 0.3)]);
        assert!(matches!(
            ParameterSet::new(3, Mode::Real, &non_canonical),
            Err(BraidError::NonCanonicalKey { .. })
        ));
    }

    #[test]
    fn unchecked_entry_breaks_symmetry() {
        let p = n2(Mode::Real).params().clone();
        let broken = p
            .with_unchecked_entry(ParamKey::new(1, 2, Sign::Plus), 3.0)
            .unwrap();
        assert!(matches!(
            broken.validate_symmetry(),
            Err(BraidError::SymmetryViolation { .. })
        ));
        assert_ne!(p.digest(), broken.digest());
    }

    #[test]
    fn n2_real_at_ln2() {
        // a± = ½(e^θ ± e^{−θ}) = ½(2 ± ½)
        let r = n2(Mode::Real).build_r(LN_2).unwrap();
        let expect = eq_2_6(re(1.25), re(0.75));
        assert!(max_abs_diff(&r, &expect).unwrap() < 1e-15);
    }

    #[test]
    fn n2_unitary_at_half_pi() {
        let r = n2(Mode::Unitary).build_r(FRAC_PI_2).unwrap();
        let expect = eq_2_6(re(0.0), C64::new(0.0, 1.0));
        assert!(max_abs_diff(&r, &expect).unwrap() < 1e-15);
    }

    #[test]
    fn identity_at_zero() {
        for side in 2..=5 {
            let keys = canonical_keys(side).unwrap();
            let free = keys
                .iter()
                .enumerate()
                .map(|(k, &key)| (key, k as f64 * 0.3 - 1.0))
                .collect();
            for mode in [Mode::Real, Mode::Unitary] {
                let fam = BraidFamily::new(ParameterSet::new(side, mode, &free).unwrap()).unwrap();
                assert_eq!(
                    fam.build_r(0.0).unwrap(),
                    ComplexMatrix::identity(side * side)
                );
            }
        }
    }

    #[test]
    fn real_theta_guard() {
        let fam = n2(Mode::Real);
        assert!(matches!(
            fam.build_r(51.0),
            Err(BraidError::ThetaOutOfRange { .. })
        ));
        assert!(fam.build_r(f64::NAN).is_err());
        assert!(n2(Mode::Unitary).build_r(100.0).is_ok());
    }

    #[test]
    fn n2_generator() {
        let x = n2(Mode::Real).build_generator();
        let expect = eq_2_6(re(0.0), re(1.0));
        assert_eq!(x.matrix(), &expect);
        assert_eq!(x.power(2).unwrap(), ComplexMatrix::identity(4));
        assert_eq!(x.invariant_residual(), 0.0);

        let zero = BraidFamily::new(ParameterSet::new(4, Mode::Unitary, &BTreeMap::new()).unwrap())
            .unwrap()
            .build_generator();
        assert_eq!(zero.matrix().max_abs(), 0.0);
    }

    #[test]
    fn block_structure_n2_and_identity() {
        let r = n2(Mode::Real).build_r(0.37).unwrap();
        let s = block_structure(&r, 2, 1e-14).unwrap();
        assert!(s.conforms, "{:?}", s.violations);
        let id = block_structure(&ComplexMatrix::identity(9), 3, 1e-14).unwrap();
        assert!(id.conforms);
        let mut bad = ComplexMatrix::identity(4);
        bad[(0, 1)] = re(0.5);
        assert!(!block_structure(&bad, 2, 1e-14).unwrap().conforms);
    }

    #[test]
    fn reference_n1_basics() {
        let fam = ReferenceFamily::new(1).unwrap();
        assert_eq!(fam.linear(0.0), ComplexMatrix::identity(4));
        assert_eq!(fam.sign(), 1.0);
        let z = 0.7;
        let lin = fam.linear(z);
        let gram = matmul(&lin.transpose(), &lin).unwrap();
        let expect = ComplexMatrix::identity(4).scale_real(1.0 + z * z);
        assert!(max_abs_diff(&gram, &expect).unwrap() < 1e-15);
        assert_eq!(lin.max_imag(), 0.0);
    }

    #[test]
    fn composition_scalar() {
        let (z3, s) = ReferenceFamily::compose(0.5, 0.5).unwrap();
        assert_eq!(s, 0.75);
        assert!((z3 - 4.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            ReferenceFamily::compose(2.0, 0.5),
            Err(BraidError::CompositionDomain { .. })
        ));
    }
}
