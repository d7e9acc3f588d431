//! Projector families on the two-fold tensor space `C^N ⊗ C^N`.
//!
//! Indices are 1-based throughout, and `bar(i) = N + 1 - i`. Three families are built:
//!
//! * `P`: for even `N = 2n`, the rank-1 projectors onto `(|i,j⟩ + ε|ī,j̄⟩)/√2` with
//!   `i ≤ n` and `j` over all of `1..=2n`.
//! * `Unified`: for any `N`, the same projectors but assembled from the elementary terms
//!   `½[E_ii⊗E_jj + ε E_iī⊗E_jj̄]`, grouped as `(i,j)` with `(ī,j̄)`. For odd `N` the
//!   central pair `(n+1, n+1)` is self-conjugate and contributes the single projector
//!   `E_cc⊗E_cc`.
//! * `Q`: for even `N`, the Hermitian projectors carrying the phase `ε·i·(-1)^j̄` on their
//!   off-diagonal pair, used to assemble the reference single-parameter family.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, dagger, kron, matmul, ComplexMatrix, ComplexVector, LinalgError, C64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectorError {
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("matrix side must be at least 2, got {0}")]
    DimTooSmall(usize),
    #[error("{kind} family requires even N, got N = {side}")]
    ParityMismatch { kind: FamilyKind, side: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, ProjectorError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// The index involution `i ↦ N + 1 - i` on `1..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BarIndex {
    side: usize,
}

impl BarIndex {
    pub fn new(side: usize) -> Result<Self> {
        if side < 2 {
            return Err(ProjectorError::DimTooSmall(side));
        }
        Ok(BarIndex { side })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// `n` with `N = 2n` or `N = 2n + 1`.
    pub fn n_half(&self) -> usize {
        self.side / 2
    }

    pub fn parity(&self) -> Parity {
        if self.side % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `⌈N/2⌉`, the largest canonical index.
    pub fn half_ceil(&self) -> usize {
        self.side.div_ceil(2)
    }

    pub fn bar(&self, i: usize) -> usize {
        debug_assert!((1..=self.side).contains(&i));
        self.side + 1 - i
    }

    /// The self-conjugate index `n + 1`, present only for odd `N`.
    pub fn central(&self) -> Option<usize> {
        (self.parity() == Parity::Odd).then_some(self.n_half() + 1)
    }

    pub fn is_central(&self, i: usize) -> bool {
        self.central() == Some(i)
    }

    /// Orbit representative `min(i, ī)`.
    pub fn canonical(&self, i: usize) -> usize {
        i.min(self.bar(i))
    }

    pub fn check(&self, i: usize) -> Result<usize> {
        check_index(i, self.side)
    }
}

fn check_index(i: usize, max: usize) -> Result<usize> {
    if (1..=max).contains(&i) {
        Ok(i)
    } else {
        Err(ProjectorError::IndexOutOfRange { index: i, max })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjectorKey {
    pub i: usize,
    pub j: usize,
    pub epsilon: Sign,
}

impl ProjectorKey {
    pub fn new(i: usize, j: usize, epsilon: Sign) -> Self {
        ProjectorKey { i, j, epsilon }
    }
}

impl fmt::Display for ProjectorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.i, self.j, self.epsilon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    P,
    #[serde(rename = "unified")]
    Unified,
    Q,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::P => "P",
            FamilyKind::Unified => "unified",
            FamilyKind::Q => "Q",
        })
    }
}

/// `E_ab`, the `N × N` matrix unit.
pub fn matrix_unit(a: usize, b: usize, side: usize) -> Result<ComplexMatrix> {
    check_index(a, side)?;
    check_index(b, side)?;
    let mut m = ComplexMatrix::zeros(side);
    m[(a - 1, b - 1)] = C64::new(1.0, 0.0);
    Ok(m)
}

/// `E_ab ⊗ E_cd`.
fn unit_pair(a: usize, b: usize, c: usize, d: usize, side: usize) -> Result<ComplexMatrix> {
    Ok(kron(&matrix_unit(a, b, side)?, &matrix_unit(c, d, side)?)?)
}

fn even_bar(n: usize, key: &ProjectorKey, kind: FamilyKind) -> Result<BarIndex> {
    let bar = BarIndex::new(2 * n)?;
    if n == 0 {
        return Err(ProjectorError::ParityMismatch { kind, side: 0 });
    }
    check_index(key.i, n)?;
    check_index(key.j, 2 * n)?;
    Ok(bar)
}

/// `P_ij^(ε) = ½[E_ii⊗E_jj + E_īī⊗E_j̄j̄ + ε(E_iī⊗E_jj̄ + E_īi⊗E_j̄j)]` for `N = 2n`,
/// `i ∈ 1..=n`, `j ∈ 1..=2n`.
pub fn build_p(key: ProjectorKey, n: usize) -> Result<ComplexMatrix> {
    let bar = even_bar(n, &key, FamilyKind::P)?;
    let side = bar.side();
    let (i, j) = (key.i, key.j);
    let (ib, jb) = (bar.bar(i), bar.bar(j));
    let eps = C64::new(key.epsilon.value(), 0.0);
    let half = C64::new(0.5, 0.0);

    let mut m = unit_pair(i, i, j, j, side)?;
    m.add_scaled(C64::new(1.0, 0.0), &unit_pair(ib, ib, jb, jb, side)?)?;
    m.add_scaled(eps, &unit_pair(i, ib, j, jb, side)?)?;
    m.add_scaled(eps, &unit_pair(ib, i, jb, j, side)?)?;
    Ok(m.scale(half))
}

/// Elementary term `½[E_ii⊗E_jj + ε E_iī⊗E_jj̄]` of the single-expression form valid for
/// both parities. These are not projectors on their own.
pub fn build_unified_term(i: usize, j: usize, epsilon: Sign, side: usize) -> Result<ComplexMatrix> {
    let bar = BarIndex::new(side)?;
    bar.check(i)?;
    bar.check(j)?;
    let mut m = unit_pair(i, i, j, j, side)?;
    m.add_scaled(
        C64::new(epsilon.value(), 0.0),
        &unit_pair(i, bar.bar(i), j, bar.bar(j), side)?,
    )?;
    Ok(m.scale_real(0.5))
}

/// `Q_ij^(ε) = ½[E_ii⊗E_jj + E_īī⊗E_j̄j̄ + ε·i·(-1)^j̄ (E_iī⊗E_jj̄ − E_īi⊗E_j̄j)]` for
/// `N = 2n`, `i ∈ 1..=n`, `j ∈ 1..=2n`. Taking `j > n` gives the `j ↔ j̄` companion.
pub fn build_q(key: ProjectorKey, n: usize) -> Result<ComplexMatrix> {
    let bar = even_bar(n, &key, FamilyKind::Q)?;
    let side = bar.side();
    let (i, j) = (key.i, key.j);
    let (ib, jb) = (bar.bar(i), bar.bar(j));
    let sign_jbar = if jb % 2 == 0 { 1.0 } else { -1.0 };
    let coeff = C64::new(0.0, key.epsilon.value() * sign_jbar);

    let mut m = unit_pair(i, i, j, j, side)?;
    m.add_scaled(C64::new(1.0, 0.0), &unit_pair(ib, ib, jb, jb, side)?)?;
    m.add_scaled(coeff, &unit_pair(i, ib, j, jb, side)?)?;
    m.add_scaled(-coeff, &unit_pair(ib, i, jb, j, side)?)?;
    Ok(m.scale_real(0.5))
}

/// Unified-family member for a canonical key: the sum of the elementary terms at `(i,j)`
/// and `(ī,j̄)`, or the single central term for odd `N`.
fn build_unified_member(key: ProjectorKey, bar: BarIndex) -> Result<ComplexMatrix> {
    let side = bar.side();
    let (ib, jb) = (bar.bar(key.i), bar.bar(key.j));
    let mut m = build_unified_term(key.i, key.j, key.epsilon, side)?;
    if (ib, jb) != (key.i, key.j) {
        m.add_scaled(
            C64::new(1.0, 0.0),
            &build_unified_term(ib, jb, key.epsilon, side)?,
        )?;
    }
    Ok(m)
}

/// Keys of the full family, in deterministic order.
///
/// `P`/`Q`: `i ∈ 1..=n`, `j ∈ 1..=2n`, both signs. `Unified`: one key per `(i,j) ~ (ī,j̄)`
/// orbit with the representative having `i < ī`, or `i = ī` and `j < j̄`; the odd-`N`
/// central orbit only carries `ε = +` (its `ε = −` term vanishes identically).
pub fn family_keys(side: usize, kind: FamilyKind) -> Result<Vec<ProjectorKey>> {
    let bar = BarIndex::new(side)?;
    if kind != FamilyKind::Unified && bar.parity() == Parity::Odd {
        return Err(ProjectorError::ParityMismatch { kind, side });
    }
    let n = bar.n_half();
    let mut keys = Vec::with_capacity(side * side);
    for i in 1..=bar.half_ceil() {
        for j in 1..=side {
            if bar.is_central(i) {
                if j > bar.bar(j) {
                    continue;
                }
                if bar.is_central(j) {
                    keys.push(ProjectorKey::new(i, j, Sign::Plus));
                    continue;
                }
            }
            debug_assert!(i <= n || bar.is_central(i));
            for eps in Sign::BOTH {
                keys.push(ProjectorKey::new(i, j, eps));
            }
        }
    }
    Ok(keys)
}

/// Normalized image vector of a rank-1 `P`/`Unified` member, `(|i,j⟩ + ε|ī,j̄⟩)/√2`
/// (or `|c,c⟩` for the odd-`N` central key).
pub fn image_vector(key: ProjectorKey, side: usize) -> Result<ComplexVector> {
    let bar = BarIndex::new(side)?;
    bar.check(key.i)?;
    bar.check(key.j)?;
    let idx = |a: usize, b: usize| (a - 1) * side + (b - 1);
    let (ib, jb) = (bar.bar(key.i), bar.bar(key.j));
    let mut v = vec![C64::new(0.0, 0.0); side * side];
    if (ib, jb) == (key.i, key.j) {
        v[idx(key.i, key.j)] = C64::new(1.0, 0.0);
    } else {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        v[idx(key.i, key.j)] = C64::new(h, 0.0);
        v[idx(ib, jb)] = C64::new(key.epsilon.value() * h, 0.0);
    }
    Ok(ComplexVector::new(v)?)
}

/// A complete family of mutually orthogonal rank-1 projectors on `C^N ⊗ C^N`.
#[derive(Debug, Clone)]
pub struct ProjectorFamily {
    side: usize,
    kind: FamilyKind,
    members: Vec<(ProjectorKey, ComplexMatrix)>,
}

/// Worst-case residuals of the family's algebra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgebraResiduals {
    /// `max |P² − P|`
    pub idempotency: f64,
    /// `max |P·P′|` over ordered pairs of distinct members
    pub orthogonality: f64,
    /// `max |Σ P − I|`
    pub completeness: f64,
    /// `max |tr P − 1|`
    pub unit_trace: f64,
    /// `max |P† − P|`
    pub hermiticity: f64,
}

impl AlgebraResiduals {
    pub fn max(&self) -> f64 {
        [
            self.idempotency,
            self.orthogonality,
            self.completeness,
            self.unit_trace,
            self.hermiticity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Serialize)]
struct FamilyJson<'a> {
    #[serde(rename = "N")]
    side: usize,
    kind: FamilyKind,
    members: Vec<MemberJson<'a>>,
}

#[derive(Serialize)]
struct MemberJson<'a> {
    i: usize,
    j: usize,
    epsilon: Sign,
    matrix: &'a ComplexMatrix,
}

impl ProjectorFamily {
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = ProjectorKey> + '_ {
        self.members.iter().map(|(k, _)| *k)
    }

    pub fn members(&self) -> &[(ProjectorKey, ComplexMatrix)] {
        &self.members
    }

    pub fn get(&self, key: &ProjectorKey) -> Option<&ComplexMatrix> {
        self.members.iter().find(|(k, _)| k == key).map(|(_, m)| m)
    }

    /// Sum of all members with the given sign.
    pub fn sum_with_sign(&self, eps: Sign) -> ComplexMatrix {
        let dim = self.side * self.side;
        let mut sum = ComplexMatrix::zeros(dim);
        for (_, m) in self.members.iter().filter(|(k, _)| k.epsilon == eps) {
            sum.add_scaled(C64::new(1.0, 0.0), m)
                .expect("members share dim");
        }
        sum
    }

    pub fn sum(&self) -> ComplexMatrix {
        self.sum_with_sign(Sign::Plus)
            .add(&self.sum_with_sign(Sign::Minus))
            .expect("members share dim")
    }

    pub fn algebra_residuals(&self) -> AlgebraResiduals {
        let dim = self.side * self.side;
        let mut r = AlgebraResiduals {
            idempotency: 0.0,
            orthogonality: 0.0,
            completeness: 0.0,
            unit_trace: 0.0,
            hermiticity: 0.0,
        };
        for (a, (_, p)) in self.members.iter().enumerate() {
            let sq = matmul(p, p).expect("members share dim");
            r.idempotency = r
                .idempotency
                .max(linalg::max_abs_diff(&sq, p).expect("dim"));
            r.unit_trace = r.unit_trace.max((p.trace() - C64::new(1.0, 0.0)).norm());
            r.hermiticity = r
                .hermiticity
                .max(linalg::max_abs_diff(&dagger(p), p).expect("dim"));
            for (b, (_, q)) in self.members.iter().enumerate() {
                if a != b {
                    let prod = matmul(p, q).expect("members share dim");
                    r.orthogonality = r.orthogonality.max(prod.max_abs());
                }
            }
        }
        r.completeness =
            linalg::max_abs_diff(&self.sum(), &ComplexMatrix::identity(dim)).expect("dim");
        r
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = FamilyJson {
            side: self.side,
            kind: self.kind,
            members: self
                .members
                .iter()
                .map(|(k, m)| MemberJson {
                    i: k.i,
                    j: k.j,
                    epsilon: k.epsilon,
                    matrix: m,
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("family serializes")
    }
}

/// The complete family of the requested kind for side `N`.
pub fn full_family(side: usize, kind: FamilyKind) -> Result<ProjectorFamily> {
    let keys = family_keys(side, kind)?;
    let bar = BarIndex::new(side)?;
    let n = bar.n_half();
    let members = keys
        .into_iter()
        .map(|key| {
            let m = match kind {
                FamilyKind::P => build_p(key, n)?,
                FamilyKind::Q => build_q(key, n)?,
                FamilyKind::Unified => build_unified_member(key, bar)?,
            };
            Ok((key, m))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProjectorFamily {
        side,
        kind,
        members,
    })
}
