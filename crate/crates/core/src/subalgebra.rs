//! Unital *-subalgebras of `M_n` stored as Hilbert-Schmidt orthonormal bases.
//!
//! Every stored basis starts with `I/√n` and has HS-norm-1 elements. The
//! trace-preserving conditional expectation onto a subalgebra is then just
//! the orthogonal projection `A ↦ Σ_s B_s ⟨B_s, A⟩`.

use serde::{Deserialize, Serialize};

use crate::error::{GpcError, Result};
use crate::matcore::{
    gram_rank, hs_inner, hs_inner_unchecked, kron, matrix_unit, null_space, CMatrix, C64,
};

/// Absolute tolerance for complementarity of exact constructions.
pub const COMPLEMENTARITY_TOL: f64 = 1e-10;
/// Singular threshold of the commutant kernel solve.
pub const KERNEL_THRESHOLD: f64 = 1e-10;
/// Gram eigenvalue threshold used for span ranks.
pub const RANK_THRESHOLD: f64 = 1e-9;
/// Maximum number of multiplication rounds in [`Subalgebra::from_generators`].
pub const MAX_CLOSURE_ROUNDS: usize = 8;

const GENERATOR_DROP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubalgebraKind {
    /// Factor: isomorphic to a full matrix algebra `M_k`.
    F,
    /// Maximal Abelian subalgebra.
    M,
    #[serde(rename = "GENERAL")]
    General,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubalgebraJson")]
pub struct Subalgebra {
    pub label: String,
    pub kind: SubalgebraKind,
    pub n: usize,
    pub basis: Vec<CMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub commutant_basis: Option<Vec<CMatrix>>,
    /// Abstract block type `⊕ M_{n_i} ⊗ I_{m_i}` as pairs `(n_i, m_i)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<(usize, usize)>>,
}

#[derive(Deserialize)]
struct SubalgebraJson {
    label: String,
    kind: SubalgebraKind,
    n: usize,
    basis: Vec<CMatrix>,
    #[serde(default)]
    commutant_basis: Option<Vec<CMatrix>>,
    #[serde(default)]
    blocks: Option<Vec<(usize, usize)>>,
}

impl TryFrom<SubalgebraJson> for Subalgebra {
    type Error = GpcError;

    fn try_from(raw: SubalgebraJson) -> Result<Self> {
        if raw.basis.is_empty() {
            return Err(GpcError::EmptyInput("subalgebra basis"));
        }
        let all = raw.basis.iter().chain(raw.commutant_basis.iter().flatten());
        for m in all {
            if m.dim() != raw.n {
                return Err(GpcError::DimensionMismatch {
                    expected: raw.n,
                    found: m.dim(),
                });
            }
        }
        if let Some(cb) = &raw.commutant_basis {
            if cb.is_empty() {
                return Err(GpcError::EmptyInput("commutant basis"));
            }
        }
        if let Some(blocks) = &raw.blocks {
            check_blocks(raw.n, blocks)?;
        }
        Ok(Subalgebra {
            label: raw.label,
            kind: raw.kind,
            n: raw.n,
            basis: raw.basis,
            commutant_basis: raw.commutant_basis,
            blocks: raw.blocks,
        })
    }
}

fn check_blocks(n: usize, blocks: &[(usize, usize)]) -> Result<()> {
    if blocks.is_empty() || blocks.iter().any(|&(a, b)| a == 0 || b == 0) {
        return Err(GpcError::InvalidBlocks(
            "blocks must be nonempty positive pairs".into(),
        ));
    }
    let total: usize = blocks.iter().map(|&(a, b)| a * b).sum();
    if total != n {
        return Err(GpcError::InvalidBlocks(format!(
            "sum of n_i * m_i is {total}, ambient dimension is {n}"
        )));
    }
    Ok(())
}

/// Gram-Schmidt under the HS inner product, two projection passes per
/// element. Elements whose residual norm falls below `tol` times their own
/// norm are dropped.
pub fn orthonormalize(span_set: &[CMatrix], tol: f64) -> Result<Vec<CMatrix>> {
    if span_set.is_empty() {
        return Err(GpcError::EmptyInput("span set"));
    }
    extend_orthonormal(&[], span_set, tol)
}

/// Orthonormalizes `candidates` against the fixed orthonormal system `base`
/// and returns only the new elements.
pub fn extend_orthonormal(
    base: &[CMatrix],
    candidates: &[CMatrix],
    tol: f64,
) -> Result<Vec<CMatrix>> {
    let Some(dim) = base.first().or(candidates.first()).map(|m| m.dim()) else {
        return Ok(Vec::new());
    };
    let mut system: Vec<CMatrix> = base.to_vec();
    for v in candidates {
        if v.dim() != dim {
            return Err(GpcError::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
        let norm = v.hs_norm();
        if norm == 0.0 {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &system {
                let c = hs_inner_unchecked(b, &r);
                r.add_scaled(-c, b);
            }
        }
        let rn = r.hs_norm();
        if rn < tol * norm {
            continue;
        }
        system.push(r.scale_real(1.0 / rn));
    }
    Ok(system.split_off(base.len()))
}

/// Largest `|⟨B_s, B_t⟩ − δ_st|`.
pub fn orthonormality_violation(elements: &[CMatrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for (s, a) in elements.iter().enumerate() {
        for (t, b) in elements.iter().enumerate().skip(s) {
            let target = if s == t { 1.0 } else { 0.0 };
            worst = worst.max((hs_inner_unchecked(a, b) - target).norm());
        }
    }
    worst
}

/// HS distance from `a` to the span of the orthonormal system `basis`.
pub fn span_residual(basis: &[CMatrix], a: &CMatrix) -> f64 {
    let mut r = a.clone();
    for b in basis {
        let c = hs_inner_unchecked(b, a);
        r.add_scaled(-c, b);
    }
    r.hs_norm()
}

/// Worst residual of either orthonormal system against the span of the other.
pub fn mutual_span_residual(a: &[CMatrix], b: &[CMatrix]) -> f64 {
    let ab = a.iter().map(|x| span_residual(b, x)).fold(0.0, f64::max);
    let ba = b.iter().map(|x| span_residual(a, x)).fold(0.0, f64::max);
    ab.max(ba)
}

/// `I/√n`.
pub fn normalized_identity(n: usize) -> CMatrix {
    CMatrix::identity(n).scale_real(1.0 / (n as f64).sqrt())
}

/// Result of a complementarity test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Complementarity {
    pub complementary: bool,
    pub max_violation: f64,
}

/// Invariant violations of a single subalgebra.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubalgebraCheck {
    pub unit_first: f64,
    pub orthonormality: f64,
    pub closure: f64,
    pub kind_consistent: bool,
    pub blocks_consistent: bool,
}

impl SubalgebraCheck {
    pub fn passed(&self) -> bool {
        self.unit_first <= 1e-10
            && self.orthonormality <= 1e-10
            && self.closure <= 1e-9
            && self.kind_consistent
            && self.blocks_consistent
    }
}

impl Subalgebra {
    /// Algebra spanned by `I` and `span`, orthonormalized with `I/√n` first.
    /// The caller guarantees the span is closed under products and adjoints;
    /// [`Subalgebra::check`] verifies it.
    pub fn from_span(
        n: usize,
        span: &[CMatrix],
        kind: SubalgebraKind,
        label: impl Into<String>,
    ) -> Result<Self> {
        let mut set = vec![CMatrix::identity(n)];
        set.extend(span.iter().cloned());
        let basis = orthonormalize(&set, GENERATOR_DROP_TOL)?;
        Ok(Subalgebra {
            label: label.into(),
            kind,
            n,
            basis,
            commutant_basis: None,
            blocks: None,
        })
    }

    /// Smallest unital *-algebra containing `gens`.
    pub fn from_generators(
        n: usize,
        gens: &[CMatrix],
        kind: SubalgebraKind,
        label: impl Into<String>,
    ) -> Result<Self> {
        if gens.is_empty() {
            return Err(GpcError::EmptyInput("generators"));
        }
        if let Some(g) = gens.iter().find(|g| g.dim() != n) {
            return Err(GpcError::DimensionMismatch {
                expected: n,
                found: g.dim(),
            });
        }
        let mut set = vec![CMatrix::identity(n)];
        for g in gens {
            set.push(g.clone());
            set.push(g.adjoint());
        }
        let mut basis = orthonormalize(&set, GENERATOR_DROP_TOL)?;
        for _round in 0..MAX_CLOSURE_ROUNDS {
            let mut candidates = basis.clone();
            for a in &basis {
                for b in &basis {
                    candidates.push(a.matmul(b));
                }
            }
            let grown = orthonormalize(&candidates, GENERATOR_DROP_TOL)?;
            if grown.len() > n * n {
                break;
            }
            if grown.len() == basis.len() {
                return Ok(Subalgebra {
                    label: label.into(),
                    kind,
                    n,
                    basis,
                    commutant_basis: None,
                    blocks: None,
                });
            }
            basis = grown;
        }
        Err(GpcError::ClosureDidNotStabilize {
            rounds: MAX_CLOSURE_ROUNDS,
            dim: basis.len(),
        })
    }

    /// The algebra `⊕ M_{n_i} ⊗ I_{m_i}` in standard coordinates: block `i`
    /// occupies the consecutive index range of length `n_i * m_i`, indexed by
    /// the Kronecker convention of [`kron`].
    pub fn from_blocks(blocks: &[(usize, usize)], label: impl Into<String>) -> Result<Self> {
        let n: usize = blocks.iter().map(|&(a, b)| a * b).sum();
        check_blocks(n, blocks)?;
        let mut span = Vec::new();
        let mut offset = 0;
        for &(ni, mi) in blocks {
            let id_m = CMatrix::identity(mi);
            for a in 0..ni {
                for b in 0..ni {
                    let local = kron(&matrix_unit(ni, a, b)?, &id_m);
                    span.push(embed(&local, n, offset));
                }
            }
            offset += ni * mi;
        }
        let kind = if blocks.len() == 1 {
            SubalgebraKind::F
        } else if blocks.iter().all(|&b| b == (1, 1)) {
            SubalgebraKind::M
        } else {
            SubalgebraKind::General
        };
        let mut s = Self::from_span(n, &span, kind, label)?;
        s.blocks = Some(blocks.to_vec());
        Ok(s)
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::from_blocks(&[(n, 1)], format!("M_{n}"))
    }

    pub fn scalars(n: usize) -> Result<Self> {
        Self::from_blocks(&[(1, n)], "CI")
    }

    pub fn with_commutant_basis(mut self, commutant_basis: Vec<CMatrix>) -> Self {
        self.commutant_basis = Some(commutant_basis);
        self
    }

    pub fn with_blocks(mut self, blocks: Vec<(usize, usize)>) -> Result<Self> {
        check_blocks(self.n, &blocks)?;
        self.blocks = Some(blocks);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn check_dim(&self, a: &CMatrix) -> Result<()> {
        if a.dim() != self.n {
            return Err(GpcError::DimensionMismatch {
                expected: self.n,
                found: a.dim(),
            });
        }
        Ok(())
    }

    /// Trace-preserving conditional expectation as HS projection.
    pub fn conditional_expectation(&self, a: &CMatrix) -> Result<CMatrix> {
        self.check_dim(a)?;
        let mut out = CMatrix::zeros(self.n);
        for b in &self.basis {
            out.add_scaled(hs_inner_unchecked(b, a), b);
        }
        Ok(out)
    }

    /// Conditional expectation as the unitary mixture over the commutant
    /// basis, `(n / dim A') Σ U_i† A U_i`.
    pub fn cond_exp_via_commutant(&self, a: &CMatrix) -> Result<CMatrix> {
        self.check_dim(a)?;
        let cb = self
            .commutant_basis
            .as_ref()
            .ok_or_else(|| GpcError::MissingCommutant(self.label.clone()))?;
        let f = f_map(cb, a)?;
        Ok(f.scale_real(self.n as f64 / cb.len() as f64))
    }

    /// HS distance from `a` to this subalgebra.
    pub fn projection_residual(&self, a: &CMatrix) -> Result<f64> {
        self.check_dim(a)?;
        Ok(span_residual(&self.basis, a))
    }

    /// Numerical commutant: null space of `X ↦ B_s X − X B_s` over all basis
    /// elements, stacked into one system on the `n²` entries of `X`.
    pub fn commutant(&self) -> Result<Subalgebra> {
        let n = self.n;
        let nn = n * n;
        let mut rows: Vec<Vec<C64>> = Vec::with_capacity(self.basis.len() * nn);
        // The identity contributes nothing.
        for b in self.basis.iter().skip(1) {
            for r in 0..n {
                for c in 0..n {
                    let mut row = vec![C64::new(0.0, 0.0); nn];
                    // (B X)_{rc} = Σ_k B_{rk} X_{kc}
                    for k in 0..n {
                        row[k * n + c] += b[(r, k)];
                    }
                    // (X B)_{rc} = Σ_k X_{rk} B_{kc}
                    for k in 0..n {
                        row[r * n + k] -= b[(k, c)];
                    }
                    rows.push(row);
                }
            }
        }
        let kernel = if rows.is_empty() {
            (0..nn)
                .map(|k| {
                    let mut v = vec![C64::new(0.0, 0.0); nn];
                    v[k] = C64::new(1.0, 0.0);
                    v
                })
                .collect()
        } else {
            null_space(rows, nn, KERNEL_THRESHOLD)
        };
        let mut span = vec![CMatrix::identity(n)];
        for v in kernel {
            span.push(CMatrix::from_fn(n, |r, c| v[r * n + c]));
        }
        let basis = orthonormalize(&span, GENERATOR_DROP_TOL)?;
        Ok(Subalgebra {
            label: format!("{}'", self.label),
            kind: SubalgebraKind::General,
            n,
            basis,
            commutant_basis: Some(self.basis.clone()),
            blocks: None,
        })
    }

    /// Checks the stored invariants: unit-first normalization, orthonormality,
    /// closure under products and adjoints, and consistency of kind and blocks.
    pub fn check(&self) -> SubalgebraCheck {
        let n = self.n;
        let unit_first = self
            .basis
            .first()
            .map(|b| b.max_diff(&normalized_identity(n)))
            .unwrap_or(f64::INFINITY);
        let orthonormality = orthonormality_violation(&self.basis);
        let mut closure: f64 = 0.0;
        for a in &self.basis {
            closure = closure.max(span_residual(&self.basis, &a.adjoint()));
            for b in &self.basis {
                closure = closure.max(span_residual(&self.basis, &a.matmul(b)));
            }
        }
        let len = self.basis.len();
        let kind_consistent = match self.kind {
            SubalgebraKind::M => {
                len == n
                    && self.basis.iter().all(|a| {
                        self.basis
                            .iter()
                            .all(|b| a.commutator(b).max_abs() <= 1e-10)
                    })
            }
            SubalgebraKind::F => {
                let k = (len as f64).sqrt().round() as usize;
                k * k == len
                    && n.is_multiple_of(k)
                    && self
                        .blocks
                        .as_ref()
                        .map(|b| b.as_slice() == [(k, n / k)])
                        .unwrap_or(true)
            }
            SubalgebraKind::General => true,
        };
        let blocks_consistent = match &self.blocks {
            None => true,
            Some(b) => {
                check_blocks(n, b).is_ok() && b.iter().map(|&(ni, _)| ni * ni).sum::<usize>() == len
            }
        };
        SubalgebraCheck {
            unit_first,
            orthonormality,
            closure,
            kind_consistent,
            blocks_consistent,
        }
    }
}

/// Places `local` as a principal block of an `n × n` zero matrix.
pub(crate) fn embed(local: &CMatrix, n: usize, offset: usize) -> CMatrix {
    let m = local.dim();
    let mut out = CMatrix::zeros(n);
    for r in 0..m {
        for c in 0..m {
            out[(offset + r, offset + c)] = local[(r, c)];
        }
    }
    out
}

/// `F(X) = Σ_i U_i† X U_i` over an orthonormal system.
pub fn f_map(basis: &[CMatrix], x: &CMatrix) -> Result<CMatrix> {
    let mut out = CMatrix::zeros(x.dim());
    for u in basis {
        if u.dim() != x.dim() {
            return Err(GpcError::DimensionMismatch {
                expected: x.dim(),
                found: u.dim(),
            });
        }
        out = &out + &u.sandwich(x);
    }
    Ok(out)
}

/// Complementarity: the traceless parts of the two algebras are
/// HS-orthogonal. Measured over full bases as
/// `|⟨B, C⟩ − conj(Tr B) Tr C / n|`.
pub fn is_complementary(s1: &Subalgebra, s2: &Subalgebra, tol: f64) -> Result<Complementarity> {
    complementarity_of(&s1.basis, &s2.basis, s1.n, s2.n, tol)
}

/// Complementarity test on raw orthonormal systems.
pub fn complementarity_of(
    b1: &[CMatrix],
    b2: &[CMatrix],
    n1: usize,
    n2: usize,
    tol: f64,
) -> Result<Complementarity> {
    if n1 != n2 {
        return Err(GpcError::DimensionMismatch {
            expected: n1,
            found: n2,
        });
    }
    let n = n1 as f64;
    let mut worst: f64 = 0.0;
    for b in b1 {
        let tb = b.trace().conj();
        for c in b2 {
            let v = hs_inner(b, c)? - tb * c.trace() / n;
            worst = worst.max(v.norm());
        }
    }
    Ok(Complementarity {
        complementary: worst <= tol,
        max_violation: worst,
    })
}

/// Rank of `{B_s C_t}` over all basis pairs.
pub fn product_span_dim(s1: &Subalgebra, s2: &Subalgebra) -> Result<usize> {
    if s1.n != s2.n {
        return Err(GpcError::DimensionMismatch {
            expected: s1.n,
            found: s2.n,
        });
    }
    let products: Vec<CMatrix> = s1
        .basis
        .iter()
        .flat_map(|b| s2.basis.iter().map(move |c| b.matmul(c)))
        .collect();
    gram_rank(&products, RANK_THRESHOLD)
}
