//! Independent identity checks.
//!
//! Each oracle recomputes its quantity with explicit loops over matrix
//! entries or matrix units and compares with the closed form or with the
//! production code path, so a bug in the optimized routines cannot hide
//! itself.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constructions::{pauli_matrices, weyl};
use crate::error::{GpcError, Result};
use crate::matcore::{kron, matrix_unit, partial_trace_first, random_matrix, CMatrix, C64, ZERO};
use crate::subalgebra::{f_map, Subalgebra};

pub const DEFAULT_TRIALS: usize = 20;
pub const IDENTITY_TOL: f64 = 1e-10;
pub const PROJECTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub max_violation: f64,
    pub trials: usize,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityReport {
    fn new(name: impl Into<String>, max_violation: f64, trials: usize, tolerance: f64) -> Self {
        IdentityReport {
            name: name.into(),
            max_violation,
            trials,
            tolerance,
            passed: max_violation <= tolerance,
        }
    }

    /// Folds several reports on the same identity into one.
    pub fn combine(name: impl Into<String>, reports: &[IdentityReport]) -> Self {
        let max_violation = reports.iter().map(|r| r.max_violation).fold(0.0, f64::max);
        let trials = reports.iter().map(|r| r.trials).sum();
        let tolerance = reports
            .iter()
            .map(|r| r.tolerance)
            .fold(f64::INFINITY, f64::min);
        IdentityReport {
            name: name.into(),
            max_violation,
            trials,
            tolerance,
            passed: reports.iter().all(|r| r.passed),
        }
    }
}

fn trace(m: &CMatrix) -> C64 {
    (0..m.dim()).map(|i| m[(i, i)]).sum()
}

fn check_same_dim(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(GpcError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// `Σ_ij Tr(E_ij X E_ji Y) = Tr X · Tr Y`, left side by explicit products of
/// matrix units.
pub fn lemma_trace_product(x: &CMatrix, y: &CMatrix) -> Result<IdentityReport> {
    check_same_dim(x, y)?;
    let n = x.dim();
    let mut lhs = ZERO;
    for i in 0..n {
        for j in 0..n {
            let eij = matrix_unit(n, i, j)?;
            let eji = matrix_unit(n, j, i)?;
            lhs += trace(&eij.matmul(x).matmul(&eji).matmul(y));
        }
    }
    let rhs = trace(x) * trace(y);
    let scale = (x.hs_norm() * y.hs_norm()).max(1.0);
    Ok(IdentityReport::new(
        "trace-product",
        (lhs - rhs).norm() / scale,
        1,
        IDENTITY_TOL,
    ))
}

/// Largest `|Tr(V_i† V_j) − δ_ij|`, by explicit entry sums.
pub fn hs_orthonormality_violation(v: &[CMatrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in v.iter().enumerate() {
        for (j, b) in v.iter().enumerate() {
            let n = a.dim();
            let mut s = ZERO;
            for r in 0..n {
                for c in 0..n {
                    s += a[(r, c)].conj() * b[(r, c)];
                }
            }
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - target).norm());
        }
    }
    worst
}

/// `‖Σ_i V_i† A V_i − (Tr A) I‖_max`, by explicit index sums.
pub fn depolarizing_resolution_violation(v: &[CMatrix], a: &CMatrix) -> f64 {
    let n = a.dim();
    let tr = trace(a);
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            let mut s = ZERO;
            for m in v {
                for p in 0..n {
                    for q in 0..n {
                        s += m[(p, r)].conj() * a[(p, q)] * m[(q, c)];
                    }
                }
            }
            let target = if r == c { tr } else { ZERO };
            worst = worst.max((s - target).norm());
        }
    }
    worst
}

/// The two equivalent conditions on `n²` matrices: HS orthonormality and
/// `Σ V_i† A V_i = (Tr A) I` on `trials` random inputs. Passes iff both hold.
pub fn depolarizing_basis_check(v: &[CMatrix], trials: usize, seed: u64) -> Result<IdentityReport> {
    let n = v.first().ok_or(GpcError::EmptyInput("basis"))?.dim();
    if v.len() != n * n {
        return Err(GpcError::InvalidArgument(format!(
            "expected {} matrices, found {}",
            n * n,
            v.len()
        )));
    }
    let ortho = hs_orthonormality_violation(v);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut resolution: f64 = 0.0;
    for _ in 0..trials {
        let a = random_matrix(&mut rng, n);
        resolution = resolution.max(depolarizing_resolution_violation(v, &a));
    }
    Ok(IdentityReport::new(
        "depolarizing-basis",
        ortho.max(resolution),
        trials,
        IDENTITY_TOL,
    ))
}

/// `P_k = Σ_ij U_k† E_ij U_k ⊗ E_ij`, built entrywise:
/// `P_k[(a, i), (c, j)] = conj(U_k[i, a]) U_k[j, c]`.
pub fn choi_projections(u: &[CMatrix]) -> Vec<CMatrix> {
    u.iter()
        .map(|uk| {
            let n = uk.dim();
            CMatrix::from_fn(n * n, |row, col| {
                let (a, i) = (row / n, row % n);
                let (c, j) = (col / n, col % n);
                uk[(i, a)].conj() * uk[(j, c)]
            })
        })
        .collect()
}

/// Each `P_k` is an orthogonal projection and `Tr(P_k P_l) = 0` for `k ≠ l`.
pub fn choi_projection_check(u: &[CMatrix]) -> Result<IdentityReport> {
    if u.is_empty() {
        return Err(GpcError::EmptyInput("orthonormal system"));
    }
    let ortho = hs_orthonormality_violation(u);
    if ortho > IDENTITY_TOL {
        return Err(GpcError::NotOrthonormal { violation: ortho });
    }
    let ps = choi_projections(u);
    let mut worst: f64 = 0.0;
    for (k, p) in ps.iter().enumerate() {
        worst = worst.max(p.matmul(p).max_diff(p));
        worst = worst.max(p.max_diff(&p.adjoint()));
        for q in ps.iter().skip(k + 1) {
            worst = worst.max(trace(&p.matmul(q)).norm());
        }
    }
    Ok(IdentityReport::new(
        "choi-projections",
        worst,
        ps.len(),
        PROJECTION_TOL,
    ))
}

fn require_blocks(s: &Subalgebra) -> Result<&[(usize, usize)]> {
    let blocks = s.blocks.as_deref().ok_or_else(|| {
        GpcError::InvalidBlocks(format!("subalgebra '{}' has no block data", s.label))
    })?;
    let total: usize = blocks.iter().map(|&(a, b)| a * b).sum();
    if total != s.n {
        return Err(GpcError::InvalidBlocks(format!(
            "blocks cover {total} indices, ambient dimension is {}",
            s.n
        )));
    }
    Ok(blocks)
}

/// Block formula for `F(X) = Σ U_i† X U_i` on `⊕ M_{n_i} ⊗ I_{m_i}` in
/// standard coordinates: block `i` of the result is
/// `(1/m_i) · I_{n_i} ⊗ Tr_{n_i}(P_i X P_i)`.
pub fn f_map_block_formula(blocks: &[(usize, usize)], x: &CMatrix) -> Result<CMatrix> {
    let n = x.dim();
    let mut out = CMatrix::zeros(n);
    let mut offset = 0;
    for &(ni, mi) in blocks {
        let size = ni * mi;
        // P_i X P_i as a size × size matrix, assembled from matrix units.
        let mut block = CMatrix::zeros(size);
        for a in 0..size {
            for b in 0..size {
                block.add_scaled(x[(offset + a, offset + b)], &matrix_unit(size, a, b)?);
            }
        }
        let reduced = partial_trace_first(&block, ni, mi)?;
        let lifted = kron(&CMatrix::identity(ni), &reduced).scale_real(1.0 / mi as f64);
        for a in 0..size {
            for b in 0..size {
                out[(offset + a, offset + b)] = lifted[(a, b)];
            }
        }
        offset += size;
    }
    Ok(out)
}

pub fn f_map_block_oracle(s: &Subalgebra, x: &CMatrix) -> Result<IdentityReport> {
    let blocks = require_blocks(s)?;
    check_same_dim(&s.basis[0], x)?;
    let formula = f_map_block_formula(blocks, x)?;
    let direct = f_map(&s.basis, x)?;
    let scale = x.hs_norm().max(1.0);
    Ok(IdentityReport::new(
        format!("f-map-blocks:{}", s.label),
        direct.max_diff(&formula) / scale,
        1,
        IDENTITY_TOL,
    ))
}

/// With all `n_i / m_i` equal, `(n / dim S) · F` is the trace-preserving
/// conditional expectation onto the commutant. Compared with both the
/// projection form and the unitary-mixture form on the numerically computed
/// commutant.
pub fn commutant_expectation_check(s: &Subalgebra, x: &CMatrix) -> Result<IdentityReport> {
    let blocks = require_blocks(s)?;
    let (n0, m0) = blocks[0];
    if blocks.iter().any(|&(ni, mi)| ni * m0 != n0 * mi) {
        return Err(GpcError::InvalidBlocks(
            "block ratios n_i/m_i differ".into(),
        ));
    }
    let factor = s.n as f64 / s.basis.len() as f64;
    let lhs = f_map(&s.basis, x)?.scale_real(factor);
    let commutant = s.commutant()?;
    let projection = commutant.conditional_expectation(x)?;
    let mixture = commutant.cond_exp_via_commutant(x)?;
    let scale = x.hs_norm().max(1.0);
    let v = lhs.max_diff(&projection).max(lhs.max_diff(&mixture)) / scale;
    Ok(IdentityReport::new(
        format!("commutant-expectation:{}", s.label),
        v,
        1,
        IDENTITY_TOL,
    ))
}

/// All `n²` matrix units of `M_n`.
pub fn matrix_units(n: usize) -> Vec<CMatrix> {
    (0..n * n)
        .map(|k| matrix_unit(n, k / n, k % n).expect("in range"))
        .collect()
}

/// Normalized Weyl basis `weyl(n, a, b)/√n`.
pub fn weyl_basis(n: usize) -> Vec<CMatrix> {
    let s = 1.0 / (n as f64).sqrt();
    (0..n * n)
        .map(|k| weyl(n, (k / n) as i64, (k % n) as i64).scale_real(s))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Lemmas,
    Projections,
    Fmap,
}

impl std::str::FromStr for Suite {
    type Err = GpcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "lemmas" => Ok(Suite::Lemmas),
            "projections" => Ok(Suite::Projections),
            "fmap" => Ok(Suite::Fmap),
            other => Err(GpcError::InvalidArgument(format!(
                "unknown suite '{other}'"
            ))),
        }
    }
}

pub const SUITE_DIMS: [usize; 4] = [2, 3, 4, 5];
pub const LEMMA_PAIRS: usize = 50;

fn lemma_suite(seed: u64) -> Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    for n in SUITE_DIMS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9));
        let mut reports = Vec::with_capacity(LEMMA_PAIRS + n * n * n * n);
        for _ in 0..LEMMA_PAIRS {
            let x = random_matrix(&mut rng, n);
            let y = random_matrix(&mut rng, n);
            reports.push(lemma_trace_product(&x, &y)?);
        }
        let units = matrix_units(n);
        for x in &units {
            for y in &units {
                reports.push(lemma_trace_product(x, y)?);
            }
        }
        out.push(IdentityReport::combine(
            format!("trace-product n={n}"),
            &reports,
        ));

        let mut r = depolarizing_basis_check(&units, DEFAULT_TRIALS, seed)?;
        r.name = format!("depolarizing-basis matrix-units n={n}");
        out.push(r);
        let mut r = depolarizing_basis_check(&weyl_basis(n), DEFAULT_TRIALS, seed)?;
        r.name = format!("depolarizing-basis weyl n={n}");
        out.push(r);

        // A broken normalization must violate both conditions.
        let mut broken = units.clone();
        broken[0] = broken[0].scale_real(2.0);
        let ortho_fails = hs_orthonormality_violation(&broken) > IDENTITY_TOL;
        let a = random_matrix(&mut rng, n);
        let resolution_fails = depolarizing_resolution_violation(&broken, &a) > IDENTITY_TOL;
        out.push(IdentityReport {
            name: format!("depolarizing-basis negative-control n={n}"),
            max_violation: if ortho_fails && resolution_fails {
                0.0
            } else {
                1.0
            },
            trials: 1,
            tolerance: 0.0,
            passed: ortho_fails && resolution_fails,
        });
    }
    Ok(out)
}

fn projection_suite() -> Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    let paulis: Vec<CMatrix> = pauli_matrices()
        .iter()
        .map(|p| p.scale_real(0.5f64.sqrt()))
        .collect();
    let mut r = choi_projection_check(&paulis)?;
    r.name = "choi-projections pauli".into();
    out.push(r);
    for n in SUITE_DIMS {
        let basis = weyl_basis(n);
        let mut r = choi_projection_check(&basis)?;
        r.name = format!("choi-projections weyl n={n}");
        out.push(r);
        let mut sum = CMatrix::zeros(n * n);
        for p in choi_projections(&basis) {
            sum = &sum + &p;
        }
        out.push(IdentityReport::new(
            format!("choi-projections completeness n={n}"),
            sum.max_diff(&CMatrix::identity(n * n)),
            1,
            PROJECTION_TOL,
        ));
    }
    Ok(out)
}

fn fmap_suite(seed: u64) -> Result<Vec<IdentityReport>> {
    let mut algebras = Vec::new();
    for n in SUITE_DIMS {
        algebras.push(Subalgebra::from_blocks(&[(1, n)], format!("CI n={n}"))?);
        algebras.push(Subalgebra::from_blocks(
            &vec![(1, 1); n],
            format!("diag n={n}"),
        )?);
    }
    algebras.push(Subalgebra::from_blocks(&[(2, 2)], "M2xI2")?);
    algebras.push(Subalgebra::from_blocks(&[(2, 1), (1, 2)], "M2+I2")?);
    algebras.push(Subalgebra::from_blocks(&[(1, 2), (2, 4)], "ratio-half")?);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for s in &algebras {
        let mut reports = Vec::new();
        let mut expectations = Vec::new();
        let blocks = s.blocks.as_deref().unwrap_or(&[]);
        let (n0, m0) = blocks[0];
        let equal_ratios = blocks.iter().all(|&(ni, mi)| ni * m0 == n0 * mi);
        for _ in 0..DEFAULT_TRIALS {
            let x = random_matrix(&mut rng, s.n);
            reports.push(f_map_block_oracle(s, &x)?);
            if equal_ratios {
                expectations.push(commutant_expectation_check(s, &x)?);
            }
        }
        out.push(IdentityReport::combine(
            format!("f-map-blocks {}", s.label),
            &reports,
        ));
        if equal_ratios {
            out.push(IdentityReport::combine(
                format!("commutant-expectation {}", s.label),
                &expectations,
            ));
        }
    }
    Ok(out)
}

/// Runs the selected identity suites over `n ∈ {2, 3, 4, 5}`.
pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::All | Suite::Lemmas) {
        out.extend(lemma_suite(seed)?);
    }
    if matches!(suite, Suite::All | Suite::Projections) {
        out.extend(projection_suite()?);
    }
    if matches!(suite, Suite::All | Suite::Fmap) {
        out.extend(fmap_suite(seed)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_product_on_units() {
        for (a, b, c, d) in [(0, 0, 1, 1), (0, 1, 1, 1), (1, 1, 1, 0), (1, 1, 0, 0)] {
            let x = matrix_unit(2, a, b).unwrap();
            let y = matrix_unit(2, c, d).unwrap();
            // Right side δ_ab δ_cd.
            let r = lemma_trace_product(&x, &y).unwrap();
            assert!(r.passed);
            let expect = if a == b && c == d { 1.0 } else { 0.0 };
            assert_eq!((trace(&x) * trace(&y)).re, expect);
        }
        let r = lemma_trace_product(&CMatrix::identity(3), &CMatrix::identity(3)).unwrap();
        assert!(r.passed && r.max_violation == 0.0);
        assert!(lemma_trace_product(&CMatrix::identity(3), &CMatrix::identity(2)).is_err());
    }

    #[test]
    fn depolarizing_bases() {
        for n in [2, 3, 4] {
            assert!(
                depolarizing_basis_check(&matrix_units(n), 5, 1)
                    .unwrap()
                    .passed
            );
            assert!(
                depolarizing_basis_check(&weyl_basis(n), 5, 1)
                    .unwrap()
                    .passed
            );
        }
        let mut broken = weyl_basis(3);
        broken[4] = broken[4].scale_real(2.0);
        assert!(!depolarizing_basis_check(&broken, 5, 1).unwrap().passed);
        assert!(hs_orthonormality_violation(&broken) > 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_matrix(&mut rng, 3);
        assert!(depolarizing_resolution_violation(&broken, &a) > 1e-3);
        assert!(depolarizing_basis_check(&matrix_units(2)[..3], 5, 1).is_err());
    }

    #[test]
    fn projections() {
        let paulis: Vec<CMatrix> = pauli_matrices()
            .iter()
            .map(|p| p.scale_real(0.5f64.sqrt()))
            .collect();
        let r = choi_projection_check(&paulis).unwrap();
        assert!(r.passed, "{r:?}");
        let single = [CMatrix::identity(3).scale_real(1.0 / 3f64.sqrt())];
        assert!(choi_projection_check(&single).unwrap().passed);
        let basis = weyl_basis(3);
        assert!(choi_projection_check(&basis).unwrap().passed);
        let mut sum = CMatrix::zeros(9);
        for p in choi_projections(&basis) {
            assert!((trace(&p).re - 1.0).abs() < 1e-12);
            sum = &sum + &p;
        }
        assert!(sum.max_diff(&CMatrix::identity(9)) < 1e-12);
        assert!(choi_projection_check(&[CMatrix::identity(2)]).is_err());
    }

    #[test]
    fn block_oracle_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = Subalgebra::from_blocks(&[(2, 2)], "M2xI2").unwrap();
        let x = random_matrix(&mut rng, 4);
        assert!(f_map_block_oracle(&s, &x).unwrap().passed);
        // F = (1/2) I ⊗ Tr_1 here.
        let direct = f_map(&s.basis, &x).unwrap();
        let expect = kron(
            &CMatrix::identity(2),
            &partial_trace_first(&x, 2, 2).unwrap(),
        )
        .scale_real(0.5);
        assert!(direct.max_diff(&expect) < 1e-13);

        let c = Subalgebra::scalars(3).unwrap();
        let x = random_matrix(&mut rng, 3);
        assert!(f_map_block_oracle(&c, &x).unwrap().passed);
        assert!(
            f_map(&c.basis, &x)
                .unwrap()
                .max_diff(&x.scale_real(1.0 / 3.0))
                < 1e-14
        );

        let diag = Subalgebra::from_blocks(&[(1, 1); 3], "diag").unwrap();
        assert!(f_map_block_oracle(&diag, &x).unwrap().passed);
        let f = f_map(&diag.basis, &x).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let expect = if r == c { x[(r, c)] } else { ZERO };
                assert!((f[(r, c)] - expect).norm() < 1e-14);
            }
        }

        let mut no_blocks = diag.clone();
        no_blocks.blocks = None;
        assert!(matches!(
            f_map_block_oracle(&no_blocks, &x),
            Err(GpcError::InvalidBlocks(_))
        ));
    }

    #[test]
    fn suites_pass_and_are_deterministic() {
        let a = run_suite(Suite::All, 42).unwrap();
        let b = run_suite(Suite::All, 42).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert!(r.passed, "{r:?}");
        }
    }
}
