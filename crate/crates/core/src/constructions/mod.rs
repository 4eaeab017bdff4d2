//! Decompositions of `M_n` into pairwise complementary subalgebras and the
//! named builders that produce them.

mod m4;
mod mub;
mod pauli;
pub mod registry;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use m4::{
    m4_commutant_table, m4_example2_decomposition, M4_COMMUTANT_TABLE, M4_FACTOR_TABLE,
    M4_MASA_GENERATORS,
};
pub use mub::{is_prime, mub_bases, mub_masa_decomposition, MAX_PRIME};
pub use pauli::{pauli_matrices, pauli_tensor, qubit_pauli_decomposition, weyl};
pub use registry::{DecompositionBuilder, DecompositionRegistry};

use crate::error::{GpcError, Result};
use crate::matcore::{gram_rank, CMatrix};
use crate::subalgebra::{
    complementarity_of, mutual_span_residual, normalized_identity, orthonormality_violation,
    Subalgebra, COMPLEMENTARITY_TOL, RANK_THRESHOLD,
};

/// Ambient dimension plus an ordered family of subalgebras, each carrying a
/// commutant basis. Construction recomputes both spanning flags; validation
/// runs once on demand and is cached.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "DecompositionJson", into = "DecompositionJson")]
pub struct Decomposition {
    name: String,
    n: usize,
    parts: Vec<Subalgebra>,
    spanning: bool,
    commutant_spanning: bool,
    validation: OnceLock<ValidationReport>,
}

#[derive(Serialize, Deserialize)]
struct DecompositionJson {
    name: String,
    n: usize,
    parts: Vec<Subalgebra>,
}

impl TryFrom<DecompositionJson> for Decomposition {
    type Error = GpcError;

    fn try_from(raw: DecompositionJson) -> Result<Self> {
        Decomposition::new(raw.name, raw.n, raw.parts)
    }
}

impl From<Decomposition> for DecompositionJson {
    fn from(d: Decomposition) -> Self {
        DecompositionJson {
            name: d.name,
            n: d.n,
            parts: d.parts,
        }
    }
}

impl PartialEq for Decomposition {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.n == other.n && self.parts == other.parts
    }
}

impl Decomposition {
    /// Assembles a decomposition. Parts without a commutant basis get the
    /// numerically computed one.
    pub fn new(name: impl Into<String>, n: usize, parts: Vec<Subalgebra>) -> Result<Self> {
        if parts.is_empty() {
            return Err(GpcError::EmptyInput("decomposition parts"));
        }
        if n == 0 {
            return Err(GpcError::InvalidDecomposition(
                "ambient dimension must be positive".into(),
            ));
        }
        let mut filled = Vec::with_capacity(parts.len());
        for part in parts {
            if part.n != n {
                return Err(GpcError::DimensionMismatch {
                    expected: n,
                    found: part.n,
                });
            }
            if part.commutant_basis.is_some() {
                filled.push(part);
            } else {
                let c = part.commutant()?;
                filled.push(part.with_commutant_basis(c.basis));
            }
        }
        let spanning = spanning_of(n, &filled)?;
        let commutant_spanning = commutant_spanning_of(n, &filled)?;
        Ok(Decomposition {
            name: name.into(),
            n,
            parts: filled,
            spanning,
            commutant_spanning,
            validation: OnceLock::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[Subalgebra] {
        &self.parts
    }

    /// Number of parts `r`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The parts linearly span `M_n`.
    pub fn spanning(&self) -> bool {
        self.spanning
    }

    /// `{I/√n}` together with the non-identity commutant elements spans `M_n`.
    pub fn commutant_spanning(&self) -> bool {
        self.commutant_spanning
    }

    /// Commutant basis of part `i`. Always present after construction.
    pub fn commutant_basis(&self, i: usize) -> &[CMatrix] {
        self.parts[i]
            .commutant_basis
            .as_deref()
            .expect("commutant basis filled at construction")
    }

    /// Cached validation report.
    pub fn validation(&self) -> &ValidationReport {
        self.validation.get_or_init(|| validate_decomposition(self))
    }

    /// Returns an error carrying the failed checks unless validation passed.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validation();
        if report.passed {
            Ok(())
        } else {
            let failed: Vec<String> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{} ({:e})", c.name, c.max_violation))
                .collect();
            Err(GpcError::InvalidDecomposition(format!(
                "'{}' failed: {}",
                self.name,
                failed.join(", ")
            )))
        }
    }
}

fn spanning_of(n: usize, parts: &[Subalgebra]) -> Result<bool> {
    let count = 1 + parts
        .iter()
        .map(|p| p.dim().saturating_sub(1))
        .sum::<usize>();
    if count != n * n {
        return Ok(false);
    }
    let mut union = vec![normalized_identity(n)];
    for p in parts {
        union.extend(p.basis.iter().skip(1).cloned());
    }
    Ok(gram_rank(&union, RANK_THRESHOLD)? == n * n)
}

fn commutant_spanning_of(n: usize, parts: &[Subalgebra]) -> Result<bool> {
    let mut union = vec![normalized_identity(n)];
    for p in parts {
        if let Some(cb) = &p.commutant_basis {
            union.extend(cb.iter().skip(1).cloned());
        }
    }
    if union.len() < n * n {
        return Ok(false);
    }
    Ok(gram_rank(&union, RANK_THRESHOLD)? == n * n)
}

/// Outcome of one validation check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub max_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub name: String,
    pub n: usize,
    pub parts: usize,
    pub spanning: bool,
    pub commutant_spanning: bool,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

const COMMUTANT_TOL: f64 = 1e-9;

/// Full structural validation: subalgebra invariants, complementarity of
/// parts and of commutants, commutant correctness against the numerical
/// kernel solve, and recomputed spanning flags.
pub fn validate_decomposition(d: &Decomposition) -> ValidationReport {
    let n = d.n;
    let mut checks = Vec::new();

    let mut inv_worst: f64 = 0.0;
    let mut inv_ok = true;
    for p in &d.parts {
        let c = p.check();
        inv_worst = inv_worst
            .max(c.unit_first)
            .max(c.orthonormality)
            .max(c.closure);
        inv_ok &= c.passed();
    }
    checks.push(CheckResult {
        name: "subalgebra_invariants".into(),
        passed: inv_ok,
        max_violation: inv_worst,
    });

    let unit = normalized_identity(n);
    let mut cn_worst: f64 = 0.0;
    for p in &d.parts {
        let cb = p.commutant_basis.as_deref().unwrap_or(&[]);
        let first = cb
            .first()
            .map(|u| u.max_diff(&unit))
            .unwrap_or(f64::INFINITY);
        cn_worst = cn_worst.max(first).max(orthonormality_violation(cb));
    }
    checks.push(CheckResult {
        name: "commutant_normalization".into(),
        passed: cn_worst <= 1e-10,
        max_violation: cn_worst,
    });

    let mut parts_worst: f64 = 0.0;
    let mut comm_worst: f64 = 0.0;
    for i in 0..d.parts.len() {
        for j in (i + 1)..d.parts.len() {
            let (a, b) = (&d.parts[i], &d.parts[j]);
            if let Ok(c) = complementarity_of(&a.basis, &b.basis, n, n, COMPLEMENTARITY_TOL) {
                parts_worst = parts_worst.max(c.max_violation);
            }
            if let Ok(c) = complementarity_of(
                d.commutant_basis(i),
                d.commutant_basis(j),
                n,
                n,
                COMPLEMENTARITY_TOL,
            ) {
                comm_worst = comm_worst.max(c.max_violation);
            }
        }
    }
    checks.push(CheckResult {
        name: "parts_complementary".into(),
        passed: parts_worst <= COMPLEMENTARITY_TOL,
        max_violation: parts_worst,
    });
    checks.push(CheckResult {
        name: "commutants_complementary".into(),
        passed: comm_worst <= COMPLEMENTARITY_TOL,
        max_violation: comm_worst,
    });

    let mut cc_worst: f64 = 0.0;
    for (i, p) in d.parts.iter().enumerate() {
        let cb = d.commutant_basis(i);
        for b in &p.basis {
            for u in cb {
                cc_worst = cc_worst.max(b.commutator(u).max_abs());
            }
        }
        match p.commutant() {
            Ok(numeric) => cc_worst = cc_worst.max(mutual_span_residual(&numeric.basis, cb)),
            Err(_) => cc_worst = f64::INFINITY,
        }
    }
    checks.push(CheckResult {
        name: "commutant_correctness".into(),
        passed: cc_worst <= COMMUTANT_TOL,
        max_violation: cc_worst,
    });

    let spanning = spanning_of(n, &d.parts).unwrap_or(false);
    let commutant_spanning = commutant_spanning_of(n, &d.parts).unwrap_or(false);
    let flags_ok = spanning == d.spanning && commutant_spanning == d.commutant_spanning;
    checks.push(CheckResult {
        name: "spanning_flags".into(),
        passed: flags_ok,
        max_violation: if flags_ok { 0.0 } else { 1.0 },
    });

    let passed = checks.iter().all(|c| c.passed);
    ValidationReport {
        name: d.name.clone(),
        n,
        parts: d.parts.len(),
        spanning,
        commutant_spanning,
        checks,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subalgebra::SubalgebraKind;

    #[test]
    fn corrupted_decomposition_reports_violation() {
        let z =
            Subalgebra::from_generators(2, &[pauli_matrices()[3].clone()], SubalgebraKind::M, "z")
                .unwrap();
        let d = Decomposition::new("twice", 2, vec![z.clone(), z]).unwrap();
        let report = d.validation();
        assert!(!report.passed);
        let c = report.check("parts_complementary").unwrap();
        assert!(!c.passed);
        assert!((c.max_violation - 1.0).abs() < 1e-12);
        assert!(d.ensure_valid().is_err());
        assert!(!d.spanning());
    }

    #[test]
    fn missing_commutants_are_computed() {
        let z =
            Subalgebra::from_generators(2, &[pauli_matrices()[3].clone()], SubalgebraKind::M, "z")
                .unwrap();
        let d = Decomposition::new("single", 2, vec![z]).unwrap();
        assert_eq!(d.commutant_basis(0).len(), 2);
        assert!(d.validation().passed);
        assert!(!d.commutant_spanning());
    }

    #[test]
    fn rejects_mismatched_parts() {
        let a = Subalgebra::scalars(2).unwrap();
        let b = Subalgebra::scalars(3).unwrap();
        assert!(Decomposition::new("bad", 2, vec![a, b]).is_err());
        assert!(Decomposition::new("empty", 2, vec![]).is_err());
    }

    #[test]
    fn json_roundtrip_is_stable() {
        let d = qubit_pauli_decomposition().unwrap();
        let s = serde_json::to_string(&d).unwrap();
        let back: Decomposition = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
        assert!(back.spanning());
    }
}
