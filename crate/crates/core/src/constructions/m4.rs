//! Five-part decomposition of `M_4 = M_2 ⊗ M_2`: four factors and one MASA,
//! each given by a triple of tensor-product Pauli generators.

use crate::error::Result;
use crate::matcore::CMatrix;
use crate::subalgebra::{orthonormalize, Subalgebra, SubalgebraKind};

use super::{pauli_tensor, Decomposition};

/// Generator triples `σ_a ⊗ σ_b` of the factors `A_1..A_4`, as `(a, b)`.
pub const M4_FACTOR_TABLE: [[(usize, usize); 3]; 4] = [
    [(0, 1), (0, 2), (0, 3)],
    [(1, 0), (2, 1), (3, 1)],
    [(2, 0), (3, 2), (1, 2)],
    [(3, 0), (1, 3), (2, 3)],
];

/// Generators of the MASA `A_5`.
pub const M4_MASA_GENERATORS: [(usize, usize); 3] = [(1, 1), (2, 2), (3, 3)];

/// Unitaries spanning the commutants `A_1'..A_4'` together with `I`.
pub const M4_COMMUTANT_TABLE: [[(usize, usize); 3]; 4] = [
    [(1, 0), (2, 0), (3, 0)],
    [(0, 1), (1, 2), (1, 3)],
    [(2, 1), (0, 2), (2, 3)],
    [(3, 1), (3, 2), (0, 3)],
];

fn triple(t: &[(usize, usize); 3]) -> Vec<CMatrix> {
    t.iter().map(|&(a, b)| pauli_tensor(a, b)).collect()
}

/// Orthonormalized commutant basis of `A_j` (`j` zero-based, `0..4`) from the
/// commutant table, `I/2` first.
pub fn m4_commutant_table(j: usize) -> Result<Vec<CMatrix>> {
    let mut span = vec![CMatrix::identity(4)];
    span.extend(triple(&M4_COMMUTANT_TABLE[j]));
    orthonormalize(&span, 1e-10)
}

pub fn m4_example2_decomposition() -> Result<Decomposition> {
    let mut parts = Vec::with_capacity(5);
    for (j, gens) in M4_FACTOR_TABLE.iter().enumerate() {
        let s = Subalgebra::from_generators(
            4,
            &triple(gens),
            SubalgebraKind::F,
            format!("A{}", j + 1),
        )?
        .with_blocks(vec![(2, 2)])?;
        parts.push(s.with_commutant_basis(m4_commutant_table(j)?));
    }
    let a5 = Subalgebra::from_generators(4, &triple(&M4_MASA_GENERATORS), SubalgebraKind::M, "A5")?
        .with_blocks(vec![(1, 1); 4])?;
    let basis = a5.basis.clone();
    parts.push(a5.with_commutant_basis(basis));
    Decomposition::new("m4-example2", 4, parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subalgebra::{mutual_span_residual, span_residual};

    #[test]
    fn second_factor_generators() {
        let d = m4_example2_decomposition().unwrap();
        let a2 = &d.parts()[1];
        for (a, b) in [(1, 0), (2, 1), (3, 1)] {
            assert!(span_residual(&a2.basis, &pauli_tensor(a, b)) < 1e-12);
        }
        assert_eq!(a2.dim(), 4);
    }

    #[test]
    fn second_commutant_span() {
        let d = m4_example2_decomposition().unwrap();
        let cb = d.commutant_basis(1);
        for (a, b) in [(0, 0), (0, 1), (1, 2), (1, 3)] {
            assert!(span_residual(cb, &pauli_tensor(a, b)) < 1e-12);
        }
    }

    #[test]
    fn numeric_commutants_match_table() {
        let d = m4_example2_decomposition().unwrap();
        for (j, part) in d.parts().iter().enumerate() {
            let numeric = part.commutant().unwrap();
            assert_eq!(numeric.dim(), 4);
            assert!(mutual_span_residual(&numeric.basis, d.commutant_basis(j)) < 1e-9);
        }
        let first = d.parts()[0].commutant().unwrap();
        for a in 0..4 {
            assert!(span_residual(&first.basis, &pauli_tensor(a, 0)) < 1e-10);
        }
    }

    #[test]
    fn validates() {
        let d = m4_example2_decomposition().unwrap();
        assert!(d.spanning());
        assert!(d.commutant_spanning());
        let report = d.validation();
        assert!(report.passed, "{report:?}");
    }
}
