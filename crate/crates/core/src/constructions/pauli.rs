use std::f64::consts::PI;

use crate::error::Result;
use crate::matcore::{kron, CMatrix, C64, ONE, ZERO};
use crate::subalgebra::{Subalgebra, SubalgebraKind};

use super::Decomposition;

/// `σ_0 = I, σ_1, σ_2, σ_3`.
pub fn pauli_matrices() -> [CMatrix; 4] {
    let i = C64::new(0.0, 1.0);
    [
        CMatrix::identity(2),
        CMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).expect("2x2"),
        CMatrix::from_rows(&[vec![ZERO, -i], vec![i, ZERO]]).expect("2x2"),
        CMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]]).expect("2x2"),
    ]
}

/// `σ_a ⊗ σ_b`.
pub fn pauli_tensor(a: usize, b: usize) -> CMatrix {
    let p = pauli_matrices();
    kron(&p[a], &p[b])
}

/// Weyl operator `X^a Z^b` on `C^n`, with `X e_k = e_{k+1 mod n}` and
/// `Z = diag(1, ω, ..., ω^{n-1})`, `ω = exp(2πi/n)`. Exponents are reduced
/// mod `n`.
pub fn weyl(n: usize, a: i64, b: i64) -> CMatrix {
    let ni = n as i64;
    let a = a.rem_euclid(ni) as usize;
    let b = b.rem_euclid(ni) as usize;
    let mut m = CMatrix::zeros(n);
    for c in 0..n {
        let phase = 2.0 * PI * ((b * c) % n) as f64 / n as f64;
        m[((c + a) % n, c)] = C64::from_polar(1.0, phase);
    }
    m
}

/// The three MASAs of `M_2` generated by `σ_1`, `σ_2`, `σ_3`, in that order.
pub fn qubit_pauli_decomposition() -> Result<Decomposition> {
    let p = pauli_matrices();
    let mut parts = Vec::with_capacity(3);
    for (i, sigma) in p.iter().enumerate().skip(1) {
        let s = Subalgebra::from_generators(
            2,
            std::slice::from_ref(sigma),
            SubalgebraKind::M,
            format!("sigma{i}"),
        )?
        .with_blocks(vec![(1, 1), (1, 1)])?;
        let basis = s.basis.clone();
        parts.push(s.with_commutant_basis(basis));
    }
    Decomposition::new("qubit-pauli", 2, parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::hs_inner;

    #[test]
    fn pauli_algebra() {
        let [s0, s1, s2, s3] = pauli_matrices();
        assert_eq!(s1.matmul(&s1), s0);
        let i = C64::new(0.0, 1.0);
        assert!(s1.matmul(&s2).max_diff(&s3.scale(i)) < 1e-15);
        for s in [&s1, &s2, &s3] {
            assert_eq!(s.trace(), ZERO);
        }
    }

    #[test]
    fn weyl_small_cases() {
        let [_, s1, _, s3] = pauli_matrices();
        assert!(weyl(2, 1, 0).max_diff(&s1) < 1e-15);
        assert!(weyl(2, 0, 1).max_diff(&s3) < 1e-15);
        let shift = weyl(3, 1, 0);
        let clock = weyl(3, 0, 1);
        assert!(weyl(3, 1, 1).max_diff(&shift.matmul(&clock)) < 1e-15);
        assert!(weyl(3, -1, 4).max_diff(&weyl(3, 2, 1)) < 1e-15);
    }

    #[test]
    fn weyl_orthogonality_n3() {
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        let v = hs_inner(&weyl(3, a, b), &weyl(3, c, d)).unwrap();
                        let expect = if a == c && b == d { 3.0 } else { 0.0 };
                        assert!((v - C64::new(expect, 0.0)).norm() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn qubit_decomposition_shape() {
        let d = qubit_pauli_decomposition().unwrap();
        assert_eq!(d.len(), 3);
        assert!(d.parts().iter().all(|p| p.dim() == 2));
        assert!(d.spanning());
        assert!(d.commutant_spanning());
        assert!(d.validation().passed, "{:?}", d.validation());
    }
}
