//! Mutually unbiased MASAs of `M_p` for prime `p`, built from the `p + 1`
//! cyclic Weyl directions, and the unbiased bases recovered from them by
//! spectral projections.

use std::f64::consts::PI;

use crate::error::{GpcError, Result};
use crate::matcore::{CMatrix, C64};
use crate::subalgebra::{Subalgebra, SubalgebraKind};

use super::{weyl, Decomposition};

pub const MAX_PRIME: usize = 13;

pub fn is_prime(p: usize) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

fn check_prime(p: usize) -> Result<()> {
    if !is_prime(p) {
        return Err(GpcError::NotPrime(p));
    }
    if p > MAX_PRIME {
        return Err(GpcError::PrimeTooLarge(p));
    }
    Ok(())
}

/// `(0, 1)` followed by `(1, d)` for `d = 0..p`.
fn directions(p: usize) -> Vec<(i64, i64)> {
    std::iter::once((0, 1))
        .chain((0..p as i64).map(|d| (1, d)))
        .collect()
}

pub fn mub_masa_decomposition(p: usize) -> Result<Decomposition> {
    check_prime(p)?;
    let parts = directions(p)
        .into_iter()
        .map(|(c, d)| {
            let span: Vec<CMatrix> = (1..p as i64).map(|m| weyl(p, m * c, m * d)).collect();
            let s = Subalgebra::from_span(p, &span, SubalgebraKind::M, format!("W({c},{d})"))?
                .with_blocks(vec![(1, 1); p])?;
            let basis = s.basis.clone();
            Ok(s.with_commutant_basis(basis))
        })
        .collect::<Result<Vec<_>>>()?;
    Decomposition::new(format!("mub-p{p}"), p, parts)
}

/// The `p + 1` orthonormal eigenbases of the direction generators, one per
/// MASA in the order of [`mub_masa_decomposition`]. Each basis is a list of
/// `p` unit vectors.
pub fn mub_bases(p: usize) -> Result<Vec<Vec<Vec<C64>>>> {
    check_prime(p)?;
    let omega = C64::from_polar(1.0, 2.0 * PI / p as f64);
    directions(p)
        .into_iter()
        .map(|(c, d)| {
            let w = weyl(p, c, d);
            let mut wp = CMatrix::identity(p);
            for _ in 0..p {
                wp = wp.matmul(&w);
            }
            // W^p = γ I; rescale by the principal p-th root of γ.
            let gamma = wp[(0, 0)];
            let root = gamma.powf(1.0 / p as f64);
            let w = w.scale(root.inv());
            let mut powers = vec![CMatrix::identity(p)];
            for m in 1..p {
                powers.push(powers[m - 1].matmul(&w));
            }
            (0..p)
                .map(|k| {
                    let mut proj = CMatrix::zeros(p);
                    for (m, wm) in powers.iter().enumerate() {
                        proj.add_scaled(omega.powi(-((k * m) as i32)), wm);
                    }
                    let proj = proj.scale_real(1.0 / p as f64);
                    let rank = proj.trace().re;
                    let idem = proj.matmul(&proj).max_diff(&proj);
                    if (rank - 1.0).abs() > 1e-8 || idem > 1e-8 {
                        return Err(GpcError::DegenerateProjection { index: k, rank });
                    }
                    let col = (0..p)
                        .max_by(|&a, &b| {
                            let na: f64 = (0..p).map(|r| proj[(r, a)].norm_sqr()).sum();
                            let nb: f64 = (0..p).map(|r| proj[(r, b)].norm_sqr()).sum();
                            na.total_cmp(&nb)
                        })
                        .expect("p >= 2");
                    let v: Vec<C64> = (0..p).map(|r| proj[(r, col)]).collect();
                    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    Ok(v.into_iter().map(|z| z / norm).collect())
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::qubit_pauli_decomposition;
    use crate::subalgebra::{is_complementary, mutual_span_residual, COMPLEMENTARITY_TOL};

    fn overlap(a: &[C64], b: &[C64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.conj() * y)
            .sum::<C64>()
            .norm()
    }

    #[test]
    fn primes() {
        let found: Vec<usize> = (0..30).filter(|&p| is_prime(p)).collect();
        assert_eq!(found, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(matches!(
            mub_masa_decomposition(4),
            Err(GpcError::NotPrime(4))
        ));
        assert!(matches!(
            mub_masa_decomposition(17),
            Err(GpcError::PrimeTooLarge(17))
        ));
        assert!(mub_bases(9).is_err());
    }

    #[test]
    fn p2_matches_qubit_pauli() {
        let d = mub_masa_decomposition(2).unwrap();
        let q = qubit_pauli_decomposition().unwrap();
        assert_eq!(d.len(), 3);
        // As an unordered set of subspaces.
        for part in d.parts() {
            let hits = q
                .parts()
                .iter()
                .filter(|o| mutual_span_residual(&part.basis, &o.basis) < 1e-12)
                .count();
            assert_eq!(hits, 1);
        }
    }

    #[test]
    fn p3_pairwise_complementary() {
        let d = mub_masa_decomposition(3).unwrap();
        assert_eq!(d.len(), 4);
        let mut pairs = 0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert!(
                    is_complementary(&d.parts()[i], &d.parts()[j], COMPLEMENTARITY_TOL)
                        .unwrap()
                        .complementary
                );
                pairs += 1;
            }
        }
        assert_eq!(pairs, 6);
        assert!(d.spanning());
        assert!(d.validation().passed);
    }

    #[test]
    fn bases_are_unbiased() {
        for p in [2usize, 3] {
            let bases = mub_bases(p).unwrap();
            assert_eq!(bases.len(), p + 1);
            let target = 1.0 / (p as f64).sqrt();
            for (i, bi) in bases.iter().enumerate() {
                for (a, u) in bi.iter().enumerate() {
                    for (b, v) in bi.iter().enumerate() {
                        let expect = if a == b { 1.0 } else { 0.0 };
                        assert!((overlap(u, v) - expect).abs() < 1e-10);
                    }
                }
                for bj in bases.iter().skip(i + 1) {
                    for u in bi {
                        for v in bj {
                            assert!((overlap(u, v) - target).abs() < 1e-10);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn standard_basis_is_z_direction() {
        let bases = mub_bases(5).unwrap();
        for (k, v) in bases[0].iter().enumerate() {
            assert!((v[k].norm() - 1.0).abs() < 1e-12);
        }
    }
}
