//! Generalized Pauli channels
//! `α(A) = (1 − Σλ) Tr(A)/n · I + Σ_i λ_i E_i(A)` over a validated
//! decomposition, with Choi-matrix and coefficient-based certification of
//! complete positivity.

pub mod certify;
mod kraus;
pub mod qubit;
mod sampling;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use certify::{CertifierRegistry, CpCertifier};
pub use kraus::{kraus_cp_check, kraus_form, KrausForm, KrausSlot, KRAUS_SIGN_TOL};
pub use sampling::{
    sample_cp_agreement, sample_lambda, SampleBox, SampleStats, DEFAULT_SAMPLE_MARGIN,
};

use crate::constructions::{Decomposition, DecompositionRegistry};
use crate::error::{GpcError, Result};
use crate::matcore::{hermitian_eigenvalues, CMatrix, C64};

/// Tolerance of the restriction and reconstruction identities.
pub const CHANNEL_TOL: f64 = 1e-10;
/// Relative scale of the default numeric positivity tolerance.
pub const NUMERIC_CP_SCALE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct GeneralizedPauliChannel {
    decomposition: Arc<Decomposition>,
    lambda: Vec<f64>,
}

impl GeneralizedPauliChannel {
    /// Fails if `lambda` does not have one finite entry per part or the
    /// decomposition does not validate.
    pub fn new(decomposition: Arc<Decomposition>, lambda: Vec<f64>) -> Result<Self> {
        if lambda.len() != decomposition.len() {
            return Err(GpcError::LambdaLength {
                expected: decomposition.len(),
                found: lambda.len(),
            });
        }
        if lambda.iter().any(|l| !l.is_finite()) {
            return Err(GpcError::NonFinite);
        }
        decomposition.ensure_valid()?;
        Ok(GeneralizedPauliChannel {
            decomposition,
            lambda,
        })
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomposition
    }

    pub fn decomposition_arc(&self) -> &Arc<Decomposition> {
        &self.decomposition
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn n(&self) -> usize {
        self.decomposition.n()
    }

    pub fn lambda_sum(&self) -> f64 {
        self.lambda.iter().sum()
    }

    pub fn apply(&self, a: &CMatrix) -> Result<CMatrix> {
        let n = self.n();
        if a.dim() != n {
            return Err(GpcError::DimensionMismatch {
                expected: n,
                found: a.dim(),
            });
        }
        let tracial = (1.0 - self.lambda_sum()) / n as f64;
        let mut out = CMatrix::identity(n).scale(a.trace() * tracial);
        for (part, &l) in self.decomposition.parts().iter().zip(&self.lambda) {
            if l != 0.0 {
                out.add_scaled(C64::new(l, 0.0), &part.conditional_expectation(a)?);
            }
        }
        Ok(out)
    }

    /// Applies the channel to an element of part `i` and checks that the
    /// result is the depolarizing image `λ_i A + (1 − λ_i) Tr(A)/n · I`.
    pub fn restrict_check(&self, i: usize, a: &CMatrix) -> Result<CMatrix> {
        let part = self
            .decomposition
            .parts()
            .get(i)
            .ok_or_else(|| GpcError::InvalidArgument(format!("part index {i} out of range")))?;
        let scale = a.hs_norm().max(1.0);
        let residual = part.projection_residual(a)?;
        if residual > CHANNEL_TOL * scale {
            return Err(GpcError::NotInSubalgebra { residual });
        }
        let out = self.apply(a)?;
        let l = self.lambda[i];
        let n = self.n() as f64;
        let mut expect = a.scale_real(l);
        expect.add_scaled(a.trace() * ((1.0 - l) / n), &CMatrix::identity(self.n()));
        let deviation = out.max_diff(&expect);
        if deviation > CHANNEL_TOL * scale {
            return Err(GpcError::RestrictionMismatch { part: i, deviation });
        }
        Ok(out)
    }

    /// Choi matrix `Σ_ij α(E_ij) ⊗ E_ij`, output factor first.
    pub fn choi(&self) -> CMatrix {
        choi_of(self.n(), |e| self.apply(e).expect("dimension matches"))
    }

    /// Choi positivity with the default relative tolerance.
    pub fn numeric_cp(&self) -> NumericCp {
        numeric_cp_of(&self.choi(), None)
    }

    pub fn numeric_cp_with_tol(&self, tol: f64) -> NumericCp {
        numeric_cp_of(&self.choi(), Some(tol))
    }

    /// Named margins of the coefficient conditions; the channel is CP iff all
    /// are nonnegative.
    pub fn condition_margins(&self) -> Vec<Margin> {
        condition_margins(&self.decomposition, &self.lambda)
    }

    pub fn analytic_cp(&self) -> CpReport {
        let margins = self.condition_margins();
        let numeric = self.numeric_cp();
        CpReport {
            analytic_cp: margins.iter().all(|m| m.value >= 0.0),
            numeric_cp: numeric.cp,
            min_choi_eigenvalue: numeric.min_eigenvalue,
            condition_margins: margins,
            tolerance_used: numeric.tolerance,
        }
    }

    pub fn kraus_form(&self) -> Result<KrausForm> {
        kraus_form(self)
    }
}

/// `Σ_ij f(E_ij) ⊗ E_ij` for a linear map `f` on `M_n`.
pub fn choi_of(n: usize, mut f: impl FnMut(&CMatrix) -> CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(n * n);
    let mut unit = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            unit[(i, j)] = C64::new(1.0, 0.0);
            let image = f(&unit);
            unit[(i, j)] = C64::new(0.0, 0.0);
            for a in 0..n {
                for c in 0..n {
                    out[(a * n + i, c * n + j)] = image[(a, c)];
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericCp {
    pub cp: bool,
    pub min_eigenvalue: f64,
    pub tolerance: f64,
}

/// Positivity of a Choi matrix: CP iff the minimal eigenvalue is at least
/// `-tol`, by default `1e-9 · max(1, max |entry|)`.
pub fn numeric_cp_of(choi: &CMatrix, tol: Option<f64>) -> NumericCp {
    let tolerance = tol.unwrap_or(NUMERIC_CP_SCALE * choi.max_abs().max(1.0));
    let min_eigenvalue = hermitian_eigenvalues(choi)
        .map(|v| v[0])
        .unwrap_or(f64::NEG_INFINITY);
    NumericCp {
        cp: min_eigenvalue >= -tolerance,
        min_eigenvalue,
        tolerance,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub name: String,
    pub value: f64,
}

/// Margins of the coefficient conditions:
/// - `part<i>`: `1 + n²λ_i/dim A_i' − Σλ`, for each part whose commutant has
///   non-identity elements;
/// - `global`: `Σ_j λ_j (n²/dim A_j' − 1) + 1`;
/// - `extension`: `(1 − Σλ)/n`, only when the commutant system does not span
///   `M_n`.
pub fn condition_margins(d: &Decomposition, lambda: &[f64]) -> Vec<Margin> {
    let n = d.n() as f64;
    let nn = n * n;
    let sum: f64 = lambda.iter().sum();
    let mut out = Vec::with_capacity(lambda.len() + 2);
    let mut global = 1.0;
    for (i, &l) in lambda.iter().enumerate() {
        let dc = d.commutant_basis(i).len() as f64;
        if dc > 1.0 {
            out.push(Margin {
                name: format!("part{}", i + 1),
                value: 1.0 + nn * l / dc - sum,
            });
        }
        global += l * (nn / dc - 1.0);
    }
    out.push(Margin {
        name: "global".into(),
        value: global,
    });
    if !d.commutant_spanning() {
        out.push(Margin {
            name: "extension".into(),
            value: (1.0 - sum) / n,
        });
    }
    out
}

/// Analytic and numeric complete-positivity verdicts for one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpReport {
    pub analytic_cp: bool,
    pub numeric_cp: bool,
    pub min_choi_eigenvalue: f64,
    pub condition_margins: Vec<Margin>,
    pub tolerance_used: f64,
}

impl CpReport {
    pub fn min_margin(&self) -> f64 {
        self.condition_margins
            .iter()
            .map(|m| m.value)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn agrees(&self) -> bool {
        self.analytic_cp == self.numeric_cp
    }
}

/// A decomposition referenced by builder name or given inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecompositionSpec {
    Named(String),
    Inline(Box<Decomposition>),
}

impl DecompositionSpec {
    pub fn resolve(&self, registry: &DecompositionRegistry) -> Result<Decomposition> {
        match self {
            DecompositionSpec::Named(name) => registry.build(name),
            DecompositionSpec::Inline(d) => Ok((**d).clone()),
        }
    }
}

/// Channel file: `{"decomposition": <name or inline>, "lambda": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub decomposition: DecompositionSpec,
    pub lambda: Vec<f64>,
}

impl ChannelSpec {
    pub fn build(&self, registry: &DecompositionRegistry) -> Result<GeneralizedPauliChannel> {
        let d = self.decomposition.resolve(registry)?;
        GeneralizedPauliChannel::new(Arc::new(d), self.lambda.clone())
    }
}
