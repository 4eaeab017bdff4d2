use serde::{Deserialize, Serialize};

use crate::constructions::Decomposition;
use crate::error::{GpcError, Result};
use crate::matcore::{matrix_unit, CMatrix, C64};
use crate::subalgebra::{extend_orthonormal, normalized_identity, orthonormality_violation};

use super::{choi_of, GeneralizedPauliChannel, CHANNEL_TOL};

/// Coefficients at or above this value count as nonnegative.
pub const KRAUS_SIGN_TOL: f64 = 1e-12;

/// Where an element of the Kraus-type system comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "slot", rename_all = "lowercase")]
pub enum KrausSlot {
    Identity,
    /// Non-identity commutant element `k` (1-based within the commutant
    /// basis) of part `part` (0-based).
    Commutant {
        part: usize,
        index: usize,
    },
    /// Element completing the system to an orthonormal basis of `M_n`.
    Extension {
        index: usize,
    },
}

/// `α(A) = Σ_t c_t V_t† A V_t` over an HS-orthonormal system `V_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausForm {
    pub coefficients: Vec<f64>,
    pub elements: Vec<CMatrix>,
    pub groups: Vec<KrausSlot>,
}

impl KrausForm {
    pub fn new(
        coefficients: Vec<f64>,
        elements: Vec<CMatrix>,
        groups: Vec<KrausSlot>,
    ) -> Result<Self> {
        if coefficients.len() != elements.len() || groups.len() != elements.len() {
            return Err(GpcError::InvalidArgument(format!(
                "{} coefficients, {} elements, {} group labels",
                coefficients.len(),
                elements.len(),
                groups.len()
            )));
        }
        if elements.is_empty() {
            return Err(GpcError::EmptyInput("Kraus elements"));
        }
        Ok(KrausForm {
            coefficients,
            elements,
            groups,
        })
    }

    pub fn apply(&self, a: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(a.dim());
        for (c, v) in self.coefficients.iter().zip(&self.elements) {
            if *c != 0.0 {
                out.add_scaled(C64::new(*c, 0.0), &v.sandwich(a));
            }
        }
        out
    }

    pub fn choi(&self) -> CMatrix {
        choi_of(self.elements[0].dim(), |e| self.apply(e))
    }

    pub fn orthonormality_violation(&self) -> f64 {
        orthonormality_violation(&self.elements)
    }
}

/// Identity element, the non-identity commutant elements of every part, and
/// (when these do not span `M_n`) an orthonormal completion from matrix units.
pub(crate) fn kraus_system(d: &Decomposition) -> Result<(Vec<CMatrix>, Vec<KrausSlot>)> {
    let n = d.n();
    let mut elements = vec![normalized_identity(n)];
    let mut groups = vec![KrausSlot::Identity];
    for part in 0..d.len() {
        for (index, u) in d.commutant_basis(part).iter().enumerate().skip(1) {
            elements.push(u.clone());
            groups.push(KrausSlot::Commutant { part, index });
        }
    }
    let violation = orthonormality_violation(&elements);
    if violation > CHANNEL_TOL {
        return Err(GpcError::NotOrthonormal { violation });
    }
    if !d.commutant_spanning() {
        let mut units = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                units.push(matrix_unit(n, i, j)?);
            }
        }
        let extra = extend_orthonormal(&elements, &units, 1e-8)?;
        for (index, w) in extra.into_iter().enumerate() {
            elements.push(w);
            groups.push(KrausSlot::Extension { index });
        }
    }
    Ok((elements, groups))
}

/// Coefficients of the slots of [`kraus_system`] for a given `λ`.
pub(crate) fn kraus_coefficients(
    d: &Decomposition,
    lambda: &[f64],
    groups: &[KrausSlot],
) -> Vec<f64> {
    let n = d.n() as f64;
    let base = (1.0 - lambda.iter().sum::<f64>()) / n;
    let part_term: Vec<f64> = lambda
        .iter()
        .enumerate()
        .map(|(j, l)| n * l / d.commutant_basis(j).len() as f64)
        .collect();
    groups
        .iter()
        .map(|g| match *g {
            KrausSlot::Identity => base + part_term.iter().sum::<f64>(),
            KrausSlot::Commutant { part, .. } => base + part_term[part],
            KrausSlot::Extension { .. } => base,
        })
        .collect()
}

pub fn kraus_form(ch: &GeneralizedPauliChannel) -> Result<KrausForm> {
    let d = ch.decomposition();
    let (elements, groups) = kraus_system(d)?;
    let coefficients = kraus_coefficients(d, ch.lambda(), &groups);
    KrausForm::new(coefficients, elements, groups)
}

/// CP verdict from coefficient signs; valid for HS-orthonormal systems only.
pub fn kraus_cp_check(form: &KrausForm) -> Result<bool> {
    let violation = form.orthonormality_violation();
    if violation > CHANNEL_TOL {
        return Err(GpcError::NotOrthonormal { violation });
    }
    Ok(form.coefficients.iter().all(|&c| c >= -KRAUS_SIGN_TOL))
}
