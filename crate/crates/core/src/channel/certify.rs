//! Complete-positivity certifiers selectable by name.

use crate::error::{GpcError, Result};

use super::{kraus_cp_check, GeneralizedPauliChannel};

pub trait CpCertifier: Send + Sync {
    fn name(&self) -> &str;

    fn certify(&self, ch: &GeneralizedPauliChannel) -> Result<bool>;
}

/// Coefficient inequalities of the commutant expansion.
pub struct Analytic;

/// Minimal eigenvalue of the Choi matrix.
pub struct Numeric;

/// Signs of the Kraus-type coefficients over the orthonormal system.
pub struct Kraus;

impl CpCertifier for Analytic {
    fn name(&self) -> &str {
        "analytic"
    }

    fn certify(&self, ch: &GeneralizedPauliChannel) -> Result<bool> {
        Ok(ch.condition_margins().iter().all(|m| m.value >= 0.0))
    }
}

impl CpCertifier for Numeric {
    fn name(&self) -> &str {
        "numeric"
    }

    fn certify(&self, ch: &GeneralizedPauliChannel) -> Result<bool> {
        Ok(ch.numeric_cp().cp)
    }
}

impl CpCertifier for Kraus {
    fn name(&self) -> &str {
        "kraus"
    }

    fn certify(&self, ch: &GeneralizedPauliChannel) -> Result<bool> {
        kraus_cp_check(&ch.kraus_form()?)
    }
}

pub struct CertifierRegistry {
    certifiers: Vec<Box<dyn CpCertifier>>,
}

impl CertifierRegistry {
    pub fn empty() -> Self {
        CertifierRegistry {
            certifiers: Vec::new(),
        }
    }

    pub fn register(&mut self, c: Box<dyn CpCertifier>) {
        self.certifiers.push(c);
    }

    pub fn names(&self) -> Vec<&str> {
        self.certifiers.iter().map(|c| c.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn CpCertifier> {
        self.certifiers
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
            .ok_or_else(|| GpcError::UnknownMethod(name.to_string()))
    }

    /// Runs the named certifiers and returns `(name, verdict)` pairs.
    pub fn run(&self, names: &[&str], ch: &GeneralizedPauliChannel) -> Result<Vec<(String, bool)>> {
        names
            .iter()
            .map(|&n| Ok((n.to_string(), self.get(n)?.certify(ch)?)))
            .collect()
    }
}

impl Default for CertifierRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Analytic));
        r.register(Box::new(Numeric));
        r.register(Box::new(Kraus));
        r
    }
}
