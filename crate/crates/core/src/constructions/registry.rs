//! Name-addressable decomposition builders.
//!
//! Each construction sits behind [`DecompositionBuilder`]; the registry picks
//! the first builder that accepts a key such as `"qubit-pauli"`,
//! `"m4-example2"` or `"mub-p5"`.

use crate::error::{GpcError, Result};

use super::{
    m4_example2_decomposition, mub_masa_decomposition, qubit_pauli_decomposition, Decomposition,
};

pub trait DecompositionBuilder: Send + Sync {
    /// Key pattern shown in listings, e.g. `mub-p<k>`.
    fn pattern(&self) -> &str;

    fn accepts(&self, key: &str) -> bool;

    fn build(&self, key: &str) -> Result<Decomposition>;
}

struct Fixed {
    key: &'static str,
    build: fn() -> Result<Decomposition>,
}

impl DecompositionBuilder for Fixed {
    fn pattern(&self) -> &str {
        self.key
    }

    fn accepts(&self, key: &str) -> bool {
        key == self.key
    }

    fn build(&self, _key: &str) -> Result<Decomposition> {
        (self.build)()
    }
}

struct MubPrime;

impl MubPrime {
    fn parse(key: &str) -> Option<usize> {
        key.strip_prefix("mub-p")?.parse().ok()
    }
}

impl DecompositionBuilder for MubPrime {
    fn pattern(&self) -> &str {
        "mub-p<k>"
    }

    fn accepts(&self, key: &str) -> bool {
        Self::parse(key).is_some()
    }

    fn build(&self, key: &str) -> Result<Decomposition> {
        let p = Self::parse(key).ok_or_else(|| GpcError::UnknownBuilder(key.to_string()))?;
        mub_masa_decomposition(p)
    }
}

pub struct DecompositionRegistry {
    builders: Vec<Box<dyn DecompositionBuilder>>,
}

impl DecompositionRegistry {
    pub fn empty() -> Self {
        DecompositionRegistry {
            builders: Vec::new(),
        }
    }

    pub fn register(&mut self, builder: Box<dyn DecompositionBuilder>) {
        self.builders.push(builder);
    }

    pub fn patterns(&self) -> Vec<&str> {
        self.builders.iter().map(|b| b.pattern()).collect()
    }

    pub fn build(&self, key: &str) -> Result<Decomposition> {
        self.builders
            .iter()
            .find(|b| b.accepts(key))
            .ok_or_else(|| GpcError::UnknownBuilder(key.to_string()))?
            .build(key)
    }
}

impl Default for DecompositionRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Fixed {
            key: "qubit-pauli",
            build: qubit_pauli_decomposition,
        }));
        r.register(Box::new(Fixed {
            key: "m4-example2",
            build: m4_example2_decomposition,
        }));
        r.register(Box::new(MubPrime));
        r
    }
}
