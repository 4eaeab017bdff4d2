//! Seeded cross-check of the analytic CP conditions against Choi positivity.
//!
//! Sample `i` draws its `λ` from a ChaCha stream keyed by `(seed, i)`, so the
//! statistics do not depend on how the samples are scheduled across threads.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::Decomposition;
use crate::error::{GpcError, Result};

use super::kraus::{kraus_coefficients, kraus_system};
use super::{condition_margins, GeneralizedPauliChannel, KRAUS_SIGN_TOL};

pub const DEFAULT_SAMPLE_MARGIN: f64 = 1e-6;

/// Interval applied to every coordinate of `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub lo: f64,
    pub hi: f64,
}

impl SampleBox {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(GpcError::InvalidArgument(format!(
                "bad sampling box [{lo}, {hi}]"
            )));
        }
        Ok(SampleBox { lo, hi })
    }
}

impl std::str::FromStr for SampleBox {
    type Err = GpcError;

    /// Parses `"lo,hi"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || GpcError::InvalidArgument(format!("box must be 'lo,hi', got '{s}'"));
        let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        SampleBox::new(lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub decomposition: String,
    pub count: usize,
    pub seed: u64,
    pub margin: f64,
    pub agree: usize,
    pub skipped: usize,
    pub disagree: usize,
    /// Samples where the Kraus coefficient signs disagree with the Choi verdict.
    pub kraus_disagree: usize,
    /// Smallest Choi eigenvalue seen among analytically CP samples.
    pub worst_cp_min_eigenvalue: Option<f64>,
    /// Smallest `|min margin|` among the evaluated samples.
    pub closest_margin: Option<f64>,
}

#[derive(Default, Clone, Copy)]
struct Partial {
    agree: usize,
    skipped: usize,
    disagree: usize,
    kraus_disagree: usize,
    worst_cp_eig: Option<f64>,
    closest: Option<f64>,
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl Partial {
    fn merge(self, o: Partial) -> Partial {
        Partial {
            agree: self.agree + o.agree,
            skipped: self.skipped + o.skipped,
            disagree: self.disagree + o.disagree,
            kraus_disagree: self.kraus_disagree + o.kraus_disagree,
            worst_cp_eig: min_opt(self.worst_cp_eig, o.worst_cp_eig),
            closest: min_opt(self.closest, o.closest),
        }
    }
}

/// The `λ` vector of sample `index`.
pub fn sample_lambda(seed: u64, index: u64, len: usize, bx: SampleBox) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..len)
        .map(|_| bx.lo + (bx.hi - bx.lo) * rng.gen::<f64>())
        .collect()
}

pub fn sample_cp_agreement(
    d: Arc<Decomposition>,
    count: usize,
    seed: u64,
    bx: SampleBox,
    margin: f64,
) -> Result<SampleStats> {
    if margin.is_nan() || margin <= 0.0 {
        return Err(GpcError::InvalidArgument(format!(
            "margin must be positive, got {margin}"
        )));
    }
    d.ensure_valid()?;
    let (_, groups) = kraus_system(&d)?;
    let r = d.len();

    let total = (0..count as u64)
        .into_par_iter()
        .map(|i| -> Result<Partial> {
            let lambda = sample_lambda(seed, i, r, bx);
            let min_margin = condition_margins(&d, &lambda)
                .iter()
                .map(|m| m.value)
                .fold(f64::INFINITY, f64::min);
            if min_margin.abs() <= margin {
                return Ok(Partial {
                    skipped: 1,
                    ..Partial::default()
                });
            }
            let analytic = min_margin >= 0.0;
            let kraus = kraus_coefficients(&d, &lambda, &groups)
                .iter()
                .all(|&c| c >= -KRAUS_SIGN_TOL);
            let ch = GeneralizedPauliChannel::new(d.clone(), lambda)?;
            let numeric = ch.numeric_cp();
            let agrees = analytic == numeric.cp;
            Ok(Partial {
                agree: agrees as usize,
                disagree: (!agrees) as usize,
                kraus_disagree: (kraus != numeric.cp) as usize,
                worst_cp_eig: analytic.then_some(numeric.min_eigenvalue),
                closest: Some(min_margin.abs()),
                ..Partial::default()
            })
        })
        .try_reduce(Partial::default, |a, b| Ok(a.merge(b)))?;

    Ok(SampleStats {
        decomposition: d.name().to_string(),
        count,
        seed,
        margin,
        agree: total.agree,
        skipped: total.skipped,
        disagree: total.disagree,
        kraus_disagree: total.kraus_disagree,
        worst_cp_min_eigenvalue: total.worst_cp_eig,
        closest_margin: total.closest,
    })
}
