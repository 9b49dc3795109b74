//! Rayleigh–Schrödinger perturbation series for the ground state of
//! `H = p²/2 + x²/2 + g·x^{2M}` in the harmonic-oscillator basis.

mod cache;
mod journal;
mod oracle;
mod recursion;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::precision::{double_factorial, BigRational, BigReal, PrecisionContext};

pub use cache::{cache_path, read_cache, write_cache};
pub use oracle::{rational_oracle_series, rational_oracle_states, RationalState};
pub use recursion::{
    apply_potential, compute_series, compute_series_with, rs_step, Checkpointing,
    PotentialOperator, Progress, SeriesRun, WavefunctionState,
};

#[derive(Debug, Error)]
pub enum RsError {
    #[error("oscillator degree M must be at least 2, got {0}")]
    InvalidDegree(u32),
    #[error("inconsistent recursion history: {0}")]
    Inconsistent(String),
    #[error("{path}:{line}: {reason}")]
    Cache {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{path}: {reason}")]
    Journal { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RsError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RsError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Half-degree `M` of the perturbation `x^{2M}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OscillatorSpec {
    m: u32,
}

impl OscillatorSpec {
    pub fn new(m: u32) -> Result<Self, RsError> {
        if m < 2 {
            return Err(RsError::InvalidDegree(m));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `(2M-1)!!/2^M`, the exact first-order coefficient.
    pub fn first_order_exact(&self) -> BigRational {
        let num = double_factorial(2 * self.m as u64 - 1);
        let den = num_bigint::BigUint::from(1u32) << self.m;
        BigRational::new(num.into(), den.into())
    }
}

/// `a_0 … a_K` for one `M`, computed under a single precision context.
#[derive(Clone, Debug)]
pub struct SeriesCoefficients {
    m: u32,
    coefficients: Vec<BigReal>,
    ctx: PrecisionContext,
}

impl SeriesCoefficients {
    pub fn new(m: u32, coefficients: Vec<BigReal>, ctx: PrecisionContext) -> Self {
        assert!(!coefficients.is_empty(), "a series holds at least a_0");
        Self {
            m,
            coefficients,
            ctx,
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Highest computed order `K`.
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn get(&self, k: usize) -> Option<&BigReal> {
        self.coefficients.get(k)
    }

    pub fn coefficients(&self) -> &[BigReal] {
        &self.coefficients
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn dps_used(&self) -> u32 {
        self.ctx.dps()
    }

    pub fn guard_used(&self) -> u32 {
        self.ctx.guard()
    }

    /// The first `k + 1` coefficients.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.order());
        Self::new(self.m, self.coefficients[..=k].to_vec(), self.ctx)
    }

    /// Orders `k >= 1` whose sign differs from `(-1)^{k+1}`.
    pub fn sign_violations(&self) -> Vec<usize> {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(k, a)| a.signum() != if k % 2 == 1 { 1 } else { -1 })
            .map(|(k, _)| k)
            .collect()
    }
}
