//! Syndrome decoders: exact minimum-cost decoding and BP+OSD.
//!
//! A decoder is built once for a check matrix and a prior per mechanism and
//! then decodes any number of syndromes. Every returned estimate satisfies
//! `h · estimate = syndrome`.

mod bp;
mod mle;
mod osd;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

pub use bp::{BpDecoder, BpOptions};
pub use mle::{MleDecoder, MleOptions};
pub use osd::{osd_postprocess, BposdDecoder, BposdParams};

/// Log-likelihood weight `ln((1−p)/p)` of a mechanism with prior `p`.
pub fn llr_weight(p: f64) -> f64 {
    ((1.0 - p) / p).ln()
}

fn check_priors(cols: usize, priors: &[f64]) -> Result<()> {
    if priors.len() != cols {
        return Err(Error::DimensionMismatch {
            what: "prior count",
            expected: cols,
            found: priors.len(),
        });
    }
    if let Some(p) = priors.iter().find(|p| !(**p > 0.0 && **p < 0.5)) {
        return Err(Error::InvalidParameter(format!("mechanism prior {p} outside (0, 0.5)")));
    }
    Ok(())
}

/// A decoding instance: checks × mechanisms, priors and an observed syndrome.
#[derive(Clone, Debug)]
pub struct DecodeProblem {
    pub h: BitMatrix,
    pub priors: Vec<f64>,
    pub syndrome: BitVector,
}

impl DecodeProblem {
    pub fn new(h: BitMatrix, priors: Vec<f64>, syndrome: BitVector) -> Result<Self> {
        check_priors(h.cols(), &priors)?;
        if syndrome.len() != h.rows() {
            return Err(Error::DimensionMismatch {
                what: "syndrome length",
                expected: h.rows(),
                found: syndrome.len(),
            });
        }
        Ok(Self { h, priors, syndrome })
    }

    pub fn uniform(h: BitMatrix, p: f64, syndrome: BitVector) -> Result<Self> {
        let priors = vec![p; h.cols()];
        Self::new(h, priors, syndrome)
    }

    /// Total `Σ ln((1−p)/p)` over the support of `x`.
    pub fn cost(&self, x: &BitVector) -> f64 {
        x.iter_ones().map(|q| llr_weight(self.priors[q])).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Mle,
    Bp,
    BpOsd0,
    BpOsdCs,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Mle => "mle",
            Method::Bp => "bp",
            Method::BpOsd0 => "bp+osd0",
            Method::BpOsdCs => "bp+osd-cs",
        })
    }
}

#[derive(Clone, Debug)]
pub struct DecodeResult {
    pub estimate: BitVector,
    /// BP reached a syndrome-consistent hard decision (always true for MLE).
    pub converged: bool,
    pub method: Method,
    /// Per-mechanism log-likelihood ratios; empty for MLE.
    pub soft: Vec<f64>,
}

/// A decoder bound to a fixed check matrix and priors.
pub trait SyndromeDecoder: Send + Sync {
    fn decode(&self, syndrome: &BitVector) -> Result<DecodeResult>;
    fn check_matrix(&self) -> &BitMatrix;
}

/// Which decoder to build.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecoderSpec {
    Mle,
    Bposd(BposdParams),
}

impl DecoderSpec {
    /// Table defaults for a code of distance `d`.
    pub fn bposd_for_distance(d: usize) -> Self {
        DecoderSpec::Bposd(BposdParams::from_distance(d))
    }

    pub fn build(&self, h: &BitMatrix, priors: &[f64]) -> Result<Box<dyn SyndromeDecoder>> {
        Ok(match self {
            DecoderSpec::Mle => Box::new(MleDecoder::new(h.clone(), priors.to_vec(), MleOptions::default())?),
            DecoderSpec::Bposd(params) => Box::new(BposdDecoder::new(h.clone(), priors.to_vec(), params.clone())?),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            DecoderSpec::Mle => "mle",
            DecoderSpec::Bposd(_) => "bposd",
        }
    }
}

/// One-shot exact decode.
pub fn mle_decode(problem: &DecodeProblem) -> Result<DecodeResult> {
    MleDecoder::new(problem.h.clone(), problem.priors.clone(), MleOptions::default())?.decode(&problem.syndrome)
}

/// One-shot exact decode of a space-time syndrome difference against `a`.
pub fn mle_decode_spacetime(a: &BitMatrix, priors: &[f64], delta_s: &BitVector) -> Result<DecodeResult> {
    MleDecoder::new(a.clone(), priors.to_vec(), MleOptions::default())?.decode(delta_s)
}

/// One-shot belief propagation.
pub fn bp_decode(problem: &DecodeProblem, max_iter: usize) -> Result<DecodeResult> {
    let opts = BpOptions {
        max_iter,
        ..BpOptions::default()
    };
    BpDecoder::new(problem.h.clone(), problem.priors.clone(), opts)?.decode(&problem.syndrome)
}

/// One-shot BP followed by OSD when BP does not converge.
pub fn bposd_decode(problem: &DecodeProblem, params: &BposdParams) -> Result<DecodeResult> {
    BposdDecoder::new(problem.h.clone(), problem.priors.clone(), params.clone())?.decode(&problem.syndrome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priors_are_validated() {
        let h = BitMatrix::identity(2);
        assert!(DecodeProblem::new(h.clone(), vec![0.1, 0.5], BitVector::zeros(2)).is_err());
        assert!(DecodeProblem::new(h.clone(), vec![0.1], BitVector::zeros(2)).is_err());
        assert!(DecodeProblem::new(h.clone(), vec![0.1, 0.2], BitVector::zeros(3)).is_err());
        assert!(DecodeProblem::new(h, vec![0.1, 0.2], BitVector::zeros(2)).is_ok());
    }

    #[test]
    fn llr_weight_sign() {
        assert!(llr_weight(0.1) > 0.0);
        assert!((llr_weight(0.25) - 3f64.ln()).abs() < 1e-12);
    }
}
