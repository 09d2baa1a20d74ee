//! Product-sum belief propagation in the log domain, flooding schedule.

use serde::{Deserialize, Serialize};

use super::{check_priors, llr_weight, DecodeResult, Method, SyndromeDecoder};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpOptions {
    pub max_iter: usize,
    /// Messages and beliefs are clamped to `±clamp`.
    pub clamp: f64,
    /// Keep iterating after the hard decision satisfies the syndrome.
    pub run_all_iterations: bool,
}

impl Default for BpOptions {
    fn default() -> Self {
        Self {
            max_iter: 1,
            clamp: 30.0,
            run_all_iterations: false,
        }
    }
}

/// `−ln tanh(x/2)`, an involution on `[0, ∞]`.
fn phi(x: f64) -> f64 {
    (2.0 / x.exp_m1()).ln_1p()
}

pub struct BpDecoder {
    h: BitMatrix,
    channel: Vec<f64>,
    /// Variable index of each edge, grouped by check.
    edge_var: Vec<usize>,
    check_start: Vec<usize>,
    /// Edge indices touching each variable.
    var_edges: Vec<Vec<usize>>,
    options: BpOptions,
}

impl BpDecoder {
    pub fn new(h: BitMatrix, priors: Vec<f64>, options: BpOptions) -> Result<Self> {
        check_priors(h.cols(), &priors)?;
        if options.max_iter == 0 {
            return Err(Error::InvalidParameter("BP needs at least one iteration".into()));
        }
        let mut edge_var = Vec::new();
        let mut check_start = vec![0];
        let mut var_edges = vec![Vec::new(); h.cols()];
        for r in 0..h.rows() {
            for c in h.row_ones(r) {
                var_edges[c].push(edge_var.len());
                edge_var.push(c);
            }
            check_start.push(edge_var.len());
        }
        let channel = priors.iter().map(|&p| llr_weight(p)).collect();
        Ok(Self {
            h,
            channel,
            edge_var,
            check_start,
            var_edges,
            options,
        })
    }

    pub fn options(&self) -> &BpOptions {
        &self.options
    }

    pub fn run(&self, syndrome: &BitVector) -> Result<DecodeResult> {
        if syndrome.len() != self.h.rows() {
            return Err(Error::DimensionMismatch {
                what: "syndrome length",
                expected: self.h.rows(),
                found: syndrome.len(),
            });
        }
        let clamp = self.options.clamp;
        let n = self.h.cols();
        let mut v2c: Vec<f64> = self.edge_var.iter().map(|&v| self.channel[v]).collect();
        let mut c2v = vec![0.0; self.edge_var.len()];
        let mut beliefs = self.channel.clone();
        let mut estimate = BitVector::zeros(n);
        let mut converged = false;
        let mut phi_buf: Vec<f64> = Vec::new();
        let mut suffix: Vec<f64> = Vec::new();

        for _ in 0..self.options.max_iter {
            for r in 0..self.h.rows() {
                let (lo, hi) = (self.check_start[r], self.check_start[r + 1]);
                // Tanh rule in the form m = s · φ(Σ φ|m'|) with φ(x) = −ln tanh(x/2),
                // using leave-one-out prefix/suffix sums for stability.
                let mut sign = if syndrome.get(r) { -1.0 } else { 1.0 };
                phi_buf.clear();
                for &m in &v2c[lo..hi] {
                    if m < 0.0 {
                        sign = -sign;
                    }
                    phi_buf.push(phi(m.abs()));
                }
                let deg = hi - lo;
                suffix.clear();
                suffix.resize(deg + 1, 0.0);
                for i in (0..deg).rev() {
                    suffix[i] = suffix[i + 1] + phi_buf[i];
                }
                let mut prefix = 0.0;
                for i in 0..deg {
                    let own = if v2c[lo + i] < 0.0 { -1.0 } else { 1.0 };
                    c2v[lo + i] = (sign * own * phi(prefix + suffix[i + 1])).clamp(-clamp, clamp);
                    prefix += phi_buf[i];
                }
            }
            for v in 0..n {
                let total: f64 = self.channel[v] + self.var_edges[v].iter().map(|&e| c2v[e]).sum::<f64>();
                beliefs[v] = total.clamp(-clamp, clamp);
                for &e in &self.var_edges[v] {
                    v2c[e] = (total - c2v[e]).clamp(-clamp, clamp);
                }
                estimate.set(v, beliefs[v] < 0.0);
            }
            converged = &self.h.mul_vec(&estimate) == syndrome;
            if converged && !self.options.run_all_iterations {
                break;
            }
        }
        Ok(DecodeResult {
            estimate,
            converged,
            method: Method::Bp,
            soft: beliefs,
        })
    }
}

impl SyndromeDecoder for BpDecoder {
    /// Raw BP: errors out when the hard decision does not satisfy the syndrome.
    fn decode(&self, syndrome: &BitVector) -> Result<DecodeResult> {
        let r = self.run(syndrome)?;
        if r.converged {
            Ok(r)
        } else {
            Err(Error::InconsistentSyndrome)
        }
    }

    fn check_matrix(&self) -> &BitMatrix {
        &self.h
    }
}
