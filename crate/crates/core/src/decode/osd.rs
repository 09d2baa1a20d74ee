//! Ordered-statistics post-processing and the combined BP+OSD decoder.

use serde::{Deserialize, Serialize};

use super::bp::{BpDecoder, BpOptions};
use super::{check_priors, llr_weight, DecodeProblem, DecodeResult, Method, SyndromeDecoder};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BposdParams {
    pub max_iter: usize,
    /// 0 runs plain order-0 OSD; larger values enable the combination sweep.
    pub order: usize,
    pub clamp: f64,
}

impl BposdParams {
    /// `max_iter = ⌊d/2⌋` (at least 1) and `order = min(d², 60)`.
    pub fn from_distance(d: usize) -> Self {
        Self {
            max_iter: (d / 2).max(1),
            order: (d * d).min(60),
            clamp: 30.0,
        }
    }
}

/// Reduced system for one syndrome: pivot columns and the reduced column of
/// every non-pivot, in reliability order.
struct Reduced {
    order: Vec<usize>,
    pivots: Vec<usize>,
    rhs: Vec<bool>,
    /// For each non-pivot position (in `order`), its reduced column over pivot rows.
    free_cols: Vec<(usize, Vec<bool>)>,
}

fn reduce(h: &BitMatrix, syndrome: &BitVector, llrs: &[f64]) -> Result<Reduced> {
    let mut order: Vec<usize> = (0..h.cols()).collect();
    order.sort_by(|&a, &b| llrs[a].total_cmp(&llrs[b]).then(a.cmp(&b)));
    let aug = h.select_columns(&order).hstack(&BitMatrix::from_fn(h.rows(), 1, |r, _| syndrome.get(r)));
    let rref = aug.rref();
    let last = h.cols();
    if rref.pivots.last() == Some(&last) {
        return Err(Error::InconsistentSyndrome);
    }
    let m = &rref.matrix;
    let rank = rref.pivots.len();
    let mut is_pivot = vec![false; last];
    for &p in &rref.pivots {
        is_pivot[p] = true;
    }
    let rhs = (0..rank).map(|i| m.get(i, last)).collect();
    let free_cols = (0..last)
        .filter(|&j| !is_pivot[j])
        .map(|j| (j, (0..rank).map(|i| m.get(i, j)).collect()))
        .collect();
    Ok(Reduced {
        order,
        pivots: rref.pivots,
        rhs,
        free_cols,
    })
}

/// Ordered-statistics decoding from per-mechanism LLRs.
///
/// Columns are sorted by ascending LLR (ties by index) and the first
/// independent set becomes the information set. Order 0 returns the unique
/// solution with all other positions zero; a positive order also tries every
/// single flip outside the information set and every pair among the first
/// `order` of those positions, keeping the lowest prior-weighted cost.
pub fn osd_postprocess(problem: &DecodeProblem, llrs: &[f64], order: usize) -> Result<DecodeResult> {
    if llrs.len() != problem.h.cols() {
        return Err(Error::DimensionMismatch {
            what: "llr count",
            expected: problem.h.cols(),
            found: llrs.len(),
        });
    }
    let weights: Vec<f64> = problem.priors.iter().map(|&p| llr_weight(p)).collect();
    osd_with_weights(&problem.h, &weights, &problem.syndrome, llrs, order)
}

fn osd_with_weights(h: &BitMatrix, weights: &[f64], syndrome: &BitVector, llrs: &[f64], order: usize) -> Result<DecodeResult> {
    let red = reduce(h, syndrome, llrs)?;
    let rank = red.pivots.len();
    let build = |flips: &[usize]| -> (f64, BitVector) {
        let mut xr = red.rhs.clone();
        let mut x = BitVector::zeros(h.cols());
        for &f in flips {
            let (pos, col) = &red.free_cols[f];
            for i in 0..rank {
                xr[i] ^= col[i];
            }
            x.set(red.order[*pos], true);
        }
        for (i, &bit) in xr.iter().enumerate() {
            if bit {
                x.set(red.order[red.pivots[i]], true);
            }
        }
        let cost = x.iter_ones().map(|q| weights[q]).sum();
        (cost, x)
    };
    let (mut best_cost, mut best) = build(&[]);
    if order > 0 {
        let nfree = red.free_cols.len();
        let mut consider = |flips: &[usize]| {
            let (c, x) = build(flips);
            if c < best_cost - 1e-12 {
                best_cost = c;
                best = x;
            }
        };
        for f in 0..nfree {
            consider(&[f]);
        }
        let lim = order.min(nfree);
        for a in 0..lim {
            for b in a + 1..lim {
                consider(&[a, b]);
            }
        }
    }
    debug_assert_eq!(&h.mul_vec(&best), syndrome);
    Ok(DecodeResult {
        estimate: best,
        converged: false,
        method: if order == 0 { Method::BpOsd0 } else { Method::BpOsdCs },
        soft: llrs.to_vec(),
    })
}

/// BP; on non-convergence, OSD on the final BP beliefs.
pub struct BposdDecoder {
    bp: BpDecoder,
    weights: Vec<f64>,
    params: BposdParams,
}

impl BposdDecoder {
    pub fn new(h: BitMatrix, priors: Vec<f64>, params: BposdParams) -> Result<Self> {
        check_priors(h.cols(), &priors)?;
        let weights = priors.iter().map(|&p| llr_weight(p)).collect();
        let bp = BpDecoder::new(
            h,
            priors,
            BpOptions {
                max_iter: params.max_iter,
                clamp: params.clamp,
                run_all_iterations: false,
            },
        )?;
        Ok(Self { bp, weights, params })
    }

    pub fn params(&self) -> &BposdParams {
        &self.params
    }
}

impl SyndromeDecoder for BposdDecoder {
    fn decode(&self, syndrome: &BitVector) -> Result<DecodeResult> {
        let r = self.bp.run(syndrome)?;
        if r.converged {
            return Ok(r);
        }
        osd_with_weights(self.bp.check_matrix(), &self.weights, syndrome, &r.soft, self.params.order)
    }

    fn check_matrix(&self) -> &BitMatrix {
        self.bp.check_matrix()
    }
}
