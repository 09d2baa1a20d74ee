//! Code dimension, logical operators and minimum distance.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::code::{CodeKind, CssCode, LogicalBasis, Pauli};
use crate::error::{Error, Result};
use crate::gf2::{inverse, BitMatrix, BitVector, RowBasis};

/// `n − rank(hx) − rank(hz)`, after checking the CSS condition.
pub fn dimension(hx: &BitMatrix, hz: &BitMatrix) -> Result<usize> {
    if hx.cols() != hz.cols() {
        return Err(Error::DimensionMismatch {
            what: "hx/hz column count",
            expected: hx.cols(),
            found: hz.cols(),
        });
    }
    if !hz.mul(&hx.transpose()).is_zero() {
        return Err(Error::NotCss);
    }
    Ok(hx.cols() - hx.rank() - hz.rank())
}

/// Kernel vectors of `h_opp` that extend the rowspace of `h_same`.
fn logical_candidates(h_same: &BitMatrix, h_opp: &BitMatrix) -> Vec<BitVector> {
    let mut span = RowBasis::from_matrix(h_same);
    h_opp
        .nullspace_basis()
        .into_iter()
        .filter(|v| span.insert(v.clone()))
        .collect()
}

/// A generic paired logical basis: X logicals from `ker(hz)` modulo `rowspace(hx)`,
/// Z logicals likewise, then recombined so that `lx · lzᵀ = I`.
pub fn symplectic_logical_basis(hx: &BitMatrix, hz: &BitMatrix) -> LogicalBasis {
    let n = hx.cols();
    let xs = logical_candidates(hx, hz);
    let zs = logical_candidates(hz, hx);
    let lx = BitMatrix::from_rows(n, &xs).expect("kernel vectors have length n");
    let z0 = BitMatrix::from_rows(n, &zs).expect("kernel vectors have length n");
    let pairing = lx.mul(&z0.transpose());
    let inv = inverse(&pairing).expect("logical pairing of a CSS code is nondegenerate");
    let lz = inv.transpose().mul(&z0);
    LogicalBasis { lx, lz }
}

/// Explicit weight-(2ℓ+1) logicals of an LCS code with shift 1.
///
/// Operator `s` sits on the diagonal columns `(i, i)`: copy `s+i` of left
/// column `(i, i)` for `i = 0..=ℓ` and of right column `(i, i)` for `i < ℓ`.
/// X and Z representatives share the same support.
pub fn lcs_canonical_logicals(ell: usize, lift: usize) -> Result<LogicalBasis> {
    if ell == 0 || lift < 2 {
        return Err(Error::InvalidParameter(format!(
            "canonical logicals need ell >= 1 and L >= 2, got ({ell}, {lift})"
        )));
    }
    let left = (ell + 1) * (ell + 1);
    let n = (left + ell * ell) * lift;
    let rows: Vec<BitVector> = (0..lift)
        .map(|s| {
            let lefts = (0..=ell).map(|i| (i * (ell + 1) + i, i));
            let rights = (0..ell).map(|i| (left + i * ell + i, i));
            BitVector::from_indices(n, lefts.chain(rights).map(|(col, i)| col * lift + (s + i) % lift))
        })
        .collect();
    let m = BitMatrix::from_rows(n, &rows)?;
    Ok(LogicalBasis { lx: m.clone(), lz: m })
}

/// Canonical logicals for a code built by `lcs_code` with shift 1.
pub fn canonical_logicals_for(code: &CssCode) -> Result<LogicalBasis> {
    match code.meta.kind {
        CodeKind::Lcs { ell, lift, shift: 1 } => lcs_canonical_logicals(ell, lift),
        ref other => Err(Error::Unsupported(format!(
            "canonical logicals are defined for shift-1 LCS codes, not {other:?}"
        ))),
    }
}

/// Outcome of a capped distance search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Distance {
    Exact(usize),
    /// No logical of weight ≤ the cap exists.
    Above(usize),
}

impl Distance {
    pub fn value(self) -> Option<usize> {
        match self {
            Distance::Exact(d) => Some(d),
            Distance::Above(_) => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Exact(d) => write!(f, "{d}"),
            Distance::Above(w) => write!(f, ">{w}"),
        }
    }
}

fn sector(code: &CssCode, pauli: Pauli) -> (&BitMatrix, &BitMatrix) {
    // X logicals commute with hz and are trivial modulo hx.
    match pauli {
        Pauli::X => (&code.hz, &code.hx),
        Pauli::Z => (&code.hx, &code.hz),
    }
}

struct KernelSearch<'a> {
    adj: Vec<Vec<usize>>,
    col_checks: Vec<Vec<usize>>,
    max_deg: usize,
    stabilizers: &'a RowBasis,
    n: usize,
}

impl KernelSearch<'_> {
    /// Extends `support` (all elements ≥ `lo`) to a logical of total weight ≤ `budget`.
    fn extend(&self, support: &mut Vec<usize>, synd: &mut Vec<bool>, unsat: &mut usize, lo: usize, budget: usize) -> bool {
        if *unsat == 0 {
            let v = BitVector::from_indices(self.n, support.iter().copied());
            // A stabilizer here cannot be part of a minimal logical.
            return !self.stabilizers.contains(&v);
        }
        if support.len() >= budget || support.len() + unsat.div_ceil(self.max_deg) > budget {
            return false;
        }
        // Branch on the unsatisfied check with the fewest candidate qubits.
        let mut best: Option<(usize, usize)> = None;
        for (c, &s) in synd.iter().enumerate() {
            if s {
                let cand = self.adj[c].iter().filter(|&&q| q > lo && !support.contains(&q)).count();
                if best.is_none_or(|(_, b)| cand < b) {
                    best = Some((c, cand));
                }
            }
        }
        let (check, _) = best.expect("unsat > 0");
        for &q in &self.adj[check] {
            if q <= lo || support.contains(&q) {
                continue;
            }
            self.toggle(q, synd, unsat);
            support.push(q);
            let found = self.extend(support, synd, unsat, lo, budget);
            support.pop();
            self.toggle(q, synd, unsat);
            if found {
                return true;
            }
        }
        false
    }

    fn toggle(&self, q: usize, synd: &mut [bool], unsat: &mut usize) {
        for &c in &self.col_checks[q] {
            synd[c] = !synd[c];
            if synd[c] {
                *unsat += 1;
            } else {
                *unsat -= 1;
            }
        }
    }

    fn exists_with_min(&self, q0: usize, w: usize) -> bool {
        let mut synd = vec![false; self.adj.len()];
        let mut unsat = 0;
        self.toggle(q0, &mut synd, &mut unsat);
        let mut support = vec![q0];
        self.extend(&mut support, &mut synd, &mut unsat, q0, w)
    }
}

/// Minimum weight of a `pauli`-type logical, searched up to `w_cap`.
///
/// A minimum-weight logical has no proper nonzero sub-support in the kernel,
/// so it is reached from its smallest qubit by repeatedly adding a qubit of
/// some unsatisfied check.
pub fn exact_distance(code: &CssCode, pauli: Pauli, w_cap: usize) -> Distance {
    if code.k == 0 {
        return Distance::Above(w_cap);
    }
    let (h, stab) = sector(code, pauli);
    let stabilizers = RowBasis::from_matrix(stab);
    let adj = h.adjacency();
    let mut col_checks = vec![Vec::new(); h.cols()];
    for (c, qs) in adj.iter().enumerate() {
        for &q in qs {
            col_checks[q].push(c);
        }
    }
    let max_deg = col_checks.iter().map(Vec::len).max().unwrap_or(1).max(1);
    let search = KernelSearch {
        adj,
        col_checks,
        max_deg,
        stabilizers: &stabilizers,
        n: code.n,
    };
    for w in 1..=w_cap {
        if (0..code.n).into_par_iter().any(|q0| search.exists_with_min(q0, w)) {
            return Distance::Exact(w);
        }
    }
    Distance::Above(w_cap)
}

/// Randomized information-set upper bound on the `pauli` distance.
///
/// Each trial permutes columns, row-reduces a kernel basis and keeps the
/// lightest reduced row that is not a stabilizer. The result is the minimum
/// over trials, so it is non-increasing in `trials` for a fixed seed.
pub fn distance_upper_bound(code: &CssCode, pauli: Pauli, trials: usize, seed: u64) -> Result<usize> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let (h, stab) = sector(code, pauli);
    let stabilizers = RowBasis::from_matrix(stab);
    let kernel = BitMatrix::from_rows(code.n, &h.nullspace_basis())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..code.n).collect();
    let mut best = usize::MAX;
    for _ in 0..trials {
        perm.shuffle(&mut rng);
        let reduced = kernel.permute_columns(&perm).rref().matrix;
        for r in 0..reduced.rows() {
            let w = reduced.row_weight(r);
            if w == 0 || w >= best {
                continue;
            }
            let v = BitVector::from_indices(code.n, reduced.row_ones(r).map(|c| perm[c]));
            if !stabilizers.contains(&v) {
                best = w;
            }
        }
    }
    if best == usize::MAX {
        return Err(Error::InvalidParameter("code has no logical operators".into()));
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureRow {
    pub ell: usize,
    pub lift: usize,
    pub n: usize,
    pub k: usize,
    pub d_x: Distance,
    pub d_z: Distance,
    pub predicted: usize,
    pub matches: bool,
}

/// Exact distances of the given (ℓ, L) codes against `min(L, 2ℓ+1)`.
pub fn conjecture_rows(pairs: &[(usize, usize)]) -> Result<Vec<ConjectureRow>> {
    pairs
        .iter()
        .map(|&(ell, lift)| {
            let code = crate::product::lcs_code(ell, lift, 1)?;
            let predicted = lift.min(2 * ell + 1);
            let cap = 2 * ell + 2;
            let d_x = exact_distance(&code, Pauli::X, cap);
            let d_z = exact_distance(&code, Pauli::Z, cap);
            Ok(ConjectureRow {
                ell,
                lift,
                n: code.n,
                k: code.k,
                d_x,
                d_z,
                predicted,
                matches: d_x == Distance::Exact(predicted) && d_z == Distance::Exact(predicted),
            })
        })
        .collect()
}

/// All pairs with `1 ≤ ℓ ≤ ell_max` and `2 ≤ L ≤ lift_max`.
pub fn verify_distance_conjecture(ell_max: usize, lift_max: usize) -> Result<Vec<ConjectureRow>> {
    let pairs: Vec<(usize, usize)> = (1..=ell_max)
        .flat_map(|ell| (2..=lift_max).map(move |lift| (ell, lift)))
        .collect();
    conjecture_rows(&pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::{disjoint_surface_code, lcs_code, surface_code};

    #[test]
    fn dimension_examples() {
        assert_eq!(lcs_code(1, 3, 1).unwrap().k, 3);
        let empty = BitMatrix::zeros(0, 4);
        assert_eq!(dimension(&empty, &empty).unwrap(), 4);
        let hx = BitMatrix::from_dense(&[vec![1, 0]]).unwrap();
        let hz = BitMatrix::from_dense(&[vec![1, 1]]).unwrap();
        assert!(dimension(&hx, &hz).is_err());
    }

    #[test]
    fn generic_basis_is_symplectic() {
        for code in [surface_code(1).unwrap(), lcs_code(1, 3, 1).unwrap(), disjoint_surface_code(2, 2).unwrap()] {
            let basis = symplectic_logical_basis(&code.hx, &code.hz);
            assert_eq!(basis.k(), code.k);
            basis.validate(&code.hx, &code.hz).unwrap();
        }
    }

    #[test]
    fn canonical_small_instance() {
        let b = lcs_canonical_logicals(1, 3).unwrap();
        // left (0,0) = column 0, left (1,1) = column 3, right (0,0) = column 4
        let want: Vec<usize> = vec![0, 3 * 3 + 1, 4 * 3];
        assert_eq!(b.lx.row_ones(0).collect::<Vec<_>>(), want);
        let code = lcs_code(1, 3, 1).unwrap();
        b.validate(&code.hx, &code.hz).unwrap();
        assert_eq!(code.logicals, b);
    }

    #[test]
    fn canonical_product_reduces_to_weight_lift() {
        let (ell, lift) = (2, 4);
        let code = lcs_code(ell, lift, 1).unwrap();
        let b = lcs_canonical_logicals(ell, lift).unwrap();
        let mut acc = BitVector::zeros(code.n);
        for s in 0..lift {
            acc ^= &b.lx.row(s);
        }
        // X-check rows are indexed (a, b) with a ≤ ℓ, b < ℓ; add every copy of (i, i).
        for i in 0..ell {
            let base = (i * ell + i) * lift;
            for c in 0..lift {
                acc ^= &code.hx.row(base + c);
            }
        }
        assert_eq!(acc.weight(), lift);
    }

    #[test]
    fn canonical_rejects_non_lcs() {
        let code = disjoint_surface_code(1, 3).unwrap();
        assert!(canonical_logicals_for(&code).is_err());
        assert!(lcs_canonical_logicals(0, 3).is_err());
    }

    #[test]
    fn exact_distance_examples() {
        assert_eq!(exact_distance(&surface_code(1).unwrap(), Pauli::X, 4), Distance::Exact(2));
        let c = lcs_code(1, 3, 1).unwrap();
        assert_eq!(exact_distance(&c, Pauli::X, 4), Distance::Exact(3));
        assert_eq!(exact_distance(&c, Pauli::Z, 4), Distance::Exact(3));
        assert_eq!(exact_distance(&c, Pauli::Z, 2), Distance::Above(2));
        assert_eq!(exact_distance(&lcs_code(1, 5, 1).unwrap(), Pauli::X, 4), Distance::Exact(3));
    }

    #[test]
    fn disjoint_distance_is_ell_plus_one() {
        for ell in 1..=3 {
            let code = disjoint_surface_code(ell, 2).unwrap();
            assert_eq!(exact_distance(&code, Pauli::X, ell + 2), Distance::Exact(ell + 1));
        }
    }

    #[test]
    fn upper_bound_matches_exact() {
        let code = lcs_code(1, 3, 1).unwrap();
        assert_eq!(distance_upper_bound(&code, Pauli::X, 1000, 7).unwrap(), 3);
        let a = distance_upper_bound(&code, Pauli::Z, 3, 11).unwrap();
        let b = distance_upper_bound(&code, Pauli::Z, 30, 11).unwrap();
        assert!(b <= a && b >= 3);
        assert!(distance_upper_bound(&code, Pauli::Z, 0, 1).is_err());
    }

    #[test]
    fn shift_two_distance_agrees() {
        let a = lcs_code(1, 5, 1).unwrap();
        let b = lcs_code(1, 5, 2).unwrap();
        assert_eq!(exact_distance(&a, Pauli::X, 4), exact_distance(&b, Pauli::X, 4));
    }

    #[test]
    fn conjecture_small() {
        let rows = conjecture_rows(&[(1, 3), (1, 4), (2, 4)]).unwrap();
        assert!(rows.iter().all(|r| r.matches), "{rows:?}");
    }
}
