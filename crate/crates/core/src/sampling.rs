//! Code-capacity and phenomenological Monte Carlo sampling in the bit-flip sector.
//!
//! X errors are drawn on data qubits, measured by the Z checks `hz`, and a
//! shot fails when the residual after correction anticommutes with some Z
//! logical. Every shot draws from its own ChaCha stream keyed by
//! `(seed, shot index)`, so results do not depend on thread scheduling.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::CssCode;
use crate::combo;
use crate::decode::{DecoderSpec, SyndromeDecoder};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

const CHUNK: u64 = 512;
/// Smallest prior handed to decoders when a physical rate is zero.
const MIN_PRIOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    CodeCapacity,
    Phenomenological,
    CircuitLevel,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::CodeCapacity => "code_capacity",
            NoiseKind::Phenomenological => "phenomenological",
            NoiseKind::CircuitLevel => "circuit_level",
        }
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "code_capacity" | "code-capacity" | "cc" => Ok(NoiseKind::CodeCapacity),
            "phenomenological" | "pheno" => Ok(NoiseKind::Phenomenological),
            "circuit_level" | "circuit-level" | "circuit" => Ok(NoiseKind::CircuitLevel),
            other => Err(Error::Parse(format!("unknown noise kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub p: f64,
    /// Syndrome flip rate; defaults to `p` for phenomenological noise.
    pub q: Option<f64>,
    /// Idle depolarizing rate; defaults to `p/10` for circuit-level noise.
    pub p_idle: Option<f64>,
}

impl NoiseSpec {
    pub fn code_capacity(p: f64) -> Self {
        Self {
            kind: NoiseKind::CodeCapacity,
            p,
            q: None,
            p_idle: None,
        }
    }

    pub fn phenomenological(p: f64, q: f64) -> Self {
        Self {
            kind: NoiseKind::Phenomenological,
            p,
            q: Some(q),
            p_idle: None,
        }
    }

    pub fn circuit_level(p: f64) -> Self {
        Self {
            kind: NoiseKind::CircuitLevel,
            p,
            q: None,
            p_idle: Some(p / 10.0),
        }
    }

    pub fn q(&self) -> f64 {
        self.q.unwrap_or(self.p)
    }

    pub fn p_idle(&self) -> f64 {
        self.p_idle.unwrap_or(self.p / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p", Some(self.p)), ("q", self.q), ("p_idle", self.p_idle)] {
            if let Some(v) = v {
                if !(0.0..1.0).contains(&v) {
                    return Err(Error::InvalidParameter(format!("{name}={v} outside [0, 1)")));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of one shot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotOutcome {
    pub success: bool,
    /// Bit i set when the residual anticommutes with Z logical i.
    pub residual_logical_mask: BitVector,
}

/// Aggregate result of a sampling run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleStats {
    pub shots: u64,
    pub failures: u64,
    /// Histogram of nonzero logical masks, keyed by the mask bits as an integer.
    pub mask_counts: BTreeMap<u64, u64>,
}

impl SampleStats {
    fn merge(mut self, other: SampleStats) -> SampleStats {
        self.shots += other.shots;
        self.failures += other.failures;
        for (k, v) in other.mask_counts {
            *self.mask_counts.entry(k).or_default() += v;
        }
        self
    }

    fn record(&mut self, outcome: &ShotOutcome) {
        self.shots += 1;
        if !outcome.success {
            self.failures += 1;
            let key = outcome
                .residual_logical_mask
                .iter_ones()
                .filter(|&i| i < 64)
                .fold(0u64, |m, i| m | 1 << i);
            *self.mask_counts.entry(key).or_default() += 1;
        }
    }

    pub fn rate(&self) -> f64 {
        if self.shots == 0 {
            0.0
        } else {
            self.failures as f64 / self.shots as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        binomial_stderr(self.failures, self.shots)
    }

    /// Fraction of shots whose residual flips logical `i` (alone or with others).
    pub fn marginal(&self, i: usize) -> f64 {
        let hits: u64 = self
            .mask_counts
            .iter()
            .filter(|(m, _)| *m >> i & 1 == 1)
            .map(|(_, c)| c)
            .sum();
        hits as f64 / self.shots.max(1) as f64
    }

    /// Fraction of shots whose residual flips exactly the logicals in `mask`.
    pub fn joint(&self, mask: u64) -> f64 {
        self.mask_counts.get(&mask).copied().unwrap_or(0) as f64 / self.shots.max(1) as f64
    }
}

pub fn binomial_stderr(failures: u64, shots: u64) -> f64 {
    if shots == 0 {
        return 0.0;
    }
    let p = failures as f64 / shots as f64;
    (p * (1.0 - p) / shots as f64).sqrt()
}

pub(crate) fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

pub(crate) fn bernoulli_vector(rng: &mut impl Rng, len: usize, p: f64) -> BitVector {
    let mut v = BitVector::zeros(len);
    if p > 0.0 {
        for i in 0..len {
            if rng.gen::<f64>() < p {
                v.set(i, true);
            }
        }
    }
    v
}

pub(crate) fn decoder_prior(p: f64) -> f64 {
    p.max(MIN_PRIOR)
}

/// Runs `shots` independent shots in parallel and sums their outcomes.
pub(crate) fn run_shots<F>(shots: u64, shot: F) -> Result<SampleStats>
where
    F: Fn(u64) -> Result<ShotOutcome> + Sync,
{
    let chunks = shots.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut stats = SampleStats::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(shots) {
                stats.record(&shot(i)?);
            }
            Ok(stats)
        })
        .try_reduce(SampleStats::default, |a, b| Ok(a.merge(b)))
}

fn judge(code: &CssCode, residual: &BitVector) -> ShotOutcome {
    debug_assert!(code.hz.mul_vec(residual).is_zero());
    let mask = code.logical_flips_of_x(residual);
    ShotOutcome {
        success: mask.is_zero(),
        residual_logical_mask: mask,
    }
}

/// One code-capacity shot with an already drawn error.
pub fn code_capacity_shot(code: &CssCode, decoder: &dyn SyndromeDecoder, error: &BitVector) -> Result<ShotOutcome> {
    let correction = decoder.decode(&code.syndrome_of_x(error))?.estimate;
    Ok(judge(code, &(error ^ &correction)))
}

/// Code-capacity sampling with a decoder for `hz`.
pub fn sample_code_capacity_with(
    code: &CssCode,
    decoder: &dyn SyndromeDecoder,
    p: f64,
    shots: u64,
    seed: u64,
) -> Result<SampleStats> {
    NoiseSpec::code_capacity(p).validate()?;
    run_shots(shots, |i| {
        let mut rng = shot_rng(seed, i);
        let e = bernoulli_vector(&mut rng, code.n, p);
        code_capacity_shot(code, decoder, &e)
    })
}

/// Code-capacity sampling: iid X errors, perfect syndrome, one decode per shot.
pub fn sample_code_capacity(code: &CssCode, spec: &DecoderSpec, p: f64, shots: u64, seed: u64) -> Result<SampleStats> {
    let decoder = spec.build(&code.hz, &vec![decoder_prior(p); code.n])?;
    sample_code_capacity_with(code, decoder.as_ref(), p, shots, seed)
}

/// Space-time decoding matrix for `rounds` noisy syndrome rounds.
///
/// Row block `t` reads `H x_t + s̃_t + s̃_{t−1} = Δs_t`; columns are all data
/// errors (prior `p`) followed by all syndrome errors (prior `q`).
pub fn build_pheno_matrix(h: &BitMatrix, rounds: usize, p: f64, q: f64) -> Result<(BitMatrix, Vec<f64>)> {
    if rounds == 0 {
        return Err(Error::InvalidParameter("rounds must be at least 1".into()));
    }
    let (nc, n) = (h.rows(), h.cols());
    let mut a = BitMatrix::zeros(rounds * nc, rounds * (n + nc));
    let data_cols = rounds * n;
    for t in 0..rounds {
        for r in 0..nc {
            for c in h.row_ones(r) {
                a.set(t * nc + r, t * n + c, true);
            }
            a.set(t * nc + r, data_cols + t * nc + r, true);
            if t > 0 {
                a.set(t * nc + r, data_cols + (t - 1) * nc + r, true);
            }
        }
    }
    let mut priors = vec![decoder_prior(p); data_cols];
    priors.extend(std::iter::repeat_n(decoder_prior(q), rounds * nc));
    Ok((a, priors))
}

/// Decoders for the two stages of a phenomenological shot.
pub struct PhenoDecoders {
    pub rounds: usize,
    pub spacetime: Box<dyn SyndromeDecoder>,
    pub static_: Box<dyn SyndromeDecoder>,
}

impl PhenoDecoders {
    pub fn build(code: &CssCode, spec: &DecoderSpec, p: f64, q: f64, rounds: usize) -> Result<Self> {
        let (a, priors) = build_pheno_matrix(&code.hz, rounds, p, q)?;
        Ok(Self {
            rounds,
            spacetime: spec.build(&a, &priors)?,
            static_: spec.build(&code.hz, &vec![decoder_prior(p); code.n])?,
        })
    }
}

/// One phenomenological shot: `rounds` noisy rounds, then a perfect round.
pub fn phenomenological_shot(code: &CssCode, dec: &PhenoDecoders, p: f64, q: f64, rng: &mut impl Rng) -> Result<ShotOutcome> {
    let (n, nc, rounds) = (code.n, code.hz.rows(), dec.rounds);
    let mut error = BitVector::zeros(n);
    let mut prev = BitVector::zeros(nc);
    let mut delta = BitVector::zeros(rounds * nc);
    for t in 0..rounds {
        error ^= &bernoulli_vector(rng, n, p);
        let mut s = code.hz.mul_vec(&error);
        s ^= &bernoulli_vector(rng, nc, q);
        for r in (&s ^ &prev).iter_ones() {
            delta.set(t * nc + r, true);
        }
        prev = s;
    }
    let y = dec.spacetime.decode(&delta)?.estimate;
    let mut residual = error;
    for c in y.iter_ones().take_while(|&c| c < rounds * n) {
        residual.flip(c % n);
    }
    let final_syndrome = code.hz.mul_vec(&residual);
    residual ^= &dec.static_.decode(&final_syndrome)?.estimate;
    Ok(judge(code, &residual))
}

/// Phenomenological sampling with the same decoder family in both stages.
pub fn sample_phenomenological(
    code: &CssCode,
    spec: &DecoderSpec,
    p: f64,
    q: f64,
    rounds: usize,
    shots: u64,
    seed: u64,
) -> Result<SampleStats> {
    NoiseSpec::phenomenological(p, q).validate()?;
    let dec = PhenoDecoders::build(code, spec, p, q, rounds)?;
    sample_phenomenological_with(code, &dec, p, q, shots, seed)
}

pub fn sample_phenomenological_with(
    code: &CssCode,
    dec: &PhenoDecoders,
    p: f64,
    q: f64,
    shots: u64,
    seed: u64,
) -> Result<SampleStats> {
    run_shots(shots, |i| {
        let mut rng = shot_rng(seed, i);
        phenomenological_shot(code, dec, p, q, &mut rng)
    })
}

/// Failure probability of `k` unprotected qubits: `1 − (1−p)^k`.
pub fn unencoded_failure(k: usize, p: f64) -> f64 {
    1.0 - (1.0 - p).powi(k as i32)
}

/// Rate for `k` independent copies of a single-logical code: `1 − (1−p_L)^k`.
pub fn rescale_copies(p_l1: f64, k: usize) -> f64 {
    1.0 - (1.0 - p_l1).powi(k as i32)
}

/// Per-cycle rate from the total over `n_sc` cycles: `1 − (1−p_L)^(1/n_sc)`.
pub fn per_cycle_rate(p_l_total: f64, n_sc: usize) -> f64 {
    1.0 - (1.0 - p_l_total).powf(1.0 / n_sc as f64)
}

/// Decodes every weight-`w` X error and counts logical failures.
pub fn count_failure_configs(code: &CssCode, decoder: &dyn SyndromeDecoder, w: usize, guard: u128) -> Result<u64> {
    let total = combo::binomial(code.n, w);
    if total > guard {
        return Err(Error::GuardExceeded(format!(
            "C({}, {w}) = {total} configurations exceeds {guard}",
            code.n
        )));
    }
    if w == 0 {
        return Ok(0);
    }
    let n = code.n;
    (0..n)
        .into_par_iter()
        .map(|first| {
            let mut failures = 0u64;
            let mut err = None;
            combo::for_each_with_first(n, w, first, |idx| {
                match code_capacity_shot(code, decoder, &BitVector::from_indices(n, idx.iter().copied())) {
                    Ok(o) => {
                        failures += u64::from(!o.success);
                        true
                    }
                    Err(e) => {
                        err = Some(e);
                        false
                    }
                }
            });
            err.map_or(Ok(failures), Err)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Logical failure rate implied by the failure-configuration counts,
/// `Σ N(w) p^w (1−p)^(n−w)`, truncated to the weights supplied.
pub fn failure_rate_from_counts(n: usize, counts: &[(usize, u64)], p: f64) -> f64 {
    counts
        .iter()
        .map(|&(w, c)| c as f64 * p.powi(w as i32) * (1.0 - p).powi((n - w) as i32))
        .sum()
}
