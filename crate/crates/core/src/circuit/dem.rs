//! Pauli-frame propagation, detector error models and circuit-level sampling.

use std::collections::HashMap;
use std::fmt::Write as _;

use indexmap::IndexMap;
use rand::Rng;
use rayon::prelude::*;

use super::{Channel, FaultLocation, Op, StabilizerCircuit};
use crate::combo;
use crate::decode::{DecoderSpec, SyndromeDecoder};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::sampling::{run_shots, shot_rng, SampleStats, ShotOutcome};

/// A Pauli inserted into the frame just before or after an op.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Injection {
    pub op: usize,
    pub before: bool,
    pub qubit: usize,
    pub x: bool,
    pub z: bool,
}

/// Propagates Pauli frames through the ideal circuit.
pub struct FrameSimulator<'a> {
    circuit: &'a StabilizerCircuit,
    meas_detectors: Vec<Vec<usize>>,
    meas_observables: Vec<Vec<usize>>,
}

impl<'a> FrameSimulator<'a> {
    pub fn new(circuit: &'a StabilizerCircuit) -> Self {
        let m = circuit.measurements.len();
        let mut meas_detectors = vec![Vec::new(); m];
        for (d, ms) in circuit.detectors.iter().enumerate() {
            for &i in ms {
                meas_detectors[i].push(d);
            }
        }
        let mut meas_observables = vec![Vec::new(); m];
        for (o, ms) in circuit.observables.iter().enumerate() {
            for &i in ms {
                meas_observables[i].push(o);
            }
        }
        Self {
            circuit,
            meas_detectors,
            meas_observables,
        }
    }

    /// Detector and observable flips caused by `injections`.
    ///
    /// With `gauge`, frames are also randomized by Paulis that act trivially
    /// on the ideal state (Z after a Z reset or measurement, X after an X
    /// one), which exposes any detector that is not deterministic.
    pub fn run(&self, injections: &[Injection], mut gauge: Option<&mut dyn rand::RngCore>) -> (BitVector, BitVector) {
        let c = self.circuit;
        let nq = c.num_qubits();
        let mut fx = vec![false; nq];
        let mut fz = vec![false; nq];
        let mut dets = BitVector::zeros(c.detectors.len());
        let mut obs = BitVector::zeros(c.observables.len());
        let start = match gauge {
            Some(_) => 0,
            None => match injections.iter().map(|i| i.op).min() {
                Some(s) => s,
                None => return (dets, obs),
            },
        };
        let mut meas = c.measurements_before(start);
        let inject = |fx: &mut [bool], fz: &mut [bool], op: usize, before: bool| {
            for inj in injections.iter().filter(|i| i.op == op && i.before == before) {
                fx[inj.qubit] ^= inj.x;
                fz[inj.qubit] ^= inj.z;
            }
        };
        for (i, op) in c.ops.iter().enumerate().skip(start) {
            inject(&mut fx, &mut fz, i, true);
            let mut flipped = None;
            match *op {
                Op::PrepZ(q) => {
                    fx[q] = false;
                    fz[q] = gauge.as_mut().is_some_and(|g| g.gen());
                }
                Op::PrepX(q) => {
                    fz[q] = false;
                    fx[q] = gauge.as_mut().is_some_and(|g| g.gen());
                }
                Op::Cx(a, b) => {
                    fx[b] ^= fx[a];
                    fz[a] ^= fz[b];
                }
                Op::MeasZ(q) => {
                    flipped = Some(fx[q]);
                    if let Some(g) = gauge.as_mut() {
                        fz[q] ^= g.gen::<bool>();
                    }
                }
                Op::MeasX(q) => {
                    flipped = Some(fz[q]);
                    if let Some(g) = gauge.as_mut() {
                        fx[q] ^= g.gen::<bool>();
                    }
                }
                Op::Idle(_) | Op::Tick => {}
            }
            if let Some(f) = flipped {
                if f {
                    for &d in &self.meas_detectors[meas] {
                        dets.flip(d);
                    }
                    for &o in &self.meas_observables[meas] {
                        obs.flip(o);
                    }
                }
                meas += 1;
            }
            inject(&mut fx, &mut fz, i, false);
        }
        (dets, obs)
    }
}

impl StabilizerCircuit {
    fn measurements_before(&self, op: usize) -> usize {
        self.ops[..op]
            .iter()
            .filter(|o| matches!(o, Op::MeasZ(_) | Op::MeasX(_)))
            .count()
    }

    /// True when no detector or observable fires in `trials` noiseless,
    /// gauge-randomized runs.
    pub fn detectors_deterministic(&self, trials: usize, seed: u64) -> bool {
        let sim = FrameSimulator::new(self);
        (0..trials as u64).all(|t| {
            let mut rng = shot_rng(seed, t);
            let (d, o) = sim.run(&[], Some(&mut rng));
            d.is_zero() && o.is_zero()
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mechanism {
    pub p: f64,
    pub detectors: Vec<usize>,
    pub observables: Vec<usize>,
}

/// Independent error mechanisms with their detector and observable flips.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorErrorModel {
    pub mechanisms: Vec<Mechanism>,
    pub num_detectors: usize,
    pub num_observables: usize,
}

impl DetectorErrorModel {
    /// Detectors × mechanisms.
    pub fn check_matrix(&self) -> BitMatrix {
        let mut h = BitMatrix::zeros(self.num_detectors, self.mechanisms.len());
        for (j, m) in self.mechanisms.iter().enumerate() {
            for &d in &m.detectors {
                h.set(d, j, true);
            }
        }
        h
    }

    /// Observables × mechanisms.
    pub fn observable_matrix(&self) -> BitMatrix {
        let mut o = BitMatrix::zeros(self.num_observables, self.mechanisms.len());
        for (j, m) in self.mechanisms.iter().enumerate() {
            for &i in &m.observables {
                o.set(i, j, true);
            }
        }
        o
    }

    pub fn priors(&self) -> Vec<f64> {
        self.mechanisms.iter().map(|m| m.p).collect()
    }

    /// `error(p) D.. L..` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for m in &self.mechanisms {
            let _ = write!(s, "error({})", m.p);
            for d in &m.detectors {
                let _ = write!(s, " D{d}");
            }
            for o in &m.observables {
                let _ = write!(s, " L{o}");
            }
            s.push('\n');
        }
        s
    }
}

/// Effect of one Pauli case at a location, as (detector flips, observable flips).
type Effect = (BitVector, BitVector);

fn xor(a: &Effect, b: &Effect) -> Effect {
    (&a.0 ^ &b.0, &a.1 ^ &b.1)
}

fn single(sim: &FrameSimulator, loc: &FaultLocation, qubit: usize, x: bool, z: bool) -> Effect {
    sim.run(
        &[Injection {
            op: loc.op,
            before: loc.before,
            qubit,
            x,
            z,
        }],
        None,
    )
}

/// Elementary (probability, effect) cases of one channel. Y effects are the
/// XOR of the X and Z effects at the same location.
fn channel_cases(sim: &FrameSimulator, loc: &FaultLocation) -> Vec<(f64, Effect)> {
    let pauli_effects = |q: usize| {
        let ex = single(sim, loc, q, true, false);
        let ez = single(sim, loc, q, false, true);
        let ey = xor(&ex, &ez);
        [ex, ey, ez]
    };
    match loc.channel {
        Channel::FlipX(q, p) => vec![(p, single(sim, loc, q, true, false))],
        Channel::FlipZ(q, p) => vec![(p, single(sim, loc, q, false, true))],
        Channel::Depolarize1(q, p) => pauli_effects(q).into_iter().map(|e| (p / 3.0, e)).collect(),
        Channel::Depolarize2(a, b, p) => {
            let ea = pauli_effects(a);
            let eb = pauli_effects(b);
            let zero = (BitVector::zeros(ea[0].0.len()), BitVector::zeros(ea[0].1.len()));
            let mut out = Vec::with_capacity(15);
            for i in 0..4 {
                for j in 0..4 {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    let left = if i == 0 { &zero } else { &ea[i - 1] };
                    let right = if j == 0 { &zero } else { &eb[j - 1] };
                    out.push((p / 15.0, xor(left, right)));
                }
            }
            out
        }
    }
}

/// Detector error model of a noisy circuit.
///
/// Every channel case is propagated through the ideal circuit; cases with
/// identical (detector, observable) signatures are merged with
/// `p1(1−p2) + p2(1−p1)` and silent cases are dropped. Mechanisms keep the
/// order in which their signature first appears.
pub fn extract_dem(circuit: &StabilizerCircuit) -> DetectorErrorModel {
    let sim = FrameSimulator::new(circuit);
    let locations = circuit.fault_locations();
    let cases: Vec<Vec<(f64, Effect)>> = locations
        .par_iter()
        .map(|loc| {
            channel_cases(&sim, loc)
                .into_iter()
                .filter(|(p, e)| *p > 0.0 && !(e.0.is_zero() && e.1.is_zero()))
                .collect()
        })
        .collect();
    let mut merged: IndexMap<Effect, f64> = IndexMap::new();
    for (p, e) in cases.into_iter().flatten() {
        let q = merged.entry(e).or_insert(0.0);
        *q = *q * (1.0 - p) + p * (1.0 - *q);
    }
    DetectorErrorModel {
        mechanisms: merged
            .into_iter()
            .map(|((d, o), p)| Mechanism {
                p,
                detectors: d.iter_ones().collect(),
                observables: o.iter_ones().collect(),
            })
            .collect(),
        num_detectors: circuit.detectors.len(),
        num_observables: circuit.observables.len(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FaultDistance {
    /// Smallest undetectable logical fault set, with one witness (mechanism indices).
    Exact(usize, Vec<usize>),
    /// No undetectable logical fault set of size ≤ the bound.
    Above(usize),
}

impl FaultDistance {
    pub fn value(&self) -> Option<usize> {
        match self {
            FaultDistance::Exact(w, _) => Some(*w),
            FaultDistance::Above(_) => None,
        }
    }
}

/// Minimum number of DEM mechanisms whose detector flips cancel while some
/// observable flips, searched by ascending size with a meet-in-the-middle
/// table on detector signatures.
///
/// Size `w` splits into halves `⌊w/2⌋` and `⌈w/2⌉`; overlapping halves
/// cannot produce false hits because smaller sizes were already exhausted.
pub fn fault_distance(dem: &DetectorErrorModel, w_max: usize, guard: u128) -> Result<FaultDistance> {
    let m = dem.mechanisms.len();
    let dets: Vec<BitVector> = dem
        .mechanisms
        .iter()
        .map(|x| BitVector::from_indices(dem.num_detectors, x.detectors.iter().copied()))
        .collect();
    let obs: Vec<BitVector> = dem
        .mechanisms
        .iter()
        .map(|x| BitVector::from_indices(dem.num_observables, x.observables.iter().copied()))
        .collect();
    let signature = |set: &[usize]| -> Effect {
        let mut d = BitVector::zeros(dem.num_detectors);
        let mut o = BitVector::zeros(dem.num_observables);
        for &i in set {
            d ^= &dets[i];
            o ^= &obs[i];
        }
        (d, o)
    };
    for w in 1..=w_max {
        let (a, b) = (w / 2, w - w / 2);
        let work = combo::binomial(m, a) + combo::binomial(m, b);
        if work > guard {
            return Err(Error::GuardExceeded(format!(
                "fault search at size {w} needs {work} subsets (guard {guard})"
            )));
        }
        // detector signature -> distinct observable patterns, each with a witness
        let mut table: HashMap<BitVector, Vec<(BitVector, Vec<usize>)>> = HashMap::new();
        combo::for_each(m, a, |set| {
            let (d, o) = signature(set);
            let entry = table.entry(d).or_default();
            if !entry.iter().any(|(x, _)| *x == o) {
                entry.push((o, set.to_vec()));
            }
            true
        });
        let hit = (0..m).into_par_iter().find_map_first(|first| {
            let mut found = None;
            combo::for_each_with_first(m, b, first, |set| {
                let (d, o) = signature(set);
                if let Some((_, witness)) = table.get(&d).and_then(|v| v.iter().find(|(x, _)| *x != o)) {
                    let mut all: Vec<usize> = witness.iter().chain(set).copied().collect();
                    all.sort_unstable();
                    found = Some(all);
                    return false;
                }
                true
            });
            found
        });
        if let Some(witness) = hit {
            return Ok(FaultDistance::Exact(w, witness));
        }
    }
    Ok(FaultDistance::Above(w_max))
}

/// A decoder for the detector error model of one memory circuit.
pub struct CircuitDecoder {
    pub dem: DetectorErrorModel,
    observables: BitMatrix,
    decoder: Box<dyn SyndromeDecoder>,
}

impl CircuitDecoder {
    pub fn new(circuit: &StabilizerCircuit, spec: &DecoderSpec) -> Result<Self> {
        let dem = extract_dem(circuit);
        let decoder = spec.build(&dem.check_matrix(), &dem.priors())?;
        Ok(Self {
            observables: dem.observable_matrix(),
            dem,
            decoder,
        })
    }

    /// Predicted observable flips for a detector outcome.
    pub fn predict(&self, detectors: &BitVector) -> Result<BitVector> {
        let est = self.decoder.decode(detectors)?.estimate;
        Ok(self.observables.mul_vec(&est))
    }
}

/// Samples mechanisms of the model independently and decodes each shot.
pub fn sample_circuit_level_with(dec: &CircuitDecoder, shots: u64, seed: u64) -> Result<SampleStats> {
    let dem = &dec.dem;
    run_shots(shots, |i| {
        let mut rng = shot_rng(seed, i);
        let mut d = BitVector::zeros(dem.num_detectors);
        let mut o = BitVector::zeros(dem.num_observables);
        for m in &dem.mechanisms {
            if rng.gen::<f64>() < m.p {
                for &x in &m.detectors {
                    d.flip(x);
                }
                for &x in &m.observables {
                    o.flip(x);
                }
            }
        }
        let mask = &dec.predict(&d)? ^ &o;
        Ok(ShotOutcome {
            success: mask.is_zero(),
            residual_logical_mask: mask,
        })
    })
}

/// Circuit-level memory sampling with a decoder built from the circuit's model.
pub fn sample_circuit_level(circuit: &StabilizerCircuit, spec: &DecoderSpec, shots: u64, seed: u64) -> Result<SampleStats> {
    let dec = CircuitDecoder::new(circuit, spec)?;
    sample_circuit_level_with(&dec, shots, seed)
}
