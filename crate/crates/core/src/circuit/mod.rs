//! Coloration syndrome-extraction circuits, circuit-level noise and memory experiments.
//!
//! Qubits are laid out as data `0..n`, then one ancilla per Z check, then one
//! per X check. Each cycle measures all Z checks and then all X checks, with
//! one CX layer per color of the respective Tanner-graph edge coloring.

mod dem;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::code::{CodeKind, CssCode, Pauli};
use crate::error::{Error, Result};

pub use dem::{
    extract_dem, fault_distance, sample_circuit_level, sample_circuit_level_with, CircuitDecoder, DetectorErrorModel,
    FaultDistance, Mechanism,
};

/// Largest color count accepted for LCS Tanner graphs.
pub const MAX_LCS_COLORS: usize = 6;

/// A Tanner-graph edge: (check row, qubit).
pub type Edge = (usize, usize);

/// Partitions the Tanner edges of one check type into matchings.
///
/// Repeatedly peels a greedy maximal matching, scanning edges in
/// (check, qubit) order. Errors for LCS codes needing more than six colors.
pub fn color_tanner_edges(code: &CssCode, pauli: Pauli) -> Result<Vec<Vec<Edge>>> {
    let h = code.checks(pauli);
    let mut remaining: Vec<Edge> = (0..h.rows()).flat_map(|r| h.row_ones(r).map(move |q| (r, q))).collect();
    let colors = peel_matchings(&mut remaining, h.rows(), h.cols());
    if matches!(code.meta.kind, CodeKind::Lcs { .. }) && colors.len() > MAX_LCS_COLORS {
        return Err(Error::TooManyColors(colors.len()));
    }
    Ok(colors)
}

fn peel_matchings(remaining: &mut Vec<Edge>, checks: usize, qubits: usize) -> Vec<Vec<Edge>> {
    let mut colors = Vec::new();
    while !remaining.is_empty() {
        let mut check_used = vec![false; checks];
        let mut qubit_used = vec![false; qubits];
        let mut matching = Vec::new();
        remaining.retain(|&(c, q)| {
            if check_used[c] || qubit_used[q] {
                return true;
            }
            check_used[c] = true;
            qubit_used[q] = true;
            matching.push((c, q));
            false
        });
        colors.push(matching);
    }
    colors
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Data,
    AncillaZ,
    AncillaX,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    PrepZ(usize),
    PrepX(usize),
    /// (control, target)
    Cx(usize, usize),
    MeasZ(usize),
    MeasX(usize),
    Idle(usize),
    Tick,
}

impl Op {
    fn qubits(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            Op::PrepZ(q) | Op::PrepX(q) | Op::MeasZ(q) | Op::MeasX(q) | Op::Idle(q) => (Some(q), None),
            Op::Cx(c, t) => (Some(c), Some(t)),
            Op::Tick => (None, None),
        };
        a.into_iter().chain(b)
    }
}

/// Per-location fault rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitNoise {
    /// Gate, preparation and measurement failure probability.
    pub p: f64,
    /// Depolarizing probability of an idle location.
    pub p_idle: f64,
}

impl CircuitNoise {
    pub fn new(p: f64) -> Self {
        Self { p, p_idle: p / 10.0 }
    }
}

/// An elementary fault channel attached to one circuit location.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Channel {
    /// X with probability `p`.
    FlipX(usize, f64),
    /// Z with probability `p`.
    FlipZ(usize, f64),
    /// X, Y or Z, each with probability `p/3`.
    Depolarize1(usize, f64),
    /// Each of the 15 non-identity two-qubit Paulis with probability `p/15`.
    Depolarize2(usize, usize, f64),
}

/// Where a channel acts: just before op `op` (when `before`) or just after.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaultLocation {
    pub op: usize,
    pub before: bool,
    pub channel: Channel,
}

#[derive(Clone, Debug)]
pub struct StabilizerCircuit {
    pub roles: Vec<Role>,
    pub ops: Vec<Op>,
    /// Op index at which each cycle starts.
    pub cycle_starts: Vec<usize>,
    /// Measured qubit of every measurement, in record order.
    pub measurements: Vec<usize>,
    /// Each detector is the parity of these measurement indices.
    pub detectors: Vec<Vec<usize>>,
    pub observables: Vec<Vec<usize>>,
    pub noise: Option<CircuitNoise>,
}

impl StabilizerCircuit {
    pub fn num_qubits(&self) -> usize {
        self.roles.len()
    }

    pub fn count_role(&self, role: Role) -> usize {
        self.roles.iter().filter(|&&r| r == role).count()
    }

    pub fn num_ticks(&self) -> usize {
        self.ops.iter().filter(|o| matches!(o, Op::Tick)).count()
    }

    pub fn cx_layers(&self) -> usize {
        self.ops
            .split(|o| matches!(o, Op::Tick))
            .filter(|layer| layer.iter().any(|o| matches!(o, Op::Cx(..))))
            .count()
    }

    /// Every fault channel implied by the attached noise model.
    ///
    /// Preparations flip after, measurements flip before, CX gates get
    /// two-qubit depolarizing noise and idles single-qubit depolarizing noise.
    pub fn fault_locations(&self) -> Vec<FaultLocation> {
        let Some(noise) = self.noise else {
            return Vec::new();
        };
        let after = |op, channel| FaultLocation { op, before: false, channel };
        let before = |op, channel| FaultLocation { op, before: true, channel };
        let mut out = Vec::new();
        for (i, op) in self.ops.iter().enumerate() {
            let loc = match *op {
                Op::PrepZ(q) => after(i, Channel::FlipX(q, noise.p)),
                Op::PrepX(q) => after(i, Channel::FlipZ(q, noise.p)),
                Op::MeasZ(q) => before(i, Channel::FlipX(q, noise.p)),
                Op::MeasX(q) => before(i, Channel::FlipZ(q, noise.p)),
                Op::Cx(c, t) => after(i, Channel::Depolarize2(c, t, noise.p)),
                Op::Idle(q) => after(i, Channel::Depolarize1(q, noise.p_idle)),
                Op::Tick => continue,
            };
            out.push(loc);
        }
        out
    }

    /// Line-oriented text form: one op per line, `TICK` between layers,
    /// then `DETECTOR` and `OBSERVABLE` records over measurement indices.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for op in &self.ops {
            let _ = match *op {
                Op::PrepZ(q) => writeln!(s, "R {q}"),
                Op::PrepX(q) => writeln!(s, "RX {q}"),
                Op::Cx(c, t) => writeln!(s, "CX {c} {t}"),
                Op::MeasZ(q) => writeln!(s, "M {q}"),
                Op::MeasX(q) => writeln!(s, "MX {q}"),
                Op::Idle(q) => writeln!(s, "I {q}"),
                Op::Tick => writeln!(s, "TICK"),
            };
        }
        for d in &self.detectors {
            let _ = writeln!(s, "DETECTOR {}", join(d));
        }
        for (i, o) in self.observables.iter().enumerate() {
            let _ = writeln!(s, "OBSERVABLE {i} {}", join(o));
        }
        s
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ")
}

/// Attaches circuit-level noise with the default idle rate `p/10`.
pub fn annotate_noise(mut circuit: StabilizerCircuit, p: f64) -> Result<StabilizerCircuit> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::InvalidParameter(format!("circuit noise p={p} outside [0, 0.5)")));
    }
    circuit.noise = Some(CircuitNoise::new(p));
    Ok(circuit)
}

struct Builder {
    ops: Vec<Op>,
    measurements: Vec<usize>,
    layer: Vec<bool>,
}

impl Builder {
    fn push(&mut self, op: Op) -> Option<usize> {
        for q in op.qubits() {
            debug_assert!(!self.layer[q], "qubit {q} used twice in one layer");
            self.layer[q] = true;
        }
        self.ops.push(op);
        match op {
            Op::MeasZ(q) | Op::MeasX(q) => {
                self.measurements.push(q);
                Some(self.measurements.len() - 1)
            }
            _ => None,
        }
    }

    /// Closes a layer, idling every qubit of `active` that was not touched.
    fn tick(&mut self, active: &[usize]) {
        for &q in active {
            if !self.layer[q] {
                self.ops.push(Op::Idle(q));
            }
        }
        self.layer.iter_mut().for_each(|b| *b = false);
        self.ops.push(Op::Tick);
    }
}

struct Layout {
    n: usize,
    z_anc: Vec<usize>,
    x_anc: Vec<usize>,
    z_colors: Vec<Vec<Edge>>,
    x_colors: Vec<Vec<Edge>>,
}

impl Layout {
    fn new(code: &CssCode) -> Result<Self> {
        let n = code.n;
        let mz = code.hz.rows();
        Ok(Self {
            n,
            z_anc: (n..n + mz).collect(),
            x_anc: (n + mz..n + mz + code.hx.rows()).collect(),
            z_colors: color_tanner_edges(code, Pauli::Z)?,
            x_colors: color_tanner_edges(code, Pauli::X)?,
        })
    }

    fn roles(&self) -> Vec<Role> {
        let mut roles = vec![Role::Data; self.n];
        roles.extend(self.z_anc.iter().map(|_| Role::AncillaZ));
        roles.extend(self.x_anc.iter().map(|_| Role::AncillaX));
        roles
    }

    /// One syndrome cycle; returns (Z measurement indices, X measurement indices) per check.
    fn cycle(&self, b: &mut Builder) -> (Vec<usize>, Vec<usize>) {
        let data: Vec<usize> = (0..self.n).collect();
        let block = |b: &mut Builder, anc: &[usize], colors: &[Vec<Edge>], z_type: bool| -> Vec<usize> {
            let active: Vec<usize> = data.iter().chain(anc).copied().collect();
            for &a in anc {
                b.push(if z_type { Op::PrepZ(a) } else { Op::PrepX(a) });
            }
            b.tick(&active);
            for color in colors {
                for &(check, q) in color {
                    let a = anc[check];
                    b.push(if z_type { Op::Cx(q, a) } else { Op::Cx(a, q) });
                }
                b.tick(&active);
            }
            let meas = anc
                .iter()
                .map(|&a| b.push(if z_type { Op::MeasZ(a) } else { Op::MeasX(a) }).unwrap())
                .collect();
            b.tick(&active);
            meas
        };
        let z = block(b, &self.z_anc, &self.z_colors, true);
        let x = block(b, &self.x_anc, &self.x_colors, false);
        (z, x)
    }
}

/// Syndrome-extraction circuit with `cycles` cycles and no detectors.
pub fn build_coloration_circuit(code: &CssCode, cycles: usize) -> Result<StabilizerCircuit> {
    if cycles == 0 {
        return Err(Error::InvalidParameter("cycles must be at least 1".into()));
    }
    let layout = Layout::new(code)?;
    let roles = layout.roles();
    let mut b = Builder {
        ops: Vec::new(),
        measurements: Vec::new(),
        layer: vec![false; roles.len()],
    };
    let mut cycle_starts = Vec::new();
    for _ in 0..cycles {
        cycle_starts.push(b.ops.len());
        layout.cycle(&mut b);
    }
    Ok(StabilizerCircuit {
        roles,
        ops: b.ops,
        cycle_starts,
        measurements: b.measurements,
        detectors: Vec::new(),
        observables: Vec::new(),
        noise: None,
    })
}

/// Memory experiment in the given basis: transversal preparation, `cycles`
/// coloration cycles, transversal readout.
///
/// Only checks of the memory basis carry detectors: the first round is
/// compared with the deterministic outcome 0, later rounds with the previous
/// one, and a final round is reconstructed from the data readout. Observables
/// are the logical operators of that basis evaluated on the readout.
pub fn memory_experiment(code: &CssCode, basis: Pauli, cycles: usize, p: f64) -> Result<StabilizerCircuit> {
    if cycles == 0 {
        return Err(Error::InvalidParameter("cycles must be at least 1".into()));
    }
    if code.k == 0 {
        return Err(Error::InvalidParameter("memory experiment needs k >= 1".into()));
    }
    let layout = Layout::new(code)?;
    let roles = layout.roles();
    let data: Vec<usize> = (0..code.n).collect();
    let mut b = Builder {
        ops: Vec::new(),
        measurements: Vec::new(),
        layer: vec![false; roles.len()],
    };
    for &q in &data {
        b.push(match basis {
            Pauli::Z => Op::PrepZ(q),
            Pauli::X => Op::PrepX(q),
        });
    }
    b.tick(&data);

    let checks = code.checks(basis);
    let mut detectors = Vec::new();
    let mut prev: Option<Vec<usize>> = None;
    let mut cycle_starts = Vec::new();
    for _ in 0..cycles {
        cycle_starts.push(b.ops.len());
        let (z, x) = layout.cycle(&mut b);
        let cur = if basis == Pauli::Z { z } else { x };
        for (r, &m) in cur.iter().enumerate() {
            detectors.push(match &prev {
                None => vec![m],
                Some(prev) => vec![prev[r], m],
            });
        }
        prev = Some(cur);
    }
    let readout: Vec<usize> = data
        .iter()
        .map(|&q| {
            b.push(match basis {
                Pauli::Z => Op::MeasZ(q),
                Pauli::X => Op::MeasX(q),
            })
            .unwrap()
        })
        .collect();
    b.tick(&[]);
    let last = prev.expect("at least one cycle");
    for r in 0..checks.rows() {
        let mut d: Vec<usize> = checks.row_ones(r).map(|q| readout[q]).collect();
        d.push(last[r]);
        detectors.push(d);
    }
    let logicals = code.logicals.of(basis);
    let observables = (0..logicals.rows())
        .map(|i| logicals.row_ones(i).map(|q| readout[q]).collect())
        .collect();
    let circuit = StabilizerCircuit {
        roles,
        ops: b.ops,
        cycle_starts,
        measurements: b.measurements,
        detectors,
        observables,
        noise: None,
    };
    annotate_noise(circuit, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::{disjoint_surface_code, lcs_code};

    fn assert_valid_coloring(code: &CssCode, pauli: Pauli, colors: &[Vec<Edge>]) {
        let h = code.checks(pauli);
        let mut all: Vec<Edge> = colors.concat();
        all.sort();
        let mut want: Vec<Edge> = (0..h.rows()).flat_map(|r| h.row_ones(r).map(move |q| (r, q))).collect();
        want.sort();
        assert_eq!(all, want);
        for m in colors {
            let mut c: Vec<_> = m.iter().map(|e| e.0).collect();
            let mut q: Vec<_> = m.iter().map(|e| e.1).collect();
            c.sort();
            c.dedup();
            q.sort();
            q.dedup();
            assert_eq!(c.len(), m.len());
            assert_eq!(q.len(), m.len());
        }
    }

    #[test]
    fn lcs_15_uses_six_colors() {
        let code = lcs_code(1, 3, 1).unwrap();
        for pauli in [Pauli::X, Pauli::Z] {
            let colors = color_tanner_edges(&code, pauli).unwrap();
            assert_eq!(colors.len(), 6);
            assert_valid_coloring(&code, pauli, &colors);
        }
    }

    #[test]
    fn path_graph_two_colors() {
        let mut edges = vec![(0, 0), (0, 1), (1, 1), (1, 2)];
        // path q0 - c0 - q1 - c1 - q2 has 4 edges; drop one end for 3
        edges.pop();
        assert_eq!(peel_matchings(&mut edges, 2, 3).len(), 2);
    }

    #[test]
    fn small_surface_colors() {
        let code = disjoint_surface_code(1, 2).unwrap();
        for pauli in [Pauli::X, Pauli::Z] {
            let colors = color_tanner_edges(&code, pauli).unwrap();
            assert!(colors.len() <= 4);
            assert_valid_coloring(&code, pauli, &colors);
        }
    }

    #[test]
    fn one_cycle_layout() {
        let code = lcs_code(1, 3, 1).unwrap();
        let c = build_coloration_circuit(&code, 1).unwrap();
        assert_eq!(c.count_role(Role::AncillaZ), 6);
        assert_eq!(c.count_role(Role::AncillaX), 6);
        assert_eq!(c.cx_layers(), 12);
        assert_eq!(c.measurements.len(), 12);
        let cx = c.ops.iter().filter(|o| matches!(o, Op::Cx(..))).count();
        assert_eq!(cx, code.hx.nnz() + code.hz.nnz());
    }

    #[test]
    fn memory_counts() {
        let code = lcs_code(1, 3, 1).unwrap();
        for basis in [Pauli::Z, Pauli::X] {
            let c = memory_experiment(&code, basis, 3, 0.001).unwrap();
            assert_eq!(c.detectors.len(), 4 * 6);
            assert_eq!(c.observables.len(), 3);
            assert_eq!(c.measurements.len(), 3 * 12 + 15);
        }
    }

    #[test]
    fn noise_channels() {
        let code = lcs_code(1, 3, 1).unwrap();
        let c = memory_experiment(&code, Pauli::Z, 1, 0.03).unwrap();
        let locs = c.fault_locations();
        assert!(locs.iter().any(|l| matches!(l.channel, Channel::Depolarize2(_, _, p) if p == 0.03)));
        assert!(locs.iter().any(|l| matches!(l.channel, Channel::Depolarize1(_, p) if (p - 0.003).abs() < 1e-15)));
        let idles = c.ops.iter().filter(|o| matches!(o, Op::Idle(_))).count();
        let cx = c.ops.iter().filter(|o| matches!(o, Op::Cx(..))).count();
        let noisy = c.ops.iter().filter(|o| !matches!(o, Op::Tick)).count();
        assert_eq!(locs.len(), noisy);
        assert!(idles > 0 && cx > 0);
        assert!(annotate_noise(c, 0.6).is_err());
    }

    #[test]
    fn text_export() {
        let code = disjoint_surface_code(1, 1).unwrap();
        let c = memory_experiment(&code, Pauli::Z, 1, 0.0).unwrap();
        let text = c.to_text();
        assert!(text.lines().any(|l| l.starts_with("CX ")));
        assert_eq!(text.lines().filter(|l| l.starts_with("DETECTOR")).count(), c.detectors.len());
        assert!(text.contains("OBSERVABLE 0 "));
        assert_eq!(text.lines().filter(|l| *l == "TICK").count(), c.num_ticks());
    }
}
