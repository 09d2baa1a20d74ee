//! ZX duality and fold-transversal Clifford gates on ℓ = 1 LCS codes.
//!
//! Paulis carry an explicit phase so that the ±i factors produced by S and
//! S† are tracked exactly; logical actions are compared as cosets modulo
//! stabilizers.

use std::fmt;

use crate::code::{CodeKind, CssCode};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// `i^phase · Π_q X_q^{x_q} Z_q^{z_q}`, with X before Z on each qubit.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    pub x: BitVector,
    pub z: BitVector,
    pub phase: u8,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitVector::zeros(n),
            z: BitVector::zeros(n),
            phase: 0,
        }
    }

    pub fn x_type(x: BitVector) -> Self {
        let n = x.len();
        Self {
            x,
            z: BitVector::zeros(n),
            phase: 0,
        }
    }

    pub fn z_type(z: BitVector) -> Self {
        let n = z.len();
        Self {
            x: BitVector::zeros(n),
            z,
            phase: 0,
        }
    }

    pub fn single_x(n: usize, q: usize) -> Self {
        Self::x_type(BitVector::from_indices(n, [q]))
    }

    pub fn single_z(n: usize, q: usize) -> Self {
        Self::z_type(BitVector::from_indices(n, [q]))
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        (self.x.overlap(&other.z) + self.z.overlap(&other.x)).is_multiple_of(2)
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        // Moving other's X past self's Z costs (−1)^{z1·x2}.
        let sign = 2 * (self.z.overlap(&other.x) % 2) as u8;
        Self {
            x: &self.x ^ &other.x,
            z: &self.z ^ &other.z,
            phase: (self.phase + other.phase + sign) % 4,
        }
    }

    /// Hermitian operators have phase parity equal to the X·Z overlap parity.
    pub fn is_hermitian(&self) -> bool {
        (self.phase as usize + self.x.overlap(&self.z)).is_multiple_of(2)
    }

    fn bits(&self, q: usize) -> (bool, bool) {
        (self.x.get(q), self.z.get(q))
    }

    fn set_bits(&mut self, q: usize, (x, z): (bool, bool)) {
        self.x.set(q, x);
        self.z.set(q, z);
    }

    fn add_phase(&mut self, k: u8) {
        self.phase = (self.phase + k) % 4;
    }

    /// Conjugates in place by one gate: `P ↦ G P G†`.
    pub fn conjugate(&mut self, gate: Gate) {
        match gate {
            Gate::H(q) => {
                let (x, z) = self.bits(q);
                self.set_bits(q, (z, x));
                if x && z {
                    self.add_phase(2);
                }
            }
            Gate::S(q) => {
                let (x, z) = self.bits(q);
                self.set_bits(q, (x, z ^ x));
                if x {
                    self.add_phase(1);
                }
            }
            Gate::Sdg(q) => {
                let (x, z) = self.bits(q);
                self.set_bits(q, (x, z ^ x));
                if x {
                    self.add_phase(3);
                }
            }
            Gate::Cz(a, b) => {
                let (xa, za) = self.bits(a);
                let (xb, zb) = self.bits(b);
                self.set_bits(a, (xa, za ^ xb));
                self.set_bits(b, (xb, zb ^ xa));
                if xa && xb {
                    self.add_phase(2);
                }
            }
            Gate::Cx(c, t) => {
                let (xc, zc) = self.bits(c);
                let (xt, zt) = self.bits(t);
                self.set_bits(c, (xc, zc ^ zt));
                self.set_bits(t, (xt ^ xc, zt));
            }
            Gate::Swap(a, b) => {
                let ba = self.bits(a);
                let bb = self.bits(b);
                self.set_bits(a, bb);
                self.set_bits(b, ba);
            }
        }
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["+", "+i", "-", "-i"][self.phase as usize];
        let body: String = (0..self.len())
            .map(|q| match self.bits(q) {
                (false, false) => '_',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'W', // X·Z, i.e. −iY
            })
            .collect();
        write!(f, "{prefix}{body}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    Cz(usize, usize),
    /// (control, target)
    Cx(usize, usize),
    Swap(usize, usize),
}

/// A Clifford unitary given by the images of `X_q` and `Z_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordMap {
    pub x_images: Vec<PauliOperator>,
    pub z_images: Vec<PauliOperator>,
}

impl CliffordMap {
    pub fn identity(n: usize) -> Self {
        Self {
            x_images: (0..n).map(|q| PauliOperator::single_x(n, q)).collect(),
            z_images: (0..n).map(|q| PauliOperator::single_z(n, q)).collect(),
        }
    }

    /// The map of the circuit applying `gates` in order.
    pub fn from_gates(n: usize, gates: &[Gate]) -> Self {
        let mut m = Self::identity(n);
        for img in m.x_images.iter_mut().chain(m.z_images.iter_mut()) {
            for &g in gates {
                img.conjugate(g);
            }
        }
        m
    }

    pub fn num_qubits(&self) -> usize {
        self.x_images.len()
    }

    /// `U P U†` for an arbitrary Pauli.
    pub fn apply(&self, p: &PauliOperator) -> PauliOperator {
        let n = self.num_qubits();
        let mut out = PauliOperator::identity(n);
        out.phase = p.phase;
        for q in 0..n {
            if p.x.get(q) {
                out = out.mul(&self.x_images[q]);
            }
            if p.z.get(q) {
                out = out.mul(&self.z_images[q]);
            }
        }
        out
    }

    /// `other ∘ self`: first this map, then `other`.
    pub fn then(&self, other: &CliffordMap) -> CliffordMap {
        CliffordMap {
            x_images: self.x_images.iter().map(|p| other.apply(p)).collect(),
            z_images: self.z_images.iter().map(|p| other.apply(p)).collect(),
        }
    }

    /// Images are Hermitian and obey the commutation relations of the generators.
    pub fn is_symplectic(&self) -> bool {
        let n = self.num_qubits();
        let all: Vec<&PauliOperator> = self.x_images.iter().chain(&self.z_images).collect();
        if !all.iter().all(|p| p.is_hermitian()) {
            return false;
        }
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                // only X_q and Z_q anticommute
                let expect = !(j == i + n && i < n);
                if all[i].commutes_with(all[j]) != expect {
                    return false;
                }
            }
        }
        true
    }
}

fn lcs_ell1_lift(code: &CssCode) -> Result<usize> {
    match code.meta.kind {
        CodeKind::Lcs { ell: 1, lift, .. } => Ok(lift),
        ref other => Err(Error::Unsupported(format!("fold gates need an ell = 1 LCS code, got {other:?}"))),
    }
}

/// Qubit permutation exchanging left columns (0,1) and (1,0): blocks
/// `[L, 2L)` and `[2L, 3L)` swap, everything else is fixed.
pub fn zx_duality(lift: usize) -> Vec<usize> {
    let n = 5 * lift;
    (0..n)
        .map(|q| match q / lift {
            1 => q + lift,
            2 => q - lift,
            _ => q,
        })
        .collect()
}

pub fn zx_duality_for(code: &CssCode) -> Result<Vec<usize>> {
    Ok(zx_duality(lcs_ell1_lift(code)?))
}

fn same_rowspace(a: &BitMatrix, b: &BitMatrix) -> bool {
    let rb = b.rank();
    a.rank() == rb && a.vstack(b).rank() == rb
}

/// Whether permuting the qubits of `hx` by τ gives a matrix with the rowspace of `hz`.
pub fn tau_exchanges_checks(code: &CssCode, tau: &[usize]) -> bool {
    same_rowspace(&code.hx.permute_columns(tau), &code.hz) && same_rowspace(&code.hz.permute_columns(tau), &code.hx)
}

/// Splits the τ-fixed qubits into `A` and `B` so that every X check meets
/// both halves equally often. Returns the lexicographically smallest
/// assignment (A before B, qubits in increasing order).
pub fn partition_ab(code: &CssCode, tau: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let fixed: Vec<usize> = (0..code.n).filter(|&q| tau[q] == q).collect();
    let rows: Vec<Vec<usize>> = (0..code.hx.rows())
        .map(|r| code.hx.row_ones(r).filter(|&q| tau[q] == q).collect())
        .collect();
    if let Some(r) = rows.iter().position(|s| s.len() % 2 == 1) {
        return Err(Error::GateCheck(format!("X check {r} has odd support on fixed qubits")));
    }
    let mut qubit_rows = vec![Vec::new(); code.n];
    for (r, s) in rows.iter().enumerate() {
        for &q in s {
            qubit_rows[q].push(r);
        }
    }
    let half: Vec<usize> = rows.iter().map(|s| s.len() / 2).collect();
    let mut count_a = vec![0usize; rows.len()];
    let mut count_b = vec![0usize; rows.len()];
    let mut in_a = vec![false; fixed.len()];

    fn dfs(
        i: usize,
        fixed: &[usize],
        qubit_rows: &[Vec<usize>],
        half: &[usize],
        ca: &mut [usize],
        cb: &mut [usize],
        in_a: &mut [bool],
    ) -> bool {
        if i == fixed.len() {
            return true;
        }
        let q = fixed[i];
        for to_a in [true, false] {
            let counts: &mut [usize] = if to_a { &mut *ca } else { &mut *cb };
            if qubit_rows[q].iter().all(|&r| counts[r] < half[r]) {
                for &r in &qubit_rows[q] {
                    counts[r] += 1;
                }
                in_a[i] = to_a;
                if dfs(i + 1, fixed, qubit_rows, half, ca, cb, in_a) {
                    return true;
                }
                let counts: &mut [usize] = if to_a { &mut *ca } else { &mut *cb };
                for &r in &qubit_rows[q] {
                    counts[r] -= 1;
                }
            }
        }
        false
    }

    if !dfs(0, &fixed, &qubit_rows, &half, &mut count_a, &mut count_b, &mut in_a) {
        return Err(Error::GateCheck("no balanced A/B partition of the fixed qubits".into()));
    }
    let a = fixed.iter().zip(&in_a).filter(|(_, &x)| x).map(|(&q, _)| q).collect();
    let b = fixed.iter().zip(&in_a).filter(|(_, &x)| !x).map(|(&q, _)| q).collect();
    Ok((a, b))
}

/// `Π SWAP(q, τ(q)) · Π H_q`.
pub fn fold_hadamard(code: &CssCode, tau: &[usize]) -> Result<CliffordMap> {
    lcs_ell1_lift(code)?;
    let mut gates: Vec<Gate> = (0..code.n).map(Gate::H).collect();
    gates.extend((0..code.n).filter(|&q| tau[q] > q).map(|q| Gate::Swap(q, tau[q])));
    let map = CliffordMap::from_gates(code.n, &gates);
    check_stabilizers(code, &map)?;
    Ok(map)
}

/// `Π_{A} S · Π_{B} S† · Π CZ(q, τ(q))`.
pub fn fold_phase(code: &CssCode, tau: &[usize], a: &[usize], b: &[usize]) -> Result<CliffordMap> {
    lcs_ell1_lift(code)?;
    let mut gates: Vec<Gate> = a.iter().map(|&q| Gate::S(q)).collect();
    gates.extend(b.iter().map(|&q| Gate::Sdg(q)));
    gates.extend((0..code.n).filter(|&q| tau[q] > q).map(|q| Gate::Cz(q, tau[q])));
    let map = CliffordMap::from_gates(code.n, &gates);
    check_stabilizers(code, &map)?;
    Ok(map)
}

/// `CX(q, n+q)` across two blocks of the same code.
pub fn transversal_cnot(n: usize) -> CliffordMap {
    let gates: Vec<Gate> = (0..n).map(|q| Gate::Cx(q, n + q)).collect();
    CliffordMap::from_gates(2 * n, &gates)
}

/// Two independent blocks of a code, on `2n` qubits.
pub fn doubled_code(code: &CssCode) -> Result<CssCode> {
    let block = |a: &BitMatrix| BitMatrix::identity(2).kron(a);
    let lx = block(code.lx());
    let lz = block(code.lz());
    CssCode::new(block(&code.hx), block(&code.hz), crate::code::CodeMeta::custom())?
        .with_logicals(crate::code::LogicalBasis { lx, lz })
}

/// Stabilizer generators as Paulis with their `+1` sign.
fn stabilizer_generators(code: &CssCode) -> Vec<(String, PauliOperator)> {
    let xs = (0..code.hx.rows()).map(|r| (format!("X check {r}"), PauliOperator::x_type(code.hx.row(r))));
    let zs = (0..code.hz.rows()).map(|r| (format!("Z check {r}"), PauliOperator::z_type(code.hz.row(r))));
    xs.chain(zs).collect()
}

/// Every conjugated generator must be `+X^a Z^b` with `a ∈ rowspace(hx)`, `b ∈ rowspace(hz)`.
pub fn check_stabilizers(code: &CssCode, map: &CliffordMap) -> Result<()> {
    for (name, g) in stabilizer_generators(code) {
        let img = map.apply(&g);
        let in_group = code.hx.rowspace_contains(&img.x)? && code.hz.rowspace_contains(&img.z)?;
        if !in_group || img.phase != 0 {
            return Err(Error::GateCheck(format!("{name} maps to {img:?}, outside the stabilizer group")));
        }
    }
    Ok(())
}

/// Coefficients of `v` on `basis` rows modulo `stab` rows, or `None` if `v` is outside their span.
fn logical_coefficients(basis: &BitMatrix, stab: &BitMatrix, v: &BitVector) -> Result<Option<BitVector>> {
    let m = basis.vstack(stab).transpose();
    Ok(m.solve(v)?.map(|c| c.slice(0, basis.rows())))
}

/// The 2k × 2k binary matrix of the logical action, rows are images of
/// `X̄_0..X̄_{k−1}, Z̄_0..Z̄_{k−1}` written as `[x-coefficients | z-coefficients]`.
/// Signs are ignored (logical Pauli corrections).
pub fn logical_action(code: &CssCode, map: &CliffordMap) -> Result<BitMatrix> {
    let k = code.k;
    let mut out = BitMatrix::zeros(2 * k, 2 * k);
    let ops = (0..k)
        .map(|i| PauliOperator::x_type(code.lx().row(i)))
        .chain((0..k).map(|i| PauliOperator::z_type(code.lz().row(i))));
    for (r, op) in ops.enumerate() {
        let img = map.apply(&op);
        let cx = logical_coefficients(code.lx(), &code.hx, &img.x)?;
        let cz = logical_coefficients(code.lz(), &code.hz, &img.z)?;
        let (Some(cx), Some(cz)) = (cx, cz) else {
            return Err(Error::GateCheck(format!("logical {r} maps outside the normalizer: {img:?}")));
        };
        for c in cx.iter_ones() {
            out.set(r, c, true);
        }
        for c in cz.iter_ones() {
            out.set(r, k + c, true);
        }
    }
    Ok(out)
}

/// Expected logical actions of transversal H, S and CNOT on k pairs.
pub fn expected_hadamard(k: usize) -> BitMatrix {
    let id = BitMatrix::identity(k);
    let zero = BitMatrix::zeros(k, k);
    zero.hstack(&id).vstack(&id.hstack(&zero))
}

pub fn expected_phase(k: usize) -> BitMatrix {
    let id = BitMatrix::identity(k);
    let zero = BitMatrix::zeros(k, k);
    id.hstack(&id).vstack(&zero.hstack(&id))
}

/// On the doubled code: `X̄_i ⊗ I ↦ X̄_i ⊗ X̄_i`, `I ⊗ Z̄_i ↦ Z̄_i ⊗ Z̄_i`.
pub fn expected_cnot(k: usize) -> BitMatrix {
    let mut m = BitMatrix::identity(4 * k);
    for i in 0..k {
        m.set(i, k + i, true); // X̄ on block 1 spreads to block 2
        m.set(3 * k + i, 2 * k + i, true); // Z̄ on block 2 spreads to block 1
    }
    m
}

/// Outcome of one gate check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateReport {
    pub gate: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for GateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.gate, self.detail)
    }
}

fn report(gate: &'static str, check: impl FnOnce() -> Result<String>) -> GateReport {
    match check() {
        Ok(detail) => GateReport {
            gate,
            passed: true,
            detail,
        },
        Err(e) => GateReport {
            gate,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn expect_action(code: &CssCode, map: &CliffordMap, want: &BitMatrix, what: &str) -> Result<String> {
    let got = logical_action(code, map)?;
    if &got != want {
        return Err(Error::GateCheck(format!("logical action {got:?} differs from {what}")));
    }
    Ok(format!("stabilizers preserved, logical action = {what}"))
}

/// All fold-gate checks for one ℓ = 1 LCS code.
pub fn verify_fold_gates(code: &CssCode) -> Vec<GateReport> {
    let k = code.k;
    let tau = match zx_duality_for(code) {
        Ok(t) => t,
        Err(e) => {
            return vec![GateReport {
                gate: "zx-duality",
                passed: false,
                detail: e.to_string(),
            }]
        }
    };
    let mut out = vec![report("zx-duality", || {
        if tau_exchanges_checks(code, &tau) {
            Ok("tau maps rowspace(H_X) onto rowspace(H_Z) and back".into())
        } else {
            Err(Error::GateCheck("tau does not exchange the check rowspaces".into()))
        }
    })];
    out.push(report("fold-hadamard", || {
        let h = fold_hadamard(code, &tau)?;
        let msg = expect_action(code, &h, &expected_hadamard(k), "H on every logical")?;
        let hh = h.then(&h);
        expect_action(code, &hh, &BitMatrix::identity(2 * k), "identity")?;
        Ok(format!("{msg}; squares to the identity"))
    }));
    out.push(report("fold-phase", || {
        let (a, b) = partition_ab(code, &tau)?;
        let s = fold_phase(code, &tau, &a, &b)?;
        let msg = expect_action(code, &s, &expected_phase(k), "S on every logical")?;
        let sdg = fold_phase(code, &tau, &b, &a)?;
        expect_action(code, &s.then(&sdg), &BitMatrix::identity(2 * k), "identity")?;
        Ok(format!("|A| = {}, |B| = {}; {msg}; swapping A and B inverts it", a.len(), b.len()))
    }));
    out.push(report("transversal-cnot", || {
        let doubled = doubled_code(code)?;
        let cx = transversal_cnot(code.n);
        check_stabilizers(&doubled, &cx)?;
        expect_action(&doubled, &cx, &expected_cnot(k), "CNOT between blocks on every logical")
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::lcs_code;
    use proptest::prelude::*;

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
        (any::<u16>(), any::<u16>()).prop_map(move |(x, z)| {
            let x = BitVector::from_indices(n, (0..n).filter(|i| x >> i & 1 == 1));
            let z = BitVector::from_indices(n, (0..n).filter(|i| z >> i & 1 == 1));
            let phase = (x.overlap(&z) % 2) as u8;
            PauliOperator { x, z, phase }
        })
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = Gate> {
        (0usize..6, 0..n, 1..n).prop_map(move |(kind, a, d)| {
            let b = (a + d) % n;
            match kind {
                0 => Gate::H(a),
                1 => Gate::S(a),
                2 => Gate::Sdg(a),
                3 => Gate::Cz(a, b),
                4 => Gate::Cx(a, b),
                _ => Gate::Swap(a, b),
            }
        })
    }

    #[test]
    fn single_qubit_rules() {
        let mut y = PauliOperator {
            x: BitVector::from_indices(1, [0]),
            z: BitVector::from_indices(1, [0]),
            phase: 1,
        };
        y.conjugate(Gate::H(0));
        assert_eq!(y.phase, 3); // H Y H = −Y
        let mut x = PauliOperator::single_x(1, 0);
        x.conjugate(Gate::S(0));
        assert_eq!((x.x.get(0), x.z.get(0), x.phase), (true, true, 1)); // S X S† = iXZ = Y
        let mut x = PauliOperator::single_x(1, 0);
        x.conjugate(Gate::Sdg(0));
        assert_eq!(x.phase, 3);
    }

    #[test]
    fn cz_rule() {
        let mut x = PauliOperator::single_x(2, 0);
        x.conjugate(Gate::Cz(0, 1));
        assert_eq!(x, PauliOperator {
            x: BitVector::from_indices(2, [0]),
            z: BitVector::from_indices(2, [1]),
            phase: 0
        });
    }

    #[test]
    fn cx_against_hadamard_cz() {
        // CX(c,t) = H_t CZ H_t
        let n = 3;
        let direct = CliffordMap::from_gates(n, &[Gate::Cx(0, 2)]);
        let composed = CliffordMap::from_gates(n, &[Gate::H(2), Gate::Cz(0, 2), Gate::H(2)]);
        assert_eq!(direct, composed);
    }

    #[test]
    fn tau_for_three() {
        let t = zx_duality(3);
        assert_eq!(&t[3..9], &[6, 7, 8, 3, 4, 5]);
        assert!((0..3).chain(9..15).all(|q| t[q] == q));
        assert!((0..15).all(|q| t[t[q]] == q));
    }

    #[test]
    fn partition_is_balanced() {
        let code = lcs_code(1, 3, 1).unwrap();
        let tau = zx_duality(3);
        let (a, b) = partition_ab(&code, &tau).unwrap();
        assert_eq!(a.len() + b.len(), 9);
        for r in 0..code.hx.rows() {
            let s: Vec<usize> = code.hx.row_ones(r).filter(|&q| tau[q] == q).collect();
            let na = s.iter().filter(|q| a.contains(q)).count();
            let nb = s.iter().filter(|q| b.contains(q)).count();
            assert_eq!(na, nb);
        }
        assert_eq!(a[0], 0);
    }

    #[test]
    fn fold_gates_on_small_codes() {
        for lift in [3, 4, 5] {
            let code = lcs_code(1, lift, 1).unwrap();
            for r in verify_fold_gates(&code) {
                assert!(r.passed, "L={lift}: {r}");
            }
        }
    }

    #[test]
    fn rejects_other_codes() {
        let code = lcs_code(2, 3, 1).unwrap();
        assert!(fold_hadamard(&code, &zx_duality(3)).is_err());
        assert!(!verify_fold_gates(&code)[0].passed);
    }

    #[test]
    fn broken_gate_is_caught() {
        let code = lcs_code(1, 3, 1).unwrap();
        let h_only = CliffordMap::from_gates(code.n, &(0..code.n).map(Gate::H).collect::<Vec<_>>());
        let err = check_stabilizers(&code, &h_only).unwrap_err();
        assert!(err.to_string().contains("check"));
        // all S without S† leaves uncancelled i factors
        let tau = zx_duality(3);
        let fixed: Vec<usize> = (0..code.n).filter(|&q| tau[q] == q).collect();
        assert!(fold_phase(&code, &tau, &fixed, &[]).is_err());
    }

    proptest! {
        #[test]
        fn random_circuits_are_symplectic(gates in proptest::collection::vec(arb_gate(4), 0..20)) {
            prop_assert!(CliffordMap::from_gates(4, &gates).is_symplectic());
        }

        #[test]
        fn apply_matches_direct_conjugation(gates in proptest::collection::vec(arb_gate(4), 0..12), p in arb_pauli(4)) {
            let map = CliffordMap::from_gates(4, &gates);
            let mut direct = p.clone();
            for &g in &gates {
                direct.conjugate(g);
            }
            prop_assert_eq!(map.apply(&p), direct);
        }

        #[test]
        fn conjugation_preserves_products(g in arb_gate(4), a in arb_pauli(4), b in arb_pauli(4)) {
            let mut ab = a.mul(&b);
            let (mut ca, mut cb) = (a.clone(), b.clone());
            ab.conjugate(g);
            ca.conjugate(g);
            cb.conjugate(g);
            prop_assert_eq!(ab, ca.mul(&cb));
        }
    }
}
