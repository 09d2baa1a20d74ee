//! CSS codes, their logical bases and a plain-text interchange format.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector, RowBasis};

/// Pauli type of an operator or check family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Z,
}

impl Pauli {
    pub fn dual(self) -> Pauli {
        match self {
            Pauli::X => Pauli::Z,
            Pauli::Z => Pauli::X,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pauli::X => "X",
            Pauli::Z => "Z",
        })
    }
}

impl std::str::FromStr for Pauli {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Pauli::X),
            "Z" | "z" => Ok(Pauli::Z),
            other => Err(Error::Parse(format!("unknown Pauli type {other:?}"))),
        }
    }
}

/// How a code was built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CodeKind {
    Lcs { ell: usize, lift: usize, shift: usize },
    DisjointSurface { ell: usize, lift: usize },
    Hgp,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeMeta {
    pub kind: CodeKind,
    pub family: Option<u8>,
}

impl CodeMeta {
    pub fn custom() -> Self {
        Self {
            kind: CodeKind::Custom,
            family: None,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            CodeKind::Lcs { ell, lift, shift } if shift == 1 => format!("lcs({ell},{lift})"),
            CodeKind::Lcs { ell, lift, shift } => format!("lcs({ell},{lift},j={shift})"),
            CodeKind::DisjointSurface { ell, lift } => format!("surface({ell})x{lift}"),
            CodeKind::Hgp => "hgp".to_string(),
            CodeKind::Custom => "custom".to_string(),
        }
    }
}

/// Paired logical representatives: `lx[i]` anticommutes with `lz[i]` only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalBasis {
    pub lx: BitMatrix,
    pub lz: BitMatrix,
}

impl LogicalBasis {
    pub fn k(&self) -> usize {
        self.lx.rows()
    }

    pub fn of(&self, pauli: Pauli) -> &BitMatrix {
        match pauli {
            Pauli::X => &self.lx,
            Pauli::Z => &self.lz,
        }
    }

    /// Checks commutation with the opposite stabilizers, the pairing and independence
    /// from the same-type stabilizers. Returns a description of the first violation.
    pub fn validate(&self, hx: &BitMatrix, hz: &BitMatrix) -> std::result::Result<(), String> {
        let k = self.lx.rows();
        if self.lz.rows() != k {
            return Err(format!("lx has {k} rows but lz has {}", self.lz.rows()));
        }
        if !hz.mul(&self.lx.transpose()).is_zero() {
            return Err("an X logical anticommutes with a Z stabilizer".into());
        }
        if !hx.mul(&self.lz.transpose()).is_zero() {
            return Err("a Z logical anticommutes with an X stabilizer".into());
        }
        if self.lx.mul(&self.lz.transpose()) != BitMatrix::identity(k) {
            return Err("pairing matrix lx * lz^T is not the identity".into());
        }
        // Full pairing already forces independence modulo the other type's
        // stabilizers; check the same-type rowspace explicitly as well.
        let bx = RowBasis::from_matrix(hx);
        let bz = RowBasis::from_matrix(hz);
        for i in 0..k {
            if bx.contains(&self.lx.row(i)) {
                return Err(format!("X logical {i} is an X stabilizer"));
            }
            if bz.contains(&self.lz.row(i)) {
                return Err(format!("Z logical {i} is a Z stabilizer"));
            }
        }
        Ok(())
    }
}

/// A CSS code with X checks `hx`, Z checks `hz` and a paired logical basis.
#[derive(Clone, Debug)]
pub struct CssCode {
    pub hx: BitMatrix,
    pub hz: BitMatrix,
    pub n: usize,
    pub k: usize,
    pub logicals: LogicalBasis,
    pub meta: CodeMeta,
}

impl CssCode {
    /// Builds a code from its check matrices, computing `k` and a logical basis.
    pub fn new(hx: BitMatrix, hz: BitMatrix, meta: CodeMeta) -> Result<Self> {
        let k = crate::analysis::dimension(&hx, &hz)?;
        let logicals = crate::analysis::symplectic_logical_basis(&hx, &hz);
        debug_assert_eq!(logicals.k(), k);
        Ok(Self {
            n: hx.cols(),
            k,
            hx,
            hz,
            logicals,
            meta,
        })
    }

    /// Replaces the logical basis after validating it.
    pub fn with_logicals(mut self, logicals: LogicalBasis) -> Result<Self> {
        if logicals.k() != self.k {
            return Err(Error::DimensionMismatch {
                what: "logical count",
                expected: self.k,
                found: logicals.k(),
            });
        }
        logicals.validate(&self.hx, &self.hz).map_err(Error::InvalidParameter)?;
        self.logicals = logicals;
        Ok(self)
    }

    pub fn checks(&self, pauli: Pauli) -> &BitMatrix {
        match pauli {
            Pauli::X => &self.hx,
            Pauli::Z => &self.hz,
        }
    }

    pub fn lx(&self) -> &BitMatrix {
        &self.logicals.lx
    }

    pub fn lz(&self) -> &BitMatrix {
        &self.logicals.lz
    }

    /// Z-check syndrome of an X error.
    pub fn syndrome_of_x(&self, e: &BitVector) -> BitVector {
        self.hz.mul_vec(e)
    }

    /// Which Z logicals anticommute with an X-type operator.
    pub fn logical_flips_of_x(&self, e: &BitVector) -> BitVector {
        self.logicals.lz.mul_vec(e)
    }

    pub fn max_check_weight(&self) -> usize {
        (0..self.hx.rows())
            .map(|r| self.hx.row_weight(r))
            .chain((0..self.hz.rows()).map(|r| self.hz.row_weight(r)))
            .max()
            .unwrap_or(0)
    }

    pub fn max_qubit_degree(&self) -> usize {
        let wx = self.hx.column_weights();
        let wz = self.hz.column_weights();
        wx.iter().zip(&wz).map(|(a, b)| a + b).max().unwrap_or(0)
    }

    /// Connected components of the Tanner graph on qubits and both check types.
    pub fn tanner_components(&self) -> usize {
        let n = self.n;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut isolated_checks = 0;
        for h in [&self.hx, &self.hz] {
            for r in 0..h.rows() {
                let mut ones = h.row_ones(r);
                match ones.next() {
                    None => isolated_checks += 1,
                    Some(first) => {
                        for q in ones {
                            let (a, b) = (find(&mut parent, first), find(&mut parent, q));
                            if a != b {
                                parent[a] = b;
                            }
                        }
                    }
                }
            }
        }
        (0..n).filter(|&q| find(&mut parent, q) == q).count() + isolated_checks
    }

    /// Text form: header `n k`, then hx, hz, lx, lz as 0/1 rows separated by blank lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.k);
        for m in [&self.hx, &self.hz, &self.logicals.lx, &self.logicals.lz] {
            out.push('\n');
            for row in m.to_strings() {
                out.push_str(&row);
                out.push('\n');
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty code file".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header {header:?}"))))
            .collect::<Result<_>>()?;
        let [n, k] = nums[..] else {
            return Err(Error::Parse(format!("header must be `n k`, got {header:?}")));
        };
        let mut blocks: Vec<Vec<BitVector>> = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                blocks.push(Vec::new());
            } else {
                let v = BitVector::parse01(line)?;
                if v.len() != n {
                    return Err(Error::DimensionMismatch {
                        what: "code file row length",
                        expected: n,
                        found: v.len(),
                    });
                }
                blocks
                    .last_mut()
                    .ok_or_else(|| Error::Parse("missing blank line after header".into()))?
                    .push(v);
            }
        }
        if blocks.len() != 4 {
            return Err(Error::Parse(format!("expected 4 matrix blocks, found {}", blocks.len())));
        }
        let mats: Vec<BitMatrix> = blocks
            .iter()
            .map(|rows| BitMatrix::from_rows(n, rows))
            .collect::<Result<_>>()?;
        let code = CssCode::new(mats[0].clone(), mats[1].clone(), CodeMeta::custom())?;
        if code.k != k {
            return Err(Error::Parse(format!("header says k={k} but ranks give k={}", code.k)));
        }
        code.with_logicals(LogicalBasis {
            lx: mats[2].clone(),
            lz: mats[3].clone(),
        })
    }

    /// Tanner graph as adjacency lines `X<r> q...` then `Z<r> q...`.
    pub fn tanner_adjacency(&self) -> String {
        let mut out = String::new();
        for (tag, h) in [("X", &self.hx), ("Z", &self.hz)] {
            for r in 0..h.rows() {
                out.push_str(&format!("{tag}{r}"));
                for q in h.row_ones(r) {
                    out.push_str(&format!(" {q}"));
                }
                out.push('\n');
            }
        }
        out
    }
}
