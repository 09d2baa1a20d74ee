//! Hypergraph and lifted products, and the lift-connected surface code family.

use serde::{Deserialize, Serialize};

use crate::analysis::lcs_canonical_logicals;
use crate::circulant::{CirculantMatrix, CirculantPoly};
use crate::code::{CodeKind, CodeMeta, CssCode};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// A classical base matrix, either binary or over the circulant ring.
#[derive(Clone, Debug)]
pub enum BaseMatrix {
    Binary(BitMatrix),
    Circulant(CirculantMatrix),
}

/// Hypergraph product of two binary matrices.
///
/// `hx = (1 ⊗ H2 | H1ᵀ ⊗ 1)`, `hz = (H1 ⊗ 1 | 1 ⊗ H2ᵀ)`.
pub fn hgp_binary(h1: &BitMatrix, h2: &BitMatrix) -> (BitMatrix, BitMatrix) {
    let (m1, n1) = (h1.rows(), h1.cols());
    let (m2, n2) = (h2.rows(), h2.cols());
    let hx = BitMatrix::identity(n1)
        .kron(h2)
        .hstack(&h1.transpose().kron(&BitMatrix::identity(m2)));
    let hz = h1
        .kron(&BitMatrix::identity(n2))
        .hstack(&BitMatrix::identity(m1).kron(&h2.transpose()));
    (hx, hz)
}

/// Hypergraph product over the circulant ring, before lifting.
pub fn hgp_circulant(h1: &CirculantMatrix, h2: &CirculantMatrix) -> Result<(CirculantMatrix, CirculantMatrix)> {
    let l = h1.lift_size();
    if h2.lift_size() != l {
        return Err(Error::LiftMismatch(l, h2.lift_size()));
    }
    let (m1, n1) = (h1.rows(), h1.cols());
    let (m2, n2) = (h2.rows(), h2.cols());
    let hx = CirculantMatrix::identity(n1, l)
        .kron(h2)?
        .hstack(&h1.transpose().kron(&CirculantMatrix::identity(m2, l))?)?;
    let hz = h1
        .kron(&CirculantMatrix::identity(n2, l))?
        .hstack(&CirculantMatrix::identity(m1, l).kron(&h2.transpose())?)?;
    Ok((hx, hz))
}

/// Product of two base matrices of the same kind; circulant results are lifted.
pub fn hgp(h1: &BaseMatrix, h2: &BaseMatrix) -> Result<(BitMatrix, BitMatrix)> {
    match (h1, h2) {
        (BaseMatrix::Binary(a), BaseMatrix::Binary(b)) => Ok(hgp_binary(a, b)),
        (BaseMatrix::Circulant(a), BaseMatrix::Circulant(b)) => lifted_product(a, b),
        _ => Err(Error::InvalidParameter(
            "hypergraph product inputs must both be binary or both circulant".into(),
        )),
    }
}

/// Lifted product: the ring-level hypergraph product expanded to binary.
pub fn lifted_product(h1: &CirculantMatrix, h2: &CirculantMatrix) -> Result<(BitMatrix, BitMatrix)> {
    let (hx, hz) = hgp_circulant(h1, h2)?;
    Ok((hx.lift(), hz.lift()))
}

/// ℓ×(ℓ+1) repetition-code check matrix with rows `…1 1…`.
pub fn repetition_base(ell: usize) -> Result<BitMatrix> {
    if ell == 0 {
        return Err(Error::InvalidParameter("repetition base needs ell >= 1".into()));
    }
    Ok(BitMatrix::from_fn(ell, ell + 1, |r, c| c == r || c == r + 1))
}

fn check_shift(lift: usize, shift: usize) -> Result<()> {
    if lift < 2 {
        return Err(Error::InvalidParameter(format!("lift size must be at least 2, got {lift}")));
    }
    if shift.is_multiple_of(lift) {
        return Err(Error::InvalidParameter(format!(
            "shift j={shift} is 0 mod L={lift}; use the disjoint surface code instead"
        )));
    }
    // For L = 2 the only nonzero shift is L/2; it still yields a connected code.
    if lift > 2 && 2 * (shift % lift) == lift {
        return Err(Error::DegenerateShift { j: shift, lift });
    }
    Ok(())
}

/// Base matrix with `I` on the diagonal and `I + P^(j)` on the superdiagonal.
pub fn lcs_base(ell: usize, lift: usize, shift: usize) -> Result<CirculantMatrix> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be at least 1".into()));
    }
    check_shift(lift, shift)?;
    let mut m = CirculantMatrix::zeros(ell, ell + 1, lift);
    for r in 0..ell {
        m.set(r, r, CirculantPoly::identity(lift));
        m.set(r, r + 1, CirculantPoly::from_exponents(lift, [0, shift % lift]));
    }
    Ok(m)
}

/// The (ℓ, L) lift-connected surface code with shift `j`.
pub fn lcs_code(ell: usize, lift: usize, shift: usize) -> Result<CssCode> {
    let base = lcs_base(ell, lift, shift)?;
    let (hx, hz) = lifted_product(&base, &base)?;
    let meta = CodeMeta {
        kind: CodeKind::Lcs { ell, lift, shift },
        family: None,
    };
    let code = CssCode::new(hx, hz, meta)?;
    if shift == 1 && code.k == lift {
        if let Ok(canon) = lcs_canonical_logicals(ell, lift) {
            if canon.validate(&code.hx, &code.hz).is_ok() {
                return code.with_logicals(canon);
            }
        }
    }
    Ok(code)
}

/// `L` disjoint copies of the distance-(ℓ+1) surface code, laid out like [`lcs_code`].
pub fn disjoint_surface_code(ell: usize, lift: usize) -> Result<CssCode> {
    if ell == 0 || lift == 0 {
        return Err(Error::InvalidParameter("ell and L must be positive".into()));
    }
    let base = CirculantMatrix::from_binary(&repetition_base(ell)?, lift);
    let (hx, hz) = lifted_product(&base, &base)?;
    let meta = CodeMeta {
        kind: CodeKind::DisjointSurface { ell, lift },
        family: None,
    };
    CssCode::new(hx, hz, meta)
}

/// Single unrotated surface code `[[(ℓ+1)²+ℓ², 1, ℓ+1]]`.
pub fn surface_code(ell: usize) -> Result<CssCode> {
    disjoint_surface_code(ell, 1)
}

/// A buildable code description, used by configs and the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CodeSpec {
    Lcs { ell: usize, lift: usize, shift: usize },
    Disjoint { ell: usize, lift: usize },
}

impl CodeSpec {
    pub fn build(&self) -> Result<CssCode> {
        match *self {
            CodeSpec::Lcs { ell, lift, shift } => lcs_code(ell, lift, shift),
            CodeSpec::Disjoint { ell, lift } => disjoint_surface_code(ell, lift),
        }
    }

    pub fn n(&self) -> usize {
        let (ell, lift) = match *self {
            CodeSpec::Lcs { ell, lift, .. } | CodeSpec::Disjoint { ell, lift } => (ell, lift),
        };
        ((ell + 1) * (ell + 1) + ell * ell) * lift
    }

    /// Distance predicted by the closed forms: `min(L, 2ℓ+1)` or `ℓ+1`.
    pub fn expected_distance(&self) -> usize {
        match *self {
            CodeSpec::Lcs { ell, lift, .. } => lift.min(2 * ell + 1),
            CodeSpec::Disjoint { ell, .. } => ell + 1,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            CodeSpec::Lcs { ell, lift, shift } if shift == 1 => format!("lcs({ell},{lift})"),
            CodeSpec::Lcs { ell, lift, shift } => format!("lcs({ell},{lift},j={shift})"),
            CodeSpec::Disjoint { ell, lift } => format!("surface({ell})x{lift}"),
        }
    }

    /// Parses `lcs:ELL:L[:J]` or `surface:ELL:L`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in code spec {s:?}")))
        };
        match parts.as_slice() {
            ["lcs", ell, lift] => Ok(CodeSpec::Lcs {
                ell: num(ell)?,
                lift: num(lift)?,
                shift: 1,
            }),
            ["lcs", ell, lift, j] => Ok(CodeSpec::Lcs {
                ell: num(ell)?,
                lift: num(lift)?,
                shift: num(j)?,
            }),
            ["surface", ell, lift] => Ok(CodeSpec::Disjoint {
                ell: num(ell)?,
                lift: num(lift)?,
            }),
            _ => Err(Error::Parse(format!(
                "code spec must be lcs:ELL:L[:J] or surface:ELL:L, got {s:?}"
            ))),
        }
    }
}

/// One member of a benchmark family: an LCS code and its surface-code comparator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyMember {
    pub family: u8,
    pub lift: usize,
    pub lcs: CodeSpec,
    pub comparator: CodeSpec,
}

/// Family 1: ℓ = L−1 (same parameters as L surface codes of distance L).
/// Family 2: ℓ = (L−1)/2 (highest rate at distance L).
/// Family 3: the family-2 codes against surface codes of distance (L+1)/2.
pub fn family_members(family: u8, lifts: &[usize]) -> Result<Vec<FamilyMember>> {
    lifts
        .iter()
        .map(|&lift| {
            if lift < 2 {
                return Err(Error::InvalidParameter(format!("family lift must be >= 2, got {lift}")));
            }
            let (lcs_ell, cmp_ell) = match family {
                1 => (lift - 1, lift - 1),
                2 | 3 => {
                    if lift % 2 == 0 {
                        return Err(Error::InvalidParameter(format!(
                            "family {family} needs odd L, got {lift}"
                        )));
                    }
                    let half = (lift - 1) / 2;
                    (half, if family == 2 { lift - 1 } else { half })
                }
                other => return Err(Error::InvalidParameter(format!("unknown family {other}"))),
            };
            Ok(FamilyMember {
                family,
                lift,
                lcs: CodeSpec::Lcs {
                    ell: lcs_ell,
                    lift,
                    shift: 1,
                },
                comparator: CodeSpec::Disjoint { ell: cmp_ell, lift },
            })
        })
        .collect()
}
