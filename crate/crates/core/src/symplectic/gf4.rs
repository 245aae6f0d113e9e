//! The GF(4) view of binary symplectic codes: `γ(t) = ω t_X + ω̄ t_Z`.

use std::fmt;
use std::str::FromStr;

use super::{GroupCode, SympVector, SymplecticError};
use crate::field::{Field, Gf4, PrimeField, Zp};
use crate::linalg::FMatrix;

/// A word over GF(4).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf4Word(pub Vec<Gf4>);

impl Gf4Word {
    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn scale(&self, a: Gf4) -> Self {
        Gf4Word(self.0.iter().map(|&s| a * s).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SymplecticError> {
        if self.n() != other.n() {
            return Err(SymplecticError::LengthMismatch { expected: self.n(), found: other.n() });
        }
        Ok(Gf4Word(self.0.iter().zip(&other.0).map(|(&a, &b)| a + b).collect()))
    }
}

impl fmt::Display for Gf4Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<&str> = self.0.iter().map(|s| s.token()).collect();
        f.write_str(&toks.join(" "))
    }
}

impl fmt::Debug for Gf4Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf4Word({self})")
    }
}

impl FromStr for Gf4Word {
    type Err = SymplecticError;

    /// Whitespace-separated tokens `0 1 w w2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split_whitespace()
            .map(|t| Gf4::from_token(t).ok_or_else(|| SymplecticError::Parse(format!("bad GF(4) token {t:?}"))))
            .collect::<Result<Vec<_>, _>>()
            .map(Gf4Word)
    }
}

/// `γ`: (0,0) ↦ 0, (1,0) ↦ ω, (0,1) ↦ ω², (1,1) ↦ 1.
pub fn gf4_of<F: PrimeField>(t: &SympVector<F>) -> Result<Gf4Word, SymplecticError> {
    if F::ORDER != 2 {
        return Err(SymplecticError::RequiresBinary { order: F::ORDER });
    }
    Ok(Gf4Word(
        t.pairs()
            .into_iter()
            .map(|(x, z)| {
                let (x, z) = (x.index() as u8, z.index() as u8);
                Gf4::from_bits(((x ^ z) << 1) | z)
            })
            .collect(),
    ))
}

/// Inverse of [`gf4_of`].
pub fn symp_of(w: &Gf4Word) -> SympVector<Zp<2>> {
    let pairs: Vec<(Zp<2>, Zp<2>)> =
        w.0.iter()
            .map(|s| {
                let b = s.bits();
                let z = b & 1;
                let x = (b >> 1) ^ z;
                (Zp::new(x as u64), Zp::new(z as u64))
            })
            .collect();
    SympVector::from_pairs(&pairs)
}

/// `γ⁻¹(ω · γ(t))`.
pub fn omega_multiple(t: &SympVector<Zp<2>>) -> SympVector<Zp<2>> {
    symp_of(&gf4_of(t).expect("binary").scale(Gf4::OMEGA))
}

/// Whether `γ(C)` is closed under multiplication by ω. A code whose size is
/// not a power of 4 is rejected before any generator is tested.
pub fn is_gf4_linear(c: &GroupCode<Zp<2>>) -> bool {
    if !c.rank().is_multiple_of(2) {
        return false;
    }
    c.basis_vectors().iter().all(|g| c.contains(&omega_multiple(g)))
}

/// Dimension of `γ(C)` over GF(4) when it is linear.
pub fn gf4_rank(c: &GroupCode<Zp<2>>) -> Option<usize> {
    if !is_gf4_linear(c) {
        return None;
    }
    let rows: Vec<Vec<Gf4>> = c.basis_vectors().iter().map(|g| gf4_of(g).expect("binary").0).collect();
    let m = FMatrix::from_rows(c.n(), &rows).expect("uniform width");
    Some(m.rank())
}

/// `Tr(Σ a_i b̄_i)` with `Tr(x) = x + x²`.
pub fn trace_hermitian_inner(a: &Gf4Word, b: &Gf4Word) -> Result<Zp<2>, SymplecticError> {
    if a.n() != b.n() {
        return Err(SymplecticError::LengthMismatch { expected: a.n(), found: b.n() });
    }
    let s = a.0.iter().zip(&b.0).fold(Gf4::ZERO, |acc, (&x, &y)| acc + x * y.conj());
    Ok(Zp::new(s.trace().index() as u64))
}

impl GroupCode<Zp<2>> {
    /// Binary code whose GF(4) image is spanned by `rows`: over `Z₂` when
    /// `linear` is false, over GF(4) (rows plus their ω-multiples) otherwise.
    pub fn from_gf4_rows(n: usize, rows: &[Gf4Word], linear: bool) -> Result<Self, SymplecticError> {
        let mut vs = Vec::new();
        for r in rows {
            if r.n() != n {
                return Err(SymplecticError::LengthMismatch { expected: n, found: r.n() });
            }
            vs.push(symp_of(r));
            if linear {
                vs.push(symp_of(&r.scale(Gf4::OMEGA)));
            }
        }
        Self::from_vectors(n, &vs)
    }
}
