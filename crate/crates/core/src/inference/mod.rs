//! Error channels, syndromes, brute-force decoding, sum-product
//! marginalization and Monte Carlo simulation for binary codes.
//!
//! Probabilities are generic over [`num_traits::Float`]. Symbol tables are
//! indexed `x | z << 1`, i.e. in the order I, X, Z, Y.

mod decode;
mod simulate;
mod sum_product;

use num_traits::Float;
use thiserror::Error;

use crate::ffg::FfgError;
use crate::field::{Field, Zp};
use crate::symplectic::{GroupCode, SympVector, SymplecticError};

pub use decode::{decode_ml, BruteForceDecoder, DecodeMode, DEFAULT_DECODE_BOUND};
pub use simulate::{simulate, wilson_halfwidth, SimRecord, SimResult};
pub use sum_product::{sum_product, Convergence, FactorWeights, Marginals, Schedule, MAX_MESSAGE_MULTIPLICITY};

type G2 = Zp<2>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("probability table at position {position} is invalid: {reason}")]
    BadChannel { position: usize, reason: String },
    #[error("channel covers {channel} positions, code has {code}")]
    ChannelLength { channel: usize, code: usize },
    #[error("syndrome has length {found}, expected {expected}")]
    SyndromeLength { expected: usize, found: usize },
    #[error("syndrome is not realizable")]
    Unrealizable,
    #[error("code length {n} exceeds the brute-force bound {bound}")]
    BoundExceeded { n: usize, bound: usize },
    #[error("stabilizer code is not self-orthogonal")]
    NotSelfOrthogonal,
    #[error("factor graph has a cycle, exact marginals need a tree")]
    Cyclic,
    #[error("variable {name} has multiplicity {mu}, message tables support at most {max}")]
    MultiplicityTooLarge { name: String, mu: usize, max: usize },
    #[error("factor {name} has {codewords} local codewords, too many to tabulate")]
    FactorTooLarge { name: String, codewords: String },
    #[error("weight table for {name} has {found} entries, expected {expected}")]
    WeightLength { name: String, expected: usize, found: usize },
    #[error("weights must be nonnegative and finite ({name})")]
    NegativeWeight { name: String },
    #[error("every configuration has zero weight")]
    ZeroWeight,
    #[error("trial count must be positive")]
    NoTrials,
    #[error(transparent)]
    Ffg(#[from] FfgError),
    #[error(transparent)]
    Code(#[from] SymplecticError),
}

/// Independent per-position Pauli error probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel<T: Float> {
    tables: Vec<[T; 4]>,
}

impl<T: Float> ChannelModel<T> {
    /// Tables are `(p_I, p_X, p_Z, p_Y)`; each must be nonnegative and sum to
    /// one within `max(1e-12, 8 ε_mach)`.
    pub fn new(tables: Vec<[T; 4]>) -> Result<Self, InferenceError> {
        let tol = T::from(1e-12).unwrap().max(T::epsilon() * T::from(8).unwrap());
        for (i, t) in tables.iter().enumerate() {
            if t.iter().any(|p| !p.is_finite() || *p < T::zero()) {
                return Err(InferenceError::BadChannel { position: i, reason: "negative or non-finite entry".into() });
            }
            let s = t.iter().fold(T::zero(), |a, &b| a + b);
            if (s - T::one()).abs() > tol {
                return Err(InferenceError::BadChannel { position: i, reason: "entries do not sum to 1".into() });
            }
        }
        Ok(ChannelModel { tables })
    }

    /// `(1-ε, ε/3, ε/3, ε/3)` on each of `n` positions.
    pub fn depolarizing(n: usize, eps: T) -> Result<Self, InferenceError> {
        if !(eps >= T::zero() && eps <= T::one()) {
            return Err(InferenceError::BadChannel { position: 0, reason: "epsilon outside [0, 1]".into() });
        }
        let third = eps / T::from(3).unwrap();
        Self::new(vec![[T::one() - eps, third, third, third]; n])
    }

    pub fn n(&self) -> usize {
        self.tables.len()
    }

    pub fn table(&self, i: usize) -> &[T; 4] {
        &self.tables[i]
    }

    pub fn prob(&self, e: &SympVector<G2>) -> T {
        e.pairs()
            .iter()
            .zip(&self.tables)
            .fold(T::one(), |acc, ((x, z), t)| acc * t[(x.index() | z.index() << 1) as usize])
    }

    pub(crate) fn prob_packed(&self, v: u64) -> T {
        let n = self.n();
        let mut acc = T::one();
        for (k, t) in self.tables.iter().enumerate() {
            acc = acc * t[packed_symbol(v, n, k)];
        }
        acc
    }
}

/// Bits `s_j = ⟨e, g_j⟩` against the canonical generators of the code.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syndrome(pub Vec<G2>);

impl Syndrome {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|b| b.get() == 0)
    }

    pub(crate) fn to_bits(&self) -> u64 {
        self.0.iter().enumerate().fold(0, |acc, (j, b)| acc | (b.get() as u64) << j)
    }

    pub fn from_bits(bits: u64, len: usize) -> Self {
        Syndrome((0..len).map(|j| G2::new(bits >> j & 1)).collect())
    }
}

impl std::fmt::Display for Syndrome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

pub fn syndrome(stab: &GroupCode<G2>, e: &SympVector<G2>) -> Result<Syndrome, InferenceError> {
    if e.n() != stab.n() {
        return Err(SymplecticError::LengthMismatch { expected: stab.n(), found: e.n() }.into());
    }
    let s = stab.basis_vectors().iter().map(|g| crate::symplectic::symp_inner(e, g)).collect::<Result<Vec<_>, _>>()?;
    Ok(Syndrome(s))
}

// Packed vectors: block coordinate k of the (X | Z) string lives at bit
// 2n-1-k, so integer order is the lexicographic order of the string.

pub(crate) const MAX_PACKED_N: usize = 32;

pub(crate) fn pack(v: &SympVector<G2>) -> u64 {
    let n = v.n();
    v.to_block().iter().enumerate().fold(0, |acc, (k, b)| acc | (b.get() as u64) << (2 * n - 1 - k))
}

pub(crate) fn unpack(v: u64, n: usize) -> SympVector<G2> {
    let block: Vec<G2> = (0..2 * n).map(|k| G2::new(v >> (2 * n - 1 - k) & 1)).collect();
    SympVector::from_block(&block).expect("even length")
}

pub(crate) fn packed_symbol(v: u64, n: usize, k: usize) -> usize {
    let x = v >> (2 * n - 1 - k) & 1;
    let z = v >> (n - 1 - k) & 1;
    (x | z << 1) as usize
}

pub(crate) fn packed_inner(a: u64, b: u64, n: usize) -> u64 {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let (ax, az) = (a >> n, a & mask);
    let (bx, bz) = (b >> n, b & mask);
    ((ax & bz) ^ (az & bx)).count_ones() as u64 & 1
}

/// Canonical basis rows packed; each row's highest set bit is its pivot.
pub(crate) fn packed_basis(c: &GroupCode<G2>) -> Vec<u64> {
    c.basis_vectors().iter().map(pack).collect()
}

/// Lexicographically smallest element of `v + C` for a packed canonical
/// basis of `C`.
pub(crate) fn reduce_packed(v: u64, basis: &[u64]) -> u64 {
    basis.iter().fold(v, |acc, &r| {
        let pivot = 63 - r.leading_zeros();
        if acc >> pivot & 1 == 1 {
            acc ^ r
        } else {
            acc
        }
    })
}
