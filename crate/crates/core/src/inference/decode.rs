use std::collections::HashMap;

use num_traits::Float;

use super::{pack, packed_basis, reduce_packed, unpack, ChannelModel, InferenceError, Syndrome, G2, MAX_PACKED_N};
use crate::symplectic::{swap_permutation, GroupCode, SympVector};

pub const DEFAULT_DECODE_BOUND: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodeMode {
    /// Most probable single error with the given syndrome.
    MostLikelyError,
    /// Most probable coset `e + C`, returned through its most probable member.
    MostLikelyCoset,
}

impl DecodeMode {
    pub fn name(self) -> &'static str {
        match self {
            DecodeMode::MostLikelyError => "ml-error",
            DecodeMode::MostLikelyCoset => "ml-coset",
        }
    }
}

pub(crate) fn tie_tolerance<T: Float>() -> T {
    T::from(1e-12).unwrap().max(T::epsilon() * T::from(64).unwrap())
}

/// `Some(true)` if `p` is clearly larger, `Some(false)` if clearly smaller,
/// `None` for a tie within relative tolerance.
fn compare<T: Float>(p: T, q: T) -> Option<bool> {
    let tol = tie_tolerance::<T>() * p.max(q);
    if (p - q).abs() <= tol {
        None
    } else {
        Some(p > q)
    }
}

/// `(p, e)` beats `(q, f)`: larger probability, ties to the smaller string.
fn beats<T: Float>(p: T, e: u64, q: T, f: u64) -> bool {
    compare(p, q).unwrap_or(e < f)
}

/// Exhaustive decoder over the `2^(2n - r)` errors of each syndrome class.
#[derive(Debug, Clone)]
pub struct BruteForceDecoder<T: Float> {
    n: usize,
    stab: Vec<u64>,
    normalizer: Vec<u64>,
    destabilizers: Vec<u64>,
    channel: ChannelModel<T>,
    mode: DecodeMode,
}

impl<T: Float> BruteForceDecoder<T> {
    pub fn new(
        stab: &GroupCode<G2>,
        channel: ChannelModel<T>,
        mode: DecodeMode,
        bound: usize,
    ) -> Result<Self, InferenceError> {
        let n = stab.n();
        if n > bound.min(MAX_PACKED_N) {
            return Err(InferenceError::BoundExceeded { n, bound: bound.min(MAX_PACKED_N) });
        }
        if channel.n() != n {
            return Err(InferenceError::ChannelLength { channel: channel.n(), code: n });
        }
        if !stab.is_self_orthogonal() {
            return Err(InferenceError::NotSelfOrthogonal);
        }
        let checks = stab.basis().select_columns(&swap_permutation(n));
        let r = stab.rank();
        let mut destabilizers = Vec::with_capacity(r);
        for j in 0..r {
            let mut rhs = vec![G2::new(0); r];
            rhs[j] = G2::new(1);
            let d = checks.solve(&rhs).expect("dimensions").ok_or(InferenceError::Unrealizable)?;
            destabilizers.push(pack(&SympVector::from_block(&d).expect("even length")));
        }
        Ok(BruteForceDecoder {
            n,
            stab: packed_basis(stab),
            normalizer: packed_basis(&stab.dual()),
            destabilizers,
            channel,
            mode,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn syndrome_len(&self) -> usize {
        self.stab.len()
    }

    pub fn mode(&self) -> DecodeMode {
        self.mode
    }

    pub fn channel(&self) -> &ChannelModel<T> {
        &self.channel
    }

    pub fn decode(&self, s: &Syndrome) -> Result<SympVector<G2>, InferenceError> {
        if s.0.len() != self.syndrome_len() {
            return Err(InferenceError::SyndromeLength { expected: self.syndrome_len(), found: s.0.len() });
        }
        Ok(unpack(self.decode_bits(s.to_bits()), self.n))
    }

    /// Packed syndrome of a packed error, bit `j` for generator `j`.
    pub(crate) fn syndrome_bits(&self, e: u64) -> u64 {
        self.stab.iter().enumerate().fold(0, |acc, (j, &g)| acc | super::packed_inner(e, g, self.n) << j)
    }

    /// Whether `a` and `b` lie in the same coset of the stabilizer code.
    pub(crate) fn same_coset(&self, a: u64, b: u64) -> bool {
        reduce_packed(a ^ b, &self.stab) == 0
    }

    pub(crate) fn decode_bits(&self, s: u64) -> u64 {
        let e0 = self.destabilizers.iter().enumerate().filter(|(j, _)| s >> j & 1 == 1).fold(0, |acc, (_, &d)| acc ^ d);
        let mut v = e0;
        let total = 1u64 << self.normalizer.len();
        match self.mode {
            DecodeMode::MostLikelyError => {
                let mut best = (self.channel.prob_packed(v), v);
                for i in 1..total {
                    v ^= self.normalizer[i.trailing_zeros() as usize];
                    let p = self.channel.prob_packed(v);
                    if beats(p, v, best.0, best.1) {
                        best = (p, v);
                    }
                }
                best.1
            }
            DecodeMode::MostLikelyCoset => {
                // label -> (mass, best probability, best member)
                let mut cosets: HashMap<u64, (T, T, u64)> = HashMap::new();
                for i in 0..total {
                    if i > 0 {
                        v ^= self.normalizer[i.trailing_zeros() as usize];
                    }
                    let p = self.channel.prob_packed(v);
                    let label = reduce_packed(v, &self.stab);
                    let entry = cosets.entry(label).or_insert((T::zero(), p, v));
                    entry.0 = entry.0 + p;
                    if beats(p, v, entry.1, entry.2) {
                        entry.1 = p;
                        entry.2 = v;
                    }
                }
                let mut labels: Vec<(&u64, &(T, T, u64))> = cosets.iter().collect();
                labels.sort_unstable_by_key(|(l, _)| **l);
                let mut best = labels[0];
                for c in &labels[1..] {
                    if beats(c.1 .0, *c.0, best.1 .0, *best.0) {
                        best = *c;
                    }
                }
                best.1 .2
            }
        }
    }

    /// Decoded error for every syndrome value, indexed by packed syndrome.
    pub(crate) fn lookup_table(&self) -> Vec<u64> {
        (0..1u64 << self.syndrome_len()).map(|s| self.decode_bits(s)).collect()
    }
}

/// One-shot decoding with the default bound `n <= 10`.
pub fn decode_ml<T: Float>(
    stab: &GroupCode<G2>,
    s: &Syndrome,
    ch: &ChannelModel<T>,
    mode: DecodeMode,
) -> Result<SympVector<G2>, InferenceError> {
    BruteForceDecoder::new(stab, ch.clone(), mode, DEFAULT_DECODE_BOUND)?.decode(s)
}
