//! Finite-field scalars.
//!
//! Every matrix and code in this crate is generic over a [`Field`]. Prime
//! fields are provided by [`Zp`], whose modulus is a const parameter checked
//! for primality when the first element is built (a non-prime modulus is a
//! compile-time error). [`Gf4`] is the four-element extension field used for
//! the GF(4) view of binary symplectic codes.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::{One, Zero};

/// A finite field usable as the scalar of [`FMatrix`](crate::FMatrix).
pub trait Field:
    Copy
    + Eq
    + Ord
    + Hash
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Add<Output = Self>
    + AddAssign
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Number of elements.
    const ORDER: u32;

    /// Multiplicative inverse, `None` for zero.
    fn inv(self) -> Option<Self>;

    /// Dense index in `0..ORDER`, stable across runs.
    fn index(self) -> u32;

    /// Inverse of [`Field::index`]; indices are reduced modulo `ORDER`.
    fn from_index(i: u32) -> Self;

    fn elements() -> Vec<Self> {
        (0..Self::ORDER).map(Self::from_index).collect()
    }
}

/// A field of prime order, i.e. `Z_p`.
pub trait PrimeField: Field {
    fn modulus() -> u32 {
        Self::ORDER
    }

    /// Reduces an arbitrary integer into the field.
    fn from_i64(v: i64) -> Self {
        let p = Self::ORDER as i64;
        Self::from_index(v.rem_euclid(p) as u32)
    }

    fn value(self) -> u32 {
        self.index()
    }
}

pub(crate) const fn is_prime(p: u8) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u8;
    while (d as u16) * (d as u16) <= p as u16 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of `Z_P` for a prime `P < 256`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Zp<const P: u8>(u8);

impl<const P: u8> Zp<P> {
    const PRIME: () = assert!(is_prime(P), "Zp modulus must be prime");

    pub fn new(v: u64) -> Self {
        #[allow(clippy::let_unit_value)]
        let () = Self::PRIME;
        Zp((v % P as u64) as u8)
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl<const P: u8> fmt::Debug for Zp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u8> fmt::Display for Zp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u8> Zero for Zp<P> {
    fn zero() -> Self {
        Self::new(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u8> One for Zp<P> {
    fn one() -> Self {
        Self::new(1)
    }
}

impl<const P: u8> Add for Zp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let s = self.0 as u16 + rhs.0 as u16;
        Zp((s % P as u16) as u8)
    }
}

impl<const P: u8> AddAssign for Zp<P> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const P: u8> Sub for Zp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let s = self.0 as u16 + P as u16 - rhs.0 as u16;
        Zp((s % P as u16) as u8)
    }
}

impl<const P: u8> Neg for Zp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Zp(0) - self
    }
}

impl<const P: u8> Mul for Zp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let s = self.0 as u16 * rhs.0 as u16;
        Zp((s % P as u16) as u8)
    }
}

impl<const P: u8> Field for Zp<P> {
    const ORDER: u32 = P as u32;

    fn inv(self) -> Option<Self> {
        if self.0 == 0 {
            return None;
        }
        // Fermat: a^(p-2)
        let mut acc = Self::one();
        let mut base = self;
        let mut e = P as u32 - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        Some(acc)
    }

    fn index(self) -> u32 {
        self.0 as u32
    }

    fn from_index(i: u32) -> Self {
        Self::new(i as u64)
    }
}

impl<const P: u8> PrimeField for Zp<P> {}

/// Element of GF(4) = {0, 1, ω, ω²} with ω² = ω + 1.
///
/// Stored as two bits `(ω-coefficient, 1-coefficient)`, so 0 ↦ 00, 1 ↦ 01,
/// ω ↦ 10, ω² ↦ 11 and addition is XOR.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Gf4(u8);

impl Gf4 {
    pub const ZERO: Gf4 = Gf4(0);
    pub const ONE: Gf4 = Gf4(1);
    pub const OMEGA: Gf4 = Gf4(2);
    pub const OMEGA2: Gf4 = Gf4(3);

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn from_bits(b: u8) -> Self {
        Gf4(b & 3)
    }

    /// Frobenius conjugate x̄ = x².
    pub fn conj(self) -> Self {
        match self.0 {
            2 => Gf4(3),
            3 => Gf4(2),
            v => Gf4(v),
        }
    }

    /// Absolute trace x + x², which lands in {0, 1}.
    pub fn trace(self) -> Self {
        self + self.conj()
    }

    /// Discrete log to base ω for nonzero elements.
    fn log(self) -> Option<u8> {
        match self.0 {
            1 => Some(0),
            2 => Some(1),
            3 => Some(2),
            _ => None,
        }
    }

    fn exp(e: u8) -> Self {
        match e % 3 {
            0 => Gf4(1),
            1 => Gf4(2),
            _ => Gf4(3),
        }
    }

    /// Token used in the text format: `0`, `1`, `w`, `w2`.
    pub fn token(self) -> &'static str {
        match self.0 {
            0 => "0",
            1 => "1",
            2 => "w",
            _ => "w2",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "0" => Some(Gf4::ZERO),
            "1" => Some(Gf4::ONE),
            "w" => Some(Gf4::OMEGA),
            "w2" => Some(Gf4::OMEGA2),
            _ => None,
        }
    }
}

impl fmt::Debug for Gf4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl fmt::Display for Gf4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl Zero for Gf4 {
    fn zero() -> Self {
        Gf4::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Gf4 {
    fn one() -> Self {
        Gf4::ONE
    }
}

impl Add for Gf4 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Self) -> Self {
        Gf4(self.0 ^ rhs.0)
    }
}

impl AddAssign for Gf4 {
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: Self) {
        self.0 ^= rhs.0;
    }
}

impl Sub for Gf4 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Self) -> Self {
        Gf4(self.0 ^ rhs.0)
    }
}

impl Neg for Gf4 {
    type Output = Self;
    fn neg(self) -> Self {
        self
    }
}

impl Mul for Gf4 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        match (self.log(), rhs.log()) {
            (Some(a), Some(b)) => Gf4::exp(a + b),
            _ => Gf4::ZERO,
        }
    }
}

impl Field for Gf4 {
    const ORDER: u32 = 4;

    fn inv(self) -> Option<Self> {
        self.log().map(|l| Gf4::exp(3 - l))
    }

    fn index(self) -> u32 {
        self.0 as u32
    }

    fn from_index(i: u32) -> Self {
        Gf4((i % 4) as u8)
    }
}
