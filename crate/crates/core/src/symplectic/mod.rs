//! Group codes over `(Z_p²)ⁿ` under the symplectic inner product.
//!
//! Vectors are stored in block form `(t_X, t_Z)`; generator matrices have
//! `2n` columns, X block first. The symplectic form is never built as a
//! matrix: pairing with it is a swap of the two column blocks.

mod gf4;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::field::{Field, PrimeField};
use crate::linalg::{dot, reduce_against, FMatrix, LinalgError};

pub use gf4::{gf4_of, gf4_rank, is_gf4_linear, omega_multiple, symp_of, trace_hermitian_inner, Gf4Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymplecticError {
    #[error("length mismatch: expected {expected} symbol pairs, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cannot parse vector: {0}")]
    Parse(String),
    #[error("brute-force bound exceeded: {size} > {bound}")]
    BoundExceeded { size: usize, bound: usize },
    #[error("code is not self-orthogonal")]
    NotSelfOrthogonal,
    #[error("code has no nonzero word to measure")]
    NoNonzeroWord,
    #[error("CSS precondition violated: row {b1_row} of B1 and row {b2_row} of B2 are not orthogonal")]
    CssNotOrthogonal { b1_row: usize, b2_row: usize },
    #[error("operation requires characteristic 2, field has order {order}")]
    RequiresBinary { order: u32 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// An element of `(Z_p²)ⁿ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SympVector<F> {
    x: Vec<F>,
    z: Vec<F>,
}

impl<F: PrimeField> SympVector<F> {
    pub fn new(x: Vec<F>, z: Vec<F>) -> Result<Self, SymplecticError> {
        if x.len() != z.len() {
            return Err(SymplecticError::LengthMismatch { expected: x.len(), found: z.len() });
        }
        Ok(SympVector { x, z })
    }

    pub fn zero(n: usize) -> Self {
        SympVector { x: vec![F::zero(); n], z: vec![F::zero(); n] }
    }

    pub fn from_pairs(pairs: &[(F, F)]) -> Self {
        SympVector { x: pairs.iter().map(|p| p.0).collect(), z: pairs.iter().map(|p| p.1).collect() }
    }

    /// Splits a `2n`-long block vector `(t_X | t_Z)`.
    pub fn from_block(v: &[F]) -> Result<Self, SymplecticError> {
        if !v.len().is_multiple_of(2) {
            return Err(SymplecticError::LengthMismatch { expected: v.len() + 1, found: v.len() });
        }
        let n = v.len() / 2;
        Ok(SympVector { x: v[..n].to_vec(), z: v[n..].to_vec() })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[F] {
        &self.x
    }

    pub fn z(&self) -> &[F] {
        &self.z
    }

    pub fn pair(&self, i: usize) -> (F, F) {
        (self.x[i], self.z[i])
    }

    pub fn pairs(&self) -> Vec<(F, F)> {
        self.x.iter().copied().zip(self.z.iter().copied()).collect()
    }

    pub fn to_block(&self) -> Vec<F> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.z);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.x.iter().chain(&self.z).all(|v| v.is_zero())
    }

    pub fn swap_xz(&self) -> Self {
        SympVector { x: self.z.clone(), z: self.x.clone() }
    }

    pub fn scale(&self, a: F) -> Self {
        SympVector { x: self.x.iter().map(|&v| a * v).collect(), z: self.z.iter().map(|&v| a * v).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SymplecticError> {
        self.check_len(other)?;
        Ok(SympVector {
            x: self.x.iter().zip(&other.x).map(|(&a, &b)| a + b).collect(),
            z: self.z.iter().zip(&other.z).map(|(&a, &b)| a + b).collect(),
        })
    }

    fn check_len(&self, other: &Self) -> Result<(), SymplecticError> {
        if self.n() != other.n() {
            return Err(SymplecticError::LengthMismatch { expected: self.n(), found: other.n() });
        }
        Ok(())
    }

    /// Symplectic weight: positions whose pair is not `(0, 0)`.
    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).filter(|(a, b)| !a.is_zero() || !b.is_zero()).count()
    }

    /// Parses either a Pauli string (`I X Z Y` per position) or the block
    /// form `X: <digits> Z: <digits>`. Position 1 is leftmost.
    pub fn parse(s: &str) -> Result<Self, SymplecticError> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("X:") {
            let (xs, zs) =
                rest.split_once("Z:").ok_or_else(|| SymplecticError::Parse("block form needs a `Z:` part".into()))?;
            let x = parse_digits::<F>(xs)?;
            let z = parse_digits::<F>(zs)?;
            return Self::new(x, z);
        }
        let mut pairs = Vec::with_capacity(s.len());
        for ch in s.chars() {
            let p = match ch {
                'I' => (0, 0),
                'X' => (1, 0),
                'Z' => (0, 1),
                'Y' => (1, 1),
                c => return Err(SymplecticError::Parse(format!("unexpected character {c:?} in Pauli string"))),
            };
            pairs.push((F::from_index(p.0), F::from_index(p.1)));
        }
        Ok(Self::from_pairs(&pairs))
    }

    /// Pauli letters for binary vectors, block form otherwise.
    pub fn to_pauli(&self) -> Option<String> {
        let mut s = String::with_capacity(self.n());
        for (a, b) in self.x.iter().zip(&self.z) {
            s.push(match (a.index(), b.index()) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                (1, 1) => 'Y',
                _ => return None,
            });
        }
        Some(s)
    }

    pub fn to_block_string(&self) -> String {
        let digits = |v: &[F]| v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("");
        format!("X: {} Z: {}", digits(&self.x), digits(&self.z))
    }
}

fn parse_digits<F: PrimeField>(s: &str) -> Result<Vec<F>, SymplecticError> {
    let mut out = Vec::new();
    for ch in s.chars().filter(|c| !c.is_whitespace()) {
        let d = ch
            .to_digit(10)
            .filter(|&d| d < F::ORDER)
            .ok_or_else(|| SymplecticError::Parse(format!("invalid digit {ch:?} for Z_{}", F::ORDER)))?;
        out.push(F::from_index(d));
    }
    Ok(out)
}

impl<F: PrimeField> FromStr for SympVector<F> {
    type Err = SymplecticError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl<F: PrimeField> fmt::Display for SympVector<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_pauli() {
            Some(p) if F::ORDER == 2 => f.write_str(&p),
            _ => f.write_str(&self.to_block_string()),
        }
    }
}

impl<F: Field> fmt::Debug for SympVector<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = |v: &[F]| v.iter().map(|d| d.to_string()).collect::<String>();
        write!(f, "SympVector(X: {} Z: {})", digits(&self.x), digits(&self.z))
    }
}

/// `Σ_i (a_{X,i} b_{Z,i} + a_{Z,i} b_{X,i}) mod p`.
pub fn symp_inner<F: PrimeField>(a: &SympVector<F>, b: &SympVector<F>) -> Result<F, SymplecticError> {
    a.check_len(b)?;
    Ok(dot(&a.x, &b.z) + dot(&a.z, &b.x))
}

/// Symplectic pairing of two block vectors of equal even length.
pub(crate) fn block_inner<F: Field>(a: &[F], b: &[F]) -> F {
    let n = a.len() / 2;
    dot(&a[..n], &b[n..]) + dot(&a[n..], &b[..n])
}

/// Odometer over all `F`-combinations of a list of rows. Each step adds a
/// single row to the running sum, so enumeration costs one vector add per
/// word on average.
pub struct SpanIter<F> {
    basis: Vec<Vec<F>>,
    digits: Vec<u32>,
    current: Vec<F>,
    done: bool,
}

impl<F: Field> SpanIter<F> {
    pub fn new(width: usize, basis: Vec<Vec<F>>) -> Self {
        let digits = vec![0; basis.len()];
        SpanIter { basis, digits, current: vec![F::zero(); width], done: false }
    }

    /// Like `new` but starting from `offset` (a coset enumeration).
    pub fn coset(offset: Vec<F>, basis: Vec<Vec<F>>) -> Self {
        let digits = vec![0; basis.len()];
        SpanIter { basis, digits, current: offset, done: false }
    }
}

impl<F: Field> Iterator for SpanIter<F> {
    type Item = Vec<F>;

    fn next(&mut self) -> Option<Vec<F>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let mut j = 0;
        loop {
            if j == self.basis.len() {
                self.done = true;
                break;
            }
            self.digits[j] += 1;
            for (c, &b) in self.current.iter_mut().zip(&self.basis[j]) {
                *c += b;
            }
            if self.digits[j] == F::ORDER {
                self.digits[j] = 0;
                j += 1;
            } else {
                break;
            }
        }
        Some(out)
    }
}

/// A `Z_p`-linear code in `(Z_p²)ⁿ`, the row span of its generators.
#[derive(Clone)]
pub struct GroupCode<F> {
    n: usize,
    generators: FMatrix<F>,
    basis: FMatrix<F>,
}

impl<F: PrimeField> GroupCode<F> {
    /// `generators` must have `2n` columns in `(X | Z)` layout.
    pub fn from_generators(n: usize, generators: FMatrix<F>) -> Result<Self, SymplecticError> {
        if generators.cols() != 2 * n {
            return Err(SymplecticError::LengthMismatch { expected: 2 * n, found: generators.cols() });
        }
        let basis = generators.canonical();
        Ok(GroupCode { n, generators, basis })
    }

    pub fn from_vectors(n: usize, vs: &[SympVector<F>]) -> Result<Self, SymplecticError> {
        let rows = vs
            .iter()
            .map(|v| {
                if v.n() != n {
                    Err(SymplecticError::LengthMismatch { expected: n, found: v.n() })
                } else {
                    Ok(v.to_block())
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_generators(n, FMatrix::from_rows(2 * n, &rows)?)
    }

    /// Parses one generator per string, see [`SympVector::parse`].
    pub fn from_pauli_rows(n: usize, rows: &[&str]) -> Result<Self, SymplecticError> {
        let vs = rows.iter().map(|r| SympVector::parse(r)).collect::<Result<Vec<_>, _>>()?;
        Self::from_vectors(n, &vs)
    }

    pub fn zero(n: usize) -> Self {
        Self::from_generators(n, FMatrix::zeros(0, 2 * n)).expect("width matches")
    }

    pub fn full(n: usize) -> Self {
        Self::from_generators(n, FMatrix::identity(2 * n)).expect("width matches")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// Generators as supplied at construction.
    pub fn generators(&self) -> &FMatrix<F> {
        &self.generators
    }

    /// Canonical generators: the reduced row echelon basis.
    pub fn basis(&self) -> &FMatrix<F> {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<SympVector<F>> {
        self.basis.row_iter().map(|r| SympVector::from_block(r).expect("even width")).collect()
    }

    /// `|C| = p^rank`, or `None` on overflow.
    pub fn size(&self) -> Option<u128> {
        (F::ORDER as u128).checked_pow(self.rank() as u32)
    }

    pub fn contains(&self, v: &SympVector<F>) -> bool {
        v.n() == self.n && reduce_against(&self.basis, &v.to_block()).iter().all(|x| x.is_zero())
    }

    /// Same underlying set of codewords.
    pub fn same_code(&self, other: &Self) -> bool {
        self.n == other.n && self.basis == other.basis
    }

    pub fn is_subcode_of(&self, other: &Self) -> bool {
        self.n == other.n && self.basis_vectors().iter().all(|v| other.contains(v))
    }

    /// All codewords, in odometer order over the canonical basis.
    pub fn codewords(&self) -> impl Iterator<Item = SympVector<F>> {
        let rows = self.basis.to_rows();
        SpanIter::new(2 * self.n, rows).map(|b| SympVector::from_block(&b).expect("even width"))
    }

    /// `C⊥ = {t' : ⟨t, t'⟩ = 0 ∀ t ∈ C}`, the kernel of the generator
    /// matrix with its X and Z blocks swapped.
    pub fn dual(&self) -> Self {
        let n = self.n;
        let swapped = self.basis.select_columns(&swap_permutation(n));
        Self::from_generators(n, swapped.kernel()).expect("kernel has 2n columns")
    }

    pub fn is_self_orthogonal(&self) -> bool {
        let rows: Vec<&[F]> = self.basis.row_iter().collect();
        rows.iter().enumerate().all(|(i, a)| rows[i..].iter().all(|b| block_inner(a, b).is_zero()))
    }

    pub fn is_self_dual(&self) -> bool {
        self.rank() == self.n && self.is_self_orthogonal()
    }

    /// Extends the canonical basis of `self` to one of `sup`, returning the
    /// added rows. `self` must be a subcode of `sup`.
    pub fn complement_in(&self, sup: &Self) -> Vec<Vec<F>> {
        let mut span = self.basis.clone();
        let mut extra = Vec::new();
        for r in sup.basis.row_iter() {
            let canon = span.canonical();
            if reduce_against(&canon, r).iter().any(|x| !x.is_zero()) {
                extra.push(r.to_vec());
                span = span.vstack(&FMatrix::from_rows(r.len(), &[r.to_vec()]).expect("width")).expect("width");
            }
        }
        extra
    }
}

impl<F: PrimeField> PartialEq for GroupCode<F> {
    fn eq(&self, other: &Self) -> bool {
        self.same_code(other)
    }
}

impl<F: PrimeField> Eq for GroupCode<F> {}

impl<F: PrimeField> fmt::Debug for GroupCode<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.basis_vectors().iter().map(|v| v.to_string()).collect();
        write!(f, "GroupCode(n={}, rank={}, [{}])", self.n, self.rank(), rows.join(", "))
    }
}

pub(crate) fn swap_permutation(n: usize) -> Vec<usize> {
    (n..2 * n).chain(0..n).collect()
}

/// Result of [`min_coset_weight`].
#[derive(Clone, PartialEq, Eq)]
pub struct CosetWeight<F> {
    pub weight: usize,
    /// `C = C⊥`: the coset set is empty and `weight` is the minimum
    /// nonzero weight of `C⊥` instead.
    pub self_dual: bool,
    pub witness: SympVector<F>,
}

impl<F: Field> fmt::Debug for CosetWeight<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CosetWeight")
            .field("weight", &self.weight)
            .field("self_dual", &self.self_dual)
            .field("witness", &self.witness)
            .finish()
    }
}

/// Default brute-force limit on `2n` for distance computations.
pub const DEFAULT_DISTANCE_BOUND: usize = 24;

/// Minimum symplectic weight over `C⊥ ∖ C`. Enumerates `C⊥` as
/// `C + span(L)` for a complement `L` of `C` in `C⊥`, so no membership
/// tests are needed.
pub fn min_coset_weight<F: PrimeField>(
    stabilizer: &GroupCode<F>,
    bound: usize,
) -> Result<CosetWeight<F>, SymplecticError> {
    let n = stabilizer.n();
    if 2 * n > bound {
        return Err(SymplecticError::BoundExceeded { size: 2 * n, bound });
    }
    if !stabilizer.is_self_orthogonal() {
        return Err(SymplecticError::NotSelfOrthogonal);
    }
    let dual = stabilizer.dual();
    let logicals = stabilizer.complement_in(&dual);
    let (outer, inner, self_dual) = if logicals.is_empty() {
        (stabilizer.basis.to_rows(), Vec::new(), true)
    } else {
        (logicals, stabilizer.basis.to_rows(), false)
    };
    let mut best: Option<(usize, Vec<F>)> = None;
    for l in SpanIter::new(2 * n, outer).skip(1) {
        for w in SpanIter::coset(l.clone(), inner.clone()) {
            let wt = (0..n).filter(|&i| !w[i].is_zero() || !w[n + i].is_zero()).count();
            if best.as_ref().is_none_or(|(b, _)| wt < *b) {
                best = Some((wt, w));
            }
        }
    }
    let (weight, w) = best.ok_or(SymplecticError::NoNonzeroWord)?;
    Ok(CosetWeight { weight, self_dual, witness: SympVector::from_block(&w)? })
}

/// CSS code `{(t_X, t_Z) : t_X ∈ B₁, t_Z ∈ B₂}` from binary generator
/// matrices with `B₁ · B₂ᵀ = 0`.
pub fn css<F: PrimeField>(b1: &FMatrix<F>, b2: &FMatrix<F>) -> Result<GroupCode<F>, SymplecticError> {
    if b1.cols() != b2.cols() {
        return Err(SymplecticError::LengthMismatch { expected: b1.cols(), found: b2.cols() });
    }
    for (i, r1) in b1.row_iter().enumerate() {
        for (j, r2) in b2.row_iter().enumerate() {
            if !dot(r1, r2).is_zero() {
                return Err(SymplecticError::CssNotOrthogonal { b1_row: i, b2_row: j });
            }
        }
    }
    let n = b1.cols();
    let top = b1.hstack(&FMatrix::zeros(b1.rows(), n))?;
    let bottom = FMatrix::zeros(b2.rows(), n).hstack(b2)?;
    GroupCode::from_generators(n, top.vstack(&bottom)?)
}

/// `C⊥` by enumerating all `p^{2n}` vectors. Reference implementation for
/// small `n`, bounded by `max_n`.
pub fn brute_force_dual<F: PrimeField>(c: &GroupCode<F>, max_n: usize) -> Result<GroupCode<F>, SymplecticError> {
    let n = c.n();
    if n > max_n {
        return Err(SymplecticError::BoundExceeded { size: n, bound: max_n });
    }
    let rows: Vec<Vec<F>> = c.basis().to_rows();
    let ambient: Vec<Vec<F>> = FMatrix::<F>::identity(2 * n).to_rows();
    let keep: Vec<Vec<F>> =
        SpanIter::new(2 * n, ambient).filter(|v| rows.iter().all(|g| block_inner(g, v).is_zero())).collect();
    GroupCode::from_generators(n, FMatrix::from_rows(2 * n, &keep)?)
}
