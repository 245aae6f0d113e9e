//! Builders for convolutional chains, serial turbo concatenations and
//! graph-state codes.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ffg::{Edge, FactorNode, FactorRole, Ffg, FfgBuilder, FfgError, Port};
use crate::field::{PrimeField, Zp};
use crate::linalg::FMatrix;
use crate::symplectic::Gf4Word;
use crate::symplectic::{GroupCode, SymplecticError};

type G2 = Zp<2>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("section code has length {found}, expected 2*mu + k = {expected}")]
    SectionLength { expected: usize, found: usize },
    #[error("chain length must be at least 1")]
    EmptyChain,
    #[error("state multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge {0}-{1} listed twice")]
    DuplicateEdge(usize, usize),
    #[error("adjacency matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("adjacency matrix has a nonzero diagonal at {0}")]
    NonzeroDiagonal(usize),
    #[error("adjacency matrix must be {n}x{n}")]
    AdjacencyShape { n: usize },
    #[error("outer code has {outer} outputs, interleaver has size {interleaver}, inner has {inputs} inputs")]
    SizeMismatch { outer: usize, interleaver: usize, inputs: usize },
    #[error("interleaver is not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("{0} is not a half-edge of the inner graph")]
    UnknownInput(String),
    #[error("inner input {0} listed twice")]
    DuplicateInput(String),
    #[error(transparent)]
    Ffg(#[from] FfgError),
    #[error(transparent)]
    Code(#[from] SymplecticError),
}

/// One trellis section: a code on `(m_left, t_1..t_k, m_right)` with state
/// blocks of `mu` symbol pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrellisSection<F: PrimeField> {
    mu: usize,
    k_sym: usize,
    code: GroupCode<F>,
}

impl<F: PrimeField> TrellisSection<F> {
    pub fn new(mu: usize, k_sym: usize, code: GroupCode<F>) -> Result<Self, ConstructionError> {
        if mu == 0 {
            return Err(ConstructionError::ZeroMultiplicity);
        }
        if code.n() != 2 * mu + k_sym {
            return Err(ConstructionError::SectionLength { expected: 2 * mu + k_sym, found: code.n() });
        }
        Ok(TrellisSection { mu, k_sym, code })
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn k_sym(&self) -> usize {
        self.k_sym
    }

    pub fn code(&self) -> &GroupCode<F> {
        &self.code
    }
}

impl TrellisSection<G2> {
    /// Section whose GF(4) image is the GF(4)-span of `rows`.
    pub fn from_gf4(rows: &[Gf4Word], mu: usize, k_sym: usize) -> Result<Self, ConstructionError> {
        let code = GroupCode::from_gf4_rows(2 * mu + k_sym, rows, true)?;
        Self::new(mu, k_sym, code)
    }
}

/// Free function form of [`TrellisSection::from_gf4`].
pub fn conv_section_from_gf4(
    rows: &[Gf4Word],
    mu: usize,
    k_sym: usize,
) -> Result<TrellisSection<G2>, ConstructionError> {
    TrellisSection::from_gf4(rows, mu, k_sym)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Both outer states pinned to zero.
    Terminated,
    /// The last right state is the first left state.
    TailBiting,
}

/// `L` copies of `sec` sharing state edges `m0..mL`. Factors are `f1..fL`,
/// symbols are the half-edges `t{i}_{j}`. Terminated chains add the zero-code
/// factors `start` on `m0` and `end` on `mL`.
pub fn conv_chain<F: PrimeField>(
    sec: &TrellisSection<F>,
    len: usize,
    boundary: Boundary,
) -> Result<Ffg<F>, ConstructionError> {
    if len == 0 {
        return Err(ConstructionError::EmptyChain);
    }
    let state = |i: usize| match boundary {
        Boundary::TailBiting if i == len => "m0".to_string(),
        _ => format!("m{i}"),
    };
    let mut b = FfgBuilder::new();
    for i in 1..=len {
        for j in 1..=sec.k_sym {
            b.half_edge(format!("t{i}_{j}"));
        }
    }
    let n_states = if boundary == Boundary::TailBiting { len } else { len + 1 };
    for i in 0..n_states {
        b.edge(state(i), sec.mu);
    }
    for i in 1..=len {
        let mut ports = vec![state(i - 1)];
        ports.extend((1..=sec.k_sym).map(|j| format!("t{i}_{j}")));
        ports.push(state(i));
        b.factor(format!("f{i}"), sec.code.clone(), &ports);
    }
    if boundary == Boundary::Terminated {
        b.factor_with_role("start", GroupCode::zero(sec.mu), &[state(0)], FactorRole::Boundary);
        b.factor_with_role("end", GroupCode::zero(sec.mu), &[state(len)], FactorRole::Boundary);
    }
    Ok(b.build())
}

/// `{(a, π(a))}`: a block `a` of `size` symbol pairs followed by its image
/// under `perm`, where position `j` of the first block maps to `perm[j]` of
/// the second. The same permutation acts on X and Z.
pub fn interleaver_code<F: PrimeField>(perm: &[usize]) -> Result<GroupCode<F>, ConstructionError> {
    let size = perm.len();
    let distinct: BTreeSet<usize> = perm.iter().copied().collect();
    if distinct.len() != size || perm.iter().any(|&p| p >= size) {
        return Err(ConstructionError::NotPermutation(size));
    }
    let n = 2 * size;
    let mut rows = Vec::new();
    for comp in 0..2 {
        for (j, &pj) in perm.iter().enumerate() {
            let mut r = vec![F::zero(); 2 * n];
            r[comp * n + j] = F::one();
            r[comp * n + size + pj] = F::one();
            rows.push(r);
        }
    }
    Ok(GroupCode::from_generators(n, FMatrix::from_rows(2 * n, &rows).expect("width"))?)
}

fn prefixed<F: PrimeField>(g: &Ffg<F>, prefix: &str) -> (Vec<Edge>, Vec<FactorNode<F>>) {
    let p = |s: &str| format!("{prefix}{s}");
    let edges = g.edges().iter().map(|e| Edge { name: p(&e.name), multiplicity: e.multiplicity }).collect();
    let factors = g
        .factors()
        .iter()
        .map(|f| FactorNode {
            name: p(&f.name),
            ports: f.ports.iter().map(|q| Port { variable: p(&q.variable), ..q.clone() }).collect(),
            code: f.code.clone(),
            role: f.role.clone(),
        })
        .collect();
    (edges, factors)
}

/// Serial concatenation: every half-edge of `outer` feeds, through an
/// interleaver factor, the inner half-edge `inner_inputs[perm[j]]`. The
/// remaining inner half-edges are the half-edges of the result. Names from
/// the two graphs are prefixed `outer.` and `inner.`.
pub fn turbo_serial<F: PrimeField, S: AsRef<str>>(
    outer: &Ffg<F>,
    perm: &[usize],
    inner: &Ffg<F>,
    inner_inputs: &[S],
) -> Result<Ffg<F>, ConstructionError> {
    let size = outer.half_edges().len();
    if perm.len() != size || inner_inputs.len() != size {
        return Err(ConstructionError::SizeMismatch {
            outer: size,
            interleaver: perm.len(),
            inputs: inner_inputs.len(),
        });
    }
    let mut inputs = BTreeSet::new();
    for i in inner_inputs {
        let i = i.as_ref();
        if !inner.is_half_edge(i) {
            return Err(ConstructionError::UnknownInput(i.to_string()));
        }
        if !inputs.insert(i) {
            return Err(ConstructionError::DuplicateInput(i.to_string()));
        }
    }
    let code = interleaver_code(perm)?;
    outer.ensure_valid()?;
    inner.ensure_valid()?;

    let (mut edges, mut factors) = prefixed(outer, "outer.");
    let (inner_edges, inner_factors) = prefixed(inner, "inner.");
    edges.extend(inner_edges);
    factors.extend(inner_factors);
    let mut ports = Vec::new();
    for h in outer.half_edges() {
        edges.push(Edge { name: format!("outer.{h}"), multiplicity: 1 });
        ports.push(format!("outer.{h}"));
    }
    for i in inner_inputs {
        edges.push(Edge { name: format!("inner.{}", i.as_ref()), multiplicity: 1 });
        ports.push(format!("inner.{}", i.as_ref()));
    }
    factors.push(FactorNode {
        name: "interleaver".to_string(),
        ports: ports.into_iter().enumerate().map(|(o, v)| Port { variable: v, multiplicity: 1, offset: o }).collect(),
        code,
        role: FactorRole::Interleaver,
    });
    let half_edges =
        inner.half_edges().iter().filter(|h| !inputs.contains(h.as_str())).map(|h| format!("inner.{h}")).collect();
    Ok(Ffg::from_parts(half_edges, edges, factors))
}

/// A simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    /// Edges are unordered pairs of 0-based vertices.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, ConstructionError> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(ConstructionError::VertexRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(ConstructionError::SelfLoop(a));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(ConstructionError::DuplicateEdge(a.min(b), a.max(b)));
            }
        }
        Ok(GraphSpec { n, edges: set.into_iter().collect() })
    }

    pub fn from_adjacency(a: &[Vec<u8>]) -> Result<Self, ConstructionError> {
        let n = a.len();
        if a.iter().any(|r| r.len() != n) {
            return Err(ConstructionError::AdjacencyShape { n });
        }
        let mut edges = Vec::new();
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            if a[i][i] != 0 {
                return Err(ConstructionError::NonzeroDiagonal(i));
            }
            for j in i + 1..n {
                if a[i][j] != a[j][i] {
                    return Err(ConstructionError::NotSymmetric(i, j));
                }
                if a[i][j] != 0 {
                    edges.push((i, j));
                }
            }
        }
        Self::new(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sorted pairs `(i, j)` with `i < j`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency(&self) -> FMatrix<G2> {
        let mut a = vec![vec![G2::new(0); self.n]; self.n];
        for &(i, j) in &self.edges {
            a[i][j] = G2::new(1);
            a[j][i] = G2::new(1);
        }
        FMatrix::from_rows(self.n, &a).expect("square")
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(i, j)| {
                if i == v {
                    Some(j)
                } else if j == v {
                    Some(i)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Row space of `[I | A]`.
pub fn graph_state_code(g: &GraphSpec) -> GroupCode<G2> {
    let gen = FMatrix::identity(g.n).hstack(&g.adjacency()).expect("same height");
    GroupCode::from_generators(g.n, gen).expect("width 2n")
}

/// Local code of a vertex with `d` neighbours on `(t, m_1..m_d)`: `t_X`
/// tied to every `m_Z`, and each `m_X` tied to `t_Z`.
pub fn vertex_code(d: usize) -> GroupCode<G2> {
    let n = d + 1;
    let mut rows = Vec::new();
    let mut first = vec![G2::new(0); 2 * n];
    first[0] = G2::new(1);
    for k in 1..n {
        first[n + k] = G2::new(1);
    }
    rows.push(first);
    for k in 1..n {
        let mut r = vec![G2::new(0); 2 * n];
        r[k] = G2::new(1);
        r[n] = G2::new(1);
        rows.push(r);
    }
    GroupCode::from_generators(n, FMatrix::from_rows(2 * n, &rows).expect("width")).expect("width")
}

/// Rowspan of `[1 0 | 0 1; 0 1 | 1 0]`.
pub fn graph_edge_code() -> GroupCode<G2> {
    GroupCode::from_pauli_rows(2, &["XZ", "ZX"]).expect("valid literal")
}

/// Vertex factors `v{i}` on `(t{i}, m{i}_{j}..)` and edge factors `e{i}_{j}`
/// on `(m{i}_{j}, m{j}_{i})`, all 1-based, neighbours in ascending order.
pub fn graph_state_ffg(g: &GraphSpec) -> Ffg<G2> {
    let mut b = FfgBuilder::new();
    for i in 1..=g.n {
        b.half_edge(format!("t{i}"));
    }
    for &(i, j) in &g.edges {
        b.edge(format!("m{}_{}", i + 1, j + 1), 1);
        b.edge(format!("m{}_{}", j + 1, i + 1), 1);
    }
    for v in 0..g.n {
        let nb = g.neighbours(v);
        let mut ports = vec![format!("t{}", v + 1)];
        ports.extend(nb.iter().map(|&u| format!("m{}_{}", v + 1, u + 1)));
        b.factor(format!("v{}", v + 1), vertex_code(nb.len()), &ports);
    }
    for &(i, j) in &g.edges {
        let (a, c) = (i + 1, j + 1);
        b.factor(format!("e{a}_{c}"), graph_edge_code(), &[format!("m{a}_{c}"), format!("m{c}_{a}")]);
    }
    b.build()
}
