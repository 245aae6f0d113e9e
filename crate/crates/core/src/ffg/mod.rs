//! Forney-style factor graphs whose local functions are indicators of group
//! codes.
//!
//! Variables are either half-edges (external, one symbol pair each, attached
//! to a single factor) or edges (internal, `μ` symbol pairs, attached to two
//! ports). Each factor lists its ports in local-code coordinate order: a
//! port with offset `o` and multiplicity `μ` owns local pairs `o..o+μ`.

mod dual;
mod extract;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::field::PrimeField;
use crate::linalg::FMatrix;
use crate::symplectic::{GroupCode, SymplecticError};

pub use dual::{certify_prop1, contract_negations, dualize, dualize_general, Certificate, FactorCheck, Verdict};
pub use extract::extract_global_code;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FfgError {
    #[error("invalid factor graph: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("operation requires characteristic 2, field has order {order}")]
    RequiresBinary { order: u32 },
    #[error("normalization needs degree >= 3, got {0}")]
    DegreeTooSmall(usize),
    #[error("variable {name} has degree {actual}, not {requested}")]
    DegreeMismatch { name: String, requested: usize, actual: usize },
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error(transparent)]
    Code(#[from] SymplecticError),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// A structural problem found by [`Ffg::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateName { name: String },
    UnknownVariable { factor: String, variable: String },
    HalfEdgeDegree { name: String, degree: usize },
    EdgeDegree { name: String, degree: usize },
    DuplicatePort { factor: String, variable: String },
    PortMultiplicity { factor: String, variable: String, port: usize, declared: usize },
    PortTiling { factor: String, port: usize, expected_offset: usize, offset: usize },
    CodeLength { factor: String, ports: usize, code: usize },
    ZeroMultiplicity { name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateName { name } => write!(f, "name {name} is used more than once"),
            Violation::UnknownVariable { factor, variable } => {
                write!(f, "factor {factor} references undeclared variable {variable}")
            }
            Violation::HalfEdgeDegree { name, degree } => {
                write!(f, "half-edge {name} is attached to {degree} ports, expected 1")
            }
            Violation::EdgeDegree { name, degree } => {
                write!(f, "edge {name} is attached to {degree} ports, expected 2")
            }
            Violation::DuplicatePort { factor, variable } => {
                write!(f, "factor {factor} lists the same port of {variable} twice")
            }
            Violation::PortMultiplicity { factor, variable, port, declared } => {
                write!(f, "factor {factor} port {variable} has multiplicity {port}, variable declares {declared}")
            }
            Violation::PortTiling { factor, port, expected_offset, offset } => {
                write!(f, "factor {factor} port {port} starts at offset {offset}, expected {expected_offset}")
            }
            Violation::CodeLength { factor, ports, code } => {
                write!(f, "factor {factor} ports cover {ports} symbol pairs but its code has length {code}")
            }
            Violation::ZeroMultiplicity { name } => write!(f, "edge {name} has multiplicity 0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub name: String,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Port {
    pub variable: String,
    pub multiplicity: usize,
    pub offset: usize,
}

/// What a factor stands for. Only informational, except for `Negation`,
/// which [`contract_negations`] removes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FactorRole {
    Local,
    /// Pins a chain's boundary state to zero.
    Boundary,
    /// Ties replicas of one variable together.
    Equality,
    /// `[m' = -m'']` inserted on edge `edge` by [`dualize_general`].
    Negation {
        edge: String,
    },
    Interleaver,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorNode<F: PrimeField> {
    pub name: String,
    pub ports: Vec<Port>,
    pub code: GroupCode<F>,
    pub role: FactorRole,
}

impl<F: PrimeField> FactorNode<F> {
    pub fn width(&self) -> usize {
        self.ports.iter().map(|p| p.multiplicity).sum()
    }
}

/// A factor graph over `(Z_p²)`-valued variables. Values are immutable;
/// every transformation returns a new graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ffg<F: PrimeField> {
    half_edges: Vec<String>,
    edges: Vec<Edge>,
    factors: Vec<FactorNode<F>>,
}

impl<F: PrimeField> Ffg<F> {
    /// Assembles a graph without checking it; see [`Ffg::validate`].
    pub fn from_parts(half_edges: Vec<String>, edges: Vec<Edge>, factors: Vec<FactorNode<F>>) -> Self {
        Ffg { half_edges, edges, factors }
    }

    pub fn half_edges(&self) -> &[String] {
        &self.half_edges
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn factors(&self) -> &[FactorNode<F>] {
        &self.factors
    }

    pub fn factor(&self, name: &str) -> Option<&FactorNode<F>> {
        self.factors.iter().find(|f| f.name == name)
    }

    pub fn edge(&self, name: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.name == name)
    }

    pub fn is_half_edge(&self, name: &str) -> bool {
        self.half_edges.iter().any(|h| h == name)
    }

    /// Declared multiplicity of a variable (half-edges have 1).
    pub fn multiplicity(&self, name: &str) -> Option<usize> {
        if self.is_half_edge(name) {
            Some(1)
        } else {
            self.edge(name).map(|e| e.multiplicity)
        }
    }

    /// `(factor index, port index)` for every port attached to `name`.
    pub fn endpoints(&self, name: &str) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (fi, f) in self.factors.iter().enumerate() {
            for (pi, p) in f.ports.iter().enumerate() {
                if p.variable == name {
                    out.push((fi, pi));
                }
            }
        }
        out
    }

    /// Every broken structural rule, each naming the offending element.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen: HashMap<&str, usize> = HashMap::new();
        let names = self
            .half_edges
            .iter()
            .map(String::as_str)
            .chain(self.edges.iter().map(|e| e.name.as_str()))
            .chain(self.factors.iter().map(|f| f.name.as_str()));
        for n in names {
            *seen.entry(n).or_default() += 1;
        }
        let mut dups: Vec<&str> = seen.iter().filter(|(_, &c)| c > 1).map(|(n, _)| *n).collect();
        dups.sort_unstable();
        out.extend(dups.into_iter().map(|n| Violation::DuplicateName { name: n.to_string() }));

        for e in &self.edges {
            if e.multiplicity == 0 {
                out.push(Violation::ZeroMultiplicity { name: e.name.clone() });
            }
        }

        let mut degree: BTreeMap<&str, usize> = BTreeMap::new();
        for f in &self.factors {
            let mut expected_offset = 0;
            let mut local_seen: Vec<(&str, usize)> = Vec::new();
            for (pi, p) in f.ports.iter().enumerate() {
                match self.multiplicity(&p.variable) {
                    None => {
                        out.push(Violation::UnknownVariable { factor: f.name.clone(), variable: p.variable.clone() })
                    }
                    Some(m) if m != p.multiplicity => out.push(Violation::PortMultiplicity {
                        factor: f.name.clone(),
                        variable: p.variable.clone(),
                        port: p.multiplicity,
                        declared: m,
                    }),
                    Some(_) => {}
                }
                if local_seen.contains(&(p.variable.as_str(), p.offset)) {
                    out.push(Violation::DuplicatePort { factor: f.name.clone(), variable: p.variable.clone() });
                }
                local_seen.push((p.variable.as_str(), p.offset));
                if p.offset != expected_offset {
                    out.push(Violation::PortTiling {
                        factor: f.name.clone(),
                        port: pi,
                        expected_offset,
                        offset: p.offset,
                    });
                }
                expected_offset = p.offset + p.multiplicity;
                *degree.entry(p.variable.as_str()).or_default() += 1;
            }
            if f.width() != f.code.n() {
                out.push(Violation::CodeLength { factor: f.name.clone(), ports: f.width(), code: f.code.n() });
            }
        }
        for h in &self.half_edges {
            let d = degree.get(h.as_str()).copied().unwrap_or(0);
            if d != 1 {
                out.push(Violation::HalfEdgeDegree { name: h.clone(), degree: d });
            }
        }
        for e in &self.edges {
            let d = degree.get(e.name.as_str()).copied().unwrap_or(0);
            if d != 2 {
                out.push(Violation::EdgeDegree { name: e.name.clone(), degree: d });
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<(), FfgError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(FfgError::Invalid(v))
        }
    }

    /// Replaces a variable attached to `degree >= 3` ports by one replica
    /// edge per port, all tied to a new equality factor. A half-edge keeps
    /// its name and becomes an extra port of the equality factor.
    pub fn normalize_variable(&self, var: &str, degree: usize) -> Result<Self, FfgError> {
        if degree < 3 {
            return Err(FfgError::DegreeTooSmall(degree));
        }
        let mu = self.multiplicity(var).ok_or_else(|| FfgError::UnknownVariable(var.to_string()))?;
        let ends = self.endpoints(var);
        if ends.len() != degree {
            return Err(FfgError::DegreeMismatch { name: var.to_string(), requested: degree, actual: ends.len() });
        }
        let external = self.is_half_edge(var);
        let mut g = self.clone();
        let replica = |k: usize| format!("{var}#{}", k + 1);
        for (k, &(fi, pi)) in ends.iter().enumerate() {
            g.factors[fi].ports[pi].variable = replica(k);
        }
        if !external {
            g.edges.retain(|e| e.name != var);
        }
        let mut eq_ports: Vec<String> = Vec::new();
        if external {
            eq_ports.push(var.to_string());
        }
        for k in 0..degree {
            g.edges.push(Edge { name: replica(k), multiplicity: mu });
            eq_ports.push(replica(k));
        }
        let code = equality_code::<F>(eq_ports.len(), mu);
        let ports = eq_ports
            .into_iter()
            .enumerate()
            .map(|(i, v)| Port { variable: v, multiplicity: mu, offset: i * mu })
            .collect();
        g.factors.push(FactorNode { name: format!("eq:{var}"), ports, code, role: FactorRole::Equality });
        Ok(g)
    }
}

/// `{(a, a, ..., a)}` on `copies` blocks of `mu` symbol pairs.
pub fn equality_code<F: PrimeField>(copies: usize, mu: usize) -> GroupCode<F> {
    let n = copies * mu;
    let mut rows = Vec::new();
    for h in 0..mu {
        for comp in 0..2 {
            let mut r = vec![F::zero(); 2 * n];
            for c in 0..copies {
                r[comp * n + c * mu + h] = F::one();
            }
            rows.push(r);
        }
    }
    GroupCode::from_generators(n, FMatrix::from_rows(2 * n, &rows).expect("width")).expect("width")
}

/// Incremental construction of an [`Ffg`]. Port multiplicities and offsets
/// are filled in from the variable declarations at [`FfgBuilder::build`];
/// undeclared variables get multiplicity 1 and are reported by `validate`.
#[derive(Debug, Clone)]
pub struct FfgBuilder<F: PrimeField> {
    half_edges: Vec<String>,
    edges: Vec<Edge>,
    factors: Vec<(String, GroupCode<F>, Vec<String>, FactorRole)>,
}

impl<F: PrimeField> Default for FfgBuilder<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: PrimeField> FfgBuilder<F> {
    pub fn new() -> Self {
        FfgBuilder { half_edges: Vec::new(), edges: Vec::new(), factors: Vec::new() }
    }

    pub fn half_edge(&mut self, name: impl Into<String>) -> &mut Self {
        self.half_edges.push(name.into());
        self
    }

    pub fn edge(&mut self, name: impl Into<String>, multiplicity: usize) -> &mut Self {
        self.edges.push(Edge { name: name.into(), multiplicity });
        self
    }

    pub fn factor<S: AsRef<str>>(&mut self, name: impl Into<String>, code: GroupCode<F>, ports: &[S]) -> &mut Self {
        self.factor_with_role(name, code, ports, FactorRole::Local)
    }

    pub fn factor_with_role<S: AsRef<str>>(
        &mut self,
        name: impl Into<String>,
        code: GroupCode<F>,
        ports: &[S],
        role: FactorRole,
    ) -> &mut Self {
        let ports = ports.iter().map(|p| p.as_ref().to_string()).collect();
        self.factors.push((name.into(), code, ports, role));
        self
    }

    pub fn build(&self) -> Ffg<F> {
        let mult = |v: &str| {
            if self.half_edges.iter().any(|h| h == v) {
                1
            } else {
                self.edges.iter().find(|e| e.name == v).map_or(1, |e| e.multiplicity)
            }
        };
        let factors = self
            .factors
            .iter()
            .map(|(name, code, vars, role)| {
                let mut offset = 0;
                let ports = vars
                    .iter()
                    .map(|v| {
                        let m = mult(v);
                        let p = Port { variable: v.clone(), multiplicity: m, offset };
                        offset += m;
                        p
                    })
                    .collect();
                FactorNode { name: name.clone(), ports, code: code.clone(), role: role.clone() }
            })
            .collect();
        Ffg::from_parts(self.half_edges.clone(), self.edges.clone(), factors)
    }
}
