//! Line-oriented text format for binary codes, sections, graphs and factor
//! graphs.
//!
//! ```text
//! # comment lines directly above a definition belong to it
//! binary simplex 7
//!   0001111
//!   0110011
//!   1010101
//! end
//!
//! css steane simplex simplex
//! ```
//!
//! Block definitions (`code`, `binary`, `section`, `graph`, `ffg`) end with
//! `end`; `css`, `chain`, `graphstate` and `turbo` are single lines. Vertex
//! numbers and interleaver entries are 1-based. See the README for the full
//! grammar.

mod parse;
mod write;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::constructions::{
    conv_chain, graph_state_ffg, turbo_serial, Boundary, ConstructionError, GraphSpec, TrellisSection,
};
use crate::ffg::{extract_global_code, Ffg, FfgBuilder, FfgError};
use crate::field::Zp;
use crate::linalg::FMatrix;
use crate::symplectic::{css, Gf4Word, GroupCode, SympVector, SymplecticError};

mod corpus;

pub use corpus::{corpus_file, CORPUS};
pub use parse::parse;
pub use write::serialize;

type G2 = Zp<2>;

/// Size limits enforced while parsing.
pub const MAX_LENGTH: usize = 4096;
pub const MAX_ROWS: usize = 4096;
pub const MAX_MULTIPLICITY: usize = 64;
pub const MAX_CHAIN: usize = 100_000;
pub const MAX_STATEMENTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    Lexical,
    UnknownKeyword,
    DanglingReference,
    Arity,
    Duplicate,
    Limit,
    Structure,
}

/// A parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub kind: ErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no definition named {0}")]
    UnknownName(String),
    #[error("{name} is a {found}, expected {expected}")]
    WrongKind { name: String, expected: &'static str, found: &'static str },
    #[error("{name}: {source}")]
    Construction { name: String, source: ConstructionError },
    #[error("{name}: {source}")]
    Code { name: String, source: SymplecticError },
    #[error("{name}: {source}")]
    Ffg { name: String, source: FfgError },
}

/// Row presentation of a code block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rows {
    /// One Pauli string per row.
    Pauli(Vec<SympVector<G2>>),
    /// `x-bits|z-bits` per row.
    Xz(Vec<SympVector<G2>>),
    /// GF(4) tokens; `linear` adds the ω-multiple of every row.
    Gf4 { rows: Vec<Gf4Word>, linear: bool },
}

impl Rows {
    pub fn format(&self) -> &'static str {
        match self {
            Rows::Pauli(_) => "pauli",
            Rows::Xz(_) => "xz",
            Rows::Gf4 { linear: false, .. } => "gf4",
            Rows::Gf4 { linear: true, .. } => "gf4-linear",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Rows::Pauli(r) | Rows::Xz(r) => r.len(),
            Rows::Gf4 { rows, .. } => rows.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_code(&self, n: usize) -> Result<GroupCode<G2>, SymplecticError> {
        match self {
            Rows::Pauli(r) | Rows::Xz(r) => GroupCode::from_vectors(n, r),
            Rows::Gf4 { rows, linear } => GroupCode::from_gf4_rows(n, rows, *linear),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphFormat {
    Edges,
    Adjacency,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorStmt {
    pub name: String,
    pub code: String,
    pub ports: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    Code {
        n: usize,
        rows: Rows,
    },
    Binary {
        n: usize,
        rows: Vec<Vec<G2>>,
    },
    Section {
        mu: usize,
        k: usize,
        rows: Rows,
    },
    /// Edges are 0-based, `i < j`, sorted.
    Graph {
        n: usize,
        edges: Vec<(usize, usize)>,
        format: GraphFormat,
    },
    Ffg {
        half_edges: Vec<String>,
        edges: Vec<(String, usize)>,
        factors: Vec<FactorStmt>,
    },
    Css {
        b1: String,
        b2: String,
    },
    Chain {
        section: String,
        len: usize,
        boundary: Boundary,
    },
    GraphState {
        graph: String,
    },
    /// `perm` is 0-based.
    Turbo {
        outer: String,
        inner: String,
        perm: Vec<usize>,
        inputs: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Code,
    Binary,
    Section,
    Graph,
    Ffg,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Code => "code",
            Kind::Binary => "binary matrix",
            Kind::Section => "section",
            Kind::Graph => "graph",
            Kind::Ffg => "factor graph",
        }
    }
}

impl Body {
    pub fn kind(&self) -> Kind {
        match self {
            Body::Code { .. } | Body::Css { .. } => Kind::Code,
            Body::Binary { .. } => Kind::Binary,
            Body::Section { .. } => Kind::Section,
            Body::Graph { .. } => Kind::Graph,
            Body::Ffg { .. } | Body::Chain { .. } | Body::GraphState { .. } | Body::Turbo { .. } => Kind::Ffg,
        }
    }

    /// Names of other definitions this one uses, in order of first use.
    pub fn references(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        let list: Vec<&str> = match self {
            Body::Ffg { factors, .. } => factors.iter().map(|f| f.code.as_str()).collect(),
            Body::Css { b1, b2 } => vec![b1, b2],
            Body::Chain { section, .. } => vec![section],
            Body::GraphState { graph } => vec![graph],
            Body::Turbo { outer, inner, .. } => vec![outer, inner],
            _ => vec![],
        };
        for r in list {
            if !out.contains(&r) {
                out.push(r);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    /// Text of the `#` lines directly above the definition.
    pub comments: Vec<String>,
    pub body: Body,
}

/// Definitions keyed by name; statement order is not part of the value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    defs: BTreeMap<String, Definition>,
}

/// Evaluated definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Code(GroupCode<G2>),
    Binary(FMatrix<G2>),
    Section(TrellisSection<G2>),
    Graph(GraphSpec),
    Ffg(Ffg<G2>),
}

impl Value {
    pub fn kind(&self) -> Kind {
        match self {
            Value::Code(_) => Kind::Code,
            Value::Binary(_) => Kind::Binary,
            Value::Section(_) => Kind::Section,
            Value::Graph(_) => Kind::Graph,
            Value::Ffg(_) => Kind::Ffg,
        }
    }
}

/// Splits digit runs from the rest so that `t2 < t10`.
pub(crate) fn natural_key(s: &str) -> Vec<(bool, String)> {
    let mut out: Vec<(bool, String)> = Vec::new();
    for ch in s.chars() {
        let digit = ch.is_ascii_digit();
        match out.last_mut() {
            Some((d, buf)) if *d == digit => buf.push(ch),
            _ => out.push((digit, ch.to_string())),
        }
    }
    out.into_iter().map(|(d, b)| if d { (d, format!("{:0>20}", b.trim_start_matches('0'))) } else { (d, b) }).collect()
}

impl Document {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Definition> {
        self.defs.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.keys().map(String::as_str)
    }

    /// Adds or replaces a definition. References are not checked here;
    /// [`Document::evaluate`] reports missing ones.
    pub fn insert(&mut self, def: Definition) {
        self.defs.insert(def.name.clone(), def);
    }

    /// Definitions with every dependency before its first user. Roots are
    /// visited in natural name order, dependencies in order of first use.
    pub fn canonical_order(&self) -> Vec<&Definition> {
        let mut names: Vec<&String> = self.defs.keys().collect();
        names.sort_by_key(|n| natural_key(n));
        let mut seen: HashMap<&str, bool> = HashMap::new();
        let mut out = Vec::new();
        fn visit<'a>(
            doc: &'a Document,
            name: &'a str,
            seen: &mut HashMap<&'a str, bool>,
            out: &mut Vec<&'a Definition>,
        ) {
            if seen.contains_key(name) {
                return;
            }
            seen.insert(name, true);
            let Some(def) = doc.defs.get(name) else { return };
            for r in def.body.references() {
                visit(doc, r, seen, out);
            }
            out.push(def);
        }
        for n in names {
            visit(self, n, &mut seen, &mut out);
        }
        out
    }

    /// The definition `name` together with everything it refers to.
    pub fn closure(&self, name: &str) -> Document {
        let mut out = Document::new();
        let mut stack = vec![name];
        while let Some(n) = stack.pop() {
            if out.get(n).is_some() {
                continue;
            }
            if let Some(d) = self.defs.get(n) {
                stack.extend(d.body.references());
                out.insert(d.clone());
            }
        }
        out
    }

    pub fn evaluate(&self, name: &str) -> Result<Value, EvalError> {
        self.eval_depth(name, 0)
    }

    /// The code a definition denotes: codes directly, sections by their
    /// section code, graphs by `[I | A]`, factor graphs by extraction.
    pub fn code(&self, name: &str) -> Result<GroupCode<G2>, EvalError> {
        match self.evaluate(name)? {
            Value::Code(c) => Ok(c),
            Value::Section(s) => Ok(s.code().clone()),
            Value::Graph(g) => Ok(crate::constructions::graph_state_code(&g)),
            Value::Ffg(g) => extract_global_code(&g).map_err(|source| EvalError::Ffg { name: name.into(), source }),
            Value::Binary(_) => {
                Err(EvalError::WrongKind { name: name.into(), expected: "code", found: "binary matrix" })
            }
        }
    }

    pub fn ffg(&self, name: &str) -> Result<Ffg<G2>, EvalError> {
        match self.evaluate(name)? {
            Value::Ffg(g) => Ok(g),
            v => Err(EvalError::WrongKind { name: name.into(), expected: "factor graph", found: v.kind().name() }),
        }
    }

    fn eval_depth(&self, name: &str, depth: usize) -> Result<Value, EvalError> {
        let def = self.defs.get(name).ok_or_else(|| EvalError::UnknownName(name.into()))?;
        if depth > self.defs.len() {
            return Err(EvalError::UnknownName(format!("{name} (cyclic reference)")));
        }
        let code_err = |source| EvalError::Code { name: name.into(), source };
        let cons_err = |source| EvalError::Construction { name: name.into(), source };
        let get = |r: &str, kind: Kind| -> Result<Value, EvalError> {
            let v = self.eval_depth(r, depth + 1)?;
            if v.kind() != kind {
                return Err(EvalError::WrongKind { name: r.into(), expected: kind.name(), found: v.kind().name() });
            }
            Ok(v)
        };
        Ok(match &def.body {
            Body::Code { n, rows } => Value::Code(rows.to_code(*n).map_err(code_err)?),
            Body::Binary { n, rows } => Value::Binary(FMatrix::from_rows(*n, rows).map_err(|e| code_err(e.into()))?),
            Body::Section { mu, k, rows } => {
                let code = rows.to_code(2 * mu + k).map_err(code_err)?;
                Value::Section(TrellisSection::new(*mu, *k, code).map_err(cons_err)?)
            }
            Body::Graph { n, edges, .. } => Value::Graph(GraphSpec::new(*n, edges).map_err(cons_err)?),
            Body::Ffg { half_edges, edges, factors } => {
                let mut b = FfgBuilder::new();
                for h in half_edges {
                    b.half_edge(h.clone());
                }
                for (e, mu) in edges {
                    b.edge(e.clone(), *mu);
                }
                for f in factors {
                    let code = match self.eval_depth(&f.code, depth + 1)? {
                        Value::Code(c) => c,
                        Value::Section(s) => s.code().clone(),
                        v => {
                            return Err(EvalError::WrongKind {
                                name: f.code.clone(),
                                expected: "code",
                                found: v.kind().name(),
                            })
                        }
                    };
                    b.factor(f.name.clone(), code, &f.ports);
                }
                let g = b.build();
                g.ensure_valid().map_err(|source| EvalError::Ffg { name: name.into(), source })?;
                Value::Ffg(g)
            }
            Body::Css { b1, b2 } => {
                let (Value::Binary(m1), Value::Binary(m2)) = (get(b1, Kind::Binary)?, get(b2, Kind::Binary)?) else {
                    unreachable!("kinds checked")
                };
                Value::Code(css(&m1, &m2).map_err(code_err)?)
            }
            Body::Chain { section, len, boundary } => {
                let Value::Section(s) = get(section, Kind::Section)? else { unreachable!("kind checked") };
                Value::Ffg(conv_chain(&s, *len, *boundary).map_err(cons_err)?)
            }
            Body::GraphState { graph } => {
                let Value::Graph(g) = get(graph, Kind::Graph)? else { unreachable!("kind checked") };
                Value::Ffg(graph_state_ffg(&g))
            }
            Body::Turbo { outer, inner, perm, inputs } => {
                let Value::Ffg(o) = get(outer, Kind::Ffg)? else { unreachable!("kind checked") };
                let Value::Ffg(i) = get(inner, Kind::Ffg)? else { unreachable!("kind checked") };
                Value::Ffg(turbo_serial(&o, perm, &i, inputs).map_err(cons_err)?)
            }
        })
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_order() {
        let mut v = vec!["t10", "t2", "a", "t1_10", "t1_2"];
        v.sort_by_key(|s| natural_key(s));
        assert_eq!(v, vec!["a", "t1_2", "t1_10", "t2", "t10"]);
    }
}
