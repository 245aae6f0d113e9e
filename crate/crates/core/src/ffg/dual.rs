use super::{Edge, FactorNode, FactorRole, Ffg, FfgError, Port};
use crate::field::PrimeField;
use crate::linalg::FMatrix;
use crate::symplectic::GroupCode;

fn require_binary<F: PrimeField>() -> Result<(), FfgError> {
    if F::ORDER == 2 {
        Ok(())
    } else {
        Err(FfgError::RequiresBinary { order: F::ORDER })
    }
}

/// Same topology, every local code replaced by its symplectic dual. Only
/// meaningful in characteristic 2, where `-m = m`.
pub fn dualize<F: PrimeField>(g: &Ffg<F>) -> Result<Ffg<F>, FfgError> {
    require_binary::<F>()?;
    g.ensure_valid()?;
    let factors = g.factors().iter().map(|f| FactorNode { code: f.code.dual(), ..f.clone() }).collect();
    Ok(Ffg::from_parts(g.half_edges().to_vec(), g.edges().to_vec(), factors))
}

/// `{(a, -a)}` on two blocks of `mu` symbol pairs.
pub fn negation_code<F: PrimeField>(mu: usize) -> GroupCode<F> {
    let n = 2 * mu;
    let mut rows = Vec::new();
    for h in 0..mu {
        for comp in 0..2 {
            let mut r = vec![F::zero(); 2 * n];
            r[comp * n + h] = F::one();
            r[comp * n + mu + h] = -F::one();
            rows.push(r);
        }
    }
    GroupCode::from_generators(n, FMatrix::from_rows(2 * n, &rows).expect("width")).expect("width")
}

pub(crate) fn primed(name: &str) -> String {
    format!("{name}'")
}

fn double_primed(name: &str) -> String {
    format!("{name}''")
}

/// Dual graph for any prime `p`: local codes are dualized, each edge `M` is
/// cut into `M'` (first endpoint) and `M''` (second endpoint) joined by a
/// negation factor `~M`, and half-edges are renamed `T'`.
pub fn dualize_general<F: PrimeField>(g: &Ffg<F>) -> Result<Ffg<F>, FfgError> {
    g.ensure_valid()?;
    let mut factors: Vec<FactorNode<F>> =
        g.factors().iter().map(|f| FactorNode { code: f.code.dual(), ..f.clone() }).collect();
    for f in &mut factors {
        for p in &mut f.ports {
            if g.is_half_edge(&p.variable) {
                p.variable = primed(&p.variable);
            }
        }
    }
    let mut edges = Vec::new();
    for e in g.edges() {
        let ends = g.endpoints(&e.name);
        let (a, b) = (ends[0], ends[1]);
        factors[a.0].ports[a.1].variable = primed(&e.name);
        factors[b.0].ports[b.1].variable = double_primed(&e.name);
        edges.push(Edge { name: primed(&e.name), multiplicity: e.multiplicity });
        edges.push(Edge { name: double_primed(&e.name), multiplicity: e.multiplicity });
    }
    for e in g.edges() {
        let mu = e.multiplicity;
        factors.push(FactorNode {
            name: format!("~{}", e.name),
            ports: vec![
                Port { variable: primed(&e.name), multiplicity: mu, offset: 0 },
                Port { variable: double_primed(&e.name), multiplicity: mu, offset: mu },
            ],
            code: negation_code(mu),
            role: FactorRole::Negation { edge: e.name.clone() },
        });
    }
    let half_edges = g.half_edges().iter().map(|h| primed(h)).collect();
    Ok(Ffg::from_parts(half_edges, edges, factors))
}

/// Removes the negation factors of a characteristic-2 dual graph, where they
/// reduce to equalities, restoring each edge `M` under its original name.
pub fn contract_negations<F: PrimeField>(g: &Ffg<F>) -> Result<Ffg<F>, FfgError> {
    require_binary::<F>()?;
    g.ensure_valid()?;
    let mut factors: Vec<FactorNode<F>> = Vec::new();
    let mut renames: Vec<(String, String)> = Vec::new();
    let mut edges: Vec<Edge> = g.edges().to_vec();
    for f in g.factors() {
        match &f.role {
            FactorRole::Negation { edge } if f.ports.len() == 2 => {
                let mu = f.ports[0].multiplicity;
                for p in &f.ports {
                    renames.push((p.variable.clone(), edge.clone()));
                }
                edges.retain(|e| e.name != f.ports[0].variable && e.name != f.ports[1].variable);
                edges.push(Edge { name: edge.clone(), multiplicity: mu });
            }
            _ => factors.push(f.clone()),
        }
    }
    for f in &mut factors {
        for p in &mut f.ports {
            if let Some((_, to)) = renames.iter().find(|(from, _)| *from == p.variable) {
                p.variable = to.clone();
            }
        }
    }
    Ok(Ffg::from_parts(g.half_edges().to_vec(), edges, factors))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    SelfDual,
    SelfOrthogonal,
    /// The composition rule does not apply. The global code may still be
    /// self-orthogonal.
    NoCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorCheck {
    pub name: String,
    pub self_orthogonal: bool,
    pub self_dual: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub factors: Vec<FactorCheck>,
}

impl Certificate {
    /// Factors whose local code is not self-orthogonal.
    pub fn failing(&self) -> Vec<&str> {
        self.factors.iter().filter(|c| !c.self_orthogonal).map(|c| c.name.as_str()).collect()
    }
}

/// Sufficient condition for self-orthogonality (or self-duality) of the
/// global code: every local code has the property.
pub fn certify_prop1<F: PrimeField>(g: &Ffg<F>) -> Result<Certificate, FfgError> {
    require_binary::<F>()?;
    g.ensure_valid()?;
    let factors: Vec<FactorCheck> = g
        .factors()
        .iter()
        .map(|f| FactorCheck {
            name: f.name.clone(),
            self_orthogonal: f.code.is_self_orthogonal(),
            self_dual: f.code.is_self_dual(),
        })
        .collect();
    let verdict = if factors.iter().all(|c| c.self_dual) {
        Verdict::SelfDual
    } else if factors.iter().all(|c| c.self_orthogonal) {
        Verdict::SelfOrthogonal
    } else {
        Verdict::NoCertificate
    };
    Ok(Certificate { verdict, factors })
}
