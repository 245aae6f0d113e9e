use num_traits::Float;

use super::{ChannelModel, InferenceError, G2};
use crate::ffg::Ffg;
use crate::field::Field;
use crate::symplectic::SympVector;

/// Largest edge multiplicity whose messages are tabulated (`4^μ` entries).
pub const MAX_MESSAGE_MULTIPLICITY: usize = 4;
const MAX_LOCAL_RANK: usize = 20;

/// Nonnegative weights on the elements of each local code, plus a prior
/// table per half-edge. The default is the plain indicator with uniform
/// priors.
#[derive(Debug, Clone)]
pub struct FactorWeights<T: Float> {
    ffg: Ffg<G2>,
    /// Per factor: (port value indices, weight) for every local codeword.
    entries: Vec<Vec<(Vec<usize>, T)>>,
    priors: Vec<[T; 4]>,
}

/// Index of a variable value: `Σ_h sym_h 4^h` over its `μ` pairs.
fn port_index(v: &SympVector<G2>, offset: usize, mu: usize) -> usize {
    (0..mu).rev().fold(0, |acc, h| {
        let (x, z) = v.pair(offset + h);
        acc * 4 + (x.index() | z.index() << 1) as usize
    })
}

impl<T: Float> FactorWeights<T> {
    pub fn indicator(ffg: &Ffg<G2>) -> Result<Self, InferenceError> {
        ffg.ensure_valid()?;
        for e in ffg.edges() {
            if e.multiplicity > MAX_MESSAGE_MULTIPLICITY {
                return Err(InferenceError::MultiplicityTooLarge {
                    name: e.name.clone(),
                    mu: e.multiplicity,
                    max: MAX_MESSAGE_MULTIPLICITY,
                });
            }
        }
        let mut entries = Vec::new();
        for f in ffg.factors() {
            if f.code.rank() > MAX_LOCAL_RANK {
                return Err(InferenceError::FactorTooLarge {
                    name: f.name.clone(),
                    codewords: format!("2^{}", f.code.rank()),
                });
            }
            let list = f
                .code
                .codewords()
                .map(|w| (f.ports.iter().map(|p| port_index(&w, p.offset, p.multiplicity)).collect(), T::one()))
                .collect();
            entries.push(list);
        }
        let priors = vec![[T::one(); 4]; ffg.half_edges().len()];
        Ok(FactorWeights { ffg: ffg.clone(), entries, priors })
    }

    pub fn ffg(&self) -> &Ffg<G2> {
        &self.ffg
    }

    /// Reweights the codewords of factor `fi`, visited in the order of
    /// [`GroupCode::codewords`](crate::GroupCode::codewords).
    pub fn set_factor_weights(&mut self, fi: usize, w: impl Fn(&SympVector<G2>) -> T) -> Result<(), InferenceError> {
        let f = &self.ffg.factors()[fi];
        for (entry, word) in self.entries[fi].iter_mut().zip(f.code.codewords()) {
            let v = w(&word);
            if !v.is_finite() || v < T::zero() {
                return Err(InferenceError::NegativeWeight { name: f.name.clone() });
            }
            entry.1 = v;
        }
        Ok(())
    }

    pub fn set_prior(&mut self, half_edge: usize, table: [T; 4]) -> Result<(), InferenceError> {
        if table.iter().any(|p| !p.is_finite() || *p < T::zero()) {
            return Err(InferenceError::NegativeWeight { name: self.ffg.half_edges()[half_edge].clone() });
        }
        self.priors[half_edge] = table;
        Ok(())
    }

    /// Priors from a channel, position `i` for the `i`-th half-edge.
    pub fn with_channel(mut self, ch: &ChannelModel<T>) -> Result<Self, InferenceError> {
        if ch.n() != self.priors.len() {
            return Err(InferenceError::ChannelLength { channel: ch.n(), code: self.priors.len() });
        }
        for i in 0..ch.n() {
            self.priors[i] = *ch.table(i);
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule<T> {
    /// Exact marginals; the graph must be cycle-free.
    ExactTree,
    /// Synchronous updates `m ← m_new^(1-damping) · m_old^damping`, stopping
    /// once the largest entry change drops below `tol`.
    Flooding { max_iters: usize, damping: T, tol: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence<T> {
    pub iterations: usize,
    pub converged: bool,
    pub max_delta: T,
}

/// Normalized marginal tables, `4^μ` entries each, indexed like messages.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals<T> {
    pub half_edges: Vec<(String, Vec<T>)>,
    pub edges: Vec<(String, Vec<T>)>,
    pub convergence: Convergence<T>,
}

impl<T> Marginals<T> {
    pub fn get(&self, name: &str) -> Option<&[T]> {
        self.half_edges.iter().chain(&self.edges).find(|(n, _)| n == name).map(|(_, t)| t.as_slice())
    }
}

#[derive(Clone, Copy)]
enum Source {
    Prior(usize),
    Message(usize, usize),
}

fn is_forest(g: &Ffg<G2>) -> bool {
    let n = g.factors().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in g.edges() {
        let ends = g.endpoints(&e.name);
        let (a, b) = (find(&mut parent, ends[0].0), find(&mut parent, ends[1].0));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

fn normalize<T: Float>(v: &mut [T]) -> Result<(), InferenceError> {
    let s = v.iter().fold(T::zero(), |a, &b| a + b);
    if !s.is_finite() || s <= T::zero() {
        return Err(InferenceError::ZeroWeight);
    }
    for x in v.iter_mut() {
        *x = *x / s;
    }
    Ok(())
}

pub fn sum_product<T: Float>(fw: &FactorWeights<T>, schedule: Schedule<T>) -> Result<Marginals<T>, InferenceError> {
    let g = &fw.ffg;
    let (max_iters, damping, tol) = match schedule {
        Schedule::ExactTree => {
            if !is_forest(g) {
                return Err(InferenceError::Cyclic);
            }
            (g.factors().len() + 1, T::zero(), T::zero())
        }
        Schedule::Flooding { max_iters, damping, tol } => (max_iters, damping, tol),
    };

    let half_index = |name: &str| g.half_edges().iter().position(|h| h == name);
    let sources: Vec<Vec<Source>> = g
        .factors()
        .iter()
        .enumerate()
        .map(|(fi, f)| {
            f.ports
                .iter()
                .enumerate()
                .map(|(pi, p)| match half_index(&p.variable) {
                    Some(h) => Source::Prior(h),
                    None => {
                        let other = g
                            .endpoints(&p.variable)
                            .into_iter()
                            .find(|&e| e != (fi, pi))
                            .expect("validated edge has two endpoints");
                        Source::Message(other.0, other.1)
                    }
                })
                .collect()
        })
        .collect();

    let mut msgs: Vec<Vec<Vec<T>>> = g
        .factors()
        .iter()
        .map(|f| {
            f.ports
                .iter()
                .map(|p| {
                    let size = 1usize << (2 * p.multiplicity);
                    vec![T::one() / T::from(size).unwrap(); size]
                })
                .collect()
        })
        .collect();

    let mut convergence = Convergence { iterations: 0, converged: false, max_delta: T::infinity() };
    for it in 1..=max_iters {
        let mut next: Vec<Vec<Vec<T>>> = Vec::with_capacity(msgs.len());
        for (fi, f) in g.factors().iter().enumerate() {
            let inputs: Vec<&[T]> = sources[fi]
                .iter()
                .map(|s| match *s {
                    Source::Prior(h) => &fw.priors[h][..],
                    Source::Message(fo, po) => msgs[fo][po].as_slice(),
                })
                .collect();
            let k = f.ports.len();
            let mut out: Vec<Vec<T>> = msgs[fi].iter().map(|m| vec![T::zero(); m.len()]).collect();
            let mut prefix = vec![T::one(); k + 1];
            let mut suffix = vec![T::one(); k + 1];
            for (idx, w) in &fw.entries[fi] {
                if *w == T::zero() {
                    continue;
                }
                for j in 0..k {
                    prefix[j + 1] = prefix[j] * inputs[j][idx[j]];
                }
                for j in (0..k).rev() {
                    suffix[j] = suffix[j + 1] * inputs[j][idx[j]];
                }
                for j in 0..k {
                    out[j][idx[j]] = out[j][idx[j]] + *w * prefix[j] * suffix[j + 1];
                }
            }
            for m in &mut out {
                normalize(m)?;
            }
            next.push(out);
        }
        let mut delta = T::zero();
        for (fi, ports) in next.iter_mut().enumerate() {
            for (pi, m) in ports.iter_mut().enumerate() {
                if damping > T::zero() {
                    for (x, &old) in m.iter_mut().zip(&msgs[fi][pi]) {
                        *x = x.powf(T::one() - damping) * old.powf(damping);
                    }
                    normalize(m)?;
                }
                for (&x, &old) in m.iter().zip(&msgs[fi][pi]) {
                    delta = delta.max((x - old).abs());
                }
            }
        }
        msgs = next;
        convergence.iterations = it;
        convergence.max_delta = delta;
        if matches!(schedule, Schedule::Flooding { .. }) && delta < tol {
            convergence.converged = true;
            break;
        }
    }
    if matches!(schedule, Schedule::ExactTree) {
        convergence.converged = true;
    }

    let mut half_edges = Vec::new();
    for (h, name) in g.half_edges().iter().enumerate() {
        let (fi, pi) = g.endpoints(name)[0];
        let mut b: Vec<T> = fw.priors[h].iter().zip(&msgs[fi][pi]).map(|(&a, &m)| a * m).collect();
        normalize(&mut b)?;
        half_edges.push((name.clone(), b));
    }
    let mut edges = Vec::new();
    for e in g.edges() {
        let ends = g.endpoints(&e.name);
        let (a, b) = (ends[0], ends[1]);
        let mut m: Vec<T> = msgs[a.0][a.1].iter().zip(&msgs[b.0][b.1]).map(|(&x, &y)| x * y).collect();
        normalize(&mut m)?;
        edges.push((e.name.clone(), m));
    }
    Ok(Marginals { half_edges, edges, convergence })
}
