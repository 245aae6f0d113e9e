#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabffg::{FMatrix, Ffg, FfgBuilder, GroupCode, PrimeField, SympVector, Zp};

pub type G2 = Zp<2>;
pub type G3 = Zp<3>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vector<F: PrimeField>(rng: &mut ChaCha8Rng, len: usize) -> Vec<F> {
    (0..len).map(|_| F::from_index(rng.gen_range(0..F::ORDER))).collect()
}

/// Span of up to `2n` uniformly random rows.
pub fn random_code<F: PrimeField>(rng: &mut ChaCha8Rng, n: usize) -> GroupCode<F> {
    let k = rng.gen_range(0..=2 * n);
    let rows: Vec<Vec<F>> = (0..k).map(|_| random_vector(rng, 2 * n)).collect();
    GroupCode::from_generators(n, FMatrix::from_rows(2 * n, &rows).unwrap()).unwrap()
}

/// Random self-orthogonal binary code grown one dual vector at a time.
pub fn random_self_orthogonal(rng: &mut ChaCha8Rng, n: usize, self_dual: bool) -> GroupCode<G2> {
    let target = if self_dual { n } else { rng.gen_range(0..=n) };
    let mut c = GroupCode::<G2>::zero(n);
    while c.rank() < target {
        let d = c.dual().basis().to_rows();
        let mut v = vec![G2::new(0); 2 * n];
        for row in &d {
            if rng.gen::<bool>() {
                for (a, b) in v.iter_mut().zip(row) {
                    *a += *b;
                }
            }
        }
        let w = SympVector::from_block(&v).unwrap();
        if !c.contains(&w) {
            let mut rows = c.basis().to_rows();
            rows.push(v);
            c = GroupCode::from_generators(n, FMatrix::from_rows(2 * n, &rows).unwrap()).unwrap();
        }
    }
    c
}

/// Random valid factor graph: up to `max_factors` factors with 1..=`max_ports`
/// ports of multiplicity 1, slots paired at random into edges (self-loops
/// included) so that at most `max_half` half-edges remain.
pub fn random_ffg<F: PrimeField>(
    rng: &mut ChaCha8Rng,
    max_factors: usize,
    max_ports: usize,
    max_half: usize,
    mut code: impl FnMut(&mut ChaCha8Rng, usize) -> GroupCode<F>,
) -> Ffg<F> {
    let nf = rng.gen_range(1..=max_factors);
    let widths: Vec<usize> = (0..nf).map(|_| rng.gen_range(1..=max_ports)).collect();
    let mut slots: Vec<(usize, usize)> =
        widths.iter().enumerate().flat_map(|(f, &w)| (0..w).map(move |k| (f, k))).collect();
    slots.shuffle(rng);
    let s = slots.len();
    let min_edges = s.saturating_sub(max_half).div_ceil(2);
    let ne = rng.gen_range(min_edges..=s / 2);
    let mut names: HashMap<(usize, usize), String> = HashMap::new();
    let mut b = FfgBuilder::<F>::new();
    for i in 0..ne {
        let name = format!("m{}", i + 1);
        b.edge(name.clone(), 1);
        names.insert(slots[2 * i], name.clone());
        names.insert(slots[2 * i + 1], name);
    }
    let mut halves: Vec<(usize, usize)> = slots[2 * ne..].to_vec();
    halves.sort_unstable();
    for (j, slot) in halves.iter().enumerate() {
        let name = format!("t{}", j + 1);
        b.half_edge(name.clone());
        names.insert(*slot, name);
    }
    for (f, &w) in widths.iter().enumerate() {
        let ports: Vec<String> = (0..w).map(|k| names[&(f, k)].clone()).collect();
        let c = code(rng, w);
        b.factor(format!("f{}", f + 1), c, &ports);
    }
    let g = b.build();
    g.ensure_valid().unwrap();
    g
}

/// Random cycle-free factor graph whose edges have multiplicity 1 or 2.
pub fn random_tree_ffg(rng: &mut ChaCha8Rng, max_factors: usize) -> Ffg<G2> {
    let nf = rng.gen_range(1..=max_factors);
    let mut ports: Vec<Vec<(String, usize)>> = vec![Vec::new(); nf];
    let mut b = FfgBuilder::<G2>::new();
    let mut h = 0;
    for f in 0..nf {
        if f > 0 && rng.gen_bool(0.8) {
            let other = rng.gen_range(0..f);
            let mu = rng.gen_range(1..=2);
            let name = format!("m{f}");
            b.edge(name.clone(), mu);
            ports[f].push((name.clone(), mu));
            ports[other].push((name, mu));
        }
    }
    for p in ports.iter_mut() {
        let extra = if p.is_empty() { rng.gen_range(1..=2) } else { rng.gen_range(0..=2) };
        for _ in 0..extra {
            h += 1;
            let name = format!("t{h}");
            b.half_edge(name.clone());
            p.push((name, 1));
        }
        p.shuffle(rng);
    }
    for (f, p) in ports.iter().enumerate() {
        let width: usize = p.iter().map(|(_, m)| m).sum();
        let code = random_code::<G2>(rng, width);
        let names: Vec<&str> = p.iter().map(|(n, _)| n.as_str()).collect();
        b.factor(format!("f{}", f + 1), code, &names);
    }
    let g = b.build();
    g.ensure_valid().unwrap();
    g
}

type Value = Vec<(u32, u32)>;

fn port_value<F: PrimeField>(w: &SympVector<F>, offset: usize, mu: usize) -> Value {
    (offset..offset + mu)
        .map(|i| {
            let (x, z) = w.pair(i);
            (x.index(), z.index())
        })
        .collect()
}

/// All local codewords of every factor, split into per-port values.
fn local_tables<F: PrimeField>(g: &Ffg<F>) -> Vec<Vec<Vec<Value>>> {
    g.factors()
        .iter()
        .map(|f| {
            f.code
                .codewords()
                .map(|w| f.ports.iter().map(|p| port_value(&w, p.offset, p.multiplicity)).collect())
                .collect()
        })
        .collect()
}

/// Global code by relational join: factors are joined one at a time and an
/// internal variable is projected out as soon as both its ports are used.
pub fn join_extract<F: PrimeField>(g: &Ffg<F>) -> HashSet<Vec<(u32, u32)>> {
    let tables = local_tables(g);
    let mut remaining: HashMap<&str, usize> = HashMap::new();
    for f in g.factors() {
        for p in &f.ports {
            *remaining.entry(p.variable.as_str()).or_default() += 1;
        }
    }
    let mut rows: HashSet<Vec<(String, Value)>> = HashSet::from([Vec::new()]);
    for (fi, f) in g.factors().iter().enumerate() {
        let mut next = HashSet::new();
        for row in &rows {
            let bound: HashMap<&str, &Value> = row.iter().map(|(k, v)| (k.as_str(), v)).collect();
            'words: for w in &tables[fi] {
                let mut local: HashMap<&str, &Value> = HashMap::new();
                for (p, val) in f.ports.iter().zip(w) {
                    let var = p.variable.as_str();
                    if let Some(prev) = bound.get(var).or(local.get(var)) {
                        if *prev != val {
                            continue 'words;
                        }
                    }
                    local.insert(var, val);
                }
                let mut merged: Vec<(String, Value)> = row.clone();
                for (var, val) in local {
                    if !bound.contains_key(var) {
                        merged.push((var.to_string(), val.clone()));
                    }
                }
                next.insert(merged);
            }
        }
        for p in &f.ports {
            *remaining.get_mut(p.variable.as_str()).unwrap() -= 1;
        }
        rows = next
            .into_iter()
            .map(|mut r| {
                r.retain(|(k, _)| g.is_half_edge(k) || remaining[k.as_str()] > 0);
                r.sort();
                r
            })
            .collect();
    }
    rows.into_iter()
        .map(|r| {
            let m: HashMap<String, Value> = r.into_iter().collect();
            g.half_edges().iter().flat_map(|h| m[h].clone()).collect()
        })
        .collect()
}

/// Codewords of `c` in the same per-symbol `(x, z)` layout as [`join_extract`].
pub fn codeword_set<F: PrimeField>(c: &GroupCode<F>) -> HashSet<Vec<(u32, u32)>> {
    c.codewords().map(|w| port_value(&w, 0, c.n())).collect()
}

/// Unnormalized brute-force marginals of every variable. `weights[f]`
/// lists a weight per local codeword (in `codewords()` order) and
/// `priors[h]` a table per half-edge symbol `x | z << 1`.
pub fn brute_marginals(g: &Ffg<G2>, weights: &[Vec<f64>], priors: &[[f64; 4]]) -> HashMap<String, Vec<f64>> {
    let tables = local_tables(g);
    let mut out: HashMap<String, Vec<f64>> = HashMap::new();
    for f in g.factors() {
        for p in &f.ports {
            out.insert(p.variable.clone(), vec![0.0; 1 << (2 * p.multiplicity)]);
        }
    }
    let index = |v: &Value| v.iter().rev().fold(0usize, |acc, &(x, z)| acc * 4 + (x | z << 1) as usize);
    fn rec(
        g: &Ffg<G2>,
        tables: &[Vec<Vec<Value>>],
        weights: &[Vec<f64>],
        fi: usize,
        assign: &mut HashMap<String, Value>,
        weight: f64,
        acc: &mut Vec<(HashMap<String, Value>, f64)>,
    ) {
        if fi == tables.len() {
            acc.push((assign.clone(), weight));
            return;
        }
        let f = &g.factors()[fi];
        'words: for (wi, w) in tables[fi].iter().enumerate() {
            let mut added = Vec::new();
            for (p, val) in f.ports.iter().zip(w) {
                match assign.get(&p.variable) {
                    Some(prev) if prev != val => {
                        for a in &added {
                            assign.remove(a);
                        }
                        continue 'words;
                    }
                    Some(_) => {}
                    None => {
                        assign.insert(p.variable.clone(), val.clone());
                        added.push(p.variable.clone());
                    }
                }
            }
            rec(g, tables, weights, fi + 1, assign, weight * weights[fi][wi], acc);
            for a in &added {
                assign.remove(a);
            }
        }
    }
    let mut configs = Vec::new();
    rec(g, &tables, weights, 0, &mut HashMap::new(), 1.0, &mut configs);
    for (assign, w) in configs {
        let mut w = w;
        for (hi, h) in g.half_edges().iter().enumerate() {
            w *= priors[hi][index(&assign[h])];
        }
        for (var, val) in &assign {
            out.get_mut(var).unwrap()[index(val)] += w;
        }
    }
    for t in out.values_mut() {
        let s: f64 = t.iter().sum();
        if s > 0.0 {
            t.iter_mut().for_each(|x| *x /= s);
        }
    }
    out
}

/// Symplectic dual by enumerating the whole ambient space.
pub fn enumerate_dual<F: PrimeField>(c: &GroupCode<F>) -> GroupCode<F> {
    let n = c.n();
    let gens = c.basis_vectors();
    let total = (F::ORDER as u64).pow(2 * n as u32);
    let mut keep = Vec::new();
    for mut k in 0..total {
        let v: Vec<F> = (0..2 * n)
            .map(|_| {
                let d = (k % F::ORDER as u64) as u32;
                k /= F::ORDER as u64;
                F::from_index(d)
            })
            .collect();
        let w = SympVector::from_block(&v).unwrap();
        if gens.iter().all(|g| stabffg::symplectic::symp_inner(g, &w).unwrap().index() == 0) {
            keep.push(v);
        }
    }
    GroupCode::from_generators(n, FMatrix::from_rows(2 * n, &keep).unwrap()).unwrap()
}

use stabffg::constructions::Boundary;
use stabffg::dsl::{Body, Definition, Document, FactorStmt, GraphFormat, Rows};
use stabffg::symplectic::Gf4Word;
use stabffg::Gf4;

fn name(rng: &mut ChaCha8Rng, taken: &mut HashSet<String>) -> String {
    loop {
        let len = rng.gen_range(1..=6);
        let mut s = String::new();
        s.push(rng.gen_range(b'a'..=b'z') as char);
        for _ in 1..len {
            s.push(*b"abcxyz019_.-".choose(rng).unwrap() as char);
        }
        if taken.insert(s.clone()) {
            return s;
        }
    }
}

fn comments(rng: &mut ChaCha8Rng) -> Vec<String> {
    (0..rng.gen_range(0..=2))
        .map(|_| {
            let len = rng.gen_range(0..12);
            let s: String = (0..len).map(|_| *b"ab XZ#:.-1".choose(rng).unwrap() as char).collect();
            s.trim_end().to_string()
        })
        .collect()
}

fn bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<G2> {
    (0..n).map(|_| G2::new(rng.gen_range(0..2))).collect()
}

fn rows(rng: &mut ChaCha8Rng, n: usize) -> Rows {
    let k = rng.gen_range(0..=4);
    match rng.gen_range(0..3) {
        0 => Rows::Pauli((0..k).map(|_| SympVector::new(bits(rng, n), bits(rng, n)).unwrap()).collect()),
        1 => Rows::Xz((0..k).map(|_| SympVector::new(bits(rng, n), bits(rng, n)).unwrap()).collect()),
        _ => Rows::Gf4 {
            rows: (0..k).map(|_| Gf4Word((0..n).map(|_| Gf4::from_bits(rng.gen_range(0..4))).collect())).collect(),
            linear: rng.gen(),
        },
    }
}

/// A random well-formed document; references resolve and have the right
/// kinds, but the referenced objects need not evaluate.
pub fn random_document(rng: &mut ChaCha8Rng) -> Document {
    let mut taken = HashSet::new();
    let mut doc = Document::new();
    let mut by_kind: HashMap<&str, Vec<String>> = HashMap::new();
    for _ in 0..rng.gen_range(0..8) {
        let nm = name(rng, &mut taken);
        let pick = |rng: &mut ChaCha8Rng, by_kind: &HashMap<&str, Vec<String>>, k: &str| {
            by_kind.get(k).and_then(|v| v.choose(rng).cloned())
        };
        let (kind, body) = match rng.gen_range(0..9) {
            0 => {
                let n = rng.gen_range(1..=4);
                ("code", Body::Code { n, rows: rows(rng, n) })
            }
            1 => {
                let n = rng.gen_range(1..=5);
                let k = rng.gen_range(0..=3);
                ("binary", Body::Binary { n, rows: (0..k).map(|_| bits(rng, n)).collect() })
            }
            2 => {
                let (mu, k) = (rng.gen_range(1..=2), rng.gen_range(0..=2));
                ("section", Body::Section { mu, k, rows: rows(rng, 2 * mu + k) })
            }
            3 => {
                let n = rng.gen_range(0..=5);
                let mut edges: Vec<(usize, usize)> = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        if rng.gen_bool(0.4) {
                            edges.push((i, j));
                        }
                    }
                }
                let format = if rng.gen() { GraphFormat::Edges } else { GraphFormat::Adjacency };
                ("graph", Body::Graph { n, edges, format })
            }
            4 => {
                let mut vars = HashSet::new();
                let half_edges: Vec<String> = (0..rng.gen_range(0..3)).map(|_| name(rng, &mut vars)).collect();
                let edges: Vec<(String, usize)> =
                    (0..rng.gen_range(0..3)).map(|_| (name(rng, &mut vars), rng.gen_range(1..=3))).collect();
                let all: Vec<String> = vars.iter().cloned().collect::<Vec<_>>();
                let mut all = all;
                all.sort();
                let mut fnames = HashSet::new();
                let mut factors = Vec::new();
                if !all.is_empty() {
                    for _ in 0..rng.gen_range(0..3) {
                        let kind = if rng.gen() { "code" } else { "section" };
                        let Some(code) = pick(rng, &by_kind, kind) else { break };
                        let ports = (0..rng.gen_range(1..=3)).map(|_| all.choose(rng).unwrap().clone()).collect();
                        factors.push(FactorStmt { name: name(rng, &mut fnames), code, ports });
                    }
                }
                ("ffg", Body::Ffg { half_edges, edges, factors })
            }
            5 => match (pick(rng, &by_kind, "binary"), pick(rng, &by_kind, "binary")) {
                (Some(b1), Some(b2)) => ("code", Body::Css { b1, b2 }),
                _ => continue,
            },
            6 => match pick(rng, &by_kind, "section") {
                Some(section) => {
                    let boundary = if rng.gen() { Boundary::Terminated } else { Boundary::TailBiting };
                    ("ffg", Body::Chain { section, len: rng.gen_range(1..=4), boundary })
                }
                None => continue,
            },
            7 => match pick(rng, &by_kind, "graph") {
                Some(graph) => ("ffg", Body::GraphState { graph }),
                None => continue,
            },
            _ => match (pick(rng, &by_kind, "ffg"), pick(rng, &by_kind, "ffg")) {
                (Some(outer), Some(inner)) => {
                    let mut perm: Vec<usize> = (0..rng.gen_range(0..4)).collect();
                    perm.shuffle(rng);
                    let inputs = (0..rng.gen_range(0..3)).map(|i| format!("in{i}")).collect();
                    ("ffg", Body::Turbo { outer, inner, perm, inputs })
                }
                _ => continue,
            },
        };
        by_kind.entry(kind).or_default().push(nm.clone());
        doc.insert(Definition { name: nm, comments: comments(rng), body });
    }
    doc
}

const VOCAB: &[&str] = &[
    "code",
    "binary",
    "section",
    "graph",
    "ffg",
    "css",
    "chain",
    "graphstate",
    "turbo",
    "end",
    "half",
    "edge",
    "factor",
    ":",
    "pauli",
    "xz",
    "gf4",
    "gf4-linear",
    "adjacency",
    "terminated",
    "tailbiting",
    "interleaver",
    "inputs",
    "#",
    "a",
    "b",
    "c",
    "XZZXI",
    "IXZ",
    "10|01",
    "0110",
    "w",
    "w2",
    "0",
    "1",
    "2",
    "3",
    "7",
    "|",
    "99999999999999999999",
    "-1",
    "é",
    "\t",
    "\u{0}",
];

/// Inputs for parser robustness: raw bytes, keyword soup, and damaged
/// copies of `seeds`.
pub fn fuzz_inputs(rng: &mut ChaCha8Rng, seeds: &[&str], count: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let s = match out.len() % 4 {
            0 => {
                let bytes: Vec<u8> = (0..rng.gen_range(0..200)).map(|_| rng.gen()).collect();
                String::from_utf8_lossy(&bytes).into_owned()
            }
            1 => {
                let mut s = String::new();
                for _ in 0..rng.gen_range(0..40) {
                    s.push_str(VOCAB.choose(rng).unwrap());
                    s.push_str([" ", " ", "\n", "\n  ", "\r\n"].choose(rng).unwrap());
                }
                s
            }
            2 => {
                let src = seeds.choose(rng).unwrap();
                let cut = rng.gen_range(0..=src.len());
                let cut = (0..=cut).rev().find(|&c| src.is_char_boundary(c)).unwrap();
                src[..cut].to_string()
            }
            _ => {
                let src = seeds.choose(rng).unwrap();
                let mut lines: Vec<String> = src.lines().map(str::to_string).collect();
                for _ in 0..rng.gen_range(1..4) {
                    if lines.is_empty() {
                        break;
                    }
                    let i = rng.gen_range(0..lines.len());
                    match rng.gen_range(0..4) {
                        0 => {
                            lines.remove(i);
                        }
                        1 => {
                            let l = lines[i].clone();
                            lines.insert(i, l);
                        }
                        2 => {
                            let mut toks: Vec<&str> = lines[i].split(' ').collect();
                            if !toks.is_empty() {
                                let k = rng.gen_range(0..toks.len());
                                toks[k] = VOCAB.choose(rng).unwrap();
                            }
                            lines[i] = toks.join(" ");
                        }
                        _ => lines[i].push_str(VOCAB.choose(rng).unwrap()),
                    }
                }
                lines.join("\n")
            }
        };
        out.push(s);
    }
    out
}
