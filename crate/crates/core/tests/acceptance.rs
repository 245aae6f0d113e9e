mod common;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{
    brute_marginals, codeword_set, enumerate_dual, fuzz_inputs, join_extract, random_code, random_ffg,
    random_self_orthogonal, random_tree_ffg, rng, G2, G3,
};
use rand::Rng;
use stabffg::constructions::{
    conv_chain, conv_section_from_gf4, graph_edge_code, graph_state_code, graph_state_ffg, Boundary, GraphSpec,
    TrellisSection,
};
use stabffg::dsl::{parse, serialize, CORPUS};
use stabffg::ffg::{certify_prop1, dualize, dualize_general, extract_global_code, Verdict};
use stabffg::inference::{
    decode_ml, simulate, sum_product, syndrome, ChannelModel, DecodeMode, FactorWeights, Schedule,
};
use stabffg::symplectic::{css, gf4_rank, is_gf4_linear, min_coset_weight, Gf4Word};
use stabffg::{FMatrix, Gf4, GroupCode, SympVector};

type Outcome = Result<String, String>;
type Criterion = (u8, &'static str, Option<Duration>, fn() -> Outcome);

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn gf4_rows(rows: &[&str]) -> Vec<Gf4Word> {
    rows.iter().map(|r| Gf4Word(r.split_whitespace().map(|t| Gf4::from_token(t).unwrap()).collect())).collect()
}

fn xz_code(n: usize, rows: &[&str]) -> GroupCode<G2> {
    let vs: Vec<SympVector<G2>> = rows
        .iter()
        .map(|r| {
            let (x, z) = r.split_once('|').unwrap();
            let bits = |s: &str| s.chars().map(|c| G2::new(u64::from(c == '1'))).collect::<Vec<_>>();
            SympVector::new(bits(x), bits(z)).unwrap()
        })
        .collect();
    GroupCode::from_vectors(n, &vs).unwrap()
}

/// Minimum weight over `C⊥ ∖ C` by scanning every vector of the ambient space.
fn scan_min_coset_weight(c: &GroupCode<G2>) -> usize {
    let n = c.n();
    let gens = c.basis_vectors();
    let mut best = usize::MAX;
    for m in 1u64..1 << (2 * n) {
        let v: Vec<G2> = (0..2 * n).map(|i| G2::new(m >> i & 1)).collect();
        let w = SympVector::from_block(&v).unwrap();
        if gens.iter().all(|g| stabffg::symplectic::symp_inner(g, &w).unwrap().get() == 0) && !c.contains(&w) {
            best = best.min(w.weight());
        }
    }
    best
}

fn simplex() -> FMatrix<G2> {
    FMatrix::from_u32_rows(&[&[0, 0, 0, 1, 1, 1, 1], &[0, 1, 1, 0, 0, 1, 1], &[1, 0, 1, 0, 1, 0, 1]])
}

fn steane_css() -> Outcome {
    let c = css(&simplex(), &simplex()).map_err(|e| e.to_string())?;
    check(c.rank() == 6 && c.n() == 7, format!("rank {} n {}", c.rank(), c.n()))?;
    check(c.is_self_orthogonal(), "not self-orthogonal")?;
    let d = c.dual();
    check(d.rank() == 8, format!("dual rank {}", d.rank()))?;
    check(d.same_code(&enumerate_dual(&c)), "dual differs from enumeration")?;
    let w = min_coset_weight(&c, 24).map_err(|e| e.to_string())?.weight;
    let scan = scan_min_coset_weight(&c);
    check(w == 3 && scan == 3, format!("min coset weight {w}, scan {scan}"))?;
    Ok("rank 6, n 7, dual rank 8 = enumerated dual, distance 3".into())
}

fn five_qubit() -> Outcome {
    let text = CORPUS.iter().find(|(n, _)| *n == "fivequbit.sfg").unwrap().1;
    let doc = parse(text).map_err(|e| e.to_string())?;
    let c = doc.code("fivequbit").map_err(|e| e.to_string())?;
    check(c.rank() == 4, format!("rank {}", c.rank()))?;
    check(is_gf4_linear(&c), "not GF(4)-linear")?;
    check(gf4_rank(&c) == Some(2), format!("GF(4) rank {:?}", gf4_rank(&c)))?;
    let printed = GroupCode::from_gf4_rows(5, &gf4_rows(&["w w2 w2 w 0", "0 w w2 w2 w"]), true).unwrap();
    check(printed.same_code(&c), "two-row linear span differs")?;
    let pauli = GroupCode::from_pauli_rows(5, &["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]).unwrap();
    check(pauli.same_code(&c), "Pauli rows differ")?;
    check(c.is_self_orthogonal(), "not self-orthogonal")?;
    let w = min_coset_weight(&c, 24).map_err(|e| e.to_string())?.weight;
    let scan = scan_min_coset_weight(&c);
    check(w == 3 && scan == 3, format!("min coset weight {w}, scan {scan}"))?;
    Ok("rank 4, GF(4) rank 2, self-orthogonal, distance 3".into())
}

fn duality() -> Outcome {
    let mut r = rng(3);
    for i in 0..500 {
        let g = random_ffg::<G2>(&mut r, 4, 3, 12, random_code);
        let lhs = extract_global_code(&dualize(&g).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let rhs = extract_global_code(&g).map_err(|e| e.to_string())?.dual();
        check(lhs.generators().row_space_equal(rhs.generators()).unwrap(), format!("binary case {i}"))?;
    }
    for i in 0..50 {
        let g = random_ffg::<G3>(&mut r, 2, 3, 6, random_code);
        let lhs = extract_global_code(&dualize_general(&g).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let rhs = extract_global_code(&g).map_err(|e| e.to_string())?.dual();
        check(lhs.generators().row_space_equal(rhs.generators()).unwrap(), format!("ternary case {i}"))?;
    }
    Ok("500 binary and 50 ternary random graphs, no mismatch".into())
}

fn local_to_global() -> Outcome {
    let mut r = rng(4);
    for self_dual in [false, true] {
        for i in 0..500 {
            let g = random_ffg::<G2>(&mut r, 4, 3, 12, |r, n| random_self_orthogonal(r, n, self_dual));
            let c = extract_global_code(&g).map_err(|e| e.to_string())?;
            check(c.is_self_orthogonal(), format!("case {i}: global code not self-orthogonal"))?;
            if self_dual {
                check(c.is_self_dual(), format!("case {i}: global code not self-dual"))?;
            }
        }
    }
    Ok("500 self-orthogonal and 500 self-dual assemblies".into())
}

fn convolutional() -> Outcome {
    let ex1 = conv_section_from_gf4(&gf4_rows(&["0 1 1 1 1", "1 1 w w2 0"]), 1, 3).map_err(|e| e.to_string())?;
    let ex2 = conv_section_from_gf4(&gf4_rows(&["0 0 1 1 1 0 1", "0 1 1 0 0 1 1", "1 1 1 1 0 0 0"]), 2, 3)
        .map_err(|e| e.to_string())?;
    let common = conv_section_from_gf4(&gf4_rows(&["0 0 1 1 1 0 1", "0 1 1 0 0 1 0", "1 0 1 1 0 0 0"]), 2, 3)
        .map_err(|e| e.to_string())?;
    check(ex1.code().is_self_orthogonal(), "first section not self-orthogonal")?;
    check(ex2.code().is_self_orthogonal(), "second section not self-orthogonal")?;
    check(!common.code().is_self_orthogonal(), "shift-register section is self-orthogonal")?;
    let sections: [(&str, &TrellisSection<G2>); 2] = [("mu=1", &ex1), ("mu=2", &ex2)];
    let mut count = 0;
    for (label, sec) in sections {
        for len in 3..=5 {
            for b in [Boundary::Terminated, Boundary::TailBiting] {
                let g = conv_chain(sec, len, b).map_err(|e| e.to_string())?;
                let c = extract_global_code(&g).map_err(|e| e.to_string())?;
                check(c.is_self_orthogonal(), format!("{label} len {len} {b:?} not self-orthogonal"))?;
                check(codeword_set(&c) == join_extract(&g), format!("{label} len {len} {b:?} differs from join"))?;
                count += 1;
            }
        }
    }
    Ok(format!("both sections self-orthogonal, alternative is not; {count} chains equal the join"))
}

fn turbo_section() -> Outcome {
    let c = xz_code(5, &["10111|00000", "01011|00000", "00000|10100", "00000|01110", "00000|00011"]);
    check(c.size() == Some(32), format!("size {:?}", c.size()))?;
    check(c.is_self_dual(), "not self-dual")?;
    check(!is_gf4_linear(&c), "GF(4)-linear")?;
    Ok("32 codewords, self-dual, not GF(4)-linear".into())
}

fn graph_states() -> Outcome {
    let g = GraphSpec::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 4)])
        .map_err(|e| e.to_string())?;
    let printed = xz_code(5, &["10000|01111", "01000|10111", "00100|11001", "00010|11000", "00001|11100"]);
    check(graph_state_code(&g).same_code(&printed), "[I|A] differs")?;
    let ffg = graph_state_ffg(&g);
    let c1 = xz_code(5, &["10000|01111", "01000|10000", "00100|10000", "00010|10000", "00001|10000"]);
    let v1 = ffg.factor("v1").ok_or("no vertex factor")?;
    check(v1.code.same_code(&c1), "vertex-1 code differs")?;
    let edge = xz_code(2, &["10|01", "01|10"]);
    check(graph_edge_code().same_code(&edge), "edge code differs")?;
    check(ffg.factor("e1_2").ok_or("no edge factor")?.code.same_code(&edge), "edge factor differs")?;
    check(extract_global_code(&ffg).map_err(|e| e.to_string())?.same_code(&printed), "extraction differs")?;
    check(certify_prop1(&ffg).map_err(|e| e.to_string())?.verdict == Verdict::SelfDual, "certificate not SelfDual")?;
    let mut r = rng(7);
    for i in 0..100 {
        let n = r.gen_range(1..=6);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if r.gen_bool(0.5) {
                    edges.push((a, b));
                }
            }
        }
        let g = GraphSpec::new(n, &edges).unwrap();
        let c = extract_global_code(&graph_state_ffg(&g)).map_err(|e| e.to_string())?;
        check(c.same_code(&graph_state_code(&g)), format!("random graph {i}"))?;
    }
    Ok("printed codes match; extraction = [I|A] on the example and 100 random graphs".into())
}

fn inference() -> Outcome {
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let g = random_tree_ffg(&mut r, 5);
        let mut fw = FactorWeights::<f64>::indicator(&g).map_err(|e| e.to_string())?;
        let mut weights = Vec::new();
        for (fi, f) in g.factors().iter().enumerate() {
            let w: Vec<f64> = f.code.codewords().map(|_| r.gen_range(0.1..1.0)).collect();
            let words: Vec<SympVector<G2>> = f.code.codewords().collect();
            fw.set_factor_weights(fi, |c| w[words.iter().position(|x| x == c).unwrap()]).unwrap();
            weights.push(w);
        }
        let mut priors = Vec::new();
        for h in 0..g.half_edges().len() {
            let p = [r.gen_range(0.1..1.0), r.gen_range(0.1..1.0), r.gen_range(0.1..1.0), r.gen_range(0.1..1.0)];
            fw.set_prior(h, p).unwrap();
            priors.push(p);
        }
        let exact = brute_marginals(&g, &weights, &priors);
        let m = sum_product(&fw, Schedule::ExactTree).map_err(|e| e.to_string())?;
        for (name, t) in m.half_edges.iter().chain(&m.edges) {
            for (a, b) in t.iter().zip(&exact[name]) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    check(worst <= 1e-12, format!("tree marginals deviate by {worst:e}"))?;

    for i in 0..500 {
        let n = r.gen_range(1..=6);
        let c = random_self_orthogonal(&mut r, n, false);
        let ch = ChannelModel::depolarizing(n, r.gen_range(0.0..0.7)).unwrap();
        let pairs: Vec<(G2, G2)> = (0..n).map(|_| (G2::new(r.gen_range(0..2)), G2::new(r.gen_range(0..2)))).collect();
        let s = syndrome(&c, &SympVector::from_pairs(&pairs)).unwrap();
        let ehat = decode_ml(&c, &s, &ch, DecodeMode::MostLikelyError).map_err(|e| e.to_string())?;
        check(syndrome(&c, &ehat).unwrap() == s, format!("decoded error {i} misses its syndrome"))?;
    }

    let steane = css(&simplex(), &simplex()).unwrap();
    let eps = 0.01;
    let ch = ChannelModel::depolarizing(7, eps).unwrap();
    let mut corrected = 0;
    for q in 0..7 {
        for (x, z) in [(1, 0), (0, 1), (1, 1)] {
            let mut pairs = vec![(G2::new(0), G2::new(0)); 7];
            pairs[q] = (G2::new(x), G2::new(z));
            let e = SympVector::from_pairs(&pairs);
            let s = syndrome(&steane, &e).unwrap();
            for mode in [DecodeMode::MostLikelyError, DecodeMode::MostLikelyCoset] {
                let ehat = decode_ml(&steane, &s, &ch, mode).map_err(|e| e.to_string())?;
                check(steane.contains(&ehat.add(&e).unwrap()), format!("weight-1 error on qubit {q} not corrected"))?;
            }
            corrected += 1;
        }
    }
    let res = simulate(&steane, &ch, 100_000, 1, DecodeMode::MostLikelyCoset, 10).map_err(|e| e.to_string())?;
    let bound = 10.0 * eps * eps;
    let summary = format!(
        "trees within {worst:.1e}, {corrected}/21 weight-1 errors corrected, logical rate {:.3e} ± {:.1e} vs bound {bound:.1e}",
        res.rate, res.ci_halfwidth
    );
    check(res.rate < bound, summary.clone())?;
    Ok(summary)
}

fn dsl() -> Outcome {
    for (name, text) in CORPUS {
        let doc = parse(text).map_err(|e| format!("{name}: {e}"))?;
        check(serialize(&doc) == *text, format!("{name} does not round-trip"))?;
    }
    let seeds: Vec<&str> = CORPUS.iter().map(|(_, t)| *t).collect();
    let inputs = fuzz_inputs(&mut rng(9), &seeds, 10_000);
    let mut diagnostics = 0;
    let mut accepted = 0;
    for (i, input) in inputs.iter().enumerate() {
        match catch_unwind(|| parse(input)) {
            Err(_) => return Err(format!("parser panicked on fuzz input {i}")),
            Ok(Ok(_)) => accepted += 1,
            Ok(Err(d)) => {
                check(d.line >= 1 && d.column >= 1, format!("diagnostic without position: {d}"))?;
                diagnostics += 1;
            }
        }
    }
    Ok(format!(
        "{} corpus files byte-identical; 10000 fuzz inputs: {diagnostics} diagnostics, {} accepted, no panics",
        CORPUS.len(),
        accepted
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 9] = [
        (1, "Steane CSS code", Some(Duration::from_secs(1)), steane_css),
        (2, "five-qubit code", Some(Duration::from_secs(1)), five_qubit),
        (3, "dual factor graphs", Some(Duration::from_secs(60)), duality),
        (4, "local-to-global self-orthogonality", None, local_to_global),
        (5, "convolutional sections and chains", None, convolutional),
        (6, "turbo inner section", None, turbo_section),
        (7, "graph states", Some(Duration::from_secs(30)), graph_states),
        (8, "inference soundness", Some(Duration::from_secs(120)), inference),
        (9, "text format", None, dsl),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (id, title, limit, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(msg), Some(l)) if elapsed > l => Err(format!("{msg}; took {elapsed:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        let (status, msg) = match outcome {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed.push(id);
                ("FAIL", m)
            }
        };
        writeln!(out, "criterion {id} {status} [{elapsed:.2?}] {title}: {msg}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
