mod common;

use std::collections::HashMap;

use common::{brute_marginals, random_self_orthogonal, random_tree_ffg, rng, G2};
use proptest::prelude::*;
use rand::Rng;
use stabffg::inference::{
    decode_ml, simulate, sum_product, syndrome, BruteForceDecoder, ChannelModel, DecodeMode, FactorWeights, Schedule,
};
use stabffg::{FfgBuilder, GroupCode, SympVector};

const STEANE: [&str; 6] = ["IIIXXXX", "IXXIIXX", "XIXIXIX", "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ"];

fn steane() -> GroupCode<G2> {
    GroupCode::from_pauli_rows(7, &STEANE).unwrap()
}

fn random_error(r: &mut impl Rng, n: usize) -> SympVector<G2> {
    let pairs: Vec<(G2, G2)> = (0..n).map(|_| (G2::new(r.gen_range(0..2)), G2::new(r.gen_range(0..2)))).collect();
    SympVector::from_pairs(&pairs)
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn exact_schedule_matches_enumeration_on_trees() {
    let mut r = rng(11);
    for _ in 0..200 {
        let g = random_tree_ffg(&mut r, 5);
        let mut fw = FactorWeights::<f64>::indicator(&g).unwrap();
        let mut weights = Vec::new();
        for (fi, f) in g.factors().iter().enumerate() {
            let w: Vec<f64> = f.code.codewords().map(|_| r.gen_range(0.1..1.0)).collect();
            let table: HashMap<Vec<(G2, G2)>, f64> =
                f.code.codewords().map(|c| c.pairs()).zip(w.iter().copied()).collect();
            fw.set_factor_weights(fi, |c| table[&c.pairs()]).unwrap();
            weights.push(w);
        }
        let mut priors = Vec::new();
        for h in 0..g.half_edges().len() {
            let p = [r.gen_range(0.1..1.0), r.gen_range(0.1..1.0), r.gen_range(0.1..1.0), r.gen_range(0.1..1.0)];
            fw.set_prior(h, p).unwrap();
            priors.push(p);
        }
        let expected = brute_marginals(&g, &weights, &priors);
        let m = sum_product(&fw, Schedule::ExactTree).unwrap();
        for (name, table) in m.half_edges.iter().chain(&m.edges) {
            assert!(close(table, &expected[name], 1e-12), "{name}: {table:?} vs {:?}", expected[name]);
            assert!((table.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn flooding_on_a_cycle_reports_deviation() {
    // three factors joined in a triangle of edges
    let c = GroupCode::<G2>::from_pauli_rows(3, &["XXX", "ZZI", "IZZ"]).unwrap();
    let mut b = FfgBuilder::<G2>::new();
    b.half_edge("t1").half_edge("t2").half_edge("t3");
    b.edge("a", 1).edge("b", 1).edge("c", 1);
    b.factor("f1", c.clone(), &["t1", "a", "c"]);
    b.factor("f2", c.clone(), &["t2", "a", "b"]);
    b.factor("f3", c, &["t3", "b", "c"]);
    let g = b.build();
    let mut fw = FactorWeights::<f64>::indicator(&g).unwrap();
    let priors = [[0.7, 0.1, 0.1, 0.1], [0.4, 0.3, 0.2, 0.1], [0.25, 0.25, 0.4, 0.1]];
    for (h, p) in priors.iter().enumerate() {
        fw.set_prior(h, *p).unwrap();
    }
    assert!(sum_product(&fw, Schedule::ExactTree).is_err());
    let m = sum_product(&fw, Schedule::Flooding { max_iters: 200, damping: 0.0, tol: 1e-12 }).unwrap();
    let weights: Vec<Vec<f64>> = g.factors().iter().map(|f| vec![1.0; f.code.codewords().count()]).collect();
    let exact = brute_marginals(&g, &weights, &priors);
    let deviation =
        m.half_edges.iter().flat_map(|(n, t)| t.iter().zip(&exact[n]).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
    eprintln!("flooding on a 3-cycle: {:?}, max marginal deviation {deviation:.3e}", m.convergence);
    assert!(m.convergence.iterations <= 200);
    assert_eq!(m.convergence.converged, m.convergence.max_delta <= 1e-12);
    for (_, t) in &m.half_edges {
        assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ml_error_satisfies_syndrome(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let c = random_self_orthogonal(&mut r, n, false);
        let eps = r.gen_range(0.0..0.7);
        let ch = ChannelModel::depolarizing(n, eps).unwrap();
        let e = random_error(&mut r, n);
        let s = syndrome(&c, &e).unwrap();
        let ehat = decode_ml(&c, &s, &ch, DecodeMode::MostLikelyError).unwrap();
        prop_assert_eq!(syndrome(&c, &ehat).unwrap(), s.clone());
        let coset = decode_ml(&c, &s, &ch, DecodeMode::MostLikelyCoset).unwrap();
        prop_assert_eq!(syndrome(&c, &coset).unwrap(), s);
    }

    #[test]
    fn syndrome_is_linear(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let c = random_self_orthogonal(&mut r, n, false);
        let (a, b) = (random_error(&mut r, n), random_error(&mut r, n));
        let sum: Vec<G2> = syndrome(&c, &a).unwrap().0.iter().zip(&syndrome(&c, &b).unwrap().0).map(|(x, y)| *x + *y).collect();
        prop_assert_eq!(syndrome(&c, &a.add(&b).unwrap()).unwrap().0, sum);
    }

    #[test]
    fn coset_decoding_depends_only_on_the_coset(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let c = random_self_orthogonal(&mut r, n, false);
        let ch = ChannelModel::depolarizing(n, r.gen_range(0.0..0.5)).unwrap();
        let dec = BruteForceDecoder::new(&c, ch, DecodeMode::MostLikelyCoset, 10).unwrap();
        let e = random_error(&mut r, n);
        let words: Vec<_> = c.codewords().collect();
        let shifted = e.add(&words[r.gen_range(0..words.len())]).unwrap();
        let ok = |e: &SympVector<G2>| c.contains(&dec.decode(&syndrome(&c, e).unwrap()).unwrap().add(e).unwrap());
        prop_assert_eq!(ok(&e), ok(&shifted));
    }
}

/// Failure probability of an optimal coset decoder on the Steane code,
/// computed from scratch: for every syndrome, sum the probability mass
/// outside the heaviest coset of C.
fn steane_optimal_failure(eps: f64) -> f64 {
    let gens: Vec<(u8, u8)> = STEANE
        .iter()
        .map(|s| {
            s.chars().enumerate().fold((0u8, 0u8), |(x, z), (i, ch)| match ch {
                'X' => (x | 1 << i, z),
                'Z' => (x, z | 1 << i),
                _ => (x, z),
            })
        })
        .collect();
    let mut group = vec![(0u8, 0u8)];
    for &(gx, gz) in &gens {
        let more: Vec<(u8, u8)> = group.iter().map(|&(x, z)| (x ^ gx, z ^ gz)).collect();
        group.extend(more);
    }
    let prob =
        |x: u8, z: u8| -> f64 { (0..7).map(|i| if (x | z) >> i & 1 == 1 { eps / 3.0 } else { 1.0 - eps }).product() };
    let mut mass: HashMap<(u8, (u8, u8)), f64> = HashMap::new();
    for x in 0..128u8 {
        for z in 0..128u8 {
            let s = gens.iter().enumerate().fold(0u8, |acc, (j, &(gx, gz))| {
                acc | ((((x & gz).count_ones() + (z & gx).count_ones()) % 2) as u8) << j
            });
            let label = group.iter().map(|&(gx, gz)| (x ^ gx, z ^ gz)).min().unwrap();
            *mass.entry((s, label)).or_default() += prob(x, z);
        }
    }
    let mut best: HashMap<u8, f64> = HashMap::new();
    for ((s, _), m) in &mass {
        let b = best.entry(*s).or_default();
        *b = b.max(*m);
    }
    1.0 - best.values().sum::<f64>()
}

#[test]
fn steane_exact_failure_probability() {
    let oracle = steane_optimal_failure(0.01);
    // frozen from the enumeration above
    assert!((oracle - 1.578_207e-3).abs() < 1e-9, "{oracle:.9e}");
    let c = steane();
    for mode in [DecodeMode::MostLikelyCoset, DecodeMode::MostLikelyError] {
        let ch = ChannelModel::depolarizing(7, 0.01).unwrap();
        let dec = BruteForceDecoder::new(&c, ch.clone(), mode, 10).unwrap();
        let mut fail = 0.0;
        for m in 0u32..1 << 14 {
            let pairs: Vec<(G2, G2)> =
                (0..7).map(|i| (G2::new((m >> i & 1) as u64), G2::new((m >> (7 + i) & 1) as u64))).collect();
            let e = SympVector::from_pairs(&pairs);
            let ehat = dec.decode(&syndrome(&c, &e).unwrap()).unwrap();
            if !c.contains(&e.add(&ehat).unwrap()) {
                fail += ch.prob(&e);
            }
        }
        assert!((fail - oracle).abs() < 1e-12, "{mode:?}: {fail:e} vs {oracle:e}");
    }
}

#[test]
fn logical_rate_grows_with_noise() {
    let c = steane();
    let mut prev: Option<(f64, f64)> = None;
    for eps in [0.001, 0.01, 0.05, 0.1] {
        let ch = ChannelModel::depolarizing(7, eps).unwrap();
        let res = simulate(&c, &ch, 100_000, 2024, DecodeMode::MostLikelyCoset, 10).unwrap();
        if let Some((rate, hw)) = prev {
            assert!(res.rate - res.ci_halfwidth > rate - hw, "eps {eps}: {res:?}");
            assert!(res.rate >= rate);
        }
        prev = Some((res.rate, res.ci_halfwidth));
    }
}
