mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satexplain_core::sat::grow_mss;
use satexplain_core::{
    enumerate_mcs, enumerate_mus, explain_instance, minimal_hitting_sets, Cnf, EnumerationBudget,
    Instance, Lit, PartialMaxSatInstance, Polarity, SoftSubset, Var,
};

use common::*;

/// Random hard clauses over `nv` variables (kept satisfiable) and one soft
/// literal per variable.
fn random_instance(rng: &mut ChaCha8Rng) -> (PartialMaxSatInstance, usize) {
    let nv = rng.gen_range(2..=10usize);
    loop {
        let mut hard = Cnf::with_num_vars(nv as u32);
        for _ in 0..rng.gen_range(0..=2 * nv) {
            let k = rng.gen_range(1..=3);
            hard.add((0..k).map(|_| Lit::new(Var::new(rng.gen_range(1..=nv as u32)), rng.gen())));
        }
        let sat_any = (0..1u64 << nv).any(|m| {
            let x = bits(m, nv);
            hard.is_satisfied_by(|v| x[v.index() as usize - 1])
        });
        if !sat_any {
            continue;
        }
        let soft = (1..=nv as u32)
            .map(|v| Lit::new(Var::new(v), rng.gen()))
            .collect();
        return (PartialMaxSatInstance::new(hard, soft), nv);
    }
}

/// Soft masks satisfiable together with the hard clauses.
fn satisfiable_masks(p: &PartialMaxSatInstance, nv: usize) -> Vec<u64> {
    (0..1u64 << nv)
        .map(|m| bits(m, nv))
        .filter(|x| p.hard().is_satisfied_by(|v| x[v.index() as usize - 1]))
        .map(|x| {
            p.soft()
                .iter()
                .enumerate()
                .filter(|(_, l)| l.eval(x[l.var().index() as usize - 1]))
                .map(|(i, _)| 1u64 << i)
                .sum()
        })
        .collect()
}

fn minimal_masks(ok: impl Fn(u64) -> bool, n: usize) -> std::collections::BTreeSet<SoftSubset> {
    let all: Vec<u64> = (0..1u64 << n).filter(|&m| ok(m)).collect();
    all.iter()
        .copied()
        .filter(|&s| !all.iter().any(|&t| t != s && t & s == t))
        .map(|m| SoftSubset::new((0..n).filter(|i| m >> i & 1 == 1)))
        .collect()
}

#[test]
fn random_instances_match_subset_lattice() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let b = EnumerationBudget::unlimited();
    for _ in 0..150 {
        let (p, nv) = random_instance(&mut rng);
        let n = p.soft().len();
        let sat = satisfiable_masks(&p, nv);
        let full = (1u64 << n) - 1;
        let is_sat = |t: u64| sat.iter().any(|&m| m & t == t);
        let want_mcs = minimal_masks(|s| is_sat(full & !s), n);
        let want_mus = minimal_masks(|s| !is_sat(s), n);
        let mcs = enumerate_mcs(&p, &b).unwrap();
        assert!(mcs.complete);
        let got_mcs = as_set(&mcs.subsets);
        // A satisfiable instance has the empty set as its only correction.
        if want_mcs.iter().any(|s| s.is_empty()) {
            assert!(got_mcs.is_empty());
        } else {
            assert_eq!(
                mcs.subsets.len(),
                want_mcs.len(),
                "duplicates in MCS output"
            );
            assert_eq!(got_mcs, want_mcs);
        }
        let mus = enumerate_mus(&p, &b).unwrap();
        assert_eq!(as_set(&mus.subsets), want_mus);
    }
}

#[test]
fn grown_sets_are_maximal() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let (p, nv) = random_instance(&mut rng);
        let n = p.soft().len();
        let sat = satisfiable_masks(&p, nv);
        let is_sat = |t: u64| sat.iter().any(|&m| m & t == t);
        let seed = SoftSubset::new([]);
        let mss = grow_mss(&seed, &p).unwrap();
        let m: u64 = mss.indices().iter().map(|&i| 1u64 << i).sum();
        assert!(is_sat(m));
        for i in 0..n {
            if m >> i & 1 == 0 {
                assert!(!is_sat(m | 1 << i));
            }
        }
    }
}

#[test]
fn forest_explanations_match_definitions_and_duality() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let b = EnumerationBudget::unlimited();
    for _ in 0..60 {
        let n = rng.gen_range(2..=7);
        let rf = random_nonconstant_forest(&mut rng, n, 5, 4);
        let x = Instance::new(bits(rng.gen_range(0..1u64 << n), n));
        let pred = rf.predict(&x.values).unwrap();
        let r = explain_instance(&rf, &x, Polarity::for_prediction(pred), &b).unwrap();
        let to_subsets = |s: &satexplain_core::ExplanationSet| -> Vec<SoftSubset> {
            s.explanations
                .iter()
                .map(|e| SoftSubset::new(e.features()))
                .collect()
        };
        let srs = to_subsets(&r.sr);
        let cfs = to_subsets(&r.cf);
        assert_eq!(as_set(&srs), brute_sufficient_reasons(&rf, &x.values));
        assert_eq!(as_set(&cfs), brute_counterfactuals(&rf, &x.values));
        assert_eq!(as_set(&minimal_hitting_sets(&cfs)), as_set(&srs));
        assert_eq!(as_set(&minimal_hitting_sets(&srs)), as_set(&cfs));
        assert_eq!(
            as_set(&minimal_hitting_sets(&cfs)),
            brute_hitting_sets(&cfs, n)
        );
        for e in r.sr.explanations.iter().chain(&r.cf.explanations) {
            assert!(e.items.iter().all(|o| o.value == x.values[o.feature]));
        }
    }
}
