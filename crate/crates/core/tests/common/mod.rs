//! Shared instances and brute-force oracles.

#![allow(dead_code)]

use std::collections::HashSet;

use quasigroups::generate::{self, GenKind, GenSpec, Planted};
use quasigroups::{IsotopyMap, Perm, QPredicate, QTable};

/// Groups of the planted instance `K⟨q¹(x₁,y₁,y₂), q²(x₂,y₃), x₃, x₄⟩`
/// over predicate positions `x₁ x₂ x₃ x₄ y₁ y₂ y₃`.
pub fn seven_ary_groups() -> Vec<Vec<usize>> {
    vec![vec![0, 4, 5], vec![1, 6], vec![2], vec![3]]
}

/// An irreducible ternary quasigroup of order 4 from the seeded search.
pub fn irreducible_ternary(seed: u64) -> QPredicate {
    let spec = GenSpec { kind: GenKind::RandomSearchIrreducible { budget: 1000 }, order: 4, arity: 3, seed };
    QPredicate::from_table(&generate::generate(&spec).unwrap()).unwrap()
}

pub fn seven_ary_instance(seed: u64) -> Planted {
    let k = irreducible_ternary(seed);
    let mut rng = generate::rng_from_seed(seed.wrapping_add(1));
    generate::planted(4, &seven_ary_groups(), Some(k), &mut rng).unwrap()
}

pub fn pred(t: &QTable) -> QPredicate {
    QPredicate::from_table(t).unwrap()
}

pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Minimum distance over all pairs of members.
pub fn pairwise_min_distance(p: &QPredicate) -> Option<usize> {
    let members = p.members();
    let mut best = None;
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let d = hamming(&members[i], &members[j]);
            best = Some(best.map_or(d, |b: usize| b.min(d)));
        }
    }
    best
}

/// Every word of length `len` over `0..order`, first coordinate most
/// significant.
pub fn words(order: usize, len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w: Vec<u8>| {
                (0..order as u8).map(move |c| {
                    let mut v = w.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

/// Every isotopy of the given order and predicate arity.
pub fn all_isotopies(order: usize, arity: usize) -> Vec<IsotopyMap> {
    let perms = Perm::all(order);
    let mut out = vec![vec![]];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|maps: Vec<Perm>| {
                perms.iter().map(move |p| {
                    let mut m = maps.clone();
                    m.push(p.clone());
                    m
                })
            })
            .collect();
    }
    out.into_iter().map(|maps| IsotopyMap { maps }).collect()
}

/// Membership of `ρ(P)` computed from the member list of `P`.
pub fn isotope_members(p: &QPredicate, iso: &IsotopyMap) -> HashSet<Vec<u8>> {
    p.members().into_iter().map(|w| w.iter().zip(&iso.maps).map(|(&x, m)| m.apply(x)).collect()).collect()
}

pub fn brute_force_isotopic(p1: &QPredicate, p2: &QPredicate) -> bool {
    let target: HashSet<Vec<u8>> = p2.members().into_iter().collect();
    all_isotopies(p1.order(), p1.arity()).iter().any(|iso| isotope_members(p1, iso) == target)
}

/// Whether the table arguments `group` can be split off: the residual
/// functions `w ↦ f(u, w)` over `u ∈ Σ^group` take exactly `s` values.
pub fn arguments_separate(t: &QTable, group: &[usize]) -> bool {
    let n = t.arity();
    let rest: Vec<usize> = (0..n).filter(|p| !group.contains(p)).collect();
    let mut residuals = HashSet::new();
    for u in words(t.order(), group.len()) {
        let residual: Vec<u8> = words(t.order(), rest.len())
            .iter()
            .map(|w| {
                let mut x = vec![0u8; n];
                for (&p, &v) in group.iter().zip(&u) {
                    x[p] = v;
                }
                for (&p, &v) in rest.iter().zip(w) {
                    x[p] = v;
                }
                t.get(&x)
            })
            .collect();
        residuals.insert(residual);
    }
    residuals.len() == t.order()
}

/// Reducibility from the definition: some set of `2..=n-1` arguments
/// separates. Groups containing the output are covered by their
/// complements.
pub fn brute_force_reducible(t: &QTable) -> bool {
    let n = t.arity();
    (1u32..1 << n).any(|mask| {
        let group: Vec<usize> = (0..n).filter(|p| mask >> p & 1 == 1).collect();
        (2..n).contains(&group.len()) && arguments_separate(t, &group)
    })
}
