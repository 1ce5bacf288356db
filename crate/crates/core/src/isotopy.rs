//! Isotopy of quasigroup predicates: coordinatewise relabeling by
//! permutations of `Σ`.
//!
//! The search is a plain pairwise backtracking search, adequate for
//! order ≤ 4 and predicate arity ≤ 7. There is no canonical-form machinery.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::predicate::{QPredicate, RetractSpec};
use crate::tuple;

/// One permutation per predicate coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IsotopyMap {
    pub maps: Vec<Perm>,
}

impl IsotopyMap {
    pub fn identity(order: usize, arity: usize) -> Self {
        IsotopyMap { maps: vec![Perm::identity(order); arity] }
    }

    pub fn arity(&self) -> usize {
        self.maps.len()
    }

    pub fn inverse(&self) -> Self {
        IsotopyMap { maps: self.maps.iter().map(Perm::inverse).collect() }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn after(&self, other: &IsotopyMap) -> Self {
        IsotopyMap { maps: self.maps.iter().zip(&other.maps).map(|(a, b)| a.after(b)).collect() }
    }
}

impl fmt::Display for IsotopyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.maps {
            writeln!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for IsotopyMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut maps = Vec::new();
        for (i, line) in s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let images = line
                .split_whitespace()
                .map(|t| t.parse::<u8>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
            maps.push(Perm::from_images(images).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?);
        }
        if let Some(m) = maps.iter().find(|m| m.order() != maps[0].order()) {
            return Err(Error::Parse { line: 0, message: format!("mixed orders in witness ({})", m.order()) });
        }
        Ok(IsotopyMap { maps })
    }
}

/// The predicate `R` with `R⟨ρ_1(x_1), .., ρ_N(x_N)⟩ ⟺ P⟨x_1, .., x_N⟩`.
pub fn apply(pred: &QPredicate, iso: &IsotopyMap) -> Result<QPredicate> {
    let arity = pred.arity();
    if iso.arity() != arity {
        return Err(Error::ArityMismatch { expected: arity, found: iso.arity() });
    }
    if let Some(m) = iso.maps.iter().find(|m| m.order() != pred.order()) {
        return Err(Error::OrderMismatch { expected: pred.order(), found: m.order() });
    }
    let inv: Vec<Perm> = iso.maps.iter().map(Perm::inverse).collect();
    let table = pred.defining_table();
    let mut preimage = vec![0u8; arity - 1];
    QPredicate::from_solver(pred.order(), arity, |y| {
        for ((slot, p), &v) in preimage.iter_mut().zip(&inv).zip(y) {
            *slot = p.apply(v);
        }
        iso.maps[arity - 1].apply(table.get(&preimage))
    })
}

fn check_comparable(p1: &QPredicate, p2: &QPredicate) -> Result<()> {
    if p1.order() != p2.order() {
        return Err(Error::OrderMismatch { expected: p1.order(), found: p2.order() });
    }
    if p1.arity() != p2.arity() {
        return Err(Error::ArityMismatch { expected: p1.arity(), found: p2.arity() });
    }
    Ok(())
}

/// Searches for `ρ` with `apply(p1, ρ) = p2`.
///
/// Candidates are explored in a fixed order: the full permutation `ρ_1` in
/// lexicographic order, then the images `ρ_2(0), .., ρ_{N-1}(0)` in
/// increasing order. Those choices force every other image through lines
/// of `p1` passing through `0̄`, so each candidate is either confirmed on
/// all points or discarded. The first witness in that order is returned.
pub fn find_isotopy(p1: &QPredicate, p2: &QPredicate) -> Result<Option<IsotopyMap>> {
    check_comparable(p1, p2)?;
    let s = p1.order();
    let arity = p1.arity();
    if arity == 1 {
        let (a, b) = (p1.defining_table().get(&[]), p2.defining_table().get(&[]));
        return Ok(Perm::all(s).into_iter().find(|p| p.apply(a) == b).map(|p| IsotopyMap { maps: vec![p] }));
    }
    let n = arity - 1;
    let f1 = p1.defining_table();
    let f2 = p2.defining_table();

    // f1 along each axis through 0̄: axis[j][b] = f1(0, .., b @ j, .., 0)
    let axis: Vec<Vec<u8>> = (0..n)
        .map(|j| {
            (0..s as u8)
                .map(|b| {
                    let mut w = vec![0u8; n];
                    w[j] = b;
                    f1.get(&w)
                })
                .collect()
        })
        .collect();

    let mut word = vec![0u8; arity];
    let mut maps: Vec<Vec<u8>> = vec![vec![0u8; s]; arity];
    for rho1 in Perm::all(s) {
        let found = tuple::find_word(s, n - 1, |zeros| {
            // zeros[j-1] = ρ_j(0) for j = 1..n-1
            maps[0].copy_from_slice(rho1.images());
            // ρ_N(f1(a, 0̄)) = f2(ρ_1(a), ρ_2(0), ..)
            let mut args = vec![0u8; n];
            args[1..].copy_from_slice(zeros);
            for a in 0..s as u8 {
                args[0] = rho1.apply(a);
                maps[n][axis[0][a as usize] as usize] = f2.get(&args);
            }
            // ρ_j(b) completes f2(ρ_1(0), .., ? @ j, ..) = ρ_N(f1(0, .., b @ j, ..))
            for j in 1..n {
                for b in 0..s as u8 {
                    word[0] = rho1.apply(0);
                    word[1..n].copy_from_slice(zeros);
                    word[n] = maps[n][axis[j][b as usize] as usize];
                    maps[j][b as usize] = p2.solve(&word, j);
                }
            }
            let perms: Vec<Perm> = match maps.iter().map(|m| Perm::from_images(m.clone())).collect() {
                Ok(p) => p,
                Err(_) => return None,
            };
            let mut image = vec![0u8; n];
            let ok = tuple::find_word(s, n, |x| {
                for ((slot, p), &v) in image.iter_mut().zip(&perms).zip(x) {
                    *slot = p.apply(v);
                }
                (perms[n].apply(f1.get(x)) != f2.get(&image)).then_some(())
            })
            .is_none();
            ok.then_some(IsotopyMap { maps: perms })
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Result of comparing every retract `K_ȳ⟨x̄⟩ ⟺ M⟨x̄, ȳ⟩` against `K_0̄`.
#[derive(Clone, Debug)]
pub struct FamilyIsotopyReport {
    pub base: QPredicate,
    /// `(ȳ, witness from K_0̄ to K_ȳ)` for every `ȳ` in lexicographic order.
    pub entries: Vec<(Vec<u8>, Option<IsotopyMap>)>,
}

impl FamilyIsotopyReport {
    pub fn all_isotopic(&self) -> bool {
        self.entries.iter().all(|(_, w)| w.is_some())
    }
}

/// Checks that every retract obtained by fixing coordinates `k..N` of `m`
/// is isotopic to the one fixing them to `0̄`.
pub fn retract_family_isotopy_check(m: &QPredicate, k: usize) -> Result<FamilyIsotopyReport> {
    let arity = m.arity();
    if k < 2 || k >= arity {
        return Err(Error::Precondition(format!("need 2 ≤ k < {arity}, got k = {k}")));
    }
    let base = m.retract(&RetractSpec::prefix(arity, k))?;
    let kept: Vec<usize> = (0..k).collect();
    let fixings = tuple::all_words(m.order(), arity - k);
    let entries = fixings
        .into_par_iter()
        .map(|y| {
            let spec = RetractSpec::new(arity, kept.clone(), &y)?;
            let r = m.retract(&spec)?;
            let w = find_isotopy(&base, &r)?;
            Ok((y, w))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FamilyIsotopyReport { base, entries })
}
