//! Seeded instance generators.
//!
//! Every generator takes its randomness from a `ChaCha8Rng` seeded with a
//! `u64`, so a seed fully determines the output on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decompose::is_reducible;
use crate::error::{Error, Result};
use crate::isotopy::{self, IsotopyMap};
use crate::perm::Perm;
use crate::predicate::QPredicate;
use crate::superpose::{compose_predicate, superpose, SuperpositionSpec};
use crate::table::{check_order, QTable};
use crate::tuple;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_perm<R: Rng + ?Sized>(order: usize, rng: &mut R) -> Perm {
    let mut images: Vec<u8> = (0..order as u8).collect();
    images.shuffle(rng);
    Perm::from_images(images).expect("shuffle of identity")
}

/// Largest table filled cell by cell; bigger arities are built as
/// superpositions of smaller random pieces.
const BACKTRACK_CELLS: usize = 1024;
const BACKTRACK_STEPS: usize = 200_000;

/// A random `arity`-ary quasigroup of the given order.
///
/// Small tables are filled cell by cell with a randomized backtracking
/// search, restarting when a step budget runs out. Larger ones are random
/// isotopes of `r(p(x_1, .., x_{m-1}), x_m)` with random `p` and `r`, and
/// are therefore reducible.
pub fn random_quasigroup<R: Rng + ?Sized>(order: usize, arity: usize, rng: &mut R) -> Result<QTable> {
    check_order(order)?;
    match arity {
        0 => QTable::new(order, 0, vec![rng.gen_range(0..order) as u8]),
        1 => Ok(QTable::from_perm(&random_perm(order, rng))),
        _ if tuple::volume(order, arity)? <= BACKTRACK_CELLS && order <= 32 => loop {
            if let Some(t) = backtrack_fill(order, arity, rng) {
                return Ok(t);
            }
        },
        _ => {
            let p = random_quasigroup(order, arity - 1, rng)?;
            let r = random_quasigroup(order, 2, rng)?;
            let t = superpose(&SuperpositionSpec {
                outer: r,
                groups: vec![(0..arity - 1).collect(), vec![arity - 1]],
                inners: vec![p, QTable::identity(order)?],
            })?;
            random_isotope(&t, rng)
        }
    }
}

fn backtrack_fill<R: Rng + ?Sized>(order: usize, arity: usize, rng: &mut R) -> Option<QTable> {
    let cells = order.pow(arity as u32);
    let lines = order.pow(arity as u32 - 1);
    // used[p][line] = bitmask of symbols already on that line along p
    let mut used = vec![vec![0u32; lines]; arity];
    let strides: Vec<usize> = (0..arity).map(|p| order.pow((arity - 1 - p) as u32)).collect();
    let line_of = |idx: usize, p: usize| {
        let stride = strides[p];
        (idx / (stride * order)) * stride + idx % stride
    };
    let mut values = vec![0u8; cells];
    let mut choices: Vec<Vec<u8>> = Vec::with_capacity(cells);
    let mut steps = 0usize;
    let mut idx = 0usize;
    let full = if order == 32 { u32::MAX } else { (1u32 << order) - 1 };
    while idx < cells {
        steps += 1;
        if steps > BACKTRACK_STEPS {
            return None;
        }
        if choices.len() == idx {
            let mask = (0..arity).fold(0u32, |m, p| m | used[p][line_of(idx, p)]);
            let mut cand: Vec<u8> = (0..order as u8).filter(|&c| (full & !mask) >> c & 1 == 1).collect();
            cand.shuffle(rng);
            choices.push(cand);
        } else {
            // retreat: release this cell's current symbol
            let c = values[idx];
            for p in 0..arity {
                used[p][line_of(idx, p)] &= !(1 << c);
            }
        }
        match choices[idx].pop() {
            Some(c) => {
                values[idx] = c;
                for p in 0..arity {
                    used[p][line_of(idx, p)] |= 1 << c;
                }
                idx += 1;
            }
            None => {
                choices.pop();
                if idx == 0 {
                    return None;
                }
                idx -= 1;
            }
        }
    }
    let t = QTable::from_values(order, arity, values).ok()?;
    debug_assert!(t.is_valid());
    Some(t)
}

/// Relabels every argument and the output of `table` by random permutations.
pub fn random_isotope<R: Rng + ?Sized>(table: &QTable, rng: &mut R) -> Result<QTable> {
    let pred = QPredicate::from_table(table)?;
    let iso = IsotopyMap { maps: (0..pred.arity()).map(|_| random_perm(table.order(), rng)).collect() };
    Ok(isotopy::apply(&pred, &iso)?.defining_table().clone())
}

/// Draws random quasigroups until one is irreducible.
pub fn random_irreducible<R: Rng + ?Sized>(order: usize, arity: usize, budget: usize, rng: &mut R) -> Result<QTable> {
    for _ in 0..budget {
        let t = random_quasigroup(order, arity, rng)?;
        if !is_reducible(&QPredicate::from_table(&t)?) {
            return Ok(t);
        }
    }
    Err(Error::BudgetExhausted(format!("no irreducible {arity}-ary quasigroup of order {order} in {budget} draws")))
}

/// A planted instance `M⟨z̄⟩ ⟺ outer⟨q^1(z̄_{G_1}), ..⟩`.
#[derive(Clone, Debug)]
pub struct Planted {
    pub predicate: QPredicate,
    pub outer: QPredicate,
    pub groups: Vec<Vec<usize>>,
    pub inners: Vec<QTable>,
}

/// Plants random inner quasigroups on `groups` (a partition of predicate
/// positions) under `outer`, or under a random outer when `None`.
/// Singleton groups get the identity.
pub fn planted<R: Rng + ?Sized>(
    order: usize,
    groups: &[Vec<usize>],
    outer: Option<QPredicate>,
    rng: &mut R,
) -> Result<Planted> {
    let outer = match outer {
        Some(o) => o,
        None => QPredicate::from_table(&random_quasigroup(order, groups.len().saturating_sub(1), rng)?)?,
    };
    let inners = groups
        .iter()
        .map(|g| if g.len() == 1 { QTable::identity(order) } else { random_quasigroup(order, g.len(), rng) })
        .collect::<Result<Vec<_>>>()?;
    let predicate = compose_predicate(&outer, groups, &inners)?;
    Ok(Planted { predicate, outer, groups: groups.to_vec(), inners })
}

/// What [`generate`] should build.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenKind {
    /// `x_1 + .. + x_m mod s`.
    Group,
    RandomIsotopeOfGroup,
    /// Groups partition the predicate positions `0..=arity`; `arity` is
    /// ignored. With `irreducible_outer`, the outer is found by
    /// random search.
    PlantedSuperposition {
        groups: Vec<Vec<usize>>,
        irreducible_outer: bool,
    },
    RandomSearchIrreducible {
        budget: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub order: usize,
    /// Table arity (predicate arity minus one).
    pub arity: usize,
    pub seed: u64,
}

pub const DEFAULT_SEARCH_BUDGET: usize = 10_000;

pub fn generate(spec: &GenSpec) -> Result<QTable> {
    let mut rng = rng_from_seed(spec.seed);
    let table = match &spec.kind {
        GenKind::Group => QTable::cyclic_sum(spec.order, spec.arity)?,
        GenKind::RandomIsotopeOfGroup => random_isotope(&QTable::cyclic_sum(spec.order, spec.arity)?, &mut rng)?,
        GenKind::PlantedSuperposition { groups, irreducible_outer } => {
            let outer = if *irreducible_outer {
                let t = random_irreducible(spec.order, groups.len() - 1, DEFAULT_SEARCH_BUDGET, &mut rng)?;
                Some(QPredicate::from_table(&t)?)
            } else {
                None
            };
            planted(spec.order, groups, outer, &mut rng)?.predicate.defining_table().clone()
        }
        GenKind::RandomSearchIrreducible { budget } => random_irreducible(spec.order, spec.arity, *budget, &mut rng)?,
    };
    table.validate().map_err(|v| Error::Consistency(format!("generator produced an invalid table: {v}")))?;
    Ok(table)
}
