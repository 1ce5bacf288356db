//! Repetition-free superpositions `K(q^1(z̄^1), .., q^k(z̄^k))`.

use crate::error::{Error, Result};
use crate::predicate::QPredicate;
use crate::table::QTable;

/// An outer `k`-ary table applied to `k` inner tables over disjoint groups
/// of argument positions (zero-based) that together cover `0..m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperpositionSpec {
    pub outer: QTable,
    pub groups: Vec<Vec<usize>>,
    pub inners: Vec<QTable>,
}

impl SuperpositionSpec {
    /// Checks group disjointness, coverage and arity compatibility.
    /// Returns the arity of the composed table.
    pub fn check(&self) -> Result<usize> {
        check_groups(&self.groups, &self.inners, self.outer.order())?;
        if self.outer.arity() != self.groups.len() {
            return Err(Error::InvalidSuperposition(format!(
                "outer arity {} but {} groups",
                self.outer.arity(),
                self.groups.len()
            )));
        }
        Ok(self.groups.iter().map(Vec::len).sum())
    }
}

fn check_groups(groups: &[Vec<usize>], inners: &[QTable], order: usize) -> Result<()> {
    if groups.len() != inners.len() {
        return Err(Error::InvalidSuperposition(format!("{} groups but {} inner tables", groups.len(), inners.len())));
    }
    let total: usize = groups.iter().map(Vec::len).sum();
    let mut seen = vec![false; total];
    for (t, (g, q)) in groups.iter().zip(inners).enumerate() {
        if g.is_empty() {
            return Err(Error::InvalidSuperposition(format!("group {} is empty", t + 1)));
        }
        if q.arity() != g.len() {
            return Err(Error::InvalidSuperposition(format!(
                "inner {} has arity {} but its group has {} positions",
                t + 1,
                q.arity(),
                g.len()
            )));
        }
        if q.order() != order {
            return Err(Error::OrderMismatch { expected: order, found: q.order() });
        }
        for &p in g {
            if p >= total || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidSuperposition(format!(
                    "groups {groups:?} are not a partition of 0..{total}"
                )));
            }
        }
    }
    Ok(())
}

fn check_components(outer_valid: bool, inners: &[QTable]) -> Result<()> {
    if !outer_valid {
        return Err(Error::InvalidSuperposition("outer is not a quasigroup".into()));
    }
    for (t, q) in inners.iter().enumerate() {
        q.validate().map_err(|v| Error::InvalidSuperposition(format!("inner {} is not a quasigroup: {v}", t + 1)))?;
    }
    Ok(())
}

/// The table of `x ↦ outer(inner_1(x_{G_1}), .., inner_k(x_{G_k}))`.
pub fn superpose(spec: &SuperpositionSpec) -> Result<QTable> {
    let arity = spec.check()?;
    check_components(spec.outer.is_valid(), &spec.inners)?;
    let order = spec.outer.order();
    let mut outer_args = vec![0u8; spec.groups.len()];
    let mut scratch = Vec::new();
    let table = QTable::from_fn(order, arity, |x| {
        for (slot, (g, q)) in outer_args.iter_mut().zip(spec.groups.iter().zip(&spec.inners)) {
            scratch.clear();
            scratch.extend(g.iter().map(|&p| x[p]));
            *slot = q.get(&scratch);
        }
        spec.outer.get(&outer_args)
    })?;
    table
        .validate()
        .map_err(|v| Error::Consistency(format!("superposition of quasigroups is not a quasigroup: {v}")))?;
    Ok(table)
}

/// The predicate `M⟨z̄⟩ ⟺ outer⟨inner_1(z̄_{G_1}), .., inner_k(z̄_{G_k})⟩`
/// where the groups partition the coordinates of `M`.
pub fn compose_predicate(outer: &QPredicate, groups: &[Vec<usize>], inners: &[QTable]) -> Result<QPredicate> {
    check_groups(groups, inners, outer.order())?;
    if outer.arity() != groups.len() {
        return Err(Error::InvalidSuperposition(format!(
            "outer predicate arity {} but {} groups",
            outer.arity(),
            groups.len()
        )));
    }
    check_components(true, inners)?;
    let arity: usize = groups.iter().map(Vec::len).sum();
    let mut outer_word = vec![0u8; groups.len()];
    let mut scratch = Vec::new();
    QPredicate::from_membership(outer.order(), arity, |z| {
        for (slot, (g, q)) in outer_word.iter_mut().zip(groups.iter().zip(inners)) {
            scratch.clear();
            scratch.extend(g.iter().map(|&p| z[p]));
            *slot = q.get(&scratch);
        }
        outer.contains(&outer_word)
    })
    .map_err(|e| Error::Consistency(format!("composition of quasigroups is not a quasigroup: {e}")))
}
