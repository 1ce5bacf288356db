//! The graph of a quasigroup as an `(n+1)`-ary relation.
//!
//! `q⟨x_1, .., x_n, x_{n+1}⟩` holds iff `q(x_1, .., x_n) = x_{n+1}`. The
//! relation is symmetric in its coordinates: fixing any `n` of them
//! determines the remaining one. Viewed as a subset of `Σ^{n+1}` it is a
//! distance-2 MDS code.

use std::fmt;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::table::QTable;
use crate::tuple;

/// Relations with more tuples than this are answered from the defining
/// table instead of a bitset.
pub const BITSET_LIMIT: usize = 1 << 28;

#[derive(Clone)]
enum Membership {
    Bits(BitSet),
    Lazy,
}

/// A quasigroup predicate of arity `n + 1` over `Σ = {0, .., s-1}`.
///
/// Stored canonically as the table of its last coordinate as a function of
/// the others, plus a membership bitset when small enough. Two predicates
/// are equal iff they have the same members.
#[derive(Clone)]
pub struct QPredicate {
    table: QTable,
    membership: Membership,
}

impl QPredicate {
    /// The graph of a valid table: the output becomes the last coordinate.
    pub fn from_table(table: &QTable) -> Result<Self> {
        table.validate().map_err(Error::NotQuasigroup)?;
        Ok(Self::from_valid_table(table.clone()))
    }

    pub(crate) fn from_valid_table(table: QTable) -> Self {
        let arity = table.arity() + 1;
        let order = table.order();
        let membership = match tuple::volume(order, arity) {
            Ok(len) if len <= BITSET_LIMIT => {
                let mut bits = BitSet::new(len);
                for (idx, &v) in table.values().iter().enumerate() {
                    bits.insert(idx * order + v as usize);
                }
                Membership::Bits(bits)
            }
            _ => Membership::Lazy,
        };
        QPredicate { table, membership }
    }

    /// Builds a predicate whose last coordinate is `last(first n coordinates)`.
    pub fn from_solver(order: usize, arity: usize, last: impl FnMut(&[u8]) -> u8) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Structural("predicate arity must be at least 1".into()));
        }
        let table = QTable::from_fn(order, arity - 1, last)?;
        Self::from_table(&table)
    }

    /// Builds a predicate from an arbitrary membership test. Fails unless
    /// every line parallel to the last coordinate holds exactly one member
    /// and the result has the Latin property in every coordinate.
    pub fn from_membership(order: usize, arity: usize, mut member: impl FnMut(&[u8]) -> bool) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Structural("predicate arity must be at least 1".into()));
        }
        let mut word = vec![0u8; arity];
        let mut failure = None;
        let table = QTable::from_fn(order, arity - 1, |prefix| {
            word[..arity - 1].copy_from_slice(prefix);
            let mut found = None;
            for c in 0..order as u8 {
                word[arity - 1] = c;
                if member(&word) {
                    if found.is_some() && failure.is_none() {
                        failure = Some(format!("two members on the line through {prefix:?}"));
                    }
                    found.get_or_insert(c);
                }
            }
            found.unwrap_or_else(|| {
                failure.get_or_insert_with(|| format!("no member on the line through {prefix:?}"));
                0
            })
        })?;
        if let Some(msg) = failure {
            return Err(Error::NotPredicate(msg));
        }
        table.validate().map_err(|v| Error::NotPredicate(format!("Latin property fails: {v}")))?;
        Ok(Self::from_valid_table(table))
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.table.order()
    }

    /// Number of coordinates (`n + 1` for an `n`-quasigroup).
    #[inline]
    pub fn arity(&self) -> usize {
        self.table.arity() + 1
    }

    /// The last coordinate as a function of the others.
    pub fn defining_table(&self) -> &QTable {
        &self.table
    }

    pub fn is_bitset_backed(&self) -> bool {
        matches!(self.membership, Membership::Bits(_))
    }

    /// Membership test; `word.len()` must equal the arity.
    #[inline]
    pub fn contains(&self, word: &[u8]) -> bool {
        debug_assert_eq!(word.len(), self.arity());
        match &self.membership {
            Membership::Bits(bits) => bits.contains(tuple::index_of(word, self.order())),
            Membership::Lazy => self.contains_via_table(word),
        }
    }

    #[inline]
    pub(crate) fn contains_via_table(&self, word: &[u8]) -> bool {
        let n = self.table.arity();
        self.table.get(&word[..n]) == word[n]
    }

    /// The unique symbol at `position` completing `word` to a member; the
    /// current entry at `position` is ignored.
    pub fn solve(&self, word: &[u8], position: usize) -> u8 {
        let n = self.table.arity();
        if position == n {
            return self.table.get(&word[..n]);
        }
        let mut w = word.to_vec();
        for c in 0..self.order() as u8 {
            w[position] = c;
            if self.contains(&w) {
                return c;
            }
        }
        unreachable!("quasigroup predicate has a member on every line")
    }

    /// Number of member tuples.
    pub fn member_count(&self) -> usize {
        match &self.membership {
            Membership::Bits(bits) => bits.count_ones(),
            Membership::Lazy => self.table.values().len(),
        }
    }

    /// All member tuples in lexicographic order.
    pub fn members(&self) -> Vec<Vec<u8>> {
        let n = self.table.arity();
        let mut out = Vec::with_capacity(self.table.values().len());
        tuple::for_each_word(self.order(), n, |w| {
            let mut m = w.to_vec();
            m.push(self.table.get(w));
            out.push(m);
        });
        out
    }

    /// The table with coordinate `output` as the value and the remaining
    /// coordinates, in order, as arguments.
    pub fn to_table(&self, output: usize) -> Result<QTable> {
        let arity = self.arity();
        if output >= arity {
            return Err(Error::PositionOutOfRange { position: output, arity });
        }
        if output == arity - 1 {
            return Ok(self.table.clone());
        }
        QTable::from_fn(self.order(), arity - 1, |args| {
            let word = tuple::with_inserted(args, output, 0);
            self.solve(&word, output)
        })
    }

    /// The predicate whose `i`-th coordinate is coordinate `order[i]` of
    /// `self`; `order` must be a permutation of `0..arity`.
    pub fn reorder(&self, order: &[usize]) -> Result<QPredicate> {
        let arity = self.arity();
        if order.len() != arity {
            return Err(Error::ArityMismatch { expected: arity, found: order.len() });
        }
        let mut seen = vec![false; arity];
        for &p in order {
            if p >= arity || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Precondition(format!("{order:?} is not a coordinate permutation")));
            }
        }
        self.retract(&RetractSpec { kept: order.to_vec(), fixed: Vec::new() })
    }

    /// Fixes the coordinates in `spec.fixed` and keeps `spec.kept`, in the
    /// listed order, as the coordinates of the result.
    pub fn retract(&self, spec: &RetractSpec) -> Result<QPredicate> {
        spec.check(self.arity(), self.order())?;
        let l = spec.kept.len();
        let mut full = vec![0u8; self.arity()];
        for &(p, v) in &spec.fixed {
            full[p] = v;
        }
        let target = spec.kept[l - 1];
        let result = QPredicate::from_solver(self.order(), l, |prefix| {
            for (&p, &v) in spec.kept.iter().zip(prefix) {
                full[p] = v;
            }
            self.solve(&full, target)
        });
        result.map_err(|e| Error::Consistency(format!("retract {spec:?} is not a quasigroup: {e}")))
    }

    /// Minimum Hamming distance between distinct members, or `None` when
    /// there is at most one member.
    pub fn min_distance(&self) -> Option<usize> {
        let arity = self.arity();
        let s = self.order();
        if self.member_count() < 2 {
            return None;
        }
        let mut found_one = false;
        let mut word = vec![0u8; arity];
        tuple::for_each_word(s, arity - 1, |prefix| {
            if found_one {
                return;
            }
            word[..arity - 1].copy_from_slice(prefix);
            word[arity - 1] = self.table.get(prefix);
            for p in 0..arity {
                let orig = word[p];
                for c in (0..s as u8).filter(|&c| c != orig) {
                    word[p] = c;
                    if self.contains(&word) {
                        found_one = true;
                    }
                }
                word[p] = orig;
            }
        });
        if found_one {
            return Some(1);
        }
        // change the first coordinate and repair the last one
        let mut a = vec![0u8; arity];
        a[arity - 1] = self.solve(&a, arity - 1);
        let mut b = a.clone();
        b[0] = 1;
        b[arity - 1] = self.solve(&b, arity - 1);
        debug_assert!(self.contains(&b));
        Some(tuple::hamming(&a, &b))
    }
}

impl PartialEq for QPredicate {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
    }
}

impl Eq for QPredicate {}

impl std::hash::Hash for QPredicate {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.table.hash(state)
    }
}

impl fmt::Debug for QPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QPredicate(order={}, arity={}, {:?})", self.order(), self.arity(), self.table.values())
    }
}

/// Selects a retract: `kept` coordinates (in result order) stay free,
/// each `(position, symbol)` in `fixed` is pinned.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RetractSpec {
    pub kept: Vec<usize>,
    pub fixed: Vec<(usize, u8)>,
}

impl RetractSpec {
    /// Keeps `kept` in the given order and pins every other coordinate of
    /// an `arity`-ary predicate to the matching entry of `values`
    /// (listed in increasing position order).
    pub fn new(arity: usize, kept: Vec<usize>, values: &[u8]) -> Result<Self> {
        let rest: Vec<usize> = (0..arity).filter(|p| !kept.contains(p)).collect();
        if rest.len() != values.len() {
            return Err(Error::InvalidRetract(format!(
                "{} coordinates to fix, {} values given",
                rest.len(),
                values.len()
            )));
        }
        Ok(RetractSpec { kept, fixed: rest.into_iter().zip(values.iter().copied()).collect() })
    }

    /// Keeps `0..k` and pins the rest to `0`.
    pub fn prefix(arity: usize, k: usize) -> Self {
        RetractSpec { kept: (0..k).collect(), fixed: (k..arity).map(|p| (p, 0)).collect() }
    }

    pub fn check(&self, arity: usize, order: usize) -> Result<()> {
        if self.kept.len() < 2 {
            return Err(Error::InvalidRetract(format!("must keep at least 2 coordinates, kept {:?}", self.kept)));
        }
        let mut seen = vec![false; arity];
        for p in self.kept.iter().copied().chain(self.fixed.iter().map(|&(p, _)| p)) {
            if p >= arity {
                return Err(Error::InvalidRetract(format!("position {} out of range for arity {arity}", p + 1)));
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidRetract(format!("position {} listed twice", p + 1)));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidRetract("kept and fixed positions must cover every coordinate".into()));
        }
        if let Some(&(p, v)) = self.fixed.iter().find(|&&(_, v)| v as usize >= order) {
            return Err(Error::InvalidRetract(format!("symbol {v} at position {} out of range", p + 1)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor_pred() -> QPredicate {
        QPredicate::from_table(&QTable::new(2, 2, vec![0, 1, 1, 0]).unwrap()).unwrap()
    }

    #[test]
    fn xor_graph_is_even_weight_code() {
        let p = xor_pred();
        assert_eq!(p.arity(), 3);
        let mut expected = Vec::new();
        tuple::for_each_word(2, 3, |w| {
            if w.iter().map(|&x| x as usize).sum::<usize>() % 2 == 0 {
                expected.push(w.to_vec());
            }
        });
        assert_eq!(p.members(), expected);
        assert_eq!(p.member_count(), 4);
        assert_eq!(p.min_distance(), Some(2));
    }

    #[test]
    fn roundtrip_through_last_place() {
        let t = QTable::cyclic_sum(3, 3).unwrap();
        let p = QPredicate::from_table(&t).unwrap();
        assert_eq!(p.to_table(3).unwrap(), t);
    }

    #[test]
    fn xor_retract_is_identity_relation() {
        let spec = RetractSpec { kept: vec![0, 2], fixed: vec![(1, 0)] };
        let r = xor_pred().retract(&spec).unwrap();
        assert_eq!(r.members(), vec![vec![0, 0], vec![1, 1]]);
    }

    #[test]
    fn retract_spec_errors() {
        let p = xor_pred();
        let one = RetractSpec { kept: vec![0], fixed: vec![(1, 0), (2, 0)] };
        assert!(matches!(p.retract(&one), Err(Error::InvalidRetract(_))));
        let dup = RetractSpec { kept: vec![0, 0], fixed: vec![(2, 0)] };
        assert!(p.retract(&dup).is_err());
        let gap = RetractSpec { kept: vec![0, 1], fixed: vec![] };
        assert!(p.retract(&gap).is_err());
        let sym = RetractSpec { kept: vec![0, 1], fixed: vec![(2, 5)] };
        assert!(p.retract(&sym).is_err());
    }

    #[test]
    fn from_membership_rejects_non_graphs() {
        assert!(QPredicate::from_membership(2, 2, |_| true).is_err());
        assert!(QPredicate::from_membership(2, 2, |w| w[0] == 0).is_err());
        let id = QPredicate::from_membership(3, 2, |w| w[0] == w[1]).unwrap();
        assert_eq!(id.member_count(), 3);
    }

    #[test]
    fn lazy_and_bitset_membership_agree() {
        let p = QPredicate::from_table(&QTable::cyclic_sum(4, 3).unwrap()).unwrap();
        assert!(p.is_bitset_backed());
        tuple::for_each_word(4, 4, |w| assert_eq!(p.contains(w), p.contains_via_table(w)));
    }

    #[test]
    fn solve_any_position() {
        let p = QPredicate::from_table(&QTable::cyclic_sum(4, 2).unwrap()).unwrap();
        // 1 + x = 3
        assert_eq!(p.solve(&[1, 0, 3], 1), 2);
        assert_eq!(p.solve(&[0, 2, 3], 0), 1);
        assert_eq!(p.solve(&[1, 2, 0], 2), 3);
    }

    #[test]
    fn constant_predicate_has_single_member() {
        let p = QPredicate::from_table(&QTable::new(3, 0, vec![1]).unwrap()).unwrap();
        assert_eq!(p.members(), vec![vec![1]]);
        assert_eq!(p.min_distance(), None);
    }
}
