//! Permutable reducibility: splitting a quasigroup predicate as
//! `M⟨z̄⟩ ⟺ K⟨q(z̄_A), z̄_B⟩` and building full decomposition trees.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::predicate::QPredicate;
use crate::table::QTable;
use crate::tuple;

/// A split `M⟨z̄⟩ ⟺ outer⟨.., inner(z̄_A), ..⟩` of a predicate.
///
/// The outer predicate's coordinates are the positions outside `group` in
/// increasing order, with the inner value slotted in where the smallest
/// member of `group` would sit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupingDecomposition {
    /// Sorted zero-based positions `A` fed to the inner table.
    pub group: Vec<usize>,
    /// Table on `A`, arguments in `group` order.
    pub inner: QTable,
    pub outer: QPredicate,
}

impl GroupingDecomposition {
    /// For each outer coordinate, `Some(position)` of the original
    /// predicate or `None` for the inner-value slot.
    pub fn outer_positions(&self) -> Vec<Option<usize>> {
        outer_layout(self.outer.arity() + self.group.len() - 1, &self.group)
    }

    /// Index of the inner-value slot among the outer coordinates.
    pub fn slot(&self) -> usize {
        self.group[0]
    }

    /// The predicate `outer⟨.., inner(z̄_A), ..⟩`.
    pub fn reconstruct(&self) -> Result<QPredicate> {
        let layout = self.outer_positions();
        let arity = layout.len() + self.group.len() - 1;
        let mut outer_word = vec![0u8; layout.len()];
        let mut inner_args = vec![0u8; self.group.len()];
        QPredicate::from_membership(self.outer.order(), arity, |z| {
            fill_outer(z, &self.group, &layout, &self.inner, &mut inner_args, &mut outer_word);
            self.outer.contains(&outer_word)
        })
    }
}

fn outer_layout(arity: usize, group: &[usize]) -> Vec<Option<usize>> {
    (0..arity)
        .filter_map(|p| {
            if p == group[0] {
                Some(None)
            } else if group.contains(&p) {
                None
            } else {
                Some(Some(p))
            }
        })
        .collect()
}

#[inline]
fn fill_outer(
    z: &[u8],
    group: &[usize],
    layout: &[Option<usize>],
    inner: &QTable,
    inner_args: &mut [u8],
    outer_word: &mut [u8],
) {
    for (slot, &p) in inner_args.iter_mut().zip(group) {
        *slot = z[p];
    }
    let u = inner.get(inner_args);
    for (slot, pos) in outer_word.iter_mut().zip(layout) {
        *slot = match pos {
            Some(p) => z[*p],
            None => u,
        };
    }
}

fn check_group(arity: usize, group: &[usize]) -> Result<Vec<usize>> {
    let mut sorted = group.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != group.len() || sorted.last().is_some_and(|&p| p >= arity) {
        return Err(Error::Precondition(format!("{group:?} is not a set of positions of a {arity}-ary predicate")));
    }
    if sorted.len() < 2 || sorted.len() + 2 > arity {
        return Err(Error::Precondition(format!(
            "group size must lie in 2..={} for predicate arity {arity}, got {}",
            arity.saturating_sub(2),
            sorted.len()
        )));
    }
    Ok(sorted)
}

/// Tries to split `m` along the positions in `group`.
///
/// The inner table is read off a section: `q(x̄_A)` is the value at the
/// smallest position outside `A` completing `x̄_A` with every other
/// coordinate at `0`. The outer predicate is taken from one representative
/// `x̄_A` per inner value. The split is accepted only after checking every
/// member of `m` against the reconstruction.
pub fn try_group(m: &QPredicate, group: &[usize]) -> Result<Option<GroupingDecomposition>> {
    let arity = m.arity();
    let group = check_group(arity, group)?;
    Ok(try_group_unchecked(m, group))
}

fn try_group_unchecked(m: &QPredicate, group: Vec<usize>) -> Option<GroupingDecomposition> {
    let arity = m.arity();
    let s = m.order();
    let pivot = (0..arity).find(|p| !group.contains(p)).expect("complement is nonempty");

    let mut word = vec![0u8; arity];
    let inner = QTable::from_fn(s, group.len(), |xa| {
        for (&p, &v) in group.iter().zip(xa) {
            word[p] = v;
        }
        m.solve(&word, pivot)
    })
    .expect("retract dimensions are in range");
    debug_assert!(inner.is_valid());

    // first argument word (lexicographically) realising each inner value
    let mut reps: Vec<Option<usize>> = vec![None; s];
    for (idx, &u) in inner.values().iter().enumerate() {
        reps[u as usize].get_or_insert(idx);
    }
    let reps: Vec<Vec<u8>> = reps
        .into_iter()
        .map(|r| {
            let mut w = vec![0u8; group.len()];
            tuple::word_at(r.expect("quasigroup tables are onto"), s, &mut w);
            w
        })
        .collect();

    let layout = outer_layout(arity, &group);
    let mut full = vec![0u8; arity];
    let outer = QPredicate::from_membership(s, layout.len(), |ow| {
        for (pos, &v) in layout.iter().zip(ow) {
            match pos {
                Some(p) => full[*p] = v,
                None => {
                    for (&p, &r) in group.iter().zip(&reps[v as usize]) {
                        full[p] = r;
                    }
                }
            }
        }
        m.contains(&full)
    })
    .ok()?;

    let mut outer_word = vec![0u8; layout.len()];
    let mut inner_args = vec![0u8; group.len()];
    let mut z = vec![0u8; arity];
    let table = m.defining_table();
    let mismatch = tuple::find_word(s, arity - 1, |prefix| {
        z[..arity - 1].copy_from_slice(prefix);
        z[arity - 1] = table.get(prefix);
        fill_outer(&z, &group, &layout, &inner, &mut inner_args, &mut outer_word);
        (!outer.contains(&outer_word)).then_some(())
    });
    if mismatch.is_some() {
        return None;
    }
    Some(GroupingDecomposition { group, inner, outer })
}

/// Candidate groups in canonical order: by size, then lexicographic.
/// With `exclude_last`, the last coordinate never joins a group.
fn candidate_groups(arity: usize, exclude_last: bool) -> Vec<Vec<usize>> {
    if arity < 4 {
        return Vec::new();
    }
    let pool = if exclude_last { arity - 1 } else { arity };
    tuple::subsets_by_size(pool, 2..=arity - 2)
}

fn first_grouping(m: &QPredicate, exclude_last: bool) -> Option<GroupingDecomposition> {
    candidate_groups(m.arity(), exclude_last).into_par_iter().find_map_first(|g| try_group_unchecked(m, g))
}

/// The first separating group in canonical order, if `m` is reducible.
pub fn reducibility_witness(m: &QPredicate) -> Option<GroupingDecomposition> {
    first_grouping(m, false)
}

/// Whether `m` splits along some group `A` with `2 ≤ |A| ≤ arity - 2`.
/// Predicates of arity at most 3 are irreducible.
pub fn is_reducible(m: &QPredicate) -> bool {
    reducibility_witness(m).is_some()
}

/// An argument of a tree node: an original coordinate or a subtree whose
/// output feeds this slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Var(usize),
    Sub(Box<TreeNode>),
}

/// An irreducible predicate with its arguments. At the root every
/// coordinate is an argument; below the root the last coordinate is the
/// node's output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub pred: QPredicate,
    pub args: Vec<Arg>,
}

impl TreeNode {
    /// Original positions covered by this node, sorted.
    pub fn positions(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_positions(&mut out);
        out.sort_unstable();
        out
    }

    fn collect_positions(&self, out: &mut Vec<usize>) {
        for a in &self.args {
            match a {
                Arg::Var(p) => out.push(*p),
                Arg::Sub(n) => n.collect_positions(out),
            }
        }
    }

    fn arg_values(&self, z: &[u8]) -> Vec<u8> {
        self.args
            .iter()
            .map(|a| match a {
                Arg::Var(p) => z[*p],
                Arg::Sub(n) => n.output(z),
            })
            .collect()
    }

    fn output(&self, z: &[u8]) -> u8 {
        self.pred.defining_table().get(&self.arg_values(z))
    }

    fn nodes(&self) -> usize {
        1 + self
            .args
            .iter()
            .map(|a| match a {
                Arg::Var(_) => 0,
                Arg::Sub(n) => n.nodes(),
            })
            .sum::<usize>()
    }
}

/// A decomposition of a predicate into irreducible pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionTree {
    pub order: usize,
    /// Arity of the decomposed predicate.
    pub arity: usize,
    pub root: TreeNode,
}

impl DecompositionTree {
    /// True when no split was found.
    pub fn is_single_node(&self) -> bool {
        self.root.args.iter().all(|a| matches!(a, Arg::Var(_)))
    }

    pub fn node_count(&self) -> usize {
        self.root.nodes()
    }

    pub fn contains(&self, z: &[u8]) -> bool {
        self.root.pred.contains(&self.root.arg_values(z))
    }

    /// Evaluates the tree back into a predicate.
    pub fn to_predicate(&self) -> Result<QPredicate> {
        QPredicate::from_membership(self.order, self.arity, |z| self.contains(z))
    }

    /// Every node predicate, root first, in preorder.
    pub fn node_predicates(&self) -> Vec<&QPredicate> {
        fn walk<'a>(n: &'a TreeNode, out: &mut Vec<&'a QPredicate>) {
            out.push(&n.pred);
            for a in &n.args {
                if let Arg::Sub(c) = a {
                    walk(c, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }
}

/// Splits `m` greedily on the first separable group until every node is
/// irreducible. Below the root only groups avoiding the output coordinate
/// are tried; a separable group containing it always has a separable
/// complement, so no split is lost.
pub fn decomposition_tree(m: &QPredicate) -> DecompositionTree {
    let args = (0..m.arity()).map(Arg::Var).collect();
    let root = build(m.clone(), args, false);
    DecompositionTree { order: m.order(), arity: m.arity(), root }
}

fn build(pred: QPredicate, args: Vec<Arg>, rooted: bool) -> TreeNode {
    let Some(split) = first_grouping(&pred, rooted) else {
        return TreeNode { pred, args };
    };
    let mut args: Vec<Option<Arg>> = args.into_iter().map(Some).collect();
    let inner_args: Vec<Arg> = split.group.iter().map(|&p| args[p].take().unwrap()).collect();
    let inner_pred = QPredicate::from_valid_table(split.inner.clone());
    let child = build(inner_pred, inner_args, true);
    let mut child = Some(child);
    let outer_args: Vec<Arg> = split
        .outer_positions()
        .into_iter()
        .map(|pos| match pos {
            Some(p) => args[p].take().unwrap(),
            None => Arg::Sub(Box::new(child.take().unwrap())),
        })
        .collect();
    build(split.outer, outer_args, rooted)
}

/// The three section tables of `f(α, β̄, γ̄) = c(b(α, β̄), γ̄)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionNormalization {
    /// `c_0(α, γ̄) = f(α, 0̄, γ̄)`
    pub c0: QTable,
    /// `b_0(α, β̄) = f(α, β̄, 0̄)`
    pub b0: QTable,
    /// `a(α) = f(α, 0̄, 0̄)`
    pub a: QTable,
}

/// Rewrites the superposition `c(b(α, β̄), γ̄)` through its sections and
/// checks `c(b(α, β̄), γ̄) = c_0(a⁻¹(b_0(α, β̄)), γ̄)` at every point.
pub fn lemma3_normalize(c: &QTable, b: &QTable) -> Result<SectionNormalization> {
    let (k, l) = (c.arity(), b.arity());
    if k == 0 || l == 0 {
        return Err(Error::Precondition("both tables need arity at least 1".into()));
    }
    if c.order() != b.order() {
        return Err(Error::OrderMismatch { expected: c.order(), found: b.order() });
    }
    c.validate().map_err(Error::NotQuasigroup)?;
    b.validate().map_err(Error::NotQuasigroup)?;
    let s = c.order();
    let mut inner = vec![0u8; l];
    let mut outer = vec![0u8; k];
    // f over (α, β̄, γ̄)
    let mut f = |w: &[u8]| {
        inner.copy_from_slice(&w[..l]);
        outer[0] = b.get(&inner);
        outer[1..].copy_from_slice(&w[l..]);
        c.get(&outer)
    };
    let c0 = QTable::from_fn(s, k, |w| {
        let mut x = vec![0u8; k + l - 1];
        x[0] = w[0];
        x[l..].copy_from_slice(&w[1..]);
        f(&x)
    })?;
    let b0 = QTable::from_fn(s, l, |w| {
        let mut x = vec![0u8; k + l - 1];
        x[..l].copy_from_slice(w);
        f(&x)
    })?;
    let a = QTable::from_fn(s, 1, |w| {
        let mut x = vec![0u8; k + l - 1];
        x[0] = w[0];
        f(&x)
    })?;
    let a_inv =
        a.as_perm().map_err(|e| Error::Consistency(format!("a(α) = f(α, 0̄, 0̄) is not a permutation: {e}")))?.inverse();
    let mismatch = tuple::find_word(s, k + l - 1, |w| {
        let lhs = f(w);
        let mut cw = vec![a_inv.apply(b0.get(&w[..l]))];
        cw.extend_from_slice(&w[l..]);
        (lhs != c0.get(&cw)).then(|| w.to_vec())
    });
    if let Some(w) = mismatch {
        return Err(Error::Consistency(format!("section rewrite fails at {w:?}")));
    }
    Ok(SectionNormalization { c0, b0, a })
}

/// Compares `C⟨b(α, β̄), γ̄, δ⟩` with `C̃⟨b̃(α, β̄), γ̄, δ⟩`.
///
/// Returns `false` when they differ on the slice `β̄ = 0̄` or on the slice
/// `γ̄ = 0̄`. When both slices agree the relations must agree everywhere;
/// a disagreement is reported as [`Error::Consistency`].
pub fn lemma4_agreement(c: &QPredicate, c_t: &QPredicate, b: &QTable, b_t: &QTable) -> Result<bool> {
    let order = c.order();
    for o in [c_t.order(), b.order(), b_t.order()] {
        if o != order {
            return Err(Error::OrderMismatch { expected: order, found: o });
        }
    }
    if c.arity() != c_t.arity() {
        return Err(Error::ArityMismatch { expected: c.arity(), found: c_t.arity() });
    }
    if b.arity() != b_t.arity() {
        return Err(Error::ArityMismatch { expected: b.arity(), found: b_t.arity() });
    }
    if c.arity() < 2 || b.arity() == 0 {
        return Err(Error::Precondition("need C of arity ≥ 2 and b of arity ≥ 1".into()));
    }
    b.validate().map_err(Error::NotQuasigroup)?;
    b_t.validate().map_err(Error::NotQuasigroup)?;
    let l = b.arity();
    let gamma = c.arity() - 2;
    // δ as a function of (α, β̄, γ̄)
    let delta = |cc: &QPredicate, bb: &QTable, w: &[u8]| {
        let mut cw = vec![bb.get(&w[..l])];
        cw.extend_from_slice(&w[l..]);
        cc.defining_table().get(&cw)
    };
    let agree = |w: &[u8]| delta(c, b, w) == delta(c_t, b_t, w);
    let s = order;
    let beta_zero = tuple::find_word(s, 1 + gamma, |w| {
        let mut x = vec![w[0]];
        x.extend(std::iter::repeat_n(0, l - 1));
        x.extend_from_slice(&w[1..]);
        (!agree(&x)).then_some(())
    });
    let gamma_zero = tuple::find_word(s, l, |w| {
        let mut x = w.to_vec();
        x.extend(std::iter::repeat_n(0, gamma));
        (!agree(&x)).then_some(())
    });
    if beta_zero.is_some() || gamma_zero.is_some() {
        return Ok(false);
    }
    if let Some(w) = tuple::find_word(s, l + gamma, |w| (!agree(w)).then(|| w.to_vec())) {
        return Err(Error::Consistency(format!("slices agree but the relations differ at {w:?}")));
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_pred(order: usize, arity: usize) -> QPredicate {
        QPredicate::from_table(&QTable::cyclic_sum(order, arity).unwrap()).unwrap()
    }

    #[test]
    fn ternary_sum_splits_on_first_pair() {
        let m = sum_pred(4, 3);
        let g = try_group(&m, &[0, 1]).unwrap().unwrap();
        // pivot is x3 with x4 = 0, so the inner value is -(x1 + x2)
        assert_eq!(g.inner, QTable::from_fn(4, 2, |w| (8 - w[0] - w[1]) % 4).unwrap());
        let outer = QPredicate::from_solver(4, 3, |w| (w[1] + 4 - w[0]) % 4).unwrap();
        assert_eq!(g.outer, outer);
        assert_eq!(g.outer_positions(), vec![None, Some(2), Some(3)]);
        assert_eq!(g.reconstruct().unwrap(), m);
        assert_eq!(reducibility_witness(&m).unwrap().group, vec![0, 1]);
    }

    #[test]
    fn binary_quasigroups_are_irreducible() {
        assert!(!is_reducible(&sum_pred(4, 2)));
        assert!(candidate_groups(3, false).is_empty());
    }

    #[test]
    fn group_size_is_checked() {
        let m = sum_pred(3, 3);
        assert!(matches!(try_group(&m, &[0]), Err(Error::Precondition(_))));
        assert!(matches!(try_group(&m, &[0, 1, 2]), Err(Error::Precondition(_))));
        assert!(matches!(try_group(&m, &[0, 4]), Err(Error::Precondition(_))));
        assert!(matches!(try_group(&m, &[1, 1]), Err(Error::Precondition(_))));
    }

    #[test]
    fn group_order_does_not_matter() {
        let m = sum_pred(3, 4);
        assert_eq!(try_group(&m, &[3, 1]).unwrap(), try_group(&m, &[1, 3]).unwrap());
    }

    #[test]
    fn binary_tree_is_single_node() {
        let t = decomposition_tree(&sum_pred(3, 2));
        assert!(t.is_single_node());
        assert_eq!(t.node_count(), 1);
    }

    #[test]
    fn quaternary_sum_tree_reevaluates() {
        let m = sum_pred(4, 4);
        let t = decomposition_tree(&m);
        assert_eq!(t.to_predicate().unwrap(), m);
        assert_eq!(t.node_count(), 3);
        for p in t.node_predicates() {
            assert_eq!(p.arity(), 3);
        }
        assert_eq!(t.root.positions(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn section_normalization_on_xor() {
        let xor = QTable::new(2, 2, vec![0, 1, 1, 0]).unwrap();
        let n = lemma3_normalize(&xor, &xor).unwrap();
        assert_eq!(n.a, QTable::identity(2).unwrap());
        assert_eq!(n.c0, xor);
        assert_eq!(n.b0, xor);
    }

    #[test]
    fn section_normalization_rejects_nullary() {
        let c = QTable::new(2, 0, vec![0]).unwrap();
        let b = QTable::identity(2).unwrap();
        assert!(matches!(lemma3_normalize(&c, &b), Err(Error::Precondition(_))));
    }

    #[test]
    fn slice_agreement_trivial() {
        let c = sum_pred(3, 3);
        let b = QTable::cyclic_sum(3, 2).unwrap();
        assert!(lemma4_agreement(&c, &c, &b, &b).unwrap());
        let b2 = QTable::from_fn(3, 2, |w| (w[0] + 2 * w[1]) % 3).unwrap();
        assert!(!lemma4_agreement(&c, &c, &b, &b2).unwrap());
    }
}
