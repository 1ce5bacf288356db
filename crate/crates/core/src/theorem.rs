//! Reconstructing a decomposition of a quasigroup from a maximal
//! irreducible retract.
//!
//! Let `K` be an irreducible retract of `M` of maximum predicate arity `k`,
//! with `4 ≤ k ≤ N - 3` where `N` is the predicate arity of `M`. Writing
//! `M⟨x̄, ȳ⟩` with `K⟨x̄⟩ ⟺ M⟨x̄, 0̄⟩`, each `y_i` is tied to exactly one
//! `x_{j(i)}`, and
//!
//! ```text
//! M⟨x̄, ȳ⟩ ⟺ K⟨q^1(x_1, ȳ_{i^1}), .., q^k(x_k, ȳ_{i^k})⟩,   i^t = j⁻¹(t).
//! ```
//!
//! Every step below is checked exhaustively; a failed step on an input
//! meeting the hypotheses is reported as [`Error::TheoremViolation`].

use rayon::prelude::*;

use crate::decompose::{is_reducible, try_group, DecompositionTree};
use crate::error::{Error, Result};
use crate::isotopy::{self, find_isotopy, IsotopyMap};
use crate::perm::Perm;
use crate::predicate::{QPredicate, RetractSpec};
use crate::superpose::compose_predicate;
use crate::table::QTable;
use crate::tuple;

/// The largest irreducible retract found by [`max_irreducible_retract`].
#[derive(Clone, Debug)]
pub struct MaxRetract {
    /// Predicate arity of the retract.
    pub k: usize,
    pub spec: RetractSpec,
    pub retract: QPredicate,
}

/// Scans retracts by arity descending, kept set lexicographic, fixing
/// lexicographic, and returns the first irreducible one.
pub fn max_irreducible_retract(m: &QPredicate) -> Result<MaxRetract> {
    let arity = m.arity();
    if arity < 4 {
        return Err(Error::Precondition(format!("predicate arity must be at least 4, got {arity}")));
    }
    for l in (2..arity).rev() {
        let candidates: Vec<(Vec<usize>, Vec<u8>)> = tuple::combinations(arity, l)
            .into_iter()
            .flat_map(|kept| tuple::all_words(m.order(), arity - l).into_iter().map(move |fix| (kept.clone(), fix)))
            .collect();
        let found = candidates.into_par_iter().find_map_first(|(kept, fix)| {
            let spec = RetractSpec::new(arity, kept, &fix).expect("well-formed candidate");
            let retract = m.retract(&spec).expect("retracts of quasigroups are quasigroups");
            (!is_reducible(&retract)).then_some(MaxRetract { k: l, spec, retract })
        });
        if let Some(found) = found {
            return Ok(found);
        }
    }
    unreachable!("binary retracts are irreducible")
}

/// `M` relabeled so that the retract's kept coordinates come first, in
/// order, and its fixed values become `0`.
#[derive(Clone, Debug)]
pub struct TheoremInstance {
    pub original: QPredicate,
    /// `M'⟨x̄, ȳ⟩` with `M'⟨x̄, 0̄⟩ ⟺ K⟨x̄⟩`.
    pub normalized: QPredicate,
    /// The retract `K` (predicate arity `k`).
    pub outer: QPredicate,
    pub k: usize,
    pub spec: RetractSpec,
    /// Original position of each normalized coordinate.
    positions: Vec<usize>,
    /// Symbol exchanged with `0` on each normalized coordinate.
    shifts: Vec<u8>,
}

impl TheoremInstance {
    /// Normalizes `m` around the retract `spec`, which must be irreducible.
    pub fn new(m: &QPredicate, spec: &RetractSpec) -> Result<Self> {
        let arity = m.arity();
        spec.check(arity, m.order())?;
        let mut fixed = spec.fixed.clone();
        fixed.sort_unstable();
        let positions: Vec<usize> = spec.kept.iter().copied().chain(fixed.iter().map(|&(p, _)| p)).collect();
        let shifts: Vec<u8> = spec.kept.iter().map(|_| 0).chain(fixed.iter().map(|&(_, v)| v)).collect();
        let reordered = m.reorder(&positions)?;
        let swaps = IsotopyMap { maps: shifts.iter().map(|&c| Perm::swap(m.order(), 0, c)).collect() };
        let normalized = isotopy::apply(&reordered, &swaps)?;
        let k = spec.kept.len();
        let outer = normalized.retract(&RetractSpec::prefix(arity, k))?;
        if is_reducible(&outer) {
            return Err(Error::Precondition(format!("retract {spec:?} is reducible")));
        }
        Ok(TheoremInstance { original: m.clone(), normalized, outer, k, spec: spec.clone(), positions, shifts })
    }

    /// Normalizes `m` around its maximal irreducible retract.
    pub fn from_max_retract(m: &QPredicate) -> Result<Self> {
        let max = max_irreducible_retract(m)?;
        Self::new(m, &max.spec)
    }

    pub fn arity(&self) -> usize {
        self.normalized.arity()
    }

    /// Number of `y` coordinates.
    pub fn m(&self) -> usize {
        self.arity() - self.k
    }

    /// Original position of normalized coordinate `i`.
    pub fn original_position(&self, i: usize) -> usize {
        self.positions[i]
    }

    fn y(&self, i: usize) -> usize {
        self.k + i
    }

    /// `L_{i; ȳ^{(i)}}⟨x̄, z⟩ ⟺ M'⟨x̄, ȳ^{(i)} # z⟩`; `others` lists the
    /// remaining `y` values in order.
    fn one_y_retract(&self, i: usize, others: &[u8]) -> Result<QPredicate> {
        let kept: Vec<usize> = (0..self.k).chain([self.y(i)]).collect();
        self.normalized.retract(&RetractSpec::new(self.arity(), kept, others)?)
    }

    fn check_hypothesis(&self) -> Result<()> {
        let n = self.arity();
        if self.k < 4 || self.k + 3 > n {
            return Err(Error::Precondition(format!(
                "need 4 ≤ k ≤ {} for predicate arity {n}, got k = {}",
                n as isize - 3,
                self.k
            )));
        }
        Ok(())
    }
}

/// For each `y_i`, the zero-based index `j(i)` of the `x` it is grouped with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupMap {
    pub j: Vec<usize>,
    pub k: usize,
}

impl GroupMap {
    /// `i^t`: the `y` indices grouped with `x_t`.
    pub fn group(&self, t: usize) -> Vec<usize> {
        (0..self.j.len()).filter(|&i| self.j[i] == t).collect()
    }

    pub fn groups(&self) -> Vec<Vec<usize>> {
        (0..self.k).map(|t| self.group(t)).collect()
    }
}

fn separating_xs(l: &QPredicate, k: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for j in 0..k {
        if try_group(l, &[j, k])?.is_some() {
            out.push(j);
        }
    }
    Ok(out)
}

/// Computes `j(i)` from the retracts `L_{i; 0̄}`: the unique `x_j` such
/// that `{x_j, z}` separates. With `strict`, every fixing of `ȳ^{(i)}` is
/// checked to give the same unique `j`.
///
/// Requires `k ≥ 4` and at least one `y`.
pub fn group_map(inst: &TheoremInstance, strict: bool) -> Result<GroupMap> {
    if inst.k < 4 || inst.m() == 0 {
        return Err(Error::Precondition(format!(
            "need k ≥ 4 and at least one y coordinate, got k = {}, m = {}",
            inst.k,
            inst.m()
        )));
    }
    let m = inst.m();
    let j = (0..m)
        .into_par_iter()
        .map(|i| {
            let fixings = if strict { tuple::all_words(inst.normalized.order(), m - 1) } else { vec![vec![0; m - 1]] };
            let mut found = None;
            for others in fixings {
                let l = inst.one_y_retract(i, &others)?;
                let js = separating_xs(&l, inst.k)?;
                let [j] = js[..] else {
                    return Err(Error::TheoremViolation(format!(
                        "y{} with other y = {others:?} separates with x positions {:?}, expected exactly one",
                        i + 1,
                        js.iter().map(|j| j + 1).collect::<Vec<_>>()
                    )));
                };
                match found {
                    None => found = Some(j),
                    Some(prev) if prev != j => {
                        return Err(Error::TheoremViolation(format!(
                            "y{} groups with x{} at other y = 0̄ but with x{} at {others:?}",
                            i + 1,
                            prev + 1,
                            j + 1
                        )))
                    }
                    Some(_) => {}
                }
            }
            Ok(found.expect("at least one fixing"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupMap { j, k: inst.k })
}

/// Which step of the two-group retract check failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwoGroupStage {
    FirstGroup,
    SecondGroup,
    Alignment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwoGroupOutcome {
    /// `N⟨x̄, v, w⟩ ⟺ K⟨o^1(x_{j'}, v), o^2(x_{j''}, w), ..⟩`, with the
    /// witness aligning the final outer to `K`.
    Holds(IsotopyMap),
    Failed(TwoGroupStage),
}

impl TwoGroupOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, TwoGroupOutcome::Holds(_))
    }
}

/// Checks the retract `N⟨x̄, v, w⟩` with `v = y_{i1}`, `w = y_{i2}` and the
/// other `y` fixed to `others` (in order): `{x_{j(i1)}, v}` separates,
/// then `{x_{j(i2)}, w}` separates the outer, and the final outer is
/// isotopic to `K`.
pub fn check_two_group_retract(
    inst: &TheoremInstance,
    map: &GroupMap,
    i1: usize,
    i2: usize,
    others: &[u8],
) -> Result<TwoGroupOutcome> {
    let m = inst.m();
    if i1 == i2 || i1 >= m || i2 >= m || m < 2 {
        return Err(Error::Precondition(format!(
            "need two distinct y indices below {m}, got {} and {}",
            i1 + 1,
            i2 + 1
        )));
    }
    let (j1, j2) = (map.j[i1], map.j[i2]);
    if j1 == j2 {
        return Err(Error::Precondition(format!("y{} and y{} are in the same group", i1 + 1, i2 + 1)));
    }
    if others.len() != m - 2 {
        return Err(Error::Precondition(format!("need {} fixed values, got {}", m - 2, others.len())));
    }
    let k = inst.k;
    let kept: Vec<usize> = (0..k).chain([inst.y(i1), inst.y(i2)]).collect();
    let n_ret = inst.normalized.retract(&RetractSpec::new(inst.arity(), kept, others)?)?;
    let Some(first) = try_group(&n_ret, &[j1, k])? else {
        return Ok(TwoGroupOutcome::Failed(TwoGroupStage::FirstGroup));
    };
    // the outer keeps x_1..x_k in place and w last
    let Some(second) = try_group(&first.outer, &[j2, k])? else {
        return Ok(TwoGroupOutcome::Failed(TwoGroupStage::SecondGroup));
    };
    Ok(match find_isotopy(&second.outer, &inst.outer)? {
        Some(w) => TwoGroupOutcome::Holds(w),
        None => TwoGroupOutcome::Failed(TwoGroupStage::Alignment),
    })
}

/// `M⟨z̄⟩ ⟺ K⟨q^1(z̄_{G_1}), .., q^k(z̄_{G_k})⟩` in original positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremDecomposition {
    pub outer: QPredicate,
    /// `groups[t]` = original position of `x_t`, then those of `ȳ_{i^t}`.
    pub groups: Vec<Vec<usize>>,
    /// `inners[t]` has arity `groups[t].len()`.
    pub inners: Vec<QTable>,
    pub group_map: GroupMap,
    pub spec: RetractSpec,
}

impl TheoremDecomposition {
    pub fn k(&self) -> usize {
        self.outer.arity()
    }

    pub fn arity(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn to_predicate(&self) -> Result<QPredicate> {
        compose_predicate(&self.outer, &self.groups, &self.inners)
    }

    /// The decomposition as a two-level tree; identity inners on singleton
    /// groups become plain coordinates.
    pub fn to_tree(&self) -> Result<DecompositionTree> {
        use crate::decompose::{Arg, TreeNode};
        let args = self
            .groups
            .iter()
            .zip(&self.inners)
            .map(|(g, q)| {
                if g.len() == 1 {
                    if q.as_perm()?.is_identity() {
                        Ok(Arg::Var(g[0]))
                    } else {
                        Err(Error::Consistency(format!("inner on singleton group {} is not the identity", g[0] + 1)))
                    }
                } else {
                    Ok(Arg::Sub(Box::new(TreeNode {
                        pred: QPredicate::from_table(q)?,
                        args: g.iter().map(|&p| Arg::Var(p)).collect(),
                    })))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DecompositionTree {
            order: self.outer.order(),
            arity: self.arity(),
            root: TreeNode { pred: self.outer.clone(), args },
        })
    }
}

/// Builds the decomposition by extracting `{x_t} ∪ ȳ_{i^t}` for each `t`
/// in turn, aligning the residual outer to `K` by isotopy, and normalizing
/// so that `q^t(x_t, 0̄) = x_t` in normalized coordinates. The result is
/// checked at every point of `M`.
pub fn reconstruct(inst: &TheoremInstance, map: &GroupMap) -> Result<TheoremDecomposition> {
    inst.check_hypothesis()?;
    let k = inst.k;
    let s = inst.normalized.order();

    #[derive(Clone, Copy, PartialEq, Eq)]
    enum Label {
        X(usize),
        Y(usize),
        Slot(usize),
    }

    let mut residual = inst.normalized.clone();
    let mut labels: Vec<Label> = (0..k).map(Label::X).chain((0..inst.m()).map(Label::Y)).collect();
    let mut inners: Vec<QTable> = (0..k).map(|_| QTable::identity(s)).collect::<Result<_>>()?;
    for (t, ys) in map.groups().into_iter().enumerate() {
        if ys.is_empty() {
            continue;
        }
        let group: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == Label::X(t) || matches!(l, Label::Y(i) if ys.contains(i)))
            .map(|(p, _)| p)
            .collect();
        let Some(split) = try_group(&residual, &group)? else {
            return Err(Error::TheoremViolation(format!(
                "group of x{} with y {:?} does not separate",
                t + 1,
                ys.iter().map(|i| i + 1).collect::<Vec<_>>()
            )));
        };
        labels = split.outer_positions().into_iter().map(|pos| pos.map_or(Label::Slot(t), |p| labels[p])).collect();
        inners[t] = split.inner;
        residual = split.outer;
    }
    debug_assert!(labels.iter().enumerate().all(|(p, l)| matches!(l, Label::X(t) | Label::Slot(t) if *t == p)));

    let Some(align) = find_isotopy(&residual, &inst.outer)? else {
        return Err(Error::TheoremViolation("residual outer is not isotopic to the retract".into()));
    };
    for (q, sigma) in inners.iter_mut().zip(&align.maps) {
        *q = q.then(sigma);
    }
    // (q^t(·, 0̄))_t is an autotopism of K, so it can be divided out
    for q in inners.iter_mut() {
        let section = QTable::from_fn(s, 1, |a| {
            let mut w = vec![0u8; q.arity()];
            w[0] = a[0];
            q.get(&w)
        })?;
        *q = q.then(&section.as_perm()?.inverse());
    }

    let groups: Vec<Vec<usize>> = map
        .groups()
        .iter()
        .enumerate()
        .map(|(t, ys)| std::iter::once(t).chain(ys.iter().map(|&i| inst.y(i))).collect())
        .collect();
    let rebuilt = compose_predicate(&inst.outer, &groups, &inners)?;
    if rebuilt != inst.normalized {
        return Err(Error::TheoremViolation("reconstruction differs from M".into()));
    }

    // back to original positions and symbols
    let original_groups: Vec<Vec<usize>> =
        groups.iter().map(|g| g.iter().map(|&p| inst.positions[p]).collect()).collect();
    let original_inners = groups
        .iter()
        .zip(&inners)
        .map(|(g, q)| {
            let swaps: Vec<Perm> = g.iter().map(|&p| Perm::swap(s, 0, inst.shifts[p])).collect();
            q.precompose(&swaps)
        })
        .collect::<Result<Vec<_>>>()?;
    let dec = TheoremDecomposition {
        outer: inst.outer.clone(),
        groups: original_groups,
        inners: original_inners,
        group_map: map.clone(),
        spec: inst.spec.clone(),
    };
    if dec.to_predicate()? != inst.original {
        return Err(Error::Consistency("decomposition differs from M in original coordinates".into()));
    }
    Ok(dec)
}

#[derive(Clone, Debug)]
pub enum CorollaryReport {
    /// `k` lies outside `4..=N-3`; no claim is made.
    HypothesisNotMet { k: usize, arity: usize },
    /// `k` lies in `4..=N-3`; `M` is reducible with this decomposition.
    Reducible { k: usize, arity: usize, decomposition: TheoremDecomposition },
}

impl CorollaryReport {
    pub fn k(&self) -> usize {
        match self {
            CorollaryReport::HypothesisNotMet { k, .. } | CorollaryReport::Reducible { k, .. } => *k,
        }
    }
}

/// Finds the maximal irreducible retract and, when its arity lies in
/// `4..=N-3`, reconstructs the decomposition and confirms reducibility.
pub fn corollary_check(m: &QPredicate, strict: bool) -> Result<CorollaryReport> {
    let arity = m.arity();
    let max = max_irreducible_retract(m)?;
    let k = max.k;
    if k < 4 || k + 3 > arity {
        return Ok(CorollaryReport::HypothesisNotMet { k, arity });
    }
    let inst = TheoremInstance::new(m, &max.spec)?;
    let map = group_map(&inst, strict)?;
    let decomposition = reconstruct(&inst, &map)?;
    if !is_reducible(m) {
        return Err(Error::TheoremViolation(format!(
            "maximal irreducible retract has arity {k} in 4..={} but M is irreducible",
            arity - 3
        )));
    }
    Ok(CorollaryReport::Reducible { k, arity, decomposition })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_has_binary_max_retract() {
        let m = QPredicate::from_table(&QTable::cyclic_sum(4, 3).unwrap()).unwrap();
        let max = max_irreducible_retract(&m).unwrap();
        assert_eq!(max.k, 3);
        // first candidate: keep 1,2,3 and fix 4 = 0
        assert_eq!(max.spec, RetractSpec { kept: vec![0, 1, 2], fixed: vec![(3, 0)] });
    }

    #[test]
    fn small_arity_is_rejected() {
        let m = QPredicate::from_table(&QTable::cyclic_sum(3, 2).unwrap()).unwrap();
        assert!(matches!(max_irreducible_retract(&m), Err(Error::Precondition(_))));
        assert!(matches!(corollary_check(&m, false), Err(Error::Precondition(_))));
    }

    #[test]
    fn instance_normalizes_fixings_to_zero() {
        let m = QPredicate::from_table(&QTable::cyclic_sum(3, 3).unwrap()).unwrap();
        let spec = RetractSpec { kept: vec![2, 0, 3], fixed: vec![(1, 2)] };
        let inst = TheoremInstance::new(&m, &spec).unwrap();
        assert_eq!(inst.outer, m.retract(&spec).unwrap());
        assert_eq!(inst.original_position(0), 2);
        assert_eq!(inst.original_position(3), 1);
        assert_eq!(inst.m(), 1);
    }

    #[test]
    fn reducible_retract_is_rejected() {
        let m = QPredicate::from_table(&QTable::cyclic_sum(3, 4).unwrap()).unwrap();
        assert!(TheoremInstance::new(&m, &RetractSpec::prefix(5, 4)).is_err());
    }

    fn planted_instance(seed: u64) -> crate::generate::Planted {
        let mut rng = crate::generate::rng_from_seed(seed);
        let k = crate::generate::random_irreducible(4, 3, 1000, &mut rng).unwrap();
        let groups = vec![vec![0, 4, 5], vec![1, 6], vec![2], vec![3]];
        crate::generate::planted(4, &groups, Some(QPredicate::from_table(&k).unwrap()), &mut rng).unwrap()
    }

    #[test]
    fn planted_instance_is_reconstructed() {
        let p = planted_instance(5);
        let inst = TheoremInstance::from_max_retract(&p.predicate).unwrap();
        assert_eq!(inst.k, 4);
        let map = group_map(&inst, true).unwrap();
        assert_eq!(map.j, vec![0, 0, 1]);
        let dec = reconstruct(&inst, &map).unwrap();
        assert_eq!(dec.groups, vec![vec![0, 4, 5], vec![1, 6], vec![2], vec![3]]);
        assert_eq!(dec.to_predicate().unwrap(), p.predicate);
        let out = check_two_group_retract(&inst, &map, 0, 2, &[1]).unwrap();
        assert!(out.holds());
        assert!(matches!(corollary_check(&p.predicate, false).unwrap(), CorollaryReport::Reducible { k: 4, .. }));
    }
}
