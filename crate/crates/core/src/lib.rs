//! Finite multary quasigroups: Latin hypercubes, their graphs as
//! distance-2 MDS codes, retracts, isotopy, permutable reducibility and
//! reconstruction of decompositions from irreducible retracts.
//!
//! Symbols are `0..s`. Tables index their arguments lexicographically with
//! the first argument most significant. Positions are zero-based in the
//! API and one-based in text formats and the command line.

pub mod bitset;
pub mod decompose;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod generate;
pub mod isotopy;
pub mod perm;
pub mod predicate;
pub mod superpose;
pub mod table;
pub mod theorem;
pub mod tuple;

pub use decompose::{
    decomposition_tree, is_reducible, lemma3_normalize, lemma4_agreement, reducibility_witness, try_group,
    DecompositionTree, GroupingDecomposition,
};
pub use error::{Error, Result, Violation};
pub use isotopy::{apply, find_isotopy, IsotopyMap};
pub use perm::Perm;
pub use predicate::{QPredicate, RetractSpec};
pub use superpose::{compose_predicate, superpose, SuperpositionSpec};
pub use table::QTable;
pub use theorem::{
    check_two_group_retract, corollary_check, group_map, max_irreducible_retract, reconstruct, CorollaryReport,
    GroupMap, TheoremDecomposition, TheoremInstance, TwoGroupOutcome,
};
