//! Bundled quasigroup tables.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::table::QTable;

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub table: QTable,
    pub provenance: &'static str,
}

/// An irreducible 4-ary quasigroup of order 4 all of whose ternary
/// retracts are reducible.
///
/// Reading convention: four lines, each of four blocks of four words of
/// four digits. `M(x1, x2, x3, x4)` is digit `x4` of word `x3` of block
/// `x2` of line `x1`, which is plain lexicographic order of the digits.
/// This reading passes the Latin check.
pub const IRREDUCIBLE_4ARY_ORDER4_TEXT: &str = "\
0123 1032 2310 3201  1032 0123 3201 2310  2301 3210 1023 0132  3210 2301 0132 1023
1032 0123 3201 2310  0123 1032 2310 3201  3210 2301 0132 1023  2301 3210 1023 0132
2310 3201 0123 1032  3201 2310 1032 0123  0132 1023 3210 2301  1023 0132 2301 3210
3201 2310 1032 0123  2310 3201 0123 1032  1023 0132 2301 3210  0132 1023 3210 2301
";

/// SHA-256 of the 256 table entries, one byte per entry, in index order.
pub const IRREDUCIBLE_4ARY_ORDER4_SHA256: &str = "97756fb236aa5a78a3b72c405d38dae2e7fb53a9b5b8e7c7580fc4e295445086";

pub fn digest(table: &QTable) -> String {
    Sha256::digest(table.values()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn irreducible_4ary_order4() -> Result<Fixture> {
    let values: Vec<u8> = IRREDUCIBLE_4ARY_ORDER4_TEXT
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Structural(format!("bad digit {c:?}"))))
        .collect::<Result<_>>()?;
    let table = QTable::new(4, 4, values)?;
    let d = digest(&table);
    if d != IRREDUCIBLE_4ARY_ORDER4_SHA256 {
        return Err(Error::Consistency(format!("fixture digest mismatch: {d}")));
    }
    Ok(Fixture {
        name: "irreducible-4ary-order4",
        table,
        provenance: "irreducible 4-quasigroup of order 4 whose maximal irreducible retracts are binary",
    })
}

pub fn by_name(name: &str) -> Result<Fixture> {
    match name {
        "irreducible-4ary-order4" => irreducible_4ary_order4(),
        _ => Err(Error::Precondition(format!("unknown fixture {name:?}"))),
    }
}
