//! Dense value tables of multary quasigroups (Latin hypercubes).

use std::fmt;

use crate::error::{Error, Result, Violation};
use crate::perm::Perm;
use crate::tuple;

/// The value array of an `m`-ary operation on `Σ = {0, .., s-1}`.
///
/// `values[i]` is the value at the word with lexicographic index `i`, first
/// argument most significant. A `QTable` is only guaranteed to be
/// structurally sound (right length, symbols in range); the Latin property
/// is checked by [`QTable::validate`] and enforced by [`QTable::new`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QTable {
    order: usize,
    arity: usize,
    values: Vec<u8>,
}

impl QTable {
    /// Builds a table and checks the Latin property.
    pub fn new(order: usize, arity: usize, values: Vec<u8>) -> Result<Self> {
        let t = Self::from_values(order, arity, values)?;
        t.validate().map_err(Error::NotQuasigroup)?;
        Ok(t)
    }

    /// Builds a table, checking only its dimensions and symbol range.
    pub fn from_values(order: usize, arity: usize, values: Vec<u8>) -> Result<Self> {
        check_order(order)?;
        let len = tuple::volume(order, arity)?;
        if values.len() != len {
            return Err(Error::Structural(format!(
                "order {order} arity {arity} needs {len} values, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|&&v| v as usize >= order) {
            return Err(Error::Structural(format!("symbol {bad} out of range for order {order}")));
        }
        Ok(QTable { order, arity, values })
    }

    /// Tabulates `f` over all argument words. Only dimensions are checked.
    pub fn from_fn(order: usize, arity: usize, mut f: impl FnMut(&[u8]) -> u8) -> Result<Self> {
        check_order(order)?;
        let len = tuple::volume(order, arity)?;
        let mut values = Vec::with_capacity(len);
        tuple::for_each_word(order, arity, |w| values.push(f(w)));
        Self::from_values(order, arity, values)
    }

    /// The identity 1-quasigroup.
    pub fn identity(order: usize) -> Result<Self> {
        Self::from_values(order, 1, (0..order).map(|i| i as u8).collect())
    }

    pub fn from_perm(perm: &Perm) -> Self {
        QTable { order: perm.order(), arity: 1, values: perm.images().to_vec() }
    }

    /// `x_1 + .. + x_m mod s`.
    pub fn cyclic_sum(order: usize, arity: usize) -> Result<Self> {
        Self::from_fn(order, arity, |w| (w.iter().map(|&x| x as usize).sum::<usize>() % order) as u8)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.arity
    }

    #[inline]
    pub fn values(&self) -> &[u8] {
        &self.values
    }

    #[inline]
    pub fn get(&self, args: &[u8]) -> u8 {
        debug_assert_eq!(args.len(), self.arity);
        self.values[tuple::index_of(args, self.order)]
    }

    #[inline]
    pub fn get_index(&self, index: usize) -> u8 {
        self.values[index]
    }

    /// Checks the Latin property: along every position, with the other
    /// arguments fixed, the values form a permutation of `Σ`. Returns the
    /// first violation in (position, index) order.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let s = self.order;
        let mut seen = vec![false; s];
        for position in 0..self.arity {
            let stride = s.pow((self.arity - 1 - position) as u32);
            for base in 0..self.values.len() {
                if !(base / stride).is_multiple_of(s) {
                    continue;
                }
                seen.iter_mut().for_each(|b| *b = false);
                for v in 0..s {
                    let idx = base + v * stride;
                    let symbol = self.values[idx];
                    if std::mem::replace(&mut seen[symbol as usize], true) {
                        let mut fixed = vec![0u8; self.arity];
                        tuple::word_at(idx, s, &mut fixed);
                        return Err(Violation { position, fixed, symbol });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Inversion in the zero-based `place`: the returned `q'` satisfies
    /// `q'(.., y @ place, ..) = z ⟺ q(.., z @ place, ..) = y`.
    pub fn invert(&self, place: usize) -> Result<QTable> {
        if place >= self.arity {
            return Err(Error::PositionOutOfRange { position: place, arity: self.arity });
        }
        self.validate().map_err(Error::NotQuasigroup)?;
        let mut values = vec![0u8; self.values.len()];
        let mut word = vec![0u8; self.arity];
        for (idx, &y) in self.values.iter().enumerate() {
            tuple::word_at(idx, self.order, &mut word);
            let z = word[place];
            word[place] = y;
            values[tuple::index_of(&word, self.order)] = z;
        }
        Ok(QTable { order: self.order, arity: self.arity, values })
    }

    /// A 1-ary table as a permutation.
    pub fn as_perm(&self) -> Result<Perm> {
        if self.arity != 1 {
            return Err(Error::ArityMismatch { expected: 1, found: self.arity });
        }
        Perm::from_images(self.values.clone())
    }

    /// `x ↦ perm(self(x))`.
    pub fn then(&self, perm: &Perm) -> QTable {
        QTable { order: self.order, arity: self.arity, values: self.values.iter().map(|&v| perm.apply(v)).collect() }
    }

    /// `x ↦ self(perms[0](x_1), .., perms[m-1](x_m))`.
    pub fn precompose(&self, perms: &[Perm]) -> Result<QTable> {
        if perms.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: perms.len() });
        }
        let mut image = vec![0u8; self.arity];
        QTable::from_fn(self.order, self.arity, |w| {
            for (slot, (p, &x)) in image.iter_mut().zip(perms.iter().zip(w)) {
                *slot = p.apply(x);
            }
            self.get(&image)
        })
    }
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > 255 {
        return Err(Error::Structural(format!("order {order} outside 1..=255")));
    }
    Ok(())
}

impl fmt::Debug for QTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QTable(order={}, arity={}, {:?})", self.order, self.arity, self.values)
    }
}
