use std::fmt;

use crate::error::{Error, Result};

/// A permutation of `Σ = {0, .., s-1}` stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(order: usize) -> Self {
        Perm((0..order).map(|i| i as u8).collect())
    }

    pub fn from_images(images: Vec<u8>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::Structural(format!("{images:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// The transposition exchanging `a` and `b`.
    pub fn swap(order: usize, a: u8, b: u8) -> Self {
        let mut p = Perm::identity(order);
        p.0.swap(a as usize, b as usize);
        p
    }

    #[inline]
    pub fn apply(&self, x: u8) -> u8 {
        self.0[x as usize]
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Perm(inv)
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn after(&self, other: &Perm) -> Self {
        Perm(other.0.iter().map(|&x| self.apply(x)).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// All permutations of the given order in lexicographic order of their
    /// image lists.
    pub fn all(order: usize) -> Vec<Perm> {
        let mut current: Vec<u8> = (0..order as u8).collect();
        let mut out = vec![Perm(current.clone())];
        while next_permutation(&mut current) {
            out.push(Perm(current.clone()));
        }
        out
    }
}

fn next_permutation(v: &mut [u8]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_all() {
        let all = Perm::all(4);
        assert_eq!(all.len(), 24);
        assert!(all[0].is_identity());
        assert_eq!(all[1].images(), &[0, 1, 3, 2]);
        assert_eq!(all[23].images(), &[3, 2, 1, 0]);
    }

    #[test]
    fn inverse_and_compose() {
        let p = Perm::from_images(vec![2, 0, 3, 1]).unwrap();
        assert!(p.after(&p.inverse()).is_identity());
        assert!(p.inverse().after(&p).is_identity());
        assert!(Perm::from_images(vec![0, 0]).is_err());
        assert_eq!(Perm::swap(4, 0, 2).images(), &[2, 1, 0, 3]);
    }
}
