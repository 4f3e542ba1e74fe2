//! The logical/physical mapping table.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("layout of {len} entries does not fit a chip of {n} qubits")]
    TooLong { len: usize, n: usize },
    #[error("physical qubit {0} out of range")]
    OutOfRange(usize),
    #[error("physical qubit {0} assigned twice")]
    Duplicate(usize),
}

/// Bijection between logical and physical qubits over the whole chip.
/// Logical indices at or above the circuit width are placeholders for
/// physical qubits the circuit does not use.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Layout {
    log2phys: Vec<usize>,
    phys2log: Vec<usize>,
}

impl Layout {
    pub fn identity(n: usize) -> Self {
        Layout {
            log2phys: (0..n).collect(),
            phys2log: (0..n).collect(),
        }
    }

    /// Places logical qubit `i` on `placement[i]`. Physical qubits not named
    /// are filled in ascending order by the remaining logical indices.
    pub fn from_placement(placement: &[usize], n: usize) -> Result<Self, LayoutError> {
        if placement.len() > n {
            return Err(LayoutError::TooLong { len: placement.len(), n });
        }
        let mut used = vec![false; n];
        for &p in placement {
            if p >= n {
                return Err(LayoutError::OutOfRange(p));
            }
            if std::mem::replace(&mut used[p], true) {
                return Err(LayoutError::Duplicate(p));
            }
        }
        let mut log2phys = placement.to_vec();
        log2phys.extend((0..n).filter(|&p| !used[p]));
        let mut phys2log = vec![0; n];
        for (l, &p) in log2phys.iter().enumerate() {
            phys2log[p] = l;
        }
        Ok(Layout { log2phys, phys2log })
    }

    pub fn len(&self) -> usize {
        self.log2phys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log2phys.is_empty()
    }

    #[inline]
    pub fn phys(&self, logical: usize) -> usize {
        self.log2phys[logical]
    }

    #[inline]
    pub fn logical(&self, physical: usize) -> usize {
        self.phys2log[physical]
    }

    pub fn log2phys(&self) -> &[usize] {
        &self.log2phys
    }

    /// The mapping table: entry `p` is the logical qubit held by physical `p`.
    pub fn phys2log(&self) -> &[usize] {
        &self.phys2log
    }

    /// Exchanges the logical qubits held by physical qubits `a` and `b`.
    pub fn swap_physical(&mut self, a: usize, b: usize) {
        let (la, lb) = (self.phys2log[a], self.phys2log[b]);
        self.phys2log.swap(a, b);
        self.log2phys[la] = b;
        self.log2phys[lb] = a;
        debug_assert!(self.is_consistent());
    }

    pub fn is_consistent(&self) -> bool {
        self.log2phys.len() == self.phys2log.len()
            && self
                .log2phys
                .iter()
                .enumerate()
                .all(|(l, &p)| p < self.phys2log.len() && self.phys2log[p] == l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_keeps_bijection() {
        let mut l = Layout::identity(4);
        l.swap_physical(2, 3);
        assert_eq!(l.phys2log(), &[0, 1, 3, 2]);
        assert_eq!(l.phys(3), 2);
        l.swap_physical(0, 2);
        assert_eq!(l.phys2log(), &[3, 1, 0, 2]);
        assert!(l.is_consistent());
    }

    #[test]
    fn placement_fills_remaining() {
        let l = Layout::from_placement(&[3, 1], 5).unwrap();
        assert_eq!(l.log2phys(), &[3, 1, 0, 2, 4]);
        assert!(l.is_consistent());
        assert_eq!(Layout::from_placement(&[1, 1], 3), Err(LayoutError::Duplicate(1)));
        assert_eq!(Layout::from_placement(&[4], 3), Err(LayoutError::OutOfRange(4)));
        assert_eq!(Layout::from_placement(&[0, 1, 2, 3], 3), Err(LayoutError::TooLong { len: 4, n: 3 }));
    }
}
