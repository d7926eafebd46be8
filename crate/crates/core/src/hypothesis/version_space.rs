use crate::error::{Error, Result};

/// A subset of the hypothesis indices of a class, stored as a bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VersionSpace {
    bits: Vec<u64>,
    universe: usize,
}

impl VersionSpace {
    /// The whole class.
    pub fn full(universe: usize) -> Self {
        let mut vs = VersionSpace {
            bits: vec![u64::MAX; universe.div_ceil(64)],
            universe,
        };
        let tail = universe % 64;
        if tail != 0 {
            if let Some(last) = vs.bits.last_mut() {
                *last = (1u64 << tail) - 1;
            }
        }
        vs
    }

    fn empty(universe: usize) -> Self {
        VersionSpace {
            bits: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    /// Builds a nonempty version space from explicit members.
    pub fn from_indices(universe: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut vs = Self::empty(universe);
        for h in members {
            if h >= universe {
                return Err(Error::Input(format!(
                    "hypothesis index {h} out of range for class of size {universe}"
                )));
            }
            vs.bits[h / 64] |= 1 << (h % 64);
        }
        if vs.is_empty() {
            return Err(Error::EmptyVersionSpace);
        }
        Ok(vs)
    }

    pub fn singleton(universe: usize, h: usize) -> Result<Self> {
        Self::from_indices(universe, [h])
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn contains(&self, h: usize) -> bool {
        h < self.universe && self.bits[h / 64] & (1 << (h % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// Keeps only the members for which `keep` holds. May leave the space
    /// empty; callers decide whether that is an error.
    pub fn retain(&mut self, mut keep: impl FnMut(usize) -> bool) {
        let members: Vec<usize> = self.iter().collect();
        for h in members {
            if !keep(h) {
                self.bits[h / 64] &= !(1 << (h % 64));
            }
        }
    }

    pub fn is_subset_of(&self, other: &VersionSpace) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}
