use std::fmt;

use serde::{Deserialize, Serialize};

use super::bits::low_mask;
use crate::error::{Error, Result};

/// A finite label set `I` of positive integers. The label of rank `k` (in
/// ascending order) is stored at bit `k` of every point.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct IndexSet {
    labels: Vec<u32>,
}

impl IndexSet {
    /// Points are machine words, so at most 64 coordinates.
    pub const MAX_DIM: usize = 64;

    /// Builds the label set; labels are sorted, duplicates and zero are rejected.
    pub fn new(mut labels: Vec<u32>) -> Result<Self> {
        labels.sort_unstable();
        if labels.first() == Some(&0) {
            return Err(Error::Domain("labels must be positive integers".into()));
        }
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Domain(format!("duplicate label {}", w[0])));
        }
        if labels.len() > Self::MAX_DIM {
            return Err(Error::DimensionTooLarge {
                dim: labels.len(),
                limit: Self::MAX_DIM,
                what: "index set",
            });
        }
        Ok(IndexSet { labels })
    }

    /// `{1, ..., n}`.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new((1..=n as u32).collect())
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn rank_of(&self, label: u32) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    pub fn label_of(&self, rank: usize) -> u32 {
        self.labels[rank]
    }

    /// Bitmask with one bit per coordinate.
    pub fn full_mask(&self) -> u64 {
        low_mask(self.dim())
    }

    /// Bitmask of a sub-label-set `J`; fails unless `J ⊆ I`.
    pub fn mask_of(&self, labels: &[u32]) -> Result<u64> {
        labels
            .iter()
            .try_fold(0u64, |acc, &l| match self.rank_of(l) {
                Some(k) => Ok(acc | 1 << k),
                None => Err(Error::Domain(format!("label {l} is not in {self}"))),
            })
    }

    /// Labels at the set bits of `mask`, ascending.
    pub fn labels_of_mask(&self, mask: u64) -> Vec<u32> {
        (0..self.dim())
            .filter(|&k| mask >> k & 1 == 1)
            .map(|k| self.labels[k])
            .collect()
    }

    /// The label set `J` selected by `mask`, as an index set in its own right.
    pub fn restrict(&self, mask: u64) -> IndexSet {
        IndexSet {
            labels: self.labels_of_mask(mask),
        }
    }
}

impl TryFrom<Vec<u32>> for IndexSet {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        IndexSet::new(v)
    }
}

impl From<IndexSet> for Vec<u32> {
    fn from(i: IndexSet) -> Self {
        i.labels
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, l) in self.labels.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexSet{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_canonicalized() {
        let i = IndexSet::new(vec![7, 2, 5]).unwrap();
        assert_eq!(i.labels(), &[2, 5, 7]);
        assert_eq!(i.rank_of(5), Some(1));
        assert_eq!(i.mask_of(&[7, 2]).unwrap(), 0b101);
        assert_eq!(i.restrict(0b110).labels(), &[5, 7]);
    }

    #[test]
    fn bad_label_sets() {
        assert!(IndexSet::new(vec![1, 1]).is_err());
        assert!(IndexSet::new(vec![0, 1]).is_err());
        assert!(IndexSet::standard(65).is_err());
        assert!(IndexSet::standard(3).unwrap().mask_of(&[4]).is_err());
    }
}
