//! Grouped train/test selection.
//!
//! Samples are cut into consecutive groups of `group_size`. From every group
//! a seeded uniform draw without replacement picks `per_group_train +
//! per_group_test` members; the first `per_group_train` of the draw go to
//! the training set and the rest to the test set.

use alloc::vec::Vec;
use core::ops::Range;

use rand::seq::index;

use crate::error::{Error, Result};
use crate::rng::seeded_rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSplit {
    /// Index range of each group.
    pub groups: Vec<Range<usize>>,
    /// Selected training indices, ascending.
    pub train: Vec<usize>,
    /// Selected test indices, ascending.
    pub test: Vec<usize>,
}

pub fn split_groups(
    sample_count: usize,
    group_size: usize,
    per_group_train: usize,
    per_group_test: usize,
    seed: u64,
) -> Result<GroupSplit> {
    let per_group = per_group_train + per_group_test;
    if group_size == 0
        || sample_count == 0
        || !sample_count.is_multiple_of(group_size)
        || per_group > group_size
    {
        return Err(Error::InfeasibleSplit {
            samples: sample_count,
            group_size,
            per_group,
        });
    }

    let mut rng = seeded_rng(seed);
    let group_count = sample_count / group_size;
    let mut groups = Vec::with_capacity(group_count);
    let mut train = Vec::with_capacity(group_count * per_group_train);
    let mut test = Vec::with_capacity(group_count * per_group_test);
    for g in 0..group_count {
        let start = g * group_size;
        let picked = index::sample(&mut rng, group_size, per_group).into_vec();
        let (tr, te) = picked.split_at(per_group_train);
        let mut tr: Vec<usize> = tr.iter().map(|i| start + i).collect();
        let mut te: Vec<usize> = te.iter().map(|i| start + i).collect();
        tr.sort_unstable();
        te.sort_unstable();
        train.extend(tr);
        test.extend(te);
        groups.push(start..start + group_size);
    }
    Ok(GroupSplit {
        groups,
        train,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_disjointness() {
        let s = split_groups(8580, 20, 5, 2, 1).unwrap();
        assert_eq!(s.groups.len(), 429);
        assert_eq!(s.train.len(), 2145);
        assert_eq!(s.test.len(), 858);
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 2145 + 858);
        for g in &s.groups {
            assert_eq!(s.train.iter().filter(|i| g.contains(i)).count(), 5);
            assert_eq!(s.test.iter().filter(|i| g.contains(i)).count(), 2);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(
            split_groups(100, 10, 3, 3, 9),
            split_groups(100, 10, 3, 3, 9)
        );
        assert_ne!(
            split_groups(100, 10, 3, 3, 9).unwrap().train,
            split_groups(100, 10, 3, 3, 10).unwrap().train
        );
    }

    #[test]
    fn infeasible_requests() {
        assert!(matches!(
            split_groups(8580, 20, 20, 1, 0),
            Err(Error::InfeasibleSplit { .. })
        ));
        assert!(split_groups(101, 20, 5, 5, 0).is_err());
        assert!(split_groups(100, 0, 0, 0, 0).is_err());
        assert!(split_groups(0, 20, 1, 1, 0).is_err());
        // whole group in one set is fine
        assert_eq!(split_groups(40, 20, 20, 0, 0).unwrap().train.len(), 40);
    }
}
