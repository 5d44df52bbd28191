//! Sorted, duplicate-free sets of arms.
//!
//! Arms are stored 0-based. Everything that leaves the process (CSV, JSON,
//! `Display`) uses the 1-based labels `1..=K`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset {
    arms: Vec<usize>,
    capacity: Option<usize>,
}

impl Subset {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a subset from 0-based arm indices in any order. Duplicates are
    /// collapsed.
    pub fn from_arms<I: IntoIterator<Item = usize>>(arms: I) -> Self {
        let mut arms: Vec<usize> = arms.into_iter().collect();
        arms.sort_unstable();
        arms.dedup();
        Self {
            arms,
            capacity: None,
        }
    }

    /// Builds a subset from 1-based labels, checking each against `k`.
    pub fn from_labels(labels: &[usize], k: usize) -> Result<Self> {
        let mut arms = Vec::with_capacity(labels.len());
        for &l in labels {
            if l == 0 || l > k {
                return Err(invalid(format!("arm label {l} outside 1..={k}")));
            }
            arms.push(l - 1);
        }
        Ok(Self::from_arms(arms))
    }

    pub fn singleton(arm: usize) -> Self {
        Self {
            arms: vec![arm],
            capacity: None,
        }
    }

    pub fn full(k: usize) -> Self {
        Self::from_arms(0..k)
    }

    pub fn with_capacity(mut self, capacity: usize) -> Result<Self> {
        if self.arms.len() > capacity {
            return Err(invalid(format!(
                "subset of size {} exceeds capacity {capacity}",
                self.arms.len()
            )));
        }
        self.capacity = Some(capacity);
        Ok(self)
    }

    pub fn capacity(&self) -> Option<usize> {
        self.capacity
    }

    pub fn arms(&self) -> &[usize] {
        &self.arms
    }

    pub fn labels(&self) -> Vec<usize> {
        self.arms.iter().map(|a| a + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn contains(&self, arm: usize) -> bool {
        self.arms.binary_search(&arm).is_ok()
    }

    /// Adds `arm`, keeping the list sorted. Returns false if it was present.
    pub fn insert(&mut self, arm: usize) -> Result<bool> {
        match self.arms.binary_search(&arm) {
            Ok(_) => Ok(false),
            Err(pos) => {
                if let Some(cap) = self.capacity {
                    if self.arms.len() >= cap {
                        return Err(invalid(format!("subset capacity {cap} reached")));
                    }
                }
                self.arms.insert(pos, arm);
                Ok(true)
            }
        }
    }

    pub fn intersects(&self, other: &Subset) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.arms.len() && j < other.arms.len() {
            match self.arms[i].cmp(&other.arms[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.arms.iter().all(|&a| other.contains(a))
    }

    pub fn union(&self, other: &Subset) -> Subset {
        Subset::from_arms(self.arms.iter().chain(other.arms.iter()).copied())
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        Subset::from_arms(self.arms.iter().copied().filter(|&a| other.contains(a)))
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        Subset::from_arms(self.arms.iter().copied().filter(|&a| !other.contains(a)))
    }

    /// Checks every index lies in `0..k`.
    pub fn validate(&self, k: usize) -> Result<()> {
        match self.arms.last() {
            Some(&a) if a >= k => Err(invalid(format!("arm {} outside 1..={k}", a + 1))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.arms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", a + 1)?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.labels().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<usize>::deserialize(d)?;
        if labels.contains(&0) {
            return Err(serde::de::Error::custom("arm labels are 1-based"));
        }
        Ok(Subset::from_arms(labels.into_iter().map(|l| l - 1)))
    }
}

/// Number of `m`-subsets of a `k`-set, saturating at `u128::MAX`.
pub fn binomial(k: usize, m: usize) -> u128 {
    if m > k {
        return 0;
    }
    let m = m.min(k - m);
    let mut acc: u128 = 1;
    for i in 0..m {
        acc = match acc.checked_mul((k - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic iterator over the `m`-subsets of `0..k`.
#[derive(Debug, Clone)]
pub struct Combinations {
    k: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(k: usize, m: usize) -> Self {
        Self {
            k,
            current: (0..m).collect(),
            done: m > k,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let m = self.current.len();
        // advance to the next combination
        let mut i = m;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.current[i] < self.k - m + i {
                self.current[i] += 1;
                for j in i + 1..m {
                    self.current[j] = self.current[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Enumerates all `m`-subsets of `0..k` lexicographically, refusing when the
/// count exceeds `limit`.
pub fn all_m_subsets(k: usize, m: usize, limit: u128) -> Result<Vec<Subset>> {
    let count = binomial(k, m);
    if count > limit {
        return Err(Error::ResourceLimit {
            what: format!("C(K={k}, M={m}) subsets"),
            value: count,
            limit,
        });
    }
    Ok(Combinations::new(k, m)
        .map(|arms| Subset { arms, capacity: None })
        .collect())
}
