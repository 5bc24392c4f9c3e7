//! Non-crossing pair partitions and their canonical decomposition.
//!
//! Every `γ ∈ NC₂(n)` is exactly one of: the single pair `{(1,2)}`, an
//! enclosure `σ̃` whose outer pair is `(1, n)`, or a juxtaposition
//! `γ₁ ⊕ γ₂` split after the irreducible component that contains `1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A perfect matching of `{1, ..., n}` without crossings.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NcPairPartition {
    // zero-based partner table
    partner: Vec<u16>,
}

/// Result of [`NcPairPartition::decompose`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decomposition {
    Atom,
    Tilde(NcPairPartition),
    Concat(NcPairPartition, NcPairPartition),
}

impl NcPairPartition {
    /// Build from one-based pairs, validating that they form a non-crossing
    /// perfect matching of `{1..n}`.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || n % 2 == 1 {
            return Err(Error::Argument(format!(
                "ground set size {n} must be even and positive"
            )));
        }
        if n > u16::MAX as usize {
            return Err(Error::Argument(format!("ground set size {n} too large")));
        }
        let mut partner = vec![u16::MAX; n];
        for &(i, j) in pairs {
            let (i, j) = (i.min(j), i.max(j));
            if i == 0 || j > n || i == j {
                return Err(Error::Argument(format!("pair ({i}, {j}) outside 1..={n}")));
            }
            if partner[i - 1] != u16::MAX || partner[j - 1] != u16::MAX {
                return Err(Error::Argument(format!("pair ({i}, {j}) reuses a point")));
            }
            partner[i - 1] = (j - 1) as u16;
            partner[j - 1] = (i - 1) as u16;
        }
        if partner.contains(&u16::MAX) {
            return Err(Error::Argument("pairs do not cover the ground set".into()));
        }
        // crossing test: (i,j), (k,l) with i < k < j < l
        for i in 0..n {
            let j = partner[i] as usize;
            if j < i {
                continue;
            }
            for k in (i + 1)..j {
                let l = partner[k] as usize;
                if l > j {
                    return Err(Error::Argument(format!(
                        "pairs ({}, {}) and ({}, {}) cross",
                        i + 1,
                        j + 1,
                        k + 1,
                        l + 1
                    )));
                }
            }
        }
        Ok(Self { partner })
    }

    /// `{(1,2)}`.
    pub fn atom() -> Self {
        Self {
            partner: vec![1, 0],
        }
    }

    /// Size of the ground set.
    pub fn n(&self) -> usize {
        self.partner.len()
    }

    /// `|γ|`, the number of pairs.
    pub fn blocks(&self) -> usize {
        self.partner.len() / 2
    }

    /// One-based pairs sorted by their opener.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.partner
            .iter()
            .enumerate()
            .filter(|(i, &p)| *i < p as usize)
            .map(|(i, &p)| (i + 1, p as usize + 1))
            .collect()
    }

    /// Compact key, unique per partition.
    pub fn key(&self) -> &[u16] {
        &self.partner
    }

    pub fn is_atom(&self) -> bool {
        self.partner.len() == 2
    }

    /// `γ̃`: enclose in a new outer pair `(1, n+2)`.
    pub fn tilde(&self) -> Self {
        let n = self.n();
        let mut partner = Vec::with_capacity(n + 2);
        partner.push((n + 1) as u16);
        partner.extend(self.partner.iter().map(|&p| p + 1));
        partner.push(0);
        Self { partner }
    }

    /// `γ₁ ⊕ γ₂`: juxtapose, shifting `γ₂` past `γ₁`.
    pub fn oplus(&self, other: &Self) -> Self {
        let off = self.n() as u16;
        let mut partner = self.partner.clone();
        partner.extend(other.partner.iter().map(|&p| p + off));
        Self { partner }
    }

    pub fn decompose(&self) -> Decomposition {
        let n = self.n();
        if n == 2 {
            return Decomposition::Atom;
        }
        let j = self.partner[0] as usize;
        if j == n - 1 {
            let inner = self.partner[1..n - 1].iter().map(|&p| p - 1).collect();
            return Decomposition::Tilde(Self { partner: inner });
        }
        let left = self.partner[..=j].to_vec();
        let off = (j + 1) as u16;
        let right = self.partner[j + 1..].iter().map(|&p| p - off).collect();
        Decomposition::Concat(Self { partner: left }, Self { partner: right })
    }
}

impl fmt::Debug for NcPairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (i, j)) in self.pairs().into_iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "({i},{j})")?;
        }
        f.write_str("}")
    }
}

impl Serialize for NcPairPartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for NcPairPartition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(usize, usize)>::deserialize(d)?;
        Self::new(2 * pairs.len(), &pairs).map_err(serde::de::Error::custom)
    }
}

/// All of `NC₂(n)` in lexicographic order of the partner table (empty for
/// odd `n` and for `n = 0`).
pub fn enumerate_nc2(n: usize) -> Vec<NcPairPartition> {
    if n == 0 || n % 2 == 1 {
        return Vec::new();
    }
    let mut table: Vec<Vec<Vec<u16>>> = vec![vec![Vec::new()]];
    for half in 1..=n / 2 {
        let mut level = Vec::new();
        // 1 is paired with 2k; inside is NC₂(2k-2), outside NC₂(2(half-k))
        for k in 1..=half {
            for inner in &table[k - 1] {
                for outer in &table[half - k] {
                    let mut p = Vec::with_capacity(2 * half);
                    p.push((2 * k - 1) as u16);
                    p.extend(inner.iter().map(|&x| x + 1));
                    p.push(0);
                    let off = (2 * k) as u16;
                    p.extend(outer.iter().map(|&x| x + off));
                    level.push(p);
                }
            }
        }
        table.push(level);
    }
    table
        .swap_remove(n / 2)
        .into_iter()
        .map(|partner| NcPairPartition { partner })
        .collect()
}

/// `C_m = binom(2m, m) / (m + 1)`.
pub fn catalan(m: usize) -> u64 {
    let mut c: u64 = 1;
    for k in 0..m as u64 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}
