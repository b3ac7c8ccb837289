//! Atom partitions and sample configurations.
//!
//! The atoms of a query family `A_1, ..., A_t` are the nonempty sets of the
//! form `C_1 ∩ ... ∩ C_t` with `C_r` either `A_r` or its complement — at most
//! `2^t` of them, partitioning `[n]`. The configuration of a paired sample
//! transcript is the `6t^2`-bit summary of which samples collide and which
//! query sets contain them; it is all a label-invariant tester ever sees.

use std::collections::BTreeMap;

use crate::error::CondError;

/// Utility-scale cap on the number of generating sets.
pub const MAX_ATOM_SETS: usize = 20;

/// One atom: the ids whose membership pattern over the generating sets is
/// `signature` (bit `r` set means the id lies in set `r`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub signature: u32,
    pub ids: Vec<u64>,
}

/// The partition of `[n]` generated by a query family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomPartition {
    pub atoms: Vec<Atom>,
}

impl AtomPartition {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Computes the atom partition by signature-grouping the domain.
pub fn atoms(sets: &[Vec<u64>], n: u64) -> Result<AtomPartition, CondError> {
    if sets.len() > MAX_ATOM_SETS {
        return Err(CondError::param(format!(
            "at most {MAX_ATOM_SETS} generating sets supported, got {}",
            sets.len()
        )));
    }
    let mut sorted: Vec<Vec<u64>> = Vec::with_capacity(sets.len());
    for set in sets {
        for &id in set {
            if id == 0 || id > n {
                return Err(CondError::IdOutOfRange { id, n });
            }
        }
        let mut s = set.clone();
        s.sort_unstable();
        sorted.push(s);
    }
    let mut by_signature: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
    for id in 1..=n {
        let mut signature = 0u32;
        for (r, set) in sorted.iter().enumerate() {
            if set.binary_search(&id).is_ok() {
                signature |= 1 << r;
            }
        }
        by_signature.entry(signature).or_default().push(id);
    }
    Ok(AtomPartition {
        atoms: by_signature
            .into_iter()
            .map(|(signature, ids)| Atom { signature, ids })
            .collect(),
    })
}

/// The `6t^2`-bit label-invariant summary of a paired transcript: for all
/// `i, j` the four sample equalities `s_i^(k) = s_j^(l)` and the two
/// memberships `s_i^(k) ∈ A_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub t: usize,
    /// `equal[((i * 2 + k) * t + j) * 2 + l]` = (s_i^(k) == s_j^(l)).
    pub equal: Vec<bool>,
    /// `member[(i * 2 + k) * t + j]` = (s_i^(k) ∈ A_j).
    pub member: Vec<bool>,
}

impl Configuration {
    pub fn bits(&self) -> usize {
        self.equal.len() + self.member.len()
    }

    pub fn equal_at(&self, i: usize, k: usize, j: usize, l: usize) -> bool {
        self.equal[((i * 2 + k) * self.t + j) * 2 + l]
    }

    pub fn member_at(&self, i: usize, k: usize, j: usize) -> bool {
        self.member[(i * 2 + k) * self.t + j]
    }
}

/// Builds the configuration of paired samples `(samples1[i], samples2[i])`
/// drawn from query sets `sets[i]`. Errors when a sample lies outside the
/// set it was drawn from.
pub fn configuration(
    samples1: &[u64],
    samples2: &[u64],
    sets: &[Vec<u64>],
) -> Result<Configuration, CondError> {
    let t = sets.len();
    if samples1.len() != t || samples2.len() != t {
        return Err(CondError::param(
            "need exactly one sample pair per query set",
        ));
    }
    let sample = |i: usize, k: usize| if k == 0 { samples1[i] } else { samples2[i] };
    for i in 0..t {
        for k in 0..2 {
            if !sets[i].contains(&sample(i, k)) {
                return Err(CondError::SampleOutsideSet {
                    sample: sample(i, k),
                    index: i,
                });
            }
        }
    }
    let mut equal = vec![false; 4 * t * t];
    let mut member = vec![false; 2 * t * t];
    for i in 0..t {
        for k in 0..2 {
            for j in 0..t {
                for l in 0..2 {
                    equal[((i * 2 + k) * t + j) * 2 + l] = sample(i, k) == sample(j, l);
                }
                member[(i * 2 + k) * t + j] = sets[j].contains(&sample(i, k));
            }
        }
    }
    Ok(Configuration { t, equal, member })
}
