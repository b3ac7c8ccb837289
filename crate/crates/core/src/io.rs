//! On-disk formats: exact-integer JSON for distributions and instances.
//!
//! Masses are stored as integer numerator/denominator pairs; no floating
//! point lands on disk. An instance file carries the family, kind and every
//! generation parameter (including seeds), enough to regenerate it
//! bit-for-bit.

use std::path::Path;
use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::dist::{Piece, PiecewiseDistribution, Relabel};
use crate::error::CondError;
use crate::lb::equivalence::{EquivalenceInstance, InstanceKind};
use crate::lb::support_pair::SupportPairInstance;
use crate::Rational;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PieceFile {
    pub count: u64,
    pub mass_num: u64,
    pub mass_den: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionFile {
    pub n: u64,
    pub pieces: Vec<PieceFile>,
    pub relabel_seed: Option<u64>,
    pub tau_num: u64,
    pub tau_den: u64,
}

fn rational_parts(r: &Rational) -> Result<(u64, u64), CondError> {
    match (r.numer().to_u64(), r.denom().to_u64()) {
        (Some(num), Some(den)) => Ok((num, den)),
        _ => Err(CondError::MassNotRepresentable {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }),
    }
}

impl DistributionFile {
    pub fn from_distribution(d: &PiecewiseDistribution) -> Result<Self, CondError> {
        let pieces = d
            .pieces()
            .iter()
            .map(|p| {
                let (mass_num, mass_den) = rational_parts(&p.mass)?;
                Ok(PieceFile {
                    count: p.count,
                    mass_num,
                    mass_den,
                })
            })
            .collect::<Result<Vec<_>, CondError>>()?;
        let (tau_num, tau_den) = rational_parts(d.tau())?;
        Ok(DistributionFile {
            n: d.n(),
            pieces,
            relabel_seed: d.relabel().map(|r| r.seed),
            tau_num,
            tau_den,
        })
    }

    pub fn into_distribution(&self) -> Result<PiecewiseDistribution, CondError> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                if p.mass_den == 0 {
                    return Err(CondError::param("zero mass denominator"));
                }
                Ok(Piece::new(
                    p.count,
                    Rational::new(p.mass_num.into(), p.mass_den.into()),
                ))
            })
            .collect::<Result<Vec<_>, CondError>>()?;
        let relabel = match self.relabel_seed {
            Some(seed) => Some(Arc::new(Relabel::generate(self.n, seed)?)),
            None => None,
        };
        if self.tau_den == 0 {
            return Err(CondError::param("zero tau denominator"));
        }
        let tau = Rational::new(self.tau_num.into(), self.tau_den.into());
        PiecewiseDistribution::new(self.n, pieces, relabel, tau)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyParams {
    Equivalence {
        k_b: u32,
        b: u64,
        m: u64,
        rho: f64,
        r: u32,
        bucket_sizes: Vec<u64>,
        pair_flips: Vec<u8>,
        relabel_seed: u64,
    },
    SupportPair {
        gamma: f64,
        beta: f64,
        grid_index: u32,
        s: u64,
        s2: u64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub family: String,
    pub kind: String,
    pub n: u64,
    pub seed: u64,
    pub params: FamilyParams,
    pub d1: DistributionFile,
    pub d2: DistributionFile,
}

impl InstanceFile {
    pub fn from_equivalence(inst: &EquivalenceInstance) -> Result<Self, CondError> {
        Ok(InstanceFile {
            family: "equivalence".into(),
            kind: kind_str(inst.kind).into(),
            n: inst.n,
            seed: inst.seed,
            params: FamilyParams::Equivalence {
                k_b: inst.k_b,
                b: inst.b,
                m: inst.m,
                rho: inst.rho,
                r: inst.r,
                bucket_sizes: inst.bucket_sizes.clone(),
                pair_flips: inst.pair_flips.iter().map(|&f| f as u8).collect(),
                relabel_seed: inst.relabel_seed,
            },
            d1: DistributionFile::from_distribution(&inst.d1)?,
            d2: DistributionFile::from_distribution(&inst.d2)?,
        })
    }

    pub fn from_support_pair(inst: &SupportPairInstance) -> Result<Self, CondError> {
        Ok(InstanceFile {
            family: "support-pair".into(),
            kind: kind_str(inst.kind).into(),
            n: inst.n,
            seed: inst.seed,
            params: FamilyParams::SupportPair {
                gamma: inst.gamma,
                beta: inst.beta,
                grid_index: inst.grid_index,
                s: inst.s,
                s2: inst.s2,
            },
            d1: DistributionFile::from_distribution(&inst.d1)?,
            d2: DistributionFile::from_distribution(&inst.d2)?,
        })
    }
}

fn kind_str(kind: InstanceKind) -> &'static str {
    match kind {
        InstanceKind::Yes => "yes",
        InstanceKind::No => "no",
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CondError> {
    let mut data = serde_json::to_string_pretty(value)?;
    data.push('\n');
    std::fs::write(path, data)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CondError> {
    let data = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&data)?)
}
