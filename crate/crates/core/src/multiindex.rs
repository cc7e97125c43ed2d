//! Multi-indices `σ = (i₁,…,iₙ)` labelling jet coordinates `p^j_σ` and
//! total derivatives `D_σ = D₁^{i₁}⋯Dₙ^{iₙ}`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{JetError, Result};

/// Largest supported number of base variables.
pub const MAX_BASE_VARS: usize = 8;

/// Exponent vector of fixed length `n ≤ 8`.
///
/// Entries past `n` are always zero so that the derived comparisons coincide
/// with lexicographic order on the exponent vector.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    dim: u8,
    exps: [u32; MAX_BASE_VARS],
}

impl MultiIndex {
    pub fn new(exps: &[u32]) -> Result<Self> {
        if exps.len() > MAX_BASE_VARS {
            return Err(JetError::TooManyBaseVariables(exps.len()));
        }
        let mut out = [0; MAX_BASE_VARS];
        out[..exps.len()].copy_from_slice(exps);
        Ok(Self {
            dim: exps.len() as u8,
            exps: out,
        })
    }

    /// The zero multi-index in `n` base variables.
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_BASE_VARS, "at most {MAX_BASE_VARS} base variables");
        Self {
            dim: n as u8,
            exps: [0; MAX_BASE_VARS],
        }
    }

    /// `1_i`, the multi-index of the single total derivative `D_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        assert!(i < n, "base index {i} out of range for n = {n}");
        let mut m = Self::zero(n);
        m.exps[i] = 1;
        m
    }

    /// Number of base variables.
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// `|σ| = i₁+…+iₙ`.
    pub fn order(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.exps[..self.dim()]
    }

    pub fn get(&self, i: usize) -> u32 {
        self.as_slice()[i]
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.plus(other))
    }

    /// Entrywise sum; the caller guarantees equal dimensions.
    pub(crate) fn plus(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut m = *self;
        for (a, b) in m.exps.iter_mut().zip(other.exps.iter()) {
            *a += b;
        }
        m
    }

    /// `σ + 1_i`.
    pub fn increment(&self, i: usize) -> Self {
        assert!(i < self.dim(), "base index {i} out of range");
        let mut m = *self;
        m.exps[i] += 1;
        m
    }

    /// `σ - κ`, defined whenever `κ ⊆ σ`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if self.dim != other.dim || !self.contains(other) {
            return None;
        }
        let mut m = *self;
        for (a, b) in m.exps.iter_mut().zip(other.exps.iter()) {
            *a -= b;
        }
        Some(m)
    }

    /// `κ ⊆ σ`: entrywise `κ_i ≤ σ_i`.
    pub fn contains(&self, other: &Self) -> bool {
        self.dim == other.dim && self.exps.iter().zip(other.exps.iter()).all(|(a, b)| b <= a)
    }

    /// `∏ C(τ_i, κ_i)`: the multiplicity of `D_{τ-κ}` when `D_τ` is commuted
    /// past a jet partial derivative, and the Leibniz coefficient of
    /// `D_κ(f)·D_{τ-κ}` in `D_τ ∘ f`.
    pub fn binom_product(tau: &Self, kappa: &Self) -> Result<u64> {
        tau.same_dim(kappa)?;
        if !tau.contains(kappa) {
            return Err(JetError::NotContained {
                tau: tau.to_string(),
                kappa: kappa.to_string(),
            });
        }
        Ok(tau
            .as_slice()
            .iter()
            .zip(kappa.as_slice())
            .map(|(&t, &k)| binomial(t, k))
            .product())
    }

    /// All `κ ⊆ σ` in lexicographic order.
    pub fn sub_indices(&self) -> Vec<Self> {
        let mut out = vec![Self::zero(self.dim())];
        for i in 0..self.dim() {
            out = out
                .into_iter()
                .flat_map(|m| {
                    (0..=self.exps[i]).map(move |e| {
                        let mut m = m;
                        m.exps[i] = e;
                        m
                    })
                })
                .collect();
        }
        out.sort();
        out
    }

    /// Every multi-index in `n` variables with `|σ| ≤ max_order`, sorted.
    pub fn up_to_order(n: usize, max_order: u32) -> Vec<Self> {
        let mut bound = Self::zero(n);
        for e in bound.exps[..n].iter_mut() {
            *e = max_order;
        }
        bound
            .sub_indices()
            .into_iter()
            .filter(|m| m.order() <= max_order)
            .collect()
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(JetError::LengthMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

fn binomial(n: u32, k: u32) -> u64 {
    let k = k.min(n - k) as u64;
    let n = n as u64;
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, e) in self.as_slice().iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u32>::deserialize(d)?;
        MultiIndex::new(&v).map_err(serde::de::Error::custom)
    }
}
