use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{JetError, Result};
use crate::multiindex::{MultiIndex, MAX_BASE_VARS};

/// A coordinate on `J^∞π`: a base variable `x^i`, a jet variable `p^j_σ`
/// (with `p^j_0 = u^j`), or a named constant parameter.
///
/// Indices are zero-based. The variant order fixes the factor order inside
/// printed monomials: parameters, then base variables, then jets.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum JetCoordinate {
    Param(u16),
    Base(u16),
    Jet { fiber: u16, sigma: MultiIndex },
}

impl JetCoordinate {
    pub fn base(i: usize) -> Self {
        Self::Base(i as u16)
    }

    pub fn jet(fiber: usize, sigma: MultiIndex) -> Self {
        Self::Jet {
            fiber: fiber as u16,
            sigma,
        }
    }

    pub fn param(k: usize) -> Self {
        Self::Param(k as u16)
    }

    /// Jet order `|σ|`; zero for base variables and parameters.
    pub fn jet_order(&self) -> u32 {
        match self {
            Self::Jet { sigma, .. } => sigma.order(),
            _ => 0,
        }
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Self::Jet { .. })
    }
}

/// Bundle signature: names of the `n` base variables, the `r` fiber
/// variables, and the constant parameters.
///
/// Every expression carries its signature; values over different signatures
/// never mix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    base: Vec<String>,
    fiber: Vec<String>,
    #[serde(default)]
    params: Vec<String>,
}

impl Signature {
    pub fn new<S: Into<String>>(
        base: impl IntoIterator<Item = S>,
        fiber: impl IntoIterator<Item = S>,
        params: impl IntoIterator<Item = S>,
    ) -> Result<Arc<Self>> {
        let sig = Self {
            base: base.into_iter().map(Into::into).collect(),
            fiber: fiber.into_iter().map(Into::into).collect(),
            params: params.into_iter().map(Into::into).collect(),
        };
        sig.validate()?;
        Ok(Arc::new(sig))
    }

    /// The same bundle with one more parameter.
    pub fn with_param(&self, name: &str) -> Result<Arc<Self>> {
        let mut params = self.params.clone();
        params.push(name.to_string());
        Self::new(self.base.clone(), self.fiber.clone(), params)
    }

    /// A parameter name not yet declared, starting from `stem`.
    pub fn fresh_name(&self, stem: &str) -> String {
        let taken = |n: &str| self.names().any(|m| m == n);
        if !taken(stem) {
            return stem.to_string();
        }
        (1..)
            .map(|k| format!("{stem}{k}"))
            .find(|n| !taken(n))
            .expect("unbounded search")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(JetError::InvalidSignature(m));
        if self.base.is_empty() || self.base.len() > MAX_BASE_VARS {
            return bad(format!(
                "need between 1 and {MAX_BASE_VARS} base variables, got {}",
                self.base.len()
            ));
        }
        if self.fiber.is_empty() {
            return bad("need at least one fiber variable".into());
        }
        let mut seen = std::collections::HashSet::new();
        for name in self.names() {
            let mut chars = name.chars();
            let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
                && chars.all(|c| c.is_ascii_alphanumeric());
            if !ok {
                return bad(format!("`{name}` is not a plain identifier"));
            }
            if !seen.insert(name) {
                return bad(format!("`{name}` declared twice"));
            }
        }
        Ok(())
    }

    fn names(&self) -> impl Iterator<Item = &str> {
        self.base
            .iter()
            .chain(&self.fiber)
            .chain(&self.params)
            .map(String::as_str)
    }

    /// Number of base variables `n`.
    pub fn n(&self) -> usize {
        self.base.len()
    }

    /// Number of fiber variables `r`.
    pub fn r(&self) -> usize {
        self.fiber.len()
    }

    pub fn base_names(&self) -> &[String] {
        &self.base
    }

    pub fn fiber_names(&self) -> &[String] {
        &self.fiber
    }

    pub fn param_names(&self) -> &[String] {
        &self.params
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p == name)
    }

    pub fn base_index(&self, name: &str) -> Option<usize> {
        self.base.iter().position(|p| p == name)
    }

    pub fn fiber_index(&self, name: &str) -> Option<usize> {
        self.fiber.iter().position(|p| p == name)
    }

    /// Jet variables print as `u_xxy` when every base name is one letter,
    /// and as `u[2,1]` otherwise.
    pub fn short_jet_names(&self) -> bool {
        self.base.iter().all(|b| b.len() == 1)
    }

    pub fn check(&self, c: &JetCoordinate) -> Result<()> {
        let ok = match c {
            JetCoordinate::Param(k) => (*k as usize) < self.params.len(),
            JetCoordinate::Base(i) => (*i as usize) < self.n(),
            JetCoordinate::Jet { fiber, sigma } => {
                (*fiber as usize) < self.r() && sigma.dim() == self.n()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(JetError::CoordinateOutOfRange(format!("{c:?}")))
        }
    }

    /// Every jet coordinate `p^j_σ` with `|σ| ≤ max_order`.
    pub fn jet_coordinates(&self, max_order: u32) -> Vec<JetCoordinate> {
        let sigmas = MultiIndex::up_to_order(self.n(), max_order);
        (0..self.r())
            .flat_map(|j| sigmas.iter().map(move |s| JetCoordinate::jet(j, *s)))
            .collect()
    }

    /// DSL spelling of a coordinate.
    pub fn coord_name(&self, c: &JetCoordinate) -> String {
        match c {
            JetCoordinate::Param(k) => self.params[*k as usize].clone(),
            JetCoordinate::Base(i) => self.base[*i as usize].clone(),
            JetCoordinate::Jet { fiber, sigma } => {
                let name = &self.fiber[*fiber as usize];
                if sigma.is_zero() {
                    name.clone()
                } else if self.short_jet_names() {
                    format!("{name}_{}", self.derivative_letters(sigma, ""))
                } else {
                    let idx: Vec<String> = sigma.as_slice().iter().map(u32::to_string).collect();
                    format!("{name}[{}]", idx.join(","))
                }
            }
        }
    }

    pub fn coord_latex(&self, c: &JetCoordinate) -> String {
        match c {
            JetCoordinate::Jet { fiber, sigma } if !sigma.is_zero() => {
                let sep = if self.short_jet_names() { "" } else { " " };
                format!(
                    "{}_{{{}}}",
                    self.fiber[*fiber as usize],
                    self.derivative_letters(sigma, sep)
                )
            }
            _ => self.coord_name(c),
        }
    }

    fn derivative_letters(&self, sigma: &MultiIndex, sep: &str) -> String {
        let mut parts = Vec::new();
        for (i, &e) in sigma.as_slice().iter().enumerate() {
            for _ in 0..e {
                parts.push(self.base[i].as_str());
            }
        }
        parts.join(sep)
    }

    /// Wire spelling: `x[i]` for base variables, `p[j]^(σ)` for jets (both
    /// one-based), and the bare name for parameters.
    pub fn coord_wire(&self, c: &JetCoordinate) -> String {
        match c {
            JetCoordinate::Param(k) => self.params[*k as usize].clone(),
            JetCoordinate::Base(i) => format!("x[{}]", i + 1),
            JetCoordinate::Jet { fiber, sigma } => format!("p[{}]^{}", fiber + 1, sigma),
        }
    }

    pub fn parse_coord_wire(&self, s: &str) -> Result<JetCoordinate> {
        let bad = || JetError::Json(format!("unrecognised coordinate `{s}`"));
        let index = |inner: &str| -> Result<usize> {
            let k: usize = inner.parse().map_err(|_| bad())?;
            k.checked_sub(1).ok_or_else(bad)
        };
        let c = if let Some(rest) = s.strip_prefix("x[") {
            JetCoordinate::base(index(rest.strip_suffix(']').ok_or_else(bad)?)?)
        } else if let Some(rest) = s.strip_prefix("p[") {
            let (fib, sig) = rest.split_once("]^(").ok_or_else(bad)?;
            let sig = sig.strip_suffix(')').ok_or_else(bad)?;
            let exps = sig
                .split(',')
                .map(|e| e.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            JetCoordinate::jet(index(fib)?, MultiIndex::new(&exps)?)
        } else {
            JetCoordinate::param(self.param_index(s).ok_or_else(bad)?)
        };
        self.check(&c)?;
        Ok(c)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "base {}; fiber {};",
            self.base.join(" "),
            self.fiber.join(" ")
        )?;
        if !self.params.is_empty() {
            write!(f, " param {};", self.params.join(" "))?;
        }
        Ok(())
    }
}
