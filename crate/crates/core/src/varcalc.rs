//! Universal linearization, evolutionary derivations, the higher Jacobi
//! bracket and the Hessian of non-linear differential operators.
//!
//! Coordinate conventions (`F_{p_ζ}` abbreviates `∂F/∂p^j_ζ`):
//!
//! * `ℓ_F` has entry `(i, j)` equal to `Σ_ζ ∂_{p^j_ζ}F_i · D_ζ`;
//! * `э_G(e) = Σ_{j,ζ} D_ζ(G_j) · ∂_{p^j_ζ} e`, so that `э_G F = ℓ_F G`;
//! * `{F, G} = ℓ_F G − ℓ_G F`;
//! * `Hess_F(G, H)_i = Σ ∂_{p^j_ζ}∂_{p^k_τ}F_i · D_ζ G_j · D_τ H_k`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::cdiff::CDiffOperator;
use crate::error::{JetError, Result};
use crate::multiindex::MultiIndex;
use crate::symexpr::{same_signature, JetCoordinate, PolyExpr, Rational, Signature};

/// A non-linear differential operator `F ∈ diff(π,π)`, one polynomial per
/// fiber component.
#[derive(Clone, PartialEq, Eq)]
pub struct VectorOperator {
    sig: Arc<Signature>,
    components: Vec<PolyExpr>,
}

impl VectorOperator {
    pub fn new(sig: &Arc<Signature>, components: Vec<PolyExpr>) -> Result<Self> {
        if components
            .iter()
            .any(|c| !same_signature(sig, c.signature()))
        {
            return Err(JetError::SignatureMismatch);
        }
        Ok(Self {
            sig: sig.clone(),
            components,
        })
    }

    pub fn zero(sig: &Arc<Signature>, rank: usize) -> Self {
        Self {
            sig: sig.clone(),
            components: vec![PolyExpr::zero(sig); rank],
        }
    }

    pub fn scalar(e: PolyExpr) -> Self {
        Self {
            sig: e.signature().clone(),
            components: vec![e],
        }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &PolyExpr {
        &self.components[i]
    }

    pub fn components(&self) -> &[PolyExpr] {
        &self.components
    }

    pub fn into_components(self) -> Vec<PolyExpr> {
        self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(PolyExpr::is_zero)
    }

    /// `max jet_order` over components.
    pub fn order(&self) -> u32 {
        self.components
            .iter()
            .map(PolyExpr::jet_order)
            .max()
            .unwrap_or(0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !same_signature(&self.sig, &other.sig) {
            return Err(JetError::SignatureMismatch);
        }
        if self.rank() != other.rank() {
            return Err(JetError::RankMismatch {
                expected: self.rank(),
                found: other.rank(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&PolyExpr, &PolyExpr) -> PolyExpr) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            sig: self.sig.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        self.map(|c| c.scale(q))
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c)
    }

    pub fn map(&self, f: impl FnMut(&PolyExpr) -> PolyExpr) -> Self {
        Self {
            sig: self.sig.clone(),
            components: self.components.iter().map(f).collect(),
        }
    }

    /// The jet-free (non-homogeneous) terms of each component.
    pub fn free_terms(&self) -> Self {
        self.map(PolyExpr::jet_free_part)
    }

    /// The operator with its jet-free terms removed.
    pub fn without_free_terms(&self) -> Self {
        self.map(PolyExpr::jet_dependent_part)
    }

    pub fn to_latex(&self) -> String {
        if self.rank() == 1 {
            return self.components[0].to_latex();
        }
        let parts: Vec<String> = self.components.iter().map(PolyExpr::to_latex).collect();
        format!(
            "\\begin{{pmatrix}} {} \\end{{pmatrix}}",
            parts.join(" \\\\ ")
        )
    }
}

impl fmt::Display for VectorOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rank() == 1 {
            return write!(f, "{}", self.components[0]);
        }
        let parts: Vec<String> = self.components.iter().map(PolyExpr::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Debug for VectorOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorOperator({self})")
    }
}

/// Checks that every operator lives on the same bundle and has `r`
/// components, as required for operators in `diff(π,π)`.
pub fn ensure_rank(ops: &[&VectorOperator]) -> Result<()> {
    let Some(first) = ops.first() else {
        return Ok(());
    };
    let r = first.sig.r();
    for op in ops {
        if !same_signature(&first.sig, &op.sig) {
            return Err(JetError::SignatureMismatch);
        }
        if op.rank() != r {
            return Err(JetError::RankMismatch {
                expected: r,
                found: op.rank(),
            });
        }
    }
    Ok(())
}

/// Memoised `D_σ(G_j)` for a fixed operator `G`.
struct Derivatives<'a> {
    g: &'a VectorOperator,
    cache: HashMap<(u16, MultiIndex), PolyExpr>,
}

impl<'a> Derivatives<'a> {
    fn new(g: &'a VectorOperator) -> Self {
        Self {
            g,
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, fiber: u16, sigma: MultiIndex) -> PolyExpr {
        if let Some(e) = self.cache.get(&(fiber, sigma)) {
            return e.clone();
        }
        let e = match (0..sigma.dim()).find(|&i| sigma.get(i) > 0) {
            None => self.g.component(fiber as usize).clone(),
            Some(i) => {
                let mut lower = sigma.as_slice().to_vec();
                lower[i] -= 1;
                let lower = MultiIndex::new(&lower).expect("same dimension");
                self.get(fiber, lower).total_derivative(i)
            }
        };
        self.cache.insert((fiber, sigma), e.clone());
        e
    }

    /// `э_G(e)`.
    fn evolve(&mut self, e: &PolyExpr) -> PolyExpr {
        let mut acc = PolyExpr::zero(e.signature());
        for c in e.jet_coordinates() {
            let JetCoordinate::Jet { fiber, sigma } = c else {
                unreachable!("jet_coordinates yields jets")
            };
            acc = &acc + &(&self.get(fiber, sigma) * &e.partial(&c));
        }
        acc
    }
}

/// The universal linearization `ℓ_F`.
pub fn linearize(f: &VectorOperator) -> CDiffOperator {
    let sig = f.signature();
    let mut op = CDiffOperator::zero(sig, f.rank(), sig.r());
    for (i, fi) in f.components().iter().enumerate() {
        for c in fi.jet_coordinates() {
            let JetCoordinate::Jet { fiber, sigma } = c else {
                unreachable!()
            };
            op.add_term(i, fiber as usize, sigma, fi.partial(&c));
        }
    }
    op
}

/// `э_G(e) = Σ_{j,σ} D_σ(G_j) · ∂_{p^j_σ}(e)`.
pub fn evolutionary_apply(g: &VectorOperator, e: &PolyExpr) -> Result<PolyExpr> {
    ensure_rank(&[g])?;
    if !same_signature(g.signature(), e.signature()) {
        return Err(JetError::SignatureMismatch);
    }
    Ok(Derivatives::new(g).evolve(e))
}

/// `э_G` applied componentwise; equals `ℓ_F G`.
pub fn evolutionary_apply_vec(g: &VectorOperator, f: &VectorOperator) -> Result<VectorOperator> {
    ensure_rank(&[g])?;
    if !same_signature(g.signature(), f.signature()) {
        return Err(JetError::SignatureMismatch);
    }
    let mut d = Derivatives::new(g);
    Ok(f.map(|c| d.evolve(c)))
}

/// `{F, G} = ℓ_F G − ℓ_G F`.
pub fn jacobi_bracket(f: &VectorOperator, g: &VectorOperator) -> Result<VectorOperator> {
    ensure_rank(&[f, g])?;
    linearize(f).apply(g)?.sub(&linearize(g).apply(f)?)
}

/// `{F,G}_i = Σ_{j,ζ} D_ζ(G_j)·∂_{p^j_ζ}F_i − D_ζ(F_j)·∂_{p^j_ζ}G_i`,
/// evaluated term by term without building `ℓ`.
pub fn jacobi_bracket_coord(f: &VectorOperator, g: &VectorOperator) -> Result<VectorOperator> {
    ensure_rank(&[f, g])?;
    let sig = f.signature();
    let half = |a: &PolyExpr, b: &VectorOperator| -> PolyExpr {
        let mut acc = PolyExpr::zero(sig);
        for c in a.jet_coordinates() {
            if let JetCoordinate::Jet { fiber, sigma } = c {
                let d = b.component(fiber as usize).total_derivative_multi(&sigma);
                acc = &acc + &(&d * &a.partial(&c));
            }
        }
        acc
    };
    let comps = (0..f.rank())
        .map(|i| &half(f.component(i), g) - &half(g.component(i), f))
        .collect();
    VectorOperator::new(sig, comps)
}

/// The Hessian as a trilinear form, `Hess_F(G, H)`.
pub fn hessian_form(
    f: &VectorOperator,
    g: &VectorOperator,
    h: &VectorOperator,
) -> Result<VectorOperator> {
    ensure_rank(&[f, g, h])?;
    let mut dg = Derivatives::new(g);
    let mut dh = Derivatives::new(h);
    let comps = f
        .components()
        .iter()
        .map(|fi| {
            let mut acc = PolyExpr::zero(f.signature());
            let coords = fi.jet_coordinates();
            for a in &coords {
                let fa = fi.partial(a);
                if fa.is_zero() {
                    continue;
                }
                let JetCoordinate::Jet {
                    fiber: j,
                    sigma: zeta,
                } = *a
                else {
                    unreachable!()
                };
                for b in &coords {
                    let fab = fa.partial(b);
                    if fab.is_zero() {
                        continue;
                    }
                    let JetCoordinate::Jet {
                        fiber: k,
                        sigma: tau,
                    } = *b
                    else {
                        unreachable!()
                    };
                    acc = &acc + &(&fab * &(&dg.get(j, zeta) * &dh.get(k, tau)));
                }
            }
            acc
        })
        .collect();
    VectorOperator::new(f.signature(), comps)
}

/// The Hessian operator `Hess_F G = [э_G, ℓ_F]`: the C-differential
/// operator whose coefficient at `D_σ^{[j]}` in row `i` is
/// `э_G(∂_{p^j_σ}F_i)`.
pub fn hessian_operator(f: &VectorOperator, g: &VectorOperator) -> Result<CDiffOperator> {
    ensure_rank(&[f, g])?;
    let sig = f.signature();
    let lin = linearize(f);
    let mut d = Derivatives::new(g);
    let mut op = CDiffOperator::zero(sig, f.rank(), sig.r());
    for i in 0..f.rank() {
        for j in 0..sig.r() {
            for (sigma, coeff) in lin.entry(i, j) {
                op.add_term(i, j, *sigma, d.evolve(coeff));
            }
        }
    }
    Ok(op)
}

/// `ad_H(G) = {H, G}`.
pub fn ad_apply(h: &VectorOperator, g: &VectorOperator) -> Result<VectorOperator> {
    jacobi_bracket(h, g)
}
