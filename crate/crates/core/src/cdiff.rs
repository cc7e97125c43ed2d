//! The algebra `𝒞Diff(π,π)` of C-differential operators: matrices whose
//! entries are finite sums `Σ a_σ D_σ` with jet-space coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Signed;

use crate::error::{JetError, Result};
use crate::multiindex::MultiIndex;
use crate::symexpr::{latex_rational, rat, same_signature, PolyExpr, Rational, Signature};
use crate::varcalc::VectorOperator;

type Entry = BTreeMap<MultiIndex, PolyExpr>;

/// An `rows × cols` matrix of total-derivative operators.
///
/// Entry `(i, j)` stores the coefficient `a^{ij}_σ` of `D_σ^{[j]}` for each
/// multi-index with a nonzero coefficient, so operator equality is equality
/// of the coefficient maps.
#[derive(Clone)]
pub struct CDiffOperator {
    sig: Arc<Signature>,
    rows: usize,
    cols: usize,
    entries: Vec<Entry>,
}

fn add_into(entry: &mut Entry, sigma: MultiIndex, coeff: PolyExpr) {
    if coeff.is_zero() {
        return;
    }
    match entry.get_mut(&sigma) {
        Some(existing) => {
            *existing = &*existing + &coeff;
            if existing.is_zero() {
                entry.remove(&sigma);
            }
        }
        None => {
            entry.insert(sigma, coeff);
        }
    }
}

impl CDiffOperator {
    pub fn zero(sig: &Arc<Signature>, rows: usize, cols: usize) -> Self {
        Self {
            sig: sig.clone(),
            rows,
            cols,
            entries: vec![Entry::new(); rows * cols],
        }
    }

    pub fn identity(sig: &Arc<Signature>, r: usize) -> Self {
        Self::scalar_diagonal(sig, r, MultiIndex::zero(sig.n()))
    }

    /// `D_σ` acting on each of the `r` components.
    pub fn scalar_diagonal(sig: &Arc<Signature>, r: usize, sigma: MultiIndex) -> Self {
        let mut op = Self::zero(sig, r, r);
        for i in 0..r {
            op.add_term(i, i, sigma, PolyExpr::one(sig));
        }
        op
    }

    /// Builds an operator from `(i, j, σ, coefficient)` terms; repeated
    /// positions are summed.
    pub fn from_terms(
        sig: &Arc<Signature>,
        rows: usize,
        cols: usize,
        terms: impl IntoIterator<Item = (usize, usize, MultiIndex, PolyExpr)>,
    ) -> Result<Self> {
        let mut op = Self::zero(sig, rows, cols);
        for (i, j, sigma, coeff) in terms {
            if i >= rows || j >= cols {
                return Err(JetError::ShapeMismatch {
                    op: "from_terms",
                    expected: format!("entry inside {rows}x{cols}"),
                    found: format!("({i}, {j})"),
                });
            }
            if !same_signature(sig, coeff.signature()) {
                return Err(JetError::SignatureMismatch);
            }
            if sigma.dim() != sig.n() {
                return Err(JetError::LengthMismatch {
                    left: sig.n(),
                    right: sigma.dim(),
                });
            }
            op.add_term(i, j, sigma, coeff);
        }
        Ok(op)
    }

    pub(crate) fn add_term(&mut self, i: usize, j: usize, sigma: MultiIndex, coeff: PolyExpr) {
        let k = i * self.cols + j;
        add_into(&mut self.entries[k], sigma, coeff);
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entry(&self, i: usize, j: usize) -> &BTreeMap<MultiIndex, PolyExpr> {
        &self.entries[i * self.cols + j]
    }

    /// Coefficient of `D_σ^{[j]}` in row `i` (zero when absent).
    pub fn coeff(&self, i: usize, j: usize, sigma: &MultiIndex) -> PolyExpr {
        self.entry(i, j)
            .get(sigma)
            .cloned()
            .unwrap_or_else(|| PolyExpr::zero(&self.sig))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(BTreeMap::is_empty)
    }

    /// `max |σ|` over stored terms.
    pub fn order(&self) -> u32 {
        self.entries
            .iter()
            .flat_map(|e| e.keys().map(MultiIndex::order))
            .max()
            .unwrap_or(0)
    }

    fn check_sig(&self, other_sig: &Arc<Signature>) -> Result<()> {
        if same_signature(&self.sig, other_sig) {
            Ok(())
        } else {
            Err(JetError::SignatureMismatch)
        }
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        self.check_sig(&other.sig)?;
        if self.shape() != other.shape() {
            return Err(JetError::ShapeMismatch {
                op,
                expected: format!("{}x{}", self.rows, self.cols),
                found: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(())
    }

    /// `(Θg)_i = Σ_{j,σ} a^{ij}_σ · D_σ(g_j)`.
    pub fn apply(&self, g: &VectorOperator) -> Result<VectorOperator> {
        self.check_sig(g.signature())?;
        if g.rank() != self.cols {
            return Err(JetError::ShapeMismatch {
                op: "apply",
                expected: format!("{} components", self.cols),
                found: format!("{} components", g.rank()),
            });
        }
        let mut derived: Vec<BTreeMap<MultiIndex, PolyExpr>> = vec![BTreeMap::new(); self.cols];
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = PolyExpr::zero(&self.sig);
            for (j, cache) in derived.iter_mut().enumerate() {
                for (sigma, a) in self.entry(i, j) {
                    let dg = cache
                        .entry(*sigma)
                        .or_insert_with(|| g.component(j).total_derivative_multi(sigma));
                    acc = &acc + &(a * &*dg);
                }
            }
            out.push(acc);
        }
        VectorOperator::new(&self.sig, out)
    }

    /// `a ∘ b`, expanded with `D_σ ∘ f = Σ_{κ⊆σ} C(σ,κ) D_κ(f) D_{σ-κ}`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_sig(&other.sig)?;
        if self.cols != other.rows {
            return Err(JetError::ShapeMismatch {
                op: "compose",
                expected: format!("{} rows on the right", self.cols),
                found: format!("{}", other.rows),
            });
        }
        let mut out = Self::zero(&self.sig, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..other.cols {
                let mut entry = Entry::new();
                for j in 0..self.cols {
                    for (sigma, alpha) in self.entry(i, j) {
                        let kappas = sigma.sub_indices();
                        for (tau, beta) in other.entry(j, k) {
                            for kappa in &kappas {
                                let mult = MultiIndex::binom_product(sigma, kappa)
                                    .expect("κ enumerated inside σ");
                                let rest = sigma.checked_sub(kappa).expect("κ ⊆ σ");
                                let coeff = (alpha * &beta.total_derivative_multi(kappa))
                                    .scale(&rat(mult as i64));
                                add_into(&mut entry, rest.plus(tau), coeff);
                            }
                        }
                    }
                }
                out.entries[i * other.cols + k] = entry;
            }
        }
        Ok(out)
    }

    /// `[a, b] = a∘b − b∘a`; both operators must be square of equal size.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "commutator")?;
        if self.rows != self.cols {
            return Err(JetError::ShapeMismatch {
                op: "commutator",
                expected: "a square operator".into(),
                found: format!("{}x{}", self.rows, self.cols),
            });
        }
        self.compose(other)?.sub(&other.compose(self)?)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        let mut out = self.clone();
        for (k, e) in other.entries.iter().enumerate() {
            for (sigma, a) in e {
                add_into(&mut out.entries[k], *sigma, a.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.negate())
    }

    pub fn negate(&self) -> Self {
        self.scale(&rat(-1))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let mut out = Self::zero(&self.sig, self.rows, self.cols);
        for (k, e) in self.entries.iter().enumerate() {
            for (sigma, a) in e {
                add_into(&mut out.entries[k], *sigma, a.scale(q));
            }
        }
        out
    }

    /// Multiplies every coefficient by `f` on the left.
    pub fn left_mul(&self, f: &PolyExpr) -> Result<Self> {
        self.check_sig(f.signature())?;
        let mut out = Self::zero(&self.sig, self.rows, self.cols);
        for (k, e) in self.entries.iter().enumerate() {
            for (sigma, a) in e {
                add_into(&mut out.entries[k], *sigma, f * a);
            }
        }
        Ok(out)
    }

    fn derivative_name(&self, sigma: &MultiIndex) -> String {
        if self.sig.short_jet_names() {
            let mut s = String::from("D_");
            for (i, &e) in sigma.as_slice().iter().enumerate() {
                for _ in 0..e {
                    s.push_str(&self.sig.base_names()[i]);
                }
            }
            s
        } else {
            let idx: Vec<String> = sigma.as_slice().iter().map(u32::to_string).collect();
            format!("D[{}]", idx.join(","))
        }
    }

    /// Terms of an entry in print order: highest derivatives first.
    fn ordered(entry: &Entry) -> impl Iterator<Item = (&MultiIndex, &PolyExpr)> {
        let mut v: Vec<_> = entry.iter().collect();
        v.sort_by(|(a, _), (b, _)| b.order().cmp(&a.order()).then(b.cmp(a)));
        v.into_iter()
    }

    fn entry_text(&self, entry: &Entry) -> String {
        if entry.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (sigma, a)) in Self::ordered(entry).enumerate() {
            let (neg, body) = signed_coefficient(a);
            let text = if sigma.is_zero() {
                body.to_string()
            } else {
                let d = self.derivative_name(sigma);
                match body.as_constant() {
                    Some(q) if q == rat(1) => d,
                    _ if body.needs_parens() => format!("({body})*{d}"),
                    _ => format!("{body}*{d}"),
                }
            };
            push_signed(&mut out, k, neg, &text);
        }
        out
    }

    fn entry_latex(&self, entry: &Entry) -> String {
        if entry.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (sigma, a)) in Self::ordered(entry).enumerate() {
            let (neg, body) = signed_coefficient(a);
            let text = if sigma.is_zero() {
                body.to_latex()
            } else {
                let d = format!("\\mathcal{{D}}_{{{sigma}}}");
                match body.as_constant() {
                    Some(q) if q == rat(1) => d,
                    Some(q) => format!("{} {d}", latex_rational(&q)),
                    None if body.needs_parens() => {
                        format!("\\left({}\\right) {d}", body.to_latex())
                    }
                    None => format!("{} {d}", body.to_latex()),
                }
            };
            push_signed(&mut out, k, neg, &text);
        }
        out
    }

    pub fn to_latex(&self) -> String {
        if self.rows == 1 && self.cols == 1 {
            return self.entry_latex(&self.entries[0]);
        }
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.entry_latex(self.entry(i, j)))
                    .collect::<Vec<_>>()
                    .join(" & ")
            })
            .collect();
        format!(
            "\\begin{{pmatrix}} {} \\end{{pmatrix}}",
            rows.join(" \\\\ ")
        )
    }
}

/// Splits a single negative term's sign off so sums print as `a - b`.
fn signed_coefficient(a: &PolyExpr) -> (bool, PolyExpr) {
    if a.num_terms() == 1 && a.terms().next().is_some_and(|(_, q)| q.is_negative()) {
        (true, -a)
    } else {
        (false, a.clone())
    }
}

fn push_signed(out: &mut String, k: usize, neg: bool, text: &str) {
    match (k, neg) {
        (0, true) => out.push('-'),
        (0, false) => {}
        (_, true) => out.push_str(" - "),
        (_, false) => out.push_str(" + "),
    }
    out.push_str(text);
}

impl fmt::Display for CDiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows == 1 && self.cols == 1 {
            return f.write_str(&self.entry_text(&self.entries[0]));
        }
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let cells: Vec<String> = (0..self.cols)
                    .map(|j| self.entry_text(self.entry(i, j)))
                    .collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl fmt::Debug for CDiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CDiffOperator({self})")
    }
}

impl PartialEq for CDiffOperator {
    fn eq(&self, other: &Self) -> bool {
        same_signature(&self.sig, &other.sig)
            && self.shape() == other.shape()
            && self.entries == other.entries
    }
}

impl Eq for CDiffOperator {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{random_expr, RandomExprConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct Scalar {
        sig: Arc<Signature>,
        p1: PolyExpr,
        p2: PolyExpr,
        u: PolyExpr,
        dx: CDiffOperator,
    }

    fn scalar() -> Scalar {
        let sig = Signature::new(["x"], ["u"], ["c"]).unwrap();
        Scalar {
            p1: PolyExpr::jet(&sig, 0, &[1]).unwrap(),
            p2: PolyExpr::jet(&sig, 0, &[2]).unwrap(),
            u: PolyExpr::jet(&sig, 0, &[0]).unwrap(),
            dx: CDiffOperator::scalar_diagonal(&sig, 1, MultiIndex::unit(1, 0)),
            sig,
        }
    }

    fn d(s: &Scalar, k: u32) -> CDiffOperator {
        CDiffOperator::scalar_diagonal(&s.sig, 1, MultiIndex::new(&[k]).unwrap())
    }

    fn mul(op: &CDiffOperator, f: &PolyExpr) -> CDiffOperator {
        op.left_mul(f).unwrap()
    }

    fn vec1(e: PolyExpr) -> VectorOperator {
        VectorOperator::new(&e.signature().clone(), vec![e]).unwrap()
    }

    #[test]
    fn apply_examples() {
        let s = scalar();
        let c = PolyExpr::param(&s.sig, "c").unwrap();
        let x = PolyExpr::base(&s.sig, 0).unwrap();
        let g = vec1(&s.p1 + &(&c * &x));
        let two_p = s.p1.scale(&rat(2));
        let out = mul(&s.dx, &two_p).apply(&g).unwrap();
        assert_eq!(out.component(0), &(&two_p * &(&s.p2 + &c)));
        assert_eq!(CDiffOperator::identity(&s.sig, 1).apply(&g).unwrap(), g);
        assert!(CDiffOperator::zero(&s.sig, 1, 1)
            .apply(&g)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn compose_examples() {
        let s = scalar();
        let two_p = s.p1.scale(&rat(2));
        assert_eq!(s.dx.compose(&s.dx).unwrap(), d(&s, 2));
        assert_eq!(
            mul(&s.dx, &two_p).compose(&s.dx).unwrap(),
            mul(&d(&s, 2), &two_p)
        );
        let expected = mul(&d(&s, 2), &two_p)
            .add(&mul(&s.dx, &s.p2.scale(&rat(2))))
            .unwrap();
        assert_eq!(s.dx.compose(&mul(&s.dx, &two_p)).unwrap(), expected);
    }

    #[test]
    fn commutator_examples() {
        let s = scalar();
        let l_f = mul(&s.dx, &s.p1.scale(&rat(2)));
        assert_eq!(
            l_f.commutator(&s.dx).unwrap(),
            mul(&s.dx, &s.p2.scale(&rat(-2)))
        );
        assert!(l_f.commutator(&l_f).unwrap().is_zero());
        let u_id = mul(&CDiffOperator::identity(&s.sig, 1), &s.u);
        assert_eq!(
            s.dx.commutator(&u_id).unwrap(),
            mul(&CDiffOperator::identity(&s.sig, 1), &s.p1)
        );
    }

    #[test]
    fn linear_structure() {
        let s = scalar();
        let op = mul(&s.dx, &s.p1);
        let zero = CDiffOperator::zero(&s.sig, 1, 1);
        assert_eq!(op.add(&zero).unwrap(), op);
        assert!(op.sub(&op).unwrap().is_zero());
        assert_eq!(op.scale(&rat(2)), mul(&s.dx, &s.p1.scale(&rat(2))));
        assert!(op.add(&CDiffOperator::zero(&s.sig, 2, 2)).is_err());
    }

    #[test]
    fn shape_errors() {
        let s = scalar();
        let rect = CDiffOperator::zero(&s.sig, 2, 1);
        assert!(matches!(
            rect.commutator(&rect),
            Err(JetError::ShapeMismatch { .. })
        ));
        assert!(s.dx.compose(&rect).is_err());
        assert!(rect.apply(&VectorOperator::zero(&s.sig, 2)).is_err());
        // Non-square shapes compose and apply fine.
        let col = rect.compose(&s.dx).unwrap();
        assert_eq!(col.shape(), (2, 1));
    }

    #[test]
    fn printing() {
        let s = scalar();
        let c = PolyExpr::param(&s.sig, "c").unwrap();
        let op = mul(&s.dx, &(&s.p2 + &c).scale(&rat(-2)));
        assert_eq!(op.to_string(), "(-2*u_xx - 2*c)*D_x");
        let op = mul(&s.dx, &s.p2.scale(&rat(-2))).add(&d(&s, 2)).unwrap();
        assert_eq!(op.to_string(), "D_xx - 2*u_xx*D_x");
        assert_eq!(
            op.to_latex(),
            "\\mathcal{D}_{(2)} - 2 u_{xx} \\mathcal{D}_{(1)}"
        );
        let id = CDiffOperator::identity(&s.sig, 2);
        assert_eq!(id.to_string(), "[[1, 0], [0, 1]]");
        assert_eq!(
            id.to_latex(),
            "\\begin{pmatrix} 1 & 0 \\\\ 0 & 1 \\end{pmatrix}"
        );
    }

    fn random_operator(rng: &mut ChaCha8Rng, sig: &Arc<Signature>, r: usize) -> CDiffOperator {
        let cfg = RandomExprConfig {
            max_terms: 2,
            ..Default::default()
        };
        let sigmas = MultiIndex::up_to_order(sig.n(), 2);
        let mut terms = Vec::new();
        for i in 0..r {
            for j in 0..r {
                for _ in 0..rng.random_range(0..3) {
                    let sigma = sigmas[rng.random_range(0..sigmas.len())];
                    terms.push((i, j, sigma, random_expr(rng, sig, &cfg)));
                }
            }
        }
        CDiffOperator::from_terms(sig, r, r, terms).unwrap()
    }

    fn random_vector(rng: &mut ChaCha8Rng, sig: &Arc<Signature>, r: usize) -> VectorOperator {
        let comps = (0..r)
            .map(|_| random_expr(rng, sig, &RandomExprConfig::default()))
            .collect();
        VectorOperator::new(sig, comps).unwrap()
    }

    #[test]
    fn compose_is_apply_homomorphism() {
        for seed in 0..40u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 1 + (seed as usize % 2);
            let r = 1 + (seed as usize / 2 % 2);
            let bases: Vec<&str> = ["x", "y"][..n].to_vec();
            let fibers: Vec<&str> = ["u", "v"][..r].to_vec();
            let sig = Signature::new(bases, fibers, vec!["c"]).unwrap();
            let a = random_operator(&mut rng, &sig, r);
            let b = random_operator(&mut rng, &sig, r);
            let g = random_vector(&mut rng, &sig, r);
            let lhs = a.compose(&b).unwrap().apply(&g).unwrap();
            let rhs = a.apply(&b.apply(&g).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "seed {seed}");
        }
    }

    #[test]
    fn commutator_jacobi_identity() {
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let r = 1 + (seed as usize % 2);
            let fibers: Vec<&str> = ["u", "v"][..r].to_vec();
            let sig = Signature::new(vec!["x"], fibers, vec!["c"]).unwrap();
            let a = random_operator(&mut rng, &sig, r);
            let b = random_operator(&mut rng, &sig, r);
            let c = random_operator(&mut rng, &sig, r);
            let cyc = a
                .commutator(&b.commutator(&c).unwrap())
                .unwrap()
                .add(&b.commutator(&c.commutator(&a).unwrap()).unwrap())
                .unwrap()
                .add(&c.commutator(&a.commutator(&b).unwrap()).unwrap())
                .unwrap();
            assert!(cyc.is_zero(), "seed {seed}");
        }
    }

    // Distinct canonical forms act differently on some monomial probe p^j_σ.
    #[test]
    fn canonical_forms_separate_actions() {
        for seed in 0..30u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
            let sig = Signature::new(["x", "y"], ["u", "v"], ["c"]).unwrap();
            let a = random_operator(&mut rng, &sig, 2);
            let b = random_operator(&mut rng, &sig, 2);
            if a == b {
                continue;
            }
            let separated = sig.jet_coordinates(3).into_iter().any(|c| {
                let mut comps = vec![PolyExpr::zero(&sig); 2];
                let crate::symexpr::JetCoordinate::Jet { fiber, .. } = c else {
                    unreachable!()
                };
                comps[fiber as usize] = PolyExpr::coord(&sig, c).unwrap();
                let probe = VectorOperator::new(&sig, comps).unwrap();
                a.apply(&probe).unwrap() != b.apply(&probe).unwrap()
            });
            assert!(separated, "seed {seed}: {a} vs {b}");
        }
    }
}
