use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::signature::{JetCoordinate, Signature};
use crate::error::{JetError, Result};
use crate::multiindex::MultiIndex;

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Product of coordinate powers, sorted by coordinate, exponents positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(SmallVec<[(JetCoordinate, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(c: JetCoordinate) -> Self {
        Self(smallvec::smallvec![(c, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (JetCoordinate, u32)>) -> Self {
        let mut m = Self::one();
        for (c, k) in powers {
            if k > 0 {
                m = m.mul(&Self(smallvec::smallvec![(c, k)]));
            }
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, k)| k).sum()
    }

    pub fn jet_order(&self) -> u32 {
        self.0.iter().map(|(c, _)| c.jet_order()).max().unwrap_or(0)
    }

    pub fn has_jets(&self) -> bool {
        self.0.iter().any(|(c, _)| c.is_jet())
    }

    pub fn powers(&self) -> &[(JetCoordinate, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Self(out)
    }

    /// Removes the factor at `pos` once: `m / c`.
    fn lower(&self, pos: usize) -> Self {
        let mut out = self.0.clone();
        if out[pos].1 == 1 {
            out.remove(pos);
        } else {
            out[pos].1 -= 1;
        }
        Self(out)
    }
}

/// Polynomial in jet coordinates, base variables and parameters with exact
/// rational coefficients, kept in canonical form.
#[derive(Clone)]
pub struct PolyExpr {
    sig: Arc<Signature>,
    terms: BTreeMap<Monomial, Rational>,
}

pub(crate) fn same_signature(a: &Arc<Signature>, b: &Arc<Signature>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn accumulate(terms: &mut BTreeMap<Monomial, Rational>, m: Monomial, q: Rational) {
    if q.is_zero() {
        return;
    }
    match terms.entry(m) {
        Entry::Vacant(e) => {
            e.insert(q);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += q;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl PolyExpr {
    pub fn zero(sig: &Arc<Signature>) -> Self {
        Self {
            sig: sig.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(sig: &Arc<Signature>, q: Rational) -> Self {
        Self::term(sig, Monomial::one(), q)
    }

    pub fn one(sig: &Arc<Signature>) -> Self {
        Self::constant(sig, Rational::one())
    }

    pub fn integer(sig: &Arc<Signature>, n: i64) -> Self {
        Self::constant(sig, rat(n))
    }

    pub fn term(sig: &Arc<Signature>, m: Monomial, q: Rational) -> Self {
        let mut e = Self::zero(sig);
        accumulate(&mut e.terms, m, q);
        e
    }

    /// A single coordinate, checked against the signature.
    pub fn coord(sig: &Arc<Signature>, c: JetCoordinate) -> Result<Self> {
        sig.check(&c)?;
        Ok(Self::term(sig, Monomial::var(c), Rational::one()))
    }

    pub fn base(sig: &Arc<Signature>, i: usize) -> Result<Self> {
        Self::coord(sig, JetCoordinate::base(i))
    }

    pub fn jet(sig: &Arc<Signature>, fiber: usize, sigma: &[u32]) -> Result<Self> {
        Self::coord(sig, JetCoordinate::jet(fiber, MultiIndex::new(sigma)?))
    }

    pub fn param(sig: &Arc<Signature>, name: &str) -> Result<Self> {
        let k = sig
            .param_index(name)
            .ok_or_else(|| JetError::Usage(format!("unknown parameter `{name}`")))?;
        Self::coord(sig, JetCoordinate::param(k))
    }

    /// Builds an expression from raw terms, validating every coordinate.
    pub fn from_terms(
        sig: &Arc<Signature>,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Result<Self> {
        let mut e = Self::zero(sig);
        for (m, q) in terms {
            for (c, _) in m.powers() {
                sig.check(c)?;
            }
            accumulate(&mut e.terms, m, q);
        }
        Ok(e)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The constant value, if the expression is a rational number.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    /// Maximum `|σ|` over jet coordinates present, 0 if none.
    pub fn jet_order(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::jet_order)
            .max()
            .unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn coordinates(&self) -> BTreeSet<JetCoordinate> {
        self.terms
            .keys()
            .flat_map(|m| m.powers().iter().map(|(c, _)| *c))
            .collect()
    }

    pub fn jet_coordinates(&self) -> BTreeSet<JetCoordinate> {
        self.coordinates()
            .into_iter()
            .filter(JetCoordinate::is_jet)
            .collect()
    }

    /// Terms free of jet coordinates (the non-homogeneous part).
    pub fn jet_free_part(&self) -> Self {
        self.filter_terms(|m| !m.has_jets())
    }

    /// Terms containing at least one jet coordinate.
    pub fn jet_dependent_part(&self) -> Self {
        self.filter_terms(Monomial::has_jets)
    }

    fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        Self {
            sig: self.sig.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, q)| (m.clone(), q.clone()))
                .collect(),
        }
    }

    fn check_sig(&self, other: &Self) -> Result<()> {
        if same_signature(&self.sig, &other.sig) {
            Ok(())
        } else {
            Err(JetError::SignatureMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_sig(other)?;
        let mut out = self.clone();
        for (m, q) in &other.terms {
            accumulate(&mut out.terms, m.clone(), q.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_sig(other)?;
        let mut out = self.clone();
        for (m, q) in &other.terms {
            accumulate(&mut out.terms, m.clone(), -q.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_sig(other)?;
        let mut out = Self::zero(&self.sig);
        for (ma, qa) in &self.terms {
            for (mb, qb) in &other.terms {
                accumulate(&mut out.terms, ma.mul(mb), qa * qb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero(&self.sig);
        }
        Self {
            sig: self.sig.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.sig);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative `∂e/∂c`.
    pub fn partial(&self, c: &JetCoordinate) -> Self {
        let mut out = Self::zero(&self.sig);
        for (m, q) in &self.terms {
            if let Ok(pos) = m.0.binary_search_by(|(v, _)| v.cmp(c)) {
                let k = m.0[pos].1;
                accumulate(&mut out.terms, m.lower(pos), q * rat(k as i64));
            }
        }
        out
    }

    /// Total derivative `D_i = ∂_{x^i} + Σ p^j_{τ+1_i} ∂_{p^j_τ}`.
    /// Parameters are constants and are annihilated.
    pub fn total_derivative(&self, i: usize) -> Self {
        assert!(i < self.sig.n(), "base index {i} out of range");
        let mut out = Self::zero(&self.sig);
        for (m, q) in &self.terms {
            for (pos, (c, k)) in m.0.iter().enumerate() {
                let factor = match c {
                    JetCoordinate::Param(_) => continue,
                    JetCoordinate::Base(b) if *b as usize != i => continue,
                    JetCoordinate::Base(_) => Monomial::one(),
                    JetCoordinate::Jet { fiber, sigma } => Monomial::var(JetCoordinate::Jet {
                        fiber: *fiber,
                        sigma: sigma.increment(i),
                    }),
                };
                accumulate(
                    &mut out.terms,
                    m.lower(pos).mul(&factor),
                    q * rat(*k as i64),
                );
            }
        }
        out
    }

    /// Iterated total derivative `D_σ`.
    pub fn total_derivative_multi(&self, sigma: &MultiIndex) -> Self {
        assert_eq!(sigma.dim(), self.sig.n(), "multi-index dimension mismatch");
        let mut e = self.clone();
        for (i, &k) in sigma.as_slice().iter().enumerate() {
            for _ in 0..k {
                if e.is_zero() {
                    return e;
                }
                e = e.total_derivative(i);
            }
        }
        e
    }

    pub fn evaluate(&self, point: &HashMap<JetCoordinate, Rational>) -> Result<Rational> {
        let mut total = Rational::zero();
        for (m, q) in &self.terms {
            let mut v = q.clone();
            for (c, k) in m.powers() {
                let x = point
                    .get(c)
                    .ok_or_else(|| JetError::Unassigned(self.sig.coord_name(c)))?;
                v *= num_traits::pow(x.clone(), *k as usize);
            }
            total += v;
        }
        Ok(total)
    }

    /// Replaces coordinates by expressions over the same signature;
    /// coordinates mapped to `None` are kept.
    pub fn substitute(&self, f: impl Fn(&JetCoordinate) -> Option<PolyExpr>) -> Result<Self> {
        let mut cache: HashMap<JetCoordinate, Option<PolyExpr>> = HashMap::new();
        let mut out = Self::zero(&self.sig);
        for (m, q) in &self.terms {
            let mut kept = Monomial::one();
            let mut prod = Self::constant(&self.sig, q.clone());
            for (c, k) in m.powers() {
                let sub = cache.entry(*c).or_insert_with(|| f(c));
                match sub {
                    Some(s) => {
                        s.check_sig(self)?;
                        prod = &prod * &s.pow(*k);
                    }
                    None => kept = kept.mul(&Monomial(smallvec::smallvec![(*c, *k)])),
                }
            }
            for (pm, pq) in prod.terms {
                accumulate(&mut out.terms, pm.mul(&kept), pq);
            }
        }
        Ok(out)
    }

    /// Re-expresses the polynomial over another signature with the same base
    /// and fiber variables; parameters are matched by name.
    pub fn embed(&self, target: &Arc<Signature>) -> Result<Self> {
        if self.sig.base_names() != target.base_names()
            || self.sig.fiber_names() != target.fiber_names()
        {
            return Err(JetError::SignatureMismatch);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, q)| {
                let powers =
                    m.powers()
                        .iter()
                        .map(|(c, k)| {
                            let c = match c {
                                JetCoordinate::Param(i) => {
                                    let name = &self.sig.param_names()[*i as usize];
                                    JetCoordinate::param(target.param_index(name).ok_or_else(
                                        || JetError::CoordinateOutOfRange(name.clone()),
                                    )?)
                                }
                                other => *other,
                            };
                            Ok((c, *k))
                        })
                        .collect::<Result<Vec<_>>>()?;
                Ok((Monomial::from_powers(powers), q.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(target, terms)
    }

    /// Terms in display order: higher jet order first, jet-free terms last,
    /// then higher degree.
    fn display_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            b.jet_order()
                .cmp(&a.jet_order())
                .then(b.has_jets().cmp(&a.has_jets()))
                .then(b.degree().cmp(&a.degree()))
                .then(b.cmp(a))
        });
        v
    }

    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, q)) in self.display_terms().into_iter().enumerate() {
            let neg = q.is_negative();
            match (k, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let a = q.abs();
            let mut parts = Vec::new();
            if m.is_one() || !a.is_one() {
                parts.push(latex_rational(&a));
            }
            for (c, e) in m.powers() {
                let name = self.sig.coord_latex(c);
                parts.push(if *e == 1 {
                    name
                } else {
                    format!("{name}^{{{e}}}")
                });
            }
            out.push_str(&parts.join(" "));
        }
        out
    }

    /// Number of terms a product would wrap in parentheses.
    pub(crate) fn needs_parens(&self) -> bool {
        self.terms.len() > 1
    }
}

pub(crate) fn latex_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", q.numer(), q.denom())
    }
}

impl fmt::Display for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, q)) in self.display_terms().into_iter().enumerate() {
            let neg = q.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = q.abs();
            let mut parts = Vec::new();
            if m.is_one() || !a.is_one() {
                parts.push(a.to_string());
            }
            for (c, e) in m.powers() {
                let name = self.sig.coord_name(c);
                parts.push(if *e == 1 { name } else { format!("{name}^{e}") });
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyExpr({self})")
    }
}

impl PartialEq for PolyExpr {
    fn eq(&self, other: &Self) -> bool {
        same_signature(&self.sig, &other.sig) && self.terms == other.terms
    }
}

impl Eq for PolyExpr {}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&PolyExpr> for &PolyExpr {
            type Output = PolyExpr;

            /// Panics when the operands carry different signatures; use the
            /// `try_` variant to get an error instead.
            fn $method(self, rhs: &PolyExpr) -> PolyExpr {
                self.$try(rhs)
                    .expect("operands must share a bundle signature")
            }
        }

        impl $trait<PolyExpr> for PolyExpr {
            type Output = PolyExpr;

            fn $method(self, rhs: PolyExpr) -> PolyExpr {
                (&self).$method(&rhs)
            }
        }

        impl $trait<&PolyExpr> for PolyExpr {
            type Output = PolyExpr;

            fn $method(self, rhs: &PolyExpr) -> PolyExpr {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &PolyExpr {
    type Output = PolyExpr;

    fn neg(self) -> PolyExpr {
        PolyExpr {
            sig: self.sig.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, q)| (m.clone(), -q.clone()))
                .collect(),
        }
    }
}

impl Neg for PolyExpr {
    type Output = PolyExpr;

    fn neg(self) -> PolyExpr {
        -&self
    }
}
