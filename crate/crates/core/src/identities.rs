//! Executable checks of the identities relating `ℓ`, `э`, `{,}` and `Hess`.
//!
//! Every check computes an exact [`Residual`]: the defect of the identity on
//! concrete operators. The identity holds on those inputs exactly when the
//! residual is zero in canonical form.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cdiff::CDiffOperator;
use crate::error::{JetError, Result};
use crate::multiindex::MultiIndex;
use crate::symexpr::{random_expr, rat, JetCoordinate, PolyExpr, RandomExprConfig, Signature};
use crate::varcalc::{
    ad_apply, ensure_rank, evolutionary_apply, hessian_form, hessian_operator, jacobi_bracket,
    jacobi_bracket_coord, linearize, VectorOperator,
};

/// The exact defect of an identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResidualValue {
    Vector(VectorOperator),
    Operator(CDiffOperator),
    /// One scalar defect per probe.
    Scalars(Vec<PolyExpr>),
}

impl ResidualValue {
    pub fn is_zero(&self) -> bool {
        match self {
            Self::Vector(v) => v.is_zero(),
            Self::Operator(o) => o.is_zero(),
            Self::Scalars(s) => s.iter().all(PolyExpr::is_zero),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Self::Vector(v) => json!(v.to_json()),
            Self::Operator(o) => json!(o.to_json()),
            Self::Scalars(s) => json!(s.iter().map(PolyExpr::to_json).collect::<Vec<_>>()),
        }
    }

    pub fn to_latex(&self) -> String {
        match self {
            Self::Vector(v) => v.to_latex(),
            Self::Operator(o) => o.to_latex(),
            Self::Scalars(s) => s
                .iter()
                .map(PolyExpr::to_latex)
                .collect::<Vec<_>>()
                .join(",\\ "),
        }
    }
}

impl fmt::Display for ResidualValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Vector(v) => write!(f, "{v}"),
            Self::Operator(o) => write!(f, "{o}"),
            Self::Scalars(s) => {
                let parts: Vec<String> = s.iter().map(PolyExpr::to_string).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

/// A named input recorded with a residual so that failures can be replayed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Operator(VectorOperator),
    Expr(PolyExpr),
    Index(MultiIndex),
    Fiber(usize),
}

impl Input {
    fn to_json(&self) -> Value {
        match self {
            Self::Operator(v) => json!(v.to_json()),
            Self::Expr(e) => json!(e.to_json()),
            Self::Index(m) => json!(m),
            Self::Fiber(j) => json!(j),
        }
    }

    fn text(&self) -> String {
        match self {
            Self::Operator(v) => v.to_string(),
            Self::Expr(e) => e.to_string(),
            Self::Index(m) => m.to_string(),
            Self::Fiber(j) => j.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub identity: String,
    pub value: ResidualValue,
    pub holds: bool,
    pub signature: Arc<Signature>,
    pub inputs: Vec<(String, Input)>,
}

impl Residual {
    pub fn new(
        identity: &str,
        value: ResidualValue,
        signature: &Arc<Signature>,
        inputs: Vec<(&str, Input)>,
    ) -> Self {
        Self {
            identity: identity.to_string(),
            holds: value.is_zero(),
            value,
            signature: signature.clone(),
            inputs: inputs
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }

    /// Inputs in DSL text form.
    pub fn context(&self) -> Vec<(String, String)> {
        self.inputs
            .iter()
            .map(|(k, v)| (k.clone(), v.text()))
            .collect()
    }

    /// Signature plus inputs in wire form, enough to replay the check.
    pub fn fixture(&self) -> Value {
        let inputs: serde_json::Map<String, Value> = self
            .inputs
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        json!({
            "identity": self.identity,
            "signature": &*self.signature,
            "inputs": inputs,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "identity": self.identity,
            "holds": self.holds,
            "residual": self.value.to_string(),
            "residual_json": self.value.to_json(),
            "fixture": self.fixture(),
        })
    }
}

fn op<'a>(name: &'a str, v: &VectorOperator) -> (&'a str, Input) {
    (name, Input::Operator(v.clone()))
}

/// `Hess_F(G,H) − Hess_F(H,G)`.
pub fn check_hessian_symmetry(
    f: &VectorOperator,
    g: &VectorOperator,
    h: &VectorOperator,
) -> Result<Residual> {
    let value = hessian_form(f, g, h)?.sub(&hessian_form(f, h, g)?)?;
    Ok(Residual::new(
        "hess-sym",
        ResidualValue::Vector(value),
        f.signature(),
        vec![op("f", f), op("g", g), op("h", h)],
    ))
}

/// `(Hess_F G)(H) − Hess_F(G,H)`: the operator form against the trilinear form.
pub fn check_hessian_double_definition(
    f: &VectorOperator,
    g: &VectorOperator,
    h: &VectorOperator,
) -> Result<Residual> {
    let value = hessian_operator(f, g)?
        .apply(h)?
        .sub(&hessian_form(f, g, h)?)?;
    Ok(Residual::new(
        "hess-double",
        ResidualValue::Vector(value),
        f.signature(),
        vec![op("f", f), op("g", g), op("h", h)],
    ))
}

/// The linearization anomaly applied to `h`:
/// `([ℓ_F,ℓ_G] − ℓ_{{F,G}})(H) − (Hess_G(F,H) − Hess_F(G,H))`.
pub fn check_prop2(f: &VectorOperator, g: &VectorOperator, h: &VectorOperator) -> Result<Residual> {
    ensure_rank(&[f, g, h])?;
    let anomaly = linearize(f)
        .commutator(&linearize(g))?
        .sub(&linearize(&jacobi_bracket(f, g)?))?;
    let lhs = anomaly.apply(h)?;
    let rhs = hessian_form(g, f, h)?.sub(&hessian_form(f, g, h)?)?;
    Ok(Residual::new(
        "prop2",
        ResidualValue::Vector(lhs.sub(&rhs)?),
        f.signature(),
        vec![op("f", f), op("g", g), op("h", h)],
    ))
}

/// The linearization anomaly as an operator identity:
/// `[ℓ_F,ℓ_G] − ℓ_{{F,G}} − (Hess_G F − Hess_F G)`.
pub fn check_prop2_operator(f: &VectorOperator, g: &VectorOperator) -> Result<Residual> {
    let (lhs, rhs) = anomaly_sides(f, g)?;
    Ok(Residual::new(
        "prop2-operator",
        ResidualValue::Operator(lhs.sub(&rhs)?),
        f.signature(),
        vec![op("f", f), op("g", g)],
    ))
}

/// Both sides of the anomaly: `[ℓ_F,ℓ_G] − ℓ_{{F,G}}` and
/// `Hess_G F − Hess_F G`.
pub fn anomaly_sides(
    f: &VectorOperator,
    g: &VectorOperator,
) -> Result<(CDiffOperator, CDiffOperator)> {
    ensure_rank(&[f, g])?;
    let lhs = linearize(f)
        .commutator(&linearize(g))?
        .sub(&linearize(&jacobi_bracket(f, g)?))?;
    let rhs = hessian_operator(g, f)?.sub(&hessian_operator(f, g)?)?;
    Ok((lhs, rhs))
}

/// The compensated Leibniz rule:
/// `{F, ℓ_G H} − ℓ_{{F,G}} H − ℓ_G {F,H} + Hess_F(G,H)`.
pub fn check_prop3(f: &VectorOperator, g: &VectorOperator, h: &VectorOperator) -> Result<Residual> {
    ensure_rank(&[f, g, h])?;
    let lg = linearize(g);
    let value = jacobi_bracket(f, &lg.apply(h)?)?
        .sub(&linearize(&jacobi_bracket(f, g)?).apply(h)?)?
        .sub(&lg.apply(&jacobi_bracket(f, h)?)?)?
        .add(&hessian_form(f, g, h)?)?;
    Ok(Residual::new(
        "prop3",
        ResidualValue::Vector(value),
        f.signature(),
        vec![op("f", f), op("g", g), op("h", h)],
    ))
}

/// `{F,{G,H}} + {G,{H,F}} + {H,{F,G}}`.
pub fn check_jacobi_identity(
    f: &VectorOperator,
    g: &VectorOperator,
    h: &VectorOperator,
) -> Result<Residual> {
    let value = jacobi_bracket(f, &jacobi_bracket(g, h)?)?
        .add(&jacobi_bracket(g, &jacobi_bracket(h, f)?)?)?
        .add(&jacobi_bracket(h, &jacobi_bracket(f, g)?)?)?;
    Ok(Residual::new(
        "jacobi",
        ResidualValue::Vector(value),
        f.signature(),
        vec![op("f", f), op("g", g), op("h", h)],
    ))
}

/// `э_F(э_G e) − э_G(э_F e) + э_{{F,G}}(e)` for every probe `e`.
pub fn check_evolutionary_antihom(
    f: &VectorOperator,
    g: &VectorOperator,
    probes: &[PolyExpr],
) -> Result<Residual> {
    if probes.is_empty() {
        return Err(JetError::Usage("the probe set is empty".into()));
    }
    ensure_rank(&[f, g])?;
    let fg = jacobi_bracket(f, g)?;
    let defects = probes
        .iter()
        .map(|e| {
            let a = evolutionary_apply(f, &evolutionary_apply(g, e)?)?;
            let b = evolutionary_apply(g, &evolutionary_apply(f, e)?)?;
            Ok(&(&a - &b) + &evolutionary_apply(&fg, e)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut inputs = vec![op("f", f), op("g", g)];
    inputs.extend(probes.iter().map(|p| ("probe", Input::Expr(p.clone()))));
    Ok(Residual::new(
        "antihom",
        ResidualValue::Scalars(defects),
        f.signature(),
        inputs,
    ))
}

/// The jet coordinates `p^j_σ` with `|σ| ≤ max_order`, as probe expressions.
pub fn coordinate_probes(sig: &Arc<Signature>, max_order: u32) -> Vec<PolyExpr> {
    sig.jet_coordinates(max_order)
        .into_iter()
        .map(|c| PolyExpr::coord(sig, c).expect("coordinate from the signature"))
        .collect()
}

/// `∂_{p^j_ζ}(D_τ e) − Σ_{κ⊆ζ, κ⊆τ} C(τ,κ) D_{τ−κ}(∂_{p^j_{ζ−κ}} e)`.
pub fn check_commutation_lemma(
    zeta: &MultiIndex,
    tau: &MultiIndex,
    j: usize,
    e: &PolyExpr,
) -> Result<Residual> {
    let sig = e.signature();
    let zeta_coord = JetCoordinate::jet(j, *zeta);
    sig.check(&zeta_coord)?;
    if tau.dim() != sig.n() {
        return Err(JetError::LengthMismatch {
            left: sig.n(),
            right: tau.dim(),
        });
    }
    let lhs = e.total_derivative_multi(tau).partial(&zeta_coord);
    let mut rhs = PolyExpr::zero(sig);
    for kappa in zeta.sub_indices() {
        let Some(rest) = tau.checked_sub(&kappa) else {
            continue;
        };
        let lowered = zeta.checked_sub(&kappa).expect("κ ⊆ ζ");
        let mult = MultiIndex::binom_product(tau, &kappa)?;
        let term = e
            .partial(&JetCoordinate::jet(j, lowered))
            .total_derivative_multi(&rest)
            .scale(&rat(mult as i64));
        rhs = &rhs + &term;
    }
    Ok(Residual::new(
        "commutation-lemma",
        ResidualValue::Scalars(vec![&lhs - &rhs]),
        sig,
        vec![
            ("zeta", Input::Index(*zeta)),
            ("tau", Input::Index(*tau)),
            ("j", Input::Fiber(j)),
            ("e", Input::Expr(e.clone())),
        ],
    ))
}

/// `ℓ_{{μ,H}} G + ad_H(ℓ_μ G) + Hess_H(μ,G) + ℓ_μ{G,H}`, which vanishes for
/// all operators.
pub fn check_mu_lemma(
    g: &VectorOperator,
    h: &VectorOperator,
    mu: &VectorOperator,
) -> Result<Residual> {
    ensure_rank(&[g, h, mu])?;
    let l_mu = linearize(mu);
    let value = linearize(&jacobi_bracket(mu, h)?)
        .apply(g)?
        .add(&ad_apply(h, &l_mu.apply(g)?)?)?
        .add(&hessian_form(h, mu, g)?)?
        .add(&l_mu.apply(&jacobi_bracket(g, h)?)?)?;
    Ok(Residual::new(
        "mu-lemma",
        ResidualValue::Vector(value),
        g.signature(),
        vec![op("g", g), op("h", h), op("mu", mu)],
    ))
}

/// Linearization route against the coordinate route for `{F,G}`.
pub fn check_bracket_oracle(f: &VectorOperator, g: &VectorOperator) -> Result<Residual> {
    let value = jacobi_bracket(f, g)?.sub(&jacobi_bracket_coord(f, g)?)?;
    Ok(Residual::new(
        "bracket-oracle",
        ResidualValue::Vector(value),
        f.signature(),
        vec![op("f", f), op("g", g)],
    ))
}

/// Gateaux consistency of the linearization on sections:
/// `d/dt F(j(s + t h))|_{t=0} − (ℓ_F h)|_{j(s)}`.
///
/// `s` and `h` are sections: operators whose components contain no jet
/// coordinates. Jets of a section are total derivatives in the base
/// variables.
pub fn check_gateaux(
    f: &VectorOperator,
    s: &VectorOperator,
    h: &VectorOperator,
) -> Result<Residual> {
    ensure_rank(&[f, s, h])?;
    for sec in [s, h] {
        if sec
            .components()
            .iter()
            .any(|c| !c.jet_coordinates().is_empty())
        {
            return Err(JetError::Usage(
                "sections must not depend on jet coordinates".into(),
            ));
        }
    }
    let sig = f.signature();
    let t_name = sig.fresh_name("t");
    let ext = sig.with_param(&t_name)?;
    let t = PolyExpr::param(&ext, &t_name)?;
    let t_coord = JetCoordinate::param(ext.param_index(&t_name).expect("just added"));
    let embed = |v: &VectorOperator| -> Result<Vec<PolyExpr>> {
        v.components().iter().map(|c| c.embed(&ext)).collect()
    };
    let (fe, se, he) = (embed(f)?, embed(s)?, embed(h)?);

    // u^j ↦ s_j + t·h_j, p^j_σ ↦ D_σ(s_j + t·h_j)
    let path: Vec<PolyExpr> = se.iter().zip(&he).map(|(a, b)| a + &(&t * b)).collect();
    let pull = |e: &PolyExpr, sec: &[PolyExpr]| {
        e.substitute(|c| match c {
            JetCoordinate::Jet { fiber, sigma } => {
                Some(sec[*fiber as usize].total_derivative_multi(sigma))
            }
            _ => None,
        })
    };
    let zero_t = |e: &PolyExpr| e.substitute(|c| (*c == t_coord).then(|| PolyExpr::zero(&ext)));

    let lin = linearize(&VectorOperator::new(&ext, fe.clone())?)
        .apply(&VectorOperator::new(&ext, he)?)?;
    let mut defects = Vec::with_capacity(fe.len());
    for (fi, li) in fe.iter().zip(lin.components()) {
        let gateaux = zero_t(&pull(fi, &path)?.partial(&t_coord))?;
        let pulled = pull(li, &se)?;
        defects.push((&gateaux - &pulled).embed(sig)?);
    }
    Ok(Residual::new(
        "gateaux",
        ResidualValue::Vector(VectorOperator::new(sig, defects)?),
        sig,
        vec![op("f", f), op("s", s), op("h", h)],
    ))
}

/// Identities covered by the randomized suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    HessSym,
    HessDouble,
    Prop2,
    Prop3,
    Jacobi,
    Antihom,
    CommutationLemma,
    MuLemma,
    BracketOracle,
    Gateaux,
}

impl Identity {
    pub const ALL: [Identity; 10] = [
        Self::HessSym,
        Self::HessDouble,
        Self::Prop2,
        Self::Prop3,
        Self::Jacobi,
        Self::Antihom,
        Self::CommutationLemma,
        Self::MuLemma,
        Self::BracketOracle,
        Self::Gateaux,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::HessSym => "hess-sym",
            Self::HessDouble => "hess-double",
            Self::Prop2 => "prop2",
            Self::Prop3 => "prop3",
            Self::Jacobi => "jacobi",
            Self::Antihom => "antihom",
            Self::CommutationLemma => "commutation-lemma",
            Self::MuLemma => "mu-lemma",
            Self::BracketOracle => "bracket-oracle",
            Self::Gateaux => "gateaux",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|i| i.name() == name)
    }

    /// Number of operator operands for an explicit (non-random) check.
    pub fn arity(&self) -> usize {
        match self {
            Self::Prop2 | Self::Antihom | Self::BracketOracle => 2,
            Self::CommutationLemma => 1,
            _ => 3,
        }
    }

    /// Runs the check on explicit operands. `antihom` probes the jet
    /// coordinates up to `probe_order`; `commutation-lemma` takes one
    /// operand and checks every `ζ, τ` with `|ζ|,|τ| ≤ 3` on each component.
    pub fn check(&self, ops: &[VectorOperator], probe_order: u32) -> Result<Vec<Residual>> {
        if ops.len() != self.arity() {
            return Err(JetError::Usage(format!(
                "{} takes {} operands, got {}",
                self.name(),
                self.arity(),
                ops.len()
            )));
        }
        let one = |r: Result<Residual>| r.map(|r| vec![r]);
        match self {
            Self::HessSym => one(check_hessian_symmetry(&ops[0], &ops[1], &ops[2])),
            Self::HessDouble => one(check_hessian_double_definition(&ops[0], &ops[1], &ops[2])),
            Self::Prop2 => one(check_prop2_operator(&ops[0], &ops[1])),
            Self::Prop3 => one(check_prop3(&ops[0], &ops[1], &ops[2])),
            Self::Jacobi => one(check_jacobi_identity(&ops[0], &ops[1], &ops[2])),
            Self::MuLemma => one(check_mu_lemma(&ops[0], &ops[1], &ops[2])),
            Self::Gateaux => one(check_gateaux(&ops[0], &ops[1], &ops[2])),
            Self::BracketOracle => one(check_bracket_oracle(&ops[0], &ops[1])),
            Self::Antihom => {
                let probes = coordinate_probes(ops[0].signature(), probe_order);
                one(check_evolutionary_antihom(&ops[0], &ops[1], &probes))
            }
            Self::CommutationLemma => {
                let sig = ops[0].signature();
                let idx = MultiIndex::up_to_order(sig.n(), 3);
                let mut out = Vec::new();
                for e in ops[0].components() {
                    for j in 0..sig.r() {
                        for zeta in &idx {
                            for tau in &idx {
                                out.push(check_commutation_lemma(zeta, tau, j, e)?);
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters of a randomized suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    pub max_order: u32,
    pub max_degree: u32,
    pub max_terms: usize,
    pub coeff_pool: Vec<i64>,
    /// `antihom` probes every `p^j_σ` with `|σ|` up to this order.
    pub probe_order: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 7,
            max_order: 2,
            max_degree: 2,
            max_terms: 3,
            coeff_pool: (-2..=2).collect(),
            probe_order: 4,
        }
    }
}

impl SuiteConfig {
    fn expr_config(&self) -> RandomExprConfig {
        RandomExprConfig {
            max_jet_order: self.max_order,
            max_degree: self.max_degree,
            max_terms: self.max_terms,
            coeff_pool: self.coeff_pool.clone(),
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub trial_seed: u64,
    pub residual: String,
    pub fixture: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub identity: String,
    pub trials: usize,
    pub passed: usize,
    pub failures: Vec<TrialFailure>,
    pub seed: u64,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.passed == self.trials
    }
}

/// Seed of trial `k` under a master seed (splitmix64 finalizer).
pub fn trial_seed(master: u64, k: usize) -> u64 {
    let mut z = master.wrapping_add((k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random bundle with `n, r ∈ {1, 2}` and one parameter `c`.
pub fn random_signature<R: Rng + ?Sized>(rng: &mut R) -> Arc<Signature> {
    let n = rng.random_range(1..=2);
    let r = rng.random_range(1..=2);
    Signature::new(
        ["x", "y"][..n].to_vec(),
        ["u", "v"][..r].to_vec(),
        vec!["c"],
    )
    .expect("static names are valid")
}

pub fn random_operator<R: Rng + ?Sized>(
    rng: &mut R,
    sig: &Arc<Signature>,
    cfg: &RandomExprConfig,
) -> VectorOperator {
    let comps = (0..sig.r()).map(|_| random_expr(rng, sig, cfg)).collect();
    VectorOperator::new(sig, comps).expect("components share the signature")
}

/// Generates the inputs of trial `seed` and checks them.
pub fn run_trial(identity: Identity, seed: u64, cfg: &SuiteConfig) -> Result<Residual> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ecfg = cfg.expr_config();
    match identity {
        Identity::CommutationLemma => {
            let sig = random_signature(&mut rng);
            let idx = MultiIndex::up_to_order(sig.n(), 3);
            let zeta = idx[rng.random_range(0..idx.len())];
            let tau = idx[rng.random_range(0..idx.len())];
            let j = rng.random_range(0..sig.r());
            let e = random_expr(
                &mut rng,
                &sig,
                &RandomExprConfig {
                    max_jet_order: 3,
                    ..ecfg
                },
            );
            check_commutation_lemma(&zeta, &tau, j, &e)
        }
        Identity::Gateaux => {
            let sig = Signature::new(["x"], ["u"], ["c"])?;
            let f = random_operator(&mut rng, &sig, &ecfg);
            let section = RandomExprConfig {
                jets: false,
                params: false,
                max_degree: 3,
                ..ecfg
            };
            let s = random_operator(&mut rng, &sig, &section);
            let h = random_operator(&mut rng, &sig, &section);
            check_gateaux(&f, &s, &h)
        }
        Identity::Antihom | Identity::BracketOracle => {
            let sig = random_signature(&mut rng);
            let f = random_operator(&mut rng, &sig, &ecfg);
            let g = random_operator(&mut rng, &sig, &ecfg);
            if identity == Identity::BracketOracle {
                return check_bracket_oracle(&f, &g);
            }
            let mut probes = coordinate_probes(&sig, cfg.probe_order);
            probes.push(random_expr(&mut rng, &sig, &ecfg));
            check_evolutionary_antihom(&f, &g, &probes)
        }
        _ => {
            let sig = random_signature(&mut rng);
            let ops: Vec<VectorOperator> = (0..identity.arity())
                .map(|_| random_operator(&mut rng, &sig, &ecfg))
                .collect();
            Ok(identity.check(&ops, cfg.probe_order)?.remove(0))
        }
    }
}

/// Runs `cfg.trials` independent random trials, in parallel, and collects
/// the failures in trial order.
pub fn run_suite(identity: Identity, cfg: &SuiteConfig) -> SuiteReport {
    let outcomes: Vec<Option<TrialFailure>> = (0..cfg.trials)
        .into_par_iter()
        .map(|k| {
            let seed = trial_seed(cfg.seed, k);
            match run_trial(identity, seed, cfg) {
                Ok(r) if r.holds => None,
                Ok(r) => Some(TrialFailure {
                    trial: k,
                    trial_seed: seed,
                    residual: r.value.to_string(),
                    fixture: r.fixture(),
                }),
                Err(e) => Some(TrialFailure {
                    trial: k,
                    trial_seed: seed,
                    residual: format!("error: {e}"),
                    fixture: Value::Null,
                }),
            }
        })
        .collect();
    let failures: Vec<TrialFailure> = outcomes.into_iter().flatten().collect();
    SuiteReport {
        identity: identity.name().to_string(),
        trials: cfg.trials,
        passed: cfg.trials - failures.len(),
        failures,
        seed: cfg.seed,
    }
}

/// Rebuilds the operator inputs of a residual fixture.
pub fn fixture_operators(fixture: &Value) -> Result<HashMap<String, VectorOperator>> {
    let sig: Signature = serde_json::from_value(fixture["signature"].clone())
        .map_err(|e| JetError::Json(e.to_string()))?;
    sig.validate()?;
    let sig = Arc::new(sig);
    let mut out = HashMap::new();
    if let Some(inputs) = fixture["inputs"].as_object() {
        for (k, v) in inputs {
            if let Ok(json) = serde_json::from_value::<crate::json::VectorOperatorJson>(v.clone()) {
                out.insert(k.clone(), VectorOperator::from_json(&json, &sig)?);
            }
        }
    }
    Ok(out)
}
