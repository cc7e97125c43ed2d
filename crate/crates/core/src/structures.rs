//! Symmetry and auxiliary-integral claims as exact residual checks, and the
//! non-homogeneous linear example on a two-dimensional base.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::identities::{
    random_operator, random_signature, trial_seed, Input, Residual, ResidualValue, SuiteConfig,
    SuiteReport, TrialFailure,
};
use crate::symexpr::{PolyExpr, Signature};
use crate::varcalc::{
    ensure_rank, jacobi_bracket, jacobi_bracket_coord, linearize, VectorOperator,
};

/// `H ∈ Sym_θ(F)`, i.e. `{F,H} = ℓ_θ F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryClaim {
    pub f: VectorOperator,
    pub h: VectorOperator,
    pub theta: VectorOperator,
}

/// `G` is an auxiliary integral of `F`: `{F,G} = ℓ_λ F + ℓ_μ G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxClaim {
    pub f: VectorOperator,
    pub g: VectorOperator,
    pub lambda: VectorOperator,
    pub mu: VectorOperator,
}

/// Both forms of the symmetry defect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryResidual {
    /// `{F,H} − ℓ_θ F`.
    pub bracket_form: Residual,
    /// `ℓ_F H − ℓ_{θ+H} F`.
    pub linearization_form: Residual,
}

impl SymmetryResidual {
    pub fn holds(&self) -> bool {
        self.bracket_form.holds
    }

    pub fn forms_agree(&self) -> bool {
        self.bracket_form.value == self.linearization_form.value
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxResidual {
    pub residual: Residual,
    pub order_mu: u32,
    pub order_f: u32,
    /// `ord μ < ord F`; only meaningful for scalar operators.
    pub mu_below_f: Option<bool>,
}

fn symmetry_inputs(c: &SymmetryClaim) -> Vec<(&'static str, Input)> {
    vec![
        ("f", Input::Operator(c.f.clone())),
        ("h", Input::Operator(c.h.clone())),
        ("theta", Input::Operator(c.theta.clone())),
    ]
}

pub fn symmetry_residual(claim: &SymmetryClaim) -> Result<SymmetryResidual> {
    let SymmetryClaim { f, h, theta } = claim;
    ensure_rank(&[f, h, theta])?;
    let first = jacobi_bracket(f, h)?.sub(&linearize(theta).apply(f)?)?;
    let second = linearize(f)
        .apply(h)?
        .sub(&linearize(&theta.add(h)?).apply(f)?)?;
    let sig = f.signature();
    Ok(SymmetryResidual {
        bracket_form: Residual::new(
            "symmetry",
            ResidualValue::Vector(first),
            sig,
            symmetry_inputs(claim),
        ),
        linearization_form: Residual::new(
            "symmetry-linearization",
            ResidualValue::Vector(second),
            sig,
            symmetry_inputs(claim),
        ),
    })
}

pub fn aux_residual(claim: &AuxClaim) -> Result<AuxResidual> {
    let AuxClaim { f, g, lambda, mu } = claim;
    ensure_rank(&[f, g, lambda, mu])?;
    let value = jacobi_bracket(f, g)?
        .sub(&linearize(lambda).apply(f)?)?
        .sub(&linearize(mu).apply(g)?)?;
    let residual = Residual::new(
        "aux",
        ResidualValue::Vector(value),
        f.signature(),
        vec![
            ("f", Input::Operator(f.clone())),
            ("g", Input::Operator(g.clone())),
            ("lambda", Input::Operator(lambda.clone())),
            ("mu", Input::Operator(mu.clone())),
        ],
    );
    let (order_mu, order_f) = (mu.order(), f.order());
    Ok(AuxResidual {
        residual,
        order_mu,
        order_f,
        mu_below_f: (f.rank() == 1).then_some(order_mu < order_f),
    })
}

/// Additivity of the symmetry defect in `(H, θ)`.
pub fn graded_additivity_check(
    f: &VectorOperator,
    h1: &VectorOperator,
    theta1: &VectorOperator,
    h2: &VectorOperator,
    theta2: &VectorOperator,
) -> Result<Residual> {
    ensure_rank(&[f, h1, theta1, h2, theta2])?;
    let defect = |h: &VectorOperator, theta: &VectorOperator| -> Result<VectorOperator> {
        let r = symmetry_residual(&SymmetryClaim {
            f: f.clone(),
            h: h.clone(),
            theta: theta.clone(),
        })?;
        match r.bracket_form.value {
            ResidualValue::Vector(v) => Ok(v),
            _ => unreachable!("symmetry defects are vectors"),
        }
    };
    let value = defect(&h1.add(h2)?, &theta1.add(theta2)?)?
        .sub(&defect(h1, theta1)?)?
        .sub(&defect(h2, theta2)?)?;
    Ok(Residual::new(
        "graded-additivity",
        ResidualValue::Vector(value),
        f.signature(),
        vec![
            ("f", Input::Operator(f.clone())),
            ("h1", Input::Operator(h1.clone())),
            ("theta1", Input::Operator(theta1.clone())),
            ("h2", Input::Operator(h2.clone())),
            ("theta2", Input::Operator(theta2.clone())),
        ],
    ))
}

/// Randomized suite for [`graded_additivity_check`].
pub fn run_graded_additivity_suite(cfg: &SuiteConfig) -> SuiteReport {
    let ecfg = crate::symexpr::RandomExprConfig {
        max_jet_order: cfg.max_order,
        max_degree: cfg.max_degree,
        max_terms: cfg.max_terms,
        coeff_pool: cfg.coeff_pool.clone(),
        ..Default::default()
    };
    let mut failures = Vec::new();
    for k in 0..cfg.trials {
        let seed = trial_seed(cfg.seed, k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = random_signature(&mut rng);
        let ops: Vec<VectorOperator> = (0..5)
            .map(|_| random_operator(&mut rng, &sig, &ecfg))
            .collect();
        let failure = match graded_additivity_check(&ops[0], &ops[1], &ops[2], &ops[3], &ops[4]) {
            Ok(r) if r.holds => None,
            Ok(r) => Some((r.value.to_string(), r.fixture())),
            Err(e) => Some((format!("error: {e}"), serde_json::Value::Null)),
        };
        if let Some((residual, fixture)) = failure {
            failures.push(TrialFailure {
                trial: k,
                trial_seed: seed,
                residual,
                fixture,
            });
        }
    }
    SuiteReport {
        identity: "graded-additivity".into(),
        trials: cfg.trials,
        passed: cfg.trials - failures.len(),
        failures,
        seed: cfg.seed,
    }
}

/// The linear pair on `(x, y; u, v)` with free terms:
/// `F = (u_xx − u_y − 1, v_xy + v)`, `G = (u_xy − u, v_yy − v_x + 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section4Example {
    pub f: VectorOperator,
    pub g: VectorOperator,
    pub full_bracket: VectorOperator,
    pub full_bracket_coord: VectorOperator,
    pub linear_part_bracket: VectorOperator,
}

impl Section4Example {
    /// The bracket value stated in the source text for this pair.
    pub fn stated_bracket(&self) -> VectorOperator {
        VectorOperator::zero(self.f.signature(), 2)
    }

    /// Whether the computed full bracket differs from the stated value.
    pub fn deviates(&self) -> bool {
        self.full_bracket != self.stated_bracket()
    }
}

pub fn section4_signature() -> Arc<Signature> {
    Signature::new(["x", "y"], ["u", "v"], Vec::<&str>::new()).expect("static names")
}

pub fn section4_example() -> Section4Example {
    let sig = section4_signature();
    let u = |s: [u32; 2]| PolyExpr::jet(&sig, 0, &s).expect("in range");
    let v = |s: [u32; 2]| PolyExpr::jet(&sig, 1, &s).expect("in range");
    let one = PolyExpr::one(&sig);
    let f = VectorOperator::new(
        &sig,
        vec![&(&u([2, 0]) - &u([0, 1])) - &one, &v([1, 1]) + &v([0, 0])],
    )
    .expect("rank 2");
    let g = VectorOperator::new(
        &sig,
        vec![&u([1, 1]) - &u([0, 0]), &(&v([0, 2]) - &v([1, 0])) + &one],
    )
    .expect("rank 2");
    let full_bracket = jacobi_bracket(&f, &g).expect("compatible");
    let full_bracket_coord = jacobi_bracket_coord(&f, &g).expect("compatible");
    let linear_part_bracket =
        jacobi_bracket(&f.without_free_terms(), &g.without_free_terms()).expect("compatible");
    Section4Example {
        f,
        g,
        full_bracket,
        full_bracket_coord,
        linear_part_bracket,
    }
}
