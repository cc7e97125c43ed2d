//! Claim files: symmetry and auxiliary-integral assertions with their
//! expected outcome.
//!
//! ```json
//! {
//!   "declarations": "base x; fiber u; param c;",
//!   "claims": [
//!     {"name": "translation", "kind": "symmetry",
//!      "f": ["u_xx"], "h": ["u_x"], "expect": "zero"}
//!   ]
//! }
//! ```
//!
//! Operators are lists of DSL expressions or the wire form
//! `{"components": [...]}`. A claim may override the file declarations.
//! Missing `theta`, `lambda` and `mu` are zero.

use std::sync::Arc;

use jetcalc_core::json::VectorOperatorJson;
use jetcalc_core::structures::{aux_residual, symmetry_residual, AuxClaim, SymmetryClaim};
use jetcalc_core::{Residual, Signature, VectorOperator};
use serde::{Deserialize, Serialize};

use crate::dsl;
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declarations: Option<String>,
    pub claims: Vec<ClaimSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimKind {
    Symmetry,
    Aux,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Zero,
    Nonzero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Dsl(Vec<String>),
    Wire(VectorOperatorJson),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimSpec {
    pub name: String,
    pub kind: ClaimKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declarations: Option<String>,
    pub f: OperatorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<OperatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<OperatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<OperatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<OperatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<OperatorSpec>,
    pub expect: Expect,
}

/// A checked claim.
#[derive(Clone, Debug)]
pub struct ClaimOutcome {
    pub name: String,
    pub kind: ClaimKind,
    pub expect: Expect,
    pub residual: Residual,
    /// Second form of a symmetry residual.
    pub alternate: Option<Residual>,
    /// `ord μ < ord F` for scalar aux claims.
    pub mu_below_f: Option<bool>,
}

impl ClaimOutcome {
    pub fn matches(&self) -> bool {
        self.residual.holds == (self.expect == Expect::Zero)
    }
}

pub fn load(text: &str) -> Result<ClaimsFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Usage(format!("bad claims file: {e}")))
}

fn operator(
    spec: &OperatorSpec,
    sig: &Arc<Signature>,
    claim: &str,
    field: &str,
) -> Result<VectorOperator, CliError> {
    let op = match spec {
        OperatorSpec::Dsl(comps) => dsl::parse_operator(comps, sig)
            .map_err(|e| CliError::Usage(format!("claim `{claim}`, `{field}`: {e}")))?,
        OperatorSpec::Wire(json) => VectorOperator::from_json(json, sig)?,
    };
    if op.rank() != sig.r() {
        return Err(CliError::Usage(format!(
            "claim `{claim}`, `{field}`: expected {} components, found {}",
            sig.r(),
            op.rank()
        )));
    }
    Ok(op)
}

impl ClaimSpec {
    fn signature(&self, file: &ClaimsFile) -> Result<Arc<Signature>, CliError> {
        let decls = self
            .declarations
            .as_ref()
            .or(file.declarations.as_ref())
            .ok_or_else(|| CliError::Usage(format!("claim `{}` has no declarations", self.name)))?;
        dsl::parse_declarations(decls)
            .map_err(|e| CliError::Usage(format!("claim `{}`, declarations: {e}", self.name)))
    }

    pub fn check(&self, file: &ClaimsFile) -> Result<ClaimOutcome, CliError> {
        let sig = self.signature(file)?;
        let op = |spec: &OperatorSpec, field: &str| operator(spec, &sig, &self.name, field);
        let opt = |spec: &Option<OperatorSpec>, field: &str| match spec {
            Some(s) => op(s, field),
            None => Ok(VectorOperator::zero(&sig, sig.r())),
        };
        let required = |spec: &Option<OperatorSpec>, field: &str| match spec {
            Some(s) => op(s, field),
            None => Err(CliError::Usage(format!(
                "claim `{}` is missing `{field}`",
                self.name
            ))),
        };
        let f = op(&self.f, "f")?;
        let outcome = match self.kind {
            ClaimKind::Symmetry => {
                let r = symmetry_residual(&SymmetryClaim {
                    f,
                    h: required(&self.h, "h")?,
                    theta: opt(&self.theta, "theta")?,
                })?;
                ClaimOutcome {
                    name: self.name.clone(),
                    kind: self.kind,
                    expect: self.expect,
                    residual: r.bracket_form,
                    alternate: Some(r.linearization_form),
                    mu_below_f: None,
                }
            }
            ClaimKind::Aux => {
                let r = aux_residual(&AuxClaim {
                    f,
                    g: required(&self.g, "g")?,
                    lambda: opt(&self.lambda, "lambda")?,
                    mu: opt(&self.mu, "mu")?,
                })?;
                ClaimOutcome {
                    name: self.name.clone(),
                    kind: self.kind,
                    expect: self.expect,
                    residual: r.residual,
                    alternate: None,
                    mu_below_f: r.mu_below_f,
                }
            }
        };
        Ok(outcome)
    }

    /// The DSL expressions in this claim, for round-trip checks.
    pub fn dsl_operators(&self) -> Vec<(&'static str, &[String])> {
        let fields: [(&'static str, Option<&OperatorSpec>); 6] = [
            ("f", Some(&self.f)),
            ("h", self.h.as_ref()),
            ("theta", self.theta.as_ref()),
            ("g", self.g.as_ref()),
            ("lambda", self.lambda.as_ref()),
            ("mu", self.mu.as_ref()),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| match v {
                Some(OperatorSpec::Dsl(c)) => Some((k, c.as_slice())),
                _ => None,
            })
            .collect()
    }
}

pub fn check_all(file: &ClaimsFile) -> Result<Vec<ClaimOutcome>, CliError> {
    file.claims.iter().map(|c| c.check(file)).collect()
}
