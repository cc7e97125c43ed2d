//! JSON wire forms for expressions and operators.
//!
//! ```text
//! PolyExpr:        {"monomials":[{"coeff":"num/den","vars":[{"var":"p[1]^(2)","pow":k}]}]}
//! VectorOperator:  {"components":[<PolyExpr>…]}
//! CDiffOperator:   {"shape":[r,c],"entries":[{"i":…,"j":…,"terms":[{"sigma":[…],"coeff":<PolyExpr>}]}]}
//! ```
//!
//! Coordinates use one-based indices (`x[1]`, `p[1]^(…)`); matrix entry
//! positions `i`, `j` are zero-based.

use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cdiff::CDiffOperator;
use crate::error::{JetError, Result};
use crate::multiindex::MultiIndex;
use crate::symexpr::{Monomial, PolyExpr, Rational, Signature};
use crate::varcalc::VectorOperator;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyExprJson {
    pub monomials: Vec<MonomialJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialJson {
    pub coeff: String,
    pub vars: Vec<VarPowJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarPowJson {
    pub var: String,
    pub pow: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorOperatorJson {
    pub components: Vec<PolyExprJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CDiffJson {
    pub shape: [usize; 2],
    pub entries: Vec<CDiffEntryJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CDiffEntryJson {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<CDiffTermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CDiffTermJson {
    pub sigma: MultiIndex,
    pub coeff: PolyExprJson,
}

pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|_| JetError::Json(format!("bad rational `{s}`")))
}

impl PolyExpr {
    pub fn to_json(&self) -> PolyExprJson {
        let sig = self.signature();
        PolyExprJson {
            monomials: self
                .terms()
                .map(|(m, q)| MonomialJson {
                    coeff: rational_to_string(q),
                    vars: m
                        .powers()
                        .iter()
                        .map(|(c, k)| VarPowJson {
                            var: sig.coord_wire(c),
                            pow: *k,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &PolyExprJson, sig: &Arc<Signature>) -> Result<Self> {
        let terms = json
            .monomials
            .iter()
            .map(|m| {
                let powers = m
                    .vars
                    .iter()
                    .map(|v| Ok((sig.parse_coord_wire(&v.var)?, v.pow)))
                    .collect::<Result<Vec<_>>>()?;
                Ok((Monomial::from_powers(powers), parse_rational(&m.coeff)?))
            })
            .collect::<Result<Vec<_>>>()?;
        PolyExpr::from_terms(sig, terms)
    }
}

impl VectorOperator {
    pub fn to_json(&self) -> VectorOperatorJson {
        VectorOperatorJson {
            components: self.components().iter().map(PolyExpr::to_json).collect(),
        }
    }

    pub fn from_json(json: &VectorOperatorJson, sig: &Arc<Signature>) -> Result<Self> {
        let comps = json
            .components
            .iter()
            .map(|c| PolyExpr::from_json(c, sig))
            .collect::<Result<Vec<_>>>()?;
        VectorOperator::new(sig, comps)
    }
}

impl CDiffOperator {
    pub fn to_json(&self) -> CDiffJson {
        let (rows, cols) = self.shape();
        let mut entries = Vec::new();
        for i in 0..rows {
            for j in 0..cols {
                let e = self.entry(i, j);
                if e.is_empty() {
                    continue;
                }
                entries.push(CDiffEntryJson {
                    i,
                    j,
                    terms: e
                        .iter()
                        .map(|(sigma, a)| CDiffTermJson {
                            sigma: *sigma,
                            coeff: a.to_json(),
                        })
                        .collect(),
                });
            }
        }
        CDiffJson {
            shape: [rows, cols],
            entries,
        }
    }

    pub fn from_json(json: &CDiffJson, sig: &Arc<Signature>) -> Result<Self> {
        let mut terms = Vec::new();
        for e in &json.entries {
            for t in &e.terms {
                terms.push((e.i, e.j, t.sigma, PolyExpr::from_json(&t.coeff, sig)?));
            }
        }
        CDiffOperator::from_terms(sig, json.shape[0], json.shape[1], terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{random_expr_seeded, RandomExprConfig};
    use crate::varcalc::linearize;

    #[test]
    fn poly_wire_form() {
        let sig = Signature::new(["x"], ["u"], ["c"]).unwrap();
        let p = PolyExpr::jet(&sig, 0, &[1]).unwrap();
        let c = PolyExpr::param(&sig, "c").unwrap();
        let e = (&c * &p).scale(&crate::symexpr::rat(2));
        let text = serde_json::to_string(&e.to_json()).unwrap();
        assert_eq!(
            text,
            r#"{"monomials":[{"coeff":"2/1","vars":[{"var":"c","pow":1},{"var":"p[1]^(1)","pow":1}]}]}"#
        );
        let back: PolyExprJson = serde_json::from_str(&text).unwrap();
        assert_eq!(PolyExpr::from_json(&back, &sig).unwrap(), e);
    }

    #[test]
    fn rejects_garbage() {
        let sig = Signature::new(["x"], ["u"], Vec::<&str>::new()).unwrap();
        let bad = PolyExprJson {
            monomials: vec![MonomialJson {
                coeff: "1/0".into(),
                vars: vec![],
            }],
        };
        assert!(PolyExpr::from_json(&bad, &sig).is_err());
        let bad = PolyExprJson {
            monomials: vec![MonomialJson {
                coeff: "1".into(),
                vars: vec![VarPowJson {
                    var: "p[2]^(1)".into(),
                    pow: 1,
                }],
            }],
        };
        assert!(PolyExpr::from_json(&bad, &sig).is_err());
    }

    #[test]
    fn operators_round_trip() {
        let sig = Signature::new(["x", "y"], ["u", "v"], ["c"]).unwrap();
        let cfg = RandomExprConfig::default();
        for seed in 0..10 {
            let f = VectorOperator::new(
                &sig,
                vec![
                    random_expr_seeded(seed, &sig, &cfg),
                    random_expr_seeded(seed + 100, &sig, &cfg),
                ],
            )
            .unwrap();
            let json = serde_json::to_string(&f.to_json()).unwrap();
            let back: VectorOperatorJson = serde_json::from_str(&json).unwrap();
            assert_eq!(VectorOperator::from_json(&back, &sig).unwrap(), f);

            let l = linearize(&f);
            let json = serde_json::to_string(&l.to_json()).unwrap();
            let back: CDiffJson = serde_json::from_str(&json).unwrap();
            assert_eq!(CDiffOperator::from_json(&back, &sig).unwrap(), l);
        }
    }
}
