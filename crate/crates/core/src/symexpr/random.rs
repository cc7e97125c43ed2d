use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{rat, Monomial, PolyExpr};
use super::signature::{JetCoordinate, Signature};

/// Bounds for random polynomial generation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomExprConfig {
    pub max_jet_order: u32,
    pub max_degree: u32,
    pub max_terms: usize,
    pub coeff_pool: Vec<i64>,
    /// Whether base variables may appear (sections and x-free operators
    /// switch this off).
    pub base_vars: bool,
    pub params: bool,
    /// Whether jet coordinates may appear.
    pub jets: bool,
}

impl Default for RandomExprConfig {
    fn default() -> Self {
        Self {
            max_jet_order: 2,
            max_degree: 2,
            max_terms: 3,
            coeff_pool: (-2..=2).collect(),
            base_vars: true,
            params: true,
            jets: true,
        }
    }
}

impl RandomExprConfig {
    fn variables(&self, sig: &Signature) -> Vec<JetCoordinate> {
        let mut vars = Vec::new();
        if self.base_vars {
            vars.extend((0..sig.n()).map(JetCoordinate::base));
        }
        if self.params {
            vars.extend((0..sig.param_names().len()).map(JetCoordinate::param));
        }
        if self.jets {
            vars.extend(sig.jet_coordinates(self.max_jet_order));
        }
        vars
    }
}

/// Random polynomial within the configured bounds. Each term picks a degree
/// up to `max_degree` and that many coordinates (with repetition).
pub fn random_expr<R: Rng + ?Sized>(
    rng: &mut R,
    sig: &Arc<Signature>,
    cfg: &RandomExprConfig,
) -> PolyExpr {
    let vars = cfg.variables(sig);
    let nterms = rng.random_range(1..=cfg.max_terms.max(1));
    let mut out = PolyExpr::zero(sig);
    for _ in 0..nterms {
        let degree = if vars.is_empty() {
            0
        } else {
            rng.random_range(0..=cfg.max_degree)
        };
        let mono =
            Monomial::from_powers((0..degree).map(|_| (vars[rng.random_range(0..vars.len())], 1)));
        let q = cfg.coeff_pool[rng.random_range(0..cfg.coeff_pool.len())];
        out = &out + &PolyExpr::term(sig, mono, rat(q));
    }
    out
}

pub fn random_expr_seeded(seed: u64, sig: &Arc<Signature>, cfg: &RandomExprConfig) -> PolyExpr {
    random_expr(&mut ChaCha8Rng::seed_from_u64(seed), sig, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_zero_gives_constants() {
        let sig = Signature::new(["x"], ["u"], ["c"]).unwrap();
        let cfg = RandomExprConfig {
            max_degree: 0,
            ..Default::default()
        };
        for seed in 0..20 {
            assert!(random_expr_seeded(seed, &sig, &cfg).is_constant());
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let sig = Signature::new(["x", "y"], ["u", "v"], ["c"]).unwrap();
        let cfg = RandomExprConfig::default();
        for seed in 0..20 {
            assert_eq!(
                random_expr_seeded(seed, &sig, &cfg),
                random_expr_seeded(seed, &sig, &cfg)
            );
        }
    }

    #[test]
    fn respects_bounds() {
        let sig = Signature::new(["x"], ["u"], Vec::<&str>::new()).unwrap();
        let cfg = RandomExprConfig {
            max_jet_order: 2,
            max_degree: 2,
            ..Default::default()
        };
        let mut nonzero = 0;
        for seed in 0..200 {
            let e = random_expr_seeded(seed, &sig, &cfg);
            assert!(e.jet_order() <= 2 && e.degree() <= 2);
            assert!(e.num_terms() <= cfg.max_terms);
            for c in e.coordinates() {
                sig.check(&c).unwrap();
            }
            nonzero += usize::from(!e.is_zero());
        }
        assert!(nonzero > 100);
    }

    #[test]
    fn sections_are_jet_free() {
        let sig = Signature::new(["x"], ["u"], ["c"]).unwrap();
        let cfg = RandomExprConfig {
            jets: false,
            params: false,
            max_degree: 3,
            ..Default::default()
        };
        for seed in 0..50 {
            assert!(random_expr_seeded(seed, &sig, &cfg)
                .jet_coordinates()
                .is_empty());
        }
    }
}
