//! Shared inputs for the benchmarks.

use jetcalc_core::symexpr::{random_expr_seeded, RandomExprConfig};
use jetcalc_core::{PolyExpr, Signature, VectorOperator};

/// A rank-`r` operator on `n` base variables built from `seed`.
pub fn operator(n: usize, r: usize, max_order: u32, seed: u64) -> VectorOperator {
    let sig = Signature::new(
        ["x", "y", "z"][..n].to_vec(),
        ["u", "v", "w"][..r].to_vec(),
        vec!["c"],
    )
    .expect("static names");
    let cfg = RandomExprConfig {
        max_jet_order: max_order,
        max_terms: 4,
        ..Default::default()
    };
    let comps: Vec<PolyExpr> = (0..r as u64)
        .map(|j| random_expr_seeded(seed.wrapping_mul(31).wrapping_add(j), &sig, &cfg))
        .collect();
    VectorOperator::new(&sig, comps).expect("same signature")
}
