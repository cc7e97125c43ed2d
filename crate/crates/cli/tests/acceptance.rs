//! Acceptance criteria, one pass/fail line each. Exact arithmetic: every
//! comparison is equality of canonical forms.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use jetcalc_cli::{dsl, fixtures};
use jetcalc_core::identities::{
    check_commutation_lemma, run_suite, Identity, SuiteConfig, SuiteReport,
};
use jetcalc_core::structures::section4_example;
use jetcalc_core::symexpr::rat;
use jetcalc_core::{
    jacobi_bracket, jacobi_bracket_coord, linearize, CDiffOperator, JetCoordinate, MultiIndex,
    PolyExpr, Signature, VectorOperator,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn suite(id: Identity, trials: usize) -> (SuiteReport, Duration) {
    let cfg = SuiteConfig {
        trials,
        ..Default::default()
    };
    let start = Instant::now();
    let report = run_suite(id, &cfg);
    (report, start.elapsed())
}

fn suite_passes(id: Identity, trials: usize, budget: Duration) -> Result<String, String> {
    let (report, took) = suite(id, trials);
    ensure(
        report.all_passed(),
        format!(
            "{id}: {}/{} trials passed, first failure {:?}",
            report.passed,
            report.trials,
            report.failures.first().map(|f| &f.residual)
        ),
    )?;
    ensure(
        report.trials == trials,
        format!("{id}: ran {} trials", report.trials),
    )?;
    ensure(took < budget, format!("{id}: took {took:?}"))?;
    Ok(format!(
        "{id} {}/{} in {took:.2?}",
        report.passed, report.trials
    ))
}

fn c1_intro_example() -> Outcome {
    let start = Instant::now();
    let sig = Signature::new(["x"], ["u"], ["c"]).unwrap();
    let p = PolyExpr::jet(&sig, 0, &[1]).unwrap();
    let p2 = PolyExpr::jet(&sig, 0, &[2]).unwrap();
    let c = PolyExpr::param(&sig, "c").unwrap();
    let x = PolyExpr::base(&sig, 0).unwrap();
    let f = VectorOperator::scalar(&p * &p);
    let g = VectorOperator::scalar(&p + &(&c * &x));
    let dx = MultiIndex::unit(1, 0);
    let times_dx =
        |a: PolyExpr| CDiffOperator::from_terms(&sig, 1, 1, vec![(0, 0, dx, a)]).unwrap();

    let fg = jacobi_bracket(&f, &g).unwrap();
    ensure(
        fg == VectorOperator::scalar((&c * &p).scale(&rat(2))),
        format!("{{F,G}} = {fg}"),
    )?;
    let (lf, lg) = (linearize(&f), linearize(&g));
    ensure(lf == times_dx(p.scale(&rat(2))), format!("l_F = {lf}"))?;
    ensure(lg == times_dx(PolyExpr::one(&sig)), format!("l_G = {lg}"))?;
    let comm = lf.commutator(&lg).unwrap();
    ensure(
        comm == times_dx(p2.scale(&rat(-2))),
        format!("[l_F,l_G] = {comm}"),
    )?;
    let lfg = linearize(&fg);
    ensure(
        lfg == times_dx(c.scale(&rat(2))),
        format!("l_{{F,G}} = {lfg}"),
    )?;
    ensure(comm != lfg, "no anomaly")?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), format!("took {took:?}"))?;
    Ok(format!(
        "{{F,G}} = {fg}, [l_F,l_G] = {comm}, l_{{F,G}} = {lfg} in {took:.2?}"
    ))
}

fn c2_prop2() -> Outcome {
    suite_passes(Identity::Prop2, 100, Duration::from_secs(60))
}

fn c3_prop3() -> Outcome {
    suite_passes(Identity::Prop3, 100, Duration::from_secs(60))
}

fn c4_hessian() -> Outcome {
    let a = suite_passes(Identity::HessSym, 100, Duration::from_secs(60))?;
    let b = suite_passes(Identity::HessDouble, 100, Duration::from_secs(60))?;
    Ok(format!("{a}; {b}"))
}

fn c5_antihom_jacobi() -> Outcome {
    ensure(
        SuiteConfig::default().probe_order == 4,
        "probe order is not 4",
    )?;
    let a = suite_passes(Identity::Antihom, 100, Duration::from_secs(60))?;
    let b = suite_passes(Identity::Jacobi, 100, Duration::from_secs(60))?;
    Ok(format!("{a}; {b}"))
}

fn c6_commutation_lemma() -> Outcome {
    let a = suite_passes(Identity::CommutationLemma, 100, Duration::from_secs(60))?;
    // ζ = (1), τ = (2), e = u²: only κ = (1) contributes, with C(2,1) = 2.
    let sig = Signature::new(["x"], ["u"], Vec::<&str>::new()).unwrap();
    let u = PolyExpr::jet(&sig, 0, &[0]).unwrap();
    let e = &u * &u;
    let (zeta, tau, kappa) = (
        MultiIndex::new(&[1]).unwrap(),
        MultiIndex::new(&[2]).unwrap(),
        MultiIndex::new(&[1]).unwrap(),
    );
    ensure(
        MultiIndex::binom_product(&tau, &kappa).unwrap() == 2,
        "C(2,1) != 2",
    )?;
    // Iteration oracle: D_x applied twice, then ∂_{u_x}.
    let iterated = e
        .total_derivative(0)
        .total_derivative(0)
        .partial(&JetCoordinate::jet(0, zeta));
    let expected = PolyExpr::jet(&sig, 0, &[1]).unwrap().scale(&rat(4));
    ensure(iterated == expected, format!("iterated side = {iterated}"))?;
    let r = check_commutation_lemma(&zeta, &tau, 0, &e).unwrap();
    ensure(r.holds, format!("lemma residual {}", r.value))?;
    let unweighted = &e
        .partial(&JetCoordinate::jet(0, zeta))
        .total_derivative_multi(&tau)
        + &e.partial(&JetCoordinate::jet(0, MultiIndex::zero(1)))
            .total_derivative_multi(&tau.checked_sub(&kappa).unwrap());
    ensure(
        unweighted != iterated,
        format!("unweighted sum {unweighted} also matches"),
    )?;
    Ok(format!(
        "{a}; multiplicity 2 needed: {iterated} vs unweighted {unweighted}"
    ))
}

fn c7_bracket_oracle() -> Outcome {
    suite_passes(Identity::BracketOracle, 100, Duration::from_secs(60))
}

fn c8_mu_lemma_and_claims() -> Outcome {
    let a = suite_passes(Identity::MuLemma, 100, Duration::from_secs(60))?;
    let text = common::read(&common::crate_dir().join("fixtures/claims.json"));
    let file = fixtures::load(&text).map_err(|e| e.to_string())?;
    let outcomes = fixtures::check_all(&file).map_err(|e| e.to_string())?;
    let bad: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.matches())
        .map(|o| o.name.as_str())
        .collect();
    ensure(bad.is_empty(), format!("claims not matching: {bad:?}"))?;
    let run = common::jetcalc(&["check-fixtures", "--fixtures", "fixtures/claims.json"]);
    ensure(run.code == 0, format!("check-fixtures exited {}", run.code))?;
    Ok(format!("{a}; {} claims match", outcomes.len()))
}

fn c9_section4() -> Outcome {
    let ex = section4_example();
    let sig = ex.f.signature().clone();
    let expected =
        VectorOperator::new(&sig, vec![PolyExpr::integer(&sig, -1), PolyExpr::one(&sig)]).unwrap();
    ensure(
        ex.linear_part_bracket.is_zero(),
        format!("linear part {}", ex.linear_part_bracket),
    )?;
    ensure(
        ex.full_bracket == expected,
        format!("full {}", ex.full_bracket),
    )?;
    ensure(
        ex.full_bracket_coord == expected,
        format!("coord {}", ex.full_bracket_coord),
    )?;
    ensure(
        jacobi_bracket_coord(&ex.f, &ex.g).unwrap() == jacobi_bracket(&ex.f, &ex.g).unwrap(),
        "implementations disagree",
    )?;
    let run = common::jetcalc(&["section4", "--format", "json"]);
    let report: serde_json::Value = serde_json::from_str(&run.stdout).map_err(|e| e.to_string())?;
    let flagged = report["results"]
        .as_array()
        .unwrap()
        .iter()
        .any(|e| e["label"] == "deviates from stated" && e["value"] == "yes");
    ensure(
        flagged && !report["notes"].as_array().unwrap().is_empty(),
        "deviation not flagged",
    )?;
    Ok(format!(
        "linear part {}, full {} (stated 0, flagged)",
        ex.linear_part_bracket, ex.full_bracket
    ))
}

fn c10_gateaux() -> Outcome {
    suite_passes(Identity::Gateaux, 20, Duration::from_secs(60))
}

fn c11_cli() -> Outcome {
    let sessions = common::session_fixtures();
    for path in &sessions {
        let s = dsl::parse(&common::read(path)).map_err(|e| format!("{}: {e}", path.display()))?;
        let printed = s.to_string();
        let again = dsl::parse(&printed).map_err(|e| e.to_string())?;
        ensure(
            again == s && again.to_string() == printed,
            format!("{} not idempotent", path.display()),
        )?;
    }
    let problems = common::check_golden();
    ensure(problems.is_empty(), format!("golden: {problems:?}"))?;
    let codes: Vec<i32> = common::GOLDEN.iter().map(|g| g.2).collect();
    ensure(
        [0, 1, 2].iter().all(|c| codes.contains(c)),
        "golden cases miss an exit code",
    )?;
    let args = [
        "verify", "prop2", "--random", "100", "--seed", "7", "--format", "json",
    ];
    let (a, b) = (common::jetcalc(&args), common::jetcalc(&args));
    ensure(a.code == 0, format!("verify exited {}", a.code))?;
    ensure(a.stdout == b.stdout, "JSON reports differ between runs")?;
    Ok(format!(
        "{} sessions round-trip, {} golden cases, JSON stable",
        sessions.len(),
        common::GOLDEN.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("intro example reproduction", c1_intro_example),
        ("linearization anomaly suite", c2_prop2),
        ("compensated Leibniz suite", c3_prop3),
        ("hessian symmetry and double definition", c4_hessian),
        ("anti-homomorphism and Jacobi identity", c5_antihom_jacobi),
        ("commutation lemma", c6_commutation_lemma),
        ("bracket oracle equivalence", c7_bracket_oracle),
        ("mu-lemma and shipped claims", c8_mu_lemma_and_claims),
        ("linear pair with free terms", c9_section4),
        ("gateaux consistency", c10_gateaux),
        ("cli round-trip, exit codes, determinism", c11_cli),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
