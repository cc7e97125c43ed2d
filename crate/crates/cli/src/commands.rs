use std::fs;
use std::path::Path;

use jetcalc_core::identities::{
    anomaly_sides, run_suite, trial_seed, Identity, SuiteConfig, SuiteReport,
};
use jetcalc_core::structures::{
    aux_residual, graded_additivity_check, run_graded_additivity_suite, section4_example,
    symmetry_residual, AuxClaim, SymmetryClaim,
};
use jetcalc_core::{
    hessian_form, hessian_operator, jacobi_bracket, jacobi_bracket_coord, linearize, Residual,
    VectorOperator,
};
use serde_json::json;

use crate::dsl::{self, Session};
use crate::fixtures::{self, ClaimKind, ClaimOutcome, Expect};
use crate::report::{Entry, Report};
use crate::{Cli, CliError, Command};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_session(path: &Path) -> Result<Session, CliError> {
    dsl::parse(&read(path)?).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

struct Ctx<'a> {
    cli: &'a Cli,
    session: Option<Session>,
}

impl Ctx<'_> {
    fn session(&mut self, command: &str) -> Result<&Session, CliError> {
        if self.session.is_none() {
            let path =
                self.cli.session.as_ref().ok_or_else(|| {
                    CliError::Usage(format!("`{command}` needs --session <path>"))
                })?;
            self.session = Some(load_session(path)?);
        }
        Ok(self.session.as_ref().expect("just loaded"))
    }

    fn op(&mut self, command: &str, name: &str) -> Result<VectorOperator, CliError> {
        self.session(command)?
            .get(name)
            .cloned()
            .ok_or_else(|| CliError::Usage(format!("no operator `{name}` in the session")))
    }

    fn op_or_zero(
        &mut self,
        command: &str,
        name: &Option<String>,
    ) -> Result<VectorOperator, CliError> {
        match name {
            Some(n) => self.op(command, n),
            None => {
                let sig = self.session(command)?.signature().clone();
                Ok(VectorOperator::zero(&sig, sig.r()))
            }
        }
    }
}

fn verdict(holds: bool) -> Entry {
    Entry::plain("verdict", if holds { "zero" } else { "nonzero" })
}

pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let mut ctx = Ctx { cli, session: None };
    match &cli.command {
        Command::Linearize { op } => {
            let f = ctx.op("linearize", op)?;
            let mut r = Report::new("linearize");
            r.push(Entry::vector(op, &f));
            r.push(Entry::operator("linearization", &linearize(&f)));
            Ok(r)
        }
        Command::Bracket { left, right } => {
            let (f, g) = (ctx.op("bracket", left)?, ctx.op("bracket", right)?);
            let via_l = jacobi_bracket(&f, &g)?;
            let coord = jacobi_bracket_coord(&f, &g)?;
            let mut r = Report::new("bracket");
            r.push(Entry::vector("bracket", &via_l));
            r.push(Entry::vector("bracket (term by term)", &coord));
            if via_l != coord {
                r.ok = false;
                r.note("the two bracket implementations disagree");
            }
            Ok(r)
        }
        Command::Hessian { op, arg, third } => {
            let (f, g) = (ctx.op("hessian", op)?, ctx.op("hessian", arg)?);
            let mut r = Report::new("hessian");
            r.push(Entry::operator(
                "hessian operator",
                &hessian_operator(&f, &g)?,
            ));
            if let Some(h) = third {
                let h = ctx.op("hessian", h)?;
                r.push(Entry::vector("hessian form", &hessian_form(&f, &g, &h)?));
            }
            Ok(r)
        }
        Command::Anomaly { left, right } => {
            let (f, g) = (ctx.op("anomaly", left)?, ctx.op("anomaly", right)?);
            let (lhs, rhs) = anomaly_sides(&f, &g)?;
            let mut r = Report::new("anomaly");
            r.push(Entry::operator("commutator minus linearized bracket", &lhs));
            r.push(Entry::operator("hessian difference", &rhs));
            let diff = lhs.sub(&rhs)?;
            r.push(Entry::operator("residual", &diff));
            r.ok = diff.is_zero();
            r.push(verdict(r.ok));
            Ok(r)
        }
        Command::Verify {
            identity,
            random,
            seed,
            ops,
            max_order,
            max_degree,
            probe_order,
        } => {
            if ops.is_empty() {
                let cfg = SuiteConfig {
                    trials: random.unwrap_or(100),
                    seed: *seed,
                    max_order: *max_order,
                    max_degree: *max_degree,
                    probe_order: *probe_order,
                    ..Default::default()
                };
                Ok(suite_report(identity, &cfg))
            } else {
                let operands = ops
                    .iter()
                    .map(|n| ctx.op("verify", n))
                    .collect::<Result<Vec<_>, _>>()?;
                explicit_report(identity, &operands, *probe_order)
            }
        }
        Command::CheckSymmetry {
            f,
            h,
            theta,
            fixtures,
        } => {
            if let Some(path) = fixtures {
                return claims_report("check-symmetry", path, Some(ClaimKind::Symmetry));
            }
            let claim = SymmetryClaim {
                f: ctx.op("check-symmetry", f.as_deref().expect("required by clap"))?,
                h: ctx.op("check-symmetry", h.as_deref().expect("required by clap"))?,
                theta: ctx.op_or_zero("check-symmetry", theta)?,
            };
            let res = symmetry_residual(&claim)?;
            let mut r = Report::new("check-symmetry");
            r.push(Entry::residual("bracket form", &res.bracket_form));
            r.push(Entry::residual(
                "linearization form",
                &res.linearization_form,
            ));
            r.push(verdict(res.holds()));
            r.ok = res.holds();
            Ok(r)
        }
        Command::CheckAux {
            f,
            g,
            lambda,
            mu,
            fixtures,
        } => {
            if let Some(path) = fixtures {
                return claims_report("check-aux", path, Some(ClaimKind::Aux));
            }
            let claim = AuxClaim {
                f: ctx.op("check-aux", f.as_deref().expect("required by clap"))?,
                g: ctx.op("check-aux", g.as_deref().expect("required by clap"))?,
                lambda: ctx.op_or_zero("check-aux", lambda)?,
                mu: ctx.op_or_zero("check-aux", mu)?,
            };
            let res = aux_residual(&claim)?;
            let mut r = Report::new("check-aux");
            r.push(Entry::residual("residual", &res.residual));
            r.push(Entry::plain(
                "orders",
                format!("ord mu = {}, ord F = {}", res.order_mu, res.order_f),
            ));
            if let Some(below) = res.mu_below_f {
                r.push(Entry::plain(
                    "ord mu < ord F",
                    if below { "yes" } else { "no" },
                ));
            }
            r.push(verdict(res.residual.holds));
            r.ok = res.residual.holds;
            Ok(r)
        }
        Command::CheckFixtures { fixtures } => claims_report("check-fixtures", fixtures, None),
        Command::Section4 => Ok(section4_report()),
        Command::Print => {
            let s = ctx.session("print")?;
            let mut r = Report::new("print");
            r.raw = Some(s.to_string());
            r.push(Entry::plain("session", s.to_string()));
            Ok(r)
        }
    }
}

fn suite_report(identity: &str, cfg: &SuiteConfig) -> Report {
    let suite: SuiteReport = match Identity::from_name(identity) {
        Some(id) => run_suite(id, cfg),
        None => run_graded_additivity_suite(cfg),
    };
    let mut r = Report::new("verify");
    r.ok = suite.all_passed();
    r.push(Entry::plain("identity", identity));
    r.push(Entry::with_data(
        "seed",
        cfg.seed.to_string(),
        json!(cfg.seed),
    ));
    let trials: Vec<_> = (0..cfg.trials)
        .map(|k| {
            json!({
                "trial": k,
                "trial_seed": trial_seed(cfg.seed, k),
                "holds": !suite.failures.iter().any(|f| f.trial == k),
            })
        })
        .collect();
    r.push(Entry::with_data(
        "passed",
        format!("{}/{}", suite.passed, suite.trials),
        json!(trials),
    ));
    for f in &suite.failures {
        r.push(Entry::with_data(
            &format!("failure (trial {})", f.trial),
            f.residual.clone(),
            json!(f),
        ));
    }
    r
}

fn explicit_report(
    identity: &str,
    ops: &[VectorOperator],
    probe_order: u32,
) -> Result<Report, CliError> {
    let residuals: Vec<Residual> = match Identity::from_name(identity) {
        Some(id) => id.check(ops, probe_order)?,
        None => {
            let [f, h1, t1, h2, t2] = ops else {
                return Err(CliError::Usage(format!(
                    "graded-additivity takes 5 operands, got {}",
                    ops.len()
                )));
            };
            vec![graded_additivity_check(f, h1, t1, h2, t2)?]
        }
    };
    let mut r = Report::new("verify");
    r.push(Entry::plain("identity", identity));
    r.ok = residuals.iter().all(|x| x.holds);
    if residuals.len() == 1 {
        r.push(Entry::residual("residual", &residuals[0]));
    } else {
        let passed = residuals.iter().filter(|x| x.holds).count();
        r.push(Entry::plain(
            "instances",
            format!("{passed}/{}", residuals.len()),
        ));
        for (k, x) in residuals.iter().enumerate().filter(|(_, x)| !x.holds) {
            r.push(Entry::residual(&format!("residual (instance {k})"), x));
        }
    }
    r.push(verdict(r.ok));
    Ok(r)
}

fn claims_report(command: &str, path: &Path, kind: Option<ClaimKind>) -> Result<Report, CliError> {
    let file = fixtures::load(&read(path)?)?;
    let outcomes: Vec<ClaimOutcome> = fixtures::check_all(&file)?
        .into_iter()
        .filter(|o| kind.is_none_or(|k| o.kind == k))
        .collect();
    let mut r = Report::new(command);
    let word = |zero: bool| if zero { "zero" } else { "nonzero" };
    for o in &outcomes {
        let expected = o.expect == Expect::Zero;
        let mut value = format!(
            "{} (expected {}){}",
            word(o.residual.holds),
            word(expected),
            if o.matches() { "" } else { " MISMATCH" }
        );
        if !o.residual.holds {
            value.push_str(&format!(", residual {}", o.residual.value));
        }
        if let Some(below) = o.mu_below_f {
            value.push_str(&format!(
                ", ord mu < ord F: {}",
                if below { "yes" } else { "no" }
            ));
        }
        r.push(Entry::with_data(
            &o.name,
            value,
            json!({
                "kind": o.kind,
                "expect": o.expect,
                "holds": o.residual.holds,
                "matches": o.matches(),
                "mu_below_f": o.mu_below_f,
                "residual": o.residual.to_json(),
                "alternate_agrees": o.alternate.as_ref().map(|a| a.value == o.residual.value),
            }),
        ));
    }
    let matched = outcomes.iter().filter(|o| o.matches()).count();
    r.push(Entry::plain(
        "matched",
        format!("{matched}/{}", outcomes.len()),
    ));
    r.ok = matched == outcomes.len();
    Ok(r)
}

fn section4_report() -> Report {
    let ex = section4_example();
    let mut r = Report::new("section4");
    r.push(Entry::vector("F", &ex.f));
    r.push(Entry::vector("G", &ex.g));
    r.push(Entry::operator("linearization of F", &linearize(&ex.f)));
    r.push(Entry::operator("linearization of G", &linearize(&ex.g)));
    r.push(Entry::vector(
        "linear-part bracket",
        &ex.linear_part_bracket,
    ));
    r.push(Entry::vector("full bracket", &ex.full_bracket));
    r.push(Entry::vector(
        "full bracket (term by term)",
        &ex.full_bracket_coord,
    ));
    r.push(Entry::vector("stated bracket", &ex.stated_bracket()));
    r.push(Entry::plain(
        "deviates from stated",
        if ex.deviates() { "yes" } else { "no" },
    ));
    if ex.deviates() {
        r.note(format!(
            "the full bracket {} differs from the stated value 0; the homogeneous linear parts commute and the free terms contribute the difference",
            ex.full_bracket
        ));
    }
    r
}
