//! Acceptance gate: one line per criterion, exact equality throughout.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use msx_core::hamilton::{tensorial_from_vf_lvy, ProjectableField};
use msx_core::poisson::{bracket_t1v, exact_term_z, jacobiator_t1v};
use msx_core::random;
use msx_core::scalar::parse_scalar;
use msx_core::verify::{run_suite, run_suite_with, Mutation, SuiteId, SuiteParams};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

const SEED: u64 = 20;

fn suite(id: SuiteId, n: usize, k: usize, m: Option<usize>, trials: usize) -> Outcome {
    let params = SuiteParams {
        n,
        k,
        m,
        trials,
        seed: SEED,
    };
    let r = run_suite(id, params).map_err(|e| format!("{id}({n},{k}): {e}"))?;
    if r.pass {
        Ok(())
    } else {
        let first = r
            .trials
            .iter()
            .find(|t| !t.pass)
            .and_then(|t| t.detail.clone())
            .unwrap_or_default();
        Err(format!(
            "{id}(n={n},k={k},m={m:?}): {}/{} failed, first: {first}",
            r.failed, trials
        ))
    }
}

fn all(checks: impl IntoIterator<Item = Outcome>) -> Outcome {
    let failures: Vec<String> = checks.into_iter().filter_map(Result::err).collect();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures.join("; "))
    }
}

const SOLVER_SIZES: [(usize, usize); 4] = [(1, 1), (2, 1), (2, 2), (3, 2)];
const SMALL_SIZES: [(usize, usize); 3] = [(1, 1), (2, 1), (2, 2)];

fn solver_agreement() -> Outcome {
    all(SOLVER_SIZES.iter().flat_map(|&(n, k)| {
        [
            suite(SuiteId::Multistruc, n, k, None, 50),
            suite(SuiteId::Nkstruc, n, k, None, 50),
        ]
    }))
}

fn canonical_identities() -> Outcome {
    all(SOLVER_SIZES.iter().flat_map(|&(n, k)| {
        [
            suite(SuiteId::Xhooktheta, n, k, None, 50),
            suite(SuiteId::Lieconstant, n, k, None, 50),
            suite(SuiteId::Euler, n, k, None, 50),
        ]
    }))
}

fn obstruction() -> Outcome {
    let witness = || -> Outcome {
        let v = ProjectableField::new(
            2,
            1,
            vec![parse_scalar("1").unwrap(), parse_scalar("0").unwrap()],
            vec![parse_scalar("0").unwrap()],
        )
        .map_err(|e| e.to_string())?;
        let w = ProjectableField::new(
            2,
            1,
            vec![parse_scalar("0").unwrap(); 2],
            vec![parse_scalar("x2").unwrap()],
        )
        .map_err(|e| e.to_string())?;
        match exact_term_z(&v, &w) {
            Ok(t) if !t.is_zero() => Ok(()),
            Ok(_) => Err("exact term vanishes on the witness pair".into()),
            Err(e) => Err(e.to_string()),
        }
    };
    all(SOLVER_SIZES
        .iter()
        .map(|&(n, k)| suite(SuiteId::Pbexact, n, k, None, 50))
        .chain([witness()]))
}

fn lie_closure() -> Outcome {
    let mut checks = Vec::new();
    for &(n, k) in &SMALL_SIZES {
        for i in 0..20u64 {
            let mut rng = random::trial_rng(SEED, i);
            let u = random::projectable_field(&mut rng, n, k, 2);
            let v = random::projectable_field(&mut rng, n, k, 2);
            let w = random::projectable_field(&mut rng, n, k, 2);
            let check = || -> Result<bool, msx_core::Error> {
                let b = bracket_t1v(&u, &v)?;
                let closed =
                    b.routes_agree() && b.observable == tensorial_from_vf_lvy(&u.bracket(&v)?)?;
                Ok(closed && jacobiator_t1v(&u, &v, &w)?.is_zero())
            };
            checks.push(match check() {
                Ok(true) => Ok(()),
                Ok(false) => Err(format!("(n={n},k={k}) trial {i}: closure or Jacobi fails")),
                Err(e) => Err(format!("(n={n},k={k}) trial {i}: {e}")),
            });
        }
    }
    all(checks)
}

fn constraint_classification() -> Outcome {
    all([
        suite(SuiteId::Constraint, 2, 2, None, 20),
        suite(SuiteId::Hflvy, 2, 2, None, 20),
    ])
}

fn frame_theorems() -> Outcome {
    let mut checks = Vec::new();
    for &(n, k) in &SMALL_SIZES {
        for m in 0..=3 {
            checks.push(suite(SuiteId::Binomial, n, k, Some(m), 1));
        }
    }
    for (n, k) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (1, 3)] {
        checks.push(suite(SuiteId::Nondegen, n, k, None, 20));
    }
    for &(n, k) in &SMALL_SIZES {
        checks.push(suite(SuiteId::Thm71, n, k, None, 10));
        checks.push(suite(SuiteId::Thm72, n, k, None, 5));
        checks.push(suite(SuiteId::Thm73, n, k, None, 5));
    }
    checks.push(suite(SuiteId::Thm73, 3, 1, None, 3));
    all(checks)
}

fn bundle_maps() -> Outcome {
    all([
        suite(SuiteId::RhoZWelldef, 2, 1, None, 100),
        suite(SuiteId::RhoZWelldef, 2, 2, None, 20),
        suite(SuiteId::ConnectionRoundtrip, 2, 1, None, 20),
        suite(SuiteId::ConnectionRoundtrip, 2, 2, None, 20),
        suite(SuiteId::FlatConnection, 1, 1, None, 10),
        suite(SuiteId::FlatConnection, 1, 2, None, 10),
    ])
}

fn cli() -> Outcome {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let msx = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_msx"))
            .args(args)
            .env_remove("MSX_SEED")
            .output()
            .map_err(|e| e.to_string())
    };
    let mut checks = Vec::new();
    for name in ["z_momentum", "lvy_frames", "suites"] {
        let script = root.join(format!("scripts/{name}.msx"));
        let golden = std::fs::read(root.join(format!("scripts/golden/{name}.json")))
            .map_err(|e| e.to_string())?;
        let a = msx(&["run", script.to_str().unwrap()])?;
        let b = msx(&["run", script.to_str().unwrap()])?;
        checks.push(
            if a.stdout == b.stdout && a.stdout == golden && a.status.code() == Some(0) {
                Ok(())
            } else {
                Err(format!(
                    "{name}: output not reproducible or status {:?}",
                    a.status.code()
                ))
            },
        );
    }
    let verify = msx(&["verify", "--seed", "3"])?;
    checks.push(match verify.status.code() {
        Some(0) => Ok(()),
        code => Err(format!("verify exited with {code:?}")),
    });
    let mutation = Mutation {
        theta_scale: msx_core::scalar::int(2),
    };
    let broken = SuiteId::ALL
        .into_iter()
        .filter(|&id| {
            !run_suite_with(
                id,
                SuiteParams {
                    trials: 3,
                    ..id.default_params()
                },
                &mutation,
            )
            .map(|r| r.pass)
            .unwrap_or(false)
        })
        .collect::<Vec<_>>();
    checks.push(if broken.len() >= 3 {
        Ok(())
    } else {
        Err(format!("mutated Θ only breaks {broken:?}"))
    });
    all(checks)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "solver agrees with closed forms on Z and LVY",
            solver_agreement,
            30,
        ),
        (
            "canonical identities X⌟Θ, ℒ_XΘ, Euler",
            canonical_identities,
            30,
        ),
        (
            "obstruction identity and nonzero exact term",
            obstruction,
            60,
        ),
        ("Lie-algebra closure and Jacobi on LVY", lie_closure, 60),
        (
            "constraint rejection and template classification",
            constraint_classification,
            30,
        ),
        ("frame-bundle theorems at desk scale", frame_theorems, 300),
        ("associated-bundle maps and connections", bundle_maps, 60),
        ("CLI determinism, exit codes, mutation", cli, 30),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if outcome.is_ok() && elapsed > Duration::from_secs(limit) {
            outcome = Err(format!(
                "took {:.1} s, limit {limit} s",
                elapsed.as_secs_f64()
            ));
        }
        match &outcome {
            Ok(()) => println!(
                "criterion {}: PASS  {name} ({:.2} s)",
                i + 1,
                elapsed.as_secs_f64()
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "criterion {}: FAIL  {name} ({:.2} s): {why}",
                    i + 1,
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
