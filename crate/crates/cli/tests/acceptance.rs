//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs through the same library entry points as the `plap` binary, with the
//! default (pinned) tolerances. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use plap_cli::{resolve, run_with_threads, CommandName, ConfigArgs, MethodSel, Report};
use plap_core::closed_form_capacity;

const SAMPLES: u64 = 1_000_000;

struct Setup {
    name: &'static str,
    n: usize,
    k: f64,
    c: f64,
    x0: Option<Vec<f64>>,
}

fn setups() -> Vec<Setup> {
    vec![
        Setup {
            name: "A",
            n: 1,
            k: 1.0,
            c: 1.0,
            x0: None,
        },
        Setup {
            name: "B",
            n: 1,
            k: 2.0,
            c: 1.0,
            x0: None,
        },
        Setup {
            name: "C",
            n: 2,
            k: 1.5,
            c: -2.0,
            x0: Some(vec![0.3, -0.2, 0.1, 0.4, -0.5]),
        },
    ]
}

impl Setup {
    fn q(&self) -> f64 {
        2.0 * self.n as f64 + 2.0 * self.k
    }

    fn args(&self) -> ConfigArgs {
        ConfigArgs {
            n: Some(self.n),
            k: Some(self.k),
            c: Some(self.c),
            x0: self.x0.clone(),
            ..Default::default()
        }
    }
}

fn run(cmd: CommandName, args: ConfigArgs) -> Report {
    let cfg = resolve(&args, None).expect("acceptance configuration is valid");
    run_with_threads(cmd, &cfg).expect("run completes")
}

fn failed_checks(reports: &[(String, Report)], filter: impl Fn(&str) -> bool) -> Vec<String> {
    reports
        .iter()
        .flat_map(|(label, r)| {
            r.checks
                .iter()
                .filter(|c| filter(&c.name) && !c.pass)
                .map(move |c| format!("{label}/{} = {:e} (bound {:e})", c.name, c.value, c.bound))
        })
        .collect()
}

fn worst(reports: &[(String, Report)], name: &str) -> f64 {
    reports
        .iter()
        .flat_map(|(_, r)| r.checks.iter().filter(|c| c.name == name).map(|c| c.value))
        .fold(0.0, f64::max)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, ok_detail: String) -> Outcome {
    if failures.is_empty() {
        Outcome {
            pass: true,
            detail: ok_detail,
        }
    } else {
        Outcome {
            pass: false,
            detail: failures.join("; "),
        }
    }
}

fn operator_reports() -> Vec<(String, Report)> {
    let mut out = Vec::new();
    for s in setups() {
        let q = s.q();
        let mut ps: Vec<f64> = [1.5, 2.0, 3.0, 7.0]
            .into_iter()
            .filter(|p| (p - q).abs() > 1e-12)
            .collect();
        ps.push(q);
        for p in ps {
            let args = ConfigArgs {
                p: Some(p),
                points: Some(100),
                ..s.args()
            };
            out.push((format!("{} p={p}", s.name), run(CommandName::VerifyFundamental, args)));
        }
        let args = ConfigArgs {
            points: Some(100),
            ..s.args()
        };
        out.push((format!("{} inf", s.name), run(CommandName::VerifyInfinity, args)));
    }
    out
}

fn harmonicity(ops: &[(String, Report)]) -> Outcome {
    let failures = failed_checks(ops, |n| n == "p_harmonic" || n == "infinity_harmonic");
    outcome(
        failures,
        format!(
            "max scaled residual {:.1e} (Δ_p), {:.1e} (Δ_∞), bound 1e-8",
            worst(ops, "p_harmonic"),
            worst(ops, "infinity_harmonic")
        ),
    )
}

fn gradient_identities(ops: &[(String, Report)]) -> Outcome {
    let failures = failed_checks(ops, |n| n.starts_with("grad_"));
    outcome(
        failures,
        format!(
            "max relative error {:.1e} (ψ), {:.1e} (ψ^α), bound 1e-10",
            worst(ops, "grad_psi_identity"),
            worst(ops, "grad_fundamental_identity")
        ),
    )
}

fn brackets() -> Outcome {
    let mut reports = Vec::new();
    for s in setups() {
        let args = ConfigArgs {
            points: Some(20),
            ..s.args()
        };
        reports.push((s.name.to_string(), run(CommandName::BracketReport, args)));
    }
    let mut failures = failed_checks(&reports, |_| true);
    let a = &reports[0].1;
    for required in ["bracket_constant_at_k_one", "printed_agrees_at_k_one"] {
        if !a.checks.iter().any(|c| c.name == required) {
            failures.push(format!("A/{required} missing"));
        }
    }
    let gap = |r: &Report| {
        r.records
            .iter()
            .find(|x| x.name == "max_abs_printed_discrepancy")
            .map(|x| x.value)
            .unwrap_or(f64::NAN)
    };
    outcome(
        failures,
        format!(
            "finite-difference error {:.1e} (bound 1e-6); alternative-form gap A {:.1e}, B {:.3e}, C {:.3e}",
            worst(&reports, "bracket_matches_commutator"),
            gap(&reports[0].1),
            gap(&reports[1].1),
            gap(&reports[2].1)
        ),
    )
}

fn ahlfors() -> Outcome {
    let mut reports = Vec::new();
    for s in setups() {
        let args = ConfigArgs {
            samples: Some(SAMPLES),
            seed: Some(4),
            ..s.args()
        };
        reports.push((s.name.to_string(), run(CommandName::Ahlfors, args)));
    }
    let ratios: Vec<String> = reports
        .iter()
        .map(|(l, r)| {
            let v = r.records.iter().find(|x| x.name == "volume_ratio_2_1").unwrap();
            format!("{l} {:.3} ± {:.3}", v.value, v.stderr.unwrap())
        })
        .collect();
    outcome(
        failed_checks(&reports, |_| true),
        format!("V(B_2)/V(B_1): {}", ratios.join(", ")),
    )
}

fn density() -> Outcome {
    let mut reports = Vec::new();
    for s in setups() {
        let args = ConfigArgs {
            samples: Some(SAMPLES),
            seed: Some(5),
            ..s.args()
        };
        reports.push((s.name.to_string(), run(CommandName::Density, args)));
    }
    let detail: Vec<String> = reports
        .iter()
        .map(|(l, r)| {
            let ratio = r.checks.iter().find(|c| c.name == "surface_ratio_2_1").unwrap();
            let lim = r.checks.iter().find(|c| c.name == "density_limit").unwrap();
            format!(
                "{l} S ratio {:.2}/{:.0}, density {:.4}",
                ratio.value, ratio.reference, lim.value
            )
        })
        .collect();
    outcome(failed_checks(&reports, |_| true), detail.join("; "))
}

fn dirac() -> Outcome {
    let mut reports = Vec::new();
    for s in setups().into_iter().take(2) {
        for p in [2.0, 3.0, s.q()] {
            let args = ConfigArgs {
                p: Some(p),
                samples: Some(SAMPLES),
                seed: Some(6),
                radii: Some(vec![0.2, 0.1, 0.05]),
                ..s.args()
            };
            reports.push((format!("{} p={p}", s.name), run(CommandName::Dirac, args)));
        }
    }
    let limits: Vec<String> = reports
        .iter()
        .map(|(l, r)| format!("{l}: {:.4}", r.checks[0].value))
        .collect();
    outcome(
        failed_checks(&reports, |_| true),
        format!("limits {}", limits.join(", ")),
    )
}

fn capacity() -> Outcome {
    let mut reports = Vec::new();
    for s in setups().into_iter().take(2) {
        let q = s.q();
        for p in [2.0, 3.0, q, q + 2.0] {
            let args = ConfigArgs {
                p: Some(p),
                samples: Some(SAMPLES),
                seed: Some(7),
                knots: Some(400),
                method: Some(MethodSel::All),
                inner: Some(1.0),
                outer: Some(2.0),
                ..s.args()
            };
            reports.push((format!("{} p={p}", s.name), run(CommandName::Capacity, args)));
        }
    }
    let mut failures = failed_checks(&reports, |_| true);
    let params = plap_core::SpaceParams::at_origin(1, 1.0, 1.0).unwrap();
    let anchor = closed_form_capacity(&params, 2.0, 1.0, 2.0).unwrap().value;
    if (anchor - 32.0 / 3.0).abs() > 1e-12 {
        failures.push(format!("anchor {anchor} != 32/3"));
    }
    let spread = reports
        .iter()
        .flat_map(|(_, r)| {
            r.checks
                .iter()
                .filter(|c| c.name.starts_with("pairwise") || c.name == "radial_vs_mc")
        })
        .map(|c| (c.value - c.reference).abs() / c.reference.abs())
        .fold(0.0, f64::max);
    outcome(
        failures,
        format!(
            "8 cases, max pairwise relative gap {:.2}%, anchor 32/3 = {anchor:.12}",
            100.0 * spread
        ),
    )
}

fn determinism() -> Outcome {
    let mut failures = Vec::new();
    for (cmd, extra) in [
        (
            CommandName::Sigma,
            ConfigArgs {
                samples: Some(200_000),
                ..Default::default()
            },
        ),
        (
            CommandName::Dirac,
            ConfigArgs {
                samples: Some(100_000),
                p: Some(3.0),
                ..Default::default()
            },
        ),
        (
            CommandName::Capacity,
            ConfigArgs {
                samples: Some(100_000),
                k: Some(2.0),
                ..Default::default()
            },
        ),
    ] {
        let mut texts = Vec::new();
        for threads in [1usize, 2, 4, 1] {
            let args = ConfigArgs {
                threads: Some(threads),
                seed: Some(8),
                ..extra.clone()
            };
            let mut r = run(cmd, args);
            r.duration_ms = 0;
            texts.push(r.to_json().unwrap());
        }
        if texts.iter().any(|t| t != &texts[0]) {
            failures.push(format!("{cmd} differs across runs"));
        }
    }
    outcome(
        failures,
        "sigma, dirac, capacity identical over threads 1, 2, 4 and a repeat".into(),
    )
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let mut all = true;
    let start = Instant::now();
    let ops = operator_reports();
    let criteria: Vec<Criterion<'_>> = vec![
        ("1 harmonicity", Box::new(|| harmonicity(&ops))),
        ("2 gradient identities", Box::new(|| gradient_identities(&ops))),
        ("3 bracket oracle", Box::new(brackets)),
        ("4 ahlfors regularity", Box::new(ahlfors)),
        ("5 surface and density", Box::new(density)),
        ("6 dirac identity", Box::new(dirac)),
        ("7 capacity agreement", Box::new(capacity)),
        ("8 determinism", Box::new(determinism)),
    ];
    for (name, f) in criteria {
        let t = Instant::now();
        let o = f();
        all &= o.pass;
        println!(
            "criterion {name}: {} [{:.1}s] {}",
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!(
        "acceptance: {} in {:.1}s",
        if all { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
