//! One function per subcommand. Each assumes a validated [`RunConfig`].

use plap_core::mc::{derive_seed, uniform_points, SampleBox};
use plap_core::{
    acceptance_ratio, ball_measure, closed_form_capacity, density_limit, dirac_limit, exponents, gauge,
    horizontal_gradient, infinity_laplacian, lie_bracket, lie_bracket_printed, mc_capacity, minimize_radial,
    p_laplacian, p_laplacian_divergence_form, shell_integral_extrapolated, sigma_p, GaugeField, Jet, Point, Polynomial,
    ScalarField, SpaceParams, TestBump,
};

use crate::config::{require_decreasing, CommandName, MethodSel, RunConfig};
use crate::error::CliError;
use crate::oracle;
use crate::report::{Check, Record, Report, Tolerance};

pub const DEFAULT_AHLFORS_RADII: [f64; 3] = [0.5, 1.0, 2.0];
pub const DEFAULT_DENSITY_RADII: [f64; 3] = [0.4, 0.2, 0.1];
pub const DEFAULT_DIRAC_RADII: [f64; 3] = [0.2, 0.1, 0.05];

/// Command-specific validation, run before any computation.
pub fn validate_for(cmd: CommandName, cfg: &RunConfig) -> Result<(), CliError> {
    match cmd {
        CommandName::Density => {
            let radii = cfg.radii_or(&DEFAULT_DENSITY_RADII);
            require_decreasing(&radii)?;
        }
        CommandName::Dirac => {
            let radii = cfg.radii_or(&DEFAULT_DIRAC_RADII);
            require_decreasing(&radii)?;
            if radii[0] >= cfg.support {
                return Err(CliError::Config(format!(
                    "radii must lie below the bump support {}",
                    cfg.support
                )));
            }
        }
        _ => {}
    }
    Ok(())
}

pub fn run(cmd: CommandName, cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new(cmd.as_str(), cfg);
    match cmd {
        CommandName::VerifyFundamental => verify_fundamental(cfg, &mut report)?,
        CommandName::VerifyInfinity => verify_infinity(cfg, &mut report)?,
        CommandName::BracketReport => bracket_report(cfg, &mut report)?,
        CommandName::Sigma => sigma(cfg, &mut report)?,
        CommandName::Ahlfors => ahlfors(cfg, &mut report)?,
        CommandName::Density => density(cfg, &mut report)?,
        CommandName::Dirac => dirac(cfg, &mut report)?,
        CommandName::Capacity => capacity(cfg, &mut report)?,
    }
    Ok(report)
}

/// Deterministic evaluation points around x0 with ψ ≥ 0.2 and Σ ≥ 1e−3,
/// away from the singular set.
pub fn regular_points(params: &SpaceParams, count: usize, seed: u64) -> Vec<Point> {
    let bx = SampleBox::new(params.x0().to_vec(), vec![1.5; params.dim()]);
    let mut out = Vec::with_capacity(count);
    let mut batch = 0;
    while out.len() < count {
        for x in uniform_points(&bx, 4 * count as u64, derive_seed(seed, batch)) {
            let pt = Point::new(x);
            let g = gauge(params, &pt).expect("dimension matches");
            if g.psi >= 0.2 && g.sigma >= 1e-3 && out.len() < count {
                out.push(pt);
            }
        }
        batch += 1;
    }
    out
}

fn rel_err(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

fn verify_fundamental(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let params = cfg.space();
    let p = cfg.p;
    let ex = exponents(&params, p)?;
    let field = GaugeField::fundamental(&params, p)?;
    let (k, c) = (params.k(), params.c());
    let mut residual = 0.0f64;
    let mut expansion = 0.0f64;
    let mut grad_psi = 0.0f64;
    let mut grad_u = 0.0f64;
    for pt in regular_points(&params, cfg.points, cfg.seed) {
        let g = gauge(&params, &pt)?;
        let du = horizontal_gradient(&params, &field, &pt)?;
        let n = du.norm();
        let lap = p_laplacian(&params, &field, &pt, p)?;
        residual = residual.max(lap.abs() / (1.0 + n.powf(p - 1.0) / g.psi));

        // both routes compute the same quantity; compare on the size of the
        // terms that cancel
        let div = p_laplacian_divergence_form(&params, &field, &pt, p)?;
        let jet = field.jet2(&params, &pt)?;
        let scale = n.powf(p - 2.0) * max_abs(jet.hess()).max(max_abs(jet.grad())).max(1.0);
        expansion = expansion.max((lap - div).abs() / scale);

        let n2 = horizontal_gradient(&params, &GaugeField::Psi, &pt)?.norm_squared();
        let want = c * c * g.sigma.powf(2.0 * k - 1.0) * g.h.powf((1.0 - 2.0 * k) / (2.0 * k));
        grad_psi = grad_psi.max(rel_err(n2, want));

        let want_u = match (ex.alpha, ex.w) {
            (Some(a), Some(w)) => a * a * c * c * g.h.powf(2.0 * w - 1.0) * g.sigma.powf(2.0 * k - 1.0),
            // ‖∇₀ log ψ‖² = ‖∇₀ψ‖²/ψ²
            _ => want / (g.psi * g.psi),
        };
        grad_u = grad_u.max(rel_err(du.norm_squared(), want_u));
    }
    let t = cfg.tolerances;
    report.record(Record::exact("points", cfg.points as f64));
    report.record(Record::exact("homogeneous_dimension", ex.q));
    if let Some(a) = ex.alpha {
        report.record(Record::exact("alpha", a));
    }
    report.record(Record::exact("max_scaled_p_laplacian", residual));
    report.record(Record::exact("max_divergence_form_mismatch", expansion));
    report.record(Record::exact("max_rel_err_grad_psi", grad_psi));
    report.record(Record::exact("max_rel_err_grad_fundamental", grad_u));
    report.check(Check::at_most("p_harmonic", residual, t.ad));
    report.check(Check::at_most("divergence_form_agrees", expansion, t.expansion));
    report.check(Check::at_most("grad_psi_identity", grad_psi, t.gradient));
    report.check(Check::at_most("grad_fundamental_identity", grad_u, t.gradient));
    Ok(())
}

fn verify_infinity(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let params = cfg.space();
    let mut residual = 0.0f64;
    for pt in regular_points(&params, cfg.points, cfg.seed) {
        let n = horizontal_gradient(&params, &GaugeField::Psi, &pt)?.norm();
        let v = infinity_laplacian(&params, &GaugeField::Psi, &pt)?;
        residual = residual.max(v.abs() / (1.0 + n.powi(3)));
    }
    report.record(Record::exact("points", cfg.points as f64));
    report.record(Record::exact("max_scaled_infinity_laplacian", residual));
    report.check(Check::at_most("infinity_harmonic", residual, cfg.tolerances.ad));
    Ok(())
}

fn bracket_report(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let params = cfg.space();
    let n = params.n();
    let m = params.horizontal_dim();
    let pts = regular_points(&params, cfg.points, cfg.seed);
    let cubics = oracle::cubics_for(&pts, derive_seed(cfg.seed, 0xb7));
    let mut fd_err = 0.0f64;
    let mut printed_gap = 0.0f64;
    let mut k_one_err = 0.0f64;
    for (pt, phi) in pts.iter().zip(&cubics) {
        for i in 1..=m {
            for j in i + 1..=m {
                let got = lie_bracket(&params, i, j, pt)?[m];
                let fd = oracle::commutator_coefficient(&params, i - 1, j - 1, pt, phi);
                fd_err = fd_err.max((fd - got).abs() / got.abs().max(1.0));
                let printed = lie_bracket_printed(&params, i, j, pt)?[m];
                printed_gap = printed_gap.max((printed - got).abs());
                let ideal = if j > n && i == j - n { -4.0 * params.c() } else { 0.0 };
                k_one_err = k_one_err.max((got - ideal).abs());
            }
        }
    }
    // bracket table at the first point
    if let Some(pt) = pts.first() {
        for i in 1..=m {
            for j in i + 1..=m {
                report.record(Record::exact(
                    format!("bracket[{i},{j}]"),
                    lie_bracket(&params, i, j, pt)?[m],
                ));
                report.record(Record::exact(
                    format!("printed[{i},{j}]"),
                    lie_bracket_printed(&params, i, j, pt)?[m],
                ));
            }
        }
    }
    let t = cfg.tolerances;
    report.record(Record::exact("max_rel_err_vs_finite_differences", fd_err));
    report.record(Record::exact("max_abs_printed_discrepancy", printed_gap));
    report.check(Check::at_most("bracket_matches_commutator", fd_err, t.bracket_fd));
    if (params.k() - 1.0).abs() < 1e-15 {
        report.check(Check::at_most("bracket_constant_at_k_one", k_one_err, t.bracket_exact));
        report.check(Check::at_most("printed_agrees_at_k_one", printed_gap, t.bracket_exact));
    }
    Ok(())
}

fn sigma(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let params = cfg.space();
    let a = sigma_p(&params, cfg.p, cfg.samples, cfg.seed)?;
    let b = sigma_p(&params, cfg.p, cfg.samples, derive_seed(cfg.seed, 1))?;
    report.record(Record::sampled("sigma_p", a.mean, a.stderr));
    report.record(Record::sampled("sigma_p_replicate", b.mean, b.stderr));
    report.check(Check::new(
        "replicates_agree",
        b.mean,
        a.mean,
        Some(a.stderr.hypot(b.stderr)),
        Tolerance::Sigma {
            n_sigma: cfg.tolerances.n_sigma,
        },
    ));
    Ok(())
}

fn ahlfors(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let params = cfg.space();
    let q = params.homogeneous_dim();
    let ns = cfg.tolerances.n_sigma;
    let radii = cfg.radii_or(&DEFAULT_AHLFORS_RADII);
    let mut est = Vec::new();
    for (i, &r) in radii.iter().enumerate() {
        let v = ball_measure(&params, cfg.p, r, cfg.samples, derive_seed(cfg.seed, i as u64 + 1))?;
        report.record(Record::sampled(format!("volume[R={r}]"), v.mean, v.stderr));
        let norm = v.scale(r.powf(-q));
        report.record(Record::sampled(
            format!("volume_over_R^Q[R={r}]"),
            norm.mean,
            norm.stderr,
        ));
        est.push((r, v, norm));
    }
    for a in 0..est.len() {
        for b in a + 1..est.len() {
            let (ra, _, na) = est[a];
            let (rb, _, nb) = est[b];
            report.check(Check::new(
                format!("constant_ratio[{ra},{rb}]"),
                nb.mean,
                na.mean,
                Some(na.stderr.hypot(nb.stderr)),
                Tolerance::Sigma { n_sigma: ns },
            ));
        }
    }
    let find = |r: f64| est.iter().find(|e| e.0 == r).map(|e| e.1);
    if let (Some(one), Some(two)) = (find(1.0), find(2.0)) {
        let (ratio, se) = two.ratio(&one);
        report.record(Record::sampled("volume_ratio_2_1", ratio, se));
        report.check(Check::new(
            "volume_ratio_2_1",
            ratio,
            2f64.powf(q),
            Some(se),
            Tolerance::Sigma { n_sigma: ns },
        ));
    }
    let lo = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = radii.iter().cloned().fold(0.0, f64::max);
    if hi > lo {
        let a = acceptance_ratio(&params, lo, cfg.samples, derive_seed(cfg.seed, 0xac1))?;
        let b = acceptance_ratio(&params, hi, cfg.samples, derive_seed(cfg.seed, 0xac2))?;
        report.record(Record::sampled(format!("acceptance[R={lo}]"), a.mean, a.stderr));
        report.record(Record::sampled(format!("acceptance[R={hi}]"), b.mean, b.stderr));
        report.check(Check::new(
            "acceptance_scale_free",
            b.mean,
            a.mean,
            Some(a.stderr.hypot(b.stderr)),
            Tolerance::Sigma { n_sigma: ns },
        ));
    }
    Ok(())
}

fn density(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let params = cfg.space();
    let q = params.homogeneous_dim();
    let t = cfg.tolerances;
    let one = Polynomial::constant(1.0, params.dim());
    let s1 = shell_integral_extrapolated(&params, cfg.p, 1.0, &one, cfg.samples, derive_seed(cfg.seed, 0x51))?;
    let s2 = shell_integral_extrapolated(&params, cfg.p, 2.0, &one, cfg.samples, derive_seed(cfg.seed, 0x52))?;
    let (ratio, se) = s2.ratio(&s1);
    report.record(Record::sampled("surface[R=1]", s1.mean, s1.stderr));
    report.record(Record::sampled("surface[R=2]", s2.mean, s2.stderr));
    report.record(Record::sampled("surface_ratio_2_1", ratio, se));
    report.check(Check::new(
        "surface_ratio_2_1",
        ratio,
        2f64.powf(q - 1.0),
        Some(se),
        Tolerance::Sigma { n_sigma: t.n_sigma },
    ));

    let bump = TestBump::new(cfg.support)?;
    let radii = cfg.radii_or(&DEFAULT_DENSITY_RADII);
    let table = density_limit(&params, cfg.p, &bump, &radii, cfg.samples, cfg.seed)?;
    report.record(Record::sampled("sigma_p", table.sigma_p.mean, table.sigma_p.stderr));
    for row in &table.rows {
        report.record(Record::sampled(
            format!("density[r={}]", row.radius),
            row.value,
            row.stderr,
        ));
    }
    report.record(Record::sampled("density_limit", table.limit.limit, table.limit.stderr));
    report.check(Check::new(
        "density_limit",
        table.limit.limit,
        1.0,
        Some(table.limit.stderr),
        Tolerance::Relative { tol: t.limit },
    ));
    Ok(())
}

fn dirac(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let params = cfg.space();
    let bump = TestBump::new(cfg.support)?;
    let radii = cfg.radii_or(&DEFAULT_DIRAC_RADII);
    let table = dirac_limit(&params, cfg.p, &bump, &radii, cfg.samples, cfg.seed)?;
    report.record(Record::exact("log_case", if table.log_case { 1.0 } else { 0.0 }));
    report.record(Record::sampled("sigma_p", table.sigma_p.mean, table.sigma_p.stderr));
    report.record(Record::sampled(
        "normalization",
        table.normalization,
        table.normalization.abs() * table.sigma_p.relative_stderr(),
    ));
    for row in &table.rows {
        report.record(Record::sampled(
            format!("pairing[r={}]", row.inner_radius),
            row.value,
            row.stderr,
        ));
    }
    report.record(Record::sampled("limit", table.limit.limit, table.limit.stderr));
    report.check(Check::new(
        "dirac_limit",
        table.limit.limit,
        table.expected,
        Some(table.limit.stderr),
        Tolerance::Relative {
            tol: cfg.tolerances.limit,
        },
    ));
    Ok(())
}

fn capacity(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let params = cfg.space();
    let (p, r, big_r) = (cfg.p, cfg.inner, cfg.outer);
    let t = cfg.tolerances;
    let closed = closed_form_capacity(&params, p, r, big_r)?.value;
    report.record(Record::exact("capacity_closed_form", closed));
    let want = |m: MethodSel| cfg.method == m || cfg.method == MethodSel::All;
    let radial = if want(MethodSel::Radial) {
        let min = minimize_radial(&params, p, r, big_r, cfg.knots)?;
        report.record(Record::exact("capacity_radial", min.energy));
        report.record(Record::exact("radial_iterations", min.iterations as f64));
        report.check(Check::new(
            "radial_vs_closed_form",
            min.energy,
            closed,
            None,
            Tolerance::Relative { tol: t.radial },
        ));
        Some(min.energy)
    } else {
        None
    };
    let mc = if want(MethodSel::Mc) {
        let est = mc_capacity(&params, p, r, big_r, cfg.samples, cfg.seed)?;
        report.record(Record::sampled("capacity_mc", est.value, est.stderr));
        report.check(Check::new(
            "mc_vs_closed_form",
            est.value,
            closed,
            Some(est.stderr),
            Tolerance::SigmaPlusRelative {
                n_sigma: t.n_sigma,
                tol: t.mc_relative,
            },
        ));
        Some(est.value)
    } else {
        None
    };
    if let (Some(a), Some(b)) = (radial, mc) {
        report.check(Check::new(
            "radial_vs_mc",
            b,
            a,
            None,
            Tolerance::Relative { tol: t.capacity },
        ));
    }
    if let Some(v) = radial {
        report.check(Check::new(
            "pairwise_closed_radial",
            v,
            closed,
            None,
            Tolerance::Relative { tol: t.capacity },
        ));
    }
    if let Some(v) = mc {
        report.check(Check::new(
            "pairwise_closed_mc",
            v,
            closed,
            None,
            Tolerance::Relative { tol: t.capacity },
        ));
    }
    Ok(())
}
