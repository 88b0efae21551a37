//! The four subcommands.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::astro::{self, StellarModel, Verdict};
use crate::calculus::{Interval, ScalarFunction};
use crate::cases::{
    self, condition_sides, manifest, sampler, seed_relation_check, BuildOptions, CaseId, CaseSpec,
    ConstructedCase,
};
use crate::exprlang;
use crate::riccati::{cross_ratio, family_residual_sup, integrate_numeric, Trajectory};
use crate::tol;

use super::{CliError, ConstructCfg, FuzzCfg, RunConfig, StarCfg, VerifyCfg};

fn out_file(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pick the case's constant from the flag set, rejecting mismatched
/// flags.
fn select_constant(case: CaseId, flags: &super::ConstantFlags) -> Result<Option<f64>, CliError> {
    let schema = &manifest()[(case.get() - 1) as usize];
    let given: Vec<(&str, f64)> = [
        ("C1", flags.c1),
        ("C3", flags.c3),
        ("C5", flags.c5),
        ("C7", flags.c7),
        ("C12", flags.c12),
    ]
    .into_iter()
    .filter_map(|(n, v)| v.map(|v| (n, v)))
    .collect();
    match schema.constant {
        None => {
            if let Some((name, _)) = given.first() {
                return Err(CliError::invalid(format!(
                    "case {case} does not take a constant (got --{name})"
                )));
            }
            Ok(None)
        }
        Some(expected) => {
            for (name, _) in &given {
                if *name != expected {
                    return Err(CliError::invalid(format!(
                        "case {case} takes --{expected}, got --{name}"
                    )));
                }
            }
            Ok(given.first().map(|&(_, v)| v))
        }
    }
}

fn build_case_spec(cfg: &ConstructCfg, tol_quad: f64) -> Result<(CaseSpec, BuildOptions), CliError> {
    let case = CaseId::new(cfg.case)?;
    let (lo, hi) = cfg.interval;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::invalid(format!("invalid interval [{lo}, {hi}]")));
    }
    let iv = Interval::new(lo, hi);
    let compile = |src: &Option<String>, label: &str| -> Result<Option<ScalarFunction>, CliError> {
        src.as_deref()
            .map(|s| exprlang::compile(s, label, iv).map_err(CliError::from))
            .transpose()
    };
    let spec = CaseSpec {
        case,
        a: compile(&cfg.a, "a")?,
        b: compile(&cfg.b, "b")?,
        c: compile(&cfg.c, "c")?,
        generator: exprlang::compile(&cfg.f, "f", iv)?,
        constant: select_constant(case, &cfg.constants)?,
        branch: cfg.branch,
        base_point: cfg.x0.unwrap_or(iv.lo),
        interval: iv,
    };
    let opts = BuildOptions {
        tol_quad,
        ..BuildOptions::default()
    };
    Ok((spec, opts))
}

pub fn cmd_construct(cfg: &ConstructCfg, run: &RunConfig) -> Result<(), CliError> {
    let (spec, opts) = build_case_spec(cfg, run.tol_quad)?;
    let cc = cases::construct_with(&spec, &opts)?;
    let seed_res = seed_relation_check(&cc)?;
    write_case_csv(&cc, &cfg.family_cs, &run.out_dir)?;
    write_construct_report(&cc, seed_res, &cfg.family_cs, &run.out_dir)?;
    println!(
        "construct case {}: condition residual {:.3e}, seed residual {:.3e}",
        cc.spec.case, cc.condition_residual, seed_res
    );
    Ok(())
}

fn write_case_csv(
    cc: &ConstructedCase,
    family_cs: &[f64],
    dir: &Path,
) -> Result<(), CliError> {
    let mut w = out_file(dir, "case.csv")?;
    let (lhs, rhs) = condition_sides(cc)?;
    let mut header = String::from("x,a,b,c,y_p,condition_lhs,condition_rhs");
    for c in family_cs {
        header.push_str(&format!(",y(C={c:?})"));
    }
    writeln!(w, "{header}")?;
    for x in cc.spec.interval.grid(tol::CHECK_GRID) {
        let (a, b, c) = cc.problem.coeffs_at(x)?;
        let mut line = format!(
            "{},{},{},{},{},{},{}",
            fmt(x),
            fmt(a),
            fmt(b),
            fmt(c),
            fmt(cc.y_p.eval(x)?),
            fmt(lhs.eval(x)?),
            fmt(rhs.eval(x)?)
        );
        for &fc in family_cs {
            let y = cc.general.eval(fc, x).unwrap_or(f64::NAN);
            line.push_str(&format!(",{}", fmt(y)));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

fn write_construct_report(
    cc: &ConstructedCase,
    seed_res: f64,
    family_cs: &[f64],
    dir: &Path,
) -> Result<(), CliError> {
    let mut w = out_file(dir, "report.txt")?;
    writeln!(w, "case {}", cc.spec.case)?;
    writeln!(w, "condition_residual {}", fmt(cc.condition_residual))?;
    writeln!(w, "seed_relation_residual {}", fmt(seed_res))?;
    let mut total = 0usize;
    for &c in family_cs {
        let poles = cc.general.poles(c);
        total += poles.len();
        let list = poles.iter().map(|p| fmt(*p)).collect::<Vec<_>>().join(" ");
        writeln!(w, "poles C={c:?} [{list}]")?;
    }
    writeln!(w, "POLES {total}")?;
    Ok(())
}

pub fn cmd_verify(cfg: &VerifyCfg, run: &RunConfig) -> Result<(), CliError> {
    let (spec, opts) = build_case_spec(&cfg.construct, run.tol_quad)?;
    let cc = cases::construct_with(&spec, &opts)?;
    let family = &cc.general;
    let iv = spec.interval;
    let x0 = spec.base_point;
    let c_member = cfg.family_c;

    let poles = family.poles(c_member);
    let guard = tol::POLE_GUARD_RADIUS * iv.width().max(1.0);
    let guarded = |x: f64| poles.iter().any(|&p| (x - p).abs() < guard);

    let y0 = family
        .eval(c_member, x0)
        .map_err(|e| CliError::new("POLE", 1, format!("member undefined at base point: {e}")))?;

    let mut trajectories: Vec<Trajectory> = Vec::new();
    if x0 < iv.hi {
        trajectories.push(integrate_numeric(&cc.problem, x0, y0, 1.0, iv.hi)?);
    }
    if x0 > iv.lo {
        trajectories.push(integrate_numeric(&cc.problem, x0, y0, -1.0, iv.lo)?);
    }

    let mut rows: Vec<(f64, f64, f64)> = Vec::new(); // x, closed, oracle
    let mut rk_pole: Option<f64> = None;
    for traj in &trajectories {
        if let Some(p) = traj.pole() {
            rk_pole = Some(p);
        }
        for &(x, y) in &traj.samples {
            if guarded(x) {
                continue;
            }
            if let Ok(cf) = family.eval(c_member, x) {
                rows.push((x, cf, y));
            }
        }
    }
    rows.sort_by(|p, q| p.0.total_cmp(&q.0));

    let mut w = out_file(&run.out_dir, "verify.csv")?;
    writeln!(w, "x,closed_form,rk_oracle,abs_err,rel_err")?;
    let mut sup_abs = 0.0f64;
    let mut sup_rel = 0.0f64;
    for &(x, cf, y) in &rows {
        let abs = (cf - y).abs();
        let rel = abs / (1.0 + cf.abs());
        sup_abs = sup_abs.max(abs);
        sup_rel = sup_rel.max(rel);
        writeln!(w, "{},{},{},{},{}", fmt(x), fmt(cf), fmt(y), fmt(abs), fmt(rel))?;
    }
    drop(w);

    // family-residual suite on the member and three neighbors
    let mut fam_res = 0.0f64;
    for offset in [0.0, -1.0, 1.0, 2.0] {
        let (r, _) = family_residual_sup(
            &cc.problem,
            family,
            c_member + offset,
            tol::CHECK_GRID,
            guard,
        )?;
        fam_res = fam_res.max(r);
    }

    // cross-ratio constancy of four spread members
    let quad_cs = [c_member + 1.0, c_member + 2.0, c_member + 3.5, c_member + 5.0];
    let members: Vec<ScalarFunction> = quad_cs.iter().map(|&c| family.member(c)).collect();
    let quad_guarded = |x: f64| {
        quad_cs
            .iter()
            .any(|&c| family.poles(c).iter().any(|&p| (x - p).abs() < guard))
    };
    let mut ratios = Vec::new();
    for x in iv.grid(16) {
        if quad_guarded(x) {
            continue;
        }
        if let Ok(r) = cross_ratio(&members[0], &members[1], &members[2], &members[3], x) {
            ratios.push(r);
        }
    }
    let cr_var = if ratios.len() >= 2 {
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        (max - min) / (1.0 + max.abs())
    } else {
        0.0
    };

    let rk_pass = sup_rel <= 1e-6;
    let fam_pass = fam_res <= tol::TOL_RES;
    let cr_pass = cr_var <= 1e-8;
    let mut pole_pass = true;

    let mut w = out_file(&run.out_dir, "summary.txt")?;
    writeln!(w, "case {} C={:?}", cc.spec.case, c_member)?;
    writeln!(w, "RK_SUP_ABS {}", fmt(sup_abs))?;
    writeln!(w, "RK_SUP_REL {} {}", fmt(sup_rel), pass_str(rk_pass))?;
    writeln!(w, "FAMILY_RESIDUAL {} {}", fmt(fam_res), pass_str(fam_pass))?;
    writeln!(w, "CROSS_RATIO_VAR {} {}", fmt(cr_var), pass_str(cr_pass))?;
    writeln!(w, "POLES {}", poles.len())?;
    for &p in &poles {
        writeln!(w, "pole_bracket [{}, {}]", fmt(p - guard), fmt(p + guard))?;
        if let Some(rk) = rk_pole {
            let delta = (p - rk).abs();
            pole_pass &= delta <= 1e-3;
            writeln!(w, "pole_vs_oracle {} {}", fmt(delta), pass_str(delta <= 1e-3))?;
        }
    }
    drop(w);

    println!(
        "verify case {}: rk sup rel {:.3e}, family residual {:.3e}, cross-ratio var {:.3e}, poles {}",
        cc.spec.case,
        sup_rel,
        fam_res,
        cr_var,
        poles.len()
    );
    if rk_pass && fam_pass && cr_pass && pole_pass {
        Ok(())
    } else {
        Err(CliError::new(
            "TOLERANCE",
            3,
            format!(
                "verification failed: rk {sup_rel:e} fam {fam_res:e} cross {cr_var:e} poles_ok {pole_pass}"
            ),
        ))
    }
}

fn pass_str(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn cmd_star(cfg: &StarCfg, run: &RunConfig) -> Result<(), CliError> {
    if !(cfg.radius > 0.0) {
        return Err(CliError::invalid(format!(
            "radius must be positive, got {}",
            cfg.radius
        )));
    }
    let x_hi = cfg.radius * cfg.radius;
    let iv = Interval::new(1e-6 * x_hi, x_hi);
    let eta = exprlang::compile(&cfg.eta, "eta", iv)?;
    let delta = exprlang::compile(&cfg.delta, "delta", iv)?;
    let model = StellarModel::new(eta, delta, cfg.a0, cfg.radius)?;

    let u = match (&cfg.u, cfg.case) {
        (Some(src), None) => exprlang::compile(src, "u", iv)?,
        (None, Some(case_id)) => star_u_from_case(cfg, &model, case_id, run.tol_quad)?,
        (Some(_), Some(_)) => {
            return Err(CliError::invalid("give either --u or --case, not both"))
        }
        (None, None) => return Err(CliError::invalid("one of --u or --case is required")),
    };

    let profile = astro::profile(&model, &u)?;

    let mut w = out_file(&run.out_dir, "profile.csv")?;
    astro::write_profile_csv(&profile, &mut w)?;
    drop(w);

    write_physicality(&profile, &run.out_dir)?;
    write_plot_script(&run.out_dir)?;

    println!(
        "star: profile of {} points written; physicality {}",
        profile.xs.len(),
        if profile.report.all_hold() {
            "all hold"
        } else {
            "has findings"
        }
    );
    Ok(())
}

/// Solve the mapped equation via a case construction: the free
/// coefficients are taken from the physics mapping, the generator and
/// constants from the flags, and `u` is the family member at the chosen
/// constant.
fn star_u_from_case(
    cfg: &StarCfg,
    model: &StellarModel,
    case_id: u8,
    tol_quad: f64,
) -> Result<ScalarFunction, CliError> {
    let case = CaseId::new(case_id)?;
    let p = astro::riccati_from_physics(model)?;
    let schema = &manifest()[(case.get() - 1) as usize];
    let slot = |name: &str| -> Option<ScalarFunction> {
        if schema.free_coefficients.contains(&name) {
            Some(match name {
                "a" => p.a().clone(),
                "b" => p.b().clone(),
                _ => p.c().clone(),
            })
        } else {
            None
        }
    };
    let f_src = cfg
        .f
        .as_deref()
        .ok_or_else(|| CliError::invalid("--case needs a generating function --f"))?;
    let iv = model.interval();
    let spec = CaseSpec {
        case,
        a: slot("a"),
        b: slot("b"),
        c: slot("c"),
        generator: exprlang::compile(f_src, "f", iv)?,
        constant: select_constant(case, &cfg.constants)?,
        branch: cfg.branch,
        base_point: iv.lo,
        interval: iv,
    };
    let opts = BuildOptions {
        tol_quad,
        ..BuildOptions::default()
    };
    let cc = cases::construct_with(&spec, &opts)?;
    Ok(cc.general.member(cfg.family_c))
}

fn verdict_line(name: &str, v: &Verdict) -> String {
    match v {
        Verdict::Holds { strict: true } => format!("{name} PASS"),
        Verdict::Holds { strict: false } => format!("{name} PASS (non-strict)"),
        Verdict::Fails { r, what } => format!("{name} FAIL at r={} ({what})", fmt(*r)),
        Verdict::Indeterminate { what } => format!("{name} INDETERMINATE ({what})"),
    }
}

fn write_physicality(profile: &astro::StellarProfile, dir: &Path) -> Result<(), CliError> {
    let mut w = out_file(dir, "physicality.txt")?;
    let rep = &profile.report;
    writeln!(w, "{}", verdict_line("(i) positivity", &rep.positivity))?;
    writeln!(w, "{}", verdict_line("(ii) gradients", &rep.monotonicity))?;
    writeln!(w, "{}", verdict_line("(iii) sound speed", &rep.causality))?;
    writeln!(
        w,
        "(iv) exterior match {} (V mismatch {}, required A0 {}, interpretation: A^2(R)=V(R)=1-2m(R)/R)",
        pass_str(rep.matching.holds),
        fmt(rep.matching.v_mismatch),
        fmt(rep.matching.required_a0),
    )?;
    writeln!(
        w,
        "{}",
        verdict_line("(v) boundary pressure", &rep.boundary_pressure)
    )?;
    Ok(())
}

fn write_plot_script(dir: &Path) -> Result<(), CliError> {
    let mut w = out_file(dir, "plot.gp")?;
    w.write_all(
        b"# gnuplot script for the star profile\n\
          set datafile separator ','\n\
          set key autotitle columnhead\n\
          set xlabel 'r'\n\
          set terminal pngcairo size 960,640\n\
          set output 'star_profiles.png'\n\
          plot 'profile.csv' using 1:6 with lines title 'rho', \\\n\
               'profile.csv' using 1:7 with lines title 'p_r', \\\n\
               'profile.csv' using 1:8 with lines title 'p_perp'\n",
    )?;
    Ok(())
}

pub fn cmd_fuzz(cfg: &FuzzCfg, run: &RunConfig) -> Result<(), CliError> {
    let cases: Vec<CaseId> = if cfg.cases.is_empty() {
        CaseId::all().collect()
    } else {
        cfg.cases
            .iter()
            .map(|&n| CaseId::new(n).map_err(CliError::from))
            .collect::<Result<_, _>>()?
    };
    let opts = BuildOptions {
        tol_quad: run.tol_quad,
        ..BuildOptions::default()
    };
    let tols = sampler::FuzzTolerances::default();
    let outcomes = sampler::run_fuzz(&cases, cfg.n, cfg.seed, &opts, &tols)?;

    let mut w = out_file(&run.out_dir, "fuzz.csv")?;
    writeln!(
        w,
        "case,digest,condition_residual,particular_residual,family_residual,seed_residual,pass"
    )?;
    let mut all_pass = true;
    for o in &outcomes {
        all_pass &= o.pass;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            o.case,
            o.digest,
            fmt(o.condition_residual),
            fmt(o.particular_residual),
            fmt(o.family_residual),
            fmt(o.seed_residual),
            o.pass
        )?;
    }
    drop(w);

    println!(
        "fuzz: {} construction(s), {}",
        outcomes.len(),
        if all_pass { "all pass" } else { "FAILURES" }
    );
    if all_pass {
        Ok(())
    } else {
        Err(CliError::new("TOLERANCE", 3, "fuzz suite has failures"))
    }
}
