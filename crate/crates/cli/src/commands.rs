use std::fs::{self, File};
use std::io::BufWriter;

use anyhow::{anyhow, bail, Context, Result};
use pvsym_core::checks::{run_suite, Suite, SuiteOptions};
use pvsym_core::classify::{canonicalize_1d, canonicalize_2d, Subalgebra};
use pvsym_core::liealg::{adjoint_matrix, adjoint_ode, adjoint_series, basis_a0, basis_a_beta};
use pvsym_core::pde::{beta_transform, residual_report, symmetry_transformation, transform_solution, Direction};
use pvsym_core::reduction::{build_case, build_case_symbolic, CaseParams};
use pvsym_core::solver::{self, beta_equivalence, run, write_csv, write_diagnostics_csv, write_raw, Field, Grid};
use pvsym_core::{parse, AlgebraElement, EvalPoint, Expr, PveParams};
use serde_json::{json, Value};

use crate::config::Config;
use crate::{Command, Outcome};

pub fn dispatch(cmd: &Command, cfg: &Config) -> Result<Outcome> {
    match cmd {
        Command::Bracket { v1, v2 } => bracket(v1, v2, cfg),
        Command::Adjoint { v, w, eps, order } => adjoint(v, w, *eps, *order, cfg),
        Command::Classify { dim, elements } => classify(*dim, elements),
        Command::Reduce { case, a, c, sign } => reduce(*case, *a, *c, *sign, cfg),
        Command::Verify { suite } => verify(suite, cfg),
        Command::Simulate => simulate(cfg),
        Command::Transform { psi, generator, eps, inverse } => transform(psi, generator.as_deref(), *eps, *inverse, cfg),
    }
}

fn element(spec: &str) -> Result<AlgebraElement> {
    AlgebraElement::from_spec(spec).with_context(|| format!("bad element spec `{spec}`"))
}

fn ok(body: Value) -> Result<Outcome> {
    Ok(Outcome { body, ok: true })
}

fn bracket(v1: &str, v2: &str, cfg: &Config) -> Result<Outcome> {
    let (a, b) = (element(v1)?, element(v2)?);
    let r = a.bracket(&b);
    let field = if cfg.beta == 0.0 {
        r.to_field(&basis_a0())
    } else {
        r.to_field(&basis_a_beta(&Expr::real(cfg.f), &Expr::real(cfg.beta)))
    };
    ok(json!({
        "v1": a.to_string(),
        "v2": b.to_string(),
        "coordinates": r,
        "element": r.to_string(),
        "field": field.to_string(),
    }))
}

fn adjoint(v: &str, w: &str, eps: f64, order: usize, cfg: &Config) -> Result<Outcome> {
    let (v, w) = (element(v)?, element(w)?);
    let series = adjoint_series(&v, &w, eps, order).map_err(|e| anyhow!(e))?;
    let ode = adjoint_ode(&v, &w, eps);
    let matrix = w.transformed(&adjoint_matrix(&v, eps));
    let diff = series.minus(&ode).max_abs().max(series.minus(&matrix).max_abs());
    Ok(Outcome {
        body: json!({
            "v": v.to_string(),
            "w": w.to_string(),
            "eps": eps,
            "result": series.to_string(),
            "coordinates": series,
            "ode": ode,
            "matrix": matrix,
            "max_method_difference": diff,
        }),
        ok: diff < cfg.tol.max(1e-9),
    })
}

fn classify(dim: usize, elements: &[String]) -> Result<Outcome> {
    let gens = elements.iter().map(|s| element(s)).collect::<Result<Vec<_>>>()?;
    let form = match (dim, gens.as_slice()) {
        (1, [v]) => canonicalize_1d(v)?,
        (2, [v, w]) => canonicalize_2d(&Subalgebra::two(*v, *w))?,
        (1 | 2, _) => bail!("--dim {dim} needs exactly {dim} element(s), got {}", gens.len()),
        _ => bail!("--dim must be 1 or 2"),
    };
    ok(json!({
        "input": gens.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "canonical": form.to_string(),
        "witness_error": form.witness_error(&gens),
        "form": form,
    }))
}

fn reduce(case: u8, a: Option<f64>, c: Option<f64>, sign: i8, cfg: &Config) -> Result<Outcome> {
    let rc = if a.is_none() && c.is_none() {
        build_case_symbolic(case, sign)?
    } else {
        build_case(case, CaseParams { a: a.unwrap_or(0.0), c: c.unwrap_or(0.0), eps: sign, f: cfg.f })?
    };
    let mut body = rc.describe();
    if !rc.is_reducible() {
        body["notice"] = json!("no reduction can be achieved");
    }
    ok(body)
}

fn verify(suite: &str, cfg: &Config) -> Result<Outcome> {
    let suites: Vec<Suite> = if suite == "all" { Suite::ALL.to_vec() } else { vec![suite.parse().map_err(|e: String| anyhow!(e))?] };
    let opts = SuiteOptions { params: PveParams::new(cfg.f, cfg.beta), seed: cfg.seed };
    let reports: Vec<_> = suites.into_iter().map(|s| run_suite(s, &opts)).collect();
    let failures: Vec<String> =
        reports.iter().flat_map(|r| r.failures().into_iter().map(move |f| format!("{}: {f}", r.suite.name()))).collect();
    Ok(Outcome { ok: failures.is_empty(), body: json!({ "seed": cfg.seed, "failures": failures, "reports": reports }) })
}

fn initial_field(cfg: &Config, grid: Grid) -> Result<(Field, Option<Expr>)> {
    let expr = |s: &str| parse(s).map_err(|e| anyhow!("initial: {e}"));
    Ok(match cfg.initial.as_str() {
        "stationary" => {
            let e = expr("sin(x)*sin(y)")?;
            (Field::from_expr(grid, 0.0, &e, &EvalPoint::new())?, Some(e))
        }
        "rossby" => {
            let sigma = -cfg.beta / (cfg.k * cfg.k + cfg.f);
            let e = Expr::real(cfg.amplitude) * (Expr::real(cfg.k) * (Expr::sym("x") - Expr::real(sigma) * Expr::sym("t"))).sin();
            (Field::from_expr(grid, 0.0, &e, &EvalPoint::new())?, Some(e))
        }
        "random" => (Field::random_smooth(grid, 4, cfg.seed), None),
        other => {
            let e = expr(other)?;
            if e.depends_on("t") {
                bail!("initial expression must not depend on t");
            }
            (Field::from_expr(grid, 0.0, &e, &EvalPoint::new())?, None)
        }
    })
}

fn simulate(cfg: &Config) -> Result<Outcome> {
    let grid = Grid::new(cfg.n, cfg.n)?;
    let (psi0, exact) = initial_field(cfg, grid)?;
    if cfg.mode == "beta-equivalence" {
        let rep = beta_equivalence(&psi0, cfg.f, cfg.beta, cfg.dt, cfg.t_end, cfg.dealias)?;
        return Ok(Outcome { ok: rep.passed(), body: json!({ "mode": cfg.mode, "report": rep }) });
    }
    let scfg = solver::SolverConfig {
        f: cfg.f,
        beta: cfg.beta,
        dt: cfg.dt,
        t_end: cfg.t_end,
        dealias: cfg.dealias,
        output_every: cfg.output_every,
        background_gradient: 0.0,
    };
    let res = run(&psi0, &scfg)?;
    let reference_error = match &exact {
        Some(e) => Some(res.field.max_diff(&Field::from_expr(grid, res.field.t, e, &EvalPoint::new())?)),
        None => None,
    };
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_csv(&psi0, BufWriter::new(File::create(dir.join("initial.csv"))?))?;
        write_csv(&res.field, BufWriter::new(File::create(dir.join("final.csv"))?))?;
        write_raw(&res.field, &dir.join("final.bin"))?;
        write_diagnostics_csv(&res.diagnostics, BufWriter::new(File::create(dir.join("diagnostics.csv"))?))?;
    }
    let (de, dz) = res.drift();
    let body = json!({
        "mode": cfg.mode,
        "config": cfg,
        "steps": res.steps,
        "t": res.field.t,
        "cfl": res.cfl,
        "warnings": res.warnings,
        "energy_drift": de,
        "enstrophy_drift": dz,
        "final_diagnostics": res.diagnostics.last(),
        "reference_error": reference_error,
        "max_diff_from_initial": res.field.max_diff(&psi0),
    });
    if let Some(dir) = &cfg.out {
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(&body)? + "\n")?;
    }
    ok(body)
}

fn transform(psi: &str, generator: Option<&str>, eps: f64, inverse: bool, cfg: &Config) -> Result<Outcome> {
    let psi = parse(psi).map_err(|e| anyhow!("psi: {e}"))?;
    let params = PveParams::new(cfg.f, cfg.beta);
    let (image, source, target) = match generator {
        Some(g) => {
            let tr = symmetry_transformation(&element(g)?, eps, &params)?;
            (transform_solution(&psi, &tr, Direction::Forward)?, params, params)
        }
        None => {
            let tr = beta_transform(&params)?;
            let flat = PveParams::new(cfg.f, 0.0);
            if inverse {
                (transform_solution(&psi, &tr, Direction::Forward)?, params, flat)
            } else {
                (transform_solution(&psi, &tr, Direction::Inverse)?, flat, params)
            }
        }
    };
    let before = residual_report(&psi, &source, 100, cfg.seed);
    let after = residual_report(&image, &target, 100, cfg.seed);
    Ok(Outcome {
        ok: after.residual_max_abs < cfg.tol,
        body: json!({
            "input": psi.to_string(),
            "image": image.to_string(),
            "source_params": source,
            "target_params": target,
            "input_residual": before,
            "image_residual": after,
        }),
    })
}
