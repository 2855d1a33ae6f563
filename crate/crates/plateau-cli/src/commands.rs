//! One dispatch point for every subcommand: a RunConfig in, artifacts plus a
//! provenance record out. The CLI flags and the config-file front end both
//! funnel through here, which is what makes runs reproducible from their
//! RunConfig alone.

use crate::config::{Provenance, RunConfig};
use anyhow::{anyhow, bail, Context, Result};
use plateau_core::audit::{
    el_residuals, energy_eval, gauss_bonnet_check_mesh, gauss_bonnet_check_patch,
    geodesic_variation_check, scaling_identity_check, torsion_flux_check, AuditReport,
    ElTolerances, SurfaceDomain, VariationField,
};
use plateau_core::bjorling::{
    bjorling_surface, continue_boundary, fit_helicoid_params, showcase_preset, CurvatureSource,
    FitMode, HelicoidPatch,
};
use plateau_core::boundary::{
    alpha_zero_solution, boundary_integrate, boundary_residuals, classify_branch, BoundaryState,
};
use plateau_core::elastica::{
    buckled_ring_shoot, circle_roots, elastica_integrate, ode_residual,
    turning_number, EnergyParams, RingGuess, RingTolerances,
};
use plateau_core::geom::darboux::{darboux_from_patch, PatchBoundary, UvCurve};
use plateau_core::geom::mesh::{mesh_from_patch, TriMesh};
use plateau_core::geom::patch::{
    ConformalHelicoidPatch, HemispherePatch, ParamPatch, PlanarAnnulusPatch, PlanarDiskPatch,
};
use plateau_core::{io as pio, Sheet};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

pub struct RunOutcome {
    pub exit: i32,
    pub provenance: Provenance,
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<String> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), text)?;
    Ok(name.to_string())
}

fn write_with<F>(dir: &Path, name: &str, f: F) -> Result<String>
where
    F: FnOnce(&mut Vec<u8>) -> plateau_core::Result<()>,
{
    std::fs::create_dir_all(dir)?;
    let mut buf = Vec::new();
    f(&mut buf)?;
    std::fs::write(dir.join(name), &buf)?;
    Ok(name.to_string())
}

fn energy_params(cfg: &RunConfig, default_eta: f64) -> Result<EnergyParams> {
    let sigma = cfg.f64("sigma")?;
    let eta = cfg.f64_or("eta", default_eta)?;
    let alpha = cfg.f64("alpha")?;
    let beta = cfg.f64("beta")?;
    if cfg.str_or("relaxed", "false") == "true" {
        Ok(EnergyParams::relaxed(sigma, eta, alpha, beta))
    } else {
        Ok(EnergyParams::new(sigma, eta, alpha, beta)?)
    }
}

fn sheet(cfg: &RunConfig) -> Result<Sheet> {
    Ok(Sheet::from_str(cfg.str_or("sheet", "plus"))?)
}

fn report_outcome(
    cfg: &RunConfig,
    out_dir: &Path,
    stem: &str,
    report: &AuditReport,
) -> Result<RunOutcome> {
    let mut prov = Provenance::new(cfg);
    for (k, c) in &report.checks {
        prov.residual(k, c.abs_residual);
    }
    let name = write_text(out_dir, &format!("{stem}.json"), &pio::to_json_pretty(report)?)?;
    prov.artifacts.push(name);
    println!("{report}");
    Ok(RunOutcome {
        exit: report.exit_code(),
        provenance: prov,
    })
}

/// Execute one run. Numerical failures bubble up as errors; audit failures
/// exit 1 via the report.
pub fn dispatch(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    match cfg.command.as_str() {
        "elastica-circles" => elastica_circles(cfg, out_dir),
        "elastica-integrate" => elastica_integrate_cmd(cfg, out_dir),
        "elastica-ring" => elastica_ring(cfg, out_dir),
        "boundary-integrate" => boundary_integrate_cmd(cfg, out_dir, true),
        "boundary-classify" => boundary_integrate_cmd(cfg, out_dir, false),
        "boundary-alpha-zero" => boundary_alpha_zero(cfg, out_dir),
        "bjorling-build" => bjorling_build(cfg, out_dir, None),
        "bjorling-fig1" => {
            let set = cfg.usize_or("set", 1)?;
            bjorling_build(cfg, out_dir, Some(set))
        }
        "helicoid-make" => helicoid_make(cfg, out_dir),
        "helicoid-fit" => helicoid_fit(cfg, out_dir),
        "audit-energy" => audit_energy(cfg, out_dir),
        "audit-el" => audit_el(cfg, out_dir),
        "audit-scaling" => audit_scaling(cfg, out_dir),
        "audit-gauss-bonnet" => audit_gauss_bonnet(cfg, out_dir),
        "audit-flux" => audit_flux(cfg, out_dir),
        "audit-variation" => audit_variation(cfg, out_dir),
        other => bail!("unknown command '{other}'"),
    }
}

fn elastica_circles(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let params = energy_params(cfg, 0.0)?;
    let roots = circle_roots(&params)?;
    let mut prov = Provenance::new(cfg);
    let mut worst = 0.0f64;
    for r in &roots.roots {
        let scale = params.alpha * r.kappa.abs().powi(3)
            + params.beta.abs() * r.kappa.abs()
            + params.sigma.abs();
        worst = worst.max(
            plateau_core::elastica::circle_polynomial(&params, r.kappa).abs() / scale.max(1e-300),
        );
        println!("kappa_o = {:+.12e}  (multiplicity {})", r.kappa, r.multiplicity);
    }
    prov.residual("max_relative_root_residual", worst);
    let name = write_text(out_dir, "circles.json", &pio::to_json_pretty(&roots)?)?;
    prov.artifacts.push(name);
    Ok(RunOutcome {
        exit: 0,
        provenance: prov,
    })
}

fn elastica_integrate_cmd(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let params = energy_params(cfg, 0.0)?;
    let sol = elastica_integrate(
        &params,
        cfg.f64("kg0")?,
        cfg.f64_or("kgp0", 0.0)?,
        cfg.f64_or("length", 50.0)?,
        cfg.f64_or("step", 1e-3)?,
    )?;
    let mut prov = Provenance::new(cfg);
    prov.residual("d_drift", sol.d_drift);
    prov.residual("ode_residual", ode_residual(&sol));
    let csv = write_with(out_dir, "elastica.csv", |w| pio::write_elastica_csv(&sol, w))?;
    #[derive(serde::Serialize)]
    struct Sidecar<'a> {
        params: &'a EnergyParams,
        d: f64,
        d_drift: f64,
        period: Option<f64>,
        ode_residual: f64,
    }
    let sidecar = Sidecar {
        params: &params,
        d: sol.d,
        d_drift: sol.d_drift,
        period: sol.period,
        ode_residual: ode_residual(&sol),
    };
    let json = write_text(out_dir, "elastica.json", &pio::to_json_pretty(&sidecar)?)?;
    prov.artifacts.extend([csv, json]);
    println!(
        "d = {:.12e}, drift {:.3e}, period {:?}",
        sol.d, sol.d_drift, sol.period
    );
    Ok(RunOutcome {
        exit: 0,
        provenance: prov,
    })
}

fn elastica_ring(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let params = energy_params(cfg, 0.0)?;
    let ring = buckled_ring_shoot(
        &params,
        cfg.i32_req("turning-number")?,
        RingGuess {
            kappa_g0: cfg.f64("kg0")?,
            period: cfg.f64_or("length-hint", 0.0).ok().filter(|v| *v > 0.0),
        },
        RingTolerances::default(),
    )?;
    let mut prov = Provenance::new(cfg);
    prov.residual("closure", ring.closure);
    prov.residual("ode_residual", ring.ode_residual);
    prov.residual("turning_residual", ring.turning_residual);
    let csv = write_with(out_dir, "ring.csv", |w| {
        pio::write_elastica_csv(&ring.solution, w)
    })?;
    let curve_csv = write_with(out_dir, "ring_curve.csv", |w| {
        pio::write_arc_curve_csv(&ring.curve, w)
    })?;
    #[derive(serde::Serialize)]
    struct Sidecar<'a> {
        params: &'a EnergyParams,
        iterations: usize,
        lobes: usize,
        closure: f64,
        ode_residual: f64,
        turning_residual: f64,
        turning_number: f64,
    }
    let json = write_text(
        out_dir,
        "ring.json",
        &pio::to_json_pretty(&Sidecar {
            params: &params,
            iterations: ring.iterations,
            lobes: ring.lobes,
            closure: ring.closure,
            ode_residual: ring.ode_residual,
            turning_residual: ring.turning_residual,
            turning_number: turning_number(&ring.solution),
        })?,
    )?;
    prov.artifacts.extend([csv, curve_csv, json]);
    println!(
        "ring: {} lobes, closure {:.3e}, ODE residual {:.3e} ({} iterations)",
        ring.lobes, ring.closure, ring.ode_residual, ring.iterations
    );
    Ok(RunOutcome {
        exit: 0,
        provenance: prov,
    })
}

fn boundary_integrate_cmd(cfg: &RunConfig, out_dir: &Path, with_csv: bool) -> Result<RunOutcome> {
    let params = energy_params(cfg, 1.0)?;
    let state0 = BoundaryState::new(cfg.f64("kg0")?, cfg.f64_or("kgp0", 0.0)?, cfg.f64("tg0")?);
    let sheet = sheet(cfg)?;
    let traj = boundary_integrate(
        &params,
        &state0,
        sheet,
        cfg.f64_or("length", 50.0)?,
        cfg.f64_or("step", 1e-3)?,
    )?;
    let branch = classify_branch(&params, &traj.states, cfg.f64_or("tol", 1e-8)?)?;
    let (r13, r14) = boundary_residuals(&params, &traj);
    let mut prov = Provenance::new(cfg);
    prov.residual("c_drift", traj.c_drift);
    prov.residual("eq_binormal", r13);
    prov.residual("eq_conormal", r14);
    #[derive(serde::Serialize)]
    struct Sidecar<'a> {
        params: &'a EnergyParams,
        c: f64,
        sheet: Sheet,
        branch: plateau_core::boundary::BranchTag,
        residuals: BTreeMap<String, f64>,
    }
    let mut residuals = BTreeMap::new();
    residuals.insert("c_drift".to_string(), traj.c_drift);
    residuals.insert("eq_binormal".to_string(), r13);
    residuals.insert("eq_conormal".to_string(), r14);
    let sidecar = Sidecar {
        params: &params,
        c: traj.c,
        sheet,
        branch,
        residuals,
    };
    let stem = if with_csv { "trajectory" } else { "classify" };
    if with_csv {
        let csv = write_with(out_dir, "trajectory.csv", |w| pio::write_boundary_csv(&traj, w))?;
        prov.artifacts.push(csv);
    }
    let json = write_text(out_dir, &format!("{stem}.json"), &pio::to_json_pretty(&sidecar)?)?;
    prov.artifacts.push(json);
    println!(
        "c = {:.12e}, branch {:?}, drift {:.3e}, eq residuals ({:.3e}, {:.3e})",
        traj.c, sidecar.branch, traj.c_drift, r13, r14
    );
    Ok(RunOutcome {
        exit: 0,
        provenance: prov,
    })
}

fn boundary_alpha_zero(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let sigma = cfg.f64("sigma")?;
    let eta = cfg.f64_or("eta", 1.0)?;
    let beta = cfg.f64("beta")?;
    let params = EnergyParams::new(sigma, eta, 0.0, beta)?;
    let disk = alpha_zero_solution(&params)?;
    let mut prov = Provenance::new(cfg);
    prov.residual("el_residual", disk.el_residual);
    let name = write_text(out_dir, "alpha_zero.json", &pio::to_json_pretty(&disk)?)?;
    prov.artifacts.push(name);
    println!(
        "radius = {:.12e}, valid = {}, residual = {:.3e}",
        disk.radius, disk.valid, disk.el_residual
    );
    Ok(RunOutcome {
        exit: 0,
        provenance: prov,
    })
}

fn bjorling_build(cfg: &RunConfig, out_dir: &Path, fig1_set: Option<usize>) -> Result<RunOutcome> {
    let (params, state0, sheet_v, stem) = match fig1_set {
        Some(set) => {
            let (p, s, sh) =
                showcase_preset(set).ok_or_else(|| anyhow!("fig1 set must be 1, 2, or 3"))?;
            (p, s, sh, format!("fig1_set{set}"))
        }
        None => {
            let p = energy_params(cfg, 1.0)?;
            let s = BoundaryState::new(
                cfg.f64("kg0")?,
                cfg.f64_or("kgp0", 0.0)?,
                cfg.f64("tg0")?,
            );
            (p, s, sheet(cfg)?, "bjorling".to_string())
        }
    };
    let s_len = cfg.f64_or("s-len", 8.0)?;
    let t_half = cfg.f64_or("t-half", 0.25)?;
    let ns = cfg.usize_or("ns", 400)?;
    let nt = cfg.usize_or("nt", 50)?;

    let strip = continue_boundary(
        CurvatureSource::Equilibrium { params, state0 },
        sheet_v,
        s_len,
        t_half,
        ns,
        nt,
    )?;
    let build = bjorling_surface(&strip)?;

    // equilibrium residuals of the core curve, independently differenced
    let traj = boundary_integrate(&params, &state0, sheet_v, s_len, 1e-3)?;
    let (r13, r14) = boundary_residuals(&params, &traj);
    let mut report = build.report.clone();
    report.insert(
        "core_eq_binormal",
        plateau_core::audit::CheckRecord::residual(r13, 1e-8),
    );
    report.insert(
        "core_eq_conormal",
        plateau_core::audit::CheckRecord::residual(r14, 1e-8),
    );

    let mut prov = Provenance::new(cfg);
    for (k, c) in &report.checks {
        prov.residual(k, c.abs_residual);
    }
    let obj = write_with(out_dir, &format!("{stem}.obj"), |w| {
        pio::write_obj(&build.mesh, w)
    })?;
    let csv = write_with(out_dir, &format!("{stem}_strip.csv"), |w| {
        pio::write_strip_csv(&strip, w)
    })?;
    let json = write_text(
        out_dir,
        &format!("{stem}_audit.json"),
        &pio::to_json_pretty(&report)?,
    )?;
    prov.artifacts.extend([obj, csv, json]);
    println!("{report}");
    Ok(RunOutcome {
        exit: report.exit_code(),
        provenance: prov,
    })
}

fn helicoid_make(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let a = cfg.f64("a")?;
    let r0 = cfg.f64("r0")?;
    let r1 = cfg.f64("r1")?;
    let nu = cfg.usize_or("nu", 33)?;
    let nv = cfg.usize_or("nv", 129)?;
    let conformal = cfg.str_or("conformal", "false") == "true";
    let mut prov = Provenance::new(cfg);
    let mesh = if conformal {
        let p = ConformalHelicoidPatch::from_radii(a, r0, r1)?;
        mesh_from_patch(&p, nu, nv)?
    } else {
        let p = HelicoidPatch::annulus(a, r0, r1)?;
        mesh_from_patch(&p, nu, nv)?
    };
    let h = HelicoidPatch::annulus(a, r0, r1)?;
    let (inner, outer) = h.rim_darboux();
    #[derive(serde::Serialize)]
    struct Sidecar {
        area: f64,
        inner: BoundaryState,
        outer: BoundaryState,
        euler_characteristic: i64,
        boundary_loops: usize,
    }
    let sidecar = Sidecar {
        area: h.area(),
        inner,
        outer,
        euler_characteristic: mesh.euler_characteristic(),
        boundary_loops: mesh.boundary_loops.len(),
    };
    let obj = write_with(out_dir, "helicoid.obj", |w| pio::write_obj(&mesh, w))?;
    let json = write_text(out_dir, "helicoid.json", &pio::to_json_pretty(&sidecar)?)?;
    let rims = [
        ("helicoid_inner_rim.csv", h.helix_boundary(r0, Sheet::Plus, 256)),
        ("helicoid_outer_rim.csv", h.helix_boundary(r1, Sheet::Minus, 256)),
    ];
    for (name, rim) in rims {
        let csv = write_with(out_dir, name, |w| pio::write_darboux_csv(&rim.darboux, w))?;
        prov.artifacts.push(csv);
    }
    prov.artifacts.extend([obj, json]);
    println!(
        "helicoid annulus a={a}, r in [{r0}, {r1}]: area {:.9e}, chi {}",
        sidecar.area, sidecar.euler_characteristic
    );
    Ok(RunOutcome {
        exit: 0,
        provenance: prov,
    })
}

fn helicoid_fit(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let a = cfg.f64("a")?;
    let r0 = cfg.f64("r0")?;
    let alpha = cfg.f64("alpha")?;
    let beta = cfg.f64("beta")?;
    let sheet_v = sheet(cfg)?;
    let mode = match (cfg.params.get("r1"), cfg.params.get("eta")) {
        (Some(r1), None) => FitMode::TwoBoundary { r1: r1.parse()? },
        (None, Some(eta)) => FitMode::SingleBoundary { eta: eta.parse()? },
        _ => bail!("exactly one of r1 (two-boundary) or eta (single-boundary) must be given"),
    };
    let fit = fit_helicoid_params(a, r0, mode, alpha, beta, sheet_v)?;
    let mut prov = Provenance::new(cfg);
    prov.residual("fit_residual", fit.residual);
    let json = write_text(out_dir, "fit.json", &pio::to_json_pretty(&fit)?)?;
    prov.artifacts.push(json);
    println!(
        "sigma = {:+.12e}, eta = {:+.12e}, valid = {}",
        fit.sigma, fit.eta, fit.valid
    );
    Ok(RunOutcome {
        exit: 0,
        provenance: prov,
    })
}

enum Fixture {
    Disk(PlanarDiskPatch),
    Helicoid(ConformalHelicoidPatch),
    Hemisphere(HemispherePatch),
}

impl Fixture {
    fn parse(cfg: &RunConfig) -> Result<Self> {
        match cfg.str_or("fixture", "disk") {
            "disk" => Ok(Fixture::Disk(PlanarDiskPatch {
                radius: cfg.f64_or("radius", 1.0)?,
            })),
            "helicoid" => Ok(Fixture::Helicoid(ConformalHelicoidPatch::from_radii(
                cfg.f64_or("a", 1.0)?,
                cfg.f64_or("r0", 1.0)?,
                cfg.f64_or("r1", 2.0)?,
            )?)),
            "hemisphere" => Ok(Fixture::Hemisphere(HemispherePatch {
                radius: cfg.f64_or("radius", 1.0)?,
            })),
            other => bail!("unknown fixture '{other}'"),
        }
    }

    fn patch(&self) -> &dyn ParamPatch {
        match self {
            Fixture::Disk(p) => p,
            Fixture::Helicoid(p) => p,
            Fixture::Hemisphere(p) => p,
        }
    }

    /// Positively oriented boundary loops with measured Darboux data.
    fn boundaries(&self, n: usize) -> Result<Vec<PatchBoundary>> {
        let p = self.patch();
        let d = p.domain();
        match self {
            Fixture::Disk(_) | Fixture::Hemisphere(_) => {
                Ok(vec![darboux_from_patch(p, &UvCurve::u_line(p, d.u.1), n)?])
            }
            Fixture::Helicoid(_) => Ok(vec![
                darboux_from_patch(p, &UvCurve::u_line_reversed(p, d.u.0), n)?,
                darboux_from_patch(p, &UvCurve::u_line(p, d.u.1), n)?,
            ]),
        }
    }
}

fn audit_energy(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let params = energy_params(cfg, 0.0)?;
    let fixture = Fixture::parse(cfg)?;
    let boundaries = fixture.boundaries(cfg.usize_or("samples", 512)?)?;
    let breakdown = energy_eval(
        &SurfaceDomain::Patch {
            patch: fixture.patch(),
            nu: 48,
            nv: 48,
        },
        &boundaries,
        &params,
    )?;
    let mut prov = Provenance::new(cfg);
    prov.residual("total_energy", breakdown.total);
    let json = write_text(out_dir, "energy.json", &pio::to_json_pretty(&breakdown)?)?;
    prov.artifacts.push(json);
    println!(
        "area {:.10e}  total_gauss {:.10e}  bending {:.10e}  total {:.10e}",
        breakdown.area, breakdown.total_gauss, breakdown.bending_integral, breakdown.total
    );
    Ok(RunOutcome {
        exit: 0,
        provenance: prov,
    })
}

fn audit_el(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let params = energy_params(cfg, 0.0)?;
    let fixture = Fixture::parse(cfg)?;
    let boundaries = fixture.boundaries(cfg.usize_or("samples", 512)?)?;
    let tol = ElTolerances {
        interior: cfg.f64_or("tol", 1e-10)?,
        boundary: cfg.f64_or("tol", 1e-10)?,
    };
    let report = el_residuals(Some(fixture.patch()), &boundaries, &params, tol)?;
    report_outcome(cfg, out_dir, "el_audit", &report)
}

fn audit_scaling(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let params = energy_params(cfg, 0.0)?;
    let fixture = Fixture::parse(cfg)?;
    let boundaries = fixture.boundaries(cfg.usize_or("samples", 512)?)?;
    let report = scaling_identity_check(
        &SurfaceDomain::Patch {
            patch: fixture.patch(),
            nu: 64,
            nv: 64,
        },
        &boundaries,
        &params,
        cfg.f64_or("tol", 1e-10)?,
    )?;
    report_outcome(cfg, out_dir, "scaling_audit", &report)
}

fn audit_gauss_bonnet(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let tol = cfg.f64_or("tol", 1e-10)?;
    let report = if let Some(path) = cfg.params.get("in") {
        let file = std::fs::File::open(path).with_context(|| format!("opening {path}"))?;
        let mesh = pio::read_obj(std::io::BufReader::new(file))?;
        gauss_bonnet_check_mesh(&mesh, tol)?
    } else {
        let mesh = match cfg.str_or("fixture", "disk") {
            "disk" => TriMesh::disk(cfg.f64_or("radius", 1.0)?, 12, 48),
            "annulus" => {
                let p = PlanarAnnulusPatch::new(cfg.f64_or("r0", 1.0)?, cfg.f64_or("r1", 2.0)?)?;
                mesh_from_patch(&p, 17, 65)?
            }
            "holed-plate" => TriMesh::holed_plate(24, 2),
            "helicoid" => {
                let p = ConformalHelicoidPatch::from_radii(
                    cfg.f64_or("a", 1.0)?,
                    cfg.f64_or("r0", 1.0)?,
                    cfg.f64_or("r1", 2.0)?,
                )?;
                mesh_from_patch(&p, 17, 65)?
            }
            other => bail!("unknown gauss-bonnet fixture '{other}'"),
        };
        let mut report = gauss_bonnet_check_mesh(&mesh, tol)?;
        if cfg.str_or("fixture", "disk") == "helicoid" {
            // also run the smooth estimator route on the same geometry
            let p = ConformalHelicoidPatch::from_radii(
                cfg.f64_or("a", 1.0)?,
                cfg.f64_or("r0", 1.0)?,
                cfg.f64_or("r1", 2.0)?,
            )?;
            let inner = darboux_from_patch(&p, &UvCurve::u_line_reversed(&p, p.u0), 512)?;
            let outer = darboux_from_patch(&p, &UvCurve::u_line(&p, p.u1), 512)?;
            let smooth = gauss_bonnet_check_patch(&p, &[inner, outer], 0, 48, 1e-7)?;
            report.merge("", &smooth);
        }
        report
    };
    report_outcome(cfg, out_dir, "gauss_bonnet_audit", &report)
}

fn audit_flux(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let report = match cfg.str_or("fixture", "helicoid") {
        "helicoid" => {
            let p = ConformalHelicoidPatch::from_radii(
                cfg.f64_or("a", 1.0)?,
                cfg.f64_or("r0", 1.0)?,
                cfg.f64_or("r1", 2.0)?,
            )?;
            torsion_flux_check(&p, cfg.usize_or("samples", 512)?)?
        }
        "planar-annulus" => {
            let p = PlanarAnnulusPatch::new(cfg.f64_or("r0", 1.0)?, cfg.f64_or("r1", 2.0)?)?;
            torsion_flux_check(&p, cfg.usize_or("samples", 512)?)?
        }
        other => bail!("unknown flux fixture '{other}'"),
    };
    report_outcome(cfg, out_dir, "flux_audit", &report)
}

fn audit_variation(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let epsilons: Vec<f64> = cfg
        .str_or("eps", "1e-2,5e-3,2.5e-3")
        .split(',')
        .map(|t| t.trim().parse::<f64>().context("bad eps list"))
        .collect::<Result<_>>()?;
    let samples = cfg.usize_or("samples", 256)?;
    let fixture = Fixture::parse(cfg)?;
    let patch = fixture.patch();
    let d = patch.domain();
    let loops: Vec<UvCurve> = match &fixture {
        Fixture::Disk(p) => {
            let r = p.radius;
            vec![
                UvCurve::new(move |t| (r, t), 0.0, std::f64::consts::TAU, true)
                    .with_velocity(|_| (0.0, 1.0)),
            ]
        }
        Fixture::Helicoid(p) => {
            let (u0, u1) = (p.u0, p.u1);
            vec![
                UvCurve::new(move |t| (u1, t), 0.0, std::f64::consts::TAU, true)
                    .with_velocity(|_| (0.0, 1.0)),
                UvCurve::new(
                    move |t| (u0, std::f64::consts::TAU - t),
                    0.0,
                    std::f64::consts::TAU,
                    true,
                )
                .with_velocity(|_| (0.0, -1.0)),
            ]
        }
        Fixture::Hemisphere(_) => bail!("variation audit runs on disk or helicoid fixtures"),
    };
    let variation = match cfg.str_or("variation", "random") {
        "random" => VariationField::random_smooth(d, cfg.seed, cfg.f64_or("amplitude", 0.4)?),
        "translation" => VariationField::translation(plateau_core::Vec3::new(0.3, -0.2, 0.5)),
        "bump" => VariationField::interior_bump(d, cfg.f64_or("amplitude", 0.4)?),
        other => bail!("unknown variation '{other}'"),
    };
    let report = geodesic_variation_check(patch, &loops, &variation, &epsilons, samples)?;
    report_outcome(cfg, out_dir, "variation_audit", &report)
}

/// Config-driven sweep: a base config plus one varying axis, executed in
/// parallel across the grid (never within a run) into numbered directories.
#[derive(serde::Deserialize)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub vary: BTreeMap<String, Vec<String>>,
}

pub fn run_sweep(path: &Path, out_dir: &Path, jobs: usize) -> Result<i32> {
    use rayon::prelude::*;
    let text = std::fs::read_to_string(path)?;
    let sweep: SweepConfig = serde_json::from_str(&text).context("parsing sweep config")?;
    let mut configs = vec![sweep.base.clone()];
    for (key, values) in &sweep.vary {
        let mut next = Vec::new();
        for cfg in &configs {
            for v in values {
                let mut c = cfg.clone();
                c.set(key, v);
                next.push(c);
            }
        }
        configs = next;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()?;
    let results: Vec<Result<i32>> = pool.install(|| {
        configs
            .par_iter()
            .enumerate()
            .map(|(i, cfg)| {
                let dir = out_dir.join(format!("run_{i:04}"));
                let outcome = dispatch(cfg, &dir)?;
                outcome.provenance.write(&dir, &cfg.command)?;
                Ok(outcome.exit)
            })
            .collect()
    });
    let mut exit = 0;
    for r in results {
        exit = exit.max(r?);
    }
    let mut index = String::new();
    for (i, cfg) in configs.iter().enumerate() {
        index.push_str(&format!("run_{i:04} {}\n", cfg.sha256()));
    }
    std::fs::create_dir_all(out_dir)?;
    let mut f = std::fs::File::create(out_dir.join("sweep_index.txt"))?;
    f.write_all(index.as_bytes())?;
    Ok(exit)
}
