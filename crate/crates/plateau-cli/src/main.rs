//! `plateau`: solvers, constructors, and identity audits for equilibrium
//! configurations of surfaces spanned by elastic boundary curves.

mod commands;
mod config;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "plateau", version, about)]
struct Cli {
    /// Directory for artifacts and provenance records.
    #[arg(long, global = true, default_value = "plateau-out")]
    out_dir: PathBuf,
    /// Seed for seeded operations (PLATEAU_SEED overrides).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Planar area-constrained elasticae.
    Elastica {
        #[command(subcommand)]
        sub: ElasticaCmd,
    },
    /// The boundary equilibrium system.
    Boundary {
        #[command(subcommand)]
        sub: BoundaryCmd,
    },
    /// Björling continuation of equilibrium boundary curves.
    Bjorling {
        #[command(subcommand)]
        sub: BjorlingCmd,
    },
    /// Helicoid annuli and their parameter fit.
    Helicoid {
        #[command(subcommand)]
        sub: HelicoidCmd,
    },
    /// Identity audits. Exit code: 0 all pass, 1 any fail, 2 bad input.
    Audit {
        #[command(subcommand)]
        sub: AuditCmd,
    },
    /// Run a single config file (key=value lines or JSON).
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Parameter sweep over a JSON sweep config, parallel across runs.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 4)]
        jobs: usize,
    },
}

#[derive(Args)]
struct ParamQuad {
    #[arg(long)]
    sigma: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    eta: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    /// Permit sigma <= 0 or alpha < 0.
    #[arg(long, default_value_t = false)]
    relaxed: bool,
}

impl ParamQuad {
    fn fill(&self, cfg: &mut RunConfig) {
        cfg.set("sigma", self.sigma)
            .set("eta", self.eta)
            .set("alpha", self.alpha)
            .set("beta", self.beta)
            .set("relaxed", self.relaxed);
    }
}

#[derive(Subcommand)]
enum ElasticaCmd {
    /// Curvatures of area-constrained elastic circles.
    Circles {
        #[command(flatten)]
        params: ParamQuad,
    },
    /// Integrate the curvature equation from an initial state.
    Integrate {
        #[command(flatten)]
        params: ParamQuad,
        #[arg(long, allow_hyphen_values = true)]
        kg0: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        kgp0: f64,
        #[arg(long, default_value_t = 50.0)]
        length: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Shoot for a closed buckled ring.
    Ring {
        #[command(flatten)]
        params: ParamQuad,
        #[arg(long, allow_hyphen_values = true)]
        turning_number: i32,
        #[arg(long, allow_hyphen_values = true)]
        kg0: f64,
    },
}

#[derive(Args)]
struct BoundaryArgs {
    #[command(flatten)]
    params: ParamQuad,
    #[arg(long, allow_hyphen_values = true)]
    kg0: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    kgp0: f64,
    #[arg(long, allow_hyphen_values = true)]
    tg0: f64,
    #[arg(long, default_value = "plus")]
    sheet: String,
    #[arg(long, default_value_t = 50.0)]
    length: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
}

impl BoundaryArgs {
    fn fill(&self, cfg: &mut RunConfig) {
        self.params.fill(cfg);
        cfg.set("kg0", self.kg0)
            .set("kgp0", self.kgp0)
            .set("tg0", self.tg0)
            .set("sheet", &self.sheet)
            .set("length", self.length)
            .set("step", self.step);
    }
}

#[derive(Subcommand)]
enum BoundaryCmd {
    /// Integrate the reduced boundary system in the generic chart.
    Integrate {
        #[command(flatten)]
        args: BoundaryArgs,
    },
    /// Integrate and classify the trajectory branch.
    Classify {
        #[command(flatten)]
        args: BoundaryArgs,
    },
    /// The closed-form alpha = 0 disk solution.
    AlphaZero {
        #[arg(long)]
        sigma: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
    },
}

#[derive(Subcommand)]
enum BjorlingCmd {
    /// Continue an equilibrium boundary curve and build the surface.
    Build {
        #[command(flatten)]
        args: BoundaryArgs,
        #[arg(long, default_value_t = 8.0)]
        s_len: f64,
        #[arg(long, default_value_t = 0.25)]
        t_half: f64,
        #[arg(long, default_value_t = 400)]
        ns: usize,
        #[arg(long, default_value_t = 50)]
        nt: usize,
    },
    /// The three showcase parameter sets.
    Fig1 {
        #[arg(long)]
        set: usize,
        #[arg(long, default_value_t = 400)]
        ns: usize,
        #[arg(long, default_value_t = 50)]
        nt: usize,
    },
}

#[derive(Subcommand)]
enum HelicoidCmd {
    /// Mesh a helicoid annulus (OBJ + closed-form boundary data).
    Make {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        r0: f64,
        #[arg(long)]
        r1: f64,
        #[arg(long, default_value_t = 33)]
        nu: usize,
        #[arg(long, default_value_t = 129)]
        nv: usize,
        #[arg(long, default_value_t = false)]
        conformal: bool,
    },
    /// Fit (sigma, eta) making the annulus boundary an equilibrium.
    Fit {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        r0: f64,
        #[arg(long)]
        r1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<f64>,
        #[arg(long)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, default_value = "plus")]
        sheet: String,
    },
}

#[derive(Args)]
struct FixtureArgs {
    /// disk | helicoid | hemisphere
    #[arg(long, default_value = "disk")]
    fixture: String,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    r0: f64,
    #[arg(long, default_value_t = 2.0)]
    r1: f64,
}

impl FixtureArgs {
    fn fill(&self, cfg: &mut RunConfig) {
        cfg.set("fixture", &self.fixture)
            .set("radius", self.radius)
            .set("a", self.a)
            .set("r0", self.r0)
            .set("r1", self.r1);
    }
}

#[derive(Subcommand)]
enum AuditCmd {
    /// Energy breakdown of a fixture.
    Energy {
        #[command(flatten)]
        params: ParamQuad,
        #[command(flatten)]
        fixture: FixtureArgs,
    },
    /// Equilibrium-equation residuals on a fixture.
    El {
        #[command(flatten)]
        params: ParamQuad,
        #[command(flatten)]
        fixture: FixtureArgs,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Scaling identity 2 sigma A = oint (alpha kappa^2 - beta) ds.
    Scaling {
        #[command(flatten)]
        params: ParamQuad,
        #[command(flatten)]
        fixture: FixtureArgs,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Discrete (and smooth) Gauss-Bonnet.
    GaussBonnet {
        /// OBJ mesh to audit; otherwise a named fixture is built.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// disk | annulus | holed-plate | helicoid
        #[arg(long, default_value = "disk")]
        fixture: String,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
        #[arg(long, default_value_t = 2.0)]
        r1: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Torsion flux balance on a conformal annulus.
    Flux {
        /// helicoid | planar-annulus
        #[arg(long, default_value = "helicoid")]
        fixture: String,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
        #[arg(long, default_value_t = 2.0)]
        r1: f64,
        #[arg(long, default_value_t = 512)]
        samples: usize,
    },
    /// First variation of total geodesic curvature.
    Variation {
        #[command(flatten)]
        fixture: FixtureArgs,
        /// random | translation | bump
        #[arg(long, default_value = "random")]
        variation: String,
        #[arg(long, default_value = "1e-2,5e-3,2.5e-3")]
        eps: String,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.command {
        Command::Elastica { sub } => match sub {
            ElasticaCmd::Circles { params } => {
                let mut c = RunConfig::new("elastica-circles");
                params.fill(&mut c);
                c
            }
            ElasticaCmd::Integrate {
                params,
                kg0,
                kgp0,
                length,
                step,
            } => {
                let mut c = RunConfig::new("elastica-integrate");
                params.fill(&mut c);
                c.set("kg0", kg0)
                    .set("kgp0", kgp0)
                    .set("length", length)
                    .set("step", step);
                c
            }
            ElasticaCmd::Ring {
                params,
                turning_number,
                kg0,
            } => {
                let mut c = RunConfig::new("elastica-ring");
                params.fill(&mut c);
                c.set("turning-number", turning_number).set("kg0", kg0);
                c
            }
        },
        Command::Boundary { sub } => match sub {
            BoundaryCmd::Integrate { args } => {
                let mut c = RunConfig::new("boundary-integrate");
                args.fill(&mut c);
                c
            }
            BoundaryCmd::Classify { args } => {
                let mut c = RunConfig::new("boundary-classify");
                args.fill(&mut c);
                c
            }
            BoundaryCmd::AlphaZero { sigma, eta, beta } => {
                let mut c = RunConfig::new("boundary-alpha-zero");
                c.set("sigma", sigma).set("eta", eta).set("beta", beta);
                c
            }
        },
        Command::Bjorling { sub } => match sub {
            BjorlingCmd::Build {
                args,
                s_len,
                t_half,
                ns,
                nt,
            } => {
                let mut c = RunConfig::new("bjorling-build");
                args.fill(&mut c);
                c.set("s-len", s_len)
                    .set("t-half", t_half)
                    .set("ns", ns)
                    .set("nt", nt);
                c
            }
            BjorlingCmd::Fig1 { set, ns, nt } => {
                let mut c = RunConfig::new("bjorling-fig1");
                c.set("set", set).set("ns", ns).set("nt", nt);
                c
            }
        },
        Command::Helicoid { sub } => match sub {
            HelicoidCmd::Make {
                a,
                r0,
                r1,
                nu,
                nv,
                conformal,
            } => {
                let mut c = RunConfig::new("helicoid-make");
                c.set("a", a)
                    .set("r0", r0)
                    .set("r1", r1)
                    .set("nu", nu)
                    .set("nv", nv)
                    .set("conformal", conformal);
                c
            }
            HelicoidCmd::Fit {
                a,
                r0,
                r1,
                eta,
                alpha,
                beta,
                sheet,
            } => {
                let mut c = RunConfig::new("helicoid-fit");
                c.set("a", a)
                    .set("r0", r0)
                    .set("alpha", alpha)
                    .set("beta", beta)
                    .set("sheet", sheet);
                c.set_opt("r1", r1.as_ref());
                c.set_opt("eta", eta.as_ref());
                c
            }
        },
        Command::Audit { sub } => match sub {
            AuditCmd::Energy { params, fixture } => {
                let mut c = RunConfig::new("audit-energy");
                params.fill(&mut c);
                fixture.fill(&mut c);
                c
            }
            AuditCmd::El {
                params,
                fixture,
                tol,
            } => {
                let mut c = RunConfig::new("audit-el");
                params.fill(&mut c);
                fixture.fill(&mut c);
                c.set("tol", tol);
                c
            }
            AuditCmd::Scaling {
                params,
                fixture,
                tol,
            } => {
                let mut c = RunConfig::new("audit-scaling");
                params.fill(&mut c);
                fixture.fill(&mut c);
                c.set("tol", tol);
                c
            }
            AuditCmd::GaussBonnet {
                input,
                fixture,
                radius,
                a,
                r0,
                r1,
                tol,
            } => {
                let mut c = RunConfig::new("audit-gauss-bonnet");
                c.set("fixture", fixture)
                    .set("radius", radius)
                    .set("a", a)
                    .set("r0", r0)
                    .set("r1", r1)
                    .set("tol", tol);
                c.set_opt("in", input.as_ref().map(|p| p.display().to_string()));
                c
            }
            AuditCmd::Flux {
                fixture,
                a,
                r0,
                r1,
                samples,
            } => {
                let mut c = RunConfig::new("audit-flux");
                c.set("fixture", fixture)
                    .set("a", a)
                    .set("r0", r0)
                    .set("r1", r1)
                    .set("samples", samples);
                c
            }
            AuditCmd::Variation {
                fixture,
                variation,
                eps,
                samples,
            } => {
                let mut c = RunConfig::new("audit-variation");
                fixture.fill(&mut c);
                c.set("variation", variation)
                    .set("eps", eps)
                    .set("samples", samples);
                c
            }
        },
        Command::Run { config } => RunConfig::from_file(config)?,
        Command::Sweep { .. } => unreachable!("sweep handled before build_config"),
    };
    if cfg.seed == 0 {
        cfg.seed = cli.seed;
    }
    cfg.apply_env_seed();
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Command::Sweep { config, jobs } = &cli.command {
        return match commands::run_sweep(config, &cli.out_dir, *jobs) {
            Ok(code) => ExitCode::from(code as u8),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(classify_error(&e))
            }
        };
    }

    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match commands::dispatch(&cfg, &cli.out_dir) {
        Ok(outcome) => {
            if let Err(e) = outcome.provenance.write(&cli.out_dir, &cfg.command) {
                eprintln!("error writing provenance: {e:#}");
                return ExitCode::from(1);
            }
            ExitCode::from(outcome.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify_error(&e))
        }
    }
}

/// Exit-code contract: 2 for precondition/schema problems, 1 for numerical
/// failures.
fn classify_error(e: &anyhow::Error) -> u8 {
    if let Some(core) = e.downcast_ref::<plateau_core::Error>() {
        if core.is_precondition() {
            return 2;
        }
        return 1;
    }
    // parameter/schema errors from the config layer
    2
}
