//! Command-line front end: loads a model file, dispatches to the engine,
//! and emits canonical text or JSON reports.
//!
//! Exit codes: 0 ok, 1 nonzero residual (verification commands), 2 usage,
//! parse, or validation error.

use crate::expr::{Expression, Field};
use crate::jet::ContactDerivation;
use crate::model::{load_model, ModelFile};
use crate::report::{Report, Status};
use crate::tvform::TangentValuedForm;
use crate::variational::Lagrangian;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "jetvar", version)]
#[command(about = "Symbolic jet-bundle calculus: Euler–Lagrange operators, symmetries, \
Noether currents and identities, and connection geometry")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit the report as JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Sign convention for world-connection components
    #[arg(long, global = true, value_enum, default_value_t = Convention::Paper)]
    convention: Convention,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    /// Components as stored: Γ = dx ⊗ (∂ + Γ ẋ ∂̇)
    Paper,
    /// Textbook sign: components negated on input and output
    Standard,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Euler–Lagrange operator of the model's Lagrangian
    El { model: PathBuf },
    /// Test the Lagrangian for variational triviality
    Trivial { model: PathBuf },
    /// Classify named vector fields as exact/variational/none symmetries
    Symmetry {
        model: PathBuf,
        /// Restrict to one named vector field
        #[arg(long)]
        vf: Option<String>,
    },
    /// Noether currents and conservation residuals of named vector fields
    Current {
        model: PathBuf,
        #[arg(long)]
        vf: Option<String>,
    },
    /// Curvature of the model's connection
    Curvature { model: PathBuf },
    /// Torsion of the connection w.r.t. the soldering form, or of the
    /// world connection
    Torsion { model: PathBuf },
    /// Christoffel symbols of the model's metric
    Christoffel { model: PathBuf },
    /// Ricci tensor of the metric's Christoffel connection or of the world
    /// connection
    Ricci { model: PathBuf },
    /// Integrate the geodesic equation with fixed-step RK4
    Geodesic {
        model: PathBuf,
        /// Initial position, comma-separated
        #[arg(long)]
        x0: String,
        /// Initial velocity, comma-separated
        #[arg(long)]
        v0: String,
        /// Integration time
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        /// RK4 step
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Field strength of the gauge potentials
    Strength { model: PathBuf },
    /// Frölicher–Nijenhuis bracket of two named vector fields
    Fnbracket {
        model: PathBuf,
        vf1: String,
        vf2: String,
    },
    /// Noether-identity residuals of the gauge symmetry tables
    Ni { model: PathBuf },
    /// Prolong a named vector field to the given jet order
    Prolong {
        model: PathBuf,
        #[arg(long)]
        vf: String,
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
    /// Run the randomized property suites
    Selftest {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Debug)]
struct CliError(String);

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap uses exit code 2 for usage errors and 0 for help/version
            e.exit();
        }
    };
    let started = std::time::Instant::now();
    match dispatch(&cli) {
        Ok(mut report) => {
            report.timing_ms = started.elapsed().as_millis();
            if cli.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            match report.status {
                Status::Ok => 0,
                Status::NonzeroResidual => 1,
                Status::Error => 2,
            }
        }
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn needs(_mf: &ModelFile, what: &str) -> CliError {
    CliError(format!("model file has no {what} section"))
}

fn the_lagrangian(mf: &ModelFile) -> Result<&Lagrangian, CliError> {
    mf.lagrangian.as_ref().ok_or_else(|| needs(mf, "lagrangian"))
}

fn named_fields<'m>(
    mf: &'m ModelFile,
    only: &Option<String>,
) -> Result<Vec<(&'m String, &'m ContactDerivation)>, CliError> {
    let all: Vec<_> = mf
        .vector_fields
        .iter()
        .map(|(n, v)| (n, v))
        .filter(|(n, _)| only.as_ref().map_or(true, |o| o == *n))
        .collect();
    if all.is_empty() {
        return Err(CliError(match only {
            Some(o) => format!("no vector_field named `{o}`"),
            None => "model file declares no vector fields".into(),
        }));
    }
    Ok(all)
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::El { model } => {
            let mf = load_model(model)?;
            let lag = the_lagrangian(&mf)?;
            let el = crate::variational::euler_lagrange(&mf.model, lag);
            let mut report = Report::new("el");
            for f in mf.model.fields() {
                report.put(
                    format!("E[{}]", mf.model.field_name(f)),
                    mf.model.render(el.component(f)),
                );
            }
            Ok(report)
        }
        Command::Trivial { model } => {
            let mf = load_model(model)?;
            let lag = the_lagrangian(&mf)?;
            let trivial = crate::variational::is_variationally_trivial(&mf.model, lag);
            let mut report = Report::new("trivial");
            report.put("variationally trivial", trivial);
            Ok(report)
        }
        Command::Symmetry { model, vf } => {
            let mf = load_model(model)?;
            let lag = the_lagrangian(&mf)?;
            let mut report = Report::new("symmetry");
            for (name, v) in named_fields(&mf, vf)? {
                let class = crate::variational::check_symmetry(&mf.model, v, lag)?;
                report.put(format!("symmetry[{name}]"), class.to_string());
            }
            Ok(report)
        }
        Command::Current { model, vf } => {
            let mf = load_model(model)?;
            let lag = the_lagrangian(&mf)?;
            let mut report = Report::new("current");
            let mut nonzero = false;
            for (name, v) in named_fields(&mf, vf)? {
                let j = crate::variational::noether_current(&mf.model, v, lag)?;
                for (mu, comp) in j.iter().enumerate() {
                    report.put(
                        format!("J[{name}][{}]", mf.model.base_names()[mu]),
                        mf.model.render(comp),
                    );
                }
                let r = crate::variational::conservation_residual(&mf.model, v, lag)?;
                nonzero |= !r.is_zero();
                report.put(format!("residual[{name}]"), mf.model.render(&r));
            }
            if nonzero {
                report.status = Status::NonzeroResidual;
            }
            Ok(report)
        }
        Command::Curvature { model } => {
            let mf = load_model(model)?;
            let conn = mf.connection.as_ref().ok_or_else(|| needs(&mf, "connection"))?;
            let r = crate::conn::curvature(&mf.model, conn);
            let mut report = Report::new("curvature");
            let n = mf.model.base_dim();
            for (i, f) in mf.model.fields().enumerate().filter_map(|(i, f)| {
                matches!(f, Field::Even(_)).then_some((i, f))
            }) {
                for l in 0..n {
                    for m in (l + 1)..n {
                        report.put(
                            format!("R[{}][{l}{m}]", mf.model.field_name(f)),
                            mf.model.render(&r.get(i, l, m)),
                        );
                    }
                }
            }
            Ok(report)
        }
        Command::Torsion { model } => {
            let mf = load_model(model)?;
            let mut report = Report::new("torsion");
            if let (Some(conn), Some(sol)) = (&mf.connection, &mf.soldering) {
                let t = crate::conn::torsion(&mf.model, conn, sol);
                let n = mf.model.base_dim();
                for (i, name) in mf.model.even_names().iter().enumerate() {
                    for l in 0..n {
                        for m in (l + 1)..n {
                            report.put(
                                format!("T[{name}][{l}{m}]"),
                                mf.model.render(&t.get(i, l, m)),
                            );
                        }
                    }
                }
                return Ok(report);
            }
            let w = world_connection_of(&mf, cli.convention)?;
            let n = w.dim();
            for lam in 0..n {
                for mu in (lam + 1)..n {
                    for nu in 0..n {
                        report.put(
                            format!("T[{mu}][{nu}][{lam}]"),
                            mf.model.render(&apply_convention(cli.convention, w.torsion(mu, nu, lam))),
                        );
                    }
                }
            }
            Ok(report)
        }
        Command::Christoffel { model } => {
            let mf = load_model(model)?;
            let metric = mf.metric.as_ref().ok_or_else(|| needs(&mf, "metric"))?;
            let conn = crate::world::christoffel(metric)?;
            let mut report = Report::new("christoffel");
            let n = conn.dim();
            for l in 0..n {
                for m in 0..n {
                    for k in 0..n {
                        report.put(
                            format!("Gamma[{l}][{m}][{k}]"),
                            mf.model
                                .render(&apply_convention(cli.convention, conn.comps[l][m][k].clone())),
                        );
                    }
                }
            }
            Ok(report)
        }
        Command::Ricci { model } => {
            let mf = load_model(model)?;
            let conn = world_connection_of(&mf, cli.convention)?;
            let rc = crate::world::ricci(&conn);
            let mut report = Report::new("ricci");
            for (mu, row) in rc.iter().enumerate() {
                for (b, e) in row.iter().enumerate() {
                    report.put(format!("Ric[{mu}][{b}]"), mf.model.render(e));
                }
            }
            Ok(report)
        }
        Command::Geodesic {
            model,
            x0,
            v0,
            t_end,
            step,
        } => {
            let mf = load_model(model)?;
            let conn = world_connection_of(&mf, cli.convention)?;
            let parse_vec = |s: &str| -> Result<Vec<f64>, CliError> {
                s.split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<f64>()
                            .map_err(|e| CliError(format!("bad number `{p}`: {e}")))
                    })
                    .collect()
            };
            let x = parse_vec(x0)?;
            let v = parse_vec(v0)?;
            if x.len() != conn.dim() || v.len() != conn.dim() {
                return Err(CliError(format!(
                    "initial data must have {} components",
                    conn.dim()
                )));
            }
            let path = crate::world::integrate_geodesic(&conn, &x, &v, *t_end, *step)?;
            let (xf, vf) = path.last().expect("at least the initial state");
            let mut report = Report::new("geodesic");
            for (k, val) in xf.iter().enumerate() {
                report.put(format!("x[{k}]"), format!("{val:.12e}"));
            }
            for (k, val) in vf.iter().enumerate() {
                report.put(format!("v[{k}]"), format!("{val:.12e}"));
            }
            report.put("steps", path.len() - 1);
            Ok(report)
        }
        Command::Strength { model } => {
            let mf = load_model(model)?;
            let alg = mf
                .gauge_algebra
                .as_ref()
                .ok_or_else(|| needs(&mf, "gauge_algebra"))?;
            let field = mf
                .gauge_field
                .as_ref()
                .ok_or_else(|| needs(&mf, "gauge_field"))?;
            let f = crate::gauge::strength(field, alg)?;
            let mut report = Report::new("strength");
            let n = field.base_dim();
            for r in 0..alg.dim() {
                for l in 0..n {
                    for m in (l + 1)..n {
                        report.put(
                            format!("F[{r}][{l}{m}]"),
                            mf.model.render(&f.get(r, l, m)),
                        );
                    }
                }
            }
            Ok(report)
        }
        Command::Fnbracket { model, vf1, vf2 } => {
            let mf = load_model(model)?;
            let a = vector_field_as_tv(&mf, vf1)?;
            let b = vector_field_as_tv(&mf, vf2)?;
            let br = crate::tvform::fn_bracket(&a, &b)?;
            let mut report = Report::new("fnbracket");
            let space = crate::conn::conn_space(&mf.model);
            for mu in 0..space.dim() {
                let target = if mu < space.n_base {
                    mf.model.base_names()[mu].clone()
                } else {
                    mf.model.even_names()[mu - space.n_base].clone()
                };
                report.put(
                    format!("bracket[{target}]"),
                    mf.model.render(&br.comps[mu].value_at(&[])),
                );
            }
            Ok(report)
        }
        Command::Ni { model } => {
            let mf = load_model(model)?;
            let lag = the_lagrangian(&mf)?;
            let spec = mf
                .gauge_symmetry
                .as_ref()
                .ok_or_else(|| needs(&mf, "gauge_symmetry"))?;
            let (names, odd) = mf
                .gauge_params
                .clone()
                .ok_or_else(|| needs(&mf, "gauge_params"))?;
            let residuals = crate::noether::noether_identity_residuals(&mf.model, spec, lag);
            let mut report = Report::new("ni");
            let mut nonzero = false;
            for (a, r) in residuals.iter().enumerate() {
                let label = names.get(a).cloned().unwrap_or_else(|| format!("{a}"));
                nonzero |= !r.is_zero();
                report.put(format!("NI[{label}]"), mf.model.render(r));
            }
            let class =
                crate::noether::gauge_invariance_check(&mf.model, spec, &names, odd, lag)?;
            report.put("classification", class.to_string());
            if let Some(gen) = &mf.ni_generators {
                for (r, e) in crate::noether::complete_ni_residuals(&mf.model, gen, lag)
                    .iter()
                    .enumerate()
                {
                    nonzero |= !e.is_zero();
                    report.put(format!("completeNI[{r}]"), mf.model.render(e));
                }
            }
            if nonzero {
                report.status = Status::NonzeroResidual;
            }
            Ok(report)
        }
        Command::Prolong { model, vf, order } => {
            let mf = load_model(model)?;
            let (name, v) = named_fields(&mf, &Some(vf.clone()))?[0];
            let p = crate::jet::prolong_contact_derivation(&mf.model, v, *order);
            let mut report = Report::new("prolong");
            for (l, e) in p.xi.iter().enumerate() {
                report.put(
                    format!("{name}.xi[{}]", mf.model.base_names()[l]),
                    mf.model.render(e),
                );
            }
            for ((f, mi), e) in &p.components {
                let mi_str: String = mi.iter().map(|l| l.to_string()).collect();
                report.put(
                    format!("{name}.v[{}][{mi_str}]", mf.model.field_name(*f)),
                    mf.model.render(e),
                );
            }
            Ok(report)
        }
        Command::Selftest { seed } => {
            let mut report = Report::new("selftest");
            let mut failed = false;
            for suite in crate::selftest::run_all(*seed) {
                if suite.passed() {
                    report.put(
                        format!("suite[{}]", suite.name),
                        format!("pass ({} cases)", suite.cases),
                    );
                } else {
                    failed = true;
                    report.put(
                        format!("suite[{}]", suite.name),
                        format!("FAIL: {}", suite.failures.join("; ")),
                    );
                }
            }
            report.put("seed", *seed);
            if failed {
                report.status = Status::NonzeroResidual;
            }
            Ok(report)
        }
    }
}

fn apply_convention(c: Convention, e: Expression) -> Expression {
    match c {
        Convention::Paper => e,
        Convention::Standard => e.neg(),
    }
}

/// World connection from the metric (via Christoffel) or the explicit
/// block, negated on input under the standard convention.
fn world_connection_of(
    mf: &ModelFile,
    convention: Convention,
) -> Result<crate::world::LinearWorldConnection, CliError> {
    if let Some(metric) = &mf.metric {
        return Ok(crate::world::christoffel(metric)?);
    }
    match &mf.world_connection {
        Some(w) => Ok(match convention {
            Convention::Paper => w.clone(),
            Convention::Standard => w.negated(),
        }),
        None => Err(CliError(
            "model file has no metric or world_connection section".into(),
        )),
    }
}

fn vector_field_as_tv(mf: &ModelFile, name: &str) -> Result<TangentValuedForm, CliError> {
    let Some((_, v)) = mf.vector_fields.iter().find(|(n, _)| n == name) else {
        return Err(CliError(format!("no vector_field named `{name}`")));
    };
    let order0 = v
        .xi
        .iter()
        .chain(&v.v_even)
        .all(|e| e.max_jet_order() == 0);
    if !order0 || !v.v_odd.iter().all(Expression::is_zero) {
        return Err(CliError(
            "fnbracket needs order-0 vector fields over the even coordinates".into(),
        ));
    }
    let space = crate::conn::conn_space(&mf.model);
    let mut comps = v.xi.clone();
    comps.extend(v.v_even.iter().cloned());
    Ok(TangentValuedForm::vector_field(space, comps))
}
