//! The `field` and `verify` commands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use tripleline::contact_line::{
    classical_young_residual, line_force_residual, modified_young_residual, YoungForm,
};
use tripleline::fields::{apply_scaling, scaled_displacement, Component};
use tripleline::potentials::Material;
use tripleline::scaling::{build_problem, ScaledProblem};
use tripleline::suite::{
    reference_polynomial_field, run_suite, summary_csv, Group, Outcome, Status, SuiteConfig,
};
use tripleline::surface::{divergence_decomposition, surface_equilibrium_residual};
use tripleline::verification::{
    elastic_energy, green_residual, line_integral_decay, sobolev_diagnostics, HalfSpace,
    TestDisplacementField,
};

use crate::config::{RunConfig, DISPLACEMENT};
use crate::RunError;

/// Identity tolerance on the analytic patches the config can name.
const PATCH_IDENTITY_TOL: f64 = 1e-8;

/// Lossless, fixed-width float text.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Serialize)]
struct Derived {
    kolosov: f64,
    rho: f64,
    phi: f64,
    a: f64,
    a_prime: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    derived: Derived,
    tolerance_scale: f64,
    only: Option<&'a str>,
    files: Vec<String>,
}

fn problem(cfg: &RunConfig) -> Result<(Material, ScaledProblem), RunError> {
    let p = &cfg.problem;
    build_problem(p.sigma_l, p.sigma_s, p.lambda, p.mu, p.a_prime, p.b)
        .map_err(|e| RunError::Config(e.to_string()))
}

/// Collects output files and writes them in one pass at the end.
struct Writer {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Writer {
    fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    fn add(&mut self, name: impl Into<String>, body: String) {
        self.files.push((name.into(), body));
    }

    fn finish(
        mut self,
        cfg: &RunConfig,
        command: &'static str,
        m: &Material,
        p: &ScaledProblem,
        tolerance_scale: f64,
        only: Option<&str>,
    ) -> Result<Vec<PathBuf>, RunError> {
        if !cfg.output.wants("csv") {
            self.files.clear();
        }
        if cfg.output.wants("json") {
            let mut names: Vec<String> = self.files.iter().map(|(n, _)| n.clone()).collect();
            names.push("manifest.json".into());
            let manifest = Manifest {
                tool: "tripleline",
                version: env!("CARGO_PKG_VERSION"),
                command,
                config: cfg,
                derived: Derived {
                    kolosov: m.kolosov(),
                    rho: p.rho,
                    phi: p.phi,
                    a: p.a,
                    a_prime: p.a_prime,
                },
                tolerance_scale,
                only,
                files: names,
            };
            let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
            self.add("manifest.json", text);
        }
        fs::create_dir_all(&self.dir).map_err(|e| RunError::Io(self.dir.clone(), e))?;
        let mut written = Vec::new();
        for (name, body) in self.files {
            let path = self.dir.join(name);
            fs::write(&path, body).map_err(|e| RunError::Io(path.clone(), e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Evaluate the physical fields on the configured grid.
pub fn cmd_field(
    cfg: &RunConfig,
    out: &Path,
    only: Option<&str>,
) -> Result<Vec<PathBuf>, RunError> {
    let (m, p) = problem(cfg)?;
    let names: Vec<String> = match only {
        Some(q) => {
            if q != DISPLACEMENT && q.parse::<Component>().is_err() {
                return Err(RunError::Config(format!("unknown quantity `{q}`")));
            }
            vec![q.to_string()]
        }
        None => cfg.grid.quantity_names(),
    };
    let points: Vec<(f64, f64)> = cfg
        .grid
        .points()
        .into_iter()
        .filter(|(x, y)| x.hypot(*y) >= cfg.grid.exclusion_radius)
        .collect();

    let mut bodies: Vec<String> = names
        .iter()
        .map(|n| {
            if n == DISPLACEMENT {
                "x,y,re,im\n".into()
            } else {
                "x,y,value\n".into()
            }
        })
        .collect();
    let components: Vec<Option<Component>> = names.iter().map(|n| n.parse().ok()).collect();
    let need_sample = components.iter().any(Option::is_some);
    for &(x, y) in &points {
        let z = Complex64::new(x, y);
        let domain =
            |e: tripleline::fields::FieldError| RunError::Domain(format!("at ({x}, {y}): {e}"));
        let sample = if need_sample {
            Some(apply_scaling(&p, &m, z).map_err(domain)?)
        } else {
            None
        };
        for (body, comp) in bodies.iter_mut().zip(&components) {
            match (comp, &sample) {
                (Some(c), Some(s)) => writeln!(body, "{},{},{}", num(x), num(y), num(c.of(s))),
                _ => {
                    let u = scaled_displacement(&p, &m, z).map_err(domain)?;
                    writeln!(body, "{},{},{},{}", num(x), num(y), num(u.re), num(u.im))
                }
            }
            .expect("writing to a String");
        }
    }

    let mut w = Writer::new(out);
    for (name, body) in names.iter().zip(bodies) {
        w.add(format!("{name}.csv"), body);
    }
    w.finish(cfg, "field", &m, &p, 1.0, only)
}

pub struct VerifyReport {
    pub outcomes: Vec<Outcome>,
    pub files: Vec<PathBuf>,
}

impl VerifyReport {
    pub fn failed(&self) -> Vec<&Outcome> {
        self.outcomes
            .iter()
            .filter(|o| o.status == Status::Fail)
            .collect()
    }
}

fn families(r0: f64, m: Material) -> [(&'static str, TestDisplacementField); 2] {
    [
        ("polynomial", reference_polynomial_field(r0)),
        (
            "solution",
            TestDisplacementField::BumpSolution { r0, material: m },
        ),
    ]
}

fn warn_table(name: &str, e: impl std::fmt::Display) {
    eprintln!("warning: {name} table not written: {e}");
}

/// Run the criteria and write the summary with the supporting tables.
pub fn cmd_verify(
    cfg: &RunConfig,
    out: &Path,
    only: Option<&str>,
    tolerance_scale: f64,
) -> Result<VerifyReport, RunError> {
    if !(tolerance_scale > 0.0 && tolerance_scale.is_finite()) {
        return Err(RunError::Config(format!(
            "tolerance scale must be positive, got {tolerance_scale}"
        )));
    }
    let group: Option<Group> = only
        .map(|s| s.parse().map_err(RunError::Config))
        .transpose()?;
    let (m, p) = problem(cfg)?;
    let q = &cfg.quadrature;
    let suite = SuiteConfig {
        material: m,
        problem: p,
        quadrature: q.spec(),
        eps_schedule: q.eps.clone(),
        green_eps: q.green_eps.clone(),
        tolerance_scale,
        seed: q.seed,
    };
    let mut outcomes = run_suite(&suite, group);
    let wants = |g: Group| group.is_none() || group == Some(g);
    let mut w = Writer::new(out);
    let spec = q.spec();
    let studies = q.eps.len() >= 2;

    if wants(Group::Energy) {
        let mut t = String::from("eps,energy,error\n");
        let rows: Result<Vec<_>, _> = q
            .eps
            .iter()
            .map(|&e| elastic_energy(&m, &spec.with_eps(e)).map(|v| (e, v)))
            .collect();
        match rows {
            Ok(rows) => {
                for (e, v) in rows {
                    t.push_str(&format!("{},{},{}\n", num(e), num(v.value), num(v.error)));
                }
                w.add("energy.csv", t);
            }
            Err(e) => warn_table("energy", e),
        }
    }
    if wants(Group::Green) {
        let mut t = String::from("family,eps,volume,divergence,side,arc,residual,error\n");
        let mut ok = true;
        for (name, f) in families(q.r0, m) {
            for &e in &q.green_eps {
                match green_residual(&m, &f, &spec.with_eps(e)) {
                    Ok(g) => t.push_str(&format!(
                        "{name},{},{},{},{},{},{},{}\n",
                        num(e),
                        num(g.volume.value),
                        num(g.divergence.value),
                        num(g.side.value),
                        num(g.arc.value),
                        num(g.residual),
                        num(g.error)
                    )),
                    Err(err) => {
                        warn_table("green", err);
                        ok = false;
                    }
                }
            }
        }
        if ok {
            w.add("green.csv", t);
        }
        if studies {
            let mut t = String::from("family,eps,line_integral,error,bound\n");
            let mut ok = true;
            for (name, f) in families(q.r0, m) {
                match line_integral_decay(&m, &f, &spec, &q.eps) {
                    Ok(d) => {
                        for r in &d.rows {
                            t.push_str(&format!(
                                "{name},{},{},{},{}\n",
                                num(r.eps),
                                num(r.integral),
                                num(r.error),
                                num(r.bound)
                            ));
                        }
                    }
                    Err(err) => {
                        warn_table("decay", err);
                        ok = false;
                    }
                }
            }
            if ok {
                w.add("decay.csv", t);
            }
        }
    }
    if wants(Group::Sobolev) && studies {
        match sobolev_diagnostics(&HalfSpace(m), &q.eps, &spec) {
            Ok(r) => w.add("sobolev.csv", r.to_csv()),
            Err(e) => warn_table("sobolev", e),
        }
    }
    if wants(Group::Surface) {
        if let Some(s) = &cfg.surface {
            let (patch, field, env) = (
                s.patch.build(),
                s.stress
                    .build()
                    .map_err(|e| RunError::Config(e.to_string()))?,
                s.environment(),
            );
            let mut t = String::from("s1,s2,identity_residual,special_x,special_y,special_z,residual_x,residual_y,residual_z\n");
            let mut worst = 0.0f64;
            for &at in &s.points {
                let domain = |e: tripleline::surface::SurfaceError| {
                    RunError::Domain(format!("surface point {at:?}: {e}"))
                };
                let d = divergence_decomposition(&patch, &field, at).map_err(domain)?;
                let r = surface_equilibrium_residual(&patch, &field, &env, at).map_err(domain)?;
                let scale = (d.normal_part.norm() + d.tangential_part.norm()).max(1.0);
                worst = worst.max(d.identity_residual / scale);
                t.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    num(at[0]),
                    num(at[1]),
                    num(d.identity_residual),
                    num(d.special.x),
                    num(d.special.y),
                    num(d.special.z),
                    num(r.vector.x),
                    num(r.vector.y),
                    num(r.vector.z)
                ));
            }
            w.add("surface.csv", t);
            let limit = PATCH_IDENTITY_TOL * tolerance_scale;
            outcomes.push(Outcome {
                id: 10,
                name: "decomposition identity on the configured patch".into(),
                status: if worst <= limit {
                    Status::Pass
                } else {
                    Status::Fail
                },
                detail: format!(
                    "{} points, max relative residual {worst:.3e} (limit {limit:.0e})",
                    s.points.len()
                ),
            });
        }
    }
    if wants(Group::Line) && !cfg.line.is_empty() {
        let mut t = String::from("entry,force_x,force_y,force_z,young_stresses,young_sines,young_cosines,young_classical\n");
        for (i, entry) in cfg.line.iter().enumerate() {
            let c = entry
                .build()
                .map_err(|e| RunError::Config(format!("line entry {i}: {e}")))?;
            let f = line_force_residual(&c);
            let form = |k| {
                modified_young_residual(&c, k)
                    .map(num)
                    .unwrap_or_else(|_| "nan".into())
            };
            t.push_str(&format!(
                "{i},{},{},{},{},{},{},{}\n",
                num(f.x),
                num(f.y),
                num(f.z),
                form(YoungForm::Stresses),
                form(YoungForm::Sines),
                form(YoungForm::Cosines),
                num(classical_young_residual(&c))
            ));
        }
        w.add("line.csv", t);
    }

    w.add("summary.csv", summary_csv(&outcomes));
    let files = w.finish(cfg, "verify", &m, &p, tolerance_scale, only)?;
    Ok(VerifyReport { outcomes, files })
}
