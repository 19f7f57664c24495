//! Batch runner for the twelve verification criteria.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::contact_line::{
    classical_young_residual, line_force_residual, modified_young_residual, ConormalStress,
    ContactAngles, LineConfig, RelativeDeformation, Side, YoungForm,
};
use crate::fields::{ray_limit, scaled_displacement, Component, FieldSample};
use crate::potentials::{
    eval_f_chain, eval_f_closed, eval_potentials, pole_distance, Material, GUARD_RADIUS,
};
use crate::scaling::ScaledProblem;
use crate::surface::{
    contract, divergence_decomposition, surface_equilibrium_residual, Poly2, SurfaceEnvironment,
    SurfacePatch, SurfaceStressField, TransformData,
};
use crate::verification::{
    divergence_slope, elastic_energy, fd_equilibrium_check, green_residual, line_integral_decay,
    sobolev_diagnostics, HalfSpace, QuadratureSpec, TestDisplacementField,
};

/// Groups of criteria selectable on their own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Potentials,
    Fields,
    Equilibrium,
    Energy,
    Green,
    Sobolev,
    Surface,
    Line,
}

impl Group {
    pub const ALL: [Group; 8] = [
        Group::Potentials,
        Group::Fields,
        Group::Equilibrium,
        Group::Energy,
        Group::Green,
        Group::Sobolev,
        Group::Surface,
        Group::Line,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Group::Potentials => "potentials",
            Group::Fields => "fields",
            Group::Equilibrium => "equilibrium",
            Group::Energy => "energy",
            Group::Green => "green",
            Group::Sobolev => "sobolev",
            Group::Surface => "surface",
            Group::Line => "line",
        }
    }

    pub fn criteria(self) -> &'static [u8] {
        match self {
            Group::Potentials => &[1, 2],
            Group::Fields => &[3, 4],
            Group::Equilibrium => &[5],
            Group::Energy => &[6],
            Group::Green => &[7, 8],
            Group::Sobolev => &[9],
            Group::Surface => &[10, 11],
            Group::Line => &[12],
        }
    }
}

impl std::str::FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Group::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| {
                format!(
                    "unknown suite `{s}`; expected one of {}",
                    Group::ALL.map(|g| g.name()).join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub material: Material,
    pub problem: ScaledProblem,
    pub quadrature: QuadratureSpec,
    /// Strictly decreasing cutoffs for the convergence studies.
    pub eps_schedule: Vec<f64>,
    /// Cutoffs at which Green's formula is checked on the truncated domain.
    pub green_eps: Vec<f64>,
    /// Multiplies every numeric tolerance.
    pub tolerance_scale: f64,
    pub seed: u64,
}

impl SuiteConfig {
    pub fn new(material: Material, problem: ScaledProblem) -> Self {
        Self {
            material,
            problem,
            quadrature: QuadratureSpec::default(),
            eps_schedule: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            green_eps: vec![1e-2, 1e-3],
            tolerance_scale: 1.0,
            seed: 2013,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u8,
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {}",
            self.status, self.id, self.name, self.detail
        )
    }
}

pub fn criterion_name(id: u8) -> &'static str {
    match id {
        1 => "potential continuity at the contact line",
        2 => "closed form and recursive chain agree",
        3 => "boundary displacement",
        4 => "directional strain and stress limits",
        5 => "interior equilibrium by finite differences",
        6 => "finite elastic energy",
        7 => "Green's formula on the truncated domain",
        8 => "small-arc integral vanishes",
        9 => "Sobolev regularity of the stress",
        10 => "surface divergence decomposition and Laplace checks",
        11 => "surface work invariance",
        12 => "contact-line equations",
        _ => "unknown",
    }
}

fn outcome(id: u8, ok: bool, detail: String) -> Outcome {
    Outcome {
        id,
        name: criterion_name(id).into(),
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn skipped(id: u8, why: &str) -> Outcome {
    Outcome {
        id,
        name: criterion_name(id).into(),
        status: Status::Skipped,
        detail: why.into(),
    }
}

fn failed(id: u8, err: impl fmt::Display) -> Outcome {
    outcome(id, false, format!("error: {err}"))
}

/// Bump-polynomial test field used by the Green and decay checks.
pub fn reference_polynomial_field(r0: f64) -> TestDisplacementField {
    TestDisplacementField::BumpPolynomial {
        r0,
        coeffs: [
            [0.7, 0.4, -0.3, 0.2, 0.5, -0.1],
            [0.2, -0.6, 0.8, 0.1, 0.3, 0.4],
        ],
    }
}

fn c1(_: &SuiteConfig, tol: f64) -> Outcome {
    let limit = 1e-6 * tol;
    let mut worst = 0.0f64;
    for theta in [-PI / 2.0, -PI / 4.0, 0.0, PI / 4.0, PI / 2.0] {
        let z = Complex64::from_polar(1e-8, theta);
        // kF depends on the geometry only; any material gives the same value.
        let m = Material::new(1.0, 1.0).expect("valid");
        match eval_potentials(z, &m) {
            Ok(p) => worst = worst.max((m.kolosov() * p.f(0).expect("finite") - 0.5).norm()),
            Err(e) => return failed(1, e),
        }
    }
    outcome(
        1,
        worst <= limit,
        format!("max |kF − 1/2| = {worst:.3e} (limit {limit:.1e})"),
    )
}

/// Grid of about 10³ points with `Re z ∈ [1e-4, 3]`, `Im z ∈ [−3, 3]`
/// outside the guard disks.
pub fn dual_route_grid() -> Vec<Complex64> {
    let (nx, ny) = (30, 40);
    let mut pts = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = -3.0 + 6.0 * j as f64 / (ny - 1) as f64;
        for i in 0..nx {
            let x = 1e-4 + (3.0 - 1e-4) * i as f64 / (nx - 1) as f64;
            let z = Complex64::new(x, y);
            if pole_distance(z) > GUARD_RADIUS {
                pts.push(z);
            }
        }
    }
    pts
}

fn c2(cfg: &SuiteConfig, tol: f64) -> Outcome {
    let limit = 1e-10 * tol;
    let mut worst = 0.0f64;
    let pts = dual_route_grid();
    for &z in &pts {
        let (a, b) = match (
            eval_f_closed(z, &cfg.material),
            eval_f_chain(z, &cfg.material),
        ) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return failed(2, e),
        };
        for n in 0..3 {
            let (p, q) = (a.f(n).expect("finite"), b.f(n).expect("finite"));
            worst = worst.max((p - q).norm() / p.norm().max(q.norm()));
        }
    }
    outcome(
        2,
        worst <= limit,
        format!(
            "{} points, max relative deviation {worst:.3e} (limit {limit:.1e})",
            pts.len()
        ),
    )
}

fn c3(cfg: &SuiteConfig, tol: f64) -> Outcome {
    let p = &cfg.problem;
    let scale = (p.a / p.b).abs();
    let limit = 1e-10 * tol * scale;
    let mut worst = 0.0f64;
    for j in 0..1000 {
        let y = p.b * (-10.0 + 20.0 * j as f64 / 999.0);
        match scaled_displacement(p, &cfg.material, Complex64::new(0.0, y)) {
            Ok(u) => {
                worst = worst
                    .max(u.im.abs())
                    .max((u.re - p.boundary_displacement(y)).abs())
            }
            Err(e) => return failed(3, e),
        }
    }
    outcome(
        3,
        worst <= limit,
        format!("max boundary deviation {worst:.3e} (limit {limit:.1e})"),
    )
}

fn c4(cfg: &SuiteConfig, tol: f64) -> Outcome {
    let limit = 1e-4 * tol;
    let m = &cfg.material;
    let mut worst = 0.0f64;
    for theta in [
        0.0,
        PI / 4.0,
        -PI / 4.0,
        PI / 2.0 - 0.01,
        -(PI / 2.0 - 0.01),
    ] {
        let s = match FieldSample::eval(Complex64::from_polar(1e-6, theta), m) {
            Ok(s) => s,
            Err(e) => return failed(4, e),
        };
        for c in [
            Component::StrainYy,
            Component::StrainXy,
            Component::StressXy,
        ] {
            let lim = ray_limit(theta, m, c)
                .ok()
                .and_then(|l| l.finite())
                .expect("finite limit");
            worst = worst.max((c.of(&s) - lim).abs());
        }
    }
    outcome(
        4,
        worst <= limit,
        format!("max |numeric − limit| = {worst:.3e} at r = 1e-6 (limit {limit:.1e})"),
    )
}

/// Twenty interior points spread over radii 0.1–3, away from `±i`.
pub fn equilibrium_points() -> Vec<Complex64> {
    (0..20)
        .map(|j| Complex64::from_polar(0.1 + 0.15 * j as f64, -1.4 + 0.147 * j as f64))
        .collect()
}

fn c5(cfg: &SuiteConfig, tol: f64) -> Outcome {
    let limit = 1e-6 * tol;
    let field = HalfSpace(cfg.material);
    let (mut worst, mut order) = (0.0f64, f64::INFINITY);
    for z in equilibrium_points() {
        match fd_equilibrium_check(&field, z) {
            Ok(f) => {
                worst = worst.max(f.relative);
                order = order.min(f.order);
            }
            Err(e) => return failed(5, e),
        }
    }
    outcome(
        5,
        worst <= limit && order >= 1.9,
        format!(
            "max residual / scale {worst:.3e} (limit {limit:.1e}), min observed order {order:.3}"
        ),
    )
}

fn c6(cfg: &SuiteConfig, tol: f64) -> Outcome {
    if cfg.eps_schedule.len() < 2 {
        return skipped(6, "eps schedule has a single entry");
    }
    let mut values = Vec::new();
    for &eps in &cfg.eps_schedule {
        match elastic_energy(&cfg.material, &cfg.quadrature.with_eps(eps)) {
            Ok(e) => values.push(e.value),
            Err(e) => return failed(6, e),
        }
    }
    let diffs: Vec<f64> = values.windows(2).map(|p| (p[1] - p[0]).abs()).collect();
    let shrinking = diffs.windows(2).all(|d| d[1] <= d[0]);
    let last = *values.last().expect("nonempty");
    let tail = *diffs.last().expect("nonempty");
    let limit = 1e-3 * tol * last.abs();
    outcome(
        6,
        shrinking && tail <= limit,
        format!("E = {last:.10e}, last increment {tail:.3e} (limit {limit:.1e}), increments shrinking: {shrinking}"),
    )
}

fn c7(cfg: &SuiteConfig, tol: f64) -> Outcome {
    let r0 = cfg.quadrature.r0;
    let families = [
        reference_polynomial_field(r0),
        TestDisplacementField::BumpSolution {
            r0,
            material: cfg.material,
        },
    ];
    let mut worst = 0.0f64;
    for w in &families {
        for &eps in &cfg.green_eps {
            match green_residual(&cfg.material, w, &cfg.quadrature.with_eps(eps)) {
                Ok(g) => {
                    worst = worst.max(if g.error > 0.0 {
                        g.residual.abs() / g.error
                    } else if g.residual == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    })
                }
                Err(e) => return failed(7, e),
            }
        }
    }
    let limit = 3.0 * tol;
    outcome(
        7,
        worst <= limit,
        format!("max |residual| / error estimate = {worst:.3e} (limit {limit})"),
    )
}

fn c8(cfg: &SuiteConfig, tol: f64) -> Outcome {
    if cfg.eps_schedule.len() < 2 {
        return skipped(8, "eps schedule has a single entry");
    }
    let r0 = cfg.quadrature.r0;
    let families = [
        reference_polynomial_field(r0),
        TestDisplacementField::BumpSolution {
            r0,
            material: cfg.material,
        },
    ];
    let slack = 0.05 * tol;
    let (mut mono, mut worst) = (true, 0.0f64);
    let mut fits = Vec::new();
    for w in &families {
        match line_integral_decay(&cfg.material, w, &cfg.quadrature, &cfg.eps_schedule) {
            Ok(t) => {
                mono &= t.monotone();
                worst = worst.max(t.worst_ratio());
                fits.push(format!("c = {:.4}, d = {:.4}, e = {:.4}", t.c, t.d, t.e));
            }
            Err(e) => return failed(8, e),
        }
    }
    outcome(
        8,
        mono && worst <= 1.0 + slack,
        format!(
            "monotone: {mono}, worst entry / bound {worst:.4} (limit {:.2}); fits [{}]",
            1.0 + slack,
            fits.join("; ")
        ),
    )
}

fn c9(cfg: &SuiteConfig, tol: f64) -> Outcome {
    if cfg.eps_schedule.len() < 2 {
        return skipped(9, "eps schedule has a single entry");
    }
    let r = match sobolev_diagnostics(&HalfSpace(cfg.material), &cfg.eps_schedule, &cfg.quadrature)
    {
        Ok(r) => r,
        Err(e) => return failed(9, e),
    };
    let oracle = divergence_slope(&cfg.material);
    let rel = (r.slope - oracle).abs() / oracle;
    let conv = r.stress_l2_convergent();
    let ok =
        r.slope > 0.0 && rel <= 0.2 * tol && conv.iter().all(|&c| c) && r.gradient_l1_convergent();
    outcome(
        9,
        ok,
        format!(
            "slope {:.5} vs angular integral {oracle:.5} (rel {rel:.3e}), L2 stress convergent {conv:?}, L1 gradient convergent {}",
            r.slope,
            r.gradient_l1_convergent()
        ),
    )
}

fn random_poly_field(rng: &mut ChaCha8Rng) -> SurfaceStressField {
    let mut c = [[[0.0; 6]; 2]; 2];
    for comp in [(0, 0), (1, 1), (0, 1)] {
        c[comp.0][comp.1] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    }
    c[1][0] = c[0][1];
    SurfaceStressField::polynomial(c).expect("symmetric by construction")
}

fn c10(cfg: &SuiteConfig, tol: f64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let patches = [
        SurfacePatch::Plane {
            origin: Vector3::new(0.1, 0.0, -0.3),
            e1: Vector3::new(1.0, 0.2, 0.0),
            e2: Vector3::new(0.0, 1.0, 0.5),
        },
        SurfacePatch::Sphere { radius: 1.7 },
        SurfacePatch::Cylinder { radius: 0.8 },
        SurfacePatch::Graph {
            height: Poly2::new(vec![
                (2, 0, 0.4),
                (1, 1, -0.3),
                (0, 2, 0.2),
                (3, 0, 0.1),
                (1, 2, -0.05),
            ]),
        },
    ];
    let limit = 1e-8 * tol;
    let mut worst = 0.0f64;
    for j in 0..50 {
        let patch = &patches[j % patches.len()];
        let s = random_poly_field(&mut rng);
        let at = [rng.gen_range(0.3..1.2), rng.gen_range(-1.0..1.0)];
        match divergence_decomposition(patch, &s, at) {
            Ok(d) => {
                worst = worst.max(
                    d.identity_residual
                        / (d.normal_part.norm() + d.tangential_part.norm()).max(1.0),
                )
            }
            Err(e) => return failed(10, e),
        }
    }
    let laplace_limit = 1e-10 * tol;
    let mut laplace = 0.0f64;
    for (patch, sum) in [
        (SurfacePatch::Sphere { radius: 2.0 }, 1.0),
        (SurfacePatch::Cylinder { radius: 2.0 }, 0.5),
    ] {
        let hat = 3.0;
        let s = SurfaceStressField::Isotropic {
            base: hat,
            gradient: Vector3::zeros(),
        };
        let env = SurfaceEnvironment {
            pressure: -hat * sum,
            ..Default::default()
        };
        match surface_equilibrium_residual(&patch, &s, &env, [1.1, 0.4]) {
            Ok(r) => laplace = laplace.max(r.vector.norm()),
            Err(e) => return failed(10, e),
        }
    }
    outcome(
        10,
        worst <= limit && laplace <= laplace_limit,
        format!("max identity residual {worst:.3e} (limit {limit:.1e}), Laplace residual {laplace:.3e} (limit {laplace_limit:.1e})"),
    )
}

fn random_spd(rng: &mut ChaCha8Rng) -> Matrix2<f64> {
    let m = Matrix2::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    m * m.transpose() + Matrix2::identity() * 0.5
}

fn random_sym(rng: &mut ChaCha8Rng) -> Matrix2<f64> {
    let m = Matrix2::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    (m + m.transpose()) * 0.5
}

fn c11(cfg: &SuiteConfig, tol: f64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(11));
    let limit = 1e-12 * tol;
    let mut worst = 0.0f64;
    let mut trials = 0;
    while trials < 100 {
        let phi0: Matrix2<f64> = Matrix2::from_fn(|_, _| rng.gen_range(-2.0..2.0));
        if phi0.determinant().abs() < 0.1 {
            continue;
        }
        trials += 1;
        let t = match TransformData::new(phi0, random_spd(&mut rng), random_spd(&mut rng)) {
            Ok(t) => t,
            Err(e) => return failed(11, e),
        };
        let (s, e) = (random_sym(&mut rng), random_sym(&mut rng));
        let (pi, de) = (t.stress_to_reference(&s), t.strain_to_reference(&e));
        let lhs = contract(&pi, &de);
        let rhs = t.area_ratio * contract(&s, &e);
        // Rounding in a contraction scales with the summed term magnitudes.
        let scale = contract(&pi.abs(), &de.abs()).max(t.area_ratio * contract(&s.abs(), &e.abs()));
        worst = worst.max((lhs - rhs).abs() / scale.max(f64::MIN_POSITIVE));
    }
    outcome(
        11,
        worst <= limit,
        format!("max relative work mismatch {worst:.3e} over 100 transforms (limit {limit:.1e})"),
    )
}

/// Random configuration satisfying the fixed-line balance, with stresses
/// from Lami's relations.
pub fn random_feasible_line(rng: &mut impl Rng) -> LineConfig {
    loop {
        let first_fluid: f64 = rng.gen_range(0.3..2.9);
        let second_fluid: f64 = rng.gen_range(0.3..2.9);
        let body = 2.0 * PI - first_fluid - second_fluid;
        if body.sin().abs() < 0.1 || body < 0.3 {
            continue;
        }
        let tension = rng.gen_range(0.5..2.0);
        let shear = rng.gen_range(-0.5..0.5);
        let first = Side {
            energy: rng.gen_range(0.2..2.0),
            stress: ConormalStress {
                normal: tension * second_fluid.sin() / body.sin(),
                shear,
            },
        };
        let second = Side {
            energy: rng.gen_range(0.2..2.0),
            stress: ConormalStress {
                normal: tension * first_fluid.sin() / body.sin(),
                shear: -shear,
            },
        };
        let relative = RelativeDeformation {
            normal: rng.gen_range(0.5..2.0),
            shear: rng.gen_range(-0.5..0.5),
        };
        let angles = ContactAngles {
            first_fluid,
            second_fluid,
            body,
        };
        if let Ok(c) = LineConfig::new(first, second, tension, angles, relative) {
            return c;
        }
    }
}

fn c12(cfg: &SuiteConfig, tol: f64) -> Outcome {
    let p = &cfg.problem;
    let sym = match LineConfig::symmetric(p.sigma_s, p.sigma_l, p.phi, 1.0) {
        Ok(c) => line_force_residual(&c).norm(),
        Err(e) => return failed(12, e),
    };
    let ff = PI / 3.0;
    let delta = 1e-6;
    let young_cfg = LineConfig::new(
        Side {
            energy: 1.0,
            stress: ConormalStress::default(),
        },
        Side {
            energy: 1.5,
            stress: ConormalStress::default(),
        },
        1.0,
        ContactAngles {
            first_fluid: ff,
            second_fluid: PI - ff + delta,
            body: PI - delta,
        },
        RelativeDeformation::default(),
    );
    let young = match young_cfg.and_then(|c| {
        Ok(modified_young_residual(&c, YoungForm::Cosines)? - classical_young_residual(&c))
    }) {
        Ok(v) => v.abs(),
        Err(e) => return failed(12, e),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(12));
    let mut forms = 0.0f64;
    for _ in 0..50 {
        let c = random_feasible_line(&mut rng);
        let v: Result<Vec<f64>, _> = [YoungForm::Stresses, YoungForm::Sines, YoungForm::Cosines]
            .iter()
            .map(|&f| modified_young_residual(&c, f))
            .collect();
        match v {
            Ok(v) => {
                forms = forms
                    .max((v[0] - v[1]).abs())
                    .max((v[1] - v[2]).abs())
                    .max((v[0] - v[2]).abs())
            }
            Err(e) => return failed(12, e),
        }
    }
    let (l1, l2, l3) = (1e-12 * tol, 1e-6 * tol, 1e-10 * tol);
    outcome(
        12,
        sym <= l1 && young <= l2 && forms <= l3,
        format!(
            "symmetric balance {sym:.3e} (limit {l1:.0e}), Young recovery {young:.3e} (limit {l2:.0e}), form spread {forms:.3e} (limit {l3:.0e})"
        ),
    )
}

pub fn run_criterion(id: u8, cfg: &SuiteConfig) -> Outcome {
    let tol = cfg.tolerance_scale;
    match id {
        1 => c1(cfg, tol),
        2 => c2(cfg, tol),
        3 => c3(cfg, tol),
        4 => c4(cfg, tol),
        5 => c5(cfg, tol),
        6 => c6(cfg, tol),
        7 => c7(cfg, tol),
        8 => c8(cfg, tol),
        9 => c9(cfg, tol),
        10 => c10(cfg, tol),
        11 => c11(cfg, tol),
        12 => c12(cfg, tol),
        _ => skipped(id, "no such criterion"),
    }
}

/// Run every criterion, or only those of one group.
pub fn run_suite(cfg: &SuiteConfig, only: Option<Group>) -> Vec<Outcome> {
    let ids: Vec<u8> = match only {
        Some(g) => g.criteria().to_vec(),
        None => (1..=12).collect(),
    };
    ids.into_iter().map(|id| run_criterion(id, cfg)).collect()
}

/// CSV summary, one row per criterion.
pub fn summary_csv(outcomes: &[Outcome]) -> String {
    let mut out = String::from("criterion,name,status,detail\n");
    for o in outcomes {
        out.push_str(&format!(
            "{},\"{}\",{},\"{}\"\n",
            o.id,
            o.name,
            o.status,
            o.detail.replace('"', "'")
        ));
    }
    out
}
