//! JSON-configured experiment runner: one config in, a report with every
//! checked inequality, a trace and image meshes out.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::boost::{jordan_csv, jordan_iterate, JordanConfig};
use crate::convexshell::{proper_csv, proper_iterate, ConvexDomain, ProperConfig, PushConfig, ShellSchedule};
use crate::error::{Error, Result};
use crate::geometry::{coords_csv, mesh_image, obj_string, triangulate_disc, DiscMesh};
use crate::presets;
use crate::rhsolver::{solve, solve_rh3, DiagRow, RhProblem, RhSolution, SolveConfig};
use crate::series::{LaurentPoly, VectorLaurent};
use crate::weierstrass::{flux_loop, hopf_residual, Domain, ImmersionDisc};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Rh3,
    Rhn,
    Jordan,
    Proper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetName {
    Plane,
    SpinorDisc,
    CatenoidAnnulus,
    /// the n = 4 reference quadruple
    Quad4,
    VerticalDisc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ImmersionSpec {
    Preset {
        preset: PresetName,
        #[serde(default)]
        scale: Option<f64>,
        #[serde(default)]
        height: Option<f64>,
    },
    /// φ as Laurent coefficients [re, im] per component, starting at `jmin`
    Inline {
        phi: Vec<Vec<[f64; 2]>>,
        #[serde(default)]
        jmin: i64,
        base: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RhSection {
    pub eps: f64,
    pub rho0: f64,
    /// peak of the size function on the arc
    pub r_max: f64,
    pub c_grid: usize,
}

impl Default for RhSection {
    fn default() -> Self {
        RhSection { eps: 0.05, rho0: 0.9, r_max: 0.1, c_grid: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JordanSection {
    /// target interior distance; defaults to twice the initial one
    pub lambda: Option<f64>,
    /// total drift budget
    pub eps: f64,
    pub rh_eps: f64,
    pub delta0: Option<f64>,
    pub max_steps: usize,
}

impl Default for JordanSection {
    fn default() -> Self {
        JordanSection { lambda: None, eps: 0.2, rh_eps: 0.02, delta0: None, max_steps: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProperSection {
    pub domain: ConvexDomain,
    /// δ₀ > δ₁ > ⋯; if empty, δ_j = delta0·ratio^j for j ≤ steps
    pub deltas: Vec<f64>,
    pub delta0: f64,
    pub ratio: f64,
    pub steps: usize,
    pub budget: f64,
    pub lookahead: usize,
    pub k0: f64,
    pub rh_eps: Option<f64>,
    pub rho0: f64,
}

impl Default for ProperSection {
    fn default() -> Self {
        ProperSection {
            domain: ConvexDomain::Ball { center: vec![0.0; 3], radius: 1.0 },
            deltas: Vec::new(),
            delta0: 0.2,
            ratio: 0.5,
            steps: 4,
            budget: 2.0,
            lookahead: 3,
            k0: 0.5,
            rh_eps: None,
            rho0: 0.9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshSection {
    pub n_r: usize,
    pub n_a: usize,
}

impl Default for MeshSection {
    fn default() -> Self {
        MeshSection { n_r: 32, n_a: 256 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub experiment: Experiment,
    pub immersion: ImmersionSpec,
    #[serde(default)]
    pub rh: RhSection,
    #[serde(default)]
    pub jordan: JordanSection,
    #[serde(default)]
    pub proper: ProperSection,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub seed: u64,
}

fn field(name: &str, msg: impl Into<String>) -> Error {
    Error::Config { field: name.into(), msg: msg.into() }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(field(name, format!("{x} is not positive")))
    }
}

impl PipelineConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: PipelineConfig = serde_json::from_str(s).map_err(|e| field("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let rh = &self.rh;
        if rh.r_max != 0.0 {
            positive("rh.r_max", rh.r_max)?;
        }
        positive("rh.eps", rh.eps)?;
        if !(rh.rho0 > 0.0 && rh.rho0 < 1.0) {
            return Err(field("rh.rho0", format!("{} is not in (0, 1)", rh.rho0)));
        }
        if rh.c_grid == 0 {
            return Err(field("rh.c_grid", "must be at least 1"));
        }
        let j = &self.jordan;
        positive("jordan.eps", j.eps)?;
        positive("jordan.rh_eps", j.rh_eps)?;
        if let Some(l) = j.lambda {
            positive("jordan.lambda", l)?;
        }
        if let Some(d) = j.delta0 {
            positive("jordan.delta0", d)?;
        }
        let p = &self.proper;
        p.domain.validate()?;
        positive("proper.budget", p.budget)?;
        if let Some(e) = p.rh_eps {
            positive("proper.rh_eps", e)?;
        }
        if !(p.rho0 > 0.0 && p.rho0 < 1.0) {
            return Err(field("proper.rho0", format!("{} is not in (0, 1)", p.rho0)));
        }
        if !(p.k0 > 0.0 && p.k0 < 1.0) {
            return Err(field("proper.k0", format!("{} is not in (0, 1)", p.k0)));
        }
        if self.mesh.n_r < 1 || self.mesh.n_a < 3 {
            return Err(field("mesh", "need n_r ≥ 1 and n_a ≥ 3"));
        }
        if let ImmersionSpec::Preset { scale: Some(s), .. } = &self.immersion {
            positive("immersion.scale", *s)?;
        }
        Ok(())
    }
}

pub fn build_immersion(spec: &ImmersionSpec) -> Result<ImmersionDisc> {
    match spec {
        ImmersionSpec::Preset { preset, scale, height } => Ok(match preset {
            PresetName::Plane => presets::plane(3, scale.unwrap_or(1.0)),
            PresetName::SpinorDisc => presets::spinor_disc_problem(0.0, 1.0)?.center.real_part(),
            PresetName::Quad4 => presets::quad4_problem(0.0, 1.0)?.center.real_part(),
            PresetName::CatenoidAnnulus => presets::catenoid(),
            PresetName::VerticalDisc => presets::vertical_disc(height.unwrap_or(0.95), scale.unwrap_or(0.002)),
        }),
        ImmersionSpec::Inline { phi, jmin, base } => {
            let comps = phi
                .iter()
                .map(|c| LaurentPoly::new(*jmin, c.iter().map(|z| C64::new(z[0], z[1])).collect()))
                .collect();
            ImmersionDisc::new(VectorLaurent::new(comps)?, base.clone(), Domain::Disc)
        }
    }
}

/// One checked inequality with the inputs it was computed from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// "<", "<=", ">" or ">="
    pub relation: String,
    pub bound: f64,
    pub pass: bool,
    pub inputs: Vec<(String, f64)>,
}

impl Check {
    pub fn new(name: &str, value: f64, relation: &str, bound: f64, inputs: &[(&str, f64)]) -> Self {
        let mut c = Check {
            name: name.into(),
            value,
            relation: relation.into(),
            bound,
            pass: false,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        };
        c.pass = c.holds();
        c
    }

    pub fn holds(&self) -> bool {
        match self.relation.as_str() {
            "<" => self.value < self.bound,
            "<=" => self.value <= self.bound,
            ">" => self.value > self.bound,
            ">=" => self.value >= self.bound,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: Experiment,
    pub seed: u64,
    pub config: PipelineConfig,
    pub checks: Vec<Check>,
    pub summary: Vec<(String, f64)>,
    pub pass: bool,
}

impl Report {
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Recomputes every stored inequality; returns the names that disagree with
/// the stored verdicts or fail.
pub fn verify_report(r: &Report) -> Vec<String> {
    let mut bad: Vec<String> = r.checks.iter().filter(|c| c.holds() != c.pass || !c.holds()).map(|c| c.name.clone()).collect();
    if r.pass != r.checks.iter().all(|c| c.holds()) {
        bad.push("pass".into());
    }
    bad
}

pub struct Outcome {
    pub report: Report,
    pub trace_csv: String,
    pub initial: ImmersionDisc,
    pub fin: ImmersionDisc,
}

fn rh_trace(rows: &[DiagRow]) -> String {
    let mut out = String::from("N,c_index,c_re,c_im,s1,s2,s3,rho_prime,gated\n");
    let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:e},{:e},{:e},{},{},{},{}",
            r.n,
            r.c_index,
            r.c[0],
            r.c[1],
            r.s1,
            opt(r.s2),
            opt(r.s3),
            opt(r.rho_prime),
            r.gated
        );
    }
    out
}

fn rh_checks(sol: &RhSolution, p: &RhProblem, checks: &mut Vec<Check>, summary: &mut Vec<(String, f64)>) {
    let r = sol.report;
    let inputs = [("eps", p.eps), ("rho0", p.rho0), ("N", sol.n_used as f64), ("c_index", sol.c_index as f64)];
    checks.push(Check::new("s1 boundary to attached circles", r.s1, "<", r.eps, &inputs));
    checks.push(Check::new("s2 annulus to attached discs", r.s2, "<", r.eps, &inputs));
    checks.push(Check::new("s3 C1 distance on rho' disc", r.s3, "<", r.eps, &inputs));
    checks.push(Check::new("rho' at least rho0", r.rho_prime, ">=", p.rho0, &inputs));
    let hopf = hopf_residual(&sol.g.real_part(), 512);
    checks.push(Check::new("Hopf residual", hopf, "<", 1e-8, &inputs));
    summary.extend([
        ("s1".to_string(), r.s1),
        ("s2".into(), r.s2),
        ("s3".into(), r.s3),
        ("rho_prime".into(), r.rho_prime),
        ("N".into(), sol.n_used as f64),
        ("c_index".into(), sol.c_index as f64),
        ("hopf_residual".into(), hopf),
    ]);
    if let Some((a, b)) = sol.nondegeneracy {
        summary.push(("theta_u_min".into(), a));
        summary.push(("theta_v_min".into(), b));
    }
}

fn require_disc(imm: &ImmersionDisc, what: &str) -> Result<()> {
    if imm.domain != Domain::Disc {
        return Err(field("immersion", format!("{what} runs on discs, not annuli")));
    }
    Ok(())
}

pub fn run_experiment(cfg: &PipelineConfig) -> Result<Outcome> {
    cfg.validate()?;
    let mut checks = Vec::new();
    let mut summary = Vec::new();
    let initial = build_immersion(&cfg.immersion)?;
    let solve_cfg = SolveConfig { c_grid: cfg.rh.c_grid, seed: cfg.seed, ..SolveConfig::default() };
    let (fin, trace_csv) = match cfg.experiment {
        Experiment::Rh3 | Experiment::Rhn => {
            let preset = match &cfg.immersion {
                ImmersionSpec::Preset { preset, .. } => *preset,
                ImmersionSpec::Inline { .. } => {
                    return Err(field("immersion", "Riemann–Hilbert runs use the spinor-disc or quad4 preset"))
                }
            };
            let mut p = match (cfg.experiment, preset) {
                (Experiment::Rh3, PresetName::SpinorDisc) => presets::spinor_disc_problem(cfg.rh.r_max, cfg.rh.eps)?,
                (Experiment::Rhn, PresetName::SpinorDisc) => presets::direction3_problem(cfg.rh.r_max, cfg.rh.eps)?,
                (Experiment::Rhn, PresetName::Quad4) => presets::quad4_problem(cfg.rh.r_max, cfg.rh.eps)?,
                _ => return Err(field("immersion", format!("preset {preset:?} has no {:?} problem", cfg.experiment))),
            };
            p.rho0 = cfg.rh.rho0;
            let sol = if cfg.experiment == Experiment::Rh3 { solve_rh3(&p, &solve_cfg)? } else { solve(&p, &solve_cfg)? };
            rh_checks(&sol, &p, &mut checks, &mut summary);
            (sol.g.real_part(), rh_trace(&sol.diagnostics))
        }
        Experiment::Jordan => {
            require_disc(&initial, "the Jordan iteration")?;
            let mut jc = JordanConfig { delta0: cfg.jordan.delta0, max_steps: cfg.jordan.max_steps, ..JordanConfig::default() };
            jc.boost.rh_eps = cfg.jordan.rh_eps;
            jc.boost.rho0 = cfg.rh.rho0;
            jc.boost.solve.seed = cfg.seed;
            let lambda = match cfg.jordan.lambda {
                Some(l) => l,
                None => 2.0 * jordan_iterate(&initial, ZERO, 0.0, cfg.jordan.eps, &jc)?.initial_dist,
            };
            let run = jordan_iterate(&initial, ZERO, lambda, cfg.jordan.eps, &jc)?;
            let s = run.schedule;
            let inputs = [("lambda", lambda), ("eps", cfg.jordan.eps), ("c", s.c), ("delta0", s.delta0)];
            let last = run.trace.last();
            let fin_dist = last.map(|r| r.measured_dist).unwrap_or(run.initial_dist);
            let drift = last.map(|r| r.drift).unwrap_or(0.0);
            checks.push(Check::new("final interior distance above lambda", fin_dist, ">", lambda, &inputs));
            checks.push(Check::new("total boundary drift", drift, "<", cfg.jordan.eps, &inputs));
            for (k, r) in run.trace.iter().enumerate() {
                let before = if k == 0 { run.initial_dist } else { run.trace[k - 1].measured_dist };
                checks.push(Check::new(&format!("step {} distance increases", r.step), r.measured_dist, ">", before, &inputs));
            }
            summary.extend([
                ("initial_dist".to_string(), run.initial_dist),
                ("final_dist".into(), fin_dist),
                ("drift".into(), drift),
                ("steps".into(), run.trace.len() as f64),
                ("c".into(), s.c),
            ]);
            (run.g.real_part(), jordan_csv(&run.trace))
        }
        Experiment::Proper => {
            require_disc(&initial, "the properness loop")?;
            let pc = &cfg.proper;
            let kappa = pc.domain.kappa_min();
            let schedule = if pc.deltas.is_empty() {
                ShellSchedule::geometric(pc.delta0, pc.ratio, pc.steps, kappa, pc.budget)?
            } else {
                ShellSchedule::new(pc.deltas.clone(), kappa, pc.budget)?
            };
            let push = PushConfig {
                rh_eps: pc.rh_eps,
                rho0: pc.rho0,
                solve: SolveConfig { c_grid: 4, seed: cfg.seed, ..SolveConfig::default() },
                ..PushConfig::default()
            };
            let prc = ProperConfig { push, lookahead: pc.lookahead, k0: pc.k0, ..ProperConfig::default() };
            let run = proper_iterate(&initial, &pc.domain, &schedule, ZERO, &prc)?;
            let jn = schedule.steps();
            let last = run.trace.last().expect("at least one step");
            let inputs = [("delta_last", schedule.delta(jn)), ("budget", schedule.budget), ("kappa_min", kappa)];
            checks.push(Check::new("final gap below last shell width", last.gap_max, "<", schedule.delta(jn), &inputs));
            checks.push(Check::new("final gap positive", last.gap_min, ">", 0.0, &inputs));
            checks.push(Check::new("total drift within series", run.total_drift, "<", schedule.series_sum(), &inputs));
            let mut prev = run.initial_dist;
            for (r, rep) in run.trace.iter().zip(&run.reports) {
                let si = [("delta_j", r.delta_j), ("eta", r.eta), ("target_delta", r.target_delta)];
                checks.push(Check::new(&format!("step {} drift", r.step), r.drift, "<", r.bound, &si));
                checks.push(Check::new(&format!("step {} distance nondecreasing", r.step), r.dist, ">=", prev, &si));
                checks.push(Check::new(&format!("step {} clearance from L", r.step), rep.clearance_l, ">", 0.0, &si));
                checks.push(Check::new(&format!("step {} flux change", r.step), rep.flux_delta, "<", 1e-10, &si));
                prev = r.dist;
            }
            summary.extend([
                ("initial_dist".to_string(), run.initial_dist),
                ("final_dist".into(), last.dist),
                ("gap_min".into(), last.gap_min),
                ("gap_max".into(), last.gap_max),
                ("total_drift".into(), run.total_drift),
                ("series_sum".into(), schedule.series_sum()),
            ]);
            (run.f, proper_csv(&run.trace))
        }
    };
    if initial.domain != Domain::Disc {
        let flux = flux_loop(&initial, 0.5, 256)?;
        summary.extend(flux.0.iter().enumerate().map(|(k, x)| (format!("flux_{}", k + 1), *x)));
    }
    let pass = checks.iter().all(|c| c.pass);
    let report = Report { experiment: cfg.experiment, seed: cfg.seed, config: cfg.clone(), checks, summary, pass };
    Ok(Outcome { report, trace_csv, initial, fin })
}

/// Files written by [`export_artifacts`], relative to the output directory.
pub const ARTIFACTS: [&str; 6] =
    ["report.json", "trace.csv", "surface_initial.obj", "surface_final.obj", "coords.csv", "summary.txt"];

fn surface(imm: &ImmersionDisc, mesh: &DiscMesh) -> Result<(String, Vec<Vec<f64>>)> {
    let pts = mesh_image(imm, mesh)?;
    Ok((obj_string(&pts, &mesh.triangles), pts))
}

pub fn summary_text(r: &Report) -> String {
    let mut s = format!("experiment {:?}, seed {}: {}\n", r.experiment, r.seed, if r.pass { "PASS" } else { "FAIL" });
    for c in &r.checks {
        let _ = writeln!(s, "  [{}] {}: {:e} {} {:e}", if c.pass { "ok" } else { "FAIL" }, c.name, c.value, c.relation, c.bound);
    }
    for (k, v) in &r.summary {
        let _ = writeln!(s, "  {k} = {v:e}");
    }
    s
}

pub fn export_artifacts(out: &Outcome, mesh: &MeshSection, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let m = triangulate_disc(mesh.n_r, mesh.n_a)?;
    let (obj0, _) = surface(&out.initial, &m)?;
    let (obj1, pts) = surface(&out.fin, &m)?;
    let files = [
        out.report.to_json()?,
        out.trace_csv.clone(),
        obj0,
        obj1,
        coords_csv(&pts),
        summary_text(&out.report),
    ];
    let mut written = Vec::new();
    for (name, body) in ARTIFACTS.iter().zip(files) {
        let p = dir.join(name);
        fs::write(&p, body)?;
        written.push(p);
    }
    Ok(written)
}
