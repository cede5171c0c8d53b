//! Instance generators and the seeded Monte-Carlo sweep engine.
//!
//! Trial `t` of grid point `g` draws everything from
//! `substream(seed, g, t)`, and results are reduced in trial order, so a
//! sweep's output depends only on its configuration.

use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accuracy::{
    chi_over_region, concentration_check, envelope_program, hoffman_empirical, lambda_bound, rho_case_one,
    rho_case_two, robinson_residual, sub_optimality, AccuracyInputs,
};
use crate::error::{Error, Result};
use crate::lp::{Components, LinearProgram, Mask, Matrix, PrivacyBudget, SensitivityProfile, DEFAULT_FEAS_TOL};
use crate::mdp::{
    build_gridworld, build_occupancy_lp, cost_of_privacy, hazard_cost, occupancy_profile, policy_from_occupancy,
    value_of_policy, GridworldConfig,
};
use crate::privacy::{substream, support_width, SupportVariant};
use crate::privatizer::{privatize_with, PrivatizeOptions, ORIGINAL_FEAS_TOL};
use crate::solver::{box_diameter, slater_point, solve, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Advertising problem, sweeping `ε`.
    AdEps,
    /// Advertising problem, sweeping the number of advertisers `M`.
    AdSize,
    /// Advertising problem, sweeping the cost share `α_c` with
    /// `α_A = α_b = (1 − α_c)/2`.
    Budget,
    /// Gridworld CMDP, sweeping `ε`.
    Cmdp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Redraw {
    /// A new instance for every trial.
    #[default]
    Fresh,
    /// One instance per grid point, shared by all its trials.
    Fixed,
}

/// Parameters of the advertising instance generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdSettings {
    #[serde(rename = "delta11_A")]
    pub delta11_a: f64,
    pub delta1_b: f64,
    pub delta1_c: f64,
    /// Unique visitors per page group.
    pub capacity: f64,
    /// Advertiser budget.
    pub budget: f64,
    /// `b_inf = max(0, b − factor·s_b)` on budget rows.
    pub b_inf_factor: f64,
    /// Probability that a price is zero.
    pub zero_prob: f64,
}

impl Default for AdSettings {
    fn default() -> Self {
        Self {
            delta11_a: 0.1,
            delta1_b: 0.1,
            delta1_c: 0.1,
            capacity: 1e7,
            budget: 1e7,
            b_inf_factor: 10.0,
            zero_prob: 0.2,
        }
    }
}

/// Advertising allocation instance with `groups·advertisers` variables
/// `x_ij` at index `i·advertisers + j`. The first `groups` rows are the
/// public visitor capacities, the next `advertisers` rows the private
/// budget constraints `Σ_i p_ij x_ij ≤ b_j`.
pub fn gen_ad_instance<R: Rng>(
    groups: usize,
    advertisers: usize,
    settings: &AdSettings,
    budget: &PrivacyBudget,
    variant: SupportVariant,
    rng: &mut R,
) -> Result<(LinearProgram, SensitivityProfile)> {
    if groups == 0 || advertisers == 0 {
        return Err(Error::InvalidParameter("need at least one group and one advertiser".into()));
    }
    let n = groups * advertisers;
    let m = groups + advertisers;
    let mut price = vec![0.0; n];
    for p in price.iter_mut() {
        let zero = rng.gen::<f64>() < settings.zero_prob;
        let draw = rng.gen::<f64>();
        *p = if zero { 0.0 } else { draw };
    }
    let mut a = Matrix::zeros(m, n);
    for i in 0..groups {
        for j in 0..advertisers {
            let k = i * advertisers + j;
            a.set(i, k, 1.0);
            a.set(groups + j, k, price[k]);
        }
    }
    let b: Vec<f64> = (0..m).map(|r| if r < groups { settings.capacity } else { settings.budget }).collect();
    let lp = LinearProgram::new(price.clone(), a, b.clone())?;

    let s_b = if budget.alpha_b > 0.0 {
        let (eps, delta) = budget.share(budget.alpha_b);
        support_width(settings.delta1_b, eps, delta, variant.count_b(m))
    } else {
        0.0
    };
    let mask_a = Mask::from_fn(m, n, |r, k| r >= groups && lp.a.get(r, k) != 0.0);
    let profile = SensitivityProfile {
        delta11_a: settings.delta11_a,
        delta1_b: settings.delta1_b,
        delta1_c: settings.delta1_c,
        a_sup: Matrix::from_fn(m, n, |r, k| if mask_a.get(r, k) { 1.0 } else { 0.0 }),
        mask_a,
        mask_c: price.iter().map(|&p| p != 0.0).collect(),
        mask_b: Some((0..m).map(|r| r >= groups).collect()),
        b_inf: b
            .iter()
            .enumerate()
            .map(|(r, &v)| if r < groups { v } else { (v - settings.b_inf_factor * s_b).max(0.0) })
            .collect(),
    };
    Ok((lp, profile))
}

fn default_samples() -> usize {
    200
}
fn default_delta() -> f64 {
    0.1
}
fn default_groups() -> usize {
    10
}
fn default_advertisers() -> usize {
    5
}
fn default_eps() -> f64 {
    1.0
}
fn default_t_values() -> Vec<f64> {
    vec![0.1, 0.05]
}

/// Configuration of one sweep. Every field except `experiment` has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub experiment: Experiment,
    /// Swept values of `ε` for `ad_eps` and `cmdp`.
    #[serde(default)]
    pub eps_values: Option<Vec<f64>>,
    /// Fixed `ε` for `ad_size` and `budget`.
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Number of page groups `N`.
    #[serde(default = "default_groups")]
    pub groups: usize,
    /// Number of advertisers `M` when it is not swept.
    #[serde(default = "default_advertisers")]
    pub advertisers: usize,
    /// Swept values of `M` for `ad_size`.
    #[serde(default)]
    pub advertiser_values: Option<Vec<usize>>,
    /// Swept values of `α_c` for `budget`.
    #[serde(default)]
    pub alpha_c_values: Option<Vec<f64>>,
    /// `[α_A, α_b, α_c]`; defaults to an even split, or `[0.99, 0.01, 0]`
    /// for `cmdp`.
    #[serde(default)]
    pub alpha: Option<[f64; 3]>,
    /// Privatized components such as `"A,b,c"` or `"A,c"`.
    #[serde(default)]
    pub components: Option<String>,
    /// Thresholds `t` for the concentration report.
    #[serde(default = "default_t_values")]
    pub t_values: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub redraw: Redraw,
    #[serde(default)]
    pub ad: AdSettings,
    #[serde(default)]
    pub gridworld: GridworldConfig,
    #[serde(default)]
    pub options: PrivatizeOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl SweepConfig {
    pub fn new(experiment: Experiment) -> Self {
        let mut v = serde_json::json!({ "experiment": experiment });
        v.as_object_mut().expect("object");
        serde_json::from_value(v).expect("defaults deserialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn components(&self) -> Result<Components> {
        match &self.components {
            Some(s) => Components::parse(s),
            None if self.experiment == Experiment::Cmdp => Ok(Components { a: true, b: true, c: false }),
            None => Ok(Components::ALL),
        }
    }

    pub fn alpha(&self) -> [f64; 3] {
        self.alpha.unwrap_or(match self.experiment {
            Experiment::Cmdp => [0.99, 0.01, 0.0],
            _ => [1.0 / 3.0; 3],
        })
    }

    /// The swept parameter's name and values.
    pub fn grid(&self) -> (&'static str, Vec<f64>) {
        match self.experiment {
            Experiment::AdEps => (
                "eps",
                self.eps_values.clone().unwrap_or_else(|| (1..=8).map(|k| 0.25 * k as f64).collect()),
            ),
            Experiment::Cmdp => (
                "eps",
                self.eps_values.clone().unwrap_or_else(|| vec![0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0]),
            ),
            Experiment::AdSize => (
                "M",
                self.advertiser_values
                    .clone()
                    .unwrap_or_else(|| (5..=100).collect())
                    .into_iter()
                    .map(|v| v as f64)
                    .collect(),
            ),
            Experiment::Budget => (
                "alpha_c",
                self.alpha_c_values.clone().unwrap_or_else(|| vec![1.0 / 3.0, 0.5, 0.75, 0.99]),
            ),
        }
    }

    /// Budget used at one grid value.
    pub fn budget_at(&self, value: f64) -> Result<PrivacyBudget> {
        let [aa, ab, ac] = self.alpha();
        let b = match self.experiment {
            Experiment::AdEps | Experiment::Cmdp => PrivacyBudget { eps: value, delta: self.delta, alpha_a: aa, alpha_b: ab, alpha_c: ac },
            Experiment::AdSize => PrivacyBudget { eps: self.eps, delta: self.delta, alpha_a: aa, alpha_b: ab, alpha_c: ac },
            Experiment::Budget => {
                let rest = (1.0 - value) / 2.0;
                PrivacyBudget { eps: self.eps, delta: self.delta, alpha_a: rest, alpha_b: rest, alpha_c: value }
            }
        };
        b.validate_for(self.components()?)?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        let (_, values) = self.grid();
        if values.is_empty() {
            return Err(Error::Config("empty sweep grid".into()));
        }
        if self.experiment == Experiment::AdSize && values.iter().any(|&v| v < 1.0) {
            return Err(Error::Config("advertiser counts must be positive".into()));
        }
        if self.groups == 0 || self.advertisers == 0 {
            return Err(Error::Config("groups and advertisers must be positive".into()));
        }
        for &v in &values {
            self.budget_at(v).map_err(|e| Error::Config(e.to_string()))?;
        }
        for &t in &self.t_values {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::Config(format!("t = {t} must lie in (0, 1]")));
            }
        }
        Ok(())
    }
}

/// Aggregate over the trials of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub grid_param: String,
    pub value: f64,
    pub mean_subopt_pct: f64,
    pub std_subopt_pct: f64,
    /// Trials whose solution broke an original constraint or whose
    /// privatized program had no solution.
    pub violations: usize,
    pub case_one_frac: f64,
    pub samples: usize,
    pub seed: u64,
    #[serde(skip)]
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn total_violations(&self) -> usize {
        self.rows.iter().map(|r| r.violations).sum()
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trial {
    /// Relative sub-optimality (or `|ξ|` for the CMDP), as a fraction.
    pub subopt: f64,
    pub violated: bool,
    pub case_one: bool,
    /// `‖x* − x̃*‖₂`.
    pub displacement: f64,
}

fn violation_trial() -> Trial {
    Trial { subopt: f64::NAN, violated: true, case_one: false, displacement: f64::NAN }
}

/// Solves a privatized version of `lp` and scores it against the known
/// optimum `x_star`.
pub fn ad_trial(
    lp: &LinearProgram,
    profile: &SensitivityProfile,
    x_star: &[f64],
    budget: &PrivacyBudget,
    components: Components,
    options: PrivatizeOptions,
    rng: &mut ChaCha20Rng,
) -> Result<Trial> {
    let private = privatize_with(lp, profile, budget, components, options, rng)?;
    let r = solve(&private.lp_tilde)?;
    if r.status != Status::Optimal {
        return Ok(violation_trial());
    }
    let x = r.x();
    let violated = lp.max_violation(x)? > ORIGINAL_FEAS_TOL;
    let displacement = x_star.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    Ok(Trial { subopt: sub_optimality(&lp.c, x_star, x)?, violated, case_one: private.case_one, displacement })
}

fn ad_instance(
    cfg: &SweepConfig,
    advertisers: usize,
    budget: &PrivacyBudget,
    rng: &mut ChaCha20Rng,
) -> Result<(LinearProgram, SensitivityProfile, Vec<f64>)> {
    let (lp, profile) = gen_ad_instance(cfg.groups, advertisers, &cfg.ad, budget, cfg.options.support_variant, rng)?;
    let r = solve(&lp)?;
    if !r.is_optimal() {
        return Err(Error::EmptyRegion);
    }
    let x = r.x.expect("optimal");
    Ok((lp, profile, x))
}

/// Runs the trials of one grid point in parallel, returned in trial order.
pub fn grid_point_trials(cfg: &SweepConfig, grid_index: usize, value: f64) -> Result<Vec<Trial>> {
    let budget = cfg.budget_at(value)?;
    let components = cfg.components()?;
    let g = grid_index as u32;
    match cfg.experiment {
        Experiment::Cmdp => {
            let gw = GridworldConfig { ..cfg.gridworld.clone() };
            let spec = build_gridworld(&gw)?;
            let lp = build_occupancy_lp(&spec)?;
            let (d_a, d_b) = gw.sensitivities();
            let profile = occupancy_profile(&spec, d_a, d_b);
            let reference = solve(&lp)?;
            if !reference.is_optimal() {
                return Err(Error::EmptyRegion);
            }
            let s0 = gw.cell(gw.start);
            let v_opt = value_of_policy(&spec, &policy_from_occupancy(reference.x(), spec.p, spec.q)?, s0)?;
            (0..cfg.samples as u32)
                .into_par_iter()
                .map(|t| {
                    let mut rng = substream(cfg.seed, g, t);
                    let private = privatize_with(&lp, &profile, &budget, components, cfg.options, &mut rng)?;
                    let r = solve(&private.lp_tilde)?;
                    if r.status != Status::Optimal {
                        return Ok(violation_trial());
                    }
                    let x = r.x();
                    let violated = lp.max_violation(x)? > ORIGINAL_FEAS_TOL
                        || hazard_cost(&spec, x) > spec.f0 + ORIGINAL_FEAS_TOL;
                    let policy = policy_from_occupancy(x, spec.p, spec.q)?;
                    let xi = cost_of_privacy(value_of_policy(&spec, &policy, s0)?, v_opt)?;
                    let displacement =
                        reference.x().iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    Ok(Trial { subopt: xi.abs(), violated, case_one: private.case_one, displacement })
                })
                .collect()
        }
        _ => {
            let advertisers = if cfg.experiment == Experiment::AdSize { value as usize } else { cfg.advertisers };
            let fixed = match cfg.redraw {
                Redraw::Fixed => Some(ad_instance(cfg, advertisers, &budget, &mut substream(cfg.seed, g, u32::MAX))?),
                Redraw::Fresh => None,
            };
            (0..cfg.samples as u32)
                .into_par_iter()
                .map(|t| {
                    let mut rng = substream(cfg.seed, g, t);
                    let owned;
                    let (lp, profile, x_star) = match &fixed {
                        Some(f) => f,
                        None => {
                            owned = ad_instance(cfg, advertisers, &budget, &mut rng)?;
                            &owned
                        }
                    };
                    ad_trial(lp, profile, x_star, &budget, components, cfg.options, &mut rng)
                })
                .collect()
        }
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn summarize(grid_param: &str, value: f64, trials: &[Trial], seed: u64) -> SweepRow {
    let subopt: Vec<f64> = trials.iter().filter(|t| !t.violated).map(|t| 100.0 * t.subopt).collect();
    let (mean, std) = mean_std(&subopt);
    SweepRow {
        grid_param: grid_param.to_string(),
        value,
        mean_subopt_pct: mean,
        std_subopt_pct: std,
        violations: trials.iter().filter(|t| t.violated).count(),
        case_one_frac: trials.iter().filter(|t| t.case_one).count() as f64 / trials.len() as f64,
        samples: trials.len(),
        seed: 0,
        wall_time_s: 0.0,
    }
    .with_seed(seed)
}

impl SweepRow {
    fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Runs every grid point of the sweep.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let (name, values) = cfg.grid();
    let mut rows = Vec::with_capacity(values.len());
    for (g, &value) in values.iter().enumerate() {
        let start = Instant::now();
        let trials = grid_point_trials(cfg, g, value)?;
        let mut row = summarize(name, value, &trials, cfg.seed);
        row.wall_time_s = start.elapsed().as_secs_f64();
        rows.push(row);
    }
    Ok(SweepTable { rows })
}

pub const CSV_HEADER: &str = "grid_param,value,mean_subopt_pct,std_subopt_pct,violations,case_one_frac,samples,seed";

pub fn to_csv(table: &SweepTable) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::Empty("cannot write an empty table"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &table.rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

pub fn emit_csv(table: &SweepTable, path: &Path) -> Result<()> {
    let text = to_csv(table)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<SweepTable> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    if r.headers()?.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::Config("unexpected CSV header".into()));
    }
    let rows = r.deserialize().collect::<std::result::Result<Vec<SweepRow>, _>>()?;
    Ok(SweepTable { rows })
}

/// Concentration of `‖x* − x̃*‖` over trials on one fixed instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concentration {
    pub t: f64,
    pub threshold: f64,
    pub exceedance: f64,
}

/// Monte-Carlo accuracy study of one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracySummary {
    /// `ρ` of the case observed in the majority of trials.
    pub rho: f64,
    pub rho_case_one: f64,
    pub rho_case_two: f64,
    pub chi: f64,
    pub lambda: f64,
    pub case_one_fraction: f64,
    pub empirical_subopt_mean: f64,
    pub empirical_subopt_stderr: f64,
    pub residual_mean: f64,
    /// Largest displacement-to-residual ratio seen; a lower bound on the
    /// Hoffman constant.
    pub hoffman_lower_bound: Option<f64>,
    pub diameter: f64,
    pub concentration: Vec<Concentration>,
    pub violations: usize,
    pub trials: usize,
}

/// Runs `trials` privatizations of `lp` and reports the empirical error
/// next to the bound `ρ`.
///
/// `Λ` is the largest per-trial bound `(c̃ᵀx̃ − c̃ᵀω)/min(b̃ − Ãω)` with `ω`
/// a Slater point of the envelope program, so it dominates every observed
/// private dual. The diameter is the bounding-box diagonal of the feasible
/// region, an upper bound on the true diameter.
pub fn accuracy_study(
    lp: &LinearProgram,
    profile: &SensitivityProfile,
    budget: &PrivacyBudget,
    components: Components,
    options: PrivatizeOptions,
    trials: usize,
    seed: u64,
    t_values: &[f64],
    hoffman_trials: usize,
) -> Result<AccuracySummary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let reference = solve(lp)?;
    if !reference.is_optimal() {
        return Err(Error::EmptyRegion);
    }
    let x_star = reference.x().to_vec();
    let (omega, margin) = slater_point(&envelope_program(lp, profile))?;
    if margin <= 0.0 {
        return Err(Error::NoSlaterPoint(margin));
    }

    struct Obs {
        subopt: f64,
        residual: f64,
        lambda: f64,
        displacement: f64,
        case_one: bool,
        violated: bool,
    }
    let obs = (0..trials as u32)
        .into_par_iter()
        .map(|t| -> Result<Obs> {
            let mut rng = substream(seed, 0, t);
            let private = privatize_with(lp, profile, budget, components, options, &mut rng)?;
            let r = solve(&private.lp_tilde)?;
            if !r.is_optimal() {
                return Ok(Obs {
                    subopt: f64::NAN,
                    residual: f64::NAN,
                    lambda: 0.0,
                    displacement: f64::NAN,
                    case_one: private.case_one,
                    violated: true,
                });
            }
            let x = r.x();
            Ok(Obs {
                subopt: sub_optimality(&lp.c, &x_star, x)?,
                residual: robinson_residual(lp, &private, &r),
                lambda: lambda_bound(&private.lp_tilde, x, &omega)?,
                displacement: x_star.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt(),
                case_one: private.case_one,
                violated: lp.max_violation(x)? > ORIGINAL_FEAS_TOL,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let ok: Vec<&Obs> = obs.iter().filter(|o| !o.violated).collect();
    let chi = chi_over_region(lp)?;
    let lambda = ok.iter().map(|o| o.lambda).fold(0.0, f64::max);
    let inputs = AccuracyInputs::new(lp, profile, budget, components, options, chi, lambda)?;
    let rho1 = rho_case_one(&inputs, lp.m());
    let rho2 = rho_case_two(&inputs, lp);
    let case_one_fraction = obs.iter().filter(|o| o.case_one).count() as f64 / obs.len() as f64;
    let subopt: Vec<f64> = ok.iter().map(|o| o.subopt).collect();
    let (mean, std) = mean_std(&subopt);
    let stderr = if subopt.len() > 1 { std / (subopt.len() as f64).sqrt() } else { 0.0 };
    let residual_mean = ok.iter().map(|o| o.residual).sum::<f64>() / ok.len().max(1) as f64;
    let diameter = box_diameter(lp)?;
    let displacements: Vec<f64> = ok.iter().map(|o| o.displacement).collect();
    let concentration = if displacements.is_empty() || diameter <= 0.0 {
        Vec::new()
    } else {
        t_values
            .iter()
            .map(|&t| {
                let (threshold, exceedance) = concentration_check(&displacements, diameter, t)?;
                Ok(Concentration { t, threshold, exceedance })
            })
            .collect::<Result<Vec<_>>>()?
    };
    let hoffman_lower_bound = if hoffman_trials > 0 && components == Components::ALL {
        hoffman_empirical(lp, profile, budget, hoffman_trials, &mut substream(seed, 1, 0)).ok()
    } else {
        None
    };
    Ok(AccuracySummary {
        rho: if case_one_fraction >= 0.5 { rho1 } else { rho2 },
        rho_case_one: rho1,
        rho_case_two: rho2,
        chi,
        lambda,
        case_one_fraction,
        empirical_subopt_mean: mean,
        empirical_subopt_stderr: stderr,
        residual_mean,
        hoffman_lower_bound,
        diameter,
        concentration,
        violations: obs.len() - ok.len(),
        trials,
    })
}

/// Whether `x` satisfies the original program at the default tolerance.
pub fn feasible(lp: &LinearProgram, x: &[f64]) -> Result<bool> {
    lp.check_feasible(x, DEFAULT_FEAS_TOL)
}
