//! Constrained MDPs on gridworlds, solved through the occupancy-measure LP
//! with a private hazard constraint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve_square;
use crate::lp::{LinearProgram, Mask, Matrix, SensitivityProfile};

/// Moves in the order up, down, left, right.
pub const MOVES: [(i64, i64); 4] = [(0, 1), (0, -1), (-1, 0), (1, 0)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardModel {
    /// Reward 1 for every step spent in the absorbing goal, 0 elsewhere.
    #[default]
    Goal,
    /// Reward −1 for every step outside the absorbing goal.
    StepPenalty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HazardWeighting {
    /// Coefficient `β_s γ` on every occupancy variable of a hazardous state.
    #[default]
    Printed,
    /// Coefficient `β_s`, so the row is the expected discounted hazard sum.
    Discounted,
}

fn default_width() -> usize {
    10
}
fn default_height() -> usize {
    5
}
fn default_goal() -> [usize; 2] {
    [4, 3]
}
fn default_hazards() -> Vec<[usize; 2]> {
    let mut h = Vec::new();
    for y in 1..=2 {
        for x in 0..=6 {
            if x != 3 {
                h.push([x, y]);
            }
        }
    }
    h
}
fn default_beta() -> f64 {
    0.6
}
fn default_gamma() -> f64 {
    0.95
}
fn default_f0() -> f64 {
    0.6
}
fn default_a_sup() -> f64 {
    0.9
}
fn default_b_inf() -> f64 {
    0.3
}

/// Gridworld description; every field has a default reproducing the
/// 10×5 hazard grid with start in the bottom-left corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridworldConfig {
    #[serde(default = "default_width")]
    pub width: usize,
    #[serde(default = "default_height")]
    pub height: usize,
    #[serde(default)]
    pub start: [usize; 2],
    #[serde(default = "default_goal")]
    pub goal: [usize; 2],
    #[serde(default = "default_hazards")]
    pub hazards: Vec<[usize; 2]>,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_f0")]
    pub f0: f64,
    #[serde(rename = "A_sup", default = "default_a_sup")]
    pub a_sup: f64,
    #[serde(default = "default_b_inf")]
    pub b_inf: f64,
    #[serde(default)]
    pub reward_model: RewardModel,
    #[serde(default)]
    pub hazard_weighting: HazardWeighting,
    /// Probability that a move goes in a uniformly random other direction.
    #[serde(default)]
    pub slip: f64,
    /// Cells whose hazard status may depend on the data. Defaults to the
    /// hazard cells themselves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitive_cells: Option<Vec<[usize; 2]>>,
    /// Defaults to `q·β·γ`: flipping one cell changes its `q` coefficients.
    #[serde(rename = "delta11_A", default, skip_serializing_if = "Option::is_none")]
    pub delta11_a: Option<f64>,
    /// Defaults to `f0 − b_inf`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta1_b: Option<f64>,
}

impl Default for GridworldConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

impl GridworldConfig {
    pub fn cell(&self, xy: [usize; 2]) -> usize {
        xy[1] * self.width + xy[0]
    }

    pub fn sensitivities(&self) -> (f64, f64) {
        let coeff = match self.hazard_weighting {
            HazardWeighting::Printed => self.beta * self.gamma,
            HazardWeighting::Discounted => self.beta,
        };
        (
            self.delta11_a.unwrap_or(MOVES.len() as f64 * coeff),
            self.delta1_b.unwrap_or(self.f0 - self.b_inf),
        )
    }
}

/// A finite discounted CMDP with a single hazard constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct CmdpSpec {
    pub p: usize,
    pub q: usize,
    /// `r(s, a)` at `s·q + a`.
    pub reward: Vec<f64>,
    /// `T(s, a, y)` at `(s·q + a)·p + y`.
    pub transition: Vec<f64>,
    pub initial: Vec<f64>,
    pub gamma: f64,
    pub hazard: Vec<bool>,
    pub beta: Vec<f64>,
    pub f0: f64,
    pub weighting: HazardWeighting,
    /// States whose hazard coefficients are privatized.
    pub sensitive: Vec<bool>,
    pub a_sup: f64,
    pub b_inf: f64,
}

impl CmdpSpec {
    pub fn validate(&self) -> Result<()> {
        let (p, q) = (self.p, self.q);
        if self.reward.len() != p * q || self.transition.len() != p * q * p || self.initial.len() != p {
            return Err(Error::Dimension("CMDP arrays do not match p and q".into()));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidParameter(format!("gamma = {} must lie in (0, 1)", self.gamma)));
        }
        for sa in 0..p * q {
            let row = &self.transition[sa * p..(sa + 1) * p];
            if row.iter().any(|&v| v < 0.0) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!("transition row {sa} is not a distribution")));
            }
        }
        if (self.initial.iter().sum::<f64>() - 1.0).abs() > 1e-12 || self.initial.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParameter("initial distribution does not sum to 1".into()));
        }
        Ok(())
    }

    pub fn t(&self, s: usize, a: usize, y: usize) -> f64 {
        self.transition[(s * self.q + a) * self.p + y]
    }

    /// Hazard-row coefficient of state `s`.
    pub fn hazard_coefficient(&self, s: usize) -> f64 {
        if !self.hazard[s] {
            return 0.0;
        }
        match self.weighting {
            HazardWeighting::Printed => self.beta[s] * self.gamma,
            HazardWeighting::Discounted => self.beta[s],
        }
    }
}

fn check_cell(config: &GridworldConfig, xy: [usize; 2], what: &str) -> Result<()> {
    if xy[0] >= config.width || xy[1] >= config.height {
        return Err(Error::Config(format!(
            "{what} ({}, {}) lies outside the {}x{} grid",
            xy[0], xy[1], config.width, config.height
        )));
    }
    Ok(())
}

/// Builds the gridworld CMDP: one state per cell, four moves, walls block
/// (the agent stays put), and the goal is absorbing.
pub fn build_gridworld(config: &GridworldConfig) -> Result<CmdpSpec> {
    if config.width == 0 || config.height == 0 {
        return Err(Error::Config("grid must have at least one cell".into()));
    }
    check_cell(config, config.start, "start")?;
    check_cell(config, config.goal, "goal")?;
    for &h in &config.hazards {
        check_cell(config, h, "hazard")?;
    }
    for &h in config.sensitive_cells.iter().flatten() {
        check_cell(config, h, "sensitive cell")?;
    }
    if !(0.0..1.0).contains(&config.slip) {
        return Err(Error::Config(format!("slip = {} must lie in [0, 1)", config.slip)));
    }
    let (w, h) = (config.width, config.height);
    let p = w * h;
    let q = MOVES.len();
    let goal = config.cell(config.goal);

    let target = |s: usize, a: usize| -> usize {
        let (x, y) = ((s % w) as i64, (s / w) as i64);
        let (nx, ny) = (x + MOVES[a].0, y + MOVES[a].1);
        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
            s
        } else {
            ny as usize * w + nx as usize
        }
    };

    let mut transition = vec![0.0; p * q * p];
    let mut reward = vec![0.0; p * q];
    for s in 0..p {
        for a in 0..q {
            let row = &mut transition[(s * q + a) * p..(s * q + a + 1) * p];
            if s == goal {
                row[s] = 1.0;
            } else {
                row[target(s, a)] += 1.0 - config.slip;
                if config.slip > 0.0 {
                    for other in (0..q).filter(|&o| o != a) {
                        row[target(s, other)] += config.slip / (q - 1) as f64;
                    }
                }
            }
            reward[s * q + a] = match config.reward_model {
                RewardModel::Goal => f64::from(u8::from(s == goal)),
                RewardModel::StepPenalty => -f64::from(u8::from(s != goal)),
            };
        }
    }
    let mut initial = vec![0.0; p];
    initial[config.cell(config.start)] = 1.0;
    let mut hazard = vec![false; p];
    for &c in &config.hazards {
        hazard[config.cell(c)] = true;
    }
    let sensitive = match &config.sensitive_cells {
        Some(cells) => {
            let mut v = vec![false; p];
            for &c in cells {
                v[config.cell(c)] = true;
            }
            v
        }
        None => hazard.clone(),
    };
    let spec = CmdpSpec {
        p,
        q,
        reward,
        transition,
        initial,
        gamma: config.gamma,
        hazard,
        beta: vec![config.beta; p],
        f0: config.f0,
        weighting: config.hazard_weighting,
        sensitive,
        a_sup: config.a_sup,
        b_inf: config.b_inf,
    };
    spec.validate()?;
    Ok(spec)
}

/// Public envelope data for the hazard row.
#[derive(Debug, Clone, PartialEq)]
pub struct HazardEnvelope {
    /// Occupancy variables whose coefficient may be nonzero.
    pub mask: Vec<bool>,
    pub a_sup: Vec<f64>,
    pub b_inf: f64,
}

/// The hazard constraint row over the `pq` occupancy variables and its bound.
pub fn build_hazard_row(spec: &CmdpSpec) -> (Vec<f64>, f64, HazardEnvelope) {
    let (p, q) = (spec.p, spec.q);
    let mut row = vec![0.0; p * q];
    let mut mask = vec![false; p * q];
    let mut a_sup = vec![0.0; p * q];
    for s in 0..p {
        let coeff = spec.hazard_coefficient(s);
        let masked = spec.sensitive[s] || coeff != 0.0;
        for a in 0..q {
            row[s * q + a] = coeff;
            mask[s * q + a] = masked;
            if masked {
                a_sup[s * q + a] = spec.a_sup.max(coeff);
            }
        }
    }
    let envelope = HazardEnvelope { mask, a_sup, b_inf: spec.b_inf.min(spec.f0) };
    (row, spec.f0, envelope)
}

/// The occupancy-measure LP: maximize expected discounted reward subject to
/// the flow equalities and the hazard inequality.
pub fn build_occupancy_lp(spec: &CmdpSpec) -> Result<LinearProgram> {
    let (p, q) = (spec.p, spec.q);
    let (row, f0, _) = build_hazard_row(spec);
    let mut flow = Matrix::zeros(p, p * q);
    for y in 0..p {
        for a in 0..q {
            flow.set(y, y * q + a, 1.0);
        }
    }
    for s in 0..p {
        for a in 0..q {
            for y in 0..p {
                let t = spec.t(s, a, y);
                if t != 0.0 {
                    let v = flow.get(y, s * q + a) - spec.gamma * t;
                    flow.set(y, s * q + a, v);
                }
            }
        }
    }
    LinearProgram::new(spec.reward.clone(), Matrix::from_rows(&[row])?, vec![f0])?
        .with_equalities(flow, spec.initial.clone())
}

/// Sensitivity profile of the occupancy LP: only the hazard row and its
/// bound are private; the reward is public.
pub fn occupancy_profile(spec: &CmdpSpec, delta11_a: f64, delta1_b: f64) -> SensitivityProfile {
    let (_, _, env) = build_hazard_row(spec);
    let n = env.mask.len();
    SensitivityProfile {
        delta11_a,
        delta1_b,
        delta1_c: 0.0,
        mask_a: Mask::from_fn(1, n, |_, j| env.mask[j]),
        mask_c: vec![false; n],
        mask_b: None,
        a_sup: Matrix::from_fn(1, n, |_, j| env.a_sup[j]),
        b_inf: vec![env.b_inf],
    }
}

/// Stationary randomized policy, `probs[s][a] = π(a | s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    pub probs: Vec<Vec<f64>>,
}

impl Policy {
    pub fn validate(&self) -> Result<()> {
        for (s, row) in self.probs.iter().enumerate() {
            if row.iter().any(|&v| v < 0.0) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!("policy row {s} is not a distribution")));
            }
        }
        Ok(())
    }
}

/// Rowwise normalization of an occupancy measure; states with total
/// occupancy below `1e-10` get the uniform distribution.
pub fn policy_from_occupancy(x: &[f64], p: usize, q: usize) -> Result<Policy> {
    if x.len() != p * q {
        return Err(Error::Dimension(format!("occupancy has {} entries, expected {}", x.len(), p * q)));
    }
    if let Some(v) = x.iter().find(|&&v| v < -1e-9) {
        return Err(Error::InvalidParameter(format!("negative occupancy {v}")));
    }
    let probs = (0..p)
        .map(|s| {
            let row: Vec<f64> = x[s * q..(s + 1) * q].iter().map(|v| v.max(0.0)).collect();
            let total: f64 = row.iter().sum();
            if total < 1e-10 {
                vec![1.0 / q as f64; q]
            } else {
                row.iter().map(|v| v / total).collect()
            }
        })
        .collect();
    Ok(Policy { probs })
}

fn policy_matrix(spec: &CmdpSpec, policy: &Policy) -> Result<(Vec<f64>, Vec<f64>)> {
    if policy.probs.len() != spec.p || policy.probs.iter().any(|r| r.len() != spec.q) {
        return Err(Error::Dimension("policy shape does not match the CMDP".into()));
    }
    policy.validate()?;
    let p = spec.p;
    let mut pm = vec![0.0; p * p];
    let mut r = vec![0.0; p];
    for s in 0..p {
        for a in 0..spec.q {
            let pi = policy.probs[s][a];
            if pi == 0.0 {
                continue;
            }
            r[s] += pi * spec.reward[s * spec.q + a];
            for y in 0..p {
                pm[s * p + y] += pi * spec.t(s, a, y);
            }
        }
    }
    Ok((pm, r))
}

/// All state values `v_π`, from `(I − γP_π) v = r_π`.
pub fn policy_values(spec: &CmdpSpec, policy: &Policy) -> Result<Vec<f64>> {
    let p = spec.p;
    let (pm, r) = policy_matrix(spec, policy)?;
    let mut sys = vec![0.0; p * p];
    for s in 0..p {
        for y in 0..p {
            sys[s * p + y] = f64::from(u8::from(s == y)) - spec.gamma * pm[s * p + y];
        }
    }
    solve_square(sys, r, p, 1e-14).ok_or_else(|| Error::InvalidParameter("singular policy evaluation system".into()))
}

pub fn value_of_policy(spec: &CmdpSpec, policy: &Policy, s0: usize) -> Result<f64> {
    Ok(policy_values(spec, policy)?[s0])
}

/// Occupancy measure induced by a policy from the initial distribution:
/// `d = μ + γ P_πᵀ d` and `x(s, a) = d(s) π(a | s)`.
pub fn induced_occupancy(spec: &CmdpSpec, policy: &Policy) -> Result<Vec<f64>> {
    let p = spec.p;
    let (pm, _) = policy_matrix(spec, policy)?;
    let mut sys = vec![0.0; p * p];
    for y in 0..p {
        for s in 0..p {
            sys[y * p + s] = f64::from(u8::from(s == y)) - spec.gamma * pm[s * p + y];
        }
    }
    let d = solve_square(sys, spec.initial.clone(), p, 1e-14)
        .ok_or_else(|| Error::InvalidParameter("singular occupancy system".into()))?;
    let mut x = vec![0.0; p * spec.q];
    for s in 0..p {
        for a in 0..spec.q {
            x[s * spec.q + a] = d[s] * policy.probs[s][a];
        }
    }
    Ok(x)
}

/// Expected discounted hazard `Σ coeff·x` of an occupancy measure.
pub fn hazard_cost(spec: &CmdpSpec, x: &[f64]) -> f64 {
    (0..spec.p)
        .map(|s| spec.hazard_coefficient(s) * x[s * spec.q..(s + 1) * spec.q].iter().sum::<f64>())
        .sum()
}

/// `ξ = (v_π̃(s₀) − v_π(s₀)) / v_π(s₀)`.
pub fn cost_of_privacy(v_tilde: f64, v_opt: f64) -> Result<f64> {
    if v_opt == 0.0 {
        return Err(Error::ZeroDenominator("optimal value"));
    }
    Ok((v_tilde - v_opt) / v_opt)
}
