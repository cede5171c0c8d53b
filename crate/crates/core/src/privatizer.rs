//! Privatization of `(A, b, c)` and solving the resulting program.

use rand::distributions::Distribution;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{bit_vec, blocking_profile_problems, Components, LinearProgram, Mask, Matrix, PrivacyBudget, SensitivityProfile};
use crate::privacy::{support_width, LaplaceDist, SupportVariant, TruncatedLaplaceDist};
use crate::solver::{solve, SolveResult, Status};

/// Feasibility tolerance for solutions of privatized programs checked
/// against the original constraints.
pub const ORIGINAL_FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PrivatizeOptions {
    #[serde(default)]
    pub support_variant: SupportVariant,
    /// Skips the `+s_A`/`−s_b` shifts and the envelope clamps, leaving only
    /// zero-mean noise. Not feasibility preserving; for demonstrations only.
    #[serde(default)]
    pub disable_shift_and_clamp: bool,
}

/// A privatized program with the full record of how it was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivatizedProgram {
    pub lp_tilde: LinearProgram,
    #[serde(rename = "noise_A")]
    pub noise_a: Matrix,
    pub noise_b: Vec<f64>,
    pub noise_c: Vec<f64>,
    #[serde(rename = "clamped_A")]
    pub clamped_a: Mask,
    #[serde(with = "bit_vec")]
    pub clamped_b: Vec<bool>,
    pub case_one: bool,
    #[serde(rename = "s_A")]
    pub s_a: f64,
    pub s_b: f64,
    #[serde(rename = "sigma_A")]
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub sigma_c: f64,
    pub components: Components,
}

/// Runs all three mechanisms. A component whose weight is zero is left
/// untouched, which is allowed only when it carries no sensitive entry.
pub fn privatize<R: RngCore>(
    lp: &LinearProgram,
    profile: &SensitivityProfile,
    budget: &PrivacyBudget,
    rng: &mut R,
) -> Result<PrivatizedProgram> {
    privatize_with(lp, profile, budget, Components::ALL, PrivatizeOptions::default(), rng)
}

/// Runs only the selected mechanisms; omitted components pass through and
/// must have zero weight.
pub fn privatize_partial<R: RngCore>(
    lp: &LinearProgram,
    profile: &SensitivityProfile,
    budget: &PrivacyBudget,
    components: Components,
    rng: &mut R,
) -> Result<PrivatizedProgram> {
    budget.validate_for(components)?;
    privatize_with(lp, profile, budget, components, PrivatizeOptions::default(), rng)
}

fn has_sensitive(profile: &SensitivityProfile, lp: &LinearProgram, comp: char) -> bool {
    match comp {
        'A' => profile.delta11_a > 0.0 && profile.mask_a.any(),
        'b' => profile.delta1_b > 0.0 && (0..lp.m()).any(|i| profile.b_sensitive(i)),
        _ => profile.delta1_c > 0.0 && profile.mask_c.iter().any(|&v| v),
    }
}

/// Scales and support widths of the mechanisms that actually run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanismParameters {
    /// Components that receive noise: selected, with positive weight and at
    /// least one sensitive entry.
    pub active: Components,
    pub s_a: f64,
    pub s_b: f64,
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub sigma_c: f64,
}

/// Computes `σ = Δ/(αε)` for each active mechanism and the support widths
/// from the shares `(αε, αδ)`. Inactive mechanisms get zeros.
pub fn mechanism_parameters(
    lp: &LinearProgram,
    profile: &SensitivityProfile,
    budget: &PrivacyBudget,
    components: Components,
    options: PrivatizeOptions,
) -> Result<MechanismParameters> {
    let (m, n) = (lp.m(), lp.n());
    let mut p = MechanismParameters {
        active: Components::NONE,
        s_a: 0.0,
        s_b: 0.0,
        sigma_a: 0.0,
        sigma_b: 0.0,
        sigma_c: 0.0,
    };
    for (comp, on, alpha) in [
        ('A', components.a, budget.alpha_a),
        ('b', components.b, budget.alpha_b),
        ('c', components.c, budget.alpha_c),
    ] {
        if !on || !has_sensitive(profile, lp, comp) {
            continue;
        }
        if alpha <= 0.0 {
            return Err(Error::Config(format!("component {comp} is privatized with zero budget")));
        }
        let (eps, delta) = budget.share(alpha);
        match comp {
            'A' => {
                p.active.a = true;
                p.sigma_a = profile.delta11_a / eps;
                p.s_a = support_width(profile.delta11_a, eps, delta, options.support_variant.count_a(m, n));
            }
            'b' => {
                p.active.b = true;
                p.sigma_b = profile.delta1_b / eps;
                p.s_b = support_width(profile.delta1_b, eps, delta, options.support_variant.count_b(m));
            }
            _ => {
                p.active.c = true;
                p.sigma_c = profile.delta1_c / eps;
            }
        }
    }
    Ok(p)
}

/// General entry point: the components in `components` with positive
/// weight are privatized.
pub fn privatize_with<R: RngCore>(
    lp: &LinearProgram,
    profile: &SensitivityProfile,
    budget: &PrivacyBudget,
    components: Components,
    options: PrivatizeOptions,
    rng: &mut R,
) -> Result<PrivatizedProgram> {
    lp.validate()?;
    budget.validate()?;
    let problems = blocking_profile_problems(lp, profile);
    if !problems.is_empty() {
        return Err(Error::Config(format!("inconsistent sensitivity profile: {}", problems.join("; "))));
    }
    let (m, n) = (lp.m(), lp.n());

    // One child stream per mechanism, always drawn in the same order.
    let mut rng_a = ChaCha20Rng::seed_from_u64(rng.next_u64());
    let mut rng_b = ChaCha20Rng::seed_from_u64(rng.next_u64());
    let mut rng_c = ChaCha20Rng::seed_from_u64(rng.next_u64());

    let params = mechanism_parameters(lp, profile, budget, components, options)?;
    let active = params.active;

    let mut a_t = lp.a.clone();
    let mut noise_a = Matrix::zeros(m, n);
    let mut clamped_a = Mask::filled(m, n, false);
    let MechanismParameters { s_a, s_b, sigma_a, sigma_b, sigma_c, .. } = params;
    if active.a {
        let dist = TruncatedLaplaceDist::new(sigma_a, s_a)?;
        for i in 0..m {
            for j in 0..n {
                if !profile.mask_a.get(i, j) {
                    continue;
                }
                let z = dist.sample(&mut rng_a);
                noise_a.set(i, j, z);
                let a = lp.a.get(i, j);
                if options.disable_shift_and_clamp {
                    a_t.set(i, j, a + z);
                    continue;
                }
                let bar = a + (s_a + z);
                let sup = profile.a_sup.get(i, j);
                if bar > sup {
                    a_t.set(i, j, sup);
                    clamped_a.set(i, j, true);
                } else {
                    a_t.set(i, j, bar);
                }
            }
        }
    }

    let mut b_t = lp.b.clone();
    let mut noise_b = vec![0.0; m];
    let mut clamped_b = vec![false; m];
    if active.b {
        let dist = TruncatedLaplaceDist::new(sigma_b, s_b)?;
        for i in 0..m {
            if !profile.b_sensitive(i) {
                continue;
            }
            let z = dist.sample(&mut rng_b);
            noise_b[i] = z;
            if options.disable_shift_and_clamp {
                b_t[i] = lp.b[i] + z;
                continue;
            }
            let bar = lp.b[i] - s_b + z;
            if bar < profile.b_inf[i] {
                b_t[i] = profile.b_inf[i];
                clamped_b[i] = true;
            } else {
                b_t[i] = bar;
            }
        }
    }

    let mut c_t = lp.c.clone();
    let mut noise_c = vec![0.0; n];
    if active.c {
        let dist = LaplaceDist::new(sigma_c)?;
        for j in 0..n {
            if profile.mask_c[j] {
                let z = dist.sample(&mut rng_c);
                noise_c[j] = z;
                c_t[j] += z;
            }
        }
    }

    let case_one = !clamped_a.any() && !clamped_b.iter().any(|&v| v);
    let lp_tilde = LinearProgram { c: c_t, a: a_t, b: b_t, a_eq: lp.a_eq.clone(), b_eq: lp.b_eq.clone() };
    Ok(PrivatizedProgram {
        lp_tilde,
        noise_a,
        noise_b,
        noise_c,
        clamped_a,
        clamped_b,
        case_one,
        s_a,
        s_b,
        sigma_a,
        sigma_b,
        sigma_c,
        components: active,
    })
}

/// Solves an already privatized program and checks the solution against the
/// original constraints.
pub fn solve_privatized(lp: &LinearProgram, private: &PrivatizedProgram) -> Result<SolveResult> {
    let result = solve(&private.lp_tilde)?;
    match result.status {
        Status::Infeasible => Err(Error::PerturbedInfeasible),
        Status::Unbounded => Err(Error::PerturbedUnbounded),
        Status::Optimal => {
            let violation = lp.max_violation(result.x())?;
            if violation > ORIGINAL_FEAS_TOL {
                return Err(Error::FeasibilityViolated(violation));
            }
            Ok(result)
        }
    }
}

/// Privatizes with every mechanism and solves, returning both.
pub fn solve_private<R: RngCore>(
    lp: &LinearProgram,
    profile: &SensitivityProfile,
    budget: &PrivacyBudget,
    rng: &mut R,
) -> Result<(PrivatizedProgram, SolveResult)> {
    let private = privatize(lp, profile, budget, rng)?;
    let result = solve_privatized(lp, &private)?;
    Ok((private, result))
}
