//! Accuracy quantities: the expected-residual bound `ρ`, the primal and dual
//! magnitudes `χ` and `Λ`, the residual whose norm bounds solution
//! displacement through a Hoffman constant, and concentration of the
//! displacement around its mean.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{dot, norm2, Components, LinearProgram, Mask, Matrix, PrivacyBudget, SensitivityProfile};
use crate::privacy::substream;
use crate::privatizer::{mechanism_parameters, privatize_with, solve_privatized, PrivatizeOptions, PrivatizedProgram};
use crate::solver::{coordinate_maxima, slater_point, solve, SolveResult};

/// Instance constants entering `ρ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyInputs {
    pub chi: f64,
    pub lambda_cap: f64,
    /// Noisy entries per row of `A`.
    pub row_nnz: Vec<usize>,
    /// Noisy entries per column of `A`.
    pub col_nnz: Vec<usize>,
    /// Noisy entries of `c`.
    pub n0c: usize,
    pub s_a: f64,
    pub s_b: f64,
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub sigma_c: f64,
    pub a_sup: Matrix,
    pub b_inf: Vec<f64>,
    pub mask_a: Mask,
    pub mask_b: Vec<bool>,
}

impl AccuracyInputs {
    pub fn new(
        lp: &LinearProgram,
        profile: &SensitivityProfile,
        budget: &PrivacyBudget,
        components: Components,
        options: PrivatizeOptions,
        chi: f64,
        lambda_cap: f64,
    ) -> Result<Self> {
        let p = mechanism_parameters(lp, profile, budget, components, options)?;
        let (m, n) = (lp.m(), lp.n());
        let (row_nnz, col_nnz) = if p.active.a {
            (profile.mask_a.row_counts(), profile.mask_a.col_counts())
        } else {
            (vec![0; m], vec![0; n])
        };
        let n0c = if p.active.c { profile.mask_c.iter().filter(|&&v| v).count() } else { 0 };
        Ok(Self {
            chi,
            lambda_cap,
            row_nnz,
            col_nnz,
            n0c,
            s_a: p.s_a,
            s_b: p.s_b,
            sigma_a: p.sigma_a,
            sigma_b: p.sigma_b,
            sigma_c: p.sigma_c,
            a_sup: profile.a_sup.clone(),
            b_inf: profile.b_inf.clone(),
            mask_a: if p.active.a { profile.mask_a.clone() } else { Mask::filled(m, n, false) },
            mask_b: (0..m).map(|i| p.active.b && profile.b_sensitive(i)).collect(),
        })
    }
}

/// Summary of one privatized solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub rho: f64,
    pub case_one: bool,
    /// `‖c‖₂ · H · ρ`.
    pub bound: f64,
    pub empirical_subopt: f64,
    pub residual_norm: f64,
}

pub fn chi_from_solution(x_star: &[f64]) -> f64 {
    x_star.iter().copied().fold(0.0, f64::max)
}

/// Largest coordinate of any point of the feasible region.
pub fn chi_over_region(lp: &LinearProgram) -> Result<f64> {
    Ok(coordinate_maxima(lp)?.into_iter().fold(0.0, f64::max))
}

/// `(cᵀη − cᵀω) / min_j (b − Aω)_j`, floored at zero.
///
/// With `ω` strictly feasible this bounds `‖μ‖₁` for every dual solution
/// `μ` of the program, and `η` optimal makes it tightest.
pub fn lambda_bound(lp: &LinearProgram, eta: &[f64], omega: &[f64]) -> Result<f64> {
    let margin = lp
        .a
        .mul_vec(omega)
        .iter()
        .zip(&lp.b)
        .map(|(ax, b)| b - ax)
        .fold(f64::INFINITY, f64::min);
    if margin <= 0.0 {
        return Err(Error::NoSlaterPoint(margin));
    }
    if margin.is_infinite() {
        return Ok(0.0);
    }
    Ok(((lp.objective(eta) - lp.objective(omega)) / margin).max(0.0))
}

/// Program whose constraints are the worst realizable ones: `Â` on noisy
/// entries of `A` and `b_inf` on noisy entries of `b`. Every privatized
/// feasible region contains its feasible region.
pub fn envelope_program(lp: &LinearProgram, profile: &SensitivityProfile) -> LinearProgram {
    let a = Matrix::from_fn(lp.m(), lp.n(), |i, j| {
        if profile.mask_a.get(i, j) {
            profile.a_sup.get(i, j)
        } else {
            lp.a.get(i, j)
        }
    });
    let b = (0..lp.m()).map(|i| if profile.b_sensitive(i) { profile.b_inf[i] } else { lp.b[i] }).collect();
    lp.with_inequalities(a, b)
}

/// `ρ` for the unclamped case.
pub fn rho_case_one(inputs: &AccuracyInputs, m: usize) -> f64 {
    let m = m as f64;
    let (chi, lam) = (inputs.chi, inputs.lambda_cap);
    let (sa, sb) = (inputs.s_a, inputs.s_b);
    let (va, vb, vc) = (inputs.sigma_a.powi(2), inputs.sigma_b.powi(2), inputs.sigma_c.powi(2));
    let n0c = inputs.n0c as f64;
    let row_shift: f64 = inputs.row_nnz.iter().map(|&k| k as f64 * sa).sum();
    let row_sq: f64 = inputs.row_nnz.iter().map(|&k| 2.0 * k as f64 * va + (k as f64 * sa).powi(2)).sum();
    let col_sq: f64 = inputs.col_nnz.iter().map(|&k| 2.0 * k as f64 * va + (k as f64 * sa).powi(2)).sum();
    let total = 2.0 * m * vb
        + m * sb * sb
        + 2.0 * sb * chi * row_shift
        + lam * lam * (2.0 * vb + sb * sb)
        + chi * chi * row_sq
        + 2.0 * n0c * vc
        + m * lam * lam * col_sq
        + 2.0 * chi * chi * n0c * vc;
    total.sqrt()
}

/// `ρ` for the clamped case, using the envelope `Â`, `b_inf`.
pub fn rho_case_two(inputs: &AccuracyInputs, lp: &LinearProgram) -> f64 {
    let (m, n) = (lp.m() as f64, lp.n() as f64);
    let mut a_gap = 0.0;
    for i in 0..lp.m() {
        for j in 0..lp.n() {
            if inputs.mask_a.get(i, j) {
                a_gap += (lp.a.get(i, j) - inputs.a_sup.get(i, j)).powi(2);
            }
        }
    }
    let a_gap = a_gap.sqrt();
    let b_gap = norm2(
        &(0..lp.m())
            .map(|i| if inputs.mask_b[i] { lp.b[i] - inputs.b_inf[i] } else { 0.0 })
            .collect::<Vec<_>>(),
    );
    let (chi, lam, sc) = (inputs.chi, inputs.lambda_cap, inputs.sigma_c);
    let first = norm2(&[n.sqrt() * a_gap * chi, m.sqrt() * a_gap * lam, 2.0 * n.sqrt() * sc * chi]);
    let second = norm2(&[b_gap, 2.0 * sc, m.sqrt() * b_gap * lam]);
    first + second
}

pub fn rho(inputs: &AccuracyInputs, lp: &LinearProgram, case_one: bool) -> f64 {
    if case_one {
        rho_case_one(inputs, lp.m())
    } else {
        rho_case_two(inputs, lp)
    }
}

/// Norm of `[((A−Ã)x̃ − (b−b̃))⁻; ((A−Ã)ᵀμ̃ − (c−c̃))⁺; (c−c̃)ᵀx̃ − (b−b̃)ᵀμ̃]`.
pub fn robinson_residual(lp: &LinearProgram, private: &PrivatizedProgram, tilde: &SolveResult) -> f64 {
    let x = tilde.x();
    let mu = tilde.mu();
    let t = &private.lp_tilde;
    let da = lp.a.sub(&t.a);
    let db: Vec<f64> = lp.b.iter().zip(&t.b).map(|(a, b)| a - b).collect();
    let dc: Vec<f64> = lp.c.iter().zip(&t.c).map(|(a, b)| a - b).collect();
    let mut sq = 0.0;
    for (ax, bb) in da.mul_vec(x).iter().zip(&db) {
        sq += (ax - bb).min(0.0).powi(2);
    }
    for (am, cc) in da.tr_mul_vec(mu).iter().zip(&dc) {
        sq += (am - cc).max(0.0).powi(2);
    }
    sq += (dot(&dc, x) - dot(&db, mu)).powi(2);
    sq.sqrt()
}

/// `‖(x*, μ*) − (x̃*, μ̃*)‖₂`.
pub fn displacement(reference: &SolveResult, tilde: &SolveResult) -> f64 {
    let dx = reference.x().iter().zip(tilde.x()).map(|(a, b)| (a - b).powi(2));
    let dm = reference.mu().iter().zip(tilde.mu()).map(|(a, b)| (a - b).powi(2));
    dx.chain(dm).sum::<f64>().sqrt()
}

/// Residuals below this are treated as an unperturbed program.
pub const DEGENERATE_RESIDUAL: f64 = 1e-12;

/// Displacement-to-residual ratios over `trials` fresh privatizations,
/// in trial order, skipping trials with a negligible residual.
pub fn displacement_ratios(
    lp: &LinearProgram,
    profile: &SensitivityProfile,
    budget: &PrivacyBudget,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let reference = solve(lp)?;
    if !reference.is_optimal() {
        return Err(Error::EmptyRegion);
    }
    let ratios = (0..trials as u32)
        .into_par_iter()
        .map(|t| -> Result<Option<f64>> {
            let mut rng = substream(seed, 0, t);
            let private =
                privatize_with(lp, profile, budget, Components::ALL, PrivatizeOptions::default(), &mut rng)?;
            let tilde = solve_privatized(lp, &private)?;
            let r = robinson_residual(lp, &private, &tilde);
            Ok((r >= DEGENERATE_RESIDUAL).then(|| displacement(&reference, &tilde) / r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ratios.into_iter().flatten().collect())
}

/// Largest observed displacement-to-residual ratio: a lower bound on the
/// Hoffman constant of the program.
pub fn hoffman_empirical<R: RngCore>(
    lp: &LinearProgram,
    profile: &SensitivityProfile,
    budget: &PrivacyBudget,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let ratios = displacement_ratios(lp, profile, budget, trials, rng.next_u64())?;
    if ratios.is_empty() {
        return Err(Error::NoValidTrials);
    }
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// `(cᵀx* − cᵀx̃)/(cᵀx*)`.
pub fn sub_optimality(c: &[f64], x_star: &[f64], x_tilde: &[f64]) -> Result<f64> {
    let opt = dot(c, x_star);
    if opt == 0.0 {
        return Err(Error::ZeroDenominator("optimal objective value"));
    }
    Ok((opt - dot(c, x_tilde)) / opt)
}

/// Hoeffding threshold `ν = diam·sqrt(ln(1/t)/2)` and the fraction of
/// samples with `R − mean(R) ≥ ν`, which should not exceed `t`.
pub fn concentration_check(samples: &[f64], diam: f64, t: f64) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::Empty("no samples for the concentration check"));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must lie in (0, 1]")));
    }
    if !(diam > 0.0 && diam.is_finite()) {
        return Err(Error::InvalidParameter(format!("diameter {diam} must be positive")));
    }
    let threshold = diam * ((1.0 / t).ln() / 2.0).sqrt();
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let over = samples.iter().filter(|&&r| r - mean >= threshold).count();
    Ok((threshold, over as f64 / samples.len() as f64))
}

/// Per-trial report against a known non-private optimum.
#[allow(clippy::too_many_arguments)]
pub fn report(
    lp: &LinearProgram,
    inputs: &AccuracyInputs,
    private: &PrivatizedProgram,
    tilde: &SolveResult,
    x_star: &[f64],
    hoffman: f64,
) -> Result<AccuracyReport> {
    let rho = rho(inputs, lp, private.case_one);
    Ok(AccuracyReport {
        rho,
        case_one: private.case_one,
        bound: norm2(&lp.c) * hoffman * rho,
        empirical_subopt: sub_optimality(&lp.c, x_star, tilde.x())?,
        residual_norm: robinson_residual(lp, private, tilde),
    })
}

/// Constants `(χ, Λ)` for an instance: `χ` over the original feasible
/// region and `Λ` from a Slater point of the envelope program, which is
/// strictly feasible for every privatized program.
pub fn instance_constants(lp: &LinearProgram, profile: &SensitivityProfile) -> Result<(f64, f64)> {
    let chi = chi_over_region(lp)?;
    let env = envelope_program(lp, profile);
    let (omega, margin) = slater_point(&env)?;
    if margin <= 0.0 {
        return Err(Error::NoSlaterPoint(margin));
    }
    let eta = solve(lp)?;
    let lambda = lambda_bound(lp, eta.x(), &omega)?;
    Ok((chi, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::privatizer::privatize;

    fn textbook() -> LinearProgram {
        LinearProgram::from_rows(vec![2.0, 3.0], &[vec![1.0, 1.0], vec![1.0, 3.0]], vec![4.0, 6.0]).unwrap()
    }

    fn wide_profile(lp: &LinearProgram, d: f64) -> SensitivityProfile {
        let mut p = SensitivityProfile::tight(lp, d, d, d);
        p.a_sup = lp.a.map(|v| v + 100.0);
        p.b_inf = lp.b.iter().map(|v| v - 100.0).collect();
        p
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi_from_solution(&[3.0, 1.0]), 3.0);
        assert_eq!(chi_from_solution(&[0.0, 0.0]), 0.0);
        assert!((chi_over_region(&textbook()).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_examples() {
        let lp = textbook();
        let v = lambda_bound(&lp, &[3.0, 1.0], &[0.5, 0.5]).unwrap();
        assert!((v - 6.5 / 3.0).abs() < 1e-12);
        let zero = LinearProgram { c: vec![0.0, 0.0], ..lp.clone() };
        assert_eq!(lambda_bound(&zero, &[3.0, 1.0], &[0.5, 0.5]).unwrap(), 0.0);
        assert!(matches!(lambda_bound(&lp, &[3.0, 1.0], &[3.0, 1.0]), Err(Error::NoSlaterPoint(_))));
        let mu = solve(&lp).unwrap();
        assert!(v >= mu.mu().iter().copied().fold(0.0, f64::max));
    }

    #[test]
    fn rho_vanishes_without_sensitivity() {
        let lp = textbook();
        let profile = SensitivityProfile::tight(&lp, 0.0, 0.0, 0.0);
        let budget = PrivacyBudget::even(1.0, 0.1).unwrap();
        let inputs =
            AccuracyInputs::new(&lp, &profile, &budget, Components::ALL, PrivatizeOptions::default(), 4.0, 3.0).unwrap();
        assert_eq!(rho(&inputs, &lp, true), 0.0);
        assert_eq!(rho(&inputs, &lp, false), 0.0);
    }

    #[test]
    fn rho_case_two_with_tight_envelope_keeps_cost_terms() {
        let lp = textbook();
        let profile = SensitivityProfile::tight(&lp, 1.0, 1.0, 1.0);
        let budget = PrivacyBudget::even(1.0, 0.1).unwrap();
        let inputs =
            AccuracyInputs::new(&lp, &profile, &budget, Components::ALL, PrivatizeOptions::default(), 2.0, 5.0).unwrap();
        let sc = inputs.sigma_c;
        let expected = 2.0 * 2f64.sqrt() * sc * 2.0 + 2.0 * sc;
        assert!((rho(&inputs, &lp, false) - expected).abs() < 1e-12);
    }

    #[test]
    fn rho_decreases_with_eps() {
        let lp = textbook();
        let profile = wide_profile(&lp, 1.0);
        let mut last = f64::INFINITY;
        for k in 1..20 {
            let budget = PrivacyBudget::even(0.25 * k as f64, 0.1).unwrap();
            let inputs =
                AccuracyInputs::new(&lp, &profile, &budget, Components::ALL, PrivatizeOptions::default(), 4.0, 3.0)
                    .unwrap();
            let r = rho(&inputs, &lp, true);
            assert!(r <= last);
            last = r;
        }
    }

    #[test]
    fn residual_zero_for_identity_and_cost_only_structure() {
        let lp = textbook();
        let profile = wide_profile(&lp, 0.5);
        let budget = PrivacyBudget::new(1.0, 0.1, 0.0, 0.0, 1.0).unwrap();
        let mut cost_only = profile.clone();
        cost_only.delta11_a = 0.0;
        cost_only.delta1_b = 0.0;
        let private = privatize(&lp, &cost_only, &budget, &mut substream(1, 0, 0)).unwrap();
        let tilde = solve(&private.lp_tilde).unwrap();
        let dc: Vec<f64> = lp.c.iter().zip(&private.lp_tilde.c).map(|(a, b)| a - b).collect();
        let expected = dc.iter().map(|v| (-v).max(0.0).powi(2)).sum::<f64>() + dot(&dc, tilde.x()).powi(2);
        assert!((robinson_residual(&lp, &private, &tilde) - expected.sqrt()).abs() < 1e-12);

        let identity = PrivatizedProgram { lp_tilde: lp.clone(), ..private };
        let r = solve(&lp).unwrap();
        assert_eq!(robinson_residual(&lp, &identity, &r), 0.0);
    }

    #[test]
    fn sub_optimality_examples() {
        assert_eq!(sub_optimality(&[1.0], &[10.0], &[8.0]).unwrap(), 0.2);
        assert_eq!(sub_optimality(&[1.0], &[10.0], &[10.0]).unwrap(), 0.0);
        assert!(sub_optimality(&[1.0], &[0.0], &[0.0]).is_err());
    }

    #[test]
    fn concentration_examples() {
        let (nu, frac) = concentration_check(&[1.0; 10], 2.0, 0.1).unwrap();
        assert!(nu > 0.0 && frac == 0.0);
        let (nu, frac) = concentration_check(&[0.0, 1.0, 2.0, 3.0], 1.0, 1.0).unwrap();
        assert_eq!(nu, 0.0);
        assert_eq!(frac, 0.5);
        assert!(concentration_check(&[], 1.0, 0.1).is_err());
    }

    #[test]
    fn hoffman_requires_perturbation() {
        let lp = textbook();
        let profile = SensitivityProfile::tight(&lp, 0.0, 0.0, 0.0);
        let budget = PrivacyBudget::even(1.0, 0.1).unwrap();
        let err = hoffman_empirical(&lp, &profile, &budget, 5, &mut substream(0, 0, 0));
        assert!(matches!(err, Err(Error::NoValidTrials)));
    }

    #[test]
    fn hoffman_estimate_is_a_running_max() {
        let lp = textbook();
        let profile = wide_profile(&lp, 0.05);
        let budget = PrivacyBudget::even(1.0, 0.1).unwrap();
        let few = hoffman_empirical(&lp, &profile, &budget, 20, &mut substream(3, 0, 0)).unwrap();
        let many = hoffman_empirical(&lp, &profile, &budget, 200, &mut substream(3, 0, 0)).unwrap();
        assert!(many >= few && few > 0.0);
    }
}
