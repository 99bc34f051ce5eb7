//! Cache-split optimization: the cache service probability objective with
//! its closed-form maximizer, the energy-efficiency objective with numeric
//! maximization, and cluster-size averaging.
//!
//! SCDP values are inputs rather than recomputed here, so the same optimizer
//! runs on analytic or simulated delivery probabilities and a rho search
//! never re-triggers the expensive estimators.

use crate::error::{Error, Result};
use crate::field::ClusterGeometry;
use crate::popularity::{approx_range_probs, cache_range_probs, CachePlan, ZipfPopularity};
use crate::scdp::SirTargets;
use serde::Serialize;

/// Transmit and backhaul power of one SBS.
#[derive(Debug, Clone, Copy)]
pub struct PowerModel {
    transmit: f64,
    backhaul_per_request: f64,
}

impl PowerModel {
    pub fn new(transmit: f64, backhaul_per_request: f64) -> Result<Self> {
        if !(transmit > 0.0) {
            return Err(Error::Domain("transmit power must be positive".into()));
        }
        if !(backhaul_per_request >= 0.0) {
            return Err(Error::Domain("backhaul power must be >= 0".into()));
        }
        Ok(Self {
            transmit,
            backhaul_per_request,
        })
    }

    pub fn transmit(&self) -> f64 {
        self.transmit
    }

    pub fn backhaul_per_request(&self) -> f64 {
        self.backhaul_per_request
    }
}

/// How an optimal split was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OptMethod {
    ClosedForm,
    GridSearch,
    GoldenSection,
}

impl std::fmt::Display for OptMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OptMethod::ClosedForm => "closed-form",
            OptMethod::GridSearch => "grid-search",
            OptMethod::GoldenSection => "golden-section",
        })
    }
}

/// An optimal MPC fraction with the objective value attained there.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OptimizationResult {
    pub rho_star: f64,
    pub objective: f64,
    pub method: OptMethod,
    pub k: u32,
    /// True when every rho is equivalent (K = 1 clusters) or when the
    /// concavity precondition failed and a grid search stood in.
    pub degenerate: bool,
}

/// The SCDP triple entering the rate and energy objectives: JT at theta1 for
/// MPC hits, PT-SS at theta2 for LCD hits, JT at theta3 for backhaul-served
/// misses.
#[derive(Debug, Clone, Copy)]
pub struct ScdpTriple {
    pub jt_theta1: f64,
    pub pt_theta2: f64,
    pub jt_theta3: f64,
}

impl ScdpTriple {
    pub fn new(jt_theta1: f64, pt_theta2: f64, jt_theta3: f64) -> Result<Self> {
        for (name, v) in [
            ("jt_theta1", jt_theta1),
            ("pt_theta2", pt_theta2),
            ("jt_theta3", jt_theta3),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(Self {
            jt_theta1,
            pt_theta2,
            jt_theta3,
        })
    }
}

fn check_probability(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

/// Cache service probability f(rho|K): a request is served by the cluster
/// cache when it hits a range and the matching delivery succeeds,
/// f = p_mpc * scdp_jt + p_lcd * scdp_pt.
pub fn cache_service_prob(
    pop: &ZipfPopularity,
    plan: &CachePlan,
    scdp_jt_val: f64,
    scdp_pts_val: f64,
) -> Result<f64> {
    check_probability("scdp_jt", scdp_jt_val)?;
    check_probability("scdp_pts", scdp_pts_val)?;
    let p = cache_range_probs(pop, plan);
    Ok(p.mpc * scdp_jt_val + p.lcd * scdp_pts_val)
}

/// Service probability on the continuous range approximation.
pub fn cache_service_prob_approx(
    pop: &ZipfPopularity,
    plan: &CachePlan,
    scdp_jt_val: f64,
    scdp_pts_val: f64,
) -> Result<f64> {
    check_probability("scdp_jt", scdp_jt_val)?;
    check_probability("scdp_pts", scdp_pts_val)?;
    let p = approx_range_probs(pop, plan)?;
    Ok(p.mpc * scdp_jt_val + p.lcd * scdp_pts_val)
}

/// The approximate service objective without its (M/N)^{1-gamma} prefactor;
/// the maximizer is invariant to that scale.
fn service_shape(rho: f64, k: f64, gamma: f64, jt: f64, pts: f64) -> f64 {
    let e = 1.0 - gamma;
    rho.powf(e) * jt + ((rho * (1.0 - k) + k).powf(e) - rho.powf(e)) * pts
}

/// Closed-form maximizer of the approximate cache service probability:
///
/// rho* = min{ K * [ ((K-1)/(ratio-1))^{1/gamma} + K - 1 ]^{-1}, 1 },
/// ratio = scdp_jt / scdp_pts.
///
/// Requires K >= 2 (a single SBS makes the split immaterial; returns rho = 1
/// flagged degenerate) and ratio > 1 for strict concavity: when the ratio
/// drops to 1 or below the routine falls back to a 0.01-step grid search on
/// the approximate objective and flags the result.
///
/// The reported objective is the approximate service probability up to the
/// (M/N)^{1-gamma} scale factor, which the maximizer does not depend on.
pub fn rho_star_service(
    k: u32,
    gamma: f64,
    scdp_jt_val: f64,
    scdp_pts_val: f64,
) -> Result<OptimizationResult> {
    check_probability("scdp_jt", scdp_jt_val)?;
    check_probability("scdp_pts", scdp_pts_val)?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::ApproxDomain(format!(
            "closed form requires 0 < gamma < 1, got {gamma}"
        )));
    }
    if k < 1 {
        return Err(Error::Domain("cluster size must be >= 1".into()));
    }
    if k == 1 {
        // every rho caches the same M files; nothing to assign
        return Ok(OptimizationResult {
            rho_star: 1.0,
            objective: service_shape(1.0, 1.0, gamma, scdp_jt_val, scdp_pts_val),
            method: OptMethod::ClosedForm,
            k,
            degenerate: true,
        });
    }
    let kf = k as f64;
    let ratio = scdp_jt_val / scdp_pts_val;
    if !(ratio > 1.0) {
        log::warn!("scdp ratio {ratio} <= 1 violates concavity; using grid search");
        let shape = |rho: f64| service_shape(rho, kf, gamma, scdp_jt_val, scdp_pts_val);
        let mut out = grid_search_rho(shape, 0.01)?;
        out.k = k;
        out.degenerate = true;
        return Ok(out);
    }
    let rho = if ratio >= kf {
        // the objective increases over the whole interval
        1.0
    } else {
        (kf / (((kf - 1.0) / (ratio - 1.0)).powf(1.0 / gamma) + kf - 1.0)).min(1.0)
    };
    Ok(OptimizationResult {
        rho_star: rho,
        objective: service_shape(rho, kf, gamma, scdp_jt_val, scdp_pts_val),
        method: OptMethod::ClosedForm,
        k,
        degenerate: false,
    })
}

/// Exhaustive maximization of `objective` over rho in {0, step, 2*step, ..., 1};
/// ties break toward smaller rho.
pub fn grid_search_rho<F: Fn(f64) -> f64>(objective: F, step: f64) -> Result<OptimizationResult> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::Argument(format!(
            "grid step {step} outside (0, 0.5]"
        )));
    }
    let mut best_rho = 0.0;
    let mut best = objective(0.0);
    let mut i = 1u64;
    loop {
        let rho = (i as f64 * step).min(1.0);
        let v = objective(rho);
        if v > best {
            best = v;
            best_rho = rho;
        }
        if rho >= 1.0 {
            break;
        }
        i += 1;
    }
    Ok(OptimizationResult {
        rho_star: best_rho,
        objective: best,
        method: OptMethod::GridSearch,
        k: 0,
        degenerate: false,
    })
}

/// Average effective delivered rate: the target rate weighted by the
/// probability each case both occurs and delivers,
/// R_d * [p_mpc * jt(theta1) + p_lcd * pt(theta2) + p_miss * jt(theta3)].
pub fn effective_rate(
    pop: &ZipfPopularity,
    plan: &CachePlan,
    rate: f64,
    scdps: &ScdpTriple,
) -> f64 {
    let p = cache_range_probs(pop, plan);
    rate * (p.mpc * scdps.jt_theta1 + p.lcd * scdps.pt_theta2 + p.miss * scdps.jt_theta3)
}

/// Average power to serve one request in a K-SBS cluster: every SBS
/// transmits, and a miss additionally pulls the file over each SBS's
/// backhaul, P = K*P_t + K*P_b*p_miss.
pub fn average_power(power: &PowerModel, k: u32, p_miss: f64) -> Result<f64> {
    check_probability("p_miss", p_miss)?;
    Ok(k as f64 * power.transmit() + k as f64 * power.backhaul_per_request() * p_miss)
}

/// Energy efficiency (bit/s/W): effective rate over average power, exact
/// cache probabilities.
pub fn energy_efficiency(
    pop: &ZipfPopularity,
    plan: &CachePlan,
    power: &PowerModel,
    targets: &SirTargets,
    scdps: &ScdpTriple,
) -> Result<f64> {
    let p = cache_range_probs(pop, plan);
    let rate = effective_rate(pop, plan, targets.rate(), scdps);
    Ok(rate / average_power(power, plan.cluster_size(), p.miss)?)
}

/// Energy efficiency on the continuous range approximation.
pub fn energy_efficiency_approx(
    pop: &ZipfPopularity,
    plan: &CachePlan,
    power: &PowerModel,
    targets: &SirTargets,
    scdps: &ScdpTriple,
) -> Result<f64> {
    let p = approx_range_probs(pop, plan)?;
    let rate = targets.rate()
        * (p.mpc * scdps.jt_theta1 + p.lcd * scdps.pt_theta2 + p.miss * scdps.jt_theta3);
    Ok(rate / average_power(power, plan.cluster_size(), p.miss.clamp(0.0, 1.0))?)
}

/// Maximize the approximate energy efficiency over rho in [0, 1]: a coarse
/// 0.02-step grid localizes the peak, then golden-section refinement narrows
/// it to `tol`. `capacity` is the per-SBS cache size M entering the M/N
/// scale of the approximate ranges. The exact-EE grid search is the
/// verification oracle in the test suite.
pub fn maximize_ee(
    pop: &ZipfPopularity,
    capacity: u64,
    k: u32,
    power: &PowerModel,
    targets: &SirTargets,
    scdps: &ScdpTriple,
    tol: f64,
) -> Result<OptimizationResult> {
    if !(tol > 0.0 && tol <= 0.1) {
        return Err(Error::Argument(format!("tolerance {tol} outside (0, 0.1]")));
    }
    let objective = |rho: f64| -> Result<f64> {
        let plan = CachePlan::new(rho, capacity, k)?;
        energy_efficiency_approx(pop, &plan, power, targets, scdps)
    };
    // coarse grid, step 0.02
    let mut best_i = 0usize;
    let mut best = f64::NEG_INFINITY;
    let n = 50usize;
    for i in 0..=n {
        let v = objective(i as f64 / n as f64)?;
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut a = ((best_i as f64 - 1.0) / n as f64).max(0.0);
    let mut b = ((best_i as f64 + 1.0) / n as f64).min(1.0);
    // golden-section refinement on the bracketing interval
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d)?;
        }
    }
    let rho = 0.5 * (a + b);
    Ok(OptimizationResult {
        rho_star: rho,
        objective: objective(rho)?,
        method: OptMethod::GoldenSection,
        k,
        degenerate: k == 1,
    })
}

/// Average a per-cluster-size objective over the cluster-size distribution:
/// sum_{K=1..K_max} pmf(K) * value(K). The unnormalized truncation drops the
/// empty-cluster mass and the K > K_max tail; the renormalized mode divides
/// by the retained mass for sensitivity checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AverageMode {
    Truncated,
    Renormalized,
}

pub fn average_over_k(
    values: &[f64],
    geom: &ClusterGeometry,
    k_max: u32,
    mode: AverageMode,
) -> Result<f64> {
    if k_max < 1 {
        return Err(Error::Argument("K_max must be >= 1".into()));
    }
    if values.len() != k_max as usize {
        return Err(Error::Argument(format!(
            "expected {} per-K values, got {}",
            k_max,
            values.len()
        )));
    }
    let mut total = 0.0;
    let mut mass = 0.0;
    for k in 1..=k_max {
        let p = geom.cluster_size_pmf(k);
        total += p * values[k as usize - 1];
        mass += p;
    }
    Ok(match mode {
        AverageMode::Truncated => total,
        AverageMode::Renormalized => total / mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pop() -> ZipfPopularity {
        ZipfPopularity::new(100_000, 0.5).unwrap()
    }

    fn power() -> PowerModel {
        PowerModel::new(1.0, 10.0).unwrap()
    }

    /// Summation oracle for the service probability at one split.
    fn service_oracle(gamma: f64, rho: f64, k: u64, jt: f64, pts: f64) -> f64 {
        let n = 100_000u64;
        let m = 5000u64;
        let mut z = 0.0;
        for i in (1..=n).rev() {
            z += (i as f64).powf(-gamma);
        }
        let mpc = (rho * m as f64 + 1e-9).floor() as u64;
        let total = mpc + k * (m - mpc);
        let sum_to = |upto: u64| -> f64 {
            let mut s = 0.0;
            for i in (1..=upto.min(n)).rev() {
                s += (i as f64).powf(-gamma);
            }
            s / z
        };
        sum_to(mpc) * jt + (sum_to(total) - sum_to(mpc)) * pts
    }

    #[test]
    fn service_prob_reduces_to_hit_prob_with_perfect_delivery() {
        let pop = pop();
        let plan = CachePlan::new(0.4, 5000, 3).unwrap();
        let f = cache_service_prob(&pop, &plan, 1.0, 1.0).unwrap();
        let hit = crate::popularity::cache_hit_prob(&pop, &plan);
        assert_relative_eq!(f, hit, max_relative = 1e-12);
    }

    #[test]
    fn service_prob_mpc_only_at_rho_one() {
        let pop = pop();
        let plan = CachePlan::new(1.0, 5000, 3).unwrap();
        let f = cache_service_prob(&pop, &plan, 0.8, 0.4).unwrap();
        assert_relative_eq!(f, pop.prefix_prob(5000) * 0.8, max_relative = 1e-12);
    }

    #[test]
    fn service_prob_against_componentwise_oracle() {
        let pop = pop();
        let plan = CachePlan::new(0.4, 5000, 3).unwrap();
        let (jt, pts) = (0.8521, 0.3566);
        let f = cache_service_prob(&pop, &plan, jt, pts).unwrap();
        assert_relative_eq!(f, service_oracle(0.5, 0.4, 3, jt, pts), max_relative = 1e-9);
    }

    #[test]
    fn rho_star_boundary_case_returns_exactly_one() {
        // ratio = K puts the stationary point at the right endpoint
        let r = rho_star_service(3, 0.5, 0.9, 0.3).unwrap();
        assert_eq!(r.rho_star, 1.0);
        assert_eq!(r.method, OptMethod::ClosedForm);
        assert!(!r.degenerate);
    }

    #[test]
    fn rho_star_near_equal_scdps_prefers_diversity() {
        let r = rho_star_service(3, 0.5, 0.40004, 0.4).unwrap();
        assert!(r.rho_star < 1e-3, "rho* = {}", r.rho_star);
    }

    #[test]
    fn rho_star_direct_evaluation() {
        // K=3, gamma=0.5, ratio=2: ((K-1)/(ratio-1))^{1/gamma} = 4,
        // rho* = 3/(4+2) = 1/2
        let r = rho_star_service(3, 0.5, 0.8, 0.4).unwrap();
        assert_relative_eq!(r.rho_star, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn rho_star_violated_concavity_falls_back_to_grid() {
        let r = rho_star_service(3, 0.5, 0.4, 0.4).unwrap();
        assert_eq!(r.method, OptMethod::GridSearch);
        assert!(r.degenerate);
        // equal scdps make the objective the pure coverage shape, maximized
        // at full diversity
        assert_eq!(r.rho_star, 0.0);
    }

    #[test]
    fn rho_star_single_sbs_is_flagged_noop() {
        let r = rho_star_service(1, 0.5, 0.8, 0.4).unwrap();
        assert_eq!(r.rho_star, 1.0);
        assert!(r.degenerate);
    }

    #[test]
    fn rho_star_rejects_bad_gamma() {
        assert!(rho_star_service(3, 0.0, 0.8, 0.4).is_err());
        assert!(rho_star_service(3, 1.0, 0.8, 0.4).is_err());
    }

    #[test]
    fn grid_search_tie_breaks_toward_small_rho() {
        let r = grid_search_rho(|_| 1.0, 0.1).unwrap();
        assert_eq!(r.rho_star, 0.0);
    }

    #[test]
    fn grid_search_identity_objective() {
        let r = grid_search_rho(|rho| rho, 0.1).unwrap();
        assert_eq!(r.rho_star, 1.0);
    }

    #[test]
    fn grid_search_rejects_bad_step() {
        assert!(grid_search_rho(|rho| rho, 0.0).is_err());
        assert!(grid_search_rho(|rho| rho, 0.6).is_err());
    }

    #[test]
    fn grid_search_matches_closed_form_on_approx_objective() {
        let (jt, pts) = (0.8, 0.4);
        let closed = rho_star_service(3, 0.5, jt, pts).unwrap();
        let grid = grid_search_rho(|rho| service_shape(rho, 3.0, 0.5, jt, pts), 0.01).unwrap();
        assert!(
            (closed.rho_star - grid.rho_star).abs() <= 0.01 + 1e-12,
            "closed {} vs grid {}",
            closed.rho_star,
            grid.rho_star
        );
    }

    #[test]
    fn effective_rate_perfect_delivery_is_target_rate() {
        let pop = pop();
        let plan = CachePlan::new(0.4, 5000, 3).unwrap();
        let scdps = ScdpTriple::new(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(
            effective_rate(&pop, &plan, 1e7, &scdps),
            1e7,
            max_relative = 1e-9
        );
    }

    #[test]
    fn effective_rate_pure_backhaul() {
        // zero capacity: every request misses and rides on jt(theta3)
        let pop = pop();
        let plan = CachePlan::new(0.4, 0, 3).unwrap();
        let scdps = ScdpTriple::new(0.9, 0.5, 0.25).unwrap();
        assert_relative_eq!(
            effective_rate(&pop, &plan, 1e7, &scdps),
            1e7 * 0.25,
            max_relative = 1e-12
        );
    }

    #[test]
    fn average_power_arithmetic() {
        let p = power();
        assert_relative_eq!(
            average_power(&p, 3, 0.5).unwrap(),
            18.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            average_power(&p, 3, 0.0).unwrap(),
            3.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            average_power(&p, 3, 1.0).unwrap(),
            33.0,
            max_relative = 1e-12
        );
        assert!(average_power(&p, 3, 1.5).is_err());
    }

    #[test]
    fn ee_all_hit_perfect_delivery() {
        // capacity covers the whole library: no misses, EE = R_d/(K*P_t)
        let pop = ZipfPopularity::new(1000, 0.5).unwrap();
        let plan = CachePlan::new(1.0, 1000, 3).unwrap();
        let targets = SirTargets::new(1e7, 1e7, 3, 0.95).unwrap();
        let scdps = ScdpTriple::new(1.0, 1.0, 1.0).unwrap();
        let ee = energy_efficiency(&pop, &plan, &power(), &targets, &scdps).unwrap();
        assert_relative_eq!(ee, 1e7 / 3.0, max_relative = 1e-9);
    }

    #[test]
    fn ee_no_cache_baseline() {
        let pop = pop();
        let plan = CachePlan::new(0.0, 0, 3).unwrap();
        let targets = SirTargets::new(1e7, 1e7, 3, 0.95).unwrap();
        let scdps = ScdpTriple::new(0.9, 0.5, 0.25).unwrap();
        let ee = energy_efficiency(&pop, &plan, &power(), &targets, &scdps).unwrap();
        assert_relative_eq!(ee, 1e7 * 0.25 / (3.0 * (1.0 + 10.0)), max_relative = 1e-12);
    }

    #[test]
    fn ee_exact_and_approx_agree_at_defaults() {
        let pop = pop();
        let targets = SirTargets::new(1e7, 1e7, 3, 0.95).unwrap();
        let scdps = ScdpTriple::new(0.8521, 0.3566, 0.8279).unwrap();
        for i in 0..=20 {
            let plan = CachePlan::new(i as f64 / 20.0, 5000, 3).unwrap();
            let exact = energy_efficiency(&pop, &plan, &power(), &targets, &scdps).unwrap();
            let approx = energy_efficiency_approx(&pop, &plan, &power(), &targets, &scdps).unwrap();
            assert!(
                (exact - approx).abs() / exact < 0.02,
                "rho={}: exact {exact} approx {approx}",
                plan.rho()
            );
        }
    }

    #[test]
    fn maximize_ee_free_reliable_backhaul_degenerates_to_mpc() {
        // no backhaul power and the miss route at least as reliable as any
        // hit route: misses are free, so shrink coverage (rho = 1)
        let pop = pop();
        let free = PowerModel::new(1.0, 0.0).unwrap();
        let targets = SirTargets::new(1e7, 1e7, 3, 0.95).unwrap();
        let scdps = ScdpTriple::new(0.85, 0.36, 0.9).unwrap();
        let got = maximize_ee(&pop, 5000, 3, &free, &targets, &scdps, 1e-4).unwrap();
        assert!((got.rho_star - 1.0).abs() < 1e-3, "rho* = {}", got.rho_star);
        // grid oracle on the exact objective agrees
        let grid = grid_search_rho(
            |rho| {
                let plan = CachePlan::new(rho, 5000, 3).unwrap();
                energy_efficiency(&pop, &plan, &free, &targets, &scdps).unwrap()
            },
            0.01,
        )
        .unwrap();
        assert_eq!(grid.rho_star, 1.0);
    }

    #[test]
    fn maximize_ee_matches_exact_grid_oracle_at_moderate_shape() {
        let pop = pop();
        let targets = SirTargets::new(1e7, 1e7, 3, 0.95).unwrap();
        let scdps = ScdpTriple::new(0.8521, 0.3566, 0.8279).unwrap();
        let approx = maximize_ee(&pop, 5000, 3, &power(), &targets, &scdps, 1e-4).unwrap();
        let grid = grid_search_rho(
            |rho| {
                let plan = CachePlan::new(rho, 5000, 3).unwrap();
                energy_efficiency(&pop, &plan, &power(), &targets, &scdps).unwrap()
            },
            0.01,
        )
        .unwrap();
        assert!(
            (approx.rho_star - grid.rho_star).abs() <= 0.05,
            "approx {} vs exact grid {}",
            approx.rho_star,
            grid.rho_star
        );
    }

    #[test]
    fn maximize_ee_backhaul_delay_lowers_rho_star() {
        let pop = pop();
        let mut out = Vec::new();
        for beta in [0.3, 0.95] {
            let targets = SirTargets::new(1e7, 1e7, 3, beta).unwrap();
            // slower backhaul slot means a harder theta3, so a lower jt3
            let jt3 = if beta < 0.5 { 0.30 } else { 0.78 };
            let scdps = ScdpTriple::new(0.8521, 0.3566, jt3).unwrap();
            out.push(
                maximize_ee(&pop, 5000, 3, &power(), &targets, &scdps, 1e-4)
                    .unwrap()
                    .rho_star,
            );
        }
        assert!(
            out[0] <= out[1] + 1e-9,
            "beta=0.3 {} vs beta=0.95 {}",
            out[0],
            out[1]
        );
    }

    #[test]
    fn approx_service_objective_is_concave_when_jt_dominates() {
        // non-positive second differences on a 0.01 grid
        for &(k, gamma) in &[(2u32, 0.5), (3, 0.5), (4, 0.9)] {
            let kf = k as f64;
            let f: Vec<f64> = (0..=100)
                .map(|i| service_shape(i as f64 / 100.0, kf, gamma, 0.8, 0.4))
                .collect();
            for w in f.windows(3) {
                let second = w[2] - 2.0 * w[1] + w[0];
                assert!(second <= 1e-12, "K={k} gamma={gamma}: {second}");
            }
        }
    }

    #[test]
    fn average_over_k_constant_value() {
        let geom = ClusterGeometry::new(100.0, 1e-4).unwrap();
        let ones = vec![1.0; 10];
        let truncated = average_over_k(&ones, &geom, 10, AverageMode::Truncated).unwrap();
        // in-test Poisson oracle for the retained mass
        let mu = geom.mean_cluster_size();
        let mut expect = 0.0;
        let mut term = (-mu).exp();
        for k in 1..=10u32 {
            term *= mu / k as f64;
            expect += term;
        }
        assert_relative_eq!(truncated, expect, max_relative = 1e-12);
        assert!((truncated - 0.966).abs() < 0.005);
        let renorm = average_over_k(&ones, &geom, 10, AverageMode::Renormalized).unwrap();
        assert_relative_eq!(renorm, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn average_over_k_single_cluster_size() {
        let geom = ClusterGeometry::new(100.0, 1e-4).unwrap();
        let v = average_over_k(&[0.7], &geom, 1, AverageMode::Truncated).unwrap();
        assert_relative_eq!(v, geom.cluster_size_pmf(1) * 0.7, max_relative = 1e-12);
        assert!(average_over_k(&[0.7, 0.1], &geom, 1, AverageMode::Truncated).is_err());
    }
}
