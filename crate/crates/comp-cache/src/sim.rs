//! Ground-truth physical-layer Monte Carlo simulator: PPP SBS layout over a
//! square window, a hexagonal (or equal-area disc) cluster of interest at
//! the origin, Rayleigh fading, and exact SIR computations for JT, the
//! distance-ordered PT-SS SIC chain, and PT-OS.
//!
//! Everything non-cooperating interferes: the interferer field is every PPP
//! point outside the origin cluster, whichever cluster it would belong to.
//! Realizations are independent and keyed by a per-realization RNG stream,
//! so batches are bit-reproducible under any parallel schedule.

use crate::error::{Error, Result};
use crate::field::ClusterGeometry;
use crate::field::PathlossModel;
use crate::scdp::{Method, ScdpEstimate, Scheme};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use rayon::prelude::*;

/// Shape of the origin cluster of interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterMode {
    /// Hexagon with inradius R_h (the grid cell of the cluster tiling).
    Hexagon,
    /// Equal-area disc of radius R (the analytic approximation).
    Disc,
}

impl ClusterMode {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "hexagon" | "hex" => Ok(ClusterMode::Hexagon),
            "disc" | "disk" => Ok(ClusterMode::Disc),
            _ => Err(Error::Argument(format!(
                "unknown cluster mode '{name}' (expected hexagon or disc)"
            ))),
        }
    }
}

impl std::fmt::Display for ClusterMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClusterMode::Hexagon => "hexagon",
            ClusterMode::Disc => "disc",
        })
    }
}

/// Simulation protocol: window, realization count, cluster shape, optional
/// conditioning on the in-cluster SBS count, and the seed.
#[derive(Debug, Clone, Copy)]
pub struct SimProtocol {
    pub window_side: f64,
    pub n_realizations: u64,
    pub cluster_mode: ClusterMode,
    pub conditioned_k: Option<u32>,
    pub seed: u64,
}

impl SimProtocol {
    pub fn new(
        window_side: f64,
        n_realizations: u64,
        cluster_mode: ClusterMode,
        conditioned_k: Option<u32>,
        seed: u64,
    ) -> Result<Self> {
        if n_realizations < 1 {
            return Err(Error::Argument("need at least one realization".into()));
        }
        if let Some(k) = conditioned_k {
            if k < 1 {
                return Err(Error::Argument(
                    "conditioning requires at least one cooperator".into(),
                ));
            }
        }
        Ok(Self {
            window_side,
            n_realizations,
            cluster_mode,
            conditioned_k,
            seed,
        })
    }

    /// The interferer field must surround the cluster.
    pub fn validate(&self, geom: &ClusterGeometry) -> Result<()> {
        if self.window_side < 4.0 * geom.half_spacing() {
            return Err(Error::Argument(format!(
                "window side {} must be >= 4 * half spacing ({})",
                self.window_side,
                4.0 * geom.half_spacing()
            )));
        }
        Ok(())
    }
}

/// Point inside a regular hexagon centered at the origin with inradius `a`
/// (flat edges normal to the directions 0, 60, 120 degrees).
fn in_hexagon(x: f64, y: f64, a: f64) -> bool {
    let s3 = 3.0f64.sqrt() / 2.0;
    x.abs() <= a && (0.5 * x + s3 * y).abs() <= a && (-0.5 * x + s3 * y).abs() <= a
}

fn in_cluster(mode: ClusterMode, geom: &ClusterGeometry, x: f64, y: f64) -> bool {
    match mode {
        ClusterMode::Hexagon => in_hexagon(x, y, geom.half_spacing()),
        ClusterMode::Disc => x * x + y * y <= geom.disc_radius() * geom.disc_radius(),
    }
}

/// Uniform point in the origin cluster.
fn sample_in_cluster<R: Rng + ?Sized>(
    mode: ClusterMode,
    geom: &ClusterGeometry,
    rng: &mut R,
) -> [f64; 2] {
    match mode {
        ClusterMode::Hexagon => {
            let a = geom.half_spacing();
            let circum = 2.0 * a / 3.0f64.sqrt();
            loop {
                let x = rng.gen_range(-a..=a);
                let y = rng.gen_range(-circum..=circum);
                if in_hexagon(x, y, a) {
                    return [x, y];
                }
            }
        }
        ClusterMode::Disc => {
            let r = geom.disc_radius() * rng.gen::<f64>().sqrt();
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            [r * phi.cos(), r * phi.sin()]
        }
    }
}

/// One sampled network: cooperator and interferer layouts plus every fading
/// draw the three schemes need.
///
/// Cooperator power gains are |h|^2 of the complex coefficients, so JT and
/// the PT schemes see the same channel when compared on one realization.
/// PT-OS needs interferer fading per orthogonal sub-band: stream 0 reuses
/// the shared-band draws (making K = 1 coincide with JT/PT-SS exactly) and
/// higher streams get independent draws.
#[derive(Debug, Clone)]
pub struct NetworkRealization {
    pub cooperators: Vec<[f64; 2]>,
    pub interferers: Vec<[f64; 2]>,
    /// Complex CN(0,1) coefficients for the JT coherent sum, one per cooperator.
    pub coop_fading: Vec<(f64, f64)>,
    /// |h|^2 per cooperator, unit-mean exponential.
    pub coop_gains: Vec<f64>,
    /// Shared-band interferer power gains (JT and PT-SS).
    pub interferer_gains: Vec<f64>,
    /// Per-stream interferer power gains for PT-OS; row i serves stream i.
    pub stream_interferer_gains: Vec<Vec<f64>>,
    /// Empty-cluster draws discarded before this realization materialized.
    pub redraws: u32,
}

/// Draw one realization. Conditioned mode places exactly K uniform points
/// in the origin cluster next to an independent PPP outside it;
/// unconditioned mode draws a single PPP over the window and splits it by
/// cluster membership, redrawing the (excluded) empty-cluster case.
pub fn draw_realization<R: Rng + ?Sized>(
    protocol: &SimProtocol,
    geom: &ClusterGeometry,
    rng: &mut R,
) -> Result<NetworkRealization> {
    protocol.validate(geom)?;
    let side = protocol.window_side;
    let half = side / 2.0;
    let mode = protocol.cluster_mode;
    let mean_points = geom.density() * side * side;
    let poisson = Poisson::new(mean_points)
        .map_err(|e| Error::Argument(format!("window PPP mean invalid: {e}")))?;

    let mut redraws = 0u32;
    let (cooperators, interferers) = loop {
        let n = poisson.sample(rng) as usize;
        let mut inside: Vec<[f64; 2]> = Vec::new();
        let mut outside: Vec<[f64; 2]> = Vec::with_capacity(n);
        for _ in 0..n {
            let x = rng.gen_range(-half..=half);
            let y = rng.gen_range(-half..=half);
            if in_cluster(mode, geom, x, y) {
                inside.push([x, y]);
            } else {
                outside.push([x, y]);
            }
        }
        match protocol.conditioned_k {
            Some(k) => {
                let coop = (0..k).map(|_| sample_in_cluster(mode, geom, rng)).collect();
                break (coop, outside);
            }
            None => {
                if inside.is_empty() {
                    redraws += 1;
                    continue;
                }
                break (inside, outside);
            }
        }
    };

    let k = cooperators.len();
    let coop_fading: Vec<(f64, f64)> = (0..k)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            (re / 2.0f64.sqrt(), im / 2.0f64.sqrt())
        })
        .collect();
    let coop_gains = coop_fading.iter().map(|h| h.0 * h.0 + h.1 * h.1).collect();
    let interferer_gains: Vec<f64> = (0..interferers.len()).map(|_| Exp1.sample(rng)).collect();
    let mut stream_interferer_gains = Vec::with_capacity(k);
    stream_interferer_gains.push(interferer_gains.clone());
    for _ in 1..k {
        stream_interferer_gains.push((0..interferers.len()).map(|_| Exp1.sample(rng)).collect());
    }

    Ok(NetworkRealization {
        cooperators,
        interferers,
        coop_fading,
        coop_gains,
        interferer_gains,
        stream_interferer_gains,
        redraws,
    })
}

fn norm(p: [f64; 2]) -> f64 {
    p[0].hypot(p[1])
}

fn interference_power(real: &NetworkRealization, gains: &[f64], alpha: f64) -> f64 {
    real.interferers
        .iter()
        .zip(gains)
        .map(|(p, g)| g * norm(*p).powf(-alpha))
        .sum()
}

/// Joint-transmission SIR: coherent amplitude sum over cooperators against
/// the shared-band interference. Transmit power is common to every SBS and
/// cancels. An empty interferer set yields +infinity, a success for any
/// finite target.
pub fn sir_jt(real: &NetworkRealization, model: &PathlossModel) -> f64 {
    let alpha = model.exponent();
    let (mut re, mut im) = (0.0, 0.0);
    for (p, h) in real.cooperators.iter().zip(&real.coop_fading) {
        let amp = norm(*p).powf(-alpha / 2.0);
        re += h.0 * amp;
        im += h.1 * amp;
    }
    let signal = re * re + im * im;
    let interference = interference_power(real, &real.interferer_gains, alpha);
    if interference > 0.0 {
        signal / interference
    } else {
        f64::INFINITY
    }
}

/// Outcome of the exact distance-ordered SIC chain.
#[derive(Debug, Clone)]
pub struct SicOutcome {
    pub success: bool,
    /// Per-stream SIRs in decoding order (nearest cooperator first).
    pub stream_sirs: Vec<f64>,
}

/// Exact PT-SS chain: decode cooperators nearest-first; at step k the
/// not-yet-decoded in-cluster streams plus all out-of-cluster SBSs
/// interfere, earlier streams are cancelled exactly. Success means every
/// stream clears `theta2`.
pub fn sic_chain_pt_ss(
    real: &NetworkRealization,
    model: &PathlossModel,
    theta2: f64,
) -> SicOutcome {
    let alpha = model.exponent();
    let out = interference_power(real, &real.interferer_gains, alpha);

    let mut order: Vec<(f64, f64)> = real
        .cooperators
        .iter()
        .zip(&real.coop_gains)
        .map(|(p, g)| (norm(*p), *g))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let powers: Vec<f64> = order.iter().map(|&(d, g)| g * d.powf(-alpha)).collect();

    let k = powers.len();
    let mut remaining: f64 = powers.iter().sum();
    let mut stream_sirs = Vec::with_capacity(k);
    let mut success = true;
    for &p in &powers {
        remaining -= p;
        let denom = remaining + out;
        let sir = if denom > 0.0 {
            p / denom
        } else {
            f64::INFINITY
        };
        if !(sir > theta2) {
            success = false;
        }
        stream_sirs.push(sir);
    }
    SicOutcome {
        success,
        stream_sirs,
    }
}

/// Per-stream PT-OS SIRs: stream i carries cooperator i's partition on its
/// own sub-band, so only out-of-cluster SBSs interfere, with the fading of
/// that sub-band. Delivery succeeds when the weakest stream clears theta1.
pub fn sir_pt_os(real: &NetworkRealization, model: &PathlossModel) -> Vec<f64> {
    let alpha = model.exponent();
    real.cooperators
        .iter()
        .zip(&real.coop_gains)
        .zip(&real.stream_interferer_gains)
        .map(|((p, g), gains)| {
            let interference = interference_power(real, gains, alpha);
            let signal = g * norm(*p).powf(-alpha);
            if interference > 0.0 {
                signal / interference
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

/// Per-realization scheme scalars: delivery at target theta succeeds exactly
/// when the scalar exceeds theta, so one batch serves any theta grid.
#[derive(Debug, Clone)]
pub struct SimBatch {
    pub jt_sir: Vec<f64>,
    pub ptss_min_sir: Vec<f64>,
    pub ptos_min_sir: Vec<f64>,
    pub redraws: u64,
}

impl SimBatch {
    pub fn n_realizations(&self) -> u64 {
        self.jt_sir.len() as u64
    }

    /// Fraction of raw draws discarded for having an empty cluster.
    pub fn redraw_fraction(&self) -> f64 {
        let attempts = self.redraws + self.n_realizations();
        self.redraws as f64 / attempts as f64
    }

    pub fn scalars(&self, scheme: Scheme) -> &[f64] {
        match scheme {
            Scheme::Jt => &self.jt_sir,
            Scheme::PtSs => &self.ptss_min_sir,
            Scheme::PtOs => &self.ptos_min_sir,
        }
    }

    /// Success frequency at `theta` with its binomial standard error.
    pub fn estimate(&self, scheme: Scheme, theta: f64) -> ScdpEstimate {
        let scalars = self.scalars(scheme);
        let n = scalars.len() as f64;
        let successes = scalars.iter().filter(|&&s| s > theta).count() as f64;
        let p = successes / n;
        ScdpEstimate {
            value: p,
            std_error: (p * (1.0 - p) / n).sqrt(),
            n_samples: scalars.len() as u64,
            method: Method::Simulation,
        }
    }
}

fn realization_rng(seed: u64, index: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Run the whole protocol and collect per-realization scheme scalars.
/// Realization `i` draws from stream `i` of the protocol seed, so the batch
/// is bit-identical for any shard or thread count.
pub fn simulate_batch(
    protocol: &SimProtocol,
    geom: &ClusterGeometry,
    model: &PathlossModel,
) -> Result<SimBatch> {
    protocol.validate(geom)?;
    let n = protocol.n_realizations;
    let rows: Vec<(f64, f64, f64, u32)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = realization_rng(protocol.seed, i);
            let real = draw_realization(protocol, geom, &mut rng)
                .expect("protocol validated before the batch");
            let jt = sir_jt(&real, model);
            let ptss = sic_chain_pt_ss(&real, model, 0.0)
                .stream_sirs
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            let ptos = sir_pt_os(&real, model)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            (jt, ptss, ptos, real.redraws)
        })
        .collect();

    let mut batch = SimBatch {
        jt_sir: Vec::with_capacity(rows.len()),
        ptss_min_sir: Vec::with_capacity(rows.len()),
        ptos_min_sir: Vec::with_capacity(rows.len()),
        redraws: 0,
    };
    for (jt, ptss, ptos, redraws) in rows {
        batch.jt_sir.push(jt);
        batch.ptss_min_sir.push(ptss);
        batch.ptos_min_sir.push(ptos);
        batch.redraws += redraws as u64;
    }
    Ok(batch)
}

/// Success frequency of `scheme` at `theta` over the protocol's
/// realizations.
pub fn estimate_scdp_sim(
    protocol: &SimProtocol,
    geom: &ClusterGeometry,
    model: &PathlossModel,
    scheme: Scheme,
    theta: f64,
) -> Result<ScdpEstimate> {
    Ok(simulate_batch(protocol, geom, model)?.estimate(scheme, theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gof;
    use rand::SeedableRng;

    fn setup() -> (ClusterGeometry, PathlossModel) {
        (
            ClusterGeometry::new(100.0, 1e-4).unwrap(),
            PathlossModel::new(4.0).unwrap(),
        )
    }

    fn protocol(n: u64, k: Option<u32>, seed: u64) -> SimProtocol {
        SimProtocol::new(1000.0, n, ClusterMode::Hexagon, k, seed).unwrap()
    }

    fn manual_single_link(r: f64, d: f64) -> NetworkRealization {
        NetworkRealization {
            cooperators: vec![[r, 0.0]],
            interferers: vec![[0.0, d]],
            coop_fading: vec![(1.0, 0.0)],
            coop_gains: vec![1.0],
            interferer_gains: vec![1.0],
            stream_interferer_gains: vec![vec![1.0]],
            redraws: 0,
        }
    }

    #[test]
    fn protocol_validation() {
        assert!(SimProtocol::new(1000.0, 0, ClusterMode::Disc, None, 1).is_err());
        assert!(SimProtocol::new(1000.0, 10, ClusterMode::Disc, Some(0), 1).is_err());
        let (geom, _) = setup();
        let tight = SimProtocol::new(300.0, 10, ClusterMode::Disc, None, 1).unwrap();
        assert!(tight.validate(&geom).is_err());
    }

    #[test]
    fn jt_sir_hand_computation() {
        let (_, model) = setup();
        let real = manual_single_link(50.0, 200.0);
        let expect = 50.0f64.powf(-4.0) / 200.0f64.powf(-4.0);
        assert!((sir_jt(&real, &model) - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn empty_interferer_set_gives_infinite_sir() {
        let (_, model) = setup();
        let mut real = manual_single_link(50.0, 200.0);
        real.interferers.clear();
        real.interferer_gains.clear();
        real.stream_interferer_gains = vec![vec![]];
        assert_eq!(sir_jt(&real, &model), f64::INFINITY);
        assert!(sic_chain_pt_ss(&real, &model, 1e9).success);
        assert_eq!(sir_pt_os(&real, &model)[0], f64::INFINITY);
    }

    #[test]
    fn conditioned_draws_have_exactly_k_cooperators_inside() {
        let (geom, _) = setup();
        for mode in [ClusterMode::Hexagon, ClusterMode::Disc] {
            let p = SimProtocol::new(1000.0, 1, mode, Some(3), 5).unwrap();
            for i in 0..200 {
                let mut rng = realization_rng(5, i);
                let real = draw_realization(&p, &geom, &mut rng).unwrap();
                assert_eq!(real.cooperators.len(), 3);
                assert_eq!(real.redraws, 0);
                for c in &real.cooperators {
                    assert!(in_cluster(mode, &geom, c[0], c[1]));
                }
                for q in &real.interferers {
                    assert!(!in_cluster(mode, &geom, q[0], q[1]));
                }
                assert_eq!(real.stream_interferer_gains.len(), 3);
                assert_eq!(real.stream_interferer_gains[0], real.interferer_gains);
            }
        }
    }

    #[test]
    fn unconditioned_cooperator_count_matches_poisson_mean() {
        let (geom, _) = setup();
        let p = protocol(1, None, 7);
        let n = 100_000u64;
        let mut total = 0u64;
        let mut zero_draws = 0u64;
        let mut finals = 0u64;
        for i in 0..n {
            let mut rng = realization_rng(7, i);
            let real = draw_realization(&p, &geom, &mut rng).unwrap();
            assert!(!real.cooperators.is_empty());
            total += real.cooperators.len() as u64;
            zero_draws += real.redraws as u64;
            finals += 1;
        }
        // conditional mean of Poisson given >= 1: mu / (1 - e^{-mu})
        let mu = geom.mean_cluster_size();
        let cond_mean = mu / (1.0 - (-mu).exp());
        let mean = total as f64 / n as f64;
        // conditional variance via second moment of the truncated law
        let var = (mu * mu + mu) / (1.0 - (-mu).exp()) - cond_mean * cond_mean;
        let sigma = (var / n as f64).sqrt();
        assert!(
            (mean - cond_mean).abs() < 3.0 * sigma,
            "mean {mean} vs conditional {cond_mean}"
        );
        // redraw fraction estimates the empty-cluster probability, about 3%
        let frac = zero_draws as f64 / (zero_draws + finals) as f64;
        let p0 = (-mu).exp();
        let sig = (p0 * (1.0 - p0) / (zero_draws + finals) as f64).sqrt();
        assert!((frac - p0).abs() < 3.0 * sig, "redraw fraction {frac}");
    }

    #[test]
    fn empirical_count_pmf_matches_poisson_chi_square() {
        // raw draws = final realizations plus one zero-count observation per
        // redraw; bin the tail so every expected count is comfortable
        let (geom, _) = setup();
        let p = protocol(1, None, 11);
        let n = 100_000u64;
        let mut counts = vec![0f64; 12]; // 0..=10, 11+ pooled
        let mut total_draws = 0f64;
        for i in 0..n {
            let mut rng = realization_rng(11, i);
            let real = draw_realization(&p, &geom, &mut rng).unwrap();
            counts[0] += real.redraws as f64;
            total_draws += real.redraws as f64 + 1.0;
            let k = real.cooperators.len().min(11);
            counts[k] += 1.0;
        }
        let mut expected = vec![0f64; 12];
        let mut head = 0.0;
        for (k, e) in expected.iter_mut().enumerate().take(11) {
            *e = geom.cluster_size_pmf(k as u32) * total_draws;
            head += *e;
        }
        expected[11] = total_draws - head;
        let p_value = gof::chi_square_p(&counts, &expected);
        assert!(p_value > 0.01, "chi-square p = {p_value}");
    }

    #[test]
    fn sic_chain_single_stream_is_plain_sir() {
        let (_, model) = setup();
        let real = manual_single_link(50.0, 200.0);
        let out = sic_chain_pt_ss(&real, &model, 1.0);
        let expect = 50.0f64.powf(-4.0) / 200.0f64.powf(-4.0);
        assert!((out.stream_sirs[0] - expect).abs() / expect < 1e-12);
        assert!(out.success);
    }

    #[test]
    fn zero_target_always_succeeds() {
        let (geom, model) = setup();
        let p = protocol(500, Some(3), 13);
        let batch = simulate_batch(&p, &geom, &model).unwrap();
        for scheme in [Scheme::Jt, Scheme::PtSs, Scheme::PtOs] {
            assert_eq!(batch.estimate(scheme, 0.0).value, 1.0, "{scheme}");
        }
    }

    #[test]
    fn single_cooperator_schemes_coincide_on_shared_draws() {
        // K = 1: PT-OS stream 0 reuses the shared-band interferer gains, so
        // JT, PT-SS, and PT-OS all see the same channel
        let (geom, model) = setup();
        let p = SimProtocol::new(1000.0, 1, ClusterMode::Hexagon, Some(1), 17).unwrap();
        for i in 0..200 {
            let mut rng = realization_rng(17, i);
            let real = draw_realization(&p, &geom, &mut rng).unwrap();
            let jt = sir_jt(&real, &model);
            let ss = sic_chain_pt_ss(&real, &model, 1.0).stream_sirs[0];
            let os = sir_pt_os(&real, &model)[0];
            assert_eq!(ss.to_bits(), os.to_bits());
            assert!((jt - ss).abs() <= 1e-12 * ss.abs());
        }
    }

    #[test]
    fn batch_bit_reproducible_across_thread_counts() {
        let (geom, model) = setup();
        let p = protocol(2000, Some(3), 19);
        let run = || simulate_batch(&p, &geom, &model).unwrap();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        let eight = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(one.redraws, eight.redraws);
        for (a, b) in one.jt_sir.iter().zip(&eight.jt_sir) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in one.ptss_min_sir.iter().zip(&eight.ptss_min_sir) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        let again = run();
        assert_eq!(again.jt_sir, one.jt_sir);
    }

    #[test]
    fn simulated_jt_tracks_analytic_estimate() {
        // light regression guard; the acceptance suite runs the full matrix
        let (geom, model) = setup();
        let p = SimProtocol::new(2000.0, 8000, ClusterMode::Hexagon, Some(3), 23).unwrap();
        let sim = estimate_scdp_sim(&p, &geom, &model, Scheme::Jt, 1.0).unwrap();
        let ana = crate::scdp::scdp_jt(
            &geom,
            &model,
            3,
            1.0,
            crate::scdp::McConfig::new(100_000, 23).unwrap(),
        )
        .unwrap();
        let sigma = (sim.std_error.powi(2) + ana.std_error.powi(2)).sqrt();
        assert!(
            (sim.value - ana.value).abs() < 4.0 * sigma,
            "sim {} vs analytic {} (sigma {sigma})",
            sim.value,
            ana.value
        );
    }

    #[test]
    fn pinned_simulation_regression_value() {
        // frozen first-run value of the deterministic protocol below; update
        // only when the realization stream layout deliberately changes
        let (geom, model) = setup();
        let p = SimProtocol::new(1000.0, 40_000, ClusterMode::Hexagon, Some(3), 42).unwrap();
        let est = estimate_scdp_sim(&p, &geom, &model, Scheme::Jt, 1.0).unwrap();
        assert!((est.value - V_JT_PINNED).abs() < 1e-9, "got {}", est.value);
        assert!(est.std_error > 0.0 && est.std_error < 0.005);
    }

    const V_JT_PINNED: f64 = 0.855575;

    #[test]
    fn hexagon_and_disc_modes_agree_closely() {
        let (geom, model) = setup();
        let hex = SimProtocol::new(2000.0, 40_000, ClusterMode::Hexagon, Some(3), 29).unwrap();
        let disc = SimProtocol::new(2000.0, 40_000, ClusterMode::Disc, Some(3), 31).unwrap();
        let bh = simulate_batch(&hex, &geom, &model).unwrap();
        let bd = simulate_batch(&disc, &geom, &model).unwrap();
        for scheme in [Scheme::Jt, Scheme::PtSs, Scheme::PtOs] {
            let t = match scheme {
                Scheme::PtSs => 2f64.powf(1.0 / 3.0) - 1.0,
                _ => 1.0,
            };
            let h = bh.estimate(scheme, t).value;
            let d = bd.estimate(scheme, t).value;
            assert!((h - d).abs() < 0.01, "{scheme}: hexagon {h} vs disc {d}");
        }
    }

    #[test]
    fn window_growth_leaves_jt_estimate_stable() {
        let (geom, model) = setup();
        let n = 400_000u64;
        let w1 = SimProtocol::new(1000.0, n, ClusterMode::Hexagon, Some(3), 37).unwrap();
        let w2 = SimProtocol::new(2000.0, n, ClusterMode::Hexagon, Some(3), 37).unwrap();
        let e1 = simulate_batch(&w1, &geom, &model)
            .unwrap()
            .estimate(Scheme::Jt, 1.0);
        let e2 = simulate_batch(&w2, &geom, &model)
            .unwrap()
            .estimate(Scheme::Jt, 1.0);
        assert!(
            (e1.value - e2.value).abs() < 0.005,
            "1000 m {} vs 2000 m {}",
            e1.value,
            e2.value
        );
    }

    #[test]
    fn mode_parsing() {
        assert_eq!(ClusterMode::parse("hexagon").unwrap(), ClusterMode::Hexagon);
        assert_eq!(ClusterMode::parse("Disc").unwrap(), ClusterMode::Disc);
        assert!(ClusterMode::parse("square").is_err());
    }

    #[test]
    fn realization_streams_are_independent_of_sharding_origin() {
        let (geom, _) = setup();
        let p = protocol(1, Some(2), 41);
        let mut a = realization_rng(41, 5);
        let mut b = realization_rng(41, 5);
        let ra = draw_realization(&p, &geom, &mut a).unwrap();
        let rb = draw_realization(&p, &geom, &mut b).unwrap();
        assert_eq!(ra.cooperators, rb.cooperators);
        assert_eq!(ra.interferer_gains, rb.interferer_gains);
        let mut c = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        c.set_stream(6);
        let rc = draw_realization(&p, &geom, &mut c).unwrap();
        assert_ne!(ra.cooperators, rc.cooperators);
    }
}
