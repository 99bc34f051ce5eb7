//! Content popularity and the combined MPC/LCD cache placement model.
//!
//! Requests follow a Zipf law: the m-th most popular of N files is requested
//! with probability p_m = m^{-gamma} / sum_{n=1..N} n^{-gamma}. Each SBS in a
//! cluster of K devotes a fraction rho of its M-file cache to the most
//! popular content (MPC, replicated at every SBS); the remainder holds
//! disjoint partitions of the next files (LCD), so ranks
//! 1..floor(rho*M) are MPC, the next K*(M - floor(rho*M)) ranks are LCD, and
//! everything beyond is a cache miss served over the backhaul.

use crate::error::{Error, Result};

/// Zipf request popularity over a finite library.
///
/// Prefix sums of the unnormalized weights are precomputed once so that any
/// range probability is an O(1) lookup; optimizer grid searches query
/// thousands of splits against the same popularity.
#[derive(Debug, Clone)]
pub struct ZipfPopularity {
    library_size: u64,
    shape: f64,
    /// prefix[j] = sum_{n=1..j} n^{-gamma}; prefix[0] = 0.
    prefix: Vec<f64>,
}

impl ZipfPopularity {
    pub fn new(library_size: u64, shape: f64) -> Result<Self> {
        if library_size < 1 {
            return Err(Error::Domain("library size must be >= 1".into()));
        }
        if !(shape >= 0.0) {
            return Err(Error::Domain("Zipf shape must be >= 0".into()));
        }
        let mut prefix = Vec::with_capacity(library_size as usize + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for n in 1..=library_size {
            acc += (n as f64).powf(-shape);
            prefix.push(acc);
        }
        Ok(Self {
            library_size,
            shape,
            prefix,
        })
    }

    pub fn library_size(&self) -> u64 {
        self.library_size
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    /// Normalizer Z = sum_{n=1..N} n^{-gamma}.
    pub fn normalizer(&self) -> f64 {
        self.prefix[self.library_size as usize]
    }

    /// Request probability of the file with popularity rank `m` (1-based):
    /// p_m = (m^gamma * Z)^{-1}.
    pub fn pm(&self, rank: u64) -> Result<f64> {
        if rank < 1 || rank > self.library_size {
            return Err(Error::Domain(format!(
                "rank {rank} out of range 1..={}",
                self.library_size
            )));
        }
        Ok((rank as f64).powf(-self.shape) / self.normalizer())
    }

    /// Probability that a request falls in the top `count` ranks; `count` is
    /// clamped to the library size.
    pub fn prefix_prob(&self, count: u64) -> f64 {
        let c = count.min(self.library_size) as usize;
        self.prefix[c] / self.normalizer()
    }
}

/// Split of per-SBS cache space between MPC and LCD ranges for a cluster of
/// K SBSs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CachePlan {
    rho: f64,
    capacity: u64,
    cluster_size: u32,
}

/// Guard against representation error in rho*M when rho*M is mathematically
/// an integer: ties resolve to the integer itself.
const FLOOR_EPS: f64 = 1e-9;

impl CachePlan {
    pub fn new(rho: f64, capacity: u64, cluster_size: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::Domain(format!("rho {rho} outside [0, 1]")));
        }
        if cluster_size < 1 {
            return Err(Error::Domain("cluster size must be >= 1".into()));
        }
        Ok(Self {
            rho,
            capacity,
            cluster_size,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn cluster_size(&self) -> u32 {
        self.cluster_size
    }

    /// Number of ranks cached at every SBS: floor(rho * M).
    pub fn mpc_count(&self) -> u64 {
        ((self.rho * self.capacity as f64 + FLOOR_EPS).floor() as u64).min(self.capacity)
    }

    /// Number of distinct ranks cached as disjoint partitions:
    /// K * (M - floor(rho * M)).
    pub fn lcd_count(&self) -> u64 {
        self.cluster_size as u64 * (self.capacity - self.mpc_count())
    }

    /// Total distinct ranks cached in the cluster.
    pub fn cached_total(&self) -> u64 {
        self.mpc_count() + self.lcd_count()
    }
}

/// Range probabilities of a request: MPC hit, LCD hit, cache miss.
/// The three always sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeProbs {
    pub mpc: f64,
    pub lcd: f64,
    pub miss: f64,
}

/// Cache hit probability: the request falls anywhere in the cached ranks.
/// `cached_total` is clamped to the library size.
pub fn cache_hit_prob(pop: &ZipfPopularity, plan: &CachePlan) -> f64 {
    pop.prefix_prob(plan.cached_total())
}

/// Exact range probabilities from the Zipf prefix sums.
pub fn cache_range_probs(pop: &ZipfPopularity, plan: &CachePlan) -> RangeProbs {
    let mpc = pop.prefix_prob(plan.mpc_count());
    let lcd = pop.prefix_prob(plan.cached_total()) - mpc;
    RangeProbs {
        mpc,
        lcd,
        miss: 1.0 - mpc - lcd,
    }
}

/// Continuous power-law approximation of the range probabilities, valid for
/// gamma < 1 and M << N:
///
/// - MPC:  (M/N)^{1-gamma} * rho^{1-gamma}
/// - LCD:  (M/N)^{1-gamma} * ([rho(1-K)+K]^{1-gamma} - rho^{1-gamma})
/// - miss: 1 - (M/N)^{1-gamma} * [rho(1-K)+K]^{1-gamma}
///
/// Returns an error for gamma >= 1 where the power-law prefix form does not
/// apply; logs a warning when K*M exceeds the library size.
pub fn approx_range_probs(pop: &ZipfPopularity, plan: &CachePlan) -> Result<RangeProbs> {
    let gamma = pop.shape();
    if gamma >= 1.0 {
        return Err(Error::ApproxDomain(format!(
            "power-law range approximation requires gamma < 1, got {gamma}"
        )));
    }
    if plan.cluster_size() as u64 * plan.capacity() > pop.library_size() {
        log::warn!(
            "K*M = {} exceeds library size {}; approximation degrades",
            plan.cluster_size() as u64 * plan.capacity(),
            pop.library_size()
        );
    }
    let e = 1.0 - gamma;
    let scale = (plan.capacity() as f64 / pop.library_size() as f64).powf(e);
    let rho = plan.rho();
    let k = plan.cluster_size() as f64;
    let mpc = scale * rho.powf(e);
    let bracket = (rho * (1.0 - k) + k).powf(e);
    Ok(RangeProbs {
        mpc,
        lcd: scale * (bracket - rho.powf(e)),
        miss: 1.0 - scale * bracket,
    })
}
