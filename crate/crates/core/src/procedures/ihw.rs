//! Naive independent hypothesis weighting.
//!
//! Hypotheses are split into covariate quantile groups, a per-group weight
//! vector is searched over a grid (renormalized to the average-weight-1
//! budget), and the vector maximizing weighted-BH discoveries wins. The
//! uniform vector is always a candidate, so IHW can never discover fewer
//! hypotheses than plain BH.
//!
//! The search never materializes candidate weight vectors: discovery counts
//! come from a step-up fixed point over per-group sorted p-values, and only
//! the winning candidate is re-run through [`weighted_bh`]. Candidates are
//! scored independently, so the grid scan is data-parallel.

use crate::data::{DiscoveryResult, HypothesisSet, MethodExtras};
use crate::error::{Error, Result};
use crate::par;
use crate::procedures::weighted_bh;

/// Configuration for [`ihw_naive`].
#[derive(Debug, Clone)]
pub struct IhwConfig {
    /// Number of covariate quantile groups.
    pub n_groups: usize,
    /// Spacing of the per-group weight grid.
    pub weight_grid_step: f64,
    /// Largest grid weight before renormalization.
    pub max_weight: f64,
    /// Nominal FDR level.
    pub alpha: f64,
}

impl Default for IhwConfig {
    fn default() -> Self {
        IhwConfig {
            n_groups: 5,
            weight_grid_step: 0.25,
            max_weight: 5.0,
            alpha: 0.05,
        }
    }
}

// Grid sizes beyond this are a configuration mistake: the scan would run for
// hours even in parallel.
const MAX_CANDIDATES: u64 = 200_000_000;

impl IhwConfig {
    fn validate(&self, m: usize) -> Result<u64> {
        if self.n_groups == 0 {
            return Err(Error::Validation("n_groups must be >= 1".into()));
        }
        if self.n_groups > m {
            return Err(Error::Validation(format!(
                "n_groups = {} exceeds m = {m}",
                self.n_groups
            )));
        }
        if !(self.weight_grid_step > 0.0) || !(self.max_weight > 0.0) {
            return Err(Error::Validation(
                "weight grid step and max weight must be positive".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Validation(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        let ratio = self.max_weight / self.weight_grid_step;
        let levels = ratio.round();
        if (ratio - levels).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "weight grid step {} does not divide max weight {}",
                self.weight_grid_step, self.max_weight
            )));
        }
        Ok(levels as u64)
    }
}

struct Groups {
    /// Group index per hypothesis, in input order.
    assignment: Vec<usize>,
    /// Covariate values at the bin boundaries (before empty-bin merging).
    edges: Vec<f64>,
    /// Sorted p-values per effective group.
    sorted_p: Vec<Vec<f64>>,
}

/// Quantile binning with ties sent to the lower bin; empty bins collapse into
/// their neighbors by dropping them, so a constant covariate yields one group.
fn build_groups(p: &[f64], covariate: &[f64], n_groups: usize) -> Groups {
    let m = covariate.len();
    let mut sorted_cov = covariate.to_vec();
    sorted_cov.sort_by(f64::total_cmp);
    let edges: Vec<f64> = (1..n_groups)
        .map(|g| sorted_cov[g * m / n_groups - 1])
        .collect();

    let raw_assignment: Vec<usize> = covariate
        .iter()
        .map(|&x| edges.iter().filter(|&&e| e < x).count())
        .collect();

    // Relabel non-empty bins consecutively.
    let mut counts = vec![0usize; n_groups];
    for &g in &raw_assignment {
        counts[g] += 1;
    }
    let mut relabel = vec![usize::MAX; n_groups];
    let mut next = 0;
    for (g, &c) in counts.iter().enumerate() {
        if c > 0 {
            relabel[g] = next;
            next += 1;
        }
    }
    let assignment: Vec<usize> = raw_assignment.iter().map(|&g| relabel[g]).collect();

    let mut sorted_p = vec![Vec::new(); next];
    for (&g, &pi) in assignment.iter().zip(p) {
        sorted_p[g].push(pi);
    }
    for group in &mut sorted_p {
        group.sort_by(f64::total_cmp);
    }
    Groups {
        assignment,
        edges,
        sorted_p,
    }
}

/// Weighted-BH discovery count via the step-up fixed point
/// `k <- #{ q_i <= alpha * k / m }`, starting from `k = m`.
///
/// Counting uses the same `p / w` expression as [`weighted_bh`], so the two
/// agree exactly.
fn count_discoveries(groups: &[Vec<f64>], weights: &[f64], alpha: f64, m: usize) -> usize {
    let mf = m as f64;
    let mut k = m;
    loop {
        if k == 0 {
            return 0;
        }
        let tau = alpha * k as f64 / mf;
        let mut n = 0usize;
        for (g, w) in groups.iter().zip(weights) {
            if *w > 0.0 {
                n += g.partition_point(|&p| p / *w <= tau);
            }
        }
        if n >= k {
            return k;
        }
        k = n;
    }
}

#[derive(Clone)]
struct Candidate {
    discoveries: usize,
    dist_to_uniform: f64,
    /// Mixed-radix grid index; `u64::MAX` is the explicit uniform candidate.
    code: u64,
}

struct Scratch {
    digits: Vec<u64>,
    weights: Vec<f64>,
    best: Option<Candidate>,
}

/// Decode a grid index into renormalized weights. Returns false for codes
/// that are skipped (all-zero, or a scalar multiple of a smaller code).
fn decode(code: u64, levels: u64, group_sizes: &[usize], m: usize, digits: &mut [u64], weights: &mut [f64]) -> bool {
    if code == u64::MAX {
        weights.iter_mut().for_each(|w| *w = 1.0);
        return true;
    }
    let base = levels + 1;
    let mut rest = code;
    for d in digits.iter_mut() {
        *d = rest % base;
        rest /= base;
    }
    // Proportional vectors renormalize identically; keep only the primitive
    // representative (gcd 1).
    let mut g = 0u64;
    for &d in digits.iter() {
        g = gcd(g, d);
    }
    if g != 1 {
        return false;
    }
    // Renormalize to the budget sum(n_g/m * w_g) = 1. The grid step cancels:
    // w_g = digit_g * m / sum(n_g * digit_g).
    let denom: u64 = group_sizes
        .iter()
        .zip(digits.iter())
        .map(|(&n, &d)| n as u64 * d)
        .sum();
    let mf = m as f64;
    let denom_f = denom as f64;
    for (w, &d) in weights.iter_mut().zip(digits.iter()) {
        *w = d as f64 * mf / denom_f;
    }
    true
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn dist_to_uniform(weights: &[f64]) -> f64 {
    weights.iter().map(|w| (w - 1.0) * (w - 1.0)).sum()
}

/// Total order on candidates: more discoveries first, then closest to
/// uniform, then lexicographically smallest weights.
fn candidate_better(
    a: &Candidate,
    b: &Candidate,
    levels: u64,
    group_sizes: &[usize],
    m: usize,
) -> bool {
    if a.discoveries != b.discoveries {
        return a.discoveries > b.discoveries;
    }
    if a.dist_to_uniform != b.dist_to_uniform {
        return a.dist_to_uniform < b.dist_to_uniform;
    }
    let g = group_sizes.len();
    let mut da = vec![0u64; g];
    let mut db = vec![0u64; g];
    let mut wa = vec![0.0; g];
    let mut wb = vec![0.0; g];
    decode(a.code, levels, group_sizes, m, &mut da, &mut wa);
    decode(b.code, levels, group_sizes, m, &mut db, &mut wb);
    for (x, y) in wa.iter().zip(&wb) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// Naive IHW: quantile-group the covariate, grid-search group weights under
/// the budget, and return the weighted-BH result with the most discoveries.
pub fn ihw_naive(
    h: &HypothesisSet,
    covariate: &[f64],
    cfg: &IhwConfig,
) -> Result<DiscoveryResult> {
    let m = h.len();
    if covariate.len() != m {
        return Err(Error::Dimension(format!(
            "covariate length {} != m = {}",
            covariate.len(),
            m
        )));
    }
    if m == 0 {
        return Ok(DiscoveryResult {
            rejected: vec![],
            adjusted: vec![],
            alpha: cfg.alpha,
            method_tag: "ihw".into(),
            extras: MethodExtras::Ihw {
                group_edges: vec![],
                weights: vec![],
                per_group_rejections: vec![],
                n_groups: 0,
            },
        });
    }
    if let Some(bad) = covariate.iter().position(|c| !c.is_finite()) {
        return Err(Error::Validation(format!(
            "covariate at index {bad} is not finite"
        )));
    }
    let levels = cfg.validate(m)?;

    let groups = build_groups(h.p_values(), covariate, cfg.n_groups);
    let n_eff = groups.sorted_p.len();
    let group_sizes: Vec<usize> = groups.sorted_p.iter().map(Vec::len).collect();

    let base = levels + 1;
    let total = base
        .checked_pow(n_eff as u32)
        .filter(|&t| t <= MAX_CANDIDATES)
        .ok_or_else(|| {
            Error::Validation(format!(
                "weight grid has more than {MAX_CANDIDATES} candidates \
                 ({base}^{n_eff}); use a coarser step or fewer groups"
            ))
        })?;

    let alpha = cfg.alpha;
    let sorted_p = &groups.sorted_p;
    let sizes = &group_sizes;

    let evaluate = |scratch: &mut Scratch, code: u64| {
        let (digits, weights) = (&mut scratch.digits, &mut scratch.weights);
        if !decode(code, levels, sizes, m, digits, weights) {
            return;
        }
        let cand = Candidate {
            discoveries: count_discoveries(sorted_p, weights, alpha, m),
            dist_to_uniform: dist_to_uniform(weights),
            code,
        };
        let replace = match &scratch.best {
            Some(best) => candidate_better(&cand, best, levels, sizes, m),
            None => true,
        };
        if replace {
            scratch.best = Some(cand);
        }
    };

    // The uniform candidate is always in the running, grid or no grid.
    let folded = par::fold_reduce(
        total as usize,
        || Scratch {
            digits: vec![0; n_eff],
            weights: vec![0.0; n_eff],
            best: None,
        },
        |mut scratch, idx| {
            evaluate(&mut scratch, idx as u64);
            scratch
        },
        |mut a, b| {
            if let Some(cb) = b.best {
                let replace = match &a.best {
                    Some(ca) => candidate_better(&cb, ca, levels, sizes, m),
                    None => true,
                };
                if replace {
                    a.best = Some(cb);
                }
            }
            a
        },
    );
    let mut scratch = folded;
    evaluate(&mut scratch, u64::MAX);
    let winner = scratch.best.expect("uniform candidate always evaluates");

    let mut digits = vec![0u64; n_eff];
    let mut group_weights = vec![0.0; n_eff];
    decode(winner.code, levels, sizes, m, &mut digits, &mut group_weights);

    let per_hyp: Vec<f64> = groups
        .assignment
        .iter()
        .map(|&g| group_weights[g])
        .collect();
    let base_result = weighted_bh(h, &per_hyp, alpha)?;
    debug_assert_eq!(base_result.discoveries(), winner.discoveries);

    let mut per_group_rejections = vec![0usize; n_eff];
    for (&g, &r) in groups.assignment.iter().zip(&base_result.rejected) {
        if r {
            per_group_rejections[g] += 1;
        }
    }

    Ok(DiscoveryResult {
        rejected: base_result.rejected,
        adjusted: base_result.adjusted,
        alpha,
        method_tag: "ihw".into(),
        extras: MethodExtras::Ihw {
            group_edges: groups.edges,
            weights: group_weights,
            per_group_rejections,
            n_groups: n_eff,
        },
    })
}
