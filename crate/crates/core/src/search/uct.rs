use super::SearchConfig;

/// `w/(n·σ^κ) + c·√(ln N / (n·σ^κ))`, with σ fixed to 1 unless `prioritized`.
///
/// `parent_visits` is real-valued so the formula can be evaluated at arbitrary points.
pub fn uct(w: f64, n: u64, parent_visits: f64, sigma: u32, config: &SearchConfig, prioritized: bool) -> f64 {
    debug_assert!(n >= 1 && parent_visits >= 1.0 && sigma >= 1);
    let penalty = if prioritized {
        f64::from(sigma).powf(config.kappa)
    } else {
        1.0
    };
    let denom = n as f64 * penalty;
    w / denom + config.c * (parent_visits.ln() / denom).sqrt()
}
