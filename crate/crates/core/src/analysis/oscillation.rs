//! Oscillation growth estimate from a sampled signal.

/// Values of the strict local extrema of `samples`.
pub fn extrema(samples: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut last_slope = 0.0f64;
    for w in samples.windows(2) {
        let d = w[1] - w[0];
        if d == 0.0 {
            continue;
        }
        if last_slope != 0.0 && d.signum() != last_slope.signum() {
            out.push(w[0]);
        }
        last_slope = d;
    }
    out
}

/// Mean growth factor of the peak-to-peak amplitude over the last 10
/// extrema, after discarding the first 20% of the samples.
///
/// Returns `None` when fewer than 3 extrema remain (no oscillation).
pub fn envelope_ratio(samples: &[f64]) -> Option<f64> {
    let skip = samples.len() / 5;
    let ext = extrema(&samples[skip..]);
    if ext.len() < 3 {
        return None;
    }
    let tail = &ext[ext.len().saturating_sub(10)..];
    let amps: Vec<f64> = tail.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let first = amps[0];
    let last = amps[amps.len() - 1];
    if first == 0.0 {
        return None;
    }
    Some((last / first).powf(1.0 / (amps.len() - 1).max(1) as f64))
}
