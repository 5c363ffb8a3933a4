//! Guard-crossing localization inside one micro step.

/// Result of locating a guard crossing within a micro step of length `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Offset from the micro step start at which the guard first holds.
    pub delta: f64,
    /// Number of guard evaluations spent.
    pub evaluations: usize,
}

/// Locates the first offset in `(0, h]` where `triggered(g(delta))` holds.
///
/// `g0` is the guard at offset 0 (not triggered) and `gh` the guard at `h`
/// (triggered). Each evaluation of `g` re-integrates the truncated step, so
/// the bracket is refined by linear interpolation of the guard on the
/// re-truncated step (Illinois variant of regula falsi). The returned offset
/// always lies on the triggered side.
pub fn locate_crossing<G, T>(g0: f64, gh: f64, h: f64, triggered: T, mut g: G) -> Crossing
where
    G: FnMut(f64) -> f64,
    T: Fn(f64) -> bool,
{
    let (mut lo, mut hi) = (0.0, h);
    let (mut g_lo, mut g_hi) = (g0, gh);
    let tol = 1e-12 * h;
    let mut side = 0i8;
    let mut evaluations = 0;
    while hi - lo > tol && evaluations < 200 {
        let denom = g_hi - g_lo;
        let mut x = if denom != 0.0 { lo - g_lo * (hi - lo) / denom } else { 0.5 * (lo + hi) };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let gx = g(x);
        evaluations += 1;
        if triggered(gx) {
            hi = x;
            g_hi = gx;
            if side == 1 {
                g_lo *= 0.5;
            }
            side = 1;
        } else {
            lo = x;
            g_lo = gx;
            if side == -1 {
                g_hi *= 0.5;
            }
            side = -1;
        }
        if gx == 0.0 && hi == x {
            break;
        }
    }
    Crossing { delta: hi, evaluations }
}
