//! Fractional-increase bookkeeping and trace comparisons.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

/// `(new - old) / |old|`. With `old == 0` any positive step counts as an
/// infinite increase and anything else as none.
pub fn fractional_increase(old: f64, new: f64) -> f64 {
    if old == 0.0 {
        if new > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        (new - old) / old.abs()
    }
}

/// True once the fractional increase drops to `eps` or below.
pub fn converged(old: f64, new: f64, eps: f64) -> bool {
    fractional_increase(old, new) <= eps
}

/// Pads a trace to `len` entries by repeating its last value.
pub fn pad_trace(trace: &[f64], len: usize) -> Vec<f64> {
    let mut out: Vec<f64> = trace.iter().copied().take(len).collect();
    let last = out.last().copied().unwrap_or(0.0);
    out.resize(len, last);
    out
}

/// Element-wise mean of traces padded to a common length.
pub fn mean_trace(traces: &[Vec<f64>]) -> Vec<f64> {
    let len = traces.iter().map(Vec::len).max().unwrap_or(0);
    let mut acc = alloc::vec![0.0; len];
    for t in traces {
        for (a, v) in acc.iter_mut().zip(pad_trace(t, len)) {
            *a += v;
        }
    }
    let n = traces.len().max(1) as f64;
    acc.iter().map(|a| a / n).collect()
}

/// `Delta^{Trace}`: final value over initial value of a monotone trace,
/// minus one. Zero when the trace is empty or starts at zero.
pub fn delta_trace(trace: &[f64]) -> f64 {
    match (trace.first(), trace.last()) {
        (Some(&a), Some(&b)) if a > 0.0 => b / a - 1.0,
        _ => 0.0,
    }
}

/// `Delta^{Alt}`: relative gain of the optimized value over an alternative,
/// `(opt - alt) / alt`, or `None` when the alternative is not positive.
pub fn delta_alt(opt: f64, alt: f64) -> Option<f64> {
    (alt > 0.0).then(|| (opt - alt) / alt)
}

/// Sample mean and standard error.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
