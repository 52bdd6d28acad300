//! Integer helpers shared by the parameter formulas.

/// `⌈log₂ x⌉`, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// `⌈log₂ n⌉` clamped below by 1, the "log n" used inside constants.
pub fn log_n(n: usize) -> u64 {
    ceil_log2(n as u64).max(1) as u64
}

pub fn ceil_div(a: u64, b: u64) -> u64 {
    debug_assert!(b > 0);
    a.div_ceil(b)
}

/// Ceiling of a real quantity, tolerant to floating error just above an integer.
pub fn ceil_f64(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r.max(0.0) as u64
    } else {
        x.ceil().max(0.0) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logs() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(256), 8);
        assert_eq!(ceil_log2(257), 9);
        assert_eq!(log_n(1), 1);
        assert_eq!(log_n(4096), 12);
    }

    #[test]
    fn ceilings() {
        assert_eq!(ceil_f64(16f64.powf(0.25)), 2);
        assert_eq!(ceil_f64(15.0 / 0.5), 30);
        assert_eq!(ceil_f64(2.000001), 3);
        assert_eq!(ceil_f64(0.2), 1);
        assert_eq!(ceil_div(16, 3), 6);
    }
}
