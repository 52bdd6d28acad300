//! Arithmetic modulo the Mersenne prime `2^61 - 1`.

/// The field modulus.
pub const P: u64 = (1 << 61) - 1;

#[inline]
pub fn reduce(x: u128) -> u64 {
    let lo = (x as u64) & P;
    let hi = (x >> 61) as u64;
    let mut s = lo + (hi & P) + (hi >> 61);
    while s >= P {
        s -= P;
    }
    s
}

#[inline]
pub fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

#[inline]
pub fn mul(a: u64, b: u64) -> u64 {
    reduce(a as u128 * b as u128)
}

pub fn pow(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    base %= P;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        exp >>= 1;
    }
    acc
}

/// Embeds a signed integer in the field.
#[inline]
pub fn from_i64(x: i64) -> u64 {
    if x >= 0 {
        (x as u64) % P
    } else {
        sub(0, x.unsigned_abs() % P)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_u128_reference() {
        let vals = [0u64, 1, 2, 12345, P - 1, P - 2, 1 << 60, (1 << 61) - 3, 987_654_321_987];
        for &a in &vals {
            for &b in &vals {
                let a = a % P;
                let b = b % P;
                assert_eq!(mul(a, b) as u128, (a as u128 * b as u128) % P as u128);
                assert_eq!(add(a, b) as u128, (a as u128 + b as u128) % P as u128);
                assert_eq!(add(sub(a, b), b), a);
            }
        }
    }

    #[test]
    fn fermat() {
        for a in [2u64, 3, 10, 1 << 40, P - 1] {
            assert_eq!(pow(a, P - 1), 1);
        }
        assert_eq!(pow(3, 0), 1);
        assert_eq!(from_i64(-1), P - 1);
        assert_eq!(add(from_i64(-7), 7), 0);
    }
}
