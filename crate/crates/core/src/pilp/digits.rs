//! Base-`t` digit vectors. A digit vector is coordinate-major: entries
//! `i*r .. i*r + r` hold the digits of coordinate `i`, least significant
//! first.

use crate::error::{Error, Result};

fn check_base(t: i128, r: u32) -> Result<()> {
    if t < 2 {
        return Err(Error::invalid(format!("digit base must be at least 2, got {t}")));
    }
    if r == 0 {
        return Err(Error::invalid("digit count r must be positive"));
    }
    Ok(())
}

/// `t^r`, or an overflow error.
pub fn power(t: i128, r: u32) -> Result<i128> {
    t.checked_pow(r).ok_or(Error::Overflow("t^r"))
}

pub fn digit_decode(y: &[i128], t: i128, r: u32) -> Result<Vec<i128>> {
    check_base(t, r)?;
    let r = r as usize;
    if !y.len().is_multiple_of(r) {
        return Err(Error::invalid(format!(
            "digit vector length {} is not a multiple of r = {r}",
            y.len()
        )));
    }
    if let Some((index, &digit)) = y.iter().enumerate().find(|(_, &d)| d < 0 || d >= t) {
        return Err(Error::DigitRange { index, digit, base: t });
    }
    y.chunks(r)
        .map(|digits| {
            digits.iter().rev().try_fold(0i128, |acc, &d| {
                acc.checked_mul(t)
                    .and_then(|v| v.checked_add(d))
                    .ok_or(Error::Overflow("digit decode"))
            })
        })
        .collect()
}

pub fn digit_encode(x: &[i128], t: i128, r: u32) -> Result<Vec<i128>> {
    check_base(t, r)?;
    let limit = power(t, r)?;
    let mut out = Vec::with_capacity(x.len() * r as usize);
    for (index, &value) in x.iter().enumerate() {
        if value < 0 || value >= limit {
            return Err(Error::OutOfRange {
                index,
                value,
                base: t,
                digits: r,
            });
        }
        let mut v = value;
        for _ in 0..r {
            out.push(v % t);
            v /= t;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(digit_decode(&[1, 2], 3, 2).unwrap(), vec![7]);
        assert_eq!(digit_decode(&[0, 0, 0, 0], 9, 2).unwrap(), vec![0, 0]);
        assert_eq!(digit_decode(&[4, 4, 4, 4, 4, 4], 5, 3).unwrap(), vec![124, 124]);
        assert_eq!(digit_encode(&[7], 3, 2).unwrap(), vec![1, 2]);
        assert!(matches!(digit_encode(&[9], 3, 2), Err(Error::OutOfRange { .. })));
        assert!(matches!(digit_encode(&[-1], 3, 2), Err(Error::OutOfRange { .. })));
        assert!(matches!(
            digit_decode(&[0, 3], 3, 2),
            Err(Error::DigitRange { index: 1, digit: 3, base: 3 })
        ));
        assert!(digit_decode(&[1, 2, 3], 5, 2).is_err());
        assert!(digit_encode(&[1], 1, 2).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(t in 2i128..=40, r in 1u32..=5, seeds in prop::collection::vec(any::<u64>(), 1..6)) {
            let limit = t.pow(r);
            let x: Vec<i128> = seeds.iter().map(|s| (*s as i128) % limit).collect();
            let y = digit_encode(&x, t, r).unwrap();
            prop_assert_eq!(y.len(), x.len() * r as usize);
            prop_assert_eq!(digit_decode(&y, t, r).unwrap(), x);
        }

        #[test]
        fn decode_then_encode(t in 2i128..=12, r in 1u32..=4, raw in prop::collection::vec(any::<u32>(), 1..13)) {
            let r_us = r as usize;
            let len = raw.len() / r_us * r_us;
            prop_assume!(len > 0);
            let y: Vec<i128> = raw[..len].iter().map(|d| *d as i128 % t).collect();
            let x = digit_decode(&y, t, r).unwrap();
            prop_assert_eq!(digit_encode(&x, t, r).unwrap(), y);
        }
    }
}
