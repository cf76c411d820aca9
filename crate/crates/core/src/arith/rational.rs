use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::ArithError;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Binomial coefficient; zero whenever `k` is out of range or `n` is negative.
pub fn binomial(n: i64, k: i64) -> Rational {
    if n < 0 || k < 0 || k > n {
        return Rational::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let t = s.trim();
    let bad = || ArithError::Parse(s.to_string());
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Largest absolute value among numerator and denominator.
pub fn height(r: &Rational) -> BigInt {
    let n = r.numer().abs();
    let d = r.denom().clone();
    if n > d {
        n
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), int(10));
        assert_eq!(binomial(3, 5), int(0));
        assert_eq!(binomial(4, 1), int(4));
        assert_eq!(binomial(7, 0), int(1));
        assert_eq!(binomial(-1, 0), int(0));
        assert_eq!(binomial(4, -1), int(0));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/4").unwrap(), frac(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational(" 0/5 ").unwrap(), int(0));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
        assert_eq!(format_rational(&frac(-3, 6)), "-1/2");
        assert_eq!(format_rational(&int(4)), "4");
    }

    #[test]
    fn canonical_zero() {
        let z = frac(0, -9);
        assert_eq!(z.numer(), &BigInt::zero());
        assert_eq!(z.denom(), &BigInt::one());
    }

    proptest::proptest! {
        #[test]
        fn pascal(n in 1i64..=20, k in 1i64..20) {
            proptest::prop_assume!(k < n);
            proptest::prop_assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
        }

        #[test]
        fn parse_roundtrip(p in -1000i64..1000, q in 1i64..1000) {
            let r = frac(p, q);
            proptest::prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }
}
