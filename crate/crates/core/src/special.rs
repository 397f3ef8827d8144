//! Hypergeometric series, q-numbers and Pochhammer symbols.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const REL_TOL: f64 = 1e-15;
const MAX_TERMS: usize = 100_000;

/// Which generalized hypergeometric series to sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Series {
    /// Kummer's confluent function `1F1(a; c; x)`.
    OneF1 { a: C64, c: C64 },
    /// Gauss function `2F1(a, b; c; x)`.
    TwoF1 { a: C64, b: C64, c: C64 },
}

/// Returns `Some(m)` when `z` is the nonpositive integer `-m`.
fn nonpositive_integer(z: C64) -> Option<u64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 && z.re > -1e15 {
        Some((-z.re) as u64)
    } else {
        None
    }
}

/// Sums a hypergeometric series by its term ratio.
///
/// Terminating series (an upper parameter equal to `-m`) are summed exactly
/// over their `m + 1` terms. Otherwise terms are added until two consecutive
/// terms fall below `1e-15` of the partial sum, with a hard cap of `1e5` terms.
pub fn hyp_series(series: Series, x: C64) -> Result<C64> {
    let (uppers, c): (Vec<C64>, C64) = match series {
        Series::OneF1 { a, c } => (vec![a], c),
        Series::TwoF1 { a, b, c } => (vec![a, b], c),
    };
    let terminates_at = uppers.iter().filter_map(|&p| nonpositive_integer(p)).min();
    if let Some(p) = nonpositive_integer(c) {
        // (c)_j vanishes from j = p + 1 on
        if terminates_at.is_none_or(|m| m > p) {
            return Err(Error::PoleAtC(c.re));
        }
    }
    if let (Series::TwoF1 { .. }, None) = (series, terminates_at) {
        if x.norm() >= 1.0 {
            return Err(Error::DivergentSeries { terms: 0 });
        }
    }

    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut small_in_a_row = 0;
    for j in 0..MAX_TERMS {
        if let Some(m) = terminates_at {
            if j as u64 >= m {
                return Ok(sum);
            }
        }
        let jf = j as f64;
        let mut num = x;
        for &p in &uppers {
            num *= p + jf;
        }
        term = term * num / ((c + jf) * (jf + 1.0));
        sum += term;
        if terminates_at.is_none() {
            if term.norm() <= REL_TOL * sum.norm() {
                small_in_a_row += 1;
                if small_in_a_row == 2 {
                    return Ok(sum);
                }
            } else {
                small_in_a_row = 0;
            }
        }
    }
    Err(Error::DivergentSeries { terms: MAX_TERMS })
}

/// `1F1(a; c; x)`.
pub fn hyp1f1(a: C64, c: C64, x: C64) -> Result<C64> {
    hyp_series(Series::OneF1 { a, c }, x)
}

/// `2F1(a, b; c; x)`.
pub fn hyp2f1(a: C64, b: C64, c: C64, x: C64) -> Result<C64> {
    hyp_series(Series::TwoF1 { a, b, c }, x)
}

/// The symmetric q-number `[x]_q = (q^x - q^-x) / (q - q^-1)`.
///
/// `q` is first mapped to its representative `>= 1`, so `q` and `1/q` give
/// the same value whenever the reciprocal is exact in floating point.
pub fn q_bracket(x: f64, q: f64) -> f64 {
    debug_assert!(q > 0.0);
    if q == 1.0 {
        return x;
    }
    let q = if q < 1.0 { 1.0 / q } else { q };
    let l = q.ln();
    (x * l).sinh() / l.sinh()
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`.
pub fn q_factorial(n: usize, q: f64) -> f64 {
    (1..=n).map(|i| q_bracket(i as f64, q)).product()
}

/// `[m]_q!! = [m]_q [m-2]_q ...` down to `[1]` or `[2]`; `[0]!! = [-1]!! = 1`.
pub fn q_double_factorial(m: i64, q: f64) -> f64 {
    let mut out = 1.0;
    let mut i = m;
    while i > 0 {
        out *= q_bracket(i as f64, q);
        i -= 2;
    }
    out
}

/// The stepped q-product `(([x]))_{2n} = [x][x+2]...[x+2n-2]`.
pub fn q_shifted_product(x: f64, n: usize, q: f64) -> f64 {
    (0..n).map(|i| q_bracket(x + 2.0 * i as f64, q)).product()
}

/// Rising factorial `(x)_n = x (x+1) ... (x+n-1)`.
pub fn pochhammer(x: f64, n: usize) -> f64 {
    (0..n).map(|i| x + i as f64).product()
}

/// Minimal double-double arithmetic for series with heavy cancellation.
pub(crate) mod dd {
    use num_complex::Complex64 as C64;
    use std::ops::{Add, Mul, Neg, Sub};

    #[derive(Clone, Copy, Debug, Default, PartialEq)]
    pub struct Dd {
        pub hi: f64,
        pub lo: f64,
    }

    #[inline]
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    #[inline]
    fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        (s, b - (s - a))
    }

    impl Dd {
        pub fn from_f64(x: f64) -> Self {
            Dd { hi: x, lo: 0.0 }
        }

        pub fn to_f64(self) -> f64 {
            self.hi + self.lo
        }

        pub fn div_f64(self, b: f64) -> Self {
            let q1 = self.hi / b;
            let p = Dd::from_f64(q1) * b;
            let r = self - p;
            let q2 = r.hi / b;
            let (hi, lo) = quick_two_sum(q1, q2);
            Dd { hi, lo }
        }
    }

    impl Add for Dd {
        type Output = Dd;
        fn add(self, o: Dd) -> Dd {
            let (s, e) = two_sum(self.hi, o.hi);
            let (t, f) = two_sum(self.lo, o.lo);
            let (s, e) = quick_two_sum(s, e + t);
            let (hi, lo) = quick_two_sum(s, e + f);
            Dd { hi, lo }
        }
    }

    impl Neg for Dd {
        type Output = Dd;
        fn neg(self) -> Dd {
            Dd { hi: -self.hi, lo: -self.lo }
        }
    }

    impl Sub for Dd {
        type Output = Dd;
        fn sub(self, o: Dd) -> Dd {
            self + (-o)
        }
    }

    impl Mul for Dd {
        type Output = Dd;
        fn mul(self, o: Dd) -> Dd {
            let p = self.hi * o.hi;
            let e = self.hi.mul_add(o.hi, -p);
            let e = e + (self.hi * o.lo + self.lo * o.hi);
            let (hi, lo) = quick_two_sum(p, e);
            Dd { hi, lo }
        }
    }

    impl Mul<f64> for Dd {
        type Output = Dd;
        fn mul(self, o: f64) -> Dd {
            self * Dd::from_f64(o)
        }
    }

    /// Complex number over double-double parts.
    #[derive(Clone, Copy, Debug, Default, PartialEq)]
    pub struct Cdd {
        pub re: Dd,
        pub im: Dd,
    }

    impl Cdd {
        pub fn from_c64(z: C64) -> Self {
            Cdd { re: Dd::from_f64(z.re), im: Dd::from_f64(z.im) }
        }

        pub fn to_c64(self) -> C64 {
            C64::new(self.re.to_f64(), self.im.to_f64())
        }

        pub fn div_f64(self, b: f64) -> Self {
            Cdd { re: self.re.div_f64(b), im: self.im.div_f64(b) }
        }
    }

    impl Add for Cdd {
        type Output = Cdd;
        fn add(self, o: Cdd) -> Cdd {
            Cdd { re: self.re + o.re, im: self.im + o.im }
        }
    }

    impl Mul for Cdd {
        type Output = Cdd;
        fn mul(self, o: Cdd) -> Cdd {
            Cdd { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn one_f1_at_zero_is_one() {
        let v = hyp1f1(C64::new(0.3, 0.2), c(1.7), C64::new(0.0, 0.0)).unwrap();
        assert_eq!(v, c(1.0));
    }

    #[test]
    fn one_f1_with_equal_parameters_is_exponential() {
        for &x in &[-3.0, -0.5, 0.0, 1.0, 4.5] {
            let v = hyp1f1(c(2.5), c(2.5), c(x)).unwrap();
            assert!((v.re - x.exp()).abs() <= 1e-14 * x.exp().max(1.0), "x = {x}");
            assert_eq!(v.im, 0.0);
        }
        let z = C64::new(0.7, -1.3);
        let v = hyp1f1(C64::new(1.0, 0.5), C64::new(1.0, 0.5), z).unwrap();
        assert!((v - z.exp()).norm() < 1e-14);
    }

    #[test]
    fn terminating_two_f1() {
        // 1 - 2 + 4/3
        let v = hyp2f1(c(1.0), c(-2.0), c(2.0), c(2.0)).unwrap();
        assert_abs_diff_eq!(v.re, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn terminating_matches_explicit_finite_sum() {
        // brute-force sum over j of (a)_j (-m)_j / ((c)_j j!) x^j
        for m in 0..8u32 {
            for &(a, cc, x) in &[(0.5f64, 1.5, 2.0f64), (3.0, 4.0, -1.0), (1.25, 0.75, 0.3)] {
                let mut expected = 0.0;
                for j in 0..=m as usize {
                    expected += pochhammer(a, j) * pochhammer(-(m as f64), j)
                        / (pochhammer(cc, j) * pochhammer(1.0, j))
                        * x.powi(j as i32);
                }
                let got = hyp2f1(c(a), c(-(m as f64)), c(cc), c(x)).unwrap();
                assert!((got.re - expected).abs() <= 1e-13 * expected.abs().max(1.0));
            }
        }
    }

    #[test]
    fn gauss_series_inside_disk() {
        // 2F1(1,1;2;x) = -ln(1-x)/x
        let x = 0.6;
        let v = hyp2f1(c(1.0), c(1.0), c(2.0), c(x)).unwrap();
        assert_abs_diff_eq!(v.re, -(1.0 - x).ln() / x, epsilon = 1e-13);
    }

    #[test]
    fn gauss_series_outside_disk_diverges() {
        assert!(matches!(hyp2f1(c(0.5), c(0.5), c(1.0), c(1.5)), Err(Error::DivergentSeries { .. })));
    }

    #[test]
    fn pole_at_c() {
        assert!(matches!(hyp1f1(c(0.5), c(-2.0), c(0.1)), Err(Error::PoleAtC(_))));
        // terminates at j = 1 before the pole at j = 3
        assert!(hyp2f1(c(-1.0), c(0.5), c(-2.0), c(0.3)).is_ok());
    }

    #[test]
    fn q_bracket_values() {
        for n in 0..10 {
            assert_eq!(q_bracket(n as f64, 1.0), n as f64);
        }
        assert_abs_diff_eq!(q_bracket(2.0, 2.0), 2.5, epsilon = 1e-15);
        assert_eq!(q_shifted_product(2.0, 1, 1.0), 2.0);
        assert_eq!(q_double_factorial(5, 1.0), 15.0);
        assert_eq!(q_double_factorial(-1, 0.7), 1.0);
        assert_abs_diff_eq!(q_factorial(4, 1.0), 24.0, epsilon = 0.0);
    }

    #[test]
    fn q_bracket_inversion_symmetry_is_exact_for_exact_reciprocals() {
        for &q in &[0.5, 2.0, 0.25, 4.0, 0.125] {
            for i in -6..12 {
                let x = i as f64 * 0.5;
                assert_eq!(q_bracket(x, q), q_bracket(x, 1.0 / q));
            }
        }
    }

    #[test]
    fn double_double_recovers_cancellation() {
        use dd::Dd;
        let big = Dd::from_f64(1e17);
        let s = (big + Dd::from_f64(1.0)) - big;
        assert_eq!(s.to_f64(), 1.0);
    }

    proptest::proptest! {
        #[test]
        fn q_bracket_symmetry(x in -5.0f64..5.0, q in 0.05f64..20.0) {
            let a = q_bracket(x, q);
            let b = q_bracket(x, 1.0 / q);
            proptest::prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
        }
    }
}
