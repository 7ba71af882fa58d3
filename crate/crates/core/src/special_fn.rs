//! Bessel functions of the first kind for real nonnegative order, and the
//! specific positive roots used throughout the crate.
//!
//! `J_ν(x)` is evaluated by Miller's backward recurrence normalized with the
//! Neumann sum `(x/2)^ν = Σ (ν+2k) Γ(ν+k)/k! J_{ν+2k}(x)` (which reduces to
//! `J_0 + 2ΣJ_{2k} = 1` for integer order), and by the Hankel asymptotic
//! expansion once `x` is large compared with `ν²`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Largest supported order.
pub const MAX_ORDER: f64 = 50.0;
/// Largest supported argument.
pub const MAX_ARG: f64 = 1.0e4;

/// Below this, the order is treated as an integer for normalization purposes.
const INTEGER_ORDER_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    ZeroOfJ,
    ZeroOfJprime,
}

/// A positive root of `J_ν` or `J_ν'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselRoot {
    pub order: f64,
    pub kind: RootKind,
    /// 1-based index of the root.
    pub index: usize,
    pub value: f64,
}

impl BesselRoot {
    /// Recomputes the designated function at the stored root.
    pub fn residual(&self) -> f64 {
        let r = match self.kind {
            RootKind::ZeroOfJ => bessel_j(self.order, self.value),
            RootKind::ZeroOfJprime => bessel_j_derivative(self.order, self.value),
        };
        r.map(f64::abs).unwrap_or(f64::NAN)
    }
}

fn check_domain(order: f64, x: f64) -> Result<()> {
    if !(0.0..=MAX_ORDER).contains(&order) || !order.is_finite() {
        return Err(Error::Domain(format!(
            "Bessel order {order} outside supported range [0, {MAX_ORDER}]"
        )));
    }
    if !(0.0..=MAX_ARG).contains(&x) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "Bessel argument {x} outside supported range [0, {MAX_ARG}]"
        )));
    }
    Ok(())
}

/// `J_ν(x)` for `0 ≤ ν ≤ 50`, `0 ≤ x ≤ 10⁴`.
pub fn bessel_j(order: f64, x: f64) -> Result<f64> {
    check_domain(order, x)?;
    Ok(bessel_pair(order, x).0)
}

/// `J_ν'(x)`, via `J_ν' = (ν/x) J_ν − J_{ν+1}`.
pub fn bessel_j_derivative(order: f64, x: f64) -> Result<f64> {
    check_domain(order, x)?;
    if x == 0.0 {
        // J_ν'(0): 0 for ν = 0 or ν > 1, 1/2 at ν = 1, divergent for 0 < ν < 1.
        return Ok(if order == 0.0 || order > 1.0 {
            0.0
        } else if order == 1.0 {
            0.5
        } else {
            f64::INFINITY
        });
    }
    let (j, j_next) = bessel_pair(order, x);
    Ok(order / x * j - j_next)
}

/// `J_0(x)` without domain checks; callers guarantee `0 ≤ x ≤ 10⁴`.
pub(crate) fn j0(x: f64) -> f64 {
    bessel_pair(0.0, x.abs()).0
}

/// `J_1(x)` without domain checks.
pub(crate) fn j1(x: f64) -> f64 {
    let v = bessel_pair(1.0, x.abs()).0;
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Returns `(J_ν(x), J_{ν+1}(x))`.
fn bessel_pair(order: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (if order == 0.0 { 1.0 } else { 0.0 }, 0.0);
    }
    if use_asymptotic(order, x) {
        (hankel_asymptotic(order, x), hankel_asymptotic(order + 1.0, x))
    } else {
        miller(order, x)
    }
}

fn use_asymptotic(order: f64, x: f64) -> bool {
    let nu = order + 1.0;
    x >= 25.0 && x >= 2.0 * nu * nu
}

/// Hankel's large-argument expansion, summed until terms stop decreasing.
fn hankel_asymptotic(order: f64, x: f64) -> f64 {
    let mu = 4.0 * order * order;
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * eight_x);
        if term.abs() >= last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 * p.abs().max(q.abs()) {
            break;
        }
    }
    let chi = x - (0.5 * order + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Miller's backward recurrence. Returns `(J_ν(x), J_{ν+1}(x))`.
fn miller(order: f64, x: f64) -> (f64, f64) {
    let base = order - order.floor();
    let shift = order.floor() as usize;
    let integer = base < INTEGER_ORDER_EPS;
    let base = if integer { 0.0 } else { base };

    let scale = order.max(x);
    let start = shift + x.ceil() as usize + 40 + (40.0 * scale).sqrt().ceil() as usize;

    // Backward recurrence J_{b+k-1} = 2(b+k)/x J_{b+k} − J_{b+k+1}, starting
    // from an arbitrary tiny seed. Values at indices shift and shift+1 are kept.
    let mut upper = 0.0_f64;
    let mut current = 1e-300_f64;
    let mut at_shift = 0.0;
    let mut at_shift_next = 0.0;
    let mut norm = 0.0;

    // Normalization weight for index k relative to base b: for integer order
    // J_0 + 2ΣJ_{2k} = 1; otherwise (b+2k)·(b)_k/k! with (b)_k the Pochhammer
    // symbol, matched against (x/2)^b / Γ(b).
    let weights = normalization_weights(base, start);

    let mut k = start;
    loop {
        if k == shift + 1 {
            at_shift_next = current;
        }
        if k == shift {
            at_shift = current;
        }
        if k % 2 == 0 {
            norm += weights[k / 2] * current;
        }
        if k == 0 {
            break;
        }
        let nu = base + k as f64;
        let lower = 2.0 * nu / x * current - upper;
        upper = current;
        current = lower;
        k -= 1;
        if current.abs() > 1e250 {
            upper *= 1e-250;
            current *= 1e-250;
            at_shift *= 1e-250;
            at_shift_next *= 1e-250;
            norm *= 1e-250;
        }
    }

    let target = if integer {
        1.0
    } else {
        (0.5 * x).powf(base) / gamma(base)
    };
    let factor = target / norm;
    (at_shift * factor, at_shift_next * factor)
}

fn normalization_weights(base: f64, start: usize) -> Vec<f64> {
    let count = start / 2 + 1;
    let mut w = Vec::with_capacity(count);
    if base == 0.0 {
        w.push(1.0);
        w.extend(std::iter::repeat_n(2.0, count - 1));
        return w;
    }
    // (b)_k / k!, built incrementally.
    let mut poch = 1.0;
    for k in 0..count {
        if k > 0 {
            poch *= (base + (k - 1) as f64) / k as f64;
        }
        w.push((base + 2.0 * k as f64) * poch);
    }
    w
}

/// Bisection to the limit of floating-point resolution on a sign-changing bracket.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * mid.abs() {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The `index`-th positive zero of `J_0` or `J_1`.
pub fn bessel_j_zero(order: u32, index: usize) -> Result<f64> {
    if order > 1 {
        return Err(Error::Domain(format!(
            "bessel_j_zero supports orders 0 and 1, got {order}"
        )));
    }
    if index == 0 {
        return Err(Error::Domain("root index is 1-based".into()));
    }
    let nu = order as f64;
    let f = |x: f64| bessel_pair(nu, x).0;
    // Consecutive zeros of J_0, J_1 are more than 2.4 apart, so a 0.5 grid
    // sees every sign change.
    let step = 0.5;
    let mut a = if order == 0 { 1e-3 } else { 1.0 };
    let mut fa = f(a);
    let mut found = 0;
    while a < MAX_ARG {
        let b = a + step;
        let fb = f(b);
        if fa == 0.0 || (fa > 0.0) != (fb > 0.0) {
            found += 1;
            if found == index {
                return Ok(bisect(f, a, b));
            }
        }
        a = b;
        fa = fb;
    }
    Err(Error::Convergence(format!(
        "zero {index} of J_{order} not found below {MAX_ARG}"
    )))
}

/// First positive zero of `J_ν'` for `0 < ν ≤ 50`.
///
/// The search window is `[ν·(1 − 10⁻⁹), ν + 3ν^{1/3} + 6]`; `J_ν'` is positive
/// on `(0, j'_{ν,1})`.
pub fn bessel_jprime_zero(order: f64) -> Result<f64> {
    if !(order > 0.0 && order <= MAX_ORDER) {
        return Err(Error::Domain(format!(
            "bessel_jprime_zero requires 0 < order <= {MAX_ORDER}, got {order}"
        )));
    }
    let f = |x: f64| {
        let (j, jn) = bessel_pair(order, x);
        order / x * j - jn
    };
    let lo = (order * (1.0 - 1e-9)).max(1e-6);
    let hi = order + 3.0 * order.cbrt() + 6.0;
    let step = 0.125;
    let mut a = lo;
    let mut fa = f(a);
    while a < hi {
        let b = (a + step).min(hi);
        let fb = f(b);
        if (fa > 0.0) != (fb > 0.0) {
            return Ok(bisect(f, a, b));
        }
        a = b;
        fa = fb;
    }
    Err(Error::Convergence(format!(
        "first zero of J'_{order} not bracketed in [{lo}, {hi}]"
    )))
}

/// `j_{0,1}`.
pub fn j01() -> f64 {
    bessel_j_zero(0, 1).expect("j_{0,1} is always bracketed")
}

/// `j_{1,1}`.
pub fn j11() -> f64 {
    bessel_j_zero(1, 1).expect("j_{1,1} is always bracketed")
}

/// The order `ν*` at which `j'_{ν,1} = j_{1,1}`.
pub fn jprime_crossing() -> f64 {
    let target = j11();
    let g = |nu: f64| bessel_jprime_zero(nu).expect("order within range") - target;
    bisect(g, 2.5, 2.8)
}

/// Returns the root as a [`BesselRoot`] record.
pub fn j_zero_record(order: u32, index: usize) -> Result<BesselRoot> {
    Ok(BesselRoot {
        order: order as f64,
        kind: RootKind::ZeroOfJ,
        index,
        value: bessel_j_zero(order, index)?,
    })
}

pub fn jprime_zero_record(order: f64) -> Result<BesselRoot> {
    Ok(BesselRoot {
        order,
        kind: RootKind::ZeroOfJprime,
        index: 1,
        value: bessel_jprime_zero(order)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integer-order oracle: `J_n(x) = (1/π)∫₀^π cos(nτ − x sin τ) dτ`, by the
    /// trapezoid rule on the periodic extension (spectrally accurate).
    fn integral_oracle(n: u32, x: f64) -> f64 {
        let m = 4000;
        let h = PI / m as f64;
        let mut s = 0.0;
        for i in 0..=m {
            let t = i as f64 * h;
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            s += w * (n as f64 * t - x * t.sin()).cos();
        }
        s * h / PI
    }

    /// Ascending series, fine for small x at any real order.
    fn series_oracle(nu: f64, x: f64) -> f64 {
        let mut term = (0.5 * x).powf(nu) / gamma(nu + 1.0);
        let mut s = term;
        for k in 1..200 {
            let kf = k as f64;
            term *= -(0.25 * x * x) / (kf * (kf + nu));
            s += term;
            if term.abs() < 1e-18 * s.abs() {
                break;
            }
        }
        s
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(2.5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn j0_at_one() {
        let v = bessel_j(0.0, 1.0).unwrap();
        assert!((v - 0.7651976865579666).abs() < 1e-15, "{v}");
        assert!((series_oracle(0.0, 1.0) - 0.7651976865579666).abs() < 1e-15);
    }

    #[test]
    fn integer_orders_match_integral_oracle() {
        for n in 0..=5u32 {
            for i in 0..=80 {
                let x = 0.37 * i as f64;
                let got = bessel_j(n as f64, x).unwrap();
                let want = integral_oracle(n, x);
                let tol = if n <= 1 { 1e-13 } else { 1e-10 * want.abs().max(1e-3) };
                assert!((got - want).abs() < tol, "J_{n}({x}) = {got}, oracle {want}");
            }
        }
    }

    #[test]
    fn large_arguments_match_integral_oracle() {
        for &x in &[24.9, 25.0, 60.0, 123.4, 999.0] {
            for n in 0..=1u32 {
                let got = bessel_j(n as f64, x).unwrap();
                let want = integral_oracle(n, x);
                assert!((got - want).abs() < 1e-13, "J_{n}({x}) {got} vs {want}");
            }
        }
    }

    #[test]
    fn fractional_orders_match_series() {
        for &nu in &[0.3, 0.5, 1.7, 2.68, 3.25, 7.5, 12.1] {
            for i in 1..=40 {
                let x = 0.25 * i as f64;
                let got = bessel_j(nu, x).unwrap();
                let want = series_oracle(nu, x);
                assert!(
                    (got - want).abs() <= 1e-10 * want.abs().max(1e-8),
                    "J_{nu}({x}) = {got}, series {want}"
                );
            }
        }
    }

    #[test]
    fn half_order_closed_form() {
        for i in 1..60 {
            let x = 0.5 * i as f64;
            let want = (2.0 / (PI * x)).sqrt() * x.sin();
            let got = bessel_j(0.5, x).unwrap();
            assert!((got - want).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn derivative_identity_j0_prime_is_minus_j1() {
        for i in 0..=200 {
            let x = 0.1 * i as f64;
            let d = bessel_j_derivative(0.0, x).unwrap();
            assert!((d + bessel_j(1.0, x).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_j(0.0, -1.0).is_err());
        assert!(bessel_j(51.0, 1.0).is_err());
        assert!(bessel_j(-0.5, 1.0).is_err());
        assert!(bessel_j(1.0, 2e4).is_err());
        assert!(bessel_j_zero(2, 1).is_err());
        assert!(bessel_j_zero(0, 0).is_err());
        assert!(bessel_jprime_zero(0.0).is_err());
    }

    #[test]
    fn j_zeros() {
        let z01 = bessel_j_zero(0, 1).unwrap();
        let z11 = bessel_j_zero(1, 1).unwrap();
        assert!((z01 - 2.4048).abs() < 5e-5);
        assert!((z11 - 3.8317).abs() < 5e-5);
        assert!((bessel_j_zero(0, 2).unwrap() - 5.520078110).abs() < 1e-9);
        for (order, idx) in [(0, 1), (0, 2), (0, 7), (1, 1), (1, 3), (1, 20)] {
            let r = j_zero_record(order, idx).unwrap();
            assert!(r.residual() <= 1e-12, "{r:?} residual {}", r.residual());
        }
        assert!(bessel_j(1.0, z11).unwrap().abs() < 1e-12);
    }

    #[test]
    fn jprime_zeros() {
        assert!((bessel_jprime_zero(2.68).unwrap() - 3.8384).abs() < 5e-5);
        assert!((bessel_jprime_zero(1.0).unwrap() - 1.841183781).abs() < 1e-9);
        assert!((bessel_jprime_zero(3.0).unwrap() - 4.201188941).abs() < 1e-9);
        for &nu in &[0.2, 1.0, 2.68, 9.0, 30.0, 50.0] {
            let r = jprime_zero_record(nu).unwrap();
            assert!(r.residual() <= 1e-10, "{r:?}");
        }
    }

    #[test]
    fn jprime_zero_increases_with_order() {
        let mut last = 0.0;
        for i in 1..=20 {
            let nu = 0.5 * i as f64;
            let z = bessel_jprime_zero(nu).unwrap();
            assert!(z > last, "order {nu}");
            last = z;
        }
    }

    #[test]
    fn crossing() {
        let nu = jprime_crossing();
        assert!((nu - 2.6741).abs() < 1e-4, "{nu}");
        assert!((bessel_jprime_zero(nu).unwrap() - j11()).abs() < 1e-8);
        let target = j11();
        assert!(bessel_jprime_zero(2.6).unwrap() < target);
        assert!(bessel_jprime_zero(2.7).unwrap() > target);
    }
}
