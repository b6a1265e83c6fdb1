//! Complete elliptic integral of the first kind and the Jacobi functions
//! sn, cn, dn for real argument and modulus `0 <= k < 1`.
//!
//! Both are driven by the arithmetic-geometric mean sequence started from
//! `(1, k')`. The modulus keeps `k` and the complementary modulus `k'`
//! separately so that values near `k = 1` do not lose digits in `1 - k^2`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const AGM_MAX: usize = 64;

/// Elliptic modulus `k` together with `k' = sqrt(1 - k^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus {
    k: f64,
    kc: f64,
}

impl Modulus {
    /// Builds a modulus from `k`, rejecting `k` outside `[0, 1)`.
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return Err(Error::Domain(format!(
                "elliptic modulus k = {k} outside [0, 1)"
            )));
        }
        let kc = ((1.0 - k) * (1.0 + k)).sqrt();
        Ok(Self { k, kc })
    }

    /// Builds a modulus from the complementary modulus `k'` in `(0, 1]`.
    pub fn from_complement(kc: f64) -> Result<Self> {
        if !(kc > 0.0 && kc <= 1.0) {
            return Err(Error::Domain(format!(
                "complementary modulus k' = {kc} outside (0, 1]"
            )));
        }
        // k may round to 1.0 here; every formula below uses kc where it matters.
        let k = ((1.0 - kc) * (1.0 + kc)).sqrt();
        Ok(Self { k, kc })
    }

    /// Builds a modulus from `k^2` and `1 - k^2`, both supplied by the caller
    /// so that neither is formed by cancellation.
    pub fn from_squares(k2: f64, kc2: f64) -> Result<Self> {
        if !(k2 >= 0.0 && kc2 > 0.0) || ((k2 + kc2) - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "inconsistent modulus squares k^2 = {k2}, k'^2 = {kc2}"
            )));
        }
        Ok(Self {
            k: k2.sqrt(),
            kc: kc2.sqrt(),
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn complement(&self) -> f64 {
        self.kc
    }

    /// `K(k) = pi / (2 AGM(1, k'))`.
    pub fn complete_k(&self) -> f64 {
        let (mut a, mut b) = (1.0f64, self.kc);
        for _ in 0..AGM_MAX {
            if (a - b).abs() <= 1e-16 * a {
                break;
            }
            let an = 0.5 * (a + b);
            b = (a * b).sqrt();
            a = an;
        }
        FRAC_PI_2 / a
    }

    /// Returns `(sn, cn, dn)` at `u`.
    pub fn sncndn(&self, u: f64) -> Jacobi {
        if !u.is_finite() {
            return Jacobi {
                sn: f64::NAN,
                cn: f64::NAN,
                dn: f64::NAN,
            };
        }
        let quarter = self.complete_k();
        let u = reduce(u, quarter);

        // Descending AGM sequence; c[n] = (a[n-1] - b[n-1]) / 2.
        let mut a = [0.0f64; AGM_MAX];
        let mut c = [0.0f64; AGM_MAX];
        a[0] = 1.0;
        c[0] = self.k;
        let mut b = self.kc;
        let mut n = 0;
        while c[n].abs() > f64::EPSILON * a[n] && n + 1 < AGM_MAX {
            let an = a[n];
            a[n + 1] = 0.5 * (an + b);
            c[n + 1] = 0.5 * (an - b);
            b = (an * b).sqrt();
            n += 1;
        }
        let mut phi = (1u64 << n) as f64 * a[n] * u;
        for m in (1..=n).rev() {
            let s = (c[m] / a[m]) * phi.sin();
            phi = 0.5 * (phi + s.clamp(-1.0, 1.0).asin());
        }
        let sn = phi.sin();
        let cn = phi.cos();
        let dn = (self.kc * self.kc + self.k * self.k * cn * cn).sqrt();
        Jacobi { sn, cn, dn }
    }
}

/// Values of the three Jacobi functions at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Reduces `u` into `[-2K, 2K)` using the real period `4K`.
fn reduce(u: f64, quarter: f64) -> f64 {
    let period = 4.0 * quarter;
    if u.abs() <= 2.0 * quarter {
        return u;
    }
    let r = u - period * (u / period).round();
    if r >= 2.0 * quarter {
        r - period
    } else {
        r
    }
}

/// Complete elliptic integral of the first kind.
pub fn complete_k(k: f64) -> Result<f64> {
    Ok(Modulus::new(k)?.complete_k())
}

/// Jacobi `cn(u; k)`.
pub fn jacobi_cn(u: f64, k: f64) -> Result<f64> {
    Ok(Modulus::new(k)?.sncndn(u).cn)
}

/// Jacobi `sn(u; k)`.
pub fn jacobi_sn(u: f64, k: f64) -> Result<f64> {
    Ok(Modulus::new(k)?.sncndn(u).sn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::quad::{integrate_adaptive, Adaptive};
    use proptest::prelude::*;

    fn k_by_quadrature(k: f64) -> f64 {
        let opts = Adaptive {
            rel_tol: 1e-15,
            ..Adaptive::default()
        };
        integrate_adaptive(
            |t: f64| 1.0 / (1.0 - k * k * t.sin().powi(2)).sqrt(),
            0.0,
            FRAC_PI_2,
            opts,
        )
        .unwrap()
    }

    #[test]
    fn k_at_zero_is_half_pi() {
        assert_eq!(complete_k(0.0).unwrap(), FRAC_PI_2);
    }

    #[test]
    fn k_at_one_half() {
        let v = complete_k(0.5).unwrap();
        assert!((v - 1.685_750_354_812_596).abs() < 1e-15);
        assert!((v - k_by_quadrature(0.5)).abs() < 1e-14);
    }

    #[test]
    fn k_matches_quadrature_on_grid() {
        for i in 0..50 {
            let k = 0.999 * i as f64 / 49.0;
            let agm = complete_k(k).unwrap();
            let q = k_by_quadrature(k);
            assert!((agm - q).abs() <= 1e-11 * q, "k = {k}: {agm} vs {q}");
        }
    }

    #[test]
    fn k_grows_logarithmically_near_one() {
        let k = 0.999_999;
        let v = complete_k(k).unwrap();
        assert!(v > 7.0);
        let kc = ((1.0 - k) * (1.0 + k)).sqrt();
        assert!((v - (4.0 / kc).ln()).abs() < 1e-5);
    }

    #[test]
    fn rejects_k_outside_unit_interval() {
        assert!(complete_k(1.0).is_err());
        assert!(complete_k(-0.1).is_err());
        assert!(jacobi_cn(0.3, 1.0).is_err());
        assert!(Modulus::from_complement(0.0).is_err());
    }

    #[test]
    fn cn_special_values() {
        for &k in &[0.0, 0.3, 0.9, 0.999_999] {
            assert_eq!(jacobi_cn(0.0, k).unwrap(), 1.0);
            let kk = complete_k(k).unwrap();
            assert!(jacobi_cn(kk, k).unwrap().abs() < 1e-12, "k = {k}");
            assert!((jacobi_sn(kk, k).unwrap() - 1.0).abs() < 1e-12);
        }
        let v = jacobi_cn(std::f64::consts::PI / 3.0, 0.0).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cn_reduces_to_sech_and_cos_limits() {
        // k -> 0: cos; k' tiny: sech away from the quarter period
        let m = Modulus::from_complement(1e-12).unwrap();
        for &u in &[0.2, 1.0, 3.0] {
            let j = m.sncndn(u);
            assert!((j.cn - 1.0 / u.cosh()).abs() < 1e-10);
            assert!((j.sn - u.tanh()).abs() < 1e-10);
        }
    }

    #[test]
    fn derivative_of_sn_is_cn_dn() {
        let m = Modulus::new(0.8).unwrap();
        for i in 0..20 {
            let u = -3.0 + 0.37 * i as f64;
            let h = 1e-5;
            let d = (m.sncndn(u + h).sn - m.sncndn(u - h).sn) / (2.0 * h);
            let j = m.sncndn(u);
            assert!((d - j.cn * j.dn).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn pythagorean_identities(u in -50.0f64..50.0, k in 0.0f64..0.999_999_9) {
            let j = Modulus::new(k).unwrap().sncndn(u);
            prop_assert!((j.sn * j.sn + j.cn * j.cn - 1.0).abs() < 1e-12);
            prop_assert!((j.dn * j.dn + k * k * j.sn * j.sn - 1.0).abs() < 1e-12);
            prop_assert!(j.cn.abs() <= 1.0);
        }

        #[test]
        fn cn_has_period_four_k(u in -10.0f64..10.0, k in 0.0f64..0.999_999) {
            let m = Modulus::new(k).unwrap();
            let p = 4.0 * m.complete_k();
            prop_assert!((m.sncndn(u + p).cn - m.sncndn(u).cn).abs() < 1e-11);
        }

        #[test]
        fn cn_is_even_and_sn_odd(u in -10.0f64..10.0, k in 0.0f64..0.99) {
            let m = Modulus::new(k).unwrap();
            let (p, q) = (m.sncndn(u), m.sncndn(-u));
            prop_assert!((p.cn - q.cn).abs() < 1e-14);
            prop_assert!((p.sn + q.sn).abs() < 1e-14);
        }
    }
}
