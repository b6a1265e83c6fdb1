//! Parameter-space geometry of the traveling-wave family.
//!
//! A wave is labelled by its speed `c > 0` and two integration constants
//! `(a, b)`. Smooth periodic waves exist for `0 < a < 4c^3/27` and
//! `b_-(a) < b < b_+(a)`, where the two boundary curves are the potential
//! values at the center and at the saddle of the associated Newton problem.
//! The segment `a = 0`, `-c^2/2 < b < 0` closes the region and carries the
//! peaked waves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::roots::{newton_bracketed, RootOpts};

/// Default membership tolerance, measured in the normalized `(a/c^3, b/c^2)`
/// coordinates.
pub const DEFAULT_REGION_TOL: f64 = 1e-9;

/// Integration constants and speed of a traveling wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl WaveParams {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }
}

/// Roots `phi1 < phi2 < phi3` of `a = phi (c - phi)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicRoots {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

/// Minimum and maximum of the wave profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoints {
    pub phi_minus: f64,
    pub phi_plus: f64,
}

/// Position of a parameter triple relative to the existence region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionClass {
    Interior,
    BoundaryConstant,
    BoundarySolitary,
    BoundaryPeaked,
    Outside,
}

fn check_speed(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "wave speed c = {c} must be positive and finite"
        )))
    }
}

/// `a_c = 4 c^3 / 27`, the largest `a` with three distinct cubic roots.
pub fn critical_value_a(c: f64) -> Result<f64> {
    check_speed(c)?;
    Ok(4.0 * c * c * c / 27.0)
}

/// Three real roots of `phi (c - phi)^2 = a` for `0 < a < a_c`.
pub fn cubic_roots(a: f64, c: f64) -> Result<CubicRoots> {
    let ac = critical_value_a(c)?;
    if !(a > 0.0 && a < ac) {
        return Err(Error::OutsideCubicRange { a, c });
    }
    if a <= 1e-12 * ac || ac - a <= 1e-12 * ac {
        return Err(Error::DegenerateRoots { a, c });
    }
    let g = |x: f64| (x * (c - x) * (c - x) - a, (c - x) * (c - 3.0 * x));
    let opts = RootOpts::default();
    let third = c / 3.0;
    let phi1 = newton_bracketed(g, 0.0, third, a / (c * c), opts)?;
    let phi2 = newton_bracketed(g, third, c, c - (a / c).sqrt(), opts)?;
    let phi3 = newton_bracketed(g, c, 4.0 * third, c + (a / c).sqrt(), opts)?;
    Ok(CubicRoots { phi1, phi2, phi3 })
}

/// Newton potential `U(phi) = -phi^2/2 + a/(c - phi)`.
pub fn newton_potential(phi: f64, p: &WaveParams) -> Result<f64> {
    let gap = p.c - phi;
    if gap == 0.0 {
        if p.a == 0.0 {
            return Ok(-0.5 * phi * phi);
        }
        return Err(Error::Pole);
    }
    Ok(-0.5 * phi * phi + p.a / gap)
}

/// Lower boundary `b_-(a) = c phi2 - 3 phi2^2 / 2` (constant waves).
pub fn boundary_b_minus(a: f64, c: f64) -> Result<f64> {
    let r = cubic_roots(a, c)?;
    Ok(c * r.phi2 - 1.5 * r.phi2 * r.phi2)
}

/// Upper boundary `b_+(a) = c phi1 - 3 phi1^2 / 2` (solitary waves).
pub fn boundary_b_plus(a: f64, c: f64) -> Result<f64> {
    let r = cubic_roots(a, c)?;
    Ok(c * r.phi1 - 1.5 * r.phi1 * r.phi1)
}

fn center_offset(b: f64, c: f64) -> Result<f64> {
    check_speed(c)?;
    let disc = c * c - 6.0 * b;
    if disc.is_nan() || disc < 0.0 {
        return Err(Error::Domain(format!("b = {b} exceeds c^2/6 for c = {c}")));
    }
    Ok(disc.sqrt() / 3.0)
}

/// Inverse of `b_-`: the `a` whose constant wave has `b_-(a) = b`,
/// for `-c^2/2 <= b <= c^2/6`.
pub fn a_minus_of_b(b: f64, c: f64) -> Result<f64> {
    let s = center_offset(b, c)?;
    if b < -0.5 * c * c {
        return Err(Error::Domain(format!("b = {b} is below -c^2/2")));
    }
    let phi2 = c / 3.0 + s;
    Ok(phi2 * (c - phi2) * (c - phi2))
}

/// Inverse of `b_+` for `0 <= b <= c^2/6`.
pub fn a_plus_of_b(b: f64, c: f64) -> Result<f64> {
    let s = center_offset(b, c)?;
    if b < 0.0 {
        return Err(Error::Domain(format!(
            "b = {b} is negative; b_+ only covers [0, c^2/6]"
        )));
    }
    let phi1 = c / 3.0 - s;
    Ok(phi1 * (c - phi1) * (c - phi1))
}

/// `(a/c^3, b/c^2)`: the parameters of the same wave shape at unit speed.
pub fn normalize_scaling(p: &WaveParams) -> (f64, f64) {
    let c = p.c;
    (p.a / (c * c * c), p.b / (c * c))
}

/// Inverse of [`normalize_scaling`].
pub fn denormalize(alpha: f64, beta: f64, c: f64) -> WaveParams {
    WaveParams {
        a: alpha * c * c * c,
        b: beta * c * c,
        c,
    }
}

/// Classifies `p`; `tol` is measured in normalized coordinates.
pub fn classify(p: &WaveParams, tol: f64) -> RegionClass {
    if !(p.c > 0.0 && p.c.is_finite() && p.a.is_finite() && p.b.is_finite()) {
        return RegionClass::Outside;
    }
    let tol = tol.max(0.0);
    let (alpha, beta) = normalize_scaling(p);
    let ac = 4.0 / 27.0;
    let corner = 1.0 / 6.0;

    if alpha.abs() <= tol {
        return if (-0.5 - tol..=tol).contains(&beta) {
            RegionClass::BoundaryPeaked
        } else {
            RegionClass::Outside
        };
    }
    if alpha < 0.0 || alpha > ac + tol {
        return RegionClass::Outside;
    }
    let bounds = if alpha >= ac {
        None
    } else {
        cubic_roots(alpha, 1.0).ok().map(|r| {
            (
                r.phi2 - 1.5 * r.phi2 * r.phi2,
                r.phi1 - 1.5 * r.phi1 * r.phi1,
            )
        })
    };
    let (bm, bp) = match bounds {
        Some(v) => v,
        // Roots coalesce: only the neighbourhoods of the region's corners remain.
        None if alpha > 0.5 * ac => {
            return if (beta - corner).abs() <= tol.max(1e-6 * (ac - alpha).abs().sqrt()) {
                RegionClass::BoundaryConstant
            } else {
                RegionClass::Outside
            };
        }
        None => {
            return if (-0.5 - tol..=tol).contains(&beta) {
                RegionClass::BoundaryPeaked
            } else {
                RegionClass::Outside
            };
        }
    };
    if (beta - bm).abs() <= tol {
        RegionClass::BoundaryConstant
    } else if (beta - bp).abs() <= tol {
        RegionClass::BoundarySolitary
    } else if beta > bm && beta < bp {
        RegionClass::Interior
    } else {
        RegionClass::Outside
    }
}

/// Requires strict membership of the open region (zero tolerance).
pub(crate) fn require_interior(p: &WaveParams) -> Result<()> {
    match classify(p, 0.0) {
        RegionClass::Interior => Ok(()),
        _ => Err(Error::NotInRegion {
            a: p.a,
            b: p.b,
            c: p.c,
        }),
    }
}

/// Turning points: the roots of `(c - phi)(2b + phi^2) = 2a` bracketing the
/// center `phi2`. On the constant boundary both equal `phi2`; on the peaked
/// segment they are `sqrt(2|b|)` and `c`.
pub fn turning_points(p: &WaveParams) -> Result<TurningPoints> {
    check_speed(p.c)?;
    let WaveParams { a, b, c } = *p;
    if a == 0.0 {
        if b > -0.5 * c * c && b < 0.0 {
            return Ok(TurningPoints {
                phi_minus: (-2.0 * b).sqrt(),
                phi_plus: c,
            });
        }
        return Err(Error::NotInRegion { a, b, c });
    }
    let roots = cubic_roots(a, c)?;
    let bm = c * roots.phi2 - 1.5 * roots.phi2 * roots.phi2;
    let bp = c * roots.phi1 - 1.5 * roots.phi1 * roots.phi1;
    if b == bm {
        return Ok(TurningPoints {
            phi_minus: roots.phi2,
            phi_plus: roots.phi2,
        });
    }
    if !(b > bm && b < bp) {
        return Err(Error::NotInRegion { a, b, c });
    }
    let f = |x: f64| {
        (
            (c - x) * (2.0 * b + x * x) - 2.0 * a,
            -3.0 * x * x + 2.0 * c * x - 2.0 * b,
        )
    };
    let opts = RootOpts::default();
    let phi_minus = newton_bracketed(
        f,
        roots.phi1,
        roots.phi2,
        0.5 * (roots.phi1 + roots.phi2),
        opts,
    )?;
    let phi_plus = newton_bracketed(f, roots.phi2, c, 0.5 * (roots.phi2 + c), opts)?;
    Ok(TurningPoints {
        phi_minus,
        phi_plus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::roots::brent;
    use proptest::prelude::*;

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn critical_value() {
        assert!((critical_value_a(2.0).unwrap() - 32.0 / 27.0).abs() < 1e-15);
        assert!((critical_value_a(1.0).unwrap() - 4.0 / 27.0).abs() < 1e-16);
        assert!((critical_value_a(3.0).unwrap() - 4.0).abs() < 1e-15);
        assert!(critical_value_a(0.0).is_err());
        assert!(critical_value_a(-1.0).is_err());
    }

    #[test]
    fn cubic_roots_match_bisection_oracle() {
        let (a, c) = (0.4, 2.0);
        let r = cubic_roots(a, c).unwrap();
        let g = |x: f64| x * (c - x) * (c - x) - a;
        let o1 = bisect(g, 0.0, c / 3.0);
        let o2 = bisect(g, c / 3.0, c);
        let o3 = bisect(g, c, 10.0);
        assert!((r.phi1 - o1).abs() < 1e-14);
        assert!((r.phi2 - o2).abs() < 1e-14);
        assert!((r.phi3 - o3).abs() < 1e-14);
        assert!((r.phi1 + r.phi2 + r.phi3 - 2.0 * c).abs() < 1e-14);
    }

    #[test]
    fn cubic_roots_limits() {
        let c = 2.0;
        let ac = critical_value_a(c).unwrap();
        let r = cubic_roots(ac * (1.0 - 1e-10), c).unwrap();
        assert!((r.phi1 - 2.0 / 3.0).abs() < 1e-4);
        assert!((r.phi2 - 2.0 / 3.0).abs() < 1e-4);
        assert!((r.phi3 - 8.0 / 3.0).abs() < 1e-9);
        let r = cubic_roots(1e-10, c).unwrap();
        assert!(r.phi1.abs() < 1e-9);
        assert!((r.phi2 - 2.0).abs() < 1e-4 && (r.phi3 - 2.0).abs() < 1e-4);
        assert!(matches!(
            cubic_roots(ac, c),
            Err(Error::OutsideCubicRange { .. })
        ));
        assert!(matches!(
            cubic_roots(0.0, c),
            Err(Error::OutsideCubicRange { .. })
        ));
        assert!(matches!(
            cubic_roots(ac * (1.0 - 1e-14), c),
            Err(Error::DegenerateRoots { .. })
        ));
    }

    #[test]
    fn potential_values() {
        let p = WaveParams::new(0.4, 0.0, 2.0);
        assert!((newton_potential(0.0, &p).unwrap() - 0.2).abs() < 1e-16);
        let r = cubic_roots(0.4, 2.0).unwrap();
        let bm = boundary_b_minus(0.4, 2.0).unwrap();
        let bp = boundary_b_plus(0.4, 2.0).unwrap();
        assert!((newton_potential(r.phi2, &p).unwrap() - bm).abs() < 1e-14);
        assert!((newton_potential(r.phi1, &p).unwrap() - bp).abs() < 1e-14);
        assert!(matches!(newton_potential(2.0, &p), Err(Error::Pole)));
    }

    #[test]
    fn boundary_limits() {
        let c = 2.0;
        let ac = critical_value_a(c).unwrap();
        assert!((boundary_b_minus(1e-11, c).unwrap() + 2.0).abs() < 1e-4);
        assert!(boundary_b_plus(1e-11, c).unwrap().abs() < 1e-10);
        let a = ac * (1.0 - 1e-10);
        assert!((boundary_b_minus(a, c).unwrap() - 2.0 / 3.0).abs() < 1e-8);
        assert!((boundary_b_plus(a, c).unwrap() - 2.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn boundary_values_at_reference_point() {
        let (a, c) = (0.4, 2.0);
        let g = |x: f64| x * (c - x) * (c - x) - a;
        let o1 = bisect(g, 0.0, c / 3.0);
        let o2 = bisect(g, c / 3.0, c);
        let bm = boundary_b_minus(a, c).unwrap();
        let bp = boundary_b_plus(a, c).unwrap();
        assert!((bm - (c * o2 - 1.5 * o2 * o2)).abs() < 1e-13);
        assert!((bp - (c * o1 - 1.5 * o1 * o1)).abs() < 1e-13);
    }

    #[test]
    fn boundaries_are_ordered_and_increasing() {
        let c = 2.0;
        let ac = critical_value_a(c).unwrap();
        let grid: Vec<f64> = (1..=100).map(|i| ac * i as f64 / 101.0).collect();
        let bm: Vec<f64> = grid
            .iter()
            .map(|&a| boundary_b_minus(a, c).unwrap())
            .collect();
        let bp: Vec<f64> = grid
            .iter()
            .map(|&a| boundary_b_plus(a, c).unwrap())
            .collect();
        for i in 0..grid.len() {
            assert!(bm[i] < bp[i]);
            if i > 0 {
                assert!(bm[i] > bm[i - 1]);
                assert!(bp[i] > bp[i - 1]);
            }
        }
    }

    #[test]
    fn inverse_boundaries_round_trip() {
        let c = 2.0;
        for &a in &[0.05, 0.4, 0.9, 1.1] {
            let bm = boundary_b_minus(a, c).unwrap();
            let bp = boundary_b_plus(a, c).unwrap();
            assert!((a_minus_of_b(bm, c).unwrap() - a).abs() < 1e-13);
            assert!((a_plus_of_b(bp, c).unwrap() - a).abs() < 1e-12);
            // independent route: Brent on the forward map
            let root = brent(
                |x| boundary_b_minus(x, c).unwrap() - bm,
                1e-6,
                critical_value_a(c).unwrap() * (1.0 - 1e-9),
                RootOpts::default(),
            )
            .unwrap();
            assert!((root - a).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_boundary_slope_is_gap_to_speed() {
        let c = 2.0;
        for &a in &[0.2, 0.5, 0.8] {
            let phi2 = cubic_roots(a, c).unwrap().phi2;
            let h = 1e-5;
            let db = boundary_b_minus(a + h, c).unwrap() - boundary_b_minus(a - h, c).unwrap();
            let slope = 2.0 * h / db;
            assert!((slope - (c - phi2)).abs() < 1e-6, "{slope} vs {}", c - phi2);
        }
    }

    #[test]
    fn turning_points_reference_and_limits() {
        let p = WaveParams::new(0.4, 0.0, 2.0);
        let tp = turning_points(&p).unwrap();
        let r = cubic_roots(0.4, 2.0).unwrap();
        let f = |x: f64| (2.0 - x) * (x * x) - 0.8;
        assert!((tp.phi_minus - bisect(f, r.phi1, r.phi2)).abs() < 1e-14);
        assert!((tp.phi_plus - bisect(f, r.phi2, 2.0)).abs() < 1e-14);
        assert!(
            r.phi1 < tp.phi_minus
                && tp.phi_minus < r.phi2
                && r.phi2 < tp.phi_plus
                && tp.phi_plus < 2.0
        );

        let bm = boundary_b_minus(0.4, 2.0).unwrap();
        let tp = turning_points(&WaveParams::new(0.4, bm, 2.0)).unwrap();
        assert_eq!(tp.phi_minus, r.phi2);
        assert_eq!(tp.phi_plus, r.phi2);

        let tp = turning_points(&WaveParams::new(0.0, -1.0, 2.0)).unwrap();
        assert_eq!(tp.phi_plus, 2.0);
        assert!((tp.phi_minus - 2f64.sqrt()).abs() < 1e-15);

        assert!(matches!(
            turning_points(&WaveParams::new(0.4, 10.0, 2.0)),
            Err(Error::NotInRegion { .. })
        ));
    }

    #[test]
    fn classification_examples() {
        let tol = DEFAULT_REGION_TOL;
        assert_eq!(
            classify(&WaveParams::new(0.4, 0.0, 2.0), tol),
            RegionClass::Interior
        );
        assert_eq!(
            classify(&WaveParams::new(0.0, -1.0, 2.0), tol),
            RegionClass::BoundaryPeaked
        );
        assert_eq!(
            classify(&WaveParams::new(0.4, 10.0, 2.0), tol),
            RegionClass::Outside
        );
        let bm = boundary_b_minus(0.4, 2.0).unwrap();
        let bp = boundary_b_plus(0.4, 2.0).unwrap();
        assert_eq!(
            classify(&WaveParams::new(0.4, bm, 2.0), tol),
            RegionClass::BoundaryConstant
        );
        assert_eq!(
            classify(&WaveParams::new(0.4, bp, 2.0), tol),
            RegionClass::BoundarySolitary
        );
        assert_eq!(
            classify(&WaveParams::new(-0.1, 0.0, 2.0), tol),
            RegionClass::Outside
        );
        assert_eq!(
            classify(&WaveParams::new(0.4, 0.0, -2.0), tol),
            RegionClass::Outside
        );
        assert_eq!(
            classify(&WaveParams::new(32.0 / 27.0, 2.0 / 3.0, 2.0), tol),
            RegionClass::BoundaryConstant
        );
    }

    #[test]
    fn scaling_examples() {
        let (al, be) = normalize_scaling(&WaveParams::new(0.4, 0.0, 2.0));
        assert!((al - 0.05).abs() < 1e-16 && be == 0.0);
        let c = 2.0;
        let (al, be) = normalize_scaling(&WaveParams::new(
            critical_value_a(c).unwrap(),
            c * c / 6.0,
            c,
        ));
        assert!((al - 4.0 / 27.0).abs() < 1e-16 && (be - 1.0 / 6.0).abs() < 1e-16);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn roots_are_strictly_ordered(s in 1e-6f64..(1.0 - 1e-6), c in 0.1f64..5.0) {
            let a = s * critical_value_a(c).unwrap();
            let r = cubic_roots(a, c).unwrap();
            prop_assert!(0.0 < r.phi1 && r.phi1 < c / 3.0 && c / 3.0 < r.phi2);
            prop_assert!(r.phi2 < c && c < r.phi3);
            for x in [r.phi1, r.phi2, r.phi3] {
                prop_assert!((x * (c - x) * (c - x) - a).abs() < 1e-12 * a);
            }
        }

        #[test]
        fn classification_is_scale_invariant(
            s in -0.2f64..1.2, t in -0.6f64..0.3, c in 0.1f64..5.0
        ) {
            let p = denormalize(s * 4.0 / 27.0, t, c);
            let (al, be) = normalize_scaling(&p);
            prop_assert!((al * c * c * c - p.a).abs() <= 1e-15 * p.a.abs().max(1e-300) * 4.0);
            let q = WaveParams::new(al, be, 1.0);
            prop_assert_eq!(classify(&p, DEFAULT_REGION_TOL), classify(&q, DEFAULT_REGION_TOL));
        }

        #[test]
        fn turning_points_solve_their_cubic(s in 0.01f64..0.99, t in 0.001f64..0.999, c in 0.5f64..3.0) {
            let a = s * critical_value_a(c).unwrap();
            let bm = boundary_b_minus(a, c).unwrap();
            let bp = boundary_b_plus(a, c).unwrap();
            let b = bm + t * (bp - bm);
            let tp = turning_points(&WaveParams::new(a, b, c)).unwrap();
            for x in [tp.phi_minus, tp.phi_plus] {
                prop_assert!(((c - x) * (2.0 * b + x * x) - 2.0 * a).abs() < 1e-12 * a.max(1.0));
            }
            prop_assert!(tp.phi_minus < tp.phi_plus && tp.phi_plus < c);
        }
    }
}
