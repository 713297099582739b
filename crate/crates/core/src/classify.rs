//! Turns observed family-polynomial values into certified statements about
//! multipartite nonlocal content: an upper bound on the number of groups a
//! classical model may use and a lower bound on the number of parties that
//! must broadcast their input.

use crate::error::{Error, Result};
use crate::exact::Radical2;
use crate::poly::{algebraic_bound, model_bound, PolyKind};
use serde::{Deserialize, Serialize};

/// Certificate extracted from observed violations of |S_n^m| <= 2^((n-m)/2).
///
/// `max_groups` is the largest m for which the observed correlations are
/// still reproducible in the grouping model; `min_broadcasters` = n -
/// max_groups is the matching lower bound for the broadcasting model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlocalityCertificate {
    pub n: usize,
    pub value_m: Option<f64>,
    pub value_mplus: Option<f64>,
    pub max_groups: usize,
    pub min_broadcasters: usize,
    /// Group counts m whose model bound the supplied values exceed.
    pub violated_levels: Vec<usize>,
}

/// Tests the supplied values against every model bound.
///
/// For each m from n down to 1 the parity-matching value (M_n when n-m is
/// even, M+_n when odd) is compared strictly against 2^((n-m)/2) plus the
/// margin; values exactly at a bound certify nothing. `max_groups` is one
/// below the smallest violated level, or n when nothing is violated.
pub fn classify(
    n: usize,
    value_m: Option<f64>,
    value_mplus: Option<f64>,
    margin: f64,
) -> Result<NonlocalityCertificate> {
    if n == 0 {
        return Err(Error::InvalidPartyCount(0));
    }
    if value_m.is_none() && value_mplus.is_none() {
        return Err(Error::NoValueSupplied);
    }
    if !margin.is_finite() || margin < 0.0 {
        return Err(Error::InvalidArgument(format!("margin {margin} must be nonnegative")));
    }
    for (value, kind) in [(value_m, PolyKind::M), (value_mplus, PolyKind::MPlus)] {
        if let Some(v) = value {
            let bound = algebraic_bound(kind, n)?.to_f64();
            if !v.is_finite() || v.abs() > bound {
                return Err(Error::UnphysicalValue { value: v, bound });
            }
        }
    }

    let mut violated_levels = Vec::new();
    for m in (1..=n).rev() {
        let value = if (n - m) % 2 == 0 { value_m } else { value_mplus };
        let Some(v) = value else { continue };
        let bound = model_bound(n, m)?.to_f64();
        if v.abs() > bound + margin {
            violated_levels.push(m);
        }
    }
    violated_levels.sort_unstable();
    let max_groups = violated_levels.first().map_or(n, |&m| m - 1);
    Ok(NonlocalityCertificate {
        n,
        value_m,
        value_mplus,
        max_groups,
        min_broadcasters: n - max_groups,
        violated_levels,
    })
}

/// GHZ entanglement threshold for the m-group bound:
/// theta_c = arcsin(2^(-(m-1)/2)) / 2, independent of the party count.
pub fn theta_critical(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::GroupCountOutOfRange { n: 0, m });
    }
    let level = Radical2::pow2_half(-(m as i32 - 1)).to_f64();
    Ok(0.5 * level.asin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn strong_m_violation_forces_single_group() {
        // n=4: M_4 = 2^1.5 violates the m=2 bound (2), M+ not supplied
        let cert = classify(4, Some(2f64.powf(1.5)), None, 0.0).unwrap();
        assert_eq!(cert.max_groups, 1);
        assert_eq!(cert.min_broadcasters, 3);
        assert_eq!(cert.violated_levels, vec![2, 4]);
    }

    #[test]
    fn weak_value_certifies_only_the_local_level() {
        // n=3: M+ = 1.1 is below sqrt(2) so it certifies nothing alone
        let cert = classify(3, None, Some(1.1), 0.0).unwrap();
        assert_eq!(cert.max_groups, 3);
        assert_eq!(cert.min_broadcasters, 0);
        // adding M = 1.1 > 1 violates the m=3 (local) level
        let cert = classify(3, Some(1.1), Some(1.1), 0.0).unwrap();
        assert_eq!(cert.max_groups, 2);
        assert_eq!(cert.min_broadcasters, 1);
        assert_eq!(cert.violated_levels, vec![3]);
    }

    #[test]
    fn values_at_bounds_certify_nothing() {
        let cert = classify(4, Some(1.0), Some(2f64.sqrt()), 0.0).unwrap();
        assert_eq!(cert.max_groups, 4);
        assert_eq!(cert.min_broadcasters, 0);
        assert!(cert.violated_levels.is_empty());
    }

    #[test]
    fn classify_inverts_the_bound_grid() {
        // value = 2^((n-m)/2) + eps violates exactly the levels >= m with
        // matching parity
        for n in 1..=6usize {
            for m in 1..=n {
                let v = crate::poly::model_bound(n, m).unwrap().to_f64() + 1e-9;
                let (vm, vp) = if (n - m) % 2 == 0 { (Some(v), None) } else { (None, Some(v)) };
                let bound_ok = v <= crate::poly::algebraic_bound(
                    if (n - m) % 2 == 0 { PolyKind::M } else { PolyKind::MPlus },
                    n,
                )
                .unwrap()
                .to_f64();
                if !bound_ok {
                    continue;
                }
                let cert = classify(n, vm, vp, 0.0).unwrap();
                assert_eq!(cert.max_groups, m - 1, "n={n} m={m}");
                let expected: Vec<usize> =
                    (m..=n).filter(|mm| (n - mm) % 2 == (n - m) % 2).collect();
                assert_eq!(cert.violated_levels, expected, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn monotonicity_in_observed_value() {
        let mut prev_groups = usize::MAX;
        for v in [1.0f64, 1.2, 1.5, 2.1, 2.9, 3.9] {
            let cert = classify(5, Some(v.min(4.0)), None, 0.0).unwrap();
            assert!(cert.max_groups <= prev_groups);
            prev_groups = cert.max_groups;
        }
    }

    #[test]
    fn margin_shifts_the_threshold() {
        let v = 1.05;
        assert_eq!(classify(3, Some(v), None, 0.0).unwrap().max_groups, 2);
        assert_eq!(classify(3, Some(v), None, 0.1).unwrap().max_groups, 3);
    }

    #[test]
    fn unphysical_values_rejected() {
        assert!(matches!(
            classify(3, Some(2.5), None, 0.0),
            Err(Error::UnphysicalValue { .. })
        ));
        assert!(matches!(classify(3, None, None, 0.0), Err(Error::NoValueSupplied)));
        assert!(matches!(classify(0, Some(1.0), None, 0.0), Err(Error::InvalidPartyCount(0))));
    }

    /// Feeding the conjectured GHZ maxima just above theta_c(m) certifies
    /// at most m-1 groups; just below leaves at least m possible.
    #[test]
    fn certificates_flip_at_the_critical_angle() {
        let delta = 1e-3;
        for n in 3..=6usize {
            for m in 1..=n {
                let tc = theta_critical(m).unwrap();
                let conjectured = |theta: f64| -> (f64, f64) {
                    let rising = 2f64.powf((n as f64 - 1.0) / 2.0) * (2.0 * theta).sin();
                    (rising.max(1.0), rising.max(2f64.sqrt()))
                };
                if tc + delta <= PI / 4.0 {
                    let (vm, vp) = conjectured(tc + delta);
                    let cert = classify(n, Some(vm), Some(vp), 0.0).unwrap();
                    assert!(cert.max_groups <= m - 1, "n={n} m={m} above: {cert:?}");
                }
                if tc - delta > 0.0 {
                    let (vm, vp) = conjectured(tc - delta);
                    let cert = classify(n, Some(vm), Some(vp), 0.0).unwrap();
                    assert!(cert.max_groups >= m, "n={n} m={m} below: {cert:?}");
                }
            }
        }
    }

    #[test]
    fn critical_angles() {
        assert!((theta_critical(1).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((theta_critical(2).unwrap() - PI / 8.0).abs() < 1e-15);
        assert!((theta_critical(3).unwrap() - PI / 12.0).abs() < 1e-12);
        assert!(theta_critical(0).is_err());
    }
}
