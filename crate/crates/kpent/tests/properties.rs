//! Property tests over the public API.

use kpent::ballgeom::lens_area;
use kpent::convolve::{convolve, convolve_direct, max_cell_difference};
use kpent::diversity::{diversity2_discrete, renyi_gap_bound};
use kpent::grid::{DensityGrid, GridSpec};
use kpent::rearrange::{ball_cumulative, rearrange};
use proptest::prelude::*;

fn mass_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n..=n).prop_filter("some mass", |v| {
        v.iter().sum::<f64>() > 1e-6
    })
}

fn grid_1d(masses: Vec<f64>, h: f64, origin: f64) -> DensityGrid {
    let spec = GridSpec::new(vec![origin], h, vec![masses.len()]).unwrap();
    DensityGrid::from_masses(spec, masses).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Rényi entropy is nonincreasing in the order.
    #[test]
    fn entropy_monotone_in_order(masses in mass_vec(32), h in 0.05f64..2.0) {
        let g = grid_1d(masses, h, -1.0);
        let alphas = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, f64::INFINITY];
        let hs: Vec<f64> = alphas.iter().map(|&a| g.renyi_entropy(a).unwrap()).collect();
        for w in hs.windows(2) {
            prop_assert!(w[0] >= w[1] - 1e-12, "{:?}", hs);
        }
    }

    /// Moving the lattice never moves an entropy.
    #[test]
    fn entropy_translation_invariant(masses in mass_vec(24), shift in -100.0f64..100.0) {
        let g = grid_1d(masses, 0.3, 0.0);
        let t = g.translated(&[shift]).unwrap();
        for alpha in [0.5, 1.0, 3.0] {
            prop_assert_eq!(
                g.renyi_entropy(alpha).unwrap().to_bits(),
                t.renyi_entropy(alpha).unwrap().to_bits()
            );
        }
    }

    /// Convolution conserves mass and matches the quadratic oracle.
    #[test]
    fn convolution_mass_and_oracle(a in mass_vec(12), b in mass_vec(9)) {
        let f = grid_1d(a, 0.5, -1.0);
        let g = grid_1d(b, 0.5, 2.0);
        let fast = convolve(&f, &g).unwrap();
        prop_assert!((fast.total_mass() - 1.0).abs() < 1e-12);
        let direct = convolve_direct(&f, &g).unwrap();
        let diff = max_cell_difference(&direct, &fast).unwrap();
        prop_assert!(diff <= 1e-12 * direct.max_mass(), "diff {diff:.3e}");
    }

    /// Rearrangement preserves the entropy ladder bit-for-bit and sorts
    /// masses radially.
    #[test]
    fn rearrangement_is_entropy_neutral(masses in mass_vec(27)) {
        let f = grid_1d(masses, 0.21, 4.0);
        let r = rearrange(&f).unwrap();
        for alpha in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
            prop_assert_eq!(
                f.renyi_entropy(alpha).unwrap().to_bits(),
                r.renyi_entropy(alpha).unwrap().to_bits()
            );
        }
        // Radially nonincreasing shell-wise: every mass at distance d must
        // dominate every mass strictly farther out. Within one shell the
        // tie rule, not size, fixes the order.
        let h = r.spacing();
        let mut shells: std::collections::BTreeMap<i64, (f64, f64)> = Default::default();
        for (i, &m) in r.masses().iter().enumerate() {
            let j = (r.spec().cell_center_flat(i)[0] / h).round() as i64;
            let e = shells.entry(j.abs()).or_insert((f64::INFINITY, 0.0));
            e.0 = e.0.min(m);
            e.1 = e.1.max(m);
        }
        let ordered: Vec<(f64, f64)> = shells.into_values().collect();
        for w in ordered.windows(2) {
            prop_assert!(w[0].0 >= w[1].1, "inner shell min {} < outer shell max {}", w[0].0, w[1].1);
        }
    }

    /// Centered-ball cumulatives are nondecreasing in the radius and cap
    /// at the total mass.
    #[test]
    fn cumulative_monotone(masses in mass_vec(20), r1 in 0.01f64..3.0, r2 in 0.01f64..3.0) {
        let f = grid_1d(masses, 0.25, -2.0);
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let c_lo = ball_cumulative(&f, lo).unwrap();
        let c_hi = ball_cumulative(&f, hi).unwrap();
        prop_assert!(c_lo <= c_hi + 1e-15);
        prop_assert!(c_hi <= 1.0 + 1e-12);
    }

    /// Order-2 diversity of an m-point law sits in [1, m] and grows with t.
    #[test]
    fn diversity_range_and_monotonicity(
        raw in prop::collection::vec(0.05f64..1.0, 2..6),
        t1 in 0.01f64..10.0,
        t2 in 0.01f64..10.0,
    ) {
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let points: Vec<Vec<f64>> = (0..weights.len())
            .map(|i| vec![i as f64 * 0.8, (i as f64).sin()])
            .collect();
        let m = weights.len() as f64;
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let d_lo = diversity2_discrete(&weights, &points, lo).unwrap();
        let d_hi = diversity2_discrete(&weights, &points, hi).unwrap();
        prop_assert!(d_lo >= 1.0 - 1e-12 && d_hi <= m + 1e-12);
        prop_assert!(d_lo <= d_hi + 1e-12);
    }

    /// The two-disk lens area interpolates between the full disk and zero,
    /// decreasing in the center distance.
    #[test]
    fn lens_area_monotone(d1 in 0.0f64..3.0, d2 in 0.0f64..3.0, r in 0.1f64..2.0) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let a_lo = lens_area(lo, r);
        let a_hi = lens_area(hi, r);
        prop_assert!(a_lo >= a_hi);
        prop_assert!(a_lo <= std::f64::consts::PI * r * r + 1e-12);
        prop_assert!(a_hi >= 0.0);
    }

    /// The Rényi comparison overhead is nonnegative and vanishes only at
    /// order two.
    #[test]
    fn gap_bound_nonnegative(alpha in 0.05f64..8.0) {
        let b = renyi_gap_bound(alpha).unwrap();
        prop_assert!(b >= -1e-12, "bound {b} at alpha {alpha}");
        if (alpha - 2.0).abs() > 0.05 {
            prop_assert!(b > 0.0, "bound {b} should be positive away from 2 (alpha {alpha})");
        }
    }
}
