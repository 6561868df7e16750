//! Symmetric decreasing rearrangement and the majorization order on grids.
//!
//! The rearrangement reassigns the multiset of cell masses, sorted by
//! decreasing density, to the cells of a centered hypercube sorted by
//! increasing distance from the origin. Because only the assignment
//! changes, every Rényi entropy is preserved exactly — the grid analogue
//! of rearrangement invariance of entropy.
//!
//! Majorization `f ⪯ g` compares centered-ball cumulatives of the two
//! rearrangements on the discrete radius ladder: the distances at which
//! the cumulative of a grid density can actually change.

use crate::error::{Error, Result};
use crate::grid::{DensityGrid, GridSpec};

/// Outcome of a majorization comparison.
///
/// `worst_deficit` is the largest value of `cum_f(r) - cum_g(r)` over the
/// merged radius ladder (positive means the claimed order is violated);
/// `holds` is true iff `worst_deficit <= tolerance_used`.
#[derive(Debug, Clone)]
pub struct MajorizationVerdict {
    pub holds: bool,
    pub worst_radius: f64,
    pub worst_deficit: f64,
    pub tolerance_used: f64,
}

/// Masses sorted by decreasing density, ties broken by original flat index.
fn sorted_masses_desc(f: &DensityGrid) -> Vec<f64> {
    let mut entries: Vec<(f64, usize)> = f
        .masses()
        .iter()
        .cloned()
        .enumerate()
        .filter(|&(_, m)| m > 0.0)
        .map(|(i, m)| (m, i))
        .collect();
    entries.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    entries.into_iter().map(|(m, _)| m).collect()
}

/// Smallest odd `n` with `n^dim >= cells`; odd sides put one cell center
/// exactly at the origin.
fn cube_side(cells: usize, dim: usize) -> usize {
    let mut n = 1usize;
    loop {
        if n.checked_pow(dim as u32).is_some_and(|c| c >= cells) {
            return n;
        }
        n += 2;
    }
}

/// Cells of the centered cube in rearrangement order: increasing squared
/// distance from the origin, ties by integer index with the largest index
/// first (the positive offset fills before its mirror image).
fn cube_ladder(side: usize, dim: usize) -> Vec<(i64, Vec<usize>)> {
    let c = (side as i64 - 1) / 2;
    let total = side.pow(dim as u32);
    let mut cells: Vec<(i64, Vec<usize>)> = Vec::with_capacity(total);
    let mut idx = vec![0usize; dim];
    loop {
        let d2: i64 = idx.iter().map(|&i| (i as i64 - c) * (i as i64 - c)).sum();
        cells.push((d2, idx.clone()));
        let mut k = dim;
        loop {
            if k == 0 {
                cells.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
                return cells;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < side {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Symmetric decreasing rearrangement of a grid density.
///
/// The output lives on the smallest centered hypercube (odd side) holding
/// all positive-mass cells and is radially nonincreasing up to the tie
/// rule. The density multiset is unchanged, so `renyi_entropy` agrees with
/// the input exactly at every order.
pub fn rearrange(f: &DensityGrid) -> Result<DensityGrid> {
    let total = f.total_mass();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(total));
    }
    let dim = f.dim();
    let h = f.spacing();
    let masses = sorted_masses_desc(f);
    let side = cube_side(masses.len(), dim);
    let origin = vec![-(side as f64) * h / 2.0; dim];
    let spec = GridSpec::new(origin, h, vec![side; dim])?;
    let ladder = cube_ladder(side, dim);
    let mut out = vec![0.0f64; spec.cell_count()];
    for (slot, &m) in ladder.iter().zip(&masses) {
        out[spec.multi_to_flat(&slot.1)] = m;
    }
    // Reassignment only: skip normalization to keep the multiset bit-intact.
    DensityGrid::from_masses_unchecked(spec, out)
}

/// Step function `r -> integral of f* over the centered ball of radius r`,
/// right-continuous, carried on the discrete radius ladder.
pub(crate) struct CumulativeProfile {
    /// Distinct ladder radii, ascending.
    radii: Vec<f64>,
    /// Cumulative rearranged mass at each ladder radius.
    cum: Vec<f64>,
}

impl CumulativeProfile {
    pub(crate) fn build(f: &DensityGrid) -> Result<Self> {
        let total = f.total_mass();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(total));
        }
        let dim = f.dim();
        let h = f.spacing();
        let masses = sorted_masses_desc(f);
        let side = cube_side(masses.len(), dim);
        // Distances only; the tie rule cannot affect sums over full shells.
        let c = (side as i64 - 1) / 2;
        let mut d2s: Vec<i64> = Vec::with_capacity(side.pow(dim as u32));
        let mut idx = vec![0usize; dim];
        'walk: loop {
            let d2: i64 = idx.iter().map(|&i| (i as i64 - c) * (i as i64 - c)).sum();
            d2s.push(d2);
            let mut k = dim;
            loop {
                if k == 0 {
                    break 'walk;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < side {
                    break;
                }
                idx[k] = 0;
            }
        }
        d2s.sort_unstable();
        // Cap at 1: the input is normalized, so any overshoot is summation
        // round-off, and letting it through would fake majorization deficits
        // against exactly-1 cumulatives (e.g. a point mass).
        let mut prefix = vec![0.0f64; masses.len() + 1];
        for (i, &m) in masses.iter().enumerate() {
            prefix[i + 1] = (prefix[i] + m).min(1.0);
        }
        let mut radii = Vec::new();
        let mut cum = Vec::new();
        let mut i = 0usize;
        while i < d2s.len() {
            let d2 = d2s[i];
            let mut j = i;
            while j < d2s.len() && d2s[j] == d2 {
                j += 1;
            }
            radii.push((d2 as f64).sqrt() * h);
            cum.push(prefix[j.min(masses.len())]);
            i = j;
        }
        Ok(CumulativeProfile { radii, cum })
    }

    /// Value at radius `r` (cells with center distance <= r).
    pub(crate) fn at(&self, r: f64) -> f64 {
        match self.radii.partition_point(|&x| x <= r) {
            0 => 0.0,
            k => self.cum[k - 1],
        }
    }

    pub(crate) fn radii(&self) -> &[f64] {
        &self.radii
    }
}

/// Mass of the rearrangement of `f` inside the centered ball of radius `r`;
/// equivalently the largest mass any cell set of matching cardinality can
/// capture (greedy by density). Nondecreasing and right-continuous in `r`,
/// tending to 1.
pub fn ball_cumulative(f: &DensityGrid, r: f64) -> Result<f64> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    Ok(CumulativeProfile::build(f)?.at(r))
}

/// Does `g` majorize `f`? True when every centered-ball cumulative of the
/// rearranged `f` stays below that of `g`, up to `tolerance`, across the
/// merged radius ladder of both grids.
pub fn majorizes(g: &DensityGrid, f: &DensityGrid, tolerance: f64) -> Result<MajorizationVerdict> {
    if f.dim() != g.dim() {
        return Err(Error::IncompatibleGrids(format!(
            "dim {} vs {}",
            f.dim(),
            g.dim()
        )));
    }
    if ((f.spacing() - g.spacing()) / f.spacing()).abs() > 1e-12 {
        return Err(Error::IncompatibleGrids(format!(
            "spacing {} vs {}",
            f.spacing(),
            g.spacing()
        )));
    }
    let pf = CumulativeProfile::build(f)?;
    let pg = CumulativeProfile::build(g)?;
    let mut ladder: Vec<f64> = pf.radii().iter().chain(pg.radii()).cloned().collect();
    ladder.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ladder.dedup();
    let mut worst_deficit = f64::NEG_INFINITY;
    let mut worst_radius = 0.0;
    for &r in &ladder {
        let deficit = pf.at(r) - pg.at(r);
        if deficit > worst_deficit {
            worst_deficit = deficit;
            worst_radius = r;
        }
    }
    Ok(MajorizationVerdict {
        holds: worst_deficit <= tolerance,
        worst_radius,
        worst_deficit,
        tolerance_used: tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::rng::CounterRng;

    fn grid_1d(masses: Vec<f64>, h: f64, origin: f64) -> DensityGrid {
        let spec = GridSpec::new(vec![origin], h, vec![masses.len()]).unwrap();
        DensityGrid::from_masses(spec, masses).unwrap()
    }

    #[test]
    fn sorts_three_cells_per_tie_rule() {
        // Masses (0.1, 0.7, 0.2) at centers (-1, 0, 1)*h: the peak goes to
        // the origin, the runner-up to +h, the smallest to -h.
        let h = 1.0;
        let f = grid_1d(vec![0.1, 0.7, 0.2], h, -1.5);
        let r = rearrange(&f).unwrap();
        assert_eq!(r.spec().shape, vec![3]);
        let center = |i: usize| r.spec().cell_center(&[i])[0];
        assert!((center(1)).abs() < 1e-12);
        assert!((center(0) + h).abs() < 1e-12);
        assert!((center(2) - h).abs() < 1e-12);
        assert_eq!(r.masses(), &[0.1, 0.7, 0.2]);
    }

    #[test]
    fn radially_decreasing_grid_is_a_fixed_point() {
        // An odd-sided centered Gaussian: rearranging permutes cells only
        // within equal-distance shells, leaving the mass multiset intact.
        let spec = GridSpec::new(vec![-4.015], 8.03 / 321.0, vec![321]).unwrap();
        let f = DensityGrid::from_fn(spec, |x| (-0.5 * x[0] * x[0]).exp()).unwrap();
        let r = rearrange(&f).unwrap();
        assert_eq!(r.spec().shape, f.spec().shape);
        let mut a: Vec<f64> = f.masses().to_vec();
        let mut b: Vec<f64> = r.masses().to_vec();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(a, b, "density multiset must be unchanged");
        // Radially nonincreasing shell-wise: inner shells dominate outer
        // ones; within a shell only the tie rule orders cells.
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
            assert!(w[0].0 >= w[1].1, "inner min {} < outer max {}", w[0].0, w[1].1);
        }
    }

    #[test]
    fn translated_square_becomes_centered_quasi_disk() {
        let f = DensityGrid::uniform_box(&[5.0, 7.0], &[6.0, 8.0], 24).unwrap();
        let r = rearrange(&f).unwrap();
        assert_eq!(r.support_cells(), f.support_cells());
        // Output cube is centered at the origin.
        let up = r.spec().upper();
        for (o, u) in r.spec().origin.iter().zip(up) {
            assert!((o + u).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_preserved_bit_exactly() {
        let rng = CounterRng::new(99, 0);
        for trial in 0..25u64 {
            let dim = 1 + (trial % 3) as usize;
            let side = [40usize, 9, 5][dim - 1];
            let spec = GridSpec::new(vec![0.37; dim], 0.21, vec![side; dim]).unwrap();
            let n = spec.cell_count();
            let mass: Vec<f64> = (0..n)
                .map(|i| rng.f64_at(trial * 4096 + i as u64, 3))
                .collect();
            let f = DensityGrid::from_masses(spec, mass).unwrap();
            let r = rearrange(&f).unwrap();
            for alpha in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
                assert_eq!(
                    f.renyi_entropy(alpha).unwrap().to_bits(),
                    r.renyi_entropy(alpha).unwrap().to_bits(),
                    "alpha {alpha} trial {trial}"
                );
            }
        }
    }

    #[test]
    fn cumulative_basics() {
        let f = grid_1d(vec![0.25; 4], 0.25, 0.0); // uniform on [0,1]
        assert!((ball_cumulative(&f, 10.0).unwrap() - 1.0).abs() < 1e-12);
        // Half the mass sits within r = 0.25 of the center, +- one cell.
        let c = ball_cumulative(&f, 0.25).unwrap();
        assert!((c - 0.5).abs() <= 0.25 + 1e-12, "cumulative {c}");
        // Point mass: everything within any positive radius.
        let p = grid_1d(vec![1.0], 0.5, 3.0);
        assert!((ball_cumulative(&p, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(ball_cumulative(&p, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn cumulative_monotone_in_radius() {
        let rng = CounterRng::new(7, 1);
        let spec = GridSpec::new(vec![-1.0, -1.0], 0.2, vec![10, 10]).unwrap();
        let mass: Vec<f64> = (0..100).map(|i| rng.f64_at(i as u64, 0)).collect();
        let f = DensityGrid::from_masses(spec, mass).unwrap();
        let profile = CumulativeProfile::build(&f).unwrap();
        let mut last = 0.0;
        for &r in profile.radii() {
            let c = profile.at(r);
            assert!(c >= last - 1e-15);
            // Right continuity: just above r the ladder value persists.
            assert!((profile.at(r + 1e-9) - c).abs() < 1e-15);
            last = c;
        }
        assert!((last - 1.0).abs() < 1e-12);
    }

    #[test]
    fn majorization_reflexive_and_point_mass_dominates() {
        let f = DensityGrid::gaussian(&[0.0], &[1.0], 256).unwrap();
        let v = majorizes(&f, &f, 0.0).unwrap();
        assert!(v.holds);
        assert!(v.worst_deficit <= 0.0);

        let p = grid_1d(vec![1.0], f.spacing(), 0.0);
        let v = majorizes(&p, &f, 0.0).unwrap();
        assert!(v.holds, "point mass majorizes everything");
    }

    #[test]
    fn interval_pair_orders_and_reverses() {
        let h = 1.0 / 64.0;
        let f = grid_1d(vec![1.0 / 128.0; 128], h, 0.0); // uniform [0,2]
        let g = grid_1d(vec![1.0 / 64.0; 64], h, 0.0); // uniform [0,1]
        let ok = majorizes(&g, &f, 0.0).unwrap();
        assert!(ok.holds, "deficit {}", ok.worst_deficit);
        assert!(ok.worst_deficit <= 0.0);
        let rev = majorizes(&f, &g, 0.0).unwrap();
        assert!(!rev.holds);
        // Interval cumulative oracle: deficit peaks at ~0.5 near r = 1/2.
        assert!(
            (rev.worst_deficit - 0.5).abs() < 0.05,
            "worst {}",
            rev.worst_deficit
        );
    }

    #[test]
    fn majorization_reverses_entropy_order() {
        let h = 1.0 / 64.0;
        let f = grid_1d(vec![1.0 / 128.0; 128], h, 0.0);
        let g = grid_1d(vec![1.0 / 64.0; 64], h, 0.0);
        assert!(majorizes(&g, &f, 0.0).unwrap().holds);
        for alpha in [0.5, 1.0, 2.0, 5.0, f64::INFINITY] {
            let hf = f.renyi_entropy(alpha).unwrap();
            let hg = g.renyi_entropy(alpha).unwrap();
            assert!(hf >= hg - 1e-12, "alpha {alpha}: {hf} vs {hg}");
        }
        // Convex-integral comparison with phi(x) = x^2: integral of f^2
        // must not exceed integral of g^2.
        let int2 = |d: &DensityGrid| {
            let hd = d.spacing().powi(d.dim() as i32);
            d.masses().iter().map(|&m| m * m / hd).sum::<f64>()
        };
        assert!(int2(&f) <= int2(&g) + 1e-12);
    }

    #[test]
    fn spacing_mismatch_is_rejected() {
        let f = grid_1d(vec![0.5, 0.5], 1.0, 0.0);
        let g = grid_1d(vec![0.5, 0.5], 0.5, 0.0);
        assert!(matches!(
            majorizes(&f, &g, 0.0),
            Err(Error::IncompatibleGrids(_))
        ));
    }
}
