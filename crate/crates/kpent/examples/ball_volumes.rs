//! Monte Carlo volumes of unions and intersections of congruent balls,
//! the exact two-disk lens oracle, and the contraction checks.

use kpent::ballgeom::{
    intersection_volume, kp_intersection_check, kp_union_check, lens_area, union_volume, McParams,
    PointConfiguration,
};
use kpent::contract::ContractionSpec;
use kpent::linalg::Mat;

fn main() -> kpent::Result<()> {
    let mc = McParams::fixed(1_000_000, 2024);

    // Two unit disks one apart: every value has a closed form.
    let pair = PointConfiguration::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]], 1.0)?;
    let lens = lens_area(1.0, 1.0);
    let union = union_volume(&pair, &mc)?;
    let inter = intersection_volume(&pair, &mc)?;
    println!("two unit disks, centers 1 apart:");
    println!(
        "  union        = {:.5} +- {:.5}  (exact {:.5})",
        union.value,
        union.stderr,
        2.0 * std::f64::consts::PI - lens
    );
    println!(
        "  intersection = {:.5} +- {:.5}  (exact {:.5})",
        inter.value, inter.stderr, lens
    );
    println!(
        "  inclusion-exclusion: union + intersection = {:.5} (2 pi = {:.5})",
        union.value + inter.value,
        2.0 * std::f64::consts::PI
    );

    // Determinism: the same seed reproduces the estimate bit for bit.
    let again = union_volume(&pair, &mc)?;
    assert_eq!(union, again);
    println!("  same seed, same estimate: ok");

    // Contraction checks on a five-ball configuration.
    let x = PointConfiguration::new(
        vec![
            vec![0.0, 0.0],
            vec![1.6, 0.2],
            vec![0.4, 1.4],
            vec![-1.2, 0.8],
            vec![-0.6, -1.3],
        ],
        1.0,
    )?;
    let th = 0.6f64;
    let rot = Mat::from_rows(&[vec![th.cos(), -th.sin()], vec![th.sin(), th.cos()]])?;
    let t = ContractionSpec::linear(rot.scale(0.7))?;

    println!();
    println!("contracting five balls by a scaled rotation:");
    let u = kp_union_check(&x, &t, &mc)?;
    println!(
        "  union:        {:.5} <= {:.5}  margin {:+.5}  pass {}",
        u.lhs, u.rhs, u.margin, u.pass
    );
    let i = kp_intersection_check(&x, &t, &mc)?;
    println!(
        "  intersection: {:.5} <= {:.5}  margin {:+.5}  pass {}",
        i.lhs, i.rhs, i.margin, i.pass
    );
    Ok(())
}
