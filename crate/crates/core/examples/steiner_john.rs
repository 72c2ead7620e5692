//! Steiner constants of the unit ball, the Hausdorff-to-volume domination
//! they imply, and analytic John ellipsoids.

use polylab::analysis::check_hausdorff_domination;
use polylab::geometry::{john_ellipsoid_analytic, steiner_ball_constants};
use polylab::sampling::RngStream;
use polylab::ConvexBody;

fn main() -> polylab::Result<()> {
    for d in 2..=5 {
        let s = steiner_ball_constants(d);
        println!(
            "d={d}: L = {:?}  alpha1 {:.3}  alpha2 {:.3}  excess(0.1) {:.5}",
            s.coefficients.iter().map(|l| (l * 1e4).round() / 1e4).collect::<Vec<_>>(),
            s.alpha1,
            s.alpha2,
            s.excess_volume(0.1)
        );
    }

    let r = check_hausdorff_domination(2, 200, 20, 5000, &RngStream::new(11, 0))?;
    println!(
        "domination in B_2: {} violations, max |G sym-diff H| / (alpha1 d_H) = {:.4}",
        r.statistics["violations"].value, r.statistics["max_ratio_to_bound"].value
    );

    for body in [ConvexBody::standard_simplex(2)?, ConvexBody::cuboid(vec![0.0, 0.0], vec![4.0, 1.0])?] {
        let (centre, shape) = john_ellipsoid_analytic(&body)?;
        let rows: Vec<Vec<f64>> =
            shape.row_iter().map(|r| r.iter().map(|v| (v * 1e4).round() / 1e4).collect()).collect();
        println!("{} John ellipsoid: centre {:?}, shape rows {:?}", body.kind_name(), centre.coords(), rows);
    }
    Ok(())
}
