//! Point-to-polytope projection and the Hausdorff distance between two
//! random polytopes.

use polylab::geometry::{hausdorff_distance, project, PROJECTION_TOLERANCE};
use polylab::sampling::{sample_uniform, RngStream};
use polylab::{ConvexBody, Polytope};

fn main() -> polylab::Result<()> {
    let square = ConvexBody::unit_cube(2)?;
    let base = RngStream::new(2, 0);
    let p = Polytope::hull(&sample_uniform(&square, 40, &base.stream(0))?)?;
    let q = Polytope::hull(&sample_uniform(&square, 400, &base.stream(1))?)?;

    for x in [[0.5, 0.5], [2.0, 0.5], [-1.0, -1.0], [0.5, 1.3]] {
        let proj = project(&x, &p, PROJECTION_TOLERANCE)?;
        println!(
            "x = {x:?}: distance {:.6} (gap <= {:.1e}), nearest ({:.4}, {:.4})",
            proj.distance, proj.gap_bound, proj.nearest[0], proj.nearest[1]
        );
    }
    println!("d_H(K_40, K_400) = {:.6}", hausdorff_distance(&p, &q, PROJECTION_TOLERANCE)?);
    println!(
        "d_H(K_40, square) = {:.6}",
        hausdorff_distance(&p, &square.as_polytope().unwrap(), PROJECTION_TOLERANCE)?
    );
    Ok(())
}
