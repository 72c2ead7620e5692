//! Convex hull of uniform points in the 3-ball: vertex count, facets,
//! volume and surface area as the sample grows.

use polylab::sampling::{sample_uniform, RngStream};
use polylab::{ConvexBody, Polytope};

fn main() -> polylab::Result<()> {
    let ball = ConvexBody::unit_ball(3)?;
    let points = sample_uniform(&ball, 4096, &RngStream::new(1, 0))?;
    println!("{:>6} {:>8} {:>8} {:>10} {:>10}", "n", "vertices", "facets", "volume", "area");
    for n in [16, 64, 256, 1024, 4096] {
        let hull = Polytope::hull(&points.prefix(n))?;
        println!(
            "{n:>6} {:>8} {:>8} {:>10.5} {:>10.5}",
            hull.vertex_count(),
            hull.facets().len(),
            hull.volume()?,
            hull.surface_area()
        );
    }
    println!("ball   {:>28.5} {:>10.5}", ball.volume(), ball.surface_area_bound());
    Ok(())
}
