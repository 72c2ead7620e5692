//! The missing-volume fraction is affine invariant: compare its law in a
//! triangle and in increasingly sheared images, each arm on its own stream.

use polylab::analysis::check_affine_invariance;
use polylab::geometry::AffineMap;
use polylab::sampling::RngStream;
use polylab::ConvexBody;

fn main() -> polylab::Result<()> {
    let triangle = ConvexBody::standard_simplex(2)?;
    let base = RngStream::new(9, 0);
    for condition in [1.0, 10.0, 100.0, 1000.0] {
        let arms = base.fork(condition as u64);
        let t = AffineMap::random_shear(2, condition, &mut arms.fork_named("map").rng())?;
        let r = check_affine_invariance(&triangle, &t, 50, 4000, &arms)?;
        let s = |k: &str| r.statistics[k].value;
        println!(
            "condition {:>7.1}  means {:.5} / {:.5}  KS D {:.4}  p {:.3}",
            t.condition_number(),
            s("mean_original"),
            s("mean_image"),
            s("ks_statistic"),
            s("p_value")
        );
    }
    Ok(())
}
