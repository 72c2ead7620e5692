//! Projections of high-dimensional balls: the image density near the
//! boundary and a chi-square test of the radial law.

use polylab::analysis::check_projection_density;
use polylab::sampling::{DensitySpec, RngStream};
use polylab::ConvexBody;

fn main() -> polylab::Result<()> {
    let base = RngStream::new(10, 0);
    for (big_d, d) in [(3, 2), (4, 2), (5, 3)] {
        let source = ConvexBody::unit_ball(big_d)?;
        let spec = DensitySpec::projection(source.clone(), d)?;
        let r = check_projection_density(&source, d, 200_000, &base.fork(big_d as u64 * 10 + d as u64))?;
        println!(
            "B_{big_d} -> R^{d}: gamma {}  c {:.5}  M {:.5}  chi2 p {:.3}  {}",
            r.statistics["gamma"].value,
            r.statistics["c"].value,
            spec.bound_m(),
            r.statistics["chi2_p_value"].value,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(())
}
