//! Among bounded densities on the disk, none grows more vertices than the
//! uniform law: vertex-count exponents against the uniform rate.

use polylab::analysis::{check_worst_case_uniform, geometric_grid};
use polylab::sampling::{DensitySpec, RngStream};
use polylab::ConvexBody;

fn main() -> polylab::Result<()> {
    let disk = ConvexBody::unit_ball(2)?;
    let roster = [
        DensitySpec::margin_power(disk.clone(), 1.0, 1.0)?,
        DensitySpec::margin_power(disk.clone(), 2.0, 0.5)?,
        DensitySpec::projection(ConvexBody::unit_ball(3)?, 2)?,
    ];
    let grid = geometric_grid(64, 1024, 2)?;
    let r = check_worst_case_uniform(&disk, &roster, &grid, 400, &RngStream::new(12, 0))?;
    println!("uniform reference exponent {:.4}", r.statistics["exponent/uniform/ball"].value);
    for row in &r.rows {
        println!(
            "{:<60} {:>8.4} vs {:>8.4}  {}",
            row.label,
            row.estimate,
            row.bound_or_target,
            if row.pass { "ok" } else { "FAIL" }
        );
    }
    println!(
        "{}",
        if r.pass { "no density beat the uniform rate" } else { "a roster density exceeded the uniform rate" }
    );
    Ok(())
}
