//! Efron's identity on the triangle, the square and the disk at n = 3.

use polylab::analysis::check_efron;
use polylab::experiment::report_summary;
use polylab::sampling::{DensitySpec, RngStream};
use polylab::ConvexBody;

fn main() -> polylab::Result<()> {
    let base = RngStream::new(4, 0);
    let bodies = [
        ("triangle", ConvexBody::standard_simplex(2)?, Some(11.0 / 12.0)),
        ("square", ConvexBody::unit_cube(2)?, Some(1.0 - 11.0 / 144.0)),
        ("disk", ConvexBody::unit_ball(2)?, Some(1.0 - 35.0 / (48.0 * std::f64::consts::PI.powi(2)))),
    ];
    let mut reports = Vec::new();
    for (name, body, exact) in bodies {
        let r = check_efron(&DensitySpec::uniform(body), 3, 100_000, 0, &base.fork_named(name))?;
        println!(
            "{name:<9} E[1 - mu(K_3)] = {:.5}, E[R_4]/4 = {:.5}, closed form {:.5}",
            r.statistics["missing_mass"].value,
            r.statistics["vertex_ratio"].value,
            exact.unwrap_or(f64::NAN)
        );
        reports.push(r);
    }
    print!("{}", report_summary(&reports));
    Ok(())
}
