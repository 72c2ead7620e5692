//! Falling-factorial moments of the vertex count against higher moments of
//! the missing mass, for a uniform disk and a margin-power density.

use polylab::analysis::check_extended_efron;
use polylab::experiment::report_summary;
use polylab::sampling::{DensitySpec, RngStream};
use polylab::ConvexBody;

fn main() -> polylab::Result<()> {
    let base = RngStream::new(5, 0);
    let disk = ConvexBody::unit_ball(2)?;
    let specs = [DensitySpec::uniform(disk.clone()), DensitySpec::margin_power(disk, 2.0, 0.5)?];
    let mut reports = Vec::new();
    for spec in &specs {
        for (n, q) in [(10, 1), (20, 2), (10, 3)] {
            let r = check_extended_efron(spec, n, q, 20_000, &base.fork_named(&format!("{}/{n}/{q}", spec.name())))?;
            for row in &r.rows {
                println!(
                    "{:<28} n={n:<3} q={q}  {:.5} <= {:.5}  {}",
                    spec.name(),
                    row.estimate,
                    row.bound_or_target,
                    row.label
                );
            }
            reports.push(r);
        }
    }
    print!("{}", report_summary(&reports));
    Ok(())
}
