//! Power-law rates of the missing volume and the vertex count on a
//! geometric grid of sample sizes, with one shared set of replicates.

use polylab::analysis::{default_mode, evaluate_rate, geometric_grid, rate_study, RateQuantity};
use polylab::sampling::{DensitySpec, RngStream};
use polylab::ConvexBody;

fn main() -> polylab::Result<()> {
    let grid = geometric_grid(32, 2048, 2)?;
    let base = RngStream::new(7, 0);
    for (name, body) in [("disk", ConvexBody::unit_ball(2)?), ("square", ConvexBody::unit_cube(2)?)] {
        let spec = DensitySpec::uniform(body);
        let study = rate_study(&spec, &grid, 500, 0, &base.fork_named(name))?;
        for (quantity, q) in
            [(RateQuantity::VolumeFraction, 1.0), (RateQuantity::VertexCount, 1.0), (RateQuantity::VertexCount, 2.0)]
        {
            let (fit, report) = evaluate_rate(&study, &spec, quantity, q, default_mode(&spec), base)?;
            println!(
                "{name:<6} {:<10} exponent {:>7.4} +- {:.4}  target {:>7.4}  r2 {:.4}  {}",
                fit.label,
                fit.exponent,
                fit.exponent_stderr,
                report.statistics["target"].value,
                fit.r_squared,
                if report.pass { "PASS" } else { "FAIL" }
            );
        }
        println!("{name:<6} n_grid {:?}", study.n_grid);
    }
    Ok(())
}
