//! Upper tail of the scaled, centred missing volume at n = 512, with the
//! log-survival fit used to judge exponential decay.

use polylab::analysis::check_deviation_tail;
use polylab::sampling::{DensitySpec, RngStream};
use polylab::ConvexBody;

fn main() -> polylab::Result<()> {
    let base = RngStream::new(8, 0);
    for (name, body) in [("square", ConvexBody::unit_cube(2)?), ("disk", ConvexBody::unit_ball(2)?)] {
        let r = check_deviation_tail(&DensitySpec::uniform(body), 512, 10_000, 0, None, &base.fork_named(name))?;
        let s = |k: &str| r.statistics[k].value;
        println!(
            "{name:<6} c_hat {:.4}  decay {:.4}  log prefactor {:>7.4}  r2 {:.4}  exceedances {}  {}",
            s("c_hat"),
            s("decay_rate"),
            s("log_prefactor"),
            s("r_squared"),
            s("exceedances"),
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(())
}
