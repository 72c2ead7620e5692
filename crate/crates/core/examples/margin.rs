//! Transfer from missing mass to missing volume under a margin condition,
//! for densities vanishing like dist(x, boundary)^gamma.

use polylab::analysis::check_margin_transfer;
use polylab::experiment::report_summary;
use polylab::sampling::{DensitySpec, RngStream};
use polylab::ConvexBody;

fn main() -> polylab::Result<()> {
    let base = RngStream::new(6, 0);
    let mut reports = Vec::new();
    for (name, body) in [("disk", ConvexBody::unit_ball(2)?), ("square", ConvexBody::unit_cube(2)?)] {
        for gamma in [0.5, 1.0, 2.0] {
            let spec = DensitySpec::margin_power(body.clone(), gamma, 0.5)?;
            let params = spec.margin_params().unwrap();
            let r = check_margin_transfer(&spec, 200, 200, 20_000, &base.fork_named(&format!("{name}/{gamma}")))?;
            println!(
                "{name:<6} gamma={gamma:<4} alpha={:.3} L={:<8.3} t0={:.4}  qualifying {:>5.1}%  max V_n/bound {:.3}",
                params.alpha,
                params.l,
                params.t0,
                100.0 * r.statistics["qualifying_fraction"].value,
                r.statistics["max_ratio_to_bound"].value
            );
            reports.push(r);
        }
    }
    print!("{}", report_summary(&reports));
    Ok(())
}
