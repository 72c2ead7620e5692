//! Samplers: uniform laws on each body type, a margin-power density and a
//! projected ball. Prints empirical radial moments against exact values.

use polylab::sampling::{sample_margin_power, sample_projection, sample_uniform, RngStream};
use polylab::ConvexBody;

fn mean_radius(points: &polylab::PointSet) -> f64 {
    points.iter().map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt()).sum::<f64>() / points.len() as f64
}

fn main() -> polylab::Result<()> {
    let base = RngStream::new(3, 0);
    let n = 200_000;
    for d in [2, 3, 6] {
        let pts = sample_uniform(&ConvexBody::unit_ball(d)?, n, &base.fork_named(&format!("ball{d}")))?;
        println!("uniform B_{d}: E|X| = {:.4} (exact {:.4})", mean_radius(&pts), d as f64 / (d as f64 + 1.0));
    }

    let disk = ConvexBody::unit_ball(2)?;
    let margin = sample_margin_power(&disk, 1.0, 1.0, n, &base.fork_named("margin"))?;
    let params = margin.params.expect("gamma > 0");
    println!(
        "margin gamma=1 disk: E|X| = {:.4} (exact 0.5), acceptance {:.3}, c = {:.4}, L = {:.4}, t0 = {:.4}",
        mean_radius(&margin.points),
        n as f64 / margin.proposals as f64,
        params.c,
        params.l,
        params.t0
    );

    let proj = sample_projection(&ConvexBody::unit_ball(3)?, 2, n, &base.fork_named("projection"))?;
    // radial law 1 - (1 - r^2)^{3/2}, mean 3 pi / 16
    println!(
        "projected B_3 -> disk: E|X| = {:.4} (exact {:.4}), gamma = {}",
        mean_radius(&proj.points),
        3.0 * std::f64::consts::PI / 16.0,
        proj.gamma
    );
    Ok(())
}
