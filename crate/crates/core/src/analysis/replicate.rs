use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_hull_default, PointSet, Polytope};
use crate::sampling::{DensitySampler, DensitySpec, RngStream, StreamRng};

/// Redraws allowed per replicate before a degenerate sample is an error.
pub const MAX_REDRAWS: usize = 100;

/// One random polytope and the quantities derived from it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HullReplicate {
    pub n: usize,
    /// Vertex count `R_n`.
    pub r_n: usize,
    /// Missing volume `|K| - |hull|`.
    pub v_n: f64,
    /// `V_n / |K|` for uniform laws, otherwise the outside fraction of
    /// `fresh_m` fresh draws; `None` when `fresh_m = 0` and the law is not uniform.
    pub missing_mass: Option<f64>,
    pub hull: Option<Polytope>,
}

/// Replicates with the number of degenerate samples that were redrawn.
#[derive(Debug, Clone)]
pub struct ReplicateBatch<T> {
    pub values: Vec<T>,
    pub redraws: usize,
}

/// A freshly built hull handed to a replicate closure, with access to the
/// replicate's generator for further draws.
pub struct Replicate<'a> {
    pub index: usize,
    pub sample: &'a PointSet,
    pub hull: &'a Polytope,
    pub spec: &'a DensitySpec,
    sampler: &'a DensitySampler,
    rng: &'a mut StreamRng,
}

impl Replicate<'_> {
    pub fn n(&self) -> usize {
        self.sample.len()
    }

    /// `|K| - |hull|`, clamped at zero.
    pub fn missing_volume(&self) -> Result<f64> {
        Ok((self.spec.support().volume() - self.hull.volume()?).max(0.0))
    }

    /// Number of `m` fresh draws from the density that fall outside the hull.
    pub fn fresh_outside(&mut self, m: usize) -> usize {
        let mut x = vec![0.0; self.sample.dim()];
        let tol = self.hull.tolerance();
        (0..m)
            .filter(|_| {
                self.sampler.sample_into(self.rng, &mut x);
                !self.hull.contains_unchecked(&x, tol)
            })
            .count()
    }

    pub fn rng(&mut self) -> &mut StreamRng {
        self.rng
    }
}

/// Runs `reps` independent replicates in parallel. Replicate `i` draws from
/// `base.stream(i)`; results come back in index order, so the output does not
/// depend on the number of worker threads.
pub fn map_replicates<T, F>(
    spec: &DensitySpec,
    n: usize,
    reps: usize,
    base: &RngStream,
    f: F,
) -> Result<ReplicateBatch<T>>
where
    T: Send,
    F: Fn(&mut Replicate<'_>) -> Result<T> + Sync,
{
    let d = spec.dim();
    if n < d + 1 {
        return Err(Error::InvalidArgument(format!("need n >= d + 1 = {}, got {n}", d + 1)));
    }
    let sampler = spec.sampler()?;
    let results: Vec<(T, usize)> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = base.stream(i as u64).rng();
            let mut redraws = 0;
            loop {
                let (sample, _) = sampler.sample(n, &mut rng);
                match convex_hull_default(&sample) {
                    Ok(hull) => {
                        let mut rep = Replicate {
                            index: i,
                            sample: &sample,
                            hull: &hull,
                            spec,
                            sampler: &sampler,
                            rng: &mut rng,
                        };
                        return f(&mut rep).map(|v| (v, redraws));
                    }
                    Err(Error::DegenerateInput { .. } | Error::InvalidPolytope(_)) if redraws < MAX_REDRAWS => {
                        redraws += 1;
                    }
                    Err(e) => return Err(e),
                }
            }
        })
        .collect::<Result<_>>()?;
    let redraws = results.iter().map(|r| r.1).sum();
    Ok(ReplicateBatch { values: results.into_iter().map(|r| r.0).collect(), redraws })
}

/// Options for [`run_replicates_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ReplicateOptions {
    /// Fresh draws per replicate for the missing mass of non-uniform laws.
    pub fresh_m: usize,
    pub keep_hulls: bool,
}

/// Hull replicates keeping every polytope.
pub fn run_replicates(
    spec: &DensitySpec,
    n: usize,
    reps: usize,
    fresh_m: usize,
    base: &RngStream,
) -> Result<ReplicateBatch<HullReplicate>> {
    run_replicates_with(spec, n, reps, base, ReplicateOptions { fresh_m, keep_hulls: true })
}

pub fn run_replicates_with(
    spec: &DensitySpec,
    n: usize,
    reps: usize,
    base: &RngStream,
    options: ReplicateOptions,
) -> Result<ReplicateBatch<HullReplicate>> {
    let uniform = spec.is_uniform();
    let volume = spec.support().volume();
    map_replicates(spec, n, reps, base, |rep| {
        let v_n = rep.missing_volume()?;
        let missing_mass = if uniform {
            Some(v_n / volume)
        } else if options.fresh_m > 0 {
            Some(rep.fresh_outside(options.fresh_m) as f64 / options.fresh_m as f64)
        } else {
            None
        };
        Ok(HullReplicate {
            n,
            r_n: rep.hull.vertex_count(),
            v_n,
            missing_mass,
            hull: options.keep_hulls.then(|| rep.hull.clone()),
        })
    })
}
