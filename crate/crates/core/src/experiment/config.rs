//! Flat `key = value` experiment files.
//!
//! ```text
//! # efron on the triangle
//! d = 2
//! body = triangle
//! density = uniform
//! n = 3
//! reps = 200000
//! seed = 1
//! checks = efron
//! ```
//!
//! Lists are comma separated, matrix rows are separated by `;`, and
//! geometric grids are written `start:stop:xfactor`. Unknown keys are
//! rejected.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::analysis::geometric_grid;
use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, PointSet};
use crate::sampling::DensitySpec;

/// Environment variable overriding the seed stored in a config file.
pub const SEED_ENV: &str = "POLYLAB_SEED";

/// Every recognised key, in serialisation order.
pub const KEYS: &[&str] = &[
    "d",
    "body",
    "body.center",
    "body.radius",
    "body.lower",
    "body.upper",
    "body.vertices",
    "body.shape",
    "density",
    "density.gamma",
    "density.rho0",
    "density.ambient_dim",
    "n",
    "n_grid",
    "q",
    "reps",
    "fresh_m",
    "pairs",
    "transform.condition",
    "seed",
    "threads",
    "out_dir",
    "checks",
];

macro_rules! named_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!(
                        "unknown {} `{s}` (expected one of: {})",
                        stringify!($name),
                        [$($text),+].join(", ")
                    )),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

named_enum!(
    /// Host body families; `disk`, `square`, `cube` and `triangle` are presets.
    BodyName {
        Ball => "ball",
        Disk => "disk",
        Box => "box",
        Square => "square",
        Cube => "cube",
        Simplex => "simplex",
        Triangle => "triangle",
        Ellipsoid => "ellipsoid",
    }
);

named_enum!(
    DensityName {
        Uniform => "uniform",
        MarginPower => "margin_power",
        Projection => "projection",
    }
);

named_enum!(
    /// Checks a run can request.
    CheckName {
        Efron => "efron",
        ExtendedEfron => "extended_efron",
        MarginTransfer => "margin_transfer",
        RateMissingMass => "rate_missing_mass",
        RateVn => "rate_Vn",
        RateRn => "rate_Rn",
        DeviationTail => "deviation_tail",
        AffineInvariance => "affine_invariance",
        WorstCaseUniform => "worst_case_uniform",
        HausdorffDomination => "hausdorff_domination",
        ProjectionDensity => "projection_density",
    }
);

/// Geometric grid `start, start·factor, …, <= stop`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub start: usize,
    pub stop: usize,
    pub factor: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<usize> {
        geometric_grid(self.start, self.stop, self.factor).expect("validated grid")
    }
}

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [start, stop, factor] = parts[..] else {
            return Err(format!("grid `{s}` is not start:stop:xfactor"));
        };
        let factor = factor.strip_prefix('x').ok_or_else(|| format!("grid factor `{factor}` must look like x2"))?;
        let num = |t: &str| t.parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
        let g = Grid { start: num(start)?, stop: num(stop)?, factor: num(factor)? };
        geometric_grid(g.start, g.stop, g.factor).map_err(|e| e.to_string())?;
        Ok(g)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:x{}", self.start, self.stop, self.factor)
    }
}

/// Parsed experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub d: Option<usize>,
    pub body: Option<BodyName>,
    pub body_center: Option<Vec<f64>>,
    pub body_radius: Option<f64>,
    pub body_lower: Option<Vec<f64>>,
    pub body_upper: Option<Vec<f64>>,
    pub body_vertices: Option<Vec<Vec<f64>>>,
    pub body_shape: Option<Vec<Vec<f64>>>,
    pub density: DensityName,
    pub gamma: Option<f64>,
    pub rho0: Option<f64>,
    pub ambient_dim: Option<usize>,
    pub n: Option<usize>,
    pub n_grid: Option<Grid>,
    pub q: Vec<f64>,
    pub reps: Option<usize>,
    pub fresh_m: Option<usize>,
    pub pairs: Option<usize>,
    pub condition: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub checks: Vec<CheckName>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            d: None,
            body: None,
            body_center: None,
            body_radius: None,
            body_lower: None,
            body_upper: None,
            body_vertices: None,
            body_shape: None,
            density: DensityName::Uniform,
            gamma: None,
            rho0: None,
            ambient_dim: None,
            n: None,
            n_grid: None,
            q: Vec::new(),
            reps: None,
            fresh_m: None,
            pairs: None,
            condition: None,
            seed: None,
            threads: None,
            out_dir: None,
            checks: Vec::new(),
        }
    }
}

/// Default fresh points per replicate for missing-mass estimates.
pub const DEFAULT_FRESH_M: usize = 10_000;
/// Default condition number of the random shear in the affine check.
pub const DEFAULT_CONDITION: f64 = 50.0;
/// Default output directory.
pub const DEFAULT_OUT_DIR: &str = "polylab-out";

fn list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}

fn rows(s: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    s.split(';').map(list::<f64>).collect()
}

fn scalar<T: FromStr>(s: &str) -> std::result::Result<T, String>
where
    T::Err: fmt::Display,
{
    s.parse::<T>().map_err(|e| format!("`{s}`: {e}"))
}

fn join<T: fmt::Display>(xs: &[T], sep: &str) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

impl ExperimentConfig {
    /// Reads and validates a config file.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Parses config text. Syntax problems are [`Error::Parse`]; unknown keys
    /// and bad values are [`Error::Validation`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let eq = content.find('=').ok_or_else(|| Error::Parse {
                line,
                column: content.len() - content.trim_start().len() + 1,
                message: "expected `key = value`".into(),
            })?;
            let key = content[..eq].trim();
            if key.is_empty() {
                return Err(Error::Parse { line, column: 1, message: "missing key before `=`".into() });
            }
            let value_part = &content[eq + 1..];
            let value = value_part.trim();
            let column = eq + 2 + (value_part.len() - value_part.trim_start().len());
            if !seen.insert(key.to_string()) {
                return Err(Error::Parse {
                    line,
                    column: content.find(key).unwrap_or(0) + 1,
                    message: format!("duplicate key `{key}`"),
                });
            }
            cfg.set(key, value).map_err(|e| match e {
                Error::Validation { field, message } if KEYS.contains(&field.as_str()) => {
                    Error::Parse { line, column, message: format!("{field}: {message}") }
                }
                other => other,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |m: String| Error::validation(key, m);
        match key {
            "d" => self.d = Some(scalar(value).map_err(bad)?),
            "body" => self.body = Some(value.parse().map_err(bad)?),
            "body.center" => self.body_center = Some(list(value).map_err(bad)?),
            "body.radius" => self.body_radius = Some(scalar(value).map_err(bad)?),
            "body.lower" => self.body_lower = Some(list(value).map_err(bad)?),
            "body.upper" => self.body_upper = Some(list(value).map_err(bad)?),
            "body.vertices" => self.body_vertices = Some(rows(value).map_err(bad)?),
            "body.shape" => self.body_shape = Some(rows(value).map_err(bad)?),
            "density" => self.density = value.parse().map_err(bad)?,
            "density.gamma" => self.gamma = Some(scalar(value).map_err(bad)?),
            "density.rho0" => self.rho0 = Some(scalar(value).map_err(bad)?),
            "density.ambient_dim" => self.ambient_dim = Some(scalar(value).map_err(bad)?),
            "n" => self.n = Some(scalar(value).map_err(bad)?),
            "n_grid" => self.n_grid = Some(value.parse().map_err(bad)?),
            "q" => self.q = list(value).map_err(bad)?,
            "reps" => self.reps = Some(scalar(value).map_err(bad)?),
            "fresh_m" => self.fresh_m = Some(scalar(value).map_err(bad)?),
            "pairs" => self.pairs = Some(scalar(value).map_err(bad)?),
            "transform.condition" => self.condition = Some(scalar(value).map_err(bad)?),
            "seed" => self.seed = Some(scalar(value).map_err(bad)?),
            "threads" => self.threads = Some(scalar(value).map_err(bad)?),
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            "checks" => self.checks = list(value).map_err(bad)?,
            _ => return Err(Error::validation(key, "unknown key")),
        }
        Ok(())
    }

    /// Canonical text; `parse(serialize(c)) == c` for every valid `c`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                let _ = writeln!(out, "{k} = {v}");
            }
        };
        put("d", self.d.map(|v| v.to_string()));
        put("body", self.body.map(|v| v.to_string()));
        put("body.center", self.body_center.as_ref().map(|v| join(v, ", ")));
        put("body.radius", self.body_radius.map(|v| v.to_string()));
        put("body.lower", self.body_lower.as_ref().map(|v| join(v, ", ")));
        put("body.upper", self.body_upper.as_ref().map(|v| join(v, ", ")));
        let matrix = |m: &Vec<Vec<f64>>| m.iter().map(|r| join(r, ", ")).collect::<Vec<_>>().join("; ");
        put("body.vertices", self.body_vertices.as_ref().map(matrix));
        put("body.shape", self.body_shape.as_ref().map(matrix));
        put("density", Some(self.density.to_string()));
        put("density.gamma", self.gamma.map(|v| v.to_string()));
        put("density.rho0", self.rho0.map(|v| v.to_string()));
        put("density.ambient_dim", self.ambient_dim.map(|v| v.to_string()));
        put("n", self.n.map(|v| v.to_string()));
        put("n_grid", self.n_grid.map(|v| v.to_string()));
        put("q", (!self.q.is_empty()).then(|| join(&self.q, ", ")));
        put("reps", self.reps.map(|v| v.to_string()));
        put("fresh_m", self.fresh_m.map(|v| v.to_string()));
        put("pairs", self.pairs.map(|v| v.to_string()));
        put("transform.condition", self.condition.map(|v| v.to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        put("threads", self.threads.map(|v| v.to_string()));
        put("out_dir", self.out_dir.as_ref().map(|v| v.display().to_string()));
        put("checks", (!self.checks.is_empty()).then(|| join(&self.checks, ", ")));
        out
    }

    /// Checks cross-field consistency and builds the body once.
    pub fn validate(&self) -> Result<()> {
        if let Some(d) = self.d {
            if d < 2 {
                return Err(Error::validation("d", "dimension must be at least 2"));
            }
        }
        if let Some(g) = self.gamma {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::validation("density.gamma", "must be finite and >= 0"));
            }
        }
        if let Some(r) = self.rho0 {
            if !(r > 0.0) {
                return Err(Error::validation("density.rho0", "must be positive"));
            }
        }
        if self.reps == Some(0) {
            return Err(Error::validation("reps", "must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(Error::validation("threads", "must be at least 1"));
        }
        if let Some(&q) = self.q.iter().find(|&&q| !(q > 0.0)) {
            return Err(Error::validation("q", format!("moment orders must be positive, got {q}")));
        }
        if let Some(c) = self.condition {
            if !(c >= 1.0) {
                return Err(Error::validation("transform.condition", "must be >= 1"));
            }
        }
        if self.body.is_some() {
            self.body()?;
        }
        Ok(())
    }

    pub fn dim(&self) -> Result<usize> {
        match (self.d, self.body) {
            (Some(d), _) => Ok(d),
            (None, Some(BodyName::Disk | BodyName::Square | BodyName::Triangle)) => Ok(2),
            _ => Err(Error::validation("d", "required")),
        }
    }

    fn field<T: Clone>(&self, value: &Option<T>, key: &str) -> Result<T> {
        value.clone().ok_or_else(|| Error::validation(key, "required"))
    }

    fn check_len(&self, key: &str, v: &[f64], d: usize) -> Result<()> {
        if v.len() != d {
            return Err(Error::validation(key, format!("expected {d} coordinates, got {}", v.len())));
        }
        Ok(())
    }

    /// The host body described by the `body.*` keys.
    pub fn body(&self) -> Result<ConvexBody> {
        let d = self.dim()?;
        let name = self.field(&self.body, "body")?;
        let wrap = |e: Error| Error::validation("body", e.to_string());
        if matches!(name, BodyName::Disk | BodyName::Square | BodyName::Triangle) && d != 2 {
            return Err(Error::validation("d", format!("body `{name}` is two-dimensional")));
        }
        let center = match &self.body_center {
            Some(c) => {
                self.check_len("body.center", c, d)?;
                c.clone()
            }
            None => vec![0.0; d],
        };
        match name {
            BodyName::Ball | BodyName::Disk => ConvexBody::ball(center, self.body_radius.unwrap_or(1.0)).map_err(wrap),
            BodyName::Square | BodyName::Cube => ConvexBody::unit_cube(d).map_err(wrap),
            BodyName::Box => {
                let lower = self.field(&self.body_lower, "body.lower")?;
                let upper = self.field(&self.body_upper, "body.upper")?;
                self.check_len("body.lower", &lower, d)?;
                self.check_len("body.upper", &upper, d)?;
                ConvexBody::cuboid(lower, upper).map_err(wrap)
            }
            BodyName::Triangle => ConvexBody::standard_simplex(2).map_err(wrap),
            BodyName::Simplex => match &self.body_vertices {
                None => ConvexBody::standard_simplex(d).map_err(wrap),
                Some(rows) => {
                    let pts =
                        PointSet::from_rows(rows).map_err(|e| Error::validation("body.vertices", e.to_string()))?;
                    if pts.dim() != d || pts.len() != d + 1 {
                        return Err(Error::validation(
                            "body.vertices",
                            format!("expected {} rows of {d} coordinates", d + 1),
                        ));
                    }
                    ConvexBody::simplex(&pts).map_err(|e| Error::validation("body.vertices", e.to_string()))
                }
            },
            BodyName::Ellipsoid => {
                let rows = self.field(&self.body_shape, "body.shape")?;
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::validation("body.shape", format!("expected a {d}x{d} matrix")));
                }
                let m = DMatrix::from_fn(d, d, |r, c| rows[r][c]);
                ConvexBody::ellipsoid(center, m).map_err(|e| Error::validation("body.shape", e.to_string()))
            }
        }
    }

    /// The density described by the `density.*` keys, on [`body`](Self::body).
    /// Projections use the body as the source in `R^{ambient_dim}` when its
    /// dimension differs from `d`, and otherwise a unit-radius ball source.
    pub fn density_spec(&self) -> Result<DensitySpec> {
        match self.density {
            DensityName::Uniform => Ok(DensitySpec::uniform(self.body()?)),
            DensityName::MarginPower => DensitySpec::margin_power(
                self.body()?,
                self.field(&self.gamma, "density.gamma")?,
                self.rho0.unwrap_or(1.0),
            )
            .map_err(|e| Error::validation("density", e.to_string())),
            DensityName::Projection => DensitySpec::projection(self.projection_source()?, self.dim()?)
                .map_err(|e| Error::validation("density", e.to_string())),
        }
    }

    /// Ball of radius `body.radius` (default 1) in `R^{ambient_dim}`
    /// (default `d + 1`).
    pub fn projection_source(&self) -> Result<ConvexBody> {
        let d = self.dim()?;
        let big_d = self.ambient_dim.unwrap_or(d + 1);
        if big_d <= d {
            return Err(Error::validation("density.ambient_dim", format!("must exceed d = {d}")));
        }
        ConvexBody::ball(vec![0.0; big_d], self.body_radius.unwrap_or(1.0))
            .map_err(|e| Error::validation("body.radius", e.to_string()))
    }

    pub fn n(&self) -> Result<usize> {
        self.field(&self.n, "n")
    }

    pub fn reps(&self) -> Result<usize> {
        self.field(&self.reps, "reps")
    }

    pub fn n_grid(&self) -> Result<Vec<usize>> {
        Ok(self.field(&self.n_grid, "n_grid")?.values())
    }

    pub fn q_list(&self) -> Vec<f64> {
        if self.q.is_empty() {
            vec![1.0]
        } else {
            self.q.clone()
        }
    }

    pub fn fresh_m(&self) -> usize {
        self.fresh_m.unwrap_or(DEFAULT_FRESH_M)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }

    /// Seed after precedence: command-line flag, then `POLYLAB_SEED`, then
    /// the file. There is no implicit default.
    pub fn resolve_seed(&self, env: Option<&str>, flag: Option<u64>) -> Result<u64> {
        if let Some(s) = flag {
            return Ok(s);
        }
        if let Some(v) = env {
            return v.trim().parse().map_err(|e| Error::validation(SEED_ENV, format!("`{v}`: {e}")));
        }
        self.seed.ok_or_else(|| Error::validation("seed", "a seed is required (flag, POLYLAB_SEED or config)"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "d = 2\nbody = ball\ndensity = uniform\nn = 100\nreps = 10\nseed = 1\n";

    #[test]
    fn minimal_config_is_valid() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!((c.d, c.n, c.reps, c.seed), (Some(2), Some(100), Some(10), Some(1)));
        assert_eq!(c.body().unwrap().kind_name(), "ball");
        assert_eq!(ExperimentConfig::parse(&c.serialize()).unwrap(), c);
    }

    #[test]
    fn unknown_key_names_the_key() {
        let err = ExperimentConfig::parse("d = 2\ndenisty = uniform\n").unwrap_err();
        match err {
            Error::Validation { field, .. } => assert_eq!(field, "denisty"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        match ExperimentConfig::parse("d = 2\n  body ball\n").unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        match ExperimentConfig::parse("d = 2\nn = many\n").unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 5)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(ExperimentConfig::parse("d = 2\nd = 3\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn semantic_errors_name_the_field() {
        let err = ExperimentConfig::parse("d = 3\nbody = box\nbody.lower = 0, 0\nbody.upper = 1, 1, 1\n").unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "body.lower"), "{err:?}");
        let err = ExperimentConfig::parse("d = 1\n").unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "d"));
    }

    #[test]
    fn grids_and_lists() {
        let c = ExperimentConfig::parse("n_grid = 64:8192:x2\nq = 1, 2\nchecks = efron, rate_Vn\n").unwrap();
        assert_eq!(c.n_grid().unwrap(), vec![64, 128, 256, 512, 1024, 2048, 4096, 8192]);
        assert_eq!(c.q, vec![1.0, 2.0]);
        assert_eq!(c.checks, vec![CheckName::Efron, CheckName::RateVn]);
        assert!(ExperimentConfig::parse("n_grid = 64:8192:2\n").is_err());
    }

    #[test]
    fn seed_precedence() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.resolve_seed(None, None).unwrap(), 1);
        assert_eq!(c.resolve_seed(Some("5"), None).unwrap(), 5);
        assert_eq!(c.resolve_seed(Some("5"), Some(9)).unwrap(), 9);
        let none = ExperimentConfig::parse("d = 2\n").unwrap();
        assert!(none.resolve_seed(None, None).is_err());
    }
}
