//! Command-line grammar. Every option can also be set through an
//! environment variable `SPHERE_RE_<OPTION>`.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sphere_re::continuation::Family;

use crate::expr;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "sphere-re", version, about = "Relative equilibria of three bodies on the sphere")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    #[arg(long, global = true, value_enum, default_value = "csv", env = "SPHERE_RE_FORMAT")]
    pub format: Format,
    /// Output file; a directory for `atlas`. Standard output when absent.
    #[arg(long, global = true, env = "SPHERE_RE_OUT")]
    pub out: Option<PathBuf>,
    /// Residual accepted by the corrector and by embeddings.
    #[arg(long, global = true, value_parser = positive, env = "SPHERE_RE_TOL_NEWTON")]
    pub tol_newton: Option<f64>,
    /// Distance within which a shape counts as lying on a collinear plane.
    #[arg(long, global = true, value_parser = positive, env = "SPHERE_RE_TOL_PLANE")]
    pub tol_plane: Option<f64>,
    /// Largest continuation step.
    #[arg(long, global = true, value_parser = positive, env = "SPHERE_RE_MAX_STEP")]
    pub max_step: Option<f64>,
    /// Grid resolution of scans and of the atlas interior search.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(2..=100_000), env = "SPHERE_RE_GRID")]
    pub grid: Option<u32>,
    /// Worker threads; all cores by default.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..=4096), env = "SPHERE_RE_THREADS")]
    pub threads: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct MassArgs {
    /// Three positive masses `m1,m2,m3`.
    #[arg(long, value_parser = masses, conflicts_with_all = ["nu", "dnu"], env = "SPHERE_RE_MASSES")]
    pub masses: Option<[f64; 3]>,
    /// Mean ratio: masses `(nu - dnu, nu + dnu, 1)`.
    #[arg(long, value_parser = number, requires = "dnu", env = "SPHERE_RE_NU")]
    pub nu: Option<f64>,
    #[arg(long, value_parser = number, requires = "nu", env = "SPHERE_RE_DNU")]
    pub dnu: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ShapeArg {
    /// Arc angles `s1,s2,s3` in radians; `pi` expressions such as `2pi/3` work.
    #[arg(long, value_parser = shape, env = "SPHERE_RE_SHAPE")]
    pub shape: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HemisphereArg {
    North,
    South,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Both,
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    /// Stop at the faces of the physical tetrahedron.
    Physical,
    /// Continue through the collinear faces inside the cube.
    Cube,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanKind {
    /// Isosceles mass ratio on a grid of the plane `s1 = s2`.
    Nu,
    /// The curves `j = 0` on the plane `s1 = s2`.
    J,
    /// The curve `h = 0` on the plane `s3 = s1 + s2`.
    H,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lagrange differences and the meridian Euler condition at a shape.
    Residual {
        #[command(flatten)]
        shape: ShapeArg,
        #[command(flatten)]
        masses: MassArgs,
    },
    /// Mass ratios making a shape a Lagrange equilibrium.
    Solve {
        #[command(flatten)]
        shape: ShapeArg,
    },
    /// Rotating configuration of a solved shape and its angular momentum.
    Embed {
        #[command(flatten)]
        shape: ShapeArg,
        #[command(flatten)]
        masses: MassArgs,
        #[arg(long, value_enum, default_value = "north")]
        hemisphere: HemisphereArg,
    },
    /// Trace one branch from a seed shape.
    Trace {
        #[command(flatten)]
        shape: ShapeArg,
        #[command(flatten)]
        masses: MassArgs,
        /// Family name, e.g. `lre-generic`, `lre-isosceles-12`, `ere-meridian-3`.
        #[arg(long, value_parser = family)]
        family: Family,
        #[arg(long, value_enum, default_value = "both")]
        direction: Direction,
        #[arg(long, value_enum, default_value = "physical")]
        domain: DomainArg,
    },
    /// All branches for given masses.
    Atlas {
        #[command(flatten)]
        masses: MassArgs,
        /// Euler branches on the collinear faces instead of Lagrange branches.
        #[arg(long)]
        euler: bool,
    },
    /// Meridian bifurcation points of the Lagrange and Euler families.
    CountBifurcations {
        #[command(flatten)]
        masses: MassArgs,
        /// Collinear plane by middle body.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=3))]
        plane: u8,
    },
    /// Grid scans for contour plots.
    Scan {
        #[arg(value_enum)]
        kind: ScanKind,
    },
    /// Run the constants suite; exit status 3 on any failure.
    Verify,
}

fn number(s: &str) -> Result<f64, String> {
    let v = expr::eval(s).map_err(|e| e.to_string())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("'{s}' must be positive"))
    }
}

fn masses(s: &str) -> Result<[f64; 3], String> {
    let m = expr::eval_list::<3>(s)?;
    if m.iter().all(|v| v.is_finite() && *v > 0.0) {
        Ok(m)
    } else {
        Err(format!("masses must be positive, got '{s}'"))
    }
}

fn shape(s: &str) -> Result<[f64; 3], String> {
    let v = expr::eval_list::<3>(s)?;
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(format!("'{s}' is not a finite shape"))
    }
}

fn family(s: &str) -> Result<Family, String> {
    Family::from_str(s).map_err(|e| e.to_string())
}
