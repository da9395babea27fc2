use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "htg", version, about = "Hypertree grid toolkit")]
pub struct Cli {
    /// Worker threads for per-tree parallel filters.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Aligned human-readable summaries instead of key=value lines.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build a synthetic grid and write it to a grid file.
    Generate(GenerateArgs),
    /// Print the structure and footprint of a grid file.
    Info {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Apply a grid-to-grid filter.
    Filter {
        #[command(subcommand)]
        filter: FilterCommand,
    },
    /// Iso-contour a field into an OBJ file.
    Contour(ContourArgs),
    /// Extract explicit geometry from a grid.
    Export {
        #[command(subcommand)]
        export: ExportCommand,
    },
    /// Memory and time scaling of complete grids, as CSV rows.
    Bench(BenchArgs),
    /// Check or print the supercursor traversal tables.
    Tables {
        /// Recompute the census and the reference rows; fail on mismatch.
        #[arg(long)]
        check: bool,
        /// Print every table.
        #[arg(long)]
        dump: bool,
    },
}

#[derive(Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["random", "octant", "uniform"])))]
pub struct GenerateArgs {
    /// Random refinement with split probability --prob.
    #[arg(long)]
    pub random: bool,
    /// Octant of the unit ball (dimension 3, 5,5,6 roots by default).
    #[arg(long)]
    pub octant: bool,
    /// Complete refinement down to --depth.
    #[arg(long)]
    pub uniform: bool,
    #[arg(short = 'd', long, default_value_t = 3)]
    pub dimension: usize,
    #[arg(short = 'f', long)]
    pub factor: Option<usize>,
    /// Root cells per axis, as `i,j,k` or a total count.
    #[arg(short = 'E', long)]
    pub extent: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    #[arg(long, default_value_t = 0.5)]
    pub prob: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args)]
pub struct Io {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SideArg {
    Above,
    Below,
}

#[derive(Subcommand)]
pub enum FilterCommand {
    /// Cut every tree below a depth.
    DepthLimiter {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        depth: u32,
    },
    /// Mask leaves whose field value is outside [min, max].
    Threshold {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        field: String,
        #[arg(long, allow_negative_numbers = true)]
        min: f64,
        #[arg(long, allow_negative_numbers = true)]
        max: f64,
    },
    /// Mirror the grid through the plane x_axis = omega.
    AxisReflection {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        axis: usize,
        #[arg(long, allow_negative_numbers = true)]
        omega: f64,
    },
    /// Cross-section by the plane x_axis = position, one dimension down.
    AxisCut {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        axis: usize,
        #[arg(long, allow_negative_numbers = true)]
        position: f64,
    },
    /// Mask leaves outside a halfspace, a box or a quadric.
    #[command(group(ArgGroup::new("shape").required(true).args(["omega", "clip_box", "quadric"])))]
    AxisClip {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 0)]
        axis: usize,
        #[arg(long, allow_negative_numbers = true)]
        omega: Option<f64>,
        #[arg(long, value_enum, default_value_t = SideArg::Above)]
        side: SideArg,
        /// Box as `x,y,z,sx,sy,sz`.
        #[arg(long = "box", id = "clip_box", allow_hyphen_values = true)]
        r#box: Option<String>,
        /// Ten quadric coefficients `c0,...,c9`.
        #[arg(long, allow_hyphen_values = true)]
        quadric: Option<String>,
    },
}

#[derive(Args)]
pub struct ContourArgs {
    #[command(flatten)]
    pub io: Io,
    #[arg(long, default_value = "Depth")]
    pub field: String,
    /// Comma-separated iso-values.
    #[arg(long, allow_hyphen_values = true)]
    pub iso: String,
    /// Descend everywhere instead of skipping sign-uniform subtrees.
    #[arg(long)]
    pub naive: bool,
    /// Interpolate between adjusted dual points.
    #[arg(long)]
    pub adjusted: bool,
    /// Also write the contour points as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum PointsFormat {
    Csv,
    Obj,
}

#[derive(Subcommand)]
pub enum ExportCommand {
    /// Outer surface of the visible cells (OBJ).
    Geometry {
        #[command(flatten)]
        io: Io,
    },
    /// Centers of the visible leaves.
    CellCenters {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value_t = PointsFormat::Csv)]
        format: PointsFormat,
    },
    /// Section by an arbitrary plane (OBJ).
    PlaneCutter {
        #[command(flatten)]
        io: Io,
        /// Point on the plane, `x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        origin: String,
        /// Plane normal, `x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        normal: String,
        /// Contour the signed distance on the dual instead of cutting leaves.
        #[arg(long)]
        dual: bool,
    },
    /// Explicit unstructured copy of the visible leaves (legacy VTK).
    ToUnstructured {
        #[command(flatten)]
        io: Io,
    },
    /// Dual mesh (legacy VTK).
    Dual {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        adjusted: bool,
    },
}

#[derive(Args)]
pub struct BenchArgs {
    /// Sweep the depths of complete grids.
    #[arg(long)]
    pub scaling: bool,
    /// Depth range `a..b` (inclusive) or a single depth.
    #[arg(long, default_value = "1..6", value_parser = parse_range)]
    pub depths: RangeInclusive<u32>,
    /// Root cells per axis, as `i,j,k` or a total count.
    #[arg(short = 'E', long, default_value = "150")]
    pub extent: String,
    #[arg(short = 'd', long, default_value_t = 3)]
    pub dimension: usize,
    #[arg(short = 'f', long, default_value_t = 2)]
    pub factor: usize,
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let bad = || format!("expected a depth or a range a..b, got `{s}`");
    match s.split_once("..") {
        Some((a, b)) => {
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok(a..=b)
        }
        None => {
            let a: u32 = s.trim().parse().map_err(|_| bad())?;
            Ok(a..=a)
        }
    }
}
