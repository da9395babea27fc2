use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use htg_core::filters::{
    axis_clip, axis_cut, axis_reflection, cell_centers, contour_values, depth_limiter, geometry,
    plane_cutter, threshold, to_unstructured, ClipMode, ContourOptions, CutMode, Plane, Side,
    UnstructuredGrid,
};
use htg_core::io::{
    export_csv_points, export_obj, generate_octant, generate_random, generate_uniform, read_grid,
    write_grid, write_vtk_dual, write_vtk_unstructured,
};
use htg_core::{
    build_full_dual, check_size_guard, depth_first, table_census, traversal_tables, HyperTreeGrid,
    MemoryReport, MooreSupercursor, NeighborhoodKind,
};

use crate::args::{BenchArgs, Cli, Command, ContourArgs, ExportCommand, FilterCommand, GenerateArgs, PointsFormat, SideArg};
use crate::report::Report;

pub fn run(cli: Cli) -> Result<ExitCode> {
    let mut report = Report::new();
    let code = match cli.command {
        Command::Generate(args) => generate(args, &mut report)?,
        Command::Info { input } => {
            let grid = load(&input)?;
            describe(&grid, "", &mut report);
            ExitCode::SUCCESS
        }
        Command::Filter { filter } => run_filter(filter, &mut report)?,
        Command::Contour(args) => contour(args, cli.threads, &mut report)?,
        Command::Export { export } => run_export(export, &mut report)?,
        Command::Bench(args) => return bench(args),
        Command::Tables { check, dump } => tables(check, dump, &mut report)?,
    };
    print!("{}", report.render(cli.pretty));
    Ok(code)
}

fn load(path: &Path) -> Result<HyperTreeGrid> {
    read_grid(path).with_context(|| format!("reading {}", path.display()))
}

fn save(grid: &HyperTreeGrid, path: &Path) -> Result<()> {
    write_grid(grid, path).with_context(|| format!("writing {}", path.display()))
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| anyhow::anyhow!("bad {what} value `{x}`")))
        .collect()
}

fn parse_fixed<const N: usize>(s: &str, what: &str) -> Result<[f64; N]> {
    let v: Vec<f64> = parse_list(s, what)?;
    v.try_into()
        .map_err(|v: Vec<f64>| anyhow::anyhow!("{what} needs {N} values, got {}", v.len()))
}

/// Root layout from `i,j,k` (missing axes are 1) or from a tree count,
/// split as evenly as possible over the `d` axes.
pub fn parse_extent(s: &str, d: usize) -> Result<[usize; 3]> {
    let values: Vec<usize> = parse_list(s, "extent")?;
    let mut extent = [1usize; 3];
    match values.as_slice() {
        [n] if d > 1 => {
            let f = balanced_factors(*n, d).with_context(|| format!("cannot split {n} trees"))?;
            extent[..d].copy_from_slice(&f);
        }
        v if v.len() <= 3 => extent[..v.len()].copy_from_slice(v),
        _ => bail!("extent takes at most 3 values"),
    }
    Ok(extent)
}

/// Factors `n` into `d` nondecreasing factors with the smallest spread.
fn balanced_factors(n: usize, d: usize) -> Option<Vec<usize>> {
    if n == 0 {
        return None;
    }
    let divisors = (1..=n).filter(|k| n.is_multiple_of(*k));
    match d {
        1 => Some(vec![n]),
        2 => divisors.filter(|a| a * a <= n).map(|a| vec![a, n / a]).next_back(),
        _ => {
            let mut best: Option<Vec<usize>> = None;
            for a in divisors.filter(|a| a * a * a <= n) {
                let m = n / a;
                for b in (a..=m).filter(|b| m.is_multiple_of(*b) && b * b <= m) {
                    let c = m / b;
                    if best.as_ref().is_none_or(|x| c - a < x[2] - x[0]) {
                        best = Some(vec![a, b, c]);
                    }
                }
            }
            best
        }
    }
}

fn masked_count(grid: &HyperTreeGrid) -> usize {
    grid.mask().map_or(0, |m| m.count_ones())
}

fn describe(grid: &HyperTreeGrid, prefix: &str, r: &mut Report) {
    let key = |k: &str| format!("{prefix}{k}");
    let e = grid.extent();
    let mem = grid.memory_report();
    r.add(&key("dimension"), grid.dimension())
        .add(&key("factor"), grid.factor())
        .add(&key("extent"), format!("{},{},{}", e[0], e[1], e[2]))
        .add(&key("orientation"), grid.orientation())
        .add(&key("trees"), grid.tree_count())
        .add(&key("vertices"), grid.vertex_total())
        .add(&key("leaves"), grid.leaf_total())
        .add(&key("depth"), grid.depth())
        .add(&key("masked"), masked_count(grid))
        .add(&key("fields"), grid.field_names().collect::<Vec<_>>().join(","))
        .add(&key("topology_bytes"), mem.topology_bytes)
        .add(&key("total_bytes"), mem.total_bytes);
}

fn generate(args: GenerateArgs, r: &mut Report) -> Result<ExitCode> {
    let start = Instant::now();
    let (kind, grid) = if args.octant {
        if args.dimension != 3 {
            bail!("the octant generator is three-dimensional");
        }
        let extent = parse_extent(args.extent.as_deref().unwrap_or("5,5,6"), 3)?;
        ("octant", generate_octant(extent, args.factor.unwrap_or(3), args.depth)?)
    } else {
        let d = args.dimension;
        let extent = parse_extent(args.extent.as_deref().unwrap_or("1"), d)?;
        let f = args.factor.unwrap_or(2);
        if args.uniform {
            let b = (f as u64).checked_pow(d as u32).unwrap_or(u64::MAX);
            let per_tree = (0..=args.depth).fold(0u64, |acc, k| acc.saturating_add(b.saturating_pow(k)));
            let trees = extent.iter().product::<usize>() as u64;
            check_size_guard("uniform grid", per_tree.saturating_mul(trees), None)?;
            ("uniform", generate_uniform(d, f, extent, args.depth)?)
        } else {
            ("random", generate_random(d, f, extent, args.depth, args.prob, args.seed)?)
        }
    };
    let seconds = start.elapsed().as_secs_f64();
    save(&grid, &args.output)?;
    r.add("generator", kind);
    describe(&grid, "", r);
    r.add("seconds", format!("{seconds:.6}")).add("output", args.output.display());
    Ok(ExitCode::SUCCESS)
}

fn run_filter(filter: FilterCommand, r: &mut Report) -> Result<ExitCode> {
    let (name, io) = match &filter {
        FilterCommand::DepthLimiter { io, .. } => ("depth-limiter", io),
        FilterCommand::Threshold { io, .. } => ("threshold", io),
        FilterCommand::AxisReflection { io, .. } => ("axis-reflection", io),
        FilterCommand::AxisCut { io, .. } => ("axis-cut", io),
        FilterCommand::AxisClip { io, .. } => ("axis-clip", io),
    };
    let input = load(&io.input)?;
    let start = Instant::now();
    let output = match &filter {
        FilterCommand::DepthLimiter { depth, .. } => depth_limiter(&input, *depth)?,
        FilterCommand::Threshold { field, min, max, .. } => threshold(&input, field, *min, *max)?,
        FilterCommand::AxisReflection { axis, omega, .. } => axis_reflection(&input, *axis, *omega)?,
        FilterCommand::AxisCut { axis, position, .. } => axis_cut(&input, *axis, *position)?,
        FilterCommand::AxisClip { axis, omega, side, r#box, quadric, .. } => {
            let mode = if let Some(omega) = omega {
                let side = match side {
                    SideArg::Above => Side::Above,
                    SideArg::Below => Side::Below,
                };
                ClipMode::Halfspace { axis: *axis, omega: *omega, side }
            } else if let Some(b) = r#box {
                let v: [f64; 6] = parse_fixed(b, "box")?;
                ClipMode::Box {
                    origin: [v[0], v[1], v[2]],
                    size: [v[3], v[4], v[5]],
                }
            } else {
                ClipMode::Quadric(parse_fixed(quadric.as_deref().unwrap_or_default(), "quadric")?)
            };
            axis_clip(&input, mode)?
        }
    };
    let seconds = start.elapsed().as_secs_f64();
    let shared = MemoryReport::resident(&[&input, &output]).total_bytes;
    save(&output, &io.output)?;
    r.add("filter", name).add("filter_seconds", format!("{seconds:.6}"));
    describe(&output, "", r);
    r.add("input_total_bytes", input.memory_report().total_bytes)
        .add("resident_bytes_with_input", shared)
        .add("output", io.output.display());
    Ok(ExitCode::SUCCESS)
}

fn contour(args: ContourArgs, threads: usize, r: &mut Report) -> Result<ExitCode> {
    let grid = load(&args.io.input)?;
    let isos: Vec<f64> = parse_list(&args.iso, "iso")?;
    let options = ContourOptions {
        preselect: !args.naive,
        adjusted: args.adjusted,
        threads,
    };
    let start = Instant::now();
    let poly = contour_values(&grid, grid.field(&args.field)?, &isos, &options)?;
    let seconds = start.elapsed().as_secs_f64();
    export_obj(&poly, &args.io.output).with_context(|| format!("writing {}", args.io.output.display()))?;
    if let Some(csv) = &args.csv {
        export_csv_points(&poly, csv).with_context(|| format!("writing {}", csv.display()))?;
    }
    r.add("field", &args.field)
        .add("iso_values", isos.len())
        .add("points", poly.points.len())
        .add("cells", poly.cell_count())
        .add("contour_seconds", format!("{seconds:.6}"))
        .add("output", args.io.output.display());
    Ok(ExitCode::SUCCESS)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("writing {}", path.display()))?))
}

fn run_export(export: ExportCommand, r: &mut Report) -> Result<ExitCode> {
    let start = Instant::now();
    let (kind, output) = match export {
        ExportCommand::Geometry { io } => {
            let poly = geometry(&load(&io.input)?)?;
            export_obj(&poly, &io.output)?;
            r.add("points", poly.points.len()).add("cells", poly.cell_count());
            ("geometry", io.output)
        }
        ExportCommand::CellCenters { io, format } => {
            let poly = cell_centers(&load(&io.input)?, matches!(format, PointsFormat::Obj))?;
            match format {
                PointsFormat::Csv => export_csv_points(&poly, &io.output)?,
                PointsFormat::Obj => export_obj(&poly, &io.output)?,
            }
            r.add("points", poly.points.len());
            ("cell-centers", io.output)
        }
        ExportCommand::PlaneCutter { io, origin, normal, dual } => {
            let plane = Plane::new(parse_fixed(&origin, "origin")?, parse_fixed(&normal, "normal")?)?;
            let mode = if dual { CutMode::Dual } else { CutMode::Primal };
            let poly = plane_cutter(&load(&io.input)?, &plane, mode)?;
            export_obj(&poly, &io.output)?;
            r.add("points", poly.points.len()).add("cells", poly.cell_count());
            ("plane-cutter", io.output)
        }
        ExportCommand::ToUnstructured { io } => {
            let grid = load(&io.input)?;
            let u = to_unstructured(&grid)?;
            let mut w = create(&io.output)?;
            write_vtk_unstructured(&u, &mut w)?;
            w.flush()?;
            let compact = grid.memory_report().total_bytes;
            r.add("cells", u.cell_count())
                .add("points", u.points.len())
                .add("explicit_bytes", u.footprint_bytes())
                .add("compact_bytes", compact)
                .add("ratio", format!("{:.3}", u.footprint_bytes() as f64 / compact as f64));
            ("to-unstructured", io.output)
        }
        ExportCommand::Dual { io, adjusted } => {
            let dual = build_full_dual(&load(&io.input)?, adjusted, None)?;
            let mut w = create(&io.output)?;
            write_vtk_dual(&dual, &mut w)?;
            w.flush()?;
            r.add("points", dual.points.len()).add("cells", dual.cell_count());
            ("dual", io.output)
        }
    };
    r.add("export", kind)
        .add("seconds", format!("{:.6}", start.elapsed().as_secs_f64()))
        .add("output", output.display());
    Ok(ExitCode::SUCCESS)
}

fn bench(args: BenchArgs) -> Result<ExitCode> {
    if !args.scaling {
        bail!("only the --scaling benchmark is available");
    }
    let extent = parse_extent(&args.extent, args.dimension)?;
    let trees = extent.iter().product::<usize>() as u64;
    let b = (args.factor as u64).pow(args.dimension as u32);
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "depth,trees,cells,leaves,compact_bytes,bytes_per_cell,explicit_bytes,ratio,build_seconds,traverse_seconds"
    )?;
    for depth in args.depths {
        let cells = trees * (0..=depth).map(|k| b.pow(k)).sum::<u64>();
        check_size_guard("benchmark grid", cells, None)?;
        let start = Instant::now();
        let grid = generate_uniform(args.dimension, args.factor, extent, depth)?;
        let build = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let mut leaves = 0u64;
        depth_first(&grid, |s: &MooreSupercursor<'_>| {
            leaves += s.is_leaf() as u64;
            true
        })?;
        let traverse = start.elapsed().as_secs_f64();
        let compact = grid.memory_report().total_bytes;
        let explicit = UnstructuredGrid::predicted_footprint_bytes(&grid);
        writeln!(
            out,
            "{depth},{},{},{leaves},{compact},{:.3},{explicit},{:.3},{build:.6},{traverse:.6}",
            grid.tree_count(),
            grid.vertex_total(),
            compact as f64 / grid.vertex_total() as f64,
            explicit as f64 / compact as f64,
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

fn tables(check: bool, dump: bool, r: &mut Report) -> Result<ExitCode> {
    let (count, entries) = table_census();
    r.add("tables", count).add("entries", entries);
    let mut ok = true;
    if check {
        let t = traversal_tables(NeighborhoodKind::Moore, 1, 3);
        let census_ok = (count, entries) == (24, 2804);
        let parent_ok = t.to_parent() == [0, 1, 1, 1, 1, 1, 1, 1, 2];
        let child_ok = t.to_child() == [2, 0, 1, 0, 1, 2, 1, 2, 0];
        r.add("census_ok", census_ok)
            .add("d1_f3_to_parent_ok", parent_ok)
            .add("d1_f3_to_child_ok", child_ok);
        ok = census_ok && parent_ok && child_ok;
    }
    if dump {
        for kind in NeighborhoodKind::ALL {
            for d in 1..=3 {
                for f in 2..=3 {
                    let t = traversal_tables(kind, d, f);
                    let join = |v: &[u8]| v.iter().map(u8::to_string).collect::<Vec<_>>().join(";");
                    r.add(&format!("{}_d{d}_f{f}_to_parent", kind.name()), join(t.to_parent()))
                        .add(&format!("{}_d{d}_f{f}_to_child", kind.name()), join(t.to_child()));
                }
            }
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
