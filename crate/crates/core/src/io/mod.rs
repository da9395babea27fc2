//! Grid files, synthetic grids and text exporters.

mod export;
mod generate;
mod grid_file;

pub use export::{
    export_csv_points, export_obj, parse_obj, write_csv_points, write_obj, write_vtk_dual,
    write_vtk_unstructured, ObjMesh,
};
pub use generate::{generate_octant, generate_random, generate_uniform, DEPTH_FIELD, OCTANT_ROOT_SIZE};
pub use grid_file::{read_grid, read_grid_from, write_grid, write_grid_to};
