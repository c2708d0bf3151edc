//! Displacement-driven benchmark problems.
//!
//! * `cube-normal`, `cube-shear-a`: unit cube clamped on `x = 0`; the face
//!   `x = 1` moves rigidly by `δ e_x` or `δ e_y`.
//! * `cube-shear-b`: unit cube clamped on `z = 0`; the face `z = 1` moves
//!   by `δ e_x`.
//! * `punch`: unit block clamped at the bottom; the top-center patch of
//!   3×3 elements moves by `u₀ e_z` with its in-plane motion held.
//! * `cook`: the tapered 48/44/16 panel, scaled by [`COOK_SCALE`], one
//!   element deep with `u_z = 0` everywhere (plane strain), clamped on the
//!   left edge and given a uniform vertical displacement `u₀` on the right.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fem::mesh::{make_cube_mesh, make_mapped_mesh, HexMesh};
use crate::fem::solver::BcSet;

/// Cube face displacements that bring `max |F_ij − δ_ij|` to about 0.15
/// on the 8×8×8 mesh with the transversely isotropic law.
pub const CUBE_NORMAL_DISPLACEMENT: f64 = 0.1455;
pub const CUBE_SHEAR_A_DISPLACEMENT: f64 = 0.131;
pub const CUBE_SHEAR_B_DISPLACEMENT: f64 = 0.1283;
pub const PUNCH_DISPLACEMENT: f64 = -0.06;
pub const COOK_DISPLACEMENT: f64 = 0.12;
/// Length unit of the Cook panel: the classical 48 × 44 panel becomes
/// `48·s × 44·s`.
pub const COOK_SCALE: f64 = 0.035;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Problem {
    CubeNormal,
    CubeShearA,
    CubeShearB,
    Punch,
    Cook,
}

impl Problem {
    pub const ALL: [Problem; 5] = [
        Problem::CubeNormal,
        Problem::CubeShearA,
        Problem::CubeShearB,
        Problem::Punch,
        Problem::Cook,
    ];
    pub const CUBES: [Problem; 3] = [Problem::CubeNormal, Problem::CubeShearA, Problem::CubeShearB];

    pub fn name(&self) -> &'static str {
        match self {
            Problem::CubeNormal => "cube-normal",
            Problem::CubeShearA => "cube-shear-a",
            Problem::CubeShearB => "cube-shear-b",
            Problem::Punch => "punch",
            Problem::Cook => "cook",
        }
    }

    pub fn default_magnitude(&self) -> f64 {
        match self {
            Problem::CubeNormal => CUBE_NORMAL_DISPLACEMENT,
            Problem::CubeShearA => CUBE_SHEAR_A_DISPLACEMENT,
            Problem::CubeShearB => CUBE_SHEAR_B_DISPLACEMENT,
            Problem::Punch => PUNCH_DISPLACEMENT,
            Problem::Cook => COOK_DISPLACEMENT,
        }
    }

    pub fn default_divisions(&self) -> [usize; 3] {
        match self {
            Problem::CubeNormal | Problem::CubeShearA | Problem::CubeShearB => [8, 8, 8],
            Problem::Punch => [7, 7, 7],
            Problem::Cook => [16, 16, 1],
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

/// Mesh and constraints at the default resolution.
pub fn apply_benchmark(problem: Problem, magnitude: Option<f64>) -> Result<(HexMesh, BcSet)> {
    benchmark_with_divisions(problem, magnitude, problem.default_divisions())
}

pub fn benchmark_with_divisions(
    problem: Problem,
    magnitude: Option<f64>,
    divisions: [usize; 3],
) -> Result<(HexMesh, BcSet)> {
    let m = magnitude.unwrap_or(problem.default_magnitude());
    if !m.is_finite() {
        return Err(Error::InvalidArgs(format!("load magnitude {m}")));
    }
    let [nx, ny, nz] = divisions;
    let mut bcs = BcSet::new();
    let mesh = match problem {
        Problem::CubeNormal | Problem::CubeShearA => {
            let mesh = make_cube_mesh(nx, ny, nz, [1.0; 3])?;
            bcs.prescribe_nodes(&mesh.nodes_where(|l| l[0] == 0), [0.0; 3])?;
            let load = if problem == Problem::CubeNormal {
                [m, 0.0, 0.0]
            } else {
                [0.0, m, 0.0]
            };
            bcs.prescribe_nodes(&mesh.nodes_where(|l| l[0] == nx), load)?;
            mesh
        }
        Problem::CubeShearB => {
            let mesh = make_cube_mesh(nx, ny, nz, [1.0; 3])?;
            bcs.prescribe_nodes(&mesh.nodes_where(|l| l[2] == 0), [0.0; 3])?;
            bcs.prescribe_nodes(&mesh.nodes_where(|l| l[2] == nz), [m, 0.0, 0.0])?;
            mesh
        }
        Problem::Punch => {
            if nx < 3 || ny < 3 || (nx - 3) % 2 != 0 || (ny - 3) % 2 != 0 {
                return Err(Error::InvalidArgs(format!(
                    "punch needs odd in-plane divisions >= 3 (got {nx} x {ny})"
                )));
            }
            let mesh = make_cube_mesh(nx, ny, nz, [1.0; 3])?;
            bcs.prescribe_nodes(&mesh.nodes_where(|l| l[2] == 0), [0.0; 3])?;
            let (x0, y0) = ((nx - 3) / 2, (ny - 3) / 2);
            let patch =
                mesh.nodes_where(|l| l[2] == nz && (x0..=x0 + 3).contains(&l[0]) && (y0..=y0 + 3).contains(&l[1]));
            bcs.prescribe_nodes(&patch, [0.0, 0.0, m])?;
            mesh
        }
        Problem::Cook => {
            let s = COOK_SCALE;
            let depth = 3.0 * s;
            let mesh = make_mapped_mesh(divisions, |t| {
                let x = 48.0 * t[0];
                let bottom = 44.0 * t[0];
                let top = 44.0 + 16.0 * t[0];
                [s * x, s * (bottom + (top - bottom) * t[1]), depth * t[2]]
            })?;
            for n in 0..mesh.n_nodes() {
                bcs.prescribe(n, 2, 0.0)?;
            }
            bcs.prescribe_nodes(&mesh.nodes_where(|l| l[0] == 0), [0.0; 3])?;
            for n in mesh.nodes_where(|l| l[0] == nx) {
                bcs.prescribe(n, 1, m)?;
            }
            mesh
        }
    };
    Ok((mesh, bcs))
}
