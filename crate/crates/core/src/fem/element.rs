//! Total-Lagrangian trilinear hexahedron with 2×2×2 Gauss quadrature.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::fem::mesh::{HexMesh, HEX_CORNERS};
use crate::mech::{right_cauchy_green, TangentVoigt, Tensor2, VoigtStrain, VoigtStress};

pub const GAUSS_POINTS: usize = 8;
pub const ELEMENT_DOFS: usize = 24;

/// Gauss abscissae `±1/√3` in the corner order of [`HEX_CORNERS`]; all
/// weights equal one.
fn gauss_points() -> [[f64; 3]; GAUSS_POINTS] {
    let g = 1.0 / 3f64.sqrt();
    HEX_CORNERS.map(|s| [s[0] * g, s[1] * g, s[2] * g])
}

/// Derivatives of the trilinear shape functions with respect to `(ξ, η, ζ)`.
pub fn shape_gradients_parent(xi: [f64; 3]) -> [[f64; 3]; 8] {
    HEX_CORNERS.map(|s| {
        let f = [1.0 + s[0] * xi[0], 1.0 + s[1] * xi[1], 1.0 + s[2] * xi[2]];
        [
            0.125 * s[0] * f[1] * f[2],
            0.125 * f[0] * s[1] * f[2],
            0.125 * f[0] * f[1] * s[2],
        ]
    })
}

/// Reference-configuration data of one element.
#[derive(Clone, Debug)]
pub struct ElementGeometry {
    /// Element id used in error reports.
    pub element: usize,
    /// `∂N_a/∂X` at each Gauss point.
    pub grads: [[[f64; 3]; 8]; GAUSS_POINTS],
    /// Jacobian determinant of the parent map at each Gauss point.
    pub det_j: [f64; GAUSS_POINTS],
}

impl ElementGeometry {
    pub fn new(coords: &[[f64; 3]; 8]) -> Result<Self> {
        let mut grads = [[[0.0; 3]; 8]; GAUSS_POINTS];
        let mut det_j = [0.0; GAUSS_POINTS];
        for (g, xi) in gauss_points().iter().enumerate() {
            let dn = shape_gradients_parent(*xi);
            // J_ij = ∂X_i/∂ξ_j
            let mut j = Matrix3::zeros();
            for a in 0..8 {
                for r in 0..3 {
                    for c in 0..3 {
                        j[(r, c)] += coords[a][r] * dn[a][c];
                    }
                }
            }
            let det = j.determinant();
            if !(det > 0.0) {
                return Err(Error::InvalidArgs(format!("non-positive element Jacobian {det:e}")));
            }
            let jinv_t = j.try_inverse().expect("positive determinant").transpose();
            for a in 0..8 {
                let v = jinv_t * Vector3::from(dn[a]);
                grads[g][a] = [v[0], v[1], v[2]];
            }
            det_j[g] = det;
        }
        Ok(ElementGeometry {
            element: 0,
            grads,
            det_j,
        })
    }

    /// `F = I + Σ_a u_a ⊗ ∇N_a` at Gauss point `g`.
    pub fn deformation_gradient(&self, g: usize, u: &[f64; ELEMENT_DOFS]) -> Tensor2 {
        let mut f = Tensor2::identity();
        for a in 0..8 {
            for i in 0..3 {
                for j in 0..3 {
                    f[(i, j)] += u[3 * a + i] * self.grads[g][a][j];
                }
            }
        }
        f
    }
}

pub fn mesh_geometry(mesh: &HexMesh) -> Result<Vec<ElementGeometry>> {
    mesh.elements
        .iter()
        .enumerate()
        .map(|(e, conn)| {
            let mut geom =
                ElementGeometry::new(&conn.map(|n| mesh.nodes[n])).map_err(|source| Error::AtGaussPoint {
                    element: e,
                    gauss_point: 0,
                    source: Box::new(source),
                })?;
            geom.element = e;
            Ok(geom)
        })
        .collect()
}

/// Stress and tangent at one Gauss point.
#[derive(Clone, Copy, Debug)]
pub struct MaterialResponse {
    pub s: VoigtStress,
    pub d: TangentVoigt,
}

/// Kinematics and stress recorded at one Gauss point.
#[derive(Clone, Copy, Debug)]
pub struct GaussRecord {
    pub f: Tensor2,
    pub s: VoigtStress,
}

pub struct ElementOutput {
    pub residual: [f64; ELEMENT_DOFS],
    /// Row-major `24 × 24`.
    pub tangent: Vec<f64>,
    pub records: [GaussRecord; GAUSS_POINTS],
}

/// Rows of the nonlinear strain-displacement operator for node gradient
/// `n`: `δE = B δu` with engineering shears `2δE23, 2δE31, 2δE12`.
#[inline]
fn b_matrix(f: &Tensor2, n: &[f64; 3]) -> [[f64; 3]; 6] {
    let mut b = [[0.0; 3]; 6];
    for i in 0..3 {
        b[0][i] = f[(i, 0)] * n[0];
        b[1][i] = f[(i, 1)] * n[1];
        b[2][i] = f[(i, 2)] * n[2];
        b[3][i] = f[(i, 1)] * n[2] + f[(i, 2)] * n[1];
        b[4][i] = f[(i, 2)] * n[0] + f[(i, 0)] * n[2];
        b[5][i] = f[(i, 0)] * n[1] + f[(i, 1)] * n[0];
    }
    b
}

/// Internal force and consistent tangent of one element. `material` maps
/// `(gauss point, C)` to the stress and tangent at that point.
pub fn element_residual_and_tangent(
    geom: &ElementGeometry,
    u: &[f64; ELEMENT_DOFS],
    mut material: impl FnMut(usize, &VoigtStrain) -> Result<MaterialResponse>,
) -> Result<ElementOutput> {
    let mut residual = [0.0; ELEMENT_DOFS];
    let mut tangent = vec![0.0; ELEMENT_DOFS * ELEMENT_DOFS];
    let mut records = [GaussRecord {
        f: Tensor2::identity(),
        s: VoigtStress::ZERO,
    }; GAUSS_POINTS];
    for g in 0..GAUSS_POINTS {
        let fail = |source| Error::AtGaussPoint {
            element: geom.element,
            gauss_point: g,
            source: Box::new(source),
        };
        let f = geom.deformation_gradient(g, u);
        let c = right_cauchy_green(&f).map_err(fail)?;
        let MaterialResponse { s, d } = material(g, &c).map_err(fail)?;
        records[g] = GaussRecord { f, s };
        let w = geom.det_j[g];
        let grads = &geom.grads[g];
        let b: [[[f64; 3]; 6]; 8] = std::array::from_fn(|a| b_matrix(&f, &grads[a]));
        let st = s.to_tensor();

        for a in 0..8 {
            for i in 0..3 {
                let mut acc = 0.0;
                for r in 0..6 {
                    acc += b[a][r][i] * s.0[r];
                }
                residual[3 * a + i] += w * acc;
            }
        }

        // D·B for every node column
        let mut db = [[[0.0; 3]; 6]; 8];
        for a in 0..8 {
            for r in 0..6 {
                for i in 0..3 {
                    let mut acc = 0.0;
                    for q in 0..6 {
                        acc += d.0[r * 6 + q] * b[a][q][i];
                    }
                    db[a][r][i] = acc;
                }
            }
        }
        for a in 0..8 {
            for bn in 0..8 {
                // geometric stiffness ∇N_a · S ∇N_b
                let mut geo = 0.0;
                for p in 0..3 {
                    for q in 0..3 {
                        geo += grads[a][p] * st[(p, q)] * grads[bn][q];
                    }
                }
                for i in 0..3 {
                    let row = (3 * a + i) * ELEMENT_DOFS;
                    for j in 0..3 {
                        let mut acc = 0.0;
                        for r in 0..6 {
                            acc += b[a][r][i] * db[bn][r][j];
                        }
                        if i == j {
                            acc += geo;
                        }
                        tangent[row + 3 * bn + j] += w * acc;
                    }
                }
            }
        }
    }
    Ok(ElementOutput {
        residual,
        tangent,
        records,
    })
}
