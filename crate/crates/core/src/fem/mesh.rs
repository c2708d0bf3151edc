//! Structured meshes of 8-node hexahedra.

use crate::error::{Error, Result};

/// Local node order of a hexahedron as `(ξ, η, ζ)` corner signs.
pub const HEX_CORNERS: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

#[derive(Clone, Debug, PartialEq)]
pub struct HexMesh {
    pub nodes: Vec<[f64; 3]>,
    pub elements: Vec<[usize; 8]>,
    /// Element counts `[nx, ny, nz]` of the structured generator.
    pub divisions: [usize; 3],
    /// Lattice index `(i, j, k)` of every node.
    pub lattice: Vec<[usize; 3]>,
}

impl HexMesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_dofs(&self) -> usize {
        3 * self.nodes.len()
    }

    /// Ids of the nodes whose lattice index satisfies `pred`.
    pub fn nodes_where(&self, pred: impl Fn([usize; 3]) -> bool) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&n| pred(self.lattice[n])).collect()
    }
}

/// Maps an `nx × ny × nz` lattice through `place`, which receives the
/// normalized lattice coordinates in `[0, 1]^3`. Nodes are numbered with
/// the axis of fewest divisions running fastest, which keeps the profile
/// of the assembled stiffness small.
pub fn make_mapped_mesh(divisions: [usize; 3], place: impl Fn([f64; 3]) -> [f64; 3]) -> Result<HexMesh> {
    if divisions.contains(&0) {
        return Err(Error::InvalidArgs(format!(
            "mesh divisions must be >= 1 (got {divisions:?})"
        )));
    }
    let counts = divisions.map(|d| d + 1);
    let mut axes = [0, 1, 2];
    axes.sort_by_key(|&a| (counts[a], a));
    let stride = {
        let mut s = [0usize; 3];
        s[axes[0]] = 1;
        s[axes[1]] = counts[axes[0]];
        s[axes[2]] = counts[axes[0]] * counts[axes[1]];
        s
    };
    let id = |ijk: [usize; 3]| ijk[0] * stride[0] + ijk[1] * stride[1] + ijk[2] * stride[2];
    let n_nodes = counts.iter().product();
    let mut nodes = vec![[0.0; 3]; n_nodes];
    let mut lattice = vec![[0; 3]; n_nodes];
    for k in 0..counts[2] {
        for j in 0..counts[1] {
            for i in 0..counts[0] {
                let ijk = [i, j, k];
                let t = [
                    i as f64 / divisions[0] as f64,
                    j as f64 / divisions[1] as f64,
                    k as f64 / divisions[2] as f64,
                ];
                nodes[id(ijk)] = place(t);
                lattice[id(ijk)] = ijk;
            }
        }
    }
    let mut elements = Vec::with_capacity(divisions.iter().product());
    for k in 0..divisions[2] {
        for j in 0..divisions[1] {
            for i in 0..divisions[0] {
                elements.push(HEX_CORNERS.map(|s| {
                    id([
                        i + (s[0] > 0.0) as usize,
                        j + (s[1] > 0.0) as usize,
                        k + (s[2] > 0.0) as usize,
                    ])
                }));
            }
        }
    }
    Ok(HexMesh {
        nodes,
        elements,
        divisions,
        lattice,
    })
}

/// Axis-aligned box `[0, lx] × [0, ly] × [0, lz]`.
pub fn make_cube_mesh(nx: usize, ny: usize, nz: usize, lengths: [f64; 3]) -> Result<HexMesh> {
    if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidArgs(format!(
            "box lengths must be positive (got {lengths:?})"
        )));
    }
    make_mapped_mesh([nx, ny, nz], |t| {
        [t[0] * lengths[0], t[1] * lengths[1], t[2] * lengths[2]]
    })
}
