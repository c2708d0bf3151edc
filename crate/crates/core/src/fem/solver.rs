//! Global assembly and the modified Newton-Raphson iteration.
//!
//! Each load step starts from the previous solution. Iteration 0 imposes the
//! prescribed displacement increment through the tangent (a linear
//! predictor), so no element sees the full boundary jump at once; later
//! iterations solve `K_ff Δu_f = −G_f`. Convergence is measured by
//! `‖G_f‖₂ / ‖r₀‖₂`, where `r₀` is the predictor right-hand side.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::backend::{FreezeRule, MaterialBackend, UpdateKind};
use crate::fem::element::{
    element_residual_and_tangent, mesh_geometry, ElementGeometry, GaussRecord, ELEMENT_DOFS, GAUSS_POINTS,
};
use crate::fem::mesh::HexMesh;
use crate::fem::skyline::SkylineMatrix;

/// One prescribed displacement component at full load.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dirichlet {
    pub node: usize,
    pub dof: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BcSet {
    constraints: Vec<Dirichlet>,
}

impl BcSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a constraint; the same component may be prescribed twice only
    /// with the same value.
    pub fn prescribe(&mut self, node: usize, dof: usize, value: f64) -> Result<()> {
        if dof > 2 || !value.is_finite() {
            return Err(Error::InvalidArgs(format!(
                "bad constraint: node {node}, dof {dof}, value {value}"
            )));
        }
        if let Some(old) = self.constraints.iter().find(|c| c.node == node && c.dof == dof) {
            if old.value != value {
                return Err(Error::InvalidArgs(format!(
                    "node {node} dof {dof} prescribed as both {} and {value}",
                    old.value
                )));
            }
            return Ok(());
        }
        self.constraints.push(Dirichlet { node, dof, value });
        Ok(())
    }

    /// Prescribes all three components of every listed node.
    pub fn prescribe_nodes(&mut self, nodes: &[usize], value: [f64; 3]) -> Result<()> {
        for &n in nodes {
            for (d, v) in value.iter().enumerate() {
                self.prescribe(n, d, *v)?;
            }
        }
        Ok(())
    }

    pub fn constraints(&self) -> &[Dirichlet] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NrConfig {
    pub c_tol: f64,
    /// Relative residual tolerance.
    pub g_tol: f64,
    pub max_iter: usize,
    pub freeze_enabled: bool,
    pub load_steps: usize,
}

impl Default for NrConfig {
    fn default() -> Self {
        NrConfig {
            c_tol: 0.01,
            g_tol: 1e-8,
            max_iter: 12,
            freeze_enabled: true,
            load_steps: 1,
        }
    }
}

impl NrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_tol > 0.0) || !(self.g_tol > 0.0) || self.max_iter == 0 || self.load_steps == 0 {
            return Err(Error::InvalidArgs(format!("invalid Newton settings {self:?}")));
        }
        Ok(())
    }

    pub fn freeze_rule(&self) -> FreezeRule {
        FreezeRule {
            enabled: self.freeze_enabled,
            c_tol: self.c_tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub step: usize,
    pub iter: usize,
    pub res_abs: f64,
    pub res_rel: f64,
    pub n_refit: usize,
    pub n_frozen: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    /// The given load step hit `max_iter` above tolerance.
    NotConverged {
        step: usize,
    },
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Nodal displacements, three per node.
    pub u: Vec<f64>,
    pub trace: Vec<IterationRecord>,
    /// `(F, S)` per element and Gauss point at the last assembled state.
    pub gauss: Vec<[GaussRecord; GAUSS_POINTS]>,
    pub extrapolations: usize,
}

impl SolveOutcome {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    /// Newton iterations of the last load step.
    pub fn iterations(&self) -> usize {
        self.trace.last().map_or(0, |r| r.iter)
    }

    pub fn final_residual(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.res_rel)
    }

    /// `max |F_ij − δ_ij|` over all Gauss points.
    pub fn max_f_deviation(&self) -> f64 {
        self.gauss
            .iter()
            .flatten()
            .map(|g| (g.f - crate::mech::Tensor2::identity()).abs().max())
            .fold(0.0, f64::max)
    }

    /// `max |F_12|` over all Gauss points.
    pub fn max_abs_f12(&self) -> f64 {
        self.gauss
            .iter()
            .flatten()
            .map(|g| g.f[(0, 1)].abs())
            .fold(0.0, f64::max)
    }
}

/// Equation numbers of the unconstrained dofs and the skyline profile of
/// the reduced stiffness.
#[derive(Clone, Debug)]
pub struct DofMap {
    /// `eq[dof]` is the equation number of a free dof.
    pub eq: Vec<Option<usize>>,
    pub n_eq: usize,
    first: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: &HexMesh, constrained: &[bool]) -> Self {
        let mut eq = vec![None; mesh.n_dofs()];
        let mut n_eq = 0;
        for (dof, slot) in eq.iter_mut().enumerate() {
            if !constrained[dof] {
                *slot = Some(n_eq);
                n_eq += 1;
            }
        }
        let mut first: Vec<usize> = (0..n_eq).collect();
        for conn in &mesh.elements {
            let eqs: Vec<usize> = conn
                .iter()
                .flat_map(|&n| (0..3).map(move |d| 3 * n + d))
                .filter_map(|dof| eq[dof])
                .collect();
            if let Some(&lo) = eqs.iter().min() {
                for &e in &eqs {
                    first[e] = first[e].min(lo);
                }
            }
        }
        DofMap { eq, n_eq, first }
    }

    pub fn all_free(mesh: &HexMesh) -> Self {
        Self::new(mesh, &vec![false; mesh.n_dofs()])
    }

    pub fn new_matrix(&self) -> SkylineMatrix {
        SkylineMatrix::with_profile(self.first.clone())
    }
}

/// Assembled global quantities at one displacement state.
pub struct Assembly {
    /// Internal force for every dof (constrained ones included).
    pub residual: Vec<f64>,
    /// Tangent restricted to the free equations.
    pub tangent: SkylineMatrix,
    /// `K_fc ū` for the `ū` passed to [`assemble`], per free equation.
    pub coupling: Vec<f64>,
    pub n_refit: usize,
    pub n_frozen: usize,
    pub records: Vec<[GaussRecord; GAUSS_POINTS]>,
}

fn element_dofs(conn: &[usize; 8]) -> [usize; ELEMENT_DOFS] {
    std::array::from_fn(|k| 3 * conn[k / 3] + k % 3)
}

/// Evaluates every element (in parallel) and scatters the contributions in
/// element order.
#[allow(clippy::too_many_arguments)]
pub fn assemble<B: MaterialBackend>(
    mesh: &HexMesh,
    geoms: &[ElementGeometry],
    dofs: &DofMap,
    u: &[f64],
    constrained_increment: Option<&[f64]>,
    backend: &B,
    states: &mut [[B::State; GAUSS_POINTS]],
    rule: &FreezeRule,
) -> Result<Assembly> {
    backend.begin_pass();
    let per_element: Vec<_> = states
        .par_iter_mut()
        .zip(geoms.par_iter())
        .zip(mesh.elements.par_iter())
        .map(|((state, geom), conn)| {
            let gdofs = element_dofs(conn);
            let ue: [f64; ELEMENT_DOFS] = gdofs.map(|d| u[d]);
            let mut refit = 0;
            let mut frozen = 0;
            let out = element_residual_and_tangent(geom, &ue, |g, c| {
                let (resp, kind) = backend.evaluate(&mut state[g], c, rule)?;
                match kind {
                    UpdateKind::Refit => refit += 1,
                    UpdateKind::Frozen => frozen += 1,
                    UpdateKind::Direct => {}
                }
                Ok(resp)
            })?;
            Ok((out, refit, frozen))
        })
        .collect::<Result<_>>()?;

    let mut residual = vec![0.0; mesh.n_dofs()];
    let mut tangent = dofs.new_matrix();
    let mut coupling = vec![0.0; dofs.n_eq];
    let mut n_refit = 0;
    let mut n_frozen = 0;
    let mut records = Vec::with_capacity(per_element.len());
    for ((out, refit, frozen), conn) in per_element.into_iter().zip(&mesh.elements) {
        n_refit += refit;
        n_frozen += frozen;
        let gdofs = element_dofs(conn);
        for (a, &ga) in gdofs.iter().enumerate() {
            residual[ga] += out.residual[a];
            let Some(ea) = dofs.eq[ga] else { continue };
            for (b, &gb) in gdofs.iter().enumerate() {
                let k = out.tangent[a * ELEMENT_DOFS + b];
                match dofs.eq[gb] {
                    Some(eb) if eb <= ea => tangent.add(ea, eb, k),
                    Some(_) => {}
                    None => {
                        if let Some(du) = constrained_increment {
                            coupling[ea] += k * du[gb];
                        }
                    }
                }
            }
        }
        records.push(out.records);
    }
    Ok(Assembly {
        residual,
        tangent,
        coupling,
        n_refit,
        n_frozen,
        records,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Displacement-driven quasi-static solve with per-Gauss-point surrogate
/// freezing.
pub fn solve_modified_nr<B: MaterialBackend>(
    mesh: &HexMesh,
    bcs: &BcSet,
    backend: &B,
    cfg: &NrConfig,
) -> Result<SolveOutcome> {
    cfg.validate()?;
    let ndof = mesh.n_dofs();
    let mut constrained = vec![false; ndof];
    let mut full_load = vec![0.0; ndof];
    for c in bcs.constraints() {
        if c.node >= mesh.n_nodes() {
            return Err(Error::InvalidArgs(format!("constraint on missing node {}", c.node)));
        }
        constrained[3 * c.node + c.dof] = true;
        full_load[3 * c.node + c.dof] = c.value;
    }
    let dofs = DofMap::new(mesh, &constrained);
    let geoms = mesh_geometry(mesh)?;
    let rule = cfg.freeze_rule();
    let mut states: Vec<[B::State; GAUSS_POINTS]> = (0..mesh.n_elements())
        .map(|_| std::array::from_fn(|_| backend.init_state()))
        .collect();
    let mut u = vec![0.0; ndof];
    let mut trace = Vec::new();
    let mut gauss = Vec::new();
    let mut status = SolveStatus::Converged;

    let free_part = |full: &[f64]| -> Vec<f64> {
        let mut r = vec![0.0; dofs.n_eq];
        for (dof, e) in dofs.eq.iter().enumerate() {
            if let Some(e) = e {
                r[*e] = full[dof];
            }
        }
        r
    };

    for step in 1..=cfg.load_steps {
        let lambda = step as f64 / cfg.load_steps as f64;
        states.iter_mut().flatten().for_each(|s| backend.begin_load_step(s));
        let increment: Vec<f64> = (0..ndof)
            .map(|d| {
                if constrained[d] {
                    lambda * full_load[d] - u[d]
                } else {
                    0.0
                }
            })
            .collect();

        let mut asm = assemble(mesh, &geoms, &dofs, &u, Some(&increment), backend, &mut states, &rule)?;
        let mut rhs: Vec<f64> = free_part(&asm.residual)
            .iter()
            .zip(&asm.coupling)
            .map(|(g, k)| g + k)
            .collect();
        let r0 = norm(&rhs);
        trace.push(IterationRecord {
            step,
            iter: 0,
            res_abs: r0,
            res_rel: if r0 > 0.0 { 1.0 } else { 0.0 },
            n_refit: asm.n_refit,
            n_frozen: asm.n_frozen,
        });
        for d in 0..ndof {
            if constrained[d] {
                u[d] += increment[d];
            }
        }
        if r0 == 0.0 {
            gauss = asm.records;
            continue;
        }

        let mut converged = false;
        for iter in 1..=cfg.max_iter {
            asm.tangent.factor()?;
            asm.tangent.solve_in_place(&mut rhs);
            for (dof, e) in dofs.eq.iter().enumerate() {
                if let Some(e) = e {
                    u[dof] -= rhs[*e];
                }
            }
            asm = assemble(mesh, &geoms, &dofs, &u, None, backend, &mut states, &rule)?;
            rhs = free_part(&asm.residual);
            let res = norm(&rhs);
            let rel = res / r0;
            trace.push(IterationRecord {
                step,
                iter,
                res_abs: res,
                res_rel: rel,
                n_refit: asm.n_refit,
                n_frozen: asm.n_frozen,
            });
            log::debug!(
                "step {step} iter {iter}: rel {rel:e} refit {} frozen {}",
                asm.n_refit,
                asm.n_frozen
            );
            if !rel.is_finite() {
                break;
            }
            if rel <= cfg.g_tol {
                converged = true;
                break;
            }
        }
        gauss = asm.records;
        if !converged {
            status = SolveStatus::NotConverged { step };
            break;
        }
    }
    Ok(SolveOutcome {
        status,
        u,
        trace,
        gauss,
        extrapolations: backend.extrapolations(),
    })
}
