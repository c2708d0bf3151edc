//! Finite-strain kinematics, Voigt bookkeeping and the analytical
//! hyperelastic laws used as data sources.
//!
//! Voigt vectors hold raw tensor components in the order
//! `[11, 22, 33, 23, 31, 12]`; no engineering-shear factor is applied here.
//! The 6×6 tangent holds the tensor components `D_ijkl = 2 ∂S_ij/∂C_kl`
//! indexed by the same pair ordering, so it acts on engineering-shear
//! Green-Lagrange strain increments.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Matrix6};

use crate::error::{Error, Result};

pub type Tensor2 = Matrix3<f64>;

/// Tensor index pairs of the six Voigt slots.
pub const VOIGT_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (1, 2), (2, 0), (0, 1)];

/// Smallest admissible determinant of F or C.
pub const DET_FLOOR: f64 = 1e-12;

/// Right Cauchy-Green tensor in Voigt form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VoigtStrain(pub [f64; 6]);

/// Second Piola-Kirchhoff stress in Voigt form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VoigtStress(pub [f64; 6]);

/// Row-major 6×6 material tangent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVoigt(pub [f64; 36]);

/// Components `[F11, F22, F33, F23, F31, F12]` of a symmetric applied
/// deformation gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AppliedStretch(pub [f64; 6]);

impl AppliedStretch {
    pub const REFERENCE: AppliedStretch = AppliedStretch([1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
}

fn sym_to_voigt(t: &Tensor2) -> [f64; 6] {
    let mut v = [0.0; 6];
    for (slot, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
        v[slot] = t[(i, j)];
    }
    v
}

fn voigt_to_sym(v: &[f64; 6]) -> Tensor2 {
    Matrix3::new(v[0], v[5], v[4], v[5], v[1], v[3], v[4], v[3], v[2])
}

impl VoigtStrain {
    pub const IDENTITY: VoigtStrain = VoigtStrain([1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);

    pub fn to_tensor(&self) -> Tensor2 {
        voigt_to_sym(&self.0)
    }

    /// Takes the upper-triangular entries of `c`.
    pub fn from_tensor(c: &Tensor2) -> Self {
        VoigtStrain(sym_to_voigt(c))
    }

    /// Frobenius norm of the difference of the two full 3×3 tensors
    /// (off-diagonal components counted twice).
    pub fn frobenius_distance(&self, other: &VoigtStrain) -> f64 {
        let d: Vec<f64> = self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect();
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + 2.0 * (d[3] * d[3] + d[4] * d[4] + d[5] * d[5])).sqrt()
    }

    pub fn euclidean_distance(&self, other: &VoigtStrain) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl VoigtStress {
    pub const ZERO: VoigtStress = VoigtStress([0.0; 6]);

    pub fn to_tensor(&self) -> Tensor2 {
        voigt_to_sym(&self.0)
    }

    pub fn from_tensor(s: &Tensor2) -> Self {
        VoigtStress(sym_to_voigt(s))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl TangentVoigt {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[6 * row + col]
    }

    pub fn to_matrix(&self) -> Matrix6<f64> {
        Matrix6::from_row_slice(&self.0)
    }

    pub fn from_matrix(m: &Matrix6<f64>) -> Self {
        let mut d = [0.0; 36];
        for r in 0..6 {
            for c in 0..6 {
                d[6 * r + c] = m[(r, c)];
            }
        }
        TangentVoigt(d)
    }

    /// `(D + Dᵀ) / 2`
    pub fn symmetrized(&self) -> Self {
        let mut d = self.0;
        for r in 0..6 {
            for c in (r + 1)..6 {
                let avg = 0.5 * (self.0[6 * r + c] + self.0[6 * c + r]);
                d[6 * r + c] = avg;
                d[6 * c + r] = avg;
            }
        }
        TangentVoigt(d)
    }

    /// `max |D_ij - D_ji| / max |D|`
    pub fn asymmetry(&self) -> f64 {
        let scale = self.0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for r in 0..6 {
            for c in (r + 1)..6 {
                worst = worst.max((self.0[6 * r + c] - self.0[6 * c + r]).abs());
            }
        }
        worst / scale
    }

    fn from_components(f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut d = [0.0; 36];
        for (a, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
            for (b, &(k, l)) in VOIGT_PAIRS.iter().enumerate() {
                d[6 * a + b] = f(i, j, k, l);
            }
        }
        TangentVoigt(d)
    }
}

/// Symmetric applied deformation gradient built from its six components.
pub fn compose_f(f_app: &AppliedStretch) -> Tensor2 {
    voigt_to_sym(&f_app.0)
}

/// `C = FᵀF` in Voigt form.
pub fn right_cauchy_green(f: &Tensor2) -> Result<VoigtStrain> {
    let det = f.determinant();
    if !(det > DET_FLOOR) {
        return Err(Error::NonInvertibleF(det));
    }
    Ok(VoigtStrain::from_tensor(&(f.transpose() * f)))
}

/// Inverse and determinant of a symmetric C, rejecting singular or
/// non-positive determinants.
fn invert_c(c: &VoigtStrain) -> Result<(Tensor2, Tensor2, f64)> {
    let ct = c.to_tensor();
    let det = ct.determinant();
    if !(det > DET_FLOOR) {
        return Err(Error::SingularC(det));
    }
    let inv = ct.try_inverse().ok_or(Error::SingularC(det))?;
    // Symmetrize away round-off so the stress stays exactly symmetric.
    let inv = 0.5 * (inv + inv.transpose());
    Ok((ct, inv, det))
}

/// `(A ⊙ A)_ijkl = ½ (A_ik A_jl + A_il A_jk)`
#[inline]
fn odot(a: &Tensor2, i: usize, j: usize, k: usize, l: usize) -> f64 {
    0.5 * (a[(i, k)] * a[(j, l)] + a[(i, l)] * a[(j, k)])
}

/// A hyperelastic law evaluated on the right Cauchy-Green tensor.
pub trait HyperelasticLaw {
    fn energy(&self, c: &VoigtStrain) -> Result<f64>;
    fn stress(&self, c: &VoigtStrain) -> Result<VoigtStress>;
    fn tangent(&self, c: &VoigtStrain) -> Result<TangentVoigt>;

    fn response(&self, c: &VoigtStrain) -> Result<(VoigtStress, TangentVoigt)> {
        Ok((self.stress(c)?, self.tangent(c)?))
    }
}

/// Transversely isotropic law with a single fiber family:
/// `Ψ = ½μ(tr C − 3 − 2 ln J) + ½β(J − 1)² + ½γ(I4 − 1)²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransIsoParams {
    pub mu: f64,
    pub beta: f64,
    pub gamma: f64,
    pub a0: [f64; 3],
}

impl Default for TransIsoParams {
    fn default() -> Self {
        TransIsoParams {
            mu: 6.175e5,
            beta: 5e4,
            gamma: 1.8e5,
            a0: [1.0, 0.0, 0.0],
        }
    }
}

impl TransIsoParams {
    pub fn new(mu: f64, beta: f64, gamma: f64, a0: [f64; 3]) -> Result<Self> {
        let norm = a0.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(mu > 0.0 && beta > 0.0 && gamma >= 0.0) {
            return Err(Error::InvalidArgs(format!(
                "trans-iso moduli must satisfy mu > 0, beta > 0, gamma >= 0 (got {mu}, {beta}, {gamma})"
            )));
        }
        if !((norm - 1.0).abs() < 1e-12) {
            return Err(Error::InvalidArgs(format!(
                "fiber direction must be a unit vector (|a0| = {norm})"
            )));
        }
        Ok(TransIsoParams { mu, beta, gamma, a0 })
    }

    fn fiber_dyad(&self) -> Tensor2 {
        let a = nalgebra::Vector3::from(self.a0);
        a * a.transpose()
    }
}

impl HyperelasticLaw for TransIsoParams {
    fn energy(&self, c: &VoigtStrain) -> Result<f64> {
        let (ct, _, det) = invert_c(c)?;
        let j = det.sqrt();
        let i4 = (ct.component_mul(&self.fiber_dyad())).sum();
        Ok(0.5 * self.mu * (ct.trace() - 3.0 - 2.0 * j.ln())
            + 0.5 * self.beta * (j - 1.0).powi(2)
            + 0.5 * self.gamma * (i4 - 1.0).powi(2))
    }

    fn stress(&self, c: &VoigtStrain) -> Result<VoigtStress> {
        let (ct, ci, det) = invert_c(c)?;
        let j = det.sqrt();
        let a = self.fiber_dyad();
        let i4 = ct.component_mul(&a).sum();
        let s =
            self.mu * (Tensor2::identity() - ci) + self.beta * j * (j - 1.0) * ci + 2.0 * self.gamma * (i4 - 1.0) * a;
        Ok(VoigtStress::from_tensor(&s))
    }

    fn tangent(&self, c: &VoigtStrain) -> Result<TangentVoigt> {
        let (_, ci, det) = invert_c(c)?;
        let j = det.sqrt();
        let a = self.fiber_dyad();
        let vol = self.beta * j * (2.0 * j - 1.0);
        let sym = 2.0 * self.mu - 2.0 * self.beta * j * (j - 1.0);
        let fib = 4.0 * self.gamma;
        Ok(TangentVoigt::from_components(|i, k_, m, n| {
            vol * ci[(i, k_)] * ci[(m, n)] + sym * odot(&ci, i, k_, m, n) + fib * a[(i, k_)] * a[(m, n)]
        }))
    }
}

/// Compressible Neo-Hookean law
/// `Ψ = (c1/β)(J^(−2β) − 1) + c1(I1 − 3)` with `β = ν/(1 − 2ν)`, `c1 = μ/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeoHookeParams {
    pub mu: f64,
    pub nu: f64,
    pub c1: f64,
    pub beta: f64,
}

impl NeoHookeParams {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if !(mu > 0.0 && nu > 0.0 && nu < 0.5) {
            return Err(Error::InvalidArgs(format!(
                "neo-hooke requires mu > 0 and 0 < nu < 0.5 (got {mu}, {nu})"
            )));
        }
        Ok(NeoHookeParams {
            mu,
            nu,
            c1: 0.5 * mu,
            beta: nu / (1.0 - 2.0 * nu),
        })
    }

    /// Poisson ratio from the isotropic relation `ν = (3K − 2μ) / (2(3K + μ))`.
    pub fn from_shear_bulk(mu: f64, bulk: f64) -> Result<Self> {
        Self::new(mu, (3.0 * bulk - 2.0 * mu) / (2.0 * (3.0 * bulk + mu)))
    }
}

impl Default for NeoHookeParams {
    /// Matrix phase: μ = 80e3 MPa, K = 160e3 MPa (ν = 2/7).
    fn default() -> Self {
        Self::from_shear_bulk(80e3, 160e3).expect("default neo-hooke parameters are valid")
    }
}

impl HyperelasticLaw for NeoHookeParams {
    fn energy(&self, c: &VoigtStrain) -> Result<f64> {
        let (ct, _, det) = invert_c(c)?;
        let j = det.sqrt();
        Ok(self.c1 / self.beta * (j.powf(-2.0 * self.beta) - 1.0) + self.c1 * (ct.trace() - 3.0))
    }

    fn stress(&self, c: &VoigtStrain) -> Result<VoigtStress> {
        let (_, ci, det) = invert_c(c)?;
        // J^(−2β) = det(C)^(−β)
        let jb = det.powf(-self.beta);
        let s = 2.0 * self.c1 * (Tensor2::identity() - jb * ci);
        Ok(VoigtStress::from_tensor(&s))
    }

    fn tangent(&self, c: &VoigtStrain) -> Result<TangentVoigt> {
        let (_, ci, det) = invert_c(c)?;
        let scale = 4.0 * self.c1 * det.powf(-self.beta);
        let beta = self.beta;
        Ok(TangentVoigt::from_components(|i, j, k, l| {
            scale * (beta * ci[(i, j)] * ci[(k, l)] + odot(&ci, i, j, k, l))
        }))
    }
}

/// The analytical laws available as data sources.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Oracle {
    TransIso(TransIsoParams),
    NeoHooke(NeoHookeParams),
}

impl Oracle {
    pub fn name(&self) -> &'static str {
        match self {
            Oracle::TransIso(_) => "trans-iso",
            Oracle::NeoHooke(_) => "neo-hooke",
        }
    }
}

impl fmt::Display for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Oracle {
    type Err = Error;

    /// Parses the oracle name, yielding default parameters.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trans-iso" => Ok(Oracle::TransIso(TransIsoParams::default())),
            "neo-hooke" => Ok(Oracle::NeoHooke(NeoHookeParams::default())),
            other => Err(Error::InvalidArgs(format!(
                "unknown oracle `{other}` (expected trans-iso or neo-hooke)"
            ))),
        }
    }
}

impl HyperelasticLaw for Oracle {
    fn energy(&self, c: &VoigtStrain) -> Result<f64> {
        match self {
            Oracle::TransIso(p) => p.energy(c),
            Oracle::NeoHooke(p) => p.energy(c),
        }
    }

    fn stress(&self, c: &VoigtStrain) -> Result<VoigtStress> {
        match self {
            Oracle::TransIso(p) => p.stress(c),
            Oracle::NeoHooke(p) => p.stress(c),
        }
    }

    fn tangent(&self, c: &VoigtStrain) -> Result<TangentVoigt> {
        match self {
            Oracle::TransIso(p) => p.tangent(c),
            Oracle::NeoHooke(p) => p.tangent(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Random applied stretch inside the 17.5% training domain.
    fn random_strain(rng: &mut ChaCha8Rng) -> VoigtStrain {
        let mut f = AppliedStretch::REFERENCE.0;
        for v in f.iter_mut() {
            *v += rng.gen_range(-0.175..0.175);
        }
        right_cauchy_green(&compose_f(&AppliedStretch(f))).unwrap()
    }

    /// Central-difference tangent `2 ∂S/∂C` from the stress map. A
    /// perturbation of a shear slot moves both symmetric tensor entries,
    /// which already supplies the factor 2 for those columns.
    fn fd_tangent(law: &impl HyperelasticLaw, c: &VoigtStrain, h: f64) -> [f64; 36] {
        let mut d = [0.0; 36];
        for col in 0..6 {
            let mut cp = *c;
            let mut cm = *c;
            cp.0[col] += h;
            cm.0[col] -= h;
            let sp = law.stress(&cp).unwrap();
            let sm = law.stress(&cm).unwrap();
            let factor = if col < 3 { 2.0 } else { 1.0 };
            for row in 0..6 {
                d[6 * row + col] = factor * (sp.0[row] - sm.0[row]) / (2.0 * h);
            }
        }
        d
    }

    /// Central-difference stress `2 ∂Ψ/∂C` from the energy.
    fn fd_stress(law: &impl HyperelasticLaw, c: &VoigtStrain, h: f64) -> [f64; 6] {
        let mut s = [0.0; 6];
        for slot in 0..6 {
            let mut cp = *c;
            let mut cm = *c;
            cp.0[slot] += h;
            cm.0[slot] -= h;
            let dpsi = (law.energy(&cp).unwrap() - law.energy(&cm).unwrap()) / (2.0 * h);
            s[slot] = if slot < 3 { 2.0 * dpsi } else { dpsi };
        }
        s
    }

    fn rel_err(a: &[f64], b: &[f64]) -> f64 {
        let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
    }

    #[test]
    fn compose_f_places_components() {
        assert_eq!(compose_f(&AppliedStretch::REFERENCE), Tensor2::identity());
        let f = compose_f(&AppliedStretch([1.1, 1.0, 1.0, 0.0, 0.0, 0.0]));
        assert_eq!(f, Matrix3::from_diagonal(&nalgebra::Vector3::new(1.1, 1.0, 1.0)));
        let f = compose_f(&AppliedStretch([1.0, 1.0, 1.0, 0.05, 0.0, 0.0]));
        let mut expected = Tensor2::identity();
        expected[(1, 2)] = 0.05;
        expected[(2, 1)] = 0.05;
        assert_eq!(f, expected);
    }

    #[test]
    fn right_cauchy_green_examples() {
        assert_eq!(right_cauchy_green(&Tensor2::identity()).unwrap(), VoigtStrain::IDENTITY);
        let c = right_cauchy_green(&compose_f(&AppliedStretch([1.1, 1.0, 1.0, 0.0, 0.0, 0.0]))).unwrap();
        assert_relative_eq!(c.0[0], 1.21, epsilon = 1e-15);
        // F = I + 0.05 (e2⊗e3 + e3⊗e2): C22 = C33 = 1 + 0.05², C23 = 2·0.05.
        let c = right_cauchy_green(&compose_f(&AppliedStretch([1.0, 1.0, 1.0, 0.05, 0.0, 0.0]))).unwrap();
        assert_relative_eq!(c.0[0], 1.0);
        assert_relative_eq!(c.0[1], 1.0025, epsilon = 1e-15);
        assert_relative_eq!(c.0[2], 1.0025, epsilon = 1e-15);
        assert_relative_eq!(c.0[3], 0.1, epsilon = 1e-15);
        assert_eq!(&c.0[4..], &[0.0, 0.0]);
    }

    #[test]
    fn singular_inputs_are_rejected() {
        assert!(matches!(
            right_cauchy_green(&Tensor2::zeros()),
            Err(Error::NonInvertibleF(_))
        ));
        let law = TransIsoParams::default();
        let c = VoigtStrain([1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(law.stress(&c), Err(Error::SingularC(_))));
        assert!(matches!(
            NeoHookeParams::default().tangent(&c),
            Err(Error::SingularC(_))
        ));
    }

    #[test]
    fn zero_stress_at_reference() {
        for oracle in ["trans-iso", "neo-hooke"] {
            let law: Oracle = oracle.parse().unwrap();
            let s = law.stress(&VoigtStrain::IDENTITY).unwrap();
            assert!(s.max_abs() <= 1e-12, "{oracle}: {s:?}");
        }
    }

    #[test]
    fn trans_iso_uniaxial_closed_form() {
        let p = TransIsoParams::default();
        let s = p.stress(&VoigtStrain([1.21, 1.0, 1.0, 0.0, 0.0, 0.0])).unwrap();
        // J = 1.1, C⁻¹₁₁ = 1/1.21, I4 = 1.21
        let expected = p.mu * (1.0 - 1.0 / 1.21) + p.beta * 1.1 * 0.1 / 1.21 + 2.0 * p.gamma * 0.21;
        assert_relative_eq!(s.0[0], expected, max_relative = 1e-14);
        // lateral: μ(1 − 1) + βJ(J−1)·1 = β·0.11
        assert_relative_eq!(s.0[1], p.beta * 0.11, max_relative = 1e-12);
        assert_eq!(&s.0[3..], &[0.0; 3]);
    }

    #[test]
    fn trans_iso_stretch_across_fiber_has_no_fiber_term() {
        let p = TransIsoParams::default();
        let s = p.stress(&VoigtStrain([1.0, 1.0, 1.21, 0.0, 0.0, 0.0])).unwrap();
        // I4 = 1 ⇒ S11 = μ(1 − 1) + βJ(J−1)·1
        assert_relative_eq!(s.0[0], p.beta * 1.1 * 0.1, max_relative = 1e-12);
        let no_fiber = TransIsoParams { gamma: 0.0, ..p };
        assert_relative_eq!(
            s.0[0],
            no_fiber
                .stress(&VoigtStrain([1.0, 1.0, 1.21, 0.0, 0.0, 0.0]))
                .unwrap()
                .0[0]
        );
    }

    #[test]
    fn neo_hooke_uniaxial_closed_form() {
        let p = NeoHookeParams::default();
        assert_relative_eq!(p.nu, 2.0 / 7.0, max_relative = 1e-15);
        assert_relative_eq!(p.beta, 2.0 / 3.0, max_relative = 1e-14);
        let s = p.stress(&VoigtStrain([1.21, 1.0, 1.0, 0.0, 0.0, 0.0])).unwrap();
        let jb = 1.21f64.powf(-p.beta);
        assert_relative_eq!(s.0[0], p.mu * (1.0 - jb / 1.21), max_relative = 1e-14);
        assert_relative_eq!(s.0[1], p.mu * (1.0 - jb), max_relative = 1e-14);
    }

    #[test]
    fn trans_iso_tangent_at_identity() {
        // At C = I: D = 2μ⊙I + β I⊗I + 4γ a⊗a.
        let p = TransIsoParams::default();
        let d = p.tangent(&VoigtStrain::IDENTITY).unwrap();
        assert_relative_eq!(d.get(0, 0), 2.0 * p.mu + p.beta + 4.0 * p.gamma, max_relative = 1e-14);
        assert_relative_eq!(d.get(1, 0), p.beta, max_relative = 1e-14);
        assert_relative_eq!(
            d.get(0, 0) - d.get(1, 0),
            2.0 * p.mu + 4.0 * p.gamma,
            max_relative = 1e-14
        );
        assert_relative_eq!(d.get(3, 3), p.mu, max_relative = 1e-14);
        let fd = fd_tangent(&p, &VoigtStrain::IDENTITY, 1e-6);
        assert!(rel_err(&d.0, &fd) < 1e-5);
    }

    #[test]
    fn tangents_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let laws = [
            Oracle::TransIso(TransIsoParams::default()),
            Oracle::NeoHooke(NeoHookeParams::default()),
        ];
        for _ in 0..200 {
            let c = random_strain(&mut rng);
            for law in &laws {
                let d = law.tangent(&c).unwrap();
                let err = rel_err(&d.0, &fd_tangent(law, &c, 1e-6));
                assert!(err < 1e-5, "{law}: {err:e} at {c:?}");
                assert!(d.asymmetry() < 1e-10, "{law}: asymmetric tangent");
            }
        }
    }

    #[test]
    fn stresses_match_energy_derivatives() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let laws = [
            Oracle::TransIso(TransIsoParams::default()),
            Oracle::NeoHooke(NeoHookeParams::default()),
        ];
        for _ in 0..50 {
            let c = random_strain(&mut rng);
            for law in &laws {
                let s = law.stress(&c).unwrap();
                let err = rel_err(&s.0, &fd_stress(law, &c, 1e-6));
                assert!(err < 1e-5, "{law}: {err:e}");
            }
        }
    }

    #[test]
    fn symmetric_f_squares_to_c() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let mut f = AppliedStretch::REFERENCE.0;
            for v in f.iter_mut() {
                *v += rng.gen_range(-0.175..0.175);
            }
            let ft = compose_f(&AppliedStretch(f));
            let c = right_cauchy_green(&ft).unwrap().to_tensor();
            let sq = ft * ft;
            assert!((c - sq).abs().max() <= 1e-12);
        }
    }

    #[test]
    fn frobenius_counts_off_diagonals_twice() {
        let a = VoigtStrain::IDENTITY;
        let b = VoigtStrain([1.0, 1.0, 1.0, 0.1, 0.0, 0.0]);
        assert_relative_eq!(a.frobenius_distance(&b), (2.0f64 * 0.01).sqrt());
        let c = VoigtStrain([1.1, 1.0, 1.0, 0.0, 0.0, 0.0]);
        assert_relative_eq!(a.frobenius_distance(&c), 0.1, max_relative = 1e-12);
    }

    #[test]
    fn parameter_validation() {
        assert!(TransIsoParams::new(1.0, 1.0, 0.0, [0.0, 1.0, 0.0]).is_ok());
        assert!(TransIsoParams::new(-1.0, 1.0, 0.0, [1.0, 0.0, 0.0]).is_err());
        assert!(TransIsoParams::new(1.0, 1.0, 1.0, [1.0, 1.0, 0.0]).is_err());
        assert!(NeoHookeParams::new(1.0, 0.5).is_err());
        assert!("mooney".parse::<Oracle>().is_err());
    }
}
