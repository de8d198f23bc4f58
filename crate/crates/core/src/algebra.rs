//! Hermitian operators quadratic in the positions and momenta of three
//! oscillator modes.
//!
//! Units are ħ = m = 1. Phase-space coordinates are ordered
//! `z = (x1, x2, x3, p1, p2, p3)` and an operator is stored through its Weyl
//! symbol `G(z) = ½ zᵀMz + gᵀz + c`. For symbols of degree at most two the
//! Moyal bracket truncates to the Poisson bracket, so `[Ĝ1, Ĝ2] = i {G1, G2}`
//! holds exactly and commutators stay inside the representation.
//!
//! A unitary `e^{-itĜ}` generated by a homogeneous quadratic acts on the
//! coordinate operators as `U† ẑ U = S ẑ` with `S = exp(t J M)`; products of
//! unitaries map to products of these matrices in the same order.

use nalgebra::{Matrix6, Vector6};

use crate::error::{Error, Result};

pub const MODES: usize = 3;

/// Row of `x_k` in the phase-space ordering (axis index 0, 1, 2).
#[inline]
pub const fn x_index(k: usize) -> usize {
    k
}

/// Row of `p_k` in the phase-space ordering (axis index 0, 1, 2).
#[inline]
pub const fn p_index(k: usize) -> usize {
    k + MODES
}

/// The symplectic unit with `+1` in the upper-right block.
pub fn symplectic_unit() -> Matrix6<f64> {
    let mut j = Matrix6::zeros();
    for k in 0..MODES {
        j[(x_index(k), p_index(k))] = 1.0;
        j[(p_index(k), x_index(k))] = -1.0;
    }
    j
}

/// Reference frequency defining the bosons `b_k = √(ω₀/2)(x_k + i p_k/ω₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeBasis {
    omega0: f64,
}

impl ModeBasis {
    pub fn new(omega0: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "reference frequency must be positive, got {omega0}"
            )));
        }
        Ok(Self { omega0 })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    fn check_same(&self, other: &ModeBasis) -> Result<()> {
        if self.omega0 == other.omega0 {
            Ok(())
        } else {
            Err(Error::BasisMismatch(self.omega0, other.omega0))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    basis: ModeBasis,
    quad: Matrix6<f64>,
    linear: Vector6<f64>,
    constant: f64,
}

impl QuadraticForm {
    /// Builds a form; the quadratic block is symmetrized.
    pub fn new(basis: ModeBasis, quad: Matrix6<f64>, linear: Vector6<f64>, constant: f64) -> Self {
        let quad = (quad + quad.transpose()) * 0.5;
        Self {
            basis,
            quad,
            linear,
            constant,
        }
    }

    pub fn quadratic(basis: ModeBasis, quad: Matrix6<f64>) -> Self {
        Self::new(basis, quad, Vector6::zeros(), 0.0)
    }

    pub fn zero(basis: ModeBasis) -> Self {
        Self::quadratic(basis, Matrix6::zeros())
    }

    pub fn basis(&self) -> ModeBasis {
        self.basis
    }

    pub fn quad(&self) -> &Matrix6<f64> {
        &self.quad
    }

    pub fn linear(&self) -> &Vector6<f64> {
        &self.linear
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn is_homogeneous(&self) -> bool {
        self.linear.iter().all(|v| *v == 0.0)
    }

    /// Classical (Weyl symbol) value at a phase-space point.
    pub fn value(&self, z: &Vector6<f64>) -> f64 {
        0.5 * z.dot(&(self.quad * z)) + self.linear.dot(z) + self.constant
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            basis: self.basis,
            quad: self.quad * a,
            linear: self.linear * a,
            constant: self.constant * a,
        }
    }

    /// `self + a·other`.
    pub fn add_scaled(&self, a: f64, other: &QuadraticForm) -> Result<Self> {
        self.basis.check_same(&other.basis)?;
        Ok(Self {
            basis: self.basis,
            quad: self.quad + other.quad * a,
            linear: self.linear + other.linear * a,
            constant: self.constant + a * other.constant,
        })
    }

    /// Linear combination `Σ aᵢ Gᵢ` over forms sharing `basis`.
    pub fn combination(basis: ModeBasis, terms: &[(f64, &QuadraticForm)]) -> Result<Self> {
        terms
            .iter()
            .try_fold(Self::zero(basis), |acc, (a, g)| acc.add_scaled(*a, g))
    }

    /// Largest entrywise difference over all three parts.
    pub fn max_abs_diff(&self, other: &QuadraticForm) -> f64 {
        let q = (self.quad - other.quad).amax();
        let l = (self.linear - other.linear).amax();
        q.max(l).max((self.constant - other.constant).abs())
    }

    pub fn max_abs(&self) -> f64 {
        self.quad
            .amax()
            .max(self.linear.amax())
            .max(self.constant.abs())
    }
}

/// Linear canonical transformation of phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMap {
    matrix: Matrix6<f64>,
}

impl SymplecticMap {
    pub fn identity() -> Self {
        Self {
            matrix: Matrix6::identity(),
        }
    }

    /// Wraps a matrix after checking `SᵀJS = J` to a scale-aware tolerance.
    pub fn new(matrix: Matrix6<f64>) -> Result<Self> {
        let map = Self { matrix };
        let defect = map.symplectic_defect();
        if defect > 1e-9 * matrix.amax().powi(2).max(1.0) || !defect.is_finite() {
            return Err(Error::NotSymplectic(defect));
        }
        Ok(map)
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.matrix
    }

    /// `max |SᵀJS − J|`.
    pub fn symplectic_defect(&self) -> f64 {
        let j = symplectic_unit();
        (self.matrix.transpose() * j * self.matrix - j).amax()
    }

    /// The map of the operator product `U_self · U_other`.
    pub fn compose(&self, other: &SymplecticMap) -> Self {
        Self {
            matrix: self.matrix * other.matrix,
        }
    }

    /// Exact symplectic inverse `−J Sᵀ J`.
    pub fn inverse(&self) -> Self {
        let j = symplectic_unit();
        Self {
            matrix: -(j * self.matrix.transpose() * j),
        }
    }
}

/// Returns `G3` with `[Ĝ1, Ĝ2] = i Ĝ3`.
pub fn commutator(g1: &QuadraticForm, g2: &QuadraticForm) -> Result<QuadraticForm> {
    g1.basis.check_same(&g2.basis)?;
    let j = symplectic_unit();
    let quad = g1.quad * j * g2.quad - g2.quad * j * g1.quad;
    let linear = g1.quad * j * g2.linear - g2.quad * j * g1.linear;
    let constant = g1.linear.dot(&(j * g2.linear));
    Ok(QuadraticForm::new(g1.basis, quad, linear, constant))
}

/// Map of the unitary `e^{-itĜ}`: the time-`t` flow of the classical
/// Hamiltonian `G`.
pub fn exp_generator(g: &QuadraticForm, t: f64) -> Result<SymplecticMap> {
    if !g.is_homogeneous() {
        return Err(Error::LinearGenerator);
    }
    let flow = symplectic_unit() * g.quad * t;
    let matrix = flow.exp();
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::ExponentialDiverged);
    }
    Ok(SymplecticMap { matrix })
}

/// Heisenberg transform `U† Ĝ U` for the unitary represented by `s`.
pub fn conjugate_form(g: &QuadraticForm, s: &SymplecticMap) -> Result<QuadraticForm> {
    let defect = s.symplectic_defect();
    if defect > 1e-9 * s.matrix.amax().powi(2).max(1.0) || !defect.is_finite() {
        return Err(Error::NotSymplectic(defect));
    }
    let st = s.matrix.transpose();
    Ok(QuadraticForm {
        basis: g.basis,
        quad: st * g.quad * s.matrix,
        linear: st * g.linear,
        constant: g.constant,
    })
}

/// Adjoint action `U Ĝ U†`, i.e. conjugation by the inverse map.
pub fn adjoint_form(g: &QuadraticForm, s: &SymplecticMap) -> Result<QuadraticForm> {
    conjugate_form(g, &s.inverse())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    Proton,
    Neutron,
    SingleFluid,
}

/// Occupied oscillator orbitals of a Slater determinant, given as quanta
/// `(n1, n2, n3)` in the reference basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlaterConfiguration {
    orbitals: Vec<[u32; 3]>,
    degeneracy: u32,
    species: Species,
}

impl SlaterConfiguration {
    pub fn new(orbitals: Vec<[u32; 3]>, degeneracy: u32, species: Species) -> Result<Self> {
        if degeneracy == 0 {
            return Err(Error::InvalidInput("degeneracy must be at least 1".into()));
        }
        if orbitals.is_empty() {
            return Err(Error::InvalidInput("configuration has no orbitals".into()));
        }
        for (i, a) in orbitals.iter().enumerate() {
            if orbitals[..i].contains(a) {
                return Err(Error::InvalidInput(format!("orbital {a:?} occupied twice")));
            }
        }
        Ok(Self {
            orbitals,
            degeneracy,
            species,
        })
    }

    pub fn orbitals(&self) -> &[[u32; 3]] {
        &self.orbitals
    }

    pub fn degeneracy(&self) -> u32 {
        self.degeneracy
    }

    pub fn species(&self) -> Species {
        self.species
    }

    pub fn particle_count(&self) -> usize {
        self.orbitals.len() * self.degeneracy as usize
    }

    /// `Σ_k = Σ_orbitals degeneracy·(n_k + ½)`.
    pub fn totals(&self) -> [f64; 3] {
        let mut t = [0.0; 3];
        for orb in &self.orbitals {
            for k in 0..MODES {
                t[k] += f64::from(self.degeneracy) * (f64::from(orb[k]) + 0.5);
            }
        }
        t
    }
}

/// `⟨Z|Ĝ|Z⟩` for `|Z⟩ = U|Slater⟩`, with `U` represented by `s`.
pub fn expectation(
    g: &QuadraticForm,
    s: &SymplecticMap,
    config: &SlaterConfiguration,
) -> Result<f64> {
    let transformed = conjugate_form(g, s)?;
    Ok(fock_expectation(&transformed, config))
}

/// Expectation in the untransformed Fock determinant. Fock orbitals have zero
/// mean and diagonal covariances `⟨x²⟩ = (n+½)/ω₀`, `⟨p²⟩ = (n+½)ω₀`.
fn fock_expectation(g: &QuadraticForm, config: &SlaterConfiguration) -> f64 {
    let w0 = g.basis.omega0;
    let totals = config.totals();
    let mut sum = 0.0;
    for k in 0..MODES {
        sum += 0.5
            * (g.quad[(x_index(k), x_index(k))] * totals[k] / w0
                + g.quad[(p_index(k), p_index(k))] * totals[k] * w0);
    }
    sum + g.constant * config.particle_count() as f64
}

/// The real number `−i⟨[Ĝ1, Ĝ2]⟩`, equal to `2 Im⟨X|Y⟩` for the tangent flows
/// `X = −iĜ1|Z⟩`, `Y = −iĜ2|Z⟩`.
pub fn covariance_commutator(
    g1: &QuadraticForm,
    g2: &QuadraticForm,
    s: &SymplecticMap,
    config: &SlaterConfiguration,
) -> Result<f64> {
    expectation(&commutator(g1, g2)?, s, config)
}

/// Named operators used throughout the crate.
#[derive(Debug, Clone)]
pub struct Generators {
    pub basis: ModeBasis,
    /// Orbital angular momenta `L_k`.
    pub l: [QuadraticForm; 3],
    /// Angle operator `c₁ = b₂†b₃ + b₃†b₂`.
    pub c1: QuadraticForm,
    /// Squeeze generators `s_k = i(b_k†b_k† − b_k b_k)/2 = (x_k p_k + p_k x_k)/2`.
    pub s: [QuadraticForm; 3],
    /// Number operators `N_k = b_k† b_k`.
    pub n: [QuadraticForm; 3],
    pub x_sq: [QuadraticForm; 3],
    pub p_sq: [QuadraticForm; 3],
    /// Real quadrupole components with symmetry axis 3:
    /// `2x3² − x1² − x2²`, `√3(x1² − x2²)`, `2√3 x1x2`, `2√3 x1x3`, `2√3 x2x3`.
    pub q: [QuadraticForm; 5],
}

impl Generators {
    /// Every catalog entry with a stable name.
    pub fn all(&self) -> Vec<(String, &QuadraticForm)> {
        let mut out = Vec::new();
        for k in 0..MODES {
            out.push((format!("L{}", k + 1), &self.l[k]));
        }
        out.push(("c1".to_string(), &self.c1));
        for k in 0..MODES {
            out.push((format!("s{}", k + 1), &self.s[k]));
            out.push((format!("N{}", k + 1), &self.n[k]));
            out.push((format!("x{}^2", k + 1), &self.x_sq[k]));
            out.push((format!("p{}^2", k + 1), &self.p_sq[k]));
        }
        for (i, q) in self.q.iter().enumerate() {
            out.push((format!("Q{i}"), q));
        }
        out
    }
}

fn symmetric_entry(m: &mut Matrix6<f64>, i: usize, j: usize, v: f64) {
    m[(i, j)] += v;
    if i != j {
        m[(j, i)] += v;
    }
}

pub fn standard_generators(basis: ModeBasis) -> Generators {
    let w0 = basis.omega0;
    let form = |m: Matrix6<f64>| QuadraticForm::quadratic(basis, m);

    let angular = |k: usize| {
        // L_k = x_i p_j − x_j p_i with (k, i, j) cyclic.
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let mut m = Matrix6::zeros();
        symmetric_entry(&mut m, x_index(i), p_index(j), 1.0);
        symmetric_entry(&mut m, x_index(j), p_index(i), -1.0);
        form(m)
    };

    let mut c1 = Matrix6::zeros();
    symmetric_entry(&mut c1, x_index(1), x_index(2), w0);
    symmetric_entry(&mut c1, p_index(1), p_index(2), 1.0 / w0);

    let squeeze = |k: usize| {
        let mut m = Matrix6::zeros();
        symmetric_entry(&mut m, x_index(k), p_index(k), 1.0);
        form(m)
    };
    let number = |k: usize| {
        let mut m = Matrix6::zeros();
        m[(x_index(k), x_index(k))] = w0;
        m[(p_index(k), p_index(k))] = 1.0 / w0;
        QuadraticForm::new(basis, m, Vector6::zeros(), -0.5)
    };
    let diag = |i: usize| {
        let mut m = Matrix6::zeros();
        m[(i, i)] = 2.0;
        form(m)
    };

    let r3 = 3f64.sqrt();
    let mut q0 = Matrix6::zeros();
    q0[(0, 0)] = -2.0;
    q0[(1, 1)] = -2.0;
    q0[(2, 2)] = 4.0;
    let mut q1 = Matrix6::zeros();
    q1[(0, 0)] = 2.0 * r3;
    q1[(1, 1)] = -2.0 * r3;
    let cross = |i: usize, j: usize| {
        let mut m = Matrix6::zeros();
        symmetric_entry(&mut m, i, j, 2.0 * r3);
        form(m)
    };

    Generators {
        basis,
        l: [angular(0), angular(1), angular(2)],
        c1: form(c1),
        s: [squeeze(0), squeeze(1), squeeze(2)],
        n: [number(0), number(1), number(2)],
        x_sq: [diag(x_index(0)), diag(x_index(1)), diag(x_index(2))],
        p_sq: [diag(p_index(0)), diag(p_index(1)), diag(p_index(2))],
        q: [form(q0), form(q1), cross(0, 1), cross(0, 2), cross(1, 2)],
    }
}
