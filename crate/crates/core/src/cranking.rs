//! Closed-form cranked anisotropic oscillator and its normal-mode oracle.
//!
//! The cranking Hamiltonian `H' = Σ_k (p_k² + w_k² x_k²)/2 − ω L₁` is brought
//! to uncoupled form by `U = e^{-iλc₁} e^{-iΣθ_k s_k}` with bosons referred to
//! `ω₀² = (w₂² + w₃²)/2`. The mixing angle satisfies `tan 2λ = 2ω/(ω₀η)`; the
//! rotated modes 2, 3 carry the frequency shifts `ε₂ = −ε₃ = ω₀η/(2cos 2λ)`,
//! normal frequencies `Ω²_{2,3} = (ω₀ + ε_{2,3})² − (ω₀η/2)²`, and are retuned
//! by squeezes with `sinh 2θ_k = ω₀(1 − w_k²/ω₀²)/(2Ω_k)`.

use nalgebra::{Matrix4, Matrix6};

use crate::algebra::{
    conjugate_form, exp_generator, p_index, standard_generators, x_index, Generators, ModeBasis,
    QuadraticForm, SymplecticMap,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorFrequencies {
    w: [f64; 3],
}

impl OscillatorFrequencies {
    pub fn new(w1: f64, w2: f64, w3: f64) -> Result<Self> {
        Self::from_array([w1, w2, w3])
    }

    pub fn from_array(w: [f64; 3]) -> Result<Self> {
        if w.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "oscillator frequencies must be positive, got {w:?}"
            )));
        }
        Ok(Self { w })
    }

    pub fn spherical(w: f64) -> Result<Self> {
        Self::from_array([w; 3])
    }

    pub fn w(&self) -> [f64; 3] {
        self.w
    }

    /// `ω₀ = √((w₂² + w₃²)/2)`.
    pub fn omega0(&self) -> f64 {
        (0.5 * (self.w[1] * self.w[1] + self.w[2] * self.w[2])).sqrt()
    }

    /// `η = (w₂² − w₃²)/(2ω₀²)`, always inside (−1, 1).
    pub fn eta(&self) -> f64 {
        let (a, b) = (self.w[1] * self.w[1], self.w[2] * self.w[2]);
        (a - b) / (a + b)
    }

    pub fn basis(&self) -> ModeBasis {
        ModeBasis::new(self.omega0()).expect("positive frequencies give a positive omega0")
    }

    pub fn volume(&self) -> f64 {
        self.w.iter().product()
    }
}

/// Closed-form transformation parameters at cranking frequency `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrankedParams {
    pub omega: f64,
    pub omega0: f64,
    pub lambda: f64,
    /// Squeeze parameters; `None` where `Ω_k² ≤ 0`.
    pub theta: [Option<f64>; 3],
    /// `Ω_k²`; may be non-positive outside the stable interval.
    pub omega_sq: [f64; 3],
    pub eps2: f64,
    pub eps3: f64,
    pub stable: bool,
}

impl CrankedParams {
    /// `Ω_k`, reported as 0 where `Ω_k² ≤ 0`.
    pub fn frequencies(&self) -> [f64; 3] {
        self.omega_sq.map(|u| u.max(0.0).sqrt())
    }

    pub fn stable_theta(&self) -> Result<[f64; 3]> {
        match (self.stable, self.theta) {
            (true, [Some(a), Some(b), Some(c)]) => Ok([a, b, c]),
            _ => Err(Error::UnstableRegime {
                omega: self.omega,
                critical: f64::NAN,
            }),
        }
    }
}

pub fn paper_params(freqs: &OscillatorFrequencies, omega: f64) -> CrankedParams {
    let w = freqs.w();
    let w0 = freqs.omega0();
    let eta = freqs.eta();
    let lambda = 0.5 * (2.0 * omega).atan2(w0 * eta);
    // ω₀η/(2cos 2λ) on the atan2 branch, written without the 0/0 at η = 0.
    let eps2 = 0.5 * (w0 * eta).hypot(2.0 * omega);
    let eps3 = -eps2;
    let half_split = 0.5 * w0 * eta;
    let omega_sq = [
        w[0] * w[0],
        (w0 + eps2).powi(2) - half_split * half_split,
        (w0 + eps3).powi(2) - half_split * half_split,
    ];
    // Energetic stability: H' positive definite, i.e. the softer rotated mode
    // keeps A > |B| in A(N+½) + B(b² + b†²)/2.
    let stable = omega_sq.iter().all(|u| *u > 0.0) && w0 + eps3 > half_split.abs();
    let mut theta = [None; 3];
    for k in 0..3 {
        if omega_sq[k] > 0.0 {
            let big = omega_sq[k].sqrt();
            theta[k] = Some(0.5 * ((w0 * w0 - w[k] * w[k]) / (2.0 * w0 * big)).asinh());
        }
    }
    CrankedParams {
        omega,
        omega0: w0,
        lambda,
        theta,
        omega_sq,
        eps2,
        eps3,
        stable,
    }
}

/// `S(e^{-iλc₁}) · Π_k S(e^{-iθ_k s_k})`: the factorized trial transformation.
pub fn factorized_map(gens: &Generators, lambda: f64, theta: [f64; 3]) -> Result<SymplecticMap> {
    let mut map = exp_generator(&gens.c1, lambda)?;
    for k in 0..3 {
        map = map.compose(&exp_generator(&gens.s[k], theta[k])?);
    }
    Ok(map)
}

pub fn build_u(params: &CrankedParams) -> Result<SymplecticMap> {
    let theta = params.stable_theta().map_err(|_| unstable(params))?;
    let gens = standard_generators(ModeBasis::new(params.omega0)?);
    factorized_map(&gens, params.lambda, theta)
}

fn unstable(params: &CrankedParams) -> Error {
    Error::UnstableRegime {
        omega: params.omega,
        critical: f64::NAN,
    }
}

/// `H = Σ_k (p_k² + w_k² x_k²)/2` in the given basis.
pub fn oscillator_hamiltonian(freqs: &OscillatorFrequencies, basis: ModeBasis) -> QuadraticForm {
    let w = freqs.w();
    let mut m = Matrix6::zeros();
    for k in 0..3 {
        m[(x_index(k), x_index(k))] = w[k] * w[k];
        m[(p_index(k), p_index(k))] = 1.0;
    }
    QuadraticForm::quadratic(basis, m)
}

/// `H' = H − ω L₁`.
pub fn cranked_hamiltonian(freqs: &OscillatorFrequencies, omega: f64, basis: ModeBasis) -> QuadraticForm {
    let l1 = &standard_generators(basis).l[0];
    oscillator_hamiltonian(freqs, basis)
        .add_scaled(-omega, l1)
        .expect("same basis")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalModes {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub omega_1: f64,
    /// Squared frequencies `u = Ω²` read off the flow eigenvalues.
    pub u_plus: f64,
    pub u_minus: f64,
    pub stable: bool,
}

/// Normal modes of `H'` from the eigenvalues of its linear flow `J M'`.
pub fn normal_modes_oracle(freqs: &OscillatorFrequencies, omega: f64) -> NormalModes {
    let basis = freqs.basis();
    let h = cranked_hamiltonian(freqs, omega, basis);
    let flow = crate::algebra::symplectic_unit() * h.quad();
    let idx = [1usize, 2, 4, 5];
    let block = Matrix4::from_fn(|i, j| flow[(idx[i], idx[j])]);
    let eig = block.complex_eigenvalues();
    let scale = block.amax().max(1.0);
    let mut u: Vec<f64> = eig.iter().map(|z| -(z * z).re).collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let imaginary = eig.iter().all(|z| z.re.abs() <= 1e-9 * scale);
    let quad_block = Matrix4::from_fn(|i, j| h.quad()[(idx[i], idx[j])]);
    let positive = quad_block.cholesky().is_some();
    let (u_plus, u_minus) = (u[0], u[2]);
    NormalModes {
        omega_plus: u_plus.max(0.0).sqrt(),
        omega_minus: u_minus.max(0.0).sqrt(),
        omega_1: freqs.w()[0],
        u_plus,
        u_minus,
        stable: imaginary && positive && u_minus > 0.0,
    }
}

/// Relative residual of `u² − u(w₂² + w₃² + 2ω²) + (ω² − w₂²)(ω² − w₃²)`.
pub fn characteristic_residual(freqs: &OscillatorFrequencies, omega: f64, u: f64) -> f64 {
    let w = freqs.w();
    let (a, b) = (w[1] * w[1], w[2] * w[2]);
    let o2 = omega * omega;
    let terms = [u * u, -u * (a + b + 2.0 * o2), (o2 - a) * (o2 - b)];
    let scale = terms.iter().map(|t| t.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    terms.iter().sum::<f64>().abs() / scale
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalizationReport {
    /// Frobenius norm of all off-diagonal entries of `U†H'U` over its total norm.
    pub residual: f64,
    /// `√(M_xx M_pp)` per mode of the transformed form.
    pub frequencies: [f64; 3],
}

pub fn diagonalization_residual(
    params: &CrankedParams,
    freqs: &OscillatorFrequencies,
) -> Result<DiagonalizationReport> {
    let u = build_u(params)?;
    let basis = ModeBasis::new(params.omega0)?;
    let h = cranked_hamiltonian(freqs, params.omega, basis);
    let m = *conjugate_form(&h, &u)?.quad();
    let total = m.norm();
    let mut off = 0.0;
    for i in 0..6 {
        for j in 0..6 {
            if i != j {
                off += m[(i, j)] * m[(i, j)];
            }
        }
    }
    let frequencies = [0, 1, 2].map(|k| {
        let prod = m[(x_index(k), x_index(k))] * m[(p_index(k), p_index(k))];
        prod.max(0.0).sqrt()
    });
    Ok(DiagonalizationReport {
        residual: off.sqrt() / total,
        frequencies,
    })
}

/// Lowest cranking frequency at which the rotating-plane modes lose stability.
pub fn critical_frequency(freqs: &OscillatorFrequencies) -> f64 {
    freqs.w()[1].min(freqs.w()[2])
}

/// Locates the stability boundary by bisection on the oracle's stable flag.
pub fn critical_frequency_bisection(freqs: &OscillatorFrequencies, tol: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = 2.0 * freqs.w()[1].max(freqs.w()[2]);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if normal_modes_oracle(freqs, mid).stable {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
