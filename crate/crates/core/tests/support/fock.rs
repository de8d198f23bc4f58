//! Truncated Fock-space matrices for three oscillator modes, built from
//! explicit ladder-operator matrix elements. Test-only oracle.

use std::collections::HashMap;

use symbreak::algebra::{QuadraticForm, SlaterConfiguration};

/// Per-mode cutoff of the working space. Products of two quadratics are exact
/// on states with every `n_k ≤ VERIFIED_CUTOFF`.
pub const WORK_CUTOFF: usize = 8;
pub const VERIFIED_CUTOFF: usize = 6;
const MODE_DIM: usize = WORK_CUTOFF + 3;

type Dense = Vec<Vec<f64>>;

fn single_mode_ops(omega0: f64) -> (Dense, Dense) {
    // x = (b + b†)/√(2ω₀), p = i√(ω₀/2)(b† − b); p is imaginary, so we store
    // p̃ = −i p = √(ω₀/2)(b† − b) and track the factor i separately.
    let mut x = vec![vec![0.0; MODE_DIM]; MODE_DIM];
    let mut pt = vec![vec![0.0; MODE_DIM]; MODE_DIM];
    for n in 0..MODE_DIM - 1 {
        let s = ((n + 1) as f64).sqrt();
        x[n][n + 1] = s / (2.0 * omega0).sqrt();
        x[n + 1][n] = s / (2.0 * omega0).sqrt();
        pt[n + 1][n] = s * (omega0 / 2.0).sqrt();
        pt[n][n + 1] = -s * (omega0 / 2.0).sqrt();
    }
    (x, pt)
}

fn dense_mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] != 0.0 {
                for j in 0..n {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

/// Complex sparse operator on the working space, rows keyed by state index.
#[derive(Clone, Debug, Default)]
pub struct SparseOp {
    pub rows: Vec<HashMap<usize, (f64, f64)>>,
}

pub fn state_index(n: [usize; 3]) -> usize {
    (n[0] * (WORK_CUTOFF + 1) + n[1]) * (WORK_CUTOFF + 1) + n[2]
}

pub fn state_quanta(i: usize) -> [usize; 3] {
    let d = WORK_CUTOFF + 1;
    [i / (d * d), (i / d) % d, i % d]
}

pub fn space_dim() -> usize {
    (WORK_CUTOFF + 1).pow(3)
}

impl SparseOp {
    pub fn zero() -> Self {
        Self {
            rows: vec![HashMap::new(); space_dim()],
        }
    }

    fn add(&mut self, i: usize, j: usize, re: f64, im: f64) {
        let e = self.rows[i].entry(j).or_insert((0.0, 0.0));
        e.0 += re;
        e.1 += im;
    }

    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        self.rows[i].get(&j).copied().unwrap_or((0.0, 0.0))
    }

    pub fn mul(&self, other: &SparseOp) -> SparseOp {
        let mut out = SparseOp::zero();
        for (i, row) in self.rows.iter().enumerate() {
            for (&k, &(ar, ai)) in row {
                for (&j, &(br, bi)) in &other.rows[k] {
                    out.add(i, j, ar * br - ai * bi, ar * bi + ai * br);
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &SparseOp) -> SparseOp {
        let mut out = self.clone();
        for (i, row) in other.rows.iter().enumerate() {
            for (&j, &(r, im)) in row {
                out.add(i, j, -r, -im);
            }
        }
        out
    }

    /// `[A, B]`.
    pub fn commutator(&self, other: &SparseOp) -> SparseOp {
        self.mul(other).sub(&other.mul(self))
    }

    /// Multiplies by `−i`.
    pub fn times_minus_i(&self) -> SparseOp {
        let mut out = SparseOp::zero();
        for (i, row) in self.rows.iter().enumerate() {
            for (&j, &(r, im)) in row {
                out.add(i, j, im, -r);
            }
        }
        out
    }

    /// Largest |difference| over entries whose states lie inside the verified cutoff.
    pub fn max_diff_verified(&self, other: &SparseOp) -> f64 {
        let inside = |i: usize| state_quanta(i).iter().all(|&n| n <= VERIFIED_CUTOFF);
        let mut worst: f64 = 0.0;
        for i in (0..space_dim()).filter(|&i| inside(i)) {
            let keys: Vec<usize> = self.rows[i].keys().chain(other.rows[i].keys()).copied().collect();
            for j in keys.into_iter().filter(|&j| inside(j)) {
                let (a, b) = (self.get(i, j), other.get(i, j));
                worst = worst.max((a.0 - b.0).abs()).max((a.1 - b.1).abs());
            }
        }
        worst
    }

    /// Slater-determinant expectation of a one-body operator in Fock orbitals.
    pub fn slater_expectation(&self, config: &SlaterConfiguration) -> f64 {
        config
            .orbitals()
            .iter()
            .map(|o| {
                let i = state_index([o[0] as usize, o[1] as usize, o[2] as usize]);
                f64::from(config.degeneracy()) * self.get(i, i).0
            })
            .sum()
    }
}

/// Explicit Weyl-ordered matrix of a quadratic form on the working space.
pub fn operator_matrix(form: &QuadraticForm) -> SparseOp {
    let w0 = form.basis().omega0();
    let (x, pt) = single_mode_ops(w0);
    // Coordinate z_i as (matrix, carries factor i?).
    let coord = |i: usize| -> (&Dense, bool) {
        if i < 3 {
            (&x, false)
        } else {
            (&pt, true)
        }
    };
    let mode = |i: usize| i % 3;
    let d = WORK_CUTOFF + 1;
    let mut out = SparseOp::zero();

    let place = |op_of_mode: &dyn Fn(usize) -> Option<Dense>, re: f64, im: f64, out: &mut SparseOp| {
        // op_of_mode(k) returns the factor acting on mode k (None = identity).
        let factors: Vec<Option<Dense>> = (0..3).map(op_of_mode).collect();
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let from = [a, b, c];
                    let mut targets: Vec<([usize; 3], f64)> = vec![([0; 3], 1.0)];
                    for k in 0..3 {
                        let mut next = Vec::new();
                        for (t, v) in &targets {
                            match &factors[k] {
                                None => {
                                    let mut t2 = *t;
                                    t2[k] = from[k];
                                    next.push((t2, *v));
                                }
                                Some(m) => {
                                    for r in 0..d {
                                        let e = m[r][from[k]];
                                        if e != 0.0 {
                                            let mut t2 = *t;
                                            t2[k] = r;
                                            next.push((t2, v * e));
                                        }
                                    }
                                }
                            }
                        }
                        targets = next;
                    }
                    for (t, v) in targets {
                        out.add(state_index(t), state_index(from), re * v, im * v);
                    }
                }
            }
        }
    };

    let m = form.quad();
    for i in 0..6 {
        for j in 0..6 {
            let coef = 0.5 * m[(i, j)];
            if coef == 0.0 {
                continue;
            }
            let (a, ai) = coord(i);
            let (b, bi) = coord(j);
            // Phase from the stored −i p representation: p = i p̃.
            let phase_count = ai as u32 + bi as u32;
            let (re, im) = match phase_count {
                0 => (coef, 0.0),
                1 => (0.0, coef),
                _ => (-coef, 0.0),
            };
            if mode(i) == mode(j) {
                let sym: Dense = {
                    let ab = dense_mul(a, b);
                    let ba = dense_mul(b, a);
                    ab.iter()
                        .zip(&ba)
                        .map(|(r1, r2)| r1.iter().zip(r2).map(|(u, v)| 0.5 * (u + v)).collect())
                        .collect()
                };
                let k0 = mode(i);
                place(&|k| if k == k0 { Some(sym.clone()) } else { None }, re, im, &mut out);
            } else {
                let (ka, kb) = (mode(i), mode(j));
                let (a, b) = (a.clone(), b.clone());
                place(
                    &|k| {
                        if k == ka {
                            Some(a.clone())
                        } else if k == kb {
                            Some(b.clone())
                        } else {
                            None
                        }
                    },
                    re,
                    im,
                    &mut out,
                );
            }
        }
    }
    for i in 0..6 {
        let coef = form.linear()[i];
        if coef == 0.0 {
            continue;
        }
        let (a, ai) = coord(i);
        let k0 = mode(i);
        let a = a.clone();
        let (re, im) = if ai { (0.0, coef) } else { (coef, 0.0) };
        place(&|k| if k == k0 { Some(a.clone()) } else { None }, re, im, &mut out);
    }
    if form.constant() != 0.0 {
        for i in 0..space_dim() {
            out.add(i, i, form.constant(), 0.0);
        }
    }
    out
}

/// Pseudo-random configurations with all quanta below the verified cutoff,
/// drawn from a seeded stream so the oracle is reproducible.
pub fn sample_configurations(count: usize, seed: u64) -> Vec<SlaterConfiguration> {
    use rand::{Rng, SeedableRng};
    use symbreak::algebra::Species;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let size = rng.random_range(1..=6);
            let mut orbs: Vec<[u32; 3]> = Vec::new();
            while orbs.len() < size {
                let o = [rng.random_range(0..6), rng.random_range(0..6), rng.random_range(0..6)];
                if !orbs.contains(&o) {
                    orbs.push(o);
                }
            }
            let deg = rng.random_range(1..=4);
            SlaterConfiguration::new(orbs, deg, Species::SingleFluid).unwrap()
        })
        .collect()
}
