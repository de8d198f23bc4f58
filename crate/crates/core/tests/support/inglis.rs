//! Particle-hole linear-response sum for the cranking moment of inertia of a
//! Slater determinant of deformed oscillator orbitals. Test-only oracle.

use symbreak::algebra::SlaterConfiguration;

fn x_elem(w: f64, to: i64, from: i64) -> f64 {
    if to == from + 1 {
        ((from + 1) as f64).sqrt() / (2.0 * w).sqrt()
    } else if to + 1 == from {
        (from as f64).sqrt() / (2.0 * w).sqrt()
    } else {
        0.0
    }
}

/// Imaginary part of ⟨to|p|from⟩ (the element is purely imaginary).
fn p_elem(w: f64, to: i64, from: i64) -> f64 {
    if to == from + 1 {
        ((from + 1) as f64).sqrt() * (w / 2.0).sqrt()
    } else if to + 1 == from {
        -(from as f64).sqrt() * (w / 2.0).sqrt()
    } else {
        0.0
    }
}

/// `2 Σ_{h occupied, p empty} deg |⟨p|L₁|h⟩|² / (e_p − e_h)` with orbitals of
/// the oscillator with frequencies `w`, quanta labelled along the same axes.
pub fn inglis_inertia(config: &SlaterConfiguration, w: [f64; 3]) -> f64 {
    let occupied = config.orbitals();
    let energy = |n: [i64; 3]| (0..3).map(|k| w[k] * (n[k] as f64 + 0.5)).sum::<f64>();
    let mut total = 0.0;
    for h in occupied {
        let h = [h[0] as i64, h[1] as i64, h[2] as i64];
        for d2 in [-1i64, 1] {
            for d3 in [-1i64, 1] {
                let p = [h[0], h[1] + d2, h[2] + d3];
                if p[1] < 0 || p[2] < 0 {
                    continue;
                }
                let pu = [p[0] as u32, p[1] as u32, p[2] as u32];
                if occupied.contains(&pu) {
                    continue;
                }
                // L₁ = x₂p₃ − x₃p₂, imaginary part of the matrix element.
                let elem = x_elem(w[1], p[1], h[1]) * p_elem(w[2], p[2], h[2])
                    - x_elem(w[2], p[2], h[2]) * p_elem(w[1], p[1], h[1]);
                total += 2.0 * f64::from(config.degeneracy()) * elem * elem / (energy(p) - energy(h));
            }
        }
    }
    total
}
