//! Brute-force ground truth for the closed forms.
//!
//! Two independent evaluation routes live here. The per-spin route builds
//! the exact 2x2 propagators from the Pauli exponential and contracts them
//! against the initial state, giving F(t) for any product bath without any
//! closed-form assumption. The full-Hilbert route evolves the entire
//! 2^(N+1)-dimensional state and traces out the bath, checking not just
//! F(t) but the whole structure of the reduced density matrix.
//!
//! Basis ordering is fixed: the central qubit is the most significant bit,
//! bath spin k (0-based) sits at bit N-1-k. Bit value 0 means the σᶻ = +1
//! basis state. The partial trace depends on this ordering.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::model::{Bath, BathSpin, CentralSpin};

/// Hard cap on brute-force bath size (state dimension 2^13).
pub const MAX_FULL_HILBERT_SPINS: usize = 12;

/// Largest bath diagonalized exactly; larger baths use fixed-step RK4.
const EIGEN_SPINS_LIMIT: usize = 8;

/// Norm drift allowed over an RK4 evolution before the step is halved.
const RK4_NORM_DRIFT_TOL: f64 = 1e-10;

/// Real coefficients of a single-spin generator c0·I + cx·σˣ + cy·σʸ + cz·σᶻ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliGenerator {
    pub c0: f64,
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

impl PauliGenerator {
    pub fn norm(&self) -> f64 {
        (self.cx * self.cx + self.cy * self.cy + self.cz * self.cz).sqrt()
    }
}

/// Closed-form propagator e^{-i(c0·I + c·σ)t}.
///
/// (c·σ)² = |c|²·I collapses the exponential series to
/// e^{-ic0·t}·[cos(rt)·I - i·sin(rt)·(c·σ)/r] with r = |c|; the r = 0 limit
/// is the bare identity phase.
pub fn pauli_exponential(g: &PauliGenerator, t: f64) -> Mat2 {
    let r = g.norm();
    let phase = Complex64::from_polar(1.0, -g.c0 * t);
    if r == 0.0 {
        return Mat2::identity().scale(phase);
    }
    let (s, c) = (r * t).sin_cos();
    let i = Complex64::new(0.0, 1.0);
    let cos = Complex64::new(c, 0.0);
    // c·σ in matrix form: [[cz, cx - i cy], [cx + i cy, -cz]].
    let m = [
        [
            cos - i * s * (g.cz / r),
            -i * s * Complex64::new(g.cx / r, -g.cy / r),
        ],
        [
            -i * s * Complex64::new(g.cx / r, g.cy / r),
            cos + i * s * (g.cz / r),
        ],
    ];
    Mat2::new(m).scale(phase)
}

/// Exact per-spin decoherence factor
/// ⟨χ| e^{+i(ωσˣ-λσᶻ)t} · e^{-i(ωσˣ+λσᶻ)t} |χ⟩.
///
/// The two branch propagators correspond to the central spin being up or
/// down: the coupling enters with opposite sign, and the factor is the
/// overlap the bath develops between the two histories.
pub fn single_spin_factor_exact(spin: &BathSpin, t: f64) -> Complex64 {
    let up_branch = PauliGenerator {
        c0: 0.0,
        cx: spin.omega,
        cy: 0.0,
        cz: spin.lambda,
    };
    let down_branch = PauliGenerator {
        c0: 0.0,
        cx: spin.omega,
        cy: 0.0,
        cz: -spin.lambda,
    };
    // e^{+iAt} = e^{-iA(-t)}
    let u_down_dag = pauli_exponential(&down_branch, -t);
    let u_up = pauli_exponential(&up_branch, t);
    let m = u_down_dag.mul(&u_up);
    let chi = [spin.amp0, spin.amp1];
    let m_chi = m.matvec(chi);
    chi[0].conj() * m_chi[0] + chi[1].conj() * m_chi[1]
}

/// Exact decoherence factor of the whole bath, the product over spins.
pub fn decoherence_factor_exact(bath: &Bath, t: f64) -> Complex64 {
    bath.spins()
        .iter()
        .map(|s| single_spin_factor_exact(s, t))
        .product()
}

enum EvolutionPath {
    /// Exact spectral propagation: psi(t) = Q · diag(e^{-i E t}) · Qᵀ psi(0).
    Eigen {
        energies: Vec<f64>,
        /// Orthogonal eigenvector matrix of the (real symmetric) Hamiltonian.
        modes: DMatrix<f64>,
        /// Initial state rotated into the eigenbasis.
        v0: Vec<Complex64>,
    },
    /// Fixed-step RK4 on dψ/dt = -iHψ with the Hamiltonian applied
    /// structurally (bit flips for σˣ, signs for σᶻ), never materialized.
    Rk4 {
        diag: Vec<f64>,
        flip_masks: Vec<usize>,
        flip_weights: Vec<f64>,
        energy_scale: f64,
    },
}

/// Propagator for the full central-spin + bath state, reusable across t.
pub struct FullHilbertEvolver {
    dim: usize,
    bath_dim: usize,
    psi0: Vec<Complex64>,
    path: EvolutionPath,
}

impl FullHilbertEvolver {
    pub fn new(central: &CentralSpin, bath: &Bath) -> Result<Self> {
        let n = bath.len();
        if n > MAX_FULL_HILBERT_SPINS {
            return Err(Error::BathTooLarge {
                n,
                max: MAX_FULL_HILBERT_SPINS,
            });
        }
        let bath_dim = 1usize << n;
        let dim = bath_dim << 1;
        let central_mask = bath_dim;

        // Product initial state; amplitude of basis index k is the product
        // of the per-bit amplitudes.
        let mut psi0 = vec![Complex64::new(0.0, 0.0); dim];
        for (k, amp) in psi0.iter_mut().enumerate() {
            let mut a = if k & central_mask == 0 {
                Complex64::new(central.alpha(), 0.0)
            } else {
                Complex64::new(central.beta(), 0.0)
            };
            for (i, spin) in bath.spins().iter().enumerate() {
                let bit = (k >> (n - 1 - i)) & 1;
                a *= if bit == 0 { spin.amp0 } else { spin.amp1 };
            }
            *amp = a;
        }

        // Diagonal part: (Ω/2)·s_c + s_c·Σ λ_i s_i, with s = +1 for bit 0.
        let sign = |k: usize, mask: usize| if k & mask == 0 { 1.0 } else { -1.0 };
        let mut diag = vec![0.0; dim];
        for (k, d) in diag.iter_mut().enumerate() {
            let sc = sign(k, central_mask);
            let mut coupling = 0.0;
            for (i, spin) in bath.spins().iter().enumerate() {
                coupling += spin.lambda * sign(k, 1 << (n - 1 - i));
            }
            *d = 0.5 * central.omega * sc + sc * coupling;
        }
        let flip_masks: Vec<usize> = (0..n).map(|i| 1 << (n - 1 - i)).collect();
        let flip_weights: Vec<f64> = bath.spins().iter().map(|s| s.omega).collect();

        let path = if n <= EIGEN_SPINS_LIMIT {
            // The Hamiltonian is real symmetric: σˣ terms are real
            // off-diagonal, everything else is diagonal.
            let mut h = DMatrix::<f64>::zeros(dim, dim);
            for k in 0..dim {
                h[(k, k)] = diag[k];
                for (mask, w) in flip_masks.iter().zip(&flip_weights) {
                    h[(k, k ^ mask)] += w;
                }
            }
            let eig = nalgebra::linalg::SymmetricEigen::new(h);
            let energies: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            let mut v0 = vec![Complex64::new(0.0, 0.0); dim];
            for (j, v) in v0.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, amp) in psi0.iter().enumerate() {
                    acc += eig.eigenvectors[(k, j)] * amp;
                }
                *v = acc;
            }
            EvolutionPath::Eigen {
                energies,
                modes: eig.eigenvectors,
                v0,
            }
        } else {
            let energy_scale = 0.5 * central.omega
                + bath
                    .spins()
                    .iter()
                    .map(|s| s.omega + s.lambda)
                    .sum::<f64>();
            EvolutionPath::Rk4 {
                diag,
                flip_masks,
                flip_weights,
                energy_scale,
            }
        };

        Ok(FullHilbertEvolver {
            dim,
            bath_dim,
            psi0,
            path,
        })
    }

    fn state_at(&self, t: f64) -> Result<Vec<Complex64>> {
        match &self.path {
            EvolutionPath::Eigen { energies, modes, v0 } => {
                let mut w: Vec<Complex64> = Vec::with_capacity(self.dim);
                for (e, v) in energies.iter().zip(v0) {
                    w.push(Complex64::from_polar(1.0, -e * t) * v);
                }
                let mut psi = vec![Complex64::new(0.0, 0.0); self.dim];
                for (k, amp) in psi.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, wj) in w.iter().enumerate() {
                        acc += *wj * modes[(k, j)];
                    }
                    *amp = acc;
                }
                Ok(psi)
            }
            EvolutionPath::Rk4 {
                diag,
                flip_masks,
                flip_weights,
                energy_scale,
            } => {
                if t == 0.0 {
                    return Ok(self.psi0.clone());
                }
                let apply = |psi: &[Complex64], out: &mut [Complex64]| {
                    for (k, o) in out.iter_mut().enumerate() {
                        let mut acc = psi[k] * diag[k];
                        for (mask, w) in flip_masks.iter().zip(flip_weights) {
                            acc += psi[k ^ mask] * *w;
                        }
                        // dψ/dt = -iHψ
                        *o = Complex64::new(acc.im, -acc.re);
                    }
                };

                let mut dt = 0.01 / energy_scale.max(1e-3);
                for refinement in 0..14u32 {
                    let steps = (t / dt).ceil() as usize;
                    let step = t / steps as f64;
                    let mut psi = self.psi0.clone();
                    let mut k1 = vec![Complex64::new(0.0, 0.0); self.dim];
                    let mut k2 = k1.clone();
                    let mut k3 = k1.clone();
                    let mut k4 = k1.clone();
                    let mut tmp = k1.clone();
                    for _ in 0..steps {
                        apply(&psi, &mut k1);
                        for k in 0..self.dim {
                            tmp[k] = psi[k] + 0.5 * step * k1[k];
                        }
                        apply(&tmp, &mut k2);
                        for k in 0..self.dim {
                            tmp[k] = psi[k] + 0.5 * step * k2[k];
                        }
                        apply(&tmp, &mut k3);
                        for k in 0..self.dim {
                            tmp[k] = psi[k] + step * k3[k];
                        }
                        apply(&tmp, &mut k4);
                        for k in 0..self.dim {
                            psi[k] += step / 6.0
                                * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
                        }
                    }
                    let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
                    let drift = (norm.sqrt() - 1.0).abs();
                    if drift < RK4_NORM_DRIFT_TOL {
                        return Ok(psi);
                    }
                    dt *= 0.5;
                    if refinement == 13 {
                        return Err(Error::QuadratureNotConverged {
                            last_error: drift,
                            tolerance: RK4_NORM_DRIFT_TOL,
                            refinements: refinement + 1,
                        });
                    }
                }
                unreachable!("refinement loop always returns")
            }
        }
    }

    /// Reduced density matrix of the central spin at time t, obtained by
    /// tracing the bath bits out of the full state.
    pub fn reduced_density(&self, t: f64) -> Result<Mat2> {
        let psi = self.state_at(t)?;
        let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
        for b in 0..self.bath_dim {
            let up = psi[b];
            let down = psi[self.bath_dim + b];
            rho[0][0] += up * up.conj();
            rho[0][1] += up * down.conj();
            rho[1][0] += down * up.conj();
            rho[1][1] += down * down.conj();
        }
        Ok(Mat2::new(rho))
    }
}

/// One-shot full-Hilbert reduced density matrix; see [`FullHilbertEvolver`]
/// for the reusable form.
pub fn full_hilbert_reduced_density(
    central: &CentralSpin,
    bath: &Bath,
    t: f64,
) -> Result<Mat2> {
    FullHilbertEvolver::new(central, bath)?.reduced_density(t)
}
