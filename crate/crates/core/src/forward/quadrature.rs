//! Integrals of the Helmholtz kernel and its derivatives over one cubic voxel.
//!
//! For a box `B` of edge `h` centred at `c` and a target `x`, with `r = x − c`:
//!
//! * `S(r)   = ∫_B Φ(x − y) dy`
//! * `∇S(r)  = −∮_{∂B} Φ(x − y) ν dS_y`
//! * `∂a∂bS  = −∮_{∂B} ∂_{x_a}Φ(x − y) ν_b dS_y`
//!
//! The surface forms hold for targets inside the box too, and there they
//! already contain the depolarisation part of the Hessian. `S` itself uses the
//! radial identity `∫_B f(|y−x|) dy = ∮ F(ρ) ρ⁻³ (y−x)·ν dS` with
//! `F(R) = ∫_0^R r² f(r) dr`, which is free of singularities whenever the
//! target lies at least `h/2` from every face plane (all lattice targets do).
//! Well separated boxes use tensor Gauss rules on the volume instead.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::vec3::Vec3;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

struct Rules {
    g4: (Vec<f64>, Vec<f64>),
    g8: (Vec<f64>, Vec<f64>),
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(|| Rules {
        g4: gauss_legendre(4),
        g8: gauss_legendre(8),
    })
}

/// Box integrals of `Φ`, its gradient and its Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxIntegrals {
    pub s: Complex64,
    pub grad: [Complex64; 3],
    pub hess: [[Complex64; 3]; 3],
}

impl BoxIntegrals {
    fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self {
            s: z,
            grad: [z; 3],
            hess: [[z; 3]; 3],
        }
    }
}

/// `F(R)/R³` where `F(R) = (1/4π) ∫_0^R r e^{ikr} dr`.
fn radial_primitive_over_cube(k: f64, r: f64) -> Complex64 {
    let kr = k * r;
    let f = if kr < 0.5 {
        // Σ (ik)^n R^{n+2} / (n! (n+2))
        let ikr = Complex64::new(0.0, kr);
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.5, 0.0);
        for n in 1..40 {
            term *= ikr / n as f64;
            let add = term / (n + 2) as f64;
            sum += add;
            if add.norm() < 1e-18 {
                break;
            }
        }
        sum * r * r
    } else {
        let ik = Complex64::new(0.0, k);
        let e = Complex64::new(kr.cos(), kr.sin());
        e * (r / ik + 1.0 / (k * k)) - 1.0 / (k * k)
    };
    f / (4.0 * PI * r * r * r)
}

/// `Φ(R)` and `Φ'(R)`.
#[inline]
fn phi_and_derivative(k: f64, r: f64) -> (Complex64, Complex64) {
    let (s, c) = (k * r).sin_cos();
    let phi = Complex64::new(c, s) / (4.0 * PI * r);
    (phi, phi * Complex64::new(-1.0 / r, k))
}

/// Hessian of `Φ(|R|)` with respect to `R`.
#[inline]
pub fn phi_hessian(k: f64, rv: &Vec3) -> [[Complex64; 3]; 3] {
    let r = (rv[0] * rv[0] + rv[1] * rv[1] + rv[2] * rv[2]).sqrt();
    let (phi, _) = phi_and_derivative(k, r);
    let a = Complex64::new(-1.0 / r, k);
    let radial = phi * (a * a + 1.0 / (r * r));
    let transverse = phi * a / r;
    let u = [rv[0] / r, rv[1] / r, rv[2] / r];
    let mut h = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let uu = u[i] * u[j];
            h[i][j] = radial * uu + transverse * (if i == j { 1.0 - uu } else { -uu });
        }
    }
    h
}

fn volume_rule(k: f64, h: f64, r: &Vec3, rule: &(Vec<f64>, Vec<f64>)) -> BoxIntegrals {
    let (xs, ws) = rule;
    let half = 0.5 * h;
    let scale = half * half * half;
    let mut out = BoxIntegrals::zero();
    for (xi, wi) in xs.iter().zip(ws) {
        for (xj, wj) in xs.iter().zip(ws) {
            for (xl, wl) in xs.iter().zip(ws) {
                let w = wi * wj * wl * scale;
                let rv = [r[0] - half * xi, r[1] - half * xj, r[2] - half * xl];
                let d = (rv[0] * rv[0] + rv[1] * rv[1] + rv[2] * rv[2]).sqrt();
                let (phi, dphi) = phi_and_derivative(k, d);
                out.s += phi * w;
                for a in 0..3 {
                    out.grad[a] += dphi * (w * rv[a] / d);
                }
                let hs = phi_hessian(k, &rv);
                for a in 0..3 {
                    for b in 0..3 {
                        out.hess[a][b] += hs[a][b] * w;
                    }
                }
            }
        }
    }
    out
}

fn surface_rule(k: f64, h: f64, r: &Vec3, panels: usize) -> BoxIntegrals {
    let (xs, ws) = &rules().g8;
    let half = 0.5 * h;
    let panel = h / panels as f64;
    let jac = 0.25 * panel * panel;
    let mut out = BoxIntegrals::zero();
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for sign in [-1.0f64, 1.0] {
            for pu in 0..panels {
                for pv in 0..panels {
                    let cu = -half + (pu as f64 + 0.5) * panel;
                    let cv = -half + (pv as f64 + 0.5) * panel;
                    for (xi, wi) in xs.iter().zip(ws) {
                        for (xj, wj) in xs.iter().zip(ws) {
                            let w = wi * wj * jac;
                            // t = y − x with y on the face.
                            let mut t = [0.0; 3];
                            t[axis] = sign * half - r[axis];
                            t[u] = cu + 0.5 * panel * xi - r[u];
                            t[v] = cv + 0.5 * panel * xj - r[v];
                            let d = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
                            out.s += radial_primitive_over_cube(k, d) * (w * t[axis] * sign);
                            let (phi, dphi) = phi_and_derivative(k, d);
                            out.grad[axis] -= phi * (w * sign);
                            for c in 0..3 {
                                out.hess[c][axis] += dphi * (w * sign * t[c] / d);
                            }
                        }
                    }
                }
            }
        }
    }
    for a in 0..3 {
        for b in a + 1..3 {
            let m = (out.hess[a][b] + out.hess[b][a]) * 0.5;
            out.hess[a][b] = m;
            out.hess[b][a] = m;
        }
    }
    out
}

/// Box integrals for an arbitrary target, with `r` the offset of the target
/// from the box centre. The rule is chosen from the Chebyshev distance in
/// units of `h`.
pub fn box_integrals(k: f64, h: f64, r: &Vec3) -> BoxIntegrals {
    let cheb = r.iter().fold(0.0f64, |m, c| m.max(c.abs())) / h;
    if cheb < 2.5 {
        let panels = if lattice_aligned(r, h) { 2 } else { 4 };
        surface_rule(k, h, r, panels)
    } else {
        volume_rule(k, h, r, &rules().g4)
    }
}

fn lattice_aligned(r: &Vec3, h: f64) -> bool {
    r.iter().all(|c| {
        let q = c / h;
        (q - q.round()).abs() < 1e-9
    })
}

/// Volume integral `∫_B e^{−ik x̂·y} dy` of a plane-wave phase over a box
/// centred at `c`.
pub fn box_phase(k: f64, h: f64, dir: &Vec3, c: &Vec3) -> Complex64 {
    let phase = -k * (dir[0] * c[0] + dir[1] * c[1] + dir[2] * c[2]);
    let mut s = h * h * h;
    for d in dir {
        let a = 0.5 * k * d * h;
        if a.abs() > 1e-8 {
            s *= a.sin() / a;
        } else {
            s *= 1.0 - a * a / 6.0;
        }
    }
    Complex64::new(phase.cos(), phase.sin()) * s
}
