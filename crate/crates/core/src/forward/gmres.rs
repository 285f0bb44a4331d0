use num_complex::Complex64;

/// Outcome of a restarted GMRES run.
#[derive(Debug, Clone)]
pub(crate) struct GmresOutcome {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    /// Relative residual estimate after every inner iteration.
    pub history: Vec<f64>,
    /// `‖b − Ax‖ / ‖b‖` recomputed from the returned iterate.
    pub residual: f64,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product `Σ conj(a) b`.
fn dotc(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations, started
/// from zero.
pub(crate) fn gmres<F>(apply: F, b: &[Complex64], tol: f64, max_iterations: usize, restart: usize) -> GmresOutcome
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let mut history = Vec::new();
    if bnorm == 0.0 {
        return GmresOutcome {
            x,
            iterations: 0,
            history,
            residual: 0.0,
        };
    }
    let restart = restart.max(1);
    let mut iterations = 0;
    let mut r: Vec<Complex64> = b.to_vec();

    while iterations < max_iterations {
        let beta = norm(&r);
        if beta / bnorm <= tol {
            break;
        }
        let mut basis: Vec<Vec<Complex64>> = vec![r.iter().map(|c| c / beta).collect()];
        let mut hess: Vec<Vec<Complex64>> = Vec::new();
        let mut cs: Vec<f64> = Vec::new();
        let mut sn: Vec<Complex64> = Vec::new();
        let mut g = vec![Complex64::new(beta, 0.0)];

        for j in 0..restart {
            if iterations >= max_iterations {
                break;
            }
            iterations += 1;
            let mut w = apply(&basis[j]);
            let mut h = vec![Complex64::new(0.0, 0.0); j + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij = dotc(v, &w);
                h[i] = hij;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= hij * vk;
                }
            }
            let wn = norm(&w);
            h[j + 1] = Complex64::new(wn, 0.0);

            for i in 0..j {
                let t = cs[i] * h[i] + sn[i] * h[i + 1];
                h[i + 1] = -sn[i].conj() * h[i] + cs[i] * h[i + 1];
                h[i] = t;
            }
            let (c, s) = givens(h[j], h[j + 1]);
            h[j] = c * h[j] + s * h[j + 1];
            h[j + 1] = Complex64::new(0.0, 0.0);
            cs.push(c);
            sn.push(s);
            let gj = g[j];
            g[j] = c * gj;
            g.push(-s.conj() * gj);
            hess.push(h);

            let rel = g[j + 1].norm() / bnorm;
            history.push(rel);
            let done = rel <= tol || wn == 0.0;
            if !done {
                basis.push(w.iter().map(|c| c / wn).collect());
            }
            if done || j + 1 == restart || iterations >= max_iterations {
                let m = j + 1;
                let y = back_substitute(&hess, &g, m);
                for (i, yi) in y.iter().enumerate() {
                    for (xk, vk) in x.iter_mut().zip(&basis[i]) {
                        *xk += yi * vk;
                    }
                }
                let ax = apply(&x);
                r = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
                // The outer loop re-checks the true residual.
                break;
            }
        }
    }
    let residual = norm(&r) / bnorm;
    GmresOutcome {
        x,
        iterations,
        history,
        residual,
    }
}

/// Rotation with `c` real such that `[c s; −s̄ c]·[a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let (an, bn) = (a.norm(), b.norm());
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let d = (an * an + bn * bn).sqrt();
    let c = an / d;
    let s = (a / an) * b.conj() / d;
    (c, s)
}

fn back_substitute(hess: &[Vec<Complex64>], g: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut y = vec![Complex64::new(0.0, 0.0); m];
    for i in (0..m).rev() {
        let mut s = g[i];
        for (l, yl) in y.iter().enumerate().take(m).skip(i + 1) {
            s -= hess[l][i] * yl;
        }
        y[i] = s / hess[i][i];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_system(n: usize, seed: u64) -> (Vec<Vec<Complex64>>, Vec<Complex64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let a: Vec<Vec<Complex64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Complex64::new(3.0, 0.5) + c() } else { c() * (0.8 / (n as f64).sqrt()) })
                    .collect()
            })
            .collect();
        let b = (0..n).map(|_| c()).collect();
        (a, b)
    }

    fn matvec(a: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
        a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    #[test]
    fn solves_dense_system_with_and_without_restart() {
        let (a, b) = random_system(40, 5);
        for restart in [5, 40] {
            let out = gmres(|x| matvec(&a, x), &b, 1e-10, 500, restart);
            assert!(out.residual < 1e-9, "restart {restart}: {}", out.residual);
            assert!(out.history.len() == out.iterations);
        }
    }

    #[test]
    fn identity_converges_in_one_step_and_zero_rhs_in_none() {
        let b: Vec<Complex64> = (0..10).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let out = gmres(|x| x.to_vec(), &b, 1e-12, 10, 10);
        assert_eq!(out.iterations, 1);
        assert!(out.residual < 1e-14);
        let z = vec![Complex64::new(0.0, 0.0); 10];
        assert_eq!(gmres(|x| x.to_vec(), &z, 1e-12, 10, 10).iterations, 0);
    }

    #[test]
    fn reports_non_convergence_through_residual() {
        let (a, b) = random_system(30, 9);
        let out = gmres(|x| matvec(&a, x), &b, 1e-14, 3, 3);
        assert_eq!(out.iterations, 3);
        assert!(out.residual > 1e-14);
    }
}
