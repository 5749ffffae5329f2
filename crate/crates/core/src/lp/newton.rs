//! Max-entropy dual Newton for `{Ax = 1, x ≥ 0}` with three ones per column.
//!
//! Minimises `f(λ) = Σ_T exp(Σ_{e⊂T} λ_e) − Σ_e λ_e`. At a minimiser
//! `x_T = exp(s_T)` solves the system with every entry positive. Any feasible
//! `x*` gives `f ≥ Σ_T x*_T (1 − ln x*_T) ≥ 0`, so a negative value proves
//! infeasibility.

pub(crate) enum NewtonOutcome {
    Converged(Vec<f64>),
    /// `f(λ) < 0` was reached.
    Infeasible(Vec<f64>),
    Stuck {
        x: Vec<f64>,
        lambda: Vec<f64>,
        residual: f64,
    },
}

pub(crate) struct System<'a> {
    pub rows: usize,
    pub cols: &'a [[u32; 3]],
}

impl System<'_> {
    fn primal(&self, lambda: &[f64], x: &mut [f64]) {
        for (xt, c) in x.iter_mut().zip(self.cols) {
            *xt = (lambda[c[0] as usize] + lambda[c[1] as usize] + lambda[c[2] as usize]).exp();
        }
    }

    fn objective(&self, lambda: &[f64], x: &[f64]) -> f64 {
        let a: f64 = x.iter().sum();
        let b: f64 = lambda.iter().sum();
        a - b
    }

    /// `out = A x`.
    fn row_sums(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (xt, c) in x.iter().zip(self.cols) {
            for &e in c {
                out[e as usize] += xt;
            }
        }
    }

    /// `out = A diag(w) Aᵀ v + mu v`.
    fn hess(&self, w: &[f64], mu: f64, v: &[f64], out: &mut [f64]) {
        out.iter_mut().zip(v).for_each(|(o, vi)| *o = mu * vi);
        for (wt, c) in w.iter().zip(self.cols) {
            let s = wt * (v[c[0] as usize] + v[c[1] as usize] + v[c[2] as usize]);
            for &e in c {
                out[e as usize] += s;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Preconditioned CG on the Newton system; returns the step.
fn pcg(sys: &System, w: &[f64], mu: f64, rhs: &[f64], rel_tol: f64, max_iter: usize) -> Vec<f64> {
    let m = sys.rows;
    let mut diag = vec![mu; m];
    for (wt, c) in w.iter().zip(sys.cols) {
        for &e in c {
            diag[e as usize] += wt;
        }
    }
    let mut x = vec![0.0; m];
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(a, d)| a / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let stop = rel_tol * dot(rhs, rhs).sqrt();
    let mut hp = vec![0.0; m];
    for _ in 0..max_iter {
        sys.hess(w, mu, &p, &mut hp);
        let php = dot(&p, &hp);
        if php <= 0.0 {
            break;
        }
        let alpha = rz / php;
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * hp[i];
        }
        if dot(&r, &r).sqrt() <= stop {
            break;
        }
        for i in 0..m {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..m {
            p[i] = z[i] + beta * p[i];
        }
    }
    x
}

pub(crate) fn max_entropy(sys: &System, tol: f64, max_iters: usize) -> NewtonOutcome {
    let m = sys.rows;
    let mut count = vec![0u32; m];
    for c in sys.cols {
        for &e in c {
            count[e as usize] += 1;
        }
    }
    let mut lambda: Vec<f64> = count
        .iter()
        .map(|&k| -(k.max(1) as f64).ln() / 3.0)
        .collect();
    let mut x = vec![0.0; sys.cols.len()];
    let mut g = vec![0.0; m];
    let mut trial = vec![0.0; m];
    let mut xt = vec![0.0; sys.cols.len()];
    sys.primal(&lambda, &mut x);
    let mut f = sys.objective(&lambda, &x);
    let mut residual = f64::INFINITY;
    for _ in 0..max_iters {
        if f < 0.0 {
            return NewtonOutcome::Infeasible(lambda);
        }
        sys.row_sums(&x, &mut g);
        g.iter_mut().for_each(|v| *v -= 1.0);
        residual = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if residual <= tol {
            return NewtonOutcome::Converged(x);
        }
        let neg: Vec<f64> = g.iter().map(|v| -v).collect();
        let gn = dot(&g, &g).sqrt();
        let d = pcg(
            sys,
            &x,
            1e-12,
            &neg,
            (0.5f64).min(gn.sqrt()).max(1e-10),
            400,
        );
        let slope = dot(&g, &d);
        if !(slope < 0.0) {
            break;
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..m {
                trial[i] = lambda[i] + t * d[i];
            }
            sys.primal(&trial, &mut xt);
            let ft = sys.objective(&trial, &xt);
            if ft.is_finite() && ft <= f + 1e-4 * t * slope {
                std::mem::swap(&mut lambda, &mut trial);
                std::mem::swap(&mut x, &mut xt);
                f = ft;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if f < 0.0 {
        return NewtonOutcome::Infeasible(lambda);
    }
    NewtonOutcome::Stuck {
        x,
        lambda,
        residual,
    }
}

/// Least-norm correction on the support of `x` so that `Ax = 1`; returns the
/// corrected vector if it stays nonnegative.
pub(crate) fn refine(sys: &System, x: &[f64]) -> Option<Vec<f64>> {
    let m = sys.rows;
    let mut r = vec![0.0; m];
    sys.row_sums(x, &mut r);
    r.iter_mut().for_each(|v| *v = 1.0 - *v);
    let w: Vec<f64> = x.iter().map(|&v| if v > 0.0 { 1.0 } else { 0.0 }).collect();
    let z = pcg(sys, &w, 0.0, &r, 1e-14, 2000);
    let mut out = x.to_vec();
    for ((o, c), wt) in out.iter_mut().zip(sys.cols).zip(&w) {
        *o += wt * (z[c[0] as usize] + z[c[1] as usize] + z[c[2] as usize]);
    }
    if out.iter().any(|&v| v < 0.0) {
        return None;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_converges_to_half() {
        let cols = [[0, 1, 3], [0, 2, 4], [1, 2, 5], [3, 4, 5]];
        let sys = System {
            rows: 6,
            cols: &cols,
        };
        match max_entropy(&sys, 1e-12, 50) {
            NewtonOutcome::Converged(x) => x.iter().for_each(|v| assert!((v - 0.5).abs() < 1e-11)),
            _ => panic!(),
        }
    }

    #[test]
    fn overloaded_row_is_infeasible() {
        // Two columns both need to be 1 for rows 1 and 2, but share row 0.
        let cols = [[0, 1, 2], [0, 3, 4]];
        let sys = System {
            rows: 5,
            cols: &cols,
        };
        assert!(matches!(
            max_entropy(&sys, 1e-12, 200),
            NewtonOutcome::Infeasible(_)
        ));
    }
}
