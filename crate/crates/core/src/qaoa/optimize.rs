//! Derivative-free maximization with linear models over a simplex and a
//! shrinking trust radius, in the manner of COBYLA (unconstrained case).

use serde::{Deserialize, Serialize};

use super::{QaoaError, QaoaParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub max_evals: usize,
    /// Initial simplex edge length and trust radius.
    pub rho_begin: f64,
    /// Stop once the trust radius shrinks below this.
    pub rho_end: f64,
    /// Starting `[γ…, β…]`; `None` uses `γ_k = 0.4`, `β_k = 0.3`.
    #[serde(default)]
    pub initial: Option<QaoaParams>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_evals: 200,
            rho_begin: 0.5,
            rho_end: 1e-6,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub params: QaoaParams,
    pub value: f64,
    pub evaluations: usize,
}

struct Budget<F> {
    f: F,
    used: usize,
    max: usize,
    best: (Vec<f64>, f64),
}

impl<F: FnMut(&QaoaParams) -> f64> Budget<F> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.used >= self.max {
            return None;
        }
        self.used += 1;
        let v = (self.f)(&QaoaParams::from_slice(x));
        if v > self.best.1 {
            self.best = (x.to_vec(), v);
        }
        Some(v)
    }
}

/// Solves `a · g = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot = &top[col];
        for (offset, r) in rest.iter_mut().enumerate() {
            let f = r[col] / pivot[col];
            for (x, p) in r[col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * p;
            }
            b[col + 1 + offset] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Maximizes `evaluator` over the `2p` QAOA angles. The returned point is
/// the best one evaluated, so it is never worse than the start.
pub fn optimize_parameters(
    p: usize,
    evaluator: impl FnMut(&QaoaParams) -> f64,
    config: &OptimizerConfig,
) -> Result<OptimizeResult, QaoaError> {
    let n = 2 * p;
    if p == 0 {
        return Err(QaoaError::BadParams { gammas: 0, betas: 0 });
    }
    if config.max_evals < n + 1 {
        return Err(QaoaError::InsufficientBudget {
            max_evals: config.max_evals,
            needed: n + 1,
        });
    }
    let x0 = match &config.initial {
        Some(init) if init.p() == p => init.to_vec(),
        Some(init) => {
            return Err(QaoaError::BadParams {
                gammas: init.gammas.len(),
                betas: init.betas.len(),
            })
        }
        None => [vec![0.4; p], vec![0.3; p]].concat(),
    };

    let mut budget = Budget {
        f: evaluator,
        used: 0,
        max: config.max_evals,
        best: (x0.clone(), f64::NEG_INFINITY),
    };
    let f0 = budget.eval(&x0).expect("budget checked");
    let mut rho = config.rho_begin;

    'outer: loop {
        // Simplex: the incumbent plus one vertex along each axis.
        let centre = budget.best.0.clone();
        let f_centre = budget.best.1;
        let mut vertices: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = centre.clone();
            v[i] += rho;
            let Some(fv) = budget.eval(&v) else { break 'outer };
            vertices.push((v, fv));
        }
        let (mut centre, mut f_centre) = (centre, f_centre);

        loop {
            let a: Vec<Vec<f64>> = vertices
                .iter()
                .map(|(v, _)| v.iter().zip(&centre).map(|(x, c)| x - c).collect())
                .collect();
            let b: Vec<f64> = vertices.iter().map(|(_, fv)| fv - f_centre).collect();
            let Some(g) = solve(a, b) else { break };
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-12 {
                break;
            }
            let trial: Vec<f64> = centre.iter().zip(&g).map(|(c, gi)| c + rho * gi / norm).collect();
            let Some(f_trial) = budget.eval(&trial) else {
                break 'outer;
            };
            if f_trial <= f_centre {
                break;
            }
            // Accept: the old centre replaces the vertex farthest from the
            // new one, keeping the simplex local.
            let far = (0..n)
                .max_by(|&i, &j| dist2(&vertices[i].0, &trial).total_cmp(&dist2(&vertices[j].0, &trial)))
                .expect("n ≥ 2");
            vertices[far] = (centre, f_centre);
            centre = trial;
            f_centre = f_trial;
            if vertices.iter().any(|(v, _)| dist2(v, &centre).sqrt() > 2.0 * rho) {
                break;
            }
        }

        rho *= 0.5;
        if rho < config.rho_end {
            break;
        }
    }

    let (x, value) = budget.best.clone();
    debug_assert!(value >= f0);
    Ok(OptimizeResult {
        params: QaoaParams::from_slice(&x),
        value,
        evaluations: budget.used,
    })
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
