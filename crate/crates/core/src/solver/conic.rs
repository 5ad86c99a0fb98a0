use std::f64::consts::SQRT_2;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use serde::{Deserialize, Serialize};

use super::{Certificate, ConicProblem, LinearForm, Sense, SolveResult, Status};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol_gap: f64,
    pub tol_feas: f64,
    pub max_iter: u32,
    pub verbose: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol_gap: 1e-8, tol_feas: 1e-8, max_iter: 200, verbose: false }
    }
}

/// LP entry point; rejects problems with PSD blocks.
pub fn solve_lp(p: &ConicProblem, opts: &SolverOptions) -> Result<SolveResult> {
    if !p.blocks.is_empty() {
        return Err(Error::Solver("solve_lp called on a problem with PSD blocks".into()));
    }
    solve(p, opts)
}

pub fn solve_sdp(p: &ConicProblem, opts: &SolverOptions) -> Result<SolveResult> {
    solve(p, opts)
}

struct Rows {
    i: Vec<usize>,
    j: Vec<usize>,
    v: Vec<f64>,
    b: Vec<f64>,
}

impl Rows {
    // f(x) in K  <=>  s = b - A x  with  A = -a, b = constant
    fn push(&mut self, f: &LinearForm, scale: f64) {
        let r = self.b.len();
        for &(j, c) in &f.terms {
            self.i.push(r);
            self.j.push(j);
            self.v.push(-c * scale);
        }
        self.b.push(f.constant * scale);
    }
}

/// Solves any [`ConicProblem`] with the interior-point backend.
pub fn solve(p: &ConicProblem, opts: &SolverOptions) -> Result<SolveResult> {
    p.validate()?;
    let n = p.num_variables();
    let sign = match p.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut q = vec![0.0; n];
    for &(j, c) in &p.objective.terms {
        q[j] = sign * c;
    }

    let mut rows = Rows { i: Vec::new(), j: Vec::new(), v: Vec::new(), b: Vec::new() };
    let mut cones = Vec::new();
    for f in &p.equalities {
        rows.push(f, 1.0);
    }
    if !p.equalities.is_empty() {
        cones.push(SupportedConeT::ZeroConeT(p.equalities.len()));
    }
    for f in &p.inequalities {
        rows.push(f, 1.0);
    }
    if !p.inequalities.is_empty() {
        cones.push(SupportedConeT::NonnegativeConeT(p.inequalities.len()));
    }
    for blk in &p.blocks {
        // scaled upper triangle, column by column
        for j in 0..blk.size {
            for i in 0..=j {
                rows.push(blk.entry(i, j), if i == j { 1.0 } else { SQRT_2 });
            }
        }
        if blk.size > 0 {
            cones.push(SupportedConeT::PSDTriangleConeT(blk.size));
        }
    }
    let m = rows.b.len();
    let a = CscMatrix::new_from_triplets(m, n, rows.i, rows.j, rows.v);
    let pm = CscMatrix::<f64>::zeros((n, n));

    // the supernodal factorization pays off on dense PSD blocks; sparse LPs
    // converge more reliably with the simple LDL
    let method = if p.blocks.is_empty() { "qdldl" } else { "faer" };
    let settings = DefaultSettingsBuilder::default()
        .verbose(opts.verbose)
        .max_iter(opts.max_iter)
        .tol_gap_abs(opts.tol_gap)
        .tol_gap_rel(opts.tol_gap)
        .tol_feas(opts.tol_feas)
        .direct_solve_method(method.to_string())
        .build()
        .map_err(|e| Error::Solver(format!("settings: {e:?}")))?;
    let mut solver = DefaultSolver::new(&pm, &q, &a, &rows.b, &cones, settings)
        .map_err(|e| Error::Solver(format!("setup: {e:?}")))?;
    solver.solve();
    let sol = &solver.solution;

    let status = match sol.status {
        SolverStatus::Solved => Status::Optimal,
        SolverStatus::AlmostSolved | SolverStatus::InsufficientProgress | SolverStatus::MaxIterations
            if sol.x.iter().all(|v| v.is_finite()) && sol.r_prim < 1e-5 && sol.r_dual < 1e-5 =>
        {
            Status::Inaccurate
        }
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => Status::Infeasible,
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => Status::Unbounded,
        _ => Status::Failed,
    };
    log::debug!("conic solve: {:?} in {} iterations", sol.status, sol.iterations);

    let multipliers = unpack(p, &sol.z);
    let certificate = (status == Status::Infeasible).then(|| multipliers.clone());
    let x = sol.x.clone();
    let primal = p.objective.eval(&x);
    let dual = sign * sol.obj_val_dual + p.objective.constant;
    Ok(SolveResult {
        status,
        primal,
        dual,
        x,
        multipliers,
        certificate,
        iterations: sol.iterations,
        solve_time: sol.solve_time,
    })
}

fn unpack(p: &ConicProblem, z: &[f64]) -> Certificate {
    let ne = p.equalities.len();
    let ni = p.inequalities.len();
    let eq = z[..ne].to_vec();
    let ineq = z[ne..ne + ni].to_vec();
    let mut k = ne + ni;
    let mut blocks = Vec::with_capacity(p.blocks.len());
    for blk in &p.blocks {
        let mut mat = vec![vec![0.0; blk.size]; blk.size];
        for j in 0..blk.size {
            for i in 0..=j {
                let v = if i == j { z[k] } else { z[k] / SQRT_2 };
                mat[i][j] = v;
                mat[j][i] = v;
                k += 1;
            }
        }
        blocks.push(mat);
    }
    Certificate { eq, ineq, blocks }
}
