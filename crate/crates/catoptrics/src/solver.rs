//! Damped Newton iteration and multistart root search.
//!
//! All root finding in the crate funnels through this module: the surface
//! hit solver (2 real unknowns), the mixed-characteristic domain equation
//! (2), and the point-characteristic system (4). Systems supply their raw
//! residuals together with per-equation scales; Newton steps use the raw
//! values while convergence is judged on the scaled ones, which keeps
//! tolerances meaningful for polynomial equations whose monomials grow
//! with |ξ|.
//!
//! A multistart search either returns roots, certifies emptiness (the
//! scaled residual stays above a margin across the whole seed grid), or
//! reports failure when the landscape dips low but no start converges.

// The in-place elimination below indexes several rows of the same array
// at once; index loops are the readable form for that.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, Real};

/// One evaluation of a residual system: raw equation values plus the
/// magnitude each should be compared against (entries ≥ 1).
#[derive(Clone, Copy, Debug)]
pub struct ResidualEval<T, const N: usize> {
    pub raw: [T; N],
    pub scale: [T; N],
}

impl<T: Real, const N: usize> ResidualEval<T, N> {
    /// Scaled infinity norm of the residual.
    pub fn norm(&self) -> T {
        let mut m = T::zero();
        for i in 0..N {
            m = m.max(self.raw[i].abs() / self.scale[i]);
        }
        m
    }
}

/// Tunables shared by Newton iteration and multistart search.
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions<T> {
    /// Seed grid resolution per axis for multistart searches.
    pub grid: usize,
    /// Residual norm at which iteration stops early.
    pub target_tol: T,
    /// Residual norm below which a stalled iterate still counts as a root.
    pub accept_tol: T,
    pub max_iter: usize,
    /// Relative step for finite-difference Jacobians.
    pub fd_step: T,
    /// Roots closer than this (infinity norm) are merged.
    pub dedup_tol: T,
    /// Landscape floor above which a rootless search counts as verified
    /// empty rather than a solver failure.
    pub miss_margin: T,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions {
            grid: 16,
            target_tol: real(1e-12),
            accept_tol: real(1e-10),
            max_iter: 50,
            fd_step: real(1e-7),
            dedup_tol: real(1e-6),
            miss_margin: real(1e-6),
        }
    }
}

/// Terminal state of a single Newton run.
#[derive(Clone, Copy, Debug)]
pub enum NewtonOutcome<T, const N: usize> {
    Converged { x: [T; N], residual: T, iters: usize },
    Stalled { x: [T; N], residual: T },
    /// The run left the region where the system is defined.
    Exited,
}

fn solve_linear<T: Real, const N: usize>(a: &[[T; N]; N], b: &[T; N]) -> Option<[T; N]> {
    let mut m = *a;
    let mut rhs = *b;
    let mut max_entry = T::zero();
    for row in m.iter() {
        for &v in row.iter() {
            max_entry = max_entry.max(v.abs());
        }
    }
    let pivot_floor = real::<T>(1e-14) * max_entry.max(T::one());
    for col in 0..N {
        let mut pivot = col;
        for row in col + 1..N {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col].abs() < pivot_floor {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..N {
            let f = m[row][col] / m[col][col];
            for k in col..N {
                m[row][k] = m[row][k] - f * m[col][k];
            }
            rhs[row] = rhs[row] - f * rhs[col];
        }
    }
    let mut x = [T::zero(); N];
    for col in (0..N).rev() {
        let mut acc = rhs[col];
        for k in col + 1..N {
            acc = acc - m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Levenberg-style step for a rank-deficient Jacobian: solves
/// (JᵀJ + λI)δ = −Jᵀf. Keeps multistart functional on solution continua,
/// where the plain Newton matrix is singular everywhere.
fn damped_step<T: Real, const N: usize>(j: &[[T; N]; N], f: &[T; N]) -> Option<[T; N]> {
    let mut jtj = [[T::zero(); N]; N];
    let mut jtf = [T::zero(); N];
    for a in 0..N {
        for b in 0..N {
            let mut acc = T::zero();
            for k in 0..N {
                acc = acc + j[k][a] * j[k][b];
            }
            jtj[a][b] = acc;
        }
        let mut acc = T::zero();
        for k in 0..N {
            acc = acc + j[k][a] * f[k];
        }
        jtf[a] = -acc;
    }
    let mut diag_max = T::zero();
    for i in 0..N {
        diag_max = diag_max.max(jtj[i][i]);
    }
    let lambda = real::<T>(1e-8) * diag_max.max(real(1e-30));
    for i in 0..N {
        jtj[i][i] = jtj[i][i] + lambda;
    }
    solve_linear(&jtj, &jtf)
}

fn fd_jacobian<T: Real, const N: usize, F>(f: &F, x: &[T; N], fd_step: T) -> Option<[[T; N]; N]>
where
    F: Fn(&[T; N]) -> Option<ResidualEval<T, N>>,
{
    let mut j = [[T::zero(); N]; N];
    for col in 0..N {
        let h = fd_step * x[col].abs().max(T::one());
        let mut xp = *x;
        let mut xm = *x;
        xp[col] = xp[col] + h;
        xm[col] = xm[col] - h;
        let fp = f(&xp)?;
        let fm = f(&xm)?;
        let two_h = real::<T>(2.0) * h;
        for row in 0..N {
            j[row][col] = (fp.raw[row] - fm.raw[row]) / two_h;
        }
    }
    Some(j)
}

/// Runs damped Newton with backtracking from one seed. The system returns
/// `None` outside its region of definition; a run that starts there exits.
pub fn newton_run<T: Real, const N: usize, F>(
    f: &F,
    seed: [T; N],
    opts: &SolveOptions<T>,
) -> NewtonOutcome<T, N>
where
    F: Fn(&[T; N]) -> Option<ResidualEval<T, N>>,
{
    let mut x = seed;
    let mut eval = match f(&x) {
        Some(e) => e,
        None => return NewtonOutcome::Exited,
    };
    let mut res = eval.norm();
    let mut best_x = x;
    let mut best_res = res;
    let mut iters = 0;
    while iters < opts.max_iter {
        if res < opts.target_tol {
            return NewtonOutcome::Converged { x, residual: res, iters };
        }
        let j = match fd_jacobian(f, &x, opts.fd_step) {
            Some(j) => j,
            None => break,
        };
        let mut neg = eval.raw;
        for v in neg.iter_mut() {
            *v = -*v;
        }
        let delta = match solve_linear(&j, &neg).or_else(|| damped_step(&j, &eval.raw)) {
            Some(d) if d.iter().all(|v| v.is_finite()) => d,
            _ => break,
        };
        let mut step = T::one();
        let mut improved = false;
        for _ in 0..=6 {
            let mut cand = x;
            for i in 0..N {
                cand[i] = cand[i] + delta[i] * step;
            }
            if let Some(e) = f(&cand) {
                let r = e.norm();
                if r < res {
                    x = cand;
                    eval = e;
                    res = r;
                    improved = true;
                    break;
                }
            }
            step = step * real(0.5);
        }
        if !improved {
            break;
        }
        if res < best_res {
            best_res = res;
            best_x = x;
        }
        iters += 1;
    }
    if best_res < opts.accept_tol {
        NewtonOutcome::Converged { x: best_x, residual: best_res, iters }
    } else {
        NewtonOutcome::Stalled { x: best_x, residual: best_res }
    }
}

/// A deduplicated multistart root.
#[derive(Clone, Copy, Debug)]
pub struct RootInfo<T, const N: usize> {
    pub x: [T; N],
    pub residual: T,
}

/// Outcome of a multistart search over a seed set.
#[derive(Clone, Debug)]
pub enum SearchResult<T, const N: usize> {
    Roots(Vec<RootInfo<T, N>>),
    /// No roots, and the scaled residual never dropped below the miss
    /// margin anywhere in the searched domain.
    VerifiedEmpty { floor: T },
    /// No roots, but the landscape dips below the margin somewhere: the
    /// search can neither produce a root nor certify emptiness.
    Failed { best_residual: T },
}

fn lex_less<T: Real, const N: usize>(a: &[T; N], b: &[T; N]) -> bool {
    for i in 0..N {
        if a[i] < b[i] {
            return true;
        }
        if a[i] > b[i] {
            return false;
        }
    }
    false
}

/// Multistart Newton over the given seeds. `accept` restricts roots (and
/// the emptiness certificate) to the search domain; converged points
/// outside it are discarded.
pub fn multistart<T: Real, const N: usize, F, G>(
    f: &F,
    seeds: &[[T; N]],
    accept: &G,
    opts: &SolveOptions<T>,
) -> SearchResult<T, N>
where
    F: Fn(&[T; N]) -> Option<ResidualEval<T, N>>,
    G: Fn(&[T; N]) -> bool,
{
    let mut floor = T::infinity();
    let mut roots: Vec<RootInfo<T, N>> = Vec::new();
    for &seed in seeds {
        if let Some(e) = f(&seed) {
            floor = floor.min(e.norm());
        }
        match newton_run(f, seed, opts) {
            NewtonOutcome::Converged { x, residual, .. } => {
                if accept(&x) {
                    roots.push(RootInfo { x, residual });
                }
            }
            NewtonOutcome::Stalled { x, residual } => {
                if accept(&x) {
                    floor = floor.min(residual);
                }
            }
            NewtonOutcome::Exited => {}
        }
    }
    if roots.is_empty() {
        return if floor >= opts.miss_margin {
            SearchResult::VerifiedEmpty { floor }
        } else {
            SearchResult::Failed { best_residual: floor }
        };
    }
    // Dedup: best residual first, then a greedy distance filter.
    roots.sort_by(|a, b| a.residual.partial_cmp(&b.residual).unwrap());
    let mut kept: Vec<RootInfo<T, N>> = Vec::new();
    'outer: for r in roots {
        for k in &kept {
            let mut dist = T::zero();
            for i in 0..N {
                dist = dist.max((r.x[i] - k.x[i]).abs());
            }
            if dist < opts.dedup_tol {
                continue 'outer;
            }
        }
        kept.push(r);
    }
    kept.sort_by(|a, b| {
        if lex_less(&a.x, &b.x) {
            std::cmp::Ordering::Less
        } else if lex_less(&b.x, &a.x) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    SearchResult::Roots(kept)
}

/// Plain Newton entry point: solves `system = 0` from one seed with unit
/// residual scales. Convergence target is `tol`; an iterate is still
/// accepted at the looser of `tol` and 1e−10.
pub fn newton_solve<T: Real, const N: usize>(
    system: impl Fn(&[T; N]) -> [T; N],
    seed: [T; N],
    tol: T,
    max_iter: usize,
) -> Result<[T; N]> {
    let opts = SolveOptions {
        target_tol: tol,
        accept_tol: tol.max(real(1e-10)),
        max_iter,
        ..SolveOptions::default()
    };
    let f = |x: &[T; N]| {
        Some(ResidualEval {
            raw: system(x),
            scale: [T::one(); N],
        })
    };
    match newton_run(&f, seed, &opts) {
        NewtonOutcome::Converged { x, .. } => Ok(x),
        NewtonOutcome::Stalled { residual, .. } => Err(Error::SolverFailure {
            best_residual: to_f64(residual),
        }),
        NewtonOutcome::Exited => Err(Error::SolverFailure {
            best_residual: f64::INFINITY,
        }),
    }
}
