use crate::error::{Error, Result};
use serde::Serialize;

/// Search budget and convergence settings.
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Evaluations allowed without a relative improvement of `improvement`.
    pub stall_budget: usize,
    pub improvement: f64,
    /// Simplex size (relative to the box) at which a start is converged.
    pub x_tol: f64,
    /// Initial simplex edge relative to the box.
    pub initial_step: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { stall_budget: 500, improvement: 1e-4, x_tol: 1e-6, initial_step: 0.1 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    pub params: Vec<f64>,
    pub score: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StartResult {
    pub seed: Vec<f64>,
    pub best: Vec<f64>,
    pub score: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub best: Vec<f64>,
    pub score: f64,
    /// Every objective evaluation in order.
    pub trace: Vec<TraceRow>,
    /// Simplex iterations summed over all starts.
    pub iterations: usize,
    /// Set when a start ran out of its stall budget.
    pub budget_exhausted: bool,
    pub starts: Vec<StartResult>,
}

struct Tracker<'a, F> {
    f: &'a mut F,
    trace: Vec<TraceRow>,
    best: f64,
    since_improvement: usize,
}

impl<F: FnMut(&[f64]) -> Result<f64>> Tracker<'_, F> {
    fn eval(&mut self, x: &[f64], improvement: f64) -> Result<f64> {
        let v = (self.f)(x)?;
        self.trace.push(TraceRow { iter: self.trace.len(), params: x.to_vec(), score: v });
        if v < self.best - improvement * self.best.abs().max(1e-12) {
            self.since_improvement = 0;
        } else {
            self.since_improvement += 1;
        }
        if v < self.best {
            self.best = v;
        }
        Ok(v)
    }
}

fn project(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
}

/// Box-constrained Nelder–Mead (moves projected back into the box),
/// restarted from the lower corner, the upper corner and the center.
pub fn minimize<F>(mut f: F, lower: &[f64], upper: &[f64], opts: SearchOptions) -> Result<SearchResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = lower.len();
    if n == 0 || upper.len() != n {
        return Err(Error::config("search box needs matching, non-empty bounds"));
    }
    if lower.iter().zip(upper).any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
        return Err(Error::config("search box is empty or unbounded"));
    }
    let range: Vec<f64> = lower.iter().zip(upper).map(|(a, b)| b - a).collect();
    let mut tr = Tracker { f: &mut f, trace: vec![], best: f64::INFINITY, since_improvement: 0 };

    if range.iter().all(|&r| r == 0.0) {
        let score = tr.eval(lower, opts.improvement)?;
        return Ok(SearchResult {
            best: lower.to_vec(),
            score,
            trace: tr.trace,
            iterations: 0,
            budget_exhausted: false,
            starts: vec![StartResult { seed: lower.to_vec(), best: lower.to_vec(), score }],
        });
    }

    let center: Vec<f64> = lower.iter().zip(upper).map(|(a, b)| 0.5 * (a + b)).collect();
    let seeds = [(lower.to_vec(), 1.0), (upper.to_vec(), -1.0), (center, 1.0)];
    let mut starts = vec![];
    let mut iterations = 0;
    let mut exhausted = false;

    for (seed, dir) in seeds {
        tr.since_improvement = 0;
        tr.best = f64::INFINITY;
        let mut simplex: Vec<Vec<f64>> = vec![seed.clone()];
        for i in 0..n {
            if range[i] == 0.0 {
                continue;
            }
            let mut v = seed.clone();
            v[i] += dir * opts.initial_step * range[i];
            project(&mut v, lower, upper);
            simplex.push(v);
        }
        // degenerate dimensions: pad so the simplex has n+1 vertices
        while simplex.len() < n + 1 {
            simplex.push(seed.clone());
        }
        let mut values: Vec<f64> = Vec::with_capacity(n + 1);
        for v in &simplex {
            values.push(tr.eval(v, opts.improvement)?);
        }

        loop {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let size = simplex[1..]
                .iter()
                .map(|v| {
                    v.iter().zip(&simplex[0]).zip(&range).filter(|(_, r)| **r > 0.0).map(|((a, b), r)| ((a - b) / r).abs()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if size < opts.x_tol {
                break;
            }
            if tr.since_improvement > opts.stall_budget {
                exhausted = true;
                break;
            }
            iterations += 1;

            let centroid: Vec<f64> =
                (0..n).map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
            let along = |t: f64| {
                let mut p: Vec<f64> = (0..n).map(|j| centroid[j] + t * (simplex[n][j] - centroid[j])).collect();
                project(&mut p, lower, upper);
                p
            };
            let xr = along(-1.0);
            let fr = tr.eval(&xr, opts.improvement)?;
            if fr < values[0] {
                let xe = along(-2.0);
                let fe = tr.eval(&xe, opts.improvement)?;
                if fe < fr {
                    simplex[n] = xe;
                    values[n] = fe;
                } else {
                    simplex[n] = xr;
                    values[n] = fr;
                }
            } else if fr < values[n - 1] {
                simplex[n] = xr;
                values[n] = fr;
            } else {
                let (xc, fc) = if fr < values[n] {
                    let xc = along(-0.5);
                    let fc = tr.eval(&xc, opts.improvement)?;
                    (xc, fc)
                } else {
                    let xc = along(0.5);
                    let fc = tr.eval(&xc, opts.improvement)?;
                    (xc, fc)
                };
                if fc < values[n].min(fr) {
                    simplex[n] = xc;
                    values[n] = fc;
                } else {
                    for i in 1..=n {
                        let v: Vec<f64> = (0..n).map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j])).collect();
                        values[i] = tr.eval(&v, opts.improvement)?;
                        simplex[i] = v;
                    }
                }
            }
        }
        let k = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
        starts.push(StartResult { seed, best: simplex[k].clone(), score: values[k] });
    }

    let winner = starts.iter().min_by(|a, b| a.score.total_cmp(&b.score)).unwrap();
    // never worse than any evaluated point, seeds included
    let row = tr.trace.iter().min_by(|a, b| a.score.total_cmp(&b.score)).unwrap();
    let (best, score) =
        if row.score < winner.score { (row.params.clone(), row.score) } else { (winner.best.clone(), winner.score) };
    Ok(SearchResult { best, score, trace: tr.trace, iterations, budget_exhausted: exhausted, starts })
}
