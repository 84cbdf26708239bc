//! Gauss–Legendre rules, adaptive matrix-valued integration along a segment,
//! and composite tensor-product integration over rectangles.

use rayon::prelude::*;

use crate::matrix::{frob, Mat, C};

/// n-point Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> GaussLegendre {
        assert!(n >= 1, "a Gauss rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for k in 0..n.div_ceil(2) {
            // Chebyshev-like starting guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            nodes[n - 1 - k] = x;
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    /// Points of the Gauss rule applied per subinterval.
    pub order: usize,
    pub max_depth: usize,
    /// Absolute error target for the whole interval, shared out by length.
    pub tol: f64,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            order: 15,
            max_depth: 12,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveResult {
    pub value: Mat,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AdaptiveFailure<E> {
    Integrand(E),
    NonConvergent { lo: f64, hi: f64, estimate: f64 },
}

/// ∫_a^b f(t) dt for matrix-valued f. Each interval is compared against the
/// sum over its two halves; disagreement above the local share of `tol`
/// triggers bisection, up to `max_depth` levels.
pub fn integrate_adaptive<E, F>(
    f: F,
    a: f64,
    b: f64,
    opts: &AdaptiveOptions,
) -> Result<AdaptiveResult, AdaptiveFailure<E>>
where
    F: Fn(f64) -> Result<Mat, E>,
{
    let rule = GaussLegendre::new(opts.order);
    let mut evals = 0usize;
    let span = (b - a).abs();
    if span == 0.0 {
        let n = f(a).map_err(AdaptiveFailure::Integrand)?;
        return Ok(AdaptiveResult {
            value: Mat::zeros(n.nrows(), n.ncols()),
            error: 0.0,
            evaluations: 1,
        });
    }
    let whole = apply_rule(&rule, &f, a, b, &mut evals)?;
    let mut ctx = Ctx {
        rule: &rule,
        f: &f,
        span,
        opts,
        evals: 0,
    };
    let (value, error) = ctx.recurse(a, b, whole, 0)?;
    Ok(AdaptiveResult {
        value,
        error,
        evaluations: evals + ctx.evals,
    })
}

struct Ctx<'a, F> {
    rule: &'a GaussLegendre,
    f: &'a F,
    span: f64,
    opts: &'a AdaptiveOptions,
    evals: usize,
}

impl<F> Ctx<'_, F> {
    fn recurse<E>(
        &mut self,
        a: f64,
        b: f64,
        whole: Mat,
        depth: usize,
    ) -> Result<(Mat, f64), AdaptiveFailure<E>>
    where
        F: Fn(f64) -> Result<Mat, E>,
    {
        let m = 0.5 * (a + b);
        let left = apply_rule(self.rule, self.f, a, m, &mut self.evals)?;
        let right = apply_rule(self.rule, self.f, m, b, &mut self.evals)?;
        let halves = &left + &right;
        let err = frob(&(&halves - &whole));
        let budget = self.opts.tol * (b - a).abs() / self.span;
        if err <= budget {
            return Ok((halves, err));
        }
        if depth >= self.opts.max_depth {
            return Err(AdaptiveFailure::NonConvergent {
                lo: a,
                hi: b,
                estimate: err,
            });
        }
        let (l, el) = self.recurse(a, m, left, depth + 1)?;
        let (r, er) = self.recurse(m, b, right, depth + 1)?;
        Ok((l + r, el + er))
    }
}

fn apply_rule<E, F>(
    rule: &GaussLegendre,
    f: &F,
    a: f64,
    b: f64,
    evals: &mut usize,
) -> Result<Mat, AdaptiveFailure<E>>
where
    F: Fn(f64) -> Result<Mat, E>,
{
    let mut acc: Option<Mat> = None;
    for (t, w) in rule.mapped(a, b) {
        let v = f(t).map_err(AdaptiveFailure::Integrand)? * C::new(w, 0.0);
        *evals += 1;
        acc = Some(match acc {
            Some(s) => s + v,
            None => v,
        });
    }
    Ok(acc.expect("rule has nodes"))
}

/// Composite Gauss–Legendre integral of f over [x0, x1] × [y0, y1] with
/// `panels` × `panels` cells. Rows of cells run in parallel; the partial sums
/// are combined in a fixed order so the result is reproducible bit for bit.
pub fn integrate_rectangle<E, F>(
    f: F,
    x: (f64, f64),
    y: (f64, f64),
    panels: usize,
    rule: &GaussLegendre,
) -> Result<C, E>
where
    E: Send,
    F: Fn(f64, f64) -> Result<C, E> + Sync,
{
    let hx = (x.1 - x.0) / panels as f64;
    let hy = (y.1 - y.0) / panels as f64;
    let rows: Vec<Result<C, E>> = (0..panels)
        .into_par_iter()
        .map(|j| {
            let (ya, yb) = (y.0 + j as f64 * hy, y.0 + (j + 1) as f64 * hy);
            let mut row = C::new(0.0, 0.0);
            for i in 0..panels {
                let (xa, xb) = (x.0 + i as f64 * hx, x.0 + (i + 1) as f64 * hx);
                for (py, wy) in rule.mapped(ya, yb) {
                    for (px, wx) in rule.mapped(xa, xb) {
                        row += f(px, py)? * (wx * wy);
                    }
                }
            }
            Ok(row)
        })
        .collect();
    let mut total = C::new(0.0, 0.0);
    for r in rows {
        total += r?;
    }
    Ok(total)
}

/// Successive values of a refined quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    /// (panels per side, value) in refinement order.
    pub levels: Vec<(usize, C)>,
}

impl Refinement {
    pub fn value(&self) -> C {
        self.levels.last().expect("at least one level").1
    }

    /// |I_last − I_prev| / |I_last|; infinite with fewer than two levels.
    pub fn relative_change(&self) -> f64 {
        match self.levels.as_slice() {
            [.., (_, a), (_, b)] => (b - a).norm() / b.norm().max(f64::MIN_POSITIVE),
            _ => f64::INFINITY,
        }
    }

    /// Richardson extrapolation of the last two levels for a rule whose error
    /// decays like h^order.
    pub fn extrapolated(&self, order: i32) -> C {
        match self.levels.as_slice() {
            [.., (n0, a), (n1, b)] => {
                let ratio = (*n1 as f64 / *n0 as f64).powi(order);
                b + (b - a) / (ratio - 1.0)
            }
            _ => self.value(),
        }
    }
}

/// Evaluates `compute(panels)` at `start`, 2·start, … for `levels` levels.
pub fn refine<E>(
    start: usize,
    levels: usize,
    mut compute: impl FnMut(usize) -> Result<C, E>,
) -> Result<Refinement, E> {
    let mut out = Vec::with_capacity(levels);
    let mut n = start;
    for _ in 0..levels {
        out.push((n, compute(n)?));
        n *= 2;
    }
    Ok(Refinement { levels: out })
}
