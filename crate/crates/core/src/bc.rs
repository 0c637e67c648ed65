//! The tighter mean-energy bound from trigonometric inequalities
//! `cos x >= c - b x + a sin x` (x >= 0).
//!
//! Any globally valid triple gives, for a spectrum with minimal energy 0,
//! `mean * tau >= (c - sqrt(1 + a^2) cos(theta)) / b`. The bound is the maximum
//! of that expression over valid triples. Triples are parametrized by the
//! point `x*` where the deficit
//!
//! ```text
//! f(x) = cos x + b x - c - a sin x
//! ```
//!
//! touches zero and by `a`; the tangency conditions `f(x*) = f'(x*) = 0` then fix
//! `b = sin x* + a cos x*` and `c = cos x* + b x* - a sin x*`.
//!
//! Two independent certificates of `f >= 0` exist: [`certify`] scans a grid with
//! Lipschitz and curvature bounds, [`analytic_margin`] evaluates `f` at its
//! closed-form critical points. The optimizer uses the latter in its inner loop
//! and re-checks the returned witness with the former.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{QslError, Result};
use crate::state::Angle;

/// Default certification tolerance on the minimum of `f`.
pub const CERTIFY_TOLERANCE: f64 = 1e-9;

/// Margin accepted by the closed-form certificate inside the optimizer.
const ANALYTIC_TOLERANCE: f64 = 1e-12;

/// Coefficients of `1.57 - 1.847 u + 0.372 u^2 - 0.0958 u^3`, `u = cos(theta)`.
pub const POLY_COEFFICIENTS: [f64; 4] = [1.57, -1.847, 0.372, -0.0958];

/// A triple `(a, b, c)` of the inequality `cos x >= c - b x + a sin x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTriple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub tangency_point: Option<f64>,
    pub certified: bool,
    /// Minimum of `f` over `x >= 0`, once certified.
    pub min_margin: Option<f64>,
}

impl TrigTriple {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(b > 0.0) || !a.is_finite() || !c.is_finite() || !b.is_finite() {
            return Err(QslError::InvalidArgument(format!(
                "triple needs finite a, c and b > 0, got ({a}, {b}, {c})"
            )));
        }
        Ok(Self {
            a,
            b,
            c,
            tangency_point: None,
            certified: false,
            min_margin: None,
        })
    }

    /// The Margolus-Levitin triple `cos x >= 1 - (2/pi)(x + sin x)`.
    pub fn margolus_levitin() -> Self {
        Self {
            a: -2.0 / PI,
            b: 2.0 / PI,
            c: 1.0,
            tangency_point: Some(PI),
            certified: false,
            min_margin: None,
        }
    }

    /// Deficit `f(x) = cos x + b x - c - a sin x`.
    pub fn margin(&self, x: f64) -> f64 {
        x.cos() + self.b * x - self.c - self.a * x.sin()
    }

    /// `sqrt(1 + a^2)`, the amplitude of `cos x - a sin x`.
    pub fn amplitude(&self) -> f64 {
        self.a.hypot(1.0)
    }

    /// Unclamped lower limit on `mean * tau` at `cos(theta) = cos_theta`.
    pub fn raw_bound(&self, cos_theta: f64) -> f64 {
        (self.c - self.amplitude() * cos_theta) / self.b
    }
}

/// Builds the triple touching zero at `x_star` (not yet certified).
pub fn triple_from_tangency(x_star: f64, a: f64) -> Result<TrigTriple> {
    if !(x_star > 0.0 && x_star.is_finite()) {
        return Err(QslError::InvalidArgument(format!(
            "tangency point must be positive, got {x_star}"
        )));
    }
    let (sin, cos) = x_star.sin_cos();
    let b = sin + a * cos;
    if !(b > 0.0) {
        return Err(QslError::NonPositiveSlope { x_star, a, b });
    }
    let c = cos + b * x_star - a * sin;
    Ok(TrigTriple {
        a,
        b,
        c,
        tangency_point: Some(x_star),
        certified: false,
        min_margin: None,
    })
}

/// Minimum of `f` over `x >= 0` and where it is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginMinimum {
    pub value: f64,
    pub at: f64,
}

/// Closed-form minimum of `f` on `[0, inf)`.
///
/// With `cos x - a sin x = R cos(x + alpha)`, `R = sqrt(1 + a^2)`,
/// `alpha = atan(a)`, the local minima of `f` sit at
/// `x + alpha = pi - asin(b / R) + 2 pi k` (only if `b < R`) and grow by
/// `2 pi b` per period, so the first one and `x = 0` are the only candidates.
pub fn analytic_margin(triple: &TrigTriple) -> MarginMinimum {
    let at_zero = MarginMinimum {
        value: 1.0 - triple.c,
        at: 0.0,
    };
    let r = triple.amplitude();
    if triple.b >= r {
        return at_zero;
    }
    let alpha = triple.a.atan();
    let mut x = PI - (triple.b / r).asin() - alpha;
    while x < 0.0 {
        x += TAU;
    }
    let value = triple.margin(x);
    if value < at_zero.value {
        MarginMinimum { value, at: x }
    } else {
        at_zero
    }
}

/// Grid certification of `f >= -tolerance` on `[0, inf)`.
///
/// Beyond `X_cut = (c + R) / b` the linear term dominates and `f >= 0`. On
/// `[0, X_cut]` intervals are subdivided until either the Lipschitz bound
/// (`L = 1 + b + |a|`) or the curvature bound (`|f''| <= R`) proves them
/// above `-tolerance`, down to a width of `tolerance / (2 L)`. The smallest
/// sample is then polished by golden-section search.
pub fn certify(triple: &TrigTriple, tolerance: f64) -> TrigTriple {
    let tolerance = if tolerance > 0.0 {
        tolerance
    } else {
        CERTIFY_TOLERANCE
    };
    let mut out = *triple;
    if !(triple.b > 0.0) {
        out.certified = false;
        out.min_margin = None;
        return out;
    }
    let lipschitz = 1.0 + triple.b + triple.a.abs();
    let curvature = triple.amplitude();
    let x_cut = ((triple.c + curvature) / triple.b).max(0.0);
    let min_width = tolerance / (2.0 * lipschitz);

    let f0 = triple.margin(0.0);
    let mut best = MarginMinimum { value: f0, at: 0.0 };
    let mut best_width = 0.0;

    if x_cut > 0.0 {
        let cells = (x_cut / 0.05).ceil().max(1.0) as usize;
        let h0 = x_cut / cells as f64;
        let mut stack: Vec<(f64, f64, f64, f64)> = Vec::new();
        let mut xa = 0.0;
        let mut fa = f0;
        for i in 1..=cells {
            let xb = if i == cells { x_cut } else { i as f64 * h0 };
            let fb = triple.margin(xb);
            stack.push((xa, xb, fa, fb));
            xa = xb;
            fa = fb;
        }
        while let Some((xa, xb, fa, fb)) = stack.pop() {
            let w = xb - xa;
            for (x, f) in [(xa, fa), (xb, fb)] {
                if f < best.value {
                    best = MarginMinimum { value: f, at: x };
                    best_width = w;
                }
            }
            let lower =
                lipschitz_lower(fa, fb, w, lipschitz).max(curvature_lower(fa, fb, w, curvature));
            // Past certification, only intervals that could still lower the
            // minimum by more than the tolerance are worth refining.
            if lower >= best.value.min(0.0) - tolerance || w <= min_width {
                continue;
            }
            let xm = 0.5 * (xa + xb);
            let fm = triple.margin(xm);
            stack.push((xm, xb, fm, fb));
            stack.push((xa, xm, fa, fm));
        }
        let reach = best_width.max(h0);
        let polished = golden_min(
            |x| triple.margin(x),
            (best.at - reach).max(0.0),
            (best.at + reach).min(x_cut),
            1e-13,
        );
        if polished.value < best.value {
            best = polished;
        }
    }

    out.min_margin = Some(best.value);
    out.certified = best.value >= -tolerance;
    out
}

fn lipschitz_lower(fa: f64, fb: f64, w: f64, lipschitz: f64) -> f64 {
    0.5 * (fa + fb - lipschitz * w)
}

/// Minimum over the interval of `linear interpolant - (M/2)(x - xa)(xb - x)`.
fn curvature_lower(fa: f64, fb: f64, w: f64, curvature: f64) -> f64 {
    let half_m = 0.5 * curvature;
    let linear = (fb - fa) / w - half_m * w;
    let s = (-linear / (2.0 * half_m)).clamp(0.0, w);
    fa + s * linear + half_m * s * s
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> MarginMinimum {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let candidates = [(lo, f(lo)), (hi, f(hi)), (x1, f1), (x2, f2)];
    let (at, value) =
        candidates.into_iter().fold(
            (lo, f64::INFINITY),
            |acc, (x, v)| if v < acc.1 { (x, v) } else { acc },
        );
    MarginMinimum { value, at }
}

/// Golden-section maximization; `f` may return `-inf` for infeasible points.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// The bound at one angle together with the triple that attains it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcResult {
    pub theta: f64,
    /// Lower limit on `(mean - e_min) tau / hbar`.
    pub value: f64,
    pub witness: TrigTriple,
}

/// Search box and resolution for the maximization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcSearch {
    /// Tangency points are searched in `(0, x_star_max]`.
    pub x_star_max: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub grid_x: usize,
    pub grid_a: usize,
    pub value_tolerance: f64,
}

impl Default for BcSearch {
    fn default() -> Self {
        Self {
            x_star_max: TAU,
            a_min: -3.0,
            a_max: 3.0,
            grid_x: 64,
            grid_a: 64,
            value_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    x_star: f64,
    a: f64,
    triple: TrigTriple,
}

/// Maximizer over certified tangency triples. The coarse grid does not depend
/// on the angle, so it is certified once and reused.
#[derive(Debug, Clone)]
pub struct BcOptimizer {
    search: BcSearch,
    coarse: Vec<Candidate>,
}

impl Default for BcOptimizer {
    fn default() -> Self {
        Self::new(BcSearch::default()).expect("default search box contains valid triples")
    }
}

impl BcOptimizer {
    pub fn new(search: BcSearch) -> Result<Self> {
        if search.grid_x < 2
            || search.grid_a < 2
            || !(search.x_star_max > 0.0)
            || !(search.a_max > search.a_min)
            || !(search.value_tolerance > 0.0)
        {
            return Err(QslError::InvalidArgument(format!(
                "invalid BC search configuration {search:?}"
            )));
        }
        let mut coarse = Vec::with_capacity(search.grid_x * search.grid_a);
        for i in 0..search.grid_x {
            let x_star = search.x_star_max * (i + 1) as f64 / search.grid_x as f64;
            for j in 0..search.grid_a {
                let a = search.a_min
                    + (search.a_max - search.a_min) * j as f64 / (search.grid_a - 1) as f64;
                if let Some(triple) = feasible(x_star, a) {
                    coarse.push(Candidate { x_star, a, triple });
                }
            }
        }
        if coarse.is_empty() {
            return Err(QslError::InvalidArgument(
                "BC search box contains no certified triple".into(),
            ));
        }
        Ok(Self { search, coarse })
    }

    pub fn search(&self) -> &BcSearch {
        &self.search
    }

    /// Number of certified points on the coarse grid.
    pub fn coarse_feasible(&self) -> usize {
        self.coarse.len()
    }

    /// Best triple and its unclamped objective at `cos_theta`.
    fn optimize(&self, cos_theta: f64) -> Candidate {
        // Row-major order over (x*, a) and strict comparison give the
        // lexicographic tie-break.
        let mut best = self.coarse[0];
        let mut best_value = best.triple.raw_bound(cos_theta);
        for cand in &self.coarse[1..] {
            let v = cand.triple.raw_bound(cos_theta);
            if v > best_value {
                best = *cand;
                best_value = v;
            }
        }

        // Re-centre the window while the refined point lands on its edge.
        for _ in 0..4 {
            let (refined, value, on_edge) = self.refine(best, cos_theta);
            if value <= best_value {
                break;
            }
            best = refined;
            best_value = value;
            if !on_edge {
                break;
            }
        }
        best
    }

    /// Local search around `seed`; also reports whether the result lies on
    /// the boundary of the x* window.
    fn refine(&self, seed: Candidate, cos_theta: f64) -> (Candidate, f64, bool) {
        let s = &self.search;
        let dx = s.x_star_max / s.grid_x as f64;
        let da = (s.a_max - s.a_min) / (s.grid_a - 1) as f64;
        let x_lo = (seed.x_star - 3.0 * dx).max(dx * 1e-3);
        let x_hi = (seed.x_star + 3.0 * dx).min(s.x_star_max);
        let a_window = 6.0 * da;

        let inner = |x_star: f64| -> Option<(f64, f64)> {
            self.best_a(x_star, seed.a - a_window, seed.a + a_window, cos_theta)
        };
        let outer = |x: f64| inner(x).map_or(f64::NEG_INFINITY, |(_, v)| v);
        // Bracket by sampling, then golden search.
        const X_SAMPLES: usize = 24;
        let x_step = (x_hi - x_lo) / X_SAMPLES as f64;
        let mut j_best = 0;
        let mut v_best = f64::NEG_INFINITY;
        for j in 0..=X_SAMPLES {
            let v = outer(x_lo + x_step * j as f64);
            if v > v_best {
                v_best = v;
                j_best = j;
            }
        }
        let x_tol = (s.value_tolerance * 1e-3).min(1e-9);
        let bracket_lo = x_lo + x_step * j_best.saturating_sub(1) as f64;
        let bracket_hi = (x_lo + x_step * (j_best + 1) as f64).min(x_hi);
        let (mut x_opt, v_opt) = golden_max(outer, bracket_lo, bracket_hi, x_tol);
        if v_opt < v_best {
            x_opt = x_lo + x_step * j_best as f64;
        }
        let on_edge =
            (j_best == 0 && x_lo > dx * 1e-3) || (j_best == X_SAMPLES && x_hi < s.x_star_max);
        let seed_value = seed.triple.raw_bound(cos_theta);
        if let Some((a_opt, v)) = inner(x_opt) {
            if v > seed_value {
                if let Some(triple) = feasible(x_opt, a_opt) {
                    let refined = Candidate {
                        x_star: x_opt,
                        a: a_opt,
                        triple,
                    };
                    return (refined, v, on_edge);
                }
            }
        }
        (seed, seed_value, false)
    }

    /// Best feasible `a` for a fixed tangency point within `[a_lo, a_hi]`.
    ///
    /// The maximum typically sits on the edge of the feasible set, which is
    /// located by bisection next to the best sample.
    fn best_a(&self, x_star: f64, a_lo: f64, a_hi: f64, cos_theta: f64) -> Option<(f64, f64)> {
        let a_lo = a_lo.max(self.search.a_min);
        let a_hi = a_hi.min(self.search.a_max);
        let objective =
            |a: f64| feasible(x_star, a).map_or(f64::NEG_INFINITY, |t| t.raw_bound(cos_theta));
        const SAMPLES: usize = 24;
        let step = (a_hi - a_lo) / SAMPLES as f64;
        let at = |k: usize| a_lo + step * k as f64;
        let values: Vec<f64> = (0..=SAMPLES).map(|k| objective(at(k))).collect();
        let mut k_best = None;
        let mut v_best = f64::NEG_INFINITY;
        for (k, &v) in values.iter().enumerate() {
            if v > v_best {
                v_best = v;
                k_best = Some(k);
            }
        }
        let k = k_best?;
        let mut best = (at(k), v_best);
        let mut consider = |a: f64| {
            let v = objective(a);
            if v > best.1 {
                best = (a, v);
            }
        };
        for neighbour in [k.checked_sub(1), Some(k + 1).filter(|&n| n <= SAMPLES)] {
            let Some(n) = neighbour else { continue };
            if values[n] == f64::NEG_INFINITY {
                consider(feasibility_edge(
                    |a| feasible(x_star, a).is_some(),
                    at(k),
                    at(n),
                ));
            }
        }
        let lo = at(k.saturating_sub(1));
        let hi = at((k + 1).min(SAMPLES));
        let (a, _) = golden_max(objective, lo, hi, 1e-13);
        consider(a);
        Some(best)
    }

    /// Dimensionless bound at `theta` with the witness re-certified on a grid.
    pub fn bound(&self, theta: f64) -> Result<BcResult> {
        let theta = Angle::new(theta)?.radians();
        let cos_theta = theta.cos();
        let mut best = self.optimize(cos_theta);
        let mut witness = certify(&best.triple, CERTIFY_TOLERANCE);
        if !witness.certified {
            // The closed-form certificate accepted a triple the grid rejects:
            // fall back to the best grid-certified coarse point.
            best = self
                .coarse
                .iter()
                .copied()
                .filter(|c| certify(&c.triple, CERTIFY_TOLERANCE).certified)
                .max_by(|p, q| {
                    p.triple
                        .raw_bound(cos_theta)
                        .total_cmp(&q.triple.raw_bound(cos_theta))
                })
                .ok_or_else(|| QslError::InvalidArgument("no grid-certified triple".into()))?;
            witness = certify(&best.triple, CERTIFY_TOLERANCE);
        }
        Ok(BcResult {
            theta,
            value: clamp_value(witness.raw_bound(cos_theta)),
            witness,
        })
    }

    /// Same value as [`BcOptimizer::bound`] without the grid re-certification.
    pub fn value(&self, theta: f64) -> Result<f64> {
        let theta = Angle::new(theta)?.radians();
        let cos_theta = theta.cos();
        Ok(clamp_value(
            self.optimize(cos_theta).triple.raw_bound(cos_theta),
        ))
    }
}

fn clamp_value(raw: f64) -> f64 {
    if raw > 0.0 {
        raw
    } else {
        0.0
    }
}

/// Last feasible point on the segment from `inside` towards `outside`.
fn feasibility_edge(is_feasible: impl Fn(f64) -> bool, mut inside: f64, mut outside: f64) -> f64 {
    for _ in 0..64 {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if is_feasible(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// Tangency triple at `(x_star, a)` if it passes the closed-form certificate.
fn feasible(x_star: f64, a: f64) -> Option<TrigTriple> {
    let mut triple = triple_from_tangency(x_star, a).ok()?;
    let min = analytic_margin(&triple);
    if min.value >= -ANALYTIC_TOLERANCE {
        // Lowering c by a rounding-level deficit makes the triple exactly valid.
        if min.value < 0.0 {
            triple.c += min.value;
        }
        triple.certified = true;
        triple.min_margin = Some(min.value.max(0.0));
        Some(triple)
    } else {
        None
    }
}

/// Shared optimizer with the default search box.
pub fn default_optimizer() -> &'static BcOptimizer {
    static OPTIMIZER: OnceLock<BcOptimizer> = OnceLock::new();
    OPTIMIZER.get_or_init(BcOptimizer::default)
}

/// Dimensionless bound on `(mean - e_min) tau / hbar` at angle `theta`.
pub fn bc_bound(theta: f64) -> Result<BcResult> {
    default_optimizer().bound(theta)
}

/// Cubic fit of the bound in `u = cos(theta)`, clamped at 0.
pub fn bc_poly(cos_theta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&cos_theta) {
        return Err(QslError::OutOfRange {
            what: "cos_theta",
            range: "[0, 1]",
            value: cos_theta,
        });
    }
    let [c0, c1, c2, c3] = POLY_COEFFICIENTS;
    let u = cos_theta;
    Ok(clamp_value(c0 + u * (c1 + u * (c2 + u * c3))))
}
