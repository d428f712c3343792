//! Composite Gauss–Legendre integration with adaptive bisection.
//!
//! Every segment between two consecutive breakpoints is split into
//! `panel_count` panels, and each panel is bisected until the rule on the
//! panel and the rule on its two halves agree. Semi-infinite ranges are
//! walked in growing chunks until the chunk contributions decay
//! geometrically below the requested tail mass.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GL_ORDER: usize = 10;
const MAX_CHUNKS: usize = 200;
const CHUNK_GROWTH: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    /// Absolute bound on the neglected part of a semi-infinite integral;
    /// `rel_tolerance` relaxes it for large integrals.
    pub truncation_tail_mass: f64,
    /// Composite panels per segment between breakpoints.
    pub panel_count: usize,
    /// Maximum bisection depth of a single panel.
    pub refinement_limit: usize,
    pub abs_tolerance: f64,
    pub rel_tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            truncation_tail_mass: 1e-14,
            panel_count: 4,
            refinement_limit: 40,
            abs_tolerance: 1e-13,
            rel_tolerance: 1e-11,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.truncation_tail_mass > 0.0
            && self.truncation_tail_mass < 1.0
            && self.panel_count > 0
            && self.refinement_limit > 0
            && self.abs_tolerance > 0.0
            && self.rel_tolerance >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid quadrature spec {self:?}")))
        }
    }
}

/// A quadrature result with its accumulated error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

impl Integral {
    pub const ZERO: Integral = Integral { value: 0.0, error: 0.0 };

    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }
}

impl std::ops::Add for Integral {
    type Output = Integral;

    fn add(self, rhs: Integral) -> Integral {
        Integral {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

/// Neumaier compensated sum; keeps the accumulated result independent of
/// how many panels the adaptive pass happens to create.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

struct Rule {
    nodes: [f64; GL_ORDER],
    weights: [f64; GL_ORDER],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut nodes = [0.0; GL_ORDER];
        let mut weights = [0.0; GL_ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
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
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Rule { nodes, weights }
    })
}

/// Legendre polynomial P_n and its derivative at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn gauss_legendre(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in r.nodes.iter().zip(r.weights.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

struct Accumulator {
    value: CompensatedSum,
    error: f64,
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    coarse: f64,
    tol: f64,
    depth: usize,
    spec: &QuadratureSpec,
    acc: &mut Accumulator,
) -> Result<()> {
    let mid = 0.5 * (a + b);
    let left = gauss_legendre(f, a, mid);
    let right = gauss_legendre(f, mid, b);
    let fine = left + right;
    if !fine.is_finite() {
        return Err(Error::QuadratureBudgetExceeded {
            lower: a,
            upper: b,
            reason: "integrand is not finite".into(),
        });
    }
    let diff = (fine - coarse).abs();
    // 1e-15 relative slack absorbs rounding once the rule has converged.
    let floor = 1e-15 * (left.abs() + right.abs());
    if diff <= tol.max(spec.rel_tolerance * fine.abs()).max(floor) {
        acc.value.add(fine);
        acc.error += diff + floor;
        return Ok(());
    }
    if depth >= spec.refinement_limit || mid <= a || mid >= b {
        return Err(Error::QuadratureBudgetExceeded {
            lower: a,
            upper: b,
            reason: format!("refinement limit {} reached (estimate diff {diff:e})", spec.refinement_limit),
        });
    }
    adapt(f, a, mid, left, 0.5 * tol, depth + 1, spec, acc)?;
    adapt(f, mid, b, right, 0.5 * tol, depth + 1, spec, acc)
}

/// Sorted, deduplicated breakpoints strictly inside `(a, b)` plus both ends.
fn segment_edges(a: f64, b: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut edges = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > a && *p < b)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(b);
    edges
}

/// Integrates `f` over the finite interval `[a, b]`. The points in
/// `breakpoints` that fall inside the interval become panel edges.
pub fn integrate_finite(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::QuadratureBudgetExceeded {
            lower: a,
            upper: b,
            reason: "finite integration needs finite bounds".into(),
        });
    }
    if b <= a {
        return Ok(Integral::ZERO);
    }
    let total_width = b - a;
    let mut acc = Accumulator {
        value: CompensatedSum::default(),
        error: 0.0,
    };
    let edges = segment_edges(a, b, breakpoints);
    for seg in edges.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let width = (hi - lo) / spec.panel_count as f64;
        for k in 0..spec.panel_count {
            let pa = lo + width * k as f64;
            let pb = if k + 1 == spec.panel_count { hi } else { lo + width * (k + 1) as f64 };
            let coarse = gauss_legendre(f, pa, pb);
            let tol = spec.abs_tolerance * (pb - pa) / total_width;
            adapt(f, pa, pb, coarse, tol, 0, spec, &mut acc)?;
        }
    }
    Ok(Integral {
        value: acc.value.total(),
        error: acc.error,
    })
}

/// Integrates `f` over `[a, ∞)`, walking chunks that start at length
/// `chunk` and grow geometrically. Stops once the geometric extrapolation
/// of the remaining chunks falls below `spec.truncation_tail_mass` or
/// `spec.rel_tolerance` times the running total, whichever is larger.
pub fn integrate_semi_infinite(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    chunk: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral> {
    let mut total = CompensatedSum::default();
    let mut error = 0.0;
    let mut lo = a;
    let mut len = chunk;
    let mut prev: Option<f64> = None;
    for _ in 0..MAX_CHUNKS {
        let hi = lo + len;
        let piece = integrate_finite(f, lo, hi, breakpoints, spec)?;
        total.add(piece.value);
        error += piece.error;
        let current = piece.value.abs();
        if let Some(prev) = prev {
            if current == 0.0 && prev == 0.0 {
                return Ok(Integral {
                    value: total.total(),
                    error,
                });
            }
            let ratio = current / prev;
            if ratio < 1.0 {
                let tail = current * ratio / (1.0 - ratio);
                if tail <= spec.truncation_tail_mass.max(spec.rel_tolerance * total.total().abs()) {
                    return Ok(Integral {
                        value: total.total(),
                        error: error + tail,
                    });
                }
            }
        }
        prev = Some(current);
        lo = hi;
        len *= CHUNK_GROWTH;
    }
    Err(Error::QuadratureBudgetExceeded {
        lower: a,
        upper: f64::INFINITY,
        reason: format!("tail did not decay below {:e} within {MAX_CHUNKS} chunks", spec.truncation_tail_mass),
    })
}
