//! Quadrature of complex integrands over the whole real line.
//!
//! The line is split into an inner window `[-V, V]`, integrated with composite
//! Gauss-Legendre panels fine enough to resolve both the integrand's
//! Lorentzian features and its oscillation period, and two tails. In the tails
//! the integrand is supplied as analytic pieces multiplying `1`, `e^{ivt}` or
//! `e^{-ivt}`. Oscillating pieces are rotated onto vertical rays `+-V +- is`
//! where they decay exponentially; the rest is integrated on dyadic panels.
//! The caller guarantees that no pole lies beyond the window in the half
//! plane each piece is rotated into.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// The three analytic pieces of an integrand at a (complex) point `v`:
/// coefficients of `1`, `e^{ivt}` and `e^{-ivt}`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TailPieces {
    pub plain: Complex64,
    pub pos: Complex64,
    pub neg: Complex64,
}

pub trait LineIntegrand {
    /// Value on the real axis.
    fn eval(&self, v: f64) -> Complex64;
    /// Analytic pieces, valid for complex `v` outside the inner window.
    fn pieces(&self, v: Complex64) -> TailPieces;
}

/// Resolution of the composite rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineRule {
    /// Oscillation frequency `t` of the tail pieces.
    pub t: f64,
    /// Half-width `V` of the inner window.
    pub half_width: f64,
    /// Maximum inner panel width.
    pub panel: f64,
    /// Gauss-Legendre nodes per panel.
    pub nodes: usize,
}

/// Number of dyadic panels in each non-oscillatory tail before the final
/// `v = V/y` map to infinity.
const DYADIC_PANELS: usize = 40;
/// Exponential decay `e^{-s t}` is integrated out to `s t = 40`.
const RAY_DECAY: f64 = 40.0;
const RAY_PANELS: usize = 8;

struct Rule {
    pairs: Vec<(f64, f64)>,
}

impl Rule {
    fn new(n: usize) -> Self {
        let n = NonZeroUsize::new(n.max(2)).expect("non-zero");
        let gl = GaussLegendre::new(n);
        Self {
            pairs: gl.as_node_weight_pairs().to_vec(),
        }
    }

    /// `int_a^b f`, `f` sampled at the mapped nodes.
    fn panel(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> Complex64) -> Complex64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut s = Complex64::new(0.0, 0.0);
        for &(x, w) in &self.pairs {
            s += w * f(mid + half * x);
        }
        s * half
    }
}

/// Integral of `f` over the real line with the given resolution.
pub fn integrate_line<F: LineIntegrand + ?Sized>(f: &F, rule: &LineRule) -> Complex64 {
    let gl = Rule::new(rule.nodes);
    let v1 = rule.half_width;
    let t = rule.t;

    let n_panels = ((2.0 * v1 / rule.panel).ceil() as usize).max(1);
    let h = 2.0 * v1 / n_panels as f64;
    let mut inner = Complex64::new(0.0, 0.0);
    for k in 0..n_panels {
        let a = -v1 + k as f64 * h;
        inner += gl.panel(a, a + h, |v| f.eval(v));
    }

    let mut tails = Complex64::new(0.0, 0.0);
    for sign in [1.0, -1.0] {
        // Dyadic panels [2^k V, 2^{k+1} V] then v = 2^K V / y on (0, 1].
        let mut lo = v1;
        for _ in 0..DYADIC_PANELS {
            tails += gl.panel(lo, 2.0 * lo, |v| f.pieces(Complex64::new(sign * v, 0.0)).plain);
            lo *= 2.0;
        }
        tails += gl.panel(0.0, 1.0, |y| {
            if y == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let v = lo / y;
            f.pieces(Complex64::new(sign * v, 0.0)).plain * (lo / (y * y))
        });

        if t > 0.0 {
            let s_max = RAY_DECAY / t;
            let ds = s_max / RAY_PANELS as f64;
            let start = Complex64::new(sign * v1, 0.0);
            // Right tail: +int_0^inf g(V + i s) i ds upward for e^{ivt},
            // downward with -i for e^{-ivt}; the left tail flips both.
            for k in 0..RAY_PANELS {
                let a = k as f64 * ds;
                let up = gl.panel(a, a + ds, |s| {
                    let z = start + Complex64::new(0.0, s);
                    f.pieces(z).pos * (Complex64::i() * z * t).exp()
                });
                let down = gl.panel(a, a + ds, |s| {
                    let z = start - Complex64::new(0.0, s);
                    f.pieces(z).neg * (-Complex64::i() * z * t).exp()
                });
                tails += sign * Complex64::i() * (up - down);
            }
        }
    }
    inner + tails
}

/// Relative change tolerated under node doubling.
pub const DOUBLING_TOLERANCE: f64 = 1e-3;

/// Evaluates `eval(nodes)` and `eval(2 nodes)`; fails unless they agree to
/// [`DOUBLING_TOLERANCE`]. Returns the refined value and the achieved change.
pub fn with_doubling_gate(
    nodes: usize,
    mut eval: impl FnMut(usize) -> f64,
) -> Result<(f64, f64)> {
    let coarse = eval(nodes);
    let fine = eval(2 * nodes);
    let change = if fine == coarse {
        0.0
    } else {
        (fine - coarse).abs() / fine.abs().max(coarse.abs())
    };
    if change.is_nan() || change >= DOUBLING_TOLERANCE {
        return Err(Error::NonConvergence {
            achieved: change,
            target: DOUBLING_TOLERANCE,
        });
    }
    Ok((fine, change))
}
