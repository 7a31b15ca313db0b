//! Adaptive composite Simpson quadrature.
//!
//! Integrands in this crate are piecewise smooth: CDFs of mixtures have
//! kinks at atoms and grid knots, pointwise scores have kinks at the
//! observation. Callers pass those locations as breakpoints so that every
//! panel handed to the adaptive rule is smooth.
//!
//! The absolute tolerance defaults to `1e-8` and can be overridden with the
//! `PROPERIZE_QUAD_TOL` environment variable (read once per process).

use std::sync::OnceLock;

use crate::error::Error;

pub const DEFAULT_ABS_TOL: f64 = 1e-8;
pub const MAX_PANELS: usize = 1 << 20;
pub const TOL_ENV_VAR: &str = "PROPERIZE_QUAD_TOL";

/// Every smooth piece is pre-split into this many panels before adapting,
/// so narrow features are not missed by the first five samples.
const INITIAL_SPLIT: usize = 8;

fn env_tolerance() -> f64 {
    static TOL: OnceLock<f64> = OnceLock::new();
    *TOL.get_or_init(|| {
        std::env::var(TOL_ENV_VAR)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|t| t.is_finite() && *t > 0.0)
            .unwrap_or(DEFAULT_ABS_TOL)
    })
}

/// Why an integral could not be evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadError {
    /// The integrand returned a non-finite value at `x`.
    NonFinite { x: f64, value: f64 },
    /// The panel budget ran out before the tolerance was met.
    Budget { tol: f64, panels: usize },
}

impl From<QuadError> for Error {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::NonFinite { .. } => Error::QuadratureFailure {
                tol: f64::NAN,
                panels: 0,
            },
            QuadError::Budget { tol, panels } => Error::QuadratureFailure { tol, panels },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: env_tolerance(),
            max_panels: MAX_PANELS,
        }
    }
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    tol: f64,
}

impl Quadrature {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            max_panels: MAX_PANELS,
        }
    }

    /// A copy with the tolerance scaled by `factor`, used for inner integrals
    /// of nested quadrature so their noise stays below the outer tolerance.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            max_panels: self.max_panels,
        }
    }

    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<f64, QuadError>
    where
        F: Fn(f64) -> f64,
    {
        self.integrate_with_breaks(f, a, b, &[])
    }

    /// Integrates `f` over `[a, b]`, splitting at every breakpoint strictly
    /// inside the interval. The tolerance budget is shared between pieces in
    /// proportion to their length.
    pub fn integrate_with_breaks<F>(
        &self,
        f: F,
        a: f64,
        b: f64,
        breaks: &[f64],
    ) -> Result<f64, QuadError>
    where
        F: Fn(f64) -> f64,
    {
        if !(b > a) {
            return Ok(0.0);
        }
        let mut knots: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
        knots.push(a);
        knots.extend(breaks.iter().copied().filter(|x| x.is_finite() && *x > a && *x < b));
        knots.push(b);
        knots.sort_by(f64::total_cmp);
        knots.dedup();

        let total = b - a;
        // Many breakpoints already make the pieces short.
        let split = if knots.len() > 32 { 2 } else { INITIAL_SPLIT };
        let mut panels = 0usize;
        let mut sum = 0.0;
        let mut comp = 0.0;
        for w in knots.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let tol = self.abs_tol * (hi - lo) / total;
            let piece = self.adapt(&f, lo, hi, tol, split, &mut panels)?;
            // Kahan summation; thousands of pieces are common on grid CDFs.
            let y = piece - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        Ok(sum)
    }

    fn adapt<F>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
        split: usize,
        panels: &mut usize,
    ) -> Result<f64, QuadError>
    where
        F: Fn(f64) -> f64,
    {
        let eval = |x: f64| -> Result<f64, QuadError> {
            let v = f(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(QuadError::NonFinite { x, value: v })
            }
        };

        let mut stack: Vec<Panel> = Vec::with_capacity(64);
        let h = (b - a) / split as f64;
        let mut x0 = a;
        let mut f0 = eval(a)?;
        for i in 0..split {
            let x1 = if i + 1 == split { b } else { a + h * (i + 1) as f64 };
            let f1 = eval(x1)?;
            let m = 0.5 * (x0 + x1);
            let fm = eval(m)?;
            stack.push(Panel {
                a: x0,
                fa: f0,
                m,
                fm,
                b: x1,
                fb: f1,
                whole: (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1),
                tol: tol / split as f64,
            });
            x0 = x1;
            f0 = f1;
        }
        *panels += split;

        let mut acc = 0.0;
        while let Some(p) = stack.pop() {
            let lm = 0.5 * (p.a + p.m);
            let rm = 0.5 * (p.m + p.b);
            let flm = eval(lm)?;
            let frm = eval(rm)?;
            let left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
            let right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
            let delta = left + right - p.whole;
            let tiny = (p.b - p.a) <= 1e-13 * (1.0 + p.a.abs().max(p.b.abs()));
            if delta.abs() <= 15.0 * p.tol || tiny {
                acc += left + right + delta / 15.0;
                continue;
            }
            *panels += 1;
            if *panels > self.max_panels {
                return Err(QuadError::Budget {
                    tol: self.abs_tol,
                    panels: *panels,
                });
            }
            let half = 0.5 * p.tol;
            stack.push(Panel {
                a: p.a,
                fa: p.fa,
                m: lm,
                fm: flm,
                b: p.m,
                fb: p.fm,
                whole: left,
                tol: half,
            });
            stack.push(Panel {
                a: p.m,
                fa: p.fm,
                m: rm,
                fm: frm,
                b: p.b,
                fb: p.fb,
                whole: right,
                tol: half,
            });
        }
        Ok(acc)
    }
}
