//! Compensated summation and the truncated-series driver shared by every
//! infinite sum in the crate.

use std::collections::VecDeque;

use crate::error::{QError, Result};
use crate::qcore::{EvalResult, Truncation};

/// Neumaier's variant of Kahan summation.
///
/// Unlike plain Kahan it stays accurate when an addend is larger in magnitude
/// than the running sum, which happens with the alternating kernels produced
/// by the generalized q-power.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Number of trailing terms in one envelope window.
pub(crate) const WINDOW: usize = 8;

/// Running sum that remembers the magnitudes of its last two windows of terms
/// so it can bound the unseen tail of a (roughly) geometric series.
#[derive(Debug, Clone)]
pub(crate) struct SeriesAccumulator {
    sum: CompensatedSum,
    recent: VecDeque<f64>,
    terms: usize,
}

impl SeriesAccumulator {
    pub fn new() -> Self {
        Self {
            sum: CompensatedSum::new(),
            recent: VecDeque::with_capacity(2 * WINDOW),
            terms: 0,
        }
    }

    pub fn push(&mut self, term: f64) {
        self.sum.add(term);
        if self.recent.len() == 2 * WINDOW {
            self.recent.pop_front();
        }
        self.recent.push_back(term.abs());
        self.terms += 1;
    }

    pub fn value(&self) -> f64 {
        self.sum.value()
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    fn envelope(&self) -> (f64, f64) {
        let n = self.recent.len();
        let split = n.saturating_sub(WINDOW);
        let prev = self.recent.iter().take(split).fold(0.0_f64, |m, &v| m.max(v));
        let cur = self.recent.iter().skip(split).fold(0.0_f64, |m, &v| m.max(v));
        (prev, cur)
    }

    /// Bound on the sum of all terms not yet pushed.
    ///
    /// The decay ratio is read off the two envelope windows and never taken
    /// below `min_ratio`, the nominal geometric factor of the grid. Returns
    /// `None` while the terms are not visibly decaying.
    pub fn tail(&self, min_ratio: f64) -> Option<f64> {
        if self.recent.len() < 2 * WINDOW {
            return None;
        }
        let (prev, cur) = self.envelope();
        if cur == 0.0 {
            return Some(0.0);
        }
        if prev == 0.0 {
            return None;
        }
        let observed = (cur / prev).powf(1.0 / WINDOW as f64);
        let ratio = observed.max(min_ratio);
        if ratio >= 1.0 {
            return None;
        }
        Some(cur * ratio / (1.0 - ratio))
    }

    /// Crude tail figure reported when the term cap is hit.
    pub fn fallback_tail(&self, min_ratio: f64) -> f64 {
        let (_, cur) = self.envelope();
        self.tail(min_ratio)
            .unwrap_or(cur / (1.0 - min_ratio.min(1.0 - f64::EPSILON)))
    }
}

/// Sums `term(0) + term(1) + ...` until the estimated tail meets the
/// truncation tolerance or the term cap is reached.
pub(crate) fn sum_series<F>(mut term: F, min_ratio: f64, trunc: &Truncation) -> Result<EvalResult>
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut acc = SeriesAccumulator::new();
    for i in 0..trunc.max_terms() {
        let t = term(i)?;
        if !t.is_finite() {
            return Err(QError::Domain(format!("series term {i} is not finite ({t})")));
        }
        acc.push(t);
        if let Some(tail) = acc.tail(min_ratio) {
            let value = acc.value();
            if tail <= trunc.threshold(value) {
                return Ok(EvalResult {
                    value,
                    terms_used: acc.terms(),
                    est_tail: tail,
                    converged: true,
                });
            }
        }
    }
    Ok(EvalResult {
        value: acc.value(),
        terms_used: acc.terms(),
        est_tail: acc.fallback_tail(min_ratio),
        converged: false,
    })
}
