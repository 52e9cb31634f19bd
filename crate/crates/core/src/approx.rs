//! Lower bounds for the matching distance by evaluating `F` on a grid of
//! slices.
//!
//! Slopes follow angles `θ_k = k/(N+1) · π/2`, `k = 1..N`, rounded to dyadic
//! rationals for `θ < π/4` and mirrored through `s ↦ 1/s` above it, so the
//! grid is symmetric and `s = 1` is a node when `N` is odd. Offsets are the
//! interior nodes of an evenly divided interval. Going from `(N, M)` to
//! `(2N+1, 2M+1)` keeps every old node.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{int, ExtendedRational, Rational};
use crate::presentation::{Grade, GradedPresentation};
use crate::slice::{Slice, SliceEvaluator};

const DYADIC_BITS: u32 = 40;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    pub slope_samples: usize,
    pub offset_samples: usize,
    /// Fixed offset interval; derived from the grades per slope when `None`.
    pub offset_range: Option<(Rational, Rational)>,
}

impl GridSpec {
    pub fn new(slope_samples: usize, offset_samples: usize) -> Self {
        GridSpec {
            slope_samples,
            offset_samples,
            offset_range: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.slope_samples == 0 || self.offset_samples == 0 {
            return Err(Error::InvalidGrid("grid dimensions must be at least 1".into()));
        }
        if let Some((lo, hi)) = &self.offset_range {
            if lo >= hi {
                return Err(Error::InvalidGrid(format!("empty offset range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxResult {
    pub lower_bound: ExtendedRational,
    pub best_slice: Slice,
}

fn dyadic_tan(num: u64, den: u64) -> Rational {
    let theta = num as f64 / den as f64 * std::f64::consts::FRAC_PI_2;
    let scale = 2f64.powi(DYADIC_BITS as i32);
    let n = ((theta.tan() * scale).round() as i64).max(1);
    Rational::new(BigInt::from(n), BigInt::one() << DYADIC_BITS)
}

/// Slope of node `k` out of `n` interior angles.
pub fn slope_node(k: usize, n: usize) -> Rational {
    let (k, d) = (k as u64, n as u64 + 1);
    let g = k.gcd(&d);
    let (k, d) = (k / g, d / g);
    match (2 * k).cmp(&d) {
        std::cmp::Ordering::Less => dyadic_tan(k, d),
        std::cmp::Ordering::Equal => Rational::one(),
        std::cmp::Ordering::Greater => dyadic_tan(d - k, d).recip(),
    }
}

pub fn slope_grid(n: usize) -> Vec<Rational> {
    (1..=n).map(|k| slope_node(k, n)).collect()
}

/// `[min, max]` of `y − s·x` over all grades, widened by half its length on
/// each side (by 1 when degenerate).
pub fn auto_offset_range(grades: &[&Grade], s: &Rational) -> (Rational, Rational) {
    let mut values = grades.iter().map(|g| &g.y - s * &g.x);
    let Some(first) = values.next() else {
        return (int(-1), int(1));
    };
    let (lo, hi) = values.fold((first.clone(), first), |(lo, hi), v| (lo.min(v.clone()), hi.max(v)));
    let pad = if lo == hi {
        Rational::one()
    } else {
        (&hi - &lo) / int(2)
    };
    (&lo - &pad, hi + pad)
}

/// Interior nodes `a + j·(b − a)/(m + 1)`, `j = 1..m`.
pub fn offset_nodes(range: &(Rational, Rational), m: usize) -> Vec<Rational> {
    let step = (&range.1 - &range.0) / Rational::from_integer(BigInt::from(m + 1));
    (1..=m)
        .map(|j| &range.0 + &step * Rational::from_integer(BigInt::from(j)))
        .collect()
}

/// All grid slices in slope-major order.
pub fn grid_slices(pm: &GradedPresentation, pn: &GradedPresentation, grid: &GridSpec) -> Result<Vec<Slice>> {
    grid.validate()?;
    let grades: Vec<&Grade> = [pm, pn]
        .into_iter()
        .flat_map(|p| p.row_grades().iter().chain(p.col_grades()))
        .collect();
    let mut out = Vec::with_capacity(grid.slope_samples * grid.offset_samples);
    for s in slope_grid(grid.slope_samples) {
        let range = grid
            .offset_range
            .clone()
            .unwrap_or_else(|| auto_offset_range(&grades, &s));
        for t in offset_nodes(&range, grid.offset_samples) {
            out.push(Slice::new(s.clone(), t)?);
        }
    }
    Ok(out)
}

/// `F` at every grid slice, in grid order.
pub fn evaluate_grid(
    pm: &GradedPresentation,
    pn: &GradedPresentation,
    grid: &GridSpec,
) -> Result<Vec<(Slice, ExtendedRational)>> {
    let slices = grid_slices(pm, pn, grid)?;
    let evaluator = SliceEvaluator::new(pm, pn);
    Ok(slices
        .into_par_iter()
        .map(|ell| {
            let value = evaluator.eval(ell.s(), ell.t());
            (ell, value)
        })
        .collect())
}

/// The largest grid value of `F`; ties go to the first slice in grid order.
pub fn matching_distance_approx(
    pm: &GradedPresentation,
    pn: &GradedPresentation,
    grid: &GridSpec,
) -> Result<ApproxResult> {
    let mut best: Option<(Slice, ExtendedRational)> = None;
    for (ell, value) in evaluate_grid(pm, pn, grid)? {
        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((ell, value));
        }
    }
    let (best_slice, lower_bound) = best.expect("validated grid is nonempty");
    Ok(ApproxResult {
        lower_bound,
        best_slice,
    })
}

/// Same as [`matching_distance_approx`] on a thread pool of the given size.
pub fn matching_distance_approx_threads(
    pm: &GradedPresentation,
    pn: &GradedPresentation,
    grid: &GridSpec,
    threads: Option<usize>,
) -> Result<ApproxResult> {
    match threads.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(|| matching_distance_approx(pm, pn, grid)),
        None => matching_distance_approx(pm, pn, grid),
    }
}
