//! Exact matching distance: the supremum of `F` over all slices.
//!
//! `F` is evaluated at every vertex of the arrangement. Unbounded faces are
//! handled on two probe lines left and right of all vertices: each bounded
//! interval there is sampled at its midpoint, and faces whose realizing pair
//! straddles the slice contribute their limit values at `s → 0` or `s → ∞`.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arrangement::{
    generate_lines_for, probe, probes_from_range, scan_distinct_vertices, DualLine, LineFamily, VertexCoords,
};
use crate::error::{Error, Result};
use crate::numeric::{int, ratio, Extended, ExtendedRational, Rational};
use crate::presentation::{rational_text, Grade, GradedPresentation};
use crate::slice::{eval_f, DeltaDescriptor, DeltaType, Realizer, Slice, SliceEvaluator};

/// Where the reported value is attained or approached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Witness {
    /// `F(s, t)` equals the value.
    Vertex {
        #[serde(with = "rational_text")]
        s: Rational,
        #[serde(with = "rational_text")]
        t: Rational,
    },
    /// Limit along a face boundary line meeting `s = 0` at `t0`.
    LimitLeft {
        #[serde(with = "rational_text")]
        t0: Rational,
        descriptor: DeltaDescriptor,
        #[serde(rename = "type")]
        delta_type: DeltaType,
    },
    /// Limit along a face boundary line of the given slope as `s → ∞`.
    LimitRight {
        #[serde(with = "rational_text")]
        slope: Rational,
        descriptor: DeltaDescriptor,
        #[serde(rename = "type")]
        delta_type: DeltaType,
    },
    /// A slice whose two diagrams have different numbers of essential bars.
    InfiniteBars {
        #[serde(with = "rational_text")]
        s: Rational,
        #[serde(with = "rational_text")]
        t: Rational,
    },
    Zero,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExactStats {
    pub lines: usize,
    pub emitted_lines: usize,
    pub vertices: usize,
    pub probe_intervals: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    pub value: ExtendedRational,
    pub witness: Witness,
    pub stats: ExactStats,
}

#[derive(Debug, Clone, Default)]
pub struct ExactOptions {
    /// Worker threads for the vertex scan; the global pool when `None`.
    pub threads: Option<usize>,
    pub family: LineFamily,
}

struct Best {
    value: Rational,
    witness: Witness,
}

impl Best {
    fn offer(&mut self, value: Rational, witness: impl FnOnce() -> Witness) {
        if value > self.value {
            self.value = value;
            self.witness = witness();
        }
    }
}

fn limit_left(realizer: &Realizer, line: &DualLine) -> Option<(Rational, Witness)> {
    let d = &realizer.descriptor;
    let y = match realizer.delta_type {
        DeltaType::FirstAbove => &d.p.y,
        DeltaType::FirstBelow => &d.q.y,
        _ => return None,
    };
    let t0 = line.intercept()?;
    let value = &d.c * (y - &t0).abs();
    Some((
        value,
        Witness::LimitLeft {
            t0,
            descriptor: d.clone(),
            delta_type: realizer.delta_type,
        },
    ))
}

fn limit_right(realizer: &Realizer, line: &DualLine) -> Option<(Rational, Witness)> {
    let d = &realizer.descriptor;
    let x = match realizer.delta_type {
        DeltaType::FirstAbove => &d.q.x,
        DeltaType::FirstBelow => &d.p.x,
        _ => return None,
    };
    let slope = line.slope()?;
    let value = &d.c * (&slope + x).abs();
    Some((
        value,
        Witness::LimitRight {
            slope,
            descriptor: d.clone(),
            delta_type: realizer.delta_type,
        },
    ))
}

pub fn matching_distance_exact(pm: &GradedPresentation, pn: &GradedPresentation) -> MatchResult {
    matching_distance_exact_with(pm, pn, &ExactOptions::default())
}

pub fn matching_distance_exact_with(
    pm: &GradedPresentation,
    pn: &GradedPresentation,
    options: &ExactOptions,
) -> MatchResult {
    match options
        .threads
        .and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok())
    {
        Some(pool) => pool.install(|| run(pm, pn, options.family)),
        None => run(pm, pn, options.family),
    }
}

fn run(pm: &GradedPresentation, pn: &GradedPresentation, family: LineFamily) -> MatchResult {
    let mut stats = ExactStats::default();
    // The number of essential bars does not depend on the slice.
    let diagonal = Slice::new(int(1), int(0)).expect("positive slope");
    if eval_f(pm, pn, &diagonal).value.is_infinite() {
        return MatchResult {
            value: Extended::Infinite,
            witness: Witness::InfiniteBars { s: int(1), t: int(0) },
            stats,
        };
    }

    let set = generate_lines_for(pm, pn, family);
    stats.lines = set.lines.len();
    stats.emitted_lines = set.emitted;
    let lines = set.lines;

    let evaluator = SliceEvaluator::new(pm, pn);
    let scan = scan_distinct_vertices(&lines, |v| match v {
        VertexCoords::Small { sn, tn, d } => evaluator
            .eval_integer(*sn, *tn, *d)
            .unwrap_or_else(|| evaluator.eval(&v.s(), &v.t())),
        VertexCoords::Big { s, t } => evaluator.eval(s, t),
    });
    stats.vertices = scan.count;

    let mut best = Best {
        value: Rational::zero(),
        witness: Witness::Zero,
    };
    if let Some((Extended::Finite(value), coords)) = scan.best {
        best.offer(value, || Witness::Vertex {
            s: coords.s(),
            t: coords.t(),
        });
    }

    let (s_left, s_right) = probes_from_range(scan.s_range);
    for (s0, left) in [(s_left, true), (s_right, false)] {
        let data = probe(&lines, &s0);
        for (lower, upper) in data.bounded_intervals() {
            stats.probe_intervals += 1;
            let t = (&lower.t + &upper.t) / int(2);
            let ell = Slice::new(s0.clone(), t.clone()).expect("probe abscissa is positive");
            let eval = eval_f(pm, pn, &ell);
            if let Extended::Finite(value) = eval.value {
                best.offer(value, || Witness::Vertex { s: s0.clone(), t });
            }
            let Some(realizer) = eval.realizer.filter(|r| r.delta_type.is_straddling()) else {
                continue;
            };
            for bound in [&lower.lines[0], &upper.lines[0]] {
                let limit = if left {
                    limit_left(&realizer, bound)
                } else {
                    limit_right(&realizer, bound)
                };
                if let Some((value, witness)) = limit {
                    best.offer(value, || witness);
                }
            }
        }
    }

    MatchResult {
        value: Extended::Finite(best.value),
        witness: best.witness,
        stats,
    }
}

fn grade_sets(p: &GradedPresentation) -> Vec<&Grade> {
    p.row_grades().iter().chain(p.col_grades()).collect()
}

/// Checks that the descriptor names grades of the inputs with the right
/// weight for their modules.
fn check_descriptor(pm: &GradedPresentation, pn: &GradedPresentation, d: &DeltaDescriptor) -> Result<()> {
    let (gm, gn) = (grade_sets(pm), grade_sets(pn));
    let in_m = |g: &Grade| gm.contains(&g);
    let in_n = |g: &Grade| gn.contains(&g);
    let ok = if d.c == ratio(1, 2) {
        (in_m(&d.p) && in_m(&d.q)) || (in_n(&d.p) && in_n(&d.q))
    } else if d.c == int(1) {
        (in_m(&d.p) && in_n(&d.q)) || (in_n(&d.p) && in_m(&d.q))
    } else {
        return Err(Error::InvalidWitness(format!("weight {} is neither 1/2 nor 1", d.c)));
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidWitness(format!(
            "descriptor {} {} with weight {} does not match the input grades",
            d.p, d.q, d.c
        )))
    }
}

fn expect_value(reported: &ExtendedRational, recomputed: ExtendedRational) -> Result<()> {
    if *reported == recomputed {
        Ok(())
    } else {
        Err(Error::InvalidWitness(format!(
            "witness gives {recomputed}, result reports {reported}"
        )))
    }
}

fn straddling(delta_type: DeltaType) -> Result<()> {
    if delta_type.is_straddling() {
        Ok(())
    } else {
        Err(Error::InvalidWitness(format!(
            "limit witness with non-straddling type {}",
            delta_type.label()
        )))
    }
}

/// Recomputes the witness value and compares it exactly with the result.
pub fn check_witness(
    pm: &GradedPresentation,
    pn: &GradedPresentation,
    value: &ExtendedRational,
    witness: &Witness,
) -> Result<()> {
    match witness {
        Witness::Vertex { s, t } => {
            let ell = Slice::new(s.clone(), t.clone()).map_err(|e| Error::InvalidWitness(e.to_string()))?;
            expect_value(value, eval_f(pm, pn, &ell).value)
        }
        Witness::LimitLeft {
            t0,
            descriptor,
            delta_type,
        } => {
            check_descriptor(pm, pn, descriptor)?;
            straddling(*delta_type)?;
            let y = if *delta_type == DeltaType::FirstAbove {
                &descriptor.p.y
            } else {
                &descriptor.q.y
            };
            expect_value(value, Extended::Finite(&descriptor.c * (y - t0).abs()))
        }
        Witness::LimitRight {
            slope,
            descriptor,
            delta_type,
        } => {
            check_descriptor(pm, pn, descriptor)?;
            straddling(*delta_type)?;
            let x = if *delta_type == DeltaType::FirstAbove {
                &descriptor.q.x
            } else {
                &descriptor.p.x
            };
            expect_value(value, Extended::Finite(&descriptor.c * (slope + x).abs()))
        }
        Witness::InfiniteBars { s, t } => {
            let ell = Slice::new(s.clone(), t.clone()).map_err(|e| Error::InvalidWitness(e.to_string()))?;
            if !value.is_infinite() {
                return Err(Error::InvalidWitness("infinite-bars witness for a finite value".into()));
            }
            expect_value(value, eval_f(pm, pn, &ell).value)
        }
        Witness::Zero => expect_value(value, ExtendedRational::zero()),
    }
}

pub fn verify_witness(pm: &GradedPresentation, pn: &GradedPresentation, result: &MatchResult) -> bool {
    check_witness(pm, pn, &result.value, &result.witness).is_ok()
}
