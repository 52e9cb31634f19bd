//! Exact bottleneck distance between finite persistence diagrams.
//!
//! The optimal value is one of finitely many candidates (coordinate
//! differences across the two diagrams and half-lengths of bars), so we binary
//! search the sorted candidates and decide each threshold with a perfect
//! matching test on the usual graph augmented by diagonal copies.

use std::collections::VecDeque;

use serde::Serialize;

use crate::diagram::{Bar, DiagramPoint, TaggedDiagram};
use crate::numeric::{Extended, ExtendedRational, Rational};

/// Scalar type of diagram coordinates.
pub trait Coordinate: Clone + Ord {
    fn zero() -> Self;
    fn abs_diff(&self, other: &Self) -> Self;
    /// Half of `death - birth`.
    fn half_length(birth: &Self, death: &Self) -> Self;
}

impl Coordinate for Rational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }

    fn abs_diff(&self, other: &Self) -> Self {
        num_traits::Signed::abs(&(self - other))
    }

    fn half_length(birth: &Self, death: &Self) -> Self {
        (death - birth) / Rational::from_integer(2.into())
    }
}

/// Integer coordinates. Callers must pre-double their keys so that
/// half-lengths stay integral.
impl Coordinate for i128 {
    fn zero() -> Self {
        0
    }

    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }

    fn half_length(birth: &Self, death: &Self) -> Self {
        debug_assert!((death - birth) % 2 == 0, "keys must be doubled");
        (death - birth) / 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum WitnessKind {
    MatchedBirth,
    MatchedDeath,
    Unmatched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    First,
    Second,
}

/// Index-level witness: which bar (or matched pair) attains the distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessRef {
    pub kind: WitnessKind,
    /// Diagram of `index`; for matched pairs always `First`.
    pub side: Side,
    pub index: usize,
    /// Partner in the second diagram for matched pairs.
    pub partner: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarsBottleneck<T> {
    pub value: Extended<T>,
    /// `None` only when both diagrams are empty.
    pub witness: Option<WitnessRef>,
}

fn death_diff<T: Coordinate>(a: &Option<T>, b: &Option<T>) -> Extended<T> {
    match (a, b) {
        (Some(x), Some(y)) => Extended::Finite(x.abs_diff(y)),
        (None, None) => Extended::Finite(T::zero()),
        _ => Extended::Infinite,
    }
}

fn half_length<T: Coordinate>(bar: &Bar<T>) -> Extended<T> {
    match &bar.death {
        Some(d) => Extended::Finite(T::half_length(&bar.birth, d)),
        None => Extended::Infinite,
    }
}

fn edge_cost<T: Coordinate>(a: &Bar<T>, b: &Bar<T>) -> (Extended<T>, Extended<T>) {
    (
        Extended::Finite(a.birth.abs_diff(&b.birth)),
        death_diff(&a.death, &b.death),
    )
}

/// Sorted, deduplicated candidate values for the distance.
pub fn candidates_bars<T: Coordinate>(a: &[Bar<T>], b: &[Bar<T>]) -> Vec<Extended<T>> {
    let mut out = vec![Extended::Finite(T::zero())];
    for x in a {
        for y in b {
            let (birth, death) = edge_cost(x, y);
            out.push(birth);
            out.push(death);
        }
    }
    out.extend(a.iter().chain(b).map(half_length));
    out.sort();
    out.dedup();
    out
}

/// Maximum matching by Hopcroft–Karp; `adj[u]` lists right vertices of `u`.
fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> (usize, Vec<Option<usize>>) {
    const FREE: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_left = vec![FREE; n_left];
    let mut match_right = vec![FREE; n_right];
    let mut dist = vec![0usize; n_left];
    let mut size = 0;

    loop {
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_left[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_right[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }

        fn augment(
            u: usize,
            adj: &[Vec<usize>],
            dist: &mut [usize],
            match_left: &mut [usize],
            match_right: &mut [usize],
        ) -> bool {
            for &v in &adj[u] {
                let w = match_right[v];
                if w == usize::MAX || (dist[w] == dist[u] + 1 && augment(w, adj, dist, match_left, match_right)) {
                    match_left[u] = v;
                    match_right[v] = u;
                    return true;
                }
            }
            dist[u] = usize::MAX;
            false
        }

        for u in 0..n_left {
            if match_left[u] == FREE && augment(u, adj, &mut dist, &mut match_left, &mut match_right) {
                size += 1;
            }
        }
    }
    let matching = match_left.into_iter().map(|v| (v != FREE).then_some(v)).collect();
    (size, matching)
}

/// Perfect matching on the diagonal-augmented graph at threshold `eps`.
///
/// Left vertices: bars of `a`, then diagonal copies of bars of `b`.
/// Right vertices: bars of `b`, then diagonal copies of bars of `a`.
fn threshold_matching<T: Coordinate>(a: &[Bar<T>], b: &[Bar<T>], eps: &Extended<T>) -> Option<Vec<Option<usize>>> {
    let (n1, n2) = (a.len(), b.len());
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(n1 + n2);
    for (u, x) in a.iter().enumerate() {
        let mut edges = Vec::new();
        for (v, y) in b.iter().enumerate() {
            let (birth, death) = edge_cost(x, y);
            if birth <= *eps && death <= *eps {
                edges.push(v);
            }
        }
        if half_length(x) <= *eps {
            edges.push(n2 + u);
        }
        adj.push(edges);
    }
    for (v, y) in b.iter().enumerate() {
        let mut edges = Vec::with_capacity(n1 + 1);
        if half_length(y) <= *eps {
            edges.push(v);
        }
        edges.extend((0..n1).map(|u| n2 + u));
        adj.push(edges);
    }
    let (size, matching) = hopcroft_karp(&adj, n1 + n2);
    (size == n1 + n2).then_some(matching)
}

/// Whether some partial matching has cost at most `eps`.
pub fn feasible_bars<T: Coordinate>(a: &[Bar<T>], b: &[Bar<T>], eps: &Extended<T>) -> bool {
    threshold_matching(a, b, eps).is_some()
}

fn essential_count<T>(bars: &[Bar<T>]) -> usize {
    bars.iter().filter(|b| b.death.is_none()).count()
}

pub fn bottleneck_bars<T: Coordinate>(a: &[Bar<T>], b: &[Bar<T>]) -> BarsBottleneck<T> {
    if a.is_empty() && b.is_empty() {
        return BarsBottleneck {
            value: Extended::Finite(T::zero()),
            witness: None,
        };
    }
    let (ea, eb) = (essential_count(a), essential_count(b));
    if ea != eb {
        let (side, bars) = if ea > eb { (Side::First, a) } else { (Side::Second, b) };
        let index = bars.iter().position(|x| x.death.is_none()).unwrap();
        return BarsBottleneck {
            value: Extended::Infinite,
            witness: Some(WitnessRef {
                kind: WitnessKind::Unmatched,
                side,
                index,
                partner: None,
            }),
        };
    }

    let candidates = candidates_bars(a, b);
    // smallest feasible candidate; the largest is always feasible
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible_bars(a, b, &candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let value = candidates[lo].clone();
    let matching = threshold_matching(a, b, &value).expect("largest candidate is feasible");

    let n2 = b.len();
    let mut best: Option<(Extended<T>, WitnessRef)> = None;
    let mut consider = |cost: Extended<T>, w: WitnessRef| {
        if best.as_ref().is_none_or(|(c, _)| cost > *c) {
            best = Some((cost, w));
        }
    };
    for (u, x) in a.iter().enumerate() {
        match matching[u] {
            Some(v) if v < n2 => {
                let (birth, death) = edge_cost(x, &b[v]);
                let (kind, cost) = if birth >= death {
                    (WitnessKind::MatchedBirth, birth)
                } else {
                    (WitnessKind::MatchedDeath, death)
                };
                consider(
                    cost,
                    WitnessRef {
                        kind,
                        side: Side::First,
                        index: u,
                        partner: Some(v),
                    },
                );
            }
            _ => consider(
                half_length(x),
                WitnessRef {
                    kind: WitnessKind::Unmatched,
                    side: Side::First,
                    index: u,
                    partner: None,
                },
            ),
        }
    }
    for (v, y) in b.iter().enumerate() {
        if matching[a.len() + v] == Some(v) {
            consider(
                half_length(y),
                WitnessRef {
                    kind: WitnessKind::Unmatched,
                    side: Side::Second,
                    index: v,
                    partner: None,
                },
            );
        }
    }
    let (cost, witness) = best.expect("nonempty diagrams");
    debug_assert!(cost == value, "matching found at the optimum must attain it");
    BarsBottleneck {
        value,
        witness: Some(witness),
    }
}

/// Largest diagram size handled by [`bottleneck_value_small`].
pub const SMALL_DIAGRAM: usize = 4;

/// Bottleneck value by exhaustive search over partial matchings, without
/// allocation. `None` when either diagram has more than [`SMALL_DIAGRAM`]
/// bars.
pub fn bottleneck_value_small<T: Coordinate>(a: &[Bar<T>], b: &[Bar<T>]) -> Option<Extended<T>> {
    if a.len() > SMALL_DIAGRAM || b.len() > SMALL_DIAGRAM {
        return None;
    }
    if essential_count(a) != essential_count(b) {
        return Some(Extended::Infinite);
    }

    struct Search<'a, T> {
        a: &'a [Bar<T>],
        b: &'a [Bar<T>],
        best: Extended<T>,
    }

    impl<T: Coordinate> Search<'_, T> {
        fn go(&mut self, i: usize, used: u32, acc: Extended<T>) {
            if acc >= self.best {
                return;
            }
            if i == self.a.len() {
                let mut total = acc;
                for (j, y) in self.b.iter().enumerate() {
                    if used >> j & 1 == 0 {
                        total = total.max(half_length(y));
                    }
                }
                if total < self.best {
                    self.best = total;
                }
                return;
            }
            let x = &self.a[i];
            for j in 0..self.b.len() {
                if used >> j & 1 == 0 {
                    let (birth, death) = edge_cost(x, &self.b[j]);
                    let cost = acc.clone().max(birth).max(death);
                    self.go(i + 1, used | 1 << j, cost);
                }
            }
            let cost = acc.max(half_length(x));
            self.go(i + 1, used, cost);
        }
    }

    let mut search = Search {
        a,
        b,
        best: Extended::Infinite,
    };
    search.go(0, 0, Extended::Finite(T::zero()));
    Some(search.best)
}

/// Witness in terms of tagged diagram points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BottleneckWitness {
    pub kind: WitnessKind,
    pub side: Side,
    pub point_a: DiagramPoint,
    pub point_b: Option<DiagramPoint>,
}

impl BottleneckWitness {
    /// The cost this witness stands for.
    pub fn value(&self) -> ExtendedRational {
        match (self.kind, &self.point_b) {
            (WitnessKind::MatchedBirth, Some(b)) => {
                Extended::Finite(Coordinate::abs_diff(&self.point_a.birth, &b.birth))
            }
            (WitnessKind::MatchedDeath, Some(b)) => self.point_a.death.abs_diff(&b.death),
            _ => half_length(&self.point_a.bar()),
        }
    }
}

pub fn candidates(d1: &TaggedDiagram, d2: &TaggedDiagram) -> Vec<ExtendedRational> {
    candidates_bars(&d1.bars(), &d2.bars())
}

pub fn feasible(d1: &TaggedDiagram, d2: &TaggedDiagram, eps: &ExtendedRational) -> bool {
    feasible_bars(&d1.bars(), &d2.bars(), eps)
}

pub fn bottleneck(d1: &TaggedDiagram, d2: &TaggedDiagram) -> (ExtendedRational, Option<BottleneckWitness>) {
    let result = bottleneck_bars(&d1.bars(), &d2.bars());
    let witness = result.witness.map(|w| {
        let source = match w.side {
            Side::First => d1,
            Side::Second => d2,
        };
        BottleneckWitness {
            kind: w.kind,
            side: w.side,
            point_a: source.points[w.index].clone(),
            point_b: w.partner.map(|v| d2.points[v].clone()),
        }
    });
    (result.value, witness)
}
