//! Line arrangement in the dual `(s, t)` half-plane `s > 0`.
//!
//! Every line on which the combinatorics of a slice can change is generated
//! from grade pairs, deduplicated in canonical integer form, and intersected
//! pairwise. Vertices are streamed; only the line set is held in memory.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::numeric::{int, ratio, Rational};
use crate::presentation::{Grade, GradedPresentation};
use crate::slice::DeltaDescriptor;

/// `A·s + B·t = C` with `gcd(A, B, C) = 1` and the first nonzero of `(A, B)`
/// positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualLine {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl DualLine {
    /// Canonical form of `a·s + b·t = c`, or `None` when `a = b = 0`.
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Option<Self> {
        if a.is_zero() && b.is_zero() {
            return None;
        }
        let g = a.gcd(&b).gcd(&c);
        let (mut a, mut b, mut c) = (a / &g, b / &g, c / &g);
        if a.is_negative() || (a.is_zero() && b.is_negative()) {
            a = -a;
            b = -b;
            c = -c;
        }
        Some(DualLine { a, b, c })
    }

    /// Canonical form of `a·s + b·t = c` with rational coefficients.
    pub fn from_rational(a: &Rational, b: &Rational, c: &Rational) -> Option<Self> {
        let l = a.denom().lcm(b.denom()).lcm(c.denom());
        let scale = |v: &Rational| (v * BigRational::from_integer(l.clone())).to_integer();
        Self::new(scale(a), scale(b), scale(c))
    }

    /// `t = slope·s + intercept`.
    pub fn non_vertical(slope: &Rational, intercept: &Rational) -> Self {
        Self::from_rational(&-slope, &Rational::one(), intercept).expect("B = 1")
    }

    /// `s = at`.
    pub fn vertical(at: &Rational) -> Self {
        Self::from_rational(&Rational::one(), &Rational::zero(), at).expect("A = 1")
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn is_vertical(&self) -> bool {
        self.b.is_zero()
    }

    /// `-A/B`, the slope of `t` as a function of `s`.
    pub fn slope(&self) -> Option<Rational> {
        (!self.is_vertical()).then(|| Rational::new(-self.a.clone(), self.b.clone()))
    }

    /// `C/B`, the value of `t` at `s = 0`.
    pub fn intercept(&self) -> Option<Rational> {
        (!self.is_vertical()).then(|| Rational::new(self.c.clone(), self.b.clone()))
    }

    /// Abscissa of a vertical line.
    pub fn abscissa(&self) -> Option<Rational> {
        self.is_vertical()
            .then(|| Rational::new(self.c.clone(), self.a.clone()))
    }

    pub fn t_at(&self, s: &Rational) -> Option<Rational> {
        (!self.is_vertical()).then(|| {
            (BigRational::from_integer(self.c.clone()) - BigRational::from_integer(self.a.clone()) * s)
                / BigRational::from_integer(self.b.clone())
        })
    }

    /// Sign of `A·s + B·t − C`.
    pub fn side(&self, s: &Rational, t: &Rational) -> Ordering {
        let value = BigRational::from_integer(self.a.clone()) * s + BigRational::from_integer(self.b.clone()) * t
            - BigRational::from_integer(self.c.clone());
        value.cmp(&Rational::zero())
    }

    /// Meets the open half-plane `s > 0`.
    pub fn meets_domain(&self) -> bool {
        self.abscissa().is_none_or(|s| s.is_positive())
    }

    /// The unique common point, if the lines are not parallel.
    pub fn intersect(&self, other: &DualLine) -> Option<(Rational, Rational)> {
        let det = &self.a * &other.b - &other.a * &self.b;
        if det.is_zero() {
            return None;
        }
        let s = Rational::new(&self.c * &other.b - &other.c * &self.b, det.clone());
        let t = Rational::new(&self.a * &other.c - &other.a * &self.c, det);
        Some((s, t))
    }
}

impl fmt::Display for DualLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.a, self.b, self.c)
    }
}

/// Which weighted push-distances take part in the refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LineFamily {
    /// Only descriptors that can realize a bottleneck value: generator and
    /// relation of one module, or two generators (two relations) of
    /// different modules.
    #[default]
    WeightBearing,
    /// Every pair of grades.
    AllPairs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineSet {
    /// Sorted, canonical, distinct.
    pub lines: Vec<DualLine>,
    /// Number of lines produced before deduplication.
    pub emitted: usize,
}

struct Generator {
    lines: BTreeSet<DualLine>,
    emitted: usize,
}

impl Generator {
    fn push(&mut self, line: DualLine) {
        self.emitted += 1;
        if line.meets_domain() {
            self.lines.insert(line);
        }
    }

    /// `t = -b.x·s + a.y`: zero sets of straddling pushes, including every
    /// line of slices through a grade.
    fn zero_sets(&mut self, grades: &[Grade]) {
        for a in grades {
            for b in grades {
                self.push(DualLine::non_vertical(&-&b.x, &a.y));
            }
        }
    }

    /// Lines where `c·δ = c′·δ′` for some choice of the two types.
    fn compare(&mut self, d: &DeltaDescriptor, e: &DeltaDescriptor) {
        let (c, c2) = (&d.c, &e.c);
        let r = c / c2;
        let dy = (&d.p.y - &d.q.y).abs();
        let dx = (&d.p.x - &d.q.x).abs();
        let ex = (&e.p.x - &e.q.x).abs();
        // I against II
        if !dy.is_zero() && !ex.is_zero() {
            self.push(DualLine::vertical(&(c * &dy / (c2 * &ex))));
        }
        let roles = |x: &DeltaDescriptor| [(x.p.clone(), x.q.clone()), (x.q.clone(), x.p.clone())];
        for (a2, b2) in roles(e) {
            // I or II against III
            for sign in [1, -1] {
                let sign = int(sign);
                self.push(DualLine::non_vertical(&-&b2.x, &(&a2.y + &sign * &r * &dy)));
                self.push(DualLine::non_vertical(&-(&b2.x + &sign * &r * &dx), &a2.y));
            }
            for (a, b) in roles(d) {
                // III against III, same sign
                if c == c2 {
                    if b.x != b2.x {
                        self.push(DualLine::vertical(&((&a.y - &a2.y) / (&b.x - &b2.x))));
                    }
                } else {
                    let diff = c - c2;
                    self.push(DualLine::non_vertical(
                        &(-(c * &b.x - c2 * &b2.x) / &diff),
                        &((c * &a.y - c2 * &a2.y) / &diff),
                    ));
                }
                // III against III, opposite sign
                let sum = c + c2;
                self.push(DualLine::non_vertical(
                    &(-(c * &b.x + c2 * &b2.x) / &sum),
                    &((c * &a.y + c2 * &a2.y) / &sum),
                ));
            }
        }
    }

    fn finish(mut self, descriptors: &[DeltaDescriptor]) -> LineSet {
        for (i, d) in descriptors.iter().enumerate() {
            for (j, e) in descriptors.iter().enumerate() {
                if i != j {
                    self.compare(d, e);
                }
            }
        }
        self.push(DualLine::vertical(&Rational::one()));
        LineSet {
            lines: self.lines.into_iter().collect(),
            emitted: self.emitted,
        }
    }
}

fn unique(descriptors: impl IntoIterator<Item = DeltaDescriptor>) -> Vec<DeltaDescriptor> {
    descriptors
        .into_iter()
        .filter(|d| d.p != d.q)
        .map(|d| {
            if d.p <= d.q {
                d
            } else {
                DeltaDescriptor { p: d.q, q: d.p, c: d.c }
            }
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

fn all_pair_descriptors(gm: &[Grade], gn: &[Grade]) -> Vec<DeltaDescriptor> {
    let tagged: Vec<(usize, &Grade)> = gm.iter().map(|g| (0, g)).chain(gn.iter().map(|g| (1, g))).collect();
    unique(tagged.iter().enumerate().flat_map(|(i, &(mi, p))| {
        tagged[i + 1..].iter().map(move |&(mj, q)| {
            if mi == mj {
                DeltaDescriptor::same_module(p.clone(), q.clone())
            } else {
                DeltaDescriptor::cross_module(p.clone(), q.clone())
            }
        })
    }))
}

fn weight_bearing_descriptors(pm: &GradedPresentation, pn: &GradedPresentation) -> Vec<DeltaDescriptor> {
    let mut out = Vec::new();
    for p in [pm, pn] {
        for r in p.row_grades() {
            for c in p.col_grades() {
                out.push(DeltaDescriptor::same_module(r.clone(), c.clone()));
            }
        }
    }
    for (xs, ys) in [(pm.row_grades(), pn.row_grades()), (pm.col_grades(), pn.col_grades())] {
        for x in xs {
            for y in ys {
                out.push(DeltaDescriptor::cross_module(x.clone(), y.clone()));
            }
        }
    }
    unique(out)
}

fn all_grades(p: &GradedPresentation) -> Vec<Grade> {
    p.row_grades().iter().chain(p.col_grades()).cloned().collect()
}

/// Lines from every pair of grades of the two multisets.
pub fn generate_lines(gm: &[Grade], gn: &[Grade]) -> LineSet {
    let grades: Vec<Grade> = gm.iter().chain(gn).cloned().collect();
    let mut generator = Generator {
        lines: BTreeSet::new(),
        emitted: 0,
    };
    generator.zero_sets(&grades);
    generator.finish(&all_pair_descriptors(gm, gn))
}

pub fn generate_lines_for(pm: &GradedPresentation, pn: &GradedPresentation, family: LineFamily) -> LineSet {
    match family {
        LineFamily::AllPairs => generate_lines(&all_grades(pm), &all_grades(pn)),
        LineFamily::WeightBearing => {
            let grades: Vec<Grade> = all_grades(pm).into_iter().chain(all_grades(pn)).collect();
            let mut generator = Generator {
                lines: BTreeSet::new(),
                emitted: 0,
            };
            generator.zero_sets(&grades);
            generator.finish(&weight_bearing_descriptors(pm, pn))
        }
    }
}

/// Every pairwise intersection with `s > 0`, once per unordered line pair.
pub fn vertices(lines: &[DualLine]) -> impl Iterator<Item = (Rational, Rational)> + '_ {
    lines.iter().enumerate().flat_map(move |(i, l)| {
        lines[i + 1..]
            .iter()
            .filter_map(move |m| l.intersect(m))
            .filter(|(s, _)| s.is_positive())
    })
}

/// A vertex `s = sn/d`, `t = tn/d` in lowest terms with `d > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexCoords {
    Small { sn: i128, tn: i128, d: i128 },
    Big { s: Rational, t: Rational },
}

impl VertexCoords {
    /// Compares abscissas without building rationals when possible.
    fn cmp_s(&self, other: &VertexCoords) -> Ordering {
        if let (VertexCoords::Small { sn: a, d: b, .. }, VertexCoords::Small { sn: c, d: e, .. }) = (self, other) {
            if let (Some(x), Some(y)) = (a.checked_mul(*e), c.checked_mul(*b)) {
                return x.cmp(&y);
            }
        }
        self.s().cmp(&other.s())
    }

    pub fn s(&self) -> Rational {
        match self {
            VertexCoords::Small { sn, d, .. } => Rational::new((*sn).into(), (*d).into()),
            VertexCoords::Big { s, .. } => s.clone(),
        }
    }

    pub fn t(&self) -> Rational {
        match self {
            VertexCoords::Small { tn, d, .. } => Rational::new((*tn).into(), (*d).into()),
            VertexCoords::Big { t, .. } => t.clone(),
        }
    }
}

trait Coef: Clone + Ord + Send + Sync + Integer + Signed {
    fn coords(p: &[Self; 3]) -> VertexCoords;
    fn from_big(v: &BigInt) -> Option<Self>;
}

impl Coef for i128 {
    fn coords(p: &[i128; 3]) -> VertexCoords {
        VertexCoords::Small {
            sn: p[0],
            tn: p[1],
            d: p[2],
        }
    }

    fn from_big(v: &BigInt) -> Option<i128> {
        v.to_i128().filter(|x| x.abs() < 1i128 << 60)
    }
}

impl Coef for BigInt {
    fn coords(p: &[BigInt; 3]) -> VertexCoords {
        VertexCoords::Big {
            s: Rational::new(p[0].clone(), p[2].clone()),
            t: Rational::new(p[1].clone(), p[2].clone()),
        }
    }

    fn from_big(v: &BigInt) -> Option<BigInt> {
        Some(v.clone())
    }
}

/// Result of a maximum search over the distinct vertices.
#[derive(Debug, Clone)]
pub struct VertexScan<T> {
    pub best: Option<(T, VertexCoords)>,
    /// Distinct vertices with `s > 0`.
    pub count: usize,
    /// Least and greatest vertex abscissa.
    pub s_range: Option<(Rational, Rational)>,
}

struct Partial<T> {
    best: Option<(T, (usize, usize), VertexCoords)>,
    count: usize,
    s_range: Option<(VertexCoords, VertexCoords)>,
}

fn widen(
    range: Option<(VertexCoords, VertexCoords)>,
    lo: VertexCoords,
    hi: VertexCoords,
) -> (VertexCoords, VertexCoords) {
    match range {
        None => (lo, hi),
        Some((a, b)) => (
            if lo.cmp_s(&a) == Ordering::Less { lo } else { a },
            if hi.cmp_s(&b) == Ordering::Greater { hi } else { b },
        ),
    }
}

impl<T: Ord> Partial<T> {
    fn merge(self, other: Self) -> Self {
        let best = match (self.best, other.best) {
            (Some(a), Some(b)) => {
                let a_wins = match a.0.cmp(&b.0) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => a.1 < b.1,
                };
                Some(if a_wins { a } else { b })
            }
            (a, b) => a.or(b),
        };
        let s_range = match (self.s_range, other.s_range) {
            (a, Some((lo, hi))) => Some(widen(a, lo, hi)),
            (a, None) => a,
        };
        Partial {
            best,
            count: self.count + other.count,
            s_range,
        }
    }
}

/// Intersections of line `i` with all others, normalized and grouped; a
/// vertex belongs to the lowest-indexed line through it.
fn scan_line<I: Coef, T: Ord>(lines: &[[I; 3]], i: usize, eval: &(impl Fn(&VertexCoords) -> T + Sync)) -> Partial<T> {
    let [a1, b1, c1] = &lines[i];
    let mut points: Vec<([I; 3], usize)> = Vec::with_capacity(lines.len());
    for (j, [a2, b2, c2]) in lines.iter().enumerate() {
        if j == i {
            continue;
        }
        let mut d = a1.clone() * b2.clone() - a2.clone() * b1.clone();
        if d.is_zero() {
            continue;
        }
        let mut sn = c1.clone() * b2.clone() - c2.clone() * b1.clone();
        let mut tn = a1.clone() * c2.clone() - a2.clone() * c1.clone();
        if d.is_negative() {
            d = -d;
            sn = -sn;
            tn = -tn;
        }
        if !sn.is_positive() {
            continue;
        }
        let g = sn.gcd(&tn).gcd(&d);
        points.push(([sn / g.clone(), tn / g.clone(), d / g], j));
    }
    points.sort_unstable();
    let mut out = Partial {
        best: None,
        count: 0,
        s_range: None,
    };
    let mut order = 0;
    let mut k = 0;
    while k < points.len() {
        let start = k;
        while k < points.len() && points[k].0 == points[start].0 {
            k += 1;
        }
        if points[start].1 < i {
            continue;
        }
        let coords = I::coords(&points[start].0);
        out.s_range = Some(widen(out.s_range.take(), coords.clone(), coords.clone()));
        let value = eval(&coords);
        out.count += 1;
        if out.best.as_ref().is_none_or(|(v, _, _)| value > *v) {
            out.best = Some((value, (i, order), coords));
        }
        order += 1;
    }
    out
}

fn scan_with<I: Coef, T: Ord + Send>(lines: &[[I; 3]], eval: &(impl Fn(&VertexCoords) -> T + Sync)) -> VertexScan<T> {
    let merged = (0..lines.len())
        .into_par_iter()
        .map(|i| scan_line(lines, i, eval))
        .reduce(
            || Partial {
                best: None,
                count: 0,
                s_range: None,
            },
            Partial::merge,
        );
    VertexScan {
        best: merged.best.map(|(v, _, coords)| (v, coords)),
        count: merged.count,
        s_range: merged.s_range.map(|(lo, hi)| (lo.s(), hi.s())),
    }
}

/// Evaluates `eval` once at every distinct vertex with `s > 0` and keeps the
/// maximum. Ties go to the vertex met first in a fixed order, so the result
/// does not depend on scheduling. Runs on the current rayon pool.
pub fn scan_distinct_vertices<T, F>(lines: &[DualLine], eval: F) -> VertexScan<T>
where
    T: Ord + Send,
    F: Fn(&VertexCoords) -> T + Sync,
{
    let convert = |l: &DualLine| -> Option<[i128; 3]> {
        Some([i128::from_big(&l.a)?, i128::from_big(&l.b)?, i128::from_big(&l.c)?])
    };
    match lines.iter().map(convert).collect::<Option<Vec<_>>>() {
        Some(small) => scan_with(&small, &eval),
        None => {
            let big: Vec<[BigInt; 3]> = lines.iter().map(|l| [l.a.clone(), l.b.clone(), l.c.clone()]).collect();
            scan_with(&big, &eval)
        }
    }
}

/// `(s_min/2, 2·s_max)` over vertices with `s > 0`, or `(1/2, 2)` if there
/// are none.
pub fn probe_abscissas(lines: &[DualLine]) -> (Rational, Rational) {
    probes_from_range(scan_distinct_vertices(lines, |_| ()).s_range)
}

pub fn probes_from_range(range: Option<(Rational, Rational)>) -> (Rational, Rational) {
    match range {
        Some((lo, hi)) => (lo / int(2), hi * int(2)),
        None => (ratio(1, 2), int(2)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Intercept {
    pub t: Rational,
    /// Every non-vertical line through `(s0, t)`.
    pub lines: Vec<DualLine>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeData {
    pub s0: Rational,
    /// Strictly ascending.
    pub intercepts: Vec<Intercept>,
}

impl ProbeData {
    /// Bounded open intervals between consecutive intercepts, as
    /// `(lower, upper)` pairs.
    pub fn bounded_intervals(&self) -> impl Iterator<Item = (&Intercept, &Intercept)> {
        self.intercepts.windows(2).map(|w| (&w[0], &w[1]))
    }
}

/// The non-vertical lines crossing `s = s0`, sorted by height there.
pub fn probe(lines: &[DualLine], s0: &Rational) -> ProbeData {
    let mut hits: Vec<(Rational, &DualLine)> = lines.iter().filter_map(|l| Some((l.t_at(s0)?, l))).collect();
    hits.sort();
    let mut intercepts: Vec<Intercept> = Vec::new();
    for (t, line) in hits {
        match intercepts.last_mut() {
            Some(last) if last.t == t => last.lines.push(line.clone()),
            _ => intercepts.push(Intercept {
                t,
                lines: vec![line.clone()],
            }),
        }
    }
    ProbeData {
        s0: s0.clone(),
        intercepts,
    }
}
