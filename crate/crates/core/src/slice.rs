//! Slices `y = s·x + t`, push maps, and the weighted bottleneck function `F`.
//!
//! Everything is computed in weight-scaled coordinates: the weighted slice
//! coordinate of a grade `p` is `max(s·p.x, p.y − t) / max(1, s)`, which is
//! rational, so `F(s, t)` is a plain bottleneck distance between two diagrams
//! of scaled keys.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::bottleneck::{bottleneck, bottleneck_bars, bottleneck_value_small, WitnessKind};
use crate::diagram::{pair_by_keys, reduce, Bar, TaggedDiagram};
use crate::error::{Error, Result};
use crate::numeric::{ratio, Extended, ExtendedRational, Rational};
use crate::presentation::{rational_text, Grade, GradedPresentation};

/// The line `y = s·x + t`, `s > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Slice {
    #[serde(with = "rational_text")]
    s: Rational,
    #[serde(with = "rational_text")]
    t: Rational,
}

impl Slice {
    pub fn new(s: Rational, t: Rational) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::NonPositiveSlope(s.to_string()));
        }
        Ok(Slice { s, t })
    }

    pub fn s(&self) -> &Rational {
        &self.s
    }

    pub fn t(&self) -> &Rational {
        &self.t
    }

    /// The weight `w` of this slice, as a float.
    pub fn weight(&self) -> f64 {
        let s = crate::numeric::to_f64(&self.s);
        if s >= 1.0 {
            1.0 / (1.0 + s * s).sqrt()
        } else {
            1.0 / (1.0 + 1.0 / (s * s)).sqrt()
        }
    }
}

impl fmt::Display for Slice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s={} t={}", self.s, self.t)
    }
}

/// Strictly below the slice; points on the slice count as above.
pub fn is_below(p: &Grade, ell: &Slice) -> bool {
    p.y < &ell.s * &p.x + &ell.t
}

/// Vertical push from below, horizontal push from on/above.
pub fn push(p: &Grade, ell: &Slice) -> Grade {
    if is_below(p, ell) {
        Grade::new(p.x.clone(), &ell.s * &p.x + &ell.t)
    } else {
        Grade::new((&p.y - &ell.t) / &ell.s, p.y.clone())
    }
}

/// `w(ℓ)·λ⁻¹(push(p, ℓ))` in closed rational form.
pub fn scaled_coordinate(p: &Grade, ell: &Slice) -> Rational {
    let below = is_below(p, ell);
    if ell.s >= Rational::one() {
        if below {
            p.x.clone()
        } else {
            (&p.y - &ell.t) / &ell.s
        }
    } else if below {
        &ell.s * &p.x
    } else {
        &p.y - &ell.t
    }
}

/// Position of a pair of grades relative to a slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeltaType {
    /// Both points on or above the slice.
    #[serde(rename = "I")]
    BothAbove,
    /// Both points strictly below.
    #[serde(rename = "II")]
    BothBelow,
    /// First on or above, second below.
    #[serde(rename = "IIIa")]
    FirstAbove,
    /// First below, second on or above.
    #[serde(rename = "IIIb")]
    FirstBelow,
}

impl DeltaType {
    pub fn is_straddling(self) -> bool {
        matches!(self, DeltaType::FirstAbove | DeltaType::FirstBelow)
    }

    pub fn label(self) -> &'static str {
        match self {
            DeltaType::BothAbove => "I",
            DeltaType::BothBelow => "II",
            DeltaType::FirstAbove => "IIIa",
            DeltaType::FirstBelow => "IIIb",
        }
    }
}

pub fn classify(p: &Grade, q: &Grade, ell: &Slice) -> DeltaType {
    match (is_below(p, ell), is_below(q, ell)) {
        (false, false) => DeltaType::BothAbove,
        (true, true) => DeltaType::BothBelow,
        (false, true) => DeltaType::FirstAbove,
        (true, false) => DeltaType::FirstBelow,
    }
}

/// A weighted push-distance `c·δ_{p,q}`: `c = 1/2` for two grades of the
/// same module, `1` across modules.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeltaDescriptor {
    pub p: Grade,
    pub q: Grade,
    #[serde(with = "rational_text")]
    pub c: Rational,
}

impl DeltaDescriptor {
    pub fn same_module(p: Grade, q: Grade) -> Self {
        DeltaDescriptor { p, q, c: ratio(1, 2) }
    }

    pub fn cross_module(p: Grade, q: Grade) -> Self {
        DeltaDescriptor {
            p,
            q,
            c: Rational::one(),
        }
    }
}

/// `c·w(ℓ)·δ_{p,q}(ℓ)`.
pub fn scaled_delta(d: &DeltaDescriptor, ell: &Slice) -> Rational {
    &d.c * (scaled_coordinate(&d.p, ell) - scaled_coordinate(&d.q, ell)).abs()
}

/// Scaled keys of the rows and columns of `p` on `ell`.
pub fn slice_keys(p: &GradedPresentation, ell: &Slice) -> (Vec<Rational>, Vec<Rational>) {
    let rows = p.row_grades().iter().map(|g| scaled_coordinate(g, ell)).collect();
    let cols = p.col_grades().iter().map(|g| scaled_coordinate(g, ell)).collect();
    (rows, cols)
}

pub fn slice_diagram(p: &GradedPresentation, ell: &Slice) -> TaggedDiagram {
    let (rows, cols) = slice_keys(p, ell);
    reduce(p, &rows, &cols).expect("pushing preserves the grade condition")
}

/// The descriptor realizing `F` at a slice, with its type there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Realizer {
    pub descriptor: DeltaDescriptor,
    #[serde(rename = "type")]
    pub delta_type: DeltaType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceEvaluation {
    pub value: ExtendedRational,
    /// Absent when the value is infinite or both diagrams are empty.
    pub realizer: Option<Realizer>,
}

/// `F(ℓ) = w(ℓ)·d_B(M^ℓ, N^ℓ)` with the grade pair realizing it.
pub fn eval_f(pm: &GradedPresentation, pn: &GradedPresentation, ell: &Slice) -> SliceEvaluation {
    let dm = slice_diagram(pm, ell);
    let dn = slice_diagram(pn, ell);
    let (value, witness) = bottleneck(&dm, &dn);
    let descriptor = match (&value, witness) {
        (Extended::Finite(_), Some(w)) => match (w.kind, w.point_b) {
            (WitnessKind::MatchedBirth, Some(b)) => {
                Some(DeltaDescriptor::cross_module(w.point_a.birth_grade, b.birth_grade))
            }
            (WitnessKind::MatchedDeath, Some(b)) => match (w.point_a.death_grade, b.death_grade) {
                (Some(da), Some(db)) => Some(DeltaDescriptor::cross_module(da, db)),
                _ => None,
            },
            _ => w
                .point_a
                .death_grade
                .map(|death| DeltaDescriptor::same_module(w.point_a.birth_grade, death)),
        },
        _ => None,
    };
    let realizer = descriptor.map(|descriptor| Realizer {
        delta_type: classify(&descriptor.p, &descriptor.q, ell),
        descriptor,
    });
    SliceEvaluation { value, realizer }
}

/// Integer grades of one presentation, scaled by the common denominator.
struct IntegerGrades<'a> {
    presentation: &'a GradedPresentation,
    rows: Vec<(i128, i128)>,
    cols: Vec<(i128, i128)>,
}

/// Value-only evaluation of `F` in machine integers.
///
/// Grades are scaled by the lcm `L` of their denominators. At a slice
/// `s = sn/d`, `t = tn/d` the key of a grade `(X, Y)` times `L·d` is
/// `max(sn·X, Y·d − L·tn)`, and `F = d_B(keys) / (L·max(d, sn))`. Keys are
/// doubled so half-lengths stay integral. Any overflow falls back to the
/// exact rational path.
pub struct SliceEvaluator<'a> {
    pm: &'a GradedPresentation,
    pn: &'a GradedPresentation,
    scale: i128,
    modules: Option<[IntegerGrades<'a>; 2]>,
}

const KEY_LIMIT: i128 = 1 << 100;

fn to_small(value: &BigInt) -> Option<i128> {
    value.to_i128().filter(|v| v.abs() < (1i128 << 62))
}

impl<'a> SliceEvaluator<'a> {
    pub fn new(pm: &'a GradedPresentation, pn: &'a GradedPresentation) -> Self {
        let all = || {
            [pm, pn]
                .into_iter()
                .flat_map(|p| p.row_grades().iter().chain(p.col_grades()))
        };
        let lcm = all().fold(BigInt::one(), |acc, g| acc.lcm(g.x.denom()).lcm(g.y.denom()));
        let scale = to_small(&lcm);
        let integerize = |p: &'a GradedPresentation, scale: &BigInt| -> Option<IntegerGrades<'a>> {
            let conv = |g: &Grade| -> Option<(i128, i128)> {
                let x = (&g.x * BigRational::from_integer(scale.clone())).to_integer();
                let y = (&g.y * BigRational::from_integer(scale.clone())).to_integer();
                Some((to_small(&x)?, to_small(&y)?))
            };
            Some(IntegerGrades {
                presentation: p,
                rows: p.row_grades().iter().map(conv).collect::<Option<_>>()?,
                cols: p.col_grades().iter().map(conv).collect::<Option<_>>()?,
            })
        };
        let modules = scale.and_then(|_| Some([integerize(pm, &lcm)?, integerize(pn, &lcm)?]));
        SliceEvaluator {
            pm,
            pn,
            scale: scale.unwrap_or(1),
            modules,
        }
    }

    fn keys(grades: &[(i128, i128)], sn: i128, ltn: i128, d: i128) -> Option<SmallVec<[i128; 8]>> {
        grades
            .iter()
            .map(|&(x, y)| {
                let below = sn.checked_mul(x)?;
                let above = y.checked_mul(d)?.checked_sub(ltn)?;
                let key = below.max(above);
                (key.abs() < KEY_LIMIT).then_some(key * 2)
            })
            .collect()
    }

    fn bars(module: &IntegerGrades<'_>, sn: i128, ltn: i128, d: i128) -> Option<SmallVec<[Bar<i128>; 4]>> {
        let rows = Self::keys(&module.rows, sn, ltn, d)?;
        let cols = Self::keys(&module.cols, sn, ltn, d)?;
        Some(
            pair_by_keys(module.presentation, &rows, &cols)
                .into_iter()
                .filter(|pair| pair.col.is_none_or(|j| rows[pair.row] != cols[j]))
                .map(|pair| Bar::new(rows[pair.row], pair.col.map(|j| cols[j])))
                .collect(),
        )
    }

    /// `F` at `s = sn/d`, `t = tn/d` with `d > 0`, or `None` on overflow.
    pub fn eval_integer(&self, sn: i128, tn: i128, d: i128) -> Option<ExtendedRational> {
        debug_assert!(d > 0 && sn > 0);
        let [m, n] = self.modules.as_ref()?;
        let ltn = self.scale.checked_mul(tn)?;
        let bm = Self::bars(m, sn, ltn, d)?;
        let bn = Self::bars(n, sn, ltn, d)?;
        let denom = self.scale.checked_mul(d.max(sn))?.checked_mul(2)?;
        let value = bottleneck_value_small(&bm, &bn).unwrap_or_else(|| bottleneck_bars(&bm, &bn).value);
        Some(value.map(|v| Rational::new(v.into(), denom.into())))
    }

    /// `F` at an arbitrary slice, exact in every case.
    pub fn eval(&self, s: &Rational, t: &Rational) -> ExtendedRational {
        let d = s.denom().lcm(t.denom());
        let sn = (s * BigRational::from_integer(d.clone())).to_integer();
        let tn = (t * BigRational::from_integer(d.clone())).to_integer();
        if let (Some(sn), Some(tn), Some(d)) = (to_small(&sn), to_small(&tn), to_small(&d)) {
            if let Some(v) = self.eval_integer(sn, tn, d) {
                return v;
            }
        }
        let ell = Slice::new(s.clone(), t.clone()).expect("positive slope");
        eval_f(self.pm, self.pn, &ell).value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::int;
    use crate::presentation::parse_presentation;
    use crate::testing::{arb_grade, arb_presentation, arb_slice};
    use num_traits::Zero;
    use proptest::prelude::*;

    fn g(x: i64, y: i64) -> Grade {
        Grade::new(int(x), int(y))
    }

    fn sl(s: Rational, t: Rational) -> Slice {
        Slice::new(s, t).unwrap()
    }

    fn example() -> GradedPresentation {
        parse_presentation("bpres 1\ngenerators 1\n0 0\nrelations 2\n1 0 ; 0:1\n0 1 ; 0:1\n").unwrap()
    }

    #[test]
    fn slopes_must_be_positive() {
        assert!(Slice::new(int(0), int(0)).is_err());
        assert!(Slice::new(int(-1), int(0)).is_err());
    }

    #[test]
    fn push_examples() {
        let diag = sl(int(1), int(0));
        assert_eq!(push(&g(2, 3), &diag), g(3, 3));
        assert_eq!(push(&g(0, 0), &diag), g(0, 0));
        assert_eq!(push(&g(1, 0), &diag), g(1, 1));
    }

    #[test]
    fn scaled_coordinate_examples() {
        let diag = sl(int(1), int(0));
        assert_eq!(scaled_coordinate(&g(2, 3), &diag), int(3));
        assert_eq!(scaled_coordinate(&g(1, 0), &diag), int(1));
        assert_eq!(scaled_coordinate(&g(0, 2), &sl(ratio(1, 2), int(0))), int(2));
    }

    #[test]
    fn classify_examples() {
        let diag = sl(int(1), int(0));
        assert_eq!(classify(&g(0, 2), &g(1, 0), &diag), DeltaType::FirstAbove);
        assert_eq!(classify(&g(0, 2), &g(1, 3), &diag), DeltaType::BothAbove);
        assert_eq!(classify(&g(1, 0), &g(2, 0), &diag), DeltaType::BothBelow);
        assert_eq!(classify(&g(1, 0), &g(0, 2), &diag), DeltaType::FirstBelow);
    }

    #[test]
    fn scaled_delta_examples() {
        let diag = sl(int(1), int(0));
        assert_eq!(
            scaled_delta(&DeltaDescriptor::same_module(g(0, 0), g(1, 0)), &diag),
            ratio(1, 2)
        );
        assert_eq!(
            scaled_delta(&DeltaDescriptor::cross_module(g(3, 1), g(3, 1)), &diag),
            int(0)
        );
        assert_eq!(
            scaled_delta(&DeltaDescriptor::cross_module(g(0, 2), g(1, 0)), &diag),
            int(1)
        );
    }

    #[test]
    fn unit_square_slice_diagrams() {
        let p = example();
        let d = slice_diagram(&p, &sl(int(1), int(0)));
        assert_eq!(d.sorted_values(), vec![(int(0), Extended::Finite(int(1)))]);
        assert_eq!(d.points[0].birth_grade, g(0, 0));
        let d = slice_diagram(&p, &sl(int(2), int(0)));
        assert_eq!(d.sorted_values(), vec![(int(0), Extended::Finite(ratio(1, 2)))]);
        assert_eq!(d.points[0].death_grade, Some(g(0, 1)));
        assert!(slice_diagram(&GradedPresentation::empty(), &sl(int(3), int(1))).is_empty());
    }

    #[test]
    fn eval_examples() {
        let p = example();
        let empty = GradedPresentation::empty();
        let e = eval_f(&p, &empty, &sl(int(1), int(0)));
        assert_eq!(e.value, Extended::Finite(ratio(1, 2)));
        let r = e.realizer.unwrap();
        assert_eq!(r.descriptor, DeltaDescriptor::same_module(g(0, 0), g(1, 0)));
        assert_eq!(r.delta_type, DeltaType::FirstAbove);

        assert_eq!(
            eval_f(&p, &p, &sl(ratio(3, 7), int(-2))).value,
            ExtendedRational::zero()
        );

        let free = parse_presentation("bpres 1\ngenerators 1\n0 0\nrelations 0\n").unwrap();
        let e = eval_f(&free, &empty, &sl(int(5), int(1)));
        assert_eq!(e.value, Extended::Infinite);
        assert!(e.realizer.is_none());
    }

    proptest! {
        #[test]
        fn push_lands_on_slice_and_dominates(p in arb_grade(), ell in arb_slice()) {
            let q = push(&p, &ell);
            prop_assert_eq!(&q.y, &(ell.s() * &q.x + ell.t()));
            prop_assert!(p.precedes(&q));
        }

        #[test]
        fn scaled_coordinate_is_monotone(p in arb_grade(), dx in 0i64..5, dy in 0i64..5, ell in arb_slice()) {
            let q = Grade::new(&p.x + int(dx), &p.y + int(dy));
            prop_assert!(scaled_coordinate(&p, &ell) <= scaled_coordinate(&q, &ell));
        }

        #[test]
        fn scaled_delta_symmetric_nonnegative(p in arb_grade(), q in arb_grade(), ell in arb_slice()) {
            let a = scaled_delta(&DeltaDescriptor::cross_module(p.clone(), q.clone()), &ell);
            let b = scaled_delta(&DeltaDescriptor::cross_module(q.clone(), p.clone()), &ell);
            prop_assert_eq!(&a, &b);
            prop_assert!(!a.is_negative());
            prop_assert_eq!(a.is_zero(), push(&p, &ell) == push(&q, &ell));
        }

        #[test]
        fn realizer_reproduces_value(pm in arb_presentation(3, 3), pn in arb_presentation(3, 3), ell in arb_slice()) {
            let e = eval_f(&pm, &pn, &ell);
            if let (Extended::Finite(v), Some(r)) = (&e.value, &e.realizer) {
                prop_assert_eq!(&scaled_delta(&r.descriptor, &ell), v);
                prop_assert_eq!(r.delta_type, classify(&r.descriptor.p, &r.descriptor.q, &ell));
            }
        }

        #[test]
        fn integer_evaluator_matches_exact(pm in arb_presentation(3, 3), pn in arb_presentation(3, 3), ell in arb_slice()) {
            let fast = SliceEvaluator::new(&pm, &pn);
            prop_assert_eq!(fast.eval(ell.s(), ell.t()), eval_f(&pm, &pn, &ell).value);
        }

        #[test]
        fn swap_symmetry_of_weights(pm in arb_presentation(3, 3), pn in arb_presentation(3, 3), ell in arb_slice()) {
            let sm = pm.map_grades(Grade::swapped).unwrap();
            let sn = pn.map_grades(Grade::swapped).unwrap();
            let mirrored = sl(ell.s().recip(), -ell.t() / ell.s());
            prop_assert_eq!(eval_f(&pm, &pn, &ell).value, eval_f(&sm, &sn, &mirrored).value);
        }

        // |F(ℓ') − F(ℓ)| ≤ |Δs|·(X + B) + |Δt| where X bounds |x| over all
        // grades and B bounds the unnormalized keys on both slices.
        #[test]
        fn f_is_lipschitz_hence_continuous(
            pm in arb_presentation(3, 3),
            pn in arb_presentation(3, 3),
            ell in arb_slice(),
            ds in -3i64..=3,
            dt in -3i64..=3,
        ) {
            let base = eval_f(&pm, &pn, &ell).value;
            let Extended::Finite(base) = base else { return Ok(()) };
            let grades: Vec<Grade> = [&pm, &pn]
                .iter()
                .flat_map(|p| p.row_grades().iter().chain(p.col_grades()).cloned().collect::<Vec<_>>())
                .collect();
            let x_bound = grades.iter().map(|g| g.x.abs()).max().unwrap_or_else(Rational::zero);
            let y_bound = grades.iter().map(|g| g.y.abs()).max().unwrap_or_else(Rational::zero);
            for exp in [2u32, 3, 4] {
                let h = Rational::new(BigInt::one(), BigInt::from(10).pow(exp));
                let moved = sl(ell.s() + &h * int(ds) / int(4), ell.t() + &h * int(dt) / int(4));
                let Extended::Finite(v) = eval_f(&pm, &pn, &moved).value else {
                    prop_assert!(false, "finiteness is slice independent");
                    unreachable!()
                };
                let s_max = ell.s().clone().max(moved.s().clone());
                let t_max = ell.t().abs().max(moved.t().abs());
                let key_bound = (&s_max * &x_bound).max(&y_bound + &t_max) * int(2);
                let bound = (moved.s() - ell.s()).abs() * (&x_bound + key_bound) + (moved.t() - ell.t()).abs();
                prop_assert!((&v - &base).abs() <= bound);
            }
        }
    }
}
