//! Persistence diagrams of one-parameter modules by column reduction.
//!
//! Each diagram point remembers the 2-D grades of the generator and relation
//! that produced it, so a value computed on one slice can be traced back to a
//! fixed pair of grades.

use std::fmt;

use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};
use crate::numeric::{parse_extended, parse_rational, Extended, ExtendedRational, Rational};
use crate::presentation::{Grade, GradedPresentation, PrimeField};

/// An interval `[birth, death)`; `death == None` means `+inf`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bar<T> {
    pub birth: T,
    pub death: Option<T>,
}

impl<T> Bar<T> {
    pub fn new(birth: T, death: Option<T>) -> Self {
        Bar { birth, death }
    }
}

impl<T: fmt::Display> fmt::Display for Bar<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.death {
            Some(d) => write!(f, "{} {}", self.birth, d),
            None => write!(f, "{} inf", self.birth),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramPoint {
    pub birth: Rational,
    pub death: ExtendedRational,
    pub birth_grade: Grade,
    /// `None` stands for the grade at infinity of an essential bar.
    pub death_grade: Option<Grade>,
}

impl DiagramPoint {
    pub fn bar(&self) -> Bar<Rational> {
        Bar::new(self.birth.clone(), self.death.finite().cloned())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaggedDiagram {
    pub points: Vec<DiagramPoint>,
}

impl TaggedDiagram {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bars(&self) -> Vec<Bar<Rational>> {
        self.points.iter().map(DiagramPoint::bar).collect()
    }

    /// `(birth, death)` values sorted, ignoring tags.
    pub fn sorted_values(&self) -> Vec<(Rational, ExtendedRational)> {
        let mut v: Vec<_> = self.points.iter().map(|p| (p.birth.clone(), p.death.clone())).collect();
        v.sort();
        v
    }
}

/// A generator paired with the relation that kills it, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pairing {
    pub row: usize,
    pub col: Option<usize>,
}

type Indices = SmallVec<[usize; 8]>;
type SparseColumn = SmallVec<[(usize, u32); 4]>;

fn sorted_order<K: Ord>(keys: &[K]) -> Indices {
    let mut order: Indices = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));
    order
}

/// `a - factor * b` on sparse columns sorted by position.
fn axpy(field: PrimeField, a: &[(usize, u32)], factor: u32, b: &[(usize, u32)], out: &mut SparseColumn) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, field.sub(0, field.mul(factor, b[j].1))));
            j += 1;
        } else {
            let v = field.sub(a[i].1, field.mul(factor, b[j].1));
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
}

/// Standard left-to-right column reduction after sorting rows and columns
/// by `(key, index)`. Returns every pairing, including ones of zero length;
/// pairs come in column order, followed by unpaired rows in row order.
pub fn pair_by_keys<K: Ord>(p: &GradedPresentation, row_keys: &[K], col_keys: &[K]) -> SmallVec<[Pairing; 8]> {
    let field = p.field();
    let row_order = sorted_order(row_keys);
    let mut position: Indices = smallvec![0; row_keys.len()];
    for (pos, &row) in row_order.iter().enumerate() {
        position[row] = pos;
    }
    let col_order = sorted_order(col_keys);

    // pivot position -> reduced column owning it
    let mut owner: SmallVec<[Option<usize>; 8]> = smallvec![None; row_keys.len()];
    let mut reduced: SmallVec<[SparseColumn; 8]> = smallvec![SparseColumn::new(); col_keys.len()];
    let mut pairs = SmallVec::new();
    let mut scratch = SparseColumn::new();

    for &j in &col_order {
        let mut column: SparseColumn = p.columns()[j].iter().map(|&(i, c)| (position[i], c)).collect();
        column.sort_unstable_by_key(|e| e.0);
        while let Some(&(pivot, value)) = column.last() {
            let Some(k) = owner[pivot] else { break };
            let other = &reduced[k];
            let factor = field.mul(value, field.inv(other.last().unwrap().1));
            axpy(field, &column, factor, other, &mut scratch);
            std::mem::swap(&mut column, &mut scratch);
        }
        if let Some(&(pivot, _)) = column.last() {
            owner[pivot] = Some(j);
            pairs.push(Pairing {
                row: row_order[pivot],
                col: Some(j),
            });
        }
        reduced[j] = column;
    }
    for (pos, &row) in row_order.iter().enumerate() {
        if owner[pos].is_none() {
            pairs.push(Pairing { row, col: None });
        }
    }
    pairs
}

fn check_keys(p: &GradedPresentation, row_keys: &[Rational], col_keys: &[Rational]) -> Result<()> {
    if row_keys.len() != p.num_generators() || col_keys.len() != p.num_relations() {
        return Err(Error::Contract(format!(
            "expected {} row keys and {} column keys, got {} and {}",
            p.num_generators(),
            p.num_relations(),
            row_keys.len(),
            col_keys.len()
        )));
    }
    for (j, column) in p.columns().iter().enumerate() {
        for &(i, _) in column {
            if row_keys[i] > col_keys[j] {
                return Err(Error::Contract(format!(
                    "row key {} exceeds column key {} at entry ({i}, {j})",
                    row_keys[i], col_keys[j]
                )));
            }
        }
    }
    Ok(())
}

/// Tagged persistence diagram of the one-parameter module obtained by
/// replacing each grade of `p` with the given key.
pub fn reduce(p: &GradedPresentation, row_keys: &[Rational], col_keys: &[Rational]) -> Result<TaggedDiagram> {
    check_keys(p, row_keys, col_keys)?;
    let points = pair_by_keys(p, row_keys, col_keys)
        .into_iter()
        .filter(|pair| pair.col.is_none_or(|j| row_keys[pair.row] != col_keys[j]))
        .map(|pair| DiagramPoint {
            birth: row_keys[pair.row].clone(),
            death: pair.col.map(|j| col_keys[j].clone()).into(),
            birth_grade: p.row_grades()[pair.row].clone(),
            death_grade: pair.col.map(|j| p.col_grades()[j].clone()),
        })
        .collect();
    Ok(TaggedDiagram { points })
}

fn rank(field: PrimeField, mut vectors: Vec<Vec<u32>>) -> usize {
    let width = vectors.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..width {
        let Some(pivot) = (rank..vectors.len()).find(|&r| vectors[r][c] != 0) else {
            continue;
        };
        vectors.swap(rank, pivot);
        let inv = field.inv(vectors[rank][c]);
        for r in 0..vectors.len() {
            if r != rank && vectors[r][c] != 0 {
                let factor = field.mul(vectors[r][c], inv);
                let pivot_row = vectors[rank].clone();
                for (x, &p) in vectors[r].iter_mut().zip(&pivot_row).take(width) {
                    *x = field.sub(*x, field.mul(factor, p));
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of the structure map `M_a -> M_b` computed straight from
/// `M_x = span(Gen_x) / span(Rel_x)` by Gaussian elimination.
pub fn rank_oracle(
    p: &GradedPresentation,
    row_keys: &[Rational],
    col_keys: &[Rational],
    a: &Rational,
    b: &Rational,
) -> Result<usize> {
    if a > b {
        return Err(Error::Contract(format!("rank_oracle needs a <= b, got {a} > {b}")));
    }
    check_keys(p, row_keys, col_keys)?;
    let field = p.field();
    let k = p.num_generators();
    let relations: Vec<Vec<u32>> = p
        .columns()
        .iter()
        .zip(col_keys)
        .filter(|(_, key)| *key <= b)
        .map(|(column, _)| {
            let mut v = vec![0; k];
            for &(i, c) in column {
                v[i] = c;
            }
            v
        })
        .collect();
    let generators = row_keys.iter().enumerate().filter(|(_, key)| *key <= a).map(|(i, _)| {
        let mut v = vec![0; k];
        v[i] = 1;
        v
    });
    let base = rank(field, relations.clone());
    let combined = rank(field, relations.into_iter().chain(generators).collect());
    Ok(combined - base)
}

/// Parses one `birth death` pair per line (`inf` allowed as death, `#` comments).
pub fn parse_bars(text: &str) -> Result<Vec<Bar<Rational>>> {
    let mut bars = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [] => continue,
            [b, d] => {
                let birth = parse_rational(b).map_err(|e| Error::syntax(n + 1, 1, e.to_string()))?;
                let death = parse_extended(d).map_err(|e| Error::syntax(n + 1, 1, e.to_string()))?;
                if let Extended::Finite(d) = &death {
                    if *d <= birth {
                        return Err(Error::syntax(n + 1, 1, "death must exceed birth"));
                    }
                }
                bars.push(Bar::new(birth, death.finite().cloned()));
            }
            _ => return Err(Error::syntax(n + 1, 1, "expected `<birth> <death>`")),
        }
    }
    Ok(bars)
}

pub fn format_bars<T: fmt::Display>(bars: &[Bar<T>]) -> String {
    bars.iter().map(|b| format!("{b}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, ratio};
    use crate::presentation::parse_presentation;

    fn example() -> GradedPresentation {
        parse_presentation("bpres 1\ngenerators 1\n0 0\nrelations 2\n1 0 ; 0:1\n0 1 ; 0:1\n").unwrap()
    }

    #[test]
    fn unit_square_on_diagonal_slice() {
        let p = example();
        let d = reduce(&p, &[int(0)], &[int(1), int(1)]).unwrap();
        assert_eq!(d.sorted_values(), vec![(int(0), Extended::Finite(int(1)))]);
        // stable tie-break: the first relation kills the generator
        assert_eq!(d.points[0].death_grade, Some(p.col_grades()[0].clone()));
        assert_eq!(d.points[0].birth_grade, p.row_grades()[0]);
    }

    #[test]
    fn empty_and_free_modules() {
        let empty = GradedPresentation::empty();
        assert!(reduce(&empty, &[], &[]).unwrap().is_empty());
        let free = parse_presentation("bpres 1\ngenerators 1\n5 5\nrelations 0\n").unwrap();
        let d = reduce(&free, &[int(5)], &[]).unwrap();
        assert_eq!(d.sorted_values(), vec![(int(5), Extended::Infinite)]);
        assert_eq!(d.points[0].death_grade, None);
    }

    #[test]
    fn zero_length_pairs_are_dropped() {
        let p = example();
        let d = reduce(&p, &[int(1)], &[int(1), int(2)]).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn key_mismatch_is_a_contract_violation() {
        let p = example();
        assert!(matches!(
            reduce(&p, &[int(2)], &[int(1), int(1)]),
            Err(Error::Contract(_))
        ));
        assert!(matches!(reduce(&p, &[int(0)], &[int(1)]), Err(Error::Contract(_))));
    }

    #[test]
    fn rank_oracle_on_unit_square_shadow() {
        let p = example();
        let (rows, cols) = ([int(0)], [int(1), int(1)]);
        assert_eq!(rank_oracle(&p, &rows, &cols, &int(0), &ratio(1, 2)).unwrap(), 1);
        assert_eq!(rank_oracle(&p, &rows, &cols, &int(0), &int(2)).unwrap(), 0);
        let empty = GradedPresentation::empty();
        assert_eq!(rank_oracle(&empty, &[], &[], &int(0), &int(3)).unwrap(), 0);
        assert!(rank_oracle(&p, &rows, &cols, &int(1), &int(0)).is_err());
    }

    #[test]
    fn reduction_over_gf3_uses_coefficients() {
        // rows a,b at 0; relation at 1 kills a+b, relation at 2 kills a-b.
        // Over GF(3) both generators die; the second death is at 2.
        let text = "bpres 1\nfield 3\ngenerators 2\n0 0\n0 0\nrelations 2\n1 1 ; 0:1 1:1\n2 2 ; 0:1 1:2\n";
        let p = parse_presentation(text).unwrap();
        let d = reduce(&p, &[int(0), int(0)], &[int(1), int(2)]).unwrap();
        assert_eq!(
            d.sorted_values(),
            vec![(int(0), Extended::Finite(int(1))), (int(0), Extended::Finite(int(2)))]
        );
        // Over GF(2) the same pattern leaves one bar essential.
        let text2 = text.replace("field 3", "field 2").replace("1:2", "1:1");
        let p2 = parse_presentation(&text2).unwrap();
        let d2 = reduce(&p2, &[int(0), int(0)], &[int(1), int(2)]).unwrap();
        assert_eq!(
            d2.sorted_values(),
            vec![(int(0), Extended::Finite(int(1))), (int(0), Extended::Infinite)]
        );
    }

    #[test]
    fn bar_text_format() {
        let bars = parse_bars("# d\n0 1\n1/2 inf\n").unwrap();
        assert_eq!(bars, vec![Bar::new(int(0), Some(int(1))), Bar::new(ratio(1, 2), None)]);
        assert_eq!(format_bars(&bars), "0 1\n1/2 inf\n");
        assert!(parse_bars("1 0\n").is_err());
        assert!(parse_bars("1\n").is_err());
    }
}
