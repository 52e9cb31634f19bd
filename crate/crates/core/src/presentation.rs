//! Finite presentations of bipersistence modules and the `bpres` text format.
//!
//! ```text
//! bpres 1
//! field 2
//! generators 1
//! 0 0
//! relations 2
//! 1 0 ; 0:1
//! 0 1 ; 0:1
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{parse_rational, Rational};

/// A point of the parameter plane.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Grade {
    #[serde(with = "rational_text")]
    pub x: Rational,
    #[serde(with = "rational_text")]
    pub y: Rational,
}

impl Grade {
    pub fn new(x: Rational, y: Rational) -> Self {
        Grade { x, y }
    }

    /// Product order: `self <= other` in both coordinates.
    pub fn precedes(&self, other: &Grade) -> bool {
        self.x <= other.x && self.y <= other.y
    }

    pub fn swapped(&self) -> Grade {
        Grade::new(self.y.clone(), self.x.clone())
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

pub(crate) mod rational_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::numeric::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(value)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Arithmetic in GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p > u32::MAX as u64 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn reduce(&self, value: i64) -> u32 {
        value.rem_euclid(self.p as i64) as u32
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        // Fermat: a^(p-2)
        let mut result = 1u64;
        let mut base = a as u64 % self.p as u64;
        let mut exp = self.p as u64 - 2;
        let modulus = self.p as u64;
        while exp > 0 {
            if exp & 1 == 1 {
                result = result * base % modulus;
            }
            base = base * base % modulus;
            exp >>= 1;
        }
        result as u32
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Sparse column: `(row index, nonzero coefficient)` pairs with distinct rows.
pub type Column = Vec<(usize, u32)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Generator,
    Relation,
}

/// One element of the grade multiset, with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradeEntry {
    pub grade: Grade,
    pub role: Role,
    pub index: usize,
}

/// A graded matrix over GF(p): rows are generators, columns are relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPresentation {
    field: PrimeField,
    row_grades: Vec<Grade>,
    col_grades: Vec<Grade>,
    columns: Vec<Column>,
}

impl GradedPresentation {
    /// Validates and builds a presentation. Column entries are sorted by row.
    pub fn new(
        characteristic: u64,
        row_grades: Vec<Grade>,
        col_grades: Vec<Grade>,
        mut columns: Vec<Column>,
    ) -> Result<Self> {
        let field = PrimeField::new(characteristic)?;
        if columns.len() != col_grades.len() {
            return Err(Error::Contract(format!(
                "{} columns but {} relation grades",
                columns.len(),
                col_grades.len()
            )));
        }
        for (j, column) in columns.iter_mut().enumerate() {
            column.sort_unstable_by_key(|&(i, _)| i);
            for w in column.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::Contract(format!("row {} repeated in column {j}", w[0].0)));
                }
            }
            for &(i, c) in column.iter() {
                if i >= row_grades.len() {
                    return Err(Error::IndexOutOfRange {
                        line: 0,
                        index: i,
                        rows: row_grades.len(),
                    });
                }
                if c == 0 || c >= field.p {
                    return Err(Error::Contract(format!(
                        "coefficient {c} at ({i}, {j}) is not a nonzero residue"
                    )));
                }
                if !row_grades[i].precedes(&col_grades[j]) {
                    return Err(Error::GradeCondition { row: i, col: j });
                }
            }
        }
        Ok(GradedPresentation {
            field,
            row_grades,
            col_grades,
            columns,
        })
    }

    pub fn empty() -> Self {
        GradedPresentation {
            field: PrimeField { p: 2 },
            row_grades: Vec::new(),
            col_grades: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn row_grades(&self) -> &[Grade] {
        &self.row_grades
    }

    pub fn col_grades(&self) -> &[Grade] {
        &self.col_grades
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn num_generators(&self) -> usize {
        self.row_grades.len()
    }

    pub fn num_relations(&self) -> usize {
        self.col_grades.len()
    }

    /// Applies `f` to every grade and revalidates the result.
    pub fn map_grades(&self, f: impl Fn(&Grade) -> Grade) -> Result<Self> {
        GradedPresentation::new(
            self.field.p as u64,
            self.row_grades.iter().map(&f).collect(),
            self.col_grades.iter().map(&f).collect(),
            self.columns.clone(),
        )
    }

    /// The grade multiset: generators first, then relations, in index order.
    pub fn grades(&self) -> Vec<GradeEntry> {
        let rows = self.row_grades.iter().enumerate().map(|(index, g)| GradeEntry {
            grade: g.clone(),
            role: Role::Generator,
            index,
        });
        let cols = self.col_grades.iter().enumerate().map(|(index, g)| GradeEntry {
            grade: g.clone(),
            role: Role::Relation,
            index,
        });
        rows.chain(cols).collect()
    }
}

impl fmt::Display for GradedPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bpres 1")?;
        writeln!(f, "field {}", self.field.p)?;
        writeln!(f, "generators {}", self.row_grades.len())?;
        for g in &self.row_grades {
            writeln!(f, "{} {}", g.x, g.y)?;
        }
        writeln!(f, "relations {}", self.col_grades.len())?;
        for (g, column) in self.col_grades.iter().zip(&self.columns) {
            write!(f, "{} {} ;", g.x, g.y)?;
            for (i, c) in column {
                write!(f, " {i}:{c}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Whitespace-separated tokens with their 1-based column.
fn tokens(text: &str, offset: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((offset + s + 1, &text[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((offset + s + 1, &text[s..]));
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-blank line with comments removed, and its 1-based number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            if !line.trim().is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next_content()
            .ok_or_else(|| Error::syntax(self.last + 1, 1, format!("unexpected end of input, expected {what}")))
    }
}

fn parse_count(line: usize, toks: &[(usize, &str)], keyword: &str) -> Result<usize> {
    match toks {
        [(_, k), (col, n)] if *k == keyword => n
            .parse::<usize>()
            .map_err(|_| Error::syntax(line, *col, format!("invalid count `{n}`"))),
        [(col, _), ..] => Err(Error::syntax(line, *col, format!("expected `{keyword} <count>`"))),
        [] => Err(Error::syntax(line, 1, format!("expected `{keyword} <count>`"))),
    }
}

fn parse_number(line: usize, col: usize, text: &str) -> Result<Rational> {
    parse_rational(text).map_err(|e| Error::syntax(line, col, e.to_string()))
}

fn parse_grade(line: usize, toks: &[(usize, &str)]) -> Result<Grade> {
    match toks {
        [(cx, x), (cy, y)] => Ok(Grade::new(parse_number(line, *cx, x)?, parse_number(line, *cy, y)?)),
        [] => Err(Error::syntax(line, 1, "expected a grade `<x> <y>`")),
        [_] => Err(Error::syntax(line, toks[0].0, "expected a grade `<x> <y>`")),
        [_, _, (col, _), ..] => Err(Error::syntax(line, *col, "unexpected token after grade")),
    }
}

/// Parses the `bpres` text format.
pub fn parse_presentation(text: &str) -> Result<GradedPresentation> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };

    let (n, header) = lines.expect("`bpres 1` header")?;
    match tokens(header, 0).as_slice() {
        [(_, "bpres"), (_, "1")] => {}
        [(_, "bpres"), (col, v)] => return Err(Error::syntax(n, *col, format!("unsupported version `{v}`"))),
        toks => {
            let col = toks.first().map_or(1, |t| t.0);
            return Err(Error::syntax(n, col, "expected `bpres 1` header"));
        }
    }

    let (mut n, mut line) = lines.expect("`field` or `generators`")?;
    let mut toks = tokens(line, 0);
    let mut characteristic = 2u64;
    if toks.first().map(|t| t.1) == Some("field") {
        characteristic = match toks.as_slice() {
            [_, (col, p)] => p
                .parse::<u64>()
                .map_err(|_| Error::syntax(n, *col, format!("invalid field characteristic `{p}`")))?,
            _ => return Err(Error::syntax(n, 1, "expected `field <prime>`")),
        };
        PrimeField::new(characteristic)?;
        (n, line) = lines.expect("`generators <k>`")?;
        toks = tokens(line, 0);
    }
    let field = PrimeField::new(characteristic)?;

    let k = parse_count(n, &toks, "generators")?;
    let mut row_grades = Vec::with_capacity(k);
    for _ in 0..k {
        let (n, line) = lines.expect("a generator grade")?;
        row_grades.push(parse_grade(n, &tokens(line, 0))?);
    }

    let (n, line) = lines.expect("`relations <m>`")?;
    let m = parse_count(n, &tokens(line, 0), "relations")?;
    let mut col_grades = Vec::with_capacity(m);
    let mut columns = Vec::with_capacity(m);
    for j in 0..m {
        let (n, line) = lines.expect("a relation")?;
        let (grade_part, entry_part, entry_offset) = match line.find(';') {
            Some(pos) => (&line[..pos], &line[pos + 1..], pos + 1),
            None => (line, "", line.len()),
        };
        let grade = parse_grade(n, &tokens(grade_part, 0))?;
        let mut column: Column = Vec::new();
        for (col, entry) in tokens(entry_part, entry_offset) {
            let (idx, coeff) = entry
                .split_once(':')
                .ok_or_else(|| Error::syntax(n, col, format!("expected `<row>:<coeff>`, got `{entry}`")))?;
            let i = idx
                .parse::<usize>()
                .map_err(|_| Error::syntax(n, col, format!("invalid row index `{idx}`")))?;
            let c = coeff
                .parse::<i64>()
                .map_err(|_| Error::syntax(n, col, format!("invalid coefficient `{coeff}`")))?;
            if i >= k {
                return Err(Error::IndexOutOfRange {
                    line: n,
                    index: i,
                    rows: k,
                });
            }
            let c = field.reduce(c);
            if c == 0 {
                return Err(Error::syntax(
                    n,
                    col,
                    format!("coefficient of row {i} is zero in GF({characteristic})"),
                ));
            }
            if column.iter().any(|&(r, _)| r == i) {
                return Err(Error::syntax(n, col, format!("row {i} repeated")));
            }
            if !row_grades[i].precedes(&grade) {
                return Err(Error::GradeCondition { row: i, col: j });
            }
            column.push((i, c));
        }
        col_grades.push(grade);
        columns.push(column);
    }

    if let Some((n, line)) = lines.next_content() {
        let col = tokens(line, 0).first().map_or(1, |t| t.0);
        return Err(Error::syntax(n, col, "unexpected content after the last relation"));
    }

    GradedPresentation::new(characteristic, row_grades, col_grades, columns)
}
