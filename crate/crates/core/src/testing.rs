//! Proptest strategies shared by unit tests.

use proptest::prelude::*;

use crate::numeric::ratio;
use crate::presentation::{Grade, GradedPresentation};
use crate::slice::Slice;

pub fn arb_grade() -> impl Strategy<Value = Grade> {
    (-8i64..8, 1i64..5, -8i64..8, 1i64..5).prop_map(|(a, b, c, d)| Grade::new(ratio(a, b), ratio(c, d)))
}

pub fn arb_slice() -> impl Strategy<Value = Slice> {
    (1i64..30, 1i64..10, -20i64..20, 1i64..6).prop_map(|(a, b, c, d)| Slice::new(ratio(a, b), ratio(c, d)).unwrap())
}

/// Random presentations over GF(2); each relation is lifted to the join of
/// the generators it uses so the grade condition holds.
pub fn arb_presentation(max_rows: usize, max_cols: usize) -> impl Strategy<Value = GradedPresentation> {
    (
        prop::collection::vec(arb_grade(), 0..=max_rows),
        prop::collection::vec((arb_grade(), any::<u32>()), 0..=max_cols),
    )
        .prop_map(|(rows, cols)| {
            let mut col_grades = Vec::new();
            let mut columns = Vec::new();
            for (mut cg, bits) in cols {
                let mut column = Vec::new();
                for (i, rg) in rows.iter().enumerate() {
                    if bits >> i & 1 == 1 {
                        cg = Grade::new(cg.x.clone().max(rg.x.clone()), cg.y.clone().max(rg.y.clone()));
                        column.push((i, 1));
                    }
                }
                col_grades.push(cg);
                columns.push(column);
            }
            GradedPresentation::new(2, rows, col_grades, columns).unwrap()
        })
}
