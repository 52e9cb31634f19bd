#![allow(dead_code)]

use matchdist::diagram::Bar;
use matchdist::numeric::{ratio, Extended, ExtendedRational, Rational};
use matchdist::presentation::{parse_presentation, Grade, GradedPresentation};
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const EXAMPLE: &str = "bpres 1\ngenerators 1\n0 0\nrelations 2\n1 0 ; 0:1\n0 1 ; 0:1\n";
pub const EMPTY: &str = "bpres 1\ngenerators 0\nrelations 0\n";
pub const FREE: &str = "bpres 1\ngenerators 1\n0 0\nrelations 0\n";

pub fn example() -> GradedPresentation {
    parse_presentation(EXAMPLE).unwrap()
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(0..=16), rng.gen_range(1..=8))
}

pub fn random_grade(rng: &mut ChaCha8Rng) -> Grade {
    Grade::new(random_rational(rng), random_rational(rng))
}

/// At most four generators and relations in total, every generator
/// eventually killed, grades with denominators at most 8.
pub fn random_module(rng: &mut ChaCha8Rng) -> GradedPresentation {
    let rows = rng.gen_range(1..=2usize);
    let cols = if rows == 1 { rng.gen_range(1..=3usize) } else { 2 };
    let row_grades: Vec<Grade> = (0..rows).map(|_| random_grade(rng)).collect();
    let patterns: Vec<Vec<usize>> = if rows == 1 {
        vec![vec![0]; cols]
    } else {
        // two distinct nonzero vectors of GF(2)^2 span it
        let all = [vec![0], vec![1], vec![0, 1]];
        let first = rng.gen_range(0..3);
        let second = (first + rng.gen_range(1..3)) % 3;
        vec![all[first].clone(), all[second].clone()]
    };
    let mut col_grades = Vec::new();
    let mut columns = Vec::new();
    for used in patterns {
        let join = used.iter().fold(None::<Grade>, |acc, &i| {
            let g = &row_grades[i];
            Some(match acc {
                None => g.clone(),
                Some(a) => Grade::new(a.x.max(g.x.clone()), a.y.max(g.y.clone())),
            })
        });
        let join = join.unwrap();
        col_grades.push(Grade::new(join.x + random_rational(rng), join.y + random_rational(rng)));
        columns.push(used.into_iter().map(|i| (i, 1)).collect());
    }
    GradedPresentation::new(2, row_grades, col_grades, columns).unwrap()
}

pub fn random_bars(rng: &mut ChaCha8Rng, max: usize) -> Vec<Bar<Rational>> {
    let n = rng.gen_range(0..=max);
    (0..n)
        .map(|_| {
            let birth = ratio(rng.gen_range(-8..=8), rng.gen_range(1..=4));
            let death = if rng.gen_bool(0.2) {
                None
            } else {
                Some(&birth + ratio(rng.gen_range(1..=12), rng.gen_range(1..=4)))
            };
            Bar::new(birth, death)
        })
        .collect()
}

fn half(bar: &Bar<Rational>) -> ExtendedRational {
    match &bar.death {
        Some(d) => Extended::Finite((d - &bar.birth) / ratio(2, 1)),
        None => Extended::Infinite,
    }
}

fn pair_cost(a: &Bar<Rational>, b: &Bar<Rational>) -> ExtendedRational {
    let birth = Extended::Finite((&a.birth - &b.birth).abs());
    let death = match (&a.death, &b.death) {
        (Some(x), Some(y)) => Extended::Finite((x - y).abs()),
        (None, None) => Extended::Finite(Rational::zero()),
        _ => Extended::Infinite,
    };
    birth.max(death)
}

/// Minimum over every partial bijection of the largest cost, by exhaustion.
pub fn brute_force_bottleneck(a: &[Bar<Rational>], b: &[Bar<Rational>]) -> ExtendedRational {
    fn go(
        i: usize,
        a: &[Bar<Rational>],
        b: &[Bar<Rational>],
        used: &mut Vec<bool>,
        acc: ExtendedRational,
    ) -> ExtendedRational {
        if i == a.len() {
            let rest = b
                .iter()
                .zip(used.iter())
                .filter(|(_, u)| !**u)
                .map(|(y, _)| half(y))
                .fold(acc, |m, c| m.max(c));
            return rest;
        }
        let mut best = go(i + 1, a, b, used, acc.clone().max(half(&a[i])));
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                let c = acc.clone().max(pair_cost(&a[i], &b[j]));
                best = best.min(go(i + 1, a, b, used, c));
                used[j] = false;
            }
        }
        best
    }
    go(0, a, b, &mut vec![false; b.len()], Extended::Finite(Rational::zero()))
}
