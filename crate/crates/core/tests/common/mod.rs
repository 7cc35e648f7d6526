#![allow(dead_code)]

use std::collections::BTreeMap;

use quadmot::coefficients::{CoefficientRing, RingElement};
use quadmot::homotopy::TateComplex;
use quadmot::tatecat::{GradedMatrix, Matrix, TateObject};
use rand::Rng;

/// A complex built as a sum of isolated units and two-term arrows, then
/// scrambled by random basis changes. Returns the complex and the homology a
/// field would see: one class per isolated unit, arrows with unit labels contribute nothing.
pub struct Sample {
    pub complex: TateComplex,
    pub homology: BTreeMap<(i64, i64), usize>,
}

pub const DEGREES: std::ops::RangeInclusive<i64> = -1..=2;
pub const TWISTS: std::ops::RangeInclusive<i64> = 0..=2;
pub const MAX_RANK: usize = 3;

fn random_scalar(rng: &mut impl Rng, ring: CoefficientRing) -> RingElement {
    match ring {
        CoefficientRing::Gf2 => ring.one(),
        _ => {
            let choices = [1, -1, 2, -3, 5];
            ring.from_i64(choices[rng.gen_range(0..choices.len())])
        }
    }
}

fn random_coeff(rng: &mut impl Rng, ring: CoefficientRing) -> RingElement {
    match ring {
        CoefficientRing::Gf2 => ring.from_i64(rng.gen_range(0..2)),
        _ => ring.from_i64(rng.gen_range(-2..=2)),
    }
}

/// (g, g⁻¹) as a product of elementary row operations.
fn random_automorphism(rng: &mut impl Rng, ring: CoefficientRing, r: usize) -> (Matrix, Matrix) {
    let mut g = Matrix::identity(ring, r);
    let mut inv = Matrix::identity(ring, r);
    if r < 2 {
        return (g, inv);
    }
    for _ in 0..rng.gen_range(0..4) {
        let i = rng.gen_range(0..r);
        let mut j = rng.gen_range(0..r);
        if i == j {
            j = (j + 1) % r;
        }
        let c = random_coeff(rng, ring);
        let mut e = Matrix::identity(ring, r);
        e.set(i, j, c.clone());
        let mut e_inv = Matrix::identity(ring, r);
        e_inv.set(i, j, -&c);
        g = e.mul(&g);
        inv = inv.mul(&e_inv);
    }
    (g, inv)
}

pub fn random_complex(rng: &mut impl Rng, ring: CoefficientRing) -> Sample {
    // (degree, twist) → list of (piece id, role)
    let mut ranks: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut entries: Vec<(i64, i64, usize, usize, RingElement)> = vec![];
    let mut homology = BTreeMap::new();
    let pieces = rng.gen_range(0..=5);
    for _ in 0..pieces {
        let deg = rng.gen_range(DEGREES);
        let twist = rng.gen_range(TWISTS);
        let arrow = rng.gen_bool(0.5) && deg > *DEGREES.start();
        if arrow {
            let (top, bottom) = ((deg, twist), (deg - 1, twist));
            if ranks.get(&top).copied().unwrap_or(0) >= MAX_RANK
                || ranks.get(&bottom).copied().unwrap_or(0) >= MAX_RANK
            {
                continue;
            }
            let col = *ranks.entry(top).or_insert(0);
            let row = *ranks.entry(bottom).or_insert(0);
            *ranks.get_mut(&top).unwrap() += 1;
            *ranks.get_mut(&bottom).unwrap() += 1;
            entries.push((deg, twist, row, col, random_scalar(rng, ring)));
        } else {
            let slot = ranks.entry((deg, twist)).or_insert(0);
            if *slot >= MAX_RANK {
                continue;
            }
            *slot += 1;
            *homology.entry((deg, twist)).or_insert(0) += 1;
        }
    }

    let mut terms: BTreeMap<i64, TateObject> = BTreeMap::new();
    for (&(d, t), &r) in &ranks {
        let x = terms.entry(d).or_insert_with(|| TateObject::zero(ring));
        *x = x.direct_sum(&TateObject::from_ranks(ring, [(t, r)]));
    }
    let rank = |d: i64, t: i64| ranks.get(&(d, t)).copied().unwrap_or(0);
    let mut autos = BTreeMap::new();
    for (&(d, t), &r) in &ranks {
        autos.insert((d, t), random_automorphism(rng, ring, r));
    }
    let mut blocks: BTreeMap<(i64, i64), Matrix> = BTreeMap::new();
    for (d, t, row, col, s) in entries {
        let m = blocks
            .entry((d, t))
            .or_insert_with(|| Matrix::zeros(ring, rank(d - 1, t), rank(d, t)));
        m.set(row, col, s);
    }
    let mut diffs = BTreeMap::new();
    let zero = TateObject::zero(ring);
    for (&d, src) in &terms {
        let tgt = terms.get(&(d - 1)).unwrap_or(&zero);
        let mut per_twist = BTreeMap::new();
        for (&(bd, t), m) in &blocks {
            if bd != d {
                continue;
            }
            let scrambled = autos[&(d - 1, t)].0.mul(m).mul(&autos[&(d, t)].1);
            per_twist.insert(t, scrambled);
        }
        diffs.insert(d, GradedMatrix::from_blocks(src, tgt, per_twist).unwrap());
    }
    let complex = TateComplex::new(ring, terms, diffs).unwrap();
    Sample { complex, homology }
}

/// Homology of a tensor product over a field: convolution of the tables.
pub fn kunneth(
    a: &BTreeMap<(i64, i64), usize>,
    b: &BTreeMap<(i64, i64), usize>,
) -> BTreeMap<(i64, i64), usize> {
    let mut out = BTreeMap::new();
    for ((d1, t1), r1) in a {
        for ((d2, t2), r2) in b {
            *out.entry((d1 + d2, t1 + t2)).or_insert(0) += r1 * r2;
        }
    }
    out
}
