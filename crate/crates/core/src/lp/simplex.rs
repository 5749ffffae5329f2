//! Dense phase-one simplex for `{Ax = 1, x ≥ 0}` with 0/1 columns.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) trait Scalar: Clone + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    /// Usable as a pivot in the ratio test.
    fn pivotable(&self) -> bool;
    /// A reduced cost that improves the objective.
    fn improving(&self) -> bool;
    /// Phase-one objective bounded away from zero.
    fn positive(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn lt(&self, o: &Self) -> bool;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn pivotable(&self) -> bool {
        *self > 1e-10
    }
    fn improving(&self) -> bool {
        *self < -1e-9
    }
    fn positive(&self) -> bool {
        *self > 1e-9
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn pivotable(&self) -> bool {
        self.is_positive()
    }
    fn improving(&self) -> bool {
        self.is_negative()
    }
    fn positive(&self) -> bool {
        self.is_positive()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

pub(crate) fn rational(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

pub(crate) enum Outcome<S> {
    Feasible(Vec<S>),
    /// Farkas vector over rows: `yᵀA ≤ 0` columnwise and `Σy > 0`.
    Infeasible(Vec<S>),
    PivotLimit,
}

/// `cols[j]` lists the rows where column `j` has a one.
pub(crate) fn phase_one<S: Scalar>(
    rows: usize,
    cols: &[Vec<u32>],
    max_pivots: usize,
) -> Outcome<S> {
    let nc = cols.len();
    let width = nc + rows + 1;
    let rhs = width - 1;
    let mut tab = vec![S::zero(); rows * width];
    for (j, col) in cols.iter().enumerate() {
        for &i in col {
            tab[i as usize * width + j] = S::one();
        }
    }
    for i in 0..rows {
        tab[i * width + nc + i] = S::one();
        tab[i * width + rhs] = S::one();
    }
    // Reduced costs, with the negated objective in the last slot.
    let mut cost = vec![S::zero(); width];
    for (j, col) in cols.iter().enumerate() {
        let mut c = S::zero();
        for _ in col {
            c = c.sub(&S::one());
        }
        cost[j] = c;
    }
    let mut obj = S::zero();
    for _ in 0..rows {
        obj = obj.sub(&S::one());
    }
    cost[rhs] = obj;
    let mut basis: Vec<usize> = (nc..nc + rows).collect();

    let mut bland = false;
    let mut degenerate = 0usize;
    let mut pivots = 0usize;
    loop {
        let entering = if bland {
            (0..rhs).find(|&j| cost[j].improving())
        } else {
            let mut best: Option<usize> = None;
            for j in 0..rhs {
                if cost[j].improving() && best.is_none_or(|b| cost[j].lt(&cost[b])) {
                    best = Some(j);
                }
            }
            best
        };
        let Some(j) = entering else { break };
        let mut leave: Option<(usize, S)> = None;
        for i in 0..rows {
            let a = &tab[i * width + j];
            if !a.pivotable() {
                continue;
            }
            let ratio = tab[i * width + rhs].div(a);
            let better = match &leave {
                None => true,
                Some((r, best)) => ratio.lt(best) || (!best.lt(&ratio) && basis[i] < basis[*r]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // Phase one is bounded below, so a column with no pivot cannot improve.
        let Some((r, ratio)) = leave else {
            cost[j] = S::zero();
            continue;
        };
        if pivots >= max_pivots {
            return Outcome::PivotLimit;
        }
        pivots += 1;
        if ratio.is_zero() || !ratio.positive() {
            degenerate += 1;
            if degenerate >= 50 {
                bland = true;
            }
        } else {
            degenerate = 0;
            bland = false;
        }
        pivot(&mut tab, &mut cost, width, rows, r, j);
        basis[r] = j;
    }

    let mut objective = S::zero();
    for (i, &b) in basis.iter().enumerate() {
        if b >= nc {
            objective = objective.add(&tab[i * width + rhs]);
        }
    }
    if objective.positive() {
        let y = (0..rows).map(|i| S::one().sub(&cost[nc + i])).collect();
        Outcome::Infeasible(y)
    } else {
        let mut x = vec![S::zero(); nc];
        for (i, &b) in basis.iter().enumerate() {
            if b < nc {
                x[b] = tab[i * width + rhs].clone();
            }
        }
        Outcome::Feasible(x)
    }
}

fn pivot<S: Scalar>(tab: &mut [S], cost: &mut [S], width: usize, rows: usize, r: usize, j: usize) {
    let p = tab[r * width + j].clone();
    let (before, rest) = tab.split_at_mut(r * width);
    let (prow, after) = rest.split_at_mut(width);
    for v in prow.iter_mut() {
        if !v.is_zero() {
            *v = v.div(&p);
        }
    }
    let nz: Vec<usize> = (0..width).filter(|&k| !prow[k].is_zero()).collect();
    let eliminate = |row: &mut [S]| {
        let f = row[j].clone();
        if f.is_zero() {
            return;
        }
        for &k in &nz {
            row[k] = row[k].sub(&f.mul(&prow[k]));
        }
        row[j] = S::zero();
    };
    for row in before.chunks_mut(width).chain(after.chunks_mut(width)) {
        eliminate(row);
    }
    eliminate(cost);
    debug_assert_eq!(before.len() / width + 1 + after.len() / width, rows);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols(v: &[&[u32]]) -> Vec<Vec<u32>> {
        v.iter().map(|c| c.to_vec()).collect()
    }

    #[test]
    fn single_triangle() {
        match phase_one::<f64>(3, &cols(&[&[0, 1, 2]]), 100) {
            Outcome::Feasible(x) => assert_eq!(x, vec![1.0]),
            _ => panic!(),
        }
    }

    #[test]
    fn pendant_row_is_certified() {
        // Rows 0..3 a triangle, row 3 an edge in no column.
        match phase_one::<BigRational>(4, &cols(&[&[0, 1, 2]]), 100) {
            Outcome::Infeasible(y) => {
                let col: BigRational = y[0].clone() + &y[1] + &y[2];
                assert!(col <= rational(0));
                let s: BigRational = y.iter().sum();
                assert!(s > rational(0));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn k4_exact() {
        // Edges of K4 in lex order: 01 02 03 12 13 23; triangles 012 013 023 123.
        let c = cols(&[&[0, 1, 3], &[0, 2, 4], &[1, 2, 5], &[3, 4, 5]]);
        match phase_one::<BigRational>(6, &c, 100) {
            Outcome::Feasible(x) => {
                for (e, rows) in [[0usize, 1], [0, 2], [1, 2], [0, 3], [1, 3], [2, 3]]
                    .iter()
                    .enumerate()
                {
                    let s: BigRational = rows.iter().map(|&t| x[t].clone()).sum();
                    assert_eq!(s, rational(1), "edge {e}");
                }
            }
            _ => panic!(),
        }
    }
}
