//! Exact feasibility of `{x >= 0 : A x = b}` by phase-one simplex.
//!
//! Only used for the small systems that arise when checking how two cones
//! meet, so the tableau is dense and uses `Ratio<i128>` with Bland's rule.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

type Q = Ratio<i128>;

pub(crate) fn feasible(a: &[Vec<i64>], b: &[i64]) -> bool {
    let m = a.len();
    if m == 0 {
        return true;
    }
    let n = a[0].len();
    // columns: n originals, m artificials, then rhs
    let width = n + m + 1;
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(m + 1);
    for (i, row) in a.iter().enumerate() {
        let sign = if b[i] < 0 { -1 } else { 1 };
        let mut r = vec![Q::zero(); width];
        for (j, &v) in row.iter().enumerate() {
            r[j] = Q::from_integer((sign * v) as i128);
        }
        r[n + i] = Q::one();
        r[width - 1] = Q::from_integer((sign * b[i]) as i128);
        t.push(r);
    }
    // objective: minimise the sum of artificials, kept as reduced costs
    let mut obj = vec![Q::zero(); width];
    for r in &t {
        for j in 0..n {
            obj[j] -= r[j];
        }
        obj[width - 1] -= r[width - 1];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    while let Some(col) = (0..n + m).find(|&j| obj[j].is_negative()) {
        let mut pivot: Option<(usize, Q)> = None;
        for i in 0..m {
            if t[i][col].is_positive() {
                let ratio = t[i][width - 1] / t[i][col];
                let better = match &pivot {
                    None => true,
                    Some((pi, pr)) => ratio < *pr || (ratio == *pr && basis[i] < basis[*pi]),
                };
                if better {
                    pivot = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = pivot else {
            // unbounded below cannot happen for phase one
            break;
        };
        let p = t[row][col];
        for v in t[row].iter_mut() {
            *v /= p;
        }
        let prow = t[row].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != row && !r[col].is_zero() {
                let f = r[col];
                for (v, pv) in r.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
            }
        }
        let f = obj[col];
        for (v, pv) in obj.iter_mut().zip(&prow) {
            *v -= f * pv;
        }
        basis[row] = col;
    }
    obj[width - 1].is_zero()
}
