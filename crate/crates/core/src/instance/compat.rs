use serde::Serialize;

use super::{DarpInstance, Loc};

/// Pairwise path-feasibility flags.
///
/// `f1(i, j)`: the path `j+ → i+ → j- → i-` is schedulable.
/// `f2(i, j)`: the path `j+ → i+ → i- → j-` is schedulable.
///
/// Indices are request ids; index `0` stands for the depot and is always
/// `true`. The diagonal `i == j` is never queried and is `false`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompatFlags {
    n: usize,
    f1: Vec<bool>,
    f2: Vec<bool>,
}

impl CompatFlags {
    #[inline]
    pub fn f1(&self, i: usize, j: usize) -> bool {
        if i == 0 || j == 0 {
            return true;
        }
        self.f1[(i - 1) * self.n + (j - 1)]
    }

    #[inline]
    pub fn f2(&self, i: usize, j: usize) -> bool {
        if i == 0 || j == 0 {
            return true;
        }
        self.f2[(i - 1) * self.n + (j - 1)]
    }

    /// Whether `i` and `j` can ever be on board at the same time.
    pub fn can_share(&self, i: usize, j: usize) -> bool {
        self.f1(i, j) || self.f2(i, j) || self.f1(j, i) || self.f2(j, i)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Flags with every off-diagonal pair feasible (used by tests and for
    /// measuring graph-size bounds).
    pub fn all_true(n: usize) -> Self {
        let grid: Vec<bool> = (0..n * n).map(|k| k / n != k % n).collect();
        CompatFlags {
            n,
            f1: grid.clone(),
            f2: grid,
        }
    }
}

/// Evaluates `f1`/`f2` for every ordered pair of distinct requests.
pub fn compat_flags(inst: &DarpInstance) -> CompatFlags {
    let n = inst.n();
    let mut f1 = vec![false; n * n];
    let mut f2 = vec![false; n * n];
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let k = (i - 1) * n + (j - 1);
            let (ip, id, jp, jd) = (Loc::Pickup(i), Loc::Delivery(i), Loc::Pickup(j), Loc::Delivery(j));
            f1[k] = inst.path_feasible(&[jp, ip, jd, id]).unwrap_or(false);
            f2[k] = inst.path_feasible(&[jp, ip, id, jd]).unwrap_or(false);
        }
    }
    CompatFlags { n, f1, f2 }
}
