use crate::error::{invalid, Result};
use crate::numkit::special::factorial;
use crate::numkit::{CMat, C64};
use num_bigint::BigUint;
use num_traits::One;

/// Integer partition with parts in non-increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|p| p[1] > p[0]) {
            return invalid(format!("parts {parts:?} are not non-increasing"));
        }
        if parts.contains(&0) {
            return invalid("zero part inside a partition");
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of non-zero parts.
    pub fn length(&self) -> usize {
        self.0.len()
    }

    pub fn conjugate(&self) -> Partition {
        let first = self.0.first().copied().unwrap_or(0);
        Partition((0..first).map(|j| self.0.iter().filter(|&&p| p > j).count()).collect())
    }

    /// Side of the Durfee square.
    pub fn rank(&self) -> usize {
        self.0.iter().enumerate().take_while(|(i, &p)| p > *i).count()
    }

    /// Frobenius coordinates `(a, b)`: arm and leg lengths along the diagonal.
    pub fn frobenius(&self) -> (Vec<usize>, Vec<usize>) {
        let r = self.rank();
        let conj = self.conjugate();
        let a = (0..r).map(|i| self.0[i] - i - 1).collect();
        let b = (0..r).map(|i| conj.0[i] - i - 1).collect();
        (a, b)
    }

    pub fn from_frobenius(a: &[usize], b: &[usize]) -> Result<Self> {
        if a.len() != b.len() {
            return invalid("Frobenius coordinates must have equal length");
        }
        if a.windows(2).any(|p| p[1] >= p[0]) || b.windows(2).any(|p| p[1] >= p[0]) {
            return invalid("Frobenius coordinates must be strictly decreasing");
        }
        let r = a.len();
        let rows = r + b.first().copied().unwrap_or(0);
        let parts = (0..rows)
            .map(|i| {
                if i < r {
                    i + a[i] + 1
                } else {
                    (0..r).filter(|&j| i - j <= b[j]).count()
                }
            })
            .collect();
        Partition::new(parts)
    }

    /// Number of standard Young tableaux, `n! / prod(hooks)`, exactly.
    pub fn dimension(&self) -> BigUint {
        let conj = self.conjugate();
        let mut num: BigUint = One::one();
        for k in 2..=self.weight() {
            num *= BigUint::from(k);
        }
        let mut den: BigUint = One::one();
        for (i, &row) in self.0.iter().enumerate() {
            for j in 0..row {
                den *= BigUint::from((row - j - 1) + (conj.0[j] - i - 1) + 1);
            }
        }
        num / den
    }

    /// `dim / n!` from the Frobenius determinant
    /// `det[1 / ((a_i + b_j + 1) a_i! b_j!)]`.
    pub fn frobenius_ratio(&self) -> f64 {
        let (a, b) = self.frobenius();
        let r = a.len();
        let m = CMat::from_fn(r, r, |i, j| {
            C64::new(
                1.0 / ((a[i] + b[j] + 1) as f64 * factorial(a[i]) * factorial(b[j])),
                0.0,
            )
        });
        crate::numkit::linalg::det(&m, "Frobenius determinant").map_or(f64::NAN, |d| d.re)
    }

    /// All partitions of `n` in reverse lexicographic order.
    pub fn all_of_weight(n: usize) -> Vec<Partition> {
        fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=rem.min(max)).rev() {
                cur.push(p);
                rec(rem - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }
}
