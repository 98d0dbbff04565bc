use std::fmt;
use std::ops::{Index, Mul};

use super::scalar::gcd_i128;
use super::ExactScalar;

/// Amplitudes of `|q1>`, `|q2>`, `|q3>`. May be sub-normalized.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Amp3(pub [ExactScalar; 3]);

impl Amp3 {
    pub fn new(a: ExactScalar, b: ExactScalar, c: ExactScalar) -> Self {
        Amp3([a, b, c])
    }

    pub fn from_ints(a: i64, b: i64, c: i64) -> Self {
        Amp3([a.into(), b.into(), c.into()])
    }

    pub fn basis(i: usize) -> Self {
        let mut v = Amp3::default();
        v.0[i] = ExactScalar::one();
        v
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        Amp3([&self.0[0] * c, &self.0[1] * c, &self.0[2] * c])
    }

    pub fn squared_norm(&self) -> ExactScalar {
        ExactScalar::dot(self.0.iter().zip(&self.0))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(ExactScalar::is_zero)
    }
}

impl Index<usize> for Amp3 {
    type Output = ExactScalar;
    fn index(&self, i: usize) -> &ExactScalar {
        &self.0[i]
    }
}

impl fmt::Display for Amp3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Debug for Amp3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `|psi0> = (1, 0, 0)`, the state the initialize operator produces.
pub fn initialize() -> Amp3 {
    Amp3::basis(0)
}

pub fn squared_norm(v: &Amp3) -> ExactScalar {
    v.squared_norm()
}

/// A matrix written as `rows / den` with integer entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct IntMat3 {
    rows: [[i64; 3]; 3],
    den: i64,
}

/// `nums / den` before reduction to lowest terms.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RawAmp3 {
    nums: [i128; 3],
    den: i128,
}

impl RawAmp3 {
    pub(crate) fn squared_norm(&self) -> Option<ExactScalar> {
        let mut sq: i128 = 0;
        for p in self.nums {
            sq = sq.checked_add(p.checked_mul(p)?)?;
        }
        Some(ExactScalar::from_i128_ratio(sq, self.den.checked_mul(self.den)?))
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.nums == [0; 3]
    }

    pub(crate) fn reduce(&self) -> Amp3 {
        Amp3(self.nums.map(|p| ExactScalar::from_i128_ratio(p, self.den)))
    }
}

impl IntMat3 {
    /// `M v` in integer arithmetic over a common denominator. `None` when an
    /// intermediate would not fit, so callers fall back to the general
    /// rational path.
    pub(crate) fn mul_vec_raw(&self, v: &Amp3) -> Option<RawAmp3> {
        let [(n0, d0), (n1, d1), (n2, d2)] = [v.0[0].as_small()?, v.0[1].as_small()?, v.0[2].as_small()?];
        let d = i64::try_from(d0).ok()?;
        let mut d = d;
        for di in [d1, d2] {
            let di = i64::try_from(di).ok()?;
            if di != d {
                let g = gcd_i128(d as i128, di as i128) as i64;
                d = d.checked_mul(di / g)?;
            }
        }
        let scaled = |n: i128, di: i128| {
            let f = d / di as i64;
            if f == 1 {
                i64::try_from(n).ok()
            } else {
                i64::try_from(n.checked_mul(f as i128)?).ok()
            }
        };
        let xs = [scaled(n0, d0)?, scaled(n1, d1)?, scaled(n2, d2)?];
        let mut nums: [i128; 3] = [0; 3];
        for (out, row) in nums.iter_mut().zip(&self.rows) {
            let mut acc: i128 = 0;
            for (&k, &x) in row.iter().zip(&xs) {
                acc = acc.checked_add(k as i128 * x as i128)?;
            }
            *out = acc;
        }
        Some(RawAmp3 { nums, den: self.den as i128 * d as i128 })
    }
}

/// Row-major 3x3 rational matrix.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Mat3(pub [[ExactScalar; 3]; 3]);

impl Mat3 {
    pub fn identity() -> Self {
        Self::scaled_ints(1, 1, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    /// `(num/den) * rows`, the shape every protocol matrix is printed in.
    pub fn scaled_ints(num: i64, den: i64, rows: [[i64; 3]; 3]) -> Self {
        let c = ExactScalar::new(num, den);
        Mat3(rows.map(|r| r.map(|x| &ExactScalar::from_integer(x) * &c)))
    }

    /// The entries as integers over their least common denominator, if they fit in `i64`.
    pub(crate) fn integer_form(&self) -> Option<IntMat3> {
        let mut den: i128 = 1;
        for x in self.0.iter().flatten() {
            let (_, d) = x.as_small()?;
            den = den.checked_mul(d / gcd_i128(den, d))?;
        }
        let mut rows = [[0i64; 3]; 3];
        for (out, row) in rows.iter_mut().zip(&self.0) {
            for (o, x) in out.iter_mut().zip(row) {
                let (n, d) = x.as_small()?;
                *o = i64::try_from(n.checked_mul(den / d)?).ok()?;
            }
        }
        Some(IntMat3 { rows, den: i64::try_from(den).ok()? })
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat3(std::array::from_fn(|i| std::array::from_fn(|j| m[j][i].clone())))
    }

    pub fn mul_vec(&self, v: &Amp3) -> Amp3 {
        Amp3(std::array::from_fn(|i| ExactScalar::dot(self.0[i].iter().zip(&v.0))))
    }

    pub fn mul_mat(&self, other: &Mat3) -> Mat3 {
        Mat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..3).map(|k| &self.0[i][k] * &other.0[k][j]).sum())
        }))
    }

    pub fn add(&self, other: &Mat3) -> Mat3 {
        Mat3(std::array::from_fn(|i| std::array::from_fn(|j| &self.0[i][j] + &other.0[i][j])))
    }
}

impl Mul<&Amp3> for &Mat3 {
    type Output = Amp3;
    fn mul(self, v: &Amp3) -> Amp3 {
        self.mul_vec(v)
    }
}

impl fmt::Debug for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0 {
            writeln!(f, "[{}, {}, {}]", row[0], row[1], row[2])?;
        }
        Ok(())
    }
}
