//! Dense 4×4 complex matrices with partial-pivot LU and a 1-norm condition
//! estimate. The transfer matrices are small and fixed-size, so an explicit
//! array type keeps the hot loop allocation-free.

use num_complex::Complex64;
use std::ops::{Index, IndexMut, Mul};

use crate::error::{Error, Result};

/// Condition number above which an interface inversion is rejected.
pub const MAX_CONDITION: f64 = 1e12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[Complex64; 4]; 4]);

impl Mat4 {
    pub fn zeros() -> Self {
        Mat4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: [[Complex64; 4]; 4]) -> Self {
        Mat4(rows)
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm1(&self) -> f64 {
        (0..4)
            .map(|j| (0..4).map(|i| self.0[i][j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Complex64; 4]) -> [Complex64; 4] {
        let mut y = [ZERO; 4];
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..4).map(|j| self.0[i][j] * x[j]).sum();
        }
        y
    }

    pub fn lu(&self) -> Result<Lu4> {
        Lu4::factor(self)
    }

    /// `self^{-1} * rhs` after checking the condition estimate.
    pub fn solve_mat(&self, rhs: &Mat4) -> Result<Mat4> {
        let lu = self.lu()?;
        lu.check_condition()?;
        Ok(lu.solve_mat(rhs))
    }

    pub fn inverse(&self) -> Result<Mat4> {
        self.solve_mat(&Mat4::identity())
    }
}

impl Index<(usize, usize)> for Mat4 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut out = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        out
    }
}

/// `P A = L U` with unit-diagonal `L` stored below the diagonal.
#[derive(Clone, Copy, Debug)]
pub struct Lu4 {
    lu: [[Complex64; 4]; 4],
    perm: [usize; 4],
    norm1: f64,
}

impl Lu4 {
    fn factor(a: &Mat4) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::IllConditioned {
                condition: f64::INFINITY,
            });
        }
        let mut lu = a.0;
        let mut perm = [0, 1, 2, 3];
        for k in 0..4 {
            let p = (k..4)
                .max_by(|&x, &y| lu[x][k].norm().total_cmp(&lu[y][k].norm()))
                .unwrap_or(k);
            if lu[p][k] == ZERO {
                return Err(Error::IllConditioned {
                    condition: f64::INFINITY,
                });
            }
            lu.swap(k, p);
            perm.swap(k, p);
            let pivot = lu[k][k];
            for i in k + 1..4 {
                let factor = lu[i][k] / pivot;
                lu[i][k] = factor;
                for j in k + 1..4 {
                    let t = lu[k][j];
                    lu[i][j] -= factor * t;
                }
            }
        }
        Ok(Lu4 {
            lu,
            perm,
            norm1: a.norm1(),
        })
    }

    pub fn solve(&self, b: &[Complex64; 4]) -> [Complex64; 4] {
        let mut x = [ZERO; 4];
        for i in 0..4 {
            x[i] = b[self.perm[i]];
        }
        for i in 0..4 {
            for j in 0..i {
                let t = self.lu[i][j] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..4).rev() {
            for j in i + 1..4 {
                let t = self.lu[i][j] * x[j];
                x[i] -= t;
            }
            x[i] /= self.lu[i][i];
        }
        x
    }

    pub fn solve_mat(&self, rhs: &Mat4) -> Mat4 {
        let mut out = Mat4::zeros();
        for j in 0..4 {
            let col = [rhs.0[0][j], rhs.0[1][j], rhs.0[2][j], rhs.0[3][j]];
            let x = self.solve(&col);
            for i in 0..4 {
                out.0[i][j] = x[i];
            }
        }
        out
    }

    /// `||A||_1 ||A^{-1}||_1`, with the inverse formed explicitly (cheap at 4×4).
    pub fn condition(&self) -> f64 {
        let inv = self.solve_mat(&Mat4::identity());
        let c = self.norm1 * inv.norm1();
        if c.is_finite() {
            c
        } else {
            f64::INFINITY
        }
    }

    pub fn check_condition(&self) -> Result<f64> {
        let c = self.condition();
        if c > MAX_CONDITION {
            return Err(Error::IllConditioned { condition: c });
        }
        Ok(c)
    }
}
