use crate::error::{Error, Result};

/// Equidistant mesh `t_j = a + j*h`, `h = (b - a)/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
}

impl Mesh {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Domain(format!("mesh interval [{a}, {b}] is empty")));
        }
        if n == 0 {
            return Err(Error::Domain("mesh needs at least one step".into()));
        }
        Ok(Self {
            a,
            b,
            n,
            h: (b - a) / n as f64,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of steps.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// The j-th mesh point; the last point is `b` itself.
    #[inline]
    pub fn point(&self, j: usize) -> f64 {
        debug_assert!(j <= self.n);
        if j == self.n {
            self.b
        } else {
            self.a + j as f64 * self.h
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(|j| self.point(j))
    }

    /// Index `j` of the cell `[t_j, t_{j+1}]` containing `t`, clamped to `[0, n-1]`.
    #[inline]
    pub fn cell(&self, t: f64) -> usize {
        let j = ((t - self.a) / self.h).floor();
        if j <= 0.0 {
            0
        } else {
            (j as usize).min(self.n - 1)
        }
    }
}
