use rayon::prelude::*;

use super::closed_form::f_value;
use super::functional::{phi_mid, phi_ms, singular_case, SingularCase};
use super::{ComplexPoint, RegionKind};
use crate::error::{Error, Result};
use crate::experiments::fmt_num;

/// Every region lies in `{Re z < 0, |z| < 1 + sqrt(5)}`.
pub const AREA_RADIUS: f64 = 3.236_067_977_499_79;

/// Region indicator: `phi_ms`, `F` or `phi_mid`. Members are exactly the points where it is negative.
pub fn indicator(z: ComplexPoint, kind: RegionKind) -> f64 {
    match kind.canonical() {
        RegionKind::MeanSquare => phi_ms(z),
        RegionKind::Midpoint => phi_mid(z),
        _ => f_value(z.a, z.b),
    }
}

/// Regions are open: a zero indicator is not a member.
pub fn in_region(z: ComplexPoint, kind: RegionKind) -> bool {
    indicator(z, kind) < 0.0
}

/// Real interval `(left, 0)` of the region on the real axis. For AS the left
/// end is itself a member, as `[-2, 0)` lies in the interval.
pub fn interval_endpoints(kind: RegionKind) -> Result<(f64, f64)> {
    match kind.canonical() {
        RegionKind::Midpoint => Ok((-2.0, 0.0)),
        RegionKind::MeanSquare => {
            // real root of x^3 + 3x^2 + 6x + 6 by Cardano
            let c = (2f64.sqrt() - 1.0).cbrt();
            let x0 = -1.0 - 1.0 / c + c;
            let residual = ((x0 + 3.0) * x0 + 6.0) * x0 + 6.0;
            if residual.abs() >= 1e-12 {
                return Err(Error::InvariantViolation(format!(
                    "cubic residual {residual:e} at x0 = {x0}"
                )));
            }
            Ok((x0, 0.0))
        }
        _ => {
            let outer = -(2.0 * std::f64::consts::E).sqrt();
            let inner = -2.0;
            let (f_outer, f_inner) = (f_value(outer, 0.0), f_value(inner, 0.0));
            if !(f_outer > 0.0 && f_inner < 0.0) {
                return Err(Error::InvariantViolation(format!(
                    "F(x, 0) does not change sign on [{outer}, {inner}]: {f_outer}, {f_inner}"
                )));
            }
            // F(lo) > 0 > F(hi)
            let (mut lo, mut hi) = (outer, inner);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if !(lo < mid && mid < hi) {
                    break;
                }
                if f_value(mid, 0.0) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = if f_value(lo, 0.0).abs() < f_value(hi, 0.0).abs() {
                lo
            } else {
                hi
            };
            Ok((root, 0.0))
        }
    }
}

/// Axis-aligned rectangle of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotBox {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl PlotBox {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        let ok = [xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite()) && xmin < xmax && ymin < ymax;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "empty box [{xmin}, {xmax}] x [{ymin}, {ymax}]"
            )));
        }
        Ok(Self { xmin, xmax, ymin, ymax })
    }

    pub fn is_symmetric(&self) -> bool {
        self.ymin == -self.ymax
    }
}

/// Pixel-center coordinates; on a box symmetric about the real axis the
/// ordinates are exact negatives of each other.
fn pixel_centers(lo: f64, hi: f64, count: usize, symmetric: bool) -> Vec<f64> {
    let step = (hi - lo) / count as f64;
    let mut c: Vec<f64> = (0..count).map(|k| lo + (k as f64 + 0.5) * step).collect();
    if symmetric {
        for k in 0..count / 2 {
            c[count - 1 - k] = -c[k];
        }
        if count % 2 == 1 {
            c[count / 2] = 0.0;
        }
    }
    c
}

/// Evaluates `eval(x, y)` on the grid, row by row (ascending `y`), using the
/// mirror image for the upper half of a symmetric grid.
fn raster<T, F>(xs: &[f64], ys: &[f64], symmetric: bool, eval: F) -> Vec<T>
where
    T: Copy + Send + Sync,
    F: Fn(f64, f64) -> T + Sync,
{
    let ny = ys.len();
    let computed = if symmetric { ny.div_ceil(2) } else { ny };
    let rows: Vec<Vec<T>> = (0..computed)
        .into_par_iter()
        .map(|k| xs.iter().map(|&x| eval(x, ys[k])).collect())
        .collect();
    let mut out = Vec::with_capacity(xs.len() * ny);
    for k in 0..ny {
        let src = if k < computed { k } else { ny - 1 - k };
        out.extend_from_slice(&rows[src]);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid {
    pub kind: RegionKind,
    pub bounds: PlotBox,
    pub nx: usize,
    pub ny: usize,
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Row-major, ascending `y` then `x`.
    values: Vec<f64>,
    /// Pixels where `f_{a,b}` has a root in `[0, 1]` (AS only).
    singular: Vec<usize>,
}

impl RegionGrid {
    pub fn x(&self, i: usize) -> f64 {
        self.xs[i]
    }

    pub fn y(&self, k: usize) -> f64 {
        self.ys[k]
    }

    pub fn value(&self, i: usize, k: usize) -> f64 {
        self.values[k * self.nx + i]
    }

    /// A singular pixel with an infinite indicator still counts as `F < 0`.
    pub fn is_member(&self, i: usize, k: usize) -> bool {
        self.value(i, k) < 0.0
    }

    pub fn singular_pixels(&self) -> &[usize] {
        &self.singular
    }

    pub fn member_count(&self) -> usize {
        self.values.iter().filter(|v| **v < 0.0).count()
    }

    /// `x,y,value,member` with one row per pixel center.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 48 + 32);
        out.push_str("x,y,value,member\n");
        for k in 0..self.ny {
            for i in 0..self.nx {
                let v = self.value(i, k);
                out.push_str(&fmt_num(self.xs[i]));
                out.push(',');
                out.push_str(&fmt_num(self.ys[k]));
                out.push(',');
                out.push_str(&fmt_num(v));
                out.push(',');
                out.push_str(if v < 0.0 { "1" } else { "0" });
                out.push('\n');
            }
        }
        out
    }
}

pub fn region_grid(kind: RegionKind, bounds: PlotBox, nx: usize, ny: usize) -> Result<RegionGrid> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid {nx} x {ny} is smaller than 2 x 2"
        )));
    }
    let bounds = PlotBox::new(bounds.xmin, bounds.xmax, bounds.ymin, bounds.ymax)?;
    let symmetric = bounds.is_symmetric();
    let xs = pixel_centers(bounds.xmin, bounds.xmax, nx, false);
    let ys = pixel_centers(bounds.ymin, bounds.ymax, ny, symmetric);
    let values = raster(&xs, &ys, symmetric, |x, y| indicator(ComplexPoint::new(x, y), kind));
    let singular = if kind.canonical() == RegionKind::Asymptotic {
        (0..nx * ny)
            .filter(|&p| singular_case(xs[p % nx], ys[p / nx]) != SingularCase::Regular)
            .collect()
    } else {
        Vec::new()
    };
    Ok(RegionGrid {
        kind,
        bounds,
        nx,
        ny,
        xs,
        ys,
        values,
        singular,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaEstimate {
    pub kind: RegionKind,
    pub area: f64,
    /// Half a pixel for every pixel on either side of the boundary.
    pub uncertainty: f64,
    /// Pixels per unit length.
    pub resolution: usize,
}

impl AreaEstimate {
    /// `kind,area,uncertainty,resolution`
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{}",
            self.kind,
            fmt_num(self.area),
            fmt_num(self.uncertainty),
            self.resolution
        )
    }
}

/// Pixel-counting area over `[-(1+√5), 0] x [-(1+√5), 1+√5]`.
pub fn region_area(kind: RegionKind, resolution: usize) -> Result<AreaEstimate> {
    if resolution < 100 {
        return Err(Error::InvalidParameter(format!(
            "resolution {resolution} is below 100 pixels per unit"
        )));
    }
    let nx = (AREA_RADIUS * resolution as f64).ceil() as usize;
    let ny = 2 * nx;
    let xs = pixel_centers(-AREA_RADIUS, 0.0, nx, false);
    let ys = pixel_centers(-AREA_RADIUS, AREA_RADIUS, ny, true);
    let member = raster(&xs, &ys, true, |x, y| in_region(ComplexPoint::new(x, y), kind));

    let at = |i: usize, k: usize| member[k * nx + i];
    let mut inside = 0usize;
    let mut edge = 0usize;
    for k in 0..ny {
        for i in 0..nx {
            let m = at(i, k);
            inside += m as usize;
            let differs = (i > 0 && at(i - 1, k) != m)
                || (i + 1 < nx && at(i + 1, k) != m)
                || (k > 0 && at(i, k - 1) != m)
                || (k + 1 < ny && at(i, k + 1) != m);
            edge += differs as usize;
        }
    }
    let pixel = (AREA_RADIUS / nx as f64) * (2.0 * AREA_RADIUS / ny as f64);
    Ok(AreaEstimate {
        kind,
        area: inside as f64 * pixel,
        uncertainty: 0.5 * edge as f64 * pixel,
        resolution,
    })
}
