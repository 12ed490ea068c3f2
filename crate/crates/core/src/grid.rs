use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rectangular parameter grid over `[u0, u1] × [v0, v1]`.
///
/// Interior points (those not on the boundary ring, unless the respective
/// direction is periodic) are the ones aggregate residuals are taken over;
/// boundary points stay available for finite-difference cross-checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
    pub nu: usize,
    pub nv: usize,
    pub periodic_u: bool,
    pub periodic_v: bool,
}

impl ParamGrid {
    pub fn new(
        u_range: (f64, f64),
        v_range: (f64, f64),
        nu: usize,
        nv: usize,
        periodic_u: bool,
        periodic_v: bool,
    ) -> Result<Self> {
        if nu < 8 || nv < 8 {
            return Err(Error::Other(format!(
                "grid must have at least 8 samples per direction, got {nu}×{nv}"
            )));
        }
        if u_range.1 <= u_range.0 || v_range.1 <= v_range.0 {
            return Err(Error::Other("grid ranges must be increasing".into()));
        }
        Ok(ParamGrid {
            u_range,
            v_range,
            nu,
            nv,
            periodic_u,
            periodic_v,
        })
    }

    pub fn hu(&self) -> f64 {
        (self.u_range.1 - self.u_range.0) / (self.nu - 1) as f64
    }

    pub fn hv(&self) -> f64 {
        (self.v_range.1 - self.v_range.0) / (self.nv - 1) as f64
    }

    pub fn u(&self, i: usize) -> f64 {
        self.u_range.0 + self.hu() * i as f64
    }

    pub fn v(&self, j: usize) -> f64 {
        self.v_range.0 + self.hv() * j as f64
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (self.u(i), self.v(j))
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    /// Row-major iteration over all grid indices; the fixed order every
    /// aggregate report uses.
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.nu).flat_map(move |i| (0..self.nv).map(move |j| (i, j)))
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        let u_ok = self.periodic_u || (i > 0 && i + 1 < self.nu);
        let v_ok = self.periodic_v || (j > 0 && j + 1 < self.nv);
        u_ok && v_ok
    }

    pub fn interior_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.indices().filter(|&(i, j)| self.is_interior(i, j))
    }
}
