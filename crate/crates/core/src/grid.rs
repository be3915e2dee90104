//! Discrete Fourier grid on a periodic square box, with the continuum
//! convention f_hat(xi) = integral of e^{-i x.xi} f(x) dx and Plancherel
//! factor (2 pi)^{-2}.
//!
//! Physical nodes are x_j = -L/2 + j L/n per axis; frequencies are the
//! lattice xi_k = 2 pi k / L with integer k in [-n/2, n/2). Field data is
//! stored node-major (row-major over the grid) with components contiguous
//! per node.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub box_length: f64,
}

impl GridSpec {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= 8 (got {n})"
            )));
        }
        if !(box_length > 0.0) || !box_length.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "box_length must be positive and finite (got {box_length})"
            )));
        }
        Ok(Self { n, box_length })
    }

    /// Physical mesh width.
    pub fn h(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Signed integer frequency index for storage index k.
    pub fn freq_int(&self, k: usize) -> i64 {
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// xi component for storage index k.
    pub fn xi(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.freq_int(k) as f64 / self.box_length
    }

    /// Physical coordinate for storage index j.
    pub fn x(&self, j: usize) -> f64 {
        -self.box_length / 2.0 + j as f64 * self.h()
    }

    /// |xi| at every node, row-major.
    pub fn radii(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            let xi_i = self.xi(i);
            for j in 0..n {
                let xi_j = self.xi(j);
                out.push((xi_i * xi_i + xi_j * xi_j).sqrt());
            }
        }
        out
    }

    /// Frequency-space cell area (2 pi / L)^2.
    pub fn freq_cell(&self) -> f64 {
        let d = 2.0 * std::f64::consts::PI / self.box_length;
        d * d
    }

    /// Largest resolved radial frequency pi n / L.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI * self.n as f64 / self.box_length
    }
}

/// Complex field samples on the grid, physical or spectral depending on use.
#[derive(Debug, Clone)]
pub struct FourierField {
    pub grid: GridSpec,
    pub components: usize,
    pub data: Vec<C64>,
}

impl FourierField {
    pub fn zeros(grid: GridSpec, components: usize) -> Self {
        Self { grid, components, data: vec![ZERO; grid.n * grid.n * components] }
    }

    pub fn node(&self, idx: usize) -> &[C64] {
        &self.data[idx * self.components..(idx + 1) * self.components]
    }

    fn check(&self) -> Result<()> {
        let expect = self.grid.n * self.grid.n * self.components;
        if self.data.len() != expect || !(self.components == 2 || self.components == 4) {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} nodes x {} components",
                self.data.len(),
                self.grid.n * self.grid.n,
                self.components
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

/// In-place 2D FFT of one component plane (length n*n, stride 1).
fn fft2(plane: &mut [C64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    // rows
    plane.par_chunks_mut(n).for_each(|row| fft.process(row));
    // columns via transpose, row FFT, transpose back
    let mut tr = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            tr[j * n + i] = plane[i * n + j];
        }
    }
    tr.par_chunks_mut(n).for_each(|row| fft.process(row));
    for i in 0..n {
        for j in 0..n {
            plane[i * n + j] = tr[j * n + i];
        }
    }
}

/// Discrete realization of the continuum Fourier transform.
///
/// Forward maps physical samples to lattice values of
/// f_hat(xi) = integral e^{-i x.xi} f(x) dx (trapezoidal quadrature, exact
/// for band-limited data); inverse is its exact discrete inverse.
pub fn transform(field: &FourierField, direction: Direction) -> Result<FourierField> {
    field.check()?;
    let n = field.grid.n;
    let nc = field.components;
    let mut planner = FftPlanner::new();
    let fft = match direction {
        Direction::Forward => planner.plan_fft_forward(n),
        Direction::Inverse => planner.plan_fft_inverse(n),
    };
    let mut out = FourierField::zeros(field.grid, nc);
    // the centered physical grid shows up as (-1)^{k1+k2} phases
    let sign = |i: usize, j: usize| -> f64 {
        if (field.grid.freq_int(i) + field.grid.freq_int(j)) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let scale = match direction {
        Direction::Forward => field.grid.h() * field.grid.h(),
        Direction::Inverse => 1.0 / (field.grid.box_length * field.grid.box_length),
    };
    for comp in 0..nc {
        let mut plane: Vec<C64> = (0..n * n).map(|idx| field.data[idx * nc + comp]).collect();
        if direction == Direction::Inverse {
            for i in 0..n {
                for j in 0..n {
                    plane[i * n + j] *= sign(i, j);
                }
            }
        }
        fft2(&mut plane, n, &fft);
        if direction == Direction::Forward {
            for i in 0..n {
                for j in 0..n {
                    plane[i * n + j] *= sign(i, j);
                }
            }
        }
        for idx in 0..n * n {
            out.data[idx * nc + comp] = plane[idx] * scale;
        }
    }
    Ok(out)
}

/// Sobolev norm of a spectral field:
/// ( (2 pi)^{-2} sum |xi|^{2s} w(|xi|)^2 |data|^2 freq_cell )^{1/2}.
///
/// The Riesz multiplier |xi|^s vanishes at the zero node for s > 0 (no
/// r^0 = 1 convention here; that convention applies only inside the
/// dissipation scalar).
pub fn sobolev_norm(field: &FourierField, s: f64, weight: Option<&dyn Fn(f64) -> f64>) -> f64 {
    let radii = field.grid.radii();
    let nc = field.components;
    let sum: f64 = radii
        .iter()
        .enumerate()
        .map(|(idx, &r)| {
            let mult = if s == 0.0 {
                1.0
            } else if r == 0.0 {
                0.0
            } else {
                r.powf(2.0 * s)
            };
            let w = weight.map_or(1.0, |f| f(r));
            let mass: f64 = (0..nc).map(|c| field.data[idx * nc + c].norm_sqr()).sum();
            mult * w * w * mass
        })
        .sum();
    let two_pi = 2.0 * std::f64::consts::PI;
    (sum * field.grid.freq_cell() / (two_pi * two_pi)).sqrt()
}

/// Lattice quadrature of the L^m norm, the weighted L^{1,gamma} norm, and
/// the componentwise integral of a physical field. The pointwise magnitude
/// is the euclidean norm across components.
pub fn physical_norms(
    field: &FourierField,
    m: f64,
    gamma: f64,
) -> (f64, f64, Vec<C64>) {
    let n = field.grid.n;
    let nc = field.components;
    let cell = field.grid.h() * field.grid.h();
    let mut lm = 0.0;
    let mut l1g = 0.0;
    let mut integral = vec![ZERO; nc];
    for i in 0..n {
        let x = field.grid.x(i);
        for j in 0..n {
            let y = field.grid.x(j);
            let idx = i * n + j;
            let mag2: f64 = (0..nc).map(|c| field.data[idx * nc + c].norm_sqr()).sum();
            let mag = mag2.sqrt();
            lm += mag.powf(m);
            l1g += (1.0 + (x * x + y * y).sqrt()).powf(gamma) * mag;
            for c in 0..nc {
                integral[c] += field.data[idx * nc + c];
            }
        }
    }
    for v in &mut integral {
        *v *= cell;
    }
    ((lm * cell).powf(1.0 / m), l1g * cell, integral)
}

/// Flat binary snapshot: u64 n, f64 L, u64 components (all little-endian),
/// then row-major (re, im) f64 pairs.
pub fn write_binary<W: Write>(field: &FourierField, out: &mut W) -> Result<()> {
    out.write_all(&(field.grid.n as u64).to_le_bytes())?;
    out.write_all(&field.grid.box_length.to_le_bytes())?;
    out.write_all(&(field.components as u64).to_le_bytes())?;
    for z in &field.data {
        out.write_all(&z.re.to_le_bytes())?;
        out.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

/// CSV snapshot for small grids: i, j, then re/im per component.
pub fn write_csv<W: Write>(field: &FourierField, out: &mut W) -> Result<()> {
    let nc = field.components;
    let mut header = String::from("i,j");
    for c in 0..nc {
        header.push_str(&format!(",re_{c},im_{c}"));
    }
    writeln!(out, "{header}")?;
    let n = field.grid.n;
    for i in 0..n {
        for j in 0..n {
            let mut line = format!("{i},{j}");
            for c in 0..nc {
                let z = field.data[(i * n + j) * nc + c];
                line.push_str(&format!(",{:.16e},{:.16e}", z.re, z.im));
            }
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}
