//! Initial-data generators with closed-form spectra, realizing the three
//! data classes used by the decay studies: nonzero-mean Gaussians (L^m
//! class), zero-mean Gaussian derivatives (weighted L^{1,1} class), and
//! spectrally compact rings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{physical_norms, transform, Direction, FourierField, GridSpec};
use crate::linalg::{c, C64, Vec4, ZERO};
use crate::params::ModelParams;
use crate::propagator::u_to_w;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Gaussian,
    GaussianDerivative,
    Ring,
}

/// Which slot of the first-order system the scalar profile feeds.
///
/// `U0`/`U1` place the profile in the first displacement / velocity
/// component (the other vanishing); `System` loads the profile directly
/// into the first two components of W, which excites the slow diffusive
/// branches at order one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataTarget {
    U0,
    U1,
    System,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialDataSpec {
    pub kind: ProfileKind,
    pub width: f64,
    pub amplitude: f64,
    pub target: DataTarget,
}

impl InitialDataSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(Error::InvalidParams(format!(
                "data width must be positive (got {})",
                self.width
            )));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::InvalidParams("data amplitude must be finite".into()));
        }
        if self.kind == ProfileKind::Ring && self.width >= 1.0 {
            return Err(Error::InvalidParams(format!(
                "ring half-width must stay below the ring radius 1 (got {})",
                self.width
            )));
        }
        Ok(())
    }

    /// Closed-form spectral profile at frequency xi.
    ///
    /// gaussian: 2 pi width^2 amp e^{-width^2 |xi|^2 / 2} (transform of
    /// amp e^{-|x|^2/(2 width^2)}); gaussian-derivative: i xi_1 times that;
    /// ring: a smooth radial bump supported on [1-width, 1+width].
    pub fn spectral_profile(&self, xi: [f64; 2]) -> C64 {
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        let w2 = self.width * self.width;
        match self.kind {
            ProfileKind::Gaussian => {
                c(self.amplitude * 2.0 * std::f64::consts::PI * w2 * (-w2 * r2 / 2.0).exp(), 0.0)
            }
            ProfileKind::GaussianDerivative => {
                let g = self.amplitude * 2.0 * std::f64::consts::PI * w2 * (-w2 * r2 / 2.0).exp();
                c(0.0, xi[0] * g)
            }
            ProfileKind::Ring => {
                let s = (r2.sqrt() - 1.0) / self.width;
                if s.abs() >= 1.0 {
                    ZERO
                } else {
                    c(self.amplitude * (1.0 - 1.0 / (1.0 - s * s)).exp(), 0.0)
                }
            }
        }
    }

    /// Radius beyond which the spectral profile is negligible (< 1e-16 of
    /// its peak); used to truncate radial quadratures.
    pub fn spectral_cutoff(&self) -> f64 {
        match self.kind {
            ProfileKind::Gaussian | ProfileKind::GaussianDerivative => {
                (2.0 * 16.0 * std::f64::consts::LN_10).sqrt() / self.width
            }
            ProfileKind::Ring => 1.0 + self.width,
        }
    }

    /// Physical-space profile, where one exists in closed form.
    fn physical_profile(&self, x: [f64; 2]) -> Option<C64> {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let w2 = self.width * self.width;
        match self.kind {
            ProfileKind::Gaussian => Some(c(self.amplitude * (-r2 / (2.0 * w2)).exp(), 0.0)),
            ProfileKind::GaussianDerivative => {
                Some(c(-self.amplitude * x[0] / w2 * (-r2 / (2.0 * w2)).exp(), 0.0))
            }
            ProfileKind::Ring => None,
        }
    }

    fn check_resolution(&self, grid: &GridSpec) -> Result<()> {
        match self.kind {
            ProfileKind::Gaussian | ProfileKind::GaussianDerivative => {
                let min_width = 4.0 * grid.box_length / grid.n as f64;
                if self.width < min_width {
                    return Err(Error::Unresolved(format!(
                        "width {} below the resolution floor {min_width}",
                        self.width
                    )));
                }
                let nyq = grid.nyquist();
                if (-self.width * self.width * nyq * nyq / 2.0).exp() > 1e-12 {
                    return Err(Error::Aliasing(format!(
                        "gaussian tail at the Nyquist frequency exceeds 1e-12 (width {})",
                        self.width
                    )));
                }
            }
            ProfileKind::Ring => {
                if grid.nyquist() < 1.0 + self.width {
                    return Err(Error::Aliasing(
                        "ring annulus extends beyond the Nyquist frequency".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Scalar W at one frequency from the closed-form spectrum: the polar
/// pipeline's pointwise data. U0/U1 route the profile through the change
/// of variables; System loads W directly.
pub fn w0_at(spec: &InitialDataSpec, xi: [f64; 2], p: &ModelParams) -> Vec4 {
    let g = spec.spectral_profile(xi);
    match spec.target {
        DataTarget::U0 => u_to_w(&[g, ZERO], &[ZERO, ZERO], xi, p),
        DataTarget::U1 => u_to_w(&[ZERO, ZERO], &[g, ZERO], xi, p),
        DataTarget::System => [g, g, ZERO, ZERO],
    }
}

/// Physical (u0, u1) fields on the lattice, each 2 components, with the
/// stated closed-form spectra. The ring profile is realized by an inverse
/// transform of its spectrum.
pub fn make_initial_data(
    spec: &InitialDataSpec,
    grid: GridSpec,
) -> Result<(FourierField, FourierField)> {
    spec.validate()?;
    spec.check_resolution(&grid)?;
    if spec.target == DataTarget::System {
        return Err(Error::InvalidClass(
            "system-target data lives in W coordinates; use make_w0".into(),
        ));
    }
    let n = grid.n;
    let mut profile = FourierField::zeros(grid, 2);
    if spec.kind == ProfileKind::Ring {
        let mut spectral = FourierField::zeros(grid, 2);
        for i in 0..n {
            for j in 0..n {
                spectral.data[(i * n + j) * 2] = spec.spectral_profile([grid.xi(i), grid.xi(j)]);
            }
        }
        profile = transform(&spectral, Direction::Inverse)?;
    } else {
        for i in 0..n {
            for j in 0..n {
                profile.data[(i * n + j) * 2] =
                    spec.physical_profile([grid.x(i), grid.x(j)]).unwrap();
            }
        }
    }
    let zero = FourierField::zeros(grid, 2);
    match spec.target {
        DataTarget::U0 => Ok((profile, zero)),
        DataTarget::U1 => Ok((zero, profile)),
        DataTarget::System => unreachable!(),
    }
}

/// Spectral 4-component W field on the lattice for the given data.
pub fn make_w0(spec: &InitialDataSpec, grid: GridSpec, p: &ModelParams) -> Result<FourierField> {
    spec.validate()?;
    spec.check_resolution(&grid)?;
    let n = grid.n;
    let mut w = FourierField::zeros(grid, 4);
    for i in 0..n {
        for j in 0..n {
            let xi = [grid.xi(i), grid.xi(j)];
            let node = w0_at(spec, xi, p);
            w.data[(i * n + j) * 4..(i * n + j) * 4 + 4].copy_from_slice(&node);
        }
    }
    Ok(w)
}

/// Checks the weighted-L^1 low-frequency bound
/// |f_hat(xi)| <= C_gamma |xi|^gamma ||f||_{L^{1,gamma}} + |integral of f|
/// on the lattice, reporting the smallest constant that makes it hold.
pub fn moment_bound_check(f: &FourierField, gamma: f64) -> Result<(f64, bool)> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidClass(format!("gamma must lie in (0, 1] (got {gamma})")));
    }
    let (_, l1g, integral) = physical_norms(f, 1.0, gamma);
    let mean_mag: f64 = integral.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let spec = transform(f, Direction::Forward)?;
    let n = f.grid.n;
    let nc = f.components;
    let mut c_gamma = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i == 0 && j == 0 {
                continue;
            }
            let (xi, yj) = (f.grid.xi(i), f.grid.xi(j));
            let r = (xi * xi + yj * yj).sqrt();
            let idx = i * n + j;
            let mag: f64 = (0..nc)
                .map(|comp| spec.data[idx * nc + comp].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if l1g > 0.0 {
                c_gamma = c_gamma.max((mag - mean_mag) / (r.powf(gamma) * l1g));
            }
        }
    }
    let c_gamma = c_gamma.max(0.0);
    Ok((c_gamma, c_gamma.is_finite()))
}
