//! Basin images: classify a pixel-center grid and emit binary PGM/PPM.

use rayon::prelude::*;
use serde::Serialize;
use std::str::FromStr;

use crate::iteration::{classify_orbit, OrbitStatus};
use crate::kernel::ProductKernelModel;
use crate::{Complex64, ComplexPoint, Error, Result};

/// Kernel-diagonal values are clamped to `[0, KERNEL_CLAMP]` before coloring.
pub const KERNEL_CLAMP: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorMode {
    Status,
    Depth,
    Kernel,
}

impl FromStr for ColorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "status" => Ok(Self::Status),
            "depth" => Ok(Self::Depth),
            "kernel" | "kernel_diag" => Ok(Self::Kernel),
            other => Err(Error::invalid(format!("unknown color mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let all_finite = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite());
        if !all_finite || !(re_min < re_max) || !(im_min < im_max) {
            return Err(Error::invalid("rectangle must be finite and nondegenerate"));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    /// Center of pixel `(row, col)`; row 0 is the top edge `im_max`.
    pub fn pixel_center(&self, row: usize, col: usize, width: usize, height: usize) -> ComplexPoint {
        let dx = (self.re_max - self.re_min) / width as f64;
        let dy = (self.im_max - self.im_min) / height as f64;
        Complex64::new(
            self.re_min + (col as f64 + 0.5) * dx,
            self.im_max - (row as f64 + 0.5) * dy,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pixel {
    pub status: OrbitStatus,
    pub steps: usize,
    /// `K(z, z)` for converged pixels whose kernel evaluation succeeded.
    pub kernel_diag: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BasinImage {
    pub width: usize,
    pub height: usize,
    pub rect: Rect,
    pub max_iter: usize,
    pub mode: ColorMode,
    /// Row-major, row 0 at the top.
    pub pixels: Vec<Pixel>,
}

impl BasinImage {
    pub fn pixel(&self, row: usize, col: usize) -> &Pixel {
        &self.pixels[row * self.width + col]
    }

    pub fn unresolved_fraction(&self) -> f64 {
        let n = self
            .pixels
            .iter()
            .filter(|p| p.status == OrbitStatus::Unresolved)
            .count();
        n as f64 / self.pixels.len() as f64
    }

    fn gray(&self, p: &Pixel) -> u8 {
        match self.mode {
            ColorMode::Depth => {
                let level = 255.0 * p.steps as f64 / self.max_iter as f64;
                level.round().clamp(0.0, 255.0) as u8
            }
            _ => match p.status {
                OrbitStatus::Converged => 255,
                OrbitStatus::Escaped => 0,
                OrbitStatus::Unresolved => 128,
            },
        }
    }

    fn rgb(p: &Pixel) -> [u8; 3] {
        match (p.status, p.kernel_diag) {
            (OrbitStatus::Converged, Some(v)) => {
                let s = v.clamp(0.0, KERNEL_CLAMP) / KERNEL_CLAMP;
                let channel = |x: f64| (255.0 * x).round().clamp(0.0, 255.0) as u8;
                [channel(s), channel(4.0 * s * (1.0 - s)), channel(1.0 - s)]
            }
            _ => [0, 0, 0],
        }
    }

    /// `P5` for status/depth modes, `P6` for kernel mode.
    pub fn encode(&self) -> Vec<u8> {
        match self.mode {
            ColorMode::Kernel => self.to_ppm(),
            _ => self.to_pgm(),
        }
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.pixels.iter().map(|p| self.gray(p)));
        out
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.pixels.iter().flat_map(Self::rgb));
        out
    }
}

fn classify_pixel(model: &ProductKernelModel, z: ComplexPoint, max_iter: usize, mode: ColorMode) -> Result<Pixel> {
    let report = classify_orbit(model.map(), z, max_iter)?;
    let kernel_diag = match (mode, report.status) {
        (ColorMode::Kernel, OrbitStatus::Converged) => model.eval_kernel(z, z).ok().map(|v| v.value.re),
        _ => None,
    };
    Ok(Pixel {
        status: report.status,
        steps: report.steps_used,
        kernel_diag,
    })
}

/// Classify every pixel center of `rect` under the model's map.
pub fn render_basin(
    model: &ProductKernelModel,
    rect: Rect,
    width: usize,
    height: usize,
    max_iter: usize,
    mode: ColorMode,
) -> Result<BasinImage> {
    if width == 0 || height == 0 {
        return Err(Error::invalid("image dimensions must be at least 1"));
    }
    if max_iter == 0 {
        return Err(Error::invalid("max_iter must be at least 1"));
    }
    let pixels = (0..width * height)
        .into_par_iter()
        .map(|idx| {
            let z = rect.pixel_center(idx / width, idx % width, width, height);
            classify_pixel(model, z, max_iter, mode)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BasinImage {
        width,
        height,
        rect,
        max_iter,
        mode,
        pixels,
    })
}

/// [`render_basin`] on a dedicated pool of `threads` workers.
pub fn render_basin_with_threads(
    model: &ProductKernelModel,
    rect: Rect,
    width: usize,
    height: usize,
    max_iter: usize,
    mode: ColorMode,
    threads: usize,
) -> Result<BasinImage> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    pool.install(|| render_basin(model, rect, width, height, max_iter, mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::julia::julia_model;
    use crate::kernel::TruncationPolicy;

    #[test]
    fn single_pixel_at_origin() {
        let model = julia_model(TruncationPolicy::default());
        let rect = Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let img = render_basin(&model, rect, 1, 1, 50, ColorMode::Kernel).unwrap();
        let p = img.pixel(0, 0);
        assert_eq!(p.status, OrbitStatus::Converged);
        assert_eq!(p.kernel_diag, Some(1.0));
    }

    #[test]
    fn headers() {
        let model = julia_model(TruncationPolicy::default());
        let rect = Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap();
        let img = render_basin(&model, rect, 3, 2, 20, ColorMode::Status).unwrap();
        let pgm = img.to_pgm();
        assert!(pgm.starts_with(b"P5\n3 2\n255\n"));
        assert_eq!(pgm.len(), b"P5\n3 2\n255\n".len() + 6);
        let ppm = img.to_ppm();
        assert!(ppm.starts_with(b"P6\n3 2\n255\n"));
        assert_eq!(ppm.len(), b"P6\n3 2\n255\n".len() + 18);
    }

    #[test]
    fn validation() {
        assert!(Rect::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(Rect::new(0.0, 1.0, 0.0, f64::NAN).is_err());
        let model = julia_model(TruncationPolicy::default());
        let rect = Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        assert!(render_basin(&model, rect, 0, 4, 10, ColorMode::Status).is_err());
        assert!(render_basin(&model, rect, 4, 4, 0, ColorMode::Status).is_err());
        assert!("sepia".parse::<ColorMode>().is_err());
    }
}
