//! In-memory raster types shared by the light field, filtering and feature
//! code. Samples are `f64` in `[0, 1]` for color; planes are unconstrained.

/// BT.709 luma weights.
pub const LUMA_WEIGHTS: [f64; 3] = [0.2126, 0.7152, 0.0722];

/// Largest Sobel gradient magnitude reachable on a `[0, 1]` plane, attained
/// by a neighborhood giving `(gx, gy) = (4, 2)`.
pub const SOBEL_MAX_MAGNITUDE: f64 = 4.472_135_954_999_579; // sqrt(20)

/// An RGB image, row-major, channels interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct View {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl View {
    pub fn new(width: usize, height: usize) -> Self {
        View {
            width,
            height,
            data: vec![0.0; width * height * 3],
        }
    }

    /// Panics if `data.len() != width * height * 3`.
    pub fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height * 3, "raw RGB buffer size");
        View { width, height, data }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for v in 0..height {
            for u in 0..width {
                data.extend_from_slice(&f(u, v));
            }
        }
        View { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_raw(self) -> Vec<f64> {
        self.data
    }

    /// Pixel at column `u`, row `v`.
    pub fn pixel(&self, u: usize, v: usize) -> [f64; 3] {
        let i = (v * self.width + u) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, u: usize, v: usize, rgb: [f64; 3]) {
        let i = (v * self.width + u) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn luminance(&self) -> Plane {
        let data = self
            .data
            .chunks_exact(3)
            .map(|p| LUMA_WEIGHTS[0] * p[0] + LUMA_WEIGHTS[1] * p[1] + LUMA_WEIGHTS[2] * p[2])
            .collect();
        Plane {
            width: self.width,
            height: self.height,
            data,
        }
    }
}

/// A single-channel `f64` image, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    /// Panics if `data.len() != width * height`.
    pub fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "raw plane buffer size");
        Plane { width, height, data }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for v in 0..height {
            for u in 0..width {
                data.push(f(u, v));
            }
        }
        Plane { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[v * self.width + u]
    }

    #[inline]
    fn get_clamped(&self, u: isize, v: isize) -> f64 {
        let u = u.clamp(0, self.width as isize - 1) as usize;
        let v = v.clamp(0, self.height as isize - 1) as usize;
        self.get(u, v)
    }

    /// Sobel `(gx, gy)` at `(u, v)`; neighbors outside the image replicate
    /// the nearest border pixel.
    pub fn sobel(&self, u: usize, v: usize) -> (f64, f64) {
        let (u, v) = (u as isize, v as isize);
        let p = |du: isize, dv: isize| self.get_clamped(u + du, v + dv);
        let gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
        let gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
        (gx, gy)
    }

    pub fn sobel_magnitude(&self) -> Plane {
        Plane::from_fn(self.width, self.height, |u, v| {
            let (gx, gy) = self.sobel(u, v);
            gx.hypot(gy)
        })
    }
}

/// 8-bit histogram bin of a `[0, 1]` intensity.
#[inline]
pub fn quantize_u8(x: f64) -> u8 {
    (x * 255.0).round().clamp(0.0, 255.0) as u8
}

/// Population mean and standard deviation.
pub fn mean_std(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let values: Vec<f64> = values.into_iter().collect();
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}
