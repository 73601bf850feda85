//! Per-object texture and shape complexity: luminance entropy, Sobel edge
//! density and the spread of mean curvature of the depth surface.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::{mean_std, quantize_u8, Plane, View, LUMA_WEIGHTS, SOBEL_MAX_MAGNITUDE};
use crate::scene_maps::{DepthMap, ObjectRegion};

/// Fraction of [`SOBEL_MAX_MAGNITUDE`] a pixel's gradient must exceed to
/// count as an edge.
pub const EDGE_THRESHOLD_FRACTION: f64 = 0.1;

pub fn edge_threshold() -> f64 {
    EDGE_THRESHOLD_FRACTION * SOBEL_MAX_MAGNITUDE
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricFactors {
    pub entropy_bits: f64,
    pub edge_density: f64,
    pub curvature_std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizedGeometricFactors {
    pub entropy_norm: f64,
    pub edge_norm: f64,
    pub curvature_norm: f64,
}

fn check_region(region: &ObjectRegion, width: usize, height: usize) -> Result<()> {
    if region.area() == 0 {
        return Err(Error::EmptyRegion);
    }
    if region.linear_indices().last().is_some_and(|&i| i >= width * height) {
        return Err(Error::param("region", "extends beyond the image"));
    }
    Ok(())
}

/// Shannon entropy (bits) of the region's 256-bin luminance histogram.
pub fn entropy(image: &View, region: &ObjectRegion) -> Result<f64> {
    check_region(region, image.width(), image.height())?;
    let mut hist = [0u64; 256];
    for (u, v) in region.pixels() {
        let [r, g, b] = image.pixel(u, v);
        let y = LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b;
        hist[quantize_u8(y) as usize] += 1;
    }
    let n = region.area() as f64;
    let h = hist
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>();
    // A single occupied bin yields -0.0.
    Ok(h.max(0.0))
}

/// Fraction of region pixels whose Sobel gradient magnitude exceeds
/// [`edge_threshold`].
pub fn edge_density(image: &View, region: &ObjectRegion) -> Result<f64> {
    edge_density_on(&image.luminance(), region)
}

/// [`edge_density`] on a precomputed luminance plane.
pub fn edge_density_on(luma: &Plane, region: &ObjectRegion) -> Result<f64> {
    check_region(region, luma.width(), luma.height())?;
    let threshold = edge_threshold();
    let edges = region
        .pixels()
        .filter(|&(u, v)| {
            let (gx, gy) = luma.sobel(u, v);
            gx.hypot(gy) > threshold
        })
        .count();
    Ok(edges as f64 / region.area() as f64)
}

/// Symmetric 2×2 Hessian of depth at one pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hessian {
    pub uu: f64,
    pub uv: f64,
    pub vv: f64,
}

impl Hessian {
    /// Mean of the two eigenvalues, i.e. half the trace.
    pub fn mean_curvature(&self) -> f64 {
        0.5 * (self.uu + self.vv)
    }
}

/// Second difference of depth along `(du, dv)` using only region pixels:
/// central when both neighbors are in the region, else forward, else backward.
fn second_difference(depth: &DepthMap, region: &ObjectRegion, u: isize, v: isize, du: isize, dv: isize) -> Option<f64> {
    let inside = |k: isize| region.contains_signed(u + k * du, v + k * dv);
    let z = |k: isize| depth.get((u + k * du) as usize, (v + k * dv) as usize);
    if inside(-1) && inside(1) {
        Some(z(1) - 2.0 * z(0) + z(-1))
    } else if inside(1) && inside(2) {
        Some(z(2) - 2.0 * z(1) + z(0))
    } else if inside(-1) && inside(-2) {
        Some(z(0) - 2.0 * z(-1) + z(-2))
    } else {
        None
    }
}

fn mixed_difference(depth: &DepthMap, region: &ObjectRegion, u: isize, v: isize) -> Option<f64> {
    let inside = |du: isize, dv: isize| region.contains_signed(u + du, v + dv);
    let z = |du: isize, dv: isize| depth.get((u + du) as usize, (v + dv) as usize);
    if inside(1, 1) && inside(1, -1) && inside(-1, 1) && inside(-1, -1) {
        return Some((z(1, 1) - z(1, -1) - z(-1, 1) + z(-1, -1)) / 4.0);
    }
    for (su, sv) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        if inside(su, 0) && inside(0, sv) && inside(su, sv) {
            let d = z(su, sv) - z(su, 0) - z(0, sv) + z(0, 0);
            return Some(d * (su * sv) as f64);
        }
    }
    None
}

/// Depth Hessian at `(u, v)` with unit pixel spacing, or `None` when the
/// region does not provide a stencil for every entry.
pub fn hessian_at(depth: &DepthMap, region: &ObjectRegion, u: usize, v: usize) -> Option<Hessian> {
    let (u, v) = (u as isize, v as isize);
    Some(Hessian {
        uu: second_difference(depth, region, u, v, 1, 0)?,
        vv: second_difference(depth, region, u, v, 0, 1)?,
        uv: mixed_difference(depth, region, u, v)?,
    })
}

/// Population standard deviation of mean curvature over the region's pixels
/// that admit a full Hessian stencil.
pub fn curvature_std(depth: &DepthMap, region: &ObjectRegion) -> Result<f64> {
    check_region(region, depth.width(), depth.height())?;
    let curvatures: Vec<f64> = region
        .pixels()
        .filter_map(|(u, v)| hessian_at(depth, region, u, v))
        .map(|h| h.mean_curvature())
        .collect();
    if curvatures.is_empty() {
        return Err(Error::RegionTooSmall {
            label: region.label().to_string(),
        });
    }
    Ok(mean_std(curvatures).1)
}

pub fn geometric_factors(
    image: &View,
    luma: &Plane,
    depth: &DepthMap,
    region: &ObjectRegion,
) -> Result<GeometricFactors> {
    Ok(GeometricFactors {
        entropy_bits: entropy(image, region)?,
        edge_density: edge_density_on(luma, region)?,
        curvature_std: curvature_std(depth, region)?,
    })
}

fn min_max_normalize(values: impl Iterator<Item = f64> + Clone) -> Vec<f64> {
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.clone().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    values
        .map(|x| {
            if span > 0.0 {
                ((x - lo) / span).clamp(0.0, 1.0)
            } else {
                0.5
            }
        })
        .collect()
}

/// Min-max normalization of each factor across a scene's objects. When all
/// objects share a value (including a single object) that factor maps to 0.5.
pub fn normalize_factors(all: &[GeometricFactors]) -> Vec<NormalizedGeometricFactors> {
    let s = min_max_normalize(all.iter().map(|f| f.entropy_bits));
    let e = min_max_normalize(all.iter().map(|f| f.edge_density));
    let c = min_max_normalize(all.iter().map(|f| f.curvature_std));
    (0..all.len())
        .map(|i| NormalizedGeometricFactors {
            entropy_norm: s[i],
            edge_norm: e[i],
            curvature_norm: c[i],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene_maps::{extract_objects, Label, SegmentationMap};
    use proptest::prelude::*;

    const OBJ: Label = Label([1, 2, 3]);
    const BG: Label = Label([0, 0, 0]);

    fn whole(w: usize, h: usize) -> ObjectRegion {
        let seg = SegmentationMap::from_fn(w, h, |_, _| OBJ);
        let depth = DepthMap::from_fn(w, h, |_, _| 0.0).unwrap();
        extract_objects(&seg, &depth).unwrap().remove(0)
    }

    fn gray(w: usize, h: usize, f: impl Fn(usize, usize) -> f64) -> View {
        View::from_fn(w, h, |u, v| [f(u, v); 3])
    }

    #[test]
    fn entropy_constant_is_zero() {
        let img = gray(8, 8, |_, _| 0.3);
        assert_eq!(entropy(&img, &whole(8, 8)).unwrap(), 0.0);
    }

    #[test]
    fn entropy_uniform_256_is_eight() {
        let img = gray(16, 16, |u, v| (v * 16 + u) as f64 / 255.0);
        assert!((entropy(&img, &whole(16, 16)).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_two_levels_is_one() {
        let img = gray(4, 4, |u, _| if u < 2 { 0.0 } else { 1.0 });
        assert!((entropy(&img, &whole(4, 4)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn edge_density_constant_is_zero() {
        let img = gray(10, 10, |_, _| 0.7);
        assert_eq!(edge_density(&img, &whole(10, 10)).unwrap(), 0.0);
    }

    /// Hand-rolled Sobel over a raw buffer with replicated borders.
    fn oracle_edges(w: usize, h: usize, y: &dyn Fn(usize, usize) -> f64, inside: &dyn Fn(usize, usize) -> bool) -> f64 {
        let px = |u: isize, v: isize| y(u.clamp(0, w as isize - 1) as usize, v.clamp(0, h as isize - 1) as usize);
        let kx = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
        let ky = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];
        let (mut edges, mut area) = (0, 0);
        for v in 0..h {
            for u in 0..w {
                if !inside(u, v) {
                    continue;
                }
                area += 1;
                let (mut gx, mut gy) = (0.0, 0.0);
                for (j, (rx, ry)) in kx.iter().zip(ky.iter()).enumerate() {
                    for i in 0..3 {
                        let p = px(u as isize + i as isize - 1, v as isize + j as isize - 1);
                        gx += rx[i] * p;
                        gy += ry[i] * p;
                    }
                }
                if (gx * gx + gy * gy).sqrt() > 0.1 * 20f64.sqrt() {
                    edges += 1;
                }
            }
        }
        edges as f64 / area as f64
    }

    #[test]
    fn vertical_step_edge() {
        let (w, h) = (12, 8);
        let f = |u: usize, _: usize| if u < 6 { 0.1 } else { 0.9 };
        let img = gray(w, h, f);
        let seg = SegmentationMap::from_fn(w, h, |u, v| {
            if (2..10).contains(&u) && (1..7).contains(&v) {
                OBJ
            } else {
                BG
            }
        })
        .with_background(Some(BG));
        let depth = DepthMap::from_fn(w, h, |_, _| 0.0).unwrap();
        let region = extract_objects(&seg, &depth).unwrap().remove(0);
        let got = edge_density(&img, &region).unwrap();
        // Columns 5 and 6 straddle the step: 2 of 8 columns.
        assert_eq!(got, 0.25);
        let luma = img.luminance();
        let oracle = oracle_edges(w, h, &|u, v| luma.get(u, v), &|u, v| region.contains(u, v));
        assert_eq!(got, oracle);
    }

    #[test]
    fn checkerboards_against_oracle() {
        let (w, h) = (16, 16);
        // Pixel-pitch checker sits in the Sobel kernel's null space: only
        // border pixels (where replication breaks the pattern) respond.
        let fine = |u: usize, v: usize| ((u + v) % 2) as f64;
        let img = gray(w, h, fine);
        let got = edge_density(&img, &whole(w, h)).unwrap();
        let luma = img.luminance();
        let oracle = oracle_edges(w, h, &|u, v| luma.get(u, v), &|_, _| true);
        assert_eq!(got, oracle);
        assert!(got < 0.3);

        let coarse = |u: usize, v: usize| ((u / 2 + v / 2) % 2) as f64;
        let img = gray(w, h, coarse);
        let got = edge_density(&img, &whole(w, h)).unwrap();
        let luma = img.luminance();
        let oracle = oracle_edges(w, h, &|u, v| luma.get(u, v), &|_, _| true);
        assert_eq!(got, oracle);
        assert!(got > 0.9, "2-px checker density {got}");
    }

    #[test]
    fn curvature_plane_and_bowl() {
        let (w, h) = (20, 15);
        let region = whole(w, h);
        let plane = DepthMap::from_fn(w, h, |u, v| 0.3 * u as f64 - 0.7 * v as f64 + 0.1).unwrap();
        assert!(curvature_std(&plane, &region).unwrap() < 1e-12);
        let bowl = DepthMap::from_fn(w, h, |u, v| (u * u + v * v) as f64).unwrap();
        assert!(curvature_std(&bowl, &region).unwrap() < 1e-9);
    }

    #[test]
    fn curvature_region_too_small() {
        let seg = SegmentationMap::from_fn(5, 5, |u, _| if u == 2 { OBJ } else { BG }).with_background(Some(BG));
        let depth = DepthMap::from_fn(5, 5, |u, v| (u * v) as f64).unwrap();
        let region = extract_objects(&seg, &depth).unwrap().remove(0);
        assert!(matches!(
            curvature_std(&depth, &region),
            Err(Error::RegionTooSmall { .. })
        ));
    }

    /// Explicit eigenvalues of [[a, b], [b, c]].
    fn eigen_mean(a: f64, b: f64, c: f64) -> f64 {
        let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
        let l1 = 0.5 * (a + c + disc);
        let l2 = 0.5 * (a + c - disc);
        0.5 * (l1 + l2)
    }

    #[test]
    fn hemisphere_against_eigen_oracle() {
        let (w, h) = (33, 33);
        let region = whole(w, h);
        let radius = 30.0;
        let depth = DepthMap::from_fn(w, h, |u, v| {
            let (x, y) = (u as f64 - 16.0, v as f64 - 16.0);
            (radius * radius - x * x - y * y).sqrt() * 0.01
        })
        .unwrap();
        let got = curvature_std(&depth, &region).unwrap();
        assert!(got > 0.0);

        // Interior-only oracle with independent stencils on the whole image.
        let z = |u: usize, v: usize| depth.get(u, v);
        let mut curv = Vec::new();
        for v in 0..h {
            for u in 0..w {
                let zuu = if u == 0 {
                    z(2, v) - 2.0 * z(1, v) + z(0, v)
                } else if u == w - 1 {
                    z(u, v) - 2.0 * z(u - 1, v) + z(u - 2, v)
                } else {
                    z(u + 1, v) - 2.0 * z(u, v) + z(u - 1, v)
                };
                let zvv = if v == 0 {
                    z(u, 2) - 2.0 * z(u, 1) + z(u, 0)
                } else if v == h - 1 {
                    z(u, v) - 2.0 * z(u, v - 1) + z(u, v - 2)
                } else {
                    z(u, v + 1) - 2.0 * z(u, v) + z(u, v - 1)
                };
                let zuv = if u > 0 && v > 0 && u < w - 1 && v < h - 1 {
                    (z(u + 1, v + 1) - z(u + 1, v - 1) - z(u - 1, v + 1) + z(u - 1, v - 1)) / 4.0
                } else {
                    let su: isize = if u < w - 1 { 1 } else { -1 };
                    let sv: isize = if v < h - 1 { 1 } else { -1 };
                    let (u2, v2) = ((u as isize + su) as usize, (v as isize + sv) as usize);
                    (z(u2, v2) - z(u2, v) - z(u, v2) + z(u, v)) * (su * sv) as f64
                };
                curv.push(eigen_mean(zuu, zuv, zvv));
            }
        }
        let n = curv.len() as f64;
        let mean = curv.iter().sum::<f64>() / n;
        let std = (curv.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!((got - std).abs() < 1e-9, "{got} vs {std}");
    }

    #[test]
    fn normalization_cases() {
        let mk = |x: f64| GeometricFactors {
            entropy_bits: x,
            edge_density: x / 10.0,
            curvature_std: x * 3.0,
        };
        let n = normalize_factors(&[mk(2.0), mk(4.0), mk(6.0)]);
        let e: Vec<f64> = n.iter().map(|f| f.entropy_norm).collect();
        assert_eq!(e, vec![0.0, 0.5, 1.0]);
        let eq = normalize_factors(&[mk(3.0), mk(3.0)]);
        assert!(eq
            .iter()
            .all(|f| f.entropy_norm == 0.5 && f.edge_norm == 0.5 && f.curvature_norm == 0.5));
        let single = normalize_factors(&[mk(1.0)]);
        assert_eq!(single[0].curvature_norm, 0.5);
    }

    fn arb_region() -> impl Strategy<Value = (Vec<u8>, u64)> {
        (prop::collection::vec(any::<u8>(), 64), any::<u64>())
    }

    proptest! {
        #[test]
        fn entropy_permutation_invariant((pixels, seed) in arb_region()) {
            let img = gray(8, 8, |u, v| pixels[v * 8 + u] as f64 / 255.0);
            let mut perm: Vec<usize> = (0..64).collect();
            // Deterministic shuffle from the seed.
            let mut state = seed | 1;
            for i in (1..64).rev() {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                perm.swap(i, (state % (i as u64 + 1)) as usize);
            }
            let shuffled = gray(8, 8, |u, v| pixels[perm[v * 8 + u]] as f64 / 255.0);
            let r = whole(8, 8);
            prop_assert!((entropy(&img, &r).unwrap() - entropy(&shuffled, &r).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn edge_density_inversion_invariant(pixels in prop::collection::vec(0u8..=255, 100)) {
            let img = gray(10, 10, |u, v| pixels[v * 10 + u] as f64 / 255.0);
            let inv = gray(10, 10, |u, v| 1.0 - pixels[v * 10 + u] as f64 / 255.0);
            let r = whole(10, 10);
            prop_assert_eq!(edge_density(&img, &r).unwrap(), edge_density(&inv, &r).unwrap());
        }

        #[test]
        fn curvature_affine_invariant(
            seedz in prop::collection::vec(-1.0f64..1.0, 144),
            a in -2.0f64..2.0, b in -2.0f64..2.0, c in -5.0f64..5.0,
        ) {
            let base = DepthMap::from_fn(12, 12, |u, v| seedz[v * 12 + u]).unwrap();
            let shifted = DepthMap::from_fn(12, 12, |u, v| seedz[v * 12 + u] + a * u as f64 + b * v as f64 + c).unwrap();
            let r = whole(12, 12);
            prop_assert!((curvature_std(&base, &r).unwrap() - curvature_std(&shifted, &r).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn trace_half_equals_eigen_mean(a in -1e3f64..1e3, b in -1e3f64..1e3, c in -1e3f64..1e3) {
            let h = Hessian { uu: a, uv: b, vv: c };
            prop_assert!((h.mean_curvature() - eigen_mean(a, b, c)).abs() <= 1e-9 * (1.0 + a.abs() + b.abs() + c.abs()));
        }

        #[test]
        fn normalized_in_unit_and_monotone(xs in prop::collection::vec(-100.0f64..100.0, 1..20)) {
            let f: Vec<GeometricFactors> = xs.iter().map(|&x| GeometricFactors { entropy_bits: x, edge_density: x, curvature_std: x }).collect();
            let n = normalize_factors(&f);
            for i in 0..xs.len() {
                prop_assert!((0.0..=1.0).contains(&n[i].entropy_norm));
                for j in 0..xs.len() {
                    if xs[i] < xs[j] {
                        prop_assert!(n[i].entropy_norm <= n[j].entropy_norm);
                    }
                }
            }
        }
    }
}
