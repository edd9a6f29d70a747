//! Forward model of a miniature multi-zone time-of-flight sensor.
//!
//! The sensor sits at the origin looking along +Z. A scene is a plane at a
//! given axis distance and angle-of-incidence, an albedo map over the plane,
//! and optional deviations (boxes resting on the plane, a cliff edge where
//! the plane ends, albedo patches). Rendering casts rays per pixel cone,
//! deposits each hit's expected return as a Gaussian pulse over the range
//! bins, adds the ambient rate, and draws per-bin Poisson counts.
//!
//! Geometry conventions: plane-local coordinates have their origin where the
//! optical axis meets the plane, `x` parallel to the sensor's x axis and `y`
//! pointing away from the sensor along the ground. The expected return of a
//! hit at range `d` is `laser_energy * albedo * cos(incidence) / d^2`.

mod experiments;

pub use experiments::{
    generate_experiment, surface_ids, tune_ambiguity_pair, AmbiguityPair, ExperimentKind,
    ExperimentParams,
};

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::Distribution;

use crate::math;
use crate::{Error, Frame, Label, Result};

/// Sensor intrinsics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SensorSpec {
    /// Pixels per side of the square array (3 => 9 pixels).
    pub pixels_per_side: usize,
    pub bins: usize,
    pub bin_width_m: f64,
    /// Half-angle of each pixel's cone. Pixel centers are spaced two
    /// half-angles apart, so the array spans `6 * half_angle` for a 3x3.
    pub pixel_half_angle_deg: f64,
    /// Temporal blur of the emitted pulse, as a range stddev.
    pub pulse_sigma_m: f64,
    /// Expected signal photons returned from a unit-albedo surface at 1 m
    /// and normal incidence.
    pub laser_energy: f64,
    /// Expected ambient photons per bin.
    pub ambient_rate: f64,
    pub rays_per_pixel: usize,
}

impl Default for SensorSpec {
    fn default() -> Self {
        Self {
            pixels_per_side: 3,
            bins: 128,
            bin_width_m: 0.012,
            pixel_half_angle_deg: 5.0,
            pulse_sigma_m: 0.018,
            laser_energy: 240_000.0,
            ambient_rate: 60.0,
            rays_per_pixel: 1024,
        }
    }
}

impl SensorSpec {
    pub fn pixel_count(&self) -> usize {
        self.pixels_per_side * self.pixels_per_side
    }

    pub fn max_range_m(&self) -> f64 {
        self.bins as f64 * self.bin_width_m
    }

    pub fn validate(&self) -> Result<()> {
        let positive = self.bin_width_m > 0.0
            && self.pixel_half_angle_deg > 0.0
            && self.pulse_sigma_m > 0.0
            && self.laser_energy >= 0.0
            && self.ambient_rate >= 0.0;
        if self.pixels_per_side == 0 || self.bins == 0 || self.rays_per_pixel == 0 || !positive {
            return Err(Error::invalid("sensor spec fields must be positive"));
        }
        Ok(())
    }
}

/// The planar background surface.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlaneSpec {
    /// Distance from the sensor to the plane along the optical axis.
    pub distance_m: f64,
    /// Angle between the optical axis and the plane normal; 0 is head-on.
    pub incidence_deg: f64,
}

/// Reflectance over plane-local coordinates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AlbedoMap {
    Uniform(f64),
    /// Checkerboard of two albedos with square tiles.
    Checker { tile_m: f64, a: f64, b: f64 },
    /// Stripes along the local y axis.
    Stripes { period_m: f64, a: f64, b: f64 },
    /// Hash-based value noise on a square lattice; deterministic in the
    /// scene seed.
    Noise { cell_m: f64, base: f64, amplitude: f64 },
}

impl AlbedoMap {
    fn at(&self, x: f64, y: f64, seed: u64) -> f64 {
        match *self {
            AlbedoMap::Uniform(a) => a,
            AlbedoMap::Checker { tile_m, a, b } => {
                let ix = math::floor(x / tile_m) as i64;
                let iy = math::floor(y / tile_m) as i64;
                if (ix + iy).rem_euclid(2) == 0 {
                    a
                } else {
                    b
                }
            }
            AlbedoMap::Stripes { period_m, a, b } => {
                let iy = math::floor(y / period_m) as i64;
                if iy.rem_euclid(2) == 0 {
                    a
                } else {
                    b
                }
            }
            AlbedoMap::Noise {
                cell_m,
                base,
                amplitude,
            } => {
                let ix = math::floor(x / cell_m) as i64;
                let iy = math::floor(y / cell_m) as i64;
                let cell = ((ix as u64) << 32) ^ (iy as u64 & 0xffff_ffff);
                let h = crate::rng::derive_seed(seed, cell);
                let unit = (h >> 11) as f64 / (1u64 << 53) as f64;
                (base + amplitude * (2.0 * unit - 1.0)).clamp(0.01, 1.0)
            }
        }
    }
}

/// Proxy for glossy surfaces: reflectance gains a lobe around normal
/// incidence instead of a full BRDF.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SurfaceFinish {
    pub specular_strength: f64,
    pub lobe_deg: f64,
}

impl Default for SurfaceFinish {
    fn default() -> Self {
        Self {
            specular_strength: 0.0,
            lobe_deg: 15.0,
        }
    }
}

impl SurfaceFinish {
    fn gain(&self, incidence_rad: f64) -> f64 {
        if self.specular_strength == 0.0 {
            return 1.0;
        }
        let w = self.lobe_deg.to_radians();
        1.0 + self.specular_strength * math::exp(-(incidence_rad * incidence_rad) / (2.0 * w * w))
    }
}

/// Geometric or photometric departures from the bare plane.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Deviation {
    /// Axis-aligned box resting on the plane. `center` is plane-local (x, y)
    /// of its footprint center.
    Box {
        center: [f64; 2],
        width_m: f64,
        depth_m: f64,
        height_m: f64,
        albedo: f64,
    },
    /// The plane ends at local `y = edge_y_m`; geometry beyond it is absent.
    Cliff { edge_y_m: f64 },
    /// Rectangular reflectance override on the plane.
    AlbedoPatch {
        center: [f64; 2],
        width_m: f64,
        depth_m: f64,
        albedo: f64,
    },
}

/// A parametric scene.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SceneSpec {
    pub plane: PlaneSpec,
    pub albedo: AlbedoMap,
    #[cfg_attr(feature = "serde", serde(default))]
    pub finish: SurfaceFinish,
    #[cfg_attr(feature = "serde", serde(default))]
    pub deviations: Vec<Deviation>,
    /// Plane-local offset applied to the albedo map; models the sensor
    /// translating parallel to the surface between captures.
    #[cfg_attr(feature = "serde", serde(default))]
    pub texture_offset: [f64; 2],
    /// Seed for procedural textures.
    #[cfg_attr(feature = "serde", serde(default))]
    pub seed: u64,
}

impl SceneSpec {
    pub fn validate(&self, sensor: &SensorSpec) -> Result<()> {
        if !(self.plane.distance_m > 0.0) {
            return Err(Error::invalid("plane distance must be positive"));
        }
        if !(0.0..90.0).contains(&self.plane.incidence_deg) {
            return Err(Error::invalid("incidence angle must lie in [0, 90)"));
        }
        if self.plane.distance_m >= sensor.max_range_m() {
            return Err(Error::EmptyScene);
        }
        let albedo_ok = |a: f64| a > 0.0 && a <= 1.0;
        let map_ok = match self.albedo {
            AlbedoMap::Uniform(a) => albedo_ok(a),
            AlbedoMap::Checker { a, b, tile_m } => albedo_ok(a) && albedo_ok(b) && tile_m > 0.0,
            AlbedoMap::Stripes { a, b, period_m } => {
                albedo_ok(a) && albedo_ok(b) && period_m > 0.0
            }
            AlbedoMap::Noise { base, .. } => albedo_ok(base),
        };
        if !map_ok {
            return Err(Error::invalid("albedos must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Vec3 {
    x: f64,
    y: f64,
    z: f64,
}

impl Vec3 {
    fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    fn scale(self, s: f64) -> Vec3 {
        Vec3 {
            x: self.x * s,
            y: self.y * s,
            z: self.z * s,
        }
    }

    fn add(self, o: Vec3) -> Vec3 {
        Vec3 {
            x: self.x + o.x,
            y: self.y + o.y,
            z: self.z + o.z,
        }
    }

    fn cross(self, o: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    fn normalize(self) -> Vec3 {
        let n = math::sqrt(self.dot(self));
        self.scale(1.0 / n)
    }
}

/// Plane frame: origin where the axis meets the plane, `e1`/`e2` spanning
/// the plane, `normal` facing the sensor.
struct PlaneFrame {
    origin: Vec3,
    e1: Vec3,
    e2: Vec3,
    normal: Vec3,
}

impl PlaneFrame {
    fn build(plane: &PlaneSpec) -> Self {
        let theta = plane.incidence_deg.to_radians();
        // Normal tilted about the x axis; it faces the sensor (dot with the
        // +Z view direction is negative).
        let normal = Vec3 {
            x: 0.0,
            y: math::sin(theta),
            z: -math::cos(theta),
        };
        let origin = Vec3 {
            x: 0.0,
            y: 0.0,
            z: plane.distance_m,
        };
        let e1 = Vec3 {
            x: 1.0,
            y: 0.0,
            z: 0.0,
        };
        // e1 x n points away from the sensor along the ground, so local +y
        // means farther from the sensor's foot point.
        let e2 = e1.cross(normal).normalize();
        Self {
            origin,
            e1,
            e2,
            normal,
        }
    }

    fn local(&self, p: Vec3) -> (f64, f64) {
        let d = p.add(self.origin.scale(-1.0));
        (d.dot(self.e1), d.dot(self.e2))
    }
}

struct Hit {
    range: f64,
    albedo: f64,
    /// cos of the angle between the ray and the surface normal at the hit.
    cos_incidence: f64,
    /// Incidence against the plane normal, for the specular proxy.
    plane_incidence_rad: f64,
    on_plane: bool,
}

fn intersect_plane(frame: &PlaneFrame, dir: Vec3) -> Option<(f64, Vec3)> {
    let denom = dir.dot(frame.normal);
    if denom >= -1e-12 {
        return None;
    }
    let t = frame.origin.dot(frame.normal) / denom;
    if t <= 1e-9 {
        return None;
    }
    Some((t, dir.scale(t)))
}

/// Slab test against a box sitting on the plane, expressed in the frame
/// (e1, e2, up) with origin at the footprint center. Returns the entry
/// distance and face normal.
fn intersect_box(
    frame: &PlaneFrame,
    dir: Vec3,
    center: [f64; 2],
    half: [f64; 2],
    height: f64,
) -> Option<(f64, Vec3)> {
    // The plane normal faces the sensor, so "up" from the surface is +n.
    let up = frame.normal;
    let base = frame
        .origin
        .add(frame.e1.scale(center[0]))
        .add(frame.e2.scale(center[1]));
    let rel = base.scale(-1.0);
    let o = [rel.dot(frame.e1), rel.dot(frame.e2), rel.dot(up)];
    let d = [dir.dot(frame.e1), dir.dot(frame.e2), dir.dot(up)];
    let bounds = [(-half[0], half[0]), (-half[1], half[1]), (0.0, height)];
    let mut t_near = 1e-9;
    let mut t_far = f64::INFINITY;
    let mut near_axis = usize::MAX;
    for axis in 0..3 {
        if d[axis].abs() < 1e-15 {
            if o[axis] < bounds[axis].0 || o[axis] > bounds[axis].1 {
                return None;
            }
            continue;
        }
        let inv = 1.0 / d[axis];
        let mut t0 = (bounds[axis].0 - o[axis]) * inv;
        let mut t1 = (bounds[axis].1 - o[axis]) * inv;
        if t0 > t1 {
            core::mem::swap(&mut t0, &mut t1);
        }
        if t0 > t_near {
            t_near = t0;
            near_axis = axis;
        }
        t_far = t_far.min(t1);
        if t_near > t_far {
            return None;
        }
    }
    if near_axis == usize::MAX {
        // Sensor inside the box column; treat as no hit.
        return None;
    }
    let axes = [frame.e1, frame.e2, up];
    let sign = if d[near_axis] > 0.0 { -1.0 } else { 1.0 };
    Some((t_near, axes[near_axis].scale(sign)))
}

fn trace(scene: &SceneSpec, frame: &PlaneFrame, dir: Vec3) -> Option<Hit> {
    let mut nearest: Option<Hit> = None;

    if let Some((t, p)) = intersect_plane(frame, dir) {
        let (px, py) = frame.local(p);
        let beyond_cliff = scene.deviations.iter().any(|d| match d {
            Deviation::Cliff { edge_y_m } => py > *edge_y_m,
            _ => false,
        });
        if !beyond_cliff {
            let mut albedo = scene.albedo.at(
                px + scene.texture_offset[0],
                py + scene.texture_offset[1],
                scene.seed,
            );
            for d in &scene.deviations {
                if let Deviation::AlbedoPatch {
                    center,
                    width_m,
                    depth_m,
                    albedo: a,
                } = d
                {
                    if (px - center[0]).abs() <= width_m / 2.0
                        && (py - center[1]).abs() <= depth_m / 2.0
                    {
                        albedo = *a;
                    }
                }
            }
            let cos = -dir.dot(frame.normal);
            nearest = Some(Hit {
                range: t,
                albedo,
                cos_incidence: cos,
                plane_incidence_rad: math::acos(cos.clamp(-1.0, 1.0)),
                on_plane: true,
            });
        }
    }

    for d in &scene.deviations {
        if let Deviation::Box {
            center,
            width_m,
            depth_m,
            height_m,
            albedo,
        } = d
        {
            let half = [width_m / 2.0, depth_m / 2.0];
            if let Some((t, n)) = intersect_box(frame, dir, *center, half, *height_m) {
                if nearest.as_ref().is_none_or(|h| t < h.range) {
                    let cos = (-dir.dot(n)).max(0.0);
                    nearest = Some(Hit {
                        range: t,
                        albedo: *albedo,
                        cos_incidence: cos,
                        plane_incidence_rad: math::acos(cos.clamp(-1.0, 1.0)),
                        on_plane: false,
                    });
                }
            }
        }
    }

    nearest
}

fn pixel_axes(sensor: &SensorSpec) -> Vec<Vec3> {
    let side = sensor.pixels_per_side;
    let pitch = 2.0 * sensor.pixel_half_angle_deg.to_radians();
    let mid = (side as f64 - 1.0) / 2.0;
    let mut axes = Vec::with_capacity(side * side);
    for row in 0..side {
        for col in 0..side {
            // Row 0 is the top of the array (elevated, toward the plane
            // normal side); azimuth grows to the right.
            let el = (mid - row as f64) * pitch;
            let az = (col as f64 - mid) * pitch;
            let dir = Vec3 {
                x: math::sin(az) * math::cos(el),
                y: math::sin(el),
                z: math::cos(az) * math::cos(el),
            };
            axes.push(dir.normalize());
        }
    }
    axes
}

/// Uniform direction within a cone of `half_angle` around `axis`.
fn sample_cone(axis: Vec3, half_angle_rad: f64, rng: &mut impl Rng) -> Vec3 {
    let cos_min = math::cos(half_angle_rad);
    let cos_t = 1.0 - rng.gen::<f64>() * (1.0 - cos_min);
    let sin_t = math::sqrt((1.0 - cos_t * cos_t).max(0.0));
    let phi = rng.gen::<f64>() * 2.0 * core::f64::consts::PI;
    let helper = if axis.z.abs() < 0.9 {
        Vec3 {
            x: 0.0,
            y: 0.0,
            z: 1.0,
        }
    } else {
        Vec3 {
            x: 1.0,
            y: 0.0,
            z: 0.0,
        }
    };
    let u = helper.cross(axis).normalize();
    let v = axis.cross(u);
    axis.scale(cos_t)
        .add(u.scale(sin_t * math::cos(phi)))
        .add(v.scale(sin_t * math::sin(phi)))
        .normalize()
}

/// Noiseless expectation of one capture: per-pixel expected bin values
/// (ambient included) plus the matched-filter proxy distance per pixel.
#[derive(Debug, Clone)]
pub struct ExpectedCapture {
    pub histograms: Vec<Vec<f64>>,
    pub proxy_distances_m: Vec<f64>,
}

impl ExpectedCapture {
    /// Total expected signal mass with the ambient floor removed.
    pub fn signal_mass(&self, sensor: &SensorSpec) -> f64 {
        let ambient = sensor.ambient_rate * (sensor.bins * self.histograms.len()) as f64;
        self.histograms.iter().flatten().sum::<f64>() - ambient
    }
}

/// Render the expected (noise-free) histograms of a scene.
///
/// Ray directions are sampled deterministically from `seed`, so the
/// expectation is reproducible; the same ray set underlies [`render_frame`]
/// with the same seed.
pub fn render_expected(
    sensor: &SensorSpec,
    scene: &SceneSpec,
    seed: u64,
) -> Result<ExpectedCapture> {
    sensor.validate()?;
    scene.validate(sensor)?;

    let frame = PlaneFrame::build(&scene.plane);
    let axes = pixel_axes(sensor);
    let half_angle = sensor.pixel_half_angle_deg.to_radians();
    let bins = sensor.bins;
    let bw = sensor.bin_width_m;
    let sigma = sensor.pulse_sigma_m;
    let ray_weight = 1.0 / sensor.rays_per_pixel as f64;

    let mut histograms = Vec::with_capacity(axes.len());
    let mut proxies = Vec::with_capacity(axes.len());

    for (pixel, &axis) in axes.iter().enumerate() {
        let mut expected = vec![0.0f64; bins];
        let mut rng = crate::rng::rng_for(seed, 0x7069_7800 + pixel as u64);
        for _ in 0..sensor.rays_per_pixel {
            let dir = sample_cone(axis, half_angle, &mut rng);
            let Some(hit) = trace(scene, &frame, dir) else {
                continue;
            };
            if hit.range >= sensor.max_range_m() + 5.0 * sigma {
                continue;
            }
            let gain = if hit.on_plane {
                scene.finish.gain(hit.plane_incidence_rad)
            } else {
                1.0
            };
            let mass = sensor.laser_energy * hit.albedo * gain * hit.cos_incidence
                / (hit.range * hit.range)
                * ray_weight;
            deposit_pulse(&mut expected, bw, sigma, hit.range, mass);
        }
        proxies.push(matched_filter_distance(&expected, sensor));
        for v in &mut expected {
            *v += sensor.ambient_rate;
        }
        histograms.push(expected);
    }

    Ok(ExpectedCapture {
        histograms,
        proxy_distances_m: proxies,
    })
}

/// Spread `mass` as a Gaussian pulse centered at `range` over the bins,
/// truncated at five sigma.
fn deposit_pulse(bins: &mut [f64], bin_width: f64, sigma: f64, range: f64, mass: f64) {
    let lo = (((range - 5.0 * sigma) / bin_width).max(0.0)) as usize;
    let hi = (((range + 5.0 * sigma) / bin_width) as usize + 1).min(bins.len());
    for (i, b) in bins.iter_mut().enumerate().take(hi).skip(lo) {
        let a = (i as f64 * bin_width - range) / sigma;
        let z = ((i + 1) as f64 * bin_width - range) / sigma;
        *b += mass * (math::normal_cdf(z) - math::normal_cdf(a));
    }
}

/// Argmax of the correlation between the ambient-free expected histogram and
/// the pulse shape, quantized to one bin. Pixels with no signal report the
/// maximum range. This proxy deliberately reduces each histogram to a single
/// distance, mimicking an onboard estimator.
fn matched_filter_distance(signal: &[f64], sensor: &SensorSpec) -> f64 {
    let total: f64 = signal.iter().sum();
    if total < 1e-9 {
        return sensor.max_range_m();
    }
    let sigma_bins = sensor.pulse_sigma_m / sensor.bin_width_m;
    let radius = (4.0 * sigma_bins) as i64 + 1;
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|o| math::exp(-0.5 * (o as f64 / sigma_bins) * (o as f64 / sigma_bins)))
        .collect();
    let mut best = (f64::NEG_INFINITY, 0usize);
    for s in 0..signal.len() {
        let mut corr = 0.0;
        for (ki, &kv) in kernel.iter().enumerate() {
            let idx = s as i64 + ki as i64 - radius;
            if idx >= 0 && (idx as usize) < signal.len() {
                corr += kv * signal[idx as usize];
            }
        }
        if corr > best.0 {
            best = (corr, s);
        }
    }
    best.1 as f64 * sensor.bin_width_m
}

/// Render one noisy frame: Poisson counts around the expected histograms,
/// with the matched-filter proxy recorded as the onboard distance.
pub fn render_frame(
    sensor: &SensorSpec,
    scene: &SceneSpec,
    seed: u64,
    capture_id: impl Into<String>,
    surface_id: impl Into<String>,
    label: Label,
) -> Result<Frame> {
    let expected = render_expected(sensor, scene, seed)?;
    let mut pixels = Vec::with_capacity(expected.histograms.len());
    for (pixel, hist) in expected.histograms.iter().enumerate() {
        let mut rng = crate::rng::rng_for(seed, 0x6e6f_6900 + pixel as u64);
        let counts: Vec<u32> = hist
            .iter()
            .map(|&lambda| {
                if lambda <= 0.0 {
                    0
                } else {
                    let poisson = rand_distr::Poisson::new(lambda).unwrap();
                    poisson.sample(&mut rng) as u32
                }
            })
            .collect();
        pixels.push(counts);
    }
    Ok(Frame {
        capture_id: capture_id.into(),
        surface_id: surface_id.into(),
        label,
        sublabel: None,
        deviation_distance_m: None,
        pixels,
        onboard_distances_m: Some(expected.proxy_distances_m),
    })
}

/// Noise-free frame: expected values rounded to integer counts.
pub fn render_frame_noiseless(
    sensor: &SensorSpec,
    scene: &SceneSpec,
    seed: u64,
    capture_id: impl Into<String>,
    surface_id: impl Into<String>,
    label: Label,
) -> Result<Frame> {
    let expected = render_expected(sensor, scene, seed)?;
    let pixels = expected
        .histograms
        .iter()
        .map(|h| h.iter().map(|&v| math::round(v) as u32).collect())
        .collect();
    Ok(Frame {
        capture_id: capture_id.into(),
        surface_id: surface_id.into(),
        label,
        sublabel: None,
        deviation_distance_m: None,
        pixels,
        onboard_distances_m: Some(expected.proxy_distances_m),
    })
}

/// Ground distance from the sensor's projection onto the plane to the point
/// where the optical axis meets it. Protocol code uses this to convert
/// "distance from the sensor along the ground" into plane-local y.
pub fn axis_ground_offset_m(plane: &PlaneSpec) -> f64 {
    plane.distance_m * math::sin(plane.incidence_deg.to_radians())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn flat_scene(distance: f64, incidence: f64, albedo: f64) -> SceneSpec {
        SceneSpec {
            plane: PlaneSpec {
                distance_m: distance,
                incidence_deg: incidence,
            },
            albedo: AlbedoMap::Uniform(albedo),
            finish: SurfaceFinish::default(),
            deviations: Vec::new(),
            texture_offset: [0.0, 0.0],
            seed: 0,
        }
    }

    #[test]
    fn ambient_only_scene_is_poisson_noise() {
        let sensor = SensorSpec {
            laser_energy: 0.0,
            ambient_rate: 20.0,
            ..SensorSpec::default()
        };
        let scene = flat_scene(0.5, 0.0, 0.5);
        let mut sum = 0.0;
        let mut count = 0usize;
        for seed in 0..9 {
            let f = render_frame(&sensor, &scene, seed, "c", "s", Label::Planar).unwrap();
            for px in &f.pixels {
                for &v in px {
                    sum += v as f64;
                    count += 1;
                }
            }
        }
        assert!(count >= 10_000);
        let mean = sum / count as f64;
        assert!((mean - 20.0).abs() < 0.5, "mean {mean}");
    }

    #[test]
    fn normal_incidence_mass_matches_closed_form() {
        // A pencil-thin cone makes every ray hit at almost exactly 0.5 m.
        let sensor = SensorSpec {
            pixel_half_angle_deg: 0.05,
            laser_energy: 1000.0,
            ambient_rate: 0.0,
            ..SensorSpec::default()
        };
        let scene = flat_scene(0.5, 0.0, 0.8);
        let cap = render_expected(&sensor, &scene, 3).unwrap();
        let expected_mass = 1000.0 * 0.8 / 0.25;
        for hist in &cap.histograms {
            let total: f64 = hist.iter().sum();
            assert!(
                (total - expected_mass).abs() < 1e-3 * expected_mass,
                "total {total} vs {expected_mass}"
            );
            let lo = ((0.5 - 3.0 * sensor.pulse_sigma_m) / sensor.bin_width_m) as usize;
            let hi = ((0.5 + 3.0 * sensor.pulse_sigma_m) / sensor.bin_width_m) as usize + 1;
            let inside: f64 = hist[lo..hi].iter().sum();
            assert!(inside / total > 0.995);
        }
    }

    #[test]
    fn doubling_albedo_doubles_signal_mass() {
        let sensor = SensorSpec {
            ambient_rate: 0.0,
            ..SensorSpec::default()
        };
        for seed in 0..100 {
            let a = render_expected(&sensor, &flat_scene(0.4, 30.0, 0.4), seed).unwrap();
            let b = render_expected(&sensor, &flat_scene(0.4, 30.0, 0.8), seed).unwrap();
            let ta: f64 = a.histograms.iter().flatten().sum();
            let tb: f64 = b.histograms.iter().flatten().sum();
            assert!((tb / ta - 2.0).abs() < 0.01, "ratio {}", tb / ta);
        }
    }

    #[test]
    fn signal_falls_off_as_inverse_square() {
        let sensor = SensorSpec {
            ambient_rate: 0.0,
            bins: 256,
            ..SensorSpec::default()
        };
        let distances = [0.3, 0.4, 0.5, 0.7, 0.9, 1.2];
        let mut xs = alloc::vec::Vec::new();
        let mut ys = alloc::vec::Vec::new();
        for &d in &distances {
            let cap = render_expected(&sensor, &flat_scene(d, 0.0, 0.5), 11).unwrap();
            let total: f64 = cap.histograms.iter().flatten().sum();
            xs.push(math::ln(d));
            ys.push(math::ln(total));
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let slope = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>()
            / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
        assert!((slope + 2.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn bins_nearer_than_any_surface_hold_only_ambient() {
        let sensor = SensorSpec {
            ambient_rate: 7.0,
            ..SensorSpec::default()
        };
        let scene = flat_scene(0.6, 20.0, 0.6);
        let cap = render_expected(&sensor, &scene, 5).unwrap();
        // Nearest possible hit is around the plane distance; stay well under
        // it including the truncated pulse tail.
        let nearest = 0.6 * 0.9;
        let guard = ((nearest - 6.0 * sensor.pulse_sigma_m) / sensor.bin_width_m) as usize;
        for hist in &cap.histograms {
            for &v in &hist[..guard] {
                assert_eq!(v, sensor.ambient_rate);
            }
        }
    }

    #[test]
    fn same_seed_renders_identical_frames() {
        let sensor = SensorSpec::default();
        let scene = flat_scene(0.5, 45.0, 0.5);
        let a = render_frame(&sensor, &scene, 42, "c", "s", Label::Planar).unwrap();
        let b = render_frame(&sensor, &scene, 42, "c", "s", Label::Planar).unwrap();
        assert_eq!(a, b);
        let c = render_frame(&sensor, &scene, 43, "c", "s", Label::Planar).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn cliff_removes_mass_monotonically_as_edge_recedes() {
        let sensor = SensorSpec {
            pixel_half_angle_deg: 10.0,
            ..SensorSpec::default()
        };
        let mut totals = alloc::vec::Vec::new();
        for edge in [0.05, 0.15, 0.25, 0.35, 0.45] {
            let mut scene = flat_scene(0.2, 60.0, 0.5);
            let offset = axis_ground_offset_m(&scene.plane);
            scene.deviations.push(Deviation::Cliff {
                edge_y_m: edge - offset,
            });
            let cap = render_expected(&sensor, &scene, 9).unwrap();
            totals.push(cap.signal_mass(&sensor));
        }
        for w in totals.windows(2) {
            assert!(w[0] <= w[1] + 1e-9, "mass should grow with edge distance");
        }
    }

    #[test]
    fn scene_beyond_max_range_is_empty() {
        let sensor = SensorSpec::default();
        let scene = flat_scene(2.0, 0.0, 0.5);
        assert!(matches!(
            render_expected(&sensor, &scene, 0),
            Err(Error::EmptyScene)
        ));
    }

    #[test]
    fn box_shortens_the_proxy_distance() {
        let sensor = SensorSpec::default();
        let mut scene = flat_scene(0.5, 0.0, 0.5);
        let flat = render_expected(&sensor, &scene, 1).unwrap();
        scene.deviations.push(Deviation::Box {
            center: [0.0, 0.0],
            width_m: 0.3,
            depth_m: 0.3,
            height_m: 0.2,
            albedo: 0.6,
        });
        let boxed = render_expected(&sensor, &scene, 1).unwrap();
        let center_pixel = sensor.pixel_count() / 2;
        assert!(
            boxed.proxy_distances_m[center_pixel] < flat.proxy_distances_m[center_pixel] - 0.1,
            "box {} vs flat {}",
            boxed.proxy_distances_m[center_pixel],
            flat.proxy_distances_m[center_pixel]
        );
    }

    #[test]
    fn render_smoke_full_frame() {
        let sensor = SensorSpec::default();
        let scene = flat_scene(0.2, 60.0, 0.5);
        let f = render_frame(&sensor, &scene, 77, "cap".to_string(), "surf", Label::Planar)
            .unwrap();
        f.validate().unwrap();
        assert_eq!(f.pixels.len(), 9);
        assert_eq!(f.pixels[0].len(), 128);
        assert!(f.onboard_distances_m.is_some());
    }
}
