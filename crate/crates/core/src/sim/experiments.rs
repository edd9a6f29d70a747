//! Scripted dataset generators mirroring the evaluation protocols: a
//! forward-facing obstacle course over five floor surfaces, a top-down
//! variant, a cliff-distance sweep, a tuned geometry-vs-albedo ambiguity
//! pair, and a controlled small-relief sensitivity capture.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{
    axis_ground_offset_m, render_expected, render_frame, AlbedoMap, Deviation, PlaneSpec,
    SceneSpec, SensorSpec, SurfaceFinish,
};
use crate::rng::{derive_seed, rng_for};
use crate::{Error, Frame, Label, Result};

/// Which protocol-shaped dataset to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ExperimentKind {
    /// Five floor surfaces, eight obstacle types at 0.1-0.8 m, low mount at
    /// a steep angle.
    ForwardFacing,
    /// Sensor pointing straight down from 28 cm over one surface.
    TopDown,
    /// Table-edge sweep in 5 cm increments plus held-out planar captures.
    CliffSweep,
    /// A box and an albedo patch tuned to the same expected histograms.
    AmbiguityDemo,
    /// Controlled flat-vs-thin-patch captures without moving anything.
    SensitivityDemo,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ForwardFacing => "forward_facing",
            ExperimentKind::TopDown => "top_down",
            ExperimentKind::CliffSweep => "cliff_sweep",
            ExperimentKind::AmbiguityDemo => "ambiguity_demo",
            ExperimentKind::SensitivityDemo => "sensitivity_demo",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "forward_facing" | "forward-facing" => Some(Self::ForwardFacing),
            "top_down" | "top-down" => Some(Self::TopDown),
            "cliff_sweep" | "cliff-sweep" => Some(Self::CliffSweep),
            "ambiguity_demo" | "ambiguity-demo" => Some(Self::AmbiguityDemo),
            "sensitivity_demo" | "sensitivity-demo" => Some(Self::SensitivityDemo),
            _ => None,
        }
    }
}

/// Counts and ranges for the generators; the defaults reproduce the
/// protocol shapes (550 forward-facing frames, 75 cliff frames, ...).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ExperimentParams {
    pub planar_per_surface: usize,
    pub placements_per_object: usize,
    pub object_distance_min_m: f64,
    pub object_distance_max_m: f64,
    pub cliff_step_m: f64,
    pub cliff_steps: usize,
    pub cliff_frames_per_step: usize,
    pub cliff_planar: usize,
    pub ambiguity_planar: usize,
    pub ambiguity_pairs: usize,
    pub sensitivity_frames: usize,
    /// Replaces the per-kind sensor model when set.
    pub sensor: Option<SensorSpec>,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self {
            planar_per_surface: 30,
            placements_per_object: 10,
            object_distance_min_m: 0.1,
            object_distance_max_m: 0.8,
            cliff_step_m: 0.05,
            cliff_steps: 15,
            cliff_frames_per_step: 4,
            cliff_planar: 15,
            ambiguity_planar: 40,
            ambiguity_pairs: 12,
            sensitivity_frames: 16,
            sensor: None,
        }
    }
}

#[cfg(feature = "serde")]
impl ExperimentParams {
    pub fn is_default(&self) -> bool {
        *self == Self::default()
    }
}

/// The low forward-facing mount: 10 cm above the ground at 60 degrees
/// angle-of-incidence, so the optical axis meets the ground 0.2 m out. Wide
/// pixels put the top of the field of view parallel to the ground.
fn forward_sensor() -> SensorSpec {
    SensorSpec {
        pixel_half_angle_deg: 10.0,
        ..SensorSpec::default()
    }
}

fn forward_plane() -> PlaneSpec {
    PlaneSpec {
        distance_m: 0.2,
        incidence_deg: 60.0,
    }
}

struct SurfaceProfile {
    id: &'static str,
    albedo: AlbedoMap,
    finish: SurfaceFinish,
    ambient_base: f64,
}

fn floor_surfaces() -> Vec<SurfaceProfile> {
    vec![
        SurfaceProfile {
            id: "paper_sheet",
            albedo: AlbedoMap::Noise {
                cell_m: 0.06,
                base: 0.85,
                amplitude: 0.05,
            },
            finish: SurfaceFinish::default(),
            ambient_base: 400.0,
        },
        SurfaceProfile {
            id: "patterned_carpet",
            albedo: AlbedoMap::Checker {
                tile_m: 0.03,
                a: 0.2,
                b: 0.65,
            },
            finish: SurfaceFinish::default(),
            ambient_base: 500.0,
        },
        SurfaceProfile {
            id: "solid_carpet",
            albedo: AlbedoMap::Noise {
                cell_m: 0.04,
                base: 0.35,
                amplitude: 0.08,
            },
            finish: SurfaceFinish::default(),
            ambient_base: 500.0,
        },
        SurfaceProfile {
            id: "tile_floor",
            albedo: AlbedoMap::Checker {
                tile_m: 0.1,
                a: 0.66,
                b: 0.74,
            },
            finish: SurfaceFinish {
                specular_strength: 1.5,
                lobe_deg: 20.0,
            },
            ambient_base: 600.0,
        },
        SurfaceProfile {
            id: "wood_floor",
            // Plank stripes, captured in sunlight: a much higher ambient.
            albedo: AlbedoMap::Stripes {
                period_m: 0.05,
                a: 0.4,
                b: 0.62,
            },
            finish: SurfaceFinish::default(),
            ambient_base: 1500.0,
        },
    ]
}

struct ObjectShape {
    name: &'static str,
    width_m: f64,
    depth_m: f64,
    height_m: f64,
    albedo: f64,
}

fn obstacle_objects() -> Vec<ObjectShape> {
    vec![
        ObjectShape {
            name: "bottle_cap",
            width_m: 0.035,
            depth_m: 0.035,
            height_m: 0.02,
            albedo: 0.6,
        },
        ObjectShape {
            name: "cable",
            width_m: 0.3,
            depth_m: 0.025,
            height_m: 0.015,
            albedo: 0.25,
        },
        ObjectShape {
            name: "chair_leg",
            width_m: 0.04,
            depth_m: 0.04,
            height_m: 0.45,
            albedo: 0.5,
        },
        ObjectShape {
            name: "fork",
            width_m: 0.18,
            depth_m: 0.03,
            height_m: 0.015,
            albedo: 0.75,
        },
        ObjectShape {
            name: "glove",
            width_m: 0.18,
            depth_m: 0.12,
            height_m: 0.03,
            albedo: 0.4,
        },
        ObjectShape {
            name: "sd_card",
            width_m: 0.032,
            depth_m: 0.024,
            height_m: 0.006,
            albedo: 0.55,
        },
        ObjectShape {
            name: "tennis_ball",
            width_m: 0.065,
            depth_m: 0.065,
            height_m: 0.065,
            albedo: 0.8,
        },
        ObjectShape {
            name: "wall",
            width_m: 1.2,
            depth_m: 0.08,
            height_m: 0.5,
            albedo: 0.7,
        },
    ]
}

fn scale_albedo(map: &AlbedoMap, gain: f64) -> AlbedoMap {
    let s = |a: f64| (a * gain).clamp(0.01, 1.0);
    match *map {
        AlbedoMap::Uniform(a) => AlbedoMap::Uniform(s(a)),
        AlbedoMap::Checker { tile_m, a, b } => AlbedoMap::Checker {
            tile_m,
            a: s(a),
            b: s(b),
        },
        AlbedoMap::Stripes { period_m, a, b } => AlbedoMap::Stripes {
            period_m,
            a: s(a),
            b: s(b),
        },
        AlbedoMap::Noise {
            cell_m,
            base,
            amplitude,
        } => AlbedoMap::Noise {
            cell_m,
            base: s(base),
            amplitude,
        },
    }
}

/// Per-capture nuisance variation: the sensor slides parallel to the
/// surface, the scene gain drifts with viewpoint, and ambient light varies.
struct CaptureVariation {
    texture_offset: [f64; 2],
    albedo_gain: f64,
    ambient_rate: f64,
}

fn draw_variation(rng: &mut impl Rng, ambient_base: f64) -> CaptureVariation {
    CaptureVariation {
        texture_offset: [rng.gen::<f64>() * 0.5, rng.gen::<f64>() * 0.5],
        albedo_gain: 0.85 + rng.gen::<f64>() * 0.3,
        ambient_rate: ambient_base * (0.7 + rng.gen::<f64>() * 0.6),
    }
}

/// Cliff captures keep one table under steady indoor light; only the mount
/// position moves, so the nuisance spread is much narrower.
fn draw_cliff_variation(rng: &mut impl Rng, ambient_base: f64) -> CaptureVariation {
    CaptureVariation {
        texture_offset: [rng.gen::<f64>() * 0.5, rng.gen::<f64>() * 0.5],
        albedo_gain: 0.95 + rng.gen::<f64>() * 0.1,
        ambient_rate: ambient_base * (0.9 + rng.gen::<f64>() * 0.2),
    }
}

fn capture_scene(
    plane: PlaneSpec,
    surface: &SurfaceProfile,
    variation: &CaptureVariation,
    texture_seed: u64,
) -> SceneSpec {
    SceneSpec {
        plane,
        albedo: scale_albedo(&surface.albedo, variation.albedo_gain),
        finish: surface.finish.clone(),
        deviations: Vec::new(),
        texture_offset: variation.texture_offset,
        seed: texture_seed,
    }
}

/// Generate a labeled synthetic dataset for one protocol.
///
/// Frames are bit-deterministic in `(kind, params, seed)`; every frame gets
/// its own derived sub-seed, so row order never feeds randomness.
pub fn generate_experiment(
    kind: ExperimentKind,
    params: &ExperimentParams,
    seed: u64,
) -> Result<Vec<Frame>> {
    match kind {
        ExperimentKind::ForwardFacing => forward_facing(params, seed),
        ExperimentKind::TopDown => top_down(params, seed),
        ExperimentKind::CliffSweep => cliff_sweep(params, seed),
        ExperimentKind::AmbiguityDemo => ambiguity_demo(params, seed),
        ExperimentKind::SensitivityDemo => sensitivity_demo(params, seed),
    }
}

fn forward_facing(params: &ExperimentParams, seed: u64) -> Result<Vec<Frame>> {
    if params.planar_per_surface == 0 || params.placements_per_object == 0 {
        return Err(Error::invalid("frame counts must be positive"));
    }
    let mut sensor = params.sensor.clone().unwrap_or_else(forward_sensor);
    let plane = forward_plane();
    let offset = axis_ground_offset_m(&plane);
    let objects = obstacle_objects();
    let surfaces = floor_surfaces();
    let mut frames = Vec::new();
    let mut frame_idx = 0u64;

    for surface in &surfaces {
        let texture_seed = derive_seed(seed, surface.id.len() as u64 ^ 0xabc0);
        for i in 0..params.planar_per_surface {
            let frame_seed = derive_seed(seed, frame_idx);
            frame_idx += 1;
            let mut rng = rng_for(frame_seed, 1);
            let variation = draw_variation(&mut rng, surface.ambient_base);
            sensor.ambient_rate = variation.ambient_rate;
            let scene = capture_scene(plane.clone(), surface, &variation, texture_seed);
            frames.push(render_frame(
                &sensor,
                &scene,
                frame_seed,
                format!("ff_{}_planar_{i:03}", surface.id),
                surface.id,
                Label::Planar,
            )?);
        }
        for object in &objects {
            for p in 0..params.placements_per_object {
                let frame_seed = derive_seed(seed, frame_idx);
                frame_idx += 1;
                let mut rng = rng_for(frame_seed, 1);
                let variation = draw_variation(&mut rng, surface.ambient_base);
                sensor.ambient_rate = variation.ambient_rate;
                let span = params.object_distance_max_m - params.object_distance_min_m;
                let ground = params.object_distance_min_m
                    + span * p as f64 / (params.placements_per_object.max(2) - 1) as f64;
                let lateral = (rng.gen::<f64>() - 0.5) * 0.08;
                let mut scene = capture_scene(plane.clone(), surface, &variation, texture_seed);
                scene.deviations.push(Deviation::Box {
                    center: [lateral, ground - offset],
                    width_m: object.width_m,
                    depth_m: object.depth_m,
                    height_m: object.height_m,
                    albedo: object.albedo,
                });
                let mut frame = render_frame(
                    &sensor,
                    &scene,
                    frame_seed,
                    format!("ff_{}_{}_{p:02}", surface.id, object.name),
                    surface.id,
                    Label::Deviation,
                )?;
                frame.sublabel = Some(object.name.into());
                frame.deviation_distance_m = Some(ground);
                frames.push(frame);
            }
        }
    }
    Ok(frames)
}

fn top_down(params: &ExperimentParams, seed: u64) -> Result<Vec<Frame>> {
    let mut sensor = params.sensor.clone().unwrap_or_default();
    let plane = PlaneSpec {
        distance_m: 0.28,
        incidence_deg: 0.0,
    };
    let surface = &floor_surfaces()[2]; // solid carpet
    let objects: Vec<ObjectShape> = obstacle_objects()
        .into_iter()
        .filter(|o| o.name != "chair_leg" && o.name != "wall")
        .collect();
    let mut frames = Vec::new();
    let mut frame_idx = 0u64;
    let texture_seed = derive_seed(seed, 0x70d0);

    for i in 0..params.planar_per_surface {
        let frame_seed = derive_seed(seed, frame_idx);
        frame_idx += 1;
        let mut rng = rng_for(frame_seed, 1);
        let variation = draw_variation(&mut rng, surface.ambient_base);
        sensor.ambient_rate = variation.ambient_rate;
        let scene = capture_scene(plane.clone(), surface, &variation, texture_seed);
        frames.push(render_frame(
            &sensor,
            &scene,
            frame_seed,
            format!("td_planar_{i:03}"),
            surface.id,
            Label::Planar,
        )?);
    }
    for object in &objects {
        for p in 0..params.placements_per_object {
            let frame_seed = derive_seed(seed, frame_idx);
            frame_idx += 1;
            let mut rng = rng_for(frame_seed, 1);
            let variation = draw_variation(&mut rng, surface.ambient_base);
            sensor.ambient_rate = variation.ambient_rate;
            let mut scene = capture_scene(plane.clone(), surface, &variation, texture_seed);
            // Offset within the viewed disc (~7.5 cm radius at 28 cm).
            let cx = (rng.gen::<f64>() - 0.5) * 0.1;
            let cy = (rng.gen::<f64>() - 0.5) * 0.1;
            scene.deviations.push(Deviation::Box {
                center: [cx, cy],
                width_m: object.width_m,
                depth_m: object.depth_m,
                height_m: object.height_m,
                albedo: object.albedo,
            });
            let mut frame = render_frame(
                &sensor,
                &scene,
                frame_seed,
                format!("td_{}_{p:02}", object.name),
                surface.id,
                Label::Deviation,
            )?;
            frame.sublabel = Some(object.name.into());
            frames.push(frame);
        }
    }
    Ok(frames)
}

fn cliff_sweep(params: &ExperimentParams, seed: u64) -> Result<Vec<Frame>> {
    let mut sensor = params.sensor.clone().unwrap_or_else(forward_sensor);
    let plane = forward_plane();
    let offset = axis_ground_offset_m(&plane);
    let table = SurfaceProfile {
        id: "wood_table",
        albedo: AlbedoMap::Noise {
            cell_m: 0.06,
            base: 0.55,
            amplitude: 0.03,
        },
        finish: SurfaceFinish::default(),
        ambient_base: 500.0,
    };
    let texture_seed = derive_seed(seed, 0xc11f);
    let mut frames = Vec::new();
    let mut frame_idx = 0u64;

    for i in 0..params.cliff_planar {
        let frame_seed = derive_seed(seed, frame_idx);
        frame_idx += 1;
        let mut rng = rng_for(frame_seed, 1);
        let variation = draw_cliff_variation(&mut rng, table.ambient_base);
        sensor.ambient_rate = variation.ambient_rate;
        let scene = capture_scene(plane.clone(), &table, &variation, texture_seed);
        frames.push(render_frame(
            &sensor,
            &scene,
            frame_seed,
            format!("cliff_planar_{i:03}"),
            table.id,
            Label::Planar,
        )?);
    }
    for step in 0..params.cliff_steps {
        let edge = params.cliff_step_m * (step + 1) as f64;
        for rep in 0..params.cliff_frames_per_step {
            let frame_seed = derive_seed(seed, frame_idx);
            frame_idx += 1;
            let mut rng = rng_for(frame_seed, 1);
            let variation = draw_cliff_variation(&mut rng, table.ambient_base);
            sensor.ambient_rate = variation.ambient_rate;
            let mut scene = capture_scene(plane.clone(), &table, &variation, texture_seed);
            scene.deviations.push(Deviation::Cliff {
                edge_y_m: edge - offset,
            });
            let mut frame = render_frame(
                &sensor,
                &scene,
                frame_seed,
                format!("cliff_{:03}cm_{rep}", (edge * 100.0) as u32),
                table.id,
                Label::Deviation,
            )?;
            frame.sublabel = Some("cliff".into());
            frame.deviation_distance_m = Some(edge);
            frames.push(frame);
        }
    }
    Ok(frames)
}

/// The scene pair behind the ambiguity demo, with its residual.
#[derive(Debug, Clone)]
pub struct AmbiguityPair {
    pub box_scene: SceneSpec,
    pub patch_scene: SceneSpec,
    /// Relative L1 distance between the expected signal histograms.
    pub relative_l1: f64,
}

/// Tune an albedo patch until its expected histograms match those of a box
/// scene. Searches patch position, depth and albedo by coordinate descent
/// on the relative L1 residual of the ambient-free expected histograms.
pub fn tune_ambiguity_pair(sensor: &SensorSpec, seed: u64) -> Result<AmbiguityPair> {
    let plane = forward_plane();
    let offset = axis_ground_offset_m(&plane);
    let base = SceneSpec {
        plane,
        albedo: AlbedoMap::Uniform(0.5),
        finish: SurfaceFinish::default(),
        deviations: Vec::new(),
        texture_offset: [0.0, 0.0],
        seed: 0,
    };
    let ground = 0.22;
    let box_dev = Deviation::Box {
        center: [0.0, ground - offset],
        width_m: 0.06,
        depth_m: 0.05,
        height_m: 0.004,
        albedo: 0.5,
    };
    let mut box_scene = base.clone();
    box_scene.deviations.push(box_dev);
    let expected_box = render_expected(sensor, &box_scene, seed)?;
    let signal_box: Vec<Vec<f64>> = expected_box
        .histograms
        .iter()
        .map(|h| h.iter().map(|v| v - sensor.ambient_rate).collect())
        .collect();
    let norm: f64 = signal_box.iter().flatten().map(|v: &f64| v.abs()).sum();

    let residual = |patch: &Deviation| -> Result<f64> {
        let mut scene = base.clone();
        scene.deviations.push(patch.clone());
        let cap = render_expected(sensor, &scene, seed)?;
        let mut diff = 0.0;
        for (hist, sig) in cap.histograms.iter().zip(&signal_box) {
            for (v, b) in hist.iter().zip(sig) {
                diff += ((v - sensor.ambient_rate) - b).abs();
            }
        }
        Ok(diff / norm)
    };

    let make_patch = |dy: f64, depth_scale: f64, albedo: f64| Deviation::AlbedoPatch {
        center: [0.0, ground - offset + dy],
        width_m: 0.06,
        depth_m: 0.05 * depth_scale,
        albedo,
    };

    let mut best: Option<(f64, Deviation)> = None;
    for dy_step in -4i32..=4 {
        let dy = dy_step as f64 * 0.005;
        for depth_scale in [0.75, 1.0, 1.25, 1.5] {
            // Golden-section over the patch albedo; the residual is convex
            // in it (the expectation is affine in albedo).
            let (mut lo, mut hi) = (0.3f64, 1.0f64);
            let phi = 0.618_033_988_749_894_8;
            let mut x1 = hi - phi * (hi - lo);
            let mut x2 = lo + phi * (hi - lo);
            let mut f1 = residual(&make_patch(dy, depth_scale, x1))?;
            let mut f2 = residual(&make_patch(dy, depth_scale, x2))?;
            for _ in 0..24 {
                if f1 <= f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - phi * (hi - lo);
                    f1 = residual(&make_patch(dy, depth_scale, x1))?;
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + phi * (hi - lo);
                    f2 = residual(&make_patch(dy, depth_scale, x2))?;
                }
            }
            let (albedo, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, make_patch(dy, depth_scale, albedo)));
            }
        }
    }

    let (relative_l1, patch) = best.unwrap();
    let mut patch_scene = base;
    patch_scene.deviations.push(patch);
    Ok(AmbiguityPair {
        box_scene,
        patch_scene,
        relative_l1,
    })
}

fn ambiguity_demo(params: &ExperimentParams, seed: u64) -> Result<Vec<Frame>> {
    let sensor = params.sensor.clone().unwrap_or_else(forward_sensor);
    let pair = tune_ambiguity_pair(&sensor, derive_seed(seed, 0x71))?;
    let mut frames = Vec::new();
    let mut frame_idx = 0u64;

    let planar = SceneSpec {
        deviations: Vec::new(),
        ..pair.box_scene.clone()
    };
    for i in 0..params.ambiguity_planar {
        let frame_seed = derive_seed(seed, frame_idx);
        frame_idx += 1;
        frames.push(render_frame(
            &sensor,
            &planar,
            frame_seed,
            format!("amb_planar_{i:03}"),
            "ambiguity_surface",
            Label::Planar,
        )?);
    }
    for i in 0..params.ambiguity_pairs {
        // Both members of a pair share a seed, so they see identical rays
        // and photon noise and differ only through the scene.
        let frame_seed = derive_seed(seed, frame_idx);
        frame_idx += 1;
        let mut boxed = render_frame(
            &sensor,
            &pair.box_scene,
            frame_seed,
            format!("amb_box_{i:02}"),
            "ambiguity_surface",
            Label::Deviation,
        )?;
        boxed.sublabel = Some("box".into());
        boxed.deviation_distance_m = Some(0.22);
        frames.push(boxed);
        let mut patched = render_frame(
            &sensor,
            &pair.patch_scene,
            frame_seed,
            format!("amb_patch_{i:02}"),
            "ambiguity_surface",
            Label::Deviation,
        )?;
        patched.sublabel = Some("albedo_patch".into());
        patched.deviation_distance_m = Some(0.22);
        frames.push(patched);
    }
    Ok(frames)
}

fn sensitivity_demo(params: &ExperimentParams, seed: u64) -> Result<Vec<Frame>> {
    let sensor = params.sensor.clone().unwrap_or_default();
    let scene_flat = SceneSpec {
        plane: PlaneSpec {
            distance_m: 0.2,
            incidence_deg: 0.0,
        },
        albedo: AlbedoMap::Uniform(0.85),
        finish: SurfaceFinish::default(),
        deviations: Vec::new(),
        texture_offset: [0.0, 0.0],
        seed: 0,
    };
    let mut scene_patch = scene_flat.clone();
    // A 20 x 20 x 1 mm slip of the same material.
    scene_patch.deviations.push(Deviation::Box {
        center: [0.0, 0.0],
        width_m: 0.02,
        depth_m: 0.02,
        height_m: 0.001,
        albedo: 0.85,
    });
    let mut frames = Vec::new();
    for i in 0..params.sensitivity_frames {
        let frame_seed = derive_seed(seed, i as u64);
        frames.push(render_frame(
            &sensor,
            &scene_flat,
            frame_seed,
            format!("sens_flat_{i:02}"),
            "heavy_paper",
            Label::Planar,
        )?);
    }
    for i in 0..params.sensitivity_frames {
        let frame_seed = derive_seed(seed, 0x1000 + i as u64);
        let mut frame = render_frame(
            &sensor,
            &scene_patch,
            frame_seed,
            format!("sens_patch_{i:02}"),
            "heavy_paper",
            Label::Deviation,
        )?;
        frame.sublabel = Some("paper_square".into());
        frame.deviation_distance_m = Some(0.2);
        frames.push(frame);
    }
    Ok(frames)
}

/// Convenience used by the protocol runner: unique surface ids in first
/// appearance order.
pub fn surface_ids(frames: &[Frame]) -> Vec<String> {
    let mut ids: Vec<String> = Vec::new();
    for f in frames {
        if !ids.iter().any(|s| *s == f.surface_id) {
            ids.push(f.surface_id.clone());
        }
    }
    ids
}
