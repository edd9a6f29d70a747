use std::time::Instant;
use tofplane_core::eval::{extract_features, Method};
use tofplane_core::baseline::PeakConfig;
use tofplane_core::mixture::{score, select_components, FitConfig};
use tofplane_core::preprocess::{preprocess, PreprocessConfig};
use tofplane_core::sim::{generate_experiment, ExperimentKind, ExperimentParams};
use tofplane_core::Label;

fn main() {
    let params = ExperimentParams::default();
    let frames = generate_experiment(ExperimentKind::ForwardFacing, &params, 15).unwrap();
    let planar: Vec<&tofplane_core::Frame> =
        frames.iter().filter(|f| f.label == Label::Planar).take(75).collect();
    let pre = PreprocessConfig::default();
    let feats = extract_features(&planar, Method::Histogram, &pre, &PeakConfig::default()).unwrap();
    let t = Instant::now();
    let model = select_components(&feats, &FitConfig::default()).unwrap().model;
    println!("fit 75 frames c[1,16]: {:.2?} (c={})", t.elapsed(), model.component_count());

    let test: Vec<&tofplane_core::Frame> = frames.iter().take(500).collect();
    let t = Instant::now();
    let mut acc = 0.0;
    for f in &test {
        let feat = preprocess(f, &pre).unwrap();
        acc += score(&model, &feat.values).unwrap();
    }
    let dt = t.elapsed();
    println!(
        "preprocess+score {} frames: {:.2?} => {:.0} fps (acc {acc:.1})",
        test.len(), dt, test.len() as f64 / dt.as_secs_f64()
    );

    let feats: Vec<Vec<f64>> = test.iter().map(|f| preprocess(f, &pre).unwrap().values).collect();
    let t = Instant::now();
    let mut acc = 0.0;
    for feat in &feats {
        acc += score(&model, feat).unwrap();
    }
    let dt = t.elapsed();
    println!("score-only {} frames: {:.2?} => {:.0} fps (acc {acc:.1})", feats.len(), dt, feats.len() as f64 / dt.as_secs_f64());
}
