//! Minimal static SVG plots for reports: ROC curve, score histogram, and
//! detection-vs-distance bars. Deterministic output, no styling knobs.

use tofplane_core::eval::DistanceBucket;
use tofplane_core::metrics::RocPoint;

const W: f64 = 480.0;
const H: f64 = 360.0;
const MARGIN: f64 = 48.0;

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n",
        W / 2.0
    )
}

fn axes() -> String {
    format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        r = W - MARGIN,
        t = MARGIN,
        b = H - MARGIN
    )
}

fn to_px(x: f64, y: f64, x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> (f64, f64) {
    let fx = ((x - x_lo) / (x_hi - x_lo)).clamp(0.0, 1.0);
    let fy = ((y - y_lo) / (y_hi - y_lo)).clamp(0.0, 1.0);
    (
        MARGIN + fx * (W - 2.0 * MARGIN),
        H - MARGIN - fy * (H - 2.0 * MARGIN),
    )
}

pub fn roc_curve(points: &[RocPoint], auroc: f64) -> String {
    let mut svg = header(&format!("ROC (AUROC {auroc:.3})"));
    svg.push_str(&axes());
    let path: Vec<String> = points
        .iter()
        .map(|p| {
            let (x, y) = to_px(p.fpr, p.tpr, 0.0, 1.0, 0.0, 1.0);
            format!("{x:.1},{y:.1}")
        })
        .collect();
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n",
        path.join(" ")
    ));
    let (dx0, dy0) = to_px(0.0, 0.0, 0.0, 1.0, 0.0, 1.0);
    let (dx1, dy1) = to_px(1.0, 1.0, 0.0, 1.0, 0.0, 1.0);
    svg.push_str(&format!(
        "<line x1=\"{dx0:.1}\" y1=\"{dy0:.1}\" x2=\"{dx1:.1}\" y2=\"{dy1:.1}\" stroke=\"gray\" stroke-dasharray=\"4\"/>\n"
    ));
    svg.push_str("</svg>\n");
    svg
}

pub fn score_histogram(planar: &[f64], deviation: &[f64]) -> String {
    let mut svg = header("Log-likelihood scores by class");
    svg.push_str(&axes());
    let all: Vec<f64> = planar.iter().chain(deviation).copied().collect();
    if all.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-9);
    let bins = 40usize;
    let count = |scores: &[f64]| {
        let mut c = vec![0usize; bins];
        for &s in scores {
            let b = (((s - lo) / span) * bins as f64) as usize;
            c[b.min(bins - 1)] += 1;
        }
        c
    };
    let hp = count(planar);
    let hd = count(deviation);
    let peak = hp.iter().chain(&hd).copied().max().unwrap_or(1) as f64;
    for (counts, color, shift) in [(&hp, "seagreen", 0.0), (&hd, "firebrick", 2.0)] {
        for (b, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let x = lo + span * b as f64 / bins as f64;
            let (px, py) = to_px(x, c as f64, lo, hi, 0.0, peak);
            let (_, base) = to_px(x, 0.0, lo, hi, 0.0, peak);
            let width = (W - 2.0 * MARGIN) / bins as f64 - 2.0;
            svg.push_str(&format!(
                "<rect x=\"{:.1}\" y=\"{py:.1}\" width=\"{width:.1}\" height=\"{:.1}\" fill=\"{color}\" fill-opacity=\"0.6\"/>\n",
                px + shift,
                base - py
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn detection_by_distance(buckets: &[DistanceBucket]) -> String {
    let mut svg = header("Detection rate vs distance");
    svg.push_str(&axes());
    if buckets.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let lo = buckets.first().unwrap().lo_m;
    let hi = buckets.last().unwrap().hi_m.max(lo + 1e-9);
    for b in buckets {
        let x = (b.lo_m + b.hi_m) / 2.0;
        let (px, py) = to_px(x, b.rate, lo, hi, 0.0, 1.0);
        let (_, base) = to_px(x, 0.0, lo, hi, 0.0, 1.0);
        svg.push_str(&format!(
            "<rect x=\"{:.1}\" y=\"{py:.1}\" width=\"14\" height=\"{:.1}\" fill=\"steelblue\"/>\n",
            px - 7.0,
            base - py
        ));
        svg.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">{:.2}</text>\n",
            H - MARGIN + 14.0,
            x
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
