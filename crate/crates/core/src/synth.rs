//! Seeded synthetic documents, generated directly as runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::block::BlockSpec;
use crate::rle::{CompressedDoc, RunRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InkStyle {
    /// Independent pixels, each foreground with the ink probability.
    Uniform,
    /// Bands of short strokes separated by blank inter-line gaps and margins.
    TextLike,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Geometric run length on `1..` with the given mean.
fn geometric<R: Rng>(rng: &mut R, mean: f64) -> usize {
    if mean <= 1.0 {
        return 1;
    }
    let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    1 + (u.ln() / (1.0 - 1.0 / mean).ln()).floor() as usize
}

/// Alternating runs over `span` pixels; the first run is background unless
/// `start_black`.
fn alternating_runs<R: Rng>(rng: &mut R, span: usize, start_black: bool, white_mean: f64, black_mean: f64) -> Vec<usize> {
    let mut runs = Vec::new();
    let mut black = start_black;
    let mut left = span;
    while left > 0 {
        let len = geometric(rng, if black { black_mean } else { white_mean }).min(left);
        runs.push(len);
        left -= len;
        black = !black;
    }
    runs
}

fn uniform_row<R: Rng>(rng: &mut R, width: usize, ink: f64) -> RunRow {
    let ink = ink.clamp(1e-6, 1.0 - 1e-6);
    let start_black = rng.random_bool(ink);
    let mut runs = alternating_runs(rng, width, start_black, 1.0 / ink, 1.0 / (1.0 - ink));
    if start_black {
        runs.insert(0, 0);
    }
    RunRow::new(runs)
}

/// Builds a `width` x `height` document with roughly `ink` foreground density.
pub fn synthetic_document(width: usize, height: usize, ink: f64, style: InkStyle, seed: u64) -> CompressedDoc {
    let mut rng = rng(seed);
    let rows = match style {
        InkStyle::Uniform => (0..height).map(|_| uniform_row(&mut rng, width, ink)).collect(),
        InkStyle::TextLike => text_like_rows(&mut rng, width, height, ink),
    };
    CompressedDoc::new(width, height, rows).expect("generated rows cover the width")
}

fn text_like_rows<R: Rng>(rng: &mut R, width: usize, height: usize, ink: f64) -> Vec<RunRow> {
    let margin = (width / 12).min(width.saturating_sub(1) / 2);
    let text_span = width - 2 * margin;
    // About 60% of rows carry text; raise their density to compensate.
    let line_ink = (ink / 0.6).clamp(0.01, 0.9);
    let black_mean = 3.0;
    let white_mean = black_mean * (1.0 - line_ink) / line_ink;

    let mut rows = Vec::with_capacity(height);
    while rows.len() < height {
        let line_height = rng.random_range(6..=18usize);
        let gap = rng.random_range(3..=8usize);
        for _ in 0..line_height {
            if rows.len() == height {
                break;
            }
            let mut runs = vec![margin];
            let body = alternating_runs(rng, text_span, false, white_mean, black_mean);
            // merge the margin with the body's first (background) run
            runs[0] += body[0];
            runs.extend_from_slice(&body[1..]);
            if body.len() % 2 == 1 {
                *runs.last_mut().unwrap() += margin;
            } else if margin > 0 {
                // body ended on foreground
                runs.push(margin);
            }
            rows.push(RunRow::new(runs));
        }
        for _ in 0..gap {
            if rows.len() == height {
                break;
            }
            rows.push(RunRow::new(vec![width]));
        }
    }
    rows
}

/// A uniformly random valid block spec for a `width` x `height` image.
pub fn random_spec<R: Rng>(rng: &mut R, width: usize, height: usize) -> BlockSpec {
    let (a, b) = (rng.random_range(1..=height), rng.random_range(1..=height));
    let (c, d) = (rng.random_range(1..=width), rng.random_range(1..=width));
    BlockSpec::new(a.min(b), a.max(b), c.min(d), c.max(d))
}
