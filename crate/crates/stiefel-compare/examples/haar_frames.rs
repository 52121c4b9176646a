//! Samples uniformly distributed orthonormal frames and checks their basic
//! properties: exact orthonormality, column exchangeability, and the fact
//! that each column lives on the unit sphere while a normalized Gaussian
//! column only concentrates near it.
//!
//! Run with: `cargo run --example haar_frames`

use stiefel_compare::matrix::Dims;
use stiefel_compare::sampling::{
    derive_substream, orthonormality_deviation, sample_haar_stiefel, sample_normalized_gaussian,
};
use stiefel_compare::Result;

fn main() -> Result<()> {
    let dims = Dims::new(12, 4)?;
    let seed = 7;

    let mut worst = 0.0f64;
    let mut corner_mean = 0.0;
    let n_samples = 2000;
    for t in 0..n_samples {
        let mut stream = derive_substream(seed, t);
        let frame = sample_haar_stiefel(dims, &mut stream);
        worst = worst.max(orthonormality_deviation(frame.matrix()));
        corner_mean += frame.matrix().get(0, 0).powi(2) / n_samples as f64;
    }
    println!("sampled {n_samples} frames of shape {dims}");
    println!("worst |Q^T Q - I| entry:      {worst:.3e}");
    println!("E[Q_00^2] = {corner_mean:.5} (uniformity on the sphere gives 1/n = {:.5})", 1.0 / 12.0);

    // Column lengths: exactly 1 for a frame, 1 + O(1/sqrt(n)) for a
    // normalized Gaussian column.
    let mut stream = derive_substream(seed, n_samples);
    let frame = sample_haar_stiefel(dims, &mut stream);
    let gauss = sample_normalized_gaussian(dims, &mut stream);
    let column_norm = |m: &stiefel_compare::DenseMatrix, j: usize| -> f64 {
        (0..m.rows()).map(|i| m.get(i, j).powi(2)).sum::<f64>().sqrt()
    };
    println!();
    println!("column lengths of one draw:");
    for j in 0..dims.k() {
        println!(
            "  column {j}: frame {:.12}, normalized Gaussian {:.6}",
            column_norm(frame.matrix(), j),
            column_norm(&gauss, j)
        );
    }

    // In one dimension the frame is just a random sign.
    let scalar = Dims::new(1, 1)?;
    let signs: Vec<f64> = (0..8)
        .map(|t| {
            let mut stream = derive_substream(seed, 100 + t);
            sample_haar_stiefel(scalar, &mut stream).matrix().get(0, 0)
        })
        .collect();
    println!();
    println!("the 1 x 1 frame is an exact sign: {signs:?}");
    assert!(signs.iter().all(|s| *s == 1.0 || *s == -1.0));
    Ok(())
}
