//! The alignment dynamic program on a 4x3 toy matrix: accumulated scores,
//! the optimal path and its projection onto segments.

use alignsum::alignment::{accumulate, backtrace, project_to_segments, AlignParams};
use alignsum::matrix::Matrix;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    // rows are transcription sentences t1..t4, columns report sentences r1..r3
    let s = Matrix::from_rows(&[
        [5.0, 5.0, 3.0],
        [3.0, 7.0, 4.0],
        [8.0, 6.0, 7.0],
        [9.0, 2.0, 5.0],
    ])?;
    let tableau = accumulate(&s, &AlignParams::default())?;
    println!("accumulated scores:");
    for row in tableau.scores.to_rows() {
        println!("  {row:?}");
    }
    let path = backtrace(&tableau);
    println!("path: {:?} (score {})", path.cells(), path.score(&s));

    // t1..t2 form one intervention, t3..t4 another; r1..r2 and r3 likewise
    let targets = project_to_segments(&path, &tableau.scores, &[0..2, 2..4], &[0..2, 2..3])?;
    println!("segment alignment: {targets:?}");
    assert_eq!(tableau.scores[(3, 2)], 35.0);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("dp walkthrough");
}
