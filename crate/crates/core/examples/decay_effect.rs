//! A small vertical decay breaks a long run along one transcription
//! sentence and changes the optimal path.

use alignsum::alignment::{accumulate, backtrace, AlignParams};
use alignsum::matrix::Matrix;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let s = Matrix::from_rows(&[
        [0.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, 1.0, 1.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ])?;
    for vd in [0.0, 1e-4] {
        let params = AlignParams::new(1.0, 0.0, vd)?;
        let tableau = accumulate(&s, &params)?;
        let path = backtrace(&tableau);
        println!("vd = {vd}: final score {:.4}, path {:?}", tableau.scores[(3, 3)], path.cells());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("decay effect");
}
