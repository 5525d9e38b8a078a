//! Universal response of N(2) on the cover: exact truncations, a float run and the cover sum.

use elnet::cylinder::{cylinder_response, make_nm, n2_universal_entry, rim_window, universal_response};
use elnet::rmatrix::{LayerPairWeights, NmWeights};
use elnet::scalar::{int, Rational};

fn main() -> elnet::error::Result<()> {
    let w = NmWeights::from_block(&LayerPairWeights::n1(int(1), int(2), int(3), int(4)));
    let cyl = make_nm(&w)?;
    let win = rim_window(-1, 2);
    let exact = universal_response::<Rational>(&cyl, &win, &[2, 4, 6], None)?;
    let float = universal_response::<f64>(&cyl, &win, &[4, 8, 12], None)?;
    for b in ["1'", "0'", "-1'"] {
        println!(
            "L[1,{b}]  truncated {}  float {:.9}  star sum {}",
            exact.value("1", b)?,
            float.value("1", b)?,
            n2_universal_entry(&w, "1", b)?
        );
    }
    println!("largest float increment: {:e}", float.max_increment());

    let sectors = (-3..=3)
        .map(|s| n2_universal_entry(&w, "1", &format!("{}'", 1 + s)))
        .sum::<elnet::error::Result<Rational>>()?;
    println!("sum over windings {sectors}, compact response {}", cylinder_response(&cyl)?.entry("1", "1'")?);
    Ok(())
}
