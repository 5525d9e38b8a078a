//! Cylindrical total nonnegativity of universal response values on random N(2).

use elnet::cylinder::{check_cylindrical_tnn, make_nm, rim_window, universal_response};
use elnet::rmatrix::NmWeights;
use elnet::scalar::Rational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> elnet::error::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=2 {
        let cyl = make_nm(&NmWeights::random(n, 2, &mut rng, 9, 5))?;
        let u = universal_response::<Rational>(&cyl, &rim_window(1, 5), &[6, 8], None)?;
        let report = check_cylindrical_tnn(&u.entries, 3, 0.0)?;
        println!("n = {n}: {} minors checked, {} negative", report.checked, report.violations.len());
    }
    Ok(())
}
