//! The electrical R-matrix: closed form, threading, Yang-Baxter and the S_m orbit.

use elnet::inverse::s_m_orbit;
use elnet::rmatrix::{closed_form_r, r_matrix, thread_parameter_at, yang_baxter_check, LayerPairWeights, NmWeights};
use elnet::scalar::int;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fmt(b: &LayerPairWeights) -> String {
    let j = |v: &[elnet::scalar::Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    format!("a=[{}] b=[{}] c=[{}] d=[{}]", j(&b.a), j(&b.b), j(&b.c), j(&b.d))
}

fn main() -> elnet::error::Result<()> {
    let block = LayerPairWeights::n1(int(1), int(2), int(3), int(4));
    let image = closed_form_r(&block)?;
    println!("closed form: {} -> {}", fmt(&block), fmt(&image));
    println!("involution: {}", closed_form_r(&image)? == block);

    let th = thread_parameter_at(&block, 0)?;
    println!("threaded p returns after one revolution: {}", th.p.first() == th.p.last());
    println!("threaded move = R: {}", th.result == r_matrix(&block)?);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = NmWeights::random(2, 3, &mut rng, 9, 5);
    let yb = yang_baxter_check(&w)?;
    println!("Yang-Baxter on random n = 2, m = 3 weights: {} (residual {})", yb.equal, yb.residual);
    println!("S_3 orbit size: {}", s_m_orbit(&w)?.len());
    Ok(())
}
