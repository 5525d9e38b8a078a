//! Recovers hidden N(2) weights from truncation responses and shows the orbit they are known up to.

use elnet::inverse::{check_orbit_responses, relative_error, s_m_orbit, solve_nm, HiddenNm, Schedule};
use elnet::rmatrix::{LayerPairWeights, NmWeights};
use elnet::scalar::{int, to_f64};

fn main() -> elnet::error::Result<()> {
    let truth = NmWeights::from_block(&LayerPairWeights::n1(int(4), int(1), int(2), int(1)));
    let hidden = HiddenNm::new(truth.clone())?;
    for k in 1..=3 {
        let ks: Vec<usize> = (1..=k).collect();
        let sol = solve_nm(&hidden, &Schedule::offset(&ks, 4))?;
        let layers: Vec<String> = sol
            .canonical
            .layers
            .iter()
            .map(|l| format!("({:.4}, {:.4})", to_f64(&l.high[0]), to_f64(&l.low[0])))
            .collect();
        println!("K up to {k}: {}  relative error {:.4}", layers.join(" "), relative_error(&sol.canonical, &truth));
        if k == 3 {
            for e in &sol.estimates {
                println!("  {} on layer {}: spread {:.2e}, monotone {}", e.target_edge, e.layer, e.spread, e.monotone_trend);
            }
        }
    }
    // the data cannot tell the orbit members apart
    let orbit = s_m_orbit(&truth)?;
    for radius in 1..=3 {
        let c = check_orbit_responses(&orbit, radius)?;
        println!("orbit of {} at N = {radius}: largest response difference {}", orbit.len(), c.max_difference);
    }
    Ok(())
}
