//! Grove enumeration against the grove polynomials on a small circular planar network.

use elnet::groves::{enumerate_groves, matrix_entry, upr_polynomial, Partition, UprOptions};
use elnet::netcore::{response_matrix, Edge, Network};
use elnet::scalar::rat;

fn main() -> elnet::error::Result<()> {
    let net = Network::from_parts(
        &["1", "2", "3", "4"],
        &["c"],
        vec![
            Edge::new("1", "c", rat(1, 1)),
            Edge::new("2", "c", rat(2, 1)),
            Edge::new("3", "c", rat(3, 1)),
            Edge::new("4", "c", rat(1, 2)),
            Edge::new("1", "2", rat(1, 3)),
            Edge::new("3", "4", rat(2, 3)),
        ],
    )?;
    let l = response_matrix(&net)?;
    let groves = enumerate_groves(&net)?;
    let ground: Vec<String> = (1..=4).map(|i| i.to_string()).collect();
    let unc = &groves[&Partition::uncrossing(ground.clone())];
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    for parts in [vec![s(&["1", "2"]), s(&["3", "4"])], vec![s(&["1", "4"]), s(&["2", "3"])], vec![s(&["1", "2", "3", "4"])]] {
        let sigma = Partition::new(ground.clone(), parts)?;
        let poly = upr_polynomial(&sigma, &UprOptions::default())?;
        let by_count = groves.get(&sigma).cloned().unwrap_or_default() / unc;
        println!("{sigma}: {poly} = {} (groves: {by_count})", poly.evaluate(&matrix_entry(&l))?);
    }
    Ok(())
}
