//! Sweeps every local move over random networks and runs the tetrahedron cycle.

use elnet::equivalences::{sweep_sites, tetrahedron_cycle, SiteSweep, TetraSite, WiringNetwork};
use elnet::netcore::random_network;
use elnet::scalar::{rat, Weight};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> elnet::error::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut total = SiteSweep::default();
    for _ in 0..50 {
        let net = random_network(&mut rng, 4, 5, 6, 9, 4);
        total.merge(sweep_sites(&net)?);
    }
    println!("moves applied: {:?}", total.applied);
    println!("responses unchanged: {}", total.passed());

    let ws: Vec<Weight> = (1..=6).map(|i| Weight(rat(i, 2))).collect();
    let tet = WiringNetwork::tetrahedron(&ws)?;
    let (back, log) = tetrahedron_cycle(&tet.net, &TetraSite::default())?;
    println!("tetrahedron cycle: {} moves, returns to start: {}", log.len(), back == tet.net);
    Ok(())
}
