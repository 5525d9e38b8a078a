//! Response matrix of a star, then the same network after a star-triangle move.

use elnet::equivalences::y_to_delta;
use elnet::matrix::LabeledMatrix;
use elnet::netcore::{response_matrix, Edge, Network};
use elnet::scalar::{rat, Rational};

fn show(title: &str, m: &LabeledMatrix<Rational>) -> elnet::error::Result<()> {
    println!("{title}");
    for a in m.labels() {
        let row = m.labels().iter().map(|b| m.entry(a, b).map(|v| format!("{v:>6}"))).collect::<Result<Vec<_>, _>>()?;
        println!("  {a}: {}", row.join(" "));
    }
    Ok(())
}

fn main() -> elnet::error::Result<()> {
    let star = Network::from_parts(
        &["1", "2", "3"],
        &["c"],
        vec![Edge::new("1", "c", rat(1, 1)), Edge::new("2", "c", rat(2, 1)), Edge::new("3", "c", rat(3, 1))],
    )?;
    let l = response_matrix(&star)?;
    show("star", &l)?;
    let (tri, _) = y_to_delta(&star, "c")?;
    for ((u, v), ws) in tri.edge_multiset() {
        println!("  {u}-{v}: {}", ws[0]);
    }
    let l = response_matrix(&tri)?;
    show("triangle", &l)?;
    println!("invariants hold: {}", l.check_invariants(true));
    Ok(())
}
