//! The four-agent reference network: neighbor lists, Laplacian, spectrum and
//! the quadratic-form identity `yᵀLy = ½ Σ p_ij (y_i − y_j)²`.

use hwconsensus::graph::Topology;

fn main() {
    let g = Topology::four_agent_reference();
    println!("agents: {}, diameter: {}", g.agent_count(), g.diameter().unwrap());
    for i in 0..g.agent_count() {
        let nbrs: Vec<usize> = g.neighbors(i).iter().map(|&(j, _)| j + 1).collect();
        println!("  agent {} (degree {}): neighbors {:?}", i + 1, g.degree(i), nbrs);
    }

    let lap = g.laplacian();
    println!("Laplacian:{}", lap.laplacian);
    println!("spectrum: {:?}", lap.spectrum());
    println!("algebraic connectivity: {:.6}", lap.algebraic_connectivity());

    let y = [0.3, -1.0, 2.0, 0.5];
    println!(
        "y = {y:?}: yᵀLy = {:.6}, half-sum of squared link gaps = {:.6}",
        lap.quadratic_form(&y),
        lap.disagreement(&y)
    );

    let weighted = Topology::new(3, &[(1, 2, 0.5), (2, 3, 2.0)]).unwrap();
    println!("weighted path spectrum: {:?}", weighted.laplacian().spectrum());
    let split = Topology::unweighted(4, &[(1, 2), (3, 4)]).unwrap();
    println!("two separate links: connected = {}, {:?}", split.is_connected(), split.diameter());
}
