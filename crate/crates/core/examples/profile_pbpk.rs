use gsa_core::pbpk::*;
use std::time::Instant;

fn main() {
    let table = TissueTable::builtin();
    let config = PopulationConfig::<f64>::reference();
    let drug = DrugParams::midazolam();
    let ind = assemble(&table, &config, Sex::Male, 176.7, 21.7, 39.79, 137.0, 103.0);
    let settings = SimulationSettings::default();
    let t0 = Instant::now();
    let (traj, auc) = simulate_subject(&ind, &drug, &table, 5.0, &settings).unwrap();
    println!("one solve: {:?}", t0.elapsed());
    println!("accepted {} rejected {} rhs {}  auc {auc}", traj.accepted_steps, traj.rejected_steps, traj.rhs_evals);
    let t0 = Instant::now();
    for _ in 0..20 { let _ = simulate_subject(&ind, &drug, &table, 5.0, &settings).unwrap(); }
    println!("avg of 20: {:?}", t0.elapsed() / 20);
}
