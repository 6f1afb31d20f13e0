use gsa_core::pbpk::*;
use gsa_core::sobol::{run_independent, SobolSettings};
use gsa_core::{GsaModel, RandomStream};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3000);
    let table = TissueTable::builtin();
    let config = PopulationConfig::<f64>::reference();
    let drug = DrugParams::midazolam();
    let ind = assemble(&table, &config, Sex::Male, 176.7, 21.7, 39.79, 137.0, 103.0);
    let (_, auc) = simulate_subject(&ind, &drug, &table, 5.0, &SimulationSettings::default()).unwrap();
    println!("mean male AUC {auc:.5} -> CL {:.2} L/h", 5.0/auc);

    let model = PbpkAucModel::<f64>::new(PbpkGsaMode::Independent);
    let names = model.factor_names();
    let mut totals = vec![0.0; 6];
    let mut mains = vec![0.0; 6];
    let seeds = [1u64, 2];
    for &seed in &seeds {
        let r = run_independent(&model, n, RandomStream::new(seed),
            SobolSettings { bootstrap: 0, parallel: true, ..Default::default() }).unwrap();
        for i in 0..6 { totals[i] += r.factors[i].total / seeds.len() as f64; mains[i] += r.factors[i].main / seeds.len() as f64; }
    }
    for i in 0..6 { println!("{:<10} main {:+.3} total {:+.3}", names[i], mains[i], totals[i]); }

    // latent mode eta/eps mains
    let lmodel = PbpkAucModel::<f64>::new(PbpkGsaMode::Latent);
    let lnames = lmodel.factor_names();
    let mut lmains = vec![0.0; 7];
    for &seed in &seeds {
        let r = run_independent(&lmodel, n, RandomStream::new(seed+10),
            SobolSettings { bootstrap: 0, parallel: true, ..Default::default() }).unwrap();
        for i in 0..7 { lmains[i] += r.factors[i].main / seeds.len() as f64; }
    }
    for i in 4..7 { println!("latent {:<12} main {:+.3}", lnames[i], lmains[i]); }
}
