//! The recursive case analysis on a few hand-picked tuples, then a fuzz run
//! confirming every tuple reaches a favourable terminal.

use diagflow::caseplan::{classify_case, random_flow, recursion_constants, CasePlanConstants};
use diagflow::lattice::FlowParam;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> diagflow::Result<()> {
    let nominal = recursion_constants(1, 1, 2, 1, 1.0, 1.1)?;
    println!("nominal constants for m = n = 1, r = 2: λ = {}, c = {:?}", nominal.lambda, nominal.c);
    let tuple = [FlowParam::new(1, 1, vec![1.0, 1.0])?, FlowParam::new(1, 1, vec![9.0, 9.0])?];
    print!("{}", classify_case(&tuple, &nominal)?);

    let small = CasePlanConstants::custom(2, 1, 1, 1.0, 8.0, vec![2.5, 40.0])?;
    let tuple = [FlowParam::new(2, 1, vec![5.0, 5.0, 10.0])?, FlowParam::new(2, 1, vec![0.1, 0.1, 0.2])?];
    println!("\nhand-picked constants c = {:?}, λ = {}", small.c, small.lambda);
    print!("{}", classify_case(&tuple, &small)?);

    let enlarging = CasePlanConstants::custom(2, 1, 1, 1.0, 2.0, vec![3.0, 3.0])?;
    let tuple = [FlowParam::new(2, 1, vec![4.0, 1.5, 5.5])?, FlowParam::new(2, 1, vec![10.0, 0.0, 10.0])?];
    println!("\nenlargement with c = {:?}, λ = {}", enlarging.c, enlarging.lambda);
    print!("{}", classify_case(&tuple, &enlarging)?);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0;
    let trials = 2000;
    for _ in 0..trials {
        let (m, n, r) = (1 + (rand::Rng::random_range(&mut rng, 0..2)), 1, 3);
        let k = recursion_constants(m, n, r, 1, 1.0, 1.1)?;
        let ts: Vec<FlowParam> = (0..r).map(|_| random_flow(m, n, &mut rng)).collect();
        let trace = classify_case(&ts, &k)?;
        assert!(trace.favourable());
        worst = worst.max(trace.max_restarts());
    }
    println!("\n{trials} fuzzed tuples: all favourable, most restarts at one level = {worst}");
    Ok(())
}
