//! `Λ_B`, its flow translates, LLL reduction and shortest vectors, plus the
//! block shape of `G_I` for each admissible set.

use diagflow::lattice::{
    all_admissible, apply_flow, group_blocks, lattice_from_matrix, reduce_basis, shortest_vector_length, FlowParam,
    TorusPoint,
};

fn main() -> diagflow::Result<()> {
    let b = TorusPoint::new(1, 1, vec![0.618_033_988_749_895])?;
    let lattice = lattice_from_matrix(&b);
    println!("Λ_B basis for B = {:.6}:{}", b.get(0, 0), lattice.basis());

    println!("{:>4} {:>14} {:>22}", "t", "shortest", "reduced basis column 1");
    for t in [0.0, 1.0, 2.0, 4.0, 8.0] {
        let flowed = apply_flow(&FlowParam::new(1, 1, vec![t, t])?, &lattice)?;
        let reduced = reduce_basis(&flowed)?;
        let col = reduced.column(0);
        println!(
            "{t:>4} {:>14.6e} {:>22}",
            shortest_vector_length(&flowed)?,
            format!("({:.4}, {:.4})", col[0], col[1])
        );
    }

    for set in all_admissible(2, 1) {
        println!("\nG_I for I = {set}:\n{}", group_blocks(&set));
    }
    Ok(())
}
