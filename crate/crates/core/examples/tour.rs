use lipext::{
    distortion_report, free_norm, grid_l1, mcshane_extend, optimal_lambda, truncated_tk, DistortionMetric,
    DistortionMode, MetricSpace, TreeEmbedding, WeightVector,
};

fn main() -> lipext::Result<()> {
    // the 3 x 3 grid {-1, 0, 1}^2 with the l1 metric
    let grid: MetricSpace = grid_l1(2, 1, 4096)?;
    let corners = [0, 2, 6, 8];

    let lambda = optimal_lambda(&grid, &corners)?;
    println!("λ = {:.6}, certified {:.6}", lambda.value, lambda.certificate_norm);

    let f = mcshane_extend(&grid, &corners, &[0.0, 2.0, 2.0, 4.0])?;
    println!("McShane extension: {:?}", f.values());

    let delta = WeightVector::dirac_difference(grid.len(), 0, 8);
    println!("‖δ0 - δ8‖ = {}", free_norm(&grid, &delta)?);

    let tree = truncated_tk::<f64>(2, 3, 1_000_000)?;
    let emb = TreeEmbedding::new(&tree)?;
    let report =
        distortion_report(&tree, &emb, DistortionMetric::Rho0, DistortionMode::default_for(tree.len(), 200_000, 0))?;
    println!("ρ0 / d in [{:.4}, {:.4}], clean: {}", report.min_ratio, report.max_ratio, report.is_clean());
    Ok(())
}
