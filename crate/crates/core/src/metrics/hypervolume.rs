use super::pareto::nondominated_indices;

/// Area dominated by `front` and bounded below by `reference` (maximization).
///
/// Coordinates below the reference are clamped to it, so such points add nothing.
pub fn hypervolume_2d(front: &[[f64; 2]], reference: [f64; 2]) -> f64 {
    let clamped: Vec<[f64; 2]> = front
        .iter()
        .map(|p| [p[0].max(reference[0]), p[1].max(reference[1])])
        .collect();
    // Sorted by decreasing first objective, so the second strictly increases.
    let order = nondominated_indices(&clamped);
    let mut area = 0.0;
    for (k, &i) in order.iter().enumerate() {
        let next_x = order.get(k + 1).map_or(reference[0], |&j| clamped[j][0]);
        area += (clamped[i][0] - next_x) * (clamped[i][1] - reference[1]);
    }
    area
}
