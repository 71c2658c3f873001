//! Shared test oracles, independent of the library's implementation paths.

/// O(n²) least-concave-upper-bound oracle by gift wrapping: from each hull
/// vertex, the next vertex is the point with the maximum slope (ties to the
/// farthest, which drops collinear middles). Input sorted by strictly
/// increasing first coordinate.
pub fn oracle_upper_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    assert!(points.len() >= 2);
    let mut hull = vec![points[0]];
    let mut cur = 0usize;
    while cur < points.len() - 1 {
        let mut best = cur + 1;
        for cand in cur + 2..points.len() {
            let turn = orient(points[cur], points[best], points[cand]);
            if turn > 0.0 || (turn == 0.0 && points[cand].0 > points[best].0) {
                best = cand;
            }
        }
        hull.push(points[best]);
        cur = best;
    }
    hull
}

fn orient(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Random sorted point set in quantile space: n distinct quantiles spanning
/// [0, 1] with anchored endpoints.
pub fn random_point_set(rng: &mut impl rand::RngCore, n: usize) -> Vec<(f64, f64)> {
    use myerson_lab::rng::uniform_in;
    assert!(n >= 2);
    let mut qs: Vec<f64> = (0..n - 2)
        .map(|_| uniform_in(rng, 1e-6, 1.0 - 1e-6))
        .collect();
    qs.push(0.0);
    qs.push(1.0);
    qs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    qs.dedup();
    qs.iter().map(|&q| (q, uniform_in(rng, 0.0, 1.0))).collect()
}
