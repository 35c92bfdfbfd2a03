//! Classical (Torgerson) multidimensional scaling of a distance matrix into
//! the plane.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::distance::{distance_matrix_encoded, DistanceWeights};
use crate::encoding::{encode_sequence, EncodingTable};
use crate::error::Result;
use crate::model::{DistanceMatrix, SolutionSet};

#[derive(Debug, Clone, PartialEq)]
pub struct Projection2D {
    pub ids: Vec<String>,
    pub coords: Vec<[f64; 2]>,
    /// Kruskal stress-1 of the embedded distances against the input.
    pub stress: f64,
    /// Share of the positive eigenvalue mass kept by the two retained axes.
    pub eigenvalue_share: f64,
    /// The two retained eigenvalues, clamped at zero.
    pub eigenvalues: [f64; 2],
    pub diagnostics: Vec<String>,
}

/// Double-centers the squared distances, keeps the two leading eigenpairs and
/// scales the eigenvectors by the square roots of their eigenvalues.
/// Negative eigenvalues are clamped to zero. Each axis is oriented so that its
/// first non-negligible coordinate is positive.
pub fn mds_project(dm: &DistanceMatrix) -> Projection2D {
    let n = dm.n();
    let mut diagnostics = Vec::new();
    if n == 0 {
        return Projection2D {
            ids: vec![],
            coords: vec![],
            stress: 0.0,
            eigenvalue_share: 1.0,
            eigenvalues: [0.0; 2],
            diagnostics: vec!["empty distance matrix".into()],
        };
    }

    let b = double_centered(dm);
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| eig.eigenvalues[c].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&c)));

    let positive_mass: f64 = eig.eigenvalues.iter().filter(|&&l| l > 0.0).sum();
    let mut kept = [0.0; 2];
    let mut coords = vec![[0.0; 2]; n];
    for (axis, &k) in order.iter().take(2).enumerate() {
        let lambda = eig.eigenvalues[k].max(0.0);
        kept[axis] = lambda;
        let scale = lambda.sqrt();
        let column = eig.eigenvectors.column(k);
        for i in 0..n {
            coords[i][axis] = column[i] * scale;
        }
    }
    orient_axes(&mut coords);

    let eigenvalue_share = if positive_mass > 0.0 {
        ((kept[0] + kept[1]) / positive_mass).clamp(0.0, 1.0)
    } else {
        diagnostics.push("degenerate distance matrix: no positive eigenvalues".into());
        1.0
    };
    let negative_mass: f64 = eig.eigenvalues.iter().filter(|&&l| l < 0.0).map(|l| -l).sum();
    if positive_mass > 0.0 && negative_mass > 1e-9 * positive_mass {
        diagnostics.push(format!(
            "distances are not Euclidean: negative eigenvalue mass {:.3e} clamped",
            negative_mass
        ));
    }

    Projection2D {
        ids: dm.ids.clone(),
        stress: kruskal_stress(dm, &coords),
        coords,
        eigenvalue_share,
        eigenvalues: kept,
        diagnostics,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedPoint {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

/// One set's points within a joint projection.
#[derive(Debug, Clone, PartialEq)]
pub struct SetProjection {
    pub label: String,
    pub points: Vec<ProjectedPoint>,
}

/// All sets embedded in one common plane.
#[derive(Debug, Clone, PartialEq)]
pub struct JointProjection {
    pub projection: Projection2D,
    pub sets: Vec<SetProjection>,
}

/// Pools the solutions of every set, computes their distances with one shared
/// padding length and projects them together so the sets can be compared in
/// the same plane. Pooled ids are `label/id`.
pub fn project_sets(sets: &[SolutionSet], table: &EncodingTable, w: DistanceWeights) -> Result<JointProjection> {
    let mut ids = Vec::new();
    let mut seqs = Vec::new();
    for set in sets {
        for s in &set.solutions {
            ids.push(format!("{}/{}", set.label, s.id));
            seqs.push(encode_sequence(&s.sequence, table).map_err(|e| e.in_solution(&s.id))?);
        }
    }
    let projection = mds_project(&distance_matrix_encoded(ids, &seqs, w));
    let mut coords = projection.coords.iter();
    let per_set = sets
        .iter()
        .map(|set| SetProjection {
            label: set.label.clone(),
            points: set
                .solutions
                .iter()
                .map(|s| {
                    let c = coords.next().expect("one coordinate per solution");
                    ProjectedPoint { id: s.id.clone(), x: c[0], y: c[1] }
                })
                .collect(),
        })
        .collect();
    Ok(JointProjection { projection, sets: per_set })
}

// B = -1/2 J D² J with J the centering matrix.
fn double_centered(dm: &DistanceMatrix) -> DMatrix<f64> {
    let n = dm.n();
    let sq = DMatrix::from_fn(n, n, |i, j| {
        let d = dm.get(i, j);
        d * d
    });
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let mut b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));
    // exact symmetry for the solver
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (b[(i, j)] + b[(j, i)]);
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    b
}

fn orient_axes(coords: &mut [[f64; 2]]) {
    for axis in 0..2 {
        let largest = coords.iter().map(|c| c[axis].abs()).fold(0.0, f64::max);
        if largest == 0.0 {
            continue;
        }
        let threshold = largest * 1e-9;
        if let Some(first) = coords.iter().map(|c| c[axis]).find(|v| v.abs() > threshold) {
            if first < 0.0 {
                for c in coords.iter_mut() {
                    c[axis] = -c[axis];
                }
            }
        }
        for c in coords.iter_mut() {
            // no signed zeros in the output
            if c[axis] == 0.0 {
                c[axis] = 0.0;
            }
        }
    }
}

/// Kruskal stress-1: sqrt(Σ (d_ij − ‖x_i − x_j‖)² / Σ d_ij²) over i < j.
pub fn kruskal_stress(dm: &DistanceMatrix, coords: &[[f64; 2]]) -> f64 {
    let n = dm.n();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let d = dm.get(i, j);
            let e = euclidean(coords[i], coords[j]);
            num += (d - e) * (d - e);
            den += d * d;
        }
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

pub fn euclidean(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn from_points(points: &[[f64; 2]]) -> DistanceMatrix {
        let n = points.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| euclidean(points[i], points[j])).collect())
            .collect();
        let max = rows.iter().flatten().copied().fold(0.0, f64::max);
        DistanceMatrix::from_rows((0..n).map(|i| format!("p{i}")).collect(), &rows, max.ceil() as usize, max)
    }

    fn max_relative_error(dm: &DistanceMatrix, p: &Projection2D) -> f64 {
        let n = dm.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                let d = dm.get(i, j);
                let e = euclidean(p.coords[i], p.coords[j]);
                worst = worst.max((d - e).abs() / d.max(1e-300));
            }
        }
        worst
    }

    #[test]
    fn single_point() {
        let dm = DistanceMatrix::from_rows(vec!["a".into()], &[vec![0.0]], 0, 0.0);
        let p = mds_project(&dm);
        assert_eq!(p.coords, vec![[0.0, 0.0]]);
        assert_eq!(p.stress, 0.0);
        assert!(!p.diagnostics.is_empty());
    }

    #[test]
    fn two_points_are_exact() {
        let dm = DistanceMatrix::from_rows(vec!["a".into(), "b".into()], &[vec![0.0, 3.0], vec![3.0, 0.0]], 3, 3.0);
        let p = mds_project(&dm);
        assert!(p.stress < 1e-12);
        assert!((euclidean(p.coords[0], p.coords[1]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn unit_square() {
        let dm = from_points(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let p = mds_project(&dm);
        assert!(max_relative_error(&dm, &p) < 1e-9);
        assert!(p.stress < 1e-9);
    }

    #[test]
    fn random_cloud() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<[f64; 2]> = (0..50).map(|_| [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]).collect();
        let dm = from_points(&pts);
        let p = mds_project(&dm);
        assert!(p.eigenvalue_share >= 0.999);
        assert!(p.stress < 1e-6);
        assert!(max_relative_error(&dm, &p) < 1e-6);
    }

    #[test]
    fn stress_is_rigid_invariant_and_orientation_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<[f64; 2]> = (0..12).map(|_| [rng.random(), rng.random::<f64>() * 3.0]).collect();
        let dm = from_points(&pts);
        let p = mds_project(&dm);
        let (s, c) = 0.7f64.sin_cos();
        let moved: Vec<[f64; 2]> = p.coords.iter().map(|x| [c * x[0] - s * x[1] + 4.0, s * x[0] + c * x[1] - 1.0]).collect();
        assert!((kruskal_stress(&dm, &moved) - p.stress).abs() < 1e-12);
        for axis in 0..2 {
            let first = p.coords.iter().map(|x| x[axis]).find(|v| v.abs() > 1e-9).unwrap();
            assert!(first > 0.0);
        }
        assert_eq!(mds_project(&dm), p);
    }

    #[test]
    fn non_euclidean_input_reports_fidelity() {
        // path metric on a 4-cycle with one long chord: not Euclidean
        let rows = vec![
            vec![0.0, 1.0, 2.0, 1.0],
            vec![1.0, 0.0, 1.0, 2.0],
            vec![2.0, 1.0, 0.0, 1.0],
            vec![1.0, 2.0, 1.0, 0.0],
        ];
        let dm = DistanceMatrix::from_rows((0..4).map(|i| i.to_string()).collect(), &rows, 2, 2.0);
        let p = mds_project(&dm);
        assert!(p.stress > 0.0);
        assert!((0.0..=1.0).contains(&p.eigenvalue_share));
    }
}
