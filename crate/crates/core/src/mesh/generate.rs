use super::{Mesh, DIRICHLET};

/// Criss-cross triangulation of `[0,1]^2`: each of the `n^2` squares is cut
/// by both diagonals through an added center vertex, giving `4 n^2`
/// congruent triangles and `(n+1)^2 + n^2` vertices.
pub fn unit_square_mesh(n: usize) -> Mesh {
    assert!(n >= 1, "unit_square_mesh needs n >= 1");
    let h = 1.0 / n as f64;
    let grid = |i: usize, j: usize| j * (n + 1) + i;
    let center = |i: usize, j: usize| (n + 1) * (n + 1) + j * n + i;

    let mut coords = Vec::with_capacity(2 * ((n + 1) * (n + 1) + n * n));
    for j in 0..=n {
        for i in 0..=n {
            coords.extend_from_slice(&[i as f64 * h, j as f64 * h]);
        }
    }
    for j in 0..n {
        for i in 0..n {
            coords.extend_from_slice(&[(i as f64 + 0.5) * h, (j as f64 + 0.5) * h]);
        }
    }

    let mut cells = Vec::with_capacity(12 * n * n);
    for j in 0..n {
        for i in 0..n {
            let a = grid(i, j);
            let b = grid(i + 1, j);
            let c = grid(i + 1, j + 1);
            let d = grid(i, j + 1);
            let m = center(i, j);
            cells.extend_from_slice(&[a, b, m, b, c, m, c, d, m, d, a, m]);
        }
    }

    let mut facets = Vec::with_capacity(8 * n);
    for i in 0..n {
        facets.extend_from_slice(&[grid(i, 0), grid(i + 1, 0)]);
        facets.extend_from_slice(&[grid(n, i), grid(n, i + 1)]);
        facets.extend_from_slice(&[grid(i + 1, n), grid(i, n)]);
        facets.extend_from_slice(&[grid(0, i + 1), grid(0, i)]);
    }
    let markers = vec![DIRICHLET; 4 * n];
    Mesh::new(2, coords, cells, Some((facets, markers))).expect("criss-cross mesh is valid")
}

/// Structured subdivision of `[0,1]^3` into `n^3` cubes, each split into six
/// tetrahedra along the main diagonal (Kuhn subdivision).
pub fn unit_cube_mesh(n: usize) -> Mesh {
    assert!(n >= 1, "unit_cube_mesh needs n >= 1");
    let h = 1.0 / n as f64;
    let idx = |i: usize, j: usize, k: usize| (k * (n + 1) + j) * (n + 1) + i;
    let mut coords = Vec::with_capacity(3 * (n + 1).pow(3));
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                coords.extend_from_slice(&[i as f64 * h, j as f64 * h, k as f64 * h]);
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut cells = Vec::with_capacity(24 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for perm in PERMS {
                    let mut pos = [i, j, k];
                    cells.push(idx(pos[0], pos[1], pos[2]));
                    for axis in perm {
                        pos[axis] += 1;
                        cells.push(idx(pos[0], pos[1], pos[2]));
                    }
                }
            }
        }
    }
    Mesh::new(3, coords, cells, None).expect("Kuhn cube mesh is valid")
}
