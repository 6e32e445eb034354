use super::C64;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a Hermitian matrix (row-major, `dim x dim`) by cyclic
/// complex Jacobi rotations, sorted ascending.
///
/// Each rotation first removes the phase of `a[p][q]` with a diagonal
/// unitary, then applies the real symmetric Jacobi rotation that zeroes it.
pub fn hermitian_eigenvalues(dim: usize, data: &[C64]) -> Vec<f64> {
    assert_eq!(data.len(), dim * dim, "matrix is not {dim}x{dim}");
    let mut a = data.to_vec();
    // Symmetrize so that round-off in the input never drives the sweep.
    for i in 0..dim {
        a[i * dim + i] = C64::new(a[i * dim + i].re, 0.0);
        for j in i + 1..dim {
            let v = (a[i * dim + j] + a[j * dim + i].conj()) * 0.5;
            a[i * dim + j] = v;
            a[j * dim + i] = v.conj();
        }
    }
    let scale: f64 = a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        return vec![0.0; dim];
    }

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..dim)
            .flat_map(|i| (0..dim).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * dim + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                rotate(&mut a, dim, p, q);
            }
        }
    }

    let mut eig: Vec<f64> = (0..dim).map(|i| a[i * dim + i].re).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    eig
}

fn rotate(a: &mut [C64], dim: usize, p: usize, q: usize) {
    let g = a[p * dim + q];
    let r = g.norm();
    if r < 1e-300 {
        return;
    }
    let e = g / r;
    let app = a[p * dim + p].re;
    let aqq = a[q * dim + q].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // U = [[c, s], [-s e*, c e*]] on (p, q); A <- U† A U.
    let ec = e.conj();
    for k in 0..dim {
        let akp = a[k * dim + p];
        let akq = a[k * dim + q];
        a[k * dim + p] = akp * c - akq * ec * s;
        a[k * dim + q] = akp * s + akq * ec * c;
    }
    for k in 0..dim {
        let apk = a[p * dim + k];
        let aqk = a[q * dim + k];
        a[p * dim + k] = apk * c - aqk * e * s;
        a[q * dim + k] = apk * s + aqk * e * c;
    }
    a[p * dim + q] = C64::new(0.0, 0.0);
    a[q * dim + p] = C64::new(0.0, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_closed_form() {
        // [[a, g], [g*, b]] has eigenvalues (a+b)/2 ± sqrt(((a-b)/2)^2 + |g|^2).
        let (a, b, g) = (0.3, -1.1, C64::new(0.4, -0.7));
        let m = [C64::new(a, 0.0), g, g.conj(), C64::new(b, 0.0)];
        let eig = hermitian_eigenvalues(2, &m);
        let mid = (a + b) / 2.0;
        let rad = (((a - b) / 2.0f64).powi(2) + g.norm_sqr()).sqrt();
        assert!((eig[0] - (mid - rad)).abs() < 1e-14);
        assert!((eig[1] - (mid + rad)).abs() < 1e-14);
    }

    #[test]
    fn diagonal_and_zero() {
        let m = [
            C64::new(2.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-3.0, 0.0),
        ];
        assert_eq!(hermitian_eigenvalues(2, &m), vec![-3.0, 2.0]);
        assert_eq!(hermitian_eigenvalues(3, &[C64::new(0.0, 0.0); 9]), vec![0.0; 3]);
    }

    #[test]
    fn invariants_of_a_dense_complex_matrix() {
        // Trace and Frobenius norm are preserved by unitary similarity.
        let dim = 8;
        let mut m = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = if i == j {
                    C64::new((i as f64 * 0.37).sin(), 0.0)
                } else {
                    C64::new((i * 7 + j) as f64 * 0.11, ((i + 2 * j) as f64).cos())
                };
                m[i * dim + j] = v;
                m[j * dim + i] = v.conj();
            }
        }
        let eig = hermitian_eigenvalues(dim, &m);
        let tr: f64 = (0..dim).map(|i| m[i * dim + i].re).sum();
        let fro: f64 = m.iter().map(|v| v.norm_sqr()).sum();
        assert!((eig.iter().sum::<f64>() - tr).abs() < 1e-12);
        assert!((eig.iter().map(|e| e * e).sum::<f64>() - fro).abs() < 1e-11);
    }
}
