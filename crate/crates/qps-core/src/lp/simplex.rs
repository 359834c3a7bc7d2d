//! Dense two-phase primal simplex with Bland's rule.
//!
//! Solves min cᵀx s.t. Ax = b, x ≥ 0 (b ≥ 0 after row normalization). The
//! problems here are tiny by LP standards (m ≤ a few hundred, n ≤ a few tens
//! of thousands), so the basis inverse is refactorized from scratch every
//! iteration; Bland's rule keeps the pivot sequence deterministic and free of
//! cycling.

use super::LpError;

const REDUCED_COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;

/// Row-major dense matrix.
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// yᵀA for a length-`rows` vector y.
    pub fn left_mul(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (i, yi) in y.iter().enumerate() {
            if *yi == 0.0 {
                continue;
            }
            let row = self.row(i);
            for (o, a) in out.iter_mut().zip(row) {
                *o += yi * a;
            }
        }
        out
    }

    /// A·x.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(mat: &[f64], n: usize) -> Result<Self, LpError> {
        let mut lu = mat.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].abs();
            for i in k + 1..n {
                let v = lu[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best < 1e-13 {
                return Err(LpError::Numerical(format!(
                    "singular basis matrix at pivot {k}"
                )));
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let piv = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / piv;
                lu[i * n + k] = f;
                for j in k + 1..n {
                    lu[i * n + j] -= f * lu[k * n + j];
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 1..n {
            for j in 0..i {
                x[i] -= self.lu[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[i * n + j] * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    /// Solves Aᵀ y = rhs.
    fn solve_transpose(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        // Uᵀ z = rhs (forward), Lᵀ w = z (backward), y = Pᵀ w
        let mut z = rhs.to_vec();
        for i in 0..n {
            for j in 0..i {
                z[i] -= self.lu[j * n + i] * z[j];
            }
            z[i] /= self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                z[i] -= self.lu[j * n + i] * z[j];
            }
        }
        let mut y = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = z[i];
        }
        y
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
    /// Simplex multipliers y = c_B B⁻¹ at the optimum.
    pub duals: Vec<f64>,
}

/// min cᵀx, Ax = b, x ≥ 0. Requires the problem to be feasible (the callers
/// build formulations with slack structure that always admits a solution);
/// phase 1 failing to reach zero is reported as a numerical error.
pub fn solve_standard_form(a: &DenseMatrix, b: &[f64], c: &[f64]) -> Result<LpSolution, LpError> {
    let m = a.rows;
    let n = a.cols;
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);
    // normalize rows to b >= 0
    let mut a = a.clone();
    let mut b = b.to_vec();
    for i in 0..m {
        if b[i] < 0.0 {
            b[i] = -b[i];
            for j in 0..n {
                a.set(i, j, -a.get(i, j));
            }
        }
    }
    // artificial columns appended at indices n..n+m
    let total = n + m;
    let mut basis: Vec<usize> = (n..total).collect();
    let col = |a: &DenseMatrix, j: usize, i: usize| -> f64 {
        if j < n {
            a.get(i, j)
        } else if j - n == i {
            1.0
        } else {
            0.0
        }
    };

    let run_phase = |a: &DenseMatrix,
                     b: &[f64],
                     basis: &mut Vec<usize>,
                     cost: &dyn Fn(usize) -> f64,
                     allow_enter: &dyn Fn(usize) -> bool,
                     phase: u8|
     -> Result<(Vec<f64>, Vec<f64>), LpError> {
        let max_iters = 50_000 + 200 * (n + m);
        let mut last_obj = f64::INFINITY;
        let mut stalled = 0usize;
        for _ in 0..max_iters {
            // refactor basis
            let mut bmat = vec![0.0; m * m];
            for (bi, &bj) in basis.iter().enumerate() {
                for i in 0..m {
                    bmat[i * m + bi] = col(a, bj, i);
                }
            }
            let lu = Lu::factor(&bmat, m)?;
            let xb = lu.solve(b);
            let cb: Vec<f64> = basis.iter().map(|&j| cost(j)).collect();
            let y = lu.solve_transpose(&cb);
            // pricing: Dantzig (most negative reduced cost) while the
            // objective keeps moving, deterministic Bland fallback once it
            // stalls on degenerate pivots — terminates without cycling
            let obj_now: f64 = cb.iter().zip(&xb).map(|(c, x)| c * x).sum();
            if obj_now < last_obj - 1e-12 {
                last_obj = obj_now;
                stalled = 0;
            } else {
                stalled += 1;
            }
            let use_bland = stalled > 200;
            let ya = a.left_mul(&y);
            let mut in_basis = vec![false; total];
            for &bj in basis.iter() {
                in_basis[bj] = true;
            }
            let mut entering = None;
            let mut best_d = -REDUCED_COST_TOL;
            for j in 0..total {
                if in_basis[j] || !allow_enter(j) {
                    continue;
                }
                let yaj = if j < n { ya[j] } else { y[j - n] };
                let d = cost(j) - yaj;
                if d < best_d {
                    entering = Some(j);
                    if use_bland {
                        break;
                    }
                    best_d = d;
                }
            }
            let entering = match entering {
                Some(j) => j,
                None => {
                    let obj = cb.iter().zip(&xb).map(|(c, x)| c * x).sum();
                    let mut x = vec![0.0; total];
                    for (bi, &bj) in basis.iter().enumerate() {
                        x[bj] = xb[bi].max(0.0);
                    }
                    let mut out = x;
                    out.extend(y);
                    return Ok((out, vec![obj]));
                }
            };
            let acol: Vec<f64> = (0..m).map(|i| col(a, entering, i)).collect();
            let w = lu.solve(&acol);
            // ratio test with Bland tie-break on the leaving variable index;
            // in phase 2 basic artificials also block at ratio 0 when the
            // direction would lift them off zero
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let blocking = w[i] > PIVOT_TOL
                    || (phase == 2 && basis[i] >= n && w[i] < -PIVOT_TOL);
                if !blocking {
                    continue;
                }
                let ratio = if w[i] > PIVOT_TOL {
                    (xb[i].max(0.0)) / w[i]
                } else {
                    0.0
                };
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-12
                            || ((ratio - lr).abs() <= 1e-12 && basis[i] < basis[li])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
            match leave {
                Some((li, _)) => basis[li] = entering,
                None => return Err(LpError::Unbounded),
            }
        }
        Err(LpError::Numerical("simplex iteration limit reached".into()))
    };

    // phase 1: minimize the artificial mass
    let phase1_cost = |j: usize| if j >= n { 1.0 } else { 0.0 };
    let (x1, obj1) = run_phase(&a, &b, &mut basis, &phase1_cost, &|_| true, 1)?;
    drop(x1);
    if obj1[0] > 1e-7 {
        return Err(LpError::Numerical(format!(
            "phase-1 objective {} > 0; formulation should always be feasible",
            obj1[0]
        )));
    }
    // phase 2: original costs, artificials never re-enter
    let phase2_cost = |j: usize| if j < n { c[j] } else { 0.0 };
    let (xy, obj2) = run_phase(&a, &b, &mut basis, &phase2_cost, &|j| j < n, 2)?;
    let (x, y) = xy.split_at(total);
    Ok(LpSolution {
        objective: obj2[0],
        x: x[..n].to_vec(),
        duals: y.to_vec(),
    })
}
