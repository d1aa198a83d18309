use super::tree::{Primitive, ProgramTree};
use crate::semantics::SemanticsVector;

/// Magnitude cap applied to every intermediate value.
pub const OUTPUT_LIMIT: f64 = 1e30;
/// Denominators with magnitude at or below this make protected division return 1.
pub const DIV_EPSILON: f64 = 1e-9;

/// Fitness-case inputs, `n_rows` cases by `n_features` columns.
///
/// Stored column-major because evaluation runs one node over all cases at a time.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    n_rows: usize,
    n_features: usize,
    columns: Vec<f64>,
}

impl FeatureMatrix {
    /// Builds from a row-major buffer of length `n_rows * n_features`.
    pub fn from_row_major(n_rows: usize, n_features: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), n_rows * n_features, "row-major buffer size");
        let mut columns = vec![0.0; data.len()];
        for r in 0..n_rows {
            for c in 0..n_features {
                columns[c * n_rows + r] = data[r * n_features + c];
            }
        }
        Self {
            n_rows,
            n_features,
            columns,
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_features = rows.first().map_or(0, Vec::len);
        let flat: Vec<f64> = rows
            .iter()
            .inspect(|r| assert_eq!(r.len(), n_features, "ragged rows"))
            .flatten()
            .copied()
            .collect();
        Self::from_row_major(rows.len(), n_features, &flat)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn column(&self, feature: usize) -> &[f64] {
        &self.columns[feature * self.n_rows..(feature + 1) * self.n_rows]
    }

    pub fn get(&self, row: usize, feature: usize) -> f64 {
        self.columns[feature * self.n_rows + row]
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        (0..self.n_features).map(|c| self.get(row, c)).collect()
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.columns.len());
        for r in 0..self.n_rows {
            out.extend((0..self.n_features).map(|c| self.get(r, c)));
        }
        out
    }

    /// New matrix holding the given rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut columns = Vec::with_capacity(rows.len() * self.n_features);
        for c in 0..self.n_features {
            let col = self.column(c);
            columns.extend(rows.iter().map(|&r| col[r]));
        }
        Self {
            n_rows: rows.len(),
            n_features: self.n_features,
            columns,
        }
    }
}

#[inline]
fn settle(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-OUTPUT_LIMIT, OUTPUT_LIMIT)
    }
}

#[inline]
pub fn protected_div(a: f64, b: f64) -> f64 {
    if b.abs() <= DIV_EPSILON {
        1.0
    } else {
        a / b
    }
}

/// Runs `tree` on every case and returns its output vector.
///
/// Intermediate results are clamped to `±OUTPUT_LIMIT`, so for finite inputs
/// the output is always finite.
pub fn evaluate(tree: &ProgramTree, features: &FeatureMatrix) -> SemanticsVector {
    let n = features.n_rows();
    let mut stack: Vec<Vec<f64>> = Vec::with_capacity(tree.depth() * 2 + 2);
    let mut pool: Vec<Vec<f64>> = Vec::new();

    for node in tree.nodes().iter().rev() {
        let out = match *node {
            Primitive::Feature(k) => {
                let mut buf = pool.pop().unwrap_or_default();
                buf.clear();
                buf.extend(features.column(k as usize).iter().map(|&v| settle(v)));
                buf
            }
            Primitive::If => {
                let mut cond = stack.pop().expect("arity");
                let then = stack.pop().expect("arity");
                let other = stack.pop().expect("arity");
                for i in 0..n {
                    cond[i] = if cond[i] > 0.0 { then[i] } else { other[i] };
                }
                pool.push(then);
                pool.push(other);
                cond
            }
            op => {
                let mut a = stack.pop().expect("arity");
                let b = stack.pop().expect("arity");
                match op {
                    Primitive::Add => a.iter_mut().zip(&b).for_each(|(x, y)| *x = settle(*x + y)),
                    Primitive::Sub => a.iter_mut().zip(&b).for_each(|(x, y)| *x = settle(*x - y)),
                    Primitive::Mul => a.iter_mut().zip(&b).for_each(|(x, y)| *x = settle(*x * y)),
                    Primitive::Div => a
                        .iter_mut()
                        .zip(&b)
                        .for_each(|(x, y)| *x = settle(protected_div(*x, *y))),
                    _ => unreachable!(),
                }
                pool.push(b);
                a
            }
        };
        stack.push(out);
    }
    debug_assert_eq!(stack.len(), 1);
    SemanticsVector::new(stack.pop().expect("non-empty tree"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> FeatureMatrix {
        FeatureMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn terminal_projects_column() {
        let x = m(&[&[0.1, 0.2, 0.3, 0.7], &[1.0, 2.0, 3.0, 4.0]]);
        let s = evaluate(&ProgramTree::leaf(3), &x);
        assert_eq!(s.values(), &[0.7, 4.0]);
    }

    #[test]
    fn protected_division_on_zero() {
        let x = m(&[&[1.0, 0.0], &[6.0, 3.0]]);
        let t: ProgramTree = "(div x0 x1)".parse().unwrap();
        assert_eq!(evaluate(&t, &x).values(), &[1.0, 2.0]);
    }

    #[test]
    fn if_selects_branch() {
        let x = m(&[&[-1.0, 5.0, 9.0], &[2.0, 5.0, 9.0], &[0.0, 5.0, 9.0]]);
        let t: ProgramTree = "(if x0 x1 x2)".parse().unwrap();
        assert_eq!(evaluate(&t, &x).values(), &[9.0, 5.0, 9.0]);
    }

    #[test]
    fn argument_order() {
        let x = m(&[&[10.0, 4.0]]);
        let t: ProgramTree = "(sub x0 x1)".parse().unwrap();
        assert_eq!(evaluate(&t, &x).values(), &[6.0]);
        let t: ProgramTree = "(div x0 x1)".parse().unwrap();
        assert_eq!(evaluate(&t, &x).values(), &[2.5]);
    }

    #[test]
    fn overflow_is_clamped() {
        let x = m(&[&[1e20, 1e-12]]);
        let t: ProgramTree = "(mul (mul x0 x0) (mul x0 x0))".parse().unwrap();
        assert_eq!(evaluate(&t, &x).values(), &[OUTPUT_LIMIT]);
        let t: ProgramTree = "(sub (mul (mul x0 x0) x0) (mul (mul x0 x0) x0))".parse().unwrap();
        assert_eq!(evaluate(&t, &x).values(), &[0.0]);
    }

    #[test]
    fn row_major_round_trip() {
        let data: Vec<f64> = (0..12).map(f64::from).collect();
        let x = FeatureMatrix::from_row_major(3, 4, &data);
        assert_eq!(x.get(1, 2), 6.0);
        assert_eq!(x.to_row_major(), data);
        assert_eq!(x.select_rows(&[2, 0]).row(0), vec![8.0, 9.0, 10.0, 11.0]);
    }

    proptest::proptest! {
        #[test]
        fn total_and_deterministic(
            seed in 0u64..10_000,
            values in proptest::collection::vec(-10.0f64..10.0, 18 * 12),
        ) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let ps = crate::gp::PrimitiveSet::standard(18);
            let t = crate::gp::grow(8, true, &ps, &mut rng);
            let x = FeatureMatrix::from_row_major(12, 18, &values);
            let a = evaluate(&t, &x);
            proptest::prop_assert!(a.values().iter().all(|v| v.is_finite()));
            let b = evaluate(&t, &x);
            proptest::prop_assert!(a.values().iter().zip(b.values()).all(|(p, q)| p.to_bits() == q.to_bits()));
        }
    }
}
