use serde::{Deserialize, Serialize};

/// `a` dominates `b` under maximization: no worse anywhere, better somewhere.
#[inline]
pub fn dominates(a: &[f64; 2], b: &[f64; 2]) -> bool {
    a[0] >= b[0] && a[1] >= b[1] && (a[0] > b[0] || a[1] > b[1])
}

/// A point on a (TPR, TNR) front with the run and individual it came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontPoint {
    pub tpr: f64,
    pub tnr: f64,
    #[serde(default)]
    pub run: u32,
    #[serde(default)]
    pub individual: u32,
}

impl FrontPoint {
    pub fn new(tpr: f64, tnr: f64) -> Self {
        Self {
            tpr,
            tnr,
            run: 0,
            individual: 0,
        }
    }

    pub fn point(&self) -> [f64; 2] {
        [self.tpr, self.tnr]
    }
}

/// Indices of the maximal points, one per distinct objective vector, ordered
/// by decreasing first objective.
pub fn nondominated_indices(points: &[[f64; 2]]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        points[j][0]
            .total_cmp(&points[i][0])
            .then(points[j][1].total_cmp(&points[i][1]))
            .then(i.cmp(&j))
    });
    let mut best_second = f64::NEG_INFINITY;
    let mut keep = Vec::new();
    for i in order {
        if points[i][1] > best_second {
            best_second = points[i][1];
            keep.push(i);
        }
    }
    keep
}

/// Maximal subset of `points`; duplicates collapse to their first occurrence.
pub fn nondominated_filter(points: &[FrontPoint]) -> Vec<FrontPoint> {
    let raw: Vec<[f64; 2]> = points.iter().map(FrontPoint::point).collect();
    nondominated_indices(&raw).into_iter().map(|i| points[i]).collect()
}

/// Non-dominated set of the union of several fronts.
pub fn accumulated_po_front(fronts: &[Vec<FrontPoint>]) -> Vec<FrontPoint> {
    let all: Vec<FrontPoint> = fronts.iter().flatten().copied().collect();
    nondominated_filter(&all)
}
