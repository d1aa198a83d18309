use rand::Rng;

use super::tree::{Primitive, PrimitiveSet, ProgramTree};

/// Every branch reaches exactly `depth`.
pub fn full<R: Rng + ?Sized>(depth: usize, primitives: &PrimitiveSet, rng: &mut R) -> ProgramTree {
    let mut nodes = Vec::new();
    push_full(depth, primitives, rng, &mut nodes);
    ProgramTree::from_prefix_unchecked(nodes)
}

/// Branches stop early whenever a terminal is drawn. With `function_root`
/// the root is forced to be a function (when `max_depth > 0`).
pub fn grow<R: Rng + ?Sized>(
    max_depth: usize,
    function_root: bool,
    primitives: &PrimitiveSet,
    rng: &mut R,
) -> ProgramTree {
    let mut nodes = Vec::new();
    if function_root && max_depth > 0 {
        let f = primitives.random_function(rng);
        nodes.push(f);
        for _ in 0..f.arity() {
            push_grow(max_depth - 1, primitives, rng, &mut nodes);
        }
    } else {
        push_grow(max_depth, primitives, rng, &mut nodes);
    }
    ProgramTree::from_prefix_unchecked(nodes)
}

fn push_full<R: Rng + ?Sized>(
    depth: usize,
    primitives: &PrimitiveSet,
    rng: &mut R,
    out: &mut Vec<Primitive>,
) {
    if depth == 0 {
        out.push(primitives.random_terminal(rng));
        return;
    }
    let f = primitives.random_function(rng);
    out.push(f);
    for _ in 0..f.arity() {
        push_full(depth - 1, primitives, rng, out);
    }
}

fn push_grow<R: Rng + ?Sized>(
    depth: usize,
    primitives: &PrimitiveSet,
    rng: &mut R,
    out: &mut Vec<Primitive>,
) {
    let p = if depth == 0 {
        primitives.random_terminal(rng)
    } else {
        primitives.random_primitive(rng)
    };
    out.push(p);
    for _ in 0..p.arity() {
        push_grow(depth - 1, primitives, rng, out);
    }
}

/// Ramped half-and-half: individual `k` gets target depth
/// `min_depth + k % span` and alternates full/grow every `span` individuals,
/// so each depth receives both methods.
pub fn ramped_half_and_half<R: Rng + ?Sized>(
    pop_size: usize,
    min_depth: usize,
    max_depth: usize,
    primitives: &PrimitiveSet,
    rng: &mut R,
) -> Vec<ProgramTree> {
    assert!(min_depth >= 1 && min_depth <= max_depth, "invalid depth range");
    let span = max_depth - min_depth + 1;
    (0..pop_size)
        .map(|k| {
            let depth = min_depth + k % span;
            if (k / span).is_multiple_of(2) {
                full(depth, primitives, rng)
            } else {
                grow(depth, true, primitives, rng)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn collapsed_range_gives_depth_one() {
        let ps = PrimitiveSet::standard(18);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let trees = ramped_half_and_half(2, 1, 1, &ps, &mut rng);
        assert_eq!(trees.len(), 2);
        for t in &trees {
            assert_eq!(t.depth(), 1);
            assert!(!t.nodes()[0].is_terminal());
        }
    }

    #[test]
    fn default_population_respects_depths() {
        let ps = PrimitiveSet::standard(18);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trees = ramped_half_and_half(500, 1, 5, &ps, &mut rng);
        assert_eq!(trees.len(), 500);
        let mut seen = [false; 6];
        for t in &trees {
            let d = t.depth();
            assert!((1..=5).contains(&d), "depth {d}");
            assert!(t.len() <= 800);
            seen[d] = true;
        }
        assert!(seen[1..].iter().all(|&s| s));
    }

    #[test]
    fn deterministic_under_seed() {
        let ps = PrimitiveSet::standard(18);
        let a = ramped_half_and_half(50, 1, 5, &ps, &mut ChaCha8Rng::seed_from_u64(3));
        let b = ramped_half_and_half(50, 1, 5, &ps, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn full_trees_hit_exact_depth() {
        let ps = PrimitiveSet::standard(4);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 0..6 {
            assert_eq!(full(d, &ps, &mut rng).depth(), d);
        }
    }
}
