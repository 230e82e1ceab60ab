use std::collections::BTreeSet;

use islands::algos::{
    disjoint_greedy, line_greedy, overlap_greedy, partition_from_lines, SeparatingLine,
};
use islands::geom::{
    convex_hull, cross, int, point_in_hull, segment_intersection, Containment, Point, Segment,
    SegmentIntersection,
};
use islands::island::{enumerate_islands, Instance};
use islands::oracles::{verify_cover, verify_partition, verify_separating};
use num_traits::Signed;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point> {
    (-20i64..20, -20i64..20).prop_map(|(x, y)| Point::from_ints(x, y))
}

fn instance(max_n: usize) -> impl Strategy<Value = Instance> {
    (
        prop::collection::btree_set((0i64..30, 0i64..30), 1..=max_n),
        2usize..=3,
    )
        .prop_flat_map(|(pts, colors)| {
            let n = pts.len();
            (Just(pts), Just(colors), prop::collection::vec(0..colors, n))
        })
        .prop_map(|(pts, colors, cols)| {
            let pts = pts
                .into_iter()
                .map(|(x, y)| Point::from_ints(x, y))
                .collect();
            Instance::new(pts, cols, colors).unwrap()
        })
}

fn map_instance(inst: &Instance, f: impl Fn(&Point) -> Point) -> Instance {
    Instance::new(
        inst.points().iter().map(f).collect(),
        inst.colors().to_vec(),
        inst.color_count(),
    )
    .unwrap()
}

fn island_sets(inst: &Instance) -> BTreeSet<Vec<usize>> {
    enumerate_islands(inst, None)
        .unwrap()
        .iter()
        .map(|i| i.members().to_vec())
        .collect()
}

proptest! {
    #[test]
    fn hull_contains_inputs_and_is_strictly_convex(pts in prop::collection::vec(point(), 1..12)) {
        let hull = convex_hull(&pts).unwrap();
        for p in &pts {
            prop_assert!(point_in_hull(p, &hull, Containment::Closed));
        }
        let v = hull.vertices();
        for q in v {
            prop_assert!(pts.contains(q));
        }
        if v.len() >= 3 {
            for k in 0..v.len() {
                let turn = cross(&v[k], &v[(k + 1) % v.len()], &v[(k + 2) % v.len()]);
                prop_assert!(turn.is_positive());
            }
        }
    }

    #[test]
    fn segment_intersection_is_symmetric(a in point(), b in point(), c in point(), d in point()) {
        let s = Segment::new(a, b);
        let t = Segment::new(c, d);
        let st = segment_intersection(&s, &t);
        prop_assert_eq!(&st, &segment_intersection(&t, &s));
        if let SegmentIntersection::Point(p) = st {
            let hs = convex_hull(&[s.a.clone(), s.b.clone()]).unwrap();
            let ht = convex_hull(&[t.a.clone(), t.b.clone()]).unwrap();
            prop_assert!(point_in_hull(&p, &hs, Containment::Closed));
            prop_assert!(point_in_hull(&p, &ht, Containment::Closed));
        }
    }

    #[test]
    fn islands_invariant_under_similarity(inst in instance(7), dx in -50i64..50, k in 1i64..5) {
        let moved = map_instance(&inst, |p| {
            // rotate by 90 degrees, scale by k, translate
            Point::new(-&p.y * int(k) + int(dx), &p.x * int(k) - int(3))
        });
        prop_assert_eq!(island_sets(&inst), island_sets(&moved));
    }

    #[test]
    fn greedies_are_valid(inst in instance(9)) {
        let p = disjoint_greedy(&inst).unwrap();
        prop_assert!(verify_partition(&inst, &p).passed());
        let c = overlap_greedy(&inst).unwrap();
        prop_assert!(verify_cover(&inst, &c).passed());
        prop_assert_eq!(c.per_step.iter().sum::<usize>(), inst.len());
        prop_assert!(c.per_step.iter().all(|&s| s > 0));
    }

    #[test]
    fn line_greedy_separates(inst in instance(8)) {
        let lines = line_greedy(&inst);
        prop_assert!(verify_separating(&inst, &lines).passed());
        let p = partition_from_lines(&inst, &lines).unwrap();
        prop_assert!(verify_partition(&inst, &p).passed());
    }

    #[test]
    fn separating_line_is_canonical(a in -9i64..9, b in -9i64..9, c in -9i64..9, k in 1i64..6) {
        prop_assume!(a != 0 || b != 0);
        let l = SeparatingLine::new(int(a), int(b), int(c)).unwrap();
        let m = SeparatingLine::new(int(-k * a), int(-k * b), int(-k * c)).unwrap();
        prop_assert_eq!(l, m);
    }
}
