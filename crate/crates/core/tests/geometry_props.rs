use lbcp_core::geometry::{clip_rect, contains_point, convex_hull};
use lbcp_core::{Point2, Rect2};
use proptest::prelude::*;

fn pts() -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec((-20i64..20, -20i64..20, 1i64..4), 0..12)
        .prop_map(|v| v.into_iter().map(|(x, y, den)| Point2::ratio(x, y, den)).collect())
}

proptest! {
    #[test]
    fn hull_is_idempotent(p in pts()) {
        let h = convex_hull(p.iter().copied());
        prop_assert_eq!(convex_hull(h.vertices().iter().copied()), h);
    }

    #[test]
    fn hull_contains_inputs(p in pts()) {
        let h = convex_hull(p.iter().copied());
        for q in &p {
            prop_assert!(contains_point(&h, *q));
        }
    }

    #[test]
    fn clip_stays_in_both(p in pts(), x in -10i64..10, y in -10i64..10, w in 1i64..15, d in 1i64..15) {
        let h = convex_hull(p.iter().copied());
        let r = Rect2::new(x, y, w, d);
        let c = clip_rect(&h, &r);
        for v in c.vertices() {
            prop_assert!(contains_point(&h, *v));
            prop_assert!(r.contains_point(*v));
        }
        prop_assert!(c.area() <= h.area());
    }
}
