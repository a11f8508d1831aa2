use proptest::prelude::*;

use maxop::PwlFunction;

/// Compactly supported functions with 1 to 8 interior breakpoints.
pub fn pwl() -> impl Strategy<Value = PwlFunction> {
    (-3.0f64..0.0, prop::collection::vec((0.05f64..1.0, -2.0f64..2.0), 1..9), 0.05f64..1.0).prop_map(
        |(start, interior, last_gap)| {
            let mut xs = vec![start];
            let mut vs = vec![0.0];
            for (gap, v) in interior {
                xs.push(xs.last().unwrap() + gap);
                vs.push(v);
            }
            xs.push(xs.last().unwrap() + last_gap);
            vs.push(0.0);
            PwlFunction::new(xs, vs).unwrap()
        },
    )
    .prop_filter("nonzero", |f| !f.is_zero())
}
