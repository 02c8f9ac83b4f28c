//! Fixtures shared by the benchmarks.

use cdsp_core::{parse_measure, Measure};

pub const MEASURES: [(&str, &str); 4] = [
    ("dirac", "0:1"),
    ("antipodal", "0,1/2:1,1"),
    ("equispaced3", "0,1/3,2/3:1,1,1"),
    ("generic5", "0,1/7,2/5,3/5,5/6:1,2,1,3,1"),
];

pub fn measure(name: &str) -> Measure {
    let spec = MEASURES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s).expect("known fixture");
    parse_measure(spec).expect("fixture parses")
}

pub fn all() -> Vec<(&'static str, Measure)> {
    MEASURES.iter().map(|(n, s)| (*n, parse_measure(s).expect("fixture parses"))).collect()
}
