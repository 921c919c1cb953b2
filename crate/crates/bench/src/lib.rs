//! Shared fixtures for the benchmark targets.

use goag_core::words::Pi1;
use goag_core::GraphOfGroups;

pub const BS23: &str = r#"{
    "vertices": [{"id": "v", "group": {"rank": 1, "torsion": []}}],
    "edges": [{"id": "e", "from": "v", "to": "v",
               "group": {"rank": 1, "torsion": []},
               "alpha_from": [[3]], "alpha_to": [[2]]}]
}"#;

pub const STAR: &str = r#"{
    "vertices": [
        {"id": "c", "group": {"rank": 2, "torsion": []}},
        {"id": "x", "group": {"rank": 1, "torsion": []}},
        {"id": "y", "group": {"rank": 1, "torsion": []}}
    ],
    "edges": [
        {"id": "cx", "from": "c", "to": "x", "group": {"rank": 1, "torsion": []},
         "alpha_from": [[2], [0]], "alpha_to": [[1]]},
        {"id": "cy", "from": "c", "to": "y", "group": {"rank": 1, "torsion": []},
         "alpha_from": [[0], [3]], "alpha_to": [[2]]}
    ]
}"#;

pub fn loop_pi1() -> Pi1 {
    Pi1::new(GraphOfGroups::from_json(BS23).unwrap()).unwrap()
}

pub fn star_pi1() -> Pi1 {
    Pi1::new(GraphOfGroups::from_json(STAR).unwrap()).unwrap()
}
