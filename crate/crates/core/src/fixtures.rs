//! Diagrams shipped with the engine.

use crate::diagram::{parse_any, LinkDiagram};

#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub text: &'static str,
    /// Fixtures sharing a group are diagrams of the same link.
    pub group: &'static str,
}

impl Fixture {
    pub fn diagram(&self) -> LinkDiagram {
        parse_any(self.text).expect("bundled fixture parses")
    }
}

macro_rules! fixture {
    ($name:literal, $group:literal) => {
        Fixture { name: $name, text: include_str!(concat!("../fixtures/", $name, ".pd")), group: $group }
    };
}

pub const FIXTURES: &[Fixture] = &[
    fixture!("unknot", "unknot"),
    fixture!("unknot_kink", "unknot"),
    fixture!("unknot_kink_negative", "unknot"),
    fixture!("hopf", "hopf"),
    fixture!("hopf_r2", "hopf"),
    fixture!("hopf_negative", "hopf_negative"),
    fixture!("trefoil_right", "trefoil_right"),
    fixture!("trefoil_left", "trefoil_left"),
    fixture!("figure_eight", "figure_eight"),
    fixture!("unlink2", "unlink2"),
    fixture!("unlink3", "unlink3"),
];

pub fn fixture(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_parse_with_expected_shape() {
        let expect = [
            ("unknot", 0, 1, 0),
            ("unknot_kink", 1, 1, 1),
            ("unknot_kink_negative", 1, 1, -1),
            ("hopf", 2, 2, 2),
            ("hopf_r2", 4, 2, 2),
            ("hopf_negative", 2, 2, -2),
            ("trefoil_right", 3, 1, 3),
            ("trefoil_left", 3, 1, -3),
            ("figure_eight", 4, 1, 0),
            ("unlink2", 0, 2, 0),
            ("unlink3", 0, 3, 0),
        ];
        assert_eq!(FIXTURES.len(), expect.len());
        for (name, k, l, w) in expect {
            let d = fixture(name).unwrap().diagram();
            assert_eq!((d.crossing_count(), d.component_count(), d.writhe()), (k, l, w), "{name}");
        }
    }

    #[test]
    fn hopf_variants_link_once() {
        assert_eq!(fixture("hopf").unwrap().diagram().linking_matrix().get(0, 1), 1);
        assert_eq!(fixture("hopf_r2").unwrap().diagram().linking_matrix().get(0, 1), 1);
        assert_eq!(fixture("hopf_negative").unwrap().diagram().linking_matrix().get(0, 1), -1);
        assert!(fixture("nope").is_none());
    }
}
