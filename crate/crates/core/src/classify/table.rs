//! The 21 groups, their tabulated properties and their ranking.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{DesignParams, FamilyCase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupLabel {
    A1,
    A2,
    A3,
    B1,
    B2,
    C,
    D1,
    D2,
    D3,
    D4,
    D5,
    E,
    F1,
    F2,
    G,
    H,
    I1,
    I2,
    I3,
    I4,
    J,
}

impl GroupLabel {
    pub const ALL: [GroupLabel; 21] = {
        use GroupLabel::*;
        [
            A1, A2, A3, B1, B2, C, D1, D2, D3, D4, D5, E, F1, F2, G, H, I1, I2, I3, I4, J,
        ]
    };

    pub fn family(self) -> FamilyCase {
        use GroupLabel::*;
        match self {
            A1 | A2 | A3 => FamilyCase::A,
            B1 | B2 => FamilyCase::B,
            C => FamilyCase::C,
            D1 | D2 | D3 | D4 | D5 => FamilyCase::D,
            E => FamilyCase::E,
            F1 | F2 => FamilyCase::F,
            G => FamilyCase::G,
            H => FamilyCase::H,
            I1 | I2 | I3 | I4 => FamilyCase::I,
            J => FamilyCase::J,
        }
    }

    pub fn of_family(case: FamilyCase) -> impl Iterator<Item = GroupLabel> {
        GroupLabel::ALL
            .into_iter()
            .filter(move |l| l.family() == case)
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for GroupLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GroupLabel::ALL
            .into_iter()
            .find(|l| l.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown group label {s:?}"))
    }
}

/// Categorical size used by the property table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Extent {
    Small,
    Intermediate,
    Big,
    #[serde(rename = "All the workspace")]
    AllTheWorkspace,
}

impl fmt::Display for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Extent::Small => "Small",
            Extent::Intermediate => "Intermediate",
            Extent::Big => "Big",
            Extent::AllTheWorkspace => "All the workspace",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroupRecord {
    pub label: GroupLabel,
    pub voids: usize,
    pub nodes: usize,
    pub four_iks_zone: Extent,
    pub holes: Extent,
    pub feasible_paths_zone: Extent,
}

pub fn group_record(label: GroupLabel) -> GroupRecord {
    use Extent::*;
    use GroupLabel::*;
    let (voids, nodes, four_iks_zone, holes, feasible_paths_zone) = match label {
        A1 => (0, 0, Intermediate, Small, AllTheWorkspace),
        A2 => (0, 2, Small, Small, AllTheWorkspace),
        A3 => (0, 4, Small, Intermediate, AllTheWorkspace),
        B1 => (0, 0, AllTheWorkspace, Intermediate, AllTheWorkspace),
        B2 => (0, 1, AllTheWorkspace, Big, AllTheWorkspace),
        C => (0, 0, AllTheWorkspace, Small, AllTheWorkspace),
        D1 => (1, 2, Small, Small, Big),
        D2 => (0, 0, Big, Small, Intermediate),
        D3 => (0, 1, Small, Intermediate, Intermediate),
        D4 => (0, 2, Small, Small, Big),
        D5 => (0, 0, Small, Small, AllTheWorkspace),
        E => (0, 0, AllTheWorkspace, Small, AllTheWorkspace),
        F1 => (0, 0, Intermediate, Small, AllTheWorkspace),
        F2 => (0, 2, Intermediate, Small, Big),
        G => (0, 0, AllTheWorkspace, Big, AllTheWorkspace),
        H => (0, 0, AllTheWorkspace, Intermediate, AllTheWorkspace),
        I1 => (0, 0, Small, Intermediate, Big),
        I2 => (1, 2, Small, Intermediate, Intermediate),
        I3 => (1, 0, Small, Small, AllTheWorkspace),
        I4 => (1, 2, Small, Small, AllTheWorkspace),
        J => (1, 0, AllTheWorkspace, Small, AllTheWorkspace),
    };
    GroupRecord {
        label,
        voids,
        nodes,
        four_iks_zone,
        holes,
        feasible_paths_zone,
    }
}

/// 1 for the most interesting groups, 3 for the least.
pub fn class_rank(label: GroupLabel) -> u8 {
    use GroupLabel::*;
    match label {
        C | E => 1,
        B2 | D1 | G | I2 | I3 | I4 => 3,
        _ => 2,
    }
}

/// A representative design of each group with its expected counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceDesign {
    pub label: GroupLabel,
    pub params: DesignParams,
    pub nodes: usize,
    pub voids: usize,
}

const fn reference(label: GroupLabel, d: [f64; 5], nodes: usize, voids: usize) -> ReferenceDesign {
    ReferenceDesign {
        label,
        params: DesignParams {
            d2: d[0],
            d3: d[1],
            d4: d[2],
            r2: d[3],
            r3: d[4],
        },
        nodes,
        voids,
    }
}

/// One design per group, in table order; lengths are `(d2, d3, d4, r2, r3)`.
pub const REFERENCE_DESIGNS: [ReferenceDesign; 21] = {
    use GroupLabel::*;
    [
        reference(A1, [0.0, 2.0, 1.5, 1.0, 0.0], 0, 0),
        reference(A2, [0.0, 2.0, 2.2, 1.5, 0.0], 2, 0),
        reference(A3, [0.0, 2.0, 3.0, 1.0, 0.0], 4, 0),
        reference(B1, [0.0, 2.0, 1.0, 0.0, 0.0], 0, 0),
        reference(B2, [0.0, 2.0, 3.0, 0.0, 0.0], 1, 0),
        reference(C, [0.0, 0.0, 2.0, 1.5, 0.0], 0, 0),
        reference(D1, [1.0, 1.4, 0.7, 0.0, 0.0], 2, 1),
        reference(D2, [1.0, 2.0, 1.5, 0.0, 0.0], 0, 0),
        reference(D3, [1.0, 2.0, 2.5, 0.0, 0.0], 1, 0),
        reference(D4, [1.0, 0.5, 2.0, 0.0, 0.0], 2, 0),
        reference(D5, [1.0, 0.6, 0.7, 0.0, 0.0], 0, 0),
        reference(E, [1.0, 0.0, 1.5, 0.0, 0.0], 0, 0),
        reference(F1, [0.0, 2.0, 1.5, 1.0, 1.0], 0, 0),
        reference(F2, [0.0, 1.0, 2.0, 1.0, 1.0], 2, 0),
        reference(G, [0.0, 1.0, 3.0, 0.0, 1.0], 0, 0),
        reference(H, [0.0, 0.0, 1.0, 3.0, 1.0], 0, 0),
        reference(I1, [1.0, 2.5, 1.5, 0.0, 0.5], 0, 0),
        reference(I2, [1.0, 3.0, 0.7, 0.0, 0.5], 2, 1),
        reference(I3, [1.0, 0.5, 0.7, 0.0, 0.5], 0, 1),
        reference(I4, [1.0, 0.3, 2.0, 0.0, 0.5], 2, 1),
        reference(J, [1.0, 0.0, 2.0, 0.0, 1.0], 0, 1),
    ]
};
