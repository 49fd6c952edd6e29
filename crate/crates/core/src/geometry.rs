//! Node placement.
//!
//! The two user pairs sit at fixed positions and the eavesdropper and the IRS
//! are dropped on named anchor points. The default layout (meters):
//!
//! ```text
//!   A1 = (0, 0)    B1 = (60, 0)    A2 = (0, 20)    B2 = (60, 20)
//!   Z  = (58, 2)   Y  = (62, 2)    W  = (30, 60)   V  = (30, 55)   X = (30, 40)
//! ```
//!
//! | label | E | IRS | layout                               |
//! |-------|---|-----|--------------------------------------|
//! | C1    | W | Z   | IRS next to B1, E far from the users |
//! | C2    | W | V   | IRS and E 5 m apart, both far away   |
//! | C3    | Z | V   | E next to B1, IRS far away           |
//! | C4    | Y | Z   | both next to B1                      |
//!
//! Anchor X has no role in the named layouts but can be used by custom
//! scenarios.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::params::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A node of the network. Pair indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeId {
    LegitA(usize),
    LegitB(usize),
    Eve,
    Irs,
}

impl NodeId {
    /// Position of a legitimate user in the power vector
    /// `[A1, B1, A2, B2, ...]`.
    pub fn user_index(self) -> Option<usize> {
        match self {
            NodeId::LegitA(j) if j >= 1 => Some(2 * (j - 1)),
            NodeId::LegitB(j) if j >= 1 => Some(2 * (j - 1) + 1),
            _ => None,
        }
    }

    pub fn from_user_index(u: usize) -> Self {
        if u % 2 == 0 {
            NodeId::LegitA(u / 2 + 1)
        } else {
            NodeId::LegitB(u / 2 + 1)
        }
    }

    /// Index of the pair a legitimate user belongs to (1-based).
    pub fn pair(self) -> Option<usize> {
        match self {
            NodeId::LegitA(j) | NodeId::LegitB(j) => Some(j),
            _ => None,
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::LegitA(j) => write!(f, "A{j}"),
            NodeId::LegitB(j) => write!(f, "B{j}"),
            NodeId::Eve => f.write_str("E"),
            NodeId::Irs => f.write_str("IRS"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConfigLabel {
    C1,
    C2,
    C3,
    C4,
    Custom,
}

impl ConfigLabel {
    pub const NAMED: [ConfigLabel; 4] = [Self::C1, Self::C2, Self::C3, Self::C4];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::C1 => "C1",
            Self::C2 => "C2",
            Self::C3 => "C3",
            Self::C4 => "C4",
            Self::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "C1" | "c1" => Some(Self::C1),
            "C2" | "c2" => Some(Self::C2),
            "C3" | "c3" => Some(Self::C3),
            "C4" | "c4" => Some(Self::C4),
            "custom" | "Custom" => Some(Self::Custom),
            _ => None,
        }
    }

    /// (eavesdropper anchor, IRS anchor) of a named layout.
    pub fn anchors(self) -> Option<(&'static str, &'static str)> {
        match self {
            Self::C1 => Some(("W", "Z")),
            Self::C2 => Some(("W", "V")),
            Self::C3 => Some(("Z", "V")),
            Self::C4 => Some(("Y", "Z")),
            Self::Custom => None,
        }
    }
}

impl fmt::Display for ConfigLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn default_anchors() -> BTreeMap<String, Point> {
    [
        ("V", Point::new(30.0, 55.0)),
        ("W", Point::new(30.0, 60.0)),
        ("X", Point::new(30.0, 40.0)),
        ("Y", Point::new(62.0, 2.0)),
        ("Z", Point::new(58.0, 2.0)),
    ]
    .into_iter()
    .map(|(k, p)| (k.to_string(), p))
    .collect()
}

/// Default `(A_j, B_j)` positions of the two pairs.
pub fn default_users() -> Vec<(Point, Point)> {
    vec![
        (Point::new(0.0, 0.0), Point::new(60.0, 0.0)),
        (Point::new(0.0, 20.0), Point::new(60.0, 20.0)),
    ]
}

/// Everything needed to build one scenario: layout plus parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub label: ConfigLabel,
    /// `(A_j, B_j)` positions, one entry per pair.
    pub users: Vec<(Point, Point)>,
    pub anchors: BTreeMap<String, Point>,
    pub eve_anchor: String,
    pub irs_anchor: String,
    pub params: SystemParams,
}

impl ScenarioConfig {
    /// One of the four named layouts with the default coordinates.
    pub fn named(label: ConfigLabel, params: SystemParams) -> Result<Self> {
        let (eve, irs) = label.anchors().ok_or_else(|| {
            Error::InvalidParams("`custom` has no default anchor assignment".into())
        })?;
        Ok(Self {
            label,
            users: default_users(),
            anchors: default_anchors(),
            eve_anchor: eve.into(),
            irs_anchor: irs.into(),
            params,
        })
    }
}

/// Positions of all nodes of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    users: Vec<(Point, Point)>,
    eve: Point,
    irs: Point,
}

impl Geometry {
    pub fn new(users: Vec<(Point, Point)>, eve: Point, irs: Point) -> Self {
        Self { users, eve, irs }
    }

    pub fn pairs(&self) -> usize {
        self.users.len()
    }

    /// All nodes: `A1, B1, ..., AN, BN, E, IRS`.
    pub fn nodes(&self) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = (0..2 * self.pairs()).map(NodeId::from_user_index).collect();
        out.push(NodeId::Eve);
        out.push(NodeId::Irs);
        out
    }

    pub fn position(&self, node: NodeId) -> Result<Point> {
        match node {
            NodeId::LegitA(j) if (1..=self.pairs()).contains(&j) => Ok(self.users[j - 1].0),
            NodeId::LegitB(j) if (1..=self.pairs()).contains(&j) => Ok(self.users[j - 1].1),
            NodeId::Eve => Ok(self.eve),
            NodeId::Irs => Ok(self.irs),
            other => Err(Error::UnplacedNode(other)),
        }
    }

    pub fn distance(&self, a: NodeId, b: NodeId) -> Result<f64> {
        distance(self, a, b)
    }
}

/// Euclidean distance between two placed nodes.
pub fn distance(geom: &Geometry, a: NodeId, b: NodeId) -> Result<f64> {
    Ok(geom.position(a)?.distance(&geom.position(b)?))
}

/// Builds the geometry of a scenario.
pub fn place_nodes(config: &ScenarioConfig) -> Result<Geometry> {
    if let Some((eve, irs)) = config.label.anchors() {
        if config.users.len() != 2 {
            return Err(Error::NamedConfigPairs {
                label: config.label.as_str(),
                pairs: config.users.len(),
            });
        }
        if config.eve_anchor != eve || config.irs_anchor != irs {
            return Err(Error::AnchorMismatch {
                label: config.label.as_str(),
                eve,
                irs,
            });
        }
    }
    if config.users.is_empty() {
        return Err(Error::InvalidParams("scenario has no user pairs".into()));
    }
    let lookup = |name: &str| {
        config
            .anchors
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownAnchor(name.into()))
    };
    let geom = Geometry {
        users: config.users.clone(),
        eve: lookup(&config.eve_anchor)?,
        irs: lookup(&config.irs_anchor)?,
    };
    let nodes = geom.nodes();
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            if !(geom.distance(a, b)? > 0.0) {
                return Err(Error::ZeroDistance(a, b));
            }
        }
    }
    Ok(geom)
}
