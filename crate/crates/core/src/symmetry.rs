//! The eight symmetries of the square board and canonical state forms.
//!
//! Rotations and reflections map squares onto squares of the same size, so
//! any property of a position (threats, wins, live squares) is carried over
//! unchanged to its images.

use std::cmp::Ordering;
use std::fmt;

use crate::board::{Grid, Position};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transform {
    Identity,
    /// Quarter turn clockwise.
    Rot90,
    Rot180,
    Rot270,
    /// Left-right mirror, `c -> n-1-c`.
    MirrorColumns,
    /// Top-bottom mirror, `r -> n-1-r`.
    MirrorRows,
    /// Reflection in the main diagonal.
    Transpose,
    /// Reflection in the anti-diagonal.
    AntiTranspose,
}

impl Transform {
    pub const ALL: [Transform; 8] = [
        Transform::Identity,
        Transform::Rot90,
        Transform::Rot180,
        Transform::Rot270,
        Transform::MirrorColumns,
        Transform::MirrorRows,
        Transform::Transpose,
        Transform::AntiTranspose,
    ];

    #[inline]
    pub fn apply(self, p: Position, n: usize) -> Position {
        let m = n - 1;
        let (r, c) = (p.r, p.c);
        let (r2, c2) = match self {
            Transform::Identity => (r, c),
            Transform::Rot90 => (c, m - r),
            Transform::Rot180 => (m - r, m - c),
            Transform::Rot270 => (m - c, r),
            Transform::MirrorColumns => (r, m - c),
            Transform::MirrorRows => (m - r, c),
            Transform::Transpose => (c, r),
            Transform::AntiTranspose => (m - c, m - r),
        };
        Position::new(r2, c2)
    }

    pub fn inverse(self) -> Transform {
        match self {
            Transform::Rot90 => Transform::Rot270,
            Transform::Rot270 => Transform::Rot90,
            t => t,
        }
    }

    /// `self.then(other)` applies `self` first, then `other`.
    pub fn then(self, other: Transform) -> Transform {
        // Probe with a board large enough to tell all eight maps apart.
        let n = 3;
        let a = other.apply(self.apply(Position::new(0, 1), n), n);
        let b = other.apply(self.apply(Position::new(0, 0), n), n);
        Transform::ALL
            .into_iter()
            .find(|t| t.apply(Position::new(0, 1), n) == a && t.apply(Position::new(0, 0), n) == b)
            .expect("dihedral group is closed under composition")
    }

    pub fn index(self) -> usize {
        Transform::ALL.iter().position(|&t| t == self).unwrap()
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Transform::Identity => "identity",
            Transform::Rot90 => "rot90",
            Transform::Rot180 => "rot180",
            Transform::Rot270 => "rot270",
            Transform::MirrorColumns => "mirror-columns",
            Transform::MirrorRows => "mirror-rows",
            Transform::Transpose => "transpose",
            Transform::AntiTranspose => "anti-transpose",
        };
        f.write_str(s)
    }
}

/// For each transform, `source[i]` is the cell of the original grid that
/// lands on cell `i` of the transformed grid.
pub(crate) fn source_maps(n: usize) -> [Vec<usize>; 8] {
    Transform::ALL.map(|t| {
        let inv = t.inverse();
        (0..n * n)
            .map(|i| inv.apply(Position::from_index(i, n), n).index(n))
            .collect()
    })
}

/// Transform whose image of `g` is lexicographically least among the eight
/// images, comparing row-major cell digits. Ties go to the first transform
/// in [`Transform::ALL`] order.
pub fn canonical_transform(g: &Grid) -> Transform {
    let maps = g.geometry().source_maps();
    let cells = g.cells();
    let mut best = 0;
    for t in 1..8 {
        let ord = maps[t]
            .iter()
            .zip(&maps[best])
            .map(|(&a, &b)| cells[a].cmp(&cells[b]))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal);
        if ord == Ordering::Less {
            best = t;
        }
    }
    Transform::ALL[best]
}

/// Canonical state string of `g` and the transform that produces it.
pub fn canonical_form(g: &Grid) -> (String, Transform) {
    let t = canonical_transform(g);
    let maps = g.geometry().source_maps();
    let cells = g.cells();
    let s = maps[t.index()].iter().map(|&i| cells[i].digit()).collect();
    (s, t)
}

/// Transforms that leave `g`'s cells unchanged.
pub fn stabilizer(g: &Grid) -> Vec<Transform> {
    let maps = g.geometry().source_maps();
    let cells = g.cells();
    Transform::ALL
        .into_iter()
        .filter(|t| {
            maps[t.index()]
                .iter()
                .enumerate()
                .all(|(i, &src)| cells[i] == cells[src])
        })
        .collect()
}
