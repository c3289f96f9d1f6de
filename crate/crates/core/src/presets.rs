//! Named designs and form sets.

use crate::design::{parse_block_list, parse_symbolic, BlockDesign};
use crate::eval::FormSet;

/// Degree 15 invariant of cubics in five variables, blocks ordered as in
/// its symbolic expression.
pub const OTTAVIANI15: &str = "1,3,2,0,4; 6,0,5,8,7; 9,10,13,11,12; 14,9,10,1,5; \
                               1,3,2,6,11; 12,4,5,8,7; 14,9,13,2,7; 14,10,13,3,8; 6,11,0,12,4";

/// The same invariant with every block sorted.
pub const OTTAVIANI15_ALT: &str = "0,1,2,3,4; 0,5,6,7,8; 9,10,11,12,13; 1,5,9,10,14; \
                                   1,2,3,6,11; 4,5,7,8,12; 2,7,9,13,14; 3,8,10,13,14; 0,4,6,11,12";

/// Degree 4 invariant of ternary cubics.
pub const ARONHOLD: &str = "(abc)(abd)(acd)(bcd)";

/// Degree 6 invariant of ternary quartics.
pub const CLEBSCH542: &str = "(abc)^2(ade)(adf)(bdf)(bef)(cde)(cef)";

/// Degree 10 invariant of quaternary quartics.
pub const DESIGN943: &str = "(abcd)(abgj)(aefg)(afhi)(bdef)(behi)(cdgh)(ceij)(cfhj)(dgij)";

/// The eight linear forms used for the nonvanishing check in five variables.
pub const EIGHT_FORMS: [[i64; 5]; 8] = [
    [1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0],
    [0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0],
    [0, 0, 0, 0, 1],
    [1, 1, 1, 1, 1],
    [1, 2, 3, 2, 1],
    [1, 2, 1, 1, 2],
];

pub const DESIGN_NAMES: [&str; 7] = [
    "ottaviani15",
    "ottaviani15-alt",
    "aronhold",
    "clebsch542",
    "design943",
    "catalecticant:<k>",
    "quadric:<n>",
];

pub const FORM_SET_NAMES: [&str; 1] = ["paper8"];

/// Complete graph on `k + 1` points with every edge doubled: the
/// catalecticant of binary forms of degree `2k`.
pub fn catalecticant(k: usize) -> Option<BlockDesign> {
    if k == 0 {
        return None;
    }
    let mut blocks = Vec::new();
    for i in 0..=k {
        for j in i + 1..=k {
            blocks.push(vec![i, j]);
            blocks.push(vec![i, j]);
        }
    }
    BlockDesign::new(blocks).ok()
}

/// Two copies of the full block on `n + 1` points: the determinant of a
/// quadratic form in `n + 1` variables.
pub fn quadric(n: usize) -> Option<BlockDesign> {
    let block: Vec<usize> = (0..=n).collect();
    BlockDesign::new(vec![block.clone(), block]).ok()
}

/// Looks up a design preset by name.
pub fn design(name: &str) -> Option<BlockDesign> {
    let parsed = match name {
        "ottaviani15" => parse_block_list(OTTAVIANI15),
        "ottaviani15-alt" => parse_block_list(OTTAVIANI15_ALT),
        "aronhold" => parse_symbolic(ARONHOLD),
        "clebsch542" => parse_symbolic(CLEBSCH542),
        "design943" => parse_symbolic(DESIGN943),
        _ => {
            let (family, arg) = name.split_once(':')?;
            let arg: usize = arg.parse().ok()?;
            return match family {
                "catalecticant" => catalecticant(arg),
                "quadric" => quadric(arg),
                _ => None,
            };
        }
    };
    Some(parsed.expect("built-in presets parse"))
}

pub fn forms(name: &str) -> Option<FormSet> {
    match name {
        "paper8" => Some(FormSet::from_i64(&EIGHT_FORMS).expect("preset forms are rectangular")),
        _ => None,
    }
}
