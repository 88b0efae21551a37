//! Machine-readable schema of the ten cases: which inputs each consumes,
//! which coefficient it solves for, and every denominator guard it
//! enforces. The CLI validates flags against this table, and the same
//! data ships as `docs/case_manifest.json`.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchUse {
    NotUsed,
    Selectable,
    /// The printed closed form fixes the minus branch.
    FixedMinus,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseSchema {
    pub case: u8,
    /// Which coefficient the condition is solved for.
    pub solved_for: &'static str,
    /// The two free coefficients the caller supplies.
    pub free_coefficients: [&'static str; 2],
    /// Name of the generating function slot.
    pub generator: &'static str,
    /// Name of the input constant, if the case takes one.
    pub constant: Option<&'static str>,
    pub branch: BranchUse,
    /// Name of the integration constant of the general solution.
    pub family_constant: &'static str,
    /// Human-readable guard list enforced before construction.
    pub guards: &'static [&'static str],
}

static MANIFEST: [CaseSchema; 10] = [
    CaseSchema {
        case: 1,
        solved_for: "a",
        free_coefficients: ["b", "c"],
        generator: "f1",
        constant: Some("C1"),
        branch: BranchUse::NotUsed,
        family_constant: "C0",
        guards: &["c nonvanishing"],
    },
    CaseSchema {
        case: 2,
        solved_for: "a",
        free_coefficients: ["b", "c"],
        generator: "f2",
        constant: None,
        branch: BranchUse::Selectable,
        family_constant: "C2",
        guards: &["c nonvanishing", "radicand f2 + b^2 >= 0"],
    },
    CaseSchema {
        case: 3,
        solved_for: "b",
        free_coefficients: ["a", "c"],
        generator: "f2",
        constant: Some("C3"),
        branch: BranchUse::FixedMinus,
        family_constant: "C4",
        guards: &[
            "c nonvanishing",
            "bracket int[a + f2/(4c)] - C3 nonvanishing",
            "printed branch: b + 2c*G <= 0",
        ],
    },
    CaseSchema {
        case: 4,
        solved_for: "c",
        free_coefficients: ["a", "b"],
        generator: "f2",
        constant: Some("C5"),
        branch: BranchUse::Selectable,
        family_constant: "C6",
        guards: &[
            "radicand f2 + b^2 >= 0",
            "-b + sign*sqrt(f2 + b^2) nonvanishing",
            "denominator C5 + int[a*P] nonvanishing",
        ],
    },
    CaseSchema {
        case: 5,
        solved_for: "a",
        free_coefficients: ["b", "c"],
        generator: "f3",
        constant: Some("C7"),
        branch: BranchUse::NotUsed,
        family_constant: "C8",
        guards: &["c nonvanishing", "printed branch: b + c*H >= 0"],
    },
    CaseSchema {
        case: 6,
        solved_for: "b",
        free_coefficients: ["a", "c"],
        generator: "f3",
        constant: Some("C7"),
        branch: BranchUse::NotUsed,
        family_constant: "C9",
        guards: &[
            "c nonvanishing",
            "bracket int[f3/(2c)] - C7 nonvanishing",
            "printed branch: b + c*H <= 0",
        ],
    },
    CaseSchema {
        case: 7,
        solved_for: "a",
        free_coefficients: ["b", "c"],
        generator: "f4",
        constant: None,
        branch: BranchUse::NotUsed,
        family_constant: "C10",
        guards: &["c nonvanishing"],
    },
    CaseSchema {
        case: 8,
        solved_for: "b",
        free_coefficients: ["a", "c"],
        generator: "f4",
        constant: None,
        branch: BranchUse::NotUsed,
        family_constant: "C11",
        guards: &["c nonvanishing", "f4 nonvanishing"],
    },
    CaseSchema {
        case: 9,
        solved_for: "c",
        free_coefficients: ["a", "b"],
        generator: "f4",
        constant: Some("C12"),
        branch: BranchUse::NotUsed,
        family_constant: "C13",
        guards: &["denominator C12 + 2*int[a*P] nonvanishing"],
    },
    CaseSchema {
        case: 10,
        solved_for: "a",
        free_coefficients: ["b", "c"],
        generator: "f5",
        constant: None,
        branch: BranchUse::Selectable,
        family_constant: "C14",
        guards: &["c nonvanishing"],
    },
];

/// The full ten-case schema table.
pub fn manifest() -> &'static [CaseSchema; 10] {
    &MANIFEST
}

/// The schema table as pretty-printed JSON (the shipped
/// `docs/case_manifest.json` is exactly this string).
pub fn manifest_json() -> String {
    let mut s = serde_json::to_string_pretty(&MANIFEST).expect("static table serializes");
    s.push('\n');
    s
}
