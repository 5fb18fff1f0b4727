//! Human-readable snapshots of an observation table.
//!
//! Each cell `(row, col)` shows the reset choices under which the two rows
//! cannot be told apart, as a disjunction of last-reset conditions over the
//! variables `b{row id}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{ObservationTable, Part, RowId};
use crate::teacher::Answer;

type Cube = BTreeMap<RowId, bool>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CellExpr {
    True,
    False,
    /// Disjunction of conjunctions of `(variable, polarity)` literals.
    Dnf(Vec<Vec<(RowId, bool)>>),
}

impl CellExpr {
    fn from_cubes(mut cubes: Vec<Cube>) -> CellExpr {
        loop {
            cubes.sort();
            cubes.dedup();
            if cubes.iter().any(|c| c.is_empty()) {
                return CellExpr::True;
            }
            let before = cubes.len();
            let absorbed: Vec<bool> = (0..cubes.len())
                .map(|i| {
                    (0..cubes.len()).any(|j| {
                        j != i
                            && cubes[j].len() < cubes[i].len()
                            && cubes[j].iter().all(|(v, p)| cubes[i].get(v) == Some(p))
                    })
                })
                .collect();
            let mut kept: Vec<Cube> =
                cubes.into_iter().zip(absorbed).filter(|(_, a)| !a).map(|(c, _)| c).collect();
            let mut merged = false;
            'outer: for i in 0..kept.len() {
                for j in i + 1..kept.len() {
                    if let Some(v) = single_flip(&kept[i], &kept[j]) {
                        let mut c = kept[i].clone();
                        c.remove(&v);
                        kept.swap_remove(j);
                        kept[i] = c;
                        merged = true;
                        break 'outer;
                    }
                }
            }
            if kept.is_empty() {
                return CellExpr::False;
            }
            if !merged && kept.len() == before {
                return CellExpr::Dnf(kept.into_iter().map(|c| c.into_iter().collect()).collect());
            }
            cubes = kept;
        }
    }
}

/// The variable on which two cubes over the same variables disagree, if exactly one.
fn single_flip(a: &Cube, b: &Cube) -> Option<RowId> {
    if a.len() != b.len() {
        return None;
    }
    let mut diff = None;
    for ((va, pa), (vb, pb)) in a.iter().zip(b) {
        if va != vb {
            return None;
        }
        if pa != pb {
            if diff.is_some() {
                return None;
            }
            diff = Some(*va);
        }
    }
    diff
}

impl fmt::Display for CellExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellExpr::True => write!(f, "⊤"),
            CellExpr::False => write!(f, "⊥"),
            CellExpr::Dnf(cubes) => {
                let wrap = cubes.len() > 1;
                for (k, cube) in cubes.iter().enumerate() {
                    if k > 0 {
                        write!(f, " ∨ ")?;
                    }
                    let paren = wrap && cube.len() > 1;
                    if paren {
                        write!(f, "(")?;
                    }
                    for (m, (v, pol)) in cube.iter().enumerate() {
                        if m > 0 {
                            write!(f, " ∧ ")?;
                        }
                        write!(f, "{}b{v}", if *pol { "" } else { "¬" })?;
                    }
                    if paren {
                        write!(f, ")")?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Adds the literals of `lr(row, i)` to `cube`, leaving out the pinned `b_ε`.
/// Returns false if they contradict literals already present.
fn lr_cube(table: &ObservationTable, row: RowId, i: usize, cube: &mut Cube) -> bool {
    let p = &table.row(row).prefixes;
    let mut put = |v: RowId, pol: bool| match cube.insert(v, pol) {
        Some(old) => old == pol,
        None => true,
    };
    if i > 0 && !put(p[i], true) {
        return false;
    }
    (i + 1..p.len()).all(|k| put(p[k], false))
}

impl ObservationTable {
    /// Reset choices under which `a` and `b` agree on every suffix.
    pub fn cell(&self, a: RowId, b: RowId) -> CellExpr {
        let mut cubes = Vec::new();
        for (i, j) in self.combinations(a, b) {
            if !self.f(a, b, i, j) {
                continue;
            }
            let mut cube = Cube::new();
            if lr_cube(self, a, i, &mut cube) && lr_cube(self, b, j, &mut cube) {
                cubes.push(cube);
            }
        }
        CellExpr::from_cubes(cubes)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DumpRow {
    pub id: RowId,
    pub word: String,
    pub part: Part,
    pub answer: String,
}

/// Snapshot for JSON output and the text grid; rows listed as `S`, `S+`, then `R`.
#[derive(Clone, Debug, Serialize)]
pub struct TableDump {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "E")]
    pub suffixes: Vec<String>,
    pub rows: Vec<DumpRow>,
    /// `cells[x][y]` relates `rows[x]` and `rows[y]`.
    pub cells: Vec<Vec<String>>,
}

impl TableDump {
    pub fn of(table: &ObservationTable) -> TableDump {
        let alphabet = table.alphabet();
        let mut order: Vec<RowId> = table.s().to_vec();
        order.extend_from_slice(table.s_plus());
        order.extend(table.r());
        let answer = |a: &Answer| match a {
            Answer::Accept(true) => "+".to_string(),
            Answer::Accept(false) => "-".to_string(),
            Answer::Outputs(o) => {
                o.iter().map(|&x| table.outputs()[x as usize].as_str()).collect::<Vec<_>>().join(" ")
            }
        };
        let rows = order
            .iter()
            .map(|&id| {
                let r = table.row(id);
                DumpRow { id, word: r.word.display(alphabet).to_string(), part: r.part, answer: answer(&r.answer) }
            })
            .collect();
        let cells = order
            .iter()
            .map(|&a| order.iter().map(|&b| table.cell(a, b).to_string()).collect())
            .collect();
        TableDump {
            n: table.n(),
            suffixes: table.suffixes().iter().map(|e| e.display(alphabet).to_string()).collect(),
            rows,
            cells,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dump serializes")
    }
}

impl fmt::Display for TableDump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = |r: &DumpRow| format!("{:<2} {} b{} {}", part_name(r.part), r.word, r.id, r.answer);
        let labels: Vec<String> = self.rows.iter().map(label).collect();
        let lw = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
        let widths: Vec<usize> = (0..self.rows.len())
            .map(|y| {
                let head = self.rows[y].word.chars().count();
                self.cells.iter().map(|row| row[y].chars().count()).max().unwrap_or(0).max(head)
            })
            .collect();
        let pad = |s: &str, w: usize| format!("{s}{}", " ".repeat(w.saturating_sub(s.chars().count())));
        write!(f, "{} ", pad(&format!("N={}", self.n), lw))?;
        for (y, r) in self.rows.iter().enumerate() {
            write!(f, "| {} ", pad(&r.word, widths[y]))?;
        }
        writeln!(f)?;
        for (x, l) in labels.iter().enumerate() {
            write!(f, "{} ", pad(l, lw))?;
            for (y, w) in widths.iter().enumerate() {
                write!(f, "| {} ", pad(&self.cells[x][y], *w))?;
            }
            writeln!(f)?;
        }
        writeln!(f, "E = {{{}}}", self.suffixes.join(", "))
    }
}

fn part_name(p: Part) -> &'static str {
    match p {
        Part::S => "S",
        Part::SPlus => "S+",
        Part::R => "R",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(lits: &[(RowId, bool)]) -> Cube {
        lits.iter().copied().collect()
    }

    #[test]
    fn merges_complementary_cubes() {
        let e = CellExpr::from_cubes(vec![cube(&[(3, false), (5, false)]), cube(&[(3, true), (5, false)])]);
        assert_eq!(e.to_string(), "¬b5");
        let e = CellExpr::from_cubes(vec![cube(&[(3, false)]), cube(&[(3, true)])]);
        assert_eq!(e, CellExpr::True);
        assert_eq!(CellExpr::from_cubes(vec![]), CellExpr::False);
    }

    #[test]
    fn absorbs_longer_cubes() {
        let e = CellExpr::from_cubes(vec![cube(&[(3, true)]), cube(&[(3, true), (7, false)]), cube(&[(7, true), (2, true)])]);
        assert_eq!(e.to_string(), "(b2 ∧ b7) ∨ b3");
    }
}
