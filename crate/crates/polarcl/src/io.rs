//! File formats: space.json, set files and spread lists.

use crate::bitset::BitSet;
use crate::enumeration::{GeneratorClass, PolarSpaceInstance};
use crate::error::{Error, Result};
use crate::geometry::{PolarSpaceDescriptor, Subspace};
use serde::{Deserialize, Serialize};

/// Descriptor plus the canonical point and generator lists.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceFile {
    pub symbol: String,
    pub family: String,
    pub rank: usize,
    pub q: u64,
    pub ambient_dim: usize,
    pub e: String,
    pub num_points: usize,
    pub num_generators: usize,
    pub points: Vec<String>,
    pub generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_labels: Option<Vec<GeneratorClass>>,
}

impl SpaceFile {
    pub fn from_instance(inst: &PolarSpaceInstance) -> Self {
        let d = inst.descriptor();
        SpaceFile {
            symbol: d.to_string(),
            family: d.family().symbol().to_string(),
            rank: d.rank(),
            q: d.q(),
            ambient_dim: d.ambient_dim(),
            e: d.e_string(),
            num_points: inst.num_points(),
            num_generators: inst.num_generators(),
            points: inst.points().iter().map(Subspace::serialize).collect(),
            generators: inst.generators().iter().map(Subspace::serialize).collect(),
            class_labels: inst.class_labels().map(|l| l.to_vec()),
        }
    }

    pub fn descriptor(&self) -> Result<PolarSpaceDescriptor> {
        PolarSpaceDescriptor::parse_symbol(&self.symbol)
    }

    /// Re-enumerates the space and checks that the stored lists are the
    /// canonical ones, so indices in other files keep their meaning.
    pub fn instantiate(&self) -> Result<PolarSpaceInstance> {
        let inst = PolarSpaceInstance::enumerate(&self.descriptor()?)?;
        let fresh = SpaceFile::from_instance(&inst);
        let lists_match = (self.points.is_empty() || self.points == fresh.points)
            && (self.generators.is_empty() || self.generators == fresh.generators);
        if !lists_match {
            return Err(Error::InvalidInput(format!(
                "space file lists differ from the canonical enumeration of {}",
                self.symbol
            )));
        }
        Ok(inst)
    }
}

/// A generator set read from a set file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFile {
    pub members: Vec<usize>,
    pub class: Option<GeneratorClass>,
}

/// Parses a set file: `idx:` lines with generator indices (separated by
/// spaces or commas), lines holding a subspace serialization, an optional
/// `class: latin|greek` line, `#` comments and blank lines.
pub fn parse_set_file(text: &str, inst: &PolarSpaceInstance) -> Result<SetFile> {
    let n = inst.num_generators();
    let f = inst.descriptor().field();
    let cols = inst.descriptor().vector_len();
    let mut members = Vec::new();
    let mut class = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| Error::InvalidInput(format!("line {}: {what}", lineno + 1));
        if let Some(rest) = line.strip_prefix("idx:") {
            for tok in rest.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
                let g: usize = tok.parse().map_err(|_| bad(&format!("bad index '{tok}'")))?;
                if g >= n {
                    return Err(bad(&format!("index {g} out of range (0..{n})")));
                }
                members.push(g);
            }
        } else if let Some(rest) = line.strip_prefix("class:") {
            class = Some(match rest.trim() {
                "latin" => GeneratorClass::Latin,
                "greek" => GeneratorClass::Greek,
                other => return Err(bad(&format!("unknown class '{other}'"))),
            });
        } else {
            let s = Subspace::parse(f, line, cols)?;
            let g = inst
                .generator_index(&s)
                .ok_or_else(|| bad("subspace is not a generator of the space"))?;
            members.push(g);
        }
    }
    members.sort_unstable();
    members.dedup();
    Ok(SetFile { members, class })
}

pub fn write_set_file(members: &BitSet, class: Option<GeneratorClass>) -> String {
    let mut out = String::new();
    if let Some(c) = class {
        out.push_str(match c {
            GeneratorClass::Latin => "class: latin\n",
            GeneratorClass::Greek => "class: greek\n",
        });
    }
    let idx: Vec<String> = members.iter().map(|g| g.to_string()).collect();
    out.push_str("idx: ");
    out.push_str(&idx.join(" "));
    out.push('\n');
    out
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SpreadsJson {
    Plain(Vec<Vec<usize>>),
    Spreads { spreads: Vec<Vec<usize>> },
    Results { solutions: Vec<Vec<usize>> },
    Runs { runs: Vec<RunSolutions> },
    Wrapped { result: Box<SpreadsJson> },
}

#[derive(Deserialize)]
struct RunSolutions {
    solutions: Vec<Vec<usize>>,
}

impl SpreadsJson {
    fn into_lists(self) -> Vec<Vec<usize>> {
        match self {
            SpreadsJson::Plain(v) | SpreadsJson::Spreads { spreads: v } | SpreadsJson::Results { solutions: v } => v,
            SpreadsJson::Runs { runs } => runs.into_iter().flat_map(|r| r.solutions).collect(),
            SpreadsJson::Wrapped { result } => result.into_lists(),
        }
    }
}

/// Reads a spread list: a bare array of index arrays, `{"spreads": …}`, or
/// the output of `polarcl search spread`.
pub fn parse_spreads(text: &str, n: usize) -> Result<Vec<BitSet>> {
    let parsed: SpreadsJson =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("spreads file: {e}")))?;
    parsed
        .into_lists()
        .into_iter()
        .map(|s| {
            if let Some(&g) = s.iter().find(|&&g| g >= n) {
                return Err(Error::InvalidInput(format!("spread index {g} out of range (0..{n})")));
            }
            Ok(BitSet::from_indices(n, s))
        })
        .collect()
}

#[derive(Serialize)]
struct SpreadsOut<'a> {
    spreads: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    space: Option<&'a str>,
}

pub fn write_spreads(spreads: &[BitSet], space: Option<&str>) -> String {
    serde_json::to_string_pretty(&SpreadsOut {
        spreads: spreads.iter().map(|s| s.to_vec()).collect(),
        space,
    })
    .expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(s: &str) -> PolarSpaceInstance {
        PolarSpaceInstance::enumerate(&PolarSpaceDescriptor::parse_symbol(s).unwrap()).unwrap()
    }

    #[test]
    fn space_file_roundtrip() {
        let i = inst("Q+(5,2)");
        let f = SpaceFile::from_instance(&i);
        assert_eq!(f.num_generators, 30);
        assert!(f.class_labels.is_some());
        let text = serde_json::to_string(&f).unwrap();
        let back: SpaceFile = serde_json::from_str(&text).unwrap();
        let j = back.instantiate().unwrap();
        assert_eq!(j.num_generators(), 30);
        let mut tampered = back.clone();
        tampered.generators.swap(0, 1);
        assert!(tampered.instantiate().is_err());
    }

    #[test]
    fn set_files() {
        let i = inst("W(3,2)");
        let g7 = i.generators()[7].serialize();
        let text = format!("# pencil\nidx: 3, 1 2\n{g7}\n\n");
        let s = parse_set_file(&text, &i).unwrap();
        assert_eq!(s.members, vec![1, 2, 3, 7]);
        assert!(parse_set_file("idx: 15", &i).is_err());
        let out = write_set_file(&BitSet::from_indices(15, [4, 9]), Some(GeneratorClass::Greek));
        let back = parse_set_file(&out, &i).unwrap();
        assert_eq!(back.members, vec![4, 9]);
        assert_eq!(back.class, Some(GeneratorClass::Greek));
    }

    #[test]
    fn spread_lists() {
        let a = parse_spreads("[[0,1],[2]]", 5).unwrap();
        assert_eq!(a.len(), 2);
        let b = parse_spreads(r#"{"spreads": [[4]]}"#, 5).unwrap();
        assert_eq!(b[0].to_vec(), vec![4]);
        let c = parse_spreads(r#"{"result": {"solutions": [[1,2]], "complete": true}}"#, 5).unwrap();
        assert_eq!(c[0].to_vec(), vec![1, 2]);
        let d = parse_spreads(r#"{"manifest": {}, "runs": [{"solutions": [[0]]}, {"solutions": [[3]]}]}"#, 5).unwrap();
        assert_eq!(d.len(), 2);
        assert!(parse_spreads("[[7]]", 5).is_err());
        let text = write_spreads(&a, Some("W(3,2)"));
        assert_eq!(parse_spreads(&text, 5).unwrap(), a);
    }
}
