use super::patch::Patch;
use super::spec::{SubshiftSpec, Symbol};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const PATCH_FORMAT_VERSION: u32 = 1;

/// On-disk patch: (element, symbol) pairs plus the digest of the spec it was checked against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchFile {
    pub format_version: u32,
    pub kind: String,
    pub group: String,
    pub spec_hash: String,
    pub domain: Vec<String>,
    pub cells: Vec<(String, String)>,
}

impl PatchFile {
    pub fn from_patch<A: Symbol>(spec: &SubshiftSpec<A>, patch: &Patch<A>) -> Self {
        PatchFile {
            format_version: PATCH_FORMAT_VERSION,
            kind: "patch".into(),
            group: spec.group.to_string(),
            spec_hash: spec.descriptor_hash(),
            domain: patch.domain().iter().map(|g| g.to_string()).collect(),
            cells: patch.cells().iter().map(|(g, a)| (g.to_string(), a.to_string())).collect(),
        }
    }

    /// Rebuilds the patch, refusing files written against a different spec.
    pub fn to_patch<A: Symbol>(
        &self,
        spec: &SubshiftSpec<A>,
        parse_symbol: impl Fn(&str) -> Option<A>,
    ) -> Result<Patch<A>> {
        if self.format_version != PATCH_FORMAT_VERSION || self.kind != "patch" {
            return Err(Error::parse(&self.kind, "not a version-1 patch file"));
        }
        if self.spec_hash != spec.descriptor_hash() {
            return Err(Error::InvalidInput("patch file was written for a different subshift".into()));
        }
        let g = &spec.group;
        let domain = self.domain.iter().map(|s| g.parse_element(s)).collect::<Result<Vec<_>>>()?;
        let cells = self
            .cells
            .iter()
            .map(|(e, a)| {
                let sym = parse_symbol(a).ok_or_else(|| Error::parse(a, "unknown symbol"))?;
                Ok((g.parse_element(e)?, sym))
            })
            .collect::<Result<Vec<_>>>()?;
        Patch::new(domain, cells)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::parse("patch file", e.to_string()))
    }
}
