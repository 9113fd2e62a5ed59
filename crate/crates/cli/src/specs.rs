use anyhow::{bail, Result};
use flowcert::group::GroupSpec;
use flowcert::subshift::{golden_mean, hard_core, SubshiftSpec};

/// Built-in subshifts over the alphabet {0, …, k − 1}: `golden-mean` (ℤ only), `hard-core`, `full:k`.
pub fn named_spec(name: &str, group: &GroupSpec) -> Result<SubshiftSpec<u8>> {
    match name {
        "golden-mean" => {
            if *group != GroupSpec::free_abelian(1) {
                bail!("golden-mean is defined on Z only, got {group}");
            }
            Ok(golden_mean())
        }
        "hard-core" => Ok(hard_core(group.clone())),
        _ => match name.strip_prefix("full:").map(str::parse::<u8>) {
            Some(Ok(k)) if k >= 1 => Ok(SubshiftSpec::full(group.clone(), (0..k).collect())?),
            _ => bail!("unknown subshift `{name}` (expected golden-mean, hard-core or full:K)"),
        },
    }
}

pub fn parse_symbol(spec: &SubshiftSpec<u8>, s: &str) -> Option<u8> {
    s.parse().ok().filter(|v| spec.alphabet.contains(v))
}
