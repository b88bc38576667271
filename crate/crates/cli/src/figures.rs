//! The bundled figure manifests and the suite runner.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::csv::write_csv;
use crate::error::{CliError, Result};
use crate::experiment::{run_experiment, ExperimentResult};
use crate::manifest::ExperimentManifest;
use crate::svg::write_svg;

pub const BUNDLED: [(&str, &str); 14] = [
    ("fig01", include_str!("../manifests/fig01.manifest")),
    ("fig02", include_str!("../manifests/fig02.manifest")),
    ("fig03", include_str!("../manifests/fig03.manifest")),
    ("fig04", include_str!("../manifests/fig04.manifest")),
    ("fig05", include_str!("../manifests/fig05.manifest")),
    ("fig06ab", include_str!("../manifests/fig06ab.manifest")),
    ("fig06cd", include_str!("../manifests/fig06cd.manifest")),
    ("fig07ab", include_str!("../manifests/fig07ab.manifest")),
    ("fig07cd", include_str!("../manifests/fig07cd.manifest")),
    ("fig08", include_str!("../manifests/fig08.manifest")),
    ("fig09", include_str!("../manifests/fig09.manifest")),
    ("fig10", include_str!("../manifests/fig10.manifest")),
    ("fig11ab", include_str!("../manifests/fig11ab.manifest")),
    ("fig11cd", include_str!("../manifests/fig11cd.manifest")),
];

pub fn bundled_manifest(name: &str) -> Result<ExperimentManifest> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| CliError::Read {
            path: PathBuf::from(name),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no bundled manifest"),
        })?;
    ExperimentManifest::parse(text, name)
}

pub fn bundled_manifests() -> Result<Vec<ExperimentManifest>> {
    BUNDLED.iter().map(|(n, _)| bundled_manifest(n)).collect()
}

/// Runs every bundled manifest in parallel, in bundle order. With `out`,
/// each result is written to `<out>/<name>.csv`, `.svg` and `.txt`.
pub fn reproduce_figures(out: Option<&Path>) -> Result<Vec<ExperimentResult>> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_owned(), source })?;
    }
    let manifests = bundled_manifests()?;
    manifests
        .par_iter()
        .map(|m| {
            let r = run_experiment(m, None)?;
            if let Some(dir) = out {
                write_csv(&r, &dir.join(format!("{}.csv", m.name)))?;
                write_svg(&r, &dir.join(format!("{}.svg", m.name)))?;
                let path = dir.join(format!("{}.txt", m.name));
                std::fs::write(&path, r.report()).map_err(|source| CliError::Write { path, source })?;
            }
            Ok(r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_manifest_parses() {
        let ms = bundled_manifests().unwrap();
        assert_eq!(ms.len(), BUNDLED.len());
        for (m, (n, _)) in ms.iter().zip(BUNDLED) {
            assert_eq!(m.name, n);
            assert!(m.scenario.is_binary());
        }
    }
}
