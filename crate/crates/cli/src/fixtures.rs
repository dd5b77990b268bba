//! Worked examples bundled with the binary.

use std::io;
use std::path::{Path, PathBuf};

/// File name and contents of each bundled document.
pub const FIXTURES: [(&str, &str); 9] = [
    ("lebesgue-conditional.json", include_str!("../fixtures/lebesgue-conditional.json")),
    ("medical-bayes.json", include_str!("../fixtures/medical-bayes.json")),
    ("medical-completeness.json", include_str!("../fixtures/medical-completeness.json")),
    ("medical-logic-b1.json", include_str!("../fixtures/medical-logic-b1.json")),
    ("parametric-credal.json", include_str!("../fixtures/parametric-credal.json")),
    ("beta-credal.json", include_str!("../fixtures/beta-credal.json")),
    ("ci-combination.json", include_str!("../fixtures/ci-combination.json")),
    ("ifs-cantor.json", include_str!("../fixtures/ifs-cantor.json")),
    ("markov-two-state.json", include_str!("../fixtures/markov-two-state.json")),
];

/// Writes every fixture into `dir`, creating it if needed.
pub fn write_all(dir: &Path) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    FIXTURES
        .iter()
        .map(|(name, text)| {
            let path = dir.join(name);
            std::fs::write(&path, text)?;
            Ok(path)
        })
        .collect()
}
