//! Writes the sample blade distributions and configurations under `data/`.

use std::path::Path;

use quasiblade::harmonic::C64;
use quasiblade::oracle::{cylinder_distribution, JoukowskiOracle};
use quasiblade::planar::modified_distribution;
use quasiblade::{Result, VelocityDistribution};
use serde_json::json;

fn save(d: &VelocityDistribution, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&d.to_json_value())?;
    std::fs::write(path, text + "\n").map_err(|e| quasiblade::Error::Io {
        path: path.into(),
        source: e,
    })
}

fn main() -> Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let blades = root.join("blades");
    std::fs::create_dir_all(&blades).expect("create data directory");

    let cyl = cylinder_distribution(256, 1.0)?;
    save(&cyl, &blades.join("cylinder.json"))?;
    let jk = JoukowskiOracle::new(C64::new(-0.08, 0.06), 1.3, 1.0)
        .with_flow(1.0, 0.05, 0.6)
        .distribution(512)?;
    save(&jk, &blades.join("joukowski.json"))?;

    // Upper blades whose modified problems coincide with the lower one, so
    // that every difference series is residue-free. A nonzero w2 in the
    // first section leaves a residual of |w2| in the second.
    let (w1, w2) = (0.05, 0.0);
    save(
        &modified_distribution(&cyl, -2.0 * w2)?,
        &blades.join("cylinder_upper1.json"),
    )?;
    save(
        &modified_distribution(&cyl, 2.0 * w1 + w2)?,
        &blades.join("cylinder_upper2.json"),
    )?;

    let linear = json!({
        "sections": [
            {"id": "cylinder", "lower": "blades/cylinder.json", "upper": "blades/cylinder.json", "w1": 0.01, "degree": 1},
            {"id": "airfoil", "lower": "blades/joukowski.json", "upper": "blades/joukowski.json",
             "w1": {"from_transversal": {"w_ref": 0.05, "h_ref": 0.5}}, "degree": 1}
        ],
        "discretization": {"n_boundary": 256},
        "positioning": {"method": "area", "spacing": 1.0},
        "output": {"directory": "out/linear", "formats": ["csv", "json", "svg"]}
    });
    let chain = json!({
        "sections": [
            {"id": "root", "lower": "blades/cylinder.json", "upper": "blades/cylinder_upper1.json", "w1": w1, "degree": 2, "w2": w2},
            {"id": "tip", "upper": "blades/cylinder_upper2.json", "w1": 0.0, "degree": 2}
        ],
        "discretization": {"n_boundary": 256},
        "positioning": {"method": "lsq"},
        "output": {"directory": "out/chain", "formats": ["csv", "json", "svg"]}
    });
    for (name, cfg) in [("linear.json", linear), ("chain.json", chain)] {
        std::fs::write(root.join(name), serde_json::to_string_pretty(&cfg)? + "\n")
            .expect("write config");
    }
    Ok(())
}
