use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::args::Global;
use crate::Failure;

/// Sidecar record written next to every output file.
#[derive(Serialize)]
pub struct Meta {
    pub command: String,
    pub triple: Option<String>,
    pub params: Value,
    pub tolerances: Tolerances,
    pub counts: Value,
}

#[derive(Serialize)]
pub struct Tolerances {
    pub tau_curve: f64,
    pub tau_seed: f64,
    pub eps_deriv: f64,
    pub tau_pole: f64,
    pub tau_root: f64,
    pub n_grid: usize,
    pub constants_version: u32,
}

impl Tolerances {
    pub fn from_global(g: &Global) -> Self {
        Self {
            tau_curve: g.tau_curve,
            tau_seed: g.tau_seed,
            eps_deriv: g.eps_deriv,
            tau_pole: g.tau_pole,
            tau_root: rootcorr::rootfind::TAU_ROOT,
            n_grid: g.n_grid,
            constants_version: 1,
        }
    }
}

/// Writes `body` to `--out` (plus `<stem>.meta.json`) or to stdout.
pub fn emit(global: &Global, body: &str, meta: &Meta) -> Result<(), Failure> {
    match &global.out {
        Some(path) => {
            fs::write(path, body)?;
            let json = serde_json::to_string(meta).expect("meta serializes");
            fs::write(sidecar_path(path), json + "\n")?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            // a closed pipe (`| head`) is not an error
            match lock.write_all(body.as_bytes()).and_then(|_| lock.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    path.with_extension("meta.json")
}
