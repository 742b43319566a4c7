//! CSV, TOML and plot-script outputs of a run.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::run::{CaseResult, Profile};
use crate::error::{Error, Result};

pub const SOLUTION_FILE: &str = "solution.csv";
pub const REFERENCE_FILE: &str = "reference.csv";
pub const AUDIT_FILE: &str = "audit.csv";
pub const CONFIG_FILE: &str = "config.toml";
pub const PLOT_FILE: &str = "plot.py";

pub const AUDIT_HEADER: &str = "step,time,dt,element_defect,energy_defect,switched_energy_defect,\
switched_elements,clipped,mass_drift,energy_drift";

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// `x,rho,u,p,e` plus `alpha1,Y1` for mixtures, full precision.
pub fn profile_csv(profile: &Profile) -> String {
    let mut out = String::from("x,rho,u,p,e");
    let phases = profile.alpha1.as_ref().zip(profile.y1.as_ref());
    if phases.is_some() {
        out.push_str(",alpha1,Y1");
    }
    out.push('\n');
    for i in 0..profile.len() {
        let _ = write!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            profile.x[i], profile.rho[i], profile.u[i], profile.p[i], profile.e[i]
        );
        if let Some((a, y)) = phases {
            let _ = write!(out, ",{:.16e},{:.16e}", a[i], y[i]);
        }
        out.push('\n');
    }
    out
}

pub fn audit_csv(result: &CaseResult) -> String {
    let mut out = format!("{AUDIT_HEADER}\n");
    for r in &result.audit {
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.6e},{:.6e},{:.6e},{},{},{:.6e},{:.6e}",
            r.step,
            r.time,
            r.dt,
            r.element_defect,
            r.energy_defect,
            r.switched_energy_defect,
            r.switched_elements,
            r.clipped,
            r.mass_drift,
            r.energy_drift
        );
    }
    out
}

fn plot_script(result: &CaseResult) -> String {
    let title = format!(
        "{} ({}, N = {}, t = {:e} s)",
        result.config.case, result.config.formulation, result.config.n_cells, result.time
    );
    let reference = if result.reference.is_some() {
        format!("\"{REFERENCE_FILE}\"")
    } else {
        "None".to_string()
    };
    format!(
        r#"import csv
import os
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def load(name):
    with open(os.path.join(HERE, name)) as f:
        rows = list(csv.DictReader(f))
    return {{k: [float(r[k]) for r in rows] for k in rows[0]}}


num = load("{SOLUTION_FILE}")
ref = load({reference}) if {reference} else None
fields = [k for k in ("rho", "u", "p", "e", "alpha1") if k in num]
fig, axes = plt.subplots(len(fields), 1, sharex=True, figsize=(7, 2.2 * len(fields)))
for ax, k in zip(axes, fields):
    if ref is not None and k in ref:
        ax.plot(ref["x"], ref[k], "k-", lw=1, label="exact")
    ax.plot(num["x"], num[k], "r.", ms=2, label="numerical")
    ax.set_ylabel(k)
axes[0].legend()
axes[0].set_title("{title}")
axes[-1].set_xlabel("x [m]")
fig.tight_layout()
fig.savefig(os.path.join(HERE, "{case}.png"), dpi=150)
"#,
        case = result.config.case
    )
}

/// Writes solution, reference, audit, config and plot script into `dir`.
pub fn write_outputs(result: &CaseResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    write(&dir.join(SOLUTION_FILE), &profile_csv(&result.solution))?;
    if let Some(r) = &result.reference {
        write(&dir.join(REFERENCE_FILE), &profile_csv(r))?;
    }
    write(&dir.join(AUDIT_FILE), &audit_csv(result))?;
    let mut cfg = result.config.clone();
    cfg.output = None;
    cfg.save(&dir.join(CONFIG_FILE))?;
    write(&dir.join(PLOT_FILE), &plot_script(result))
}
