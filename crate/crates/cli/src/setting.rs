use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::Args;
use geneo::group::{GroupSpec, HomomorphismSpec};
use geneo::torus::{build_geneo, PrimeTorus, UnitVector};
use geneo::{Homomorphism, Matrix, PermutationGroup};

/// Where the groups and the homomorphism come from.
#[derive(Args, Debug, Clone)]
pub struct SettingArgs {
    /// Built-in setting: sym3, cyclic:N, symmetric:N, trivial:N (all with T = id),
    /// grid:R,C (Sym(R) x Sym(C) on grid cells projected onto rows), torus:P,W1,W2.
    #[arg(long, conflicts_with_all = ["group_x", "group_y", "hom"])]
    pub preset: Option<String>,
    /// JSON group acting on X: {"carrier_size": n, "generators": [[...], ...]}.
    #[arg(long)]
    pub group_x: Option<PathBuf>,
    /// JSON group acting on Y; defaults to the group on X.
    #[arg(long, requires = "group_x")]
    pub group_y: Option<PathBuf>,
    /// JSON homomorphism {"gen_images": [[...], ...]}; defaults to the identity.
    #[arg(long, requires = "group_x")]
    pub hom: Option<PathBuf>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Matrix::from_csv(&text).with_context(|| format!("parsing {}", path.display()))
}

fn numbers(spec: &str, count: usize) -> Result<Vec<usize>> {
    let values = spec
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .with_context(|| format!("bad preset parameters '{spec}'"))?;
    if values.len() != count {
        bail!("preset parameters '{spec}' need {count} values");
    }
    Ok(values)
}

pub fn preset(name: &str) -> Result<Homomorphism> {
    let (kind, params) = name.split_once(':').unwrap_or((name, ""));
    let identity = |g: PermutationGroup| Ok(Homomorphism::identity(Arc::new(g))?);
    match kind {
        "sym3" => identity(PermutationGroup::symmetric(3)?),
        "cyclic" => identity(PermutationGroup::cyclic(numbers(params, 1)?[0])?),
        "symmetric" => identity(PermutationGroup::symmetric(numbers(params, 1)?[0])?),
        "trivial" => identity(PermutationGroup::trivial(numbers(params, 1)?[0])?),
        "grid" => {
            let rc = numbers(params, 2)?;
            let rows = PermutationGroup::symmetric(rc[0])?;
            let cols = PermutationGroup::symmetric(rc[1])?;
            Ok(Homomorphism::grid_row_projection(&rows, &cols)?)
        }
        "torus" => {
            let v = numbers(params, 3)?;
            let p = v[0] as u32;
            let w = UnitVector::new(PrimeTorus::new(p)?, v[1] as u32, v[2] as u32)?;
            Ok(build_geneo(p, w)?.homomorphism()?)
        }
        _ => bail!("unknown preset '{name}'"),
    }
}

impl SettingArgs {
    pub fn load(&self) -> Result<Arc<Homomorphism>> {
        if let Some(name) = &self.preset {
            return Ok(Arc::new(preset(name)?));
        }
        let Some(x_path) = &self.group_x else {
            bail!("a setting is required: pass --preset or --group-x");
        };
        let gx = Arc::new(read_json::<GroupSpec>(x_path)?.build()?);
        let gy = match &self.group_y {
            Some(path) => Arc::new(read_json::<GroupSpec>(path)?.build()?),
            None => gx.clone(),
        };
        let hom = match &self.hom {
            Some(path) => Homomorphism::from_spec(gx, gy, &read_json::<HomomorphismSpec>(path)?)?,
            None if self.group_y.is_none() => Homomorphism::identity(gx)?,
            None => bail!("--hom is required when --group-y is given"),
        };
        Ok(Arc::new(hom))
    }
}
