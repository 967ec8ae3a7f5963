use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use geneo::action::function_count;
use geneo::idx;
use geneo::polytope::{check_redundancy_identity, orbit_basis};
use geneo::repr::{
    is_geneo, matrix_of_measure, operator_norm_inf, represent, split_by_target_orbits, GeoProblem,
    MATRIX_TOL,
};
use geneo::stochastic::{decompose_stochastic, reconstruct};
use geneo::torus::{pad_mnist, salt_pepper, toroidal_translate, FeatureStack, TorusImage};
use geneo::{GeneoError, Homomorphism, Mapping, Matrix, SignedMeasure, TwistedAction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// Outcome of a command that ran to completion.
#[derive(Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A verification did not hold.
    Failed,
}

/// Shared flags.
pub struct Common {
    pub tol: f64,
    pub guard: u128,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn measure_json(mu: &SignedMeasure) -> Value {
    serde_json::to_value(mu.to_spec()).expect("measures serialize")
}

pub fn decompose(common: &Common, matrix: &Matrix) -> Result<Status> {
    let combo = decompose_stochastic(matrix, common.tol)?;
    let back = reconstruct(&combo, matrix.rows(), matrix.cols())?;
    eprintln!(
        "{} terms, weight sum {}, reconstruction error {:e}",
        combo.len(),
        combo.weight_sum(),
        back.max_abs_diff(matrix)?
    );
    common.emit(&combo.to_json_lines())?;
    Ok(Status::Ok)
}

pub fn represent_cmd(common: &Common, hom: Arc<Homomorphism>, matrix: Matrix) -> Result<Status> {
    let problem = GeoProblem::new(hom, matrix)?;
    let blocks = match split_by_target_orbits(&problem) {
        Err(GeneoError::NotEquivariant) => {
            eprintln!("matrix is not equivariant for this setting");
            return Ok(Status::Failed);
        }
        other => other?,
    };
    let mut out = Vec::new();
    let mut recon = Matrix::zeros(problem.matrix().rows(), problem.matrix().cols());
    for block in &blocks {
        let triple = represent(&block.problem)?;
        let part = matrix_of_measure(&triple.mu);
        for (k, &i) in block.rows.iter().enumerate() {
            for j in 0..part.cols() {
                recon.set(i, j, part.get(k, j));
            }
        }
        out.push(json!({
            "rows": block.rows,
            "total_variation": triple.mu.total_variation(),
            "mu_plus": measure_json(&triple.plus),
            "mu_minus": measure_json(&triple.minus),
            "mu": measure_json(&triple.mu),
        }));
    }
    let error = recon.max_abs_diff(problem.matrix())?;
    common.emit(&pretty(&json!({
        "operator_norm": operator_norm_inf(problem.matrix()),
        "reconstruction_error": error,
        "blocks": out,
    })))?;
    if error > MATRIX_TOL {
        eprintln!("reconstruction error {error:e} exceeds {MATRIX_TOL:e}");
        return Ok(Status::Failed);
    }
    Ok(Status::Ok)
}

pub fn orbits(common: &Common, hom: Arc<Homomorphism>, members: bool) -> Result<Status> {
    let action = TwistedAction::new(hom);
    let (n, m) = (action.codomain_size(), action.domain_size());
    let orbits = action.all_orbits(common.guard)?;
    let list: Vec<Value> = orbits
        .iter()
        .map(|o| {
            let mut v = json!({
                "representative": o.representative().values,
                "size": o.len(),
                "stabilizer_size": o.stabilizer_size,
            });
            if members {
                v["members"] = json!(o.members.iter().map(|h| &h.values).collect::<Vec<_>>());
            }
            v
        })
        .collect();
    common.emit(&pretty(&json!({
        "function_count": function_count(n, m) as u64,
        "orbit_count": orbits.len(),
        "orbits": list,
    })))?;
    Ok(Status::Ok)
}

pub fn basis(common: &Common, hom: Arc<Homomorphism>, csv: bool) -> Result<Status> {
    let basis = orbit_basis(Arc::new(TwistedAction::new(hom)), common.guard)?;
    let text = if csv {
        let mut s = String::from("index,size,representative,matrix\n");
        for (i, (o, b)) in basis.orbits.iter().zip(&basis.basis_matrices).enumerate() {
            let rep: Vec<String> = o.representative().values.iter().map(u32::to_string).collect();
            let cells: Vec<String> = b.data().iter().map(f64::to_string).collect();
            writeln!(s, "{i},{},{},{}", o.len(), rep.join(" "), cells.join(","))?;
        }
        s
    } else {
        let list: Vec<Value> = basis
            .orbits
            .iter()
            .zip(&basis.basis_matrices)
            .enumerate()
            .map(|(i, (o, b))| {
                json!({
                    "index": i,
                    "representative": o.representative().values,
                    "size": o.len(),
                    "matrix": b.to_rows(),
                })
            })
            .collect();
        pretty(&json!({ "orbits": list }))
    };
    common.emit(&text)?;
    Ok(Status::Ok)
}

pub fn verify(common: &Common, hom: Arc<Homomorphism>, matrix: Matrix) -> Result<Status> {
    let problem = GeoProblem::new(hom, matrix)?;
    let blocks = match split_by_target_orbits(&problem) {
        Err(GeneoError::NotEquivariant) => {
            println!("GENEO: false, not equivariant");
            return Ok(Status::Failed);
        }
        other => other?,
    };
    for block in &blocks {
        let report = is_geneo(&block.problem)?;
        eprintln!(
            "rows {:?}: total variation {}, operator norm {}",
            block.rows, report.total_variation, report.operator_norm
        );
    }
    let norm = operator_norm_inf(problem.matrix());
    if norm <= 1.0 + common.tol {
        println!("GENEO: true, norm {norm:?}");
        Ok(Status::Ok)
    } else {
        println!("GENEO: false, norm {norm:?} > 1");
        Ok(Status::Failed)
    }
}

/// How each image is translated before the operators are applied.
#[derive(Clone, Debug)]
pub enum Translate {
    Random,
    Fixed(u32, u32),
}

impl std::str::FromStr for Translate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "random" {
            return Ok(Translate::Random);
        }
        let parts: Vec<&str> = s.split(',').collect();
        match parts.as_slice() {
            [a, b] => {
                let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("'{t}': {e}"));
                Ok(Translate::Fixed(parse(a)?, parse(b)?))
            }
            _ => Err(format!("expected 'random' or 'v1,v2', got '{s}'")),
        }
    }
}

pub struct FeatureJob<'a> {
    pub p: u32,
    pub images: &'a Path,
    pub noise: Option<f64>,
    pub translate: Option<Translate>,
    pub limit: Option<usize>,
    pub meta: Option<&'a Path>,
}

fn to_torus_image(raw: &[u8], rows: usize, cols: usize, p: usize) -> Result<TorusImage> {
    if rows == 28 && cols == 28 && p == 29 {
        return Ok(pad_mnist(raw)?);
    }
    if rows == p && cols == p {
        return Ok(TorusImage::new(p, raw.iter().map(|&b| b as f64 / 255.0).collect())?);
    }
    bail!("{rows}x{cols} images do not fit p = {p} (use 28x28 with p = 29, or {p}x{p})")
}

/// Translation draws come from `ChaCha8Rng` seeded with `seed`, two per image;
/// the noise of image `i` is seeded with `seed + i`.
pub fn torus_features(common: &Common, job: &FeatureJob) -> Result<Status> {
    let file = fs::File::open(job.images)
        .with_context(|| format!("opening {}", job.images.display()))?;
    let images = idx::read_images(std::io::BufReader::new(file))?;
    let stack = FeatureStack::new(job.p)?;
    let p = job.p as usize;
    let count = job.limit.map_or(images.len(), |l| l.min(images.len()));
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let mut csv = String::new();
    let mut shifts = Vec::new();
    for i in 0..count {
        let mut phi = to_torus_image(images.image(i), images.rows, images.cols, p)?;
        if let Some(t) = &job.translate {
            let v = match t {
                Translate::Random => (rng.gen_range(0..job.p), rng.gen_range(0..job.p)),
                Translate::Fixed(a, b) => (a % job.p, b % job.p),
            };
            phi = toroidal_translate(&phi, v);
            shifts.push(json!([v.0, v.1]));
        }
        if let Some(level) = job.noise {
            phi = salt_pepper(&phi, level, common.seed.wrapping_add(i as u64))?;
        }
        let features = stack.apply(&phi)?;
        write!(csv, "{i}")?;
        for v in features.data() {
            write!(csv, ",{v}")?;
        }
        csv.push('\n');
    }
    common.emit(&csv)?;
    if let Some(meta) = job.meta {
        let units: Vec<[u32; 2]> = stack.units().iter().map(|w| [w.w1, w.w2]).collect();
        let doc = json!({
            "p": job.p,
            "images": count,
            "unit_vectors": units,
            "noise": job.noise,
            "seed": common.seed,
            "translations": job.translate.as_ref().map(|_| shifts),
        });
        fs::write(meta, pretty(&doc)).with_context(|| format!("writing {}", meta.display()))?;
    }
    eprintln!("{count} images, {} features each", stack.geneos().len() * p);
    Ok(Status::Ok)
}

fn demo_decomposition() -> Result<String> {
    let b = Matrix::from_rows(vec![vec![0.5, 0.0, 0.5], vec![1.0 / 3.0; 3]])?;
    let combo = decompose_stochastic(&b, MATRIX_TOL)?;
    let error = reconstruct(&combo, 2, 3)?.max_abs_diff(&b)?;
    if (combo.weight_sum() - 1.0).abs() > 1e-12 || error > 1e-12 {
        bail!("weights sum to {}, reconstruction error {error:e}", combo.weight_sum());
    }
    Ok(format!("{} rectangular permutation terms, error {error:.1e}", combo.len()))
}

fn demo_sym3_measures() -> Result<String> {
    let hom = Arc::new(preset_sym3()?);
    let b = Matrix::filled(3, 3, 1.0 / 3.0);
    let measure = |fs: [[u32; 3]; 3]| {
        SignedMeasure::from_entries(3, 3, fs.into_iter().map(|h| (Mapping::new(h.to_vec()), 1.0 / 3.0)))
    };
    let mu = measure([[0, 1, 2], [1, 2, 0], [2, 0, 1]])?;
    let nu = measure([[1, 0, 2], [0, 2, 1], [2, 1, 0]])?;
    let action = TwistedAction::new(hom.clone());
    if !action.is_permutant(&mu) || !action.is_permutant(&nu) {
        bail!("example measures are not permutant");
    }
    if matrix_of_measure(&mu) != b || matrix_of_measure(&nu) != b {
        bail!("example measures do not give the all-1/3 matrix");
    }
    let report = is_geneo(&GeoProblem::new(hom, b)?)?;
    if !report.is_geneo {
        bail!("all-1/3 operator reported as expansive");
    }
    Ok(format!(
        "two distinct permutant measures give the all-1/3 operator, norm {}",
        report.operator_norm
    ))
}

fn preset_sym3() -> Result<Homomorphism> {
    crate::setting::preset("sym3")
}

fn demo_redundancy() -> Result<String> {
    let action = Arc::new(TwistedAction::new(Arc::new(preset_sym3()?)));
    let basis = orbit_basis(action, 1000)?.bijective_part();
    if !check_redundancy_identity(&basis)? {
        bail!("identity does not hold");
    }
    Ok("J/3 = (1/3) I + (2/3) (J - I)/2 among the bijection orbits".into())
}

pub fn demo(common: &Common) -> Result<Status> {
    type Check = fn() -> Result<String>;
    let checks: [(&str, Check); 3] = [
        ("stochastic decomposition round trip", demo_decomposition),
        ("Sym(3) measure examples", demo_sym3_measures),
        ("orbit basis redundancy identity", demo_redundancy),
    ];
    let mut report = String::new();
    let mut status = Status::Ok;
    for (name, check) in checks {
        match check() {
            Ok(detail) => writeln!(report, "PASS  {name}: {detail}")?,
            Err(e) => {
                status = Status::Failed;
                writeln!(report, "FAIL  {name}: {e:#}")?;
            }
        }
    }
    common.emit(&report)?;
    Ok(status)
}
