use std::fs;
use std::path::Path;
use std::sync::Arc;

use loccforge::io::{parse_json, GroupFile, ProductFile, StateFile};
use loccforge::linalg::{bloch_to_operator, BlochVector};
use loccforge::seed::{build_l_state, pauli_group, SeedState};
use loccforge::{Class, Group, Product, Tolerances};

pub const L_STATE: &str = "l-state";

pub fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn in_file(path: &Path, e: loccforge::Error) -> String {
    format!("{}: {e}", path.display())
}

/// Resolves `l-state`, `pauli:N` or a group file. A state file turns a
/// group file into a concrete class after verification.
pub fn load_class(spec: &str, state: Option<&Path>, tol: Tolerances<f64>) -> Result<Arc<Class>, String> {
    if spec == L_STATE {
        if state.is_some() {
            return Err("--state cannot be combined with the built-in l-state group".into());
        }
        return Ok(Arc::new(Class::Concrete(build_l_state(tol.eq).map_err(|e| e.to_string())?)));
    }
    if let Some(n) = spec.strip_prefix("pauli:") {
        let n: usize = n.parse().map_err(|_| format!("invalid party count in '{spec}'"))?;
        if n < 2 {
            return Err("pauli:N needs N >= 2".into());
        }
        let group = pauli_group(n, tol.eq).map_err(|e| e.to_string())?;
        return attach_state(group, state, tol);
    }
    let path = Path::new(spec);
    let file: GroupFile = parse_json(&read(path)?).map_err(|e| in_file(path, e))?;
    let group = file.to_group(tol.eq).map_err(|e| in_file(path, e))?;
    attach_state(group, state, tol)
}

fn attach_state(group: Group, state: Option<&Path>, tol: Tolerances<f64>) -> Result<Arc<Class>, String> {
    let Some(path) = state else { return Ok(Arc::new(Class::Abstract(group))) };
    let file: StateFile = parse_json(&read(path)?).map_err(|e| in_file(path, e))?;
    let state = file.to_state().map_err(|e| in_file(path, e))?;
    let seed = SeedState::new(state, group, tol.eq).map_err(|e| e.to_string())?;
    Ok(Arc::new(Class::Concrete(seed)))
}

/// Parses `"x,y,z; x,y,z; ..."` into the positive square roots of the
/// corresponding Gram operators.
pub fn parse_bloch(text: &str, party_dims: &[usize]) -> Result<Product, String> {
    if party_dims.iter().any(|&d| d != 2) {
        return Err("Bloch shorthand is only available for qubit parties".into());
    }
    let parts: Vec<&str> = text.split(';').map(str::trim).collect();
    if parts.len() != party_dims.len() {
        return Err(format!("{} Bloch vectors given for {} parties", parts.len(), party_dims.len()));
    }
    let factors = parts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let comps: Vec<f64> = p
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|_| format!("party {}: '{c}' is not a number", i + 1)))
                .collect::<Result<_, _>>()?;
            let [x, y, z] = comps[..] else {
                return Err(format!("party {}: expected three components, got {}", i + 1, comps.len()));
            };
            bloch_to_operator(BlochVector::new(x, y, z)).map_err(|e| format!("party {}: {e}", i + 1))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Product::new(factors).map_err(|e| e.to_string())
}

pub fn load_product(path: &Path) -> Result<(Product, Option<String>), String> {
    let file: ProductFile = parse_json(&read(path)?).map_err(|e| in_file(path, e))?;
    let op = file.to_operator().map_err(|e| in_file(path, e))?;
    Ok((op, file.seed))
}

/// Operator from `--bloch` or from an operator file, checked against the
/// class dimensions.
pub fn operator_arg(file: Option<&Path>, bloch: Option<&str>, party_dims: &[usize]) -> Result<Product, String> {
    let op = match (file, bloch) {
        (Some(_), Some(_)) => return Err("give either an operator file or --bloch, not both".into()),
        (Some(path), None) => load_product(path)?.0,
        (None, Some(text)) => parse_bloch(text, party_dims)?,
        (None, None) => return Err("an operator file or --bloch is required".into()),
    };
    if op.dims() != party_dims {
        return Err(format!("operator dimensions {:?} do not match the group {:?}", op.dims(), party_dims));
    }
    Ok(op)
}
