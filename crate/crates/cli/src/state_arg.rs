//! One-line state constructors, e.g. `werner:d=3,t=0.5` or `file:rho.json`.

use std::collections::BTreeMap;
use std::path::Path;

use lufid::probes::counterexample_pair;
use lufid::states::{isotropic, max_entangled, random_density, werner, StateJson};
use lufid::{DensityMatrix, Error, PureState, Result, C64};

pub const FORMS: &str = "werner:d=D,t=T | iso:d=D,lam=L | max:d=D | mixed:d1=A,d2=B | \
product:d1=A,d2=B | basis:d1=A,d2=B,i=I,j=J | random:d1=A,d2=B,rank=R,seed=S | \
pure:d1=A,d2=B,ket=[..],im=[..] | noncommuting:rho | noncommuting:sigma | file:PATH";

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Splits `k=v` pairs on commas outside square brackets.
fn params(body: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    let mut pieces = Vec::new();
    for ch in body.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth = depth.checked_sub(1).ok_or_else(|| parse_err("unbalanced ']'"))?,
            ',' if depth == 0 => {
                pieces.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if depth != 0 {
        return Err(parse_err("unbalanced '['"));
    }
    pieces.push(cur);
    for p in pieces.into_iter().filter(|p| !p.trim().is_empty()) {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected key=value, got '{p}'")))?;
        if out.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(parse_err(format!("duplicate key '{}'", k.trim())));
        }
    }
    Ok(out)
}

struct Params {
    map: BTreeMap<String, String>,
    kind: String,
}

impl Params {
    fn get<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self
            .map
            .remove(key)
            .ok_or_else(|| parse_err(format!("{}: missing parameter '{key}'", self.kind)))?;
        v.parse()
            .map_err(|_| parse_err(format!("{}: cannot parse {key}='{v}'", self.kind)))
    }

    fn get_or<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        if self.map.contains_key(key) {
            self.get(key)
        } else {
            Ok(default)
        }
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.map.remove(key) else { return Ok(None) };
        let inner = v
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| parse_err(format!("{}: {key} must be a [..] list", self.kind)))?;
        inner
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse().map_err(|_| parse_err(format!("{}: bad number '{s}'", self.kind))))
            .collect::<Result<Vec<f64>>>()
            .map(Some)
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(parse_err(format!("{}: unknown parameter '{k}'", self.kind))),
            None => Ok(()),
        }
    }
}

pub fn parse_state(spec: &str) -> Result<DensityMatrix> {
    let (kind, body) = spec
        .split_once(':')
        .ok_or_else(|| parse_err(format!("state '{spec}' lacks a 'kind:' prefix; forms: {FORMS}")))?;
    if kind == "file" {
        return load_state(Path::new(body));
    }
    if kind == "noncommuting" {
        let (rho, sigma) = counterexample_pair();
        return match body {
            "rho" => Ok(rho),
            "sigma" => Ok(sigma),
            _ => Err(parse_err("noncommuting takes 'rho' or 'sigma'")),
        };
    }
    let mut p = Params { map: params(body)?, kind: kind.to_string() };
    let state = match kind {
        "werner" => {
            let d = p.get("d")?;
            werner(d, p.get("t")?)?
        }
        "iso" => {
            let d = p.get("d")?;
            isotropic(d, p.get("lam")?)?
        }
        "max" => max_entangled(p.get("d")?)?.to_density(),
        "mixed" => {
            let d1 = p.get("d1")?;
            DensityMatrix::maximally_mixed(d1, p.get("d2")?)
        }
        "product" => {
            let d1 = p.get("d1")?;
            PureState::basis(d1, p.get("d2")?, 0, 0)?.to_density()
        }
        "basis" => {
            let (d1, d2) = (p.get("d1")?, p.get("d2")?);
            PureState::basis(d1, d2, p.get("i")?, p.get("j")?)?.to_density()
        }
        "random" => {
            let (d1, d2): (usize, usize) = (p.get("d1")?, p.get("d2")?);
            let rank = p.get_or("rank", d1 * d2)?;
            random_density(d1, d2, rank, p.get_or("seed", 0)?)?
        }
        "pure" => {
            let (d1, d2): (usize, usize) = (p.get("d1")?, p.get("d2")?);
            let re = p.list("ket")?.ok_or_else(|| parse_err("pure: missing parameter 'ket'"))?;
            let im = p.list("im")?.unwrap_or_else(|| vec![0.0; re.len()]);
            if im.len() != re.len() {
                return Err(parse_err("pure: ket and im lengths differ"));
            }
            let ket = re.iter().zip(&im).map(|(&a, &b)| C64::new(a, b)).collect();
            PureState::normalized(ket, d1, d2)?.to_density()
        }
        other => return Err(parse_err(format!("unknown state kind '{other}'; forms: {FORMS}"))),
    };
    p.finish()?;
    Ok(state)
}

pub fn load_state(path: &Path) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path)?;
    let j: StateJson = serde_json::from_str(&text)?;
    DensityMatrix::from_json(&j)
}
