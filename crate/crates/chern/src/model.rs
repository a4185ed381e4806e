//! Named example tensors, as accepted by `--model`.
//!
//! ```text
//! fs:n=2,c=2                  fubini-study (c defaults to 2)
//! flat:n=2,r=3                zero tensor (r defaults to n)
//! random-ckl:n=3,seed=7
//! random-hermitian:n=2,r=3,seed=1
//! shifted:n=3,seed=2,s=4      random-ckl + s · fs(n, 2)
//! product:fs(1,2)xfs(1,2)     block-diagonal product of two or more factors
//! ```
//!
//! Inside `product:` each factor takes positional arguments in the order
//! listed above, e.g. `flat(2,1)` or `random-ckl(2,5)`.

use chern_core::{zoo, CurvatureTensor};

use crate::Error;

fn bad(spec: &str, why: impl Into<String>) -> Error {
    Error::Model {
        spec: spec.to_string(),
        message: why.into(),
    }
}

/// Parameters of a model, keyed or positional.
struct Args<'a> {
    spec: &'a str,
    items: Vec<(Option<&'a str>, &'a str)>,
    names: &'static [&'static str],
}

impl<'a> Args<'a> {
    fn parse(spec: &'a str, body: &'a str, names: &'static [&'static str]) -> Result<Self, Error> {
        let mut items = Vec::new();
        for part in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match part.split_once('=') {
                Some((k, v)) => {
                    let k = k.trim();
                    if !names.contains(&k) {
                        return Err(bad(spec, format!("unknown parameter `{k}`, expected one of {names:?}")));
                    }
                    items.push((Some(k), v.trim()));
                }
                None => items.push((None, part)),
            }
        }
        if items.len() > names.len() {
            return Err(bad(spec, format!("too many parameters, expected at most {}", names.len())));
        }
        Ok(Self { spec, items, names })
    }

    fn raw(&self, name: &str) -> Option<&'a str> {
        let pos = self.names.iter().position(|n| *n == name)?;
        self.items
            .iter()
            .find(|(k, _)| *k == Some(name))
            .or_else(|| self.items.get(pos).filter(|(k, _)| k.is_none()))
            .map(|(_, v)| *v)
    }

    fn get<T: std::str::FromStr>(&self, name: &str, default: Option<T>) -> Result<T, Error> {
        match self.raw(name) {
            Some(v) => v
                .parse()
                .map_err(|_| bad(self.spec, format!("cannot parse `{name}` from `{v}`"))),
            None => default.ok_or_else(|| bad(self.spec, format!("missing parameter `{name}`"))),
        }
    }
}

fn positive(spec: &str, name: &str, v: usize) -> Result<usize, Error> {
    if v == 0 {
        Err(bad(spec, format!("`{name}` must be positive")))
    } else {
        Ok(v)
    }
}

fn build(spec: &str, name: &str, body: &str) -> Result<CurvatureTensor, Error> {
    match name {
        "fs" | "fubini-study" => {
            let a = Args::parse(spec, body, &["n", "c"])?;
            let n = positive(spec, "n", a.get("n", None)?)?;
            let c: f64 = a.get("c", Some(2.0))?;
            if !(c.is_finite() && c > 0.0) {
                return Err(bad(spec, "`c` must be a positive number"));
            }
            Ok(zoo::fubini_study(n, c))
        }
        "flat" => {
            let a = Args::parse(spec, body, &["n", "r"])?;
            let n = positive(spec, "n", a.get("n", None)?)?;
            let r = positive(spec, "r", a.get("r", Some(n))?)?;
            Ok(zoo::flat(n, r))
        }
        "random-ckl" => {
            let a = Args::parse(spec, body, &["n", "seed"])?;
            let n = positive(spec, "n", a.get("n", None)?)?;
            Ok(zoo::random_ckl(n, a.get("seed", Some(0))?))
        }
        "random-hermitian" => {
            let a = Args::parse(spec, body, &["n", "r", "seed"])?;
            let n = positive(spec, "n", a.get("n", None)?)?;
            let r = positive(spec, "r", a.get("r", Some(n))?)?;
            Ok(zoo::random_hermitian(n, r, a.get("seed", Some(0))?))
        }
        "shifted" | "shifted-positive" => {
            let a = Args::parse(spec, body, &["n", "seed", "s"])?;
            let n = positive(spec, "n", a.get("n", None)?)?;
            let s: f64 = a.get("s", None)?;
            if !s.is_finite() {
                return Err(bad(spec, "`s` must be finite"));
            }
            Ok(zoo::shifted_positive(n, a.get("seed", Some(0))?, s))
        }
        other => Err(bad(spec, format!("unknown model `{other}`"))),
    }
}

/// Splits `a(..)xb(..)` at the `x` separators outside parentheses.
fn factors(spec: &str, body: &str) -> Result<Vec<(String, String)>, Error> {
    let mut out = Vec::new();
    let mut rest = body.trim();
    while !rest.is_empty() {
        let open = rest.find('(').ok_or_else(|| bad(spec, "product factors look like `name(args)`"))?;
        let close = rest[open..]
            .find(')')
            .map(|c| open + c)
            .ok_or_else(|| bad(spec, "unbalanced parenthesis"))?;
        out.push((rest[..open].trim().to_string(), rest[open + 1..close].to_string()));
        rest = rest[close + 1..].trim_start();
        if let Some(next) = rest.strip_prefix('x').or_else(|| rest.strip_prefix('*')) {
            rest = next.trim_start();
            if rest.is_empty() {
                return Err(bad(spec, "dangling product separator"));
            }
        } else if !rest.is_empty() {
            return Err(bad(spec, format!("unexpected `{rest}` after factor")));
        }
    }
    if out.len() < 2 {
        return Err(bad(spec, "a product needs at least two factors"));
    }
    Ok(out)
}

/// Builds the tensor described by a model spec.
pub fn parse_model(spec: &str) -> Result<CurvatureTensor, Error> {
    let spec = spec.trim();
    let (name, body) = spec.split_once(':').unwrap_or((spec, ""));
    let name = name.trim().to_ascii_lowercase();
    if name == "product" {
        let mut parts = factors(spec, body)?.into_iter();
        let (n0, b0) = parts.next().expect("two factors");
        let mut acc = build(spec, &n0.to_ascii_lowercase(), &b0)?;
        for (n, b) in parts {
            acc = zoo::product(&acc, &build(spec, &n.to_ascii_lowercase(), &b)?);
        }
        return Ok(acc);
    }
    build(spec, &name, body)
}
