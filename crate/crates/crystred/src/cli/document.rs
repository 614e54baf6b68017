use serde::{Deserialize, Serialize};

use crate::hecke::{ExtPoly, HeckeOp, Side, TreeFunction, TreeVertex};
use crate::padic::{parse_scalar, ExtScalar, Prime};

use super::CliError;

/// One vertex of a function document. `poly[j]` is the coefficient of X^{r-j}Y^j.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexEntry {
    /// 0 for g0_{m,lam}, 1 for g1_{m,lam}.
    pub side: u8,
    pub depth: usize,
    pub digits: Vec<u64>,
    pub poly: Vec<String>,
}

/// A finitely supported Sym^r-valued function on the tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionDocument {
    pub p: u64,
    pub r: usize,
    /// "T", "T+" or "T-"; T when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<String>,
    pub vertices: Vec<VertexEntry>,
}

fn vertex_of(entry: &VertexEntry, p: u64) -> Result<TreeVertex, CliError> {
    if entry.depth != entry.digits.len() {
        return Err(CliError::Usage(format!(
            "depth {} but {} digits",
            entry.depth,
            entry.digits.len()
        )));
    }
    if let Some(d) = entry.digits.iter().find(|&&d| d >= p) {
        return Err(CliError::Usage(format!("digit {d} is not in [0, {p})")));
    }
    match entry.side {
        0 => Ok(TreeVertex::side0(entry.digits.clone())),
        1 => Ok(TreeVertex::side1(entry.digits.clone())),
        s => Err(CliError::Usage(format!("side must be 0 or 1, got {s}"))),
    }
}

impl FunctionDocument {
    pub fn operator(&self) -> Result<HeckeOp, CliError> {
        let name = self.op.as_deref().unwrap_or("T");
        HeckeOp::parse(name).ok_or_else(|| CliError::Usage(format!("unknown operator {name:?}")))
    }

    pub fn to_function(&self) -> Result<TreeFunction, CliError> {
        let prime = Prime::new(self.p).map_err(|e| CliError::Usage(e.to_string()))?;
        let mut f = TreeFunction::new(prime, self.r);
        for entry in &self.vertices {
            let v = vertex_of(entry, self.p)?;
            if entry.poly.len() > self.r + 1 {
                return Err(CliError::Usage(format!(
                    "{} coefficients for r = {}",
                    entry.poly.len(),
                    self.r
                )));
            }
            let mut coeffs = vec![ExtScalar::zero(prime); self.r + 1];
            for (slot, text) in coeffs.iter_mut().zip(&entry.poly) {
                *slot = parse_scalar(prime, text).map_err(|e| CliError::Usage(format!("coefficient {text:?}: {e}")))?;
            }
            f.add_term(v, ExtPoly::from_coeffs(prime, coeffs));
        }
        Ok(f)
    }

    pub fn from_function(f: &TreeFunction, op: Option<String>) -> FunctionDocument {
        let vertices = f
            .iter()
            .map(|(v, value)| VertexEntry {
                side: match v.side {
                    Side::Zero => 0,
                    Side::One => 1,
                },
                depth: v.depth(),
                digits: v.digits.clone(),
                poly: value.coeffs().iter().map(|c| c.to_string()).collect(),
            })
            .collect();
        FunctionDocument {
            p: f.prime().p(),
            r: f.r(),
            op,
            vertices,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_function() {
        let doc: FunctionDocument = serde_json::from_str(
            r#"{"p":5,"r":3,"vertices":[{"side":0,"depth":1,"digits":[2],"poly":["1","0","pi^3*(2)"]},{"side":1,"depth":0,"digits":[],"poly":["0","0","0","p"]}]}"#,
        )
        .unwrap();
        let f = doc.to_function().unwrap();
        assert_eq!(f.len(), 2);
        let back = FunctionDocument::from_function(&f, None).to_function().unwrap();
        assert!(back == f);
    }

    #[test]
    fn rejects_bad_vertices() {
        let mut doc = FunctionDocument {
            p: 5,
            r: 2,
            op: None,
            vertices: vec![VertexEntry {
                side: 0,
                depth: 2,
                digits: vec![1],
                poly: vec![],
            }],
        };
        assert!(doc.to_function().is_err());
        doc.vertices[0] = VertexEntry {
            side: 2,
            depth: 0,
            digits: vec![],
            poly: vec![],
        };
        assert!(doc.to_function().is_err());
        doc.vertices[0] = VertexEntry {
            side: 0,
            depth: 1,
            digits: vec![5],
            poly: vec![],
        };
        assert!(doc.to_function().is_err());
    }
}
