//! JSON problem files.

use serde::Deserialize;

use visicone::{AffineFlat, Body, DiskCone, GeomError, Polytope, Segment, Simplex, Vector};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dim: usize,
    pub body: BodySpec,
    pub query: Query,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BodySpec {
    Segment {
        vertices: Vec<Vec<f64>>,
    },
    Simplex {
        vertices: Vec<Vec<f64>>,
    },
    Polytope {
        vertices: Vec<Vec<f64>>,
    },
    Flat {
        base: Vec<f64>,
        #[serde(default)]
        directions: Vec<Vec<f64>>,
    },
    DiskCone {},
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Query {
    Project(Vec<f64>),
    Visible {
        from: Vec<f64>,
        candidate: Vec<f64>,
    },
    Raycast {
        from: Vec<f64>,
        toward: Vec<f64>,
    },
    Sample {
        from: Vec<f64>,
        count: usize,
        seed: Option<u64>,
    },
    Separate {
        x: Vec<f64>,
        y: Vec<f64>,
    },
}

impl Query {
    pub fn name(&self) -> &'static str {
        match self {
            Query::Project(_) => "project",
            Query::Visible { .. } => "visible",
            Query::Raycast { .. } => "raycast",
            Query::Sample { .. } => "sample",
            Query::Separate { .. } => "separate",
        }
    }
}

pub fn parse(text: &str) -> Result<ProblemFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("problem file: {e}")))
}

pub fn point(field: &str, coords: &[f64], dim: usize) -> Result<Vector, CliError> {
    if coords.len() != dim {
        return Err(CliError::Input(format!(
            "{field}: expected {dim} coordinates, found {}",
            coords.len()
        )));
    }
    Vector::new(coords.to_vec()).map_err(|e| CliError::Input(format!("{field}: {e}")))
}

fn points(field: &str, rows: &[Vec<f64>], dim: usize) -> Result<Vec<Vector>, CliError> {
    if rows.is_empty() {
        return Err(CliError::Input(format!(
            "{field}: at least one point is required"
        )));
    }
    rows.iter()
        .enumerate()
        .map(|(i, r)| point(&format!("{field}[{i}]"), r, dim))
        .collect()
}

fn invalid(field: &str, e: GeomError) -> CliError {
    CliError::Input(format!("{field}: {e}"))
}

impl ProblemFile {
    pub fn build_body(&self) -> Result<Body, CliError> {
        if self.dim == 0 {
            return Err(CliError::Input("dim: must be positive".into()));
        }
        let dim = self.dim;
        Ok(match &self.body {
            BodySpec::Segment { vertices } => {
                let vs = points("body.vertices", vertices, dim)?;
                if vs.len() != 2 {
                    return Err(CliError::Input(format!(
                        "body.vertices: a segment has 2 endpoints, found {}",
                        vs.len()
                    )));
                }
                let [e0, e1]: [Vector; 2] = vs.try_into().expect("length checked");
                Body::Segment(Segment::new(e0, e1).map_err(|e| invalid("body.vertices", e))?)
            }
            BodySpec::Simplex { vertices } => Body::Simplex(
                Simplex::new(points("body.vertices", vertices, dim)?)
                    .map_err(|e| invalid("body.vertices", e))?,
            ),
            BodySpec::Polytope { vertices } => Body::Polytope(
                Polytope::new(points("body.vertices", vertices, dim)?)
                    .map_err(|e| invalid("body.vertices", e))?,
            ),
            BodySpec::Flat { base, directions } => {
                let base = point("body.base", base, dim)?;
                let dirs = directions
                    .iter()
                    .enumerate()
                    .map(|(i, d)| point(&format!("body.directions[{i}]"), d, dim))
                    .collect::<Result<Vec<_>, _>>()?;
                Body::Flat(AffineFlat::new(base, dirs).map_err(|e| invalid("body.directions", e))?)
            }
            BodySpec::DiskCone {} => {
                if dim != 3 {
                    return Err(CliError::Input(format!(
                        "dim: disk_cone lives in dimension 3, found {dim}"
                    )));
                }
                Body::DiskCone(DiskCone)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_triangle_projection() {
        let p = parse(
            r#"{"dim": 2, "body": {"type": "simplex", "vertices": [[0,0],[1,0],[0,1]]}, "query": {"project": [1,1]}}"#,
        )
        .unwrap();
        assert!(matches!(p.query, Query::Project(ref x) if x == &[1.0, 1.0]));
        assert!(matches!(p.build_body().unwrap(), Body::Simplex(_)));
    }

    #[test]
    fn wrong_length_names_the_field() {
        let p = parse(
            r#"{"dim": 2, "body": {"type": "polytope", "vertices": [[0,0],[1,0,0]]}, "query": {"project": [1,1]}}"#,
        )
        .unwrap();
        let msg = p.build_body().unwrap_err().to_string();
        assert!(msg.contains("body.vertices[1]"), "{msg}");
    }

    #[test]
    fn disk_cone_needs_three_dimensions() {
        let p = parse(r#"{"dim": 2, "body": {"type": "disk_cone"}, "query": {"project": [1,1]}}"#)
            .unwrap();
        assert!(p.build_body().is_err());
    }

    #[test]
    fn unknown_body_type_is_rejected() {
        let e = parse(r#"{"dim": 2, "body": {"type": "cube"}, "query": {"project": [1,1]}}"#)
            .unwrap_err();
        assert!(e.to_string().contains("cube"));
    }
}
