//! Input documents and their conversion into library values.

use serde::{Deserialize, Serialize};

use exoflop_core::arith::{is_zero_vec, IntVector, Rat, RatVector};
use exoflop_core::cone::{Cone, Side};
use exoflop_core::exoflop::{
    build_lg_model, ExoflopOptions, LGModel, PotentialSupport, PotentialTerm,
};
use exoflop_core::fan::{Fan, TorusDivisor};
use exoflop_core::triangulate::{PointConfig, RegularTriangulation, WeightFunction};
use exoflop_core::Error;

use crate::json::{int_rows, ints, rats, InputError, JInt, JRat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialEntry {
    pub point: Vec<JInt>,
    pub coeff_label: String,
    /// A numerical coefficient; absent means symbolic and generic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<JRat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedVector {
    pub name: String,
    pub vector: Vec<JInt>,
}

/// A vector of `N × Z^r` given literally or by one of the document's names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorRef {
    Name(String),
    Vector(Vec<JInt>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[serde(default)]
    pub smooth_input: bool,
    #[serde(default)]
    pub smooth_output: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height_bound: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mbar: Option<Vec<JRat>>,
}

/// A gauged model: base fan, divisors of the bundle, potential support.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub lattice_rank: usize,
    pub rays: Vec<Vec<JInt>>,
    pub max_cones: Vec<Vec<usize>>,
    pub divisors: Vec<Vec<JInt>>,
    pub potential: Vec<PotentialEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_prime: Option<Vec<Vec<JInt>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<Vec<VectorRef>>,
    /// Names for vectors of `N × Z^r`, used by splittings and in output.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub names: Vec<NamedVector>,
    #[serde(default)]
    pub flags: Flags,
}

impl InputDocument {
    pub fn total_rank(&self) -> usize {
        self.lattice_rank + self.divisors.len()
    }

    pub fn resolve(&self, r: &VectorRef, pointer: &str) -> Result<IntVector, InputError> {
        let v = match r {
            VectorRef::Vector(v) => ints(v),
            VectorRef::Name(name) => self
                .names
                .iter()
                .find(|n| &n.name == name)
                .map(|n| ints(&n.vector))
                .ok_or_else(|| InputError::at(pointer, format!("unknown vector name `{name}`")))?,
        };
        if v.len() != self.total_rank() {
            return Err(InputError::at(
                pointer,
                format!("expected {} entries, found {}", self.total_rank(), v.len()),
            ));
        }
        Ok(v)
    }

    /// Checks shapes and indices before any geometry is attempted.
    pub fn validate(&self) -> Result<(), InputError> {
        let d = self.lattice_rank;
        if d == 0 {
            return Err(InputError::at("/lattice_rank", "must be positive"));
        }
        for (i, ray) in self.rays.iter().enumerate() {
            if ray.len() != d {
                return Err(InputError::at(
                    format!("/rays/{i}"),
                    format!("expected {d} entries, found {}", ray.len()),
                ));
            }
            if is_zero_vec(&ints(ray)) {
                return Err(InputError::at(format!("/rays/{i}"), "ray is zero"));
            }
        }
        for (i, cone) in self.max_cones.iter().enumerate() {
            for (j, &k) in cone.iter().enumerate() {
                if k >= self.rays.len() {
                    return Err(InputError::at(
                        format!("/max_cones/{i}/{j}"),
                        format!("ray index {k} out of range ({} rays)", self.rays.len()),
                    ));
                }
            }
        }
        if self.divisors.is_empty() {
            return Err(InputError::at(
                "/divisors",
                "at least one divisor is required",
            ));
        }
        for (i, div) in self.divisors.iter().enumerate() {
            if div.len() != self.rays.len() {
                return Err(InputError::at(
                    format!("/divisors/{i}"),
                    format!(
                        "expected {} coefficients, found {}",
                        self.rays.len(),
                        div.len()
                    ),
                ));
            }
        }
        let total = self.total_rank();
        for (i, t) in self.potential.iter().enumerate() {
            if t.point.len() != total {
                return Err(InputError::at(
                    format!("/potential/{i}/point"),
                    format!("expected {total} entries, found {}", t.point.len()),
                ));
            }
        }
        if let Some(sp) = &self.sigma_prime {
            for (i, g) in sp.iter().enumerate() {
                if g.len() != total {
                    return Err(InputError::at(
                        format!("/sigma_prime/{i}"),
                        format!("expected {total} entries, found {}", g.len()),
                    ));
                }
            }
        }
        for (i, n) in self.names.iter().enumerate() {
            if n.vector.len() != total {
                return Err(InputError::at(
                    format!("/names/{i}/vector"),
                    format!("expected {total} entries, found {}", n.vector.len()),
                ));
            }
        }
        if let Some(s) = &self.splitting {
            for (i, r) in s.iter().enumerate() {
                self.resolve(r, &format!("/splitting/{i}"))?;
            }
        }
        if let Some(m) = &self.flags.mbar {
            if m.len() != total {
                return Err(InputError::at(
                    "/flags/mbar",
                    format!("expected {total} entries, found {}", m.len()),
                ));
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Result<LGModel, InputError> {
        self.validate()?;
        let base = Fan::new(
            self.lattice_rank,
            int_rows(&self.rays),
            self.max_cones.clone(),
        )
        .map_err(|e| InputError::at("/max_cones", e))?;
        let divisors = self
            .divisors
            .iter()
            .map(|d| TorusDivisor::new(ints(d)))
            .collect();
        let terms = self
            .potential
            .iter()
            .map(|t| PotentialTerm {
                point: ints(&t.point),
                label: t.coeff_label.clone(),
                value: t.value.as_ref().map(|v| v.0.clone()),
            })
            .collect();
        let potential = PotentialSupport::new(self.total_rank(), terms)
            .map_err(|e| InputError::at("/potential", e))?;
        build_lg_model(base, divisors, potential).map_err(|e| {
            let pointer = match &e {
                Error::PotentialHeight { index, .. } | Error::PotentialOutsideDual { index } => {
                    format!("/potential/{index}/point")
                }
                Error::EmptyPotential => "/potential".into(),
                Error::DeltaCondition { .. }
                | Error::CoefficientCount { .. }
                | Error::NoDivisors => "/divisors".into(),
                _ => "/max_cones".into(),
            };
            InputError::at(pointer, e)
        })
    }

    /// Pipeline options from the document; command-line flags are merged in
    /// by the caller.
    pub fn options(&self) -> Result<ExoflopOptions, InputError> {
        let total = self.total_rank();
        let sigma_prime = match &self.sigma_prime {
            Some(g) => Some(
                Cone::new(Side::N, total, int_rows(g))
                    .map_err(|e| InputError::at("/sigma_prime", e))?,
            ),
            None => None,
        };
        let splitting = match &self.splitting {
            Some(s) => Some(
                s.iter()
                    .enumerate()
                    .map(|(i, r)| self.resolve(r, &format!("/splitting/{i}")))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            None => None,
        };
        Ok(ExoflopOptions {
            sigma_prime,
            splitting,
            smooth_input: self.flags.smooth_input,
            smooth_output: self.flags.smooth_output,
            height_bound: self.flags.height_bound,
            mbar: self.flags.mbar.as_ref().map(|m| rats(m)),
        })
    }
}

/// A rational polyhedral cone by generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeDocument {
    pub rank: usize,
    pub generators: Vec<Vec<JInt>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub names: Vec<NamedVector>,
}

impl ConeDocument {
    pub fn cone(&self) -> Result<Cone, InputError> {
        for (i, g) in self.generators.iter().enumerate() {
            if g.len() != self.rank {
                return Err(InputError::at(
                    format!("/generators/{i}"),
                    format!("expected {} entries, found {}", self.rank, g.len()),
                ));
            }
        }
        Cone::new(Side::N, self.rank, int_rows(&self.generators))
            .map_err(|e| InputError::at("/generators", e))
    }

    pub fn resolve(&self, token: &str) -> Result<IntVector, InputError> {
        if let Some(n) = self.names.iter().find(|n| n.name == token) {
            return Ok(ints(&n.vector));
        }
        parse_vector_token(token, self.rank)
    }
}

/// `a,b,c` or `[a,b,c]` as an integer vector of the given length.
pub fn parse_vector_token(token: &str, rank: usize) -> Result<IntVector, InputError> {
    let inner = token.trim().trim_start_matches('[').trim_end_matches(']');
    let v: IntVector = inner
        .split(',')
        .map(|x| x.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| {
            InputError::at(
                "",
                format!("`{token}` is neither a known name nor an integer vector"),
            )
        })?;
    if v.len() != rank {
        return Err(InputError::at(
            "",
            format!("`{token}` has {} entries, expected {rank}", v.len()),
        ));
    }
    Ok(v)
}

/// Rational vector from `a,b/c,…`.
pub fn parse_rat_vector(token: &str) -> Result<RatVector, InputError> {
    token
        .trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(|x| {
            crate::json::parse_rat(x)
                .ok_or_else(|| InputError::at("", format!("`{x}` is not rational")))
        })
        .collect()
}

/// A point configuration, optionally with a triangulation and weights.
///
/// Without `functional` the points are affine and get a trailing 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangulationDocument {
    pub points: Vec<Vec<JRat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<Vec<JRat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<JRat>>,
}

impl TriangulationDocument {
    pub fn homogenized_points(&self) -> Vec<RatVector> {
        self.points
            .iter()
            .map(|p| {
                let mut v = rats(p);
                if self.functional.is_none() {
                    v.push(Rat::from_integer(1.into()));
                }
                v
            })
            .collect()
    }

    pub fn config(&self) -> Result<PointConfig, InputError> {
        let width = self.points.first().map_or(0, Vec::len);
        for (i, p) in self.points.iter().enumerate() {
            if p.len() != width {
                return Err(InputError::at(
                    format!("/points/{i}"),
                    format!("expected {width} entries, found {}", p.len()),
                ));
            }
        }
        let pts = self.homogenized_points();
        let functional = match &self.functional {
            Some(f) => rats(f),
            None => {
                let mut f = vec![Rat::from_integer(0.into()); width];
                f.push(Rat::from_integer(1.into()));
                f
            }
        };
        PointConfig::new(pts, functional).map_err(|e| match e {
            Error::PointOffHyperplane { index } => InputError::at(format!("/points/{index}"), e),
            _ => InputError::at("/points", e),
        })
    }

    pub fn weights(&self) -> Result<Option<WeightFunction>, InputError> {
        let Some(w) = &self.weights else {
            return Ok(None);
        };
        if w.len() != self.points.len() {
            return Err(InputError::at(
                "/weights",
                format!("expected {} weights, found {}", self.points.len(), w.len()),
            ));
        }
        WeightFunction::new(rats(w))
            .map(Some)
            .map_err(|e| InputError::at("/weights", e))
    }

    pub fn triangulation(&self) -> Result<Option<RegularTriangulation>, InputError> {
        match (&self.cells, self.weights()?) {
            (Some(cells), Some(weights)) => {
                for (i, c) in cells.iter().enumerate() {
                    for (j, &k) in c.iter().enumerate() {
                        if k >= self.points.len() {
                            return Err(InputError::at(
                                format!("/cells/{i}/{j}"),
                                format!("point index {k} out of range"),
                            ));
                        }
                    }
                }
                Ok(Some(RegularTriangulation {
                    cells: cells.clone(),
                    weights,
                }))
            }
            _ => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::json::parse_document;

    const LINE: &str = r#"{
        "lattice_rank": 1,
        "rays": [[1], [-1]],
        "max_cones": [[0], [1]],
        "divisors": [[1, 1]],
        "potential": [
            {"point": [1, 1], "coeff_label": "a"},
            {"point": [-1, 1], "coeff_label": "b", "value": "2/3"}
        ],
        "names": [{"name": "u", "vector": [0, 1]}],
        "splitting": ["u"]
    }"#;

    #[test]
    fn line_document_builds() {
        let doc: InputDocument = parse_document(LINE).unwrap();
        let model = doc.model().unwrap();
        assert_eq!(model.bundle.rays().len(), 3);
        let opts = doc.options().unwrap();
        assert_eq!(
            opts.splitting,
            Some(vec![exoflop_core::arith::ivec(&[0, 1])])
        );
    }

    #[test]
    fn semantic_errors_have_pointers() {
        let mut doc: InputDocument = parse_document(LINE).unwrap();
        doc.max_cones[1][0] = 7;
        assert_eq!(doc.model().unwrap_err().pointer, "/max_cones/1/0");
        let mut doc: InputDocument = parse_document(LINE).unwrap();
        doc.potential[1].point[1] = JInt(2.into());
        assert_eq!(doc.model().unwrap_err().pointer, "/potential/1/point");
        let mut doc: InputDocument = parse_document(LINE).unwrap();
        doc.splitting = Some(vec![VectorRef::Name("v".into())]);
        assert_eq!(doc.validate().unwrap_err().pointer, "/splitting/0");
        let bad = LINE.replace("[[1], [-1]]", "[[1], [-1, 0]]");
        let doc: InputDocument = parse_document(&bad).unwrap();
        assert_eq!(doc.validate().unwrap_err().pointer, "/rays/1");
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = LINE.replace("\"lattice_rank\"", "\"rank\": 1, \"lattice_rank\"");
        assert!(parse_document::<InputDocument>(&bad).is_err());
    }

    #[test]
    fn vector_tokens() {
        assert_eq!(
            parse_vector_token("[1, -2]", 2).unwrap(),
            exoflop_core::arith::ivec(&[1, -2])
        );
        assert!(parse_vector_token("1,2,3", 2).is_err());
        assert!(parse_vector_token("x", 1).is_err());
    }
}
