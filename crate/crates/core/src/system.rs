//! JSON interchange for systems: a list of components and a constraint.
//!
//! ```json
//! {"components":[{"id":"A","vertices":["0","1"],"local":["a"],"sync":["c"],
//!                 "edges":[{"label":"a","from":"0","to":"1"}]}],
//!  "constraint":[["c"]]}
//! ```

use serde::{Deserialize, Deserializer, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::lts::{build_product, LabelAlphabet, Lts, ProductSpec, SyncConstraint, SyncTuple};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub label: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    /// A string or an integer in the input; always written as a string.
    #[serde(deserialize_with = "id_string")]
    pub id: String,
    pub vertices: Vec<String>,
    #[serde(default)]
    pub local: Vec<String>,
    #[serde(default)]
    pub sync: Vec<String>,
    #[serde(default)]
    pub edges: Vec<EdgeJson>,
}

fn id_string<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Id {
        Text(String),
        Number(u64),
    }
    Ok(match Id::deserialize(d)? {
        Id::Text(s) => s,
        Id::Number(n) => n.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemJson {
    pub components: Vec<ComponentJson>,
    #[serde(default)]
    pub constraint: Vec<Vec<String>>,
}

/// A parsed system: component ids alongside the product specification.
#[derive(Debug, Clone)]
pub struct System {
    pub ids: Vec<String>,
    pub spec: ProductSpec,
}

impl ComponentJson {
    pub fn from_lts(id: impl Into<String>, g: &Lts) -> Self {
        let mut edges = Vec::new();
        for l in g.alphabet().labels() {
            for (a, b) in g.edges(l) {
                edges.push(EdgeJson {
                    label: l.clone(),
                    from: g.vertex_name(a).to_string(),
                    to: g.vertex_name(b).to_string(),
                });
            }
        }
        ComponentJson {
            id: id.into(),
            vertices: g.vertex_names().to_vec(),
            local: g.alphabet().local.iter().cloned().collect(),
            sync: g.alphabet().sync.iter().cloned().collect(),
            edges,
        }
    }

    pub fn to_lts(&self) -> Result<Lts> {
        let mut g = Lts::new(LabelAlphabet::new(self.local.iter().cloned(), self.sync.iter().cloned())?);
        for v in &self.vertices {
            if g.vertex_id(v).is_some() {
                return Err(Error::InvalidSystem(format!("vertex `{v}` of `{}` is listed twice", self.id)));
            }
            g.add_vertex(v.clone());
        }
        for e in &self.edges {
            let id = |v: &str| g.vertex_id(v).ok_or_else(|| Error::UnknownVertex(format!("{v} in `{}`", self.id)));
            let (a, b) = (id(&e.from)?, id(&e.to)?);
            g.add_edge(&e.label, a, b)?;
        }
        Ok(g)
    }
}

impl System {
    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_value(serde_json::from_str(text)?)
    }

    pub fn from_value(j: SystemJson) -> Result<Self> {
        let components = j.components.iter().map(ComponentJson::to_lts).collect::<Result<Vec<_>>>()?;
        let constraint = SyncConstraint::new(j.constraint.into_iter().map(SyncTuple).collect());
        Ok(System {
            ids: j.components.into_iter().map(|c| c.id).collect(),
            spec: ProductSpec::new(components, constraint)?,
        })
    }

    pub fn from_spec(spec: ProductSpec) -> Self {
        System {
            ids: (1..=spec.len()).map(|i| format!("G{i}")).collect(),
            spec,
        }
    }

    pub fn to_value(&self) -> SystemJson {
        SystemJson {
            components: self
                .ids
                .iter()
                .zip(self.spec.components())
                .map(|(id, g)| ComponentJson::from_lts(id.clone(), g))
                .collect(),
            constraint: self.spec.constraint().tuples.iter().map(|t| t.0.clone()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("plain data serializes")
    }

    /// The graph formulas are checked against: a lone unconstrained
    /// component as is, otherwise the explicit product.
    pub fn graph(&self, caps: &Caps) -> Result<Lts> {
        if self.spec.len() == 1 && self.spec.constraint().is_empty() {
            return Ok(self.spec.component(0).clone());
        }
        build_product(&self.spec, caps)
    }

    /// A single graph as a one-component system.
    pub fn single(id: impl Into<String>, g: Lts) -> Result<Self> {
        Ok(System {
            ids: vec![id.into()],
            spec: ProductSpec::new(vec![g], SyncConstraint::new(Vec::new()))?,
        })
    }
}
