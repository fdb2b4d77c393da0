use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ComposedForm;
use crate::error::{Error, Result};
use crate::logic::{parse_bool, parse_formula};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiEntry {
    pub id: String,
    pub formula: String,
}

/// Serialized composed form: `{"psi":[[{"id","formula"}]],"alpha":"..."}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposedJson {
    pub psi: Vec<Vec<PsiEntry>>,
    pub alpha: String,
}

impl From<&ComposedForm> for ComposedJson {
    fn from(cf: &ComposedForm) -> Self {
        ComposedJson {
            psi: cf
                .psi
                .iter()
                .map(|m| {
                    m.iter()
                        .map(|(id, f)| PsiEntry {
                            id: id.clone(),
                            formula: f.to_string(),
                        })
                        .collect()
                })
                .collect(),
            alpha: cf.alpha.to_string(),
        }
    }
}

impl ComposedJson {
    pub fn to_form(&self) -> Result<ComposedForm> {
        let mut psi = Vec::with_capacity(self.psi.len());
        for entries in &self.psi {
            let mut m = BTreeMap::new();
            for e in entries {
                if m.insert(e.id.clone(), parse_formula(&e.formula)?).is_some() {
                    return Err(Error::Json(format!("duplicate formula id {}", e.id)));
                }
            }
            psi.push(m);
        }
        let alpha = parse_bool(&self.alpha)?;
        for a in alpha.atoms() {
            if psi.get(a.component).is_none_or(|m| !m.contains_key(&a.id)) {
                return Err(Error::Json(format!("alpha mentions unknown atom {a}")));
            }
        }
        Ok(ComposedForm { psi, alpha })
    }
}

impl ComposedForm {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ComposedJson::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: ComposedJson = serde_json::from_str(text)?;
        j.to_form()
    }
}
