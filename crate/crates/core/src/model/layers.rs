use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One film in a multilayer; `value` is `None` for the layer whose
/// property is to be solved for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub name: String,
    /// m
    pub thickness: f64,
    pub value: Option<f64>,
}

impl Layer {
    pub fn known(name: impl Into<String>, thickness: f64, value: f64) -> Self {
        Layer {
            name: name.into(),
            thickness,
            value: Some(value),
        }
    }

    pub fn unknown(name: impl Into<String>, thickness: f64) -> Self {
        Layer {
            name: name.into(),
            thickness,
            value: None,
        }
    }
}

/// Ordered layers of a composite film.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerStack {
    layers: Vec<Layer>,
    total_thickness: f64,
}

impl LayerStack {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("layer stack is empty"));
        }
        for layer in &layers {
            if layer.thickness.is_finite() && layer.thickness > 0.0 {
                continue;
            }
            if layer.value.is_none() && layer.thickness == 0.0 {
                return Err(Error::ZeroUnknownThickness {
                    name: layer.name.clone(),
                });
            }
            return Err(Error::invalid(format!(
                "layer '{}' thickness must be positive, got {}",
                layer.name, layer.thickness
            )));
        }
        if let Some(bad) = layers.iter().find(|l| l.value.is_some_and(|v| !v.is_finite())) {
            return Err(Error::invalid(format!("layer '{}' value is not finite", bad.name)));
        }
        let total_thickness = layers.iter().map(|l| l.thickness).sum();
        Ok(LayerStack {
            layers,
            total_thickness,
        })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn total_thickness(&self) -> f64 {
        self.total_thickness
    }

    /// Indices of layers whose value is unknown.
    pub fn unknown_indices(&self) -> Vec<usize> {
        self.layers
            .iter()
            .enumerate()
            .filter(|(_, l)| l.value.is_none())
            .map(|(i, _)| i)
            .collect()
    }

    /// Copy of the stack with layer `index` set to `value`.
    pub fn with_value(&self, index: usize, value: f64) -> Self {
        let mut out = self.clone();
        out.layers[index].value = Some(value);
        out
    }
}
