use super::genome::{ConnectionGene, Genome, GenomeError, NodeGene};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

pub const GENOME_FORMAT: &str = "kiteneat-genome";
pub const GENOME_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum GenomeFileError {
    #[error("reading genome file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed genome JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("not a genome file (format {0:?})")]
    Format(String),
    #[error("unsupported genome file version {0}")]
    Version(u32),
    #[error(
        "genome has {found_inputs} inputs / {found_outputs} outputs, expected {inputs} / {outputs}"
    )]
    Layout {
        inputs: usize,
        outputs: usize,
        found_inputs: usize,
        found_outputs: usize,
    },
    #[error("invalid genome: {0}")]
    Invalid(#[from] GenomeError),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GenomeMetadata {
    pub config_hash: String,
    pub generation: u32,
    pub fitness: f64,
}

/// On-disk genome: `{"format", "version", "metadata", "inputs", "outputs",
/// "nodes": [{id, kind, activation}], "connections": [{innovation, source,
/// target, weight, enabled}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenomeFile {
    pub format: String,
    pub version: u32,
    pub metadata: GenomeMetadata,
    pub inputs: usize,
    pub outputs: usize,
    pub nodes: Vec<NodeGene>,
    pub connections: Vec<ConnectionGene>,
}

impl GenomeFile {
    pub fn new(genome: &Genome, config_hash: &str, generation: u32) -> Self {
        GenomeFile {
            format: GENOME_FORMAT.to_string(),
            version: GENOME_VERSION,
            metadata: GenomeMetadata {
                config_hash: config_hash.to_string(),
                generation,
                fitness: genome.fitness,
            },
            inputs: genome.inputs,
            outputs: genome.outputs,
            nodes: genome.nodes.clone(),
            connections: genome.connections.clone(),
        }
    }

    /// Checks the header and structure and returns the genome.
    pub fn into_genome(self) -> Result<Genome, GenomeFileError> {
        if self.format != GENOME_FORMAT {
            return Err(GenomeFileError::Format(self.format));
        }
        if self.version != GENOME_VERSION {
            return Err(GenomeFileError::Version(self.version));
        }
        let g = Genome {
            inputs: self.inputs,
            outputs: self.outputs,
            nodes: self.nodes,
            connections: self.connections,
            fitness: self.metadata.fitness,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("genome serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, GenomeFileError> {
        Ok(serde_json::from_str(s)?)
    }
}

pub fn save_genome(
    path: &Path,
    genome: &Genome,
    config_hash: &str,
    generation: u32,
) -> Result<(), GenomeFileError> {
    std::fs::write(
        path,
        GenomeFile::new(genome, config_hash, generation).to_json(),
    )?;
    Ok(())
}

/// Loads a genome and insists on the given input/output layout.
pub fn load_genome(
    path: &Path,
    inputs: usize,
    outputs: usize,
) -> Result<(Genome, GenomeMetadata), GenomeFileError> {
    let file = GenomeFile::from_json(&std::fs::read_to_string(path)?)?;
    let meta = file.metadata.clone();
    if file.inputs != inputs || file.outputs != outputs {
        return Err(GenomeFileError::Layout {
            inputs,
            outputs,
            found_inputs: file.inputs,
            found_outputs: file.outputs,
        });
    }
    Ok((file.into_genome()?, meta))
}
