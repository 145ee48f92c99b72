//! File formats: pattern matrices as text or JSON, node systems as labeled
//! `A`/`B`/`C` blocks, networks as a single JSON document or as a directory
//! of text files tied together by a manifest.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::StructuredNetwork;
use crate::node::NodeSystem;
use crate::pattern::PatternMatrix;

/// JSON form of a node system.
#[derive(Serialize, Deserialize)]
pub struct NodeRepr {
    #[serde(rename = "A")]
    pub a: PatternMatrix,
    #[serde(rename = "B")]
    pub b: PatternMatrix,
    #[serde(rename = "C")]
    pub c: PatternMatrix,
}

impl TryFrom<NodeRepr> for NodeSystem {
    type Error = Error;

    fn try_from(repr: NodeRepr) -> Result<Self> {
        NodeSystem::new(repr.a, repr.b, repr.c)
    }
}

impl From<&NodeSystem> for NodeRepr {
    fn from(node: &NodeSystem) -> Self {
        NodeRepr { a: node.a().clone(), b: node.b().clone(), c: node.c().clone() }
    }
}

/// JSON form of a network.
#[derive(Serialize, Deserialize)]
pub struct NetworkRepr {
    pub nodes: Vec<NodeRepr>,
    #[serde(rename = "W")]
    pub w: PatternMatrix,
    #[serde(rename = "H")]
    pub h: PatternMatrix,
}

impl TryFrom<NetworkRepr> for StructuredNetwork {
    type Error = Error;

    fn try_from(repr: NetworkRepr) -> Result<Self> {
        let nodes: Result<Vec<NodeSystem>> =
            repr.nodes.into_iter().map(NodeSystem::try_from).collect();
        StructuredNetwork::new(nodes?, repr.w, repr.h)
    }
}

impl From<&StructuredNetwork> for NetworkRepr {
    fn from(net: &StructuredNetwork) -> Self {
        NetworkRepr {
            nodes: net.nodes().iter().map(NodeRepr::from).collect(),
            w: net.w().clone(),
            h: net.h().clone(),
        }
    }
}

/// Manifest of a network directory: file names relative to the directory.
#[derive(Serialize, Deserialize)]
pub struct NetworkManifest {
    pub nodes: Vec<String>,
    #[serde(rename = "W")]
    pub w: String,
    #[serde(rename = "H")]
    pub h: String,
}

/// Splits text into labeled blocks: a label is a line holding a single
/// identifier; the following non-blank lines form its pattern matrix.
pub fn parse_labeled_blocks(text: &str) -> Result<Vec<(String, PatternMatrix)>> {
    let mut blocks = Vec::new();
    let mut label: Option<String> = None;
    let mut body: Vec<&str> = Vec::new();
    let mut flush = |label: &mut Option<String>, body: &mut Vec<&str>| -> Result<()> {
        if let Some(name) = label.take() {
            if body.is_empty() {
                return Err(Error::Parse(format!("block {:?} has no rows", name)));
            }
            blocks.push((name, body.join("\n").parse()?));
        } else if !body.is_empty() {
            return Err(Error::Parse("pattern rows before the first block label".into()));
        }
        body.clear();
        Ok(())
    };
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            flush(&mut label, &mut body)?;
        } else if trimmed.chars().all(|c| c.is_alphanumeric() || c == '_')
            && trimmed.chars().any(|c| c.is_alphabetic())
            && !trimmed.contains(char::is_whitespace)
        {
            flush(&mut label, &mut body)?;
            label = Some(trimmed.to_string());
        } else {
            body.push(trimmed);
        }
    }
    flush(&mut label, &mut body)?;
    Ok(blocks)
}

/// Parses a node file in labeled-block text form (blocks `A`, `B`, `C`).
pub fn node_from_text(text: &str) -> Result<NodeSystem> {
    let blocks = parse_labeled_blocks(text)?;
    let mut a = None;
    let mut b = None;
    let mut c = None;
    for (name, m) in blocks {
        match name.as_str() {
            "A" => a = Some(m),
            "B" => b = Some(m),
            "C" => c = Some(m),
            other => return Err(Error::Parse(format!("unexpected block {:?}", other))),
        }
    }
    match (a, b, c) {
        (Some(a), Some(b), Some(c)) => NodeSystem::new(a, b, c),
        _ => Err(Error::Parse("node file needs blocks A, B and C".into())),
    }
}

pub fn node_to_text(node: &NodeSystem) -> String {
    format!("A\n{}\n\nB\n{}\n\nC\n{}\n", node.a(), node.b(), node.c())
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))
    }
}

fn is_json(path: &Path, text: &str) -> bool {
    path.extension().map(|e| e == "json").unwrap_or(false)
        || text.trim_start().starts_with('{')
}

/// Loads a pattern matrix from a text or JSON file (`-` for stdin).
pub fn load_pattern(path: &Path) -> Result<PatternMatrix> {
    let text = read_input(path)?;
    if is_json(path, &text) {
        Ok(serde_json::from_str(&text)?)
    } else {
        text.parse()
    }
}

/// Loads a node system from a labeled-block text file or a JSON file.
pub fn load_node(path: &Path) -> Result<NodeSystem> {
    let text = read_input(path)?;
    if is_json(path, &text) {
        let repr: NodeRepr = serde_json::from_str(&text)?;
        repr.try_into()
    } else {
        node_from_text(&text)
    }
}

/// Loads a network from a JSON file or from a directory with a
/// `manifest.json` naming the node, `W` and `H` pattern files.
pub fn load_network(path: &Path) -> Result<StructuredNetwork> {
    if path != Path::new("-") && path.is_dir() {
        return load_network_dir(path);
    }
    let text = read_input(path)?;
    let repr: NetworkRepr = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))?;
    repr.try_into()
}

fn load_network_dir(dir: &Path) -> Result<StructuredNetwork> {
    let manifest_path = dir.join("manifest.json");
    let text = fs::read_to_string(&manifest_path)
        .map_err(|e| Error::Parse(format!("{}: {}", manifest_path.display(), e)))?;
    let manifest: NetworkManifest = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {}", manifest_path.display(), e)))?;
    let nodes: Result<Vec<NodeSystem>> = manifest
        .nodes
        .iter()
        .map(|name| load_node(&dir.join(name)))
        .collect();
    let w = load_pattern(&dir.join(&manifest.w))?;
    let h = load_pattern(&dir.join(&manifest.h))?;
    StructuredNetwork::new(nodes?, w, h)
}

pub fn network_to_json(net: &StructuredNetwork) -> String {
    serde_json::to_string_pretty(&NetworkRepr::from(net)).expect("network serializes")
}

pub fn network_from_json(text: &str) -> Result<StructuredNetwork> {
    let repr: NetworkRepr = serde_json::from_str(text)?;
    repr.try_into()
}

/// Writes a network as a directory of text pattern files plus manifest.
pub fn write_network_dir(net: &StructuredNetwork, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut node_files = Vec::new();
    for (k, node) in net.nodes().iter().enumerate() {
        let name = format!("node{}.txt", k + 1);
        fs::write(dir.join(&name), node_to_text(node))?;
        node_files.push(name);
    }
    fs::write(dir.join("W.txt"), format!("{}\n", net.w()))?;
    fs::write(dir.join("H.txt"), format!("{}\n", net.h()))?;
    let manifest = NetworkManifest {
        nodes: node_files,
        w: "W.txt".into(),
        h: "H.txt".into(),
    };
    let manifest_path = dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> PatternMatrix {
        s.parse().unwrap()
    }

    fn sample_node() -> NodeSystem {
        NodeSystem::new(pat("0 *\n* 0"), pat("*\n0"), pat("* 0")).unwrap()
    }

    #[test]
    fn node_text_round_trip() {
        let node = sample_node();
        let text = node_to_text(&node);
        assert_eq!(node_from_text(&text).unwrap(), node);
    }

    #[test]
    fn node_text_requires_all_blocks() {
        assert!(node_from_text("A\n*\n\nB\n*\n").is_err());
        assert!(node_from_text("A\n*\n\nB\n*\n\nC\n*\n\nD\n*\n").is_err());
    }

    #[test]
    fn network_json_round_trip() {
        let net = StructuredNetwork::new(
            vec![sample_node(), sample_node()],
            pat("0 *\n* ?"),
            pat("*\n0"),
        )
        .unwrap();
        let json = network_to_json(&net);
        assert_eq!(network_from_json(&json).unwrap(), net);
    }

    #[test]
    fn network_dir_round_trip() {
        let net = StructuredNetwork::new(
            vec![sample_node()],
            pat("?"),
            pat("* 0"),
        )
        .unwrap();
        let dir = std::env::temp_dir().join(format!("ssc-io-test-{}", std::process::id()));
        write_network_dir(&net, &dir).unwrap();
        let loaded = load_network(&dir).unwrap();
        fs::remove_dir_all(&dir).ok();
        assert_eq!(loaded, net);
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(network_from_json("{ nope"), Err(Error::Parse(_))));
    }
}
