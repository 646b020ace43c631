use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context as _, Result};
use serde::de::DeserializeOwned;

use rw_core::catalog::Catalog;
use rw_core::category::{AbstractCategoryFile, FiniteCategory};
use rw_core::expansion::ExpandedCatalogFile;
use rw_core::report::Context;
use rw_core::Budget;

use crate::args::Global;

/// The category a command runs in, with the files it came from.
pub struct Input {
    pub catalog: Option<Catalog>,
    /// Degrees and expansions listed in the catalog file, if any.
    pub expanded: Option<ExpandedCatalogFile>,
    pub table: Option<AbstractCategoryFile>,
    pub cat: FiniteCategory,
    pub opposite: bool,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: malformed input", path.display()))
}

impl Input {
    pub fn load(g: &Global) -> Result<Input> {
        let (catalog, expanded, table, cat) = match (&g.catalog, &g.category) {
            (Some(path), None) => {
                let file: ExpandedCatalogFile = read_json(path)?;
                let catalog = file.catalog().with_context(|| format!("{}: invalid catalog", path.display()))?;
                let cat = FiniteCategory::from_catalog(&catalog)?;
                (Some(catalog), Some(file), None, cat)
            }
            (None, Some(path)) => {
                let table: AbstractCategoryFile = read_json(path)?;
                let cat = FiniteCategory::from_abstract(&table).with_context(|| format!("{}: invalid category", path.display()))?;
                (None, None, Some(table), cat)
            }
            _ => bail!("one of --catalog or --category is required"),
        };
        let cat = if g.op { cat.op() } else { cat };
        Ok(Input { catalog, expanded, table, cat, opposite: g.op })
    }

    pub fn catalog(&self) -> Result<&Catalog> {
        self.catalog.as_ref().context("this command needs a structure catalog (--catalog)")
    }

    pub fn context(&self, degrees: BTreeMap<String, u32>) -> Context {
        Context {
            catalog: self.catalog.as_ref().map(Catalog::to_file),
            category: self.table.clone(),
            opposite: self.opposite,
            degrees,
        }
    }
}

pub fn budget(g: &Global) -> Budget {
    let mut b = Budget::default();
    if let Some(n) = g.budget_nodes {
        b.max_nodes = Some(n);
    }
    if let Some(s) = g.budget_secs {
        b.max_secs = Some(s);
    }
    b
}
