use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};

use levdecay::chart::{emit_chart, Chart};

use crate::{Format, OutputArgs};

/// Destination for one command's files.
pub struct Outputs<'a> {
    args: &'a OutputArgs,
}

type Writer<'w> = &'w mut dyn Write;

impl<'a> Outputs<'a> {
    pub fn new(args: &'a OutputArgs) -> Result<Self> {
        if !args.stdout {
            fs::create_dir_all(&args.out_dir)
                .with_context(|| format!("creating {}", args.out_dir.display()))?;
        }
        Ok(Self { args })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.args.out_dir.join(name)
    }

    fn csv_enabled(&self) -> bool {
        !self.args.stdout && self.args.format != Format::Chart
    }

    pub fn charts_enabled(&self) -> bool {
        !self.args.stdout && self.args.format != Format::Csv
    }

    /// The command's main table: standard output under `--stdout`, otherwise
    /// a file unless only charts were requested.
    pub fn primary(
        &self,
        name: &str,
        write: impl FnOnce(Writer<'_>) -> csv::Result<()>,
    ) -> Result<()> {
        if self.args.stdout {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            return write(&mut lock).context("writing to standard output");
        }
        self.table(name, write)
    }

    pub fn table(
        &self,
        name: &str,
        write: impl FnOnce(Writer<'_>) -> csv::Result<()>,
    ) -> Result<()> {
        if !self.csv_enabled() {
            return Ok(());
        }
        let path = self.path(name);
        let mut buf = Vec::new();
        write(&mut buf).with_context(|| format!("formatting {}", path.display()))?;
        fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))
    }

    /// Writes `<stem>.svg` and `<stem>_points.csv`.
    pub fn chart(&self, stem: &str, chart: &Chart) -> Result<()> {
        if !self.charts_enabled() {
            return Ok(());
        }
        let doc = emit_chart(chart).with_context(|| format!("rendering {stem}.svg"))?;
        for (name, body) in [
            (format!("{stem}.svg"), doc.svg),
            (format!("{stem}_points.csv"), doc.csv),
        ] {
            let path = self.path(&name);
            fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}
