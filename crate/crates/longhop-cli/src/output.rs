//! Buffered CSV/report output to stdout or a file.

use std::fs::File;
use std::io::{self, BufWriter, Write};

pub struct OutputTarget {
    writer: BufWriter<Box<dyn Write>>,
}

impl OutputTarget {
    pub fn create(path: Option<&str>) -> io::Result<Self> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout()),
        };
        Ok(Self {
            writer: BufWriter::new(inner),
        })
    }

    pub fn line(&mut self, s: &str) -> io::Result<()> {
        writeln!(self.writer, "{s}")
    }

    pub fn finish(mut self) -> Result<(), crate::RunError> {
        self.writer.flush()?;
        Ok(())
    }
}
