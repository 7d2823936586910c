//! Record files: UTF-8 TSV with a `source  source_id  smiles` header,
//! optionally gzip-compressed, plus a block index sidecar for plain files.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use super::{MoleculeRecord, PipelineError};

pub const HEADER: [&str; 3] = ["source", "source_id", "smiles"];

/// Rows per block in the index sidecar.
pub const BLOCK_ROWS: u64 = 65_536;

/// One data line as read, before any chemistry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRow {
    /// 1-based line number in the file, header included.
    pub line: u64,
    pub source: String,
    pub source_id: String,
    pub smiles: String,
}

/// A data line that could not be split into the three fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MalformedRow {
    pub line: u64,
    pub text: String,
}

pub type Row = Result<RawRow, MalformedRow>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> PipelineError + '_ {
    move |e| PipelineError::Io { path: path.to_path_buf(), source: e }
}

/// Open a file for reading, decompressing when it starts with the gzip magic.
pub fn open_text(path: &Path) -> Result<Box<dyn BufRead + Send>, PipelineError> {
    let mut file = File::open(path).map_err(io_err(path))?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic).map_err(io_err(path))?;
    file.seek(SeekFrom::Start(0)).map_err(io_err(path))?;
    Ok(if n == 2 && magic == [0x1f, 0x8b] {
        Box::new(BufReader::with_capacity(1 << 16, MultiGzDecoder::new(file)))
    } else {
        Box::new(BufReader::with_capacity(1 << 16, file))
    })
}

fn split_row(line: u64, text: &str) -> Row {
    let mut cols = text.split('\t');
    match (cols.next(), cols.next(), cols.next()) {
        (Some(source), Some(id), Some(smiles)) if !source.is_empty() && !id.is_empty() => Ok(RawRow {
            line,
            source: source.to_string(),
            source_id: id.to_string(),
            smiles: smiles.trim().to_string(),
        }),
        _ => Err(MalformedRow { line, text: text.to_string() }),
    }
}

fn check_header(path: &Path, text: Option<&str>) -> Result<(), PipelineError> {
    let found = text.unwrap_or("").trim_end_matches(['\r', '\n']);
    let cols: Vec<&str> = found.split('\t').collect();
    if cols.len() < 3 || cols[..3] != HEADER {
        return Err(PipelineError::MalformedHeader { path: path.to_path_buf(), found: found.to_string() });
    }
    Ok(())
}

/// Streaming reader over a record file. Extra columns are ignored.
pub struct RecordReader {
    path: PathBuf,
    input: Box<dyn BufRead + Send>,
    line: u64,
    buf: String,
}

impl RecordReader {
    pub fn open(path: &Path) -> Result<RecordReader, PipelineError> {
        let mut input = open_text(path)?;
        let mut header = String::new();
        let n = input.read_line(&mut header).map_err(io_err(path))?;
        check_header(path, (n > 0).then_some(header.as_str()))?;
        Ok(RecordReader { path: path.to_path_buf(), input, line: 1, buf: String::new() })
    }

    /// Up to `n` rows; an empty vector means end of file.
    pub fn next_chunk(&mut self, n: usize) -> Result<Vec<Row>, PipelineError> {
        let mut out = Vec::with_capacity(n.min(1 << 16));
        while out.len() < n {
            self.buf.clear();
            let read = self.input.read_line(&mut self.buf).map_err(io_err(&self.path))?;
            if read == 0 {
                break;
            }
            self.line += 1;
            let text = self.buf.trim_end_matches(['\r', '\n']);
            if text.is_empty() {
                continue;
            }
            out.push(split_row(self.line, text));
        }
        Ok(out)
    }
}

impl Iterator for RecordReader {
    type Item = Result<Row, PipelineError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.next_chunk(1) {
            Ok(mut v) => v.pop().map(Ok),
            Err(e) => Some(Err(e)),
        }
    }
}

/// Read a whole record file into memory.
pub fn read_rows(path: &Path) -> Result<Vec<Row>, PipelineError> {
    RecordReader::open(path)?.collect()
}

fn check_field(value: &str) -> Result<(), PipelineError> {
    if value.is_empty() || value.contains(['\t', '\n', '\r']) {
        return Err(PipelineError::InvalidField(value.to_string()));
    }
    Ok(())
}

/// Open a file for writing, gzip-compressed when the name ends in `.gz`.
pub fn create_text(path: &Path) -> Result<Box<dyn Write>, PipelineError> {
    let file = BufWriter::with_capacity(1 << 16, File::create(path).map_err(io_err(path))?);
    Ok(if path.extension().is_some_and(|e| e == "gz") {
        // fixed header fields keep compressed output byte-identical
        Box::new(GzEncoder::new(file, Compression::new(6)))
    } else {
        Box::new(file)
    })
}

/// Write records in order. Identical inputs give identical bytes. Plain
/// files also get a `.idx` block index.
pub fn write_records<'a>(
    path: &Path,
    records: impl IntoIterator<Item = &'a MoleculeRecord>,
) -> Result<u64, PipelineError> {
    let mut out = create_text(path)?;
    let mut index = BlockIndex::default();
    let mut offset = (HEADER.join("\t").len() + 1) as u64;
    let mut rows = 0u64;
    writeln!(out, "{}", HEADER.join("\t")).map_err(io_err(path))?;
    for r in records {
        check_field(&r.source)?;
        check_field(&r.source_id)?;
        check_field(&r.smiles)?;
        if rows % BLOCK_ROWS == 0 {
            index.blocks.push(Block { offset, rows: 0 });
        }
        index.blocks.last_mut().expect("block").rows += 1;
        let line = format!("{}\t{}\t{}\n", r.source, r.source_id, r.smiles);
        out.write_all(line.as_bytes()).map_err(io_err(path))?;
        offset += line.len() as u64;
        rows += 1;
    }
    out.flush().map_err(io_err(path))?;
    drop(out);
    if !path.extension().is_some_and(|e| e == "gz") {
        index.save(&index_path(path))?;
    }
    Ok(rows)
}

/// Sidecar path for a record file.
pub fn index_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".idx");
    PathBuf::from(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    /// Byte offset of the block's first data line.
    pub offset: u64,
    pub rows: u64,
}

/// Byte offsets of every `BLOCK_ROWS` data lines, so blocks of a plain
/// record file can be scanned independently.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockIndex {
    pub blocks: Vec<Block>,
}

impl BlockIndex {
    /// Scan a plain (uncompressed) record file.
    pub fn build(path: &Path) -> Result<BlockIndex, PipelineError> {
        let mut input = BufReader::new(File::open(path).map_err(io_err(path))?);
        let mut line = Vec::new();
        let n = input.read_until(b'\n', &mut line).map_err(io_err(path))?;
        check_header(path, std::str::from_utf8(&line).ok().filter(|_| n > 0))?;
        let mut offset = n as u64;
        let mut index = BlockIndex::default();
        let mut rows = 0u64;
        loop {
            line.clear();
            let n = input.read_until(b'\n', &mut line).map_err(io_err(path))?;
            if n == 0 {
                break;
            }
            if line.iter().all(|b| b.is_ascii_whitespace()) {
                offset += n as u64;
                continue;
            }
            if rows % BLOCK_ROWS == 0 {
                index.blocks.push(Block { offset, rows: 0 });
            }
            index.blocks.last_mut().expect("block").rows += 1;
            rows += 1;
            offset += n as u64;
        }
        Ok(index)
    }

    pub fn save(&self, path: &Path) -> Result<(), PipelineError> {
        let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
        writeln!(out, "# offset\trows").map_err(io_err(path))?;
        for b in &self.blocks {
            writeln!(out, "{}\t{}", b.offset, b.rows).map_err(io_err(path))?;
        }
        out.flush().map_err(io_err(path))
    }

    pub fn load(path: &Path) -> Result<BlockIndex, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let bad = || PipelineError::MalformedIndex(path.to_path_buf());
        let mut blocks = Vec::new();
        for line in text.lines().filter(|l| !l.starts_with('#') && !l.is_empty()) {
            let (o, r) = line.split_once('\t').ok_or_else(bad)?;
            blocks.push(Block { offset: o.parse().map_err(|_| bad())?, rows: r.parse().map_err(|_| bad())? });
        }
        Ok(BlockIndex { blocks })
    }

    pub fn total_rows(&self) -> u64 {
        self.blocks.iter().map(|b| b.rows).sum()
    }
}

/// Read one block of a plain record file.
pub fn read_block(path: &Path, block: Block) -> Result<Vec<Row>, PipelineError> {
    let mut file = File::open(path).map_err(io_err(path))?;
    file.seek(SeekFrom::Start(block.offset)).map_err(io_err(path))?;
    let mut input = BufReader::new(file);
    let mut out = Vec::with_capacity(block.rows as usize);
    let mut buf = String::new();
    while (out.len() as u64) < block.rows {
        buf.clear();
        if input.read_line(&mut buf).map_err(io_err(path))? == 0 {
            break;
        }
        let text = buf.trim_end_matches(['\r', '\n']);
        if text.is_empty() {
            continue;
        }
        // line numbers are not tracked inside a block
        out.push(split_row(0, text));
    }
    Ok(out)
}
