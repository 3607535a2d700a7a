//! File formats: field files, spectrum files and the on-disk kernel cache.
//!
//! Every format is a single JSON document with a fixed key order and every
//! float printed with 17 significant digits (`{:.16e}`), which round-trips
//! f64 bit-exactly; repeated writes of the same data are byte-identical.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Deserialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::coefficients::{build_folded, KernelKind};
use crate::error::{Error, Result};
use crate::sampling::SampledField;
use crate::special::HarmonicIndex;
use crate::transform::Spectrum;

/// 17-significant-digit decimal form of a finite f64; parses back to the
/// identical bits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn push_float_array(out: &mut String, values: impl Iterator<Item = f64>) {
    out.push('[');
    for (i, v) in values.enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v:.16e}");
    }
    out.push(']');
}

// ---------------------------------------------------------------------------
// Field files
// ---------------------------------------------------------------------------

pub fn field_to_string(field: &SampledField) -> String {
    let l = field.len();
    let mut out = String::with_capacity(40 * l * l + 64);
    let _ = write!(
        out,
        "{{\"L\":{l},\"a\":{},\"layout\":\"row-major\",\"re\":",
        format_f64(field.radius())
    );
    push_float_array(&mut out, field.values().iter().map(|v| v.re));
    out.push_str(",\"im\":");
    push_float_array(&mut out, field.values().iter().map(|v| v.im));
    out.push_str("}\n");
    out
}

pub fn write_field(field: &SampledField, path: &Path) -> Result<()> {
    fs::write(path, field_to_string(field))?;
    Ok(())
}

#[derive(Deserialize)]
struct FieldDoc {
    #[serde(rename = "L")]
    l: usize,
    a: f64,
    layout: String,
    re: Vec<f64>,
    im: Vec<f64>,
}

pub fn field_from_str(text: &str) -> Result<SampledField> {
    let doc: FieldDoc =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("field file: {e}")))?;
    if doc.layout != "row-major" {
        return Err(Error::Format(format!(
            "unsupported layout {:?}",
            doc.layout
        )));
    }
    let want = doc.l * doc.l;
    if doc.re.len() != want || doc.im.len() != want {
        return Err(Error::Format(format!(
            "field file: expected {want} entries, got {}/{}",
            doc.re.len(),
            doc.im.len()
        )));
    }
    let values = Array2::from_shape_vec(
        (doc.l, doc.l),
        doc.re
            .iter()
            .zip(&doc.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect(),
    )
    .expect("length checked");
    SampledField::from_values(values, doc.a)
}

pub fn read_field(path: &Path) -> Result<SampledField> {
    field_from_str(&fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Spectrum files
// ---------------------------------------------------------------------------

pub fn spectrum_to_string(spectrum: &Spectrum) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\"M\":{},\"N\":{},\"K\":{},\"a\":{},\"records\":[",
        spectrum.m_max(),
        spectrum.n_max(),
        spectrum.order(),
        format_f64(spectrum.radius())
    );
    for (i, (m, n, c)) in spectrum.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "[{m},{n},{},{}]",
            format_f64(c.re),
            format_f64(c.im)
        );
    }
    out.push_str("]}\n");
    out
}

pub fn write_spectrum(spectrum: &Spectrum, path: &Path) -> Result<()> {
    fs::write(path, spectrum_to_string(spectrum))?;
    Ok(())
}

#[derive(Deserialize)]
struct SpectrumDoc {
    #[serde(rename = "M")]
    m: i32,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: i64,
    a: f64,
    records: Vec<(i32, usize, f64, f64)>,
}

pub fn spectrum_from_str(text: &str) -> Result<Spectrum> {
    let doc: SpectrumDoc =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("spectrum file: {e}")))?;
    let mut spectrum = Spectrum::new(doc.m, doc.n, doc.k, doc.a)?;
    let want = (2 * doc.m as usize + 1) * doc.n;
    if doc.records.len() != want {
        return Err(Error::Format(format!(
            "spectrum file: expected {want} records, got {}",
            doc.records.len()
        )));
    }
    for (m, n, re, im) in doc.records {
        if m.abs() > doc.m || n < 1 || n > doc.n {
            return Err(Error::Format(format!(
                "spectrum record ({m},{n}) outside the declared block"
            )));
        }
        spectrum.set(m, n, Complex64::new(re, im));
    }
    Ok(spectrum)
}

pub fn read_spectrum(path: &Path) -> Result<Spectrum> {
    spectrum_from_str(&fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Kernel cache
// ---------------------------------------------------------------------------

fn kind_tag(kind: KernelKind) -> &'static str {
    match kind {
        KernelKind::Plain => "Q",
        KernelKind::Cross => "Qx",
    }
}

pub fn kernel_to_string(
    idx: HarmonicIndex,
    order: i64,
    kind: KernelKind,
    mat: &Array2<Complex64>,
) -> String {
    let mut out = String::with_capacity(40 * mat.len() + 64);
    let _ = write!(
        out,
        "{{\"kind\":\"{}\",\"m\":{},\"n\":{},\"K\":{order},\"re\":",
        kind_tag(kind),
        idx.m,
        idx.n
    );
    push_float_array(&mut out, mat.iter().map(|v| v.re));
    out.push_str(",\"im\":");
    push_float_array(&mut out, mat.iter().map(|v| v.im));
    out.push_str("}\n");
    out
}

#[derive(Deserialize)]
struct KernelDoc {
    kind: String,
    m: i32,
    n: usize,
    #[serde(rename = "K")]
    k: i64,
    re: Vec<f64>,
    im: Vec<f64>,
}

pub fn kernel_from_str(
    text: &str,
    idx: HarmonicIndex,
    order: i64,
    kind: KernelKind,
) -> Result<Array2<Complex64>> {
    let doc: KernelDoc =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("kernel file: {e}")))?;
    if doc.kind != kind_tag(kind) || doc.m != idx.m || doc.n != idx.n || doc.k != order {
        return Err(Error::Format(format!(
            "kernel header ({},{},{},K={}) does not match the requested ({},{},{},K={order})",
            doc.kind,
            doc.m,
            doc.n,
            doc.k,
            kind_tag(kind),
            idx.m,
            idx.n
        )));
    }
    let l = (2 * order + 1) as usize;
    if doc.re.len() != l * l || doc.im.len() != l * l {
        return Err(Error::Format(format!(
            "kernel file: expected {} entries, got {}/{}",
            l * l,
            doc.re.len(),
            doc.im.len()
        )));
    }
    Ok(Array2::from_shape_vec(
        (l, l),
        doc.re
            .iter()
            .zip(&doc.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect(),
    )
    .expect("length checked"))
}

/// On-disk cache of folded kernel matrices keyed by `(kind, m, n, K)`.
pub struct KernelStore {
    dir: PathBuf,
}

impl KernelStore {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn path_for(&self, idx: HarmonicIndex, order: i64, kind: KernelKind) -> PathBuf {
        self.dir.join(format!(
            "{}_m{}_n{}_K{}.json",
            kind_tag(kind),
            idx.m,
            idx.n,
            order
        ))
    }

    /// Build the kernel and write it; overwrites an existing entry with
    /// identical bytes (the build is deterministic).
    pub fn store(&self, idx: HarmonicIndex, order: i64, kind: KernelKind) -> Result<PathBuf> {
        let mat = build_folded(idx, order, kind)?;
        let path = self.path_for(idx, order, kind);
        fs::write(&path, kernel_to_string(idx, order, kind, &mat))?;
        Ok(path)
    }

    /// Load a cached kernel, or build and cache it.
    pub fn get_or_build(
        &self,
        idx: HarmonicIndex,
        order: i64,
        kind: KernelKind,
    ) -> Result<Array2<Complex64>> {
        let path = self.path_for(idx, order, kind);
        if path.exists() {
            return kernel_from_str(&fs::read_to_string(&path)?, idx, order, kind);
        }
        let mat = build_folded(idx, order, kind)?;
        fs::write(&path, kernel_to_string(idx, order, kind, &mat))?;
        Ok(mat)
    }
}
