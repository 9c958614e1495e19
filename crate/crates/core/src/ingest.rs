//! MNIST IDX files and the two-class encoded dataset.
//!
//! Images: big-endian `0x00000803`, count, rows, cols, then count·784 bytes.
//! Labels: big-endian `0x00000801`, count, then count bytes.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;
use log::info;

use crate::encoding::{downsample, normalize, EncodedInput, IMAGE_SIDE};
use crate::error::{Error, IdxError, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
const PIXELS: usize = IMAGE_SIDE * IMAGE_SIDE;

/// One 28×28 grayscale image, row-major.
pub type Image = Vec<u8>;

fn be_u32(bytes: &[u8], offset: usize) -> u32 {
    u32::from_be_bytes(bytes[offset..offset + 4].try_into().unwrap())
}

fn check_payload(bytes: &[u8], header: usize, payload: usize) -> Result<(), IdxError> {
    let expected = header + payload;
    match bytes.len() {
        got if got < expected => Err(IdxError::TruncatedPayload { expected, got }),
        got if got > expected => Err(IdxError::TrailingData { expected, got }),
        _ => Ok(()),
    }
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<Vec<Image>, IdxError> {
    if bytes.len() < 4 {
        return Err(IdxError::TruncatedHeader { got: bytes.len() });
    }
    match be_u32(bytes, 0) {
        IMAGE_MAGIC => {}
        LABEL_MAGIC => return Err(IdxError::LabelMagicInImageFile),
        other => return Err(IdxError::BadMagic(other)),
    }
    if bytes.len() < 16 {
        return Err(IdxError::TruncatedHeader { got: bytes.len() });
    }
    let count = be_u32(bytes, 4) as usize;
    let (rows, cols) = (be_u32(bytes, 8), be_u32(bytes, 12));
    if rows as usize != IMAGE_SIDE || cols as usize != IMAGE_SIDE {
        return Err(IdxError::Dimensions { rows, cols });
    }
    check_payload(bytes, 16, count * PIXELS)?;
    Ok(bytes[16..].chunks_exact(PIXELS).map(<[u8]>::to_vec).collect())
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>, IdxError> {
    if bytes.len() < 4 {
        return Err(IdxError::TruncatedHeader { got: bytes.len() });
    }
    match be_u32(bytes, 0) {
        LABEL_MAGIC => {}
        IMAGE_MAGIC => return Err(IdxError::ImageMagicInLabelFile),
        other => return Err(IdxError::BadMagic(other)),
    }
    if bytes.len() < 8 {
        return Err(IdxError::TruncatedHeader { got: bytes.len() });
    }
    let count = be_u32(bytes, 4) as usize;
    check_payload(bytes, 8, count)?;
    let labels = bytes[8..].to_vec();
    if let Some((index, &value)) = labels.iter().enumerate().find(|(_, &l)| l > 9) {
        return Err(IdxError::LabelRange { index, value });
    }
    Ok(labels)
}

pub fn serialize_idx_images(images: &[Image]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.len() * PIXELS);
    for word in [IMAGE_MAGIC, images.len() as u32, IMAGE_SIDE as u32, IMAGE_SIDE as u32] {
        out.extend(word.to_be_bytes());
    }
    for image in images {
        out.extend(image);
    }
    out
}

pub fn serialize_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend(LABEL_MAGIC.to_be_bytes());
    out.extend((labels.len() as u32).to_be_bytes());
    out.extend(labels);
    out
}

/// Reads a file, gunzipping it when the name ends in `.gz`.
pub fn read_maybe_gz(path: &Path) -> Result<Vec<u8>> {
    let io_err = |e: std::io::Error| Error::Io { path: path.display().to_string(), message: e.to_string() };
    let mut file = File::open(path).map_err(io_err)?;
    let mut bytes = Vec::new();
    if path.extension().is_some_and(|ext| ext == "gz") {
        GzDecoder::new(file).read_to_end(&mut bytes).map_err(io_err)?;
    } else {
        file.read_to_end(&mut bytes).map_err(io_err)?;
    }
    Ok(bytes)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub images: Vec<Image>,
    pub labels: Vec<u8>,
}

impl Dataset {
    pub fn new(images: Vec<Image>, labels: Vec<u8>) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(IdxError::CountMismatch { images: images.len(), labels: labels.len() }.into());
        }
        Ok(Dataset { images, labels })
    }

    pub fn from_idx(image_bytes: &[u8], label_bytes: &[u8]) -> Result<Self> {
        Self::new(parse_idx_images(image_bytes)?, parse_idx_labels(label_bytes)?)
    }

    pub fn load(images: &Path, labels: &Path) -> Result<Self> {
        Self::from_idx(&read_maybe_gz(images)?, &read_maybe_gz(labels)?)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// The digit pair of a binary task; `first` maps to class 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassPair {
    pub first: u8,
    pub second: u8,
}

impl ClassPair {
    pub fn new(first: u8, second: u8) -> Result<Self> {
        if first >= second || second > 9 {
            return Err(Error::InvalidClassPair(first, second));
        }
        Ok(ClassPair { first, second })
    }

    pub fn binary_label(&self, digit: u8) -> Option<usize> {
        match digit {
            d if d == self.first => Some(0),
            d if d == self.second => Some(1),
            _ => None,
        }
    }
}

impl Default for ClassPair {
    fn default() -> Self {
        ClassPair { first: 3, second: 6 }
    }
}

/// One encoded image with its binary label and position in the source file.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub source_index: usize,
    pub input: EncodedInput,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedSet {
    pub samples: Vec<Sample>,
    /// Images of the pair whose pooled pixels were all zero.
    pub dropped: usize,
}

/// Keeps the two classes of `pair`, pools and normalizes each image.
pub fn filter_and_encode(dataset: &Dataset, pair: ClassPair) -> Result<EncodedSet> {
    let mut samples = Vec::new();
    let mut dropped = 0;
    for (source_index, (image, &digit)) in dataset.images.iter().zip(&dataset.labels).enumerate() {
        let Some(label) = pair.binary_label(digit) else {
            continue;
        };
        match normalize(&downsample(image)?) {
            Ok(input) => samples.push(Sample { source_index, input, label }),
            Err(Error::ZeroVector) => dropped += 1,
            Err(e) => return Err(e),
        }
    }
    if dropped > 0 {
        info!("dropped {dropped} blank images");
    }
    Ok(EncodedSet { samples, dropped })
}
