//! RIFF/WAVE ingestion for 16-bit PCM, mono or stereo.
//!
//! The parser walks the chunk list, skips anything that is not `fmt ` or
//! `data`, and honors the declared `data` length even when the file carries
//! trailing bytes after it. Stereo input is averaged down to mono.

use super::{AudioClip, AudioError, MAX_SAMPLE_RATE, MIN_SAMPLE_RATE};

const PCM_FORMAT: u16 = 1;
const NORMALIZER: f64 = 32768.0;

#[derive(Debug, Clone, Copy)]
struct FmtChunk {
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
    block_align: u16,
}

fn read_u16(bytes: &[u8], at: usize) -> Option<u16> {
    bytes.get(at..at + 2).map(|b| u16::from_le_bytes([b[0], b[1]]))
}

fn read_u32(bytes: &[u8], at: usize) -> Option<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
}

fn parse_fmt(body: &[u8]) -> Result<FmtChunk, AudioError> {
    if body.len() < 16 {
        return Err(AudioError::MalformedRiff("fmt chunk shorter than 16 bytes".into()));
    }
    // Lengths were checked above, the reads cannot fail.
    let format = read_u16(body, 0).unwrap_or_default();
    let channels = read_u16(body, 2).unwrap_or_default();
    let sample_rate = read_u32(body, 4).unwrap_or_default();
    let block_align = read_u16(body, 12).unwrap_or_default();
    let bits_per_sample = read_u16(body, 14).unwrap_or_default();

    if format != PCM_FORMAT {
        return Err(AudioError::UnsupportedFormat(format!(
            "audio format code {format} (only PCM = 1 is accepted)"
        )));
    }
    if bits_per_sample != 16 {
        return Err(AudioError::UnsupportedFormat(format!(
            "{bits_per_sample} bits per sample (only 16 is accepted)"
        )));
    }
    if !(1..=2).contains(&channels) {
        return Err(AudioError::UnsupportedFormat(format!("{channels} channels")));
    }
    if !(MIN_SAMPLE_RATE..=MAX_SAMPLE_RATE).contains(&sample_rate) {
        return Err(AudioError::UnsupportedFormat(format!(
            "sample rate {sample_rate} Hz outside [{MIN_SAMPLE_RATE}, {MAX_SAMPLE_RATE}]"
        )));
    }
    if block_align != channels * 2 {
        return Err(AudioError::MalformedRiff(format!(
            "block align {block_align} inconsistent with {channels} channel(s) of 16-bit PCM"
        )));
    }
    Ok(FmtChunk {
        channels,
        sample_rate,
        bits_per_sample,
        block_align,
    })
}

/// Parses a WAV byte buffer into a mono clip normalized to `[-1, 1)`.
///
/// Total over arbitrary input: every failure is reported as a typed
/// [`AudioError`].
pub fn parse_wav(bytes: &[u8], source_id: impl Into<String>) -> Result<AudioClip, AudioError> {
    if bytes.len() < 12 {
        return Err(AudioError::MalformedRiff("shorter than a RIFF header".into()));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(AudioError::MalformedRiff("missing RIFF magic".into()));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(AudioError::MalformedRiff("missing WAVE form type".into()));
    }

    let mut fmt: Option<FmtChunk> = None;
    let mut pos = 12usize;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = read_u32(bytes, pos + 4).unwrap_or_default() as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .ok_or_else(|| AudioError::MalformedRiff("chunk size overflow".into()))?;

        match id {
            b"fmt " => {
                if body_end > bytes.len() {
                    return Err(AudioError::MalformedRiff("truncated fmt chunk".into()));
                }
                fmt = Some(parse_fmt(&bytes[body_start..body_end])?);
            }
            b"data" => {
                let fmt = fmt.ok_or_else(|| AudioError::MalformedRiff("data chunk precedes fmt chunk".into()))?;
                if body_end > bytes.len() {
                    return Err(AudioError::MalformedRiff(format!(
                        "data chunk declares {size} bytes but only {} remain",
                        bytes.len() - body_start
                    )));
                }
                return decode_samples(&bytes[body_start..body_end], fmt, source_id.into());
            }
            _ => {}
        }
        // Chunks are padded to even length.
        pos = body_end
            .checked_add(size & 1)
            .ok_or_else(|| AudioError::MalformedRiff("chunk size overflow".into()))?;
    }
    Err(AudioError::MalformedRiff("no data chunk".into()))
}

fn decode_samples(data: &[u8], fmt: FmtChunk, source_id: String) -> Result<AudioClip, AudioError> {
    debug_assert_eq!(fmt.bits_per_sample, 16);
    let frame_bytes = fmt.block_align as usize;
    let frames = data.len() / frame_bytes;
    if frames == 0 {
        return Err(AudioError::EmptyAudio);
    }
    let channels = fmt.channels as usize;
    let samples = data
        .chunks_exact(frame_bytes)
        .map(|frame| {
            let sum: f64 = frame
                .chunks_exact(2)
                .map(|s| f64::from(i16::from_le_bytes([s[0], s[1]])))
                .sum();
            sum / channels as f64 / NORMALIZER
        })
        .collect();
    Ok(AudioClip {
        sample_rate: fmt.sample_rate,
        samples,
        source_id,
    })
}

/// Serializes a clip as mono 16-bit PCM WAV.
///
/// Samples are mapped back with `round(s * 32768)` and saturated to the
/// i16 range, so a parsed clip writes back to the identical byte payload.
pub fn write_wav(clip: &AudioClip) -> Vec<u8> {
    let data_len = clip.samples.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&PCM_FORMAT.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&clip.sample_rate.to_le_bytes());
    out.extend_from_slice(&(clip.sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in &clip.samples {
        let q = (s * NORMALIZER).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    out
}
