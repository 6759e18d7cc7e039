use std::io::Cursor;

use crate::error::{Error, Result};

/// A run of consecutive mono samples scaled to `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AudioFrame {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
    pub start_time: f64,
}

/// Decode a 16-bit PCM mono WAV file into samples in `[-1, 1]`.
pub fn decode_pcm16(bytes: &[u8]) -> Result<(u32, Vec<f64>)> {
    let reader = hound::WavReader::new(Cursor::new(bytes)).map_err(map_hound)?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::UnsupportedFormat {
            field: "channels",
            value: spec.channels.to_string(),
        });
    }
    if spec.sample_format != hound::SampleFormat::Int {
        return Err(Error::UnsupportedFormat {
            field: "sample_format",
            value: "float".into(),
        });
    }
    if spec.bits_per_sample != 16 {
        return Err(Error::UnsupportedFormat {
            field: "bits_per_sample",
            value: spec.bits_per_sample.to_string(),
        });
    }
    if spec.sample_rate == 0 {
        return Err(Error::UnsupportedFormat {
            field: "sample_rate",
            value: "0".into(),
        });
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| f64::from(v) / 32768.0).map_err(map_hound))
        .collect::<Result<Vec<_>>>()?;
    Ok((spec.sample_rate, samples))
}

/// Split a WAV byte stream into non-overlapping frames of
/// `round(frame_duration * rate)` samples. A trailing partial frame is
/// dropped.
pub fn decode_and_frame(bytes: &[u8], frame_duration: f64) -> Result<Vec<AudioFrame>> {
    let (rate, samples) = decode_pcm16(bytes)?;
    frame_samples(&samples, rate, frame_duration)
}

pub fn frame_samples(samples: &[f64], rate: u32, frame_duration: f64) -> Result<Vec<AudioFrame>> {
    let len = frame_len(rate, frame_duration)?;
    Ok(samples
        .chunks_exact(len)
        .enumerate()
        .map(|(i, chunk)| AudioFrame {
            samples: chunk.to_vec(),
            sample_rate: rate,
            start_time: (i * len) as f64 / f64::from(rate),
        })
        .collect())
}

pub fn frame_len(rate: u32, frame_duration: f64) -> Result<usize> {
    let len = (frame_duration * f64::from(rate)).round();
    if len.is_nan() || len < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "frame duration {frame_duration} s gives no samples at {rate} Hz"
        )));
    }
    Ok(len as usize)
}

/// Encode samples in `[-1, 1]` as a 16-bit PCM mono WAV file.
pub fn encode_pcm16(samples: &[f64], sample_rate: u32) -> Vec<u8> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut out = Cursor::new(Vec::new());
    {
        let mut writer = hound::WavWriter::new(&mut out, spec).expect("in-memory writer");
        for &s in samples {
            let v = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
            writer.write_sample(v).expect("in-memory write");
        }
        writer.finalize().expect("in-memory finalize");
    }
    out.into_inner()
}

fn map_hound(e: hound::Error) -> Error {
    match e {
        hound::Error::Unsupported => Error::UnsupportedFormat {
            field: "format",
            value: "unsupported WAV encoding".into(),
        },
        other => Error::AudioParse(other.to_string()),
    }
}
