#pragma once

#include "cltlab/samplers.hpp"

#include <filesystem>

namespace cltlab {

/// Binary layout (all integers and floats little-endian):
///   8 bytes  magic "CLTLAB01"
///   u64 n, u64 m, u64 seed, u64 stream_id, u64 burn_in, u64 thinning
///   u32 sampler_id length, then that many bytes
///   m * n float64 values, row-major
void write_batch_binary(const SampleBatch& batch, const std::filesystem::path& path);
SampleBatch read_batch_binary(const std::filesystem::path& path);

/// Text form for small batches: a '#' header line carrying the provenance,
/// a column header x0,...,x{n-1}, then one row per sample.
void write_batch_csv(const SampleBatch& batch, const std::filesystem::path& path);
SampleBatch read_batch_csv(const std::filesystem::path& path);

}  // namespace cltlab
