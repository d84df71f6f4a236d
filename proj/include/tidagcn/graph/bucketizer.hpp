#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace tidagcn {

enum class BucketScheme { Linear, Log2 };

std::string to_string(BucketScheme scheme);
BucketScheme parse_bucket_scheme(const std::string& name);

// Maps a raw inter-event gap to a learnable-embedding bucket.
//
// Gaps are clipped to [clip_min, clip_max]. A gap at or above clip_max always
// lands in the last bucket. Below that, Log2 gives floor(log2(gap / clip_min))
// and Linear splits [clip_min, clip_max) into n_buckets equal bins; both are
// capped at n_buckets - 1, so the map is monotone.
struct IntervalBucketizer {
  std::int64_t clip_min = 60;
  std::int64_t clip_max = std::int64_t{1} << 20;
  BucketScheme scheme = BucketScheme::Log2;
  std::size_t n_buckets = 21;

  // Throws ConfigError on clip_min < 1, clip_max <= clip_min or n_buckets == 0.
  void validate() const;
  std::size_t bucket(std::int64_t delta_seconds) const;
};

inline std::size_t bucket_interval(std::int64_t delta_seconds, const IntervalBucketizer& b) {
  return b.bucket(delta_seconds);
}

}  // namespace tidagcn
