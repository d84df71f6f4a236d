#include "tidagcn/graph/bucketizer.hpp"

#include <algorithm>

#include "tidagcn/numeric/errors.hpp"

namespace tidagcn {

std::string to_string(BucketScheme scheme) {
  return scheme == BucketScheme::Linear ? "linear" : "log2";
}

BucketScheme parse_bucket_scheme(const std::string& name) {
  if (name == "linear") return BucketScheme::Linear;
  if (name == "log2") return BucketScheme::Log2;
  throw ConfigError("unknown bucket scheme '" + name + "' (expected linear or log2)");
}

void IntervalBucketizer::validate() const {
  if (clip_min < 1) throw ConfigError("bucket clip_min must be >= 1");
  if (clip_max <= clip_min) throw ConfigError("bucket clip_max must exceed clip_min");
  if (n_buckets == 0) throw ConfigError("bucket count must be >= 1");
}

std::size_t IntervalBucketizer::bucket(std::int64_t delta_seconds) const {
  const std::int64_t clipped = std::clamp(delta_seconds, clip_min, clip_max);
  if (clipped >= clip_max) return n_buckets - 1;
  std::size_t b = 0;
  if (scheme == BucketScheme::Log2) {
    // Largest b with clip_min * 2^b <= clipped, in exact integer arithmetic.
    std::int64_t edge = clip_min;
    while (edge <= clipped / 2) {
      edge *= 2;
      ++b;
    }
  } else {
    const auto span = static_cast<unsigned __int128>(clip_max - clip_min);
    const auto offset = static_cast<unsigned __int128>(clipped - clip_min);
    b = static_cast<std::size_t>(offset * n_buckets / span);
  }
  return std::min(b, n_buckets - 1);
}

}  // namespace tidagcn
