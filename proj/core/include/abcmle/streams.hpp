#pragma once

#include <cstdint>

namespace abcmle {

// Fixed key words for deriving independent substreams from one master seed
// (see derive_seed in rng.hpp). The values are arbitrary but must stay
// stable: they are part of what makes runs byte-reproducible across versions.
//
// Layout used by the drivers and the experiment harness:
//   (seed, kStreamDataset)              synthetic data generation
//   (seed, kStreamNoise)                observation corruption draws
//   (seed, kStreamFilter, pass)         one filtering pass; batch pass j uses
//                                       pass = j, the online driver uses
//                                       pass = 1 so that a frozen-parameter
//                                       online run replays batch pass 1
//   (seed, kStreamObservation, t)       per-observation estimates for models
//                                       without a latent chain
//   (seed, kStreamReplicate, r)         master seed of replicate r
inline constexpr std::uint64_t kStreamDataset = 1;
inline constexpr std::uint64_t kStreamNoise = 2;
inline constexpr std::uint64_t kStreamFilter = 3;
inline constexpr std::uint64_t kStreamObservation = 4;
inline constexpr std::uint64_t kStreamReplicate = 5;

}  // namespace abcmle
