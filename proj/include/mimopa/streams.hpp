// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace mimopa::stream_tag {

// Substream tags keep every random purpose on its own independent stream
// under one master seed, keyed by trial index. Channels deliberately ignore
// SNR, allocator, and precoder so that all of them see identical channel
// draws (common random numbers).
inline constexpr std::uint64_t channel = 1;
inline constexpr std::uint64_t csit_error = 2;
inline constexpr std::uint64_t random_alloc = 3;
inline constexpr std::uint64_t symbols = 4;
inline constexpr std::uint64_t noise = 5;

}  // namespace mimopa::stream_tag
