/*
 * Copyright 2026 The dcnsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>

#include "dcnsim/deform.hpp"

namespace dcnsim {

/// Synthetic stand-in for trained offsets. skew = 0 gives the zero field. Otherwise
/// samples are pulled toward three seeded hotspots (strength skew / (skew + 2),
/// Gaussian falloff over a quarter of the map) plus Student-t(3) jitter of scale
/// 0.5 * skew truncated at 2 * K * skew. Deterministic in (seed, layer).
/// Throws DomainError for negative or non-finite skew.
OffsetField gen_offsets(const WindowGeometry& window, DcnVariant variant, std::uint64_t seed,
                        std::size_t layer, double skew);

}  // namespace dcnsim
