// Copyright 2026 The thzsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace thz {

/// Affine map of physical values onto [0, 1] using a (min, max) pair.
struct Normalization {
  double min = 0.0;
  double max = 1.0;

  double normalize(double v) const { return (v - min) / (max - min); }
  // exact at both ends: 0 -> min, 1 -> max
  double denormalize(double v) const { return (1.0 - v) * min + v * max; }

  friend bool operator==(const Normalization&, const Normalization&) = default;
};

}  // namespace thz
