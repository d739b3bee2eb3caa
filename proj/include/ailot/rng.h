// Copyright 2026 The AILOT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AILOT_RNG_H_
#define AILOT_RNG_H_

#include <cstdint>
#include <random>

namespace ailot {

// Seeded random source. Only the raw std::mt19937_64 stream is used, so the
// derived draws are reproducible across standard library implementations
// (the std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();

  // Uniform on {0, ..., n - 1}; n must be positive.
  std::uint64_t UniformInt(std::uint64_t n);

  // Number of failures before the first success, success probability p in
  // (0, 1]. p == 1 always yields 0.
  int Geometric(double p);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ailot

#endif  // AILOT_RNG_H_
