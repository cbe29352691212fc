/* Copyright 2026 The LAAR Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef LAAR_RANDOM_H_
#define LAAR_RANDOM_H_

#include <cstdint>
#include <random>

namespace laar {

// SplitMix64 output function, used to derive independent stream seeds.
std::uint64_t SplitMix64(std::uint64_t x);

// Seed of substream `stream` under a master seed.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

// Seeded random source with a fully specified output sequence. The engine is
// std::mt19937_64, whose sequence the C++ standard pins exactly; the
// distribution transforms are implemented here because the standard library
// distributions are implementation-defined. See FORMATS.md.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [lo, hi].
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);
  // Standard normal, Box-Muller with both uniforms drawn every call.
  double Normal();
  double Normal(double mean, double sigma) { return mean + sigma * Normal(); }
  // Knuth's multiplicative method.
  int Poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

}  // namespace laar

#endif  // LAAR_RANDOM_H_
