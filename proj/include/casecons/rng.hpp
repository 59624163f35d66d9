// Copyright 2026 The Casecons Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Portable deterministic randomness. Every stochastic decision derives its
// own stream from a root seed plus a path of labels, so results never depend
// on evaluation order or thread scheduling. Only raw mt19937_64 output is
// used: standard distributions are implementation-defined.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace casecons {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  // Stream keyed by a root seed and a sequence of string/integer labels.
  template <typename... Parts>
  static Rng derive(std::uint64_t seed, const Parts&... parts) {
    std::uint64_t h = splitmix64(seed);
    (mix(h, parts), ...);
    return Rng(h);
  }

  std::uint64_t next() { return engine_(); }

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (;;) {
      std::uint64_t x = next();
      if (x < limit) return x % n;
    }
  }

  int range(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  int binomial(int n, double p) {
    int k = 0;
    for (int i = 0; i < n; ++i) k += bernoulli(p);
    return k;
  }

  // Index drawn from an unnormalized weight vector.
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (u < weights[i]) return i;
      u -= weights[i];
    }
    for (std::size_t i = weights.size(); i-- > 0;)
      if (weights[i] > 0) return i;
    return 0;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  static void mix(std::uint64_t& h, std::string_view s) { h = splitmix64(h ^ fnv1a(s)); }
  static void mix(std::uint64_t& h, const char* s) { mix(h, std::string_view(s)); }
  static void mix(std::uint64_t& h, const std::string& s) { mix(h, std::string_view(s)); }
  template <typename I, typename = std::enable_if_t<std::is_integral_v<I>>>
  static void mix(std::uint64_t& h, I v) {
    h = splitmix64(h ^ splitmix64(static_cast<std::uint64_t>(v) + 0x632be59bd9b4e019ULL));
  }

  std::mt19937_64 engine_;
};

}  // namespace casecons
