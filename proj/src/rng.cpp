// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#include "cranhb/rng.hpp"

namespace cranhb {

namespace {

// splitmix64 finalizer; mixes a word into the stream id.
std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  std::uint64_t z = h + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_tag(std::string_view tag) {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng::Rng(std::uint64_t seed) : Rng(mix(0x243f6a8885a308d3ULL, seed), 0) {}

Rng::Rng(std::uint64_t stream_id, int) : stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32),
                    0x9e3779b9u, 0x85ebca6bu};
  engine_.seed(seq);
}

Rng Rng::child(std::string_view tag) const {
  return Rng(mix(stream_id_, hash_tag(tag)), 0);
}

Rng Rng::child(std::uint64_t index) const {
  return Rng(mix(stream_id_, index ^ 0xd1b54a32d192ed03ULL), 0);
}

double Rng::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(engine_);
}

double Rng::normal() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

Cplx Rng::cnormal() {
  const double s = 1.0 / std::sqrt(2.0);
  std::normal_distribution<double> dist(0.0, 1.0);
  const double re = dist(engine_);
  const double im = dist(engine_);
  return Cplx(re * s, im * s);
}

void Rng::fill_cnormal(Mat& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = cnormal();
}

void Rng::fill_cnormal(Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cnormal();
}

}  // namespace cranhb
