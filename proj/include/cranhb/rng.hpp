// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "cranhb/types.hpp"

namespace cranhb {

/// Seeded random stream with hierarchical splitting.
///
/// Every stochastic draw in the project derives from a single 64-bit master
/// seed through a path of child() calls, e.g.
///   Rng root(seed);
///   Rng trial = root.child("trial").child(t);
///   Rng pilots = trial.child("pilot-noise");
/// child() does not consume parent state, so sibling streams are independent
/// of the order in which they are created and trials can run in parallel.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng child(std::string_view tag) const;
  Rng child(std::uint64_t index) const;

  double uniform(double lo, double hi);
  double normal();   // N(0, 1)
  Cplx cnormal();    // CN(0, 1): real/imag parts N(0, 1/2)

  // Fill with i.i.d. CN(0,1) entries, column-major order.
  void fill_cnormal(Mat& m);
  void fill_cnormal(Vec& v);

  std::uint64_t stream_id() const { return stream_id_; }
  std::mt19937_64& engine() { return engine_; }

 private:
  Rng(std::uint64_t stream_id, int);  // internal: seed from derived id

  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace cranhb
