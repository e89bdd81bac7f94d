#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace roughvol {

/// Philox 4x64, 10 rounds. Stateless counter-based generator: a (counter, key)
/// pair maps to four 64-bit words, so any draw in a stream can be produced
/// without generating its predecessors and bit-identical output is independent
/// of how work is split across threads.
namespace philox4x64 {

using Counter = std::array<std::uint64_t, 4>;
using Key = std::array<std::uint64_t, 2>;
using Block = std::array<std::uint64_t, 4>;

Block generate(const Counter& counter, const Key& key);

}  // namespace philox4x64

double normal_pdf(double x);

/// Phi(x) through the complementary error function; accurate to a few ulp
/// across the whole double range, including far tails.
double normal_cdf(double x);

/// Inverse of normal_cdf on (0, 1). Wichura's AS241 (PPND16) rational
/// approximations, relative accuracy about 1e-15. Out-of-range p throws.
double normal_quantile(double p);

/// Deterministic stream of standard normals keyed by (seed, batch_index).
/// Draw i of a stream is a pure function of (seed, batch_index, i): uniform
/// from Philox word i, then inverse-CDF transform. Identical on every
/// platform with IEEE doubles.
class NormalStream {
  public:
    NormalStream(std::uint64_t seed, std::uint64_t batch_index)
        : key_{seed, 0x726f756768766f6cULL}, batch_(batch_index) {}

    /// Fills `out` with the next out.size() draws of the stream.
    void fill(std::span<double> out);

    double next();

  private:
    philox4x64::Key key_;
    std::uint64_t batch_;
    std::uint64_t next_block_ = 0;
    philox4x64::Block buffer_{};
    unsigned buffered_ = 0;  // valid words remaining in buffer_ (from the back)
};

}  // namespace roughvol
