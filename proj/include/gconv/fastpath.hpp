#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <variant>
#include <vector>

#include "gconv/conv.hpp"

namespace gconv {

namespace fft {

using Complex = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place iterative radix-2 transform. The inverse includes the 1/n factor.
inline void transform(std::vector<Complex>& a, bool inverse = false) {
  const std::size_t n = a.size();
  require(is_power_of_two(n), ErrorKind::InvalidArgument, "transform length must be a power of two");
  if (n == 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  std::vector<Complex> roots(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    roots[k] = Complex(std::cos(angle), std::sin(angle));
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2, stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex u = a[start + k];
        const Complex v = a[start + k + half] * roots[k * stride];
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= scale;
  }
}

/// Linear convolution of two real sequences through a zero-padded transform.
inline std::vector<double> linear_convolve(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out = a.size() + b.size() - 1;
  const std::size_t n = next_power_of_two(out);
  std::vector<Complex> fa(n), fb(n);
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  transform(fa);
  transform(fb);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  transform(fa, true);
  std::vector<double> c(out);
  for (std::size_t i = 0; i < out; ++i) c[i] = fa[i].real();
  return c;
}

}  // namespace fft

struct Circular {
  std::int64_t n;
  bool operator==(const Circular&) const = default;
};

struct CompactOnIntegers {
  std::int64_t offset;
  bool operator==(const CompactOnIntegers&) const = default;
};

/// Dense mirror of a scalar function on Cyclic(n) or a contiguous window of Z.
struct DenseSignal {
  std::vector<double> values;
  std::variant<Circular, CompactOnIntegers> layout;

  bool circular() const noexcept { return std::holds_alternative<Circular>(layout); }
};

inline DenseSignal to_dense(const SampledFunction& f) {
  require(f.vdim() == 1, ErrorKind::DimensionMismatch, "dense signals are scalar");
  const GroupSpace& G = f.group();
  if (G.kind() == GroupKind::Cyclic) {
    DenseSignal d{std::vector<double>(static_cast<std::size_t>(G.modulus()), 0.0), Circular{G.modulus()}};
    for (std::size_t i = 0; i < f.size(); ++i) d.values[static_cast<std::size_t>(f.point(i)[0])] = f.value(i)[0];
    return d;
  }
  require(G.kind() == GroupKind::Integers, ErrorKind::SpaceMismatch,
          "dense signals live on Z or Zn, got " + G.to_string());
  if (f.empty()) return DenseSignal{{0.0}, CompactOnIntegers{0}};
  const std::int64_t lo = f.point(0)[0], hi = f.point(f.size() - 1)[0];
  DenseSignal d{std::vector<double>(static_cast<std::size_t>(hi - lo + 1), 0.0), CompactOnIntegers{lo}};
  for (std::size_t i = 0; i < f.size(); ++i) d.values[static_cast<std::size_t>(f.point(i)[0] - lo)] = f.value(i)[0];
  return d;
}

inline SampledFunction to_sampled(const DenseSignal& d) {
  const GroupSpace G =
      d.circular() ? GroupSpace::cyclic(std::get<Circular>(d.layout).n) : GroupSpace::integers();
  const std::int64_t offset = d.circular() ? 0 : std::get<CompactOnIntegers>(d.layout).offset;
  return SampledFunction::from_sequence(G, offset, d.values);
}

namespace detail {
inline void check_layouts(const DenseSignal& a, const DenseSignal& b) {
  require(!a.values.empty() && !b.values.empty(), ErrorKind::InvalidArgument, "dense signals must be nonempty");
  require(a.circular() == b.circular(), ErrorKind::SpaceMismatch, "cannot convolve circular with compact signals");
  if (a.circular()) {
    const auto n = std::get<Circular>(a.layout).n;
    require(n == std::get<Circular>(b.layout).n && a.values.size() == static_cast<std::size_t>(n) &&
                b.values.size() == static_cast<std::size_t>(n),
            ErrorKind::SpaceMismatch, "circular signals must share their length");
  }
}

inline DenseSignal fold(std::vector<double> linear, const DenseSignal& a, const DenseSignal& b) {
  if (a.circular()) {
    const auto n = static_cast<std::size_t>(std::get<Circular>(a.layout).n);
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < linear.size(); ++i) out[i % n] += linear[i];
    return DenseSignal{std::move(out), a.layout};
  }
  const auto offset = std::get<CompactOnIntegers>(a.layout).offset + std::get<CompactOnIntegers>(b.layout).offset;
  return DenseSignal{std::move(linear), CompactOnIntegers{offset}};
}
}  // namespace detail

/// Cyclic (equal n) or linear (offsets add) convolution by transform, multiply, inverse.
inline DenseSignal fast_convolve(const DenseSignal& a, const DenseSignal& b) {
  detail::check_layouts(a, b);
  return detail::fold(fft::linear_convolve(a.values, b.values), a, b);
}

/// Direct double loop; same layout rules as fast_convolve.
inline DenseSignal naive_convolve(const DenseSignal& a, const DenseSignal& b) {
  detail::check_layouts(a, b);
  std::vector<double> c(a.values.size() + b.values.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double ai = a.values[i];
    for (std::size_t j = 0; j < b.values.size(); ++j) c[i + j] += ai * b.values[j];
  }
  return detail::fold(std::move(c), a, b);
}

/// max |a - b| / (|x|_2 |y|_2), where x and y were convolved. Every output
/// entry is bounded by |x|_2 |y|_2, which makes this a relative error.
inline double scaled_deviation(std::span<const double> a, std::span<const double> b, double input_scale) {
  double dev = 0;
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double u = i < a.size() ? a[i] : 0.0, v = i < b.size() ? b[i] : 0.0;
    dev = std::max(dev, std::abs(u - v));
  }
  return input_scale > 0 ? dev / input_scale : dev;
}

/// Mul or ScalarSmul pairing, counting measure, Standard variant, on Z or Zn.
inline bool fast_path_applicable(const ConvRequest& r) {
  const auto kind = r.group().kind();
  const auto pk = r.pairing.kind();
  return (kind == GroupKind::Integers || kind == GroupKind::Cyclic) && r.measure.kind() == WeightKind::Counting &&
         r.variant == Variant::Standard && (pk == Pairing::Kind::Mul || pk == Pairing::Kind::ScalarSmul);
}

/// Transform-based convolution for requests that pass fast_path_applicable.
/// Entries within the transform's rounding floor are returned as exact zeros.
inline SampledFunction convolve_fast(const ConvRequest& r) {
  r.validate();
  require(fast_path_applicable(r), ErrorKind::InvalidArgument, "request is not eligible for the fast path");
  const GroupSpace& G = r.group();
  const std::size_t m = r.g.vdim();
  if (r.f.empty() || r.g.empty()) return SampledFunction(G, m);

  const DenseSignal a = to_dense(r.f);
  const double na = norm2(a.values);
  std::vector<std::vector<double>> parts(m);
  std::int64_t offset = 0;
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<std::pair<GroupPoint, double>> comp;
    for (std::size_t i = 0; i < r.g.size(); ++i) comp.emplace_back(r.g.point(i), r.g.value(i)[k]);
    DenseSignal b;
    if (G.kind() == GroupKind::Cyclic) {
      b = to_dense(SampledFunction::scalar(G, comp));
    } else {
      // keep every component on the window of supp g so offsets line up
      const std::int64_t lo = r.g.point(0)[0], hi = r.g.point(r.g.size() - 1)[0];
      b = DenseSignal{std::vector<double>(static_cast<std::size_t>(hi - lo + 1), 0.0), CompactOnIntegers{lo}};
      for (const auto& [p, v] : comp) b.values[static_cast<std::size_t>(p[0] - lo)] = v;
    }
    auto c = fast_convolve(a, b);
    const double len = static_cast<double>(fft::next_power_of_two(a.values.size() + b.values.size() - 1));
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::log2(len)) * na *
                         norm2(b.values);
    for (auto& v : c.values)
      if (std::abs(v) <= floor) v = 0.0;
    if (!c.circular()) offset = std::get<CompactOnIntegers>(c.layout).offset;
    parts[k] = std::move(c.values);
  }

  const std::size_t len = parts[0].size();
  std::vector<GroupPoint> pts;
  std::vector<double> vals;
  for (std::size_t i = 0; i < len; ++i) {
    bool any = false;
    for (std::size_t k = 0; k < m; ++k) any = any || parts[k][i] != 0.0;
    if (!any) continue;
    pts.push_back(G.point({static_cast<std::int64_t>(i) + offset}));
    for (std::size_t k = 0; k < m; ++k) vals.push_back(parts[k][i]);
  }
  return SampledFunction(G, m, std::move(pts), std::move(vals));
}

/// Fast path when eligible, otherwise the direct sum.
inline SampledFunction convolve_auto(const ConvRequest& r, Execution exec = {}) {
  if (fast_path_applicable(r)) return convolve_fast(r);
  return convolve(r, exec);
}

struct BenchRow {
  std::size_t size = 0;
  double naive_ms = 0;
  double fast_ms = 0;
  double max_deviation = 0;
};

/// Median wall-clock times of the direct double loop and the transform path on
/// random compact signals of each size, single-threaded.
inline std::vector<BenchRow> bench(const std::vector<std::size_t>& sizes, int trials, std::uint64_t seed = 0x5eed) {
  require(trials >= 1, ErrorKind::InvalidArgument, "bench needs at least one trial");
  for (auto s : sizes) require(s >= 64, ErrorKind::InvalidArgument, "bench sizes must be at least 64");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  using Clock = std::chrono::steady_clock;
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };

  std::vector<BenchRow> rows;
  for (auto size : sizes) {
    BenchRow row{size, 0, 0, 0};
    std::vector<double> naive_t, fast_t;
    for (int t = 0; t < trials; ++t) {
      DenseSignal a{std::vector<double>(size), CompactOnIntegers{0}}, b{std::vector<double>(size), CompactOnIntegers{0}};
      for (auto& v : a.values) v = dist(rng);
      for (auto& v : b.values) v = dist(rng);

      const auto t0 = Clock::now();
      const auto slow = naive_convolve(a, b);
      const auto t1 = Clock::now();
      const auto fast = fast_convolve(a, b);
      const auto t2 = Clock::now();

      naive_t.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      fast_t.push_back(std::chrono::duration<double, std::milli>(t2 - t1).count());
      row.max_deviation = std::max(
          row.max_deviation, scaled_deviation(fast.values, slow.values, norm2(a.values) * norm2(b.values)));
    }
    row.naive_ms = median(naive_t);
    row.fast_ms = median(fast_t);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gconv
