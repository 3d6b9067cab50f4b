#include "pvff/dwt.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace pvff::dwt {

namespace {

// Daubechies scaling coefficients (orthonormal normalisation, sum = sqrt(2)).
constexpr std::array<double, 2> kHaar = {0.7071067811865476, 0.7071067811865476};

constexpr std::array<double, 4> kDb2 = {0.48296291314453416, 0.8365163037378079,
                                        0.2241438680420134, -0.12940952255126037};

constexpr std::array<double, 8> kDb4 = {
    0.2303778133088965,   0.7148465705529157,   0.6308807679298589,  -0.027983769416859854,
    -0.18703481171909309, 0.030841381835560764, 0.0328830116668852,  -0.010597401785069032};

template <std::size_t N>
WaveletSpec make_spec(WaveletName name, const std::array<double, N>& h) {
  WaveletSpec spec{name, std::vector<double>(h.begin(), h.end()), std::vector<double>(N)};
  for (std::size_t k = 0; k < N; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    spec.highpass[k] = sign * h[N - 1 - k];
  }
  return spec;
}

// Half-sample symmetric reflection of an arbitrary index into [0, n).
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  i %= period;
  if (i < 0) i += period;
  return i < static_cast<std::ptrdiff_t>(n) ? static_cast<std::size_t>(i)
                                            : static_cast<std::size_t>(period - 1 - i);
}

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  i %= m;
  return static_cast<std::size_t>(i < 0 ? i + m : i);
}

void analyze(std::span<const double> x, const WaveletSpec& w, BoundaryMode mode,
             std::vector<double>& approx, std::vector<double>& detail) {
  const std::size_t n = x.size();
  const std::size_t len = w.filter_len();
  const std::size_t m = band_length(n, len, mode);
  const auto offset = 2 - static_cast<std::ptrdiff_t>(len);
  approx.assign(m, 0.0);
  detail.assign(m, 0.0);

  for (std::size_t o = 0; o < m; ++o) {
    const std::ptrdiff_t base = 2 * static_cast<std::ptrdiff_t>(o) + offset;
    double a = 0.0;
    double d = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      const std::ptrdiff_t p = base + static_cast<std::ptrdiff_t>(k);
      double v;
      if (p >= 0 && p < static_cast<std::ptrdiff_t>(n)) {
        v = x[static_cast<std::size_t>(p)];
      } else {
        v = x[mode == BoundaryMode::symmetric ? reflect(p, n) : wrap(p, n)];
      }
      a += w.lowpass[k] * v;
      d += w.highpass[k] * v;
    }
    approx[o] = a;
    detail[o] = d;
  }
}

// Adjoint of `analyze`. For an orthonormal bank every output position in
// [0, out_len) receives its full set of contributions, so this recovers the
// analysed signal exactly in both boundary modes.
std::vector<double> synthesize(std::span<const double> approx, std::span<const double> detail,
                               const WaveletSpec& w, BoundaryMode mode, std::size_t out_len) {
  std::vector<double> x(out_len, 0.0);
  const std::size_t len = w.filter_len();
  const auto offset = 2 - static_cast<std::ptrdiff_t>(len);
  const auto n = static_cast<std::ptrdiff_t>(out_len);

  for (std::size_t o = 0; o < approx.size(); ++o) {
    const std::ptrdiff_t base = 2 * static_cast<std::ptrdiff_t>(o) + offset;
    for (std::size_t k = 0; k < len; ++k) {
      std::ptrdiff_t p = base + static_cast<std::ptrdiff_t>(k);
      if (mode == BoundaryMode::periodic) {
        p = static_cast<std::ptrdiff_t>(wrap(p, out_len));
      } else if (p < 0 || p >= n) {
        continue;
      }
      x[static_cast<std::size_t>(p)] += w.lowpass[k] * approx[o] + w.highpass[k] * detail[o];
    }
  }
  return x;
}

std::size_t floor_log2_ratio(std::size_t n, std::size_t divisor) {
  std::size_t levels = 0;
  while ((divisor << (levels + 1)) <= n) ++levels;
  return levels;
}

}  // namespace

const WaveletSpec& wavelet(WaveletName name) {
  static const WaveletSpec haar = make_spec(WaveletName::haar, kHaar);
  static const WaveletSpec db2 = make_spec(WaveletName::db2, kDb2);
  static const WaveletSpec db4 = make_spec(WaveletName::db4, kDb4);
  switch (name) {
    case WaveletName::haar: return haar;
    case WaveletName::db2: return db2;
    case WaveletName::db4: return db4;
  }
  throw std::invalid_argument("unknown wavelet");
}

WaveletName parse_wavelet_name(std::string_view text) {
  if (text == "haar") return WaveletName::haar;
  if (text == "db2") return WaveletName::db2;
  if (text == "db4") return WaveletName::db4;
  throw std::invalid_argument("unknown wavelet '" + std::string(text) +
                              "' (expected haar, db2 or db4)");
}

std::string_view to_string(WaveletName name) {
  switch (name) {
    case WaveletName::haar: return "haar";
    case WaveletName::db2: return "db2";
    case WaveletName::db4: return "db4";
  }
  return "?";
}

BoundaryMode parse_boundary_mode(std::string_view text) {
  if (text == "symmetric") return BoundaryMode::symmetric;
  if (text == "periodic") return BoundaryMode::periodic;
  throw std::invalid_argument("unknown boundary mode '" + std::string(text) +
                              "' (expected symmetric or periodic)");
}

std::string_view to_string(BoundaryMode mode) {
  return mode == BoundaryMode::symmetric ? "symmetric" : "periodic";
}

std::size_t max_levels(std::size_t n, std::size_t filter_len) {
  if (filter_len < 2) throw std::invalid_argument("filter length must be >= 2");
  if (n < filter_len)
    throw std::invalid_argument("signal length " + std::to_string(n) +
                                " is shorter than the filter length " +
                                std::to_string(filter_len));
  // Largest J with (filter_len - 1) * 2^J <= n; for Haar that is 2^J <= n.
  return floor_log2_ratio(n, filter_len - 1);
}

std::size_t max_levels(std::size_t n, std::size_t filter_len, BoundaryMode mode) {
  std::size_t levels = max_levels(n, filter_len);
  if (mode == BoundaryMode::periodic) {
    std::size_t even_levels = 0;
    for (std::size_t m = n; m % 2 == 0 && m > 0; m /= 2) ++even_levels;
    levels = std::min(levels, even_levels);
  }
  return levels;
}

std::size_t band_length(std::size_t n, std::size_t filter_len, BoundaryMode mode) {
  if (mode == BoundaryMode::periodic) return n / 2;
  return (n + filter_len - 1) / 2;
}

WaveletDecomposition dwt_forward(std::span<const double> signal, const WaveletSpec& w,
                                 std::size_t levels, BoundaryMode mode) {
  if (levels < 1) throw std::invalid_argument("decomposition needs at least one level");
  const std::size_t limit = max_levels(signal.size(), w.filter_len(), mode);
  if (levels > limit)
    throw std::invalid_argument(
        std::to_string(levels) + " levels requested but at most " + std::to_string(limit) +
        " are permissible for a length-" + std::to_string(signal.size()) + " signal with " +
        std::string(to_string(w.name)) + " in " + std::string(to_string(mode)) + " mode");

  WaveletDecomposition out;
  out.wavelet = w.name;
  out.mode = mode;
  out.levels = levels;
  out.original_len = signal.size();
  out.details.resize(levels);

  std::vector<double> current(signal.begin(), signal.end());
  std::vector<double> approx;
  for (std::size_t j = 0; j < levels; ++j) {
    analyze(current, w, mode, approx, out.details[j]);
    current.swap(approx);
  }
  out.approx = std::move(current);
  return out;
}

std::vector<double> dwt_inverse(const WaveletDecomposition& decomp) {
  const WaveletSpec& w = wavelet(decomp.wavelet);
  if (decomp.levels < 1 || decomp.details.size() != decomp.levels)
    throw std::invalid_argument("decomposition has " + std::to_string(decomp.details.size()) +
                                " detail bands but declares " + std::to_string(decomp.levels) +
                                " levels");

  // Replay the band-length chain from the original length.
  std::vector<std::size_t> lengths{decomp.original_len};
  for (std::size_t j = 0; j < decomp.levels; ++j)
    lengths.push_back(band_length(lengths.back(), w.filter_len(), decomp.mode));

  for (std::size_t j = 0; j < decomp.levels; ++j) {
    if (decomp.details[j].size() != lengths[j + 1])
      throw std::invalid_argument("detail band d" + std::to_string(j + 1) + " has length " +
                                  std::to_string(decomp.details[j].size()) + ", expected " +
                                  std::to_string(lengths[j + 1]));
  }
  if (decomp.approx.size() != lengths.back())
    throw std::invalid_argument("approximation band has length " +
                                std::to_string(decomp.approx.size()) + ", expected " +
                                std::to_string(lengths.back()));

  std::vector<double> current = decomp.approx;
  for (std::size_t j = decomp.levels; j-- > 0;)
    current = synthesize(current, decomp.details[j], w, decomp.mode, lengths[j]);
  return current;
}

std::vector<std::string> band_names(std::size_t levels) {
  std::vector<std::string> names;
  names.reserve(levels + 1);
  names.push_back("a" + std::to_string(levels));
  for (std::size_t j = levels; j >= 1; --j) names.push_back("d" + std::to_string(j));
  return names;
}

}  // namespace pvff::dwt
